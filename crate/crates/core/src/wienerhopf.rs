//! Truncated Wiener–Hopf operators `(C_T u)(t) = ∫₀^T ρ(t−s) u(s) ds`.
//!
//! Discretized by Nyström on composite Gauss–Legendre panels and symmetrized
//! as `M = W^{1/2} K W^{1/2}`, so that `det(I + κ²C_T) ≈ det(I + κ²M)` comes
//! from a symmetric eigenproblem and `(I + κ²C_T)⁻¹1` from a Cholesky solve.
//!
//! The kernel `ρ(t)` has a derivative jump at `t = 0`, which limits plain
//! Nyström to second order in `1/n`.

use crate::energy::{ground_energy, log_spectral_energy, SpectralFunctions};
use crate::error::{Error, Result};
use crate::formfactor::RadialMeasure;
use crate::quad::gauss_legendre;
use faer::linalg::solvers::Solve;
use faer::{Col, Mat, Side};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::OnceLock;

/// Gauss–Legendre order of each panel; node counts are rounded up to it.
pub const PANEL_ORDER: usize = 8;
/// Default node density per unit of `T`.
pub const NODES_PER_UNIT_T: f64 = 40.0;
pub const MAX_DEFAULT_NODES: usize = 4000;
/// Relative eigenvalue floor of the positivity check.
pub const PSD_TOL: f64 = 1e-10;
const SOLVE_RESIDUAL_TOL: f64 = 1e-10;

/// Default node budget `40·T`, capped at 4000 and rounded to whole panels.
pub fn default_nodes(t_max: f64) -> usize {
    let n = (NODES_PER_UNIT_T * t_max).ceil().clamp(PANEL_ORDER as f64, MAX_DEFAULT_NODES as f64) as usize;
    round_to_panels(n)
}

fn round_to_panels(n: usize) -> usize {
    n.div_ceil(PANEL_ORDER) * PANEL_ORDER
}

/// Nyström discretization of `C_T` at coupling `κ`.
#[derive(Debug)]
pub struct WienerHopfGrid {
    t_max: f64,
    kappa: f64,
    /// `d` for continuum measures, 1 for atoms.
    components: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    matrix: Mat<f64>,
    eigenvalues: OnceLock<Vec<f64>>,
}

impl WienerHopfGrid {
    /// Builds the grid with `n` nodes (rounded up to a multiple of the panel
    /// order) on `[0, T]`.
    pub fn build(ff: &RadialMeasure, kappa: f64, t_max: f64, n: usize) -> Result<Self> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidInput(format!("horizon T must be positive, got {t_max}")));
        }
        if n < PANEL_ORDER {
            return Err(Error::InvalidInput(format!("need at least {PANEL_ORDER} nodes, got {n}")));
        }
        let sf = SpectralFunctions::new(ff.clone(), kappa)?;
        let n = round_to_panels(n);
        let panels = n / PANEL_ORDER;
        let h = t_max / panels as f64;
        let (x, w) = gauss_legendre(PANEL_ORDER);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for p in 0..panels {
            for k in 0..PANEL_ORDER {
                nodes.push((p as f64 + 0.5 * (1.0 + x[k])) * h);
                weights.push(0.5 * h * w[k]);
            }
        }

        // ρ only depends on (panel offset, local node pair); ρ is even, so
        // negative offsets reuse the table with the pair swapped.
        let q = PANEL_ORDER;
        let table: Vec<f64> = (0..panels * q * q)
            .into_par_iter()
            .map(|idx| {
                let dp = idx / (q * q);
                let k = (idx / q) % q;
                let l = idx % q;
                let dt = (dp as f64 + 0.5 * (x[k] - x[l])) * h;
                sf.rho(dt)
            })
            .collect::<Result<_>>()?;

        let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let mut matrix = Mat::from_fn(n, n, |i, j| {
            if j > i {
                return 0.0;
            }
            let (pi, ki) = (i / q, i % q);
            let (pj, kj) = (j / q, j % q);
            let r = if pi >= pj {
                table[((pi - pj) * q + ki) * q + kj]
            } else {
                table[((pj - pi) * q + kj) * q + ki]
            };
            sw[i] * r * sw[j]
        });
        for i in 0..n {
            for j in i + 1..n {
                matrix[(i, j)] = matrix[(j, i)];
            }
        }
        Ok(WienerHopfGrid {
            t_max,
            kappa,
            components: ff.components(),
            nodes,
            weights,
            matrix,
            eigenvalues: OnceLock::new(),
        })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn n(&self) -> usize {
        self.nodes.len()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    /// The symmetrized kernel matrix `W^{1/2} K W^{1/2}`.
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }
    /// Number of identical scalar components the full operator splits into.
    pub fn components(&self) -> f64 {
        self.components
    }

    /// Ascending eigenvalues of `M`, after the positivity check.
    pub fn eigenvalues(&self) -> Result<&[f64]> {
        if let Some(v) = self.eigenvalues.get() {
            return Ok(v);
        }
        let ev = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen { context: "Wiener-Hopf kernel", detail: format!("{e:?}") })?;
        let norm = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min = ev.first().copied().unwrap_or(0.0);
        if min < -PSD_TOL * norm {
            return Err(Error::NotPsd { min_eigenvalue: min, tolerance: PSD_TOL * norm });
        }
        Ok(self.eigenvalues.get_or_init(|| ev))
    }

    /// `Σ_i M_ii`, the discrete trace of `C_T`.
    pub fn trace(&self) -> f64 {
        (0..self.n()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// `log det(I + κ²M)` of one scalar component.
    pub fn log_det(&self) -> Result<f64> {
        if self.kappa == 0.0 {
            return Ok(0.0);
        }
        let k2 = self.kappa * self.kappa;
        // Eigenvalues in [−tol·‖M‖, 0) are rounding noise around zero.
        Ok(self.eigenvalues()?.iter().map(|&l| (k2 * l.max(0.0)).ln_1p()).sum())
    }

    /// Node values of `u_T = (I + κ²C_T)⁻¹ 1`.
    pub fn solve_u(&self) -> Result<Vec<f64>> {
        let n = self.n();
        if self.kappa == 0.0 {
            return Ok(vec![1.0; n]);
        }
        let k2 = self.kappa * self.kappa;
        let a = Mat::from_fn(n, n, |i, j| k2 * self.matrix[(i, j)] + if i == j { 1.0 } else { 0.0 });
        let llt = a
            .llt(Side::Lower)
            .map_err(|_| Error::Solve { context: "Cholesky of I + kappa^2 M (not positive definite)", residual: f64::NAN })?;
        let sw = Col::from_fn(n, |i| self.weights[i].sqrt());
        let v = llt.solve(&sw);
        let r = &a * &v - &sw;
        let residual = (0..n).map(|i| (r[i] / sw[i]).abs()).fold(0.0, f64::max);
        if !(residual <= SOLVE_RESIDUAL_TOL) {
            return Err(Error::Solve { context: "u_T integral equation", residual });
        }
        Ok((0..n).map(|i| v[i] / sw[i]).collect())
    }

    /// `(1/T) Σ w_i u_i`, the discrete `(1/T)⟨1, (I + κ²C_T)⁻¹ 1⟩`.
    ///
    /// Normalized by `Σ w_i` (equal to `T` up to rounding) so that the bound
    /// `≤ 1` holds exactly.
    pub fn mass_functional(&self) -> Result<f64> {
        let u = self.solve_u()?;
        let total: f64 = self.weights.iter().sum();
        Ok(u.iter().zip(&self.weights).map(|(u, w)| u * w).sum::<f64>() / total)
    }

    /// Vacuum expectation of `e^{−T H}` for the dipole fiber at momentum `p`:
    /// `det(I + κ²C_T)^{−c/2} · exp(−½ p² T · mass_functional)` with `c` the
    /// number of components.
    pub fn vacuum_amplitude(&self, p: f64) -> Result<f64> {
        let ld = self.log_det()?;
        let mass = if p == 0.0 { 0.0 } else { self.mass_functional()? };
        Ok((-0.5 * self.components * ld - 0.5 * p * p * self.t_max * mass).exp())
    }
}

/// Convenience wrapper around [`WienerHopfGrid::vacuum_amplitude`].
pub fn vacuum_amplitude(ff: &RadialMeasure, kappa: f64, p: f64, t_max: f64, n: usize) -> Result<f64> {
    WienerHopfGrid::build(ff, kappa, t_max, n)?.vacuum_amplitude(p)
}

/// One horizon of an Ahiezer–Kac refinement study.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AkRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub n: usize,
    pub logdet_per_t: f64,
    pub ak_target: f64,
    pub ak_dev: f64,
    pub mass_fn: f64,
    pub mass_target: f64,
    pub mass_dev: f64,
}

/// `(1/T)log det` and the mass functional along a ladder of horizons,
/// against `(1/2π)∫log(1+κ²ρ̂)` and `1/m_eff`. `nodes(T)` picks `n`.
pub fn ak_convergence_report(
    ff: &RadialMeasure,
    kappa: f64,
    t_list: &[f64],
    nodes: impl Fn(f64) -> usize,
) -> Result<Vec<AkRow>> {
    if t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("T ladder must be strictly increasing".into()));
    }
    let ak_target = log_spectral_energy(ff, kappa)?;
    let mass_target = 1.0 / ff.m_eff()?;
    t_list
        .iter()
        .map(|&t| {
            let grid = WienerHopfGrid::build(ff, kappa, t, nodes(t))?;
            let logdet_per_t = grid.log_det()? / t;
            let mass_fn = grid.mass_functional()?;
            Ok(AkRow {
                t,
                n: grid.n(),
                logdet_per_t,
                ak_target,
                ak_dev: (logdet_per_t - ak_target).abs(),
                mass_fn,
                mass_target,
                mass_dev: (mass_fn - mass_target).abs(),
            })
        })
        .collect()
}

/// `−(1/T) log` of the vacuum amplitude's large-`T` target,
/// `p²/(2m_eff) + κ²𝓔`, in the scalar convention of the grid.
pub fn amplitude_rate_target(ff: &RadialMeasure, kappa: f64, p: f64) -> Result<f64> {
    let e = ground_energy(ff)?.cal_e;
    Ok(p * p / (2.0 * ff.m_eff()?) + kappa * kappa * e)
}
