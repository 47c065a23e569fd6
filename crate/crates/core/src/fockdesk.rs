//! Desk-scale Fock space: a few boson modes truncated at total occupation
//! `N`, with the fiber Hamiltonians
//!
//! ```text
//! H_κ(p, ε) = ½ (p − ε P_f − κ A)² + κ² H_f,     A = Σ_j g_j (a_j + a_j†)/√2
//! ```
//!
//! where `g_j = √(W_j/ω_j)`. `ε = 0` is the dipole fiber; `ε = 1` the full
//! one with photon recoil through the scalar momentum labels `q_j`.
//!
//! Every operator is a product of truncated ladder matrices, so `A²` is
//! `(PAP)²` rather than `P A² P`; the two agree away from the top shell.

use crate::error::{Error, Result};
use faer::{Mat, Side};
use serde::Serialize;
use std::collections::HashMap;

/// Hard cap on the basis size.
pub const MAX_BASIS: usize = 200_000;
/// Largest matrix handed to dense eigensolvers and exponentials.
pub const MAX_DENSE: usize = 2000;
/// Lanczos residual target, relative to `max(1, |θ|)`.
pub const LANCZOS_TOL: f64 = 1e-9;
/// Truncation allowance of the diamagnetic check.
pub const DIAMAGNETIC_ALLOWANCE: f64 = 1e-6;

/// One boson mode: frequency `ω`, weight `W` (polarization included) and a
/// scalar momentum label `q` along the scan axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub omega: f64,
    pub weight: f64,
    pub q: f64,
}

impl Mode {
    pub fn new(omega: f64, weight: f64, q: f64) -> Self {
        Mode { omega, weight, q }
    }

    /// Coupling `g = √(W/ω)`.
    pub fn coupling(&self) -> f64 {
        (self.weight / self.omega).sqrt()
    }
}

/// Parses `"w:W:q,w:W:q,…"`.
pub fn parse_modes(s: &str) -> Result<Vec<Mode>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|tok| {
            let parts: Vec<&str> = tok.trim().split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Config(format!("mode '{tok}' is not of the form w:W:q")));
            }
            let num = |p: &str| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Config(format!("mode '{tok}': cannot parse '{p}': {e}")))
            };
            Ok(Mode::new(num(parts[0])?, num(parts[1])?, num(parts[2])?))
        })
        .collect()
}

/// `1 + Σ W_j/ω_j²`.
pub fn m_eff_disc(modes: &[Mode]) -> f64 {
    1.0 + modes.iter().map(|m| m.weight / (m.omega * m.omega)).sum::<f64>()
}

/// `C(m + n, m)` saturating at `usize::MAX`.
fn binomial_dim(m: usize, n: usize) -> usize {
    let mut acc: u128 = 1;
    for k in 1..=m as u128 {
        acc = acc * (n as u128 + k) / k;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Largest `N` whose `m`-mode basis has at most `limit` states.
pub fn max_ntot_for(m: usize, limit: usize) -> usize {
    let mut n = 0;
    while n < u16::MAX as usize && binomial_dim(m, n + 1) <= limit {
        n += 1;
    }
    n
}

/// Occupation-number basis `{n : Σ n_j ≤ N}`, ordered by total occupation so
/// that every low-occupation subspace is a prefix.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: Vec<Mode>,
    n_tot: usize,
    states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl FockBasis {
    pub fn new(modes: &[Mode], n_tot: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidInput("at least one mode is required".into()));
        }
        if n_tot < 1 {
            return Err(Error::InvalidInput("total occupation cutoff must be at least 1".into()));
        }
        for (i, m) in modes.iter().enumerate() {
            if !(m.omega.is_finite() && m.omega > 0.0 && m.weight.is_finite() && m.weight >= 0.0 && m.q.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "mode {i}: need omega > 0, weight >= 0, finite q (got {}:{}:{})",
                    m.omega, m.weight, m.q
                )));
            }
        }
        if n_tot > u16::MAX as usize {
            return Err(Error::Dimension { context: "occupation cutoff", dim: n_tot, limit: u16::MAX as usize });
        }
        let dim = binomial_dim(modes.len(), n_tot);
        if dim > MAX_BASIS {
            return Err(Error::Dimension { context: "Fock basis", dim, limit: MAX_BASIS });
        }
        let m = modes.len();
        let mut states = Vec::with_capacity(dim);
        let mut cur = vec![0u16; m];
        for total in 0..=n_tot {
            compositions(total, 0, &mut cur, &mut states);
        }
        debug_assert_eq!(states.len(), dim);
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(FockBasis { modes: modes.to_vec(), n_tot, states, index })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }
    pub fn n_tot(&self) -> usize {
        self.n_tot
    }
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
    pub fn state(&self, i: usize) -> &[u16] {
        &self.states[i]
    }
    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.index.get(occ).copied()
    }
    /// Total occupation of basis state `i`.
    pub fn total(&self, i: usize) -> usize {
        self.states[i].iter().map(|&n| n as usize).sum()
    }
    /// Number of basis states with total occupation `≤ k`.
    pub fn prefix_len(&self, k: usize) -> usize {
        self.states.partition_point(|s| s.iter().map(|&n| n as usize).sum::<usize>() <= k)
    }
}

fn compositions(remaining: usize, pos: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
    if pos == cur.len() - 1 {
        cur[pos] = remaining as u16;
        out.push(cur.clone());
        return;
    }
    for k in (0..=remaining).rev() {
        cur[pos] = k as u16;
        compositions(remaining - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

/// Abstraction over dense and matrix-free symmetric operators.
pub trait SymOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl SymOp for Mat<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            let mut s = 0.0;
            for j in 0..n {
                s += self[(i, j)] * x[j];
            }
            *yi = s;
        }
    }
}

/// `H_f`, `P_f`, `N` (diagonal) and `A` (sparse) on a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct FiberOperators {
    basis: FockBasis,
    hf: Vec<f64>,
    pf: Vec<f64>,
    number: Vec<f64>,
    /// `(upper, lower, mode, √n_j)`: `a_j†|lower⟩ = √n_j |upper⟩`.
    ladder: Vec<(usize, usize, usize, f64)>,
    /// Row-wise sparse `A`.
    a_rows: Vec<Vec<(usize, f64)>>,
}

impl FiberOperators {
    pub fn new(basis: FockBasis) -> Self {
        let dim = basis.dim();
        let modes = basis.modes().to_vec();
        let mut hf = vec![0.0; dim];
        let mut pf = vec![0.0; dim];
        let mut number = vec![0.0; dim];
        let mut ladder = Vec::new();
        let mut a_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut lower = vec![0u16; modes.len()];
        for i in 0..dim {
            let occ = basis.state(i);
            for (j, m) in modes.iter().enumerate() {
                let n = occ[j] as f64;
                hf[i] += n * m.omega;
                pf[i] += n * m.q;
                number[i] += n;
            }
            for j in 0..modes.len() {
                if occ[j] == 0 {
                    continue;
                }
                lower.copy_from_slice(occ);
                lower[j] -= 1;
                let l = basis.index_of(&lower).expect("lowered state lies in the basis");
                let s = (occ[j] as f64).sqrt();
                ladder.push((i, l, j, s));
                let v = modes[j].coupling() * s * std::f64::consts::FRAC_1_SQRT_2;
                a_rows[i].push((l, v));
                a_rows[l].push((i, v));
            }
        }
        for row in &mut a_rows {
            row.sort_by_key(|&(c, _)| c);
        }
        FiberOperators { basis, hf, pf, number, ladder, a_rows }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
    pub fn hf_diag(&self) -> &[f64] {
        &self.hf
    }
    pub fn pf_diag(&self) -> &[f64] {
        &self.pf
    }
    pub fn number_diag(&self) -> &[f64] {
        &self.number
    }

    fn diag_mat(d: &[f64]) -> Mat<f64> {
        Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn hf(&self) -> Mat<f64> {
        Self::diag_mat(&self.hf)
    }
    pub fn pf(&self) -> Mat<f64> {
        Self::diag_mat(&self.pf)
    }
    pub fn number(&self) -> Mat<f64> {
        Self::diag_mat(&self.number)
    }

    /// Dense `A(0)`.
    pub fn a_field(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (i, row) in self.a_rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Dense annihilation operator `a_j`.
    pub fn annihilation(&self, j: usize) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for &(up, lo, mode, s) in &self.ladder {
            if mode == j {
                m[(lo, up)] = s;
            }
        }
        m
    }

    /// Dense generator `K = Σ_j c_j (a_j† − a_j)/√2`, `c_j = g_j/ω_j`.
    /// It is `−i` times the truncated dressing field, hence real antisymmetric.
    pub fn dressing_generator(&self) -> Mat<f64> {
        let n = self.dim();
        let modes = self.basis.modes();
        let mut k = Mat::zeros(n, n);
        for &(up, lo, j, s) in &self.ladder {
            let v = modes[j].coupling() / modes[j].omega * s * std::f64::consts::FRAC_1_SQRT_2;
            k[(up, lo)] = v;
            k[(lo, up)] = -v;
        }
        k
    }

    fn shift(&self, p: f64, eps: f64) -> Vec<f64> {
        self.pf.iter().map(|&q| p - eps * q).collect()
    }

    /// Dense `H_κ(p, ε)`, exactly symmetric.
    pub fn fiber_hamiltonian(&self, kappa: f64, p: f64, eps: f64) -> Result<Mat<f64>> {
        let n = self.dim();
        if n > MAX_DENSE {
            return Err(Error::Dimension { context: "dense fiber Hamiltonian", dim: n, limit: MAX_DENSE });
        }
        let d = self.shift(p, eps);
        let k2 = kappa * kappa;
        let mut h = Mat::zeros(n, n);
        let mut acc = vec![0.0; n];
        let mut touched = Vec::new();
        for i in 0..n {
            // Row i of A², lower triangle only.
            for &(k, aik) in &self.a_rows[i] {
                for &(j, akj) in &self.a_rows[k] {
                    if j <= i {
                        if acc[j] == 0.0 {
                            touched.push(j);
                        }
                        acc[j] += aik * akj;
                    }
                }
            }
            for &j in &touched {
                h[(i, j)] += 0.5 * k2 * acc[j];
                acc[j] = 0.0;
            }
            touched.clear();
            for &(j, a) in &self.a_rows[i] {
                if j < i {
                    h[(i, j)] -= 0.5 * kappa * (d[i] + d[j]) * a;
                }
            }
            h[(i, i)] += 0.5 * d[i] * d[i] + k2 * self.hf[i];
        }
        for i in 0..n {
            for j in 0..i {
                h[(j, i)] = h[(i, j)];
            }
        }
        Ok(h)
    }

    /// Dense `½A² + H_f`.
    pub fn dipole_ground_operator(&self) -> Result<Mat<f64>> {
        self.fiber_hamiltonian(1.0, 0.0, 0.0)
    }

    /// Matrix-free `H_κ(p, ε)` for bases too large for dense storage.
    pub fn fiber_operator(&self, kappa: f64, p: f64, eps: f64) -> FiberOp<'_> {
        FiberOp { ops: self, kappa, d: self.shift(p, eps) }
    }

    fn apply_shifted_field(&self, kappa: f64, d: &[f64], x: &[f64], y: &mut [f64]) {
        for i in 0..x.len() {
            let mut s = d[i] * x[i];
            for &(j, a) in &self.a_rows[i] {
                s -= kappa * a * x[j];
            }
            y[i] = s;
        }
    }
}

/// `H_κ(p, ε)` applied as `½ B² + κ² H_f` with `B = D − κA`.
pub struct FiberOp<'a> {
    ops: &'a FiberOperators,
    kappa: f64,
    d: Vec<f64>,
}

impl SymOp for FiberOp<'_> {
    fn dim(&self) -> usize {
        self.ops.dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut z = vec![0.0; x.len()];
        self.ops.apply_shifted_field(self.kappa, &self.d, x, &mut z);
        self.ops.apply_shifted_field(self.kappa, &self.d, &z, y);
        let k2 = self.kappa * self.kappa;
        for i in 0..x.len() {
            y[i] = 0.5 * y[i] + k2 * self.ops.hf[i] * x[i];
        }
    }
}

/// Which end of the spectrum Lanczos targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Restarted Lanczos with full reorthogonalization. Returns the extreme
/// eigenvalue, its Ritz vector and the achieved residual `‖Hx − θx‖`.
pub fn lanczos<O: SymOp + ?Sized>(op: &O, which: Extreme, tol: f64) -> Result<(f64, Vec<f64>, f64)> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty operator".into()));
    }
    let m = n.min(120);
    // Deterministic start with weight on every basis vector.
    let mut v0: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
    let nv = norm(&v0);
    v0.iter_mut().for_each(|x| *x /= nv);
    let mut best = (f64::NAN, Vec::new(), f64::INFINITY);
    for _restart in 0..60 {
        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        let mut w = vec![0.0; n];
        for k in 0..m {
            op.apply(&basis[k], &mut w);
            let a = dot(&basis[k], &w);
            alpha.push(a);
            for _pass in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= c * bi);
                }
            }
            let bnorm = norm(&w);
            if k + 1 == m || bnorm < 1e-13 * a.abs().max(1.0) {
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|x| x / bnorm).collect());
        }
        let k = alpha.len();
        let t = Mat::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let evd = t
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Eigen { context: "Lanczos tridiagonal", detail: format!("{e:?}") })?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let idx = match which {
            Extreme::Smallest => 0,
            Extreme::Largest => k - 1,
        };
        let theta = s[idx];
        let mut x = vec![0.0; n];
        for (c, b) in basis.iter().enumerate().take(k) {
            let coef = u[(c, idx)];
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += coef * bi);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        op.apply(&x, &mut w);
        let res = w.iter().zip(&x).map(|(hx, xi)| (hx - theta * xi).powi(2)).sum::<f64>().sqrt();
        if res < best.2 {
            best = (theta, x.clone(), res);
        }
        if res <= tol * theta.abs().max(1.0) {
            return Ok(best);
        }
        v0 = x;
    }
    Err(Error::Eigen {
        context: "Lanczos",
        detail: format!("no convergence: residual {:.3e} at eigenvalue {}", best.2, best.0),
    })
}

/// Smallest eigenvalue: dense for `dim ≤ 2000`, Lanczos otherwise.
pub fn ground_energy(h: &Mat<f64>) -> Result<f64> {
    if h.nrows() <= MAX_DENSE {
        let ev = h
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen { context: "dense ground energy", detail: format!("{e:?}") })?;
        ev.first().copied().ok_or_else(|| Error::InvalidInput("empty matrix".into()))
    } else {
        Ok(lanczos(h, Extreme::Smallest, LANCZOS_TOL)?.0)
    }
}

/// Smallest eigenvalue of `H_κ(p, ε)`, dense or matrix-free by size.
pub fn fiber_ground_energy(ops: &FiberOperators, kappa: f64, p: f64, eps: f64) -> Result<f64> {
    if ops.dim() <= MAX_DENSE {
        ground_energy(&ops.fiber_hamiltonian(kappa, p, eps)?)
    } else {
        Ok(lanczos(&ops.fiber_operator(kappa, p, eps), Extreme::Smallest, LANCZOS_TOL)?.0)
    }
}

/// Exact ground energy of `½A² + H_f` in infinite Fock space:
/// `½ Σ_i (√μ_i − ω_i)` with `μ` the spectrum of `diag(ω²) + v vᵀ`, `v_j = √W_j`.
pub fn bogoliubov_energy(modes: &[Mode]) -> Result<f64> {
    if modes.is_empty() {
        return Err(Error::InvalidInput("at least one mode is required".into()));
    }
    let m = modes.len();
    let v: Vec<f64> = modes.iter().map(|md| md.weight.sqrt()).collect();
    let mat = Mat::from_fn(m, m, |i, j| v[i] * v[j] + if i == j { modes[i].omega.powi(2) } else { 0.0 });
    let mu = mat
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen { context: "Bogoliubov frequencies", detail: format!("{e:?}") })?;
    let sum_sqrt: f64 = mu.iter().map(|x| x.max(0.0).sqrt()).sum();
    let sum_w: f64 = modes.iter().map(|md| md.omega).sum();
    Ok((0.5 * (sum_sqrt - sum_w)).max(0.0))
}

/// `exp(X)` by scaling and squaring with a degree-18 Taylor polynomial.
pub fn expm(x: &Mat<f64>) -> Mat<f64> {
    let n = x.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| x[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scale = 0.5f64.powi(squarings);
    let xs = Mat::from_fn(n, n, |i, j| x[(i, j)] * scale);
    let mut result = Mat::<f64>::identity(n, n);
    let mut term = Mat::<f64>::identity(n, n);
    for k in 1..=18 {
        term = &term * &xs;
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
                result[(i, j)] += term[(i, j)];
            }
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `XᵀX` applied as two matrix-vector products.
struct Gram<'a>(&'a Mat<f64>);

impl SymOp for Gram<'_> {
    fn dim(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let xc = faer::Col::<f64>::from_fn(x.len(), |i| x[i]);
        let z = self.0 * &xc;
        let w = self.0.transpose() * &z;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = w[i];
        }
    }
}

/// Spectral norm of a general matrix: dense Gram spectrum for small
/// matrices, Lanczos on `XᵀX` otherwise.
fn spectral_norm(x: &Mat<f64>) -> Result<f64> {
    if x.ncols() <= 200 {
        let g = x.transpose() * x;
        let gs = Mat::from_fn(g.nrows(), g.ncols(), |i, j| 0.5 * (g[(i, j)] + g[(j, i)]));
        let ev = gs
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigen { context: "spectral norm", detail: format!("{e:?}") })?;
        return Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt());
    }
    let (top, _, _) = lanczos(&Gram(x), Extreme::Largest, LANCZOS_TOL)?;
    Ok(top.max(0.0).sqrt())
}

/// `‖(U_pᵀ H_dip U_p − p²/(2m*) − κ²(½A² + H_f)) P_low‖₂` where `U_p = e^{sK}`
/// with `s = p/(κ m*)` and `P_low` projects on `Σ n_j ≤ N/2`.
pub fn conjugation_residual(ops: &FiberOperators, kappa: f64, p: f64) -> Result<f64> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidInput(format!("kappa must be positive, got {kappa}")));
    }
    let n = ops.dim();
    let mstar = m_eff_disc(ops.basis().modes());
    let h = ops.fiber_hamiltonian(kappa, p, 0.0)?;
    let target = ops.dipole_ground_operator()?;
    let k2 = kappa * kappa;
    let s = p / (kappa * mstar);
    let conj = if p == 0.0 {
        h
    } else {
        let gen = ops.dressing_generator();
        let u = expm(&Mat::from_fn(n, n, |i, j| s * gen[(i, j)]));
        let hu = &h * &u;
        u.transpose() * &hu
    };
    let low = ops.basis().prefix_len(ops.basis().n_tot() / 2);
    let shift = p * p / (2.0 * mstar);
    let d = Mat::from_fn(n, low, |i, j| {
        conj[(i, j)] - k2 * target[(i, j)] - if i == j { shift } else { 0.0 }
    });
    spectral_norm(&d)
}

/// One row of a weak-coupling scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WclRow {
    pub kappa: f64,
    pub p: f64,
    pub epsilon: f64,
    #[serde(rename = "E_p")]
    pub e_p: f64,
    #[serde(rename = "E_0")]
    pub e_0: f64,
    pub gap: f64,
    pub target: f64,
    pub gap_dev: f64,
    #[serde(rename = "E0_dev")]
    pub e0_dev: f64,
    /// `NaN` when no horizon was requested.
    pub semigroup_res: f64,
}

/// Dispersion gap `E_κ(p) − E_κ(0)` against `p²/(2m_eff)` and `E_κ(0)`
/// against `κ²𝓔` (Bogoliubov), for every `(κ, p)` pair in input order.
pub fn wcl_scan(
    ops: &FiberOperators,
    kappas: &[f64],
    ps: &[f64],
    eps: f64,
    horizon: Option<f64>,
) -> Result<Vec<WclRow>> {
    let pairs: Vec<(f64, f64)> = kappas.iter().flat_map(|&k| ps.iter().map(move |&p| (k, p))).collect();
    wcl_rows(ops, &pairs, eps, horizon)
}

/// [`wcl_scan`] over an explicit list of `(κ, p)` pairs.
pub fn wcl_rows(ops: &FiberOperators, pairs: &[(f64, f64)], eps: f64, horizon: Option<f64>) -> Result<Vec<WclRow>> {
    let modes = ops.basis().modes();
    let cal_e = bogoliubov_energy(modes)?;
    let mstar = m_eff_disc(modes);
    let mut e0_cache: Vec<(f64, f64)> = Vec::new();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(kappa, p) in pairs {
        let e_0 = match e0_cache.iter().find(|(k, _)| *k == kappa) {
            Some(&(_, e)) => e,
            None => {
                let e = fiber_ground_energy(ops, kappa, 0.0, eps)?;
                e0_cache.push((kappa, e));
                e
            }
        };
        let e_p = if p == 0.0 { e_0 } else { fiber_ground_energy(ops, kappa, p, eps)? };
        let gap = e_p - e_0;
        let target = p * p / (2.0 * mstar);
        let semigroup_res = match horizon {
            Some(t) => semigroup_wcl_residual(ops, kappa, p, t, eps)?,
            None => f64::NAN,
        };
        rows.push(WclRow {
            kappa,
            p,
            epsilon: eps,
            e_p,
            e_0,
            gap,
            target,
            gap_dev: (gap - target).abs(),
            e0_dev: (e_0 - kappa * kappa * cal_e).abs(),
            semigroup_res,
        });
    }
    Ok(rows)
}

/// One momentum of the diamagnetic check.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiamagneticRow {
    pub kappa: f64,
    pub p: f64,
    #[serde(rename = "E_0")]
    pub e_0: f64,
    #[serde(rename = "E_p")]
    pub e_p: f64,
    /// `E_κ(0) − E_κ(p)`; positive values are violations.
    pub excess: f64,
    pub holds: bool,
}

/// `E_κ(0) ≤ E_κ(p) + allowance` for each `p`.
pub fn diamagnetic_check(ops: &FiberOperators, kappa: f64, ps: &[f64], eps: f64) -> Result<Vec<DiamagneticRow>> {
    let e_0 = fiber_ground_energy(ops, kappa, 0.0, eps)?;
    ps.iter()
        .map(|&p| {
            let e_p = if p == 0.0 { e_0 } else { fiber_ground_energy(ops, kappa, p, eps)? };
            let excess = e_0 - e_p;
            Ok(DiamagneticRow { kappa, p, e_0, e_p, excess, holds: excess <= DIAMAGNETIC_ALLOWANCE })
        })
        .collect()
}

/// Normalized ground state of `½A² + H_f`, sign fixed by a positive vacuum
/// component.
pub fn dressed_vacuum(ops: &FiberOperators) -> Result<Vec<f64>> {
    let (_, mut g, _) = lanczos(&ops.fiber_operator(1.0, 0.0, 0.0), Extreme::Smallest, LANCZOS_TOL)?;
    if g[0] < 0.0 {
        g.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(g)
}

/// `‖e^{−T(H_κ(p,ε) − κ²𝓔)} − P_g e^{−T(p−εP_f)²/(2m*)}‖₂` with `P_g` the
/// ground projector of `½A² + H_f` and `𝓔` the Bogoliubov energy.
pub fn semigroup_wcl_residual(ops: &FiberOperators, kappa: f64, p: f64, t: f64, eps: f64) -> Result<f64> {
    let n = ops.dim();
    if n > MAX_DENSE {
        return Err(Error::Dimension { context: "dense semigroup", dim: n, limit: MAX_DENSE });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be nonnegative, got {t}")));
    }
    let modes = ops.basis().modes();
    let cal_e = bogoliubov_energy(modes)?;
    let mstar = m_eff_disc(modes);

    let h = ops.fiber_hamiltonian(kappa, p, eps)?;
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen { context: "fiber semigroup", detail: format!("{e:?}") })?;
    let lam = evd.S().column_vector();
    let v = evd.U();
    let shift = kappa * kappa * cal_e;
    let vs = Mat::from_fn(n, n, |i, k| v[(i, k)] * (-t * (lam[k] - shift)).exp());
    let semigroup = &vs * v.transpose();

    let g = dressed_vacuum(ops)?;
    let lg: Vec<f64> = (0..n)
        .map(|i| {
            let s = p - eps * ops.pf[i];
            g[i] * (-t * s * s / (2.0 * mstar)).exp()
        })
        .collect();
    let diff = Mat::from_fn(n, n, |i, j| semigroup[(i, j)] - g[i] * lg[j]);
    spectral_norm(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_modes() -> Vec<Mode> {
        vec![Mode::new(1.0, 1.0, 0.6), Mode::new(2.0, 2.0, -0.6)]
    }

    #[test]
    fn basis_dimensions() {
        let one = FockBasis::new(&[Mode::new(1.0, 1.0, 0.0)], 3).unwrap();
        assert_eq!(one.dim(), 4);
        let two = FockBasis::new(&two_modes(), 2).unwrap();
        assert_eq!(two.dim(), 6);
        let three = vec![Mode::new(1.0, 1.0, 0.0); 3];
        assert_eq!(FockBasis::new(&three, 40).unwrap().dim(), 12341);
        let five = vec![Mode::new(1.0, 1.0, 0.0); 5];
        assert!(matches!(FockBasis::new(&five, 30), Err(Error::Dimension { dim: 324632, .. })));
        assert!(FockBasis::new(&[], 3).is_err());
    }

    #[test]
    fn index_round_trip_and_order() {
        let b = FockBasis::new(&two_modes(), 7).unwrap();
        for i in 0..b.dim() {
            assert_eq!(b.index_of(b.state(i)), Some(i));
        }
        assert_eq!(b.state(0), &[0, 0]);
        assert!((1..b.dim()).all(|i| b.total(i) >= b.total(i - 1)));
        assert_eq!(b.prefix_len(1), 3);
    }

    #[test]
    fn operators_are_symmetric_with_expected_diagonals() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 6).unwrap());
        let a = ops.a_field();
        let h = ops.fiber_hamiltonian(1.3, 0.4, 0.7).unwrap();
        for i in 0..ops.dim() {
            for j in 0..ops.dim() {
                assert_eq!(a[(i, j)], a[(j, i)]);
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
            let occ = ops.basis().state(i);
            let hf = occ[0] as f64 + 2.0 * occ[1] as f64;
            let pf = 0.6 * occ[0] as f64 - 0.6 * occ[1] as f64;
            assert!((ops.hf_diag()[i] - hf).abs() < 1e-15);
            assert!((ops.pf_diag()[i] - pf).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_matches_explicit_square() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 5).unwrap());
        let (kappa, p, eps) = (1.7, 0.3, 0.5);
        let n = ops.dim();
        let a = ops.a_field();
        let b = Mat::from_fn(n, n, |i, j| {
            (if i == j { p - eps * ops.pf_diag()[i] } else { 0.0 }) - kappa * a[(i, j)]
        });
        let b2 = &b * &b;
        let h = ops.fiber_hamiltonian(kappa, p, eps).unwrap();
        let op = ops.fiber_operator(kappa, p, eps);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let mut y = vec![0.0; n];
        op.apply(&x, &mut y);
        for i in 0..n {
            for j in 0..n {
                let e = 0.5 * b2[(i, j)] + if i == j { kappa * kappa * ops.hf_diag()[i] } else { 0.0 };
                assert!((h[(i, j)] - e).abs() < 1e-12);
            }
            let hx: f64 = (0..n).map(|j| h[(i, j)] * x[j]).sum();
            assert!((hx - y[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn ccr_on_interior() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 6).unwrap());
        let interior = ops.basis().prefix_len(ops.basis().n_tot() - 2);
        for j in 0..2 {
            for k in 0..2 {
                let aj = ops.annihilation(j);
                let ak = ops.annihilation(k);
                let comm = &aj * ak.transpose() - ak.transpose() * &aj;
                for c in 0..interior {
                    for r in 0..ops.dim() {
                        let expect = if j == k && r == c { 1.0 } else { 0.0 };
                        assert!((comm[(r, c)] - expect).abs() < 1e-13, "j={j} k={k} r={r} c={c}");
                    }
                }
            }
        }
    }

    #[test]
    fn kappa_zero_is_diagonal() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 6).unwrap());
        let p = 0.9;
        let e = fiber_ground_energy(&ops, 0.0, p, 1.0).unwrap();
        let expect = ops.pf_diag().iter().map(|q| 0.5 * (p - q).powi(2)).fold(f64::INFINITY, f64::min);
        assert!((e - expect).abs() < 1e-14);
        let zero_q = vec![Mode::new(1.0, 1.0, 0.0), Mode::new(2.0, 2.0, 0.0)];
        let o2 = FiberOperators::new(FockBasis::new(&zero_q, 5).unwrap());
        let h0 = o2.fiber_hamiltonian(1.1, 0.4, 0.0).unwrap();
        let h1 = o2.fiber_hamiltonian(1.1, 0.4, 1.0).unwrap();
        assert_eq!(h0, h1);
    }

    #[test]
    fn single_mode_oscillator() {
        let ops = FiberOperators::new(FockBasis::new(&[Mode::new(1.0, 3.0, 0.0)], 60).unwrap());
        let e = fiber_ground_energy(&ops, 1.0, 0.0, 0.0).unwrap();
        assert!((e - 0.5).abs() < 1e-6, "{e}");
        assert!((bogoliubov_energy(ops.basis().modes()).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bogoliubov_cases() {
        let zero = vec![Mode::new(1.0, 0.0, 0.0), Mode::new(3.0, 0.0, 0.0)];
        assert_eq!(bogoliubov_energy(&zero).unwrap(), 0.0);
        // Two modes by the explicit 2×2 eigenproblem.
        let m = [[1.0 + 1.0, 2f64.sqrt()], [2f64.sqrt(), 4.0 + 2.0]];
        let tr = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let disc = (tr * tr / 4.0 - det).sqrt();
        let expect = 0.5 * ((tr / 2.0 + disc).sqrt() + (tr / 2.0 - disc).sqrt() - 3.0);
        assert!((bogoliubov_energy(&two_modes()).unwrap() - expect).abs() < 1e-14);
        assert!((expect - 0.392389714113927).abs() < 1e-12);
    }

    #[test]
    fn dense_fock_matches_bogoliubov() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 50).unwrap());
        let e = ground_energy(&ops.dipole_ground_operator().unwrap()).unwrap();
        let b = bogoliubov_energy(&two_modes()).unwrap();
        assert!((e - b).abs() < 1e-6, "{e} vs {b}");
    }

    #[test]
    fn lanczos_matches_dense() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 20).unwrap());
        let h = ops.fiber_hamiltonian(2.0, 0.2, 1.0).unwrap();
        let dense = ground_energy(&h).unwrap();
        let (l, _, res) = lanczos(&ops.fiber_operator(2.0, 0.2, 1.0), Extreme::Smallest, LANCZOS_TOL).unwrap();
        assert!((dense - l).abs() < 1e-9, "{dense} vs {l}");
        assert!(res <= LANCZOS_TOL * l.abs().max(1.0));
        let evs = h.self_adjoint_eigenvalues(Side::Lower).unwrap();
        let (top, _, _) = lanczos(&h, Extreme::Largest, LANCZOS_TOL).unwrap();
        assert!((top - evs[evs.len() - 1]).abs() < 1e-8 * top.abs());
        let diag = Mat::from_fn(5, 5, |i, j| if i == j { [3.0, -1.0, 2.0, 7.0, 0.5][i] } else { 0.0 });
        assert_eq!(ground_energy(&diag).unwrap(), -1.0);
    }

    #[test]
    fn expm_of_rotation() {
        let th = 2.7;
        let x = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => -th,
            (1, 0) => th,
            _ => 0.0,
        });
        let e = expm(&x);
        assert!((e[(0, 0)] - th.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - th.sin()).abs() < 1e-14);
    }

    #[test]
    fn conjugation_identity() {
        let ops20 = FiberOperators::new(FockBasis::new(&[Mode::new(1.0, 3.0, 0.0)], 20).unwrap());
        let ops40 = FiberOperators::new(FockBasis::new(&[Mode::new(1.0, 3.0, 0.0)], 40).unwrap());
        assert!(conjugation_residual(&ops20, 1.0, 0.0).unwrap() < 1e-12);
        let r20 = conjugation_residual(&ops20, 1.0, 0.5).unwrap();
        let r40 = conjugation_residual(&ops40, 1.0, 0.5).unwrap();
        assert!(r40 <= r20, "{r40} vs {r20}");
        assert!(r40 < 1e-6, "{r40}");
    }

    #[test]
    fn dipole_gap_is_kappa_independent() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 30).unwrap());
        let rows = wcl_scan(&ops, &[1.0, 2.0, 4.0], &[0.0, 0.2], 0.0, None).unwrap();
        let gaps: Vec<f64> = rows.iter().filter(|r| r.p == 0.2).map(|r| r.gap).collect();
        for g in &gaps {
            assert!((g - gaps[0]).abs() < 1e-8);
            assert!((g - 0.008).abs() < 1e-6);
        }
        for r in rows.iter().filter(|r| r.p == 0.0) {
            assert_eq!((r.gap, r.gap_dev), (0.0, 0.0));
        }
    }

    #[test]
    fn ground_energy_refines_toward_kappa_squared_cal_e() {
        // At ε=0, E_κ(0) = κ²𝓔 up to truncation; refining N closes the gap.
        let dev = |n| {
            let ops = FiberOperators::new(FockBasis::new(&two_modes(), n).unwrap());
            wcl_scan(&ops, &[2.0], &[0.0], 0.0, None).unwrap()[0].e0_dev
        };
        let (a, b, c) = (dev(10), dev(20), dev(40));
        assert!(a > b && b > c, "{a} {b} {c}");
    }

    #[test]
    fn diamagnetic_small_cases() {
        let ops = FiberOperators::new(FockBasis::new(&[Mode::new(1.0, 1.0, 0.6)], 40).unwrap());
        let rows = diamagnetic_check(&ops, 2.0, &[0.0, 0.3], 1.0).unwrap();
        assert_eq!(rows[0].excess, 0.0);
        assert!(rows.iter().all(|r| r.holds));
        let rows0 = diamagnetic_check(&ops, 0.0, &[0.0, 0.5, 1.0], 1.0).unwrap();
        assert!(rows0.iter().all(|r| r.holds && r.e_0 == 0.0));
    }

    #[test]
    fn semigroup_edge_cases() {
        let ops = FiberOperators::new(FockBasis::new(&two_modes(), 8).unwrap());
        let r0 = semigroup_wcl_residual(&ops, 1.0, 0.2, 0.0, 1.0).unwrap();
        assert!((r0 - 1.0).abs() < 1e-10, "{r0}");
        let free = vec![Mode::new(1.0, 0.0, 0.6), Mode::new(2.0, 0.0, -0.6)];
        let of = FiberOperators::new(FockBasis::new(&free, 8).unwrap());
        let r = semigroup_wcl_residual(&of, 1.0, 0.2, 1.0, 1.0).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }

    #[test]
    fn mode_parsing() {
        let m = parse_modes("1:1:0.6, 2:2:-0.6").unwrap();
        assert_eq!(m, two_modes());
        assert!(parse_modes("1:1").is_err());
        assert!(parse_modes("1:x:0").is_err());
        assert!((m_eff_disc(&m) - 2.5).abs() < 1e-15);
    }
}
