//! Generalized Hermite polynomials `H_n(a, x) = (−1)ⁿ e^{ax²} ∂ⁿ_x e^{−ax²}`.
//!
//! `H_n(1, ·)` is the physicists' Hermite polynomial and
//! `H_n(a, x) = a^{n/2} H_n(1, √a x)`. Their generating function is
//! `Σ H_n(a,x) tⁿ/n! = exp(2atx − at²)`; replacing `t` by a symmetric
//! matrix `S` gives the generating operator `exp(−a(S² − 2xS))`.

use crate::error::{Error, Result};
use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use twofloat::TwoFloat;

fn check_args(a: f64, x: f64) -> Result<()> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!("hermite parameter a must be positive, got {a}")));
    }
    if !x.is_finite() {
        return Err(Error::InvalidInput(format!("hermite argument must be finite, got {x}")));
    }
    Ok(())
}

fn to_f64(v: TwoFloat, what: impl FnOnce() -> String) -> Result<f64> {
    let f = v.hi() + v.lo();
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::Overflow(what()))
    }
}

/// `H_n(a, x)` by the three-term recurrence, carried in double-double.
///
/// The recurrence `H_{k+1} = 2ax H_k − 2ak H_{k−1}` follows from the
/// classical one for `H_n(1, ·)` after multiplying by `a^{(k+1)/2}` and
/// using the scaling relation.
pub fn hermite(n: usize, a: f64, x: f64) -> Result<f64> {
    check_args(a, x)?;
    let two_ax = TwoFloat::from(2.0 * a) * x;
    let mut prev = TwoFloat::from(1.0);
    if n == 0 {
        return Ok(1.0);
    }
    let mut cur = two_ax;
    for k in 1..n {
        let next = two_ax * cur - prev * (2.0 * a * k as f64);
        prev = cur;
        cur = next;
        if !cur.hi().is_finite() {
            return Err(Error::Overflow(format!("H_{n}({a}, {x})")));
        }
    }
    to_f64(cur, || format!("H_{n}({a}, {x})"))
}

/// `H_n(a, x) = Σ_m (−1)^m n!/(m!(n−2m)!) a^{n−m} (2x)^{n−2m}`, summed in
/// double-double so that cancellation between terms stays invisible.
pub fn hermite_explicit(n: usize, a: f64, x: f64) -> Result<f64> {
    check_args(a, x)?;
    let a2 = TwoFloat::from(a);
    let y = TwoFloat::from(2.0) * x;
    let mut sum = TwoFloat::from(0.0);
    // coeff_m = n!/(m!(n−2m)!)
    let mut coeff = TwoFloat::from(1.0);
    for m in 0..=n / 2 {
        if m > 0 {
            let k = (n - 2 * m + 2) as f64;
            coeff = coeff * (k * (k - 1.0)) / m as f64;
        }
        let mut term = coeff * tf_powi(a2, n - m) * tf_powi(y, n - 2 * m);
        if m % 2 == 1 {
            term = -term;
        }
        sum += term;
    }
    to_f64(sum, || format!("explicit H_{n}({a}, {x})"))
}

fn tf_powi(b: TwoFloat, e: usize) -> TwoFloat {
    let mut r = TwoFloat::from(1.0);
    for _ in 0..e {
        r = r * b;
    }
    r
}

/// Sum of the absolute values of the explicit-sum terms; the natural scale
/// for comparing evaluations near a root.
pub fn hermite_abs_scale(n: usize, a: f64, x: f64) -> f64 {
    let mut coeff = 1.0f64;
    let mut s = 0.0;
    for m in 0..=n / 2 {
        if m > 0 {
            let k = (n - 2 * m + 2) as f64;
            coeff *= k * (k - 1.0) / m as f64;
        }
        s += coeff * a.powi((n - m) as i32) * (2.0 * x.abs()).powi((n - 2 * m) as i32);
    }
    s
}

/// One evaluation with both pipelines.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HermiteEval {
    pub n: usize,
    pub a: f64,
    pub x: f64,
    pub value: f64,
    /// `|recurrence − explicit| / max(|value|, tiny)`.
    pub rel_discrepancy: f64,
}

impl HermiteEval {
    pub fn new(n: usize, a: f64, x: f64) -> Result<Self> {
        let value = hermite(n, a, x)?;
        let explicit = hermite_explicit(n, a, x)?;
        let rel_discrepancy = if value == explicit {
            0.0
        } else {
            (value - explicit).abs() / value.abs().max(f64::MIN_POSITIVE)
        };
        Ok(HermiteEval { n, a, x, value, rel_discrepancy })
    }
}

/// `|Σ_{n=0}^{N} H_n(a,x) tⁿ/n! − exp(2atx − at²)|`.
pub fn generating_function_residual(a: f64, x: f64, t: f64, big_n: usize) -> Result<f64> {
    check_args(a, x)?;
    if big_n == 0 {
        return Err(Error::InvalidInput("the partial sum needs N >= 1".into()));
    }
    // h_n = H_n tⁿ/n! obeys h_{n+1} = (2axt h_n − 2at² h_{n−1})/(n+1).
    let c1 = TwoFloat::from(2.0 * a) * x * t;
    let c2 = TwoFloat::from(2.0 * a) * t * t;
    let mut prev = TwoFloat::from(1.0);
    let mut cur = c1;
    let mut sum = prev + cur;
    for k in 1..big_n {
        let next = (c1 * cur - c2 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
        sum += cur;
        if !sum.hi().is_finite() {
            return Err(Error::Overflow(format!("generating series at a={a}, x={x}, t={t}")));
        }
    }
    let exact = (2.0 * a * t * x - a * t * t).exp();
    if !exact.is_finite() {
        return Err(Error::Overflow(format!("exp(2atx - at^2) at a={a}, x={x}, t={t}")));
    }
    Ok(((sum - exact).hi()).abs())
}

/// Comparison of `|H_n(a,x)|` against `a^{n/2} √(2ⁿ n!) e^{ax²/2}`, in logs.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundCheck {
    pub n: usize,
    pub a: f64,
    pub x: f64,
    pub holds: bool,
    pub log_abs_value: f64,
    pub log_bound: f64,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Log of the growth bound `a^{n/2} √(2ⁿ n!) e^{ax²/2}`.
pub fn log_bound(n: usize, a: f64, x: f64) -> f64 {
    let nf = n as f64;
    0.5 * nf * a.ln() + 0.5 * (nf * std::f64::consts::LN_2 + ln_factorial(n)) + 0.5 * a * x * x
}

pub fn bound_check(n: usize, a: f64, x: f64) -> Result<BoundCheck> {
    let v = hermite(n, a, x)?;
    let log_abs_value = v.abs().ln();
    let log_bound = log_bound(n, a, x);
    Ok(BoundCheck { n, a, x, holds: log_abs_value <= log_bound, log_abs_value, log_bound })
}

/// `‖Σ_{n≤N} H_n(a,x) Sⁿ Φ/n! − exp(−a(S² − 2xS)) Φ‖₂` for symmetric `S`;
/// the exponential comes from an eigendecomposition of `S`.
pub fn generating_operator_residual(s: &Mat<f64>, a: f64, x: f64, phi: &[f64], big_n: usize) -> Result<f64> {
    check_args(a, x)?;
    let dim = s.nrows();
    if s.ncols() != dim || phi.len() != dim {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: S is {}x{}, phi has {} entries",
            s.nrows(),
            s.ncols(),
            phi.len()
        )));
    }
    for i in 0..dim {
        for j in 0..i {
            if s[(i, j)] != s[(j, i)] {
                return Err(Error::InvalidInput("S must be symmetric".into()));
            }
        }
    }
    let matvec = |v: &[f64]| -> Vec<f64> { (0..dim).map(|i| (0..dim).map(|j| s[(i, j)] * v[j]).sum()).collect() };

    // z_n = H_n Sⁿ Φ / n!, the operator version of the scalar recurrence.
    let mut prev = phi.to_vec();
    let mut sum = prev.clone();
    if big_n >= 1 {
        let mut cur: Vec<f64> = matvec(&prev).iter().map(|v| 2.0 * a * x * v).collect();
        sum.iter_mut().zip(&cur).for_each(|(s, c)| *s += c);
        for k in 1..big_n {
            let sc = matvec(&cur);
            let ssp = matvec(&matvec(&prev));
            let next: Vec<f64> = (0..dim)
                .map(|i| (2.0 * a * x * sc[i] - 2.0 * a * ssp[i]) / (k + 1) as f64)
                .collect();
            prev = cur;
            cur = next;
            sum.iter_mut().zip(&cur).for_each(|(s, c)| *s += c);
        }
    }
    if sum.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow("generating-operator series".into()));
    }

    let evd = s
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen { context: "generating operator", detail: format!("{e:?}") })?;
    let u = evd.U();
    let lam = evd.S().column_vector();
    let mut coef = vec![0.0; dim];
    for k in 0..dim {
        let proj: f64 = (0..dim).map(|i| u[(i, k)] * phi[i]).sum();
        let l = lam[k];
        coef[k] = proj * (-a * (l * l - 2.0 * x * l)).exp();
    }
    let oracle: Vec<f64> = (0..dim).map(|i| (0..dim).map(|k| u[(i, k)] * coef[k]).sum()).collect();
    Ok(sum.iter().zip(&oracle).map(|(s, o)| (s - o).powi(2)).sum::<f64>().sqrt())
}

/// A-priori envelope `Σ_{n>N} a^{n/2}√(2ⁿn!) e^{ax²/2} rⁿ/n! · ‖Φ‖` of the
/// truncated generating-operator series, with `r` the spectral radius.
pub fn generating_operator_tail_bound(a: f64, x: f64, r: f64, big_n: usize, phi_norm: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    for n in big_n + 1..big_n + 2000 {
        let lt = log_bound(n, a, x) + n as f64 * r.ln() - ln_factorial(n);
        let t = lt.exp();
        total += t;
        if t < 1e-18 * total && t < last {
            break;
        }
        last = t;
    }
    total * phi_norm
}

/// Seeded random symmetric matrix with spectral radius exactly `radius`.
pub fn random_symmetric(seed: u64, dim: usize, radius: f64) -> Result<Mat<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = Mat::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..=i {
            let v: f64 = rng.random_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    let ev = m
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen { context: "random symmetric matrix", detail: format!("{e:?}") })?;
    let rho = ev.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale = if rho > 0.0 { radius / rho } else { 0.0 };
    Ok(Mat::from_fn(dim, dim, |i, j| m[(i, j)] * scale))
}

/// Seeded random unit vector.
pub fn random_unit_vector(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Pass/fail summary of the Hermite invariants.
#[derive(Debug, Clone, Serialize)]
pub struct HermiteReport {
    pub seed: u64,
    pub explicit_vs_recurrence_max_rel: f64,
    pub explicit_vs_recurrence_pass: bool,
    pub scaling_max_rel: f64,
    pub scaling_pass: bool,
    pub generating_function_residual: f64,
    pub generating_function_pass: bool,
    pub bound_points: usize,
    pub bound_violations: Vec<BoundCheck>,
    pub bound_pass: bool,
    pub generating_operator_residual: f64,
    pub generating_operator_envelope: f64,
    pub generating_operator_pass: bool,
    pub pass: bool,
}

/// The `x`-grid `−5, −4.9, …, 5` of the bound check.
pub fn bound_grid_x() -> Vec<f64> {
    (-50..=50).map(|k| k as f64 / 10.0).collect()
}

/// Runs every invariant on its standard grid.
pub fn invariant_report(seed: u64) -> Result<HermiteReport> {
    let mut max_rel = 0.0f64;
    let mut max_scal = 0.0f64;
    for n in 0..=60 {
        // Exact square roots keep √a·x free of rounding in the scaling check.
        for &a in &[0.25, 1.0, 2.25, 4.0, 9.0] {
            for k in -20..=20 {
                let x = k as f64 * 0.5;
                let e = HermiteEval::new(n, a, x)?;
                max_rel = max_rel.max(e.rel_discrepancy);
                let scaled = a.powf(n as f64 / 2.0) * hermite(n, 1.0, a.sqrt() * x)?;
                if e.value != 0.0 || scaled.abs() > 1e-300 {
                    let d = (scaled - e.value).abs() / e.value.abs().max(f64::MIN_POSITIVE);
                    max_scal = max_scal.max(d);
                }
            }
        }
    }
    let gf = generating_function_residual(0.5, 0.3, 0.7, 60)?;

    let mut violations = Vec::new();
    let mut points = 0;
    for n in 0..=40 {
        for &a in &[0.25, 1.0, 4.0] {
            for x in bound_grid_x() {
                points += 1;
                let b = bound_check(n, a, x)?;
                if !b.holds {
                    violations.push(b);
                }
            }
        }
    }

    let s = random_symmetric(seed, 8, 2.0)?;
    let phi = random_unit_vector(seed, 8);
    let (a, x, big_n) = (0.25, 0.4, 80);
    let gop = generating_operator_residual(&s, a, x, &phi, big_n)?;
    let env = generating_operator_tail_bound(a, x, 2.0, big_n, 1.0);

    let explicit_ok = max_rel <= 1e-12;
    let scaling_ok = max_scal <= 1e-12;
    let gf_ok = gf <= 1e-12;
    let bound_ok = violations.is_empty();
    let gop_ok = gop <= 1e-10;
    Ok(HermiteReport {
        seed,
        explicit_vs_recurrence_max_rel: max_rel,
        explicit_vs_recurrence_pass: explicit_ok,
        scaling_max_rel: max_scal,
        scaling_pass: scaling_ok,
        generating_function_residual: gf,
        generating_function_pass: gf_ok,
        bound_points: points,
        bound_violations: violations,
        bound_pass: bound_ok,
        generating_operator_residual: gop,
        generating_operator_envelope: env,
        generating_operator_pass: gop_ok,
        pass: explicit_ok && scaling_ok && gf_ok && bound_ok && gop_ok,
    })
}
