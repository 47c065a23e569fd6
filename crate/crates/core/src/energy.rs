//! Spectral functions of the dipole model and its ground-state energy.
//!
//! With `dμ` the polarized spectral measure of a [`RadialMeasure`]:
//!
//! ```text
//! ρ(t)  = ∫ e^{−|t|κ²ω} / (2ω) dμ
//! ρ̂(t)  = ∫ κ² / (κ⁴ω² + t²) dμ
//! G(t)  = ∫ t²/(t²+ω²)² dμ  /  (1 + ∫ 1/(t²+ω²) dμ)
//! 𝓔     = (d/2π) ∫ G(t) dt
//! ```
//!
//! `𝓔` and the "log-spectral" energy `(1/2π)∫ log(1 + κ²ρ̂(t)) dt` are
//! computed by separate quadrature pipelines; they are tied by
//! `log_spectral = (2κ²/d)·𝓔`, which the tests use as a cross-check.
//!
//! For point masses the scalar-component convention applies: the factor `d`
//! is replaced by 1, so a single atom is exactly one oscillator.

use crate::error::{Error, Result};
use crate::formfactor::RadialMeasure;
use crate::quad::{integrate, integrate_half_line, integrate_with_breaks, Tolerance};
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

/// Default outer quadrature target (absolute and relative).
pub const DEFAULT_TOL: f64 = 1e-10;

/// `ρ` and `ρ̂` of a measure at a fixed coupling `κ`.
#[derive(Debug, Clone)]
pub struct SpectralFunctions {
    pub measure: RadialMeasure,
    pub kappa: f64,
    pub tol: f64,
}

impl SpectralFunctions {
    pub fn new(measure: RadialMeasure, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidInput(format!("kappa must be nonnegative, got {kappa}")));
        }
        Ok(SpectralFunctions { measure, kappa, tol: DEFAULT_TOL })
    }

    /// `ρ(t) = ∫ e^{−|t|κ²ω}/(2ω) dμ`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        let decay = t.abs() * self.kappa * self.kappa;
        let r = self.measure.spectral_integral(|w| (-decay * w).exp() / (2.0 * w), &[])?;
        finite(r.value, "rho")
    }

    /// `ρ̂(t) = ∫ κ²/(κ⁴ω² + t²) dμ`.
    pub fn rho_hat(&self, t: f64) -> Result<f64> {
        if self.kappa == 0.0 {
            return Ok(0.0);
        }
        let k2 = self.kappa * self.kappa;
        let k4 = k2 * k2;
        let t = t.abs();
        let r = self
            .measure
            .spectral_integral(|w| k2 / (k4 * w * w + t * t), &[t / k2])?;
        finite(r.value, "rho_hat")
    }
}

fn finite(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Assumption { condition: format!("{what} diverges for this measure") })
    }
}

/// The two norms entering `G`, without polarization factor:
/// `‖tφ̂/(t²+ω²)‖²` and `‖φ̂/√(t²+ω²)‖²`.
#[derive(Debug, Clone, Copy)]
pub struct GParts {
    pub numerator_norm: f64,
    pub denominator_norm: f64,
}

/// Both norms of `G` at `t`.
pub fn g_parts(ff: &RadialMeasure, t: f64) -> Result<GParts> {
    let t = t.abs();
    let t2 = t * t;
    let num = ff.integrate_with(
        |w| {
            let s = t2 + w * w;
            t2 / (s * s)
        },
        &[t],
    )?;
    let den = ff.integrate_with(|w| 1.0 / (t2 + w * w), &[t])?;
    Ok(GParts { numerator_norm: num.value, denominator_norm: den.value })
}

/// `G(t)`; vanishes at `t = 0` and for the null measure.
pub fn g_function(ff: &RadialMeasure, t: f64) -> Result<f64> {
    if t == 0.0 || ff.is_null() {
        return Ok(0.0);
    }
    let p = g_parts(ff, t)?;
    let pol = ff.polarization_factor();
    let g = pol * p.numerator_norm / (1.0 + pol * p.denominator_norm);
    finite(g, "G")
}

/// Ground-state energy of `½A² + H_f` and its independent log-spectral twin.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnergyResult {
    #[serde(rename = "calE")]
    pub cal_e: f64,
    /// `(1/2π)∫ log(1 + ρ̂₁(t)) dt` at `κ = 1`.
    pub log_spectral: f64,
    pub estimated_abs_error: f64,
}

/// A frequency scale of the measure, used to place the outer quadrature.
fn frequency_scale(ff: &RadialMeasure) -> f64 {
    match ff.profile() {
        crate::formfactor::Profile::Sharp { lambda } => *lambda,
        crate::formfactor::Profile::Gaussian { sigma } => *sigma,
        crate::formfactor::Profile::PointMasses { atoms } => {
            if atoms.is_empty() {
                1.0
            } else {
                atoms.iter().map(|a| a.omega).sum::<f64>() / atoms.len() as f64
            }
        }
        crate::formfactor::Profile::Tabulated { points } => points[points.len() - 1][0].max(1e-300),
    }
}

/// Natural breakpoints of the outer `t` integrals.
fn frequency_breaks(ff: &RadialMeasure) -> Vec<f64> {
    match ff.atoms() {
        Some(atoms) => atoms.iter().map(|a| a.omega).collect(),
        None => vec![frequency_scale(ff)],
    }
}

fn require_standing(ff: &RadialMeasure) -> Result<()> {
    if let Some(c) = ff.validate_assumptions().failures.into_iter().next() {
        return Err(Error::Assumption { condition: c });
    }
    Ok(())
}

/// `𝓔 = (d/2π)∫G` (scalar convention for atoms), checked against
/// `½·(d)·log_spectral` computed independently.
pub fn ground_energy(ff: &RadialMeasure) -> Result<EnergyResult> {
    require_standing(ff)?;
    if ff.is_null() {
        return Ok(EnergyResult { cal_e: 0.0, log_spectral: 0.0, estimated_abs_error: 0.0 });
    }
    let (int_g, err_g) = integral_of_g(ff)?;
    let comp = ff.components();
    let cal_e = comp / PI * int_g;
    let (log_spectral, err_l) = log_spectral_with_error(ff, 1.0)?;
    let err = comp / PI * err_g + 0.5 * comp * err_l + 1e-11 * cal_e.abs();
    Ok(EnergyResult { cal_e, log_spectral, estimated_abs_error: err })
}

/// `∫₀^∞ G(t) dt` with its error estimate.
fn integral_of_g(ff: &RadialMeasure) -> Result<(f64, f64)> {
    let scale = frequency_scale(ff);
    let tol = Tolerance::new(DEFAULT_TOL, DEFAULT_TOL);
    let fail = RefCell::new(None);
    let r = integrate_half_line(
        |t| match g_function(ff, t) {
            Ok(v) => v,
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        scale,
        &frequency_breaks(ff),
        tol,
        "integral of G",
    );
    if let Some(e) = fail.into_inner() {
        return Err(e);
    }
    let r = r?;
    Ok((r.value, r.abs_error))
}

fn log_spectral_with_error(ff: &RadialMeasure, kappa: f64) -> Result<(f64, f64)> {
    require_standing(ff)?;
    if ff.is_null() || kappa == 0.0 {
        return Ok((0.0, 0.0));
    }
    let sf = SpectralFunctions::new(ff.clone(), kappa)?;
    let k2 = kappa * kappa;
    let scale = k2 * frequency_scale(ff);
    let breaks: Vec<f64> = frequency_breaks(ff).iter().map(|b| k2 * b).collect();
    let tol = Tolerance::new(DEFAULT_TOL, DEFAULT_TOL);
    let fail = RefCell::new(None);
    let r = integrate_half_line(
        |t| match sf.rho_hat(t) {
            Ok(v) => (k2 * v).ln_1p(),
            Err(e) => {
                fail.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        scale,
        &breaks,
        tol,
        "log-spectral integral",
    );
    if let Some(e) = fail.into_inner() {
        return Err(e);
    }
    let r = r?;
    Ok((r.value / PI, r.abs_error / PI))
}

/// `(1/2π)∫ log(1 + κ²ρ̂(t)) dt`.
pub fn log_spectral_energy(ff: &RadialMeasure, kappa: f64) -> Result<f64> {
    Ok(log_spectral_with_error(ff, kappa)?.0)
}

/// `(κ²/π)∫G(t) dt`, the right-hand side of the log-spectral identity.
pub fn g_spectral_energy(ff: &RadialMeasure, kappa: f64) -> Result<f64> {
    require_standing(ff)?;
    if ff.is_null() {
        return Ok(0.0);
    }
    // ∫_ℝ G = 2∫₀^∞ G.
    Ok(kappa * kappa / PI * 2.0 * integral_of_g(ff)?.0)
}

/// Bottom of the dipole fiber spectrum, `p²/(2m_eff) + κ²𝓔`.
///
/// At `κ = 0` the mass term stays renormalized: the result is
/// `p²/(2m_eff)`, not `p²/2`.
pub fn dipole_dispersion(ff: &RadialMeasure, kappa: f64, p: f64) -> Result<f64> {
    let m_eff = ff.m_eff()?;
    let e = ground_energy(ff)?.cal_e;
    Ok(p * p / (2.0 * m_eff) + kappa * kappa * e)
}

const CUTOFF_C: f64 = 8.0 * PI / 3.0;

/// `arctan u − u/(1+u²)`, by its Taylor series for small `u`.
fn cutoff_numerator(u: f64) -> f64 {
    if u < 1e-3 {
        let u2 = u * u;
        u * u2 * (2.0 / 3.0 - u2 * (4.0 / 5.0 - u2 * 6.0 / 7.0))
    } else {
        u.atan() - u / (1.0 + u * u)
    }
}

/// `u − arctan u`, by its Taylor series for small `u`.
fn cutoff_gap(u: f64) -> f64 {
    if u < 1e-3 {
        let u2 = u * u;
        u * u2 * (1.0 / 3.0 - u2 * (1.0 / 5.0 - u2 / 7.0))
    } else {
        u - u.atan()
    }
}

fn cutoff_integrand(lambda: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 2.0 / 3.0;
    }
    cutoff_numerator(u) / ((u + CUTOFF_C * lambda * cutoff_gap(u)) * u * u)
}

/// `∫_a^b h(u) du` of the cutoff integrand, with `b = ∞` mapped by `v = 1/u`.
fn cutoff_piece(lambda: f64, a: f64, b: f64) -> Result<f64> {
    let tol = Tolerance { abs: 0.0, rel: 1e-11, max_panels: 4000 };
    let uc = (3.0 / (CUTOFF_C * lambda)).sqrt();
    let breaks = [uc / 8.0, uc, 8.0 * uc, lambda.powf(-0.25), 1e-3];
    let h = |u: f64| cutoff_integrand(lambda, u);
    let mut total = 0.0;
    let fin_hi = b.min(1.0);
    if a < fin_hi {
        total += integrate_with_breaks(h, a, fin_hi, &breaks, tol, "cutoff integral")?.value;
    }
    if b > 1.0 {
        let lo = a.max(1.0);
        // ∫_lo^b h(u) du = ∫_{1/b}^{1/lo} h(1/v) v⁻² dv.
        let tail = |v: f64| if v <= 0.0 { 0.0 } else { h(1.0 / v) / (v * v) };
        let vb = if b.is_infinite() { 0.0 } else { 1.0 / b };
        total += integrate(tail, vb, 1.0 / lo, tol, "cutoff tail")?.value;
    }
    Ok(total)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")))
    }
}

/// `E(Λ) = 4Λ²∫₀^∞ [arctan u − u/(1+u²)] / [u + (8π/3)Λ(u − arctan u)] du/u²`,
/// the energy of the sharp cutoff in three dimensions.
pub fn cutoff_energy_3d(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(4.0 * lambda * lambda * cutoff_piece(lambda, 0.0, f64::INFINITY)?)
}

/// Split of `E(Λ)/(4Λ)` at `u = Λ^{−1/4}` into the low part `I1` and the
/// tail `I2`.
pub fn cutoff_split(lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    if lambda <= 1.0 {
        return Err(Error::InvalidInput(format!("the split needs lambda > 1, got {lambda}")));
    }
    let cut = lambda.powf(-0.25);
    let i1 = lambda * cutoff_piece(lambda, 0.0, cut)?;
    let i2 = lambda * cutoff_piece(lambda, cut, f64::INFINITY)?;
    Ok((i1, i2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formfactor::{sphere_area, Profile};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn atom() -> RadialMeasure {
        RadialMeasure::point_masses(3, &[(1.0, 3.0)]).unwrap()
    }

    #[test]
    fn rho_spot_values() {
        let sf = SpectralFunctions::new(atom(), 1.0).unwrap();
        assert_eq!(sf.rho(0.0).unwrap(), 1.5);
        assert!(rel(sf.rho(2.0).unwrap(), 1.5 * (-2.0f64).exp()) < 1e-15);
        assert_eq!(sf.rho(-2.0).unwrap(), sf.rho(2.0).unwrap());
        let sharp = SpectralFunctions::new(RadialMeasure::sharp(3, 1.0).unwrap(), 1.0).unwrap();
        assert!(rel(sharp.rho(0.0).unwrap(), 2.0 * PI / 3.0) < 1e-12);
    }

    #[test]
    fn rho_matches_independent_radial_quadrature() {
        // Sharp cutoff d=3: ρ(t) = (2/3)·4π ∫₀¹ r e^{−tr}/2 dr in closed form.
        let sf = SpectralFunctions::new(RadialMeasure::sharp(3, 1.0).unwrap(), 1.0).unwrap();
        for t in [0.3f64, 1.0, 5.0] {
            let exact = (4.0 * PI / 3.0) * (1.0 - (1.0 + t) * (-t).exp()) / (t * t);
            assert!(rel(sf.rho(t).unwrap(), exact) < 1e-11, "t={t}");
        }
    }

    #[test]
    fn rho_hat_spot_values() {
        let sf = SpectralFunctions::new(atom(), 1.0).unwrap();
        assert_eq!(sf.rho_hat(0.0).unwrap(), 3.0);
        assert_eq!(sf.rho_hat(1.0).unwrap(), 1.5);
        let g = RadialMeasure::gaussian(3, 1.0).unwrap();
        let s1 = SpectralFunctions::new(g.clone(), 1.0).unwrap();
        let s3 = SpectralFunctions::new(g, 3.0).unwrap();
        let s = 0.7;
        assert!(rel(9.0 * s3.rho_hat(9.0 * s).unwrap(), s1.rho_hat(s).unwrap()) < 1e-12);
    }

    #[test]
    fn g_spot_values() {
        assert_eq!(g_function(&atom(), 0.0).unwrap(), 0.0);
        assert!((g_function(&atom(), 1.0).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(g_function(&RadialMeasure::null(3), 2.0).unwrap(), 0.0);
        let g = RadialMeasure::gaussian(3, 1.0).unwrap();
        assert_eq!(g_function(&g, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn evenness_and_pointwise_bounds() {
        for ff in [atom(), RadialMeasure::sharp(3, 1.0).unwrap(), RadialMeasure::gaussian(3, 1.0).unwrap()] {
            let sf = SpectralFunctions::new(ff.clone(), 1.3).unwrap();
            let m2 = ff.moment(-2).unwrap();
            for t in [0.1, 0.5, 2.0, 7.0] {
                assert_eq!(sf.rho(t).unwrap(), sf.rho(-t).unwrap());
                assert_eq!(sf.rho_hat(t).unwrap(), sf.rho_hat(-t).unwrap());
                assert_eq!(g_function(&ff, t).unwrap(), g_function(&ff, -t).unwrap());
                let p = g_parts(&ff, t).unwrap();
                assert!(p.numerator_norm <= 0.25 * m2 * (1.0 + 1e-12));
                assert!(p.denominator_norm <= m2 * (1.0 + 1e-12));
                let k2r = 1.69 * sf.rho_hat(t).unwrap();
                assert!(k2r.ln_1p() <= k2r);
                assert!(g_function(&ff, t).unwrap() >= 0.0);
            }
        }
    }

    #[test]
    fn atom_energy_oracles() {
        let r = ground_energy(&atom()).unwrap();
        assert!(rel(r.cal_e, 0.5) < 1e-9, "{r:?}");
        assert!(rel(r.log_spectral, 1.0) < 1e-9, "{r:?}");
        assert!(rel(log_spectral_energy(&atom(), 1.0).unwrap(), 1.0) < 1e-9);
        let null = ground_energy(&RadialMeasure::null(3)).unwrap();
        assert_eq!((null.cal_e, null.log_spectral), (0.0, 0.0));
        assert_eq!(log_spectral_energy(&RadialMeasure::null(3), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn multi_atom_matches_oscillator_formula() {
        // (1/π)∫₀^∞ log(1 + Σ W/(ω²+t²)) dt evaluated with a different
        // substitution (t = e^x) as the reference.
        let ff = RadialMeasure::point_masses(3, &[(1.0, 1.0), (2.0, 2.0), (0.5, 0.3)]).unwrap();
        let f = |x: f64| {
            let t = x.exp();
            let s = 1.0 / (1.0 + t * t) + 2.0 / (4.0 + t * t) + 0.3 / (0.25 + t * t);
            s.ln_1p() * t
        };
        let top = 14f64.exp();
        // log(1 + c/t²) ≈ c/t² beyond `top`, with c = ΣW.
        let tail = 3.3 / top;
        let reference = (integrate(f, -40.0, 14.0, Tolerance::new(1e-13, 1e-13), "ref").unwrap().value + tail) / PI;
        let r = ground_energy(&ff).unwrap();
        assert!(rel(r.log_spectral, reference) < 1e-9);
        assert!(rel(2.0 * r.cal_e, reference) < 1e-9);
    }

    #[test]
    fn identity_for_continuum_profiles() {
        for ff in [RadialMeasure::gaussian(3, 1.0).unwrap(), RadialMeasure::sharp(3, 1.0).unwrap()] {
            for kappa in [1.0, 2.0] {
                let a = log_spectral_energy(&ff, kappa).unwrap();
                let b = g_spectral_energy(&ff, kappa).unwrap();
                assert!(rel(a, b) < 1e-8, "kappa={kappa}: {a} vs {b}");
            }
            let r = ground_energy(&ff).unwrap();
            let predicted = 2.0 / 3.0 * r.cal_e;
            assert!((r.log_spectral - predicted).abs() <= r.estimated_abs_error.max(1e-9 * predicted));
        }
    }

    #[test]
    fn kappa_squared_scaling() {
        let g = RadialMeasure::gaussian(3, 1.0).unwrap();
        let one = log_spectral_energy(&g, 1.0).unwrap();
        let two = log_spectral_energy(&g, 2.0).unwrap();
        assert!(rel(two, 4.0 * one) < 1e-10);
    }

    #[test]
    fn dispersion() {
        assert!(rel(dipole_dispersion(&atom(), 1.0, 0.0).unwrap(), 0.5) < 1e-9);
        assert!(rel(dipole_dispersion(&atom(), 2.0, 2.0).unwrap(), 2.5) < 1e-9);
        assert!(rel(dipole_dispersion(&atom(), 0.0, 2.0).unwrap(), 0.5) < 1e-15);
    }

    #[test]
    fn cutoff_agrees_with_ground_energy() {
        let e1 = cutoff_energy_3d(1.0).unwrap();
        let g = ground_energy(&RadialMeasure::sharp(3, 1.0).unwrap()).unwrap().cal_e;
        assert!(rel(e1, g) < 1e-6, "{e1} vs {g}");
        assert!(rel(e1, 1.6774049184) < 1e-9);
    }

    #[test]
    fn cutoff_small_lambda_limit() {
        // E(Λ)/Λ² → 4∫(arctan u − u/(1+u²))/u³ du = π.
        let l = 1e-7;
        assert!(rel(cutoff_energy_3d(l).unwrap() / (l * l), PI) < 1e-5);
    }

    #[test]
    fn cutoff_series_is_continuous() {
        for f in [cutoff_numerator, cutoff_gap] {
            let below = f(1e-3 * (1.0 - 1e-12));
            let above = f(1e-3);
            assert!(rel(below, above) < 1e-9);
        }
    }

    #[test]
    fn cutoff_large_lambda_and_split() {
        let lo = (2.0 * PI / 3.0).sqrt();
        let hi = (2.0 * PI).sqrt();
        let l = 1e6;
        let e = cutoff_energy_3d(l).unwrap();
        let ratio = e / l.powf(1.5);
        assert!(lo <= ratio && ratio <= hi, "{ratio}");

        let (i1, i2) = cutoff_split(1e4).unwrap();
        let e4 = cutoff_energy_3d(1e4).unwrap();
        assert!(rel(i1 + i2, e4 / 4e4) < 1e-9);
        let (_, i2_6) = cutoff_split(1e6).unwrap();
        assert!(i2_6 / 1e3 < i2 / 1e2);
        let (a, b) = cutoff_split(1e2).unwrap();
        assert!(a > 0.0 && b > 0.0);
        assert!(cutoff_split(1.0).is_err());
    }

    #[test]
    fn sharp_cutoff_radial_reference() {
        // G for the sharp cutoff in d=3 in closed form, as a reference for the
        // radial pipeline.
        let ff = RadialMeasure::new(3, Profile::Sharp { lambda: 1.0 }).unwrap();
        let t: f64 = 0.8;
        let area = sphere_area(3);
        let a = (1.0 / t).atan();
        let num = area * 0.5 * (a - t / (1.0 + t * t)) * t;
        let den = area * (1.0 - t * a);
        let p = g_parts(&ff, t).unwrap();
        assert!(rel(p.numerator_norm, num) < 1e-12);
        assert!(rel(p.denominator_norm, den) < 1e-12);
    }
}
