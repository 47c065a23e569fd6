//! Rotation-invariant form factors and their radial moments.
//!
//! A [`RadialMeasure`] is either a continuum profile `φ(r)` in `d` dimensions
//! with dispersion `ω(k) = |k|`, or a finite list of atoms `(ω_j, W_j)` whose
//! weights already include the transversal polarization average `(d−1)/d`.
//! Every downstream formula only ever needs integrals of the form
//!
//! ```text
//! ∫ F(ω) dμ  =  (d−1)/d · S_{d−1} ∫₀^∞ φ(r)² F(r) r^{d−1} dr     (continuum)
//!            =  Σ_j W_j F(ω_j)                                  (atoms)
//! ```
//!
//! which [`RadialMeasure::spectral_integral`] provides.

use crate::error::{Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use serde::{Deserialize, Serialize, Serializer};

/// Relative tolerance of each radial quadrature piece.
pub const RADIAL_REL_TOL: f64 = 1e-12;
/// Gaussian profiles are cut at this many σ; beyond it `φ²` underflows.
const GAUSSIAN_CUT: f64 = 40.0;
/// Shells below `top · 2^-INNER_OCTAVES` are summed one octave at a time.
const INNER_OCTAVES: i32 = 10;
const MAX_SHELLS: usize = 400;
const DIVERGENCE_RATIO: f64 = 1e12;
/// Consecutive octaves with shell ratio above `FLAT_RATIO` that count as a
/// non-integrable singularity at the origin.
const FLAT_SHELLS: usize = 60;
const FLAT_RATIO: f64 = 0.999;

/// One point mass of a discrete spectral measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub omega: f64,
    pub weight: f64,
}

/// Radial profile of the form factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `φ = 1` on `[0, Λ]`.
    Sharp { lambda: f64 },
    /// `φ(r) = exp(−r²/(2σ²))`.
    Gaussian { sigma: f64 },
    /// Atoms with pre-averaged polarization weights.
    PointMasses { atoms: Vec<Atom> },
    /// Piecewise-linear `φ` through `(r_i, φ_i)`, zero outside the table.
    Tabulated { points: Vec<[f64; 2]> },
}

/// Unvalidated wire form of a [`RadialMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub dimension: usize,
    pub profile: Profile,
}

impl MeasureSpec {
    /// Full check, including the standing moment conditions.
    pub fn build(&self) -> Result<RadialMeasure> {
        RadialMeasure::new(self.dimension, self.profile.clone())
    }

    /// Structural check only.
    pub fn build_unchecked(&self) -> Result<RadialMeasure> {
        RadialMeasure::unchecked(self.dimension, self.profile.clone())
    }
}

/// A validated rotation-invariant spectral measure.
///
/// Deserialization runs the full check of [`RadialMeasure::new`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpec")]
pub struct RadialMeasure {
    dimension: usize,
    profile: Profile,
}

impl TryFrom<MeasureSpec> for RadialMeasure {
    type Error = Error;
    fn try_from(raw: MeasureSpec) -> Result<Self> {
        raw.build()
    }
}

/// Value of an integral that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

impl Integral {
    const ZERO: Integral = Integral { value: 0.0, abs_error: 0.0 };
    const INFINITE: Integral = Integral { value: f64::INFINITY, abs_error: f64::INFINITY };

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// Surface area `S_{d−1} = 2π^{d/2}/Γ(d/2)` of the unit sphere in `ℝ^d`.
pub fn sphere_area(d: usize) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_area(d - 2),
    }
}

impl RadialMeasure {
    /// Builds a measure and rejects it unless the three standing moments
    /// `M₊₁, M₋₁, M₋₂` are finite.
    pub fn new(dimension: usize, profile: Profile) -> Result<Self> {
        let m = Self::unchecked(dimension, profile)?;
        let report = m.validate_assumptions();
        if let Some(cond) = report.failures.first() {
            return Err(Error::Assumption { condition: cond.clone() });
        }
        Ok(m)
    }

    /// Structural checks only (positivity, ordering, finiteness of inputs).
    pub fn unchecked(dimension: usize, profile: Profile) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if dimension < 2 {
            return bad(format!("dimension must be at least 2, got {dimension}"));
        }
        match &profile {
            Profile::Sharp { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return bad(format!("sharp cutoff lambda must be positive, got {lambda}"));
                }
            }
            Profile::Gaussian { sigma } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return bad(format!("gaussian sigma must be positive, got {sigma}"));
                }
            }
            Profile::PointMasses { atoms } => {
                for (i, a) in atoms.iter().enumerate() {
                    if !(a.omega.is_finite() && a.omega > 0.0 && a.weight.is_finite() && a.weight > 0.0) {
                        return bad(format!(
                            "atom {i}: frequency and weight must be positive (omega={}, weight={})",
                            a.omega, a.weight
                        ));
                    }
                }
            }
            Profile::Tabulated { points } => {
                if points.len() < 2 {
                    return bad("tabulated profile needs at least two points".into());
                }
                if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                    return bad("tabulated profile contains non-finite entries".into());
                }
                if points[0][0] < 0.0 {
                    return bad(format!("tabulated radii must be nonnegative, got {}", points[0][0]));
                }
                if let Some(i) = points.windows(2).position(|w| w[1][0] <= w[0][0]) {
                    return bad(format!(
                        "tabulated radii must be strictly increasing (r[{}]={} >= r[{}]={})",
                        i,
                        points[i][0],
                        i + 1,
                        points[i + 1][0]
                    ));
                }
            }
        }
        Ok(RadialMeasure { dimension, profile })
    }

    pub fn sharp(dimension: usize, lambda: f64) -> Result<Self> {
        Self::new(dimension, Profile::Sharp { lambda })
    }

    pub fn gaussian(dimension: usize, sigma: f64) -> Result<Self> {
        Self::new(dimension, Profile::Gaussian { sigma })
    }

    /// Point masses from `(ω_j, W_j)` pairs; the dimension only labels the
    /// ambient space.
    pub fn point_masses(dimension: usize, atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms.iter().map(|&(omega, weight)| Atom { omega, weight }).collect();
        Self::new(dimension, Profile::PointMasses { atoms })
    }

    /// The measure with no mass at all.
    pub fn null(dimension: usize) -> Self {
        RadialMeasure { dimension, profile: Profile::PointMasses { atoms: Vec::new() } }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Atoms of a discrete measure, `None` for continuum profiles.
    pub fn atoms(&self) -> Option<&[Atom]> {
        match &self.profile {
            Profile::PointMasses { atoms } => Some(atoms),
            _ => None,
        }
    }

    pub fn is_atomic(&self) -> bool {
        self.atoms().is_some()
    }

    /// `(d−1)/d` for continuum profiles, 1 for atoms.
    pub fn polarization_factor(&self) -> f64 {
        if self.is_atomic() {
            1.0
        } else {
            (self.dimension as f64 - 1.0) / self.dimension as f64
        }
    }

    /// `true` when the measure carries no mass.
    pub fn is_null(&self) -> bool {
        match &self.profile {
            Profile::PointMasses { atoms } => atoms.is_empty(),
            Profile::Tabulated { points } => points.iter().all(|p| p[1] == 0.0),
            _ => false,
        }
    }

    /// Multiplicity of the scalar component: `d` for continuum profiles and
    /// 1 for atoms, which already describe a single component.
    pub fn components(&self) -> f64 {
        if self.is_atomic() {
            1.0
        } else {
            self.dimension as f64
        }
    }

    /// `φ(r)` of a continuum profile.
    pub fn phi(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Sharp { lambda } => {
                if (0.0..=*lambda).contains(&r) {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Gaussian { sigma } => (-r * r / (2.0 * sigma * sigma)).exp(),
            Profile::Tabulated { points } => tabulated_phi(points, r),
            Profile::PointMasses { .. } => 0.0,
        }
    }

    /// Radial support `[lo, hi]` of a continuum profile and its kinks.
    fn support(&self) -> (f64, f64, Vec<f64>) {
        match &self.profile {
            Profile::Sharp { lambda } => (0.0, *lambda, Vec::new()),
            Profile::Gaussian { sigma } => (0.0, GAUSSIAN_CUT * sigma, vec![*sigma, 4.0 * sigma]),
            Profile::Tabulated { points } => {
                let kinks = points.iter().map(|p| p[0]).collect();
                (points[0][0], points[points.len() - 1][0], kinks)
            }
            Profile::PointMasses { .. } => (0.0, 0.0, Vec::new()),
        }
    }

    /// `∫ |φ̂(k)|² F(|k|) dk`, without the polarization factor; for atoms
    /// `Σ W_j F(ω_j)`. Divergence at the origin yields `+∞`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> Result<Integral> {
        self.integrate_with(f, &[])
    }

    /// As [`Self::integrate`] with extra breakpoints where `F` has structure.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F, extra_breaks: &[f64]) -> Result<Integral> {
        if let Some(atoms) = self.atoms() {
            let value = atoms.iter().map(|a| a.weight * f(a.omega)).sum();
            return Ok(Integral { value, abs_error: 0.0 });
        }
        if self.is_null() {
            return Ok(Integral::ZERO);
        }
        let d = self.dimension as i32;
        let area = sphere_area(self.dimension);
        let g = |r: f64| {
            if r <= 0.0 {
                return 0.0;
            }
            let p = self.phi(r);
            if p == 0.0 {
                return 0.0;
            }
            let v = p * p * f(r) * r.powi(d - 1);
            if v.is_nan() {
                0.0
            } else {
                v
            }
        };
        let (lo, hi, mut breaks) = self.support();
        breaks.extend_from_slice(extra_breaks);
        let tol = Tolerance { abs: 0.0, rel: RADIAL_REL_TOL, max_panels: 2000 };

        if lo > 0.0 {
            let r = integrate_with_breaks(g, lo, hi, &breaks, tol, "radial integral")?;
            return Ok(Integral { value: area * r.value, abs_error: area * r.abs_error });
        }

        let inner = hi * 2f64.powi(-INNER_OCTAVES);
        let main = integrate_with_breaks(&g, inner, hi, &breaks, tol, "radial integral")?;
        let mut value = main.value;
        let mut err = main.abs_error;
        let reference = main.value.abs();
        let mut b = inner;
        let mut converged = false;
        let mut prev_shell = f64::NAN;
        let mut flat_run = 0;
        for _ in 0..MAX_SHELLS {
            let a = 0.5 * b;
            let shell = match integrate_with_breaks(&g, a, b, &breaks, tol, "radial shell") {
                Ok(s) => s,
                // Non-finite panel values this close to the origin mean the
                // integrand itself blows up.
                Err(Error::Quadrature { achieved, .. }) if achieved.is_infinite() => return Ok(Integral::INFINITE),
                Err(e) => return Err(e),
            };
            value += shell.value;
            err += shell.abs_error;
            if !value.is_finite() || (reference > 0.0 && value.abs() > DIVERGENCE_RATIO * reference) {
                return Ok(Integral::INFINITE);
            }
            if shell.value.abs() <= 1e-15 * value.abs() || (value == 0.0 && shell.value == 0.0 && a < 1e-200) {
                converged = true;
                break;
            }
            // Octaves that stop shrinking signal r^{-1} (or worse) behaviour.
            flat_run = if shell.value.abs() >= FLAT_RATIO * prev_shell.abs() { flat_run + 1 } else { 0 };
            if flat_run >= FLAT_SHELLS {
                return Ok(Integral::INFINITE);
            }
            prev_shell = shell.value;
            b = a;
        }
        if !converged {
            return Ok(Integral::INFINITE);
        }
        Ok(Integral { value: area * value, abs_error: area * err })
    }

    /// `∫ F dμ` including the polarization factor: the weight every spectral
    /// function is built from.
    pub fn spectral_integral<F: Fn(f64) -> f64>(&self, f: F, breaks: &[f64]) -> Result<Integral> {
        let pol = self.polarization_factor();
        let r = self.integrate_with(f, breaks)?;
        Ok(Integral { value: pol * r.value, abs_error: pol * r.abs_error })
    }

    /// `M_s = ∫ |φ̂|² ω^s dk` for `s ∈ {−3, −2, −1, 1}`; `+∞` when divergent.
    pub fn moment(&self, s: i32) -> Result<f64> {
        if !matches!(s, -3 | -2 | -1 | 1) {
            return Err(Error::InvalidInput(format!("moment order must be one of -3, -2, -1, 1; got {s}")));
        }
        Ok(self.integrate(|r| r.powi(s))?.value)
    }

    /// All four moments, `δm` and `m_eff`.
    pub fn moment_report(&self) -> MomentReport {
        let m = |s| self.moment(s).unwrap_or(f64::INFINITY);
        let (m_p1, m_m1, m_m2, m_m3) = (m(1), m(-1), m(-2), m(-3));
        let delta_m = self.polarization_factor() * m_m2;
        MomentReport {
            m_plus1: m_p1,
            m_minus1: m_m1,
            m_minus2: m_m2,
            m_minus3: m_m3,
            ir_regular: m_m3.is_finite(),
            delta_m,
            m_eff: 1.0 + delta_m,
        }
    }

    /// `δm = (d−1)/d · M₋₂`.
    pub fn delta_m(&self) -> Result<f64> {
        Ok(self.polarization_factor() * self.moment(-2)?)
    }

    /// `m_eff = 1 + δm`.
    pub fn m_eff(&self) -> Result<f64> {
        Ok(1.0 + self.delta_m()?)
    }

    /// Which of the three standing square-integrability conditions hold.
    pub fn validate_assumptions(&self) -> AssumptionReport {
        let checks = [
            (1, "sqrt(omega)*phi not square-integrable"),
            (-1, "phi/sqrt(omega) not square-integrable"),
            (-2, "phi/omega not square-integrable"),
        ];
        let mut report = AssumptionReport { m_plus1: 0.0, m_minus1: 0.0, m_minus2: 0.0, failures: Vec::new() };
        for (s, msg) in checks {
            let v = self.moment(s).unwrap_or(f64::INFINITY);
            match s {
                1 => report.m_plus1 = v,
                -1 => report.m_minus1 = v,
                _ => report.m_minus2 = v,
            }
            if !v.is_finite() {
                let label = match s {
                    1 => "M_+1",
                    -1 => "M_-1",
                    _ => "M_-2",
                };
                report.failures.push(format!("{msg} ({label} = inf)"));
            }
        }
        report
    }
}

fn tabulated_phi(points: &[[f64; 2]], r: f64) -> f64 {
    let n = points.len();
    if r < points[0][0] || r > points[n - 1][0] {
        return 0.0;
    }
    let i = points.partition_point(|p| p[0] <= r);
    if i == 0 {
        return points[0][1];
    }
    if i >= n {
        return points[n - 1][1];
    }
    let [r0, f0] = points[i - 1];
    let [r1, f1] = points[i];
    f0 + (f1 - f0) * (r - r0) / (r1 - r0)
}

fn ext_real<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    }
}

/// Moments of a measure; divergent moments are `+∞` (serialized as `"inf"`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    #[serde(rename = "M_plus1", serialize_with = "ext_real")]
    pub m_plus1: f64,
    #[serde(rename = "M_minus1", serialize_with = "ext_real")]
    pub m_minus1: f64,
    #[serde(rename = "M_minus2", serialize_with = "ext_real")]
    pub m_minus2: f64,
    #[serde(rename = "M_minus3", serialize_with = "ext_real")]
    pub m_minus3: f64,
    pub ir_regular: bool,
    #[serde(serialize_with = "ext_real")]
    pub delta_m: f64,
    #[serde(serialize_with = "ext_real")]
    pub m_eff: f64,
}

/// Finiteness of `M₊₁, M₋₁, M₋₂`, with the failing conditions spelled out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    #[serde(rename = "M_plus1", serialize_with = "ext_real")]
    pub m_plus1: f64,
    #[serde(rename = "M_minus1", serialize_with = "ext_real")]
    pub m_minus1: f64,
    #[serde(rename = "M_minus2", serialize_with = "ext_real")]
    pub m_minus2: f64,
    pub failures: Vec<String>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn sharp_moments_match_closed_form() {
        for d in 2..=5usize {
            for lambda in [0.5, 1.0, 3.0] {
                let m = RadialMeasure::unchecked(d, Profile::Sharp { lambda }).unwrap();
                for s in [-3, -2, -1, 1] {
                    let p = s + d as i32;
                    let got = m.moment(s).unwrap();
                    if p > 0 {
                        let exact = sphere_area(d) * lambda.powi(p) / p as f64;
                        assert!(rel(got, exact) < 1e-12, "d={d} s={s} {got} vs {exact}");
                    } else {
                        assert!(got.is_infinite(), "d={d} s={s} should diverge, got {got}");
                    }
                }
            }
        }
    }

    #[test]
    fn spot_values() {
        let sharp = RadialMeasure::sharp(3, 1.0).unwrap();
        assert!(rel(sharp.moment(-2).unwrap(), 4.0 * PI) < 1e-12);
        assert_eq!(sharp.moment(-3).unwrap(), f64::INFINITY);
        let pm = RadialMeasure::point_masses(3, &[(1.0, 3.0)]).unwrap();
        assert_eq!(pm.moment(-2).unwrap(), 3.0);
        assert!(pm.moment(0).is_err());
        assert!(pm.moment(2).is_err());
    }

    #[test]
    fn reports() {
        let r = RadialMeasure::sharp(3, 1.0).unwrap().moment_report();
        assert!(rel(r.delta_m, 8.0 * PI / 3.0) < 1e-12);
        assert!(rel(r.m_eff, 1.0 + 8.0 * PI / 3.0) < 1e-12);
        assert!(!r.ir_regular);

        let r = RadialMeasure::point_masses(3, &[(1.0, 3.0)]).unwrap().moment_report();
        assert_eq!((r.delta_m, r.m_eff, r.ir_regular), (3.0, 4.0, true));

        // In d=3 any profile with φ(0) ≠ 0 is infrared singular: the radial
        // integrand of M₋₃ is φ(r)²/r.
        let g = RadialMeasure::gaussian(3, 1.0).unwrap();
        let r = g.moment_report();
        assert!(!r.ir_regular);
        // 4π ∫ e^{−r²} dr = 2π^{3/2}.
        assert!(rel(r.m_minus2, 2.0 * PI.powf(1.5)) < 1e-11);
        // In d=4 the same profile is regular: 2π² ∫ e^{−r²} dr = π^{5/2}.
        let g4 = RadialMeasure::gaussian(4, 1.0).unwrap().moment_report();
        assert!(g4.ir_regular);
        assert!(rel(g4.m_minus3, PI.powf(2.5)) < 1e-11);
    }

    #[test]
    fn assumptions() {
        let rep = RadialMeasure::sharp(3, 1.0).unwrap().validate_assumptions();
        assert!(rep.passed());
        let null = RadialMeasure::null(3);
        let rep = null.validate_assumptions();
        assert!(rep.passed());
        assert_eq!((rep.m_plus1, rep.m_minus1, rep.m_minus2), (0.0, 0.0, 0.0));
        let zero_tab = RadialMeasure::new(3, Profile::Tabulated { points: vec![[0.0, 0.0], [1.0, 0.0]] }).unwrap();
        assert!(zero_tab.is_null());
        assert_eq!(zero_tab.m_eff().unwrap(), 1.0);

        // d = 2 sharp cutoff: ∫ r^{-1} dr diverges at the origin.
        let e = RadialMeasure::sharp(2, 1.0).unwrap_err();
        match e {
            Error::Assumption { condition } => assert!(condition.contains("phi/omega not square-integrable")),
            other => panic!("unexpected {other:?}"),
        }
        let rep = RadialMeasure::unchecked(2, Profile::Sharp { lambda: 1.0 }).unwrap().validate_assumptions();
        assert_eq!(rep.failures.len(), 1);
        assert!(rep.m_minus1.is_finite());
    }

    #[test]
    fn structural_errors() {
        let dec = Profile::Tabulated { points: vec![[0.0, 1.0], [2.0, 1.0], [1.0, 0.0]] };
        assert!(matches!(RadialMeasure::new(3, dec), Err(Error::InvalidInput(_))));
        assert!(RadialMeasure::point_masses(3, &[(0.0, 1.0)]).is_err());
        assert!(RadialMeasure::point_masses(3, &[(1.0, -1.0)]).is_err());
        assert!(RadialMeasure::sharp(1, 1.0).is_err());
        assert!(RadialMeasure::gaussian(3, 0.0).is_err());
    }

    #[test]
    fn weight_scaling_is_exact() {
        let atoms = [(1.0, 0.7), (2.5, 1.3), (0.3, 0.11)];
        let a = RadialMeasure::point_masses(3, &atoms).unwrap();
        let scaled: Vec<_> = atoms.iter().map(|&(w, m)| (w, 4.0 * m)).collect();
        let b = RadialMeasure::point_masses(3, &scaled).unwrap();
        assert_eq!(b.delta_m().unwrap(), 4.0 * a.delta_m().unwrap());
    }

    #[test]
    fn narrow_spike_matches_atom() {
        // δm = pol·4π∫φ² dr in d=3 (r² cancels ω⁻²); pick the plateau so it equals W.
        let (r0, w, h, ramp) = (1.0, 3.0, 1e-4, 1e-9);
        let pol = 2.0 / 3.0;
        // Each linear ramp carries a third of a plateau of the same width.
        let height = (w / (pol * 4.0 * PI * (2.0 * h + 2.0 * ramp / 3.0))).sqrt();
        let pts = vec![[r0 - h - ramp, 0.0], [r0 - h, height], [r0 + h, height], [r0 + h + ramp, 0.0]];
        let tab = RadialMeasure::new(3, Profile::Tabulated { points: pts }).unwrap();
        let atom = RadialMeasure::point_masses(3, &[(r0, w)]).unwrap();
        assert!(rel(tab.delta_m().unwrap(), atom.delta_m().unwrap()) < 1e-9);
    }

    #[test]
    fn tabulated_interpolates() {
        let t = RadialMeasure::new(3, Profile::Tabulated { points: vec![[0.0, 1.0], [1.0, 1.0]] }).unwrap();
        let s = RadialMeasure::sharp(3, 1.0).unwrap();
        assert!(rel(t.moment(-2).unwrap(), s.moment(-2).unwrap()) < 1e-12);
        assert_eq!(t.phi(0.5), 1.0);
        assert_eq!(t.phi(1.5), 0.0);
        let ramp = RadialMeasure::new(3, Profile::Tabulated { points: vec![[1.0, 0.0], [2.0, 2.0]] }).unwrap();
        assert!((ramp.phi(1.25) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let src = r#"{"dimension":3,"profile":{"type":"sharp","lambda":1.0}}"#;
        let m: RadialMeasure = serde_json::from_str(src).unwrap();
        assert_eq!(m, RadialMeasure::sharp(3, 1.0).unwrap());
        assert_eq!(serde_json::to_string(&m).unwrap(), src);

        let pm = r#"{"dimension":3,"profile":{"type":"point_masses","atoms":[{"omega":1.0,"weight":3.0}]}}"#;
        let m: RadialMeasure = serde_json::from_str(pm).unwrap();
        assert_eq!(m.m_eff().unwrap(), 4.0);

        let unknown = r#"{"dimension":3,"profile":{"type":"sharp","lambda":1.0},"extra":1}"#;
        assert!(serde_json::from_str::<RadialMeasure>(unknown).is_err());
        let bad = r#"{"dimension":2,"profile":{"type":"sharp","lambda":1.0}}"#;
        let e = serde_json::from_str::<RadialMeasure>(bad).unwrap_err();
        assert!(e.to_string().contains("phi/omega"));
    }

    #[test]
    fn report_serializes_infinity() {
        let r = RadialMeasure::sharp(3, 1.0).unwrap().moment_report();
        let j = serde_json::to_value(&r).unwrap();
        assert_eq!(j["M_minus3"], "inf");
        assert_eq!(j["ir_regular"], false);
    }
}
