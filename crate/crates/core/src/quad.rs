//! Numerical quadrature: a globally adaptive 10/21-point Gauss–Kronrod
//! integrator in the QUADPACK mould, a tangent map for half-lines, and
//! Gauss–Legendre nodes for composite Nyström panels.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;

// Kronrod abscissae (descending, positive half) and weights, QUADPACK qk21.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_384,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// 10-point Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One panel estimate.
#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = 0.0;
    let mut resk = WGK[10] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * h;
    resabs *= h.abs();
    resasc *= h.abs();
    let mut error = ((resk - resg) * h).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub panels: usize,
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-10, rel: 1e-10, max_panels: 4000 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel, ..Default::default() }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Globally adaptive integration of `f` over `[a, b]`, pre-split at `breaks`.
///
/// Panels too narrow to bisect in floating point are frozen; their error
/// still counts toward the total.
pub fn integrate_with_breaks<F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: Tolerance,
    context: &'static str,
) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, panels: 0 });
    }
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    for w in cuts.windows(2) {
        heap.push(qk21(&f, w[0], w[1]));
    }
    let mut panels = heap.len();
    loop {
        let (value, error) = heap
            .iter()
            .fold((frozen_value, frozen_error), |(v, e), p| (v + p.value, e + p.error));
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { context, achieved: f64::INFINITY, target: tol.target(0.0) });
        }
        if error <= tol.target(value) || heap.is_empty() {
            return Ok(QuadResult { value, abs_error: error, panels });
        }
        if panels >= tol.max_panels {
            return Err(Error::Quadrature { context, achieved: error, target: tol.target(value) });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a).abs() < 1e-14 * mid.abs().max(1e-300) {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(qk21(&f, worst.a, mid));
        heap.push(qk21(&f, mid, worst.b));
        panels += 1;
    }
}

/// Adaptive integration over a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
    context: &'static str,
) -> Result<QuadResult> {
    integrate_with_breaks(f, a, b, &[], tol, context)
}

/// Integral over `[a, ∞)` through `t = a + scale·tan θ`.
///
/// `scale` should sit near the width of the integrand's bulk; breakpoints are
/// given in the original variable.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    breaks: &[f64],
    tol: Tolerance,
    context: &'static str,
) -> Result<QuadResult> {
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        if c <= 0.0 {
            return 0.0;
        }
        let t = a + scale * s / c;
        let v = f(t);
        if v == 0.0 {
            0.0
        } else {
            v * scale / (c * c)
        }
    };
    let tb: Vec<f64> = breaks
        .iter()
        .filter(|&&x| x > a)
        .map(|&x| ((x - a) / scale).atan())
        .collect();
    integrate_with_breaks(g, 0.0, FRAC_PI_2, &tb, tol, context)
}

/// Gauss–Legendre nodes and weights of order `p` on `[-1, 1]`, by Newton
/// iteration on the three-term recurrence.
pub fn gauss_legendre(p: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; p];
    let mut w = vec![0.0; p];
    let pf = p as f64;
    for i in 0..(p + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (pf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=p {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if p == 0 {
                break;
            }
            let pn = if p == 1 { z } else { p1 };
            let pm = if p == 1 { 1.0 } else { p0 };
            dp = pf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[p - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[p - 1 - i] = wi;
    }
    (x, w)
}
