//! Adaptive Gauss–Kronrod integration with tail truncation.
//!
//! Every measure in this crate is an integral of products of densities over a
//! (possibly unbounded) interval. [`integrate`] handles finite intervals with
//! globally adaptive bisection driven by the 21-point Kronrod error estimate;
//! unbounded upper limits are first mapped to a finite truncation point by the
//! [`TailRule`] carried in [`QuadratureSpec`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How an unbounded upper integration limit is replaced by a finite one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailRule {
    /// Search geometrically for the first `T` at which every model with an
    /// unbounded support has conditional survival below
    /// [`QuadratureSpec::tail_epsilon`] and conditional density below one.
    /// For tails that are eventually nonincreasing this bounds every
    /// integrand's tail mass by the tail epsilon.
    SurvivalBound,
    /// Always truncate at this abscissa.
    Fixed(f64),
}

/// Tolerances, truncation and subdivision policy shared by every integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub tail: TailRule,
    /// Survival/cdf values at or below this are treated as zero denominators.
    pub denominator_floor: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
            tail: TailRule::SurvivalBound,
            denominator_floor: 1e-12,
        }
    }
}

impl QuadratureSpec {
    /// Same policy with a different absolute tolerance.
    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1 && self.denominator_floor > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "quadrature spec needs abs_tol, rel_tol, denominator_floor > 0 and max_subdivisions >= 1, got {self:?}"
            )));
        }
        if let TailRule::Fixed(t) = self.tail {
            if !t.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "fixed truncation point must be finite, got {t}"
                )));
            }
        }
        Ok(())
    }

    /// Conditional tail mass allowed beyond the truncation point.
    pub fn tail_epsilon(&self) -> f64 {
        1e-3 * self.abs_tol
    }
}

/// Result of one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

impl Integral {
    pub const ZERO: Integral = Integral {
        value: 0.0,
        error: 0.0,
        subdivisions: 0,
    };
}

#[allow(clippy::excessive_precision)]
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

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn nonfinite(x: f64, v: f64) -> Error {
    Error::InvalidModel(format!("integrand evaluates to {v} at x = {x}"))
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];

    let fc = f(center);
    if !fc.is_finite() {
        return Err(nonfinite(center, fc));
    }
    let mut res_gauss = 0.0;
    let mut res_kronrod = fc * WGK[10];
    let mut res_abs = res_kronrod.abs();

    for j in 0..10 {
        let x = half * XGK[j];
        let (lo, hi) = (center - x, center + x);
        let (f1, f2) = (f(lo), f(hi));
        if !f1.is_finite() {
            return Err(nonfinite(lo, f1));
        }
        if !f2.is_finite() {
            return Err(nonfinite(hi, f2));
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        // Gauss nodes are the odd-indexed Kronrod nodes.
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let abs_half = half.abs();
    Ok(Segment {
        a,
        b,
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    })
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Integrates `f` over the finite interval `[a, b]`.
///
/// `breaks` are interior abscissae where the integrand may be non-smooth
/// (support endpoints, kinks); the interval is split there before adaptive
/// bisection starts. Points outside `(a, b)` are ignored.
pub fn integrate<F>(f: F, a: f64, b: f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if b <= a {
        return Ok(Integral::ZERO);
    }

    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    for w in edges.windows(2) {
        heap.push(gauss_kronrod_21(&f, w[0], w[1])?);
    }

    loop {
        let value = neumaier_sum(heap.iter().chain(done.iter()).map(|s| s.value));
        let error: f64 = heap.iter().chain(done.iter()).map(|s| s.error).sum();
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        let count = heap.len() + done.len();
        if error <= tol {
            return Ok(Integral {
                value,
                error,
                subdivisions: count,
            });
        }
        let worst = match heap.pop() {
            Some(s) if count < spec.max_subdivisions => s,
            _ => {
                return Err(Error::QuadratureFailure {
                    error_estimate: error,
                    tolerance: tol,
                    subdivisions: count,
                })
            }
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at machine resolution, its error cannot be reduced.
            done.push(worst);
            continue;
        }
        heap.push(gauss_kronrod_21(&f, worst.a, mid)?);
        heap.push(gauss_kronrod_21(&f, mid, worst.b)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = QuadratureSpec::default();
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, &[], &q).unwrap();
        assert!((r.value - 8.0).abs() < 1e-14);
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn exponential_decay_on_long_interval() {
        let q = QuadratureSpec::default();
        let r = integrate(|x| (-x).exp(), 0.0, 40.0, &[], &q).unwrap();
        assert!((r.value - (1.0 - (-40.0f64).exp())).abs() < 1e-12);
        assert!(r.error <= q.abs_tol);
    }

    #[test]
    fn breakpoints_handle_discontinuity() {
        let q = QuadratureSpec::default();
        let step = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let r = integrate(step, 0.0, 1.0, &[0.3], &q).unwrap();
        assert!((r.value - 1.7).abs() < 1e-13);
    }

    #[test]
    fn reversed_or_empty_interval_is_zero() {
        let q = QuadratureSpec::default();
        assert_eq!(integrate(|_| 1.0, 1.0, 1.0, &[], &q).unwrap().value, 0.0);
        assert_eq!(integrate(|_| 1.0, 2.0, 1.0, &[], &q).unwrap().value, 0.0);
    }

    #[test]
    fn nonfinite_integrand_is_reported() {
        let q = QuadratureSpec::default();
        let err = integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &[], &q);
        assert!(matches!(err, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn budget_exhaustion_is_a_failure() {
        let q = QuadratureSpec {
            max_subdivisions: 3,
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            ..QuadratureSpec::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, &[], &q);
        assert!(matches!(err, Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let q = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(q.validate().is_err());
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let q = QuadratureSpec::default();
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &[], &q).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
    }
}
