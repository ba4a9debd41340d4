//! Kernel estimation of relative extropy from two samples, and the
//! Monte-Carlo harness used to measure its bias and MSE.
//!
//! ```text
//! d̂(f,g) = ½ ∫ (f̂_n(x) − ĝ_m(x))² dx,   f̂_n(x) = (1/(n b)) Σ φ((x − X_j)/b)
//! ```
//!
//! with a Gaussian kernel `φ` and bandwidths from the Sheather–Jones
//! solve-the-equation rule.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{sample, Family, SeededSampler};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Above this size kernel sums skip kernels centred more than
/// [`KERNEL_CUTOFF`] bandwidths away; each skipped term is below 1e-14.
pub const EXACT_SUM_LIMIT: usize = 10_000;
pub const KERNEL_CUTOFF: f64 = 8.0;

/// Finite observations, stored sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SampleBatch {
    values: Vec<f64>,
}

impl SampleBatch {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::from_draws(values.to_vec())
    }

    /// Takes ownership of the draws and sorts them.
    pub fn from_draws(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "a sample needs at least 2 values, got {}",
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value {bad}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.values.iter().copied()) / self.len() as f64
    }

    /// Sample standard deviation (divisor `n − 1`).
    pub fn std_dev(&self) -> f64 {
        let m = self.mean();
        let ss = neumaier_sum(self.values.iter().map(|v| (v - m) * (v - m)));
        (ss / (self.len() - 1) as f64).sqrt()
    }

    /// Empirical quantile by linear interpolation between order statistics
    /// (`x[(n−1)p]`).
    pub fn quantile(&self, p: f64) -> f64 {
        let h = (self.len() - 1) as f64 * p.clamp(0.0, 1.0);
        let lo = h.floor() as usize;
        let hi = (lo + 1).min(self.len() - 1);
        self.values[lo] + (h - lo as f64) * (self.values[hi] - self.values[lo])
    }
}

impl TryFrom<Vec<f64>> for SampleBatch {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::from_draws(v)
    }
}

impl From<SampleBatch> for Vec<f64> {
    fn from(s: SampleBatch) -> Self {
        s.values
    }
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
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

pub fn gaussian_kernel(u: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * u * u).exp()
}

/// Gaussian kernel density estimate over a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeModel {
    sample: SampleBatch,
    bandwidth: f64,
}

impl KdeModel {
    pub fn new(sample: SampleBatch, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        Ok(Self { sample, bandwidth })
    }

    pub fn with_sheather_jones(sample: SampleBatch) -> Result<Self> {
        let b = sheather_jones_bandwidth(&sample)?;
        Self::new(sample, b)
    }

    pub fn sample(&self) -> &SampleBatch {
        &self.sample
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn pdf(&self, x: f64) -> f64 {
        kde_pdf(self, x)
    }
}

/// `(1/(n b)) Σ φ((x − X_j)/b)`.
pub fn kde_pdf(m: &KdeModel, x: f64) -> f64 {
    let b = m.bandwidth;
    let v = m.sample.values();
    let window = if v.len() > EXACT_SUM_LIMIT {
        let lo = v.partition_point(|&s| s < x - KERNEL_CUTOFF * b);
        let hi = v.partition_point(|&s| s <= x + KERNEL_CUTOFF * b);
        &v[lo..hi]
    } else {
        v
    };
    let sum: f64 = window.iter().map(|&s| gaussian_kernel((x - s) / b)).sum();
    sum / (v.len() as f64 * b)
}

/// Robust scale `min(sd, IQR/1.349)`, falling back to `sd` when the IQR is 0.
fn reference_scale(s: &SampleBatch) -> Result<f64> {
    let sd = s.std_dev();
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample("sample has zero variance".into()));
    }
    let iqr = (s.quantile(0.75) - s.quantile(0.25)) / 1.349;
    Ok(if iqr > 0.0 { sd.min(iqr) } else { sd })
}

/// Kernel estimate of `∫ f^(r) f` for r = 4 or 6 with bandwidth `h`, using
/// all ordered pairs including `i = j`.
fn density_functional(v: &[f64], h: f64, order: u32) -> f64 {
    let n = v.len() as f64;
    let cutoff = 40.0 * h;
    let mut pairs = 0.0;
    for i in 0..v.len() {
        for &xj in &v[i + 1..] {
            let d = xj - v[i];
            if d > cutoff {
                break;
            }
            let q = (d / h) * (d / h);
            let poly = match order {
                4 => q * q - 6.0 * q + 3.0,
                _ => q * q * q - 15.0 * q * q + 45.0 * q - 15.0,
            };
            pairs += (-0.5 * q).exp() * poly;
        }
    }
    let (diag, power) = match order {
        4 => (3.0, 5),
        _ => (-15.0, 7),
    };
    (2.0 * pairs + n * diag) * INV_SQRT_2PI / (n * (n - 1.0) * h.powi(power))
}

/// Sheather–Jones solve-the-equation bandwidth for a Gaussian kernel.
///
/// Pilot functionals use normal-reference bandwidths on the robust scale
/// `min(sd, IQR/1.349)`; the fixed-point equation
/// `h = (R(φ) / (n · ψ̂₄(α₂(h))))^{1/5}` is solved by Brent's method on a
/// bracket grown inside `[10⁻³, 10³]·scale·n^{-1/5}`.
pub fn sheather_jones_bandwidth(s: &SampleBatch) -> Result<f64> {
    let n = s.len();
    if n < 5 {
        return Err(Error::InvalidSample(format!(
            "bandwidth selection needs n >= 5, got {n}"
        )));
    }
    let scale = reference_scale(s)?;
    let v = s.values();
    let nf = n as f64;
    let a = 1.24 * scale * nf.powf(-1.0 / 7.0);
    let b = 1.23 * scale * nf.powf(-1.0 / 9.0);
    let c1 = 1.0 / (2.0 * PI.sqrt() * nf);
    let psi4 = density_functional(v, a, 4);
    let td = -density_functional(v, b, 6);
    if !(td > 0.0 && psi4 > 0.0) {
        return Err(Error::DegenerateSample(
            "pilot density functionals have the wrong sign".into(),
        ));
    }
    let alpha2 = 1.357 * (psi4 / td).powf(1.0 / 7.0);
    let equation = |h: f64| (c1 / density_functional(v, alpha2 * h.powf(5.0 / 7.0), 4)).powf(0.2) - h;

    let unit = scale * nf.powf(-0.2);
    let (floor, ceil) = (1e-3 * unit, 1e3 * unit);
    let hmax = 1.144 * unit;
    let (mut lo, mut hi) = (0.1 * hmax, hmax);
    let (mut flo, mut fhi) = (equation(lo), equation(hi));
    while flo * fhi > 0.0 || !flo.is_finite() || !fhi.is_finite() {
        if lo <= floor && hi >= ceil {
            return Err(Error::NoBracket { lo: floor, hi: ceil });
        }
        lo = (lo * 0.5).max(floor);
        hi = (hi * 2.0).min(ceil);
        flo = equation(lo);
        fhi = equation(hi);
    }
    brent(equation, lo, hi, flo, fhi, 1e-12)
}

/// Brent's root finder on a sign-changing bracket.
fn brent<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, rel_tol: f64) -> Result<f64> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * rel_tol * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::NoBracket {
        lo: a.min(c),
        hi: a.max(c),
    })
}

/// How the estimator treats mass that the kernels leak below zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Integrate over the whole padded data range.
    #[default]
    Full,
    /// Integrate over the part of the padded range at or above zero.
    TruncateAtZero,
    /// Reflect each estimate about zero, `f̂(x) + f̂(−x)` on `x ≥ 0`.
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    pub boundary: Boundary,
    pub quadrature: QuadratureSpec,
    /// Integration range is the data range padded by this many bandwidths.
    pub padding: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            boundary: Boundary::Full,
            quadrature: QuadratureSpec::default().with_abs_tol(1e-10),
            padding: 5.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub bandwidth_x: f64,
    pub bandwidth_y: f64,
    pub lo: f64,
    pub hi: f64,
}

/// `d̂(f,g)` with Sheather–Jones bandwidths and default options.
pub fn estimate_relative_extropy(sx: &SampleBatch, sy: &SampleBatch) -> Result<Estimate> {
    estimate_relative_extropy_with(sx, sy, &EstimatorOptions::default())
}

pub fn estimate_relative_extropy_with(sx: &SampleBatch, sy: &SampleBatch, opts: &EstimatorOptions) -> Result<Estimate> {
    let kx = KdeModel::with_sheather_jones(sx.clone())?;
    let ky = KdeModel::with_sheather_jones(sy.clone())?;
    relative_extropy_of_kdes(&kx, &ky, opts)
}

/// `½∫(f̂ − ĝ)²` for two fitted estimates.
pub fn relative_extropy_of_kdes(kx: &KdeModel, ky: &KdeModel, opts: &EstimatorOptions) -> Result<Estimate> {
    let (bx, by) = (kx.bandwidth(), ky.bandwidth());
    let bmax = bx.max(by);
    let mut lo = kx.sample().min().min(ky.sample().min()) - opts.padding * bmax;
    let hi = kx.sample().max().max(ky.sample().max()) + opts.padding * bmax;
    if opts.boundary != Boundary::Full {
        lo = lo.max(0.0);
    }
    let estimate = |value| Estimate {
        value,
        bandwidth_x: bx,
        bandwidth_y: by,
        lo,
        hi,
    };
    if hi <= lo {
        return Ok(estimate(0.0));
    }
    let reflect = opts.boundary == Boundary::Reflect;
    let density = |k: &KdeModel, x: f64| {
        if reflect {
            kde_pdf(k, x) + kde_pdf(k, -x)
        } else {
            kde_pdf(k, x)
        }
    };
    // Seed the subdivision at roughly one bandwidth per panel.
    let bmin = bx.min(by);
    let panels = (((hi - lo) / bmin).ceil() as usize).clamp(1, 2000);
    let breaks: Vec<f64> = (1..panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    let r = integrate(
        |x| {
            let d = density(kx, x) - density(ky, x);
            d * d
        },
        lo,
        hi,
        &breaks,
        &opts.quadrature,
    )?;
    Ok(estimate(0.5 * r.value))
}

/// One Monte-Carlo bias/MSE study at a single sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStudyConfig {
    pub family_x: Family,
    pub family_y: Family,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub true_value: f64,
    #[serde(default)]
    pub options: EstimatorOptions,
}

/// Replication count used when none is given.
pub const DEFAULT_REPS: usize = 500;
pub const DEFAULT_SEED: u64 = 20_240_601;

impl McStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if self.n < 10 {
            return Err(Error::InvalidParameter(format!(
                "n must be at least 10, got {}",
                self.n
            )));
        }
        if !self.true_value.is_finite() {
            return Err(Error::InvalidParameter("true value must be finite".into()));
        }
        self.options.quadrature.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McStudyRow {
    pub n: usize,
    pub reps: usize,
    pub mean_estimate: f64,
    pub bias: f64,
    pub mse: f64,
    pub failed: usize,
}

/// Runs `reps` replications. Replication `r` draws `X` from substream `2r`
/// and `Y` from substream `2r + 1` of the seed, so rows do not depend on
/// scheduling and studies at different `n` share random numbers.
/// Fails if more than 1% of replications fail.
pub fn mc_bias_mse(cfg: &McStudyConfig) -> Result<McStudyRow> {
    cfg.validate()?;
    let outcomes: Vec<Result<f64>> = (0..cfg.reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut gx = SeededSampler::substream(cfg.seed, 2 * r);
            let mut gy = SeededSampler::substream(cfg.seed, 2 * r + 1);
            let sx = sample(cfg.family_x, cfg.n, &mut gx)?;
            let sy = sample(cfg.family_y, cfg.n, &mut gy)?;
            Ok(estimate_relative_extropy_with(&sx, &sy, &cfg.options)?.value)
        })
        .collect();
    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    if failed * 100 > cfg.reps {
        let first = outcomes
            .into_iter()
            .find_map(|o| o.err())
            .expect("a failure was counted");
        return Err(Error::StudyFailed {
            failed,
            reps: cfg.reps,
            first: Box::new(first),
        });
    }
    let values: Vec<f64> = outcomes.into_iter().filter_map(|o| o.ok()).collect();
    let k = values.len() as f64;
    let mean = neumaier_sum(values.iter().copied()) / k;
    let mse = neumaier_sum(values.iter().map(|v| (v - cfg.true_value).powi(2))) / k;
    Ok(McStudyRow {
        n: cfg.n,
        reps: cfg.reps,
        mean_estimate: mean,
        bias: mean - cfg.true_value,
        mse,
        failed,
    })
}

/// [`mc_bias_mse`] at each sample size in `sizes`, same seed throughout.
pub fn mc_study_table(base: &McStudyConfig, sizes: &[usize]) -> Result<Vec<McStudyRow>> {
    sizes
        .iter()
        .map(|&n| mc_bias_mse(&McStudyConfig { n, ..base.clone() }))
        .collect()
}
