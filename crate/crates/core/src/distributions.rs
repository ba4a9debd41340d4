//! Parametric lifetime families with exact evaluators, closed-form measure
//! values used as test oracles, and seeded inverse-cdf sampling.

use std::fmt;
use std::str::FromStr;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::SampleBatch;
use crate::model::{DistributionModel, Support};

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// Exponential distribution with rate `λ` (mean `1/λ`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponential {
    rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        Ok(Self {
            rate: positive("exponential rate", rate)?,
        })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl DistributionModel for Exponential {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate * (-self.rate * x).exp()
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.rate * x).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.rate * x).exp()
        }
    }
    fn hazard(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.rate
        }
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::INFINITY
        } else {
            self.rate / (self.rate * x).exp_m1()
        }
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
}

/// Weibull distribution with density `(k/λ)(x/λ)^{k−1} e^{−(x/λ)^k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Weibull {
    shape: f64,
    scale: f64,
}

impl Weibull {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        Ok(Self {
            shape: positive("weibull shape", shape)?,
            scale: positive("weibull scale", scale)?,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn z(&self, x: f64) -> f64 {
        (x / self.scale).powf(self.shape)
    }
}

impl DistributionModel for Weibull {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return if self.shape < 1.0 {
                f64::INFINITY
            } else if self.shape == 1.0 {
                1.0 / self.scale
            } else {
                0.0
            };
        }
        let k = self.shape;
        (k / self.scale) * (x / self.scale).powf(k - 1.0) * (-self.z(x)).exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-self.z(x)).exp_m1()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-self.z(x)).exp()
        }
    }
    fn hazard(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let k = self.shape;
        if x == 0.0 && k < 1.0 {
            return f64::INFINITY;
        }
        (k / self.scale) * (x / self.scale).powf(k - 1.0)
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::INFINITY;
        }
        // f/F = h · F̄/F = h / (e^{z} − 1)
        self.hazard(x) / self.z(x).exp_m1()
    }
    fn support(&self) -> Support {
        Support::new(0.0, f64::INFINITY)
    }
    fn breakpoints(&self) -> Vec<f64> {
        let k = self.shape;
        let mode = if k > 1.0 {
            self.scale * ((k - 1.0) / k).powf(1.0 / k)
        } else {
            0.0
        };
        vec![mode, self.scale]
    }
}

/// Constant reversed hazard family: `F(x) = e^{a(x−b)}` on `[0, b]`.
///
/// The cdf jumps to `e^{−ab}` at zero. Density-based measures only see the
/// absolutely continuous part `a e^{a(x−b)}`; `include_atom` decides whether
/// the model reports the jump as [`DistributionModel::atom_at_lo`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantReversedHazard {
    a: f64,
    b: f64,
    include_atom: bool,
}

impl ConstantReversedHazard {
    pub fn new(a: f64, b: f64, include_atom: bool) -> Result<Self> {
        Ok(Self {
            a: positive("reversed hazard rate a", a)?,
            b: positive("upper endpoint b", b)?,
            include_atom,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn include_atom(&self) -> bool {
        self.include_atom
    }

    /// Mass of the jump at zero, `e^{−ab}`.
    pub fn jump_at_zero(&self) -> f64 {
        (-self.a * self.b).exp()
    }
}

impl DistributionModel for ConstantReversedHazard {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.b {
            0.0
        } else {
            self.a * (self.a * (x - self.b)).exp()
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x >= self.b {
            1.0
        } else {
            (self.a * (x - self.b)).exp()
        }
    }
    fn survival(&self, x: f64) -> f64 {
        if x < 0.0 {
            1.0
        } else if x >= self.b {
            0.0
        } else {
            -(self.a * (x - self.b)).exp_m1()
        }
    }
    fn hazard(&self, x: f64) -> f64 {
        if x < 0.0 || x >= self.b {
            return if x < 0.0 { 0.0 } else { f64::INFINITY };
        }
        self.a / (-self.a * (x - self.b)).exp_m1()
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.b {
            0.0
        } else {
            self.a
        }
    }
    fn support(&self) -> Support {
        Support::new(0.0, self.b)
    }
    fn atom_at_lo(&self) -> f64 {
        if self.include_atom {
            self.jump_at_zero()
        } else {
            0.0
        }
    }
}

/// Uniform distribution on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uniform {
    lo: f64,
    hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "uniform needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self { lo, hi })
    }
}

impl DistributionModel for Uniform {
    fn pdf(&self, x: f64) -> f64 {
        if x < self.lo || x > self.hi {
            0.0
        } else {
            1.0 / (self.hi - self.lo)
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn survival(&self, x: f64) -> f64 {
        ((self.hi - x) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn hazard(&self, x: f64) -> f64 {
        if x < self.lo {
            0.0
        } else if x >= self.hi {
            f64::INFINITY
        } else {
            1.0 / (self.hi - x)
        }
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        if x <= self.lo {
            if x == self.lo {
                f64::INFINITY
            } else {
                0.0
            }
        } else if x > self.hi {
            0.0
        } else {
            1.0 / (x - self.lo)
        }
    }
    fn support(&self) -> Support {
        Support::new(self.lo, self.hi)
    }
}

/// Any of the shipped families, parsed from `name:params` strings such as
/// `exp:2`, `weibull:1.5,2`, `crh:1,2`, `crh:1,2,atom` or `uniform:0,1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    ConstantReversedHazard { a: f64, b: f64, include_atom: bool },
    Uniform { lo: f64, hi: f64 },
}

/// Concrete model built from a [`Family`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Exponential(Exponential),
    Weibull(Weibull),
    ConstantReversedHazard(ConstantReversedHazard),
    Uniform(Uniform),
}

/// Validates `family` and returns the corresponding evaluable model.
pub fn make_model(family: Family) -> Result<Model> {
    Ok(match family {
        Family::Exponential { rate } => Model::Exponential(Exponential::new(rate)?),
        Family::Weibull { shape, scale } => Model::Weibull(Weibull::new(shape, scale)?),
        Family::ConstantReversedHazard { a, b, include_atom } => {
            Model::ConstantReversedHazard(ConstantReversedHazard::new(a, b, include_atom)?)
        }
        Family::Uniform { lo, hi } => Model::Uniform(Uniform::new(lo, hi)?),
    })
}

impl Family {
    pub fn model(self) -> Result<Model> {
        make_model(self)
    }

    /// Inverse of the cdf for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
            Family::ConstantReversedHazard { a, b, .. } => {
                if u <= (-a * b).exp() {
                    0.0
                } else {
                    b + u.ln() / a
                }
            }
            Family::Uniform { lo, hi } => lo + u * (hi - lo),
        }
    }
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            Model::Exponential($m) => $e,
            Model::Weibull($m) => $e,
            Model::ConstantReversedHazard($m) => $e,
            Model::Uniform($m) => $e,
        }
    };
}

impl DistributionModel for Model {
    fn pdf(&self, x: f64) -> f64 {
        dispatch!(self, m => m.pdf(x))
    }
    fn cdf(&self, x: f64) -> f64 {
        dispatch!(self, m => m.cdf(x))
    }
    fn survival(&self, x: f64) -> f64 {
        dispatch!(self, m => m.survival(x))
    }
    fn hazard(&self, x: f64) -> f64 {
        dispatch!(self, m => m.hazard(x))
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        dispatch!(self, m => m.reversed_hazard(x))
    }
    fn support(&self) -> Support {
        dispatch!(self, m => m.support())
    }
    fn atom_at_lo(&self) -> f64 {
        dispatch!(self, m => m.atom_at_lo())
    }
    fn breakpoints(&self) -> Vec<f64> {
        dispatch!(self, m => m.breakpoints())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Exponential { rate } => write!(f, "exp:{rate}"),
            Family::Weibull { shape, scale } => write!(f, "weibull:{shape},{scale}"),
            Family::ConstantReversedHazard { a, b, include_atom } => {
                write!(f, "crh:{a},{b}")?;
                if include_atom {
                    write!(f, ",atom")?;
                }
                Ok(())
            }
            Family::Uniform { lo, hi } => write!(f, "uniform:{lo},{hi}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("cannot parse family {s:?}: {why}"));
        let (name, params) = s.split_once(':').ok_or_else(|| bad("expected name:params"))?;
        let mut atom = false;
        let mut nums = Vec::new();
        for p in params.split(',').map(str::trim) {
            if p.eq_ignore_ascii_case("atom") {
                atom = true;
                continue;
            }
            nums.push(p.parse::<f64>().map_err(|_| bad(&format!("{p:?} is not a number")))?);
        }
        let family = match (name.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("exp" | "exponential", &[rate]) => Family::Exponential { rate },
            ("weibull", &[shape, scale]) => Family::Weibull { shape, scale },
            ("crh", &[a, b]) => Family::ConstantReversedHazard {
                a,
                b,
                include_atom: atom,
            },
            ("uniform" | "unif", &[lo, hi]) => Family::Uniform { lo, hi },
            _ => return Err(bad("unknown family or wrong number of parameters")),
        };
        if atom && !matches!(family, Family::ConstantReversedHazard { .. }) {
            return Err(bad("only crh accepts the atom flag"));
        }
        make_model(family)?;
        Ok(family)
    }
}

/// Relative extropy between two exponential densities,
/// `(1/4)(λ₁ + λ₂ − 4λ₁λ₂/(λ₁ + λ₂))`. Also the (constant) residual relative
/// extropy of the pair at every `t`.
pub fn closed_form_relative_exponential(rate_x: f64, rate_y: f64) -> Result<f64> {
    let (l1, l2) = (positive("rate", rate_x)?, positive("rate", rate_y)?);
    Ok(0.25 * (l1 + l2 - 4.0 * l1 * l2 / (l1 + l2)))
}

/// Extropy inaccuracy between two exponentials, `−λ₁λ₂ / (2(λ₁ + λ₂))`.
pub fn closed_form_inaccuracy_exponential(rate_x: f64, rate_y: f64) -> Result<f64> {
    let (l1, l2) = (positive("rate", rate_x)?, positive("rate", rate_y)?);
    Ok(-l1 * l2 / (2.0 * (l1 + l2)))
}

/// Extropy of an exponential, `−λ/4`.
pub fn closed_form_extropy_exponential(rate: f64) -> Result<f64> {
    Ok(-positive("rate", rate)? / 4.0)
}

/// How the constant reversed hazard worked example treats the jump at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomConvention {
    /// Integrate the absolutely continuous density only. Agrees with
    /// quadrature over the model.
    #[default]
    Ac,
    /// The bracketed `1 + …` form, which carries an extra unit term inside
    /// each bracket.
    Paper,
}

impl FromStr for AtomConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ac" => Ok(Self::Ac),
            "paper" => Ok(Self::Paper),
            _ => Err(Error::InvalidParameter(format!(
                "atom convention must be `ac` or `paper`, got {s:?}"
            ))),
        }
    }
}

/// Closed-form past measures for two constant reversed hazard models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrhPastMeasures {
    pub past_extropy_x: f64,
    pub past_extropy_y: f64,
    pub past_inaccuracy: f64,
    pub past_divergence: f64,
    pub past_relative: f64,
}

/// Past extropy, past inaccuracy, past divergence `J_p(f_t|g_t)` and past
/// relative extropy for `X ~ F(x) = e^{a(x−b)}`, `Y ~ G(y) = e^{c(y−d)}` at
/// `0 < t ≤ min(b, d)`.
pub fn crh_past_measures(
    x: &ConstantReversedHazard,
    y: &ConstantReversedHazard,
    t: f64,
    convention: AtomConvention,
) -> Result<CrhPastMeasures> {
    if !(t > 0.0 && t <= x.b.min(y.b)) {
        return Err(Error::InvalidParameter(format!(
            "t must lie in (0, {}], got {t}",
            x.b.min(y.b)
        )));
    }
    let (a, c) = (x.a, y.a);
    let unit = match convention {
        AtomConvention::Ac => 0.0,
        AtomConvention::Paper => 1.0,
    };
    // −(1/(2e^{st})) (unit + w (e^{st} − 1)), written to avoid overflow.
    let bracket = |s: f64, w: f64| -0.5 * (unit * (-s * t).exp() + w * -(-s * t).exp_m1());
    let past_extropy_x = bracket(2.0 * a, a / 2.0);
    let past_extropy_y = bracket(2.0 * c, c / 2.0);
    let past_inaccuracy = bracket(a + c, a * c / (a + c));
    Ok(CrhPastMeasures {
        past_extropy_x,
        past_extropy_y,
        past_inaccuracy,
        past_divergence: past_inaccuracy - past_extropy_x,
        past_relative: 2.0 * past_inaccuracy - past_extropy_x - past_extropy_y,
    })
}

/// Seeded uniform source: ChaCha20 with a 64-bit seed. Independent substreams
/// are addressed by an index (the ChaCha stream id), so replication `r` of a
/// study draws the same numbers no matter how replications are scheduled.
#[derive(Debug, Clone)]
pub struct SeededSampler {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl SeededSampler {
    pub const ALGORITHM: &'static str = "chacha20";

    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform draw from the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.sample(Open01)
    }
}

/// Draws `n` i.i.d. values from `family` by inverse-cdf transform.
pub fn sample(family: Family, n: usize, sampler: &mut SeededSampler) -> Result<SampleBatch> {
    make_model(family)?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    let values: Vec<f64> = (0..n).map(|_| family.quantile(sampler.uniform())).collect();
    SampleBatch::from_draws(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::check_model;
    use crate::quadrature::QuadratureSpec;

    #[test]
    fn exponential_hazard_is_constant() {
        let m = make_model(Family::Exponential { rate: 2.0 }).unwrap();
        for x in [0.0, 0.3, 5.0, 40.0] {
            assert_eq!(m.hazard(x), 2.0);
        }
    }

    #[test]
    fn crh_reversed_hazard_is_a() {
        let m = ConstantReversedHazard::new(1.5, 2.0, false).unwrap();
        for x in [0.1, 0.5, 1.9, 2.0] {
            assert_eq!(m.reversed_hazard(x), 1.5);
        }
    }

    #[test]
    fn weibull_hazard_is_linear_for_shape_two() {
        let m = Weibull::new(2.0, 1.0).unwrap();
        for x in [0.1, 0.7, 2.5] {
            assert!((m.hazard(x) - 2.0 * x).abs() < 1e-14);
            assert!((m.hazard(x) * m.survival(x) - m.pdf(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn models_satisfy_invariants() {
        let q = QuadratureSpec::default();
        for fam in [
            Family::Exponential { rate: 2.0 },
            Family::Exponential { rate: 0.1 },
            Family::Weibull { shape: 1.5, scale: 2.0 },
            Family::Weibull { shape: 0.8, scale: 1.0 },
            Family::Weibull { shape: 3.0, scale: 0.5 },
            Family::Uniform { lo: 0.0, hi: 1.0 },
            Family::ConstantReversedHazard {
                a: 1.0,
                b: 2.0,
                include_atom: true,
            },
        ] {
            check_model(&make_model(fam).unwrap(), &q).unwrap_or_else(|e| panic!("{fam}: {e}"));
        }
    }

    #[test]
    fn crh_without_atom_is_defective() {
        let q = QuadratureSpec::default();
        let m = ConstantReversedHazard::new(1.0, 2.0, false).unwrap();
        let mass = crate::quadrature::integrate(|x| m.pdf(x), 0.0, 2.0, &[], &q).unwrap();
        assert!((mass.value - (1.0 - (-2.0f64).exp())).abs() < 1e-12);
        assert!(check_model(&m, &q).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(make_model(Family::Exponential { rate: 0.0 }).is_err());
        assert!(make_model(Family::Weibull {
            shape: -1.0,
            scale: 1.0
        })
        .is_err());
        assert!(make_model(Family::Uniform { lo: 1.0, hi: 1.0 }).is_err());
        assert!(closed_form_relative_exponential(1.0, f64::NAN).is_err());
    }

    #[test]
    fn closed_form_exponential_values() {
        assert!((closed_form_relative_exponential(1.0, 2.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((closed_form_relative_exponential(2.0, 5.0).unwrap() - 9.0 / 28.0).abs() < 1e-15);
        assert_eq!(closed_form_relative_exponential(3.0, 3.0).unwrap(), 0.0);
        // Table captions round these to 0.0833 and 0.32143.
        assert!((closed_form_relative_exponential(1.0, 2.0).unwrap() - 0.0833).abs() < 5e-5);
        assert!((closed_form_relative_exponential(2.0, 5.0).unwrap() - 0.32143).abs() < 5e-6);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for fam in [
            Family::Exponential { rate: 1.7 },
            Family::Weibull { shape: 2.0, scale: 3.0 },
            Family::Uniform { lo: -1.0, hi: 4.0 },
            Family::ConstantReversedHazard {
                a: 1.0,
                b: 2.0,
                include_atom: true,
            },
        ] {
            let m = make_model(fam).unwrap();
            for i in 1..=9 {
                let u = i as f64 / 10.0;
                if u <= m.atom_at_lo() {
                    // Inside the atom the quantile is the left end.
                    assert_eq!(fam.quantile(u), m.support().lo);
                    continue;
                }
                assert!((m.cdf(fam.quantile(u)) - u).abs() < 1e-12, "{fam} u={u}");
            }
        }
    }

    #[test]
    fn family_strings_round_trip() {
        for s in ["exp:2", "weibull:1.5,2", "crh:1,2", "crh:1,2,atom", "uniform:0,1"] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("gamma:1".parse::<Family>().is_err());
        assert!("exp:1,2".parse::<Family>().is_err());
        assert!("exp:-1".parse::<Family>().is_err());
        assert!("exp:1,atom".parse::<Family>().is_err());
    }

    #[test]
    fn same_seed_same_batch() {
        let f = Family::Weibull { shape: 2.0, scale: 3.0 };
        let a = sample(f, 50, &mut SeededSampler::new(7)).unwrap();
        let b = sample(f, 50, &mut SeededSampler::new(7)).unwrap();
        assert_eq!(a, b);
        let c = sample(f, 50, &mut SeededSampler::substream(7, 1)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exponential_sample_mean() {
        let n = 100_000;
        let s = sample(Family::Exponential { rate: 1.0 }, n, &mut SeededSampler::new(2024)).unwrap();
        let mean = s.values().iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn weibull_sample_ecdf_close_to_cdf() {
        let fam = Family::Weibull { shape: 2.0, scale: 3.0 };
        let m = make_model(fam).unwrap();
        let n = 100_000;
        let s = sample(fam, n, &mut SeededSampler::new(99)).unwrap();
        let mut sup: f64 = 0.0;
        for (i, &x) in s.values().iter().enumerate() {
            let f = m.cdf(x);
            sup = sup
                .max((f - i as f64 / n as f64).abs())
                .max((f - (i + 1) as f64 / n as f64).abs());
        }
        assert!(sup < 0.01, "KS distance {sup}");
    }

    #[test]
    fn crh_same_parameters_zero_relative() {
        let x = ConstantReversedHazard::new(1.3, 2.0, false).unwrap();
        for conv in [AtomConvention::Ac, AtomConvention::Paper] {
            let r = crh_past_measures(&x, &x, 1.0, conv).unwrap();
            assert!(r.past_relative.abs() < 1e-15);
            assert!(r.past_divergence.abs() < 1e-15);
        }
    }

    #[test]
    fn crh_unit_bracket_convention() {
        let (a, t) = (1.0f64, 1.0f64);
        let x = ConstantReversedHazard::new(a, 2.0, true).unwrap();
        let r = crh_past_measures(&x, &x, t, AtomConvention::Paper).unwrap();
        let printed = 1.0 / (-2.0 * (2.0 * a * t).exp()) * (1.0 + a / 2.0 * ((2.0 * a * t).exp() - 1.0));
        assert!((r.past_extropy_x - printed).abs() < 1e-15);
    }

    #[test]
    fn crh_out_of_range_time() {
        let x = ConstantReversedHazard::new(1.0, 2.0, false).unwrap();
        let y = ConstantReversedHazard::new(0.5, 1.5, false).unwrap();
        assert!(crh_past_measures(&x, &y, 0.0, AtomConvention::Ac).is_err());
        assert!(crh_past_measures(&x, &y, 1.6, AtomConvention::Ac).is_err());
    }
}
