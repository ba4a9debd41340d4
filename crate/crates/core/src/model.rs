//! The evaluable distribution interface every measure is computed from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec, TailRule};

/// Closed support interval `[lo, hi]`; `hi` may be `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}

/// A nonnegative continuous lifetime distribution, possibly with a point mass
/// at the left end of its support.
///
/// Implementors must be pure: every method is a function of its argument
/// only, so models can be shared across threads and evaluated concurrently.
pub trait DistributionModel: Send + Sync {
    /// Density of the absolutely continuous part.
    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    fn survival(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    /// `h(x) = f(x) / F̄(x)`.
    fn hazard(&self, x: f64) -> f64 {
        self.pdf(x) / self.survival(x)
    }

    /// `λ(x) = f(x) / F(x)`.
    fn reversed_hazard(&self, x: f64) -> f64 {
        self.pdf(x) / self.cdf(x)
    }

    fn support(&self) -> Support;

    /// Probability mass sitting at `support().lo`.
    fn atom_at_lo(&self) -> f64 {
        0.0
    }

    /// Interior abscissae where the density is not smooth or changes
    /// character (modes, kinks). Used to seed quadrature subdivision.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<M: DistributionModel + ?Sized> DistributionModel for &M {
    fn pdf(&self, x: f64) -> f64 {
        (**self).pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        (**self).cdf(x)
    }
    fn survival(&self, x: f64) -> f64 {
        (**self).survival(x)
    }
    fn hazard(&self, x: f64) -> f64 {
        (**self).hazard(x)
    }
    fn reversed_hazard(&self, x: f64) -> f64 {
        (**self).reversed_hazard(x)
    }
    fn support(&self) -> Support {
        (**self).support()
    }
    fn atom_at_lo(&self) -> f64 {
        (**self).atom_at_lo()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// Density value checked for sign; negative or non-finite values are turned
/// into NaN so the integrator reports them.
pub(crate) fn checked_pdf<M: DistributionModel + ?Sized>(m: &M, x: f64) -> f64 {
    let s = m.support();
    if x < s.lo || x > s.hi {
        return 0.0;
    }
    let p = m.pdf(x);
    if p >= 0.0 && p.is_finite() {
        p
    } else {
        f64::NAN
    }
}

/// Finite upper limit standing in for the upper end of the union of the
/// supports, conditioned on survival past `from`.
///
/// Models with bounded support contribute their `hi`; for the others the
/// [`TailRule`] of `spec` decides.
pub fn truncation_point(models: &[&dyn DistributionModel], from: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut upper = f64::NEG_INFINITY;
    let mut unbounded = Vec::new();
    for m in models {
        let s = m.support();
        if s.is_bounded() {
            upper = upper.max(s.hi);
        } else {
            unbounded.push(*m);
        }
    }
    if unbounded.is_empty() {
        return Ok(upper);
    }
    match spec.tail {
        TailRule::Fixed(t) => Ok(upper.max(t)),
        TailRule::SurvivalBound => {
            let eps = spec.tail_epsilon();
            let base = from.max(
                unbounded
                    .iter()
                    .map(|m| m.support().lo)
                    .fold(f64::NEG_INFINITY, f64::max),
            );
            let scale = 1e-3 * (1.0 + base.abs());
            let mut width = scale;
            while width < 1e15 * scale {
                let x = base + width;
                let settled = unbounded.iter().all(|m| {
                    let s0 = m.survival(from.max(m.support().lo));
                    s0 > 0.0 && m.survival(x) <= eps * s0 && m.pdf(x) <= s0
                });
                if settled {
                    return Ok(upper.max(x));
                }
                width *= 2.0;
            }
            Err(Error::InvalidModel(
                "survival does not decay: no finite truncation point found".into(),
            ))
        }
    }
}

/// Checks the structural invariants of a model numerically: total mass,
/// `cdf(lo) = atom`, monotone cdf, `F̄ = 1 − F`, and the hazard identities
/// where denominators exceed the floor.
pub fn check_model<M: DistributionModel + ?Sized>(m: &M, spec: &QuadratureSpec) -> Result<()> {
    let s = m.support();
    let atom = m.atom_at_lo();
    if !(0.0..1.0).contains(&atom) {
        return Err(Error::InvalidModel(format!("atom at lo must be in [0, 1), got {atom}")));
    }
    let hi = truncation_point(&[&m as &dyn DistributionModel], s.lo, spec)?;
    let mut breaks = m.breakpoints();
    breaks.push(s.lo);
    let mass = integrate(|x| checked_pdf(m, x), s.lo, hi, &breaks, spec)?;
    let total = mass.value + atom;
    if (total - 1.0).abs() > 100.0 * spec.abs_tol.max(mass.error) {
        return Err(Error::InvalidModel(format!("total mass is {total}, expected 1")));
    }
    if (m.cdf(s.lo) - atom).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!(
            "cdf(lo) = {} differs from the atom {atom}",
            m.cdf(s.lo)
        )));
    }
    let mut prev = m.cdf(s.lo);
    let n = 200;
    for i in 1..=n {
        let x = s.lo + (hi - s.lo) * i as f64 / n as f64;
        let (f, cdf, sv) = (m.pdf(x), m.cdf(x), m.survival(x));
        if cdf + 1e-15 < prev {
            return Err(Error::InvalidModel(format!("cdf decreases at x = {x}")));
        }
        prev = cdf;
        if (sv - (1.0 - cdf)).abs() > 1e-12 {
            return Err(Error::InvalidModel(format!("survival != 1 - cdf at x = {x}")));
        }
        let eps = spec.denominator_floor;
        if sv > eps && (m.hazard(x) * sv - f).abs() > 1e-9 * (1.0 + f) {
            return Err(Error::InvalidModel(format!("hazard * survival != pdf at x = {x}")));
        }
        if cdf > eps && (m.reversed_hazard(x) * cdf - f).abs() > 1e-9 * (1.0 + f) {
            return Err(Error::InvalidModel(format!("reversed hazard * cdf != pdf at x = {x}")));
        }
    }
    Ok(())
}
