//! Static extropy measures: extropy, extropy inaccuracy, relative extropy and
//! the directed extropy divergences, plus the split identity, the small
//! perturbation approximation and the extropy / divergence orderings.
//!
//! With `f`, `g` the densities of `X`, `Y`:
//!
//! | measure | value |
//! |---|---|
//! | [`extropy`] `J(X)` | `−½∫f²` |
//! | [`extropy_inaccuracy`] `ξJ(X,Y)` | `−½∫fg` |
//! | [`relative_extropy`] `d(f,g)` | `½∫(f−g)²` |
//! | [`extropy_divergence`] `J(f|g)` | `½∫(f−g)f` |
//!
//! and `d(f,g) = J(f|g) + J(g|f) = 2ξJ(X,Y) − J(X) − J(Y)`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distributions::{make_model, Family};
use crate::error::{Error, Result};
use crate::model::{checked_pdf, truncation_point, DistributionModel};
use crate::quadrature::{integrate, Integral, QuadratureSpec};

/// Which measure a [`MeasureReport`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureId {
    Extropy,
    Inaccuracy,
    Relative,
    DivergenceFg,
    DivergenceGf,
    ResidualExtropy,
    ResidualInaccuracy,
    ResidualRelative,
    ResidualDivergence,
    PastExtropy,
    PastInaccuracy,
    PastRelative,
    PastDivergence,
}

/// Quadrature diagnostics attached to every computed measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub error_estimate: f64,
    /// Finite point that replaced an unbounded upper limit, if any.
    pub truncation: Option<f64>,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: MeasureId,
    pub value: f64,
    pub t: Option<f64>,
    pub diagnostics: Diagnostics,
    /// Set when the supports do not overlap, so the value is exactly zero.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub disjoint_supports: bool,
}

impl MeasureReport {
    pub(crate) fn new(
        measure: MeasureId,
        value: f64,
        t: Option<f64>,
        integral: Integral,
        truncation: Option<f64>,
    ) -> Self {
        Self {
            measure,
            value,
            t,
            diagnostics: Diagnostics {
                error_estimate: integral.error,
                truncation,
                subdivisions: integral.subdivisions,
            },
            disjoint_supports: false,
        }
    }
}

/// Integration window: the whole support, the residual part `[t, ∞)` or the
/// past part `[lo, t]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Window {
    Whole,
    Residual(f64),
    Past(f64),
}

/// Integrates `integrand` over `window`, intersected with the union of the
/// supports of `models`.
pub(crate) fn window_integral<F>(
    models: &[&dyn DistributionModel],
    window: Window,
    q: &QuadratureSpec,
    integrand: F,
) -> Result<(Integral, Option<f64>)>
where
    F: Fn(f64) -> f64,
{
    let lo_union = models.iter().map(|m| m.support().lo).fold(f64::INFINITY, f64::min);
    let hi_union = models.iter().map(|m| m.support().hi).fold(f64::NEG_INFINITY, f64::max);
    let mut breaks: Vec<f64> = Vec::new();
    for m in models {
        let s = m.support();
        breaks.push(s.lo);
        if s.is_bounded() {
            breaks.push(s.hi);
        }
        breaks.extend(m.breakpoints());
    }
    let (lo, hi, truncation) = match window {
        Window::Past(t) => (lo_union, t.min(hi_union), None),
        Window::Whole | Window::Residual(_) => {
            let from = match window {
                Window::Residual(t) => t.max(lo_union),
                _ => lo_union,
            };
            let hi = truncation_point(models, from, q)?;
            let trunc = (!hi_union.is_finite()).then_some(hi);
            (from, hi, trunc)
        }
    };
    let integral = integrate(integrand, lo, hi, &breaks, q)?;
    Ok((integral, truncation))
}

fn pdf_of<'a, M: DistributionModel + ?Sized>(m: &'a M) -> impl Fn(f64) -> f64 + 'a {
    move |x| checked_pdf(m, x)
}

fn invalid_model(e: Error, which: &str) -> Error {
    match e {
        Error::InvalidModel(msg) => Error::InvalidModel(format!("{which}: {msg}")),
        other => other,
    }
}

/// `J(X) = −½∫f²`.
pub fn extropy<M: DistributionModel + ?Sized>(d: &M, q: &QuadratureSpec) -> Result<MeasureReport> {
    let f = pdf_of(d);
    let (i, trunc) = window_integral(&[&d], Window::Whole, q, |x| {
        let v = f(x);
        v * v
    })
    .map_err(|e| invalid_model(e, "X"))?;
    Ok(MeasureReport::new(MeasureId::Extropy, -0.5 * i.value, None, i, trunc))
}

fn supports_overlap<X, Y>(x: &X, y: &Y) -> bool
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let (a, b) = (x.support(), y.support());
    a.lo.max(b.lo) < a.hi.min(b.hi)
}

/// `ξJ(X,Y) = −½∫fg`. Disjoint supports give exactly zero with
/// [`MeasureReport::disjoint_supports`] set.
pub fn extropy_inaccuracy<X, Y>(x: &X, y: &Y, q: &QuadratureSpec) -> Result<MeasureReport>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    if !supports_overlap(x, y) {
        q.validate()?;
        let mut r = MeasureReport::new(MeasureId::Inaccuracy, 0.0, None, Integral::ZERO, None);
        r.disjoint_supports = true;
        return Ok(r);
    }
    let (f, g) = (pdf_of(x), pdf_of(y));
    let (i, trunc) = window_integral(&[&x, &y], Window::Whole, q, |t| f(t) * g(t))?;
    Ok(MeasureReport::new(
        MeasureId::Inaccuracy,
        -0.5 * i.value,
        None,
        i,
        trunc,
    ))
}

/// `d(f,g) = ½∫(f−g)²`, symmetric and nonnegative.
pub fn relative_extropy<X, Y>(x: &X, y: &Y, q: &QuadratureSpec) -> Result<MeasureReport>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let (f, g) = (pdf_of(x), pdf_of(y));
    let (i, trunc) = window_integral(&[&x, &y], Window::Whole, q, |t| {
        let diff = f(t) - g(t);
        diff * diff
    })?;
    Ok(MeasureReport::new(MeasureId::Relative, 0.5 * i.value, None, i, trunc))
}

/// Directed divergence `J(f|g) = ½∫(f−g)f`; may be negative.
pub fn extropy_divergence<X, Y>(x: &X, y: &Y, q: &QuadratureSpec) -> Result<MeasureReport>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let (f, g) = (pdf_of(x), pdf_of(y));
    let (i, trunc) = window_integral(&[&x, &y], Window::Whole, q, |t| {
        let fv = f(t);
        (fv - g(t)) * fv
    })?;
    Ok(MeasureReport::new(
        MeasureId::DivergenceFg,
        0.5 * i.value,
        None,
        i,
        trunc,
    ))
}

/// The two directed divergences and the relative extropy they sum to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeSplit {
    pub divergence_fg: f64,
    pub divergence_gf: f64,
    pub relative: f64,
}

impl RelativeSplit {
    /// `J(f|g) + J(g|f) − d(f,g)`, zero up to quadrature error.
    pub fn residual(&self) -> f64 {
        self.divergence_fg + self.divergence_gf - self.relative
    }
}

/// Computes `J(f|g)`, `J(g|f)` and `d(f,g)` by three independent integrals.
pub fn decompose_relative<X, Y>(x: &X, y: &Y, q: &QuadratureSpec) -> Result<RelativeSplit>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    Ok(RelativeSplit {
        divergence_fg: extropy_divergence(x, y, q)?.value,
        divergence_gf: extropy_divergence(y, x, q)?.value,
        relative: relative_extropy(x, y, q)?.value,
    })
}

/// Parametric family whose density is perturbed in one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PerturbationFamily {
    /// Exponential with θ = rate.
    ExponentialRate,
    /// Weibull with θ = shape at a fixed scale.
    WeibullShape { scale: f64 },
    /// Weibull with θ = scale at a fixed shape.
    WeibullScale { shape: f64 },
}

impl PerturbationFamily {
    pub fn at(&self, theta: f64) -> Result<Family> {
        let fam = match *self {
            PerturbationFamily::ExponentialRate => Family::Exponential { rate: theta },
            PerturbationFamily::WeibullShape { scale } => Family::Weibull { shape: theta, scale },
            PerturbationFamily::WeibullScale { shape } => Family::Weibull { shape, scale: theta },
        };
        make_model(fam)?;
        Ok(fam)
    }
}

/// Which derivative enters the perturbation integral `(Δθ²/2)∫(∂f)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeReading {
    /// `∂f/∂θ`, the derivative the Taylor expansion in θ produces.
    #[default]
    Parameter,
    /// `∂f/∂x`, the literal derivative in the abscissa.
    Abscissa,
}

impl FromStr for DerivativeReading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "parameter" | "theta" => Ok(Self::Parameter),
            "abscissa" | "x" => Ok(Self::Abscissa),
            _ => Err(Error::InvalidParameter(format!("unknown derivative reading {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationQuery {
    pub family: PerturbationFamily,
    pub theta: f64,
    pub delta_theta: f64,
    /// Central-difference step; `None` uses `max(1e-5, 1e-5·|θ|)`.
    pub derivative_step: Option<f64>,
    pub reading: DerivativeReading,
}

impl PerturbationQuery {
    pub fn new(family: PerturbationFamily, theta: f64, delta_theta: f64) -> Self {
        Self {
            family,
            theta,
            delta_theta,
            derivative_step: None,
            reading: DerivativeReading::Parameter,
        }
    }

    pub fn step(&self) -> f64 {
        self.derivative_step.unwrap_or(1e-5f64.max(1e-5 * self.theta.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub approx: f64,
    pub exact: f64,
}

/// Second-order approximation of `d(f(·,θ), f(·,θ+Δθ))` next to the exact
/// relative extropy.
pub fn perturbation_approx(pq: &PerturbationQuery, q: &QuadratureSpec) -> Result<PerturbationResult> {
    let base = make_model(pq.family.at(pq.theta)?)?;
    let moved = make_model(pq.family.at(pq.theta + pq.delta_theta)?)?;
    if pq.delta_theta == 0.0 {
        return Ok(PerturbationResult {
            approx: 0.0,
            exact: 0.0,
        });
    }
    let h = pq.step();
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "derivative step must be positive, got {h}"
        )));
    }
    let exact = relative_extropy(&base, &moved, q)?.value;
    let (integral, _) = match pq.reading {
        DerivativeReading::Parameter => {
            let lo = make_model(pq.family.at(pq.theta - h)?)?;
            let hi = make_model(pq.family.at(pq.theta + h)?)?;
            window_integral(&[&base, &lo, &hi], Window::Whole, q, |x| {
                let d = (hi.pdf(x) - lo.pdf(x)) / (2.0 * h);
                d * d
            })?
        }
        DerivativeReading::Abscissa => {
            let s = base.support();
            window_integral(&[&base], Window::Whole, q, |x| {
                let (a, b) = ((x - h).max(s.lo), (x + h).min(s.hi));
                let d = (base.pdf(b) - base.pdf(a)) / (b - a);
                d * d
            })?
        }
    };
    let approx = 0.5 * pq.delta_theta * pq.delta_theta * integral.value;
    Ok(PerturbationResult { approx, exact })
}

/// Outcome of comparing `X` against `Y`: `Less` means `X` is the smaller one
/// in the named ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Less,
    Equal,
    Greater,
}

impl Relation {
    /// Relation of `a` to `b` with ties inside `tol`.
    pub fn of(a: f64, b: f64, tol: f64) -> Self {
        if (a - b).abs() <= tol {
            Relation::Equal
        } else if a < b {
            Relation::Less
        } else {
            Relation::Greater
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Relation::Less => Relation::Greater,
            Relation::Greater => Relation::Less,
            Relation::Equal => Relation::Equal,
        }
    }
}

/// Extropy ordering (`X ≤_ex Y` iff `J(X) ≤ J(Y)`) against extropy divergence
/// ordering (`X ≤_ed Y` iff `J(f|g) ≤ J(g|f)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaticOrdering {
    pub extropy_x: f64,
    pub extropy_y: f64,
    pub divergence_fg: f64,
    pub divergence_gf: f64,
    /// `X` relative to `Y` in the extropy ordering.
    pub extropy_order: Relation,
    /// `X` relative to `Y` in the extropy divergence ordering.
    pub divergence_order: Relation,
    /// `(J(f|g) − J(g|f)) − (J(Y) − J(X))`.
    pub identity_residual: f64,
    /// The two orderings are reversed images of each other.
    pub orderings_reversed: bool,
    /// A strict divergence ordering implies the larger side's divergence is
    /// positive; false only if that consequence is contradicted.
    pub positivity_consequence_holds: bool,
}

pub fn compare_static_ordering<X, Y>(x: &X, y: &Y, q: &QuadratureSpec) -> Result<StaticOrdering>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let jx = extropy(x, q)?.value;
    let jy = extropy(y, q)?.value;
    let split = decompose_relative(x, y, q)?;
    let tol = 100.0 * q.abs_tol;
    let extropy_order = Relation::of(jx, jy, tol);
    let divergence_order = Relation::of(split.divergence_fg, split.divergence_gf, tol);
    let positivity_consequence_holds = match divergence_order {
        Relation::Greater => split.divergence_fg > -tol,
        Relation::Less => split.divergence_gf > -tol,
        Relation::Equal => true,
    };
    Ok(StaticOrdering {
        extropy_x: jx,
        extropy_y: jy,
        divergence_fg: split.divergence_fg,
        divergence_gf: split.divergence_gf,
        extropy_order,
        divergence_order,
        identity_residual: (split.divergence_fg - split.divergence_gf) - (jy - jx),
        orderings_reversed: extropy_order == divergence_order.reversed(),
        positivity_consequence_holds,
    })
}
