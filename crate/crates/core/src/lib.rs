//! Extropy-based information measures between lifetime distributions.
//!
//! | module | contents |
//! |---|---|
//! | [`measures`] | extropy `J`, inaccuracy `ξJ`, divergence `J(f\|g)`, relative extropy `d` |
//! | [`dynamic`] | residual and past forms, their ODEs, bounds, orderings, decompositions |
//! | [`distributions`] | exponential, Weibull, constant reversed hazard, uniform; seeded sampling |
//! | [`estimation`] | Gaussian KDE, Sheather–Jones bandwidth, `d̂(f,g)`, Monte-Carlo bias/MSE |
//! | [`quadrature`] | adaptive Gauss–Kronrod integration with tail truncation |
//!
//! ```
//! use extropy::{make_model, relative_extropy, Family, QuadratureSpec};
//!
//! let x = make_model(Family::Exponential { rate: 1.0 })?;
//! let y = make_model(Family::Exponential { rate: 2.0 })?;
//! let d = relative_extropy(&x, &y, &QuadratureSpec::default())?;
//! assert!((d.value - 1.0 / 12.0).abs() < 1e-8);
//! # Ok::<(), extropy::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN takes the error path.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distributions;
pub mod dynamic;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod model;
pub mod quadrature;

pub use distributions::{make_model, sample, AtomConvention, Family, Model, SeededSampler};
pub use dynamic::{DynamicMeasure, DynamicVerdict, TimeGrid};
pub use error::{Error, Result};
pub use estimation::{estimate_relative_extropy, KdeModel, SampleBatch};
pub use measures::{extropy, extropy_divergence, extropy_inaccuracy, relative_extropy, MeasureId, MeasureReport};
pub use model::{DistributionModel, Support};
pub use quadrature::{QuadratureSpec, TailRule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/dynamic.md")]
    mod dynamic {}
    #[doc = include_str!("../../../book/src/distributions.md")]
    mod distributions {}
    #[doc = include_str!("../../../book/src/estimation.md")]
    mod estimation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
