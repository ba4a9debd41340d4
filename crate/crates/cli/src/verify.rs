//! The identity, ODE, bound and ordering checks run by `extropy verify`.

use extropy::dynamic::{
    bound_checks, constancy_verdict, dynamic_orderings, global_decompositions, ode_check_divergence,
    ode_check_relative, past_divergence, past_relative, residual_divergence, residual_relative, BoundHypotheses,
    DynamicMeasure, DynamicOrdering, DynamicVerdict, PointCheck, TimeGrid, VerdictKind,
};
use extropy::measures::decompose_relative;
use extropy::{DistributionModel, QuadratureSpec};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub verdicts: Vec<DynamicVerdict>,
    /// Informational: whether the residual inaccuracy is constant on the grid.
    pub residual_inaccuracy_constancy: DynamicVerdict,
    pub orderings: DynamicOrdering,
    pub failed: Vec<String>,
    pub hypotheses_not_met: Vec<String>,
}

impl VerifyReport {
    /// `Err` with the exit-code-carrying error when checks failed or a
    /// declared premise did not hold.
    pub fn outcome(&self) -> Result<()> {
        if !self.failed.is_empty() {
            Err(CliError::ChecksFailed(self.failed.clone()))
        } else if !self.hypotheses_not_met.is_empty() {
            Err(CliError::HypothesisNotMet(self.hypotheses_not_met.clone()))
        } else {
            Ok(())
        }
    }
}

fn sum_rule<X, Y>(x: &X, y: &Y, grid: &TimeGrid, residual: bool, q: &QuadratureSpec) -> Result<DynamicVerdict>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let points = grid
        .points()
        .par_iter()
        .map(|&t| {
            let (d, fg, gf) = if residual {
                (
                    residual_relative(x, y, t, q)?.value,
                    residual_divergence(x, y, t, q)?.value,
                    residual_divergence(y, x, t, q)?.value,
                )
            } else {
                (
                    past_relative(x, y, t, q)?.value,
                    past_divergence(x, y, t, q)?.value,
                    past_divergence(y, x, t, q)?.value,
                )
            };
            Ok(PointCheck {
                t,
                lhs: d,
                rhs: fg + gf,
            })
        })
        .collect::<extropy::Result<Vec<_>>>()?;
    let label = if residual { "residual_sum_rule" } else { "past_sum_rule" };
    Ok(DynamicVerdict::equality(
        VerdictKind::Decomposition,
        label,
        10.0 * q.abs_tol,
        points,
    ))
}

pub fn run_verify<X, Y>(
    x: &X,
    y: &Y,
    grid: &TimeGrid,
    hypotheses: BoundHypotheses,
    q: &QuadratureSpec,
) -> Result<VerifyReport>
where
    X: DistributionModel + ?Sized,
    Y: DistributionModel + ?Sized,
{
    let split = decompose_relative(x, y, q)?;
    let static_split = DynamicVerdict::equality(
        VerdictKind::Decomposition,
        "static_split",
        10.0 * q.abs_tol,
        vec![PointCheck {
            t: 0.0,
            lhs: split.relative,
            rhs: split.divergence_fg + split.divergence_gf,
        }],
    );
    let mut verdicts = vec![
        static_split,
        sum_rule(x, y, grid, true, q)?,
        sum_rule(x, y, grid, false, q)?,
        ode_check_relative(x, y, grid, q)?,
        ode_check_divergence(x, y, grid, q)?,
    ];
    let mut decomposition_points = Vec::new();
    for &t in grid.points() {
        decomposition_points.extend(global_decompositions(x, y, t, q)?.per_point);
    }
    verdicts.push(DynamicVerdict::equality(
        VerdictKind::Decomposition,
        "global_decompositions",
        10.0 * q.abs_tol,
        decomposition_points,
    ));
    verdicts.extend(bound_checks(x, y, grid, hypotheses, q)?);

    let orderings = dynamic_orderings(x, y, grid, q)?;
    let constancy = constancy_verdict(DynamicMeasure::ResidualInaccuracy, x, y, grid, 1e-6, q)?;

    let mut failed = Vec::new();
    let mut hypotheses_not_met = Vec::new();
    for v in &verdicts {
        match &v.hypothesis {
            Some(h) => {
                if h.not_met() {
                    hypotheses_not_met.push(v.label.clone());
                } else if h.met && !v.holds {
                    failed.push(v.label.clone());
                }
            }
            None if !v.holds => failed.push(v.label.clone()),
            None => {}
        }
    }
    if !orderings.rex_red_reversed {
        failed.push("rex_red_equivalence".into());
    }
    if !orderings.pex_ped_reversed {
        failed.push("pex_ped_equivalence".into());
    }
    Ok(VerifyReport {
        verdicts,
        residual_inaccuracy_constancy: constancy,
        orderings,
        failed,
        hypotheses_not_met,
    })
}
