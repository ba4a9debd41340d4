use extropy::distributions::{
    crh_past_measures, AtomConvention, ConstantReversedHazard, Exponential, Uniform, Weibull,
};
use extropy::dynamic::*;
use extropy::{extropy as static_extropy, make_model, DistributionModel, Family, QuadratureSpec};

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn exp(rate: f64) -> Exponential {
    Exponential::new(rate).unwrap()
}

fn weibull(shape: f64, scale: f64) -> Weibull {
    Weibull::new(shape, scale).unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

fn weibull_pdf(k: f64, l: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (k / l) * (x / l).powf(k - 1.0) * (-(x / l).powf(k)).exp()
}

#[test]
fn exponential_residual_measures_are_memoryless() {
    let (x, y) = (exp(1.0), exp(2.0));
    for t in [0.0, 0.3, 1.0, 2.5, 6.0] {
        let d = residual_relative(&x, &y, t, &q()).unwrap().value;
        assert!((d - 1.0 / 12.0).abs() < 1e-8, "t={t} d={d}");
        let xi = residual_inaccuracy(&x, &y, t, &q()).unwrap().value;
        assert!((xi + 1.0 / 3.0).abs() < 1e-8);
        let jr = residual_divergence(&x, &y, t, &q()).unwrap().value;
        assert!((jr + 1.0 / 12.0).abs() < 1e-8);
        let jt = residual_extropy(&x, t, &q()).unwrap().value;
        assert!((jt + 0.25).abs() < 1e-8);
    }
}

#[test]
fn identical_inputs_give_zero() {
    let w = weibull(2.0, 1.0);
    for t in [0.2, 0.7, 1.5] {
        assert!(residual_relative(&w, &w, t, &q()).unwrap().value.abs() < 1e-12);
        assert!(past_relative(&w, &w, t, &q()).unwrap().value.abs() < 1e-12);
        assert!(residual_divergence(&w, &w, t, &q()).unwrap().value.abs() < 1e-12);
        assert!(past_divergence(&w, &w, t, &q()).unwrap().value.abs() < 1e-12);
    }
}

#[test]
fn uniform_examples() {
    let u1 = Uniform::new(0.0, 1.0).unwrap();
    let u2 = Uniform::new(0.0, 2.0).unwrap();
    let xi = residual_inaccuracy(&u1, &u1, 0.5, &q()).unwrap().value;
    assert!((xi + 1.0).abs() < 1e-10);
    assert!(past_relative(&u1, &u2, 0.5, &q()).unwrap().value.abs() < 1e-10);
}

#[test]
fn residual_relative_matches_simpson_oracle() {
    let (x, y) = (exp(1.0), weibull(2.0, 1.0));
    let t: f64 = 0.3;
    let (sx, sy) = ((-t).exp(), (-(t * t)).exp());
    let oracle = 0.5
        * simpson(
            |u| {
                let d = (-u).exp() / sx - weibull_pdf(2.0, 1.0, u) / sy;
                d * d
            },
            t,
            40.0,
            400_000,
        );
    let v = residual_relative(&x, &y, t, &q()).unwrap().value;
    assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
}

#[test]
fn past_relative_matches_simpson_oracle() {
    let (x, y) = (exp(1.0), exp(2.0));
    let t = 1.0;
    let (fx, fy) = (1.0 - (-1.0f64).exp(), 1.0 - (-2.0f64).exp());
    let oracle = 0.5
        * simpson(
            |u| {
                let d = (-u).exp() / fx - 2.0 * (-2.0 * u).exp() / fy;
                d * d
            },
            0.0,
            t,
            20_000,
        );
    let v = past_relative(&x, &y, t, &q()).unwrap().value;
    assert!((v - oracle).abs() < 1e-10);
}

#[test]
fn past_divergence_matches_simpson_oracle() {
    let (x, y) = (Uniform::new(0.0, 1.0).unwrap(), exp(1.0));
    let t: f64 = 0.5;
    let fy = 1.0 - (-t).exp();
    let oracle = 0.5 * simpson(|u| (1.0 / t - (-u).exp() / fy) / t, 0.0, t, 20_000);
    let v = past_divergence(&x, &y, t, &q()).unwrap().value;
    assert!((v - oracle).abs() < 1e-10);
}

#[test]
fn denominators_are_guarded() {
    let u = Uniform::new(0.0, 1.0).unwrap();
    assert!(matches!(
        residual_relative(&u, &u, 1.0, &q()),
        Err(extropy::Error::DenominatorUnderflow { .. })
    ));
    assert!(matches!(
        past_relative(&u, &u, 0.0, &q()),
        Err(extropy::Error::DenominatorUnderflow { .. })
    ));
}

#[test]
fn boundary_values_match_static_measures() {
    let w = weibull(1.5, 2.0);
    let s = static_extropy(&w, &q()).unwrap().value;
    assert!((residual_extropy(&w, 0.0, &q()).unwrap().value - s).abs() < 1e-9);
    // Past extropy tends to the static value as t grows.
    let late = past_extropy(&w, 30.0, &q()).unwrap().value;
    assert!((late - s).abs() < 1e-4);
}

#[test]
fn crh_closed_forms_match_quadrature() {
    let x = ConstantReversedHazard::new(1.0, 2.0, false).unwrap();
    let y = ConstantReversedHazard::new(0.5, 2.0, false).unwrap();
    let t = 1.0;
    let closed = crh_past_measures(&x, &y, t, AtomConvention::Ac).unwrap();
    assert!((closed.past_extropy_x - past_extropy(&x, t, &q()).unwrap().value).abs() < 1e-8);
    assert!((closed.past_inaccuracy - past_inaccuracy(&x, &y, t, &q()).unwrap().value).abs() < 1e-8);
    assert!((closed.past_divergence - past_divergence(&x, &y, t, &q()).unwrap().value).abs() < 1e-8);
    assert!((closed.past_relative - past_relative(&x, &y, t, &q()).unwrap().value).abs() < 1e-8);
    let (a, c) = (1.0f64, 0.5f64);
    let expected = -(a * c / (2.0 * (a + c))) * (1.0 - (-(a + c) * t).exp());
    assert!((closed.past_inaccuracy - expected).abs() < 1e-12);
}

#[test]
fn hazard_representation_constant_hazard() {
    let (lambda, mu) = (1.0, 2.0);
    for t in [0.0, 0.5, 2.0] {
        let xi = hazard_repr_inaccuracy(lambda, &|_: f64| mu, t, &q()).unwrap();
        assert!((xi + lambda * mu / (2.0 * (lambda + mu))).abs() < 1e-8, "t={t} {xi}");
        let d = hazard_repr_relative(lambda, &|_: f64| mu, t, &q()).unwrap();
        let closed = 0.25 * (lambda + mu - 4.0 * lambda * mu / (lambda + mu));
        assert!((d - closed).abs() < 1e-8);
    }
    assert!(hazard_repr_relative(1.5, &|_: f64| 1.5, 0.7, &q()).unwrap().abs() < 1e-8);
}

#[test]
fn hazard_representation_weibull_hazard() {
    let (x, y) = (exp(1.0), weibull(2.0, 1.0));
    let h = |u: f64| y.hazard(u);
    for t in [0.0, 0.4, 1.2] {
        let direct = residual_inaccuracy(&x, &y, t, &q()).unwrap().value;
        let rebuilt = hazard_repr_inaccuracy(1.0, &h, t, &q()).unwrap();
        assert!((direct - rebuilt).abs() < 1e-4, "t={t}");
        let direct = residual_relative(&x, &y, t, &q()).unwrap().value;
        let rebuilt = hazard_repr_relative(1.0, &h, t, &q()).unwrap();
        assert!((direct - rebuilt).abs() < 1e-4, "t={t}");
    }
}

#[test]
fn exponential_ode_residuals_are_tiny() {
    let grid = TimeGrid::linspace(0.0, 3.0, 10).unwrap();
    let v = ode_check_relative(&exp(1.0), &exp(2.0), &grid, &q()).unwrap();
    assert!(v.max_abs_residual <= 1e-6, "{}", v.max_abs_residual);
    let v = ode_check_divergence(&exp(1.0), &exp(2.0), &grid, &q()).unwrap();
    assert!(v.max_abs_residual <= 1e-6, "{}", v.max_abs_residual);
}

#[test]
fn ode_holds_for_weibull_pairs() {
    let grid = TimeGrid::linspace(0.1, 2.0, 10).unwrap();
    let v = ode_check_relative(&exp(1.0), &weibull(2.0, 1.0), &grid, &q()).unwrap();
    assert!(v.holds, "{}", v.max_abs_residual);
    let v = ode_check_divergence(&weibull(1.5, 2.0), &weibull(2.0, 3.0), &grid, &q()).unwrap();
    assert!(v.holds, "{}", v.max_abs_residual);
}

#[test]
fn printed_ode_form_is_off_by_twice_the_hazard_product() {
    let grid = TimeGrid::linspace(0.0, 2.0, 5).unwrap();
    let v = ode_check_relative_with(&exp(1.0), &exp(2.0), &grid, OdeForm::AsPrinted, &q()).unwrap();
    assert!(!v.holds);
    assert!((v.max_abs_residual - 4.0).abs() < 1e-6);
}

#[test]
fn bounds_for_exponential_pair() {
    let grid = TimeGrid::linspace(0.0, 2.0, 8).unwrap();
    let hyp = BoundHypotheses {
        nondecreasing_relative: true,
        hazard_ordered_dfr: false,
    };
    let verdicts = bound_checks(&exp(1.0), &exp(2.0), &grid, hyp, &q()).unwrap();
    let lower = &verdicts[0];
    assert!(lower.holds);
    assert!(!lower.hypothesis.as_ref().unwrap().not_met());
    // h_X = 1 < h_Y = 2, so X <=_hr Y fails and the declared premise would
    // not be met.
    let log_bound = &verdicts[1];
    assert!(log_bound.holds);
    assert!(!log_bound.hypothesis.as_ref().unwrap().met);
    assert!(verdicts[2].holds);

    let same = bound_checks(&exp(1.0), &exp(1.0), &grid, hyp, &q()).unwrap();
    assert!(same[0].holds);
}

#[test]
fn equality_case_forward_direction() {
    let (x, y) = (weibull(1.5, 2.0), exp(1.0));
    let grid = TimeGrid::linspace(0.2, 2.0, 10).unwrap();
    let constructed = |t: f64| 0.7 / (x.survival(t) * y.survival(t));
    assert!(equality_case_check(&x, &y, &grid, constructed).unwrap().holds);
    let actual = |t: f64| residual_relative(&x, &y, t, &q()).unwrap().value;
    assert!(!equality_case_check(&x, &y, &grid, actual).unwrap().holds);
}

#[test]
fn constancy_characterization() {
    let grid = TimeGrid::linspace(0.0, 3.0, 10).unwrap();
    let xi = series(DynamicMeasure::ResidualInaccuracy, &exp(1.0), &exp(2.0), &grid, &q()).unwrap();
    assert!(constancy_detector(&xi, 1e-6).unwrap());
    let xi = series(
        DynamicMeasure::ResidualInaccuracy,
        &exp(1.0),
        &weibull(2.0, 1.0),
        &grid,
        &q(),
    )
    .unwrap();
    assert!(!constancy_detector(&xi, 1e-3).unwrap());
    assert!(constancy_detector(&[(0.0, 1.0), (1.0, 1.0), (2.0, 1.0)], 0.0).unwrap());
    assert!(constancy_detector(&[(0.0, 1.0), (1.0, 1.0)], 0.0).is_err());
}

#[test]
fn orderings() {
    let grid = TimeGrid::linspace(0.2, 2.0, 6).unwrap();
    let o = dynamic_orderings(&exp(1.0), &exp(2.0), &grid, &q()).unwrap();
    // h_X = 1 <= h_Y = 2 means Y <=_hr X.
    assert_eq!(o.hr, Order::Greater);
    assert!(o.rex_red_reversed && o.pex_ped_reversed);

    let w = weibull(2.0, 1.0);
    let o = dynamic_orderings(&w, &w, &grid, &q()).unwrap();
    assert_eq!(
        (o.hr, o.rh, o.rex, o.red, o.pex, o.ped),
        (
            Order::Equal,
            Order::Equal,
            Order::Equal,
            Order::Equal,
            Order::Equal,
            Order::Equal
        )
    );

    let o = dynamic_orderings(&weibull(1.5, 2.0), &weibull(2.0, 3.0), &grid, &q()).unwrap();
    assert!(o.rex_red_reversed && o.pex_ped_reversed);
}

#[test]
fn global_decompositions_hold() {
    for (x, y, t) in [
        (
            make_model(Family::Exponential { rate: 1.0 }).unwrap(),
            make_model(Family::Exponential { rate: 2.0 }).unwrap(),
            0.5,
        ),
        (
            make_model(Family::Weibull { shape: 1.5, scale: 2.0 }).unwrap(),
            make_model(Family::Exponential { rate: 1.0 }).unwrap(),
            1.0,
        ),
        (
            make_model(Family::Weibull { shape: 2.0, scale: 1.0 }).unwrap(),
            make_model(Family::Weibull { shape: 2.0, scale: 1.0 }).unwrap(),
            0.8,
        ),
    ] {
        let v = global_decompositions(&x, &y, t, &q()).unwrap();
        assert!(v.max_abs_residual < 1e-8, "{v:?}");
    }
}

#[test]
fn decreasing_densities_with_larger_y_hazard_need_not_increase() {
    // Both densities strictly decrease and h_Y > h_X on the grid, yet d_r is
    // flat for two exponentials and falls for this Weibull pair.
    let grid = TimeGrid::linspace(0.5, 3.0, 8).unwrap();
    let flat = series(DynamicMeasure::ResidualRelative, &exp(1.0), &exp(2.0), &grid, &q()).unwrap();
    assert!(constancy_detector(&flat, 1e-8).unwrap());

    let (x, y) = (exp(0.5), weibull(0.8, 1.0));
    assert!(grid.points().iter().all(|&t| y.hazard(t) > x.hazard(t)));
    let s = series(DynamicMeasure::ResidualRelative, &x, &y, &grid, &q()).unwrap();
    assert!(s.windows(2).all(|w| w[1].1 < w[0].1), "{s:?}");

    // The slope is what the differential identity predicts.
    let v = ode_check_relative(&x, &y, &grid, &q()).unwrap();
    assert!(v.holds);
}

#[test]
fn grid_validation() {
    assert!(TimeGrid::new(vec![]).is_err());
    assert!(TimeGrid::new(vec![1.0, 1.0]).is_err());
    assert!(TimeGrid::new(vec![0.0, f64::NAN]).is_err());
    let g = TimeGrid::linspace(0.0, 2.0, 5).unwrap();
    assert!((g.fd_step() - 2e-4).abs() < 1e-15);
}
