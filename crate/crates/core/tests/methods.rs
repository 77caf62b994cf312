use blasius_tm::itm::{solve_iterative, ItmConfig};
use blasius_tm::model::{bc_residuals, ExtendedParams};
use blasius_tm::nitm::solve_noniterative;
use blasius_tm::ode::{integrate, IntegratorConfig, RkOrder};
use blasius_tm::report::{emit_to_vec, sweep_missing_ic, sweep_table, Format, SweepSpec};
use proptest::prelude::*;

fn cfg() -> IntegratorConfig<f64> {
    IntegratorConfig::new(1e-3, 10.0, RkOrder::Eight).unwrap()
}

#[test]
fn integration_is_deterministic() {
    let a = integrate(blasius_tm::model::field, [0.0, 0.3, 1.0], &cfg()).unwrap();
    let b = integrate(blasius_tm::model::field, [0.0, 0.3, 1.0], &cfg()).unwrap();
    assert_eq!(a, b);
    assert!((a.end() - 10.0).abs() <= 10.0 * 1e-12);
}

#[test]
fn topfer_far_field_velocity() {
    let cfg = IntegratorConfig::new(1e-4, 10.0, RkOrder::Eight).unwrap();
    let t = integrate(blasius_tm::model::field, [0.0, 0.0, 1.0], &cfg).unwrap();
    // f*'(∞) = λ² with λ = f''(0)^(-1/3) of the classic solution
    let expected = 0.469599988361f64.powf(-2.0 / 3.0);
    assert!((t.last()[1] - expected).abs() < 1e-6);
    assert!((t.last()[1] - 1.65519).abs() < 1e-5);
    // second integrator at half the step
    let half = IntegratorConfig::new(2e-4, 10.0, RkOrder::Four).unwrap();
    let h = integrate(blasius_tm::model::field, [0.0, 0.0, 1.0], &half).unwrap();
    assert!((h.last()[1] - t.last()[1]).abs() < 1e-9);
}

#[test]
fn single_precision_pipeline() {
    let cfg = IntegratorConfig::<f32>::new(1e-2, 10.0, RkOrder::Eight).unwrap();
    let r = solve_noniterative(0.0f32, 0.0, &cfg).unwrap();
    assert!((r.missing_ic - 0.4696).abs() < 1e-4, "{}", r.missing_ic);
    let p = ExtendedParams::new(0.5f32, 0.0).unwrap();
    let sol = solve_iterative(&p, &ItmConfig::default(), &cfg).unwrap();
    assert!((sol.missing_ic - 0.32875).abs() < 1e-3);
}

#[test]
fn sweep_output_is_reproducible() {
    let spec = SweepSpec {
        p2_values: vec![0.0, 2.0],
        p1_grid: vec![-0.1, 0.2, 0.6],
        itm: ItmConfig::default(),
        integrator: cfg(),
    };
    let a = emit_to_vec(&sweep_table(&sweep_missing_ic(&spec).unwrap()), Format::Csv);
    let b = emit_to_vec(&sweep_table(&sweep_missing_ic(&spec).unwrap()), Format::Csv);
    assert_eq!(a, b);
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    // The iterative method run on the parameters a non-iterative solve
    // produced recovers the same wall shear.
    #[test]
    fn iterative_recovers_noniterative(p1s in 0.0f64..1.5, p2s in 0.0f64..1.5) {
        let nitm = solve_noniterative(p1s, p2s, &cfg()).unwrap();
        prop_assert!(bc_residuals(&nitm.rescaled, &nitm.params).max_abs() < 1e-5);
        let itm = blasius_tm::report::solve_iterative_widening(&nitm.params, &ItmConfig::default(), &cfg()).unwrap();
        prop_assert!((itm.missing_ic - nitm.missing_ic).abs() < 1e-5);
    }
}
