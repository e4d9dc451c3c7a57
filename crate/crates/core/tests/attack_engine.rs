mod common;

use proptest::prelude::*;
use semidiff_core::attack::{
    convergence_check, run_attack, run_gradient_baseline, AttackConfig, FeatureBounds, ProbeMode,
    StepMode, TargetDistance, Termination,
};
use semidiff_core::linalg::norm2;
use semidiff_core::victim::{ParamQpDims, ParametricQpModel};

use common::fixtures::{rate_fixture, single_point_quadratic};

#[test]
fn kink_attack_reaches_attainable_target() {
    let model = ParametricQpModel::projection_kink();
    let obj = TargetDistance::full(vec![1.0]);
    let cfg = AttackConfig {
        delta: 2.0,
        ..AttackConfig::default()
    };
    let trace = run_attack(&model, &obj, &[0.0], cfg).unwrap();
    assert!((trace.final_solution.y[0] - 1.0).abs() <= 1e-3);
    assert!(trace.final_objective() <= 1e-6);
    assert_eq!(trace.termination, Termination::Optimal);
}

#[test]
fn fixed_curvature_rate_on_strongly_convex_fixture() {
    let f = rate_fixture();
    let cfg = AttackConfig {
        delta: 10.0,
        step_mode: StepMode::FixedCurvature,
        curvature_bound: f.l,
        max_iters: 20,
        tol_optimal: 0.0,
        ..AttackConfig::default()
    };
    let trace = run_attack(&f.model, &f.objective, &f.x_bar, cfg).unwrap();
    assert_eq!(trace.records.len(), 20);
    let rep = convergence_check(&trace, f.sigma, f.l, 1e-6);
    assert!(rep.holds, "{rep:?}");
    assert!(rep.worst_contraction() <= rep.factor * (1.0 + 1e-6), "{rep:?}");
    let err: Vec<f64> = trace.final_x.iter().zip(&f.x_star).map(|(a, b)| a - b).collect();
    assert!(norm2(&err) < 0.1);
}

#[test]
fn baseline_and_semi_derivative_directions_agree_without_constraints() {
    let (model, obj, x_bar) = single_point_quadratic();
    let cfg = AttackConfig {
        delta: 5.0,
        max_iters: 1,
        ..AttackConfig::default()
    };
    let semi = run_attack(&model, &obj, &x_bar, cfg.clone()).unwrap();
    let base = run_gradient_baseline(&model, &obj, &x_bar, cfg).unwrap();
    let (a, b) = (&semi.records[0].direction, &base.records[0].direction);
    for (u, v) in a.iter().zip(b) {
        assert!((u - v).abs() <= 1e-8, "{a:?} vs {b:?}");
    }
    assert!((semi.records[0].dg - base.records[0].dg).abs() <= 1e-8);
}

#[test]
fn baseline_makes_no_progress_at_constraint_kink() {
    let model = ParametricQpModel::constraint_kink();
    let obj = TargetDistance::full(vec![1.0]);
    let cfg = AttackConfig {
        delta: 2.0,
        ..AttackConfig::default()
    };
    let base = run_gradient_baseline(&model, &obj, &[0.0], cfg.clone()).unwrap();
    assert!(base.records.is_empty());
    assert_eq!(base.termination, Termination::Stalled);
    let semi = run_attack(&model, &obj, &[0.0], cfg).unwrap();
    assert!(semi.final_objective() < base.final_objective());
    assert_eq!(semi.records[0].direction, vec![1.0]);
}

#[test]
fn unattainable_target_stalls_with_certificate() {
    let model = ParametricQpModel::projection_kink();
    let obj = TargetDistance::full(vec![-1.0]);
    let trace = run_attack(&model, &obj, &[-0.5], AttackConfig::default()).unwrap();
    assert_eq!(trace.termination, Termination::Stalled);
    assert!(trace.certificate.unwrap() >= -1e-10);
}

#[test]
fn exhausted_budget_terminates_on_the_ball() {
    let model = ParametricQpModel::projection_kink();
    let obj = TargetDistance::full(vec![1.0]);
    let cfg = AttackConfig {
        delta: 0.3,
        ..AttackConfig::default()
    };
    let trace = run_attack(&model, &obj, &[0.0], cfg).unwrap();
    assert_eq!(trace.termination, Termination::Budget);
    assert!((trace.final_x[0] - 0.3).abs() < 1e-9);
    assert!(trace.final_x[0] <= 0.3);
}

#[test]
fn random_probe_mode_also_descends() {
    let (model, pt) = ParametricQpModel::planted(4, dims());
    let obj = TargetDistance::full(vec![0.5; 4]);
    let cfg = AttackConfig {
        probe: ProbeMode::Random,
        max_iters: 15,
        seed: 9,
        ..AttackConfig::default()
    };
    let trace = run_attack(&model, &obj, &pt.x, cfg).unwrap();
    assert!(trace.final_objective() < trace.objective_history[0]);
}

fn dims() -> ParamQpDims {
    ParamQpDims {
        dim_var: 4,
        dim_data: 4,
        num_ineq: 3,
        num_eq: 0,
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let (mut model, pt) = ParametricQpModel::planted(8, dims());
    model.point_dim = 2;
    let obj = TargetDistance::full(vec![0.3, -0.2, 0.1, 0.0]);
    let cfg = AttackConfig {
        max_iters: 25,
        seed: 1234,
        ..AttackConfig::default()
    };
    let a = run_attack(&model, &obj, &pt.x, cfg.clone()).unwrap();
    let b = run_attack(&model, &obj, &pt.x, cfg).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn descent_is_monotone_and_stays_in_region(seed in 0u64..500, delta in 0.05f64..1.5, t0 in -1.0f64..1.0, t1 in -1.0f64..1.0) {
        let (mut model, pt) = ParametricQpModel::planted(seed, dims());
        model.point_dim = 2;
        let lo: Vec<f64> = vec![pt.x.iter().copied().fold(f64::INFINITY, f64::min) - 0.2; 2];
        let hi: Vec<f64> = vec![pt.x.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 0.1; 2];
        let obj = TargetDistance::select(4, &[0, 1], vec![t0, t1]).unwrap();
        let cfg = AttackConfig {
            delta,
            bounds: Some(FeatureBounds { lo: lo.clone(), hi: hi.clone() }),
            max_iters: 15,
            seed,
            ..AttackConfig::default()
        };
        let trace = run_attack(&model, &obj, &pt.x, cfg);
        prop_assume!(trace.is_ok());
        let trace = trace.unwrap();
        for w in trace.objective_history.windows(2) {
            prop_assert!(w[1] < w[0]);
        }
        for r in &trace.records {
            prop_assert!(r.displacement <= delta);
        }
        let disp: Vec<f64> = trace.final_x.iter().zip(&pt.x).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&disp) <= delta);
        for (j, v) in trace.final_x.iter().enumerate() {
            prop_assert!(lo[j % 2] <= *v && *v <= hi[j % 2]);
        }
    }
}
