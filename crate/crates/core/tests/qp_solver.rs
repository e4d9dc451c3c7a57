mod common;

use common::oracles::{brute_force_qp, random_qp, XorShift};
use proptest::prelude::*;
use semidiff_core::linalg::Matrix;
use semidiff_core::{kkt_residuals, solve_qp, QpProblem};

#[test]
fn randomized_five_variable_qp_matches_enumeration() {
    let mut rng = XorShift(0x5eed_0001);
    for _ in 0..50 {
        let p = random_qp(&mut rng, 5, 3, 0);
        let s = solve_qp(&p).unwrap();
        let (yo, vo) = brute_force_qp(&p).unwrap();
        assert!((s.value - vo).abs() <= 1e-6 * (1.0 + vo.abs()));
        for (a, b) in s.y.iter().zip(&yo) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(kkt_residuals(&p, &s).unwrap().accepted(&p));
    }
}

#[test]
fn solutions_satisfy_kkt_tolerances_with_equalities() {
    let mut rng = XorShift(77);
    for _ in 0..100 {
        let d = 2 + (rng.next_u64() % 5) as usize;
        let e = (rng.next_u64() % 2) as usize;
        let r = (rng.next_u64() % 8) as usize;
        let p = random_qp(&mut rng, d, r, e);
        let s = solve_qp(&p).unwrap();
        let res = kkt_residuals(&p, &s).unwrap();
        assert!(res.accepted(&p), "{res:?}");
        let (_, vo) = brute_force_qp(&p).unwrap();
        assert!((s.value - vo).abs() <= 1e-6 * (1.0 + vo.abs()));
    }
}

fn with_extra_row(p: &QpProblem, row: usize) -> QpProblem {
    let mut rows: Vec<Vec<f64>> = (0..p.num_ineq()).map(|i| p.a_ineq().row(i).to_vec()).collect();
    let mut b = p.b_ineq().to_vec();
    rows.push(p.a_ineq().row(row).to_vec());
    b.push(p.b_ineq()[row]);
    QpProblem::new(
        p.hessian().clone(),
        p.linear().to_vec(),
        Matrix::from_rows(&rows),
        b,
        p.a_eq().clone(),
        p.b_eq().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn redundant_constraint_copy_keeps_primal(seed in 1u64..u64::MAX, row in 0usize..4) {
        let mut rng = XorShift(seed);
        let p = random_qp(&mut rng, 4, 4, 0);
        let base = solve_qp(&p).unwrap();
        let dup = solve_qp(&with_extra_row(&p, row)).unwrap();
        for (a, b) in base.y.iter().zip(&dup.y) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn objective_scaling_scales_value_and_multipliers(seed in 1u64..u64::MAX, alpha in 0.1f64..20.0) {
        let mut rng = XorShift(seed);
        let p = random_qp(&mut rng, 4, 5, 1);
        let s1 = solve_qp(&p).unwrap();
        let s2 = solve_qp(&p.scaled_objective(alpha)).unwrap();
        prop_assert!((s2.value - alpha * s1.value).abs() <= 1e-8 * (1.0 + alpha * s1.value.abs()));
        for (a, b) in s1.y.iter().zip(&s2.y) {
            prop_assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in s1.lambda.iter().zip(&s2.lambda) {
            prop_assert!((alpha * a - b).abs() <= 1e-7 * (1.0 + b.abs()));
        }
    }
}
