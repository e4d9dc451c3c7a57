//! Closed-form fixtures shared by the core tests and the acceptance suite.
#![allow(dead_code)]

use semidiff_core::attack::TargetDistance;
use semidiff_core::linalg::Matrix;
use semidiff_core::victim::ParametricQpModel;

/// Unconstrained `ŷ(x) = J x` with one two-feature data point, and the
/// objective `G = ‖J x − J x*‖²`. `J` has singular values 2 and 1, so the
/// Hessian of `G` is `2JᵀJ` with `σ = 2` and `L = 8`.
pub struct RateFixture {
    pub model: ParametricQpModel,
    pub objective: TargetDistance,
    pub x_bar: Vec<f64>,
    pub x_star: Vec<f64>,
    pub sigma: f64,
    pub l: f64,
}

pub fn rate_fixture() -> RateFixture {
    let (c, s) = (0.6_f64, 0.8_f64);
    // J = R(θ) diag(2, 1) R(φ)ᵀ with fixed rotations
    let r1 = Matrix::from_rows(&[[c, -s], [s, c]]);
    let r2 = Matrix::from_rows(&[[0.28, -0.96], [0.96, 0.28]]);
    let j = r1.mul(&Matrix::from_diag(&[2.0, 1.0])).mul(&r2.transpose());
    let mut neg_j = j.clone();
    neg_j.scale(-1.0);
    let model = ParametricQpModel::unconstrained(Matrix::identity(2), vec![0.0, 0.0], neg_j, 2);
    let x_bar = vec![0.5, -0.25];
    let x_star = vec![0.5 + 0.7, -0.25 - 0.4];
    let objective = TargetDistance::full(j.mul_vec(&x_star));
    RateFixture {
        model,
        objective,
        x_bar,
        x_star,
        sigma: 2.0,
        l: 8.0,
    }
}

/// Unconstrained fixture whose only data point carries all three features,
/// so the full gradient and a single point's direction coincide.
pub fn single_point_quadratic() -> (ParametricQpModel, TargetDistance, Vec<f64>) {
    let h = Matrix::from_rows(&[[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 1.0]]);
    let c_x = Matrix::from_rows(&[[1.0, -0.5, 0.2], [0.3, 0.8, -1.1], [-0.7, 0.1, 0.4]]);
    let model = ParametricQpModel::unconstrained(h, vec![0.1, -0.2, 0.3], c_x, 3);
    (model, TargetDistance::full(vec![1.0, -1.0, 0.5]), vec![0.2, 0.1, -0.3])
}
