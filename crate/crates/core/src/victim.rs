//! Data-parameterized learning problems ("victims").
//!
//! A victim maps a flattened data vector `x` to a convex QP in the model
//! variables `y`, and exposes the two derivative blocks the sensitivity
//! analysis needs: `∇_x g_i` for every constraint and the mixed
//! Lagrangian Hessian `∇²_{yx} L`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Matrix};
use crate::qp::{solve_qp_with, KktSolution, QpOptions, QpProblem};
use crate::random::{gaussian, uniform};

pub trait VictimModel {
    /// Length of the flattened data vector `x`.
    fn dim_data(&self) -> usize;

    /// Number of model variables `y`.
    fn dim_var(&self) -> usize;

    /// Features per data point; `x` is laid out point by point.
    fn point_dim(&self) -> usize {
        self.dim_data()
    }

    fn num_points(&self) -> usize {
        self.dim_data() / self.point_dim()
    }

    /// The learning problem at data `x`.
    fn assemble(&self, x: &[f64]) -> Result<QpProblem>;

    /// `∇_x g_i(x, y)` for constraint `i` (inequalities first).
    fn grad_x_constraint(&self, i: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>>;

    /// `∇²_{yx} L(x, y, λ)`, a `dim_var × dim_data` matrix.
    fn cross_hessian(&self, x: &[f64], y: &[f64], lambda: &[f64]) -> Result<Matrix>;

    fn description(&self) -> &str;

    fn solve(&self, x: &[f64], opts: &QpOptions) -> Result<KktSolution> {
        solve_qp_with(&self.assemble(x)?, opts)
    }
}

impl<T: VictimModel + ?Sized> VictimModel for &T {
    fn dim_data(&self) -> usize {
        (**self).dim_data()
    }
    fn dim_var(&self) -> usize {
        (**self).dim_var()
    }
    fn point_dim(&self) -> usize {
        (**self).point_dim()
    }
    fn assemble(&self, x: &[f64]) -> Result<QpProblem> {
        (**self).assemble(x)
    }
    fn grad_x_constraint(&self, i: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        (**self).grad_x_constraint(i, x, y)
    }
    fn cross_hessian(&self, x: &[f64], y: &[f64], lambda: &[f64]) -> Result<Matrix> {
        (**self).cross_hessian(x, y, lambda)
    }
    fn description(&self) -> &str {
        (**self).description()
    }
}

fn expect_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            got,
        })
    }
}

/// `∇_y L(x, y, λ) = H y + c + Σ λ_i ∇_y g_i`, evaluated through `assemble`.
pub fn lagrangian_grad_y<M: VictimModel + ?Sized>(
    model: &M,
    x: &[f64],
    y: &[f64],
    lambda: &[f64],
) -> Result<Vec<f64>> {
    let p = model.assemble(x)?;
    expect_len("multipliers", p.num_constraints(), lambda.len())?;
    let mut g = p.gradient(y);
    for (i, &l) in lambda.iter().enumerate() {
        axpy(l, p.constraint_row(i), &mut g);
    }
    Ok(g)
}

/// Worst relative disagreement between analytic derivative callbacks and
/// central differences of `assemble`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub cross_hessian: f64,
    pub constraint_grad: f64,
}

impl DerivativeCheck {
    pub fn max(&self) -> f64 {
        self.cross_hessian.max(self.constraint_grad)
    }
}

/// Compares `cross_hessian` and `grad_x_constraint` against central
/// differences with step `h`. Errors are `|analytic − fd| / (1 + |fd|)`.
pub fn check_derivatives<M: VictimModel + ?Sized>(
    model: &M,
    x: &[f64],
    y: &[f64],
    lambda: &[f64],
    h: f64,
) -> Result<DerivativeCheck> {
    let n = model.dim_data();
    expect_len("data", n, x.len())?;
    let analytic = model.cross_hessian(x, y, lambda)?;
    let m = model.assemble(x)?.num_constraints();
    let grads: Vec<Vec<f64>> = (0..m)
        .map(|i| model.grad_x_constraint(i, x, y))
        .collect::<Result<_>>()?;
    let mut worst_cross: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    for j in 0..n {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        let gp = lagrangian_grad_y(model, &xp, y, lambda)?;
        let gm = lagrangian_grad_y(model, &xm, y, lambda)?;
        for (row, (a, b)) in gp.iter().zip(&gm).enumerate() {
            let fd = (a - b) / (2.0 * h);
            worst_cross = worst_cross.max((analytic[(row, j)] - fd).abs() / (1.0 + fd.abs()));
        }
        let pp = model.assemble(&xp)?;
        let pm = model.assemble(&xm)?;
        for (i, grad) in grads.iter().enumerate() {
            let fd = (pp.constraint_value(i, y) - pm.constraint_value(i, y)) / (2.0 * h);
            worst_grad = worst_grad.max((grad[j] - fd).abs() / (1.0 + fd.abs()));
        }
        xp[j] = x[j];
        xm[j] = x[j];
    }
    Ok(DerivativeCheck {
        cross_hessian: worst_cross,
        constraint_grad: worst_grad,
    })
}

/// Soft-margin linear SVM in the primal over `y = (w₁, w₂, b, ξ₁..ξₙ)`:
///
/// ```text
///     minimize    ½‖w‖² + ½ε(b² + ‖ξ‖²) + C Σ ξ_i
///     subject to  1 − ξ_i − l_i (w·x_i + b) ≤ 0     (margins, i < n)
///                 −ξ_i ≤ 0                           (slacks,  n ≤ i < 2n)
/// ```
///
/// `ε = ridge_eps` keeps the Hessian positive definite so the solution is
/// locally unique. The data vector is `x = (x₁ᵛ, x₁ʰ, x₂ᵛ, x₂ʰ, …)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    features: Vec<f64>,
    labels: Vec<f64>,
    c: f64,
    ridge_eps: f64,
    description: String,
}

pub const SVM_POINT_DIM: usize = 2;

impl SvmModel {
    pub const DEFAULT_RIDGE: f64 = 1e-6;

    /// `features` is flattened row-major (`2n` entries).
    pub fn new(features: Vec<f64>, labels: Vec<f64>, c: f64, ridge_eps: f64) -> Result<Self> {
        expect_len("svm features", 2 * labels.len(), features.len())?;
        if !(c > 0.0) {
            return Err(Error::InvalidConfig("svm penalty C must be positive"));
        }
        if !(ridge_eps >= 0.0) {
            return Err(Error::InvalidConfig("svm ridge must be nonnegative"));
        }
        check_labels(&labels)?;
        Ok(Self {
            features,
            labels,
            c,
            ridge_eps,
            description: String::from("soft-margin linear SVM (primal)"),
        })
    }

    pub fn num_samples(&self) -> usize {
        self.labels.len()
    }

    /// Pristine data the model was built with.
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn penalty(&self) -> f64 {
        self.c
    }

    pub fn ridge(&self) -> f64 {
        self.ridge_eps
    }

    pub fn weights(y: &[f64]) -> [f64; 2] {
        [y[0], y[1]]
    }

    pub fn bias(y: &[f64]) -> f64 {
        y[2]
    }

    /// Sign of `w·x + b` for one feature pair (ties go to +1).
    pub fn predict(y: &[f64], point: &[f64]) -> f64 {
        if y[0] * point[0] + y[1] * point[1] + y[2] >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

fn check_labels(labels: &[f64]) -> Result<()> {
    for (index, &label) in labels.iter().enumerate() {
        if label != 1.0 && label != -1.0 {
            return Err(Error::BadLabel { index, label });
        }
    }
    Ok(())
}

impl VictimModel for SvmModel {
    fn dim_data(&self) -> usize {
        2 * self.labels.len()
    }

    fn dim_var(&self) -> usize {
        3 + self.labels.len()
    }

    fn point_dim(&self) -> usize {
        SVM_POINT_DIM
    }

    fn assemble(&self, x: &[f64]) -> Result<QpProblem> {
        let n = self.labels.len();
        expect_len("svm data", 2 * n, x.len())?;
        check_labels(&self.labels)?;
        let d = n + 3;
        let mut diag = vec![self.ridge_eps; d];
        diag[0] = 1.0;
        diag[1] = 1.0;
        let mut c = vec![0.0; d];
        c[3..].iter_mut().for_each(|v| *v = self.c);
        let mut a = Matrix::zeros(2 * n, d);
        let mut b = vec![0.0; 2 * n];
        for i in 0..n {
            let l = self.labels[i];
            let row = a.row_mut(i);
            row[0] = -l * x[2 * i];
            row[1] = -l * x[2 * i + 1];
            row[2] = -l;
            row[3 + i] = -1.0;
            b[i] = 1.0;
            a[(n + i, 3 + i)] = -1.0;
        }
        QpProblem::new(Matrix::from_diag(&diag), c, a, b, Matrix::zeros(0, d), vec![])
    }

    fn grad_x_constraint(&self, i: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let n = self.labels.len();
        expect_len("svm data", 2 * n, x.len())?;
        expect_len("svm variables", n + 3, y.len())?;
        let mut g = vec![0.0; 2 * n];
        if i < n {
            let l = self.labels[i];
            g[2 * i] = -l * y[0];
            g[2 * i + 1] = -l * y[1];
        } else if i >= 2 * n {
            return Err(Error::DimensionMismatch {
                what: "svm constraint index",
                expected: 2 * n,
                got: i,
            });
        }
        Ok(g)
    }

    fn cross_hessian(&self, x: &[f64], y: &[f64], lambda: &[f64]) -> Result<Matrix> {
        let n = self.labels.len();
        expect_len("svm data", 2 * n, x.len())?;
        expect_len("svm variables", n + 3, y.len())?;
        expect_len("svm multipliers", 2 * n, lambda.len())?;
        let mut m = Matrix::zeros(n + 3, 2 * n);
        for i in 0..n {
            let v = -lambda[i] * self.labels[i];
            m[(0, 2 * i)] = v;
            m[(1, 2 * i + 1)] = v;
        }
        Ok(m)
    }

    fn description(&self) -> &str {
        &self.description
    }
}

/// The one-dimensional bilevel example whose lower level
/// `argmin { y : x + y ≥ 0, y − x ≥ 0 }` has solution `|x|` on `[−1, 1]`.
/// The linear objective gets a `1e-9` ridge so it fits the QP machinery.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ToyBilevelModel;

impl ToyBilevelModel {
    pub const RIDGE: f64 = 1e-9;
    pub const DOMAIN: (f64, f64) = (-1.0, 1.0);

    /// Upper-level objective `x + 2ŷ` that the toy attacker maximizes.
    pub fn upper_objective(x: f64, y: f64) -> f64 {
        x + 2.0 * y
    }
}

impl VictimModel for ToyBilevelModel {
    fn dim_data(&self) -> usize {
        1
    }

    fn dim_var(&self) -> usize {
        1
    }

    fn assemble(&self, x: &[f64]) -> Result<QpProblem> {
        expect_len("toy data", 1, x.len())?;
        let x = x[0];
        // −x − y ≤ 0 and x − y ≤ 0
        QpProblem::new(
            Matrix::from_diag(&[Self::RIDGE]),
            vec![1.0],
            Matrix::from_rows(&[[-1.0], [-1.0]]),
            vec![-x, x],
            Matrix::zeros(0, 1),
            vec![],
        )
    }

    fn grad_x_constraint(&self, i: usize, _x: &[f64], _y: &[f64]) -> Result<Vec<f64>> {
        match i {
            0 => Ok(vec![-1.0]),
            1 => Ok(vec![1.0]),
            _ => Err(Error::DimensionMismatch {
                what: "toy constraint index",
                expected: 2,
                got: i,
            }),
        }
    }

    fn cross_hessian(&self, _x: &[f64], _y: &[f64], lambda: &[f64]) -> Result<Matrix> {
        expect_len("toy multipliers", 2, lambda.len())?;
        Ok(Matrix::zeros(1, 1))
    }

    fn description(&self) -> &str {
        "toy bilevel instance: min y s.t. y >= x, y >= -x"
    }
}

/// Lower-level solution of the toy instance at `x ∈ [−1, 1]`.
pub fn toy_lower_solution(x: f64) -> Result<f64> {
    let (lo, hi) = ToyBilevelModel::DOMAIN;
    if !(lo..=hi).contains(&x) {
        return Err(Error::OutOfDomain { value: x, lo, hi });
    }
    let sol = ToyBilevelModel.solve(&[x], &QpOptions::default())?;
    debug_assert!((sol.y[0] - x.abs()).abs() <= 1e-6);
    Ok(sol.y[0])
}

/// Constraint `g(x, y) = (a₀ + Aₓᵀx)·y + b₀ + bₓ·x`, affine in `x` for
/// fixed `y`. `a_x` is `dim_data × dim_var` (row `j` is `∂a/∂x_j`).
#[derive(Clone, Debug, PartialEq)]
pub struct AffineConstraint {
    pub a0: Vec<f64>,
    pub a_x: Matrix,
    pub b0: f64,
    pub b_x: Vec<f64>,
}

impl AffineConstraint {
    pub fn row(&self, x: &[f64]) -> Vec<f64> {
        let mut a = self.a0.clone();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                axpy(xj, self.a_x.row(j), &mut a);
            }
        }
        a
    }

    pub fn offset(&self, x: &[f64]) -> f64 {
        self.b0 + dot(&self.b_x, x)
    }

    /// `∇_x g = Aₓ·y + bₓ`.
    pub fn grad_x(&self, y: &[f64]) -> Vec<f64> {
        let mut g = self.a_x.mul_vec(y);
        axpy(1.0, &self.b_x, &mut g);
        g
    }
}

/// Parametric QP `min ½yᵀHy + (c₀ + Cₓx)ᵀy` with constraints affine in `x`.
/// Used as a test fixture family for the sensitivity analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricQpModel {
    pub h: Matrix,
    pub c0: Vec<f64>,
    /// `dim_var × dim_data`
    pub c_x: Matrix,
    pub ineq: Vec<AffineConstraint>,
    pub eq: Vec<AffineConstraint>,
    pub point_dim: usize,
    pub description: String,
}

/// Sizes for [`generic_parametric_qp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamQpDims {
    pub dim_var: usize,
    pub dim_data: usize,
    pub num_ineq: usize,
    pub num_eq: usize,
}

/// Activity status of a constraint at a planted KKT point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantedStatus {
    /// Active with positive multiplier.
    Strict,
    /// Active with zero multiplier.
    Weak,
    Inactive,
}

/// KKT point a planted fixture was built around.
#[derive(Clone, Debug, PartialEq)]
pub struct PlantedPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda: Vec<f64>,
    pub status: Vec<PlantedStatus>,
}

impl ParametricQpModel {
    fn scalar(description: &str, c_x: f64, a0: f64, b_x: f64) -> Self {
        Self {
            h: Matrix::identity(1),
            c0: vec![0.0],
            c_x: Matrix::from_rows(&[[c_x]]),
            ineq: vec![AffineConstraint {
                a0: vec![a0],
                a_x: Matrix::zeros(1, 1),
                b0: 0.0,
                b_x: vec![b_x],
            }],
            eq: vec![],
            point_dim: 1,
            description: String::from(description),
        }
    }

    /// `min ½y² − xy s.t. −y ≤ 0`, so `ŷ(x) = max(x, 0)`. The data enter
    /// through the objective.
    pub fn projection_kink() -> Self {
        Self::scalar("projection kink: min (y-x)^2/2 s.t. y >= 0", -1.0, -1.0, 0.0)
    }

    /// `min ½y² s.t. x − y ≤ 0`, so again `ŷ(x) = max(x, 0)`, but the data
    /// enter only through the constraint.
    pub fn constraint_kink() -> Self {
        Self::scalar("constraint kink: min y^2/2 s.t. y >= x", 0.0, -1.0, 1.0)
    }

    /// Unconstrained `min ½yᵀHy + (c₀ + Cₓx)ᵀy` with the given blocks.
    pub fn unconstrained(h: Matrix, c0: Vec<f64>, c_x: Matrix, point_dim: usize) -> Self {
        Self {
            h,
            c0,
            c_x,
            ineq: vec![],
            eq: vec![],
            point_dim,
            description: String::from("unconstrained parametric quadratic"),
        }
    }

    /// Random fixture built so that a prescribed point `(x̄, ȳ, λ̄)` is its
    /// KKT point, with a random mix of strictly active, weakly active and
    /// inactive inequalities. Active constraints never outnumber `dim_var`.
    pub fn planted(seed: u64, dims: ParamQpDims) -> (Self, PlantedPoint) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut model = random_blocks(&mut rng, dims);
        let (d, n) = (dims.dim_var, dims.dim_data);
        let x: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
        let y: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
        let mut budget = d.saturating_sub(dims.num_eq);
        let mut lambda = vec![0.0; dims.num_ineq + dims.num_eq];
        let mut status = Vec::with_capacity(dims.num_ineq + dims.num_eq);
        for (i, con) in model.ineq.iter_mut().enumerate() {
            let roll = uniform(&mut rng, 0.0, 1.0);
            let st = if budget > 0 && roll < 0.45 {
                PlantedStatus::Strict
            } else if budget > 0 && roll < 0.7 {
                PlantedStatus::Weak
            } else {
                PlantedStatus::Inactive
            };
            let value = match st {
                PlantedStatus::Strict => {
                    lambda[i] = uniform(&mut rng, 0.5, 2.0);
                    budget -= 1;
                    0.0
                }
                PlantedStatus::Weak => {
                    budget -= 1;
                    0.0
                }
                PlantedStatus::Inactive => -uniform(&mut rng, 0.2, 1.0),
            };
            con.b0 += value - (dot(&con.row(&x), &y) + con.offset(&x));
            status.push(st);
        }
        let r = dims.num_ineq;
        for (k, con) in model.eq.iter_mut().enumerate() {
            lambda[r + k] = uniform(&mut rng, -1.5, 1.5);
            con.b0 -= dot(&con.row(&x), &y) + con.offset(&x);
            status.push(PlantedStatus::Strict);
        }
        // choose c₀ so that ∇_y L(x̄, ȳ, λ̄) = 0
        let mut grad = model.h.mul_vec(&y);
        axpy(1.0, &model.c_x.mul_vec(&x), &mut grad);
        for (i, con) in model.ineq.iter().chain(&model.eq).enumerate() {
            axpy(lambda[i], &con.row(&x), &mut grad);
        }
        model.c0 = grad.iter().map(|g| -g).collect();
        model.description = String::from("planted parametric QP");
        (
            model,
            PlantedPoint {
                x,
                y,
                lambda,
                status,
            },
        )
    }

    /// Appends an exact copy of inequality `i` (a LICQ violation whenever
    /// `i` is active).
    pub fn with_duplicated_ineq(mut self, i: usize) -> Self {
        let copy = self.ineq[i].clone();
        self.ineq.push(copy);
        self
    }
}

fn random_blocks(rng: &mut ChaCha8Rng, dims: ParamQpDims) -> ParametricQpModel {
    let (d, n) = (dims.dim_var, dims.dim_data);
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = gaussian(rng) / libm::sqrt(d as f64);
        }
    }
    let mut h = m.tr_mul(&m);
    for i in 0..d {
        h[(i, i)] += 0.5;
    }
    let c0 = (0..d).map(|_| gaussian(rng)).collect();
    let mut c_x = Matrix::zeros(d, n);
    for i in 0..d {
        for j in 0..n {
            c_x[(i, j)] = gaussian(rng);
        }
    }
    let constraint = |rng: &mut ChaCha8Rng| {
        let a0: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let mut a_x = Matrix::zeros(n, d);
        for j in 0..n {
            for k in 0..d {
                a_x[(j, k)] = 0.3 * gaussian(rng);
            }
        }
        AffineConstraint {
            a0,
            a_x,
            b0: uniform(rng, -0.5, 0.5),
            b_x: (0..n).map(|_| gaussian(rng)).collect(),
        }
    };
    let ineq = (0..dims.num_ineq).map(|_| constraint(rng)).collect();
    let eq = (0..dims.num_eq).map(|_| constraint(rng)).collect();
    ParametricQpModel {
        h,
        c0,
        c_x,
        ineq,
        eq,
        point_dim: 1,
        description: String::from("random parametric QP"),
    }
}

/// Random parametric QP: SPD Hessian, linear term and constraints affine
/// in `x`. Derivative callbacks are checked against central differences
/// before the model is returned.
pub fn generic_parametric_qp(seed: u64, dims: ParamQpDims) -> ParametricQpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let model = random_blocks(&mut rng, dims);
    let x: Vec<f64> = (0..dims.dim_data).map(|_| gaussian(&mut rng)).collect();
    let y: Vec<f64> = (0..dims.dim_var).map(|_| gaussian(&mut rng)).collect();
    let lambda: Vec<f64> = (0..dims.num_ineq + dims.num_eq)
        .map(|_| gaussian(&mut rng).abs())
        .collect();
    let report = check_derivatives(&model, &x, &y, &lambda, 1e-5)
        .expect("fixture dimensions are consistent");
    assert!(
        report.max() <= 1e-4,
        "parametric fixture derivative callbacks disagree with finite differences: {report:?}"
    );
    model
}

impl VictimModel for ParametricQpModel {
    fn dim_data(&self) -> usize {
        self.c_x.cols()
    }

    fn dim_var(&self) -> usize {
        self.h.rows()
    }

    fn point_dim(&self) -> usize {
        self.point_dim
    }

    fn assemble(&self, x: &[f64]) -> Result<QpProblem> {
        expect_len("parametric data", self.dim_data(), x.len())?;
        let d = self.dim_var();
        let mut c = self.c0.clone();
        axpy(1.0, &self.c_x.mul_vec(x), &mut c);
        let rows = |cons: &[AffineConstraint]| {
            let rows: Vec<Vec<f64>> = cons.iter().map(|k| k.row(x)).collect();
            let offs: Vec<f64> = cons.iter().map(|k| k.offset(x)).collect();
            (Matrix::from_rows_with_cols(&rows, d), offs)
        };
        let (ai, bi) = rows(&self.ineq);
        let (ae, be) = rows(&self.eq);
        QpProblem::new(self.h.clone(), c, ai, bi, ae, be)
    }

    fn grad_x_constraint(&self, i: usize, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        expect_len("parametric data", self.dim_data(), x.len())?;
        expect_len("parametric variables", self.dim_var(), y.len())?;
        let con = self
            .ineq
            .iter()
            .chain(&self.eq)
            .nth(i)
            .ok_or(Error::DimensionMismatch {
                what: "parametric constraint index",
                expected: self.ineq.len() + self.eq.len(),
                got: i,
            })?;
        Ok(con.grad_x(y))
    }

    fn cross_hessian(&self, x: &[f64], y: &[f64], lambda: &[f64]) -> Result<Matrix> {
        expect_len("parametric data", self.dim_data(), x.len())?;
        expect_len("parametric variables", self.dim_var(), y.len())?;
        expect_len(
            "parametric multipliers",
            self.ineq.len() + self.eq.len(),
            lambda.len(),
        )?;
        let mut m = self.c_x.clone();
        for (con, &l) in self.ineq.iter().chain(&self.eq).zip(lambda) {
            if l == 0.0 {
                continue;
            }
            // column j gains λ·(∂a/∂x_j)
            for j in 0..self.dim_data() {
                for k in 0..self.dim_var() {
                    m[(k, j)] += l * con.a_x[(j, k)];
                }
            }
        }
        Ok(m)
    }

    fn description(&self) -> &str {
        &self.description
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svm_rejects_bad_labels() {
        let err = SvmModel::new(vec![1.0, 1.0, -1.0, -1.0], vec![1.0, 0.0], 10.0, 1e-6);
        assert_eq!(err, Err(Error::BadLabel { index: 1, label: 0.0 }));
    }

    #[test]
    fn svm_two_point_problem_separates() {
        let m = SvmModel::new(vec![1.0, 1.0, -1.0, -1.0], vec![1.0, -1.0], 10.0, 1e-6).unwrap();
        let s = m.solve(m.features(), &QpOptions::default()).unwrap();
        // hard-margin solution w = (½, ½), b = 0
        assert!((s.y[0] - 0.5).abs() < 1e-5 && (s.y[1] - 0.5).abs() < 1e-5);
        assert_eq!(SvmModel::predict(&s.y, &[1.0, 1.0]), 1.0);
        assert_eq!(SvmModel::predict(&s.y, &[-1.0, -1.0]), -1.0);
    }

    #[test]
    fn svm_cross_hessian_blocks() {
        let m = SvmModel::new(vec![0.3, -0.2], vec![1.0], 10.0, 1e-6).unwrap();
        let y = [0.1, 0.2, 0.3, 0.0];
        let zero = m.cross_hessian(m.features(), &y, &[0.0, 0.0]).unwrap();
        assert!(zero.as_slice().iter().all(|&v| v == 0.0));
        let ch = m.cross_hessian(m.features(), &y, &[2.0, 0.0]).unwrap();
        assert_eq!(ch[(0, 0)], -2.0);
        assert_eq!(ch[(1, 1)], -2.0);
        assert_eq!(ch[(0, 1)], 0.0);
        assert!((2..4).all(|r| ch.row(r).iter().all(|&v| v == 0.0)));
        assert!(matches!(
            m.cross_hessian(m.features(), &y, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn toy_solution_is_absolute_value() {
        assert!((toy_lower_solution(0.3).unwrap() - 0.3).abs() < 1e-6);
        assert!(toy_lower_solution(0.0).unwrap().abs() < 1e-6);
        assert!((toy_lower_solution(-0.7).unwrap() - 0.7).abs() < 1e-6);
        assert!(matches!(toy_lower_solution(1.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn projection_fixtures_give_positive_part() {
        let opts = QpOptions::default();
        for model in [ParametricQpModel::projection_kink(), ParametricQpModel::constraint_kink()] {
            for x in [-0.8, -0.1, 0.0, 0.25, 1.3] {
                let s = model.solve(&[x], &opts).unwrap();
                assert!((s.y[0] - f64::max(x, 0.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unconstrained_fixture_solves_linear_system() {
        let model = generic_parametric_qp(
            3,
            ParamQpDims {
                dim_var: 3,
                dim_data: 2,
                num_ineq: 0,
                num_eq: 0,
            },
        );
        let x = [0.4, -0.9];
        let s = model.solve(&x, &QpOptions::default()).unwrap();
        let p = model.assemble(&x).unwrap();
        let res = p.gradient(&s.y);
        assert!(res.iter().all(|r| r.abs() < 1e-10));
    }

    #[test]
    fn planted_point_is_recovered() {
        for seed in 0..20 {
            let dims = ParamQpDims {
                dim_var: 4,
                dim_data: 3,
                num_ineq: 4,
                num_eq: 1,
            };
            let (model, pt) = ParametricQpModel::planted(seed, dims);
            let s = model.solve(&pt.x, &QpOptions::default()).unwrap();
            for (a, b) in s.y.iter().zip(&pt.y) {
                assert!((a - b).abs() < 1e-8, "seed {seed}");
            }
            for (i, st) in pt.status.iter().enumerate() {
                let active = s.active_set.contains(&i);
                assert_eq!(active, *st != PlantedStatus::Inactive, "seed {seed} constraint {i}");
            }
        }
    }
}
