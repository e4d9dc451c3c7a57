//! Directional sensitivity of a victim's solution with respect to its data.
//!
//! At a KKT point `(x̄, ȳ, λ̄)` the semi-derivative `dy = Dŷ(x̄)(Δx)` is the
//! solution of a small auxiliary QP whose data are the Lagrangian Hessian,
//! the active constraint gradients and the vector `z = −BΔx`, where `B`
//! stacks `∇²_{yx}L` on top of the rows `−∇_x g_i`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, norm_inf, singular_values, symmetric_eigen, Cholesky, Matrix, Qr};
use crate::qp::{solve_qp_with, KktSolution, QpOptions, QpProblem};
use crate::random::{uniform, unit_vector};
use crate::victim::{ParamQpDims, ParametricQpModel, PlantedStatus, VictimModel};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensitivityOptions {
    /// `|g_i| ≤ tol_act` puts `i` in `I`.
    pub tol_act: f64,
    /// `|λ_i| ≤ tol_mult` puts an active inequality in `I₀`.
    pub tol_mult: f64,
    /// Relative singular-value cutoff of the LICQ rank test.
    pub licq_tol: f64,
    /// Smallest accepted eigenvalue of the reduced Hessian.
    pub ssoc_tol: f64,
    /// Proceed when a regularity check fails instead of erroring.
    pub best_effort: bool,
    /// Options for the auxiliary QP solves.
    pub qp: QpOptions,
}

impl Default for SensitivityOptions {
    fn default() -> Self {
        Self {
            tol_act: 1e-7,
            tol_mult: 1e-7,
            licq_tol: 1e-8,
            ssoc_tol: 1e-9,
            best_effort: false,
            qp: QpOptions::default(),
        }
    }
}

/// Index sets `I` (active) and `I₀` (weakly active inequalities).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveStructure {
    pub active: Vec<usize>,
    pub weak: Vec<usize>,
    /// `I ∖ I₀`
    pub strict: Vec<usize>,
}

pub fn classify_active(
    solution: &KktSolution,
    num_ineq: usize,
    tol_act: f64,
    tol_mult: f64,
) -> ActiveStructure {
    let mut s = ActiveStructure::default();
    for (i, &g) in solution.constraint_values.iter().enumerate() {
        if i >= num_ineq {
            s.active.push(i);
            s.strict.push(i);
        } else if g.abs() <= tol_act {
            s.active.push(i);
            if solution.lambda[i].abs() <= tol_mult {
                s.weak.push(i);
            } else {
                s.strict.push(i);
            }
        }
    }
    s
}

/// Rank test on the active gradients (one per row).
pub fn check_licq(active_rows: &Matrix, rel_tol: f64) -> bool {
    let k = active_rows.rows();
    if k == 0 {
        return true;
    }
    if k > active_rows.cols() {
        return false;
    }
    let sv = singular_values(&active_rows.transpose());
    let top = sv.first().copied().unwrap_or(0.0);
    top > 0.0 && sv.iter().take(k).all(|&s| s > rel_tol * top)
}

/// Orthonormal basis of `{Δy : strict_rows·Δy = 0}`.
fn null_space(strict_rows: &Matrix, dim: usize) -> Matrix {
    if strict_rows.rows() == 0 {
        return Matrix::identity(dim);
    }
    Qr::pivoted(&strict_rows.transpose(), 1e-10).complement_basis()
}

/// Positive definiteness of `h_aux` on the null space of `strict_rows`.
pub fn check_ssoc(h_aux: &Matrix, strict_rows: &Matrix, tol: f64) -> bool {
    let z = null_space(strict_rows, h_aux.rows());
    if z.cols() == 0 {
        return true;
    }
    let (vals, _) = symmetric_eigen(&h_aux.congruence(&z));
    vals[0] > tol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regularity {
    pub licq: bool,
    pub ssoc: bool,
}

impl Regularity {
    pub fn holds(&self) -> bool {
        self.licq && self.ssoc
    }
}

/// Equality-only auxiliary problem, factored once.
#[derive(Clone, Debug)]
struct EqualityFactor {
    qr: Qr,
    q1: Matrix,
    z: Matrix,
    chol: Option<Cholesky>,
}

#[derive(Clone, Debug)]
pub struct AuxiliaryProblem {
    pub h_aux: Matrix,
    /// `∇_y g_i` for `i ∈ I`, in the order of `structure.active`.
    pub active_rows: Matrix,
    pub structure: ActiveStructure,
    /// `(dim_var + m) × dim_data`
    pub b: Matrix,
    pub regularity: Regularity,
    dim_var: usize,
    options: SensitivityOptions,
    factor: Option<EqualityFactor>,
    /// Classification tried when the primary one is inconsistent (LICQ failures only).
    fallback: Option<ActiveStructure>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiDerivative {
    pub direction: Vec<f64>,
    pub dy: Vec<f64>,
    /// Solution of the auxiliary QP; its constraints are `I₀` (inequalities)
    /// followed by `I ∖ I₀` (equalities).
    pub aux_solution: KktSolution,
    pub regularity: Regularity,
}

pub fn build_auxiliary<M: VictimModel + ?Sized>(
    model: &M,
    x: &[f64],
    solution: &KktSolution,
    opts: &SensitivityOptions,
) -> Result<AuxiliaryProblem> {
    let p = model.assemble(x)?;
    let d = p.dim();
    let m = p.num_constraints();
    let r = p.num_ineq();
    if solution.y.len() != d || solution.lambda.len() != m {
        return Err(Error::DimensionMismatch {
            what: "solution",
            expected: d + m,
            got: solution.y.len() + solution.lambda.len(),
        });
    }
    let mut structure = classify_active(solution, r, opts.tol_act, opts.tol_mult);
    let active_rows = p.rows_of(&structure.active);
    let licq = check_licq(&active_rows, opts.licq_tol);
    let mut fallback = None;
    if !licq {
        if !opts.best_effort {
            return Err(Error::RegularityFailure {
                licq: false,
                ssoc: check_ssoc(p.hessian(), &p.rows_of(&structure.strict), opts.ssoc_tol),
            });
        }
        // Multipliers are not unique. Weak rows that repeat strict ones must
        // stay tight as well; if that is inconsistent for some direction, every
        // active inequality is allowed to leave.
        let strict_rows = p.rows_of(&structure.strict);
        let z = null_space(&strict_rows, d);
        let (promoted, weak): (Vec<usize>, Vec<usize>) = structure.weak.iter().partition(|&&i| {
            let row = p.constraint_row(i);
            norm2(&z.tr_mul_vec(row)) <= 1e-10 * norm2(row).max(1e-300)
        });
        structure.strict.extend(promoted);
        structure.strict.sort_unstable();
        structure.weak = weak;
        fallback = Some(ActiveStructure {
            active: structure.active.clone(),
            weak: structure.active.iter().copied().filter(|&i| i < r).collect(),
            strict: structure.active.iter().copied().filter(|&i| i >= r).collect(),
        });
    }
    let strict_rows = p.rows_of(&structure.strict);
    let h_aux = p.hessian().clone();
    let ssoc = check_ssoc(&h_aux, &strict_rows, opts.ssoc_tol);

    let n = model.dim_data();
    let cross = model.cross_hessian(x, &solution.y, &solution.lambda)?;
    if cross.rows() != d || cross.cols() != n {
        return Err(Error::DimensionMismatch {
            what: "cross hessian",
            expected: d * n,
            got: cross.rows() * cross.cols(),
        });
    }
    let mut b = Matrix::zeros(d + m, n);
    for i in 0..d {
        b.row_mut(i).copy_from_slice(cross.row(i));
    }
    for i in 0..m {
        let g = model.grad_x_constraint(i, x, &solution.y)?;
        for (dst, v) in b.row_mut(d + i).iter_mut().zip(&g) {
            *dst = -v;
        }
    }

    let factor = if structure.weak.is_empty() {
        equality_factor(&h_aux, &strict_rows)
    } else {
        None
    };
    Ok(AuxiliaryProblem {
        h_aux,
        active_rows,
        structure,
        b,
        regularity: Regularity { licq, ssoc },
        dim_var: d,
        options: *opts,
        factor,
        fallback,
    })
}

fn equality_factor(h: &Matrix, rows: &Matrix) -> Option<EqualityFactor> {
    let d = h.rows();
    let k = rows.rows();
    if k > d {
        return None;
    }
    let qr = Qr::new(&rows.transpose());
    if qr.rank() < k {
        return None;
    }
    let q1 = qr.q().columns(0, k);
    let z = qr.q().columns(k, d);
    let chol = if k < d {
        Some(Cholesky::new(&h.congruence(&z), 1e-14 * h.max_abs().max(1.0))?)
    } else {
        None
    };
    Some(EqualityFactor { qr, q1, z, chol })
}

impl AuxiliaryProblem {
    pub fn dim_var(&self) -> usize {
        self.dim_var
    }

    pub fn dim_data(&self) -> usize {
        self.b.cols()
    }

    pub fn options(&self) -> &SensitivityOptions {
        &self.options
    }

    /// `(v, μ)` from `z = −BΔx`.
    pub fn rhs(&self, dx: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut z = self.b.mul_vec(dx);
        z.iter_mut().for_each(|v| *v = -*v);
        let mu = z.split_off(self.dim_var);
        (z, mu)
    }

    /// The auxiliary QP for direction `dx`.
    pub fn problem(&self, dx: &[f64]) -> Result<QpProblem> {
        let (v, mu) = self.rhs(dx);
        self.problem_from(&self.structure, &v, &mu)
    }

    fn problem_from(&self, s: &ActiveStructure, v: &[f64], mu: &[f64]) -> Result<QpProblem> {
        let d = self.dim_var;
        let pos = |i: usize| s.active.iter().position(|&a| a == i).expect("index in I");
        let pick = |idx: &[usize]| {
            let rows: Vec<&[f64]> = idx.iter().map(|&i| self.active_rows.row(pos(i))).collect();
            let offs: Vec<f64> = idx.iter().map(|&i| mu[i]).collect();
            (Matrix::from_rows_with_cols(&rows, d), offs)
        };
        let (ai, bi) = pick(&s.weak);
        let (ae, be) = pick(&s.strict);
        let c = v.iter().map(|x| -x).collect();
        QpProblem::new(self.h_aux.clone(), c, ai, bi, ae, be)
    }

    /// `Dŷ(x̄)(Δx)`.
    pub fn semi_derivative(&self, dx: &[f64]) -> Result<SemiDerivative> {
        if dx.len() != self.dim_data() {
            return Err(Error::DimensionMismatch {
                what: "direction",
                expected: self.dim_data(),
                got: dx.len(),
            });
        }
        if dx.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroDirection);
        }
        if !self.options.best_effort && !self.regularity.holds() {
            return Err(Error::RegularityFailure {
                licq: self.regularity.licq,
                ssoc: self.regularity.ssoc,
            });
        }
        let (v, mu) = self.rhs(dx);
        let aux_solution = match &self.factor {
            Some(f) => self.solve_factored(f, &v, &mu),
            None => match (self.solve_general(&self.structure, &v, &mu), &self.fallback) {
                (Err(Error::AuxInfeasible), Some(alt)) => self.solve_general(alt, &v, &mu)?,
                (res, _) => res?,
            },
        };
        Ok(SemiDerivative {
            direction: dx.to_vec(),
            dy: aux_solution.y.clone(),
            aux_solution,
            regularity: self.regularity,
        })
    }

    fn solve_general(&self, s: &ActiveStructure, v: &[f64], mu: &[f64]) -> Result<KktSolution> {
        let p = self.problem_from(s, v, mu)?;
        solve_qp_with(&p, &self.options.qp).map_err(|e| match e {
            Error::Infeasible { .. } => Error::AuxInfeasible,
            Error::Unbounded => Error::AuxUnbounded,
            other => other,
        })
    }

    fn solve_factored(&self, f: &EqualityFactor, v: &[f64], mu: &[f64]) -> KktSolution {
        let d = self.dim_var;
        let strict = &self.structure.strict;
        let k = strict.len();
        let rhs: Vec<f64> = strict.iter().map(|&i| -mu[i]).collect();
        let mut y = if k > 0 {
            f.q1.mul_vec(&f.qr.solve_upper_tr(k, &rhs))
        } else {
            vec![0.0; d]
        };
        let grad = |y: &[f64]| {
            let mut g = self.h_aux.mul_vec(y);
            axpy(-1.0, v, &mut g);
            g
        };
        if let Some(ch) = &f.chol {
            let u = ch.solve(&f.z.tr_mul_vec(&grad(&y)));
            axpy(-1.0, &f.z.mul_vec(&u), &mut y);
        }
        let g = grad(&y);
        let lambda = if k > 0 {
            let qtg: Vec<f64> = f.q1.tr_mul_vec(&g).iter().map(|x| -x).collect();
            f.qr.solve_upper(k, &qtg)
        } else {
            Vec::new()
        };
        let pos = |i: usize| self.structure.active.iter().position(|&a| a == i).expect("index in I");
        let constraint_values: Vec<f64> = strict
            .iter()
            .map(|&i| dot(self.active_rows.row(pos(i)), &y) + mu[i])
            .collect();
        let mut stat = g;
        for (j, &i) in strict.iter().enumerate() {
            axpy(lambda[j], self.active_rows.row(pos(i)), &mut stat);
        }
        KktSolution {
            value: 0.5 * dot(&y, &self.h_aux.mul_vec(&y)) - dot(v, &y),
            y,
            lambda,
            active_set: (0..k).collect(),
            weakly_active: Vec::new(),
            constraint_values,
            stationarity_residual: norm_inf(&stat),
            iterations: 0,
        }
    }
}

/// Builds the auxiliary problem and evaluates `Dŷ(x̄)(Δx)`. An inconsistent
/// auxiliary problem is retried once with a ten times tighter activity
/// tolerance.
pub fn semi_derivative_at<M: VictimModel + ?Sized>(
    model: &M,
    x: &[f64],
    solution: &KktSolution,
    dx: &[f64],
    opts: &SensitivityOptions,
) -> Result<SemiDerivative> {
    let first = build_auxiliary(model, x, solution, opts)?.semi_derivative(dx);
    match first {
        Err(Error::AuxInfeasible) => {
            let tight = SensitivityOptions {
                tol_act: opts.tol_act / 10.0,
                ..*opts
            };
            build_auxiliary(model, x, solution, &tight)?.semi_derivative(dx)
        }
        other => other,
    }
}

/// One-sided difference `(ŷ(x̄ + hΔx) − ŷ(x̄)) / h` from two full solves.
pub fn fd_directional_derivative<M: VictimModel + ?Sized>(
    model: &M,
    x: &[f64],
    dx: &[f64],
    h: f64,
    opts: &QpOptions,
) -> Result<Vec<f64>> {
    if dx.iter().all(|&v| v == 0.0) {
        return Err(Error::ZeroDirection);
    }
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("finite-difference step must be positive"));
    }
    if dx.len() != x.len() {
        return Err(Error::DimensionMismatch {
            what: "direction",
            expected: x.len(),
            got: dx.len(),
        });
    }
    let y0 = model.solve(x, opts)?.y;
    let mut xh = x.to_vec();
    axpy(h, dx, &mut xh);
    let y1 = model.solve(&xh, opts)?.y;
    Ok(y1.iter().zip(&y0).map(|(a, b)| (a - b) / h).collect())
}

/// Largest `‖Dŷ(x̄)(u)‖` over `samples` random unit directions, an estimate
/// of the local Lipschitz constant of `ŷ`.
pub fn lipschitz_estimate(aux: &AuxiliaryProblem, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let u = unit_vector(&mut rng, aux.dim_data());
        best = best.max(norm2(&aux.semi_derivative(&u)?.dy));
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub trials: usize,
    /// Deviation per trial; `None` marks a skipped trial.
    pub deviations: Vec<Option<f64>>,
    /// Trials where both regularity checks passed and a comparison was made.
    pub checked: usize,
    /// Trials skipped because a regularity check failed.
    pub skipped: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl OracleReport {
    /// Vacuously true when nothing was checked.
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

pub const ORACLE_TOLERANCE: f64 = 5e-4;
pub const ORACLE_STEP: f64 = 1e-5;

/// Compares the semi-derivative with the finite-difference oracle on
/// `trials` random planted fixtures. Every `licq_failure_every`-th trial
/// (if nonzero) duplicates an active constraint so LICQ fails; such trials
/// are counted as skipped.
pub fn oracle_agreement(trials: usize, seed: u64, licq_failure_every: usize) -> Result<OracleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let opts = SensitivityOptions::default();
    let mut report = OracleReport {
        trials,
        deviations: Vec::with_capacity(trials),
        checked: 0,
        skipped: 0,
        max_deviation: 0.0,
        tolerance: ORACLE_TOLERANCE,
    };
    for t in 0..trials {
        let dim_var = 2 + (uniform(&mut rng, 0.0, 7.0) as usize).min(6);
        let dim_data = 1 + (uniform(&mut rng, 0.0, 6.0) as usize).min(5);
        let num_eq = (uniform(&mut rng, 0.0, 2.0) as usize).min(dim_var - 1).min(1);
        let num_ineq = (uniform(&mut rng, 0.0, 7.0) as usize).min(6 - num_eq);
        let dims = ParamQpDims {
            dim_var,
            dim_data,
            num_ineq,
            num_eq,
        };
        let fixture_seed = rand::Rng::random::<u64>(&mut rng);
        let (mut model, point) = ParametricQpModel::planted(fixture_seed, dims);
        if licq_failure_every > 0 && (t + 1) % licq_failure_every == 0 {
            match point.status.iter().position(|&s| s == PlantedStatus::Strict) {
                Some(i) if i < num_ineq => model = model.with_duplicated_ineq(i),
                _ => model.eq.push(model.eq.first().cloned().unwrap_or_else(|| model.ineq[0].clone())),
            }
        }
        let dx = unit_vector(&mut rng, dim_data);
        let sol = match model.solve(&point.x, &opts.qp) {
            Ok(s) => s,
            Err(_) => {
                report.skipped += 1;
                report.deviations.push(None);
                continue;
            }
        };
        let sd = match semi_derivative_at(&model, &point.x, &sol, &dx, &opts) {
            Ok(sd) => sd,
            Err(Error::RegularityFailure { .. }) => {
                report.skipped += 1;
                report.deviations.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        let fd = fd_directional_derivative(&model, &point.x, &dx, ORACLE_STEP, &opts.qp)?;
        let diff: Vec<f64> = sd.dy.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let dev = norm_inf(&diff) / (1.0 + norm_inf(&sd.dy));
        report.max_deviation = report.max_deviation.max(dev);
        report.deviations.push(Some(dev));
        report.checked += 1;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kink_aux(x: f64) -> AuxiliaryProblem {
        let model = ParametricQpModel::projection_kink();
        let sol = model.solve(&[x], &QpOptions::default()).unwrap();
        build_auxiliary(&model, &[x], &sol, &SensitivityOptions::default()).unwrap()
    }

    #[test]
    fn classification_examples() {
        let p = QpProblem::new(
            Matrix::identity(1),
            vec![0.0],
            Matrix::from_rows(&[[-1.0], [1.0]]),
            vec![1.0, -1.5],
            Matrix::zeros(0, 1),
            vec![],
        )
        .unwrap();
        // y ≥ 1 binds with λ = 1, y ≤ 1.5 is slack by 0.5
        let sol = crate::qp::solve_qp(&p).unwrap();
        let s = classify_active(&sol, 2, 1e-7, 1e-7);
        assert_eq!(s.active, vec![0]);
        assert!(s.weak.is_empty());

        let aux = kink_aux(0.0);
        assert_eq!(aux.structure.active, vec![0]);
        assert_eq!(aux.structure.weak, vec![0]);
    }

    #[test]
    fn licq_examples() {
        assert!(!check_licq(&Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0]]), 1e-8));
        assert!(check_licq(&Matrix::from_rows(&[[0.0, 3.0]]), 1e-8));
        assert!(check_licq(&Matrix::zeros(0, 3), 1e-8));
    }

    #[test]
    fn ssoc_examples() {
        let rows = Matrix::from_rows(&[[0.3, -0.4]]);
        assert!(check_ssoc(&Matrix::identity(2), &rows, 1e-9));
        let h = Matrix::from_diag(&[1.0, 0.0]);
        assert!(check_ssoc(&h, &Matrix::from_rows(&[[0.0, 1.0]]), 1e-9));
        assert!(!check_ssoc(&h, &Matrix::zeros(0, 2), 1e-9));
    }

    #[test]
    fn kink_auxiliary_blocks() {
        let aux = kink_aux(0.0);
        assert_eq!(aux.h_aux.as_slice(), &[1.0]);
        assert_eq!(aux.active_rows.as_slice(), &[-1.0]);
        assert_eq!(aux.b.as_slice(), &[-1.0, 0.0]);
    }

    #[test]
    fn kink_one_sided_derivatives() {
        let aux = kink_aux(0.0);
        assert!((aux.semi_derivative(&[1.0]).unwrap().dy[0] - 1.0).abs() < 1e-12);
        assert!(aux.semi_derivative(&[-1.0]).unwrap().dy[0].abs() < 1e-12);
        assert_eq!(aux.semi_derivative(&[0.0]), Err(Error::ZeroDirection));
    }

    #[test]
    fn fd_oracle_at_kink() {
        let model = ParametricQpModel::projection_kink();
        let fd = fd_directional_derivative(&model, &[0.0], &[1.0], 1e-5, &QpOptions::default()).unwrap();
        assert!((fd[0] - 1.0).abs() < 1e-6);
        assert_eq!(
            fd_directional_derivative(&model, &[0.0], &[0.0], 1e-5, &QpOptions::default()),
            Err(Error::ZeroDirection)
        );
    }

    #[test]
    fn duplicated_active_row_fails_licq() {
        let model = ParametricQpModel::constraint_kink().with_duplicated_ineq(0);
        let sol = model.solve(&[0.5], &QpOptions::default()).unwrap();
        let err = build_auxiliary(&model, &[0.5], &sol, &SensitivityOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RegularityFailure { licq: false, .. }));
        let lenient = SensitivityOptions {
            best_effort: true,
            ..Default::default()
        };
        let aux = build_auxiliary(&model, &[0.5], &sol, &lenient).unwrap();
        assert!((aux.semi_derivative(&[1.0]).unwrap().dy[0] - 1.0).abs() < 1e-9);
        assert!((aux.semi_derivative(&[-1.0]).unwrap().dy[0] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn fast_path_matches_general_solver() {
        let dims = ParamQpDims {
            dim_var: 5,
            dim_data: 3,
            num_ineq: 4,
            num_eq: 1,
        };
        for seed in 0..30 {
            let (model, pt) = ParametricQpModel::planted(seed, dims);
            let sol = model.solve(&pt.x, &QpOptions::default()).unwrap();
            let Ok(aux) = build_auxiliary(&model, &pt.x, &sol, &SensitivityOptions::default()) else {
                continue;
            };
            if aux.factor.is_none() {
                continue;
            }
            let dx = [0.3, -0.5, 0.8];
            let fast = aux.semi_derivative(&dx).unwrap();
            let slow = solve_qp_with(&aux.problem(&dx).unwrap(), &QpOptions::default()).unwrap();
            for (a, b) in fast.dy.iter().zip(&slow.y) {
                assert!((a - b).abs() < 1e-9, "seed {seed}");
            }
            assert!(fast.aux_solution.stationarity_residual < 1e-9);
        }
    }
}
