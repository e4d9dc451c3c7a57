//! Dense convex quadratic programming by a primal active-set method.
//!
//! Problems have the form
//!
//! ```text
//!     minimize    ½ yᵀH y + cᵀy
//!     subject to  A_ineq y + b_ineq ≤ 0
//!                 A_eq   y + b_eq   = 0
//! ```
//!
//! Constraints are indexed inequalities first (`0..r`) and equalities
//! after (`r..m`). `H` only needs to be positive semidefinite: singular
//! reduced Hessians are handled by eigen-decomposition in the null space
//! of the working set, following zero-curvature rays until a constraint
//! blocks them (or reporting the problem unbounded).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, norm_inf, symmetric_eigen, Cholesky, Matrix, Qr};

/// Convex QP with linear constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct QpProblem {
    h: Matrix,
    c: Vec<f64>,
    a_ineq: Matrix,
    b_ineq: Vec<f64>,
    a_eq: Matrix,
    b_eq: Vec<f64>,
}

impl QpProblem {
    /// Validates dimensions and symmetrizes `h`.
    pub fn new(
        h: Matrix,
        c: Vec<f64>,
        a_ineq: Matrix,
        b_ineq: Vec<f64>,
        a_eq: Matrix,
        b_eq: Vec<f64>,
    ) -> Result<Self> {
        let d = c.len();
        check_dim("hessian rows", d, h.rows())?;
        check_dim("hessian cols", d, h.cols())?;
        check_dim("inequality columns", d, a_ineq.cols())?;
        check_dim("inequality offsets", a_ineq.rows(), b_ineq.len())?;
        check_dim("equality columns", d, a_eq.cols())?;
        check_dim("equality offsets", a_eq.rows(), b_eq.len())?;
        let mut h = h;
        h.symmetrize();
        Ok(Self {
            h,
            c,
            a_ineq,
            b_ineq,
            a_eq,
            b_eq,
        })
    }

    pub fn unconstrained(h: Matrix, c: Vec<f64>) -> Result<Self> {
        let d = c.len();
        Self::new(h, c, Matrix::zeros(0, d), vec![], Matrix::zeros(0, d), vec![])
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn num_ineq(&self) -> usize {
        self.a_ineq.rows()
    }

    pub fn num_eq(&self) -> usize {
        self.a_eq.rows()
    }

    pub fn num_constraints(&self) -> usize {
        self.num_ineq() + self.num_eq()
    }

    pub fn hessian(&self) -> &Matrix {
        &self.h
    }

    pub fn linear(&self) -> &[f64] {
        &self.c
    }

    pub fn a_ineq(&self) -> &Matrix {
        &self.a_ineq
    }

    pub fn b_ineq(&self) -> &[f64] {
        &self.b_ineq
    }

    pub fn a_eq(&self) -> &Matrix {
        &self.a_eq
    }

    pub fn b_eq(&self) -> &[f64] {
        &self.b_eq
    }

    /// Gradient row `∇_y g_i` of constraint `i` (combined indexing).
    pub fn constraint_row(&self, i: usize) -> &[f64] {
        let r = self.num_ineq();
        if i < r {
            self.a_ineq.row(i)
        } else {
            self.a_eq.row(i - r)
        }
    }

    pub fn constraint_offset(&self, i: usize) -> f64 {
        let r = self.num_ineq();
        if i < r {
            self.b_ineq[i]
        } else {
            self.b_eq[i - r]
        }
    }

    pub fn constraint_value(&self, i: usize, y: &[f64]) -> f64 {
        dot(self.constraint_row(i), y) + self.constraint_offset(i)
    }

    pub fn constraint_values(&self, y: &[f64]) -> Vec<f64> {
        (0..self.num_constraints())
            .map(|i| self.constraint_value(i, y))
            .collect()
    }

    /// All constraint gradients stacked, inequalities first.
    pub fn constraint_matrix(&self) -> Matrix {
        let idx: Vec<usize> = (0..self.num_constraints()).collect();
        self.rows_of(&idx)
    }

    pub(crate) fn rows_of(&self, idx: &[usize]) -> Matrix {
        let d = self.dim();
        let mut data = Vec::with_capacity(idx.len() * d);
        for &i in idx {
            data.extend_from_slice(self.constraint_row(i));
        }
        Matrix::from_row_major(idx.len(), d, data)
    }

    pub fn objective(&self, y: &[f64]) -> f64 {
        0.5 * dot(y, &self.h.mul_vec(y)) + dot(&self.c, y)
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let mut g = self.h.mul_vec(y);
        axpy(1.0, &self.c, &mut g);
        g
    }

    /// Same problem with `(H, c)` multiplied by `alpha`.
    pub fn scaled_objective(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.h.scale(alpha);
        out.c.iter_mut().for_each(|v| *v *= alpha);
        out
    }
}

fn check_dim(what: &'static str, expected: usize, got: usize) -> Result<()> {
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

/// Tolerances of the solver and of the active/weakly-active classification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpOptions {
    /// `|g_i| ≤ tol_act` counts as active.
    pub tol_act: f64,
    /// `|λ_i| ≤ tol_mult` counts as a zero multiplier.
    pub tol_mult: f64,
    /// Accepted primal infeasibility.
    pub tol_feas: f64,
    /// Iteration cap; `None` picks `50·(d + m) + 100`.
    pub max_iter: Option<usize>,
}

impl Default for QpOptions {
    fn default() -> Self {
        Self {
            tol_act: 1e-7,
            tol_mult: 1e-7,
            tol_feas: 1e-8,
            max_iter: None,
        }
    }
}

/// Primal-dual solution of a [`QpProblem`].
#[derive(Clone, Debug, PartialEq)]
pub struct KktSolution {
    pub y: Vec<f64>,
    /// One multiplier per constraint, inequalities first.
    pub lambda: Vec<f64>,
    pub value: f64,
    /// Constraints with `|g_i| ≤ tol_act` (equalities always included).
    pub active_set: Vec<usize>,
    /// Active inequalities with `|λ_i| ≤ tol_mult`.
    pub weakly_active: Vec<usize>,
    /// `g_i(y)` for every constraint.
    pub constraint_values: Vec<f64>,
    pub stationarity_residual: f64,
    pub iterations: usize,
}

/// Maxima of the four KKT violations of a candidate point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KktResiduals {
    /// `‖H y + c + Σ λ_i ∇g_i‖∞`
    pub stationarity: f64,
    /// Largest inequality excess or equality deviation.
    pub primal: f64,
    /// Largest negative part of an inequality multiplier.
    pub dual: f64,
    /// Largest `|λ_i g_i|` over inequalities.
    pub complementarity: f64,
}

impl KktResiduals {
    /// Acceptance test for a KKT point of `problem`.
    pub fn accepted(&self, problem: &QpProblem) -> bool {
        let stat_tol = 1e-7 * (1.0 + norm_inf(problem.linear()));
        self.stationarity <= stat_tol
            && self.primal <= 1e-8
            && self.dual <= 1e-10
            && self.complementarity <= 1e-8
    }

    pub fn max(&self) -> f64 {
        self.stationarity
            .max(self.primal)
            .max(self.dual)
            .max(self.complementarity)
    }
}

pub fn kkt_residuals(problem: &QpProblem, candidate: &KktSolution) -> Result<KktResiduals> {
    check_dim("candidate primal", problem.dim(), candidate.y.len())?;
    check_dim(
        "candidate multipliers",
        problem.num_constraints(),
        candidate.lambda.len(),
    )?;
    Ok(residuals_raw(problem, &candidate.y, &candidate.lambda))
}

fn residuals_raw(problem: &QpProblem, y: &[f64], lambda: &[f64]) -> KktResiduals {
    let r = problem.num_ineq();
    let mut stat = problem.gradient(y);
    let mut primal: f64 = 0.0;
    let mut dual: f64 = 0.0;
    let mut comp: f64 = 0.0;
    for (i, &l) in lambda.iter().enumerate() {
        axpy(l, problem.constraint_row(i), &mut stat);
        let g = problem.constraint_value(i, y);
        if i < r {
            primal = primal.max(g);
            dual = dual.max(-l);
            comp = comp.max((l * g).abs());
        } else {
            primal = primal.max(g.abs());
        }
    }
    KktResiduals {
        stationarity: norm_inf(&stat),
        primal,
        dual,
        complementarity: comp,
    }
}

/// Solves with default [`QpOptions`].
pub fn solve_qp(problem: &QpProblem) -> Result<KktSolution> {
    solve_qp_with(problem, &QpOptions::default())
}

pub fn solve_qp_with(problem: &QpProblem, opts: &QpOptions) -> Result<KktSolution> {
    Solver::new(problem, opts).solve(&[])
}

/// Solves starting from a guessed working set (typically the active set
/// of a nearby problem). The guess only affects the path taken, not the
/// returned optimum.
pub fn solve_qp_guided(
    problem: &QpProblem,
    opts: &QpOptions,
    guess: &[usize],
) -> Result<KktSolution> {
    Solver::new(problem, opts).solve(guess)
}

/// Result of the inner active-set loop.
struct Phase {
    y: Vec<f64>,
    working: Vec<usize>,
    lambda_w: Vec<f64>,
}

struct Solver<'a> {
    p: &'a QpProblem,
    opts: &'a QpOptions,
    max_iter: usize,
    iterations: usize,
}

impl<'a> Solver<'a> {
    fn new(p: &'a QpProblem, opts: &'a QpOptions) -> Self {
        let max_iter = opts
            .max_iter
            .unwrap_or(50 * (p.dim() + p.num_constraints()) + 100);
        Self {
            p,
            opts,
            max_iter,
            iterations: 0,
        }
    }

    fn solve(mut self, guess: &[usize]) -> Result<KktSolution> {
        let p = self.p;
        let r = p.num_ineq();
        let eq_idx: Vec<usize> = (r..p.num_constraints()).collect();
        let eq_rows = independent_rows(p, &eq_idx);
        let start = self.equality_point(&eq_rows)?;
        // dependent equalities must be consistent with the kept ones
        for &i in &eq_idx {
            let v = p.constraint_value(i, &start).abs();
            if v > self.opts.tol_feas * (1.0 + norm2(p.constraint_row(i))) {
                return Err(Error::Infeasible { violation: v });
            }
        }

        let mut guess_ineq: Vec<usize> = guess.iter().copied().filter(|&i| i < r).collect();
        guess_ineq.sort_unstable();
        guess_ineq.dedup();

        let phase = if !guess_ineq.is_empty() {
            self.guided(&eq_rows, &guess_ineq)?
        } else {
            None
        };
        let phase = match phase {
            Some(ph) => ph,
            None => {
                let (y, active) = self.feasible_point(&start, &eq_rows)?;
                let mut cand = eq_rows.clone();
                cand.extend(active);
                let working = independent_rows(p, &cand);
                self.active_set(&self.p.h, &self.p.c, y, working)?
            }
        };
        Ok(self.finish(phase))
    }

    /// Tries the equality-constrained problem on the guessed working set.
    fn guided(&mut self, eq_rows: &[usize], guess: &[usize]) -> Result<Option<Phase>> {
        let p = self.p;
        let mut cand = eq_rows.to_vec();
        cand.extend_from_slice(guess);
        let working = independent_rows(p, &cand);
        let Some((y, _)) = solve_eqp(&p.h, &p.c, p, &working) else {
            return Ok(None);
        };
        let viol = max_ineq_violation(p, &y);
        if viol <= self.opts.tol_feas {
            return self.active_set(&p.h, &p.c, y, working).map(Some);
        }
        let (y, active) = self.feasible_point(&y, eq_rows)?;
        let mut cand = eq_rows.to_vec();
        // prefer guessed constraints that are tight at the repaired point
        cand.extend(guess.iter().copied().filter(|&i| {
            p.constraint_value(i, &y).abs() <= 1e-10 * (1.0 + norm2(p.constraint_row(i)))
        }));
        cand.extend(active);
        let working = independent_rows(p, &cand);
        self.active_set(&p.h, &p.c, y, working).map(Some)
    }

    /// Minimum-norm point on the (independent) equality rows.
    fn equality_point(&self, eq_rows: &[usize]) -> Result<Vec<f64>> {
        let d = self.p.dim();
        if eq_rows.is_empty() {
            return Ok(vec![0.0; d]);
        }
        let at = self.p.rows_of(eq_rows).transpose();
        let qr = Qr::new(&at);
        let k = eq_rows.len();
        let rhs: Vec<f64> = eq_rows.iter().map(|&i| -self.p.constraint_offset(i)).collect();
        let u = qr.solve_upper_tr(k, &rhs);
        let mut y = vec![0.0; d];
        for (j, uj) in u.iter().enumerate() {
            for (i, yi) in y.iter_mut().enumerate() {
                *yi += qr.q()[(i, j)] * uj;
            }
        }
        Ok(y)
    }

    /// Phase one: minimizes the largest inequality violation `t` over
    /// `(y, t)` subject to the equalities, starting from `y0`. Returns a
    /// feasible point and the inequalities tight at it.
    fn feasible_point(&mut self, y0: &[f64], eq_rows: &[usize]) -> Result<(Vec<f64>, Vec<usize>)> {
        let p = self.p;
        let (d, r) = (p.dim(), p.num_ineq());
        let t0 = max_ineq_violation(p, y0);
        if t0 <= self.opts.tol_feas {
            return Ok((y0.to_vec(), Vec::new()));
        }
        // LP in (y, t): rows 0..r are a_i·y + b_i − t ≤ 0, row r is −t ≤ 0,
        // then the equalities.
        let n = d + 1;
        let mut a_ineq = Matrix::zeros(r + 1, n);
        let mut b_ineq = vec![0.0; r + 1];
        for i in 0..r {
            a_ineq.row_mut(i)[..d].copy_from_slice(p.constraint_row(i));
            a_ineq[(i, d)] = -1.0;
            b_ineq[i] = p.constraint_offset(i);
        }
        a_ineq[(r, d)] = -1.0;
        let mut a_eq = Matrix::zeros(eq_rows.len(), n);
        let mut b_eq = vec![0.0; eq_rows.len()];
        for (k, &i) in eq_rows.iter().enumerate() {
            a_eq.row_mut(k)[..d].copy_from_slice(p.constraint_row(i));
            b_eq[k] = p.constraint_offset(i);
        }
        let mut c = vec![0.0; n];
        c[d] = 1.0;
        let lp = QpProblem::new(Matrix::zeros(n, n), c, a_ineq, b_ineq, a_eq, b_eq)?;
        let mut z0 = y0.to_vec();
        z0.push(t0);
        let working: Vec<usize> = (0..eq_rows.len()).map(|k| r + 1 + k).collect();
        let mut inner = Solver {
            p: &lp,
            opts: self.opts,
            max_iter: self.max_iter,
            iterations: self.iterations,
        };
        let phase = inner.active_set_until(&lp.h, &lp.c, z0, working, Some(d))?;
        self.iterations = inner.iterations;
        let t = phase.y[d];
        if t > self.opts.tol_feas {
            return Err(Error::Infeasible { violation: t });
        }
        let y = phase.y[..d].to_vec();
        let active = phase.working.iter().copied().filter(|&i| i < r).collect();
        Ok((y, active))
    }

    fn active_set(
        &mut self,
        h: &Matrix,
        c: &[f64],
        y: Vec<f64>,
        working: Vec<usize>,
    ) -> Result<Phase> {
        self.active_set_until(h, c, y, working, None)
    }

    /// Primal active-set loop from a feasible `y` with working set
    /// `working` (independent rows, all tight at `y`). With
    /// `stop_at = Some(j)` it returns as soon as `y[j] ≤ 0` (phase one).
    fn active_set_until(
        &mut self,
        h: &Matrix,
        c: &[f64],
        mut y: Vec<f64>,
        mut working: Vec<usize>,
        stop_at: Option<usize>,
    ) -> Result<Phase> {
        let p = self.p;
        let (d, r) = (p.dim(), p.num_ineq());
        let hscale = h.max_abs().max(1.0);
        let mut at_subspace_min = false;
        let mut degenerate_streak = 0usize;

        loop {
            if let Some(j) = stop_at {
                if y[j] <= 0.0 {
                    return Ok(Phase {
                        y,
                        working,
                        lambda_w: Vec::new(),
                    });
                }
            }
            self.iterations += 1;
            if self.iterations > self.max_iter {
                return Err(Error::MaxIterations(self.max_iter));
            }
            let bland = degenerate_streak > 10;

            let mut g = h.mul_vec(&y);
            axpy(1.0, c, &mut g);
            let k = working.len();
            let qr = (k > 0).then(|| Qr::new(&p.rows_of(&working).transpose()));
            let z = match &qr {
                Some(qr) => qr.q().columns(k, d),
                None => Matrix::identity(d),
            };
            let gscale = 1.0 + norm_inf(c) + hscale * norm_inf(&y);

            let mut step: Option<(Vec<f64>, bool)> = None;
            if k < d && !at_subspace_min {
                let gr = z.tr_mul_vec(&g);
                if norm_inf(&gr) > 1e-13 * gscale {
                    let hr = h.congruence(&z);
                    let (pz, ray) = reduced_step(&hr, &gr, hscale, gscale);
                    if ray || norm_inf(&pz) > 0.0 {
                        step = Some((z.mul_vec(&pz), ray));
                    }
                }
            }

            let Some((dir, ray)) = step else {
                // subspace minimizer: check multiplier signs
                let lambda_w = match &qr {
                    Some(qr) => {
                        let qtg: Vec<f64> = (0..k).map(|j| -dot(&qr.q().column(j), &g)).collect();
                        qr.solve_upper(k, &qtg)
                    }
                    None => Vec::new(),
                };
                let mut leave: Option<(usize, f64)> = None;
                for (pos, (&i, &l)) in working.iter().zip(&lambda_w).enumerate() {
                    if i < r && l < -self.opts.tol_mult.min(1e-10) * gscale.max(1.0) {
                        let better = match leave {
                            None => true,
                            Some((_, best)) => !bland && l < best,
                        };
                        if better {
                            leave = Some((pos, l));
                        }
                    }
                }
                match leave {
                    None => {
                        return Ok(Phase {
                            y,
                            working,
                            lambda_w,
                        })
                    }
                    Some((pos, _)) => {
                        working.remove(pos);
                        at_subspace_min = false;
                        continue;
                    }
                }
            };

            // ratio test over inequalities outside the working set
            let dnorm = norm2(&dir);
            let mut alpha = if ray { f64::INFINITY } else { 1.0 };
            let mut blocking: Option<usize> = None;
            for i in 0..r {
                if working.contains(&i) {
                    continue;
                }
                let row = p.constraint_row(i);
                let ad = dot(row, &dir);
                if ad <= 1e-14 * norm2(row) * dnorm {
                    continue;
                }
                let slack = -(dot(row, &y) + p.constraint_offset(i));
                let ai = slack.max(0.0) / ad;
                let take = match blocking {
                    None => ai <= alpha,
                    Some(_) => ai < alpha,
                };
                if take {
                    alpha = ai;
                    blocking = Some(i);
                }
            }
            if ray && blocking.is_none() {
                return Err(Error::Unbounded);
            }
            axpy(alpha, &dir, &mut y);
            if alpha == 0.0 {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            match blocking {
                Some(i) => {
                    working.push(i);
                    at_subspace_min = false;
                }
                None => at_subspace_min = true,
            }
        }
    }

    fn finish(self, phase: Phase) -> KktSolution {
        let p = self.p;
        let opts = self.opts;
        let m = p.num_constraints();
        let r = p.num_ineq();
        let Phase {
            mut y,
            working,
            mut lambda_w,
        } = phase;
        // refine on the final working set when the reduced problem is strictly convex
        if let Some((ye, le)) = solve_eqp(&p.h, &p.c, p, &working) {
            let feasible = max_ineq_violation(p, &ye) <= opts.tol_feas;
            let signs_ok = working.iter().zip(&le).all(|(&i, &l)| i >= r || l >= -1e-10);
            if feasible && signs_ok {
                y = ye;
                lambda_w = le;
            }
        }
        if lambda_w.len() != working.len() {
            lambda_w = multipliers_for(p, &y, &working);
        }
        let mut lambda = vec![0.0; m];
        for (&i, &l) in working.iter().zip(&lambda_w) {
            lambda[i] = if i < r { l.max(0.0) } else { l };
        }
        let constraint_values = p.constraint_values(&y);
        let mut active_set = Vec::new();
        let mut weakly_active = Vec::new();
        for (i, &gv) in constraint_values.iter().enumerate() {
            if i >= r || gv.abs() <= opts.tol_act {
                active_set.push(i);
                if i < r && lambda[i].abs() <= opts.tol_mult {
                    weakly_active.push(i);
                }
            }
        }
        let stationarity_residual = residuals_raw(p, &y, &lambda).stationarity;
        KktSolution {
            value: p.objective(&y),
            y,
            lambda,
            active_set,
            weakly_active,
            constraint_values,
            stationarity_residual,
            iterations: self.iterations,
        }
    }
}

/// Newton (or zero-curvature ray) step in the reduced space. Returns the
/// step and whether it is a ray along which the objective is linear.
fn reduced_step(hr: &Matrix, gr: &[f64], hscale: f64, gscale: f64) -> (Vec<f64>, bool) {
    if let Some(ch) = Cholesky::new(hr, 1e-14 * hscale) {
        let mut pz = ch.solve(gr);
        pz.iter_mut().for_each(|v| *v = -*v);
        return (pz, false);
    }
    let (vals, vecs) = symmetric_eigen(hr);
    let n = vals.len();
    let curv_tol = 1e-12 * hscale;
    let mut ray = vec![0.0; n];
    let mut is_ray = false;
    for (j, &val) in vals.iter().enumerate() {
        if val <= curv_tol {
            let v = vecs.column(j);
            let comp = dot(&v, gr);
            if comp.abs() > 1e-12 * gscale {
                is_ray = true;
                axpy(-comp, &v, &mut ray);
            }
        }
    }
    if is_ray {
        return (ray, true);
    }
    let mut pz = vec![0.0; n];
    for (j, &val) in vals.iter().enumerate() {
        if val > curv_tol {
            let v = vecs.column(j);
            axpy(-dot(&v, gr) / val, &v, &mut pz);
        }
    }
    (pz, false)
}

/// Equality-constrained QP on the rows `working`; `None` when the reduced
/// Hessian is not positive definite.
pub(crate) fn solve_eqp(
    h: &Matrix,
    c: &[f64],
    p: &QpProblem,
    working: &[usize],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = c.len();
    let k = working.len();
    let hscale = h.max_abs().max(1.0);
    let (yp, z, qr) = if k > 0 {
        let qr = Qr::new(&p.rows_of(working).transpose());
        let rhs: Vec<f64> = working.iter().map(|&i| -p.constraint_offset(i)).collect();
        let u = qr.solve_upper_tr(k, &rhs);
        let mut yp = vec![0.0; d];
        for (j, uj) in u.iter().enumerate() {
            axpy(*uj, &qr.q().column(j), &mut yp);
        }
        let z = qr.q().columns(k, d);
        (yp, z, Some(qr))
    } else {
        (vec![0.0; d], Matrix::identity(d), None)
    };
    let mut y = yp;
    if k < d {
        let hr = h.congruence(&z);
        let ch = Cholesky::new(&hr, 1e-14 * hscale)?;
        let mut g = h.mul_vec(&y);
        axpy(1.0, c, &mut g);
        let u = ch.solve(&z.tr_mul_vec(&g));
        axpy(-1.0, &z.mul_vec(&u), &mut y);
    }
    let mut g = h.mul_vec(&y);
    axpy(1.0, c, &mut g);
    let lambda = match qr {
        Some(qr) => {
            let qtg: Vec<f64> = (0..k).map(|j| -dot(&qr.q().column(j), &g)).collect();
            qr.solve_upper(k, &qtg)
        }
        None => Vec::new(),
    };
    Some((y, lambda))
}

/// Least-squares multipliers of the working rows at `y`.
fn multipliers_for(p: &QpProblem, y: &[f64], working: &[usize]) -> Vec<f64> {
    if working.is_empty() {
        return Vec::new();
    }
    let g = p.gradient(y);
    let qr = Qr::new(&p.rows_of(working).transpose());
    let k = working.len();
    let qtg: Vec<f64> = (0..k).map(|j| -dot(&qr.q().column(j), &g)).collect();
    qr.solve_upper(k, &qtg)
}

fn max_ineq_violation(p: &QpProblem, y: &[f64]) -> f64 {
    (0..p.num_ineq())
        .map(|i| p.constraint_value(i, y))
        .fold(0.0, f64::max)
}

/// Greedy subset of `cand` (in order) with linearly independent rows.
pub(crate) fn independent_rows(p: &QpProblem, cand: &[usize]) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for &i in cand {
        if kept.contains(&i) {
            continue;
        }
        let row = p.constraint_row(i);
        let rn = norm2(row);
        if rn == 0.0 {
            continue;
        }
        let mut res = row.to_vec();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &basis {
                let s = dot(q, &res);
                axpy(-s, q, &mut res);
            }
        }
        let n = norm2(&res);
        if n > 1e-10 * rn {
            res.iter_mut().for_each(|v| *v /= n);
            basis.push(res);
            kept.push(i);
        }
    }
    kept
}
