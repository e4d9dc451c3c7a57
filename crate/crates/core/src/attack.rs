//! Model-targeted poisoning: move one data point at a time along the
//! direction of steepest semi-derivative descent of the attacker's
//! objective `G(x) = ‖P ŷ(x) − y*‖²`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, lu_solve, norm2, sub, Matrix};
use crate::qp::{solve_qp_guided, KktSolution, QpOptions};
use crate::random::unit_vector;
use crate::sensitivity::{build_auxiliary, AuxiliaryProblem, SensitivityOptions};
use crate::victim::VictimModel;

/// Upper-level objective `G(x, ŷ)` minimized by the attacker.
pub trait UpperObjective {
    fn value(&self, x: &[f64], y: &[f64]) -> f64;
    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    /// Direct dependence on the data; zero for most objectives.
    fn grad_x(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
}

/// Squared distance between two equally long vectors.
pub fn objective(selected: &[f64], target: &[f64]) -> Result<f64> {
    if selected.len() != target.len() {
        return Err(Error::DimensionMismatch {
            what: "target",
            expected: selected.len(),
            got: target.len(),
        });
    }
    Ok(selected.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// `G = ‖P y − y*‖²` for a linear selector `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetDistance {
    map: Matrix,
    target: Vec<f64>,
}

impl TargetDistance {
    pub fn new(map: Matrix, target: Vec<f64>) -> Result<Self> {
        if map.rows() != target.len() {
            return Err(Error::DimensionMismatch {
                what: "target",
                expected: map.rows(),
                got: target.len(),
            });
        }
        Ok(Self { map, target })
    }

    /// Targets the whole solution vector.
    pub fn full(target: Vec<f64>) -> Self {
        Self {
            map: Matrix::identity(target.len()),
            target,
        }
    }

    /// Targets the entries `indices` of a `dim_var` solution.
    pub fn select(dim_var: usize, indices: &[usize], target: Vec<f64>) -> Result<Self> {
        let mut map = Matrix::zeros(indices.len(), dim_var);
        for (r, &i) in indices.iter().enumerate() {
            if i >= dim_var {
                return Err(Error::DimensionMismatch {
                    what: "selector index",
                    expected: dim_var,
                    got: i,
                });
            }
            map[(r, i)] = 1.0;
        }
        Self::new(map, target)
    }

    /// `G = (y_i − y_j)²`, e.g. equal SVM weights.
    pub fn equal_pair(dim_var: usize, i: usize, j: usize) -> Result<Self> {
        let mut map = Matrix::zeros(1, dim_var);
        if i >= dim_var || j >= dim_var || i == j {
            return Err(Error::InvalidConfig("equal-pair indices must be distinct and in range"));
        }
        map[(0, i)] = 1.0;
        map[(0, j)] = -1.0;
        Self::new(map, vec![0.0])
    }

    pub fn selected(&self, y: &[f64]) -> Vec<f64> {
        self.map.mul_vec(y)
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }
}

impl UpperObjective for TargetDistance {
    fn value(&self, _x: &[f64], y: &[f64]) -> f64 {
        self.selected(y)
            .iter()
            .zip(&self.target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn grad_y(&self, _x: &[f64], y: &[f64]) -> Vec<f64> {
        let r: Vec<f64> = sub(&self.selected(y), &self.target).iter().map(|v| 2.0 * v).collect();
        self.map.tr_mul_vec(&r)
    }

    fn grad_x(&self, x: &[f64], _y: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
}

/// `G = aᵀx + bᵀy`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearObjective {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl UpperObjective for LinearObjective {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(&self.a, x) + dot(&self.b, y)
    }

    fn grad_y(&self, _x: &[f64], _y: &[f64]) -> Vec<f64> {
        self.b.clone()
    }

    fn grad_x(&self, _x: &[f64], _y: &[f64]) -> Vec<f64> {
        self.a.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepMode {
    /// `η = −DG/L̂`, clipped to the feasible region.
    FixedCurvature,
    /// Start at `max_step` and halve until `G` decreases.
    Backtracking,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeMode {
    /// Score a point by the best of its ± coordinate directions.
    CoordinateBest,
    /// Score a point by `|DG|` along one random unit direction.
    Random,
}

/// Bounds applied to every data point, feature by feature.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackConfig {
    /// Radius of the ball around the pristine data.
    pub delta: f64,
    pub bounds: Option<FeatureBounds>,
    pub curvature_bound: f64,
    pub step_mode: StepMode,
    /// First trial step of backtracking.
    pub max_step: f64,
    pub num_random_dirs: usize,
    pub probe: ProbeMode,
    pub tol_improve: f64,
    /// A direction counts as descent when `DG < −tol_descent`.
    pub tol_descent: f64,
    /// `G ≤ tol_optimal` counts as an attained target.
    pub tol_optimal: f64,
    pub max_iters: usize,
    pub seed: u64,
    pub qp: QpOptions,
    pub sensitivity: SensitivityOptions,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            delta: 1.0,
            bounds: None,
            curvature_bound: 1.0,
            step_mode: StepMode::Backtracking,
            max_step: 0.5,
            num_random_dirs: 8,
            probe: ProbeMode::CoordinateBest,
            tol_improve: 0.0,
            tol_descent: 1e-10,
            tol_optimal: 1e-12,
            max_iters: 200,
            seed: 0,
            qp: QpOptions::default(),
            sensitivity: SensitivityOptions {
                best_effort: true,
                ..SensitivityOptions::default()
            },
        }
    }
}

impl AttackConfig {
    pub fn validate(&self, point_dim: usize) -> Result<()> {
        if !(self.delta >= 0.0) {
            return Err(Error::InvalidConfig("delta must be nonnegative"));
        }
        if !(self.curvature_bound > 0.0) {
            return Err(Error::InvalidConfig("curvature bound must be positive"));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig("max step must be positive"));
        }
        if let Some(b) = &self.bounds {
            if b.lo.len() != point_dim || b.hi.len() != point_dim {
                return Err(Error::DimensionMismatch {
                    what: "feature bounds",
                    expected: point_dim,
                    got: b.lo.len().min(b.hi.len()),
                });
            }
            if b.lo.iter().zip(&b.hi).any(|(l, h)| !(l <= h)) {
                return Err(Error::InvalidConfig("lower bound exceeds upper bound"));
            }
        }
        Ok(())
    }
}

/// `Ω`: the box bounds intersected with the ball `‖x − x̄‖ ≤ δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    pub center: Vec<f64>,
    pub delta: f64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Region {
    pub fn new(center: &[f64], delta: f64, bounds: Option<&FeatureBounds>) -> Self {
        let n = center.len();
        let (lo, hi) = match bounds {
            Some(b) => {
                let k = b.lo.len();
                ((0..n).map(|j| b.lo[j % k]).collect(), (0..n).map(|j| b.hi[j % k]).collect())
            }
            None => (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n]),
        };
        Self {
            center: center.to_vec(),
            delta,
            lo,
            hi,
        }
    }

    pub fn displacement(&self, x: &[f64]) -> f64 {
        norm2(&sub(x, &self.center))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .enumerate()
            .all(|(j, &v)| self.lo[j] <= v && v <= self.hi[j])
            && self.displacement(x) <= self.delta
    }

    /// Whether `x` sits on the ball boundary (within a relative `1e-9`).
    pub fn at_budget(&self, x: &[f64]) -> bool {
        self.displacement(x) >= self.delta * (1.0 - 1e-9)
    }

    /// Largest `t ≥ 0` with `x + t·d ∈ Ω`.
    pub fn max_step(&self, x: &[f64], d: &[f64]) -> f64 {
        let mut t = f64::INFINITY;
        for (j, (&xj, &dj)) in x.iter().zip(d).enumerate() {
            if dj > 0.0 {
                t = t.min((self.hi[j] - xj) / dj);
            } else if dj < 0.0 {
                t = t.min((self.lo[j] - xj) / dj);
            }
        }
        let u = sub(x, &self.center);
        let dd = dot(d, d);
        if dd > 0.0 {
            let ud = dot(&u, d);
            let disc = ud * ud - dd * (dot(&u, &u) - self.delta * self.delta);
            t = t.min((-ud + libm::sqrt(disc.max(0.0))) / dd);
        }
        t.max(0.0)
    }

    /// Clamps to the box, then pulls radially toward the center until the
    /// ball constraint holds. The center lies in the box, so the result does too.
    pub fn clip(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[j], self.hi[j]);
        }
        let mut r = self.displacement(x);
        while r > self.delta {
            let s = self.delta / r * (1.0 - 4.0 * f64::EPSILON);
            for (v, c) in x.iter_mut().zip(&self.center) {
                *v = c + (*v - c) * s;
            }
            r = self.displacement(x);
        }
    }
}

/// Candidate unit directions (local to one point) that keep a `1e-9` step
/// inside `Ω`: the ± coordinate axes and `num_random` random unit vectors.
pub fn feasible_directions(
    region: &Region,
    x: &[f64],
    point: usize,
    point_dim: usize,
    num_random: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<f64>>> {
    let mut cands = Vec::with_capacity(2 * point_dim + num_random);
    for f in 0..point_dim {
        for s in [1.0, -1.0] {
            let mut d = vec![0.0; point_dim];
            d[f] = s;
            cands.push(d);
        }
    }
    for _ in 0..num_random {
        cands.push(unit_vector(rng, point_dim));
    }
    cands.retain(|d| step_is_feasible(region, x, point, d));
    if cands.is_empty() {
        Err(Error::EmptyDirectionSet(point))
    } else {
        Ok(cands)
    }
}

fn step_is_feasible(region: &Region, x: &[f64], point: usize, local: &[f64]) -> bool {
    let mut probe = x.to_vec();
    let k = local.len();
    axpy(1e-9, local, &mut probe[point * k..(point + 1) * k]);
    region.contains(&probe)
}

fn embed(local: &[f64], point: usize, dim_data: usize) -> Vec<f64> {
    let mut d = vec![0.0; dim_data];
    let k = local.len();
    d[point * k..(point + 1) * k].copy_from_slice(local);
    d
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Target attained (`G ≤ tol_optimal`).
    Optimal,
    /// No descent step left and the iterate sits on the budget boundary.
    Budget,
    /// No candidate direction decreases `G`, or the improvement fell below tolerance.
    Stalled,
    MaxIters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub k: usize,
    pub objective_before: f64,
    pub objective_after: f64,
    /// Perturbed point; `None` for full-gradient baseline steps.
    pub point: Option<usize>,
    /// Unit direction in the point's coordinates (all coordinates for the baseline).
    pub direction: Vec<f64>,
    pub dg: f64,
    pub step: f64,
    /// `‖x^{k+1} − x̄‖`
    pub displacement: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackTrace {
    pub records: Vec<StepRecord>,
    /// `G(x^0), G(x^1), …`
    pub objective_history: Vec<f64>,
    pub initial_x: Vec<f64>,
    pub final_x: Vec<f64>,
    pub final_solution: KktSolution,
    pub termination: Termination,
    /// Smallest directional value seen in the last round when the run stalled.
    pub certificate: Option<f64>,
}

impl AttackTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objective_history.last().expect("history starts with G(x̄)")
    }
}

/// Iterate of an attack.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackState {
    pub x: Vec<f64>,
    pub solution: KktSolution,
    pub objective: f64,
}

/// Directional derivative `DG(x)(Δx) = ∇_yG·Dŷ(x)(Δx) + ∇_xG·Δx`.
pub fn directional_derivative<O: UpperObjective + ?Sized>(
    aux: &AuxiliaryProblem,
    objective: &O,
    state: &AttackState,
    dx: &[f64],
) -> Result<f64> {
    let gy = objective.grad_y(&state.x, &state.solution.y);
    let gx = objective.grad_x(&state.x, &state.solution.y);
    let dy = aux.semi_derivative(dx)?.dy;
    Ok(dot(&gy, &dy) + dot(&gx, dx))
}

/// Semi-derivative attack (one point per iteration).
pub struct Attack<'a, M: ?Sized, O: ?Sized> {
    model: &'a M,
    objective: &'a O,
    config: AttackConfig,
    region: Region,
    rng: ChaCha8Rng,
}

struct Evaluator {
    aux: AuxiliaryProblem,
    gy: Vec<f64>,
    gx: Vec<f64>,
}

impl Evaluator {
    fn dg(&self, dx: &[f64]) -> Result<f64> {
        let dy = self.aux.semi_derivative(dx)?.dy;
        Ok(dot(&self.gy, &dy) + dot(&self.gx, dx))
    }
}

impl<'a, M, O> Attack<'a, M, O>
where
    M: VictimModel + ?Sized,
    O: UpperObjective + ?Sized,
{
    pub fn new(model: &'a M, objective: &'a O, x_bar: &[f64], config: AttackConfig) -> Result<Self> {
        if x_bar.len() != model.dim_data() {
            return Err(Error::DimensionMismatch {
                what: "pristine data",
                expected: model.dim_data(),
                got: x_bar.len(),
            });
        }
        config.validate(model.point_dim())?;
        let region = Region::new(x_bar, config.delta, config.bounds.as_ref());
        if !region.contains(x_bar) {
            return Err(Error::InvalidConfig("pristine data violate the feature bounds"));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Ok(Self {
            model,
            objective,
            config,
            region,
            rng,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn config(&self) -> &AttackConfig {
        &self.config
    }

    pub fn initial_state(&self) -> Result<AttackState> {
        let x = self.region.center.clone();
        let solution = self.model.solve(&x, &self.config.qp)?;
        let objective = self.objective.value(&x, &solution.y);
        Ok(AttackState {
            x,
            solution,
            objective,
        })
    }

    fn evaluate_at(&self, prev: &AttackState, x: Vec<f64>) -> Result<AttackState> {
        let p = self.model.assemble(&x)?;
        let solution = solve_qp_guided(&p, &self.config.qp, &prev.solution.active_set)?;
        let objective = self.objective.value(&x, &solution.y);
        Ok(AttackState {
            x,
            solution,
            objective,
        })
    }

    /// Tries a step along `d` (full coordinates, unit norm). Returns the new
    /// state and step length, or `None` if `G` does not decrease.
    fn try_step(&self, state: &AttackState, d: &[f64], dg: f64) -> Result<Option<(AttackState, f64)>> {
        let t_max = self.region.max_step(&state.x, d);
        if t_max <= 0.0 {
            return Ok(None);
        }
        let mut eta = match self.config.step_mode {
            StepMode::FixedCurvature => (-dg / self.config.curvature_bound).min(t_max),
            StepMode::Backtracking => self.config.max_step.min(t_max),
        };
        loop {
            let mut x = state.x.clone();
            axpy(eta, d, &mut x);
            self.region.clip(&mut x);
            let next = self.evaluate_at(state, x)?;
            if next.objective < state.objective {
                return Ok(Some((next, eta)));
            }
            if self.config.step_mode == StepMode::FixedCurvature {
                return Ok(None);
            }
            eta *= 0.5;
            if eta < 1e-8 {
                return Ok(None);
            }
        }
    }

    /// One iteration of the attack. `Err(Stalled)` carries the smallest
    /// directional value over every candidate evaluated.
    pub fn step(&mut self, state: &AttackState, k: usize) -> Result<(AttackState, StepRecord)> {
        let model = self.model;
        let n = model.dim_data();
        let pd = model.point_dim();
        let points = model.num_points();
        let eval = Evaluator {
            aux: build_auxiliary(model, &state.x, &state.solution, &self.config.sensitivity)?,
            gy: self.objective.grad_y(&state.x, &state.solution.y),
            gx: self.objective.grad_x(&state.x, &state.solution.y),
        };
        let mut min_dg = f64::INFINITY;

        // probe every point
        let mut axis_cache: Vec<Vec<Option<f64>>> = vec![Vec::new(); points];
        let mut scores = vec![0.0; points];
        for p in 0..points {
            match self.config.probe {
                ProbeMode::CoordinateBest => {
                    let mut vals = vec![None; 2 * pd];
                    let mut best = 0.0_f64;
                    for f in 0..pd {
                        for (s, sign) in [1.0, -1.0].into_iter().enumerate() {
                            let mut local = vec![0.0; pd];
                            local[f] = sign;
                            if !step_is_feasible(&self.region, &state.x, p, &local) {
                                continue;
                            }
                            let v = eval.dg(&embed(&local, p, n))?;
                            min_dg = min_dg.min(v);
                            best = best.max(-v);
                            vals[2 * f + s] = Some(v);
                        }
                    }
                    scores[p] = best;
                    axis_cache[p] = vals;
                }
                ProbeMode::Random => {
                    let u = unit_vector(&mut self.rng, pd);
                    let neg: Vec<f64> = u.iter().map(|v| -v).collect();
                    let dir = if step_is_feasible(&self.region, &state.x, p, &u) {
                        Some(u)
                    } else if step_is_feasible(&self.region, &state.x, p, &neg) {
                        Some(neg)
                    } else {
                        None
                    };
                    if let Some(d) = dir {
                        let v = eval.dg(&embed(&d, p, n))?;
                        min_dg = min_dg.min(v);
                        scores[p] = v.abs();
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..points).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));

        for p in order {
            let mut cands = match feasible_directions(
                &self.region,
                &state.x,
                p,
                pd,
                self.config.num_random_dirs,
                &mut self.rng,
            ) {
                Ok(c) => c,
                Err(Error::EmptyDirectionSet(_)) => continue,
                Err(e) => return Err(e),
            };
            let mut vals = Vec::with_capacity(cands.len() + 1);
            for d in &cands {
                let cached = d
                    .iter()
                    .position(|&v| v.abs() == 1.0)
                    .filter(|_| d.iter().filter(|&&v| v != 0.0).count() == 1)
                    .and_then(|f| {
                        let s = if d[f] > 0.0 { 0 } else { 1 };
                        axis_cache[p].get(2 * f + s).copied().flatten()
                    });
                let v = match cached {
                    Some(v) => v,
                    None => eval.dg(&embed(d, p, n))?,
                };
                vals.push(v);
            }
            // steepest direction assembled from the axis values
            let mut g = vec![0.0; pd];
            let mut complete = true;
            for f in 0..pd {
                let find = |sign: f64| {
                    cands
                        .iter()
                        .zip(&vals)
                        .find(|(d, _)| d[f] == sign && d.iter().filter(|&&v| v != 0.0).count() == 1)
                        .map(|(_, &v)| v)
                };
                match (find(1.0), find(-1.0)) {
                    (Some(a), Some(b)) => g[f] = 0.5 * (a - b),
                    _ => complete = false,
                }
            }
            let gn = norm2(&g);
            if complete && gn > 0.0 {
                let d: Vec<f64> = g.iter().map(|v| -v / gn).collect();
                if step_is_feasible(&self.region, &state.x, p, &d) {
                    vals.push(eval.dg(&embed(&d, p, n))?);
                    cands.push(d);
                }
            }
            let (best, &dg) = vals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty candidate set");
            min_dg = min_dg.min(dg);
            if dg >= -self.config.tol_descent {
                continue;
            }
            let local = cands.swap_remove(best);
            let full = embed(&local, p, n);
            if let Some((next, eta)) = self.try_step(state, &full, dg)? {
                let record = StepRecord {
                    k,
                    objective_before: state.objective,
                    objective_after: next.objective,
                    point: Some(p),
                    direction: local,
                    dg,
                    step: eta,
                    displacement: self.region.displacement(&next.x),
                };
                return Ok((next, record));
            }
        }
        Err(Error::Stalled {
            min_dg: if min_dg.is_finite() { min_dg } else { 0.0 },
        })
    }

    pub fn run(mut self) -> Result<AttackTrace> {
        let state = self.initial_state()?;
        let cfg = self.config.clone();
        let region = self.region.clone();
        drive(state, &cfg, &region, |s, k| self.step(s, k))
    }
}

fn drive<F>(mut state: AttackState, cfg: &AttackConfig, region: &Region, mut step: F) -> Result<AttackTrace>
where
    F: FnMut(&AttackState, usize) -> Result<(AttackState, StepRecord)>,
{
    let initial_x = state.x.clone();
    let mut records = Vec::new();
    let mut history = vec![state.objective];
    let mut certificate = None;
    let termination = loop {
        let k = records.len();
        if state.objective <= cfg.tol_optimal {
            break Termination::Optimal;
        }
        if k >= cfg.max_iters {
            break Termination::MaxIters;
        }
        match step(&state, k) {
            Ok((next, record)) => {
                let gain = state.objective - next.objective;
                history.push(next.objective);
                records.push(record);
                state = next;
                if gain < cfg.tol_improve {
                    break if state.objective <= cfg.tol_optimal {
                        Termination::Optimal
                    } else {
                        Termination::Stalled
                    };
                }
            }
            Err(Error::Stalled { min_dg }) => {
                certificate = Some(min_dg);
                break if region.at_budget(&state.x) {
                    Termination::Budget
                } else {
                    Termination::Stalled
                };
            }
            Err(e) => return Err(e),
        }
    };
    Ok(AttackTrace {
        records,
        objective_history: history,
        initial_x,
        final_x: state.x,
        final_solution: state.solution,
        termination,
        certificate,
    })
}

pub fn run_attack<M, O>(model: &M, objective: &O, x_bar: &[f64], config: AttackConfig) -> Result<AttackTrace>
where
    M: VictimModel + ?Sized,
    O: UpperObjective + ?Sized,
{
    Attack::new(model, objective, x_bar, config)?.run()
}

/// Gradient of `G` from the unconstrained implicit-function formula,
/// `∇_xG = −(∇²_{yx}g₀)ᵀ (∇²_{yy}g₀)⁻¹ ∇_yG + ∂_xG`. Constraints are ignored.
pub fn baseline_gradient<M, O>(model: &M, objective: &O, x: &[f64], y: &[f64]) -> Result<Vec<f64>>
where
    M: VictimModel + ?Sized,
    O: UpperObjective + ?Sized,
{
    let p = model.assemble(x)?;
    let m = p.num_constraints();
    let cross = model.cross_hessian(x, y, &vec![0.0; m])?;
    let gy = objective.grad_y(x, y);
    let w = lu_solve(p.hessian(), &gy, 1e-14 * p.hessian().max_abs().max(1.0)).ok_or(Error::SingularHessian)?;
    let mut g = objective.grad_x(x, y);
    axpy(-1.0, &cross.tr_mul_vec(&w), &mut g);
    Ok(g)
}

/// Projected gradient descent on `G` with the baseline gradient.
pub fn run_gradient_baseline<M, O>(
    model: &M,
    objective: &O,
    x_bar: &[f64],
    config: AttackConfig,
) -> Result<AttackTrace>
where
    M: VictimModel + ?Sized,
    O: UpperObjective + ?Sized,
{
    let attack = Attack::new(model, objective, x_bar, config)?;
    let state = attack.initial_state()?;
    let cfg = attack.config.clone();
    let region = attack.region.clone();
    drive(state, &cfg, &region, |s, k| {
        let g = baseline_gradient(model, objective, &s.x, &s.solution.y)?;
        let gn = norm2(&g);
        if !(gn > cfg.tol_descent) {
            return Err(Error::Stalled { min_dg: -gn });
        }
        let d: Vec<f64> = g.iter().map(|v| -v / gn).collect();
        let mut eta = match cfg.step_mode {
            StepMode::FixedCurvature => gn / cfg.curvature_bound,
            StepMode::Backtracking => cfg.max_step,
        };
        loop {
            let mut x = s.x.clone();
            axpy(eta, &d, &mut x);
            region.clip(&mut x);
            let next = attack.evaluate_at(s, x)?;
            if next.objective < s.objective {
                let record = StepRecord {
                    k,
                    objective_before: s.objective,
                    objective_after: next.objective,
                    point: None,
                    direction: d,
                    dg: -gn,
                    step: eta,
                    displacement: region.displacement(&next.x),
                };
                return Ok((next, record));
            }
            eta *= 0.5;
            if cfg.step_mode == StepMode::FixedCurvature || eta < 1e-8 {
                return Err(Error::Stalled { min_dg: -gn });
            }
        }
    })
}

/// `(1 − σ/L)^k`
pub fn bound_factor(sigma: f64, l: f64, k: usize) -> f64 {
    libm::pow((1.0 - sigma / l).max(0.0), k as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub factor: f64,
    /// `|G_k| ≤ (1 − σ/L)^k |G_0|` for every recorded `k`, up to the slack.
    pub holds: bool,
    /// First iteration violating the bound.
    pub first_violation: Option<usize>,
    /// `G_{k+1} / G_k`
    pub contractions: Vec<f64>,
}

impl ConvergenceReport {
    pub fn worst_contraction(&self) -> f64 {
        self.contractions.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks the geometric rate against the objective history, assuming the
/// minimum value is zero.
pub fn convergence_check(trace: &AttackTrace, sigma: f64, l: f64, rel_slack: f64) -> ConvergenceReport {
    let h = &trace.objective_history;
    let g0 = h[0].abs();
    let first_violation = h
        .iter()
        .enumerate()
        .find(|(k, g)| g.abs() > bound_factor(sigma, l, *k) * g0 * (1.0 + rel_slack) + 1e-300)
        .map(|(k, _)| k);
    let contractions = h
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    ConvergenceReport {
        factor: 1.0 - sigma / l,
        holds: first_violation.is_none(),
        first_violation,
        contractions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::victim::{ParametricQpModel, ToyBilevelModel};

    #[test]
    fn objective_examples() {
        assert_eq!(objective(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(objective(&[3.0, 4.0], &[0.0, 0.0]).unwrap(), 25.0);
        let g = TargetDistance::equal_pair(3, 0, 1).unwrap();
        assert!((g.value(&[], &[-7.64, -13.34, 0.0]) - 32.49).abs() < 1e-9);
        assert!(matches!(objective(&[1.0], &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kink_directional_values() {
        let model = ParametricQpModel::projection_kink();
        let obj = TargetDistance::full(vec![1.0]);
        let attack = Attack::new(&model, &obj, &[0.0], AttackConfig::default()).unwrap();
        let st = attack.initial_state().unwrap();
        let aux = build_auxiliary(&model, &st.x, &st.solution, &attack.config.sensitivity).unwrap();
        assert!((directional_derivative(&aux, &obj, &st, &[1.0]).unwrap() + 2.0).abs() < 1e-12);
        assert!(directional_derivative(&aux, &obj, &st, &[-1.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn toy_prefers_moving_right() {
        let obj = LinearObjective {
            a: vec![-1.0],
            b: vec![-2.0],
        };
        let model = ToyBilevelModel;
        let mut attack = Attack::new(&model, &obj, &[0.0], AttackConfig::default()).unwrap();
        let st = attack.initial_state().unwrap();
        let aux = build_auxiliary(&model, &st.x, &st.solution, &attack.config.sensitivity).unwrap();
        let right = directional_derivative(&aux, &obj, &st, &[1.0]).unwrap();
        let left = directional_derivative(&aux, &obj, &st, &[-1.0]).unwrap();
        assert!((right + 3.0).abs() < 1e-6 && (left + 1.0).abs() < 1e-6);
        let (_, rec) = attack.step(&st, 0).unwrap();
        assert_eq!(rec.direction, vec![1.0]);
    }

    #[test]
    fn fixed_step_on_kink() {
        let model = ParametricQpModel::projection_kink();
        let obj = TargetDistance::full(vec![1.0]);
        let cfg = AttackConfig {
            delta: 2.0,
            curvature_bound: 4.0,
            step_mode: StepMode::FixedCurvature,
            ..AttackConfig::default()
        };
        let mut attack = Attack::new(&model, &obj, &[0.0], cfg).unwrap();
        let st = attack.initial_state().unwrap();
        let (next, rec) = attack.step(&st, 0).unwrap();
        assert_eq!(rec.direction, vec![1.0]);
        assert!((rec.step - 0.5).abs() < 1e-12);
        assert!((next.x[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn attained_target_stalls_at_zero() {
        let model = ParametricQpModel::projection_kink();
        let obj = TargetDistance::full(vec![0.3]);
        let mut attack = Attack::new(&model, &obj, &[0.3], AttackConfig::default()).unwrap();
        let st = attack.initial_state().unwrap();
        assert_eq!(attack.step(&st, 0).unwrap_err(), Error::Stalled { min_dg: 0.0 });
        let trace = run_attack(&model, &obj, &[0.3], AttackConfig::default()).unwrap();
        assert_eq!(trace.termination, Termination::Optimal);
        assert!(trace.records.is_empty());
    }

    #[test]
    fn region_geometry() {
        let b = FeatureBounds {
            lo: vec![-1.0, -1.0],
            hi: vec![0.5, 1.0],
        };
        let r = Region::new(&[0.0, 0.0], 1.0, Some(&b));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let interior = feasible_directions(&r, &[0.0, 0.0], 0, 2, 3, &mut rng).unwrap();
        assert_eq!(interior.len(), 7);
        let on_face = feasible_directions(&r, &[0.5, 0.0], 0, 2, 0, &mut rng).unwrap();
        assert!(!on_face.contains(&vec![1.0, 0.0]));
        let on_ball = feasible_directions(&r, &[0.0, 1.0], 0, 2, 0, &mut rng).unwrap();
        assert!(!on_ball.contains(&vec![0.0, 1.0]));
        assert!(on_ball.contains(&vec![0.0, -1.0]));
        assert!((r.max_step(&[0.0, 0.0], &[0.0, 1.0]) - 1.0).abs() < 1e-15);
        let mut x = vec![3.0, -4.0];
        r.clip(&mut x);
        assert!(r.contains(&x));
    }

    #[test]
    fn bound_factor_examples() {
        assert!((bound_factor(1.0, 2.0, 3) - 0.125).abs() < 1e-15);
        assert_eq!(bound_factor(2.0, 2.0, 1), 0.0);
    }

    #[test]
    fn config_validation() {
        let bad = AttackConfig {
            delta: -1.0,
            ..AttackConfig::default()
        };
        assert!(matches!(bad.validate(1), Err(Error::InvalidConfig(_))));
        let crossed = AttackConfig {
            bounds: Some(FeatureBounds {
                lo: vec![1.0],
                hi: vec![0.0],
            }),
            ..AttackConfig::default()
        };
        assert!(crossed.validate(1).is_err());
    }

    #[test]
    fn zero_budget_ends_without_steps() {
        let model = ParametricQpModel::projection_kink();
        let obj = TargetDistance::full(vec![1.0]);
        let cfg = AttackConfig {
            delta: 0.0,
            ..AttackConfig::default()
        };
        let trace = run_attack(&model, &obj, &[0.0], cfg).unwrap();
        assert!(trace.records.is_empty());
        assert_eq!(trace.termination, Termination::Budget);
    }
}
