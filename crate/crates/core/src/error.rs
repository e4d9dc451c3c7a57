use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("quadratic program is infeasible (max violation {violation:e})")]
    Infeasible { violation: f64 },
    #[error("quadratic program is unbounded below on its feasible set")]
    Unbounded,
    #[error("active-set iteration limit ({0}) reached")]
    MaxIterations(usize),
    #[error("label {label} at point {index} is not -1 or +1")]
    BadLabel { index: usize, label: f64 },
    #[error("argument {value} outside the model domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },
    #[error("regularity conditions failed (licq: {licq}, ssoc: {ssoc})")]
    RegularityFailure { licq: bool, ssoc: bool },
    #[error("auxiliary problem infeasible: active-set classification is inconsistent; try a tighter activity tolerance")]
    AuxInfeasible,
    #[error("auxiliary problem unbounded: curvature condition on the critical subspace fails")]
    AuxUnbounded,
    #[error("perturbation direction must be nonzero")]
    ZeroDirection,
    #[error("no feasible attack direction at point {0}")]
    EmptyDirectionSet(usize),
    #[error("attack stalled: no candidate direction decreases the objective (min directional value {min_dg:e})")]
    Stalled { min_dg: f64 },
    #[error("objective Hessian in the model variables is singular")]
    SingularHessian,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}
