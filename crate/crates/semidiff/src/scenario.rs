//! The lane-change SVM scenario: dataset → normalized SVM → attack.

use std::str::FromStr;

use semidiff_core::attack::TargetDistance;
use semidiff_core::qp::{KktSolution, QpOptions};
use semidiff_core::{SvmModel, VictimModel};
use serde::Serialize;

use crate::data::{DataError, Dataset, Normalization};

pub const DEFAULT_N: usize = 40;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_C: f64 = 10.0;

/// Training-set classification report for the `+1` (lane change) class.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub w: [f64; 2],
}

#[derive(Debug)]
pub struct Scenario {
    pub raw: Dataset,
    pub normalized: Dataset,
    pub stats: Normalization,
    pub model: SvmModel,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Model(#[from] semidiff_core::Error),
}

impl Scenario {
    pub fn new(raw: Dataset, c: f64, ridge: f64) -> Result<Self, ScenarioError> {
        if raw.is_empty() {
            return Err(DataError::Empty.into());
        }
        let (normalized, stats) = raw.normalize()?;
        let model = SvmModel::new(normalized.features_flat(), normalized.labels(), c, ridge)?;
        Ok(Self {
            raw,
            normalized,
            stats,
            model,
        })
    }

    pub fn x_bar(&self) -> &[f64] {
        self.model.features()
    }

    pub fn solve(&self, x: &[f64]) -> Result<KktSolution, semidiff_core::Error> {
        self.model.solve(x, &QpOptions::default())
    }

    pub fn report(&self, x: &[f64], y: &[f64]) -> TrainReport {
        let (mut tp, mut fp, mut fneg) = (0.0, 0.0, 0.0);
        for (pt, &l) in x.chunks(2).zip(self.model.labels()) {
            let pred = SvmModel::predict(y, pt);
            match (pred > 0.0, l > 0.0) {
                (true, true) => tp += 1.0,
                (true, false) => fp += 1.0,
                (false, true) => fneg += 1.0,
                _ => {}
            }
        }
        let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fneg);
        TrainReport {
            precision,
            recall,
            f1: ratio(2.0 * precision * recall, precision + recall),
            w: SvmModel::weights(y),
        }
    }

    pub fn accuracy(&self, x: &[f64], y: &[f64]) -> f64 {
        let hits = x
            .chunks(2)
            .zip(self.model.labels())
            .filter(|(pt, &l)| SvmModel::predict(y, pt) == l)
            .count();
        hits as f64 / self.model.num_samples() as f64
    }

    pub fn objective(&self, spec: &TargetSpec, pristine: &KktSolution) -> TargetDistance {
        let d = self.model.dim_var();
        match *spec {
            TargetSpec::EqualWeights => TargetDistance::equal_pair(d, 0, 1).expect("svm has two weights"),
            TargetSpec::Pristine => {
                TargetDistance::select(d, &[0, 1], pristine.y[..2].to_vec()).expect("valid indices")
            }
            TargetSpec::Weights(a, b) => TargetDistance::select(d, &[0, 1], vec![a, b]).expect("valid indices"),
        }
    }
}

/// Attacker's target model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetSpec {
    /// `w₁ = w₂`
    EqualWeights,
    /// The pristine weights (already attained).
    Pristine,
    Weights(f64, f64),
}

impl FromStr for TargetSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "equal-weights" | "w1=w2" => Ok(Self::EqualWeights),
            "pristine" => Ok(Self::Pristine),
            other => {
                let parts: Vec<&str> = other.split(',').collect();
                let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("target `{s}`: {e}"));
                match parts.as_slice() {
                    [a, b] => Ok(Self::Weights(parse(a)?, parse(b)?)),
                    _ => Err(format!(
                        "target `{s}`: expected `equal-weights`, `pristine` or `w1,w2`"
                    )),
                }
            }
        }
    }
}

impl std::fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::EqualWeights => f.write_str("equal-weights"),
            Self::Pristine => f.write_str("pristine"),
            Self::Weights(a, b) => write!(f, "{a},{b}"),
        }
    }
}
