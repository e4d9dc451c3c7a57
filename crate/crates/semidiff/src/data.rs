//! Lane-change feature tables: CSV IO, a seeded synthetic generator and
//! z-score normalization.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub const HEADER: [&str; 3] = ["lateral_velocity", "space_headway", "label"];
pub const FEATURES: [&str; 2] = ["lateral_velocity", "space_headway"];

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("expected header `lateral_velocity,space_headway,label`, found `{found}`")]
    BadHeader { found: String },
    #[error("row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: &'static str,
        message: String,
    },
    #[error("row {row}: label `{label}` is not -1 or +1")]
    BadLabel { row: usize, label: String },
    #[error("feature `{feature}` has zero variance")]
    DegenerateFeature { feature: &'static str },
    #[error("dataset is empty")]
    Empty,
    #[error("synthetic size must be even and at least 4, got {0}")]
    InvalidSize(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// m/s
    pub lateral_velocity: f64,
    /// m
    pub space_headway: f64,
    pub label: f64,
}

impl Sample {
    pub fn features(&self) -> [f64; 2] {
        [self.lateral_velocity, self.space_headway]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub rows: Vec<Sample>,
    /// Generator seed for synthetic data.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub feature: String,
    pub mean: f64,
    pub std: f64,
}

/// Per-feature mean and population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub features: Vec<FeatureStats>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn parse_field(raw: &str, row: usize, column: &'static str) -> Result<f64, DataError> {
    raw.trim().parse::<f64>().map_err(|e| DataError::Parse {
        row,
        column,
        message: format!("`{raw}`: {e}"),
    })
}

impl Dataset {
    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(io_err(path))?;
        Self::from_reader(file)
    }

    /// Rows are numbered from 1 (the header is not counted).
    pub fn from_reader<R: Read>(reader: R) -> Result<Self, DataError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != HEADER {
            return Err(DataError::BadHeader {
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 1;
            let rec = rec.map_err(|e| DataError::Parse {
                row,
                column: "record",
                message: e.to_string(),
            })?;
            if rec.len() != 3 {
                return Err(DataError::Parse {
                    row,
                    column: "record",
                    message: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let lateral_velocity = parse_field(&rec[0], row, HEADER[0])?;
            let space_headway = parse_field(&rec[1], row, HEADER[1])?;
            let label = match rec[2].parse::<f64>() {
                Ok(l) if l == 1.0 || l == -1.0 => l,
                _ => {
                    return Err(DataError::BadLabel {
                        row,
                        label: rec[2].to_string(),
                    })
                }
            };
            rows.push(Sample {
                lateral_velocity,
                space_headway,
                label,
            });
        }
        Ok(Self { rows, seed: None })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DataError> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        w.write_record(HEADER)?;
        for s in &self.rows {
            w.write_record([
                s.lateral_velocity.to_string(),
                s.space_headway.to_string(),
                format!("{}", s.label as i8),
            ])?;
        }
        w.flush().map_err(|e| DataError::Io {
            path: "<csv writer>".into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        let file = File::create(path).map_err(io_err(path))?;
        self.write_csv(file)
    }

    /// Balanced synthetic sample. Even rows are lane changes (`+1`): strong
    /// lateral motion and a short headway. Odd rows keep the lane (`−1`).
    pub fn synth_lane_change(n: usize, seed: u64) -> Result<Self, DataError> {
        if n < 4 || n % 2 != 0 {
            return Err(DataError::InvalidSize(n));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = |m: f64, s: f64| Normal::new(m, s).expect("positive std");
        let (change_v, change_h) = (normal(-1.2, 0.35), normal(18.0, 6.0));
        let (keep_v, keep_h) = (normal(0.0, 0.25), normal(45.0, 10.0));
        let rows = (0..n)
            .map(|i| {
                if i % 2 == 0 {
                    Sample {
                        lateral_velocity: change_v.sample(&mut rng),
                        space_headway: change_h.sample(&mut rng),
                        label: 1.0,
                    }
                } else {
                    Sample {
                        lateral_velocity: keep_v.sample(&mut rng),
                        space_headway: keep_h.sample(&mut rng),
                        label: -1.0,
                    }
                }
            })
            .collect();
        Ok(Self {
            rows,
            seed: Some(seed),
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `(v₁, h₁, v₂, h₂, …)`
    pub fn features_flat(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|s| s.features()).collect()
    }

    pub fn labels(&self) -> Vec<f64> {
        self.rows.iter().map(|s| s.label).collect()
    }

    pub fn stats(&self) -> Result<Normalization, DataError> {
        if self.rows.is_empty() {
            return Err(DataError::Empty);
        }
        let n = self.rows.len() as f64;
        let mut features = Vec::with_capacity(2);
        for (j, name) in FEATURES.iter().enumerate() {
            let mean = self.rows.iter().map(|s| s.features()[j]).sum::<f64>() / n;
            let var = self
                .rows
                .iter()
                .map(|s| (s.features()[j] - mean).powi(2))
                .sum::<f64>()
                / n;
            let std = var.sqrt();
            if !(std > 1e-12) {
                return Err(DataError::DegenerateFeature { feature: name });
            }
            features.push(FeatureStats {
                feature: name.to_string(),
                mean,
                std,
            });
        }
        Ok(Normalization { features })
    }

    /// Z-scored copy and the statistics used.
    pub fn normalize(&self) -> Result<(Dataset, Normalization), DataError> {
        let stats = self.stats()?;
        Ok((stats.apply(self), stats))
    }

    /// Replaces the features with a flattened vector, keeping labels.
    pub fn with_features(&self, flat: &[f64]) -> Dataset {
        assert_eq!(flat.len(), 2 * self.rows.len());
        let rows = self
            .rows
            .iter()
            .zip(flat.chunks(2))
            .map(|(s, f)| Sample {
                lateral_velocity: f[0],
                space_headway: f[1],
                label: s.label,
            })
            .collect();
        Dataset {
            rows,
            seed: self.seed,
        }
    }
}

impl Normalization {
    pub fn apply(&self, data: &Dataset) -> Dataset {
        data.with_features(&self.normalize(&data.features_flat()))
    }

    /// Z-scores a flattened feature vector.
    pub fn normalize(&self, flat: &[f64]) -> Vec<f64> {
        flat.iter()
            .enumerate()
            .map(|(i, v)| {
                let f = &self.features[i % 2];
                (v - f.mean) / f.std
            })
            .collect()
    }

    pub fn denormalize(&self, flat: &[f64]) -> Vec<f64> {
        flat.iter()
            .enumerate()
            .map(|(i, v)| {
                let f = &self.features[i % 2];
                v * f.std + f.mean
            })
            .collect()
    }

    /// Maps raw per-feature bounds `(lo, hi)` into normalized units.
    pub fn map_bounds(&self, lo: &[f64; 2], hi: &[f64; 2]) -> ([f64; 2], [f64; 2]) {
        let n_lo = self.normalize(lo);
        let n_hi = self.normalize(hi);
        ([n_lo[0], n_lo[1]], [n_hi[0], n_hi[1]])
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        let file = File::create(path).map_err(io_err(path))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self, DataError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(io_err(path))?;
        Ok(serde_json::from_reader(file)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_three_rows() {
        let csv = "lateral_velocity,space_headway,label\n-1.0,20,1\n0.1,40,-1\n0.0,35.5,-1\n";
        let d = Dataset::from_reader(csv.as_bytes()).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.rows[2].space_headway, 35.5);
    }

    #[test]
    fn crlf_matches_lf() {
        let lf = "lateral_velocity,space_headway,label\n-1.0,20,1\n0.1,40,-1\n";
        let crlf = lf.replace('\n', "\r\n");
        assert_eq!(
            Dataset::from_reader(lf.as_bytes()).unwrap(),
            Dataset::from_reader(crlf.as_bytes()).unwrap()
        );
    }

    #[test]
    fn zero_label_names_the_row() {
        let csv = "lateral_velocity,space_headway,label\n-1.0,20,1\n0.1,40,0\n";
        match Dataset::from_reader(csv.as_bytes()) {
            Err(DataError::BadLabel { row, label }) => {
                assert_eq!(row, 2);
                assert_eq!(label, "0");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_names_row_and_column() {
        let csv = "lateral_velocity,space_headway,label\n-1.0,abc,1\n";
        match Dataset::from_reader(csv.as_bytes()) {
            Err(DataError::Parse { row: 1, column, .. }) => assert_eq!(column, "space_headway"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn two_point_zscore() {
        let d = Dataset {
            rows: vec![
                Sample {
                    lateral_velocity: 1.0,
                    space_headway: 0.0,
                    label: 1.0,
                },
                Sample {
                    lateral_velocity: 3.0,
                    space_headway: 2.0,
                    label: -1.0,
                },
            ],
            seed: None,
        };
        let (z, _) = d.normalize().unwrap();
        assert_eq!(z.rows[0].lateral_velocity, -1.0);
        assert_eq!(z.rows[1].lateral_velocity, 1.0);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let csv = "lateral_velocity,space_headway,label\n0.5,20,1\n0.5,40,-1\n";
        let d = Dataset::from_reader(csv.as_bytes()).unwrap();
        assert!(matches!(
            d.normalize(),
            Err(DataError::DegenerateFeature {
                feature: "lateral_velocity"
            })
        ));
    }

    #[test]
    fn synthetic_is_balanced() {
        let d = Dataset::synth_lane_change(4, 1).unwrap();
        assert_eq!(d.labels().iter().filter(|&&l| l == 1.0).count(), 2);
        assert!(matches!(Dataset::synth_lane_change(5, 1), Err(DataError::InvalidSize(5))));
    }
}
