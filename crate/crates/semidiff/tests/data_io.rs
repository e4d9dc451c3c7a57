use proptest::prelude::*;
use semidiff::data::{Dataset, Sample};

fn dataset(rows: Vec<(f64, f64, bool)>) -> Dataset {
    let csv: String = std::iter::once("lateral_velocity,space_headway,label\n".to_string())
        .chain(
            rows.iter()
                .map(|(v, h, l)| format!("{v},{h},{}\n", if *l { 1 } else { -1 })),
        )
        .collect();
    Dataset::from_reader(csv.as_bytes()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn normalize_round_trips(
        rows in prop::collection::vec((-5.0f64..5.0, 0.0f64..150.0, any::<bool>()), 3..40)
    ) {
        let data = dataset(rows);
        prop_assume!(data.stats().is_ok());
        let (norm, stats) = data.normalize().unwrap();
        let back = stats.denormalize(&norm.features_flat());
        for (a, b) in back.iter().zip(data.features_flat()) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
        // normalized columns have zero mean and unit population std
        for f in 0..2 {
            let col: Vec<f64> = norm.features_flat().iter().skip(f).step_by(2).copied().collect();
            let n = col.len() as f64;
            let mean = col.iter().sum::<f64>() / n;
            let std = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
            prop_assert!(mean.abs() <= 1e-9 && (std - 1.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn synthetic_data_is_byte_identical_per_seed() {
    let bytes = |seed| {
        let mut out = Vec::new();
        Dataset::synth_lane_change(40, seed).unwrap().write_csv(&mut out).unwrap();
        out
    };
    assert_eq!(bytes(42), bytes(42));
    assert_ne!(bytes(42), bytes(43));
}

#[test]
fn synthetic_classes_are_well_separated() {
    for seed in [42, 0, 1, 7] {
        let data = Dataset::synth_lane_change(2000, seed).unwrap();
        let (pos, neg): (Vec<&Sample>, Vec<&Sample>) = data.rows.iter().partition(|s| s.label > 0.0);
        let moments = |s: &[&Sample], f: usize| {
            let v: Vec<f64> = s.iter().map(|r| r.features()[f]).collect();
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            (m, v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n)
        };
        // Mahalanobis-style gap on the feature pair, using pooled diagonal variance
        let gap2: f64 = (0..2)
            .map(|f| {
                let (mp, vp) = moments(&pos, f);
                let (mn, vn) = moments(&neg, f);
                (mp - mn).powi(2) / ((vp + vn) / 2.0)
            })
            .sum();
        assert!(gap2.sqrt() >= 3.0, "seed {seed}: separation {}", gap2.sqrt());
    }
}

#[test]
fn csv_round_trip_preserves_rows() {
    let data = Dataset::synth_lane_change(12, 5).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    data.save_csv(&path).unwrap();
    let back = Dataset::load_csv(&path).unwrap();
    assert_eq!(back.rows, data.rows);
}
