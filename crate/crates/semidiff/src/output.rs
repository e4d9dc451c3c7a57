//! Trace files: JSON lines per iteration and CSV summaries.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use semidiff_core::attack::{AttackTrace, Termination};
use serde::Serialize;

use crate::data::Normalization;

#[derive(Serialize)]
struct RecordLine<'a> {
    k: usize,
    objective: f64,
    objective_after: f64,
    point: Option<usize>,
    direction: &'a [f64],
    dg: f64,
    step: f64,
    displacement: f64,
}

pub fn termination_name(t: Termination) -> &'static str {
    match t {
        Termination::Optimal => "optimal",
        Termination::Budget => "budget",
        Termination::Stalled => "stalled",
        Termination::MaxIters => "max_iters",
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

pub fn write_trace_jsonl(path: &Path, trace: &AttackTrace) -> Result<()> {
    let mut w = create(path)?;
    for r in &trace.records {
        let line = RecordLine {
            k: r.k,
            objective: r.objective_before,
            objective_after: r.objective_after,
            point: r.point,
            direction: &r.direction,
            dg: r.dg,
            step: r.step,
            displacement: r.displacement,
        };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// `k, G, displacement` for `k = 0..=K`.
pub fn write_summary_csv(path: &Path, trace: &AttackTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["k", "G", "displacement"])?;
    for (k, g) in trace.objective_history.iter().enumerate() {
        let disp = if k == 0 { 0.0 } else { trace.records[k - 1].displacement };
        w.write_record([k.to_string(), g.to_string(), disp.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DiffRow {
    point: usize,
    lateral_velocity_before: f64,
    space_headway_before: f64,
    lateral_velocity_after: f64,
    space_headway_after: f64,
    /// Euclidean shift in normalized units.
    displacement: f64,
}

/// Points whose features changed, in raw units, with their normalized shift.
pub fn write_diff_csv(path: &Path, trace: &AttackTrace, stats: &Normalization) -> Result<usize> {
    let before = stats.denormalize(&trace.initial_x);
    let after = stats.denormalize(&trace.final_x);
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut count = 0;
    for (p, (x0, x1)) in trace.initial_x.chunks(2).zip(trace.final_x.chunks(2)).enumerate() {
        let d = ((x1[0] - x0[0]).powi(2) + (x1[1] - x0[1]).powi(2)).sqrt();
        if d == 0.0 {
            continue;
        }
        count += 1;
        w.serialize(DiffRow {
            point: p,
            lateral_velocity_before: before[2 * p],
            space_headway_before: before[2 * p + 1],
            lateral_velocity_after: after[2 * p],
            space_headway_after: after[2 * p + 1],
            displacement: d,
        })?;
    }
    // header even when nothing moved
    if count == 0 {
        w.write_record([
            "point",
            "lateral_velocity_before",
            "space_headway_before",
            "lateral_velocity_after",
            "space_headway_after",
            "displacement",
        ])?;
    }
    w.flush()?;
    Ok(count)
}

/// `k, G_semi, G_grad`; a cell is empty once its run has ended.
pub fn write_compare_csv(path: &Path, semi: &AttackTrace, grad: &AttackTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["k", "G_semi", "G_grad"])?;
    let len = semi.objective_history.len().max(grad.objective_history.len());
    let cell = |h: &[f64], k: usize| h.get(k).map(|v| v.to_string()).unwrap_or_default();
    for k in 0..len {
        w.write_record([
            k.to_string(),
            cell(&semi.objective_history, k),
            cell(&grad.objective_history, k),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OracleRow {
    trial: usize,
    status: &'static str,
    deviation: Option<f64>,
}

pub fn write_oracle_csv(path: &Path, deviations: &[Option<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    if deviations.is_empty() {
        w.write_record(["trial", "status", "deviation"])?;
    }
    for (trial, d) in deviations.iter().enumerate() {
        w.serialize(OracleRow {
            trial,
            status: if d.is_some() { "checked" } else { "skipped (regularity)" },
            deviation: *d,
        })?;
    }
    w.flush()?;
    Ok(())
}
