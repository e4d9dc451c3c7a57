//! Subcommand bodies. Each returns an [`Outcome`] whose code becomes the
//! process exit status.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use semidiff_core::attack::{
    directional_derivative, run_attack, run_gradient_baseline, Attack, AttackTrace, LinearObjective, Termination,
};
use semidiff_core::sensitivity::{build_auxiliary, oracle_agreement};
use semidiff_core::victim::toy_lower_solution;
use semidiff_core::{SvmModel, ToyBilevelModel};

use crate::config::{ConfigError, RunConfig};
use crate::data::{DataError, Dataset};
use crate::output;
use crate::scenario::{Scenario, ScenarioError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_STALLED: u8 = 4;
pub const EXIT_BUDGET: u8 = 5;
pub const EXIT_MAX_ITERS: u8 = 6;

#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub message: String,
}

impl Outcome {
    fn ok(message: String) -> Self {
        Self { code: EXIT_OK, message }
    }
}

pub fn termination_code(t: Termination) -> u8 {
    match t {
        Termination::Optimal => EXIT_OK,
        Termination::Stalled => EXIT_STALLED,
        Termination::Budget => EXIT_BUDGET,
        Termination::MaxIters => EXIT_MAX_ITERS,
    }
}

fn core_code(e: &semidiff_core::Error) -> u8 {
    use semidiff_core::Error as E;
    match e {
        E::DimensionMismatch { .. } | E::BadLabel { .. } | E::OutOfDomain { .. } | E::InvalidConfig(_) => {
            EXIT_VALIDATION
        }
        E::Stalled { .. } => EXIT_STALLED,
        _ => EXIT_SOLVER,
    }
}

/// Exit status for a failed command.
pub fn error_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<DataError>() || cause.is::<clap::Error>() {
            return EXIT_VALIDATION;
        }
        if let Some(e) = cause.downcast_ref::<ScenarioError>() {
            return match e {
                ScenarioError::Data(_) => EXIT_VALIDATION,
                ScenarioError::Model(m) => core_code(m),
            };
        }
        if let Some(e) = cause.downcast_ref::<semidiff_core::Error>() {
            return core_code(e);
        }
    }
    EXIT_SOLVER
}

fn prepare_out(cfg: &RunConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    cfg.write_resolved(&cfg.out)?;
    Ok(())
}

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset, DataError> {
    match &cfg.data {
        Some(p) => Dataset::load_csv(p),
        None => Dataset::synth_lane_change(cfg.n, cfg.seed),
    }
}

pub fn load_scenario(cfg: &RunConfig) -> Result<Scenario> {
    let raw = load_dataset(cfg)?;
    Ok(Scenario::new(raw, cfg.penalty, cfg.ridge)?)
}

pub fn train(cfg: &RunConfig) -> Result<Outcome> {
    let sc = load_scenario(cfg)?;
    prepare_out(cfg)?;
    let sol = sc.solve(sc.x_bar())?;
    let report = sc.report(sc.x_bar(), &sol.y);
    let path = cfg.out.join("model.json");
    fs::write(&path, serde_json::to_string_pretty(&report)?)?;
    sc.stats.save_json(cfg.out.join("normalization.json"))?;
    Ok(Outcome::ok(format!(
        "trained on {} samples: precision {:.3}, recall {:.3}, f1 {:.3}, w = ({:.4}, {:.4})\nwrote {}",
        sc.raw.len(),
        report.precision,
        report.recall,
        report.f1,
        report.w[0],
        report.w[1],
        path.display()
    )))
}

fn attack_on(sc: &Scenario, cfg: &RunConfig, baseline: bool) -> Result<(AttackTrace, [f64; 2])> {
    let pristine = sc.solve(sc.x_bar())?;
    let obj = sc.objective(&cfg.target_spec()?, &pristine);
    let acfg = cfg.attack_config(&sc.stats);
    let trace = if baseline {
        run_gradient_baseline(&sc.model, &obj, sc.x_bar(), acfg)?
    } else {
        run_attack(&sc.model, &obj, sc.x_bar(), acfg)?
    };
    Ok((trace, SvmModel::weights(&pristine.y)))
}

fn write_trace_files(dir: &Path, suffix: &str, trace: &AttackTrace) -> Result<()> {
    output::write_trace_jsonl(&dir.join(format!("trace{suffix}.jsonl")), trace)?;
    output::write_summary_csv(&dir.join(format!("summary{suffix}.csv")), trace)
}

pub fn attack(cfg: &RunConfig) -> Result<Outcome> {
    let sc = load_scenario(cfg)?;
    prepare_out(cfg)?;
    let (trace, w0) = attack_on(&sc, cfg, false)?;
    write_trace_files(&cfg.out, "", &trace)?;
    sc.raw
        .with_features(&sc.stats.denormalize(&trace.final_x))
        .save_csv(cfg.out.join("poisoned.csv"))?;
    sc.stats.save_json(cfg.out.join("normalization.json"))?;
    let moved = output::write_diff_csv(&cfg.out.join("diff.csv"), &trace, &sc.stats)?;
    let w1 = SvmModel::weights(&trace.final_solution.y);
    let g0 = trace.objective_history[0];
    let reduction = if g0 > 0.0 {
        100.0 * (1.0 - trace.final_objective() / g0)
    } else {
        0.0
    };
    let mut message = format!(
        "pristine w = ({:.4}, {:.4}), poisoned w = ({:.4}, {:.4})\n\
         G: {:.6e} -> {:.6e} ({reduction:.1}% lower) in {} iterations; {moved} of {} points moved\n\
         termination: {}",
        w0[0],
        w0[1],
        w1[0],
        w1[1],
        g0,
        trace.final_objective(),
        trace.records.len(),
        sc.raw.len(),
        output::termination_name(trace.termination),
    );
    if let Some(c) = trace.certificate {
        message.push_str(&format!(" (min directional value {c:.3e})"));
    }
    Ok(Outcome {
        code: termination_code(trace.termination),
        message,
    })
}

pub fn compare(cfg: &RunConfig) -> Result<Outcome> {
    let sc = load_scenario(cfg)?;
    prepare_out(cfg)?;
    let (semi, _) = attack_on(&sc, cfg, false)?;
    let (grad, _) = attack_on(&sc, cfg, true)?;
    write_trace_files(&cfg.out, "_semi", &semi)?;
    write_trace_files(&cfg.out, "_grad", &grad)?;
    output::write_compare_csv(&cfg.out.join("compare.csv"), &semi, &grad)?;
    Ok(Outcome::ok(format!(
        "semi-derivative: G = {:.6e} after {} iterations ({})\n\
         gradient:        G = {:.6e} after {} iterations ({})",
        semi.final_objective(),
        semi.records.len(),
        output::termination_name(semi.termination),
        grad.final_objective(),
        grad.records.len(),
        output::termination_name(grad.termination),
    )))
}

pub fn sensitivity_check(cfg: &RunConfig) -> Result<Outcome> {
    prepare_out(cfg)?;
    if cfg.trials == 0 {
        eprintln!("warning: zero trials requested, nothing to check");
    }
    let report = oracle_agreement(cfg.trials, cfg.seed, cfg.licq_failure_every)?;
    output::write_oracle_csv(&cfg.out.join("oracle.csv"), &report.deviations)?;
    let passed = report.passed();
    Ok(Outcome {
        code: if passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        message: format!(
            "{} trials: {} checked, {} skipped (regularity); max deviation {:.3e} (tolerance {:.1e}): {}",
            report.trials,
            report.checked,
            report.skipped,
            report.max_deviation,
            report.tolerance,
            if passed { "ok" } else { "FAILED" }
        ),
    })
}

pub fn toy(cfg: &RunConfig) -> Result<Outcome> {
    prepare_out(cfg)?;
    let path = cfg.out.join("toy_grid.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(["x", "y"])?;
    let mut grid = String::from("     x      y(x)\n");
    for i in 0..=200 {
        let x = -1.0 + i as f64 / 100.0;
        let y = toy_lower_solution(x)?;
        w.write_record([x.to_string(), y.to_string()])?;
        if i % 25 == 0 {
            grid.push_str(&format!("{x:6.2} {y:9.6}\n"));
        }
    }
    w.flush()?;

    // the attacker maximizes x + 2y, so minimize its negation
    let obj = LinearObjective {
        a: vec![-1.0],
        b: vec![-2.0],
    };
    let model = ToyBilevelModel;
    let mut attack = Attack::new(&model, &obj, &[0.0], Default::default())?;
    let st = attack.initial_state()?;
    let aux = build_auxiliary(&model, &st.x, &st.solution, &attack.config().sensitivity)?;
    let right = -directional_derivative(&aux, &obj, &st, &[1.0])?;
    let left = -directional_derivative(&aux, &obj, &st, &[-1.0])?;
    let (_, record) = attack.step(&st, 0)?;
    let chosen = record.direction[0];
    let ok = chosen > 0.0 && right > left;
    Ok(Outcome {
        code: if ok { EXIT_OK } else { EXIT_CHECK_FAILED },
        message: format!(
            "{grid}wrote {}\nat x = 0: rate of x + 2y along +1 is {right:.6}, along -1 is {left:.6}\nchosen direction: {chosen:+}",
            path.display()
        ),
    })
}
