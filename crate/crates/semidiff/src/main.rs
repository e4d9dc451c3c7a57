use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semidiff::commands::{self, Outcome};
use semidiff::config::{RunConfig, Settings};

#[derive(Parser)]
#[command(name = "semidiff", version, about = "Data-poisoning attacks driven by semi-derivatives of QP solutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML file with any of the settings below; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Subcommand)]
enum Command {
    /// Train the lane-change SVM and report precision, recall, F1 and weights
    Train(Common),
    /// Run the semi-derivative poisoning attack
    Attack(Common),
    /// Run the semi-derivative attack and the gradient baseline side by side
    Compare(Common),
    /// Check semi-derivatives against finite differences on random QPs
    SensitivityCheck(Common),
    /// Solve the one-dimensional toy instance and show the direction choice at x = 0
    Toy(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, common): (fn(&RunConfig) -> anyhow::Result<Outcome>, Common) = match cli.command {
        Command::Train(c) => (commands::train, c),
        Command::Attack(c) => (commands::attack, c),
        Command::Compare(c) => (commands::compare, c),
        Command::SensitivityCheck(c) => (commands::sensitivity_check, c),
        Command::Toy(c) => (commands::toy, c),
    };
    let result = RunConfig::resolve(common.config.as_deref(), common.settings)
        .map_err(anyhow::Error::from)
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(outcome) => {
            println!("{}", outcome.message);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::error_code(&e))
        }
    }
}
