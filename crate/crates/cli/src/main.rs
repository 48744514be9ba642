use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use trienhance::commands::{self, EnhanceArgs, Overrides};
use trienhance::config::Settings;
use trienhance::report::benchmark_table;
use trienhance_core::generate::BenchmarkSpec;
use trienhance_core::selflearn::{Strategy, StrategyChoice};

#[derive(Parser)]
#[command(name = "trienhance", version, about = "Enhance imbalanced tabular training data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run synthesis, filtering and self-learning and write a report directory.
    Enhance {
        /// Labeled input CSV.
        #[arg(long)]
        input: PathBuf,
        /// CSV of unlabeled rows for self-learning.
        #[arg(long)]
        unlabeled: Option<PathBuf>,
        /// Labeled CSV used to compare baseline and enhanced models.
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long, default_value = "trienhance-out")]
        out: PathBuf,
        /// Write the model trained on the enhanced data as JSON.
        #[arg(long)]
        save_model: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Stratified k-fold comparison of baseline and enhanced training.
    Benchmark {
        #[arg(long)]
        input: PathBuf,
        /// Directory for the per-fold and summary CSVs.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Write a synthetic imbalanced benchmark dataset.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        dims: usize,
        /// Majority-to-minority ratio.
        #[arg(long, default_value_t = 20.0)]
        imbalance_ratio: f64,
        #[arg(long, default_value_t = 2.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.05)]
        noise_rate: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value = "label")]
        label_column: String,
    },
    /// Score a predictions file holding a label and a score column.
    Metrics {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "label")]
        label_column: String,
        #[arg(long, default_value = "score")]
        score_column: String,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Kfulf,
    Dds,
}

#[derive(Args)]
struct RunFlags {
    /// Key-value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    label_column: Option<String>,
    /// Label value to encode as class 1 (default: the minority value).
    #[arg(long)]
    positive_label: Option<String>,
    /// Fraction of labeled rows whose labels are hidden for self-learning.
    #[arg(long)]
    hide_labels: Option<f64>,
    #[arg(long)]
    disable_synthesis: bool,
    #[arg(long)]
    disable_filtering: bool,
    #[arg(long)]
    disable_selflearning: bool,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
}

impl RunFlags {
    fn settings(&self) -> Result<Settings> {
        let o = Overrides {
            seed: self.seed,
            label_column: self.label_column.clone(),
            positive_label: self.positive_label.clone(),
            hide_labels: self.hide_labels,
            disable_synthesis: self.disable_synthesis,
            disable_filtering: self.disable_filtering,
            disable_selflearning: self.disable_selflearning,
            strategy: self.strategy.map(|s| match s {
                StrategyArg::Auto => StrategyChoice::Auto,
                StrategyArg::Kfulf => StrategyChoice::Only(Strategy::Kfulf),
                StrategyArg::Dds => StrategyChoice::Only(Strategy::Dds),
            }),
        };
        commands::resolve_settings(self.config.as_deref(), &o)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Enhance { input, unlabeled, test, out, save_model, run } => {
            let settings = run.settings()?;
            let r = commands::enhance(&EnhanceArgs { input, unlabeled, test, out: out.clone(), save_model, settings })?;
            let res = &r.result;
            println!(
                "rows: labeled {} -> augmented {} -> filtered {} -> enhanced {}",
                res.labeled.n_rows(),
                res.augmented.n_rows(),
                res.filtered.n_rows(),
                res.enhanced.n_rows()
            );
            for t in &res.timings {
                eprintln!("{} took {:.1} ms", t.stage, t.millis);
            }
            for n in &res.notes {
                eprintln!("note: {n}");
            }
            if let Some((b, e)) = &r.metrics {
                println!("test f1: baseline {:.4}, enhanced {:.4}", b.f1, e.f1);
            }
            println!("report written to {}", out.display());
        }
        Command::Benchmark { input, out, run } => {
            let settings = run.settings()?;
            let report = commands::benchmark(&input, &settings, out.as_deref())?;
            print!("{}", benchmark_table(&report));
        }
        Command::Generate { out, n, dims, imbalance_ratio, separation, noise_rate, seed, label_column } => {
            let spec = BenchmarkSpec { n, dims, imbalance_ratio, separation, noise_rate, seed };
            let d = commands::generate(&spec, &out, &label_column)?;
            println!("wrote {} rows to {}", d.n_rows(), out.display());
        }
        Command::Metrics { input, label_column, score_column, threshold } => {
            let r = commands::score_file(&input, &label_column, &score_column, threshold)?;
            print!("{}", r.to_key_values());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
