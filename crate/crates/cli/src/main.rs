use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use walkcast::backtest::plot_data_csv;
use walkcast::ingest::{generate_synthetic, load_panel};
use walkcast::{sweep, AlignedPanel, BacktestReport, SweepOptions};

mod config;

use config::{ConfigError, DataSource, RunConfig};

/// Overrides `output_dir` from the configuration file.
const OUTPUT_DIR_ENV: &str = "WALKCAST_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "walkcast", version, about = "Walk-forward backtests of intraday price forecasters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a configuration file and exit.
    Validate { config: PathBuf },
    /// Run every (plan, model) cell of a configuration and write reports.
    Backtest {
        config: PathBuf,
        /// Number of cells run concurrently.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
        /// Run everything on one thread so roll durations are comparable.
        #[arg(long)]
        sequential_timing: bool,
        /// Replace the seed of every model.
        #[arg(long)]
        seed_override: Option<u64>,
    },
    /// Turn a report into a stamp-ordered CSV of actuals, predictions and errors.
    Plotdata { report: PathBuf, output: PathBuf },
}

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Internal(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    match config::load(path) {
        Ok(c) => Ok(c),
        Err(ConfigError::Unreadable(p, e)) => Err(Failure::Validation(format!(
            "cannot read config {}: {e}",
            p.display()
        ))),
        Err(ConfigError::Invalid(diags)) => {
            let lines: Vec<String> = diags.iter().map(|d| format!("  {d}")).collect();
            Err(Failure::Validation(format!(
                "{} has {} problem(s):\n{}",
                path.display(),
                diags.len(),
                lines.join("\n")
            )))
        }
    }
}

fn load_data(cfg: &RunConfig) -> Result<AlignedPanel, Failure> {
    let panel = match &cfg.data {
        DataSource::Synthetic(spec) => generate_synthetic(spec, &cfg.calendar, cfg.start, cfg.end),
        DataSource::Files { target, exogenous } => {
            let exo: Vec<(&str, &Path)> = exogenous
                .iter()
                .map(|(s, p)| (s.as_str(), p.as_path()))
                .collect();
            load_panel(
                (target.0.as_str(), target.1.as_path()),
                &exo,
                &cfg.calendar,
                cfg.start,
                cfg.end,
            )
        }
    };
    panel.map_err(|e| Failure::Data(format!("cannot build the data panel: {e}")))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))
}

fn cell_stem(index: usize, report: &BacktestReport) -> String {
    format!(
        "{index:02}_{}_train{}_h{}",
        report.spec.algorithm(),
        report.plan.train_days,
        report.plan.horizon_days
    )
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn summary_csv(reports: &[BacktestReport]) -> String {
    let mut out = String::from("algorithm,train_days,horizon,rmse,mape,mpe,mtt,seed,n,rolls,excluded_rolls,error\n");
    for r in reports {
        let agg = r.aggregate.as_ref();
        let error = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.spec.algorithm(),
            r.plan.train_days,
            r.plan.horizon_days,
            opt(agg.map(|a| a.rmse)),
            opt(agg.map(|a| a.mape)),
            opt(agg.map(|a| a.mpe)),
            opt(r.timing.mtt),
            r.spec.seed,
            agg.map(|a| a.n).unwrap_or(0),
            r.rolls.len(),
            r.excluded_rolls,
            error,
        ));
    }
    out
}

fn validate(path: &Path) -> Result<(), Failure> {
    let cfg = load_config(path)?;
    println!(
        "{}: ok ({} plan(s) x {} model(s) = {} cell(s))",
        path.display(),
        cfg.plans.len(),
        cfg.models.len(),
        cfg.plans.len() * cfg.models.len()
    );
    Ok(())
}

fn backtest(path: &Path, jobs: usize, sequential_timing: bool, seed_override: Option<u64>) -> Result<(), Failure> {
    let mut cfg = load_config(path)?;
    if let Some(seed) = seed_override {
        for m in &mut cfg.models {
            m.seed = seed;
        }
    }
    let out_dir = std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| cfg.output_dir.clone());
    let panel = load_data(&cfg)?;
    fs::create_dir_all(&out_dir)
        .map_err(|e| Failure::Internal(format!("cannot create {}: {e}", out_dir.display())))?;

    let reports = sweep(
        &cfg.plans,
        &cfg.models,
        &panel,
        &cfg.calendar,
        SweepOptions { jobs, sequential_timing },
    );
    let mut warnings = 0;
    for (i, report) in reports.iter().enumerate() {
        let stem = cell_stem(i, report);
        write(&out_dir.join(format!("{stem}.json")), &report.to_json())?;
        write(&out_dir.join(format!("{stem}.csv")), &report.interval_csv())?;
        match (&report.error, &report.aggregate) {
            (Some(e), _) => {
                warnings += 1;
                eprintln!("warning: {stem}: {e}");
            }
            (None, None) => {
                warnings += 1;
                eprintln!("warning: {stem}: every roll failed");
            }
            (None, Some(a)) => {
                if report.excluded_rolls > 0 {
                    warnings += 1;
                    eprintln!("warning: {stem}: {} roll(s) failed and were excluded", report.excluded_rolls);
                }
                println!(
                    "{stem}: rmse {:.4} mape {:.3}% mpe {:.4} over {} rolls",
                    a.rmse, a.mape_percent, a.mpe, a.n_rolls
                );
            }
        }
    }
    write(&out_dir.join("summary.csv"), &summary_csv(&reports))?;
    println!("wrote {} report(s) to {}", reports.len(), out_dir.display());
    if warnings > 0 {
        eprintln!("{warnings} warning(s)");
    }
    Ok(())
}

fn plotdata(report: &Path, output: &Path) -> Result<(), Failure> {
    if report == output {
        return Err(Failure::Validation("output path must differ from the report path".into()));
    }
    let text = fs::read_to_string(report)
        .map_err(|e| Failure::Data(format!("cannot read {}: {e}", report.display())))?;
    let parsed = BacktestReport::from_json(&text)
        .and_then(|r| r.check_aggregate().map(|_| r))
        .map_err(|e| Failure::Data(format!("{}: {e}", report.display())))?;
    write(output, &plot_data_csv(&parsed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { config } => validate(&config),
        Command::Backtest {
            config,
            jobs,
            sequential_timing,
            seed_override,
        } => backtest(&config, jobs as usize, sequential_timing, seed_override),
        Command::Plotdata { report, output } => plotdata(&report, &output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
