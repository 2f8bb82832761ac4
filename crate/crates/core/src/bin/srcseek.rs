use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use srcseek::experiments::{
    run_average, run_compare, run_hessian_invariance, run_omega_sweep, run_simulate, Check, Config, ResolvedParams,
};
use srcseek::ode::{write_csv, Trajectory};
use srcseek::stability::{certify, DEFAULT_SEED};
use srcseek::Error;

#[derive(Parser)]
#[command(name = "srcseek", version, about = "Nonholonomic source seeking experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults are used for anything omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Dither frequency, or a comma-separated list for `sweep-omega`.
    #[arg(long, global = true, value_delimiter = ',')]
    omega: Vec<f64>,
    /// Hessian, or a comma-separated list for `sweep-hessian` and `certify`.
    #[arg(long, global = true, value_delimiter = ',')]
    hessian: Vec<f64>,
    /// Seed for sampled checks; recorded in every report.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Integrate the configured closed loop and write its trajectory.
    Simulate,
    /// Gradient against Newton on the same field and start.
    Compare,
    /// Full against averaged rotating-frame runs over a list of ω.
    SweepOmega,
    /// Averaged decay rates over a list of Hessians.
    SweepHessian,
    /// γ coefficients and brackets of the configured scheme.
    Average,
    /// Lyapunov certificate, ISS and linearization checks.
    Certify,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Compare => "compare",
            Command::SweepOmega => "sweep-omega",
            Command::SweepHessian => "sweep-hessian",
            Command::Average => "average",
            Command::Certify => "certify",
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    command: &'a str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    resolved: ResolvedParams,
    report: T,
}

struct Header<'a> {
    command: &'a str,
    seed: Option<u64>,
    resolved: ResolvedParams,
}

impl<'a> Header<'a> {
    fn with<T: Serialize>(&self, passed: bool, report: T) -> Document<'a, T> {
        Document {
            command: self.command,
            passed,
            seed: self.seed,
            resolved: self.resolved,
            report,
        }
    }
}

fn load_config(common: &Common, command: Command) -> srcseek::Result<Config> {
    let mut config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match command {
        Command::SweepOmega if !common.omega.is_empty() => config.sweep_omega.omegas = common.omega.clone(),
        Command::SweepHessian | Command::Certify if !common.hessian.is_empty() => {
            config.sweep_hessian.hessians = common.hessian.clone();
        }
        _ => {}
    }
    if !matches!(command, Command::SweepOmega) {
        if let Some(&w) = common.omega.first() {
            config.params.omega = w;
        }
    }
    if !matches!(command, Command::SweepHessian | Command::Certify) {
        if let Some(&h) = common.hessian.first() {
            config.field.hessian = h;
        }
    }
    config.validate()?;
    Ok(config)
}

fn write_trajectory(dir: &Path, name: &str, traj: &Trajectory) -> anyhow::Result<()> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_csv(traj, BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
}

fn write_table(dir: &Path, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> anyhow::Result<()> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn num(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.16e}"))
}

fn emit<T: Serialize>(dir: &Path, name: &str, doc: &Document<'_, T>) -> anyhow::Result<()> {
    let text = toml::to_string(doc).context("serializing report")?;
    let path = dir.join(name);
    fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
    print!("{text}");
    Ok(())
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        eprintln!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

fn run(command: Command, common: &Common, config: &Config) -> anyhow::Result<bool> {
    let dir = &common.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let resolved = ResolvedParams::new(&config.seeker_params(), &config.field_params());
    let doc = Header {
        command: command.name(),
        seed: common.seed,
        resolved,
    };
    let passed = match command {
        Command::Simulate => {
            let sc = config.scenario()?;
            let sim = run_simulate(&sc)?;
            write_trajectory(dir, "trajectory.csv", &sim.trajectory)?;
            let checks = sim.summary.checks(sc.thresholds.dee_tolerance);
            print_checks(&checks);
            let passed = checks.iter().all(|c| c.passed);
            #[derive(Serialize)]
            struct Report<'a> {
                checks: &'a [Check],
                summary: &'a srcseek::experiments::RunSummary,
            }
            emit(
                dir,
                "simulate.toml",
                &doc.with(
                    passed,
                    Report {
                        checks: &checks,
                        summary: &sim.summary,
                    },
                ),
            )?;
            passed
        }
        Command::Compare => {
            let cmp = run_compare(config)?;
            for (name, sim) in [("gradient.csv", &cmp.gradient), ("newton.csv", &cmp.newton)] {
                if let Some(sim) = sim {
                    write_trajectory(dir, name, &sim.trajectory)?;
                }
            }
            print_checks(&cmp.report.checks);
            emit(dir, "compare.toml", &doc.with(cmp.report.passed, &cmp.report))?;
            cmp.report.passed
        }
        Command::SweepOmega => {
            let r = run_omega_sweep(config)?;
            let rows = r
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.scheme.to_string(),
                        format!("{:.16e}", row.omega),
                        num(row.deviation),
                        num(row.residual_radius),
                        num(row.averaged_residual_radius),
                        row.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            write_table(
                dir,
                "sweep_omega.csv",
                &[
                    "scheme",
                    "omega",
                    "deviation",
                    "residual_radius",
                    "averaged_residual_radius",
                    "error",
                ],
                rows,
            )?;
            print_checks(&r.checks);
            emit(dir, "sweep_omega.toml", &doc.with(r.passed, &r))?;
            r.passed
        }
        Command::SweepHessian => {
            let r = run_hessian_invariance(config)?;
            let rows = r
                .rows
                .iter()
                .chain(&r.alpha_rows)
                .map(|row| {
                    vec![
                        row.scheme.to_string(),
                        format!("{:.16e}", row.hessian),
                        format!("{:.16e}", row.alpha),
                        num(row.rate),
                        num(row.r_squared),
                        row.reliable.to_string(),
                        row.error.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            write_table(
                dir,
                "sweep_hessian.csv",
                &["scheme", "hessian", "alpha", "rate", "r_squared", "reliable", "error"],
                rows,
            )?;
            print_checks(&r.checks);
            emit(dir, "sweep_hessian.toml", &doc.with(r.passed, &r))?;
            r.passed
        }
        Command::Average => {
            let r = run_average(config)?;
            print_checks(&r.checks);
            let table: toml::Table = toml::from_str(&r.text).context("re-reading averaging report")?;
            #[derive(Serialize)]
            struct Report<'a> {
                checks: &'a [Check],
                averaging: toml::Table,
            }
            emit(
                dir,
                "average.toml",
                &doc.with(
                    r.passed,
                    Report {
                        checks: &r.checks,
                        averaging: table,
                    },
                ),
            )?;
            r.passed
        }
        Command::Certify => {
            let seed = common.seed.unwrap_or(DEFAULT_SEED);
            let r = certify(
                &config.seeker_params(),
                &config.field_params(),
                &config.sweep_hessian.hessians,
                seed,
            )?;
            let table: toml::Table = toml::from_str(&r.to_text()?).context("re-reading stability report")?;
            eprintln!("{} certificate", if r.passed { "PASS" } else { "FAIL" });
            emit(dir, "certify.toml", &doc.with(r.passed, table))?;
            r.passed
        }
    };
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match load_config(&cli.common, cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    match run(cli.command, &cli.common, &config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let config_error = e.downcast_ref::<Error>().is_some_and(|e| {
                matches!(
                    e,
                    Error::Config(_) | Error::InvalidParameter { .. } | Error::IncompatibleFrame { .. }
                )
            });
            eprintln!("error: {e:#}");
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}
