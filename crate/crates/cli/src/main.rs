use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;

use smacrawl::calibrate::{calibrate, CalibrationTargets};
use smacrawl::config::{calibration_overlay, merge_tables, read_table, set_number, ConfigFile};
use smacrawl::engine::{check_feasibility, run, Scenario};
use smacrawl::output::{write_trace_file, SummaryDocument};
use smacrawl::Error;

#[derive(Parser)]
#[command(
    name = "smacrawl",
    version,
    about = "Simulate SMA-driven snap-through crawling modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and write trace.csv and summary.json.
    Run {
        scenario: PathBuf,
        #[arg(short, long, env = "SMACRAWL_OUT_DIR", default_value = "out")]
        out: PathBuf,
        /// Config overlays merged on top of the scenario, in order.
        #[arg(long)]
        overlay: Vec<PathBuf>,
    },
    /// Parse a scenario and report feasibility without simulating.
    Check {
        scenario: PathBuf,
        #[arg(long)]
        overlay: Vec<PathBuf>,
    },
    /// Fit thermal constants and claw anisotropy to target measurements.
    Calibrate {
        scenario: PathBuf,
        targets: PathBuf,
        /// Where to write the fitted overlay.
        #[arg(short, long, default_value = "calibration.toml")]
        out: PathBuf,
    },
    /// Run a scenario over evenly spaced values of one numeric key.
    Sweep {
        scenario: PathBuf,
        /// Key in section.name form, e.g. claws.bwd_resistance_single.
        #[arg(long)]
        key: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(short, long)]
        n: usize,
        #[arg(short, long, env = "SMACRAWL_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_)) => 2,
        Some(Error::Feasibility(_) | Error::InvalidParams(_) | Error::InvalidCurve(_)) => 3,
        Some(
            Error::Domain { .. }
            | Error::Bracket(_)
            | Error::Watchdog { .. }
            | Error::InsufficientTrace,
        ) => 4,
        Some(Error::NoConvergence { .. } | Error::InfeasibleTarget(_)) => 5,
        Some(Error::Io(_)) | None => 1,
    }
}

fn load_table(scenario: &Path, overlays: &[PathBuf]) -> Result<toml::Table> {
    let mut table = read_table(scenario)?;
    for o in overlays {
        merge_tables(&mut table, read_table(o)?);
    }
    Ok(table)
}

fn load_scenario(scenario: &Path, overlays: &[PathBuf]) -> Result<Scenario> {
    let table = load_table(scenario, overlays)?;
    let cfg = ConfigFile::from_table(table).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", scenario.display())),
        other => other,
    })?;
    Ok(cfg.to_scenario())
}

fn cmd_run(scenario: &Path, out: &Path, overlays: &[PathBuf]) -> Result<()> {
    let sc = load_scenario(scenario, overlays)?;
    let (trace, summary) = run(&sc)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_trace_file(&trace, &out.join("trace.csv"))?;
    SummaryDocument::from(&summary).write(&out.join("summary.json"))?;
    println!(
        "{} cycles, net {:.3} mm, {} mm/cycle, steady period {} s",
        summary.cycles,
        summary.net_displacement_mm,
        fmt_opt(summary.mm_per_cycle),
        fmt_opt(summary.steady_period_s)
    );
    for w in &summary.feasibility {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into())
}

fn cmd_check(scenario: &Path, overlays: &[PathBuf]) -> Result<()> {
    let sc = load_scenario(scenario, overlays)?;
    let warnings = check_feasibility(&sc)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("ok: {} is feasible", scenario.display());
    Ok(())
}

fn cmd_calibrate(scenario: &Path, targets_path: &Path, out: &Path) -> Result<()> {
    let sc = load_scenario(scenario, &[])?;
    let text = fs::read_to_string(targets_path)
        .with_context(|| format!("reading {}", targets_path.display()))?;
    let targets: CalibrationTargets = toml::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", targets_path.display())))?;
    let cal = calibrate(&sc, &targets)?;
    if let Some(t) = cal.thermal {
        println!(
            "thermal: C_th = {} J/C, h_th = {} W/C, heat-up {:.4} s, first cycle {:.4} s, steady period {:.4} s, residual {:.3e} s",
            t.c_th_j_per_c, t.h_th_w_per_c, t.heat_time_s, t.first_cycle_s, t.steady_period_s, t.residual_s
        );
    }
    for fit in [cal.single, cal.dual].into_iter().flatten() {
        println!(
            "claws ({} module): bwd_resistance = {}, {:.6} mm/cycle for target {:.6} (residual {:.3e})",
            fit.module_count,
            fit.bwd_resistance,
            fit.mm_per_cycle,
            fit.target_mm_per_cycle,
            fit.mm_per_cycle - fit.target_mm_per_cycle
        );
    }
    let body = toml::to_string(&calibration_overlay(&cal)).context("serializing overlay")?;
    let header = format!("# Calibration overlay for {}\n", scenario.display());
    fs::write(out, header + &body).with_context(|| format!("writing {}", out.display()))?;
    println!("wrote {}", out.display());
    Ok(())
}

struct SweepRow {
    value: f64,
    status: &'static str,
    doc: Option<SummaryDocument>,
    message: String,
}

fn cmd_sweep(scenario: &Path, key: &str, lo: f64, hi: f64, n: usize, out: &Path) -> Result<()> {
    anyhow::ensure!(n >= 1, Error::Config("sweep needs n >= 1".into()));
    let base = load_table(scenario, &[])?;
    // Validate the key once so a typo fails before any work is done.
    set_number(&mut base.clone(), key, lo)?;
    let values: Vec<f64> = (0..n)
        .map(|k| {
            if n == 1 {
                lo
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        })
        .collect();
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| {
            let mut table = base.clone();
            let outcome = set_number(&mut table, key, value)
                .and_then(|()| ConfigFile::from_table(table))
                .and_then(|cfg| run(&cfg.to_scenario()));
            match outcome {
                Ok((_, summary)) => SweepRow {
                    value,
                    status: "ok",
                    doc: Some(SummaryDocument::from(&summary)),
                    message: String::new(),
                },
                Err(e @ Error::Feasibility(_)) => SweepRow {
                    value,
                    status: "infeasible",
                    doc: None,
                    message: e.to_string(),
                },
                Err(e) => SweepRow {
                    value,
                    status: "error",
                    doc: None,
                    message: e.to_string(),
                },
            }
        })
        .collect();

    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut table = String::from(
        "index,value,status,cycles,mm_per_cycle,mean_period_s,steady_period_s,message\n",
    );
    for (i, row) in rows.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let (cycles, mpc, mean, steady) = match &row.doc {
            Some(d) => {
                let dir = out.join(format!("point_{i:03}"));
                fs::create_dir_all(&dir)?;
                d.write(&dir.join("summary.json"))?;
                (
                    d.cycles.to_string(),
                    opt(d.mm_per_cycle),
                    opt(d.mean_period_s),
                    opt(d.steady_period_s),
                )
            }
            None => Default::default(),
        };
        let message = row.message.replace('"', "'");
        table.push_str(&format!(
            "{i},{},{},{cycles},{mpc},{mean},{steady},\"{message}\"\n",
            row.value, row.status
        ));
    }
    fs::write(out.join("sweep.csv"), table)?;
    let bad = rows.iter().filter(|r| r.status != "ok").count();
    println!(
        "swept {key} over {n} point(s); {bad} flagged; wrote {}",
        out.join("sweep.csv").display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            out,
            overlay,
        } => cmd_run(scenario, out, overlay),
        Command::Check { scenario, overlay } => cmd_check(scenario, overlay),
        Command::Calibrate {
            scenario,
            targets,
            out,
        } => cmd_calibrate(scenario, targets, out),
        Command::Sweep {
            scenario,
            key,
            lo,
            hi,
            n,
            out,
        } => cmd_sweep(scenario, key, *lo, *hi, *n, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
