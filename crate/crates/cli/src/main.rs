//! `ioncool` — scans and validation for two-step Doppler cooling of
//! three-level ladder ions.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure
//! (degenerate steady state, unbracketed peak, ...), 4 validation-suite
//! failure.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, DeltaWRule, RunConfig, ScanAxis};
use ioncool::acceptance;
use ioncool::analytics;
use ioncool::consts::{mhz, to_mhz};
use ioncool::cooling;
use ioncool::model::{build_generator, effective_wavevector, LaserDrive};
use ioncool::scan::{scan_delta_w, Column, ScanResult};
use ioncool::steady_state::steady_state;

#[derive(Parser)]
#[command(
    name = "ioncool",
    version,
    about = "Steady-state spectra and Doppler-cooling observables of a three-level ladder ion"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Steady-state populations versus a detuning axis.
    Spectrum(RunArgs),
    /// Measured resonance FWHM versus the drive ratio, with the closed-form
    /// effective linewidth alongside.
    Linewidth(RunArgs),
    /// Cooling curves: damping, limit temperature or effective force
    /// (select with `curve = damping | temperature | capture`).
    Cooling(RunArgs),
    /// Closed-form and numeric drive optimum for a given weak Rabi frequency
    /// and strong-laser detuning, as JSON.
    Optimum {
        /// Weak Rabi frequency, MHz.
        #[arg(long)]
        omega_w_mhz: f64,
        /// Strong-laser detuning, MHz (negative).
        #[arg(long, allow_hyphen_values = true)]
        delta_st_mhz: f64,
        /// Ion preset (sets gamma and beta_eg).
        #[arg(long, default_value = "ca")]
        ion: String,
    },
    /// Run the validation suite and print one line per criterion.
    Verify {
        /// Emit a machine-readable JSON report instead of the table.
        #[arg(long)]
        json: bool,
        /// Development handle: inject a small error into the closed-form
        /// population to confirm the suite notices.
        #[arg(long, hide = true)]
        inject_formula_error: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override or supply a single key, e.g. --set omega_w_mhz=0.5
    /// (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output path (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Spectrum(args) => run_scan(args, cmd_spectrum),
        Cmd::Linewidth(args) => run_scan(args, cmd_linewidth),
        Cmd::Cooling(args) => run_scan(args, cmd_cooling),
        Cmd::Optimum {
            omega_w_mhz,
            delta_st_mhz,
            ion,
        } => cmd_optimum(*omega_w_mhz, *delta_st_mhz, ion),
        Cmd::Verify {
            json,
            inject_formula_error,
        } => return cmd_verify(*json, *inject_formula_error),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("numerical failure: {e}");
            ExitCode::from(3)
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::from(3)
        }
    }
}

enum CliError {
    Config(ConfigError),
    Numerical(ioncool::Error),
    Io(std::io::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<ioncool::Error> for CliError {
    fn from(e: ioncool::Error) -> Self {
        Self::Numerical(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

fn run_scan(
    args: &RunArgs,
    build: impl Fn(&RunConfig) -> Result<ScanResult, CliError>,
) -> Result<(), CliError> {
    let cfg = RunConfig::load(args.config.as_deref(), &args.set)?;
    let scan = build(&cfg)?;
    let out_path = args
        .out
        .clone()
        .or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let payload = if cfg.json {
        serde_json::to_string_pretty(&scan.to_json()).expect("serializable") + "\n"
    } else {
        scan.to_csv()
    };
    match out_path {
        Some(p) => {
            std::fs::write(&p, payload)?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{payload}"),
    }
    Ok(())
}

/// Populations versus `delta_w` or versus `delta_st` (with `delta_w` slaved
/// to the configured rule at every grid point).
fn cmd_spectrum(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let drive = cfg.base_drive();
    match cfg.scan {
        ScanAxis::DeltaW => {
            let grid: Vec<f64> = cfg.grid().iter().map(|&x| mhz(x)).collect();
            Ok(scan_delta_w(&cfg.atom, &drive, cfg.scheme, &grid)?)
        }
        ScanAxis::DeltaSt => {
            let grid = cfg.grid();
            let mut pops = Vec::with_capacity(grid.len());
            for &delta_st_mhz in &grid {
                let mut d = LaserDrive {
                    delta_st: mhz(delta_st_mhz),
                    ..drive
                };
                d.delta_w = match cfg.delta_w {
                    DeltaWRule::Fixed(v) => v,
                    DeltaWRule::LightShift => analytics::light_shift(&d),
                    DeltaWRule::Cooling => cooling::cooling_detuning(&cfg.atom, &d),
                };
                let gen = build_generator(&cfg.atom, &d, cfg.scheme)?;
                let rho = steady_state(&gen)
                    .map_err(|e| e.at_grid_point("delta_st (MHz)", delta_st_mhz))?;
                pops.push([rho.pop_g(), rho.pop_m(), rho.pop_e()]);
            }
            let result = ScanResult {
                abscissa_name: "delta_st_mhz".into(),
                abscissa: grid,
                columns: ["pop_g", "pop_m", "pop_e"]
                    .iter()
                    .enumerate()
                    .map(|(k, name)| Column {
                        name: (*name).into(),
                        values: pops.iter().map(|p| p[k]).collect(),
                    })
                    .collect(),
                fixed: fixed_params(cfg, &drive, &["delta_st_mhz"]),
            };
            result.validate()?;
            Ok(result)
        }
        other => Err(ConfigError(format!(
            "spectrum supports scan = delta_w or delta_st, got {other:?}"
        ))
        .into()),
    }
}

/// Measured FWHM (solver-refined) and the closed-form effective linewidth
/// versus the drive ratio, both in units of `gamma / 2`.
fn cmd_linewidth(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    if cfg.scan != ScanAxis::Ratio {
        return Err(ConfigError("linewidth requires scan = ratio".into()).into());
    }
    let drive = cfg.base_drive();
    let grid = cfg.grid();
    let half_gamma = cfg.atom.gamma / 2.0;
    let mut numeric = Vec::with_capacity(grid.len());
    let mut formula = Vec::with_capacity(grid.len());
    for &ratio in &grid {
        let d = LaserDrive {
            omega_st: ratio * drive.delta_st.abs(),
            ..drive
        };
        let summary = ioncool::scan::fwhm_of_pe(&cfg.atom, &d, cfg.scheme)
            .map_err(|e| e.at_grid_point("ratio", ratio))?;
        numeric.push(summary.fwhm / half_gamma);
        formula.push(analytics::gamma_eff(&cfg.atom, &d) / half_gamma);
    }
    Ok(ScanResult {
        abscissa_name: "ratio_omega_st_over_delta_st".into(),
        abscissa: grid,
        columns: vec![
            Column {
                name: "fwhm_numeric_half_gamma".into(),
                values: numeric,
            },
            Column {
                name: "fwhm_formula_half_gamma".into(),
                values: formula,
            },
        ],
        fixed: fixed_params(cfg, &drive, &["omega_st_mhz"]),
    })
}

/// Cooling curves selected by the `curve` key.
fn cmd_cooling(cfg: &RunConfig) -> Result<ScanResult, CliError> {
    let drive = cfg.base_drive();
    match (cfg.curve.as_deref(), cfg.scan) {
        (Some("damping"), ScanAxis::DeltaWRel) => {
            let grid = cfg.grid(); // offsets in units of gamma_eff
            let d_ls = analytics::light_shift(&drive);
            let g_eff = analytics::gamma_eff(&cfg.atom, &drive);
            let k_eff = effective_wavevector(&cfg.atom, drive.st_copropagates);
            let hbar_k2 = ioncool::consts::HBAR * k_eff * k_eff;
            let mut beta_scaled = Vec::with_capacity(grid.len());
            let mut beta_si = Vec::with_capacity(grid.len());
            for &off in &grid {
                let d = LaserDrive {
                    delta_w: d_ls + off * g_eff,
                    ..drive
                };
                let rep = cooling::damping(&cfg.atom, &d, cfg.scheme)
                    .map_err(|e| e.at_grid_point("delta_w_rel (gamma_eff)", off))?;
                beta_scaled.push(rep.beta / hbar_k2);
                beta_si.push(rep.beta);
            }
            Ok(ScanResult {
                abscissa_name: "delta_w_rel_gamma_eff".into(),
                abscissa: grid,
                columns: vec![
                    Column {
                        name: "beta_hbar_k2".into(),
                        values: beta_scaled,
                    },
                    Column {
                        name: "beta_kg_per_s".into(),
                        values: beta_si,
                    },
                ],
                fixed: fixed_params(cfg, &drive, &["delta_w_mhz"]),
            })
        }
        (Some("temperature"), ScanAxis::Ratio) => {
            let scan = cooling::min_temperature_curve(
                &cfg.atom,
                drive.omega_w,
                drive.delta_st,
                &cfg.grid(),
            )?;
            Ok(scan)
        }
        (Some("capture"), ScanAxis::Vrms) => {
            let k_eff = effective_wavevector(&cfg.atom, drive.st_copropagates);
            let to_velocity = (cfg.atom.gamma / 2.0) / k_eff;
            let vgrid: Vec<f64> = cfg.grid().iter().map(|&u| u * to_velocity).collect();
            Ok(cooling::effective_force_curve(
                &cfg.atom, &drive, cfg.scheme, &vgrid,
            )?)
        }
        (curve, scan) => Err(ConfigError(format!(
            "cooling needs curve = damping (scan = delta_w_rel), temperature (scan = ratio) \
             or capture (scan = vrms); got curve = {curve:?}, scan = {scan:?}"
        ))
        .into()),
    }
}

fn cmd_optimum(omega_w_mhz: f64, delta_st_mhz: f64, ion: &str) -> Result<(), CliError> {
    let atom = ioncool::presets::by_name(ion)
        .ok_or_else(|| ConfigError(format!("unknown ion `{ion}`")))?;
    let report = analytics::optimal_ratio(&atom, mhz(omega_w_mhz), mhz(delta_st_mhz), None);
    let numeric = cooling::optimize_drive(&atom, mhz(omega_w_mhz), mhz(delta_st_mhz))?;
    let payload = serde_json::json!({
        "ion": atom.name,
        "omega_w_mhz": omega_w_mhz,
        "delta_st_mhz": delta_st_mhz,
        "closed_form": report,
        "closed_form_omega_st_mhz": to_mhz(report.omega_st_opt),
        "numeric_optimum_omega_st_mhz": to_mhz(numeric.omega_st),
        "cooling_delta_w_mhz": to_mhz(numeric.delta_w),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&payload).expect("serializable")
    );
    Ok(())
}

fn cmd_verify(json: bool, inject_formula_error: bool) -> ExitCode {
    let outcomes = acceptance::run_all(&acceptance::Options {
        inject_formula_error,
    });
    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&outcomes).expect("serializable")
        );
    } else {
        for o in &outcomes {
            println!("{}", o.summary_line());
            for line in &o.details {
                println!("    {line}");
            }
        }
        let passed = outcomes.iter().filter(|o| o.passed).count();
        println!("{passed}/{} criteria passed", outcomes.len());
    }
    if outcomes.iter().all(|o| o.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    }
}

/// Full resolved parameter snapshot for emitted files. Keys listed in `skip`
/// (the scan axis) are omitted.
fn fixed_params(cfg: &RunConfig, drive: &LaserDrive, skip: &[&str]) -> Vec<(String, String)> {
    let mut fixed: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: String| {
        if !skip.contains(&k) {
            fixed.push((k.to_string(), v));
        }
    };
    push("atom", cfg.atom.name.clone());
    push("gamma_mhz", format!("{}", to_mhz(cfg.atom.gamma)));
    push("beta_eg", format!("{}", cfg.atom.beta_eg));
    push("lambda_w_nm", format!("{}", cfg.atom.lambda_w * 1e9));
    push("lambda_st_nm", format!("{}", cfg.atom.lambda_st * 1e9));
    push(
        "mass_u",
        format!("{}", cfg.atom.mass / ioncool::consts::AMU),
    );
    push("scheme", cfg.scheme.to_string());
    push("omega_w_mhz", format!("{}", to_mhz(drive.omega_w)));
    push("omega_st_mhz", format!("{}", to_mhz(drive.omega_st)));
    push(
        "delta_w_mhz",
        match cfg.delta_w {
            DeltaWRule::Fixed(v) => format!("{}", to_mhz(v)),
            DeltaWRule::LightShift => "light-shift".into(),
            DeltaWRule::Cooling => "cooling".into(),
        },
    );
    push("delta_st_mhz", format!("{}", to_mhz(drive.delta_st)));
    push("st_copropagates", format!("{}", drive.st_copropagates));
    fixed
}
