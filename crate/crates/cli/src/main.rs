//! `qsync` — exact dynamics and phase-synchronization diagnostics of a
//! classically driven two-level system in a Lorentzian environment.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver cross-check
//! failure, 4 I/O error.

mod config;
mod run;

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Settings;
use run::CliError;

#[derive(Parser)]
#[command(
    name = "qsync",
    version,
    about = "Driven two-level system in a Lorentzian environment: \
             exact dynamics, Husimi maps, synchronization phase diagrams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time evolution: q(t), the reduced state and S(phi) to trajectory.csv
    Trajectory(RunArgs),
    /// Husimi Q-function snapshots as CSV plus PGM heatmaps
    Qmap(RunArgs),
    /// 2-D parameter sweep of a synchronization observable (CSV + PPM)
    Sweep(RunArgs),
}

/// Flags shared by every subcommand. Physics keys carry the same names as
/// in the config file and override it.
#[derive(Args)]
struct RunArgs {
    /// Config file: one `key = value` per line, `#` comments
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,

    /// Worker threads for grid evaluation (0 = all cores)
    #[arg(long, value_name = "N")]
    workers: Option<usize>,

    /// Amplitude solver: closed_form | ode | volterra | pseudomode
    #[arg(long, value_name = "NAME")]
    solver: Option<String>,

    /// Verify the chosen solver against an independent route (exit 3 on
    /// disagreement)
    #[arg(long)]
    cross_check: bool,

    /// Boundary level for the unsynchronized contour
    #[arg(long, value_name = "X")]
    threshold: Option<f64>,

    /// gamma0-axis handling: absolute | tied
    #[arg(long, value_name = "MODE")]
    coupling_sweep_mode: Option<String>,

    #[arg(
        long = "omega_rabi",
        value_name = "VAL",
        help = "Rabi frequency (units of gamma0)"
    )]
    omega_rabi: Option<f64>,
    #[arg(
        long = "delta_drive",
        value_name = "VAL",
        help = "Drive detuning |omega_0 - omega_L|"
    )]
    delta_drive: Option<f64>,
    #[arg(long, value_name = "VAL", help = "TLS-environment coupling strength")]
    gamma0: Option<f64>,
    #[arg(long, value_name = "VAL", help = "Lorentzian spectral width")]
    lambda: Option<f64>,
    #[arg(
        long = "delta_spec",
        value_name = "VAL",
        help = "Spectral detuning omega_0 - omega_c"
    )]
    delta_spec: Option<f64>,
    #[arg(long = "t_final", value_name = "VAL")]
    t_final: Option<f64>,
    #[arg(long = "n_steps", value_name = "N")]
    n_steps: Option<usize>,
    #[arg(
        long = "rho_gg",
        value_name = "VAL",
        help = "Initial ground population"
    )]
    rho_gg: Option<f64>,
    #[arg(long = "re_rho_ge", value_name = "VAL", help = "Initial Re <g|rho|e>")]
    re_rho_ge: Option<f64>,
    #[arg(long = "im_rho_ge", value_name = "VAL", help = "Initial Im <g|rho|e>")]
    im_rho_ge: Option<f64>,
    #[arg(long, value_name = "VAL", help = "Fixed phase for the S(phi) column")]
    phi: Option<f64>,
    #[arg(
        long = "snapshot_times",
        value_name = "LIST",
        help = "Comma-separated qmap times"
    )]
    snapshot_times: Option<String>,
    #[arg(long = "n_theta", value_name = "N")]
    n_theta: Option<usize>,
    #[arg(long = "n_phi", value_name = "N")]
    n_phi: Option<usize>,
    #[arg(long = "x_param", value_name = "NAME")]
    x_param: Option<String>,
    #[arg(long = "x_min", value_name = "VAL")]
    x_min: Option<f64>,
    #[arg(long = "x_max", value_name = "VAL")]
    x_max: Option<f64>,
    #[arg(long = "x_n", value_name = "N")]
    x_n: Option<usize>,
    #[arg(long = "y_param", value_name = "NAME")]
    y_param: Option<String>,
    #[arg(long = "y_min", value_name = "VAL")]
    y_min: Option<f64>,
    #[arg(long = "y_max", value_name = "VAL")]
    y_max: Option<f64>,
    #[arg(long = "y_n", value_name = "N")]
    y_n: Option<usize>,
    #[arg(long = "t_eval", value_name = "VAL", help = "Sweep evaluation time")]
    t_eval: Option<f64>,
    #[arg(long, value_name = "NAME", help = "max_s | s_at_phi | phi_star")]
    observable: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> HashMap<String, String> {
        let mut map = HashMap::new();
        let mut put = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v);
            }
        };
        put("workers", self.workers.map(|v| v.to_string()));
        put("solver", self.solver.clone());
        put("threshold", self.threshold.map(|v| v.to_string()));
        put("coupling_sweep_mode", self.coupling_sweep_mode.clone());
        if self.cross_check {
            put("cross_check", Some("true".into()));
        }
        put("omega_rabi", self.omega_rabi.map(|v| v.to_string()));
        put("delta_drive", self.delta_drive.map(|v| v.to_string()));
        put("gamma0", self.gamma0.map(|v| v.to_string()));
        put("lambda", self.lambda.map(|v| v.to_string()));
        put("delta_spec", self.delta_spec.map(|v| v.to_string()));
        put("t_final", self.t_final.map(|v| v.to_string()));
        put("n_steps", self.n_steps.map(|v| v.to_string()));
        put("rho_gg", self.rho_gg.map(|v| v.to_string()));
        put("re_rho_ge", self.re_rho_ge.map(|v| v.to_string()));
        put("im_rho_ge", self.im_rho_ge.map(|v| v.to_string()));
        put("phi", self.phi.map(|v| v.to_string()));
        put("snapshot_times", self.snapshot_times.clone());
        put("n_theta", self.n_theta.map(|v| v.to_string()));
        put("n_phi", self.n_phi.map(|v| v.to_string()));
        put("x_param", self.x_param.clone());
        put("x_min", self.x_min.map(|v| v.to_string()));
        put("x_max", self.x_max.map(|v| v.to_string()));
        put("x_n", self.x_n.map(|v| v.to_string()));
        put("y_param", self.y_param.clone());
        put("y_min", self.y_min.map(|v| v.to_string()));
        put("y_max", self.y_max.map(|v| v.to_string()));
        put("y_n", self.y_n.map(|v| v.to_string()));
        put("t_eval", self.t_eval.map(|v| v.to_string()));
        put("observable", self.observable.clone());
        map
    }

    fn settings(&self) -> Result<Settings, CliError> {
        let mut settings = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        settings.apply_overrides(&self.overrides())?;
        Ok(settings)
    }
}

type Runner = fn(&Settings, &std::path::Path) -> Result<Vec<PathBuf>, CliError>;

fn dispatch(command: &Command) -> Result<(), CliError> {
    let (args, runner): (&RunArgs, Runner) = match command {
        Command::Trajectory(args) => (args, run::cmd_trajectory),
        Command::Qmap(args) => (args, run::cmd_qmap),
        Command::Sweep(args) => (args, run::cmd_sweep),
    };
    let settings = args.settings()?;
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", args.out.display())))?;
    let written = runner(&settings, &args.out)?;
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
