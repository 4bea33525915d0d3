//! The three subcommand bodies: trajectory, qmap and sweep.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use qsync_core::output::{
    fmt_float, qgrid_to_pgm, sweep_to_ppm, write_boundary_csv, write_qgrid_csv, write_sweep_csv,
    write_trajectory_csv, TrajectoryRow,
};
use qsync_core::parallel::install;
use qsync_core::{
    closed_form_series, evolve, extract_boundary, max_s, pseudomode_trajectory, q_ode, q_volterra,
    run_sweep, s_measure, ChannelAt, QGrid,
};

use crate::config::{ConfigError, Settings, Solver};

/// Command failure with its exit-code class: 2 config, 3 cross-check
/// disagreement, 4 I/O.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    CrossCheck(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::CrossCheck(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::CrossCheck(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<qsync_core::Error> for CliError {
    fn from(e: qsync_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Amplitude samples on the output grid for the configured solver, plus
/// the memory-mode populations when that oracle is the source.
fn amplitude_values(
    settings: &Settings,
    grid: &[f64],
) -> Result<(Vec<Complex64>, Option<Vec<qsync_core::PseudomodeState>>), CliError> {
    let drive = settings.drive()?;
    let spectrum = settings.spectrum()?;
    Ok(match settings.solver {
        Solver::ClosedForm => (
            closed_form_series(&drive, &spectrum, grid)?
                .values()
                .to_vec(),
            None,
        ),
        Solver::Ode => (q_ode(&drive, &spectrum, grid)?.values().to_vec(), None),
        Solver::Volterra => {
            let series = if grid.len() < 2 {
                q_volterra(&drive, &spectrum, 0.0, 1.0)?
            } else {
                q_volterra(&drive, &spectrum, settings.t_final, grid[1] - grid[0])?
            };
            (series.values().to_vec(), None)
        }
        Solver::Pseudomode => {
            let states = pseudomode_trajectory(&drive, &spectrum, grid)?;
            let values = states.iter().map(|s| s.c_excited).collect();
            (values, Some(states))
        }
    })
}

/// Compares the configured solver against an independent route and fails
/// with exit code 3 beyond the tolerance (1e-4 for the second-order
/// quadrature, 1e-6 for the fourth-order routes).
fn cross_check(settings: &Settings, grid: &[f64], values: &[Complex64]) -> Result<(), CliError> {
    let drive = settings.drive()?;
    let spectrum = settings.spectrum()?;
    let (reference, ref_name) = if settings.solver == Solver::ClosedForm {
        (q_ode(&drive, &spectrum, grid)?, "ode")
    } else {
        (closed_form_series(&drive, &spectrum, grid)?, "closed_form")
    };
    let tol = match settings.solver {
        Solver::Volterra => 1e-4,
        _ => 1e-6,
    };
    let err = values
        .iter()
        .zip(reference.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if err > tol {
        return Err(CliError::CrossCheck(format!(
            "solver {} disagrees with {} by {err:.3e} (tolerance {tol:.0e})",
            settings.solver, ref_name
        )));
    }
    println!(
        "cross-check: {} vs {} agrees to {err:.3e}",
        settings.solver, ref_name
    );
    Ok(())
}

pub fn cmd_trajectory(settings: &Settings, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let drive = settings.drive()?;
    let rho0 = settings.initial_state()?;
    let grid = settings.time_grid()?;
    let (values, memory) = amplitude_values(settings, &grid)?;
    if settings.cross_check {
        cross_check(settings, &grid, &values)?;
    }

    let eta = drive.mixing_angle();
    let rows: Vec<TrajectoryRow> = grid
        .iter()
        .zip(&values)
        .map(|(&t, &q)| {
            let rho = ChannelAt::with_amplitude(eta, q, t).apply(&rho0);
            let sync = max_s(&rho);
            TrajectoryRow {
                t,
                q,
                state: rho,
                s_phi: s_measure(&rho, settings.phi),
                max_s: sync.s_of_phi,
                phi_star: sync.phi,
            }
        })
        .collect();

    let csv_path = out_dir.join("trajectory.csv");
    write_trajectory_csv(&mut create(&csv_path)?, &rows)?;
    let mut written = vec![csv_path];

    if let Some(states) = memory {
        let path = out_dir.join("memory.csv");
        let mut w = create(&path)?;
        writeln!(w, "t,p_excited,p_mode,p_lost")?;
        for (t, s) in grid.iter().zip(&states) {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_float(*t),
                fmt_float(s.c_excited.norm_sqr()),
                fmt_float(s.c_mode.norm_sqr()),
                fmt_float(s.p_lost)
            )?;
        }
        written.push(path);
    }
    Ok(written)
}

pub fn cmd_qmap(settings: &Settings, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if settings.solver != Solver::ClosedForm {
        return Err(CliError::Config(format!(
            "solver {} is not valid for qmap (only closed_form)",
            settings.solver
        )));
    }
    if settings.n_theta < 2 || settings.n_phi < 2 {
        return Err(CliError::Config("n_theta and n_phi must be >= 2".into()));
    }
    let drive = settings.drive()?;
    let spectrum = settings.spectrum()?;
    let rho0 = settings.initial_state()?;
    let mut written = Vec::new();
    for &t in &settings.snapshot_times {
        let rho = evolve(&rho0, &drive, &spectrum, t)?;
        let grid = install(settings.workers, || {
            QGrid::compute(&rho, settings.n_theta, settings.n_phi)
        });
        let csv_path = out_dir.join(format!("qmap_t{t}.csv"));
        write_qgrid_csv(&mut create(&csv_path)?, &grid)?;
        let pgm_path = out_dir.join(format!("qmap_t{t}.pgm"));
        qgrid_to_pgm(&pgm_path, &grid)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", pgm_path.display())))?;
        written.push(csv_path);
        written.push(pgm_path);
    }
    Ok(written)
}

pub fn cmd_sweep(settings: &Settings, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if settings.solver != Solver::ClosedForm {
        return Err(CliError::Config(format!(
            "solver {} is not valid for sweep (only closed_form)",
            settings.solver
        )));
    }
    if !settings.threshold.is_finite() || settings.threshold <= 0.0 {
        return Err(CliError::Config(format!(
            "threshold must be finite and > 0, got {}",
            settings.threshold
        )));
    }
    let spec = settings.sweep_spec()?;
    let mut grid = run_sweep(&spec, settings.workers)?;
    grid.boundary = extract_boundary(&grid, settings.threshold);

    if grid.nan_cells > 0 {
        eprintln!(
            "warning: {} of {} cells failed parameter validation and are NaN",
            grid.nan_cells,
            grid.values.len()
        );
    }

    let sweep_path = out_dir.join("sweep.csv");
    write_sweep_csv(&mut create(&sweep_path)?, &grid)?;
    let boundary_path = out_dir.join("boundary.csv");
    write_boundary_csv(&mut create(&boundary_path)?, &grid.boundary)?;
    let ppm_path = out_dir.join("sweep.ppm");
    sweep_to_ppm(&ppm_path, &grid)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", ppm_path.display())))?;
    Ok(vec![sweep_path, boundary_path, ppm_path])
}
