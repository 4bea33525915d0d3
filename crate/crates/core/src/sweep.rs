//! Phase-diagram engine: evaluates a synchronization observable over a 2-D
//! parameter plane, extracts the unsynchronized boundary contour, and
//! locates the center of the synchronization tongue.
//!
//! Every cell is an independent pure computation (closed-form amplitude,
//! exact channel, coherence observable), so the grid parallelizes with no
//! coordination; results are collected in index order and are identical
//! for any worker count.

use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelAt, DensityMatrix};
use crate::error::{Error, Result};
use crate::husimi::{max_s, s_measure};
use crate::parallel::*;
use crate::params::{DriveParams, SpectrumParams};

/// Observable threshold below which a cell counts as unsynchronized when
/// extracting the default boundary (about 1% of the attainable maximum 1/8).
pub const DEFAULT_BOUNDARY_THRESHOLD: f64 = 1e-3;

/// Parameter that can be placed on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    DeltaSpec,
    OmegaRabi,
    Gamma0,
    LambdaWidth,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SweepParam::DeltaSpec => "delta_spec",
            SweepParam::OmegaRabi => "omega_rabi",
            SweepParam::Gamma0 => "gamma0",
            SweepParam::LambdaWidth => "lambda",
        };
        f.write_str(name)
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta_spec" => Ok(SweepParam::DeltaSpec),
            "omega_rabi" => Ok(SweepParam::OmegaRabi),
            "gamma0" => Ok(SweepParam::Gamma0),
            "lambda" | "lambda_width" => Ok(SweepParam::LambdaWidth),
            other => Err(Error::InvalidSweep(format!(
                "unknown sweep parameter '{other}'"
            ))),
        }
    }
}

/// What to record at each grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observable {
    /// max_phi S(phi) = |rho_ge|/4.
    MaxS,
    /// S at a fixed phase.
    SAtPhi(f64),
    /// The locked phase arg(rho_ge), in [-pi, pi].
    PhiStar,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::MaxS => write!(f, "max_s"),
            Observable::SAtPhi(phi) => write!(f, "s_at_phi({phi})"),
            Observable::PhiStar => write!(f, "phi_star"),
        }
    }
}

/// How a `gamma0` axis interacts with the spectral width.
///
/// `Absolute` sweeps the kernel amplitude gamma0*lambda/2 while lambda (and
/// with it the kernel decay rate) stays at its configured absolute value.
/// `Tied` reads lambda as quoted in units of the swept coupling and scales
/// it proportionally, which reduces the sweep to a time-rescaled family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingSweepMode {
    #[default]
    Absolute,
    Tied,
}

impl FromStr for CouplingSweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(CouplingSweepMode::Absolute),
            "tied" => Ok(CouplingSweepMode::Tied),
            other => Err(Error::InvalidSweep(format!(
                "unknown coupling-sweep mode '{other}'"
            ))),
        }
    }
}

/// One sweep axis: parameter, inclusive range and point count.
#[derive(Debug, Clone, Copy)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        let span = self.max - self.min;
        (0..self.n)
            .map(|i| self.min + span * i as f64 / (self.n - 1) as f64)
            .collect()
    }

    /// Grid spacing of the axis.
    pub fn cell(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSweep(format!(
                "axis {} needs at least 2 points, got {}",
                self.param, self.n
            )));
        }
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(Error::InvalidSweep(format!(
                "axis {} has invalid range [{}, {}]",
                self.param, self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Full specification of a 2-D sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub x: Axis,
    pub y: Axis,
    pub drive: DriveParams,
    pub spectrum: SpectrumParams,
    pub t_eval: f64,
    pub initial_state: DensityMatrix,
    pub observable: Observable,
    pub coupling_mode: CouplingSweepMode,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        self.x.validate()?;
        self.y.validate()?;
        if self.x.param == self.y.param {
            return Err(Error::InvalidSweep(format!(
                "x and y axes both sweep {}",
                self.x.param
            )));
        }
        if !self.t_eval.is_finite() || self.t_eval < 0.0 {
            return Err(Error::InvalidSweep(format!(
                "t_eval must be finite and >= 0, got {}",
                self.t_eval
            )));
        }
        Ok(())
    }
}

/// Result grid: observable values on the n_y x n_x plane plus the extracted
/// zero boundary at the default threshold.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// Row-major, y rows by x columns.
    pub values: Vec<f64>,
    /// Level-set points of observable = DEFAULT_BOUNDARY_THRESHOLD.
    pub boundary: Vec<(f64, f64)>,
    /// Cells whose parameters failed validation (stored as NaN).
    pub nan_cells: usize,
}

impl SweepGrid {
    pub fn value(&self, iy: usize, ix: usize) -> f64 {
        self.values[iy * self.x_values.len() + ix]
    }

    pub fn row(&self, iy: usize) -> &[f64] {
        let nx = self.x_values.len();
        &self.values[iy * nx..(iy + 1) * nx]
    }
}

fn override_param(
    drive: DriveParams,
    spectrum: SpectrumParams,
    base_spectrum: &SpectrumParams,
    param: SweepParam,
    value: f64,
    mode: CouplingSweepMode,
) -> Result<(DriveParams, SpectrumParams)> {
    match param {
        SweepParam::DeltaSpec => Ok((
            drive,
            SpectrumParams::new(spectrum.gamma0(), spectrum.lambda_width(), value)?,
        )),
        SweepParam::OmegaRabi => Ok((DriveParams::new(value, drive.delta_drive())?, spectrum)),
        SweepParam::Gamma0 => {
            let lambda = match mode {
                CouplingSweepMode::Absolute => spectrum.lambda_width(),
                CouplingSweepMode::Tied => {
                    base_spectrum.lambda_width() * value / base_spectrum.gamma0()
                }
            };
            Ok((
                drive,
                SpectrumParams::new(value, lambda, spectrum.delta_spec())?,
            ))
        }
        SweepParam::LambdaWidth => Ok((
            drive,
            SpectrumParams::new(spectrum.gamma0(), value, spectrum.delta_spec())?,
        )),
    }
}

fn cell_value(spec: &SweepSpec, x: f64, y: f64) -> f64 {
    let applied = override_param(
        spec.drive,
        spec.spectrum,
        &spec.spectrum,
        spec.x.param,
        x,
        spec.coupling_mode,
    )
    .and_then(|(d, s)| override_param(d, s, &spec.spectrum, spec.y.param, y, spec.coupling_mode));
    let (drive, spectrum) = match applied {
        Ok(pair) => pair,
        Err(_) => return f64::NAN,
    };
    let rho = ChannelAt::new(&drive, &spectrum, spec.t_eval).apply(&spec.initial_state);
    match spec.observable {
        Observable::MaxS => max_s(&rho).s_of_phi,
        Observable::SAtPhi(phi) => s_measure(&rho, phi),
        Observable::PhiStar => max_s(&rho).phi,
    }
}

fn finish(spec: SweepSpec, x_values: Vec<f64>, y_values: Vec<f64>, values: Vec<f64>) -> SweepGrid {
    let nan_cells = values.iter().filter(|v| v.is_nan()).count();
    let mut grid = SweepGrid {
        spec,
        x_values,
        y_values,
        values,
        boundary: Vec::new(),
        nan_cells,
    };
    grid.boundary = extract_boundary(&grid, DEFAULT_BOUNDARY_THRESHOLD);
    grid
}

/// Runs the sweep on the current worker pool (`workers == 0` uses the
/// default pool size). Cell values do not depend on the worker count.
#[cfg(feature = "parallel")]
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepGrid> {
    spec.validate()?;
    let x_values = spec.x.values();
    let y_values = spec.y.values();
    let spec = *spec;
    let values: Vec<f64> = install(workers, || {
        (0..x_values.len() * y_values.len())
            .into_par_iter()
            .map(|idx| {
                let (iy, ix) = (idx / x_values.len(), idx % x_values.len());
                cell_value(&spec, x_values[ix], y_values[iy])
            })
            .collect()
    });
    Ok(finish(spec, x_values, y_values, values))
}

/// Sequential build of [`run_sweep`]; the only option without the
/// `parallel` feature.
#[cfg(not(feature = "parallel"))]
pub fn run_sweep(spec: &SweepSpec, _workers: usize) -> Result<SweepGrid> {
    run_sweep_sequential(spec)
}

/// Single-threaded reference path. Kept unconditionally compiled so the
/// benchmarks can compare it against the data-parallel path cell for cell.
pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<SweepGrid> {
    spec.validate()?;
    let x_values = spec.x.values();
    let y_values = spec.y.values();
    let mut values = Vec::with_capacity(x_values.len() * y_values.len());
    for &y in &y_values {
        for &x in &x_values {
            values.push(cell_value(spec, x, y));
        }
    }
    Ok(finish(*spec, x_values, y_values, values))
}

/// Sub-cell linear interpolation of the level set observable = threshold.
///
/// Crossings are located along every constant-y row and every constant-x
/// column; an empty result simply means the level set does not intersect
/// the grid.
pub fn extract_boundary(grid: &SweepGrid, threshold: f64) -> Vec<(f64, f64)> {
    let nx = grid.x_values.len();
    let ny = grid.y_values.len();
    let mut points = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx - 1 {
            let (v0, v1) = (grid.value(iy, ix), grid.value(iy, ix + 1));
            if v0.is_finite() && v1.is_finite() && (v0 - threshold) * (v1 - threshold) < 0.0 {
                let frac = (threshold - v0) / (v1 - v0);
                let x = grid.x_values[ix] + frac * (grid.x_values[ix + 1] - grid.x_values[ix]);
                points.push((x, grid.y_values[iy]));
            }
        }
    }
    for ix in 0..nx {
        for iy in 0..ny - 1 {
            let (v0, v1) = (grid.value(iy, ix), grid.value(iy + 1, ix));
            if v0.is_finite() && v1.is_finite() && (v0 - threshold) * (v1 - threshold) < 0.0 {
                let frac = (threshold - v0) / (v1 - v0);
                let y = grid.y_values[iy] + frac * (grid.y_values[iy + 1] - grid.y_values[iy]);
                points.push((grid.x_values[ix], y));
            }
        }
    }
    points
}

/// Locates the center of the synchronization tongue on a grid whose x axis
/// sweeps the spectral detuning.
///
/// Per constant-y slice the two outermost near-zero dips of the observable
/// bracket the tongue interior; the argmax of the interior ridge is
/// recorded and the slice results are averaged. Slices without a bracketed
/// interior are skipped.
pub fn tongue_center(grid: &SweepGrid) -> Result<f64> {
    if grid.spec.x.param != SweepParam::DeltaSpec {
        return Err(Error::InvalidSweep(format!(
            "tongue center requires a delta_spec x axis, got {}",
            grid.spec.x.param
        )));
    }
    let nx = grid.x_values.len();
    let mut centers = Vec::new();
    for iy in 0..grid.y_values.len() {
        let row = grid.row(iy);
        let slice_max = row
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        if slice_max <= 0.0 {
            continue;
        }
        let dip_cut = 0.25 * slice_max;
        let mut dips = Vec::new();
        for i in 1..nx - 1 {
            if row[i].is_finite()
                && row[i] < dip_cut
                && row[i] <= row[i - 1]
                && row[i] <= row[i + 1]
            {
                dips.push(i);
            }
        }
        if dips.len() < 2 {
            continue;
        }
        let (left, right) = (dips[0], *dips.last().unwrap());
        if right <= left + 1 {
            continue;
        }
        let interior = &row[left..=right];
        let mut best = (0, f64::NEG_INFINITY);
        for (offset, &v) in interior.iter().enumerate() {
            if v.is_finite() && v > best.1 {
                best = (offset, v);
            }
        }
        centers.push(grid.x_values[left + best.0]);
    }
    if centers.is_empty() {
        return Err(Error::InvalidSweep(
            "no y slice contains a bracketed tongue interior".into(),
        ));
    }
    Ok(centers.iter().sum::<f64>() / centers.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plus_spec(x: Axis, y: Axis, t_eval: f64) -> SweepSpec {
        SweepSpec {
            x,
            y,
            drive: DriveParams::new(1.0, 0.0).unwrap(),
            spectrum: SpectrumParams::new(1.0, 0.1, 0.0).unwrap(),
            t_eval,
            initial_state: DensityMatrix::plus(),
            observable: Observable::MaxS,
            coupling_mode: CouplingSweepMode::Absolute,
        }
    }

    fn delta_axis(min: f64, max: f64, n: usize) -> Axis {
        Axis {
            param: SweepParam::DeltaSpec,
            min,
            max,
            n,
        }
    }

    fn gamma_axis(min: f64, max: f64, n: usize) -> Axis {
        Axis {
            param: SweepParam::Gamma0,
            min,
            max,
            n,
        }
    }

    #[test]
    fn degenerate_two_by_two() {
        let spec = plus_spec(delta_axis(-1.0, 1.0, 2), gamma_axis(0.5, 1.0, 2), 10.0);
        let grid = run_sweep(&spec, 1).unwrap();
        assert_eq!(grid.values.len(), 4);
        assert!(grid.values.iter().all(|v| v.is_finite()));
        assert_eq!(grid.nan_cells, 0);
    }

    #[test]
    fn zero_time_sweep_is_flat_at_maximum() {
        // identity channel: the |+> coherence stays 1/2, max S stays 1/8
        let spec = plus_spec(delta_axis(-3.0, 3.0, 11), gamma_axis(0.2, 2.0, 7), 0.0);
        let grid = run_sweep(&spec, 0).unwrap();
        for &v in &grid.values {
            assert!((v - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn values_bounded_by_eighth() {
        let spec = plus_spec(delta_axis(-6.0, 2.0, 33), gamma_axis(0.1, 2.0, 12), 100.0);
        let grid = run_sweep(&spec, 0).unwrap();
        for &v in &grid.values {
            assert!((0.0..=0.125 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn worker_count_does_not_change_cells() {
        let spec = plus_spec(delta_axis(-4.0, 1.0, 21), gamma_axis(0.3, 1.5, 9), 50.0);
        let seq = run_sweep_sequential(&spec).unwrap();
        let one = run_sweep(&spec, 1).unwrap();
        let eight = run_sweep(&spec, 8).unwrap();
        for i in 0..seq.values.len() {
            assert_eq!(seq.values[i].to_bits(), one.values[i].to_bits());
            assert_eq!(seq.values[i].to_bits(), eight.values[i].to_bits());
        }
    }

    #[test]
    fn rejects_aliased_axes() {
        let spec = plus_spec(delta_axis(-1.0, 1.0, 4), delta_axis(0.0, 1.0, 4), 1.0);
        assert!(matches!(run_sweep(&spec, 1), Err(Error::InvalidSweep(_))));
    }

    #[test]
    fn rejects_single_point_axis() {
        let spec = plus_spec(delta_axis(-1.0, 1.0, 1), gamma_axis(0.5, 1.0, 2), 1.0);
        assert!(run_sweep(&spec, 1).is_err());
        let spec = plus_spec(delta_axis(1.0, -1.0, 5), gamma_axis(0.5, 1.0, 2), 1.0);
        assert!(run_sweep(&spec, 1).is_err());
    }

    #[test]
    fn invalid_cells_become_nan() {
        // lambda = 0 is not a valid spectral width: that cell is flagged,
        // the rest of the grid is still produced
        let spec = plus_spec(
            Axis {
                param: SweepParam::LambdaWidth,
                min: 0.0,
                max: 1.0,
                n: 3,
            },
            gamma_axis(0.5, 1.0, 2),
            1.0,
        );
        let grid = run_sweep(&spec, 1).unwrap();
        assert_eq!(grid.nan_cells, 2);
        assert!(grid.value(0, 0).is_nan());
        assert!(grid.value(1, 0).is_nan());
        assert!(grid.value(0, 1).is_finite());
    }

    #[test]
    fn boundary_of_constant_grid_is_empty() {
        let spec = plus_spec(delta_axis(-1.0, 1.0, 9), gamma_axis(0.5, 1.0, 5), 0.0);
        let grid = run_sweep(&spec, 1).unwrap();
        assert!(extract_boundary(&grid, 1e-3).is_empty());
    }

    #[test]
    fn boundary_of_absolute_value_profile() {
        // synthetic grid v = |x|: the level set hugs x = 0 within half a cell
        let spec = plus_spec(delta_axis(-1.0, 1.0, 21), gamma_axis(0.5, 1.0, 2), 0.0);
        let mut grid = run_sweep(&spec, 1).unwrap();
        for iy in 0..grid.y_values.len() {
            for ix in 0..grid.x_values.len() {
                let x = grid.x_values[ix];
                grid.values[iy * grid.x_values.len() + ix] = x.abs();
            }
        }
        let boundary = extract_boundary(&grid, 1e-3);
        assert!(!boundary.is_empty());
        let half_cell = 0.05;
        for &(x, _) in &boundary {
            assert!(x.abs() <= half_cell, "crossing at {x}");
        }
    }

    #[test]
    fn tongue_center_requires_delta_axis() {
        let spec = plus_spec(
            Axis {
                param: SweepParam::OmegaRabi,
                min: 0.0,
                max: 2.0,
                n: 5,
            },
            gamma_axis(0.5, 1.0, 3),
            1.0,
        );
        let grid = run_sweep(&spec, 1).unwrap();
        assert!(tongue_center(&grid).is_err());
    }

    #[test]
    fn tongue_center_resonant_drive() {
        // Omega = 1, Delta = 0: the tongue sits at delta = -2
        let spec = plus_spec(delta_axis(-6.0, 2.0, 81), gamma_axis(0.5, 2.0, 10), 100.0);
        let grid = run_sweep(&spec, 0).unwrap();
        let center = tongue_center(&grid).unwrap();
        assert!(
            (center + 2.0).abs() <= spec.x.cell(),
            "center {center} vs -2 (cell {})",
            spec.x.cell()
        );
    }

    #[test]
    fn tied_mode_scales_lambda_with_coupling() {
        let mut spec = plus_spec(delta_axis(-3.0, 1.0, 5), gamma_axis(2.0, 4.0, 2), 20.0);
        spec.coupling_mode = CouplingSweepMode::Tied;
        let tied = run_sweep(&spec, 1).unwrap();
        // the tied cell at gamma0 = 2 equals an absolute-mode cell with
        // lambda scaled to 0.2
        let mut abs_spec = spec;
        abs_spec.coupling_mode = CouplingSweepMode::Absolute;
        abs_spec.spectrum = SpectrumParams::new(1.0, 0.2, 0.0).unwrap();
        let absolute = run_sweep(&abs_spec, 1).unwrap();
        for ix in 0..5 {
            assert_eq!(tied.value(0, ix).to_bits(), absolute.value(0, ix).to_bits());
        }
    }

    #[test]
    fn half_tongue_undriven_column_unlocks() {
        // (Omega, lambda) plane: the Omega = 0 column has no stationary
        // coherence, so locking dies out wherever the decay is fast enough
        let spec = SweepSpec {
            x: Axis {
                param: SweepParam::OmegaRabi,
                min: 0.0,
                max: 4.0,
                n: 9,
            },
            y: Axis {
                param: SweepParam::LambdaWidth,
                min: 0.05,
                max: 5.0,
                n: 12,
            },
            drive: DriveParams::new(1.0, 0.0).unwrap(),
            spectrum: SpectrumParams::new(1.0, 0.1, 0.0).unwrap(),
            t_eval: 100.0,
            initial_state: DensityMatrix::plus(),
            observable: Observable::MaxS,
            coupling_mode: CouplingSweepMode::Absolute,
        };
        let grid = run_sweep(&spec, 0).unwrap();
        for (iy, &lambda) in grid.y_values.iter().enumerate() {
            if lambda >= 2.0 {
                // Markovian rows: amplitude fully decayed by t = 100
                assert!(
                    grid.value(iy, 0) < 1e-6,
                    "lambda={lambda}: {}",
                    grid.value(iy, 0)
                );
            }
        }
        // in the long-memory row the locking strengthens with the drive
        let narrow = grid.row(0);
        assert!(narrow[8] > 0.12, "max_s at Omega=4: {}", narrow[8]);
        assert!(
            narrow[8] > narrow[2],
            "Omega=4 vs Omega=1: {} vs {}",
            narrow[8],
            narrow[2]
        );
    }

    #[test]
    fn phi_star_observable_reports_locked_phase() {
        let mut spec = plus_spec(delta_axis(-3.0, 1.0, 7), gamma_axis(0.5, 1.5, 3), 0.0);
        spec.observable = Observable::PhiStar;
        let grid = run_sweep(&spec, 1).unwrap();
        // identity channel keeps the |+> phase preference at phi = 0
        for &v in &grid.values {
            assert_eq!(v, 0.0);
        }
    }
}
