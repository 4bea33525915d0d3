//! CSV and raster emission.
//!
//! Numbers are serialized with 17 significant digits so that every CSV
//! re-parses to the exact f64 values that produced it. Heatmaps are plain
//! binary PGM (P5) for value grids and PPM (P6) when the boundary overlay
//! needs color; both formats are written without any external dependency
//! and are bit-reproducible.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::channel::DensityMatrix;
use crate::husimi::QGrid;
use crate::sweep::SweepGrid;

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One output row of a trajectory run.
#[derive(Debug, Clone, Copy)]
pub struct TrajectoryRow {
    pub t: f64,
    pub q: Complex64,
    pub state: DensityMatrix,
    pub s_phi: f64,
    pub max_s: f64,
    pub phi_star: f64,
}

pub fn write_trajectory_csv(w: &mut impl Write, rows: &[TrajectoryRow]) -> io::Result<()> {
    writeln!(
        w,
        "t,re_q,im_q,abs_q,rho_gg,re_rho_ge,im_rho_ge,s_phi,max_s,phi_star"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_float(r.t),
            fmt_float(r.q.re),
            fmt_float(r.q.im),
            fmt_float(r.q.norm()),
            fmt_float(r.state.rho_gg()),
            fmt_float(r.state.rho_ge().re),
            fmt_float(r.state.rho_ge().im),
            fmt_float(r.s_phi),
            fmt_float(r.max_s),
            fmt_float(r.phi_star),
        )?;
    }
    Ok(())
}

pub fn write_qgrid_csv(w: &mut impl Write, grid: &QGrid) -> io::Result<()> {
    writeln!(w, "theta,phi,q")?;
    for (i, &theta) in grid.thetas().iter().enumerate() {
        for (j, &phi) in grid.phis().iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_float(theta),
                fmt_float(phi),
                fmt_float(grid.value(i, j))
            )?;
        }
    }
    Ok(())
}

pub fn write_sweep_csv(w: &mut impl Write, grid: &SweepGrid) -> io::Result<()> {
    let spec = &grid.spec;
    writeln!(w, "# x_param = {}", spec.x.param)?;
    writeln!(
        w,
        "# x_range = [{}, {}] n = {}",
        fmt_float(spec.x.min),
        fmt_float(spec.x.max),
        spec.x.n
    )?;
    writeln!(w, "# y_param = {}", spec.y.param)?;
    writeln!(
        w,
        "# y_range = [{}, {}] n = {}",
        fmt_float(spec.y.min),
        fmt_float(spec.y.max),
        spec.y.n
    )?;
    writeln!(w, "# observable = {}", spec.observable)?;
    writeln!(w, "# t_eval = {}", fmt_float(spec.t_eval))?;
    writeln!(w, "# omega_rabi = {}", fmt_float(spec.drive.omega_rabi()))?;
    writeln!(w, "# delta_drive = {}", fmt_float(spec.drive.delta_drive()))?;
    writeln!(w, "# gamma0 = {}", fmt_float(spec.spectrum.gamma0()))?;
    writeln!(w, "# lambda = {}", fmt_float(spec.spectrum.lambda_width()))?;
    writeln!(
        w,
        "# delta_spec = {}",
        fmt_float(spec.spectrum.delta_spec())
    )?;
    writeln!(w, "# nan_cells = {}", grid.nan_cells)?;
    writeln!(w, "x,y,value")?;
    for (iy, &y) in grid.y_values.iter().enumerate() {
        for (ix, &x) in grid.x_values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{}",
                fmt_float(x),
                fmt_float(y),
                fmt_float(grid.value(iy, ix))
            )?;
        }
    }
    Ok(())
}

pub fn write_boundary_csv(w: &mut impl Write, boundary: &[(f64, f64)]) -> io::Result<()> {
    writeln!(w, "x,y")?;
    for &(x, y) in boundary {
        writeln!(w, "{},{}", fmt_float(x), fmt_float(y))?;
    }
    Ok(())
}

/// Maps values linearly from [min, max] onto 0..=255; a flat or empty range
/// renders black, as do non-finite cells.
fn to_intensity(values: &[f64]) -> Vec<u8> {
    let finite = values.iter().copied().filter(|v| v.is_finite());
    let min = finite.clone().fold(f64::INFINITY, f64::min);
    let max = finite.fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| {
            if !v.is_finite() || max <= min {
                0
            } else {
                ((v - min) / (max - min) * 255.0).round() as u8
            }
        })
        .collect()
}

pub fn write_pgm(
    w: &mut impl Write,
    width: usize,
    height: usize,
    values: &[f64],
) -> io::Result<()> {
    assert_eq!(values.len(), width * height);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(&to_intensity(values))
}

/// P6 raster with selected pixels painted white over the grayscale field.
pub fn write_ppm_with_overlay(
    w: &mut impl Write,
    width: usize,
    height: usize,
    values: &[f64],
    white_pixels: &[(usize, usize)],
) -> io::Result<()> {
    assert_eq!(values.len(), width * height);
    let gray = to_intensity(values);
    let mut rgb = Vec::with_capacity(3 * gray.len());
    for g in &gray {
        rgb.extend_from_slice(&[*g, *g, *g]);
    }
    for &(row, col) in white_pixels {
        if row < height && col < width {
            let base = 3 * (row * width + col);
            rgb[base] = 255;
            rgb[base + 1] = 255;
            rgb[base + 2] = 255;
        }
    }
    write!(w, "P6\n{width} {height}\n255\n")?;
    w.write_all(&rgb)
}

/// Renders a Q-function grid: theta runs top to bottom, phi left to right.
pub fn qgrid_to_pgm(path: &Path, grid: &QGrid) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_pgm(
        &mut w,
        grid.phis().len(),
        grid.thetas().len(),
        grid.values(),
    )
}

/// Renders a sweep grid with its boundary overlaid in white. The image is
/// oriented like a plot: the largest y value is the top row.
pub fn sweep_to_ppm(path: &Path, grid: &SweepGrid) -> io::Result<()> {
    let nx = grid.x_values.len();
    let ny = grid.y_values.len();
    let mut flipped = Vec::with_capacity(nx * ny);
    for iy in (0..ny).rev() {
        flipped.extend_from_slice(grid.row(iy));
    }
    let nearest = |v: f64, values: &[f64]| -> usize {
        let step = values[1] - values[0];
        (((v - values[0]) / step).round().max(0.0) as usize).min(values.len() - 1)
    };
    let white: Vec<(usize, usize)> = grid
        .boundary
        .iter()
        .map(|&(x, y)| {
            let ix = nearest(x, &grid.x_values);
            let iy = nearest(y, &grid.y_values);
            (ny - 1 - iy, ix)
        })
        .collect();
    let mut w = BufWriter::new(File::create(path)?);
    write_ppm_with_overlay(&mut w, nx, ny, &flipped, &white)
}
