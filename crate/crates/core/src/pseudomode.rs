//! Independent physical oracle for the amplitude dynamics: the Lorentzian
//! environment re-expressed as a single damped memory mode.
//!
//! In the one-excitation sector the TLS exchanges its excitation with one
//! discrete mode (coupling g', detuning Delta_pm) which leaks into a flat
//! continuum at rate kappa = 2*lambda. Eliminating the mode reproduces the
//! exponential memory kernel exactly, so the excited-state amplitude
//! c_E(t) must equal q(t) from the closed form; the identification
//! kappa = 2*lambda is fixed by that kernel match.

use num_complex::Complex64;

use crate::amplitude::validate_grid;
use crate::error::Result;
use crate::params::{kernel_rate, DriveParams, SpectrumParams};

/// Memory-mode parameters derived from the drive and spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudomodeParams {
    /// TLS-mode coupling g' = cos^2(eta/2) sqrt(gamma0 lambda / 2).
    pub coupling_g: f64,
    /// Mode-continuum decay rate kappa = 2 lambda.
    pub decay_kappa: f64,
    /// TLS-mode detuning Delta_pm = Delta - delta - omega_D (the negative
    /// of the effective detuning).
    pub detuning_pm: f64,
}

impl PseudomodeParams {
    /// kappa/2 + i Delta_pm, which must equal the kernel rate K.
    pub fn complex_rate(&self) -> Complex64 {
        Complex64::new(self.decay_kappa / 2.0, self.detuning_pm)
    }
}

/// Derives the memory-mode parameters. The invariant
/// kappa/2 + i Delta_pm = K holds exactly by construction.
pub fn pseudomode_params(drive: &DriveParams, spectrum: &SpectrumParams) -> PseudomodeParams {
    let cos_half_sq = (drive.mixing_angle() / 2.0).cos().powi(2);
    PseudomodeParams {
        coupling_g: cos_half_sq * (spectrum.gamma0() * spectrum.lambda_width() / 2.0).sqrt(),
        decay_kappa: 2.0 * spectrum.lambda_width(),
        detuning_pm: drive.delta_drive() - spectrum.delta_spec() - drive.dressed_frequency(),
    }
}

/// One-excitation state: amplitude on the excited TLS, amplitude on the
/// memory mode, and the population already emitted to the continuum.
#[derive(Debug, Clone, Copy)]
pub struct PseudomodeState {
    pub c_excited: Complex64,
    pub c_mode: Complex64,
    pub p_lost: f64,
}

impl PseudomodeState {
    /// |c_E|^2 + |c_D|^2 + p_lost; stays at 1 up to integration error.
    pub fn norm_budget(&self) -> f64 {
        self.c_excited.norm_sqr() + self.c_mode.norm_sqr() + self.p_lost
    }
}

/// Integrates the coupled amplitudes
///
/// dc_E/dt = -i g' c_D,
/// dc_D/dt = -i g' c_E - (kappa/2 + i Delta_pm) c_D,
///
/// from (1, 0) with a fourth-order stepper on fixed substeps, accumulating
/// p_lost = kappa * Int |c_D|^2 dt alongside.
pub fn pseudomode_trajectory(
    drive: &DriveParams,
    spectrum: &SpectrumParams,
    t_grid: &[f64],
) -> Result<Vec<PseudomodeState>> {
    validate_grid(t_grid)?;
    let pm = pseudomode_params(drive, spectrum);
    let g = pm.coupling_g;
    let kappa = pm.decay_kappa;
    let damp = pm.complex_rate();
    let rate_scale = kernel_rate(drive, spectrum).value().norm() + 2.0 * g;
    let h_max = (2.5e-3_f64).min(2e-2 / rate_scale);

    let deriv = |ce: Complex64, cd: Complex64| -> (Complex64, Complex64, f64) {
        (
            -Complex64::i() * g * cd,
            -Complex64::i() * g * ce - damp * cd,
            kappa * cd.norm_sqr(),
        )
    };

    let mut ce = Complex64::new(1.0, 0.0);
    let mut cd = Complex64::new(0.0, 0.0);
    let mut p = 0.0;
    let mut out = Vec::with_capacity(t_grid.len());
    out.push(PseudomodeState {
        c_excited: ce,
        c_mode: cd,
        p_lost: p,
    });
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        if span > 0.0 {
            let n_sub = (span / h_max).ceil().max(1.0) as usize;
            let h = span / n_sub as f64;
            for _ in 0..n_sub {
                let (k1e, k1d, k1p) = deriv(ce, cd);
                let (k2e, k2d, k2p) = deriv(ce + 0.5 * h * k1e, cd + 0.5 * h * k1d);
                let (k3e, k3d, k3p) = deriv(ce + 0.5 * h * k2e, cd + 0.5 * h * k2d);
                let (k4e, k4d, k4p) = deriv(ce + h * k3e, cd + h * k3d);
                ce += (h / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
                cd += (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
                p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            }
        }
        out.push(PseudomodeState {
            c_excited: ce,
            c_mode: cd,
            p_lost: p,
        });
    }
    Ok(out)
}
