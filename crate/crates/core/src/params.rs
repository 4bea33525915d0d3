//! Physical parameters of a classically driven two-level system (TLS)
//! coupled to a bosonic environment with a Lorentzian spectral density,
//! together with the derived dressed-state quantities.
//!
//! Unit convention: all rates and frequencies are expressed in units of the
//! nominal TLS-environment coupling strength gamma0, and times in units of
//! 1/gamma0. Internally gamma0 defaults to 1; it is kept as an explicit
//! field so that coupling-strength sweeps can scale the kernel amplitude.

use num_complex::Complex64;

use crate::channel::DensityMatrix;
use crate::error::{Error, Result};

/// Classical-drive parameters of the TLS.
///
/// `omega_rabi` is the Rabi frequency of the driving field and
/// `delta_drive` the magnitude of the detuning between the TLS transition
/// and the drive frequency. Both are nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    omega_rabi: f64,
    delta_drive: f64,
}

impl DriveParams {
    pub fn new(omega_rabi: f64, delta_drive: f64) -> Result<Self> {
        if !omega_rabi.is_finite() || omega_rabi < 0.0 {
            return Err(Error::InvalidParam(format!(
                "omega_rabi must be finite and >= 0, got {omega_rabi}"
            )));
        }
        if !delta_drive.is_finite() || delta_drive < 0.0 {
            return Err(Error::InvalidParam(format!(
                "delta_drive must be finite and >= 0, got {delta_drive}"
            )));
        }
        Ok(Self {
            omega_rabi,
            delta_drive,
        })
    }

    pub fn omega_rabi(&self) -> f64 {
        self.omega_rabi
    }

    pub fn delta_drive(&self) -> f64 {
        self.delta_drive
    }

    /// Dressed-state mixing angle eta = atan2(2*Omega, Delta), in [0, pi/2].
    ///
    /// atan2 keeps the resonant case Delta = 0 well defined (eta = pi/2 for
    /// any Omega > 0) without dividing by the detuning.
    pub fn mixing_angle(&self) -> f64 {
        (2.0 * self.omega_rabi).atan2(self.delta_drive)
    }

    /// Dressed frequency omega_D = sqrt(Delta^2 + 4 Omega^2).
    pub fn dressed_frequency(&self) -> f64 {
        (self.delta_drive * self.delta_drive + 4.0 * self.omega_rabi * self.omega_rabi).sqrt()
    }
}

/// Lorentzian environment parameters.
///
/// `gamma0` is the TLS-environment coupling strength (the global rate
/// unit), `lambda_width` the spectral width (inverse memory time) and
/// `delta_spec` the detuning between the TLS transition and the center of
/// the Lorentzian spectrum. `delta_spec` may take either sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumParams {
    gamma0: f64,
    lambda_width: f64,
    delta_spec: f64,
}

impl SpectrumParams {
    pub fn new(gamma0: f64, lambda_width: f64, delta_spec: f64) -> Result<Self> {
        if !gamma0.is_finite() || gamma0 <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "gamma0 must be finite and > 0, got {gamma0}"
            )));
        }
        if !lambda_width.is_finite() || lambda_width <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "lambda_width must be finite and > 0, got {lambda_width}"
            )));
        }
        if !delta_spec.is_finite() {
            return Err(Error::InvalidParam(format!(
                "delta_spec must be finite, got {delta_spec}"
            )));
        }
        Ok(Self {
            gamma0,
            lambda_width,
            delta_spec,
        })
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn lambda_width(&self) -> f64 {
        self.lambda_width
    }

    pub fn delta_spec(&self) -> f64 {
        self.delta_spec
    }

    /// True in the weak-coupling (memoryless) regime gamma0 < lambda/2.
    pub fn is_markovian(&self) -> bool {
        self.gamma0 < self.lambda_width / 2.0
    }
}

/// Complex memory-kernel rate K = lambda + i(Delta - delta - omega_D).
///
/// The environment correlation function is (gamma0*lambda/2) exp(-K s),
/// so Re K = lambda is the kernel decay rate and -Im K the effective
/// detuning between the dressed TLS and the spectral center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRate(Complex64);

impl KernelRate {
    pub fn value(&self) -> Complex64 {
        self.0
    }
}

/// Computes the kernel rate K from the drive and spectrum parameters.
pub fn kernel_rate(drive: &DriveParams, spectrum: &SpectrumParams) -> KernelRate {
    let im = drive.delta_drive() - spectrum.delta_spec() - drive.dressed_frequency();
    KernelRate(Complex64::new(spectrum.lambda_width(), im))
}

/// Effective detuning between the dressed TLS and the discrete memory mode,
/// Delta_eff = omega_D - Delta + delta.
///
/// It vanishes exactly on the resonance line delta = Delta - omega_D, the
/// center of the synchronization tongue.
pub fn effective_detuning(drive: &DriveParams, spectrum: &SpectrumParams) -> f64 {
    drive.dressed_frequency() - drive.delta_drive() + spectrum.delta_spec()
}

/// Full configuration of a single time-domain simulation.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub drive: DriveParams,
    pub spectrum: SpectrumParams,
    pub t_final: f64,
    pub n_steps: usize,
    pub initial_state: DensityMatrix,
}

impl SimConfig {
    pub fn new(
        drive: DriveParams,
        spectrum: SpectrumParams,
        t_final: f64,
        n_steps: usize,
        initial_state: DensityMatrix,
    ) -> Result<Self> {
        if !t_final.is_finite() || t_final < 0.0 {
            return Err(Error::InvalidParam(format!(
                "t_final must be finite and >= 0, got {t_final}"
            )));
        }
        if n_steps < 1 {
            return Err(Error::InvalidParam("n_steps must be >= 1".into()));
        }
        Ok(Self {
            drive,
            spectrum,
            t_final,
            n_steps,
            initial_state,
        })
    }

    /// Uniform time grid 0..=t_final with n_steps intervals.
    pub fn time_grid(&self) -> Vec<f64> {
        let h = self.t_final / self.n_steps as f64;
        (0..=self.n_steps).map(|i| i as f64 * h).collect()
    }
}
