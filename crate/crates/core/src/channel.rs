//! Exact reduced dynamics of the driven TLS: a single-qubit channel
//! parametrized by the survival amplitude q(t).
//!
//! In the dressed basis the environment acts as amplitude damping with
//! damping amplitude q(t); expressed in the lab basis {|g>, |e>} the map
//! becomes the coefficient form implemented here. Index convention:
//! index 0 <-> |g>, index 1 <-> |e>, i.e. rho_01 = <g|rho|e>.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::amplitude::q_closed_form;
use crate::error::{Error, Result};
use crate::params::{DriveParams, SpectrumParams};

/// Tolerance on positivity violations of caller-supplied states. Inputs
/// worse than this are rejected rather than projected back to the physical
/// set, so that caller bugs surface instead of being silently absorbed.
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Two-by-two density matrix of the TLS in the {|g>, |e>} basis.
///
/// Stores the ground population and the coherence <g|rho|e>; the trace is
/// fixed to one by construction and Hermiticity is implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho_gg: f64,
    rho_ge: Complex64,
}

impl DensityMatrix {
    pub fn new(rho_gg: f64, rho_ge: Complex64) -> Result<Self> {
        if !rho_gg.is_finite() || !rho_ge.re.is_finite() || !rho_ge.im.is_finite() {
            return Err(Error::InvalidState(
                "density matrix entries must be finite".into(),
            ));
        }
        if !(-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&rho_gg) {
            return Err(Error::InvalidState(format!(
                "population rho_gg = {rho_gg} outside [0, 1]"
            )));
        }
        let violation = rho_ge.norm_sqr() - rho_gg * (1.0 - rho_gg);
        if violation > POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "coherence too large for populations (violation {violation:.3e})"
            )));
        }
        Ok(Self { rho_gg, rho_ge })
    }

    pub(crate) fn new_unchecked(rho_gg: f64, rho_ge: Complex64) -> Self {
        Self { rho_gg, rho_ge }
    }

    /// Normalized pure state amp_g |g> + amp_e |e>.
    pub fn pure(amp_g: Complex64, amp_e: Complex64) -> Result<Self> {
        let norm_sq = amp_g.norm_sqr() + amp_e.norm_sqr();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::InvalidState(
                "pure-state amplitudes must not be both zero".into(),
            ));
        }
        Ok(Self {
            rho_gg: amp_g.norm_sqr() / norm_sq,
            rho_ge: amp_g * amp_e.conj() / norm_sq,
        })
    }

    /// The superposition (|g> + |e>)/sqrt(2), the default initial state.
    pub fn plus() -> Self {
        Self {
            rho_gg: 0.5,
            rho_ge: Complex64::new(0.5, 0.0),
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho_gg: 0.5,
            rho_ge: Complex64::new(0.0, 0.0),
        }
    }

    pub fn rho_gg(&self) -> f64 {
        self.rho_gg
    }

    pub fn rho_ee(&self) -> f64 {
        1.0 - self.rho_gg
    }

    /// <g|rho|e>
    pub fn rho_ge(&self) -> Complex64 {
        self.rho_ge
    }

    /// <e|rho|g>
    pub fn rho_eg(&self) -> Complex64 {
        self.rho_ge.conj()
    }

    /// Signed distance of the coherence from the positivity boundary;
    /// nonpositive for physical states.
    pub fn positivity_violation(&self) -> f64 {
        self.rho_ge.norm_sqr() - self.rho_gg * (1.0 - self.rho_gg)
    }
}

/// The channel frozen at one instant: the linear action of the environment
/// on the initial state, determined by the mixing angle and q(t).
#[derive(Debug, Clone, Copy)]
pub struct ChannelAt {
    time: f64,
    eta: f64,
    q: Complex64,
}

impl ChannelAt {
    /// Channel at time t using the closed-form amplitude.
    pub fn new(drive: &DriveParams, spectrum: &SpectrumParams, t: f64) -> Self {
        Self {
            time: t,
            eta: drive.mixing_angle(),
            q: q_closed_form(drive, spectrum, t),
        }
    }

    /// Channel built from an externally computed amplitude, e.g. one of the
    /// quadrature solvers or the memory-mode oracle.
    pub fn with_amplitude(eta: f64, q: Complex64, time: f64) -> Self {
        Self { time, eta, q }
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn amplitude(&self) -> Complex64 {
        self.q
    }

    /// Population-transfer scalar A = (1/4) sin^2(eta) * 2 Re q.
    pub fn coeff_a(&self) -> f64 {
        0.5 * self.eta.sin().powi(2) * self.q.re
    }

    /// Coherence-transfer scalar
    /// B = (1/2) sin(eta) [cos^2(eta/2) q* - sin^2(eta/2) q].
    pub fn coeff_b(&self) -> Complex64 {
        let ch2 = (self.eta / 2.0).cos().powi(2);
        let sh2 = (self.eta / 2.0).sin().powi(2);
        0.5 * self.eta.sin() * (ch2 * self.q.conj() - sh2 * self.q)
    }

    /// Complex-linear action on (rho_00, rho_01, rho_10, rho_11); row r is
    /// the output component, column c the input component.
    pub fn matrix(&self) -> [[Complex64; 4]; 4] {
        let q = self.q;
        let n2 = q.norm_sqr();
        let sin_eta = self.eta.sin();
        let cos_eta = self.eta.cos();
        let ch2 = (self.eta / 2.0).cos().powi(2);
        let sh2 = (self.eta / 2.0).sin().powi(2);
        let a = Complex64::new(self.coeff_a(), 0.0);
        let b = self.coeff_b();
        // (1/4) sin(2 eta) = sin(eta) cos(eta) / 2
        let q14 = Complex64::new(0.25 * (2.0 * self.eta).sin() * n2, 0.0);
        let half_sin = Complex64::new(0.5 * sin_eta, 0.0);
        let half_sin2_n2 = Complex64::new(0.5 * sin_eta * sin_eta * n2, 0.0);

        let row0 = [
            Complex64::new(ch2 - cos_eta * sh2 * n2, 0.0) + a,
            -q14 + b,
            -q14 + b.conj(),
            Complex64::new(ch2 - cos_eta * ch2 * n2, 0.0) - a,
        ];
        let row1 = [
            -half_sin + Complex64::new(sin_eta * sh2 * n2, 0.0) + b,
            half_sin2_n2 + ch2 * ch2 * q.conj() + sh2 * sh2 * q,
            half_sin2_n2 - a,
            -half_sin + Complex64::new(sin_eta * ch2 * n2, 0.0) - b,
        ];
        // Hermiticity: the rho_10 row is the conjugate of the rho_01 row
        // with the coherence columns swapped.
        let row2 = [
            row1[0].conj(),
            row1[2].conj(),
            row1[1].conj(),
            row1[3].conj(),
        ];
        // trace preservation: rho_11 = Tr(rho) - rho_00
        let one = Complex64::new(1.0, 0.0);
        let row3 = [one - row0[0], -row0[1], -row0[2], one - row0[3]];
        [row0, row1, row2, row3]
    }

    /// Applies the channel to an initial state.
    pub fn apply(&self, rho0: &DensityMatrix) -> DensityMatrix {
        let m = self.matrix();
        let v = [
            Complex64::new(rho0.rho_gg(), 0.0),
            rho0.rho_ge(),
            rho0.rho_eg(),
            Complex64::new(rho0.rho_ee(), 0.0),
        ];
        let dot =
            |row: &[Complex64; 4]| row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        // the population is real for Hermitian inputs; the residual
        // imaginary part is rounding noise
        let rho_gg = dot(&m[0]).re;
        let rho_ge = dot(&m[1]);
        DensityMatrix::new_unchecked(rho_gg, rho_ge)
    }

    /// Minimum eigenvalue of the Choi matrix of the channel; nonnegative
    /// (up to numerical noise) iff the map is completely positive.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        let m = self.matrix();
        let idx = |r: usize, c: usize| 2 * r + c;
        // C[(i,k),(j,l)] = Phi(E_ij)[k,l] with E_ij = |i><j|
        let choi = Matrix4::from_fn(|row, col| {
            let (i, k) = (row / 2, row % 2);
            let (j, l) = (col / 2, col % 2);
            m[idx(k, l)][idx(i, j)]
        });
        let hermitian = (choi + choi.adjoint()) * Complex64::new(0.5, 0.0);
        let asym = (choi - hermitian).norm();
        debug_assert!(asym < 1e-12, "Choi matrix not Hermitian: asymmetry {asym}");
        let eig = hermitian.symmetric_eigen();
        eig.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evolves an initial state to time t with the closed-form amplitude.
pub fn evolve(
    rho0: &DensityMatrix,
    drive: &DriveParams,
    spectrum: &SpectrumParams,
    t: f64,
) -> Result<DensityMatrix> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidGrid(format!(
            "time must be finite and >= 0, got {t}"
        )));
    }
    Ok(ChannelAt::new(drive, spectrum, t).apply(rho0))
}

/// Evolves the initial state over a whole time grid. Every sample is the
/// channel from t = 0 applied to rho0 (the map is not a semigroup step).
pub fn trajectory(
    rho0: &DensityMatrix,
    drive: &DriveParams,
    spectrum: &SpectrumParams,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    for w in t_grid.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidGrid("time grid must be sorted".into()));
        }
    }
    t_grid
        .iter()
        .map(|&t| evolve(rho0, drive, spectrum, t))
        .collect()
}

/// Builds the Choi matrix of the channel at time t and reports its minimum
/// eigenvalue together with the complete-positivity verdict
/// (min eigenvalue >= -1e-9).
pub fn choi_check(drive: &DriveParams, spectrum: &SpectrumParams, t: f64) -> (f64, bool) {
    let min_eig = ChannelAt::new(drive, spectrum, t).choi_min_eigenvalue();
    (min_eig, min_eig >= -1e-9)
}
