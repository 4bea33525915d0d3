//! Husimi Q-function of the TLS state and the phase-synchronization
//! measure S(phi) derived from it.
//!
//! Q(theta, phi) = <theta,phi| rho |theta,phi> / 2pi over spin coherent
//! states; S(phi) is the theta-integrated, offset-subtracted Q-function.
//! S > 0 marks phase locking at phi, S < 0 anti-phase locking, S = 0 no
//! phase preference.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::channel::DensityMatrix;
use crate::parallel::*;

/// Default angular resolution (1 degree spacing) used for map rendering.
pub const DEFAULT_N_THETA: usize = 181;
pub const DEFAULT_N_PHI: usize = 361;

/// Husimi Q-function at spherical angles (theta in [0, pi], phi in
/// [-pi, pi]). Nonnegative for every physical state.
pub fn husimi_q(rho: &DensityMatrix, theta: f64, phi: f64) -> f64 {
    let cos_half = (theta / 2.0).cos();
    let sin_half = (theta / 2.0).sin();
    let cross = (rho.rho_eg() * Complex64::new(0.0, phi).exp()).re;
    (rho.rho_ee() * cos_half * cos_half + rho.rho_gg() * sin_half * sin_half + cross * theta.sin())
        / (2.0 * PI)
}

/// Synchronization measure S(phi) = (Re rho_ge cos phi + Im rho_ge sin phi)/4.
///
/// Equals Int_0^pi sin(theta) Q(theta, phi) dtheta - 1/2pi; the quadrature
/// identity is exercised in the tests.
pub fn s_measure(rho: &DensityMatrix, phi: f64) -> f64 {
    0.25 * (rho.rho_ge().re * phi.cos() + rho.rho_ge().im * phi.sin())
}

/// Maximum of S(phi) over phi together with the locked phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncValue {
    /// max_phi S(phi) = |rho_ge| / 4, in [0, 1/8].
    pub s_of_phi: f64,
    /// The phase realizing the maximum, in [-pi, pi]; 0 by convention when
    /// the state carries no coherence.
    pub phi: f64,
    /// True when the coherence vanishes and the locked phase is undefined.
    pub degenerate: bool,
}

/// Computes max_phi S(phi) in closed form: with rho_ge = r e^{i chi},
/// S(phi) = (r/4) cos(phi - chi), so the maximum is r/4 at phi = chi.
pub fn max_s(rho: &DensityMatrix) -> SyncValue {
    let coherence = rho.rho_ge();
    let r = coherence.norm();
    if r == 0.0 {
        SyncValue {
            s_of_phi: 0.0,
            phi: 0.0,
            degenerate: true,
        }
    } else {
        SyncValue {
            s_of_phi: r / 4.0,
            phi: coherence.arg(),
            degenerate: false,
        }
    }
}

/// Q-function sampled on a regular (theta, phi) grid, theta-major.
#[derive(Debug, Clone)]
pub struct QGrid {
    thetas: Vec<f64>,
    phis: Vec<f64>,
    values: Vec<f64>,
}

impl QGrid {
    /// Evaluates Q on an n_theta x n_phi grid covering [0, pi] x [-pi, pi]
    /// inclusive. Rows (fixed theta) are evaluated independently.
    pub fn compute(rho: &DensityMatrix, n_theta: usize, n_phi: usize) -> Self {
        assert!(
            n_theta >= 2 && n_phi >= 2,
            "grid needs at least 2 points per axis"
        );
        let thetas: Vec<f64> = (0..n_theta)
            .map(|i| PI * i as f64 / (n_theta - 1) as f64)
            .collect();
        let phis: Vec<f64> = (0..n_phi)
            .map(|j| -PI + 2.0 * PI * j as f64 / (n_phi - 1) as f64)
            .collect();
        let rho = *rho;
        let rows: Vec<Vec<f64>> = thetas
            .par_iter()
            .map(|&theta| phis.iter().map(|&phi| husimi_q(&rho, theta, phi)).collect())
            .collect();
        let values = rows.into_iter().flatten().collect();
        Self {
            thetas,
            phis,
            values,
        }
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn value(&self, i_theta: usize, j_phi: usize) -> f64 {
        self.values[i_theta * self.phis.len() + j_phi]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Grid index of the largest value, as (i_theta, j_phi).
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0.0_f64);
        for (i, &v) in self.values.iter().enumerate() {
            if v > best.1 || i == 0 {
                best = (i, v);
            }
        }
        (best.0 / self.phis.len(), best.0 % self.phis.len())
    }

    /// Integral of Q over the sphere with measure sin(theta) dtheta dphi;
    /// equals 1 for a unit-trace state up to quadrature error.
    pub fn normalization(&self) -> f64 {
        let h_phi = self.phis[1] - self.phis[0];
        let row_integrals: Vec<f64> = (0..self.thetas.len())
            .map(|i| {
                let row = &self.values[i * self.phis.len()..(i + 1) * self.phis.len()];
                trapezoid_sum(row, h_phi)
            })
            .collect();
        let integrand: Vec<f64> = self
            .thetas
            .iter()
            .zip(&row_integrals)
            .map(|(&theta, &v)| theta.sin() * v)
            .collect();
        let h_theta = self.thetas[1] - self.thetas[0];
        simpson_sum(&integrand, h_theta)
    }
}

fn trapezoid_sum(values: &[f64], h: f64) -> f64 {
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}

/// Composite Simpson rule on a uniform grid; falls back to a 3/8 block at
/// the end when the interval count is odd, and to the trapezoid rule for a
/// single interval.
pub(crate) fn simpson_sum(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    assert!(n >= 2);
    let intervals = n - 1;
    if intervals == 1 {
        return trapezoid_sum(values, h);
    }
    let (simpson_part, tail) = if intervals.is_multiple_of(2) {
        (intervals, 0)
    } else {
        (intervals - 3, 3)
    };
    let mut total = 0.0;
    if simpson_part > 0 {
        let mut acc = values[0] + values[simpson_part];
        for (offset, &v) in values[1..simpson_part].iter().enumerate() {
            acc += if offset % 2 == 0 { 4.0 * v } else { 2.0 * v };
        }
        total += acc * h / 3.0;
    }
    if tail == 3 {
        let s = &values[n - 4..];
        total += 3.0 * h / 8.0 * (s[0] + 3.0 * s[1] + 3.0 * s[2] + s[3]);
    }
    total
}
