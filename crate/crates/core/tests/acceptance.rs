//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured margin (visible with `cargo test --test acceptance
//! -- --nocapture`). Tolerances are pinned in the asserts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use qsync_core::output::write_sweep_csv;
use qsync_core::parallel::*;
use qsync_core::{
    choi_check, closed_form_series, evolve, max_s, pseudomode_trajectory, q_closed_form,
    q_volterra, run_sweep, s_measure, tongue_center, Axis, CouplingSweepMode, DensityMatrix,
    DriveParams, Observable, SpectrumParams, SweepGrid, SweepParam, SweepSpec,
};

fn random_state(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let gg: f64 = rng.gen_range(0.0..1.0);
    let r = (gg * (1.0 - gg)).sqrt() * rng.gen_range(0.0..1.0);
    let chi = rng.gen_range(-PI..PI);
    DensityMatrix::new(gg, Complex64::from_polar(r, chi)).unwrap()
}

fn random_params(rng: &mut ChaCha8Rng) -> (DriveParams, SpectrumParams) {
    let drive = DriveParams::new(rng.gen_range(0.0..=10.0), rng.gen_range(0.0..=10.0)).unwrap();
    let spectrum =
        SpectrumParams::new(1.0, rng.gen_range(0.01..=10.0), rng.gen_range(-10.0..=10.0)).unwrap();
    (drive, spectrum)
}

fn time_grid(t_final: f64, dt: f64) -> Vec<f64> {
    let n = (t_final / dt).round() as usize;
    (0..=n).map(|i| i as f64 * t_final / n as f64).collect()
}

/// The synchronization-tongue plane: max S over (delta_spec, gamma0) at
/// fixed lambda = 0.1 (absolute coupling-sweep mode) and t = 100.
fn tongue_sweep(omega: f64, delta_drive: f64) -> SweepGrid {
    let spec = SweepSpec {
        x: Axis {
            param: SweepParam::DeltaSpec,
            min: -6.0,
            max: 2.0,
            n: 161,
        },
        y: Axis {
            param: SweepParam::Gamma0,
            min: 0.1,
            max: 2.0,
            n: 96,
        },
        drive: DriveParams::new(omega, delta_drive).unwrap(),
        spectrum: SpectrumParams::new(1.0, 0.1, 0.0).unwrap(),
        t_eval: 100.0,
        initial_state: DensityMatrix::plus(),
        observable: Observable::MaxS,
        coupling_mode: CouplingSweepMode::Absolute,
    };
    run_sweep(&spec, 0).unwrap()
}

#[test]
fn criterion_01_identity_channel() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let rho0 = random_state(&mut rng);
        let (drive, spectrum) = random_params(&mut rng);
        let rho = evolve(&rho0, &drive, &spectrum, 0.0).unwrap();
        worst = worst
            .max((rho.rho_gg() - rho0.rho_gg()).abs())
            .max((rho.rho_ge() - rho0.rho_ge()).norm());
        assert!((rho.rho_gg() - rho0.rho_gg()).abs() <= 1e-12);
        assert!((rho.rho_ge() - rho0.rho_ge()).norm() <= 1e-12);
    }
    println!("criterion 1: PASS - evolve at t=0 is the identity (worst deviation {worst:.2e})");
}

#[test]
fn criterion_02_oracle_triangle() {
    let results: Vec<(f64, f64)> = (0..25u64)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|set| {
            let mut rng = ChaCha8Rng::seed_from_u64(200 + set);
            let (drive, spectrum) = random_params(&mut rng);

            let grid = time_grid(100.0, 0.1);
            let states = pseudomode_trajectory(&drive, &spectrum, &grid).unwrap();
            let mut err_pm = 0.0_f64;
            for (state, &t) in states.iter().zip(&grid) {
                err_pm = err_pm.max((state.c_excited - q_closed_form(&drive, &spectrum, t)).norm());
            }

            let volterra = q_volterra(&drive, &spectrum, 100.0, 1e-4).unwrap();
            let closed = closed_form_series(&drive, &spectrum, volterra.times()).unwrap();
            let err_vol = volterra.max_abs_diff(&closed);
            (err_pm, err_vol)
        })
        .collect();
    let worst_pm = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let worst_vol = results.iter().map(|r| r.1).fold(0.0, f64::max);
    assert!(worst_pm <= 1e-7, "memory-mode mismatch {worst_pm:.3e}");
    assert!(worst_vol <= 1e-6, "quadrature mismatch {worst_vol:.3e}");
    println!(
        "criterion 2: PASS - oracle triangle on [0,100], 25 random sets \
         (|q-c_E| <= {worst_pm:.2e}, |q-volterra| <= {worst_vol:.2e})"
    );
}

#[test]
fn criterion_03_markovian_decay() {
    let drive = DriveParams::new(0.0, 0.0).unwrap();
    let spectrum = SpectrumParams::new(1.0, 100.0, 0.0).unwrap();
    let mut sup = 0.0_f64;
    for &t in &time_grid(5.0, 0.01) {
        let q = q_closed_form(&drive, &spectrum, t);
        sup = sup.max((q.norm() - (-t / 2.0).exp()).abs());
    }
    assert!(sup <= 0.02, "sup deviation {sup}");
    println!("criterion 3: PASS - Markovian limit |q| ~ e^(-t/2) (sup deviation {sup:.4})");
}

#[test]
fn criterion_04_markovian_antiphase_anchor() {
    let spectrum = SpectrumParams::new(1.0, 10.0, 0.0).unwrap();
    let plus = DensityMatrix::plus();

    let driven = DriveParams::new(1.0, 0.0).unwrap();
    let s_driven = s_measure(&evolve(&plus, &driven, &spectrum, 100.0).unwrap(), 0.0);
    assert!((s_driven + 0.125).abs() <= 0.005, "S(0) = {s_driven}");

    let undriven = DriveParams::new(0.0, 0.0).unwrap();
    let s_undriven = s_measure(&evolve(&plus, &undriven, &spectrum, 100.0).unwrap(), 0.0);
    assert!(s_undriven.abs() <= 1e-3, "S(0) = {s_undriven}");

    println!(
        "criterion 4: PASS - driven Markovian TLS anti-phase locks \
         (S(0) = {s_driven:.4}), undriven unlocks (|S(0)| = {s_undriven:.1e})"
    );
}

#[test]
fn criterion_05_driving_enhanced_locking() {
    let spectrum = SpectrumParams::new(1.0, 0.1, 0.0).unwrap();
    let plus = DensityMatrix::plus();
    let grid: Vec<f64> = time_grid(100.0, 0.05)
        .into_iter()
        .filter(|&t| t >= 20.0)
        .collect();
    let mut mins = Vec::new();
    for &omega in &[0.0, 0.5, 1.0, 2.0] {
        let drive = DriveParams::new(omega, 0.0).unwrap();
        let min = grid
            .iter()
            .map(|&t| s_measure(&evolve(&plus, &drive, &spectrum, t).unwrap(), 0.0))
            .fold(f64::INFINITY, f64::min);
        mins.push(min);
    }
    for pair in mins.windows(2) {
        assert!(pair[1] > pair[0], "mins not strictly increasing: {mins:?}");
    }
    assert!(mins[2] > 0.02, "min S(0,t) at Omega=1 is {}", mins[2]);
    println!(
        "criterion 5: PASS - min S(0,t) on [20,100] grows with the drive: \
         {:.4}, {:.4}, {:.4}, {:.4}",
        mins[0], mins[1], mins[2], mins[3]
    );
}

#[test]
fn criterion_06_tongue_center() {
    let cases = [(0.5, 0.0), (1.0, 0.0), (1.0, 2.0)];
    let mut report = Vec::new();
    for &(omega, delta_drive) in &cases {
        let grid = tongue_sweep(omega, delta_drive);
        let cell = grid.spec.x.cell();
        let predicted = delta_drive - (delta_drive * delta_drive + 4.0 * omega * omega).sqrt();
        let center = tongue_center(&grid).unwrap();
        assert!(
            (center - predicted).abs() <= cell,
            "Omega={omega} Delta={delta_drive}: center {center} vs {predicted} (cell {cell})"
        );
        report.push(format!(
            "Omega={omega},Delta={delta_drive}: {center:.3} vs {predicted:.3}"
        ));
    }
    println!(
        "criterion 6: PASS - tongue centers within one cell ({})",
        report.join("; ")
    );
}

#[test]
fn criterion_07_hollowed_tongue() {
    let grid = tongue_sweep(1.0, 0.0);
    let nx = grid.x_values.len();
    let mut eligible = 0;
    let mut hollowed = 0;
    for (iy, &gamma) in grid.y_values.iter().enumerate() {
        if !(0.3..=2.0).contains(&gamma) {
            continue;
        }
        eligible += 1;
        let row = grid.row(iy);
        let has_crossing = (1..nx - 1).any(|i| {
            row[i] < 0.01
                && row[..i].iter().any(|&v| v > 0.01)
                && row[i + 1..].iter().any(|&v| v > 0.01)
        });
        if has_crossing {
            hollowed += 1;
        }
    }
    let fraction = hollowed as f64 / eligible as f64;
    assert!(
        fraction >= 0.8,
        "only {hollowed}/{eligible} slices show a flanked near-zero crossing"
    );
    println!(
        "criterion 7: PASS - hollowed tongue: {hollowed}/{eligible} slices \
         ({:.0}%) have an interior zero flanked by locking",
        100.0 * fraction
    );
}

#[test]
fn criterion_08_complete_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(800);
    let times: Vec<f64> = (0..50)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / 49.0))
        .collect();
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let (drive, spectrum) = random_params(&mut rng);
        for &t in &times {
            let (min_eig, is_cp) = choi_check(&drive, &spectrum, t);
            assert!(is_cp, "not CP at t={t}: min eigenvalue {min_eig}");
            worst = worst.min(min_eig);
        }
    }
    println!(
        "criterion 8: PASS - Choi matrix positive at 50 log-spaced times x 20 \
         parameter sets (most negative eigenvalue {worst:.2e})"
    );
}

#[test]
fn criterion_09_sweep_determinism() {
    let spec = SweepSpec {
        x: Axis {
            param: SweepParam::DeltaSpec,
            min: -6.0,
            max: 2.0,
            n: 161,
        },
        y: Axis {
            param: SweepParam::Gamma0,
            min: 0.1,
            max: 2.0,
            n: 96,
        },
        drive: DriveParams::new(1.0, 0.0).unwrap(),
        spectrum: SpectrumParams::new(1.0, 0.1, 0.0).unwrap(),
        t_eval: 100.0,
        initial_state: DensityMatrix::plus(),
        observable: Observable::MaxS,
        coupling_mode: CouplingSweepMode::Absolute,
    };
    let mut csv_one = Vec::new();
    write_sweep_csv(&mut csv_one, &run_sweep(&spec, 1).unwrap()).unwrap();
    let mut csv_eight = Vec::new();
    write_sweep_csv(&mut csv_eight, &run_sweep(&spec, 8).unwrap()).unwrap();
    assert_eq!(csv_one, csv_eight, "worker count changed the CSV bytes");
    println!(
        "criterion 9: PASS - 1-worker and 8-worker sweeps emit byte-identical CSV \
         ({} bytes)",
        csv_one.len()
    );
}

#[test]
fn criterion_10_max_s_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let rho = random_state(&mut rng);
        // dense scan over 10^4 phases; the peak of the best sample and its
        // cyclic neighbors is refined parabolically
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|k| s_measure(&rho, -PI + 2.0 * PI * k as f64 / n as f64))
            .collect();
        let k_best = samples
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap();
        let (f0, f_prev, f_next) = (
            samples[k_best],
            samples[(k_best + n - 1) % n],
            samples[(k_best + 1) % n],
        );
        let denom = 2.0 * f0 - f_prev - f_next;
        let scanned = if denom <= 0.0 {
            f0
        } else {
            f0 + (f_next - f_prev) * (f_next - f_prev) / (8.0 * denom)
        };
        let analytic = rho.rho_ge().norm() / 4.0;
        worst = worst.max((scanned - analytic).abs());
        assert!((scanned - analytic).abs() <= 1e-9);
        assert_eq!(max_s(&rho).s_of_phi, analytic);
    }
    println!(
        "criterion 10: PASS - scanned max of S matches |rho_ge|/4 \
         (worst deviation {worst:.2e})"
    );
}
