//! Shared helpers for integration and acceptance tests.
//!
//! The constrained least-squares oracle here solves the full KKT system by
//! Gaussian elimination, deliberately sharing no code with the library's
//! closed-form estimate.

// Not every test binary uses every helper.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use wheelspeed::cls::GateConfig;
use wheelspeed::pipeline::SpeedFilter;
use wheelspeed::speed::SpeedSample;

/// Solve `min Σ_k ||Y(k) - α||²  s.t.  Σα = 2π` through its KKT system:
///
/// ```text
/// [ 2N·I  1 ] [α]   [ 2·ΣY ]
/// [ 1ᵀ    0 ] [λ] = [ 2π   ]
/// ```
pub fn kkt_constrained_ls(rows: &[Vec<f64>]) -> Vec<f64> {
    let l = rows[0].len();
    let n = rows.len() as f64;
    let dim = l + 1;
    let mut a = vec![vec![0.0f64; dim]; dim];
    let mut b = vec![0.0f64; dim];
    for i in 0..l {
        a[i][i] = 2.0 * n;
        a[i][l] = 1.0;
        a[l][i] = 1.0;
        b[i] = 2.0 * rows.iter().map(|r| r[i]).sum::<f64>();
    }
    b[l] = TAU;
    let x = solve_dense(&mut a, &mut b);
    x[..l].to_vec()
}

/// Gaussian elimination with partial pivoting; consumes its inputs.
pub fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-300, "singular KKT system");
        let pivot_row = a[col][col..n].to_vec();
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[0];
            if factor == 0.0 {
                continue;
            }
            for (x, p) in a[row][col..n].iter_mut().zip(&pivot_row) {
                *x -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let acc: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - acc) / a[row][row];
    }
    x
}

/// Closed-form constant-speed pulse train, independent of the simulator's
/// bisection path: a pulse at t=0 followed by per-sector gaps `α_i/ω`.
///
/// Because the t=0 pulse initializes ingestion, sector labels then line up
/// with the physical sector indices (no cyclic rotation).
pub fn constant_speed_train(
    sector_angles: &[f64],
    omega: f64,
    revolutions: usize,
    jitter_sigma: f64,
    seed: u64,
) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    let mut out = vec![0.0];
    for _ in 0..revolutions {
        for a in sector_angles {
            t += a / omega;
            out.push(t);
        }
    }
    if jitter_sigma > 0.0 {
        for v in out.iter_mut().skip(1) {
            // Box-Muller keeps this helper free of distribution crates.
            let u1: f64 = rng.random_range(1e-12..1.0);
            let u2: f64 = rng.random_range(0.0..1.0);
            let g = (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos();
            *v += jitter_sigma * g;
        }
        for i in 1..out.len() {
            if out[i] <= out[i - 1] {
                out[i] = out[i - 1] + 1e-9;
            }
        }
    }
    out
}

/// Run a fresh filter over a pulse train, returning samples and the filter.
pub fn run_filter(
    timestamps: &[f64],
    sector_count: usize,
    window_revolutions: u32,
    gate: GateConfig,
) -> (Vec<SpeedSample>, SpeedFilter) {
    let mut filter = SpeedFilter::new(sector_count, window_revolutions, gate)
        .expect("valid filter parameters");
    let samples = filter.process_all(timestamps).expect("valid pulse train");
    (samples, filter)
}

/// A gate that never trips, for tests exercising the estimator alone.
pub fn open_gate() -> GateConfig {
    GateConfig {
        enable_threshold_kmh: 1e-9,
        wheel_radius_m: 0.334,
    }
}

/// Max absolute difference between an estimate and truth, with the estimate
/// labels cyclically shifted by `rotation` against the physical sectors.
pub fn max_abs_error_rotated(estimate: &[f64], truth: &[f64], rotation: usize) -> f64 {
    let l = truth.len();
    (0..l)
        .map(|i| (estimate[i] - truth[(i + rotation) % l]).abs())
        .fold(0.0, f64::max)
}

/// Draw a random positive observation row of length `l` near a base value.
pub fn random_row<R: Rng + ?Sized>(rng: &mut R, l: usize, base: f64, spread: f64) -> Vec<f64> {
    (0..l)
        .map(|_| base + rng.random_range(-spread..spread))
        .collect()
}
