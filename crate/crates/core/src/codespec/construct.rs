//! Frozen-set construction by Gaussian-approximation density evolution.
//!
//! The φ-function uses the two-piece fit of Chung et al.:
//! `φ(x) = exp(-0.4527·x^0.86 + 0.0218)` for `x < 10` and
//! `φ(x) = sqrt(π/x)·exp(-x/4)·(1 - 10/(7x))` above. The check-node update is
//! evaluated in the log domain so very reliable subchannels do not underflow.

use std::f64::consts::PI;

fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < 10.0 {
        -0.4527 * x.powf(0.86) + 0.0218
    } else {
        0.5 * (PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
    }
}

/// Solves `ln φ(x) = target` for `x ≥ 0` by bisection.
fn inv_ln_phi(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean LLR of the check-node combination of two subchannels with mean `z`.
fn check_mean(z: f64) -> f64 {
    let lp = ln_phi(z);
    let p = lp.exp();
    // 1 - (1 - φ)^2 = φ·(2 - φ)
    inv_ln_phi(lp + (2.0 - p).ln())
}

/// Mean LLR of every input phase for BPSK/AWGN at `ebn0_db` and code rate `rate`.
/// Larger is more reliable.
pub fn ga_reliabilities(m: usize, ebn0_db: f64, rate: f64) -> Vec<f64> {
    let n = 1usize << m;
    let rate = if rate > 0.0 { rate } else { 1.0 / n as f64 };
    let sigma2 = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
    let mut means = vec![2.0 / sigma2];
    // the channel-side combining step is selected by the most significant
    // bit, so each pass appends one lower bit
    for _ in 0..m {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &z in &means {
            next.push(check_mean(z));
            next.push(2.0 * z);
        }
        means = next;
    }
    means
}

/// The `2^m - k` least reliable phases at the given design Eb/N0, ascending.
pub fn construct_frozen_set(m: usize, k: usize, design_ebn0_db: f64) -> Vec<usize> {
    let n = 1usize << m;
    let k = k.min(n);
    let rel = ga_reliabilities(m, design_ebn0_db, k as f64 / n as f64);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| rel[a].total_cmp(&rel[b]).then(b.cmp(&a)));
    let mut frozen = order[..n - k].to_vec();
    frozen.sort_unstable();
    frozen
}
