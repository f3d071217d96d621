// SPDX-License-Identifier: Apache-2.0

//! Spectral radius estimation for dense matrices.
//!
//! The estimate follows Gelfand's formula `ρ(M) = lim ‖M^k‖^(1/k)` with `k`
//! running over powers of two. `M^(2^j)` is formed by repeated squaring with
//! renormalisation after every step, so the exponent reaches `2^60` without
//! overflow and the transient factor `C^(1/k)` vanishes. A vector power
//! iteration with several restarts supplies an independent lower estimate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const MAX_SQUARINGS: usize = 64;
const SETTLE_RTOL: f64 = 1e-13;
// Sign cancellations can keep `‖M^k‖` flat for the first few powers.
const MIN_SQUARINGS: usize = 8;

/// Induced ∞-norm (maximum absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Entrywise absolute value `M̃ = [|m_ij|]`.
pub fn abs_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(f64::abs)
}

pub fn spectral_radius(m: &DMatrix<f64>) -> Result<f64> {
    assert!(m.is_square(), "spectral radius needs a square matrix");
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonConvergedEstimate { estimate: f64::NAN });
    }
    let norm = inf_norm(m);
    if m.nrows() == 0 || norm == 0.0 {
        return Ok(0.0);
    }
    let mut a = m / norm;
    let mut log_scale = norm.ln();
    let mut k = 1.0_f64;
    let mut prev = norm;
    for step in 0..MAX_SQUARINGS {
        a = &a * &a;
        let nrm = inf_norm(&a);
        if nrm == 0.0 {
            return Ok(0.0);
        }
        a /= nrm;
        log_scale = 2.0 * log_scale + nrm.ln();
        k *= 2.0;
        let estimate = (log_scale / k).exp();
        if step + 1 >= MIN_SQUARINGS && (estimate - prev).abs() <= SETTLE_RTOL * estimate.max(f64::MIN_POSITIVE) {
            return Ok(estimate);
        }
        prev = estimate;
    }
    Err(Error::NonConvergedEstimate { estimate: prev })
}

/// Growth rate of `‖M^k x‖` over the tail of `iters` steps, maximised over
/// deterministic restarts. Converges to `ρ(M)` from generic starting vectors.
pub fn power_iteration(m: &DMatrix<f64>, restarts: usize, iters: usize) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let burn_in = iters / 2;
    let mut best = 0.0_f64;
    let mut seed: u64 = 0x9e37_79b9_7f4a_7c15;
    for r in 0..restarts.max(1) {
        let mut x = DVector::from_fn(n, |i, _| {
            if r == 0 {
                1.0
            } else {
                seed = seed
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407 + i as u64);
                ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            }
        });
        let mut log_growth = 0.0;
        let mut counted = 0;
        for step in 0..iters {
            let nrm = x.amax();
            if nrm == 0.0 {
                break;
            }
            x /= nrm;
            let y = m * &x;
            let growth = y.amax();
            if step >= burn_in {
                if growth == 0.0 {
                    log_growth = f64::NEG_INFINITY;
                    counted += 1;
                    break;
                }
                log_growth += growth.ln();
                counted += 1;
            }
            x = y;
        }
        if counted > 0 {
            best = best.max((log_growth / counted as f64).exp());
        }
    }
    best
}
