//! Necessary conditions for Dicke-state families as approximate MBQC resources.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Limit of the linear geometric entanglement of `|S_{n,k}>` as `n → ∞`: `1 - k^k / (e^k k!)`.
pub fn dicke_family_asymptotic(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("k must be at least 1"));
    }
    let kf = k as f64;
    let ratio = if k > 20 {
        let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
        (kf * kf.ln() - kf - ln_fact).exp()
    } else {
        let fact: f64 = (2..=k).map(|i| i as f64).product();
        kf.powi(k as i32) / (kf.exp() * fact)
    };
    Ok(1.0 - ratio)
}

/// `1 - 4η^{1/3} + 3.4η^{2/3}`.
pub fn universality_rhs(eta: f64) -> f64 {
    let x = eta.cbrt();
    1.0 - 4.0 * x + 3.4 * x * x
}

/// Whether a family with linear entanglement `eg_linear` passes the necessary condition at `eta`.
pub fn universality_condition(eg_linear: f64, eta: f64) -> bool {
    eg_linear > universality_rhs(eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MbqcReport {
    pub k: usize,
    pub eg_linear_asymptotic: f64,
    /// Smallest `η` at which the condition stops being violated.
    pub eta_threshold: f64,
    /// The rough estimate `0.001 k^{-3/2}`.
    pub reference_threshold: f64,
    /// True: every `η < eta_threshold` rules the family out.
    pub ruled_out: bool,
}

/// Upper end of the bracket in `x = η^{1/3}`: the right-hand side has its minimum at `x = 4/6.8`.
const X_MIN: f64 = 4.0 / 6.8;

pub fn eta_threshold(k: usize) -> Result<MbqcReport> {
    let e = dicke_family_asymptotic(k)?;
    let g = |x: f64| 1.0 - 4.0 * x + 3.4 * x * x - e;
    // g(0) = 1 - e > 0 and g decreases on [0, X_MIN]; bisect for the first sign change.
    let (mut lo, mut hi) = (0.0f64, X_MIN);
    if g(hi) > 0.0 {
        return Err(Error::NonConvergence(format!("no threshold root for k = {k}")));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let eta = x * x * x;
    Ok(MbqcReport {
        k,
        eg_linear_asymptotic: e,
        eta_threshold: eta,
        reference_threshold: 0.001 * (k as f64).powf(-1.5),
        ruled_out: true,
    })
}
