//! Communication-complexity lower bounds from a capacity entropy `H`.
//!
//! Exact protocols: `Q_E >= H` and, with entanglement, `Q_E* >= H / 2`.
//! Bounded error `epsilon` costs a Fannes-type continuity penalty, available
//! in two forms (see [`FannesVariant`]), or can be traded for repetitions
//! with a majority vote (see [`optimized_repetition_bound`]).

use std::f64::consts::{E, LOG2_E};

use serde::Serialize;

use crate::{Error, Result};

/// Slack allowed on `entropy_bits <= n` for floating-point entropies.
const ENTROPY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FannesVariant {
    /// `4 sqrt(eps) n + log2 eta0(4 sqrt(eps))`, as the bound is usually stated.
    Paper,
    /// Textbook Fannes on the `n + 1` qubit states: `4 sqrt(eps) (n + 1) + eta0(4 sqrt(eps))`.
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Uniform,
    Optimized,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub entropy_bits: f64,
    pub n: usize,
    pub epsilon: f64,
    pub q_exact: f64,
    pub q_exact_ent: f64,
    pub q_eps_fannes: f64,
    pub q_eps_ent_fannes: f64,
    pub q_eps_repeated: f64,
    /// Repetition count achieving `q_eps_repeated` (1 when `epsilon == 0`).
    pub repetitions: usize,
    pub fannes_variant: FannesVariant,
    pub distribution_provenance: Provenance,
}

/// `-x log2 x` for `x <= 1/e`, `log2(e) / e` beyond.
pub fn eta0(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "eta0 needs x >= 0, got {x}"
        )));
    }
    Ok(if x == 0.0 {
        0.0
    } else if x <= 1.0 / E {
        -x * x.log2()
    } else {
        LOG2_E / E
    })
}

/// Entropy lost to an `epsilon`-error protocol. Never negative: a
/// non-positive penalty (always the case at `epsilon = 0`) is reported as 0.
pub fn fannes_penalty(n: usize, epsilon: f64, variant: FannesVariant) -> f64 {
    if epsilon <= 0.0 {
        return 0.0;
    }
    let t = 4.0 * epsilon.sqrt();
    let eta = eta0(t).expect("t is non-negative");
    let raw = match variant {
        FannesVariant::Paper => t * n as f64 + eta.log2(),
        FannesVariant::Conservative => t * (n + 1) as f64 + eta,
    };
    raw.max(0.0)
}

/// Hoeffding bound on the error of a `k`-fold majority vote, never above the
/// single-run error `epsilon` (majority voting with `epsilon < 1/2` does not hurt).
pub fn majority_vote_error(k: usize, epsilon: f64) -> f64 {
    let margin = 0.5 - epsilon;
    (-2.0 * k as f64 * margin * margin).exp().min(epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepetitionBound {
    pub bound: f64,
    pub k_star: usize,
}

fn check_inputs(entropy_bits: f64, n: usize, epsilon: f64) -> Result<()> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in [0, 1/2), got {epsilon}"
        )));
    }
    if !(entropy_bits >= -ENTROPY_TOL && entropy_bits <= n as f64 + ENTROPY_TOL) {
        return Err(Error::InvalidParameter(format!(
            "entropy {entropy_bits} outside [0, {n}]"
        )));
    }
    Ok(())
}

/// Best of `(H - penalty(n, eps'(k))) / k` over odd `k` up to
/// `10 ceil(log2(n + 1)) + 1`, ties going to the smaller `k`.
pub fn optimized_repetition_bound(
    entropy_bits: f64,
    n: usize,
    epsilon: f64,
    variant: FannesVariant,
) -> Result<RepetitionBound> {
    check_inputs(entropy_bits, n, epsilon)?;
    if epsilon == 0.0 {
        return Err(Error::InvalidParameter(
            "repetition needs epsilon > 0; use the exact bound".into(),
        ));
    }
    let k_max = 10 * ((n + 1) as f64).log2().ceil() as usize + 1;
    let mut best = RepetitionBound {
        bound: f64::NEG_INFINITY,
        k_star: 1,
    };
    for k in (1..=k_max).step_by(2) {
        let bound =
            (entropy_bits - fannes_penalty(n, majority_vote_error(k, epsilon), variant)) / k as f64;
        if bound > best.bound {
            best = RepetitionBound { bound, k_star: k };
        }
    }
    Ok(best)
}

/// All four lower bounds for one entropy value. Negative (vacuous) bounds are kept.
pub fn bound_report(
    entropy_bits: f64,
    n: usize,
    epsilon: f64,
    variant: FannesVariant,
    provenance: Provenance,
) -> Result<BoundReport> {
    check_inputs(entropy_bits, n, epsilon)?;
    let q_eps_fannes = entropy_bits - fannes_penalty(n, epsilon, variant);
    let repeated = if epsilon > 0.0 {
        optimized_repetition_bound(entropy_bits, n, epsilon, variant)?
    } else {
        RepetitionBound {
            bound: entropy_bits,
            k_star: 1,
        }
    };
    Ok(BoundReport {
        entropy_bits,
        n,
        epsilon,
        q_exact: entropy_bits,
        q_exact_ent: entropy_bits / 2.0,
        q_eps_fannes,
        q_eps_ent_fannes: q_eps_fannes / 2.0,
        q_eps_repeated: repeated.bound,
        repetitions: repeated.k_star,
        fannes_variant: variant,
        distribution_provenance: provenance,
    })
}
