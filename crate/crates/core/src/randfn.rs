//! Rényi-2 entropy of random functions.
//!
//! For a uniformly random sign matrix the off-diagonal row-overlap statistic
//! `T = sum_{i != j} (sum_k M_ik M_jk)^2` fixes `S2 = 4n - log2(N^3 + T)` with
//! `N = 2^n`, and `Pr[S2 < (1 - delta) n] <= exp(-(2^(delta n) - 1)^2 / 2)`.
//! [`tail_experiment`] estimates the left side by sampling.

use serde::Serialize;

use crate::boolfn::{make_family, sign_matrix, Family, SignMatrix};
use crate::par::{self, Execution};
use crate::rng;
use crate::{Error, Result};

/// Sum of squared inner products between distinct rows, from XOR popcounts
/// of bit-packed rows: `<r_i, r_j> = N - 2 popcount(r_i ^ r_j)`.
pub fn t_statistic(m: &SignMatrix) -> u128 {
    t_statistic_with(m, Execution::Sequential)
}

pub fn t_statistic_with(m: &SignMatrix, exec: Execution) -> u128 {
    let dim = m.dim();
    let (words, packed) = m.packed_rows();
    let per_row = par::map_indices(exec.for_work(dim * dim * words), dim, |i| {
        let ri = &packed[i * words..(i + 1) * words];
        let mut acc: u128 = 0;
        for j in i + 1..dim {
            let rj = &packed[j * words..(j + 1) * words];
            let differ: u32 = ri.iter().zip(rj).map(|(u, v)| (u ^ v).count_ones()).sum();
            let dot = dim as i64 - 2 * i64::from(differ);
            acc += (dot * dot) as u128;
        }
        acc
    });
    2 * per_row.into_iter().sum::<u128>()
}

/// `4n - log2(2^(3n) + T)`.
pub fn s2_from_t(n: usize, t: u128) -> f64 {
    let cube = 1u128 << (3 * n);
    (4 * n) as f64 - ((cube + t) as f64).log2()
}

/// `exp(-(2^(delta n) - 1)^2 / 2)`.
pub fn entropy_tail_bound(n: usize, delta: f64) -> f64 {
    let gap = (delta * n as f64).exp2() - 1.0;
    (-gap * gap / 2.0).exp()
}

/// Twice [`entropy_tail_bound`]: the form obtained by substituting
/// `a = N^3 (N^delta - 1)` into [`t_tail_bound`].
pub fn entropy_tail_bound_doubled(n: usize, delta: f64) -> f64 {
    2.0 * entropy_tail_bound(n, delta)
}

/// `Pr[T > a] < 2 exp(-a^2 / (2 N^6))`.
pub fn t_tail_bound(n: usize, a: f64) -> f64 {
    let n6 = ((6 * n) as f64).exp2();
    2.0 * (-a * a / (2.0 * n6)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailExperimentConfig {
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl TailExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.n == 0 || self.n > crate::boolfn::MAX_N {
            return Err(Error::SizeOutOfRange(self.n));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S2Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailExperimentResult {
    /// Fraction of trials with `S2 < (1 - delta) n`.
    pub empirical_freq: f64,
    pub hits: usize,
    pub analytic_bound: f64,
    pub analytic_bound_doubled: f64,
    pub s2_samples_summary: S2Summary,
    pub trials: usize,
}

pub fn tail_experiment(cfg: &TailExperimentConfig) -> Result<TailExperimentResult> {
    tail_experiment_with(cfg, Execution::default())
}

/// Trial `i` draws a random function from seed `derive_seed(cfg.seed, i)`;
/// the result is the same under any execution policy.
pub fn tail_experiment_with(
    cfg: &TailExperimentConfig,
    exec: Execution,
) -> Result<TailExperimentResult> {
    cfg.validate()?;
    let threshold = (1.0 - cfg.delta) * cfg.n as f64;
    let samples = par::map_indices(exec, cfg.trials, |i| {
        let seed = rng::derive_seed(cfg.seed, i as u64);
        let f = make_family(Family::Random, cfg.n, Some(seed)).expect("validated size");
        s2_from_t(cfg.n, t_statistic(&sign_matrix(&f)))
    });
    let hits = samples.iter().filter(|&&s| s < threshold).count();
    let summary = S2Summary {
        min: samples.iter().copied().fold(f64::INFINITY, f64::min),
        mean: samples.iter().sum::<f64>() / cfg.trials as f64,
        max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(TailExperimentResult {
        empirical_freq: hits as f64 / cfg.trials as f64,
        hits,
        analytic_bound: entropy_tail_bound(cfg.n, cfg.delta),
        analytic_bound_doubled: entropy_tail_bound_doubled(cfg.n, cfg.delta),
        s2_samples_summary: summary,
        trials: cfg.trials,
    })
}
