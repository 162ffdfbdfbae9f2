//! Ascent of the capacity entropy over the pair of input simplices.
//!
//! The objective is not known to be concave, so this is a best-effort search:
//! multiplicative-weights steps along a finite-difference gradient, with
//! backtracking, from the uniform start plus Dirichlet(1) restarts. Every
//! returned pair `(a, b)` is feasible, so its entropy is a valid lower bound
//! whether or not it is the true maximum.

use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use crate::boolfn::SignMatrix;
use crate::par::{self, Execution};
use crate::rng;
use crate::spectral::{capacity_entropy_with, SimplexVector};
use crate::{Error, Result};

/// Gradients are only taken at points with every weight at least this large.
pub const INTERIOR_FLOOR: f64 = 1e-9;
/// Iterates are floored here after each step, then renormalized.
const WEIGHT_FLOOR: f64 = 1e-12;
const MIN_STEP: f64 = 1e-12;
/// Entropies closer than this count as a tie between starts.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    pub step_init: f64,
    /// Stop once an accepted step gains less than this many bits.
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub fd_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 500,
            step_init: 0.1,
            tol: 1e-7,
            restarts: 4,
            seed: 0,
            fd_step: 1e-5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be positive".into()));
        }
        positive("step_init", self.step_init)?;
        positive("tol", self.tol)?;
        positive("fd_step", self.fd_step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerResult {
    pub a: SimplexVector,
    pub b: SimplexVector,
    pub entropy_bits: f64,
    pub iterations_used: usize,
    /// 0 is the uniform start, `k >= 1` the `k`-th Dirichlet restart.
    pub start_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyGradient {
    pub grad_a: Vec<f64>,
    pub grad_b: Vec<f64>,
}

/// Point on the line through `w` that moves weight `i` by `t` and rescales
/// the rest to keep unit mass.
pub fn simplex_shift(w: &[f64], i: usize, t: f64) -> Vec<f64> {
    let rest = 1.0 - w[i];
    let scale = if rest > 0.0 { (rest - t) / rest } else { 1.0 };
    w.iter()
        .enumerate()
        .map(|(j, &v)| if j == i { v + t } else { v * scale })
        .collect()
}

/// Largest step keeping both `w_i +- h` inside the simplex.
pub fn fd_step_for(w: f64, fd_step: f64) -> f64 {
    fd_step.min(w / 2.0).min((1.0 - w) / 2.0)
}

fn check_interior(w: &SimplexVector) -> Result<()> {
    match w.weights().iter().position(|&v| v < INTERIOR_FLOOR) {
        Some(index) => Err(Error::BoundaryPoint {
            index,
            value: w.weights()[index],
        }),
        None => Ok(()),
    }
}

fn entropy(m: &SignMatrix, a: &[f64], b: &[f64], exec: Execution) -> Result<f64> {
    let a = SimplexVector::normalized(a.to_vec())?;
    let b = SimplexVector::normalized(b.to_vec())?;
    Ok(capacity_entropy_with(m, &a, &b, exec)?.entropy_bits)
}

fn center(mut g: Vec<f64>) -> Vec<f64> {
    let mean = g.iter().sum::<f64>() / g.len() as f64;
    g.iter_mut().for_each(|v| *v -= mean);
    g
}

/// Central differences of the capacity entropy along the simplex lines of
/// [`simplex_shift`], centered so each gradient sums to zero.
pub fn entropy_gradient(
    m: &SignMatrix,
    a: &SimplexVector,
    b: &SimplexVector,
    fd_step: f64,
) -> Result<EntropyGradient> {
    check_interior(a)?;
    check_interior(b)?;
    if a.len() != m.dim() || b.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: if a.len() != m.dim() { a.len() } else { b.len() },
        });
    }
    let exec = Execution::Sequential;
    let (aw, bw) = (a.weights(), b.weights());
    let partial = |w: &[f64], i: usize, on_a: bool| -> Result<f64> {
        let h = fd_step_for(w[i], fd_step);
        if h <= 0.0 {
            return Ok(0.0);
        }
        let plus = simplex_shift(w, i, h);
        let minus = simplex_shift(w, i, -h);
        let (fp, fm) = if on_a {
            (entropy(m, &plus, bw, exec)?, entropy(m, &minus, bw, exec)?)
        } else {
            (entropy(m, aw, &plus, exec)?, entropy(m, aw, &minus, exec)?)
        };
        Ok((fp - fm) / (2.0 * h))
    };
    let grad_a = (0..aw.len())
        .map(|i| partial(aw, i, true))
        .collect::<Result<Vec<_>>>()?;
    let grad_b = (0..bw.len())
        .map(|i| partial(bw, i, false))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntropyGradient {
        grad_a: center(grad_a),
        grad_b: center(grad_b),
    })
}

fn floor_and_normalize(mut w: Vec<f64>, floor: f64) -> Vec<f64> {
    w.iter_mut().for_each(|v| *v = v.max(floor));
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

fn multiplicative_step(w: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
    let shift = g.iter().map(|v| eta * v).fold(f64::NEG_INFINITY, f64::max);
    let raw = w
        .iter()
        .zip(g)
        .map(|(&wi, &gi)| wi * (eta * gi - shift).exp())
        .collect();
    floor_and_normalize(raw, WEIGHT_FLOOR)
}

fn dirichlet(rng: &mut impl rand::Rng, len: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    floor_and_normalize(draws, WEIGHT_FLOOR)
}

struct Ascent {
    a: Vec<f64>,
    b: Vec<f64>,
    entropy: f64,
    iterations: usize,
}

fn ascend(m: &SignMatrix, cfg: &OptimizerConfig, a: Vec<f64>, b: Vec<f64>) -> Result<Ascent> {
    let exec = Execution::Sequential;
    let mut state = Ascent {
        entropy: entropy(m, &a, &b, exec)?,
        a,
        b,
        iterations: 0,
    };
    let mut eta = cfg.step_init;
    'outer: for it in 0..cfg.max_iters {
        let ga =
            SimplexVector::normalized(floor_and_normalize(state.a.clone(), INTERIOR_FLOOR * 2.0))?;
        let gb =
            SimplexVector::normalized(floor_and_normalize(state.b.clone(), INTERIOR_FLOOR * 2.0))?;
        let grad = entropy_gradient(m, &ga, &gb, cfg.fd_step)?;
        loop {
            let a = multiplicative_step(&state.a, &grad.grad_a, eta);
            let b = multiplicative_step(&state.b, &grad.grad_b, eta);
            let value = entropy(m, &a, &b, exec)?;
            if value >= state.entropy {
                let gain = value - state.entropy;
                debug_assert!(
                    SimplexVector::new(a.clone()).is_ok() && SimplexVector::new(b.clone()).is_ok()
                );
                state = Ascent {
                    a,
                    b,
                    entropy: value,
                    iterations: it + 1,
                };
                if gain < cfg.tol {
                    break 'outer;
                }
                eta = (eta * 2.0).min(cfg.step_init);
                break;
            }
            eta /= 2.0;
            if eta < MIN_STEP {
                break 'outer;
            }
        }
    }
    Ok(state)
}

pub fn optimize_distributions(m: &SignMatrix, cfg: &OptimizerConfig) -> Result<OptimizerResult> {
    optimize_distributions_with(m, cfg, Execution::default())
}

/// Best entropy over all starts; ties go to the lowest start index, so the
/// result does not depend on how starts are scheduled.
pub fn optimize_distributions_with(
    m: &SignMatrix,
    cfg: &OptimizerConfig,
    exec: Execution,
) -> Result<OptimizerResult> {
    cfg.validate()?;
    let dim = m.dim();
    let runs = par::map_indices(exec, cfg.restarts + 1, |start| {
        let (a, b) = if start == 0 {
            (vec![1.0 / dim as f64; dim], vec![1.0 / dim as f64; dim])
        } else {
            let mut rng = rng::stream(rng::derive_seed(cfg.seed, start as u64));
            (dirichlet(&mut rng, dim), dirichlet(&mut rng, dim))
        };
        ascend(m, cfg, a, b)
    });
    let mut best: Option<(usize, Ascent)> = None;
    for (start, run) in runs.into_iter().enumerate() {
        let run = run?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| run.entropy > b.entropy + TIE_TOL)
        {
            best = Some((start, run));
        }
    }
    let (start_index, run) = best.expect("at least the uniform start");
    let a = SimplexVector::normalized(run.a)?;
    let b = SimplexVector::normalized(run.b)?;
    let entropy_bits = capacity_entropy_with(m, &a, &b, exec)?.entropy_bits;
    Ok(OptimizerResult {
        a,
        b,
        entropy_bits,
        iterations_used: run.iterations,
        start_index,
    })
}
