//! Rényi-2 entropy: a cheap lower bound on the capacity entropy.
//!
//! Under uniform input distributions `S2(rho) = 4n - log2 tr((M M^T)^2)`, and
//! the trace is an integer, computed exactly before the final logarithm.

use serde::Serialize;

use crate::boolfn::SignMatrix;
use crate::par::{self, Execution};
use crate::spectral::check_probability_vector;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Renyi2Method {
    FromSpectrum,
    UniformFast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Renyi2Result {
    pub s2_bits: f64,
    pub method: Renyi2Method,
}

/// `-log2 sum p_i^2`.
pub fn renyi2_of_spectrum(p: &[f64]) -> Result<Renyi2Result> {
    check_probability_vector(p)?;
    let purity: f64 = p.iter().map(|v| v * v).sum();
    Ok(Renyi2Result {
        s2_bits: (-purity.log2()).max(0.0),
        method: Renyi2Method::FromSpectrum,
    })
}

/// `tr((M M^T)^2) = sum_ij (M M^T)_ij^2`, exact. `M M^T` is formed with a
/// dense integer product; at most `2^(6n)`, hence `u128`.
pub fn quartic_sum(m: &SignMatrix) -> u128 {
    quartic_sum_with(m, Execution::default())
}

pub fn quartic_sum_with(m: &SignMatrix, exec: Execution) -> u128 {
    let dim = m.dim();
    let row_sums = par::map_indices(exec.for_work(dim * dim * dim), dim, |i| {
        let ri = m.row(i);
        let mut acc: u128 = 0;
        for j in 0..dim {
            let rij: i64 = ri
                .iter()
                .zip(m.row(j))
                .map(|(&u, &v)| i64::from(u) * i64::from(v))
                .sum();
            acc += (rij * rij) as u128;
        }
        acc
    });
    row_sums.into_iter().sum()
}

pub fn renyi2_uniform_fast(m: &SignMatrix) -> Renyi2Result {
    let trace = quartic_sum(m);
    Renyi2Result {
        s2_bits: (4 * m.n()) as f64 - (trace as f64).log2(),
        method: Renyi2Method::UniformFast,
    }
}
