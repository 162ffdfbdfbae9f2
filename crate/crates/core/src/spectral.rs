//! Rescaled Gram matrix, its spectrum, and the capacity entropy.
//!
//! For distributions `a` (Alice) and `b` (Bob) the signal ensemble
//! `rho = sum_x a_x |psi_x><psi_x|` has the same nonzero spectrum as
//! `G = (AMB)(AMB)^T`, so `S(rho) = H(sigma^2(AMB))` is computed from one
//! symmetric eigensolve of size `2^n`.

use num_complex::Complex64;
use serde::Serialize;

use crate::boolfn::SignMatrix;
use crate::jacobi;
use crate::matrix::SquareMatrix;
use crate::par::{self, Execution};
use crate::tridiag;
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues in `[-CLAMP_WINDOW, 0)` are roundoff and become 0.
pub const CLAMP_WINDOW: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-9;

/// A probability distribution over one party's `2^n` inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexVector {
    weights: Vec<f64>,
}

impl SimplexVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !w.is_finite() || **w < 0.0)
        {
            return Err(Error::InvalidDistribution(format!("weight {i} is {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(SimplexVector { weights })
    }

    /// Scales non-negative finite weights to unit sum.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 || weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be non-negative with a positive finite sum".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(len: usize) -> Self {
        SimplexVector {
            weights: vec![1.0 / len as f64; len],
        }
    }

    pub fn point_mass(len: usize, index: usize) -> Self {
        let mut weights = vec![0.0; len];
        weights[index] = 1.0;
        SimplexVector { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    /// Squared singular values of `AMB`, descending.
    pub sigma_sq: Vec<f64>,
    pub entropy_bits: f64,
}

fn check_dims(m: &SignMatrix, a: &SimplexVector, b: &SimplexVector) -> Result<()> {
    for len in [a.len(), b.len()] {
        if len != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                got: len,
            });
        }
    }
    Ok(())
}

pub fn gram_matrix(
    m: &SignMatrix,
    a: &SimplexVector,
    b: &SimplexVector,
) -> Result<SquareMatrix<f64>> {
    gram_matrix_with(m, a, b, Execution::default())
}

/// `G_ij = sqrt(a_i a_j) sum_y b_y M_iy M_jy`.
pub fn gram_matrix_with(
    m: &SignMatrix,
    a: &SimplexVector,
    b: &SimplexVector,
    exec: Execution,
) -> Result<SquareMatrix<f64>> {
    check_dims(m, a, b)?;
    let dim = m.dim();
    let sqrt_b: Vec<f64> = b.weights().iter().map(|w| w.sqrt()).collect();
    let sqrt_a: Vec<f64> = a.weights().iter().map(|w| w.sqrt()).collect();
    // Rows of M B, scaled by sqrt(a_i): the rows of AMB.
    let mut rows = vec![0.0; dim * dim];
    for x in 0..dim {
        for (y, (&s, &sb)) in m.row(x).iter().zip(&sqrt_b).enumerate() {
            rows[x * dim + y] = sqrt_a[x] * sb * f64::from(s);
        }
    }
    let mut g = vec![0.0; dim * dim];
    par::for_each_row(exec.for_work(dim * dim * dim), &mut g, dim, |i, out| {
        let ri = &rows[i * dim..(i + 1) * dim];
        for (j, o) in out.iter_mut().enumerate() {
            let rj = &rows[j * dim..(j + 1) * dim];
            *o = ri.iter().zip(rj).map(|(u, v)| u * v).sum();
        }
    });
    Ok(SquareMatrix::from_row_major(dim, g).expect("square buffer"))
}

fn check_symmetric(g: &SquareMatrix<f64>) -> Result<()> {
    let dim = g.dim();
    for i in 0..dim {
        for j in i + 1..dim {
            let diff = (g[(i, j)] - g[(j, i)]).abs();
            if diff.is_nan() || diff > SYMMETRY_TOL {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    diff,
                });
            }
        }
    }
    Ok(())
}

fn clamp_nonnegative(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < -CLAMP_WINDOW || v.is_nan() {
            return Err(Error::NegativeEigenvalue(*v));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(())
}

/// Largest dimension [`Solver::Auto`] hands to the Jacobi solver.
pub const JACOBI_MAX_DIM: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    /// Jacobi up to [`JACOBI_MAX_DIM`], tridiagonal QL above.
    Auto,
    /// Cyclic Jacobi to off-diagonal norm `1e-12 ||G||_F`, at most 30 sweeps.
    Jacobi,
    /// Householder tridiagonalization and implicit QL.
    Tridiagonal,
}

pub fn symmetric_spectrum(g: &SquareMatrix<f64>) -> Result<Vec<f64>> {
    symmetric_spectrum_with(g, Execution::default())
}

/// Descending eigenvalues of a positive semidefinite symmetric matrix.
pub fn symmetric_spectrum_with(g: &SquareMatrix<f64>, exec: Execution) -> Result<Vec<f64>> {
    symmetric_spectrum_using(g, Solver::Auto, exec)
}

pub fn symmetric_spectrum_using(
    g: &SquareMatrix<f64>,
    solver: Solver,
    exec: Execution,
) -> Result<Vec<f64>> {
    check_symmetric(g)?;
    let solver = match solver {
        Solver::Auto if g.dim() <= JACOBI_MAX_DIM => Solver::Jacobi,
        Solver::Auto => Solver::Tridiagonal,
        other => other,
    };
    let mut values = match solver {
        Solver::Tridiagonal => tridiag::eigenvalues(g, exec)?,
        _ => jacobi::eigen(g, false, exec)?.values,
    };
    clamp_nonnegative(&mut values)?;
    Ok(values)
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues descending and
/// unclamped; column `j` of the second element pairs with `values[j]`.
pub fn symmetric_eigen(g: &SquareMatrix<f64>) -> Result<(Vec<f64>, SquareMatrix<f64>)> {
    check_symmetric(g)?;
    let e = jacobi::eigen(g, true, Execution::default())?;
    Ok((e.values, e.vectors.expect("vectors requested")))
}

/// Descending, unclamped eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &SquareMatrix<Complex64>) -> Result<Vec<f64>> {
    let dim = h.dim();
    for i in 0..dim {
        for j in i..dim {
            let diff = (h[(i, j)] - h[(j, i)].conj()).norm();
            if diff.is_nan() || diff > SYMMETRY_TOL {
                return Err(Error::NotSymmetric {
                    row: i,
                    col: j,
                    diff,
                });
            }
        }
    }
    Ok(jacobi::eigen(h, false, Execution::default())?.values)
}

/// `S(rho)` in bits for a density matrix.
pub fn von_neumann_entropy(rho: &SquareMatrix<Complex64>) -> Result<f64> {
    let mut values = hermitian_eigenvalues(rho)?;
    clamp_nonnegative(&mut values)?;
    shannon_entropy(&values)
}

pub(crate) fn check_probability_vector(p: &[f64]) -> Result<()> {
    if let Some((i, v)) = p
        .iter()
        .enumerate()
        .find(|(_, v)| v.is_nan() || **v < -CLAMP_WINDOW)
    {
        return Err(Error::InvalidDistribution(format!("entry {i} is {v}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_TOL {
        return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// `-sum p_i log2 p_i` with `0 log 0 = 0`, accumulated in nats then divided by `ln 2`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    check_probability_vector(p)?;
    let nats: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
    Ok((nats / std::f64::consts::LN_2).max(0.0))
}

pub fn capacity_entropy(
    m: &SignMatrix,
    a: &SimplexVector,
    b: &SimplexVector,
) -> Result<SpectrumResult> {
    capacity_entropy_with(m, a, b, Execution::default())
}

/// `H(sigma^2(AMB))` and the spectrum it comes from.
pub fn capacity_entropy_with(
    m: &SignMatrix,
    a: &SimplexVector,
    b: &SimplexVector,
    exec: Execution,
) -> Result<SpectrumResult> {
    let g = gram_matrix_with(m, a, b, exec)?;
    let sigma_sq = symmetric_spectrum_with(&g, exec)?;
    let entropy_bits = shannon_entropy(&sigma_sq)?;
    Ok(SpectrumResult {
        sigma_sq,
        entropy_bits,
    })
}
