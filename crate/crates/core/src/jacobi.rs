//! Cyclic Jacobi eigensolver for real symmetric and complex Hermitian matrices.
//!
//! Each sweep visits every off-diagonal pair once, in round-robin order: a
//! round pairs the indices into disjoint `(p, q)` couples, so all rotations of
//! a round commute and are applied together as one unitary `U`. With `U`
//! block-diagonal the new `(p, q)` entry depends only on the old `2 x 2`
//! block, so every pivot of the round is annihilated exactly.
//!
//! `U^H H U` is formed with two row passes and one conjugate transpose:
//! `B = U^H H`, then `U^H B^H = (B U)^H = H'` since `H'` is Hermitian. Row
//! passes stream over contiguous memory and split across threads by row.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::matrix::SquareMatrix;
use crate::par::{self, Execution};
use crate::{Error, Result};

pub(crate) const MAX_SWEEPS: usize = 30;
pub(crate) const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Pivots smaller than this fraction of `||H||_F` are left alone.
const SKIP_TOL: f64 = 1e-18;

pub(crate) trait Scalar:
    Copy
    + Default
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
{
    fn from_real(x: f64) -> Self;
    fn re(self) -> f64;
    fn conj(self) -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn re(self) -> f64 {
        self
    }
    fn conj(self) -> Self {
        self
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
}

pub(crate) struct Eigen<S> {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`.
    pub vectors: Option<SquareMatrix<S>>,
    #[cfg_attr(not(test), allow(dead_code))]
    pub sweeps: usize,
}

/// Row `k` of a pass becomes `own * row_k + other * row_partner`.
#[derive(Clone, Copy)]
struct RowMix<S> {
    partner: usize,
    own: S,
    other: S,
}

fn off_diagonal_norm<S: Scalar>(h: &[S], dim: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            if i != j {
                sum += h[i * dim + j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Round `r` of a round-robin tournament on `m` (even) players.
fn round_pairs(m: usize, r: usize) -> impl Iterator<Item = (usize, usize)> {
    let slot = move |k: usize| if k == 0 { 0 } else { 1 + (k - 1 + r) % (m - 1) };
    (0..m / 2).map(move |k| (slot(k), slot(m - 1 - k)))
}

fn apply_rows<S: Scalar>(
    exec: Execution,
    src: &[S],
    dst: &mut [S],
    dim: usize,
    mix: &[Option<RowMix<S>>],
) {
    par::for_each_row(exec, dst, dim, |k, out| {
        let own_row = &src[k * dim..(k + 1) * dim];
        match mix[k] {
            None => out.copy_from_slice(own_row),
            Some(m) => {
                let other_row = &src[m.partner * dim..(m.partner + 1) * dim];
                for ((o, &u), &v) in out.iter_mut().zip(own_row).zip(other_row) {
                    *o = u * m.own + v * m.other;
                }
            }
        }
    });
}

fn conj_transpose<S: Scalar>(src: &[S], dst: &mut [S], dim: usize) {
    const BLOCK: usize = 32;
    for ib in (0..dim).step_by(BLOCK) {
        for jb in (0..dim).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(dim) {
                for j in jb..(jb + BLOCK).min(dim) {
                    dst[j * dim + i] = src[i * dim + j].conj();
                }
            }
        }
    }
}

pub(crate) fn eigen<S: Scalar>(
    h: &SquareMatrix<S>,
    want_vectors: bool,
    exec: Execution,
) -> Result<Eigen<S>> {
    let dim = h.dim();
    let exec = exec.for_work(dim * dim * dim);
    let mut a: Vec<S> = h.as_slice().to_vec();
    let mut scratch = vec![S::default(); dim * dim];
    let mut swap = vec![S::default(); dim * dim];
    // Rows of V^H; V = (V^H)^H at the end.
    let mut vh: Option<Vec<S>> = want_vectors.then(|| {
        let mut id = vec![S::default(); dim * dim];
        for i in 0..dim {
            id[i * dim + i] = S::from_real(1.0);
        }
        id
    });

    let norm = a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let players = dim + dim % 2;
    let mut mix: Vec<Option<RowMix<S>>> = vec![None; dim];
    let mut sweeps = 0;

    while off_diagonal_norm(&a, dim) > OFF_DIAGONAL_TOL * norm {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for round in 0..players.saturating_sub(1) {
            let mut any = false;
            mix.iter_mut().for_each(|m| *m = None);
            for (p, q) in round_pairs(players, round) {
                if p >= dim || q >= dim {
                    continue;
                }
                let hpq = a[p * dim + q];
                let r = hpq.abs();
                if r <= SKIP_TOL * norm {
                    continue;
                }
                // Phase making the pivot real and positive: conj(d_q) = h_pq / |h_pq|.
                let phase = hpq * (1.0 / r);
                let app = a[p * dim + p].re();
                let aqq = a[q * dim + q].re();
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                mix[p] = Some(RowMix {
                    partner: q,
                    own: S::from_real(c),
                    other: phase * (-s),
                });
                mix[q] = Some(RowMix {
                    partner: p,
                    own: phase * c,
                    other: S::from_real(s),
                });
                any = true;
            }
            if !any {
                continue;
            }
            apply_rows(exec, &a, &mut scratch, dim, &mix);
            conj_transpose(&scratch, &mut swap, dim);
            apply_rows(exec, &swap, &mut a, dim, &mix);
            if let Some(v) = vh.as_mut() {
                apply_rows(exec, v, &mut scratch, dim, &mix);
                std::mem::swap(v, &mut scratch);
            }
        }
    }

    let mut order: Vec<usize> = (0..dim).collect();
    let diag: Vec<f64> = (0..dim).map(|i| a[i * dim + i].re()).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = vh.map(|rows| {
        let mut v = SquareMatrix::zeros(dim);
        for (col, &src) in order.iter().enumerate() {
            for k in 0..dim {
                v[(k, col)] = rows[src * dim + k].conj();
            }
        }
        v
    });
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}
