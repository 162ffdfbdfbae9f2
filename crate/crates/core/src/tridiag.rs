//! Eigenvalues of a real symmetric matrix by Householder reduction to
//! tridiagonal form followed by implicit QL iteration with Wilkinson shifts.
//!
//! Used for the large Gram matrices, where tightly clustered spectra (DISJ
//! at n >= 9 has eigenvalue gaps near 1e-11) keep cyclic Jacobi in its slow
//! linear phase for dozens of sweeps.

use crate::matrix::SquareMatrix;
use crate::par::{self, Execution};
use crate::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;

/// Reduces `a` in place and returns `(diagonal, subdiagonal)`, where
/// `sub[i]` couples rows `i - 1` and `i` (`sub[0] = 0`).
fn householder(a: &mut [f64], dim: usize, exec: Execution) -> (Vec<f64>, Vec<f64>) {
    let mut sub = vec![0.0; dim];
    let mut u = vec![0.0; dim];
    let mut p = vec![0.0; dim];
    for i in (2..dim).rev() {
        // Annihilate a[i][0..i-1] using the leading i x i block.
        let l = i - 1;
        let row = &a[i * dim..i * dim + i];
        let norm_sq: f64 = row.iter().map(|v| v * v).sum();
        let tail_sq = norm_sq - row[l] * row[l];
        if tail_sq == 0.0 {
            sub[i] = row[l];
            continue;
        }
        let norm = norm_sq.sqrt();
        let alpha = if row[l] >= 0.0 { -norm } else { norm };
        u[..i].copy_from_slice(row);
        u[l] -= alpha;
        let h = norm_sq - row[l] * alpha;

        let u_ref = &u[..i];
        let block_rows = par::map_indices(exec.for_work(i * i), i, |r| {
            a[r * dim..r * dim + i]
                .iter()
                .zip(u_ref)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / h
        });
        p[..i].copy_from_slice(&block_rows);
        let k = u[..i].iter().zip(&p[..i]).map(|(x, y)| x * y).sum::<f64>() / (2.0 * h);
        for r in 0..i {
            p[r] -= k * u[r];
        }

        let (u_ref, q_ref) = (&u[..i], &p[..i]);
        par::for_each_row(exec.for_work(i * i), &mut a[..i * dim], dim, |r, out| {
            let (ur, qr) = (u_ref[r], q_ref[r]);
            for ((o, &uc), &qc) in out[..i].iter_mut().zip(u_ref).zip(q_ref) {
                *o -= ur * qc + qr * uc;
            }
        });
        sub[i] = alpha;
    }
    if dim > 1 {
        sub[1] = a[dim];
    }
    let diag = (0..dim).map(|i| a[i * dim + i]).collect();
    (diag, sub)
}

/// Implicit QL on a symmetric tridiagonal matrix; returns the eigenvalues unsorted.
fn tridiagonal_ql(mut d: Vec<f64>, sub: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    // e[i] couples i and i + 1.
    let mut e: Vec<f64> = sub
        .into_iter()
        .skip(1)
        .chain(std::iter::once(0.0))
        .collect();
    // Absolute floor so pairs of near-zero diagonals still deflate.
    let floor = f64::EPSILON
        * d.iter()
            .zip(&e)
            .map(|(x, y)| x.abs() + y.abs())
            .fold(0.0, f64::max);
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * scale || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence(MAX_QL_ITERATIONS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Descending eigenvalues of a symmetric matrix (symmetry is not checked).
pub(crate) fn eigenvalues(g: &SquareMatrix<f64>, exec: Execution) -> Result<Vec<f64>> {
    let dim = g.dim();
    let mut a = g.as_slice().to_vec();
    let (diag, sub) = householder(&mut a, dim, exec);
    let mut values = tridiagonal_ql(diag, sub)?;
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_known_spectra() {
        let g = SquareMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let v = eigenvalues(&g, Execution::Sequential).unwrap();
        assert!((v[0] - 3.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        // Tridiagonal 1-2-1 Laplacian: 2 - 2 cos(k pi / (n + 1)).
        let n = 9;
        let mut g = SquareMatrix::zeros(n);
        for i in 0..n {
            g[(i, i)] = 2.0;
            if i + 1 < n {
                g[(i, i + 1)] = -1.0;
                g[(i + 1, i)] = -1.0;
            }
        }
        let v = eigenvalues(&g, Execution::Sequential).unwrap();
        for (k, val) in v.iter().enumerate() {
            let want = 2.0 - 2.0 * ((n - k) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((val - want).abs() < 1e-13, "{k}: {val} vs {want}");
        }
    }

    #[test]
    fn dense_trace_and_frobenius_preserved() {
        let n = 40;
        let mut g = SquareMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = ((i * 31 + j * 17) % 13) as f64 / 13.0 - 0.4;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        let v = eigenvalues(&g, Execution::Sequential).unwrap();
        assert!((v.iter().sum::<f64>() - g.trace()).abs() < 1e-12);
        let fro: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((fro - g.frobenius_norm()).abs() < 1e-12);
    }
}
