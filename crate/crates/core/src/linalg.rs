//! Small dense linear algebra sized for desk-scale problems (dimension up to
//! a few hundred). Matrices are row-major `Vec<f64>` slices.

use crate::error::{Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Coordinate-wise mean of equally sized rows. Panics on an empty slice.
pub fn mean_rows(rows: &[Vec<f64>]) -> Vec<f64> {
    assert!(!rows.is_empty(), "mean of zero rows");
    let d = rows[0].len();
    let mut out = vec![0.0; d];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    let inv = 1.0 / rows.len() as f64;
    for o in &mut out {
        *o *= inv;
    }
    out
}

/// `rows x cols` row-major matrix times `cols` vector.
pub fn matvec(a: &[f64], rows: usize, cols: usize, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), rows * cols);
    debug_assert_eq!(x.len(), cols);
    (0..rows)
        .map(|i| dot(&a[i * cols..(i + 1) * cols], x))
        .collect()
}

/// Product of two square `n x n` row-major matrices.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n * n);
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let brow = &b[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (o, v) in orow.iter_mut().zip(brow) {
                *o += aik * v;
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Solves `A x = b` for symmetric positive definite `A` via Cholesky, with one
/// step of iterative refinement. Fails with `IllPosed` when a pivot collapses.
pub fn spd_solve(a: &[f64], d: usize, b: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(a.len(), d * d);
    debug_assert_eq!(b.len(), d);
    let l = cholesky(a, d)?;
    let mut x = chol_substitute(&l, d, b);
    // One refinement pass keeps the residual near machine precision even when
    // the factorization loses a few digits.
    let r: Vec<f64> = matvec(a, d, d, &x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| bi - ax)
        .collect();
    let c = chol_substitute(&l, d, &r);
    for (xi, ci) in x.iter_mut().zip(&c) {
        *xi += ci;
    }
    Ok(x)
}

fn cholesky(a: &[f64], d: usize) -> Result<Vec<f64>> {
    let scale = (0..d).map(|i| a[i * d + i].abs()).fold(0.0, f64::max);
    let floor = scale.max(1.0) * 1e-14;
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if s <= floor {
                    return Err(Error::IllPosed(format!(
                        "cholesky pivot {s:.3e} at row {i} (matrix not positive definite)"
                    )));
                }
                l[i * d + i] = s.sqrt();
            } else {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    Ok(l)
}

/// Forward then backward substitution with the Cholesky factor `L`.
fn chol_substitute(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; d];
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * d + k] * y[k];
        }
        y[i] = s / l[i * d + i];
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = y[i];
        for k in i + 1..d {
            s -= l[k * d + i] * x[k];
        }
        x[i] = s / l[i * d + i];
    }
    x
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration on the Rayleigh quotient, to relative change 1e-10.
pub fn top_eigenvalue(a: &[f64], d: usize) -> f64 {
    debug_assert_eq!(a.len(), d * d);
    // Deterministic start with unequal coordinates so no eigenvector of a
    // structured matrix is exactly orthogonal to it.
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 1e-3 * i as f64).collect();
    let n0 = norm(&v);
    for vi in &mut v {
        *vi /= n0;
    }
    let mut lambda = 0.0;
    for it in 0..100_000 {
        let av = matvec(a, d, d, &v);
        let next = dot(&v, &av);
        let an = norm(&av);
        if an == 0.0 {
            return 0.0;
        }
        for (vi, avi) in v.iter_mut().zip(&av) {
            *vi = avi / an;
        }
        if it > 3 && (next - lambda).abs() <= 1e-10 * next.abs().max(1.0) {
            return next;
        }
        lambda = next;
    }
    lambda
}
