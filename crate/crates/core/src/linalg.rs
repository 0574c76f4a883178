//! Small dense solves and a symmetric tridiagonal eigensolver
//! (Sturm bisection + inverse iteration).

use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` strictly
/// below `x`.
pub fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let scale = gershgorin_radius(diag, off).max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * scale * 1e-3;
    let mut count = 0;
    let mut q = diag[0] - x;
    if q == 0.0 {
        q = -tiny;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let e = off[i - 1];
        q = diag[i] - x - e * e / q;
        if q == 0.0 {
            q = -tiny;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin_radius(diag: &[f64], off: &[f64]) -> f64 {
    let (lo, hi) = gershgorin(diag, off);
    lo.abs().max(hi.abs())
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `count` smallest eigenvalues, ascending.
pub fn tridiag_eigenvalues(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let count = count.min(n);
    let (glo, ghi) = gershgorin(diag, off);
    let span = (ghi - glo).max(f64::MIN_POSITIVE);
    let norm = glo.abs().max(ghi.abs());
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        // Find x with count(x) > k, i.e. the (k+1)-th eigenvalue lies in [lo, hi).
        let mut lo = glo - 1e-12 * span;
        let mut hi = ghi + 1e-12 * span;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if sturm_count(diag, off, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * norm.max(mid.abs()) + f64::MIN_POSITIVE {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Solve `(T - shift I) x = rhs` for symmetric tridiagonal `T` with partial
/// pivoting. Exactly zero pivots are replaced by a tiny value, as is standard
/// for inverse iteration.
pub fn tridiag_solve_shifted(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [f64]) {
    let n = diag.len();
    if n == 1 {
        let mut p = diag[0] - shift;
        if p == 0.0 {
            p = f64::EPSILON;
        }
        rhs[0] /= p;
        return;
    }
    let tiny = f64::EPSILON * gershgorin_radius(diag, off).max(1e-300);
    let mut u0 = vec![0.0; n];
    let mut u1 = vec![0.0; n];
    let mut u2 = vec![0.0; n];
    let mut cur = [diag[0] - shift, off[0], 0.0];
    let mut cur_rhs = rhs[0];
    for i in 0..n - 1 {
        let mut next = [off[i], diag[i + 1] - shift, if i + 2 < n { off[i + 1] } else { 0.0 }];
        let mut next_rhs = rhs[i + 1];
        if next[0].abs() > cur[0].abs() {
            core::mem::swap(&mut cur, &mut next);
            core::mem::swap(&mut cur_rhs, &mut next_rhs);
        }
        if cur[0] == 0.0 {
            cur[0] = tiny;
        }
        let m = next[0] / cur[0];
        u0[i] = cur[0];
        u1[i] = cur[1];
        u2[i] = cur[2];
        rhs[i] = cur_rhs;
        cur = [next[1] - m * cur[1], next[2] - m * cur[2], 0.0];
        cur_rhs = next_rhs - m * cur_rhs;
    }
    if cur[0] == 0.0 {
        cur[0] = tiny;
    }
    u0[n - 1] = cur[0];
    rhs[n - 1] = cur_rhs;
    for i in (0..n).rev() {
        let mut v = rhs[i];
        if i + 1 < n {
            v -= u1[i] * rhs[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * rhs[i + 2];
        }
        rhs[i] = v / u0[i];
    }
}

/// Orthonormal eigenvectors for the given (ascending) eigenvalues.
///
/// Vectors whose eigenvalues fall within a cluster are re-orthogonalized
/// against each other (Gram–Schmidt after every solve).
pub fn tridiag_eigenvectors(diag: &[f64], off: &[f64], eigenvalues: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let norm = gershgorin_radius(diag, off).max(1e-300);
    let cluster_tol = 1e-3 * norm;
    let mut vecs: Vec<Vec<f64>> = Vec::with_capacity(eigenvalues.len());
    let mut cluster_start = 0;
    for (k, &lam) in eigenvalues.iter().enumerate() {
        if k > 0 && (lam - eigenvalues[k - 1]).abs() > cluster_tol {
            cluster_start = k;
        }
        // Separate numerically identical shifts inside a cluster.
        let shift = lam + (k - cluster_start) as f64 * 10.0 * f64::EPSILON * norm;
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * (0.7071 + k as f64 * 0.377)).sin())
            .collect();
        normalize(&mut x);
        for _ in 0..4 {
            tridiag_solve_shifted(diag, off, shift, &mut x);
            for prev in &vecs[cluster_start..k] {
                let d = dot(&x, prev);
                for (xi, pi) in x.iter_mut().zip(prev) {
                    *xi -= d * pi;
                }
            }
            normalize(&mut x);
        }
        vecs.push(x);
    }
    vecs
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let n = dot(x, x).sqrt();
    if n > 0.0 {
        for v in x.iter_mut() {
            *v /= n;
        }
    }
}

/// Solve the symmetric positive definite system `a x = b` in place by
/// Cholesky (`a` row-major `n × n`, overwritten). Returns `None` when a pivot
/// drops below `rel_tol` times the largest diagonal entry.
pub fn cholesky_solve(a: &mut [f64], b: &mut [f64], n: usize, rel_tol: f64) -> Option<()> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 {
        return None;
    }
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= rel_tol * max_diag {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * n + k] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= a[k * n + i] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    Some(())
}

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// `None` with fewer than two points or constant `x`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Some(LineFit { slope, intercept: my - slope * mx, r_squared })
}

/// Gaussian elimination with partial pivoting; `a` is row-major `n × n`.
pub fn lu_solve(a: &mut [f64], b: &mut [f64], n: usize) -> Option<()> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap();
        if a[piv * n + col] == 0.0 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        let p = a[col * n + col];
        for i in col + 1..n {
            let m = a[i * n + col] / p;
            if m != 0.0 {
                for k in col..n {
                    a[i * n + k] -= m * a[col * n + k];
                }
                b[i] -= m * b[col];
            }
        }
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= a[i * n + k] * b[k];
        }
        b[i] = v / a[i * n + i];
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tridiag(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let e = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
        (d, e)
    }

    fn dense(d: &[f64], e: &[f64]) -> DMatrix<f64> {
        let n = d.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = d[i];
            if i + 1 < n {
                m[(i, i + 1)] = e[i];
                m[(i + 1, i)] = e[i];
            }
        }
        m
    }

    #[test]
    fn eigenpairs_match_dense_solver() {
        for (n, seed) in [(1usize, 1u64), (2, 2), (9, 3), (60, 4)] {
            let (d, e) = if n == 1 { (vec![0.7], vec![]) } else { random_tridiag(n, seed) };
            let m = dense(&d, &e);
            let mut reference: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            let ours = tridiag_eigenvalues(&d, &e, n);
            for (a, b) in ours.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
            let vecs = tridiag_eigenvectors(&d, &e, &ours);
            for (lam, v) in ours.iter().zip(&vecs) {
                let v = DVector::from_column_slice(v);
                let r = &m * &v - &v * *lam;
                assert!(r.norm() < 1e-10, "residual {}", r.norm());
            }
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot(&vecs[i], &vecs[j]) - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn clustered_eigenvalues_stay_orthogonal() {
        // Two decoupled identical blocks: every eigenvalue is double.
        let d = vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0];
        let e = vec![-1.0, -1.0, 0.0, -1.0, -1.0];
        let lams = tridiag_eigenvalues(&d, &e, 6);
        let vecs = tridiag_eigenvectors(&d, &e, &lams);
        for i in 0..6 {
            for j in 0..i {
                assert!(dot(&vecs[i], &vecs[j]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dense_solvers() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let x = [1.0, -2.0, 0.5];
        let mut b = [0.0; 3];
        for i in 0..3 {
            b[i] = (0..3).map(|k| a[i * 3 + k] * x[k]).sum();
        }
        let mut a1 = a;
        let mut b1 = b;
        cholesky_solve(&mut a1, &mut b1, 3, 1e-14).unwrap();
        let mut a2 = a;
        let mut b2 = b;
        lu_solve(&mut a2, &mut b2, 3).unwrap();
        for i in 0..3 {
            assert!((b1[i] - x[i]).abs() < 1e-14);
            assert!((b2[i] - x[i]).abs() < 1e-14);
        }
        let mut sing = [1.0, 2.0, 2.0, 4.0];
        let mut rhs = [1.0, 1.0];
        assert!(cholesky_solve(&mut sing, &mut rhs, 2, 1e-12).is_none());
    }
}
