//! Scalar special functions and fixed quadrature rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre over `[a, b]` with a geometric grading towards `a`
/// (`grade_at_a`) so integrable endpoint singularities at `a` are resolved.
pub fn integrate_graded<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    panels: usize,
    grade_at_a: bool,
) -> f64 {
    if b == a {
        return 0.0;
    }
    let (x, w) = gauss_legendre(16);
    let mut edges = Vec::with_capacity(panels + 1);
    if grade_at_a {
        // Geometric panels: widths shrink by 1/2 towards `a`.
        edges.push(a);
        let mut widths = Vec::with_capacity(panels);
        let mut width = (b - a) * 0.5;
        for _ in 0..panels.saturating_sub(1) {
            widths.push(width);
            width *= 0.5;
        }
        widths.push(width * 2.0);
        let mut pos = a;
        for wd in widths.iter().rev() {
            pos += wd;
            edges.push(pos);
        }
        *edges.last_mut().unwrap() = b;
    } else {
        for i in 0..=panels {
            edges.push(a + (b - a) * i as f64 / panels as f64);
        }
    }
    let mut total = 0.0;
    for win in edges.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            acc += wi * f(mid + half * xi);
        }
        total += half * acc;
    }
    total
}
