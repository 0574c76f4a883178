//! Complex FFT (radix-2, Bluestein for other lengths) and the real-kernel
//! trigonometric transforms DST-I / DCT-I built on top of it.
//!
//! All transforms here are unnormalized.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X_k = Σ x_j e^{-2πi jk/n}`
    Forward,
    /// `x_j = Σ X_k e^{+2πi jk/n}`
    Inverse,
}

/// A reusable plan for one length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    n: usize,
    kind: PlanKind,
}

#[derive(Debug, Clone)]
enum PlanKind {
    Trivial,
    Radix2 { twiddles: Vec<Complex64> },
    Bluestein {
        m: usize,
        chirp: Vec<Complex64>,
        // FFT of the conjugate chirp filter, length m.
        filter_hat: Vec<Complex64>,
        inner: Vec<Complex64>,
    },
}

impl FftPlan {
    pub fn new(n: usize) -> Self {
        let kind = if n <= 1 {
            PlanKind::Trivial
        } else if n.is_power_of_two() {
            PlanKind::Radix2 { twiddles: radix2_twiddles(n) }
        } else {
            let m = (2 * n - 1).next_power_of_two();
            // chirp_j = e^{-iπ j²/n}; j² is reduced mod 2n to keep the angle small.
            let chirp: Vec<Complex64> = (0..n)
                .map(|j| {
                    let jj = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
                    Complex64::from_polar(1.0, -PI * jj / n as f64)
                })
                .collect();
            let mut filter = vec![Complex64::new(0.0, 0.0); m];
            filter[0] = chirp[0].conj();
            for j in 1..n {
                filter[j] = chirp[j].conj();
                filter[m - j] = chirp[j].conj();
            }
            let inner = radix2_twiddles(m);
            radix2_in_place(&mut filter, &inner, Direction::Forward);
            PlanKind::Bluestein { m, chirp, filter_hat: filter, inner }
        };
        FftPlan { n, kind }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, data: &mut [Complex64], dir: Direction) {
        assert_eq!(data.len(), self.n, "FFT length mismatch");
        match &self.kind {
            PlanKind::Trivial => {}
            PlanKind::Radix2 { twiddles } => radix2_in_place(data, twiddles, dir),
            PlanKind::Bluestein { m, chirp, filter_hat, inner } => {
                let n = self.n;
                // Inverse via conjugation: ifft(x) = conj(fft(conj(x))).
                if dir == Direction::Inverse {
                    for v in data.iter_mut() {
                        *v = v.conj();
                    }
                }
                let mut buf = vec![Complex64::new(0.0, 0.0); *m];
                for j in 0..n {
                    buf[j] = data[j] * chirp[j];
                }
                radix2_in_place(&mut buf, inner, Direction::Forward);
                for (b, h) in buf.iter_mut().zip(filter_hat) {
                    *b *= h;
                }
                radix2_in_place(&mut buf, inner, Direction::Inverse);
                let scale = 1.0 / *m as f64;
                for k in 0..n {
                    data[k] = buf[k] * chirp[k] * scale;
                }
                if dir == Direction::Inverse {
                    for v in data.iter_mut() {
                        *v = v.conj();
                    }
                }
            }
        }
    }
}

/// One-shot transform.
pub fn fft(data: &mut [Complex64], dir: Direction) {
    FftPlan::new(data.len()).process(data, dir);
}

fn radix2_twiddles(n: usize) -> Vec<Complex64> {
    (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
        .collect()
}

fn radix2_in_place(data: &mut [Complex64], twiddles: &[Complex64], dir: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let mut w = twiddles[k * stride];
                if dir == Direction::Inverse {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// DST-I: `X_k = Σ_{j=1}^{n} x_j sin(π j k / (n+1))`, `k = 1..=n`.
///
/// Input and output are indexed from 0 (`x[0]` is `x_1`). Complex data is
/// transformed componentwise, the kernel is real.
#[derive(Debug, Clone)]
pub struct Dst1 {
    n: usize,
    plan: FftPlan,
}

impl Dst1 {
    pub fn new(n: usize) -> Self {
        Dst1 { n, plan: FftPlan::new(2 * (n + 1)) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn process(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        let m = 2 * (n + 1);
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        for j in 0..n {
            y[j + 1] = x[j];
            y[m - 1 - j] = -x[j];
        }
        self.plan.process(&mut y, Direction::Forward);
        // Y_k = -2i X_k
        for k in 0..n {
            let v = y[k + 1];
            out[k] = Complex64::new(-v.im, v.re) * 0.5;
        }
    }
}

/// DCT-I: `X_k = x_0/2 + (-1)^k x_n/2 + Σ_{j=1}^{n-1} x_j cos(π j k / n)`,
/// `k = 0..=n`, for input of length `n + 1`.
#[derive(Debug, Clone)]
pub struct Dct1 {
    n: usize,
    plan: FftPlan,
}

impl Dct1 {
    /// `points` is the input length `n + 1` (at least 2).
    pub fn new(points: usize) -> Self {
        assert!(points >= 2);
        let n = points - 1;
        Dct1 { n, plan: FftPlan::new(2 * n) }
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn process(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(x.len(), n + 1);
        assert_eq!(out.len(), n + 1);
        let m = 2 * n;
        let mut y = vec![Complex64::new(0.0, 0.0); m];
        y[..=n].copy_from_slice(x);
        for j in 1..n {
            y[m - j] = x[j];
        }
        self.plan.process(&mut y, Direction::Forward);
        for k in 0..=n {
            out[k] = y[k] * 0.5;
        }
    }
}

/// Signed frequency index of FFT bin `i` for length `n` (`n/2` maps to `+n/2`).
#[inline]
pub fn signed_index(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Whether FFT bin `i` is the (unpaired) Nyquist bin of an even length.
#[inline]
pub fn is_nyquist(i: usize, n: usize) -> bool {
    n % 2 == 0 && i == n / 2 && n > 1
}
