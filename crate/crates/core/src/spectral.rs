//! Eigenbases of `L = -div(A∇)` on intervals and boxes, the space-time
//! grids, modal transforms and the complex fractional multiplier.
//!
//! Normalization of the time transform: with `Nt` samples on `[0, T)`,
//!
//! ```text
//! û_k(m) = √T / Nt · Σ_i c_k(t_i) e^{-2πi m i / Nt},   c_k(t) = Σ_j w_j u(t, x_j) φ_k(x_j)
//! ```
//!
//! so that `Σ |û|² = dt · Σ_i Σ_j w_j |u(t_i, x_j)|²` (discrete Parseval) and a
//! time-constant `φ_k` has `û_k(0) = √T`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{self, Dct1, Direction, Dst1, FftPlan};
use crate::linalg;
use crate::special::gamma;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    /// Periodic interval; used for reflected (odd/even extended) problems.
    Periodic,
}

impl BoundaryCondition {
    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Periodic => "periodic",
        }
    }
}

/// Registered analytic coefficient profiles (1D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CoefficientProfile {
    /// `A = 1`
    Unit,
    /// `A(x) = 1 + 0.5 sin x`
    OnePlusHalfSin,
    /// `A(x) = 1 + (x - a)/L` on `(a, a + L)`
    Ramp,
}

impl CoefficientProfile {
    pub const ALL: [CoefficientProfile; 3] =
        [CoefficientProfile::Unit, CoefficientProfile::OnePlusHalfSin, CoefficientProfile::Ramp];

    pub fn name(self) -> &'static str {
        match self {
            CoefficientProfile::Unit => "unit",
            CoefficientProfile::OnePlusHalfSin => "one_plus_half_sin",
            CoefficientProfile::Ramp => "ramp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn eval(self, x: f64, origin: f64, length: f64) -> f64 {
        match self {
            CoefficientProfile::Unit => 1.0,
            CoefficientProfile::OnePlusHalfSin => 1.0 + 0.5 * x.sin(),
            CoefficientProfile::Ramp => 1.0 + (x - origin) / length,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficient {
    /// `A = c·I`
    Constant(f64),
    /// Constant symmetric matrix (2D).
    Matrix([[f64; 2]; 2]),
    /// Named analytic profile (1D).
    Profile(CoefficientProfile),
    /// Sampled scalar table (1D), linearly interpolated, constant beyond the ends.
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl Coefficient {
    fn constant_scalar(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::Profile(CoefficientProfile::Unit) => Some(1.0),
            _ => None,
        }
    }

    /// Scalar value at `x` on the axis `(origin, origin + length)`.
    pub fn scalar_at(&self, x: f64, origin: f64, length: f64) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Matrix(m) => m[0][0],
            Coefficient::Profile(p) => p.eval(x, origin, length),
            Coefficient::Table { nodes, values } => interpolate(nodes, values, x),
        }
    }
}

fn interpolate(nodes: &[f64], values: &[f64], x: f64) -> f64 {
    if x <= nodes[0] {
        return values[0];
    }
    let last = nodes.len() - 1;
    if x >= nodes[last] {
        return values[last];
    }
    let i = nodes.partition_point(|&n| n <= x) - 1;
    let f = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
    values[i] + f * (values[i + 1] - values[i])
}

/// Interval `(a, a + L)` or box `(a₁, a₁ + L₁) × (a₂, a₂ + L₂)` with its
/// coefficient and declared ellipticity bounds `Λ₁ ≤ Λ₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub origin: Vec<f64>,
    pub extents: Vec<f64>,
    pub coefficient: Coefficient,
    pub ellipticity: (f64, f64),
}

impl DomainSpec {
    /// `(0, length)` with `A = 1`.
    pub fn interval(length: f64) -> Self {
        Self::span(0.0, length)
    }

    /// `(a, b)` with `A = 1`.
    pub fn span(a: f64, b: f64) -> Self {
        DomainSpec {
            origin: vec![a],
            extents: vec![b - a],
            coefficient: Coefficient::Constant(1.0),
            ellipticity: (1.0, 1.0),
        }
    }

    /// `(0, lx) × (0, ly)` with `A = I`.
    pub fn rectangle(lx: f64, ly: f64) -> Self {
        DomainSpec {
            origin: vec![0.0, 0.0],
            extents: vec![lx, ly],
            coefficient: Coefficient::Constant(1.0),
            ellipticity: (1.0, 1.0),
        }
    }

    pub fn with_coefficient(mut self, coefficient: Coefficient, lower: f64, upper: f64) -> Self {
        self.coefficient = coefficient;
        self.ellipticity = (lower, upper);
        self
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.extents.len();
        if !(dim == 1 || dim == 2) || self.origin.len() != dim {
            return Err(Error::invalid(format!("dimension must be 1 or 2 (got {dim} extents, {} origins)", self.origin.len())));
        }
        for (i, &e) in self.extents.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::invalid(format!("extent {i} must be positive, got {e}")));
            }
        }
        let (lo, hi) = self.ellipticity;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::invalid(format!("ellipticity bounds must satisfy 0 < Λ₁ ≤ Λ₂, got ({lo}, {hi})")));
        }
        let check = |a: f64, at: f64| -> Result<()> {
            if !(a >= lo * (1.0 - 1e-12) && a <= hi * (1.0 + 1e-12)) {
                return Err(Error::invalid(format!(
                    "ellipticity violated at x = {at}: A = {a} outside [{lo}, {hi}]"
                )));
            }
            Ok(())
        };
        let (a, l) = (self.origin[0], self.extents[0]);
        match &self.coefficient {
            Coefficient::Constant(c) => check(*c, a)?,
            Coefficient::Matrix(m) => {
                if dim != 2 {
                    return Err(Error::invalid("matrix coefficient requires a 2D domain"));
                }
                let scale = m[0][0].abs().max(m[1][1].abs()).max(1.0);
                if (m[0][1] - m[1][0]).abs() > 1e-14 * scale {
                    return Err(Error::invalid("coefficient matrix is not symmetric"));
                }
                let tr = 0.5 * (m[0][0] + m[1][1]);
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let disc = (tr * tr - det).max(0.0).sqrt();
                check(tr - disc, a)?;
                check(tr + disc, a)?;
            }
            Coefficient::Profile(p) => {
                if dim != 1 && *p != CoefficientProfile::Unit {
                    return Err(Error::unsupported("variable coefficients are supported in 1D only"));
                }
                for i in 0..=2048 {
                    let x = a + l * i as f64 / 2048.0;
                    check(p.eval(x, a, l), x)?;
                }
            }
            Coefficient::Table { nodes, values } => {
                if dim != 1 {
                    return Err(Error::unsupported("variable coefficients are supported in 1D only"));
                }
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return Err(Error::invalid("coefficient table needs ≥ 2 nodes and matching values"));
                }
                if nodes.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::invalid("coefficient table nodes must be strictly increasing"));
                }
                for (&x, &v) in nodes.iter().zip(values) {
                    check(v, x)?;
                }
            }
        }
        Ok(())
    }
}

/// One grid axis. Closed axes hold `nodes` points including both ends;
/// periodic axes hold `nodes` points on `[origin, origin + length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub origin: f64,
    pub length: f64,
    pub nodes: usize,
    pub periodic: bool,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.length / self.nodes as f64
        } else {
            self.length / (self.nodes - 1) as f64
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        if self.periodic {
            self.origin + self.length * i as f64 / self.nodes as f64
        } else {
            self.origin + self.length * i as f64 / (self.nodes - 1) as f64
        }
    }

    /// Trapezoid weight (uniform on periodic axes).
    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if !self.periodic && (i == 0 || i + 1 == self.nodes) {
            0.5 * h
        } else {
            h
        }
    }
}

/// Tensor grid with quadrature weights. Flat index is `ix * ny + iy` in 2D.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpaceGrid {
    axes: Vec<Axis>,
}

impl SpaceGrid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::invalid("space grids have 1 or 2 axes"));
        }
        for ax in &axes {
            if ax.nodes < 2 || !(ax.length > 0.0) {
                return Err(Error::invalid("grid axes need ≥ 2 nodes and positive length"));
            }
        }
        Ok(SpaceGrid { axes })
    }

    /// Uniform closed grid on `(origin, origin + length)` with `nodes` points.
    pub fn uniform(origin: f64, length: f64, nodes: usize) -> Result<Self> {
        Self::new(vec![Axis { origin, length, nodes, periodic: false }])
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of a flat index.
    pub fn unflatten(&self, idx: usize) -> [usize; 2] {
        if self.axes.len() == 1 {
            [idx, 0]
        } else {
            let ny = self.axes[1].nodes;
            [idx / ny, idx % ny]
        }
    }

    pub fn flatten(&self, ix: usize, iy: usize) -> usize {
        if self.axes.len() == 1 {
            ix
        } else {
            ix * self.axes[1].nodes + iy
        }
    }

    /// Coordinates of a flat index (unused components are 0).
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.unflatten(idx);
        let x = self.axes[0].coord(i);
        let y = if self.axes.len() > 1 { self.axes[1].coord(j) } else { 0.0 };
        [x, y]
    }

    pub fn weight(&self, idx: usize) -> f64 {
        let [i, j] = self.unflatten(idx);
        let mut w = self.axes[0].weight(i);
        if self.axes.len() > 1 {
            w *= self.axes[1].weight(j);
        }
        w
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Whether a node lies on the boundary of a closed axis.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let ij = self.unflatten(idx);
        self.axes.iter().zip(ij).any(|(a, i)| !a.periodic && (i == 0 || i + 1 == a.nodes))
    }
}

/// Uniform periodic time window `[0, T)` with an even number of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    period: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(period: f64, samples: usize) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid(format!("time period must be positive, got {period}")));
        }
        if samples < 2 || samples % 2 != 0 {
            return Err(Error::invalid(format!("time sample count must be even and ≥ 2, got {samples}")));
        }
        Ok(TimeGrid { period, samples })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn dt(&self) -> f64 {
        self.period / self.samples as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        self.period * i as f64 / self.samples as f64
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.time(i)).collect()
    }

    /// Signed index `m` of FFT bin `i`.
    pub fn frequency_index(&self, i: usize) -> i64 {
        fft::signed_index(i, self.samples)
    }

    /// `ρ_m = 2πm/T` for FFT bin `i`.
    pub fn frequency(&self, i: usize) -> f64 {
        2.0 * PI * self.frequency_index(i) as f64 / self.period
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        fft::is_nyquist(i, self.samples)
    }

    /// FFT bin of signed index `m`.
    pub fn bin(&self, m: i64) -> usize {
        m.rem_euclid(self.samples as i64) as usize
    }
}

/// Samples `u(t_i, x_j)` on a time × space tensor grid, time-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    time: TimeGrid,
    grid: SpaceGrid,
    values: Vec<Complex64>,
}

impl SpaceTimeField {
    pub fn zeros(time: TimeGrid, grid: SpaceGrid) -> Self {
        let n = time.samples() * grid.len();
        SpaceTimeField { time, grid, values: vec![ZERO; n] }
    }

    pub fn from_values(time: TimeGrid, grid: SpaceGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != time.samples() * grid.len() {
            return Err(Error::mismatch(format!(
                "expected {} values, got {}",
                time.samples() * grid.len(),
                values.len()
            )));
        }
        Ok(SpaceTimeField { time, grid, values })
    }

    pub fn from_fn<F: FnMut(f64, [f64; 2]) -> Complex64>(time: TimeGrid, grid: SpaceGrid, mut f: F) -> Self {
        let n = grid.len();
        let mut values = Vec::with_capacity(time.samples() * n);
        for i in 0..time.samples() {
            let t = time.time(i);
            for j in 0..n {
                values.push(f(t, grid.point(j)));
            }
        }
        SpaceTimeField { time, grid, values }
    }

    pub fn from_real_fn<F: FnMut(f64, [f64; 2]) -> f64>(time: TimeGrid, grid: SpaceGrid, mut f: F) -> Self {
        Self::from_fn(time, grid, |t, x| Complex64::new(f(t, x), 0.0))
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.len() + j]
    }

    /// Time slice `i`.
    pub fn slice(&self, i: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn max_abs_diff(&self, other: &SpaceTimeField) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Grid `L²` norm `(dt Σ_i Σ_j w_j |u|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let w = self.grid.weights();
        let n = w.len();
        let mut acc = 0.0;
        for (idx, v) in self.values.iter().enumerate() {
            acc += w[idx % n] * v.norm_sqr();
        }
        (acc * self.time.dt()).sqrt()
    }

    /// Grid `L²` pairing `dt Σ w u conj(v)`.
    pub fn inner(&self, other: &SpaceTimeField) -> Complex64 {
        let w = self.grid.weights();
        let n = w.len();
        let mut acc = ZERO;
        for (idx, (a, b)) in self.values.iter().zip(&other.values).enumerate() {
            acc += a * b.conj() * w[idx % n];
        }
        acc * self.time.dt()
    }

    pub fn scaled(&self, c: Complex64) -> SpaceTimeField {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= c;
        }
        out
    }

    /// `α·self + β·other` on identical grids.
    pub fn combine(&self, alpha: Complex64, other: &SpaceTimeField, beta: Complex64) -> Result<SpaceTimeField> {
        check_same_grids(self, other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * alpha + b * beta).collect();
        Ok(SpaceTimeField { time: self.time, grid: self.grid.clone(), values })
    }
}

pub(crate) fn check_same_grids(a: &SpaceTimeField, b: &SpaceTimeField) -> Result<()> {
    if a.time != b.time || a.grid != b.grid {
        return Err(Error::mismatch("fields live on different grids"));
    }
    Ok(())
}

/// Modal coefficients `û_k(ρ_m)`, stored `[k * Nt + bin]` in FFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients {
    time: TimeGrid,
    modes: usize,
    data: Vec<Complex64>,
}

impl ModalCoefficients {
    pub fn zeros(time: TimeGrid, modes: usize) -> Self {
        ModalCoefficients { time, modes, data: vec![ZERO; modes * time.samples()] }
    }

    pub fn from_data(time: TimeGrid, modes: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != modes * time.samples() {
            return Err(Error::invalid(format!(
                "coefficient array has {} entries, expected {modes} × {}",
                data.len(),
                time.samples()
            )));
        }
        Ok(ModalCoefficients { time, modes, data })
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Coefficient of mode `k` at FFT bin `bin`.
    pub fn get(&self, k: usize, bin: usize) -> Complex64 {
        self.data[k * self.time.samples() + bin]
    }

    pub fn set(&mut self, k: usize, bin: usize, v: Complex64) {
        let nt = self.time.samples();
        self.data[k * nt + bin] = v;
    }

    /// Coefficient at signed frequency index `m`.
    pub fn get_signed(&self, k: usize, m: i64) -> Complex64 {
        self.get(k, self.time.bin(m))
    }

    /// `Σ |û|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Sine { origin: f64, length: f64, c: f64, dst: Dst1 },
    Cosine { origin: f64, length: f64, c: f64, dct: Dct1 },
    /// Periodic Fourier modes (analytic) or FD eigenvectors; node samples cached.
    Dense { modes: Vec<Vec<f64>>, fourier: Option<(f64, f64)> },
    Tensor { x: Box<SpectralBasis>, y: Box<SpectralBasis>, pairs: Vec<(usize, usize)> },
}

/// Eigenpairs `(λ_k, φ_k)` of `L` sampled on a grid, ascending in `λ`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    bc: BoundaryCondition,
    grid: SpaceGrid,
    eigenvalues: Vec<f64>,
    repr: Repr,
}

/// The symmetrized finite-difference operator `S = W^{-1/2} K W^{-1/2}`
/// (symmetric tridiagonal) on the unknown nodes `first_node..first_node + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdOperator {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub weights: Vec<f64>,
    pub first_node: usize,
}

/// Variable-coefficient three-point conservative discretization, `A` taken
/// at cell midpoints.
pub fn fd_operator(domain: &DomainSpec, bc: BoundaryCondition, grid_size: usize) -> Result<FdOperator> {
    domain.validate()?;
    if domain.dimension() != 1 {
        return Err(Error::unsupported("finite-difference operators are 1D only"));
    }
    if grid_size < 3 {
        return Err(Error::invalid("grid size must be at least 3"));
    }
    let (a0, len) = (domain.origin[0], domain.extents[0]);
    let n_int = grid_size - 1;
    let h = len / n_int as f64;
    let amid: Vec<f64> = (0..n_int)
        .map(|j| domain.coefficient.scalar_at(a0 + (j as f64 + 0.5) * h, a0, len))
        .collect();
    match bc {
        BoundaryCondition::Dirichlet => {
            // Unknowns at nodes 1..N-1, weight h each: S = K / h.
            let n = n_int - 1;
            let diag = (0..n).map(|i| (amid[i] + amid[i + 1]) / (h * h)).collect();
            let off = (0..n.saturating_sub(1)).map(|i| -amid[i + 1] / (h * h)).collect();
            Ok(FdOperator { diag, off, weights: vec![h; n], first_node: 1 })
        }
        BoundaryCondition::Neumann => {
            let n = grid_size;
            let weights: Vec<f64> = (0..n).map(|i| if i == 0 || i + 1 == n { 0.5 * h } else { h }).collect();
            let diag = (0..n)
                .map(|i| {
                    let left = if i > 0 { amid[i - 1] } else { 0.0 };
                    let right = if i + 1 < n { amid[i] } else { 0.0 };
                    (left + right) / h / weights[i]
                })
                .collect();
            let off = (0..n - 1).map(|i| -amid[i] / h / (weights[i] * weights[i + 1]).sqrt()).collect();
            Ok(FdOperator { diag, off, weights, first_node: 0 })
        }
        BoundaryCondition::Periodic => Err(Error::unsupported("periodic finite-difference operator")),
    }
}

/// Eigenbasis of `L` on the domain.
///
/// Constant coefficients give analytic sine/cosine (or Fourier) modes; a
/// variable 1D coefficient gives the finite-difference eigenvectors; 2D boxes
/// give tensor products of 1D analytic bases (diagonal constant `A` only).
pub fn build_basis(domain: &DomainSpec, bc: BoundaryCondition, k: usize, grid_size: usize) -> Result<SpectralBasis> {
    domain.validate()?;
    if k == 0 {
        return Err(Error::invalid("mode count must be positive"));
    }
    if grid_size < 3 {
        return Err(Error::invalid("grid size must be at least 3"));
    }
    match domain.dimension() {
        1 => {
            let max = grid_size - 2;
            if k > max {
                return Err(Error::invalid(format!("K = {k} exceeds gridSize − 2 = {max}")));
            }
            match domain.coefficient.constant_scalar() {
                Some(c) => analytic_1d(domain.origin[0], domain.extents[0], c, bc, k, grid_size),
                None => {
                    if bc == BoundaryCondition::Periodic {
                        return Err(Error::unsupported("variable coefficients with periodic conditions"));
                    }
                    build_numeric_basis(domain, bc, k, grid_size)
                }
            }
        }
        _ => build_tensor(domain, bc, k, grid_size),
    }
}

/// Finite-difference eigenbasis even for constant coefficients.
pub fn build_numeric_basis(domain: &DomainSpec, bc: BoundaryCondition, k: usize, grid_size: usize) -> Result<SpectralBasis> {
    let op = fd_operator(domain, bc, grid_size)?;
    let max = grid_size - 2;
    if k == 0 || k > max {
        return Err(Error::invalid(format!("K = {k} must lie in 1..={max}")));
    }
    let mut eigenvalues = linalg::tridiag_eigenvalues(&op.diag, &op.off, k);
    let vectors = linalg::tridiag_eigenvectors(&op.diag, &op.off, &eigenvalues);
    let grid = SpaceGrid::uniform(domain.origin[0], domain.extents[0], grid_size)?;
    let mut modes = Vec::with_capacity(k);
    for (idx, y) in vectors.iter().enumerate() {
        let mut phi = vec![0.0; grid_size];
        for (i, v) in y.iter().enumerate() {
            phi[op.first_node + i] = v / op.weights[i].sqrt();
        }
        if bc == BoundaryCondition::Neumann && idx == 0 {
            // The constant vector is an exact null vector of the stencil.
            eigenvalues[0] = 0.0;
            let c = 1.0 / domain.extents[0].sqrt();
            phi.iter_mut().for_each(|p| *p = c);
        }
        fix_sign(&mut phi);
        modes.push(phi);
    }
    Ok(SpectralBasis { bc, grid, eigenvalues, repr: Repr::Dense { modes, fourier: None } })
}

fn fix_sign(phi: &mut [f64]) {
    let max = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = phi.iter().find(|v| v.abs() > 1e-8 * max) {
        if *first < 0.0 {
            phi.iter_mut().for_each(|p| *p = -*p);
        }
    }
}

fn analytic_1d(origin: f64, length: f64, c: f64, bc: BoundaryCondition, k: usize, grid_size: usize) -> Result<SpectralBasis> {
    match bc {
        BoundaryCondition::Dirichlet => {
            let grid = SpaceGrid::uniform(origin, length, grid_size)?;
            let eigenvalues = (1..=k).map(|w| c * (w as f64 * PI / length).powi(2)).collect();
            Ok(SpectralBasis {
                bc,
                grid,
                eigenvalues,
                repr: Repr::Sine { origin, length, c, dst: Dst1::new(grid_size - 2) },
            })
        }
        BoundaryCondition::Neumann => {
            let grid = SpaceGrid::uniform(origin, length, grid_size)?;
            let eigenvalues = (0..k).map(|w| c * (w as f64 * PI / length).powi(2)).collect();
            Ok(SpectralBasis {
                bc,
                grid,
                eigenvalues,
                repr: Repr::Cosine { origin, length, c, dct: Dct1::new(grid_size) },
            })
        }
        BoundaryCondition::Periodic => {
            // Wave numbers must stay below the grid Nyquist for exact discrete orthonormality.
            let max_wave = (k / 2) as f64;
            if 2.0 * max_wave >= grid_size as f64 {
                return Err(Error::invalid("too many Fourier modes for the periodic grid"));
            }
            let grid = SpaceGrid::new(vec![Axis { origin, length, nodes: grid_size, periodic: true }])?;
            let eigenvalues: Vec<f64> = (0..k)
                .map(|i| {
                    let w = i.div_ceil(2) as f64;
                    c * (2.0 * PI * w / length).powi(2)
                })
                .collect();
            let axis = grid.axes()[0];
            let modes = (0..k)
                .map(|i| (0..grid_size).map(|j| fourier_mode(i, axis.coord(j), origin, length)).collect())
                .collect();
            Ok(SpectralBasis { bc, grid, eigenvalues, repr: Repr::Dense { modes, fourier: Some((origin, length)) } })
        }
    }
}

fn fourier_mode(i: usize, x: f64, origin: f64, period: f64) -> f64 {
    if i == 0 {
        return 1.0 / period.sqrt();
    }
    let w = i.div_ceil(2) as f64;
    let arg = 2.0 * PI * w * (x - origin) / period;
    let norm = (2.0 / period).sqrt();
    if i % 2 == 1 {
        norm * arg.cos()
    } else {
        norm * arg.sin()
    }
}

fn build_tensor(domain: &DomainSpec, bc: BoundaryCondition, k: usize, grid_size: usize) -> Result<SpectralBasis> {
    let (cx, cy) = match &domain.coefficient {
        Coefficient::Constant(c) => (*c, *c),
        Coefficient::Profile(CoefficientProfile::Unit) => (1.0, 1.0),
        Coefficient::Matrix(m) => {
            if m[0][1] != 0.0 || m[1][0] != 0.0 {
                return Err(Error::unsupported("off-diagonal constant coefficients in 2D"));
            }
            (m[0][0], m[1][1])
        }
        _ => return Err(Error::unsupported("variable coefficients in 2D")),
    };
    if bc == BoundaryCondition::Periodic {
        return Err(Error::unsupported("periodic 2D boxes"));
    }
    let axis_max = grid_size - 2;
    if k > axis_max * axis_max {
        return Err(Error::invalid(format!("K = {k} exceeds (gridSize − 2)² = {}", axis_max * axis_max)));
    }
    let ka = k.min(axis_max);
    let bx = analytic_1d(domain.origin[0], domain.extents[0], cx, bc, ka, grid_size)?;
    let by = analytic_1d(domain.origin[1], domain.extents[1], cy, bc, ka, grid_size)?;
    let mut pairs: Vec<(usize, usize)> = (0..ka).flat_map(|i| (0..ka).map(move |j| (i, j))).collect();
    pairs.sort_by(|p, q| {
        let lp = bx.eigenvalues[p.0] + by.eigenvalues[p.1];
        let lq = bx.eigenvalues[q.0] + by.eigenvalues[q.1];
        lp.total_cmp(&lq).then(p.cmp(q))
    });
    pairs.truncate(k);
    let eigenvalues = pairs.iter().map(|&(i, j)| bx.eigenvalues[i] + by.eigenvalues[j]).collect();
    let grid = SpaceGrid::new(vec![bx.grid.axes()[0], by.grid.axes()[0]])?;
    Ok(SpectralBasis { bc, grid, eigenvalues, repr: Repr::Tensor { x: Box::new(bx), y: Box::new(by), pairs } })
}

impl SpectralBasis {
    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Whether the eigenfunctions are closed-form (as opposed to FD vectors).
    pub fn is_analytic(&self) -> bool {
        match &self.repr {
            Repr::Sine { .. } | Repr::Cosine { .. } | Repr::Tensor { .. } => true,
            Repr::Dense { fourier, .. } => fourier.is_some(),
        }
    }

    /// `(origin, length, diffusivity)` for analytic constant-coefficient
    /// Dirichlet/Neumann intervals.
    pub fn constant_interval(&self) -> Option<(f64, f64, f64)> {
        match &self.repr {
            Repr::Sine { origin, length, c, .. } | Repr::Cosine { origin, length, c, .. } => Some((*origin, *length, *c)),
            _ => None,
        }
    }

    /// Constant diffusivity per axis for analytic Dirichlet/Neumann bases
    /// (one entry in 1D, two for tensor boxes).
    pub fn axis_diffusivities(&self) -> Option<Vec<f64>> {
        match &self.repr {
            Repr::Sine { c, .. } | Repr::Cosine { c, .. } => Some(vec![*c]),
            Repr::Tensor { x, y, .. } => Some(vec![x.axis_diffusivities()?[0], y.axis_diffusivities()?[0]]),
            Repr::Dense { .. } => None,
        }
    }

    /// Indices of modes with `λ = 0` (the constant mode under Neumann or
    /// periodic conditions).
    pub fn zero_modes(&self) -> Vec<usize> {
        self.eigenvalues.iter().enumerate().filter(|(_, &l)| l == 0.0).map(|(i, _)| i).collect()
    }

    /// Smallest positive eigenvalue.
    pub fn smallest_positive_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|&l| l > 0.0)
    }

    /// Per-axis mode indices of tensor mode `k` (2D only).
    pub fn tensor_pair(&self, k: usize) -> Option<(usize, usize)> {
        match &self.repr {
            Repr::Tensor { pairs, .. } => pairs.get(k).copied(),
            _ => None,
        }
    }

    /// `φ_k` at an arbitrary point (FD vectors are linearly interpolated).
    pub fn eval_mode(&self, k: usize, p: [f64; 2]) -> f64 {
        match &self.repr {
            Repr::Sine { origin, length, .. } => {
                (2.0 / length).sqrt() * ((k + 1) as f64 * PI * (p[0] - origin) / length).sin()
            }
            Repr::Cosine { origin, length, .. } => {
                if k == 0 {
                    1.0 / length.sqrt()
                } else {
                    (2.0 / length).sqrt() * (k as f64 * PI * (p[0] - origin) / length).cos()
                }
            }
            Repr::Dense { modes, fourier } => match fourier {
                Some((origin, period)) => fourier_mode(k, p[0], *origin, *period),
                None => {
                    let ax = self.grid.axes()[0];
                    let u = ((p[0] - ax.origin) / ax.spacing()).clamp(0.0, (ax.nodes - 1) as f64);
                    let i = (u.floor() as usize).min(ax.nodes - 2);
                    let f = u - i as f64;
                    modes[k][i] * (1.0 - f) + modes[k][i + 1] * f
                }
            },
            Repr::Tensor { x, y, pairs } => {
                let (i, j) = pairs[k];
                x.eval_mode(i, [p[0], 0.0]) * y.eval_mode(j, [p[1], 0.0])
            }
        }
    }

    /// `φ_k` at grid node `idx` (exactly zero on Dirichlet boundary nodes).
    pub fn mode_at_node(&self, k: usize, idx: usize) -> f64 {
        match &self.repr {
            Repr::Dense { modes, .. } => modes[k][idx],
            Repr::Sine { .. } => {
                if idx == 0 || idx + 1 == self.grid.len() {
                    0.0
                } else {
                    self.eval_mode(k, self.grid.point(idx))
                }
            }
            Repr::Cosine { .. } => self.eval_mode(k, self.grid.point(idx)),
            Repr::Tensor { x, y, pairs } => {
                let (i, j) = pairs[k];
                let [ix, iy] = self.grid.unflatten(idx);
                x.mode_at_node(i, ix) * y.mode_at_node(j, iy)
            }
        }
    }

    pub fn mode_vector(&self, k: usize) -> Vec<f64> {
        (0..self.grid.len()).map(|j| self.mode_at_node(k, j)).collect()
    }

    /// `c_k = Σ_j w_j u_j φ_k(x_j)` for one time slice.
    pub fn project_slice(&self, values: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(values.len(), self.grid.len());
        assert_eq!(out.len(), self.len());
        match &self.repr {
            Repr::Sine { length, dst, .. } => {
                let n = self.grid.len();
                let h = self.grid.axes()[0].spacing();
                let mut full = vec![ZERO; n - 2];
                dst.process(&values[1..n - 1], &mut full);
                let scale = h * (2.0 / length).sqrt();
                for (o, v) in out.iter_mut().zip(&full) {
                    *o = v * scale;
                }
            }
            Repr::Cosine { length, dct, .. } => {
                let n = self.grid.len();
                let h = self.grid.axes()[0].spacing();
                let mut full = vec![ZERO; n];
                dct.process(values, &mut full);
                for (k, o) in out.iter_mut().enumerate() {
                    let norm = if k == 0 { 1.0 / length.sqrt() } else { (2.0 / length).sqrt() };
                    *o = full[k] * (h * norm);
                }
            }
            Repr::Dense { modes, .. } => {
                let w = self.grid.weights();
                for (o, phi) in out.iter_mut().zip(modes) {
                    let mut acc = ZERO;
                    for j in 0..w.len() {
                        acc += values[j] * (w[j] * phi[j]);
                    }
                    *o = acc;
                }
            }
            Repr::Tensor { x, y, pairs } => {
                let nx = x.grid.len();
                let ny = y.grid.len();
                let (kx, ky) = (x.len(), y.len());
                // Along y for each x row, then along x for each y-mode.
                let mut stage = vec![ZERO; nx * ky];
                let mut buf = vec![ZERO; ky];
                for ix in 0..nx {
                    y.project_slice(&values[ix * ny..(ix + 1) * ny], &mut buf);
                    stage[ix * ky..(ix + 1) * ky].copy_from_slice(&buf);
                }
                let mut col = vec![ZERO; nx];
                let mut res = vec![ZERO; kx];
                let mut full = vec![ZERO; kx * ky];
                for jy in 0..ky {
                    for ix in 0..nx {
                        col[ix] = stage[ix * ky + jy];
                    }
                    x.project_slice(&col, &mut res);
                    for i in 0..kx {
                        full[i * ky + jy] = res[i];
                    }
                }
                for (o, &(i, j)) in out.iter_mut().zip(pairs) {
                    *o = full[i * ky + j];
                }
            }
        }
    }

    /// `u_j = Σ_k c_k φ_k(x_j)` for one time slice.
    pub fn synthesize_slice(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(coeffs.len(), self.len());
        assert_eq!(out.len(), self.grid.len());
        match &self.repr {
            Repr::Sine { length, dst, .. } => {
                let n = self.grid.len();
                let norm = (2.0 / length).sqrt();
                let mut a = vec![ZERO; n - 2];
                for (ai, c) in a.iter_mut().zip(coeffs) {
                    *ai = c * norm;
                }
                let mut inner = vec![ZERO; n - 2];
                dst.process(&a, &mut inner);
                out[0] = ZERO;
                out[n - 1] = ZERO;
                out[1..n - 1].copy_from_slice(&inner);
            }
            Repr::Cosine { length, dct, .. } => {
                let n = self.grid.len();
                let mut b = vec![ZERO; n];
                for (k, c) in coeffs.iter().enumerate() {
                    b[k] = if k == 0 { c * (2.0 / length.sqrt()) } else { c * (2.0 / length).sqrt() };
                }
                dct.process(&b, out);
            }
            Repr::Dense { modes, .. } => {
                out.iter_mut().for_each(|o| *o = ZERO);
                for (c, phi) in coeffs.iter().zip(modes) {
                    if *c == ZERO {
                        continue;
                    }
                    for (o, p) in out.iter_mut().zip(phi) {
                        *o += c * p;
                    }
                }
            }
            Repr::Tensor { x, y, pairs } => {
                let nx = x.grid.len();
                let ny = y.grid.len();
                let (kx, ky) = (x.len(), y.len());
                let mut full = vec![ZERO; kx * ky];
                for (c, &(i, j)) in coeffs.iter().zip(pairs) {
                    full[i * ky + j] = *c;
                }
                let mut stage = vec![ZERO; nx * ky];
                let mut col = vec![ZERO; kx];
                let mut res = vec![ZERO; nx];
                for jy in 0..ky {
                    for i in 0..kx {
                        col[i] = full[i * ky + jy];
                    }
                    x.synthesize_slice(&col, &mut res);
                    for ix in 0..nx {
                        stage[ix * ky + jy] = res[ix];
                    }
                }
                let mut row = vec![ZERO; ny];
                for ix in 0..nx {
                    y.synthesize_slice(&stage[ix * ky..(ix + 1) * ky], &mut row);
                    out[ix * ny..(ix + 1) * ny].copy_from_slice(&row);
                }
            }
        }
    }
}

/// `û_k(ρ_m)` of a field (see the module docs for the normalization).
pub fn forward_transform(field: &SpaceTimeField, basis: &SpectralBasis) -> Result<ModalCoefficients> {
    if field.grid() != basis.grid() {
        return Err(Error::mismatch("field grid differs from the basis grid"));
    }
    let time = *field.time();
    let nt = time.samples();
    let kk = basis.len();
    let mut data = vec![ZERO; kk * nt];
    let mut buf = vec![ZERO; kk];
    for i in 0..nt {
        basis.project_slice(field.slice(i), &mut buf);
        for k in 0..kk {
            data[k * nt + i] = buf[k];
        }
    }
    let plan = FftPlan::new(nt);
    let scale = time.period().sqrt() / nt as f64;
    for row in data.chunks_mut(nt) {
        plan.process(row, Direction::Forward);
        row.iter_mut().for_each(|v| *v *= scale);
    }
    ModalCoefficients::from_data(time, kk, data)
}

/// Exact discrete inverse of [`forward_transform`].
pub fn inverse_transform(coeffs: &ModalCoefficients, basis: &SpectralBasis, time: &TimeGrid) -> Result<SpaceTimeField> {
    if coeffs.modes() != basis.len() || coeffs.time() != time {
        return Err(Error::invalid(format!(
            "coefficient shape {} × {} does not match basis K = {} and Nt = {}",
            coeffs.modes(),
            coeffs.time().samples(),
            basis.len(),
            time.samples()
        )));
    }
    let nt = time.samples();
    let kk = basis.len();
    let mut data = coeffs.data().to_vec();
    let plan = FftPlan::new(nt);
    let scale = 1.0 / time.period().sqrt();
    for row in data.chunks_mut(nt) {
        if row.iter().all(|v| *v == ZERO) {
            continue;
        }
        plan.process(row, Direction::Inverse);
        row.iter_mut().for_each(|v| *v *= scale);
    }
    let n = basis.grid().len();
    let mut values = vec![ZERO; nt * n];
    let mut buf = vec![ZERO; kk];
    for i in 0..nt {
        for k in 0..kk {
            buf[k] = data[k * nt + i];
        }
        basis.synthesize_slice(&buf, &mut values[i * n..(i + 1) * n]);
    }
    SpaceTimeField::from_values(*time, basis.grid().clone(), values)
}

/// Real field with modal content only for `k < kmax` and `|m| < mmax`.
/// `draw` supplies coefficient parts (typically uniform on `[-1, 1)`); the
/// `m = 0` coefficients are real and `−m` is the conjugate of `m`. Zero modes
/// are skipped so the result is admissible under Neumann conditions.
pub fn band_limited<F: FnMut() -> f64>(
    basis: &SpectralBasis,
    time: TimeGrid,
    kmax: usize,
    mmax: i64,
    mut draw: F,
) -> Result<SpaceTimeField> {
    if kmax > basis.len() || mmax < 1 || mmax > time.samples() as i64 / 2 {
        return Err(Error::invalid("band limits exceed the basis or the time grid"));
    }
    let zeros = basis.zero_modes();
    let mut c = ModalCoefficients::zeros(time, basis.len());
    for k in 0..kmax {
        for m in 0..mmax {
            let re = draw();
            let im = draw();
            if zeros.contains(&k) {
                continue;
            }
            let v = if m == 0 { Complex64::new(re, 0.0) } else { Complex64::new(re, im) };
            c.set(k, time.bin(m), v);
            if m > 0 {
                c.set(k, time.bin(-m), v.conj());
            }
        }
    }
    let mut u = inverse_transform(&c, basis, &time)?;
    // Drop the roundoff imaginary part.
    u.values_mut().iter_mut().for_each(|v| v.im = 0.0);
    Ok(u)
}

/// Relative energy of `u` outside the span of the basis.
pub fn spectral_tail(field: &SpaceTimeField, basis: &SpectralBasis) -> Result<f64> {
    let coeffs = forward_transform(field, basis)?;
    let proj = inverse_transform(&coeffs, basis, field.time())?;
    let total = field.l2_norm();
    if total == 0.0 {
        return Ok(0.0);
    }
    let diff = field.combine(Complex64::new(1.0, 0.0), &proj, Complex64::new(-1.0, 0.0))?;
    Ok(diff.l2_norm() / total)
}

/// `s`, `a = 1 − 2s` and the Neumann flux constant `Γ(1−s)/(4^{s−1/2}Γ(s))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FractionalParams {
    s: f64,
    a: f64,
    flux_constant: f64,
}

impl FractionalParams {
    pub fn new(s: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("fractional order must lie in (0, 1), got {s}")));
        }
        Ok(Self::build(s))
    }

    /// Like [`FractionalParams::new`] but also admits the endpoints `s = 0`
    /// (identity) and `s = 1` (the local operator), used in limit checks.
    pub fn with_closed_order(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(format!("order must lie in [0, 1], got {s}")));
        }
        Ok(Self::build(s))
    }

    fn build(s: f64) -> Self {
        let flux_constant = if s == 0.0 {
            0.0
        } else if s == 1.0 {
            f64::INFINITY
        } else {
            gamma(1.0 - s) / (4.0.powf(s - 0.5) * gamma(s))
        };
        FractionalParams { s, a: 1.0 - 2.0 * s, flux_constant }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn flux_constant(&self) -> f64 {
        self.flux_constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Power {
    /// `(λ + iρ)^{+s}`
    Positive,
    /// `(λ + iρ)^{-s}`
    Negative,
}

/// Principal branch `(λ + iρ)^{±s}`.
pub fn multiplier_value(params: &FractionalParams, rho: f64, lambda: f64, power: Power) -> Result<Complex64> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("λ must be nonnegative, got {lambda}")));
    }
    let s = params.s();
    if lambda == 0.0 && rho == 0.0 {
        return match power {
            Power::Positive if s == 0.0 => Ok(Complex64::new(1.0, 0.0)),
            Power::Positive => Ok(ZERO),
            Power::Negative => Err(Error::SingularMode { mode: 0, frequency: 0 }),
        };
    }
    let e = match power {
        Power::Positive => s,
        Power::Negative => -s,
    };
    let modulus = (e * lambda.hypot(rho).ln()).exp();
    Ok(Complex64::from_polar(modulus, e * rho.atan2(lambda)))
}

/// Multiplier applied to FFT bin `bin`. At the Nyquist bin the average of
/// `±ρ_N` (the real part) is used so real data stays real.
pub fn bin_multiplier(params: &FractionalParams, time: &TimeGrid, bin: usize, lambda: f64, power: Power) -> Result<Complex64> {
    let v = multiplier_value(params, time.frequency(bin), lambda, power)?;
    if time.is_nyquist(bin) {
        Ok(Complex64::new(v.re, 0.0))
    } else {
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// Odd (or even) reflection of a field on `(a, a + L)` about `a`, returned on
/// the periodic grid `[a − L, a + L)` with `2N` nodes.
pub fn reflect_extension(u: &SpaceTimeField, parity: Parity) -> Result<SpaceTimeField> {
    let grid = u.grid();
    if grid.dim() != 1 {
        return Err(Error::unsupported("reflections are implemented for 1D fields only"));
    }
    let ax = grid.axes()[0];
    if ax.periodic {
        return Err(Error::invalid("reflection expects a closed interval grid"));
    }
    let n = ax.nodes - 1;
    let ext_axis = Axis { origin: ax.origin - ax.length, length: 2.0 * ax.length, nodes: 2 * n, periodic: true };
    let ext_grid = SpaceGrid::new(vec![ext_axis])?;
    let sign = match parity {
        Parity::Odd => -1.0,
        Parity::Even => 1.0,
    };
    let nt = u.time().samples();
    let mut values = Vec::with_capacity(nt * 2 * n);
    for i in 0..nt {
        let row = u.slice(i);
        for j in 0..2 * n {
            let v = if j < n {
                row[n - j] * sign
            } else if j == n && parity == Parity::Odd {
                ZERO
            } else {
                row[j - n]
            };
            values.push(v);
        }
    }
    SpaceTimeField::from_values(*u.time(), ext_grid, values)
}

pub fn odd_extension(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    reflect_extension(u, Parity::Odd)
}

pub fn even_extension(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    reflect_extension(u, Parity::Even)
}

/// Restrict a reflected field back to the closed half interval `half`.
pub fn restrict_reflection(ext: &SpaceTimeField, half: &SpaceGrid, parity: Parity) -> Result<SpaceTimeField> {
    let ax = half.axes()[0];
    let n = ax.nodes - 1;
    if ext.grid().len() != 2 * n || half.dim() != 1 {
        return Err(Error::mismatch("extended grid does not match the half interval"));
    }
    let sign = match parity {
        Parity::Odd => -1.0,
        Parity::Even => 1.0,
    };
    let nt = ext.time().samples();
    let mut values = Vec::with_capacity(nt * (n + 1));
    for i in 0..nt {
        let row = ext.slice(i);
        values.extend_from_slice(&row[n..2 * n]);
        // x = a + L is identified with a − L by periodicity.
        values.push(row[0] * sign);
    }
    SpaceTimeField::from_values(*ext.time(), half.clone(), values)
}

/// A short description used in error messages and metadata.
pub fn describe_basis(basis: &SpectralBasis) -> String {
    let axes = basis.grid().axes();
    format!(
        "{}D {} basis, K = {}, grid {}",
        axes.len(),
        basis.bc().name(),
        basis.len(),
        axes.iter().map(|a| format!("{}", a.nodes)).collect::<Vec<_>>().join("×")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn dirichlet_sine_pairs() {
        let b = build_basis(&DomainSpec::interval(PI), BoundaryCondition::Dirichlet, 3, 65).unwrap();
        assert_eq!(b.len(), 3);
        for (k, l) in b.eigenvalues().iter().enumerate() {
            assert_relative_eq!(*l, ((k + 1) * (k + 1)) as f64, max_relative = 1e-14);
        }
        let x = 0.731;
        assert_relative_eq!(b.eval_mode(1, [x, 0.0]), (2.0 / PI).sqrt() * (2.0 * x).sin(), max_relative = 1e-14);
    }

    #[test]
    fn neumann_cosine_pairs() {
        let b = build_basis(&DomainSpec::interval(PI), BoundaryCondition::Neumann, 3, 65).unwrap();
        assert_eq!(b.eigenvalues(), &[0.0, 1.0, 4.0]);
        assert_relative_eq!(b.eval_mode(0, [0.3, 0.0]), 1.0 / PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(b.eval_mode(2, [0.3, 0.0]), (2.0 / PI).sqrt() * 0.6f64.cos(), max_relative = 1e-14);
        assert_eq!(b.zero_modes(), vec![0]);
    }

    fn gram_error(b: &SpectralBasis) -> f64 {
        let w = b.grid().weights();
        let vecs: Vec<Vec<f64>> = (0..b.len()).map(|k| b.mode_vector(k)).collect();
        let mut worst = 0.0f64;
        for i in 0..b.len() {
            for j in 0..=i {
                let g: f64 = (0..w.len()).map(|n| w[n] * vecs[i][n] * vecs[j][n]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - e).abs());
            }
        }
        worst
    }

    #[test]
    fn discrete_orthonormality() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann, BoundaryCondition::Periodic] {
            let b = build_basis(&DomainSpec::interval(2.5), bc, 20, 41).unwrap();
            assert!(gram_error(&b) < 1e-12, "{bc:?}");
        }
        let dom = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::OnePlusHalfSin), 0.5, 1.5);
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let b = build_basis(&dom, bc, 30, 129).unwrap();
            assert!(!b.is_analytic());
            assert!(gram_error(&b) < 1e-8, "{bc:?}");
        }
        let b = build_basis(&DomainSpec::rectangle(1.0, 2.0), BoundaryCondition::Neumann, 25, 17).unwrap();
        assert!(gram_error(&b) < 1e-12);
    }

    #[test]
    fn numeric_constant_coefficient_matches_fd_formula() {
        // Independent oracle: the 3-point Dirichlet Laplacian has λ_k = (4/h²) sin²(kπh/(2L)).
        let l = 2.0;
        let n = 100;
        let b = build_numeric_basis(&DomainSpec::interval(l), BoundaryCondition::Dirichlet, 10, n + 1).unwrap();
        let h = l / n as f64;
        for (k, lam) in b.eigenvalues().iter().enumerate() {
            let kk = (k + 1) as f64;
            let expect = 4.0 / (h * h) * (kk * PI * h / (2.0 * l)).sin().powi(2);
            assert!((lam - expect).abs() < 1e-10 * expect.max(1.0));
        }
        // Neumann: λ_k = (4/h²) sin²(kπh/(2L)) including k = 0.
        let b = build_numeric_basis(&DomainSpec::interval(l), BoundaryCondition::Neumann, 10, n + 1).unwrap();
        for (k, lam) in b.eigenvalues().iter().enumerate() {
            let expect = 4.0 / (h * h) * (k as f64 * PI * h / (2.0 * l)).sin().powi(2);
            assert!((lam - expect).abs() < 1e-10 * expect.max(1.0), "k={k}: {lam} vs {expect}");
        }
    }

    #[test]
    fn sign_convention_first_node_positive() {
        let dom = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::Ramp), 1.0, 2.0);
        let b = build_basis(&dom, BoundaryCondition::Dirichlet, 8, 101).unwrap();
        for k in 0..8 {
            assert!(b.mode_at_node(k, 1) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let dom = DomainSpec::interval(1.0);
        assert!(matches!(build_basis(&dom, BoundaryCondition::Dirichlet, 10, 11), Err(Error::InvalidInput(_))));
        let bad = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::OnePlusHalfSin), 1.1, 1.5);
        let err = build_basis(&bad, BoundaryCondition::Dirichlet, 4, 20).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(ref m) if m.contains("ellipticity violated at x")));
        let var2d = DomainSpec::rectangle(1.0, 1.0).with_coefficient(Coefficient::Profile(CoefficientProfile::Ramp), 0.5, 3.0);
        assert!(matches!(build_basis(&var2d, BoundaryCondition::Dirichlet, 4, 20), Err(Error::Unsupported(_))));
        let off = DomainSpec::rectangle(1.0, 1.0).with_coefficient(Coefficient::Matrix([[2.0, 0.5], [0.5, 2.0]]), 1.0, 3.0);
        assert!(matches!(build_basis(&off, BoundaryCondition::Dirichlet, 4, 20), Err(Error::Unsupported(_))));
        let nonsym = DomainSpec::rectangle(1.0, 1.0).with_coefficient(Coefficient::Matrix([[2.0, 0.5], [0.1, 2.0]]), 1.0, 3.0);
        assert!(matches!(build_basis(&nonsym, BoundaryCondition::Dirichlet, 4, 20), Err(Error::InvalidInput(_))));
        assert!(TimeGrid::new(1.0, 7).is_err());
    }

    #[test]
    fn table_coefficient_interpolates() {
        let coef = Coefficient::Table { nodes: vec![0.0, 1.0, 2.0], values: vec![1.0, 2.0, 1.5] };
        assert_relative_eq!(coef.scalar_at(0.5, 0.0, 2.0), 1.5);
        assert_relative_eq!(coef.scalar_at(1.5, 0.0, 2.0), 1.75);
        let dom = DomainSpec::interval(2.0).with_coefficient(coef, 1.0, 2.0);
        let b = build_basis(&dom, BoundaryCondition::Neumann, 5, 41).unwrap();
        assert_eq!(b.eigenvalues()[0], 0.0);
    }

    #[test]
    fn pure_mode_transforms() {
        let basis = build_basis(&DomainSpec::interval(PI), BoundaryCondition::Dirichlet, 8, 33).unwrap();
        let time = TimeGrid::new(4.0, 16).unwrap();
        let u = SpaceTimeField::from_real_fn(time, basis.grid().clone(), |_, x| basis.eval_mode(0, x));
        let u = {
            // Exact zeros on the boundary nodes.
            let mut u = u;
            let n = basis.grid().len();
            for i in 0..16 {
                u.values_mut()[i * n] = ZERO;
                u.values_mut()[i * n + n - 1] = ZERO;
            }
            u
        };
        let coeffs = forward_transform(&u, &basis).unwrap();
        for k in 0..8 {
            for bin in 0..16 {
                let v = coeffs.get(k, bin);
                let expect = if k == 0 && bin == 0 { 2.0 } else { 0.0 };
                assert!((v - c(expect)).norm() < 1e-12, "k={k} bin={bin} v={v}");
            }
        }
        let rho2 = time.frequency(2);
        let w = SpaceTimeField::from_fn(time, basis.grid().clone(), |t, x| {
            Complex64::from_polar(1.0, rho2 * t) * basis.eval_mode(1, x)
        });
        let coeffs = forward_transform(&w, &basis).unwrap();
        for k in 0..8 {
            for bin in 0..16 {
                let v = coeffs.get(k, bin).norm();
                if k == 1 && bin == 2 {
                    assert!((v - 2.0).abs() < 1e-12);
                } else {
                    assert!(v < 1e-12);
                }
            }
        }
    }

    fn random_field(basis: &SpectralBasis, time: TimeGrid, seed: u64) -> SpaceTimeField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = basis.grid().len() * time.samples();
        let values = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        SpaceTimeField::from_values(time, basis.grid().clone(), values).unwrap()
    }

    fn random_coeffs(basis: &SpectralBasis, time: TimeGrid, seed: u64) -> ModalCoefficients {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..basis.len() * time.samples())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        ModalCoefficients::from_data(time, basis.len(), data).unwrap()
    }

    #[test]
    fn roundtrip_and_parseval_on_random_coefficients() {
        let time = TimeGrid::new(3.0, 12).unwrap();
        let dom = DomainSpec::interval(1.7).with_coefficient(Coefficient::Profile(CoefficientProfile::Ramp), 1.0, 2.0);
        let bases = [
            build_basis(&DomainSpec::interval(1.7), BoundaryCondition::Dirichlet, 15, 17).unwrap(),
            build_basis(&DomainSpec::interval(1.7), BoundaryCondition::Neumann, 15, 17).unwrap(),
            build_basis(&DomainSpec::span(-1.0, 1.0), BoundaryCondition::Periodic, 15, 17).unwrap(),
            build_basis(&dom, BoundaryCondition::Dirichlet, 15, 17).unwrap(),
            build_basis(&DomainSpec::rectangle(1.0, 1.5), BoundaryCondition::Dirichlet, 30, 9).unwrap(),
        ];
        for (bi, basis) in bases.iter().enumerate() {
            let coeffs = random_coeffs(basis, time, bi as u64);
            let u = inverse_transform(&coeffs, basis, &time).unwrap();
            let back = forward_transform(&u, basis).unwrap();
            let err = coeffs.data().iter().zip(back.data()).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            let tol = if basis.is_analytic() { 1e-12 } else { 1e-9 };
            assert!(err < tol, "basis {bi}: {err}");
            // Parseval, with the direct double sum as oracle.
            let modal = coeffs.norm_sqr();
            let grid = u.l2_norm().powi(2);
            assert!((modal - grid).abs() < 1e-10 * modal, "basis {bi}: {modal} vs {grid}");
        }
    }

    #[test]
    fn projection_matches_direct_sum() {
        let time = TimeGrid::new(1.0, 4).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let basis = build_basis(&DomainSpec::rectangle(1.0, 2.0), bc, 12, 7).unwrap();
            let u = random_field(&basis, time, 9);
            let coeffs = forward_transform(&u, &basis).unwrap();
            // Direct double sum oracle.
            let w = basis.grid().weights();
            let nt = 4;
            for k in 0..basis.len() {
                let phi = basis.mode_vector(k);
                for m in 0..nt {
                    let mut acc = ZERO;
                    for i in 0..nt {
                        let mut ck = ZERO;
                        for j in 0..w.len() {
                            ck += u.at(i, j) * w[j] * phi[j];
                        }
                        acc += ck * Complex64::from_polar(1.0, -2.0 * PI * (m * i) as f64 / nt as f64);
                    }
                    acc *= 1.0f64.sqrt() / nt as f64;
                    assert!((acc - coeffs.get(k, m)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn multiplier_examples() {
        let half = FractionalParams::new(0.5).unwrap();
        assert!((multiplier_value(&half, 0.0, 4.0, Power::Positive).unwrap() - c(2.0)).norm() < 1e-15);
        let v = multiplier_value(&half, 1.0, 0.0, Power::Positive).unwrap();
        assert!((v - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        let p = FractionalParams::new(0.3).unwrap();
        let v = multiplier_value(&p, 1.0, 1.0, Power::Negative).unwrap();
        // Polar form evaluated independently.
        let expect = Complex64::new(2f64.powf(-0.15) * (0.3 * PI / 4.0).cos(), -(2f64.powf(-0.15)) * (0.3 * PI / 4.0).sin());
        assert!((v - expect).norm() < 1e-14);
        assert!((v - Complex64::new(0.8763, -0.2104)).norm() < 1e-4);
        assert_eq!(multiplier_value(&p, 0.0, 0.0, Power::Negative), Err(Error::SingularMode { mode: 0, frequency: 0 }));
        let v1 = multiplier_value(&p, -2.0, 3.0, Power::Positive).unwrap();
        let v2 = multiplier_value(&p, 2.0, 3.0, Power::Positive).unwrap();
        assert!((v1 - v2.conj()).norm() < 1e-15);
    }

    #[test]
    fn flux_constant_values() {
        let p = FractionalParams::new(0.5).unwrap();
        assert_relative_eq!(p.flux_constant(), 1.0, max_relative = 1e-14);
        assert_eq!(p.a(), 0.0);
        let q = FractionalParams::new(0.25).unwrap();
        assert_relative_eq!(q.flux_constant(), gamma(0.75) * 2f64.sqrt() / gamma(0.25), max_relative = 1e-14);
    }

    #[test]
    fn reflections() {
        let time = TimeGrid::new(1.0, 2).unwrap();
        let grid = SpaceGrid::uniform(0.0, 1.0, 11).unwrap();
        let u = SpaceTimeField::from_real_fn(time, grid.clone(), |_, x| x[0]);
        let odd = odd_extension(&u).unwrap();
        for j in 0..odd.grid().len() {
            let x = odd.grid().point(j)[0];
            assert!((odd.at(0, j).re - x).abs() < 1e-15);
        }
        let one = SpaceTimeField::from_real_fn(time, grid.clone(), |_, _| 1.0);
        let even = even_extension(&one).unwrap();
        assert!(even.values().iter().all(|v| *v == c(1.0)));
        let back = restrict_reflection(&odd, &grid, Parity::Odd).unwrap();
        assert!(back.max_abs_diff(&u) < 1e-15);
        let g2 = SpaceGrid::new(vec![
            Axis { origin: 0.0, length: 1.0, nodes: 3, periodic: false },
            Axis { origin: 0.0, length: 1.0, nodes: 3, periodic: false },
        ])
        .unwrap();
        assert!(matches!(odd_extension(&SpaceTimeField::zeros(time, g2)), Err(Error::Unsupported(_))));
    }
}
