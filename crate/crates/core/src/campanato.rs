//! Local least-squares fits over parabolic cylinders `Q_r = (t−r², t+r²) × B_r(x)`
//! clipped to the sampled window, and the exponents, gradients and boundary
//! profiles derived from them.
//!
//! Time is treated as continuous: the data are linear between time samples
//! and each clipped time cell contributes two Gauss points. Space uses the
//! grid nodes in the closed ball.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, fit_line, LineFit};
use crate::spectral::{SpaceGrid, SpaceTimeField};

/// Real samples `u(t_i, x_j)`, time-major, on strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    times: Vec<f64>,
    grid: SpaceGrid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(times: Vec<f64>, grid: SpaceGrid, values: Vec<f64>) -> Result<Self> {
        if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("times must be strictly increasing with at least 2 entries"));
        }
        if values.len() != times.len() * grid.len() {
            return Err(Error::mismatch("sample count does not match the grids"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples must be finite"));
        }
        Ok(SampledField { times, grid, values })
    }

    /// Real parts on the (non-periodic) window `[0, T − dt]`.
    pub fn from_field(u: &SpaceTimeField) -> Result<Self> {
        SampledField::new(u.time().times(), u.grid().clone(), u.real_parts())
    }

    pub fn from_fn<F: FnMut(f64, [f64; 2]) -> f64>(times: Vec<f64>, grid: SpaceGrid, mut f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(times.len() * grid.len());
        for &t in &times {
            for j in 0..grid.len() {
                values.push(f(t, grid.point(j)));
            }
        }
        SampledField::new(times, grid, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.len() + j]
    }

    pub fn duration(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }

    pub fn diameter(&self) -> f64 {
        self.grid.axes().iter().map(|a| a.length * a.length).sum::<f64>().sqrt()
    }

    /// `r₀ = min(|I|^{1/2}, diam Ω)`.
    pub fn max_radius(&self) -> f64 {
        self.duration().sqrt().min(self.diameter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Center {
    pub t: f64,
    pub x: [f64; 2],
}

impl Center {
    pub fn new(t: f64, x: [f64; 2]) -> Self {
        Center { t, x }
    }
}

/// A virtual time sample: `(1−θ) u_i + θ u_{i+1}` with quadrature weight `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TimePoint {
    cell: usize,
    theta: f64,
    weight: f64,
}

/// `Q_r(center) ∩ (I × Ω)` as virtual time points times grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicCylinder {
    pub center: Center,
    pub r: f64,
    time: Vec<TimePoint>,
    space: Vec<usize>,
}

impl ParabolicCylinder {
    pub fn new(field: &SampledField, center: Center, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid("cylinder radius must be positive"));
        }
        let (lo, hi) = (center.t - r * r, center.t + r * r);
        let mut time = Vec::new();
        let g = 0.5 / 3f64.sqrt();
        for (cell, w) in field.times.windows(2).enumerate() {
            let a = w[0].max(lo);
            let b = w[1].min(hi);
            if b > a {
                let len = b - a;
                let mid = 0.5 * (a + b);
                for t in [mid - g * len, mid + g * len] {
                    time.push(TimePoint { cell, theta: (t - w[0]) / (w[1] - w[0]), weight: 0.5 * len });
                }
            }
        }
        let space = ball_nodes(&field.grid, center.x, r);
        Ok(ParabolicCylinder { center, r, time, space })
    }

    /// Number of virtual samples.
    pub fn len(&self) -> usize {
        self.time.len() * self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space_nodes(&self) -> &[usize] {
        &self.space
    }

    /// Grid samples `(t_i, x_j)` inside the closed cylinder.
    pub fn grid_samples(&self, field: &SampledField) -> usize {
        let (lo, hi) = (self.center.t - self.r * self.r, self.center.t + self.r * self.r);
        field.times.iter().filter(|&&t| t >= lo && t <= hi).count() * self.space.len()
    }

    /// `(weight, value, node)` for every virtual sample.
    fn samples<'a>(&'a self, field: &'a SampledField) -> impl Iterator<Item = (f64, f64, usize)> + 'a {
        self.time.iter().flat_map(move |tp| {
            self.space.iter().map(move |&j| {
                let u0 = field.at(tp.cell, j);
                let u1 = field.at(tp.cell + 1, j);
                (tp.weight, u0 + tp.theta * (u1 - u0), j)
            })
        })
    }
}

/// Grid nodes in the closed ball, relative tolerance 1e-12 on `r²`.
fn ball_nodes(grid: &SpaceGrid, x0: [f64; 2], r: f64) -> Vec<usize> {
    let axes = grid.axes();
    let range = |d: usize| {
        let ax = axes[d];
        let h = ax.spacing();
        let lo = (((x0[d] - r - ax.origin) / h).floor() - 1.0).max(0.0) as usize;
        let hi = ((((x0[d] + r - ax.origin) / h).ceil() + 1.0).max(0.0) as usize).min(ax.nodes - 1);
        (lo, hi)
    };
    let r2 = r * r * (1.0 + 1e-12);
    let mut out = Vec::new();
    let (xl, xh) = range(0);
    if grid.dim() == 1 {
        for i in xl..=xh {
            let d = axes[0].coord(i) - x0[0];
            if d * d <= r2 {
                out.push(i);
            }
        }
    } else {
        let (yl, yh) = range(1);
        for i in xl..=xh {
            let dx = axes[0].coord(i) - x0[0];
            for j in yl..=yh {
                let dy = axes[1].coord(j) - x0[1];
                if dx * dx + dy * dy <= r2 {
                    out.push(grid.flatten(i, j));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FitClass {
    Constant,
    Linear,
}

impl FitClass {
    pub fn name(self) -> &'static str {
        match self {
            FitClass::Constant => "constant",
            FitClass::Linear => "linear",
        }
    }

    fn unknowns(self, dim: usize) -> usize {
        match self {
            FitClass::Constant => 1,
            FitClass::Linear => dim + 1,
        }
    }
}

/// `coefficients` is `[c]` or `[a₀, a₁, (a₂)]` for `P(z) = a₀ + Σ aᵢ(zᵢ − x₀ᵢ)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CampanatoFit {
    pub class: FitClass,
    pub center: Center,
    pub r: f64,
    pub coefficients: Vec<f64>,
    /// Root mean square residual with respect to the cylinder measure.
    pub rms: f64,
    pub samples: usize,
}

/// Grid samples in the cylinder must reach the fit dimension plus two.
fn check_count(field: &SampledField, cyl: &ParabolicCylinder, class: FitClass) -> Result<()> {
    let required = class.unknowns(field.grid.dim()) + 2;
    let found = cyl.grid_samples(field);
    if found < required || cyl.is_empty() {
        return Err(Error::TooFewSamples { found, required });
    }
    Ok(())
}

/// Reference value subtracted before accumulating, so constant data fit exactly.
fn reference(field: &SampledField, cyl: &ParabolicCylinder) -> f64 {
    cyl.samples(field).next().map_or(0.0, |(_, u, _)| u)
}

pub fn fit_constant(field: &SampledField, center: Center, r: f64) -> Result<CampanatoFit> {
    let cyl = ParabolicCylinder::new(field, center, r)?;
    fit_constant_on(field, &cyl)
}

pub fn fit_constant_on(field: &SampledField, cyl: &ParabolicCylinder) -> Result<CampanatoFit> {
    check_count(field, cyl, FitClass::Constant)?;
    let u_ref = reference(field, cyl);
    let (mut sw, mut su) = (0.0, 0.0);
    for (w, u, _) in cyl.samples(field) {
        sw += w;
        su += w * (u - u_ref);
    }
    let c = u_ref + su / sw;
    let ss: f64 = cyl.samples(field).map(|(w, u, _)| w * (u - c) * (u - c)).sum();
    Ok(CampanatoFit {
        class: FitClass::Constant,
        center: cyl.center,
        r: cyl.r,
        coefficients: vec![c],
        rms: (ss / sw).sqrt(),
        samples: cyl.len(),
    })
}

pub fn fit_linear(field: &SampledField, center: Center, r: f64) -> Result<CampanatoFit> {
    let cyl = ParabolicCylinder::new(field, center, r)?;
    fit_linear_on(field, &cyl)
}

/// Normal equations in `ξ = (z − x₀)/r`, solved by Cholesky.
pub fn fit_linear_on(field: &SampledField, cyl: &ParabolicCylinder) -> Result<CampanatoFit> {
    let dim = field.grid.dim();
    check_count(field, cyl, FitClass::Linear)?;
    let n = dim + 1;
    let u_ref = reference(field, cyl);
    let row = |j: usize| {
        let p = field.grid.point(j);
        let mut out = [1.0, 0.0, 0.0];
        for d in 0..dim {
            out[d + 1] = (p[d] - cyl.center.x[d]) / cyl.r;
        }
        out
    };
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    let mut sw = 0.0;
    for (w, u, j) in cyl.samples(field) {
        let x = row(j);
        sw += w;
        for p in 0..n {
            b[p] += w * x[p] * (u - u_ref);
            for q in 0..n {
                a[p * n + q] += w * x[p] * x[q];
            }
        }
    }
    cholesky_solve(&mut a, &mut b, n, 1e-10)
        .ok_or_else(|| Error::RankDeficient(format!("spatial design degenerate at r = {}", cyl.r)))?;
    let ss: f64 = cyl
        .samples(field)
        .map(|(w, u, j)| {
            let x = row(j);
            let p: f64 = (0..n).map(|k| b[k] * x[k]).sum();
            w * (u - u_ref - p) * (u - u_ref - p)
        })
        .sum();
    let mut coefficients = b;
    coefficients[0] += u_ref;
    for c in coefficients.iter_mut().skip(1) {
        *c /= cyl.r;
    }
    Ok(CampanatoFit {
        class: FitClass::Linear,
        center: cyl.center,
        r: cyl.r,
        coefficients,
        rms: (ss.max(0.0) / sw).sqrt(),
        samples: cyl.len(),
    })
}

pub fn fit(field: &SampledField, center: Center, r: f64, class: FitClass) -> Result<CampanatoFit> {
    match class {
        FitClass::Constant => fit_constant(field, center, r),
        FitClass::Linear => fit_linear(field, center, r),
    }
}

/// Dyadic radii `r₀/2^j`, `j = 1..J`, with `J` the largest index whose cylinder
/// still holds `min_samples` grid samples.
pub fn dyadic_radii(field: &SampledField, center: Center, min_samples: usize) -> Vec<f64> {
    let r0 = field.max_radius();
    let mut out = Vec::new();
    for j in 1..=40 {
        let r = r0 / (1u64 << j) as f64;
        match ParabolicCylinder::new(field, center, r) {
            Ok(c) if c.grid_samples(field) >= min_samples => out.push(r),
            _ => break,
        }
    }
    out
}

/// Default sample floor for [`dyadic_radii`].
pub const MIN_CYLINDER_SAMPLES: usize = 30;
/// Minimum `R²` for an exponent to be reported.
pub const R_SQUARED_GATE: f64 = 0.98;
/// Minimum number of scales for an exponent to be reported.
pub const MIN_SCALES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExponentEstimate {
    pub class: FitClass,
    pub center: Center,
    pub radii: Vec<f64>,
    pub rms: Vec<f64>,
    /// log-log regression over the scales with `rms > 0`.
    pub line: Option<LineFit>,
    /// Slope: `β̂` for the constant class, `1 + β̂` for the linear class.
    /// `None` unless `R² ≥ 0.98` over at least 4 scales.
    pub exponent: Option<f64>,
    pub dropped_zero_scales: usize,
    /// All scales fitted exactly; the exponent is unbounded.
    pub exact_fit: bool,
}

fn exact_threshold(field: &SampledField) -> f64 {
    1e-13 * field.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE)
}

pub fn exponent_estimate(field: &SampledField, center: Center, radii: &[f64], class: FitClass) -> Result<ExponentEstimate> {
    let r0 = field.max_radius();
    if radii.len() < MIN_SCALES {
        return Err(Error::invalid(format!("need at least {MIN_SCALES} radii, got {}", radii.len())));
    }
    if let Some(r) = radii.iter().find(|&&r| r > r0 * (1.0 + 1e-12)) {
        return Err(Error::invalid(format!("radius {r} exceeds r₀ = {r0}")));
    }
    let mut rms = Vec::with_capacity(radii.len());
    for &r in radii {
        rms.push(fit(field, center, r, class)?.rms);
    }
    let tiny = exact_threshold(field);
    let keep: Vec<usize> = (0..radii.len()).filter(|&i| rms[i] > tiny).collect();
    let dropped_zero_scales = radii.len() - keep.len();
    let exact_fit = keep.is_empty();
    let lx: Vec<f64> = keep.iter().map(|&i| radii[i].ln()).collect();
    let ly: Vec<f64> = keep.iter().map(|&i| rms[i].ln()).collect();
    let line = fit_line(&lx, &ly);
    let exponent = line.filter(|l| keep.len() >= MIN_SCALES && l.r_squared >= R_SQUARED_GATE).map(|l| l.slope);
    Ok(ExponentEstimate { class, center, radii: radii.to_vec(), rms, line, exponent, dropped_zero_scales, exact_fit })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradientEstimate {
    pub center: Center,
    /// `(r, [a₁, a₂])` from largest to smallest radius.
    pub per_radius: Vec<(f64, Vec<f64>)>,
    /// Slope coefficients at the smallest radius.
    pub smallest: Vec<f64>,
    /// `(4a(r/2) − a(r))/3` on the two smallest radii; `None` when flagged.
    pub estimate: Option<Vec<f64>>,
    pub flag: Option<String>,
}

/// Slope coefficients of linear fits across `radii`, extrapolated to `r → 0`.
pub fn gradient_reconstruct(field: &SampledField, center: Center, radii: &[f64]) -> Result<GradientEstimate> {
    if radii.len() < 2 {
        return Err(Error::invalid("gradient reconstruction needs at least 2 radii"));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut per_radius = Vec::with_capacity(sorted.len());
    for &r in &sorted {
        let f = fit_linear(field, center, r)?;
        per_radius.push((r, f.coefficients[1..].to_vec()));
    }
    let n = per_radius.len();
    let last = per_radius[n - 1].1.clone();
    let prev = per_radius[n - 2].1.clone();
    let dim = last.len();
    let diff = |a: &[f64], b: &[f64]| (0..dim).map(|d| (a[d] - b[d]).abs()).fold(0.0, f64::max);
    let scale = last.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d_last = diff(&last, &prev);
    let settled = d_last <= 1e-10 + 1e-8 * scale;
    let mut flag = None;
    if !settled && n >= 3 {
        let d_prev = diff(&prev, &per_radius[n - 3].1);
        if d_last > 0.9 * d_prev {
            flag = Some(format!("slope coefficients not converging: differences {d_prev:.3e} then {d_last:.3e}"));
        }
    }
    let estimate = flag.is_none().then(|| (0..dim).map(|d| (4.0 * last[d] - prev[d]) / 3.0).collect());
    Ok(GradientEstimate { center, per_radius, smallest: last, estimate, flag })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum BoundaryModel {
    PurePower,
    PowerPlusXlog,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundaryFit {
    pub model: BoundaryModel,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    /// `|u| ≈ A d^γ`.
    pub gamma: f64,
    pub power_coefficient: f64,
    /// `u ≈ A d log(1/d) + B d`.
    pub xlog_coefficients: [f64; 2],
    /// Relative rms residuals `‖u − model‖/‖u‖` of the two models.
    pub power_residual: f64,
    pub xlog_residual: f64,
    pub preferred: BoundaryModel,
    pub warning: Option<String>,
}

impl BoundaryFit {
    pub fn power_model(&self, d: f64) -> f64 {
        self.power_coefficient * d.powf(self.gamma)
    }

    pub fn xlog_model(&self, d: f64) -> f64 {
        self.xlog_coefficients[0] * d * (1.0 / d).ln() + self.xlog_coefficients[1] * d
    }
}

/// Fit the profile along the inward ray from boundary node `node` in grid
/// direction `step` (e.g. `[1, 0]`), at time sample `time_index`, using the
/// `samples` nodes closest to the boundary.
pub fn boundary_profile_fit(
    field: &SampledField,
    time_index: usize,
    node: usize,
    step: [i64; 2],
    samples: usize,
    model: BoundaryModel,
) -> Result<BoundaryFit> {
    if samples < 8 {
        return Err(Error::TooFewSamples { found: samples, required: 8 });
    }
    if time_index >= field.times.len() {
        return Err(Error::invalid("time index out of range"));
    }
    let grid = &field.grid;
    if !grid.is_boundary(node) {
        return Err(Error::invalid("start node is not on the boundary"));
    }
    let [ix, iy] = grid.unflatten(node);
    let axes = grid.axes();
    let h = (0..grid.dim()).map(|d| (step[d] as f64 * axes[d].spacing()).powi(2)).sum::<f64>().sqrt();
    if h == 0.0 {
        return Err(Error::invalid("ray direction is zero"));
    }
    let max_d = 0.5 * field.max_radius();
    let base = field.at(time_index, node);
    let mut distances = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for k in 1..=samples as i64 {
        let i = ix as i64 + k * step[0];
        let j = iy as i64 + k * step[1];
        let inside = i >= 0 && (i as usize) < axes[0].nodes && (grid.dim() == 1 || (j >= 0 && (j as usize) < axes[1].nodes));
        let d = k as f64 * h;
        if !inside || d > max_d * (1.0 + 1e-12) {
            return Err(Error::TooFewSamples { found: (k - 1) as usize, required: samples });
        }
        let idx = if grid.dim() == 1 { i as usize } else { grid.flatten(i as usize, j as usize) };
        distances.push(d);
        values.push(field.at(time_index, idx) - base);
    }
    fit_boundary_samples(distances, values, model)
}

/// Same fits for explicit `(d, u)` samples (`u` already relative to the boundary value).
pub fn fit_boundary_samples(distances: Vec<f64>, values: Vec<f64>, model: BoundaryModel) -> Result<BoundaryFit> {
    if distances.len() < 8 || values.len() != distances.len() {
        return Err(Error::TooFewSamples { found: distances.len().min(values.len()), required: 8 });
    }
    if distances.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::invalid("boundary distances must be positive"));
    }
    let pos = values.iter().filter(|v| **v > 0.0).count();
    let neg = values.iter().filter(|v| **v < 0.0).count();
    let warning = (pos > 0 && neg > 0).then(|| String::from("sign changes along the ray; fitting |u|"));
    if values.iter().any(|v| *v == 0.0) {
        return Err(Error::invalid("zero sample along the ray; pure-power fit undefined"));
    }
    let lx: Vec<f64> = distances.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = values.iter().map(|v| v.abs().ln()).collect();
    let line = fit_line(&lx, &ly).ok_or_else(|| Error::RankDeficient("boundary power fit".into()))?;
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let power_coefficient = line.intercept.exp();
    let power_residual = distances
        .iter()
        .zip(&values)
        .map(|(d, v)| (v.abs() - power_coefficient * d.powf(line.slope)).powi(2))
        .sum::<f64>()
        .sqrt()
        / norm;
    // u ≈ A d log(1/d) + B d; columns scaled for conditioning.
    let mut ata = [0.0; 4];
    let mut atb = [0.0; 2];
    for (d, v) in distances.iter().zip(&values) {
        let r = [d * (1.0 / d).ln(), *d];
        for i in 0..2 {
            for j in 0..2 {
                ata[i * 2 + j] += r[i] * r[j];
            }
            atb[i] += r[i] * v;
        }
    }
    let xlog_coefficients = if cholesky_solve(&mut ata, &mut atb, 2, 1e-14).is_some() { atb } else { [f64::NAN; 2] };
    let xlog_residual = distances
        .iter()
        .zip(&values)
        .map(|(d, v)| (v - xlog_coefficients[0] * d * (1.0 / d).ln() - xlog_coefficients[1] * d).powi(2))
        .sum::<f64>()
        .sqrt()
        / norm;
    let preferred = if xlog_residual < power_residual { BoundaryModel::PowerPlusXlog } else { BoundaryModel::PurePower };
    Ok(BoundaryFit {
        model,
        distances,
        values,
        gamma: line.slope,
        power_coefficient,
        xlog_coefficients,
        power_residual,
        xlog_residual,
        preferred,
        warning,
    })
}

/// Maximum number of sample pairs visited by [`holder_seminorm`] before striding.
pub const MAX_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HolderReport {
    pub beta: f64,
    /// `sup |u(p) − u(q)| / max(|t−τ|^{1/2}, |x−z|)^β`.
    pub parabolic: f64,
    /// `sup_x sup |u(t,x) − u(τ,x)| / |t−τ|^{(1+β)/2}`.
    pub time_seminorm: f64,
    /// Parabolic `β`-seminorm of the reconstructed gradient, if requested.
    pub gradient_seminorm: Option<f64>,
    pub stride: usize,
    pub pairs: usize,
}

impl HolderReport {
    /// `[u]_{L^∞_x C^{(1+β)/2}_t} + [∇u]_{C^{β/2,β}}`.
    pub fn intermediate(&self) -> Option<f64> {
        self.gradient_seminorm.map(|g| g + self.time_seminorm)
    }
}

/// Points visited with stride `k` (in flattened `(t, x)` order) so that at
/// most [`MAX_PAIRS`] pairs remain; `k = 1` for small fields.
fn pair_stride(points: usize) -> usize {
    let pairs = points * points.saturating_sub(1) / 2;
    if pairs <= MAX_PAIRS {
        1
    } else {
        ((pairs as f64 / MAX_PAIRS as f64).sqrt().ceil()) as usize
    }
}

fn parabolic_sup(coords: &[(f64, [f64; 2])], vals: &[Vec<f64>], beta: f64, stride: usize) -> (f64, usize) {
    let idx: Vec<usize> = (0..coords.len()).step_by(stride).collect();
    let mut sup = 0.0f64;
    let mut pairs = 0;
    for (a, &p) in idx.iter().enumerate() {
        for &q in &idx[a + 1..] {
            let (tp, xp) = coords[p];
            let (tq, xq) = coords[q];
            let dx = ((xp[0] - xq[0]).powi(2) + (xp[1] - xq[1]).powi(2)).sqrt();
            let dist = (tp - tq).abs().sqrt().max(dx);
            if dist == 0.0 {
                continue;
            }
            let du = vals.iter().map(|v| (v[p] - v[q]).abs()).fold(0.0, f64::max);
            sup = sup.max(du / dist.powf(beta));
            pairs += 1;
        }
    }
    (sup, pairs)
}

/// Discrete Hölder seminorms over sample pairs. With `gradient_radius`, the
/// gradient is reconstructed by linear fits at that radius on every
/// `gradient_stride`-th node and its parabolic seminorm is added.
pub fn holder_seminorm(
    field: &SampledField,
    beta: f64,
    gradient_radius: Option<(f64, usize)>,
) -> Result<HolderReport> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::invalid("β must lie in (0, 1]"));
    }
    let nx = field.grid.len();
    let nt = field.times.len();
    let coords: Vec<(f64, [f64; 2])> =
        (0..nt).flat_map(|i| (0..nx).map(move |j| (i, j))).map(|(i, j)| (field.times[i], field.grid.point(j))).collect();
    let stride = pair_stride(coords.len());
    let (parabolic, pairs) = parabolic_sup(&coords, &[field.values.clone()], beta, stride);

    let expo = 0.5 * (1.0 + beta);
    let tstride = pair_stride(nt).max(1);
    let mut time_seminorm = 0.0f64;
    for j in 0..nx {
        for a in (0..nt).step_by(tstride) {
            for b in (a + tstride..nt).step_by(tstride) {
                let dt = field.times[b] - field.times[a];
                time_seminorm = time_seminorm.max((field.at(b, j) - field.at(a, j)).abs() / dt.powf(expo));
            }
        }
    }

    let gradient_seminorm = match gradient_radius {
        None => None,
        Some((r, gstride)) => {
            let dim = field.grid.dim();
            let mut gc = Vec::new();
            let mut gv = vec![Vec::new(); dim];
            for &(t, x) in coords.iter().step_by(gstride.max(1)) {
                let f = fit_linear(field, Center::new(t, x), r)?;
                gc.push((t, x));
                for d in 0..dim {
                    gv[d].push(f.coefficients[d + 1]);
                }
            }
            let s = pair_stride(gc.len());
            Some(parabolic_sup(&gc, &gv, beta, s).0)
        }
    };
    Ok(HolderReport { beta, parabolic, time_seminorm, gradient_seminorm, stride, pairs })
}

/// `sup_r rms(r)² / r^{2β}` (constant class) or `/ r^{2(1+β)}` (linear class)
/// over the given centers and radii.
pub fn campanato_constant(field: &SampledField, centers: &[Center], radii: &[f64], class: FitClass, beta: f64) -> Result<f64> {
    let power = match class {
        FitClass::Constant => 2.0 * beta,
        FitClass::Linear => 2.0 * (1.0 + beta),
    };
    let mut sup = 0.0f64;
    for c in centers {
        for &r in radii {
            let f = fit(field, *c, r, class)?;
            sup = sup.max(f.rms * f.rms / r.powf(power));
        }
    }
    Ok(sup)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegularityReport {
    pub center: Center,
    pub exponent: ExponentEstimate,
    pub gradient: Option<GradientEstimate>,
    pub boundary: Option<BoundaryFit>,
    /// The boundary data prefer the `d log(1/d)` model.
    pub log_term: bool,
    pub scale_range: (f64, f64),
}

/// Dyadic radii, exponent regression and (linear class) gradient at one center.
pub fn regularity_report(
    field: &SampledField,
    center: Center,
    class: FitClass,
    boundary: Option<BoundaryFit>,
) -> Result<RegularityReport> {
    let radii = dyadic_radii(field, center, MIN_CYLINDER_SAMPLES);
    if radii.len() < MIN_SCALES {
        return Err(Error::TooFewSamples { found: radii.len(), required: MIN_SCALES });
    }
    let exponent = exponent_estimate(field, center, &radii, class)?;
    let gradient = match class {
        FitClass::Linear => Some(gradient_reconstruct(field, center, &radii)?),
        FitClass::Constant => None,
    };
    let log_term = boundary.as_ref().is_some_and(|b| b.preferred == BoundaryModel::PowerPlusXlog);
    let scale_range = (radii[radii.len() - 1], radii[0]);
    Ok(RegularityReport { center, exponent, gradient, boundary, log_term, scale_range })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize) -> SpaceGrid {
        SpaceGrid::uniform(0.0, 1.0, n).unwrap()
    }

    fn times(n: usize, t: f64) -> Vec<f64> {
        (0..n).map(|i| t * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constant_and_time_fields() {
        let f = SampledField::from_fn(times(65, 1.0), grid1(65), |_, _| 5.0).unwrap();
        let c = fit_constant(&f, Center::new(0.5, [0.5, 0.0]), 0.2).unwrap();
        assert!((c.coefficients[0] - 5.0).abs() < 1e-14 && c.rms < 1e-14);
        let f = SampledField::from_fn(times(65, 1.0), grid1(65), |t, _| t).unwrap();
        for r in [0.1, 0.25, 0.3] {
            let c = fit_constant(&f, Center::new(0.5, [0.5, 0.0]), r).unwrap();
            assert!((c.rms - r * r / 3f64.sqrt()).abs() < 1e-12, "{r}: {}", c.rms);
            let l = fit_linear(&f, Center::new(0.5, [0.5, 0.0]), r).unwrap();
            assert!((l.coefficients[0] - 0.5).abs() < 1e-12);
            assert!((l.rms - r * r / 3f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_fits_and_rank() {
        let f = SampledField::from_fn(times(9, 1.0), grid1(33), |_, x| 3.0 + 2.0 * x[0]).unwrap();
        let l = fit_linear(&f, Center::new(0.5, [0.4, 0.0]), 0.3).unwrap();
        assert!(l.rms < 1e-13);
        assert!((l.coefficients[0] - 3.8).abs() < 1e-12 && (l.coefficients[1] - 2.0).abs() < 1e-12);
        // One spatial node only: no slope information.
        let fine = SampledField::from_fn(times(4097, 1.0), grid1(33), |t, x| t + x[0]).unwrap();
        let e = fit_linear(&fine, Center::new(0.5, [0.5, 0.0]), 0.03);
        assert!(matches!(e, Err(Error::RankDeficient(_))));
        let e = fit_constant(&f, Center::new(0.5, [0.5, 0.0]), 1e-4);
        assert!(matches!(e, Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn exponents_and_gradient() {
        let g = SpaceGrid::uniform(0.0, 1.0, 1025).unwrap();
        let f = SampledField::from_fn(times(257, 1.0), g.clone(), |_, x| (x[0] - 0.5).abs().powf(0.6)).unwrap();
        let c = Center::new(0.5, [0.5, 0.0]);
        let radii = dyadic_radii(&f, c, MIN_CYLINDER_SAMPLES);
        assert!(radii.len() >= 4);
        let e = exponent_estimate(&f, c, &radii, FitClass::Constant).unwrap();
        assert!((e.exponent.unwrap() - 0.6).abs() < 0.05, "{e:?}");
        let f = SampledField::from_fn(times(257, 1.0), g.clone(), |_, x| x[0] * x[0]).unwrap();
        let gr = gradient_reconstruct(&f, Center::new(0.5, [0.3, 0.0]), &radii).unwrap();
        assert!((gr.estimate.unwrap()[0] - 0.6).abs() < 1e-3);
        let f = SampledField::from_fn(times(17, 1.0), g, |_, x| 1.0 + x[0]).unwrap();
        let e = exponent_estimate(&f, c, &radii, FitClass::Linear).unwrap();
        assert!(e.exact_fit && e.exponent.is_none());
    }

    #[test]
    fn boundary_models() {
        let d: Vec<f64> = (1..=8).map(|k| k as f64 * 1e-3).collect();
        let b = fit_boundary_samples(d.clone(), d.iter().map(|d| d.powf(0.6)).collect(), BoundaryModel::PurePower).unwrap();
        assert!((b.gamma - 0.6).abs() < 1e-12);
        let b = fit_boundary_samples(d.clone(), d.iter().map(|d| d * (1.0 / d).ln()).collect(), BoundaryModel::PowerPlusXlog)
            .unwrap();
        assert!(b.xlog_residual < 0.1 * b.power_residual);
        assert_eq!(b.preferred, BoundaryModel::PowerPlusXlog);
    }

    #[test]
    fn seminorms() {
        let f = SampledField::from_fn(times(9, 1.0), grid1(33), |_, x| x[0]).unwrap();
        let h = holder_seminorm(&f, 1.0, None).unwrap();
        assert!((h.parabolic - 1.0).abs() < 1e-12);
        assert_eq!(h.time_seminorm, 0.0);
        let f = SampledField::from_fn(times(9, 1.0), grid1(33), |_, _| 2.0).unwrap();
        let h = holder_seminorm(&f, 0.5, Some((0.2, 7))).unwrap();
        assert_eq!((h.parabolic, h.gradient_seminorm), (0.0, Some(0.0)));
        assert_eq!(pair_stride(10), 1);
        assert!(pair_stride(100_000) > 1);
    }
}
