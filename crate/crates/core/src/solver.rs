//! `H^s = (∂t + L)^s` and its inverse by spectral multipliers, the
//! `Dom(H^s)` norm and form, and the subordination-integral inverse.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::gamma;
use crate::spectral::{
    bin_multiplier, check_same_grids, forward_transform, inverse_transform, FractionalParams, ModalCoefficients, Power,
    SpaceTimeField, SpectralBasis, TimeGrid, ZERO,
};

/// Treatment of the `λ = 0` mode (Neumann / periodic).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanPolicy {
    /// Remove the spatial mean, warn when it exceeds 1e-12, report it.
    #[default]
    Project,
    /// Refuse data with a nonzero mean (`SingularMode`).
    Strict,
}

/// Trapezoid rule on `σ = ln τ`, anchored at a split point `τ*`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct QuadratureSpec {
    /// `τ*`; defaults to `1/λ_min` (smallest positive eigenvalue).
    pub split: Option<f64>,
    pub nodes_per_decade: usize,
    /// Minimum decades below `τ*`; more are added when `|ζ|τ_lo` is not small.
    pub decades_below: u32,
    pub decades_above: u32,
    /// Per-mode tolerance, relative to `|ζ|^{-s}`.
    pub tolerance: f64,
    /// Fraction of the period used by the wrap-around check.
    pub window_padding: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            split: None,
            nodes_per_decade: 40,
            decades_below: 6,
            decades_above: 2,
            tolerance: 1e-11,
            window_padding: 0.25,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let total = self.nodes_per_decade * (self.decades_below + self.decades_above) as usize;
        if total < 16 {
            return Err(Error::invalid(format!("quadrature needs ≥ 16 nodes, got {total}")));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be positive"));
        }
        if let Some(t) = self.split {
            if !(t > 0.0) {
                return Err(Error::invalid("split point must be positive"));
            }
        }
        if !(self.window_padding > 0.0 && self.window_padding < 1.0) {
            return Err(Error::invalid("window padding must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolvePath {
    Multiplier,
    Subordination(QuadratureSpec),
}

#[derive(Debug, Clone)]
pub struct SolveRequest<'a> {
    pub forcing: &'a SpaceTimeField,
    pub params: FractionalParams,
    pub basis: &'a SpectralBasis,
    pub path: SolvePath,
    pub mean_policy: MeanPolicy,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: SpaceTimeField,
    /// Largest `|mean_Ω u(t)|` removed from the input (0 without a zero mode).
    pub removed_mean: f64,
}

/// Remove `λ = 0` content from modal data. Returns the largest spatial mean
/// over time that was removed.
pub(crate) fn project_zero_modes(
    coeffs: &mut ModalCoefficients,
    basis: &SpectralBasis,
    input: &SpaceTimeField,
    policy: MeanPolicy,
) -> Result<f64> {
    let zeros = basis.zero_modes();
    if zeros.is_empty() {
        return Ok(0.0);
    }
    let w = input.grid().weights();
    let volume: f64 = w.iter().sum();
    let mut removed = 0.0f64;
    for i in 0..input.time().samples() {
        let mean: Complex64 = input.slice(i).iter().zip(&w).map(|(u, w)| u * w).sum::<Complex64>() / volume;
        removed = removed.max(mean.norm());
    }
    let scale = input.max_abs().max(f64::MIN_POSITIVE);
    if policy == MeanPolicy::Strict && removed > 1e-12 * scale.max(1.0) {
        let k = zeros[0];
        let nt = coeffs.time().samples();
        let bin = (0..nt).max_by(|&a, &b| coeffs.get(k, a).norm().total_cmp(&coeffs.get(k, b).norm())).unwrap_or(0);
        return Err(Error::SingularMode { mode: k, frequency: bin });
    }
    if removed > 1e-12 {
        log::warn!("removed spatial mean of magnitude {removed:.3e} (λ = 0 mode)");
    }
    for &k in &zeros {
        for bin in 0..coeffs.time().samples() {
            coeffs.set(k, bin, ZERO);
        }
    }
    Ok(removed)
}

/// Multiply every `(k, m)` coefficient by `(iρ_m + λ_k)^{±s}`.
pub fn apply_power(
    u: &SpaceTimeField,
    params: &FractionalParams,
    basis: &SpectralBasis,
    power: Power,
    policy: MeanPolicy,
) -> Result<Solution> {
    let mut coeffs = forward_transform(u, basis)?;
    let removed = project_zero_modes(&mut coeffs, basis, u, policy)?;
    let time = *u.time();
    let nt = time.samples();
    let zeros = basis.zero_modes();
    for (k, &lambda) in basis.eigenvalues().iter().enumerate() {
        if zeros.contains(&k) {
            continue;
        }
        for bin in 0..nt {
            let v = coeffs.get(k, bin);
            if v == ZERO {
                continue;
            }
            let m = bin_multiplier(params, &time, bin, lambda, power)?;
            coeffs.set(k, bin, v * m);
        }
    }
    let field = inverse_transform(&coeffs, basis, &time)?;
    Ok(Solution { field, removed_mean: removed })
}

/// `H^s u`.
pub fn apply_hs(u: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<SpaceTimeField> {
    Ok(apply_power(u, params, basis, Power::Positive, MeanPolicy::Project)?.field)
}

/// `H^{-s} f` by the multiplier path.
pub fn solve_hs(f: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<SpaceTimeField> {
    Ok(apply_power(f, params, basis, Power::Negative, MeanPolicy::Project)?.field)
}

pub fn solve(request: &SolveRequest<'_>) -> Result<Solution> {
    match request.path {
        SolvePath::Multiplier => {
            apply_power(request.forcing, &request.params, request.basis, Power::Negative, request.mean_policy)
        }
        SolvePath::Subordination(quad) => {
            subordination_solve(request.forcing, &request.params, request.basis, &quad, request.mean_policy)
        }
    }
}

/// Refuse windows where `e^{-λ_min T·padding}` exceeds 1e-10.
pub fn check_window(basis: &SpectralBasis, time: &TimeGrid, padding: f64) -> Result<()> {
    let lmin = basis
        .smallest_positive_eigenvalue()
        .ok_or_else(|| Error::invalid("basis has no positive eigenvalue"))?;
    let wrap_mass = (-lmin * time.period() * padding).exp();
    let threshold = 1e-10;
    if wrap_mass > threshold {
        return Err(Error::WindowTooSmall { wrap_mass, threshold });
    }
    Ok(())
}

/// The `σ = ln τ` grid shared by the subordination and kernel paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub sigma_lo: f64,
    pub h: f64,
    pub intervals: usize,
}

impl LogGrid {
    pub fn tau_lo(&self) -> f64 {
        self.sigma_lo.exp()
    }

    pub fn sigma(&self, j: usize) -> f64 {
        self.sigma_lo + self.h * j as f64
    }

    pub fn refined(&self) -> LogGrid {
        LogGrid { sigma_lo: self.sigma_lo, h: 0.5 * self.h, intervals: 2 * self.intervals }
    }

    /// Grid for modes with `|ζ| ≤ zeta_max`, smallest positive eigenvalue `lmin`.
    pub fn build(spec: &QuadratureSpec, lmin: f64, zeta_max: f64) -> LogGrid {
        let ln10 = core::f64::consts::LN_10;
        let split = spec.split.unwrap_or(1.0 / lmin);
        let h = ln10 / spec.nodes_per_decade as f64;
        // Keep |ζ|·τ_lo ≤ 0.5 so the analytic tail series converges fast.
        let need_below = ((2.0 * zeta_max * split).log10().ceil()).max(0.0) as u32;
        let below = spec.decades_below.max(need_below);
        // e^{-λ_min τ_hi} ≤ e^{-40} beyond the top of the grid.
        let need_above = ((40.0 / (lmin * split)).log10().ceil()).max(1.0) as u32;
        let above = spec.decades_above.max(need_above);
        let intervals = (below + above) as usize * spec.nodes_per_decade;
        LogGrid { sigma_lo: split.ln() - below as f64 * ln10, h, intervals }
    }
}

/// `∫₀^{τ_lo} τ^{s-1} e^{-τζ} dτ` by its power series.
pub(crate) fn lower_tail(s: f64, zeta: Complex64, tau_lo: f64) -> Complex64 {
    let x = -zeta * tau_lo;
    let mut term = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(1.0 / s, 0.0);
    for n in 1..200 {
        term = term * x / n as f64;
        let add = term / (n as f64 + s);
        acc += add;
        if add.norm() < 1e-18 * acc.norm() {
            break;
        }
    }
    acc * tau_lo.powf(s)
}

/// Euler–Maclaurin corrected trapezoid of `f(σ) = e^{sσ - ζe^σ}` over the grid.
fn trapezoid_gamma(s: f64, zeta: Complex64, grid: &LogGrid) -> Complex64 {
    let f = |sigma: f64| (Complex64::new(s * sigma, 0.0) - zeta * sigma.exp()).exp();
    let mut acc = ZERO;
    for j in 0..=grid.intervals {
        let v = f(grid.sigma(j));
        acc += if j == 0 || j == grid.intervals { v * 0.5 } else { v };
    }
    let h = grid.h;
    let e = zeta * grid.sigma_lo.exp();
    let f0 = f(grid.sigma_lo);
    let d = Complex64::new(s, 0.0) - e;
    let d1 = d * f0;
    let d3 = (d * d * d - e * d * 3.0 - e) * f0;
    acc * h + d1 * (h * h / 12.0) - d3 * (h.powi(4) / 720.0)
}

/// `Γ(s)·(ζ)^{-s}` by quadrature, refining `h` until two levels agree.
pub(crate) fn gamma_integral(s: f64, zeta: Complex64, grid: &LogGrid, tol: f64) -> Result<Complex64> {
    let tail = lower_tail(s, zeta, grid.tau_lo());
    let scale = zeta.norm().powf(-s) * gamma(s);
    let mut g = *grid;
    let mut prev = trapezoid_gamma(s, zeta, &g) + tail;
    for _ in 0..6 {
        g = g.refined();
        let next = trapezoid_gamma(s, zeta, &g) + tail;
        if (next - prev).norm() <= tol * scale {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence(format!(
        "subordination integral for ζ = {zeta} did not reach {tol:.1e}"
    )))
}

fn subordination_solve(
    f: &SpaceTimeField,
    params: &FractionalParams,
    basis: &SpectralBasis,
    quad: &QuadratureSpec,
    policy: MeanPolicy,
) -> Result<Solution> {
    quad.validate()?;
    let time = *f.time();
    check_window(basis, &time, quad.window_padding)?;
    let mut coeffs = forward_transform(f, basis)?;
    let removed = project_zero_modes(&mut coeffs, basis, f, policy)?;
    let s = params.s();
    let lmin = basis.smallest_positive_eigenvalue().unwrap_or(1.0);
    let nt = time.samples();
    let zeros = basis.zero_modes();
    let mut zeta_max = 0.0f64;
    for (k, &lambda) in basis.eigenvalues().iter().enumerate() {
        for bin in 0..nt {
            if coeffs.get(k, bin) != ZERO && !zeros.contains(&k) {
                zeta_max = zeta_max.max(lambda.hypot(time.frequency(bin)));
            }
        }
    }
    let grid = LogGrid::build(quad, lmin, zeta_max.max(lmin));
    let inv_gamma = 1.0 / gamma(s);
    for (k, &lambda) in basis.eigenvalues().iter().enumerate() {
        if zeros.contains(&k) {
            continue;
        }
        for bin in 0..nt {
            let v = coeffs.get(k, bin);
            if v == ZERO {
                continue;
            }
            let zeta = Complex64::new(lambda, time.frequency(bin));
            let mut m = gamma_integral(s, zeta, &grid, quad.tolerance)? * inv_gamma;
            if time.is_nyquist(bin) {
                m = Complex64::new(m.re, 0.0);
            }
            coeffs.set(k, bin, v * m);
        }
    }
    let field = inverse_transform(&coeffs, basis, &time)?;
    Ok(Solution { field, removed_mean: removed })
}

/// `H^{-s} f = Γ(s)^{-1} ∫₀^∞ e^{-τL} f(t-τ) τ^{s-1} dτ`, computed modally.
pub fn subordination_inverse(
    f: &SpaceTimeField,
    params: &FractionalParams,
    basis: &SpectralBasis,
    quad: &QuadratureSpec,
) -> Result<SpaceTimeField> {
    Ok(subordination_solve(f, params, basis, quad, MeanPolicy::Project)?.field)
}

fn weighted_modal_sum(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    basis: &SpectralBasis,
    weight: impl Fn(usize, usize, f64) -> Result<Complex64>,
) -> Result<Complex64> {
    check_same_grids(u, v)?;
    let cu = forward_transform(u, basis)?;
    let cv = if core::ptr::eq(u, v) { cu.clone() } else { forward_transform(v, basis)? };
    let zeros = basis.zero_modes();
    let nt = u.time().samples();
    let mut acc = ZERO;
    for (k, &lambda) in basis.eigenvalues().iter().enumerate() {
        if zeros.contains(&k) {
            continue;
        }
        for bin in 0..nt {
            let a = cu.get(k, bin);
            if a == ZERO {
                continue;
            }
            acc += weight(k, bin, lambda)? * a * cv.get(k, bin).conj();
        }
    }
    Ok(acc)
}

/// `Σ |iρ_m + λ_k|^s |û_k(ρ_m)|²` (the squared `Dom(H^s)` norm); the `λ = 0`
/// mode is excluded under the zero-mean convention.
pub fn dom_norm_sqr(u: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<f64> {
    let time = *u.time();
    let s = params.s();
    let v = weighted_modal_sum(u, u, basis, |_, bin, lambda| {
        let z = lambda.hypot(time.frequency(bin));
        let w = if s == 0.0 { 1.0 } else if z == 0.0 { 0.0 } else { z.powf(s) };
        Ok(Complex64::new(w, 0.0))
    })?;
    Ok(v.re.max(0.0))
}

pub fn dom_norm(u: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<f64> {
    Ok(dom_norm_sqr(u, params, basis)?.sqrt())
}

/// `⟨H^s u, v⟩ = Σ (iρ + λ)^s û conj(v̂)`.
pub fn bilinear_form(u: &SpaceTimeField, v: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<Complex64> {
    let time = *u.time();
    weighted_modal_sum(u, v, basis, |_, bin, lambda| bin_multiplier(params, &time, bin, lambda, Power::Positive))
}

/// Relative residual `‖H^s u − f‖ / ‖f‖` on the truncated mode set.
pub fn residual(u: &SpaceTimeField, f: &SpaceTimeField, params: &FractionalParams, basis: &SpectralBasis) -> Result<f64> {
    let hu = apply_hs(u, params, basis)?;
    let mut cf = forward_transform(f, basis)?;
    project_zero_modes(&mut cf, basis, f, MeanPolicy::Project)?;
    let pf = inverse_transform(&cf, basis, f.time())?;
    let diff = hu.combine(Complex64::new(1.0, 0.0), &pf, Complex64::new(-1.0, 0.0))?;
    let denom = pf.l2_norm();
    Ok(if denom == 0.0 { diff.l2_norm() } else { diff.l2_norm() / denom })
}

/// All modal multipliers `(k, bin) → (iρ + λ_k)^{±s}` (zero modes set to 0).
pub fn multiplier_table(params: &FractionalParams, basis: &SpectralBasis, time: &TimeGrid, power: Power) -> Result<Vec<Complex64>> {
    let nt = time.samples();
    let zeros = basis.zero_modes();
    let mut out = Vec::with_capacity(basis.len() * nt);
    for (k, &lambda) in basis.eigenvalues().iter().enumerate() {
        for bin in 0..nt {
            out.push(if zeros.contains(&k) { ZERO } else { bin_multiplier(params, time, bin, lambda, power)? });
        }
    }
    Ok(out)
}
