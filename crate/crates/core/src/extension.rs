//! Extension `U(t, x, y)` of boundary data `u` in the extra variable `y`,
//! with weight `y^a`, `a = 1 − 2s`, the weighted Neumann flux and the PDE
//! residual check.
//!
//! Each space-time mode with `ζ = λ_k + iρ_m` is carried by the profile
//!
//! ```text
//! ψ(y; ζ) = Γ(s)^{-1} ∫₀^∞ e^{-r} e^{-ζy²/(4r)} r^{s-1} dr = 2 q^{s/2} K_s(2√q) / Γ(s),  q = ζy²/4.
//! ```

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::lu_solve;
use crate::special::gamma;
use crate::spectral::{
    forward_transform, inverse_transform, FractionalParams, SpaceGrid, SpaceTimeField, SpectralBasis,
    TimeGrid, ZERO,
};

/// `0 = y₀ < … < y_M`, graded so `z = (y/(1−a))^{1−a}` is uniform.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct YGrid {
    nodes: Vec<f64>,
    height: f64,
    grading: f64,
}

impl YGrid {
    pub fn graded(params: &FractionalParams, height: f64, levels: usize) -> Result<Self> {
        if levels < 4 {
            return Err(Error::invalid("y-grid needs at least 4 levels"));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::invalid("y-grid height must be positive"));
        }
        let grading = 1.0 / (1.0 - params.a());
        let nodes = (0..=levels).map(|l| height * (l as f64 / levels as f64).powf(grading)).collect();
        Ok(YGrid { nodes, height, grading })
    }

    /// `3/√λ₁` with `λ₁` the smallest positive eigenvalue.
    pub fn default_height(basis: &SpectralBasis) -> f64 {
        3.0 / basis.smallest_positive_eigenvalue().unwrap_or(1.0).sqrt()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn levels(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    /// `z_l = (y_l/(1−a))^{1−a}`.
    pub fn z(&self, l: usize) -> f64 {
        let one_minus_a = 1.0 / self.grading;
        (self.nodes[l] / one_minus_a).powf(one_minus_a)
    }

    /// Whether `y₁ ≤ tol^{1/(1−a)}`.
    pub fn resolves(&self, tol: f64) -> bool {
        self.nodes[1] <= tol.powf(self.grading)
    }
}

/// Trapezoid settings for `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ProfileQuadrature {
    /// Absolute tolerance on `ψ` between successive halvings.
    pub tolerance: f64,
    pub max_halvings: usize,
    /// Modes with `|û| ≤ cutoff·max|û|` are not extended.
    pub coefficient_cutoff: f64,
}

impl Default for ProfileQuadrature {
    fn default() -> Self {
        ProfileQuadrature { tolerance: 1e-14, max_halvings: 8, coefficient_cutoff: 1e-15 }
    }
}

/// `K_s(w)` for `Re w > 0` by the trapezoid rule on `∫₀^∞ e^{-w cosh σ} cosh(sσ) dσ`.
fn bessel_k_integral(s: f64, w: Complex64, h0: f64, tol: f64, max_halvings: usize) -> Result<Complex64> {
    let re = w.re;
    if !(re > 0.0) {
        return Err(Error::invalid(format!("K_s needs Re w > 0, got {w}")));
    }
    // Truncate where the integrand is e^{-45} below its value at σ = 0,
    // allowing for the cosh(sσ) growth.
    let mut sig_max = (1.0 + 45.0f64 / re).acosh().max(1.0);
    sig_max = (1.0 + (45.0 + s * sig_max) / re).acosh().max(1.0);
    let g = |sigma: f64| (-w * sigma.cosh()).exp() * (s * sigma).cosh();
    let mut h = h0;
    let mut n = (sig_max / h).ceil() as usize;
    h = sig_max / n as f64;
    let mut sum = g(0.0) * 0.5;
    for j in 1..=n {
        sum += g(j as f64 * h);
    }
    let mut prev = sum * h;
    for _ in 0..max_halvings {
        let mut mids = ZERO;
        for j in 0..n {
            mids += g((j as f64 + 0.5) * h);
        }
        sum += mids;
        h *= 0.5;
        n *= 2;
        let next = sum * h;
        if (next - prev).norm() <= tol * next.norm().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence(format!("K_s({w}) did not converge")))
}

/// `ψ(y; ζ)`; `ψ(0; ζ) = 1` exactly and `ψ(y; 0) = 1`.
pub fn psi(params: &FractionalParams, zeta: Complex64, y: f64, quad: &ProfileQuadrature) -> Result<Complex64> {
    if y == 0.0 || zeta == ZERO {
        return Ok(Complex64::new(1.0, 0.0));
    }
    if zeta.re < 0.0 {
        return Err(Error::invalid("ψ needs Re ζ ≥ 0"));
    }
    let s = params.s();
    let q = zeta * (y * y / 4.0);
    let sq = q.sqrt();
    let w = sq * 2.0;
    if w.re > 740.0 {
        return Ok(ZERO);
    }
    // Strip half-width π/2 − |arg w|, and resolve the peak width ~ 1/√|w|.
    let strip = PI / 2.0 - w.arg().abs();
    let h0 = (strip / 6.0).min(1.0 / w.norm().sqrt()).min(0.25);
    let k = bessel_k_integral(s, w, h0, quad.tolerance.min(1e-13), quad.max_halvings)?;
    // q^{s/2} through the principal square root.
    let qs2 = (sq.ln() * s).exp();
    Ok(qs2 * k * (2.0 / gamma(s)))
}

/// `U(t_i, x_j, y_l)`, stored level-major (each level is a time-major slab).
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionField {
    time: TimeGrid,
    grid: SpaceGrid,
    ygrid: YGrid,
    params: FractionalParams,
    values: Vec<Complex64>,
}

impl ExtensionField {
    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn grid(&self) -> &SpaceGrid {
        &self.grid
    }

    pub fn ygrid(&self) -> &YGrid {
        &self.ygrid
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    fn slab(&self) -> usize {
        self.time.samples() * self.grid.len()
    }

    pub fn level(&self, l: usize) -> &[Complex64] {
        let n = self.slab();
        &self.values[l * n..(l + 1) * n]
    }

    pub fn level_field(&self, l: usize) -> SpaceTimeField {
        SpaceTimeField::from_values(self.time, self.grid.clone(), self.level(l).to_vec()).expect("consistent slab")
    }

    pub fn at(&self, l: usize, i: usize, j: usize) -> Complex64 {
        self.values[l * self.slab() + i * self.grid.len() + j]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Add `c · y^{1−a}/(1−a)`, an explicit solution with flux `−c`.
    pub fn add_null_flux(&mut self, c: f64) {
        let one_minus_a = 1.0 - self.params.a();
        let n = self.slab();
        for l in 0..self.ygrid.nodes.len() {
            let add = c * self.ygrid.nodes[l].powf(one_minus_a) / one_minus_a;
            for v in &mut self.values[l * n..(l + 1) * n] {
                *v += add;
            }
        }
    }

    /// Build from explicit level data (mainly for tests and file input).
    pub fn from_levels(
        time: TimeGrid,
        grid: SpaceGrid,
        ygrid: YGrid,
        params: FractionalParams,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if values.len() != (ygrid.levels() + 1) * time.samples() * grid.len() {
            return Err(Error::mismatch("extension values do not match the grids"));
        }
        Ok(ExtensionField { time, grid, ygrid, params, values })
    }
}

/// Modal extension: mode `(k, m)` is multiplied by `ψ(y_l; iρ_m + λ_k)`.
pub fn extend_field(
    u: &SpaceTimeField,
    params: &FractionalParams,
    basis: &SpectralBasis,
    ygrid: &YGrid,
    quad: &ProfileQuadrature,
) -> Result<ExtensionField> {
    let time = *u.time();
    let coeffs = forward_transform(u, basis)?;
    let nt = time.samples();
    let cmax = coeffs.data().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let active: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|k| (0..nt).map(move |b| (k, b)))
        .filter(|&(k, b)| {
            let v = coeffs.get(k, b).norm();
            v > 0.0 && v > quad.coefficient_cutoff * cmax
        })
        .collect();
    let slab = nt * u.grid().len();
    let mut values = vec![ZERO; slab * (ygrid.levels() + 1)];
    values[..slab].copy_from_slice(u.values());
    let mut level_coeffs = crate::spectral::ModalCoefficients::zeros(time, basis.len());
    for l in 1..=ygrid.levels() {
        let y = ygrid.nodes()[l];
        level_coeffs.data_mut().iter_mut().for_each(|v| *v = ZERO);
        for &(k, b) in &active {
            let zeta = Complex64::new(basis.eigenvalues()[k], time.frequency(b));
            let mut p = psi(params, zeta, y, quad)?;
            if time.is_nyquist(b) {
                p = Complex64::new(p.re, 0.0);
            }
            level_coeffs.set(k, b, coeffs.get(k, b) * p);
        }
        let field = inverse_transform(&level_coeffs, basis, &time)?;
        values[l * slab..(l + 1) * slab].copy_from_slice(field.values());
    }
    Ok(ExtensionField { time, grid: u.grid().clone(), ygrid: ygrid.clone(), params: *params, values })
}

/// Result of the weighted-flux extraction.
#[derive(Debug, Clone)]
pub struct FluxEstimate {
    /// `−lim y^a ∂_y U`.
    pub flux: SpaceTimeField,
    /// `flux / (Γ(1−s)/(4^{s−1/2}Γ(s)))`, an estimate of `H^s u`.
    pub hs_estimate: SpaceTimeField,
    pub stencil_points: usize,
    pub exponents: Vec<f64>,
    /// `max|est_J − est_{J−1}| / max|est_J|`, an accuracy indicator.
    pub lower_order_difference: f64,
    pub warning: Option<String>,
}

/// Exponents of the small-`y` expansion `U = Σ c_e y^e`, skipping values
/// within 0.05 of an earlier one (near `s = 1` where `2s ≈ 2`).
pub fn expansion_exponents(s: f64, count: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(count);
    let mut j = 0;
    while out.len() < count {
        for e in [2.0 * j as f64, 2.0 * j as f64 + 2.0 * s] {
            if out.len() < count && out.iter().all(|&p| (p - e).abs() >= 0.05) {
                out.push(e);
            }
        }
        j += 1;
    }
    out
}

/// Weights `w_l` on `y_0..y_{J-1}` with `Σ w_l y_l^e = δ_{e,2s}` for the
/// expansion exponents.
pub fn flux_stencil(s: f64, ys: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let j = ys.len();
    let exps = expansion_exponents(s, j);
    let scale = ys[j - 1];
    let mut a = vec![0.0; j * j];
    for (r, &e) in exps.iter().enumerate() {
        for (c, &y) in ys.iter().enumerate() {
            let yy = y / scale;
            a[r * j + c] = if e == 0.0 { 1.0 } else if yy == 0.0 { 0.0 } else { yy.powf(e) };
        }
    }
    let target = exps.iter().position(|&e| e == 2.0 * s).expect("2s is always kept");
    let mut b = vec![0.0; j];
    b[target] = 1.0;
    lu_solve(&mut a, &mut b, j).ok_or_else(|| Error::RankDeficient("flux stencil".into()))?;
    // Undo the scaling: coefficient of y^{2s} = Σ w̃_l U_l / scale^{2s}.
    let f = scale.powf(-2.0 * s);
    Ok((b.into_iter().map(|w| w * f).collect(), exps))
}

/// Estimate `H^s u` from `−y^a ∂_y U` at `y = 0`, using a one-sided stencil
/// on the first `points` levels that is exact for the known expansion.
pub fn neumann_flux(ext: &ExtensionField, points: usize) -> Result<FluxEstimate> {
    let s = ext.params.s();
    if points < 3 || points > ext.ygrid.levels() + 1 {
        return Err(Error::invalid(format!("flux stencil needs 3..={} points", ext.ygrid.levels() + 1)));
    }
    let estimate = |j: usize| -> Result<Vec<Complex64>> {
        let (w, _) = flux_stencil(s, &ext.ygrid.nodes()[..j])?;
        let slab = ext.slab();
        let mut out = vec![ZERO; slab];
        for (l, wl) in w.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(ext.level(l)) {
                *o += v * *wl;
            }
        }
        // flux = −2s · (coefficient of y^{2s})
        out.iter_mut().for_each(|v| *v *= -2.0 * s);
        Ok(out)
    };
    let main = estimate(points)?;
    let lower = estimate(points - 1)?;
    let scale = main.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let diff = main.iter().zip(&lower).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    let lower_order_difference = if scale > 0.0 { diff / scale } else { diff };
    let c = ext.params.flux_constant();
    let flux = SpaceTimeField::from_values(ext.time, ext.grid.clone(), main)?;
    let hs_estimate = flux.scaled(Complex64::new(1.0 / c, 0.0));
    let warning = (!ext.ygrid.resolves(1e-3)).then(|| {
        format!(
            "y₁ = {:.3e} exceeds 1e-3^(1/(1−a)) = {:.3e}; stencil/lower-order difference {:.2e}",
            ext.ygrid.nodes()[1],
            1e-3f64.powf(ext.ygrid.grading()),
            lower_order_difference
        )
    });
    let (_, exponents) = flux_stencil(s, &ext.ygrid.nodes()[..points])?;
    Ok(FluxEstimate { flux, hs_estimate, stencil_points: points, exponents, lower_order_difference, warning })
}

/// Default stencil size for [`neumann_flux`].
pub const DEFAULT_FLUX_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PdeResidualReport {
    /// Max |residual| over the checked window.
    pub max_residual: f64,
    /// `max_residual / max|U|`.
    pub relative_residual: f64,
    /// Max |residual| over all interior levels `2 ≤ l ≤ M − 1`.
    pub max_residual_all_levels: f64,
    /// Levels with `z_l ≥ window_fraction · z_M` are checked.
    pub window_fraction: f64,
    pub nodes_checked: usize,
}

/// Second-order residual of `∂_t U + L_x U − z^α U_zz`, `α = −2a/(1−a)`,
/// which is the extension equation written in the uniform variable `z`.
/// Time differences are periodic; `x` uses interior nodes only.
pub fn verify_extension_pde(ext: &ExtensionField, basis: &SpectralBasis, window_fraction: f64) -> Result<PdeResidualReport> {
    if basis.grid() != ext.grid() {
        return Err(Error::mismatch("extension grid differs from the basis grid"));
    }
    if basis.grid().axes().iter().any(|a| a.periodic) {
        return Err(Error::unsupported("PDE residual on periodic grids"));
    }
    let diffusivities = basis.axis_diffusivities().ok_or_else(|| {
        Error::unsupported("numeric bases need verify_extension_pde_with_coefficient")
    })?;
    let grid = basis.grid().clone();
    let axes = grid.axes().iter().zip(diffusivities).map(|(ax, c)| (ax.spacing(), vec![c; ax.nodes - 1])).collect();
    residual_with(ext, &SpaceStencil { axes, grid }, window_fraction)
}

/// Three-point conservative `L_x` with `A` at cell midpoints (per axis).
struct SpaceStencil {
    axes: Vec<(f64, Vec<f64>)>,
    grid: SpaceGrid,
}

impl SpaceStencil {
    /// `(L_x U)(x_j)` for the slice starting at `offset`.
    fn apply(&self, level: &[Complex64], offset: usize, j: usize) -> Complex64 {
        let [ix, iy] = self.grid.unflatten(j);
        let mut out = ZERO;
        for (d, (h, amid)) in self.axes.iter().enumerate() {
            let (i, step) = if d == 0 {
                (ix, if self.grid.dim() == 2 { self.grid.axes()[1].nodes } else { 1 })
            } else {
                (iy, 1)
            };
            let u0 = level[offset + j];
            let up = level[offset + j + step];
            let um = level[offset + j - step];
            out -= ((up - u0) * amid[i] - (u0 - um) * amid[i - 1]) / (h * h);
        }
        out
    }
}

/// [`verify_extension_pde`] with an explicit scalar coefficient `A(x)` (1D),
/// as needed for finite-difference bases.
pub fn verify_extension_pde_with_coefficient<F: Fn(f64) -> f64>(
    ext: &ExtensionField,
    basis: &SpectralBasis,
    coefficient: F,
    window_fraction: f64,
) -> Result<PdeResidualReport> {
    let ax = basis.grid().axes()[0];
    let h = ax.spacing();
    let mids = (0..ax.nodes - 1).map(|i| coefficient(ax.origin + (i as f64 + 0.5) * h)).collect();
    if basis.grid() != ext.grid() || basis.grid().dim() != 1 {
        return Err(Error::mismatch("explicit-coefficient residual needs the 1D basis grid"));
    }
    let stencil = SpaceStencil { axes: vec![(h, mids)], grid: basis.grid().clone() };
    residual_with(ext, &stencil, window_fraction)
}

fn residual_with(ext: &ExtensionField, stencil: &SpaceStencil, window_fraction: f64) -> Result<PdeResidualReport> {
    let grid = ext.grid();
    let a = ext.params.a();
    let alpha = -2.0 * a / (1.0 - a);
    let m = ext.ygrid.levels();
    let dz = ext.ygrid.z(m) / m as f64;
    let nt = ext.time.samples();
    let dt = ext.time.dt();
    let l_start = ((window_fraction * m as f64).ceil() as usize).max(2);
    let mut max_res = 0.0f64;
    let mut max_all = 0.0f64;
    let mut count = 0;
    for l in 2..m {
        let za = ext.ygrid.z(l).powf(alpha);
        for i in 0..nt {
            let ip = (i + 1) % nt;
            let im = (i + nt - 1) % nt;
            for j in 0..grid.len() {
                if grid.is_boundary(j) {
                    continue;
                }
                let ut = (ext.at(l, ip, j) - ext.at(l, im, j)) / (2.0 * dt);
                let uzz = (ext.at(l + 1, i, j) - ext.at(l, i, j) * 2.0 + ext.at(l - 1, i, j)) / (dz * dz);
                let lx = stencil.apply(ext.level(l), i * grid.len(), j);
                let r = (ut + lx - uzz * za).norm();
                max_all = max_all.max(r);
                if l >= l_start {
                    max_res = max_res.max(r);
                    count += 1;
                }
            }
        }
    }
    let scale = ext.max_abs();
    Ok(PdeResidualReport {
        max_residual: max_res,
        relative_residual: if scale > 0.0 { max_res / scale } else { max_res },
        max_residual_all_levels: max_all,
        window_fraction,
        nodes_checked: count,
    })
}
