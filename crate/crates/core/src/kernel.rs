//! Heat kernel `W_τ(x, z)` of `L`, the fundamental solution
//! `K_{-s}(τ, x, z) = χ_{τ>0} W_τ(x, z) τ^{s-1}/Γ(s)`, its Gaussian bound and a
//! kernel-convolution solve path.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::fft::{Direction, FftPlan};
use crate::solver::{check_window, QuadratureSpec};
use crate::special::gamma;
use crate::spectral::{BoundaryCondition, FractionalParams, SpaceTimeField, SpectralBasis, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum KernelRepresentation {
    Eigensum,
    /// Method of images (constant-coefficient interval, small τ).
    Images,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelEval {
    pub tau: f64,
    pub x: [f64; 2],
    pub z: [f64; 2],
    pub value: f64,
    pub modes_used: usize,
    pub truncation_bound: f64,
    pub representation: KernelRepresentation,
    /// Set when `τ ≤ 0` was mapped to 0 by the `χ_{τ>0}` convention.
    pub flagged: bool,
}

/// Truncated eigensum `Σ_{k<K} e^{-τλ_k} φ_k(x) φ_k(z)`, summed in ascending `k`.
pub fn heat_kernel(tau: f64, x: [f64; 2], z: [f64; 2], basis: &SpectralBasis, modes: usize) -> Result<KernelEval> {
    if !(tau > 0.0) {
        return Err(Error::invalid(alloc::format!("heat kernel needs τ > 0, got {tau}")));
    }
    let kk = modes.min(basis.len());
    let lam = basis.eigenvalues();
    let mut value = 0.0;
    let mut sup_phi = 0.0f64;
    for k in 0..kk {
        let a = basis.eval_mode(k, x);
        let b = basis.eval_mode(k, z);
        sup_phi = sup_phi.max(a.abs()).max(b.abs());
        value += (-tau * lam[k]).exp() * (a * b);
    }
    let truncation_bound = eigensum_tail_bound(tau, basis, kk, sup_phi);
    Ok(KernelEval {
        tau,
        x,
        z,
        value,
        modes_used: kk,
        truncation_bound,
        representation: KernelRepresentation::Eigensum,
        flagged: false,
    })
}

fn eigensum_tail_bound(tau: f64, basis: &SpectralBasis, used: usize, sup_phi: f64) -> f64 {
    let lam = basis.eigenvalues();
    let sup2 = match basis.constant_interval() {
        Some((_, l, _)) => 2.0 / l,
        None => sup_phi * sup_phi,
    };
    if used == 0 {
        return f64::INFINITY;
    }
    if let Some((_, l, c)) = basis.constant_interval() {
        // λ_j = c(jπ/L)²: the tail is dominated by a geometric series.
        let first = match basis.bc() {
            BoundaryCondition::Dirichlet => used as f64 + 1.0,
            _ => used as f64,
        };
        let lead = (-tau * c * (first * PI / l).powi(2)).exp();
        let ratio = (-tau * c * (2.0 * first + 1.0) * (PI / l).powi(2)).exp();
        return sup2 * lead / (1.0 - ratio).max(f64::MIN_POSITIVE);
    }
    // Generic: extrapolate the last gap.
    let last = lam[used - 1];
    let gap = if used >= 2 { (last - lam[used - 2]).max(f64::MIN_POSITIVE) } else { last.max(1.0) };
    let next = last + gap;
    sup2 * (-tau * next).exp() / (1.0 - (-tau * gap).exp()).max(f64::MIN_POSITIVE)
}

/// Continuous heat kernel of a constant-coefficient interval (analytic
/// bases), switching between images (small τ) and an adaptive eigensum.
/// Other bases fall back to [`heat_kernel`] over all modes.
pub fn heat_kernel_exact(tau: f64, x: [f64; 2], z: [f64; 2], basis: &SpectralBasis) -> Result<KernelEval> {
    if !(tau > 0.0) {
        return Err(Error::invalid(alloc::format!("heat kernel needs τ > 0, got {tau}")));
    }
    let Some((origin, length, c)) = basis.constant_interval() else {
        return heat_kernel(tau, x, z, basis, basis.len());
    };
    let (xr, zr) = (x[0] - origin, z[0] - origin);
    let sign = if basis.bc() == BoundaryCondition::Dirichlet { -1.0 } else { 1.0 };
    let scale = tau * c * (PI / length).powi(2);
    if scale < 1.0 {
        // Images: Σ_n G(x - z + 2nL) ± G(x + z + 2nL).
        let four_ct = 4.0 * c * tau;
        let norm = 1.0 / (PI * four_ct).sqrt();
        let reach = (60.0 * four_ct).sqrt();
        let nmax = (reach / (2.0 * length)).ceil() as i64 + 1;
        let mut value = 0.0;
        let mut terms = 0;
        for n in -nmax..=nmax {
            let shift = 2.0 * n as f64 * length;
            let a = xr - zr + shift;
            let b = xr + zr + shift;
            value += (-(a * a) / four_ct).exp() + sign * (-(b * b) / four_ct).exp();
            terms += 1;
        }
        return Ok(KernelEval {
            tau,
            x,
            z,
            value: value * norm,
            modes_used: terms,
            truncation_bound: norm * 2.0 * (-60.0f64).exp(),
            representation: KernelRepresentation::Images,
            flagged: false,
        });
    }
    // e^{-τλ_K} ≤ e^{-42}: K = L/π·sqrt(42/(cτ)) + 1.
    let kmax = ((length / PI) * (42.0 / (c * tau)).sqrt()).ceil() as usize + 1;
    let mut value = 0.0;
    let norm = 2.0 / length;
    let dir = basis.bc() == BoundaryCondition::Dirichlet;
    if !dir {
        value += 1.0 / length;
    }
    for j in 1..=kmax {
        let w = j as f64 * PI / length;
        let lam = c * w * w;
        let (a, b) = if dir { ((w * xr).sin(), (w * zr).sin()) } else { ((w * xr).cos(), (w * zr).cos()) };
        value += (-tau * lam).exp() * norm * (a * b);
    }
    let lead = (-tau * c * ((kmax + 1) as f64 * PI / length).powi(2)).exp();
    Ok(KernelEval {
        tau,
        x,
        z,
        value,
        modes_used: kmax + usize::from(!dir),
        truncation_bound: 2.0 * norm * lead,
        representation: KernelRepresentation::Eigensum,
        flagged: false,
    })
}

/// `K_{-s}(τ, x, z)`; `τ ≤ 0` gives 0 with the flag set.
pub fn eval_fundamental(tau: f64, x: [f64; 2], z: [f64; 2], params: &FractionalParams, basis: &SpectralBasis) -> Result<KernelEval> {
    if !(tau > 0.0) {
        return Ok(KernelEval {
            tau,
            x,
            z,
            value: 0.0,
            modes_used: 0,
            truncation_bound: 0.0,
            representation: KernelRepresentation::Eigensum,
            flagged: true,
        });
    }
    let mut w = heat_kernel_exact(tau, x, z, basis)?;
    let s = params.s();
    let factor = tau.powf(s - 1.0) / gamma(s);
    w.value *= factor;
    w.truncation_bound *= factor;
    Ok(w)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaussianBoundReport {
    pub points: usize,
    /// Fixed exponent constant `c` in `e^{-|x-z|²/(cτ)}`.
    pub c: f64,
    /// Smallest `C` with `K_{-s} ≤ C τ^{-(n/2+1-s)} e^{-|x-z|²/(cτ)}` on the grid.
    pub fitted_constant: f64,
    pub finite: bool,
    /// Dirichlet only: every point below the whole-line comparison kernel.
    pub dominated: Option<bool>,
    /// Dirichlet only: `max K_{-s}/G` over the grid.
    pub worst_ratio: Option<f64>,
    pub violations: usize,
    pub min_value: f64,
}

/// Fits `C` with `c = 4` over all `(τ, x, z)` combinations and, for
/// Dirichlet, checks domination by `(4πaτ)^{-1/2} τ^{s-1}/Γ(s) e^{-|x-z|²/(4aτ)}`.
pub fn gaussian_bound_check(
    params: &FractionalParams,
    basis: &SpectralBasis,
    taus: &[f64],
    xs: &[f64],
    zs: &[f64],
) -> Result<GaussianBoundReport> {
    if basis.grid().dim() != 1 || basis.bc() == BoundaryCondition::Periodic {
        return Err(Error::unsupported("Gaussian bound check expects a 1D Dirichlet or Neumann basis"));
    }
    let s = params.s();
    let c = 4.0;
    let a = basis.constant_interval().map(|(_, _, c)| c).unwrap_or(1.0);
    let dirichlet = basis.bc() == BoundaryCondition::Dirichlet;
    let mut fitted = 0.0f64;
    let mut worst = 0.0f64;
    let mut violations = 0;
    let mut points = 0;
    let mut min_value = f64::INFINITY;
    let gs = gamma(s);
    for &tau in taus {
        for &x in xs {
            for &z in zs {
                let k = eval_fundamental(tau, [x, 0.0], [z, 0.0], params, basis)?.value;
                points += 1;
                min_value = min_value.min(k);
                let d2 = (x - z) * (x - z);
                let unit = tau.powf(-(0.5 + 1.0 - s)) * (-d2 / (c * tau)).exp();
                if unit > 0.0 {
                    fitted = fitted.max(k / unit);
                }
                if dirichlet {
                    let g = (4.0 * PI * a * tau).powf(-0.5) * tau.powf(s - 1.0) / gs * (-d2 / (4.0 * a * tau)).exp();
                    if k > g * (1.0 + 1e-10) + 1e-14 {
                        violations += 1;
                    }
                    if g > 0.0 {
                        worst = worst.max(k / g);
                    }
                }
            }
        }
    }
    Ok(GaussianBoundReport {
        points,
        c,
        fitted_constant: fitted,
        finite: fitted.is_finite(),
        dominated: dirichlet.then_some(violations == 0),
        worst_ratio: dirichlet.then_some(worst),
        violations,
        min_value,
    })
}

/// `Σ_j w_j W_τ(x, z_j)`, i.e. `(e^{-τL}1)(x)` by grid quadrature.
pub fn kernel_mass(tau: f64, x: [f64; 2], basis: &SpectralBasis) -> Result<f64> {
    let grid = basis.grid();
    let mut acc = 0.0;
    for j in 0..grid.len() {
        acc += grid.weight(j) * heat_kernel_exact(tau, x, grid.point(j), basis)?.value;
    }
    Ok(acc)
}

/// `|∫ W_{τ1}(x, y) W_{τ2}(y, z) dy − W_{τ1+τ2}(x, z)|` with grid quadrature in `y`.
pub fn chapman_kolmogorov_defect(t1: f64, t2: f64, x: [f64; 2], z: [f64; 2], basis: &SpectralBasis) -> Result<f64> {
    let grid = basis.grid();
    let mut acc = 0.0;
    for j in 0..grid.len() {
        let y = grid.point(j);
        acc += grid.weight(j) * heat_kernel_exact(t1, x, y, basis)?.value * heat_kernel_exact(t2, y, z, basis)?.value;
    }
    Ok((acc - heat_kernel_exact(t1 + t2, x, z, basis)?.value).abs())
}

/// `u(t, x) = ∫∫ K_{-s}(τ, x, z) f(t − τ, z) dz dτ` with the discrete
/// eigensum kernel on the grid, an exact Fourier time shift and a
/// trapezoid rule in `σ = ln τ`.
pub fn convolve_kernel(
    f: &SpaceTimeField,
    params: &FractionalParams,
    basis: &SpectralBasis,
    quad: &QuadratureSpec,
) -> Result<SpaceTimeField> {
    quad.validate()?;
    if f.grid() != basis.grid() {
        return Err(Error::mismatch("forcing grid differs from the basis grid"));
    }
    let time = *f.time();
    check_window(basis, &time, quad.window_padding)?;
    let s = params.s();
    let nt = time.samples();
    let grid = basis.grid();
    let n = grid.len();
    let w = grid.weights();
    let zeros = basis.zero_modes();

    // Zero-mean projection under Neumann (the λ = 0 mode is excluded).
    let mut data = f.values().to_vec();
    if !zeros.is_empty() {
        let vol: f64 = w.iter().sum();
        let mut removed = 0.0f64;
        for i in 0..nt {
            let row = &mut data[i * n..(i + 1) * n];
            let mean: Complex64 = row.iter().zip(&w).map(|(u, w)| u * w).sum::<Complex64>() / vol;
            removed = removed.max(mean.norm());
            row.iter_mut().for_each(|v| *v -= mean);
        }
        if removed > 1e-12 {
            log::warn!("removed spatial mean of magnitude {removed:.3e} before kernel convolution");
        }
    }

    // Time spectrum per node: spec[bin][j].
    let plan = FftPlan::new(nt);
    let mut spec = vec![ZERO; nt * n];
    let mut col = vec![ZERO; nt];
    for j in 0..n {
        for i in 0..nt {
            col[i] = data[i * n + j];
        }
        plan.process(&mut col, Direction::Forward);
        for i in 0..nt {
            spec[i * n + j] = col[i] / nt as f64;
        }
    }
    let fmax = spec.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let active: Vec<usize> =
        (0..nt).filter(|&b| spec[b * n..(b + 1) * n].iter().any(|v| v.norm() > 1e-15 * fmax)).collect();
    if active.is_empty() || fmax == 0.0 {
        return Ok(SpaceTimeField::zeros(time, grid.clone()));
    }

    // Log grid: oscillation-resolving step, tail small enough for a first-order start.
    let lmin = basis.smallest_positive_eigenvalue().unwrap_or(1.0);
    let rho_max = active.iter().fold(0.0f64, |m, &b| m.max(time.frequency(b).abs()));
    let strip = PI / 2.0 - rho_max.atan2(lmin);
    let ln10 = core::f64::consts::LN_10;
    let h = (ln10 / quad.nodes_per_decade as f64).min(2.0 * PI * strip / 40.0);
    let split = quad.split.unwrap_or(1.0 / lmin);
    let lam_modes: Vec<(usize, f64)> =
        basis.eigenvalues().iter().copied().enumerate().filter(|(k, _)| !zeros.contains(k)).collect();
    // Content of f reaches at most the largest active (λ, ρ); keep |ζ|τ_lo ≤ 1e-9.
    let zeta_f = active_zeta_max(f, basis, &active, &spec, n).max(lmin);
    let below = (quad.decades_below as f64).max((zeta_f * split * 1e9).log10().ceil());
    let above = (quad.decades_above as f64).max((40.0 / (lmin * split)).log10().ceil());
    let sigma_lo = split.ln() - below * ln10;
    let sigma_hi = split.ln() + above * ln10;
    let intervals = ((sigma_hi - sigma_lo) / h).ceil() as usize;
    let h = (sigma_hi - sigma_lo) / intervals as f64;

    let phis: Vec<Vec<f64>> = lam_modes.iter().map(|&(k, _)| basis.mode_vector(k)).collect();
    let mut acc = vec![ZERO; nt * n];
    let mut kmat = vec![0.0; n * n];
    for jn in 0..=intervals {
        let sigma = sigma_lo + h * jn as f64;
        let tau = sigma.exp();
        let mut weight = tau.powf(s) * if jn == 0 || jn == intervals { 0.5 * h } else { h };
        if jn == 0 {
            // Euler–Maclaurin end correction for an integrand ≈ e^{sσ}·const.
            weight += tau.powf(s) * (h * h / 12.0 * s - h.powi(4) / 720.0 * s * s * s);
        }
        // K_τ[a][b] = Σ_k e^{-τλ_k} φ_k(x_a) φ_k(x_b) w_b
        kmat.iter_mut().for_each(|v| *v = 0.0);
        for ((_, lam), phi) in lam_modes.iter().zip(&phis) {
            let e = (-tau * lam).exp();
            if e < 1e-300 {
                continue;
            }
            for a in 0..n {
                let pa = e * phi[a];
                if pa == 0.0 {
                    continue;
                }
                let row = &mut kmat[a * n..(a + 1) * n];
                for b in 0..n {
                    row[b] += pa * phi[b] * w[b];
                }
            }
        }
        for &bin in &active {
            let rho = time.frequency(bin);
            let shift = if time.is_nyquist(bin) {
                Complex64::new((rho * tau).cos(), 0.0)
            } else {
                Complex64::from_polar(1.0, -rho * tau)
            };
            let fr = &spec[bin * n..(bin + 1) * n];
            let out = &mut acc[bin * n..(bin + 1) * n];
            let c = shift * weight;
            for a in 0..n {
                let row = &kmat[a * n..(a + 1) * n];
                let mut v = ZERO;
                for b in 0..n {
                    v += fr[b] * row[b];
                }
                out[a] += v * c;
            }
        }
    }
    // Lower tail: e^{-τL} f(t-τ) ≈ f(t) for τ < τ_lo.
    let tail = sigma_lo.exp().powf(s) / s;
    for &bin in &active {
        for j in 0..n {
            acc[bin * n + j] += spec[bin * n + j] * tail;
        }
    }
    let inv_gamma = 1.0 / gamma(s);
    let mut values = vec![ZERO; nt * n];
    for j in 0..n {
        for i in 0..nt {
            col[i] = acc[i * n + j];
        }
        plan.process(&mut col, Direction::Inverse);
        for i in 0..nt {
            values[i * n + j] = col[i] * inv_gamma;
        }
    }
    SpaceTimeField::from_values(time, grid.clone(), values)
}

fn active_zeta_max(f: &SpaceTimeField, basis: &SpectralBasis, active: &[usize], spec: &[Complex64], n: usize) -> f64 {
    // Largest |ζ| = |λ_k + iρ| over modes carrying non-negligible content.
    let time = f.time();
    let mut buf = vec![ZERO; basis.len()];
    let mut best = 0.0f64;
    let mut scale = 0.0f64;
    let mut per_bin = Vec::with_capacity(active.len());
    for &bin in active {
        basis.project_slice(&spec[bin * n..(bin + 1) * n], &mut buf);
        scale = buf.iter().fold(scale, |m, v| m.max(v.norm()));
        per_bin.push((bin, buf.clone()));
    }
    for (bin, coeffs) in per_bin {
        let rho = time.frequency(bin);
        for (k, c) in coeffs.iter().enumerate() {
            if c.norm() > 1e-13 * scale {
                best = best.max(basis.eigenvalues()[k].hypot(rho));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::solve_hs;
    use crate::spectral::{build_basis, inverse_transform, DomainSpec, ModalCoefficients, TimeGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dirichlet(k: usize, n: usize) -> SpectralBasis {
        build_basis(&DomainSpec::interval(PI), BoundaryCondition::Dirichlet, k, n).unwrap()
    }

    #[test]
    fn midpoint_value_matches_independent_sum() {
        let basis = dirichlet(50, 129);
        let v = heat_kernel(1.0, [PI / 2.0, 0.0], [PI / 2.0, 0.0], &basis, 50).unwrap();
        // 50-term oracle: φ_k(π/2)² = (2/π) sin²(kπ/2).
        let mut oracle = 0.0;
        for k in 1..=50 {
            let kk = k as f64;
            oracle += (-kk * kk).exp() * (2.0 / PI) * (kk * PI / 2.0).sin().powi(2);
        }
        assert!((v.value - oracle).abs() < 1e-15);
        assert!((v.value - 0.23428).abs() < 1e-5);
        let exact = heat_kernel_exact(1.0, [PI / 2.0, 0.0], [PI / 2.0, 0.0], &basis).unwrap();
        assert!((exact.value - oracle).abs() < 1e-14);
    }

    #[test]
    fn symmetry_and_decay() {
        let basis = dirichlet(40, 129);
        let a = heat_kernel(0.3, [0.4, 0.0], [2.1, 0.0], &basis, 40).unwrap();
        let b = heat_kernel(0.3, [2.1, 0.0], [0.4, 0.0], &basis, 40).unwrap();
        assert_eq!(a.value, b.value);
        let far = heat_kernel(30.0, [1.0, 0.0], [1.2, 0.0], &basis, 40).unwrap();
        assert!(far.value < 1e-12 && far.value > 0.0);
        assert!(heat_kernel(0.0, [1.0, 0.0], [1.0, 0.0], &basis, 4).is_err());
    }

    #[test]
    fn images_agree_with_eigensum_at_the_switch() {
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
            let basis = build_basis(&DomainSpec::interval(PI), bc, 20, 65).unwrap();
            for (x, z) in [(0.3, 0.5), (1.0, 2.9), (0.01, 3.0)] {
                // τ just below and above the representation switch (τ = 1 here).
                let a = heat_kernel_exact(0.999_999, [x, 0.0], [z, 0.0], &basis).unwrap();
                let b = heat_kernel_exact(1.000_001, [x, 0.0], [z, 0.0], &basis).unwrap();
                assert_eq!(a.representation, KernelRepresentation::Images);
                assert_eq!(b.representation, KernelRepresentation::Eigensum);
                assert!((a.value - b.value).abs() < 1e-6, "{bc:?}");
            }
        }
    }

    #[test]
    fn fundamental_solution_limits() {
        let basis = dirichlet(20, 65);
        let one = FractionalParams::with_closed_order(1.0).unwrap();
        let v = eval_fundamental(0.7, [1.0, 0.0], [1.5, 0.0], &one, &basis).unwrap();
        let w = heat_kernel_exact(0.7, [1.0, 0.0], [1.5, 0.0], &basis).unwrap();
        assert_eq!(v.value, w.value);
        let p = FractionalParams::new(0.5).unwrap();
        let neg = eval_fundamental(-1.0, [1.0, 0.0], [1.5, 0.0], &p, &basis).unwrap();
        assert!(neg.flagged && neg.value == 0.0);
        let tiny = eval_fundamental(1e-4, [1.0, 0.0], [1.5, 0.0], &p, &basis).unwrap();
        assert!(tiny.value < 1e-200);
    }

    #[test]
    fn mass_and_chapman_kolmogorov() {
        let neu = build_basis(&DomainSpec::interval(PI), BoundaryCondition::Neumann, 20, 257).unwrap();
        let dir = dirichlet(20, 257);
        for tau in [0.01, 0.3, 2.0] {
            let m = kernel_mass(tau, [0.2, 0.0], &neu).unwrap();
            assert!((m - 1.0).abs() < 1e-8, "τ={tau}: {m}");
            let d = kernel_mass(tau, [0.2, 0.0], &dir).unwrap();
            assert!((0.0..=1.0).contains(&d));
        }
        for basis in [&neu, &dir] {
            let e = chapman_kolmogorov_defect(0.1, 0.35, [0.5, 0.0], [2.0, 0.0], basis).unwrap();
            assert!(e < 1e-8, "{e}");
        }
    }

    #[test]
    fn gaussian_domination_small_grid() {
        let basis = dirichlet(20, 65);
        let p = FractionalParams::new(0.4).unwrap();
        let taus = [1e-3, 1e-2, 0.1, 1.0, 10.0];
        let xs = [0.05, 0.8, 1.6, 3.0];
        let r = gaussian_bound_check(&p, &basis, &taus, &xs, &xs).unwrap();
        assert_eq!(r.points, 80);
        assert_eq!(r.dominated, Some(true));
        assert!(r.finite && r.fitted_constant > 0.0);
        assert!(r.min_value >= -1e-12);
    }

    #[test]
    fn convolution_matches_multiplier() {
        let basis = dirichlet(31, 33);
        let time = TimeGrid::new(100.0, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut c = ModalCoefficients::zeros(time, basis.len());
        for k in 0..4 {
            for m in 0..3i64 {
                let v = Complex64::new(rng.random_range(-1.0..1.0), if m == 0 { 0.0 } else { rng.random_range(-1.0..1.0) });
                c.set(k, time.bin(m), v);
                if m > 0 {
                    c.set(k, time.bin(-m), v.conj());
                }
            }
        }
        let f = inverse_transform(&c, &basis, &time).unwrap();
        let p = FractionalParams::new(0.5).unwrap();
        let a = solve_hs(&f, &p, &basis).unwrap();
        let b = convolve_kernel(&f, &p, &basis, &QuadratureSpec::default()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-6, "{}", a.max_abs_diff(&b));
        // Elliptic reduction: φ₁ time-constant → λ₁^{-s} φ₁ = φ₁.
        let phi = SpaceTimeField::from_real_fn(time, basis.grid().clone(), |_, x| basis.eval_mode(0, x));
        let u = convolve_kernel(&phi, &p, &basis, &QuadratureSpec::default()).unwrap();
        assert!(u.max_abs_diff(&phi) < 1e-7);
    }
}
