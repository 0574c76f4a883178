//! Explicit one-dimensional half-line solutions of `(−∂²)^s u = f`, `u(0) = 0`,
//! with `f = 1` for `s < 1/2` and `f = χ_[0,1]` for `s ≥ 1/2`, their weighted
//! extensions `W(x, y)` and the small-argument `η` expansions.
//!
//! Everything uses normalization 1; the physical constant is recovered by
//! [`operator_consistency`].

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::fit_line;
use crate::special::integrate_graded;
use crate::spectral::{build_basis, BoundaryCondition, DomainSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    Sub,
    Crit,
    Super,
}

impl Regime {
    pub fn of(s: f64) -> Regime {
        if s < 0.5 {
            Regime::Sub
        } else if s == 0.5 {
            Regime::Crit
        } else {
            Regime::Super
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Sub => "sub",
            Regime::Crit => "crit",
            Regime::Super => "super",
        }
    }
}

/// Profile with an explicit normalization and flux scale `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HalfspaceProfile {
    pub s: f64,
    pub regime: Regime,
    pub normalization: f64,
    pub theta: f64,
}

impl HalfspaceProfile {
    pub fn new(s: f64) -> Result<Self> {
        check_order(s)?;
        Ok(HalfspaceProfile { s, regime: Regime::of(s), normalization: 1.0, theta: 1.0 })
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        Ok(self.normalization * dirichlet_profile(self.s, x)?)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        Ok(self.normalization * dirichlet_profile_dx(self.s, x)?)
    }

    pub fn extension(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.normalization * extension_w(self.s, x, y, self.theta)?)
    }

    pub fn extension_dx(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.normalization * extension_w_dx(self.s, x, y, self.theta)?)
    }
}

fn check_order(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("s must lie in (0, 1), got {s}")))
    }
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("x must be finite and ≥ 0, got {x}")))
    }
}

/// `(1+x)log(1+x) − (1−x)log(1−x)`, small-`x` behaviour `2x`.
pub fn eta1(x: f64) -> f64 {
    let right = if x == 1.0 { 0.0 } else { (1.0 - x) * (-x).ln_1p() };
    (1.0 + x) * x.ln_1p() - right
}

/// `(1+x)log(1+x) + (1−x)log(1−x)` on `[0, 1]`, small-`x` behaviour `x²`.
pub fn eta2(x: f64) -> f64 {
    let right = if x == 1.0 { 0.0 } else { (1.0 - x) * (-x).ln_1p() };
    (1.0 + x) * x.ln_1p() + right
}

/// `(1−x)^{2s} − (1+x)^{2s}`.
pub fn eta_s1(s: f64, x: f64) -> f64 {
    (2.0 * s * (-x).ln_1p()).exp_m1() - (2.0 * s * x.ln_1p()).exp_m1()
}

/// `(1−x)^{2s} + (1+x)^{2s}`.
pub fn eta_s2(s: f64, x: f64) -> f64 {
    2.0 + eta_s2_minus_two(s, x)
}

fn eta_s2_minus_two(s: f64, x: f64) -> f64 {
    (2.0 * s * (-x).ln_1p()).exp_m1() + (2.0 * s * x.ln_1p()).exp_m1()
}

/// `(η_{s1}(x)/x, (η_{s2}(x) − 2)/x²)`, which tend to `−4s` and `2s(2s−1)`.
pub fn eta_asymptotics(s: f64, x: f64) -> Result<(f64, f64)> {
    if !(s > 0.5 && s < 1.0) {
        return Err(Error::invalid("η expansions need 1/2 < s < 1"));
    }
    if !(x > 0.0 && x < 0.1) {
        return Err(Error::invalid("η expansions need 0 < x < 0.1"));
    }
    Ok((eta_s1(s, x) / x, eta_s2_minus_two(s, x) / (x * x)))
}

/// Left (`x < 1`) and right (`x ≥ 1`) branch formulas, both usable at `x = 1`.
fn branch_left(s: f64, x: f64) -> f64 {
    match Regime::of(s) {
        Regime::Sub => x.powf(2.0 * s),
        Regime::Crit => {
            let xlogx = if x == 0.0 { 0.0 } else { x * x.ln() };
            eta1(x) - 2.0 * xlogx
        }
        Regime::Super => 2.0 * x.powf(2.0 * s) + eta_s1(s, x),
    }
}

fn branch_right(s: f64, x: f64) -> f64 {
    match Regime::of(s) {
        Regime::Sub => x.powf(2.0 * s),
        Regime::Crit => x * eta2(1.0 / x),
        Regime::Super => -x.powf(2.0 * s) * eta_s2_minus_two(s, 1.0 / x),
    }
}

/// Half-line Dirichlet profile with normalization 1; `u(0) = 0`.
pub fn dirichlet_profile(s: f64, x: f64) -> Result<f64> {
    check_order(s)?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(if x < 1.0 { branch_left(s, x) } else { branch_right(s, x) })
}

/// `|left(1) − right(1)|`, the jump between the two branch formulas.
pub fn branch_jump(s: f64) -> Result<f64> {
    check_order(s)?;
    Ok((branch_left(s, 1.0) - branch_right(s, 1.0)).abs())
}

/// `du/dx`; singular at `x = 0` for `s < 1/2` and at `x ∈ {0, 1}` for `s = 1/2`.
pub fn dirichlet_profile_dx(s: f64, x: f64) -> Result<f64> {
    check_order(s)?;
    check_x(x)?;
    match Regime::of(s) {
        Regime::Sub => {
            if x == 0.0 {
                return Err(Error::SingularPoint("profile derivative at x = 0".into()));
            }
            Ok(2.0 * s * x.powf(2.0 * s - 1.0))
        }
        Regime::Crit => {
            if x == 0.0 || x == 1.0 {
                return Err(Error::SingularPoint(format!("profile derivative at x = {x}")));
            }
            if x > 1.0 {
                Ok((-1.0 / (x * x)).ln_1p())
            } else {
                Ok(x.ln_1p() + (-x).ln_1p() - 2.0 * x.ln())
            }
        }
        Regime::Super => {
            let p = 2.0 * s - 1.0;
            if x < 1.0 {
                let x_term = if x == 0.0 { 0.0 } else { 2.0 * x.powf(p) };
                Ok(2.0 * s * (x_term - (1.0 - x).powf(p) - (1.0 + x).powf(p)))
            } else {
                let z = 1.0 / x;
                let bracket = -(p * (-z).ln_1p()).exp_m1() - (p * z.ln_1p()).exp_m1();
                Ok(2.0 * s * x.powf(p) * bracket)
            }
        }
    }
}

/// `∫_a^b (ξ² + y²)^p dξ`, `0 ≤ a ≤ b`, graded towards `a` when it can be singular.
fn power_integral(p: f64, y: f64, a: f64, b: f64) -> f64 {
    let f = |xi: f64| (xi * xi + y * y).powf(p);
    let graded = a == 0.0 || a < 4.0 * y.max(1e-300);
    integrate_graded(f, a, b, 48, graded)
}

/// The weighted extension `W(x, y)` with `−y^a W_y → θ f` and `W(x, 0) = θ u(x)`.
pub fn extension_w(s: f64, x: f64, y: f64, theta: f64) -> Result<f64> {
    check_order(s)?;
    check_x(x)?;
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::invalid("y must be finite and ≥ 0"));
    }
    if theta == 0.0 || x == 0.0 {
        return Ok(0.0);
    }
    if y == 0.0 {
        return Ok(theta * dirichlet_profile(s, x)?);
    }
    let p = s - 0.5;
    Ok(match Regime::of(s) {
        Regime::Sub => theta * 2.0 * s * power_integral(p, y, 0.0, x),
        Regime::Crit => {
            let lg = |d: f64| (d * d + y * y).ln();
            let at = |d: f64| y * (d / y).atan();
            let v = (1.0 + x) * lg(1.0 + x) - (1.0 - x) * lg(1.0 - x) - 2.0 * x * lg(x) + 2.0 * at(1.0 + x)
                - 2.0 * at(1.0 - x)
                - 4.0 * at(x);
            theta * 0.5 * v
        }
        Regime::Super => {
            let near = if x <= 1.0 {
                power_integral(p, y, 0.0, x) + power_integral(p, y, 0.0, 1.0 - x)
            } else {
                power_integral(p, y, x - 1.0, x)
            };
            theta * 2.0 * s * (near - power_integral(p, y, x, x + 1.0))
        }
    })
}

/// `∂_x W(x, y)`.
pub fn extension_w_dx(s: f64, x: f64, y: f64, theta: f64) -> Result<f64> {
    check_order(s)?;
    check_x(x)?;
    if !(y >= 0.0 && y.is_finite()) {
        return Err(Error::invalid("y must be finite and ≥ 0"));
    }
    let r2 = |d: f64| d * d + y * y;
    match Regime::of(s) {
        Regime::Sub => {
            if x == 0.0 && y == 0.0 {
                return Err(Error::SingularPoint("∂_x W at the corner (0, 0)".into()));
            }
            Ok(theta * 2.0 * s * r2(x).powf(s - 0.5))
        }
        Regime::Crit => {
            if y == 0.0 && (x == 0.0 || x == 1.0) {
                return Err(Error::SingularPoint(format!("∂_x W at ({x}, 0)")));
            }
            Ok(theta * 0.5 * (r2(1.0 + x).ln() + r2(1.0 - x).ln() - 2.0 * r2(x).ln()))
        }
        Regime::Super => {
            let p = s - 0.5;
            Ok(theta * 2.0 * s * (2.0 * r2(x).powf(p) - r2(1.0 - x).powf(p) - r2(1.0 + x).powf(p)))
        }
    }
}

/// Sampled constants of the `W` bounds over `(0, 1]²`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WBoundReport {
    pub s: f64,
    pub theta: f64,
    pub regime: Regime,
    /// `sup |W|/x^{2s}` (sub) or `sup |W|`.
    pub value_constant: f64,
    /// `sup |∂_x W|/y^{2s−1}` (sub), `sup |∂_x W|/|log(x²+y²)|` on `(0, 1/2]²`
    /// (crit) or `sup |∂_x W|` (super).
    pub derivative_constant: f64,
    pub points: usize,
    pub finite: bool,
}

pub fn w_bound_check(s: f64, theta: f64, per_axis: usize) -> Result<WBoundReport> {
    check_order(s)?;
    if per_axis < 2 {
        return Err(Error::invalid("w_bound_check needs at least 2 points per axis"));
    }
    let regime = Regime::of(s);
    let mut value_constant = 0.0f64;
    let mut derivative_constant = 0.0f64;
    let mut points = 0;
    for i in 1..=per_axis {
        let x = i as f64 / per_axis as f64;
        for j in 1..=per_axis {
            let y = j as f64 / per_axis as f64;
            let w = extension_w(s, x, y, theta)?.abs();
            value_constant = value_constant.max(match regime {
                Regime::Sub => w / x.powf(2.0 * s),
                _ => w,
            });
            let (xd, yd) = match regime {
                Regime::Crit => (0.5 * x, 0.5 * y),
                _ => (x, y),
            };
            let d = extension_w_dx(s, xd, yd, theta)?.abs();
            derivative_constant = derivative_constant.max(match regime {
                Regime::Sub => d / yd.powf(2.0 * s - 1.0),
                Regime::Crit => d / (xd * xd + yd * yd).ln().abs(),
                Regime::Super => d,
            });
            points += 1;
        }
    }
    Ok(WBoundReport {
        s,
        theta,
        regime,
        value_constant,
        derivative_constant,
        points,
        finite: value_constant.is_finite() && derivative_constant.is_finite(),
    })
}

/// One asymptotic check over `[x_lo, x_hi]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticFit {
    pub label: String,
    pub x_lo: f64,
    pub x_hi: f64,
    pub expected: f64,
    pub fitted: f64,
    pub tolerance: f64,
    /// Leading coefficient for two-term fits.
    pub coefficient: Option<f64>,
    pub passed: bool,
}

fn geometric(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn slope_fit(s: f64, label: &str, lo: f64, hi: f64, expected: f64) -> Result<AsymptoticFit> {
    let xs = geometric(lo, hi, 41);
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(xs.len());
    for &x in &xs {
        lx.push(x.ln());
        ly.push(dirichlet_profile(s, x)?.abs().ln());
    }
    let fit = fit_line(&lx, &ly).ok_or_else(|| Error::RankDeficient("slope fit".into()))?;
    let tolerance = 0.03;
    Ok(AsymptoticFit {
        label: label.into(),
        x_lo: lo,
        x_hi: hi,
        expected,
        fitted: fit.slope,
        tolerance,
        coefficient: None,
        passed: (fit.slope - expected).abs() <= tolerance,
    })
}

/// Leading-order checks for the profile near 0 and near ∞. At `s = 1/2` the
/// small-`x` check fits `A(−x log x) + Bx` and reports the max relative
/// residual (`expected` 0, tolerance 1%).
pub fn profile_asymptotics(s: f64) -> Result<Vec<AsymptoticFit>> {
    check_order(s)?;
    let mut out = Vec::new();
    match Regime::of(s) {
        Regime::Sub => {
            out.push(slope_fit(s, "x^{2s} as x → 0", 1e-6, 1e-3, 2.0 * s)?);
            out.push(slope_fit(s, "x^{2s} as x → ∞", 1e2, 1e4, 2.0 * s)?);
        }
        Regime::Crit => {
            let xs = geometric(1e-6, 1e-3, 41);
            let mut ata = [0.0; 4];
            let mut atb = [0.0; 2];
            let mut rows = Vec::with_capacity(xs.len());
            for &x in &xs {
                let u = dirichlet_profile(s, x)?;
                // Rows scaled by 1/u so the fit minimizes relative error.
                let r = [-x * x.ln() / u, x / u];
                for i in 0..2 {
                    for j in 0..2 {
                        ata[i * 2 + j] += r[i] * r[j];
                    }
                    atb[i] += r[i];
                }
                rows.push(r);
            }
            crate::linalg::lu_solve(&mut ata, &mut atb, 2).ok_or_else(|| Error::RankDeficient("x log x fit".into()))?;
            let worst = rows.iter().map(|r| (r[0] * atb[0] + r[1] * atb[1] - 1.0).abs()).fold(0.0, f64::max);
            out.push(AsymptoticFit {
                label: "−x log x as x → 0".into(),
                x_lo: 1e-6,
                x_hi: 1e-3,
                expected: 0.0,
                fitted: worst,
                tolerance: 0.01,
                coefficient: Some(atb[0]),
                passed: worst <= 0.01 && atb[0] > 0.0,
            });
            out.push(slope_fit(s, "1/x as x → ∞", 1e2, 1e4, -1.0)?);
        }
        Regime::Super => {
            out.push(slope_fit(s, "x as x → 0", 1e-6, 1e-3, 1.0)?);
            out.push(slope_fit(s, "x^{2s−2} as x → ∞", 1e2, 1e4, 2.0 * s - 2.0)?);
        }
    }
    Ok(out)
}

/// Discrete `(−∂²)^s` of the sampled profile on `(0, L)` compared with the
/// forcing, up to one fitted constant.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConsistencyReport {
    pub s: f64,
    pub length: f64,
    pub intervals: usize,
    /// `(−∂²)^s u ≈ fitted_constant · f`.
    pub fitted_constant: f64,
    /// `max |(−∂²)^s u − C f| / |C|` over `[L/50, L/4]`.
    pub window_deviation: f64,
    /// Same inside the support `(0.2, 0.8)` of `χ_[0,1]` (`s ≥ 1/2` only).
    pub support_deviation: Option<f64>,
    pub max_relative_deviation: f64,
}

pub fn operator_consistency(s: f64, length: f64, intervals: usize) -> Result<ConsistencyReport> {
    check_order(s)?;
    if !(length > 2.0) {
        return Err(Error::invalid("consistency check needs L > 2"));
    }
    let basis = build_basis(&DomainSpec::interval(length), BoundaryCondition::Dirichlet, intervals - 1, intervals + 1)?;
    let grid = basis.grid().clone();
    let axis = grid.axes()[0];
    let samples: Vec<Complex64> = (0..grid.len())
        .map(|j| dirichlet_profile(s, axis.coord(j)).map(|v| Complex64::new(v, 0.0)))
        .collect::<Result<_>>()?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); basis.len()];
    basis.project_slice(&samples, &mut coeffs);
    for (c, &lam) in coeffs.iter_mut().zip(basis.eigenvalues()) {
        *c *= lam.powf(s);
    }
    let mut hu = vec![Complex64::new(0.0, 0.0); grid.len()];
    basis.synthesize_slice(&coeffs, &mut hu);
    let xs: Vec<f64> = (0..grid.len()).map(|j| axis.coord(j)).collect();
    let in_window = |x: f64| x >= length / 50.0 && x <= length / 4.0;
    let in_support = |x: f64| x > 0.2 && x < 0.8;
    let forcing = |x: f64| if s < 0.5 || x <= 1.0 { 1.0 } else { 0.0 };
    let fit_region: Vec<usize> = (0..xs.len())
        .filter(|&j| if s < 0.5 { in_window(xs[j]) } else { in_support(xs[j]) })
        .collect();
    if fit_region.is_empty() {
        return Err(Error::invalid("grid too coarse for the consistency window"));
    }
    let c = fit_region.iter().map(|&j| hu[j].re).sum::<f64>() / fit_region.len() as f64;
    let dev = |pred: &dyn Fn(f64) -> bool| {
        (0..xs.len()).filter(|&j| pred(xs[j])).map(|j| (hu[j].re - c * forcing(xs[j])).abs()).fold(0.0, f64::max)
            / c.abs()
    };
    let window_deviation = dev(&in_window);
    let support_deviation = (s >= 0.5).then(|| dev(&in_support));
    Ok(ConsistencyReport {
        s,
        length,
        intervals,
        fitted_constant: c,
        window_deviation,
        support_deviation,
        max_relative_deviation: window_deviation.max(support_deviation.unwrap_or(0.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let two_log_two = 2.0 * core::f64::consts::LN_2;
        assert!((dirichlet_profile(0.5, 1.0).unwrap() - two_log_two).abs() < 1e-15);
        assert!((dirichlet_profile(0.75, 1.0).unwrap() - (2.0 - 2f64.powf(1.5))).abs() < 1e-14);
        for s in [0.1, 0.3, 0.5, 0.6, 0.75, 0.95] {
            assert_eq!(dirichlet_profile(s, 0.0).unwrap(), 0.0);
            assert!(branch_jump(s).unwrap() < 1e-12);
            let below = dirichlet_profile(s, 1.0 - 1e-9).unwrap();
            let above = dirichlet_profile(s, 1.0 + 1e-9).unwrap();
            assert!((below - above).abs() < 1e-7);
        }
        let half = 1.5 * 1.5f64.ln() - 0.5 * 0.5f64.ln() - 0.5f64.ln();
        assert!((dirichlet_profile(0.5, 0.5).unwrap() - half).abs() < 1e-15);
        assert!((half - 1.647918).abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_differences() {
        for s in [0.3, 0.5, 0.75] {
            for x in [0.2, 0.7, 1.6, 40.0] {
                let h = 1e-6 * x;
                let fd = (dirichlet_profile(s, x + h).unwrap() - dirichlet_profile(s, x - h).unwrap()) / (2.0 * h);
                let d = dirichlet_profile_dx(s, x).unwrap();
                assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "s={s} x={x}: {fd} vs {d}");
            }
        }
        assert!(matches!(dirichlet_profile_dx(0.5, 1.0), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn eta_limits() {
        let (a, b) = eta_asymptotics(0.75, 1e-4).unwrap();
        assert!((a + 3.0).abs() < 1e-3);
        let (_, b3) = eta_asymptotics(0.75, 1e-3).unwrap();
        assert!((b3 - 0.75).abs() < 1e-2);
        assert!((b - 0.75).abs() < 1e-2);
        let (a, b) = eta_asymptotics(0.6, 1e-5).unwrap();
        assert!((a + 2.4).abs() < 1e-3 && (b - 0.24).abs() < 1e-3);
        assert!(eta_asymptotics(0.4, 1e-3).is_err());
        assert!((eta1(1e-6) / 1e-6 - 2.0).abs() < 1e-6);
        assert!((eta2(1e-4) / 1e-8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn extension_trace_and_symmetry() {
        for s in [0.3, 0.5, 0.7] {
            assert_eq!(extension_w(s, 0.0, 0.4, 1.0).unwrap(), 0.0);
            assert_eq!(extension_w(s, 0.4, 0.3, 0.0).unwrap(), 0.0);
            for x in [0.25, 0.5, 1.7] {
                let trace = extension_w(s, x, 1e-7, 1.0).unwrap();
                let u = dirichlet_profile(s, x).unwrap();
                assert!((trace - u).abs() < 1e-4, "s={s} x={x}: {trace} vs {u}");
                for y in [0.05, 0.4] {
                    let h = 1e-5;
                    let fd = (extension_w(s, x + h, y, 1.0).unwrap() - extension_w(s, x - h, y, 1.0).unwrap()) / (2.0 * h);
                    let d = extension_w_dx(s, x, y, 1.0).unwrap();
                    assert!((fd - d).abs() < 1e-6 * d.abs().max(1.0), "s={s} ({x},{y}): {fd} vs {d}");
                }
            }
        }
        let w = extension_w(0.5, 0.5, 1e-6, 1.0).unwrap();
        assert!((w - 1.647918).abs() < 1e-4);
        let d = extension_w_dx(0.3, 0.1, 0.1, 1.0).unwrap();
        assert!((d - 0.6 * 0.02f64.powf(-0.2)).abs() < 1e-14);
        assert!(matches!(extension_w_dx(0.3, 0.0, 0.0, 1.0), Err(Error::SingularPoint(_))));
    }

    #[test]
    fn bounds_and_asymptotics() {
        for s in [0.3, 0.5, 0.7] {
            let r = w_bound_check(s, 1.0, 24).unwrap();
            assert!(r.finite);
            for fit in profile_asymptotics(s).unwrap() {
                assert!(fit.passed, "{fit:?}");
            }
        }
        let z = w_bound_check(0.4, 0.0, 8).unwrap();
        assert_eq!((z.value_constant, z.derivative_constant), (0.0, 0.0));
        let fit = &profile_asymptotics(0.8).unwrap()[0];
        assert!((fit.fitted - 1.0).abs() < 0.03);
    }

    #[test]
    fn consistency_for_critical_and_super() {
        for s in [0.5, 0.7] {
            let r = operator_consistency(s, 64.0, 4096).unwrap();
            assert!(r.max_relative_deviation < 0.03, "{r:?}");
        }
        let r = operator_consistency(0.5, 64.0, 4096).unwrap();
        assert!((r.fitted_constant - core::f64::consts::PI).abs() < 1e-3);
    }
}
