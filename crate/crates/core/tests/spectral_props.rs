mod common;

use std::f64::consts::PI;

use common::{random_band_limited, rel_diff, rng};
use fracmaster_core::solver::{solve_hs, MeanPolicy, SolvePath, SolveRequest};
use fracmaster_core::spectral::*;
use fracmaster_core::Complex64;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::Rng;

fn gram_error(b: &SpectralBasis) -> f64 {
    let w = b.grid().weights();
    let mut worst = 0.0f64;
    for i in 0..b.len() {
        let pi = b.mode_vector(i);
        for j in 0..=i {
            let pj = b.mode_vector(j);
            let g: f64 = w.iter().zip(pi.iter().zip(&pj)).map(|(w, (a, b))| w * a * b).sum();
            worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

#[test]
fn orthonormal_analytic_and_numeric() {
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let b = build_basis(&DomainSpec::interval(3.0), bc, 40, 81).unwrap();
        assert!(gram_error(&b) < 1e-10);
        let dom = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::Ramp), 1.0, 2.0);
        let b = build_basis(&dom, bc, 40, 201).unwrap();
        assert!(gram_error(&b) < 1e-8);
    }
}

#[test]
fn variable_coefficient_matches_dense_eigensolver() {
    let n = 400;
    let h = PI / n as f64;
    let a = |x: f64| 1.0 + 0.5 * x.sin();
    let m = n - 1;
    let mut mat = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let (al, ar) = (a((i as f64 + 0.5) * h), a((i as f64 + 1.5) * h));
        mat[(i, i)] = (al + ar) / (h * h);
        if i + 1 < m {
            mat[(i, i + 1)] = -ar / (h * h);
            mat[(i + 1, i)] = -ar / (h * h);
        }
    }
    let mut oracle: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    oracle.sort_by(f64::total_cmp);
    let dom = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::OnePlusHalfSin), 0.5, 1.5);
    let b = build_basis(&dom, BoundaryCondition::Dirichlet, 20, n + 1).unwrap();
    for (k, (l, o)) in b.eigenvalues().iter().zip(&oracle).enumerate() {
        assert!((l - o).abs() <= 1e-10 * o.max(1.0), "k={k}: {l} vs {o}");
    }
    // Refinement: low eigenvalues settle.
    let fine = build_basis(&dom, BoundaryCondition::Dirichlet, 5, 2 * n + 1).unwrap();
    for k in 0..5 {
        let (c, f) = (b.eigenvalues()[k], fine.eigenvalues()[k]);
        assert!((c - f).abs() / f < 1e-3);
    }
}

#[test]
fn weyl_bounds_for_variable_coefficient() {
    let dom = DomainSpec::interval(PI).with_coefficient(Coefficient::Profile(CoefficientProfile::OnePlusHalfSin), 0.5, 1.5);
    let b = build_basis(&dom, BoundaryCondition::Dirichlet, 60, 2049).unwrap();
    let eps = 0.05;
    for k in 5..60 {
        let kk = (k + 1) as f64;
        let r = b.eigenvalues()[k] / (kk * kk);
        assert!(r >= 0.5 * (1.0 - eps) && r <= 1.5 * (1.0 + eps), "k={k}: {r}");
    }
}

#[test]
fn pure_time_constant_mode() {
    let b = build_basis(&DomainSpec::interval(PI), BoundaryCondition::Dirichlet, 8, 65).unwrap();
    let time = TimeGrid::new(2.0, 16).unwrap();
    let u = SpaceTimeField::from_real_fn(time, b.grid().clone(), |_, x| b.eval_mode(0, x));
    let c = forward_transform(&u, &b).unwrap();
    let expect = (time.period()).sqrt();
    for k in 0..b.len() {
        for bin in 0..16 {
            let v = c.get(k, bin);
            let e = if k == 0 && bin == 0 { expect } else { 0.0 };
            assert!((v - Complex64::new(e, 0.0)).norm() < 1e-12, "({k},{bin}) {v}");
        }
    }
}

#[test]
fn periodic_reflection_solves_match_half_interval() {
    let n = 64;
    let time = TimeGrid::new(8.0, 16).unwrap();
    for (bc, parity, seed) in [(BoundaryCondition::Dirichlet, Parity::Odd, 3), (BoundaryCondition::Neumann, Parity::Even, 4)] {
        let half = build_basis(&DomainSpec::interval(PI), bc, 24, n + 1).unwrap();
        let full = build_basis(&DomainSpec::span(-PI, PI), BoundaryCondition::Periodic, 2 * 24 + 1, 2 * n).unwrap();
        let f = random_band_limited(&half, time, 24, 6, seed);
        let p = FractionalParams::new(0.4).unwrap();
        let u = solve_hs(&f, &p, &half).unwrap();
        let fe = reflect_extension(&f, parity).unwrap();
        let ue = solve_hs(&fe, &p, &full).unwrap();
        let back = restrict_reflection(&ue, half.grid(), parity).unwrap();
        assert!(back.max_abs_diff(&u) < 1e-10, "{bc:?}: {}", back.max_abs_diff(&u));
    }
}

#[test]
fn solve_request_paths_share_a_mean_policy() {
    let b = build_basis(&DomainSpec::interval(1.0), BoundaryCondition::Neumann, 8, 33).unwrap();
    let time = TimeGrid::new(4.0, 8).unwrap();
    let f = SpaceTimeField::from_real_fn(time, b.grid().clone(), |_, _| 1.0);
    let req = SolveRequest {
        forcing: &f,
        params: FractionalParams::new(0.5).unwrap(),
        basis: &b,
        path: SolvePath::Multiplier,
        mean_policy: MeanPolicy::Strict,
    };
    assert!(fracmaster_core::solver::solve(&req).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn roundtrip_and_parseval(seed in any::<u64>(), bc_idx in 0usize..2, k in 4usize..20) {
        let bc = [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann][bc_idx];
        let b = build_basis(&DomainSpec::interval(2.0), bc, k, 2 * k + 3).unwrap();
        let time = TimeGrid::new(3.0, 8).unwrap();
        let mut r = rng(seed);
        let data: Vec<Complex64> = (0..k * 8).map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))).collect();
        let c = ModalCoefficients::from_data(time, k, data).unwrap();
        let u = inverse_transform(&c, &b, &time).unwrap();
        let back = forward_transform(&u, &b).unwrap();
        let err = c.data().iter().zip(back.data()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        // Grid L² norm with √T/Nt normalisation equals the modal ℓ² norm.
        let grid = u.l2_norm().powi(2);
        let modal = c.norm_sqr();
        prop_assert!((grid - modal).abs() <= 1e-10 * modal);
    }

    #[test]
    fn multiplier_group_law(s1 in 0.01f64..0.49, s2 in 0.01f64..0.49, rho in -50.0f64..50.0, lam in 0.0f64..100.0) {
        prop_assume!(rho.abs() + lam > 1e-6);
        let a = multiplier_value(&FractionalParams::new(s1).unwrap(), rho, lam, Power::Positive).unwrap();
        let b = multiplier_value(&FractionalParams::new(s2).unwrap(), rho, lam, Power::Positive).unwrap();
        let c = multiplier_value(&FractionalParams::new(s1 + s2).unwrap(), rho, lam, Power::Positive).unwrap();
        prop_assert!((a * b - c).norm() <= 1e-12 * c.norm());
        let conj = multiplier_value(&FractionalParams::new(s1).unwrap(), -rho, lam, Power::Positive).unwrap();
        prop_assert!((conj - a.conj()).norm() <= 1e-14 * a.norm());
    }

    #[test]
    fn odd_extension_is_antisymmetric(seed in any::<u64>(), n in 3usize..40) {
        let time = TimeGrid::new(1.0, 2).unwrap();
        let grid = SpaceGrid::uniform(0.0, 1.0, n + 1).unwrap();
        let mut r = rng(seed);
        let u = SpaceTimeField::from_real_fn(time, grid, |_, _| r.random_range(-1.0..1.0));
        let e = odd_extension(&u).unwrap();
        for i in 0..2 {
            let row = e.slice(i);
            prop_assert_eq!(row[n], Complex64::new(0.0, 0.0));
            for j in 1..n {
                prop_assert_eq!(row[n + j] + row[n - j], Complex64::new(0.0, 0.0));
            }
        }
    }
}

#[test]
fn band_limited_is_real_and_in_span() {
    let b = build_basis(&DomainSpec::interval(1.0), BoundaryCondition::Neumann, 16, 33).unwrap();
    let u = random_band_limited(&b, TimeGrid::new(2.0, 16).unwrap(), 10, 5, 11);
    assert_eq!(u.max_imag(), 0.0);
    assert!(spectral_tail(&u, &b).unwrap() < 1e-12);
    let c = forward_transform(&u, &b).unwrap();
    assert!(c.get(0, 0).norm() < 1e-12);
    let p = FractionalParams::new(0.3).unwrap();
    let v = solve_hs(&u, &p, &b).unwrap();
    assert!(rel_diff(&fracmaster_core::solver::apply_hs(&v, &p, &b).unwrap(), &u) < 1e-10);
}
