#![allow(dead_code)]

use fracmaster_core::spectral::{band_limited, SpaceTimeField, SpectralBasis, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_band_limited(basis: &SpectralBasis, time: TimeGrid, kmax: usize, mmax: i64, seed: u64) -> SpaceTimeField {
    let mut r = rng(seed);
    band_limited(basis, time, kmax, mmax, || r.random_range(-1.0..1.0)).unwrap()
}

pub fn rel_diff(a: &SpaceTimeField, b: &SpaceTimeField) -> f64 {
    a.max_abs_diff(b) / b.max_abs().max(f64::MIN_POSITIVE)
}

/// `K_ν(w)` from the `I_{±ν}` power series; reliable for `|w| ≲ 8`, non-integer `ν`.
pub fn bessel_k_series(nu: f64, w: fracmaster_core::Complex64) -> fracmaster_core::Complex64 {
    use fracmaster_core::special::gamma;
    use fracmaster_core::Complex64;
    let half = w / 2.0;
    let h2 = half * half;
    let i_nu = |nu: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for k in 0..300 {
            let term = pow / (gamma(k as f64 + 1.0) * gamma(k as f64 + nu + 1.0));
            acc += term;
            if k > 5 && term.norm() < 1e-18 * acc.norm() {
                break;
            }
            pow *= h2;
        }
        acc * (half.ln() * nu).exp()
    };
    (i_nu(-nu) - i_nu(nu)) * (std::f64::consts::PI / (2.0 * (nu * std::f64::consts::PI).sin()))
}

/// `ψ(y; ζ) = 2/Γ(s) (√ζ y/2)^s K_s(√ζ y)` through the series above.
pub fn psi_oracle(s: f64, zeta: fracmaster_core::Complex64, y: f64) -> fracmaster_core::Complex64 {
    let w = zeta.sqrt() * y;
    ((w / 2.0).ln() * s).exp() * bessel_k_series(s, w) * (2.0 / fracmaster_core::special::gamma(s))
}
