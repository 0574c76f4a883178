//! Numerics for nonlocal space-time master equations `(∂t + L)^s u = f` on
//! intervals and boxes, with `L = -div(A(x)∇)` under Dirichlet or Neumann
//! conditions.
//!
//! The crate is `no_std` (with `alloc`). Everything here is pure computation:
//! spectral bases and transforms, the fractional multiplier and its
//! subordination/kernel representations, the degenerate extension in an extra
//! variable `y`, closed-form half-line profiles, and Campanato-type local
//! least-squares analysis used to measure parabolic Hölder exponents.
//! File formats and the experiment runner live in the `fracmaster` crate.

#![no_std]
#![forbid(unsafe_code)]
// When another crate in the build enables num-traits' `std` feature, the
// inherent float methods shadow `num_traits::Float` and its import looks unused.
#![allow(unused_imports)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod campanato;
pub mod error;
pub mod extension;
pub mod fft;
pub mod halfspace;
pub mod kernel;
pub mod linalg;
pub mod solver;
pub mod special;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
