//! Core numerics for certified 2-D Gaussian deconvolution.
//!
//! Everything here is `no_std` with `alloc`. Transcendentals come from
//! [`libm`] so results are bit-identical across targets and feature sets.
//! The optional `parallel` feature pulls in `std` and `rayon` to fan out
//! envelope construction and certification sweeps; outputs do not depend
//! on the thread count.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bumpwave;
pub mod certify;
pub mod envelope;
mod error;
pub mod hexgeom;
pub mod interval;
pub mod kernels;
pub mod linalg;
pub mod schur;
pub mod solver;

pub use error::{Error, Result};

/// A point or vector in the plane.
pub type Vec2 = [f64; 2];

#[inline]
pub(crate) fn norm2(v: Vec2) -> f64 {
    libm::hypot(v[0], v[1])
}

#[inline]
pub(crate) fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}
