//! Eigenvalue degeneracies of complex-extended Richardson–Gaudin pairing
//! Hamiltonians.
//!
//! The crate builds the seniority-zero pairing model (integrals of motion,
//! the integrable and interpolating Hamiltonians), reconstructs the
//! discriminant `D(g) = Π_{m<m'} (E_m(g) − E_{m'}(g))²` as a polynomial in the
//! complex coupling `g`, locates all of its roots, sorts them into exceptional
//! points and genuine level crossings, and follows them along parameter
//! sweeps.
//!
//! Everything here is pure computation on small dense complex matrices and
//! works under `no_std` with `alloc`. File formats and the command-line
//! front end live in the companion `pairdeg` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assign;
pub mod continuation;
pub mod degeneracy;
pub mod discriminant;
mod error;
pub mod linalg;
mod math;
pub mod model;
pub mod poly;

pub use num_complex::Complex64;

pub use error::{Error, Result};
