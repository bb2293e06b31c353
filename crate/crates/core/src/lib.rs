//! Resolvent algebra of the canonical commutation relations at desk scale.
//!
//! * [`symplin`]: symplectic linear algebra over exact rationals or floats.
//! * [`resolvsym`]: symbolic resolvent polynomials, rewriting and identity checks.
//! * [`fockrep`]: truncated Fock representations, the numeric oracle.
//! * [`states`]: quasifree and Dirac states.
//! * [`dynamics`]: cocycles, Dyson series and the oscillator lattice.
//! * [`cli`]: batch front end used by the `resalg` binary.

#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fockrep;
pub mod linalg;
pub mod quad;
pub mod resolvsym;
pub mod states;
pub mod symplin;

pub use error::{Error, Result};
pub use num_complex::Complex64;
