//! Quasifree states and Dirac constraint states.

mod dirac;
mod quasifree;

pub use dirac::{
    dirac_derivative_check, dirac_poly_value, dirac_state_value, DiracConstraintSet, DiracValue,
};
pub use quasifree::{
    fock_covariance, quasifree_resolvent_value, quasifree_weyl_value, QuasifreeConfig,
    QuasifreeCovariance, QuasifreeValue,
};
