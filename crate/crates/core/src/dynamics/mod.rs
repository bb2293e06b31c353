//! Cocycle kernels, Dyson series, Heisenberg evolution and the oscillator lattice.

mod bounds;
mod cocycle;
mod dyson;
mod evolve;
mod hermite;
mod lattice;
mod potential;

pub use bounds::{commutator_tail, commutator_term, TailBound};
pub use cocycle::{cocycle_hs_norm_sq, cocycle_hs_norm_sq_2d, cocycle_kernel, HsNorm};
pub use dyson::{
    continuity_bound, dyson_cocycle, exact_cocycle, exp_tail, DysonConfig, DysonResult,
};
pub use evolve::{
    evolved_resolvent, histogram, inverted_oscillator_spectrum, oscillator_hamiltonian,
};
pub use hermite::{
    bound_violations, hermite_matrix_elements, matrix_element_bound, time_factor, weight_constant,
    weighted_norm_sq, weighted_norm_sq_quadrature, BoundViolation, HermiteConfig, HermiteElements,
};
pub use lattice::{
    GroundStateResult, LatticeModel, SandwichResult, SiteInterval, Solver, SuperadditivityResult,
};
pub use potential::{inv_sqrt_2pi, Potential, Spline};
