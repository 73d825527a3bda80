//! Exactly solvable spin-1/2 dynamics driven by two-axis rotating fields.
//!
//! A spin in the field
//!
//! ```text
//! b(t) = alpha'(t) sin(chi) (cos beta(t), sin beta(t), 0) + (alpha'(t) cos(chi) - beta'(t)) k
//! ```
//!
//! evolves by the closed-form propagator
//! `U(t) = exp(-i beta s3 / 2) exp(i alpha (sin chi s1 + cos chi s3) / 2)`
//! for any choice of the angle functions `alpha`, `beta` (with
//! `alpha(0) = beta(0) = 0`). The crate provides that propagator, independent
//! RK4 and quadrature oracles to check it, evolution-loop detection and the
//! geometric phases of cyclic states, both as solid angles and in closed form.
//!
//! ```
//! use spinloop::{check_loop, parse, FieldSpec, TimeFn, LOOP_TOL};
//! use std::f64::consts::PI;
//!
//! let alpha = parse("5/(2*pi)*t^2").unwrap();
//! let spec = FieldSpec::from_b3(alpha, &TimeFn::constant(3.0), 0.8f64.acos()).unwrap();
//! let report = check_loop(&spec, 2.0 * PI, LOOP_TOL).unwrap();
//! assert_eq!((report.ell, report.m, report.is_strong), (5, 1, true));
//! ```
//!
//! Conventions: hbar = 1, `S = sigma / 2`, fields are given as `b = mu B` in
//! angular-frequency units.

// Checks are written as `!(x <= tol)` on purpose: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod expr;
pub mod fields;
pub mod integrate;
pub mod loops;
pub mod spin;

pub use error::{Error, Result};
pub use evolution::{
    bloch_at, effective_hamiltonian, evolve, hamiltonian, propagator, propagator_rotating,
    transition_probability, PropagatorSample,
};
pub use expr::{parse, parse_constant, Term, TimeFn};
pub use fields::{beta_from_b3, inverse_field, FieldSample, FieldSpec};
pub use integrate::{
    fresnel_c, integrate_bloch, integrate_propagator, integrate_schrodinger, quad, Trajectory,
};
pub use loops::{
    check_loop, geometric_phase_b3const, geometric_phase_closed, geometric_phase_eigenpath,
    geometric_phase_numeric, loop_scan, phase_distance, principal_value, solid_angle, EigenSign,
    LoopReport, PhaseConfig, PhaseMethod, PhaseResult, LOOP_TOL,
};
pub use spin::{hopf_map, pauli_exp, rot3, spinor_from_angles, BlochVector, Mat2c, Mat3, Spinor};

// The guide's Rust snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/time-functions.md")]
    mod time_functions {}
    #[doc = include_str!("../../../book/src/spin-algebra.md")]
    mod spin_algebra {}
    #[doc = include_str!("../../../book/src/field-family.md")]
    mod field_family {}
    #[doc = include_str!("../../../book/src/propagator.md")]
    mod propagator {}
    #[doc = include_str!("../../../book/src/loops-and-phases.md")]
    mod loops_and_phases {}
    #[doc = include_str!("../../../book/src/oracles.md")]
    mod oracles {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
