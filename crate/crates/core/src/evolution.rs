//! Closed-form Hamiltonians and propagators for the field family.
//!
//! In the frame rotating about `k` by `beta(t)` the Hamiltonian is
//! `H_eff(t) = -alpha'(t) (sin chi s1 + cos chi s3) / 2`, which commutes with
//! itself at all times, so the lab propagator factors as
//!
//! ```text
//! U(t) = exp(-i beta(t) s3 / 2) exp(i alpha(t) (sin chi s1 + cos chi s3) / 2)
//! ```

use num_complex::Complex64;

use crate::error::Result;
use crate::fields::FieldSpec;
use crate::spin::{hopf_map, pauli_exp_unchecked, BlochVector, Mat2c, Spinor, Vec3};

const K: Vec3 = [0.0, 0.0, 1.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample {
    pub t: f64,
    pub u: Mat2c,
}

/// `H(t) = -b(t) . S = -(b . sigma) / 2`
pub fn hamiltonian(spec: &FieldSpec, t: f64) -> Mat2c {
    Mat2c::sigma_dot(spec.field_at(t).to_array()) * -0.5
}

/// Rotating-frame Hamiltonian `-alpha'(t) (e_chi . sigma) / 2`.
pub fn effective_hamiltonian(spec: &FieldSpec, t: f64) -> Mat2c {
    Mat2c::sigma_dot(spec.axis()) * (-0.5 * spec.alpha_dot().value_at(t))
}

/// `W(t) = cos(alpha/2) I + i sin(alpha/2) e_chi . sigma`
pub fn propagator_rotating(spec: &FieldSpec, t: f64) -> Mat2c {
    pauli_exp_unchecked(spec.axis(), spec.alpha().value_at(t))
}

/// The frame change `exp(-i beta(t) s3 / 2)`.
pub fn frame_rotation(spec: &FieldSpec, t: f64) -> Mat2c {
    pauli_exp_unchecked(K, -spec.beta().value_at(t))
}

pub fn propagator(spec: &FieldSpec, t: f64) -> PropagatorSample {
    PropagatorSample {
        t,
        u: frame_rotation(spec, t) * propagator_rotating(spec, t),
    }
}

/// Exact time derivative of `U(t)` by the product rule.
pub fn propagator_derivative(spec: &FieldSpec, t: f64) -> Mat2c {
    let frame = frame_rotation(spec, t);
    let w = propagator_rotating(spec, t);
    let half_i = Complex64::new(0.0, 0.5);
    let frame_dot = Mat2c::sigma3() * frame * (-half_i * spec.beta_dot().value_at(t));
    let w_dot = Mat2c::sigma_dot(spec.axis()) * w * (half_i * spec.alpha_dot().value_at(t));
    frame_dot * w + frame * w_dot
}

pub fn evolve(spec: &FieldSpec, psi0: &Spinor, t: f64) -> Spinor {
    propagator(spec, t).u.apply(psi0)
}

/// Bloch vector of `U(t) psi0`.
pub fn bloch_at(spec: &FieldSpec, psi0: &Spinor, t: f64) -> Result<BlochVector> {
    hopf_map(&evolve(spec, psi0, t))
}

/// `d/dt <psi(t)|sigma_k|psi(t)>` from the exact propagator derivative.
pub fn bloch_velocity(spec: &FieldSpec, psi0: &Spinor, t: f64) -> Vec3 {
    let psi = evolve(spec, psi0, t);
    let psi_dot = propagator_derivative(spec, t).apply(psi0);
    let sigmas = [Mat2c::sigma1(), Mat2c::sigma2(), Mat2c::sigma3()];
    sigmas.map(|s| 2.0 * psi_dot.inner(&s.apply(&psi)).re)
}

/// Spin-flip probability from `|+>`: `sin^2(chi) sin^2(alpha(t) / 2)`.
pub fn transition_probability(spec: &FieldSpec, t: f64) -> f64 {
    let s = spec.chi().sin() * (0.5 * spec.alpha().value_at(t)).sin();
    s * s
}
