//! The two-axis field family and the inverse method.
//!
//! A [`FieldSpec`] drives every initial Bloch vector by the same rotation
//! `R(t) = R3(beta) R2(chi) R3(-alpha) R2(-chi)`: a turn by `-alpha` about
//! `e_chi = (sin chi, 0, cos chi)` followed by a turn by `beta` about `k`.
//! The field producing it is
//!
//! ```text
//! b(t) = alpha'(t) sin(chi) (cos beta, sin beta, 0) + (alpha'(t) cos(chi) - beta'(t)) k
//! ```
//!
//! in angular-frequency units (`b = mu B`, hbar = 1).

use crate::error::{Error, Result};
use crate::expr::TimeFn;
use crate::spin::{cross, dot, norm, rot3, BlochVector, Mat3, Vec3};

/// Default guard on `|n3|` for [`inverse_field`].
pub const POLE_GUARD: f64 = 1e-6;
/// Tolerance on `n . n_dot` for [`inverse_field`], relative to `max(1, |n_dot|)`.
pub const TANGENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

impl FieldSample {
    pub const ZERO: FieldSample = FieldSample {
        b1: 0.0,
        b2: 0.0,
        b3: 0.0,
    };

    pub fn new(b1: f64, b2: f64, b3: f64) -> Self {
        FieldSample { b1, b2, b3 }
    }

    pub fn to_array(self) -> Vec3 {
        [self.b1, self.b2, self.b3]
    }

    pub fn magnitude(&self) -> f64 {
        norm(self.to_array())
    }

    pub fn is_finite(&self) -> bool {
        self.b1.is_finite() && self.b2.is_finite() && self.b3.is_finite()
    }

    /// Bloch velocity `n_dot = -b x n`.
    pub fn precession(&self, n: Vec3) -> Vec3 {
        let c = cross(self.to_array(), n);
        [-c[0], -c[1], -c[2]]
    }
}

/// Parameters `(alpha, beta, chi)` of an exactly solvable field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    alpha: TimeFn,
    beta: TimeFn,
    chi: f64,
    alpha_dot: TimeFn,
    beta_dot: TimeFn,
}

impl FieldSpec {
    /// Requires `alpha(0) = beta(0) = 0` (within 1e-12) and `chi` in `[0, pi]`.
    pub fn new(alpha: TimeFn, beta: TimeFn, chi: f64) -> Result<Self> {
        let (a0, b0) = (alpha.value_at(0.0), beta.value_at(0.0));
        if !(a0.abs() <= 1e-12) {
            return Err(Error::InvalidSpec(format!("alpha(0) = {a0}, must be 0")));
        }
        if !(b0.abs() <= 1e-12) {
            return Err(Error::InvalidSpec(format!("beta(0) = {b0}, must be 0")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&chi) {
            return Err(Error::InvalidSpec(format!(
                "chi = {chi} is outside [0, pi]"
            )));
        }
        Ok(FieldSpec {
            alpha_dot: alpha.derivative(),
            beta_dot: beta.derivative(),
            alpha,
            beta,
            chi,
        })
    }

    /// The member of the family whose axial component is the prescribed `b3(t)`.
    pub fn from_b3(alpha: TimeFn, b3: &TimeFn, chi: f64) -> Result<Self> {
        let beta = beta_from_b3(&alpha, b3, chi);
        Self::new(alpha, beta, chi)
    }

    pub fn alpha(&self) -> &TimeFn {
        &self.alpha
    }

    pub fn beta(&self) -> &TimeFn {
        &self.beta
    }

    pub fn alpha_dot(&self) -> &TimeFn {
        &self.alpha_dot
    }

    pub fn beta_dot(&self) -> &TimeFn {
        &self.beta_dot
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// `e_chi = (sin chi, 0, cos chi)`
    pub fn axis(&self) -> Vec3 {
        let (s, c) = self.chi.sin_cos();
        [s, 0.0, c]
    }

    pub fn field_at(&self, t: f64) -> FieldSample {
        let ad = self.alpha_dot.value_at(t);
        let bd = self.beta_dot.value_at(t);
        let beta = self.beta.value_at(t);
        let (s, c) = self.chi.sin_cos();
        FieldSample {
            b1: ad * s * beta.cos(),
            b2: ad * s * beta.sin(),
            b3: ad * c - bd,
        }
    }

    /// `R(t) = R3(beta(t)) R2(-chi)^-1 R3(-alpha(t)) R2(-chi)`.
    pub fn rotation_at(&self, t: f64) -> Mat3 {
        let alpha = self.alpha.value_at(t);
        let beta = self.beta.value_at(t);
        rot3(3, beta) * rot3(2, self.chi) * rot3(3, -alpha) * rot3(2, -self.chi)
    }
}

/// Solves `b3(t) + beta'(t) = alpha'(t) cos(chi)` for `beta` with `beta(0) = 0`.
pub fn beta_from_b3(alpha: &TimeFn, b3: &TimeFn, chi: f64) -> TimeFn {
    (alpha.derivative().scaled(chi.cos()) - b3.clone()).antiderivative()
}

/// Recovers `(b1, b2)` from a point `n`, its velocity and a chosen `b3`.
pub fn inverse_field(n: &BlochVector, n_dot: Vec3, b3: f64) -> Result<FieldSample> {
    inverse_field_with_guard(n, n_dot, b3, POLE_GUARD)
}

pub fn inverse_field_with_guard(
    n: &BlochVector,
    n_dot: Vec3,
    b3: f64,
    pole_guard: f64,
) -> Result<FieldSample> {
    if !(n.n3.abs() >= pole_guard) {
        return Err(Error::PoleSingularity { n3: n.n3 });
    }
    let tangency = dot(n.to_array(), n_dot);
    if !(tangency.abs() <= TANGENCY_TOL * norm(n_dot).max(1.0)) {
        return Err(Error::NonTangent { dot: tangency });
    }
    Ok(FieldSample {
        b1: (b3 * n.n1 + n_dot[1]) / n.n3,
        b2: (b3 * n.n2 - n_dot[0]) / n.n3,
        b3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn fresnel_alpha() -> TimeFn {
        TimeFn::poly(5.0 / (2.0 * PI), 2)
    }

    #[test]
    fn spec_validation() {
        assert!(FieldSpec::new(parse("t + 1").unwrap(), TimeFn::zero(), 0.3).is_err());
        assert!(FieldSpec::new(TimeFn::zero(), parse("cos(t)").unwrap(), 0.3).is_err());
        assert!(FieldSpec::new(TimeFn::zero(), TimeFn::zero(), -0.1).is_err());
        assert!(FieldSpec::new(TimeFn::zero(), TimeFn::zero(), 3.2).is_err());
        assert!(FieldSpec::new(parse("sin(t)").unwrap(), parse("cos(t) - 1").unwrap(), PI).is_ok());
    }

    #[test]
    fn field_at_examples() {
        let (a0, b0, chi) = (1.3, 0.4, 0.9);
        let spec = FieldSpec::new(TimeFn::poly(a0, 1), TimeFn::poly(b0, 1), chi).unwrap();
        let b = spec.field_at(0.0);
        assert_eq!(
            b,
            FieldSample::new(a0 * chi.sin(), 0.0, a0 * chi.cos() - b0)
        );

        let spec = FieldSpec::new(parse("t^2").unwrap(), parse("sin(3*t)").unwrap(), 0.0).unwrap();
        let b = spec.field_at(0.8);
        assert_eq!((b.b1, b.b2), (0.0, 0.0));
        assert!((b.b3 - (1.6 - 3.0 * 2.4f64.cos())).abs() < 1e-14);

        let chi = (0.8f64).acos();
        let spec = FieldSpec::from_b3(fresnel_alpha(), &TimeFn::constant(3.0), chi).unwrap();
        let b = spec.field_at(2.0 * PI);
        assert!((b.b3 - 3.0).abs() < 1e-12);
        assert!((b.b1.hypot(b.b2) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn beta_from_b3_examples() {
        let chi = 0.7;
        let beta = beta_from_b3(&TimeFn::poly(2.0, 1), &TimeFn::constant(0.5), chi);
        assert_eq!(beta, TimeFn::poly(2.0 * chi.cos() - 0.5, 1));

        let chi = (0.8f64).acos();
        let beta = beta_from_b3(&fresnel_alpha(), &TimeFn::constant(3.0), chi);
        assert!((beta.value_at(2.0 * PI) - 2.0 * PI).abs() < 1e-12);
        for t in [0.3, 1.0, 4.4] {
            let expected = 2.0 / PI * t * t - 3.0 * t;
            assert!((beta.value_at(t) - expected).abs() < 1e-12);
        }

        let alpha = parse("0.3*sin(2*t) + t^2").unwrap();
        let saturating = alpha.derivative().scaled(chi.cos());
        assert!(beta_from_b3(&alpha, &saturating, chi).is_zero());
    }

    #[test]
    fn b3_consistency() {
        let alpha = parse("t^2 + 0.4*sin(3*t)").unwrap();
        let b3 = parse("2 - 0.5*cos(t + 0.2) + 0.1*t").unwrap();
        let spec = FieldSpec::from_b3(alpha, &b3, 1.1).unwrap();
        for i in 0..50 {
            let t = 0.13 * i as f64;
            assert!((spec.field_at(t).b3 - b3.value_at(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_at_examples() {
        let spec =
            FieldSpec::new(parse("t^2").unwrap(), parse("0.5*t").unwrap(), FRAC_PI_3).unwrap();
        assert!(spec.rotation_at(0.0).max_abs_diff(&Mat3::IDENTITY) < 1e-15);
        assert!(spec.rotation_at(1.7).rotation_defect() < 1e-14);

        let collinear =
            FieldSpec::new(parse("t^2").unwrap(), parse("0.5*t").unwrap(), 0.0).unwrap();
        let t = 1.3;
        let expected = rot3(3, 0.5 * t - t * t);
        assert!(collinear.rotation_at(t).max_abs_diff(&expected) < 1e-14);

        let looped = FieldSpec::new(parse("t").unwrap(), parse("t").unwrap(), 0.4).unwrap();
        assert!(looped.rotation_at(2.0 * PI).max_abs_diff(&Mat3::IDENTITY) < 1e-10);
    }

    #[test]
    fn rotation_keeps_e_chi_on_a_cone() {
        let spec = FieldSpec::new(parse("t^2").unwrap(), parse("sin(t)").unwrap(), 0.5).unwrap();
        let e = BlochVector::from_array(spec.axis());
        for t in [0.2, 1.0, 2.5] {
            let n = spec.rotation_at(t).rotate(&e);
            let beta = spec.beta().value_at(t);
            let expected = [
                0.5f64.sin() * beta.cos(),
                0.5f64.sin() * beta.sin(),
                0.5f64.cos(),
            ];
            assert!((0..3).all(|i| (n.to_array()[i] - expected[i]).abs() < 1e-14));
        }
    }

    #[test]
    fn inverse_field_axial_precession() {
        let (theta, phi, b0) = (0.7, 1.2, 2.0);
        let n = BlochVector::from_angles(theta, phi);
        // phi_dot = -b0
        let n_dot = [
            theta.sin() * phi.sin() * b0,
            -theta.sin() * phi.cos() * b0,
            0.0,
        ];
        let b = inverse_field(&n, n_dot, b0).unwrap();
        assert!(b.b1.abs() < 1e-15 && b.b2.abs() < 1e-15);

        let b = inverse_field(&BlochVector::NORTH, [0.0; 3], 1.0).unwrap();
        assert_eq!((b.b1, b.b2), (0.0, 0.0));
    }

    #[test]
    fn inverse_field_satisfies_precession_equation() {
        let n = BlochVector::from_angles(1.0, -0.3);
        let n_dot = FieldSample::new(0.3, -1.2, 0.8).precession(n.to_array());
        let b = inverse_field(&n, n_dot, 0.8).unwrap();
        let residual = b.precession(n.to_array());
        assert!((0..3).all(|i| (residual[i] - n_dot[i]).abs() < 1e-8));
        assert!((b.b1 - 0.3).abs() < 1e-12 && (b.b2 + 1.2).abs() < 1e-12);
    }

    #[test]
    fn inverse_field_errors() {
        let equator = BlochVector::from_angles(PI / 2.0, 0.3);
        assert!(matches!(
            inverse_field(&equator, [0.0; 3], 1.0),
            Err(Error::PoleSingularity { .. })
        ));
        let n = BlochVector::from_angles(0.5, 0.0);
        assert!(matches!(
            inverse_field(&n, n.to_array(), 1.0),
            Err(Error::NonTangent { .. })
        ));
    }
}
