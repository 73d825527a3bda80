//! Spinors, Bloch vectors, 2x2 complex and 3x3 real matrices.
//!
//! Conventions: hbar = 1, S = sigma / 2, sigma_3 = diag(1, -1) so that
//! |+> = (1, 0). A spinor maps to the Bloch vector n_k = <psi|sigma_k|psi>.
//!
//! Orientation: `pauli_exp(a, theta)` = exp(+i theta a.sigma / 2) rotates
//! Bloch vectors by `-theta` about `a` (right-hand rule), and `rot3(k, w)`
//! rotates by `+w`. Equivalently exp(-i theta a.sigma / 2) acts on the
//! Bloch sphere as `rot_about(a, theta)`. These signs are what make the
//! two-axis rotation matrix of the field family agree with the quantum
//! propagator; `evolution` tests lock them in.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Normalized two-component state (c_plus, c_minus) in the sigma_3 basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor {
    pub c_plus: Complex64,
    pub c_minus: Complex64,
}

impl Spinor {
    pub const UP: Spinor = Spinor {
        c_plus: ONE,
        c_minus: ZERO,
    };
    pub const DOWN: Spinor = Spinor {
        c_plus: ZERO,
        c_minus: ONE,
    };

    /// Builds a normalized spinor; the zero vector is rejected.
    pub fn new(c_plus: Complex64, c_minus: Complex64) -> Result<Self> {
        Spinor { c_plus, c_minus }.normalized()
    }

    /// The initial state `(cos(theta0/2) e^{-i phi0/2}, sin(theta0/2) e^{i phi0/2})`.
    pub fn from_angles(theta0: f64, phi0: f64) -> Self {
        let (s, c) = (0.5 * theta0).sin_cos();
        Spinor {
            c_plus: Complex64::from_polar(c, -0.5 * phi0),
            c_minus: Complex64::from_polar(s, 0.5 * phi0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c_plus.norm_sqr() + self.c_minus.norm_sqr()
    }

    pub fn normalized(self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized {
                deviation: (n - 1.0).abs(),
            });
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(self, z: Complex64) -> Self {
        Spinor {
            c_plus: self.c_plus * z,
            c_minus: self.c_minus * z,
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Spinor) -> Complex64 {
        self.c_plus.conj() * other.c_plus + self.c_minus.conj() * other.c_minus
    }

    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.c_plus - other.c_plus)
            .norm()
            .max((self.c_minus - other.c_minus).norm())
    }

    /// Bloch vector of this state (the Hopf projection).
    pub fn bloch(&self) -> Result<BlochVector> {
        hopf_map(self)
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor {
            c_plus: self.c_plus + rhs.c_plus,
            c_minus: self.c_minus + rhs.c_minus,
        }
    }
}

/// Convenience alias for [`Spinor::from_angles`].
pub fn spinor_from_angles(theta0: f64, phi0: f64) -> Spinor {
    Spinor::from_angles(theta0, phi0)
}

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub n1: f64,
    pub n2: f64,
    pub n3: f64,
}

impl BlochVector {
    pub const NORTH: BlochVector = BlochVector {
        n1: 0.0,
        n2: 0.0,
        n3: 1.0,
    };

    /// Normalizes `v`; rejects the zero vector.
    pub fn new(v: Vec3) -> Result<Self> {
        let n = norm(v);
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::NotNormalized {
                deviation: (n - 1.0).abs(),
            });
        }
        Ok(Self::from_array([v[0] / n, v[1] / n, v[2] / n]))
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochVector {
            n1: st * cp,
            n2: st * sp,
            n3: ct,
        }
    }

    pub(crate) fn from_array(v: Vec3) -> Self {
        BlochVector {
            n1: v[0],
            n2: v[1],
            n3: v[2],
        }
    }

    pub fn to_array(self) -> Vec3 {
        [self.n1, self.n2, self.n3]
    }

    pub fn distance(&self, other: &BlochVector) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
    }

    /// Spin expectation value `<S> = n / 2` (hbar = 1).
    pub fn spin_expectation(&self) -> Vec3 {
        [0.5 * self.n1, 0.5 * self.n2, 0.5 * self.n3]
    }
}

/// Maps a normalized spinor to its Bloch vector, `n_k = <psi|sigma_k|psi>`.
pub fn hopf_map(psi: &Spinor) -> Result<BlochVector> {
    let deviation = (psi.norm_sqr() - 1.0).abs();
    if !(deviation <= 1e-9) {
        return Err(Error::NotNormalized { deviation });
    }
    let z = psi.c_plus.conj() * psi.c_minus;
    Ok(BlochVector {
        n1: 2.0 * z.re,
        n2: 2.0 * z.im,
        n3: psi.c_plus.norm_sqr() - psi.c_minus.norm_sqr(),
    })
}

/// 2x2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2c(pub [[Complex64; 2]; 2]);

impl Mat2c {
    pub const IDENTITY: Mat2c = Mat2c([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: Mat2c = Mat2c([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn sigma1() -> Self {
        Mat2c([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma2() -> Self {
        Mat2c([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma3() -> Self {
        Mat2c([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `v . sigma`
    pub fn sigma_dot(v: Vec3) -> Self {
        Self::sigma1() * v[0] + Self::sigma2() * v[1] + Self::sigma3() * v[2]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2c([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let m = &self.0;
        Mat2c([[m[0][0] * z, m[0][1] * z], [m[1][0] * z, m[1][1] * z]])
    }

    pub fn commutator(&self, other: &Mat2c) -> Self {
        *self * *other - *other * *self
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2c) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |U^dagger U - I|`
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2c::IDENTITY).max_abs()
    }

    pub fn apply(&self, psi: &Spinor) -> Spinor {
        let m = &self.0;
        Spinor {
            c_plus: m[0][0] * psi.c_plus + m[0][1] * psi.c_minus,
            c_minus: m[1][0] * psi.c_plus + m[1][1] * psi.c_minus,
        }
    }
}

impl Add for Mat2c {
    type Output = Mat2c;
    fn add(self, rhs: Mat2c) -> Mat2c {
        let (a, b) = (&self.0, &rhs.0);
        Mat2c([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2c {
    type Output = Mat2c;
    fn sub(self, rhs: Mat2c) -> Mat2c {
        self + (-rhs)
    }
}

impl Neg for Mat2c {
    type Output = Mat2c;
    fn neg(self) -> Mat2c {
        self.scale(-ONE)
    }
}

impl Mul for Mat2c {
    type Output = Mat2c;
    fn mul(self, rhs: Mat2c) -> Mat2c {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2c(out)
    }
}

impl Mul<f64> for Mat2c {
    type Output = Mat2c;
    fn mul(self, k: f64) -> Mat2c {
        self.scale(Complex64::new(k, 0.0))
    }
}

impl Mul<Complex64> for Mat2c {
    type Output = Mat2c;
    fn mul(self, z: Complex64) -> Mat2c {
        self.scale(z)
    }
}

impl Mul<Spinor> for Mat2c {
    type Output = Spinor;
    fn mul(self, psi: Spinor) -> Spinor {
        self.apply(&psi)
    }
}

/// `cos(angle/2) I + i sin(angle/2) axis.sigma`, i.e. `exp(i angle axis.sigma / 2)`.
pub fn pauli_exp(axis: Vec3, angle: f64) -> Result<Mat2c> {
    let n = norm(axis);
    if !((n - 1.0).abs() <= 1e-9) {
        return Err(Error::NonUnitAxis { norm: n });
    }
    Ok(pauli_exp_unchecked(axis, angle))
}

pub(crate) fn pauli_exp_unchecked(axis: Vec3, angle: f64) -> Mat2c {
    let (s, c) = (0.5 * angle).sin_cos();
    Mat2c::IDENTITY * c + Mat2c::sigma_dot(axis) * Complex64::new(0.0, s)
}

/// 3x3 real matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = m[j][i];
            }
        }
        Mat3(out)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
    }

    pub fn rotate(&self, n: &BlochVector) -> BlochVector {
        BlochVector::from_array(self.apply(n.to_array()))
    }

    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `max |R^T R - I|` together with `|det R - 1|`.
    pub fn rotation_defect(&self) -> f64 {
        let orth = (self.transpose() * *self).max_abs_diff(&Mat3::IDENTITY);
        orth.max((self.det() - 1.0).abs())
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Mat3(out)
    }
}

/// Right-handed rotation by `angle` about coordinate axis 1, 2 or 3.
///
/// # Panics
///
/// If `axis_index` is not 1, 2 or 3.
pub fn rot3(axis_index: u8, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    match axis_index {
        1 => Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]),
        2 => Mat3([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]),
        3 => Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]),
        _ => panic!("rotation axis index must be 1, 2 or 3, got {axis_index}"),
    }
}

/// Right-handed rotation by `angle` about the unit vector `axis` (Rodrigues).
pub fn rot_about(axis: Vec3, angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    let [x, y, z] = axis;
    let v = 1.0 - c;
    Mat3([
        [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
        [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
        [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
    ])
}
