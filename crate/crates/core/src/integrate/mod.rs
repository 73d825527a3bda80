//! Numerical oracles that do not use the closed-form propagator: fixed-step
//! RK4 for the Schrödinger and Bloch equations, adaptive quadrature and the
//! Fresnel cosine integral.

mod fresnel;
mod quad;

pub use fresnel::fresnel_c;
pub use quad::{quad, quad_detailed, QuadResult, MAX_DEPTH};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::FieldSample;
use crate::spin::{BlochVector, Mat2c, Spinor};

/// States sampled on a uniform grid `t_k = t_end * k / steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
    max_drift: f64,
}

impl<S> Trajectory<S> {
    /// Builds a trajectory from aligned samples; times must be strictly increasing.
    pub fn new(times: Vec<f64>, states: Vec<S>) -> Result<Self> {
        if times.len() != states.len() || times.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Trajectory {
            times,
            states,
            max_drift: 0.0,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> &S {
        &self.states[0]
    }

    pub fn last(&self) -> &S {
        &self.states[self.states.len() - 1]
    }

    /// Largest deviation from the state's norm constraint seen before each
    /// renormalization (unitarity defect for propagators).
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }
}

fn check_grid(t_end: f64, steps: usize) -> Result<()> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_end must be positive, got {t_end}"
        )));
    }
    Ok(())
}

fn sample_field(field: &impl Fn(f64) -> FieldSample, t: f64) -> Result<FieldSample> {
    let b = field(t);
    if b.is_finite() {
        Ok(b)
    } else {
        Err(Error::NonFinite {
            what: "field sample",
            t,
        })
    }
}

/// Classic RK4 on a flat real state vector. `project` is applied after each
/// step and returns the constraint drift it removed.
fn rk4<const N: usize>(
    rhs: impl Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    y0: [f64; N],
    t_end: f64,
    steps: usize,
    mut project: impl FnMut(&mut [f64; N]) -> f64,
) -> Result<(Vec<f64>, Vec<[f64; N]>, f64)> {
    check_grid(t_end, steps)?;
    let axpy = |y: &[f64; N], k: &[f64; N], h: f64| -> [f64; N] {
        let mut out = *y;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let h = t_end / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = y0;
    let mut max_drift = 0.0f64;
    times.push(0.0);
    states.push(y);
    for k in 0..steps {
        let t = t_end * k as f64 / steps as f64;
        let k1 = rhs(t, &y)?;
        let k2 = rhs(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h))?;
        let k3 = rhs(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h))?;
        let k4 = rhs(t + h, &axpy(&y, &k3, h))?;
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        max_drift = max_drift.max(project(&mut y));
        times.push(t_end * (k + 1) as f64 / steps as f64);
        states.push(y);
    }
    Ok((times, states, max_drift))
}

fn spinor_to_flat(psi: &Spinor) -> [f64; 4] {
    [psi.c_plus.re, psi.c_plus.im, psi.c_minus.re, psi.c_minus.im]
}

fn flat_to_spinor(y: &[f64; 4]) -> Spinor {
    Spinor {
        c_plus: Complex64::new(y[0], y[1]),
        c_minus: Complex64::new(y[2], y[3]),
    }
}

fn mat_to_flat(m: &Mat2c) -> [f64; 8] {
    let e = &m.0;
    [
        e[0][0].re, e[0][0].im, e[0][1].re, e[0][1].im, e[1][0].re, e[1][0].im, e[1][1].re,
        e[1][1].im,
    ]
}

fn flat_to_mat(y: &[f64; 8]) -> Mat2c {
    Mat2c([
        [Complex64::new(y[0], y[1]), Complex64::new(y[2], y[3])],
        [Complex64::new(y[4], y[5]), Complex64::new(y[6], y[7])],
    ])
}

/// `-i H(t) = (i/2) b . sigma`
fn generator(b: FieldSample) -> Mat2c {
    Mat2c::sigma_dot(b.to_array()) * Complex64::new(0.0, 0.5)
}

/// Integrates `i dpsi/dt = H(t) psi` with `H = -(b . sigma) / 2`.
pub fn integrate_schrodinger(
    field: impl Fn(f64) -> FieldSample,
    psi0: &Spinor,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory<Spinor>> {
    let psi0 = psi0.normalized()?;
    let (times, flat, max_drift) = rk4(
        |t, y| {
            let g = generator(sample_field(&field, t)?);
            Ok(spinor_to_flat(&g.apply(&flat_to_spinor(y))))
        },
        spinor_to_flat(&psi0),
        t_end,
        steps,
        |y| {
            let norm_sqr: f64 = y.iter().map(|v| v * v).sum();
            let scale = 1.0 / norm_sqr.sqrt();
            y.iter_mut().for_each(|v| *v *= scale);
            (norm_sqr.sqrt() - 1.0).abs()
        },
    )?;
    Ok(Trajectory {
        times,
        states: flat.iter().map(flat_to_spinor).collect(),
        max_drift,
    })
}

/// Integrates `dn/dt = -b(t) x n`.
pub fn integrate_bloch(
    field: impl Fn(f64) -> FieldSample,
    n0: &BlochVector,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory<BlochVector>> {
    let n0 = BlochVector::new(n0.to_array())?;
    let (times, flat, max_drift) = rk4(
        |t, y| Ok(sample_field(&field, t)?.precession(*y)),
        n0.to_array(),
        t_end,
        steps,
        |y| {
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
            (norm - 1.0).abs()
        },
    )?;
    Ok(Trajectory {
        times,
        states: flat.into_iter().map(BlochVector::from_array).collect(),
        max_drift,
    })
}

/// Integrates `i dU/dt = H(t) U` from `U(0) = I`. No projection is applied;
/// `max_drift` reports the largest unitarity defect along the way.
pub fn integrate_propagator(
    field: impl Fn(f64) -> FieldSample,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory<Mat2c>> {
    let (times, flat, max_drift) = rk4(
        |t, y| {
            let g = generator(sample_field(&field, t)?);
            Ok(mat_to_flat(&(g * flat_to_mat(y))))
        },
        mat_to_flat(&Mat2c::IDENTITY),
        t_end,
        steps,
        |y| flat_to_mat(y).unitarity_defect(),
    )?;
    Ok(Trajectory {
        times,
        states: flat.iter().map(flat_to_mat).collect(),
        max_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, propagator};
    use crate::expr::parse;
    use crate::fields::FieldSpec;
    use crate::spin::hopf_map;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn family() -> FieldSpec {
        FieldSpec::new(parse("t^2").unwrap(), parse("0.5*t").unwrap(), FRAC_PI_4).unwrap()
    }

    #[test]
    fn constant_axial_field() {
        let b0 = 2.0;
        let psi0 = Spinor::from_angles(1.0, 0.4);
        let traj =
            integrate_schrodinger(|_| FieldSample::new(0.0, 0.0, b0), &psi0, 1.0, 1000).unwrap();
        // psi(t) = exp(i b0 t s3 / 2) psi0
        let expected = Spinor {
            c_plus: psi0.c_plus * Complex64::from_polar(1.0, 0.5 * b0),
            c_minus: psi0.c_minus * Complex64::from_polar(1.0, -0.5 * b0),
        };
        assert!(traj.last().max_abs_diff(&expected) < 1e-9);
        assert_eq!(traj.len(), 1001);
        assert_eq!(*traj.times().last().unwrap(), 1.0);
    }

    #[test]
    fn zero_field_is_stationary() {
        let psi0 = Spinor::from_angles(2.0, -1.0);
        let traj = integrate_schrodinger(|_| FieldSample::ZERO, &psi0, 3.0, 50).unwrap();
        assert!(traj
            .states()
            .iter()
            .all(|psi| psi.max_abs_diff(&psi0) < 1e-15));
    }

    #[test]
    fn family_field_matches_closed_form() {
        let spec = family();
        let psi0 = Spinor::from_angles(0.8, 2.1);
        let traj = integrate_schrodinger(|t| spec.field_at(t), &psi0, 2.0 * PI, 20_000).unwrap();
        let exact = evolve(&spec, &psi0, 2.0 * PI);
        assert!(traj.last().max_abs_diff(&exact) < 1e-7);
    }

    #[test]
    fn fourth_order_convergence() {
        let spec = family();
        let psi0 = Spinor::from_angles(0.8, 2.1);
        let exact = evolve(&spec, &psi0, 2.0 * PI);
        let errors: Vec<f64> = [250, 500, 1000]
            .iter()
            .map(|&n| {
                let traj = integrate_schrodinger(|t| spec.field_at(t), &psi0, 2.0 * PI, n).unwrap();
                traj.last().max_abs_diff(&exact)
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[0] / pair[1] >= 12.0, "ratios {errors:?}");
        }
    }

    #[test]
    fn norm_drift_is_small() {
        let spec =
            FieldSpec::new(parse("1.5*t").unwrap(), parse("0.7*sin(2*t)").unwrap(), 1.0).unwrap();
        let max_b = (0..1000)
            .map(|i| spec.field_at(2.0 * PI * i as f64 / 1000.0).magnitude())
            .fold(0.0, f64::max);
        assert!(max_b <= 10.0);
        let psi0 = Spinor::from_angles(0.3, 0.3);
        let traj = integrate_schrodinger(|t| spec.field_at(t), &psi0, 2.0 * PI, 10_000).unwrap();
        assert!(traj.max_drift() <= 1e-10, "drift {}", traj.max_drift());
        let bloch =
            integrate_bloch(|t| spec.field_at(t), &BlochVector::NORTH, 2.0 * PI, 10_000).unwrap();
        assert!(bloch.max_drift() <= 1e-10);
    }

    #[test]
    fn precession_about_k() {
        let b0 = 1.3;
        let n0 = BlochVector::from_angles(PI / 2.0, 0.0);
        let traj = integrate_bloch(|_| FieldSample::new(0.0, 0.0, b0), &n0, 3.0, 3000).unwrap();
        for (t, n) in traj.iter() {
            // phi(t) = -b0 t
            let expected = BlochVector::from_angles(PI / 2.0, -b0 * t);
            assert!(n.distance(&expected) < 1e-8);
            assert!((n.to_array().iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenpaths_only_feel_beta() {
        let spec = FieldSpec::new(
            parse("t^2 + 0.3*sin(t)").unwrap(),
            parse("sin(2*t) + 0.5*t").unwrap(),
            0.6,
        )
        .unwrap();
        let (s, c) = spec.chi().sin_cos();
        for sign in [1.0, -1.0] {
            let n0 = BlochVector::new([sign * s, 0.0, sign * c]).unwrap();
            let traj = integrate_bloch(|t| spec.field_at(t), &n0, 5.0, 10_000).unwrap();
            for (t, n) in traj.iter().step_by(97) {
                let beta = spec.beta().value_at(t);
                let expected = [sign * s * beta.cos(), sign * s * beta.sin(), sign * c];
                let got = n.to_array();
                assert!((0..3).all(|i| (got[i] - expected[i]).abs() < 1e-8));
            }
        }
    }

    #[test]
    fn schrodinger_and_bloch_agree_through_hopf() {
        let spec = family();
        let psi0 = Spinor::from_angles(2.2, -0.4);
        let n0 = hopf_map(&psi0).unwrap();
        let psi = integrate_schrodinger(|t| spec.field_at(t), &psi0, 2.0 * PI, 20_000).unwrap();
        let bloch = integrate_bloch(|t| spec.field_at(t), &n0, 2.0 * PI, 20_000).unwrap();
        for (p, n) in psi.states().iter().zip(bloch.states()).step_by(50) {
            assert!(hopf_map(p).unwrap().distance(n) < 1e-7);
        }
    }

    #[test]
    fn propagator_matches_closed_form() {
        let spec = family();
        let traj = integrate_propagator(|t| spec.field_at(t), 2.0 * PI, 20_000).unwrap();
        for (t, u) in traj.iter().step_by(400) {
            assert!(u.max_abs_diff(&propagator(&spec, t).u) < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_grids_and_fields() {
        let psi0 = Spinor::UP;
        assert!(integrate_schrodinger(|_| FieldSample::ZERO, &psi0, 1.0, 0).is_err());
        assert!(integrate_schrodinger(|_| FieldSample::ZERO, &psi0, -1.0, 10).is_err());
        let err = integrate_bloch(
            |t| FieldSample::new(1.0 / (t - 0.5), 0.0, 0.0),
            &BlochVector::NORTH,
            1.0,
            4,
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFinite { t, .. } if t == 0.5));
    }

    #[test]
    fn trajectory_requires_increasing_times() {
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1, 2]).is_ok());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![1, 2]).is_err());
        assert!(Trajectory::new(vec![0.0], vec![1, 2]).is_err());
    }
}
