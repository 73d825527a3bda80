//! Evolution loops and their geometric phases.
//!
//! A field spec closes a loop at `tau` when `alpha(tau) = 2 l pi` and
//! `beta(tau) = 2 m pi`; then `U(tau) = (-1)^(l+m) I` and every state returns
//! to itself. The loop is *strong* when `l + m` is even (`U(tau) = +I`).
//!
//! The Aharonov–Anandan phase of a cyclic state is `-ΔΩ / 2`, where ΔΩ is the
//! oriented solid angle swept by its Bloch vector, measured from the north
//! pole:
//!
//! ```text
//! ΔΩ = ∫ (n1 n2' - n2 n1') / (1 + n3) dt
//! ```
//!
//! For the field family the phase of the state `(theta0, phi0 = 0)` also has
//! the closed form
//!
//! ```text
//! γ = [l - m + cos(theta0 - chi)(m cos chi - l)] pi
//!     - sin(chi) sin(theta0 - chi) / 2 * ∫ beta'(t) cos(alpha(t)) dt
//! ```
//!
//! which [`geometric_phase_closed`] evaluates with adaptive quadrature.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::TimeFn;
use crate::fields::{beta_from_b3, FieldSample, FieldSpec};
use crate::integrate::{integrate_bloch, quad, Trajectory};
use crate::spin::BlochVector;

/// Default tolerance on the loop residuals, in radians.
pub const LOOP_TOL: f64 = 1e-9;
/// Default guard on `1 + n3` in the solid-angle integrand.
pub const SOUTH_GUARD: f64 = 1e-4;
/// Largest endpoint gap for a trajectory to count as closed.
pub const CLOSURE_TOL: f64 = 1e-6;
/// Absolute tolerance for the integrals in the closed-form phases.
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopReport {
    pub tau: f64,
    pub ell: i64,
    pub m: i64,
    pub is_loop: bool,
    pub is_strong: bool,
    pub residual_alpha: f64,
    pub residual_beta: f64,
}

impl LoopReport {
    /// `(-1)^(l + m)`, the sign of `U(tau)` at a loop.
    pub fn parity(&self) -> f64 {
        if (self.ell + self.m).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn require_loop(self) -> Result<Self> {
        if self.is_loop {
            Ok(self)
        } else {
            Err(Error::NotALoop {
                tau: self.tau,
                residual_alpha: self.residual_alpha,
                residual_beta: self.residual_beta,
            })
        }
    }
}

pub fn check_loop(spec: &FieldSpec, tau: f64, tol: f64) -> Result<LoopReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tau must be positive, got {tau}"
        )));
    }
    let turns = |angle: f64| -> (i64, f64) {
        let k = (angle / (2.0 * PI)).round();
        (k as i64, (angle - 2.0 * PI * k).abs())
    };
    let (ell, residual_alpha) = turns(spec.alpha().value_at(tau));
    let (m, residual_beta) = turns(spec.beta().value_at(tau));
    let is_loop = residual_alpha <= tol && residual_beta <= tol;
    Ok(LoopReport {
        tau,
        ell,
        m,
        is_loop,
        is_strong: is_loop && (ell + m).rem_euclid(2) == 0,
        residual_alpha,
        residual_beta,
    })
}

/// Finds loop instants in `(0, t_max]` by locating the times where `alpha` or
/// `beta` crosses a multiple of `2 pi` and keeping those where the other angle
/// is also a multiple of `2 pi` within `tol`.
///
/// Crossings are bracketed on a grid of `samples` intervals and refined by
/// bisection; a level touched without a sign change is missed. If both
/// angles vanish identically every time is a loop and the list is empty.
pub fn loop_scan(
    spec: &FieldSpec,
    t_max: f64,
    samples: usize,
    tol: f64,
) -> Result<Vec<LoopReport>> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if samples < 10 {
        return Err(Error::InvalidArgument(format!(
            "need at least 10 samples, got {samples}"
        )));
    }
    let mut found: Vec<LoopReport> = Vec::new();
    for f in [spec.alpha(), spec.beta()] {
        if f.is_zero() {
            continue;
        }
        for t in level_crossings(f, t_max, samples) {
            let report = check_loop(spec, t, tol)?;
            if report.is_loop {
                found.push(report);
            }
        }
    }
    found.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let mut merged: Vec<LoopReport> = Vec::with_capacity(found.len());
    for r in found {
        match merged.last_mut() {
            Some(prev) if (r.tau - prev.tau).abs() <= 1e-9 * r.tau.max(1.0) => {
                if r.residual_alpha.max(r.residual_beta)
                    < prev.residual_alpha.max(prev.residual_beta)
                {
                    *prev = r;
                }
            }
            _ => merged.push(r),
        }
    }
    Ok(merged)
}

fn level_crossings(f: &TimeFn, t_max: f64, samples: usize) -> Vec<f64> {
    let two_pi = 2.0 * PI;
    let grid = |i: usize| t_max * i as f64 / samples as f64;
    let mut out = Vec::new();
    let mut t_a = grid(0);
    let mut f_a = f.value_at(t_a);
    for i in 1..=samples {
        let t_b = grid(i);
        let f_b = f.value_at(t_b);
        let (lo, hi) = (f_a.min(f_b), f_a.max(f_b));
        let mut k = (lo / two_pi).ceil();
        while two_pi * k <= hi {
            let level = two_pi * k;
            if level == f_b {
                out.push(t_b);
            } else if level != f_a {
                out.push(bisect(|t| f.value_at(t) - level, t_a, t_b));
            }
            k += 1.0;
        }
        t_a = t_b;
        f_a = f_b;
    }
    out
}

fn bisect(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    if g(a).abs() <= g(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMethod {
    Numeric,
    ClosedForm,
    Eigenpath,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseResult {
    /// Accumulated phase, not reduced.
    pub gamma_raw: f64,
    /// Phase reduced to `(-pi, pi]`.
    pub gamma: f64,
    /// Oriented solid angle, `-2 gamma_raw`.
    pub solid_angle: f64,
    pub method: PhaseMethod,
}

impl PhaseResult {
    fn from_gamma(gamma_raw: f64, method: PhaseMethod) -> Self {
        PhaseResult {
            gamma_raw,
            gamma: principal_value(gamma_raw),
            solid_angle: -2.0 * gamma_raw,
            method,
        }
    }
}

/// Reduces an angle to `(-pi, pi]`.
pub fn principal_value(angle: f64) -> f64 {
    // `+ 0.0` turns a negative zero into a positive one.
    let r = angle.rem_euclid(2.0 * PI) + 0.0;
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Distance between two phases on the circle, in `[0, pi]`.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    principal_value(a - b).abs()
}

/// Guards and tolerances used by the phase computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseConfig {
    pub loop_tol: f64,
    pub south_guard: f64,
    pub closure_tol: f64,
    pub quad_tol: f64,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            loop_tol: LOOP_TOL,
            south_guard: SOUTH_GUARD,
            closure_tol: CLOSURE_TOL,
            quad_tol: QUAD_TOL,
        }
    }
}

/// Oriented solid angle of a closed Bloch trajectory. `field` supplies the
/// velocity `n' = -b x n` at each sample.
pub fn solid_angle(
    traj: &Trajectory<BlochVector>,
    field: impl Fn(f64) -> FieldSample,
) -> Result<f64> {
    solid_angle_with(traj, field, SOUTH_GUARD, CLOSURE_TOL)
}

pub fn solid_angle_with(
    traj: &Trajectory<BlochVector>,
    field: impl Fn(f64) -> FieldSample,
    south_guard: f64,
    closure_tol: f64,
) -> Result<f64> {
    let gap = traj.last().distance(traj.first());
    if !(gap <= closure_tol) {
        return Err(Error::OpenCurve { gap });
    }
    let mut integrand = Vec::with_capacity(traj.len());
    for (t, n) in traj.iter() {
        let margin = 1.0 + n.n3;
        if !(margin >= south_guard) {
            return Err(Error::SouthPoleSingularity { t, margin });
        }
        let b = field(t);
        if !b.is_finite() {
            return Err(Error::NonFinite {
                what: "field sample",
                t,
            });
        }
        let v = b.precession(n.to_array());
        integrand.push((n.n1 * v[1] - n.n2 * v[0]) / margin);
    }
    Ok(composite_rule(traj.times(), &integrand))
}

/// Simpson's rule on a uniform grid (3/8 rule on the last three intervals
/// when their count is odd), trapezoid otherwise.
fn composite_rule(times: &[f64], y: &[f64]) -> f64 {
    let n = times.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let h = (times[n] - times[0]) / n as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if !uniform || n < 2 {
        return times
            .windows(2)
            .zip(y.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
            .sum();
    }
    let simpson = |y: &[f64]| -> f64 {
        let m = y.len() - 1;
        let inner: f64 = (1..m)
            .map(|i| if i % 2 == 1 { 4.0 * y[i] } else { 2.0 * y[i] })
            .sum();
        h / 3.0 * (y[0] + inner + y[m])
    };
    if n.is_multiple_of(2) {
        simpson(y)
    } else if n == 3 {
        3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3])
    } else {
        let head = simpson(&y[..=n - 3]);
        let t = &y[n - 3..];
        head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
    }
}

/// Geometric phase from the solid angle of the integrated Bloch trajectory
/// starting at `(theta0, phi0)`.
pub fn geometric_phase_numeric(
    spec: &FieldSpec,
    theta0: f64,
    phi0: f64,
    tau: f64,
    steps: usize,
) -> Result<PhaseResult> {
    geometric_phase_numeric_with(spec, theta0, phi0, tau, steps, &PhaseConfig::default())
}

pub fn geometric_phase_numeric_with(
    spec: &FieldSpec,
    theta0: f64,
    phi0: f64,
    tau: f64,
    steps: usize,
    config: &PhaseConfig,
) -> Result<PhaseResult> {
    check_loop(spec, tau, config.loop_tol)?.require_loop()?;
    let n0 = BlochVector::from_angles(theta0, phi0);
    let traj = integrate_bloch(|t| spec.field_at(t), &n0, tau, steps)?;
    let omega = solid_angle_with(
        &traj,
        |t| spec.field_at(t),
        config.south_guard,
        config.closure_tol,
    )?;
    Ok(PhaseResult {
        gamma_raw: -0.5 * omega,
        gamma: principal_value(-0.5 * omega),
        solid_angle: omega,
        method: PhaseMethod::Numeric,
    })
}

fn loop_term(ell: i64, m: i64, chi: f64, theta0: f64) -> f64 {
    let (l, m) = (ell as f64, m as f64);
    (l - m + (theta0 - chi).cos() * (m * chi.cos() - l)) * PI
}

/// Closed-form phase for the state `(theta0, phi0 = 0)` at a loop instant.
pub fn geometric_phase_closed(spec: &FieldSpec, theta0: f64, tau: f64) -> Result<PhaseResult> {
    geometric_phase_closed_with(spec, theta0, tau, &PhaseConfig::default())
}

pub fn geometric_phase_closed_with(
    spec: &FieldSpec,
    theta0: f64,
    tau: f64,
    config: &PhaseConfig,
) -> Result<PhaseResult> {
    let report = check_loop(spec, tau, config.loop_tol)?.require_loop()?;
    let chi = spec.chi();
    let prefactor = -0.5 * chi.sin() * (theta0 - chi).sin();
    let integral = if prefactor == 0.0 || spec.beta_dot().is_zero() {
        0.0
    } else {
        quad(
            |t| spec.beta_dot().value_at(t) * spec.alpha().value_at(t).cos(),
            0.0,
            tau,
            config.quad_tol,
        )?
    };
    let gamma = loop_term(report.ell, report.m, chi, theta0) + prefactor * integral;
    Ok(PhaseResult::from_gamma(gamma, PhaseMethod::ClosedForm))
}

/// Closed-form phase when the axial field is a constant `b0`, so that
/// `beta' = alpha' cos chi - b0`.
pub fn geometric_phase_b3const(
    b0: f64,
    alpha: &TimeFn,
    chi: f64,
    theta0: f64,
    tau: f64,
) -> Result<PhaseResult> {
    geometric_phase_b3const_with(b0, alpha, chi, theta0, tau, &PhaseConfig::default())
}

pub fn geometric_phase_b3const_with(
    b0: f64,
    alpha: &TimeFn,
    chi: f64,
    theta0: f64,
    tau: f64,
    config: &PhaseConfig,
) -> Result<PhaseResult> {
    let beta = beta_from_b3(alpha, &TimeFn::constant(b0), chi);
    let spec = FieldSpec::new(alpha.clone(), beta, chi)?;
    let report = check_loop(&spec, tau, config.loop_tol)?.require_loop()?;
    let prefactor = 0.5 * b0 * chi.sin() * (theta0 - chi).sin();
    let integral = if prefactor == 0.0 {
        0.0
    } else {
        quad(|t| alpha.value_at(t).cos(), 0.0, tau, config.quad_tol)?
    };
    let gamma = loop_term(report.ell, report.m, chi, theta0) + prefactor * integral;
    Ok(PhaseResult::from_gamma(gamma, PhaseMethod::ClosedForm))
}

/// Which of the two states `±e_chi` the eigenpath starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSign {
    Plus,
    Minus,
}

impl EigenSign {
    pub fn value(self) -> f64 {
        match self {
            EigenSign::Plus => 1.0,
            EigenSign::Minus => -1.0,
        }
    }

    /// Initial angles `(theta0, phi0)` of `±e_chi`.
    pub fn initial_angles(self, chi: f64) -> (f64, f64) {
        match self {
            EigenSign::Plus => (chi, 0.0),
            EigenSign::Minus => (PI - chi, PI),
        }
    }
}

/// `γ± = -n pi (1 ∓ cos chi)` for the states `±e_chi` after `n` turns of `beta`.
pub fn geometric_phase_eigenpath(chi: f64, n_turns: i64, sign: EigenSign) -> PhaseResult {
    let gamma = -(n_turns as f64) * PI * (1.0 - sign.value() * chi.cos());
    PhaseResult::from_gamma(gamma, PhaseMethod::Eigenpath)
}
