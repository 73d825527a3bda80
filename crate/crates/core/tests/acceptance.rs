//! Acceptance gate: one test per check. Run with
//! `cargo test -p spinloop --test acceptance -- --nocapture --test-threads 1`
//! to see the measured values, one line per check.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};

use common::{random_spec, rng, spec};
use rand::Rng;
use spinloop::evolution::bloch_velocity;
use spinloop::loops::QUAD_TOL;
use spinloop::{
    bloch_at, check_loop, evolve, fresnel_c, geometric_phase_b3const, geometric_phase_closed,
    geometric_phase_eigenpath, geometric_phase_numeric, integrate_bloch, integrate_propagator,
    inverse_field, parse, phase_distance, propagator, quad, transition_probability, BlochVector,
    EigenSign, FieldSpec, Mat2c, Spinor, TimeFn, LOOP_TOL,
};

const TAU: f64 = 2.0 * PI;

struct Outcome {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(name: &'static str, worst: f64, tol: f64) -> Outcome {
    Outcome {
        name,
        pass: worst <= tol,
        detail: format!("worst {worst:.3e} (tol {tol:.0e})"),
    }
}

fn cos_chi_four_fifths() -> f64 {
    0.8f64.acos()
}

fn fresnel_alpha() -> TimeFn {
    parse("5/(2*pi)*t^2").unwrap()
}

fn fresnel_spec() -> FieldSpec {
    FieldSpec::from_b3(
        fresnel_alpha(),
        &TimeFn::constant(3.0),
        cos_chi_four_fifths(),
    )
    .unwrap()
}

fn fresnel_integral() -> Outcome {
    let alpha = fresnel_alpha();
    let value = quad(|t| alpha.value_at(t).cos(), 0.0, TAU, QUAD_TOL).unwrap();
    let closed = PI * fresnel_c(2.0 * 5f64.sqrt()) / 5f64.sqrt();
    let worst = (value - 0.700896).abs().max((closed - 0.700896).abs());
    let mut o = outcome("fresnel integral", worst, 1e-5);
    o.detail = format!(
        "quad {value:.10}, pi C(2 sqrt 5)/sqrt 5 = {closed:.10}; {}",
        o.detail
    );
    o
}

fn fresnel_loop() -> Outcome {
    let r = check_loop(&fresnel_spec(), TAU, LOOP_TOL).unwrap();
    Outcome {
        name: "fresnel loop classification",
        pass: r.is_loop && r.ell == 5 && r.m == 1 && r.is_strong,
        detail: format!(
            "loop={} ell={} m={} strong={} residuals ({:.1e}, {:.1e})",
            r.is_loop, r.ell, r.m, r.is_strong, r.residual_alpha, r.residual_beta
        ),
    }
}

fn propagator_oracle() -> Outcome {
    let specs = [
        spec("2*t", "t", FRAC_PI_6),
        spec("t^2", "0.5*t", FRAC_PI_4),
        fresnel_spec(),
        spec("t + 0.7*sin(2*t)", "cos(t) - 1", FRAC_PI_2),
        spec("0.5*sin(3*t) + 0.3*t^2", "0.4*sin(t) + 0.2*t", FRAC_PI_6),
        spec("1.5*t", "sin(2*t)", FRAC_PI_4),
    ];
    let mut worst = 0.0f64;
    for s in &specs {
        let traj = integrate_propagator(|t| s.field_at(t), TAU, 20_000).unwrap();
        for (t, u) in traj.iter() {
            worst = worst.max(propagator(s, t).u.max_abs_diff(u));
        }
    }
    let mut o = outcome("propagator oracle agreement", worst, 1e-7);
    o.detail = format!("{} specs, {}", specs.len(), o.detail);
    o
}

fn rabi_identity() -> Outcome {
    let mut r = rng(4);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let s = random_spec(&mut r);
        let t = r.gen_range(0.0..10.0);
        let psi = evolve(&s, &Spinor::UP, t);
        let direct = Spinor::DOWN.inner(&psi).norm_sqr();
        worst = worst.max((transition_probability(&s, t) - direct).abs());
    }
    outcome("rabi identity", worst, 1e-10)
}

/// Loop specs at `tau = 2 pi` for the phase comparisons.
fn loop_corpus() -> Vec<FieldSpec> {
    vec![
        fresnel_spec(),
        spec("2*t", "t", FRAC_PI_4),
        spec("1/(2*pi)*t^2", "t + 0.5*sin(t)", FRAC_PI_3),
        spec("2*t + 0.3*sin(2*t)", "2*t - 0.4*sin(t)", FRAC_PI_6),
        spec("3/(2*pi)*t^2", "cos(t) - 1", 1.0),
        spec("3*t", "-1*t", 2.0),
    ]
}

/// Smallest `1 + n3` along the exact trajectory of `(theta0, 0)`.
fn south_margin(s: &FieldSpec, theta0: f64) -> f64 {
    let psi0 = Spinor::from_angles(theta0, 0.0);
    (0..=2000)
        .map(|k| bloch_at(s, &psi0, TAU * k as f64 / 2000.0).unwrap().n3 + 1.0)
        .fold(f64::INFINITY, f64::min)
}

fn phase_oracles() -> Outcome {
    let mut r = rng(5);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for s in loop_corpus() {
        let mut thetas = vec![s.chi()];
        while thetas.len() < 11 {
            let theta0 = r.gen_range(0.0..PI);
            if south_margin(&s, theta0) >= 0.05 {
                thetas.push(theta0);
            }
        }
        for theta0 in thetas {
            let numeric = geometric_phase_numeric(&s, theta0, 0.0, TAU, 20_000).unwrap();
            let closed = geometric_phase_closed(&s, theta0, TAU).unwrap();
            worst = worst.max(phase_distance(numeric.gamma, closed.gamma));
            checked += 1;
        }
    }
    let mut o = outcome("geometric phase oracle equivalence", worst, 1e-4);
    o.detail = format!("{checked} cyclic states, {}", o.detail);
    o
}

fn eigenpath_phases() -> Outcome {
    let mut worst = 0.0f64;
    let mut parity_ok = true;
    for n in 0..=3i64 {
        let beta = if n == 0 {
            "sin(t)".to_string()
        } else {
            format!("{n}*t")
        };
        for chi in [FRAC_PI_6, cos_chi_four_fifths(), FRAC_PI_2] {
            let s = spec("t", &beta, chi);
            for sign in [EigenSign::Plus, EigenSign::Minus] {
                let (theta0, phi0) = sign.initial_angles(chi);
                let numeric = geometric_phase_numeric(&s, theta0, phi0, TAU, 20_000).unwrap();
                let exact = geometric_phase_eigenpath(chi, n, sign);
                worst = worst.max((numeric.gamma_raw - exact.gamma_raw).abs());
                if chi == FRAC_PI_2 {
                    let expected = if n % 2 == 0 { 0.0 } else { PI };
                    parity_ok &= phase_distance(exact.gamma, expected) <= 1e-14;
                    parity_ok &= phase_distance(numeric.gamma, expected) <= 1e-6;
                }
            }
        }
    }
    let mut o = outcome("eigenpath phases", worst, 1e-6);
    o.pass &= parity_ok;
    o.detail = format!(
        "{}, chi = pi/2 parity {}",
        o.detail,
        if parity_ok { "holds" } else { "fails" }
    );
    o
}

fn consistency_chain() -> Outcome {
    let chi = cos_chi_four_fifths();
    let closed = geometric_phase_b3const(3.0, &fresnel_alpha(), chi, chi, TAU).unwrap();
    let eigen = geometric_phase_eigenpath(chi, 1, EigenSign::Plus);
    let numeric = geometric_phase_numeric(&fresnel_spec(), chi, 0.0, TAU, 20_000).unwrap();
    let values = [closed.gamma, eigen.gamma, numeric.gamma];
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            worst = worst.max(phase_distance(values[i], values[j]));
        }
    }
    worst = worst.max(phase_distance(eigen.gamma, -PI / 5.0));
    let mut o = outcome("fresnel phase consistency chain", worst, 1e-5);
    o.detail = format!(
        "closed {:.9}, eigenpath {:.9}, numeric {:.9}; {}",
        values[0], values[1], values[2], o.detail
    );
    o
}

fn loop_parity() -> Outcome {
    let strong = [
        spec("2*t", "2*t", FRAC_PI_4),
        spec("t", "t", FRAC_PI_3),
        fresnel_spec(),
        spec("3/(2*pi)*t^2", "t + 0.5*sin(t)", 1.0),
        spec("3*t + 0.2*sin(t)", "t", FRAC_PI_2),
    ];
    let relaxed = [
        spec("2*t", "t", FRAC_PI_6),
        spec("t", "0", 0.7),
        spec("1/(2*pi)*t^2", "2*t", FRAC_PI_4),
        spec("t + 0.3*sin(t)", "2*t - 0.4*sin(2*t)", 2.0),
        spec("4*t", "-1*t", 1.2),
    ];
    let mut worst = 0.0f64;
    let mut classified = true;
    for (specs, want_strong) in [(&strong, true), (&relaxed, false)] {
        for s in specs.iter() {
            let r = check_loop(s, TAU, LOOP_TOL).unwrap();
            classified &= r.is_loop && r.is_strong == want_strong;
            let target = Mat2c::IDENTITY * if want_strong { 1.0 } else { -1.0 };
            worst = worst.max(propagator(s, TAU).u.max_abs_diff(&target));
        }
    }
    let mut o = outcome("loop parity", worst, 1e-9);
    o.pass &= classified;
    o.detail = format!(
        "{} strong, {} relaxed, {}",
        strong.len(),
        relaxed.len(),
        o.detail
    );
    o
}

fn initial_condition_independence() -> Outcome {
    let s = spec("t^2", "0.5*t", FRAC_PI_4);
    let steps = 20_000;
    let stride = steps / 50;
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n0 = BlochVector::from_angles(r.gen_range(0.0..PI), r.gen_range(0.0..TAU));
        let traj = integrate_bloch(|t| s.field_at(t), &n0, TAU, steps).unwrap();
        for k in (stride..=steps).step_by(stride) {
            let t = traj.times()[k];
            let exact = s.rotation_at(t).apply(n0.to_array());
            let got = traj.states()[k].to_array();
            for i in 0..3 {
                worst = worst.max((exact[i] - got[i]).abs());
            }
        }
    }
    outcome("initial-condition independence", worst, 1e-7)
}

fn inverse_round_trip() -> Outcome {
    let specs = [
        spec("t^2", "0.5*t", FRAC_PI_4),
        fresnel_spec(),
        spec("t + 0.7*sin(2*t)", "cos(t) - 1", FRAC_PI_3),
        spec("2*t", "t", FRAC_PI_6),
    ];
    let mut r = rng(10);
    let mut worst = 0.0f64;
    let mut used = 0;
    for s in &specs {
        for _ in 0..5 {
            let psi0 = Spinor::from_angles(r.gen_range(0.0..PI), r.gen_range(0.0..TAU));
            for k in 0..=400 {
                let t = TAU * k as f64 / 400.0;
                let n = bloch_at(s, &psi0, t).unwrap();
                if n.n3.abs() < 1e-3 {
                    continue;
                }
                let b = s.field_at(t);
                let got = inverse_field(&n, bloch_velocity(s, &psi0, t), b.b3).unwrap();
                worst = worst.max((got.b1 - b.b1).abs()).max((got.b2 - b.b2).abs());
                used += 1;
            }
        }
    }
    let mut o = outcome("inverse-method round trip", worst, 1e-6);
    o.detail = format!("{used} samples, {}", o.detail);
    o
}

fn report(number: usize, check: fn() -> Outcome) {
    let o = check();
    let verdict = if o.pass { "PASS" } else { "FAIL" };
    println!("[{verdict}] {number:>2}. {}: {}", o.name, o.detail);
    assert!(o.pass, "{}: {}", o.name, o.detail);
}

#[test]
fn check_01_fresnel_integral() {
    report(1, fresnel_integral);
}

#[test]
fn check_02_fresnel_loop() {
    report(2, fresnel_loop);
}

#[test]
fn check_03_propagator_oracle() {
    report(3, propagator_oracle);
}

#[test]
fn check_04_rabi_identity() {
    report(4, rabi_identity);
}

#[test]
fn check_05_phase_oracles() {
    report(5, phase_oracles);
}

#[test]
fn check_06_eigenpath_phases() {
    report(6, eigenpath_phases);
}

#[test]
fn check_07_consistency_chain() {
    report(7, consistency_chain);
}

#[test]
fn check_08_loop_parity() {
    report(8, loop_parity);
}

#[test]
fn check_09_initial_condition_independence() {
    report(9, initial_condition_independence);
}

#[test]
fn check_10_inverse_round_trip() {
    report(10, inverse_round_trip);
}
