use std::f64::consts::PI;
use std::path::Path;

use serde::Serialize;
use spinloop::evolution::bloch_velocity;
use spinloop::loops::{geometric_phase_closed_with, geometric_phase_numeric_with};
use spinloop::{
    check_loop, evolve, hopf_map, integrate_bloch, integrate_propagator, integrate_schrodinger,
    inverse_field, loop_scan, phase_distance, propagator, transition_probability, Error,
    LoopReport, Spinor,
};

use crate::config::Scenario;
use crate::failure::Failure;
use crate::output::{scenario_dir, write_json, write_trajectory, Row};

/// Tolerance for identities that hold up to rounding.
const EXACT_TOL: f64 = 1e-10;
/// Points closer than this to the equator are skipped by the inverse-field check.
const INVERSE_MIN_N3: f64 = 1e-3;
const INVERSE_TOL: f64 = 1e-6;

/// What a command prints for one scenario, and whether everything it checked passed.
pub struct Done {
    pub lines: Vec<String>,
    pub failed_checks: usize,
}

impl Done {
    fn lines(lines: Vec<String>) -> Self {
        Done {
            lines,
            failed_checks: 0,
        }
    }
}

#[derive(Serialize)]
struct LoopInfo {
    tau: f64,
    ell: i64,
    m: i64,
    strong: bool,
    residual_alpha: f64,
    residual_beta: f64,
}

impl From<&LoopReport> for LoopInfo {
    fn from(r: &LoopReport) -> Self {
        LoopInfo {
            tau: r.tau,
            ell: r.ell,
            m: r.m,
            strong: r.is_strong,
            residual_alpha: r.residual_alpha,
            residual_beta: r.residual_beta,
        }
    }
}

#[derive(Serialize)]
struct Deviation {
    psi: f64,
    bloch: f64,
    p_flip: f64,
}

#[derive(Serialize)]
struct SimulateSummary {
    scenario: String,
    alpha: String,
    beta: String,
    b3: Option<String>,
    chi: f64,
    theta0: f64,
    phi0: f64,
    t_end: f64,
    steps: usize,
    max_deviation: Deviation,
    max_norm_drift: f64,
    #[serde(rename = "loop")]
    loop_info: Option<LoopInfo>,
}

fn initial_state(s: &Scenario) -> Spinor {
    Spinor::from_angles(s.theta0, s.phi0)
}

fn finite_spinor(psi: Spinor, t: f64) -> Result<Spinor, Error> {
    let parts = [psi.c_plus.re, psi.c_plus.im, psi.c_minus.re, psi.c_minus.im];
    if parts.iter().all(|v| v.is_finite()) {
        Ok(psi)
    } else {
        Err(Error::NonFinite {
            what: "propagator",
            t,
        })
    }
}

fn max_component_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

/// Writes `analytic.csv`, `numeric.csv` and `summary.json`.
pub fn simulate(s: &Scenario, out_dir: &Path) -> Result<Done, Failure> {
    let spec = &s.spec;
    let field = |t| spec.field_at(t);
    let psi0 = initial_state(s);
    let numeric = integrate_schrodinger(field, &psi0, s.t_end, s.steps)?;
    let flips = integrate_schrodinger(field, &Spinor::UP, s.t_end, s.steps)?;

    let mut analytic_rows = Vec::with_capacity(numeric.len());
    let mut numeric_rows = Vec::with_capacity(numeric.len());
    let mut dev = Deviation {
        psi: 0.0,
        bloch: 0.0,
        p_flip: 0.0,
    };
    for (k, (t, psi_num)) in numeric.iter().enumerate() {
        let psi = finite_spinor(evolve(spec, &psi0, t), t)?;
        let a = Row {
            t,
            n: hopf_map(&psi)?,
            p_flip: transition_probability(spec, t),
            psi,
        };
        let n = Row {
            t,
            n: hopf_map(psi_num)?,
            p_flip: flips.states()[k].c_minus.norm_sqr(),
            psi: *psi_num,
        };
        dev.psi = dev.psi.max(a.psi.max_abs_diff(&n.psi));
        dev.bloch = dev
            .bloch
            .max(max_component_diff(a.n.to_array(), n.n.to_array()));
        dev.p_flip = dev.p_flip.max((a.p_flip - n.p_flip).abs());
        analytic_rows.push(a);
        numeric_rows.push(n);
    }

    let report = check_loop(spec, s.t_end, s.tolerances.loop_tol)?;
    let loop_info = report.is_loop.then(|| LoopInfo::from(&report));
    let mut lines = vec![format!(
        "{}: {} samples, max |psi_analytic - psi_numeric| = {:e}",
        s.name,
        numeric.len(),
        dev.psi
    )];
    if let Some(l) = &loop_info {
        lines.push(format!(
            "{}: loop at t_end (ell = {}, m = {}, {})",
            s.name,
            l.ell,
            l.m,
            if l.strong { "strong" } else { "relaxed" }
        ));
    }
    let summary = SimulateSummary {
        scenario: s.name.clone(),
        alpha: spec.alpha().to_string(),
        beta: spec.beta().to_string(),
        b3: s.b3.as_ref().map(|b| b.to_string()),
        chi: spec.chi(),
        theta0: s.theta0,
        phi0: s.phi0,
        t_end: s.t_end,
        steps: s.steps,
        max_deviation: dev,
        max_norm_drift: numeric.max_drift().max(flips.max_drift()),
        loop_info,
    };

    let dir = scenario_dir(out_dir, &s.name)?;
    write_trajectory(&dir.join("analytic.csv"), &analytic_rows)?;
    write_trajectory(&dir.join("numeric.csv"), &numeric_rows)?;
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(Done::lines(lines))
}

/// The closed-form phase covers initial states in the `n1`-`n3` plane.
/// `phi0 = pi` is the same plane with `theta0` reflected.
fn closed_form_theta(theta0: f64, phi0: f64) -> Option<f64> {
    let r = phi0.rem_euclid(2.0 * PI);
    if r < 1e-12 || 2.0 * PI - r < 1e-12 {
        Some(theta0)
    } else if (r - PI).abs() < 1e-12 {
        Some(-theta0)
    } else {
        None
    }
}

#[derive(Serialize)]
struct PhaseSummary {
    scenario: String,
    tau: f64,
    theta0: f64,
    phi0: f64,
    gamma_numeric: f64,
    gamma_closed: Option<f64>,
    solid_angle: f64,
    ell: i64,
    m: i64,
    strong: bool,
    deviation: Option<f64>,
}

/// Writes `phase.json` for the scenario's initial state, with `tau = t_end`.
pub fn phase(s: &Scenario, out_dir: &Path) -> Result<Done, Failure> {
    let cfg = s.tolerances.phase_config();
    let report = check_loop(&s.spec, s.t_end, cfg.loop_tol)?;
    let numeric = geometric_phase_numeric_with(&s.spec, s.theta0, s.phi0, s.t_end, s.steps, &cfg)?;
    let closed = closed_form_theta(s.theta0, s.phi0)
        .map(|th| geometric_phase_closed_with(&s.spec, th, s.t_end, &cfg))
        .transpose()?;
    let summary = PhaseSummary {
        scenario: s.name.clone(),
        tau: s.t_end,
        theta0: s.theta0,
        phi0: s.phi0,
        gamma_numeric: numeric.gamma,
        gamma_closed: closed.map(|c| c.gamma),
        solid_angle: numeric.solid_angle,
        ell: report.ell,
        m: report.m,
        strong: report.is_strong,
        deviation: closed.map(|c| phase_distance(numeric.gamma, c.gamma)),
    };
    let mut line = format!("{}: gamma = {} (numeric)", s.name, numeric.gamma);
    if let Some(c) = closed {
        line.push_str(&format!(", {} (closed form)", c.gamma));
    }
    let dir = scenario_dir(out_dir, &s.name)?;
    write_json(&dir.join("phase.json"), &summary)?;
    Ok(Done::lines(vec![line]))
}

#[derive(Serialize)]
struct Candidate {
    tau: f64,
    ell: i64,
    m: i64,
    strong: bool,
}

#[derive(Serialize)]
struct ScanSummary {
    scenario: String,
    t_max: f64,
    samples: usize,
    tol: f64,
    candidates: Vec<Candidate>,
}

/// Writes `loop_scan.json` with every loop instant in `(0, t_max]`.
pub fn scan(s: &Scenario, t_max: f64, samples: usize, out_dir: &Path) -> Result<Done, Failure> {
    let tol = s.tolerances.loop_tol;
    let found = loop_scan(&s.spec, t_max, samples, tol)?;
    let lines = if found.is_empty() {
        vec![format!("{}: no loops up to t = {t_max}", s.name)]
    } else {
        found
            .iter()
            .map(|r| {
                format!(
                    "{}: tau = {} (ell = {}, m = {}, {})",
                    s.name,
                    r.tau,
                    r.ell,
                    r.m,
                    if r.is_strong { "strong" } else { "relaxed" }
                )
            })
            .collect()
    };
    let summary = ScanSummary {
        scenario: s.name.clone(),
        t_max,
        samples,
        tol,
        candidates: found
            .iter()
            .map(|r| Candidate {
                tau: r.tau,
                ell: r.ell,
                m: r.m,
                strong: r.is_strong,
            })
            .collect(),
    };
    let dir = scenario_dir(out_dir, &s.name)?;
    write_json(&dir.join("loop_scan.json"), &summary)?;
    Ok(Done::lines(lines))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    status: &'static str,
    worst: Option<f64>,
    tol: f64,
    note: Option<String>,
}

impl Check {
    fn measured(name: &'static str, worst: f64, tol: f64) -> Self {
        Check {
            name,
            status: if worst <= tol { "pass" } else { "fail" },
            worst: Some(worst),
            tol,
            note: None,
        }
    }

    fn skipped(name: &'static str, tol: f64, note: String) -> Self {
        Check {
            name,
            status: "skipped",
            worst: None,
            tol,
            note: Some(note),
        }
    }
}

#[derive(Serialize)]
struct VerifySummary {
    scenario: String,
    steps: usize,
    t_end: f64,
    pass: bool,
    checks: Vec<Check>,
}

fn phase_check(s: &Scenario) -> Result<Check, Failure> {
    let tol = s.tolerances.phase;
    let cfg = s.tolerances.phase_config();
    let report = check_loop(&s.spec, s.t_end, cfg.loop_tol)?;
    if !report.is_loop {
        return Ok(Check::skipped(
            "phase",
            tol,
            "t_end is not a loop instant".into(),
        ));
    }
    let Some(theta) = closed_form_theta(s.theta0, s.phi0) else {
        return Ok(Check::skipped(
            "phase",
            tol,
            "no closed form for this phi0".into(),
        ));
    };
    let numeric =
        match geometric_phase_numeric_with(&s.spec, s.theta0, s.phi0, s.t_end, s.steps, &cfg) {
            Err(e @ Error::SouthPoleSingularity { .. }) => {
                return Ok(Check::skipped("phase", tol, e.to_string()))
            }
            other => other?,
        };
    let closed = geometric_phase_closed_with(&s.spec, theta, s.t_end, &cfg)?;
    Ok(Check::measured(
        "phase",
        phase_distance(numeric.gamma, closed.gamma),
        tol,
    ))
}

/// Runs every analytic-versus-numeric comparison and writes `verify.json`.
pub fn verify(s: &Scenario, out_dir: &Path) -> Result<Done, Failure> {
    let spec = &s.spec;
    let field = |t| spec.field_at(t);
    let agreement = s.tolerances.agreement;
    let psi0 = initial_state(s);
    let n0 = hopf_map(&psi0)?;
    let mut checks = Vec::new();

    let traj = integrate_propagator(field, s.t_end, s.steps)?;
    let worst = traj
        .iter()
        .map(|(t, u)| propagator(spec, t).u.max_abs_diff(u))
        .fold(0.0, f64::max);
    checks.push(Check::measured("propagator", worst, agreement));

    let traj = integrate_schrodinger(field, &psi0, s.t_end, s.steps)?;
    let worst = traj
        .iter()
        .map(|(t, psi)| evolve(spec, &psi0, t).max_abs_diff(psi))
        .fold(0.0, f64::max);
    checks.push(Check::measured("schrodinger", worst, agreement));

    let traj = integrate_bloch(field, &n0, s.t_end, s.steps)?;
    let rotated = |t: f64| spec.rotation_at(t).apply(n0.to_array());
    let worst = traj
        .iter()
        .map(|(t, n)| max_component_diff(rotated(t), n.to_array()))
        .fold(0.0, f64::max);
    checks.push(Check::measured("bloch", worst, agreement));

    let times = traj.times();
    let mut hopf = 0.0f64;
    let mut rabi = 0.0f64;
    let mut unitarity = 0.0f64;
    let mut inverse = 0.0f64;
    for &t in times {
        let n = hopf_map(&finite_spinor(evolve(spec, &psi0, t), t)?)?;
        hopf = hopf.max(max_component_diff(n.to_array(), rotated(t)));
        let direct = Spinor::DOWN.inner(&evolve(spec, &Spinor::UP, t)).norm_sqr();
        rabi = rabi.max((transition_probability(spec, t) - direct).abs());
        unitarity = unitarity.max(propagator(spec, t).u.unitarity_defect());
        if n.n3.abs() >= INVERSE_MIN_N3 {
            let b = spec.field_at(t);
            let got = inverse_field(&n, bloch_velocity(spec, &psi0, t), b.b3)?;
            inverse = inverse
                .max((got.b1 - b.b1).abs())
                .max((got.b2 - b.b2).abs());
        }
    }
    checks.push(Check::measured("frame_rotation", hopf, EXACT_TOL));
    checks.push(Check::measured("rabi", rabi, EXACT_TOL));
    checks.push(Check::measured("unitarity", unitarity, EXACT_TOL));
    checks.push(Check::measured("inverse_field", inverse, INVERSE_TOL));
    checks.push(phase_check(s)?);

    let failed_checks = checks.iter().filter(|c| c.status == "fail").count();
    let lines = checks
        .iter()
        .map(|c| {
            let tag = match c.status {
                "pass" => "PASS",
                "fail" => "FAIL",
                _ => "SKIP",
            };
            match (c.worst, &c.note) {
                (Some(w), _) => format!(
                    "[{tag}] {}/{}: worst {w:e} (tol {:e})",
                    s.name, c.name, c.tol
                ),
                (None, Some(note)) => format!("[{tag}] {}/{}: {note}", s.name, c.name),
                (None, None) => format!("[{tag}] {}/{}", s.name, c.name),
            }
        })
        .collect();
    let summary = VerifySummary {
        scenario: s.name.clone(),
        steps: s.steps,
        t_end: s.t_end,
        pass: failed_checks == 0,
        checks,
    };
    let dir = scenario_dir(out_dir, &s.name)?;
    write_json(&dir.join("verify.json"), &summary)?;
    Ok(Done {
        lines,
        failed_checks,
    })
}
