//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Maximum recursion depth of a single panel.
pub const MAX_DEPTH: u32 = 40;

/// Number of equal panels the interval is split into before adapting, so that
/// oscillatory integrands are not judged from five samples.
const INITIAL_PANELS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    quad_detailed(f, a, b, tol).map(|r| r.value)
}

pub fn quad_detailed(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs finite a <= b, got [{a}, {b}]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut state = State {
        f: &f,
        error: 0.0,
        evaluations: 0,
        hit_limit: false,
    };
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut value = 0.0;
    let mut fa = state.eval(a);
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            lo + width
        };
        let mid = 0.5 * (lo + hi);
        let (fm, fb) = (state.eval(mid), state.eval(hi));
        let whole = simpson(lo, hi, fa, fm, fb);
        value += state.refine(lo, hi, fa, fm, fb, whole, panel_tol, 0);
        fa = fb;
    }
    if !value.is_finite() {
        return Err(Error::NonFinite {
            what: "integrand",
            t: a,
        });
    }
    if state.hit_limit {
        return Err(Error::SubdivisionLimit {
            value,
            estimate: state.error,
        });
    }
    Ok(QuadResult {
        value,
        error_estimate: state.error,
        evaluations: state.evaluations,
    })
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct State<'a, F> {
    f: &'a F,
    error: f64,
    evaluations: usize,
    hit_limit: bool,
}

impl<F: Fn(f64) -> f64> State<'_, F> {
    fn eval(&mut self, x: f64) -> f64 {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (self.eval(lm), self.eval(rm));
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol {
            self.error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        if depth >= MAX_DEPTH || lm <= a || rm >= b {
            self.hit_limit = true;
            self.error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}
