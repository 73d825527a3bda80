//! Scenario files.
//!
//! A config is a TOML document whose top-level tables are scenarios, run in
//! file order. The table name doubles as the output subdirectory.
//!
//! ```toml
//! [fresnel]
//! alpha = "5/(2*pi)*t^2"   # time function, see the expression grammar
//! b3 = "3"                 # or `beta = "..."`, exactly one of the two
//! cos_chi = 0.8            # or `chi = ...` in radians
//! theta0 = 0.6435011087932844
//! phi0 = 0
//! t_end = "2*pi"
//! steps = 20000
//!
//! [fresnel.tolerances]
//! loop = 1e-9
//! ```
//!
//! Numeric keys accept either a number or a constant expression string such
//! as `"2*pi"`.

use std::fmt;
use std::path::Path;

use serde::Deserialize;
use spinloop::loops::{CLOSURE_TOL, QUAD_TOL, SOUTH_GUARD};
use spinloop::{parse, parse_constant, FieldSpec, PhaseConfig, TimeFn, LOOP_TOL};

pub const DEFAULT_STEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Number {
    Value(f64),
    Expr(String),
}

impl Number {
    fn resolve(&self, key: &str) -> Result<f64, String> {
        let v = match self {
            Number::Value(v) => *v,
            Number::Expr(s) => parse_constant(s).map_err(|e| format!("`{key}`: {e}"))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{key}` must be finite"))
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    alpha: String,
    beta: Option<String>,
    b3: Option<String>,
    chi: Option<Number>,
    cos_chi: Option<Number>,
    theta0: Option<Number>,
    phi0: Option<Number>,
    t_end: Number,
    steps: Option<i64>,
    #[serde(default)]
    tolerances: Tolerances,
}

/// Per-scenario tolerances; every key is optional.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Loop residual tolerance on `alpha` and `beta`, in radians.
    #[serde(rename = "loop")]
    pub loop_tol: f64,
    pub south_guard: f64,
    pub closure: f64,
    pub quad: f64,
    /// Analytic vs numeric agreement used by `verify`.
    pub agreement: f64,
    /// Numeric vs closed-form phase agreement used by `verify`.
    pub phase: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            loop_tol: LOOP_TOL,
            south_guard: SOUTH_GUARD,
            closure: CLOSURE_TOL,
            quad: QUAD_TOL,
            agreement: 1e-7,
            phase: 1e-4,
        }
    }
}

impl Tolerances {
    pub fn phase_config(&self) -> PhaseConfig {
        PhaseConfig {
            loop_tol: self.loop_tol,
            south_guard: self.south_guard,
            closure_tol: self.closure,
            quad_tol: self.quad,
        }
    }

    fn validate(&self) -> Result<(), String> {
        let all = [
            ("loop", self.loop_tol),
            ("south_guard", self.south_guard),
            ("closure", self.closure),
            ("quad", self.quad),
            ("agreement", self.agreement),
            ("phase", self.phase),
        ];
        match all.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            Some((k, v)) => Err(format!("tolerance `{k}` must be positive, got {v}")),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub spec: FieldSpec,
    /// The axial field as written in the config, when given instead of `beta`.
    pub b3: Option<TimeFn>,
    pub theta0: f64,
    pub phi0: f64,
    pub t_end: f64,
    pub steps: usize,
    pub tolerances: Tolerances,
}

/// Command-line overrides applied on top of every scenario.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub steps: Option<usize>,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<Vec<Scenario>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, overrides)
}

pub fn parse_config(text: &str, overrides: Overrides) -> Result<Vec<Scenario>, ConfigError> {
    let doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError(e.to_string()))?;
    if doc.is_empty() {
        return Err(ConfigError("config defines no scenarios".into()));
    }
    doc.into_iter()
        .map(|(name, value)| {
            scenario(&name, value, overrides)
                .map_err(|msg| ConfigError(format!("scenario `{name}`: {msg}")))
        })
        .collect()
}

fn check_name(name: &str) -> Result<(), String> {
    let ok = !name.is_empty()
        && !name.starts_with('.')
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err("names may only use ASCII letters, digits, `_`, `-` and `.`".into())
    }
}

fn scenario(name: &str, value: toml::Value, overrides: Overrides) -> Result<Scenario, String> {
    check_name(name)?;
    if !value.is_table() {
        return Err("expected a table".into());
    }
    let raw: RawScenario = value
        .try_into()
        .map_err(|e: toml::de::Error| e.message().to_string())?;

    let alpha = parse(&raw.alpha).map_err(|e| format!("`alpha`: {e}"))?;
    let chi = match (&raw.chi, &raw.cos_chi) {
        (Some(chi), None) => chi.resolve("chi")?,
        (None, Some(c)) => {
            let c = c.resolve("cos_chi")?;
            if !(-1.0..=1.0).contains(&c) {
                return Err(format!("`cos_chi` = {c} is outside [-1, 1]"));
            }
            c.acos()
        }
        _ => return Err("exactly one of `chi` and `cos_chi` is required".into()),
    };
    let (spec, b3) = match (&raw.beta, &raw.b3) {
        (Some(beta), None) => {
            let beta = parse(beta).map_err(|e| format!("`beta`: {e}"))?;
            (FieldSpec::new(alpha, beta, chi), None)
        }
        (None, Some(b3)) => {
            let b3 = parse(b3).map_err(|e| format!("`b3`: {e}"))?;
            (FieldSpec::from_b3(alpha, &b3, chi), Some(b3))
        }
        _ => return Err("exactly one of `beta` and `b3` is required".into()),
    };
    let spec = spec.map_err(|e| e.to_string())?;

    let t_end = raw.t_end.resolve("t_end")?;
    if t_end <= 0.0 {
        return Err(format!("`t_end` must be positive, got {t_end}"));
    }
    let steps = match overrides.steps {
        Some(s) => s as i64,
        None => raw.steps.unwrap_or(DEFAULT_STEPS as i64),
    };
    if steps < 2 {
        return Err(format!("`steps` must be at least 2, got {steps}"));
    }
    let mut tolerances = raw.tolerances;
    if let Some(tol) = overrides.tol {
        tolerances.loop_tol = tol;
    }
    tolerances.validate()?;

    Ok(Scenario {
        name: name.to_string(),
        spec,
        b3,
        theta0: raw.theta0.map_or(Ok(0.0), |v| v.resolve("theta0"))?,
        phi0: raw.phi0.map_or(Ok(0.0), |v| v.resolve("phi0"))?,
        t_end,
        steps: steps as usize,
        tolerances,
    })
}
