//! Symbolic time functions: finite sums of polynomial and sinusoidal terms.
//!
//! The family is closed under differentiation and antidifferentiation, which
//! is what lets the field family stay exact: the angular velocities of the
//! two rotations are derived symbolically instead of by finite differences.
//!
//! Text form (EBNF):
//!
//! ```text
//! sum     = [ "+" | "-" ] term { ( "+" | "-" ) term } ;
//! term    = coeff [ "*" ] base | base | coeff ;
//! base    = "t" [ "^" integer ] | ( "sin" | "cos" ) "(" affine ")" ;
//! affine  = [ "+" | "-" ] aterm { ( "+" | "-" ) aterm } ;
//! aterm   = coeff [ "*" ] "t" | "t" | coeff ;
//! coeff   = factor { ( "*" | "/" ) factor } ;
//! factor  = number | "pi" | "(" constant ")" | "-" factor ;
//! ```
//!
//! `constant` is a `+`/`-` sum of `coeff`s, so `5/(2*pi)` and `(1+pi)/4` are
//! both valid coefficients.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// One summand of a [`TimeFn`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    /// `coeff * t^power`
    Poly { coeff: f64, power: u32 },
    /// `amp * sin(freq * t + phase)`
    Sin { amp: f64, freq: f64, phase: f64 },
    /// `amp * cos(freq * t + phase)`
    Cos { amp: f64, freq: f64, phase: f64 },
}

impl Term {
    pub fn value_at(&self, t: f64) -> f64 {
        match *self {
            Term::Poly { coeff, power } => coeff * t.powi(power as i32),
            Term::Sin { amp, freq, phase } => amp * (freq * t + phase).sin(),
            Term::Cos { amp, freq, phase } => amp * (freq * t + phase).cos(),
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            Term::Poly { coeff, .. } => coeff == 0.0,
            Term::Sin { amp, .. } | Term::Cos { amp, .. } => amp == 0.0,
        }
    }

    /// Like terms: equal power, or equal kind, frequency and phase.
    fn same_shape(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Poly { power: a, .. }, Term::Poly { power: b, .. }) => a == b,
            (
                Term::Sin {
                    freq: f1,
                    phase: p1,
                    ..
                },
                Term::Sin {
                    freq: f2,
                    phase: p2,
                    ..
                },
            )
            | (
                Term::Cos {
                    freq: f1,
                    phase: p1,
                    ..
                },
                Term::Cos {
                    freq: f2,
                    phase: p2,
                    ..
                },
            ) => f1 == f2 && p1 == p2,
            _ => false,
        }
    }

    fn absorb(&mut self, other: &Term) {
        match (self, other) {
            (Term::Poly { coeff, .. }, Term::Poly { coeff: c, .. }) => *coeff += c,
            (Term::Sin { amp, .. }, Term::Sin { amp: a, .. })
            | (Term::Cos { amp, .. }, Term::Cos { amp: a, .. }) => *amp += a,
            _ => unreachable!("absorb called on unlike terms"),
        }
    }

    fn scaled(self, k: f64) -> Term {
        match self {
            Term::Poly { coeff, power } => Term::Poly {
                coeff: coeff * k,
                power,
            },
            Term::Sin { amp, freq, phase } => Term::Sin {
                amp: amp * k,
                freq,
                phase,
            },
            Term::Cos { amp, freq, phase } => Term::Cos {
                amp: amp * k,
                freq,
                phase,
            },
        }
    }
}

/// A real function of time, `f(t) = Σ terms`.
///
/// Values are kept normalized: like terms (polynomials of equal power,
/// sinusoids of the same kind, frequency and phase) are merged into the
/// position of the first one and zero terms are dropped. No trigonometric
/// identities are applied.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeFn {
    terms: Vec<Term>,
}

impl TimeFn {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut out: Vec<Term> = Vec::new();
        for term in terms {
            match out.iter_mut().find(|t| t.same_shape(&term)) {
                Some(existing) => existing.absorb(&term),
                None => out.push(term),
            }
        }
        out.retain(|t| !t.is_zero());
        Self { terms: out }
    }

    pub fn constant(c: f64) -> Self {
        Self::poly(c, 0)
    }

    pub fn poly(coeff: f64, power: u32) -> Self {
        Self::from_terms([Term::Poly { coeff, power }])
    }

    pub fn sin(amp: f64, freq: f64, phase: f64) -> Self {
        Self::from_terms([Term::Sin { amp, freq, phase }])
    }

    pub fn cos(amp: f64, freq: f64, phase: f64) -> Self {
        Self::from_terms([Term::Cos { amp, freq, phase }])
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the function, rejecting non-finite `t`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { what: "time", t });
        }
        Ok(self.value_at(t))
    }

    /// Unchecked evaluation. Terms are summed in stored order.
    pub fn value_at(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.value_at(t)).sum()
    }

    pub fn derivative(&self) -> TimeFn {
        Self::from_terms(self.terms.iter().filter_map(|&term| match term {
            Term::Poly { power: 0, .. } => None,
            Term::Poly { coeff, power } => Some(Term::Poly {
                coeff: coeff * power as f64,
                power: power - 1,
            }),
            Term::Sin { amp, freq, phase } => Some(Term::Cos {
                amp: amp * freq,
                freq,
                phase,
            }),
            Term::Cos { amp, freq, phase } => Some(Term::Sin {
                amp: -amp * freq,
                freq,
                phase,
            }),
        }))
    }

    /// Antiderivative `F` with `F(0) = 0`.
    ///
    /// Zero-frequency sinusoids are constants and integrate to a linear term.
    pub fn antiderivative(&self) -> TimeFn {
        let raw = Self::from_terms(self.terms.iter().map(|&term| match term {
            Term::Poly { coeff, power } => Term::Poly {
                coeff: coeff / (power + 1) as f64,
                power: power + 1,
            },
            Term::Sin {
                amp,
                freq: 0.0,
                phase,
            } => Term::Poly {
                coeff: amp * phase.sin(),
                power: 1,
            },
            Term::Cos {
                amp,
                freq: 0.0,
                phase,
            } => Term::Poly {
                coeff: amp * phase.cos(),
                power: 1,
            },
            Term::Sin { amp, freq, phase } => Term::Cos {
                amp: -amp / freq,
                freq,
                phase,
            },
            Term::Cos { amp, freq, phase } => Term::Sin {
                amp: amp / freq,
                freq,
                phase,
            },
        }));
        let offset = raw.value_at(0.0);
        raw - TimeFn::constant(offset)
    }

    pub fn scaled(&self, k: f64) -> TimeFn {
        Self::from_terms(self.terms.iter().map(|t| t.scaled(k)))
    }
}

impl Add for TimeFn {
    type Output = TimeFn;

    fn add(self, rhs: TimeFn) -> TimeFn {
        Self::from_terms(self.terms.into_iter().chain(rhs.terms))
    }
}

impl Neg for TimeFn {
    type Output = TimeFn;

    fn neg(self) -> TimeFn {
        self.scaled(-1.0)
    }
}

impl Sub for TimeFn {
    type Output = TimeFn;

    fn sub(self, rhs: TimeFn) -> TimeFn {
        self + (-rhs)
    }
}

impl fmt::Display for TimeFn {
    /// Renders in the text grammar; `parse` reads the output back to an equal
    /// value (floats use the shortest round-trip representation).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, term) in self.terms.iter().enumerate() {
            let lead = match *term {
                Term::Poly { coeff, .. } => coeff,
                Term::Sin { amp, .. } | Term::Cos { amp, .. } => amp,
            };
            let mag = lead.abs();
            match (i, lead.is_sign_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            match *term {
                Term::Poly { power: 0, .. } => write!(f, "{mag:?}")?,
                Term::Poly { power: 1, .. } => write!(f, "{mag:?}*t")?,
                Term::Poly { power, .. } => write!(f, "{mag:?}*t^{power}")?,
                Term::Sin { freq, phase, .. } => {
                    write!(f, "{mag:?}*sin(")?;
                    write_affine(f, freq, phase)?;
                    f.write_str(")")?;
                }
                Term::Cos { freq, phase, .. } => {
                    write!(f, "{mag:?}*cos(")?;
                    write_affine(f, freq, phase)?;
                    f.write_str(")")?;
                }
            }
        }
        Ok(())
    }
}

fn write_affine(f: &mut fmt::Formatter<'_>, freq: f64, phase: f64) -> fmt::Result {
    write!(f, "{freq:?}*t")?;
    if phase.is_sign_negative() {
        write!(f, " - {:?}", phase.abs())
    } else {
        write!(f, " + {phase:?}")
    }
}

impl std::str::FromStr for TimeFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Parses a time function from its text form.
pub fn parse(text: &str) -> Result<TimeFn> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        end: text.len(),
    };
    let f = p.sum()?;
    if let Some(tok) = p.peek() {
        return Err(p.error_at(tok.pos, "unexpected trailing input"));
    }
    Ok(f)
}

/// Parses a constant expression in the coefficient grammar (`2*pi`, `5/(2*pi)`, `-0.25`).
pub fn parse_constant(text: &str) -> Result<f64> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        end: text.len(),
    };
    let v = p.constant()?;
    if let Some(tok) = p.peek() {
        return Err(p.error_at(tok.pos, "unexpected trailing input"));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Pi,
    T,
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, pos });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: e[+-]digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[pos..i];
            let value: f64 = lit.parse().map_err(|_| Error::Syntax {
                pos,
                msg: format!("malformed number `{lit}`"),
            })?;
            out.push(Token {
                tok: Tok::Num(value),
                pos,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let tok = match &text[pos..i] {
                "t" => Tok::T,
                "pi" => Tok::Pi,
                other => Tok::Ident(other.to_string()),
            };
            out.push(Token { tok, pos });
            continue;
        }
        let ch = text[pos..].chars().next().unwrap_or('?');
        return Err(Error::Syntax {
            pos,
            msg: format!("unexpected character `{ch}`"),
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn peek_tok(&self) -> Option<&Tok> {
        self.peek().map(|t| &t.tok)
    }

    fn peek_tok_at(&self, offset: usize) -> Option<&Tok> {
        self.tokens.get(self.idx + offset).map(|t| &t.tok)
    }

    fn pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let tok = self.tokens.get(self.idx).cloned();
        self.idx += 1;
        tok
    }

    fn error_at(&self, pos: usize, msg: &str) -> Error {
        Error::Syntax {
            pos,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(tok) if tok.tok == want => Ok(()),
            _ => Err(self.error_at(pos, &format!("expected {what}"))),
        }
    }

    fn starts_base(tok: Option<&Tok>) -> bool {
        matches!(tok, Some(Tok::T) | Some(Tok::Ident(_)))
    }

    fn sum(&mut self) -> Result<TimeFn> {
        let mut terms = Vec::new();
        let mut sign = match self.peek_tok() {
            Some(Tok::Plus) => {
                self.bump();
                1.0
            }
            Some(Tok::Minus) => {
                self.bump();
                -1.0
            }
            None => return Err(self.error_at(self.end, "empty expression")),
            _ => 1.0,
        };
        loop {
            terms.push(self.term()?.scaled(sign));
            sign = match self.peek_tok() {
                Some(Tok::Plus) => 1.0,
                Some(Tok::Minus) => -1.0,
                _ => break,
            };
            self.bump();
        }
        Ok(TimeFn::from_terms(terms))
    }

    fn term(&mut self) -> Result<Term> {
        if Self::starts_base(self.peek_tok()) {
            return self.base(1.0);
        }
        let coeff = self.coeff()?;
        match self.peek_tok() {
            Some(Tok::Star) => {
                self.bump();
                self.base(coeff)
            }
            tok if Self::starts_base(tok) => self.base(coeff),
            _ => Ok(Term::Poly { coeff, power: 0 }),
        }
    }

    fn base(&mut self, coeff: f64) -> Result<Term> {
        let pos = self.pos();
        match self.bump().map(|t| t.tok) {
            Some(Tok::T) => {
                if self.peek_tok() == Some(&Tok::Caret) {
                    self.bump();
                    let pos = self.pos();
                    match self.bump().map(|t| t.tok) {
                        Some(Tok::Num(v))
                            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 =>
                        {
                            Ok(Term::Poly {
                                coeff,
                                power: v as u32,
                            })
                        }
                        _ => Err(self.error_at(pos, "expected a non-negative integer exponent")),
                    }
                } else {
                    Ok(Term::Poly { coeff, power: 1 })
                }
            }
            Some(Tok::Ident(name)) => {
                let is_sin = match name.as_str() {
                    "sin" => true,
                    "cos" => false,
                    _ => return Err(Error::UnsupportedFunction { name, pos }),
                };
                self.expect(Tok::LParen, "`(`")?;
                let (freq, phase) = self.affine()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(if is_sin {
                    Term::Sin {
                        amp: coeff,
                        freq,
                        phase,
                    }
                } else {
                    Term::Cos {
                        amp: coeff,
                        freq,
                        phase,
                    }
                })
            }
            _ => Err(self.error_at(pos, "expected `t`, `sin(` or `cos(`")),
        }
    }

    fn affine(&mut self) -> Result<(f64, f64)> {
        let mut freq = 0.0;
        let mut phase = 0.0;
        let mut sign = match self.peek_tok() {
            Some(Tok::Plus) => {
                self.bump();
                1.0
            }
            Some(Tok::Minus) => {
                self.bump();
                -1.0
            }
            _ => 1.0,
        };
        loop {
            if self.peek_tok() == Some(&Tok::T) {
                self.bump();
                freq += sign;
            } else {
                let c = self.coeff()?;
                match self.peek_tok() {
                    Some(Tok::Star) => {
                        self.bump();
                        self.expect(Tok::T, "`t`")?;
                        freq += sign * c;
                    }
                    Some(Tok::T) => {
                        self.bump();
                        freq += sign * c;
                    }
                    _ => phase += sign * c,
                }
            }
            sign = match self.peek_tok() {
                Some(Tok::Plus) => 1.0,
                Some(Tok::Minus) => -1.0,
                _ => break,
            };
            self.bump();
        }
        Ok((freq, phase))
    }

    /// `factor { (*|/) factor }`, stopping before a `*` that introduces a base.
    fn coeff(&mut self) -> Result<f64> {
        let mut value = self.factor()?;
        loop {
            match self.peek_tok() {
                Some(Tok::Star) if !Self::starts_base(self.peek_tok_at(1)) => {
                    self.bump();
                    value *= self.factor()?;
                }
                Some(Tok::Slash) => {
                    self.bump();
                    value /= self.factor()?;
                }
                _ => break,
            }
        }
        if !value.is_finite() {
            return Err(self.error_at(self.pos(), "coefficient is not finite"));
        }
        Ok(value)
    }

    fn factor(&mut self) -> Result<f64> {
        let pos = self.pos();
        match self.bump().map(|t| t.tok) {
            Some(Tok::Num(v)) => Ok(v),
            Some(Tok::Pi) => Ok(std::f64::consts::PI),
            Some(Tok::Minus) => Ok(-self.factor()?),
            Some(Tok::LParen) => {
                let v = self.constant()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(v)
            }
            Some(Tok::T) => Err(self.error_at(pos, "`t` is not allowed in a coefficient")),
            Some(Tok::Ident(name)) => Err(Error::UnsupportedFunction { name, pos }),
            _ => Err(self.error_at(pos, "expected a number, `pi` or `(`")),
        }
    }

    fn constant(&mut self) -> Result<f64> {
        let mut value = match self.peek_tok() {
            Some(Tok::Plus) => {
                self.bump();
                self.coeff()?
            }
            _ => self.coeff()?,
        };
        loop {
            match self.peek_tok() {
                Some(Tok::Plus) => {
                    self.bump();
                    value += self.coeff()?;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    value -= self.coeff()?;
                }
                _ => break,
            }
        }
        Ok(value)
    }
}
