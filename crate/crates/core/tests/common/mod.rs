#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinloop::{parse, FieldSpec, Term, TimeFn};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spec(alpha: &str, beta: &str, chi: f64) -> FieldSpec {
    FieldSpec::new(parse(alpha).unwrap(), parse(beta).unwrap(), chi).unwrap()
}

/// A random angle function vanishing at t = 0: linear, quadratic and
/// sinusoidal pieces with moderate coefficients.
pub fn random_angle(rng: &mut impl Rng) -> TimeFn {
    let c = rng.gen_range(-1.0..1.0);
    TimeFn::from_terms(vec![
        Term::Poly {
            coeff: rng.gen_range(-2.0..2.0),
            power: 1,
        },
        Term::Poly {
            coeff: rng.gen_range(-0.3..0.3),
            power: 2,
        },
        Term::Sin {
            amp: rng.gen_range(-1.0..1.0),
            freq: rng.gen_range(0.2..3.0),
            phase: 0.0,
        },
        Term::Cos {
            amp: c,
            freq: rng.gen_range(0.2..3.0),
            phase: 0.0,
        },
        Term::Poly {
            coeff: -c,
            power: 0,
        },
    ])
}

pub fn random_spec(rng: &mut impl Rng) -> FieldSpec {
    let chi = rng.gen_range(0.0..std::f64::consts::PI);
    FieldSpec::new(random_angle(rng), random_angle(rng), chi).unwrap()
}
