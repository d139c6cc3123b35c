use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::poly::{Complex, RationalMap};

const SYMMETRY_SEED: u64 = 0x1a3b_d0dd;
const SYMMETRY_TOL: f64 = 1e-9;

/// Random sample points in the annulus `0.2 ≤ |z| ≤ 2` where `R` is finite and
/// not close to a pole.
pub(crate) fn sample_points(r: &RationalMap, count: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let z = Complex::from_polar(rng.gen_range(0.2..2.0), rng.gen_range(0.0..2.0 * PI));
        let den = r.den().eval(z).norm();
        let scale: f64 = r.den().coeffs().iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());
        let w = r.eval_c(z);
        if den > 1e-6 * scale && w.re.is_finite() && w.im.is_finite() {
            out.push(z);
        }
    }
    out
}

/// Sampled test of `R(λz) = λR(z)` for every `d`-th root of unity `λ`.
pub fn check_lambda_odd(r: &RationalMap, d: usize, trials: usize) -> bool {
    let lambdas: Vec<Complex> = (1..d).map(|j| Complex::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect();
    let points = sample_points(r, trials, SYMMETRY_SEED ^ d as u64);
    if points.len() < trials {
        return false;
    }
    points.iter().all(|&z| {
        let w = r.eval_c(z);
        lambdas.iter().all(|&l| {
            let lhs = r.eval_c(l * z);
            (lhs - l * w).norm() <= SYMMETRY_TOL * (1.0 + w.norm())
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfinityKind {
    Simple,
    SuperattractingAtInfinity,
    NotFixed,
}

/// Behaviour of `R` at `∞` from the degree difference of numerator and denominator.
pub fn check_infinity_simple(r: &RationalMap) -> InfinityKind {
    let diff = r.num().deg() as i64 - r.den().deg() as i64;
    if r.is_zero() || diff < 1 {
        InfinityKind::NotFixed
    } else if diff == 1 {
        InfinityKind::Simple
    } else {
        InfinityKind::SuperattractingAtInfinity
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_make, Polynomial};

    #[test]
    fn simple_examples() {
        let z_plus_one = RationalMap::from_poly(Polynomial::from_real(&[1.0, 1.0]));
        assert!(!check_lambda_odd(&z_plus_one, 2, 10));
        let z3 = RationalMap::from_poly(Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]));
        assert!(check_lambda_odd(&z3, 2, 10));
        assert_eq!(check_infinity_simple(&z3), InfinityKind::SuperattractingAtInfinity);
        let inv = rat_make(Polynomial::one(), Polynomial::z()).unwrap();
        assert_eq!(check_infinity_simple(&inv), InfinityKind::NotFixed);
        let newton = rat_make(Polynomial::from_real(&[1.0, 0.0, 1.0]), Polynomial::from_real(&[0.0, 2.0])).unwrap();
        assert_eq!(check_infinity_simple(&newton), InfinityKind::Simple);
    }
}
