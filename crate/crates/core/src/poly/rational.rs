use std::fmt;

use super::roots::root_clusters;
use super::{Complex, ExtComplex, PolyError, Polynomial, CANCEL_TOL};

/// Reduced quotient `num / den` of two polynomials.
///
/// Invariants: `den` is nonzero, numerator and denominator share no root
/// (within [`CANCEL_TOL`]), and the lowest nonzero coefficient of `den` is 1.
/// The zero map is stored as `0 / 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalMap {
    num: Polynomial,
    den: Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineOp {
    Add,
    Sub,
    Mul,
    Div,
    Compose,
}

/// Zero out low-order coefficients that are negligible against the largest one.
fn clean_low(p: &Polynomial) -> Polynomial {
    let m = p.low_order_zeros();
    if m == 0 {
        return p.clone();
    }
    p.shift_down(m).shift_up(m)
}

/// Values of the unreduced quotient at a few fixed points, used to reject a
/// cancellation that would change the map.
struct Probes {
    points: Vec<(Complex, Complex)>,
}

const PROBE_TOL: f64 = 1e-8;

impl Probes {
    fn new(n: &Polynomial, d: &Polynomial) -> Self {
        let mut points = Vec::new();
        for (i, radius) in [0.37, 0.83, 1.21, 1.9, 3.1, 0.61].iter().enumerate() {
            let z = Complex::from_polar(*radius, 0.7 + 2.39996 * i as f64);
            let dv = d.eval(z);
            let size: f64 = d.coeffs().iter().rev().fold(0.0, |acc, c| acc * radius + c.norm());
            if dv.norm() > 1e-6 * size {
                points.push((z, n.eval(z) / dv));
            }
        }
        Probes { points }
    }

    fn agree(&self, n: &Polynomial, d: &Polynomial) -> bool {
        self.points
            .iter()
            .all(|&(z, v)| (n.eval(z) / d.eval(z) - v).norm() <= PROBE_TOL * (1.0 + v.norm()))
    }
}

/// Build a reduced rational map: common roots are cancelled and the denominator
/// is normalized so its first nonzero coefficient equals 1.
pub fn rat_make(num: Polynomial, den: Polynomial) -> Result<RationalMap, PolyError> {
    if den.is_zero() {
        return Err(PolyError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RationalMap::zero());
    }
    let common_zero = num.low_order_zeros().min(den.low_order_zeros());
    let mut n = clean_low(&num.shift_down(common_zero));
    let mut d = clean_low(&den.shift_down(common_zero));

    if n.deg() >= 1 && d.deg() >= 1 {
        let probes = Probes::new(&n, &d);
        let rn = root_clusters(&n)?;
        let rd = root_clusters(&d)?;
        let mut used = vec![false; rn.len()];
        for cd in rd.iter().filter(|c| c.center.norm() > 0.0) {
            let tol = CANCEL_TOL * (1.0 + cd.center.norm());
            let hit = rn
                .iter()
                .enumerate()
                .filter(|(i, cn)| !used[*i] && cn.center.norm() > 0.0)
                .map(|(i, cn)| (i, (cn.center - cd.center).norm()))
                .filter(|&(_, dist)| dist <= tol)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((i, _)) = hit {
                used[i] = true;
                let cn = &rn[i];
                let times = cn.multiplicity.min(cd.multiplicity);
                let total = (cn.multiplicity + cd.multiplicity) as f64;
                let r = (cn.center * cn.multiplicity as f64 + cd.center * cd.multiplicity as f64) / total;
                let (mut n2, mut d2) = (n.clone(), d.clone());
                for _ in 0..times {
                    n2 = n2.deflate(r);
                    d2 = d2.deflate(r);
                }
                if probes.agree(&n2, &d2) {
                    n = n2;
                    d = d2;
                }
            }
        }
    }

    let first = d.low_order_zeros();
    let lead = d.coeff(first);
    let n = n.scale(lead.inv());
    let mut dc = clean_low(&d.scale(lead.inv())).coeffs().to_vec();
    dc[first] = Complex::new(1.0, 0.0);
    Ok(RationalMap { num: n, den: Polynomial::new(dc) })
}

impl RationalMap {
    pub fn zero() -> Self {
        RationalMap { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn identity() -> Self {
        RationalMap { num: Polynomial::z(), den: Polynomial::one() }
    }

    pub fn constant(c: Complex) -> Self {
        if c.norm() == 0.0 {
            return Self::zero();
        }
        RationalMap { num: Polynomial::constant(c), den: Polynomial::one() }
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalMap { num: p, den: Polynomial::one() }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `max(deg num, deg den)`.
    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    /// Value at a finite point; poles return a non-finite number.
    ///
    /// For `|z| > 1` the evaluation runs on the reversed coefficients in `w = 1/z`,
    /// which avoids overflow for large arguments.
    #[inline]
    pub fn eval_c(&self, z: Complex) -> Complex {
        if z.norm_sqr() <= 1.0 {
            self.num.eval(z) / self.den.eval(z)
        } else {
            let w = z.inv();
            let dn = self.num.deg();
            let dd = self.den.deg();
            let rn = rev_eval(&self.num, w);
            let rd = rev_eval(&self.den, w);
            let ratio = rn / rd;
            if dn >= dd {
                ratio * z.powu((dn - dd) as u32)
            } else {
                ratio * w.powu((dd - dn) as u32)
            }
        }
    }

    /// Evaluation on the Riemann sphere.
    pub fn eval(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Finite(z) => {
                if self.is_zero() {
                    return ExtComplex::Finite(Complex::new(0.0, 0.0));
                }
                let d = self.den.eval(z);
                if d.norm() == 0.0 {
                    return ExtComplex::Infinity;
                }
                let v = self.eval_c(z);
                if v.re.is_finite() && v.im.is_finite() {
                    ExtComplex::Finite(v)
                } else {
                    ExtComplex::Infinity
                }
            }
            ExtComplex::Infinity => {
                if self.is_zero() {
                    return ExtComplex::Finite(Complex::new(0.0, 0.0));
                }
                let (dn, dd) = (self.num.deg(), self.den.deg());
                if dn > dd {
                    ExtComplex::Infinity
                } else if dn == dd {
                    ExtComplex::Finite(self.num.leading() / self.den.leading())
                } else {
                    ExtComplex::Finite(Complex::new(0.0, 0.0))
                }
            }
        }
    }

    pub fn derivative(&self) -> Result<RationalMap, PolyError> {
        rat_derivative(self)
    }

    /// Largest relative coefficient distance between two reduced maps.
    pub fn distance(&self, other: &RationalMap) -> f64 {
        self.num
            .relative_distance(&other.num)
            .max(self.den.relative_distance(&other.den))
    }

    pub fn approx_eq(&self, other: &RationalMap, tol: f64) -> bool {
        self.num.deg() == other.num.deg()
            && self.den.deg() == other.den.deg()
            && self.distance(other) <= tol
    }

    /// `self ∘ other`, computed on homogeneous representatives.
    pub fn compose(&self, other: &RationalMap) -> Result<RationalMap, PolyError> {
        let m = self.degree();
        let (num, den) = homogeneous_compose(&self.num, &self.den, m, &other.num, &other.den);
        rat_make(num, den)
    }

    /// Polynomial `p` applied to this map, `p ∘ self`.
    pub fn apply_poly(&self, p: &Polynomial) -> Result<RationalMap, PolyError> {
        let m = p.deg();
        let num = homogeneous_poly(p, m, &self.num, &self.den);
        rat_make(num, self.den.pow(m))
    }
}

fn rev_eval(p: &Polynomial, w: Complex) -> Complex {
    p.coeffs()
        .iter()
        .fold(Complex::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// `Σ c_i · N^i · D^(m-i)` for the coefficients `c_i` of `p`.
pub(crate) fn homogeneous_poly(p: &Polynomial, m: usize, n: &Polynomial, d: &Polynomial) -> Polynomial {
    let npow: Vec<Polynomial> = std::iter::successors(Some(Polynomial::one()), |acc| Some(acc.mul(n)))
        .take(m + 1)
        .collect();
    let dpow: Vec<Polynomial> = std::iter::successors(Some(Polynomial::one()), |acc| Some(acc.mul(d)))
        .take(m + 1)
        .collect();
    p.coeffs()
        .iter()
        .enumerate()
        .fold(Polynomial::zero(), |acc, (i, &c)| {
            acc.add(&npow[i].mul(&dpow[m - i]).scale(c))
        })
}

/// Homogeneous composition `(P/Q) ∘ (N/D)` of formal degree `m`.
pub(crate) fn homogeneous_compose(
    p: &Polynomial,
    q: &Polynomial,
    m: usize,
    n: &Polynomial,
    d: &Polynomial,
) -> (Polynomial, Polynomial) {
    (homogeneous_poly(p, m, n, d), homogeneous_poly(q, m, n, d))
}

/// Add, subtract, multiply, divide or compose two maps, then reduce.
pub fn rat_combine(op: CombineOp, r1: &RationalMap, r2: &RationalMap) -> Result<RationalMap, PolyError> {
    let (n1, d1, n2, d2) = (&r1.num, &r1.den, &r2.num, &r2.den);
    match op {
        CombineOp::Add => rat_make(n1.mul(d2).add(&n2.mul(d1)), d1.mul(d2)),
        CombineOp::Sub => rat_make(n1.mul(d2).sub(&n2.mul(d1)), d1.mul(d2)),
        CombineOp::Mul => rat_make(n1.mul(n2), d1.mul(d2)),
        CombineOp::Div => {
            if r2.is_zero() {
                return Err(PolyError::ZeroDenominator);
            }
            rat_make(n1.mul(d2), d1.mul(n2))
        }
        CombineOp::Compose => r1.compose(r2),
    }
}

/// Quotient rule, reduced.
pub fn rat_derivative(r: &RationalMap) -> Result<RationalMap, PolyError> {
    let n = &r.num;
    let d = &r.den;
    rat_make(n.derivative().mul(d).sub(&n.mul(&d.derivative())), d.mul(d))
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}
