//! Rational functions kept as products of polynomial factors during instantiation.
//!
//! Every intermediate value is `coef · Π num_i^e_i / Π den_j^f_j` over a shared list of
//! factor polynomials. Products, quotients and powers only touch exponents, so repeated
//! factors such as the `D^m` produced by `p(N/D)` cancel exactly instead of through roots.

use std::collections::BTreeMap;

use crate::poly::{Complex, Polynomial};

#[derive(Debug, Default)]
pub(crate) struct Arena {
    atoms: Vec<Polynomial>,
    z: Option<usize>,
}

type Exps = BTreeMap<usize, u32>;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factored {
    coef: Complex,
    num: Exps,
    den: Exps,
}

fn zero_c() -> Complex {
    Complex::new(0.0, 0.0)
}

fn merge(a: &Exps, b: &Exps) -> Exps {
    let mut out = a.clone();
    for (&k, &e) in b {
        *out.entry(k).or_insert(0) += e;
    }
    out
}

fn scale_exps(a: &Exps, m: u32) -> Exps {
    a.iter().map(|(&k, &e)| (k, e * m)).collect()
}

/// Remove what `num` and `den` have in common.
fn cancel(num: &mut Exps, den: &mut Exps) {
    let common: Vec<(usize, u32)> = num
        .iter()
        .filter_map(|(&k, &e)| den.get(&k).map(|&f| (k, e.min(f))))
        .collect();
    for (k, m) in common {
        for side in [&mut *num, &mut *den] {
            let e = side.get_mut(&k).expect("present");
            *e -= m;
            if *e == 0 {
                side.remove(&k);
            }
        }
    }
}

impl Arena {
    /// Register a polynomial, stored monic; constants are returned as a coefficient instead.
    fn atom(&mut self, p: Polynomial) -> Factored {
        if p.is_zero() {
            return Factored::constant(zero_c());
        }
        if p.deg() == 0 {
            return Factored::constant(p.coeff(0));
        }
        let lead = p.leading();
        let mut num = Exps::new();
        let idx = self.atoms.len();
        self.atoms.push(p.scale(lead.inv()));
        num.insert(idx, 1);
        Factored { coef: lead, num, den: Exps::new() }
    }

    pub(crate) fn var(&mut self) -> Factored {
        let idx = match self.z {
            Some(i) => i,
            None => {
                self.atoms.push(Polynomial::z());
                self.z = Some(self.atoms.len() - 1);
                self.atoms.len() - 1
            }
        };
        Factored { coef: Complex::new(1.0, 0.0), num: Exps::from([(idx, 1)]), den: Exps::new() }
    }

    fn expand(&self, e: &Exps) -> Polynomial {
        e.iter().fold(Polynomial::one(), |acc, (&k, &m)| acc.mul(&self.atoms[k].pow(m as usize)))
    }

    fn degree_of(&self, e: &Exps) -> usize {
        e.iter().map(|(&k, &m)| self.atoms[k].deg() * m as usize).sum()
    }

    /// `max(deg num, deg den)` of the value as written.
    pub(crate) fn degree(&self, f: &Factored) -> usize {
        self.degree_of(&f.num).max(self.degree_of(&f.den))
    }

    /// Numerator and denominator polynomials.
    pub(crate) fn expand_pair(&self, f: &Factored) -> (Polynomial, Polynomial) {
        (self.expand(&f.num).scale(f.coef), self.expand(&f.den))
    }

    pub(crate) fn add(&mut self, a: &Factored, b: &Factored, sign: f64) -> Factored {
        if a.is_zero() {
            return b.scale(Complex::new(sign, 0.0));
        }
        if b.is_zero() {
            return a.clone();
        }
        let mut g = Exps::new();
        for (&k, &e) in &a.num {
            if let Some(&f) = b.num.get(&k) {
                g.insert(k, e.min(f));
            }
        }
        let mut l = a.den.clone();
        for (&k, &e) in &b.den {
            let v = l.entry(k).or_insert(0);
            *v = (*v).max(e);
        }
        let rest = |x: &Exps, y: &Exps| -> Exps {
            x.iter()
                .filter_map(|(&k, &e)| {
                    let left = e - y.get(&k).copied().unwrap_or(0);
                    (left > 0).then_some((k, left))
                })
                .collect()
        };
        let term = |f: &Factored| -> Exps { merge(&rest(&f.num, &g), &rest(&l, &f.den)) };
        let ta = self.expand(&term(a)).scale(a.coef);
        let tb = self.expand(&term(b)).scale(b.coef * sign);
        let sum = self.atom(ta.add(&tb));
        if sum.is_zero() {
            return sum;
        }
        let mut out = Factored { coef: sum.coef, num: merge(&sum.num, &g), den: l };
        cancel(&mut out.num, &mut out.den);
        out
    }

    /// `q(y)` for a polynomial `q`.
    pub(crate) fn apply(&mut self, q: &Polynomial, y: &Factored) -> Factored {
        if q.is_zero() {
            return Factored::constant(zero_c());
        }
        let s = q.low_order_zeros();
        let low = y.pow(s as u32);
        let rest = q.shift_down(s);
        let m = rest.deg();
        if m == 0 {
            return low.scale(rest.coeff(0));
        }
        if y.is_zero() {
            return Factored::constant(rest.coeff(0));
        }
        // Σ r_i (c N)^i D^(m-i) / D^m
        let n = self.expand(&y.num).scale(y.coef);
        let d = self.expand(&y.den);
        let npow: Vec<Polynomial> = std::iter::successors(Some(Polynomial::one()), |p| Some(p.mul(&n)))
            .take(m + 1)
            .collect();
        let dpow: Vec<Polynomial> = std::iter::successors(Some(Polynomial::one()), |p| Some(p.mul(&d)))
            .take(m + 1)
            .collect();
        let top = rest
            .coeffs()
            .iter()
            .enumerate()
            .fold(Polynomial::zero(), |acc, (i, &c)| acc.add(&npow[i].mul(&dpow[m - i]).scale(c)));
        let head = self.atom(top);
        let tail = Factored { coef: Complex::new(1.0, 0.0), num: Exps::new(), den: scale_exps(&y.den, m as u32) };
        head.mul(&tail).mul(&low)
    }
}

impl Factored {
    pub(crate) fn constant(c: Complex) -> Self {
        Factored { coef: c, num: Exps::new(), den: Exps::new() }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coef.norm() == 0.0
    }

    fn scale(&self, s: Complex) -> Self {
        let coef = self.coef * s;
        if coef.norm() == 0.0 {
            return Factored::constant(zero_c());
        }
        Factored { coef, ..self.clone() }
    }

    pub(crate) fn mul(&self, other: &Factored) -> Factored {
        if self.is_zero() || other.is_zero() {
            return Factored::constant(zero_c());
        }
        let mut num = merge(&self.num, &other.num);
        let mut den = merge(&self.den, &other.den);
        cancel(&mut num, &mut den);
        Factored { coef: self.coef * other.coef, num, den }
    }

    /// `None` when dividing by zero.
    pub(crate) fn div(&self, other: &Factored) -> Option<Factored> {
        if other.is_zero() {
            return None;
        }
        let inv = Factored { coef: other.coef.inv(), num: other.den.clone(), den: other.num.clone() };
        Some(self.mul(&inv))
    }

    pub(crate) fn neg(&self) -> Factored {
        self.scale(Complex::new(-1.0, 0.0))
    }

    fn pow(&self, m: u32) -> Factored {
        if m == 0 {
            return Factored::constant(Complex::new(1.0, 0.0));
        }
        Factored { coef: self.coef.powu(m), num: scale_exps(&self.num, m), den: scale_exps(&self.den, m) }
    }
}
