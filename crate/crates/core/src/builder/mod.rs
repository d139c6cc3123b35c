//! Scheme definitions: the DSL, instantiation on `p(z) = z^d - c`, and the method catalog.

mod ast;
mod catalog;
mod factored;
mod parser;
mod symmetry;

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

pub use ast::{BinOp, Expr, Scheme, SchemeExpr};
pub use catalog::{
    catalog, catalog_entries, catalog_scheme, FormSpec, MethodCatalogEntry, MethodKind,
};
pub use parser::{parse_complex, parse_scheme, MAX_DEPTH};
pub use symmetry::{check_infinity_simple, check_lambda_odd, InfinityKind};

use factored::{Arena, Factored};

use crate::poly::{rat_make, Complex, PolyError, Polynomial, RationalMap};

/// Largest degree any intermediate map may reach during instantiation.
pub const MAX_INTERMEDIATE_DEGREE: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("no binding for parameter `{0}`")]
    MissingBinding(String),
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("method `{0}` is only available as a conjugated operator")]
    PostConjugation(String),
    #[error("a denominator reduces to the zero map")]
    DivisionByZeroMap,
    #[error("intermediate degree {0} exceeds the limit")]
    DegreeLimit(usize),
    #[error("invalid context: {0}")]
    InvalidContext(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// The polynomial `z^d - c` together with parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeContext {
    pub d: usize,
    pub c: Complex,
    pub bindings: BTreeMap<String, Complex>,
}

impl SchemeContext {
    pub fn new(d: usize, c: Complex) -> Result<Self, BuildError> {
        if d < 2 {
            return Err(BuildError::InvalidContext(format!("degree d = {d} must be at least 2")));
        }
        if c.norm() == 0.0 || !c.re.is_finite() || !c.im.is_finite() {
            return Err(BuildError::InvalidContext("c must be finite and nonzero".into()));
        }
        Ok(SchemeContext { d, c, bindings: BTreeMap::new() })
    }

    pub fn bind(mut self, name: &str, value: Complex) -> Self {
        self.bindings.insert(name.to_string(), value);
        self
    }

    /// `p(z) = z^d - c`.
    pub fn polynomial(&self) -> Polynomial {
        let mut coeffs = vec![Complex::new(0.0, 0.0); self.d + 1];
        coeffs[0] = -self.c;
        coeffs[self.d] = Complex::new(1.0, 0.0);
        Polynomial::new(coeffs)
    }
}

fn lift(e: PolyError) -> BuildError {
    match e {
        PolyError::ZeroDenominator => BuildError::DivisionByZeroMap,
        other => BuildError::Poly(other),
    }
}

struct Instantiator<'a> {
    ctx: &'a SchemeContext,
    derivs: Vec<Polynomial>,
    steps: HashMap<&'a str, Factored>,
    arena: Arena,
}

impl<'a> Instantiator<'a> {
    fn deriv(&self, order: usize) -> Polynomial {
        self.derivs.get(order).cloned().unwrap_or_else(Polynomial::zero)
    }

    fn eval(&mut self, e: &'a Expr) -> Result<Factored, BuildError> {
        let r = match e {
            Expr::Var => self.arena.var(),
            Expr::Const(c) => Factored::constant(*c),
            Expr::Param(name) => {
                let v = self
                    .ctx
                    .bindings
                    .get(name)
                    .ok_or_else(|| BuildError::MissingBinding(name.clone()))?;
                Factored::constant(*v)
            }
            Expr::Step(name) => self
                .steps
                .get(name.as_str())
                .cloned()
                .ok_or_else(|| BuildError::UnboundIdentifier(name.clone()))?,
            Expr::Deriv { order, arg } => {
                let inner = self.eval(arg)?;
                let q = self.deriv(*order);
                self.arena.apply(&q, &inner)
            }
            Expr::Neg(inner) => self.eval(inner)?.neg(),
            Expr::Bin { op, lhs, rhs } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                match op {
                    BinOp::Add => self.arena.add(&a, &b, 1.0),
                    BinOp::Sub => self.arena.add(&a, &b, -1.0),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b).ok_or(BuildError::DivisionByZeroMap)?,
                }
            }
        };
        let deg = self.arena.degree(&r);
        if deg > MAX_INTERMEDIATE_DEGREE {
            return Err(BuildError::DegreeLimit(deg));
        }
        Ok(r)
    }
}

/// Substitute `p = z^d - c` and the parameter values into a scheme and reduce.
///
/// Steps are expanded in order; each one is a rational function of `z` by the time
/// the next statement refers to it. Derivatives of order above `d` vanish.
/// Intermediate values keep their factors, so repeated denominators cancel exactly.
pub fn instantiate(scheme: &Scheme, ctx: &SchemeContext) -> Result<RationalMap, BuildError> {
    for name in scheme.params() {
        if !ctx.bindings.contains_key(&name) {
            return Err(BuildError::MissingBinding(name));
        }
    }
    let p = ctx.polynomial();
    let derivs: Vec<Polynomial> = std::iter::successors(Some(p), |q| Some(q.derivative()))
        .take(ctx.d + 1)
        .collect();
    let mut inst = Instantiator { ctx, derivs, steps: HashMap::new(), arena: Arena::default() };
    for (name, e) in &scheme.steps {
        let r = inst.eval(e)?;
        inst.steps.insert(name.as_str(), r);
    }
    let out = inst.eval(&scheme.next)?;
    let (num, den) = inst.arena.expand_pair(&out);
    rat_make(num, den).map_err(lift)
}

/// Evaluate one step of a scheme at a point, without building the rational map.
pub fn eval_scheme_at(scheme: &Scheme, ctx: &SchemeContext, z: Complex) -> Result<Complex, BuildError> {
    fn go(e: &Expr, ctx: &SchemeContext, derivs: &[Polynomial], steps: &HashMap<&str, Complex>, z: Complex) -> Result<Complex, BuildError> {
        Ok(match e {
            Expr::Var => z,
            Expr::Const(c) => *c,
            Expr::Param(name) => *ctx.bindings.get(name).ok_or_else(|| BuildError::MissingBinding(name.clone()))?,
            Expr::Step(name) => *steps.get(name.as_str()).ok_or_else(|| BuildError::UnboundIdentifier(name.clone()))?,
            Expr::Deriv { order, arg } => {
                let x = go(arg, ctx, derivs, steps, z)?;
                derivs.get(*order).map_or(Complex::new(0.0, 0.0), |p| p.eval(x))
            }
            Expr::Neg(inner) => -go(inner, ctx, derivs, steps, z)?,
            Expr::Bin { op, lhs, rhs } => {
                let (a, b) = (go(lhs, ctx, derivs, steps, z)?, go(rhs, ctx, derivs, steps, z)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        })
    }
    let derivs: Vec<Polynomial> = std::iter::successors(Some(ctx.polynomial()), |q| Some(q.derivative()))
        .take(ctx.d + 1)
        .collect();
    let mut steps = HashMap::new();
    for (name, e) in &scheme.steps {
        let v = go(e, ctx, &derivs, &steps, z)?;
        steps.insert(name.as_str(), v);
    }
    go(&scheme.next, ctx, &derivs, &steps, z)
}

/// Instantiate a single expression with no intermediate steps.
pub fn instantiate_expr(expr: &Expr, ctx: &SchemeContext) -> Result<RationalMap, BuildError> {
    instantiate(&Scheme { steps: Vec::new(), next: expr.clone() }, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn newton() -> Scheme {
        parse_scheme("next = z - p(z)/p'(z);").unwrap()
    }

    #[test]
    fn newton_quadratic() {
        let ctx = SchemeContext::new(2, c(1.0, 0.0)).unwrap();
        let r = instantiate(&newton(), &ctx).unwrap();
        let expect = crate::poly::rat_make(Polynomial::from_real(&[1.0, 0.0, 1.0]), Polynomial::from_real(&[0.0, 2.0])).unwrap();
        assert!(r.approx_eq(&expect, 1e-14), "{r}");
    }

    #[test]
    fn newton_cubic() {
        let cc = c(0.7, -1.3);
        let ctx = SchemeContext::new(3, cc).unwrap();
        let r = instantiate(&newton(), &ctx).unwrap();
        let num = Polynomial::new(vec![cc, c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)]);
        let den = Polynomial::from_real(&[0.0, 0.0, 3.0]);
        let expect = crate::poly::rat_make(num, den).unwrap();
        assert!(r.approx_eq(&expect, 1e-13), "{r}");
    }

    #[test]
    fn missing_binding_and_zero_map() {
        let ctx = SchemeContext::new(2, c(1.0, 0.0)).unwrap();
        let king = catalog_scheme("king").unwrap();
        assert_eq!(instantiate(&king, &ctx), Err(BuildError::MissingBinding("beta".into())));
        let s = parse_scheme("next = z / (z - z);").unwrap();
        assert_eq!(instantiate(&s, &ctx), Err(BuildError::DivisionByZeroMap));
        let s = parse_scheme("next = z / p'''(z);").unwrap();
        assert_eq!(instantiate(&s, &ctx), Err(BuildError::DivisionByZeroMap));
    }

    #[test]
    fn context_validation() {
        assert!(SchemeContext::new(1, c(1.0, 0.0)).is_err());
        assert!(SchemeContext::new(2, c(0.0, 0.0)).is_err());
    }
}
