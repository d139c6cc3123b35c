use std::fmt;

use crate::poly::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// Expression over the current iterate `z`, the polynomial `p` and its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// The current iterate.
    Var,
    Const(Complex),
    Param(String),
    /// A previously bound intermediate step.
    Step(String),
    /// `p^(order)(arg)`.
    Deriv { order: usize, arg: Box<Expr> },
    Neg(Box<Expr>),
    Bin { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn deriv(order: usize, arg: Expr) -> Expr {
        Expr::Deriv { order, arg: Box::new(arg) }
    }

    /// Parameter names in first-use order.
    pub fn params(&self, out: &mut Vec<String>) {
        match self {
            Expr::Param(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            Expr::Deriv { arg, .. } | Expr::Neg(arg) => arg.params(out),
            Expr::Bin { lhs, rhs, .. } => {
                lhs.params(out);
                rhs.params(out);
            }
            Expr::Var | Expr::Const(_) | Expr::Step(_) => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin { op: BinOp::Add | BinOp::Sub, .. } => 1,
            Expr::Bin { .. } => 2,
            Expr::Neg(_) => 3,
            _ => 4,
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: Complex) -> fmt::Result {
    // `{:?}` on f64 round-trips exactly and always carries a decimal point or exponent.
    if c.im == 0.0 {
        if c.re.is_sign_negative() {
            write!(f, "(-{:?})", -c.re)
        } else {
            write!(f, "{:?}", c.re)
        }
    } else if c.re == 0.0 {
        if c.im < 0.0 {
            write!(f, "(-{:?}i)", -c.im)
        } else {
            write!(f, "{:?}i", c.im)
        }
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        write!(f, "({:?} {sign} {:?}i)", c.re, c.im.abs())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => write!(f, "z"),
            Expr::Const(c) => write_number(f, *c),
            Expr::Param(name) | Expr::Step(name) => write!(f, "{name}"),
            Expr::Deriv { order, arg } => {
                write!(f, "p{}({arg})", "'".repeat(*order))
            }
            Expr::Neg(inner) => {
                if inner.precedence() < 3 {
                    write!(f, "-({inner})")
                } else {
                    write!(f, "-{inner}")
                }
            }
            Expr::Bin { op, lhs, rhs } => {
                let prec = self.precedence();
                if lhs.precedence() < prec {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.symbol())?;
                // left associative: a right operand of equal precedence needs parentheses
                if rhs.precedence() <= prec {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}

/// A multi-step iteration scheme: named intermediate steps followed by `next`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    pub steps: Vec<(String, Expr)>,
    pub next: Expr,
}

/// Alias matching the domain vocabulary.
pub type SchemeExpr = Scheme;

impl Scheme {
    /// Parameter names, in order of first use.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (_, e) in &self.steps {
            e.params(&mut out);
        }
        self.next.params(&mut out);
        out
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, e) in &self.steps {
            writeln!(f, "{name} = {e};")?;
        }
        write!(f, "next = {};", self.next)
    }
}
