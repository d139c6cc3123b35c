use std::collections::HashSet;

use super::ast::{BinOp, Expr, Scheme};
use super::BuildError;
use crate::poly::Complex;

/// Maximum nesting of parentheses and unary minus.
pub const MAX_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(Complex),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Assign,
    Semi,
    Prime,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(_) => "number".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Assign => "`=`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Prime => "`'`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> BuildError {
    BuildError::Syntax { line, col, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>, BuildError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if ch == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '=' => Some(Tok::Assign),
            ';' => Some(Tok::Semi),
            '\'' => Some(Tok::Prime),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, line: tl, col: tc });
            i += 1;
            col += 1;
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(name), line: tl, col: tc });
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let literal: String = chars[start..i].iter().collect();
            let value: f64 = literal
                .parse()
                .map_err(|_| syntax(tl, tc, format!("malformed number `{literal}`")))?;
            if !value.is_finite() {
                return Err(syntax(tl, tc, format!("number `{literal}` is out of range")));
            }
            let imaginary = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
            if imaginary {
                i += 1;
            }
            col += i - start;
            let c = if imaginary { Complex::new(0.0, value) } else { Complex::new(value, 0.0) };
            out.push(Token { tok: Tok::Number(c), line: tl, col: tc });
            continue;
        }
        return Err(syntax(tl, tc, format!("unexpected character `{ch}`")));
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    depth: usize,
    /// Step names bound so far.
    bound: HashSet<String>,
    /// Names that resolved to parameters so far.
    params: HashSet<String>,
    /// Only numeric literals are accepted.
    constant_only: bool,
}

impl Parser {
    fn new(toks: Vec<Token>, constant_only: bool) -> Self {
        Parser { toks, pos: 0, depth: 0, bound: HashSet::new(), params: HashSet::new(), constant_only }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<Token, BuildError> {
        let t = self.peek().clone();
        if t.tok == want {
            Ok(self.bump())
        } else {
            Err(syntax(t.line, t.col, format!("expected {}, found {}", want.describe(), t.tok.describe())))
        }
    }

    fn scheme(&mut self) -> Result<Scheme, BuildError> {
        let mut steps = Vec::new();
        loop {
            let t = self.bump();
            let name = match t.tok {
                Tok::Ident(name) => name,
                Tok::Eof if steps.is_empty() => {
                    return Err(syntax(t.line, t.col, "empty scheme"));
                }
                Tok::Eof => return Err(syntax(t.line, t.col, "scheme must end with a `next` statement")),
                other => {
                    return Err(syntax(t.line, t.col, format!("expected a step name, found {}", other.describe())));
                }
            };
            if name == "z" || name == "p" {
                return Err(syntax(t.line, t.col, format!("`{name}` is reserved and cannot be bound")));
            }
            if self.bound.contains(&name) {
                return Err(syntax(t.line, t.col, format!("step `{name}` is bound twice")));
            }
            if self.params.contains(&name) {
                // used before it was bound
                return Err(BuildError::UnboundIdentifier(name));
            }
            self.expect(Tok::Assign)?;
            let e = self.expr()?;
            self.expect(Tok::Semi)?;
            if name == "next" {
                let t = self.peek();
                if t.tok != Tok::Eof {
                    return Err(syntax(t.line, t.col, "`next` must be the last statement"));
                }
                return Ok(Scheme { steps, next: e });
            }
            self.bound.insert(name.clone());
            steps.push((name, e));
        }
    }

    fn expr(&mut self) -> Result<Expr, BuildError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, BuildError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, BuildError> {
        let t = self.peek().clone();
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(syntax(t.line, t.col, "expression nested too deeply"));
        }
        let out = self.factor_inner(t);
        self.depth -= 1;
        out
    }

    fn factor_inner(&mut self, t: Token) -> Result<Expr, BuildError> {
        match t.tok {
            Tok::Number(c) => {
                self.bump();
                Ok(Expr::Const(c))
            }
            Tok::Minus => {
                self.bump();
                Ok(match self.factor()? {
                    Expr::Const(c) => Expr::Const(-c),
                    e => Expr::Neg(Box::new(e)),
                })
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if self.constant_only => {
                Err(syntax(t.line, t.col, format!("expected a number, found identifier `{name}`")))
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(name, t.line, t.col)
            }
            other => Err(syntax(t.line, t.col, format!("expected an expression, found {}", other.describe()))),
        }
    }

    fn identifier(&mut self, name: String, line: usize, col: usize) -> Result<Expr, BuildError> {
        if name == "z" {
            return Ok(Expr::Var);
        }
        if name == "p" {
            let mut order = 0;
            while self.peek().tok == Tok::Prime {
                self.bump();
                order += 1;
            }
            self.expect(Tok::LParen)?;
            let arg = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(Expr::deriv(order, arg));
        }
        if self.peek().tok == Tok::LParen {
            if self.bound.contains(&name) {
                return Err(syntax(line, col, format!("step `{name}` is not callable")));
            }
            return Err(BuildError::UnboundIdentifier(name));
        }
        if self.peek().tok == Tok::Prime {
            let t = self.peek();
            return Err(syntax(t.line, t.col, "only `p` takes derivative marks"));
        }
        if name == "next" {
            return Err(BuildError::UnboundIdentifier(name));
        }
        if self.bound.contains(&name) {
            return Ok(Expr::Step(name));
        }
        self.params.insert(name.clone());
        Ok(Expr::Param(name))
    }
}

/// Parse a scheme definition such as `y = z - p(z)/p'(z); next = y - p(y)/p'(z);`.
///
/// Identifiers other than `z`, `p` and bound step names become parameters.
/// `#` starts a comment that runs to the end of the line.
pub fn parse_scheme(text: &str) -> Result<Scheme, BuildError> {
    Parser::new(lex(text)?, false).scheme()
}

/// Parse a complex literal: numbers with an optional `i` suffix combined with
/// `+ - * /` and parentheses, e.g. `1.5+2i`, `-3i` or `13/6`.
pub fn parse_complex(text: &str) -> Result<Complex, BuildError> {
    let mut parser = Parser::new(lex(text)?, true);
    let e = parser.expr()?;
    let t = parser.peek();
    if t.tok != Tok::Eof {
        return Err(syntax(t.line, t.col, format!("unexpected {}", t.tok.describe())));
    }
    let value = const_value(&e).ok_or_else(|| syntax(1, 1, "division by zero in literal"))?;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(syntax(1, 1, "literal is out of range"));
    }
    Ok(value)
}

fn const_value(e: &Expr) -> Option<Complex> {
    match e {
        Expr::Const(c) => Some(*c),
        Expr::Neg(inner) => const_value(inner).map(|c| -c),
        Expr::Bin { op, lhs, rhs } => {
            let (a, b) = (const_value(lhs)?, const_value(rhs)?);
            Some(match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.norm() == 0.0 {
                        return None;
                    }
                    a / b
                }
            })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn newton() -> Expr {
        Expr::bin(
            BinOp::Sub,
            Expr::Var,
            Expr::bin(BinOp::Div, Expr::deriv(0, Expr::Var), Expr::deriv(1, Expr::Var)),
        )
    }

    #[test]
    fn newton_ast() {
        let s = parse_scheme("next = z - p(z)/p'(z);").unwrap();
        assert!(s.steps.is_empty());
        assert_eq!(s.next, newton());
    }

    #[test]
    fn king_has_one_step_and_beta() {
        let text = "y = z - p(z)/p'(z);\n\
                    next = y - p(y)/p'(z) * (p(z) + beta*p(y))/(p(z) + (beta - 2)*p(y));";
        let s = parse_scheme(text).unwrap();
        assert_eq!(s.steps.len(), 1);
        assert_eq!(s.steps[0].0, "y");
        assert_eq!(s.params(), vec!["beta".to_string()]);
    }

    #[test]
    fn unknown_function_is_unbound() {
        assert_eq!(parse_scheme("next = q(z);"), Err(BuildError::UnboundIdentifier("q".into())));
    }

    #[test]
    fn forward_reference_is_unbound() {
        let err = parse_scheme("y = w; w = z; next = y;").unwrap_err();
        assert_eq!(err, BuildError::UnboundIdentifier("w".into()));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_scheme("next = z +;\n") {
            Err(BuildError::Syntax { line, col, .. }) => assert_eq!((line, col), (1, 11)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_scheme("y = z;\nnext = y;\nw = z;") {
            Err(BuildError::Syntax { line, col, .. }) => assert_eq!((line, col), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_scheme("y = z;"), Err(BuildError::Syntax { .. })));
        assert!(matches!(parse_scheme("next = p''z;"), Err(BuildError::Syntax { .. })));
    }

    #[test]
    fn nesting_limit() {
        let deep = format!("next = {}z{};", "(".repeat(MAX_DEPTH + 5), ")".repeat(MAX_DEPTH + 5));
        assert!(matches!(parse_scheme(&deep), Err(BuildError::Syntax { .. })));
        let ok = format!("next = {}z{};", "(".repeat(20), ")".repeat(20));
        assert!(parse_scheme(&ok).is_ok());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.5+2i").unwrap(), Complex::new(1.5, 2.0));
        assert_eq!(parse_complex("-3i").unwrap(), Complex::new(0.0, -3.0));
        assert_eq!(parse_complex("1e-3").unwrap(), Complex::new(1e-3, 0.0));
        assert!((parse_complex("13/6").unwrap() - Complex::new(13.0 / 6.0, 0.0)).norm() < 1e-15);
        assert!(parse_complex("alpha").is_err());
        assert!(parse_complex("1/0").is_err());
        assert!(parse_complex("1e999").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn display_round_trips() {
        let text = "y = z - 2i*p(z)/p'(z);\nw = -(y + 0.5) / (-3.25);\nnext = w - p''(w - y) * (1.5 + 2i) - -gamma;";
        let s = parse_scheme(text).unwrap();
        let again = parse_scheme(&s.to_string()).unwrap();
        assert_eq!(s, again);
    }
}
