//! A small expression language for caller-supplied symbols.
//!
//! Grammar (whitespace insignificant):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'z' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := exp | ln | log | sqrt | tanh | sinh | cosh | sin | cos
//! ```
//!
//! Expressions evaluate on plain floats or on [`Jet`]s, so every derivative
//! of a parsed expression is exact up to rounding.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;

const MAX_INPUT_LEN: usize = 4096;
const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Tanh,
    Sinh,
    Cosh,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Tanh => x.tanh(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }

    fn apply_jet(self, x: &Jet) -> Jet {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Tanh => x.tanh(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    /// Integer exponent; valid for negative bases.
    PowI(Box<Expr>, i32),
    Pow(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        if src.len() > MAX_INPUT_LEN {
            return Err(Error::Parse { pos: MAX_INPUT_LEN, msg: "expression too long".into() });
        }
        let mut p = Parser { src: src.as_bytes(), pos: 0, depth: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, z: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => z,
            Expr::Neg(a) => -a.eval(z),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(z), b.eval(z));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(z)),
            Expr::PowI(a, n) => a.eval(z).powi(*n),
            Expr::Pow(a, b) => a.eval(z).powf(b.eval(z)),
        }
    }

    pub fn eval_jet(&self, z: &Jet) -> Jet {
        let order = z.order();
        match self {
            Expr::Const(c) => Jet::constant(*c, order),
            Expr::Var => z.clone(),
            Expr::Neg(a) => -a.eval_jet(z),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval_jet(z), b.eval_jet(z));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Call(f, a) => f.apply_jet(&a.eval_jet(z)),
            Expr::PowI(a, n) => a.eval_jet(z).powi(*n),
            Expr::Pow(a, b) => match b.as_ref() {
                Expr::Const(r) => a.eval_jet(z).powf(*r),
                _ => (b.eval_jet(z) * a.eval_jet(z).ln()).exp(),
            },
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var => write!(f, "z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let o = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({a} {o} {b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::PowI(a, n) => write!(f, "({a}^{n})"),
            Expr::Pow(a, b) => write!(f, "({a}^{b})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.error("expression nested too deeply"));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                BinOp::Add
            } else if self.eat(b'-') {
                BinOp::Sub
            } else {
                break;
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                BinOp::Mul
            } else if self.eat(b'/') {
                BinOp::Div
            } else {
                break;
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') { Expr::Neg(Box::new(self.unary()?)) } else { self.power()? };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let exp = self.unary()?;
        Ok(match exp {
            Expr::Const(c) if c.fract() == 0.0 && c.abs() <= 64.0 => Expr::PowI(Box::new(base), c as i32),
            Expr::Neg(ref inner) => match inner.as_ref() {
                Expr::Const(c) if c.fract() == 0.0 && c.abs() <= 64.0 => Expr::PowI(Box::new(base), -(*c as i32)),
                Expr::Const(c) => Expr::Pow(Box::new(base), Box::new(Expr::Const(-c))),
                _ => Expr::Pow(Box::new(base), Box::new(exp)),
            },
            other => Expr::Pow(Box::new(base), Box::new(other)),
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                // ASCII-only by construction
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match ident {
                    "z" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    name => {
                        let func = Func::from_name(name)
                            .ok_or_else(|| Error::Parse { pos: start, msg: format!("unknown identifier `{name}`") })?;
                        if !self.eat(b'(') {
                            return Err(self.error("expected `(` after function name"));
                        }
                        let arg = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected `)`"));
                        }
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| Error::Parse { pos: start, msg: format!("bad number `{text}`") })?;
        self.pos = i;
        Ok(Expr::Const(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = Expr::parse("1 + 2*3^2").unwrap();
        assert_eq!(e.eval(0.0), 19.0);
        let e = Expr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(0.0), 512.0);
        let e = Expr::parse("-z^2").unwrap();
        assert_eq!(e.eval(3.0), -9.0);
        let e = Expr::parse("8/4/2").unwrap();
        assert_eq!(e.eval(0.0), 1.0);
    }

    #[test]
    fn functions_and_constants() {
        let e = Expr::parse("z*exp(1-z)").unwrap();
        assert_eq!(e.eval(1.0), 1.0);
        let e = Expr::parse("sqrt(z)*tanh(sqrt(z))").unwrap();
        assert!((e.eval(4.0) - 2.0 * 2f64.tanh()).abs() < 1e-15);
        let e = Expr::parse("cos(pi)").unwrap();
        assert_eq!(e.eval(0.0), -1.0);
        let e = Expr::parse("1.5e-1*z").unwrap();
        assert!((e.eval(2.0) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn integer_powers_allow_negative_bases() {
        let e = Expr::parse("(z-2)^2").unwrap();
        assert!(matches!(e, Expr::PowI(_, 2)));
        let j = e.eval_jet(&Jet::variable(1.0, 2));
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.derivative(1), -2.0);
        assert_eq!(Expr::parse("z^-1").unwrap().eval(4.0), 0.25);
    }

    #[test]
    fn errors_carry_position() {
        assert!(matches!(Expr::parse("1 +"), Err(Error::Parse { .. })));
        assert!(matches!(Expr::parse("foo(z)"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(Expr::parse("(z"), Err(Error::Parse { .. })));
        assert!(matches!(Expr::parse("z z"), Err(Error::Parse { pos: 2, .. })));
        let deep = "(".repeat(200) + "z" + &")".repeat(200);
        assert!(Expr::parse(&deep).is_err());
    }

    #[test]
    fn display_round_trips() {
        for src in ["z*exp(1-z)", "(z-2)^2", "sqrt(z)/tanh(sqrt(z))", "z^0.5 + 3"] {
            let e = Expr::parse(src).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            for z in [0.3, 1.0, 2.5] {
                assert_eq!(e.eval(z).to_bits(), again.eval(z).to_bits(), "{src}");
            }
        }
    }
}
