use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{GeomError, Result};
use crate::jet::{Jet2, DIM};

/// Closed-form scalar field on the chart, parsed from a short formula string
/// over the coordinates `u1..u4`. Evaluation happens in jet arithmetic, so an
/// `Expr` yields its value, gradient, and Hessian in one pass.
///
/// Grammar: `+ - * /`, `^` with an integer exponent, unary minus,
/// parentheses, the constant `pi`, and the functions
/// `sin cos sinh cosh tanh coth exp sqrt`.
#[derive(Clone, Debug)]
pub struct Expr {
    src: String,
    ast: Node,
}

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Fun(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug)]
enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Coth,
    Exp,
    Sqrt,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let ast = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(GeomError::ParseError(format!(
                "unexpected trailing input in '{src}'"
            )));
        }
        Ok(Expr {
            src: src.to_string(),
            ast,
        })
    }

    /// Evaluates at the jet-valued coordinates, usually `Jet2::seed(point)`.
    pub fn eval(&self, vars: &[Jet2; DIM]) -> Result<Jet2> {
        eval_node(&self.ast, vars)
    }

    /// Convenience: plain value at a point, derivatives discarded.
    pub fn eval_value(&self, point: [f64; DIM]) -> Result<f64> {
        Ok(self.eval(&Jet2::seed(point))?.value)
    }

    pub fn src(&self) -> &str {
        &self.src
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.src)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Expr, D::Error> {
        let src = String::deserialize(d)?;
        Expr::parse(&src).map_err(D::Error::custom)
    }
}

fn eval_node(node: &Node, vars: &[Jet2; DIM]) -> Result<Jet2> {
    Ok(match node {
        Node::Const(c) => Jet2::constant(*c),
        Node::Var(k) => vars[*k],
        Node::Neg(a) => -eval_node(a, vars)?,
        Node::Add(a, b) => eval_node(a, vars)? + eval_node(b, vars)?,
        Node::Sub(a, b) => eval_node(a, vars)? - eval_node(b, vars)?,
        Node::Mul(a, b) => eval_node(a, vars)? * eval_node(b, vars)?,
        Node::Div(a, b) => eval_node(a, vars)?.checked_div(eval_node(b, vars)?)?,
        Node::Pow(a, n) => {
            let base = eval_node(a, vars)?;
            if *n < 0 {
                Jet2::constant(1.0).checked_div(base.powi(-n))?
            } else {
                base.powi(*n)
            }
        }
        Node::Fun(f, a) => {
            let x = eval_node(a, vars)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Sinh => x.sinh(),
                Func::Cosh => x.cosh(),
                Func::Tanh => x.tanh(),
                Func::Coth => x.coth()?,
                Func::Exp => x.exp(),
                Func::Sqrt => x.sqrt()?,
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '^' => {
                out.push(Token::Caret);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                let text = &src[start..i];
                let num = text.parse::<f64>().map_err(|_| {
                    GeomError::ParseError(format!("bad numeric literal '{text}'"))
                })?;
                out.push(Token::Num(num));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && matches!(bytes[i] as char, 'a'..='z' | 'A'..='Z' | '0'..='9' | '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(src[start..i].to_string()));
            }
            other => {
                return Err(GeomError::ParseError(format!(
                    "unexpected character '{other}' in '{src}'"
                )))
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token) -> Result<()> {
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            other => Err(GeomError::ParseError(format!(
                "expected {tok:?}, found {other:?}"
            ))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let n = self.int_exponent()?;
            return Ok(Node::Pow(Box::new(base), n));
        }
        Ok(base)
    }

    /// Exponents are restricted to integer literals, optionally negated or
    /// parenthesised, so powers stay exact in jet arithmetic.
    fn int_exponent(&mut self) -> Result<i32> {
        match self.bump() {
            Some(Token::Num(v)) if v.fract() == 0.0 => Ok(v as i32),
            Some(Token::Minus) => Ok(-self.int_exponent()?),
            Some(Token::LParen) => {
                let n = self.int_exponent()?;
                self.expect(Token::RParen)?;
                Ok(n)
            }
            other => Err(GeomError::ParseError(format!(
                "exponent must be an integer literal, found {other:?}"
            ))),
        }
    }

    fn atom(&mut self) -> Result<Node> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(Node::Const(v)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => match name.as_str() {
                "u1" => Ok(Node::Var(0)),
                "u2" => Ok(Node::Var(1)),
                "u3" => Ok(Node::Var(2)),
                "u4" => Ok(Node::Var(3)),
                "pi" => Ok(Node::Const(std::f64::consts::PI)),
                _ => {
                    let func = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "sinh" => Func::Sinh,
                        "cosh" => Func::Cosh,
                        "tanh" => Func::Tanh,
                        "coth" => Func::Coth,
                        "exp" => Func::Exp,
                        "sqrt" => Func::Sqrt,
                        _ => {
                            return Err(GeomError::ParseError(format!(
                                "unknown identifier '{name}'"
                            )))
                        }
                    };
                    self.expect(Token::LParen)?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    Ok(Node::Fun(func, Box::new(arg)))
                }
            },
            other => Err(GeomError::ParseError(format!(
                "expected a value, found {other:?}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, point: [f64; 4]) -> Jet2 {
        Expr::parse(src).unwrap().eval(&Jet2::seed(point)).unwrap()
    }

    #[test]
    fn precedence_and_powers() {
        assert_eq!(at("2 + 3 * 4^2", [0.0; 4]).value, 50.0);
        assert_eq!(at("(2 + 3) * 4", [0.0; 4]).value, 20.0);
        assert_eq!(at("2^-2", [0.0; 4]).value, 0.25);
        assert_eq!(at("2^(-2)", [0.0; 4]).value, 0.25);
    }

    #[test]
    fn unary_minus_binds_below_power() {
        assert_eq!(at("-u1^2", [3.0, 0.0, 0.0, 0.0]).value, -9.0);
    }

    #[test]
    fn polynomial_jet() {
        let j = at("u1^2 + 2*u1*u2", [2.0, 3.0, 0.0, 0.0]);
        assert_eq!(j.value, 16.0);
        assert_eq!(j.grad[0], 10.0);
        assert_eq!(j.grad[1], 4.0);
        assert_eq!(j.hess[0][0], 2.0);
        assert_eq!(j.hess[0][1], 2.0);
    }

    #[test]
    fn functions_evaluate() {
        let j = at("sinh(u4) * cosh(u4)", [0.0, 0.0, 0.0, 0.5]);
        let expect = 0.5f64.sinh() * 0.5f64.cosh();
        assert!((j.value - expect).abs() < 1e-15);
        let p = at("pi", [0.0; 4]);
        assert_eq!(p.value, std::f64::consts::PI);
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = Expr::parse("1 / (u1 - u1)").unwrap();
        assert_eq!(
            e.eval(&Jet2::seed([1.0, 0.0, 0.0, 0.0])),
            Err(GeomError::DivisionByZero)
        );
    }

    #[test]
    fn coth_guard_propagates() {
        let e = Expr::parse("coth(u4)").unwrap();
        assert!(e.eval(&Jet2::seed([0.0; 4])).is_err());
        assert!(e.eval(&Jet2::seed([0.0, 0.0, 0.0, 1.0])).is_ok());
    }

    #[test]
    fn parse_errors() {
        assert!(Expr::parse("u5").is_err());
        assert!(Expr::parse("sin u1").is_err());
        assert!(Expr::parse("(u1").is_err());
        assert!(Expr::parse("u1 +").is_err());
        assert!(Expr::parse("u1^u2").is_err());
        assert!(Expr::parse("2 $ 3").is_err());
    }

    #[test]
    fn display_round_trip() {
        let src = "coth(u4)^2 - tanh(u4)^2";
        let e = Expr::parse(src).unwrap();
        assert_eq!(e.to_string(), src);
        let again = Expr::parse(&e.to_string()).unwrap();
        let p = [0.0, 0.0, 0.0, 0.7];
        assert_eq!(
            e.eval(&Jet2::seed(p)).unwrap(),
            again.eval(&Jet2::seed(p)).unwrap()
        );
    }
}
