//! A small expression language for radius profiles and custom potentials.
//!
//! Expressions are functions of a single variable `u` built from real
//! literals, `+ - * / ^`, parentheses and the functions
//! `sin cos exp sqrt cosh sinh`. Derivatives are obtained by
//! differentiating the parse tree, never by finite differences, so a
//! parsed profile can supply f, f', f'' and f''' to machine accuracy.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Cosh,
    Sinh,
    /// Not part of the input grammar; produced when differentiating
    /// general powers.
    Ln,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Cosh => "cosh",
            Func::Sinh => "sinh",
            Func::Ln => "ln",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Fun(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(input: &str) -> Result<Expr> {
        Parser::new(input).parse()
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        let fail = |msg: &str| Error::Eval {
            u,
            message: msg.to_string(),
        };
        let v = match self {
            Expr::Num(c) => *c,
            Expr::Var => u,
            Expr::Add(a, b) => a.eval(u)? + b.eval(u)?,
            Expr::Sub(a, b) => a.eval(u)? - b.eval(u)?,
            Expr::Mul(a, b) => a.eval(u)? * b.eval(u)?,
            Expr::Div(a, b) => {
                let d = b.eval(u)?;
                if d == 0.0 {
                    return Err(fail("division by zero"));
                }
                a.eval(u)? / d
            }
            Expr::Pow(a, b) => {
                let base = a.eval(u)?;
                let exp = b.eval(u)?;
                let r = base.powf(exp);
                if !r.is_finite() {
                    return Err(fail("power produced a non-finite value"));
                }
                r
            }
            Expr::Neg(a) => -a.eval(u)?,
            Expr::Fun(f, a) => {
                let x = a.eval(u)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(fail("sqrt of a negative value"));
                        }
                        x.sqrt()
                    }
                    Func::Cosh => x.cosh(),
                    Func::Sinh => x.sinh(),
                    Func::Ln => {
                        if x <= 0.0 {
                            return Err(fail("log of a non-positive value"));
                        }
                        x.ln()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fail("expression produced a non-finite value"))
        }
    }

    /// Symbolic derivative with light simplification.
    pub fn diff(&self) -> Expr {
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var => Expr::Num(1.0),
            Expr::Add(a, b) => add(a.diff(), b.diff()),
            Expr::Sub(a, b) => sub(a.diff(), b.diff()),
            Expr::Mul(a, b) => add(
                mul(a.diff(), (**b).clone()),
                mul((**a).clone(), b.diff()),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.diff(), (**b).clone()),
                    mul((**a).clone(), b.diff()),
                ),
                pow((**b).clone(), Expr::Num(2.0)),
            ),
            Expr::Pow(a, b) => match (&**a, &**b) {
                // c^g: d = ln(c) c^g g'
                (Expr::Num(c), _) => {
                    let ln_c = if *c > 0.0 {
                        Expr::Num(c.ln())
                    } else {
                        Expr::Fun(Func::Ln, Box::new(Expr::Num(*c)))
                    };
                    mul(mul(ln_c, self.clone()), b.diff())
                }
                // f^c: d = c f^(c-1) f'
                (_, Expr::Num(c)) => mul(
                    mul(Expr::Num(*c), pow((**a).clone(), Expr::Num(c - 1.0))),
                    a.diff(),
                ),
                // f^g: d = f^g (g' ln f + g f'/f)
                _ => mul(
                    self.clone(),
                    add(
                        mul(b.diff(), Expr::Fun(Func::Ln, a.clone())),
                        div(mul((**b).clone(), a.diff()), (**a).clone()),
                    ),
                ),
            },
            Expr::Neg(a) => neg(a.diff()),
            Expr::Fun(f, a) => {
                let inner = a.diff();
                let outer = match f {
                    Func::Sin => Expr::Fun(Func::Cos, a.clone()),
                    Func::Cos => neg(Expr::Fun(Func::Sin, a.clone())),
                    Func::Exp => self.clone(),
                    Func::Sqrt => div(Expr::Num(0.5), self.clone()),
                    Func::Cosh => Expr::Fun(Func::Sinh, a.clone()),
                    Func::Sinh => Expr::Fun(Func::Cosh, a.clone()),
                    Func::Ln => div(Expr::Num(1.0), (**a).clone()),
                };
                mul(outer, inner)
            }
        }
    }
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(c) if *c == v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        _ if is_num(&a, 0.0) => b,
        _ if is_num(&b, 0.0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        _ if is_num(&b, 0.0) => a,
        _ if is_num(&a, 0.0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        _ if is_num(&a, 0.0) || is_num(&b, 0.0) => Expr::Num(0.0),
        _ if is_num(&a, 1.0) => b,
        _ if is_num(&b, 1.0) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_num(&a, 0.0) && !is_num(&b, 0.0) => Expr::Num(0.0),
        (Expr::Num(x), Expr::Num(y)) if *y != 0.0 => Expr::Num(x / y),
        _ if is_num(&b, 1.0) => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if is_num(&b, 1.0) => a,
        _ if is_num(&b, 0.0) => Expr::Num(1.0),
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x.powf(*y)),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => *inner,
        _ => Expr::Neg(Box::new(a)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var,
    Fun(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Parser<'a> {
    input: &'a str,
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Parser {
            input,
            tokens: Vec::new(),
            pos: 0,
        }
    }

    fn err(&self, position: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            position,
            message: message.into(),
        }
    }

    fn tokenize(&mut self) -> Result<()> {
        let bytes = self.input.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => { self.tokens.push((i, Token::Plus)); i += 1; }
                '-' => { self.tokens.push((i, Token::Minus)); i += 1; }
                '*' => { self.tokens.push((i, Token::Star)); i += 1; }
                '/' => { self.tokens.push((i, Token::Slash)); i += 1; }
                '^' => { self.tokens.push((i, Token::Caret)); i += 1; }
                '(' => { self.tokens.push((i, Token::LParen)); i += 1; }
                ')' => { self.tokens.push((i, Token::RParen)); i += 1; }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len()
                        && matches!(bytes[i] as char, '0'..='9' | '.' | 'e' | 'E')
                    {
                        // accept exponent signs such as 1.5e-3
                        if matches!(bytes[i] as char, 'e' | 'E')
                            && i + 1 < bytes.len()
                            && matches!(bytes[i + 1] as char, '+' | '-')
                        {
                            i += 1;
                        }
                        i += 1;
                    }
                    let text = &self.input[start..i];
                    let v: f64 = text
                        .parse()
                        .map_err(|_| self.err(start, format!("bad number literal `{text}`")))?;
                    self.tokens.push((start, Token::Num(v)));
                }
                'a'..='z' | 'A'..='Z' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_alphanumeric() {
                        i += 1;
                    }
                    let name = &self.input[start..i];
                    let tok = match name {
                        "u" => Token::Var,
                        "sin" => Token::Fun(Func::Sin),
                        "cos" => Token::Fun(Func::Cos),
                        "exp" => Token::Fun(Func::Exp),
                        "sqrt" => Token::Fun(Func::Sqrt),
                        "cosh" => Token::Fun(Func::Cosh),
                        "sinh" => Token::Fun(Func::Sinh),
                        _ => return Err(self.err(start, format!("unknown identifier `{name}`"))),
                    };
                    self.tokens.push((start, tok));
                }
                _ => return Err(self.err(i, format!("unexpected character `{c}`"))),
            }
        }
        Ok(())
    }

    fn parse(mut self) -> Result<Expr> {
        self.tokenize()?;
        let e = self.expr()?;
        if self.pos < self.tokens.len() {
            let (at, _) = self.tokens[self.pos];
            return Err(self.err(at, "trailing input after expression"));
        }
        Ok(e)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(at, _)| *at)
            .unwrap_or(self.input.len())
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // term := unary (('*' | '/') unary)*
    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power        (so -u^2 parses as -(u^2))
    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if matches!(self.peek(), Some(Token::Plus)) {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    // power := atom ('^' unary)?       (right associative)
    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Token::Caret)) {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let at = self.here();
        match self.next() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::Var) => Ok(Expr::Var),
            Some(Token::Fun(f)) => {
                let at = self.here();
                if !matches!(self.next(), Some(Token::LParen)) {
                    return Err(self.err(at, format!("expected `(` after `{}`", f.name())));
                }
                let arg = self.expr()?;
                let at = self.here();
                if !matches!(self.next(), Some(Token::RParen)) {
                    return Err(self.err(at, "expected `)` to close function call"));
                }
                Ok(Expr::Fun(f, Box::new(arg)))
            }
            Some(Token::LParen) => {
                let e = self.expr()?;
                let at = self.here();
                if !matches!(self.next(), Some(Token::RParen)) {
                    return Err(self.err(at, "expected `)`"));
                }
                Ok(e)
            }
            Some(tok) => Err(self.err(at, format!("unexpected token {tok:?}"))),
            None => Err(self.err(at, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn eval(src: &str, u: f64) -> f64 {
        Expr::parse(src).unwrap().eval(u).unwrap()
    }

    fn d_eval(src: &str, u: f64) -> f64 {
        Expr::parse(src).unwrap().diff().eval(u).unwrap()
    }

    #[test]
    fn parses_profile_examples() {
        assert!((eval("sin(u)", PI / 6.0) - 0.5).abs() < 1e-15);
        assert!((d_eval("sin(u)", PI / 6.0) - (PI / 6.0).cos()).abs() < 1e-15);

        assert!((eval("2+cos(u)", 0.0) - 3.0).abs() < 1e-15);
        let f2 = Expr::parse("2+cos(u)").unwrap().diff().diff();
        assert!((f2.eval(0.0).unwrap() + 1.0).abs() < 1e-15);

        let e = Expr::parse("(1/2)*exp(u)+(1/8)*exp(-u)").unwrap();
        assert!((e.eval(0.0).unwrap() - 0.625).abs() < 1e-15);
        assert!((e.diff().eval(0.0).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("-u^2", 3.0), -9.0);
        assert_eq!(eval("2*u+1", 4.0), 9.0);
        assert_eq!(eval("u^2^3", 2.0), 256.0); // right associative: u^(2^3)
        assert_eq!(eval("2^-1", 0.0), 0.5);
        assert_eq!(eval("1/u/2", 4.0), 0.125); // left associative division
    }

    #[test]
    fn power_rules_differentiate() {
        assert!((d_eval("u^3", 2.0) - 12.0).abs() < 1e-12);
        assert!((d_eval("2^u", 3.0) - 8.0 * 2.0_f64.ln()).abs() < 1e-12);
        // u^u at 2: 4 (ln 2 + 1)
        assert!((d_eval("u^u", 2.0) - 4.0 * (2.0_f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_position() {
        match Expr::parse("sin(u").unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(Expr::parse("tan(u)").is_err());
        assert!(Expr::parse("2 + * 3").is_err());
        assert!(Expr::parse("").is_err());
        match Expr::parse("1 + $").unwrap_err() {
            Error::Parse { position, .. } => assert_eq!(position, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn eval_errors() {
        assert!(matches!(
            Expr::parse("1/u").unwrap().eval(0.0),
            Err(Error::Eval { .. })
        ));
        assert!(matches!(
            Expr::parse("sqrt(u)").unwrap().eval(-1.0),
            Err(Error::Eval { .. })
        ));
        assert!((eval("1/u", 2.0) - 0.5).abs() < 1e-15);
        assert!((d_eval("1/u", 2.0) + 0.25).abs() < 1e-15);
        assert!((eval("sin(u)^2", PI / 4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let sources = [
            "sin(u)*cosh(u) - u^2/(1+u^2)",
            "exp(-u)*cos(2*u) + sqrt(u+3)",
            "sinh(u/2) + u^3 - 4*u",
            "(2+cos(u))^2 / (3 + sin(u))",
        ];
        for src in sources {
            let e = Expr::parse(src).unwrap();
            let de = e.diff();
            for i in 0..20 {
                let u = 0.1 + 0.13 * i as f64;
                let h = 1e-5 * (1.0 + u.abs());
                let fd = (e.eval(u + h).unwrap() - e.eval(u - h).unwrap()) / (2.0 * h);
                let an = de.eval(u).unwrap();
                let scale = 1.0_f64.max(an.abs());
                assert!(
                    (fd - an).abs() / scale < 1e-6,
                    "{src} at u={u}: fd={fd} analytic={an}"
                );
            }
        }
    }

    #[test]
    fn third_derivatives_stay_evaluable() {
        let e = Expr::parse("(2+cos(u))").unwrap();
        let d3 = e.diff().diff().diff();
        // f''' of 2+cos(u) is sin(u)
        assert!((d3.eval(0.7).unwrap() - 0.7_f64.sin()).abs() < 1e-12);
    }
}
