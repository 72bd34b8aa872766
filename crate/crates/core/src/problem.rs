//! Problem files.
//!
//! ```text
//! # comment
//! vars x y;
//! minimize (x-1)^2*(x-2)^2*(x^2+1) + (y-1)^2*(y^2+1);
//! s.t. x - 1 >= 0;
//!      x*y = 2;
//! options seed=3 order_max=6;
//! ```
//!
//! Constraints `a = b`, `a >= b` and `a <= b` are stored as `a - b = 0`,
//! `a - b >= 0` and `b - a >= 0`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::driver::{Options, SolverChoice};
use crate::poly::{ConstraintSet, Polynomial};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub names: Vec<String>,
    pub objective: Polynomial,
    pub constraints: ConstraintSet,
    /// Raw `key=value` pairs of the `options` statement.
    pub options: BTreeMap<String, String>,
}

impl ProblemFile {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Applies the `options` block on top of `base`.
    pub fn driver_options(&self, base: &Options) -> Result<Options, String> {
        let mut o = base.clone();
        for (k, v) in &self.options {
            let float = || v.parse::<f64>().map_err(|_| format!("option {k}: expected a number, got {v}"));
            let int = || v.parse::<u64>().map_err(|_| format!("option {k}: expected an integer, got {v}"));
            let flag = || match v.as_str() {
                "on" | "true" | "yes" => Ok(true),
                "off" | "false" | "no" => Ok(false),
                _ => Err(format!("option {k}: expected on/off, got {v}")),
            };
            match k.as_str() {
                "order_max" => o.max_order = Some(int()? as u32),
                "gradient_ideal" => o.gradient_ideal = Some(flag()?),
                "regular_case" => o.regular_case = flag()?,
                "preordering" => o.preordering = flag()?,
                "seed" => o.extract.seed = int()?,
                "gap_tol" => o.sdp.gap_tol = float()?,
                "feas_tol" => o.sdp.feas_tol = float()?,
                "rank_tol" => o.decompose.rank_tol = float()?,
                "solver" if v == "internal" => o.solver = SolverChoice::Internal,
                _ => return Err(format!("unknown option {k}={v}")),
            }
        }
        Ok(o)
    }
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {};", self.names.join(" "))?;
        writeln!(f, "minimize {};", self.objective.display_with(&self.names))?;
        if !self.constraints.is_unconstrained() {
            writeln!(f, "s.t.")?;
            for g in &self.constraints.equalities {
                writeln!(f, "  {} = 0;", g.display_with(&self.names))?;
            }
            for g in &self.constraints.inequalities {
                writeln!(f, "  {} >= 0;", g.display_with(&self.names))?;
            }
        }
        if !self.options.is_empty() {
            let kv: Vec<String> = self.options.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(f, "options {};", kv.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Ge,
    Le,
    SuchThat,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    text: String,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0, start) = (line, col, i);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let tok = if chars[i..].starts_with(&['s', '.', 't', '.']) {
            advance(4, &mut i, &mut col);
            Tok::SuchThat
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                j += 1;
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let text: String = chars[i..j].iter().collect();
            let v = text.parse::<f64>().map_err(|_| err(l0, c0, format!("malformed number {text}")))?;
            advance(j - i, &mut i, &mut col);
            Tok::Num(v)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            advance(j - i, &mut i, &mut col);
            Tok::Ident(text)
        } else if c == '>' || c == '<' {
            if chars.get(i + 1) != Some(&'=') {
                return Err(err(l0, c0, format!("expected `{c}=`")));
            }
            advance(2, &mut i, &mut col);
            if c == '>' {
                Tok::Ge
            } else {
                Tok::Le
            }
        } else if "+-*/^();=".contains(c) {
            advance(1, &mut i, &mut col);
            Tok::Sym(c)
        } else {
            return Err(err(l0, c0, format!("unexpected character `{c}`")));
        };
        out.push(Token { tok, text: chars[start..i].iter().collect(), line: l0, column: c0 });
    }
    out.push(Token { tok: Tok::Eof, text: String::new(), line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    names: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(t: &Token, message: impl Into<String>) -> ParseError {
        ParseError { line: t.line, column: t.column, message: message.into() }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(Self::error_at(&t, format!("expected `{c}`, found {}", describe(&t))))
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.next();
                    acc = &acc + &self.term()?;
                }
                Tok::Sym('-') => {
                    self.next();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Sym('*') => {
                    self.next();
                    acc = &acc * &self.unary()?;
                }
                Tok::Sym('/') => {
                    let at = self.next();
                    let d = self.unary()?;
                    if d.degree() > 0 || d.is_zero() {
                        return Err(Self::error_at(&at, "division only by a nonzero constant"));
                    }
                    acc = acc.scale(1.0 / d.coeff(&crate::poly::Monomial::one(self.names.len())));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek().tok {
            Tok::Sym('-') => {
                self.next();
                Ok(-&self.unary()?)
            }
            Tok::Sym('+') => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Sym('^') {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        match t.tok {
            Tok::Num(v)
                if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 && !t.text.contains(['.', 'e', 'E']) =>
            {
                Ok(base.pow(v as u32))
            }
            _ => Err(Self::error_at(&t, format!("expected a nonnegative integer exponent, found {}", describe(&t)))),
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let n = self.names.len();
        let t = self.next();
        match &t.tok {
            Tok::Num(v) => Ok(Polynomial::constant(n, *v)),
            Tok::Ident(name) => match self.names.iter().position(|x| x == name) {
                Some(i) => Ok(Polynomial::var(n, i)),
                None => Err(Self::error_at(&t, format!("undeclared variable `{name}`"))),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            _ => Err(Self::error_at(&t, format!("expected a term, found {}", describe(&t)))),
        }
    }
}

fn describe(t: &Token) -> String {
    match t.tok {
        Tok::Eof => "end of input".into(),
        _ => format!("`{}`", t.text),
    }
}

pub fn parse_problem(src: &str) -> Result<ProblemFile, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0, names: Vec::new() };
    let mut objective = None;
    let mut constraints = ConstraintSet::default();
    let mut options = BTreeMap::new();
    let mut in_constraints = false;
    let mut have_vars = false;
    loop {
        let t = p.peek().clone();
        match &t.tok {
            Tok::Eof => break,
            Tok::Ident(k) if k == "vars" => {
                if have_vars {
                    return Err(Parser::error_at(&t, "duplicate `vars` statement"));
                }
                p.next();
                while let Tok::Ident(name) = &p.peek().tok {
                    if p.names.contains(name) {
                        return Err(Parser::error_at(p.peek(), format!("variable `{name}` declared twice")));
                    }
                    let name = name.clone();
                    p.names.push(name);
                    p.next();
                }
                if p.names.is_empty() {
                    return Err(Parser::error_at(p.peek(), "expected at least one variable name"));
                }
                p.expect_sym(';')?;
                have_vars = true;
            }
            _ if !have_vars => return Err(Parser::error_at(&t, "the file must start with `vars`")),
            Tok::Ident(k) if k == "minimize" => {
                if objective.is_some() {
                    return Err(Parser::error_at(&t, "duplicate `minimize` statement"));
                }
                p.next();
                objective = Some(p.expr()?);
                p.expect_sym(';')?;
            }
            Tok::Ident(k) if k == "options" => {
                p.next();
                while let Tok::Ident(key) = &p.peek().tok {
                    let key = key.clone();
                    p.next();
                    p.expect_sym('=')?;
                    let mut value = String::new();
                    if p.peek().tok == Tok::Sym('-') {
                        value.push('-');
                        p.next();
                    }
                    let v = p.next();
                    if !matches!(v.tok, Tok::Num(_) | Tok::Ident(_)) {
                        return Err(Parser::error_at(&v, format!("expected a value, found {}", describe(&v))));
                    }
                    value.push_str(&v.text);
                    options.insert(key, value);
                }
                p.expect_sym(';')?;
            }
            Tok::SuchThat => {
                p.next();
                in_constraints = true;
            }
            _ if in_constraints => {
                let lhs = p.expr()?;
                let rel = p.next();
                let rhs = p.expr()?;
                match rel.tok {
                    Tok::Sym('=') => constraints.equalities.push(&lhs - &rhs),
                    Tok::Ge => constraints.inequalities.push(&lhs - &rhs),
                    Tok::Le => constraints.inequalities.push(&rhs - &lhs),
                    _ => {
                        return Err(Parser::error_at(
                            &rel,
                            format!("expected `=`, `>=` or `<=`, found {}", describe(&rel)),
                        ))
                    }
                }
                p.expect_sym(';')?;
            }
            _ => return Err(Parser::error_at(&t, format!("expected a statement, found {}", describe(&t)))),
        }
    }
    let Some(objective) = objective else {
        let t = p.peek();
        return Err(Parser::error_at(t, "missing `minimize` statement"));
    };
    Ok(ProblemFile { names: p.names, objective, constraints, options })
}
