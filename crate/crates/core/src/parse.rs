//! Text input: Laurent polynomials, recurrences, hypergeometric term
//! ratios, prime ranges and b-files.
//!
//! Laurent polynomial grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary | <juxtaposed> unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' exponent)?
//! exp    := ['+' | '-'] integer | '(' ['+' | '-'] integer ')'
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Juxtaposition multiplies only after a closing parenthesis or a number
//! literal, so `2x`, `(x+1)(y+1)` and `(x+1)y` are products while `xy` is a
//! single identifier. Division is accepted only by a single monomial.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::cfinite::{CFiniteError, CFiniteSeq};
use crate::exactnum::{parse_rational, NumError, Rational};
use crate::hypergeom::{HypergeomSeq, IntPoly};
use crate::laurent::{LaurentError, LaurentPoly};

/// Exponents beyond this magnitude are rejected before expansion.
pub const MAX_EXPONENT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {message}")]
    SyntaxError { pos: usize, message: String },
    #[error("division at position {pos} is not by a single nonzero monomial; only Laurent polynomials are accepted")]
    NonMonomialDenominator { pos: usize },
    #[error("unknown variable `{name}` (declared: {declared})")]
    UnknownVariable { name: String, declared: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    CFinite(#[from] CFiniteError),
}

fn syntax(pos: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        pos,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((Tok::Int(s.parse().unwrap()), start));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(syntax(i, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Ast {
    Num(BigInt),
    Var(String),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>, usize),
    Pow(Box<Ast>, i64, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let prev_closes = self.pos > 0
                && matches!(self.toks[self.pos - 1].0, Tok::Op(')') | Tok::Int(_));
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.at();
                self.pos += 1;
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?), at);
            } else if prev_closes
                && matches!(self.peek(), Some(Tok::Op('(')) | Some(Tok::Ident(_)))
            {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Op('^')) {
            return Ok(base);
        }
        let at = self.at();
        self.pos += 1;
        let paren = self.eat('(');
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let e_pos = self.at();
        let Some(Tok::Int(e)) = self.peek().cloned() else {
            return Err(syntax(e_pos, "exponent must be an integer"));
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(syntax(self.at(), "exponent must be an integer"));
        }
        let mag = e
            .to_u64()
            .filter(|&m| m <= MAX_EXPONENT)
            .ok_or_else(|| syntax(e_pos, format!("exponent exceeds {MAX_EXPONENT}")))?;
        let e = if negative { -(mag as i64) } else { mag as i64 };
        Ok(Ast::Pow(Box::new(base), e, at))
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let at = self.at();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(Ast::Num(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Ast::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(syntax(self.at(), "expected `)`"));
                }
                Ok(inner)
            }
            Some(Tok::Op(c)) => Err(syntax(at, format!("unexpected `{c}`"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }
}

fn parse_ast(text: &str) -> Result<Ast, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
    };
    let ast = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(syntax(p.at(), "unexpected trailing input"));
    }
    Ok(ast)
}

fn collect_vars(ast: &Ast, out: &mut Vec<String>) {
    match ast {
        Ast::Num(_) => {}
        Ast::Var(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Ast::Neg(a) | Ast::Pow(a, _, _) => collect_vars(a, out),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b, _) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
    }
}

/// Inverse of a single-term polynomial.
fn monomial_inverse(f: &LaurentPoly, pos: usize) -> Result<LaurentPoly, ParseError> {
    let mut terms = f.terms();
    let (Some((e, c)), None) = (terms.next(), terms.next()) else {
        return Err(ParseError::NonMonomialDenominator { pos });
    };
    let neg: Vec<i64> = e.entries().iter().map(|x| -x).collect();
    Ok(LaurentPoly::monomial(neg, c.recip()))
}

fn eval(ast: &Ast, vars: &[String]) -> Result<LaurentPoly, ParseError> {
    let d = vars.len();
    Ok(match ast {
        Ast::Num(v) => LaurentPoly::constant(d, Rational::from_integer(v.clone())),
        Ast::Var(name) => LaurentPoly::var(d, vars.iter().position(|v| v == name).unwrap()),
        Ast::Neg(a) => eval(a, vars)?.neg(),
        Ast::Add(a, b) => eval(a, vars)?.add(&eval(b, vars)?)?,
        Ast::Sub(a, b) => eval(a, vars)?.sub(&eval(b, vars)?)?,
        Ast::Mul(a, b) => eval(a, vars)?.mul(&eval(b, vars)?)?,
        Ast::Div(a, b, pos) => eval(a, vars)?.mul(&monomial_inverse(&eval(b, vars)?, *pos)?)?,
        Ast::Pow(a, e, pos) => {
            let base = eval(a, vars)?;
            if *e >= 0 {
                base.pow(*e as u64)
            } else {
                monomial_inverse(&base, *pos)?.pow(e.unsigned_abs())
            }
        }
    })
}

/// Parses several polynomials over one shared variable list: the declared
/// names if given, else every name that appears, ordered `x, y, z, w` first
/// and the rest alphabetically (a single `x` when none appears).
pub fn parse_laurent_many(
    texts: &[&str],
    declared: Option<&[String]>,
) -> Result<(Vec<LaurentPoly>, Vec<String>), ParseError> {
    let asts: Vec<Ast> = texts.iter().map(|t| parse_ast(t)).collect::<Result<_, _>>()?;
    let mut seen = Vec::new();
    for a in &asts {
        collect_vars(a, &mut seen);
    }
    let vars = match declared {
        Some(decl) => {
            if let Some(bad) = seen.iter().find(|v| !decl.contains(v)) {
                return Err(ParseError::UnknownVariable {
                    name: bad.clone(),
                    declared: decl.join(", "),
                });
            }
            decl.to_vec()
        }
        None if seen.is_empty() => vec!["x".to_string()],
        None => {
            let mut seen = seen;
            seen.sort_by_key(|v| {
                let rank = ["x", "y", "z", "w"].iter().position(|d| d == v).unwrap_or(4);
                (rank, v.clone())
            });
            seen
        }
    };
    if vars.is_empty() {
        return Err(ParseError::Invalid("at least one variable is required".into()));
    }
    let polys = asts.iter().map(|a| eval(a, &vars)).collect::<Result<_, _>>()?;
    Ok((polys, vars))
}

pub fn parse_laurent(
    text: &str,
    declared: Option<&[String]>,
) -> Result<(LaurentPoly, Vec<String>), ParseError> {
    let (mut polys, vars) = parse_laurent_many(&[text], declared)?;
    Ok((polys.pop().unwrap(), vars))
}

/// Comma separated rationals, e.g. `0, 1, -3/2`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ParseError> {
    let text = text.trim().trim_start_matches('[').trim_end_matches(']');
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| parse_rational(s.trim()).map_err(ParseError::from))
        .collect()
}

/// Inclusive prime range `lo..hi`, or a single bound `hi` meaning `2..hi`.
pub fn parse_prime_range(text: &str) -> Result<(u64, u64), ParseError> {
    let bad = || ParseError::Invalid(format!("bad prime range `{text}`; expected lo..hi"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().trim_start_matches('=').parse().map_err(|_| bad())?,
        ),
        None => (2, text.trim().parse().map_err(|_| bad())?),
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Replaces every `f(n + j)` by a fresh symbol and returns the shifts.
fn extract_shifts(text: &str, symbol: impl Fn(i64) -> String) -> Result<(String, Vec<i64>), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::new();
    let mut shifts = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let mut j = i;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            if j < chars.len() && chars[j] == '(' {
                let close = chars[j..]
                    .iter()
                    .position(|&c| c == ')')
                    .map(|k| j + k)
                    .ok_or_else(|| syntax(j, "unclosed `(`"))?;
                let arg: String = chars[j + 1..close].iter().filter(|c| !c.is_whitespace()).collect();
                let shift = match arg.strip_prefix('n') {
                    Some("") => 0,
                    Some(rest) => rest
                        .strip_prefix('+')
                        .unwrap_or(rest)
                        .parse::<i64>()
                        .map_err(|_| syntax(j + 1, format!("expected n + integer, found `{arg}`")))?,
                    None => return Err(syntax(j + 1, format!("expected n + integer, found `{arg}`"))),
                };
                shifts.push(shift);
                out.push(' ');
                out.push_str(&symbol(shift));
                out.push(' ');
                i = close + 1;
            } else {
                let word: String = chars[start..i].iter().collect();
                return Err(syntax(start, format!("unexpected identifier `{word}`")));
            }
        } else {
            out.push(c);
            i += 1;
        }
    }
    Ok((out, shifts))
}

fn shift_symbol(j: i64) -> String {
    if j < 0 {
        format!("s_m{}", -j)
    } else {
        format!("s_{j}")
    }
}

/// `a(n+2) = a(n+1) + a(n)` style recurrence. Returns `c_0, ..., c_{r-1}`
/// with `A(n + r) = sum c_j A(n + j)`.
pub fn parse_recurrence(text: &str) -> Result<Vec<Rational>, ParseError> {
    let (lhs, rhs) = text
        .split_once('=')
        .ok_or_else(|| ParseError::Invalid("recurrence needs `=`".into()))?;
    let (lhs_s, mut shifts) = extract_shifts(lhs, shift_symbol)?;
    let (rhs_s, more) = extract_shifts(rhs, shift_symbol)?;
    shifts.extend(more);
    let (lo, hi) = match (shifts.iter().min(), shifts.iter().max()) {
        (Some(&lo), Some(&hi)) if hi > lo => (lo, hi),
        _ => return Err(ParseError::Invalid("recurrence must relate at least two shifts".into())),
    };
    let names: Vec<String> = (lo..=hi).map(shift_symbol).collect();
    let (polys, _) = parse_laurent_many(&[&lhs_s, &rhs_s], Some(&names))?;
    let eq = polys[0].sub(&polys[1])?;
    let mut coeff = vec![Rational::zero(); names.len()];
    for (e, c) in eq.terms() {
        let ones: Vec<usize> = e
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| i)
            .collect();
        match ones.as_slice() {
            [i] if e.entries()[*i] == 1 => coeff[*i] = c.clone(),
            _ => return Err(ParseError::Invalid("recurrence must be linear and homogeneous".into())),
        }
    }
    let lead = coeff.last().unwrap().clone();
    if lead.is_zero() {
        return Err(ParseError::Invalid("highest shift cancels".into()));
    }
    let order = coeff.len() - 1;
    Ok(coeff[..order].iter().map(|c| -c / &lead).collect())
}

/// Builds a C-finite sequence from a recurrence, initial values and offset.
pub fn parse_cfinite(rec: &str, init: &str, offset: usize) -> Result<CFiniteSeq, ParseError> {
    let coeffs = parse_recurrence(rec)?;
    let initial = parse_rational_list(init)?;
    Ok(CFiniteSeq::new(coeffs, offset, initial)?)
}

fn record_fields(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut map = BTreeMap::new();
    for part in text.split(';').filter(|s| !s.trim().is_empty()) {
        let (k, v) = part
            .split_once(':')
            .ok_or_else(|| ParseError::Invalid(format!("expected `key: value`, found `{}`", part.trim())))?;
        map.insert(k.trim().to_lowercase(), v.trim().to_string());
    }
    Ok(map)
}

/// `rec: a(n+2) = a(n+1) + a(n); init: 0, 1; offset: 0`
pub fn parse_cfinite_record(text: &str) -> Result<CFiniteSeq, ParseError> {
    let f = record_fields(text)?;
    let rec = f.get("rec").ok_or_else(|| ParseError::Invalid("missing `rec`".into()))?;
    let init = f.get("init").map(String::as_str).unwrap_or("");
    let offset = match f.get("offset") {
        Some(v) => v.parse().map_err(|_| ParseError::Invalid(format!("bad offset `{v}`")))?,
        None => 0,
    };
    parse_cfinite(rec, init, offset)
}

fn to_int_poly(f: &LaurentPoly, scale: &BigInt) -> Result<IntPoly, ParseError> {
    let mut coeffs = Vec::new();
    for (e, c) in f.terms() {
        let d = e.entries()[0];
        if d < 0 {
            return Err(ParseError::Invalid("alpha and beta must be polynomials in n".into()));
        }
        let d = d as usize;
        if coeffs.len() <= d {
            coeffs.resize(d + 1, BigInt::zero());
        }
        coeffs[d] = (c * Rational::from_integer(scale.clone())).to_integer();
    }
    Ok(IntPoly::new(coeffs))
}

/// `alpha: 4*(n+1)^2; beta: (2n+1)^2; a0: 1`, meaning
/// `alpha(n) A(n+1) = beta(n) A(n)`. Rational coefficients are cleared by a
/// common denominator.
pub fn parse_hypergeom_record(text: &str) -> Result<HypergeomSeq, ParseError> {
    let f = record_fields(text)?;
    let get = |k: &str| f.get(k).ok_or_else(|| ParseError::Invalid(format!("missing `{k}`")));
    let n = ["n".to_string()];
    let (polys, _) = parse_laurent_many(&[get("alpha")?, get("beta")?], Some(&n))?;
    let a0 = parse_rational(f.get("a0").map(String::as_str).unwrap_or("1"))?;
    let lcm = polys
        .iter()
        .flat_map(|p| p.terms().map(|(_, c)| c.denom().clone()).collect::<Vec<_>>())
        .fold(BigInt::one(), |acc, d| acc.lcm(&d));
    let alpha = to_int_poly(&polys[0], &lcm)?;
    let beta = to_int_poly(&polys[1], &lcm)?;
    HypergeomSeq::new(alpha, beta, a0).map_err(|e| ParseError::Invalid(e.to_string()))
}

/// OEIS b-file: lines `n a(n)`, `#` comments; indices must run 0, 1, 2, ...
pub fn parse_bfile(text: &str) -> Result<Vec<Rational>, ParseError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let bad = || ParseError::Invalid(format!("b-file line {}: expected `n value`", lineno + 1));
        let n: usize = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let v = it.next().ok_or_else(bad)?;
        if n != out.len() {
            return Err(ParseError::Invalid(format!(
                "b-file line {}: index {n} where {} was expected (indices must start at 0 and be consecutive)",
                lineno + 1,
                out.len()
            )));
        }
        out.push(parse_rational(v)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};
    use crate::laurent::default_var_names;

    fn p(text: &str) -> LaurentPoly {
        parse_laurent(text, None).unwrap().0
    }

    #[test]
    fn catalan_and_apery() {
        let cat = p("x^-1 + 2 + x");
        assert_eq!(
            cat,
            LaurentPoly::univariate(&[(-1, rat(1)), (0, rat(2)), (1, rat(1))])
        );
        assert_eq!(p("x^(-1) + 2 + x"), cat);
        let (ap, vars) = parse_laurent("(x + y)*(z + 1)*(x + y + z)*(x + y + 1)/(x*y*z)", None).unwrap();
        assert_eq!(vars, vec!["x", "y", "z"]);
        assert_eq!(ap.degree().unwrap(), 2);
        let juxtaposed = p("(x + y)(z + 1)(x + y + z)(x + y + 1)/(x*y*z)");
        assert_eq!(ap, juxtaposed);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_laurent("x^(1/2)", None),
            Err(ParseError::SyntaxError { .. })
        ));
        assert!(matches!(
            parse_laurent("1/(1 - x)", None),
            Err(ParseError::NonMonomialDenominator { pos: 1 })
        ));
        let decl = vec!["x".to_string()];
        assert!(matches!(
            parse_laurent("x + y", Some(&decl)),
            Err(ParseError::UnknownVariable { .. })
        ));
        assert!(matches!(parse_laurent("x +", None), Err(ParseError::SyntaxError { pos: 3, .. })));
        assert!(matches!(parse_laurent("(x", None), Err(ParseError::SyntaxError { .. })));
        assert!(matches!(parse_laurent("x $ 1", None), Err(ParseError::SyntaxError { pos: 2, .. })));
    }

    #[test]
    fn juxtaposition_rules() {
        let (f, vars) = parse_laurent("xy + 2x", None).unwrap();
        assert_eq!(vars, vec!["x", "xy"]);
        assert_eq!(f.var_count(), 2);
        let (_, vars) = parse_laurent("b + w*a + y", None).unwrap();
        assert_eq!(vars, vec!["y", "w", "a", "b"]);
        assert_eq!(p("2(x+1)"), p("2*x + 2"));
        assert_eq!(p("(x+1)x"), p("x^2 + x"));
        assert_eq!(p("3/2*x^2"), LaurentPoly::univariate(&[(2, ratio(3, 2))]));
        assert_eq!(p("-x^2"), LaurentPoly::univariate(&[(2, rat(-1))]));
        assert_eq!(p("(2x)^-2"), LaurentPoly::univariate(&[(-2, ratio(1, 4))]));
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "x^-1 + 2 + x",
            "1 - 3/2*x^2",
            "(x + y)*(z + 1)*(x + y + z)*(y + z + 1)/(x*y*z)",
            "-x*y^-1 + 7/3",
            "(1 + x)^4/x^2",
        ] {
            let (f, vars) = parse_laurent(text, None).unwrap();
            let names = default_var_names(vars.len());
            let printed = f.to_string();
            let (g, _) = parse_laurent(&printed, Some(&names)).unwrap();
            assert_eq!(f, g, "{text} printed as {printed}");
        }
    }

    #[test]
    fn recurrences() {
        assert_eq!(parse_recurrence("a(n+2) = a(n+1) + a(n)").unwrap(), vec![rat(1), rat(1)]);
        assert_eq!(parse_recurrence("a(n+1)=2a(n)").unwrap(), vec![rat(2)]);
        assert_eq!(
            parse_recurrence("a(n) = 3*a(n-1) - 2*a(n-2)").unwrap(),
            vec![rat(-2), rat(3)]
        );
        assert_eq!(parse_recurrence("2*f(n+1) = f(n)").unwrap(), vec![ratio(1, 2)]);
        assert!(parse_recurrence("a(n+1) = a(n)^2").is_err());
        assert!(parse_recurrence("a(n+1) = a(n) + 1").is_err());
        assert!(parse_recurrence("a(n+1) = a(2n)").is_err());
        let s = parse_cfinite_record("rec: a(n+1) = 2*a(n); init: 5, 2; offset: 1").unwrap();
        assert_eq!(s.eval_terms(3), vec![rat(5), rat(2), rat(4), rat(8)]);
    }

    #[test]
    fn hypergeometric_records() {
        let h = parse_hypergeom_record("alpha: 4*(n+1)^2; beta: (2n+1)^2; a0: 1").unwrap();
        assert_eq!(h.eval(2).unwrap(), vec![rat(1), ratio(1, 4), ratio(9, 64)]);
        let h = parse_hypergeom_record("alpha: (n+1)/2; beta: 1").unwrap();
        assert_eq!(h.eval(2).unwrap()[2], rat(2));
        assert!(parse_hypergeom_record("alpha: n^-1; beta: 1").is_err());
        assert!(parse_hypergeom_record("beta: 1").is_err());
    }

    #[test]
    fn ranges_lists_bfiles() {
        assert_eq!(parse_prime_range("7..300").unwrap(), (7, 300));
        assert_eq!(parse_prime_range("50").unwrap(), (2, 50));
        assert!(parse_prime_range("9..3").is_err());
        assert_eq!(parse_rational_list("0, 1, -3/2").unwrap(), vec![rat(0), rat(1), ratio(-3, 2)]);
        assert_eq!(parse_rational_list("").unwrap(), vec![]);
        let b = parse_bfile("# Catalan\n0 1\n1 1\n2 2\n\n3 5\n").unwrap();
        assert_eq!(b, vec![rat(1), rat(1), rat(2), rat(5)]);
        assert!(parse_bfile("1 1\n2 1\n").is_err());
    }
}
