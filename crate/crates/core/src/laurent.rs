//! Sparse multivariate Laurent polynomials.
//!
//! A [`LaurentPoly`] is a finite map from exponent vectors (which may hold
//! negative entries) to nonzero coefficients. The coefficient domain is a
//! [`CoeffRing`]: either the rationals or the residues modulo a fixed `m`.
//! Terms are kept in lexicographic exponent order, so iteration and the
//! canonical text form are deterministic.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactnum::{rational_mod, NumError, Rational, Residue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("coefficient modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },
    #[error("degree of the zero polynomial is undefined")]
    ZeroPolynomial,
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Coefficient domain of a Laurent polynomial.
pub trait CoeffRing: Clone + PartialEq + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Sign used by the text form; residues never print as negative.
    fn is_negative(&self, _a: &Self::Elem) -> bool {
        false
    }
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RationalField;

impl CoeffRing for RationalField {
    type Elem = Rational;

    fn zero(&self) -> Rational {
        Rational::zero()
    }
    fn one(&self) -> Rational {
        Rational::one()
    }
    fn is_zero(&self, a: &Rational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn neg(&self, a: &Rational) -> Rational {
        -a
    }
    fn is_negative(&self, a: &Rational) -> bool {
        a.is_negative()
    }
    fn describe(&self) -> String {
        "Q".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: u64,
}

impl ResidueRing {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        ResidueRing { modulus }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl CoeffRing for ResidueRing {
    type Elem = Residue;

    fn zero(&self) -> Residue {
        Residue::zero(self.modulus)
    }
    fn one(&self) -> Residue {
        Residue::one(self.modulus)
    }
    fn is_zero(&self, a: &Residue) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &Residue, b: &Residue) -> Residue {
        *a + *b
    }
    fn mul(&self, a: &Residue, b: &Residue) -> Residue {
        *a * *b
    }
    fn neg(&self, a: &Residue) -> Residue {
        -*a
    }
    fn describe(&self) -> String {
        format!("Z/{}", self.modulus)
    }
}

/// Exponents of one monomial, one entry per variable. Ordered
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentVector(Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn zero(nvars: usize) -> Self {
        ExponentVector(vec![0; nvars])
    }

    pub fn unit(nvars: usize, var: usize, exp: i64) -> Self {
        let mut e = vec![0; nvars];
        e[var] = exp;
        ExponentVector(e)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn plus(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn scaled(&self, k: i64) -> ExponentVector {
        ExponentVector(self.0.iter().map(|a| a * k).collect())
    }
}

/// Sparse Laurent polynomial over the coefficient ring `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPoly<R: CoeffRing = RationalField> {
    ring: R,
    nvars: usize,
    terms: BTreeMap<ExponentVector, R::Elem>,
}

impl LaurentPoly<RationalField> {
    /// Rational constant in `nvars` variables.
    pub fn constant(nvars: usize, c: Rational) -> Self {
        LaurentPoly::constant_in(RationalField, nvars, c)
    }

    /// The variable `x_var` (0-based) in `nvars` variables.
    pub fn var(nvars: usize, var: usize) -> Self {
        LaurentPoly::monomial_in(RationalField, ExponentVector::unit(nvars, var, 1), Rational::one())
    }

    pub fn monomial(exps: Vec<i64>, c: Rational) -> Self {
        LaurentPoly::monomial_in(RationalField, ExponentVector::new(exps), c)
    }

    /// Univariate polynomial from `(exponent, coefficient)` pairs.
    pub fn univariate(terms: &[(i64, Rational)]) -> Self {
        LaurentPoly::from_terms(
            RationalField,
            1,
            terms
                .iter()
                .map(|(e, c)| (ExponentVector::new(vec![*e]), c.clone())),
        )
    }

    /// Reduces every coefficient modulo `m`.
    pub fn reduce_mod(&self, m: u64) -> Result<LaurentPoly<ResidueRing>, NumError> {
        let ring = ResidueRing::new(m);
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let r = rational_mod(c, m)?;
            if !r.is_zero() {
                terms.insert(e.clone(), r);
            }
        }
        Ok(LaurentPoly {
            ring,
            nvars: self.nvars,
            terms,
        })
    }

    /// True when every coefficient has a denominator prime to `p`.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.terms
            .values()
            .all(|c| !crate::exactnum::denominator_divisible_by(c, p))
    }
}

impl<R: CoeffRing> LaurentPoly<R> {
    pub fn zero_in(ring: R, nvars: usize) -> Self {
        LaurentPoly {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant_in(ring: R, nvars: usize, c: R::Elem) -> Self {
        LaurentPoly::monomial_in(ring, ExponentVector::zero(nvars), c)
    }

    pub fn one_in(ring: R, nvars: usize) -> Self {
        let one = ring.one();
        LaurentPoly::constant_in(ring, nvars, one)
    }

    pub fn monomial_in(ring: R, exps: ExponentVector, c: R::Elem) -> Self {
        let nvars = exps.len();
        let mut terms = BTreeMap::new();
        if !ring.is_zero(&c) {
            terms.insert(exps, c);
        }
        LaurentPoly { ring, nvars, terms }
    }

    /// Builds a polynomial, summing repeated exponents and dropping zeros.
    pub fn from_terms<I>(ring: R, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, R::Elem)>,
    {
        let mut map: BTreeMap<ExponentVector, R::Elem> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            accumulate(&ring, &mut map, e, &c);
        }
        map.retain(|_, c| !ring.is_zero(c));
        LaurentPoly {
            ring,
            nvars,
            terms: map,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn var_count(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &ExponentVector) -> R::Elem {
        self.terms
            .get(exps)
            .cloned()
            .unwrap_or_else(|| self.ring.zero())
    }

    fn compatible(&self, other: &Self) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::VarCountMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        if self.ring != other.ring {
            return Err(LaurentError::ModulusMismatch {
                left: self.ring.describe(),
                right: other.ring.describe(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.compatible(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&self.ring, &mut terms, e.clone(), c);
        }
        terms.retain(|_, c| !self.ring.is_zero(c));
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, a)| (e.clone(), self.ring.mul(c, a)))
            .filter(|(_, a)| !self.ring.is_zero(a))
            .collect();
        LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.compatible(other)?;
        let mut terms = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let prod = self.ring.mul(c1, c2);
                accumulate(&self.ring, &mut terms, e1.plus(e2), &prod);
            }
        }
        terms.retain(|_, c| !self.ring.is_zero(c));
        Ok(LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms,
        })
    }

    /// `self^n` by binary powering.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = LaurentPoly::one_in(self.ring.clone(), self.nvars);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base).expect("same ring");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same ring");
            }
        }
        acc
    }

    pub fn constant_term(&self) -> R::Elem {
        self.coefficient(&ExponentVector::zero(self.nvars))
    }

    /// Largest `|exponent|` of any variable in any term.
    pub fn degree(&self) -> Result<u64, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::ZeroPolynomial);
        }
        Ok(self
            .terms
            .keys()
            .flat_map(|e| e.0.iter().map(|x| x.unsigned_abs()))
            .max()
            .unwrap_or(0))
    }

    /// Smallest and largest exponent of variable `var`; `None` for zero.
    pub fn exponent_range(&self, var: usize) -> Option<(i64, i64)> {
        let mut it = self.terms.keys().map(|e| e.0[var]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x))))
    }

    /// Section operator: keeps terms whose exponents are all divisible by
    /// `p` and divides those exponents by `p`.
    pub fn section(&self, p: u64) -> Self {
        assert!(p >= 1, "section step must be positive");
        let p = p as i64;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.0.iter().all(|x| x % p == 0))
            .map(|(e, c)| (ExponentVector(e.0.iter().map(|x| x / p).collect()), c.clone()))
            .collect();
        LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    /// Substitution `x -> x^p` in every variable.
    pub fn substitute_power(&self, p: u64) -> Self {
        assert!(p >= 1, "substitution power must be positive");
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.scaled(p as i64), c.clone()))
            .collect();
        LaurentPoly {
            ring: self.ring.clone(),
            nvars: self.nvars,
            terms,
        }
    }

    /// Canonical text form with the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        assert!(names.len() >= self.nvars, "not enough variable names");
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let negative = self.ring.is_negative(c);
            let abs = if negative { self.ring.neg(c) } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = format_monomial(e, names);
            let is_one = abs == self.ring.one();
            match (mono.is_empty(), is_one) {
                (true, _) => out.push_str(&abs.to_string()),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&abs.to_string());
                    out.push('*');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

fn accumulate<R: CoeffRing>(
    ring: &R,
    map: &mut BTreeMap<ExponentVector, R::Elem>,
    e: ExponentVector,
    c: &R::Elem,
) {
    match map.get_mut(&e) {
        Some(v) => *v = ring.add(v, c),
        None => {
            map.insert(e, c.clone());
        }
    }
}

fn format_monomial(e: &ExponentVector, names: &[String]) -> String {
    let parts: Vec<String> = e
        .0
        .iter()
        .enumerate()
        .filter(|(_, &x)| x != 0)
        .map(|(i, &x)| {
            if x == 1 {
                names[i].clone()
            } else {
                format!("{}^{}", names[i], x)
            }
        })
        .collect();
    parts.join("*")
}

/// Default variable names: `x, y, z, w` for up to four variables, otherwise
/// `x1, x2, ...`.
pub fn default_var_names(nvars: usize) -> Vec<String> {
    if nvars <= 4 {
        ["x", "y", "z", "w"][..nvars.max(1)]
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

impl<R: CoeffRing> fmt::Display for LaurentPoly<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&default_var_names(self.nvars)))
    }
}

/// `[ct[P^0 Q], ..., ct[P^N Q]]` over the rationals, multiplying in one factor
/// of `P` at a time with integer coefficients and dropping monomials that can
/// no longer reach the zero exponent by step `N`.
pub fn ct_sequence(
    p: &LaurentPoly<RationalField>,
    q: &LaurentPoly<RationalField>,
    n_max: usize,
) -> Result<Vec<Rational>, LaurentError> {
    p.compatible(q)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(q.constant_term());
    if p.is_zero() || q.is_zero() {
        out.resize(n_max + 1, Rational::zero());
        return Ok(out);
    }
    let ranges: Vec<(i64, i64)> = (0..p.nvars).map(|v| p.exponent_range(v).unwrap()).collect();
    let (p_int, p_den) = integer_form(p);
    let (q_int, q_den) = integer_form(q);
    let n_i = n_max as i64;
    let mut cur: HashMap<Vec<i64>, BigInt> = q_int
        .into_iter()
        .filter(|(e, _)| may_reach_zero(e, n_i, &ranges))
        .collect();
    let zero = vec![0i64; p.nvars];
    let mut den = q_den;
    for j in 1..=n_i {
        let rem = n_i - j;
        let mut next: HashMap<Vec<i64>, BigInt> = HashMap::with_capacity(cur.len() * 2);
        for (e, c) in &cur {
            for (d, pc) in &p_int {
                let ne: Vec<i64> = e.iter().zip(d).map(|(a, b)| a + b).collect();
                if may_reach_zero(&ne, rem, &ranges) {
                    *next.entry(ne).or_insert_with(BigInt::zero) += c * pc;
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
        den *= &p_den;
        let ct = cur.get(&zero).cloned().unwrap_or_else(BigInt::zero);
        out.push(Rational::new(ct, den.clone()));
    }
    Ok(out)
}

/// Integer coefficients and the common denominator that was cleared.
fn integer_form(f: &LaurentPoly<RationalField>) -> (Vec<(Vec<i64>, BigInt)>, BigInt) {
    let den = f
        .terms
        .values()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let terms = f
        .terms
        .iter()
        .map(|(e, c)| (e.0.clone(), c.numer() * (&den / c.denom())))
        .collect();
    (terms, den)
}

/// Whether some exponent can return to zero within `rem` further factors
/// whose exponents lie in `ranges`. A necessary condition checked per variable.
fn may_reach_zero(e: &[i64], rem: i64, ranges: &[(i64, i64)]) -> bool {
    e.iter().zip(ranges).all(|(&x, &(lo, hi))| {
        if x > 0 {
            x + rem * lo <= 0
        } else {
            x == 0 || x + rem * hi >= 0
        }
    })
}

/// `ct[P^n Q]` over a residue ring for possibly large `n`.
///
/// Multiplies `Q` by `P` one factor at a time and discards every monomial
/// that can no longer reach the zero exponent with the factors still to come.
pub fn ct_power_mod(
    p: &LaurentPoly<ResidueRing>,
    q: &LaurentPoly<ResidueRing>,
    n: u64,
) -> Result<Residue, LaurentError> {
    p.compatible(q)?;
    let m = p.ring.modulus;
    if n == 0 || q.is_zero() {
        return Ok(q.constant_term());
    }
    if p.is_zero() {
        return Ok(Residue::zero(m));
    }
    let nvars = p.nvars;
    let p_ranges: Vec<(i64, i64)> = (0..nvars).map(|v| p.exponent_range(v).unwrap()).collect();
    let q_ranges: Vec<(i64, i64)> = (0..nvars).map(|v| q.exponent_range(v).unwrap()).collect();
    let n_i = i64::try_from(n).expect("power fits in i64");
    // Largest magnitude any surviving exponent can take.
    let bound = (0..nvars)
        .map(|v| {
            let (plo, phi) = p_ranges[v];
            let (qlo, qhi) = q_ranges[v];
            (n_i * plo.abs().max(phi.abs())) + qlo.abs().max(qhi.abs())
        })
        .max()
        .unwrap_or(0);
    if nvars == 1 {
        return Ok(dense_univariate_ct(p, q, n, p_ranges[0], bound));
    }
    let bits = if nvars == 0 { 64 } else { 64 / nvars as u32 };
    if nvars <= 4 && bits < 64 && bound < (1i64 << (bits - 1)) - 1 {
        return Ok(packed_ct(p, q, n, &p_ranges, bits));
    }
    Ok(generic_ct(p, q, n, &p_ranges))
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    if m <= u32::MAX as u64 {
        a * b % m
    } else {
        (a as u128 * b as u128 % m as u128) as u64
    }
}

fn dense_univariate_ct(
    p: &LaurentPoly<ResidueRing>,
    q: &LaurentPoly<ResidueRing>,
    n: u64,
    (plo, phi): (i64, i64),
    bound: i64,
) -> Residue {
    let m = p.ring.modulus;
    let offset = bound;
    let width = (2 * bound + 1) as usize;
    let mut cur = vec![0u64; width];
    let pterms: Vec<(i64, u64)> = p.terms.iter().map(|(e, c)| (e.0[0], c.value())).collect();
    let n_i = n as i64;
    // Surviving window after j factors: e + rem*plo <= 0 <= e + rem*phi.
    let window = |rem: i64| (-rem * phi, -rem * plo);
    let (mut lo, mut hi) = (i64::MAX, i64::MIN);
    let (wlo, whi) = window(n_i);
    for (e, c) in &q.terms {
        let x = e.0[0];
        if x >= wlo && x <= whi {
            cur[(x + offset) as usize] = c.value();
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    let mut next = vec![0u64; width];
    for j in 1..=n_i {
        if lo > hi {
            return Residue::zero(m);
        }
        let rem = n_i - j;
        let (wlo, whi) = window(rem);
        let nlo = (lo + plo).max(wlo);
        let nhi = (hi + phi).min(whi);
        if nlo > nhi {
            return Residue::zero(m);
        }
        for slot in &mut next[(nlo + offset) as usize..=(nhi + offset) as usize] {
            *slot = 0;
        }
        for x in lo..=hi {
            let c = cur[(x + offset) as usize];
            if c == 0 {
                continue;
            }
            for &(d, pc) in &pterms {
                let y = x + d;
                if y < nlo || y > nhi {
                    continue;
                }
                let idx = (y + offset) as usize;
                let v = next[idx] + mulmod(c, pc, m);
                next[idx] = if v >= m { v - m } else { v };
            }
        }
        for slot in &mut cur[(lo + offset) as usize..=(hi + offset) as usize] {
            *slot = 0;
        }
        std::mem::swap(&mut cur, &mut next);
        lo = nlo;
        hi = nhi;
    }
    if lo <= 0 && 0 <= hi {
        Residue::new(cur[offset as usize], m)
    } else {
        Residue::zero(m)
    }
}

fn survives(e: &[i64], rem: i64, ranges: &[(i64, i64)]) -> bool {
    e.iter()
        .zip(ranges)
        .all(|(&x, &(lo, hi))| x + rem * lo <= 0 && 0 <= x + rem * hi)
}

fn packed_ct(
    p: &LaurentPoly<ResidueRing>,
    q: &LaurentPoly<ResidueRing>,
    n: u64,
    ranges: &[(i64, i64)],
    bits: u32,
) -> Residue {
    let m = p.ring.modulus;
    let nvars = p.nvars;
    let bias = 1i64 << (bits - 1);
    let mask = (1u64 << bits) - 1;
    let pack = |e: &[i64]| -> u64 {
        e.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &x)| acc | (((x + bias) as u64) << (bits * i as u32)))
    };
    let delta = |e: &[i64]| -> u64 {
        e.iter().enumerate().fold(0u64, |acc, (i, &x)| {
            acc.wrapping_add((x as u64).wrapping_shl(bits * i as u32))
        })
    };
    let unpack = |k: u64, out: &mut [i64]| {
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = ((k >> (bits * i as u32)) & mask) as i64 - bias;
        }
    };
    let pterms: Vec<(u64, u64)> = p.terms.iter().map(|(e, c)| (delta(&e.0), c.value())).collect();
    let n_i = n as i64;
    let mut cur: HashMap<u64, u64> = HashMap::new();
    for (e, c) in &q.terms {
        if survives(&e.0, n_i, ranges) {
            cur.insert(pack(&e.0), c.value());
        }
    }
    let mut scratch = vec![0i64; nvars];
    for j in 1..=n_i {
        let rem = n_i - j;
        let mut next: HashMap<u64, u64> = HashMap::with_capacity(cur.len() * 2);
        for (&k, &c) in &cur {
            for &(d, pc) in &pterms {
                let nk = k.wrapping_add(d);
                unpack(nk, &mut scratch);
                if !survives(&scratch, rem, ranges) {
                    continue;
                }
                let v = next.entry(nk).or_insert(0);
                let s = *v + mulmod(c, pc, m);
                *v = if s >= m { s - m } else { s };
            }
        }
        next.retain(|_, v| *v != 0);
        if next.is_empty() {
            return Residue::zero(m);
        }
        cur = next;
    }
    let zero = pack(&vec![0; nvars]);
    Residue::new(cur.get(&zero).copied().unwrap_or(0), m)
}

fn generic_ct(
    p: &LaurentPoly<ResidueRing>,
    q: &LaurentPoly<ResidueRing>,
    n: u64,
    ranges: &[(i64, i64)],
) -> Residue {
    let ring = p.ring;
    let n_i = n as i64;
    let mut cur: BTreeMap<ExponentVector, Residue> = q
        .terms
        .iter()
        .filter(|(e, _)| survives(&e.0, n_i, ranges))
        .map(|(e, c)| (e.clone(), *c))
        .collect();
    for j in 1..=n_i {
        let rem = n_i - j;
        let mut next = BTreeMap::new();
        for (e, c) in &cur {
            for (d, pc) in &p.terms {
                let ne = e.plus(d);
                if survives(&ne.0, rem, ranges) {
                    accumulate(&ring, &mut next, ne, &(*c * *pc));
                }
            }
        }
        next.retain(|_, c| !c.is_zero());
        cur = next;
    }
    cur.get(&ExponentVector::zero(p.nvars))
        .copied()
        .unwrap_or_else(|| ring.zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, ratio};

    fn x() -> LaurentPoly {
        LaurentPoly::var(1, 0)
    }

    fn c(v: i64) -> LaurentPoly {
        LaurentPoly::constant(1, rat(v))
    }

    fn catalan_kernel() -> LaurentPoly {
        LaurentPoly::univariate(&[(-1, rat(1)), (0, rat(2)), (1, rat(1))])
    }

    fn apery_kernel() -> LaurentPoly {
        let v = |i| LaurentPoly::var(3, i);
        let one = LaurentPoly::constant(3, rat(1));
        let (x, y, z) = (v(0), v(1), v(2));
        let f1 = x.add(&y).unwrap();
        let f2 = z.add(&one).unwrap();
        let f3 = f1.add(&z).unwrap();
        let f4 = y.add(&z).unwrap().add(&one).unwrap();
        let num = f1.mul(&f2).unwrap().mul(&f3).unwrap().mul(&f4).unwrap();
        num.mul(&LaurentPoly::monomial(vec![-1, -1, -1], rat(1))).unwrap()
    }

    #[test]
    fn ring_examples() {
        let xinv = LaurentPoly::univariate(&[(-1, rat(1))]);
        assert_eq!(xinv.mul(&x()).unwrap(), c(1));
        let lhs = c(1).add(&x()).unwrap().mul(&c(1).sub(&x()).unwrap()).unwrap();
        assert_eq!(lhs, LaurentPoly::univariate(&[(0, rat(1)), (2, rat(-1))]));
        let f = catalan_kernel();
        assert!(f.add(&f.scale(&rat(-1))).unwrap().is_zero());
    }

    #[test]
    fn mismatches_are_errors() {
        let two = LaurentPoly::var(2, 1);
        assert!(matches!(
            x().add(&two),
            Err(LaurentError::VarCountMismatch { left: 1, right: 2 })
        ));
        let a = x().reduce_mod(5).unwrap();
        let b = x().reduce_mod(7).unwrap();
        assert!(matches!(a.mul(&b), Err(LaurentError::ModulusMismatch { .. })));
    }

    #[test]
    fn powers() {
        let sq = catalan_kernel().pow(2);
        let expect = LaurentPoly::univariate(&[
            (-2, rat(1)),
            (-1, rat(4)),
            (0, rat(6)),
            (1, rat(4)),
            (2, rat(1)),
        ]);
        assert_eq!(sq, expect);
        assert_eq!(catalan_kernel().pow(0), c(1));
        let f = c(1).add(&x()).unwrap().reduce_mod(2).unwrap();
        let expect = LaurentPoly::univariate(&[(0, rat(1)), (4, rat(1))])
            .reduce_mod(2)
            .unwrap();
        assert_eq!(f.pow(4), expect);
    }

    #[test]
    fn constant_terms() {
        assert_eq!(catalan_kernel().pow(2).constant_term(), rat(6));
        let q = c(1).sub(&x()).unwrap();
        assert_eq!(catalan_kernel().pow(3).mul(&q).unwrap().constant_term(), rat(5));
        let xy = LaurentPoly::var(2, 0).add(&LaurentPoly::var(2, 1)).unwrap();
        assert_eq!(xy.constant_term(), rat(0));
    }

    #[test]
    fn degrees() {
        assert_eq!(catalan_kernel().degree().unwrap(), 1);
        assert_eq!(apery_kernel().degree().unwrap(), 2);
        assert_eq!(c(7).degree().unwrap(), 0);
        assert_eq!(c(0).degree(), Err(LaurentError::ZeroPolynomial));
    }

    #[test]
    fn section_and_substitution() {
        let sq = catalan_kernel().pow(2);
        assert_eq!(
            sq.section(2),
            LaurentPoly::univariate(&[(-1, rat(1)), (0, rat(6)), (1, rat(1))])
        );
        let xy = LaurentPoly::var(2, 0).add(&LaurentPoly::var(2, 1)).unwrap();
        assert!(xy.section(3).is_zero());
        assert_eq!(sq.section(1), sq);
        let one_x = c(1).add(&x()).unwrap();
        assert_eq!(
            one_x.substitute_power(2),
            LaurentPoly::univariate(&[(0, rat(1)), (2, rat(1))])
        );
        assert_eq!(c(3).substitute_power(5), c(3));
        let f = LaurentPoly::univariate(&[(-1, rat(1)), (1, rat(1))]);
        assert_eq!(
            f.substitute_power(3),
            LaurentPoly::univariate(&[(-3, rat(1)), (3, rat(1))])
        );
    }

    #[test]
    fn ct_sequence_examples() {
        let q = c(1).sub(&x()).unwrap();
        let seq = ct_sequence(&catalan_kernel(), &q, 4).unwrap();
        assert_eq!(seq, vec![rat(1), rat(1), rat(2), rat(5), rat(14)]);
        assert_eq!(ct_sequence(&c(1), &c(3), 2).unwrap(), vec![rat(3); 3]);
        let one = LaurentPoly::constant(3, rat(1));
        assert_eq!(ct_sequence(&apery_kernel(), &one, 1).unwrap(), vec![rat(1), rat(5)]);
        assert!(ct_sequence(&catalan_kernel(), &one, 1).is_err());
    }

    #[test]
    fn canonical_text() {
        assert_eq!(catalan_kernel().to_string(), "x^-1 + 2 + x");
        let f = LaurentPoly::univariate(&[(0, rat(1)), (2, ratio(-3, 2))]);
        assert_eq!(f.to_string(), "1 - 3/2*x^2");
        assert_eq!(LaurentPoly::constant(1, rat(0)).to_string(), "0");
        let g = LaurentPoly::monomial(vec![1, -1], rat(-1));
        assert_eq!(g.to_string(), "-x*y^-1");
    }

    #[test]
    fn pruned_modular_ct_matches_expansion() {
        let q = c(1).sub(&x()).unwrap();
        let exact = ct_sequence(&catalan_kernel(), &q, 40).unwrap();
        for m in [5u64, 7, 25, 49] {
            let pm = catalan_kernel().reduce_mod(m).unwrap();
            let qm = q.reduce_mod(m).unwrap();
            for (n, a) in exact.iter().enumerate() {
                let fast = ct_power_mod(&pm, &qm, n as u64).unwrap();
                assert_eq!(fast, rational_mod(a, m).unwrap(), "n={n} m={m}");
            }
        }
        let one = LaurentPoly::constant(3, rat(1));
        let exact = ct_sequence(&apery_kernel(), &one, 6).unwrap();
        let pm = apery_kernel().reduce_mod(49).unwrap();
        let qm = one.reduce_mod(49).unwrap();
        let ranges: Vec<(i64, i64)> = (0..3).map(|v| pm.exponent_range(v).unwrap()).collect();
        assert_eq!(ranges, vec![(-1, 1), (-1, 2), (-1, 2)]);
        for (n, a) in exact.iter().enumerate() {
            assert_eq!(ct_power_mod(&pm, &qm, n as u64).unwrap(), rational_mod(a, 49).unwrap());
            assert_eq!(
                generic_ct(&pm, &qm, n as u64, &ranges),
                rational_mod(a, 49).unwrap()
            );
        }
    }
}
