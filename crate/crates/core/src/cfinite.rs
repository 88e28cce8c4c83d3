//! C-finite sequences: linear recurrences with constant rational
//! coefficients that hold from some offset `n0` on.
//!
//! Characteristic roots follow the convention that `0` is a root of
//! multiplicity `m0` when the sequence only starts obeying its minimal
//! constant-coefficient recurrence at index `m0`. Equivalently, they are the
//! roots of the minimal-degree polynomial `P` with `P(N) A(n) = 0` for all
//! `n >= 0`, `N` being the shift operator.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::exactnum::{binomial, rat, rational_mod, NumError, Rational, Residue};
use crate::linalg::solve;
use crate::upoly::UPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CFiniteError {
    #[error("recurrence order must be positive")]
    EmptyRecurrence,
    #[error("expected {expected} initial values (offset + order), got {got}")]
    InitialLength { expected: usize, got: usize },
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("linear decomposition unexpectedly inconsistent: {0}")]
    DecompositionFailure(&'static str),
    #[error("irreducible factor search exceeded {0} candidates")]
    FactorizationLimit(u64),
}

/// Monic annihilating polynomial of a sequence, ascending coefficients.
pub type AnnihilatorPoly = UPoly;

/// `A(n + r) = c_{r-1} A(n + r - 1) + ... + c_0 A(n)` for all `n >= offset`,
/// with `A(0), ..., A(offset + r - 1)` given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFiniteSeq {
    coeffs: Vec<Rational>,
    offset: usize,
    initial: Vec<Rational>,
}

/// Characteristic roots of the minimal annihilator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharRoots {
    /// Distinct nonzero rational roots with multiplicities, ascending.
    pub rational_roots: Vec<(Rational, usize)>,
    pub zero_multiplicity: usize,
    pub residual_degree: usize,
    /// Monic factor without rational roots (`1` when `residual_degree == 0`).
    pub residual: UPoly,
}

impl CharRoots {
    /// Number of distinct characteristic roots, counting `0` once if present.
    pub fn distinct_count(&self) -> usize {
        self.rational_roots.len() + usize::from(self.zero_multiplicity > 0)
    }

    pub fn all_rational(&self) -> bool {
        self.residual_degree == 0
    }
}

/// One part `alpha * Tr(theta^n)` of a trace sequence; `u` is the reversed
/// minimal polynomial of `theta`, irreducible with `u(0) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePart {
    pub alpha: Rational,
    pub u: UPoly,
}

/// `A(n) = constant * [n = 0] + sum alpha_i * Tr(theta_i^n)`.
///
/// In generating-function form every part contributes
/// `alpha * (deg u - x u'(x) / u(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceDecomposition {
    pub constant: Rational,
    pub parts: Vec<TracePart>,
}

impl CFiniteSeq {
    pub fn new(
        coeffs: Vec<Rational>,
        offset: usize,
        initial: Vec<Rational>,
    ) -> Result<Self, CFiniteError> {
        if coeffs.is_empty() {
            return Err(CFiniteError::EmptyRecurrence);
        }
        let expected = offset + coeffs.len();
        if initial.len() != expected {
            return Err(CFiniteError::InitialLength {
                expected,
                got: initial.len(),
            });
        }
        Ok(CFiniteSeq {
            coeffs,
            offset,
            initial,
        })
    }

    /// Offset-0 recurrence from integer data.
    pub fn from_ints(coeffs: &[i64], initial: &[i64]) -> Result<Self, CFiniteError> {
        CFiniteSeq::new(
            coeffs.iter().map(|&c| rat(c)).collect(),
            0,
            initial.iter().map(|&c| rat(c)).collect(),
        )
    }

    /// Sequence annihilated by the monic polynomial `annihilator` (valid
    /// from `n = 0`), with the first `deg` terms given. A constant
    /// annihilator is represented by the zero sequence.
    pub fn from_annihilator(annihilator: &UPoly, initial: &[Rational]) -> Result<Self, CFiniteError> {
        let m = annihilator.monic();
        let d = m.degree().unwrap_or(0);
        if d == 0 {
            return CFiniteSeq::new(vec![Rational::zero()], 0, vec![Rational::zero()]);
        }
        let coeffs = (0..d).map(|i| -m.coeff(i)).collect();
        CFiniteSeq::new(coeffs, 0, initial.to_vec())
    }

    /// Finite-support sequence `values[0], values[1], ..., 0, 0, ...`.
    pub fn finite_support(values: &[Rational]) -> Self {
        let mut init = values.to_vec();
        init.push(Rational::zero());
        CFiniteSeq {
            coeffs: vec![Rational::zero()],
            offset: values.len(),
            initial: init,
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn initial(&self) -> &[Rational] {
        &self.initial
    }

    /// `x^r - c_{r-1} x^{r-1} - ... - c_0`
    pub fn char_poly(&self) -> UPoly {
        let mut c: Vec<Rational> = self.coeffs.iter().map(|c| -c.clone()).collect();
        c.push(Rational::one());
        UPoly::new(c)
    }

    /// `x^offset * char_poly`, annihilates the sequence from `n = 0`.
    pub fn known_annihilator(&self) -> UPoly {
        UPoly::monomial(self.offset).mul(&self.char_poly())
    }

    /// Exact `A(0..=n_max)`.
    pub fn eval_terms(&self, n_max: usize) -> Vec<Rational> {
        let r = self.order();
        let mut out: Vec<Rational> = self.initial.iter().take(n_max + 1).cloned().collect();
        while out.len() <= n_max {
            let n = out.len() - r;
            let next = self
                .coeffs
                .iter()
                .enumerate()
                .fold(Rational::zero(), |acc, (i, c)| acc + c * &out[n + i]);
            out.push(next);
        }
        out
    }

    /// True when `p` divides no denominator of the coefficients or initial
    /// values.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.coeffs
            .iter()
            .chain(&self.initial)
            .all(|q| !crate::exactnum::denominator_divisible_by(q, p))
    }

    /// `A(index) mod modulus` by binary powering of the companion matrix.
    pub fn eval_mod(&self, index: &BigUint, modulus: u64) -> Result<Residue, CFiniteError> {
        let reduce = |q: &Rational| rational_mod(q, modulus);
        let coeffs: Vec<Residue> = self.coeffs.iter().map(reduce).collect::<Result<_, _>>()?;
        let init: Vec<Residue> = self.initial.iter().map(reduce).collect::<Result<_, _>>()?;
        if let Some(i) = index.to_usize() {
            if i < init.len() {
                return Ok(init[i]);
            }
        }
        let r = self.order();
        let steps = index - BigUint::from(self.offset);
        let companion = Matrix::companion(&coeffs, modulus);
        let power = companion.pow(&steps);
        let state = &init[self.offset..];
        let mut acc = Residue::zero(modulus);
        for (j, s) in state.iter().enumerate().take(r) {
            acc = acc + power.get(0, j) * *s;
        }
        Ok(acc)
    }

    /// Minimal-degree monic `P` with `P(N) A(n) = 0` for every `n >= 0`.
    ///
    /// A candidate of degree `d` is accepted when it annihilates the window
    /// `n < D`, `D = offset + order`: `P(N) A` obeys the known recurrence of
    /// order `D`, so vanishing on `D` consecutive terms forces it to vanish.
    pub fn minimal_annihilator(&self) -> AnnihilatorPoly {
        let window = self.offset + self.order();
        let terms = self.eval_terms(2 * window + 1);
        for d in 0..=window {
            let rows: Vec<Vec<Rational>> = (0..window)
                .map(|n| (0..d).map(|i| terms[n + i].clone()).collect())
                .collect();
            let rhs: Vec<Rational> = (0..window).map(|n| -terms[n + d].clone()).collect();
            if let Some(sol) = solve(&rows, &rhs) {
                let mut c = sol;
                c.push(Rational::one());
                return UPoly::new(c);
            }
        }
        unreachable!("the known annihilator always certifies")
    }

    pub fn is_zero_sequence(&self) -> bool {
        self.minimal_annihilator().degree() == Some(0)
    }

    /// Factor the minimal annihilator as `x^m0 * prod (x - l)^m * R(x)`.
    pub fn characteristic_roots(&self) -> CharRoots {
        let m = self.minimal_annihilator();
        let m0 = m.zero_root_multiplicity();
        let (roots, residual) = m.rational_roots();
        let residual = residual.monic();
        CharRoots {
            rational_roots: roots,
            zero_multiplicity: m0,
            residual_degree: residual.degree().unwrap_or(0),
            residual,
        }
    }

    /// `(numerator, denominator)` of the generating function, with the
    /// denominator the reversal of the minimal annihilator.
    pub fn generating_function(&self) -> (UPoly, UPoly) {
        let m = self.minimal_annihilator();
        let d = m.degree().unwrap_or(0);
        let den = m.reversal();
        if d == 0 {
            return (UPoly::zero(), den);
        }
        let terms = self.eval_terms(d - 1);
        let series = UPoly::new(terms);
        let prod = series.mul(&den);
        let num = UPoly::new((0..d).map(|i| prod.coeff(i)).collect());
        (num, den)
    }

    /// The separable part: `S` annihilated by `x * rad(R)` (`R` the nonzero-
    /// root part of the minimal annihilator) with `A(n) = S(n) + n T(n)` for
    /// some `T` annihilated by the minimal annihilator.
    pub fn separable_part(&self) -> Result<CFiniteSeq, CFiniteError> {
        let m = self.minimal_annihilator();
        let m0 = m.zero_root_multiplicity();
        let nonzero = m.shift_down(m0);
        let s_ann = UPoly::monomial(1).mul(&nonzero.radical());
        let s_dim = s_ann.degree().unwrap_or(0);
        let t_dim = m.degree().unwrap_or(0);
        let len = s_dim + 2 * t_dim + 2;
        let target = self.eval_terms(len - 1);
        let s_basis = unit_basis(&s_ann, len);
        let t_basis = unit_basis(&m, len);
        let rows: Vec<Vec<Rational>> = (0..len)
            .map(|n| {
                let nn = rat(n as i64);
                s_basis
                    .iter()
                    .map(|b| b[n].clone())
                    .chain(t_basis.iter().map(|b| &nn * &b[n]))
                    .collect()
            })
            .collect();
        let sol = solve(&rows, &target)
            .ok_or(CFiniteError::DecompositionFailure("separable part"))?;
        CFiniteSeq::from_annihilator(&s_ann, &sol[..s_dim])
    }

    /// Trace decomposition if the sequence is a rational linear combination
    /// of power traces of algebraic numbers (plus a delta at `n = 0`).
    pub fn is_trace_sequence(&self) -> Result<Option<TraceDecomposition>, CFiniteError> {
        let m = self.minimal_annihilator();
        let m0 = m.zero_root_multiplicity();
        if m0 > 1 {
            return Ok(None);
        }
        let nonzero = m.shift_down(m0);
        if nonzero.radical().degree() != nonzero.degree() {
            return Ok(None);
        }
        let factors = irreducible_factors(&nonzero)?;
        let total: usize = factors.iter().map(|f| f.degree().unwrap_or(0)).sum();
        let width = (2 * total + 2).max(m.degree().unwrap_or(0) + 2);
        let check = 2 * width;
        let target = self.eval_terms(check - 1);
        let sums: Vec<Vec<Rational>> = factors.iter().map(|g| power_sums(g, check)).collect();
        let row = |n: usize| -> Vec<Rational> {
            let delta = if n == 0 { Rational::one() } else { Rational::zero() };
            std::iter::once(delta)
                .chain(sums.iter().map(|s| s[n].clone()))
                .collect()
        };
        let rows: Vec<Vec<Rational>> = (0..width).map(row).collect();
        let Some(sol) = solve(&rows, &target[..width]) else {
            return Ok(None);
        };
        for (n, t) in target.iter().enumerate().skip(width) {
            let v: Rational = row(n).iter().zip(&sol).map(|(a, b)| a * b).sum();
            if &v != t {
                return Ok(None);
            }
        }
        let parts = factors
            .iter()
            .zip(&sol[1..])
            .filter(|(_, a)| !a.is_zero())
            .map(|(g, a)| TracePart {
                alpha: a.clone(),
                u: g.reversal(),
            })
            .collect();
        Ok(Some(TraceDecomposition {
            constant: sol[0].clone(),
            parts,
        }))
    }
}

/// Sequences with unit initial vectors under the monic annihilator `ann`.
fn unit_basis(ann: &UPoly, len: usize) -> Vec<Vec<Rational>> {
    let d = ann.degree().unwrap_or(0);
    (0..d)
        .map(|i| {
            let mut init = vec![Rational::zero(); d];
            init[i] = Rational::one();
            unroll(ann, &init, len)
        })
        .collect()
}

/// First `len` terms of the sequence with initial values `init` annihilated
/// by the monic polynomial `ann`.
pub(crate) fn unroll(ann: &UPoly, init: &[Rational], len: usize) -> Vec<Rational> {
    let d = ann.degree().unwrap_or(0);
    let mut out: Vec<Rational> = init.iter().take(len).cloned().collect();
    if d == 0 {
        out.resize(len, Rational::zero());
        return out;
    }
    while out.len() < len {
        let n = out.len() - d;
        let v: Rational = (0..d).map(|i| -(ann.coeff(i) * &out[n + i])).sum();
        out.push(v);
    }
    out
}

/// `Tr(theta^n)` over the roots of the monic polynomial `g`, `n < len`.
pub(crate) fn power_sums(g: &UPoly, len: usize) -> Vec<Rational> {
    let k = g.degree().unwrap_or(0);
    // a_j = coefficient of x^{k-j}
    let a = |j: usize| g.coeff(k - j);
    let mut s: Vec<Rational> = vec![rat(k as i64)];
    for n in 1..k.min(len) {
        let mut v = -(rat(n as i64) * a(n));
        for j in 1..n {
            v -= a(j) * &s[n - j];
        }
        s.push(v);
    }
    if s.len() >= len {
        s.truncate(len);
        return s;
    }
    unroll(g, &s, len)
}

/// Monic irreducible factors over the rationals of a square-free
/// polynomial with nonzero constant term.
pub fn irreducible_factors(f: &UPoly) -> Result<Vec<UPoly>, CFiniteError> {
    let (roots, residual) = f.rational_roots();
    let mut out: Vec<UPoly> = roots.iter().map(|(r, _)| UPoly::linear(r)).collect();
    if residual.degree().unwrap_or(0) > 0 {
        out.extend(split_without_rational_roots(&residual.monic())?);
    }
    Ok(out)
}

const FACTOR_SEARCH_LIMIT: u64 = 20_000_000;

/// Splits a monic polynomial with no rational roots into irreducible
/// factors by searching monic integer divisors of its monic integer
/// transform under Mignotte coefficient bounds.
fn split_without_rational_roots(g: &UPoly) -> Result<Vec<UPoly>, CFiniteError> {
    let d = g.degree().unwrap_or(0);
    if d <= 3 {
        return Ok(vec![g.clone()]);
    }
    // Primitive integer form a_d x^d + ... + a_0, then the monic transform
    // H(y) = a_d^{d-1} h(y / a_d).
    let ints = g.primitive_integer();
    let lead = ints[d].clone();
    let h: Vec<BigInt> = (0..=d)
        .map(|i| &ints[i] * lead.pow((d - 1 - i.min(d - 1)) as u32))
        .collect();
    let h = {
        let mut h = h;
        h[d] = BigInt::one();
        h
    };
    let factors = split_monic_integer(&h)?;
    let lead_q = Rational::from_integer(lead);
    Ok(factors
        .into_iter()
        .map(|fy| {
            // fy(a_d x), made monic
            let coeffs: Vec<Rational> = fy
                .iter()
                .enumerate()
                .map(|(i, c)| Rational::from_integer(c.clone()) * lead_q.pow(i as i32))
                .collect();
            UPoly::new(coeffs).monic()
        })
        .collect())
}

fn to_upoly(c: &[BigInt]) -> UPoly {
    UPoly::new(c.iter().map(|v| Rational::from_integer(v.clone())).collect())
}

fn split_monic_integer(h: &[BigInt]) -> Result<Vec<Vec<BigInt>>, CFiniteError> {
    let d = h.len() - 1;
    if d <= 3 {
        return Ok(vec![h.to_vec()]);
    }
    let norm2: BigInt = h.iter().map(|c| c * c).sum();
    let norm = isqrt(&norm2) + 1;
    let hp = to_upoly(h);
    let h0 = h[0].clone();
    let h_at_1: BigInt = h.iter().sum();
    let h_at_m1: BigInt = h
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
        .sum();
    let mut budget = FACTOR_SEARCH_LIMIT;
    for k in 2..=d / 2 {
        let bounds: Vec<BigInt> = (0..k).map(|j| binomial(k as u64, j as u64) * &norm).collect();
        let consts: Vec<BigInt> = crate::exactnum::divisors(&h0)
            .into_iter()
            .filter(|c| c <= &bounds[0])
            .flat_map(|c| [c.clone(), -c])
            .collect();
        let mut cand = vec![BigInt::zero(); k + 1];
        cand[k] = BigInt::one();
        let found = search_divisor(
            &mut cand,
            1,
            &bounds,
            &consts,
            &hp,
            &h_at_1,
            &h_at_m1,
            &mut budget,
        )?;
        if let Some(f) = found {
            let (q, _) = hp.div_rem(&to_upoly(&f));
            let q: Vec<BigInt> = q.coeffs().iter().map(|c| c.to_integer()).collect();
            let mut out = split_monic_integer(&f)?;
            out.extend(split_monic_integer(&q)?);
            return Ok(out);
        }
    }
    Ok(vec![h.to_vec()])
}

#[allow(clippy::too_many_arguments)]
fn search_divisor(
    cand: &mut Vec<BigInt>,
    pos: usize,
    bounds: &[BigInt],
    consts: &[BigInt],
    h: &UPoly,
    h_at_1: &BigInt,
    h_at_m1: &BigInt,
    budget: &mut u64,
) -> Result<Option<Vec<BigInt>>, CFiniteError> {
    let k = cand.len() - 1;
    if pos == k {
        for c0 in consts {
            if *budget == 0 {
                return Err(CFiniteError::FactorizationLimit(FACTOR_SEARCH_LIMIT));
            }
            *budget -= 1;
            cand[0] = c0.clone();
            let at1: BigInt = cand.iter().sum();
            if at1.is_zero() || !(h_at_1 % &at1).is_zero() {
                continue;
            }
            let atm1: BigInt = cand
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { -c })
                .sum();
            if atm1.is_zero() || !(h_at_m1 % &atm1).is_zero() {
                continue;
            }
            let (_, r) = h.div_rem(&to_upoly(cand));
            if r.is_zero() {
                return Ok(Some(cand.clone()));
            }
        }
        return Ok(None);
    }
    let b = bounds[pos].to_i64().unwrap_or(i64::MAX / 4);
    for v in -b..=b {
        cand[pos] = BigInt::from(v);
        if let Some(f) = search_divisor(cand, pos + 1, bounds, consts, h, h_at_1, h_at_m1, budget)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Dense `r x r` matrix over residues modulo `m`.
#[derive(Debug, Clone)]
struct Matrix {
    n: usize,
    m: u64,
    data: Vec<Residue>,
}

impl Matrix {
    fn identity(n: usize, m: u64) -> Self {
        let mut data = vec![Residue::zero(m); n * n];
        for i in 0..n {
            data[i * n + i] = Residue::one(m);
        }
        Matrix { n, m, data }
    }

    fn companion(coeffs: &[Residue], m: u64) -> Self {
        let n = coeffs.len();
        let mut data = vec![Residue::zero(m); n * n];
        for i in 0..n.saturating_sub(1) {
            data[i * n + i + 1] = Residue::one(m);
        }
        for (j, c) in coeffs.iter().enumerate() {
            data[(n - 1) * n + j] = *c;
        }
        Matrix { n, m, data }
    }

    fn get(&self, i: usize, j: usize) -> Residue {
        self.data[i * self.n + j]
    }

    fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut data = vec![Residue::zero(self.m); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] = data[i * n + j] + a * other.data[k * n + j];
                }
            }
        }
        Matrix { n, m: self.m, data }
    }

    fn pow(&self, exp: &BigUint) -> Matrix {
        let mut acc = Matrix::identity(self.n, self.m);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul(&acc);
            if exp.bit(i) {
                acc = acc.mul(self);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::ratio;

    fn fib() -> CFiniteSeq {
        CFiniteSeq::from_ints(&[1, 1], &[0, 1]).unwrap()
    }

    fn lucas() -> CFiniteSeq {
        CFiniteSeq::from_ints(&[1, 1], &[2, 1]).unwrap()
    }

    fn five_then_powers_of_two() -> CFiniteSeq {
        CFiniteSeq::new(vec![rat(2)], 1, vec![rat(5), rat(2)]).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            CFiniteSeq::new(vec![], 0, vec![]),
            Err(CFiniteError::EmptyRecurrence)
        );
        assert_eq!(
            CFiniteSeq::new(vec![rat(1)], 2, vec![rat(1)]),
            Err(CFiniteError::InitialLength {
                expected: 3,
                got: 1
            })
        );
    }

    #[test]
    fn eval_terms_examples() {
        assert_eq!(fib().eval_terms(6), ints(&[0, 1, 1, 2, 3, 5, 8]));
        assert_eq!(lucas().eval_terms(4), ints(&[2, 1, 3, 4, 7]));
        let one = CFiniteSeq::from_ints(&[1], &[1]).unwrap();
        assert_eq!(one.eval_terms(3), ints(&[1, 1, 1, 1]));
        assert_eq!(fib().eval_terms(0), ints(&[0]));
    }

    #[test]
    fn eval_mod_examples() {
        assert_eq!(fib().eval_mod(&BigUint::from(7u32), 7).unwrap().value(), 6);
        assert_eq!(lucas().eval_mod(&BigUint::from(5u32), 5).unwrap().value(), 1);
        assert_eq!(lucas().eval_mod(&BigUint::from(0u32), 5).unwrap().value(), 2);
        let half = CFiniteSeq::new(vec![ratio(1, 2)], 0, vec![rat(1)]).unwrap();
        assert!(matches!(
            half.eval_mod(&BigUint::from(3u32), 4),
            Err(CFiniteError::Num(NumError::NonInvertibleDenominator { .. }))
        ));
        assert_eq!(half.eval_mod(&BigUint::from(3u32), 7).unwrap(), rational_mod(&ratio(1, 8), 7).unwrap());
    }

    #[test]
    fn minimal_annihilator_examples() {
        assert_eq!(fib().minimal_annihilator(), UPoly::from_ints(&[-1, -1, 1]));
        assert_eq!(
            five_then_powers_of_two().minimal_annihilator(),
            UPoly::from_ints(&[0, -2, 1])
        );
        let one = CFiniteSeq::from_ints(&[1], &[1]).unwrap();
        assert_eq!(one.minimal_annihilator(), UPoly::from_ints(&[-1, 1]));
        // non-minimal input: 2^n given by x^2 - 3x + 2
        let g = CFiniteSeq::from_ints(&[-2, 3], &[1, 2]).unwrap();
        assert_eq!(g.minimal_annihilator(), UPoly::from_ints(&[-2, 1]));
        let zero = CFiniteSeq::from_ints(&[1, 1], &[0, 0]).unwrap();
        assert_eq!(zero.minimal_annihilator(), UPoly::one());
        assert!(zero.is_zero_sequence());
    }

    #[test]
    fn characteristic_root_examples() {
        let r = CFiniteSeq::from_ints(&[-2, 3], &[2, 3]).unwrap().characteristic_roots();
        assert_eq!(r.rational_roots, vec![(rat(1), 1), (rat(2), 1)]);
        assert_eq!((r.zero_multiplicity, r.residual_degree), (0, 0));
        let r = fib().characteristic_roots();
        assert!(r.rational_roots.is_empty());
        assert_eq!((r.zero_multiplicity, r.residual_degree), (0, 2));
        let r = CFiniteSeq::from_ints(&[-9, 6], &[0, 3]).unwrap().characteristic_roots();
        assert_eq!(r.rational_roots, vec![(rat(3), 2)]);
        assert_eq!((r.zero_multiplicity, r.residual_degree), (0, 0));
        let r = five_then_powers_of_two().characteristic_roots();
        assert_eq!(r.rational_roots, vec![(rat(2), 1)]);
        assert_eq!(r.zero_multiplicity, 1);
    }

    #[test]
    fn trace_sequence_examples() {
        let t = lucas().is_trace_sequence().unwrap().unwrap();
        assert_eq!(t.constant, rat(0));
        assert_eq!(t.parts.len(), 1);
        assert_eq!(t.parts[0].alpha, rat(1));
        assert_eq!(t.parts[0].u, UPoly::from_ints(&[1, -1, -1]));
        assert_eq!(fib().is_trace_sequence().unwrap(), None);
        let two = CFiniteSeq::from_ints(&[2], &[1]).unwrap();
        let t = two.is_trace_sequence().unwrap().unwrap();
        assert_eq!(t.parts, vec![TracePart { alpha: rat(1), u: UPoly::from_ints(&[1, -2]) }]);
        // repeated root is never a trace sequence
        let n3n = CFiniteSeq::from_ints(&[-9, 6], &[0, 3]).unwrap();
        assert_eq!(n3n.is_trace_sequence().unwrap(), None);
        // 5, 2, 4, 8, ... = 4 [n=0] + 2^n
        let t = five_then_powers_of_two().is_trace_sequence().unwrap().unwrap();
        assert_eq!(t.constant, rat(4));
    }

    #[test]
    fn trace_sequence_with_quartic_split() {
        // Tr over roots of (x^2 - x - 1)(x^2 - 2) with weights 1 and 3:
        // annihilator degree 4 with no rational root, factored by search.
        let ann = UPoly::from_ints(&[-1, -1, 1]).mul(&UPoly::from_ints(&[-2, 0, 1]));
        let a = power_sums(&UPoly::from_ints(&[-1, -1, 1]), 4);
        let b = power_sums(&UPoly::from_ints(&[-2, 0, 1]), 4);
        let init: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| x + rat(3) * y).collect();
        let seq = CFiniteSeq::from_annihilator(&ann, &init).unwrap();
        let t = seq.is_trace_sequence().unwrap().unwrap();
        assert_eq!(t.parts.len(), 2);
        let mut alphas: Vec<Rational> = t.parts.iter().map(|p| p.alpha.clone()).collect();
        alphas.sort();
        assert_eq!(alphas, vec![rat(1), rat(3)]);
        // Fibonacci-style weights on the same space break the trace property.
        let mut init2 = init.clone();
        init2[1] += rat(1);
        let seq2 = CFiniteSeq::from_annihilator(&ann, &init2).unwrap();
        assert_eq!(seq2.is_trace_sequence().unwrap(), None);
    }

    #[test]
    fn irreducible_quartic_stays_whole() {
        let f = UPoly::from_ints(&[-2, 0, 0, 0, 1]); // x^4 - 2
        assert_eq!(irreducible_factors(&f).unwrap(), vec![f.clone()]);
        let g = UPoly::from_ints(&[1, 0, 0, 0, 1]); // x^4 + 1, irreducible over Q
        assert_eq!(irreducible_factors(&g).unwrap(), vec![g.clone()]);
        // 4x^4 - 4x^2 - 3 ... monic: x^4 - x^2 - 3/4 = (x^2 - 3/2)(x^2 + 1/2)
        let h = UPoly::new(vec![ratio(-3, 4), rat(0), rat(-1), rat(0), rat(1)]);
        let mut fs = irreducible_factors(&h).unwrap();
        fs.sort_by_key(|f| f.to_string());
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0].mul(&fs[1]), h);
    }

    #[test]
    fn separable_part_examples() {
        // (n + 1) 2^n: x^2 - 4x + 4, init 1, 4
        let a = CFiniteSeq::from_ints(&[-4, 4], &[1, 4]).unwrap();
        let s = a.separable_part().unwrap();
        let mut pow2 = vec![];
        for n in 0..10 {
            pow2.push(rat(1i64 << n));
        }
        assert_eq!(s.eval_terms(9), pow2);
        let l = lucas().separable_part().unwrap();
        assert_eq!(l.eval_terms(12), lucas().eval_terms(12));
        let f = CFiniteSeq::finite_support(&ints(&[7, 0, 5]));
        let s = f.separable_part().unwrap();
        assert_eq!(s.eval_terms(5), ints(&[7, 0, 0, 0, 0, 0]));
    }

    #[test]
    fn generating_function_examples() {
        let (n, d) = fib().generating_function();
        assert_eq!((n, d), (UPoly::from_ints(&[0, 1]), UPoly::from_ints(&[1, -1, -1])));
        let one = CFiniteSeq::from_ints(&[1], &[1]).unwrap();
        assert_eq!(one.generating_function(), (UPoly::from_ints(&[1]), UPoly::from_ints(&[1, -1])));
        let (n, d) = five_then_powers_of_two().generating_function();
        assert_eq!((n, d), (UPoly::from_ints(&[5, -8]), UPoly::from_ints(&[1, -2])));
    }
}
