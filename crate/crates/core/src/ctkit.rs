//! Representability decisions, witness construction and certification.
//!
//! A C-finite sequence is a single constant term `ct[P^n Q]` exactly when it
//! has one characteristic root and that root is rational (with `0` counted
//! as a root). It is an `r`-term rational combination of constant terms
//! exactly when it has at most `r` distinct characteristic roots, all
//! rational. Witnesses use `ct[(x + l)^n (l/x)^r] = binom(n, r) l^n` for the
//! polynomial-times-geometric parts and `ct[x^n x^-j] = [n = j]` for the
//! finite-support part.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfinite::CFiniteSeq;
use crate::congruence::{gauss_check, ConstantTermSeq, CongruenceReport, SweepConfig};
use crate::exactnum::{is_integral, rat, Rational};
use crate::laurent::{ct_sequence, LaurentError, LaurentPoly};
use crate::linalg::solve;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtError {
    #[error("sequence is not a rational combination of constant terms")]
    NotRepresentable,
    #[error("invalid binomial factor ({a}, {b}): need 0 < a and b <= a")]
    InvalidFactor { a: u64, b: u64 },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// One summand `weight * ct[P^n Q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTerm {
    pub weight: Rational,
    pub p: LaurentPoly,
    pub q: LaurentPoly,
}

/// `A(n) = sum_i weight_i * ct[P_i^n Q_i]`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CTWitness {
    pub terms: Vec<WitnessTerm>,
}

impl CTWitness {
    pub fn single(p: LaurentPoly, q: LaurentPoly) -> Self {
        CTWitness {
            terms: vec![WitnessTerm {
                weight: Rational::one(),
                p,
                q,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact values of the represented sequence at `n = 0..=n_max`.
    pub fn evaluate(&self, n_max: usize) -> Result<Vec<Rational>, LaurentError> {
        let mut out = vec![Rational::zero(); n_max + 1];
        for t in &self.terms {
            let vals = ct_sequence(&t.p, &t.q, n_max)?;
            for (o, v) in out.iter_mut().zip(vals) {
                *o += &t.weight * v;
            }
        }
        Ok(out)
    }

    /// Serializable mirror using the canonical text forms.
    pub fn records(&self) -> Vec<WitnessRecord> {
        self.terms
            .iter()
            .map(|t| WitnessRecord {
                weight: t.weight.to_string(),
                p: t.p.to_string(),
                q: t.q.to_string(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub weight: String,
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "Q")]
    pub q: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag", content = "count")]
pub enum DecisionReason {
    SingleRationalRoot,
    MultipleRationalRoots(usize),
    IrrationalRootsPresent,
    ZeroSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub representable: bool,
    pub min_terms: Option<usize>,
    pub reason: DecisionReason,
}

impl Decision {
    fn yes(min_terms: usize, reason: DecisionReason) -> Self {
        Decision {
            representable: true,
            min_terms: Some(min_terms),
            reason,
        }
    }

    fn no(reason: DecisionReason) -> Self {
        Decision {
            representable: false,
            min_terms: None,
            reason,
        }
    }
}

fn root_reason(count: usize) -> DecisionReason {
    if count == 1 {
        DecisionReason::SingleRationalRoot
    } else {
        DecisionReason::MultipleRationalRoots(count)
    }
}

/// Is the sequence a single constant term `ct[P^n Q]`?
pub fn decide_single_ct(seq: &CFiniteSeq) -> Decision {
    if seq.is_zero_sequence() {
        return Decision::yes(1, DecisionReason::ZeroSequence);
    }
    let roots = seq.characteristic_roots();
    if !roots.all_rational() {
        return Decision::no(DecisionReason::IrrationalRootsPresent);
    }
    match roots.distinct_count() {
        1 => Decision::yes(1, DecisionReason::SingleRationalRoot),
        k => Decision::no(DecisionReason::MultipleRationalRoots(k)),
    }
}

/// Is the sequence a rational combination of constant terms, and of how
/// many at least?
pub fn decide_combination(seq: &CFiniteSeq) -> Decision {
    if seq.is_zero_sequence() {
        return Decision::yes(1, DecisionReason::ZeroSequence);
    }
    let roots = seq.characteristic_roots();
    if !roots.all_rational() {
        return Decision::no(DecisionReason::IrrationalRootsPresent);
    }
    let k = roots.distinct_count();
    Decision::yes(k, root_reason(k))
}

/// Builds a univariate witness with one term per distinct characteristic
/// root.
pub fn build_witness(seq: &CFiniteSeq) -> Result<CTWitness, CtError> {
    if seq.is_zero_sequence() {
        return Ok(CTWitness {
            terms: vec![WitnessTerm {
                weight: Rational::zero(),
                p: LaurentPoly::constant(1, rat(1)),
                q: LaurentPoly::constant(1, rat(1)),
            }],
        });
    }
    let roots = seq.characteristic_roots();
    if !roots.all_rational() {
        return Err(CtError::NotRepresentable);
    }
    let m0 = roots.zero_multiplicity;
    let dim: usize = m0 + roots.rational_roots.iter().map(|(_, m)| m).sum::<usize>();
    let target = seq.eval_terms(dim.saturating_sub(1));
    // Columns: binom(n, r) l^n for each root l and r < mult, then [n = j] for j < m0.
    let rows: Vec<Vec<Rational>> = (0..dim)
        .map(|n| {
            let mut row = Vec::with_capacity(dim);
            for (l, mult) in &roots.rational_roots {
                let ln = l.pow(n as i32);
                for r in 0..*mult {
                    let b = Rational::from_integer(crate::exactnum::binomial(n as u64, r as u64));
                    row.push(b * &ln);
                }
            }
            for j in 0..m0 {
                row.push(if j == n { rat(1) } else { rat(0) });
            }
            row
        })
        .collect();
    let sol = solve(&rows, &target[..dim]).ok_or(CtError::NotRepresentable)?;
    let mut terms = Vec::new();
    let mut idx = 0;
    for (l, mult) in &roots.rational_roots {
        let q_terms: Vec<(i64, Rational)> = (0..*mult)
            .map(|r| (-(r as i64), &sol[idx + r] * l.pow(r as i32)))
            .collect();
        idx += mult;
        terms.push(WitnessTerm {
            weight: Rational::one(),
            p: LaurentPoly::univariate(&[(1, rat(1)), (0, l.clone())]),
            q: LaurentPoly::univariate(&q_terms),
        });
    }
    if m0 > 0 {
        let q_terms: Vec<(i64, Rational)> =
            (0..m0).map(|j| (-(j as i64), sol[idx + j].clone())).collect();
        terms.push(WitnessTerm {
            weight: Rational::one(),
            p: LaurentPoly::var(1, 0),
            q: LaurentPoly::univariate(&q_terms),
        });
    }
    Ok(CTWitness { terms })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub n: usize,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificationReport {
    /// Number of indices `n = 0..window` compared.
    pub window: usize,
    /// True when window agreement implies agreement for every `n`.
    pub certified: bool,
    pub pass: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// Order bound for `ct[P^n Q]` when `P` is univariate of the form
/// `a x + b` or `a x^-1 + b`, or a constant.
fn term_order_bound(t: &WitnessTerm) -> Option<usize> {
    if t.p.is_zero() || t.q.is_zero() || t.weight.is_zero() {
        return Some(0);
    }
    let (plo, phi) = (0..t.p.var_count())
        .map(|v| t.p.exponent_range(v).unwrap())
        .fold((0, 0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
    if plo == 0 && phi == 0 {
        return Some(1);
    }
    if t.p.var_count() != 1 {
        return None;
    }
    let (qlo, qhi) = t.q.exponent_range(0).unwrap();
    match (plo, phi) {
        (0, 1) => Some(1 + qlo.min(0).unsigned_abs() as usize),
        (-1, 0) => Some(1 + qhi.max(0) as usize),
        _ => None,
    }
}

fn compare(target: &[Rational], actual: &[Rational]) -> Option<Mismatch> {
    target
        .iter()
        .zip(actual)
        .enumerate()
        .find(|(_, (a, b))| a != b)
        .map(|(n, (a, b))| Mismatch {
            n,
            expected: a.to_string(),
            actual: b.to_string(),
        })
}

/// Checks `A(n) = sum w_i ct[P_i^n Q_i]` on a window long enough to
/// certify equality for all `n` when every witness term is C-finite of a
/// known order bound.
pub fn verify_witness(seq: &CFiniteSeq, w: &CTWitness) -> Result<CertificationReport, CtError> {
    let seq_order = seq.minimal_annihilator().degree().unwrap_or(0);
    let bounds: Vec<Option<usize>> = w.terms.iter().map(term_order_bound).collect();
    let certified = bounds.iter().all(Option::is_some);
    let witness_order: usize = w
        .terms
        .iter()
        .zip(&bounds)
        .map(|(t, b)| b.unwrap_or_else(|| 1 + t.q.degree().unwrap_or(0) as usize))
        .sum();
    let window = seq_order + witness_order + 1;
    let target = seq.eval_terms(window - 1);
    let actual = w.evaluate(window - 1)?;
    let first_mismatch = compare(&target, &actual);
    Ok(CertificationReport {
        window,
        certified,
        pass: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Compares a witness against explicitly given terms (no certification).
pub fn verify_witness_terms(
    terms: &[Rational],
    w: &CTWitness,
) -> Result<CertificationReport, CtError> {
    if terms.is_empty() {
        return Ok(CertificationReport {
            window: 0,
            certified: false,
            pass: true,
            first_mismatch: None,
        });
    }
    let actual = w.evaluate(terms.len() - 1)?;
    let first_mismatch = compare(terms, &actual);
    Ok(CertificationReport {
        window: terms.len(),
        certified: false,
        pass: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// `P = scale * prod_i (1 + x_i)^{a_i} / x_i^{b_i}`, so that
/// `ct[P^n] = scale^n prod_i binom(a_i n, b_i n)`.
pub fn binomial_product_to_ct(factors: &[(u64, u64)], scale: &Rational) -> Result<LaurentPoly, CtError> {
    for &(a, b) in factors {
        if a == 0 || b > a {
            return Err(CtError::InvalidFactor { a, b });
        }
    }
    let nvars = factors.len().max(1);
    let mut p = LaurentPoly::constant(nvars, scale.clone());
    for (i, &(a, b)) in factors.iter().enumerate() {
        let one_plus = LaurentPoly::constant(nvars, rat(1)).add(&LaurentPoly::var(nvars, i))?;
        let mut shift = vec![0i64; nvars];
        shift[i] = -(b as i64);
        let factor = one_plus.pow(a).mul(&LaurentPoly::monomial(shift, rat(1)))?;
        p = p.mul(&factor)?;
    }
    Ok(p)
}

/// Empirical status of the three equivalent conditions for
/// `A(n) = ct[P^n Q]`: Gauss congruences for all `r`, the `r = 1`
/// congruences, and `A(n) = A(0) ct[P^n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MintonReport {
    pub identity_holds: bool,
    pub identity_first_failure: Option<usize>,
    pub gauss_r1: CongruenceReport,
    pub gauss_r2: CongruenceReport,
}

impl MintonReport {
    /// True when all three conditions agree, as they must for large primes.
    pub fn consistent(&self) -> bool {
        let r1 = self.gauss_r1.verdict.is_pass();
        let r2 = self.gauss_r2.verdict.is_pass();
        self.identity_holds == r1 && r1 == r2
    }
}

pub fn check_minton_analog(
    p: &LaurentPoly,
    q: &LaurentPoly,
    n_max: usize,
    primes: &[u64],
    cfg: &SweepConfig,
) -> Result<MintonReport, CtError> {
    let a = ct_sequence(p, q, n_max)?;
    let one = LaurentPoly::constant(p.var_count(), rat(1));
    let b = ct_sequence(p, &one, n_max)?;
    let identity_first_failure = (0..=n_max).find(|&n| a[n] != &a[0] * &b[n]);
    let eval = ConstantTermSeq::new(p.clone(), q.clone())?;
    let n_max = n_max as u64;
    Ok(MintonReport {
        identity_holds: identity_first_failure.is_none(),
        identity_first_failure,
        gauss_r1: gauss_check(&eval, primes, 1, n_max, cfg),
        gauss_r2: gauss_check(&eval, primes, 2, n_max.min(2), cfg),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum IntegralRootsReport {
    /// Integer terms and rational roots: every root is an integer.
    Consistent { roots: Vec<String> },
    /// An integer sequence with a non-integral rational root.
    Violation { root: String },
    NotApplicable { reason: String },
}

/// Integer terms and all-rational characteristic roots force integral roots.
pub fn integral_roots_check(seq: &CFiniteSeq, window: usize) -> IntegralRootsReport {
    let terms = seq.eval_terms(window);
    if let Some(n) = terms.iter().position(|t| !is_integral(t)) {
        return IntegralRootsReport::NotApplicable {
            reason: format!("A({n}) = {} is not an integer", terms[n]),
        };
    }
    let roots = seq.characteristic_roots();
    if !roots.all_rational() {
        return IntegralRootsReport::NotApplicable {
            reason: "irrational characteristic roots".into(),
        };
    }
    if let Some((l, _)) = roots.rational_roots.iter().find(|(l, _)| !is_integral(l)) {
        return IntegralRootsReport::Violation { root: l.to_string() };
    }
    IntegralRootsReport::Consistent {
        roots: roots.rational_roots.iter().map(|(l, _)| l.to_string()).collect(),
    }
}

/// `prod binom(a_i n, b_i n) * scale^n`, by factorials.
pub fn binomial_product_value(factors: &[(u64, u64)], scale: &Rational, n: u64) -> Rational {
    let mut v = Rational::from_integer(BigInt::one());
    for &(a, b) in factors {
        let top = crate::exactnum::factorial(a * n);
        let bottom = crate::exactnum::factorial(b * n) * crate::exactnum::factorial((a - b) * n);
        v *= Rational::from_integer(top / bottom);
    }
    v * scale.pow(n as i32)
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
    fn two_pow_plus_one() -> CFiniteSeq {
        CFiniteSeq::from_ints(&[-2, 3], &[2, 3]).unwrap()
    }
    fn n_three_pow() -> CFiniteSeq {
        CFiniteSeq::from_ints(&[-9, 6], &[0, 3]).unwrap()
    }
    fn x_plus(l: i64) -> LaurentPoly {
        LaurentPoly::univariate(&[(0, rat(l)), (1, rat(1))])
    }

    #[test]
    fn single_term_decisions() {
        assert_eq!(
            decide_single_ct(&fib()),
            Decision::no(DecisionReason::IrrationalRootsPresent)
        );
        assert_eq!(
            decide_single_ct(&n_three_pow()),
            Decision::yes(1, DecisionReason::SingleRationalRoot)
        );
        let d = decide_single_ct(&two_pow_plus_one());
        assert!(!d.representable);
        assert_eq!(d.reason, DecisionReason::MultipleRationalRoots(2));
        let zero = CFiniteSeq::from_ints(&[1], &[0]).unwrap();
        assert_eq!(decide_single_ct(&zero).reason, DecisionReason::ZeroSequence);
        let finite = CFiniteSeq::finite_support(&[rat(7), rat(0), rat(5)]);
        assert_eq!(
            decide_single_ct(&finite),
            Decision::yes(1, DecisionReason::SingleRationalRoot)
        );
    }

    #[test]
    fn combination_decisions() {
        assert_eq!(
            decide_combination(&two_pow_plus_one()),
            Decision::yes(2, DecisionReason::MultipleRationalRoots(2))
        );
        assert!(!decide_combination(&lucas()).representable);
        let s = CFiniteSeq::new(vec![rat(2)], 1, vec![rat(5), rat(2)]).unwrap();
        assert_eq!(decide_combination(&s).min_terms, Some(2));
    }

    #[test]
    fn witness_examples() {
        let w = build_witness(&n_three_pow()).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.terms[0].p, x_plus(3));
        assert_eq!(w.terms[0].q, LaurentPoly::univariate(&[(-1, rat(3))]));
        let sq = w.terms[0].p.pow(2).mul(&w.terms[0].q).unwrap();
        assert_eq!(sq.constant_term(), rat(18));

        let w = build_witness(&two_pow_plus_one()).unwrap();
        let ps: Vec<LaurentPoly> = w.terms.iter().map(|t| t.p.clone()).collect();
        assert_eq!(ps, vec![x_plus(1), x_plus(2)]);
        assert!(w.terms.iter().all(|t| t.q == LaurentPoly::constant(1, rat(1))));

        let finite = CFiniteSeq::finite_support(&[rat(7), rat(0), rat(5)]);
        let w = build_witness(&finite).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.terms[0].p, LaurentPoly::var(1, 0));
        assert_eq!(
            w.terms[0].q,
            LaurentPoly::univariate(&[(0, rat(7)), (-2, rat(5))])
        );
        assert_eq!(build_witness(&fib()), Err(CtError::NotRepresentable));
    }

    #[test]
    fn verification_examples() {
        let report = verify_witness(&n_three_pow(), &build_witness(&n_three_pow()).unwrap()).unwrap();
        assert!(report.pass && report.certified);
        let wrong = CTWitness::single(x_plus(2), LaurentPoly::constant(1, rat(1)));
        let report = verify_witness(&two_pow_plus_one(), &wrong).unwrap();
        assert!(!report.pass);
        let m = report.first_mismatch.unwrap();
        assert_eq!((m.n, m.expected.as_str(), m.actual.as_str()), (0, "2", "1"));

        let catalan: Vec<Rational> = (0..=20u64)
            .map(|n| {
                Rational::from_integer(
                    crate::exactnum::binomial(2 * n, n) - crate::exactnum::binomial(2 * n, n + 1),
                )
            })
            .collect();
        let p = LaurentPoly::univariate(&[(-1, rat(1)), (0, rat(2)), (1, rat(1))]);
        let q = LaurentPoly::univariate(&[(0, rat(1)), (1, rat(-1))]);
        let report = verify_witness_terms(&catalan, &CTWitness::single(p, q)).unwrap();
        assert!(report.pass && !report.certified);
        assert_eq!(report.window, 21);
    }

    #[test]
    fn binomial_products() {
        let p = binomial_product_to_ct(&[(2, 1)], &rat(1)).unwrap();
        let one = LaurentPoly::constant(1, rat(1));
        assert_eq!(
            ct_sequence(&p, &one, 3).unwrap(),
            vec![rat(1), rat(2), rat(6), rat(20)]
        );
        let p = binomial_product_to_ct(&[(3, 2), (2, 1)], &rat(1)).unwrap();
        assert_eq!(p.var_count(), 2);
        assert_eq!(p.constant_term(), rat(6));
        let p = binomial_product_to_ct(&[], &rat(5)).unwrap();
        let one = LaurentPoly::constant(1, rat(1));
        assert_eq!(ct_sequence(&p, &one, 3).unwrap()[3], rat(125));
        assert_eq!(
            binomial_product_to_ct(&[(1, 2)], &rat(1)),
            Err(CtError::InvalidFactor { a: 1, b: 2 })
        );
    }

    #[test]
    fn minton_analog_examples() {
        let cfg = SweepConfig::default();
        let primes = crate::exactnum::primes_in_range(7, 23);
        // P(x^2) with Q = 1 + x
        let p = LaurentPoly::univariate(&[(-2, rat(1)), (0, rat(1)), (2, rat(1))]);
        let q = LaurentPoly::univariate(&[(0, rat(1)), (1, rat(1))]);
        let r = check_minton_analog(&p, &q, 6, &primes, &cfg).unwrap();
        assert!(r.identity_holds && r.consistent());
        // Catalan kernel: identity fails, so do the congruences
        let p = LaurentPoly::univariate(&[(-1, rat(1)), (0, rat(2)), (1, rat(1))]);
        let q = LaurentPoly::univariate(&[(0, rat(1)), (1, rat(-1))]);
        let r = check_minton_analog(&p, &q, 6, &[3, 7, 11], &SweepConfig { prime_floor: 2 }).unwrap();
        assert!(!r.identity_holds);
        assert_eq!(r.identity_first_failure, Some(1));
        let c = r.gauss_r1.first_failure().unwrap();
        assert_eq!((c.p, c.n, c.lhs, c.rhs), (3, 1, 2, Some(1)));
        // Q = 1
        let one = LaurentPoly::constant(1, rat(1));
        let r = check_minton_analog(&p, &one, 6, &primes, &cfg).unwrap();
        assert!(r.identity_holds && r.consistent());
    }

    #[test]
    fn integral_root_reports() {
        assert!(matches!(
            integral_roots_check(&two_pow_plus_one(), 20),
            IntegralRootsReport::Consistent { .. }
        ));
        let half = CFiniteSeq::new(vec![ratio(1, 2)], 0, vec![rat(1)]).unwrap();
        assert!(matches!(
            integral_roots_check(&half, 20),
            IntegralRootsReport::NotApplicable { .. }
        ));
        assert!(matches!(
            integral_roots_check(&lucas(), 20),
            IntegralRootsReport::NotApplicable { .. }
        ));
    }
}
