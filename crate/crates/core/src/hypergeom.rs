//! Hypergeometric sequences `alpha(n) A(n+1) = beta(n) A(n)`.
//!
//! Includes the family `A_m(n) = (1/m)_n (1 - 1/m)_n / n!^2`, whose
//! congruence `m^{2p} A_m(p) = a(m - a) (mod p)` with `a p = 1 (mod m)`
//! separates the four constant-term members `m = 2, 3, 4, 6` from the rest,
//! and a sequence built from ninths whose residues at `p = +-1 (mod 9)` are
//! `20` and `80`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::congruence::{EvalError, SeqEvaluator};
use crate::ctkit::{binomial_product_to_ct, CTWitness};
use crate::exactnum::{factorize, rat, rational_mod, valuation, Rational, Residue};
use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergeomError {
    #[error("alpha({0}) = 0, so A({n}) is undefined", n = .0 + 1)]
    AlphaVanishes(u64),
    #[error("A({n}) is not {p}-integral")]
    NotPAdicIntegral { n: u64, p: u64 },
    #[error("{a} and {b} are not coprime")]
    NotCoprime { a: u64, b: u64 },
    #[error("p = {0} is not congruent to 1 or -1 mod 9")]
    WrongResidueClass(u64),
    #[error("m = {0} is not one of 2, 3, 4, 6")]
    NotInFamily(u64),
    #[error("the polynomial alpha must be nonzero")]
    ZeroAlpha,
    #[error("m must be at least 2")]
    InvalidParameter,
}

/// Integer polynomial in `n`, ascending coefficients, trimmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly(Vec<BigInt>);

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly(coeffs)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `a n + b`
    pub fn linear(a: i64, b: i64) -> Self {
        IntPoly::from_ints(&[b, a])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, n: u64) -> BigInt {
        let n = BigInt::from(n);
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * &n + c)
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        IntPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    pub fn product(factors: &[IntPoly]) -> IntPoly {
        factors
            .iter()
            .fold(IntPoly::from_ints(&[1]), |acc, f| acc.mul(f))
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let abs = c.abs();
            if i == 0 || !abs.is_one() {
                write!(f, "{abs}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "n")?,
                _ => write!(f, "n^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypergeomSeq {
    alpha: IntPoly,
    beta: IntPoly,
    a0: Rational,
}

impl HypergeomSeq {
    pub fn new(alpha: IntPoly, beta: IntPoly, a0: Rational) -> Result<Self, HypergeomError> {
        if alpha.is_zero() {
            return Err(HypergeomError::ZeroAlpha);
        }
        Ok(HypergeomSeq { alpha, beta, a0 })
    }

    pub fn alpha(&self) -> &IntPoly {
        &self.alpha
    }

    pub fn beta(&self) -> &IntPoly {
        &self.beta
    }

    pub fn a0(&self) -> &Rational {
        &self.a0
    }

    /// The sequence `s^n A(n)`.
    pub fn scaled(&self, s: &Rational) -> HypergeomSeq {
        HypergeomSeq {
            alpha: self.alpha.scale(s.denom()),
            beta: self.beta.scale(s.numer()),
            a0: self.a0.clone(),
        }
    }

    /// `A(0..=n_max)` exactly.
    pub fn eval(&self, n_max: u64) -> Result<Vec<Rational>, HypergeomError> {
        let mut out = Vec::with_capacity(n_max as usize + 1);
        let mut current = self.a0.clone();
        out.push(current.clone());
        for j in 0..n_max {
            let a = self.alpha.eval(j);
            if a.is_zero() {
                return Err(HypergeomError::AlphaVanishes(j));
            }
            current *= Rational::new(self.beta.eval(j), a);
            out.push(current.clone());
        }
        Ok(out)
    }

    pub fn alpha_divisible(&self, j: u64, p: u64) -> bool {
        (self.alpha.eval(j) % BigInt::from(p)).is_zero()
    }

    /// `A(n) mod p^r`, tracking the `p`-adic valuation of the running
    /// product so that cancelling factors of `p` are handled exactly.
    pub fn term_mod_prime_power(&self, n: u64, p: u64, r: u32) -> Result<Residue, HypergeomError> {
        let m = p.pow(r);
        if self.a0.is_zero() {
            return Ok(Residue::zero(m));
        }
        let split = |x: &BigInt| -> (i64, Residue) {
            let v = valuation(x, p);
            let unit = x / BigInt::from(p).pow(v);
            (v as i64, Residue::from_bigint(&unit, m))
        };
        let (vn, un) = split(self.a0.numer());
        let (vd, ud) = split(self.a0.denom());
        let mut v = vn - vd;
        let mut unit = un * ud.inverse().expect("unit part is invertible");
        for j in 0..n {
            let b = self.beta.eval(j);
            if b.is_zero() {
                return Ok(Residue::zero(m));
            }
            let a = self.alpha.eval(j);
            if a.is_zero() {
                return Err(HypergeomError::AlphaVanishes(j));
            }
            let (vb, ub) = split(&b);
            let (va, ua) = split(&a);
            v += vb - va;
            unit = unit * ub * ua.inverse().expect("unit part is invertible");
        }
        if v < 0 {
            return Err(HypergeomError::NotPAdicIntegral { n, p });
        }
        if v >= r as i64 {
            return Ok(Residue::zero(m));
        }
        Ok(unit * Residue::new(p.pow(v as u32), m))
    }

    pub fn term_mod_p(&self, n: u64, p: u64) -> Result<Residue, HypergeomError> {
        self.term_mod_prime_power(n, p, 1)
    }
}

impl fmt::Display for HypergeomSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alpha: {}; beta: {}; a0: {}", self.alpha, self.beta, self.a0)
    }
}

impl SeqEvaluator for HypergeomSeq {
    fn describe(&self) -> String {
        self.to_string()
    }

    fn exact(&self, n: u64) -> Result<Rational, EvalError> {
        self.eval(n)
            .map(|mut v| v.swap_remove(n as usize))
            .map_err(|e| EvalError::Failed(e.to_string()))
    }

    fn term_mod(&self, n: u64, p: u64, r: u32) -> Result<Residue, EvalError> {
        self.term_mod_prime_power(n, p, r).map_err(|e| match e {
            HypergeomError::NotPAdicIntegral { n, p } => EvalError::NotPAdicIntegral { n, p },
            other => EvalError::Failed(other.to_string()),
        })
    }

    fn admissible(&self, p: u64) -> Result<(), String> {
        if crate::exactnum::denominator_divisible_by(&self.a0, p) {
            Err(format!("{p} divides the denominator of A(0)"))
        } else {
            Ok(())
        }
    }
}

/// `(x)_n = x (x + 1) ... (x + n - 1)`
pub fn rising_factorial(x: &Rational, n: u64) -> Rational {
    (0..n).fold(rat(1), |acc, i| acc * (x + rat(i as i64)))
}

/// `A_m(n) = (1/m)_n (1 - 1/m)_n / n!^2`:
/// `alpha = m^2 (n + 1)^2`, `beta = (m n + 1)(m n + m - 1)`.
pub fn family_am(m: u64) -> Result<HypergeomSeq, HypergeomError> {
    if m < 2 {
        return Err(HypergeomError::InvalidParameter);
    }
    let m = m as i64;
    let alpha = IntPoly::product(&[IntPoly::linear(m, m), IntPoly::linear(m, m)]);
    let beta = IntPoly::product(&[IntPoly::linear(m, 1), IntPoly::linear(m, m - 1)]);
    HypergeomSeq::new(alpha, beta, rat(1))
}

/// `B(n) = 5^{3n} A_5(n)`: `1, 20, 1350, 115500, ...`
pub fn b_sequence() -> HypergeomSeq {
    family_am(5).unwrap().scaled(&rat(125))
}

/// `A(n) = (1/9)_n (4/9)_n (5/9)_n / (n!^2 (1/3)_n)`.
pub fn christol_sequence() -> HypergeomSeq {
    let alpha = IntPoly::product(&[
        IntPoly::from_ints(&[243]),
        IntPoly::linear(1, 1),
        IntPoly::linear(1, 1),
        IntPoly::linear(3, 1),
    ]);
    let beta = IntPoly::product(&[IntPoly::linear(9, 1), IntPoly::linear(9, 4), IntPoly::linear(9, 5)]);
    HypergeomSeq::new(alpha, beta, rat(1)).unwrap()
}

/// `3^{5n} A(n)` for the sequence of [`christol_sequence`].
pub fn christol_scaled() -> HypergeomSeq {
    christol_sequence().scaled(&rat(243))
}

/// `binom(8n, 4n) binom(4n, n) / binom(2n, n)`.
pub fn binomial_quotient_example() -> HypergeomSeq {
    let mut alpha: Vec<IntPoly> = (1..=4).map(|i| IntPoly::linear(4, i)).collect();
    alpha.extend((1..=3).map(|i| IntPoly::linear(3, i)));
    alpha.extend((1..=2).map(|i| IntPoly::linear(2, i)));
    let mut beta: Vec<IntPoly> = (1..=8).map(|i| IntPoly::linear(8, i)).collect();
    beta.push(IntPoly::linear(1, 1));
    HypergeomSeq::new(IntPoly::product(&alpha), IntPoly::product(&beta), rat(1)).unwrap()
}

/// The unique `a` in `1..m` with `a p = r (mod m)`.
pub fn residue_a(m: u64, p: u64, r: u64) -> Result<u64, HypergeomError> {
    if m.gcd(&p) != 1 {
        return Err(HypergeomError::NotCoprime { a: m, b: p });
    }
    if r.gcd(&m) != 1 {
        return Err(HypergeomError::NotCoprime { a: r, b: m });
    }
    let inv = Residue::new(p, m).inverse().expect("coprime");
    Ok((inv * Residue::new(r, m)).value())
}

/// `a (m - a) mod p` with `a p = 1 (mod m)`: the value of `m^{2p} A_m(p) mod p`.
pub fn predicted_am_residue(m: u64, p: u64) -> Result<Residue, HypergeomError> {
    let a = residue_a(m, p, 1)?;
    Ok(Residue::new(a * (m - a), p))
}

/// Euler's totient.
pub fn phi(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .fold(m, |acc, (q, _)| acc / q * (q - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Exact,
    Modular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChristolCheck {
    pub p: u64,
    pub actual: Residue,
    pub expected: Residue,
}

impl ChristolCheck {
    pub fn matches(&self) -> bool {
        self.actual == self.expected
    }
}

/// `3^{5p} A(p) mod p`, expected to be `20` for `p = 1 (mod 9)` and `80`
/// for `p = -1 (mod 9)`.
pub fn christol_check(p: u64, mode: EvalMode) -> Result<ChristolCheck, HypergeomError> {
    let expected = match p % 9 {
        1 => 20,
        8 => 80,
        _ => return Err(HypergeomError::WrongResidueClass(p)),
    };
    if p <= 9 {
        return Err(HypergeomError::WrongResidueClass(p));
    }
    let seq = christol_scaled();
    let actual = match mode {
        EvalMode::Exact => {
            let v = seq.eval(p)?.swap_remove(p as usize);
            rational_mod(&v, p).map_err(|_| HypergeomError::NotPAdicIntegral { n: p, p })?
        }
        EvalMode::Modular => seq.term_mod_p(p, p)?,
    };
    Ok(ChristolCheck {
        p,
        actual,
        expected: Residue::new(expected, p),
    })
}

/// Binomial factors and scale with `A_m(n) = scale^n prod binom(a n, b n)`.
pub fn am_binomial_data(m: u64) -> Result<(Vec<(u64, u64)>, Rational), HypergeomError> {
    let r = |n, d| Rational::new(BigInt::from(n), BigInt::from(d));
    match m {
        2 => Ok((vec![(2, 1), (2, 1)], r(1, 16))),
        3 => Ok((vec![(3, 2), (2, 1)], r(1, 27))),
        4 => Ok((vec![(4, 2), (2, 1)], r(1, 64))),
        6 => Ok((vec![(6, 3), (3, 1)], r(1, 432))),
        _ => Err(HypergeomError::NotInFamily(m)),
    }
}

/// Single-term witness `A_m(n) = ct[P^n]` for `m` in `{2, 3, 4, 6}`.
pub fn witness_am(m: u64) -> Result<CTWitness, HypergeomError> {
    let (factors, scale) = am_binomial_data(m)?;
    let p = binomial_product_to_ct(&factors, &scale).expect("valid factors");
    let q = LaurentPoly::constant(p.var_count(), rat(1));
    Ok(CTWitness::single(p, q))
}

/// Distinct values of `a (m - a)` over units `a` mod `m`.
pub fn distinct_am_values(m: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..m)
        .filter(|a| a.gcd(&m) == 1)
        .map(|a| a * (m - a))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Exact `m^{2p} A_m(p) mod p`.
pub fn am_residue_exact(m: u64, p: u64) -> Result<Residue, HypergeomError> {
    let seq = family_am(m)?.scaled(&rat((m * m) as i64));
    let v = seq.eval(p)?.swap_remove(p as usize);
    rational_mod(&v, p).map_err(|_| HypergeomError::NotPAdicIntegral { n: p, p })
}
