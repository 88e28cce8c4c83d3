//! Exact integers, rationals and residues modulo prime powers.
//!
//! `Rational` is the universal coefficient domain. It is always kept in
//! canonical form (positive denominator, reduced), so equality is structural.
//! `Residue` carries its modulus; mixing moduli is a programming error and
//! panics.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational number in canonical form.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("denominator {denominator} is not invertible modulo {modulus}")]
    NonInvertibleDenominator { denominator: BigInt, modulus: u64 },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("cannot parse rational from {0:?}")]
    BadRational(String),
}

/// Builds the rational `n/1`.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Builds the rational `n/d`. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `a/b` or `a` with an optional leading sign, surrounding
/// whitespace ignored.
pub fn parse_rational(text: &str) -> Result<Rational, NumError> {
    let t = text.trim();
    let bad = || NumError::BadRational(text.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// True when the rational is an integer.
pub fn is_integral(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Residue class `value mod modulus`, `0 <= value < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        Residue {
            value: value % modulus,
            modulus,
        }
    }

    pub fn from_i64(value: i64, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        let m = modulus as i128;
        Residue {
            value: (value as i128).rem_euclid(m) as u64,
            modulus,
        }
    }

    pub fn from_bigint(value: &BigInt, modulus: u64) -> Self {
        assert!(modulus > 0, "residue modulus must be positive");
        let m = BigInt::from(modulus);
        let v = value.mod_floor(&m);
        Residue {
            value: v.to_u64().expect("reduced value fits in u64"),
            modulus,
        }
    }

    pub fn zero(modulus: u64) -> Self {
        Residue::new(0, modulus)
    }

    pub fn one(modulus: u64) -> Self {
        Residue::new(1, modulus)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Representative in `(-m/2, m/2]`.
    pub fn symmetric(&self) -> i128 {
        let v = self.value as i128;
        let m = self.modulus as i128;
        if 2 * v > m {
            v - m
        } else {
            v
        }
    }

    fn check(&self, other: &Residue) {
        assert_eq!(
            self.modulus, other.modulus,
            "residue arithmetic across different moduli"
        );
    }

    pub fn pow(&self, mut exp: u64) -> Residue {
        let mut base = *self;
        let mut acc = Residue::one(self.modulus);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, exp: &BigUint) -> Residue {
        let mut acc = Residue::one(self.modulus);
        for i in (0..exp.bits()).rev() {
            acc = acc * acc;
            if exp.bit(i) {
                acc = acc * *self;
            }
        }
        acc
    }

    /// Multiplicative inverse, if `gcd(value, modulus) = 1`.
    pub fn inverse(&self) -> Option<Residue> {
        let (g, x, _) = ext_gcd(self.value as i128, self.modulus as i128);
        if g != 1 {
            return None;
        }
        Some(Residue {
            value: x.rem_euclid(self.modulus as i128) as u64,
            modulus: self.modulus,
        })
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        let v = (self.value as u128 + rhs.value as u128) % self.modulus as u128;
        Residue {
            value: v as u64,
            modulus: self.modulus,
        }
    }
}

impl Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        self + (-rhs)
    }
}

impl Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }
}

impl Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        self.check(&rhs);
        let v = (self.value as u128 * rhs.value as u128) % self.modulus as u128;
        Residue {
            value: v as u64,
            modulus: self.modulus,
        }
    }
}

/// Extended Euclid on signed 128-bit integers: `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Reduces `q` modulo `m`: `numerator * denominator^{-1} mod m`.
pub fn rational_mod(q: &Rational, m: u64) -> Result<Residue, NumError> {
    if m == 0 {
        return Err(NumError::ZeroModulus);
    }
    let den = Residue::from_bigint(q.denom(), m);
    let inv = den
        .inverse()
        .ok_or_else(|| NumError::NonInvertibleDenominator {
            denominator: q.denom().clone(),
            modulus: m,
        })?;
    Ok(Residue::from_bigint(q.numer(), m) * inv)
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// True when `p` divides the denominator of `q`.
pub fn denominator_divisible_by(q: &Rational, p: u64) -> bool {
    (q.denom() % BigInt::from(p)).is_zero()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality test for all 64-bit inputs (Miller-Rabin with
/// the first twelve prime bases).
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes in `[lo, hi]`, ascending.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    if hi <= 1 << 24 {
        let n = hi as usize;
        let mut composite = vec![false; n + 1];
        let mut i = 2;
        while i * i <= n {
            if !composite[i] {
                let mut j = i * i;
                while j <= n {
                    composite[j] = true;
                    j += i;
                }
            }
            i += 1;
        }
        (lo as usize..=n)
            .filter(|&k| !composite[k])
            .map(|k| k as u64)
            .collect()
    } else {
        (lo..=hi).filter(|&k| is_prime(k)).collect()
    }
}

/// Prime factorization by trial division, ascending primes with exponents.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Positive divisors of `|n|` (n nonzero), ascending. Panics if `|n|`
/// does not fit in 64 bits.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n
        .abs()
        .to_u64()
        .expect("divisor enumeration limited to 64-bit integers");
    assert!(n > 0, "divisors of zero");
    let mut divs = vec![1u64];
    for (p, e) in factorize(n) {
        let current = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(current.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs.into_iter().map(BigInt::from).collect()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
