//! Prime sweeps for the congruences satisfied by constant-term sequences.
//!
//! For `A(n) = ct[P^n Q]` and primes `p > deg(P^k Q)`:
//!
//! * `A(p^r n + k) = A(k) ct[P^{p^{r-1} n}] (mod p^r)`,
//! * `A(p^s n + k) = A(p^r n + k) (mod p^r)` for `s >= r`,
//! * in particular `A(p + k) = c A(k) (mod p)` with `c = ct[P]`.
//!
//! Every sweep works on an explicit finite grid and records every skipped
//! prime together with the reason it was skipped.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cfinite::CFiniteSeq;
use crate::exactnum::{rational_mod, Rational, Residue};
use crate::hypergeom::HypergeomSeq;
use crate::laurent::{ct_power_mod, LaurentError, LaurentPoly};

/// Environment variable overriding the default prime floor.
pub const PRIME_FLOOR_ENV: &str = "CTSEQ_PRIME_FLOOR";

pub const DEFAULT_HEIGHT_BOUND: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("index {n} is beyond the {len} known terms")]
    OutOfRange { n: u64, len: usize },
    #[error("A({n}) is not {p}-integral")]
    NotPAdicIntegral { n: u64, p: u64 },
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CongruenceError {
    #[error("A(k) vanishes for every k up to {k_max}; no base value to divide by")]
    ZeroBase { k_max: u64 },
    #[error("stability grid needs s >= r >= 1 (got s = {s}, r = {r})")]
    InvalidGrid { s: u32, r: u32 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// A sequence that can be evaluated exactly at small indices and modulo a
/// prime power at large ones.
pub trait SeqEvaluator: Sync {
    fn describe(&self) -> String;

    fn exact(&self, n: u64) -> Result<Rational, EvalError>;

    /// `A(n) mod p^r`.
    fn term_mod(&self, n: u64, p: u64, r: u32) -> Result<Residue, EvalError>;

    /// `Err(reason)` when residues mod `p` are not defined for this sequence.
    fn admissible(&self, p: u64) -> Result<(), String>;
}

impl SeqEvaluator for CFiniteSeq {
    fn describe(&self) -> String {
        format!("C-finite sequence with characteristic polynomial {}", self.char_poly())
    }

    fn exact(&self, n: u64) -> Result<Rational, EvalError> {
        Ok(self.eval_terms(n as usize).swap_remove(n as usize))
    }

    fn term_mod(&self, n: u64, p: u64, r: u32) -> Result<Residue, EvalError> {
        self.eval_mod(&BigUint::from(n), p.pow(r))
            .map_err(|e| EvalError::Failed(e.to_string()))
    }

    fn admissible(&self, p: u64) -> Result<(), String> {
        if self.is_p_integral(p) {
            Ok(())
        } else {
            Err(format!("{p} divides a denominator of the recurrence data"))
        }
    }
}

/// `A(n) = ct[P^n Q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantTermSeq {
    pub p: LaurentPoly,
    pub q: LaurentPoly,
}

impl ConstantTermSeq {
    pub fn new(p: LaurentPoly, q: LaurentPoly) -> Result<Self, LaurentError> {
        if p.var_count() != q.var_count() {
            return Err(LaurentError::VarCountMismatch {
                left: p.var_count(),
                right: q.var_count(),
            });
        }
        Ok(ConstantTermSeq { p, q })
    }
}

impl SeqEvaluator for ConstantTermSeq {
    fn describe(&self) -> String {
        format!("ct[({})^n * ({})]", self.p, self.q)
    }

    fn exact(&self, n: u64) -> Result<Rational, EvalError> {
        let current = self.p.pow(n).mul(&self.q).map_err(|e| EvalError::Failed(e.to_string()))?;
        Ok(current.constant_term())
    }

    fn term_mod(&self, n: u64, p: u64, r: u32) -> Result<Residue, EvalError> {
        let m = p.pow(r);
        let fail = |e: String| EvalError::Failed(e);
        let pm = self.p.reduce_mod(m).map_err(|e| fail(e.to_string()))?;
        let qm = self.q.reduce_mod(m).map_err(|e| fail(e.to_string()))?;
        ct_power_mod(&pm, &qm, n).map_err(|e| fail(e.to_string()))
    }

    fn admissible(&self, p: u64) -> Result<(), String> {
        if self.p.is_p_integral(p) && self.q.is_p_integral(p) {
            Ok(())
        } else {
            Err(format!("{p} divides a coefficient denominator of P or Q"))
        }
    }
}

/// Explicitly listed terms `A(0), ..., A(len - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TermList(pub Vec<Rational>);

impl SeqEvaluator for TermList {
    fn describe(&self) -> String {
        format!("explicit list of {} terms", self.0.len())
    }

    fn exact(&self, n: u64) -> Result<Rational, EvalError> {
        self.0.get(n as usize).cloned().ok_or(EvalError::OutOfRange {
            n,
            len: self.0.len(),
        })
    }

    fn term_mod(&self, n: u64, p: u64, r: u32) -> Result<Residue, EvalError> {
        let v = self.exact(n)?;
        rational_mod(&v, p.pow(r)).map_err(|_| EvalError::NotPAdicIntegral { n, p })
    }

    fn admissible(&self, _p: u64) -> Result<(), String> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Primes `p <= prime_floor` are skipped.
    pub prime_floor: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { prime_floor: 5 }
    }
}

impl SweepConfig {
    /// Default configuration, with the floor taken from `CTSEQ_PRIME_FLOOR`
    /// when that variable holds an integer.
    pub fn from_env() -> Self {
        let floor = std::env::var(PRIME_FLOOR_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok());
        SweepConfig {
            prime_floor: floor.unwrap_or(SweepConfig::default().prime_floor),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub p: u64,
    pub r: u32,
    pub n: u64,
    pub k: u64,
    pub lhs: u64,
    /// `None` when no right-hand side exists (no consistent constant).
    pub rhs: Option<u64>,
    pub pass: bool,
}

impl CheckRecord {
    fn new(p: u64, r: u32, n: u64, k: u64, lhs: Residue, rhs: Option<Residue>) -> Self {
        CheckRecord {
            p,
            r,
            n,
            k,
            lhs: lhs.value(),
            rhs: rhs.map(|x| x.value()),
            pass: rhs == Some(lhs),
        }
    }

    fn key(&self) -> (u64, u32, u64, u64) {
        (self.p, self.r, self.n, self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Grid {
    pub primes: Vec<u64>,
    pub prime_floor: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    /// Every recorded check passed; `constant` is the reconstructed `c`
    /// where the sweep looks for one.
    AllPass { constant: Option<String> },
    Counterexample { record: CheckRecord },
    /// No constant of height at most `height_bound` fits the residues at
    /// `evidence_primes`.
    FalsifiedNoConstant {
        evidence_primes: Vec<u64>,
        height_bound: u64,
        message: String,
    },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::AllPass { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub subject: String,
    pub grid: Grid,
    pub checks: Vec<CheckRecord>,
    pub skipped: Vec<SkipRecord>,
    pub verdict: Verdict,
}

impl CongruenceReport {
    fn assemble(
        subject: String,
        grid: Grid,
        mut checks: Vec<CheckRecord>,
        mut skipped: Vec<SkipRecord>,
    ) -> Self {
        checks.sort_by_key(CheckRecord::key);
        skipped.sort_by_key(|a| (a.p, a.k));
        let verdict = match checks.iter().find(|c| !c.pass) {
            Some(c) => Verdict::Counterexample { record: c.clone() },
            None => Verdict::AllPass { constant: None },
        };
        CongruenceReport {
            subject,
            grid,
            checks,
            skipped,
            verdict,
        }
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Per-prime result: its check records and skips, or a skip of the whole prime.
type PrimeOutcome = Result<(Vec<CheckRecord>, Vec<SkipRecord>), String>;
type EntryOutcome = Result<(Vec<Entry>, Vec<SkipRecord>), String>;
/// Checks, skips and the per-prime constant `c_p`.
type PropagationOutcome = Result<(Vec<CheckRecord>, Vec<SkipRecord>, u64), String>;

fn run_primes<F>(primes: &[u64], cfg: &SweepConfig, f: F) -> (Vec<CheckRecord>, Vec<SkipRecord>)
where
    F: Fn(u64) -> PrimeOutcome + Sync,
{
    let outcomes: Vec<(u64, PrimeOutcome)> = primes
        .par_iter()
        .map(|&p| {
            if p <= cfg.prime_floor {
                return (p, Err(format!("below prime floor {}", cfg.prime_floor)));
            }
            (p, f(p))
        })
        .collect();
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    for (p, outcome) in outcomes {
        match outcome {
            Ok((c, s)) => {
                checks.extend(c);
                skipped.extend(s);
            }
            Err(reason) => skipped.push(SkipRecord { p, k: None, reason }),
        }
    }
    (checks, skipped)
}

fn dedup_primes(primes: &[u64]) -> Vec<u64> {
    primes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// `A(p^r n) = A(p^{r-1} n) (mod p^r)` for `1 <= r <= r_max`, `1 <= n <= n_max`.
pub fn gauss_check(
    e: &dyn SeqEvaluator,
    primes: &[u64],
    r_max: u32,
    n_max: u64,
    cfg: &SweepConfig,
) -> CongruenceReport {
    let primes = dedup_primes(primes);
    let (checks, skipped) = run_primes(&primes, cfg, |p| {
        e.admissible(p)?;
        let mut out = Vec::new();
        for r in 1..=r_max {
            for n in 1..=n_max {
                let lhs = e.term_mod(p.pow(r) * n, p, r).map_err(|x| x.to_string())?;
                let rhs = e.term_mod(p.pow(r - 1) * n, p, r).map_err(|x| x.to_string())?;
                out.push(CheckRecord::new(p, r, n, 0, lhs, Some(rhs)));
            }
        }
        Ok((out, Vec::new()))
    });
    let grid = Grid {
        primes,
        prime_floor: cfg.prime_floor,
        r_max: Some(r_max),
        n_max: Some(n_max),
        ..Grid::default()
    };
    CongruenceReport::assemble(e.describe(), grid, checks, skipped)
}

/// Exact `P^k Q`, its constant term and its degree, for `k = 0..=k_max`.
fn shifted_data(
    p: &LaurentPoly,
    q: &LaurentPoly,
    k_max: u64,
) -> Result<Vec<(Rational, u64)>, CongruenceError> {
    let mut out = Vec::new();
    let mut current = q.clone();
    for k in 0..=k_max {
        if k > 0 {
            current = current.mul(p)?;
        }
        let deg = current.degree().unwrap_or(0);
        out.push((current.constant_term(), deg));
    }
    Ok(out)
}

fn ct_admissible(p_poly: &LaurentPoly, q_poly: &LaurentPoly, p: u64) -> Result<(), String> {
    if p_poly.is_p_integral(p) && q_poly.is_p_integral(p) {
        Ok(())
    } else {
        Err(format!("{p} divides a coefficient denominator of P or Q"))
    }
}

fn degree_skip(p: u64, k: u64, deg: u64) -> SkipRecord {
    SkipRecord {
        p,
        k: Some(k),
        reason: format!("p <= deg(P^k Q) = {deg}"),
    }
}

/// `A(p^r n + k) = A(k) ct[P^{p^{r-1} n}] (mod p^r)` over the grid
/// `1 <= r <= r_max`, `0 <= n <= n_max`, `0 <= k <= k_max`.
pub fn ct_shift_check(
    p_poly: &LaurentPoly,
    q_poly: &LaurentPoly,
    primes: &[u64],
    r_max: u32,
    n_max: u64,
    k_max: u64,
    cfg: &SweepConfig,
) -> Result<CongruenceReport, CongruenceError> {
    let data = shifted_data(p_poly, q_poly, k_max)?;
    let one = LaurentPoly::constant(p_poly.var_count(), crate::exactnum::rat(1));
    let primes = dedup_primes(primes);
    let (checks, skipped) = run_primes(&primes, cfg, |p| {
        ct_admissible(p_poly, q_poly, p)?;
        let mut out = Vec::new();
        let mut skips = Vec::new();
        for (k, (a_k, deg)) in data.iter().enumerate() {
            let k = k as u64;
            if p <= *deg {
                skips.push(degree_skip(p, k, *deg));
                continue;
            }
            for r in 1..=r_max {
                let m = p.pow(r);
                let err = |e: &dyn std::fmt::Display| e.to_string();
                let pm = p_poly.reduce_mod(m).map_err(|e| err(&e))?;
                let qm = q_poly.reduce_mod(m).map_err(|e| err(&e))?;
                let onem = one.reduce_mod(m).map_err(|e| err(&e))?;
                let a_k = rational_mod(a_k, m).map_err(|e| err(&e))?;
                for n in 0..=n_max {
                    let lhs = ct_power_mod(&pm, &qm, m * n + k).map_err(|e| err(&e))?;
                    let base = ct_power_mod(&pm, &onem, (m / p) * n).map_err(|e| err(&e))?;
                    out.push(CheckRecord::new(p, r, n, k, lhs, Some(a_k * base)));
                }
            }
        }
        Ok((out, skips))
    });
    let grid = Grid {
        primes,
        prime_floor: cfg.prime_floor,
        r_max: Some(r_max),
        n_max: Some(n_max),
        k_max: Some(k_max),
        ..Grid::default()
    };
    let subject = format!("ct[({p_poly})^n * ({q_poly})]");
    Ok(CongruenceReport::assemble(subject, grid, checks, skipped))
}

/// `A(p^s n + k) = A(p^r n + k) (mod p^r)` for `0 <= n <= n_max`,
/// `0 <= k <= k_max`.
#[allow(clippy::too_many_arguments)]
pub fn stability_check(
    p_poly: &LaurentPoly,
    q_poly: &LaurentPoly,
    primes: &[u64],
    s: u32,
    r: u32,
    n_max: u64,
    k_max: u64,
    cfg: &SweepConfig,
) -> Result<CongruenceReport, CongruenceError> {
    if r == 0 || s < r {
        return Err(CongruenceError::InvalidGrid { s, r });
    }
    let data = shifted_data(p_poly, q_poly, k_max)?;
    let primes = dedup_primes(primes);
    let (checks, skipped) = run_primes(&primes, cfg, |p| {
        ct_admissible(p_poly, q_poly, p)?;
        let m = p.pow(r);
        let err = |e: &dyn std::fmt::Display| e.to_string();
        let pm = p_poly.reduce_mod(m).map_err(|e| err(&e))?;
        let qm = q_poly.reduce_mod(m).map_err(|e| err(&e))?;
        let mut out = Vec::new();
        let mut skips = Vec::new();
        for (k, (_, deg)) in data.iter().enumerate() {
            let k = k as u64;
            if p <= *deg {
                skips.push(degree_skip(p, k, *deg));
                continue;
            }
            for n in 0..=n_max {
                let lhs = ct_power_mod(&pm, &qm, p.pow(s) * n + k).map_err(|e| err(&e))?;
                let rhs = ct_power_mod(&pm, &qm, m * n + k).map_err(|e| err(&e))?;
                out.push(CheckRecord::new(p, r, n, k, lhs, Some(rhs)));
            }
        }
        Ok((out, skips))
    });
    let grid = Grid {
        primes,
        prime_floor: cfg.prime_floor,
        r_max: Some(r),
        s: Some(s),
        n_max: Some(n_max),
        k_max: Some(k_max),
        ..Grid::default()
    };
    let subject = format!("ct[({p_poly})^n * ({q_poly})]");
    Ok(CongruenceReport::assemble(subject, grid, checks, skipped))
}

/// Chinese remaindering of `x = v_i (mod p_i)` for distinct primes.
fn crt(residues: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for &(p, v) in residues {
        let pb = BigInt::from(p);
        // x + m t = v (mod p)
        let m_mod = Residue::from_bigint(&m, p);
        let diff = Residue::new(v, p) - Residue::from_bigint(&x, p);
        let t = diff * m_mod.inverse().expect("distinct primes");
        x += &m * BigInt::from(t.value());
        m *= pb;
    }
    (x, m)
}

/// The unique `a/b` with `|a|, b <= h` and `a = b x (mod m)`, if `m > 2 h^2`.
fn rational_reconstruct(x: &BigInt, m: &BigInt, h: u64) -> Option<Rational> {
    let h = BigInt::from(h);
    let (mut r0, mut r1) = (m.clone(), x.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > h {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > h || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Smallest-denominator `a/b` with `|a|, b <= h` and `a = b x (mod m)`,
/// for moduli too small for unique reconstruction.
fn brute_force_reconstruct(x: &BigInt, m: &BigInt, h: u64) -> Option<Rational> {
    let m_u = m.to_u64()?;
    let x_res = Residue::from_bigint(x, m_u);
    (1..=h).find_map(|b| {
        let a = (x_res * Residue::new(b % m_u, m_u)).symmetric();
        (a.unsigned_abs() <= h as u128 && num_integer::gcd(a.unsigned_abs(), b as u128) == 1)
            .then(|| Rational::new(BigInt::from(a), BigInt::from(b)))
    })
}

/// Candidate constant from per-prime residues, using the smallest prefix
/// of primes whose product exceeds `2 h^2`.
fn reconstruct_constant(residues: &[(u64, u64)], h: u64) -> Option<Rational> {
    if residues.is_empty() {
        return None;
    }
    let bound = BigInt::from(h) * BigInt::from(h) * 2;
    let mut prod = BigInt::one();
    let mut used = 0;
    while used < residues.len() && prod <= bound {
        prod *= residues[used].0;
        used += 1;
    }
    let (x, m) = crt(&residues[..used]);
    if m > bound {
        rational_reconstruct(&x, &m, h)
    } else {
        brute_force_reconstruct(&x, &m, h)
    }
}

enum Entry {
    /// `A(k) = 0`: the congruence reads `A(p + k) = 0`.
    ZeroBase { k: u64, lhs: Residue },
    Ratio { k: u64, lhs: Residue, a_k: Residue, rho: u64 },
}

/// Looks for one constant `c` with `A(p + k) = c A(k) (mod p)` for every
/// admissible prime in the list and every `k <= k_max`.
pub fn constant_c_falsifier(
    e: &dyn SeqEvaluator,
    primes: &[u64],
    k_max: u64,
    height_bound: u64,
    cfg: &SweepConfig,
) -> Result<CongruenceReport, CongruenceError> {
    let primes = dedup_primes(primes);
    let mut ks: Vec<(u64, Rational)> = (0..=k_max)
        .map(|k| e.exact(k).map(|v| (k, v)))
        .collect::<Result<_, _>>()?;
    if ks.iter().all(|(_, v)| v.is_zero()) {
        // fall back to the first nonzero term past k_max, if the evaluator reaches one
        for k in k_max + 1..=k_max + 16 {
            match e.exact(k) {
                Ok(v) if !v.is_zero() => {
                    ks.push((k, v));
                    break;
                }
                Ok(_) => {}
                Err(_) => break,
            }
        }
    }
    let outcomes: Vec<(u64, EntryOutcome)> = primes
        .par_iter()
        .map(|&p| {
            if p <= cfg.prime_floor {
                return (p, Err(format!("below prime floor {}", cfg.prime_floor)));
            }
            let run = || -> Result<(Vec<Entry>, Vec<SkipRecord>), String> {
                e.admissible(p)?;
                let mut entries = Vec::new();
                let mut skips = Vec::new();
                for (k, a) in &ks {
                    let lhs = e.term_mod(p + k, p, 1).map_err(|x| x.to_string())?;
                    if a.is_zero() {
                        entries.push(Entry::ZeroBase { k: *k, lhs });
                        continue;
                    }
                    let a_k = match rational_mod(a, p) {
                        Ok(r) if !r.is_zero() => r,
                        _ => {
                            skips.push(SkipRecord {
                                p,
                                k: Some(*k),
                                reason: format!("p divides the numerator or denominator of A({k})"),
                            });
                            continue;
                        }
                    };
                    let rho = (lhs * a_k.inverse().unwrap()).value();
                    entries.push(Entry::Ratio { k: *k, lhs, a_k, rho });
                }
                Ok((entries, skips))
            };
            (p, run())
        })
        .collect();

    let mut per_prime = Vec::new();
    let mut skipped = Vec::new();
    for (p, outcome) in outcomes {
        match outcome {
            Ok((entries, skips)) => {
                skipped.extend(skips);
                per_prime.push((p, entries));
            }
            Err(reason) => skipped.push(SkipRecord { p, k: None, reason }),
        }
    }

    let base_k = ks.iter().find(|(_, v)| !v.is_zero()).map(|(k, _)| *k);
    let residues: Vec<(u64, u64)> = per_prime
        .iter()
        .filter_map(|(p, entries)| {
            entries.iter().find_map(|en| match en {
                Entry::Ratio { k, rho, .. } if Some(*k) == base_k => Some((*p, *rho)),
                _ => None,
            })
        })
        .collect();
    let candidate = reconstruct_constant(&residues, height_bound);

    let mut checks = Vec::new();
    for (p, entries) in &per_prime {
        let c_mod = candidate.as_ref().map(|c| rational_mod(c, *p));
        for en in entries {
            match en {
                Entry::ZeroBase { k, lhs } => {
                    checks.push(CheckRecord::new(*p, 1, 1, *k, *lhs, Some(Residue::zero(*p))));
                }
                Entry::Ratio { k, lhs, a_k, .. } => match &c_mod {
                    Some(Err(_)) => skipped.push(SkipRecord {
                        p: *p,
                        k: Some(*k),
                        reason: "candidate constant is not p-integral".into(),
                    }),
                    Some(Ok(c)) => checks.push(CheckRecord::new(*p, 1, 1, *k, *lhs, Some(*c * *a_k))),
                    None => checks.push(CheckRecord::new(*p, 1, 1, *k, *lhs, None)),
                },
            }
        }
    }

    let grid = Grid {
        primes,
        prime_floor: cfg.prime_floor,
        k_max: Some(k_max),
        height_bound: Some(height_bound),
        ..Grid::default()
    };
    let mut report = CongruenceReport::assemble(e.describe(), grid, checks, skipped);
    if base_k.is_none() && report.passed() {
        return Err(CongruenceError::ZeroBase { k_max });
    }
    report.verdict = if report.passed() {
        Verdict::AllPass {
            constant: candidate.map(|c| c.to_string()),
        }
    } else {
        let mut evidence: Vec<u64> = report.checks.iter().filter(|c| !c.pass).map(|c| c.p).collect();
        evidence.dedup();
        let message = match &candidate {
            Some(c) => format!(
                "the only constant of height <= {height_bound} matching the first primes is {c}, \
                 and it fails at the evidence primes"
            ),
            None => format!("no constant of height <= {height_bound} matches the residues"),
        };
        Verdict::FalsifiedNoConstant {
            evidence_primes: evidence,
            height_bound,
            message,
        }
    };
    Ok(report)
}

/// For each prime, sets `c_p = A(p) / A(0) (mod p)` and checks
/// `A(p + k) = c_p A(k) (mod p)` for `1 <= k <= k_max`. The reported
/// constant is a single `c` matching every `c_p`, when one of height at
/// most the default bound exists.
pub fn hypergeom_propagation_check(
    h: &HypergeomSeq,
    primes: &[u64],
    k_max: u64,
    cfg: &SweepConfig,
) -> Result<CongruenceReport, CongruenceError> {
    let primes = dedup_primes(primes);
    let exact: Vec<Rational> = (0..=k_max)
        .map(|k| h.exact(k))
        .collect::<Result<_, _>>()?;
    let outcomes: Vec<(u64, PropagationOutcome)> = primes
        .par_iter()
        .map(|&p| {
            if p <= cfg.prime_floor {
                return (p, Err(format!("below prime floor {}", cfg.prime_floor)));
            }
            let run = || {
                h.admissible(p)?;
                if let Some(j) = (0..k_max).find(|&j| h.alpha_divisible(j, p)) {
                    return Err(format!("{p} divides alpha({j})"));
                }
                let a0 = rational_mod(&exact[0], p)
                    .ok()
                    .filter(|r| !r.is_zero())
                    .ok_or_else(|| format!("{p} divides A(0)"))?;
                let base = h.term_mod(p, p, 1).map_err(|x| x.to_string())?;
                let c_p = base * a0.inverse().unwrap();
                let mut out = Vec::new();
                let mut skips = Vec::new();
                for k in 1..=k_max {
                    let Ok(a_k) = rational_mod(&exact[k as usize], p) else {
                        skips.push(SkipRecord {
                            p,
                            k: Some(k),
                            reason: format!("A({k}) is not {p}-integral"),
                        });
                        continue;
                    };
                    let lhs = h.term_mod(p + k, p, 1).map_err(|x| x.to_string())?;
                    out.push(CheckRecord::new(p, 1, 1, k, lhs, Some(c_p * a_k)));
                }
                Ok((out, skips, c_p.value()))
            };
            (p, run())
        })
        .collect();
    let mut checks = Vec::new();
    let mut skipped = Vec::new();
    let mut bases = Vec::new();
    for (p, outcome) in outcomes {
        match outcome {
            Ok((c, s, base)) => {
                checks.extend(c);
                skipped.extend(s);
                bases.push((p, base));
            }
            Err(reason) => skipped.push(SkipRecord { p, k: None, reason }),
        }
    }
    let grid = Grid {
        primes,
        prime_floor: cfg.prime_floor,
        k_max: Some(k_max),
        ..Grid::default()
    };
    let mut report = CongruenceReport::assemble(h.to_string(), grid, checks, skipped);
    if report.passed() {
        let constant = reconstruct_constant(&bases, DEFAULT_HEIGHT_BOUND).filter(|c| {
            bases
                .iter()
                .all(|&(p, v)| rational_mod(c, p).is_ok_and(|r| r.value() == v))
        });
        report.verdict = Verdict::AllPass {
            constant: constant.map(|c| c.to_string()),
        };
    }
    Ok(report)
}
