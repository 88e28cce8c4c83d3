//! End-to-end acceptance checks. Runs without the libtest harness and
//! prints one PASS/FAIL line per criterion; exits nonzero if any fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use ctseq::cfinite::CFiniteSeq;
use ctseq::congruence::{constant_c_falsifier, gauss_check, SweepConfig, Verdict, DEFAULT_HEIGHT_BOUND};
use ctseq::ctkit::{build_witness, decide_combination, decide_single_ct, verify_witness, DecisionReason};
use ctseq::exactnum::{binomial, primes_in_range, rat, rational_mod, Rational};
use ctseq::hypergeom::{
    am_residue_exact, b_sequence, christol_check, family_am, phi, predicted_am_residue, witness_am,
    EvalMode,
};
use ctseq::laurent::{ct_sequence, LaurentPoly};
use ctseq::parse::parse_laurent;
use ctseq::upoly::UPoly;

type Check = Result<(), String>;
/// Label, time limit in seconds, and the check itself.
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lp(text: &str) -> LaurentPoly {
    parse_laurent(text, None).unwrap().0
}

fn catalan_witness() -> Check {
    let vals = ct_sequence(&lp("x^-1 + 2 + x"), &lp("1 - x"), 20).map_err(|e| e.to_string())?;
    for (n, v) in vals.iter().enumerate() {
        let n = n as u64;
        let expected = binomial(2 * n, n) - binomial(2 * n, n + 1);
        ensure(*v == Rational::from_integer(expected.clone()), || {
            format!("n = {n}: ct gives {v}, expected {expected}")
        })?;
    }
    Ok(())
}

fn apery_witness() -> Check {
    let kernel = lp("(x + y)*(z + 1)*(x + y + z)*(y + z + 1)/(x*y*z)");
    let one = LaurentPoly::constant(3, rat(1));
    let vals = ct_sequence(&kernel, &one, 8).map_err(|e| e.to_string())?;
    ensure(vals[0] == rat(1) && vals[1] == rat(5), || {
        format!("A(0), A(1) = {}, {}", vals[0], vals[1])
    })?;
    for (n, v) in vals.iter().enumerate() {
        let n = n as u64;
        let sum: BigInt = (0..=n)
            .map(|k| {
                let a = binomial(n, k);
                let b = binomial(n + k, k);
                &a * &a * &b * &b
            })
            .sum();
        ensure(*v == Rational::from_integer(sum.clone()), || {
            format!("n = {n}: ct gives {v}, binomial sum {sum}")
        })?;
    }
    Ok(())
}

fn fibonacci() -> Check {
    let fib = CFiniteSeq::from_ints(&[1, 1], &[0, 1]).unwrap();
    let d = decide_combination(&fib);
    ensure(
        !d.representable && d.reason == DecisionReason::IrrationalRootsPresent,
        || format!("decision {d:?}"),
    )?;
    let primes = primes_in_range(7, 100);
    let r = constant_c_falsifier(&fib, &primes, 0, DEFAULT_HEIGHT_BOUND, &SweepConfig::default())
        .map_err(|e| e.to_string())?;
    ensure(
        matches!(r.verdict, Verdict::FalsifiedNoConstant { .. }),
        || format!("verdict {:?}", r.verdict),
    )?;
    ensure(r.skipped.is_empty(), || "a prime was skipped".into())?;
    let base: Vec<_> = r.checks.iter().filter(|c| c.k == 0).collect();
    ensure(base.len() == primes.len(), || "missing k = 0 check".into())?;
    for c in base {
        let expected = if matches!(c.p % 5, 1 | 4) { 1 } else { c.p - 1 };
        ensure(c.lhs == expected, || {
            format!("F({}) mod {} = {}, expected {}", c.p, c.p, c.lhs, expected)
        })?;
    }
    Ok(())
}

fn lucas() -> Check {
    let lucas = CFiniteSeq::from_ints(&[1, 1], &[2, 1]).unwrap();
    let t = lucas
        .is_trace_sequence()
        .map_err(|e| e.to_string())?
        .ok_or("not recognised as a trace sequence")?;
    ensure(t.parts.len() == 1, || format!("{} parts", t.parts.len()))?;
    ensure(t.parts[0].u == UPoly::from_ints(&[1, -1, -1]), || {
        format!("u = {}", t.parts[0].u)
    })?;
    let r = gauss_check(&lucas, &primes_in_range(2, 100), 2, 10, &SweepConfig::default());
    ensure(r.passed(), || format!("gauss verdict {:?}", r.verdict))?;
    ensure(!r.checks.is_empty(), || "no checks ran".into())?;
    ensure(!decide_combination(&lucas).representable, || "Lucas decided representable".into())
}

fn two_pow_plus_one() -> Check {
    let s = CFiniteSeq::from_ints(&[-2, 3], &[2, 3]).unwrap();
    ensure(!decide_single_ct(&s).representable, || "single ct accepted".into())?;
    let d = decide_combination(&s);
    ensure(d.min_terms == Some(2), || format!("decision {d:?}"))?;
    let w = build_witness(&s).map_err(|e| e.to_string())?;
    let cert = verify_witness(&s, &w).map_err(|e| e.to_string())?;
    ensure(cert.pass && cert.certified, || format!("certification {cert:?}"))?;
    let vals = w.evaluate(50).map_err(|e| e.to_string())?;
    for (n, v) in vals.iter().enumerate() {
        let expected = Rational::from_integer(BigInt::from(2).pow(n as u32) + 1);
        ensure(*v == expected, || format!("n = {n}: {v} vs {expected}"))?;
    }
    Ok(())
}

fn am_witnesses() -> Check {
    for m in [2, 3, 4, 6] {
        let w = witness_am(m).map_err(|e| e.to_string())?;
        let p = &w.terms[0].p;
        let one = LaurentPoly::constant(p.var_count(), rat(1));
        let ct = ct_sequence(p, &one, 25).map_err(|e| e.to_string())?;
        let hg = family_am(m).unwrap().eval(25).map_err(|e| e.to_string())?;
        if let Some(n) = (0..=25).find(|&n| ct[n] != hg[n]) {
            return Err(format!("m = {m}, n = {n}: {} vs {}", ct[n], hg[n]));
        }
    }
    Ok(())
}

fn am_residues() -> Check {
    for m in 2..=12u64 {
        let mut values = std::collections::BTreeSet::new();
        for p in primes_in_range(m + 1, 300) {
            let exact = am_residue_exact(m, p).map_err(|e| e.to_string())?;
            let predicted = predicted_am_residue(m, p).map_err(|e| e.to_string())?;
            ensure(exact == predicted, || {
                format!("m = {m}, p = {p}: exact {exact}, predicted {predicted}")
            })?;
            let a = ctseq::hypergeom::residue_a(m, p, 1).unwrap();
            values.insert(a * (m - a));
        }
        let expected = if m == 2 { 1 } else { phi(m) as usize / 2 };
        ensure(values.len() == expected, || {
            format!("m = {m}: {} distinct values, expected {expected}", values.len())
        })?;
    }
    Ok(())
}

fn b_sequence_residues() -> Check {
    let b = b_sequence();
    let head = b.eval(4).map_err(|e| e.to_string())?;
    let expected: Vec<Rational> = [1, 20, 1350, 115500, 10972500].iter().map(|&v| rat(v)).collect();
    ensure(head == expected, || format!("B(0..4) = {head:?}"))?;
    let all = b.eval(300).map_err(|e| e.to_string())?;
    for p in primes_in_range(7, 300) {
        let want = if matches!(p % 5, 1 | 4) { 20 % p } else { 30 % p };
        let got = rational_mod(&all[p as usize], p).map_err(|e| e.to_string())?;
        let modular = b.term_mod_p(p, p).map_err(|e| e.to_string())?;
        ensure(got.value() == want && modular == got, || {
            format!("p = {p}: exact {got}, modular {modular}, expected {want}")
        })?;
    }
    Ok(())
}

fn christol() -> Check {
    let mut seen = 0;
    for p in primes_in_range(10, 300) {
        if !matches!(p % 9, 1 | 8) {
            continue;
        }
        let c = christol_check(p, EvalMode::Exact).map_err(|e| e.to_string())?;
        let want = if p % 9 == 1 { 20 % p } else { 80 % p };
        ensure(c.matches() && c.actual.value() == want, || {
            format!("p = {p}: actual {}, expected {want}", c.actual)
        })?;
        seen += 1;
    }
    ensure(seen > 10, || format!("only {seen} primes checked"))
}

mod props {
    use super::*;
    use ctseq::laurent::ResidueRing;

    pub fn sparse_poly() -> impl Strategy<Value = LaurentPoly> {
        (1usize..=2)
            .prop_flat_map(|d| {
                proptest::collection::vec(
                    (proptest::collection::vec(-1i64..=1, d), -3i64..=3),
                    1..=3,
                )
                .prop_map(move |terms| {
                    terms.into_iter().fold(LaurentPoly::constant(d, rat(0)), |acc, (e, c)| {
                        acc.add(&LaurentPoly::monomial(e, rat(c))).unwrap()
                    })
                })
            })
    }

    fn residue_pow(f: &LaurentPoly, m: u64, e: u64) -> LaurentPoly<ResidueRing> {
        f.reduce_mod(m).unwrap().pow(e)
    }

    /// `f^{p^r} = (f(x^p))^{p^{r-1}} (mod p^r)`.
    pub fn frobenius(runner: &mut TestRunner) -> Check {
        let strat = (sparse_poly(), prop::sample::select(vec![2u64, 3, 5, 7]), 1u32..=2);
        runner
            .run(&strat, |(f, p, r)| {
                let m = p.pow(r);
                let lhs = residue_pow(&f, m, m);
                let rhs = residue_pow(&f.substitute_power(p), m, m / p);
                prop_assert_eq!(lhs, rhs);
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    /// Integer recurrence iterated directly modulo `m`.
    fn iterate_mod(coeffs: &[i64], init: &[i64], n: u64, m: u64) -> u64 {
        let r = coeffs.len();
        let md = m as i64;
        let mut window: Vec<i64> = init.iter().map(|v| v.rem_euclid(md)).collect();
        if (n as usize) < r {
            return window[n as usize] as u64;
        }
        for _ in r as u64..=n {
            let next = coeffs
                .iter()
                .zip(&window)
                .fold(0i64, |acc, (c, v)| (acc + c * v).rem_euclid(md));
            window.remove(0);
            window.push(next);
        }
        *window.last().unwrap() as u64
    }

    pub fn eval_mod_oracle(runner: &mut TestRunner) -> Check {
        let strat = (1usize..=4)
            .prop_flat_map(|r| {
                (
                    proptest::collection::vec(-3i64..=3, r),
                    proptest::collection::vec(-5i64..=5, r),
                    0u64..=1_000_000,
                    prop::sample::select(vec![2u64, 3, 4, 5, 7, 9, 11, 25, 49, 121]),
                )
            });
        runner
            .run(&strat, |(coeffs, init, n, m)| {
                let s = CFiniteSeq::from_ints(&coeffs, &init).unwrap();
                let got = s.eval_mod(&num_bigint::BigUint::from(n), m).unwrap();
                prop_assert_eq!(got.value(), iterate_mod(&coeffs, &init, n, m));
                let exact = s.eval_terms(40);
                for (i, v) in exact.iter().enumerate() {
                    let g = s.eval_mod(&num_bigint::BigUint::from(i), m).unwrap();
                    prop_assert_eq!(g, rational_mod(v, m).unwrap());
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    /// Berlekamp-Massey over the rationals: the shortest `L` and monic
    /// `x^L + c_1 x^{L-1} + ... + c_L` annihilating `s`.
    pub fn berlekamp_massey(s: &[Rational]) -> UPoly {
        let mut c = vec![rat(1)];
        let mut b = vec![rat(1)];
        let (mut l, mut m, mut bd) = (0usize, 1usize, rat(1));
        for n in 0..s.len() {
            let d = (0..=l).fold(Rational::zero(), |acc, i| {
                acc + c.get(i).cloned().unwrap_or_else(Rational::zero) * &s[n - i]
            });
            if d.is_zero() {
                m += 1;
                continue;
            }
            let coef = &d / &bd;
            let t = c.clone();
            if c.len() < b.len() + m {
                c.resize(b.len() + m, Rational::zero());
            }
            for (i, bi) in b.iter().enumerate() {
                c[i + m] -= &coef * bi;
            }
            if 2 * l <= n {
                l = n + 1 - l;
                b = t;
                bd = d;
                m = 1;
            } else {
                m += 1;
            }
        }
        c.resize(l + 1, Rational::zero());
        UPoly::new(c.into_iter().rev().collect())
    }

    pub fn annihilator_oracle(runner: &mut TestRunner) -> Check {
        let strat = (1usize..=4, 0usize..=2).prop_flat_map(|(r, off)| {
            (
                proptest::collection::vec(-3i64..=3, r),
                proptest::collection::vec(-2i64..=2, r + off),
                Just(off),
            )
        });
        runner
            .run(&strat, |(coeffs, init, off)| {
                let s = CFiniteSeq::new(
                    coeffs.iter().map(|&c| rat(c)).collect(),
                    off,
                    init.iter().map(|&c| rat(c)).collect(),
                )
                .unwrap();
                let terms = s.eval_terms(40);
                let oracle = berlekamp_massey(&terms);
                let got = s.minimal_annihilator();
                if oracle.degree() == Some(0) || oracle.is_zero() {
                    prop_assert!(s.is_zero_sequence());
                } else {
                    prop_assert_eq!(got, oracle);
                }
                Ok(())
            })
            .map_err(|e| e.to_string())
    }

    pub fn representable_seq() -> impl Strategy<Value = CFiniteSeq> {
        let root = prop::sample::select(vec![(1i64, 1i64), (-1, 1), (2, 1), (-3, 1), (1, 2), (-2, 3), (3, 1)]);
        (
            proptest::collection::vec((root, 1usize..=2), 1..=3),
            0usize..=2,
        )
            .prop_flat_map(|(roots, m0)| {
                let mut ann = UPoly::monomial(m0);
                for ((a, b), mult) in &roots {
                    ann = ann.mul(&UPoly::linear(&Rational::new((*a).into(), (*b).into())).pow(*mult as u32));
                }
                let d = ann.degree().unwrap();
                (Just(ann), proptest::collection::vec(-4i64..=4, d))
            })
            .prop_map(|(ann, init)| {
                let init: Vec<Rational> = init.into_iter().map(rat).collect();
                CFiniteSeq::from_annihilator(&ann, &init).unwrap()
            })
    }

    pub fn witness_round_trip(runner: &mut TestRunner) -> Check {
        runner
            .run(&representable_seq(), |s| {
                prop_assert!(decide_combination(&s).representable);
                let w = build_witness(&s).unwrap();
                prop_assert_eq!(Some(w.len()), decide_combination(&s).min_terms);
                let cert = verify_witness(&s, &w).unwrap();
                prop_assert!(cert.pass && cert.certified);
                prop_assert_eq!(w.evaluate(30).unwrap(), s.eval_terms(30));
                Ok(())
            })
            .map_err(|e| e.to_string())
    }
}

fn cases(n: u32) -> Config {
    Config {
        cases: n,
        failure_persistence: None,
        ..Config::default()
    }
}

fn property_suites() -> Check {
    let mut runner = TestRunner::new(cases(200));
    props::frobenius(&mut runner).map_err(|e| format!("frobenius: {e}"))?;
    let mut runner = TestRunner::new(cases(100));
    props::eval_mod_oracle(&mut runner).map_err(|e| format!("eval_mod: {e}"))?;
    let mut runner = TestRunner::new(cases(100));
    props::annihilator_oracle(&mut runner).map_err(|e| format!("annihilator: {e}"))?;
    let mut runner = TestRunner::new(cases(100));
    props::witness_round_trip(&mut runner).map_err(|e| format!("witness: {e}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Catalan witness, n <= 20", 5, catalan_witness),
        ("Apery kernel, n <= 8", 60, apery_witness),
        ("Fibonacci not representable and falsified, primes 7..100", 5, fibonacci),
        ("Lucas trace form, Gauss congruences, not representable", 30, lucas),
        ("2^n + 1: two-term witness certified", 1, two_pow_plus_one),
        ("A_m witnesses for m in {2, 3, 4, 6}, n <= 25", 30, am_witnesses),
        ("m^(2p) A_m(p) = a(m - a) mod p, m <= 12, p <= 300", 60, am_residues),
        ("B sequence terms and residues 20 / 30", 30, b_sequence_residues),
        ("ninths example residues 20 / 80, p <= 300", 60, christol),
        ("property suites", 120, property_suites),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let outcome = match result {
            Ok(()) if elapsed <= Duration::from_secs(*limit) => Ok(()),
            Ok(()) => Err(format!("took {:.2?}, limit {limit} s", elapsed)),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(()) => println!("criterion {:>2}: PASS  {name} ({:.2?})", i + 1, elapsed),
            Err(e) => {
                failures += 1;
                println!("criterion {:>2}: FAIL  {name} ({:.2?}): {e}", i + 1, elapsed);
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
