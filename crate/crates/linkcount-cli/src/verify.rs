//! Self-verification suites: closed forms against brute-force oracles and
//! the frozen worked tables. Each suite prints one PASS/FAIL line and
//! dumps counterexamples on failure.

use std::collections::BTreeMap;

use clap::ValueEnum;

use linkcount::arith::Int;
use linkcount::intersection::{gz_f, gz_f_closed_form, EpsilonContext};
use linkcount::linking::{
    build_profile, candidate_orders, classify, count_oriented_positive, epsilon, level_factor,
    total_factor, CountQuery,
};
use linkcount::oracles::{hilbert_bruteforce, pell_soluble, pell_soluble_bruteforce_auto, tree_count};
use linkcount::quadclass::make_discriminant;
use linkcount::quatalg::{hilbert_symbol, ramified_places, Place};
use linkcount::rat::{rat, Rat};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hilbert,
    Pell,
    Tree,
    Gz,
    Tables,
}

pub fn run(suite: Suite) -> i32 {
    let (name, outcome) = match suite {
        Suite::Hilbert => ("hilbert", verify_hilbert()),
        Suite::Pell => ("pell", verify_pell()),
        Suite::Tree => ("tree", verify_tree()),
        Suite::Gz => ("gz", verify_gz()),
        Suite::Tables => ("tables", verify_tables()),
    };
    match outcome {
        Ok(checks) => {
            println!("verify {name}: PASS ({checks} checks)");
            0
        }
        Err(counterexamples) => {
            println!("verify {name}: FAIL ({} counterexamples)", counterexamples.len());
            for c in counterexamples.iter().take(20) {
                println!("  {c}");
            }
            1
        }
    }
}

type Outcome = std::result::Result<usize, Vec<String>>;

fn verify_hilbert() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    for a in -30..=30 as Int {
        if a == 0 {
            continue;
        }
        for b in -30..=30 as Int {
            if b == 0 {
                continue;
            }
            for p in [2, 3, 5, 7, 11] {
                let closed = hilbert_symbol(&rat(a), &rat(b), Place::Finite(p)).unwrap();
                match hilbert_bruteforce(a, b, p) {
                    Ok(brute) if brute == closed => checks += 1,
                    Ok(brute) => bad.push(format!(
                        "({a},{b})_{p}: closed {closed}, brute force {brute}"
                    )),
                    Err(e) => bad.push(format!("({a},{b})_{p}: oracle error {e}")),
                }
            }
        }
    }
    // Product formula and even ramification on deterministic samples.
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    for _ in 0..1000 {
        let a = Rat::new((next() % 20_000) as Int - 10_000, (next() % 9_999 + 1) as Int);
        let b = Rat::new((next() % 20_000) as Int - 10_000, (next() % 9_999 + 1) as Int);
        if *a.numer() == 0 || *b.numer() == 0 {
            continue;
        }
        let places = ramified_places(&a, &b).unwrap();
        let prod: i32 = places
            .iter()
            .map(|pl| hilbert_symbol(&a, &b, *pl).unwrap())
            .product();
        if !places.len().is_multiple_of(2) || prod != 1 {
            bad.push(format!("product formula fails for ({a}, {b}): {places:?}"));
        } else {
            checks += 1;
        }
    }
    if bad.is_empty() {
        Ok(checks)
    } else {
        Err(bad)
    }
}

fn verify_pell() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    for dv in [5, 13, 17, 21, 73 as Int] {
        let d = make_discriminant(dv).unwrap();
        for a in -50..=50 as Int {
            if a == 0 {
                continue;
            }
            for p in [2, 3, 5, 7] {
                if dv % p == 0 {
                    continue;
                }
                let closed = pell_soluble(&d, a, p).unwrap();
                match pell_soluble_bruteforce_auto(&d, a, p) {
                    Ok(brute) if brute == closed => checks += 1,
                    Ok(brute) => bad.push(format!(
                        "D={dv}, A={a}, p={p}: closed {closed}, brute force {brute}"
                    )),
                    Err(e) => bad.push(format!("D={dv}, A={a}, p={p}: oracle error {e}")),
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(checks)
    } else {
        Err(bad)
    }
}

fn verify_tree() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    for g in 0..=8u32 {
        for g_prime in 0..=g {
            for pb in [false, true] {
                let mut sum = 0;
                for g_dprime in 0..=((g - g_prime) / 2) {
                    if pb && g_dprime != 0 {
                        continue;
                    }
                    let enumerated = tree_count(g, g_prime, g_dprime, pb).unwrap() as Int;
                    let closed = level_factor(g, g_prime, g_dprime, pb).unwrap();
                    if enumerated != closed {
                        bad.push(format!(
                            "g={g} g'={g_prime} g''={g_dprime} pb={pb}: tree {enumerated}, closed {closed}"
                        ));
                    } else {
                        checks += 1;
                    }
                    sum += enumerated;
                }
                let total = total_factor(g, g_prime, pb).unwrap();
                if sum != total {
                    bad.push(format!(
                        "g={g} g'={g_prime} pb={pb}: level sum {sum}, total factor {total}"
                    ));
                } else {
                    checks += 1;
                }
            }
        }
    }
    if bad.is_empty() {
        Ok(checks)
    } else {
        Err(bad)
    }
}

/// Synthetic epsilon contexts with r >= 1 odd-power (-1)-primes. The
/// valuation vector of F_GZ must vanish unless r = 1, where it is
/// (e1+1) * prod(g_i + 1) at the single prime.
fn verify_gz() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;
    let primes = [2, 3, 5, 7, 11, 13 as Int];
    let mut state: u64 = 0o123456712345;
    let mut next = move |m: u64| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state % m
    };
    for case in 0..240 {
        let r = 1 + (case % 3) as usize; // r in {1, 2, 3}
        let mut values = BTreeMap::new();
        let mut m: Int = 1;
        let mut pool: Vec<Int> = primes.to_vec();
        // r odd-power primes with epsilon -1.
        let mut e1 = 0;
        let mut p1 = 0;
        for i in 0..r {
            let p = pool.remove(next(pool.len() as u64) as usize);
            values.insert(p, -1);
            let e = next(3) as u32;
            if i == 0 {
                e1 = e;
                p1 = p;
            }
            m *= p.pow(2 * e + 1);
        }
        // Optional even-power epsilon -1 prime.
        if next(2) == 0 {
            let p = pool.remove(next(pool.len() as u64) as usize);
            values.insert(p, -1);
            m *= p.pow(2 * (1 + next(2) as u32));
        }
        // w-primes.
        let mut expected_w: Int = 1;
        for _ in 0..next(3) {
            let p = pool.remove(next(pool.len() as u64) as usize);
            values.insert(p, 1);
            let g = 1 + next(3) as u32;
            expected_w *= (g + 1) as Int;
            m *= p.pow(g);
        }
        let ctx = EpsilonContext::from_values(values).unwrap();
        let direct = gz_f(m, &ctx).unwrap();
        let closed = gz_f_closed_form(m, &ctx).unwrap();
        if direct != closed {
            bad.push(format!("m={m}: divisor sum {direct:?} != closed form {closed:?}"));
            continue;
        }
        if r == 1 {
            let expect = (e1 as Int + 1) * expected_w;
            if direct.get(&p1).copied().unwrap_or(0) != expect || direct.len() != 1 {
                bad.push(format!(
                    "m={m}, r=1: valuations {direct:?}, expected {expect} at {p1}"
                ));
                continue;
            }
        } else if !direct.is_empty() {
            bad.push(format!("m={m}, r={r}: nonvanishing valuations {direct:?}"));
            continue;
        }
        checks += 1;
    }
    if checks < 200 {
        bad.push(format!("only {checks} certified contexts"));
    }
    if bad.is_empty() {
        Ok(checks)
    } else {
        Err(bad)
    }
}

fn verify_tables() -> Outcome {
    let mut bad = Vec::new();
    let mut checks = 0;

    // Epsilon values for the pair (5, 381) at primes below 100.
    let d1 = make_discriminant(5).unwrap();
    let d2 = make_discriminant(381).unwrap();
    let expected: &[(Int, i32)] = &[
        (2, -1),
        (3, -1),
        (5, 1),
        (7, -1),
        (17, -1),
        (19, 1),
        (29, 1),
        (31, 1),
        (43, -1),
        (47, -1),
        (59, 1),
        (61, 1),
        (67, -1),
        (79, 1),
        (89, 1),
        (97, -1),
    ];
    let mut defined = Vec::new();
    for p in 2..=100 as Int {
        if !linkcount::arith::is_prime(p) {
            continue;
        }
        if let Some(e) = epsilon(p, &d1, &d2).unwrap() {
            defined.push((p, e));
        }
    }
    if defined != expected {
        bad.push(format!("epsilon table mismatch: {defined:?}"));
    } else {
        checks += 1;
    }

    // Ramification classes of (5, 381).
    let table: &[(&[Int], &[Int])] = &[
        (&[], &[7, 17, 25, 31]),
        (&[2, 3], &[3, 9, 21, 27, 39]),
        (&[2, 7], &[13, 29, 41, 43]),
        (&[2, 17], &[35]),
        (&[2, 43], &[23]),
        (&[2, 47], &[5]),
        (&[2, 67], &[37]),
        (&[2, 193], &[19]),
        (&[2, 223], &[11]),
        (&[3, 7], &[15]),
        (&[3, 17], &[33]),
        (&[7, 17], &[1]),
    ];
    let cands = candidate_orders(&d1, &d2).unwrap();
    let mut grouped: BTreeMap<Vec<Int>, Vec<Int>> = BTreeMap::new();
    for c in &cands {
        grouped
            .entry(c.ramified.iter().copied().collect())
            .or_default()
            .push(c.x);
    }
    let expected_groups: BTreeMap<Vec<Int>, Vec<Int>> = table
        .iter()
        .map(|(r, xs)| (r.to_vec(), xs.to_vec()))
        .collect();
    if grouped != expected_groups {
        bad.push(format!("algebra table mismatch: {grouped:?}"));
    } else {
        checks += 1;
    }

    // Oriented positive counts for (73, 937, 89) and (241, 2736, 324).
    type CountCase = (Int, Int, Int, Int, Int, &'static [(Int, Int)]);
    let cases: &[CountCase] = &[
        (73, 937, 89, 35, 1, &[(1, 4), (2, 4), (3, 4), (4, 2), (6, 4), (12, 2)]),
        (73, 937, 89, 35, 3, &[(1, 4), (2, 4), (3, 2), (4, 2), (6, 2), (12, 1)]),
        (241, 2736, 324, 77, 1, &[(1, 8), (5, 4)]),
    ];
    for (a, b, x, disc, level, expect) in cases {
        let t = classify(*a, *b, *x).unwrap();
        let profile = build_profile(&t).unwrap();
        for (ell, count) in *expect {
            let q = CountQuery::new(*disc, *level, Some(*ell)).unwrap();
            let got = count_oriented_positive(&profile, &q).unwrap();
            if got != *count {
                bad.push(format!(
                    "count table ({a},{b},{x}) level {level} ell {ell}: got {got}, want {count}"
                ));
            } else {
                checks += 1;
            }
        }
        // Confirm no extra levels sneak in.
        let all = linkcount::intersection::admissible_levels(
            &profile,
            &CountQuery::new(*disc, *level, None).unwrap(),
        )
        .unwrap();
        let expected_levels: Vec<Int> = expect.iter().map(|&(l, _)| l).collect();
        if all != expected_levels {
            bad.push(format!(
                "level set for ({a},{b},{x}) at level {level}: {all:?} vs {expected_levels:?}"
            ));
        } else {
            checks += 1;
        }
    }

    if bad.is_empty() {
        Ok(checks)
    } else {
        Err(bad)
    }
}
