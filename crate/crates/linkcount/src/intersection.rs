//! Aggregate intersection numbers of closed geodesics for a discriminant
//! pair, the Gross-Zagier counterpart F_GZ with its valuation law, and the
//! exact intersection angle.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{cadd, cmul, factorize, valuation, Int};
use crate::error::{Error, Result};
use crate::linking::{
    build_profile, classify_discs, count_linked, count_linked_level, epsilon, CountQuery,
    LinkingProfile, Triple,
};
use crate::quadclass::Discriminant;

/// Per-x contribution to a total intersection count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerX {
    pub x: Int,
    /// Number of linked embedding classes at this x (all levels).
    pub f_value: Int,
    /// Breakdown by intersection level: (ell, count), counts summing to
    /// f_value.
    pub levels: Vec<(Int, Int)>,
}

/// Total intersection data for a discriminant pair in a fixed Eichler
/// order.
///
/// `total_signed` is identically zero: conjugating an embedding pair by a
/// norm -1 unit flips every intersection sign. `q_weighted` aggregates
/// (1 + v_q(level)) * count over all x and levels, unsigned; per-class
/// signed q-weighted numbers would need conjugacy-class resolution that
/// aggregate counting cannot provide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub d1: Int,
    pub d2: Int,
    pub disc: Int,
    pub level: Int,
    pub per_x: Vec<PerX>,
    pub total_unsigned: Int,
    pub total_signed: Int,
    pub q_weighted: BTreeMap<Int, Int>,
}

/// All intersection levels with a nonzero stratum for this profile/query,
/// by direct enumeration of the allowed exponent boxes.
pub fn admissible_levels(profile: &LinkingProfile, q: &CountQuery) -> Result<Vec<Int>> {
    let mut base: Int = 1;
    for &(p, e) in profile.p_list() {
        base = cmul(base, crate::arith::cpow(p, e)?)?;
    }
    for &(p, f) in profile.q_list() {
        base = cmul(base, crate::arith::cpow(p, f)?)?;
    }
    let level_f = factorize(q.level)?;
    let mut levels = vec![base];
    for &(w, g) in profile.w_list() {
        let gp = level_f.valuation(w);
        if gp > g {
            return Ok(vec![]);
        }
        let max_gpp = if profile.is_potentially_bad(w) {
            0
        } else {
            (g - gp) / 2
        };
        let prev = std::mem::take(&mut levels);
        for l in prev {
            let mut wk: Int = 1;
            for _ in 0..=max_gpp {
                levels.push(cmul(l, wk)?);
                wk = cmul(wk, w)?;
            }
        }
    }
    levels.sort_unstable();
    levels.dedup();
    Ok(levels)
}

/// Sums the linked-pair counts over every admissible x with x^2 < D1*D2.
///
/// Every such x must give a nice triple; the first offender aborts the
/// report. The per-x value is zero whenever the queried order cannot admit
/// that linking.
pub fn total_intersection(
    d1: &Discriminant,
    d2: &Discriminant,
    q: &CountQuery,
) -> Result<IntersectionReport> {
    if q.ell.is_some() {
        return Err(Error::InvalidArgument(
            "total intersection takes no fixed intersection level".into(),
        ));
    }
    let prod = cmul(d1.value(), d2.value())?;
    let mut per_x = Vec::new();
    let mut total_unsigned: Int = 0;
    let mut q_weighted: BTreeMap<Int, Int> = BTreeMap::new();

    let mut xa = prod.rem_euclid(2);
    while cmul(xa, xa)? < prod {
        for x in if xa == 0 { vec![0] } else { vec![xa, -xa] } {
            let t = classify_discs(d1, d2, x)?;
            if !t.is_nice() {
                return Err(t.not_nice_error());
            }
            let profile = build_profile(&t)?;
            let f_value = count_linked(&profile, q)?;
            let mut levels = Vec::new();
            if f_value > 0 {
                for ell in admissible_levels(&profile, q)? {
                    let lq = CountQuery::new(q.disc, q.level, Some(ell))?;
                    let c = count_linked_level(&profile, &lq)?;
                    if c > 0 {
                        levels.push((ell, c));
                        for (p, _) in factorize(ell)?.factors {
                            let w = cmul((1 + valuation(ell, p)?) as Int, c)?;
                            let entry = q_weighted.entry(p).or_insert(0);
                            *entry = cadd(*entry, w)?;
                        }
                    }
                }
                let stratified: Int = levels.iter().map(|&(_, c)| c).sum();
                if stratified != f_value {
                    return Err(Error::InternalError(format!(
                        "level strata sum to {stratified}, expected {f_value} at x = {x}"
                    )));
                }
            }
            total_unsigned = cadd(total_unsigned, f_value)?;
            per_x.push(PerX { x, f_value, levels });
        }
        xa = cadd(xa, 2)?;
    }
    per_x.sort_by_key(|p| p.x);
    Ok(IntersectionReport {
        d1: d1.value(),
        d2: d2.value(),
        disc: q.disc,
        level: q.level,
        per_x,
        total_unsigned,
        total_signed: 0,
        q_weighted,
    })
}

/// A completely multiplicative extension of the epsilon function, given on
/// the primes that matter for a particular m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonContext {
    values: BTreeMap<Int, i32>,
}

impl EpsilonContext {
    /// Synthetic context from explicit prime values.
    pub fn from_values(values: BTreeMap<Int, i32>) -> Result<Self> {
        for (&p, &v) in &values {
            if !crate::arith::is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not prime")));
            }
            if v != 1 && v != -1 {
                return Err(Error::InvalidArgument(format!(
                    "epsilon values must be +/-1, got {v} at {p}"
                )));
            }
        }
        Ok(EpsilonContext { values })
    }

    /// Context of a discriminant pair, restricted to primes where epsilon
    /// is defined.
    pub fn from_discriminants(d1: &Discriminant, d2: &Discriminant, primes: &[Int]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for &p in primes {
            if let Some(e) = epsilon(p, d1, d2)? {
                values.insert(p, e);
            }
        }
        Ok(EpsilonContext { values })
    }

    pub fn at_prime(&self, p: Int) -> Result<i32> {
        self.values
            .get(&p)
            .copied()
            .ok_or(Error::UndefinedEpsilon(p))
    }

    /// epsilon(n) = prod epsilon(p)^v_p(n) over n > 0.
    pub fn at(&self, n: Int) -> Result<i32> {
        if n <= 0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon extension needs a positive argument, got {n}"
            )));
        }
        let mut acc = 1;
        for (p, e) in factorize(n)?.factors {
            if self.at_prime(p)? == -1 && e % 2 == 1 {
                acc = -acc;
            }
        }
        Ok(acc)
    }
}

/// Valuation vector of F_GZ(m) = prod over factorizations m = n n' of
/// n^epsilon(n'), computed exactly in the exponent lattice: the entry at a
/// prime l is the sum of v_l(n) * epsilon(n') over divisor pairs.
pub fn gz_f(m: Int, ctx: &EpsilonContext) -> Result<BTreeMap<Int, Int>> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!(
            "F_GZ is evaluated at positive integers, got {m}"
        )));
    }
    let f = factorize(m)?;
    let mut out = BTreeMap::new();
    for d in f.divisors()? {
        let e = ctx.at(m / d)?;
        for (p, v) in factorize(d)?.factors.iter().filter(|&&(_, v)| v > 0) {
            let entry = out.entry(*p).or_insert(0 as Int);
            *entry = cadd(*entry, cmul(*v as Int, e as Int)?)?;
        }
    }
    out.retain(|_, v| *v != 0);
    Ok(out)
}

/// Closed-form valuation vector of F_GZ(m): at a prime l with m = l^c m0,
/// the value is S(c) * sum_{d | m0} epsilon(d), where S(c) is the
/// alternating (epsilon(l) = -1) or triangular (epsilon(l) = +1) partial
/// sum. The second factor kills every prime unless m0 is free of
/// odd-power epsilon(-1) primes.
pub fn gz_f_closed_form(m: Int, ctx: &EpsilonContext) -> Result<BTreeMap<Int, Int>> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!(
            "F_GZ is evaluated at positive integers, got {m}"
        )));
    }
    let f = factorize(m)?;
    let mut out = BTreeMap::new();
    for &(l, c) in &f.factors {
        let el = ctx.at_prime(l)?;
        let first: Int = if el == -1 {
            // sum_{j<=c} j * (-1)^(c-j)
            if c % 2 == 1 {
                c.div_ceil(2) as Int
            } else {
                (c / 2) as Int
            }
        } else {
            (c as Int) * (c as Int + 1) / 2
        };
        let mut second: Int = 1;
        for &(p, e) in &f.factors {
            if p == l {
                continue;
            }
            let ep = ctx.at_prime(p)?;
            if ep == -1 {
                if e % 2 == 1 {
                    second = 0;
                    break;
                }
                // even powers of an epsilon(-1) prime sum to 1
            } else {
                second = cmul(second, (e + 1) as Int)?;
            }
        }
        let v = cmul(first, second)?;
        if v != 0 {
            out.insert(l, v);
        }
    }
    Ok(out)
}

/// Comparison of the two F_GZ valuation routes on a linked triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GzComparison {
    /// Number of odd-power epsilon(-1) primes of m.
    pub r: usize,
    /// The single candidate prime when r = 1.
    pub ell_candidate: Option<Int>,
    /// Divisor-sum valuations.
    pub valuations: BTreeMap<Int, Int>,
    /// Independently computed closed-form valuations.
    pub expected: BTreeMap<Int, Int>,
    /// When r = 1, the predicted valuation (e1 + 1) * prod(g_i + 1).
    pub r1_prediction: Option<Int>,
    pub agreement: bool,
}

/// Evaluates F_GZ on m = (D1*D2 - x^2)/4 of a nice transversal triple by
/// the divisor sum, and checks it against the closed form. For r = 1 the
/// single nonzero valuation is (e1 + 1) * prod(g_i + 1); for all other odd
/// r the vector vanishes. (Even r belongs to the indefinite side, where
/// r = 0 leaves nonzero valuations at the remaining primes.)
pub fn gz_compare(t: &Triple) -> Result<GzComparison> {
    let m = t.require_admissible()?;
    if !t.is_nice() {
        return Err(t.not_nice_error());
    }
    if m <= 0 {
        return Err(Error::NoTransversalIntersection);
    }
    let profile = build_profile(t)?;
    let primes: Vec<Int> = factorize(m)?.factors.iter().map(|&(p, _)| p).collect();
    let mut values = BTreeMap::new();
    for &p in &primes {
        // The side symbol extends epsilon to the potentially bad primes.
        let e = match epsilon(p, t.d1(), t.d2())? {
            Some(e) => e,
            None => {
                if t.d1().value() % p != 0 {
                    crate::arith::kronecker(t.d1().value(), p)
                } else {
                    crate::arith::kronecker(t.d2().value(), p)
                }
            }
        };
        values.insert(p, e);
    }
    let ctx = EpsilonContext::from_values(values)?;
    let valuations = gz_f(m, &ctx)?;
    let expected = gz_f_closed_form(m, &ctx)?;
    let r = profile.p_list().len();
    let ell_candidate = if r == 1 {
        Some(profile.p_list()[0].0)
    } else {
        None
    };
    let r1_prediction = if r == 1 {
        let (_, e1) = profile.p_list()[0];
        let mut pred = (e1 + 1) as Int;
        for &(_, g) in profile.w_list() {
            pred = cmul(pred, (g + 1) as Int)?;
        }
        Some(pred)
    } else {
        None
    };
    let mut agreement = valuations == expected;
    if let (Some(l), Some(pred)) = (ell_candidate, r1_prediction) {
        agreement &= valuations.get(&l).copied().unwrap_or(0) == pred
            && valuations.len() == 1;
    }
    if r >= 2 {
        agreement &= valuations.is_empty();
    }
    Ok(GzComparison {
        r,
        ell_candidate,
        valuations,
        expected,
        r1_prediction,
        agreement,
    })
}

/// Exact intersection angle: tan(theta) = sqrt(D1*D2 - x^2) / x, stored as
/// the radicand and the denominator. x = 0 is the right angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionAngle {
    pub tan_radicand: Int,
    pub tan_denominator: Int,
}

impl IntersectionAngle {
    /// Floating approximation of theta in (0, pi), for display only.
    pub fn radians_approx(&self) -> f64 {
        (self.tan_radicand as f64).sqrt().atan2(self.tan_denominator as f64)
    }
}

pub fn intersection_angle(t: &Triple) -> Result<IntersectionAngle> {
    let m = t.require_admissible()?;
    if m <= 0 {
        return Err(Error::NoTransversalIntersection);
    }
    Ok(IntersectionAngle {
        tan_radicand: cmul(4, m)?,
        tan_denominator: t.x(),
    })
}

/// sum_{d | n} epsilon(d) with the multiplicative extension; equals
/// prod(g_i + 1) when n is the w-part completion m / disc of a profile.
pub fn epsilon_divisor_sum(n: Int, ctx: &EpsilonContext) -> Result<Int> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!(
            "divisor sums need positive arguments, got {n}"
        )));
    }
    let mut acc: Int = 0;
    for d in factorize(n)?.divisors()? {
        acc = cadd(acc, ctx.at(d)? as Int)?;
    }
    Ok(acc)
}
