//! Linking arithmetic for pairs of optimal embeddings: the epsilon
//! function, triple classification, the unique algebra admitting a given
//! linking, factorization profiles, and the counting formulas for linked
//! embedding pairs by Eichler discriminant, level and orientation.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{cadd, cmul, cpow, csub, factorize, gcd, kronecker, Factorization, Int};
use crate::error::{Error, Result};
use crate::quadclass::{make_discriminant, narrow_class_number, potentially_bad_primes, Discriminant};
use crate::quatalg::QuatAlgebra;
use crate::rat::rat;

/// A triple (D1, D2, x) of positive discriminants and a linking trace.
///
/// Admissible means x = D1*D2 mod 2 and x^2 != D1*D2; nice additionally
/// requires gcd(D1, D2, D1*D2 - x^2) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triple {
    d1: Discriminant,
    d2: Discriminant,
    x: Int,
    m: Option<Int>,
    admissible: bool,
    nice: bool,
}

impl Triple {
    pub fn d1(&self) -> &Discriminant {
        &self.d1
    }

    pub fn d2(&self) -> &Discriminant {
        &self.d2
    }

    pub fn x(&self) -> Int {
        self.x
    }

    /// (D1*D2 - x^2)/4, defined exactly when the triple is admissible.
    pub fn m(&self) -> Option<Int> {
        self.m
    }

    pub fn is_admissible(&self) -> bool {
        self.admissible
    }

    pub fn is_nice(&self) -> bool {
        self.nice
    }

    /// True when the geodesics meet transversely: x^2 < D1*D2.
    pub fn is_transversal(&self) -> bool {
        self.m.map(|m| m > 0).unwrap_or(false)
    }

    pub fn require_admissible(&self) -> Result<Int> {
        self.m.ok_or_else(|| {
            Error::InvalidTriple(format!(
                "({}, {}, {}) is not admissible",
                self.d1.value(),
                self.d2.value(),
                self.x
            ))
        })
    }

    pub fn not_nice_error(&self) -> Error {
        Error::NotNice {
            d1: self.d1.value(),
            d2: self.d2.value(),
            x: self.x,
        }
    }
}

/// Classifies (D1, D2, x), computing admissibility, niceness and m.
pub fn classify(d1: Int, d2: Int, x: Int) -> Result<Triple> {
    let d1 = make_discriminant(d1)?;
    let d2 = make_discriminant(d2)?;
    classify_discs(&d1, &d2, x)
}

pub fn classify_discs(d1: &Discriminant, d2: &Discriminant, x: Int) -> Result<Triple> {
    if d1.value() <= 0 || d2.value() <= 0 {
        return Err(Error::InvalidTriple(
            "both discriminants must be positive".into(),
        ));
    }
    let prod = cmul(d1.value(), d2.value())?;
    let x2 = cmul(x, x)?;
    let admissible = x.rem_euclid(2) == prod.rem_euclid(2) && x2 != prod;
    let (m, nice) = if admissible {
        let diff = csub(prod, x2)?;
        debug_assert_eq!(diff.rem_euclid(4), 0);
        let g = gcd(gcd(d1.value(), d2.value()), diff);
        (Some(diff / 4), g.abs() == 1)
    } else {
        (None, false)
    };
    Ok(Triple {
        d1: *d1,
        d2: *d2,
        x,
        m,
        admissible,
        nice,
    })
}

/// The epsilon function on primes.
///
/// Defined when p does not divide gcd(D1fund, D2fund) and
/// (D1fund*D2fund / p) != -1; then it is (D1fund/p) if that is nonzero,
/// otherwise (D2fund/p). Returns `None` where undefined.
pub fn epsilon(p: Int, d1: &Discriminant, d2: &Discriminant) -> Result<Option<i32>> {
    if p < 2 || !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let f1 = d1.fundamental_part();
    let f2 = d2.fundamental_part();
    if gcd(f1, f2) % p == 0 {
        return Ok(None);
    }
    if kronecker(cmul(f1, f2)?, p) == -1 {
        return Ok(None);
    }
    if f1 % p != 0 {
        Ok(Some(kronecker(f1, p)))
    } else {
        Ok(Some(kronecker(f2, p)))
    }
}

/// Classification symbol for a prime p dividing m of a nice triple: the
/// Kronecker symbol of whichever full discriminant p does not divide.
///
/// This agrees with `epsilon` wherever epsilon is defined, and extends it
/// to the potentially bad primes where the two fundamental readings of
/// epsilon disagree (there the non-divisible side is the one that controls
/// the local order structure).
fn side_symbol(p: Int, t: &Triple) -> Result<i32> {
    if t.d1.value() % p != 0 {
        Ok(kronecker(t.d1.value(), p))
    } else if t.d2.value() % p != 0 {
        Ok(kronecker(t.d2.value(), p))
    } else {
        Err(Error::InternalError(format!(
            "prime {p} divides both discriminants of a nice triple"
        )))
    }
}

/// The factorization of m = (D1*D2 - x^2)/4 split into prime classes:
/// `p_list` holds (p_i, e_i) with symbol -1 and exponent 2e_i + 1,
/// `q_list` holds (q_i, f_i) with symbol -1 and exponent 2f_i, and
/// `w_list` holds (w_i, g_i) with symbol +1 and exponent g_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkingProfile {
    triple: Triple,
    m_sign: i32,
    p_list: Vec<(Int, u32)>,
    q_list: Vec<(Int, u32)>,
    w_list: Vec<(Int, u32)>,
    pb: BTreeSet<Int>,
    candidate_disc: Int,
}

impl LinkingProfile {
    pub fn triple(&self) -> &Triple {
        &self.triple
    }

    pub fn m_sign(&self) -> i32 {
        self.m_sign
    }

    pub fn p_list(&self) -> &[(Int, u32)] {
        &self.p_list
    }

    pub fn q_list(&self) -> &[(Int, u32)] {
        &self.q_list
    }

    pub fn w_list(&self) -> &[(Int, u32)] {
        &self.w_list
    }

    /// Potentially bad primes of the discriminant pair.
    pub fn potentially_bad(&self) -> &BTreeSet<Int> {
        &self.pb
    }

    pub fn is_potentially_bad(&self, p: Int) -> bool {
        self.pb.contains(&p)
    }

    /// The unique quaternion discriminant that can admit this linking:
    /// the product of the p_i.
    pub fn candidate_disc(&self) -> Int {
        self.candidate_disc
    }
}

/// Builds the linking profile of a nice triple.
pub fn build_profile(t: &Triple) -> Result<LinkingProfile> {
    let m = t.require_admissible()?;
    if !t.nice {
        return Err(t.not_nice_error());
    }
    let f = factorize(m)?;
    let mut p_list = Vec::new();
    let mut q_list = Vec::new();
    let mut w_list = Vec::new();
    let mut candidate_disc: Int = 1;
    for &(p, c) in &f.factors {
        let sym = side_symbol(p, t)?;
        debug_assert!(sym == 1 || sym == -1);
        if let Some(eps) = epsilon(p, &t.d1, &t.d2)? {
            debug_assert_eq!(eps, sym, "epsilon disagrees with side symbol at {p}");
        }
        if sym == -1 {
            if c % 2 == 1 {
                p_list.push((p, (c - 1) / 2));
                candidate_disc = cmul(candidate_disc, p)?;
            } else {
                q_list.push((p, c / 2));
            }
        } else {
            w_list.push((p, c));
        }
    }
    // The admitting algebra is indefinite and ramifies exactly at the
    // p_i, so their number is even.
    if p_list.len() % 2 != 0 {
        return Err(Error::InternalError(format!(
            "odd number of ramified primes {p_list:?} for ({}, {}, {})",
            t.d1.value(),
            t.d2.value(),
            t.x
        )));
    }
    Ok(LinkingProfile {
        triple: *t,
        m_sign: f.sign,
        p_list,
        q_list,
        w_list,
        pb: potentially_bad_primes(&t.d1, &t.d2)?,
        candidate_disc,
    })
}

/// Finite ramified places of the unique algebra (D1, x^2 - D1*D2)
/// admitting x-linked embeddings. Works for any admissible triple, nice or
/// not, by direct Hilbert-symbol evaluation.
pub fn ramified_set(t: &Triple) -> Result<BTreeSet<Int>> {
    let m = t.require_admissible()?;
    let b = cmul(-4, m)?; // x^2 - D1*D2
    let alg = QuatAlgebra::new(rat(t.d1.value()), rat(b))?;
    debug_assert!(alg.is_indefinite());
    Ok(alg.ramified_primes())
}

/// One x value of a discriminant pair, with the data needed to choose an
/// Eichler order admitting that linking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XCandidate {
    pub x: Int,
    pub nice: bool,
    /// Ramified primes of the admitting algebra (= its discriminant).
    pub ramified: BTreeSet<Int>,
    /// Eichler levels admitting optimal linked pairs, for nice triples:
    /// all divisors of the w-part of m.
    pub levels: Option<Vec<Int>>,
}

/// Enumerates nonnegative admissible x with x^2 < D1*D2 (negating x fixes
/// the algebra and counts, so only representatives are listed) together
/// with each one's ramification class and admissible Eichler levels.
pub fn candidate_orders(d1: &Discriminant, d2: &Discriminant) -> Result<Vec<XCandidate>> {
    if d1.value() <= 0 || d2.value() <= 0 {
        return Err(Error::InvalidTriple(
            "both discriminants must be positive".into(),
        ));
    }
    let prod = cmul(d1.value(), d2.value())?;
    let mut out = Vec::new();
    let mut x = prod.rem_euclid(2);
    while cmul(x, x)? < prod {
        let t = classify_discs(d1, d2, x)?;
        debug_assert!(t.is_admissible());
        let ramified = ramified_set(&t)?;
        let levels = if t.is_nice() {
            let profile = build_profile(&t)?;
            let mut w_part = Factorization {
                sign: 1,
                factors: profile.w_list.clone(),
            };
            w_part.factors.retain(|&(_, g)| g > 0);
            Some(w_part.divisors()?)
        } else {
            None
        };
        out.push(XCandidate {
            x,
            nice: t.is_nice(),
            ramified,
            levels,
        });
        x = cadd(x, 2)?;
    }
    Ok(out)
}

/// An Eichler-order query: quaternion discriminant, Eichler level, and an
/// optional intersection level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountQuery {
    pub disc: Int,
    pub level: Int,
    pub ell: Option<Int>,
}

impl CountQuery {
    pub fn new(disc: Int, level: Int, ell: Option<Int>) -> Result<Self> {
        if disc < 1 {
            return Err(Error::InvalidOrder(format!(
                "quaternion discriminant must be positive, got {disc}"
            )));
        }
        let f = factorize(disc)?;
        if !f.is_squarefree() || f.omega() % 2 != 0 {
            return Err(Error::InvalidOrder(format!(
                "{disc} is not a squarefree product of an even number of primes"
            )));
        }
        if level < 1 {
            return Err(Error::InvalidArgument(format!(
                "Eichler level must be positive, got {level}"
            )));
        }
        if gcd(disc, level) != 1 {
            return Err(Error::InvalidOrder(format!(
                "discriminant {disc} and level {level} are not coprime"
            )));
        }
        if let Some(l) = ell {
            if l < 1 {
                return Err(Error::InvalidArgument(format!(
                    "intersection level must be positive, got {l}"
                )));
            }
        }
        Ok(CountQuery { disc, level, ell })
    }
}

/// Per-prime Eichler-order count at a symbol-(+1) prime with m-exponent g
/// and level exponent g', before intersection levels are fixed:
/// g + 1 - g' generically, constrained to 2 or 1 at potentially bad primes.
pub fn total_factor(g: u32, g_prime: u32, pb: bool) -> Result<Int> {
    if g_prime > g {
        return Err(Error::InvalidArgument(format!(
            "level exponent {g_prime} exceeds m-exponent {g}"
        )));
    }
    Ok(if !pb {
        (g + 1 - g_prime) as Int
    } else if g_prime < g {
        2
    } else {
        1
    })
}

/// Per-prime count of Eichler orders realizing intersection-level exponent
/// g'' over level exponent g': 2 while 2g'' < g - g', 1 at the floor.
pub fn level_factor(g: u32, g_prime: u32, g_dprime: u32, pb: bool) -> Result<Int> {
    if g_prime > g {
        return Err(Error::InvalidArgument(format!(
            "level exponent {g_prime} exceeds m-exponent {g}"
        )));
    }
    if 2 * g_dprime > g - g_prime {
        return Err(Error::InvalidArgument(format!(
            "intersection exponent {g_dprime} too large for g={g}, g'={g_prime}"
        )));
    }
    if pb && g_dprime != 0 {
        return Err(Error::InvalidArgument(
            "potentially bad primes admit only intersection exponent 0".into(),
        ));
    }
    Ok(if 2 * g_dprime < g - g_prime { 2 } else { 1 })
}

fn omega_disc_level(q: &CountQuery) -> Result<u32> {
    Ok((factorize(q.disc)?.omega() + factorize(q.level)?.omega()) as u32)
}

/// Checks conditions (a)-(c) for non-emptiness: the query discriminant is
/// the product of the p_i, none of the p_i or q_i are potentially bad, and
/// the level is supported on the w_i with exponents at most g_i. Returns
/// the per-w level exponents g'_i when satisfied.
fn admissible_level_exponents(profile: &LinkingProfile, q: &CountQuery) -> Result<Option<Vec<u32>>> {
    if q.disc != profile.candidate_disc {
        return Ok(None);
    }
    for &(p, _) in profile.p_list.iter().chain(profile.q_list.iter()) {
        if profile.is_potentially_bad(p) {
            return Ok(None);
        }
    }
    let level_f = factorize(q.level)?;
    let w_primes: BTreeSet<Int> = profile.w_list.iter().map(|&(w, _)| w).collect();
    for &(p, _) in &level_f.factors {
        if !w_primes.contains(&p) {
            return Ok(None);
        }
    }
    let mut exps = Vec::with_capacity(profile.w_list.len());
    for &(w, g) in &profile.w_list {
        let gp = level_f.valuation(w);
        if gp > g {
            return Ok(None);
        }
        exps.push(gp);
    }
    Ok(Some(exps))
}

/// Number of equivalence classes of x-linked optimal embedding pairs into
/// an Eichler order of the queried discriminant and level (all
/// intersection levels together).
///
/// Zero unless the query discriminant equals the product of the p_i, no
/// p_i or q_i is potentially bad, and the level divides the w-part with
/// per-prime slack; then 2^(omega(disc*level)+1) times the per-w factors.
pub fn count_linked(profile: &LinkingProfile, q: &CountQuery) -> Result<Int> {
    if q.ell.is_some() {
        return Err(Error::InvalidArgument(
            "count_linked takes no intersection level; use count_linked_level".into(),
        ));
    }
    let exps = match admissible_level_exponents(profile, q)? {
        Some(e) => e,
        None => return Ok(0),
    };
    let mut count = cpow(2, omega_disc_level(q)? + 1)?;
    for (&(w, g), &gp) in profile.w_list.iter().zip(&exps) {
        count = cmul(count, total_factor(g, gp, profile.is_potentially_bad(w))?)?;
    }
    Ok(count)
}

/// Number of classes of x-linked optimal pairs of intersection level
/// exactly ell: 2^(omega(disc*level)+n+1) when ell matches the forced
/// shape, 0 otherwise.
pub fn count_linked_level(profile: &LinkingProfile, q: &CountQuery) -> Result<Int> {
    let n = match level_stratum(profile, q)? {
        Some(n) => n,
        None => return Ok(0),
    };
    cpow(2, omega_disc_level(q)? + n + 1)
}

/// The stratum parameter n (number of strict per-prime inequalities) for a
/// query with intersection level, or None when the stratum is empty.
fn level_stratum(profile: &LinkingProfile, q: &CountQuery) -> Result<Option<u32>> {
    let ell = q.ell.ok_or_else(|| {
        Error::InvalidArgument("count_linked_level requires an intersection level".into())
    })?;
    let exps = match admissible_level_exponents(profile, q)? {
        Some(e) => e,
        None => return Ok(None),
    };
    let ell_f = factorize(ell)?;
    // The p- and q-parts of ell are forced exactly.
    for &(p, e) in &profile.p_list {
        if ell_f.valuation(p) != e {
            return Ok(None);
        }
    }
    for &(p, f) in &profile.q_list {
        if ell_f.valuation(p) != f {
            return Ok(None);
        }
    }
    let known: BTreeSet<Int> = profile
        .p_list
        .iter()
        .chain(profile.q_list.iter())
        .chain(profile.w_list.iter())
        .map(|&(p, _)| p)
        .collect();
    for &(p, _) in &ell_f.factors {
        if !known.contains(&p) {
            return Ok(None);
        }
    }
    let mut n = 0;
    for (&(w, g), &gp) in profile.w_list.iter().zip(&exps) {
        let gpp = ell_f.valuation(w);
        if 2 * gpp > g - gp {
            return Ok(None);
        }
        if profile.is_potentially_bad(w) && gpp != 0 {
            return Ok(None);
        }
        if 2 * gpp < g - gp {
            n += 1;
        }
    }
    Ok(Some(n))
}

/// Count per orientation pair: 2^n with positive sign when x^2 < D1*D2,
/// 2^(n+1) without a sign otherwise; 0 when the stratum is empty.
///
/// Requires gcd(level, D1*D2) = 1, the hypothesis under which the total
/// count distributes evenly over the 2^omega(disc*level) orientation pairs
/// admitting this x.
pub fn count_oriented_positive(profile: &LinkingProfile, q: &CountQuery) -> Result<Int> {
    let t = profile.triple();
    let prod = cmul(t.d1().value(), t.d2().value())?;
    if gcd(q.level, prod) != 1 {
        return Err(Error::UnsupportedByCorollary(format!(
            "level {} shares a factor with D1*D2 = {prod}",
            q.level
        )));
    }
    let n = match level_stratum(profile, q)? {
        Some(n) => n,
        None => return Ok(0),
    };
    if t.is_transversal() {
        cpow(2, n)
    } else {
        cpow(2, n + 1)
    }
}

/// Splits an even total into equal positive and negative sign counts.
pub fn sign_split(total: Int, t: &Triple) -> Result<(Int, Int)> {
    t.require_admissible()?;
    if !t.is_transversal() {
        return Err(Error::NoSignDefined);
    }
    if total < 0 || total % 2 != 0 {
        return Err(Error::InternalError(format!(
            "sign splitting requires an even nonnegative total, got {total}"
        )));
    }
    Ok((total / 2, total / 2))
}

/// Groups the admissible x values realized by a given Eichler order by
/// residue modulo 2*disc*level: every orientation pair confines its x
/// values to a single class.
pub fn x_congruence_classes(
    d1: &Discriminant,
    d2: &Discriminant,
    q: &CountQuery,
) -> Result<BTreeMap<Int, Vec<Int>>> {
    let prod = cmul(d1.value(), d2.value())?;
    let modulus = cmul(2, cmul(q.disc, q.level)?)?;
    let disc_primes: BTreeSet<Int> = factorize(q.disc)?.factors.iter().map(|&(p, _)| p).collect();
    let mut classes: BTreeMap<Int, Vec<Int>> = BTreeMap::new();
    let mut x = prod.rem_euclid(2);
    loop {
        let x2 = cmul(x, x)?;
        if x2 >= prod {
            break;
        }
        for signed in if x == 0 { vec![0] } else { vec![x, -x] } {
            let t = classify_discs(d1, d2, signed)?;
            if !t.is_nice() {
                continue;
            }
            if ramified_set(&t)? != disc_primes {
                continue;
            }
            let profile = build_profile(&t)?;
            if admissible_level_exponents(&profile, q)?.is_none() {
                continue;
            }
            classes
                .entry(signed.rem_euclid(modulus))
                .or_default()
                .push(signed);
        }
        x = cadd(x, 2)?;
    }
    for xs in classes.values_mut() {
        xs.sort_unstable();
    }
    Ok(classes)
}

/// Total number of equivalence classes of optimal embeddings of the order
/// of discriminant D into an Eichler order of the given quaternion
/// discriminant and level: the narrow class number times local factors.
pub fn count_embedding_classes(disc: Int, level: Int, d: &Discriminant) -> Result<Int> {
    let q = CountQuery::new(disc, level, None)?;
    if gcd(d.value(), q.level) != 1 {
        return Err(Error::UnsupportedLevel(format!(
            "discriminant {} shares a factor with the Eichler level {}",
            d.value(),
            q.level
        )));
    }
    let mut count = narrow_class_number(d)?;
    // Place at infinity: indefinite algebras embed both orientations of a
    // negative discriminant, one of a positive.
    if d.value() < 0 {
        count = cmul(count, 2)?;
    }
    for (p, _) in factorize(q.disc)?.factors {
        if d.conductor() % p == 0 {
            return Ok(0);
        }
        count = cmul(count, (1 - kronecker(d.value(), p)) as Int)?;
    }
    for (p, _) in factorize(q.level)?.factors {
        count = cmul(count, (1 + kronecker(d.value(), p)) as Int)?;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: Int) -> Discriminant {
        make_discriminant(n).unwrap()
    }

    #[test]
    fn classify_examples() {
        let t = classify(5, 381, 3).unwrap();
        assert!(t.is_admissible() && t.is_nice());
        assert_eq!(t.m(), Some(474));

        let t = classify(5, 381, 2).unwrap();
        assert!(!t.is_admissible());

        let t = classify(20, 68, 2).unwrap();
        assert!(t.is_admissible());
        assert!(!t.is_nice());

        assert!(classify(7, 5, 1).is_err());
        assert!(classify(-4, 5, 1).is_err());
    }

    #[test]
    fn epsilon_table_for_5_381() {
        let d1 = disc(5);
        let d2 = disc(381);
        let expected = [
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
        for (p, e) in expected {
            assert_eq!(epsilon(p, &d1, &d2).unwrap(), Some(e), "epsilon({p})");
        }
        // Undefined at the primes the table omits.
        for p in [11, 13, 23, 37, 41, 53, 71, 73, 83] {
            assert_eq!(epsilon(p, &d1, &d2).unwrap(), None, "epsilon({p})");
        }
    }

    #[test]
    fn epsilon_other_examples() {
        assert_eq!(epsilon(5, &disc(73), &disc(937)).unwrap(), Some(-1));
        // 3 divides 2736; epsilon falls through to the other side.
        assert_eq!(epsilon(3, &disc(241), &disc(2736)).unwrap(), Some(1));
        // 2 divides both fundamental parts of 8 and 12.
        assert_eq!(epsilon(2, &disc(8), &disc(12)).unwrap(), None);
        assert!(epsilon(4, &disc(5), &disc(381)).is_err());
    }

    #[test]
    fn profiles_of_worked_examples() {
        let t = classify(73, 937, 89).unwrap();
        let pr = build_profile(&t).unwrap();
        assert_eq!(pr.p_list(), &[(5, 0), (7, 0)]);
        assert_eq!(pr.q_list(), &[]);
        assert_eq!(pr.w_list(), &[(2, 4), (3, 3)]);
        assert_eq!(pr.candidate_disc(), 35);
        assert!(pr.potentially_bad().is_empty());

        let t = classify(241, 2736, 324).unwrap();
        let pr = build_profile(&t).unwrap();
        assert_eq!(pr.p_list(), &[(7, 0), (11, 0)]);
        assert_eq!(pr.q_list(), &[]);
        assert_eq!(pr.w_list(), &[(2, 3), (3, 2), (5, 2)]);
        assert_eq!(pr.candidate_disc(), 77);
        assert_eq!(
            pr.potentially_bad().iter().copied().collect::<Vec<_>>(),
            vec![2, 3]
        );

        // 464 = 2^4 * 29 with symbol(2) = -1, symbol(29) = +1.
        let t = classify(5, 381, 7).unwrap();
        let pr = build_profile(&t).unwrap();
        assert_eq!(pr.p_list(), &[]);
        assert_eq!(pr.q_list(), &[(2, 2)]);
        assert_eq!(pr.w_list(), &[(29, 1)]);
        assert_eq!(pr.candidate_disc(), 1);

        let t = classify(20, 68, 2).unwrap();
        assert_eq!(build_profile(&t), Err(t.not_nice_error()));
    }

    #[test]
    fn profile_with_undefined_epsilon_at_bad_prime() {
        // (45, 13, 3) is nice, 3 | m = 144, and epsilon(3) is undefined
        // because (5/3) = -1 disagrees with (13/3) = +1. The side symbol
        // resolves it through D2 = 13, making 3 a w-prime.
        let t = classify(45, 13, 3).unwrap();
        assert!(t.is_nice());
        assert_eq!(t.m(), Some(144));
        assert_eq!(epsilon(3, t.d1(), t.d2()).unwrap(), None);
        let pr = build_profile(&t).unwrap();
        assert_eq!(pr.q_list(), &[(2, 2)]);
        assert_eq!(pr.w_list(), &[(3, 2)]);
        assert!(pr.is_potentially_bad(3));
        // Ramification agrees: no p-primes, so the algebra splits everywhere.
        assert!(ramified_set(&t).unwrap().is_empty());
    }

    #[test]
    fn ramified_sets_table2() {
        let d1 = disc(5);
        let d2 = disc(381);
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
        for (ram, xs) in table {
            for &x in *xs {
                let t = classify_discs(&d1, &d2, x).unwrap();
                let got: Vec<Int> = ramified_set(&t).unwrap().into_iter().collect();
                assert_eq!(&got, ram, "x = {x}");
            }
        }

        let t = classify(73, 937, 89).unwrap();
        let got: Vec<Int> = ramified_set(&t).unwrap().into_iter().collect();
        assert_eq!(got, vec![5, 7]);
    }

    #[test]
    fn candidate_orders_examples() {
        let cands = candidate_orders(&disc(5), &disc(381)).unwrap();
        assert_eq!(cands.len(), 22); // odd x from 1 to 43
        let x3 = cands.iter().find(|c| c.x == 3).unwrap();
        assert_eq!(x3.levels.as_deref(), Some(&[1, 79][..]));
        let x89 = candidate_orders(&disc(73), &disc(937))
            .unwrap()
            .into_iter()
            .find(|c| c.x == 89)
            .unwrap();
        let levels = x89.levels.unwrap();
        assert_eq!(levels.len(), 20); // divisors of 2^4 * 3^3
        assert!(levels.iter().all(|l| (2 as Int).pow(4) * 27 % l == 0));
    }

    #[test]
    fn count_linked_examples() {
        let pr = build_profile(&classify(73, 937, 89).unwrap()).unwrap();
        let q = CountQuery::new(35, 1, None).unwrap();
        assert_eq!(count_linked(&pr, &q).unwrap(), 160);

        let pr = build_profile(&classify(5, 381, 3).unwrap()).unwrap();
        let q = CountQuery::new(6, 79, None).unwrap();
        assert_eq!(count_linked(&pr, &q).unwrap(), 16);
        let q = CountQuery::new(10, 1, None).unwrap();
        assert_eq!(count_linked(&pr, &q).unwrap(), 0);
    }

    #[test]
    fn count_linked_level_examples() {
        let pr = build_profile(&classify(73, 937, 89).unwrap()).unwrap();
        let q = CountQuery::new(35, 1, Some(12)).unwrap();
        assert_eq!(count_linked_level(&pr, &q).unwrap(), 16);
        let q = CountQuery::new(35, 1, Some(5)).unwrap();
        assert_eq!(count_linked_level(&pr, &q).unwrap(), 0);

        let pr = build_profile(&classify(241, 2736, 324).unwrap()).unwrap();
        let q = CountQuery::new(77, 1, Some(5)).unwrap();
        assert_eq!(count_linked_level(&pr, &q).unwrap(), 32);
        // Potentially bad primes cannot enter the intersection level.
        let q = CountQuery::new(77, 1, Some(2)).unwrap();
        assert_eq!(count_linked_level(&pr, &q).unwrap(), 0);
    }

    #[test]
    fn oriented_positive_tables_4_and_9() {
        let pr = build_profile(&classify(73, 937, 89).unwrap()).unwrap();
        for (level, expect) in [
            (1, [(1, 4), (2, 4), (3, 4), (4, 2), (6, 4), (12, 2)]),
            (3, [(1, 4), (2, 4), (3, 2), (4, 2), (6, 2), (12, 1)]),
        ] {
            for (ell, count) in expect {
                let q = CountQuery::new(35, level, Some(ell)).unwrap();
                assert_eq!(
                    count_oriented_positive(&pr, &q).unwrap(),
                    count,
                    "level {level}, ell {ell}"
                );
            }
        }

        let pr = build_profile(&classify(241, 2736, 324).unwrap()).unwrap();
        for (ell, count) in [(1, 8), (5, 4)] {
            let q = CountQuery::new(77, 1, Some(ell)).unwrap();
            assert_eq!(count_oriented_positive(&pr, &q).unwrap(), count);
        }
        // Levels containing potentially bad primes are empty strata.
        for ell in [2, 3, 6, 10, 15, 30] {
            let q = CountQuery::new(77, 1, Some(ell)).unwrap();
            assert_eq!(count_oriented_positive(&pr, &q).unwrap(), 0);
        }

        // The corollary refuses levels sharing factors with D1*D2.
        let pr = build_profile(&classify(73, 937, 89).unwrap()).unwrap();
        let q = CountQuery::new(35, 73, Some(1)).unwrap();
        assert!(matches!(
            count_oriented_positive(&pr, &q),
            Err(Error::UnsupportedByCorollary(_))
        ));
    }

    #[test]
    fn oriented_count_beyond_transversality() {
        // x^2 > D1*D2 has no sign; the per-orientation count is 2^(n+1).
        // (5, 381, 45): m = -30 = -(2 * 3 * 5), disc 6, single level 1, n = 1.
        let t = classify(5, 381, 45).unwrap();
        assert!(t.is_admissible() && t.is_nice() && !t.is_transversal());
        let pr = build_profile(&t).unwrap();
        assert_eq!(pr.m_sign(), -1);
        assert_eq!(pr.candidate_disc(), 6);
        let q = CountQuery::new(6, 1, Some(1)).unwrap();
        assert_eq!(count_linked_level(&pr, &q).unwrap(), 16);
        assert_eq!(count_oriented_positive(&pr, &q).unwrap(), 4);
    }

    #[test]
    fn sign_split_examples() {
        let t = classify(5, 381, 3).unwrap();
        assert_eq!(sign_split(16, &t).unwrap(), (8, 8));
        assert!(matches!(sign_split(15, &t), Err(Error::InternalError(_))));
        // x^2 > D1*D2: no sign.
        let t = classify(5, 381, 45).unwrap();
        assert_eq!(sign_split(4, &t), Err(Error::NoSignDefined));
    }

    #[test]
    fn x_classes_examples() {
        let q = CountQuery::new(6, 1, None).unwrap();
        let classes = x_congruence_classes(&disc(5), &disc(381), &q).unwrap();
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[&3], vec![-21, -9, 3, 27, 39]);
        assert_eq!(classes[&9], vec![-39, -27, -3, 9, 21]);

        let q = CountQuery::new(35, 1, None).unwrap();
        let classes = x_congruence_classes(&disc(73), &disc(937), &q).unwrap();
        let class_of_89 = classes
            .values()
            .find(|xs| xs.contains(&89))
            .expect("89 appears");
        assert!(class_of_89.contains(&-121), "89 = -121 mod 210");
    }

    #[test]
    fn embedding_class_counts() {
        assert_eq!(count_embedding_classes(6, 1, &disc(5)).unwrap(), 4);
        assert_eq!(count_embedding_classes(6, 1, &disc(381)).unwrap(), 4);
        assert_eq!(count_embedding_classes(35, 1, &disc(73)).unwrap(), 4);
        assert_eq!(count_embedding_classes(35, 1, &disc(937)).unwrap(), 4);
        assert_eq!(count_embedding_classes(35, 3, &disc(73)).unwrap(), 8);
        assert_eq!(count_embedding_classes(35, 3, &disc(937)).unwrap(), 8);
        assert!(matches!(
            count_embedding_classes(35, 73, &disc(73)),
            Err(Error::UnsupportedLevel(_))
        ));
        assert!(matches!(
            count_embedding_classes(30, 1, &disc(5)),
            Err(Error::InvalidOrder(_))
        ));
        assert!(matches!(
            count_embedding_classes(12, 1, &disc(5)),
            Err(Error::InvalidOrder(_))
        ));
    }
}
