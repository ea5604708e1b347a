//! Independent brute-force verifiers: exhaustive interval counting on the
//! Bruhat-Tits tree for local Eichler-superorder counts, and p-adic
//! solubility searches with Hensel lift certificates for the Pell and
//! Hilbert criteria.

use crate::arith::{cmul, is_prime, kronecker, valuation, Int};
use crate::error::{Error, Result};
use crate::quadclass::Discriminant;

/// Counts Eichler superorders realizing a prescribed intersection level by
/// exhaustive enumeration in the interval model of the Bruhat-Tits tree.
///
/// A local Eichler order of level w^g is the intersection of two maximal
/// orders at distance g in the tree; its superorders correspond to the
/// subintervals of the path [0, g], with order containment REVERSING path
/// containment:
///
/// ```text
///   level w^g      [0,g]        the base order, the whole path
///   level w^(g-1)  [0,g-1], [1,g]
///   ...            ...
///   level w^0      [a,a]        maximal orders = single vertices
/// ```
///
/// An interval of length g' (an order of level w^g') realizes intersection
/// level exponent g'' iff it lies inside the centered interval
/// [g'', g-g''] but not inside [g''+1, g-g''-1]. A potentially bad prime
/// additionally forbids containing the order [1, g-1], which kills
/// optimality.
pub fn tree_count(g: u32, g_prime: u32, g_dprime: u32, pb: bool) -> Result<u64> {
    if g_prime > g {
        return Err(Error::InvalidArgument(format!(
            "interval length {g_prime} exceeds path length {g}"
        )));
    }
    if 2 * g_dprime > g - g_prime {
        return Err(Error::InvalidArgument(format!(
            "centered interval [{g_dprime}, {g}-{g_dprime}] cannot hold length {g_prime}"
        )));
    }
    if pb && g_dprime != 0 {
        return Err(Error::InvalidArgument(
            "potentially bad primes force intersection exponent 0".into(),
        ));
    }
    let inside = |lo: i64, hi: i64, a: i64, b: i64| lo <= a && b <= hi;
    let (g, gp, gpp) = (g as i64, g_prime as i64, g_dprime as i64);
    let mut count = 0;
    for a in 0..=(g - gp) {
        let b = a + gp;
        if !inside(gpp, g - gpp, a, b) {
            continue;
        }
        if inside(gpp + 1, g - gpp - 1, a, b) {
            continue;
        }
        if pb && inside(1, g - 1, a, b) {
            continue;
        }
        count += 1;
    }
    Ok(count)
}

/// Closed-form criterion for X^2 - D Y^2 = A to be soluble over Z_p, for
/// D a positive discriminant coprime to p: a split prime works unless
/// p = 2 sees v(A) = 1, and an inert prime needs v_p(A) even.
pub fn pell_soluble(d: &Discriminant, a: Int, p: Int) -> Result<bool> {
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("A must be nonzero".into()));
    }
    if d.value() <= 0 || d.value() % p == 0 {
        return Err(Error::InvalidArgument(format!(
            "criterion requires a positive discriminant coprime to {p}"
        )));
    }
    let v = valuation(a, p)?;
    Ok(match kronecker(d.value(), p) {
        1 => p != 2 || v != 1,
        -1 => v % 2 == 0,
        _ => unreachable!("p does not divide D"),
    })
}

/// Memory guard for the search tables.
const MAX_MODULUS: u64 = 1 << 26;

struct SquareTable {
    modulus: u64,
    /// For each residue s, a witness x of minimal p-valuation with
    /// scale * x^2 = s (mod modulus), or u32::MAX.
    witness: Vec<u32>,
}

impl SquareTable {
    fn build(p: u64, modulus: u64, scale: u64) -> SquareTable {
        let mut witness = vec![u32::MAX; modulus as usize];
        // Enumerate x by ascending p-valuation so that the first write per
        // residue is the minimal-valuation witness.
        let mut step = 1u64;
        while step < modulus {
            let mut x = step;
            while x < modulus {
                if !(x / step).is_multiple_of(p) {
                    let s = (scale * ((x * x) % modulus)) % modulus;
                    if witness[s as usize] == u32::MAX {
                        witness[s as usize] = x as u32;
                    }
                }
                x += step;
            }
            step *= p;
        }
        if witness[0] == u32::MAX {
            witness[0] = 0;
        }
        SquareTable { modulus, witness }
    }

    fn lookup(&self, s: u64) -> Option<u64> {
        debug_assert!(s < self.modulus);
        match self.witness[s as usize] {
            u32::MAX => None,
            w => Some(w as u64),
        }
    }
}

/// Unit square tables (scale = 1) keyed by modulus; shared across calls
/// since grid sweeps reuse the same p^K constantly. Synchronized and
/// invisible to callers; only modest tables are retained.
fn unit_square_table(p: u64, modulus: u64) -> std::sync::Arc<SquareTable> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    type Cache = Mutex<HashMap<(u64, u64), Arc<SquareTable>>>;
    const CACHE_LIMIT: u64 = 4_000_000;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    if modulus > CACHE_LIMIT {
        return Arc::new(SquareTable::build(p, modulus, 1));
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((p, modulus))
        .or_insert_with(|| Arc::new(SquareTable::build(p, modulus, 1)))
        .clone()
}

/// A partial derivative certifies a Hensel lift when its valuation v
/// satisfies K > 2v; the representative's valuation is exact below K.
fn certifies(k: u32, p: u64, derivative: u64) -> bool {
    if derivative == 0 {
        return false;
    }
    let mut d = derivative;
    let mut v = 0;
    while d.is_multiple_of(p) {
        d /= p;
        v += 1;
    }
    k > 2 * v
}

fn pow_checked(p: Int, k: u32) -> Result<u64> {
    let mut m: u64 = 1;
    for _ in 0..k {
        m = m
            .checked_mul(p as u64)
            .filter(|&m| m <= MAX_MODULUS)
            .ok_or(Error::PrecisionInsufficient)?;
    }
    Ok(m)
}

/// Largest feasible precision in [lo, hi], or None when even p^lo
/// overflows the table budget.
fn feasible_k(p: Int, lo: u32, hi: u32) -> Option<u32> {
    (lo..=hi).rev().find(|&k| pow_checked(p, k).is_ok())
}

/// Brute-force search for X^2 - D Y^2 = A over Z_p at precision p^K.
///
/// Every hit modulo p^K is tested for a Hensel certificate (a partial
/// derivative of valuation below K/2); a certified hit proves solubility,
/// exhaustion disproves it (a true solution would reduce to a hit), and
/// uncertified hits alone report PrecisionInsufficient so the caller can
/// raise K.
pub fn pell_soluble_bruteforce(d: &Discriminant, a: Int, p: Int, k: u32) -> Result<bool> {
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("A must be nonzero".into()));
    }
    let min_k = valuation(cmul(4, a)?, p)? + 3;
    if k < min_k {
        return Err(Error::InvalidArgument(format!(
            "precision {k} below the sound minimum {min_k}"
        )));
    }
    let m = pow_checked(p, k)?;
    let pu = p as u64;
    let squares = unit_square_table(pu, m);
    let du = d.value().rem_euclid(m as Int) as u64;
    let au = a.rem_euclid(m as Int) as u64;
    let mut saw_hit = false;
    for y in 0..m {
        let t = (au + du * ((y * y) % m) % m) % m;
        if let Some(x) = squares.lookup(t) {
            saw_hit = true;
            // d/dX = 2X, d/dY = -2DY.
            if certifies(k, pu, (2 * x) % m) || certifies(k, pu, (2 * du % m * y) % m) {
                return Ok(true);
            }
        }
    }
    if saw_hit {
        Err(Error::PrecisionInsufficient)
    } else {
        Ok(false)
    }
}

/// Default-precision search with the doubling retry ladder. Starts at
/// v_p(4A) + 5, falling back toward the sound minimum v_p(4A) + 3 when
/// the table would not fit.
pub fn pell_soluble_bruteforce_auto(d: &Discriminant, a: Int, p: Int) -> Result<bool> {
    let min_k = valuation(cmul(4, a)?, p)? + 3;
    let mut k = feasible_k(p, min_k, min_k + 2).ok_or(Error::PrecisionInsufficient)?;
    for _ in 0..=3 {
        match pell_soluble_bruteforce(d, a, p, k) {
            Err(Error::PrecisionInsufficient) => {
                k = feasible_k(p, k + 1, 2 * k).ok_or(Error::PrecisionInsufficient)?;
            }
            other => return other,
        }
    }
    Err(Error::PrecisionInsufficient)
}

/// Brute-force Hilbert symbol via Hilbert's criterion: (a,b)_p = 1 iff
/// a X^2 + b Y^2 = Z^2 has a nontrivial Q_p solution.
///
/// A projective solution scales so that its smallest-valuation coordinate
/// is 1, so the three affine charts X=1, Y=1, Z=1 searched over (Z/p^K)^2
/// are exhaustive. Hits are Hensel-certified as in the Pell search.
pub fn hilbert_bruteforce(a: Int, b: Int, p: Int) -> Result<i32> {
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument("hilbert symbol of zero".into()));
    }
    // Exhaustion is sound at every precision, so the ladder starts at the
    // Hensel minimum v+3 and escalates through v+5 and its doubles when a
    // hit cannot be certified.
    let v = valuation(cmul(4, cmul(a, b)?)?, p)?;
    for k in [v + 3, v + 5, 2 * (v + 5), 4 * (v + 5)] {
        if pow_checked(p, k).is_err() {
            continue;
        }
        match hilbert_bruteforce_at(a, b, p, k) {
            Err(Error::PrecisionInsufficient) => continue,
            other => return other,
        }
    }
    Err(Error::PrecisionInsufficient)
}

/// Single-precision version of `hilbert_bruteforce`.
pub fn hilbert_bruteforce_at(a: Int, b: Int, p: Int, k: u32) -> Result<i32> {
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if a == 0 || b == 0 {
        return Err(Error::InvalidArgument("hilbert symbol of zero".into()));
    }
    let m = pow_checked(p, k)?;
    let pu = p as u64;
    let au = a.rem_euclid(m as Int) as u64;
    let bu = b.rem_euclid(m as Int) as u64;
    let squares = unit_square_table(pu, m);
    let mut saw_hit = false;

    // Chart X = 1: a + b u^2 = v^2, derivatives (2a, 2bu, 2v).
    // Chart Y = 1: a u^2 + b = v^2, derivatives (2au, 2b, 2v).
    for swap in [false, true] {
        let (c0, c1) = if swap { (bu, au) } else { (au, bu) };
        for u in 0..m {
            let t = (c0 + c1 * ((u * u) % m) % m) % m;
            if let Some(v) = squares.lookup(t) {
                saw_hit = true;
                if certifies(k, pu, (2 * c0) % m)
                    || certifies(k, pu, (2 * c1 % m * u) % m)
                    || certifies(k, pu, (2 * v) % m)
                {
                    return Ok(1);
                }
            }
        }
    }

    // Chart Z = 1: a u^2 + b w^2 = 1, derivatives (2au, 2bw, 2).
    drop(squares);
    let b_squares = SquareTable::build(pu, m, bu);
    for u in 0..m {
        let t = (m + 1 - au * ((u * u) % m) % m % m) % m;
        if let Some(w) = b_squares.lookup(t) {
            saw_hit = true;
            if certifies(k, pu, (2 * au % m * u) % m)
                || certifies(k, pu, (2 * bu % m * w) % m)
                || certifies(k, pu, 2 % m)
            {
                return Ok(1);
            }
        }
    }

    if saw_hit {
        Err(Error::PrecisionInsufficient)
    } else {
        Ok(-1)
    }
}
