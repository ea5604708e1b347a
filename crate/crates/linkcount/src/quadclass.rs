//! Quadratic discriminant arithmetic: fundamental part and conductor,
//! narrow class numbers via cycles of reduced binary quadratic forms, and
//! fundamental Pell solutions.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::{self, cadd, cmul, factorize, gcd, isqrt, Int};
use crate::error::{Error, Result};

/// A quadratic discriminant with its fundamental/conductor decomposition.
///
/// `value = fundamental_part * conductor^2`, where `fundamental_part` is the
/// discriminant of Q(sqrt(value)). `parity` is `value mod 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Discriminant {
    value: Int,
    fundamental_part: Int,
    conductor: Int,
    parity: Int,
}

impl Discriminant {
    pub fn value(&self) -> Int {
        self.value
    }

    pub fn fundamental_part(&self) -> Int {
        self.fundamental_part
    }

    pub fn conductor(&self) -> Int {
        self.conductor
    }

    /// 0 for even discriminants, 1 for odd ones.
    pub fn parity(&self) -> Int {
        self.parity
    }

    pub fn is_fundamental(&self) -> bool {
        self.conductor == 1
    }
}

impl std::fmt::Display for Discriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Validates `n` as a discriminant and decomposes it.
pub fn make_discriminant(n: Int) -> Result<Discriminant> {
    if n == 0 || n.rem_euclid(4) > 1 || arith::is_perfect_square(n) {
        return Err(Error::NotADiscriminant(n));
    }
    let f = factorize(n)?;
    // Squarefree kernel s (with sign) and cofactor c with n = s * c^2.
    let mut s: Int = f.sign as Int;
    let mut c: Int = 1;
    for &(p, e) in &f.factors {
        if e % 2 == 1 {
            s = cmul(s, p)?;
        }
        c = cmul(c, arith::cpow(p, e / 2)?)?;
    }
    let (fundamental_part, conductor) = if s.rem_euclid(4) == 1 {
        (s, c)
    } else {
        debug_assert_eq!(c % 2, 0);
        (cmul(4, s)?, c / 2)
    };
    debug_assert_eq!(cmul(fundamental_part, cmul(conductor, conductor)?)?, n);
    Ok(Discriminant {
        value: n,
        fundamental_part,
        conductor,
        parity: n.rem_euclid(2),
    })
}

/// An integral binary quadratic form a x^2 + b xy + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Form {
    pub a: Int,
    pub b: Int,
    pub c: Int,
}

impl Form {
    pub fn discriminant(&self) -> Int {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c).abs() == 1
    }
}

/// Reduction test for an indefinite form of positive non-square
/// discriminant D: 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b.
pub fn is_reduced_indefinite(f: &Form, d: Int) -> bool {
    debug_assert!(d > 0 && !arith::is_perfect_square(d));
    if f.b <= 0 || f.b * f.b >= d {
        return false;
    }
    let t = 2 * f.a.abs();
    // sqrt(D) < t + b  and  (t <= b or (t - b)^2 < D)
    d < (t + f.b) * (t + f.b) && (t <= f.b || (t - f.b) * (t - f.b) < d)
}

/// All reduced primitive indefinite forms of discriminant d > 0.
pub fn reduced_indefinite_forms(d: Int) -> Result<Vec<Form>> {
    let s = isqrt(d);
    let mut forms = Vec::new();
    let mut b = if d % 2 == 0 { 2 } else { 1 };
    while b <= s {
        let n = (d - b * b) / 4; // a*c = -n, n > 0
        if n > 0 {
            // 2|a| < sqrt(d) + b bounds the divisors of n we must try.
            let a_hi = (s + b) / 2 + 1;
            for a_abs in 1..=a_hi.min(n) {
                if n % a_abs != 0 {
                    continue;
                }
                for a in [a_abs, -a_abs] {
                    let c = -n / a;
                    let f = Form { a, b, c };
                    if is_reduced_indefinite(&f, d) && f.is_primitive() {
                        forms.push(f);
                    }
                }
            }
        }
        b += 2;
    }
    forms.sort_unstable();
    forms.dedup();
    Ok(forms)
}

/// The rho operator on indefinite forms: (a,b,c) -> (c, r, (r^2-d)/4c) with
/// r = -b mod 2|c| chosen in the reduction window sqrt(d)-2|c| < r < sqrt(d).
pub fn rho(f: &Form, d: Int) -> Result<Form> {
    let c = f.c;
    if c == 0 {
        return Err(Error::InternalError("rho applied to a form with c = 0".into()));
    }
    let m = cmul(2, c.abs())?;
    let s = isqrt(d);
    let t = (-f.b).rem_euclid(m);
    let r = cadd(t, cmul(m, (s - t).div_euclid(m))?)?;
    let c2 = (cmul(r, r)? - d) / (4 * c);
    Ok(Form { a: c, b: r, c: c2 })
}

/// Narrow class number h+(D).
///
/// For D > 0 this is the number of rho-cycles of reduced primitive
/// indefinite forms; for D < 0 the number of reduced primitive
/// positive-definite forms.
pub fn narrow_class_number(d: &Discriminant) -> Result<Int> {
    if d.value > 0 {
        let forms = reduced_indefinite_forms(d.value)?;
        let index: BTreeMap<Form, usize> =
            forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut seen = vec![false; forms.len()];
        let mut cycles = 0;
        for start in 0..forms.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                let next = rho(&forms[i], d.value)?;
                i = *index.get(&next).ok_or_else(|| {
                    Error::InternalError("rho left the set of reduced forms".into())
                })?;
            }
        }
        Ok(cycles)
    } else {
        let forms = reduced_definite_forms(d.value)?;
        Ok(forms.len() as Int)
    }
}

/// Reduced primitive positive-definite forms of discriminant d < 0:
/// |b| <= a <= c with b >= 0 whenever |b| = a or a = c.
pub fn reduced_definite_forms(d: Int) -> Result<Vec<Form>> {
    debug_assert!(d < 0);
    let mut forms = Vec::new();
    let abs_d = -d;
    let mut b = d.rem_euclid(2);
    while cmul(3, cmul(b, b)?)? <= abs_d {
        let n = (b * b + abs_d) / 4; // a*c = n
        for a in std::cmp::max(b, 1)..=isqrt(n) {
            if n % a != 0 {
                continue;
            }
            let c = n / a;
            for bb in if b == 0 { vec![0] } else { vec![b, -b] } {
                if bb < 0 && (a == c || bb.abs() == a) {
                    continue;
                }
                let f = Form { a, b: bb, c };
                if f.is_primitive() {
                    forms.push(f);
                }
            }
        }
        b += 2;
    }
    forms.sort_unstable();
    forms.dedup();
    Ok(forms)
}

/// Minimal positive (T, U) with T^2 - D U^2 = 4; the fundamental
/// totally-positive unit of the order of discriminant D is (T + U sqrt(D))/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PellSolution {
    pub t: Int,
    pub u: Int,
}

/// Fundamental solution of T^2 - D U^2 = 4 for a positive discriminant.
///
/// Walks the rho-cycle of the principal form once around and reads the
/// fundamental automorph off the accumulated SL2(Z) transition matrix,
/// which is the continued-fraction expansion of the principal root in
/// matrix form. Works for non-fundamental D as well.
pub fn pell_fundamental(d: &Discriminant) -> Result<PellSolution> {
    if d.value < 0 {
        return Err(Error::InvalidArgument(format!(
            "pell_fundamental requires D > 0, got {}",
            d.value
        )));
    }
    let dv = d.value;
    let principal = Form {
        a: 1,
        b: d.parity,
        c: (d.parity * d.parity - dv) / 4,
    };

    // March to a reduced form first, then around its cycle, accumulating
    // the transition matrices. rho's matrix is [[0, -1], [1, s]] with
    // s = (b + b')/(2c). Reduction needs O(log D) steps; 512 covers the
    // full i128 range.
    let mut f = principal;
    for _ in 0..512 {
        if is_reduced_indefinite(&f, dv) {
            break;
        }
        f = rho(&f, dv)?;
    }
    if !is_reduced_indefinite(&f, dv) {
        return Err(Error::InternalError("form reduction did not terminate".into()));
    }

    let start = f;
    let mut m = [[1 as Int, 0], [0, 1]];
    loop {
        let next = rho(&f, dv)?;
        let s = (f.b + next.b) / (2 * f.c);
        let step = [[0, -1], [1, s]];
        m = mat_mul_checked(&m, &step)?;
        f = next;
        if f == start {
            break;
        }
    }

    // m is an automorph of `start` = (a, b, c): it has the shape
    // [[(T - bU)/2, -cU], [aU, (T + bU)/2]] for a solution of T^2-DU^2=4.
    let t = cadd(m[0][0], m[1][1])?.abs();
    if m[1][0] % start.a != 0 {
        return Err(Error::InternalError("automorph is incompatible with its form".into()));
    }
    let u = (m[1][0] / start.a).abs();
    if u == 0 || !pell_identity_holds(t, u, dv) {
        return Err(Error::InternalError("cycle automorph is not a Pell solution".into()));
    }
    Ok(PellSolution { t, u })
}

/// Exact check of T^2 = D U^2 + 4 (T, U >= 0, D > 0) in 256-bit arithmetic,
/// since the fundamental solution can square past i128.
fn pell_identity_holds(t: Int, u: Int, d: Int) -> bool {
    debug_assert!(t >= 0 && u >= 0 && d > 0);
    let t2 = widemul(t as u128, t as u128);
    let u2 = widemul(u as u128, u as u128);
    // d * u^2 as (hi, lo), rejecting anything at or above 2^256 (t^2 < 2^256).
    let dl = widemul(d as u128, u2.1);
    let dh = widemul(d as u128, u2.0);
    if dh.0 != 0 {
        return false;
    }
    let (mid, carry1) = dl.0.overflowing_add(dh.1);
    if carry1 {
        return false;
    }
    let (lo, carry2) = dl.1.overflowing_add(4);
    let hi = if carry2 {
        match mid.checked_add(1) {
            Some(v) => v,
            None => return false,
        }
    } else {
        mid
    };
    (t2.0, t2.1) == (hi, lo)
}

/// Full 128x128 -> 256 bit unsigned multiplication as (hi, lo).
fn widemul(a: u128, b: u128) -> (u128, u128) {
    const M: u128 = (1u128 << 64) - 1;
    let (a1, a0) = (a >> 64, a & M);
    let (b1, b0) = (b >> 64, b & M);
    let t0 = a0 * b0;
    let t1 = a1 * b0 + (t0 >> 64);
    let t2 = a0 * b1 + (t1 & M);
    let lo = (t2 << 64) | (t0 & M);
    let hi = a1 * b1 + (t1 >> 64) + (t2 >> 64);
    (hi, lo)
}

fn mat_mul_checked(a: &[[Int; 2]; 2], b: &[[Int; 2]; 2]) -> Result<[[Int; 2]; 2]> {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = cadd(cmul(a[i][0], b[0][j])?, cmul(a[i][1], b[1][j])?)?;
        }
    }
    Ok(out)
}

/// Primes dividing D1*D2 / (D1fund * D2fund), i.e. the primes of either
/// conductor. These are the places where optimality of an embedding pair
/// can fail.
pub fn potentially_bad_primes(d1: &Discriminant, d2: &Discriminant) -> Result<BTreeSet<Int>> {
    let mut out = BTreeSet::new();
    for d in [d1, d2] {
        if d.conductor > 1 {
            for (p, _) in factorize(d.conductor)?.factors {
                out.insert(p);
            }
        }
    }
    Ok(out)
}
