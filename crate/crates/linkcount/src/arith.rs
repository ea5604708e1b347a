//! Exact integer utilities: factorization, Kronecker symbol, p-adic
//! valuation, squarefree decomposition.
//!
//! All arithmetic is checked: overflow surfaces as [`Error::Overflow`]
//! instead of wrapping, since a wrapped intermediate would silently corrupt
//! every counting formula downstream.

use crate::error::{Error, Result};

/// The integer type used throughout. Desk-scale inputs (discriminant
/// products up to ~10^12) fit comfortably; anything larger errors out.
pub type Int = i128;

pub(crate) fn cadd(a: Int, b: Int) -> Result<Int> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn csub(a: Int, b: Int) -> Result<Int> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub(crate) fn cmul(a: Int, b: Int) -> Result<Int> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub(crate) fn cpow(mut base: Int, mut exp: u32) -> Result<Int> {
    let mut acc: Int = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = cmul(acc, base)?;
        }
        exp >>= 1;
        if exp > 0 {
            base = cmul(base, base)?;
        }
    }
    Ok(acc)
}

pub fn gcd(a: Int, b: Int) -> Int {
    num_integer::Integer::gcd(&a, &b)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: Int) -> Int {
    assert!(n >= 0, "isqrt of negative input");
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as Int + 2;
    while x * x > n {
        x = (x + n / x) / 2;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_perfect_square(n: Int) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n);
    r * r == n
}

/// A signed prime factorization: `sign * prod(p_i^e_i)` with the primes
/// strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub sign: i32,
    pub factors: Vec<(Int, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out. Exact; overflow is an error.
    pub fn recompose(&self) -> Result<Int> {
        let mut n: Int = self.sign as Int;
        for &(p, e) in &self.factors {
            n = cmul(n, cpow(p, e)?)?;
        }
        Ok(n)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn valuation(&self, p: Int) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    /// All positive divisors of |n|, sorted.
    pub fn divisors(&self) -> Result<Vec<Int>> {
        let mut out = vec![1 as Int];
        for &(p, e) in &self.factors {
            let prev = std::mem::take(&mut out);
            for d in prev {
                let mut pk: Int = 1;
                out.push(d);
                for _ in 1..=e {
                    pk = cmul(pk, p)?;
                    out.push(cmul(d, pk)?);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

fn addmod(a: u128, b: u128, m: u128) -> u128 {
    // Requires a, b < m.
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        (a % m) * (b % m) % m
    } else {
        // Fallback for moduli above 64 bits: double-and-add.
        let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
        while b > 0 {
            if b & 1 == 1 {
                acc = addmod(acc, a, m);
            }
            a = addmod(a, a, m);
            b >>= 1;
        }
        acc
    }
}

fn powmod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc: u128 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The base set is deterministic for all
/// inputs below 3.3 * 10^24, far beyond the i128 desk scale used here.
pub fn is_prime(n: Int) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u128;
    for &p in &[2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Pollard-Brent rho with deterministic parameters. Only reached for
/// composites whose smallest factor exceeds the trial-division bound.
fn rho_factor(n: u128) -> u128 {
    debug_assert!(!is_prime(n as Int) && n > 1 && n % 2 == 1);
    for c in 1u128.. {
        let f = |x: u128| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = x.abs_diff(y);
            d = num_integer::Integer::gcd(&diff, &n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

const TRIAL_BOUND: Int = 1_000_000;

/// Exact prime factorization of a nonzero integer, sign included.
///
/// Trial division up to 10^6, then deterministic rho splitting with
/// Miller-Rabin certification of every reported prime.
pub fn factorize(n: Int) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::InvalidArgument("factorize(0)".into()));
    }
    let sign = if n < 0 { -1 } else { 1 };
    let mut m = n.checked_abs().ok_or(Error::Overflow)? as u128;
    let mut factors: Vec<(Int, u32)> = Vec::new();
    let push = |p: Int, e: u32, factors: &mut Vec<(Int, u32)>| {
        debug_assert!(is_prime(p));
        factors.push((p, e));
    };

    for p in [2 as Int, 3, 5] {
        let mut e = 0;
        while m.is_multiple_of(p as u128) {
            m /= p as u128;
            e += 1;
        }
        if e > 0 {
            push(p, e, &mut factors);
        }
    }
    let mut d: Int = 7;
    let wheel = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut wi = 0;
    while d <= TRIAL_BOUND && (d as u128) * (d as u128) <= m {
        let mut e = 0;
        while m.is_multiple_of(d as u128) {
            m /= d as u128;
            e += 1;
        }
        if e > 0 {
            push(d, e, &mut factors);
        }
        d += wheel[wi];
        wi = (wi + 1) % wheel.len();
    }

    // Whatever remains is either 1, prime, or a product of primes all
    // above the trial bound; split it recursively.
    let mut stack = vec![m];
    let mut large: Vec<u128> = Vec::new();
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime(v as Int) {
            large.push(v);
        } else {
            let d = rho_factor(v);
            stack.push(d);
            stack.push(v / d);
        }
    }
    large.sort_unstable();
    let mut i = 0;
    while i < large.len() {
        let p = large[i];
        let mut e = 0;
        while i < large.len() && large[i] == p {
            e += 1;
            i += 1;
        }
        push(p as Int, e, &mut factors);
    }

    factors.sort_unstable_by_key(|&(p, _)| p);
    let out = Factorization { sign, factors };
    debug_assert_eq!(out.recompose()?, n);
    Ok(out)
}

/// Full Kronecker symbol (d/n), defined for all integers.
pub fn kronecker(d: Int, n: Int) -> i32 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut a = d;
    let mut b = n;
    let mut k: i32 = 1;
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    if b % 2 == 0 {
        if a % 2 == 0 {
            return 0;
        }
        let mut v = 0;
        while b % 2 == 0 {
            b /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            k = -k;
        }
    }
    // b is now odd and positive; standard Jacobi loop.
    a = a.rem_euclid(b);
    while a != 0 {
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(b.rem_euclid(8), 3 | 5) {
            k = -k;
        }
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let t = a;
        a = b.rem_euclid(t);
        b = t;
    }
    if b == 1 {
        k
    } else {
        0
    }
}

/// Largest e with p^e | n.
pub fn valuation(n: Int, p: Int) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidArgument("valuation of 0".into()));
    }
    if p < 2 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    Ok(e)
}
