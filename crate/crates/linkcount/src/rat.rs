//! Checked exact-rational helpers over `Ratio<i128>`. Overflow is reported,
//! never wrapped.

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, Zero};

use crate::arith::{isqrt, Int};
use crate::error::{Error, Result};

pub type Rat = Ratio<Int>;

pub fn rat(n: Int) -> Rat {
    Rat::from_integer(n)
}

pub fn rdiv_int(n: Int, d: Int) -> Result<Rat> {
    if d == 0 {
        return Err(Error::InvalidArgument("division by zero".into()));
    }
    Ok(Rat::new(n, d))
}

pub fn radd(a: &Rat, b: &Rat) -> Result<Rat> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub fn rsub(a: &Rat, b: &Rat) -> Result<Rat> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub fn rmul(a: &Rat, b: &Rat) -> Result<Rat> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn rdiv(a: &Rat, b: &Rat) -> Result<Rat> {
    if b.is_zero() {
        return Err(Error::InvalidArgument("division by zero".into()));
    }
    a.checked_div(b).ok_or(Error::Overflow)
}

/// Sum of products, checked.
pub fn rdot(terms: &[(Rat, Rat)]) -> Result<Rat> {
    let mut acc = Rat::zero();
    for (a, b) in terms {
        acc = radd(&acc, &rmul(a, b)?)?;
    }
    Ok(acc)
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = *x.numer();
    let d = *x.denom();
    let rn = isqrt(n);
    let rd = isqrt(d);
    if rn * rn == n && rd * rd == d {
        Some(Rat::new(rn, rd))
    } else {
        None
    }
}

/// Renders a rational as `n` or `n/d` for exact textual output.
pub fn rat_display(x: &Rat) -> String {
    if x.denom() == &1 {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `n` or `n/d`.
pub fn rat_parse(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        None => Ok(rat(s.trim().parse::<Int>().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n = n.trim().parse::<Int>().map_err(|_| bad())?;
            let d = d.trim().parse::<Int>().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
    }
}
