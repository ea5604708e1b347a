//! Quaternion algebras (a,b / Q): element arithmetic, reduced norm and
//! trace, Hilbert symbols at every place, and ramification sets.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::arith::{self, cmul, factorize, kronecker, Int};
use crate::error::{Error, Result};
use crate::rat::{radd, rat, rdot, rmul, rsub, Rat};

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(Int),
    Infinity,
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "{p}"),
            Place::Infinity => write!(f, "oo"),
        }
    }
}

/// The quaternion algebra with basis 1, i, j, k over Q, where i^2 = a,
/// j^2 = b and k = ij = -ji.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatAlgebra {
    a: Rat,
    b: Rat,
    ramified: BTreeSet<Place>,
}

impl QuatAlgebra {
    /// Builds the algebra and computes its ramification set, asserting the
    /// even-cardinality product formula.
    pub fn new(a: Rat, b: Rat) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidArgument(
                "quaternion algebra parameters must be nonzero".into(),
            ));
        }
        let ramified = ramified_places(&a, &b)?;
        if ramified.len() % 2 != 0 {
            return Err(Error::InternalError(format!(
                "odd ramification set {ramified:?} for ({a}, {b})"
            )));
        }
        Ok(QuatAlgebra { a, b, ramified })
    }

    pub fn from_ints(a: Int, b: Int) -> Result<Self> {
        Self::new(rat(a), rat(b))
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn ramified_places(&self) -> &BTreeSet<Place> {
        &self.ramified
    }

    /// Finite ramified places only.
    pub fn ramified_primes(&self) -> BTreeSet<Int> {
        self.ramified
            .iter()
            .filter_map(|pl| match pl {
                Place::Finite(p) => Some(*p),
                Place::Infinity => None,
            })
            .collect()
    }

    pub fn is_indefinite(&self) -> bool {
        !self.ramified.contains(&Place::Infinity)
    }

    pub fn element(&self, e: Rat, f: Rat, g: Rat, h: Rat) -> QuatElement {
        QuatElement {
            alg: self.clone(),
            coords: [e, f, g, h],
        }
    }

    pub fn scalar(&self, e: Rat) -> QuatElement {
        self.element(e, Rat::zero(), Rat::zero(), Rat::zero())
    }

    pub fn one(&self) -> QuatElement {
        self.scalar(rat(1))
    }

    pub fn i(&self) -> QuatElement {
        self.element(Rat::zero(), rat(1), Rat::zero(), Rat::zero())
    }

    pub fn j(&self) -> QuatElement {
        self.element(Rat::zero(), Rat::zero(), rat(1), Rat::zero())
    }

    pub fn k(&self) -> QuatElement {
        self.element(Rat::zero(), Rat::zero(), Rat::zero(), rat(1))
    }
}

/// An element e + f i + g j + h k of a quaternion algebra. Elements
/// remember their algebra; mixing algebras is reported, not UB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuatElement {
    alg: QuatAlgebra,
    coords: [Rat; 4],
}

impl QuatElement {
    pub fn coords(&self) -> &[Rat; 4] {
        &self.coords
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.alg
    }

    pub fn is_scalar(&self) -> bool {
        self.coords[1].is_zero() && self.coords[2].is_zero() && self.coords[3].is_zero()
    }

    /// Reduced trace, 2e.
    pub fn trd(&self) -> Result<Rat> {
        rmul(&rat(2), &self.coords[0])
    }

    /// Reduced norm, e^2 - a f^2 - b g^2 + ab h^2.
    pub fn nrd(&self) -> Result<Rat> {
        let [e, f, g, h] = &self.coords;
        let a = &self.alg.a;
        let b = &self.alg.b;
        let ab = rmul(a, b)?;
        let mut n = rmul(e, e)?;
        n = rsub(&n, &rmul(a, &rmul(f, f)?)?)?;
        n = rsub(&n, &rmul(b, &rmul(g, g)?)?)?;
        n = radd(&n, &rmul(&ab, &rmul(h, h)?)?)?;
        Ok(n)
    }

    /// Standard involution: negates the i, j, k coordinates.
    pub fn conjugate(&self) -> QuatElement {
        let [e, f, g, h] = self.coords;
        QuatElement {
            alg: self.alg.clone(),
            coords: [e, -f, -g, -h],
        }
    }

    pub fn add(&self, other: &QuatElement) -> Result<QuatElement> {
        self.check_same_algebra(other)?;
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(&other.coords) {
            *c = radd(c, o)?;
        }
        Ok(QuatElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    pub fn sub(&self, other: &QuatElement) -> Result<QuatElement> {
        self.check_same_algebra(other)?;
        let mut coords = self.coords;
        for (c, o) in coords.iter_mut().zip(&other.coords) {
            *c = rsub(c, o)?;
        }
        Ok(QuatElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    pub fn scale(&self, s: &Rat) -> Result<QuatElement> {
        let mut coords = self.coords;
        for c in coords.iter_mut() {
            *c = rmul(c, s)?;
        }
        Ok(QuatElement {
            alg: self.alg.clone(),
            coords,
        })
    }

    /// Exact product under i^2 = a, j^2 = b, ij = -ji = k.
    pub fn mul(&self, other: &QuatElement) -> Result<QuatElement> {
        self.check_same_algebra(other)?;
        let [e1, f1, g1, h1] = &self.coords;
        let [e2, f2, g2, h2] = &other.coords;
        let a = &self.alg.a;
        let b = &self.alg.b;
        let ab = rmul(a, b)?;

        let e = rdot(&[
            (*e1, *e2),
            (rmul(a, f1)?, *f2),
            (rmul(b, g1)?, *g2),
            (-rmul(&ab, h1)?, *h2),
        ])?;
        let f = rdot(&[
            (*e1, *f2),
            (*f1, *e2),
            (-rmul(b, g1)?, *h2),
            (rmul(b, h1)?, *g2),
        ])?;
        let g = rdot(&[
            (*e1, *g2),
            (*g1, *e2),
            (rmul(a, f1)?, *h2),
            (-rmul(a, h1)?, *f2),
        ])?;
        let h = rdot(&[
            (*e1, *h2),
            (*h1, *e2),
            (*f1, *g2),
            (-*g1, *f2),
        ])?;
        Ok(QuatElement {
            alg: self.alg.clone(),
            coords: [e, f, g, h],
        })
    }

    fn check_same_algebra(&self, other: &QuatElement) -> Result<()> {
        if self.alg.a != other.alg.a || self.alg.b != other.alg.b {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }
}

/// Hilbert symbol (a,b)_v over the rationals, by the closed local formulas.
///
/// Returns -1 exactly when (a,b/Q) tensor Q_v is a division algebra.
pub fn hilbert_symbol(a: &Rat, b: &Rat, place: Place) -> Result<i32> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidArgument("hilbert symbol of zero".into()));
    }
    // (n/d, b)_v = (n*d, b)_v since squares drop out.
    let ai = cmul(*a.numer(), *a.denom())?;
    let bi = cmul(*b.numer(), *b.denom())?;
    match place {
        Place::Infinity => Ok(if ai < 0 && bi < 0 { -1 } else { 1 }),
        Place::Finite(p) => {
            if p < 2 || !arith::is_prime(p) {
                return Err(Error::InvalidArgument(format!("{p} is not a prime")));
            }
            Ok(hilbert_symbol_int(ai, bi, p))
        }
    }
}

fn hilbert_symbol_int(a: Int, b: Int, p: Int) -> i32 {
    let alpha = split_valuation(a, p);
    let beta = split_valuation(b, p);
    let (va, u) = alpha;
    let (vb, w) = beta;
    if p == 2 {
        // (-1)^(eps(u)eps(w) + va*omega(w) + vb*omega(u)) with
        // eps(x) = (x-1)/2 and omega(x) = (x^2-1)/8 mod 2.
        let eps = |x: Int| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: Int| ((x * x - 1) / 8).rem_euclid(2);
        let e = (eps(u) * eps(w) + (va as Int) * omega(w) + (vb as Int) * omega(u)).rem_euclid(2);
        if e == 0 {
            1
        } else {
            -1
        }
    } else {
        // (-1/p)^(va*vb) * (u/p)^vb * (w/p)^va
        let mut s = 1;
        if va % 2 == 1 && vb % 2 == 1 {
            s *= kronecker(-1, p);
        }
        if vb % 2 == 1 {
            s *= kronecker(u, p);
        }
        if va % 2 == 1 {
            s *= kronecker(w, p);
        }
        s
    }
}

fn split_valuation(n: Int, p: Int) -> (u32, Int) {
    let mut m = n;
    let mut v = 0;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    (v, m)
}

/// The set of places where (a,b/Q) ramifies: finite candidates are the
/// primes dividing 2 and the numerators/denominators of a and b, plus a
/// direct sign test at infinity.
pub fn ramified_places(a: &Rat, b: &Rat) -> Result<BTreeSet<Place>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::InvalidArgument(
            "quaternion algebra parameters must be nonzero".into(),
        ));
    }
    let mut candidates: BTreeSet<Int> = BTreeSet::new();
    candidates.insert(2);
    for x in [a.numer(), a.denom(), b.numer(), b.denom()] {
        if x.abs() > 1 {
            for (p, _) in factorize(*x)?.factors {
                candidates.insert(p);
            }
        }
    }
    let mut out = BTreeSet::new();
    for p in candidates {
        if hilbert_symbol(a, b, Place::Finite(p))? == -1 {
            out.insert(Place::Finite(p));
        }
    }
    if hilbert_symbol(a, b, Place::Infinity)? == -1 {
        out.insert(Place::Infinity);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rdiv_int;

    fn set(primes: &[Int], inf: bool) -> BTreeSet<Place> {
        let mut s: BTreeSet<Place> = primes.iter().map(|&p| Place::Finite(p)).collect();
        if inf {
            s.insert(Place::Infinity);
        }
        s
    }

    #[test]
    fn defining_relations() {
        let alg = QuatAlgebra::from_ints(5, -1).unwrap();
        let (i, j, k) = (alg.i(), alg.j(), alg.k());
        assert_eq!(i.mul(&j).unwrap(), k);
        assert_eq!(j.mul(&i).unwrap(), k.scale(&rat(-1)).unwrap());
        assert_eq!(i.mul(&i).unwrap(), alg.scalar(rat(5)));
        assert_eq!(j.mul(&j).unwrap(), alg.scalar(rat(-1)));
        assert_eq!(k.mul(&k).unwrap(), alg.scalar(rat(5)));
    }

    #[test]
    fn square_of_standard_second_image() {
        // In (5, -1896): ((3i + k)/5)^2 = 381.
        let alg = QuatAlgebra::from_ints(5, -1896).unwrap();
        let v = alg.element(
            rat(0),
            rdiv_int(3, 5).unwrap(),
            rat(0),
            rdiv_int(1, 5).unwrap(),
        );
        assert_eq!(v.mul(&v).unwrap(), alg.scalar(rat(381)));
    }

    #[test]
    fn nrd_trd_conjugate() {
        let alg = QuatAlgebra::from_ints(5, -1).unwrap();
        let u = alg.element(rat(1), rat(1), rat(0), rat(0));
        assert_eq!(u.nrd().unwrap(), rat(-4));
        assert_eq!(alg.k().trd().unwrap(), rat(0));
        let c = u.conjugate();
        assert_eq!(c.coords(), &[rat(1), rat(-1), rat(0), rat(0)]);
        // u * conj(u) = nrd(u)
        assert_eq!(u.mul(&c).unwrap(), alg.scalar(rat(-4)));
    }

    #[test]
    fn algebra_mismatch_is_reported() {
        let a1 = QuatAlgebra::from_ints(5, -1).unwrap();
        let a2 = QuatAlgebra::from_ints(3, -1).unwrap();
        assert_eq!(a1.i().mul(&a2.i()), Err(Error::AlgebraMismatch));
    }

    #[test]
    fn hilbert_symbol_examples() {
        assert_eq!(hilbert_symbol(&rat(-1), &rat(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(5), &rat(9 - 1905), Place::Finite(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(&rat(5), &rat(9 - 1905), Place::Finite(3)).unwrap(), -1);
        // x = 7 row: split everywhere.
        for p in [2, 3, 5, 7, 11, 13, 229] {
            assert_eq!(hilbert_symbol(&rat(5), &rat(49 - 1905), Place::Finite(p)).unwrap(), 1);
        }
        assert!(hilbert_symbol(&rat(0), &rat(1), Place::Infinity).is_err());
        assert!(hilbert_symbol(&rat(3), &rat(1), Place::Finite(4)).is_err());
    }

    #[test]
    fn ramification_of_worked_algebras() {
        let alg = QuatAlgebra::from_ints(77, -1).unwrap();
        assert_eq!(alg.ramified_places(), &set(&[7, 11], false));

        let alg = QuatAlgebra::from_ints(7, 5).unwrap();
        assert_eq!(alg.ramified_places(), &set(&[5, 7], false));

        let alg = QuatAlgebra::from_ints(3, -1).unwrap();
        assert_eq!(alg.ramified_places(), &set(&[2, 3], false));

        // Hamilton quaternions: ramified at 2 and infinity.
        let alg = QuatAlgebra::from_ints(-1, -1).unwrap();
        assert_eq!(alg.ramified_places(), &set(&[2], true));
        assert!(!alg.is_indefinite());
    }

    #[test]
    fn rational_parameters() {
        // Squares in either slot leave the algebra split everywhere.
        let alg = QuatAlgebra::new(Rat::new(1, 4), Rat::new(9, 25)).unwrap();
        assert!(alg.ramified_places().is_empty());
    }
}
