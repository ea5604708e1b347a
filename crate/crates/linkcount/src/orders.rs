//! Rank-4 lattices in a quaternion algebra with canonical Hermite-normal-
//! form bases: reduced discriminants via the trace form, containment, and
//! the explicit orders generated by an x-linked embedding pair, with and
//! without an intersection level.

// Index loops over the fixed 4x4 shapes read better than iterator chains.
#![allow(clippy::needless_range_loop)]

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{cmul, gcd, Int};
use crate::error::{Error, Result};
use crate::linking::{classify_discs, Triple};
use crate::quadclass::Discriminant;
use crate::quatalg::{QuatAlgebra, QuatElement};
use crate::rat::{radd, rat, rat_display, rat_parse, rdiv, rdiv_int, rmul, rsub, rat_sqrt, Rat};

/// Canonical upper-triangular Hermite normal form of a full-rank lattice of
/// rational row vectors: a minimal common denominator and an integer 4x4
/// matrix with positive diagonal and entries above each pivot reduced
/// modulo it. Two presentations of the same lattice are byte-identical.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hnf {
    den: Int,
    rows: [[Int; 4]; 4],
}

impl Hnf {
    pub fn denominator(&self) -> Int {
        self.den
    }

    pub fn rows(&self) -> &[[Int; 4]; 4] {
        &self.rows
    }

    /// Covolume relative to the unit frame: product of the diagonal over
    /// den^4.
    pub fn determinant(&self) -> Result<Rat> {
        let mut num = rat(1);
        for i in 0..4 {
            num = rmul(&num, &rat(self.rows[i][i]))?;
        }
        let mut den = rat(1);
        for _ in 0..4 {
            den = rmul(&den, &rat(self.den))?;
        }
        rdiv(&num, &den)
    }

    /// Basis rows as exact rational vectors.
    pub fn basis(&self) -> Result<[[Rat; 4]; 4]> {
        let mut out = [[Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = rdiv_int(self.rows[i][j], self.den)?;
            }
        }
        Ok(out)
    }
}

/// Hermite normal form of the lattice generated by the given rational rows.
pub fn hnf(rows: &[[Rat; 4]]) -> Result<Hnf> {
    if rows.is_empty() {
        return Err(Error::RankDeficient);
    }
    // Clear denominators to a single one.
    let mut den: Int = 1;
    for row in rows {
        for x in row {
            let d = *x.denom();
            den = cmul(den / gcd(den, d), d)?;
        }
    }
    let mut m: Vec<[Int; 4]> = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = [0 as Int; 4];
        for (j, x) in row.iter().enumerate() {
            r[j] = cmul(*x.numer(), den / x.denom())?;
        }
        m.push(r);
    }

    // Row-reduce to upper triangular form with Euclidean steps.
    let n = m.len();
    let mut pivot_row = 0;
    for col in 0..4 {
        loop {
            // Smallest nonzero entry in this column at or below pivot_row.
            let mut best: Option<usize> = None;
            for r in pivot_row..n {
                if m[r][col] != 0
                    && best.map(|b| m[r][col].abs() < m[b][col].abs()).unwrap_or(true)
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else {
                return Err(Error::RankDeficient);
            };
            m.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..n {
                if m[r][col] != 0 {
                    let q = m[r][col].div_euclid(m[pivot_row][col]);
                    for j in 0..4 {
                        m[r][j] = crate::arith::csub(m[r][j], cmul(q, m[pivot_row][j])?)?;
                    }
                    if m[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[pivot_row][col] < 0 {
            for j in 0..4 {
                m[pivot_row][j] = -m[pivot_row][j];
            }
        }
        pivot_row += 1;
        if pivot_row == n && col < 3 {
            return Err(Error::RankDeficient);
        }
    }

    let mut rows4 = [[0 as Int; 4]; 4];
    rows4.copy_from_slice(&m[0..4]);

    // Reduce entries above each pivot, ascending so later pivots (whose
    // rows vanish left of their column) cannot disturb settled columns.
    for i in 0..4 {
        for j in 0..i {
            let q = rows4[j][i].div_euclid(rows4[i][i]);
            if q != 0 {
                for k in 0..4 {
                    rows4[j][k] = crate::arith::csub(rows4[j][k], cmul(q, rows4[i][k])?)?;
                }
            }
        }
    }

    // Minimal denominator.
    let mut g = den;
    for r in &rows4 {
        for &x in r {
            g = gcd(g, x);
        }
    }
    let g = g.abs().max(1);
    let mut out = Hnf { den: den / g, rows: rows4 };
    for r in out.rows.iter_mut() {
        for x in r.iter_mut() {
            *x /= g;
        }
    }
    Ok(out)
}

/// A full-rank lattice in a quaternion algebra, stored in canonical HNF
/// over the basis 1, i, j, k.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLattice {
    algebra: QuatAlgebra,
    hnf: Hnf,
}

impl RationalLattice {
    pub fn from_rows(algebra: QuatAlgebra, rows: &[[Rat; 4]]) -> Result<Self> {
        Ok(RationalLattice {
            algebra,
            hnf: hnf(rows)?,
        })
    }

    pub fn from_elements(algebra: QuatAlgebra, elems: &[QuatElement]) -> Result<Self> {
        let rows: Vec<[Rat; 4]> = elems.iter().map(|e| *e.coords()).collect();
        Self::from_rows(algebra, &rows)
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.algebra
    }

    pub fn hnf(&self) -> &Hnf {
        &self.hnf
    }

    pub fn determinant(&self) -> Result<Rat> {
        self.hnf.determinant()
    }

    /// Basis as quaternion elements.
    pub fn basis_elements(&self) -> Result<Vec<QuatElement>> {
        let basis = self.hnf.basis()?;
        Ok(basis
            .iter()
            .map(|r| {
                self.algebra
                    .element(r[0], r[1], r[2], r[3])
            })
            .collect())
    }

    /// True iff every basis row of `other` lies in the integral row span of
    /// `self`.
    pub fn contains(&self, other: &RationalLattice) -> Result<bool> {
        if self.algebra != other.algebra {
            return Err(Error::InvalidArgument(
                "containment requires lattices in the same algebra".into(),
            ));
        }
        // Solve c * H = v by back-substitution against the triangular HNF,
        // over the common denominator lcm(den1, den2).
        let d1 = self.hnf.den;
        let d2 = other.hnf.den;
        let g = gcd(d1, d2);
        let s1 = d2 / g; // scale for self rows
        let s2 = d1 / g; // scale for other rows
        for r in other.hnf.rows.iter() {
            let mut v = [0 as Int; 4];
            for j in 0..4 {
                v[j] = cmul(r[j], s2)?;
            }
            for i in 0..4 {
                let h = cmul(self.hnf.rows[i][i], s1)?;
                if v[i] % h != 0 {
                    return Ok(false);
                }
                let c = v[i] / h;
                if c != 0 {
                    for j in 0..4 {
                        v[j] = crate::arith::csub(v[j], cmul(c, cmul(self.hnf.rows[i][j], s1)?)?)?;
                    }
                }
            }
            if v != [0, 0, 0, 0] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Reduced discriminant: the positive square root of minus the
    /// determinant of the trace Gram matrix trd(a_i a_j) (no conjugation).
    pub fn reduced_discriminant(&self) -> Result<Rat> {
        let basis = self.basis_elements()?;
        let mut gram = [[Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()]; 4];
        for i in 0..4 {
            for j in 0..4 {
                gram[i][j] = basis[i].mul(&basis[j])?.trd()?;
            }
        }
        let disc = -det4(&gram)?;
        rat_sqrt(&disc).ok_or(Error::NotASquare)
    }
}

fn det4(m: &[[Rat; 4]; 4]) -> Result<Rat> {
    // Cofactor expansion over the first row of 3x3 minors.
    fn det3(m: &[[Rat; 4]; 4], rs: [usize; 3], cs: [usize; 3]) -> Result<Rat> {
        let a = |i: usize, j: usize| m[rs[i]][cs[j]];
        let mut acc = rmul(&a(0, 0), &rsub(&rmul(&a(1, 1), &a(2, 2))?, &rmul(&a(1, 2), &a(2, 1))?)?)?;
        acc = rsub(
            &acc,
            &rmul(&a(0, 1), &rsub(&rmul(&a(1, 0), &a(2, 2))?, &rmul(&a(1, 2), &a(2, 0))?)?)?,
        )?;
        acc = radd(
            &acc,
            &rmul(&a(0, 2), &rsub(&rmul(&a(1, 0), &a(2, 1))?, &rmul(&a(1, 1), &a(2, 0))?)?)?,
        )?;
        Ok(acc)
    }
    let rs = [1, 2, 3];
    let mut acc = Rat::zero();
    let cols = [
        ([1usize, 2, 3], 1),
        ([0usize, 2, 3], -1),
        ([0usize, 1, 3], 1),
        ([0usize, 1, 2], -1),
    ];
    for (j, (cs, sgn)) in cols.iter().enumerate() {
        if m[0][j].is_zero() {
            continue;
        }
        let minor = det3(m, rs, *cs)?;
        let term = rmul(&m[0][j], &minor)?;
        acc = if *sgn > 0 { radd(&acc, &term)? } else { rsub(&acc, &term)? };
    }
    Ok(acc)
}

/// A pair of quadratic embeddings into a common algebra: v_i is the image
/// of (p_i + sqrt(D_i))/2 and x is half the trace of the product of the
/// sqrt images.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPair {
    algebra: QuatAlgebra,
    v1: QuatElement,
    v2: QuatElement,
    d1: Discriminant,
    d2: Discriminant,
    x: Int,
}

impl EmbeddingPair {
    pub fn new(
        algebra: QuatAlgebra,
        v1: QuatElement,
        v2: QuatElement,
        d1: Discriminant,
        d2: Discriminant,
        x: Int,
    ) -> Result<Self> {
        for (v, d) in [(&v1, &d1), (&v2, &d2)] {
            let p = rat(d.parity());
            let c = rdiv(&rsub(&p, &rat(d.value()))?, &rat(4))?;
            let residue = algebra
                .scalar(c)
                .add(&v.mul(v)?.sub(&v.scale(&p)?)?)?;
            if residue != algebra.scalar(Rat::zero()) {
                return Err(Error::InvalidTriple(format!(
                    "image does not satisfy the quadratic equation of discriminant {}",
                    d.value()
                )));
            }
        }
        let w1 = v1.scale(&rat(2))?.sub(&algebra.scalar(rat(d1.parity())))?;
        let w2 = v2.scale(&rat(2))?.sub(&algebra.scalar(rat(d2.parity())))?;
        let half_trace = rdiv(&w1.mul(&w2)?.trd()?, &rat(2))?;
        if half_trace != rat(x) {
            return Err(Error::InvalidTriple(format!(
                "pair is {}-linked, not {x}-linked",
                rat_display(&half_trace)
            )));
        }
        Ok(EmbeddingPair {
            algebra,
            v1,
            v2,
            d1,
            d2,
            x,
        })
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.algebra
    }

    pub fn v1(&self) -> &QuatElement {
        &self.v1
    }

    pub fn v2(&self) -> &QuatElement {
        &self.v2
    }

    pub fn x(&self) -> Int {
        self.x
    }

    pub fn triple(&self) -> Result<Triple> {
        classify_discs(&self.d1, &self.d2, self.x)
    }

    /// Image of sqrt(D_i): w_i = 2 v_i - p_i.
    fn w(&self, which: usize) -> Result<QuatElement> {
        let (v, d) = if which == 1 {
            (&self.v1, &self.d1)
        } else {
            (&self.v2, &self.d2)
        };
        v.scale(&rat(2))?
            .sub(&self.algebra.scalar(rat(d.parity())))
    }
}

/// The explicit x-linked pair in B = (D1, x^2 - D1*D2): sqrt(D1) maps to i
/// and sqrt(D2) to (x i + k)/D1.
pub fn standard_xlinked_pair(d1: &Discriminant, d2: &Discriminant, x: Int) -> Result<EmbeddingPair> {
    let t = classify_discs(d1, d2, x)?;
    let m = t.require_admissible()?;
    let b = cmul(-4, m)?;
    let algebra = QuatAlgebra::new(rat(d1.value()), rat(b))?;
    let v1 = algebra.element(
        rdiv_int(d1.parity(), 2)?,
        rdiv_int(1, 2)?,
        Rat::zero(),
        Rat::zero(),
    );
    let v2 = algebra.element(
        rdiv_int(d2.parity(), 2)?,
        rdiv_int(x, cmul(2, d1.value())?)?,
        Rat::zero(),
        rdiv_int(1, cmul(2, d1.value())?)?,
    );
    EmbeddingPair::new(algebra, v1, v2, *d1, *d2, x)
}

/// The order generated by an x-linked pair: the lattice spanned by
/// 1, v1, v2, v1 v2, of reduced discriminant |D1*D2 - x^2|/4.
pub fn generated_order(pair: &EmbeddingPair) -> Result<RationalLattice> {
    let one = pair.algebra.one();
    let v1v2 = pair.v1.mul(&pair.v2)?;
    let lat = RationalLattice::from_elements(
        pair.algebra.clone(),
        &[one, pair.v1.clone(), pair.v2.clone(), v1v2],
    )?;
    check_denominator_bound(&lat, pair, 1)?;
    Ok(lat)
}

/// The order generated by an x-linked pair together with the induced
/// embedding of discriminant (x^2 - D1*D2)/ell^2: eight generators
/// 1, v1, v2, v3, v1v2, v1v3, v2v3, v1v2v3 with v3 = (w1 w2 - x)/(2 ell).
///
/// Exists for nice triples iff ell^2 divides (D1*D2 - x^2)/4; its reduced
/// discriminant is |D1*D2 - x^2|/(4 ell^2).
pub fn generated_order_level(pair: &EmbeddingPair, ell: Int) -> Result<RationalLattice> {
    let t = pair.triple()?;
    let m = t.require_admissible()?;
    if !t.is_nice() {
        return Err(t.not_nice_error());
    }
    if ell < 1 {
        return Err(Error::InvalidArgument(format!(
            "level must be a positive integer, got {ell}"
        )));
    }
    let ell2 = cmul(ell, ell)?;
    if m % ell2 != 0 {
        return Err(Error::LevelNotAllowed { ell, m });
    }
    let alg = &pair.algebra;
    let w1 = pair.w(1)?;
    let w2 = pair.w(2)?;
    // v3 = w3 / 2 with w3 = (w1 w2 - x)/ell; the discriminant
    // (x^2 - D1*D2)/ell^2 of the product embedding is 0 mod 4, so its
    // parity term vanishes.
    let v3 = w1
        .mul(&w2)?
        .sub(&alg.scalar(rat(pair.x)))?
        .scale(&rdiv_int(1, cmul(2, ell)?)?)?;
    let v1 = pair.v1.clone();
    let v2 = pair.v2.clone();
    let gens = [
        alg.one(),
        v1.clone(),
        v2.clone(),
        v3.clone(),
        v1.mul(&v2)?,
        v1.mul(&v3)?,
        v2.mul(&v3)?,
        v1.mul(&v2)?.mul(&v3)?,
    ];
    let lat = RationalLattice::from_elements(alg.clone(), &gens)?;
    check_denominator_bound(&lat, pair, ell)?;
    Ok(lat)
}

/// Denominators of the generated orders divide 8 * ell * D1; anything else
/// means the construction has been corrupted.
fn check_denominator_bound(lat: &RationalLattice, pair: &EmbeddingPair, ell: Int) -> Result<()> {
    let bound = cmul(8, cmul(ell, pair.d1.value())?)?;
    if bound % lat.hnf.den != 0 {
        return Err(Error::InternalError(format!(
            "lattice denominator {} does not divide 8*ell*D1 = {bound}",
            lat.hnf.den
        )));
    }
    Ok(())
}

/// The eight generator rows of the leveled order written over the frame
/// (1, w1, w2, w3). The row space has determinant exactly 1/(16 ell).
pub fn appendix_rows(t: &Triple, ell: Int) -> Result<Vec<[Rat; 4]>> {
    let m = t.require_admissible()?;
    if !t.is_nice() {
        return Err(t.not_nice_error());
    }
    if ell < 1 || m % cmul(ell, ell)? != 0 {
        return Err(Error::LevelNotAllowed { ell, m });
    }
    let p1 = t.d1().parity();
    let p2 = t.d2().parity();
    let d1 = t.d1().value();
    let d2 = t.d2().value();
    let x = t.x();
    let z = Rat::zero;
    let r = |n: Int, d: Int| rdiv_int(n, d);
    Ok(vec![
        [rat(1), z(), z(), z()],
        [r(p1, 2)?, r(1, 2)?, z(), z()],
        [r(p2, 2)?, z(), r(1, 2)?, z()],
        [z(), z(), z(), r(1, 2)?],
        [
            r(cadd_i(cmul(p1, p2)?, x)?, 4)?,
            r(p2, 4)?,
            r(p1, 4)?,
            r(ell, 4)?,
        ],
        [z(), r(-x, cmul(4, ell)?)?, r(d1, cmul(4, ell)?)?, r(p1, 4)?],
        [z(), r(-d2, cmul(4, ell)?)?, r(x, cmul(4, ell)?)?, r(p2, 4)?],
        [
            r(cmul(-4, m)?, cmul(8, ell)?)?,
            r(-cadd_i(cmul(p2, x)?, cmul(p1, d2)?)?, cmul(8, ell)?)?,
            r(cadd_i(cmul(p1, x)?, cmul(p2, d1)?)?, cmul(8, ell)?)?,
            r(cadd_i(cmul(p1, p2)?, x)?, 8)?,
        ],
    ])
}

fn cadd_i(a: Int, b: Int) -> Result<Int> {
    crate::arith::cadd(a, b)
}

/// HNF of the appendix rows in the embedding frame (1, w1, w2, w3).
pub fn appendix_lattice(t: &Triple, ell: Int) -> Result<Hnf> {
    let rows = appendix_rows(t, ell)?;
    hnf(&rows)
}

/// JSON presentation of a lattice: exact rationals as strings, integer
/// rows over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub algebra: [String; 2],
    pub denominator: i64,
    pub rows: [[i64; 4]; 4],
}

impl RationalLattice {
    pub fn to_json(&self) -> Result<LatticeJson> {
        let to64 = |x: Int| -> Result<i64> { i64::try_from(x).map_err(|_| Error::Overflow) };
        let mut rows = [[0i64; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                rows[i][j] = to64(self.hnf.rows[i][j])?;
            }
        }
        Ok(LatticeJson {
            algebra: [
                rat_display(self.algebra.a()),
                rat_display(self.algebra.b()),
            ],
            denominator: to64(self.hnf.den)?,
            rows,
        })
    }

    /// Rebuilds (and re-canonicalizes) a lattice from its JSON form.
    pub fn from_json(json: &LatticeJson) -> Result<Self> {
        let a = rat_parse(&json.algebra[0])?;
        let b = rat_parse(&json.algebra[1])?;
        let algebra = QuatAlgebra::new(a, b)?;
        let den = json.denominator as Int;
        if den <= 0 {
            return Err(Error::InvalidArgument("denominator must be positive".into()));
        }
        let mut rows: Vec<[Rat; 4]> = Vec::with_capacity(4);
        for r in &json.rows {
            let mut row = [Rat::zero(), Rat::zero(), Rat::zero(), Rat::zero()];
            for (j, &x) in r.iter().enumerate() {
                row[j] = rdiv_int(x as Int, den)?;
            }
            rows.push(row);
        }
        RationalLattice::from_rows(algebra, &rows)
    }
}
