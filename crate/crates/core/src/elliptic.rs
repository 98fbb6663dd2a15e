//! Elliptic curves `y² = x³ + ax + b` over prime fields and over ℚ.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::FgAbGroup;
use crate::verdict::Conclusion;

pub const MAX_PRIME: u64 = 10_000;
pub const MAX_RATIONAL_COEFFICIENT: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EllipticError {
    #[error("curve is singular: 4a^3 + 27b^2 = 0")]
    Singular,
    #[error("field characteristic must be a prime in 5..={MAX_PRIME}, got {0}")]
    BadPrime(u64),
    #[error("coefficients must satisfy |a|, |b| <= {MAX_RATIONAL_COEFFICIENT}")]
    CoefficientBound,
    #[error("point is not on the curve")]
    NotOnCurve,
}

pub trait FieldOps: Clone + fmt::Debug {
    type E: Clone + Eq + Ord + Hash + fmt::Debug;
    fn zero(&self) -> Self::E;
    fn from_int(&self, n: &BigInt) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Panics on zero.
    fn inv(&self, a: &Self::E) -> Self::E;
    fn render(&self, a: &Self::E) -> String;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }

    fn small(&self, n: i64) -> Self::E {
        self.from_int(&BigInt::from(n))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp(pub u64);

impl FieldOps for Fp {
    type E = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn from_int(&self, n: &BigInt) -> u64 {
        n.mod_floor(&BigInt::from(self.0)).to_u64().expect("reduced")
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.0
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.0 - a) % self.0
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.0 as u128) as u64
    }
    fn inv(&self, a: &u64) -> u64 {
        assert!(*a != 0, "inverse of zero");
        let e = (*a as i128).extended_gcd(&(self.0 as i128));
        e.x.rem_euclid(self.0 as i128) as u64
    }
    fn render(&self, a: &u64) -> String {
        a.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rationals;

impl FieldOps for Rationals {
    type E = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        assert!(!a.is_zero(), "inverse of zero");
        a.recip()
    }
    fn render(&self, a: &BigRational) -> String {
        a.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point<E> {
    Infinity,
    Affine(E, E),
}

#[derive(Clone, Debug)]
pub struct Curve<F: FieldOps> {
    pub field: F,
    pub a: F::E,
    pub b: F::E,
}

impl<F: FieldOps> Curve<F> {
    pub fn new(field: F, a: &BigInt, b: &BigInt) -> Result<Self, EllipticError> {
        let c = Curve {
            a: field.from_int(a),
            b: field.from_int(b),
            field,
        };
        if c.field_discriminant() == c.field.zero() {
            return Err(EllipticError::Singular);
        }
        Ok(c)
    }

    /// `4a³ + 27b²` in the field.
    fn field_discriminant(&self) -> F::E {
        let f = &self.field;
        let a3 = f.mul(&self.a, &f.mul(&self.a, &self.a));
        let b2 = f.mul(&self.b, &self.b);
        f.add(&f.mul(&f.small(4), &a3), &f.mul(&f.small(27), &b2))
    }

    pub fn rhs(&self, x: &F::E) -> F::E {
        let f = &self.field;
        let x3 = f.mul(x, &f.mul(x, x));
        f.add(&f.add(&x3, &f.mul(&self.a, x)), &self.b)
    }

    pub fn contains(&self, p: &Point<F::E>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => self.field.mul(y, y) == self.rhs(x),
        }
    }

    pub fn point(&self, x: F::E, y: F::E) -> Result<Point<F::E>, EllipticError> {
        let p = Point::Affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(EllipticError::NotOnCurve)
        }
    }

    pub fn neg(&self, p: &Point<F::E>) -> Point<F::E> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x.clone(), self.field.neg(y)),
        }
    }

    /// Chord-and-tangent addition.
    pub fn add(&self, p: &Point<F::E>, q: &Point<F::E>) -> Point<F::E> {
        let f = &self.field;
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return q.clone(),
            (_, Point::Infinity) => return p.clone(),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if f.add(y1, y2) == f.zero() {
                return Point::Infinity;
            }
            let num = f.add(&f.mul(&f.small(3), &f.mul(x1, x1)), &self.a);
            f.mul(&num, &f.inv(&f.mul(&f.small(2), y1)))
        } else {
            f.mul(&f.sub(y2, y1), &f.inv(&f.sub(x2, x1)))
        };
        let x3 = f.sub(&f.sub(&f.mul(&lambda, &lambda), x1), x2);
        let y3 = f.sub(&f.mul(&lambda, &f.sub(x1, &x3)), y1);
        Point::Affine(x3, y3)
    }

    pub fn mul(&self, k: u64, p: &Point<F::E>) -> Point<F::E> {
        let mut acc = Point::Infinity;
        let mut base = p.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn render(&self, p: &Point<F::E>) -> String {
        match p {
            Point::Infinity => "O".into(),
            Point::Affine(x, y) => format!("({}, {})", self.field.render(x), self.field.render(y)),
        }
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Order of `p` in a group of order `n`.
pub fn point_order<F: FieldOps>(curve: &Curve<F>, p: &Point<F::E>, n: u64) -> u64 {
    let mut ord = n;
    for q in prime_factors(n) {
        while ord % q == 0 && curve.mul(ord / q, p) == Point::Infinity {
            ord /= q;
        }
    }
    ord
}

/// `ℤ/d₁ × ℤ/d₂` with `d₁ | d₂`, certified by generators `p` of order `d₂`
/// and `q` of order `d₁` with `⟨p⟩ ∩ ⟨q⟩ = {O}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupStructure {
    pub order: u64,
    pub d1: u64,
    pub d2: u64,
    pub generators: Vec<String>,
    pub certified: bool,
    pub group: FgAbGroup,
}

/// Structure of the finite group formed by `points`, which must be closed
/// under the group law.
pub fn certify_structure<F: FieldOps>(curve: &Curve<F>, points: &[Point<F::E>]) -> GroupStructure {
    let n = points.len() as u64;
    let orders: Vec<u64> = points.iter().map(|p| point_order(curve, p, n)).collect();
    let d2 = orders.iter().copied().max().unwrap_or(1);
    let d1 = n / d2;
    let p_idx = orders.iter().position(|&o| o == d2).expect("nonempty");
    let p = &points[p_idx];
    let mut cyclic_p = BTreeSet::new();
    let mut acc = Point::Infinity;
    for _ in 0..d2 {
        cyclic_p.insert(acc.clone());
        acc = curve.add(&acc, p);
    }
    let q = points.iter().zip(&orders).find(|(q, &o)| {
        o == d1 && {
            let mut m = (*q).clone();
            (1..d1).all(|_| {
                let outside = !cyclic_p.contains(&m);
                m = curve.add(&m, q);
                outside
            })
        }
    });
    let certified = n % d2 == 0 && d2 % d1 == 0 && q.is_some();
    let mut generators = vec![curve.render(p)];
    if let Some((q, _)) = q {
        if d1 > 1 {
            generators.push(curve.render(q));
        }
    }
    let group = FgAbGroup::from_cyclic_orders(0, &[BigInt::from(d1), BigInt::from(d2)]);
    GroupStructure {
        order: n,
        d1,
        d2,
        generators,
        certified,
        group,
    }
}

fn check_prime(p: u64) -> Result<(), EllipticError> {
    let prime = crate::group_ring::BaseRing::prime_field(p).is_ok();
    if p < 5 || p > MAX_PRIME || !prime {
        return Err(EllipticError::BadPrime(p));
    }
    Ok(())
}

pub fn curve_over_fp(p: u64, a: &BigInt, b: &BigInt) -> Result<Curve<Fp>, EllipticError> {
    check_prime(p)?;
    Curve::new(Fp(p), a, b)
}

/// All points, `O` first, then affine points by increasing `(x, y)`.
pub fn enumerate_points(curve: &Curve<Fp>) -> Vec<Point<u64>> {
    let p = curve.field.0;
    let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p as usize];
    for y in 0..p {
        roots[curve.field.mul(&y, &y) as usize].push(y);
    }
    let mut out = vec![Point::Infinity];
    for x in 0..p {
        for &y in &roots[curve.rhs(&x) as usize] {
            out.push(Point::Affine(x, y));
        }
    }
    let n = out.len() as i64;
    let t = n - p as i64 - 1;
    assert!(t * t <= 4 * p as i64, "point count {n} violates the Hasse bound");
    out
}

pub fn group_structure(curve: &Curve<Fp>) -> GroupStructure {
    certify_structure(curve, &enumerate_points(curve))
}

pub fn curve_over_q(a: i64, b: i64) -> Result<Curve<Rationals>, EllipticError> {
    if a.abs() > MAX_RATIONAL_COEFFICIENT || b.abs() > MAX_RATIONAL_COEFFICIENT {
        return Err(EllipticError::CoefficientBound);
    }
    Curve::new(Rationals, &BigInt::from(a), &BigInt::from(b))
}

/// `4a³ + 27b²` over the integers.
pub fn integer_discriminant(a: i64, b: i64) -> BigInt {
    let a = BigInt::from(a);
    let b = BigInt::from(b);
    BigInt::from(4) * &a * &a * &a + BigInt::from(27) * &b * &b
}

/// Nonnegative `y` with `y² | d`, `d ≠ 0`.
fn square_divisor_roots(d: &BigInt) -> Vec<BigInt> {
    let mut n = d.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let bound = n.cbrt() + 1u32;
    let mut p = BigInt::from(2);
    while p <= bound {
        if n.is_multiple_of(&p) {
            let mut e = 0;
            while n.is_multiple_of(&p) {
                n /= &p;
                e += 1;
            }
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    // what is left has at most two prime factors, both above the cube root,
    // so it contributes a square only if it is itself a prime squared
    if n > BigInt::one() {
        let r = n.sqrt();
        if &r * &r == n {
            factors.push((r, 2));
        }
    }
    let mut roots = vec![BigInt::one()];
    for (q, e) in factors {
        let mut next = Vec::new();
        for r in &roots {
            let mut m = r.clone();
            for _ in 0..=e / 2 {
                next.push(m.clone());
                m *= &q;
            }
        }
        roots = next;
    }
    roots.sort();
    roots
}

/// Integer roots of `x³ + ax + c`.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + c;
    let mut roots = BTreeSet::new();
    // |root| <= 1 + max(|a|, |c|)
    let bound = BigInt::one() + a.abs().max(c.abs());
    let s = if a.is_negative() {
        (-a / BigInt::from(3)).sqrt() + 1u32
    } else {
        BigInt::zero()
    };
    // f is increasing outside [-s, s]; scan the middle, bisect the tails
    let mut x = -&s;
    while x <= s {
        if f(&x).is_zero() {
            roots.insert(x.clone());
        }
        x += 1;
    }
    for (lo, hi) in [(s.clone(), bound.clone()), (-&bound, -&s)] {
        if lo > hi {
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        if f(&lo).is_positive() || f(&hi).is_negative() {
            continue;
        }
        while &hi - &lo > BigInt::one() {
            let mid = (&lo + &hi).div_floor(&BigInt::from(2));
            if f(&mid).is_negative() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for r in [lo, hi] {
            if f(&r).is_zero() {
                roots.insert(r);
            }
        }
    }
    roots.into_iter().collect()
}

/// Integral points allowed by the Nagell–Lutz conditions.
pub fn nagell_lutz_candidates(curve: &Curve<Rationals>, a: i64, b: i64) -> Vec<Point<BigRational>> {
    let d = integer_discriminant(a, b);
    let a_big = BigInt::from(a);
    let mut ys = vec![BigInt::zero()];
    ys.extend(square_divisor_roots(&d));
    let mut out = Vec::new();
    for y in ys {
        let c = BigInt::from(b) - &y * &y;
        for x in integer_cubic_roots(&a_big, &c) {
            let xq = BigRational::from_integer(x);
            let yq = BigRational::from_integer(y.clone());
            out.push(Point::Affine(xq.clone(), yq.clone()));
            if !y.is_zero() {
                out.push(Point::Affine(xq, -yq));
            }
        }
    }
    debug_assert!(out.iter().all(|p| curve.contains(p)));
    out.sort();
    out
}

/// Torsion subgroup of `E(ℚ)`: candidates whose multiples stay among the
/// candidates until they reach `O`.
pub fn rational_torsion_points(curve: &Curve<Rationals>, a: i64, b: i64) -> Vec<Point<BigRational>> {
    let candidates: BTreeSet<Point<BigRational>> = nagell_lutz_candidates(curve, a, b).into_iter().collect();
    let mut torsion = vec![Point::Infinity];
    for p in &candidates {
        let mut m = p.clone();
        for _ in 0..=candidates.len() {
            m = curve.add(&m, p);
            if m == Point::Infinity {
                torsion.push(p.clone());
                break;
            }
            if !candidates.contains(&m) {
                break;
            }
        }
    }
    torsion
}

pub fn rational_torsion(a: i64, b: i64) -> Result<GroupStructure, EllipticError> {
    let curve = curve_over_q(a, b)?;
    let points = rational_torsion_points(&curve, a, b);
    Ok(certify_structure(&curve, &points))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveField {
    Prime(u64),
    Rationals,
}

impl fmt::Display for CurveField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveField::Prime(p) => write!(f, "F{p}"),
            CurveField::Rationals => write!(f, "Q"),
        }
    }
}

/// A curve `y² = x³ + ax + b` over a named field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveHandle {
    pub field: CurveField,
    pub a: i64,
    pub b: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionReport {
    pub curve: String,
    pub field: String,
    /// `E(k)` for a finite field, `E(ℚ)_tors` for the rationals.
    pub structure: GroupStructure,
    pub hasse_bound_holds: Option<bool>,
}

impl CurveHandle {
    pub fn equation(&self) -> String {
        let term = |c: i64, s: &str| {
            let m = c.unsigned_abs();
            let body = if m == 1 && !s.is_empty() { s.to_string() } else { format!("{m}{s}") };
            match c {
                0 => String::new(),
                c if c < 0 => format!(" - {body}"),
                _ => format!(" + {body}"),
            }
        };
        format!("y^2 = x^3{}{}", term(self.a, "x"), term(self.b, ""))
    }

    /// The torsion of `Pic⁰(E)(k) = E(k)`.
    pub fn torsion(&self) -> Result<TorsionReport, EllipticError> {
        let (structure, hasse) = match self.field {
            CurveField::Prime(p) => {
                let curve = curve_over_fp(p, &BigInt::from(self.a), &BigInt::from(self.b))?;
                let s = group_structure(&curve);
                let t = s.order as i64 - p as i64 - 1;
                (s, Some(t * t <= 4 * p as i64))
            }
            CurveField::Rationals => (rational_torsion(self.a, self.b)?, None),
        };
        Ok(TorsionReport {
            curve: self.equation(),
            field: self.field.to_string(),
            structure,
            hasse_bound_holds: hasse,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaVerdict {
    pub conclusion: Conclusion,
    pub torsion: TorsionReport,
    pub trace: Vec<String>,
}

/// `Br = Br′` for `BE` exactly when `E(k)` has no torsion.
pub fn verdict_ba(curve: &CurveHandle) -> Result<BaVerdict, EllipticError> {
    let torsion = curve.torsion()?;
    let g = &torsion.structure.group;
    let conclusion = if g.is_trivial() {
        Conclusion::BrEqualsBrPrime
    } else {
        Conclusion::BrNotEqual
    };
    let method = match curve.field {
        CurveField::Prime(_) => "exhaustive point enumeration",
        CurveField::Rationals => "Nagell-Lutz candidate search",
    };
    let trace = vec![
        "imported: Pic0(E)(k) = E(k)".to_string(),
        format!("computed by {method}: torsion of E({}) = {g}", curve.field),
        format!("abelian varieties over a field: Br = Br' for BA iff Pic0(k) is torsion-free, so {conclusion}"),
    ];
    Ok(BaVerdict {
        conclusion,
        torsion,
        trace,
    })
}

/// Every nonsingular curve over `F_p` for the given prime.
pub fn all_curves(p: u64) -> Vec<CurveHandle> {
    (0..p as i64)
        .flat_map(|a| (0..p as i64).map(move |b| (a, b)))
        .filter(|&(a, b)| curve_over_fp(p, &BigInt::from(a), &BigInt::from(b)).is_ok())
        .map(|(a, b)| CurveHandle {
            field: CurveField::Prime(p),
            a,
            b,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fp_curve(p: u64, a: i64, b: i64) -> Curve<Fp> {
        curve_over_fp(p, &BigInt::from(a), &BigInt::from(b)).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    /// Point count by summing Legendre symbols, independent of enumeration.
    fn legendre_count(p: u64, a: i64, b: i64) -> u64 {
        let f = Fp(p);
        let c = fp_curve(p, a, b);
        let mut n = 1;
        for x in 0..p {
            let r = c.rhs(&x);
            if r == 0 {
                n += 1;
            } else {
                let mut e = 1u64;
                let mut base = r;
                let mut k = (p - 1) / 2;
                while k > 0 {
                    if k & 1 == 1 {
                        e = f.mul(&e, &base);
                    }
                    base = f.mul(&base, &base);
                    k >>= 1;
                }
                if e == 1 {
                    n += 2;
                }
            }
        }
        n
    }

    #[test]
    fn small_point_sets() {
        let c = fp_curve(5, 1, 0);
        let pts = enumerate_points(&c);
        assert!(pts.contains(&Point::Affine(0, 0)));
        assert_eq!(pts[0], Point::Infinity);
        let c = fp_curve(5, 0, 1);
        assert!(enumerate_points(&c).contains(&Point::Affine(4, 0)));
        // y^2 = x^3 + x + 1 over F5: x = 0, 2, 3, 4 give 2 roots each, plus O
        assert_eq!(enumerate_points(&fp_curve(5, 1, 1)).len(), 9);
        assert_eq!(legendre_count(5, 1, 1), 9);
    }

    #[test]
    fn counts_match_legendre_oracle() {
        for p in [5u64, 7, 11, 13, 101] {
            for h in all_curves(p).into_iter().take(40) {
                let c = fp_curve(p, h.a, h.b);
                assert_eq!(enumerate_points(&c).len() as u64, legendre_count(p, h.a, h.b));
            }
        }
    }

    #[test]
    fn singular_rejected() {
        assert_eq!(curve_over_fp(5, &0.into(), &0.into()).unwrap_err(), EllipticError::Singular);
        assert_eq!(curve_over_fp(4, &1.into(), &1.into()).unwrap_err(), EllipticError::BadPrime(4));
        assert_eq!(curve_over_fp(3, &1.into(), &1.into()).unwrap_err(), EllipticError::BadPrime(3));
        assert!(matches!(curve_over_q(-3, 2), Err(EllipticError::Singular)));
    }

    #[test]
    fn group_law_axioms_exhaustive() {
        for p in [5u64, 7, 11, 13] {
            for h in all_curves(p).into_iter().step_by(7) {
                let c = fp_curve(p, h.a, h.b);
                let pts = enumerate_points(&c);
                for x in &pts {
                    assert_eq!(c.add(x, &Point::Infinity), *x);
                    assert_eq!(c.add(x, &c.neg(x)), Point::Infinity);
                    for y in &pts {
                        assert_eq!(c.add(x, y), c.add(y, x));
                        for z in pts.iter().step_by(3) {
                            assert_eq!(c.add(&c.add(x, y), z), c.add(x, &c.add(y, z)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_torsion_doubles_to_infinity() {
        let c = fp_curve(7, 1, 0);
        assert_eq!(c.add(&Point::Affine(0, 0), &Point::Affine(0, 0)), Point::Infinity);
    }

    #[test]
    fn finite_structures_are_certified() {
        for p in [5u64, 7, 11, 13] {
            for h in all_curves(p) {
                let s = group_structure(&fp_curve(p, h.a, h.b));
                assert!(s.certified, "p={p} a={} b={}", h.a, h.b);
                assert_eq!(s.d1 * s.d2, s.order);
                assert_eq!(s.d2 % s.d1, 0);
                assert_eq!((p - 1) % s.d1, 0);
                assert!(s.order > 1);
            }
        }
    }

    #[test]
    fn rational_examples() {
        // y^2 = x^3 - x: full 2-torsion
        let s = rational_torsion(-1, 0).unwrap();
        assert_eq!(s.group, "Z/2 + Z/2".parse().unwrap());
        // y^2 = x^3 + 2: no torsion
        assert!(rational_torsion(0, 2).unwrap().group.is_trivial());
        // y^2 = x^3 + 1: (2, 3) has order 6
        let c = curve_over_q(0, 1).unwrap();
        let p = c.point(q(2), q(3)).unwrap();
        assert_eq!(point_order(&c, &p, 6), 6);
        assert_eq!(rational_torsion(0, 1).unwrap().group, FgAbGroup::cyclic(6));
        // y^2 = x^3 + x + 1 has a point (0,1) of infinite order
        assert!(rational_torsion(1, 1).unwrap().group.is_trivial());
        // y^2 = x^3 - 43x + 166 has a rational point of order 7
        assert_eq!(rational_torsion(-43, 166).unwrap().group, FgAbGroup::cyclic(7));
    }

    #[test]
    fn torsion_is_closed() {
        for (a, b) in [(-1, 0), (0, 1), (-43, 166), (0, -1), (4, 0)] {
            let c = curve_over_q(a, b).unwrap();
            let t: BTreeSet<_> = rational_torsion_points(&c, a, b).into_iter().collect();
            for x in &t {
                for y in &t {
                    assert!(t.contains(&c.add(x, y)));
                }
            }
        }
    }

    #[test]
    fn cubic_roots_and_square_divisors() {
        let roots = integer_cubic_roots(&BigInt::from(-7), &BigInt::from(6));
        assert_eq!(roots, vec![BigInt::from(-3), BigInt::from(1), BigInt::from(2)]);
        let ys: Vec<i64> = square_divisor_roots(&BigInt::from(-432)).iter().map(|y| y.to_i64().unwrap()).collect();
        assert_eq!(ys, vec![1, 2, 3, 4, 6, 12]);
        // a large prime squared survives the cube-root trial division
        let big = BigInt::from(1_000_003u64) * BigInt::from(1_000_003u64) * 2;
        assert!(square_divisor_roots(&big).contains(&BigInt::from(1_000_003u64)));
    }

    #[test]
    fn ba_verdicts() {
        for p in [5u64, 7] {
            for h in all_curves(p) {
                assert_eq!(verdict_ba(&h).unwrap().conclusion, Conclusion::BrNotEqual);
            }
        }
        let q = |a, b| CurveHandle { field: CurveField::Rationals, a, b };
        assert_eq!(verdict_ba(&q(-1, 0)).unwrap().conclusion, Conclusion::BrNotEqual);
        assert_eq!(verdict_ba(&q(0, 2)).unwrap().conclusion, Conclusion::BrEqualsBrPrime);
    }

    #[test]
    fn equations_print() {
        let h = CurveHandle { field: CurveField::Rationals, a: -1, b: 0 };
        assert_eq!(h.equation(), "y^2 = x^3 - x");
        let h = CurveHandle { field: CurveField::Prime(7), a: 3, b: -1 };
        assert_eq!(h.equation(), "y^2 = x^3 + 3x - 1");
    }
}
