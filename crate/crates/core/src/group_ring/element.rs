use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

use super::{text, BaseRing, RingError, Scalar};

/// A finitely supported map `ℤ^r → A` with no zero coefficients stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElement {
    base: BaseRing,
    rank: usize,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitRecognition {
    Unit { coefficient: Scalar, exponent: Vec<i64> },
    NotUnit(NotUnitReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotUnitReason {
    Zero,
    NotMonomial { terms: usize },
    CoefficientNotUnit { coefficient: Scalar },
}

impl fmt::Display for NotUnitReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotUnitReason::Zero => write!(f, "zero element"),
            NotUnitReason::NotMonomial { terms } => write!(f, "{terms} terms, not a monomial"),
            NotUnitReason::CoefficientNotUnit { .. } => write!(f, "coefficient is not a unit"),
        }
    }
}

impl GroupRingElement {
    pub fn zero(base: &BaseRing, rank: usize) -> Self {
        GroupRingElement {
            base: base.clone(),
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(base: &BaseRing, rank: usize) -> Self {
        Self::constant(base, rank, base.one())
    }

    pub fn constant(base: &BaseRing, rank: usize, c: Scalar) -> Self {
        Self::monomial(base, rank, c, vec![0; rank])
    }

    pub fn from_int(base: &BaseRing, rank: usize, n: impl Into<BigInt>) -> Self {
        Self::constant(base, rank, base.from_int(n.into()))
    }

    /// `c·t^exponent`; panics if the exponent length is not `rank`.
    pub fn monomial(base: &BaseRing, rank: usize, c: Scalar, exponent: Vec<i64>) -> Self {
        assert_eq!(exponent.len(), rank, "exponent vector of wrong length");
        let mut x = Self::zero(base, rank);
        let c = base.normalize(&c);
        if !base.is_zero(&c) {
            x.terms.insert(exponent, c);
        }
        x
    }

    /// The generator `t_i` (0-based `i`).
    pub fn variable(base: &BaseRing, rank: usize, i: usize) -> Self {
        let mut e = vec![0; rank];
        e[i] = 1;
        Self::monomial(base, rank, base.one(), e)
    }

    pub fn from_terms(
        base: &BaseRing,
        rank: usize,
        terms: impl IntoIterator<Item = (Vec<i64>, Scalar)>,
    ) -> Self {
        let mut x = Self::zero(base, rank);
        for (e, c) in terms {
            assert_eq!(e.len(), rank, "exponent vector of wrong length");
            x.add_term(e, base.normalize(&c));
        }
        x
    }

    pub fn base(&self) -> &BaseRing {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Terms in ascending lexicographic order of exponents.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Vec<i64>, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponent: &[i64]) -> Scalar {
        self.terms
            .get(exponent)
            .cloned()
            .unwrap_or_else(|| self.base.zero())
    }

    fn add_term(&mut self, e: Vec<i64>, c: Scalar) {
        if self.base.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = self.base.add(old, &c);
                if self.base.is_zero(&s) {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.base != other.base {
            return Err(RingError::Mismatch(format!(
                "{} versus {}",
                self.base, other.base
            )));
        }
        if self.rank != other.rank {
            return Err(RingError::Mismatch(format!(
                "lattice rank {} versus {}",
                self.rank, other.rank
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            base: self.base.clone(),
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.base.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, RingError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let mut out = Self::zero(&self.base, self.rank);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, self.base.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(&self.base, self.rank);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), self.base.mul(x, c));
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(&self.base, self.rank);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Integer power; negative exponents need a monomial with unit coefficient.
    pub fn pow_signed(&self, k: i64) -> Result<Self, RingError> {
        if k >= 0 {
            return Ok(self.pow(k as u32));
        }
        let inv = self
            .monomial_inverse()
            .ok_or_else(|| RingError::NotInvertible(format!("{self}")))?;
        Ok(inv.pow(k.unsigned_abs() as u32))
    }

    /// Inverse of `u·t^m` when `u` is a base unit.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next()?;
        let ci = self.base.inverse(c)?;
        Some(Self::monomial(
            &self.base,
            self.rank,
            ci,
            e.iter().map(|x| -x).collect(),
        ))
    }

    /// Replaces exponents by `exp ↦ f(exp)`, which must be injective on the support
    /// or the terms are summed.
    pub fn map_exponents(&self, new_rank: usize, f: impl Fn(&[i64]) -> Vec<i64>) -> Self {
        let mut out = Self::zero(&self.base, new_rank);
        for (e, c) in &self.terms {
            let e2 = f(e);
            assert_eq!(e2.len(), new_rank);
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one(&self.base, self.rank)
    }

    /// Decides whether `self = u·t^m` for a base unit `u`; only valid over
    /// bases certified to be integral domains.
    pub fn recognize_unit(&self) -> Result<UnitRecognition, RingError> {
        match self.base.certify_domain()? {
            true => {}
            false => {
                return Err(RingError::UnsupportedBase(format!(
                    "{} is not an integral domain",
                    self.base
                )))
            }
        }
        Ok(self.monomial_unit_test())
    }

    /// The monomial-with-unit-coefficient test alone, valid as a sufficient
    /// condition over every base.
    pub fn monomial_unit_test(&self) -> UnitRecognition {
        if self.terms.is_empty() {
            return UnitRecognition::NotUnit(NotUnitReason::Zero);
        }
        if self.terms.len() > 1 {
            return UnitRecognition::NotUnit(NotUnitReason::NotMonomial {
                terms: self.terms.len(),
            });
        }
        let (e, c) = self.terms.iter().next().expect("one term");
        if self.base.is_unit(c) {
            UnitRecognition::Unit {
                coefficient: c.clone(),
                exponent: e.clone(),
            }
        } else {
            UnitRecognition::NotUnit(NotUnitReason::CoefficientNotUnit {
                coefficient: c.clone(),
            })
        }
    }

    /// Text form with generator `i` printed as `names(i)`.
    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        text::render_element(self, names)
    }
}

pub(crate) fn default_name(i: usize) -> String {
    format!("t{}", i + 1)
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&default_name))
    }
}

impl Serialize for GroupRingElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_ring::parse_element;
    use proptest::prelude::*;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    fn el(base: &BaseRing, rank: usize, s: &str) -> GroupRingElement {
        parse_element(base, rank, s).unwrap()
    }

    #[test]
    fn inverse_monomials_cancel() {
        let x = el(&z(), 2, "t1");
        let y = el(&z(), 2, "t1^-1");
        assert!(x.mul(&y).unwrap().is_one());
    }

    #[test]
    fn difference_of_squares() {
        let b = z();
        let x = el(&b, 1, "t1 - 1").mul(&el(&b, 1, "t1 + 1")).unwrap();
        assert_eq!(x, el(&b, 1, "t1^2 - 1"));
        assert_eq!(x.to_string(), "t1^2 - 1");
    }

    #[test]
    fn nilpotent_perturbation_squares_away() {
        let b = BaseRing::quotient(
            z(),
            "a",
            vec![Scalar::Int(0.into()), Scalar::Int(0.into()), Scalar::Int(1.into())],
        )
        .unwrap();
        let p = el(&b, 1, "t1 + a").mul(&el(&b, 1, "t1 - a")).unwrap();
        assert_eq!(p, el(&b, 1, "t1^2"));
    }

    #[test]
    fn recognition_examples() {
        let f7 = BaseRing::prime_field(7).unwrap();
        let x = el(&f7, 2, "5*t1^2*t2^-1");
        assert_eq!(
            x.recognize_unit().unwrap(),
            UnitRecognition::Unit {
                coefficient: Scalar::Int(5.into()),
                exponent: vec![2, -1]
            }
        );
        assert_eq!(
            el(&z(), 2, "t1 + t2").recognize_unit().unwrap(),
            UnitRecognition::NotUnit(NotUnitReason::NotMonomial { terms: 2 })
        );
        assert_eq!(
            el(&z(), 2, "2*t1").recognize_unit().unwrap(),
            UnitRecognition::NotUnit(NotUnitReason::CoefficientNotUnit {
                coefficient: Scalar::Int(2.into())
            })
        );
        let z6 = BaseRing::integers_mod(6).unwrap();
        assert!(matches!(
            el(&z6, 1, "t1").recognize_unit(),
            Err(RingError::UnsupportedBase(_))
        ));
    }

    #[test]
    fn mismatched_rings_rejected() {
        let a = el(&z(), 1, "t1");
        let b = el(&BaseRing::prime_field(5).unwrap(), 1, "t1");
        assert!(matches!(a.add(&b), Err(RingError::Mismatch(_))));
        assert!(matches!(a.mul(&el(&z(), 2, "t1")), Err(RingError::Mismatch(_))));
    }

    fn raw_terms(rank: usize) -> impl Strategy<Value = Vec<(Vec<i64>, i64)>> {
        prop::collection::vec((prop::collection::vec(-2i64..=2, rank), -4i64..=4), 0..5)
    }

    fn build(base: &BaseRing, rank: usize, ts: &[(Vec<i64>, i64)]) -> GroupRingElement {
        GroupRingElement::from_terms(
            base,
            rank,
            ts.iter().map(|(e, c)| (e.clone(), Scalar::Int((*c).into()))),
        )
    }

    fn arb_element(base: BaseRing, rank: usize) -> impl Strategy<Value = GroupRingElement> {
        raw_terms(rank).prop_map(move |ts| build(&base, rank, &ts))
    }

    fn bases() -> Vec<BaseRing> {
        vec![
            z(),
            BaseRing::integers_mod(6).unwrap(),
            BaseRing::prime_field(5).unwrap(),
            BaseRing::quotient(
                z(),
                "a",
                vec![Scalar::Int(0.into()), Scalar::Int(0.into()), Scalar::Int(1.into())],
            )
            .unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn ring_axioms(
            which in 0usize..4,
            x in raw_terms(2),
            y in raw_terms(2),
            w in raw_terms(2),
        ) {
            let base = bases()[which].clone();
            let (x, y, w) = (build(&base, 2, &x), build(&base, 2, &y), build(&base, 2, &w));
            prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
            prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
            prop_assert_eq!(
                x.mul(&y).unwrap().mul(&w).unwrap(),
                x.mul(&y.mul(&w).unwrap()).unwrap()
            );
            prop_assert_eq!(
                x.mul(&y.add(&w).unwrap()).unwrap(),
                x.mul(&y).unwrap().add(&x.mul(&w).unwrap()).unwrap()
            );
            prop_assert!(x.sub(&x).unwrap().is_zero());
        }

        #[test]
        fn recognized_units_invert(x in arb_element(BaseRing::prime_field(5).unwrap(), 3)) {
            if let UnitRecognition::Unit { coefficient, exponent } = x.recognize_unit().unwrap() {
                let b = x.base().clone();
                let inv = GroupRingElement::monomial(
                    &b,
                    3,
                    b.inverse(&coefficient).unwrap(),
                    exponent.iter().map(|e| -e).collect(),
                );
                prop_assert!(x.mul(&inv).unwrap().is_one());
            }
        }

        #[test]
        fn products_of_polynomials_are_not_monomials(
            x in arb_element(BaseRing::Integers, 2),
            y in arb_element(BaseRing::Integers, 2),
        ) {
            prop_assume!(x.num_terms() >= 2 && y.num_terms() >= 2);
            let p = x.mul(&y).unwrap();
            prop_assert!(p.num_terms() >= 2);
            let unit = matches!(p.recognize_unit().unwrap(), UnitRecognition::Unit { .. });
            prop_assert!(!unit);
        }

        #[test]
        fn text_round_trip(which in 0usize..4, x in arb_element(BaseRing::Integers, 2)) {
            let base = bases()[which].clone();
            let x = GroupRingElement::from_terms(&base, 2, x.terms().map(|(e, c)| (e.clone(), c.clone())));
            let s = x.to_string();
            let back = parse_element(&base, 2, &s).unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
