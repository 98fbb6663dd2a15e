//! Units of the coordinate ring `A[X_{ij}, 1/det]` of `GL_n`.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::group_ring::{
    format_scalar, parse_in_env, BaseRing, GroupRingElement, GroupRingMatrix, RingError, Scalar,
};

pub const MAX_SIZE: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GlnError {
    #[error("matrix size {0} outside 1..=5")]
    SizeBound(usize),
    #[error("w * w_inv = {0}, not 1")]
    NotAUnit(String),
    #[error("size or base mismatch")]
    Mismatch,
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn check_size(n: usize) -> Result<(), GlnError> {
    if (1..=MAX_SIZE).contains(&n) {
        Ok(())
    } else {
        Err(GlnError::SizeBound(n))
    }
}

/// Variable `X_{i,j}` (1-based) sits at index `(i-1)·n + (j-1)`.
pub fn variable_names(n: usize) -> Vec<String> {
    (1..=n)
        .flat_map(|i| (1..=n).map(move |j| format!("X{i}{j}")))
        .collect()
}

pub fn variable(base: &BaseRing, n: usize, i: usize, j: usize) -> GroupRingElement {
    GroupRingElement::variable(base, n * n, (i - 1) * n + (j - 1))
}

/// Signed sum over all `n!` permutations.
pub fn determinant_poly(base: &BaseRing, n: usize) -> Result<GroupRingElement, GlnError> {
    check_size(n)?;
    let mut terms = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permutations(&mut perm, 0, &mut |p| {
        let inversions = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p[i] > p[j])
            .count();
        let mut e = vec![0i64; n * n];
        for (i, &j) in p.iter().enumerate() {
            e[i * n + j] = 1;
        }
        let c = if inversions % 2 == 0 { 1 } else { -1 };
        terms.push((e, base.from_int(c.into())));
    });
    Ok(GroupRingElement::from_terms(base, n * n, terms))
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// `X ↦ T·Id`: diagonal variables become `T`, the others `0`.
pub fn substitute_scalar_matrix(f: &GroupRingElement, n: usize) -> GroupRingElement {
    let terms = f.terms().filter_map(|(e, c)| {
        let off_diagonal = (0..n * n).any(|k| k / n != k % n && e[k] != 0);
        if off_diagonal {
            return None;
        }
        let deg: i64 = (0..n).map(|i| e[i * n + i]).sum();
        Some((vec![deg], c.clone()))
    });
    GroupRingElement::from_terms(f.base(), 1, terms)
}

/// Quotient and remainder of `f` by `det`, dividing leading terms in
/// lexicographic order; `det` has leading term `X11·X22·…·Xnn` with
/// coefficient 1, so the remainder is zero exactly when `det` divides `f`.
fn divide_by_det(f: &GroupRingElement, det: &GroupRingElement) -> (GroupRingElement, GroupRingElement) {
    let (lead_e, _) = det.terms().next_back().expect("det is nonzero");
    let lead_e = lead_e.clone();
    let rank = f.rank();
    let mut rem = f.clone();
    let mut quot = GroupRingElement::zero(f.base(), rank);
    let mut leftover = GroupRingElement::zero(f.base(), rank);
    loop {
        let Some((e, c)) = rem.terms().next_back().map(|(e, c)| (e.clone(), c.clone())) else {
            break;
        };
        let term = GroupRingElement::monomial(f.base(), rank, c.clone(), e.clone());
        if e.iter().zip(&lead_e).all(|(a, b)| a >= b) {
            let shift: Vec<i64> = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let q = GroupRingElement::monomial(f.base(), rank, c, shift);
            rem = rem.sub(&q.mul(det).expect("same ring")).expect("same ring");
            quot = quot.add(&q).expect("same ring");
        } else {
            rem = rem.sub(&term).expect("same ring");
            leftover = leftover.add(&term).expect("same ring");
        }
    }
    (quot, leftover)
}

/// `numerator / det^det_power` with `det` cancelled as far as possible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetRingElement {
    n: usize,
    numerator: GroupRingElement,
    det_power: u32,
}

impl DetRingElement {
    pub fn new(numerator: GroupRingElement, n: usize, det_power: u32) -> Result<Self, GlnError> {
        check_size(n)?;
        if numerator.rank() != n * n {
            return Err(GlnError::Mismatch);
        }
        let det = determinant_poly(numerator.base(), n)?;
        let mut x = DetRingElement {
            n,
            numerator,
            det_power,
        };
        if x.numerator.is_zero() {
            x.det_power = 0;
        }
        while x.det_power > 0 {
            let (q, r) = divide_by_det(&x.numerator, &det);
            if !r.is_zero() {
                break;
            }
            x.numerator = q;
            x.det_power -= 1;
        }
        Ok(x)
    }

    pub fn one(base: &BaseRing, n: usize) -> Result<Self, GlnError> {
        Self::new(GroupRingElement::one(base, n * n), n, 0)
    }

    /// `a·det^m` for any integer `m`.
    pub fn phi(base: &BaseRing, n: usize, a: &Scalar, m: i64) -> Result<Self, GlnError> {
        let det = determinant_poly(base, n)?;
        let a = GroupRingElement::constant(base, n * n, a.clone());
        if m >= 0 {
            Self::new(a.mul(&det.pow(m as u32))?, n, 0)
        } else {
            Self::new(a, n, m.unsigned_abs() as u32)
        }
    }

    pub fn base(&self) -> &BaseRing {
        self.numerator.base()
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn numerator(&self) -> &GroupRingElement {
        &self.numerator
    }

    pub fn det_power(&self) -> u32 {
        self.det_power
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GlnError> {
        if self.n != other.n || self.base() != other.base() {
            return Err(GlnError::Mismatch);
        }
        Self::new(
            self.numerator.mul(&other.numerator)?,
            self.n,
            self.det_power + other.det_power,
        )
    }

    pub fn is_one(&self) -> bool {
        self.det_power == 0 && self.numerator.is_one()
    }
}

impl fmt::Display for DetRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = variable_names(self.n);
        let num = self.numerator.render(&|i| names[i].clone());
        match self.det_power {
            0 => write!(f, "{num}"),
            1 => write!(f, "({num}) / det"),
            k => write!(f, "({num}) / det^{k}"),
        }
    }
}

impl Serialize for DetRingElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses `NUM` or `NUM / det^k`, where `NUM` may use `X11 … Xnn`, `det` and
/// the base ring variables.
pub fn parse_det_element(base: &BaseRing, n: usize, s: &str) -> Result<DetRingElement, GlnError> {
    check_size(n)?;
    let (num, power) = match s.rfind('/') {
        Some(i) if s[..i].matches('(').count() == s[..i].matches(')').count() => {
            let den = s[i + 1..].trim();
            let k = if den == "det" {
                1
            } else if let Some(k) = den.strip_prefix("det^") {
                k.trim()
                    .parse::<u32>()
                    .map_err(|_| RingError::Parse(format!("bad denominator {den:?}")))?
            } else {
                return Err(RingError::Parse(format!("denominator must be a power of det, got {den:?}")).into());
            };
            (&s[..i], k)
        }
        _ => (s, 0),
    };
    let rank = n * n;
    let mut env = HashMap::new();
    for v in base.variables() {
        let g = base.named_generator(&v).expect("declared variable");
        env.insert(v, GroupRingElement::constant(base, rank, g));
    }
    for (i, name) in variable_names(n).into_iter().enumerate() {
        env.insert(name, GroupRingElement::variable(base, rank, i));
    }
    env.insert("det".to_string(), determinant_poly(base, n)?);
    let numerator = parse_in_env(base, rank, &env, num)?;
    if numerator.terms().any(|(e, _)| e.iter().any(|&k| k < 0)) {
        return Err(RingError::Parse("negative powers are only allowed through det^k".into()).into());
    }
    DetRingElement::new(numerator, n, power)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiImage {
    pub a: String,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailingStage {
    /// `f(T·Id)` is zero.
    VanishesOnScalars,
    /// a single term whose degree is not a multiple of `n`
    DegreeNotMultiple,
    /// the forced coefficient is not a unit of the base
    CoefficientNotUnit,
    /// no candidate `a·det^k` equals the numerator
    NoExactMatch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PhiRecognition {
    Image(PhiImage),
    NotImage { stage: FailingStage, scalar_restriction: String },
}

/// Decides whether the unit `w` (with inverse `w_inv`) equals `a·det^m`.
pub fn recognize_phi_image(w: &DetRingElement, w_inv: &DetRingElement) -> Result<PhiRecognition, GlnError> {
    let prod = w.mul(w_inv)?;
    if !prod.is_one() {
        return Err(GlnError::NotAUnit(prod.to_string()));
    }
    let base = w.base();
    let n = w.n;
    let f = &w.numerator;
    let g = substitute_scalar_matrix(f, n);
    let restriction = g.render(&|_| "T".to_string());
    let not_image = |stage| {
        Ok(PhiRecognition::NotImage {
            stage,
            scalar_restriction: restriction.clone(),
        })
    };
    if g.is_zero() {
        return not_image(FailingStage::VanishesOnScalars);
    }
    let det = determinant_poly(base, n)?;
    let candidates: Vec<(i64, Scalar)> = if g.num_terms() == 1 {
        let (e, c) = g.terms().next().expect("one term");
        if e[0] % n as i64 != 0 {
            return not_image(FailingStage::DegreeNotMultiple);
        }
        if !base.is_unit(c) {
            return not_image(FailingStage::CoefficientNotUnit);
        }
        vec![(e[0] / n as i64, c.clone())]
    } else {
        let total_degree = f
            .terms()
            .map(|(e, _)| e.iter().sum::<i64>())
            .max()
            .unwrap_or(0);
        (0..=total_degree / n as i64)
            .map(|k| (k, g.coefficient(&[k * n as i64])))
            .filter(|(_, c)| base.is_unit(c))
            .collect()
    };
    for (k, a) in candidates {
        let candidate = GroupRingElement::constant(base, n * n, a.clone()).mul(&det.pow(k as u32))?;
        if &candidate == f {
            return Ok(PhiRecognition::Image(PhiImage {
                a: format_scalar(base, &a),
                m: k - w.det_power as i64,
            }));
        }
    }
    not_image(FailingStage::NoExactMatch)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub checked: usize,
    pub counterexamples: Vec<String>,
}

/// Checks `det·f ≠ 0` for each nonzero sample `f`.
pub fn det_nonzerodivisor_probe(base: &BaseRing, n: usize, samples: &[GroupRingElement]) -> Result<ProbeReport, GlnError> {
    let det = determinant_poly(base, n)?;
    let names = variable_names(n);
    let mut checked = 0;
    let mut counterexamples = Vec::new();
    for f in samples.iter().filter(|f| !f.is_zero()) {
        checked += 1;
        if det.mul(f)?.is_zero() {
            counterexamples.push(f.render(&|i| names[i].clone()));
        }
    }
    Ok(ProbeReport {
        checked,
        counterexamples,
    })
}

/// `det` after `X_{ii} ↦ X_{ii} + X_{11}` for `i ≥ 2`, as a polynomial in
/// `X11`: returns its degree and leading coefficient.
pub fn shifted_det_in_x11(base: &BaseRing, n: usize) -> Result<(i64, GroupRingElement), GlnError> {
    check_size(n)?;
    let x11 = variable(base, n, 1, 1);
    let rows = (1..=n)
        .map(|i| {
            (1..=n)
                .map(|j| {
                    let x = variable(base, n, i, j);
                    if i == j && i >= 2 {
                        x.add(&x11).expect("same ring")
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let det = GroupRingMatrix::from_rows(base, n * n, rows)?.determinant();
    let degree = det.terms().map(|(e, _)| e[0]).max().unwrap_or(0);
    let lead = GroupRingElement::from_terms(
        base,
        n * n,
        det.terms().filter(|(e, _)| e[0] == degree).map(|(e, c)| {
            let mut e = e.clone();
            e[0] = 0;
            (e, c.clone())
        }),
    );
    Ok((degree, lead))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dual() -> BaseRing {
        crate::group_ring::parse_base_ring("Z[a]/(a^2)").unwrap()
    }

    fn render(n: usize, f: &GroupRingElement) -> String {
        let names = variable_names(n);
        f.render(&|i| names[i].clone())
    }

    fn int(k: i64) -> Scalar {
        Scalar::Int(k.into())
    }

    #[test]
    fn small_determinants() {
        let z = BaseRing::Integers;
        assert_eq!(render(1, &determinant_poly(&z, 1).unwrap()), "X11");
        assert_eq!(render(2, &determinant_poly(&z, 2).unwrap()), "X11*X22 - X12*X21");
        let d3 = determinant_poly(&z, 3).unwrap();
        assert_eq!(d3.num_terms(), 6);
        // cofactor expansion along the first row
        let x = |i, j| variable(&z, 3, i, j);
        let minor = |a: (usize, usize), b: (usize, usize), c: (usize, usize), d: (usize, usize)| {
            x(a.0, a.1).mul(&x(b.0, b.1)).unwrap().sub(&x(c.0, c.1).mul(&x(d.0, d.1)).unwrap()).unwrap()
        };
        let cof = x(1, 1)
            .mul(&minor((2, 2), (3, 3), (2, 3), (3, 2)))
            .unwrap()
            .sub(&x(1, 2).mul(&minor((2, 1), (3, 3), (2, 3), (3, 1))).unwrap())
            .unwrap()
            .add(&x(1, 3).mul(&minor((2, 1), (3, 2), (2, 2), (3, 1))).unwrap())
            .unwrap();
        assert_eq!(d3, cof);
        assert_eq!(determinant_poly(&z, 5).unwrap().num_terms(), 120);
        assert_eq!(determinant_poly(&z, 6), Err(GlnError::SizeBound(6)));
        assert_eq!(determinant_poly(&z, 0), Err(GlnError::SizeBound(0)));
    }

    #[test]
    fn scalar_substitution() {
        let z = BaseRing::Integers;
        let t2 = substitute_scalar_matrix(&determinant_poly(&z, 2).unwrap(), 2);
        assert_eq!(t2.render(&|_| "T".into()), "T^2");
        assert!(substitute_scalar_matrix(&variable(&z, 2, 1, 2), 2).is_zero());
        let w = parse_det_element(&dual(), 2, "det + a").unwrap();
        assert_eq!(substitute_scalar_matrix(w.numerator(), 2).render(&|_| "T".into()), "T^2 + a");
    }

    #[test]
    fn recognition_examples() {
        let f11 = BaseRing::prime_field(11).unwrap();
        let w = parse_det_element(&f11, 2, "7*det^3").unwrap();
        let w_inv = parse_det_element(&f11, 2, "8 / det^3").unwrap();
        assert_eq!(
            recognize_phi_image(&w, &w_inv).unwrap(),
            PhiRecognition::Image(PhiImage { a: "7".into(), m: 3 })
        );
        let z = BaseRing::Integers;
        let w = parse_det_element(&z, 3, "1 / det^2").unwrap();
        let w_inv = parse_det_element(&z, 3, "det^2").unwrap();
        assert_eq!(
            recognize_phi_image(&w, &w_inv).unwrap(),
            PhiRecognition::Image(PhiImage { a: "1".into(), m: -2 })
        );
    }

    #[test]
    fn nilpotent_counterexample() {
        let b = dual();
        let plus = parse_det_element(&b, 2, "det + a").unwrap();
        let minus = parse_det_element(&b, 2, "det - a").unwrap();
        let det2 = parse_det_element(&b, 2, "det^2").unwrap();
        assert_eq!(plus.mul(&minus).unwrap(), det2);
        let inv = parse_det_element(&b, 2, "(det - a) / det^2").unwrap();
        assert!(plus.mul(&inv).unwrap().is_one());
        assert!(matches!(
            recognize_phi_image(&plus, &inv).unwrap(),
            PhiRecognition::NotImage { stage: FailingStage::NoExactMatch, .. }
        ));
    }

    #[test]
    fn non_inverse_rejected() {
        let z = BaseRing::Integers;
        let w = parse_det_element(&z, 2, "det").unwrap();
        assert!(matches!(recognize_phi_image(&w, &w), Err(GlnError::NotAUnit(_))));
    }

    #[test]
    fn canonical_form_cancels_det() {
        let z = BaseRing::Integers;
        let x = parse_det_element(&z, 2, "(X12*det) / det^2").unwrap();
        assert_eq!(x.det_power(), 1);
        assert_eq!(x.to_string(), "(X12) / det");
        let y = parse_det_element(&z, 2, "X12 / det").unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn nonzerodivisor_examples() {
        let z = BaseRing::Integers;
        let r = det_nonzerodivisor_probe(&z, 2, &[variable(&z, 2, 1, 1)]).unwrap();
        assert_eq!((r.checked, r.counterexamples.len()), (1, 0));
        let z4 = BaseRing::integers_mod(4).unwrap();
        let two = GroupRingElement::from_int(&z4, 4, 2);
        assert!(det_nonzerodivisor_probe(&z4, 2, &[two]).unwrap().counterexamples.is_empty());
        let b = dual();
        let a = GroupRingElement::constant(&b, 4, b.generator().unwrap());
        assert!(det_nonzerodivisor_probe(&b, 2, &[a]).unwrap().counterexamples.is_empty());
    }

    #[test]
    fn monic_after_shift() {
        for n in 1..=4 {
            let (deg, lead) = shifted_det_in_x11(&BaseRing::Integers, n).unwrap();
            assert_eq!(deg, n as i64);
            assert!(lead.is_one(), "n={n}: {lead}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn phi_round_trip(n in 1usize..=3, a in prop::sample::select(vec![1i64, 2, 3, 4]), m in -3i64..=3) {
            let f5 = BaseRing::prime_field(5).unwrap();
            let a = f5.from_int(a.into());
            let a_inv = f5.inverse(&a).unwrap();
            let w = DetRingElement::phi(&f5, n, &a, m).unwrap();
            let w_inv = DetRingElement::phi(&f5, n, &a_inv, -m).unwrap();
            let expected = PhiImage { a: format_scalar(&f5, &a), m };
            prop_assert_eq!(recognize_phi_image(&w, &w_inv).unwrap(), PhiRecognition::Image(expected));
        }

        #[test]
        fn phi_injective(m1 in -3i64..=3, m2 in -3i64..=3, a1 in 1i64..5, a2 in 1i64..5) {
            let f5 = BaseRing::prime_field(5).unwrap();
            let x = DetRingElement::phi(&f5, 2, &int(a1), m1).unwrap();
            let y = DetRingElement::phi(&f5, 2, &int(a2), m2).unwrap();
            prop_assert_eq!(x == y, (a1, m1) == (a2, m2));
        }

        #[test]
        fn substitution_is_multiplicative(
            c1 in prop::collection::vec((prop::collection::vec(0i64..2, 4), -3i64..=3), 0..4),
            c2 in prop::collection::vec((prop::collection::vec(0i64..2, 4), -3i64..=3), 0..4),
        ) {
            let z = BaseRing::Integers;
            let f = GroupRingElement::from_terms(&z, 4, c1.into_iter().map(|(e, c)| (e, int(c))));
            let g = GroupRingElement::from_terms(&z, 4, c2.into_iter().map(|(e, c)| (e, int(c))));
            let lhs = substitute_scalar_matrix(&f.mul(&g).unwrap(), 2);
            let rhs = substitute_scalar_matrix(&f, 2).mul(&substitute_scalar_matrix(&g, 2)).unwrap();
            prop_assert_eq!(lhs, rhs);
            let lhs = substitute_scalar_matrix(&f.add(&g).unwrap(), 2);
            let rhs = substitute_scalar_matrix(&f, 2).add(&substitute_scalar_matrix(&g, 2)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
