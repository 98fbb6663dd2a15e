use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::DecimalInt;
use super::{smith_normal_form, IntMatrix, LinalgError, RowLattice, SmithForm};

/// A finitely generated abelian group `ℤ^rank ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with
/// `2 ≤ d₁ | d₂ | … | d_k`. Two isomorphic groups compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        FgAbGroup {
            rank: 0,
            invariant_factors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            rank,
            invariant_factors: Vec::new(),
        }
    }

    /// ℤ/n; `n = 0` gives ℤ and `n = ±1` the trivial group.
    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        Self::from_cyclic_orders(0, &[n.into()])
    }

    /// `ℤ^rank ⊕ ⨁ ℤ/nᵢ` for arbitrary orders, canonicalized.
    pub fn from_cyclic_orders(rank: usize, orders: &[BigInt]) -> Self {
        let g = rank + orders.len();
        let mut rel = IntMatrix::zeros(orders.len(), g);
        for (i, n) in orders.iter().enumerate() {
            rel[(i, rank + i)] = n.clone();
        }
        group_invariants(g, &rel)
    }

    /// Validating constructor for data that claims to be canonical already.
    pub fn from_invariants(rank: usize, invariant_factors: Vec<BigInt>) -> Result<Self, LinalgError> {
        for w in invariant_factors.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(LinalgError::NotCanonical(format!(
                    "{} does not divide {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(d) = invariant_factors.iter().find(|d| *d < &BigInt::from(2)) {
            return Err(LinalgError::NotCanonical(format!(
                "invariant factor {d} is below 2"
            )));
        }
        Ok(FgAbGroup {
            rank,
            invariant_factors,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Group order, when finite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    pub fn torsion_part(&self) -> FgAbGroup {
        FgAbGroup {
            rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn direct_sum(&self, other: &FgAbGroup) -> FgAbGroup {
        let orders: Vec<BigInt> = self
            .invariant_factors
            .iter()
            .chain(&other.invariant_factors)
            .cloned()
            .collect();
        Self::from_cyclic_orders(self.rank + other.rank, &orders)
    }

    /// Canonical presentation: torsion generators first, then free ones.
    pub fn presentation(&self) -> Presentation {
        let k = self.invariant_factors.len();
        let mut rel = IntMatrix::zeros(k, k + self.rank);
        for (i, d) in self.invariant_factors.iter().enumerate() {
            rel[(i, i)] = d.clone();
        }
        Presentation::new(k + self.rank, rel).expect("shape is consistent")
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl FromStr for FgAbGroup {
    type Err = LinalgError;

    /// Accepts `0`, and sums of `Z`, `Z^r`, `Z/n` in any order.
    fn from_str(s: &str) -> Result<Self, LinalgError> {
        let bad = || LinalgError::Parse(format!("not a group expression: {s:?}"));
        let s = s.trim();
        if s == "0" {
            return Ok(FgAbGroup::trivial());
        }
        let mut rank = 0usize;
        let mut orders = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            let rest = part.strip_prefix('Z').ok_or_else(bad)?;
            if rest.is_empty() {
                rank += 1;
            } else if let Some(e) = rest.strip_prefix('^') {
                rank += e.trim().parse::<usize>().map_err(|_| bad())?;
            } else if let Some(n) = rest.strip_prefix('/') {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                if n.is_zero() {
                    rank += 1;
                } else {
                    orders.push(n);
                }
            } else {
                return Err(bad());
            }
        }
        Ok(FgAbGroup::from_cyclic_orders(rank, &orders))
    }
}

#[derive(Serialize, Deserialize)]
struct FgAbGroupJson {
    rank: usize,
    invariant_factors: Vec<DecimalInt>,
}

impl Serialize for FgAbGroup {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        FgAbGroupJson {
            rank: self.rank,
            invariant_factors: self
                .invariant_factors
                .iter()
                .cloned()
                .map(DecimalInt)
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FgAbGroup {
    /// Either the object form or the textual form (`"Z/2 + Z"`).
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Object(FgAbGroupJson),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Object(o) => FgAbGroup::from_invariants(
                o.rank,
                o.invariant_factors.into_iter().map(|d| d.0).collect(),
            )
            .map_err(serde::de::Error::custom),
        }
    }
}

/// Invariants of `ℤ^generators / (row span of relations)`.
pub fn group_invariants(generators: usize, relations: &IntMatrix) -> FgAbGroup {
    assert_eq!(
        relations.cols(),
        generators,
        "relation matrix must have one column per generator"
    );
    let snf = smith_normal_form(relations);
    from_diagonal(generators, &snf.diagonal())
}

fn from_diagonal(generators: usize, diag: &[BigInt]) -> FgAbGroup {
    let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
    FgAbGroup {
        rank: generators - nonzero,
        invariant_factors: diag.iter().filter(|d| **d > BigInt::one()).cloned().collect(),
    }
}

pub fn is_torsion_free(g: &FgAbGroup) -> bool {
    g.is_torsion_free()
}

/// `ℤ^generators` modulo the row span of `relations`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    generators: usize,
    relations: IntMatrix,
}

impl Presentation {
    pub fn new(generators: usize, relations: IntMatrix) -> Result<Self, LinalgError> {
        if relations.cols() != generators {
            if relations.rows() == 0 {
                return Ok(Self::free(generators));
            }
            return Err(LinalgError::Shape(format!(
                "relations have {} columns but there are {generators} generators",
                relations.cols()
            )));
        }
        Ok(Presentation {
            generators,
            relations,
        })
    }

    pub fn free(generators: usize) -> Self {
        Presentation {
            generators,
            relations: IntMatrix::zeros(0, generators),
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn invariants(&self) -> FgAbGroup {
        group_invariants(self.generators, &self.relations)
    }

    pub fn relation_lattice(&self) -> RowLattice {
        RowLattice::from_generators(&self.relations)
    }

    pub fn direct_sum(&self, other: &Presentation) -> Presentation {
        Presentation {
            generators: self.generators + other.generators,
            relations: self.relations.block_diag(&other.relations),
        }
    }

    /// `self^{⊕k}`
    pub fn power(&self, k: usize) -> Presentation {
        (0..k).fold(Presentation::free(0), |acc, _| acc.direct_sum(self))
    }

    pub fn quotient_map(&self) -> QuotientMap {
        QuotientMap::new(self)
    }
}

/// Normal forms for elements of a presented group.
///
/// With `u·R·v = s`, a generator-coordinate vector `x` (as a row) is sent to
/// `x·v`; coordinates facing a diagonal entry `d > 1` are reduced mod `d`,
/// those facing `1` are dropped and those past the rank are free.
#[derive(Clone, Debug)]
pub struct QuotientMap {
    v: IntMatrix,
    moduli: Vec<(usize, BigInt)>,
    free: Vec<usize>,
}

impl QuotientMap {
    fn new(p: &Presentation) -> Self {
        let SmithForm { s, v, .. } = smith_normal_form(&p.relations);
        let n = p.generators;
        let mut moduli = Vec::new();
        let mut free = Vec::new();
        for j in 0..n {
            let d = if j < s.rows() { s[(j, j)].clone() } else { BigInt::zero() };
            if d.is_zero() {
                free.push(j);
            } else if d > BigInt::one() {
                moduli.push((j, d));
            }
        }
        QuotientMap { v, moduli, free }
    }

    pub fn torsion_moduli(&self) -> Vec<BigInt> {
        self.moduli.iter().map(|(_, d)| d.clone()).collect()
    }

    pub fn free_rank(&self) -> usize {
        self.free.len()
    }

    /// Torsion residues followed by free coordinates.
    pub fn normal_form(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.transpose().mul_vec(x).expect("vector has generator length");
        self.moduli
            .iter()
            .map(|(j, d)| y[*j].mod_floor(d))
            .chain(self.free.iter().map(|&j| y[j].clone()))
            .collect()
    }

    /// Free coordinates only; the coordinates of the image in `G / G_tors`.
    pub fn free_coordinates(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.transpose().mul_vec(x).expect("vector has generator length");
        self.free.iter().map(|&j| y[j].clone()).collect()
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.normal_form(x).iter().all(Zero::is_zero)
    }
}

/// A homomorphism of presented groups; `matrix` has one column per source
/// generator holding its image in target generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupHom {
    source: Presentation,
    target: Presentation,
    matrix: IntMatrix,
}

impl GroupHom {
    pub fn new(source: Presentation, target: Presentation, matrix: IntMatrix) -> Result<Self, LinalgError> {
        if matrix.rows() != target.generators || matrix.cols() != source.generators {
            return Err(LinalgError::Shape(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators,
                source.generators
            )));
        }
        let lattice = target.relation_lattice();
        for i in 0..source.relations.rows() {
            let image = matrix.mul_vec(source.relations.row(i))?;
            if !lattice.contains(&image) {
                return Err(LinalgError::NotWellDefined(format!(
                    "source relation {i} maps outside the target relations"
                )));
            }
        }
        Ok(GroupHom {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: Presentation, target: Presentation) -> Self {
        let matrix = IntMatrix::zeros(target.generators, source.generators);
        GroupHom {
            source,
            target,
            matrix,
        }
    }

    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn target(&self) -> &Presentation {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `next ∘ self`
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom, LinalgError> {
        if self.target != next.source {
            return Err(LinalgError::Incompatible(
                "target of the first map is not the source of the second".into(),
            ));
        }
        Ok(GroupHom {
            source: self.source.clone(),
            target: next.target.clone(),
            matrix: next.matrix.mul(&self.matrix)?,
        })
    }

    /// True when every generator lands in the target relation lattice.
    pub fn is_zero(&self) -> bool {
        let lattice = self.target.relation_lattice();
        (0..self.matrix.cols()).all(|j| lattice.contains(&self.matrix.column(j)))
    }
}
