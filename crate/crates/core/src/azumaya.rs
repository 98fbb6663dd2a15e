//! Azumaya gluing data built from an `n`-torsion line bundle cocycle.
//!
//! Symbols `ξ_{a,b}` (one per overlap `a < b`) and `β_i` (one per chart) are
//! the generators of a free abelian group; matrices live over its group ring
//! and identities are checked after pushing forward to a quotient group
//! given by a choice of relations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::group_ring::{BaseRing, GroupRingElement, GroupRingMatrix};
use crate::linalg::{IntMatrix, Presentation, RowLattice};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AzumayaError {
    #[error("matrix size must be at least 2, got {0}")]
    SizeTooSmall(usize),
    #[error("need at least 2 charts, got {0}")]
    TooFewCharts(usize),
    #[error("the gluing identity does not hold under the relation {0}")]
    IdentityFails(Orientation),
}

/// Which trivialization relation between `ξ_{a,b}^n` and the `β`s is imposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Orientation {
    /// `ξ_{a,b}^n = β_a^{-1} β_b`
    #[serde(rename = "xi^n = beta_a^-1 * beta_b")]
    Printed,
    /// `ξ_{a,b}^n = β_b^{-1} β_a`, i.e. `β_a = β_b ξ_{a,b}^n`
    #[serde(rename = "xi^n = beta_b^-1 * beta_a")]
    Gluing,
    /// no relation between `ξ` and the `β`s
    #[serde(rename = "none")]
    Absent,
}

impl std::fmt::Display for Orientation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Orientation::Printed => "xi^n = beta_a^-1 * beta_b",
            Orientation::Gluing => "xi^n = beta_b^-1 * beta_a",
            Orientation::Absent => "none",
        })
    }
}

/// Generators `ξ_{a,b}` then `β_i`, with the cocycle relations and an
/// optional trivialization relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicUnitGroup {
    n: usize,
    charts: usize,
    names: Vec<String>,
    overlaps: Vec<(usize, usize)>,
    orientation: Orientation,
    presentation: Presentation,
}

impl SymbolicUnitGroup {
    pub fn new(n: usize, charts: usize, orientation: Orientation) -> Self {
        let overlaps: Vec<(usize, usize)> = (0..charts)
            .flat_map(|a| (a + 1..charts).map(move |b| (a, b)))
            .collect();
        let mut names: Vec<String> = overlaps
            .iter()
            .map(|(a, b)| format!("xi_{}_{}", a + 1, b + 1))
            .collect();
        names.extend((0..charts).map(|i| format!("beta_{}", i + 1)));
        let gens = names.len();
        let xi = |a: usize, b: usize| overlaps.iter().position(|&o| o == (a, b)).expect("overlap");
        let beta = |i: usize| overlaps.len() + i;

        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for a in 0..charts {
            for b in a + 1..charts {
                for c in b + 1..charts {
                    let mut r = vec![BigInt::from(0); gens];
                    r[xi(a, b)] += 1;
                    r[xi(b, c)] += 1;
                    r[xi(a, c)] -= 1;
                    rows.push(r);
                }
            }
        }
        if orientation != Orientation::Absent {
            let sign = if orientation == Orientation::Printed { 1 } else { -1 };
            for &(a, b) in &overlaps {
                let mut r = vec![BigInt::from(0); gens];
                r[xi(a, b)] += n;
                r[beta(a)] += sign;
                r[beta(b)] -= sign;
                rows.push(r);
            }
        }
        let presentation = Presentation::new(gens, IntMatrix::from_rows(rows, gens).expect("width"))
            .expect("consistent width");
        SymbolicUnitGroup {
            n,
            charts,
            names,
            overlaps,
            orientation,
            presentation,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn xi_index(&self, a: usize, b: usize) -> usize {
        self.overlaps.iter().position(|&o| o == (a, b)).expect("overlap")
    }

    pub fn beta_index(&self, i: usize) -> usize {
        self.overlaps.len() + i
    }

    /// Pushes an element of the free group ring to the group ring of the
    /// presented group, in normal-form exponents.
    pub fn push(&self, x: &GroupRingElement) -> GroupRingElement {
        let q = self.presentation.quotient_map();
        let width = q.torsion_moduli().len() + q.free_rank();
        x.map_exponents(width, |e| {
            let v: Vec<BigInt> = e.iter().map(|&k| BigInt::from(k)).collect();
            q.normal_form(&v)
                .iter()
                .map(|c| c.to_i64().expect("small exponents"))
                .collect()
        })
    }

    pub fn render(&self, x: &GroupRingElement) -> String {
        x.render(&|i| self.names[i].clone())
    }

    fn symbol(&self, i: usize) -> GroupRingElement {
        GroupRingElement::variable(&BaseRing::Integers, self.names.len(), i)
    }
}

#[derive(Clone, Debug)]
pub struct GluingData {
    pub n: usize,
    pub charts: usize,
    pub symbols: SymbolicUnitGroup,
    /// `M_i = E_{1,0} + … + E_{n-1,n-2} + β_i E_{0,n-1}` (0-based).
    pub companions: Vec<GroupRingMatrix>,
    /// `D_{a,b} = Σ_ℓ ξ_{a,b}^ℓ E_{ℓ,ℓ}` per overlap `a < b`.
    pub transitions: BTreeMap<(usize, usize), GroupRingMatrix>,
}

pub fn build_gluing(n: usize, charts: usize) -> Result<GluingData, AzumayaError> {
    if n < 2 {
        return Err(AzumayaError::SizeTooSmall(n));
    }
    if charts < 2 {
        return Err(AzumayaError::TooFewCharts(charts));
    }
    let symbols = SymbolicUnitGroup::new(n, charts, Orientation::Absent);
    let z = BaseRing::Integers;
    let rank = symbols.names.len();
    let companions = (0..charts)
        .map(|i| {
            let mut m = GroupRingMatrix::zeros(&z, rank, n);
            for r in 1..n {
                m.set(r, r - 1, GroupRingElement::one(&z, rank)).expect("same ring");
            }
            m.set(0, n - 1, symbols.symbol(symbols.beta_index(i))).expect("same ring");
            m
        })
        .collect();
    let transitions = symbols
        .overlaps
        .iter()
        .map(|&(a, b)| {
            let xi = symbols.symbol(symbols.xi_index(a, b));
            let d = GroupRingMatrix::diagonal(&z, rank, (0..n).map(|l| xi.pow(l as u32)).collect())
                .expect("same ring");
            ((a, b), d)
        })
        .collect();
    Ok(GluingData {
        n,
        charts,
        symbols,
        companions,
        transitions,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub overlap: (usize, usize),
    pub row: usize,
    pub col: usize,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum IdentityOutcome {
    Holds,
    Fails { discrepancies: Vec<Discrepancy> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationResult {
    pub orientation: Orientation,
    #[serde(flatten)]
    pub outcome: IdentityOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub results: Vec<OrientationResult>,
    /// The single orientation under which `D·M_a = ξ·M_b·D` holds, if exactly one does.
    pub valid_orientation: Option<Orientation>,
}

fn identity_sides(data: &GluingData, a: usize, b: usize) -> (GroupRingMatrix, GroupRingMatrix) {
    let d = &data.transitions[&(a, b)];
    let xi = data.symbols.symbol(data.symbols.xi_index(a, b));
    let lhs = d.mul(&data.companions[a]).expect("same ring");
    let rhs = data.companions[b]
        .mul(d)
        .and_then(|m| m.scalar_mul(&xi))
        .expect("same ring");
    (lhs, rhs)
}

fn compare_under(data: &GluingData, orientation: Orientation) -> IdentityOutcome {
    let group = SymbolicUnitGroup::new(data.n, data.charts, orientation);
    let mut discrepancies = Vec::new();
    for &(a, b) in data.transitions.keys() {
        let (lhs, rhs) = identity_sides(data, a, b);
        for r in 0..data.n {
            for c in 0..data.n {
                let (x, y) = (lhs.get(r, c), rhs.get(r, c));
                if group.push(x) != group.push(y) {
                    discrepancies.push(Discrepancy {
                        overlap: (a + 1, b + 1),
                        row: r,
                        col: c,
                        lhs: data.symbols.render(x),
                        rhs: data.symbols.render(y),
                    });
                }
            }
        }
    }
    if discrepancies.is_empty() {
        IdentityOutcome::Holds
    } else {
        IdentityOutcome::Fails { discrepancies }
    }
}

/// Checks `D_{a,b}·M_a = ξ_{a,b}·M_b·D_{a,b}` on every overlap under each
/// orientation of the trivialization relation.
pub fn verify_gluing_identity(data: &GluingData) -> IdentityReport {
    let results: Vec<OrientationResult> = [Orientation::Printed, Orientation::Gluing, Orientation::Absent]
        .into_iter()
        .map(|orientation| OrientationResult {
            orientation,
            outcome: compare_under(data, orientation),
        })
        .collect();
    let holding: Vec<Orientation> = results
        .iter()
        .filter(|r| r.outcome == IdentityOutcome::Holds)
        .map(|r| r.orientation)
        .collect();
    IdentityReport {
        valid_orientation: (holding.len() == 1).then(|| holding[0]),
        results,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoboundaryClass {
    pub overlap: (usize, usize),
    /// The unit `u` with `D·M_a·D^{-1} = u·M_b`.
    pub unit: String,
    pub equals_transition: bool,
}

/// The unit discrepancy between the two lifts of conjugation on each overlap,
/// computed in the group where the gluing identity holds.
pub fn coboundary_class(data: &GluingData, orientation: Orientation) -> Result<Vec<CoboundaryClass>, AzumayaError> {
    if compare_under(data, orientation) != IdentityOutcome::Holds {
        return Err(AzumayaError::IdentityFails(orientation));
    }
    let group = SymbolicUnitGroup::new(data.n, data.charts, orientation);
    let mut out = Vec::new();
    for (&(a, b), d) in &data.transitions {
        let d_inv = d.inverse().expect("diagonal of monomials");
        let conj = d.mul(&data.companions[a]).and_then(|m| m.mul(&d_inv)).expect("same ring");
        // M_b has a 1 at (1, 0), so the scalar is read off there
        let u = conj.get(1, 0).clone();
        let scaled = data.companions[b].scalar_mul(&u).expect("same ring");
        let consistent = (0..data.n)
            .all(|r| (0..data.n).all(|c| group.push(conj.get(r, c)) == group.push(scaled.get(r, c))));
        let xi = data.symbols.symbol(data.symbols.xi_index(a, b));
        out.push(CoboundaryClass {
            overlap: (a + 1, b + 1),
            unit: data.symbols.render(&u),
            equals_transition: consistent && group.push(&u) == group.push(&xi),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionCertificate {
    pub overlap: (usize, usize),
    pub det_lhs: String,
    pub det_rhs: String,
    /// `ξ^n` lies in the subgroup generated by the `β` ratios modulo the relations.
    pub n_torsion: bool,
}

/// Takes determinants of both sides of the gluing identity and checks that
/// `n·ξ` lies in the span of `β` differences plus the imposed relations.
pub fn determinant_torsion_bound(data: &GluingData, orientation: Orientation) -> Vec<TorsionCertificate> {
    let group = SymbolicUnitGroup::new(data.n, data.charts, orientation);
    let gens = group.names.len();
    let mut rows = group.presentation.relations().row_vecs();
    for a in 0..data.charts {
        for b in a + 1..data.charts {
            let mut r = vec![BigInt::from(0); gens];
            r[group.beta_index(a)] += 1;
            r[group.beta_index(b)] -= 1;
            rows.push(r);
        }
    }
    let lattice = RowLattice::from_rows(gens, rows);
    data.transitions
        .keys()
        .map(|&(a, b)| {
            let (lhs, rhs) = identity_sides(data, a, b);
            let mut target = vec![BigInt::from(0); gens];
            target[group.xi_index(a, b)] = BigInt::from(data.n);
            TorsionCertificate {
                overlap: (a + 1, b + 1),
                det_lhs: data.symbols.render(&lhs.determinant()),
                det_rhs: data.symbols.render(&rhs.determinant()),
                n_torsion: lattice.contains(&target),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TripleOverlap {
    pub charts: (usize, usize, usize),
    pub consistent: bool,
}

/// `D_{b,c}·D_{a,b} = D_{a,c}` modulo the cocycle relations.
pub fn triple_overlap_consistency(data: &GluingData) -> Vec<TripleOverlap> {
    let group = SymbolicUnitGroup::new(data.n, data.charts, Orientation::Absent);
    let mut out = Vec::new();
    for a in 0..data.charts {
        for b in a + 1..data.charts {
            for c in b + 1..data.charts {
                let prod = data.transitions[&(b, c)]
                    .mul(&data.transitions[&(a, b)])
                    .expect("same ring");
                let direct = &data.transitions[&(a, c)];
                let consistent = (0..data.n).all(|r| {
                    (0..data.n).all(|s| group.push(prod.get(r, s)) == group.push(direct.get(r, s)))
                });
                out.push(TripleOverlap {
                    charts: (a + 1, b + 1, c + 1),
                    consistent,
                });
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct AzumayaReport {
    pub n: usize,
    pub charts: usize,
    pub basis: Vec<String>,
    pub companions: Vec<Vec<Vec<String>>>,
    pub transitions: Vec<((usize, usize), Vec<Vec<String>>)>,
    pub identity: IdentityReport,
    pub coboundary: Vec<CoboundaryClass>,
    pub torsion: Vec<TorsionCertificate>,
    pub triple_overlaps: Vec<TripleOverlap>,
}

fn render_matrix(data: &GluingData, m: &GroupRingMatrix) -> Vec<Vec<String>> {
    m.rows()
        .iter()
        .map(|r| r.iter().map(|x| data.symbols.render(x)).collect())
        .collect()
}

pub fn azumaya_report(n: usize, charts: usize) -> Result<AzumayaReport, AzumayaError> {
    let data = build_gluing(n, charts)?;
    let identity = verify_gluing_identity(&data);
    let coboundary = match identity.valid_orientation {
        Some(o) => coboundary_class(&data, o)?,
        None => Vec::new(),
    };
    let torsion = determinant_torsion_bound(&data, identity.valid_orientation.unwrap_or(Orientation::Absent));
    let basis = (0..n)
        .map(|l| match l {
            0 => "1".to_string(),
            1 => "s".to_string(),
            _ => format!("s^{l}"),
        })
        .collect();
    Ok(AzumayaReport {
        n,
        charts,
        basis,
        companions: data.companions.iter().map(|m| render_matrix(&data, m)).collect(),
        transitions: data
            .transitions
            .iter()
            .map(|(&(a, b), m)| ((a + 1, b + 1), render_matrix(&data, m)))
            .collect(),
        identity,
        coboundary,
        torsion,
        triple_overlaps: triple_overlap_consistency(&data),
    })
}
