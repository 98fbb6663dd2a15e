use num_bigint::BigInt;
use serde::Serialize;

use super::{integer_kernel, group_invariants, FgAbGroup, GroupHom, IntMatrix, LinalgError, Presentation, RowLattice};

/// `ker(d_out) / im(d_in)` at the group between the two maps.
pub fn homology_at(d_in: &GroupHom, d_out: &GroupHom) -> Result<FgAbGroup, LinalgError> {
    if d_in.target() != d_out.source() {
        return Err(LinalgError::Incompatible(
            "d_in does not land in the source of d_out".into(),
        ));
    }
    if !d_in.then(d_out)?.is_zero() {
        return Err(LinalgError::CompositionNonzero);
    }
    let middle = d_out.source();
    let m = middle.generators();
    if m == 0 {
        return Ok(FgAbGroup::trivial());
    }

    // Cycles: x with d_out(x) in the relation lattice of the target, i.e. the
    // x-part of the integer kernel of [D | -R^T].
    let target_rel = d_out.target().relations();
    let stacked = d_out
        .matrix()
        .hstack(&target_rel.transpose().scale(&BigInt::from(-1)))?;
    let cycle_gens: Vec<Vec<BigInt>> = integer_kernel(&stacked)
        .into_iter()
        .map(|mut v| {
            v.truncate(m);
            v
        })
        .collect();
    let cycles = RowLattice::from_rows(m, cycle_gens);

    // Boundaries: relations of the middle term plus images of d_in.
    let mut boundary_rows: Vec<Vec<BigInt>> = middle.relations().row_vecs();
    boundary_rows.extend((0..d_in.matrix().cols()).map(|j| d_in.matrix().column(j)));

    let q = cycles.rank();
    let mut rel = Vec::with_capacity(boundary_rows.len());
    for b in &boundary_rows {
        let c = cycles
            .coordinates(b)
            .expect("boundaries lie in the cycle lattice once d∘d = 0");
        rel.push(c);
    }
    let rel = IntMatrix::from_rows(rel, q)?;
    Ok(group_invariants(q, &rel))
}

/// A bounded cochain complex `C⁰ → C¹ → … → Cⁿ` of presented groups, with
/// `d∘d = 0` checked at construction.
#[derive(Clone, Debug, Serialize)]
pub struct CochainComplex {
    terms: Vec<Presentation>,
    differentials: Vec<GroupHom>,
}

impl CochainComplex {
    pub fn new(terms: Vec<Presentation>, differentials: Vec<GroupHom>) -> Result<Self, LinalgError> {
        if terms.is_empty() {
            if differentials.is_empty() {
                return Ok(CochainComplex { terms, differentials });
            }
            return Err(LinalgError::Incompatible("differentials without terms".into()));
        }
        if differentials.len() + 1 != terms.len() {
            return Err(LinalgError::Incompatible(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len() - 1,
                differentials.len()
            )));
        }
        for (p, d) in differentials.iter().enumerate() {
            if d.source() != &terms[p] || d.target() != &terms[p + 1] {
                return Err(LinalgError::Incompatible(format!(
                    "d^{p} does not run from term {p} to term {}",
                    p + 1
                )));
            }
        }
        for (p, w) in differentials.windows(2).enumerate() {
            if !w[0].then(&w[1])?.is_zero() {
                return Err(LinalgError::Incompatible(format!(
                    "d^{} ∘ d^{p} is not zero",
                    p + 1
                )));
            }
        }
        Ok(CochainComplex { terms, differentials })
    }

    pub fn terms(&self) -> &[Presentation] {
        &self.terms
    }

    pub fn differentials(&self) -> &[GroupHom] {
        &self.differentials
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Cohomology at degree `p`; zero maps are used past either end.
    pub fn cohomology(&self, p: usize) -> Result<FgAbGroup, LinalgError> {
        let Some(term) = self.terms.get(p) else {
            return Ok(FgAbGroup::trivial());
        };
        let d_in = match p.checked_sub(1) {
            Some(q) => self.differentials[q].clone(),
            None => GroupHom::zero(Presentation::free(0), term.clone()),
        };
        let d_out = self
            .differentials
            .get(p)
            .cloned()
            .unwrap_or_else(|| GroupHom::zero(term.clone(), Presentation::free(0)));
        homology_at(&d_in, &d_out)
    }

    pub fn all_cohomology(&self) -> Result<Vec<FgAbGroup>, LinalgError> {
        (0..self.terms.len()).map(|p| self.cohomology(p)).collect()
    }
}
