//! Cohomology of free abelian groups `ℤ^r` through the Koszul resolution.

use num_bigint::BigInt;
use thiserror::Error;

use crate::linalg::{group_invariants, CochainComplex, FgAbGroup, GroupHom, IntMatrix, LinalgError, Presentation};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("action {index} is not a square matrix on the {generators} generators")]
    ActionShape { index: usize, generators: usize },
    #[error("action {0} does not preserve the relations")]
    ActionNotWellDefined(usize),
    #[error("action {0} is not invertible on the module")]
    ActionNotInvertible(usize),
    #[error("actions {0} and {1} do not commute")]
    NoncommutingActions(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A finitely generated abelian group with `r` commuting automorphisms,
/// one per basis vector of `ℤ^r`, given on generators (columns are images).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZrModule {
    underlying: Presentation,
    actions: Vec<IntMatrix>,
}

impl ZrModule {
    pub fn new(underlying: Presentation, actions: Vec<IntMatrix>) -> Result<Self, CohomologyError> {
        let g = underlying.generators();
        for (i, t) in actions.iter().enumerate() {
            if t.rows() != g || t.cols() != g {
                return Err(CohomologyError::ActionShape { index: i, generators: g });
            }
            GroupHom::new(underlying.clone(), underlying.clone(), t.clone())
                .map_err(|_| CohomologyError::ActionNotWellDefined(i))?;
            // surjective endomorphisms of finitely generated modules are bijective
            let image_and_relations = t.transpose().vstack(underlying.relations())?;
            if !group_invariants(g, &image_and_relations).is_trivial() {
                return Err(CohomologyError::ActionNotInvertible(i));
            }
        }
        for i in 0..actions.len() {
            for j in i + 1..actions.len() {
                let c = actions[i].mul(&actions[j])?.sub(&actions[j].mul(&actions[i])?)?;
                let hom = GroupHom::new(underlying.clone(), underlying.clone(), c)
                    .map_err(|_| CohomologyError::NoncommutingActions(i, j))?;
                if !hom.is_zero() {
                    return Err(CohomologyError::NoncommutingActions(i, j));
                }
            }
        }
        Ok(ZrModule { underlying, actions })
    }

    /// Every `t_i` acting as the identity.
    pub fn trivial(underlying: Presentation, r: usize) -> Self {
        let g = underlying.generators();
        ZrModule {
            actions: vec![IntMatrix::identity(g); r],
            underlying,
        }
    }

    pub fn underlying(&self) -> &Presentation {
        &self.underlying
    }

    pub fn actions(&self) -> &[IntMatrix] {
        &self.actions
    }

    pub fn lattice_rank(&self) -> usize {
        self.actions.len()
    }

    /// Same module with the generators of `ℤ^r` reordered: new `t_i` is old `t_{perm[i]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        ZrModule {
            underlying: self.underlying.clone(),
            actions: perm.iter().map(|&i| self.actions[i].clone()).collect(),
        }
    }
}

/// `p`-element subsets of `0..r` in lexicographic order.
pub fn subsets(r: usize, p: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            go(i + 1, r, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, p, &mut Vec::new(), &mut out);
    out
}

/// The Koszul cochain complex `C^p = M^{⊕C(r,p)}`, indexed by `p`-subsets.
///
/// The block from subset `S` to `S ∪ {s}` is `(-1)^{p+k}(t_s - 1)`, with `k`
/// the position of `s` in the enlarged subset. For `r = 2` the map in degree
/// one is `(m₁, m₂) ↦ (t₂ - 1)m₁ - (t₁ - 1)m₂`.
pub fn koszul_cochain_complex(m: &ZrModule) -> Result<CochainComplex, CohomologyError> {
    let r = m.lattice_rank();
    let g = m.underlying.generators();
    let minus_one = BigInt::from(-1);
    let shifted: Vec<IntMatrix> = m
        .actions
        .iter()
        .map(|t| t.sub(&IntMatrix::identity(g)))
        .collect::<Result<_, _>>()?;

    let bases: Vec<Vec<Vec<usize>>> = (0..=r).map(|p| subsets(r, p)).collect();
    let terms: Vec<Presentation> = bases.iter().map(|b| m.underlying.power(b.len())).collect();
    let mut differentials = Vec::with_capacity(r);
    for p in 0..r {
        let src = &bases[p];
        let dst = &bases[p + 1];
        let mut d = IntMatrix::zeros(dst.len() * g, src.len() * g);
        for (ti, t) in dst.iter().enumerate() {
            for (k, &s) in t.iter().enumerate() {
                let smaller: Vec<usize> = t.iter().copied().filter(|&x| x != s).collect();
                let si = src.binary_search(&smaller).expect("lexicographic subsets");
                let block = if (p + k) % 2 == 1 {
                    shifted[s].scale(&minus_one)
                } else {
                    shifted[s].clone()
                };
                d.set_block(ti * g, si * g, &block);
            }
        }
        differentials.push(GroupHom::new(terms[p].clone(), terms[p + 1].clone(), d)?);
    }
    Ok(CochainComplex::new(terms, differentials)?)
}

/// `H^p(ℤ^r, M)` for `p = 0..=r`.
pub fn group_cohomology(m: &ZrModule) -> Result<Vec<FgAbGroup>, CohomologyError> {
    Ok(koszul_cochain_complex(m)?.all_cohomology()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyclic(n: i64) -> Presentation {
        FgAbGroup::cyclic(n).presentation()
    }

    fn sign_twist() -> ZrModule {
        ZrModule::new(
            Presentation::free(1),
            vec![IntMatrix::from_i64_rows(&[vec![-1]]), IntMatrix::identity(1)],
        )
        .unwrap()
    }

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn rank_one_trivial() {
        let m = ZrModule::trivial(Presentation::free(1), 1);
        let c = koszul_cochain_complex(&m).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.differentials()[0].matrix().is_zero());
        assert_eq!(
            group_cohomology(&m).unwrap(),
            vec![FgAbGroup::free(1), FgAbGroup::free(1)]
        );
    }

    #[test]
    fn rank_two_trivial_shapes() {
        let m = ZrModule::trivial(Presentation::free(1), 2);
        let c = koszul_cochain_complex(&m).unwrap();
        let sizes: Vec<usize> = c.terms().iter().map(Presentation::generators).collect();
        assert_eq!(sizes, vec![1, 2, 1]);
        assert!(c.differentials().iter().all(|d| d.matrix().is_zero()));
    }

    #[test]
    fn sign_twist_degree_one_map() {
        let c = koszul_cochain_complex(&sign_twist()).unwrap();
        assert_eq!(c.differentials()[1].matrix(), &IntMatrix::from_i64_rows(&[vec![0, 2]]));
        let h = group_cohomology(&sign_twist()).unwrap();
        assert_eq!(h[2], FgAbGroup::cyclic(2));
        // H^0 = fixed points = 0, H^1 = ker/im computed by hand: Z/2
        assert_eq!(h[0], FgAbGroup::trivial());
        assert_eq!(h[1], FgAbGroup::cyclic(2));
    }

    #[test]
    fn top_degree_of_torsion_module() {
        let m = ZrModule::trivial(cyclic(12), 2);
        assert_eq!(group_cohomology(&m).unwrap()[2], FgAbGroup::cyclic(12));
    }

    #[test]
    fn rank_zero_is_the_module() {
        let m = ZrModule::trivial(cyclic(6), 0);
        assert_eq!(group_cohomology(&m).unwrap(), vec![FgAbGroup::cyclic(6)]);
    }

    #[test]
    fn bad_actions_rejected() {
        let swap = IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]);
        let diag = IntMatrix::from_i64_rows(&[vec![1, 0], vec![0, -1]]);
        assert_eq!(
            ZrModule::new(Presentation::free(2), vec![swap, diag]),
            Err(CohomologyError::NoncommutingActions(0, 1))
        );
        assert_eq!(
            ZrModule::new(Presentation::free(1), vec![IntMatrix::from_i64_rows(&[vec![2]])]),
            Err(CohomologyError::ActionNotInvertible(0))
        );
        // multiplication by 5 is invertible on Z/12 but not by 2
        assert!(ZrModule::new(cyclic(12), vec![IntMatrix::from_i64_rows(&[vec![5]])]).is_ok());
        assert_eq!(
            ZrModule::new(cyclic(12), vec![IntMatrix::from_i64_rows(&[vec![2]])]),
            Err(CohomologyError::ActionNotInvertible(0))
        );
        // on Z/2 + Z, the map sending the free generator to the torsion one is not defined
        let p = Presentation::new(2, IntMatrix::from_i64_rows(&[vec![2, 0]])).unwrap();
        let bad = IntMatrix::from_i64_rows(&[vec![1, 1], vec![1, 1]]);
        assert_eq!(
            ZrModule::new(p, vec![bad]),
            Err(CohomologyError::ActionNotWellDefined(0))
        );
    }

    #[test]
    fn exterior_pattern_for_trivial_action() {
        for r in 0..=3 {
            for g in [FgAbGroup::free(1), FgAbGroup::cyclic(4), "Z/2 + Z".parse().unwrap()] {
                let m = ZrModule::trivial(g.presentation(), r);
                let h = group_cohomology(&m).unwrap();
                for (p, hp) in h.iter().enumerate() {
                    let mut expected = FgAbGroup::trivial();
                    for _ in 0..binom(r, p) {
                        expected = expected.direct_sum(&g);
                    }
                    assert_eq!(hp, &expected, "r={r} p={p} M={g}");
                }
            }
        }
    }

    fn arb_commuting_actions() -> impl Strategy<Value = Vec<IntMatrix>> {
        // powers of a single automorphism commute with each other
        let gens = prop_oneof![
            Just(vec![vec![1i64, 1], vec![0, 1]]),
            Just(vec![vec![0, -1], vec![1, 0]]),
            Just(vec![vec![2, 1], vec![1, 1]]),
            Just(vec![vec![-1, 0], vec![0, 1]]),
        ];
        (gens, prop::collection::vec(0u32..4, 3)).prop_map(|(a, ks)| {
            let a = IntMatrix::from_i64_rows(&a);
            ks.into_iter()
                .map(|k| (0..k).fold(IntMatrix::identity(2), |acc, _| acc.mul(&a).unwrap()))
                .collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn order_independence(actions in arb_commuting_actions(), perm in Just(vec![2usize, 0, 1])) {
            let m = ZrModule::new(Presentation::free(2), actions).unwrap();
            let h = group_cohomology(&m).unwrap();
            let h2 = group_cohomology(&m.permuted(&perm)).unwrap();
            prop_assert_eq!(h, h2);
        }
    }
}
