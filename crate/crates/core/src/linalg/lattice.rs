//! Sublattices of ℤⁿ in Hermite form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{smith_normal_form, IntMatrix};

/// A sublattice of ℤⁿ held by a row-style Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowLattice {
    ambient: usize,
    basis: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
}

impl RowLattice {
    /// Lattice spanned by the rows of `generators`.
    pub fn from_generators(generators: &IntMatrix) -> Self {
        Self::from_rows(generators.cols(), generators.row_vecs())
    }

    pub fn from_rows(ambient: usize, mut a: Vec<Vec<BigInt>>) -> Self {
        let n = a.len();
        let mut r = 0;
        let mut pivots = Vec::new();
        for c in 0..ambient {
            if r == n {
                break;
            }
            for i in r + 1..n {
                if a[i][c].is_zero() {
                    continue;
                }
                let ext = a[r][c].extended_gcd(&a[i][c]);
                let (g, x, y) = (ext.gcd, ext.x, ext.y);
                let ai = &a[i][c] / &g;
                let ar = &a[r][c] / &g;
                let (row_r, row_i) = (a[r].clone(), a[i].clone());
                for k in 0..ambient {
                    a[r][k] = &x * &row_r[k] + &y * &row_i[k];
                    a[i][k] = &ai * &row_r[k] - &ar * &row_i[k];
                }
            }
            if a[r][c].is_zero() {
                continue;
            }
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let p = a[r][c].clone();
            for i in 0..r {
                let q = a[i][c].div_floor(&p);
                if !q.is_zero() {
                    let pivot_row = a[r].clone();
                    for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                        *x -= &q * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        RowLattice {
            ambient,
            basis: a,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.basis.clone(), self.ambient).expect("rows have ambient width")
    }

    /// Integer coefficients expressing `v` in the basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(v.len(), self.ambient, "vector outside the ambient lattice");
        let mut rem = v.to_vec();
        let mut coeffs = Vec::with_capacity(self.basis.len());
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = rem[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, y) in rem.iter_mut().zip(row) {
                    *x -= &q * y;
                }
            }
            coeffs.push(q);
        }
        rem.iter().all(Zero::is_zero).then_some(coeffs)
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }
}

/// Basis (as rows) of `{x ∈ ℤⁿ : a·x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let f = smith_normal_form(a);
    let r = f.rank();
    (r..a.cols()).map(|j| f.v.column(j)).collect()
}
