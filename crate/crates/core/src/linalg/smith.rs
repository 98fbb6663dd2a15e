//! Smith normal form over the integers.
//!
//! Pivoting always picks the nonzero entry of least absolute value in the
//! active submatrix; remainders produced by the Euclidean step become the next
//! pivot candidates, which keeps intermediate entries small in practice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::IntMatrix;

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal, nonnegative,
/// each diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The `min(rows, cols)` diagonal entries of `s`, zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }

    /// Checks every defining property against the matrix it was computed from.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        let Ok(um) = self.u.mul(m) else { return false };
        let Ok(umv) = um.mul(&self.v) else { return false };
        if umv != self.s || !self.s.is_diagonal() {
            return false;
        }
        if !self.u.is_unimodular() || !self.v.is_unimodular() {
            return false;
        }
        let d = self.diagonal();
        if d.iter().any(Signed::is_negative) {
            return false;
        }
        d.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            }
        })
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = least_nonzero(&a, t) else {
                // active block is zero: done with the whole matrix
                return SmithForm { u, s: a, v };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = a[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -a[(i, t)].div_floor(&pivot);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -a[(t, j)].div_floor(&pivot);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }

            // Row and column cleared; enforce divisibility on the rest.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => {
                    if pivot.is_negative() {
                        a.negate_row(t);
                        u.negate_row(t);
                    }
                    break;
                }
            }
        }
    }
    SmithForm { u, s: a, v }
}

fn least_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a[(bi, bj)].abs()) {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(m: &[Vec<i64>]) -> Vec<BigInt> {
        let m = IntMatrix::from_i64_rows(m);
        let f = smith_normal_form(&m);
        assert!(f.verify(&m), "invariants fail for {m}");
        f.diagonal()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_is_fixed() {
        let m = IntMatrix::identity(2);
        let f = smith_normal_form(&m);
        assert_eq!(f.s, m);
        assert_eq!(f.u, m);
        assert_eq!(f.v, m);
    }

    #[test]
    fn two_by_two_example() {
        assert_eq!(diag(&[vec![2, 4], vec![6, 8]]), ints(&[2, 4]));
    }

    #[test]
    fn already_diagonal() {
        assert_eq!(diag(&[vec![1, 0], vec![0, 0]]), ints(&[1, 0]));
    }

    #[test]
    fn divisibility_is_repaired() {
        // diag(2,3) is not in normal form: gcd 1, product 6
        assert_eq!(diag(&[vec![2, 0], vec![0, 3]]), ints(&[1, 6]));
        assert_eq!(diag(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]), ints(&[2, 2, 60]));
    }

    #[test]
    fn empty_and_degenerate_shapes() {
        let f = smith_normal_form(&IntMatrix::zeros(0, 0));
        assert!(f.diagonal().is_empty());
        let m = IntMatrix::zeros(0, 3);
        let f = smith_normal_form(&m);
        assert!(f.verify(&m));
        assert_eq!(f.v, IntMatrix::identity(3));
        let m = IntMatrix::zeros(2, 3);
        assert!(smith_normal_form(&m).verify(&m));
        assert_eq!(diag(&[vec![-3, 0, 0]]), ints(&[3]));
    }
}
