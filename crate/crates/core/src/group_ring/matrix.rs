use std::fmt;

use serde::Serialize;

use super::{BaseRing, GroupRingElement, RingError};

/// Square matrix over a single group ring `A[ℤ^r]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRingMatrix {
    #[serde(skip)]
    base: BaseRing,
    #[serde(skip)]
    rank: usize,
    size: usize,
    entries: Vec<Vec<GroupRingElement>>,
}

impl GroupRingMatrix {
    pub fn zeros(base: &BaseRing, rank: usize, size: usize) -> Self {
        let z = GroupRingElement::zero(base, rank);
        GroupRingMatrix {
            base: base.clone(),
            rank,
            size,
            entries: vec![vec![z; size]; size],
        }
    }

    pub fn identity(base: &BaseRing, rank: usize, size: usize) -> Self {
        let mut m = Self::zeros(base, rank, size);
        for i in 0..size {
            m.entries[i][i] = GroupRingElement::one(base, rank);
        }
        m
    }

    pub fn diagonal(base: &BaseRing, rank: usize, d: Vec<GroupRingElement>) -> Result<Self, RingError> {
        let mut m = Self::zeros(base, rank, d.len());
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x)?;
        }
        Ok(m)
    }

    pub fn from_rows(base: &BaseRing, rank: usize, rows: Vec<Vec<GroupRingElement>>) -> Result<Self, RingError> {
        let size = rows.len();
        let mut m = Self::zeros(base, rank, size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(RingError::Dimension(format!(
                    "row {i} has {} entries in a {size}×{size} matrix",
                    row.len()
                )));
            }
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x)?;
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn base(&self) -> &BaseRing {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupRingElement {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: GroupRingElement) -> Result<(), RingError> {
        if x.base() != &self.base || x.rank() != self.rank {
            return Err(RingError::Mismatch(format!(
                "entry over {} (rank {}) in a matrix over {} (rank {})",
                x.base(),
                x.rank(),
                self.base,
                self.rank
            )));
        }
        self.entries[i][j] = x;
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<GroupRingElement>] {
        &self.entries
    }

    fn check(&self, other: &Self) -> Result<(), RingError> {
        if self.size != other.size {
            return Err(RingError::Dimension(format!(
                "{0}×{0} versus {1}×{1}",
                self.size, other.size
            )));
        }
        if self.base != other.base || self.rank != other.rank {
            return Err(RingError::Mismatch(format!("{} versus {}", self.base, other.base)));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let n = self.size;
        let mut out = Self::zeros(&self.base, self.rank, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = GroupRingElement::zero(&self.base, self.rank);
                for k in 0..n {
                    acc = acc.add(&self.entries[i][k].mul(&other.entries[k][j])?)?;
                }
                out.entries[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self, RingError> {
        self.check(other)?;
        let mut out = self.clone();
        for i in 0..self.size {
            for j in 0..self.size {
                out.entries[i][j] = self.entries[i][j].add(&other.entries[i][j])?;
            }
        }
        Ok(out)
    }

    pub fn scalar_mul(&self, c: &GroupRingElement) -> Result<Self, RingError> {
        let mut out = self.clone();
        for row in out.entries.iter_mut() {
            for x in row.iter_mut() {
                *x = c.mul(x)?;
            }
        }
        Ok(out)
    }

    /// Laplace expansion over column subsets; division-free, so valid over
    /// every base in the family.
    pub fn determinant(&self) -> GroupRingElement {
        determinant_of(&self.base, self.rank, &self.entries)
    }

    /// Inverse via the adjugate when the determinant is a monomial unit.
    pub fn inverse(&self) -> Result<Self, RingError> {
        let det = self.determinant();
        let det_inv = det
            .monomial_inverse()
            .ok_or_else(|| RingError::NotInvertible(format!("determinant {det}")))?;
        let n = self.size;
        let mut out = Self::zeros(&self.base, self.rank, n);
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<GroupRingElement>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != i)
                            .map(|c| self.entries[r][c].clone())
                            .collect()
                    })
                    .collect();
                let mut c = determinant_of(&self.base, self.rank, &minor);
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                out.entries[i][j] = c.mul(&det_inv)?;
            }
        }
        Ok(out)
    }
}

pub(crate) fn determinant_of(
    base: &BaseRing,
    rank: usize,
    m: &[Vec<GroupRingElement>],
) -> GroupRingElement {
    let n = m.len();
    let mut dp: Vec<Option<GroupRingElement>> = vec![None; 1 << n];
    dp[0] = Some(GroupRingElement::one(base, rank));
    for mask in 0usize..(1 << n) {
        let Some(acc) = dp[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == n {
            dp[mask] = Some(acc);
            continue;
        }
        if acc.is_zero() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) != 0 || m[row][j].is_zero() {
                continue;
            }
            let mut term = acc.mul(&m[row][j]).expect("shared ring");
            if (mask >> (j + 1)).count_ones() % 2 == 1 {
                term = term.neg();
            }
            let slot = &mut dp[mask | (1 << j)];
            *slot = Some(match slot.take() {
                Some(s) => s.add(&term).expect("shared ring"),
                None => term,
            });
        }
    }
    dp[(1 << n) - 1]
        .take()
        .unwrap_or_else(|| GroupRingElement::zero(base, rank))
}

impl fmt::Display for GroupRingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
