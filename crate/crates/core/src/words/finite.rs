use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("group order must be positive")]
    Empty,
    #[error("row {0} has the wrong length")]
    Ragged(usize),
    #[error("entry {0} is not an element index")]
    OutOfRange(u32),
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(u32),
    #[error("associativity fails on ({0}, {1}, {2})")]
    NotAssociative(u32, u32, u32),
}

/// A finite group given by its full multiplication table. Validated on
/// construction; a value of this type is always a group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupTable {
    order: u32,
    product: Vec<u32>,
    inverse: Vec<u32>,
    identity: u32,
}

impl FiniteGroupTable {
    pub fn new(rows: &[Vec<u32>]) -> Result<Self, TableError> {
        let n = rows.len();
        if n == 0 {
            return Err(TableError::Empty);
        }
        let mut product = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(TableError::Ragged(i));
            }
            for &x in row {
                if x as usize >= n {
                    return Err(TableError::OutOfRange(x));
                }
                product.push(x);
            }
        }
        let at = |a: usize, b: usize| product[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or(TableError::NoIdentity)?;
        let mut inverse = Vec::with_capacity(n);
        for x in 0..n {
            let y = (0..n)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or(TableError::NoInverse(x as u32))?;
            inverse.push(y as u32);
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(TableError::NotAssociative(a as u32, b as u32, c as u32));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { order: n as u32, product, inverse, identity: identity as u32 })
    }

    /// The cyclic group of order `n` with element `k` standing for `g^k`.
    pub fn cyclic(n: u32) -> Self {
        let rows: Vec<Vec<u32>> = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        FiniteGroupTable::new(&rows).expect("cyclic table is a group")
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.product[(a * self.order + b) as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.product.chunks(self.order as usize).map(|r| r.to_vec()).collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order
    }

    /// Word length with respect to the full element set: 0 for the identity, else 1.
    pub fn len(&self, a: u32) -> usize {
        (a != self.identity) as usize
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order as usize];
        seen[self.identity as usize] = true;
        let mut stack = vec![self.identity];
        while let Some(x) = stack.pop() {
            for &g in gens {
                for y in [self.mul(x, g), self.mul(x, self.inv(g))] {
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.order).filter(|&x| seen[x as usize]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_is_valid() {
        let z6 = FiniteGroupTable::cyclic(6);
        assert_eq!(z6.mul(4, 5), 3);
        assert_eq!(z6.inv(2), 4);
        assert_eq!(z6.generated(&[2]), vec![0, 2, 4]);
    }

    #[test]
    fn rejects_non_groups() {
        assert_eq!(FiniteGroupTable::new(&[]), Err(TableError::Empty));
        assert_eq!(FiniteGroupTable::new(&[vec![0, 1], vec![1, 1]]), Err(TableError::NoInverse(1)));
        assert!(FiniteGroupTable::new(&[vec![0, 1], vec![1]]).is_err());
    }

    proptest! {
        #[test]
        fn corrupted_tables_are_rejected(n in 2u32..7, i in 0usize..36, j in 0usize..36, delta in 1u32..6) {
            let z = FiniteGroupTable::cyclic(n);
            let mut rows = z.rows();
            let (i, j) = (i % n as usize, j % n as usize);
            let delta = 1 + delta % (n - 1);
            rows[i][j] = (rows[i][j] + delta) % n;
            // a changed entry breaks the Latin-square or identity structure of Z/n
            prop_assert!(FiniteGroupTable::new(&rows).is_err());
        }
    }
}
