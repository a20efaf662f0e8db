use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::words::{split_power, FiniteGroupTable, FreeGroup, FreeWord, Letter, WordError};

/// An element of a vertex or edge group.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GElem {
    Free(FreeWord),
    Finite(u32),
}

impl fmt::Debug for GElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GElem::Free(w) => write!(f, "{w:?}"),
            GElem::Finite(i) => write!(f, "#{i}"),
        }
    }
}

impl GElem {
    pub fn as_free(&self) -> &FreeWord {
        match self {
            GElem::Free(w) => w,
            GElem::Finite(_) => panic!("expected a free-group element"),
        }
    }

    pub fn as_finite(&self) -> u32 {
        match self {
            GElem::Finite(i) => *i,
            GElem::Free(_) => panic!("expected a finite-group element"),
        }
    }
}

/// A vertex or edge group: free on named generators, or finite by table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSpec {
    Free(FreeGroup),
    Finite {
        names: Vec<String>,
        table: FiniteGroupTable,
        /// Declared generators; these index edge-group images.
        generators: Vec<u32>,
    },
}

impl GroupSpec {
    pub fn is_free(&self) -> bool {
        matches!(self, GroupSpec::Free(_))
    }

    pub fn free_rank(&self) -> Option<u32> {
        match self {
            GroupSpec::Free(f) => Some(f.rank()),
            GroupSpec::Finite { .. } => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            GroupSpec::Free(f) => f.rank() == 0,
            GroupSpec::Finite { table, .. } => table.order() == 1,
        }
    }

    pub fn identity(&self) -> GElem {
        match self {
            GroupSpec::Free(_) => GElem::Free(FreeWord::identity()),
            GroupSpec::Finite { table, .. } => GElem::Finite(table.identity()),
        }
    }

    pub fn is_identity(&self, g: &GElem) -> bool {
        *g == self.identity()
    }

    pub fn mul(&self, x: &GElem, y: &GElem) -> GElem {
        match (self, x, y) {
            (GroupSpec::Free(_), GElem::Free(a), GElem::Free(b)) => GElem::Free(a.mul(b)),
            (GroupSpec::Finite { table, .. }, GElem::Finite(a), GElem::Finite(b)) => GElem::Finite(table.mul(*a, *b)),
            _ => panic!("element kind does not match its group"),
        }
    }

    pub fn inv(&self, x: &GElem) -> GElem {
        match (self, x) {
            (GroupSpec::Free(_), GElem::Free(a)) => GElem::Free(a.inverse()),
            (GroupSpec::Finite { table, .. }, GElem::Finite(a)) => GElem::Finite(table.inv(*a)),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// Word length; finite groups are generated by all their elements.
    pub fn len(&self, x: &GElem) -> usize {
        match x {
            GElem::Free(w) => w.len(),
            GElem::Finite(_) => usize::from(!self.is_identity(x)),
        }
    }

    /// Shortlex order: length first, then letters (free) or element index (finite).
    pub fn cmp(&self, x: &GElem, y: &GElem) -> Ordering {
        match (x, y) {
            (GElem::Free(a), GElem::Free(b)) => a.cmp(b),
            (GElem::Finite(a), GElem::Finite(b)) => (self.len(x), a).cmp(&(self.len(y), b)),
            _ => panic!("element kind does not match its group"),
        }
    }

    /// Number of declared generators (free rank, or the finite generator list).
    pub fn generator_count(&self) -> usize {
        match self {
            GroupSpec::Free(f) => f.rank() as usize,
            GroupSpec::Finite { generators, .. } => generators.len(),
        }
    }

    pub fn generator(&self, i: usize) -> GElem {
        match self {
            GroupSpec::Free(_) => GElem::Free(FreeWord::letter(Letter::pos(i as u32))),
            GroupSpec::Finite { generators, .. } => GElem::Finite(generators[i]),
        }
    }

    /// Cayley-graph generators used for the word metric, inverses included.
    pub fn cayley_generators(&self) -> Vec<GElem> {
        match self {
            GroupSpec::Free(f) => Letter::all(f.rank()).map(|l| GElem::Free(FreeWord::letter(l))).collect(),
            GroupSpec::Finite { table, .. } => {
                (0..table.order()).filter(|&i| i != table.identity()).map(GElem::Finite).collect()
            }
        }
    }

    /// All elements, when the group is finite.
    pub fn elements(&self) -> Option<Vec<GElem>> {
        match self {
            GroupSpec::Free(f) if f.rank() == 0 => Some(vec![self.identity()]),
            GroupSpec::Free(_) => None,
            GroupSpec::Finite { table, .. } => Some((0..table.order()).map(GElem::Finite).collect()),
        }
    }

    /// Substitutes `images[i]` (in `target`) for generator `i` of this group
    /// in the free word `w`.
    pub fn eval_word(target: &GroupSpec, images: &[GElem], w: &FreeWord) -> GElem {
        let mut acc = target.identity();
        for l in w.letters() {
            let g = &images[l.generator() as usize];
            let g = if l.is_inverse() { target.inv(g) } else { g.clone() };
            acc = target.mul(&acc, &g);
        }
        acc
    }

    pub fn parse(&self, text: &str) -> Result<GElem, WordError> {
        match self {
            GroupSpec::Free(f) => f.parse(text).map(GElem::Free),
            GroupSpec::Finite { names, table, .. } => {
                let mut acc = table.identity();
                for tok in text.split_whitespace() {
                    if tok == "1" {
                        continue;
                    }
                    let (name, power) = split_power(tok)?;
                    let i = names
                        .iter()
                        .position(|n| n == name)
                        .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?
                        as u32;
                    let base = if power < 0 { table.inv(i) } else { i };
                    for _ in 0..power.unsigned_abs() {
                        acc = table.mul(acc, base);
                    }
                }
                Ok(GElem::Finite(acc))
            }
        }
    }

    pub fn format(&self, g: &GElem) -> String {
        match (self, g) {
            (GroupSpec::Free(f), GElem::Free(w)) => f.format(w),
            (GroupSpec::Finite { names, table, .. }, GElem::Finite(i)) => {
                if *i == table.identity() {
                    "1".to_string()
                } else {
                    names[*i as usize].clone()
                }
            }
            _ => panic!("element kind does not match its group"),
        }
    }

    /// Generator names as used in presentations (finite groups: all non-identity elements).
    pub fn presentation_generators(&self) -> Vec<String> {
        match self {
            GroupSpec::Free(f) => f.names().to_vec(),
            GroupSpec::Finite { names, table, .. } => {
                (0..table.order()).filter(|&i| i != table.identity()).map(|i| names[i as usize].clone()).collect()
            }
        }
    }
}
