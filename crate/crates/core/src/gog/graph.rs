use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::GogError;

/// An oriented edge. Unoriented edge `i` has orientations `2i` (as declared)
/// and `2i + 1` (its reverse, the bar).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OEdge(pub u32);

impl OEdge {
    pub fn positive(index: usize) -> Self {
        OEdge(2 * index as u32)
    }

    pub fn negative(index: usize) -> Self {
        OEdge(2 * index as u32 + 1)
    }

    pub fn index(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn bar(self) -> Self {
        OEdge(self.0 ^ 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 % 2 == 0
    }
}

impl fmt::Debug for OEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "e{}", self.index())
        } else {
            write!(f, "e{}~", self.index())
        }
    }
}

/// A finite connected graph with an orientation-reversing involution without fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    ends: Vec<(usize, usize)>,
}

impl OrientedGraph {
    /// Builds from declared unoriented edges `(o, t)`; each gets its bar automatically.
    pub fn from_pairs(n: usize, ends: Vec<(usize, usize)>) -> Result<Self, GogError> {
        for &(o, t) in &ends {
            if o >= n || t >= n {
                return Err(GogError::Structure(format!("edge endpoint {} out of range", o.max(t))));
            }
        }
        let g = OrientedGraph { n, ends };
        g.check_connected()?;
        Ok(g)
    }

    /// Builds from fully explicit oriented data: origin, terminus and bar of
    /// every oriented edge. Checks that bar is a fixed-point-free involution
    /// that swaps origin and terminus.
    pub fn new(n: usize, o: &[usize], t: &[usize], bar: &[usize]) -> Result<Self, GogError> {
        let m = o.len();
        if t.len() != m || bar.len() != m {
            return Err(GogError::Structure("origin, terminus and bar lists differ in length".into()));
        }
        let mut ends = Vec::new();
        for e in 0..m {
            let b = bar[e];
            if b >= m {
                return Err(GogError::Structure(format!("bar of edge {e} is out of range")));
            }
            if b == e {
                return Err(GogError::Structure(format!("edge {e} is its own bar; the involution must be fixed-point free")));
            }
            if bar[b] != e {
                return Err(GogError::Structure(format!("bar is not an involution at edge {e}")));
            }
            if o[b] != t[e] || t[b] != o[e] {
                return Err(GogError::Structure(format!("bar of edge {e} does not swap origin and terminus")));
            }
            if e < b {
                ends.push((o[e], t[e]));
            }
        }
        Self::from_pairs(n, ends)
    }

    fn check_connected(&self) -> Result<(), GogError> {
        if self.n == 0 {
            return Err(GogError::Structure("graph has no vertices".into()));
        }
        let seen = self.bfs_order(0);
        if seen.len() != self.n {
            return Err(GogError::Structure("graph is not connected".into()));
        }
        Ok(())
    }

    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut order = vec![root];
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for e in self.out_edges(v) {
                let w = self.t(e);
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    q.push_back(w);
                }
            }
        }
        order
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of unoriented edges.
    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = OEdge> {
        (0..2 * self.ends.len() as u32).map(OEdge)
    }

    pub fn o(&self, e: OEdge) -> usize {
        let (a, b) = self.ends[e.index()];
        if e.is_positive() {
            a
        } else {
            b
        }
    }

    pub fn t(&self, e: OEdge) -> usize {
        self.o(e.bar())
    }

    /// Oriented edges leaving `v`, in id order.
    pub fn out_edges(&self, v: usize) -> Vec<OEdge> {
        self.oriented_edges().filter(|&e| self.o(e) == v).collect()
    }

    /// BFS spanning tree from `root`, as a flag per unoriented edge.
    pub fn bfs_tree(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut tree = vec![false; self.ends.len()];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for e in self.out_edges(v) {
                let w = self.t(e);
                if !seen[w] {
                    seen[w] = true;
                    tree[e.index()] = true;
                    q.push_back(w);
                }
            }
        }
        tree
    }

    /// Checks that the flagged edges form a spanning tree.
    pub fn check_tree(&self, tree: &[bool]) -> Result<(), GogError> {
        let count = tree.iter().filter(|&&b| b).count();
        if count + 1 != self.n {
            return Err(GogError::Tree(format!("{count} edges cannot span {} vertices as a tree", self.n)));
        }
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if !tree[i] {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(GogError::Tree(format!("tree edge {i} closes a cycle")));
            }
            parent[ra] = rb;
        }
        Ok(())
    }

    /// Oriented tree path from `root` to every vertex.
    pub fn tree_paths(&self, root: usize, tree: &[bool]) -> Vec<Vec<OEdge>> {
        let mut paths: Vec<Option<Vec<OEdge>>> = vec![None; self.n];
        paths[root] = Some(Vec::new());
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for e in self.out_edges(v) {
                let w = self.t(e);
                if tree[e.index()] && paths[w].is_none() {
                    let mut p = paths[v].clone().unwrap();
                    p.push(e);
                    paths[w] = Some(p);
                    q.push_back(w);
                }
            }
        }
        paths.into_iter().map(|p| p.expect("tree spans")).collect()
    }
}
