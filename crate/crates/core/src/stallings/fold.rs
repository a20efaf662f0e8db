//! Folding of labeled graphs with annotation tracking.
//!
//! Every edge carries, besides its label, a word over the original generator
//! list. The invariant kept through folding: along any closed walk at the base,
//! the product of annotations evaluates (generators -> their words) to the
//! product of labels. Merges are preceded by a gauge change at the absorbed
//! vertex so that the two identified edges carry the same annotation.

use std::collections::VecDeque;

use crate::words::{FreeWord, Letter};

use super::CoreGraph;

#[derive(Clone, Debug)]
struct WEdge {
    from: usize,
    to: usize,
    generator: u32,
    ann: FreeWord,
}

#[derive(Clone, Copy, Debug)]
struct Trav {
    edge: usize,
    letter: Letter,
    other: usize,
}

pub(crate) struct Folder {
    rank: u32,
    edges: Vec<Option<WEdge>>,
    adj: Vec<Vec<usize>>,
    alive: Vec<bool>,
    /// Set when two parallel edges with different annotations were merged,
    /// i.e. the generator list satisfies a nontrivial relation.
    pub(crate) collapsed: bool,
}

impl Folder {
    pub(crate) fn new(rank: u32) -> Self {
        Folder { rank, edges: Vec::new(), adj: vec![Vec::new()], alive: vec![true], collapsed: false }
    }

    fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.alive.push(true);
        self.adj.len() - 1
    }

    /// Adds an edge reading `letter` from `p` to `q` with traversal annotation `ann`.
    fn add_edge(&mut self, p: usize, q: usize, letter: Letter, ann: FreeWord) {
        let e = if letter.is_inverse() {
            WEdge { from: q, to: p, generator: letter.generator(), ann: ann.inverse() }
        } else {
            WEdge { from: p, to: q, generator: letter.generator(), ann }
        };
        let id = self.edges.len();
        self.adj[e.from].push(id);
        if e.to != e.from {
            self.adj[e.to].push(id);
        }
        self.edges.push(Some(e));
    }

    /// Adds a closed petal at the base spelling `word`, annotated by `ann`.
    pub(crate) fn add_petal(&mut self, word: &FreeWord, ann: FreeWord) {
        if word.is_empty() {
            return;
        }
        let letters = word.letters();
        let mut cur = 0;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { 0 } else { self.add_vertex() };
            let a = if i == 0 { ann.clone() } else { FreeWord::identity() };
            self.add_edge(cur, next, l, a);
            cur = next;
        }
    }

    /// Adds `n - 1` fresh vertices and the given edges, all with trivial annotation.
    pub(crate) fn add_graph(&mut self, n: usize, edges: &[(usize, Letter, usize)]) {
        while self.adj.len() < n {
            self.add_vertex();
        }
        for &(p, l, q) in edges {
            self.add_edge(p, q, l, FreeWord::identity());
        }
    }

    fn travs(&self, v: usize) -> Vec<Trav> {
        let mut out = Vec::new();
        for &id in &self.adj[v] {
            let e = self.edges[id].as_ref().expect("adjacency lists only live edges");
            if e.from == v {
                out.push(Trav { edge: id, letter: Letter::pos(e.generator), other: e.to });
            }
            if e.to == v {
                out.push(Trav { edge: id, letter: Letter::neg(e.generator), other: e.from });
            }
        }
        out
    }

    fn trav_ann(&self, v: usize, t: &Trav) -> FreeWord {
        let e = self.edges[t.edge].as_ref().unwrap();
        if e.from == v && !t.letter.is_inverse() {
            e.ann.clone()
        } else {
            e.ann.inverse()
        }
    }

    fn remove_edge(&mut self, id: usize) {
        let e = self.edges[id].take().unwrap();
        self.adj[e.from].retain(|&x| x != id);
        if e.to != e.from {
            self.adj[e.to].retain(|&x| x != id);
        }
    }

    /// Re-gauges vertex `u` by `z`: arriving annotations get `·z`, leaving ones `z^-1·`.
    fn gauge(&mut self, u: usize, z: &FreeWord) {
        if z.is_empty() {
            return;
        }
        let zi = z.inverse();
        for &id in &self.adj[u] {
            let e = self.edges[id].as_mut().unwrap();
            let mut a = e.ann.clone();
            if e.to == u {
                a = a.mul(z);
            }
            if e.from == u {
                a = zi.mul(&a);
            }
            e.ann = a;
        }
    }

    /// Moves every edge of `from` onto `into` and kills `from`.
    fn absorb(&mut self, from: usize, into: usize) {
        let ids = std::mem::take(&mut self.adj[from]);
        for id in ids {
            let e = self.edges[id].as_mut().unwrap();
            if e.from == from {
                e.from = into;
            }
            if e.to == from {
                e.to = into;
            }
            if !self.adj[into].contains(&id) {
                self.adj[into].push(id);
            }
        }
        self.alive[from] = false;
    }

    pub(crate) fn fold(&mut self) {
        let mut work: Vec<usize> = (0..self.adj.len()).collect();
        while let Some(v) = work.pop() {
            if !self.alive[v] {
                continue;
            }
            let travs = self.travs(v);
            let mut seen: Vec<Option<Trav>> = vec![None; 2 * self.rank as usize];
            let mut conflict = None;
            for t in travs {
                let slot = &mut seen[t.letter.code() as usize];
                match slot {
                    Some(prev) => {
                        conflict = Some((*prev, t));
                        break;
                    }
                    None => *slot = Some(t),
                }
            }
            let Some((mut t1, mut t2)) = conflict else { continue };
            let mut a1 = self.trav_ann(v, &t1);
            let mut a2 = self.trav_ann(v, &t2);
            if t1.other == t2.other {
                if a1 != a2 {
                    self.collapsed = true;
                }
                self.remove_edge(t2.edge);
                work.push(v);
                continue;
            }
            if t2.other == 0 {
                std::mem::swap(&mut t1, &mut t2);
                std::mem::swap(&mut a1, &mut a2);
            }
            let u1 = t1.other;
            let u2 = t2.other;
            let z = a2.inverse().mul(&a1);
            self.gauge(u2, &z);
            debug_assert_eq!(self.trav_ann(v, &t1), self.trav_ann(v, &t2));
            self.remove_edge(t2.edge);
            self.absorb(u2, u1);
            work.push(u1);
            work.push(v);
        }
    }

    /// Drops non-base vertices of degree at most one, repeatedly, then
    /// renumbers into a [`CoreGraph`] in shortlex BFS order from the base.
    pub(crate) fn into_core(mut self) -> CoreGraph {
        let degree = |f: &Folder, v: usize| -> usize {
            f.adj[v]
                .iter()
                .map(|&id| {
                    let e = f.edges[id].as_ref().unwrap();
                    if e.from == e.to {
                        2
                    } else {
                        1
                    }
                })
                .sum()
        };
        let mut stack: Vec<usize> = (1..self.adj.len()).filter(|&v| self.alive[v]).collect();
        while let Some(v) = stack.pop() {
            if v == 0 || !self.alive[v] || degree(&self, v) > 1 {
                continue;
            }
            let ids = self.adj[v].clone();
            for id in ids {
                let e = self.edges[id].as_ref().unwrap();
                let other = if e.from == v { e.to } else { e.from };
                self.remove_edge(id);
                stack.push(other);
            }
            self.alive[v] = false;
        }

        let k = 2 * self.rank as usize;
        let mut order = vec![usize::MAX; self.adj.len()];
        let mut queue = VecDeque::new();
        let mut seq = Vec::new();
        order[0] = 0;
        queue.push_back(0);
        seq.push(0);
        while let Some(v) = queue.pop_front() {
            let mut ts = self.travs(v);
            ts.sort_by_key(|t| t.letter);
            for t in ts {
                if order[t.other] == usize::MAX {
                    order[t.other] = seq.len();
                    seq.push(t.other);
                    queue.push_back(t.other);
                }
            }
        }
        let n = seq.len();
        let mut trans = vec![super::NONE; n * k];
        let mut ann = vec![FreeWord::identity(); n * k];
        for (new, &old) in seq.iter().enumerate() {
            for t in self.travs(old) {
                let slot = new * k + t.letter.code() as usize;
                trans[slot] = order[t.other] as u32;
                ann[slot] = self.trav_ann(old, &t);
            }
        }
        CoreGraph::from_parts(self.rank, n, trans, ann)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petal_fold_of_a_and_ab_is_rose() {
        let mut f = Folder::new(2);
        f.add_petal(&FreeWord::from_signed(&[1]), FreeWord::from_signed(&[1]));
        f.add_petal(&FreeWord::from_signed(&[1, 2]), FreeWord::from_signed(&[2]));
        f.fold();
        let core = f.into_core();
        assert_eq!(core.vertex_count(), 1);
        assert_eq!(core.rank_of_subgroup(), 2);
    }
}
