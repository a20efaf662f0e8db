//! Finitely generated subgroups of free groups via Stallings folding.

mod fold;

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::words::{FreeGroup, FreeWord, Letter};

use fold::Folder;

pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StallingsError {
    #[error("homomorphism is not injective: image of a rank-{source_rank} group has rank {image}")]
    NotInjective { source_rank: usize, image: usize },
    #[error("ambient rank mismatch: {0} vs {1}")]
    RankMismatch(u32, u32),
}

/// A folded, trimmed, connected labeled graph with base vertex 0.
///
/// Vertices are numbered in shortlex BFS order from the base, so two cores
/// of the same subgroup are equal as values.
#[derive(Clone, Debug)]
pub struct CoreGraph {
    rank: u32,
    n: usize,
    trans: Vec<u32>,
    ann: Vec<FreeWord>,
}

impl PartialEq for CoreGraph {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.n == other.n && self.trans == other.trans
    }
}

impl Eq for CoreGraph {}

impl CoreGraph {
    pub(crate) fn from_parts(rank: u32, n: usize, trans: Vec<u32>, ann: Vec<FreeWord>) -> Self {
        CoreGraph { rank, n, trans, ann }
    }

    pub fn ambient_rank(&self) -> u32 {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> usize {
        0
    }

    fn slot(&self, v: usize, l: Letter) -> usize {
        v * 2 * self.rank as usize + l.code() as usize
    }

    pub fn step(&self, v: usize, l: Letter) -> Option<usize> {
        if l.generator() >= self.rank {
            return None;
        }
        let t = self.trans[self.slot(v, l)];
        (t != NONE).then_some(t as usize)
    }

    fn annotation(&self, v: usize, l: Letter) -> &FreeWord {
        &self.ann[self.slot(v, l)]
    }

    /// Positive edges `(from, generator, to)` in canonical order.
    pub fn edges(&self) -> Vec<(usize, u32, usize)> {
        let mut out = Vec::new();
        for v in 0..self.n {
            for g in 0..self.rank {
                if let Some(w) = self.step(v, Letter::pos(g)) {
                    out.push((v, g, w));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn rank_of_subgroup(&self) -> usize {
        self.edge_count() + 1 - self.n
    }

    pub fn degree(&self, v: usize) -> usize {
        Letter::all(self.rank).filter(|&l| self.step(v, l).is_some()).count()
    }

    /// Reads `w` from `v` as far as possible; returns the last vertex and the number of letters read.
    pub fn read_from(&self, v: usize, w: &FreeWord) -> (usize, usize) {
        let mut cur = v;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.step(cur, l) {
                Some(n) => cur = n,
                None => return (cur, i),
            }
        }
        (cur, w.len())
    }

    /// BFS distances from `v` in the underlying undirected graph.
    pub fn distances_from(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[v] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(u) = q.pop_front() {
            for l in Letter::all(self.rank) {
                if let Some(w) = self.step(u, l) {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        q.push_back(w);
                    }
                }
            }
        }
        dist
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> usize {
        (0..self.n).map(|v| self.distances_from(v).into_iter().max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Shortlex-least word labeling a walk from the base to each vertex.
    pub fn words_from_base(&self) -> Vec<FreeWord> {
        let mut out: Vec<Option<FreeWord>> = vec![None; self.n];
        out[0] = Some(FreeWord::identity());
        let mut q = VecDeque::from([0usize]);
        while let Some(u) = q.pop_front() {
            for l in Letter::all(self.rank) {
                if let Some(w) = self.step(u, l) {
                    if out[w].is_none() {
                        out[w] = Some(out[u].as_ref().unwrap().mul_letter(l));
                        q.push_back(w);
                    }
                }
            }
        }
        out.into_iter().map(|w| w.expect("core is connected")).collect()
    }

    /// Shortlex-least word labeling a walk from each vertex to the base.
    pub fn words_to_base(&self) -> Vec<FreeWord> {
        let dist = self.distances_from(0);
        (0..self.n)
            .map(|c| {
                let mut cur = c;
                let mut letters = Vec::with_capacity(dist[c]);
                while cur != 0 {
                    let (l, next) = Letter::all(self.rank)
                        .find_map(|l| self.step(cur, l).filter(|&w| dist[w] + 1 == dist[cur]).map(|w| (l, w)))
                        .expect("distance decreases toward the base");
                    letters.push(l);
                    cur = next;
                }
                FreeWord::from_letters(letters)
            })
            .collect()
    }

    pub fn to_dot(&self, names: &FreeGroup, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", title.replace('"', "'"));
        let _ = writeln!(s, "  node [shape=circle];");
        let _ = writeln!(s, "  0 [shape=doublecircle];");
        for (v, g, w) in self.edges() {
            let _ = writeln!(s, "  {v} -> {w} [label=\"{}\"];", names.format(&FreeWord::letter(Letter::pos(g))));
        }
        s.push_str("}\n");
        s
    }
}

/// A finitely generated subgroup of a free group, with its core and a free basis.
#[derive(Clone, Debug)]
pub struct SubgroupHandle {
    core: CoreGraph,
    generators: Vec<FreeWord>,
    basis: Vec<FreeWord>,
    /// For each basis element, the non-tree positive edge it comes from.
    basis_edges: Vec<(usize, u32)>,
    tree_words: Vec<FreeWord>,
}

impl PartialEq for SubgroupHandle {
    fn eq(&self, other: &Self) -> bool {
        self.core == other.core
    }
}

impl Eq for SubgroupHandle {}

impl SubgroupHandle {
    /// Folds `⟨generators⟩` in the free group of the given rank.
    pub fn fold(rank: u32, generators: &[FreeWord]) -> Self {
        let mut f = Folder::new(rank);
        for (i, g) in generators.iter().enumerate() {
            f.add_petal(g, FreeWord::letter(Letter::pos(i as u32)));
        }
        f.fold();
        Self::from_core(f.into_core(), generators.to_vec())
    }

    pub fn trivial(rank: u32) -> Self {
        Self::fold(rank, &[])
    }

    pub fn whole(rank: u32) -> Self {
        let gens: Vec<FreeWord> = (0..rank).map(|g| FreeWord::letter(Letter::pos(g))).collect();
        Self::fold(rank, &gens)
    }

    fn from_core(core: CoreGraph, generators: Vec<FreeWord>) -> Self {
        let tree_words = core.words_from_base();
        let mut parent: Vec<Option<(usize, Letter)>> = vec![None; core.n];
        for (v, w) in tree_words.iter().enumerate().skip(1) {
            let l = w.last().unwrap();
            let (p, _) = core.read_from(0, &w.prefix(w.len() - 1));
            parent[v] = Some((p, l));
        }
        let is_tree = |v: usize, g: u32, w: usize| {
            parent[w] == Some((v, Letter::pos(g))) || parent[v] == Some((w, Letter::neg(g)))
        };
        let mut basis = Vec::new();
        let mut basis_edges = Vec::new();
        for (v, g, w) in core.edges() {
            if !is_tree(v, g, w) {
                basis.push(tree_words[v].mul_letter(Letter::pos(g)).mul(&tree_words[w].inverse()));
                basis_edges.push((v, g));
            }
        }
        SubgroupHandle { core, generators, basis, basis_edges, tree_words }
    }

    pub fn core(&self) -> &CoreGraph {
        &self.core
    }

    pub fn ambient_rank(&self) -> u32 {
        self.core.rank
    }

    pub fn basis(&self) -> &[FreeWord] {
        &self.basis
    }

    pub fn generators(&self) -> &[FreeWord] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// True when the declared generators form a free basis of the subgroup.
    pub fn generators_are_free_basis(&self) -> bool {
        self.generators.iter().all(|g| !g.is_empty()) && self.rank() == self.generators.len()
    }

    pub fn contains(&self, w: &FreeWord) -> bool {
        let (end, read) = self.core.read_from(0, w);
        end == 0 && read == w.len()
    }

    /// Expression of `w` in the basis, as a word whose generator `i` stands for `basis()[i]`.
    pub fn membership(&self, w: &FreeWord) -> Option<FreeWord> {
        let mut cur = 0usize;
        let mut expr = Vec::new();
        for &l in w.letters() {
            let next = self.core.step(cur, l)?;
            let (from, g) = if l.is_inverse() { (next, l.generator()) } else { (cur, l.generator()) };
            if let Some(i) = self.basis_edges.iter().position(|&e| e == (from, g)) {
                expr.push(Letter::new(i as u32, l.is_inverse()));
            }
            cur = next;
        }
        (cur == 0).then(|| FreeWord::from_letters(expr))
    }

    /// Expression of `w` in the declared generators (generator `i` stands for `generators()[i]`).
    pub fn express_in_generators(&self, w: &FreeWord) -> Option<FreeWord> {
        let mut cur = 0usize;
        let mut expr = FreeWord::identity();
        for &l in w.letters() {
            let next = self.core.step(cur, l)?;
            expr = expr.mul(self.core.annotation(cur, l));
            cur = next;
        }
        (cur == 0).then_some(expr)
    }

    /// Substitutes basis words into a basis expression.
    pub fn expand(&self, expr: &FreeWord) -> FreeWord {
        expand_with(&self.basis, expr)
    }

    /// Substitutes generator words into a generator expression.
    pub fn expand_generators(&self, expr: &FreeWord) -> FreeWord {
        expand_with(&self.generators, expr)
    }

    pub fn intersect(&self, other: &SubgroupHandle) -> SubgroupHandle {
        assert_eq!(self.ambient_rank(), other.ambient_rank(), "ambient ranks differ");
        let rank = self.ambient_rank();
        let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut pairs = vec![(0usize, 0usize)];
        index.insert((0, 0), 0);
        let mut edges = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            for l in Letter::all(rank) {
                if let (Some(a), Some(b)) = (self.core.step(p, l), other.core.step(q, l)) {
                    let j = *index.entry((a, b)).or_insert_with(|| {
                        pairs.push((a, b));
                        pairs.len() - 1
                    });
                    if !l.is_inverse() {
                        edges.push((i, l, j));
                    }
                }
            }
            i += 1;
        }
        let mut f = Folder::new(rank);
        f.add_graph(pairs.len(), &edges);
        f.fold();
        let core = f.into_core();
        let mut h = Self::from_core(core, Vec::new());
        h.generators = h.basis.clone();
        h.reannotate();
        h
    }

    /// Annotates tree edges trivially and each non-tree edge by its basis letter.
    fn reannotate(&mut self) {
        let k = 2 * self.core.rank as usize;
        for a in self.core.ann.iter_mut() {
            *a = FreeWord::identity();
        }
        for (i, &(v, g)) in self.basis_edges.iter().enumerate() {
            let w = self.core.step(v, Letter::pos(g)).unwrap();
            let x = FreeWord::letter(Letter::pos(i as u32));
            self.core.ann[v * k + Letter::pos(g).code() as usize] = x.clone();
            self.core.ann[w * k + Letter::neg(g).code() as usize] = x.inverse();
        }
    }

    /// `x H x^-1`.
    pub fn conjugate(&self, x: &FreeWord) -> SubgroupHandle {
        let gens: Vec<FreeWord> = self.basis.iter().map(|b| b.conjugate(x)).collect();
        Self::fold(self.ambient_rank(), &gens)
    }

    /// `H ⊆ K`.
    pub fn is_subgroup_of(&self, other: &SubgroupHandle) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    /// Vertex reached by reading `w` from the base in the Schreier graph,
    /// as a core vertex plus the part of `w` that leaves the core.
    pub fn state(&self, w: &FreeWord) -> (usize, FreeWord) {
        let (c, read) = self.core.read_from(0, w);
        (c, w.suffix_from(read))
    }

    /// Length of the longest prefix of `w` readable in the core from the base.
    pub fn readable_prefix_len(&self, w: &FreeWord) -> usize {
        self.core.read_from(0, w).1
    }

    /// Shortlex-least element of the right coset `H w`.
    pub fn right_coset_rep(&self, w: &FreeWord) -> FreeWord {
        let (c, s) = self.state(w);
        self.tree_min_word(c).mul(&s)
    }

    fn tree_min_word(&self, c: usize) -> FreeWord {
        self.tree_words[c].clone()
    }

    /// Splits `g = r·h` with `h ∈ H` and `r` the shortlex-least element of `gH`.
    pub fn left_coset_rep(&self, g: &FreeWord) -> (FreeWord, FreeWord) {
        let (c, s) = self.state(&g.inverse());
        let back = self.core.words_to_base();
        let r = s.inverse().mul(&back[c]);
        let h = r.inverse().mul(g);
        (r, h)
    }

    /// Shortlex-least representatives of the left cosets `rH` with `|r| <= l`,
    /// in shortlex order, and whether some left coset needs a longer representative.
    pub fn left_cosets(&self, l: usize) -> (Vec<FreeWord>, bool) {
        let rank = self.ambient_rank();
        let back = self.core.words_to_base();
        let full = (0..self.core.n).all(|c| self.core.degree(c) == 2 * rank as usize);
        let mut reps = Vec::new();
        let mut truncated = false;
        for c in 0..self.core.n {
            let b = &back[c];
            if b.len() > l {
                truncated = true;
                continue;
            }
            // suffixes s leaving the core at c; r = s^-1 b
            let mut layer = vec![FreeWord::identity()];
            reps.push(b.clone());
            for _ in b.len()..l {
                let mut next = Vec::new();
                for s in &layer {
                    for x in Letter::all(rank) {
                        let ok = match s.last() {
                            None => self.core.step(c, x).is_none(),
                            Some(y) => y != x.inverse(),
                        };
                        if ok {
                            let t = s.mul_letter(x);
                            reps.push(t.inverse().mul(b));
                            next.push(t);
                        }
                    }
                }
                layer = next;
            }
            if !full && !layer.is_empty() {
                truncated = true;
            }
        }
        reps.sort();
        (reps, truncated)
    }

    /// Shortlex-least representatives of every right coset `Hg` having a
    /// representative of length at most `l`, together with the map sending
    /// each word of length at most `l` to its representative.
    pub fn schreier_cosets(&self, l: usize) -> (Vec<FreeWord>, BTreeMap<FreeWord, FreeWord>) {
        let rank = self.ambient_rank();
        let mut map = BTreeMap::new();
        let mut reps = std::collections::BTreeSet::new();
        for w in FreeWord::ball(rank, l) {
            let r = self.right_coset_rep(&w);
            if r.len() <= l {
                reps.insert(r.clone());
            }
            map.insert(w, r);
        }
        (reps.into_iter().collect(), map)
    }

    /// Image of this subgroup under the homomorphism sending generator `i` to `images[i]`.
    pub fn image(&self, target_rank: u32, images: &[FreeWord]) -> SubgroupHandle {
        let gens: Vec<FreeWord> = self.basis.iter().map(|b| expand_with(images, b)).collect();
        Self::fold(target_rank, &gens)
    }

    /// `φ^-1(A ∩ Im φ)` for the homomorphism `φ` from a free group of rank
    /// `images.len()` sending generator `i` to `images[i]`.
    pub fn preimage(images: &[FreeWord], target: &SubgroupHandle) -> Result<SubgroupHandle, StallingsError> {
        let im = Self::fold(target.ambient_rank(), images);
        if !im.generators_are_free_basis() {
            return Err(StallingsError::NotInjective { source_rank: images.len(), image: im.rank() });
        }
        let meet = target.intersect(&im);
        let gens: Vec<FreeWord> = meet
            .basis
            .iter()
            .map(|b| im.express_in_generators(b).expect("intersection lies in the image"))
            .collect();
        Ok(Self::fold(images.len() as u32, &gens))
    }

    /// DOT rendering of the Schreier graph truncated to words of length at most `l`.
    pub fn schreier_dot(&self, names: &FreeGroup, l: usize) -> String {
        let (reps, _) = self.schreier_cosets(l);
        let id = |w: &FreeWord| reps.iter().position(|r| r == w);
        let mut s = String::from("digraph schreier {\n  node [shape=box];\n");
        for (i, r) in reps.iter().enumerate() {
            let label = if r.is_empty() { "1".to_string() } else { names.format(r) };
            let _ = writeln!(s, "  {i} [label=\"H {label}\"];");
        }
        for (i, r) in reps.iter().enumerate() {
            for g in 0..self.ambient_rank() {
                let l = Letter::pos(g);
                let t = self.right_coset_rep(&r.mul_letter(l));
                if let Some(j) = id(&t) {
                    let _ = writeln!(s, "  {i} -> {j} [label=\"{}\"];", names.format(&FreeWord::letter(l)));
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Substitutes `words[i]` for generator `i` in `expr`.
pub fn expand_with(words: &[FreeWord], expr: &FreeWord) -> FreeWord {
    let mut out = FreeWord::identity();
    for &l in expr.letters() {
        let w = &words[l.generator() as usize];
        out = if l.is_inverse() { out.mul(&w.inverse()) } else { out.mul(w) };
    }
    out
}

#[cfg(test)]
mod tests;
