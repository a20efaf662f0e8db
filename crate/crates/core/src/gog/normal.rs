use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{GElem, GogError, GraphOfGroups, OEdge};

/// An alternating sequence `g0 e1 g1 ... en gn` describing a path in the
/// graph of groups from `start` to the terminus of `en`. Values returned by
/// [`GraphOfGroups::normalize`] are pinch-free and canonically split: every
/// `gi` before an edge is the shortlex-least element of its coset of the image
/// of that edge's group, so equal elements have equal sequences.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ReducedSequence {
    pub start: usize,
    pub head: GElem,
    pub steps: Vec<(OEdge, GElem)>,
}

impl ReducedSequence {
    pub fn edge_count(&self) -> usize {
        self.steps.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = OEdge> + '_ {
        self.steps.iter().map(|s| s.0)
    }

    /// The last vertex-group syllable.
    pub fn trailing(&self) -> &GElem {
        self.steps.last().map(|s| &s.1).unwrap_or(&self.head)
    }

    pub fn trailing_mut(&mut self) -> &mut GElem {
        match self.steps.last_mut() {
            Some(s) => &mut s.1,
            None => &mut self.head,
        }
    }
}

impl GraphOfGroups {
    pub fn end(&self, s: &ReducedSequence) -> usize {
        s.steps.last().map(|&(e, _)| self.t(e)).unwrap_or(s.start)
    }

    pub fn identity_at(&self, v: usize) -> ReducedSequence {
        ReducedSequence { start: v, head: self.vgroup(v).identity(), steps: Vec::new() }
    }

    pub fn vertex_element(&self, v: usize, g: GElem) -> ReducedSequence {
        ReducedSequence { start: v, head: g, steps: Vec::new() }
    }

    pub fn edge_element(&self, e: OEdge) -> ReducedSequence {
        ReducedSequence {
            start: self.o(e),
            head: self.vgroup(self.o(e)).identity(),
            steps: vec![(e, self.vgroup(self.t(e)).identity())],
        }
    }

    /// Tree path from the base to `v` with trivial syllables.
    pub fn tree_path_element(&self, v: usize) -> ReducedSequence {
        let mut s = self.identity_at(self.base());
        for &e in self.tree_path(v) {
            s.steps.push((e, self.vgroup(self.t(e)).identity()));
        }
        s
    }

    /// Checks path consistency and that syllables live in the right groups.
    pub fn check_sequence(&self, s: &ReducedSequence) -> Result<(), GogError> {
        if s.start >= self.vertex_count() {
            return Err(GogError::Sequence(format!("start vertex {} out of range", s.start)));
        }
        let kind_ok = |v: usize, g: &GElem| match (self.vgroup(v), g) {
            (super::GroupSpec::Free(f), GElem::Free(w)) => w.check_rank(f.rank()).is_ok(),
            (super::GroupSpec::Finite { table, .. }, GElem::Finite(i)) => *i < table.order(),
            _ => false,
        };
        if !kind_ok(s.start, &s.head) {
            return Err(GogError::Sequence("head syllable is not in the start vertex group".into()));
        }
        let mut at = s.start;
        for (i, (e, g)) in s.steps.iter().enumerate() {
            if e.index() >= self.graph().edge_count() {
                return Err(GogError::Sequence(format!("edge {} out of range", e.index())));
            }
            if self.o(*e) != at {
                return Err(GogError::Sequence(format!("edge {} does not start where syllable {i} ends", self.edge_name(*e))));
            }
            at = self.t(*e);
            if !kind_ok(at, g) {
                return Err(GogError::Sequence(format!("syllable {} is not in its vertex group", i + 1)));
            }
        }
        Ok(())
    }

    /// Applies pinches `e φ_{e,t}(a) ē -> φ_{e,o}(a)` until none applies, then
    /// splits syllables left to right into transversal and edge-image parts.
    pub fn britton_reduce(&self, raw: &ReducedSequence) -> Result<ReducedSequence, GogError> {
        self.check_sequence(raw)?;
        Ok(self.normalize(raw))
    }

    pub fn normalize(&self, raw: &ReducedSequence) -> ReducedSequence {
        let mut head = raw.head.clone();
        let mut stack: Vec<(OEdge, GElem)> = Vec::with_capacity(raw.steps.len());
        for (e, g) in &raw.steps {
            if let Some((el, gl)) = stack.last() {
                if *e == el.bar() {
                    if let Some(a) = self.preimage_o(el.bar(), gl) {
                        let el = *el;
                        let x = self.phi_o(el, &a);
                        stack.pop();
                        let vg = self.vgroup(self.o(el));
                        let prev = match stack.last_mut() {
                            Some(s) => &mut s.1,
                            None => &mut head,
                        };
                        *prev = vg.mul(&vg.mul(prev, &x), g);
                        continue;
                    }
                }
            }
            stack.push((*e, g.clone()));
        }
        for i in 0..stack.len() {
            let e = stack[i].0;
            let cur = if i == 0 { &mut head } else { &mut stack[i - 1].1 };
            let (r, a) = self.split_o(e, cur);
            *cur = r;
            let vt = self.vgroup(self.t(e));
            let pushed = self.phi_t(e, &a);
            stack[i].1 = vt.mul(&pushed, &stack[i].1);
        }
        ReducedSequence { start: raw.start, head, steps: stack }
    }

    /// Concatenation without reduction.
    pub fn concat_raw(&self, u: &ReducedSequence, v: &ReducedSequence) -> ReducedSequence {
        assert_eq!(self.end(u), v.start, "paths do not compose");
        let mut out = u.clone();
        let vg = self.vgroup(v.start);
        let t = out.trailing_mut();
        *t = vg.mul(t, &v.head);
        out.steps.extend(v.steps.iter().cloned());
        out
    }

    pub fn mul(&self, u: &ReducedSequence, v: &ReducedSequence) -> ReducedSequence {
        self.normalize(&self.concat_raw(u, v))
    }

    pub fn inverse(&self, u: &ReducedSequence) -> ReducedSequence {
        let end = self.end(u);
        let mut syl: Vec<GElem> = vec![u.head.clone()];
        syl.extend(u.steps.iter().map(|s| s.1.clone()));
        let mut verts = vec![u.start];
        verts.extend(u.steps.iter().map(|s| self.t(s.0)));
        let n = u.steps.len();
        let head = self.vgroup(end).inv(&syl[n]);
        let steps = (0..n)
            .rev()
            .map(|i| (u.steps[i].0.bar(), self.vgroup(verts[i]).inv(&syl[i])))
            .collect();
        ReducedSequence { start: end, head, steps }
    }

    pub fn element_eq(&self, u: &ReducedSequence, v: &ReducedSequence) -> bool {
        u.start == v.start && self.end(u) == self.end(v) && self.normalize(u) == self.normalize(v)
    }

    pub fn is_identity(&self, u: &ReducedSequence) -> bool {
        let n = self.normalize(u);
        n.steps.is_empty() && self.vgroup(n.start).is_identity(&n.head)
    }

    /// `g^k` for a loop `g`.
    pub fn pow(&self, g: &ReducedSequence, k: i64) -> ReducedSequence {
        let base = if k < 0 { self.inverse(g) } else { g.clone() };
        let mut acc = self.identity_at(g.start);
        for _ in 0..k.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        acc
    }

    /// Canonical representative of the coset `g G_v`, for `g` a loop at the
    /// base and `G_v` embedded by conjugation along the tree path to `v`.
    pub fn coset_rep(&self, g: &ReducedSequence, v: usize) -> ReducedSequence {
        let p = self.tree_path_element(v);
        let mut locus = self.mul(g, &p);
        *locus.trailing_mut() = self.vgroup(v).identity();
        self.mul(&locus, &self.inverse(&p))
    }

    /// Word length: syllable lengths plus one per edge.
    pub fn sequence_len(&self, s: &ReducedSequence) -> usize {
        let mut total = self.vgroup(s.start).len(&s.head);
        for (e, g) in &s.steps {
            total += 1 + self.vgroup(self.t(*e)).len(g);
        }
        total
    }

    pub fn format_sequence(&self, s: &ReducedSequence) -> String {
        let mut out = String::new();
        let push = |out: &mut String, part: String| {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&part);
        };
        let vg = self.vgroup(s.start);
        if !vg.is_identity(&s.head) {
            push(&mut out, vg.format(&s.head));
        }
        for (e, g) in &s.steps {
            push(&mut out, self.edge_name(*e));
            let vg = self.vgroup(self.t(*e));
            if !vg.is_identity(g) {
                push(&mut out, vg.format(g));
            }
        }
        if out.is_empty() {
            let _ = write!(out, "1");
        }
        out
    }
}

impl GraphOfGroups {
    /// A random vertex-group element of length at most `max_len`.
    pub fn random_vertex_element<R: rand::Rng>(&self, rng: &mut R, v: usize, max_len: usize) -> GElem {
        match self.vgroup(v) {
            super::GroupSpec::Free(f) => {
                if f.rank() == 0 {
                    return self.vgroup(v).identity();
                }
                let n = rng.gen_range(0..=max_len);
                let letters = (0..n).map(|_| crate::words::Letter::new(rng.gen_range(0..f.rank()), rng.gen_bool(0.5)));
                GElem::Free(crate::words::FreeWord::from_letters(letters))
            }
            super::GroupSpec::Finite { table, .. } => GElem::Finite(rng.gen_range(0..table.order())),
        }
    }

    /// A random unreduced sequence from `start` crossing `edges` random edges.
    pub fn random_path<R: rand::Rng>(&self, rng: &mut R, start: usize, edges: usize, max_len: usize) -> ReducedSequence {
        let mut s = ReducedSequence { start, head: self.random_vertex_element(rng, start, max_len), steps: Vec::new() };
        let mut at = start;
        for _ in 0..edges {
            let out = self.graph().out_edges(at);
            if out.is_empty() {
                break;
            }
            let e = out[rng.gen_range(0..out.len())];
            at = self.t(e);
            s.steps.push((e, self.random_vertex_element(rng, at, max_len)));
        }
        s
    }

    /// A random loop at the base vertex.
    pub fn random_loop<R: rand::Rng>(&self, rng: &mut R, edges: usize, max_len: usize) -> ReducedSequence {
        let p = self.random_path(rng, self.base(), edges, max_len);
        let back = self.tree_path_element(self.end(&p));
        self.concat_raw(&p, &self.inverse(&back))
    }
}
