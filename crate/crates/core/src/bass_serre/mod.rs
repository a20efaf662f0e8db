//! The Bass–Serre tree: vertices `gG_v`, edges `gG_e`, the group action,
//! geodesics read off normal forms, and exact path stabilizers.

mod ball;
mod ledger;
mod stabilizer;

pub use ball::{TreeBall, TreeBallStats};
pub use ledger::{ConstantsLedger, LedgerEntry, Provenance};
pub use stabilizer::{PathStabilizer, VertexSubgroup};

use serde::Serialize;

use crate::gog::{GElem, GraphOfGroups, OEdge, ReducedSequence};

/// A vertex `gG_v` of the tree, keyed by the normal form of a path from the
/// base vertex to `v` whose last syllable is trivial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct TreeVertex {
    pub rep: ReducedSequence,
    pub ty: usize,
}

/// A geometric edge of the tree, always stored with the positive orientation
/// of its underlying edge of the graph: the edge leaving `origin` through the
/// transversal element `r` along `e`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct TreeEdge {
    pub origin: TreeVertex,
    pub r: GElem,
    pub e: OEdge,
}

/// One edge at a vertex, seen from that vertex.
#[derive(Clone, Debug)]
pub struct Incident {
    pub edge: TreeEdge,
    /// Orientation of the graph edge as it leaves the vertex.
    pub direction: OEdge,
    /// Transversal element at the vertex.
    pub r: GElem,
    pub opposite: TreeVertex,
}

#[derive(Clone, Debug)]
pub struct IncidentEdges {
    pub edges: Vec<Incident>,
    pub truncated: bool,
}

impl GraphOfGroups {
    /// The tree vertex of a path from the base (any trailing syllable).
    pub fn tree_vertex(&self, path: &ReducedSequence) -> TreeVertex {
        assert_eq!(path.start, self.base(), "tree vertices are paths from the base");
        let mut rep = self.normalize(path);
        let ty = self.end(&rep);
        *rep.trailing_mut() = self.vgroup(ty).identity();
        TreeVertex { rep, ty }
    }

    /// The vertex `G_v` itself.
    pub fn base_tree_vertex(&self, v: usize) -> TreeVertex {
        self.tree_vertex(&self.tree_path_element(v))
    }

    /// The edge leaving `w` along the path `w · g · e` for `g` in the vertex group at `w`.
    pub fn edge_from(&self, w: &TreeVertex, g: &GElem, e: OEdge) -> TreeEdge {
        assert_eq!(self.o(e), w.ty);
        if e.is_positive() {
            let (r, _) = self.split_o(e, g);
            return TreeEdge { origin: w.clone(), r, e };
        }
        let mut raw = w.rep.clone();
        *raw.trailing_mut() = g.clone();
        raw.steps.push((e, self.vgroup(self.t(e)).identity()));
        let n = self.normalize(&raw);
        let h = n.trailing().clone();
        let origin = self.tree_vertex(&n);
        let f = e.bar();
        let (r, _) = self.split_o(f, &h);
        TreeEdge { origin, r, e: f }
    }

    pub fn edge_terminus(&self, edge: &TreeEdge) -> TreeVertex {
        let mut raw = edge.origin.rep.clone();
        *raw.trailing_mut() = edge.r.clone();
        raw.steps.push((edge.e, self.vgroup(self.t(edge.e)).identity()));
        self.tree_vertex(&raw)
    }

    /// Edges at `w`, one per oriented graph edge leaving its type and per
    /// coset representative of length at most `budget`.
    pub fn incident_edges(&self, w: &TreeVertex, budget: usize) -> IncidentEdges {
        let mut edges = Vec::new();
        let mut truncated = false;
        for e in self.graph().out_edges(w.ty) {
            let (reps, trunc) = self.transversal(e, budget);
            truncated |= trunc;
            for r in reps {
                let edge = self.edge_from(w, &r, e);
                let opposite = if e.is_positive() { self.edge_terminus(&edge) } else { edge.origin.clone() };
                edges.push(Incident { edge, direction: e, r, opposite });
            }
        }
        IncidentEdges { edges, truncated }
    }

    /// Vertices of the geodesic from `w1` to `w2`, both included.
    pub fn tree_geodesic(&self, w1: &TreeVertex, w2: &TreeVertex) -> Vec<TreeVertex> {
        let c = self.normalize(&self.concat_raw(&self.inverse(&w1.rep), &w2.rep));
        let mut out = vec![w1.clone()];
        let mut prefix = self.vertex_element(c.start, c.head.clone());
        for step in &c.steps {
            prefix.steps.push(step.clone());
            out.push(self.tree_vertex(&self.concat_raw(&w1.rep, &prefix)));
        }
        out
    }

    /// Edges of the geodesic from `w1` to `w2`.
    pub fn tree_geodesic_edges(&self, w1: &TreeVertex, w2: &TreeVertex) -> Vec<TreeEdge> {
        let c = self.normalize(&self.concat_raw(&self.inverse(&w1.rep), &w2.rep));
        let verts = self.tree_geodesic(w1, w2);
        (0..c.steps.len())
            .map(|i| {
                let prefix = ReducedSequence { start: c.start, head: c.head.clone(), steps: c.steps[..i].to_vec() };
                let full = self.normalize(&self.concat_raw(&w1.rep, &prefix));
                self.edge_from(&verts[i], full.trailing(), c.steps[i].0)
            })
            .collect()
    }

    pub fn tree_distance(&self, w1: &TreeVertex, w2: &TreeVertex) -> usize {
        self.normalize(&self.concat_raw(&self.inverse(&w1.rep), &w2.rep)).edge_count()
    }

    /// Left translation by a loop `g` at the base.
    pub fn act_vertex(&self, g: &ReducedSequence, w: &TreeVertex) -> TreeVertex {
        self.tree_vertex(&self.concat_raw(g, &w.rep))
    }

    pub fn act_edge(&self, g: &ReducedSequence, x: &TreeEdge) -> TreeEdge {
        let n = self.normalize(&self.concat_raw(g, &x.origin.rep));
        let vg = self.vgroup(x.origin.ty);
        let h = vg.mul(n.trailing(), &x.r);
        let origin = self.tree_vertex(&n);
        let (r, _) = self.split_o(x.e, &h);
        TreeEdge { origin, r, e: x.e }
    }

    /// The element `rep · p_v^-1` of the fundamental group whose coset this vertex is.
    pub fn coset_element(&self, w: &TreeVertex) -> ReducedSequence {
        self.mul(&w.rep, &self.inverse(&self.tree_path_element(w.ty)))
    }

    pub fn format_tree_vertex(&self, w: &TreeVertex) -> String {
        format!("{} G_{}", self.format_sequence(&w.rep), self.vertex_name(w.ty))
    }
}

#[cfg(test)]
mod tests;
