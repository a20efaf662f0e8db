use std::fmt;

use serde::Serialize;

use crate::bass_serre::{TreeEdge, TreeVertex};
use crate::gog::{GElem, GraphOfGroups, OEdge, ReducedSequence};

/// A point of the tree of spaces: either an element of a vertex space,
/// stored as the full normal form of a path from the base (the coset is the
/// path with its last syllable dropped), or an element `a` of the edge space
/// over a tree edge, which stands for `P r e φ_{e,t}(a)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub enum SpacePoint {
    Vertex(ReducedSequence),
    Edge { edge: TreeEdge, a: GElem },
}

impl fmt::Debug for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacePoint::Vertex(q) => write!(f, "V{:?}", q),
            SpacePoint::Edge { edge, a } => write!(f, "E({:?}|{:?}|{:?}|{:?})", edge.origin.rep, edge.r, edge.e, a),
        }
    }
}

/// Image of a point under `π`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Locus {
    Vertex(TreeVertex),
    Edge(TreeEdge),
}

/// A neighbor in `X` with its doubled length: 1 for attaching edges, 2 for fiber edges.
pub type Step = (SpacePoint, u32);

impl SpacePoint {
    pub fn is_vertex(&self) -> bool {
        matches!(self, SpacePoint::Vertex(_))
    }

    pub fn as_vertex(&self) -> Option<&ReducedSequence> {
        match self {
            SpacePoint::Vertex(q) => Some(q),
            SpacePoint::Edge { .. } => None,
        }
    }
}

impl GraphOfGroups {
    /// The vertex point for an arbitrary path from the base.
    pub fn vertex_point(&self, path: &ReducedSequence) -> SpacePoint {
        SpacePoint::Vertex(self.normalize(path))
    }

    /// The point `g · x0`, where `x0` is the identity of the base vertex space.
    pub fn theta(&self, g: &ReducedSequence) -> SpacePoint {
        assert_eq!(g.start, self.base());
        assert_eq!(self.end(g), self.base(), "theta takes loops at the base");
        self.vertex_point(g)
    }

    pub fn x0(&self) -> SpacePoint {
        SpacePoint::Vertex(self.identity_at(self.base()))
    }

    pub fn project_pi(&self, p: &SpacePoint) -> Locus {
        match p {
            SpacePoint::Vertex(q) => Locus::Vertex(self.tree_vertex(q)),
            SpacePoint::Edge { edge, .. } => Locus::Edge(edge.clone()),
        }
    }

    /// The vertex point the edge point attaches to at the origin of its edge.
    pub fn origin_attachment(&self, edge: &TreeEdge, a: &GElem) -> SpacePoint {
        let mut q = edge.origin.rep.clone();
        let vg = self.vgroup(edge.origin.ty);
        *q.trailing_mut() = vg.mul(&edge.r, &self.phi_o(edge.e, a));
        SpacePoint::Vertex(q)
    }

    /// The vertex point the edge point attaches to at the terminus of its edge.
    pub fn terminus_attachment(&self, edge: &TreeEdge, a: &GElem) -> SpacePoint {
        let mut raw = edge.origin.rep.clone();
        *raw.trailing_mut() = edge.r.clone();
        raw.steps.push((edge.e, self.phi_t(edge.e, a)));
        SpacePoint::Vertex(self.normalize(&raw))
    }

    /// The edge point attached to vertex point `q` along oriented edge `e` leaving its type.
    pub fn attached_edge_point(&self, q: &ReducedSequence, e: OEdge) -> SpacePoint {
        let ty = self.end(q);
        assert_eq!(self.o(e), ty);
        let h = q.trailing();
        if e.is_positive() {
            let (r, a) = self.split_o(e, h);
            let mut origin = q.clone();
            *origin.trailing_mut() = self.vgroup(ty).identity();
            return SpacePoint::Edge { edge: crate::bass_serre::TreeEdge { origin: TreeVertex { rep: origin, ty }, r, e }, a };
        }
        let mut raw = q.clone();
        raw.steps.push((e, self.vgroup(self.t(e)).identity()));
        let n = self.normalize(&raw);
        let f = e.bar();
        let (r, a) = self.split_o(f, n.trailing());
        let origin = self.tree_vertex(&n);
        SpacePoint::Edge { edge: crate::bass_serre::TreeEdge { origin, r, e: f }, a }
    }

    /// All neighbors of `p` in `X` with doubled edge lengths, in a fixed order.
    pub fn x_neighbors(&self, p: &SpacePoint) -> Vec<Step> {
        let mut out = Vec::new();
        match p {
            SpacePoint::Vertex(q) => {
                let ty = self.end(q);
                let vg = self.vgroup(ty);
                for s in vg.cayley_generators() {
                    let mut q2 = q.clone();
                    let t = q2.trailing_mut();
                    *t = vg.mul(t, &s);
                    out.push((SpacePoint::Vertex(q2), 2));
                }
                for e in self.graph().out_edges(ty) {
                    out.push((self.attached_edge_point(q, e), 1));
                }
            }
            SpacePoint::Edge { edge, a } => {
                let eg = self.egroup(edge.e);
                for s in eg.cayley_generators() {
                    out.push((SpacePoint::Edge { edge: edge.clone(), a: eg.mul(a, &s) }, 2));
                }
                out.push((self.origin_attachment(edge, a), 1));
                out.push((self.terminus_attachment(edge, a), 1));
            }
        }
        out
    }

    /// Left translation by a loop `g` at the base.
    pub fn act_point(&self, g: &ReducedSequence, p: &SpacePoint) -> SpacePoint {
        match p {
            SpacePoint::Vertex(q) => SpacePoint::Vertex(self.normalize(&self.concat_raw(g, q))),
            SpacePoint::Edge { edge, a } => {
                let n = self.normalize(&self.concat_raw(g, &edge.origin.rep));
                let vg = self.vgroup(edge.origin.ty);
                let h = vg.mul(n.trailing(), &edge.r);
                let origin = self.tree_vertex(&n);
                let (r, a2) = self.split_o(edge.e, &h);
                let eg = self.egroup(edge.e);
                SpacePoint::Edge { edge: crate::bass_serre::TreeEdge { origin, r, e: edge.e }, a: eg.mul(&a2, a) }
            }
        }
    }

    /// Word-metric distance between two points of the same vertex space.
    pub fn fiber_distance(&self, p: &ReducedSequence, q: &ReducedSequence) -> Option<usize> {
        let (wp, wq) = (self.tree_vertex(p), self.tree_vertex(q));
        if wp != wq {
            return None;
        }
        let vg = self.vgroup(wp.ty);
        Some(vg.len(&vg.mul(&vg.inv(p.trailing()), q.trailing())))
    }

    /// Position of `q` relative to the vertex point `c`: the normal form of `c^-1 q`.
    pub fn relative(&self, c: &ReducedSequence, q: &ReducedSequence) -> ReducedSequence {
        self.normalize(&self.concat_raw(&self.inverse(c), q))
    }

    pub fn format_point(&self, p: &SpacePoint) -> String {
        match p {
            SpacePoint::Vertex(q) => self.format_sequence(q),
            SpacePoint::Edge { edge, a } => {
                let mut q = edge.origin.rep.clone();
                *q.trailing_mut() = edge.r.clone();
                format!("[{} | {} {}]", self.format_sequence(&q), self.edge_name(edge.e), self.egroup(edge.e).format(a))
            }
        }
    }
}

/// The image of an edge space in the fiber over one endpoint `w` of a tree
/// edge: the coset `near · Im φ_out` with `out` the orientation leaving
/// `w`, matched pointwise with `far · Im φ_{out bar}` across the edge.
#[derive(Clone, Debug)]
pub struct EdgeCoset {
    pub near: GElem,
    pub out: OEdge,
    pub far_vertex: TreeVertex,
    pub far: GElem,
}

impl GraphOfGroups {
    pub fn edge_coset(&self, w: &TreeVertex, edge: &TreeEdge) -> EdgeCoset {
        let one = self.egroup(edge.e).identity();
        let o = self.origin_attachment(edge, &one);
        let t = self.terminus_attachment(edge, &one);
        let (o, t) = (o.as_vertex().unwrap(), t.as_vertex().unwrap());
        let (near, far, out) = if &edge.origin == w {
            (o, t, edge.e)
        } else {
            assert_eq!(&self.tree_vertex(t), w, "edge is not incident to the vertex");
            (t, o, edge.e.bar())
        };
        EdgeCoset { near: near.trailing().clone(), out, far_vertex: self.tree_vertex(far), far: far.trailing().clone() }
    }
}
