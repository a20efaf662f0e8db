//! Ladders over a fiber geodesic: the subtree of admitted edges, the segment
//! carried into each admitted fiber, and the retraction onto their union.

mod fit;
mod measure;

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bass_serre::{ConstantsLedger, TreeEdge, TreeVertex};
use crate::gog::{GElem, GraphOfGroups, GroupSpec, ReducedSequence};
use crate::space::{SpaceBall, SpacePoint};
use crate::words::{FreeWord, HalfInt};

pub use fit::{additive_gap, fit_lipschitz};
pub use measure::{measure_quasiconvexity, measure_retraction, QuasiconvexityReport, RetractionReport, RetractionSample};


#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LadderParams {
    pub d0: HalfInt,
    pub d1: HalfInt,
    pub depth: usize,
}

impl LadderParams {
    /// Reads `D0` and `D1` from the ledger.
    pub fn from_ledger(ledger: &ConstantsLedger, depth: usize) -> Option<Self> {
        let read = |k: &str| {
            let x = ledger.get(k)?.value.as_f64()?;
            Some(HalfInt::from_doubled((2.0 * x).floor() as i64))
        };
        Some(LadderParams { d0: read("D0")?, d1: read("D1")?, depth })
    }

    fn radius(&self) -> usize {
        self.d0.floor().max(0) as usize
    }

    fn min_diameter(&self) -> usize {
        let d = self.d1.doubled().max(0) as usize;
        d.div_ceil(2)
    }
}

/// A geodesic segment in the vertex space over `vertex`, as trailing syllables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub vertex: TreeVertex,
    pub ends: (GElem, GElem),
    pub points: Vec<GElem>,
}

impl Segment {
    pub fn new(gog: &GraphOfGroups, vertex: TreeVertex, x: GElem, y: GElem) -> Self {
        let points = fiber_geodesic(gog.vgroup(vertex.ty), &x, &y);
        Segment { vertex, ends: (x, y), points }
    }

    pub fn len(&self) -> usize {
        self.points.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, g: &GElem) -> SpacePoint {
        let mut q = self.vertex.rep.clone();
        *q.trailing_mut() = g.clone();
        SpacePoint::Vertex(q)
    }

    pub fn space_points(&self) -> Vec<SpacePoint> {
        self.points.iter().map(|g| self.point(g)).collect()
    }
}

pub fn fiber_distance(vg: &GroupSpec, x: &GElem, y: &GElem) -> usize {
    vg.len(&vg.mul(&vg.inv(x), y))
}

/// The unique geodesic in a free fiber; in a finite fiber the two ends.
pub fn fiber_geodesic(vg: &GroupSpec, x: &GElem, y: &GElem) -> Vec<GElem> {
    match vg {
        GroupSpec::Free(_) => {
            let d = vg.mul(&vg.inv(x), y);
            let w = d.as_free();
            (0..=w.len()).map(|k| vg.mul(x, &GElem::Free(w.prefix(k)))).collect()
        }
        GroupSpec::Finite { .. } => {
            if x == y {
                vec![x.clone()]
            } else {
                vec![x.clone(), y.clone()]
            }
        }
    }
}

/// Elements within word distance `r` of `s`.
pub fn fiber_ball(vg: &GroupSpec, s: &GElem, r: usize) -> Vec<GElem> {
    match vg {
        GroupSpec::Free(f) => FreeWord::ball(f.rank(), r).into_iter().map(|w| vg.mul(s, &GElem::Free(w))).collect(),
        GroupSpec::Finite { .. } if r == 0 => vec![s.clone()],
        GroupSpec::Finite { .. } => vg.elements().unwrap(),
    }
}

#[derive(Clone, Debug)]
pub struct LadderNode {
    pub vertex: TreeVertex,
    pub parent: Option<usize>,
    pub via: Option<TreeEdge>,
    pub depth: usize,
    pub segment: Segment,
}

/// The verdict on one candidate edge leaving a ladder node.
#[derive(Clone, Debug)]
pub struct Admission {
    pub parent: usize,
    pub edge: TreeEdge,
    pub child: TreeVertex,
    /// Fiber diameter of the part of the edge-space image near the segment.
    pub diameter: usize,
    pub admitted: bool,
    /// Admitted, but the carried segment leaves the ball, so it was dropped.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub struct Ladder {
    pub params: LadderParams,
    pub nodes: Vec<LadderNode>,
    pub admissions: Vec<Admission>,
    index: HashMap<TreeVertex, usize>,
}

/// Which fiber a point of an edge-space image lies in, and where it lands
/// after crossing.
struct Crossing {
    edge: TreeEdge,
    near: GElem,
    far: ReducedSequence,
}

fn crossings(gog: &GraphOfGroups, q: &ReducedSequence) -> Vec<Crossing> {
    let ty = gog.end(q);
    let mut out = Vec::new();
    for e in gog.graph().out_edges(ty) {
        let SpacePoint::Edge { edge, a } = gog.attached_edge_point(q, e) else { unreachable!() };
        let far = if e.is_positive() { gog.terminus_attachment(&edge, &a) } else { gog.origin_attachment(&edge, &a) };
        let SpacePoint::Vertex(far) = far else { unreachable!() };
        out.push(Crossing { edge, near: q.trailing().clone(), far });
    }
    out
}

fn shortlex_pair(vg: &GroupSpec, a: &(GElem, GElem), b: &(GElem, GElem)) -> Ordering {
    vg.cmp(&a.0, &b.0).then_with(|| vg.cmp(&a.1, &b.1))
}

impl Ladder {
    /// Builds the ladder over `lambda` sphere by sphere, up to `params.depth`.
    /// With a ball, admitted segments leaving it are flagged and omitted.
    pub fn build(gog: &GraphOfGroups, lambda: Segment, params: LadderParams, ball: Option<&SpaceBall>) -> Self {
        let root = LadderNode { vertex: lambda.vertex.clone(), parent: None, via: None, depth: 0, segment: lambda };
        let mut ladder = Ladder { params, nodes: vec![root], admissions: Vec::new(), index: HashMap::new() };
        ladder.index.insert(ladder.nodes[0].vertex.clone(), 0);
        let radius = params.radius();
        let mut frontier = vec![0usize];
        for depth in 1..=params.depth {
            let mut next = Vec::new();
            for &n in &frontier {
                let node = ladder.nodes[n].clone();
                let vg = gog.vgroup(node.vertex.ty);
                let parent_vertex = node.parent.map(|p| ladder.nodes[p].vertex.clone());
                let mut order: Vec<TreeVertex> = Vec::new();
                let mut found: HashMap<TreeVertex, (TreeEdge, Vec<(GElem, GElem)>)> = HashMap::new();
                let mut seen_near = std::collections::HashSet::new();
                for s in &node.segment.points {
                    for u in fiber_ball(vg, s, radius) {
                        if !seen_near.insert(u.clone()) {
                            continue;
                        }
                        let mut q = node.vertex.rep.clone();
                        *q.trailing_mut() = u;
                        for c in crossings(gog, &q) {
                            let child = gog.tree_vertex(&c.far);
                            if Some(&child) == parent_vertex.as_ref() {
                                continue;
                            }
                            let slot = found.entry(child.clone()).or_insert_with(|| {
                                order.push(child.clone());
                                (c.edge.clone(), Vec::new())
                            });
                            slot.1.push((c.near, c.far.trailing().clone()));
                        }
                    }
                }
                for child in order {
                    let (edge, pts) = found.remove(&child).unwrap();
                    let mut best: Option<(usize, (GElem, GElem), (GElem, GElem))> = None;
                    for (i, p) in pts.iter().enumerate() {
                        for q in &pts[i..] {
                            let d = fiber_distance(vg, &p.0, &q.0);
                            let (x, y) = if vg.cmp(&p.0, &q.0).is_le() { (p, q) } else { (q, p) };
                            let pair = (x.0.clone(), y.0.clone());
                            let better = match &best {
                                None => true,
                                Some((bd, bp, _)) => d > *bd || (d == *bd && shortlex_pair(vg, &pair, bp).is_lt()),
                            };
                            if better {
                                best = Some((d, pair, (x.1.clone(), y.1.clone())));
                            }
                        }
                    }
                    let (diameter, _, far) = best.unwrap();
                    let admitted = diameter >= params.min_diameter();
                    let mut truncated = false;
                    if admitted {
                        let seg = Segment::new(gog, child.clone(), far.0, far.1);
                        truncated = ball.is_some_and(|b| seg.space_points().iter().any(|p| !b.contains(p)));
                        if !truncated && !ladder.index.contains_key(&child) {
                            ladder.index.insert(child.clone(), ladder.nodes.len());
                            next.push(ladder.nodes.len());
                            ladder.nodes.push(LadderNode { vertex: child.clone(), parent: Some(n), via: Some(edge.clone()), depth, segment: seg });
                        }
                    }
                    ladder.admissions.push(Admission { parent: n, edge, child, diameter, admitted, truncated });
                }
            }
            frontier = next;
        }
        ladder
    }

    pub fn node_of(&self, w: &TreeVertex) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, gog: &GraphOfGroups, p: &SpacePoint) -> bool {
        let SpacePoint::Vertex(q) = p else { return false };
        self.node_of(&gog.tree_vertex(q)).is_some_and(|i| self.nodes[i].segment.points.contains(q.trailing()))
    }

    /// All points of `B(λ)`.
    pub fn points(&self) -> Vec<SpacePoint> {
        self.nodes.iter().flat_map(|n| n.segment.space_points()).collect()
    }

    /// The retraction `P` onto `B(λ)`.
    pub fn retract(&self, gog: &GraphOfGroups, x: &SpacePoint) -> SpacePoint {
        let q = match x {
            SpacePoint::Vertex(q) => q.clone(),
            SpacePoint::Edge { edge, a } => gog.origin_attachment(edge, a).as_vertex().unwrap().clone(),
        };
        let w = gog.tree_vertex(&q);
        if let Some(i) = self.node_of(&w) {
            let seg = &self.nodes[i].segment;
            return seg.point(&nearest_on(gog.vgroup(w.ty), seg, std::slice::from_ref(q.trailing())));
        }
        let root = &self.nodes[0].vertex;
        let path = gog.tree_geodesic(&w, root);
        let k = path.iter().position(|v| self.index.contains_key(v)).expect("root lies in the ladder");
        let (w1, w0) = (&path[k], &path[k - 1]);
        let seg = &self.nodes[self.index[w1]].segment;
        seg.point(&self.edge_projection(gog, w1, w0, seg))
    }

    /// Shortlex-least point of the projection onto `seg` of the image of the
    /// edge space between `w1` and its neighbor `w0`.
    fn edge_projection(&self, gog: &GraphOfGroups, w1: &TreeVertex, w0: &TreeVertex, seg: &Segment) -> GElem {
        let edge = gog.tree_geodesic_edges(w1, w0).remove(0);
        let eg = gog.egroup(edge.e);
        let coset = gog.edge_coset(w1, &edge);
        let (z0, e_out) = (coset.near, coset.out);
        let vg = gog.vgroup(w1.ty);
        match vg {
            GroupSpec::Free(_) => {
                let inv = vg.inv(&z0);
                let in_hull = |s: &GElem| {
                    let rel = vg.mul(&inv, s);
                    match gog.side(e_out).subgroup() {
                        Some(h) => h.readable_prefix_len(rel.as_free()) == rel.as_free().len(),
                        None => vg.is_identity(&rel),
                    }
                };
                let hit: Vec<&GElem> = seg.points.iter().filter(|s| in_hull(s)).collect();
                match hit.into_iter().min_by(|a, b| vg.cmp(a, b)) {
                    Some(s) => s.clone(),
                    None => nearest_on(vg, seg, &[z0]),
                }
            }
            GroupSpec::Finite { .. } => {
                let coset: Vec<GElem> = match eg.elements() {
                    Some(all) => all.iter().map(|a| vg.mul(&z0, &gog.phi_o(e_out, a))).collect(),
                    None => vec![z0],
                };
                nearest_on(vg, seg, &coset)
            }
        }
    }

    pub fn to_json(&self, gog: &GraphOfGroups) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .map(|n| {
                let vg = gog.vgroup(n.vertex.ty);
                json!({
                    "vertex": gog.format_tree_vertex(&n.vertex),
                    "type": gog.vertex_name(n.vertex.ty),
                    "depth": n.depth,
                    "parent": n.parent,
                    "segment": [vg.format(&n.segment.ends.0), vg.format(&n.segment.ends.1)],
                    "length": n.segment.len(),
                })
            })
            .collect();
        let admissions: Vec<Value> = self
            .admissions
            .iter()
            .map(|a| {
                json!({
                    "parent": a.parent,
                    "child": gog.format_tree_vertex(&a.child),
                    "edge": gog.edge_name(a.edge.e),
                    "diameter": a.diameter,
                    "admitted": a.admitted,
                    "truncated": a.truncated,
                })
            })
            .collect();
        json!({ "params": self.params, "nodes": nodes, "admissions": admissions })
    }
}

/// Shortlex-least point of `seg` that is nearest to some element of `from`.
fn nearest_on(vg: &GroupSpec, seg: &Segment, from: &[GElem]) -> GElem {
    let mut best: Option<&GElem> = None;
    for z in from {
        let d = seg.points.iter().map(|s| fiber_distance(vg, z, s)).min().unwrap();
        for s in seg.points.iter().filter(|s| fiber_distance(vg, z, s) == d) {
            if best.is_none_or(|b| vg.cmp(s, b).is_lt()) {
                best = Some(s);
            }
        }
    }
    best.unwrap().clone()
}
