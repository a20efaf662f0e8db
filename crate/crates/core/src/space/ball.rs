use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::gog::{GraphOfGroups, ReducedSequence};
use crate::words::HalfInt;

use super::point::{Locus, SpacePoint};

pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("point {0} is not in the ball")]
    OutsideBall(String),
    #[error("fiber over {0} has no materialized point")]
    EmptyFiber(String),
}

/// A distance in the ball with a flag saying whether it is provably the
/// distance in all of `X`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MetricEstimate {
    pub value: HalfInt,
    pub trust: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fiber {
    pub label: String,
    pub vertex_space: bool,
    /// Normal-form length, from the center, of the cheapest point of the fiber.
    pub anchor_cost: usize,
    pub points: Vec<usize>,
}

/// A finite piece of the tree of spaces around a vertex point `c`.
///
/// A vertex point `q` belongs to the ball when the normal form of `c^-1 q`
/// crosses at most `tree_radius` edges and has length at most `word_budget`;
/// an edge point belongs when both of its attachments do. Each fiber is then
/// the Cayley ball about its cheapest point of radius `word_budget` minus that
/// point's cost. Lengths are doubled: fiber edges weigh 2, attaching edges 1.
#[derive(Clone, Debug)]
pub struct SpaceBall {
    pub center: ReducedSequence,
    pub tree_radius: usize,
    pub word_budget: usize,
    pub points: Vec<SpacePoint>,
    pub adj: Vec<Vec<(usize, u32)>>,
    /// Whether the point has a neighbor in `X` outside the ball.
    pub frontier: Vec<bool>,
    /// Doubled ball distance to the nearest frontier point.
    pub exit: Vec<u32>,
    pub fiber_of: Vec<usize>,
    pub fibers: Vec<Fiber>,
    index: HashMap<SpacePoint, usize>,
}

impl SpaceBall {
    pub fn build(gog: &GraphOfGroups, center: &SpacePoint, tree_radius: usize, word_budget: usize) -> Self {
        let c = match center {
            SpacePoint::Vertex(q) => q.clone(),
            SpacePoint::Edge { edge, a } => match gog.origin_attachment(edge, a) {
                SpacePoint::Vertex(q) => q,
                SpacePoint::Edge { .. } => unreachable!(),
            },
        };
        let c_inv = gog.inverse(&c);
        let vertex_in = |q: &ReducedSequence| {
            let rel = gog.normalize(&gog.concat_raw(&c_inv, q));
            (rel.edge_count() <= tree_radius && gog.sequence_len(&rel) <= word_budget).then(|| gog.sequence_len(&rel))
        };
        let member_cost = |p: &SpacePoint| -> Option<usize> {
            match p {
                SpacePoint::Vertex(q) => vertex_in(q),
                SpacePoint::Edge { edge, a } => {
                    let o = gog.origin_attachment(edge, a);
                    let t = gog.terminus_attachment(edge, a);
                    let co = vertex_in(o.as_vertex().unwrap())?;
                    let ct = vertex_in(t.as_vertex().unwrap())?;
                    Some(co.max(ct))
                }
            }
        };

        let start = SpacePoint::Vertex(c.clone());
        let mut points = vec![start.clone()];
        let mut costs = vec![0usize];
        let mut index = HashMap::new();
        index.insert(start, 0);
        let mut outside: HashSet<SpacePoint> = HashSet::new();
        let mut adj: Vec<Vec<(usize, u32)>> = vec![Vec::new()];
        let mut frontier = vec![false];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let p = points[i].clone();
            for (nb, w) in gog.x_neighbors(&p) {
                let j = if let Some(&j) = index.get(&nb) {
                    j
                } else if outside.contains(&nb) {
                    frontier[i] = true;
                    continue;
                } else if let Some(cost) = member_cost(&nb) {
                    let j = points.len();
                    index.insert(nb.clone(), j);
                    points.push(nb);
                    costs.push(cost);
                    adj.push(Vec::new());
                    frontier.push(false);
                    queue.push_back(j);
                    j
                } else {
                    outside.insert(nb);
                    frontier[i] = true;
                    continue;
                };
                adj[i].push((j, w));
            }
        }

        let mut fiber_index: HashMap<Locus, usize> = HashMap::new();
        let mut fibers: Vec<Fiber> = Vec::new();
        let mut fiber_of = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            let locus = gog.project_pi(p);
            let f = *fiber_index.entry(locus.clone()).or_insert_with(|| {
                let label = match &locus {
                    Locus::Vertex(w) => gog.format_tree_vertex(w),
                    Locus::Edge(x) => {
                        let mut q = x.origin.rep.clone();
                        *q.trailing_mut() = x.r.clone();
                        format!("{} {}", gog.format_sequence(&q), gog.edge_name(x.e))
                    }
                };
                fibers.push(Fiber { label, vertex_space: p.is_vertex(), anchor_cost: usize::MAX, points: Vec::new() });
                fibers.len() - 1
            });
            fibers[f].points.push(i);
            fibers[f].anchor_cost = fibers[f].anchor_cost.min(costs[i]);
            fiber_of.push(f);
        }

        let mut ball = SpaceBall {
            center: c,
            tree_radius,
            word_budget,
            points,
            adj,
            exit: Vec::new(),
            frontier,
            fiber_of,
            fibers,
            index,
        };
        let sources: Vec<usize> = (0..ball.len()).filter(|&i| ball.frontier[i]).collect();
        ball.exit = ball.dijkstra(&sources, UNREACHED);
        ball
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &SpacePoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn contains(&self, p: &SpacePoint) -> bool {
        self.index.contains_key(p)
    }

    /// Each undirected edge once, as `(i, j, doubled length)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for (i, nbs) in self.adj.iter().enumerate() {
            for &(j, w) in nbs {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Multi-source doubled distances inside the ball, stopping past `cutoff`.
    pub fn dijkstra(&self, sources: &[usize], cutoff: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0;
            heap.push(Reverse((0u32, s)));
        }
        while let Some(Reverse((d, i))) = heap.pop() {
            if d > dist[i] {
                continue;
            }
            for &(j, w) in &self.adj[i] {
                let nd = d + w;
                if nd <= cutoff && nd < dist[j] {
                    dist[j] = nd;
                    heap.push(Reverse((nd, j)));
                }
            }
        }
        dist
    }

    /// Whether a doubled ball distance `d` between points `i` and `j` is
    /// exact in `X`: any path leaving the ball costs at least
    /// `exit(i) + exit(j) + 2`.
    pub fn trusted(&self, i: usize, j: usize, d: u32) -> bool {
        let bound = self.exit[i] as u64 + self.exit[j] as u64 + 2;
        (d as u64) <= bound
    }

    pub fn dist_index(&self, i: usize, j: usize) -> MetricEstimate {
        let d = self.dijkstra(&[i], UNREACHED)[j];
        MetricEstimate { value: HalfInt::from_doubled(d as i64), trust: self.trusted(i, j, d) }
    }

    pub fn dist(&self, p: &SpacePoint, q: &SpacePoint) -> Result<MetricEstimate, SpaceError> {
        let i = self.index_of(p).ok_or_else(|| SpaceError::OutsideBall(format!("{:?}", p)))?;
        let j = self.index_of(q).ok_or_else(|| SpaceError::OutsideBall(format!("{:?}", q)))?;
        Ok(self.dist_index(i, j))
    }

    /// For one vertex fiber, `M -> max fiber distance over pairs whose trusted
    /// `X`-distance is at most `M``, for `M = 1..=max_m`.
    pub fn embedding_profile(&self, gog: &GraphOfGroups, fiber: usize, max_m: u32) -> Vec<Option<usize>> {
        let mut best: Vec<Option<usize>> = vec![None; max_m as usize];
        let pts = &self.fibers[fiber].points;
        for &i in pts {
            let dist = self.dijkstra(&[i], 2 * max_m);
            let qi = self.points[i].as_vertex().unwrap();
            for &j in pts {
                let d = dist[j];
                if d == UNREACHED || !self.trusted(i, j, d) {
                    continue;
                }
                let fd = gog.fiber_distance(qi, self.points[j].as_vertex().unwrap()).unwrap();
                let first = (d as usize).div_ceil(2).max(1);
                for slot in best.iter_mut().skip(first - 1) {
                    *slot = Some(slot.map_or(fd, |b| b.max(fd)));
                }
            }
        }
        best
    }

    pub fn stats(&self, gog: &GraphOfGroups) -> SpaceBallStats {
        let edges = self.edges();
        let attaching = edges.iter().filter(|e| e.2 == 1).count();
        let mut vertex_fiber_sizes = BTreeMap::new();
        let mut edge_fiber_sizes = BTreeMap::new();
        for f in &self.fibers {
            let m = if f.vertex_space { &mut vertex_fiber_sizes } else { &mut edge_fiber_sizes };
            *m.entry(f.points.len()).or_insert(0usize) += 1;
        }
        let center_fiber = self.fiber_of[0];
        SpaceBallStats {
            center: gog.format_sequence(&self.center),
            tree_radius: self.tree_radius,
            word_budget: self.word_budget,
            points: self.len(),
            vertex_points: self.points.iter().filter(|p| p.is_vertex()).count(),
            intra_edges: edges.len() - attaching,
            attaching_edges: attaching,
            vertex_fibers: self.fibers.iter().filter(|f| f.vertex_space).count(),
            edge_fibers: self.fibers.iter().filter(|f| !f.vertex_space).count(),
            center_fiber_size: self.fibers[center_fiber].points.len(),
            vertex_fiber_sizes,
            edge_fiber_sizes,
            frontier_points: self.frontier.iter().filter(|&&f| f).count(),
            center_trust_radius: (self.exit[0] != UNREACHED).then(|| HalfInt::from_doubled(self.exit[0] as i64)),
        }
    }

    /// DOT graph: one cluster per fiber, attaching edges dashed.
    pub fn to_dot(&self, gog: &GraphOfGroups) -> String {
        let mut s = format!("graph \"{}\" {{\n  node [shape=point];\n", gog.name());
        for (f, fiber) in self.fibers.iter().enumerate() {
            s.push_str(&format!("  subgraph cluster_{} {{\n    label=\"{}\";\n", f, fiber.label.replace('"', "'")));
            if !fiber.vertex_space {
                s.push_str("    style=dotted;\n");
            }
            for &i in &fiber.points {
                let shape = if self.frontier[i] { ", shape=circle, width=0.05" } else { "" };
                s.push_str(&format!("    p{} [tooltip=\"{}\"{}];\n", i, gog.format_point(&self.points[i]).replace('"', "'"), shape));
            }
            s.push_str("  }\n");
        }
        for (i, j, w) in self.edges() {
            let style = if w == 1 { " [style=dashed]" } else { "" };
            s.push_str(&format!("  p{} -- p{}{};\n", i, j, style));
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpaceBallStats {
    pub center: String,
    pub tree_radius: usize,
    pub word_budget: usize,
    pub points: usize,
    pub vertex_points: usize,
    pub intra_edges: usize,
    pub attaching_edges: usize,
    pub vertex_fibers: usize,
    pub edge_fibers: usize,
    pub center_fiber_size: usize,
    /// fiber size -> number of fibers of that size
    pub vertex_fiber_sizes: BTreeMap<usize, usize>,
    pub edge_fiber_sizes: BTreeMap<usize, usize>,
    pub frontier_points: usize,
    pub center_trust_radius: Option<HalfInt>,
}
