use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::gog::GraphOfGroups;
use crate::words::HalfInt;

use super::point::SpacePoint;

/// Exact distances in the whole of `X`, explored lazily from a set of sources.
/// Points settle in order of doubled distance, ties in discovery order.
pub struct XSearch<'a> {
    gog: &'a GraphOfGroups,
    dist: HashMap<SpacePoint, u32>,
    parent: HashMap<SpacePoint, SpacePoint>,
    heap: BinaryHeap<Reverse<(u32, u64)>>,
    pending: HashMap<u64, SpacePoint>,
    settled: Vec<(SpacePoint, u32)>,
    counter: u64,
    bound: Option<Bound<'a>>,
}

/// A limit and a lower bound on the remaining distance to the points of interest.
type Bound<'a> = (u32, Box<dyn Fn(&SpacePoint) -> u32 + 'a>);

impl<'a> XSearch<'a> {
    pub fn new(gog: &'a GraphOfGroups, source: &SpacePoint) -> Self {
        Self::multi(gog, std::slice::from_ref(source))
    }

    pub fn multi(gog: &'a GraphOfGroups, sources: &[SpacePoint]) -> Self {
        let mut s = XSearch {
            gog,
            dist: HashMap::new(),
            parent: HashMap::new(),
            heap: BinaryHeap::new(),
            pending: HashMap::new(),
            settled: Vec::new(),
            counter: 0,
            bound: None,
        };
        for p in sources {
            if !s.dist.contains_key(p) {
                s.dist.insert(p.clone(), 0);
                s.push(0, p.clone());
            }
        }
        s
    }

    /// Restricts the search to points that can still reach a target within
    /// `limit`, given a lower bound `lb` on the distance to the targets.
    /// Distances to targets within `limit` stay exact.
    pub fn bounded(mut self, limit: u32, lb: impl Fn(&SpacePoint) -> u32 + 'a) -> Self {
        self.bound = Some((limit, Box::new(lb)));
        self
    }

    fn push(&mut self, d: u32, p: SpacePoint) {
        self.pending.insert(self.counter, p);
        self.heap.push(Reverse((d, self.counter)));
        self.counter += 1;
    }

    /// Settles the next point if its distance is at most `radius`.
    fn step(&mut self, radius: u32) -> Option<usize> {
        loop {
            let &Reverse((d, id)) = self.heap.peek()?;
            if d > radius {
                return None;
            }
            self.heap.pop();
            let p = self.pending.remove(&id).unwrap();
            if self.dist[&p] < d {
                continue;
            }
            for (nb, w) in self.gog.x_neighbors(&p) {
                let nd = d + w;
                if let Some((limit, lb)) = &self.bound {
                    if nd + lb(&nb) > *limit {
                        continue;
                    }
                }
                if self.dist.get(&nb).is_none_or(|&old| nd < old) {
                    self.dist.insert(nb.clone(), nd);
                    self.parent.insert(nb.clone(), p.clone());
                    self.push(nd, nb);
                }
            }
            self.settled.push((p, d));
            return Some(self.settled.len() - 1);
        }
    }

    /// Settles every point at doubled distance `<= radius`.
    pub fn expand_to(&mut self, radius: u32) {
        while self.step(radius).is_some() {}
    }

    /// Exact doubled distance to `q` if it is at most `cutoff`.
    pub fn distance(&mut self, q: &SpacePoint, cutoff: u32) -> Option<u32> {
        self.nearest(|p| p == q, cutoff).map(|(_, d)| d)
    }

    /// The first point to settle that satisfies `pred`, within `cutoff`.
    pub fn nearest(&mut self, pred: impl Fn(&SpacePoint) -> bool, cutoff: u32) -> Option<(SpacePoint, u32)> {
        if let Some(hit) = self.settled.iter().find(|(p, d)| *d <= cutoff && pred(p)) {
            return Some(hit.clone());
        }
        while let Some(i) = self.step(cutoff) {
            if pred(&self.settled[i].0) {
                return Some(self.settled[i].clone());
            }
        }
        None
    }

    /// Settled points within doubled radius `radius`, in settling order.
    pub fn settled(&mut self, radius: u32) -> Vec<(SpacePoint, u32)> {
        self.expand_to(radius);
        self.settled.iter().filter(|(_, d)| *d <= radius).cloned().collect()
    }

    /// The settled geodesic from a source to `q`.
    pub fn path_to(&self, q: &SpacePoint) -> Option<Vec<SpacePoint>> {
        self.dist.get(q)?;
        let mut out = vec![q.clone()];
        while let Some(p) = self.parent.get(out.last().unwrap()) {
            out.push(p.clone());
        }
        out.reverse();
        Some(out)
    }
}

impl GraphOfGroups {
    /// Exact doubled `X`-distance, searching up to `cutoff`.
    pub fn x_distance(&self, p: &SpacePoint, q: &SpacePoint, cutoff: u32) -> Option<u32> {
        XSearch::new(self, p).distance(q, cutoff)
    }

    /// Length of a shortest path in `X` from `x0` to the identity point of
    /// each vertex space along the spanning tree.
    pub fn d0_contributions(&self) -> Vec<HalfInt> {
        let x0 = self.x0();
        let mut search = XSearch::new(self, &x0);
        (0..self.vertex_count())
            .map(|v| {
                let target = self.vertex_point(&self.tree_path_element(v));
                let bound = 2 * self.sequence_len(&self.tree_path_element(v)) as u32;
                let d = search.distance(&target, bound).expect("tree path bounds the distance");
                HalfInt::from_doubled(d as i64)
            })
            .collect()
    }

    pub fn compute_d0(&self) -> HalfInt {
        self.d0_contributions().into_iter().max_by_key(|h| h.doubled()).unwrap_or(HalfInt::from_int(0))
    }
}
