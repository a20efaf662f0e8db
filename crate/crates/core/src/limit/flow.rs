use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::bass_serre::{TreeEdge, TreeVertex};
use crate::gog::{GElem, GraphOfGroups};
use crate::space::{EdgeCoset, SpacePoint, XSearch};
use crate::words::{FreeWord, HalfInt};

use super::{canonical_tail, LimitError, Ray};

/// Prefix length used when measuring the obstruction of a rejected ray.
pub const OBSTRUCTION_RADIUS: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct FlowResult {
    pub flowable: bool,
    pub flowed: Option<Ray>,
    /// Fiber diameter of the edge-space image near the ray, when rejected.
    pub obstruction: Option<usize>,
}

fn coset_for(gog: &GraphOfGroups, ray: &Ray, edge: &TreeEdge) -> Result<EdgeCoset, LimitError> {
    let at_origin = edge.origin == ray.anchor;
    let at_terminus = gog.edge_terminus(edge) == ray.anchor;
    if !at_origin && !at_terminus {
        return Err(LimitError::NotIncident);
    }
    Ok(gog.edge_coset(&ray.anchor, edge))
}

/// How the ray `z^-1 ξ` runs in the core of the image: the word read before
/// the cycle, the cycling word, and the core state where the cycle starts.
struct CoreRun {
    before: FreeWord,
    cycle: FreeWord,
    state: usize,
}

fn run_in_core(gog: &GraphOfGroups, ray: &Ray, coset: &EdgeCoset, extra: usize) -> Option<CoreRun> {
    let sub = gog.side(coset.out).subgroup()?;
    let core = sub.core();
    let z_inv = coset.near.as_free().inverse();
    let (p, v) = canonical_tail(&z_inv.mul(&ray.head), &ray.period);
    let (mut c, read) = core.read_from(core.base(), &p);
    if read < p.len() {
        return None;
    }
    let mut seen: HashMap<usize, usize> = HashMap::new();
    let mut states = vec![c];
    let mut i = 0;
    loop {
        if let Some(&first) = seen.get(&c) {
            let len = i - first;
            let start = first + extra * len;
            let before = p.mul(&v.pow(start as i64));
            return Some(CoreRun { before, cycle: v.pow(len as i64), state: states[first] });
        }
        seen.insert(c, i);
        let (next, read) = core.read_from(c, &v);
        if read < v.len() {
            return None;
        }
        c = next;
        states.push(c);
        i += 1;
    }
}

pub(crate) fn flow_with(gog: &GraphOfGroups, ray: &Ray, edge: &TreeEdge, extra: usize) -> Result<FlowResult, LimitError> {
    let coset = coset_for(gog, ray, edge)?;
    let Some(run) = run_in_core(gog, ray, &coset, extra) else {
        let d = obstruction_diameter(gog, ray, edge, OBSTRUCTION_RADIUS, None)?;
        return Ok(FlowResult { flowable: false, flowed: None, obstruction: Some(d) });
    };
    let sub = gog.side(coset.out).subgroup().unwrap();
    let tau = sub.core().words_to_base()[run.state].clone();
    let h1 = run.before.mul(&tau);
    let h2 = tau.inverse().mul(&run.cycle).mul(&tau);
    let across = |h: &FreeWord| -> FreeWord {
        let a = sub.express_in_generators(h).expect("loops in the core lie in the image");
        gog.phi_o(coset.out.bar(), &GElem::Free(a)).as_free().clone()
    };
    let (g1, g2) = (across(&h1), across(&h2));
    let (c, k) = g2.cyclic_split();
    let head = coset.far.as_free().mul(&g1).mul(&c);
    let flowed = Ray::new(gog, coset.far_vertex.clone(), head, k)?;
    Ok(FlowResult { flowable: true, flowed: Some(flowed), obstruction: None })
}

/// Decides whether `ray` converges into the limit set of the edge-space image
/// of `edge` in its fiber, and if so carries it across.
pub fn flowable(gog: &GraphOfGroups, ray: &Ray, edge: &TreeEdge) -> Result<FlowResult, LimitError> {
    flow_with(gog, ray, edge, 0)
}

/// Fiber diameter of the set of edge-space image points within fiber
/// distance `d` of the first `r` steps of the ray. Default `d`: one more
/// than the diameter of the image's core graph.
pub fn obstruction_diameter(gog: &GraphOfGroups, ray: &Ray, edge: &TreeEdge, r: usize, d: Option<usize>) -> Result<usize, LimitError> {
    let coset = coset_for(gog, ray, edge)?;
    let vg = gog.vgroup(ray.anchor.ty);
    let sub = gog.side(coset.out).subgroup();
    let d = d.unwrap_or_else(|| sub.map_or(0, |s| s.core().diameter()) + 1);
    let z_inv = vg.inv(&coset.near);
    let member = |x: &GElem| {
        let rel = vg.mul(&z_inv, x);
        match sub {
            Some(s) => s.contains(rel.as_free()),
            None => vg.is_identity(&rel),
        }
    };
    let mut hits: Vec<GElem> = Vec::new();
    let mut seen = HashSet::new();
    for n in 0..=r {
        let s = GElem::Free(ray.prefix(n));
        for x in crate::ladder::fiber_ball(vg, &s, d) {
            if seen.insert(x.clone()) && member(&x) {
                hits.push(x);
            }
        }
    }
    let mut diam = 0;
    for (i, x) in hits.iter().enumerate() {
        for y in &hits[i + 1..] {
            diam = diam.max(crate::ladder::fiber_distance(vg, x, y));
        }
    }
    Ok(diam)
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowPath {
    pub flowed: Option<Ray>,
    /// Index of the first edge of the path that could not be crossed.
    pub failed_at: Option<usize>,
    pub steps: Vec<Ray>,
}

/// Flows `ray` edge by edge along a tree path starting at its anchor.
pub fn flow_along_path(gog: &GraphOfGroups, ray: &Ray, path: &[TreeVertex]) -> Result<FlowPath, LimitError> {
    assert!(path.first().is_none_or(|w| *w == ray.anchor), "path must start at the anchor");
    let mut cur = ray.clone();
    let mut steps = vec![cur.clone()];
    for (i, pair) in path.windows(2).enumerate() {
        let edge = gog.tree_geodesic_edges(&pair[0], &pair[1]).remove(0);
        let res = flowable(gog, &cur, &edge)?;
        match res.flowed {
            Some(next) => {
                cur = next;
                steps.push(cur.clone());
            }
            None => return Ok(FlowPath { flowed: None, failed_at: Some(i), steps }),
        }
    }
    Ok(FlowPath { flowed: Some(cur), failed_at: None, steps })
}

#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub radius: usize,
    /// Exact distance from `ray1(n)` to the trace of `ray2`, or `None` past the cutoff.
    pub per_step: Vec<Option<HalfInt>>,
    pub gap: Option<HalfInt>,
    pub cutoff: HalfInt,
}

impl GapReport {
    pub fn exceeded(&self) -> bool {
        self.gap.is_none()
    }
}

/// Largest exact `X`-distance from `ray1(n)`, `n <= r`, to the trace of
/// `ray2` (its first `2r + cutoff` points), searching up to `cutoff` (doubled).
pub fn fellow_travel_check(gog: &GraphOfGroups, ray1: &Ray, ray2: &Ray, r: usize, cutoff: u32) -> GapReport {
    let trace: HashSet<SpacePoint> = (0..=2 * r + cutoff as usize).map(|m| ray2.point(m)).collect();
    let per_step: Vec<Option<HalfInt>> = (0..=r)
        .map(|n| {
            XSearch::new(gog, &ray1.point(n))
                .nearest(|p| trace.contains(p), cutoff)
                .map(|(_, d)| HalfInt::from_doubled(d as i64))
        })
        .collect();
    let gap = per_step.iter().try_fold(HalfInt::from_int(0), |acc, d| d.map(|d| if d.doubled() > acc.doubled() { d } else { acc }));
    GapReport { radius: r, per_step, gap, cutoff: HalfInt::from_doubled(cutoff as i64) }
}

/// Diameters of the obstruction at two radii, and whether they separate.
#[derive(Clone, Debug, Serialize)]
pub struct ObstructionProbe {
    pub flowable: bool,
    pub short: usize,
    pub long: usize,
}

impl ObstructionProbe {
    /// A flowable ray keeps meeting the image, so its obstruction keeps growing.
    pub fn agrees(&self) -> bool {
        self.flowable == (self.long > self.short)
    }
}

pub fn probe_obstruction(gog: &GraphOfGroups, ray: &Ray, edge: &TreeEdge) -> Result<ObstructionProbe, LimitError> {
    Ok(ObstructionProbe {
        flowable: flowable(gog, ray, edge)?.flowable,
        short: obstruction_diameter(gog, ray, edge, 6, None)?,
        long: obstruction_diameter(gog, ray, edge, OBSTRUCTION_RADIUS, None)?,
    })
}

/// A deterministic mix of up to `count` rays with heads of length at most 2
/// and periods of length at most 4, anchored at the base vertex of each free
/// type, paired with an incident edge. Flowable and rejected rays alternate
/// while both kinds last.
pub fn probe_rays(gog: &GraphOfGroups, count: usize) -> Vec<(Ray, TreeEdge)> {
    let mut flowing = Vec::new();
    let mut stuck = Vec::new();
    let mut seen = HashSet::new();
    for v in 0..gog.vertex_count() {
        let Some(rank) = gog.vgroup(v).free_rank().filter(|&r| r > 0) else {
            continue;
        };
        let w = gog.base_tree_vertex(v);
        let periods: Vec<FreeWord> = (1..=4).flat_map(|n| FreeWord::sphere(rank, n)).filter(|p| p.is_cyclically_reduced()).collect();
        for inc in gog.incident_edges(&w, 0).edges {
            for head in FreeWord::ball(rank, 2) {
                for period in &periods {
                    let Ok(ray) = Ray::new(gog, w.clone(), head.clone(), period.clone()) else {
                        continue;
                    };
                    if !seen.insert((ray.clone(), inc.edge.clone())) {
                        continue;
                    }
                    match flowable(gog, &ray, &inc.edge) {
                        Ok(r) if r.flowable => flowing.push((ray, inc.edge.clone())),
                        Ok(_) => stuck.push((ray, inc.edge.clone())),
                        Err(_) => {}
                    }
                }
            }
        }
    }
    let pick = |v: Vec<(Ray, TreeEdge)>, n: usize| -> Vec<(Ray, TreeEdge)> {
        if v.len() <= n {
            return v;
        }
        let stride = v.len() / n;
        v.into_iter().step_by(stride).take(n).collect()
    };
    let half = count / 2;
    let nf = flowing.len().min(half.max(count.saturating_sub(stuck.len())));
    let flowing = pick(flowing, nf);
    let stuck = pick(stuck, count - flowing.len());
    let mut out = Vec::new();
    let (mut a, mut b) = (flowing.into_iter(), stuck.into_iter());
    loop {
        match (a.next(), b.next()) {
            (None, None) => break,
            (x, y) => out.extend(x.into_iter().chain(y)),
        }
    }
    out
}

/// Gaps at increasing radii. The first radius is searched up to `cutoff`; later
/// ones only up to the first gap plus `slack` (both doubled), so a diverging
/// pair shows up as an exceeded cutoff instead of an unbounded search.
#[derive(Clone, Debug, Serialize)]
pub struct GapSeries {
    pub reports: Vec<GapReport>,
}

impl GapSeries {
    pub fn measure(gog: &GraphOfGroups, ray1: &Ray, ray2: &Ray, radii: &[usize], cutoff: u32, slack: u32) -> Self {
        let mut reports: Vec<GapReport> = Vec::new();
        for &r in radii {
            let c = match reports.first().and_then(|f| f.gap) {
                Some(g) => g.doubled() as u32 + slack,
                None if reports.is_empty() => cutoff,
                None => break,
            };
            reports.push(fellow_travel_check(gog, ray1, ray2, r, c));
        }
        GapSeries { reports }
    }

    /// Every gap found and the spread at most one.
    pub fn plateau(&self) -> bool {
        let gaps: Option<Vec<i64>> = self.reports.iter().map(|r| r.gap.map(|g| g.doubled())).collect();
        gaps.is_some_and(|g| g.iter().max().unwrap_or(&0) - g.iter().min().unwrap_or(&0) <= 2)
    }

    /// The last gap exceeds the first by at least `by`, or ran past its cutoff.
    pub fn diverges(&self, by: HalfInt) -> bool {
        let (Some(first), Some(last)) = (self.reports.first(), self.reports.last()) else {
            return false;
        };
        match (first.gap, last.gap) {
            (Some(a), Some(b)) => b.doubled() >= a.doubled() + by.doubled(),
            (Some(a), None) => last.cutoff.doubled() >= a.doubled() + by.doubled(),
            _ => false,
        }
    }
}
