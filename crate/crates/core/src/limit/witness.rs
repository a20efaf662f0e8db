use std::collections::BTreeMap;

use serde::Serialize;

use crate::bass_serre::TreeVertex;
use crate::gog::{GraphOfGroups, ReducedSequence};
use crate::space::{SpacePoint, XSearch};
use crate::stallings::SubgroupHandle;

use super::LimitError;

/// `(K_i · x_{w1}, K_i · x_{w2})` for `K_i = rep · k^i · rep^-1`, `k` the
/// first basis element of the path stabilizer and `x_w` the identity point of
/// the fiber over `w`. Empty when the stabilizer is trivial.
pub fn aligned_pairs(gog: &GraphOfGroups, w1: &TreeVertex, w2: &TreeVertex, n: usize) -> Vec<(SpacePoint, SpacePoint)> {
    let ps = gog.path_stabilizer(w1, w2);
    let Some(k) = ps.global_generators(gog).into_iter().next() else {
        return Vec::new();
    };
    (1..=n as i64)
        .map(|i| {
            let g = gog.pow(&k, i);
            (gog.act_point(&g, &SpacePoint::Vertex(w1.rep.clone())), gog.act_point(&g, &SpacePoint::Vertex(w2.rep.clone())))
        })
        .collect()
}

fn step_label(gog: &GraphOfGroups, a: &SpacePoint, b: &SpacePoint) -> String {
    match (a, b) {
        (SpacePoint::Vertex(p), SpacePoint::Vertex(q)) => {
            let vg = gog.vgroup(gog.end(p));
            vg.format(&vg.mul(&vg.inv(p.trailing()), q.trailing()))
        }
        (SpacePoint::Edge { edge, a: x }, SpacePoint::Edge { a: y, .. }) => {
            let eg = gog.egroup(edge.e);
            format!("{}:{}", gog.edge_name(edge.e), eg.format(&eg.mul(&eg.inv(x), y)))
        }
        (SpacePoint::Edge { edge, .. }, _) | (_, SpacePoint::Edge { edge, .. }) => gog.edge_name(edge.e),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub first: usize,
    pub index: usize,
    pub omega: String,
    pub local: Option<String>,
    pub fixes_w1: bool,
    pub fixes_w2: bool,
    pub in_stabilizer: bool,
}

impl Witness {
    pub fn verified(&self) -> bool {
        self.fixes_w1 && self.fixes_w2 && self.in_stabilizer
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub pairs: usize,
    pub distances: Vec<Option<u32>>,
    pub labels: Vec<String>,
    pub histogram: BTreeMap<String, usize>,
    pub bucket: Vec<usize>,
    pub witnesses: Vec<Witness>,
    /// The witnesses generate a subgroup of the stabilizer.
    pub generated_in_stabilizer: bool,
}

impl WitnessReport {
    pub fn all_verified(&self) -> bool {
        !self.witnesses.is_empty() && self.witnesses.iter().all(Witness::verified) && self.generated_in_stabilizer
    }
}

/// Buckets `n` aligned pairs by the label of a geodesic between them and turns
/// the largest bucket into stabilizer elements `g(p_{n_k}) g(p_{n_1})^-1`,
/// where `g(q)` is the group element whose translate of the fiber identity is `q`.
pub fn extract_witnesses(
    gog: &GraphOfGroups,
    w1: &TreeVertex,
    w2: &TreeVertex,
    n: usize,
    cutoff: u32,
) -> Result<WitnessReport, LimitError> {
    if !gog.vgroup(w1.ty).is_free() {
        return Err(LimitError::NotFree(gog.vertex_name(w1.ty).to_string()));
    }
    let ps = gog.path_stabilizer(w1, w2);
    let stab = ps.subgroup.as_free().cloned().expect("free vertex group");
    let pairs = aligned_pairs(gog, w1, w2, n);
    let mut distances = Vec::new();
    let mut labels = Vec::new();
    for (p, q) in &pairs {
        let mut s = XSearch::new(gog, p);
        let d = s.distance(q, cutoff);
        distances.push(d);
        let label = match s.path_to(q) {
            Some(path) if d.is_some() => path.windows(2).map(|w| step_label(gog, &w[0], &w[1])).collect::<Vec<_>>().join(" "),
            _ => String::from("?"),
        };
        labels.push(label);
    }
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    for (l, d) in labels.iter().zip(&distances) {
        if d.is_some() {
            *histogram.entry(l.clone()).or_default() += 1;
        }
    }
    let best = histogram.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(l, _)| l.clone());
    let bucket: Vec<usize> = match &best {
        Some(l) => (0..pairs.len()).filter(|&i| &labels[i] == l && distances[i].is_some()).collect(),
        None => Vec::new(),
    };
    let pv_inv = gog.inverse(&gog.tree_path_element(w1.ty));
    let g_of = |p: &SpacePoint| -> ReducedSequence { gog.mul(p.as_vertex().unwrap(), &pv_inv) };
    let rep_inv = gog.inverse(&w1.rep);
    let vg = gog.vgroup(w1.ty);
    let mut witnesses = Vec::new();
    let mut locals = Vec::new();
    if let Some((&first, rest)) = bucket.split_first() {
        let g1_inv = gog.inverse(&g_of(&pairs[first].0));
        for &k in rest {
            let omega = gog.mul(&g_of(&pairs[k].0), &g1_inv);
            let local = gog.mul(&gog.mul(&rep_inv, &omega), &w1.rep);
            let local = local.steps.is_empty().then(|| local.head.clone());
            let in_stabilizer = local.as_ref().is_some_and(|h| stab.contains(h.as_free()));
            if let Some(h) = &local {
                locals.push(h.as_free().clone());
            }
            witnesses.push(Witness {
                first: first + 1,
                index: k + 1,
                omega: gog.format_sequence(&omega),
                local: local.as_ref().map(|h| vg.format(h)),
                fixes_w1: gog.act_vertex(&omega, w1) == *w1,
                fixes_w2: gog.act_vertex(&omega, w2) == *w2,
                in_stabilizer,
            });
        }
    }
    let generated = SubgroupHandle::fold(stab.ambient_rank(), &locals);
    Ok(WitnessReport {
        pairs: pairs.len(),
        distances,
        labels,
        histogram,
        bucket: bucket.iter().map(|i| i + 1).collect(),
        witnesses,
        generated_in_stabilizer: generated.is_subgroup_of(&stab),
    })
}
