use serde::Serialize;

use crate::bass_serre::TreeVertex;
use crate::gog::{GElem, GraphOfGroups};
use crate::space::{SpacePoint, XSearch};
use crate::stallings::SubgroupHandle;
use crate::words::{FreeWord, HalfInt, Letter};

use super::LimitError;

/// The elements of intrinsic (basis) length `radius` of a subgroup, as
/// reduced words of the ambient free group.
#[derive(Clone, Debug, Serialize)]
pub struct LimitProxy {
    pub radius: usize,
    pub basis: Vec<FreeWord>,
    pub points: Vec<FreeWord>,
}

impl LimitProxy {
    /// The proxy of the coset `xH`.
    pub fn translate(&self, x: &FreeWord) -> Vec<FreeWord> {
        self.points.iter().map(|p| x.mul(p)).collect()
    }
}

pub fn limit_proxy_from_basis(basis: &[FreeWord], radius: usize) -> LimitProxy {
    let points = FreeWord::sphere(basis.len() as u32, radius).iter().map(|w| crate::stallings::expand_with(basis, w)).collect();
    LimitProxy { radius, basis: basis.to_vec(), points }
}

pub fn limit_proxy(h: &SubgroupHandle, radius: usize) -> LimitProxy {
    limit_proxy_from_basis(h.basis(), radius)
}

/// Elements of `h` of length at most `max_len`, read off reduced closed
/// walks in its core; stops after `cap` elements.
fn elements_upto(h: &SubgroupHandle, max_len: usize, cap: usize) -> (Vec<FreeWord>, bool) {
    let core = h.core();
    let rank = h.ambient_rank();
    let mut out = vec![FreeWord::identity()];
    let mut stack: Vec<(usize, Vec<Letter>)> = vec![(core.base(), Vec::new())];
    while let Some((v, word)) = stack.pop() {
        if word.len() == max_len {
            continue;
        }
        for l in Letter::all(rank) {
            if word.last() == Some(&l.inverse()) {
                continue;
            }
            if let Some(n) = core.step(v, l) {
                let mut w = word.clone();
                w.push(l);
                if n == core.base() {
                    out.push(FreeWord::from_letters(w.iter().copied()));
                    if out.len() >= cap {
                        return (out, true);
                    }
                }
                stack.push((n, w));
            }
        }
    }
    (out, false)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectReport {
    pub radius: usize,
    pub d_config: HalfInt,
    pub intersection_generators: Vec<String>,
    /// Sphere points in the first fiber within `d_config` of the second sphere.
    pub pairs: usize,
    pub max_defect: Option<usize>,
    pub witness: Option<(String, String)>,
    /// Same scan with the intersection replaced by the trivial subgroup.
    pub contrast_max_defect: Option<usize>,
    pub vacuous: bool,
    pub truncated: bool,
}

const ELEMENT_CAP: usize = 100_000;

/// Scans pairs of radius-`radius` sphere points in the fibers over `w1` and
/// `w2` at exact `X`-distance at most `d_config`, and measures how far each
/// first point strays from the limit set of the path stabilizer `I`:
/// `radius` minus the length of its longest prefix readable in the core of `I`.
pub fn intersection_defect(
    gog: &GraphOfGroups,
    w1: &TreeVertex,
    w2: &TreeVertex,
    radius: usize,
    d_config: HalfInt,
) -> Result<DefectReport, LimitError> {
    for w in [w1, w2] {
        if !gog.vgroup(w.ty).is_free() {
            return Err(LimitError::NotFree(gog.vertex_name(w.ty).to_string()));
        }
    }
    let ps = gog.path_stabilizer(w1, w2);
    let k = ps.subgroup.as_free().expect("free vertex group").clone();
    let vg1 = gog.vgroup(w1.ty);
    let intersection_generators = k.basis().iter().map(|b| vg1.format(&GElem::Free(b.clone()))).collect();
    let defect = |x: &FreeWord| radius - k.readable_prefix_len(x).min(radius);
    let mut report = DefectReport {
        radius,
        d_config,
        intersection_generators,
        pairs: 0,
        max_defect: None,
        witness: None,
        contrast_max_defect: None,
        vacuous: true,
        truncated: false,
    };
    if w1 == w2 {
        let sphere = FreeWord::sphere(vg1.free_rank().unwrap(), radius);
        report.pairs = sphere.len();
        report.vacuous = sphere.is_empty();
        report.max_defect = sphere.iter().map(&defect).max();
        report.contrast_max_defect = Some(radius);
        if let Some(x) = sphere.first() {
            let s = vg1.format(&GElem::Free(x.clone()));
            report.witness = Some((s.clone(), s));
        }
        return Ok(report);
    }
    let d2 = d_config.doubled().max(0) as u32;
    let in_sphere = |p: &SpacePoint, w: &TreeVertex| match p {
        SpacePoint::Vertex(q) => q.trailing().as_free().len() == radius && gog.tree_vertex(q) == *w,
        SpacePoint::Edge { .. } => false,
    };

    // every tree edge between a point and the target fiber costs two half edges
    let toward = |p: &SpacePoint, w: &TreeVertex| -> u32 {
        match p {
            SpacePoint::Vertex(q) => 2 * gog.relative(&w.rep, q).edge_count() as u32,
            SpacePoint::Edge { edge, .. } => {
                let t = gog.relative(&w.rep, &edge.origin.rep).edge_count() as u32;
                1 + 2 * t.saturating_sub(1)
            }
        }
    };
    let last = gog.tree_geodesic_edges(w1, w2).pop().unwrap();
    let coset = gog.edge_coset(w2, &last);
    let vg2 = gog.vgroup(w2.ty);
    let stretch = gog
        .graph()
        .out_edges(w2.ty)
        .iter()
        .flat_map(|&e| gog.side(e).generator_images().iter().map(|g| vg2.len(g)).collect::<Vec<_>>())
        .max()
        .unwrap_or(1)
        .max(1);
    let window = stretch * (d2 as usize).saturating_sub(2).div_ceil(2);
    let (elements, truncated) = match gog.side(coset.out).subgroup() {
        Some(h) => elements_upto(h, radius + window + coset.near.as_free().len(), ELEMENT_CAP),
        None => (vec![FreeWord::identity()], false),
    };
    report.truncated = truncated;
    let near: Vec<SpacePoint> = elements
        .iter()
        .map(|h| coset.near.as_free().mul(h))
        .filter(|g| g.len() + window >= radius && g.len() <= radius + window)
        .map(|g| {
            let mut q = w2.rep.clone();
            *q.trailing_mut() = GElem::Free(g);
            SpacePoint::Vertex(q)
        })
        .collect();
    let targets: Vec<SpacePoint> = XSearch::multi(gog, &near)
        .bounded(d2.saturating_sub(2), |p| toward(p, w2))
        .settled(d2.saturating_sub(2))
        .into_iter()
        .map(|(p, _)| p)
        .filter(|p| in_sphere(p, w2))
        .collect();
    if targets.is_empty() {
        return Ok(report);
    }
    let mut search = XSearch::multi(gog, &targets).bounded(d2, |p| toward(p, w1));
    let mut best: Option<(usize, SpacePoint)> = None;
    for (p, _) in search.settled(d2) {
        if !in_sphere(&p, w1) {
            continue;
        }
        report.pairs += 1;
        let x = p.as_vertex().unwrap().trailing().as_free().clone();
        let d = defect(&x);
        if best.as_ref().is_none_or(|(bd, _)| d > *bd) {
            best = Some((d, p));
        }
    }
    if let Some((d, x)) = best {
        let partner = search.path_to(&x).unwrap().remove(0);
        report.vacuous = false;
        report.max_defect = Some(d);
        report.contrast_max_defect = Some(radius);
        report.witness = Some((gog.format_point(&x), gog.format_point(&partner)));
    }
    Ok(report)
}

/// Defect-versus-radius series as CSV.
pub fn defect_csv(reports: &[DefectReport]) -> String {
    let mut s = String::from("radius,d_config,pairs,max_defect,contrast_max_defect,vacuous\n");
    let opt = |x: Option<usize>| x.map_or(String::new(), |v| v.to_string());
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.radius,
            r.d_config,
            r.pairs,
            opt(r.max_defect),
            opt(r.contrast_max_defect),
            r.vacuous
        ));
    }
    s
}
