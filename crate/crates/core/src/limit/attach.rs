use serde::Serialize;

use crate::bass_serre::TreeVertex;
use crate::gog::{GElem, GraphOfGroups, GroupSpec, OEdge, ReducedSequence};
use crate::stallings::SubgroupHandle;
use crate::words::FreeWord;

use super::LimitError;

/// Extends `gog` by a vertex carrying `k` (a subgroup of the free group at
/// `v`), glued to `v` along `k` by a new tree edge.
pub fn attach_subgroup(gog: &GraphOfGroups, v: usize, k: &SubgroupHandle) -> Result<GraphOfGroups, LimitError> {
    let vg = gog.vgroup(v);
    let GroupSpec::Free(_) = vg else {
        return Err(LimitError::NotFree(gog.vertex_name(v).to_string()));
    };
    if k.is_trivial() {
        return Err(LimitError::TrivialSubgroup);
    }
    let cfg = gog.config();
    let mut taken: Vec<String> = Vec::new();
    for vc in &cfg.vertices {
        taken.push(vc.name.clone());
        taken.extend(gog.vgroup(gog.vertex_index(&vc.name).unwrap()).presentation_generators());
    }
    for ec in &cfg.edges {
        taken.push(ec.name.clone());
        taken.push(format!("{}_bar", ec.name));
    }
    let clash = |p: &str| taken.iter().any(|t| t.starts_with(p));
    let n = (1..).find(|n| !clash(&format!("K{n}")) && !clash(&format!("k{n}"))).unwrap();
    Ok(gog.attach_free_vertex(v, k.basis(), &format!("K{n}"), &format!("k{n}"))?)
}

fn new_edge(y1: &GraphOfGroups) -> OEdge {
    OEdge::positive(y1.graph().edge_count() - 1)
}

/// The vertex `h · G_u` for the attached vertex `u`, `h` in the group at `v`.
fn attached_vertex(y1: &GraphOfGroups, v: usize, h: &FreeWord) -> TreeVertex {
    let mut path = y1.tree_path_element(v);
    *path.trailing_mut() = GElem::Free(h.clone());
    y1.tree_vertex(&y1.concat_raw(&path, &y1.edge_element(new_edge(y1))))
}

/// `G_{w1} ∩ G_{w2}` pulled into the group at `v`; both vertices must be
/// fixed only by elements of the vertex stabilizer of `G_v`.
fn stabilizer_at(y1: &GraphOfGroups, v: usize, w1: &TreeVertex, w2: &TreeVertex) -> SubgroupHandle {
    let pv = y1.tree_path_element(v);
    let pv_inv = y1.inverse(&pv);
    let gens: Vec<FreeWord> = y1
        .path_stabilizer(w1, w2)
        .global_generators(y1)
        .iter()
        .map(|g| {
            let l: ReducedSequence = y1.mul(&y1.mul(&pv_inv, g), &pv);
            assert!(l.steps.is_empty(), "stabilizer leaves the vertex group");
            l.head.as_free().clone()
        })
        .collect();
    SubgroupHandle::fold(y1.vgroup(v).free_rank().unwrap(), &gens)
}

#[derive(Clone, Debug, Serialize)]
pub struct AttachCheck {
    pub left: String,
    pub right: String,
    pub computed: Vec<String>,
    pub oracle: Vec<String>,
    pub agrees: bool,
}

/// Compares path stabilizers in the extended graph of groups with
/// intersections of conjugates computed by folding: `hKh^-1 ∩ h'Kh'^-1` for
/// every pair of conjugators, and `hKh^-1 ∩ G_e` against the neighbor of
/// `G_v` across its first original edge.
pub fn check_attached_stabilizers(
    y1: &GraphOfGroups,
    v: usize,
    k: &SubgroupHandle,
    conjugators: &[FreeWord],
) -> Result<Vec<AttachCheck>, LimitError> {
    let vg = y1.vgroup(v);
    let GroupSpec::Free(_) = vg else {
        return Err(LimitError::NotFree(y1.vertex_name(v).to_string()));
    };
    let fmt = |h: &SubgroupHandle| -> Vec<String> { h.basis().iter().map(|b| vg.format(&GElem::Free(b.clone()))).collect() };
    let ws: Vec<TreeVertex> = conjugators.iter().map(|h| attached_vertex(y1, v, h)).collect();
    let mut out = Vec::new();
    let mut push = |a: &TreeVertex, b: &TreeVertex, oracle: SubgroupHandle| {
        let computed = stabilizer_at(y1, v, a, b);
        out.push(AttachCheck {
            left: y1.format_tree_vertex(a),
            right: y1.format_tree_vertex(b),
            computed: fmt(&computed),
            oracle: fmt(&oracle),
            agrees: computed == oracle,
        });
    };
    for i in 0..ws.len() {
        for j in i + 1..ws.len() {
            let oracle = k.conjugate(&conjugators[i]).intersect(&k.conjugate(&conjugators[j]));
            push(&ws[i], &ws[j], oracle);
        }
    }
    let wv = y1.base_tree_vertex(v);
    let old = y1.graph().out_edges(v).into_iter().find(|e| *e != new_edge(y1));
    if let Some(e) = old {
        let edge = y1.edge_from(&wv, &vg.identity(), e);
        let far = if e.is_positive() { y1.edge_terminus(&edge) } else { edge.origin.clone() };
        let coset = y1.edge_coset(&wv, &edge);
        let rank = vg.free_rank().unwrap();
        let image = y1.side(coset.out).subgroup().cloned().unwrap_or_else(|| SubgroupHandle::trivial(rank));
        let ge = image.conjugate(coset.near.as_free());
        for (w, h) in ws.iter().zip(conjugators) {
            push(w, &far, k.conjugate(h).intersect(&ge));
        }
    }
    Ok(out)
}

/// Each generator of the attached vertex equals its basis word in the group
/// at `v`, so the extension adds only redundant generators.
pub fn redundant_generators(y1: &GraphOfGroups, v: usize, k: &SubgroupHandle) -> bool {
    let u = y1.vertex_count() - 1;
    let pu = y1.tree_path_element(u);
    let pv = y1.tree_path_element(v);
    let (pu_inv, pv_inv) = (y1.inverse(&pu), y1.inverse(&pv));
    k.basis().iter().enumerate().all(|(i, b)| {
        let mut gu = pu.clone();
        *gu.trailing_mut() = y1.vgroup(u).generator(i);
        let mut gv = pv.clone();
        *gv.trailing_mut() = GElem::Free(b.clone());
        y1.element_eq(&y1.mul(&gu, &pu_inv), &y1.mul(&gv, &pv_inv))
    })
}
