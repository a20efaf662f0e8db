use std::collections::BTreeSet;

use crate::gog::{GElem, GraphOfGroups, GroupSpec, OEdge, ReducedSequence};
use crate::stallings::SubgroupHandle;

use super::TreeVertex;

/// A subgroup of a free or finite vertex group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexSubgroup {
    Free(SubgroupHandle),
    Finite(BTreeSet<u32>),
}

impl VertexSubgroup {
    pub fn full(gog: &GraphOfGroups, v: usize) -> Self {
        match gog.vgroup(v) {
            GroupSpec::Free(f) => VertexSubgroup::Free(SubgroupHandle::whole(f.rank())),
            GroupSpec::Finite { table, .. } => VertexSubgroup::Finite((0..table.order()).collect()),
        }
    }

    pub fn trivial(gog: &GraphOfGroups, v: usize) -> Self {
        match gog.vgroup(v) {
            GroupSpec::Free(f) => VertexSubgroup::Free(SubgroupHandle::trivial(f.rank())),
            GroupSpec::Finite { table, .. } => VertexSubgroup::Finite([table.identity()].into_iter().collect()),
        }
    }

    pub fn contains(&self, g: &GElem) -> bool {
        match (self, g) {
            (VertexSubgroup::Free(h), GElem::Free(w)) => h.contains(w),
            (VertexSubgroup::Finite(s), GElem::Finite(i)) => s.contains(i),
            _ => false,
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            VertexSubgroup::Free(h) => h.is_trivial(),
            VertexSubgroup::Finite(s) => s.len() == 1,
        }
    }

    /// A generating set: the free basis, or every element.
    pub fn generators(&self) -> Vec<GElem> {
        match self {
            VertexSubgroup::Free(h) => h.basis().iter().cloned().map(GElem::Free).collect(),
            VertexSubgroup::Finite(s) => s.iter().copied().map(GElem::Finite).collect(),
        }
    }

    pub fn as_free(&self) -> Option<&SubgroupHandle> {
        match self {
            VertexSubgroup::Free(h) => Some(h),
            VertexSubgroup::Finite(_) => None,
        }
    }

    /// `h K h^-1` inside the group at `v`.
    pub fn conjugate(&self, gog: &GraphOfGroups, v: usize, h: &GElem) -> Self {
        match self {
            VertexSubgroup::Free(k) => VertexSubgroup::Free(k.conjugate(h.as_free())),
            VertexSubgroup::Finite(s) => {
                let vg = gog.vgroup(v);
                let hi = vg.inv(h);
                VertexSubgroup::Finite(s.iter().map(|&x| vg.mul(&vg.mul(h, &GElem::Finite(x)), &hi).as_finite()).collect())
            }
        }
    }
}

/// `G_{w1} ∩ G_{w2}` as `rep · subgroup · rep^-1`, where `rep` is the path of `w1`.
#[derive(Clone, Debug)]
pub struct PathStabilizer {
    pub vertex: usize,
    pub subgroup: VertexSubgroup,
    pub conjugator: ReducedSequence,
}

impl PathStabilizer {
    /// Loops at the base generating the stabilizer.
    pub fn global_generators(&self, gog: &GraphOfGroups) -> Vec<ReducedSequence> {
        let inv = gog.inverse(&self.conjugator);
        self.subgroup
            .generators()
            .into_iter()
            .map(|k| gog.mul(&gog.mul(&self.conjugator, &gog.vertex_element(self.vertex, k)), &inv))
            .collect()
    }
}

impl GraphOfGroups {
    /// Pulls a subgroup `K` of the group at `t(e)` back across `e`:
    /// `φ_{e,o}(φ_{e,t}^-1(K ∩ Im φ_{e,t}))`.
    pub fn transport_across(&self, e: OEdge, k: &VertexSubgroup) -> VertexSubgroup {
        let eg = self.egroup(e);
        let o = self.o(e);
        if eg.is_trivial() {
            return VertexSubgroup::trivial(self, o);
        }
        match eg {
            GroupSpec::Free(_) => {
                let images_t: Vec<_> = self.side(e.bar()).generator_images().iter().map(|g| g.as_free().clone()).collect();
                let images_o: Vec<_> = self.side(e).generator_images().iter().map(|g| g.as_free().clone()).collect();
                let kk = k.as_free().expect("free edge groups map into free vertex groups");
                let pre = SubgroupHandle::preimage(&images_t, kk).expect("edge maps are injective");
                let rank_o = self.vgroup(o).free_rank().unwrap();
                VertexSubgroup::Free(pre.image(rank_o, &images_o))
            }
            GroupSpec::Finite { .. } => {
                let mut out = BTreeSet::new();
                for a in eg.elements().unwrap() {
                    if k.contains(&self.phi_t(e, &a)) {
                        out.insert(self.phi_o(e, &a).as_finite());
                    }
                }
                VertexSubgroup::Finite(out)
            }
        }
    }

    /// The pointwise stabilizer of the geodesic `[w1, w2]`, computed by
    /// walking the geodesic from `w2` back to `w1`.
    pub fn path_stabilizer(&self, w1: &TreeVertex, w2: &TreeVertex) -> PathStabilizer {
        let c = self.normalize(&self.concat_raw(&self.inverse(&w1.rep), &w2.rep));
        let mut syl = vec![c.head.clone()];
        syl.extend(c.steps.iter().map(|s| s.1.clone()));
        let mut k = VertexSubgroup::full(self, self.end(&c));
        for i in (0..c.steps.len()).rev() {
            let e = c.steps[i].0;
            k = self.transport_across(e, &k);
            k = k.conjugate(self, self.o(e), &syl[i]);
        }
        PathStabilizer { vertex: w1.ty, subgroup: k, conjugator: w1.rep.clone() }
    }
}
