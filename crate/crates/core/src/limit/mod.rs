//! Boundary experiments at finite scale: eventually periodic rays in free
//! fibers, flows across edge spaces, limit-set proxies, the intersection
//! defect, witness extraction, and subgroup attachment.

mod attach;
mod flow;
mod proxy;
mod witness;

use serde::Serialize;
use thiserror::Error;

use crate::bass_serre::TreeVertex;
use crate::gog::{GElem, GogError, GraphOfGroups};
use crate::space::SpacePoint;
use crate::words::FreeWord;

pub use attach::{attach_subgroup, check_attached_stabilizers, redundant_generators, AttachCheck};
pub use flow::{
    fellow_travel_check, flow_along_path, flowable, obstruction_diameter, probe_obstruction, probe_rays, FlowPath, FlowResult,
    GapReport, GapSeries, ObstructionProbe, OBSTRUCTION_RADIUS,
};
pub use proxy::{defect_csv, intersection_defect, limit_proxy, limit_proxy_from_basis, DefectReport, LimitProxy};
pub use witness::{aligned_pairs, extract_witnesses, Witness, WitnessReport};


#[derive(Debug, Error, PartialEq)]
pub enum LimitError {
    #[error("vertex group at {0} is not free")]
    NotFree(String),
    #[error("invalid ray: {0}")]
    BadRay(String),
    #[error("edge is not incident to the ray's anchor")]
    NotIncident,
    #[error("cannot attach the trivial subgroup")]
    TrivialSubgroup,
    #[error(transparent)]
    Gog(#[from] GogError),
}

/// The boundary point `u·v^∞` of the free fiber over `anchor`, kept in a
/// canonical form: the seam is reduced, the head is as short as possible
/// and the period is primitive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ray {
    #[serde(skip)]
    pub anchor: TreeVertex,
    pub head: FreeWord,
    pub period: FreeWord,
}

fn rotate_left(w: &FreeWord) -> FreeWord {
    let l = w.letters();
    FreeWord::from_letters(l[1..].iter().copied().chain(std::iter::once(l[0])))
}

fn rotate_right(w: &FreeWord) -> FreeWord {
    let l = w.letters();
    let n = l.len();
    FreeWord::from_letters(std::iter::once(l[n - 1]).chain(l[..n - 1].iter().copied()))
}

fn primitive_root(w: &FreeWord) -> FreeWord {
    let l = w.letters();
    let n = l.len();
    for d in 1..=n {
        if n % d == 0 && (0..n).all(|i| l[i] == l[i % d]) {
            return FreeWord::from_letters(l[..d].iter().copied());
        }
    }
    w.clone()
}

/// Reduces the infinite word `head · period^∞`, given a cyclically reduced period.
pub(crate) fn canonical_tail(head: &FreeWord, period: &FreeWord) -> (FreeWord, FreeWord) {
    let mut head = head.clone();
    let mut period = primitive_root(period);
    while let (Some(h), Some(p)) = (head.last(), period.first()) {
        if h != p.inverse() {
            break;
        }
        head = head.prefix(head.len() - 1);
        period = rotate_left(&period);
    }
    while let (Some(h), Some(p)) = (head.last(), period.last()) {
        if h != p {
            break;
        }
        head = head.prefix(head.len() - 1);
        period = rotate_right(&period);
    }
    (head, period)
}

impl Ray {
    pub fn new(gog: &GraphOfGroups, anchor: TreeVertex, head: FreeWord, period: FreeWord) -> Result<Self, LimitError> {
        if !gog.vgroup(anchor.ty).is_free() {
            return Err(LimitError::NotFree(gog.vertex_name(anchor.ty).to_string()));
        }
        if period.is_empty() || !period.is_cyclically_reduced() {
            return Err(LimitError::BadRay("period must be nonempty and cyclically reduced".into()));
        }
        let rank = gog.vgroup(anchor.ty).free_rank().unwrap();
        if head.check_rank(rank).is_err() || period.check_rank(rank).is_err() {
            return Err(LimitError::BadRay("letters outside the vertex group".into()));
        }
        let (head, period) = canonical_tail(&head, &period);
        Ok(Ray { anchor, head, period })
    }

    /// The first `n` letters of `u·v^∞`.
    pub fn prefix(&self, n: usize) -> FreeWord {
        let h = self.head.letters();
        let p = self.period.letters();
        FreeWord::from_letters((0..n).map(|i| if i < h.len() { h[i] } else { p[(i - h.len()) % p.len()] }))
    }

    /// The point at distance `n` along the ray, in the anchor's fiber.
    pub fn point(&self, n: usize) -> SpacePoint {
        let mut q = self.anchor.rep.clone();
        *q.trailing_mut() = GElem::Free(self.prefix(n));
        SpacePoint::Vertex(q)
    }

    pub fn format(&self, gog: &GraphOfGroups) -> String {
        let vg = gog.vgroup(self.anchor.ty);
        format!(
            "{} : {} ({})^inf",
            gog.format_tree_vertex(&self.anchor),
            vg.format(&GElem::Free(self.head.clone())),
            vg.format(&GElem::Free(self.period.clone()))
        )
    }
}
