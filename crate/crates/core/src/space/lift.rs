use serde::Serialize;

use crate::bass_serre::{ConstantsLedger, Provenance, TreeVertex};
use crate::gog::GraphOfGroups;
use crate::words::HalfInt;

use super::ball::{MetricEstimate, SpaceBall, SpaceError, UNREACHED};
use super::point::{Locus, SpacePoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftStrategy {
    Nearest,
    ConstantSyllable,
}

/// A section of `π` over the vertices of a tree path.
#[derive(Clone, Debug, Serialize)]
pub struct QiLift {
    pub strategy: LiftStrategy,
    #[serde(skip)]
    pub path: Vec<TreeVertex>,
    #[serde(skip)]
    pub points: Vec<SpacePoint>,
    pub labels: Vec<String>,
    pub jumps: Vec<MetricEstimate>,
    /// Largest jump; `None` for a single point.
    pub k: Option<HalfInt>,
}

impl QiLift {
    pub fn all_trusted(&self) -> bool {
        self.jumps.iter().all(|j| j.trust)
    }
}

fn anchor(w: &TreeVertex) -> SpacePoint {
    SpacePoint::Vertex(w.rep.clone())
}

/// Lifts `path` into `ball`, starting at `start` (default: the identity point
/// over `path[0]`). Nearest picks, over each next vertex, a ball-closest
/// point of its fiber; constant-syllable keeps the trailing syllable trivial.
pub fn qi_lift(
    gog: &GraphOfGroups,
    ball: &SpaceBall,
    path: &[TreeVertex],
    strategy: LiftStrategy,
    start: Option<&SpacePoint>,
) -> Result<QiLift, SpaceError> {
    let Some(first) = path.first() else {
        return Ok(QiLift { strategy, path: Vec::new(), points: Vec::new(), labels: Vec::new(), jumps: Vec::new(), k: None });
    };
    let p0 = start.cloned().unwrap_or_else(|| anchor(first));
    assert_eq!(gog.project_pi(&p0), Locus::Vertex(first.clone()), "start point must lie over the path");
    let mut cur = ball.index_of(&p0).ok_or_else(|| SpaceError::OutsideBall(gog.format_point(&p0)))?;
    let mut points = vec![p0];
    let mut jumps = Vec::new();
    for w in &path[1..] {
        let locus = Locus::Vertex(w.clone());
        let dist = ball.dijkstra(&[cur], UNREACHED);
        let next = match strategy {
            LiftStrategy::Nearest => (0..ball.len())
                .filter(|&j| dist[j] != UNREACHED && ball.points[j].is_vertex() && gog.project_pi(&ball.points[j]) == locus)
                .min_by_key(|&j| (dist[j], j)),
            LiftStrategy::ConstantSyllable => ball.index_of(&anchor(w)).filter(|&j| dist[j] != UNREACHED),
        }
        .ok_or_else(|| SpaceError::EmptyFiber(gog.format_tree_vertex(w)))?;
        jumps.push(MetricEstimate { value: HalfInt::from_doubled(dist[next] as i64), trust: ball.trusted(cur, next, dist[next]) });
        points.push(ball.points[next].clone());
        cur = next;
    }
    let k = jumps.iter().map(|j| j.value).max_by_key(|h| h.doubled());
    let labels = points.iter().map(|p| gog.format_point(p)).collect();
    Ok(QiLift { strategy, path: path.to_vec(), points, labels, jumps, k })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlareReport {
    pub n: usize,
    pub central: usize,
    pub left: usize,
    pub right: usize,
    pub m_k: usize,
    /// `max(left, right) / central`, when the central separation reaches `m_k`.
    pub lambda: Option<f64>,
    pub skipped: Option<String>,
}

/// Compares two lifts over the same path `α(-n..=n)` in the fiber metrics
/// at the middle and at both ends.
pub fn flare_probe(gog: &GraphOfGroups, l1: &QiLift, l2: &QiLift, m_k: usize, ledger: &mut ConstantsLedger) -> FlareReport {
    assert_eq!(l1.path, l2.path, "lifts must share their path");
    assert!(l1.path.len() % 2 == 1, "path must have odd length 2n+1");
    let n = l1.path.len() / 2;
    let fd = |i: usize| {
        gog.fiber_distance(l1.points[i].as_vertex().unwrap(), l2.points[i].as_vertex().unwrap())
            .expect("lifts over the same vertex share a fiber")
    };
    let (left, central, right) = (fd(0), fd(n), fd(2 * n));
    let mut report = FlareReport { n, central, left, right, m_k, lambda: None, skipped: None };
    if central == 0 || central < m_k {
        report.skipped = Some(format!("central separation {} below M_K = {}", central, m_k));
        return report;
    }
    let lambda = left.max(right) as f64 / central as f64;
    report.lambda = Some(lambda);
    ledger.record("flare_lambda", lambda, Provenance::Measured, "max end separation over central separation");
    ledger.record("flare_M", m_k, Provenance::Measured, "central separation threshold of the probe");
    ledger.record("flare_n", n, Provenance::Measured, "half-length of the probed geodesic");
    report
}
