use std::collections::{HashMap, HashSet};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bass_serre::{ConstantsLedger, Provenance};
use crate::gog::GraphOfGroups;
use crate::space::{SpaceBall, UNREACHED};
use crate::words::HalfInt;

use super::{additive_gap, fit_lipschitz, Ladder};

#[derive(Clone, Debug, Serialize)]
pub struct RetractionSample {
    pub x: String,
    pub y: String,
    pub d: HalfInt,
    pub d_image: HalfInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct RetractionReport {
    pub seed: u64,
    pub requested: usize,
    pub samples: Vec<RetractionSample>,
    pub skipped_untrusted: usize,
    /// Exact fitted constants as reduced fractions.
    pub a: String,
    pub b: String,
    pub a_value: f64,
    pub b_value: f64,
    /// `max(d_image - A·d)` before clamping `B` at zero.
    pub max_violation: f64,
    pub replay_ok: bool,
}

fn ratio_str(r: &Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn to_f64(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn half(h: HalfInt) -> Rational64 {
    Rational64::new(h.doubled(), 2)
}

impl RetractionReport {
    pub fn constants(&self) -> Option<(Rational64, Rational64)> {
        let parse = |s: &str| -> Option<Rational64> {
            match s.split_once('/') {
                Some((n, d)) => Some(Rational64::new(n.parse().ok()?, d.parse().ok()?)),
                None => Some(Rational64::from_integer(s.parse().ok()?)),
            }
        };
        Some((parse(&self.a)?, parse(&self.b)?))
    }

    /// Re-checks every stored sample against the stored constants.
    pub fn replay(&self) -> bool {
        let Some((a, b)) = self.constants() else { return self.samples.is_empty() };
        self.samples.iter().all(|s| half(s.d_image) <= a * half(s.d) + b)
    }
}

/// Samples vertex-point pairs at ball distance at most `max_sep` and fits
/// `d(P(x),P(y)) <= A·d(x,y) + B` over those whose distances are trusted.
pub fn measure_retraction(
    gog: &GraphOfGroups,
    ladder: &Ladder,
    ball: &SpaceBall,
    samples: usize,
    seed: u64,
    max_sep: usize,
) -> RetractionReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertex: Vec<usize> = (0..ball.len()).filter(|&i| ball.points[i].is_vertex()).collect();
    let mut image_dist: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut retracted: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::new();
    let mut skipped = 0;
    let mut p_of = |i: usize| -> Option<usize> {
        if let Some(&j) = retracted.get(&i) {
            return Some(j);
        }
        let j = ball.index_of(&ladder.retract(gog, &ball.points[i]))?;
        retracted.insert(i, j);
        Some(j)
    };
    for _ in 0..samples {
        let i = vertex[rng.gen_range(0..vertex.len())];
        let near = ball.dijkstra(&[i], 2 * max_sep as u32);
        let cands: Vec<usize> = vertex.iter().copied().filter(|&j| near[j] != UNREACHED).collect();
        let j = cands[rng.gen_range(0..cands.len())];
        let (Some(pi), Some(pj)) = (p_of(i), p_of(j)) else {
            skipped += 1;
            continue;
        };
        let dij = near[j];
        let dist = image_dist.entry(pi).or_insert_with(|| ball.dijkstra(&[pi], UNREACHED));
        let dp = dist[pj];
        if !ball.trusted(i, j, dij) || dp == UNREACHED || !ball.trusted(pi, pj, dp) {
            skipped += 1;
            continue;
        }
        out.push(RetractionSample {
            x: gog.format_point(&ball.points[i]),
            y: gog.format_point(&ball.points[j]),
            d: HalfInt::from_doubled(dij as i64),
            d_image: HalfInt::from_doubled(dp as i64),
        });
    }
    let pairs: Vec<(Rational64, Rational64)> = out.iter().map(|s| (half(s.d), half(s.d_image))).collect();
    let (a, b) = fit_lipschitz(&pairs).unwrap_or((Rational64::from_integer(1), Rational64::from_integer(0)));
    let violation = additive_gap(&pairs, &a).unwrap_or_default();
    let mut report = RetractionReport {
        seed,
        requested: samples,
        samples: out,
        skipped_untrusted: skipped,
        a: ratio_str(&a),
        b: ratio_str(&b),
        a_value: to_f64(&a),
        b_value: to_f64(&b),
        max_violation: to_f64(&violation),
        replay_ok: false,
    };
    report.replay_ok = report.replay();
    report
}

#[derive(Clone, Debug, Serialize)]
pub struct QuasiconvexityReport {
    pub seed: u64,
    pub pairs: usize,
    pub skipped_untrusted: usize,
    pub c_measured: HalfInt,
}

/// Samples pairs in `B(λ)`, follows a ball geodesic between them and
/// records how far it strays from `B(λ)`.
pub fn measure_quasiconvexity(
    ladder: &Ladder,
    ball: &SpaceBall,
    samples: usize,
    seed: u64,
    ledger: &mut ConstantsLedger,
) -> QuasiconvexityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members: Vec<usize> = ladder.points().iter().filter_map(|p| ball.index_of(p)).collect();
    let member_set: HashSet<usize> = members.iter().copied().collect();
    let to_b = ball.dijkstra(&members, UNREACHED);
    let mut c = 0u32;
    let mut pairs = 0;
    let mut skipped = 0;
    for _ in 0..samples {
        let p = members[rng.gen_range(0..members.len())];
        let q = members[rng.gen_range(0..members.len())];
        let (dist, parent) = shortest_path_tree(ball, p);
        if !ball.trusted(p, q, dist[q]) {
            skipped += 1;
            continue;
        }
        pairs += 1;
        let mut cur = q;
        loop {
            if !member_set.contains(&cur) && to_b[cur] <= ball.exit[cur].saturating_add(2) {
                c = c.max(to_b[cur]);
            }
            if cur == p {
                break;
            }
            cur = parent[cur];
        }
    }
    let c_measured = HalfInt::from_doubled(c as i64);
    ledger.record("C_measured", c_measured.to_f64(), Provenance::Measured, "max distance from ladder-geodesics to the ladder");
    QuasiconvexityReport { seed, pairs, skipped_untrusted: skipped, c_measured }
}

/// Dijkstra from `s` with parents; the parent is fixed by the first strict improvement.
fn shortest_path_tree(ball: &SpaceBall, s: usize) -> (Vec<u32>, Vec<usize>) {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut dist = vec![UNREACHED; ball.len()];
    let mut parent = vec![usize::MAX; ball.len()];
    let mut heap = BinaryHeap::new();
    dist[s] = 0;
    parent[s] = s;
    heap.push(Reverse((0u32, s)));
    while let Some(Reverse((d, i))) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, w) in &ball.adj[i] {
            if d + w < dist[j] {
                dist[j] = d + w;
                parent[j] = i;
                heap.push(Reverse((d + w, j)));
            }
        }
    }
    (dist, parent)
}
