use std::path::Path;

use gogtk::bass_serre::{ConstantsLedger, Provenance, TreeBall, TreeVertex};
use gogtk::gog::{GElem, GogConfig, GraphOfGroups};
use gogtk::ladder::{measure_quasiconvexity, measure_retraction, Ladder, LadderParams, Segment};
use gogtk::limit::{
    attach_subgroup, check_attached_stabilizers, defect_csv, extract_witnesses, intersection_defect, limit_proxy, probe_obstruction,
    probe_rays, redundant_generators, LimitError,
};
use gogtk::space::{flare_probe, qi_lift, LiftStrategy, SpaceBall, SpacePoint};
use gogtk::{FreeWord, HalfInt, SubgroupHandle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{Command, Options};
use crate::report::CliError;

pub struct Loaded {
    pub gog: GraphOfGroups,
    pub config: GogConfig,
}

pub fn load(spec: Option<&str>) -> Result<Loaded, CliError> {
    let spec = spec.ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let config = if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io { path: spec.into(), msg: e.to_string() })?;
        GogConfig::from_json(&text).map_err(|e| CliError::Parse(e.to_string()))?
    } else if let Some(c) = GogConfig::bundled(spec) {
        c
    } else {
        return Err(CliError::Io { path: spec.into(), msg: "no such file or bundled example".into() });
    };
    let gog = GraphOfGroups::from_config(&config)?;
    Ok(Loaded { gog, config })
}

/// Parameters after defaults, with the ledger that records where each came from.
pub struct Run {
    pub params: Value,
    pub ledger: ConstantsLedger,
    pub result: Value,
    pub artifacts: Vec<(String, String)>,
}

struct Ctx<'a> {
    gog: &'a GraphOfGroups,
    opts: &'a Options,
    ledger: ConstantsLedger,
    params: serde_json::Map<String, Value>,
    artifacts: Vec<(String, String)>,
}

impl Ctx<'_> {
    fn configured<T: serde::Serialize + Copy>(&mut self, name: &str, given: Option<T>, default: T, note: &str) -> T {
        let v = given.unwrap_or(default);
        self.params.insert(name.to_string(), json!(v));
        let note = if given.is_some() { note.to_string() } else { format!("{note} (default)") };
        self.ledger.record(name, v, Provenance::Configured, &note);
        v
    }

    fn seed(&mut self) -> u64 {
        self.configured("seed", self.opts.seed, 0, "seed for sampled measurements")
    }

    fn d0(&mut self) -> HalfInt {
        match self.opts.d0 {
            Some(d) => self.configured("D0", Some(d), d, "orbit-map constant"),
            None => {
                let d = self.gog.compute_d0();
                self.params.insert("D0".into(), json!(d));
                self.ledger.record("D0", d, Provenance::Computed, "max over vertex types of the X-distance from x0 to the vertex-space identity");
                d
            }
        }
    }

    fn d1(&mut self, d0: HalfInt) -> HalfInt {
        self.configured("D1", self.opts.d1, d0 + d0, "ladder admission diameter, default 2·D0")
    }

    fn d_config(&mut self, d0: HalfInt) -> HalfInt {
        self.configured("D_config", self.opts.dconfig, HalfInt::ONE + HalfInt::ONE + d0 + d0, "fellow-traveling threshold, default 2·(1 + D0)")
    }

    fn artifact(&mut self, name: String, contents: String) {
        self.artifacts.push((name, contents));
    }
}

fn free_base(gog: &GraphOfGroups) -> Result<usize, CliError> {
    let v = gog.base();
    if !gog.vgroup(v).is_free() {
        return Err(LimitError::NotFree(gog.vertex_name(v).to_string()).into());
    }
    Ok(v)
}

/// The base vertex and its neighbor across the first incident edge.
fn adjacent_base(gog: &GraphOfGroups) -> Result<(TreeVertex, TreeVertex), CliError> {
    let v = free_base(gog)?;
    let w = gog.base_tree_vertex(v);
    let edges = gog.incident_edges(&w, 0).edges;
    let pick = edges.iter().find(|i| gog.vgroup(i.opposite.ty).is_free()).or(edges.first());
    let inc = pick.ok_or_else(|| CliError::Usage("base vertex has no edges".into()))?;
    Ok((w, inc.opposite.clone()))
}

/// The image of the first edge at the base, or the first generator when it is trivial.
fn default_segment_word(gog: &GraphOfGroups) -> GElem {
    let v = gog.base();
    let vg = gog.vgroup(v);
    gog.graph()
        .out_edges(v)
        .into_iter()
        .flat_map(|e| gog.side(e).generator_images().to_vec())
        .find(|g| !vg.is_identity(g))
        .unwrap_or_else(|| if vg.generator_count() > 0 { vg.generator(0) } else { vg.identity() })
}

pub fn run(command: Command, loaded: &Loaded, opts: &Options) -> Result<Run, CliError> {
    let gog = &loaded.gog;
    let mut cx = Ctx { gog, opts, ledger: ConstantsLedger::for_gog(gog), params: serde_json::Map::new(), artifacts: Vec::new() };
    let result = match command {
        Command::Validate => json!(gog.validation_report()),
        Command::Presentation => presentation(&mut cx),
        Command::Tree => tree(&mut cx),
        Command::Space => space(&mut cx),
        Command::Ladder => ladder(&mut cx)?,
        Command::Flare => flare(&mut cx)?,
        Command::Limitset => limitset(&mut cx)?,
        Command::Witness => witness(&mut cx)?,
        Command::Attach => attach(&mut cx)?,
    };
    Ok(Run { params: Value::Object(cx.params), ledger: cx.ledger, result, artifacts: cx.artifacts })
}

fn presentation(cx: &mut Ctx) -> Value {
    let p = cx.gog.fundamental_presentation();
    cx.ledger.record("relators", cx.gog.expected_relator_count(), Provenance::Computed, "relators over all four families");
    json!({ "presentation": p.to_json(), "text": p.to_text() })
}

fn tree(cx: &mut Ctx) -> Value {
    let radius = cx.configured("radius", cx.opts.radius, 3, "tree ball radius");
    let budget = cx.configured("budget", cx.opts.budget, 6, "cumulative coset budget");
    let center = cx.gog.base_tree_vertex(cx.gog.base());
    let ball = TreeBall::build(cx.gog, &center, radius, budget);
    let stats = ball.stats(cx.gog);
    cx.ledger.record("tree_vertices", stats.vertices, Provenance::Measured, "vertices in the tree ball");
    if cx.opts.dot {
        cx.artifact("tree.dot".into(), ball.to_dot(cx.gog));
    }
    json!({ "stats": stats })
}

fn space(cx: &mut Ctx) -> Value {
    let radius = cx.configured("radius", cx.opts.radius, 2, "tree radius of the space ball");
    let budget = cx.configured("budget", cx.opts.budget, 6, "word budget of the space ball");
    let d0 = cx.d0();
    let ball = SpaceBall::build(cx.gog, &cx.gog.x0(), radius, budget);
    let stats = ball.stats(cx.gog);
    cx.ledger.record("space_points", ball.len(), Provenance::Measured, "points in the space ball");
    let profile = ball.embedding_profile(cx.gog, 0, 2 * budget as u32);
    if cx.opts.dot {
        cx.artifact("space.dot".into(), ball.to_dot(cx.gog));
    }
    if cx.opts.csv {
        let mut s = String::from("fiber_distance,ball_distance\n");
        for (m, d) in profile.iter().enumerate() {
            s.push_str(&format!("{m},{}\n", d.map_or(String::new(), |d| d.to_string())));
        }
        cx.artifact("space_profile.csv".into(), s);
    }
    json!({ "stats": stats, "D0": d0, "D0_contributions": cx.gog.d0_contributions(), "center_fiber_profile": profile })
}

fn ladder(cx: &mut Ctx) -> Result<Value, CliError> {
    let radius = cx.configured("radius", cx.opts.radius, 2, "tree radius of the space ball");
    let budget = cx.configured("budget", cx.opts.budget, 6, "word budget of the space ball");
    let depth = cx.configured("depth", cx.opts.depth, 2, "ladder depth");
    let seed = cx.seed();
    let d0 = cx.d0();
    let d1 = cx.d1(d0);
    let gog = cx.gog;
    let v = gog.base();
    let vg = gog.vgroup(v);
    let end = default_segment_word(gog);
    let lambda = Segment::new(gog, gog.base_tree_vertex(v), vg.identity(), end.clone());
    let ball = SpaceBall::build(gog, &gog.x0(), radius, budget);
    let params = LadderParams { d0, d1, depth };
    let ladder = Ladder::build(gog, lambda, params, Some(&ball));
    let again = Ladder::build(gog, Segment::new(gog, gog.base_tree_vertex(v), vg.identity(), end.clone()), params, Some(&ball));
    let deterministic = ladder.to_json(gog) == again.to_json(gog);
    let retraction = measure_retraction(gog, &ladder, &ball, 200, seed, 4);
    if retraction.constants().is_some() {
        cx.ledger.record("A", retraction.a_value, Provenance::Measured, "fitted Lipschitz slope of the retraction");
        cx.ledger.record("B", retraction.b_value, Provenance::Measured, "fitted additive constant of the retraction");
    }
    let qc = measure_quasiconvexity(&ladder, &ball, 100, seed, &mut cx.ledger);
    let identity_on_ladder = ladder.points().iter().all(|p| &ladder.retract(gog, p) == p);
    if cx.opts.csv {
        let mut s = String::from("x,y,d,d_image\n");
        for r in &retraction.samples {
            s.push_str(&format!("\"{}\",\"{}\",{},{}\n", r.x, r.y, r.d.to_f64(), r.d_image.to_f64()));
        }
        cx.artifact("retraction.csv".into(), s);
    }
    Ok(json!({
        "segment_end": vg.format(&end),
        "ladder": ladder.to_json(gog),
        "deterministic": deterministic,
        "identity_on_ladder": identity_on_ladder,
        "retraction": retraction,
        "quasiconvexity": qc,
    }))
}

fn flare(cx: &mut Ctx) -> Result<Value, CliError> {
    let n = cx.configured("radius", cx.opts.radius, 1, "half-length of the probed geodesic");
    let budget = cx.configured("budget", cx.opts.budget, 6, "word budget of the space ball");
    let mk = cx.configured("M_K", cx.opts.mk, 1, "central separation threshold");
    let seed = cx.seed();
    let gog = cx.gog;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = gog.base();
    let path = (0..500)
        .find_map(|_| {
            let s = gog.tree_vertex(&gog.random_path(&mut rng, base, n, 2));
            let t = gog.tree_vertex(&gog.random_path(&mut rng, base, n, 2));
            let p = gog.tree_geodesic(&s, &t);
            (p.len() == 2 * n + 1).then_some(p)
        })
        .ok_or_else(|| CliError::Usage(format!("no tree geodesic of length {} found from the base", 2 * n)))?;
    let ball = SpaceBall::build(gog, &gog.x0(), n, budget);
    let first = &path[0];
    let vg = gog.vgroup(first.ty);
    let step = gog.normalize(&gog.concat_raw(&gog.inverse(&first.rep), &path[1].rep));
    let hi = vg.inv(&step.head);
    let shift = gog
        .side(step.steps[0].0)
        .generator_images()
        .iter()
        .map(|c| vg.mul(&vg.mul(&step.head, c), &hi))
        .find(|g| !vg.is_identity(g))
        .unwrap_or_else(|| if vg.generator_count() > 0 { vg.generator(0) } else { vg.identity() });
    let mut q = first.rep.clone();
    for _ in 0..8 {
        if vg.len(q.trailing()) >= mk {
            break;
        }
        *q.trailing_mut() = vg.mul(q.trailing(), &shift);
    }
    let start = SpacePoint::Vertex(q);
    let l1 = qi_lift(gog, &ball, &path, LiftStrategy::Nearest, None)?;
    let l2 = qi_lift(gog, &ball, &path, LiftStrategy::Nearest, Some(&start))?;
    let report = flare_probe(gog, &l1, &l2, mk, &mut cx.ledger);
    Ok(json!({
        "path": path.iter().map(|w| gog.format_tree_vertex(w)).collect::<Vec<_>>(),
        "lifts": [l1, l2],
        "probe": report,
    }))
}

fn limitset(cx: &mut Ctx) -> Result<Value, CliError> {
    let d0 = cx.d0();
    let d = cx.d_config(d0);
    let gog = cx.gog;
    let radii: Vec<usize> = match cx.opts.radius {
        Some(r) => vec![r],
        None => vec![4, 6, 8, 10],
    };
    cx.params.insert("radii".into(), json!(radii));
    let rays: Vec<Value> = probe_rays(gog, 12)
        .iter()
        .map(|(r, e)| {
            let p = probe_obstruction(gog, r, e)?;
            Ok(json!({ "ray": r.format(gog), "edge": gog.edge_name(e.e), "flowable": p.flowable, "obstruction_r6": p.short, "obstruction_r10": p.long, "criterion_agrees": p.agrees() }))
        })
        .collect::<Result<_, LimitError>>()?;
    let (w1, w2) = adjacent_base(gog)?;
    let ps = gog.path_stabilizer(&w1, &w2);
    let mut proxy = None;
    if let Some(i) = ps.subgroup.as_free() {
        if !i.is_trivial() {
            let p = limit_proxy(i, radii[0]);
            let vg = gog.vgroup(w1.ty);
            proxy = Some(json!({
                "radius": p.radius,
                "size": p.points.len(),
                "sample": p.points.iter().take(8).map(|w| vg.format(&GElem::Free(w.clone()))).collect::<Vec<_>>(),
            }));
        }
    }
    let reports = radii.iter().map(|&r| intersection_defect(gog, &w1, &w2, r, d)).collect::<Result<Vec<_>, _>>()?;
    if let Some(m) = reports.iter().filter_map(|r| r.max_defect).max() {
        cx.ledger.record("max_defect", m, Provenance::Measured, "largest intersection defect over the radii");
    }
    if cx.opts.csv {
        cx.artifact("defect.csv".into(), defect_csv(&reports));
    }
    Ok(json!({
        "w1": gog.format_tree_vertex(&w1),
        "w2": gog.format_tree_vertex(&w2),
        "rays": rays,
        "intersection_proxy": proxy,
        "defect": reports,
    }))
}

fn witness(cx: &mut Ctx) -> Result<Value, CliError> {
    let n = cx.configured("radius", cx.opts.radius, 12, "length of the aligned sequence");
    let d0 = cx.d0();
    let d = cx.d_config(d0);
    let (w1, w2) = adjacent_base(cx.gog)?;
    let rep = extract_witnesses(cx.gog, &w1, &w2, n, d.doubled().max(0) as u32)?;
    cx.ledger.record("bucket_size", rep.bucket.len(), Provenance::Measured, "size of the largest label bucket");
    Ok(json!({
        "w1": cx.gog.format_tree_vertex(&w1),
        "w2": cx.gog.format_tree_vertex(&w2),
        "all_verified": rep.all_verified(),
        "report": rep,
    }))
}

fn attach(cx: &mut Ctx) -> Result<Value, CliError> {
    let seed = cx.seed();
    let gog = cx.gog;
    let v = free_base(gog)?;
    let vg = gog.vgroup(v);
    let words: Vec<FreeWord> = match &cx.opts.subgroup {
        Some(s) => s
            .split(',')
            .map(|w| vg.parse(w.trim()).map(|g| g.as_free().clone()).map_err(|e| CliError::Usage(format!("--subgroup: {e}"))))
            .collect::<Result<_, _>>()?,
        None => vec![default_segment_word(gog).as_free().clone()],
    };
    cx.params.insert("subgroup".into(), json!(words.iter().map(|w| vg.format(&GElem::Free(w.clone()))).collect::<Vec<_>>()));
    let k = SubgroupHandle::fold(vg.free_rank().unwrap(), &words);
    let y1 = attach_subgroup(gog, v, &k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut conjugators = vec![FreeWord::identity()];
    while conjugators.len() < 4 {
        let len = rng.gen_range(1..=3);
        let h = gog.random_vertex_element(&mut rng, v, len).as_free().clone();
        if !conjugators.contains(&h) {
            conjugators.push(h);
        }
    }
    let checks = check_attached_stabilizers(&y1, v, &k, &conjugators)?;
    let agree = checks.iter().filter(|c| c.agrees).count();
    cx.ledger.record("stabilizer_checks", checks.len(), Provenance::Measured, "sampled vertex pairs compared with folded intersections");
    cx.artifact("attached.json".into(), y1.config().to_json() + "\n");
    Ok(json!({
        "attached_vertex": y1.vertex_name(y1.vertex_count() - 1),
        "validation": y1.validation_report(),
        "redundant_generators": redundant_generators(&y1, v, &k),
        "checks": checks,
        "agreeing": agree,
        "config": serde_json::from_str::<Value>(&y1.config().to_json()).expect("config is JSON"),
    }))
}
