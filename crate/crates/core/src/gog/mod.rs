//! Graphs of groups with free and finite vertex groups: validation,
//! presentations of the fundamental group, and reduced normal forms.

mod config;
mod graph;
mod group;
mod normal;
mod presentation;

pub use config::{EdgeConfig, GogConfig, GroupConfig, VertexConfig};
pub use graph::{OEdge, OrientedGraph};
pub use group::{GElem, GroupSpec};
pub use normal::ReducedSequence;
pub use presentation::PresentationGenerator;
pub use presentation::{Presentation, PresentationWord};

use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::stallings::{expand_with, SubgroupHandle};
use crate::words::{FiniteGroupTable, FreeGroup, FreeWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GogError {
    #[error("graph structure: {0}")]
    Structure(String),
    #[error("spanning tree: {0}")]
    Tree(String),
    #[error("group `{group}`: {msg}")]
    Group { group: String, msg: String },
    #[error("edge `{edge}` at its {endpoint} end: {msg}")]
    Edge { edge: String, endpoint: String, msg: String },
    #[error("sequence: {0}")]
    Sequence(String),
}

#[derive(Clone, Debug)]
enum Image {
    Trivial,
    Free { sub: SubgroupHandle, images: Vec<FreeWord> },
    /// Finite edge group into a finite vertex group: the full element map and its partial inverse.
    Finite { map: Vec<u32>, pre: Vec<Option<u32>> },
}

/// One end of an edge: the monomorphism from the edge group into the vertex
/// group at the origin of an oriented edge.
#[derive(Clone, Debug)]
pub struct EdgeSide {
    vertex: usize,
    images: Vec<GElem>,
    image: Image,
}

impl EdgeSide {
    pub fn vertex(&self) -> usize {
        self.vertex
    }

    /// Images of the edge-group generators.
    pub fn generator_images(&self) -> &[GElem] {
        &self.images
    }

    /// The image subgroup, when the vertex group is free.
    pub fn subgroup(&self) -> Option<&SubgroupHandle> {
        match &self.image {
            Image::Free { sub, .. } => Some(sub),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self.image, Image::Trivial)
    }
}

/// A validated graph of groups with a chosen base vertex and spanning tree.
#[derive(Clone, Debug)]
pub struct GraphOfGroups {
    config: GogConfig,
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    graph: OrientedGraph,
    vgroups: Vec<GroupSpec>,
    egroups: Vec<GroupSpec>,
    sides: Vec<EdgeSide>,
    tree: Vec<bool>,
    base: usize,
    tree_paths: Vec<Vec<OEdge>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeSideReport {
    pub edge: String,
    pub endpoint: String,
    pub vertex: String,
    pub injective: bool,
    pub image: String,
    pub quasiconvex: String,
    /// Diameter of the core graph of the image, a quasiconvexity witness.
    pub core_diameter: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub name: String,
    pub valid: bool,
    pub base_vertex: String,
    pub spanning_tree: Vec<String>,
    pub checks: Vec<CheckLine>,
    pub edge_maps: Vec<EdgeSideReport>,
}

fn build_group(owner: &str, cfg: &GroupConfig) -> Result<GroupSpec, GogError> {
    let err = |msg: String| GogError::Group { group: owner.to_string(), msg };
    match cfg {
        GroupConfig::Free { generators } => {
            let mut seen = BTreeSet::new();
            for g in generators {
                if g.is_empty() || g == "1" || g.contains(char::is_whitespace) || g.contains('^') {
                    return Err(err(format!("invalid generator name `{g}`")));
                }
                if !seen.insert(g) {
                    return Err(err(format!("duplicate generator `{g}`")));
                }
            }
            Ok(GroupSpec::Free(FreeGroup::new(generators.clone())))
        }
        GroupConfig::Finite { elements, table, generators } => {
            let t = FiniteGroupTable::new(table).map_err(|e| err(e.to_string()))?;
            if elements.len() != t.order() as usize {
                return Err(err(format!("{} element names for a table of order {}", elements.len(), t.order())));
            }
            let mut seen = BTreeSet::new();
            for (i, name) in elements.iter().enumerate() {
                if name.is_empty() || name.contains(char::is_whitespace) || name.contains('^') {
                    return Err(err(format!("invalid element name `{name}`")));
                }
                if name == "1" && i as u32 != t.identity() {
                    return Err(err("the name `1` is reserved for the identity".into()));
                }
                if !seen.insert(name) {
                    return Err(err(format!("duplicate element `{name}`")));
                }
            }
            let gens: Vec<u32> = if generators.is_empty() {
                (0..t.order()).filter(|&i| i != t.identity()).collect()
            } else {
                generators
                    .iter()
                    .map(|g| {
                        elements
                            .iter()
                            .position(|n| n == g)
                            .map(|i| i as u32)
                            .ok_or_else(|| err(format!("generator `{g}` is not an element")))
                    })
                    .collect::<Result<_, _>>()?
            };
            if t.generated(&gens).len() != t.order() as usize {
                return Err(err("declared generators do not generate the group".into()));
            }
            Ok(GroupSpec::Finite { names: elements.clone(), table: t, generators: gens })
        }
    }
}

/// Builds and checks one edge monomorphism.
fn build_side(edge: &str, endpoint: &str, vertex: usize, egroup: &GroupSpec, vgroup: &GroupSpec, words: &[String]) -> Result<EdgeSide, GogError> {
    let err = |msg: String| GogError::Edge { edge: edge.to_string(), endpoint: endpoint.to_string(), msg };
    if words.len() != egroup.generator_count() {
        return Err(err(format!("{} images given for {} edge-group generators", words.len(), egroup.generator_count())));
    }
    let images: Vec<GElem> = words
        .iter()
        .map(|w| vgroup.parse(w).map_err(|e| err(format!("image `{w}`: {e}"))))
        .collect::<Result<_, _>>()?;
    if egroup.is_trivial() {
        return Ok(EdgeSide { vertex, images, image: Image::Trivial });
    }
    match egroup {
        GroupSpec::Free(f) => match vgroup {
            GroupSpec::Finite { .. } => Err(err(format!("a free group of rank {} does not embed in a finite group", f.rank()))),
            GroupSpec::Free(v) => {
                let ws: Vec<FreeWord> = images.iter().map(|g| g.as_free().clone()).collect();
                let sub = SubgroupHandle::fold(v.rank(), &ws);
                if !sub.generators_are_free_basis() {
                    return Err(err(format!(
                        "not injective: rank-{} edge group has image of rank {}",
                        f.rank(),
                        sub.rank()
                    )));
                }
                Ok(EdgeSide { vertex, images, image: Image::Free { sub, images: ws } })
            }
        },
        GroupSpec::Finite { table, generators, .. } => {
            let n = table.order() as usize;
            let mut map: Vec<Option<GElem>> = vec![None; n];
            map[table.identity() as usize] = Some(vgroup.identity());
            let mut q = VecDeque::from([table.identity()]);
            while let Some(x) = q.pop_front() {
                for (k, &s) in generators.iter().enumerate() {
                    let y = table.mul(x, s);
                    let val = vgroup.mul(map[x as usize].as_ref().unwrap(), &images[k]);
                    match &map[y as usize] {
                        Some(prev) if *prev != val => {
                            return Err(err("generator images do not define a homomorphism".into()));
                        }
                        Some(_) => {}
                        None => {
                            map[y as usize] = Some(val);
                            q.push_back(y);
                        }
                    }
                }
            }
            let map: Vec<GElem> = map.into_iter().map(|m| m.expect("generators generate")).collect();
            let kernel = map.iter().filter(|g| vgroup.is_identity(g)).count();
            if kernel > 1 {
                return Err(err(format!("not injective: kernel has order {kernel}")));
            }
            match vgroup {
                GroupSpec::Free(_) => unreachable!("a nontrivial finite group has no injective map to a free group"),
                GroupSpec::Finite { table: vt, .. } => {
                    let map: Vec<u32> = map.iter().map(GElem::as_finite).collect();
                    let mut pre = vec![None; vt.order() as usize];
                    for (a, &g) in map.iter().enumerate() {
                        pre[g as usize] = Some(a as u32);
                    }
                    Ok(EdgeSide { vertex, images, image: Image::Finite { map, pre } })
                }
            }
        }
    }
}

impl GraphOfGroups {
    pub fn from_config(config: &GogConfig) -> Result<Self, GogError> {
        let vertex_names: Vec<String> = config.vertices.iter().map(|v| v.name.clone()).collect();
        let edge_names: Vec<String> = config.edges.iter().map(|e| e.name.clone()).collect();
        let mut global = BTreeSet::new();
        for n in vertex_names.iter().chain(&edge_names) {
            if !global.insert(n.clone()) {
                return Err(GogError::Structure(format!("name `{n}` is used twice")));
            }
        }
        let vgroups: Vec<GroupSpec> =
            config.vertices.iter().map(|v| build_group(&v.name, &v.group)).collect::<Result<_, _>>()?;
        let mut gen_names = BTreeSet::new();
        for g in vgroups.iter().flat_map(|g| g.presentation_generators()) {
            if !gen_names.insert(g.clone()) {
                return Err(GogError::Structure(format!("generator name `{g}` is used by two vertex groups")));
            }
        }
        for e in &edge_names {
            for n in [e.clone(), format!("{e}_bar")] {
                if gen_names.contains(&n) {
                    return Err(GogError::Structure(format!("edge name `{n}` clashes with a vertex generator")));
                }
            }
        }
        let index = |name: &str| -> Result<usize, GogError> {
            vertex_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| GogError::Structure(format!("unknown vertex `{name}`")))
        };
        let mut ends = Vec::new();
        for e in &config.edges {
            ends.push((index(&e.o)?, index(&e.t)?));
        }
        let graph = OrientedGraph::from_pairs(vertex_names.len(), ends)?;
        let base = (0..vertex_names.len()).min_by(|&a, &b| vertex_names[a].cmp(&vertex_names[b])).unwrap();
        let tree = match &config.spanning_tree {
            None => graph.bfs_tree(base),
            Some(names) => {
                let mut flags = vec![false; edge_names.len()];
                for n in names {
                    let i = edge_names
                        .iter()
                        .position(|e| e == n)
                        .ok_or_else(|| GogError::Tree(format!("unknown edge `{n}`")))?;
                    if flags[i] {
                        return Err(GogError::Tree(format!("edge `{n}` listed twice")));
                    }
                    flags[i] = true;
                }
                flags
            }
        };
        graph.check_tree(&tree)?;
        let mut egroups = Vec::new();
        let mut sides = Vec::new();
        for (i, e) in config.edges.iter().enumerate() {
            let eg = build_group(&e.name, &e.group)?;
            let (o, t) = (graph.o(OEdge::positive(i)), graph.t(OEdge::positive(i)));
            sides.push(build_side(&e.name, "origin", o, &eg, &vgroups[o], &e.o_images)?);
            sides.push(build_side(&e.name, "terminus", t, &eg, &vgroups[t], &e.t_images)?);
            egroups.push(eg);
        }
        let tree_paths = graph.tree_paths(base, &tree);
        Ok(GraphOfGroups {
            config: config.clone(),
            vertex_names,
            edge_names,
            graph,
            vgroups,
            egroups,
            sides,
            tree,
            base,
            tree_paths,
        })
    }

    pub fn bundled(name: &str) -> Option<Self> {
        GogConfig::bundled(name).map(|c| Self::from_config(&c).expect("bundled configs are valid"))
    }

    pub fn config(&self) -> &GogConfig {
        &self.config
    }

    pub fn name(&self) -> &str {
        &self.config.name
    }

    pub fn graph(&self) -> &OrientedGraph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    pub fn edge_name(&self, e: OEdge) -> String {
        if e.is_positive() {
            self.edge_names[e.index()].clone()
        } else {
            format!("{}_bar", self.edge_names[e.index()])
        }
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edge_names.iter().position(|n| n == name)
    }

    /// The base vertex: the least vertex name.
    pub fn base(&self) -> usize {
        self.base
    }

    pub fn vgroup(&self, v: usize) -> &GroupSpec {
        &self.vgroups[v]
    }

    pub fn egroup(&self, e: OEdge) -> &GroupSpec {
        &self.egroups[e.index()]
    }

    pub fn o(&self, e: OEdge) -> usize {
        self.graph.o(e)
    }

    pub fn t(&self, e: OEdge) -> usize {
        self.graph.t(e)
    }

    /// The monomorphism at the origin of `e`.
    pub fn side(&self, e: OEdge) -> &EdgeSide {
        &self.sides[e.0 as usize]
    }

    pub fn is_tree_edge(&self, e: OEdge) -> bool {
        self.tree[e.index()]
    }

    pub fn tree_edges(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&i| self.tree[i]).collect()
    }

    /// Oriented tree path from the base vertex to `v`.
    pub fn tree_path(&self, v: usize) -> &[OEdge] {
        &self.tree_paths[v]
    }

    /// `φ_{e,o(e)}(a)`.
    pub fn phi_o(&self, e: OEdge, a: &GElem) -> GElem {
        self.apply(e, a)
    }

    /// `φ_{e,t(e)}(a)`.
    pub fn phi_t(&self, e: OEdge, a: &GElem) -> GElem {
        self.apply(e.bar(), a)
    }

    fn apply(&self, e: OEdge, a: &GElem) -> GElem {
        let side = self.side(e);
        let vg = &self.vgroups[side.vertex];
        match &side.image {
            Image::Trivial => vg.identity(),
            Image::Free { images, .. } => GElem::Free(expand_with(images, a.as_free())),
            Image::Finite { map, .. } => GElem::Finite(map[a.as_finite() as usize]),
        }
    }

    /// Preimage under `φ_{e,o(e)}`, if `g` lies in the image.
    pub fn preimage_o(&self, e: OEdge, g: &GElem) -> Option<GElem> {
        let side = self.side(e);
        let vg = &self.vgroups[side.vertex];
        let eg = self.egroup(e);
        match &side.image {
            Image::Trivial => vg.is_identity(g).then(|| eg.identity()),
            Image::Free { sub, .. } => sub.express_in_generators(g.as_free()).map(GElem::Free),
            Image::Finite { pre, .. } => pre[g.as_finite() as usize].map(GElem::Finite),
        }
    }

    /// Splits `g = r·φ_{e,o(e)}(a)` with `r` the shortlex-least element of its
    /// left coset of the image.
    pub fn split_o(&self, e: OEdge, g: &GElem) -> (GElem, GElem) {
        let side = self.side(e);
        let vg = &self.vgroups[side.vertex];
        let eg = self.egroup(e);
        match &side.image {
            Image::Trivial => (g.clone(), eg.identity()),
            Image::Free { sub, .. } => {
                let (r, h) = sub.left_coset_rep(g.as_free());
                let a = sub.express_in_generators(&h).expect("remainder lies in the image");
                (GElem::Free(r), GElem::Free(a))
            }
            Image::Finite { map, .. } => {
                let mut best: Option<(GElem, GElem)> = None;
                for a in 0..map.len() as u32 {
                    let ga = GElem::Finite(a);
                    let r = vg.mul(g, &vg.inv(&self.apply(e, &ga)));
                    let better = match &best {
                        None => true,
                        Some((b, _)) => vg.cmp(&r, b).is_lt(),
                    };
                    if better {
                        best = Some((r, ga));
                    }
                }
                best.unwrap()
            }
        }
    }

    /// Shortlex-least representatives of the left cosets of `Im φ_{e,o(e)}`
    /// having length at most `l`, sorted, plus a flag set when longer ones exist.
    pub fn transversal(&self, e: OEdge, l: usize) -> (Vec<GElem>, bool) {
        let side = self.side(e);
        let vg = &self.vgroups[side.vertex];
        match (&side.image, vg) {
            (Image::Free { sub, .. }, _) => {
                let (reps, truncated) = sub.left_cosets(l);
                (reps.into_iter().map(GElem::Free).collect(), truncated)
            }
            (Image::Trivial, GroupSpec::Free(f)) => {
                let mut reps = FreeWord::ball(f.rank(), l);
                reps.sort();
                (reps.into_iter().map(GElem::Free).collect(), f.rank() > 0)
            }
            (_, GroupSpec::Finite { table, .. }) => {
                let mut reps: Vec<GElem> = (0..table.order()).map(|g| self.split_o(e, &GElem::Finite(g)).0).collect();
                reps.sort_by(|x, y| vg.cmp(x, y));
                reps.dedup();
                let all = reps.len();
                reps.retain(|r| vg.len(r) <= l);
                let truncated = reps.len() < all;
                (reps, truncated)
            }
            (Image::Finite { .. }, GroupSpec::Free(_)) => unreachable!("finite images live in finite groups"),
        }
    }

    pub fn validation_report(&self) -> ValidationReport {
        let mut checks = vec![
            CheckLine {
                check: "oriented graph".into(),
                passed: true,
                detail: format!(
                    "{} vertices, {} edges; bar is a fixed-point-free involution swapping origin and terminus; connected",
                    self.vertex_count(),
                    self.graph.edge_count()
                ),
            },
            CheckLine {
                check: "edge groups".into(),
                passed: true,
                detail: "each edge and its bar share one edge group; the map at the terminus of e is the map at the origin of its bar".into(),
            },
            CheckLine {
                check: "spanning tree".into(),
                passed: true,
                detail: format!("{} tree edges, acyclic and spanning", self.tree_edges().len()),
            },
        ];
        let mut edge_maps = Vec::new();
        for e in self.graph.oriented_edges() {
            let side = self.side(e);
            let (image, qc, diam) = match &side.image {
                Image::Trivial => ("trivial".to_string(), "trivial image".to_string(), None),
                Image::Free { sub, .. } => (
                    format!("free of rank {}", sub.rank()),
                    "finitely generated subgroup of a free group, hence quasiconvex".to_string(),
                    Some(sub.core().diameter()),
                ),
                Image::Finite { map, .. } => {
                    (format!("finite of order {}", map.len()), "finite image".to_string(), None)
                }
            };
            edge_maps.push(EdgeSideReport {
                edge: self.edge_names[e.index()].clone(),
                endpoint: if e.is_positive() { "origin".into() } else { "terminus".into() },
                vertex: self.vertex_names[side.vertex].clone(),
                injective: true,
                image,
                quasiconvex: qc,
                core_diameter: diam,
            });
        }
        checks.push(CheckLine {
            check: "edge maps injective".into(),
            passed: true,
            detail: format!("{} edge maps checked", edge_maps.len()),
        });
        checks.push(CheckLine {
            check: "edge images quasi-isometrically embedded".into(),
            passed: true,
            detail: "vertex groups are free or finite, so finitely generated images are quasiconvex".into(),
        });
        ValidationReport {
            name: self.name().to_string(),
            valid: true,
            base_vertex: self.vertex_names[self.base].clone(),
            spanning_tree: self.tree_edges().iter().map(|&i| self.edge_names[i].clone()).collect(),
            checks,
            edge_maps,
        }
    }

    /// Graph of groups obtained by gluing a new free vertex along `basis`
    /// (words in the free group at `v`), with the new edge put in the tree.
    pub fn attach_free_vertex(&self, v: usize, basis: &[FreeWord], vertex: &str, edge: &str) -> Result<Self, GogError> {
        let vg = &self.vgroups[v];
        let GroupSpec::Free(_) = vg else {
            return Err(GogError::Group { group: self.vertex_names[v].clone(), msg: "not a free group".into() });
        };
        let mut cfg = self.config.clone();
        let names: Vec<String> = (0..basis.len()).map(|i| format!("{vertex}{}", i + 1)).collect();
        let egen: Vec<String> = (0..basis.len()).map(|i| format!("{edge}{}", i + 1)).collect();
        cfg.vertices.push(VertexConfig { name: vertex.to_string(), group: GroupConfig::Free { generators: names.clone() } });
        cfg.edges.push(EdgeConfig {
            name: edge.to_string(),
            o: self.vertex_names[v].clone(),
            t: vertex.to_string(),
            group: GroupConfig::Free { generators: egen },
            o_images: basis.iter().map(|w| vg.format(&GElem::Free(w.clone()))).collect(),
            t_images: names,
        });
        let mut tree: Vec<String> = self.tree_edges().iter().map(|&i| self.edge_names[i].clone()).collect();
        tree.push(edge.to_string());
        cfg.spanning_tree = Some(tree);
        cfg.name = format!("{}+{}", self.config.name, vertex);
        Self::from_config(&cfg)
    }
}
