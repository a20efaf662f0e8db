use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use super::{GElem, GraphOfGroups, GroupSpec, OEdge, ReducedSequence};
use crate::words::Letter;

/// A word in presentation generators: `(generator index, exponent)` runs.
pub type PresentationWord = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PresentationGenerator {
    Vertex { vertex: usize, element: GElem },
    Edge(OEdge),
}

/// Generators and relators of the fundamental group, grouped in four
/// families: vertex relators, `ē e`, tree edges, and edge-group relations.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub kinds: Vec<PresentationGenerator>,
    pub relators: Vec<(u8, PresentationWord)>,
}

impl Presentation {
    pub fn family_count(&self, family: u8) -> usize {
        self.relators.iter().filter(|r| r.0 == family).count()
    }

    pub fn format_word(&self, w: &PresentationWord) -> String {
        if w.is_empty() {
            return "1".into();
        }
        w.iter()
            .map(|&(g, k)| if k == 1 { self.generators[g].clone() } else { format!("{}^{}", self.generators[g], k) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "generators: {}", self.generators.join(", "));
        for (fam, w) in &self.relators {
            let _ = writeln!(s, "[{fam}] {}", self.format_word(w));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "generators": self.generators,
            "relators": self.relators.iter().map(|(f, w)| json!({"family": f, "word": self.format_word(w)})).collect::<Vec<_>>(),
            "counts": {
                "vertex": self.family_count(1),
                "bar": self.family_count(2),
                "tree": self.family_count(3),
                "edge": self.family_count(4),
            }
        })
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
}

fn push_run(w: &mut PresentationWord, g: usize, k: i64) {
    if let Some(last) = w.last_mut() {
        if last.0 == g {
            last.1 += k;
            if last.1 == 0 {
                w.pop();
            }
            return;
        }
    }
    if k != 0 {
        w.push((g, k));
    }
}

fn invert(w: &PresentationWord) -> PresentationWord {
    w.iter().rev().map(|&(g, k)| (g, -k)).collect()
}

impl GraphOfGroups {
    fn vertex_generator_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::new();
        let mut acc = 0;
        for v in 0..self.vertex_count() {
            offs.push(acc);
            acc += self.vgroup(v).presentation_generators().len();
        }
        offs.push(acc);
        offs
    }

    /// Presentation word for a vertex-group element.
    fn element_word(&self, v: usize, g: &GElem, offs: &[usize]) -> PresentationWord {
        let mut w = Vec::new();
        match (self.vgroup(v), g) {
            (GroupSpec::Free(_), GElem::Free(x)) => {
                for l in x.letters() {
                    push_run(&mut w, offs[v] + l.generator() as usize, l.sign() as i64);
                }
            }
            (GroupSpec::Finite { table, .. }, GElem::Finite(i)) => {
                if *i != table.identity() {
                    let pos = (0..table.order()).filter(|&j| j != table.identity()).position(|j| j == *i).unwrap();
                    w.push((offs[v] + pos, 1));
                }
            }
            _ => unreachable!(),
        }
        w
    }

    pub fn fundamental_presentation(&self) -> Presentation {
        let offs = self.vertex_generator_offsets();
        let mut generators = Vec::new();
        let mut kinds = Vec::new();
        for v in 0..self.vertex_count() {
            let vg = self.vgroup(v);
            generators.extend(vg.presentation_generators());
            match vg {
                GroupSpec::Free(f) => {
                    kinds.extend((0..f.rank()).map(|g| PresentationGenerator::Vertex {
                        vertex: v,
                        element: GElem::Free(crate::words::FreeWord::letter(Letter::pos(g))),
                    }));
                }
                GroupSpec::Finite { table, .. } => {
                    kinds.extend(
                        (0..table.order())
                            .filter(|&j| j != table.identity())
                            .map(|j| PresentationGenerator::Vertex { vertex: v, element: GElem::Finite(j) }),
                    );
                }
            }
        }
        let edge_off = generators.len();
        for e in self.graph().oriented_edges() {
            generators.push(self.edge_name(e));
            kinds.push(PresentationGenerator::Edge(e));
        }
        let mut relators = Vec::new();
        for v in 0..self.vertex_count() {
            if let GroupSpec::Finite { table, .. } = self.vgroup(v) {
                let nonid: Vec<u32> = (0..table.order()).filter(|&j| j != table.identity()).collect();
                for &x in &nonid {
                    for &y in &nonid {
                        let mut w = self.element_word(v, &GElem::Finite(x), &offs);
                        w.extend(self.element_word(v, &GElem::Finite(y), &offs));
                        let z = self.element_word(v, &GElem::Finite(table.mul(x, y)), &offs);
                        w.extend(invert(&z));
                        relators.push((1, w));
                    }
                }
            }
        }
        for i in 0..self.graph().edge_count() {
            let e = OEdge::positive(i);
            relators.push((2, vec![(edge_off + e.bar().0 as usize, 1), (edge_off + e.0 as usize, 1)]));
        }
        for i in self.tree_edges() {
            relators.push((3, vec![(edge_off + OEdge::positive(i).0 as usize, 1)]));
        }
        for i in 0..self.graph().edge_count() {
            let e = OEdge::positive(i);
            let eg = self.egroup(e);
            for k in 0..eg.generator_count() {
                let a = eg.generator(k);
                let mut w: PresentationWord = vec![(edge_off + e.0 as usize, 1)];
                for run in self.element_word(self.t(e), &self.phi_t(e, &a), &offs) {
                    push_run(&mut w, run.0, run.1);
                }
                push_run(&mut w, edge_off + e.0 as usize, -1);
                for run in invert(&self.element_word(self.o(e), &self.phi_o(e, &a), &offs)) {
                    push_run(&mut w, run.0, run.1);
                }
                relators.push((4, w));
            }
        }
        Presentation { generators, kinds, relators }
    }

    /// Relator count predicted from the data: vertex relators, one bar
    /// relator per edge, one per tree edge, one per edge-group generator.
    pub fn expected_relator_count(&self) -> usize {
        let vertex: usize = (0..self.vertex_count())
            .map(|v| match self.vgroup(v) {
                GroupSpec::Free(_) => 0,
                GroupSpec::Finite { table, .. } => ((table.order() - 1) * (table.order() - 1)) as usize,
            })
            .sum();
        let edges = self.graph().edge_count();
        let gens: usize = (0..edges).map(|i| self.egroup(OEdge::positive(i)).generator_count()).sum();
        vertex + edges + self.tree_edges().len() + gens
    }

    /// The element of the fundamental group (a loop at the base) named by a presentation generator.
    pub fn generator_element(&self, kind: &PresentationGenerator) -> ReducedSequence {
        match kind {
            PresentationGenerator::Vertex { vertex, element } => {
                let p = self.tree_path_element(*vertex);
                let s = self.vertex_element(*vertex, element.clone());
                self.mul(&self.mul(&p, &s), &self.inverse(&p))
            }
            PresentationGenerator::Edge(e) => {
                let p = self.tree_path_element(self.o(*e));
                let q = self.tree_path_element(self.t(*e));
                self.mul(&self.mul(&p, &self.edge_element(*e)), &self.inverse(&q))
            }
        }
    }

    pub fn evaluate_word(&self, pres: &Presentation, w: &PresentationWord) -> ReducedSequence {
        let mut acc = self.identity_at(self.base());
        for &(g, k) in w {
            let x = self.generator_element(&pres.kinds[g]);
            acc = self.mul(&acc, &self.pow(&x, k));
        }
        acc
    }
}
