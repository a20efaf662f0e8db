use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::gog::GraphOfGroups;

use super::{TreeEdge, TreeVertex};

const PALETTE: [&str; 8] = ["lightblue", "lightsalmon", "palegreen", "khaki", "plum", "lightgray", "pink", "wheat"];

/// A ball in the tree around `center`. An edge leaving an explored vertex
/// through transversal element `r` is followed when the cumulative cost
/// `Σ (|r| + 1)` along the path from the center stays within `budget`.
#[derive(Clone, Debug)]
pub struct TreeBall {
    pub center: TreeVertex,
    pub radius: usize,
    pub budget: usize,
    pub vertices: Vec<TreeVertex>,
    pub depth: Vec<usize>,
    pub cost: Vec<usize>,
    /// Set on expanded vertices whose coset enumeration hit the budget.
    pub truncated: Vec<bool>,
    pub edges: Vec<(usize, usize, TreeEdge)>,
    index: HashMap<TreeVertex, usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TreeBallStats {
    pub radius: usize,
    pub budget: usize,
    pub vertices: usize,
    pub edges: usize,
    pub truncated_vertices: usize,
    pub is_tree: bool,
    pub degree_histogram: BTreeMap<usize, usize>,
    pub vertices_by_type: BTreeMap<String, usize>,
}

impl TreeBall {
    pub fn build(gog: &GraphOfGroups, center: &TreeVertex, radius: usize, budget: usize) -> Self {
        let mut ball = TreeBall {
            center: center.clone(),
            radius,
            budget,
            vertices: vec![center.clone()],
            depth: vec![0],
            cost: vec![0],
            truncated: vec![false],
            edges: Vec::new(),
            index: HashMap::from([(center.clone(), 0)]),
        };
        let mut seen_edges: HashSet<TreeEdge> = HashSet::new();
        let mut i = 0;
        while i < ball.vertices.len() {
            if ball.depth[i] < radius {
                let spare = budget.saturating_sub(ball.cost[i] + 1);
                let inc = gog.incident_edges(&ball.vertices[i], spare);
                let mut truncated = inc.truncated;
                for x in inc.edges {
                    if seen_edges.contains(&x.edge) {
                        continue;
                    }
                    let step = gog.vgroup(ball.vertices[i].ty).len(&x.r) + 1;
                    if ball.cost[i] + step > budget {
                        truncated = true;
                        continue;
                    }
                    seen_edges.insert(x.edge.clone());
                    let j = match ball.index.get(&x.opposite) {
                        Some(&j) => j,
                        None => {
                            ball.vertices.push(x.opposite.clone());
                            ball.depth.push(ball.depth[i] + 1);
                            ball.cost.push(ball.cost[i] + step);
                            ball.truncated.push(false);
                            ball.index.insert(x.opposite, ball.vertices.len() - 1);
                            ball.vertices.len() - 1
                        }
                    };
                    ball.edges.push((i, j, x.edge));
                }
                ball.truncated[i] = truncated;
            }
            i += 1;
        }
        ball
    }

    pub fn index_of(&self, w: &TreeVertex) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn contains(&self, w: &TreeVertex) -> bool {
        self.index.contains_key(w)
    }

    /// True when the explored graph is a tree: connected with one edge fewer than vertices.
    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertices.len()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b, _)| if a == i { Some(b) } else if b == i { Some(a) } else { None })
            .collect()
    }

    /// Graph distances from vertex `i` inside the ball.
    pub fn bfs(&self, i: usize) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(a, b, _) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut dist = vec![usize::MAX; self.vertices.len()];
        dist[i] = 0;
        let mut q = std::collections::VecDeque::from([i]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    pub fn stats(&self, gog: &GraphOfGroups) -> TreeBallStats {
        let mut degree_histogram = BTreeMap::new();
        let mut deg = vec![0usize; self.vertices.len()];
        for &(a, b, _) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        for (i, d) in deg.iter().enumerate() {
            if self.depth[i] < self.radius {
                *degree_histogram.entry(*d).or_insert(0) += 1;
            }
        }
        let mut vertices_by_type = BTreeMap::new();
        for w in &self.vertices {
            *vertices_by_type.entry(gog.vertex_name(w.ty).to_string()).or_insert(0) += 1;
        }
        TreeBallStats {
            radius: self.radius,
            budget: self.budget,
            vertices: self.vertices.len(),
            edges: self.edges.len(),
            truncated_vertices: self.truncated.iter().filter(|&&t| t).count(),
            is_tree: self.is_tree(),
            degree_histogram,
            vertices_by_type,
        }
    }

    pub fn to_dot(&self, gog: &GraphOfGroups) -> String {
        let mut s = String::from("graph tree {\n  node [style=filled];\n");
        for (i, w) in self.vertices.iter().enumerate() {
            let color = PALETTE[w.ty % PALETTE.len()];
            let shape = if self.truncated[i] { "box" } else { "ellipse" };
            let _ = writeln!(
                s,
                "  {i} [label=\"{}\", fillcolor={color}, shape={shape}];",
                gog.format_tree_vertex(w).replace('"', "'")
            );
        }
        for (a, b, e) in &self.edges {
            let _ = writeln!(s, "  {a} -- {b} [label=\"{}\"];", gog.edge_name(e.e));
        }
        s.push_str("}\n");
        s
    }
}
