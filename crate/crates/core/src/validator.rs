//! Polyhedral systems of similarities and the D1–D4 validator.
//!
//! D4 (contractibility of the union of the first-level pieces) is decided
//! on the bipartite incidence graph of pieces and shared points: under D2
//! the union deformation-retracts onto that graph, so it is contractible
//! exactly when the graph is a tree.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    abs_tol, classify_intersection, polyhedron_contains, IntersectionClass, Point, PointIndex, Polyhedron, Similarity,
    DEFAULT_TOLERANCE,
};

pub const DEFAULT_PIECE_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Settings {
    pub tolerance: f64,
    pub piece_budget: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tolerance: DEFAULT_TOLERANCE,
            piece_budget: DEFAULT_PIECE_BUDGET,
        }
    }
}

/// A polyhedron `P` together with contraction similarities `S_1 … S_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralSystem {
    polyhedron: Polyhedron,
    maps: Vec<Similarity>,
    settings: Settings,
}

impl PolyhedralSystem {
    pub fn new(polyhedron: Polyhedron, maps: Vec<Similarity>) -> Result<Self> {
        Self::with_settings(polyhedron, maps, Settings::default())
    }

    pub fn with_settings(polyhedron: Polyhedron, maps: Vec<Similarity>, settings: Settings) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::InvalidSystem(format!(
                "a system needs at least 2 maps, got {}",
                maps.len()
            )));
        }
        let d = polyhedron.dim();
        for s in &maps {
            if s.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: s.dim(),
                });
            }
            if !(s.ratio() > 0.0 && s.ratio() < 1.0) {
                return Err(Error::InvalidSimilarity(format!(
                    "ratio {} is not a contraction",
                    s.ratio()
                )));
            }
        }
        if settings.tolerance.is_nan() || settings.tolerance <= 0.0 || settings.piece_budget == 0 {
            return Err(Error::InvalidSystem(
                "tolerance and piece budget must be positive".into(),
            ));
        }
        Ok(PolyhedralSystem {
            polyhedron,
            maps,
            settings,
        })
    }

    pub fn polyhedron(&self) -> &Polyhedron {
        &self.polyhedron
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn dim(&self) -> usize {
        self.polyhedron.dim()
    }

    pub fn settings(&self) -> Settings {
        self.settings
    }

    pub fn tolerance(&self) -> f64 {
        self.settings.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.settings.tolerance = tolerance;
        self
    }

    /// `S_{j_1} ∘ … ∘ S_{j_n}`; the identity for the empty word.
    pub fn compose(&self, word: &[usize]) -> Similarity {
        word.iter()
            .fold(Similarity::identity(self.dim()), |acc, &i| acc.compose(&self.maps[i]))
    }

    pub fn piece(&self, i: usize) -> Polyhedron {
        self.polyhedron.mapped(&self.maps[i])
    }

    pub fn pieces(&self) -> Vec<Polyhedron> {
        (0..self.maps.len()).map(|i| self.piece(i)).collect()
    }

    /// Absolute coincidence tolerance for objects of diameter `scale`.
    pub fn eps(&self, scale: f64) -> f64 {
        let mag = self
            .polyhedron
            .vertices()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.max_abs()));
        abs_tol(self.settings.tolerance, scale, mag)
    }

    /// Number of words of length `depth`, or `DepthTooLarge` over the budget.
    pub fn check_budget(&self, depth: usize) -> Result<usize> {
        let pieces = (self.maps.len() as u128).checked_pow(depth as u32).unwrap_or(u128::MAX);
        if pieces > self.settings.piece_budget as u128 {
            return Err(Error::DepthTooLarge {
                depth,
                pieces,
                budget: self.settings.piece_budget,
            });
        }
        Ok(pieces as usize)
    }
}

/// All words of length `n` over `0..m` in lexicographic order.
pub fn words(m: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..m).map(move |i| {
                    let mut w = w.clone();
                    w.push(i);
                    w
                })
            })
            .collect();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IncidenceGraph {
    pub piece_count: usize,
    pub points: Vec<Point>,
    /// `(piece, point)` pairs.
    pub edges: Vec<(usize, usize)>,
}

/// Node of the incidence graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum IncidenceNode {
    Piece(usize),
    Point(usize),
}

impl fmt::Display for IncidenceNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IncidenceNode::Piece(i) => write!(f, "P{i}"),
            IncidenceNode::Point(p) => write!(f, "p{p}"),
        }
    }
}

impl IncidenceGraph {
    pub fn node_count(&self) -> usize {
        self.piece_count + self.points.len()
    }

    fn node_id(&self, n: IncidenceNode) -> usize {
        match n {
            IncidenceNode::Piece(i) => i,
            IncidenceNode::Point(p) => self.piece_count + p,
        }
    }

    fn node(&self, id: usize) -> IncidenceNode {
        if id < self.piece_count {
            IncidenceNode::Piece(id)
        } else {
            IncidenceNode::Point(id - self.piece_count)
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(i, p) in &self.edges {
            let q = self.piece_count + p;
            adj[i].push(q);
            adj[q].push(i);
        }
        adj
    }

    /// Connected components, as sorted lists of piece indices.
    pub fn piece_components(&self) -> Vec<Vec<usize>> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in 0..self.piece_count {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                if u < self.piece_count {
                    comp.push(u);
                }
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.piece_components().len() == 1
    }

    /// A simple cycle, if the graph has one.
    pub fn find_cycle(&self) -> Option<Vec<IncidenceNode>> {
        let adj = self.adjacency();
        let n = self.node_count();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        for root in 0..n {
            if depth[root] != usize::MAX {
                continue;
            }
            depth[root] = 0;
            let mut stack = vec![root];
            while let Some(u) = stack.pop() {
                for &v in &adj[u] {
                    if v == parent[u] {
                        continue;
                    }
                    if depth[v] == usize::MAX {
                        depth[v] = depth[u] + 1;
                        parent[v] = u;
                        stack.push(v);
                    } else if depth[v] <= depth[u] {
                        // non-tree edge: walk both ends up to their common ancestor
                        let (mut a, mut b) = (u, v);
                        let mut left = vec![a];
                        let mut right = vec![b];
                        while a != b {
                            if depth[a] >= depth[b] {
                                a = parent[a];
                                left.push(a);
                            } else {
                                b = parent[b];
                                right.push(b);
                            }
                        }
                        right.pop();
                        right.reverse();
                        left.extend(right);
                        return Some(left.into_iter().map(|id| self.node(id)).collect());
                    }
                }
            }
        }
        None
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.node_count() && self.find_cycle().is_none()
    }

    /// Unique node path between two nodes of a tree (BFS shortest path in general).
    pub fn path(&self, from: &[IncidenceNode], to: &[IncidenceNode]) -> Option<Vec<IncidenceNode>> {
        let adj = self.adjacency();
        let n = self.node_count();
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &s in from {
            let id = self.node_id(s);
            seen[id] = true;
            queue.push_back(id);
        }
        let targets: Vec<usize> = to.iter().map(|&t| self.node_id(t)).collect();
        while let Some(u) = queue.pop_front() {
            if targets.contains(&u) {
                let mut path = vec![u];
                let mut cur = u;
                while prev[cur] != usize::MAX {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path.into_iter().map(|id| self.node(id)).collect());
            }
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

fn pairwise_classes(sys: &PolyhedralSystem) -> Vec<(usize, usize, IntersectionClass)> {
    let pieces = sys.pieces();
    let mut out = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            out.push((i, j, classify_intersection(&pieces[i], &pieces[j], sys.tolerance())));
        }
    }
    out
}

fn incidence_from_classes(
    sys: &PolyhedralSystem,
    classes: &[(usize, usize, IntersectionClass)],
) -> Result<IncidenceGraph> {
    let mut index = PointIndex::new(sys.eps(sys.polyhedron().diameter()));
    let mut edges = Vec::new();
    for (i, j, class) in classes {
        match class {
            IntersectionClass::Overlap => return Err(Error::D2Violated { first: *i, second: *j }),
            IntersectionClass::SharedVertex { point, .. } => {
                let (p, _) = index.insert(point);
                for e in [(*i, p), (*j, p)] {
                    if !edges.contains(&e) {
                        edges.push(e);
                    }
                }
            }
            IntersectionClass::Disjoint => {}
        }
    }
    edges.sort_unstable_by_key(|&(i, p)| (p, i));
    Ok(IncidenceGraph {
        piece_count: sys.map_count(),
        points: index.into_points(),
        edges,
    })
}

pub fn build_incidence_graph(sys: &PolyhedralSystem) -> Result<IncidenceGraph> {
    incidence_from_classes(sys, &pairwise_classes(sys))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Condition {
    D1,
    D2,
    D3,
    D3a,
    D4,
    Connectivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// Not evaluated because a prerequisite condition failed.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Witness {
    /// Piece not contained in P.
    Piece {
        piece: usize,
    },
    /// Offending pair of pieces.
    #[serde(rename_all = "camelCase")]
    Pair {
        first: usize,
        second: usize,
    },
    /// Vertex of P that is no vertex image.
    UncoveredVertex {
        vertex: usize,
    },
    /// Vertex of P lying in a piece without being one of its vertex images.
    StrayVertex {
        piece: usize,
        vertex: usize,
    },
    Cycle {
        nodes: Vec<IncidenceNode>,
    },
    Components {
        components: Vec<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionResult {
    pub condition: Condition,
    pub status: ConditionStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ConditionResult {
    fn pass(condition: Condition) -> Self {
        ConditionResult {
            condition,
            status: ConditionStatus::Pass,
            witness: None,
        }
    }

    fn fail(condition: Condition, witness: Witness) -> Self {
        ConditionResult {
            condition,
            status: ConditionStatus::Fail,
            witness: Some(witness),
        }
    }

    fn skipped(condition: Condition) -> Self {
        ConditionResult {
            condition,
            status: ConditionStatus::Skipped,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum Verdict {
    Dendrite,
    Invalid { reasons: Vec<Condition> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub per_condition: Vec<ConditionResult>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incidence: Option<IncidenceGraph>,
    /// det sign of each map's orthogonal part (−1 for reflections).
    pub orientations: Vec<f64>,
}

impl ValidationReport {
    pub fn is_dendrite(&self) -> bool {
        self.verdict == Verdict::Dendrite
    }

    pub fn status(&self, c: Condition) -> ConditionStatus {
        self.per_condition
            .iter()
            .find(|r| r.condition == c)
            .map(|r| r.status)
            .unwrap_or(ConditionStatus::Skipped)
    }

    pub fn failed(&self) -> Vec<Condition> {
        self.per_condition
            .iter()
            .filter(|r| r.status == ConditionStatus::Fail)
            .map(|r| r.condition)
            .collect()
    }
}

pub fn validate_system(sys: &PolyhedralSystem) -> ValidationReport {
    let p = sys.polyhedron();
    let pieces = sys.pieces();
    let tau = sys.tolerance();
    let eps = sys.eps(p.diameter());
    let mut results = Vec::new();

    results.push(
        match (0..pieces.len()).find(|&i| !polyhedron_contains(p, &pieces[i], tau)) {
            None => ConditionResult::pass(Condition::D1),
            Some(piece) => ConditionResult::fail(Condition::D1, Witness::Piece { piece }),
        },
    );

    let classes = pairwise_classes(sys);
    let overlap = classes.iter().find(|(_, _, c)| c.is_overlap());
    results.push(match overlap {
        None => ConditionResult::pass(Condition::D2),
        Some(&(first, second, _)) => ConditionResult::fail(Condition::D2, Witness::Pair { first, second }),
    });

    let uncovered = p
        .vertices()
        .iter()
        .position(|a| !pieces.iter().any(|q| q.vertex_index(a, eps).is_some()));
    results.push(match uncovered {
        None => ConditionResult::pass(Condition::D3),
        Some(vertex) => ConditionResult::fail(Condition::D3, Witness::UncoveredVertex { vertex }),
    });

    let mut stray = None;
    'outer: for (i, q) in pieces.iter().enumerate() {
        let q_eps = sys.eps(q.diameter());
        for (k, a) in p.vertices().iter().enumerate() {
            if q.contains_point(a, q_eps) && q.vertex_index(a, q_eps).is_none() {
                stray = Some((i, k));
                break 'outer;
            }
        }
    }
    results.push(match stray {
        None => ConditionResult::pass(Condition::D3a),
        Some((piece, vertex)) => ConditionResult::fail(Condition::D3a, Witness::StrayVertex { piece, vertex }),
    });

    let incidence = incidence_from_classes(sys, &classes).ok();
    match &incidence {
        None => {
            results.push(ConditionResult::skipped(Condition::D4));
            results.push(ConditionResult::skipped(Condition::Connectivity));
        }
        Some(g) => {
            let components = g.piece_components();
            let disconnected = Witness::Components {
                components: components.clone(),
            };
            results.push(if let Some(nodes) = g.find_cycle() {
                ConditionResult::fail(Condition::D4, Witness::Cycle { nodes })
            } else if components.len() > 1 {
                ConditionResult::fail(Condition::D4, disconnected.clone())
            } else {
                ConditionResult::pass(Condition::D4)
            });
            results.push(if components.len() > 1 {
                ConditionResult::fail(Condition::Connectivity, disconnected)
            } else {
                ConditionResult::pass(Condition::Connectivity)
            });
        }
    }

    let reasons: Vec<Condition> = results
        .iter()
        .filter(|r| r.status == ConditionStatus::Fail)
        .map(|r| r.condition)
        .collect();
    let verdict = if results.iter().all(|r| r.status == ConditionStatus::Pass) {
        Verdict::Dendrite
    } else {
        Verdict::Invalid { reasons }
    };
    ValidationReport {
        per_condition: results,
        verdict,
        incidence,
        orientations: sys.maps().iter().map(Similarity::orientation).collect(),
    }
}

/// The system `{S_j : j ∈ Iⁿ}` of all n-fold compositions, in lexicographic word order.
pub fn refine_system(sys: &PolyhedralSystem, n: usize) -> Result<PolyhedralSystem> {
    if n == 0 {
        return Err(Error::InvalidSystem("refinement depth must be positive".into()));
    }
    sys.check_budget(n)?;
    let maps = words(sys.map_count(), n).iter().map(|w| sys.compose(w)).collect();
    PolyhedralSystem::with_settings(sys.polyhedron().clone(), maps, sys.settings())
}
