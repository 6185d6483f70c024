use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use super::zipper::{build_multizipper, Multizipper};
use crate::address::MultiIndex;
use crate::error::{Error, Result};
use crate::geometry::{Point, PointIndex, Similarity};
use crate::validator::PolyhedralSystem;

/// Longest position key computed along an arc.
const MAX_KEY_LEN: usize = 64;

/// Branch point of the arcs joining three vertices of P.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Median {
    pub vertices: (usize, usize, usize),
    pub point: Point,
}

/// The multizipper together with the branch structure of its arcs.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MainTree {
    pub zipper: Multizipper,
    pub medians: Vec<Median>,
    /// Points of each component where other arcs leave it, in arc order.
    pub arc_nodes: Vec<Vec<Point>>,
}

/// Where the arcs from `A_u` to `A_v` and to `A_w` part.
///
/// Both chains are walked in lockstep from `A_u`; when they enter the same
/// piece and leave through different vertices the walk continues inside that
/// piece. A repeated state means the branch point is the fixed point of the
/// similarity accumulated around the loop.
pub fn median(sys: &PolyhedralSystem, z: &Multizipper, u: usize, v: usize, w: usize) -> Point {
    let verts = sys.polyhedron().vertices();
    if v == w || u == v || u == w {
        return verts[if v == w { v } else { u }].clone();
    }
    let mut letters: Vec<usize> = Vec::new();
    let mut visited: Vec<((usize, usize, usize), usize)> = Vec::new();
    let (mut e, mut x1, mut x2) = (u, v, w);
    loop {
        let t = sys.compose(&letters);
        if let Some(&(_, start)) = visited.iter().find(|(s, _)| *s == (e, x1, x2)) {
            let head = sys.compose(&letters[..start]);
            let loop_map = sys.compose(&letters[start..]);
            return head.apply_unchecked(&loop_map.fixed_point());
        }
        visited.push(((e, x1, x2), letters.len()));
        let c1 = z.oriented(e, x1);
        let c2 = z.oriented(e, x2);
        let at = |k: usize| -> Point {
            if k == 0 {
                t.apply_unchecked(&verts[e])
            } else {
                let (p, _, exit) = c1[k - 1];
                t.compose(&sys.maps()[p]).apply_unchecked(&verts[exit])
            }
        };
        let mut k = 0;
        loop {
            if k == c1.len() {
                return t.apply_unchecked(&verts[x1]);
            }
            if k == c2.len() {
                return t.apply_unchecked(&verts[x2]);
            }
            let (p1, en, ex1) = c1[k];
            let (p2, _, ex2) = c2[k];
            if p1 != p2 {
                return at(k);
            }
            if ex1 == ex2 {
                k += 1;
                continue;
            }
            letters.push(p1);
            (e, x1, x2) = (en, ex1, ex2);
            break;
        }
    }
}

/// Position of `p` along component `c` as a lexicographic key, or `None`
/// when `p` is off the arc. Node `k` of a chain with `s` pieces has digit
/// `2k`, the interior of piece `k` has `2k + 1`; digits are mirrored
/// (`2s − x`) inside reversed sub-arcs.
pub fn arc_position(sys: &PolyhedralSystem, z: &Multizipper, c: usize, p: &Point) -> Option<Vec<i64>> {
    let poly = sys.polyhedron();
    let floor = sys.eps(0.0);
    let mut t = Similarity::identity(sys.dim());
    let mut comp = c;
    let mut flip = false;
    let mut key = Vec::new();
    while key.len() < MAX_KEY_LEN {
        let cc = &z.components[comp];
        let s = cc.maps.len() as i64;
        let diam = poly.diameter() * t.ratio();
        if diam < 1e4 * floor {
            break;
        }
        let eps = sys.eps(diam);
        let digit = |x: i64| if flip { 2 * s - x } else { x };
        if let Some(k) = cc.nodes.iter().position(|n| t.apply_unchecked(n).dist(p) <= eps) {
            key.push(digit(2 * k as i64));
            return Some(key);
        }
        let (k, m) = cc.maps.iter().enumerate().find(|(_, m)| {
            let sub = poly.mapped(&t.compose(&sys.maps()[m.piece]));
            sub.contains_point(p, sys.eps(sub.diameter()))
        })?;
        key.push(digit(2 * k as i64 + 1));
        t = t.compose(&sys.maps()[m.piece]);
        flip ^= m.signature == 1;
        comp = m.target;
    }
    Some(key)
}

pub fn arc_contains(sys: &PolyhedralSystem, z: &Multizipper, c: usize, p: &Point) -> bool {
    arc_position(sys, z, c, p).is_some()
}

impl MainTree {
    pub fn new(sys: &PolyhedralSystem) -> Result<Self> {
        let zipper = build_multizipper(sys)?;
        let n = sys.polyhedron().vertex_count();
        let mut medians = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                for w in v + 1..n {
                    medians.push(Median {
                        vertices: (u, v, w),
                        point: median(sys, &zipper, u, v, w),
                    });
                }
            }
        }
        let eps = sys.eps(sys.polyhedron().diameter());
        let mut arc_nodes = Vec::new();
        for (ci, c) in zipper.components.iter().enumerate() {
            let (a, b) = c.endpoints;
            let mut index = PointIndex::new(eps);
            for x in 0..n {
                index.insert(&median(sys, &zipper, a, b, x));
            }
            let mut keyed = Vec::new();
            for p in index.into_points() {
                let key = arc_position(sys, &zipper, ci, &p).ok_or(Error::NotATree(0))?;
                keyed.push((key, p));
            }
            keyed.sort_by(|x, y| x.0.cmp(&y.0));
            arc_nodes.push(keyed.into_iter().map(|(_, p)| p).collect());
        }
        Ok(MainTree {
            zipper,
            medians,
            arc_nodes,
        })
    }

    /// Sub-arcs `S_w(γ_c)` with `|w| = n`, deduplicated.
    pub fn sub_arcs(&self, sys: &PolyhedralSystem, n: usize) -> Result<Vec<(MultiIndex, usize)>> {
        sys.check_budget(n)?;
        let mut level: BTreeSet<(Vec<usize>, usize)> =
            (0..self.zipper.components.len()).map(|c| (Vec::new(), c)).collect();
        for _ in 0..n {
            let mut next = BTreeSet::new();
            for (w, c) in &level {
                for m in &self.zipper.components[*c].maps {
                    let mut w2 = w.clone();
                    w2.push(m.piece);
                    next.insert((w2, m.target));
                }
            }
            level = next;
        }
        Ok(level.into_iter().map(|(w, c)| (MultiIndex::new(w), c)).collect())
    }

    pub fn skeleton(&self, sys: &PolyhedralSystem, n: usize) -> Result<TreeSkeleton> {
        let subs = self.sub_arcs(sys, n)?;
        let rmin = sys.maps().iter().map(Similarity::ratio).fold(1.0, f64::min);
        let mut index = PointIndex::new(sys.eps(sys.polyhedron().diameter() * rmin.powi(n as i32)));
        for v in sys.polyhedron().vertices() {
            index.insert(v);
        }
        let mut edges: BTreeMap<(usize, usize), SkeletonEdge> = BTreeMap::new();
        for (w, c) in subs {
            let s = sys.compose(w.letters());
            let ids: Vec<usize> = self.arc_nodes[c]
                .iter()
                .map(|p| index.insert(&s.apply_unchecked(p)).0)
                .collect();
            for pair in ids.windows(2) {
                let key = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                if key.0 != key.1 {
                    edges.entry(key).or_insert_with(|| SkeletonEdge {
                        a: key.0,
                        b: key.1,
                        word: w.clone(),
                        component: c,
                    });
                }
            }
        }
        let skeleton = TreeSkeleton {
            depth: n,
            nodes: index.into_points(),
            edges: edges.into_values().collect(),
        };
        if !skeleton.is_tree() {
            return Err(Error::NotATree(n));
        }
        Ok(skeleton)
    }
}

pub fn build_main_tree(sys: &PolyhedralSystem) -> Result<MainTree> {
    MainTree::new(sys)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SkeletonEdge {
    pub a: usize,
    pub b: usize,
    /// Word of the sub-arc the edge lies on.
    pub word: MultiIndex,
    pub component: usize,
}

/// Finite tree approximating the main tree at a refinement depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeSkeleton {
    pub depth: usize,
    pub nodes: Vec<Point>,
    pub edges: Vec<SkeletonEdge>,
}

/// An edge leaving cylinder `P_word` through a point that is not a vertex image of it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SqueezeViolation {
    pub edge: usize,
    pub word: MultiIndex,
}

impl TreeSkeleton {
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.a == node || e.b == node).count()
    }

    pub fn find_node(&self, p: &Point, eps: f64) -> Option<usize> {
        self.nodes.iter().position(|q| q.dist(p) <= eps)
    }

    pub fn is_tree(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    /// Edges with exactly one endpoint in a depth-n cylinder must leave it
    /// through one of the cylinder's vertices.
    pub fn squeeze_violations(&self, sys: &PolyhedralSystem) -> Result<Vec<SqueezeViolation>> {
        let level = crate::address::hutchinson_expand(sys, self.depth)?;
        let mut out = Vec::new();
        for entry in &level.entries {
            let q = &entry.cylinder;
            let eps = sys.eps(q.diameter());
            for (k, e) in self.edges.iter().enumerate() {
                let ina = q.contains_point(&self.nodes[e.a], eps);
                let inb = q.contains_point(&self.nodes[e.b], eps);
                if ina != inb {
                    let inside = if ina { &self.nodes[e.a] } else { &self.nodes[e.b] };
                    if q.vertex_index(inside, eps).is_none() {
                        out.push(SqueezeViolation {
                            edge: k,
                            word: entry.word.clone(),
                        });
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn tree_skeleton(sys: &PolyhedralSystem, n: usize) -> Result<TreeSkeleton> {
    MainTree::new(sys)?.skeleton(sys, n)
}
