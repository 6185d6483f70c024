//! Similarity dimensions: the Moran equation, the graph-directed equation of
//! the multizipper, and covering subsystems of the main tree.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::address::{hutchinson_expand, MultiIndex};
use crate::error::{Error, Result};
use crate::geometry::PointIndex;
use crate::tree::{MainTree, Multizipper, TreeSkeleton};
use crate::validator::{validate_system, PolyhedralSystem};

const MORAN_TOL: f64 = 1e-12;
const ARC_TOL: f64 = 1e-10;
const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-12;
/// Margin by which a covering dimension must undercut dim K to certify a gap.
pub const GAP_MARGIN: f64 = 1e-9;
pub const DEFAULT_COVER_DEPTHS: [usize; 4] = [1, 2, 3, 4];

/// The unique `s ≥ 0` with `Σ rᵢˢ = 1`.
pub fn moran_dimension(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() || ratios.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(Error::InvalidSimilarity("Moran ratios must lie in (0, 1)".into()));
    }
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    if f(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    Ok(bisect(f, 0.0, hi, MORAN_TOL))
}

/// Root of a decreasing function on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Perron root of a nonnegative matrix by power iteration on `M + I`.
pub fn spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let y: Vec<f64> = (0..n)
            .map(|i| x[i] + (0..n).map(|j| m[i][j] * x[j]).sum::<f64>())
            .collect();
        let norm: f64 = y.iter().sum();
        let next = norm / x.iter().sum::<f64>();
        x = y.iter().map(|v| v / norm).collect();
        let done = (next - lambda).abs() <= POWER_TOL * next.max(1.0);
        lambda = next;
        if done {
            break;
        }
    }
    lambda - 1.0
}

/// Strongly connected components (Tarjan), each sorted, in reverse topological order.
fn strongly_connected(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        succ: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for k in 0..s.succ[v].len() {
            let w = s.succ[v][k];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let n = succ.len();
    let mut s = State {
        succ,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArcDimensions {
    /// Per component, in multizipper order.
    pub per_component: Vec<f64>,
    /// Strongly connected classes of the component graph with their own dimension.
    pub classes: Vec<(Vec<usize>, f64)>,
    /// The component graph is not strongly connected.
    pub reducible: bool,
    /// The spectral radius decreased with s at every bisection step.
    pub monotone: bool,
}

/// Graph-directed dimension of every multizipper component.
pub fn arc_dimension(z: &Multizipper, sys: &PolyhedralSystem) -> ArcDimensions {
    let succ = z.successors();
    let sccs = strongly_connected(&succ);
    let d = sys.dim() as f64;
    let mut monotone = true;
    let mut own = vec![0.0; z.components.len()];
    let mut classes = Vec::new();
    for scc in &sccs {
        let matrix = |s: f64| -> Vec<Vec<f64>> {
            scc.iter()
                .map(|&u| {
                    scc.iter()
                        .map(|&v| {
                            z.components[u]
                                .maps
                                .iter()
                                .filter(|m| m.target == v)
                                .map(|m| sys.maps()[m.piece].ratio().powf(s))
                                .sum()
                        })
                        .collect()
                })
                .collect()
        };
        let rho = |s: f64| spectral_radius(&matrix(s));
        let dim = if rho(0.0) <= 1.0 {
            0.0
        } else if rho(d) >= 1.0 {
            d
        } else {
            let (mut lo, mut hi) = (0.0, d);
            let (mut rlo, mut rhi) = (rho(lo), rho(hi));
            while hi - lo > ARC_TOL {
                let mid = 0.5 * (lo + hi);
                let r = rho(mid);
                if !(r <= rlo + POWER_TOL && r >= rhi - POWER_TOL) {
                    monotone = false;
                }
                if r > 1.0 {
                    lo = mid;
                    rlo = r;
                } else {
                    hi = mid;
                    rhi = r;
                }
            }
            0.5 * (lo + hi)
        };
        for &u in scc {
            own[u] = dim;
        }
        classes.push((scc.clone(), dim));
    }
    // Tarjan emits sinks first, so successors are final before their predecessors.
    let mut per_component = own.clone();
    for scc in &sccs {
        let best = scc
            .iter()
            .flat_map(|&u| succ[u].iter().map(|&v| per_component[v]))
            .fold(own[scc[0]], f64::max);
        for &u in scc {
            per_component[u] = best;
        }
    }
    ArcDimensions {
        per_component,
        classes,
        reducible: sccs.len() > 1,
        monotone,
    }
}

/// Depth-n multiindices whose cylinders meet the main tree.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverSubsystem {
    pub depth: usize,
    pub index_set: Vec<MultiIndex>,
    /// `mⁿ`.
    pub total: usize,
}

impl CoverSubsystem {
    pub fn size(&self) -> usize {
        self.index_set.len()
    }

    pub fn is_proper(&self) -> bool {
        self.size() < self.total
    }

    pub fn ratios(&self, sys: &PolyhedralSystem) -> Vec<f64> {
        self.index_set
            .iter()
            .map(|w| sys.compose(w.letters()).ratio())
            .collect()
    }
}

/// A depth-n cylinder meets the main tree iff it carries a skeleton edge
/// (its word prefixes a sub-arc word) or has a skeleton node as a vertex.
pub fn cover_subsystem(sys: &PolyhedralSystem, skeleton: &TreeSkeleton, n: usize) -> Result<CoverSubsystem> {
    if skeleton.depth < n {
        return Err(Error::DepthMismatch {
            skeleton: skeleton.depth,
            requested: n,
        });
    }
    let level = hutchinson_expand(sys, n)?;
    let mut set: BTreeSet<MultiIndex> = skeleton
        .edges
        .iter()
        .map(|e| MultiIndex::new(e.word.letters()[..n].to_vec()))
        .collect();
    let scale = level
        .entries
        .iter()
        .map(|e| e.cylinder.diameter())
        .fold(f64::INFINITY, f64::min);
    let mut nodes = PointIndex::new(sys.eps(scale.min(sys.polyhedron().diameter())));
    for p in &skeleton.nodes {
        nodes.insert(p);
    }
    for e in &level.entries {
        if e.vertex_images().iter().any(|v| nodes.find(v).is_some()) {
            set.insert(e.word.clone());
        }
    }
    Ok(CoverSubsystem {
        depth: n,
        index_set: set.into_iter().collect(),
        total: level.entries.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentDimension {
    pub endpoints: (usize, usize),
    pub class: usize,
    pub dim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverDimension {
    pub depth: usize,
    pub size: usize,
    pub total: usize,
    pub dim: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionReport {
    pub dim_k: f64,
    pub arc_dims: Vec<ComponentDimension>,
    pub dim_tree_upper: Vec<CoverDimension>,
    pub jordan_arc: bool,
    pub gap_certified: bool,
    pub reducible_warning: bool,
    /// The system validated, so similarity dimensions equal Hausdorff dimensions.
    pub hausdorff: bool,
    pub note: &'static str,
}

pub const DIMENSION_NOTE: &str = "dim_H of the main tree lies between max(arcDims) and min(dimTreeUpper); \
the end-point set has dimension dimK since EP(K) = K minus the cut points";

impl DimensionReport {
    pub fn max_arc_dim(&self) -> f64 {
        self.arc_dims.iter().map(|a| a.dim).fold(0.0, f64::max)
    }
}

pub fn dimension_report(sys: &PolyhedralSystem, depths: &[usize]) -> Result<DimensionReport> {
    let ratios: Vec<f64> = sys.maps().iter().map(|s| s.ratio()).collect();
    let dim_k = moran_dimension(&ratios)?;
    let tree = MainTree::new(sys)?;
    let z = &tree.zipper;
    let arcs = arc_dimension(z, sys);

    let mut dim_tree_upper = Vec::new();
    for &n in depths {
        let skeleton = tree.skeleton(sys, n)?;
        let cover = cover_subsystem(sys, &skeleton, n)?;
        dim_tree_upper.push(CoverDimension {
            depth: n,
            size: cover.size(),
            total: cover.total,
            dim: moran_dimension(&cover.ratios(sys))?,
        });
    }

    // K is an arc when one component passes through every vertex of P and
    // its chain uses every map, with no depth-n cylinder missing the tree.
    let through_all = tree.zipper.components.iter().zip(&tree.arc_nodes).any(|(c, nodes)| {
        let verts = sys.polyhedron().vertices();
        let eps = sys.eps(sys.polyhedron().diameter());
        let mut pieces: Vec<usize> = c.maps.iter().map(|m| m.piece).collect();
        pieces.sort_unstable();
        pieces.dedup();
        pieces.len() == sys.map_count()
            && c.maps.len() == sys.map_count()
            && verts.iter().all(|v| nodes.iter().any(|p| p.dist(v) <= eps))
    });
    let jordan_arc = through_all && dim_tree_upper.iter().all(|c| c.size == c.total);
    let gap_certified = dim_tree_upper.iter().any(|c| c.dim < dim_k - GAP_MARGIN);

    Ok(DimensionReport {
        dim_k,
        arc_dims: z
            .components
            .iter()
            .zip(&arcs.per_component)
            .map(|(c, &dim)| ComponentDimension {
                endpoints: c.endpoints,
                class: c.class,
                dim,
            })
            .collect(),
        dim_tree_upper,
        jordan_arc,
        gap_certified,
        reducible_warning: arcs.reducible,
        hausdorff: validate_system(sys).is_dendrite(),
        note: DIMENSION_NOTE,
    })
}

/// Least-squares slope of `log N(δ)` against `−log δ` over grids of side
/// `δ_k = diam(P)·r_maxᵏ`, `k = 1…n−1`, counting boxes hit by the centroids of
/// the depth-n cylinders. A diagnostic only.
pub fn box_counting_estimate(sys: &PolyhedralSystem, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidSystem("box counting needs depth at least 3".into()));
    }
    let level = hutchinson_expand(sys, n)?;
    let centers: Vec<_> = level.entries.iter().map(|e| e.cylinder.centroid()).collect();
    let rmax = sys.maps().iter().map(|s| s.ratio()).fold(0.0, f64::max);
    let diam = sys.polyhedron().diameter();
    let (lo, _) = sys.polyhedron().bounding_box();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..n {
        let delta = diam * rmax.powi(k as i32);
        let boxes: BTreeSet<Vec<i64>> = centers
            .iter()
            .map(|c| {
                c.coords()
                    .iter()
                    .zip(&lo)
                    .map(|(x, l)| ((x - l) / delta).floor() as i64)
                    .collect()
            })
            .collect();
        xs.push(-delta.ln());
        ys.push((boxes.len() as f64).ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::tree::build_multizipper;

    #[test]
    fn moran_examples() {
        assert!((moran_dimension(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        let v = moran_dimension(&[1.0 / 3.0; 5]).unwrap();
        assert!((v - 5f64.ln() / 3f64.ln()).abs() < 1e-11);
        let c = moran_dimension(&[1.0 / 9.0; 17]).unwrap();
        assert!((c - 17f64.ln() / 9f64.ln()).abs() < 1e-11);
        assert!(moran_dimension(&[]).is_err());
        assert!(moran_dimension(&[1.0]).is_err());
        // a single contraction has dimension 0
        assert_eq!(moran_dimension(&[0.5]).unwrap(), 0.0);
    }

    #[test]
    fn spectral_radius_of_small_matrices() {
        assert!((spectral_radius(&[vec![2.0, 0.0], vec![1.0, 0.5]]) - 2.0).abs() < 1e-9);
        assert!((spectral_radius(&[vec![0.0, 1.0], vec![1.0, 0.0]]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn arc_dimensions() {
        let iv = catalog::interval();
        let a = arc_dimension(&build_multizipper(&iv).unwrap(), &iv);
        assert!((a.per_component[0] - 1.0).abs() < 1e-9 && !a.reducible);

        let v = catalog::vicsek();
        let a = arc_dimension(&build_multizipper(&v).unwrap(), &v);
        assert!(a.per_component.iter().all(|d| (d - 1.0).abs() < 1e-9), "{a:?}");
        assert!(a.reducible && a.monotone);
    }

    #[test]
    fn vicsek_cover_sizes() {
        let v = catalog::vicsek();
        let tree = MainTree::new(&v).unwrap();
        for (n, expected) in [(1, 5), (2, 17), (3, 53)] {
            let s = tree.skeleton(&v, n).unwrap();
            assert_eq!(cover_subsystem(&v, &s, n).unwrap().size(), expected);
        }
        let s1 = tree.skeleton(&v, 1).unwrap();
        assert!(matches!(cover_subsystem(&v, &s1, 2), Err(Error::DepthMismatch { .. })));
    }

    #[test]
    fn reports() {
        let r = dimension_report(&catalog::interval(), &[1, 2, 3]).unwrap();
        assert!((r.dim_k - 1.0).abs() < 1e-10);
        assert!(r.jordan_arc && !r.gap_certified);
        assert!(r.dim_tree_upper.iter().all(|c| (c.dim - 1.0).abs() < 1e-10));

        let r = dimension_report(&catalog::vicsek(), &[1, 2]).unwrap();
        assert!(!r.jordan_arc && r.gap_certified && r.hausdorff);
        assert!((r.dim_tree_upper[0].dim - r.dim_k).abs() < 1e-10);
        assert!((r.dim_tree_upper[1].dim - 17f64.ln() / 9f64.ln()).abs() < 1e-9);
    }
}
