//! Multiindices, cylinders, the Hutchinson expansion and addresses of points.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{
    classify_intersection, full_angle, polyhedron_contains, solid_angle_measure, IntersectionClass, Point, PointIndex,
    Polyhedron, Similarity,
};
use crate::validator::{words, PolyhedralSystem};

/// Cap on the depth of address searches.
pub const DEFAULT_MAX_DEPTH: usize = 40;

/// A finite word over the map indices. Letters are zero-based; the textual
/// form is one-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(letters: Vec<usize>) -> Self {
        MultiIndex(letters)
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> MultiIndex {
        let mut w = self.0.clone();
        w.push(i);
        MultiIndex(w)
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        MultiIndex(w)
    }

    pub fn is_prefix_of(&self, other: &MultiIndex) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn incomparable(&self, other: &MultiIndex) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        MultiIndex(v)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, letters: &[usize]) -> fmt::Result {
    let sep = if letters.iter().any(|&l| l >= 9) { "." } else { "" };
    for (k, l) in letters.iter().enumerate() {
        if k > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{}", l + 1)?;
    }
    Ok(())
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("∅");
        }
        write_letters(f, &self.0)
    }
}

/// Eventually periodic infinite word `preperiod · period^∞` in canonical form:
/// the period is primitive and the preperiod is as short as possible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    preperiod: MultiIndex,
    period: MultiIndex,
}

impl Address {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidSystem("address period must be nonempty".into()));
        }
        let n = period.len();
        let p = (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|k| period[k] == period[k - p]))
            .unwrap_or(n);
        let mut pre = preperiod;
        let mut per: Vec<usize> = period[..p].to_vec();
        while pre.last().is_some_and(|&l| l == per[p - 1]) {
            pre.pop();
            per.rotate_right(1);
        }
        Ok(Address {
            preperiod: MultiIndex(pre),
            period: MultiIndex(per),
        })
    }

    pub fn preperiod(&self) -> &MultiIndex {
        &self.preperiod
    }

    pub fn period(&self) -> &MultiIndex {
        &self.period
    }

    pub fn letter(&self, k: usize) -> usize {
        let pre = self.preperiod.len();
        if k < pre {
            self.preperiod.0[k]
        } else {
            self.period.0[(k - pre) % self.period.len()]
        }
    }

    pub fn prefix(&self, n: usize) -> MultiIndex {
        MultiIndex((0..n).map(|k| self.letter(k)).collect())
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let all: Vec<usize> = self.preperiod.0.iter().chain(&self.period.0).copied().collect();
        let sep = if all.iter().any(|&l| l >= 9) { "." } else { "" };
        write_letters(f, &self.preperiod.0)?;
        if !self.preperiod.is_empty() {
            f.write_str(sep)?;
        }
        f.write_str("(")?;
        write_letters(f, &self.period.0)?;
        f.write_str(")")
    }
}

impl Serialize for Address {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Address", 3)?;
        st.serialize_field("preperiod", &self.preperiod)?;
        st.serialize_field("period", &self.period)?;
        st.serialize_field("notation", &self.to_string())?;
        st.end()
    }
}

pub fn cylinder(sys: &PolyhedralSystem, j: &MultiIndex) -> Polyhedron {
    sys.polyhedron().mapped(&sys.compose(j.letters()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionEntry {
    pub word: MultiIndex,
    pub map: Similarity,
    pub cylinder: Polyhedron,
}

impl ExpansionEntry {
    /// `S_j(V_P)`, in the order of `V_P`.
    pub fn vertex_images(&self) -> &[Point] {
        self.cylinder.vertices()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionLevel {
    pub depth: usize,
    pub entries: Vec<ExpansionEntry>,
}

impl ExpansionLevel {
    /// Distinct points where two depth-n cylinders meet.
    pub fn shared_points(&self, sys: &PolyhedralSystem) -> Vec<Point> {
        let scale = self.entries.iter().map(|e| e.cylinder.diameter()).fold(0.0, f64::max);
        let mut index = PointIndex::new(sys.eps(scale));
        for (a, x) in self.entries.iter().enumerate() {
            for y in &self.entries[a + 1..] {
                if let IntersectionClass::SharedVertex { point, .. } =
                    classify_intersection(&x.cylinder, &y.cylinder, sys.tolerance())
                {
                    index.insert(&point);
                }
            }
        }
        index.into_points()
    }
}

pub fn hutchinson_expand(sys: &PolyhedralSystem, n: usize) -> Result<ExpansionLevel> {
    sys.check_budget(n)?;
    let entries = words(sys.map_count(), n)
        .into_iter()
        .map(|w| {
            let map = sys.compose(&w);
            let cylinder = sys.polyhedron().mapped(&map);
            ExpansionEntry {
                word: MultiIndex(w),
                map,
                cylinder,
            }
        })
        .collect();
    Ok(ExpansionLevel { depth: n, entries })
}

/// Transitions `v --i--> v'` whenever `S_i(v') = v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexAutomaton {
    /// `transitions[v]` lists `(i, v')`.
    pub transitions: Vec<Vec<(usize, usize)>>,
}

impl VertexAutomaton {
    pub fn state_count(&self) -> usize {
        self.transitions.len()
    }

    /// Eventually periodic paths from `start`; `InfiniteAddressSet` if a
    /// cycle can be left, which makes the path set uncountable.
    pub fn paths_from(&self, start: usize) -> Result<Vec<(Address, usize)>> {
        let reach = self.reachable(start);
        for &v in &reach {
            if self.transitions[v].len() > 1 && self.on_cycle(v) {
                return Err(Error::InfiniteAddressSet);
            }
        }
        let mut out = Vec::new();
        let mut states = vec![start];
        let mut letters = Vec::new();
        self.walk(&mut states, &mut letters, &mut out)?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    fn walk(&self, states: &mut Vec<usize>, letters: &mut Vec<usize>, out: &mut Vec<(Address, usize)>) -> Result<()> {
        let v = *states.last().expect("nonempty path");
        for &(i, w) in &self.transitions[v] {
            if let Some(pos) = states.iter().position(|&s| s == w) {
                letters.push(i);
                let addr = Address::new(letters[..pos].to_vec(), letters[pos..].to_vec())?;
                // the state reached after the canonical preperiod
                let pre = addr.preperiod().len();
                out.push((addr, states[pre]));
                letters.pop();
            } else {
                states.push(w);
                letters.push(i);
                self.walk(states, letters, out)?;
                states.pop();
                letters.pop();
            }
        }
        Ok(())
    }

    fn reachable(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.transitions.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &(_, w) in &self.transitions[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        (0..seen.len()).filter(|&v| seen[v]).collect()
    }

    fn on_cycle(&self, v: usize) -> bool {
        self.transitions[v].iter().any(|&(_, w)| self.reachable(w).contains(&v))
    }
}

pub fn build_vertex_automaton(sys: &PolyhedralSystem) -> VertexAutomaton {
    let p = sys.polyhedron();
    let eps = sys.eps(p.diameter());
    let pieces = sys.pieces();
    let transitions = p
        .vertices()
        .iter()
        .map(|v| {
            pieces
                .iter()
                .enumerate()
                .filter_map(|(i, q)| q.vertex_index(v, eps).map(|k| (i, k)))
                .collect()
        })
        .collect();
    VertexAutomaton { transitions }
}

/// θ_A for every vertex of P.
pub fn vertex_angles(p: &Polyhedron) -> Result<Vec<f64>> {
    (0..p.vertex_count())
        .map(|k| solid_angle_measure(p, k).map(|a| a.measure))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AddressBranch {
    pub address: Address,
    /// Vertex of P that the periodic tail of the address codes.
    pub cycle_vertex: usize,
    /// Solid angle of the branch cylinders at the point.
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointAddresses {
    pub point: Point,
    pub branches: Vec<AddressBranch>,
    /// Index of the vertex of P at the point, if it is one.
    pub vertex_of_p: Option<usize>,
    /// θ_A at a vertex of P, θ_F elsewhere.
    pub available_angle: f64,
    pub theta_min: f64,
    /// Depth at which the branch cylinders were compared.
    pub stabilization_depth: usize,
    /// Branch cylinders at that depth meet pairwise only at the point.
    pub branches_point_disjoint: bool,
}

impl PointAddresses {
    pub fn count(&self) -> usize {
        self.branches.len()
    }

    pub fn addresses(&self) -> Vec<Address> {
        self.branches.iter().map(|b| b.address.clone()).collect()
    }

    /// `n_x · θ_min ≤ θ` within rounding.
    pub fn angle_budget_holds(&self) -> bool {
        self.count() as f64 * self.theta_min <= self.available_angle * (1.0 + 1e-9)
    }

    /// `floor(θ / θ_min)`.
    pub fn safe_count_bound(&self) -> usize {
        (self.available_angle / self.theta_min * (1.0 + 1e-12)).floor() as usize
    }
}

/// Enumerates `π⁻¹(x)` for a point of `G_𝒮(V_P)`.
///
/// Returns `NotAVertexPoint` with the covering chain prefix when `x` is not a
/// vertex image down to `max_depth` (or to the numerical resolution limit).
pub fn addresses_of_point(sys: &PolyhedralSystem, x: &Point, max_depth: usize) -> Result<PointAddresses> {
    if x.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            expected: sys.dim(),
            actual: x.dim(),
        });
    }
    let p = sys.polyhedron();
    let floor = sys.eps(0.0);
    let automaton = build_vertex_automaton(sys);
    let angles = vertex_angles(p)?;
    let theta_min = angles.iter().copied().fold(f64::INFINITY, f64::min);

    let mut hits: Vec<(MultiIndex, usize)> = Vec::new();
    let mut frontier: Vec<(MultiIndex, Similarity)> = Vec::new();
    let root = p.diameter();
    if p.contains_point(x, sys.eps(root)) {
        frontier.push((MultiIndex::empty(), Similarity::identity(sys.dim())));
    }
    let mut depth = 0;
    let mut last_chain = MultiIndex::empty();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (w, s) in frontier {
            let cyl = p.mapped(&s);
            let eps = sys.eps(cyl.diameter());
            if let Some(k) = cyl.vertex_index(x, eps) {
                hits.push((w, k));
                continue;
            }
            last_chain = w.clone();
            if depth >= max_depth || cyl.diameter() < 1e4 * floor {
                return Err(Error::NotAVertexPoint {
                    max_depth: depth,
                    prefix: w.letters().to_vec(),
                });
            }
            for (i, m) in sys.maps().iter().enumerate() {
                let t = s.compose(m);
                let child = p.mapped(&t);
                if child.contains_point(x, sys.eps(child.diameter())) {
                    next.push((w.child(i), t));
                }
            }
        }
        frontier = next;
        depth += 1;
    }
    if hits.is_empty() {
        return Err(Error::NotAVertexPoint {
            max_depth: depth,
            prefix: last_chain.letters().to_vec(),
        });
    }

    let mut branches = Vec::new();
    for (w, k) in &hits {
        for (tail, state) in automaton.paths_from(*k)? {
            let mut pre = w.letters().to_vec();
            pre.extend_from_slice(tail.preperiod().letters());
            let address = Address::new(pre, tail.period().letters().to_vec())?;
            branches.push(AddressBranch {
                address,
                cycle_vertex: state,
                angle: angles[state],
            });
        }
    }
    branches.sort_by(|a, b| a.address.cmp(&b.address));
    branches.dedup_by(|a, b| a.address == b.address);

    let vertex_of_p = p.vertex_index(x, sys.eps(root));
    let available_angle = match vertex_of_p {
        Some(k) => angles[k],
        None => full_angle(sys.dim()),
    };
    let stabilization_depth = branches
        .iter()
        .map(|b| b.address.preperiod().len() + b.address.period().len())
        .max()
        .unwrap_or(0);
    let cylinders: Vec<Polyhedron> = branches
        .iter()
        .map(|b| cylinder(sys, &b.address.prefix(stabilization_depth)))
        .collect();
    let mut disjoint = true;
    for a in 0..cylinders.len() {
        for b in a + 1..cylinders.len() {
            match classify_intersection(&cylinders[a], &cylinders[b], sys.tolerance()) {
                IntersectionClass::SharedVertex { point, .. } if point.dist(x) <= sys.eps(root) => {}
                _ => disjoint = false,
            }
        }
    }
    Ok(PointAddresses {
        point: x.clone(),
        branches,
        vertex_of_p,
        available_angle,
        theta_min,
        stabilization_depth,
        branches_point_disjoint: disjoint,
    })
}

/// Whether `x` is a vertex image `S_j(A)` for some word of length at most `max_depth`.
pub fn is_vertex_image(sys: &PolyhedralSystem, x: &Point, max_depth: usize) -> bool {
    addresses_of_point(sys, x, max_depth).is_ok()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StructureViolation {
    pub first: MultiIndex,
    pub second: MultiIndex,
}

/// Results of the exhaustive cylinder-structure checks up to a depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CylinderStructureReport {
    pub depth: usize,
    pub words_checked: usize,
    pub pairs_checked: usize,
    /// Pairs where `P_j ⊆ P_i` disagrees with `i ⊑ j`.
    pub nesting: Vec<StructureViolation>,
    /// Pairs `i ⊑ j` with a point of `S_i(V_P) ∩ P_j` outside `S_j(V_P)`.
    pub persistence: Vec<StructureViolation>,
    /// Incomparable pairs meeting in more than a mutual vertex image.
    pub incomparable: Vec<StructureViolation>,
}

impl CylinderStructureReport {
    pub fn is_clean(&self) -> bool {
        self.nesting.is_empty() && self.persistence.is_empty() && self.incomparable.is_empty()
    }
}

pub fn check_cylinder_structure(sys: &PolyhedralSystem, depth: usize) -> Result<CylinderStructureReport> {
    sys.check_budget(depth)?;
    let mut all: Vec<(MultiIndex, Polyhedron)> = Vec::new();
    for n in 0..=depth {
        for e in hutchinson_expand(sys, n)?.entries {
            all.push((e.word, e.cylinder));
        }
    }
    let tau = sys.tolerance();
    let mut report = CylinderStructureReport {
        depth,
        words_checked: all.len(),
        pairs_checked: 0,
        nesting: Vec::new(),
        persistence: Vec::new(),
        incomparable: Vec::new(),
    };
    let violation = |a: &MultiIndex, b: &MultiIndex| StructureViolation {
        first: a.clone(),
        second: b.clone(),
    };
    for (i, pi) in &all {
        for (j, pj) in &all {
            if i == j {
                continue;
            }
            report.pairs_checked += 1;
            let prefix = i.is_prefix_of(j);
            let contained = polyhedron_contains(pi, pj, tau);
            if contained != prefix {
                report.nesting.push(violation(i, j));
            }
            if prefix {
                let eps = sys.eps(pj.diameter());
                let stray = pi
                    .vertices()
                    .iter()
                    .any(|v| pj.contains_point(v, eps) && pj.vertex_index(v, eps).is_none());
                if stray {
                    report.persistence.push(violation(i, j));
                }
            } else if i < j && i.incomparable(j) {
                match classify_intersection(pi, pj, tau) {
                    IntersectionClass::Overlap => report.incomparable.push(violation(i, j)),
                    IntersectionClass::SharedVertex { .. } | IntersectionClass::Disjoint => {}
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::pt;

    fn addr(pre: &[usize], per: &[usize]) -> Address {
        Address::new(pre.to_vec(), per.to_vec()).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(addr(&[0, 1, 1], &[1, 1]), addr(&[0], &[1]));
        assert_eq!(addr(&[2, 0, 1], &[0, 1]), addr(&[2], &[0, 1]));
        assert_eq!(addr(&[], &[0, 1, 0, 1]).period().len(), 2);
        assert_eq!(addr(&[0], &[2]).to_string(), "1(3)");
        assert_eq!(addr(&[], &[0]).to_string(), "(1)");
        assert_eq!(addr(&[0], &[2]).prefix(4).letters(), &[0, 2, 2, 2]);
    }

    #[test]
    fn cylinder_examples() {
        let v = catalog::vicsek();
        let c = cylinder(&v, &MultiIndex::new(vec![4]));
        assert!(c.vertices()[0].dist(&pt(&[1.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        assert!(c.vertices()[2].dist(&pt(&[2.0 / 3.0, 2.0 / 3.0])) < 1e-15);
        let c = cylinder(&v, &MultiIndex::new(vec![0, 2]));
        assert!(c.vertices()[0].dist(&pt(&[2.0 / 9.0, 2.0 / 9.0])) < 1e-15);
        assert!(c.vertices()[2].dist(&pt(&[1.0 / 3.0, 1.0 / 3.0])) < 1e-15);
        let c = cylinder(&catalog::interval(), &MultiIndex::new(vec![1, 0]));
        assert!((c.vertices()[0][0] - 0.5).abs() < 1e-15 && (c.vertices()[1][0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn expansion_sizes_and_shared_points() {
        let v = catalog::vicsek();
        let level = hutchinson_expand(&v, 2).unwrap();
        assert_eq!(level.entries.len(), 25);
        assert!(level
            .entries
            .iter()
            .all(|e| (e.cylinder.diameter() - 2f64.sqrt() / 9.0).abs() < 1e-14));
        assert_eq!(level.shared_points(&v).len(), 24);

        let iv = hutchinson_expand(&catalog::interval(), 3).unwrap();
        let mut lefts: Vec<f64> = iv.entries.iter().map(|e| e.cylinder.vertices()[0][0]).collect();
        lefts.sort_by(f64::total_cmp);
        for (k, l) in lefts.iter().enumerate() {
            assert!((l - k as f64 / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn automata() {
        let iv = build_vertex_automaton(&catalog::interval());
        assert_eq!(iv.transitions, vec![vec![(0, 0)], vec![(1, 1)]]);
        let v = build_vertex_automaton(&catalog::vicsek());
        for k in 0..4 {
            assert_eq!(v.transitions[k], vec![(k, k)]);
        }
        let g = build_vertex_automaton(&catalog::gasket());
        for k in 0..3 {
            assert_eq!(g.transitions[k], vec![(k, k)]);
        }
    }

    #[test]
    fn interval_midpoint_has_two_addresses() {
        let a = addresses_of_point(&catalog::interval(), &pt(&[0.5]), DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(a.addresses(), vec![addr(&[0], &[1]), addr(&[1], &[0])]);
        assert!(a.branches_point_disjoint);
        assert!(a.angle_budget_holds());
        assert_eq!(a.safe_count_bound(), 2);
    }

    #[test]
    fn vicsek_addresses() {
        let v = catalog::vicsek();
        let t = 1.0 / 3.0;
        let a = addresses_of_point(&v, &pt(&[t, t]), DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(a.addresses(), vec![addr(&[0], &[2]), addr(&[4], &[0])]);
        assert_eq!(a.branches[0].cycle_vertex, 2);
        assert_eq!(a.branches[1].cycle_vertex, 0);
        assert!(a.branches_point_disjoint && a.angle_budget_holds());

        let a = addresses_of_point(&v, &pt(&[0.0, 0.0]), DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(a.addresses(), vec![addr(&[], &[0])]);
        assert_eq!(a.vertex_of_p, Some(0));

        // a deeper vertex image: S_1 S_5 (A_3)
        let x = pt(&[2.0 / 9.0, 2.0 / 9.0]);
        let a = addresses_of_point(&v, &x, DEFAULT_MAX_DEPTH).unwrap();
        assert_eq!(a.addresses(), vec![addr(&[0, 2], &[0]), addr(&[0, 4], &[2])]);
    }

    #[test]
    fn non_vertex_point_reports_its_chain() {
        match addresses_of_point(&catalog::vicsek(), &pt(&[0.5, 0.5]), 6) {
            Err(Error::NotAVertexPoint { prefix, .. }) => assert_eq!(prefix, vec![4; 6]),
            other => panic!("{other:?}"),
        }
        assert!(addresses_of_point(&catalog::vicsek(), &pt(&[0.5]), 6).is_err());
    }

    #[test]
    fn cylinder_structure_is_clean_for_valid_systems() {
        let r = check_cylinder_structure(&catalog::vicsek(), 2).unwrap();
        assert_eq!(r.words_checked, 31);
        assert!(r.is_clean(), "{r:?}");
        assert!(check_cylinder_structure(&catalog::interval(), 3).unwrap().is_clean());
    }
}
