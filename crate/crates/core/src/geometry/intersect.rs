use serde::{Deserialize, Serialize};

use super::point::Point;
use super::polyhedron::{Halfspace, Polyhedron};

/// Clouds of candidate intersection vertices narrower than this many
/// tolerance units count as a single contact point.
const CONTACT_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum IntersectionClass {
    Disjoint,
    #[serde(rename_all = "camelCase")]
    SharedVertex {
        point: Point,
        index_in_first: usize,
        index_in_second: usize,
    },
    Overlap,
}

impl IntersectionClass {
    /// Same classification with the operands swapped.
    pub fn swapped(self) -> Self {
        match self {
            IntersectionClass::SharedVertex {
                point,
                index_in_first,
                index_in_second,
            } => IntersectionClass::SharedVertex {
                point,
                index_in_first: index_in_second,
                index_in_second: index_in_first,
            },
            other => other,
        }
    }

    pub fn is_overlap(&self) -> bool {
        matches!(self, IntersectionClass::Overlap)
    }
}

/// Absolute coincidence tolerance for polyhedra of size `scale` near `coords`.
pub(crate) fn abs_tol(tau: f64, scale: f64, magnitude: f64) -> f64 {
    tau * scale + 8.0 * f64::EPSILON * (magnitude + scale)
}

fn magnitude(p: &Polyhedron) -> f64 {
    p.vertices().iter().fold(0.0, |m, v| m.max(v.max_abs()))
}

/// Classifies `q1 ∩ q2` as empty, a single common vertex, or anything else.
pub fn classify_intersection(q1: &Polyhedron, q2: &Polyhedron, tau: f64) -> IntersectionClass {
    let scale = q1.diameter().max(q2.diameter());
    let eps = abs_tol(tau, scale, magnitude(q1).max(magnitude(q2)));

    let (lo1, hi1) = q1.bounding_box();
    let (lo2, hi2) = q2.bounding_box();
    if (0..q1.dim()).any(|k| lo1[k] > hi2[k] + eps || lo2[k] > hi1[k] + eps) {
        return IntersectionClass::Disjoint;
    }

    let mut hs = q1.halfspaces();
    hs.extend(q2.halfspaces());
    for h in &mut hs {
        h.offset += eps;
    }
    let cloud = feasible_vertices(&hs, eps * 1e-3);
    if cloud.is_empty() {
        return IntersectionClass::Disjoint;
    }
    if super::diameter_of(&cloud) > CONTACT_FACTOR * eps {
        return IntersectionClass::Overlap;
    }
    let point = Point::centroid(&cloud);
    match (
        q1.vertex_index(&point, CONTACT_FACTOR * eps),
        q2.vertex_index(&point, CONTACT_FACTOR * eps),
    ) {
        (Some(i), Some(j)) => IntersectionClass::SharedVertex {
            point: q1.vertices()[i].clone(),
            index_in_first: i,
            index_in_second: j,
        },
        _ => IntersectionClass::Overlap,
    }
}

/// Every vertex of `q` lies in `p` (sufficient by convexity), within tolerance.
pub fn polyhedron_contains(p: &Polyhedron, q: &Polyhedron, tau: f64) -> bool {
    let eps = abs_tol(tau, p.diameter(), magnitude(p).max(magnitude(q)));
    let hs = p.halfspaces();
    q.vertices()
        .iter()
        .all(|v| hs.iter().all(|h| h.signed_distance(v) <= eps))
}

/// Brute-force vertex enumeration of `{x : n·x <= c}` over all d-subsets of constraints.
fn feasible_vertices(hs: &[Halfspace], slack: f64) -> Vec<Point> {
    let d = hs[0].normal.dim();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    let n = hs.len();
    if n < d {
        return out;
    }
    loop {
        if let Some(x) = solve(&idx.iter().map(|&i| &hs[i]).collect::<Vec<_>>()) {
            if hs.iter().all(|h| h.signed_distance(&x) <= slack) {
                out.push(x);
            }
        }
        // next combination
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - d + k {
                idx[k] += 1;
                for l in k + 1..d {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}

fn solve(rows: &[&Halfspace]) -> Option<Point> {
    const SINGULAR: f64 = 1e-10;
    match rows.len() {
        1 => {
            let a = rows[0].normal[0];
            (a.abs() > SINGULAR).then(|| Point::from_vec_unchecked(vec![rows[0].offset / a]))
        }
        2 => {
            let (a, b) = (&rows[0].normal, &rows[1].normal);
            let det = a[0] * b[1] - a[1] * b[0];
            if det.abs() <= SINGULAR {
                return None;
            }
            let (c1, c2) = (rows[0].offset, rows[1].offset);
            Some(Point::from_vec_unchecked(vec![
                (c1 * b[1] - a[1] * c2) / det,
                (a[0] * c2 - c1 * b[0]) / det,
            ]))
        }
        _ => {
            let (a, b, c) = (&rows[0].normal, &rows[1].normal, &rows[2].normal);
            let bc = b.cross(c);
            let det = a.dot(&bc);
            if det.abs() <= SINGULAR {
                return None;
            }
            let ca = c.cross(a);
            let ab = a.cross(b);
            let x = &(&(&bc * rows[0].offset) + &(&ca * rows[1].offset)) + &(&ab * rows[2].offset);
            Some(&x * (1.0 / det))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::pt;
    use crate::geometry::similarity::Similarity;

    const TAU: f64 = 1e-9;

    fn piece(ratio: f64, t: &[f64]) -> Polyhedron {
        let base = match t.len() {
            1 => Polyhedron::interval(0.0, 1.0).unwrap(),
            2 => Polyhedron::unit_square(),
            _ => Polyhedron::unit_cube(),
        };
        base.mapped(&Similarity::scaling(ratio, pt(t)).unwrap())
    }

    fn triangle() -> Polyhedron {
        Polyhedron::polygon(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.5, 3f64.sqrt() / 2.0])]).unwrap()
    }

    #[test]
    fn vicsek_corner_pieces_are_disjoint() {
        let t = 1.0 / 3.0;
        let p1 = piece(t, &[0.0, 0.0]);
        let p2 = piece(t, &[2.0 * t, 0.0]);
        assert_eq!(classify_intersection(&p1, &p2, TAU), IntersectionClass::Disjoint);
    }

    #[test]
    fn vicsek_corner_meets_center_at_a_vertex() {
        let t = 1.0 / 3.0;
        let p1 = piece(t, &[0.0, 0.0]);
        let p5 = piece(t, &[t, t]);
        match classify_intersection(&p1, &p5, TAU) {
            IntersectionClass::SharedVertex {
                point,
                index_in_first,
                index_in_second,
            } => {
                assert!(point.dist(&pt(&[t, t])) < 1e-12);
                assert_eq!(index_in_first, 2); // image of (1,1)
                assert_eq!(index_in_second, 0); // image of (0,0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn gasket_pieces_share_midpoints() {
        let tri = triangle();
        let h = 3f64.sqrt() / 4.0;
        let a = tri.mapped(&Similarity::scaling(0.5, pt(&[0.0, 0.0])).unwrap());
        let b = tri.mapped(&Similarity::scaling(0.5, pt(&[0.5, 0.0])).unwrap());
        let c = tri.mapped(&Similarity::scaling(0.5, pt(&[0.25, h])).unwrap());
        for (x, y, m) in [(&a, &b, [0.5, 0.0]), (&a, &c, [0.25, h]), (&b, &c, [0.75, h])] {
            match classify_intersection(x, y, TAU) {
                IntersectionClass::SharedVertex { point, .. } => assert!(point.dist(&pt(&m)) < 1e-12),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn offset_squares_overlap() {
        let a = Polyhedron::unit_square();
        let b = Polyhedron::polygon(a.vertices().iter().map(|v| v + &pt(&[0.5, 0.0])).collect()).unwrap();
        assert_eq!(classify_intersection(&a, &b, TAU), IntersectionClass::Overlap);
    }

    #[test]
    fn edge_contact_is_overlap() {
        let a = piece(0.5, &[0.0, 0.0]);
        let b = piece(0.5, &[0.5, 0.0]);
        assert_eq!(classify_intersection(&a, &b, TAU), IntersectionClass::Overlap);
    }

    #[test]
    fn vertex_on_edge_contact_is_overlap() {
        let a = piece(0.5, &[0.0, 0.0]);
        let b = piece(0.25, &[0.5, 0.125]);
        assert_eq!(classify_intersection(&a, &b, TAU), IntersectionClass::Overlap);
    }

    #[test]
    fn intervals() {
        let a = piece(0.5, &[0.0]);
        let b = piece(0.5, &[0.5]);
        let c = piece(0.25, &[0.75]);
        assert!(matches!(
            classify_intersection(&a, &b, TAU),
            IntersectionClass::SharedVertex {
                index_in_first: 1,
                index_in_second: 0,
                ..
            }
        ));
        assert_eq!(classify_intersection(&a, &c, TAU), IntersectionClass::Disjoint);
        assert_eq!(classify_intersection(&b, &c, TAU), IntersectionClass::Overlap);
    }

    #[test]
    fn cubes_touching_at_a_corner() {
        let t = 1.0 / 3.0;
        let a = piece(t, &[0.0, 0.0, 0.0]);
        let b = piece(t, &[t, t, t]);
        let c = piece(t, &[t, 0.0, 0.0]);
        assert!(matches!(
            classify_intersection(&a, &b, TAU),
            IntersectionClass::SharedVertex {
                index_in_first: 6,
                index_in_second: 0,
                ..
            }
        ));
        // face contact
        assert_eq!(classify_intersection(&a, &c, TAU), IntersectionClass::Overlap);
    }

    #[test]
    fn containment_examples() {
        let sq = Polyhedron::unit_square();
        assert!(polyhedron_contains(&sq, &piece(1.0 / 3.0, &[0.0, 0.0]), TAU));
        let q = piece(0.4, &[0.9, 0.0]);
        assert!(!polyhedron_contains(&sq, &q, TAU));
        let tri = triangle();
        let corner = tri.mapped(&Similarity::scaling(0.5, pt(&[0.0, 0.0])).unwrap());
        assert!(polyhedron_contains(&tri, &corner, TAU));
    }
}
