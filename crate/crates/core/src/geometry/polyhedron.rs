use serde::{Deserialize, Serialize};

use super::point::Point;
use super::similarity::Similarity;
use crate::error::{Error, Result};

/// Relative tolerance for the convexity checks done at construction.
const SHAPE_TOL: f64 = 1e-9;

/// `normal · x <= offset`, with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Point,
    pub offset: f64,
}

impl Halfspace {
    pub fn signed_distance(&self, x: &Point) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// A convex polytope in R^d, d in {1, 2, 3}.
///
/// Vertex order is meaningful: the k-th vertex of an image polyhedron is the
/// image of the k-th vertex of the source. For d = 2 the vertices are in
/// cyclic order (either orientation, since reflections reverse it); for
/// d = 3 the facial structure is a list of vertex-index cycles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    vertices: Vec<Point>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    faces: Vec<Vec<usize>>,
}

impl Polyhedron {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![Point::new(vec![a])?, Point::new(vec![b])?], Vec::new())
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        Self::new(vertices, Vec::new())
    }

    pub fn polytope(vertices: Vec<Point>, faces: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(vertices, faces)
    }

    pub fn unit_square() -> Self {
        Self::polygon(vec![
            Point::from_vec_unchecked(vec![0.0, 0.0]),
            Point::from_vec_unchecked(vec![1.0, 0.0]),
            Point::from_vec_unchecked(vec![1.0, 1.0]),
            Point::from_vec_unchecked(vec![0.0, 1.0]),
        ])
        .expect("unit square")
    }

    pub fn unit_cube() -> Self {
        let v = |x: f64, y: f64, z: f64| Point::from_vec_unchecked(vec![x, y, z]);
        let vertices = vec![
            v(0., 0., 0.),
            v(1., 0., 0.),
            v(1., 1., 0.),
            v(0., 1., 0.),
            v(0., 0., 1.),
            v(1., 0., 1.),
            v(1., 1., 1.),
            v(0., 1., 1.),
        ];
        let faces = vec![
            vec![0, 3, 2, 1],
            vec![4, 5, 6, 7],
            vec![0, 1, 5, 4],
            vec![2, 3, 7, 6],
            vec![1, 2, 6, 5],
            vec![0, 4, 7, 3],
        ];
        Self::polytope(vertices, faces).expect("unit cube")
    }

    /// Validates and builds a polytope of the dimension given by the vertex coordinates.
    pub fn new(vertices: Vec<Point>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let d = vertices
            .first()
            .map(Point::dim)
            .ok_or_else(|| Error::InvalidPolyhedron("no vertices".into()))?;
        if let Some(p) = vertices.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: p.dim(),
            });
        }
        let poly = Polyhedron { vertices, faces };
        match d {
            1 => poly.check_interval()?,
            2 => poly.check_polygon()?,
            3 => poly.check_polytope()?,
            _ => return Err(Error::UnsupportedDimension(d)),
        }
        Ok(poly)
    }

    fn check_interval(&self) -> Result<()> {
        if self.vertices.len() != 2 {
            return Err(Error::InvalidPolyhedron(format!(
                "a segment has 2 endpoints, got {}",
                self.vertices.len()
            )));
        }
        if !self.faces.is_empty() {
            return Err(Error::InvalidPolyhedron("faces given for d = 1".into()));
        }
        if self.vertices[0].dist(&self.vertices[1]) == 0.0 {
            return Err(Error::InvalidPolyhedron("degenerate segment".into()));
        }
        Ok(())
    }

    fn check_polygon(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 3 {
            return Err(Error::InvalidPolyhedron(format!("polygon with {n} vertices")));
        }
        if !self.faces.is_empty() {
            return Err(Error::InvalidPolyhedron("faces given for d = 2".into()));
        }
        let diam = self.diameter();
        let v = &self.vertices;
        let mut sign = 0.0;
        let mut turning = 0.0;
        for i in 0..n {
            let a = &v[(i + n - 1) % n];
            let b = &v[i];
            let c = &v[(i + 1) % n];
            let (e1, e2) = (b - a, c - b);
            let cross = e1[0] * e2[1] - e1[1] * e2[0];
            if cross.abs() <= SHAPE_TOL * diam * diam {
                return Err(Error::InvalidPolyhedron(format!(
                    "vertex {i} is not an extreme point (collinear neighbours)"
                )));
            }
            if sign == 0.0 {
                sign = cross.signum();
            } else if cross.signum() != sign {
                return Err(Error::InvalidPolyhedron(format!("polygon is not convex at vertex {i}")));
            }
            turning += cross.atan2(e1.dot(&e2));
        }
        if (turning.abs() - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidPolyhedron("polygon boundary winds more than once".into()));
        }
        Ok(())
    }

    fn check_polytope(&self) -> Result<()> {
        let n = self.vertices.len();
        if n < 4 || self.faces.len() < 4 {
            return Err(Error::InvalidPolyhedron(format!(
                "a 3-polytope needs at least 4 vertices and 4 faces, got {n} and {}",
                self.faces.len()
            )));
        }
        let diam = self.diameter();
        let tol = SHAPE_TOL * diam;
        let mut edge_count = std::collections::HashMap::<(usize, usize), usize>::new();
        for (fi, face) in self.faces.iter().enumerate() {
            if face.len() < 3 || face.iter().any(|&k| k >= n) {
                return Err(Error::InvalidPolyhedron(format!("face {fi} is malformed")));
            }
            let mut seen = face.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != face.len() {
                return Err(Error::InvalidPolyhedron(format!("face {fi} repeats a vertex")));
            }
            for k in 0..face.len() {
                let (a, b) = (face[k], face[(k + 1) % face.len()]);
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        if edge_count.values().any(|&c| c != 2) {
            return Err(Error::InvalidPolyhedron("face list is not a closed surface".into()));
        }
        let euler = n as i64 - edge_count.len() as i64 + self.faces.len() as i64;
        if euler != 2 {
            return Err(Error::InvalidPolyhedron(format!("Euler characteristic {euler} != 2")));
        }
        let hs = self.halfspaces();
        for (fi, face) in self.faces.iter().enumerate() {
            for &k in face {
                if hs[fi].signed_distance(&self.vertices[k]).abs() > tol {
                    return Err(Error::InvalidPolyhedron(format!("face {fi} is not planar")));
                }
            }
            for (k, p) in self.vertices.iter().enumerate() {
                if hs[fi].signed_distance(p) > tol {
                    return Err(Error::InvalidPolyhedron(format!(
                        "vertex {k} lies outside face {fi}: not convex"
                    )));
                }
            }
        }
        for k in 0..n {
            let normals: Vec<&Point> = self
                .faces
                .iter()
                .zip(&hs)
                .filter(|(f, _)| f.contains(&k))
                .map(|(_, h)| &h.normal)
                .collect();
            let mut spans = false;
            for a in 0..normals.len() {
                for b in a + 1..normals.len() {
                    for c in b + 1..normals.len() {
                        spans |= normals[a].cross(normals[b]).dot(normals[c]).abs() > 1e-6;
                    }
                }
            }
            if !spans {
                return Err(Error::InvalidPolyhedron(format!("vertex {k} is not an extreme point")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Maximum pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        super::diameter_of(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        Point::centroid(&self.vertices)
    }

    pub(crate) fn mapped(&self, s: &Similarity) -> Polyhedron {
        Polyhedron {
            vertices: self.vertices.iter().map(|v| s.apply_unchecked(v)).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Outward facet halfspaces.
    pub fn halfspaces(&self) -> Vec<Halfspace> {
        let c = self.centroid();
        let orient = |normal: Point, anchor: &Point| {
            let normal = normal.normalized();
            let normal = if normal.dot(&(&c - anchor)) > 0.0 {
                &normal * -1.0
            } else {
                normal
            };
            let offset = normal.dot(anchor);
            Halfspace { normal, offset }
        };
        let v = &self.vertices;
        match self.dim() {
            1 => vec![
                orient(Point::from_vec_unchecked(vec![1.0]), &v[0]),
                orient(Point::from_vec_unchecked(vec![1.0]), &v[1]),
            ],
            2 => (0..v.len())
                .map(|i| {
                    let e = &v[(i + 1) % v.len()] - &v[i];
                    orient(Point::from_vec_unchecked(vec![e[1], -e[0]]), &v[i])
                })
                .collect(),
            _ => self
                .faces
                .iter()
                .map(|face| {
                    // Newell's method
                    let mut nrm = [0.0; 3];
                    for k in 0..face.len() {
                        let a = &v[face[k]];
                        let b = &v[face[(k + 1) % face.len()]];
                        nrm[0] += (a[1] - b[1]) * (a[2] + b[2]);
                        nrm[1] += (a[2] - b[2]) * (a[0] + b[0]);
                        nrm[2] += (a[0] - b[0]) * (a[1] + b[1]);
                    }
                    let anchor = Point::centroid(face.iter().map(|&k| &v[k]));
                    orient(Point::from_vec_unchecked(nrm.to_vec()), &anchor)
                })
                .collect(),
        }
    }

    pub fn contains_point(&self, x: &Point, eps: f64) -> bool {
        self.halfspaces().iter().all(|h| h.signed_distance(x) <= eps)
    }

    /// Index of the vertex within `eps` of `x`, if any.
    pub fn vertex_index(&self, x: &Point, eps: f64) -> Option<usize> {
        self.vertices.iter().position(|v| v.dist(x) <= eps)
    }

    /// Indices of the vertices adjacent to vertex `i` along edges.
    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        let n = self.vertices.len();
        match self.dim() {
            1 => vec![1 - i],
            2 => vec![(i + n - 1) % n, (i + 1) % n],
            _ => {
                let mut out = Vec::new();
                for face in &self.faces {
                    if let Some(pos) = face.iter().position(|&k| k == i) {
                        let l = face.len();
                        for k in [face[(pos + l - 1) % l], face[(pos + 1) % l]] {
                            if !out.contains(&k) {
                                out.push(k);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Unit directions of the edges leaving vertex `i`; they span the vertex cone.
    pub fn cone_directions(&self, i: usize) -> Vec<Point> {
        let v = &self.vertices[i];
        self.neighbours(i)
            .into_iter()
            .map(|k| (&self.vertices[k] - v).normalized())
            .collect()
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for k in 0..d {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point::pt;

    #[test]
    fn rejects_non_convex_polygon() {
        let dart = vec![pt(&[0.0, 0.0]), pt(&[2.0, 1.0]), pt(&[0.0, 2.0]), pt(&[0.5, 1.0])];
        assert!(Polyhedron::polygon(dart).is_err());
    }

    #[test]
    fn rejects_non_extreme_vertex() {
        let sq = vec![
            pt(&[0.0, 0.0]),
            pt(&[0.5, 0.0]),
            pt(&[1.0, 0.0]),
            pt(&[1.0, 1.0]),
            pt(&[0.0, 1.0]),
        ];
        assert!(Polyhedron::polygon(sq).is_err());
    }

    #[test]
    fn rejects_self_winding_polygon() {
        // pentagram order: every turn has the same sign but the boundary winds twice
        let star: Vec<Point> = (0..5)
            .map(|k| {
                let a = std::f64::consts::TAU * (2 * k) as f64 / 5.0;
                pt(&[a.cos(), a.sin()])
            })
            .collect();
        assert!(Polyhedron::polygon(star).is_err());
    }

    #[test]
    fn accepts_clockwise_polygon() {
        let cw = vec![pt(&[0.0, 0.0]), pt(&[0.0, 1.0]), pt(&[1.0, 1.0]), pt(&[1.0, 0.0])];
        let p = Polyhedron::polygon(cw).unwrap();
        assert!(p.contains_point(&pt(&[0.5, 0.5]), 0.0));
        assert!(!p.contains_point(&pt(&[1.5, 0.5]), 1e-9));
    }

    #[test]
    fn cube_is_valid_and_bad_faces_are_not() {
        let cube = Polyhedron::unit_cube();
        assert_eq!(cube.halfspaces().len(), 6);
        assert!(cube.contains_point(&pt(&[0.5, 0.5, 0.5]), 0.0));
        assert_eq!(cube.neighbours(0).len(), 3);

        let mut faces = cube.faces().to_vec();
        faces.pop();
        assert!(Polyhedron::polytope(cube.vertices().to_vec(), faces).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert!((Polyhedron::unit_square().diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Polyhedron::interval(0.0, 1.0).unwrap().diameter(), 1.0);
        let t = 1.0 / 3.0;
        let p5 = Polyhedron::unit_square().mapped(&Similarity::scaling(t, pt(&[t, t])).unwrap());
        assert!((p5.diameter() - 2f64.sqrt() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn interval_halfspaces_any_endpoint_order() {
        let iv = Polyhedron::interval(1.0, 0.0).unwrap();
        assert!(iv.contains_point(&pt(&[0.25]), 0.0));
        assert!(!iv.contains_point(&pt(&[-0.25]), 1e-9));
    }
}
