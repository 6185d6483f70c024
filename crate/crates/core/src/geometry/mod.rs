//! Points, similarities and convex polytopes in R^1, R^2 and R^3.
//!
//! All coincidence tests take a relative tolerance `tau`; absolute
//! tolerances are derived from the size of the operands.

mod angle;
mod intersect;
mod point;
mod polyhedron;
mod similarity;

pub use angle::{cone_measure, full_angle, solid_angle_measure, SolidAngleValue};
pub(crate) use intersect::abs_tol;
pub use intersect::{classify_intersection, polyhedron_contains, IntersectionClass};
pub use point::{pt, Point, PointIndex};
pub use polyhedron::{Halfspace, Polyhedron};
pub use similarity::Similarity;

/// Default relative coincidence tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub fn apply_similarity(s: &Similarity, x: &Point) -> crate::Result<Point> {
    s.apply(x)
}

pub fn similarity_from_vertex_map(source: &Polyhedron, targets: &[Point], tau: f64) -> crate::Result<Similarity> {
    Similarity::from_vertex_map(source, targets, tau)
}

pub fn diameter(p: &Polyhedron) -> f64 {
    p.diameter()
}

pub(crate) fn diameter_of(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(points[i].dist(&points[j]));
        }
    }
    best
}
