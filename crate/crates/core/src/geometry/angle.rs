use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::point::Point;
use super::polyhedron::Polyhedron;
use crate::error::{Error, Result};

/// (d−1)-dimensional measure of a vertex cone, with the full-angle measure
/// of the ambient space alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidAngleValue {
    pub measure: f64,
    pub full: f64,
}

/// θ_F: 2 directions on a line, 2π radians, 4π steradians.
pub fn full_angle(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

pub fn solid_angle_measure(p: &Polyhedron, vertex: usize) -> Result<SolidAngleValue> {
    if vertex >= p.vertex_count() {
        return Err(Error::InvalidPolyhedron(format!("no vertex {vertex}")));
    }
    let measure = cone_measure(&p.cone_directions(vertex));
    if measure.is_nan() || measure <= 1e-12 {
        return Err(Error::DegenerateAngle(vertex));
    }
    Ok(SolidAngleValue {
        measure,
        full: full_angle(p.dim()),
    })
}

/// Measure of the convex cone spanned by unit edge directions.
pub fn cone_measure(dirs: &[Point]) -> f64 {
    match dirs.first().map(Point::dim) {
        None => 0.0,
        Some(1) => 1.0,
        Some(2) => dirs[0].dot(&dirs[1]).clamp(-1.0, 1.0).acos(),
        Some(_) => {
            let ordered = cyclic_order(dirs);
            let a = &ordered[0];
            ordered[1..]
                .windows(2)
                .map(|w| triangle_solid_angle(a, &w[0], &w[1]))
                .sum()
        }
    }
}

/// Solid angle of the spherical triangle with unit vertices a, b, c (Van Oosterom–Strackee).
fn triangle_solid_angle(a: &Point, b: &Point, c: &Point) -> f64 {
    let num = a.dot(&b.cross(c)).abs();
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// Sorts the edge directions of a pointed convex cone by angle around its axis.
fn cyclic_order(dirs: &[Point]) -> Vec<Point> {
    let axis = Point::centroid(dirs).normalized();
    let helper = if axis[0].abs() < 0.9 {
        Point::from_vec_unchecked(vec![1.0, 0.0, 0.0])
    } else {
        Point::from_vec_unchecked(vec![0.0, 1.0, 0.0])
    };
    let e1 = axis.cross(&helper).normalized();
    let e2 = axis.cross(&e1);
    let mut keyed: Vec<(f64, Point)> = dirs.iter().map(|d| (d.dot(&e2).atan2(d.dot(&e1)), d.clone())).collect();
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0));
    keyed.into_iter().map(|(_, d)| d).collect()
}
