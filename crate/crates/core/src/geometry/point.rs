use std::fmt;
use std::ops::{Add, Index, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of R^d, d in {1, 2, 3}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || coords.len() > 3 {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPolyhedron(format!("non-finite coordinate in {coords:?}")));
        }
        Ok(Point { coords })
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    pub fn origin(dim: usize) -> Self {
        Point { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Point {
        let n = self.norm();
        self * (1.0 / n)
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// 3d cross product. Panics unless both points are 3-dimensional.
    pub fn cross(&self, other: &Point) -> Point {
        let (a, b) = (&self.coords, &other.coords);
        Point {
            coords: vec![
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            ],
        }
    }

    pub fn centroid<'a>(points: impl IntoIterator<Item = &'a Point>) -> Point {
        let mut iter = points.into_iter();
        let first = iter.next().expect("centroid of an empty point set").clone();
        let mut n = 1.0;
        let acc = iter.fold(first, |acc, p| {
            n += 1.0;
            &acc + p
        });
        &acc * (1.0 / n)
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point {
            coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point {
            coords: self.coords.iter().map(|a| a * k).collect(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Convenience constructor used throughout tests and fixtures.
pub fn pt(coords: &[f64]) -> Point {
    Point::new(coords.to_vec()).expect("valid point")
}

/// Spatial hash for merging points that coincide within a tolerance.
#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    tol: f64,
    points: Vec<Point>,
    buckets: std::collections::HashMap<Vec<i64>, Vec<usize>>,
}

impl PointIndex {
    pub fn new(tol: f64) -> Self {
        PointIndex {
            cell: tol * 4.0,
            tol,
            points: Vec::new(),
            buckets: Default::default(),
        }
    }

    fn key(&self, p: &Point) -> Vec<i64> {
        p.coords().iter().map(|c| (c / self.cell).floor() as i64).collect()
    }

    pub fn find(&self, p: &Point) -> Option<usize> {
        let key = self.key(p);
        let d = key.len();
        let mut offsets = vec![-1i64; d];
        loop {
            let probe: Vec<i64> = key.iter().zip(&offsets).map(|(k, o)| k + o).collect();
            if let Some(ids) = self.buckets.get(&probe) {
                if let Some(&id) = ids.iter().find(|&&id| self.points[id].dist(p) <= self.tol) {
                    return Some(id);
                }
            }
            // odometer over {-1,0,1}^d
            let mut i = 0;
            loop {
                if i == d {
                    return None;
                }
                offsets[i] += 1;
                if offsets[i] <= 1 {
                    break;
                }
                offsets[i] = -1;
                i += 1;
            }
        }
    }

    /// Returns the id of `p`, inserting it if no stored point lies within the tolerance.
    pub fn insert(&mut self, p: &Point) -> (usize, bool) {
        if let Some(id) = self.find(p) {
            return (id, false);
        }
        let id = self.points.len();
        let key = self.key(p);
        self.points.push(p.clone());
        self.buckets.entry(key).or_default().push(id);
        (id, true)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_coordinates() {
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![0.0; 4]).is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn index_merges_close_points() {
        let mut idx = PointIndex::new(1e-9);
        let (a, fresh_a) = idx.insert(&pt(&[1.0 / 3.0, 1.0 / 3.0]));
        let (b, fresh_b) = idx.insert(&pt(&[1.0 / 3.0 + 1e-12, 1.0 / 3.0 - 1e-12]));
        let (c, _) = idx.insert(&pt(&[2.0 / 3.0, 1.0 / 3.0]));
        assert!(fresh_a && !fresh_b);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(idx.len(), 2);
    }

    #[test]
    fn index_handles_cell_boundaries() {
        let mut idx = PointIndex::new(1e-3);
        idx.insert(&pt(&[0.0039999]));
        assert!(idx.find(&pt(&[0.0040001])).is_some());
    }
}
