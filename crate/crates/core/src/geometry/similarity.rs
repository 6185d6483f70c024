use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::point::Point;
use super::polyhedron::Polyhedron;
use crate::error::{Error, Result};

/// Tolerance for the orthogonality check `QᵀQ = I`.
const ORTHO_TOL: f64 = 1e-9;

/// A similarity `x ↦ ratio · Q x + t` of R^d with `Q` orthogonal.
///
/// Systems only hold contractions (`0 < ratio < 1`); compositions along the
/// empty word give the identity, which is the one similarity of ratio 1 the
/// crate builds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimilarityRepr", into = "SimilarityRepr")]
pub struct Similarity {
    ratio: f64,
    orthogonal: DMatrix<f64>,
    translation: Point,
}

#[derive(Serialize, Deserialize)]
struct SimilarityRepr {
    ratio: f64,
    orthogonal: Vec<Vec<f64>>,
    translation: Point,
}

impl TryFrom<SimilarityRepr> for Similarity {
    type Error = Error;
    fn try_from(r: SimilarityRepr) -> Result<Self> {
        Similarity::from_rows(r.ratio, &r.orthogonal, r.translation)
    }
}

impl From<Similarity> for SimilarityRepr {
    fn from(s: Similarity) -> Self {
        SimilarityRepr {
            ratio: s.ratio,
            orthogonal: s.orthogonal_rows(),
            translation: s.translation,
        }
    }
}

impl Similarity {
    pub fn new(ratio: f64, orthogonal: DMatrix<f64>, translation: Point) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidSimilarity(format!("ratio {ratio} is not in (0, 1)")));
        }
        Self::new_unchecked_ratio(ratio, orthogonal, translation)
    }

    fn new_unchecked_ratio(ratio: f64, orthogonal: DMatrix<f64>, translation: Point) -> Result<Self> {
        let d = translation.dim();
        if orthogonal.nrows() != d || orthogonal.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: orthogonal.nrows(),
            });
        }
        let gram = orthogonal.transpose() * &orthogonal;
        let defect = (gram - DMatrix::identity(d, d)).abs().max();
        if !defect.is_finite() || defect > ORTHO_TOL {
            return Err(Error::InvalidSimilarity(format!(
                "orthogonal part deviates from orthogonality by {defect:.3e}"
            )));
        }
        Ok(Similarity {
            ratio,
            orthogonal,
            translation,
        })
    }

    pub fn from_rows(ratio: f64, rows: &[Vec<f64>], translation: Point) -> Result<Self> {
        let d = translation.dim();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: rows.len(),
            });
        }
        let m = DMatrix::from_fn(d, d, |i, j| rows[i][j]);
        Self::new(ratio, m, translation)
    }

    /// `x ↦ ratio · x + t`.
    pub fn scaling(ratio: f64, translation: Point) -> Result<Self> {
        let d = translation.dim();
        Self::new(ratio, DMatrix::identity(d, d), translation)
    }

    pub fn identity(dim: usize) -> Self {
        Similarity {
            ratio: 1.0,
            orthogonal: DMatrix::identity(dim, dim),
            translation: Point::origin(dim),
        }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn orthogonal_rows(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..d)
            .map(|i| (0..d).map(|j| self.orthogonal[(i, j)]).collect())
            .collect()
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn dim(&self) -> usize {
        self.translation.dim()
    }

    /// Sign of det(Q): -1 for orientation-reversing maps.
    pub fn orientation(&self) -> f64 {
        self.orthogonal.determinant().signum()
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.dim(),
            });
        }
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Point) -> Point {
        let d = self.dim();
        let coords = (0..d)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..d {
                    acc += self.orthogonal[(i, j)] * x[j];
                }
                self.ratio * acc + self.translation[i]
            })
            .collect();
        Point::from_vec_unchecked(coords)
    }

    /// `self ∘ inner`, i.e. apply `inner` first.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        let orthogonal = &self.orthogonal * &inner.orthogonal;
        let translation = self.apply_unchecked(&inner.translation);
        Similarity {
            ratio: self.ratio * inner.ratio,
            orthogonal,
            translation,
        }
    }

    /// The unique fixed point of a contraction.
    pub fn fixed_point(&self) -> Point {
        let d = self.dim();
        let a = DMatrix::identity(d, d) - &self.orthogonal * self.ratio;
        let t = DVector::from_column_slice(self.translation.coords());
        let x = a.lu().solve(&t).expect("I - rQ is invertible for a contraction");
        Point::from_vec_unchecked(x.iter().copied().collect())
    }

    pub fn apply_polyhedron(&self, p: &Polyhedron) -> Polyhedron {
        p.mapped(self)
    }

    /// Builds the similarity sending `source`'s vertices onto `targets`, index by index.
    ///
    /// The orthogonal part is the Procrustes solution (reflections allowed);
    /// the fit is then checked vertex by vertex.
    pub fn from_vertex_map(source: &Polyhedron, targets: &[Point], tol: f64) -> Result<Self> {
        let verts = source.vertices();
        let d = source.dim();
        if targets.len() != verts.len() {
            return Err(Error::InvalidSimilarity(format!(
                "{} target vertices for a polyhedron with {} vertices",
                targets.len(),
                verts.len()
            )));
        }
        if let Some(bad) = targets.iter().find(|t| t.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: bad.dim(),
            });
        }
        let spread = distance_ratio_spread(verts, targets);
        let sc = Point::centroid(verts);
        let tc = Point::centroid(targets);
        let n = verts.len();
        let x = DMatrix::from_fn(d, n, |i, k| verts[k][i] - sc[i]);
        let y = DMatrix::from_fn(d, n, |i, k| targets[k][i] - tc[i]);
        let ratio = (y.norm_squared() / x.norm_squared()).sqrt();
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(if spread > tol {
                Error::NoSimilarityExists { spread }
            } else {
                Error::InvalidSimilarity(format!("vertex map has ratio {ratio}, not a contraction"))
            });
        }
        let svd = (&y * x.transpose()).svd(true, true);
        let (u, vt) = (svd.u.expect("u"), svd.v_t.expect("v_t"));
        let q = u * vt;
        let rq_sc = {
            let s = DVector::from_column_slice(sc.coords());
            &q * s * ratio
        };
        let t = Point::from_vec_unchecked((0..d).map(|i| tc[i] - rq_sc[i]).collect());
        let sim = Similarity::new(ratio, q, t)?;
        let scale = super::diameter_of(targets);
        let worst = verts
            .iter()
            .zip(targets)
            .map(|(v, w)| sim.apply_unchecked(v).dist(w))
            .fold(0.0, f64::max);
        if worst > tol * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NoSimilarityExists { spread });
        }
        Ok(sim)
    }
}

/// max − min of |w_i − w_j| / |v_i − v_j| over vertex pairs.
fn distance_ratio_spread(source: &[Point], targets: &[Point]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..source.len() {
        for j in i + 1..source.len() {
            let r = targets[i].dist(&targets[j]) / source[i].dist(&source[j]);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}
