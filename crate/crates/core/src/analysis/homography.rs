//! Planar projective rectification.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::centerline::{Centerline, Point};
use crate::error::{Error, Result};

const MIN_DET: f64 = 1e-12;
const MIN_W: f64 = 1e-12;
/// Relative singular-value gap below which the null space is not unique.
const RANK_TOL: f64 = 1e-10;
/// Normalized triangle area below which three points count as collinear.
const COLLINEAR_TOL: f64 = 1e-10;

/// A nonsingular 3×3 projective map with `h[2][2] = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self> {
        let scale = m[(2, 2)];
        if !(scale.abs() > MIN_DET) || m.iter().any(|v| !v.is_finite()) {
            return Err(Error::RankDeficient(format!(
                "cannot normalize: bottom-right entry is {scale:e}"
            )));
        }
        let m = m / scale;
        let det = m.determinant();
        if !(det.abs() > MIN_DET) {
            return Err(Error::RankDeficient(format!("singular matrix, det = {det:e}")));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Matrix3::identity() }
    }

    pub fn translation(dx: f64, dy: f64) -> Self {
        Self {
            m: Matrix3::new(1.0, 0.0, dx, 0.0, 1.0, dy, 0.0, 0.0, 1.0),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .m
            .try_inverse()
            .ok_or_else(|| Error::RankDeficient("matrix is not invertible".into()))?;
        Self::new(inv)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Homography) -> Result<Self> {
        Self::new(self.m * other.m)
    }

    pub fn map_point(&self, p: Point) -> Option<Point> {
        let v = self.m * Vector3::new(p.x, p.y, 1.0);
        (v.z.abs() > MIN_W).then(|| Point::new(v.x / v.z, v.y / v.z))
    }

    pub fn apply(&self, line: &Centerline) -> Result<Centerline> {
        let points = line
            .points()
            .iter()
            .enumerate()
            .map(|(index, &p)| {
                let w = self.m[(2, 0)] * p.x + self.m[(2, 1)] * p.y + self.m[(2, 2)];
                self.map_point(p).ok_or(Error::PointAtInfinity { index, w })
            })
            .collect::<Result<Vec<_>>>()?;
        Centerline::new(points, line.units())
    }
}

/// Similarity taking `points` to zero mean and mean distance √2.
fn normalizing_transform(points: &[Point]) -> Result<(Vec<Point>, Matrix3<f64>)> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = points.iter().map(|p| (p.x - cx).hypot(p.y - cy)).sum::<f64>() / n;
    if !(mean_dist > 0.0 && mean_dist.is_finite()) {
        return Err(Error::RankDeficient("all points coincide".into()));
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    let t = Matrix3::new(s, 0.0, -s * cx, 0.0, s, -s * cy, 0.0, 0.0, 1.0);
    let normalized = points
        .iter()
        .map(|p| Point::new(s * (p.x - cx), s * (p.y - cy)))
        .collect();
    Ok((normalized, t))
}

fn check_no_collinear_triple(points: &[Point], which: &str) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                let area = points[j].sub(points[i]).cross(points[k].sub(points[i]));
                if area.abs() <= COLLINEAR_TOL {
                    return Err(Error::RankDeficient(format!(
                        "{which} points {i}, {j}, {k} are collinear"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Normalized direct linear transform: the least-squares (algebraic error)
/// projective map taking each `src[i]` to `dst[i]`. Exact for four
/// correspondences in general position.
pub fn estimate_homography(src: &[Point], dst: &[Point]) -> Result<Homography> {
    if src.len() != dst.len() {
        return Err(Error::InvalidInput(format!(
            "{} source points but {} destination points",
            src.len(),
            dst.len()
        )));
    }
    let n = src.len();
    if n < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 correspondences, got {n}")));
    }
    let (src_n, t_src) = normalizing_transform(src)?;
    let (dst_n, t_dst) = normalizing_transform(dst)?;
    if n == 4 {
        check_no_collinear_triple(&src_n, "source")?;
        check_no_collinear_triple(&dst_n, "destination")?;
    }

    // Pad to at least 9 rows so the SVD exposes the full right null space.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (p, q)) in src_n.iter().zip(&dst_n).enumerate() {
        let (x, y, u, v) = (p.x, p.y, q.x, q.y);
        let r = 2 * i;
        a[(r, 0)] = -x;
        a[(r, 1)] = -y;
        a[(r, 2)] = -1.0;
        a[(r, 6)] = u * x;
        a[(r, 7)] = u * y;
        a[(r, 8)] = u;
        a[(r + 1, 3)] = -x;
        a[(r + 1, 4)] = -y;
        a[(r + 1, 5)] = -1.0;
        a[(r + 1, 6)] = v * x;
        a[(r + 1, 7)] = v * y;
        a[(r + 1, 8)] = v;
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| Error::Numeric("SVD did not produce right singular vectors".into()))?;
    let sv = &svd.singular_values;
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let (smallest, second) = (order[0], order[1]);
    let largest = sv.max();
    if !(sv[second] > RANK_TOL * largest) {
        return Err(Error::RankDeficient(format!(
            "solution is not unique (singular values {:e}, {:e}, max {:e})",
            sv[smallest], sv[second], largest
        )));
    }
    let h = v_t.row(smallest);
    let h_n = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let t_dst_inv = t_dst
        .try_inverse()
        .ok_or_else(|| Error::Numeric("normalizing transform is singular".into()))?;
    Homography::new(t_dst_inv * h_n * t_src)
}
