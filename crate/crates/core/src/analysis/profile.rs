//! Resampling, smoothing and circumscribed-circle curvature of centerlines.

use crate::centerline::{Centerline, Point};
use crate::error::{Error, Result};

/// Sine of the triangle angle below which a triple counts as collinear.
const COLLINEAR_SIN: f64 = 1e-12;

/// Resamples `line` to `n` points evenly spaced in cumulative chord length.
/// The first and last input points are kept exactly.
pub fn resample_uniform(line: &Centerline, n: usize) -> Result<Centerline> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("cannot resample to {n} points")));
    }
    let pts = line.points();
    let mut cumulative = Vec::with_capacity(pts.len());
    cumulative.push(0.0);
    let mut acc = 0.0;
    for w in pts.windows(2) {
        acc += w[0].distance(w[1]);
        cumulative.push(acc);
    }
    let total = acc;
    if !(total > 0.0) {
        return Err(Error::ZeroLength);
    }

    let last = pts.len() - 1;
    let mut out = Vec::with_capacity(n);
    out.push(pts[0]);
    let mut seg = 0;
    for k in 1..n - 1 {
        let target = total * k as f64 / (n - 1) as f64;
        while seg + 1 < last && cumulative[seg + 1] < target {
            seg += 1;
        }
        let (a, b) = (pts[seg], pts[seg + 1]);
        let span = cumulative[seg + 1] - cumulative[seg];
        let t = ((target - cumulative[seg]) / span).clamp(0.0, 1.0);
        out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
    }
    out.push(pts[last]);
    Centerline::new(out, line.units())
}

/// Odd window length used for a requested span: even spans round up.
pub fn window_for_span(span: usize) -> usize {
    if span.is_multiple_of(2) {
        span + 1
    } else {
        span
    }
}

/// Centered moving average over raw points. Near the ends the window
/// shrinks symmetrically, so the endpoints themselves are unchanged.
pub fn moving_average(points: &[Point], span: usize) -> Vec<Point> {
    let half = window_for_span(span) / 2;
    let n = points.len();
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            let window = &points[i - h..=i + h];
            let count = window.len() as f64;
            let (sx, sy) = window.iter().fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
            Point::new(sx / count, sy / count)
        })
        .collect()
}

pub fn smooth_moving_average(line: &Centerline, span: usize) -> Result<Centerline> {
    if line.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "smoothing needs at least 3 points, got {}",
            line.len()
        )));
    }
    Centerline::new(moving_average(line.points(), span), line.units())
}

/// Length-normalized curvature sampled on a uniform arc-fraction grid.
///
/// `values[i]` is `None` for the `offset` grid points at each end where no
/// symmetric triangle exists.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureProfile {
    arc_fraction: Vec<f64>,
    values: Vec<Option<f64>>,
    offset: usize,
}

impl CurvatureProfile {
    /// Builds a profile on the uniform grid `i / (n − 1)`.
    pub fn from_values(values: Vec<Option<f64>>, offset: usize) -> Result<Self> {
        let n = values.len();
        if n < 2 || n <= 2 * offset {
            return Err(Error::InvalidInput(format!(
                "profile of {n} samples cannot carry an end mask of {offset}"
            )));
        }
        for (i, v) in values.iter().enumerate() {
            let masked = i < offset || i >= n - offset;
            match v {
                None if !masked => {
                    return Err(Error::InvalidInput(format!("interior sample {i} is missing")));
                }
                Some(_) if masked => {
                    return Err(Error::InvalidInput(format!("end sample {i} must be missing")));
                }
                Some(x) if !(x.is_finite() && *x >= 0.0) => {
                    return Err(Error::InvalidInput(format!("sample {i} = {x} is not a finite non-negative value")));
                }
                _ => {}
            }
        }
        Ok(Self {
            arc_fraction: uniform_grid(n),
            values,
            offset,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn arc_fraction(&self) -> &[f64] {
        &self.arc_fraction
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn is_valid(&self, index: usize) -> bool {
        self.values[index].is_some()
    }

    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            arc_fraction: self.arc_fraction.clone(),
            values,
            offset: self.offset,
        }
    }
}

pub(crate) fn uniform_grid(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

/// Curvature of the circle through three points, `1 / circumradius`.
/// Zero for collinear points.
pub fn circumcircle_curvature(a: Point, b: Point, c: Point) -> Option<f64> {
    let u = a.sub(b);
    let v = c.sub(b);
    let lu = u.x.hypot(u.y);
    let lv = v.x.hypot(v.y);
    let lw = a.distance(c);
    if lu == 0.0 || lv == 0.0 || lw == 0.0 {
        return None;
    }
    let cross = u.cross(v).abs();
    if cross <= COLLINEAR_SIN * lu * lv {
        return Some(0.0);
    }
    Some(2.0 * cross / (lu * lv * lw))
}

/// Normalized curvature profile: at each interior index `i` the circle
/// through `p[i − offset]`, `p[i]`, `p[i + offset]` gives a radius `r`,
/// reported as `total_length / r`, the reciprocal of the radius expressed
/// in body lengths.
pub fn curvature_profile(line: &Centerline, offset: usize) -> Result<CurvatureProfile> {
    let n = line.len();
    if offset == 0 || n <= 2 * offset {
        return Err(Error::InvalidInput(format!(
            "{n} points cannot support an offset of {offset}"
        )));
    }
    let total = line.total_length();
    let pts = line.points();
    let values = (0..n)
        .map(|i| {
            if i < offset || i + offset >= n {
                return Ok(None);
            }
            circumcircle_curvature(pts[i - offset], pts[i], pts[i + offset])
                .map(|k| Some(total * k))
                .ok_or(Error::DuplicateVertex { index: i })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurvatureProfile {
        arc_fraction: uniform_grid(n),
        values,
        offset,
    })
}
