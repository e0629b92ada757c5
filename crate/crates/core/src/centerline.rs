//! Planar point sequences ordered head to tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub(crate) fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    /// z-component of the planar cross product.
    pub(crate) fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Coordinate unit of a centerline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Meters,
    Pixels,
}

impl Units {
    pub fn tag(self) -> &'static str {
        match self {
            Units::Meters => "m",
            Units::Pixels => "px",
        }
    }
}

/// An ordered planar polyline, head first.
///
/// Holds at least two points and never two identical consecutive points.
#[derive(Debug, Clone, PartialEq)]
pub struct Centerline {
    points: Vec<Point>,
    units: Units,
}

impl Centerline {
    pub fn new(points: Vec<Point>, units: Units) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "a centerline needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidInput(format!("point {i} is not finite")));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "points {} and {} are identical",
                i,
                i + 1
            )));
        }
        Ok(Self { points, units })
    }

    /// Builds a centerline from a raw trace, dropping consecutive repeats
    /// (hand tracing often clicks the same pixel twice).
    pub fn from_trace(mut points: Vec<Point>, units: Units) -> Result<Self> {
        points.dedup();
        Self::new(points, units)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn units(&self) -> Units {
        self.units
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

    /// Cumulative chord length.
    ///
    /// Segment lengths are summed in sorted order so the result does not
    /// depend on the direction the polyline is traversed.
    pub fn total_length(&self) -> f64 {
        let mut lengths: Vec<f64> = self
            .points
            .windows(2)
            .map(|w| w[0].distance(w[1]))
            .collect();
        lengths.sort_by(f64::total_cmp);
        lengths.iter().sum()
    }

    pub fn reversed(&self) -> Centerline {
        let mut points = self.points.clone();
        points.reverse();
        Centerline {
            points,
            units: self.units,
        }
    }
}
