//! Curvature estimation on traced or synthesized centerlines.
//!
//! A trace is optionally rectified by a homography, resampled to a fixed
//! number of points, smoothed by a centered moving average, and reduced to
//! a length-normalized curvature profile by fitting circumscribed circles.

mod homography;
mod profile;

pub use homography::{estimate_homography, Homography};
pub use profile::{
    circumcircle_curvature, curvature_profile, moving_average, resample_uniform,
    smooth_moving_average, window_for_span, CurvatureProfile,
};

pub(crate) use profile::uniform_grid;

use serde::{Deserialize, Serialize};

use crate::centerline::Centerline;
use crate::error::Result;

pub const DEFAULT_SAMPLES: usize = 500;
pub const DEFAULT_SPAN: usize = 30;
pub const DEFAULT_OFFSET: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Resampled point count.
    pub samples: usize,
    /// Moving-average span (even spans round up to the next odd window).
    pub span: usize,
    /// Triangle half-width in samples.
    pub offset: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            span: DEFAULT_SPAN,
            offset: DEFAULT_OFFSET,
        }
    }
}

impl PipelineConfig {
    /// Resample, smooth, then estimate curvature.
    pub fn run(&self, line: &Centerline) -> Result<CurvatureProfile> {
        let resampled = resample_uniform(line, self.samples)?;
        let smoothed = smooth_moving_average(&resampled, self.span)?;
        curvature_profile(&smoothed, self.offset)
    }

    pub fn run_rectified(&self, line: &Centerline, rectify: Option<&Homography>) -> Result<CurvatureProfile> {
        match rectify {
            Some(h) => self.run(&h.apply(line)?),
            None => self.run(line),
        }
    }
}
