//! Per-trial fan-out.
//!
//! With the `parallel` feature (on by default) independent trials run on the
//! rayon pool; without it every [`Execution`] runs sequentially. Results
//! always come back in input order.

use crate::analysis::{CurvatureProfile, Homography, PipelineConfig};
use crate::centerline::Centerline;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether [`Execution::Parallel`] actually fans out in this build.
    pub const PARALLEL_AVAILABLE: bool = cfg!(feature = "parallel");

    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        match self {
            Execution::Sequential => items.iter().map(f).collect(),
            Execution::Parallel => par_map(items, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// One trace with its optional rectification.
#[derive(Debug, Clone)]
pub struct Trial {
    pub id: String,
    pub line: Centerline,
    pub rectify: Option<Homography>,
}

pub fn analyze_trials(trials: &[Trial], config: &PipelineConfig, exec: Execution) -> Vec<Result<CurvatureProfile>> {
    exec.map(trials, |t| config.run_rectified(&t.line, t.rectify.as_ref()))
}
