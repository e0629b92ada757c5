//! Cross-trial statistics and robot-versus-snake comparison.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::analysis::{uniform_grid, CurvatureProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdConvention {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n − 1`; a single trial has zero spread.
    Sample,
}

/// Mean and standard deviation of `values`, summed in sorted order so the
/// result does not depend on the order the values arrive in.
fn mean_std(values: &mut [f64], convention: StdConvention) -> (f64, f64) {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    sq.sort_by(f64::total_cmp);
    let ss: f64 = sq.iter().sum();
    let denom = match convention {
        StdConvention::Population => n,
        StdConvention::Sample if values.len() > 1 => n - 1.0,
        StdConvention::Sample => return (mean, 0.0),
    };
    (mean, (ss / denom).sqrt())
}

/// Pointwise mean and spread of a group of curvature profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileStats {
    arc_fraction: Vec<f64>,
    mean: Vec<Option<f64>>,
    std: Vec<Option<f64>>,
    trials: usize,
    offset: usize,
}

impl ProfileStats {
    pub fn arc_fraction(&self) -> &[f64] {
        &self.arc_fraction
    }

    pub fn mean(&self) -> &[Option<f64>] {
        &self.mean
    }

    pub fn std(&self) -> &[Option<f64>] {
        &self.std
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Builds stats directly from per-point values on the uniform grid.
    pub fn from_parts(mean: Vec<Option<f64>>, std: Vec<Option<f64>>, trials: usize, offset: usize) -> Result<Self> {
        if mean.len() != std.len() || mean.len() < 2 {
            return Err(Error::MismatchedGrid(format!(
                "mean has {} points, std has {}",
                mean.len(),
                std.len()
            )));
        }
        if trials == 0 {
            return Err(Error::InvalidInput("stats need at least one trial".into()));
        }
        if mean.iter().zip(&std).any(|(m, s)| m.is_some() != s.is_some()) {
            return Err(Error::MismatchedGrid("mean and std masks differ".into()));
        }
        if std.iter().flatten().any(|s| !(*s >= 0.0)) {
            return Err(Error::InvalidInput("standard deviation must be non-negative".into()));
        }
        Ok(Self {
            arc_fraction: uniform_grid(mean.len()),
            mean,
            std,
            trials,
            offset,
        })
    }
}

pub fn aggregate(profiles: &[CurvatureProfile], convention: StdConvention) -> Result<ProfileStats> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot aggregate an empty group".into()))?;
    for (t, p) in profiles.iter().enumerate().skip(1) {
        if p.len() != first.len() || p.offset() != first.offset() {
            return Err(Error::MismatchedGrid(format!(
                "trial {t} has {} samples (offset {}), trial 0 has {} (offset {})",
                p.len(),
                p.offset(),
                first.len(),
                first.offset()
            )));
        }
        if let Some(i) = (0..p.len()).find(|&i| p.is_valid(i) != first.is_valid(i)) {
            return Err(Error::MismatchedGrid(format!("trial {t} mask differs at index {i}")));
        }
    }

    let mut mean = Vec::with_capacity(first.len());
    let mut std = Vec::with_capacity(first.len());
    let mut column = Vec::with_capacity(profiles.len());
    for i in 0..first.len() {
        if !first.is_valid(i) {
            mean.push(None);
            std.push(None);
            continue;
        }
        column.clear();
        column.extend(profiles.iter().map(|p| p.values()[i].expect("mask checked")));
        let (m, s) = mean_std(&mut column, convention);
        mean.push(Some(m));
        std.push(Some(s));
    }
    Ok(ProfileStats {
        arc_fraction: first.arc_fraction().to_vec(),
        mean,
        std,
        trials: profiles.len(),
        offset: first.offset(),
    })
}

/// Linear interpolation of a profile onto an `n`-point grid with the same
/// end-mask width. Targets whose neighbours are masked take the nearest
/// valid source value.
pub fn regrid(profile: &CurvatureProfile, n: usize) -> Result<CurvatureProfile> {
    let offset = profile.offset();
    if n <= 2 * offset {
        return Err(Error::InvalidInput(format!("cannot regrid to {n} points with offset {offset}")));
    }
    let src = profile.values();
    let m = src.len();
    if m == n {
        return Ok(profile.clone());
    }
    let (first_valid, last_valid) = (offset, m - 1 - offset);
    let values = uniform_grid(n)
        .into_iter()
        .enumerate()
        .map(|(i, frac)| {
            if i < offset || i >= n - offset {
                return None;
            }
            let mut x = frac * (m - 1) as f64;
            if (x - x.round()).abs() < 1e-9 {
                x = x.round();
            }
            let lo = (x.floor() as usize).clamp(first_valid, last_valid);
            let hi = (x.ceil() as usize).clamp(first_valid, last_valid);
            let (a, b) = (src[lo].expect("valid"), src[hi].expect("valid"));
            if lo == hi {
                Some(a)
            } else {
                let t = ((x - lo as f64) / (hi - lo) as f64).clamp(0.0, 1.0);
                Some(a + t * (b - a))
            }
        })
        .collect();
    CurvatureProfile::from_values(values, offset)
}

/// Head, midsection and tail by arc fraction: `[0, 0.25)`, `[0.25, 0.75)`,
/// `[0.75, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Head,
    Mid,
    Tail,
    Whole,
}

impl Region {
    pub const HEAD_END: f64 = 0.25;
    pub const MID_END: f64 = 0.75;
    pub const ALL: [Region; 4] = [Region::Head, Region::Mid, Region::Tail, Region::Whole];

    pub fn name(self) -> &'static str {
        match self {
            Region::Head => "head",
            Region::Mid => "mid",
            Region::Tail => "tail",
            Region::Whole => "whole",
        }
    }
}

/// Valid (unmasked) index ranges per region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionIndices {
    pub head: Range<usize>,
    pub mid: Range<usize>,
    pub tail: Range<usize>,
}

impl RegionIndices {
    pub fn range(&self, region: Region) -> Range<usize> {
        match region {
            Region::Head => self.head.clone(),
            Region::Mid => self.mid.clone(),
            Region::Tail => self.tail.clone(),
            Region::Whole => self.head.start..self.tail.end,
        }
    }
}

pub fn region_indices(n: usize, offset: usize) -> Result<RegionIndices> {
    if n <= 2 * offset || n < 2 {
        return Err(Error::InvalidInput(format!(
            "grid of {n} points leaves no valid samples at offset {offset}"
        )));
    }
    let grid = uniform_grid(n);
    let (start, end) = (offset, n - offset);
    let boundary = |limit: f64| {
        grid.iter()
            .position(|&f| f >= limit)
            .unwrap_or(n)
            .clamp(start, end)
    };
    let head_end = boundary(Region::HEAD_END);
    let mid_end = boundary(Region::MID_END);
    Ok(RegionIndices {
        head: start..head_end,
        mid: head_end..mid_end,
        tail: mid_end..end,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coverage {
    pub inside: usize,
    pub total: usize,
}

impl Coverage {
    pub fn fraction(&self) -> f64 {
        self.inside as f64 / self.total as f64
    }
}

/// Counts grid points in `region` where the subject's mean lies within one
/// reference standard deviation of the reference mean.
pub fn coverage_counts(subject: &ProfileStats, reference: &ProfileStats, region: Region) -> Result<Coverage> {
    if subject.len() != reference.len() {
        return Err(Error::MismatchedGrid(format!(
            "subject has {} points, reference {}",
            subject.len(),
            reference.len()
        )));
    }
    let offset = subject.offset().max(reference.offset());
    let indices = region_indices(subject.len(), offset)?;
    let mut inside = 0;
    let mut total = 0;
    for i in indices.range(region) {
        let (Some(sm), Some(rm), Some(rs)) = (subject.mean[i], reference.mean[i], reference.std[i]) else {
            continue;
        };
        total += 1;
        if (sm - rm).abs() <= rs {
            inside += 1;
        }
    }
    if total == 0 {
        return Err(Error::EmptyRegion(region.name()));
    }
    Ok(Coverage { inside, total })
}

pub fn envelope_coverage(subject: &ProfileStats, reference: &ProfileStats, region: Region) -> Result<f64> {
    coverage_counts(subject, reference, region).map(|c| c.fraction())
}

/// Thrash duration measured as a count of frames showing motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DurationRecord {
    pub trial_id: String,
    pub frame_count: u64,
    pub fps: f64,
}

impl DurationRecord {
    pub fn new(trial_id: impl Into<String>, frame_count: u64, fps: f64) -> Result<Self> {
        if frame_count == 0 {
            return Err(Error::InvalidInput("frame count must be at least 1".into()));
        }
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(Error::InvalidInput(format!("fps must be positive, got {fps}")));
        }
        Ok(Self {
            trial_id: trial_id.into(),
            frame_count,
            fps,
        })
    }

    pub fn seconds(&self) -> f64 {
        self.frame_count as f64 / self.fps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn duration_stats(records: &[DurationRecord], convention: StdConvention) -> Result<DurationStats> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no duration records".into()));
    }
    let mut secs: Vec<f64> = records.iter().map(DurationRecord::seconds).collect();
    let (mean, std) = mean_std(&mut secs, convention);
    Ok(DurationStats {
        count: records.len(),
        mean,
        std,
        min: secs[0],
        max: secs[secs.len() - 1],
    })
}
