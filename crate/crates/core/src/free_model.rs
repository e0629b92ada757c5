//! Closed-form kinematics of fiber-reinforced elastomeric enclosures (FREEs).
//!
//! A FREE is an elastomer tube wound with inextensible fibers. With the fiber
//! length `B` and turn count `N` fixed, pressurizing an extending-type FREE
//! (relaxed fiber angle above the neutral angle) lengthens it while the radius
//! shrinks. Adhering a strain-limiting fiber along one side pins that side's
//! arc length at the relaxed length, so the extension becomes bending.
//!
//! All quantities are SI: meters and radians.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::Bisection;

/// Fiber angle at which a pressurized FREE neither extends nor contracts,
/// `arctan(√2)` (about 54.7356°).
pub fn neutral_angle() -> f64 {
    SQRT_2.atan()
}

/// Interior of the fiber-angle bracket used by [`solve_fiber_angle`].
const BRACKET_MARGIN: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-10;
const MAX_ITER: usize = 200;
/// Relative slack tolerated on `length ≤ L_max` before reporting a domain error.
const LENGTH_SLACK: f64 = 1e-12;

/// Relaxed parameters of an extending-type FREE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeGeometry {
    relaxed_length: f64,
    relaxed_radius: f64,
    fiber_angle: f64,
}

impl FreeGeometry {
    /// `relaxed_length` and `relaxed_radius` in meters, `fiber_angle` in
    /// radians, strictly between the neutral angle and π/2.
    pub fn new(relaxed_length: f64, relaxed_radius: f64, fiber_angle: f64) -> Result<Self> {
        if !(relaxed_length.is_finite() && relaxed_length > 0.0) {
            return Err(Error::Domain {
                quantity: "L0",
                value: relaxed_length,
                bound: "must be a positive length".into(),
            });
        }
        if !(relaxed_radius.is_finite() && relaxed_radius > 0.0) {
            return Err(Error::Domain {
                quantity: "R0",
                value: relaxed_radius,
                bound: "must be a positive radius".into(),
            });
        }
        let neutral = neutral_angle();
        if !(fiber_angle > neutral && fiber_angle < FRAC_PI_2) {
            return Err(Error::Domain {
                quantity: "alpha0",
                value: fiber_angle,
                bound: format!(
                    "must lie in the open interval ({neutral}, {FRAC_PI_2}) rad for an extending FREE"
                ),
            });
        }
        Ok(Self {
            relaxed_length,
            relaxed_radius,
            fiber_angle,
        })
    }

    pub fn from_degrees(relaxed_length: f64, relaxed_radius: f64, fiber_angle_deg: f64) -> Result<Self> {
        Self::new(relaxed_length, relaxed_radius, fiber_angle_deg.to_radians())
    }

    pub fn relaxed_length(&self) -> f64 {
        self.relaxed_length
    }

    pub fn relaxed_radius(&self) -> f64 {
        self.relaxed_radius
    }

    pub fn fiber_angle(&self) -> f64 {
        self.fiber_angle
    }

    /// Length of one fiber, `B = L0 / cos α0`.
    pub fn fiber_length(&self) -> f64 {
        self.relaxed_length / self.fiber_angle.cos()
    }

    /// Number of turns one fiber makes around the tube, `N = L0 tan α0 / (2π R0)`.
    pub fn turn_count(&self) -> f64 {
        self.relaxed_length / (2.0 * PI * self.relaxed_radius) * self.fiber_angle.tan()
    }

    /// Tube radius at a given length, from the fiber's unrolled right
    /// triangle: `R = √(B² − L²) / (2π N)`. Valid on `[L0, B)`.
    pub fn radius_at_length(&self, length: f64) -> Result<f64> {
        let b = self.fiber_length();
        if !(length >= self.relaxed_length) {
            return Err(Error::Domain {
                quantity: "length",
                value: length,
                bound: format!("must be at least the relaxed length L0 = {}", self.relaxed_length),
            });
        }
        if !(length < b) {
            return Err(Error::Domain {
                quantity: "length",
                value: length,
                bound: format!("must be below the fiber length B = {b}"),
            });
        }
        Ok((b * b - length * length).sqrt() / (2.0 * PI * self.turn_count()))
    }

    /// Length reached when the fiber angle has relaxed to the neutral angle.
    pub fn max_length(&self) -> f64 {
        self.relaxed_length * neutral_angle().cos() / self.fiber_angle.cos()
    }

    /// Bending curvature with the strain-limited side held at `L0`:
    /// `K = 2π N (1 − L0/L) / √(B² − L²)`. Valid on `[L0, L_max]`.
    pub fn curvature_at_length(&self, length: f64) -> Result<f64> {
        let length = self.check_operating_length(length)?;
        let b = self.fiber_length();
        Ok(2.0 * PI * self.turn_count() * (1.0 - self.relaxed_length / length)
            / (b * b - length * length).sqrt())
    }

    /// Curvature at full extension.
    pub fn max_curvature(&self) -> f64 {
        max_curvature_unchecked(self.relaxed_radius, self.fiber_angle)
    }

    pub fn bend_state_at(&self, length: f64) -> Result<BendState> {
        let length = self.check_operating_length(length)?;
        let curvature = self.curvature_at_length(length)?;
        Ok(BendState::from_arc(length, curvature))
    }

    /// Maps an inflation fraction in `[0, 1]` onto `[L0, L_max]`.
    pub fn length_at_inflation(&self, fraction: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::Domain {
                quantity: "lambda",
                value: fraction,
                bound: "inflation fraction must lie in [0, 1]".into(),
            });
        }
        if fraction == 1.0 {
            return Ok(self.max_length());
        }
        Ok(self.relaxed_length + fraction * (self.max_length() - self.relaxed_length))
    }

    fn check_operating_length(&self, length: f64) -> Result<f64> {
        let l_max = self.max_length();
        if !(length >= self.relaxed_length) {
            return Err(Error::Domain {
                quantity: "length",
                value: length,
                bound: format!(
                    "operating length must lie in [L0, L_max] = [{}, {l_max}]",
                    self.relaxed_length
                ),
            });
        }
        if length > l_max {
            if length <= l_max * (1.0 + LENGTH_SLACK) {
                return Ok(l_max);
            }
            return Err(Error::Domain {
                quantity: "length",
                value: length,
                bound: format!(
                    "operating length must lie in [L0, L_max] = [{}, {l_max}]",
                    self.relaxed_length
                ),
            });
        }
        Ok(length)
    }
}

/// Inflated configuration of one bending segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendState {
    /// Arc length of the central axis, meters.
    pub central_arc_length: f64,
    /// Infinite for a straight segment.
    pub bend_radius: f64,
    pub bend_angle: f64,
    pub curvature: f64,
}

impl BendState {
    fn from_arc(central_arc_length: f64, curvature: f64) -> Self {
        let bend_radius = if curvature == 0.0 {
            f64::INFINITY
        } else {
            curvature.recip()
        };
        Self {
            central_arc_length,
            bend_radius,
            bend_angle: central_arc_length * curvature,
            curvature,
        }
    }
}

/// Maximum length for arbitrary relaxed parameters; rejects contracting-type
/// and neutral fiber angles.
pub fn max_length(relaxed_length: f64, fiber_angle: f64) -> Result<f64> {
    let neutral = neutral_angle();
    if !(fiber_angle > neutral) {
        return Err(Error::Domain {
            quantity: "alpha0",
            value: fiber_angle,
            bound: format!("must exceed the neutral angle {neutral} rad; contracting FREEs are not modeled"),
        });
    }
    Ok(FreeGeometry::new(relaxed_length, 1.0, fiber_angle)?.max_length())
}

/// Maximum bending curvature
/// `(1/R0)(sin α0 / sin αn)(1 − cos α0 / cos αn)` for `α0` in
/// `[αn, π/2)`. Zero at the neutral angle.
pub fn max_curvature(relaxed_radius: f64, fiber_angle: f64) -> Result<f64> {
    if !(relaxed_radius.is_finite() && relaxed_radius > 0.0) {
        return Err(Error::Domain {
            quantity: "R0",
            value: relaxed_radius,
            bound: "must be a positive radius".into(),
        });
    }
    let neutral = neutral_angle();
    if !(fiber_angle >= neutral && fiber_angle < FRAC_PI_2) {
        return Err(Error::Domain {
            quantity: "alpha0",
            value: fiber_angle,
            bound: format!("must lie in [{neutral}, {FRAC_PI_2}) rad"),
        });
    }
    Ok(max_curvature_unchecked(relaxed_radius, fiber_angle))
}

fn max_curvature_unchecked(relaxed_radius: f64, fiber_angle: f64) -> f64 {
    let neutral = neutral_angle();
    (fiber_angle.sin() / neutral.sin()) * (1.0 - fiber_angle.cos() / neutral.cos()) / relaxed_radius
}

/// Least upper bound of [`max_curvature`] as `α0 → π/2`: `1 / (R0 sin αn)`.
pub fn curvature_supremum(relaxed_radius: f64) -> f64 {
    1.0 / (relaxed_radius * neutral_angle().sin())
}

/// How [`solve_fiber_angle`] treats a zero target, whose solution is the
/// neutral angle itself (outside the open design interval).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// Zero target is infeasible.
    #[default]
    Strict,
    /// Zero target returns the neutral angle.
    Inclusive,
}

/// Inverse design: the relaxed fiber angle whose maximum curvature equals
/// `target_curvature` (1/m) for tubes of relaxed radius `relaxed_radius`.
///
/// The maximum curvature increases monotonically in the fiber angle, so the
/// answer is unique and found by bisection.
pub fn solve_fiber_angle(target_curvature: f64, relaxed_radius: f64, boundary: Boundary) -> Result<f64> {
    if !(relaxed_radius.is_finite() && relaxed_radius > 0.0) {
        return Err(Error::Domain {
            quantity: "R0",
            value: relaxed_radius,
            bound: "must be a positive radius".into(),
        });
    }
    if !(target_curvature >= 0.0) {
        return Err(Error::Domain {
            quantity: "target_curvature",
            value: target_curvature,
            bound: "must be non-negative".into(),
        });
    }
    let supremum = curvature_supremum(relaxed_radius);
    let infeasible = || Error::Infeasible {
        target: target_curvature,
        r0: relaxed_radius,
        supremum,
    };
    let neutral = neutral_angle();
    if target_curvature == 0.0 {
        return match boundary {
            Boundary::Strict => Err(infeasible()),
            Boundary::Inclusive => Ok(neutral),
        };
    }
    if target_curvature >= supremum {
        return Err(infeasible());
    }

    let residual = |alpha: f64| max_curvature_unchecked(relaxed_radius, alpha) - target_curvature;
    let mut lo = neutral + BRACKET_MARGIN;
    let mut hi = FRAC_PI_2 - BRACKET_MARGIN;
    // Targets beyond the interior bracket still have a root on the closed interval.
    if residual(lo) > 0.0 {
        (lo, hi) = (neutral, lo);
    } else if residual(hi) < 0.0 {
        (lo, hi) = (hi, FRAC_PI_2);
    }
    let solver = Bisection {
        x_tol: ANGLE_TOL,
        f_tol: 1e-9 * target_curvature,
        max_iter: MAX_ITER,
    };
    solver.solve_increasing(residual, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const R0: f64 = 0.00475;

    fn geom(l0: f64, r0: f64, deg: f64) -> FreeGeometry {
        FreeGeometry::from_degrees(l0, r0, deg).unwrap()
    }

    #[test]
    fn neutral_angle_value() {
        assert_relative_eq!(neutral_angle().to_degrees(), 54.735_610_317_245_35, epsilon = 1e-12);
    }

    #[test]
    fn construction_rejects_degenerate() {
        assert!(FreeGeometry::new(0.0, R0, 1.2).is_err());
        assert!(FreeGeometry::new(0.1, -1.0, 1.2).is_err());
        assert!(FreeGeometry::new(0.1, R0, neutral_angle()).is_err());
        assert!(FreeGeometry::new(0.1, R0, FRAC_PI_2).is_err());
        assert!(FreeGeometry::new(0.1, R0, 0.5).is_err());
        assert!(FreeGeometry::new(f64::NAN, R0, 1.2).is_err());
    }

    #[test]
    fn derived_invariants() {
        let g = geom(0.1, R0, 67.5);
        assert!(g.fiber_length() > g.relaxed_length());
        assert!(g.turn_count() > 0.0);
    }

    #[test]
    fn radius_at_relaxed_length_is_relaxed_radius() {
        let g = geom(0.1, R0, 67.5);
        assert_relative_eq!(g.radius_at_length(0.1).unwrap(), R0, max_relative = 1e-14);
    }

    #[test]
    fn radius_at_length_regression() {
        // 50-digit evaluation: 0.0045671884437712663964...
        let g = geom(0.10, R0, 67.5);
        assert_relative_eq!(
            g.radius_at_length(0.12).unwrap(),
            0.004_567_188_443_771_266,
            max_relative = 1e-13
        );
    }

    #[test]
    fn radius_vanishes_at_fiber_length() {
        let g = geom(0.1, R0, 67.5);
        let b = g.fiber_length();
        let near = g.radius_at_length(b * (1.0 - 1e-12)).unwrap();
        assert!(near < 1e-7 * R0 * 100.0);
        assert!(g.radius_at_length(b).is_err());
        assert!(g.radius_at_length(0.099).is_err());
    }

    #[test]
    fn radius_decreases_with_length() {
        let g = geom(0.1, R0, 80.0);
        let b = g.fiber_length();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let l = 0.1 + (b - 0.1) * i as f64 / 200.0;
            let r = g.radius_at_length(l).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn max_length_values() {
        // 50-digit evaluations: 1.65407066144252310760..., 0.15086889589691430823...
        assert_relative_eq!(
            max_length(0.05, 89f64.to_radians()).unwrap(),
            1.654_070_661_442_523,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            max_length(0.10, 67.5f64.to_radians()).unwrap(),
            0.150_868_895_896_914_3,
            max_relative = 1e-12
        );
    }

    #[test]
    fn max_length_rejects_contracting() {
        assert!(max_length(0.1, neutral_angle()).is_err());
        assert!(max_length(0.1, 0.6).is_err());
        let l = max_length(0.1, neutral_angle() + 1e-10).unwrap();
        assert_relative_eq!(l, 0.1, max_relative = 1e-9);
    }

    #[test]
    fn curvature_is_zero_at_relaxed_length() {
        let g = geom(0.1, R0, 80.0);
        assert_eq!(g.curvature_at_length(0.1).unwrap(), 0.0);
    }

    #[test]
    fn curvature_at_max_length_matches_max_curvature() {
        let g = geom(0.1, R0, 80.0);
        let k = g.curvature_at_length(g.max_length()).unwrap();
        assert_relative_eq!(k, g.max_curvature(), max_relative = 1e-9);
    }

    #[test]
    fn curvature_midpoint_regression() {
        // 50-digit evaluation at L = 0.21624138443221240216 m: 120.24946249584545050934...
        let g = geom(0.10, R0, 80.0);
        let mid = 0.5 * (0.10 + g.max_length());
        assert_relative_eq!(mid, 0.216_241_384_432_212_4, max_relative = 1e-13);
        assert_relative_eq!(
            g.curvature_at_length(mid).unwrap(),
            120.249_462_495_845_45,
            max_relative = 1e-12
        );
    }

    #[test]
    fn curvature_domain_errors() {
        let g = geom(0.1, R0, 80.0);
        assert!(g.curvature_at_length(0.0999).is_err());
        assert!(g.curvature_at_length(g.max_length() * 1.001).is_err());
        assert!(g.curvature_at_length(f64::NAN).is_err());
    }

    #[test]
    fn max_curvature_values() {
        // 50-digit evaluations: 250.00880645220781770..., 80.319309310917328799...
        assert_relative_eq!(max_curvature(R0, 89f64.to_radians()).unwrap(), 250.008_806_452_207_8, max_relative = 1e-12);
        assert_relative_eq!(max_curvature(R0, 67.5f64.to_radians()).unwrap(), 80.319_309_310_917_33, max_relative = 1e-12);
        assert_eq!(max_curvature(R0, neutral_angle()).unwrap(), 0.0);
        assert!(max_curvature(R0, 67.5f64.to_radians()).unwrap() < max_curvature(R0, 89f64.to_radians()).unwrap());
        assert!(max_curvature(R0, FRAC_PI_2).is_err());
        assert!(max_curvature(0.0, 1.2).is_err());
    }

    #[test]
    fn bend_state_relaxed_is_straight() {
        let g = geom(0.1, R0, 80.0);
        let s = g.bend_state_at(0.1).unwrap();
        assert_eq!(s.central_arc_length, 0.1);
        assert!(s.bend_radius.is_infinite());
        assert_eq!(s.bend_angle, 0.0);
        assert_eq!(s.curvature, 0.0);
    }

    #[test]
    fn bend_state_inner_arc_is_relaxed_length() {
        let g = geom(0.1, R0, 80.0);
        for i in 1..=20 {
            let l = 0.1 + (g.max_length() - 0.1) * i as f64 / 20.0;
            let s = g.bend_state_at(l).unwrap();
            assert_relative_eq!(s.bend_radius * s.bend_angle, l, max_relative = 1e-12);
            let r = g.radius_at_length(l).unwrap();
            assert_relative_eq!((s.bend_radius - r) * s.bend_angle, 0.1, max_relative = 1e-9);
        }
    }

    #[test]
    fn inflation_fraction_maps_onto_range() {
        let g = geom(0.1, R0, 80.0);
        assert_eq!(g.length_at_inflation(0.0).unwrap(), 0.1);
        assert_eq!(g.length_at_inflation(1.0).unwrap(), g.max_length());
        assert!(g.length_at_inflation(1.5).is_err());
        assert!(g.length_at_inflation(-0.1).is_err());
    }

    #[test]
    fn solve_round_trip_at_80_degrees() {
        let alpha = 80f64.to_radians();
        let target = max_curvature(R0, alpha).unwrap();
        let solved = solve_fiber_angle(target, R0, Boundary::Strict).unwrap();
        assert!((solved - alpha).abs() < 1e-6);
    }

    #[test]
    fn solve_half_of_89_degree_curvature() {
        // Brute-force sweep in 1e-5 rad steps brackets the crossing.
        let target = 0.5 * max_curvature(R0, 89f64.to_radians()).unwrap();
        let neutral = neutral_angle();
        let mut alpha = neutral;
        while max_curvature_unchecked(R0, alpha + 1e-5) < target {
            alpha += 1e-5;
        }
        let solved = solve_fiber_angle(target, R0, Boundary::Strict).unwrap();
        assert!(solved >= alpha && solved <= alpha + 1e-5);
        // 50-digit root: 1.2814710554164020912...
        assert!((solved - 1.281_471_055_416_402).abs() < 1e-9);
    }

    #[test]
    fn solve_zero_target_boundary_policy() {
        assert!(matches!(
            solve_fiber_angle(0.0, R0, Boundary::Strict),
            Err(Error::Infeasible { .. })
        ));
        assert_eq!(solve_fiber_angle(0.0, R0, Boundary::Inclusive).unwrap(), neutral_angle());
    }

    #[test]
    fn solve_reports_supremum() {
        let sup = curvature_supremum(R0);
        // 50-digit supremum: 257.84102555612401033...
        assert_relative_eq!(sup, 257.841_025_556_124, max_relative = 1e-12);
        match solve_fiber_angle(sup * 1.01, R0, Boundary::Strict) {
            Err(Error::Infeasible { supremum, .. }) => assert_eq!(supremum, sup),
            other => panic!("expected infeasible, got {other:?}"),
        }
        assert!(solve_fiber_angle(-1.0, R0, Boundary::Strict).is_err());
        assert!(solve_fiber_angle(10.0, 0.0, Boundary::Strict).is_err());
    }

    #[test]
    fn solve_targets_near_bracket_edges() {
        let tiny = max_curvature(R0, neutral_angle() + 1e-10).unwrap();
        let a = solve_fiber_angle(tiny, R0, Boundary::Strict).unwrap();
        assert!((max_curvature(R0, a).unwrap() - tiny).abs() <= 1e-8 * tiny);
        let big = curvature_supremum(R0) * (1.0 - 1e-13);
        let a = solve_fiber_angle(big, R0, Boundary::Strict).unwrap();
        assert!((max_curvature(R0, a).unwrap() - big).abs() <= 1e-8 * big);
    }
}
