//! Bracketing root finder shared by the inverse-design routines.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Bisection {
    /// Stop once the bracket is narrower than this.
    pub x_tol: f64,
    /// ...and the residual magnitude is at most this.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Bisection {
    /// Finds `x` in `[lo, hi]` with `f(x) ≈ 0` for a function increasing on
    /// the bracket. Requires `f(lo) ≤ 0 ≤ f(hi)`.
    pub fn solve_increasing<F>(&self, f: F, mut lo: f64, mut hi: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        let f_lo = f(lo);
        let f_hi = f(hi);
        if f_lo > 0.0 || f_hi < 0.0 || f_lo.is_nan() || f_hi.is_nan() {
            return Err(Error::Numeric(format!(
                "root not bracketed on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
            )));
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }

        for _ in 0..self.max_iter {
            let mid = lo + 0.5 * (hi - lo);
            let f_mid = f(mid);
            if f_mid.is_nan() {
                return Err(Error::Numeric(format!("function is NaN at {mid}")));
            }
            if (hi - lo <= self.x_tol && f_mid.abs() <= self.f_tol) || f_mid == 0.0 {
                return Ok(mid);
            }
            // Bracket has collapsed to adjacent floats.
            if mid <= lo || mid >= hi {
                return if f_mid.abs() <= self.f_tol {
                    Ok(mid)
                } else {
                    Err(Error::Numeric(format!(
                        "bracket exhausted at {mid} with residual {f_mid:e}"
                    )))
                };
            }
            if f_mid < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::Numeric(format!(
            "bisection did not converge in {} iterations (bracket [{lo}, {hi}])",
            self.max_iter
        )))
    }
}
