//! Piecewise-linear curve container for the DMT formulas.

use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("curve needs at least one breakpoint")]
    Empty,
    #[error("breakpoint abscissae must be strictly increasing")]
    NotIncreasing,
    #[error("curve values must be nonincreasing and nonnegative")]
    NotMonotone,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A DMT curve as breakpoints `(r, d)`: linear interpolation between
/// breakpoints, constant before the first, and 0 beyond the last (diversity
/// exhausted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCurve {
    breakpoints: Vec<(f64, f64)>,
}

impl PiecewiseCurve {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self, CurveError> {
        if breakpoints.is_empty() {
            return Err(CurveError::Empty);
        }
        for w in breakpoints.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(CurveError::NotIncreasing);
            }
            if w[1].1 > w[0].1 + 1e-9 {
                return Err(CurveError::NotMonotone);
            }
        }
        if breakpoints.iter().any(|&(_, d)| d < -1e-9) {
            return Err(CurveError::NotMonotone);
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn eval(&self, r: f64) -> f64 {
        let bp = &self.breakpoints;
        if r <= bp[0].0 {
            return bp[0].1;
        }
        let last = bp[bp.len() - 1];
        if r >= last.0 {
            // beyond the last breakpoint the curve is exhausted unless the
            // last recorded value is already its tail
            return if (r - last.0).abs() < 1e-12 { last.1 } else { 0.0 };
        }
        for w in bp.windows(2) {
            let ((r0, d0), (r1, d1)) = (w[0], w[1]);
            if r <= r1 {
                let t = (r - r0) / (r1 - r0);
                return d0 + t * (d1 - d0);
            }
        }
        0.0
    }

    /// Samples `f` on the uniform grid `0, step, ..., r_max` and compresses
    /// collinear runs into breakpoints.
    pub fn from_samples(f: impl Fn(f64) -> f64, r_max: f64, step: f64) -> Result<Self, CurveError> {
        assert!(step > 0.0, "grid step must be positive");
        let mut pts = Vec::new();
        let mut r = 0.0;
        while r < r_max + step / 2.0 {
            let x = r.min(r_max);
            pts.push((x, f(x)));
            r += step;
        }
        let mut bp: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for &(x, y) in &pts {
            if bp.len() >= 2 {
                let (x0, y0) = bp[bp.len() - 2];
                let (x1, y1) = bp[bp.len() - 1];
                // drop the middle point if it lies on the chord
                let interp = y0 + (y - y0) * (x1 - x0) / (x - x0);
                if (interp - y1).abs() < 1e-9 {
                    bp.pop();
                }
            }
            bp.push((x, y));
        }
        Self::new(bp)
    }

    /// CSV serialization, columns `r,d`, one row per breakpoint.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "r,d")?;
        for &(r, d) in &self.breakpoints {
            writeln!(w, "{r},{d}")?;
        }
        Ok(())
    }
}
