//! Closed-form diversity-multiplexing tradeoff curves of the 2-user MIMO
//! interference channel.
//!
//! All curves are total functions of the rate argument: beyond their support
//! they return 0 (diversity exhausted), which keeps the min-of-bounds
//! composition well defined. Degenerate piecewise branches (zero-length
//! intervals when `alpha` hits 1/2 or 1) are skipped; the neighbouring
//! branches agree there by continuity.

use crate::curve::{CurveError, PiecewiseCurve};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ClosedFormError {
    #[error("no closed form for the sixth/seventh bound with odd n={n} and alpha={alpha} < 1; use Monte-Carlo estimation")]
    OddNUnsupported { n: usize, alpha: f64 },
    #[error("formula requires alpha >= 1, got {alpha}")]
    AlphaBelowOne { alpha: f64 },
    #[error("antenna profile must satisfy 2M <= N1 <= N2, got M={m}, N1={n1}, N2={n2}")]
    BadAsymmetricProfile { m: usize, n1: usize, n2: usize },
}

/// Identifier of the seven capacity bounds with their rate coefficients
/// `(a1, a2)`: the k-th bound constrains `a1*R1 + a2*R2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundId {
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
}

impl BoundId {
    pub const ALL: [BoundId; 7] = [
        BoundId::B1,
        BoundId::B2,
        BoundId::B3,
        BoundId::B4,
        BoundId::B5,
        BoundId::B6,
        BoundId::B7,
    ];

    pub fn rate_coefficients(self) -> (u32, u32) {
        match self {
            BoundId::B1 => (1, 0),
            BoundId::B2 => (0, 1),
            BoundId::B3 | BoundId::B4 | BoundId::B5 => (1, 1),
            BoundId::B6 => (2, 1),
            BoundId::B7 => (1, 2),
        }
    }

    pub fn index(self) -> usize {
        match self {
            BoundId::B1 => 1,
            BoundId::B2 => 2,
            BoundId::B3 => 3,
            BoundId::B4 => 4,
            BoundId::B5 => 5,
            BoundId::B6 => 6,
            BoundId::B7 => 7,
        }
    }

    pub fn from_index(i: usize) -> Option<BoundId> {
        BoundId::ALL.get(i.checked_sub(1)?).copied()
    }
}

/// Optimal diversity order of a point-to-point MIMO channel with `p`
/// transmit and `q` receive antennas: the piecewise-linear curve through
/// the breakpoints `(k, (p-k)(q-k))`, `k = 0..min(p,q)`.
pub fn d_ptp(p: usize, q: usize, r: f64) -> f64 {
    let m = p.min(q);
    let r = r.max(0.0);
    if r >= m as f64 {
        return 0.0;
    }
    let k = r.floor() as usize;
    let dk = ((p - k) * (q - k)) as f64;
    let dk1 = ((p - k - 1) * (q - k - 1)) as f64;
    dk + (r - k as f64) * (dk1 - dk)
}

/// Outage exponent of the two single-user bounds: `d_{n,n}(r)`.
pub fn d_o_single(n: usize, r: f64) -> f64 {
    d_ptp(n, n, r)
}

/// Outage exponent of the third sum-rate bound (and of the fourth, by
/// symmetry), as a function of `r_s = r1 + r2`.
pub fn d_o3(n: usize, alpha: f64, r_s: f64) -> f64 {
    let nf = n as f64;
    if alpha <= 1.0 {
        if alpha > 0.0 && r_s <= nf * alpha {
            alpha * d_ptp(n, 3 * n, r_s / alpha) + 2.0 * nf * nf * (1.0 - alpha)
        } else if alpha < 1.0 && r_s <= nf * (2.0 - alpha) {
            2.0 * (1.0 - alpha) * d_ptp(n, n, (r_s - nf * alpha) / (2.0 * (1.0 - alpha)))
        } else {
            0.0
        }
    } else if r_s <= nf {
        d_ptp(n, 3 * n, r_s) + nf * nf * (alpha - 1.0)
    } else if r_s <= nf * alpha {
        (alpha - 1.0) * d_ptp(n, n, (r_s - nf) / (alpha - 1.0))
    } else {
        0.0
    }
}

/// Alias for [`d_o3`]: the fourth bound has the same outage exponent by
/// user-exchange symmetry.
pub fn d_o4(n: usize, alpha: f64, r_s: f64) -> f64 {
    d_o3(n, alpha, r_s)
}

/// Outage exponent of the fifth sum-rate bound as a function of
/// `r_s = r1 + r2`.
pub fn d_o5(n: usize, alpha: f64, r_s: f64) -> f64 {
    let nf = n as f64;
    if alpha <= 0.5 {
        if alpha > 0.0 && r_s <= 2.0 * nf * alpha {
            2.0 * alpha * d_ptp(n, 3 * n, r_s / (2.0 * alpha)) + 2.0 * nf * nf * (1.0 - 2.0 * alpha)
        } else if alpha < 0.5 && r_s <= 2.0 * nf * (1.0 - alpha) {
            2.0 * (1.0 - 2.0 * alpha)
                * d_ptp(n, n, (r_s - 2.0 * nf * alpha) / (2.0 * (1.0 - 2.0 * alpha)))
        } else {
            0.0
        }
    } else if r_s <= nf {
        nf * nf * (2.0 * alpha - 1.0) + d_ptp(n, 3 * n, r_s)
    } else if r_s <= 2.0 * nf * alpha {
        (2.0 * alpha - 1.0) * d_ptp(n, n, (r_s - nf) / (2.0 * alpha - 1.0))
    } else {
        0.0
    }
}

/// Outage exponent of the sixth bound (`2r1 + r2`), and of the seventh by
/// symmetry via `d_o6(n, alpha, r1 + 2r2)`.
///
/// For `alpha < 1` the closed form exists only for even `n`; odd `n` is a
/// hard error directing callers to Monte-Carlo estimation. For `alpha >= 1`
/// there is no parity restriction.
pub fn d_o6(n: usize, alpha: f64, r_t: f64) -> Result<f64, ClosedFormError> {
    let nf = n as f64;
    if alpha >= 1.0 {
        return Ok(if r_t <= nf {
            nf * nf * (2.0 * alpha - 1.0) + d_ptp(n, 3 * n, r_t)
        } else if r_t <= 2.0 * nf * alpha {
            (2.0 * alpha - 1.0) * d_ptp(n, n, (r_t - nf) / (2.0 * alpha - 1.0))
        } else {
            0.0
        });
    }
    if n % 2 != 0 {
        return Err(ClosedFormError::OddNUnsupported { n, alpha });
    }
    let half = nf / 2.0;
    if alpha <= 0.5 {
        Ok(if alpha > 0.0 && r_t <= half * alpha {
            nf * nf * (2.0 - alpha) + alpha * d_ptp(n, 3 * n, r_t / alpha)
        } else if alpha > 0.0 && r_t <= 1.5 * nf * alpha {
            let x = r_t - half * alpha;
            nf * nf * (2.0 - 3.0 * alpha)
                + alpha * d_ptp(n, 3 * n, x / (2.0 * alpha) + half)
                + alpha * d_ptp(n, 2 * n, x / (2.0 * alpha))
        } else if r_t <= half * (1.0 + 2.0 * alpha) {
            let x = r_t - 1.5 * nf * alpha;
            nf * nf * (1.0 - alpha)
                + (1.0 - 2.0 * alpha) * d_ptp(n, n, x / (1.0 - alpha))
                + alpha * d_ptp(n, 2 * n, x / (1.0 - alpha) + half)
        } else if r_t <= nf * (2.0 - alpha) {
            let x = r_t - half * (1.0 + 2.0 * alpha);
            (1.0 - 2.0 * alpha) * d_ptp(n, n, x / (3.0 - 4.0 * alpha) + half)
                + (1.0 - alpha) * d_ptp(n, n, x / (3.0 - 4.0 * alpha))
        } else if r_t <= nf * (3.0 - 2.0 * alpha) {
            (1.0 - alpha) * d_ptp(n, n, (r_t - nf) / (2.0 * (1.0 - alpha)))
        } else {
            0.0
        })
    } else {
        // 1/2 < alpha < 1. The second piece is anchored at r_t = n*alpha/2
        // over a length-n/2 interval; the printed anchor (r_t - n/2 over
        // [0, n*alpha]) leaves the pieces non-contiguous and is treated as a
        // transcription slip. With this anchor the family is continuous and
        // agrees with the alpha <= 1/2 and alpha >= 1 families at the seams.
        Ok(if r_t <= half * alpha {
            nf * nf * (2.0 - alpha) + alpha * d_ptp(n, 3 * n, r_t / alpha)
        } else if r_t <= half * (1.0 + alpha) {
            let x = r_t - half * alpha;
            nf * nf * alpha
                + alpha * d_ptp(n, 3 * n, x + half)
                + (1.0 - alpha) * d_ptp(n, 2 * n, x)
        } else if r_t <= half * (1.0 + 2.0 * alpha) {
            let x = r_t - half * (1.0 + alpha);
            nf * nf * (1.0 - alpha)
                + (2.0 * alpha - 1.0) * d_ptp(n, n, x / alpha)
                + (1.0 - alpha) * d_ptp(n, 2 * n, x / alpha + half)
        } else if r_t <= nf * (1.0 + alpha) {
            let x = r_t - half * (1.0 + 2.0 * alpha);
            (2.0 * alpha - 1.0) * d_ptp(n, n, x + half) + (1.0 - alpha) * d_ptp(n, n, x)
        } else if r_t <= 2.0 * nf {
            (1.0 - alpha) * d_ptp(n, n, (r_t - 2.0 * nf * alpha) / (2.0 * (1.0 - alpha)))
        } else {
            0.0
        })
    }
}

/// Alias for [`d_o6`] applied to `r1 + 2r2`.
pub fn d_o7(n: usize, alpha: f64, r_t: f64) -> Result<f64, ClosedFormError> {
    d_o6(n, alpha, r_t)
}

/// Optimal diversity order of the symmetric `(n,n,n,n)` interference channel
/// with transmitter channel knowledge: the minimum of all seven outage
/// exponents at the rate pair `(r1, r2)`.
pub fn d_ic_optimal(n: usize, alpha: f64, r1: f64, r2: f64) -> Result<f64, ClosedFormError> {
    let rs = r1 + r2;
    let candidates = [
        d_o_single(n, r1),
        d_o_single(n, r2),
        d_o3(n, alpha, rs),
        d_o4(n, alpha, rs),
        d_o5(n, alpha, rs),
        d_o6(n, alpha, 2.0 * r1 + r2)?,
        d_o7(n, alpha, r1 + 2.0 * r2)?,
    ];
    Ok(candidates.into_iter().fold(f64::INFINITY, f64::min))
}

/// Optimal DMT of the `(n,n,n,n)` interference channel when every link
/// scales identically (`alpha = 1`).
pub fn d_ic_alpha1(n: usize, r1: f64, r2: f64) -> f64 {
    d_ptp(n, n, r1)
        .min(d_ptp(n, n, r2))
        .min(d_ptp(n, 3 * n, r1 + r2))
}

/// DMT achieved without transmitter channel knowledge when both receivers
/// decode both users (multiple-access style), defined for `alpha >= 1` at
/// the symmetric rate point `(r, r)`.
pub fn d_mac(n: usize, alpha: f64, r: f64) -> Result<f64, ClosedFormError> {
    if alpha < 1.0 {
        return Err(ClosedFormError::AlphaBelowOne { alpha });
    }
    // the sum-rate exponent coincides with the third bound's curve at
    // alpha >= 1
    Ok(d_ptp(n, n, r).min(d_o3(n, alpha, 2.0 * r)))
}

/// Optimal no-CSIT DMT of the asymmetric interference channel with
/// `M1 = M2 = M`, `2M <= N1 <= N2` and `alpha >= 1`.
pub fn d_ic_nocsit_asym(
    m: usize,
    n1: usize,
    n2: usize,
    alpha: f64,
    r1: f64,
    r2: f64,
) -> Result<f64, ClosedFormError> {
    if !(2 * m <= n1 && n1 <= n2) {
        return Err(ClosedFormError::BadAsymmetricProfile { m, n1, n2 });
    }
    if alpha < 1.0 {
        return Err(ClosedFormError::AlphaBelowOne { alpha });
    }
    let rs = r1 + r2;
    Ok(d_ptp(m, n1, r1)
        .min(d_ptp(m, n2, r2))
        .min(d_ic_sum_nocsit(m, n1, alpha, rs)))
}

/// Sum-rate exponent of the asymmetric no-CSIT channel.
fn d_ic_sum_nocsit(m: usize, n1: usize, alpha: f64, rs: f64) -> f64 {
    let mf = m as f64;
    if rs <= mf * alpha {
        // pieces indexed by k over [k*alpha, (k+1)*alpha]
        let k = ((rs / alpha).floor() as usize).min(m - 1) as f64;
        alpha * d_ptp(m, m + n1, rs / alpha)
            + mf * ((rs - k * alpha - 1.0).max(0.0) + (mf - k) * (1.0 - alpha))
            + mf * (n1 as f64 - mf)
    } else if rs <= mf * (alpha - 1.0) + n1 as f64 {
        d_ptp(m, n1 - m, rs - mf * alpha)
    } else {
        0.0
    }
}

/// Evaluates a rate-to-diversity function on a uniform grid and compresses
/// it into a [`PiecewiseCurve`].
pub fn sample_curve(
    f: impl Fn(f64) -> f64,
    r_max: f64,
    step: f64,
) -> Result<PiecewiseCurve, CurveError> {
    PiecewiseCurve::from_samples(f, r_max, step)
}
