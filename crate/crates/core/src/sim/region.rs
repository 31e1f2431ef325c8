//! Rate-region constraint lists derived from the seven bounds: the capacity
//! outer region (bounds shifted up by a constant) and the Han-Kobayashi
//! achievable region (bounds shifted down by a constant), a fixed gap apart.

use super::bounds::mutual_info_bounds;
use super::channel::{ChannelRealization, SimError};
use crate::closed_form::BoundId;
use serde::{Deserialize, Serialize};

/// One half-plane constraint `a1*R1 + a2*R2 <= rhs`, bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRegionConstraint {
    pub a1: u32,
    pub a2: u32,
    pub rhs: f64,
}

/// Per-rate-coordinate shift of the outer region:
/// `(N1 log2(max(M1, M2)), N2 log2(max(M1, M2)))`. A region shift by
/// `(c1, c2)` moves the constraint `a1 R1 + a2 R2 <= I` to
/// `<= I + a1 c1 + a2 c2`.
fn upper_shift(h: &ChannelRealization) -> (f64, f64) {
    let p = &h.profile;
    let log_m = (p.m1.max(p.m2) as f64).log2();
    (p.n1 as f64 * log_m, p.n2 as f64 * log_m)
}

fn region(
    h: &ChannelRealization,
    rho: f64,
    alpha: f64,
    shift: (f64, f64),
    clip: bool,
) -> Result<Vec<RateRegionConstraint>, SimError> {
    let bounds = mutual_info_bounds(h, rho, alpha)?;
    Ok(BoundId::ALL
        .iter()
        .map(|&id| {
            let (a1, a2) = id.rate_coefficients();
            let mut rhs = bounds.get(id.index()) + a1 as f64 * shift.0 + a2 as f64 * shift.1;
            if clip {
                rhs = rhs.max(0.0);
            }
            RateRegionConstraint { a1, a2, rhs }
        })
        .collect())
}

/// The seven outer-bound constraints, in bound order B1..B7.
pub fn upper_region(
    h: &ChannelRealization,
    rho: f64,
    alpha: f64,
) -> Result<Vec<RateRegionConstraint>, SimError> {
    region(h, rho, alpha, upper_shift(h), false)
}

/// The seven Han-Kobayashi achievable constraints (clipped at 0), in bound
/// order B1..B7.
pub fn achievable_region(
    h: &ChannelRealization,
    rho: f64,
    alpha: f64,
) -> Result<Vec<RateRegionConstraint>, SimError> {
    let p = &h.profile;
    region(
        h,
        rho,
        alpha,
        (-2.0 * p.n1 as f64, -2.0 * p.n2 as f64),
        true,
    )
}

/// Pre-clipping gap between the upper and achievable right-hand sides of the
/// k-th bound: independent of `rho` and of the realization.
pub fn constant_gap(profile: &super::AntennaProfile, id: BoundId) -> f64 {
    let log_m = (profile.m1.max(profile.m2) as f64).log2();
    let (a1, a2) = id.rate_coefficients();
    a1 as f64 * profile.n1 as f64 * (log_m + 2.0) + a2 as f64 * profile.n2 as f64 * (log_m + 2.0)
}
