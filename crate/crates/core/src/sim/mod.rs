//! Finite-SNR Monte-Carlo engine: Rayleigh channel sampling, the seven
//! capacity bounds, Han-Kobayashi rate regions, outage estimation and
//! diversity-slope fitting.

mod bounds;
mod channel;
mod histogram;
mod outage;
mod region;

pub use bounds::{hk_power_split, mutual_info_bounds, PowerSplit, RateBounds};
pub use channel::{sample_channel, AntennaProfile, ChannelRealization, ScalingProfile, SimError};
pub use histogram::{exponent_histogram, ExponentHistogram};
pub use outage::{estimate_outage, fit_diversity_slope, OutageEstimate, SlopeFit};
pub use region::{achievable_region, constant_gap, upper_region, RateRegionConstraint};
