//! High-SNR analysis of the 2-user MIMO interference channel.
//!
//! The crate has four layers:
//!
//! * [`exponent`] — the eigenvalue-exponent calculus: conditional density
//!   exponent of the whitened Wishart matrices, its support set, and the
//!   point-to-point marginal exponents.
//! * [`closed_form`] — every explicit diversity-multiplexing tradeoff (DMT)
//!   formula, exposed as evaluable piecewise-linear curves.
//! * [`solver`] — a grid-plus-refinement minimizer over exponent space that
//!   re-derives outage exponents numerically, serving as an independent
//!   oracle against the closed forms.
//! * [`sim`] — finite-SNR Monte-Carlo engine: Rayleigh channel sampling,
//!   the seven capacity bounds, Han-Kobayashi rate regions, outage
//!   estimation over an SNR sweep and diversity slope fitting.

pub mod closed_form;
pub mod curve;
pub mod exponent;
pub mod sim;
pub mod solver;
