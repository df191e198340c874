//! Numerical tools for broadcast channels with an eavesdropper.
//!
//! The crate is organised by problem:
//!
//! * [`channel`]: finite-alphabet distributions, channel kernels, entropy and
//!   mutual-information numerics, and a stochastic-degradedness checker.
//! * [`gaussian`]: closed-form secrecy region of the Gaussian broadcast channel
//!   with an eavesdropper, plus the non-secret comparison region.
//! * [`degraded`]: secrecy capacity region of degraded discrete channels by
//!   search over auxiliary distributions.
//! * [`inner_bound`]: the superposition/double-binning inner bound for
//!   general (non-degraded) channels with a common message.
//! * [`fading`]: layered power allocation for the slowly fading wiretap channel.
//! * [`coding`]: explicit small-block wiretap codebooks with exact equivocation
//!   and error probability.
//!
//! All rates are in bits per channel use unless stated otherwise.

pub mod channel;
pub mod coding;
pub mod degraded;
pub mod error;
pub mod fading;
pub mod gaussian;
pub mod inner_bound;
pub mod region;
pub mod simplex;

pub use error::{Error, Result};
