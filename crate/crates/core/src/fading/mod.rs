//! Layered ("broadcast strategy") power allocation for the slowly fading
//! wiretap channel.
//!
//! The transmitter knows only the eavesdropper's power gain `s'`. It sends a
//! continuum of layers indexed by the main-channel gain `s`; a receiver with
//! gain `s` decodes every layer up to `s`, the layers above act as residual
//! interference `I(s)`. The layer power density is `rho = -dI/ds` and the
//! budget is `I(0) = P`.

mod closed_form;
mod family;
mod optimize;
mod profile;
pub mod quadrature;

pub use closed_form::{
    interference_window, optimal_interference, rayleigh_endpoints, rayleigh_power_density,
    stationary_interference, InterferenceLaw, Window,
};
pub use family::{FadingFamily, FadingSpec, TAIL_MASS};
pub use optimize::{
    discretize, layered_objective, optimize_profile_numerical, LayerGrid, LayeredSolution, OptimizerConfig,
    MIN_UNIFORM_LAYERS,
};
pub use profile::{
    average_rate, integrated_density, layer_rate, ClosedFormProfile, InterferenceProfile, PowerProfile,
};
