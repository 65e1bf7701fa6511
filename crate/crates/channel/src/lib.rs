//! Statistical channel model for long-range ground-to-air free-space optical
//! links under a plane-wave (uniform footprint) beam profile.
//!
//! The channel gain is `h = h_a · h_t · h_p`: Beer–Lambert attenuation, unit-mean
//! Gamma-Gamma turbulence, and a geometric pointing loss driven by receiver
//! wobble plus beam wander. The pointing loss is a three-part mixture (full
//! capture, partial overlap, no overlap) and the composite law keeps that
//! structure, with point masses carried as explicit (location, weight) pairs.

pub mod atmosphere;
pub mod error;
pub mod geometry;
pub mod monte_carlo;
pub mod outage;
pub mod special;
pub mod statistics;

pub use atmosphere::{AtmosphereModel, Cn2Profile, GammaGammaParams};
pub use error::{Error, Result};
pub use geometry::{LinkGeometry, OverlapModel};
pub use outage::{outage_numerical, outage_series, required_power, SeriesSpec, SnrConfig};
pub use monte_carlo::{ks_against_model, ks_distance, run_simulation, EmpiricalResult, OutageEstimate, SimulationPlan};

pub use special::QuadratureSpec;
pub use statistics::{
    ChannelDensity, ChannelModel, ChannelSample, PointingMixture, PointingStats, Turbulence,
};
