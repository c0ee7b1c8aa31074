//! Multigroup multicast beamforming and antenna placement for pinching-antenna
//! waveguide systems.
//!
//! Two transmission architectures are supported: waveguide division ([`wd`]),
//! where each waveguide serves one group and only power is allocated, and
//! waveguide multiplexing ([`wm`]), where a dense baseband beamformer mixes all
//! group streams. Both alternate between transmit design and antenna
//! placement on a discrete grid. [`baselines`] provides fixed-array references
//! and [`experiments`] drives Monte Carlo sweeps.

pub mod baselines;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod layout;
pub mod projection;
pub mod radiation;
pub mod rates;
pub mod wd;
pub mod wm;

pub use channel::{EffectiveChannels, UserSet};
pub use config::{dbm_to_watts, watts_to_dbm, SystemConfig};
pub use error::{Error, Result};
pub use layout::PinchLayout;
pub use radiation::RadiationModel;
pub use rates::{Beamformer, RateReport};
