//! Sensing, acquisition, calibration, and control models for a miniature
//! photo-reflector tension sensor.
//!
//! The crate models the full measurement chain of a tension sensor in which a
//! machined aluminium spring element stretches under string tension and a
//! photo-reflector converts the resulting gap change into an analog voltage:
//!
//! ```text
//! tension --(elastomer)--> gap --(optics)--> volts --(adc)--> counts
//!                                                               |
//!            force estimate <--(calib polynomial)-- volts <-----+
//! ```
//!
//! On top of the chain sit the acquisition layer ([`frame`] CAN-FD payloads,
//! [`stream`] sample generation), the calibration and metrics suite
//! ([`calib`]), and a closed-loop force-control simulator against a
//! twisted-string actuator ([`control`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the companion CLI
//! crate carries file formats and IO.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod adc;
pub mod calib;
pub mod control;
pub mod elastomer;
pub mod frame;
pub mod noise;
pub mod optics;
pub mod stream;

mod math;

pub use adc::AdcConfig;
pub use calib::{CalibrationPoly, MetricsReport};
pub use control::{PiController, ReferenceProfile, TsaPlant};
pub use elastomer::{DeflectionBreakdown, ElastomerGeometry, Material, SectionProperties};
pub use frame::SensorSample;
pub use noise::NoiseModel;
pub use optics::{PhotoReflectorModel, SensingChain};
pub use stream::ForceProfile;
