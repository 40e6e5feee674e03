//! Quantum dynamics of a levitated nanoparticle in a rotating saddle-shaped
//! optical potential.
//!
//! The transverse centre-of-mass motion is linear, so Gaussian states stay
//! Gaussian and the state is carried entirely by its first and second moments.
//! The crate is `no_std` and needs only `alloc`; float functions come from
//! `libm` through `num-traits`.

#![no_std]

extern crate alloc;

pub mod consts;
pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod integrator;
pub mod model;
pub mod monitor;
pub mod metrology;
pub mod noise;
pub mod params;
pub mod potential;
pub mod stability;
pub mod units;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, Diagnostics};
pub use model::{SaddleModel, Setup};
pub use params::{Axis, DerivedParams, ParticleParams, ReferenceTweezer, TrapConfig};
