//! Uplink cellular-network performance under normalized-SNR scheduling.
//!
//! Base stations and users form independent Poisson point processes. Each user
//! inverts its path loss up to a maximum transmit power, so every served user
//! arrives at its base station with the same received power. The crate offers
//! two engines over one parameter set:
//!
//! * [`analytic`]: success probability, achievable rate and scheduling gain
//!   from the stochastic-geometry formulas;
//! * [`mcsim`]: a Monte Carlo simulator of the same network, used to check them.
//!
//! The crate is `no_std` with `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod mcsim;
pub mod params;
pub mod specfun;
pub mod usercount;

pub use params::{NetworkParams, ParamError, RawParams};

/// Version of this crate, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
