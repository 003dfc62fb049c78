//! Version age of information in clustered gossip networks.
//!
//! A single source refreshes `m` cluster heads, and each head feeds `k`
//! nodes that gossip among themselves over a per-cluster topology. The crate
//! evaluates the limiting per-node version age exactly (chain recursions and
//! a general subset dynamic program), in closed form, approximately and via
//! bounds, and checks all of them against a discrete-event simulator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel execution live in the companion `gossip-age-cli` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
mod error;
pub mod model;
pub mod numeric;
pub mod optimize;
pub mod sim;

pub use error::{Error, Result};
pub use model::{AgeMethod, AgeReport, ClusterGraph, ClusterLayout, RateConfig, Topology, TopologyKind};
