//! Capacity-planning arithmetic for switched networks.
//!
//! The crate is organised by concern:
//!
//! - [`stat_mux`] sizes a shared link for a population of bursty on/off
//!   sources, and [`traffic_sim`] checks that sizing by Monte Carlo.
//! - [`ether`] and [`transport`] hold the exact frame-rate and goodput
//!   arithmetic for Ethernet, TCP/IPv4 and UDP/IPv4.
//! - [`reno`] models a Reno congestion-control sender, both rule by rule and
//!   as a round-based simulation over a lossy path.
//! - [`fabric`] audits tiered topologies against over-subscription ratios
//!   and decides Clos / Leaf-Spine blocking properties.

pub mod error;
pub mod ether;
pub mod fabric;
pub mod normal;
pub mod reno;
pub mod rng;
pub mod stat_mux;
pub mod traffic_sim;
pub mod transport;

pub use error::{Error, Result};
