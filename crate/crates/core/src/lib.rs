//! Green vehicle routing: the pollution-routing problem and two load-aware
//! CVRP variants, solved by iterated local search with speed optimization
//! and set-partitioning recombination over pooled routes.

pub mod energy;
pub mod error;
pub mod harness;
pub mod instance;
pub mod localsearch;
pub mod orchestrator;
pub mod routeval;
pub mod setpart;
pub mod soa;
pub mod solution;
pub mod speed;

pub use error::{Error, Result};
