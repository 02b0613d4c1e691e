//! Tradeoff litmus environments and their scoring pipelines.

pub mod allocation;
pub mod collusion;
pub mod patience;
