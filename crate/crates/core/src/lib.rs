//! Random planar triangulations, their circle packings, and the quantile
//! and foil-average statistics computed on them.

pub mod dyadic;
pub mod graphs;
pub mod harness;
pub mod packing;
pub mod rng;
pub mod stats;
