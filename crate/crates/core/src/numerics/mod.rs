//! Seeded randomness and the normal-distribution special functions.

mod rng;
mod special;

pub use rng::{derive_stream_id, mix64, RngStream};
pub use special::{inverse_normal_cdf, normal_cdf, sample_gaussian};
