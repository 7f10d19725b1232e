//! Adaptive models and the arithmetic coder that drives them.

pub mod arith;
pub mod model;

pub use arith::{Decoder, Encoder, CODER_TOTAL_LIMIT, FLUSH_SLACK_BITS};
pub use model::{ClassModel, ClassToken, Interval, Level0Model, MAX_TOTAL};
