pub mod cwt;
pub mod error;
pub mod influence;
pub mod maxima;
pub mod morse;
pub mod noise;
pub mod pipeline;
mod quad;
pub mod synth;

pub use error::{Error, Result};
