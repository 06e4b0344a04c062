pub mod cli;
pub mod error;
pub mod constructions;
pub mod cubical;
pub mod games;
pub mod homology;
pub mod metric;
pub mod multifunction;
mod nearest;
pub mod selection;

pub use error::{Error, Result};
