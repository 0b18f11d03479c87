//! Bounds on the probability of a finite union of events from individual
//! probabilities and weighted sums of pairwise intersection probabilities.

pub mod bounds_classic;
pub mod cli;
pub mod bounds_new;
pub mod error;
pub mod linalg_lp;
pub mod space;
pub mod subset_opt;
pub mod weights;

pub use error::{Error, Result};
