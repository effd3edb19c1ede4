//! Bayesian planning of Type-II unified hybrid censored life tests under a
//! log-normal lifetime model.

pub mod cli;
pub mod design;
pub mod error;
pub mod expectations;
pub mod fisher;
pub mod lifetime;
pub mod numerics;
pub mod scheme;

pub use error::{Error, Result};
