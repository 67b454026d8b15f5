#![allow(clippy::needless_range_loop)]

pub mod completion;
pub mod conjugacy;
pub mod corpus;
pub mod envelope;
pub mod error;
pub mod fincat;
pub mod io;
pub mod metric;
pub mod order;
pub mod setfun;
pub mod util;

pub use error::{Error, Result, ValidationReport};
