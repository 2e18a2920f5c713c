//! Command-line front end for `ldpath`: query runs, synthetic fixtures,
//! benchmark curves and witness-path listings.

pub mod app;
pub mod bench;
pub mod blocks;
pub mod genfixture;
