//! Command line tool and file formats for the beta-Stacy bootstrap.

pub use bsboot_core as core;

pub mod cli;
pub mod io;
pub mod plot;
pub mod runner;
pub mod specs;
pub mod summary;
