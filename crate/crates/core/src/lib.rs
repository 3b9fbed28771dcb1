//! Beta-Stacy posterior computation and the beta-Stacy bootstrap for
//! right-censored survival data.
//!
//! The crate is `no_std` and only needs an allocator. File IO, the command
//! line front end and parallel drivers live in the `bsboot` crate.
//!
//! The typical flow is:
//!
//! 1. build a [`SurvivalDataset`] from observations,
//! 2. pick a [`PriorSpec`] (precision function `c(x)` plus centering
//!    distribution `F`),
//! 3. compute the posterior with [`Posterior::new`],
//! 4. draw functional samples with [`bootstrap::functional_sample`].
//!
//! ```
//! use bsboot_core::{
//!     bootstrap, CenteringDistribution, FunctionalSpec, Observation, Posterior,
//!     PrecisionFunction, PriorSpec, SurvivalDataset,
//! };
//!
//! let data = SurvivalDataset::new(vec![
//!     Observation::new(1.0, true),
//!     Observation::new(2.5, false),
//!     Observation::new(4.0, true),
//! ])
//! .unwrap();
//! let prior = PriorSpec::new(
//!     PrecisionFunction::constant(1.0).unwrap(),
//!     CenteringDistribution::exp_with_median(10.0).unwrap(),
//! );
//! let post = Posterior::new(&prior, &data);
//! let phi = FunctionalSpec::builtin("rmst", Some(5.0)).unwrap();
//! let out = bootstrap::functional_sample(&post, &phi, 100, 50, 7).unwrap();
//! assert_eq!(out.values.len(), 50);
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bootstrap;
pub mod data;
pub mod distributions;
mod error;
pub mod functionals;
pub mod numerics;
pub mod oracle;
pub mod posterior;
pub mod sampler;

pub use bootstrap::WeightedDistribution;
pub use data::{KaplanMeier, Observation, SurvivalDataset};
pub use distributions::{CenteringDistribution, PrecisionFunction, PriorSpec};
pub use error::{Error, Result};
pub use functionals::{Arity, Combiner, FunctionalSpec, HFunction};
pub use numerics::RngStream;
pub use posterior::Posterior;
pub use sampler::{DrawSource, FStarDraw};
