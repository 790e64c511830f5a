//! Cycle cancel and patch (Cycap) heuristic for the directed and symmetric
//! traveling salesman problem.
//!
//! A k-opt local optimum is mapped to a bipartite separated graph whose
//! negative cycles are exactly the improving tour-alternating cycles. One
//! such cycle (or a whole minimum-cost circulation) is canceled as a unit
//! flow, and the resulting subtours are patched back into a tour.
//!
//! ```
//! use cycap::instance::{figure3_instance, figure3_tour};
//! use cycap::pipeline::{cycap_once, CycapOptions, Variant};
//! use rand::SeedableRng;
//!
//! let inst = figure3_instance();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
//! let (tour, _) = cycap_once(&inst, &figure3_tour(), Variant::C, &mut rng, CycapOptions::default());
//! assert_eq!(tour.cost(&inst), 45);
//! ```

pub mod bench;
pub mod cancel_patch;
pub mod cli;
pub mod detect;
pub mod error;
pub mod instance;
pub mod local_search;
pub mod pipeline;
pub mod residual;
pub mod tour;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeExamples;
