//! Failure-process simulation, Poisson-assumption validation and
//! proven-in-use failure-rate claims.
//!
//! The crate is organised in layers:
//!
//! - [`dist`], [`process`], [`rng`], [`timeline`]: inter-arrival laws,
//!   renewal and (non-)homogeneous Poisson generators, reproducible streams,
//!   and the [`EventTimeline`] every other layer consumes.
//! - [`superposition`]: merging many rare renewal processes and the
//!   rare-event hitting model, with a convergence study toward the Poisson limit.
//! - [`modular`]: semi-Markov programs whose modules fail as Poisson processes
//!   and whose control transfers fail as Bernoulli trials.
//! - [`validators`]: tests of the four Poisson assumptions on one timeline.
//! - [`evidence`]: fleet logs, exposure, chi-square rate bounds, SIL bands and
//!   the qualitative checklist gate.
//! - [`cli`]: the `piu` command line.
//!
//! All times are in hours and all rates in events per hour.

pub mod cli;
pub mod dist;
pub mod error;
pub mod evidence;
pub mod modular;
pub mod process;
pub mod rng;
pub mod superposition;
pub mod timeline;
pub mod validators;

pub use dist::{mean_of, sample, DistributionSpec, Law};
pub use error::{Error, Result};
pub use process::{simulate_nhpp, simulate_renewal, IntensityProfile};
pub use rng::RngStream;
pub use timeline::EventTimeline;
