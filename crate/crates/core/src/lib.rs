//! Tail dependence functions and the measures built on them.
//!
//! The crate is organised bottom-up:
//!
//! - [`copulas`]: parametric bivariate copulas, samplers and D4 rotations.
//! - [`tdf`]: tail dependence functions Λ, margin slices, the Pickands bridge.
//! - [`measures`]: generating measures μ, the μ-tail dependence measure and the
//!   maximal-type coefficients χ̄, χ̄⋆ and λ̄.
//! - [`estimation`]: pseudo-observations, the empirical TDF, plateau selection
//!   of the threshold k, plug-in estimators and the pairs bootstrap.
//! - [`cli`]: the `taildep` command-line front end.
//!
//! All randomness goes through [`rng::Rng64`], a ChaCha8 stream generator
//! seeded from a `u64`, so every stochastic output is reproducible from
//! `(seed, n, family)`.

pub mod cli;
pub mod copulas;
pub mod error;
pub mod estimation;
pub mod measures;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod tdf;

pub use copulas::{Copula, Rotation};
pub use error::{Error, Result};
pub use estimation::{EmpiricalTdf, MeasureReport, PseudoSample};
pub use measures::{GeneratingMeasure, MeasurePart, RadialDensity};
pub use tdf::{PickandsFunction, TailDependenceFunction, TailFunction};
