//! Monte Carlo laboratory for crossing probabilities in two-dimensional
//! critical site percolation.
//!
//! The crate simulates site percolation on finite pieces of the square and
//! triangular lattices carved from various geometric regions (rectangles,
//! parallelograms, annuli, cylinders, branched double covers, tori) and
//! compares measured crossing probabilities against the exact predictions of
//! conformal field theory (Cardy's formula) transported through conformal
//! equivalences (Schwarz-Christoffel maps, annulus/cylinder equivalence,
//! shear matrices for universality fits).
//!
//! Modules:
//! * [`rng`] — reproducible random sources, including a 48-bit linear
//!   congruential generator and keyed substreams for parallel replicas.
//! * [`lattice`] — domain construction (site graphs with boundary intervals)
//!   and configuration sampling, including striated probability fields.
//! * [`cluster`] — union-find cluster labeling, crossing detection, and
//!   homology classification on tori.
//! * [`conformal`] — Cardy's formula, cross-ratio machinery, and
//!   Schwarz-Christoffel maps; generic over the floating-point scalar.
//! * [`estimate`] — the experiment engine: replicated sampling, tallies,
//!   confidence intervals, and the named experiments.
//! * [`fit`] — least-squares recovery of the universality shear matrix and
//!   log-log fitting of the annulus crossing exponent.
//! * [`report`] — CSV/JSON output formatting with the precision conventions
//!   shared by the command-line tool.
//! * [`reference`] — the published rectangle sweep geometry reproduced by
//!   the table commands and acceptance checks.

pub mod cluster;
pub mod conformal;
pub mod estimate;
pub mod fit;
pub mod lattice;
pub mod reference;
pub mod report;
pub mod rng;

use std::fmt;

use num_traits::{Float, FromPrimitive};

/// Default scalar for all concrete computations.
pub type Real = f64;

/// Floating-point scalar the numerical kernels are generic over.
pub trait Scalar:
    Float + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// Shorthand for lossy conversion from `f64` constants.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must convert")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Errors surfaced by the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument was outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A region was too small to contain any lattice site.
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    /// An iterative numerical procedure failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A caller violated an API contract (e.g. missing boundary interval).
    #[error("contract violation: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;
