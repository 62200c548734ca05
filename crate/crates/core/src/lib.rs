//! Numerical laboratory for joint universality of ζ(s) under exponential-type shifts.
//!
//! The modules follow the mathematical objects: shift functions and tuples
//! ([`shift_families`]), evaluators of ζ and its models ([`zeta_eval`]),
//! grids and metrics on holomorphic functions ([`function_space`]), lemma
//! checks ([`equidistribution_bench`]) and the universality experiments
//! ([`universality_lab`]).

pub mod equidistribution_bench;
pub mod error;
pub mod function_space;
pub mod parallel;
pub mod primes;
pub mod quadrature;
pub mod shift_families;
pub mod summation;
pub mod universality_lab;
pub mod zeta_eval;

pub use error::{Error, Result};
pub use function_space::{CompactSetSpec, GridFunction, RegionSpec};
pub use num_complex::Complex64;
pub use parallel::Parallelism;
pub use shift_families::{AdmissibilityEvidence, ShiftFamily, ShiftFunction, ShiftTuple, TauGrid, Verdict};
pub use universality_lab::{DensityReport, ExperimentConfig};
pub use zeta_eval::{AfeParams, ComplexPoint, OmegaAssignment};
