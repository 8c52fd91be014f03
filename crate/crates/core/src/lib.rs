//! Signed Choquet integrals on finitely supported distributions, exact
//! classification of piecewise-linear distortion functions by
//! quasi-convexity in mixtures, and a witness-producing verifier for the
//! mixture and outcome properties of the resulting functionals.
//!
//! The crate is organised bottom-up:
//!
//! * [`distribution`] holds discrete laws, random variables on a shared
//!   finite space, mixtures, quantiles and the concave order.
//! * [`distortion`] holds the distortion function representation, its JSON
//!   schema and the structural classifier.
//! * [`eval`] evaluates signed Choquet integrals, scaled quantile-spread
//!   mixtures and generalized rank-dependent functions.
//! * [`verifier`] searches for violations of mixture/outcome properties and
//!   materializes them as [`verifier::Witness`] values.
//! * [`corpus`] is a labelled set of distortions used by tests and benches.

pub mod corpus;
pub mod distortion;
pub mod distribution;
pub mod error;
pub mod eval;
pub mod numeric;
pub mod verifier;

pub use distortion::classify::{
    classify, classify_dual_utility, is_concave, is_convex, is_quasi_convex_univariate, qsm_match, Classification,
    DtFamily, DualUtilityClassification, QcxReason, QuasiLinearForm,
};
pub use distortion::spec::DistortionSpec;
pub use distortion::{Breakpoint, DistortionFunction, QsmParams};
pub use distribution::{DiscreteDistribution, FiniteRandomVariable, TriplePoints};
pub use error::{Error, Result};
pub use eval::{choquet, choquet_numeric_oracle, choquet_rv, qsm_eval, rdu, v_transform, VTransform};
pub use verifier::{BatteryReport, CheckConfig, Outcome, Property, Witness};
