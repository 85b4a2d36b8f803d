//! Numerical verification of reverse Hardy-type integral inequalities with two
//! negative exponents (q <= p < 0) on metric measure spaces with a polar
//! decomposition, including homogeneous Lie groups with arbitrary quasi-norms.
//!
//! The crate computes the Muckenhoupt-type constants that govern these
//! inequalities, bounds the best constants from both sides, evaluates Hardy
//! ratios for parametric families of radial test functions, and verifies the
//! reverse Hardy-Littlewood-Sobolev and Stein-Weiss bilinear inequalities by
//! seeded Monte Carlo with analytic divergence certificates where the forms
//! are infinite.
//!
//! The modules mirror the pipeline:
//!
//! * [`spaces`] — polar-decomposable spaces and homogeneous groups
//! * [`quadrature`] — adaptive integration on (0, inf), cumulative integrals,
//!   seeded Monte Carlo on product spaces
//! * [`radial`] — piecewise-power radial functions and weights
//! * [`hardy`] — the reverse Hardy inequality engine and its conjugate
//! * [`closedform`] — analytic constants for power weights
//! * [`bilinear`] — reverse Hardy-Littlewood-Sobolev and Stein-Weiss checks
//! * [`report`] — machine-readable verdict envelopes
//! * [`config`] — run configuration for the command-line front-end

pub mod bilinear;
pub mod closedform;
pub mod config;
pub mod error;
pub mod hardy;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod spaces;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

// The guide chapters under book/src double as documentation tests so the
// narrative stays in sync with the library surface.
#[cfg(doctest)]
mod booktests {
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/spaces.md")]
    mod spaces {}
    #[doc = include_str!("../../../book/src/quadrature.md")]
    mod quadrature {}
    #[doc = include_str!("../../../book/src/hardy.md")]
    mod hardy {}
    #[doc = include_str!("../../../book/src/closed-form.md")]
    mod closed_form {}
    #[doc = include_str!("../../../book/src/bilinear.md")]
    mod bilinear {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
