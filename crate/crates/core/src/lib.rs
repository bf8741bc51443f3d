//! Interface capturing that carries a VOF field and a level set together.
//!
//! Each interface cell fits a quadratic to its level set samples and turns it
//! into a smooth step with `H = 1/2 (1 + tanh(beta (P + d)))`, where the shift
//! `d` makes the cell average of `H` equal the VOF value. Face fluxes of `H`
//! advance the VOF field conservatively, and the inverse of the same map
//! hands the transported geometry back to the level set.
//!
//! ```
//! use thinc_scaling::benchmark::{run_case, BenchmarkCase, RunOptions};
//! use thinc_scaling::transport::SchemeParams;
//!
//! let opts = RunOptions { final_time: Some(0.1), ..RunOptions::default() };
//! let report = run_case(&BenchmarkCase::zalesak(), 32, &SchemeParams::default(), &opts)?;
//! // fluxes only move mass between cells; clipping is the one recorded loss
//! let last = report.mass_history.last().unwrap();
//! let m0 = report.initial_mass();
//! assert!(((last.total_mass + last.clipped_mass - m0) / m0).abs() < 1e-12);
//! # Ok::<(), thinc_scaling::Error>(())
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod config;
pub mod contour;
pub mod error;
pub mod grid;
pub mod output;
pub mod quadrature;
pub mod reconstruction;
pub mod reinit;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;

    #[doc = include_str!("../../../book/src/scaling.md")]
    struct Scaling;

    #[doc = include_str!("../../../book/src/reconstruction.md")]
    struct Reconstruction;

    #[doc = include_str!("../../../book/src/transport.md")]
    struct Transport;

    #[doc = include_str!("../../../book/src/benchmarks.md")]
    struct Benchmarks;

    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
