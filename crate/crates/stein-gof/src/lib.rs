//! Goodness-of-fit tests for normality built on a Stein-type departure
//! measure.
//!
//! The departure of a distribution from normality is measured by a
//! U-statistic over the pair kernel `(min(x,y)^2 - xy)/2`, estimated in
//! O(n log n) through its order-statistic form. Two calibrations are
//! provided: an asymptotic normal test using the closed-form null variance,
//! and a jackknife empirical likelihood ratio test referred to chi-square
//! with one degree of freedom. Anderson-Darling and Jarque-Bera are included
//! as reference tests, along with a deterministic Monte Carlo engine for
//! type-I-error and power studies.
//!
//! ```
//! use stein_gof::sample::load_sample;
//! use stein_gof::jel::jel_test;
//!
//! let sample = load_sample("4.1 5.2 3.9 4.7 5.0 4.4 4.8 5.1 4.3 4.6").unwrap();
//! let result = jel_test(&sample.standardize().unwrap(), 0.05).unwrap();
//! assert!(!result.reject);
//! ```

pub mod classical;
pub mod error;
pub mod jel;
pub mod report;
pub mod sample;
pub mod simulation;
pub mod special;
pub mod stein;

pub use error::{Error, Result};

// The guide's code blocks double as doc-tests so the book can never drift
// from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/departure-measure.md")]
    mod departure_measure {}
    #[doc = include_str!("../../../book/src/asymptotic-test.md")]
    mod asymptotic_test {}
    #[doc = include_str!("../../../book/src/jackknife-el.md")]
    mod jackknife_el {}
    #[doc = include_str!("../../../book/src/reference-tests.md")]
    mod reference_tests {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
