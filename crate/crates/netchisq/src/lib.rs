//! Statistical comparison of campaign uplifts.
//!
//! An uplift is the difference between the response rate of a targeted
//! group and the response rate of its control group. This crate answers
//! the question "are the uplifts of two campaigns (or of two subgroups of
//! one campaign) significantly different?" with a family of tests built
//! around the net chi-square statistic, plus the variance-analytic
//! alternatives usually applied to the same problem:
//!
//! * [`net_chi_sq`] — the net chi-square test (no assumption on the
//!   target/control size ratio),
//! * [`net_chi_sq_v1`], [`net_chi_sq_v2`] — variants valid when both
//!   subgroups have roughly equal target-control rates,
//! * [`t_net_sq`] and [`contrast_test`] — squared t-style statistic and
//!   the equivalent cell-means contrast,
//! * [`classical_chi_sq`] — the textbook 2x2 homogeneity test of a single
//!   campaign's uplift against zero.
//!
//! The [`simulation`] module draws binomial replicates for parameterised
//! scenarios and tabulates the p-values of all five comparison methods,
//! which is how the type I/II error behaviour of the tests is checked.
//!
//! The crate is `no_std` (allocation required); all floating-point
//! transcendentals go through `libm` so results are bit-identical across
//! platforms.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dist;
pub mod domain;
pub mod methods;
pub mod rng;
pub mod simulation;

use alloc::string::String;
use core::fmt;

pub use dist::{chi_sq1_sf, std_normal_cdf};
pub use domain::{response_rate, CampaignPair, DerivedEstimates, SubgroupCounts};
pub use methods::{
    classical_chi_sq, contrast_test, net_chi_sq, net_chi_sq_v1, net_chi_sq_v2, t_net_sq,
    ApplicabilityPolicy, Method, TestOutcome,
};
pub use rng::Rng;
pub use simulation::{
    builtin_scenarios, run_replicate, run_study, summarize, MethodSummary, PlotRow,
    ProbabilityPlotTable, ReplicatePValues, ScenarioParams, StudySummary,
};

/// Errors reported by the statistical kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A group that a computation needs is empty or too small.
    DegenerateGroup(String),
    /// An estimated response probability sits at 0 or 1, so the variance
    /// estimate collapses and the reference distribution no longer applies.
    VarianceDegenerate(String),
    /// An argument is outside its admissible range.
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DegenerateGroup(msg) => write!(f, "degenerate group: {msg}"),
            Error::VarianceDegenerate(msg) => write!(f, "degenerate variance: {msg}"),
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
