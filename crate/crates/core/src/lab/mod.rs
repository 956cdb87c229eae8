//! The Monte Carlo laboratory: direct simulation of the stranger
//! randomization and statistical validation of every probabilistic formula
//! the approximate pipeline rests on.

pub mod direct;
pub mod eta;
pub mod mc;

pub use direct::{
    left_relegated_focus, randomized_compare, relegated_cohesion_by_definition,
    relegated_cohesion_sample, relegated_focus_direct, relegated_focus_size, RelegatedSample,
};
pub use eta::EtaSampler;
pub use mc::{
    mc_binomial_gof, mc_concentration, mc_limit, mc_mean_checks, mc_pald_semantics, McReport,
    SemanticsReports,
};
