//! Exact finite-K capacity, extreme-value analysis and asymptotic scaling
//! laws, used to cross-check the Monte-Carlo engine.

pub mod capacity;
pub mod distribution;
pub mod evt;
pub mod laws;
pub mod tail;

pub use capacity::{rayleigh_closed_form, sum_capacity_by_parts, sum_capacity_integral};
pub use distribution::{order_stat_max, upper_quantile, SnrDistribution};
pub use evt::{evt_growth_and_lk, growth_function, growth_limit, EvtSummary};
pub use laws::{scaling_law, LawParams, ScalingLaw};
pub use tail::{
    conditional_corr_snr_law, rician_tail_approximation, RicianCascade, TailApproximation,
};
