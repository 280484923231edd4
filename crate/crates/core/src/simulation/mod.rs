//! Monte Carlo checks of stratified selection on synthetic WER populations.
//!
//! Two properties are simulated: how often a subset includes an example from
//! the far upper tail of the score distribution, and the variance of the
//! subset's mean score. Every trial draws from its own seed derived from the
//! master seed, and results are collected in trial order, so reports are
//! identical for a given seed regardless of thread count.

pub mod distribution;
pub mod stats;
pub mod tail;
pub mod variance;

use serde::Serialize;

pub use distribution::{MixtureComponent, SyntheticDistribution};
pub use tail::{simulate_tail_inclusion, tail_bound, TailInclusionConfig, TailInclusionReport};
pub use variance::{
    analytic_variances, simulate_mean_variance, MeanVarianceConfig, MeanVarianceReport,
};

/// Either kind of simulation result.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SimulationReport {
    TailInclusion(TailInclusionReport),
    MeanVariance(MeanVarianceReport),
}

impl SimulationReport {
    pub fn to_json_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Two-column plain-text summary.
    pub fn to_table(&self) -> String {
        let rows: Vec<(&str, String)> = match self {
            SimulationReport::TailInclusion(r) => vec![
                ("trials", r.trials.to_string()),
                ("population", r.population.to_string()),
                ("retained", r.retained.to_string()),
                ("tail threshold", format!("{:.6}", r.threshold)),
                ("tail examples", r.tail_count.to_string()),
                ("buckets", r.bucket_count.to_string()),
                (
                    "random inclusion",
                    format!(
                        "{:.4} +/- {:.4}",
                        r.empirical_tail_prob, r.empirical_tail_prob_se
                    ),
                ),
                (
                    "cowerage inclusion",
                    format!(
                        "{:.4} +/- {:.4}",
                        r.cowerage_tail_prob, r.cowerage_tail_prob_se
                    ),
                ),
                ("analytic bound", format!("{:.6}", r.analytic_bound)),
            ],
            SimulationReport::MeanVariance(r) => vec![
                ("trials", r.trials.to_string()),
                ("population", r.population.to_string()),
                ("retained", r.retained.to_string()),
                ("strata", r.strata.to_string()),
                ("equal occupancy", r.equal_occupancy.to_string()),
                ("with replacement", r.with_replacement.to_string()),
                (
                    "var random (empirical)",
                    format!(
                        "{:.6e} +/- {:.1e}",
                        r.empirical_var_random, r.empirical_var_random_se
                    ),
                ),
                (
                    "var random (analytic)",
                    format!("{:.6e}", r.analytic_var_random),
                ),
                (
                    "var cowerage (empirical)",
                    format!(
                        "{:.6e} +/- {:.1e}",
                        r.empirical_var_cowerage, r.empirical_var_cowerage_se
                    ),
                ),
                (
                    "var cowerage (analytic)",
                    format!("{:.6e}", r.analytic_var_cowerage),
                ),
                ("analytic gap", format!("{:.6e}", r.analytic_gap)),
            ],
        };
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        rows.into_iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}
