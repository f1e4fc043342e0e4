//! Evaluation statistics: stationarity, ANOVA, Tukey HSD, rates, trend
//! tables and audience insights.

mod adf;
mod anova;
mod insights;
mod metrics;
mod ols;
mod ptukey;
mod trend;
mod tukey;

use thiserror::Error;

pub use adf::{
    adf_test, adf_test_auto, mackinnon_critical_values, mackinnon_p, AdfResult, Regression, Stationarity, ADF_ALPHA,
};
pub use anova::{anova3, AnovaRow, AnovaTable, Effect, Observation};
pub use insights::{
    audience_insights, Distribution, FollowerDemographics, Insights, InsightsOutcome, INSIGHTS_MIN_FOLLOWERS,
};
pub use metrics::{interactions_per_week, round_to};
pub use ols::{ols, OlsFit};
pub use ptukey::{ptukey, studentized_range_quantile};
pub use trend::{
    classify_series, trend_table, HoneypotSeries, MetricSummary, SeriesTrend, TrendRow, TrendTable, TREND_COLUMNS,
};
pub use tukey::{tukey_hsd, TukeyPair, TukeyResult};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("series of length {len} is too short, need at least {need}")]
    SeriesTooShort { len: usize, need: usize },
    #[error("series has zero variance")]
    DegenerateSeries,
    #[error("data are degenerate: {0}")]
    DegenerateData(&'static str),
    #[error("factor `{0}` has fewer than two levels")]
    MissingLevels(&'static str),
    #[error("need at least two groups with two observations each")]
    TooFewGroups,
    #[error("root finding did not converge")]
    ConvergenceFailure,
    #[error("division by a non-positive quantity")]
    DivisionDomain,
    #[error("empty input")]
    EmptyInput,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
