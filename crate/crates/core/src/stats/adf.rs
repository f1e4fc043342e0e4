use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::ols::ols;
use super::StatsError;

/// Deterministic terms of the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Regression {
    #[default]
    ConstantOnly,
}

/// H0 of the test is a unit root; rejecting it means stationarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stationarity {
    Stationary,
    NonStationary,
}

pub const ADF_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lag: usize,
    /// Observations in the test regression.
    pub nobs: usize,
    /// 1%, 5% and 10% critical values for `nobs`.
    pub critical_values: [f64; 3],
    pub classification: Stationarity,
}

// MacKinnon (1994) response surface, constant-only, one variable.
const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const TAU_SMALL_P: [f64; 3] = [2.1659, 1.4412, 0.038269];
const TAU_LARGE_P: [f64; 4] = [1.7339, 0.93202, -0.12745, -0.010368];
// MacKinnon (2010) finite-sample critical values: c0 + c1/T + c2/T^2 + c3/T^3.
const CRIT: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.04],
    [-2.56677, -1.5384, -2.809, 0.0],
];

fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Approximate asymptotic p-value of an ADF t-statistic.
pub fn mackinnon_p(stat: f64) -> f64 {
    if stat > TAU_MAX {
        return 1.0;
    }
    if stat < TAU_MIN {
        return 0.0;
    }
    let z = if stat <= TAU_STAR { poly(&TAU_SMALL_P, stat) } else { poly(&TAU_LARGE_P, stat) };
    Normal::standard().cdf(z)
}

pub fn mackinnon_critical_values(nobs: usize) -> [f64; 3] {
    let t = nobs as f64;
    CRIT.map(|c| c[0] + c[1] / t + c[2] / (t * t) + c[3] / (t * t * t))
}

/// Design of the test regression on the last `nobs` usable points:
/// columns `y_{t-1}, dy_{t-1}, .., dy_{t-lag}, 1`; response `dy_t`.
fn design(y: &[f64], lag: usize, nobs: usize) -> (DMatrix<f64>, DVector<f64>) {
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let first = dy.len() - nobs;
    let x = DMatrix::from_fn(nobs, lag + 2, |r, c| {
        let t = first + r;
        match c {
            0 => y[t],
            c if c <= lag => dy[t - c],
            _ => 1.0,
        }
    });
    let resp = DVector::from_iterator(nobs, dy[first..].iter().copied());
    (x, resp)
}

fn check(series: &[f64], lag: usize) -> Result<(), StatsError> {
    let need = lag + 10;
    if series.len() < need {
        return Err(StatsError::SeriesTooShort { len: series.len(), need });
    }
    let first = series[0];
    if series.iter().all(|&v| v == first) {
        return Err(StatsError::DegenerateSeries);
    }
    Ok(())
}

fn fit(series: &[f64], lag: usize, nobs: usize) -> Result<AdfResult, StatsError> {
    let (x, y) = design(series, lag, nobs);
    let f = ols(&x, &y);
    let statistic = f.t_value(0);
    if !statistic.is_finite() || f.rank < x.ncols() {
        return Err(StatsError::DegenerateSeries);
    }
    let p_value = mackinnon_p(statistic);
    Ok(AdfResult {
        statistic,
        p_value,
        lag,
        nobs,
        critical_values: mackinnon_critical_values(nobs),
        classification: if p_value > ADF_ALPHA { Stationarity::NonStationary } else { Stationarity::Stationary },
    })
}

/// Augmented Dickey-Fuller test with a fixed number of lagged differences.
pub fn adf_test(series: &[f64], lag: usize, regression: Regression) -> Result<AdfResult, StatsError> {
    let Regression::ConstantOnly = regression;
    check(series, lag)?;
    fit(series, lag, series.len() - 1 - lag)
}

/// ADF with the lag in `0..=max_lag` minimizing AIC on a common sample,
/// then refitted on every usable point.
pub fn adf_test_auto(series: &[f64], max_lag: usize) -> Result<AdfResult, StatsError> {
    check(series, max_lag)?;
    let nobs = series.len() - 1 - max_lag;
    let mut best: Option<(f64, usize)> = None;
    for lag in 0..=max_lag {
        let (x, y) = design(series, lag, nobs);
        let f = ols(&x, &y);
        let n = nobs as f64;
        let llf = -n / 2.0 * ((2.0 * std::f64::consts::PI).ln() + (f.rss / n).ln() + 1.0);
        let aic = -2.0 * llf + 2.0 * f.rank as f64;
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, lag));
        }
    }
    let lag = best.map(|(_, l)| l).unwrap_or(0);
    fit(series, lag, series.len() - 1 - lag)
}
