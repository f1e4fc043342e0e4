//! Values frozen from statsmodels and scipy by `data/gen_reference.py`.

#![allow(dead_code)]

use honeypot_core::stats::Observation;
use serde::Deserialize;

#[derive(Deserialize)]
pub struct Reference {
    pub cases: Vec<Case>,
    pub quantiles: Vec<Quantile>,
}

#[derive(Deserialize)]
pub struct Case {
    pub adf: AdfCase,
    pub anova: AnovaCase,
    pub tukey: TukeyCase,
}

#[derive(Deserialize)]
pub struct AdfCase {
    pub series: Vec<f64>,
    pub statistic: f64,
    pub p_value: f64,
    pub nobs: usize,
    pub critical_values: [f64; 3],
}

#[derive(Deserialize)]
pub struct AnovaCase {
    pub observations: Vec<Observation>,
    pub effects: Vec<AnovaEffect>,
}

#[derive(Deserialize)]
pub struct AnovaEffect {
    pub effect: String,
    pub sum_sq: f64,
    pub df: usize,
    pub f: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Deserialize)]
pub struct TukeyCase {
    pub groups: Vec<Group>,
    pub msw: f64,
    pub df: usize,
    pub pairs: Vec<TukeyPairRef>,
}

#[derive(Deserialize)]
pub struct Group {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
pub struct TukeyPairRef {
    pub group_a: String,
    pub group_b: String,
    pub mean_diff: f64,
    pub q_stat: f64,
    pub p_value: f64,
}

#[derive(Deserialize)]
pub struct Quantile {
    pub alpha: f64,
    pub k: usize,
    pub df: f64,
    pub q: f64,
}

pub fn reference() -> Reference {
    serde_json::from_str(include_str!("../data/reference.json")).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
