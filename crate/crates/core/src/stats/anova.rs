use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::ols::ols;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub value: f64,
    pub topic: String,
    pub strategy: String,
    pub plan: String,
}

impl Observation {
    pub fn new(value: f64, topic: &str, strategy: &str, plan: &str) -> Self {
        Observation { value, topic: topic.into(), strategy: strategy.into(), plan: plan.into() }
    }

    fn level(&self, factor: usize) -> &str {
        match factor {
            0 => &self.topic,
            1 => &self.strategy,
            _ => &self.plan,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Effect {
    Topic,
    Strategy,
    Plan,
    TopicStrategy,
    TopicPlan,
    StrategyPlan,
    TopicStrategyPlan,
    Residual,
}

impl Effect {
    pub const TERMS: [Effect; 7] = [
        Effect::Topic,
        Effect::Strategy,
        Effect::Plan,
        Effect::TopicStrategy,
        Effect::TopicPlan,
        Effect::StrategyPlan,
        Effect::TopicStrategyPlan,
    ];

    /// Bit i set when factor i (topic, strategy, plan) takes part.
    fn mask(self) -> u8 {
        match self {
            Effect::Topic => 0b001,
            Effect::Strategy => 0b010,
            Effect::Plan => 0b100,
            Effect::TopicStrategy => 0b011,
            Effect::TopicPlan => 0b101,
            Effect::StrategyPlan => 0b110,
            Effect::TopicStrategyPlan => 0b111,
            Effect::Residual => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Effect::Topic => "topic",
            Effect::Strategy => "strategy",
            Effect::Plan => "plan",
            Effect::TopicStrategy => "topic:strategy",
            Effect::TopicPlan => "topic:plan",
            Effect::StrategyPlan => "strategy:plan",
            Effect::TopicStrategyPlan => "topic:strategy:plan",
            Effect::Residual => "residual",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub effect: Effect,
    pub sum_sq: f64,
    pub df: usize,
    /// None for the residual row and for effects without degrees of freedom.
    pub f: Option<f64>,
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaTable {
    pub rows: Vec<AnovaRow>,
}

impl AnovaTable {
    pub fn get(&self, effect: Effect) -> &AnovaRow {
        self.rows.iter().find(|r| r.effect == effect).expect("every effect has a row")
    }

    pub fn residual(&self) -> &AnovaRow {
        self.get(Effect::Residual)
    }
}

/// Treatment-coded columns of every term, keyed by term mask (0 = intercept).
struct Design {
    n: usize,
    columns: Vec<(u8, Vec<f64>)>,
}

impl Design {
    fn new(obs: &[Observation]) -> (Self, [usize; 3]) {
        let n = obs.len();
        let mut dummies: Vec<Vec<Vec<f64>>> = Vec::new();
        let mut levels = [0; 3];
        for (f, count) in levels.iter_mut().enumerate() {
            let lv: Vec<&str> = obs.iter().map(|o| o.level(f)).collect::<BTreeSet<_>>().into_iter().collect();
            *count = lv.len();
            dummies.push(
                lv.iter()
                    .skip(1)
                    .map(|l| obs.iter().map(|o| if o.level(f) == *l { 1.0 } else { 0.0 }).collect())
                    .collect(),
            );
        }
        let mut columns = vec![(0u8, vec![1.0; n])];
        for mask in 1u8..8 {
            let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
            for (f, d) in dummies.iter().enumerate() {
                if mask & (1 << f) == 0 {
                    continue;
                }
                cols = cols
                    .iter()
                    .flat_map(|c| d.iter().map(move |dc| c.iter().zip(dc).map(|(a, b)| a * b).collect()))
                    .collect();
            }
            columns.extend(cols.into_iter().map(|c| (mask, c)));
        }
        (Design { n, columns }, levels)
    }

    fn matrix(&self, keep: impl Fn(u8) -> bool) -> DMatrix<f64> {
        let cols: Vec<&Vec<f64>> = self.columns.iter().filter(|(m, _)| keep(*m)).map(|(_, c)| c).collect();
        DMatrix::from_fn(self.n, cols.len(), |r, c| cols[c][r])
    }
}

/// Three-way ANOVA with all interactions and Type II sums of squares.
///
/// Each term is tested against the model holding every term that does not
/// contain it. Degrees of freedom are rank differences, so empty cells of an
/// unbalanced layout simply remove columns. Factors with a single level get
/// zero degrees of freedom and no F.
pub fn anova3(obs: &[Observation]) -> Result<AnovaTable, StatsError> {
    if obs.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let (design, levels) = Design::new(obs);
    if levels.iter().all(|&l| l < 2) {
        return Err(StatsError::MissingLevels("topic, strategy and plan"));
    }
    let y = DVector::from_iterator(obs.len(), obs.iter().map(|o| o.value));
    let mean = y.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let full = ols(&design.matrix(|_| true), &y);
    if full.df_resid == 0 {
        return Err(StatsError::DegenerateData("no residual degrees of freedom"));
    }
    if tss == 0.0 || full.rss <= 1e-20 * tss {
        return Err(StatsError::DegenerateData("zero residual variance"));
    }
    let ms_resid = full.rss / full.df_resid as f64;

    let mut rows: Vec<AnovaRow> = Effect::TERMS
        .iter()
        .map(|&effect| {
            let t = effect.mask();
            let contains = move |m: u8| m & t == t;
            let base = ols(&design.matrix(|m| !contains(m)), &y);
            let with = ols(&design.matrix(|m| !contains(m) || m == t), &y);
            let df = with.rank - base.rank;
            let sum_sq = if df == 0 { 0.0 } else { (base.rss - with.rss).max(0.0) };
            let (f, p_value) = if df == 0 {
                (None, None)
            } else {
                let f = sum_sq / df as f64 / ms_resid;
                let dist = FisherSnedecor::new(df as f64, full.df_resid as f64).expect("positive df");
                (Some(f), Some(dist.sf(f).clamp(0.0, 1.0)))
            };
            AnovaRow { effect, sum_sq, df, f, p_value }
        })
        .collect();
    rows.push(AnovaRow { effect: Effect::Residual, sum_sq: full.rss, df: full.df_resid, f: None, p_value: None });
    Ok(AnovaTable { rows })
}
