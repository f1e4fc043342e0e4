use serde::{Deserialize, Serialize};

use super::ptukey::ptukey;
use super::StatsError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyPair {
    pub group_a: String,
    pub group_b: String,
    /// `mean_b - mean_a`.
    pub mean_diff: f64,
    pub q_stat: f64,
    pub p_value: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TukeyResult {
    pub pairs: Vec<TukeyPair>,
    pub alpha: f64,
    /// Pooled within-group mean square and its degrees of freedom.
    pub msw: f64,
    pub df: usize,
}

impl TukeyResult {
    pub fn pair(&self, a: &str, b: &str) -> Option<&TukeyPair> {
        self.pairs
            .iter()
            .find(|p| (p.group_a == a && p.group_b == b) || (p.group_a == b && p.group_b == a))
    }

    pub fn any_significant(&self) -> bool {
        self.pairs.iter().any(|p| p.significant)
    }
}

/// All-pairs Tukey HSD (Tukey-Kramer for unequal sizes), pairs in input order.
pub fn tukey_hsd(groups: &[(String, Vec<f64>)], alpha: f64) -> Result<TukeyResult, StatsError> {
    if groups.len() < 2 || groups.iter().any(|(_, v)| v.len() < 2) {
        return Err(StatsError::TooFewGroups);
    }
    let k = groups.len();
    let n: usize = groups.iter().map(|(_, v)| v.len()).sum();
    let means: Vec<f64> = groups.iter().map(|(_, v)| v.iter().sum::<f64>() / v.len() as f64).collect();
    let ssw: f64 = groups
        .iter()
        .zip(&means)
        .map(|((_, v), m)| v.iter().map(|x| (x - m).powi(2)).sum::<f64>())
        .sum();
    let df = n - k;
    if df == 0 {
        return Err(StatsError::TooFewGroups);
    }
    let msw = ssw / df as f64;
    if msw <= 0.0 {
        return Err(StatsError::DegenerateData("zero within-group variance"));
    }
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let (na, nb) = (groups[i].1.len() as f64, groups[j].1.len() as f64);
            let mean_diff = means[j] - means[i];
            let q_stat = mean_diff.abs() / (msw / 2.0 * (1.0 / na + 1.0 / nb)).sqrt();
            let p_value = (1.0 - ptukey(q_stat, k, df as f64)).clamp(0.0, 1.0);
            pairs.push(TukeyPair {
                group_a: groups[i].0.clone(),
                group_b: groups[j].0.clone(),
                mean_diff,
                q_stat,
                p_value,
                significant: p_value < alpha,
            });
        }
    }
    Ok(TukeyResult { pairs, alpha, msw, df })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn groups(sep: [f64; 3]) -> Vec<(String, Vec<f64>)> {
        let noise = [0.5, -1.2, 0.3, 1.1, -0.4, 0.9, -1.0];
        sep.iter()
            .enumerate()
            .map(|(g, m)| (format!("g{g}"), noise.iter().map(|e| m + e * (1.0 + g as f64 * 0.1)).collect()))
            .collect()
    }

    #[test]
    fn identical_means_are_not_significant() {
        let r = tukey_hsd(&groups([0.0, 0.0, 0.0]), 0.05).unwrap();
        assert!(!r.any_significant());
        let same: Vec<(String, Vec<f64>)> = (0..3).map(|g| (format!("g{g}"), vec![1.0, 2.0, 3.0, 4.0])).collect();
        let r = tukey_hsd(&same, 0.05).unwrap();
        assert!(r.pairs.iter().all(|p| p.mean_diff == 0.0 && !p.significant));
    }

    #[test]
    fn separated_groups_all_significant() {
        let r = tukey_hsd(&groups([0.0, 5.0, 10.0]), 0.05).unwrap();
        assert_eq!(r.pairs.len(), 3);
        assert!(r.pairs.iter().all(|p| p.significant && p.p_value < 1e-4));
        assert_eq!(r.df, 18);
    }

    #[test]
    fn too_few() {
        assert_eq!(tukey_hsd(&groups([0.0, 1.0, 2.0])[..1], 0.05), Err(StatsError::TooFewGroups));
        let tiny = vec![("a".to_string(), vec![1.0]), ("b".to_string(), vec![1.0, 2.0])];
        assert_eq!(tukey_hsd(&tiny, 0.05), Err(StatsError::TooFewGroups));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn shift_and_scale_invariance(shift in -100.0f64..100.0, scale in 0.1f64..50.0, d in 0.0f64..3.0) {
            let base = groups([0.0, d, 2.0 * d]);
            let moved: Vec<(String, Vec<f64>)> =
                base.iter().map(|(l, v)| (l.clone(), v.iter().map(|x| x * scale + shift).collect())).collect();
            let a = tukey_hsd(&base, 0.05).unwrap();
            let b = tukey_hsd(&moved, 0.05).unwrap();
            for (x, y) in a.pairs.iter().zip(&b.pairs) {
                prop_assert!((x.q_stat - y.q_stat).abs() <= 1e-9 * x.q_stat.max(1.0));
                prop_assert_eq!(x.significant, y.significant);
            }
        }
    }
}
