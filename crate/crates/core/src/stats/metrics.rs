use super::StatsError;

/// Interactions per honeypot per week.
pub fn interactions_per_week(total: u64, honeypots: u32, weeks: f64) -> Result<f64, StatsError> {
    if honeypots == 0 || !(weeks > 0.0) {
        return Err(StatsError::DivisionDomain);
    }
    Ok(total as f64 / (f64::from(honeypots) * weeks))
}

/// `x` rounded half away from zero to `decimals` places.
pub fn round_to(x: f64, decimals: u32) -> f64 {
    let f = 10f64.powi(decimals as i32);
    (x * f).round() / f
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reported_rates() {
        assert_eq!(round_to(interactions_per_week(21870, 21, 9.0).unwrap(), 1), 115.7);
        assert_eq!(round_to(interactions_per_week(753, 21, 9.0).unwrap(), 2), 3.98);
        assert_eq!(interactions_per_week(0, 21, 9.0).unwrap(), 0.0);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(interactions_per_week(10, 0, 9.0), Err(StatsError::DivisionDomain));
        assert_eq!(interactions_per_week(10, 3, 0.0), Err(StatsError::DivisionDomain));
    }

    proptest! {
        #[test]
        fn additive(a in 0u64..1_000_000, b in 0u64..1_000_000, h in 1u32..100, w in 0.5f64..52.0) {
            let sum = interactions_per_week(a + b, h, w).unwrap();
            let parts = interactions_per_week(a, h, w).unwrap() + interactions_per_week(b, h, w).unwrap();
            prop_assert!((sum - parts).abs() <= 1e-9 * sum.max(1.0));
        }
    }
}
