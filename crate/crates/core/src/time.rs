use std::fmt;

use serde::{Deserialize, Serialize};

pub const MINUTES_PER_DAY: u32 = 1440;

/// Simulation clock with one-minute resolution.
///
/// Ordering is lexicographic on `(day, minute_of_day)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimTime {
    pub day: u32,
    pub minute_of_day: u32,
}

impl SimTime {
    pub const ZERO: SimTime = SimTime { day: 0, minute_of_day: 0 };
    pub const LAST_MINUTE: u32 = MINUTES_PER_DAY - 1;

    /// Panics if `minute_of_day` is outside `[0, 1439]`.
    pub fn new(day: u32, minute_of_day: u32) -> Self {
        assert!(minute_of_day < MINUTES_PER_DAY, "minute_of_day {minute_of_day} out of range");
        SimTime { day, minute_of_day }
    }

    pub fn start_of_day(day: u32) -> Self {
        SimTime { day, minute_of_day: 0 }
    }

    pub fn end_of_day(day: u32) -> Self {
        SimTime { day, minute_of_day: MINUTES_PER_DAY - 1 }
    }

    pub fn at(day: u32, hour: u32, minute: u32) -> Self {
        Self::new(day, hour * 60 + minute)
    }

    pub fn from_minutes(total: u64) -> Self {
        SimTime {
            day: (total / u64::from(MINUTES_PER_DAY)) as u32,
            minute_of_day: (total % u64::from(MINUTES_PER_DAY)) as u32,
        }
    }

    pub fn total_minutes(self) -> u64 {
        u64::from(self.day) * u64::from(MINUTES_PER_DAY) + u64::from(self.minute_of_day)
    }

    pub fn plus_minutes(self, minutes: u64) -> Self {
        Self::from_minutes(self.total_minutes() + minutes)
    }

    pub fn plus_days(self, days: u32) -> Self {
        SimTime { day: self.day + days, minute_of_day: self.minute_of_day }
    }

    /// Whole minutes from `earlier` to `self`, saturating at zero.
    pub fn minutes_since(self, earlier: SimTime) -> u64 {
        self.total_minutes().saturating_sub(earlier.total_minutes())
    }

    /// Elapsed time in fractional days.
    pub fn days_since(self, earlier: SimTime) -> f64 {
        (self.total_minutes() as f64 - earlier.total_minutes() as f64) / f64::from(MINUTES_PER_DAY)
    }

    /// One-based week number.
    pub fn week(self) -> u32 {
        self.day / 7 + 1
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}+{:02}:{:02}", self.day, self.minute_of_day / 60, self.minute_of_day % 60)
    }
}
