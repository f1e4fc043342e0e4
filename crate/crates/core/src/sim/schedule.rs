use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::time::{SimTime, MINUTES_PER_DAY};

/// Minimum distance between a day's two posts.
pub const MIN_POST_GAP_MINUTES: u32 = 8 * 60;
/// Latest possible first post: `1440 - 480 - 1`.
pub const LATEST_FIRST_POST: u32 = MINUTES_PER_DAY - MIN_POST_GAP_MINUTES - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ScheduleMode {
    #[default]
    Random,
    /// Always 09:00 and 17:00.
    Fixed,
}

/// Publication times of a day's two posts, at least 8 hours apart.
///
/// Random mode is uniform over all feasible `(t1, t2)` minute pairs,
/// obtained by rejection from the full square.
pub fn schedule_posts<R: Rng + ?Sized>(day: u32, mode: ScheduleMode, rng: &mut R) -> (SimTime, SimTime) {
    match mode {
        ScheduleMode::Fixed => (SimTime::at(day, 9, 0), SimTime::at(day, 17, 0)),
        ScheduleMode::Random => loop {
            let t1 = rng.random_range(0..=LATEST_FIRST_POST);
            let t2 = rng.random_range(0..MINUTES_PER_DAY);
            if t2 >= t1 + MIN_POST_GAP_MINUTES {
                return (SimTime::new(day, t1), SimTime::new(day, t2));
            }
        },
    }
}
