//! Daily plans for working-day nodes.

use alloc::vec::Vec;

use super::map::VertexId;
use super::TimeRange;
use crate::rng::RngStream;
use crate::NodeId;

/// Fixed per-person facts drawn once when the world is built.
#[derive(Clone, Debug, PartialEq)]
pub struct PersonProfile {
    pub node: NodeId,
    pub home: VertexId,
    pub office: VertexId,
    /// Meeting spots of the person's group.
    pub meeting_spots: Vec<VertexId>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DayParams {
    pub work_ms: u64,
    /// Window for the time of day the person leaves home.
    pub work_start: TimeRange,
    pub activity_probability: f64,
    pub activity: TimeRange,
}

impl Default for DayParams {
    fn default() -> Self {
        use crate::time::MS_PER_HOUR;
        DayParams {
            work_ms: 8 * MS_PER_HOUR,
            work_start: TimeRange::new(7 * MS_PER_HOUR, 9 * MS_PER_HOUR),
            activity_probability: 0.5,
            activity: TimeRange::new(MS_PER_HOUR, 2 * MS_PER_HOUR),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DailySchedule {
    pub day_index: u64,
    pub home: VertexId,
    pub office: VertexId,
    /// Time of day (ms after midnight) the person leaves home.
    pub work_start_ms: u64,
    pub work_ms: u64,
    pub evening_activity: bool,
    pub activity_spot: Option<VertexId>,
    pub activity_ms: u64,
}

/// Draws the plan for one day. The stream should be dedicated to
/// `(node, day_index)` so that plans do not depend on anything else.
pub fn plan_day(profile: &PersonProfile, day_index: u64, params: &DayParams, rng: &mut RngStream) -> DailySchedule {
    let work_start_ms = rng.range_u64(params.work_start.min_ms, params.work_start.max_ms);
    let evening_activity = rng.chance(params.activity_probability) && !profile.meeting_spots.is_empty();
    let spot_index = rng.index(profile.meeting_spots.len().max(1));
    let activity_ms = rng.range_u64(params.activity.min_ms, params.activity.max_ms);
    DailySchedule {
        day_index,
        home: profile.home,
        office: profile.office,
        work_start_ms,
        work_ms: params.work_ms,
        evening_activity,
        activity_spot: evening_activity.then(|| profile.meeting_spots[spot_index]),
        activity_ms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_stream;
    use crate::time::MS_PER_HOUR;
    use alloc::format;
    use alloc::vec;

    fn profile() -> PersonProfile {
        PersonProfile {
            node: 3,
            home: 0,
            office: 5,
            meeting_spots: vec![7, 8],
        }
    }

    #[test]
    fn evening_activity_frequency_is_about_half() {
        // Binomial(1000, 0.5) lies in [450, 550] with probability > 0.998.
        let p = profile();
        let params = DayParams::default();
        let hits = (0..1000u64)
            .filter(|&d| {
                let mut rng = derive_stream(11, &format!("mobility.day.{}.{}", p.node, d));
                plan_day(&p, d, &params, &mut rng).evening_activity
            })
            .count();
        assert!((450..=550).contains(&hits), "{hits}");
    }

    #[test]
    fn schedule_invariants_hold() {
        let p = profile();
        let params = DayParams::default();
        for d in 0..500 {
            let mut rng = derive_stream(5, &format!("mobility.day.3.{d}"));
            let s = plan_day(&p, d, &params, &mut rng);
            assert_eq!(s.work_ms, 8 * MS_PER_HOUR);
            assert!((MS_PER_HOUR..=2 * MS_PER_HOUR).contains(&s.activity_ms));
            assert_eq!(s.evening_activity, s.activity_spot.is_some());
            if let Some(spot) = s.activity_spot {
                assert!(p.meeting_spots.contains(&spot));
            }
        }
    }

    #[test]
    fn same_inputs_same_schedule() {
        let p = profile();
        let params = DayParams::default();
        let a = plan_day(&p, 4, &params, &mut derive_stream(1, "mobility.day.3.4"));
        let b = plan_day(&p, 4, &params, &mut derive_stream(1, "mobility.day.3.4"));
        assert_eq!(a, b);
    }
}
