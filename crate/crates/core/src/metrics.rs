//! Terminal and convergence metrics, computed from a trajectory log alone.

use alloc::vec::Vec;

use crate::math::abs;
use crate::simulator::{Sample, TrajectoryLog};

/// Threshold on `|e_l|` and `||delta||`, s.
pub const CONVERGENCE_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunMetrics {
    /// Leader first; `None` if the interceptor never reached the target.
    pub impact_times: Vec<Option<f64>>,
    pub impact_spread: Option<f64>,
    pub miss_distances: Vec<Option<f64>>,
    /// First logged time after which `|e_l| < 0.01 s` holds for good.
    pub leader_convergence_time: Option<f64>,
    /// First logged time after which `||delta|| < 0.01 s` holds for good.
    pub consensus_time: Option<f64>,
    /// Largest commanded `|a|` per interceptor, m/s^2.
    pub max_abs_accel: Vec<f64>,
    /// Time spent with a clamped command per interceptor, s.
    pub saturation_durations: Vec<f64>,
    pub mission_success: bool,
}

/// First sample time from which `pred` holds through the end of the log.
fn settled_from(samples: &[Sample], pred: impl Fn(&Sample) -> bool) -> Option<f64> {
    let mut first = None;
    for s in samples.iter().rev() {
        if pred(s) {
            first = Some(s.t);
        } else {
            break;
        }
    }
    first
}

impl RunMetrics {
    pub fn from_log(log: &TrajectoryLog) -> Self {
        let n = log.names.len();
        let impact_times: Vec<Option<f64>> = log.terminals.iter().map(|t| t.impact_time).collect();
        let miss_distances = log.terminals.iter().map(|t| t.miss_distance).collect();
        let mission_success = n > 0 && impact_times.iter().all(Option::is_some);
        let impact_spread = if mission_success {
            let times: Vec<f64> = impact_times.iter().flatten().copied().collect();
            let max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = times.iter().copied().fold(f64::INFINITY, f64::min);
            Some(max - min)
        } else {
            None
        };

        let mut max_abs_accel = alloc::vec![0.0f64; n];
        let mut saturation_durations = alloc::vec![0.0f64; n];
        for (k, s) in log.samples.iter().enumerate() {
            let span = log.samples.get(k + 1).map_or(0.0, |next| next.t - s.t);
            for (i, is) in s.interceptors.iter().enumerate() {
                max_abs_accel[i] = max_abs_accel[i].max(abs(is.a_mc));
                if is.saturated {
                    saturation_durations[i] += span;
                }
            }
        }

        RunMetrics {
            impact_times,
            impact_spread,
            miss_distances,
            leader_convergence_time: settled_from(&log.samples, |s| {
                s.interceptors
                    .first()
                    .is_some_and(|l| abs(l.error) < CONVERGENCE_THRESHOLD)
            }),
            consensus_time: settled_from(&log.samples, |s| s.delta_norm < CONVERGENCE_THRESHOLD),
            max_abs_accel,
            saturation_durations,
            mission_success,
        }
    }
}
