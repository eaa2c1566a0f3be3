//! Coupling of the scheduler output to the battery model.
//!
//! The busy/free waveform becomes a piecewise-constant discharge current:
//! a fixed current while the processor is busy, zero while it idles. The
//! battery trajectory, remaining capacity, and end of life then follow from
//! the battery model. Exact integer ticks are converted to floating-point
//! minutes only at this boundary.

use crate::battery::{
    advance_profile, end_of_life, simulate_profile, BatteryParams, BatteryState, CurrentProfile,
    CurrentSegment, TrajectoryPoint,
};
use crate::error::{Error, Result};
use crate::multisched::{schedule, UtilizationWaveform};
use crate::taskmodel::{ResidueRecord, TaskTrace, WindowSpec};
use crate::timebase::{Tick, TickScale};

/// Everything one window of the coupled simulation produces.
#[derive(Clone, Debug)]
pub struct HybridResult {
    pub waveform: UtilizationWaveform,
    pub profile: CurrentProfile,
    pub trajectory: Vec<TrajectoryPoint>,
    /// Absolute minute at which total loss reaches 1, if within the window.
    pub end_of_life: Option<f64>,
    /// Battery state at the window end, for chaining the next window.
    pub end_state: BatteryState,
    /// Scheduler leftovers at the window end, for chaining the next window.
    pub end_residues: ResidueRecord,
}

/// Translate a busy waveform into alternating current segments covering the
/// window exactly: `busy_current_ma` while busy, zero otherwise.
pub fn current_profile(
    waveform: &UtilizationWaveform,
    scale: &TickScale,
    busy_current_ma: f64,
) -> Result<CurrentProfile> {
    if busy_current_ma <= 0.0 || !busy_current_ma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "busy current must be positive, got {busy_current_ma}"
        )));
    }
    let window = &waveform.window;
    let mut segments = Vec::new();
    let mut cursor = window.t0;
    let push = |from: Tick, to: Tick, current: f64, segments: &mut Vec<CurrentSegment>| {
        if to > from {
            segments.push(CurrentSegment {
                duration_min: scale.minutes_f64(to - from),
                current_ma: current,
            });
        }
    };
    for piece in waveform.busy.iter() {
        push(cursor, piece.start(), 0.0, &mut segments);
        push(piece.start(), piece.end(), busy_current_ma, &mut segments);
        cursor = piece.end();
    }
    push(cursor, window.end(), 0.0, &mut segments);
    CurrentProfile::new(scale.minutes_f64(window.t0), segments)
}

/// Schedule the window, derive its discharge profile, and run the battery
/// over it.
#[allow(clippy::too_many_arguments)]
pub fn run_hybrid(
    traces: &[TaskTrace],
    window: &WindowSpec,
    residues: &ResidueRecord,
    params: &BatteryParams,
    start_state: &BatteryState,
    busy_current_ma: f64,
    sample_step_min: f64,
    scale: &TickScale,
) -> Result<HybridResult> {
    let scheduled = schedule(traces, window, residues)?;
    let profile = current_profile(&scheduled.waveform, scale, busy_current_ma)?;
    let trajectory = simulate_profile(params, start_state, &profile, sample_step_min)?;
    let eol = end_of_life(params, start_state, &profile)?;
    let end_state = advance_profile(params, start_state, &profile)?;
    let end_residues = scheduled.export_residues().clone();
    Ok(HybridResult {
        waveform: scheduled.waveform,
        profile,
        trajectory,
        end_of_life: eol,
        end_state,
        end_residues,
    })
}

/// Total busy time of the window in minutes.
pub fn busy_time_min(waveform: &UtilizationWaveform, scale: &TickScale) -> f64 {
    scale.minutes_f64(waveform.busy.measure())
}
