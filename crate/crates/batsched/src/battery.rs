//! Dynamic battery capacity model.
//!
//! The battery is a diagonal linear state-space system. The state vector
//! `x = [x_0, x_1, ..., x_m]` splits the total capacity loss `y = sum(x_j)`
//! into a permanent part `x_0` (the charge actually delivered, scaled by
//! `1/alpha`) and temporary parts `x_1..x_m` that build up under load and
//! decay at rates `lambda_j = beta * j^2` while the battery rests. The decay
//! is what produces the apparent capacity recovery during idle periods.
//! The battery is empty when `y` reaches 1.
//!
//! Because the discharge current produced by the scheduler is piecewise
//! constant, each segment can be advanced with the exact closed-form solution
//! of the linear system; no ODE stepping error enters the trajectory.

use crate::error::{Error, Result};

/// The two battery characterization parameters and the truncation order of
/// the temporary-loss expansion.
///
/// Units follow the convention used throughout: current in mA, time in
/// minutes, so `alpha` is in mA·min and `beta` in 1/min.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryParams {
    alpha: f64,
    beta: f64,
    m: usize,
}

/// Default number of temporary-loss states.
pub const DEFAULT_TRUNCATION: usize = 10;

impl BatteryParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_truncation(alpha, beta, DEFAULT_TRUNCATION)
    }

    pub fn with_truncation(alpha: f64, beta: f64, m: usize) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidInput(format!(
                "battery alpha must be positive and finite, got {alpha}"
            )));
        }
        if beta <= 0.0 || !beta.is_finite() {
            return Err(Error::InvalidInput(format!(
                "battery beta must be positive and finite, got {beta}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidInput(
                "battery truncation order must be at least 1".to_string(),
            ));
        }
        Ok(BatteryParams { alpha, beta, m })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn truncation(&self) -> usize {
        self.m
    }

    /// Decay rate of the j-th temporary-loss state, `beta * j^2`.
    pub fn rate(&self, j: usize) -> f64 {
        self.beta * (j * j) as f64
    }
}

/// Capacity-loss state vector. Index 0 is the permanent loss, indices
/// `1..=m` the temporary losses. A fresh battery is all zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct BatteryState {
    x: Vec<f64>,
}

impl BatteryState {
    pub fn fresh(params: &BatteryParams) -> Self {
        BatteryState {
            x: vec![0.0; params.m + 1],
        }
    }

    pub fn from_components(x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidInput(
                "battery state needs at least the permanent-loss component".to_string(),
            ));
        }
        Ok(BatteryState { x })
    }

    pub fn components(&self) -> &[f64] {
        &self.x
    }

    pub fn permanent(&self) -> f64 {
        self.x[0]
    }

    pub fn temporary(&self) -> f64 {
        self.x[1..].iter().sum()
    }

    pub fn total_loss(&self) -> f64 {
        self.x.iter().sum()
    }
}

/// One stretch of constant discharge current.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurrentSegment {
    pub duration_min: f64,
    pub current_ma: f64,
}

/// Piecewise-constant discharge current: contiguous segments starting at an
/// absolute time.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CurrentProfile {
    pub start_min: f64,
    pub segments: Vec<CurrentSegment>,
}

impl CurrentProfile {
    pub fn new(start_min: f64, segments: Vec<CurrentSegment>) -> Result<Self> {
        for seg in &segments {
            if seg.duration_min <= 0.0 || !seg.duration_min.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "profile segment duration must be positive, got {}",
                    seg.duration_min
                )));
            }
            if seg.current_ma < 0.0 || !seg.current_ma.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "profile segment current must be nonnegative, got {}",
                    seg.current_ma
                )));
            }
        }
        Ok(CurrentProfile { start_min, segments })
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration_min).sum()
    }

    pub fn end_min(&self) -> f64 {
        self.start_min + self.total_duration()
    }
}

/// Snapshot of the loss split and whether the battery can still deliver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityReport {
    pub total: f64,
    pub permanent: f64,
    pub temporary: f64,
    pub alive: bool,
}

/// Total loss split of a state; `alive` while the total is below 1.
pub fn capacity_report(state: &BatteryState) -> CapacityReport {
    let permanent = state.permanent();
    let temporary = state.temporary();
    let total = state.total_loss();
    CapacityReport {
        total,
        permanent,
        temporary,
        alive: total < 1.0,
    }
}

/// Evolve the state under constant current for `dt` minutes using the exact
/// solution of the diagonal system:
///
/// ```text
/// x_0' = x_0 + I*dt/alpha
/// x_j' = x_j * exp(-lambda_j*dt) + (2I/(alpha*lambda_j)) * (1 - exp(-lambda_j*dt))
/// ```
pub fn advance(
    state: &BatteryState,
    params: &BatteryParams,
    current_ma: f64,
    dt_min: f64,
) -> Result<BatteryState> {
    if dt_min < 0.0 || !dt_min.is_finite() {
        return Err(Error::InvalidInput(format!(
            "advance duration must be nonnegative, got {dt_min}"
        )));
    }
    if current_ma < 0.0 || !current_ma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "discharge current must be nonnegative, got {current_ma}"
        )));
    }
    if state.x.len() != params.m + 1 {
        return Err(Error::InvalidInput(format!(
            "state has {} components but parameters expect {}",
            state.x.len(),
            params.m + 1
        )));
    }
    let mut x = state.x.clone();
    x[0] += current_ma * dt_min / params.alpha;
    for (j, component) in x.iter_mut().enumerate().skip(1) {
        let lambda = params.rate(j);
        let decay = (-lambda * dt_min).exp();
        let forced = 2.0 * current_ma / (params.alpha * lambda) * (-(-lambda * dt_min).exp_m1());
        *component = *component * decay + forced;
    }
    Ok(BatteryState { x })
}

/// Closed-form total loss after drawing constant current for `t` minutes
/// from a fresh battery:
///
/// ```text
/// y(t) = (I/alpha) * [ t + 2 * sum_{j=1..m} (1 - exp(-beta*j^2*t)) / (beta*j^2) ]
/// ```
///
/// Written directly from the output equation, independently of the state
/// update in [`advance`], so the two can check each other.
pub fn sigma_constant(params: &BatteryParams, current_ma: f64, t_min: f64) -> f64 {
    let mut series = 0.0;
    for j in 1..=params.m {
        let lambda = params.rate(j);
        series += (-(-lambda * t_min).exp_m1()) / lambda;
    }
    current_ma / params.alpha * (t_min + 2.0 * series)
}

/// Trajectory sample: absolute time in minutes plus the loss report there.
pub type TrajectoryPoint = (f64, CapacityReport);

/// Sample the loss trajectory over a profile.
///
/// Segment boundaries are always sampled, advanced exactly; interior samples
/// are spaced `sample_step` minutes apart and computed from the segment-start
/// state, so sampling never perturbs the endpoint values.
pub fn simulate_profile(
    params: &BatteryParams,
    start_state: &BatteryState,
    profile: &CurrentProfile,
    sample_step_min: f64,
) -> Result<Vec<TrajectoryPoint>> {
    if sample_step_min <= 0.0 || sample_step_min.is_nan() {
        return Err(Error::InvalidInput(format!(
            "sample step must be positive, got {sample_step_min}"
        )));
    }
    let mut out = Vec::new();
    let mut state = start_state.clone();
    let mut t = profile.start_min;
    out.push((t, capacity_report(&state)));
    for seg in &profile.segments {
        // offsets are recomputed per index so float accumulation cannot
        // push a sample onto (or past) the segment boundary
        let mut k = 1u64;
        loop {
            let offset = k as f64 * sample_step_min;
            if offset >= seg.duration_min - 1e-9 {
                break;
            }
            let mid = advance(&state, params, seg.current_ma, offset)?;
            out.push((t + offset, capacity_report(&mid)));
            k += 1;
        }
        state = advance(&state, params, seg.current_ma, seg.duration_min)?;
        t += seg.duration_min;
        out.push((t, capacity_report(&state)));
    }
    Ok(out)
}

/// State at the end of a profile, with every segment advanced exactly.
pub fn advance_profile(
    params: &BatteryParams,
    start_state: &BatteryState,
    profile: &CurrentProfile,
) -> Result<BatteryState> {
    let mut state = start_state.clone();
    for seg in &profile.segments {
        state = advance(&state, params, seg.current_ma, seg.duration_min)?;
    }
    Ok(state)
}

/// Bisection tolerance, in minutes, for locating the end-of-life crossing.
pub const EOL_TOLERANCE_MIN: f64 = 1e-9;

/// Earliest absolute time at which the total loss reaches 1, or `None` if
/// the battery survives the whole profile.
///
/// For on/off profiles (one busy current level alternating with rest, which
/// is what the scheduler coupling produces) the loss is strictly increasing
/// while current flows and non-increasing at rest, so the first crossing is
/// bracketed segment by segment and resolved by bisection. Only the first
/// crossing is reported, even if a later rest drops the loss back below 1.
/// On profiles that step between several positive current levels the loss
/// can dip within a segment whose current is lower than its predecessor's;
/// the reported time is then a crossing, not necessarily the earliest.
pub fn end_of_life(
    params: &BatteryParams,
    start_state: &BatteryState,
    profile: &CurrentProfile,
) -> Result<Option<f64>> {
    let mut state = start_state.clone();
    let mut t = profile.start_min;
    if capacity_report(&state).total >= 1.0 {
        return Ok(Some(t));
    }
    for seg in &profile.segments {
        let end_state = advance(&state, params, seg.current_ma, seg.duration_min)?;
        if end_state.total_loss() >= 1.0 {
            // loss rises only under positive current, so the crossing lies in
            // this segment; bisect the offset from the segment start
            let mut lo = 0.0f64;
            let mut hi = seg.duration_min;
            while hi - lo > EOL_TOLERANCE_MIN {
                let mid = 0.5 * (lo + hi);
                let probe = advance(&state, params, seg.current_ma, mid)?;
                if probe.total_loss() >= 1.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(t + hi));
        }
        state = end_state;
        t += seg.duration_min;
    }
    Ok(None)
}
