//! Two-task dynamic scheduling model.
//!
//! For a high-priority task `alpha` and a low-priority task `beta`, the
//! processor state over each request interval `[t_alpha(n), t_alpha(n+1))`
//! is fully determined by a small state vector that is advanced by
//! difference equations, instead of replaying history:
//!
//! * `y` - index of the first `beta` instance requested at or after the
//!   current `alpha` request,
//! * `z` - phase offset from the current `alpha` request to that instance,
//! * `residue` - work of the previous `beta` instance still unfinished at
//!   the current `alpha` request.
//!
//! Each interval contributes at most two busy pieces: the `alpha` instance
//! plus any residue it lets through, and the freshly requested `beta`
//! instance truncated to the idle time left. The per-interval records are
//! what the multi-task fold consumes.

use std::fmt;

use crate::error::{Error, Result};
use crate::taskmodel::{TaskTrace, WindowSpec};
use crate::timebase::{Interval, IntervalSet, Tick};

/// Scheduling state at the n-th request of the high-priority task.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairState {
    /// 1-based instance index of the high-priority task.
    pub n: usize,
    /// Request time of instance `n`.
    pub t_alpha: Tick,
    /// 1-based index of the first low-priority instance requested at or
    /// after `t_alpha`; one past the trace length means no such instance
    /// exists and the window end acts as a zero-cost sentinel request.
    pub y: usize,
    /// Phase offset to that instance (window end for the sentinel).
    pub z: Tick,
    /// Unfinished work of low-priority instance `y - 1` at `t_alpha`.
    pub residue: Tick,
}

impl PairState {
    /// Time in this interval that can serve leftover low-priority work:
    /// `min(idle slack, residue)`.
    pub fn allocatable_residue(&self, input: &StepInput) -> Tick {
        input.idle_slack().min(self.residue)
    }
}

/// Per-interval quantities consumed by one transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepInput {
    /// Request interval of the current high-priority instance.
    pub alpha_interval: Tick,
    /// Computing time of the current high-priority instance.
    pub alpha_computing: Tick,
    /// Request interval of low-priority instance `y`; ignored when no
    /// instance is requested within this interval.
    pub beta_interval: Tick,
    /// Computing time of low-priority instance `y`; ignored likewise.
    pub beta_computing: Tick,
}

impl StepInput {
    /// Idle time the high-priority instance leaves in its interval. Zero if
    /// the instance overruns its own interval.
    pub fn idle_slack(&self) -> Tick {
        (self.alpha_interval - self.alpha_computing).max(Tick::ZERO)
    }
}

/// The two shapes a request interval's busy waveform can take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentMode {
    /// `0 <= z < T_alpha`: a low-priority instance is requested within this
    /// interval; the waveform has up to two pieces.
    BetaRequested,
    /// `z >= T_alpha`: no low-priority request here; only the high-priority
    /// instance and any carried residue execute.
    BetaAbsent,
}

/// Initial state for a window: the high-priority trace has been normalized
/// to start at the window origin, so the first low-priority request (if any)
/// fixes the phase, and the carried low-priority residue seeds `P(1)`.
pub fn init_pair(
    alpha: &TaskTrace,
    beta: &TaskTrace,
    window: &WindowSpec,
    beta_residue: Tick,
) -> PairState {
    debug_assert_eq!(alpha.first_request(), Some(window.t0));
    let first_beta = beta.first_request().unwrap_or_else(|| window.end());
    PairState {
        n: 1,
        t_alpha: window.t0,
        y: 1,
        z: first_beta - window.t0,
        residue: beta_residue,
    }
}

/// One transition of the difference equations.
///
/// When a low-priority instance falls inside the interval (`z < T_alpha`)
/// it is consumed: `y` advances, the phase moves by `T_beta(y) - T_alpha`,
/// and the new residue is whatever part of that instance did not fit in the
/// idle time after the high-priority work. Otherwise the phase simply slides
/// down by `T_alpha` and the old residue drains through the idle slack.
pub fn step(state: &PairState, input: &StepInput) -> PairState {
    let t_next = state.t_alpha + input.alpha_interval;
    if state.z < input.alpha_interval {
        let beta_start = state.z.max(input.alpha_computing);
        let allocation = (input.alpha_interval - beta_start).max(Tick::ZERO);
        PairState {
            n: state.n + 1,
            t_alpha: t_next,
            y: state.y + 1,
            z: state.z + input.beta_interval - input.alpha_interval,
            residue: (input.beta_computing - allocation).max(Tick::ZERO),
        }
    } else {
        PairState {
            n: state.n + 1,
            t_alpha: t_next,
            y: state.y,
            z: state.z - input.alpha_interval,
            residue: (state.residue - input.idle_slack()).max(Tick::ZERO),
        }
    }
}

/// Busy pieces of the interval `[t_alpha(n), t_alpha(n) + T_alpha(n))`.
///
/// Both modes start with `[t, t + C_alpha + R)`: the high-priority instance
/// immediately followed by as much leftover low-priority work as the slack
/// admits. When a low-priority instance is requested in this interval, it
/// additionally executes from `max(C_alpha, z)` for as long as the interval
/// allows. Overlapping or touching pieces merge through normalization.
pub fn segment_waveform(state: &PairState, input: &StepInput) -> IntervalSet {
    let t = state.t_alpha;
    let first_len = input.alpha_computing + state.allocatable_residue(input);
    let mut pieces = vec![Interval::new(t, t + first_len).expect("nonnegative busy length")];
    if state.z < input.alpha_interval {
        let beta_start = state.z.max(input.alpha_computing);
        let allocation = (input.alpha_interval - beta_start).max(Tick::ZERO);
        let executed = input.beta_computing.min(allocation);
        pieces.push(
            Interval::new(t + beta_start, t + beta_start + executed)
                .expect("nonnegative busy length"),
        );
    }
    IntervalSet::from_unnormalized(pieces)
}

/// Record of one interval, retained for the multi-task combination step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentRecord {
    /// 1-based interval index `n`.
    pub index: usize,
    /// Interval start `t_alpha(n)`.
    pub start: Tick,
    /// Interval length `T_alpha(n)`.
    pub interval: Tick,
    pub mode: SegmentMode,
    /// Busy length of the leading piece: `C_alpha(n) + R(n)`.
    pub first_computing: Tick,
    /// Offset of the low-priority execution piece: `max(C_alpha(n), z(n))`.
    pub second_offset: Tick,
    /// Executed low-priority time: `min(C_beta(y), T_alpha - max(C_alpha, z))`.
    pub second_computing: Tick,
}

/// Scheduling irregularities observed during a run. The waveform is still
/// produced; these flag inputs outside the model's guaranteed domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    /// A task's request arrived while its own earlier work was unfinished.
    DeadlineMiss { task: String, at: Tick, pending: Tick },
    /// A combined trace's largest request interval exceeded its source's.
    Proposition1Violation {
        level: usize,
        combined_max: Tick,
        alpha_max: Tick,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DeadlineMiss { task, at, pending } => write!(
                f,
                "deadline miss: task {task} requested at {at} with {pending} still pending"
            ),
            Diagnostic::Proposition1Violation {
                level,
                combined_max,
                alpha_max,
            } => write!(
                f,
                "combined trace at level {level} has max interval {combined_max} > source max {alpha_max}"
            ),
        }
    }
}

/// Full two-task run over a window.
#[derive(Clone, Debug)]
pub struct PairRun {
    /// Busy waveform, clamped to the window.
    pub waveform: IntervalSet,
    /// Per-interval bookkeeping in order.
    pub segments: Vec<SegmentRecord>,
    /// States `n = 1 ..= len+1`; the last one sits at the window end and its
    /// residue is the low-priority work left over.
    pub states: Vec<PairState>,
    /// Low-priority work unfinished at the window end.
    pub beta_end_residue: Tick,
    /// High-priority work unfinished at the window end (its final instance
    /// ran past the cut).
    pub alpha_end_residue: Tick,
    pub diagnostics: Vec<Diagnostic>,
}

/// Run the pair model across the whole window.
///
/// `alpha` must have been normalized by `init_window` (first request at the
/// window origin); `beta` is the raw in-window trace of the lower-priority
/// task and `beta_residue` its carried-in leftover work.
///
/// Fails if two low-priority requests ever fall inside one high-priority
/// interval: that breaks the one-instance-per-interval premise the
/// transition equations rest on, and means the priority-ordering rule did
/// not actually hold on this input.
pub fn run_pair(
    alpha: &TaskTrace,
    beta: &TaskTrace,
    window: &WindowSpec,
    beta_residue: Tick,
) -> Result<PairRun> {
    if alpha.first_request() != Some(window.t0) {
        return Err(Error::InvalidInput(format!(
            "high-priority trace {} must start at the window origin {}",
            alpha.name(),
            window.t0
        )));
    }
    let end = window.end();
    let beta_len = beta.len();
    let beta_request = |y: usize| -> Tick {
        if y <= beta_len {
            beta.instances()[y - 1].request
        } else {
            end
        }
    };

    let mut state = init_pair(alpha, beta, window, beta_residue);
    let mut states = vec![state];
    let mut segments = Vec::with_capacity(alpha.len());
    let mut pieces = IntervalSet::new();
    let mut diagnostics = Vec::new();

    for (idx, inst) in alpha.instances().iter().enumerate() {
        debug_assert_eq!(state.t_alpha, inst.request);
        debug_assert_eq!(state.z, beta_request(state.y) - state.t_alpha);
        let input = if state.y <= beta_len {
            StepInput {
                alpha_interval: alpha.request_interval(idx, end),
                alpha_computing: inst.computing,
                beta_interval: beta.request_interval(state.y - 1, end),
                beta_computing: beta.instances()[state.y - 1].computing,
            }
        } else {
            // sentinel: a zero-cost request at the window end; `z >= T_alpha`
            // holds by construction so the beta fields are never consumed
            StepInput {
                alpha_interval: alpha.request_interval(idx, end),
                alpha_computing: inst.computing,
                beta_interval: Tick::ZERO,
                beta_computing: Tick::ZERO,
            }
        };
        debug_assert!(
            state.y <= beta_len || state.z >= input.alpha_interval,
            "sentinel must stay in the no-request branch"
        );

        if state.z < input.alpha_interval {
            // the old residue must clear before the new request to meet its
            // implicit deadline
            let served_before_request = (state.z - input.alpha_computing).max(Tick::ZERO);
            if state.residue > served_before_request {
                diagnostics.push(Diagnostic::DeadlineMiss {
                    task: beta.name().to_string(),
                    at: state.t_alpha + state.z,
                    pending: state.residue - served_before_request.min(state.residue),
                });
            }
        }
        let is_last = idx + 1 == alpha.len();
        if !is_last && input.alpha_computing > input.alpha_interval {
            diagnostics.push(Diagnostic::DeadlineMiss {
                task: alpha.name().to_string(),
                at: state.t_alpha + input.alpha_interval,
                pending: input.alpha_computing - input.alpha_interval,
            });
        }

        pieces = pieces.union(&segment_waveform(&state, &input));
        let (mode, second_offset, second_computing) = if state.z < input.alpha_interval {
            let beta_start = state.z.max(input.alpha_computing);
            let allocation = (input.alpha_interval - beta_start).max(Tick::ZERO);
            (
                SegmentMode::BetaRequested,
                beta_start,
                input.beta_computing.min(allocation),
            )
        } else {
            (SegmentMode::BetaAbsent, Tick::ZERO, Tick::ZERO)
        };
        segments.push(SegmentRecord {
            index: state.n,
            start: state.t_alpha,
            interval: input.alpha_interval,
            mode,
            first_computing: input.alpha_computing + state.allocatable_residue(&input),
            second_offset,
            second_computing,
        });

        state = step(&state, &input);
        if state.z.is_negative() {
            return Err(Error::AssumptionViolation {
                level: 0,
                higher: alpha.name().to_string(),
                lower: beta.name().to_string(),
                detail: format!(
                    "two requests of {} fall within one request interval of {} ending at {}",
                    beta.name(),
                    alpha.name(),
                    state.t_alpha
                ),
            });
        }
        debug_assert!(!state.residue.is_negative());
        states.push(state);
    }

    let alpha_end_residue = match alpha.instances().last() {
        Some(last) => {
            let trailing = end - last.request;
            (last.computing - trailing).max(Tick::ZERO)
        }
        None => Tick::ZERO,
    };

    Ok(PairRun {
        waveform: pieces.intersect(Interval::new(window.t0, end).expect("valid window")),
        segments,
        beta_end_residue: state.residue,
        alpha_end_residue,
        states,
        diagnostics,
    })
}
