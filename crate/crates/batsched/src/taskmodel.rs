//! Task traces, window semantics, and the priority-ordering check.
//!
//! A task is observed through a window `[t0, t0+L)` as an ordered list of
//! request instances. The request interval of an instance is the gap to the
//! next request; for the last instance in the window it is the gap to the
//! window end, which is the value the transition equations need for the
//! final step. Work left over from before the window enters either as a
//! synthetic head instance (for the highest-priority task) or as the initial
//! residue of the pair model (for every lower-priority task).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::timebase::Tick;

/// One request of a task: when it arrives and how much computing it needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaskInstance {
    pub request: Tick,
    pub computing: Tick,
}

/// Ordered request/computing instances of one task within a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskTrace {
    name: String,
    instances: Vec<TaskInstance>,
}

impl TaskTrace {
    pub fn new(name: impl Into<String>, instances: Vec<TaskInstance>) -> Result<Self> {
        for pair in instances.windows(2) {
            if pair[1].request <= pair[0].request {
                return Err(Error::InvalidInput(format!(
                    "request times must be strictly increasing ({} then {})",
                    pair[0].request, pair[1].request
                )));
            }
        }
        if let Some(bad) = instances.iter().find(|i| i.computing.is_negative()) {
            return Err(Error::InvalidInput(format!(
                "computing time must be nonnegative, got {} at {}",
                bad.computing, bad.request
            )));
        }
        Ok(TaskTrace {
            name: name.into(),
            instances,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn instances(&self) -> &[TaskInstance] {
        &self.instances
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn first_request(&self) -> Option<Tick> {
        self.instances.first().map(|i| i.request)
    }

    /// Request interval of instance `idx` (0-based): gap to the next request,
    /// or to the window end for the last instance.
    pub fn request_interval(&self, idx: usize, window_end: Tick) -> Tick {
        match self.instances.get(idx + 1) {
            Some(next) => next.request - self.instances[idx].request,
            None => window_end - self.instances[idx].request,
        }
    }

    /// Intervals between consecutive real requests, excluding the trailing
    /// gap to the window end.
    pub fn internal_intervals(&self) -> impl Iterator<Item = Tick> + '_ {
        self.instances
            .windows(2)
            .map(|pair| pair[1].request - pair[0].request)
    }

    pub fn min_internal_interval(&self) -> Option<Tick> {
        self.internal_intervals().min()
    }

    pub fn max_internal_interval(&self) -> Option<Tick> {
        self.internal_intervals().max()
    }

    /// Largest request interval the scheduling recursion will actually see:
    /// the gap from the window start to the first request, all internal
    /// gaps, and the trailing gap to the window end.
    pub fn max_interval_as_run(&self, window: &WindowSpec) -> Option<Tick> {
        let first = self.first_request()?;
        let head = first - window.t0;
        let trailing = window.end() - self.instances.last().unwrap().request;
        Some(
            self.internal_intervals()
                .chain([head, trailing])
                .max()
                .unwrap(),
        )
    }

    /// Total computing demand of the trace.
    pub fn total_computing(&self) -> Tick {
        self.instances.iter().map(|i| i.computing).sum()
    }
}

/// Periodic request pattern used to expand fixture tasks into traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodicSpec {
    pub period: Tick,
    pub computing: Tick,
    pub start: Tick,
    pub stop: Option<Tick>,
}

impl PeriodicSpec {
    pub fn new(period: Tick, computing: Tick, start: Tick, stop: Option<Tick>) -> Result<Self> {
        if period <= Tick::ZERO {
            return Err(Error::InvalidInput(format!(
                "period must be positive, got {period}"
            )));
        }
        if computing <= Tick::ZERO || computing > period {
            return Err(Error::InvalidInput(format!(
                "computing time must satisfy 0 < C <= period, got C={computing}, T={period}"
            )));
        }
        Ok(PeriodicSpec {
            period,
            computing,
            start,
            stop,
        })
    }
}

/// Observation window `[t0, t0 + length)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WindowSpec {
    pub t0: Tick,
    pub length: Tick,
}

impl WindowSpec {
    pub fn new(t0: Tick, length: Tick) -> Result<Self> {
        if length <= Tick::ZERO {
            return Err(Error::InvalidInput(format!(
                "window length must be positive, got {length}"
            )));
        }
        Ok(WindowSpec { t0, length })
    }

    pub fn end(&self) -> Tick {
        self.t0 + self.length
    }

    pub fn contains(&self, t: Tick) -> bool {
        self.t0 <= t && t < self.end()
    }
}

/// Per-task leftover work carried across a window boundary.
pub type ResidueRecord = BTreeMap<String, Tick>;

/// Requests of a periodic task that fall inside the window, truncated at the
/// optional stop time.
pub fn expand_periodic(spec: &PeriodicSpec, name: &str, window: &WindowSpec) -> TaskTrace {
    let cutoff = match spec.stop {
        Some(stop) => window.end().min(stop),
        None => window.end(),
    };
    let mut instances = Vec::new();
    let first_k = if spec.start >= window.t0 {
        0
    } else {
        // smallest k with start + k*period >= t0
        let gap = (window.t0 - spec.start).0;
        (gap + spec.period.0 - 1) / spec.period.0
    };
    let mut k = first_k;
    loop {
        let request = Tick(spec.start.0 + k * spec.period.0);
        if request >= cutoff {
            break;
        }
        instances.push(TaskInstance {
            request,
            computing: spec.computing,
        });
        k += 1;
    }
    TaskTrace::new(name, instances).expect("periodic expansion is ordered by construction")
}

/// Report produced when the priority-ordering rule fails for a task pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingViolation {
    /// Index (0-based) of the higher-priority task of the offending pair.
    pub pair_index: usize,
    pub higher: String,
    pub lower: String,
    pub higher_max: Tick,
    pub lower_min: Tick,
}

impl OrderingViolation {
    pub fn detail(&self) -> String {
        format!(
            "max request interval of {} is {} but min request interval of {} is {}",
            self.higher, self.higher_max, self.lower, self.lower_min
        )
    }
}

/// Verify that along the priority order, each task's largest request
/// interval is strictly smaller than the next task's smallest.
///
/// Only gaps between real consecutive requests count; the synthetic gap from
/// the last request to the window end is a windowing artifact, not task
/// behavior, and would misreport tasks whose final instance sits close to
/// the cut. Tasks with fewer than two requests in the window impose no
/// constraint.
pub fn check_assumption1(
    traces: &[TaskTrace],
    _window: &WindowSpec,
) -> std::result::Result<(), OrderingViolation> {
    for (idx, pair) in traces.windows(2).enumerate() {
        let (higher, lower) = (&pair[0], &pair[1]);
        let (Some(h_max), Some(l_min)) = (higher.max_internal_interval(), lower.min_internal_interval())
        else {
            continue;
        };
        if h_max >= l_min {
            return Err(OrderingViolation {
                pair_index: idx,
                higher: higher.name().to_string(),
                lower: lower.name().to_string(),
                higher_max: h_max,
                lower_min: l_min,
            });
        }
    }
    Ok(())
}

/// Normalize a trace for use as the high-priority side of the pair model:
/// the first request must sit exactly at the window start.
///
/// If it does not, a synthetic instance is prepended at `t0` carrying the
/// residue as its computing time (possibly zero). If the first request is
/// already at `t0`, a nonzero residue is folded into that instance's
/// computing time: same-priority work is served in arrival order, so the
/// leftover executes contiguously ahead of the new request anyway.
pub fn init_window(trace: &TaskTrace, window: &WindowSpec, residue: Tick) -> TaskTrace {
    assert!(!residue.is_negative(), "residue must be nonnegative");
    let mut instances = trace.instances.clone();
    match instances.first().copied() {
        Some(first) if first.request == window.t0 => {
            if !residue.is_zero() {
                instances[0].computing += residue;
            }
        }
        _ => {
            instances.insert(
                0,
                TaskInstance {
                    request: window.t0,
                    computing: residue,
                },
            );
        }
    }
    TaskTrace::new(trace.name(), instances).expect("prepending at t0 keeps ordering")
}
