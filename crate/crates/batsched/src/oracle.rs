//! Event-driven preemptive fixed-priority simulator.
//!
//! This is the ground truth the analytic waveform is checked against. It
//! makes no scheduling assumptions beyond the policy itself: at every
//! instant the highest-priority task with remaining work runs, preemption is
//! immediate, and ties at the same tick are resolved by processing arrivals
//! before continuing execution, so a newly arrived higher-priority task
//! preempts exactly at its arrival tick.

use std::collections::VecDeque;

use crate::taskmodel::{ResidueRecord, TaskTrace, WindowSpec};
use crate::timebase::{Interval, IntervalSet, Tick};

/// A task request observed while its own earlier work was still unfinished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadlineMiss {
    pub task: String,
    pub at: Tick,
    pub pending: Tick,
}

/// Outcome of one simulation run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    /// Union of all execution time.
    pub busy: IntervalSet,
    /// Execution time per task, in priority order.
    pub per_task: Vec<(String, IntervalSet)>,
    /// Unfinished work per task at the window end.
    pub end_residues: ResidueRecord,
    /// Requests that arrived while earlier work of the same task was pending.
    pub deadline_misses: Vec<DeadlineMiss>,
}

/// Simulate the window exactly. `traces` are in priority order (highest
/// first); `residues` inject leftover work at the window start as if a
/// virtual earlier instance of the task were still pending.
pub fn simulate(traces: &[TaskTrace], window: &WindowSpec, residues: &ResidueRecord) -> SimResult {
    let n = traces.len();
    // FIFO work chunks per task; head residues are virtual earlier instances
    let mut queues: Vec<VecDeque<Tick>> = traces
        .iter()
        .map(|trace| {
            let mut q = VecDeque::new();
            if let Some(&residue) = residues.get(trace.name()) {
                if residue > Tick::ZERO {
                    q.push_back(residue);
                }
            }
            q
        })
        .collect();

    // request events inside the window, in (time, priority) order
    let mut events: Vec<(Tick, usize, Tick)> = traces
        .iter()
        .enumerate()
        .flat_map(|(rank, trace)| {
            trace
                .instances()
                .iter()
                .filter(|inst| window.contains(inst.request))
                .map(move |inst| (inst.request, rank, inst.computing))
        })
        .collect();
    events.sort_by_key(|&(t, rank, _)| (t, rank));

    let mut pieces: Vec<Vec<Interval>> = vec![Vec::new(); n];
    let mut misses = Vec::new();
    let mut now = window.t0;
    let mut next_event = 0usize;

    loop {
        // arrivals first: requests at `now` join their queues before any
        // execution decision at this tick
        while next_event < events.len() && events[next_event].0 == now {
            let (at, rank, computing) = events[next_event];
            next_event += 1;
            let pending: Tick = queues[rank].iter().copied().sum();
            if pending > Tick::ZERO {
                misses.push(DeadlineMiss {
                    task: traces[rank].name().to_string(),
                    at,
                    pending,
                });
            }
            if computing > Tick::ZERO {
                queues[rank].push_back(computing);
            }
        }
        if now >= window.end() {
            break;
        }
        let horizon = if next_event < events.len() {
            events[next_event].0.min(window.end())
        } else {
            window.end()
        };
        match queues.iter().position(|q| !q.is_empty()) {
            Some(rank) => {
                let chunk = queues[rank].front_mut().unwrap();
                let slice = (*chunk).min(horizon - now);
                let done = Interval::new(now, now + slice).unwrap();
                match pieces[rank].last_mut() {
                    // contiguous execution of the same task extends one piece
                    Some(last) if last.end() == done.start() => {
                        *pieces[rank].last_mut().unwrap() =
                            Interval::new(last.start(), done.end()).unwrap();
                    }
                    _ => pieces[rank].push(done),
                }
                *chunk -= slice;
                if chunk.is_zero() {
                    queues[rank].pop_front();
                }
                now += slice;
            }
            None => {
                now = horizon;
            }
        }
    }

    let per_task: Vec<(String, IntervalSet)> = traces
        .iter()
        .zip(pieces)
        .map(|(trace, list)| (trace.name().to_string(), IntervalSet::from_unnormalized(list)))
        .collect();
    let busy = per_task
        .iter()
        .fold(IntervalSet::new(), |acc, (_, set)| acc.union(set));
    let end_residues: ResidueRecord = traces
        .iter()
        .zip(&queues)
        .map(|(trace, q)| (trace.name().to_string(), q.iter().copied().sum()))
        .collect();

    SimResult {
        busy,
        per_task,
        end_residues,
        deadline_misses: misses,
    }
}

/// Symmetric difference of two interval sets: the times where exactly one of
/// them is busy. Empty iff the sets are equal.
pub fn diff(a: &IntervalSet, b: &IntervalSet) -> IntervalSet {
    // boundary sweep over the indicator functions
    let mut bounds: Vec<Tick> = a
        .iter()
        .chain(b.iter())
        .flat_map(|iv| [iv.start(), iv.end()])
        .collect();
    bounds.sort_unstable();
    bounds.dedup();
    let mut out = Vec::new();
    for pair in bounds.windows(2) {
        let probe = pair[0];
        if a.contains(probe) != b.contains(probe) {
            out.push(Interval::new(pair[0], pair[1]).unwrap());
        }
    }
    IntervalSet::from_unnormalized(out)
}
