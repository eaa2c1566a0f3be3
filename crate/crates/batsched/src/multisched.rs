//! Recursive scheduling of N prioritized tasks.
//!
//! The two-task model generalizes by folding: the busy waveform of the two
//! highest-priority tasks is re-expressed as the request/computing instances
//! of a single combined task, which then plays the high-priority role
//! against the next task down the list. Each busy piece of an interval
//! becomes one combined instance, so the combined task's request intervals
//! never grow beyond those of its source, which is what keeps the
//! priority-ordering premise intact at every fold level.

use crate::error::{Error, Result};
use crate::pairsched::{run_pair, Diagnostic, PairRun, SegmentMode, SegmentRecord};
use crate::taskmodel::{
    check_assumption1, init_window, ResidueRecord, TaskInstance, TaskTrace, WindowSpec,
};
use crate::timebase::{IntervalSet, Tick};

/// Which busy piece of a source interval a combined instance came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PieceKind {
    /// Leading piece: the high-priority instance plus served residue.
    AlphaWithResidue,
    /// Second piece: the low-priority execution within the interval.
    BetaExecution,
}

/// A task trace synthesized from a pair run's busy pieces, with provenance
/// back to the segment each instance came from.
#[derive(Clone, Debug)]
pub struct CombinedTrace {
    trace: TaskTrace,
    provenance: Vec<(usize, PieceKind)>,
}

impl CombinedTrace {
    pub fn trace(&self) -> &TaskTrace {
        &self.trace
    }

    pub fn provenance(&self) -> &[(usize, PieceKind)] {
        &self.provenance
    }
}

/// Instances contributed by one interval record: the leading piece, and in
/// the both-requested mode the low-priority piece as well. Zero-computing
/// pieces are dropped.
pub fn combine_segment(seg: &SegmentRecord) -> Vec<(TaskInstance, PieceKind)> {
    let mut out = Vec::with_capacity(2);
    if seg.first_computing > Tick::ZERO {
        out.push((
            TaskInstance {
                request: seg.start,
                computing: seg.first_computing,
            },
            PieceKind::AlphaWithResidue,
        ));
    }
    if seg.mode == SegmentMode::BetaRequested && seg.second_computing > Tick::ZERO {
        out.push((
            TaskInstance {
                request: seg.start + seg.second_offset,
                computing: seg.second_computing,
            },
            PieceKind::BetaExecution,
        ));
    }
    out
}

/// Fold a pair run's bookkeeping into a single combined trace.
pub fn combine(run: &PairRun, name: &str) -> CombinedTrace {
    let mut instances: Vec<TaskInstance> = Vec::new();
    let mut provenance = Vec::new();
    for seg in &run.segments {
        for (inst, kind) in combine_segment(seg) {
            match instances.last_mut() {
                // coincident requests only arise on inputs already flagged as
                // unschedulable; same-task work is served in order either way
                Some(last) if last.request == inst.request => {
                    last.computing += inst.computing;
                }
                _ => {
                    instances.push(inst);
                    provenance.push((seg.index, kind));
                }
            }
        }
    }
    CombinedTrace {
        trace: TaskTrace::new(name, instances)
            .expect("combined pieces are ordered within and across segments"),
        provenance,
    }
}

/// Largest request interval of the combined trace must not exceed that of
/// the high-priority source it was folded from (both measured as the
/// recursion will run them: head gap and trailing gap included).
pub fn check_proposition1(cmb: &CombinedTrace, alpha: &TaskTrace, window: &WindowSpec) -> bool {
    match (
        cmb.trace.max_interval_as_run(window),
        alpha.max_interval_as_run(window),
    ) {
        (Some(c), Some(a)) => c <= a,
        (None, _) => true,
        (Some(_), None) => false,
    }
}

/// Processor busy/free indicator over a window.
#[derive(Clone, Debug)]
pub struct UtilizationWaveform {
    pub window: WindowSpec,
    pub busy: IntervalSet,
    pub diagnostics: Vec<Diagnostic>,
}

/// Waveform plus the per-task leftovers needed to chain the next window.
#[derive(Clone, Debug)]
pub struct ScheduleResult {
    pub waveform: UtilizationWaveform,
    end_residues: ResidueRecord,
}

impl ScheduleResult {
    /// Unfinished computing time of each task at the window end; feeding
    /// these into the next window's schedule reproduces the uncut run.
    pub fn export_residues(&self) -> &ResidueRecord {
        &self.end_residues
    }
}

/// Value of the busy indicator at `t`: `true` when busy. Queries outside
/// the window are rejected.
pub fn phi_at(waveform: &UtilizationWaveform, t: Tick) -> Result<bool> {
    if !waveform.window.contains(t) {
        return Err(Error::OutOfWindow {
            at: t.to_string(),
            start: waveform.window.t0.to_string(),
            end: waveform.window.end().to_string(),
        });
    }
    Ok(waveform.busy.contains(t))
}

/// Schedule `traces` (priority order, highest first) over the window.
///
/// Tasks with no requests in the window and no carried residue drop out.
/// The ordering rule is checked on the inputs and re-checked against each
/// fold's combined trace; a violation aborts with the offending level
/// (1-based pair position). Deadline misses and proposition violations are
/// reported as diagnostics while the waveform is still produced.
pub fn schedule(
    traces: &[TaskTrace],
    window: &WindowSpec,
    residues: &ResidueRecord,
) -> Result<ScheduleResult> {
    let residue_of = |trace: &TaskTrace| -> Tick {
        residues.get(trace.name()).copied().unwrap_or(Tick::ZERO)
    };
    let mut end_residues: ResidueRecord = traces
        .iter()
        .map(|t| (t.name().to_string(), Tick::ZERO))
        .collect();
    let active: Vec<&TaskTrace> = traces
        .iter()
        .filter(|t| !t.is_empty() || residue_of(t) > Tick::ZERO)
        .collect();

    if active.is_empty() {
        return Ok(ScheduleResult {
            waveform: UtilizationWaveform {
                window: *window,
                busy: IntervalSet::new(),
                diagnostics: Vec::new(),
            },
            end_residues,
        });
    }

    let ordered: Vec<TaskTrace> = active.iter().map(|t| (*t).clone()).collect();
    if let Err(violation) = check_assumption1(&ordered, window) {
        return Err(Error::AssumptionViolation {
            level: violation.pair_index + 1,
            higher: violation.higher.clone(),
            lower: violation.lower.clone(),
            detail: violation.detail(),
        });
    }

    let mut diagnostics = Vec::new();
    let top = active[0];
    let top_residue = residue_of(top);
    if top_residue > Tick::ZERO && top.first_request() == Some(window.t0) {
        // leftover work provably missed the request arriving with it
        diagnostics.push(Diagnostic::DeadlineMiss {
            task: top.name().to_string(),
            at: window.t0,
            pending: top_residue,
        });
    }
    let mut alpha = init_window(top, window, top_residue);
    let top_name = top.name().to_string();

    let run = if active.len() == 1 {
        let idle_beta = TaskTrace::new("-", Vec::new()).expect("empty trace is valid");
        run_pair(&alpha, &idle_beta, window, Tick::ZERO)?
    } else {
        let mut last_run: Option<PairRun> = None;
        for (fold, beta) in active[1..].iter().enumerate() {
            let level = fold + 1;
            let run = run_pair(&alpha, beta, window, residue_of(beta)).map_err(|e| match e {
                Error::AssumptionViolation {
                    higher,
                    lower,
                    detail,
                    ..
                } => Error::AssumptionViolation {
                    level,
                    higher,
                    lower,
                    detail,
                },
                other => other,
            })?;
            diagnostics.extend(run.diagnostics.iter().cloned());
            end_residues.insert(beta.name().to_string(), run.beta_end_residue);
            if fold == 0 {
                end_residues.insert(top_name.clone(), run.alpha_end_residue);
            }

            let is_last = fold + 2 == active.len();
            if !is_last {
                let combined = combine(&run, &format!("{}+{}", alpha.name(), beta.name()));
                if !check_proposition1(&combined, &alpha, window) {
                    diagnostics.push(Diagnostic::Proposition1Violation {
                        level,
                        combined_max: combined
                            .trace
                            .max_interval_as_run(window)
                            .unwrap_or(Tick::ZERO),
                        alpha_max: alpha.max_interval_as_run(window).unwrap_or(Tick::ZERO),
                    });
                }
                let next_beta = active[fold + 2];
                if let Err(violation) = check_assumption1(
                    &[combined.trace.clone(), next_beta.clone()],
                    window,
                ) {
                    return Err(Error::AssumptionViolation {
                        level: level + 1,
                        higher: violation.higher.clone(),
                        lower: violation.lower.clone(),
                        detail: violation.detail(),
                    });
                }
                alpha = init_window(&combined.trace, window, Tick::ZERO);
            }
            last_run = Some(run);
        }
        last_run.expect("at least one fold ran")
    };

    if active.len() == 1 {
        end_residues.insert(top_name, run.alpha_end_residue);
        diagnostics.extend(run.diagnostics.iter().cloned());
    }

    Ok(ScheduleResult {
        waveform: UtilizationWaveform {
            window: *window,
            busy: run.waveform,
            diagnostics,
        },
        end_residues,
    })
}
