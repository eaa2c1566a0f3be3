//! Scenario and battery file formats plus the CSV/JSON exports.
//!
//! Time values in task-set files are decimal minutes. They are converted to
//! ticks exactly: a literal that is not a multiple of the tick (for example
//! a seventh decimal at the default 1e-6 resolution) is rejected with an
//! error instead of being rounded. Serialization goes back through the same
//! exact decimal rendering, so a load/save round trip preserves every value
//! tick for tick.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Number;

use crate::battery::{BatteryParams, TrajectoryPoint, DEFAULT_TRUNCATION};
use crate::error::{Error, Result};
use crate::multisched::UtilizationWaveform;
use crate::pairsched::Diagnostic;
use crate::taskmodel::{
    expand_periodic, PeriodicSpec, ResidueRecord, TaskInstance, TaskTrace, WindowSpec,
};
use crate::timebase::{IntervalSet, Tick, TickScale};

/// Where a task's requests come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskSource {
    Periodic(PeriodicSpec),
    /// Explicit instances at absolute times, for aperiodic tasks.
    Instances(Vec<TaskInstance>),
}

/// One task of a scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDef {
    pub name: String,
    /// Smaller rank = higher priority.
    pub rank: i64,
    pub source: TaskSource,
}

/// A parsed scenario: tasks in priority order, the windows to analyze, and
/// leftover work carried into the first window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskSet {
    pub tasks: Vec<TaskDef>,
    pub windows: Vec<WindowSpec>,
    pub residues: ResidueRecord,
}

impl TaskSet {
    /// Task traces restricted to a window, in priority order. Periodic tasks
    /// expand; explicit instances are filtered to the window.
    pub fn traces_for_window(&self, window: &WindowSpec) -> Vec<TaskTrace> {
        self.tasks
            .iter()
            .map(|task| match &task.source {
                TaskSource::Periodic(spec) => expand_periodic(spec, &task.name, window),
                TaskSource::Instances(instances) => TaskTrace::new(
                    task.name.clone(),
                    instances
                        .iter()
                        .filter(|inst| window.contains(inst.request))
                        .copied()
                        .collect(),
                )
                .expect("instance list validated at load"),
            })
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct TaskSetDoc {
    tasks: Vec<TaskDoc>,
    #[serde(default)]
    windows: Vec<WindowDoc>,
    #[serde(default)]
    residues: BTreeMap<String, Number>,
}

#[derive(Serialize, Deserialize)]
struct TaskDoc {
    name: String,
    priority_rank: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periodic: Option<PeriodicDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instances: Option<Vec<InstanceDoc>>,
}

#[derive(Serialize, Deserialize)]
struct PeriodicDoc {
    period: Number,
    computing: Number,
    start: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stop: Option<Number>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    t: Number,
    c: Number,
}

#[derive(Serialize, Deserialize)]
struct WindowDoc {
    t0: Number,
    #[serde(rename = "L")]
    length: Number,
}

fn file_error(path: &Path, reason: impl std::fmt::Display) -> Error {
    Error::FileFormat {
        path: path.display().to_string(),
        reason: reason.to_string(),
    }
}

fn tick_of(number: &Number, scale: &TickScale) -> Result<Tick> {
    scale.parse_minutes(&number.to_string())
}

fn number_of(tick: Tick, scale: &TickScale) -> Number {
    Number::from_str(&scale.format_minutes(tick)).expect("formatted ticks are valid numbers")
}

/// Parse a task-set document against a tick scale.
pub fn parse_task_set(text: &str, scale: &TickScale, origin: &Path) -> Result<TaskSet> {
    let doc: TaskSetDoc =
        serde_json::from_str(text).map_err(|e| file_error(origin, e))?;
    let mut tasks = Vec::with_capacity(doc.tasks.len());
    for task in &doc.tasks {
        let source = match (&task.periodic, &task.instances) {
            (Some(p), None) => TaskSource::Periodic(
                PeriodicSpec::new(
                    tick_of(&p.period, scale)?,
                    tick_of(&p.computing, scale)?,
                    tick_of(&p.start, scale)?,
                    p.stop.as_ref().map(|s| tick_of(s, scale)).transpose()?,
                )
                .map_err(|e| file_error(origin, format!("task {}: {e}", task.name)))?,
            ),
            (None, Some(list)) => {
                let instances: Vec<TaskInstance> = list
                    .iter()
                    .map(|inst| {
                        Ok(TaskInstance {
                            request: tick_of(&inst.t, scale)?,
                            computing: tick_of(&inst.c, scale)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                // validate ordering and nonnegative computing up front
                TaskTrace::new(task.name.clone(), instances.clone())
                    .map_err(|e| file_error(origin, format!("task {}: {e}", task.name)))?;
                TaskSource::Instances(instances)
            }
            _ => {
                return Err(file_error(
                    origin,
                    format!(
                        "task {} must have exactly one of `periodic` or `instances`",
                        task.name
                    ),
                ))
            }
        };
        tasks.push(TaskDef {
            name: task.name.clone(),
            rank: task.priority_rank,
            source,
        });
    }
    tasks.sort_by_key(|t| t.rank);
    for pair in tasks.windows(2) {
        if pair[0].name == pair[1].name {
            return Err(file_error(
                origin,
                format!("duplicate task name {}", pair[0].name),
            ));
        }
    }

    let windows = doc
        .windows
        .iter()
        .map(|w| {
            WindowSpec::new(tick_of(&w.t0, scale)?, tick_of(&w.length, scale)?)
                .map_err(|e| file_error(origin, e))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut residues = ResidueRecord::new();
    for (name, value) in &doc.residues {
        if !tasks.iter().any(|t| &t.name == name) {
            return Err(file_error(origin, format!("residue for unknown task {name}")));
        }
        let tick = tick_of(value, scale)?;
        if tick.is_negative() {
            return Err(file_error(origin, format!("residue for {name} is negative")));
        }
        residues.insert(name.clone(), tick);
    }

    Ok(TaskSet {
        tasks,
        windows,
        residues,
    })
}

/// Load a task-set file.
pub fn load_task_set(path: &Path, scale: &TickScale) -> Result<TaskSet> {
    let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    parse_task_set(&text, scale, path)
}

/// Serialize a task set back to its document form with exact decimals.
pub fn save_task_set(set: &TaskSet, scale: &TickScale) -> String {
    let doc = TaskSetDoc {
        tasks: set
            .tasks
            .iter()
            .map(|task| {
                let (periodic, instances) = match &task.source {
                    TaskSource::Periodic(p) => (
                        Some(PeriodicDoc {
                            period: number_of(p.period, scale),
                            computing: number_of(p.computing, scale),
                            start: number_of(p.start, scale),
                            stop: p.stop.map(|s| number_of(s, scale)),
                        }),
                        None,
                    ),
                    TaskSource::Instances(list) => (
                        None,
                        Some(
                            list.iter()
                                .map(|inst| InstanceDoc {
                                    t: number_of(inst.request, scale),
                                    c: number_of(inst.computing, scale),
                                })
                                .collect(),
                        ),
                    ),
                };
                TaskDoc {
                    name: task.name.clone(),
                    priority_rank: task.rank,
                    periodic,
                    instances,
                }
            })
            .collect(),
        windows: set
            .windows
            .iter()
            .map(|w| WindowDoc {
                t0: number_of(w.t0, scale),
                length: number_of(w.length, scale),
            })
            .collect(),
        residues: set
            .residues
            .iter()
            .map(|(name, &tick)| (name.clone(), number_of(tick, scale)))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}

/// Battery parameters plus the busy-state discharge current.
#[derive(Clone, Copy, Debug)]
pub struct BatteryConfig {
    pub params: BatteryParams,
    pub busy_current_ma: f64,
}

#[derive(Deserialize)]
struct BatteryDoc {
    alpha: f64,
    beta: f64,
    #[serde(default = "default_truncation")]
    m: usize,
    #[serde(rename = "busy_current_mA")]
    busy_current_ma: f64,
}

fn default_truncation() -> usize {
    DEFAULT_TRUNCATION
}

/// Load a battery config file.
pub fn load_battery(path: &Path) -> Result<BatteryConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
    let doc: BatteryDoc = serde_json::from_str(&text).map_err(|e| file_error(path, e))?;
    let params = BatteryParams::with_truncation(doc.alpha, doc.beta, doc.m)
        .map_err(|e| file_error(path, e))?;
    if doc.busy_current_ma <= 0.0 || !doc.busy_current_ma.is_finite() {
        return Err(file_error(
            path,
            format!("busy_current_mA must be positive, got {}", doc.busy_current_ma),
        ));
    }
    Ok(BatteryConfig {
        params,
        busy_current_ma: doc.busy_current_ma,
    })
}

/// CSV of busy intervals: `start_min,end_min` rows.
pub fn waveform_csv(busy: &IntervalSet, scale: &TickScale) -> String {
    let mut out = String::from("start_min,end_min\n");
    for piece in busy.iter() {
        let _ = writeln!(
            out,
            "{},{}",
            scale.format_minutes(piece.start()),
            scale.format_minutes(piece.end())
        );
    }
    out
}

/// CSV of the sampled busy indicator: `t_min,phi` rows every `step` ticks.
pub fn phi_csv(waveform: &UtilizationWaveform, step: Tick, scale: &TickScale) -> String {
    assert!(step > Tick::ZERO, "sampling step must be positive");
    let mut out = String::from("t_min,phi\n");
    let mut t = waveform.window.t0;
    while t < waveform.window.end() {
        let _ = writeln!(
            out,
            "{},{}",
            scale.format_minutes(t),
            u8::from(waveform.busy.contains(t))
        );
        t += step;
    }
    out
}

/// CSV of a capacity trajectory: `t_min,y,x0,temporary` rows.
pub fn trajectory_csv(trajectory: &[TrajectoryPoint]) -> String {
    let mut out = String::from("t_min,y,x0,temporary\n");
    for (t, report) in trajectory {
        let _ = writeln!(out, "{},{},{},{}", t, report.total, report.permanent, report.temporary);
    }
    out
}

/// JSON report for one hybrid window.
pub fn report_json(
    busy_time_min: f64,
    end_of_life_min: Option<f64>,
    diagnostics: &[Diagnostic],
) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("busy_time_min".into(), busy_time_min.into());
    match end_of_life_min {
        Some(t) => doc.insert("end_of_life_min".into(), t.into()),
        None => doc.insert("survives".into(), true.into()),
    };
    doc.insert(
        "diagnostics".into(),
        diagnostics
            .iter()
            .map(|d| serde_json::Value::from(d.to_string()))
            .collect::<Vec<_>>()
            .into(),
    );
    serde_json::to_string_pretty(&serde_json::Value::Object(doc)).expect("report serializes")
}
