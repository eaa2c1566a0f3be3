//! Command-line front end.
//!
//! Four subcommands over task-set and battery files:
//!
//! * `waveform` - analytic busy waveform per window, as CSV
//! * `oracle-diff` - analytic vs event-simulator comparison (files or
//!   randomized seed batches); exit 1 on any mismatch
//! * `hybrid` - scheduler + battery co-simulation with trajectory CSV and a
//!   JSON report per window
//! * `validate` - priority-ordering checks only
//!
//! Windows are processed in listing order. The file's `residues` seed the
//! first window; a window starting exactly where the previous one ended
//! inherits the exported residues (and, for `hybrid`, the battery state),
//! otherwise it starts fresh.
//!
//! Exit codes: 0 success, 1 comparison/validation failure, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::battery::BatteryState;
use crate::error::{Error, Result};
use crate::files::{
    self, load_battery, load_task_set, phi_csv, report_json, trajectory_csv, waveform_csv,
    BatteryConfig, TaskSet,
};
use crate::generator::random_schedulable;
use crate::hybrid::{busy_time_min, run_hybrid};
use crate::multisched::schedule;
use crate::oracle;
use crate::taskmodel::{check_assumption1, ResidueRecord, WindowSpec};
use crate::timebase::{Interval, IntervalSet, Tick, TickScale};

/// Test hook: when this environment variable is set, the analytic waveform
/// handed to `oracle-diff` is perturbed by one tick so the comparison must
/// fail. Used to prove the diff path actually detects mismatches.
pub const CORRUPT_ANALYTIC_ENV: &str = "BATSCHED_CORRUPT_ANALYTIC";

const EXIT_OK: i32 = 0;
const EXIT_MISMATCH: i32 = 1;
const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "batsched",
    about = "Analytic busy-waveform prediction and battery life for prioritized task sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute analytic busy waveforms and write them as CSV
    Waveform(ScenarioArgs),
    /// Compare analytic waveforms against the event-driven simulator
    OracleDiff(OracleDiffArgs),
    /// Run the coupled scheduler + battery simulation
    Hybrid(HybridArgs),
    /// Check a task set against the priority-ordering rule
    Validate(ValidateArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Task-set JSON file
    #[arg(long)]
    tasks: PathBuf,
    /// Window as `t0:L` in minutes (repeatable; defaults to the file's windows)
    #[arg(long = "window", value_name = "T0:L")]
    windows: Vec<String>,
    /// Output directory for the CSV artifacts
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Sampling step in minutes for the indicator export
    #[arg(long = "sample-step", default_value = "0.1")]
    sample_step: String,
    /// Tick resolution in minutes (a power of ten)
    #[arg(long, default_value = "1e-6")]
    tick: String,
}

#[derive(Args)]
struct OracleDiffArgs {
    /// Task-set JSON file to compare window by window
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// Also check N generated schedulable scenarios (seeds 0..N)
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long = "window", value_name = "T0:L")]
    windows: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value = "1e-6")]
    tick: String,
}

#[derive(Args)]
struct HybridArgs {
    /// Task-set JSON file
    #[arg(long)]
    tasks: PathBuf,
    /// Battery config JSON file
    #[arg(long)]
    battery: PathBuf,
    /// Override the busy-state discharge current in mA
    #[arg(long = "current-ma")]
    current_ma: Option<f64>,
    #[arg(long = "window", value_name = "T0:L")]
    windows: Vec<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long = "sample-step", default_value = "0.1")]
    sample_step: String,
    #[arg(long, default_value = "1e-6")]
    tick: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Task-set JSON file
    #[arg(long)]
    tasks: PathBuf,
    #[arg(long = "window", value_name = "T0:L")]
    windows: Vec<String>,
    #[arg(long, default_value = "1e-6")]
    tick: String,
}

/// Resolved inputs shared by the scenario-driven subcommands.
pub struct ScenarioConfig {
    pub scale: TickScale,
    pub task_set: TaskSet,
    pub windows: Vec<WindowSpec>,
    pub sample_step: Tick,
    pub out_dir: PathBuf,
}

fn parse_window(text: &str, scale: &TickScale) -> Result<WindowSpec> {
    let (t0, length) = text.split_once(':').ok_or_else(|| {
        Error::InvalidInput(format!("window `{text}` must have the form t0:L"))
    })?;
    WindowSpec::new(scale.parse_minutes(t0)?, scale.parse_minutes(length)?)
}

fn resolve_scenario(
    tasks: &Path,
    windows: &[String],
    tick: &str,
    sample_step: &str,
    out: &Path,
) -> Result<ScenarioConfig> {
    let scale = TickScale::from_resolution_str(tick)?;
    let task_set = load_task_set(tasks, &scale)?;
    let windows = if windows.is_empty() {
        task_set.windows.clone()
    } else {
        windows
            .iter()
            .map(|w| parse_window(w, &scale))
            .collect::<Result<Vec<_>>>()?
    };
    if windows.is_empty() {
        return Err(Error::InvalidInput(
            "no windows given on the command line or in the task file".to_string(),
        ));
    }
    let sample_step = scale.parse_minutes(sample_step)?;
    if sample_step <= Tick::ZERO {
        return Err(Error::InvalidInput(format!(
            "sample step must be positive, got {sample_step}"
        )));
    }
    Ok(ScenarioConfig {
        scale,
        task_set,
        windows,
        sample_step,
        out_dir: out.to_path_buf(),
    })
}

/// Residues feeding each window: the file's record for the first, exported
/// leftovers for a window contiguous with its predecessor, empty otherwise.
fn window_residues(
    index: usize,
    window: &WindowSpec,
    prev_end: Option<Tick>,
    file_residues: &ResidueRecord,
    carried: &ResidueRecord,
) -> ResidueRecord {
    if index == 0 {
        file_residues.clone()
    } else if prev_end == Some(window.t0) {
        carried.clone()
    } else {
        ResidueRecord::new()
    }
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn report_diagnostics(diagnostics: &[crate::pairsched::Diagnostic]) {
    for diag in diagnostics {
        eprintln!("warning: {diag}");
    }
}

fn cmd_waveform(config: &ScenarioConfig) -> Result<i32> {
    let mut carried = ResidueRecord::new();
    let mut prev_end = None;
    for (i, window) in config.windows.iter().enumerate() {
        let residues = window_residues(i, window, prev_end, &config.task_set.residues, &carried);
        let traces = config.task_set.traces_for_window(window);
        let result = schedule(&traces, window, &residues)?;
        report_diagnostics(&result.waveform.diagnostics);

        let tag = format!("w{}", i + 1);
        let wf_path = write_artifact(
            &config.out_dir,
            &format!("waveform_{tag}.csv"),
            &waveform_csv(&result.waveform.busy, &config.scale),
        )?;
        let phi_path = write_artifact(
            &config.out_dir,
            &format!("phi_{tag}.csv"),
            &phi_csv(&result.waveform, config.sample_step, &config.scale),
        )?;
        println!(
            "window {} [{}, {}): busy {} min over {} intervals -> {}, {}",
            i + 1,
            config.scale.format_minutes(window.t0),
            config.scale.format_minutes(window.end()),
            config.scale.format_minutes(result.waveform.busy.measure()),
            result.waveform.busy.len(),
            wf_path.display(),
            phi_path.display()
        );
        carried = result.export_residues().clone();
        prev_end = Some(window.end());
    }
    Ok(EXIT_OK)
}

fn corrupt_hook(busy: &IntervalSet, window: &WindowSpec) -> IntervalSet {
    if std::env::var_os(CORRUPT_ANALYTIC_ENV).is_none() {
        return busy.clone();
    }
    // toggle the first tick of the window so the comparison must fail
    let first_tick = IntervalSet::singleton(
        Interval::new(window.t0, window.t0 + Tick(1)).expect("one tick"),
    );
    oracle::diff(busy, &first_tick)
}

fn cmd_oracle_diff(args: &OracleDiffArgs) -> Result<i32> {
    let mut mismatches = 0usize;

    if let Some(tasks) = &args.tasks {
        let config = resolve_scenario(tasks, &args.windows, &args.tick, "0.1", &args.out)?;
        let mut carried = ResidueRecord::new();
        let mut prev_end = None;
        for (i, window) in config.windows.iter().enumerate() {
            let residues =
                window_residues(i, window, prev_end, &config.task_set.residues, &carried);
            let traces = config.task_set.traces_for_window(window);
            let result = schedule(&traces, window, &residues)?;
            let analytic = corrupt_hook(&result.waveform.busy, window);
            let simulated = oracle::simulate(&traces, window, &residues);
            let delta = oracle::diff(&analytic, &simulated.busy);
            let path = write_artifact(
                &config.out_dir,
                &format!("diff_w{}.csv", i + 1),
                &waveform_csv(&delta, &config.scale),
            )?;
            if delta.is_empty() {
                println!("window {}: analytic == simulated ({})", i + 1, path.display());
            } else {
                mismatches += 1;
                println!(
                    "window {}: MISMATCH over {} min ({})",
                    i + 1,
                    config.scale.format_minutes(delta.measure()),
                    path.display()
                );
            }
            carried = result.export_residues().clone();
            prev_end = Some(window.end());
        }
    }

    if let Some(n) = args.seeds {
        let mut failed_seeds = Vec::new();
        for seed in 0..n {
            let scenario = random_schedulable(seed);
            let window = scenario.windows[0];
            let traces = scenario.traces_for_window(&window);
            let result = schedule(&traces, &window, &scenario.residues)?;
            let analytic = corrupt_hook(&result.waveform.busy, &window);
            let simulated = oracle::simulate(&traces, &window, &scenario.residues);
            if !oracle::diff(&analytic, &simulated.busy).is_empty() {
                failed_seeds.push(seed);
            }
        }
        mismatches += failed_seeds.len();
        println!(
            "seed batch: {} scenarios, {} mismatches{}",
            n,
            failed_seeds.len(),
            if failed_seeds.is_empty() {
                String::new()
            } else {
                format!(" (seeds {failed_seeds:?})")
            }
        );
    }

    if args.tasks.is_none() && args.seeds.is_none() {
        return Err(Error::InvalidInput(
            "oracle-diff needs --tasks and/or --seeds".to_string(),
        ));
    }
    Ok(if mismatches == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

fn cmd_hybrid(args: &HybridArgs, config: &ScenarioConfig, battery: &BatteryConfig) -> Result<i32> {
    let busy_current = args.current_ma.unwrap_or(battery.busy_current_ma);
    let sample_step_min = config.scale.minutes_f64(config.sample_step);
    let mut carried = ResidueRecord::new();
    let mut prev_end = None;
    let fresh = BatteryState::fresh(&battery.params);
    let mut state = fresh.clone();
    for (i, window) in config.windows.iter().enumerate() {
        let residues = window_residues(i, window, prev_end, &config.task_set.residues, &carried);
        if i > 0 && prev_end != Some(window.t0) {
            state = fresh.clone();
        }
        let traces = config.task_set.traces_for_window(window);
        let result = run_hybrid(
            &traces,
            window,
            &residues,
            &battery.params,
            &state,
            busy_current,
            sample_step_min,
            &config.scale,
        )?;
        report_diagnostics(&result.waveform.diagnostics);

        let tag = format!("w{}", i + 1);
        let traj_path = write_artifact(
            &config.out_dir,
            &format!("trajectory_{tag}.csv"),
            &trajectory_csv(&result.trajectory),
        )?;
        let end_report = result.trajectory.last().expect("trajectory never empty").1;
        let report_path = write_artifact(
            &config.out_dir,
            &format!("report_{tag}.json"),
            &report_json(
                busy_time_min(&result.waveform, &config.scale),
                result.end_of_life,
                &result.waveform.diagnostics,
            ),
        )?;
        match result.end_of_life {
            Some(t) => println!(
                "window {}: end of life at {t} min -> {}, {}",
                i + 1,
                traj_path.display(),
                report_path.display()
            ),
            None => println!(
                "window {}: survives with total loss {:.6} -> {}, {}",
                i + 1,
                end_report.total,
                traj_path.display(),
                report_path.display()
            ),
        }
        carried = result.end_residues.clone();
        state = result.end_state.clone();
        prev_end = Some(window.end());
    }
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let scale = TickScale::from_resolution_str(&args.tick)?;
    let task_set = load_task_set(&args.tasks, &scale)?;
    let windows = if args.windows.is_empty() {
        task_set.windows.clone()
    } else {
        args.windows
            .iter()
            .map(|w| parse_window(w, &scale))
            .collect::<Result<Vec<_>>>()?
    };
    if windows.is_empty() {
        return Err(Error::InvalidInput(
            "no windows given on the command line or in the task file".to_string(),
        ));
    }
    let mut violations = 0usize;
    for (i, window) in windows.iter().enumerate() {
        let traces: Vec<_> = task_set
            .traces_for_window(window)
            .into_iter()
            .filter(|t| !t.is_empty())
            .collect();
        match check_assumption1(&traces, window) {
            Ok(()) => println!(
                "window {} [{}, {}): ordering ok ({} active tasks)",
                i + 1,
                scale.format_minutes(window.t0),
                scale.format_minutes(window.end()),
                traces.len()
            ),
            Err(violation) => {
                violations += 1;
                println!(
                    "window {} [{}, {}): VIOLATION between {} and {}: {}",
                    i + 1,
                    scale.format_minutes(window.t0),
                    scale.format_minutes(window.end()),
                    violation.higher,
                    violation.lower,
                    violation.detail()
                );
            }
        }
    }
    Ok(if violations == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

/// Entry point for the binary: parse arguments, dispatch, map errors to the
/// documented exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Waveform(args) => resolve_scenario(
            &args.tasks,
            &args.windows,
            &args.tick,
            &args.sample_step,
            &args.out,
        )
        .and_then(|config| cmd_waveform(&config)),
        Command::OracleDiff(args) => cmd_oracle_diff(args),
        Command::Hybrid(args) => resolve_scenario(
            &args.tasks,
            &args.windows,
            &args.tick,
            &args.sample_step,
            &args.out,
        )
        .and_then(|config| {
            let battery = load_battery(&args.battery)?;
            cmd_hybrid(args, &config, &battery)
        }),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INPUT
        }
    }
}

// files::parse_task_set is exercised through the commands above; re-exported
// here so scripting against the library can reuse the exact same loading.
pub use files::parse_task_set;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_argument_parses_exactly() {
        let scale = TickScale::default();
        let w = parse_window("50:7.1", &scale).unwrap();
        assert_eq!(w.t0, scale.parse_minutes("50").unwrap());
        assert_eq!(w.length, scale.parse_minutes("7.1").unwrap());
        assert!(parse_window("50", &scale).is_err());
        assert!(parse_window("50:0", &scale).is_err());
    }

    #[test]
    fn chaining_policy_uses_file_then_exports() {
        let scale = TickScale::default();
        let w1 = WindowSpec::new(scale.parse_minutes("0").unwrap(), scale.parse_minutes("3").unwrap()).unwrap();
        let w2 = WindowSpec::new(scale.parse_minutes("3").unwrap(), scale.parse_minutes("3").unwrap()).unwrap();
        let w3 = WindowSpec::new(scale.parse_minutes("10").unwrap(), scale.parse_minutes("3").unwrap()).unwrap();
        let mut file = ResidueRecord::new();
        file.insert("a".into(), Tick(5));
        let mut carried = ResidueRecord::new();
        carried.insert("a".into(), Tick(9));

        assert_eq!(window_residues(0, &w1, None, &file, &carried)["a"], Tick(5));
        assert_eq!(
            window_residues(1, &w2, Some(w1.end()), &file, &carried)["a"],
            Tick(9)
        );
        assert!(window_residues(2, &w3, Some(w2.end()), &file, &carried).is_empty());
    }
}
