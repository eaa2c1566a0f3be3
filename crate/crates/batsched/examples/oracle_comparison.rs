//! Pit the analytic waveform against the event-driven preemptive simulator
//! on a batch of generated schedulable scenarios. The symmetric difference
//! must be empty every time.
//!
//! ```bash
//! cargo run --example oracle_comparison [n_scenarios]
//! ```

use batsched::generator::random_schedulable;
use batsched::multisched::schedule;
use batsched::oracle;
use batsched::timebase::TickScale;

fn main() {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|arg| arg.parse().ok())
        .unwrap_or(50);
    let scale = TickScale::default();

    let mut worst_tasks = 0;
    let mut total_pieces = 0usize;
    for seed in 0..n {
        let scenario = random_schedulable(seed);
        let window = scenario.windows[0];
        let traces = scenario.traces_for_window(&window);
        let analytic = schedule(&traces, &window, &scenario.residues).expect("schedulable");
        let simulated = oracle::simulate(&traces, &window, &scenario.residues);
        let delta = oracle::diff(&analytic.waveform.busy, &simulated.busy);
        assert!(
            delta.is_empty(),
            "seed {seed} disagreed over {} min",
            scale.format_minutes(delta.measure())
        );
        assert_eq!(analytic.export_residues(), &simulated.end_residues);
        worst_tasks = worst_tasks.max(traces.len());
        total_pieces += simulated.busy.len();
    }
    println!(
        "{n} scenarios (up to {worst_tasks} tasks, {total_pieces} busy intervals total): \
         analytic waveform == simulated waveform, residues included"
    );

    // show one comparison in full
    let scenario = random_schedulable(0);
    let window = scenario.windows[0];
    let traces = scenario.traces_for_window(&window);
    let analytic = schedule(&traces, &window, &scenario.residues).unwrap();
    let simulated = oracle::simulate(&traces, &window, &scenario.residues);
    println!(
        "\nseed 0 [{}, {}), {} tasks:",
        scale.format_minutes(window.t0),
        scale.format_minutes(window.end()),
        traces.len()
    );
    for ((_, task_set), trace) in simulated.per_task.iter().zip(&traces) {
        println!(
            "  {}: {} requests, {} min executed",
            trace.name(),
            trace.len(),
            scale.format_minutes(task_set.measure())
        );
    }
    println!(
        "  busy pieces: {} analytic, {} simulated, diff empty: {}",
        analytic.waveform.busy.len(),
        simulated.busy.len(),
        oracle::diff(&analytic.waveform.busy, &simulated.busy).is_empty()
    );
}
