//! Schedule the bundled six-task scenario analytically: four tasks compete
//! in the first window, three in the second, with leftover work carried
//! into the first window from the preceding history.
//!
//! ```bash
//! cargo run --example multi_task_schedule
//! ```

use std::path::Path;

use batsched::files::load_task_set;
use batsched::multisched::schedule;
use batsched::taskmodel::{ResidueRecord, WindowSpec};
use batsched::timebase::TickScale;

fn main() {
    let scale = TickScale::default();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/tasks_mixed.json");
    let set = load_task_set(&path, &scale).expect("fixture parses");

    // the first window's residues can be derived instead of configured:
    // schedule everything before it and export the leftovers
    let warmup = WindowSpec::new(
        scale.parse_minutes("0").unwrap(),
        scale.parse_minutes("50").unwrap(),
    )
    .unwrap();
    let warmup_run = schedule(
        &set.traces_for_window(&warmup),
        &warmup,
        &ResidueRecord::new(),
    )
    .unwrap();
    println!("residues exported at t=50:");
    for (name, residue) in warmup_run.export_residues() {
        println!("  {name}: {} min", scale.format_minutes(*residue));
    }

    for (i, window) in set.windows.iter().enumerate() {
        let residues = if i == 0 {
            warmup_run.export_residues().clone()
        } else {
            ResidueRecord::new()
        };
        let traces = set.traces_for_window(window);
        let active: Vec<&str> = traces
            .iter()
            .filter(|t| !t.is_empty())
            .map(|t| t.name())
            .collect();
        let result = schedule(&traces, window, &residues).expect("scenario is schedulable");

        println!(
            "\nwindow [{}, {}) with active tasks {:?}:",
            scale.format_minutes(window.t0),
            scale.format_minutes(window.end()),
            active
        );
        for piece in result.waveform.busy.iter() {
            println!(
                "  busy [{}, {})",
                scale.format_minutes(piece.start()),
                scale.format_minutes(piece.end())
            );
        }
        println!(
            "  busy {} of {} min",
            scale.format_minutes(result.waveform.busy.measure()),
            scale.format_minutes(window.length)
        );
        for (name, residue) in result.export_residues() {
            if !residue.is_zero() {
                println!("  leftover {name}: {} min", scale.format_minutes(*residue));
            }
        }
    }
}
