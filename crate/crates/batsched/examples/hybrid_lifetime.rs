//! The full pipeline: schedule a window, convert its busy waveform into a
//! discharge profile, run the battery over it, and extrapolate how long the
//! battery survives if the load pattern keeps repeating.
//!
//! ```bash
//! cargo run --example hybrid_lifetime
//! ```

use std::path::Path;

use batsched::battery::{end_of_life, BatteryState, CurrentProfile};
use batsched::files::{load_battery, load_task_set};
use batsched::hybrid::run_hybrid;
use batsched::taskmodel::ResidueRecord;
use batsched::timebase::TickScale;

fn main() {
    let scale = TickScale::default();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let set = load_task_set(&dir.join("tasks_mixed.json"), &scale).unwrap();
    let battery = load_battery(&dir.join("battery.json")).unwrap();

    for (i, window) in set.windows.iter().enumerate() {
        let residues = if i == 0 { set.residues.clone() } else { ResidueRecord::new() };
        let result = run_hybrid(
            &set.traces_for_window(window),
            window,
            &residues,
            &battery.params,
            &BatteryState::fresh(&battery.params),
            battery.busy_current_ma,
            0.5,
            &scale,
        )
        .unwrap();

        println!(
            "window [{}, {}): busy {} min, {} current segments",
            scale.format_minutes(window.t0),
            scale.format_minutes(window.end()),
            scale.format_minutes(result.waveform.busy.measure()),
            result.profile.segments.len()
        );
        for (t, report) in result.trajectory.iter().step_by(4) {
            println!(
                "  t={:>6.1}  y={:.8}  (permanent {:.8}, temporary {:.8})",
                t, report.total, report.permanent, report.temporary
            );
        }
        match result.end_of_life {
            Some(t) => println!("  battery dies at {t:.3} min"),
            None => {
                let end = result.trajectory.last().unwrap().1;
                println!(
                    "  battery survives the window with y = {:.8}",
                    end.total
                );
            }
        }

        // extrapolate: repeat this window's duty cycle until the battery gives out
        let mut segments = Vec::new();
        while segments.len() < result.profile.segments.len() * 4000 {
            segments.extend(result.profile.segments.iter().copied());
            if segments.iter().map(|s| s.duration_min).sum::<f64>() > 3000.0 {
                break;
            }
        }
        let repeated = CurrentProfile::new(0.0, segments).unwrap();
        match end_of_life(&battery.params, &BatteryState::fresh(&battery.params), &repeated).unwrap()
        {
            Some(t) => println!("  repeating this load pattern: lifetime ~{t:.1} min"),
            None => println!("  repeating this load pattern: outlives 3000 min"),
        }
        println!();
    }
}
