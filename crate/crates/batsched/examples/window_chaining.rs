//! Residues connect windows: analyzing [a,b) and then [b,c) with the
//! exported leftovers reproduces the uncut [a,c) run exactly, so the model
//! never needs history older than the window start.
//!
//! ```bash
//! cargo run --example window_chaining
//! ```

use batsched::generator::random_schedulable;
use batsched::multisched::schedule;
use batsched::oracle;
use batsched::taskmodel::WindowSpec;
use batsched::timebase::{Interval, Tick, TickScale};

fn main() {
    let scale = TickScale::default();
    let scenario = random_schedulable(11);
    let full = scenario.windows[0];
    let cut = full.t0 + Tick(full.length.0 / 2);
    let first = WindowSpec::new(full.t0, cut - full.t0).unwrap();
    let second = WindowSpec::new(cut, full.end() - cut).unwrap();

    println!(
        "scenario with {} tasks over [{}, {}), cut at {}",
        scenario.tasks.len(),
        scale.format_minutes(full.t0),
        scale.format_minutes(full.end()),
        scale.format_minutes(cut),
    );

    let single = schedule(
        &scenario.traces_for_window(&full),
        &full,
        &scenario.residues,
    )
    .unwrap();
    let part1 = schedule(
        &scenario.traces_for_window(&first),
        &first,
        &scenario.residues,
    )
    .unwrap();

    println!("\nstate carried across the cut:");
    for (name, residue) in part1.export_residues() {
        println!("  {name}: {} min of unfinished work", scale.format_minutes(*residue));
    }

    let part2 = schedule(
        &scenario.traces_for_window(&second),
        &second,
        part1.export_residues(),
    )
    .unwrap();

    let restricted = single
        .waveform
        .busy
        .intersect(Interval::new(cut, full.end()).unwrap());
    let delta = oracle::diff(&part2.waveform.busy, &restricted);

    println!(
        "\nsecond-half waveform, single run: {} busy pieces, {} min",
        restricted.len(),
        scale.format_minutes(restricted.measure())
    );
    println!(
        "second-half waveform, chained:    {} busy pieces, {} min",
        part2.waveform.busy.len(),
        scale.format_minutes(part2.waveform.busy.measure())
    );
    println!("difference: {} (empty = exact match)", delta.len());
    assert!(delta.is_empty());
    assert_eq!(part2.export_residues(), single.export_residues());
    println!("end-of-window residues also match exactly");
}
