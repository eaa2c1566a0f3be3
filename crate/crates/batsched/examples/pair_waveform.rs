//! The two-task model on the classic baseline pair: print the state
//! trajectory (phase, residue) and the busy waveform it induces.
//!
//! ```bash
//! cargo run --example pair_waveform
//! ```

use batsched::pairsched::{run_pair, SegmentMode};
use batsched::taskmodel::{expand_periodic, PeriodicSpec, WindowSpec};
use batsched::timebase::{Tick, TickScale};

fn main() {
    let scale = TickScale::default();
    let min = |s: &str| scale.parse_minutes(s).unwrap();

    let window = WindowSpec::new(min("0"), min("9.3")).unwrap();
    let high = expand_periodic(
        &PeriodicSpec::new(min("1"), min("0.2"), min("0"), None).unwrap(),
        "tau1",
        &window,
    );
    let low = expand_periodic(
        &PeriodicSpec::new(min("1.5"), min("0.3"), min("0.3"), None).unwrap(),
        "tau2",
        &window,
    );

    let run = run_pair(&high, &low, &window, Tick::ZERO).expect("ordering rule holds");

    println!("state trajectory (one row per high-priority request interval):");
    println!("{:>3} {:>8} {:>3} {:>8} {:>8}  mode", "n", "t", "y", "z", "residue");
    for (state, segment) in run.states.iter().zip(&run.segments) {
        println!(
            "{:>3} {:>8} {:>3} {:>8} {:>8}  {}",
            state.n,
            scale.format_minutes(state.t_alpha),
            state.y,
            scale.format_minutes(state.z),
            scale.format_minutes(state.residue),
            match segment.mode {
                SegmentMode::BetaRequested => "low-priority request in interval",
                SegmentMode::BetaAbsent => "no low-priority request",
            }
        );
    }

    println!("\nbusy waveform:");
    for piece in run.waveform.iter() {
        println!(
            "  [{}, {})",
            scale.format_minutes(piece.start()),
            scale.format_minutes(piece.end())
        );
    }
    println!(
        "\ntotal busy time: {} min",
        scale.format_minutes(run.waveform.measure())
    );
}
