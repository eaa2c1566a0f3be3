//! Constant-current discharge of the reference battery: the exact state
//! update against the closed-form loss, and the end-of-life root.
//!
//! ```bash
//! cargo run --example battery_discharge
//! ```

use batsched::battery::{
    advance, capacity_report, end_of_life, sigma_constant, BatteryParams, BatteryState,
    CurrentProfile, CurrentSegment,
};

fn main() {
    let params = BatteryParams::new(40375.0, 0.273).unwrap();
    let current = 200.0;

    println!("constant {current} mA from a fresh battery (alpha=40375, beta=0.273, m=10):");
    println!("{:>8} {:>12} {:>12} {:>12} {:>14}", "t [min]", "y", "permanent", "temporary", "closed form");
    let fresh = BatteryState::fresh(&params);
    for t in [0.0, 1.0, 10.0, 50.0, 100.0, 150.0, 189.0] {
        let state = advance(&fresh, &params, current, t).unwrap();
        let report = capacity_report(&state);
        println!(
            "{:>8} {:>12.6} {:>12.6} {:>12.6} {:>14.6}",
            t,
            report.total,
            report.permanent,
            report.temporary,
            sigma_constant(&params, current, t)
        );
    }

    let profile = CurrentProfile::new(
        0.0,
        vec![CurrentSegment { duration_min: 400.0, current_ma: current }],
    )
    .unwrap();
    let eol = end_of_life(&params, &fresh, &profile).unwrap().unwrap();
    println!("\nend of life (total loss reaches 1): {eol:.6} min");
    println!(
        "upper bound without temporary losses would be alpha/I = {:.3} min",
        params.alpha() / current
    );
}
