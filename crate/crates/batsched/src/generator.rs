//! Random schedulable scenario generation.
//!
//! Scenarios are built so the priority-ordering rule holds by construction:
//! task request intervals are drawn from strictly separated bands, so every
//! interval of a higher-priority task is shorter than every interval of a
//! lower-priority one. Utilization is budgeted below saturation and a draw
//! is rejected (and retried) if the event simulator still observes a
//! deadline miss, so all emitted scenarios are schedulable end to end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::files::{TaskDef, TaskSet, TaskSource};
use crate::oracle;
use crate::taskmodel::{PeriodicSpec, ResidueRecord, TaskInstance, WindowSpec};
use crate::timebase::Tick;

/// Generated times land on this grid (0.001 min at the default tick scale)
/// to keep fixtures readable; the model itself has no such restriction.
const GRAIN: i64 = 1000;

fn grains(g: i64) -> Tick {
    Tick(g * GRAIN)
}

/// Deterministically generate a schedulable scenario with 2–5 tasks, mixed
/// periodic/aperiodic, and random carried-in residues. The same seed always
/// yields the same scenario.
pub fn random_schedulable(seed: u64) -> TaskSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Some(scenario) = try_generate(&mut rng) {
            return scenario;
        }
    }
}

fn try_generate(rng: &mut ChaCha8Rng) -> Option<TaskSet> {
    let n_tasks = rng.random_range(2..=5usize);
    let t0 = grains(rng.random_range(0..=2_000));
    let length = grains(rng.random_range(8_000..=20_000));
    let window = WindowSpec::new(t0, length).expect("positive length");
    let end = window.end();

    // strictly separated request-interval bands, in grains
    let mut bands = Vec::with_capacity(n_tasks);
    let mut lo = rng.random_range(300..=1_000i64);
    for _ in 0..n_tasks {
        let hi = lo + rng.random_range(0..=lo / 3);
        bands.push((lo, hi));
        lo = hi + rng.random_range(50..=300);
    }

    // utilization shares summing to at most ~0.75
    let total_util: f64 = rng.random_range(0.30..0.75);
    let mut weights: Vec<f64> = (0..n_tasks).map(|_| rng.random_range(0.2..1.0)).collect();
    let weight_sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w = *w / weight_sum * total_util;
    }

    let mut tasks = Vec::with_capacity(n_tasks);
    let mut residues = ResidueRecord::new();
    for (idx, (&(lo_g, hi_g), util)) in bands.iter().zip(&weights).enumerate() {
        let name = format!("t{}", idx + 1);
        let computing_g = ((lo_g as f64 * util) as i64).max(1);
        // the top task must first request early enough that no two requests
        // of any lower task can precede it
        let max_offset_g = if idx == 0 { hi_g * 4 / 5 } else { hi_g * 3 };
        let offset_g = rng.random_range(0..=max_offset_g);
        let source = if rng.random_bool(0.5) {
            let period_g = rng.random_range(lo_g..=hi_g);
            let spec = PeriodicSpec::new(
                grains(period_g),
                grains(computing_g.min(period_g)),
                t0 + grains(offset_g),
                None,
            )
            .expect("band keeps 0 < C <= T");
            TaskSource::Periodic(spec)
        } else {
            let mut instances = Vec::new();
            let mut request = t0 + grains(offset_g);
            while request < end {
                instances.push(TaskInstance {
                    request,
                    computing: grains(rng.random_range(1..=computing_g)),
                });
                request += grains(rng.random_range(lo_g..=hi_g));
            }
            TaskSource::Instances(instances)
        };
        // carried-in leftovers, small enough to usually stay schedulable
        if rng.random_bool(0.4) {
            residues.insert(name.clone(), grains(rng.random_range(1..=computing_g)));
        }
        tasks.push(TaskDef {
            name,
            rank: (idx + 1) as i64,
            source,
        });
    }

    let scenario = TaskSet {
        tasks,
        windows: vec![window],
        residues,
    };
    let traces = scenario.traces_for_window(&window);
    let sim = oracle::simulate(&traces, &window, &scenario.residues);
    if !sim.deadline_misses.is_empty() {
        return None;
    }
    Some(scenario)
}
