//! Analytic busy/free waveform prediction for prioritized aperiodic tasks on
//! one processor, coupled to a dynamic battery capacity model.
//!
//! Instead of replaying scheduling history event by event, the processor
//! state over any finite window is produced by difference equations over a
//! handful of state variables, with leftover work ("residues") connecting
//! consecutive windows. The resulting square-wave utilization drives a
//! battery whose capacity loss recovers during idle gaps, yielding remaining
//! capacity and end-of-life predictions. An event-driven preemptive
//! simulator ships alongside as an independent ground truth; analytic and
//! simulated waveforms agree tick for tick on inputs that satisfy the
//! priority-ordering rule.
//!
//! # Modules
//!
//! * [`timebase`] - exact integer ticks and interval-set algebra
//! * [`taskmodel`] - task traces, windows, ordering checks, residues
//! * [`pairsched`] - the two-task difference-equation model
//! * [`multisched`] - recursive N-task fold and the busy waveform
//! * [`oracle`] - event-driven preemptive fixed-priority simulator
//! * [`battery`] - capacity-loss state model with recovery
//! * [`hybrid`] - waveform → current profile → capacity trajectory
//! * [`generator`] - random schedulable scenarios for equivalence testing
//! * [`files`] - task-set / battery / CSV / report formats
//! * [`cli`] - the `batsched` command-line front end
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example pair_waveform       # two-task model state trace
//! cargo run --example multi_task_schedule # four-task window waveform
//! cargo run --example oracle_comparison   # analytic vs simulator diff
//! cargo run --example battery_discharge   # constant-current discharge
//! cargo run --example recovery_effect     # pulsed load vs rest
//! cargo run --example hybrid_lifetime     # full pipeline on a scenario
//! cargo run --example window_chaining     # residues across window cuts
//! ```

pub mod battery;
pub mod cli;
pub mod error;
pub mod files;
pub mod generator;
pub mod hybrid;
pub mod multisched;
pub mod oracle;
pub mod pairsched;
pub mod taskmodel;
pub mod timebase;

pub use error::{Error, Result};
