//! Schrödinger evolution of oscillator eigenstates along the synthesized
//! trap path, in units with `ℏ = m = ω = 1`.

pub mod check;
pub mod evolve;
pub mod grid;
pub mod phase;
pub mod wave;

pub use check::{
    check_schedule, classical_state_at, evolve_with_snapshots, phase_convergence,
    transport_check, PhaseConvergence, TransportCheckReport,
};
pub use evolve::{evolve, evolve_observed, evolve_static, trap_path, SplitStep, TrapMove};
pub use grid::GridSpec;
pub use phase::{energy, predicted_phase, predicted_phase_with_hold, wrap_phase};
pub use wave::{eigenstate, hermite_functions, write_snapshot_csv, WaveState};
