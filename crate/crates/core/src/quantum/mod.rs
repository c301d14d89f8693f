//! Pure and mixed quantum states, the gate set, and the ideal and noisy
//! (per-gate depolarizing) circuit simulators.

mod circuit;
mod simulate;
mod state;

pub use circuit::{Circuit, Gate, Matrix2};
pub use simulate::{
    apply_gate_mixed, apply_gate_pure, depolarize_global, depolarize_local, expectation,
    simulate_ideal, simulate_noisy,
};
pub use state::{DensityMatrix, Statevector, NORM_TOL, TRACE_TOL};
