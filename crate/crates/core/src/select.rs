//! Arg-extremum selection with deterministic tie-breaking.
//!
//! Values within `TIE_TOL · max(1, max|v|)` of the extremum count as tied and
//! the lowest index wins.

pub const TIE_TOL: f64 = 1e-10;

fn tolerance(values: &[f64]) -> f64 {
    TIE_TOL * values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Index of the largest value; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = tolerance(values);
    values.iter().position(|&v| v >= best - tol)
}

/// Index of the smallest value; ties resolve to the lowest index.
pub fn argmin(values: &[f64]) -> Option<usize> {
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = tolerance(values);
    values.iter().position(|&v| v <= best + tol)
}
