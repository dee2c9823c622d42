//! Time-series container shared by the dynamical modules.

use num_complex::Complex64;

use crate::{Error, Result};

/// Time grid plus the complex coherence ratio ρ12(t)/ρ12(0) and, where the
/// producing module tracks them, the populations.
#[derive(Debug, Clone)]
pub struct CoherenceSeries {
    /// Ascending times; units depend on the producing module (1/α for the XY
    /// and bosonic models, 1/J0 for the Ising ones).
    pub times: Vec<f64>,
    pub ratio12: Vec<Complex64>,
    /// ρ11(t) for the initial state handed to the producer; empty when the
    /// model does not evolve populations.
    pub pop11: Vec<f64>,
}

impl CoherenceSeries {
    pub fn abs_ratio(&self) -> Vec<f64> {
        self.ratio12.iter().map(|z| z.norm()).collect()
    }
}

/// Validates that a grid is finite and strictly increasing.
pub fn check_grid(times: &[f64]) -> Result<()> {
    if times.len() < 2 {
        return Err(Error::Grid(format!(
            "need at least 2 grid points, got {}",
            times.len()
        )));
    }
    for w in times.windows(2) {
        if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::Grid(format!(
                "grid must be finite and strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Uniform grid of `points` values on [lo, hi].
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::Grid("points must be >= 2".into()));
    }
    if !(hi > lo) {
        return Err(Error::Grid(format!("need t_max > t_min, got [{lo}, {hi}]")));
    }
    let n = points - 1;
    Ok((0..=n)
        .map(|k| lo + (hi - lo) * k as f64 / n as f64)
        .collect())
}
