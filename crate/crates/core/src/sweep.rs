//! Purity-versus-time curves and helpers for locating their maxima.

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::Result;
use crate::fock::{JointState, ModeAmplitudes, TwoModeState};
use crate::large_field::{build_psi_pm, Sign};
use crate::observables::{atomic_purity, mode_purity, Mode};
use crate::propagator::evolve_sweep;
use crate::scalar::Real;

/// `steps + 1` evenly spaced times from `0` to `gt_max` (a single `0` when
/// `gt_max` is zero or `steps` is zero).
pub fn time_grid<T: Real>(gt_max: T, steps: usize) -> Vec<T> {
    if steps == 0 || gt_max == T::zero() {
        return vec![T::zero()];
    }
    let d = gt_max / T::from_usize_lossy(steps);
    (0..=steps).map(|k| d * T::from_usize_lossy(k)).collect()
}

/// Atomic purity of the evolved state at each time.
pub fn atomic_purity_sweep<T: Real>(state: &JointState<T>, gts: &[T]) -> Result<Vec<T>> {
    let states = evolve_sweep(state, gts)?;
    Ok(states.par_iter().map(atomic_purity).collect())
}

/// Mode purity of `|ψ₊(t)⟩` (equal to that of `|ψ₋(t)⟩`).
pub fn psi_plus_purity_sweep<T: Real>(c1: &ModeAmplitudes<T>, c2: &ModeAmplitudes<T>, gts: &[T]) -> Vec<T> {
    gts.par_iter()
        .map(|&gt| mode_purity(&build_psi_pm(c1, c2, Sign::Plus, gt), Mode::One))
        .collect()
}

/// Field left after finding the atom in `|b⟩` when it started there:
/// `∝ Σ C_n C_m cos(gt√((m+1)n)) |n,m⟩`, i.e. `|ψ₊⟩ + |ψ₋⟩` normalized.
pub fn conditional_field_state<T: Real>(c1: &ModeAmplitudes<T>, c2: &ModeAmplitudes<T>, gt: T) -> Result<TwoModeState<T>> {
    let grid = Array2::from_shape_fn((c1.amps().len(), c2.amps().len()), |(n, m)| {
        let theta = gt * T::from_usize_lossy((m + 1) * n).sqrt();
        c1.amps()[n] * c2.amps()[m] * Complex::new(theta.cos(), T::zero())
    });
    TwoModeState::normalized(grid)
}

/// Mode purity of [`conditional_field_state`] at each time.
pub fn conditional_purity_sweep<T: Real>(c1: &ModeAmplitudes<T>, c2: &ModeAmplitudes<T>, gts: &[T]) -> Result<Vec<T>> {
    gts.par_iter()
        .map(|&gt| Ok(mode_purity(&conditional_field_state(c1, c2, gt)?, Mode::One)))
        .collect()
}

/// Interior samples strictly above both neighbours, as `(x, y)` pairs.
pub fn local_maxima<T: Real>(xs: &[T], ys: &[T]) -> Vec<(T, T)> {
    (1..ys.len().saturating_sub(1))
        .filter(|&i| ys[i] > ys[i - 1] && ys[i] > ys[i + 1])
        .map(|i| (xs[i], ys[i]))
        .collect()
}

/// Local maximum closest to `target` within `half_width`, if any.
pub fn nearest_local_max<T: Real>(xs: &[T], ys: &[T], target: T, half_width: T) -> Option<(T, T)> {
    local_maxima(xs, ys)
        .into_iter()
        .filter(|(x, _)| (*x - target).abs() <= half_width)
        .min_by(|a, b| {
            (a.0 - target)
                .abs()
                .partial_cmp(&(b.0 - target).abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}
