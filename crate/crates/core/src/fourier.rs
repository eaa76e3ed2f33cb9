//! Sampled complex envelopes and the unitary discrete Fourier pair used by
//! the k-space propagator.
//!
//! Both directions carry a 1/√N factor, so `forward_ft` followed by
//! `inverse_ft` is the identity and the discrete L² norm is preserved
//! exactly (Parseval). Spectra are stored in the standard DFT bin order
//! `[0, 1, …, N/2−1, −N/2, …, −1]·dk`; [`crate::model::SpatialGrid::k_at`]
//! maps bins to physical spatial frequencies.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::model::SpatialGrid;

/// Complex envelope sampled on a spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    /// Zero field on `grid`.
    pub fn zeros(grid: SpatialGrid) -> Self {
        ComplexField {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_points],
        }
    }

    /// Largest |value| over the grid.
    pub fn peak_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm √(Σ|ψ|²·dz).
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dz()).sqrt()
    }

    /// |ψ|²-weighted mean position ∫z|ψ|²dz / ∫|ψ|²dz, or `None` when the
    /// norm vanishes.
    pub fn centroid(&self) -> Option<f64> {
        let mut weight = 0.0;
        let mut moment = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let w = v.norm_sqr();
            weight += w;
            moment += w * self.grid.z_at(i);
        }
        if weight > 0.0 && weight.is_finite() {
            Some(moment / weight)
        } else {
            None
        }
    }

    /// Inner product ⟨self, other⟩ = Σ conj(self)·other · dz.
    pub fn inner(&self, other: &ComplexField) -> Complex64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dz()
    }
}

/// Spatial-frequency coefficients of a field, in DFT bin order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: SpatialGrid,
    pub values: Vec<Complex64>,
}

impl Spectrum {
    /// Largest |coefficient| over the comb.
    pub fn peak_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

thread_local! {
    // rustfft caches plans per length inside the planner.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        if forward {
            planner.plan_fft_forward(n)
        } else {
            planner.plan_fft_inverse(n)
        }
    })
}

/// Unitary forward transform: Ψ̂(k_m) = (1/√N) Σ_n ψ(z_n) e^{−i k_m n dz}.
pub fn forward_ft(field: &ComplexField) -> Spectrum {
    let n = field.grid.n_points;
    let mut values = field.values.clone();
    plan(n, true).process(&mut values);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    Spectrum {
        grid: field.grid,
        values,
    }
}

/// Unitary inverse transform; exact inverse of [`forward_ft`] up to
/// rounding.
pub fn inverse_ft(spectrum: &Spectrum) -> ComplexField {
    let n = spectrum.grid.n_points;
    let mut values = spectrum.values.clone();
    plan(n, false).process(&mut values);
    let scale = 1.0 / (n as f64).sqrt();
    for v in &mut values {
        *v *= scale;
    }
    ComplexField {
        grid: spectrum.grid,
        values,
    }
}
