//! Closed-form transport coefficients of the polariton envelope.
//!
//! After adiabatic elimination of the excited state, the polariton obeys a
//! first-order transport equation whose k-space solution is a single
//! exponential. The complex rate in that exponential is assembled here from
//! four real coefficients:
//!
//! * `alpha1` — k-independent decay rate (1/s), the channel that eats the
//!   stored excitation at essentially γ_bc during storage;
//! * `alpha2` — slope of a k-proportional gain/loss term (m/s); off
//!   resonance it amplifies one half of the spatial spectrum exponentially
//!   and is the mechanism that shreds the pulse once detunings exceed the
//!   limits reported by [`detuning_limits`];
//! * `beta`  — k-independent phase rate (rad/s), a global phase only;
//! * `v_g`   — group velocity (m/s), sliding from c at θ = 0 down to
//!   [`vg_min`] at θ = π/2 on two-photon resonance.
//!
//! All four descend from a complex pair (A₀, B₀). The full forms carry the
//! denominator g²N + P·sin²θ, where P = (i(Δ+Δ_p)+γ_ba)(iΔ_p+γ_bc) is the
//! product of the two damped detuning poles; in the high-density regime
//! (g²N ≫ |P|) the denominator collapses to g²N, which yields the reduced
//! forms used everywhere in the propagator. P's imaginary part vanishes
//! identically when Δ = Δ_p = 0, so `alpha2` and `beta` are structural zeros
//! on resonance — exact zeros in floating point, not small residuals.

use num_complex::Complex64;
use thiserror::Error;

use crate::fourier::{forward_ft, inverse_ft, ComplexField};
use crate::model::{ControlProfile, ControlState, PhysicalParams};

/// |denominator| below this fraction of g²N makes the full A₀/B₀ forms
/// numerically meaningless (the collective coupling no longer dominates).
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

/// Quadrature step used by [`predict_output`] when marching the analytic
/// transport integrals; matches the default evolution step so analytic and
/// simulated displacements share their discretization.
const PREDICT_DT: f64 = 1e-7;

#[derive(Debug, Error)]
pub enum CoeffError {
    /// g²N + P·sin²θ nearly cancelled; the reported ratio is
    /// |denominator|/g²N.
    #[error(
        "collective-coupling denominator nearly cancels: |g²N + P·sin²θ| = {ratio:.3e}·g²N \
         (need ≥ {DENOMINATOR_FLOOR:.0e})"
    )]
    DegenerateDenominator { ratio: f64 },
    /// The predicted output centroid leaves the periodic cell, so the
    /// analytic delayed copy would wrap around instead of exiting cleanly.
    #[error(
        "predicted output centroid {z_out:.6e} m falls outside the cell grid \
         [{z_min:.6e}, {z_max:.6e}) m"
    )]
    OutOfCell { z_out: f64, z_min: f64, z_max: f64 },
}

/// Transport coefficients evaluated at one instant of the control profile.
///
/// `a0` and `b0` keep the reduced complex forms alongside the real split so
/// callers can audit that both routes assemble the same exponent rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    /// k-independent decay rate (1/s).
    pub alpha1: f64,
    /// k-proportional gain/loss coefficient (m/s); negative values amplify
    /// k > 0 components.
    pub alpha2: f64,
    /// Global phase rate (rad/s).
    pub beta: f64,
    /// Group velocity (m/s).
    pub v_g: f64,
    /// Reduced k-independent complex rate (1/s).
    pub a0: Complex64,
    /// Reduced k-coefficient (dimensionless).
    pub b0: Complex64,
}

impl CoefficientSet {
    /// Complex exponent rate Λ(k) = α₁ + iβ + k·α₂ + ik·v_g for spatial
    /// frequency `k`; the k-mode decays as exp(−∫Λ dt).
    pub fn rate(&self, k: f64) -> Complex64 {
        Complex64::new(self.alpha1 + k * self.alpha2, self.beta + k * self.v_g)
    }
}

/// Reduced coefficients from a prepared control state. The propagator goes
/// through here so the θ → π/2 limit uses the overflow-free tanθ·θ̇ product.
pub(crate) fn reduced_from_state(
    params: &PhysicalParams,
    state: &ControlState,
) -> CoefficientSet {
    let s = state.sin_theta();
    let s2 = s * s;
    let s4 = s2 * s2;
    let cos = state.cos_theta();
    let c2 = cos * cos;
    let mix = state.tan_theta_theta_dot;
    let g2n = params.g2n();
    let p = params.pole_ba() * params.pole_bc();
    let gbc = params.gamma_bc;
    let dp = params.delta_p;

    let alpha1 = gbc * s2 + (s2 / g2n) * (p.re * (mix - gbc * s2) + p.im * dp * s2);
    let beta = dp * s2 + (s2 / g2n) * (p.im * (mix - gbc * s2) - p.re * dp * s2);
    let alpha2 = -params.c_light * p.im * s4 / g2n;
    let v_g = params.c_light * (c2 + p.re * s4 / g2n);
    let a0 = p * Complex64::new(mix - gbc * s2, -dp * s2) * (s2 / g2n);
    let b0 = p * (s4 / g2n);

    CoefficientSet {
        alpha1,
        alpha2,
        beta,
        v_g,
        a0,
        b0,
    }
}

/// Reduced (high-density) coefficient split {α₁, α₂, β, v_g} plus the
/// reduced complex pair (a₀, b₀) for auditing.
///
/// Valid when g²N dominates the pole product; [`crate::check_high_density`]
/// quantifies the margin. The expressions are evaluated as written, so on
/// exact resonance `alpha2` and `beta` come out as exact zeros for any
/// (θ, θ̇).
pub fn coefficients_reduced(
    params: &PhysicalParams,
    theta: f64,
    theta_dot: f64,
) -> CoefficientSet {
    reduced_from_state(params, &ControlState::new(theta, theta_dot))
}

/// Full (un-reduced) complex pair (A₀, B₀) including the
/// g²N + P·sin²θ denominator.
///
/// Prefer θ strictly inside (0, π/2); at the upper end build the state via
/// [`ControlProfile::state_at`] instead to keep tanθ·θ̇ finite.
pub fn a0_b0_full(
    params: &PhysicalParams,
    theta: f64,
    theta_dot: f64,
) -> Result<(Complex64, Complex64), CoeffError> {
    full_from_state(params, &ControlState::new(theta, theta_dot))
}

pub(crate) fn full_from_state(
    params: &PhysicalParams,
    state: &ControlState,
) -> Result<(Complex64, Complex64), CoeffError> {
    let s = state.sin_theta();
    let s2 = s * s;
    let s4 = s2 * s2;
    let mix = state.tan_theta_theta_dot;
    let g2n = params.g2n();
    let p = params.pole_ba() * params.pole_bc();

    let denom = Complex64::new(g2n, 0.0) + p * s2;
    let ratio = denom.norm() / g2n;
    if ratio < DENOMINATOR_FLOOR {
        return Err(CoeffError::DegenerateDenominator { ratio });
    }
    let a0 = p * s2 * (Complex64::new(mix, 0.0) - params.pole_bc() * s2) / denom;
    let b0 = p * s4 / denom;
    Ok((a0, b0))
}

/// Smallest group velocity reachable on two-photon resonance,
/// c·γ_bc·γ_ba/g²N — the floor that a finite ground-state decay puts under
/// "stopped" light.
pub fn vg_min(params: &PhysicalParams) -> f64 {
    params.c_light * (params.gamma_bc * params.gamma_ba / params.g2n())
}

/// Approximation tiers for the resonant decay rate α₁, ordered from the
/// as-derived expression down to the bare ground-coherence rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonantTier {
    /// γ_bc·sin²θ + (γ_bcγ_ba/g²N)·sin²θ·(tanθ·θ̇ − γ_bc·sin²θ).
    Full,
    /// Drops the γ_bc² correction inside the bracket (g²N ≫ γ_bcγ_ba).
    HighDensity,
    /// Slow-light limit sinθ → 1: γ_bc + (γ_bcγ_ba/g²N)·tanθ·θ̇.
    SlowLight,
    /// The bare rate γ_bc; what survives once switching transients average
    /// out.
    Constant,
}

/// Resonant (Δ = Δ_p = 0) decay rate at the requested approximation tier.
pub fn alpha1_resonant(
    params: &PhysicalParams,
    theta: f64,
    theta_dot: f64,
    tier: ResonantTier,
) -> f64 {
    alpha1_resonant_from_state(params, &ControlState::new(theta, theta_dot), tier)
}

pub(crate) fn alpha1_resonant_from_state(
    params: &PhysicalParams,
    state: &ControlState,
    tier: ResonantTier,
) -> f64 {
    let gbc = params.gamma_bc;
    let scale = gbc * params.gamma_ba / params.g2n();
    let mix = state.tan_theta_theta_dot;
    match tier {
        ResonantTier::Full => {
            let s = state.sin_theta();
            let s2 = s * s;
            gbc * s2 + scale * s2 * (mix - gbc * s2)
        }
        ResonantTier::HighDensity => {
            let s = state.sin_theta();
            (gbc + scale * mix) * (s * s)
        }
        ResonantTier::SlowLight => gbc + scale * mix,
        ResonantTier::Constant => gbc,
    }
}

/// Resonance-form group velocity c·(cos²θ + γ_bcγ_ba·sin⁴θ/g²N) from a
/// prepared state; the transport law [`predict_output`] integrates.
pub(crate) fn resonant_group_velocity(params: &PhysicalParams, state: &ControlState) -> f64 {
    let s = state.sin_theta();
    let s2 = s * s;
    let cos = state.cos_theta();
    let scale = params.gamma_bc * params.gamma_ba / params.g2n();
    params.c_light * (cos * cos + scale * s2 * s2)
}

/// How the analytic output prediction accounts for storage decay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictMode {
    /// Attenuate by e^(−γ_bc·t_out): the ground-coherence rate applied
    /// uniformly over the whole interval.
    UniformDecay,
    /// Attenuate by e^(−∫α₁ dt) with the slow-light resonant rate, which
    /// also books the brief switching transients.
    IntegratedDecay,
}

/// Analytic output pulse: the input envelope displaced by ∫v_g dt and
/// attenuated per `mode`.
///
/// The transport always uses the resonance-form group velocity of the given
/// profile — detunings in `params` are deliberately ignored — so the result
/// is the undistorted baseline an off-resonance run is compared against.
/// The displacement is applied as an exact spectral phase ramp, which
/// interpolates between grid points instead of rounding to the nearest one.
pub fn predict_output(
    input_pulse: &ComplexField,
    params: &PhysicalParams,
    profile: &ControlProfile,
    t_out: f64,
    mode: PredictMode,
) -> Result<ComplexField, CoeffError> {
    assert!(
        t_out.is_finite() && t_out >= 0.0,
        "prediction time must be finite and non-negative"
    );
    let steps = ((t_out / PREDICT_DT).ceil() as usize).max(16);
    let dt = t_out / steps as f64;

    let mut displacement = 0.0;
    let mut decay_integral = 0.0;
    let mut prev_vg = resonant_group_velocity(params, &profile.state_at(params, 0.0));
    let mut prev_a1 =
        alpha1_resonant_from_state(params, &profile.state_at(params, 0.0), ResonantTier::SlowLight);
    for i in 1..=steps {
        let state = profile.state_at(params, i as f64 * dt);
        let vg = resonant_group_velocity(params, &state);
        let a1 = alpha1_resonant_from_state(params, &state, ResonantTier::SlowLight);
        displacement += 0.5 * dt * (prev_vg + vg);
        decay_integral += 0.5 * dt * (prev_a1 + a1);
        prev_vg = vg;
        prev_a1 = a1;
    }
    let decay_exponent = match mode {
        PredictMode::UniformDecay => params.gamma_bc * t_out,
        PredictMode::IntegratedDecay => decay_integral,
    };

    if let Some(zc) = input_pulse.centroid() {
        let z_out = zc + displacement;
        let g = input_pulse.grid;
        if z_out < g.z_min || z_out >= g.z_max {
            return Err(CoeffError::OutOfCell {
                z_out,
                z_min: g.z_min,
                z_max: g.z_max,
            });
        }
    }

    let amplitude = (-decay_exponent).exp();
    let mut spec = forward_ft(input_pulse);
    for (i, v) in spec.values.iter_mut().enumerate() {
        let k = spec.grid.k_at(i);
        *v *= Complex64::from_polar(amplitude, -k * displacement);
    }
    Ok(inverse_ft(&spec))
}

/// Detuning and laser-bandwidth ceilings below which the output pulse stays
/// essentially undistorted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningLimits {
    /// Largest tolerable two-photon detuning |Δ_p| (rad/s) — the tight
    /// limit, scaled by 1/γ_ba.
    pub delta_p_max: f64,
    /// Largest tolerable one-photon detuning |Δ| (rad/s), scaled by 1/γ_bc.
    pub delta_max: f64,
    /// Ceiling on |BW_c − BW_p| and on the two lasers' center-frequency
    /// offset (rad/s): a frequency mismatch acts as an effective Δ_p.
    pub bw_diff_max: f64,
    /// Ceiling on either laser's own bandwidth (rad/s): components detuned
    /// together act as an effective Δ.
    pub bw_max: f64,
}

/// Distortion-free detuning window for a pulse of length `pulse_length_lp`
/// stored for `storage_time_t0`.
///
/// The common scale is 0.01·g²N·L_p/(c·T₀): the k-dependent gain e^(|α₂|k·t)
/// stays harmless while its exponent, at the pulse's own bandwidth
/// k ~ 1/L_p, stays below the calibrated 1% level.
pub fn detuning_limits(
    params: &PhysicalParams,
    pulse_length_lp: f64,
    storage_time_t0: f64,
) -> DetuningLimits {
    debug_assert!(pulse_length_lp > 0.0 && storage_time_t0 > 0.0);
    let base = 0.01 * params.g2n() * pulse_length_lp / (params.c_light * storage_time_t0);
    DetuningLimits {
        delta_p_max: base / params.gamma_ba,
        delta_max: base / params.gamma_bc,
        bw_diff_max: base / params.gamma_ba,
        bw_max: base / params.gamma_bc,
    }
}
