//! Time evolution of the polariton envelope, exact in Fourier space.
//!
//! Each spatial-frequency component of the dark-state polariton obeys an
//! independent first-order equation, so the whole run reduces to one
//! quadrature per component:
//!
//! ```text
//! Ψ̂(k, t) = Ψ̂(k, 0) · exp(−∫₀ᵗ [α₁ + iβ + kα₂ + ik·v_g] dt′)
//! ```
//!
//! The integrand splits into a k-independent complex piece S₀ = ∫(α₁+iβ),
//! a real gain/loss slope S₂ = ∫α₂, and a displacement Sᵥ = ∫v_g, so one
//! scalar march over time serves every component: the per-k exponent is
//! assembled as S₀ + k·S₂ + ik·Sᵥ at each snapshot. The integrator is
//! unconditionally stable — the only discretization errors are the
//! trapezoidal time quadrature and the grid resolution.
//!
//! Two failure modes of the *model* (not the integrator) are watched at every
//! snapshot:
//!
//! * detuned media amplify one spectral wing without bound (negative k·α₂
//!   exponent); the [`EvolveError::Overflow`] guard aborts once any component
//!   has grown by [`OVERFLOW_GAIN`] over the initial spectral peak. The check
//!   runs on log-magnitudes so it cannot itself overflow.
//! * the periodic grid silently wraps a pulse that reaches an edge; the
//!   [`EvolveError::Wraparound`] guard aborts when the edge amplitude of the
//!   *input-band* part of the field exceeds [`WRAPAROUND_RATIO`] times its
//!   running peak. Restricting the check to the band occupied by the input
//!   keeps amplified high-k hash (the physics under study in detuned runs)
//!   from masquerading as edge contact.
//!
//! Both guards hand back the snapshots accumulated so far, so a tripped run
//! can still be plotted and diagnosed.

use std::f64::consts::LN_10;

use num_complex::Complex64;
use thiserror::Error;

use crate::coefficients::reduced_from_state;
use crate::fourier::{forward_ft, inverse_ft, ComplexField, Spectrum};
use crate::model::{
    check_high_density, ControlProfile, ControlState, ModelError, PhysicalParams, Scenario,
    DEFAULT_OMEGA_FLOOR, REGIME_MARGIN,
};

/// Abort once some |Ψ̂(k,t)| exceeds this multiple of the initial spectral
/// peak.
pub const OVERFLOW_GAIN: f64 = 1e12;

/// Abort once the band-limited field at a grid edge exceeds this fraction of
/// its running peak.
pub const WRAPAROUND_RATIO: f64 = 1e-3;

/// Spectral bins at least this fraction of the initial spectral peak count as
/// "occupied by the input"; the largest such |k| bounds the band used by the
/// wraparound sentinel and the optional low-pass filter.
pub const INPUT_BAND_FLOOR: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One stored instant: the polariton envelope and the physical fields
/// reconstructed from it at the same control angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Time since the start of the run (s).
    pub t: f64,
    /// Dark-state polariton envelope Ψ(z).
    pub psi: ComplexField,
    /// Probe field envelope E(z).
    pub e_field: ComplexField,
    /// Ground-state coherence σ_bc(z) (per-atom amplitude).
    pub sigma_bc: ComplexField,
    /// Bright-state amplitude Φ(z).
    pub phi: ComplexField,
}

/// Complete result of a run: the scenario it came from, the snapshot series
/// (strictly increasing in time, starting at t = 0), and any regime warnings.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scenario: Scenario,
    pub snapshots: Vec<Snapshot>,
    /// Human-readable notes on thin validity margins. Never fatal; guard
    /// trips surface as [`EvolveError`] instead.
    pub warnings: Vec<String>,
}

/// Tuning knobs for [`evolve_with`]; the default runs the physics untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EvolveOptions {
    /// Zero every spectral bin outside the input-occupied band before the
    /// march. Exploratory use only: detuning-driven growth of high-k content
    /// is part of the physics, and the filter hides it.
    pub spectral_filter: bool,
}

#[derive(Debug, Error)]
pub enum EvolveError {
    /// The scenario failed validation before any stepping.
    #[error(transparent)]
    Invalid(#[from] ModelError),
    /// The pulse reached a grid edge; on a periodic grid it would silently
    /// re-enter from the other side. Enlarge the grid or shorten the run.
    #[error(
        "pulse reached the grid edge at t = {t:.4e} s \
         (edge/peak = {boundary_ratio:.3e}, limit {WRAPAROUND_RATIO:.0e})"
    )]
    Wraparound {
        t: f64,
        boundary_ratio: f64,
        /// Snapshots accumulated strictly before the trip.
        partial: Box<Trajectory>,
    },
    /// A spectral component grew past [`OVERFLOW_GAIN`] times the initial
    /// spectral peak — the runaway wing amplification of a detuned medium.
    #[error(
        "spectral amplitude gained 10^{log10_gain:.1} over the input by t = {t:.4e} s; \
         the detuned medium amplifies one spectral wing without bound"
    )]
    Overflow {
        t: f64,
        log10_gain: f64,
        /// Snapshots accumulated strictly before the trip.
        partial: Box<Trajectory>,
    },
}

/// Trapezoidal ∫_{t_a}^{t_b} [α₁(t) + iβ(t) + k·α₂(t) + ik·v_g(t)] dt at
/// step `dt`, with the coefficients evaluated along the control profile.
/// Whole steps of `dt` are taken first; any sub-step remainder is integrated
/// as a final shorter trapezoid.
///
/// The real part is the accumulated log-amplitude loss (gain when negative)
/// of the component, the imaginary part its accumulated phase.
pub fn exponent_integral(
    params: &PhysicalParams,
    profile: &ControlProfile,
    k: f64,
    t_a: f64,
    t_b: f64,
    dt: f64,
) -> Complex64 {
    assert!(
        t_a.is_finite() && t_b.is_finite() && t_a < t_b,
        "integration window must be finite with t_a < t_b"
    );
    assert!(dt.is_finite() && dt > 0.0, "dt must be finite and > 0");
    let rate_at = |t: f64| reduced_from_state(params, &profile.state_at(params, t)).rate(k);
    let span = t_b - t_a;
    // Tolerate t_b − t_a = n·dt landing just below n from rounding.
    let n_whole = (span / dt + 1e-9).floor() as usize;
    let mut acc = ZERO;
    let mut prev = rate_at(t_a);
    for i in 1..=n_whole {
        let cur = rate_at(t_a + i as f64 * dt);
        acc += (prev + cur) * (0.5 * dt);
        prev = cur;
    }
    let remainder = span - n_whole as f64 * dt;
    if remainder > 1e-12 * dt {
        let cur = rate_at(t_b);
        acc += (prev + cur) * (0.5 * remainder);
    }
    acc
}

/// Run a scenario with default options. See [`evolve_with`].
pub fn evolve(scenario: &Scenario) -> Result<Trajectory, EvolveError> {
    evolve_with(scenario, EvolveOptions::default())
}

/// Run a scenario: validate, transform the input pulse once, march the three
/// exponent integrals (S₀, S₂, Sᵥ) over time with the trapezoidal rule at
/// `scenario.dt`, and at every multiple of `snapshot_every` materialize the
/// field, check the guards, and reconstruct the probe field, ground-state
/// coherence, and bright-state amplitude.
///
/// Deterministic: identical scenarios produce bit-identical trajectories.
pub fn evolve_with(scenario: &Scenario, options: EvolveOptions) -> Result<Trajectory, EvolveError> {
    scenario.validate()?;
    let params = &scenario.params;
    let profile = &scenario.profile;
    let dt = scenario.dt;
    let n_steps = (scenario.t_end / dt).round() as usize;
    let stride = (scenario.snapshot_every / dt).round() as usize;

    let mut warnings = Vec::new();
    let hd = check_high_density(params);
    if !hd.ok {
        warnings.push(format!(
            "collective coupling is not dominant: g²N / |pole product| = {:.3e} \
             (the closed-form coefficients assume ≥ {REGIME_MARGIN}); \
             transport numbers are unreliable",
            hd.ratio
        ));
    }

    let mut spectrum0 = forward_ft(&scenario.input_pulse);
    let k = scenario.grid.k_values();
    let init_max = spectrum0.peak_abs();
    // Largest |k| genuinely occupied by the input; everything above it is
    // transform round-off at t = 0.
    let mut k_cut = 0.0f64;
    for (ki, value) in k.iter().zip(&spectrum0.values) {
        if value.norm() >= INPUT_BAND_FLOOR * init_max {
            k_cut = k_cut.max(ki.abs());
        }
    }
    if options.spectral_filter {
        for (ki, value) in k.iter().zip(&mut spectrum0.values) {
            if ki.abs() > k_cut {
                *value = ZERO;
            }
        }
    }
    let ln_abs0: Vec<f64> = spectrum0.values.iter().map(|v| v.norm().ln()).collect();

    let ctx = MarchContext {
        params,
        profile,
        spectrum0,
        ln_abs0,
        k,
        k_cut,
        ln_init_max: init_max.ln(),
        ln_guard: (OVERFLOW_GAIN * init_max).ln(),
    };

    let mut trajectory = Trajectory {
        scenario: scenario.clone(),
        snapshots: Vec::with_capacity(n_steps / stride + 1),
        warnings,
    };
    // Exponent accumulators: S₀ = ∫(α₁+iβ), S₂ = ∫α₂, Sᵥ = ∫v_g.
    let mut s0 = ZERO;
    let mut s2 = 0.0;
    let mut sv = 0.0;
    match materialize(0.0, s0, s2, sv, &ctx) {
        Ok(snapshot) => trajectory.snapshots.push(snapshot),
        Err(trip) => return Err(trip.into_error(trajectory)),
    }
    let mut prev = integrand_at(params, profile, 0.0);
    for step in 1..=n_steps {
        let t = step as f64 * dt;
        let cur = integrand_at(params, profile, t);
        s0 += (prev.s0 + cur.s0) * (0.5 * dt);
        s2 += 0.5 * dt * (prev.alpha2 + cur.alpha2);
        sv += 0.5 * dt * (prev.v_g + cur.v_g);
        prev = cur;
        if step % stride == 0 {
            match materialize(t, s0, s2, sv, &ctx) {
                Ok(snapshot) => trajectory.snapshots.push(snapshot),
                Err(trip) => return Err(trip.into_error(trajectory)),
            }
        }
    }
    Ok(trajectory)
}

/// Exponent-integrand values at one time node.
struct IntegrandNode {
    /// α₁ + iβ.
    s0: Complex64,
    alpha2: f64,
    v_g: f64,
}

fn integrand_at(params: &PhysicalParams, profile: &ControlProfile, t: f64) -> IntegrandNode {
    let set = reduced_from_state(params, &profile.state_at(params, t));
    IntegrandNode {
        s0: Complex64::new(set.alpha1, set.beta),
        alpha2: set.alpha2,
        v_g: set.v_g,
    }
}

/// Everything the per-snapshot materialization needs from the run setup.
struct MarchContext<'a> {
    params: &'a PhysicalParams,
    profile: &'a ControlProfile,
    spectrum0: Spectrum,
    /// ln|Ψ̂(k, 0)| per bin (−∞ on empty bins), for the log-space gain guard.
    ln_abs0: Vec<f64>,
    k: Vec<f64>,
    k_cut: f64,
    ln_init_max: f64,
    ln_guard: f64,
}

/// A guard fired at time `t`; converted to [`EvolveError`] once the partial
/// trajectory can be attached.
enum GuardTrip {
    Overflow { t: f64, log10_gain: f64 },
    Wraparound { t: f64, boundary_ratio: f64 },
}

impl GuardTrip {
    fn into_error(self, partial: Trajectory) -> EvolveError {
        let partial = Box::new(partial);
        match self {
            GuardTrip::Overflow { t, log10_gain } => EvolveError::Overflow {
                t,
                log10_gain,
                partial,
            },
            GuardTrip::Wraparound { t, boundary_ratio } => EvolveError::Wraparound {
                t,
                boundary_ratio,
                partial,
            },
        }
    }
}

/// Assemble the snapshot at time `t` from the accumulated exponents, running
/// the overflow guard (before exponentiating anything) and the wraparound
/// sentinel (on the input-band part of the field).
fn materialize(
    t: f64,
    s0: Complex64,
    s2: f64,
    sv: f64,
    ctx: &MarchContext<'_>,
) -> Result<Snapshot, GuardTrip> {
    let n = ctx.spectrum0.grid.n_points;

    let mut max_ln = f64::NEG_INFINITY;
    for i in 0..n {
        let ln_mag = ctx.ln_abs0[i] - (s0.re + ctx.k[i] * s2);
        if ln_mag > max_ln {
            max_ln = ln_mag;
        }
    }
    if max_ln > ctx.ln_guard {
        return Err(GuardTrip::Overflow {
            t,
            log10_gain: (max_ln - ctx.ln_init_max) / LN_10,
        });
    }

    let mut spectrum = Spectrum {
        grid: ctx.spectrum0.grid,
        values: vec![ZERO; n],
    };
    for i in 0..n {
        let v = ctx.spectrum0.values[i];
        // Empty bins stay empty; skipping them keeps 0·∞ from producing NaN
        // when a heavily filtered run meets a strongly amplifying medium.
        if v != ZERO {
            let decay = s0.re + ctx.k[i] * s2;
            let phase = s0.im + ctx.k[i] * sv;
            spectrum.values[i] = v * Complex64::from_polar((-decay).exp(), -phase);
        }
    }
    let psi = inverse_ft(&spectrum);

    let mut band = spectrum;
    for i in 0..n {
        if ctx.k[i].abs() > ctx.k_cut {
            band.values[i] = ZERO;
        }
    }
    let band_field = inverse_ft(&band);
    let boundary = band_field.values[0]
        .norm()
        .max(band_field.values[n - 1].norm());
    let band_peak = band_field.peak_abs();
    if boundary > WRAPAROUND_RATIO * band_peak {
        return Err(GuardTrip::Wraparound {
            t,
            boundary_ratio: boundary / band_peak,
        });
    }

    let state = ctx.profile.state_at(ctx.params, t);
    let (e_field, sigma_bc, phi) = reconstruct_from_state(&psi, ctx.params, &state);
    Ok(Snapshot {
        t,
        psi,
        e_field,
        sigma_bc,
        phi,
    })
}

/// Recover the physical fields from the polariton envelope at mixing angle
/// θ. The bright-state amplitude responds to the stored excitation through
/// the pole product, growing with tanθ as the control field turns off:
///
/// ```text
/// Φ = P·tanθ·sin²θ / (g²N + P·sin²θ) · Ψ
/// E = cosθ·Ψ + sinθ·Φ
/// σ_bc = −(sinθ·Ψ − cosθ·Φ)/√N
/// ```
///
/// With γ_bc = 0 and Δ_p = 0 the pole product vanishes and the classic
/// lossless picture (Φ = 0, E = cosθ·Ψ) is recovered exactly.
///
/// `theta` is taken in (0, π/2]; tanθ is capped at the value the default
/// control floor allows, so θ = π/2 is safe. Profile-driven callers get the
/// same cap automatically through the profile's own floor.
pub fn reconstruct_fields(
    psi: &ComplexField,
    params: &PhysicalParams,
    theta: f64,
    theta_dot: f64,
) -> (ComplexField, ComplexField, ComplexField) {
    let mut state = ControlState::new(theta, theta_dot);
    let cap = params.g_sqrt_n() / DEFAULT_OMEGA_FLOOR;
    if state.tan_theta > cap {
        state.tan_theta = cap;
        state.tan_theta_theta_dot = cap * theta_dot;
    }
    reconstruct_from_state(psi, params, &state)
}

/// [`reconstruct_fields`] on a prepared state (profile-driven tanθ is already
/// clamped by the profile's Ω floor).
pub(crate) fn reconstruct_from_state(
    psi: &ComplexField,
    params: &PhysicalParams,
    state: &ControlState,
) -> (ComplexField, ComplexField, ComplexField) {
    let sin = state.sin_theta();
    let cos = state.cos_theta();
    let s2 = sin * sin;
    let pole = params.pole_ba() * params.pole_bc();
    let denom = Complex64::new(params.g2n(), 0.0) + pole * s2;
    let bright_gain = pole * (state.tan_theta * s2) / denom;
    let inv_sqrt_n = 1.0 / params.n_atoms.sqrt();

    let n = psi.grid.n_points;
    let mut e_field = ComplexField::zeros(psi.grid);
    let mut sigma_bc = ComplexField::zeros(psi.grid);
    let mut phi = ComplexField::zeros(psi.grid);
    for i in 0..n {
        let v = psi.values[i];
        let bright = bright_gain * v;
        e_field.values[i] = cos * v + sin * bright;
        sigma_bc.values[i] = -(sin * v - cos * bright) * inv_sqrt_n;
        phi.values[i] = bright;
    }
    (e_field, sigma_bc, phi)
}
