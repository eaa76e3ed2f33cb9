//! Physical parameters, control-field profile, spatial grid, and the regime
//! checks behind the polariton transport equations.
//!
//! Everything is SI: rates and detunings in rad/s, lengths in m, times in s.
//! The mixing angle θ is defined through `tanθ = g√N/Ω`, so θ → π/2 as the
//! control field is switched off. A tiny floor on Ω keeps `tanθ` finite when
//! a profile drives the control arbitrarily close to zero.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::fourier::ComplexField;

/// Operationalization of "≫" in the regime conditions: a ratio of at least
/// ten counts as satisfied.
pub const REGIME_MARGIN: f64 = 10.0;

/// Default floor on the control Rabi frequency (rad/s). `tanθ` is then
/// bounded by `g√N / OMEGA_FLOOR`.
pub const DEFAULT_OMEGA_FLOOR: f64 = 1e-3;

/// Largest tolerated pulse amplitude at the grid edges at t = 0, relative to
/// the pulse peak. The domain is periodic, so a pulse touching an edge would
/// silently wrap.
pub const BOUNDARY_CLEARANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    /// A parameter violates a physical-validity invariant.
    #[error("non-physical parameter: {name} must be {requirement} (got {value:e})")]
    NonPhysical {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
    /// Grid point count must be a power of two with at least 256 points.
    #[error("grid must have a power-of-two point count of at least 256 (got {0})")]
    BadGridSize(usize),
    /// Two fields (or a field and an engine) live on different grids.
    #[error("operands are sampled on different spatial grids")]
    GridMismatch,
    /// The input pulse does not fit the periodic domain with clearance.
    #[error(
        "input pulse touches the grid boundary (edge/peak amplitude ratio {ratio:e}, limit {limit:e})"
    )]
    PulseAtBoundary { ratio: f64, limit: f64 },
    /// Snapshot cadence and horizon must be whole multiples of dt.
    #[error("{name} must be a whole multiple of dt")]
    TimingMisaligned { name: &'static str },
    /// dt must resolve the control switching (dt ≤ 1/(10·switch_rate)).
    #[error("dt {dt:e} s is too coarse for switch rate {switch_rate:e} 1/s (need dt <= {limit:e})")]
    TimeStepTooCoarse {
        dt: f64,
        switch_rate: f64,
        limit: f64,
    },
}

/// Medium and field constants of the Λ system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Atom–field coupling constant g (rad/s).
    pub g: f64,
    /// Number of atoms N in the quantization volume.
    pub n_atoms: f64,
    /// Optical coherence decay rate γ_ba (rad/s).
    pub gamma_ba: f64,
    /// Ground-state coherence decay rate γ_bc (rad/s); the non-ideal term
    /// that damps the stored excitation.
    pub gamma_bc: f64,
    /// One-photon (control) detuning Δ (rad/s).
    pub delta: f64,
    /// Extra two-photon (probe) detuning Δ_p (rad/s); the probe is detuned
    /// by Δ + Δ_p in total.
    pub delta_p: f64,
    /// Vacuum speed of light (m/s). Kept as a parameter so scenarios can fix
    /// the round 3×10⁸ m/s that the preset catalog assumes.
    pub c_light: f64,
    /// Length L of the atomic cell (m).
    pub cell_length: f64,
}

impl Default for PhysicalParams {
    /// Reference parameter set for a warm-vapor-scale Λ medium: g = 10⁶,
    /// N = 10⁸ (so g²N = 10²⁰ and g√N = 10¹⁰), γ_ba = 10⁸, γ_bc = 10⁴,
    /// resonant fields, 5 mm cell.
    fn default() -> Self {
        PhysicalParams {
            g: 1e6,
            n_atoms: 1e8,
            gamma_ba: 1e8,
            gamma_bc: 1e4,
            delta: 0.0,
            delta_p: 0.0,
            c_light: 3e8,
            cell_length: 5e-3,
        }
    }
}

impl PhysicalParams {
    /// Collective coupling g²N (rad²/s²).
    pub fn g2n(&self) -> f64 {
        self.g * self.g * self.n_atoms
    }

    /// Collective Rabi scale g√N (rad/s); `Ω = g√N · cotθ`.
    pub fn g_sqrt_n(&self) -> f64 {
        self.g * self.n_atoms.sqrt()
    }

    /// `i(Δ+Δ_p) + γ_ba`, the optical-coherence pole.
    pub fn pole_ba(&self) -> Complex64 {
        Complex64::new(self.gamma_ba, self.delta + self.delta_p)
    }

    /// `iΔ_p + γ_bc`, the ground-state-coherence pole.
    pub fn pole_bc(&self) -> Complex64 {
        Complex64::new(self.gamma_bc, self.delta_p)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let positive: [(&'static str, f64); 4] = [
            ("g", self.g),
            ("n_atoms", self.n_atoms),
            ("c_light", self.c_light),
            ("cell_length", self.cell_length),
        ];
        for (name, value) in positive {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::NonPhysical {
                    name,
                    requirement: "finite and > 0",
                    value,
                });
            }
        }
        let nonnegative = [("gamma_ba", self.gamma_ba), ("gamma_bc", self.gamma_bc)];
        for (name, value) in nonnegative {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::NonPhysical {
                    name,
                    requirement: "finite and >= 0",
                    value,
                });
            }
        }
        for (name, value) in [("delta", self.delta), ("delta_p", self.delta_p)] {
            if !value.is_finite() {
                return Err(ModelError::NonPhysical {
                    name,
                    requirement: "finite",
                    value,
                });
            }
        }
        Ok(())
    }
}

/// Time course of the control field, expressed through `u(t) = cotθ(t)`
/// so that `Ω(t) = g√N · u(t)`.
#[derive(Clone)]
pub struct ControlProfile {
    pub shape: ProfileShape,
    /// Floor on Ω (rad/s); u(t) is clamped below at `omega_floor / g√N`.
    pub omega_floor: f64,
}

#[derive(Clone)]
pub enum ProfileShape {
    /// Storage cycle with smooth switch-off at `t_off` and switch-on at
    /// `t_on`:
    /// `u(t) = u_scale · (1 − ½·tanh[r(t−t_off)] + ½·tanh[r(t−t_on)])`.
    TanhSwitch {
        /// Plateau value of cotθ while the control field is on.
        u_scale: f64,
        /// Switching rate r (1/s); the ramps have ~1/r time scale.
        switch_rate: f64,
        /// Center of the switch-off ramp (s).
        t_off: f64,
        /// Center of the switch-on ramp (s).
        t_on: f64,
    },
    /// Time-independent mixing angle θ ∈ (0, π/2].
    ConstantTheta { theta: f64 },
    /// User-supplied cotθ(t). The angle derivative is taken by central
    /// finite differences, so the supplied curve should be smooth on the
    /// nanosecond scale.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ProfileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileShape::TanhSwitch {
                u_scale,
                switch_rate,
                t_off,
                t_on,
            } => f
                .debug_struct("TanhSwitch")
                .field("u_scale", u_scale)
                .field("switch_rate", switch_rate)
                .field("t_off", t_off)
                .field("t_on", t_on)
                .finish(),
            ProfileShape::ConstantTheta { theta } => f
                .debug_struct("ConstantTheta")
                .field("theta", theta)
                .finish(),
            ProfileShape::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl PartialEq for ProfileShape {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (
                ProfileShape::TanhSwitch {
                    u_scale: a,
                    switch_rate: b,
                    t_off: c,
                    t_on: d,
                },
                ProfileShape::TanhSwitch {
                    u_scale: a2,
                    switch_rate: b2,
                    t_off: c2,
                    t_on: d2,
                },
            ) => a == a2 && b == b2 && c == c2 && d == d2,
            (
                ProfileShape::ConstantTheta { theta: a },
                ProfileShape::ConstantTheta { theta: b },
            ) => a == b,
            (ProfileShape::Custom(a), ProfileShape::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Debug for ControlProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProfile")
            .field("shape", &self.shape)
            .field("omega_floor", &self.omega_floor)
            .finish()
    }
}

impl PartialEq for ControlProfile {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.omega_floor == other.omega_floor
    }
}

/// Mixing angle and its derivatives at one instant. `tan_theta_theta_dot`
/// carries the product `tanθ·θ̇` evaluated without forming the (possibly
/// enormous) tangent: for profile-driven states it is `−u′/(u(1+u²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlState {
    /// Mixing angle θ (rad), in (0, π/2].
    pub theta: f64,
    /// dθ/dt (rad/s).
    pub theta_dot: f64,
    /// tanθ, clamped through the Ω floor for profile-driven states.
    pub tan_theta: f64,
    /// tanθ·θ̇ (1/s).
    pub tan_theta_theta_dot: f64,
}

impl ControlState {
    /// Build a state directly from θ and θ̇. Intended for angles away from
    /// π/2 (randomized checks, fixed-angle studies); profile-driven
    /// evaluation should go through [`ControlProfile::state_at`], which
    /// handles the θ → π/2 limit without overflow.
    pub fn new(theta: f64, theta_dot: f64) -> Self {
        let tan_theta = theta.tan();
        ControlState {
            theta,
            theta_dot,
            tan_theta,
            tan_theta_theta_dot: tan_theta * theta_dot,
        }
    }

    pub fn sin_theta(&self) -> f64 {
        self.theta.sin()
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }
}

/// 1/cosh²x without overflow for large |x|.
fn sech_sq(x: f64) -> f64 {
    let s = 1.0 / x.cosh();
    s * s
}

impl ControlProfile {
    pub fn tanh_switch(u_scale: f64, switch_rate: f64, t_off: f64, t_on: f64) -> Self {
        ControlProfile {
            shape: ProfileShape::TanhSwitch {
                u_scale,
                switch_rate,
                t_off,
                t_on,
            },
            omega_floor: DEFAULT_OMEGA_FLOOR,
        }
    }

    pub fn constant_theta(theta: f64) -> Self {
        ControlProfile {
            shape: ProfileShape::ConstantTheta { theta },
            omega_floor: DEFAULT_OMEGA_FLOOR,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !self.omega_floor.is_finite() || self.omega_floor <= 0.0 {
            return Err(ModelError::NonPhysical {
                name: "omega_floor",
                requirement: "finite and > 0",
                value: self.omega_floor,
            });
        }
        match self.shape {
            ProfileShape::TanhSwitch {
                u_scale,
                switch_rate,
                t_off,
                t_on,
            } => {
                if !u_scale.is_finite() || u_scale <= 0.0 {
                    return Err(ModelError::NonPhysical {
                        name: "u_scale",
                        requirement: "finite and > 0",
                        value: u_scale,
                    });
                }
                if !switch_rate.is_finite() || switch_rate <= 0.0 {
                    return Err(ModelError::NonPhysical {
                        name: "switch_rate",
                        requirement: "finite and > 0",
                        value: switch_rate,
                    });
                }
                for (name, value) in [("t_off", t_off), ("t_on", t_on)] {
                    if !value.is_finite() {
                        return Err(ModelError::NonPhysical {
                            name,
                            requirement: "finite",
                            value,
                        });
                    }
                }
                if t_off >= t_on {
                    return Err(ModelError::NonPhysical {
                        name: "t_on",
                        requirement: "greater than t_off",
                        value: t_on,
                    });
                }
            }
            ProfileShape::ConstantTheta { theta } => {
                if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
                    return Err(ModelError::NonPhysical {
                        name: "theta",
                        requirement: "in (0, pi/2]",
                        value: theta,
                    });
                }
            }
            ProfileShape::Custom(_) => {}
        }
        Ok(())
    }

    /// Raw (unclamped) u(t) = cotθ(t) of the shape.
    fn u_raw(&self, t: f64) -> f64 {
        match &self.shape {
            ProfileShape::TanhSwitch {
                u_scale,
                switch_rate,
                t_off,
                t_on,
            } => {
                u_scale
                    * (1.0 - 0.5 * (switch_rate * (t - t_off)).tanh()
                        + 0.5 * (switch_rate * (t - t_on)).tanh())
            }
            ProfileShape::ConstantTheta { theta } => 1.0 / theta.tan(),
            ProfileShape::Custom(u) => u(t),
        }
    }

    /// du/dt of the raw shape.
    fn u_dot_raw(&self, t: f64) -> f64 {
        match &self.shape {
            ProfileShape::TanhSwitch {
                u_scale,
                switch_rate,
                t_off,
                t_on,
            } => {
                0.5 * u_scale
                    * switch_rate
                    * (sech_sq(switch_rate * (t - t_on)) - sech_sq(switch_rate * (t - t_off)))
            }
            ProfileShape::ConstantTheta { .. } => 0.0,
            ProfileShape::Custom(u) => {
                // Smooth profiles vary on microsecond scales; a nanosecond
                // central difference is far below that.
                let h = 1e-9;
                (u(t + h) - u(t - h)) / (2.0 * h)
            }
        }
    }

    /// Clamp floor on u for the given medium.
    pub fn u_floor(&self, params: &PhysicalParams) -> f64 {
        self.omega_floor / params.g_sqrt_n()
    }

    /// cotθ(t) after clamping at the Ω floor.
    pub fn cot_theta(&self, params: &PhysicalParams, t: f64) -> f64 {
        self.u_raw(t).max(self.u_floor(params))
    }

    /// Mixing angle θ(t) = arccot(u(t)) ∈ (0, π/2).
    pub fn theta(&self, params: &PhysicalParams, t: f64) -> f64 {
        // atan2(1, u) is arccot(u) for u > 0, stable for u anywhere in
        // [u_floor, ∞).
        1f64.atan2(self.cot_theta(params, t))
    }

    /// Control Rabi frequency Ω(t) = g√N · cotθ(t) (rad/s).
    pub fn omega(&self, params: &PhysicalParams, t: f64) -> f64 {
        params.g_sqrt_n() * self.cot_theta(params, t)
    }

    /// dθ/dt (rad/s). Zero wherever the clamp is active (the angle is pinned
    /// there) and for constant profiles.
    pub fn theta_dot(&self, params: &PhysicalParams, t: f64) -> f64 {
        let u = self.u_raw(t);
        if u <= self.u_floor(params) {
            return 0.0;
        }
        -self.u_dot_raw(t) / (1.0 + u * u)
    }

    /// Full angle state at time t, with the product tanθ·θ̇ evaluated as
    /// −u′/(u(1+u²)) so the θ → π/2 limit never forms an overflowing
    /// tangent.
    pub fn state_at(&self, params: &PhysicalParams, t: f64) -> ControlState {
        let floor = self.u_floor(params);
        let u_raw = self.u_raw(t);
        let clamped = u_raw <= floor;
        let u = u_raw.max(floor);
        let theta = 1f64.atan2(u);
        let (theta_dot, tan_theta_theta_dot) = if clamped {
            (0.0, 0.0)
        } else {
            let du = self.u_dot_raw(t);
            (-du / (1.0 + u * u), -du / (u * (1.0 + u * u)))
        };
        ControlState {
            theta,
            theta_dot,
            tan_theta: 1.0 / u,
            tan_theta_theta_dot,
        }
    }
}

/// Uniform periodic grid of `n_points` samples over `[z_min, z_max)`; the
/// upper edge is the wrap point, not a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n_points: usize,
}

impl SpatialGrid {
    pub fn new(z_min: f64, z_max: f64, n_points: usize) -> Result<Self, ModelError> {
        let grid = SpatialGrid {
            z_min,
            z_max,
            n_points,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.n_points >= 256 && self.n_points.is_power_of_two()) {
            return Err(ModelError::BadGridSize(self.n_points));
        }
        if !self.z_min.is_finite() || !self.z_max.is_finite() || self.z_max <= self.z_min {
            return Err(ModelError::NonPhysical {
                name: "z_max",
                requirement: "finite and greater than z_min",
                value: self.z_max,
            });
        }
        Ok(())
    }

    /// Domain length (m), one full period.
    pub fn length(&self) -> f64 {
        self.z_max - self.z_min
    }

    /// Sample spacing (m).
    pub fn dz(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    /// Spacing of the spatial-frequency comb (rad/m).
    pub fn dk(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length()
    }

    pub fn z_at(&self, i: usize) -> f64 {
        self.z_min + i as f64 * self.dz()
    }

    /// Spatial frequency of DFT bin `i`, in the standard ordering
    /// `[0, 1, …, N/2−1, −N/2, …, −1] · dk`.
    pub fn k_at(&self, i: usize) -> f64 {
        let n = self.n_points;
        let m = if i < n / 2 {
            i as isize
        } else {
            i as isize - n as isize
        };
        m as f64 * self.dk()
    }

    pub fn z_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.z_at(i)).collect()
    }

    pub fn k_values(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.k_at(i)).collect()
    }
}

/// A complete, validated simulation setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: PhysicalParams,
    pub profile: ControlProfile,
    pub grid: SpatialGrid,
    /// Polariton envelope Ψ(z, 0) on `grid`.
    pub input_pulse: ComplexField,
    /// Simulation horizon (s).
    pub t_end: f64,
    /// Quadrature step for the exponent integrals (s).
    pub dt: f64,
    /// Field-snapshot cadence (s); must divide t_end.
    pub snapshot_every: f64,
}

fn is_whole_multiple(a: f64, b: f64) -> bool {
    let ratio = a / b;
    (ratio - ratio.round()).abs() <= 1e-9 * ratio.round().max(1.0)
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.params.validate()?;
        self.profile.validate()?;
        self.grid.validate()?;
        if self.input_pulse.grid != self.grid {
            return Err(ModelError::GridMismatch);
        }
        let peak = self.input_pulse.peak_abs();
        if !peak.is_finite() || peak <= 0.0 {
            return Err(ModelError::NonPhysical {
                name: "input_pulse",
                requirement: "finite with a nonzero peak",
                value: peak,
            });
        }
        let n = self.grid.n_points;
        let edge = self.input_pulse.values[0]
            .norm()
            .max(self.input_pulse.values[n - 1].norm());
        let ratio = edge / peak;
        if ratio >= BOUNDARY_CLEARANCE {
            return Err(ModelError::PulseAtBoundary {
                ratio,
                limit: BOUNDARY_CLEARANCE,
            });
        }
        for (name, value) in [
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("snapshot_every", self.snapshot_every),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(ModelError::NonPhysical {
                    name,
                    requirement: "finite and > 0",
                    value,
                });
            }
        }
        if !is_whole_multiple(self.snapshot_every, self.dt) {
            return Err(ModelError::TimingMisaligned {
                name: "snapshot_every",
            });
        }
        if !is_whole_multiple(self.t_end, self.dt) {
            return Err(ModelError::TimingMisaligned { name: "t_end" });
        }
        if !is_whole_multiple(self.t_end, self.snapshot_every) {
            return Err(ModelError::TimingMisaligned { name: "t_end" });
        }
        if let ProfileShape::TanhSwitch { switch_rate, .. } = self.profile.shape {
            let limit = 1.0 / (10.0 * switch_rate);
            if self.dt > limit * (1.0 + 1e-12) {
                return Err(ModelError::TimeStepTooCoarse {
                    dt: self.dt,
                    switch_rate,
                    limit,
                });
            }
        }
        Ok(())
    }

    /// Real Gaussian envelope `amplitude · exp(−((z−center)/width)²)`
    /// sampled on `grid` — the canonical input pulse shape.
    pub fn gaussian_pulse(
        grid: SpatialGrid,
        amplitude: f64,
        width: f64,
        center: f64,
    ) -> ComplexField {
        let values = (0..grid.n_points)
            .map(|i| {
                let x = (grid.z_at(i) - center) / width;
                Complex64::new(amplitude * (-x * x).exp(), 0.0)
            })
            .collect();
        ComplexField { grid, values }
    }
}

/// Result of the pulse-scale adiabaticity test. The closed-form transport
/// coefficients assume the pulse is long enough (spatially) and the control
/// switching slow enough that the bright state follows the dark one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticCheck {
    /// Both margins at least [`REGIME_MARGIN`].
    pub ok: bool,
    /// Minimum admissible pulse length √(γ_ba·c·L/g²N) (m).
    pub pulse_length_min: f64,
    /// pulse_length / pulse_length_min.
    pub pulse_margin: f64,
    /// Minimum admissible switching time (γ_ba/g²N)·(v_g0/c) (s).
    pub switch_time_min: f64,
    /// switch_time / switch_time_min.
    pub switch_margin: f64,
}

/// Check the two adiabaticity conditions for a pulse of spatial length
/// `pulse_length` (m), a control ramp of duration `switch_time` (s), and
/// initial group velocity `v_g0` (m/s).
pub fn check_adiabatic(
    params: &PhysicalParams,
    pulse_length: f64,
    switch_time: f64,
    v_g0: f64,
) -> AdiabaticCheck {
    let pulse_length_min =
        (params.gamma_ba * params.c_light * params.cell_length / params.g2n()).sqrt();
    let switch_time_min = (params.gamma_ba / params.g2n()) * (v_g0 / params.c_light);
    let pulse_margin = pulse_length / pulse_length_min;
    let switch_margin = switch_time / switch_time_min;
    AdiabaticCheck {
        ok: pulse_margin >= REGIME_MARGIN && switch_margin >= REGIME_MARGIN,
        pulse_length_min,
        pulse_margin,
        switch_time_min,
        switch_margin,
    }
}

/// Result of the collective-coupling dominance test
/// `g²N ≫ |(i(Δ+Δ_p)+γ_ba)(iΔ_p+γ_bc)|`, which justifies dropping the
/// product of coherence poles against g²N in the reduced coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighDensityCheck {
    pub ok: bool,
    /// g²N over the pole-product magnitude; infinite when the product
    /// vanishes (e.g. γ_bc = Δ_p = 0).
    pub ratio: f64,
}

pub fn check_high_density(params: &PhysicalParams) -> HighDensityCheck {
    let product = (params.pole_ba() * params.pole_bc()).norm();
    let ratio = params.g2n() / product;
    HighDensityCheck {
        ok: ratio >= REGIME_MARGIN,
        ratio,
    }
}
