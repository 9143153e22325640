//! Two-photon absorption amplitudes and rates in the evanescent field.
//!
//! Matrix elements are returned already conjugated, the way they enter the
//! amplitudes: `m1* = −e^{iβ_s z}·d₁·|E_s|`, `m2* = −e^{iβ_i z}·d₂·|E_i|`.
//!
//! Detunings: `δ = ω_s − ω₁` for a monochromatic signal, `Δ = ω_s0 − ω₁`
//! for the mean signal frequency of an entangled pair.

use crate::constants::HBAR;
use crate::fiber::{normalize_mode, FiberError, FiberSpec, GuidedMode, ModeProfile};
use crate::numerics::{faddeeva_w, NumericsError, ERFI_ACCURACY_RADIUS};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

const RESONANCE_TOL: f64 = 1e-9;
const OVERLAP_TOL: f64 = 1e-11;
const MAX_TOROID_ASPECT: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TpaError {
    #[error("point r = {r:e} m lies inside the core (radius {radius:e} m)")]
    PointInsideCore { r: f64, radius: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("toroid aspect ratio d/D = {ratio} is not below {MAX_TOROID_ASPECT}")]
    AspectRatioViolation { ratio: f64 },
    #[error("discrete sum not converged: grid doubling changed the amplitude by {change:e} (relative), tolerance {tolerance:e}")]
    GridTooCoarse { change: f64, tolerance: f64 },
    #[error(transparent)]
    Fiber(#[from] FiberError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Ground `g` → intermediate `i` → upper `h` ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicLadder {
    pub omega1: f64,
    pub omega2: f64,
    /// Orientation-averaged dipole moments (C·m).
    pub d1: f64,
    pub d2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl AtomicLadder {
    pub fn validate(&self) -> Result<(), TpaError> {
        let fields = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(TpaError::InvalidInput(format!("atom.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Ladder placed so that a pair centered at `(omega_s0, omega_i0)` is
    /// two-photon resonant with mean intermediate detuning `detuning`.
    pub fn resonant_with(
        omega_s0: f64,
        omega_i0: f64,
        detuning: f64,
        d1: f64,
        d2: f64,
        gamma1: f64,
        gamma2: f64,
    ) -> Self {
        let omega1 = omega_s0 - detuning;
        Self { omega1, omega2: omega_s0 + omega_i0 - omega1, d1, d2, gamma1, gamma2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Entangled,
    Monochromatic,
}

/// Which mode velocity plays the role of `u` in the entangled kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityModel {
    /// `dω/dβ`
    #[default]
    Group,
    /// `ω/β`
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonPairSpec {
    pub omega_s0: f64,
    pub omega_i0: f64,
    /// Gaussian half-width of the frequency offset (rad/s); unused for
    /// monochromatic pairs.
    pub sigma: f64,
    pub kind: PairKind,
    pub velocity: VelocityModel,
}

impl PhotonPairSpec {
    pub fn validate(&self, atom: &AtomicLadder) -> Result<(), TpaError> {
        if !(self.omega_s0 > 0.0 && self.omega_i0 > 0.0) {
            return Err(TpaError::InvalidInput("pair center frequencies must be positive".into()));
        }
        if self.kind == PairKind::Entangled && !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(TpaError::InvalidInput(format!("entangled pair needs sigma > 0, got {}", self.sigma)));
        }
        let sum = self.omega_s0 + self.omega_i0;
        let target = atom.omega1 + atom.omega2;
        if ((sum - target) / target).abs() > RESONANCE_TOL {
            return Err(TpaError::InvalidInput(format!(
                "pair is not two-photon resonant: omega_s0 + omega_i0 = {sum:e}, omega1 + omega2 = {target:e}"
            )));
        }
        Ok(())
    }

    /// `Δ = ω_s0 − ω₁` (equals `δ` for a monochromatic signal).
    pub fn detuning(&self, atom: &AtomicLadder) -> f64 {
        self.omega_s0 - atom.omega1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VaporSpec {
    /// Atoms per m³.
    pub density: f64,
}

impl VaporSpec {
    pub fn validate(&self) -> Result<(), TpaError> {
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(TpaError::InvalidInput(format!("vapor density must be >= 0, got {}", self.density)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToroidSpec {
    pub principal_diameter: f64,
    pub minor_diameter: f64,
}

impl ToroidSpec {
    pub fn validate(&self) -> Result<(), TpaError> {
        if !(self.principal_diameter > 0.0 && self.minor_diameter > 0.0) {
            return Err(TpaError::InvalidInput("toroid diameters must be positive".into()));
        }
        let ratio = self.minor_diameter / self.principal_diameter;
        if ratio >= MAX_TOROID_ASPECT {
            return Err(TpaError::AspectRatioViolation { ratio });
        }
        Ok(())
    }

    pub fn circumference(&self) -> f64 {
        PI * self.principal_diameter
    }

    /// Straight-fiber stand-in: diameter `d_t`, quantization length `π·D_t`.
    pub fn ring_fiber(&self, template: &FiberSpec) -> FiberSpec {
        FiberSpec { diameter: self.minor_diameter, length: self.circumference(), ..*template }
    }
}

/// Per-atom rate at one exterior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub r: f64,
    pub phi: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpaReport {
    pub kind: PairKind,
    /// Vapor-integrated rate R₂ (s⁻¹), full azimuthal integration.
    pub rate: f64,
    /// Same rate with each intensity replaced by its azimuthal mean.
    pub rate_azimuthal_average: f64,
    /// Absorption amplitude at the surface, φ = 0, z = 0 (re, im).
    pub surface_amplitude: [f64; 2],
    pub per_atom_rate_map: Vec<RateSample>,
    /// `∫ |E_s|²|E_i|² dA` over the exterior (V⁴/m²).
    pub overlap_integral: f64,
    pub velocity: f64,
    pub beta_signal: f64,
    pub beta_idler: f64,
    pub detuning: f64,
    /// √2·L·σ/u (entangled only).
    pub enhancement_factor: Option<f64>,
    /// L·σ/(u√π) (entangled only).
    pub rate_ratio_factor: Option<f64>,
    /// u/(√2σ) (entangled only).
    pub separation: Option<f64>,
}

/// Parameters of the entangled spectral superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntangledParams {
    /// Mean detuning Δ (rad/s).
    pub detuning: f64,
    pub sigma: f64,
    pub length: f64,
    pub velocity: f64,
}

/// Conjugated matrix elements `(m1*, m2*)` at `(r, φ, z)` in J.
pub fn matrix_elements(
    mode_s: &GuidedMode,
    mode_i: &GuidedMode,
    atom: &AtomicLadder,
    r: f64,
    phi: f64,
    z: f64,
) -> Result<(Complex64, Complex64), TpaError> {
    let radius = mode_s.profile.radius;
    if r < radius {
        return Err(TpaError::PointInsideCore { r, radius });
    }
    let m1 = -Complex64::from_polar(atom.d1 * mode_s.field_magnitude(r, phi), mode_s.beta() * z);
    let m2 = -Complex64::from_polar(atom.d2 * mode_i.field_magnitude(r, phi), mode_i.beta() * z);
    Ok((m1, m2))
}

/// Steady-state amplitude of `|h⟩` for monochromatic driving.
pub fn amplitude_monochromatic(m1c: Complex64, m2c: Complex64, delta: f64, atom: &AtomicLadder) -> Complex64 {
    let denom = Complex64::new(2.0 * delta, atom.gamma1) * (HBAR * HBAR * atom.gamma2);
    Complex64::new(0.0, -4.0) * m1c * m2c / denom
}

fn kernel_argument(detuning: f64, sigma: f64, gamma1: f64) -> Result<Complex64, TpaError> {
    let z = Complex64::new(2.0 * detuning, gamma1) / (2.0 * SQRT_2 * sigma);
    if z.norm() > ERFI_ACCURACY_RADIUS {
        return Err(NumericsError::AccuracyDomainExceeded { modulus: z.norm(), limit: ERFI_ACCURACY_RADIUS }.into());
    }
    Ok(z)
}

/// Entangled amplitude in the continuum limit.
///
/// `−i·e^{−z²}(Erfi(z) − i) = −w(z)` with `z = (2Δ + iΓ₁)/(2√2σ)`, so the
/// closed form is evaluated through the Faddeeva function, which stays
/// finite where `e^{z²}` alone would overflow.
pub fn amplitude_entangled_continuum(
    m1c: Complex64,
    m2c: Complex64,
    params: &EntangledParams,
    atom: &AtomicLadder,
) -> Result<Complex64, TpaError> {
    let z = kernel_argument(params.detuning, params.sigma, atom.gamma1)?;
    let scale = (2.0 * PI.sqrt() * params.length / (params.sigma * params.velocity)).sqrt();
    Ok(-faddeeva_w(z) * scale * m1c * m2c / (HBAR * HBAR * atom.gamma2))
}

/// Uniform symmetric grid of frequency offsets `ν_j = (j − (n−1)/2)·h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    pub points: usize,
    pub spacing: f64,
}

impl FrequencyGrid {
    /// `points` samples covering `[−half_span, half_span]`.
    pub fn spanning(half_span: f64, points: usize) -> Self {
        let spacing = if points > 1 { 2.0 * half_span / (points - 1) as f64 } else { 0.0 };
        Self { points, spacing }
    }

    /// Grid over `±8σ` fine enough to resolve a Lorentzian of width Γ₁.
    pub fn resolving(sigma: f64, gamma1: f64) -> Self {
        let half = 8.0 * sigma;
        let points = ((2.0 * half / (0.2 * gamma1)).ceil() as usize + 1) | 1;
        Self::spanning(half, points)
    }

    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, spacing: 0.5 * self.spacing }
    }

    pub fn offset(&self, j: usize) -> f64 {
        (j as f64 - 0.5 * (self.points - 1) as f64) * self.spacing
    }
}

/// Entangled amplitude as the normalized discrete superposition
/// `Σ N e^{−ν²/(2σ²)}/(2Δ + 2ν + iΓ₁)·L/(2πu)·h`, `N = √(2√π u/(Lσ))`.
///
/// A one-point grid returns the bare `ν = 0` term with unit measure.
pub fn amplitude_entangled_discrete(
    m1c: Complex64,
    m2c: Complex64,
    params: &EntangledParams,
    atom: &AtomicLadder,
    grid: &FrequencyGrid,
) -> Complex64 {
    let norm = (2.0 * PI.sqrt() * params.velocity / (params.length * params.sigma)).sqrt();
    let measure = if grid.points > 1 {
        params.length / (2.0 * PI * params.velocity) * grid.spacing
    } else {
        1.0
    };
    let two_sigma2 = 2.0 * params.sigma * params.sigma;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    for j in 0..grid.points {
        let nu = grid.offset(j);
        let term = (-nu * nu / two_sigma2).exp() / Complex64::new(2.0 * (params.detuning + nu), atom.gamma1);
        // Kahan summation keeps ~10⁶-term sums at full precision
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Complex64::new(0.0, -4.0) * m1c * m2c / (HBAR * HBAR * atom.gamma2) * sum * norm * measure
}

/// Discrete amplitude with a grid-doubling check: errors with
/// `GridTooCoarse` when refinement moves the result by more than
/// `10·tolerance` (relative).
pub fn amplitude_entangled_discrete_checked(
    m1c: Complex64,
    m2c: Complex64,
    params: &EntangledParams,
    atom: &AtomicLadder,
    grid: &FrequencyGrid,
    tolerance: f64,
) -> Result<Complex64, TpaError> {
    let coarse = amplitude_entangled_discrete(m1c, m2c, params, atom, grid);
    let fine = amplitude_entangled_discrete(m1c, m2c, params, atom, &grid.refined());
    let change = (fine - coarse).norm() / fine.norm().max(f64::MIN_POSITIVE);
    if change > 10.0 * tolerance {
        return Err(TpaError::GridTooCoarse { change, tolerance });
    }
    Ok(fine)
}

/// `R = |A|²·Γ₂`.
pub fn rate_per_atom(amplitude: Complex64, atom: &AtomicLadder) -> f64 {
    amplitude.norm_sqr() * atom.gamma2
}

/// Per-atom rate divided by `|E_s|²|E_i|²`.
pub fn rate_coefficient(atom: &AtomicLadder, pair: &PhotonPairSpec, length: f64, velocity: f64) -> Result<f64, TpaError> {
    let dd2 = (atom.d1 * atom.d2).powi(2);
    let hbar4 = HBAR.powi(4);
    let detuning = pair.detuning(atom);
    match pair.kind {
        PairKind::Monochromatic => {
            Ok(16.0 * dd2 / (hbar4 * (4.0 * detuning * detuning + atom.gamma1.powi(2)) * atom.gamma2))
        }
        PairKind::Entangled => {
            let z = kernel_argument(detuning, pair.sigma, atom.gamma1)?;
            let w2 = faddeeva_w(z).norm_sqr();
            Ok(2.0 * PI.sqrt() * length / (pair.sigma * velocity) * w2 * dd2 / (hbar4 * atom.gamma2))
        }
    }
}

/// `L·σ/(u√π)`, the narrow-band entangled/monochromatic rate ratio.
pub fn rate_ratio_factor(length: f64, velocity: f64, sigma: f64) -> f64 {
    length * sigma / (velocity * PI.sqrt())
}

/// `√2·L·σ/u`, i.e. `L/s`.
pub fn enhancement_factor(fiber: &FiberSpec, velocity: f64, sigma: f64) -> f64 {
    SQRT_2 * fiber.length * sigma / velocity
}

/// Typical longitudinal pair separation `s = u/(√2σ)`.
pub fn pair_separation(velocity: f64, sigma: f64) -> f64 {
    velocity / (SQRT_2 * sigma)
}

/// Relative coincidence density `e^{−σ²Δz²/u²}` (1 at zero separation).
pub fn coincidence_profile(z_separation: f64, velocity: f64, sigma: f64) -> f64 {
    (-(sigma * z_separation / velocity).powi(2)).exp()
}

fn mode_velocity(mode: &GuidedMode, model: VelocityModel) -> f64 {
    match model {
        VelocityModel::Group => mode.group_velocity,
        VelocityModel::Phase => mode.omega() / mode.beta(),
    }
}

/// Exterior overlap integrals of two modes: full φ integration and the
/// azimuthally averaged variant.
///
/// With `|E|² = A cos²φ + B sin²φ` the φ integral is exact:
/// `∫|E_s|²|E_i|² dφ = 3π/4 (A_sA_i + B_sB_i) + π/4 (A_sB_i + B_sA_i)`.
pub fn exterior_overlap(mode_s: &GuidedMode, mode_i: &GuidedMode) -> Result<(f64, f64), TpaError> {
    let full = |r: f64| {
        let (as_, bs) = mode_s.intensity_coefficients(r);
        let (ai, bi) = mode_i.intensity_coefficients(r);
        (0.75 * PI * (as_ * ai + bs * bi) + 0.25 * PI * (as_ * bi + bs * ai)) * r
    };
    let averaged = |r: f64| {
        let (as_, bs) = mode_s.intensity_coefficients(r);
        let (ai, bi) = mode_i.intensity_coefficients(r);
        0.5 * PI * (as_ + bs) * (ai + bi) * r
    };
    let p: &ModeProfile = &mode_s.profile;
    Ok((p.exterior_integral(full, OVERLAP_TOL)?, p.exterior_integral(averaged, OVERLAP_TOL)?))
}

/// Solved modes and overlap integrals for one fiber and pair center, reused
/// across detunings, bandwidths, dipoles and densities.
#[derive(Debug, Clone, PartialEq)]
pub struct TpaEngine {
    pub fiber: FiberSpec,
    pub mode_signal: GuidedMode,
    pub mode_idler: GuidedMode,
    pub velocity_model: VelocityModel,
    pub overlap_full: f64,
    pub overlap_averaged: f64,
}

impl TpaEngine {
    pub fn new(fiber: &FiberSpec, omega_s0: f64, omega_i0: f64, velocity_model: VelocityModel) -> Result<Self, TpaError> {
        let mode_signal = normalize_mode(fiber, omega_s0)?;
        let mode_idler = if omega_i0 == omega_s0 { mode_signal } else { normalize_mode(fiber, omega_i0)? };
        Self::from_modes(fiber, mode_signal, mode_idler, velocity_model)
    }

    pub fn for_pair(fiber: &FiberSpec, pair: &PhotonPairSpec) -> Result<Self, TpaError> {
        Self::new(fiber, pair.omega_s0, pair.omega_i0, pair.velocity)
    }

    pub fn from_modes(
        fiber: &FiberSpec,
        mode_signal: GuidedMode,
        mode_idler: GuidedMode,
        velocity_model: VelocityModel,
    ) -> Result<Self, TpaError> {
        if (mode_signal.length - fiber.length).abs() > 1e-12 * fiber.length {
            return Err(TpaError::InvalidInput("modes must be normalized to the fiber length".into()));
        }
        let (overlap_full, overlap_averaged) = exterior_overlap(&mode_signal, &mode_idler)?;
        Ok(Self { fiber: *fiber, mode_signal, mode_idler, velocity_model, overlap_full, overlap_averaged })
    }

    /// The `u` entering the entangled kernel (taken from the signal mode).
    pub fn velocity(&self) -> f64 {
        mode_velocity(&self.mode_signal, self.velocity_model)
    }

    fn check_pair(&self, pair: &PhotonPairSpec) -> Result<(), TpaError> {
        let tol = 1e-12;
        if ((pair.omega_s0 - self.mode_signal.omega()) / pair.omega_s0).abs() > tol
            || ((pair.omega_i0 - self.mode_idler.omega()) / pair.omega_i0).abs() > tol
        {
            return Err(TpaError::InvalidInput("pair center frequencies do not match the solved modes".into()));
        }
        Ok(())
    }

    /// Surface amplitude at `(r, φ, z)`.
    pub fn amplitude_at(&self, atom: &AtomicLadder, pair: &PhotonPairSpec, r: f64, phi: f64, z: f64) -> Result<Complex64, TpaError> {
        let (m1c, m2c) = matrix_elements(&self.mode_signal, &self.mode_idler, atom, r, phi, z)?;
        let detuning = pair.detuning(atom);
        match pair.kind {
            PairKind::Monochromatic => Ok(amplitude_monochromatic(m1c, m2c, detuning, atom)),
            PairKind::Entangled => {
                let params = EntangledParams { detuning, sigma: pair.sigma, length: self.fiber.length, velocity: self.velocity() };
                amplitude_entangled_continuum(m1c, m2c, &params, atom)
            }
        }
    }

    /// Vapor-integrated rate `R₂ = ρ·L·C·∫|E_s|²|E_i|² dA`.
    pub fn total_rate(&self, atom: &AtomicLadder, pair: &PhotonPairSpec, vapor: &VaporSpec) -> Result<TpaReport, TpaError> {
        atom.validate()?;
        pair.validate(atom)?;
        vapor.validate()?;
        self.check_pair(pair)?;
        let u = self.velocity();
        let coeff = rate_coefficient(atom, pair, self.fiber.length, u)?;
        let scale = vapor.density * self.fiber.length * coeff;
        let a = self.fiber.radius();
        let mut map = Vec::new();
        for rf in [1.0, 1.5, 2.0, 3.0] {
            for phi in [0.0, 0.25 * PI, 0.5 * PI] {
                let r = rf * a;
                let rate = rate_per_atom(self.amplitude_at(atom, pair, r, phi, 0.0)?, atom);
                map.push(RateSample { r, phi, rate });
            }
        }
        let amp = self.amplitude_at(atom, pair, a, 0.0, 0.0)?;
        let entangled = pair.kind == PairKind::Entangled;
        Ok(TpaReport {
            kind: pair.kind,
            rate: scale * self.overlap_full,
            rate_azimuthal_average: scale * self.overlap_averaged,
            surface_amplitude: [amp.re, amp.im],
            per_atom_rate_map: map,
            overlap_integral: self.overlap_full,
            velocity: u,
            beta_signal: self.mode_signal.beta(),
            beta_idler: self.mode_idler.beta(),
            detuning: pair.detuning(atom),
            enhancement_factor: entangled.then(|| enhancement_factor(&self.fiber, u, pair.sigma)),
            rate_ratio_factor: entangled.then(|| rate_ratio_factor(self.fiber.length, u, pair.sigma)),
            separation: entangled.then(|| pair_separation(u, pair.sigma)),
        })
    }

    /// Narrow-band (`σ ≪ Δ`) limit of the entangled rate:
    /// `16·L·σ/(u√π)·(d₁d₂)²/(ħ⁴(4Δ² + Γ₁²)Γ₂)·ρ·L·∫|E_s E_i|² dA`.
    pub fn rate_asymptotic(&self, atom: &AtomicLadder, pair: &PhotonPairSpec, vapor: &VaporSpec) -> Result<f64, TpaError> {
        let detuning = pair.detuning(atom);
        let u = self.velocity();
        let dd2 = (atom.d1 * atom.d2).powi(2);
        let kernel = 16.0 * self.fiber.length * pair.sigma / (u * PI.sqrt()) * dd2
            / (HBAR.powi(4) * (4.0 * detuning * detuning + atom.gamma1.powi(2)) * atom.gamma2);
        Ok(kernel * vapor.density * self.fiber.length * self.overlap_full)
    }
}

/// Vapor-integrated rate from already-solved modes.
pub fn total_rate(
    mode_s0: &GuidedMode,
    mode_i0: &GuidedMode,
    atom: &AtomicLadder,
    pair: &PhotonPairSpec,
    fiber: &FiberSpec,
    vapor: &VaporSpec,
) -> Result<TpaReport, TpaError> {
    TpaEngine::from_modes(fiber, *mode_s0, *mode_i0, pair.velocity)?.total_rate(atom, pair, vapor)
}

/// Narrow-band asymptotic entangled rate from already-solved modes.
pub fn rate_asymptotic(
    mode_s0: &GuidedMode,
    mode_i0: &GuidedMode,
    atom: &AtomicLadder,
    pair: &PhotonPairSpec,
    fiber: &FiberSpec,
    vapor: &VaporSpec,
) -> Result<f64, TpaError> {
    TpaEngine::from_modes(fiber, *mode_s0, *mode_i0, pair.velocity)?.rate_asymptotic(atom, pair, vapor)
}

/// Bent-fiber estimate for a microtoroid: the cross-section is the straight
/// fiber of diameter `d_t`, and each photon is normalized to one photon per
/// circumference `π·D_t`. Two monochromatic photons at `omega`.
pub fn microtoroid_rate(
    toroid: &ToroidSpec,
    fiber_template: &FiberSpec,
    atom: &AtomicLadder,
    vapor: &VaporSpec,
    omega: f64,
) -> Result<TpaReport, TpaError> {
    toroid.validate()?;
    let ring = toroid.ring_fiber(fiber_template);
    let pair = PhotonPairSpec {
        omega_s0: omega,
        omega_i0: atom.omega1 + atom.omega2 - omega,
        sigma: 0.0,
        kind: PairKind::Monochromatic,
        velocity: VelocityModel::Group,
    };
    TpaEngine::for_pair(&ring, &pair)?.total_rate(atom, &pair, vapor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{wavelength_span_to_omega, wavelength_to_omega, ELEMENTARY_CHARGE};

    fn setup() -> (FiberSpec, AtomicLadder, PhotonPairSpec) {
        let fiber = FiberSpec::new(350e-9, 5e-3, 1.4537).unwrap();
        let w = wavelength_to_omega(778e-9);
        let delta = wavelength_span_to_omega(2.1e-9, 778e-9);
        let sigma = wavelength_span_to_omega(1e-9, 778e-9);
        let atom = AtomicLadder::resonant_with(w, w, delta, 0.223e-9 * ELEMENTARY_CHARGE, 0.0492e-9 * ELEMENTARY_CHARGE, 1e9, 1e9);
        let pair = PhotonPairSpec { omega_s0: w, omega_i0: w, sigma, kind: PairKind::Entangled, velocity: VelocityModel::Group };
        (fiber, atom, pair)
    }

    #[test]
    fn resonance_is_enforced() {
        let (_, mut atom, pair) = setup();
        assert!(pair.validate(&atom).is_ok());
        atom.omega2 *= 1.0 + 1e-6;
        assert!(pair.validate(&atom).is_err());
    }

    #[test]
    fn monochromatic_amplitude_basics() {
        let (_, atom, _) = setup();
        let m = Complex64::new(-1e-25, 0.0);
        assert_eq!(amplitude_monochromatic(Complex64::new(0.0, 0.0), m, 1e12, &atom), Complex64::new(0.0, 0.0));
        let p = amplitude_monochromatic(m, m, 6.54e12, &atom).norm();
        let q = amplitude_monochromatic(m, m, -6.54e12, &atom).norm();
        assert!((p / q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn separation_and_profile() {
        let s = pair_separation(2.63e8, 3.11e12);
        assert!((s - 5.98e-5).abs() < 0.01e-5);
        assert!((s * SQRT_2 * 3.11e12 / 2.63e8 - 1.0).abs() < 1e-15);
        assert_eq!(coincidence_profile(0.0, 2.6e8, 3e12), 1.0);
        assert!((coincidence_profile(s, 2.63e8, 3.11e12) - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn factor_conventions_differ_by_sqrt_two_pi() {
        let (fiber, _, _) = setup();
        let e = enhancement_factor(&fiber, 2.3e8, 3.1e12);
        let r = rate_ratio_factor(fiber.length, 2.3e8, 3.1e12);
        assert!((e / r / (2.0 * PI).sqrt() - 1.0).abs() < 1e-15);
        let s = pair_separation(2.3e8, 3.1e12);
        let unit = FiberSpec { length: s, ..fiber };
        assert!((enhancement_factor(&unit, 2.3e8, 3.1e12) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_elements_outside_core_only() {
        let (fiber, atom, pair) = setup();
        let eng = TpaEngine::for_pair(&fiber, &pair).unwrap();
        let err = matrix_elements(&eng.mode_signal, &eng.mode_idler, &atom, 0.5 * fiber.radius(), 0.0, 0.0);
        assert!(matches!(err, Err(TpaError::PointInsideCore { .. })));
        let (a, _) = matrix_elements(&eng.mode_signal, &eng.mode_idler, &atom, fiber.radius(), 0.3, 0.0).unwrap();
        let (b, _) = matrix_elements(&eng.mode_signal, &eng.mode_idler, &atom, fiber.radius(), 0.3, 1.7e-3).unwrap();
        assert!((a.norm() / b.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn toroid_aspect_is_checked() {
        let (fiber, atom, _) = setup();
        let bad = ToroidSpec { principal_diameter: 1e-6, minor_diameter: 350e-9 };
        let r = microtoroid_rate(&bad, &fiber, &atom, &VaporSpec { density: 1e18 }, atom.omega1);
        assert!(matches!(r, Err(TpaError::AspectRatioViolation { .. })));
    }

    #[test]
    fn domain_limit_propagates() {
        let (_, atom, _) = setup();
        let params = EntangledParams { detuning: 6.5e12, sigma: 1e10, length: 5e-3, velocity: 2.3e8 };
        let m = Complex64::new(-1e-25, 0.0);
        assert!(matches!(
            amplitude_entangled_continuum(m, m, &params, &atom),
            Err(TpaError::Numerics(NumericsError::AccuracyDomainExceeded { .. }))
        ));
    }
}
