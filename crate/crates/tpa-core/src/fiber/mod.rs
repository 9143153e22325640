//! Fundamental (HE11) guided mode of a step-index cylinder in vacuum.
//!
//! Fields follow the exact vector solution. With `U = h·a`, `W = q·a`,
//! `h² = n²k² − β²` and `q² = β² − k²`, the quasi-linearly polarized
//! profile is `E = (e_r(r) cos φ, e_φ(r) sin φ, i·e_z(r) cos φ)`.

use crate::constants::{EPSILON_0, HBAR, SINGLE_MODE_CUTOFF_V, SPEED_OF_LIGHT};
use crate::numerics::{
    bessel_j012, bessel_k012_scaled, find_root_bracketed, integrate_with, try_differentiate_central,
    Interval, NumericsError, QuadratureOptions,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

const SCAN_POINTS: usize = 512;
const BRACKET_GUARD: f64 = 1e-9;
const EXTERIOR_FLOOR: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-11;
/// Relative step for the group-velocity stencil.
pub const GROUP_VELOCITY_STEP: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FiberError {
    #[error("invalid fiber specification: {0}")]
    InvalidSpec(String),
    #[error("no guided HE11 root for D = {diameter:e} m at omega = {omega:e} rad/s")]
    NoGuidedMode { diameter: f64, omega: f64 },
    #[error("beta = {beta:e} rad/m is outside the guided bound ({lo:e}, {hi:e})")]
    InvalidEigenvalue { beta: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Refractive index model of the core.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoreIndex {
    Constant(f64),
    /// Three-term Sellmeier fit for fused silica (Malitson).
    FusedSilica,
}

impl CoreIndex {
    pub fn at(&self, omega: f64) -> f64 {
        match *self {
            CoreIndex::Constant(n) => n,
            CoreIndex::FusedSilica => {
                let l2 = (2.0 * PI * SPEED_OF_LIGHT / omega * 1e6).powi(2);
                let terms = [
                    (0.696_166_3, 0.068_404_3),
                    (0.407_942_6, 0.116_241_4),
                    (0.897_479_4, 9.896_161),
                ];
                let s: f64 = terms.iter().map(|(b, c)| b * l2 / (l2 - c * c)).sum();
                (1.0 + s).sqrt()
            }
        }
    }
}

/// How the single-photon field amplitude is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationConvention {
    /// `(ε₀/4)·L·∫n²|E|² dA = ħω/2`: `E` is a complex amplitude, so the
    /// time-averaged electric energy carries the extra 1/2.
    #[default]
    ComplexAmplitude,
    /// `(ε₀/2)·L·∫n²|E|² dA = ħω/2`.
    RmsAmplitude,
}

impl NormalizationConvention {
    fn energy_prefactor(self) -> f64 {
        match self {
            Self::ComplexAmplitude => 0.25,
            Self::RmsAmplitude => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    /// Waist diameter D (m).
    pub diameter: f64,
    /// Interaction / quantization length L (m).
    pub length: f64,
    pub core_index: CoreIndex,
    pub normalization: NormalizationConvention,
}

impl FiberSpec {
    pub fn new(diameter: f64, length: f64, core_index: f64) -> Result<Self, FiberError> {
        let spec = Self {
            diameter,
            length,
            core_index: CoreIndex::Constant(core_index),
            normalization: NormalizationConvention::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.diameter
    }

    pub fn validate(&self) -> Result<(), FiberError> {
        if !(self.diameter > 0.0 && self.diameter.is_finite()) {
            return Err(FiberError::InvalidSpec(format!("diameter must be positive, got {}", self.diameter)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(FiberError::InvalidSpec(format!("length must be positive, got {}", self.length)));
        }
        if let CoreIndex::Constant(n) = self.core_index {
            if !(n > 1.0 && n.is_finite()) {
                return Err(FiberError::InvalidSpec(format!("core index must exceed 1, got {n}")));
            }
        }
        Ok(())
    }

    /// Normalized frequency `V = k·a·√(n² − 1)`.
    pub fn v_parameter(&self, omega: f64) -> f64 {
        let n = self.core_index.at(omega);
        omega / SPEED_OF_LIGHT * self.radius() * (n * n - 1.0).sqrt()
    }

    fn with_frozen_index(&self, omega: f64) -> Self {
        Self {
            core_index: CoreIndex::Constant(self.core_index.at(omega)),
            ..*self
        }
    }
}

/// True iff only HE11 propagates (`V` below the TE01/TM01 cutoff).
pub fn single_mode_check(fiber: &FiberSpec, omega: f64) -> bool {
    fiber.v_parameter(omega) < SINGLE_MODE_CUTOFF_V
}

// Characteristic function in the pole-free product form, parameterized by U.
// K functions enter exponentially scaled; this rescales F by a positive
// factor only.
fn dispersion_in_u(u: f64, v: f64, n: f64, k: f64, a: f64) -> f64 {
    let w = (v * v - u * u).max(0.0).sqrt();
    let (j0, j1, _) = bessel_j012(u);
    let (k0, k1, _) = bessel_k012_scaled(w);
    let j1p = j0 - j1 / u;
    let k1p = -k0 - k1 / w;
    let pa = j1p * w * k1;
    let pb = k1p * u * j1;
    let beta2 = n * n * k * k - (u / a).powi(2);
    let cross = beta2 / (k * k) * v.powi(4) * (j1 * k1).powi(2) / (u * u * w * w);
    (pa + pb) * (n * n * pa + pb) - cross
}

/// HE11 characteristic function at `beta` (zero at a guided eigenvalue).
pub fn dispersion_function(fiber: &FiberSpec, omega: f64, beta: f64) -> Result<f64, FiberError> {
    let n = fiber.core_index.at(omega);
    let k = omega / SPEED_OF_LIGHT;
    check_guided_bound(beta, k, n)?;
    let a = fiber.radius();
    let u = a * (n * n * k * k - beta * beta).sqrt();
    Ok(dispersion_in_u(u, fiber.v_parameter(omega), n, k, a))
}

fn check_guided_bound(beta: f64, k: f64, n: f64) -> Result<(), FiberError> {
    if beta > k && beta < n * k {
        Ok(())
    } else {
        Err(FiberError::InvalidEigenvalue { beta, lo: k, hi: n * k })
    }
}

/// Fundamental-mode propagation constant β (rad/m).
pub fn solve_propagation_constant(fiber: &FiberSpec, omega: f64) -> Result<f64, FiberError> {
    fiber.validate()?;
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(FiberError::InvalidSpec(format!("omega must be positive, got {omega}")));
    }
    let n = fiber.core_index.at(omega);
    if !(n > 1.0) {
        return Err(FiberError::InvalidSpec(format!("core index {n} does not exceed cladding")));
    }
    let k = omega / SPEED_OF_LIGHT;
    let a = fiber.radius();
    let v = fiber.v_parameter(omega);
    let u_of_beta = |beta: f64| a * (n * n * k * k - beta * beta).max(0.0).sqrt();
    let u_lo = u_of_beta(n * k * (1.0 - BRACKET_GUARD));
    let u_hi = u_of_beta(k * (1.0 + BRACKET_GUARD));
    let f = |u: f64| dispersion_in_u(u, v, n, k, a);
    let step = (u_hi - u_lo) / (SCAN_POINTS - 1) as f64;
    let mut prev_u = u_lo;
    let mut prev_f = f(u_lo);
    for i in 1..SCAN_POINTS {
        let u = if i == SCAN_POINTS - 1 { u_hi } else { u_lo + step * i as f64 };
        let fu = f(u);
        if prev_f == 0.0 {
            return Ok(beta_from_u(prev_u, n, k, a));
        }
        if prev_f.signum() != fu.signum() {
            let root = find_root_bracketed(f, prev_u, u, 4.0 * f64::EPSILON * u)?;
            return Ok(beta_from_u(root, n, k, a));
        }
        prev_u = u;
        prev_f = fu;
    }
    Err(FiberError::NoGuidedMode { diameter: fiber.diameter, omega })
}

fn beta_from_u(u: f64, n: f64, k: f64, a: f64) -> f64 {
    (n * n * k * k - (u / a).powi(2)).sqrt()
}

/// Unnormalized HE11 profile at a fixed (ω, β).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProfile {
    pub omega: f64,
    pub beta: f64,
    pub core_index: f64,
    pub radius: f64,
    h: f64,
    q: f64,
    s: f64,
    j1_u: f64,
    k1s_w: f64,
}

impl ModeProfile {
    pub fn new(fiber: &FiberSpec, omega: f64, beta: f64) -> Result<Self, FiberError> {
        let n = fiber.core_index.at(omega);
        let k = omega / SPEED_OF_LIGHT;
        check_guided_bound(beta, k, n)?;
        let a = fiber.radius();
        let h = (n * n * k * k - beta * beta).sqrt();
        let q = (beta * beta - k * k).sqrt();
        let (u, w) = (h * a, q * a);
        let (j0, j1, _) = bessel_j012(u);
        let (k0, k1, _) = bessel_k012_scaled(w);
        let jr = (j0 - j1 / u) / (u * j1);
        let kr = (-k0 - k1 / w) / (w * k1);
        let s = (1.0 / (u * u) + 1.0 / (w * w)) / (jr + kr);
        Ok(Self { omega, beta, core_index: n, radius: a, h, q, s, j1_u: j1, k1s_w: k1 })
    }

    /// Core parameter `U = h·a`.
    pub fn u(&self) -> f64 {
        self.h * self.radius
    }

    /// Cladding parameter `W = q·a`.
    pub fn w(&self) -> f64 {
        self.q * self.radius
    }

    /// Radial amplitudes `(e_r, e_φ, e_z)`; the full field is
    /// `(e_r cos φ, e_φ sin φ, i e_z cos φ)`.
    pub fn radial_amplitudes(&self, r: f64) -> [f64; 3] {
        let (ps, ms) = (0.5 * (1.0 - self.s), 0.5 * (1.0 + self.s));
        if r < self.radius {
            let x = self.h * r;
            let (j0, j1, j2) = bessel_j012(x);
            let c = self.beta / self.h / self.j1_u;
            [-c * (ps * j0 - ms * j2), c * (ps * j0 + ms * j2), j1 / self.j1_u]
        } else {
            let x = self.q * r;
            let (k0, k1, k2) = bessel_k012_scaled(x);
            let decay = (-(x - self.w())).exp() / self.k1s_w;
            let c = self.beta / self.q * decay;
            [-c * (ps * k0 + ms * k2), c * (ps * k0 - ms * k2), k1 * decay]
        }
    }

    /// Complex field vector `(E_r, E_φ, E_z)` at `(r, φ)`.
    pub fn field(&self, r: f64, phi: f64) -> [Complex64; 3] {
        let [er, ep, ez] = self.radial_amplitudes(r);
        let (sn, cs) = phi.sin_cos();
        [Complex64::new(er * cs, 0.0), Complex64::new(ep * sn, 0.0), Complex64::new(0.0, ez * cs)]
    }

    /// `(A, B)` with `|E(r, φ)|² = A cos²φ + B sin²φ`.
    pub fn intensity_coefficients(&self, r: f64) -> (f64, f64) {
        let [er, ep, ez] = self.radial_amplitudes(r);
        (er * er + ez * ez, ep * ep)
    }

    fn index_at(&self, r: f64) -> f64 {
        if r < self.radius {
            self.core_index
        } else {
            1.0
        }
    }

    /// `∫ n²|e|² dA` over the cross-section (unnormalized profile).
    pub fn weighted_area_integral(&self) -> Result<f64, FiberError> {
        let g = |r: f64| {
            let (a, b) = self.intensity_coefficients(r);
            self.index_at(r).powi(2) * PI * (a + b) * r
        };
        Ok(self.core_integral(g, NORMALIZATION_TOL)? + self.exterior_integral(g, NORMALIZATION_TOL)?)
    }

    /// Integral over the core, `r ∈ [0, a]`.
    pub fn core_integral<F: Fn(f64) -> f64>(&self, g: F, rel_tol: f64) -> Result<f64, FiberError> {
        let opts = QuadratureOptions::relative(rel_tol);
        Ok(integrate_with(g, Interval::Finite(0.0, self.radius), &opts)?.value)
    }

    /// Upper radius beyond which an exterior integrand decaying like
    /// `|e|^(2p)` is negligible: at least `10·a` (= 5D), doubled until
    /// `g(r_max)·r_max` drops below 1e-12 of its value at the surface.
    pub fn exterior_cutoff<F: Fn(f64) -> f64>(&self, g: &F) -> f64 {
        let edge = g(self.radius).abs().max(f64::MIN_POSITIVE);
        let mut r_max = 10.0 * self.radius;
        while g(r_max).abs() > EXTERIOR_FLOOR * edge && r_max < 1e6 * self.radius {
            r_max *= 2.0;
        }
        r_max
    }

    /// Adaptive integral of a radial integrand over `r ∈ [a, r_max]`.
    pub fn exterior_integral<F: Fn(f64) -> f64>(&self, g: F, rel_tol: f64) -> Result<f64, FiberError> {
        let r_max = self.exterior_cutoff(&g);
        let opts = QuadratureOptions::relative(rel_tol);
        Ok(integrate_with(g, Interval::Finite(self.radius, r_max), &opts)?.value)
    }
}

/// Unnormalized field of the mode with eigenvalue `beta`.
pub fn mode_field(fiber: &FiberSpec, omega: f64, beta: f64, r: f64, phi: f64) -> Result<[Complex64; 3], FiberError> {
    Ok(ModeProfile::new(fiber, omega, beta)?.field(r, phi))
}

/// Fraction of the time-averaged electric energy carried outside the core.
pub fn exterior_energy_fraction(fiber: &FiberSpec, omega: f64) -> Result<f64, FiberError> {
    let beta = solve_propagation_constant(fiber, omega)?;
    let p = ModeProfile::new(fiber, omega, beta)?;
    let g = |r: f64| {
        let (a, b) = p.intensity_coefficients(r);
        PI * (a + b) * r
    };
    let outside = p.exterior_integral(g, NORMALIZATION_TOL)?;
    Ok(outside / p.weighted_area_integral()?)
}

/// Group velocity `dω/dβ`, core index frozen at its value at `omega`.
pub fn group_velocity(fiber: &FiberSpec, omega: f64) -> Result<f64, FiberError> {
    group_velocity_with_step(fiber, omega, GROUP_VELOCITY_STEP)
}

pub fn group_velocity_with_step(fiber: &FiberSpec, omega: f64, rel_step: f64) -> Result<f64, FiberError> {
    let frozen = fiber.with_frozen_index(omega);
    let dbeta = try_differentiate_central(|w| solve_propagation_constant(&frozen, w), omega, rel_step * omega)?;
    Ok(1.0 / dbeta)
}

/// Solved, normalized HE11 mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedMode {
    pub profile: ModeProfile,
    /// Field scale N_β (V/m per photon in length L).
    pub norm_factor: f64,
    pub group_velocity: f64,
    pub length: f64,
    /// Orientation φ₀ of the quasi-linear polarization.
    pub polarization_angle: f64,
}

impl GuidedMode {
    pub fn omega(&self) -> f64 {
        self.profile.omega
    }

    pub fn beta(&self) -> f64 {
        self.profile.beta
    }

    pub fn field(&self, r: f64, phi: f64) -> [Complex64; 3] {
        self.profile
            .field(r, phi - self.polarization_angle)
            .map(|c| c * self.norm_factor)
    }

    /// `|E(r, φ)|` in V/m.
    pub fn field_magnitude(&self, r: f64, phi: f64) -> f64 {
        self.intensity(r, phi).sqrt()
    }

    pub fn intensity(&self, r: f64, phi: f64) -> f64 {
        let (a, b) = self.intensity_coefficients(r);
        let (sn, cs) = (phi - self.polarization_angle).sin_cos();
        a * cs * cs + b * sn * sn
    }

    /// Normalized `(A, B)` with `|E|² = A cos²(φ−φ₀) + B sin²(φ−φ₀)`.
    pub fn intensity_coefficients(&self, r: f64) -> (f64, f64) {
        let (a, b) = self.profile.intensity_coefficients(r);
        let n2 = self.norm_factor * self.norm_factor;
        (a * n2, b * n2)
    }

    /// Time-averaged electric energy `c·ε₀·L·∫n²|E|² dA` with the
    /// convention prefactor `c`; equals ħω/2 by construction.
    pub fn electric_energy(&self, convention: NormalizationConvention) -> Result<f64, FiberError> {
        let s = self.profile.weighted_area_integral()?;
        Ok(convention.energy_prefactor() * EPSILON_0 * self.length * s * self.norm_factor.powi(2))
    }
}

/// Solve, normalize and attach the group velocity.
pub fn normalize_mode(fiber: &FiberSpec, omega: f64) -> Result<GuidedMode, FiberError> {
    let beta = solve_propagation_constant(fiber, omega)?;
    let profile = ModeProfile::new(fiber, omega, beta)?;
    let s = profile.weighted_area_integral()?;
    let pre = fiber.normalization.energy_prefactor();
    let norm_factor = (0.5 * HBAR * omega / (pre * EPSILON_0 * fiber.length * s)).sqrt();
    Ok(GuidedMode {
        profile,
        norm_factor,
        group_velocity: group_velocity(fiber, omega)?,
        length: fiber.length,
        polarization_angle: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::wavelength_to_omega;

    fn bench() -> (FiberSpec, f64) {
        (FiberSpec::new(350e-9, 5e-3, 1.4537).unwrap(), wavelength_to_omega(778e-9))
    }

    #[test]
    fn silica_index_at_778nm() {
        let n = CoreIndex::FusedSilica.at(wavelength_to_omega(778e-9));
        assert!((n - 1.4537).abs() < 1e-4, "{n}");
    }

    #[test]
    fn spec_validation() {
        assert!(FiberSpec::new(-1.0, 1e-3, 1.45).is_err());
        assert!(FiberSpec::new(1e-7, 0.0, 1.45).is_err());
        assert!(FiberSpec::new(1e-7, 1e-3, 0.9).is_err());
    }

    #[test]
    fn single_mode_examples() {
        let (f, w) = bench();
        assert!((f.v_parameter(w) - 1.49).abs() < 0.01);
        assert!(single_mode_check(&f, w));
        let thick = FiberSpec { diameter: 2e-6, ..f };
        assert!(!single_mode_check(&thick, w));
        let thin = FiberSpec { diameter: 1e-12, ..f };
        assert!(single_mode_check(&thin, w));
    }

    #[test]
    fn beta_inside_guided_bound() {
        let (f, w) = bench();
        let beta = solve_propagation_constant(&f, w).unwrap();
        let k = w / SPEED_OF_LIGHT;
        assert!(beta > k && beta < 1.4537 * k);
    }

    #[test]
    fn thick_fiber_approaches_core_index() {
        let (f, w) = bench();
        let thick = FiberSpec { diameter: 50e-6, ..f };
        let beta = solve_propagation_constant(&thick, w).unwrap();
        let neff = beta / (w / SPEED_OF_LIGHT);
        assert!((neff / 1.4537 - 1.0).abs() < 1e-3, "{neff}");
    }

    #[test]
    fn invalid_eigenvalue_rejected() {
        let (f, w) = bench();
        let k = w / SPEED_OF_LIGHT;
        assert!(matches!(mode_field(&f, w, 0.5 * k, 1e-7, 0.0), Err(FiberError::InvalidEigenvalue { .. })));
    }

    #[test]
    fn field_vanishes_far_away() {
        let (f, w) = bench();
        let beta = solve_propagation_constant(&f, w).unwrap();
        let p = ModeProfile::new(&f, w, beta).unwrap();
        let far = p.radial_amplitudes(1e-4);
        assert!(far.iter().all(|c| c.abs() < 1e-100));
    }

    #[test]
    fn normalization_scales_inversely_with_length() {
        let (f, w) = bench();
        let m1 = normalize_mode(&f, w).unwrap();
        let m2 = normalize_mode(&FiberSpec { length: 2.0 * f.length, ..f }, w).unwrap();
        let r = m1.norm_factor.powi(2) / m2.norm_factor.powi(2);
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rms_convention_halves_intensity() {
        let (f, w) = bench();
        let c = normalize_mode(&f, w).unwrap();
        let r = normalize_mode(&FiberSpec { normalization: NormalizationConvention::RmsAmplitude, ..f }, w).unwrap();
        assert!((c.norm_factor.powi(2) / r.norm_factor.powi(2) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polarization_rotation_moves_the_lobes() {
        let (f, w) = bench();
        let m = normalize_mode(&f, w).unwrap();
        let rot = GuidedMode { polarization_angle: 0.7, ..m };
        let r = 1.3 * f.radius();
        assert!((rot.intensity(r, 0.7 + 0.2) / m.intensity(r, 0.2) - 1.0).abs() < 1e-14);
    }
}
