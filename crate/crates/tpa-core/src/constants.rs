//! Physical constants (CODATA 2018, SI) and unit conversions.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// First zero of J0; the HE11-only cutoff of a step-index fiber.
pub const SINGLE_MODE_CUTOFF_V: f64 = 2.404_825_557_695_773;

/// Vacuum wavelength (m) to angular frequency (rad/s).
pub fn wavelength_to_omega(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Angular frequency (rad/s) to vacuum wavelength (m).
pub fn omega_to_wavelength(omega: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / omega
}

/// Small wavelength interval around `center` (m) to an angular-frequency
/// interval: Δω = 2πc·Δλ/λ².
pub fn wavelength_span_to_omega(span: f64, center: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT * span / (center * center)
}

/// Inverse of [`wavelength_span_to_omega`].
pub fn omega_span_to_wavelength(span: f64, center: f64) -> f64 {
    span * center * center / (2.0 * PI * SPEED_OF_LIGHT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_conversions_match_quoted_pairs() {
        let lambda = 778e-9;
        // 2.1 nm <-> 6.54 THz, 1 nm <-> 3.11 THz, 1.71 nm <-> 5.3 THz
        assert!((wavelength_span_to_omega(2.1e-9, lambda) / 6.54e12 - 1.0).abs() < 2e-3);
        assert!((wavelength_span_to_omega(1.0e-9, lambda) / 3.11e12 - 1.0).abs() < 1e-3);
        assert!((wavelength_span_to_omega(1.71e-9, lambda) / 5.3e12 - 1.0).abs() < 5e-3);
        let w = wavelength_span_to_omega(1.3e-9, lambda);
        assert!((omega_span_to_wavelength(w, lambda) - 1.3e-9).abs() < 1e-22);
    }

    #[test]
    fn wavelength_round_trip() {
        let w = wavelength_to_omega(778e-9);
        assert!((omega_to_wavelength(w) - 778e-9).abs() < 1e-20);
    }
}
