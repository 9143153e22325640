//! Two-photon absorption of frequency-entangled and monochromatic photon
//! pairs by an atomic vapor surrounding a sub-wavelength optical fiber.
//!
//! The crate is organized bottom-up:
//!
//! * [`numerics`]: Bessel and Faddeeva/Erfi special functions, adaptive
//!   Gauss–Kronrod quadrature, bracketed root finding, scalar maximization
//!   and Richardson-extrapolated differentiation.
//! * [`fiber`]: exact HE11 mode of a step-index cylinder in vacuum,
//!   single-photon normalization and group velocity.
//! * [`tpa`]: coupling matrix elements, monochromatic and entangled
//!   absorption amplitudes, per-atom and vapor-integrated rates, the
//!   narrow-band asymptotic rate, pair separation and the microtoroid
//!   estimate.
//! * [`dynamics`]: time-domain integration of the ladder amplitudes and
//!   the density matrix, used as an independent check of the closed forms.
//! * [`scenario`]: configuration files, built-in benchmark scenarios,
//!   sweeps, bandwidth optimization and CSV/JSON output used by the `tpa`
//!   binary.

pub mod constants;
pub mod dynamics;
pub mod fiber;
pub mod numerics;
pub mod scenario;
pub mod tpa;

pub use num_complex::Complex64;
