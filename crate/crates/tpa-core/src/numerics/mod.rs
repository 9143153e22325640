//! Special functions and generic numerical kernels.

mod bessel;
mod diff;
mod faddeeva;
mod optimize;
mod quadrature;
mod roots;

pub use bessel::{bessel_j012, bessel_k012_scaled, bessel_k012};
pub use diff::{differentiate_central, try_differentiate_central};
pub use faddeeva::{erfi_complex, faddeeva_w, ERFI_ACCURACY_RADIUS};
pub use optimize::maximize_scalar;
pub use quadrature::{
    integrate_adaptive, integrate_adaptive_2d, integrate_with, Interval, QuadValue,
    QuadratureOptions, QuadratureResult,
};
pub use roots::find_root_bracketed;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("|z| = {modulus} is outside the documented accuracy region |z| <= {limit}")]
    AccuracyDomainExceeded { modulus: f64, limit: f64 },
    #[error("result overflows f64 at z = {re} + {im}i")]
    Overflow { re: f64, im: f64 },
    #[error("{what} did not converge after {iterations} iterations (best estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        estimate: f64,
        error: f64,
    },
    #[error("root is not bracketed: f({lo:e}) = {f_lo:e}, f({hi:e}) = {f_hi:e}")]
    NotBracketed { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
