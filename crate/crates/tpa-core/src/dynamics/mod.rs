//! Time-domain reference for the ladder amplitudes and density matrix.
//!
//! Basis order: `|1⟩ = |h⟩` (upper), `|2⟩ = |i⟩` (intermediate),
//! `|3⟩ = |g⟩` (ground). In the lab frame the couplings carry `e^{±iδt}`;
//! integration runs in the frame rotating with the intermediate level,
//! `c₂ = α₂ e^{iδt}`, where the system is autonomous. Results are mapped
//! back to the lab frame. On two-photon resonance the drive phases on `α₁`
//! cancel, so the lab-frame `α₁` is itself stationary in steady state and
//! needs no demodulation.

use crate::constants::HBAR;
use num_complex::Complex64;
use thiserror::Error;

mod dopri;

pub use dopri::{integrate_dopri5, DopriOptions, DopriStats};

const PERTURBATIVE_LIMIT: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("step size control failed at t = {t:e} s (step {step:e} s)")]
    StepFailure { t: f64, step: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Coupling and decay constants of one single-frequency drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderDrive {
    /// Conjugated matrix element `m1*` (J).
    pub m1c: Complex64,
    /// Conjugated matrix element `m2*` (J).
    pub m2c: Complex64,
    pub delta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl LadderDrive {
    fn validate(&self, t_final: f64, tol: f64) -> Result<(), DynamicsError> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(DynamicsError::InvalidInput(format!("t_final must be positive, got {t_final}")));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(DynamicsError::InvalidInput(format!("tolerance must lie in (0, 1), got {tol}")));
        }
        if !(self.gamma1 >= 0.0 && self.gamma2 >= 0.0) {
            return Err(DynamicsError::InvalidInput("decay rates must be non-negative".into()));
        }
        Ok(())
    }

    /// Rotating-frame Hamiltonian divided by ħ.
    fn hamiltonian(&self) -> [[Complex64; 3]; 3] {
        let z = Complex64::new(0.0, 0.0);
        let a = self.m2c / HBAR;
        let b = self.m1c / HBAR;
        [[z, a, z], [a.conj(), Complex64::new(-self.delta, 0.0), b], [z, b.conj(), z]]
    }

    fn decay(&self) -> [f64; 3] {
        [self.gamma2, self.gamma1, 0.0]
    }

    /// Steady-state amplitude magnitudes, used as absolute-error scales.
    fn scales(&self) -> (f64, f64) {
        let denom = Complex64::new(self.gamma1, -2.0 * self.delta).norm().max(f64::MIN_POSITIVE);
        let a2 = 2.0 * self.m1c.norm() / (HBAR * denom);
        let a1 = 2.0 * self.m2c.norm() * a2 / (HBAR * self.gamma2.max(f64::MIN_POSITIVE));
        (a1.max(f64::MIN_POSITIVE), a2.max(f64::MIN_POSITIVE))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderAmplitudeState {
    pub alpha1: Complex64,
    pub alpha2: Complex64,
    pub alpha3: Complex64,
    pub t: f64,
}

impl LadderAmplitudeState {
    /// True while the excited amplitudes stay small enough for the
    /// undepleted-ground treatment.
    pub fn is_perturbative(&self) -> bool {
        self.alpha1.norm() < PERTURBATIVE_LIMIT && self.alpha2.norm() < PERTURBATIVE_LIMIT
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.alpha1, self.alpha2, self.alpha3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrixState {
    pub rho: [[Complex64; 3]; 3],
    pub t: f64,
}

impl DensityMatrixState {
    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.rho[i][j] - self.rho[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|i| self.rho[i][i].re).sum()
    }
}

fn lab_phase(delta: f64, t: f64) -> Complex64 {
    Complex64::from_polar(1.0, -delta * t)
}

/// Amplitudes with the ground state held at `α₃ = 1`, from
/// `α₁(0) = α₂(0) = 0`.
pub fn integrate_amplitudes(drive: &LadderDrive, t_final: f64, tol: f64) -> Result<LadderAmplitudeState, DynamicsError> {
    drive.validate(t_final, tol)?;
    let (s1, s2) = drive.scales();
    let (m1, m2) = (drive.m1c / HBAR, drive.m2c / HBAR);
    let i = Complex64::new(0.0, 1.0);
    let rhs = |_t: f64, y: &[Complex64; 2]| -> [Complex64; 2] {
        [
            -i * m2 * y[1] - 0.5 * drive.gamma2 * y[0],
            i * drive.delta * y[1] - i * m1 - 0.5 * drive.gamma1 * y[1],
        ]
    };
    let opts = DopriOptions::new(tol, [tol * s1, tol * s2]);
    let (y, _) = integrate_dopri5(rhs, [Complex64::new(0.0, 0.0); 2], t_final, &opts)?;
    Ok(LadderAmplitudeState {
        alpha1: y[0],
        alpha2: y[1] * lab_phase(drive.delta, t_final),
        alpha3: Complex64::new(1.0, 0.0),
        t: t_final,
    })
}

/// Full three-level amplitude evolution (ground amplitude dynamic) from an
/// arbitrary initial state `(α₁, α₂, α₃)`.
pub fn integrate_amplitudes_full(
    drive: &LadderDrive,
    initial: [Complex64; 3],
    t_final: f64,
    tol: f64,
) -> Result<LadderAmplitudeState, DynamicsError> {
    drive.validate(t_final, tol)?;
    let h = drive.hamiltonian();
    let g = drive.decay();
    let mi = Complex64::new(0.0, -1.0);
    let rhs = |_t: f64, y: &[Complex64; 3]| -> [Complex64; 3] {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for k in 0..3 {
            let hy = h[k][0] * y[0] + h[k][1] * y[1] + h[k][2] * y[2];
            out[k] = mi * hy - 0.5 * g[k] * y[k];
        }
        out
    };
    let (s1, s2) = drive.scales();
    let norm = initial.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let atol = [tol * s1.max(norm * tol), tol * s2.max(norm * tol), tol * norm];
    let opts = DopriOptions::new(tol, atol);
    let (y, _) = integrate_dopri5(rhs, initial, t_final, &opts)?;
    Ok(LadderAmplitudeState {
        alpha1: y[0],
        alpha2: y[1] * lab_phase(drive.delta, t_final),
        alpha3: y[2],
        t: t_final,
    })
}

/// Density-matrix evolution `ρ̇ = −(i/ħ)[V, ρ] − ½{Γ, ρ}` from the pure
/// state `ρ(0) = c c†`.
pub fn evolve_density_matrix(
    drive: &LadderDrive,
    initial: [Complex64; 3],
    t_final: f64,
    tol: f64,
) -> Result<DensityMatrixState, DynamicsError> {
    drive.validate(t_final, tol)?;
    let h = drive.hamiltonian();
    let g = drive.decay();
    let mi = Complex64::new(0.0, -1.0);
    let rhs = |_t: f64, y: &[Complex64; 9]| -> [Complex64; 9] {
        let mut out = [Complex64::new(0.0, 0.0); 9];
        for r in 0..3 {
            for c in 0..3 {
                let mut comm = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    comm += h[r][k] * y[3 * k + c] - y[3 * r + k] * h[k][c];
                }
                out[3 * r + c] = mi * comm - 0.5 * (g[r] + g[c]) * y[3 * r + c];
            }
        }
        out
    };
    let (s1, s2) = drive.scales();
    let norm = initial.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let amp = [s1.max(norm * tol), s2.max(norm * tol), norm];
    let mut atol = [0.0; 9];
    for r in 0..3 {
        for c in 0..3 {
            atol[3 * r + c] = tol * (amp[r] * amp[c]).max(f64::MIN_POSITIVE);
        }
    }
    let opts = DopriOptions::new(tol, atol);
    let mut y0 = [Complex64::new(0.0, 0.0); 9];
    for r in 0..3 {
        for c in 0..3 {
            y0[3 * r + c] = initial[r] * initial[c].conj();
        }
    }
    let (y, _) = integrate_dopri5(rhs, y0, t_final, &opts)?;
    let phase = [Complex64::new(1.0, 0.0), lab_phase(drive.delta, t_final), Complex64::new(1.0, 0.0)];
    let mut rho = [[Complex64::new(0.0, 0.0); 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            rho[r][c] = phase[r] * y[3 * r + c] * phase[c].conj();
        }
    }
    Ok(DensityMatrixState { rho, t: t_final })
}

/// `max_ij |ρ_ij − α_i α_j*|`.
pub fn check_factorization(rho: &DensityMatrixState, amps: &LadderAmplitudeState) -> f64 {
    let a = amps.as_array();
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((rho.rho[i][j] - a[i] * a[j].conj()).norm());
        }
    }
    worst
}
