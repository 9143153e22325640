//! Dormand–Prince 5(4) embedded Runge–Kutta pair with FSAL and
//! per-component error weights, for small complex systems.

use super::DynamicsError;
use num_complex::Complex64;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DopriOptions<const N: usize> {
    pub rel_tol: f64,
    pub abs_tol: [f64; N],
    pub max_steps: usize,
}

impl<const N: usize> DopriOptions<N> {
    pub fn new(rel_tol: f64, abs_tol: [f64; N]) -> Self {
        Self { rel_tol, abs_tol, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DopriStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<const N: usize>(y: &[Complex64; N], h: f64, terms: &[(&[Complex64; N], f64)]) -> [Complex64; N] {
    let mut out = *y;
    for (k, w) in terms {
        if *w != 0.0 {
            for i in 0..N {
                out[i] += k[i] * (h * w);
            }
        }
    }
    out
}

fn weighted_norm<const N: usize>(v: &[Complex64; N], y0: &[Complex64; N], y1: &[Complex64; N], opts: &DopriOptions<N>) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = opts.abs_tol[i] + opts.rel_tol * y0[i].norm().max(y1[i].norm());
        acc += (v[i].norm() / sc).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrate `y' = f(t, y)` from `t = 0` to `t_final`.
pub fn integrate_dopri5<const N: usize, F>(
    mut f: F,
    y0: [Complex64; N],
    t_final: f64,
    opts: &DopriOptions<N>,
) -> Result<([Complex64; N], DopriStats), DynamicsError>
where
    F: FnMut(f64, &[Complex64; N]) -> [Complex64; N],
{
    let mut stats = DopriStats::default();
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;

    // Initial step from the derivative scale (Hairer–Nørsett–Wanner).
    let d0 = weighted_norm(&y, &y, &y, opts);
    let d1 = weighted_norm(&k1, &y, &y, opts);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * t_final } else { 0.01 * d0 / d1 };
    h = h.min(t_final);
    if !(h > 0.0) {
        h = 1e-6 * t_final;
    }

    while t < t_final {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(DynamicsError::StepFailure { t, step: h });
        }
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }
        let k2 = f(t + C[1] * h, &axpy(&y, h, &[(&k1, A[1][0])]));
        let k3 = f(t + C[2] * h, &axpy(&y, h, &[(&k1, A[2][0]), (&k2, A[2][1])]));
        let k4 = f(t + C[3] * h, &axpy(&y, h, &[(&k1, A[3][0]), (&k2, A[3][1]), (&k3, A[3][2])]));
        let k5 = f(
            t + C[4] * h,
            &axpy(&y, h, &[(&k1, A[4][0]), (&k2, A[4][1]), (&k3, A[4][2]), (&k4, A[4][3])]),
        );
        let k6 = f(
            t + C[5] * h,
            &axpy(&y, h, &[(&k1, A[5][0]), (&k2, A[5][1]), (&k3, A[5][2]), (&k4, A[5][3]), (&k5, A[5][4])]),
        );
        let y_new = axpy(&y, h, &[(&k1, A[6][0]), (&k3, A[6][2]), (&k4, A[6][3]), (&k5, A[6][4]), (&k6, A[6][5])]);
        let k7 = f(t + h, &y_new);
        stats.evaluations += 6;
        let zero = [Complex64::new(0.0, 0.0); N];
        let err_vec = axpy(&zero, h, &[(&k1, E[0]), (&k3, E[2]), (&k4, E[3]), (&k5, E[4]), (&k6, E[5]), (&k7, E[6])]);
        let err = weighted_norm(&err_vec, &y, &y_new, opts);
        if !err.is_finite() {
            return Err(DynamicsError::StepFailure { t, step: h });
        }
        if err <= 1.0 {
            t = if last { t_final } else { t + h };
            y = y_new;
            k1 = k7;
            stats.accepted += 1;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if h < 1e-15 * t_final.max(t) {
                return Err(DynamicsError::StepFailure { t, step: h });
            }
        }
    }
    Ok((y, stats))
}
