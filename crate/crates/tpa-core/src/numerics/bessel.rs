//! Bessel functions of integer order 0, 1, 2 for real non-negative
//! arguments: `J_n` of the first kind and the modified `K_n` of the second
//! kind. These are all the HE11 field and eigenvalue equations need.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `(J0(x), J1(x), J2(x))` for `x >= 0`.
///
/// Miller backward recurrence normalized with `J0 + 2 Σ J_{2k} = 1`;
/// absolute accuracy ~1e-15 for all finite `x`.
pub fn bessel_j012(x: f64) -> (f64, f64, f64) {
    debug_assert!(x >= 0.0);
    if x == 0.0 {
        return (1.0, 0.0, 0.0);
    }
    if x < 1e-4 {
        let y = 0.25 * x * x;
        return (1.0 - y, 0.5 * x * (1.0 - 0.5 * y), 0.125 * x * x * (1.0 - y / 3.0));
    }
    let start = 2 * ((x as usize + 20 + (10.0 * x.cbrt()) as usize) / 2);
    let two_over_x = 2.0 / x;
    let (mut j_next, mut j) = (0.0_f64, 1e-300_f64);
    let mut norm = 0.0;
    let mut out = [0.0_f64; 3];
    for k in (1..=start).rev() {
        let j_prev = k as f64 * two_over_x * j - j_next;
        j_next = j;
        j = j_prev;
        if j.abs() > 1e250 {
            j *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
        let order = k - 1;
        if order <= 2 {
            out[order] = j;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * j;
        }
    }
    norm += j;
    (out[0] / norm, out[1] / norm, out[2] / norm)
}

/// Exponentially scaled `(e^x K0(x), e^x K1(x), e^x K2(x))` for `x > 0`.
pub fn bessel_k012_scaled(x: f64) -> (f64, f64, f64) {
    debug_assert!(x > 0.0);
    let (k0, k1) = if x <= 2.0 {
        let (k0, k1) = k01_series(x);
        let e = x.exp();
        (k0 * e, k1 * e)
    } else {
        k01_scaled_continued_fraction(x)
    };
    (k0, k1, k0 + 2.0 * k1 / x)
}

/// Unscaled `(K0(x), K1(x), K2(x))`; underflows to zero for large `x`.
pub fn bessel_k012(x: f64) -> (f64, f64, f64) {
    let (k0, k1, k2) = bessel_k012_scaled(x);
    let e = (-x).exp();
    (k0 * e, k1 * e, k2 * e)
}

// K0 = -(ln(x/2) + γ) I0 + Σ H_k (x²/4)^k/(k!)²
// K1 = 1/x + ln(x/2) I1 - (x/4) Σ (ψ(k+1) + ψ(k+2)) (x²/4)^k/(k!(k+1)!)
fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    let mut term = 1.0; // (x²/4)^k / (k!)²
    let mut harmonic = 0.0;
    let (mut i0, mut h_sum, mut i1, mut psi_sum) = (0.0, 0.0, 0.0, 0.0);
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        i0 += term;
        h_sum += term * harmonic;
        i1 += term * 0.5 * x / (kf + 1.0);
        let psi1 = -EULER_GAMMA + harmonic;
        let psi2 = psi1 + 1.0 / (kf + 1.0);
        psi_sum += (psi1 + psi2) * term / (kf + 1.0);
        k += 1;
        harmonic += 1.0 / k as f64;
        term *= y / (k * k) as f64;
        if term < 1e-18 * i0 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + h_sum;
    let k1 = 1.0 / x + i1 * log_half - 0.25 * x * psi_sum;
    (k0, k1)
}

// Steed's method for the second continued fraction (Temme), order 0.
fn k01_scaled_continued_fraction(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let (mut q1, mut q2) = (0.0, 1.0);
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..100_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}
