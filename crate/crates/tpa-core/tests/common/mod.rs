//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use tpa_core::fiber::{FiberSpec, GuidedMode};
use tpa_core::Complex64;

/// Fixed-point scale, bits after the binary point.
pub const FRAC_BITS: usize = 320;

pub fn to_fixed(x: f64) -> BigInt {
    if x == 0.0 {
        return BigInt::from(0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = if exp == 0 { (bits & ((1 << 52) - 1)) << 1 } else { (bits & ((1 << 52) - 1)) | (1 << 52) };
    let shift = exp - 1075 + FRAC_BITS as i64;
    let m = BigInt::from(sign) * BigInt::from(mant);
    if shift >= 0 {
        m << shift as usize
    } else {
        m >> (-shift) as usize
    }
}

pub fn from_fixed(x: &BigInt) -> f64 {
    // Keep 80 significant bits, then let the decimal parser round once.
    let coarse: BigInt = x >> (FRAC_BITS - 80);
    coarse.to_string().parse::<f64>().unwrap() * 2f64.powi(-80)
}

/// Erfi by its Maclaurin series in exact fixed-point arithmetic:
/// `2/√π Σ z^{2n+1} / (n! (2n+1))`.
pub fn erfi_series_oracle(z: Complex64) -> Complex64 {
    let (zr, zi) = (to_fixed(z.re), to_fixed(z.im));
    let mul = |ar: &BigInt, ai: &BigInt, br: &BigInt, bi: &BigInt| {
        ((ar * br - ai * bi) >> FRAC_BITS, (ar * bi + ai * br) >> FRAC_BITS)
    };
    let (z2r, z2i) = mul(&zr, &zi, &zr, &zi);
    let (mut tr, mut ti) = (zr.clone(), zi.clone());
    let (mut sr, mut si) = (zr, zi);
    let negligible: BigInt = BigInt::from(1) << 8usize;
    let mut n = 1u64;
    loop {
        let (nr, ni) = mul(&tr, &ti, &z2r, &z2i);
        tr = nr / n;
        ti = ni / n;
        let k = 2 * n + 1;
        sr += &tr / k;
        si += &ti / k;
        if n > 40 && tr.magnitude() < negligible.magnitude() && ti.magnitude() < negligible.magnitude() {
            break;
        }
        n += 1;
    }
    Complex64::new(from_fixed(&sr), from_fixed(&si)) * (2.0 / PI.sqrt())
}

pub fn random_disk_points(n: usize, radius: f64, seed: u64) -> Vec<Complex64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let t = rng.gen_range(0.0..2.0 * PI);
            Complex64::from_polar(r, t)
        })
        .collect()
}

pub const N_CORE: f64 = 1.4537;
pub const DIAMETERS_NM: [f64; 4] = [300.0, 350.0, 400.0, 500.0];
pub const WAVELENGTHS_NM: [f64; 3] = [770.0, 778.0, 790.0];

/// `J_n(x) = (1/2π) ∫₀^{2π} cos(nt − x sin t) dt`; the periodic trapezoid
/// rule converges geometrically.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    let m = 256;
    (0..m)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / m as f64;
            (n as f64 * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / m as f64
}

/// `K_n(x) = ∫₀^∞ e^{−x cosh t} cosh(nt) dt` by the trapezoid rule.
pub fn bessel_k(n: i32, x: f64) -> f64 {
    let h = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut t: f64 = h;
    loop {
        let v = (-x * t.cosh()).exp() * (n as f64 * t).cosh();
        sum += v;
        if v < 1e-300 || t > 30.0 {
            break;
        }
        t += h;
    }
    sum * h
}

/// Relative residual of
/// `(J'/(UJ) + K'/(WK))(n²J'/(UJ) + K'/(WK)) = (β/k)²(1/U² + 1/W²)²`.
pub fn classical_residual(d: f64, lambda: f64, beta: f64) -> f64 {
    let (lhs, rhs) = classical_sides(d, lambda, beta);
    (lhs - rhs).abs() / rhs.abs()
}

pub fn classical_sides(d: f64, lambda: f64, beta: f64) -> (f64, f64) {
    let k = 2.0 * PI / lambda;
    let a = d / 2.0;
    let u = a * (N_CORE * N_CORE * k * k - beta * beta).sqrt();
    let w = a * (beta * beta - k * k).sqrt();
    let j1 = bessel_j(1, u);
    let k1 = bessel_k(1, w);
    let jp = bessel_j(0, u) - j1 / u;
    let kp = -bessel_k(0, w) - k1 / w;
    let jr = jp / (u * j1);
    let kr = kp / (w * k1);
    let lhs = (jr + kr) * (N_CORE * N_CORE * jr + kr);
    let rhs = (beta / k).powi(2) * (1.0 / (u * u) + 1.0 / (w * w)).powi(2);
    (lhs, rhs)
}

pub fn spec(d_nm: f64) -> FiberSpec {
    FiberSpec::new(d_nm * 1e-9, 5e-3, N_CORE).unwrap()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + h * i as f64) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `(core, exterior)` parts of `∫ n²|E|² dA`, azimuth by an 8-point rule
/// (exact for the cos²/sin² dependence).
pub fn dense_energy_integrals(mode: &GuidedMode) -> (f64, f64) {
    let a = mode.profile.radius;
    let q = mode.profile.w() / a;
    let ring = |r: f64| -> f64 {
        let m = 8;
        (0..m)
            .map(|j| {
                let phi = 2.0 * PI * j as f64 / m as f64;
                mode.field(r, phi).iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64
            * r
    };
    let n2 = mode.profile.core_index.powi(2);
    let core = n2 * simpson(|r| ring(r.min(a * (1.0 - 1e-15))), 0.0, a, 4000);
    let outer = a + 40.0 / q;
    let ext = simpson(ring, a, outer, 40000);
    (core, ext)
}

