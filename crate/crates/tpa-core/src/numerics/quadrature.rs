//! Globally adaptive Gauss–Kronrod (G7/K15) quadrature over finite and
//! infinite intervals and over 2-D product domains.

use super::NumericsError;
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Default + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn is_finite(self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Integration domain. Infinite ends are mapped onto finite ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Interval {
    Finite(f64, f64),
    /// `[a, ∞)`
    From(f64),
    /// `(-∞, b]`
    UpTo(f64),
    /// `(-∞, ∞)`
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_panels: 100_000,
        }
    }
}

impl QuadratureOptions {
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64, f64), NumericsError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv = [T::default(); 15];
    fv[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        fv[j] = f(center - dx);
        fv[14 - j] = f(center + dx);
    }
    if let Some(bad) = fv.iter().position(|v| !v.is_finite()) {
        let x = if bad == 7 {
            center
        } else if bad < 7 {
            center - half * XGK[bad]
        } else {
            center + half * XGK[14 - bad]
        };
        return Err(NumericsError::InvalidArgument(format!(
            "integrand is not finite at x = {x:e}"
        )));
    }
    let mut kronrod = fv[7] * WGK[7];
    let mut gauss = fv[7] * WG[3];
    let mut res_abs = fv[7].magnitude() * WGK[7];
    for j in 0..7 {
        let pair = fv[j] + fv[14 - j];
        kronrod = kronrod + pair * WGK[j];
        res_abs += WGK[j] * (fv[j].magnitude() + fv[14 - j].magnitude());
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fv[7] - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).magnitude() + (fv[14 - j] - mean).magnitude());
    }
    let scale = half.abs();
    res_abs *= scale;
    res_asc *= scale;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((kronrod * half, err, res_abs))
}

fn adaptive_finite<T, F>(
    f: &mut F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if !(opts.rel_tol > 0.0 || opts.abs_tol > 0.0) {
        return Err(NumericsError::InvalidArgument(
            "tolerance must be positive".into(),
        ));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: T::default(),
            abs_error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (value, error, res_abs) = gauss_kronrod(f, a, b)?;
    let mut evaluations = 15;
    let mut total = value;
    let mut total_err = error;
    let mut total_abs = res_abs;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if total_err <= target || total_err <= 50.0 * f64::EPSILON * total_abs {
            break;
        }
        if heap.len() >= opts.max_panels {
            return Err(NumericsError::NonConvergence {
                what: "adaptive quadrature",
                iterations: heap.len(),
                estimate: total.magnitude(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Panel cannot be split further in f64; accept what we have.
            heap.push(worst);
            break;
        }
        let (v1, e1, r1) = gauss_kronrod(f, worst.a, mid)?;
        let (v2, e2, r2) = gauss_kronrod(f, mid, worst.b)?;
        evaluations += 30;
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.error;
        total_abs += r1 + r2;
        heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    let mut value = T::default();
    let mut abs_error_estimate = 0.0;
    for p in heap.iter() {
        value = value + p.value;
        abs_error_estimate += p.error;
    }
    Ok(QuadratureResult {
        value,
        abs_error_estimate,
        evaluations,
    })
}

/// Integrate `f` over `interval` with explicit options.
pub fn integrate_with<T, F>(
    mut f: F,
    interval: Interval,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    match interval {
        Interval::Finite(a, b) => adaptive_finite(&mut f, a, b, opts),
        Interval::From(a) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                f(a + t / s) * (1.0 / (s * s))
            };
            adaptive_finite(&mut g, 0.0, 1.0, opts)
        }
        Interval::UpTo(b) => {
            let mut g = |t: f64| {
                let s = 1.0 - t;
                f(b - t / s) * (1.0 / (s * s))
            };
            adaptive_finite(&mut g, 0.0, 1.0, opts)
        }
        Interval::Whole => {
            let mut g = |t: f64| {
                let s = 1.0 - t * t;
                f(t / s) * ((1.0 + t * t) / (s * s))
            };
            adaptive_finite(&mut g, -1.0, 1.0, opts)
        }
    }
}

/// Integrate `f` over `interval` to relative tolerance `rel_tol`.
pub fn integrate_adaptive<T, F>(
    f: F,
    interval: Interval,
    rel_tol: f64,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_with(f, interval, &QuadratureOptions::relative(rel_tol))
}

/// Integrate `f(x, y)` over the rectangle `x ∈ [x0, x1]`, `y ∈ [y0, y1]` as
/// nested adaptive 1-D integrals; the inner integral runs at a tenth of the
/// outer tolerance.
pub fn integrate_adaptive_2d<T, F>(
    mut f: F,
    x_range: (f64, f64),
    y_range: (f64, f64),
    opts: &QuadratureOptions,
) -> Result<QuadratureResult<T>, NumericsError>
where
    T: QuadValue,
    F: FnMut(f64, f64) -> T,
{
    let inner_opts = QuadratureOptions {
        rel_tol: opts.rel_tol * 0.1,
        abs_tol: opts.abs_tol * 0.1 / (x_range.1 - x_range.0).abs().max(f64::MIN_POSITIVE),
        max_panels: opts.max_panels,
    };
    let mut inner_evals = 0usize;
    let mut inner_err = 0.0_f64;
    let mut failure = None;
    let outer = adaptive_finite(
        &mut |x: f64| {
            if failure.is_some() {
                return T::default();
            }
            match adaptive_finite(&mut |y| f(x, y), y_range.0, y_range.1, &inner_opts) {
                Ok(r) => {
                    inner_evals += r.evaluations;
                    inner_err = inner_err.max(r.abs_error_estimate);
                    r.value
                }
                Err(e) => {
                    failure = Some(e);
                    T::default()
                }
            }
        },
        x_range.0,
        x_range.1,
        opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadratureResult {
        value: outer.value,
        abs_error_estimate: outer.abs_error_estimate
            + inner_err * (x_range.1 - x_range.0).abs(),
        evaluations: inner_evals,
    })
}
