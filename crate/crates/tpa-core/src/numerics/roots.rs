//! Bracketed scalar root finding (Brent–Dekker: bisection safeguarding
//! secant and inverse quadratic steps).

use super::NumericsError;

const MAX_ITERATIONS: usize = 200;

/// Root of `f` in `[lo, hi]`, which must bracket a sign change.
///
/// Terminates when the bracket is narrower than `tol` (absolute, in `x`)
/// or `f` is exactly zero.
pub fn find_root_bracketed<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(NumericsError::NotBracketed { lo, hi, f_lo: fa, f_hi: fb });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(NumericsError::NonConvergence {
        what: "bracketed root finder",
        iterations: MAX_ITERATIONS,
        estimate: b,
        error: (c - b).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let x = find_root_bracketed(|x| 3.0 * x - 2.0, -5.0, 5.0, 1e-15).unwrap();
        assert!((x - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cubic_root() {
        // (x - 1.5)(x² + 1) has a single real root
        let x = find_root_bracketed(|x| (x - 1.5) * (x * x + 1.0), 0.0, 10.0, 1e-14).unwrap();
        assert!((x - 1.5).abs() < 1e-13);
    }

    #[test]
    fn unbracketed_is_an_error() {
        let e = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12);
        assert!(matches!(e, Err(NumericsError::NotBracketed { .. })));
    }

    #[test]
    fn residual_is_small() {
        let f = |x: f64| x.cos() - x;
        let x = find_root_bracketed(f, 0.0, 1.0, 1e-15).unwrap();
        assert!(f(x).abs() < 1e-15);
    }
}
