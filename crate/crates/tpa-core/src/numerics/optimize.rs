//! One-dimensional maximization on a bracket (Brent's golden-section with
//! parabolic interpolation, applied to `-f`).

use super::NumericsError;

const GOLDEN: f64 = 0.381_966_011_250_105_1;
const MAX_ITERATIONS: usize = 500;

/// Maximize `f` over `[lo, hi]`; returns `(x*, f(x*))`.
///
/// `tol` is the absolute tolerance on `x*`. The function is assumed
/// unimodal on the bracket; otherwise a local maximum is returned.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(NumericsError::InvalidArgument(format!(
            "need lo < hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
        )));
    }
    let mut g = |x: f64| -f(x);
    let (mut a, mut b) = (lo, hi);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = g(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..MAX_ITERATIONS {
        let xm = 0.5 * (a + b);
        let tol1 = 1e-12 * x.abs() + tol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            return Ok((x, -fx));
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = g(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Err(NumericsError::NonConvergence {
        what: "scalar maximization",
        iterations: MAX_ITERATIONS,
        estimate: x,
        error: b - a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_vertex() {
        let (x, fx) = maximize_scalar(|x| -(x - 1.25).powi(2) + 3.0, -4.0, 7.0, 1e-10).unwrap();
        assert!((x - 1.25).abs() < 1e-8);
        assert!((fx - 3.0).abs() < 1e-14);
    }

    #[test]
    fn kink_maximum() {
        let (x, _) = maximize_scalar(|x: f64| -(x - 0.3).abs(), -1.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn derivative_changes_sign_at_optimum() {
        let f = |x: f64| x.sin() * (-0.1 * x).exp();
        let (x, _) = maximize_scalar(f, 0.0, 3.0, 1e-10).unwrap();
        let h = 1e-4;
        assert!(f(x - h) < f(x) && f(x + h) < f(x));
        assert!((f(x) - f(x - h)) > 0.0 && (f(x + h) - f(x)) < 0.0);
    }

    #[test]
    fn bad_bracket() {
        assert!(maximize_scalar(|x| x, 1.0, 1.0, 1e-6).is_err());
    }
}
