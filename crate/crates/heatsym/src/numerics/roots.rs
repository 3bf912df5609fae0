//! Bracketed scalar root finding (Brent's method).

use crate::error::{Error, Result};

/// Find a root of `f` in `[a, b]`; `f(a)` and `f(b)` must have opposite signs.
///
/// Converges to `|f| <= ftol` or interval width below machine-level spacing.
pub fn brent<F: Fn(f64) -> Result<f64>>(f: F, a: f64, b: f64, ftol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::RootFind(format!(
            "no sign change on [{a}, {b}] (f = {fa:.3e}, {fb:.3e})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5e-15;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= ftol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic / secant step
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
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
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
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.copysign(xm)
        };
        fb = f(b)?;
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    Err(Error::RootFind("Brent iteration limit reached".into()))
}

/// Grow a bracket around `x0` (clamped to `(lo, hi)`) until `f` changes sign.
pub fn expand_bracket<F: Fn(f64) -> Result<f64>>(
    f: &F,
    x0: f64,
    lo: f64,
    hi: f64,
) -> Result<(f64, f64)> {
    let f0 = f(x0)?;
    if f0 == 0.0 {
        return Ok((x0, x0));
    }
    let mut step = 1e-3 * (1.0 + x0.abs());
    for _ in 0..200 {
        let a = (x0 - step).max(lo);
        let b = (x0 + step).min(hi);
        // probe each side independently so one-sided domains still bracket
        if a < x0 {
            if let Ok(fa) = f(a) {
                if fa == 0.0 || fa * f0 < 0.0 {
                    return Ok((a, x0));
                }
            }
        }
        if b > x0 {
            if let Ok(fb) = f(b) {
                if fb == 0.0 || fb * f0 < 0.0 {
                    return Ok((x0, b));
                }
            }
        }
        if a <= lo && b >= hi {
            break;
        }
        step *= 2.0;
    }
    Err(Error::RootFind(format!(
        "could not bracket a root near {x0} within ({lo}, {hi})"
    )))
}
