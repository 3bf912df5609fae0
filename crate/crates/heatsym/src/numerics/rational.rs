//! Continued-fraction rationalization of floating-point values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::FromPrimitive;

/// Best rational p/q with `q <= max_den` approximating `x`; `None` if the
/// approximation misses by more than `tol` (relative).
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 9e17 {
            break;
        }
        let ai = a as i64;
        let p2 = ai.checked_mul(p1).and_then(|t| t.checked_add(p0));
        let q2 = ai.checked_mul(q1).and_then(|t| t.checked_add(q0));
        let (p2, q2) = match (p2, q2) {
            (Some(p), Some(q)) => (p, q),
            _ => break,
        };
        if q2.abs() > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac.abs() < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let approx = p1 as f64 / q1 as f64;
    if (approx - x).abs() <= tol * (1.0 + x.abs()) {
        Some((p1, q1))
    } else {
        None
    }
}

/// Exact rational representation of `x`, preferring a small-denominator form
/// when one matches to 1e-12 relative; otherwise the exact binary expansion.
pub fn f64_to_rational(x: f64) -> BigRational {
    if let Some((p, q)) = rationalize(x, 1_000_000, 1e-12) {
        let cand = BigRational::new(BigInt::from(p), BigInt::from(q));
        if rational_to_f64(&cand) == x || (rational_to_f64(&cand) - x).abs() <= 1e-12 * (1.0 + x.abs())
        {
            return cand;
        }
    }
    BigRational::from_f64(x).expect("finite f64")
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_fractions() {
        assert_eq!(rationalize(0.5, 100, 1e-12), Some((1, 2)));
        assert_eq!(rationalize(-1.25, 100, 1e-12), Some((-5, 4)));
        assert_eq!(rationalize(1.5, 100, 1e-12), Some((3, 2)));
        assert_eq!(rationalize(3.0, 100, 1e-12), Some((3, 1)));
    }

    #[test]
    fn rejects_far_values() {
        assert_eq!(rationalize(std::f64::consts::PI, 5, 1e-12), None);
    }
}
