//! Logarithmic integral li(z) on (1, ∞) and its inverse.
//!
//! li(z) = pv ∫_0^z dt/ln t is computed for z > 1 as li(2) + ∫_2^z dt/ln t,
//! which stays clear of the principal-value singularity at t = 1. The
//! inverse is obtained by monotone bracketing and Brent iteration.

use crate::error::{Error, Result};
use crate::numerics::{brent, quad};

/// li(2), the Ramanujan-Soldner offset for the z > 1 branch.
const LI_2: f64 = 1.045_163_780_117_492_8;

/// Logarithmic integral for `z > 1`.
pub fn li(z: f64) -> Result<f64> {
    if !(z > 1.0) {
        return Err(Error::Domain(format!("li requires z > 1, got {z}")));
    }
    if z == 2.0 {
        return Ok(LI_2);
    }
    let tail = quad::integrate(|t| Ok(1.0 / t.ln()), 2.0, z, 1e-12)?;
    Ok(LI_2 + tail)
}

/// Inverse of [`li`] on (1, ∞); `y` may be any real number.
pub fn li_inv(y: f64) -> Result<f64> {
    // li is increasing from -inf (z -> 1+) to +inf
    let f = |z: f64| Ok(li(z)? - y);
    let mut lo = 1.5;
    let mut hi = 2.0;
    while li(hi)? < y {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::RootFind(format!("li_inv({y}) bracket overflow")));
        }
    }
    while li(lo)? > y {
        lo = 1.0 + (lo - 1.0) / 8.0;
        if lo - 1.0 < 1e-9 {
            return Err(Error::RootFind(format!(
                "li_inv({y}) requires z closer to 1 than supported"
            )));
        }
    }
    brent(f, lo, hi, 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn li_reference_values() {
        // li(10) = 6.1655995047872979... (standard tabulated value)
        assert!((li(10.0).unwrap() - 6.165599504787298).abs() < 1e-9);
        assert!((li(2.0).unwrap() - LI_2).abs() < 1e-14);
    }

    #[test]
    fn inverse_round_trip() {
        for &z in &[1.2, 1.5, 3.0, 7.0, 42.0] {
            let y = li(z).unwrap();
            assert!((li_inv(y).unwrap() - z).abs() < 1e-9 * z);
        }
    }

    #[test]
    fn domain_enforced() {
        assert!(li(0.5).is_err());
        assert!(li(1.0).is_err());
    }
}
