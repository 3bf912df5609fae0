//! Double-precision evaluation with strict domain checking.

use super::{Expr, SymbolTable};
use crate::error::{Error, Result};
use crate::numerics::rational::rational_to_f64;
use num_traits::Signed;
use std::collections::HashMap;

pub type Bindings = HashMap<String, f64>;

impl Expr {
    /// Evaluate with every free variable bound either in `bindings` or as a
    /// parameter of `st`. Domain violations surface as errors, never NaN.
    pub fn eval(&self, bindings: &Bindings, st: &SymbolTable) -> Result<f64> {
        let v = self.eval_inner(bindings, st)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("expression evaluated to {v}")))
        }
    }

    fn eval_inner(&self, bindings: &Bindings, st: &SymbolTable) -> Result<f64> {
        match self {
            Expr::Const(c) => Ok(rational_to_f64(c)),
            Expr::Var(name) => bindings
                .get(name)
                .copied()
                .or_else(|| st.param(name))
                .ok_or_else(|| Error::UnboundVar(name.clone())),
            Expr::Sum(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval_inner(bindings, st)?;
                }
                Ok(acc)
            }
            Expr::Prod(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.eval_inner(bindings, st)?;
                }
                Ok(acc)
            }
            Expr::Pow(base, r) => {
                let b = base.eval_inner(bindings, st)?;
                let e = rational_to_f64(r);
                if b > 0.0 {
                    Ok(b.powf(e))
                } else if b == 0.0 {
                    if e > 0.0 {
                        Ok(0.0)
                    } else {
                        Err(Error::Domain(format!("0^({e}) in power node")))
                    }
                } else if r.is_integer() {
                    Ok(b.powi(rational_to_f64(r) as i32))
                } else {
                    Err(Error::Domain(format!(
                        "non-integer power {e} of negative base {b}"
                    )))
                }
            }
            Expr::Exp(e) => Ok(e.eval_inner(bindings, st)?.exp()),
            Expr::Ln(e) => {
                let v = e.eval_inner(bindings, st)?;
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(Error::Domain(format!("ln of non-positive value {v}")))
                }
            }
            Expr::Call(name, arg) => {
                let x = arg.eval_inner(bindings, st)?;
                st.eval_func(name, x)
            }
        }
    }
}

/// Exact rational power when one exists (used by the simplifier).
pub(super) fn exact_rational_pow(
    c: &num_rational::BigRational,
    r: &num_rational::BigRational,
) -> Option<num_rational::BigRational> {
    use num_bigint::BigInt;
    use num_traits::{One, Signed as _, ToPrimitive, Zero};

    if c.is_zero() {
        return if r.is_positive() {
            Some(num_rational::BigRational::zero())
        } else {
            None
        };
    }
    let p = r.numer();
    let q = r.denom().to_u32()?;
    let p_i = p.to_i64()?;
    if p_i.unsigned_abs() > 64 {
        return None; // avoid giant exact powers
    }
    let mut base = if p_i >= 0 { c.clone() } else { c.recip() };
    let pe = p_i.unsigned_abs() as u32;
    if q == 1 {
        let mut acc = num_rational::BigRational::one();
        for _ in 0..pe {
            acc *= base.clone();
        }
        return Some(acc);
    }
    if base.is_negative() && q % 2 == 0 {
        return None;
    }
    let neg = base.is_negative();
    if neg {
        base = -base;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = nth_root(n, q);
        if &pow_big(&r, q) == n {
            Some(r)
        } else {
            None
        }
    };
    let rn = root(base.numer())?;
    let rd = root(base.denom())?;
    let mut rooted = num_rational::BigRational::new(rn, rd);
    if neg {
        rooted = -rooted;
    }
    let mut acc = num_rational::BigRational::one();
    for _ in 0..pe {
        acc *= rooted.clone();
    }
    Some(acc)
}

fn pow_big(b: &num_bigint::BigInt, e: u32) -> num_bigint::BigInt {
    let mut acc = num_bigint::BigInt::from(1);
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// Integer nth root by Newton iteration on BigInt (floor root).
fn nth_root(n: &num_bigint::BigInt, q: u32) -> num_bigint::BigInt {
    use num_traits::{Signed as _, Zero};
    if n.is_zero() {
        return num_bigint::BigInt::from(0);
    }
    let neg = n.is_negative();
    let m = n.abs();
    let bits = m.bits();
    let mut x = num_bigint::BigInt::from(1) << ((bits / q as u64) + 1);
    let qi = num_bigint::BigInt::from(q);
    loop {
        // x_{k+1} = ((q-1)x + m / x^{q-1}) / q
        let xq1 = pow_big(&x, q - 1);
        if xq1.is_zero() {
            break;
        }
        let next = ((&qi - 1) * &x + &m / xq1) / &qi;
        if next >= x {
            break;
        }
        x = next;
    }
    if neg {
        -x
    } else {
        x
    }
}
