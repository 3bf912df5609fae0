//! Expression tree definition and convenience constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeSet;

pub type Rational = BigRational;

/// Symbolic expression node.
///
/// `Sum`/`Prod` are n-ary and kept flat and sorted by the simplifier; `Pow`
/// exponents are exact rationals. Function symbols (`Call`) are opaque until
/// resolved against a [`crate::expr::SymbolTable`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(Rational),
    Var(String),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
    Call(String, Box<Expr>),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Const(Rational::from(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::Const(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn zero() -> Expr {
        Expr::num(0)
    }

    pub fn one() -> Expr {
        Expr::num(1)
    }

    pub fn add(terms: Vec<Expr>) -> Expr {
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Expr::Sum(terms),
        }
    }

    pub fn mul(factors: Vec<Expr>) -> Expr {
        match factors.len() {
            0 => Expr::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Expr::Prod(factors),
        }
    }

    pub fn neg(e: Expr) -> Expr {
        Expr::Prod(vec![Expr::num(-1), e])
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, Expr::neg(b)])
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::Prod(vec![a, Expr::pow_int(b, -1)])
    }

    pub fn pow_int(base: Expr, n: i64) -> Expr {
        Expr::Pow(Box::new(base), Rational::from(BigInt::from(n)))
    }

    pub fn pow_ratio(base: Expr, num: i64, den: i64) -> Expr {
        Expr::Pow(Box::new(base), Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn pow(base: Expr, r: Rational) -> Expr {
        Expr::Pow(Box::new(base), r)
    }

    pub fn exp(e: Expr) -> Expr {
        Expr::Exp(Box::new(e))
    }

    pub fn ln(e: Expr) -> Expr {
        Expr::Ln(Box::new(e))
    }

    pub fn call(name: &str, arg: Expr) -> Expr {
        Expr::Call(name.to_string(), Box::new(arg))
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Expr::Const(c) if c.numer().sign() == num_bigint::Sign::NoSign)
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Free variable names (function symbols are not variables).
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Sum(es) | Expr::Prod(es) => {
                for e in es {
                    e.collect_vars(out);
                }
            }
            Expr::Pow(b, _) => b.collect_vars(out),
            Expr::Exp(e) | Expr::Ln(e) | Expr::Call(_, e) => e.collect_vars(out),
        }
    }

    /// Substitute `replacement` for every occurrence of variable `var`.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) => {
                if v == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            Expr::Sum(es) => Expr::Sum(es.iter().map(|e| e.substitute(var, replacement)).collect()),
            Expr::Prod(es) => {
                Expr::Prod(es.iter().map(|e| e.substitute(var, replacement)).collect())
            }
            Expr::Pow(b, r) => Expr::Pow(Box::new(b.substitute(var, replacement)), r.clone()),
            Expr::Exp(e) => Expr::Exp(Box::new(e.substitute(var, replacement))),
            Expr::Ln(e) => Expr::Ln(Box::new(e.substitute(var, replacement))),
            Expr::Call(f, e) => Expr::Call(f.clone(), Box::new(e.substitute(var, replacement))),
        }
    }

    /// Exact rational from an `f64`, preferring small denominators.
    pub fn from_f64(x: f64) -> Expr {
        Expr::Const(crate::numerics::rational::f64_to_rational(x))
    }
}

/// Variable names with a fixed meaning across the crate.
pub mod vars {
    pub const Z: &str = "z";
    pub const T: &str = "t";
    pub const U: &str = "u";
    pub const ETA: &str = "eta";
    pub const LAM: &str = "lam";
}
