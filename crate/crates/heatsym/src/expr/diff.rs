//! Exact partial differentiation.

use super::ast::{Expr, Rational};
use super::symtab::SymbolTable;
use crate::error::Result;
use num_traits::One;

impl Expr {
    /// Exact partial derivative with respect to the variable `v`.
    ///
    /// Registered function symbols are differentiated through the rule in
    /// `st` (e.g. `d/du J(u) = K(u)`); an unregistered symbol or a symbol
    /// without a derivative rule is an error. The result is simplified.
    pub fn diff(&self, v: &str, st: &SymbolTable) -> Result<Expr> {
        Ok(self.diff_raw(v, st)?.simplify())
    }

    fn diff_raw(&self, v: &str, st: &SymbolTable) -> Result<Expr> {
        Ok(match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(name) => {
                if name == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for t in ts {
                    out.push(t.diff_raw(v, st)?);
                }
                Expr::Sum(out)
            }
            Expr::Prod(fs) => {
                // product rule over n factors
                let mut terms = Vec::with_capacity(fs.len());
                for (i, fi) in fs.iter().enumerate() {
                    let mut parts = Vec::with_capacity(fs.len());
                    for (j, fj) in fs.iter().enumerate() {
                        if i == j {
                            parts.push(fi.diff_raw(v, st)?);
                        } else {
                            parts.push(fj.clone());
                        }
                    }
                    terms.push(Expr::Prod(parts));
                }
                Expr::Sum(terms)
            }
            Expr::Pow(b, r) => {
                // d b^r = r * b^(r-1) * db
                let mut r1 = r.clone();
                r1 -= Rational::one();
                Expr::Prod(vec![
                    Expr::Const(r.clone()),
                    Expr::Pow(b.clone(), r1),
                    b.diff_raw(v, st)?,
                ])
            }
            Expr::Exp(x) => Expr::Prod(vec![self.clone(), x.diff_raw(v, st)?]),
            Expr::Ln(x) => Expr::Prod(vec![Expr::pow_int((**x).clone(), -1), x.diff_raw(v, st)?]),
            Expr::Call(name, arg) => {
                let outer = st.deriv_of(name, arg)?;
                Expr::Prod(vec![outer, arg.diff_raw(v, st)?])
            }
        })
    }
}
