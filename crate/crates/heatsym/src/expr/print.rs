//! Precedence-aware printing; `parse(e.to_string())` is value-equal to `e`.

use super::ast::{Expr, Rational};
use num_traits::{One, Signed};
use std::fmt;

// precedence levels, matching the parser
const P_SUM: u8 = 0;
const P_PROD: u8 = 1;
const P_UNARY: u8 = 2;
const P_POW: u8 = 3;
const P_ATOM: u8 = 4;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write(self, f, P_SUM)
    }
}

fn write(e: &Expr, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    match e {
        Expr::Const(c) => write_const(c, f, ctx),
        Expr::Var(v) => f.write_str(v),
        Expr::Sum(ts) => {
            let need = ctx > P_SUM;
            if need {
                f.write_str("(")?;
            }
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    write(t, f, P_SUM)?;
                    continue;
                }
                // render negative-coefficient terms with a minus sign
                if let Some(pos) = negated(t) {
                    f.write_str(" - ")?;
                    write(&pos, f, P_PROD)?;
                } else {
                    f.write_str(" + ")?;
                    write(t, f, P_PROD)?;
                }
            }
            if need {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Prod(fs) => write_prod(fs, f, ctx),
        Expr::Pow(b, r) => {
            let need = ctx > P_POW;
            if need {
                f.write_str("(")?;
            }
            write(b, f, P_ATOM)?;
            f.write_str("^")?;
            if r.is_integer() && !r.is_negative() {
                write!(f, "{}", r.numer())?;
            } else if r.is_integer() {
                write!(f, "({})", r.numer())?;
            } else {
                write!(f, "({}/{})", r.numer(), r.denom())?;
            }
            if need {
                f.write_str(")")?;
            }
            Ok(())
        }
        Expr::Exp(x) => {
            f.write_str("exp(")?;
            write(x, f, P_SUM)?;
            f.write_str(")")
        }
        Expr::Ln(x) => {
            f.write_str("ln(")?;
            write(x, f, P_SUM)?;
            f.write_str(")")
        }
        Expr::Call(name, x) => {
            f.write_str(name)?;
            f.write_str("(")?;
            write(x, f, P_SUM)?;
            f.write_str(")")
        }
    }
}

fn write_const(c: &Rational, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    if c.is_integer() {
        if c.is_negative() && ctx >= P_PROD {
            write!(f, "({})", c.numer())
        } else {
            write!(f, "{}", c.numer())
        }
    } else if ctx >= P_PROD {
        // a bare p/q would rebind against neighbouring * / ^ on reparse
        write!(f, "({}/{})", c.numer(), c.denom())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_prod(fs: &[Expr], f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
    // separate reciprocal factors so `a*b^(-1)` prints as `a/b`
    let mut num: Vec<Expr> = Vec::new();
    let mut den: Vec<Expr> = Vec::new();
    let mut lead_minus = false;
    for (i, x) in fs.iter().enumerate() {
        match x {
            Expr::Const(c) if i == 0 && *c == -Rational::one() => lead_minus = true,
            Expr::Pow(b, r) if r.is_negative() => {
                let flipped = -r.clone();
                if flipped.is_one() {
                    den.push((**b).clone());
                } else {
                    den.push(Expr::Pow(b.clone(), flipped));
                }
            }
            _ => num.push(x.clone()),
        }
    }
    let need = ctx > P_PROD || (lead_minus && ctx >= P_PROD);
    if need {
        f.write_str("(")?;
    }
    if lead_minus {
        f.write_str("-")?;
    }
    if num.is_empty() {
        f.write_str("1")?;
    } else {
        for (i, x) in num.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write(x, f, P_UNARY)?;
        }
    }
    for d in &den {
        f.write_str("/")?;
        write(d, f, P_ATOM)?;
    }
    if need {
        f.write_str(")")?;
    }
    Ok(())
}

/// If `t` is a product with a negative leading constant, return its
/// positive counterpart for `a - b` style printing.
fn negated(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c.clone())),
        Expr::Prod(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut out = fs.clone();
                let nc = -c.clone();
                if nc.is_one() && out.len() > 1 {
                    out.remove(0);
                } else {
                    out[0] = Expr::Const(nc);
                }
                Some(Expr::mul(out))
            }
            _ => None,
        },
        _ => None,
    }
}
