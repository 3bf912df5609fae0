//! Canonical simplification.
//!
//! The normal form flattens sums and products, merges rational constants,
//! collects like terms and like powers of a common base, cancels
//! exactly-opposite terms, folds exact rational powers of constants, and
//! rewrites `exp(q*ln(x))` into `x^q` for rational `q`. The pass is
//! idempotent: simplifying a canonical tree returns it unchanged.
//!
//! Fractional-power rewrites (`(x^a)^b = x^{ab}`, `(x*y)^r = x^r*y^r`)
//! assume positive-valued bases, which holds on the domains this crate
//! works on (`z, t > 0`, `u` in the model's admissible interval).

use super::ast::{Expr, Rational};
use super::eval::exact_rational_pow;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

impl Expr {
    /// Canonical normal form; value-preserving everywhere both sides are
    /// defined, and idempotent.
    pub fn simplify(&self) -> Expr {
        canon(self)
    }
}

fn canon(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) | Expr::Var(_) => e.clone(),
        Expr::Sum(ts) => canon_sum(ts.iter().map(canon).collect()),
        Expr::Prod(fs) => canon_prod(fs.iter().map(canon).collect()),
        Expr::Pow(b, r) => canon_pow(canon(b), r.clone()),
        Expr::Exp(x) => canon_exp(canon(x)),
        Expr::Ln(x) => canon_ln(canon(x)),
        Expr::Call(f, x) => Expr::Call(f.clone(), Box::new(canon(x))),
    }
}

/// Split a canonical term into (rational coefficient, key expression).
/// The key for a pure constant is `None`.
fn coeff_key(term: Expr) -> (Rational, Option<Expr>) {
    match term {
        Expr::Const(c) => (c, None),
        Expr::Prod(fs) => {
            let mut coeff = Rational::one();
            let mut rest: Vec<Expr> = Vec::with_capacity(fs.len());
            for f in fs {
                if let Expr::Const(c) = f {
                    coeff *= c;
                } else {
                    rest.push(f);
                }
            }
            match rest.len() {
                0 => (coeff, None),
                1 => (coeff, Some(rest.into_iter().next().unwrap())),
                _ => (coeff, Some(Expr::Prod(rest))),
            }
        }
        other => (Rational::one(), Some(other)),
    }
}

fn canon_sum(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut by_key: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut stack = terms;
    stack.reverse();
    while let Some(t) = stack.pop() {
        if let Expr::Sum(inner) = t {
            for x in inner.into_iter().rev() {
                stack.push(x);
            }
            continue;
        }
        let (c, key) = coeff_key(t);
        match key {
            None => constant += c,
            Some(k) => {
                let entry = by_key.entry(k).or_insert_with(Rational::zero);
                *entry += c;
            }
        }
    }
    let mut out: Vec<Expr> = Vec::with_capacity(by_key.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::Const(constant));
    }
    for (key, coeff) in by_key {
        if coeff.is_zero() {
            continue;
        }
        out.push(apply_coeff(coeff, key));
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::Sum(out),
    }
}

fn apply_coeff(c: Rational, key: Expr) -> Expr {
    if c.is_one() {
        return key;
    }
    match key {
        Expr::Prod(mut fs) => {
            fs.insert(0, Expr::Const(c));
            Expr::Prod(fs)
        }
        other => Expr::Prod(vec![Expr::Const(c), other]),
    }
}

fn canon_prod(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut by_base: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut exp_args: Vec<Expr> = Vec::new();

    // two passes: the first may produce an exp-combination whose canonical
    // form reintroduces power factors; those are folded in a second pass
    // where exp factors are kept opaque.
    collect_factors(factors, &mut coeff, &mut by_base, &mut exp_args, true);
    if coeff.is_zero() {
        return Expr::zero();
    }
    if !exp_args.is_empty() {
        let combined = canon_exp(canon_sum(std::mem::take(&mut exp_args)));
        collect_factors(vec![combined], &mut coeff, &mut by_base, &mut exp_args, false);
        if coeff.is_zero() {
            return Expr::zero();
        }
    }

    let mut out: Vec<Expr> = Vec::new();
    for (base, r) in by_base {
        if r.is_zero() {
            continue;
        }
        let f = canon_pow(base, r);
        match f {
            Expr::Const(c) => coeff *= c,
            // folding (e.g. (z^(1/2))^2 -> z) cannot produce nested products
            other => out.push(other),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    out.sort();
    if !coeff.is_one() || out.is_empty() {
        out.insert(0, Expr::Const(coeff));
    }
    match out.len() {
        0 => Expr::one(),
        1 => out.into_iter().next().unwrap(),
        _ => Expr::Prod(out),
    }
}

fn collect_factors(
    factors: Vec<Expr>,
    coeff: &mut Rational,
    by_base: &mut BTreeMap<Expr, Rational>,
    exp_args: &mut Vec<Expr>,
    combine_exp: bool,
) {
    let mut stack = factors;
    stack.reverse();
    while let Some(f) = stack.pop() {
        match f {
            Expr::Const(c) => *coeff *= c,
            Expr::Prod(inner) => {
                for x in inner.into_iter().rev() {
                    stack.push(x);
                }
            }
            Expr::Pow(b, r) => {
                let entry = by_base.entry(*b).or_insert_with(Rational::zero);
                *entry += r;
            }
            Expr::Exp(x) if combine_exp => exp_args.push(*x),
            other => {
                let entry = by_base.entry(other).or_insert_with(Rational::zero);
                *entry += Rational::one();
            }
        }
    }
}

fn canon_pow(base: Expr, r: Rational) -> Expr {
    if r.is_zero() {
        return Expr::one();
    }
    if r.is_one() {
        return base;
    }
    match base {
        Expr::Const(c) => match exact_rational_pow(&c, &r) {
            Some(v) => Expr::Const(v),
            None => Expr::Pow(Box::new(Expr::Const(c)), r),
        },
        Expr::Pow(inner, r2) => canon_pow(*inner, r2 * r),
        Expr::Prod(fs) => canon_prod(fs.into_iter().map(|f| canon_pow(f, r.clone())).collect()),
        Expr::Exp(x) => canon_exp(canon_prod(vec![Expr::Const(r), *x])),
        other => Expr::Pow(Box::new(other), r),
    }
}

fn canon_exp(arg: Expr) -> Expr {
    match arg {
        Expr::Const(c) if c.is_zero() => Expr::one(),
        Expr::Ln(x) => *x,
        Expr::Sum(terms) => {
            // pull out rational multiples of logarithms: exp(q*ln x + rest)
            // = x^q * exp(rest)
            let mut pows: Vec<Expr> = Vec::new();
            let mut rest: Vec<Expr> = Vec::new();
            for t in terms {
                match split_log_multiple(&t) {
                    Some((q, x)) => pows.push(canon_pow(x, q)),
                    None => rest.push(t),
                }
            }
            if pows.is_empty() {
                return Expr::Exp(Box::new(canon_sum(rest)));
            }
            let remainder = canon_sum(rest);
            if !remainder.is_zero_const() {
                pows.push(Expr::Exp(Box::new(remainder)));
            }
            canon_prod(pows)
        }
        other => Expr::Exp(Box::new(other)),
    }
}

/// Matches `ln x` or `Prod[Const q, Ln x]`, returning (q, x).
fn split_log_multiple(t: &Expr) -> Option<(Rational, Expr)> {
    match t {
        Expr::Ln(x) => Some((Rational::one(), (**x).clone())),
        Expr::Prod(fs) if fs.len() == 2 => match (&fs[0], &fs[1]) {
            (Expr::Const(q), Expr::Ln(x)) => Some((q.clone(), (**x).clone())),
            _ => None,
        },
        _ => None,
    }
}

fn canon_ln(arg: Expr) -> Expr {
    match arg {
        Expr::Const(c) if c.is_one() => Expr::zero(),
        Expr::Exp(x) => *x,
        other => Expr::Ln(Box::new(other)),
    }
}
