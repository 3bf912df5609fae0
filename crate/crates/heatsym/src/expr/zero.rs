//! Zero recognition: normal form first, seeded sampling as a fallback.
//!
//! Expressions built from generator components and coefficient quotients
//! (`J(u)/K(u)` and friends) do not always normalize to a literal zero, so
//! the checker falls back to evaluating at random in-domain points and
//! reports which path succeeded.

use super::{Bindings, Expr, SymbolTable};
use crate::sampling::Sampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroPath {
    NormalForm,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ZeroCheck {
    pub is_zero: bool,
    pub path: ZeroPath,
    /// Largest relative residual seen while sampling (0 for normal form).
    pub max_residual: f64,
    pub points_used: usize,
}

/// Ranges the sampler draws from, per variable name.
#[derive(Debug, Clone)]
pub struct SampleRanges {
    pub ranges: Vec<(String, f64, f64)>,
}

impl SampleRanges {
    pub fn new() -> Self {
        SampleRanges { ranges: Vec::new() }
    }

    pub fn with(mut self, var: &str, lo: f64, hi: f64) -> Self {
        self.ranges.push((var.to_string(), lo, hi));
        self
    }

    fn draw(&self, sampler: &mut Sampler) -> Bindings {
        let mut b = Bindings::new();
        for (v, lo, hi) in &self.ranges {
            b.insert(v.clone(), sampler.uniform(*lo, *hi));
        }
        b
    }
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self::new()
    }
}

/// Decide whether `e` is identically zero on the sampled domain.
///
/// The relative scale at each point is the sum of term magnitudes when `e`
/// is a sum (so large cancelling terms are measured against their own size),
/// else `1 + |e|`.
pub fn is_zero(
    e: &Expr,
    st: &SymbolTable,
    ranges: &SampleRanges,
    sampler: &mut Sampler,
    points: usize,
    rel_tol: f64,
) -> ZeroCheck {
    let canonical = e.simplify();
    if canonical.is_zero_const() {
        return ZeroCheck {
            is_zero: true,
            path: ZeroPath::NormalForm,
            max_residual: 0.0,
            points_used: 0,
        };
    }
    let mut max_rel: f64 = 0.0;
    let mut used = 0;
    let mut attempts = 0;
    while used < points && attempts < points * 20 {
        attempts += 1;
        let bindings = ranges.draw(sampler);
        let value = match canonical.eval(&bindings, st) {
            Ok(v) => v,
            Err(_) => continue, // outside some evaluator's domain; redraw
        };
        let scale = match &canonical {
            Expr::Sum(terms) => {
                let mut s = 0.0;
                let mut ok = true;
                for t in terms {
                    match t.eval(&bindings, st) {
                        Ok(v) => s += v.abs(),
                        Err(_) => {
                            ok = false;
                            break;
                        }
                    }
                }
                if !ok {
                    continue;
                }
                1.0 + s
            }
            _ => 1.0 + value.abs(),
        };
        max_rel = max_rel.max(value.abs() / scale);
        used += 1;
    }
    ZeroCheck {
        is_zero: used > 0 && max_rel < rel_tol,
        path: ZeroPath::Sampled,
        max_residual: max_rel,
        points_used: used,
    }
}
