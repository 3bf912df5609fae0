//! Minimal symbolic expression core.
//!
//! Expression trees over the variables `z`, `t`, `u`, `eta`, `lam` plus
//! opaque parameter symbols, with exact rational constants, registered
//! function symbols (`K`, `C`, `J`, `Jinv`, `F`, ... resolved through a
//! [`SymbolTable`]), differentiation, a canonical simplifier and double
//! precision evaluation.
//!
//! Design constraints honoured throughout:
//! * no floating point inside the tree — constants are exact rationals;
//! * power nodes carry rational exponents only; anything else is stored as
//!   `exp(c*ln(base))`;
//! * `z` and `t` range over positive reals, and fractional-power rewrites in
//!   the simplifier assume positive-valued bases (the governing equation
//!   lives on `z > 0`).

mod ast;
mod diff;
mod eval;
mod parse;
mod print;
mod simplify;
mod symtab;
mod zero;

pub use ast::{Expr, Rational};
pub use eval::Bindings;
pub use parse::parse;
pub use symtab::{DerivBuilder, EvalFn, FuncEntry, SymbolTable};
pub use zero::{is_zero, SampleRanges, ZeroCheck, ZeroPath};

#[cfg(test)]
mod tests;
