//! Function-symbol registry and parameter bindings.

use super::Expr;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type EvalFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub type DerivBuilder = Arc<dyn Fn(&Expr) -> Expr + Send + Sync>;

#[derive(Clone)]
pub struct FuncEntry {
    pub eval: EvalFn,
    /// Builds the derivative of `name(arg)` with respect to `arg` (the outer
    /// chain factor). `None` means differentiation through this symbol is an
    /// error.
    pub deriv: Option<DerivBuilder>,
}

/// Registered function symbols plus numeric parameter values.
///
/// Immutable once built; shared by reference across concurrent evaluations.
#[derive(Clone, Default)]
pub struct SymbolTable {
    funcs: HashMap<String, FuncEntry>,
    params: HashMap<String, f64>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: &str, entry: FuncEntry) {
        self.funcs.insert(name.to_string(), entry);
    }

    /// Register with the derivative expressed through another symbol,
    /// e.g. `J -> K` so that d/du J(u) = K(u).
    pub fn register_chain(&mut self, name: &str, deriv_symbol: &str, eval: EvalFn) {
        let d = deriv_symbol.to_string();
        self.register(
            name,
            FuncEntry {
                eval,
                deriv: Some(Arc::new(move |arg: &Expr| Expr::call(&d, arg.clone()))),
            },
        );
    }

    /// Register a terminal symbol: evaluable, but with no derivative rule.
    pub fn register_leaf(&mut self, name: &str, eval: EvalFn) {
        self.register(name, FuncEntry { eval, deriv: None });
    }

    pub fn set_param(&mut self, name: &str, value: f64) {
        self.params.insert(name.to_string(), value);
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    pub fn func(&self, name: &str) -> Result<&FuncEntry> {
        self.funcs
            .get(name)
            .ok_or_else(|| Error::Unregistered(name.to_string()))
    }

    pub fn has_func(&self, name: &str) -> bool {
        self.funcs.contains_key(name)
    }

    pub fn eval_func(&self, name: &str, x: f64) -> Result<f64> {
        let v = (self.func(name)?.eval)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("{name}({x}) is not finite")))
        }
    }

    pub fn deriv_of(&self, name: &str, arg: &Expr) -> Result<Expr> {
        let entry = self.func(name)?;
        match &entry.deriv {
            Some(rule) => Ok(rule(arg)),
            None => Err(Error::NoDerivative(name.to_string())),
        }
    }
}

impl fmt::Debug for SymbolTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.funcs.keys().collect();
        names.sort();
        f.debug_struct("SymbolTable")
            .field("funcs", &names)
            .field("params", &self.params)
            .finish()
    }
}
