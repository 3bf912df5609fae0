//! Constitutive coefficient models.
//!
//! A [`CoefficientModel`] carries the pair `(C(u), K(u))`, the geometry
//! parameter `nu`, and the admissible temperature interval on which both
//! coefficients are positive. It owns the Kirchhoff transform
//! `J(u) = ∫K(u)du`, its inverse, the quotient function
//! `F(u) = (C'/C - K'/K)^{-1}`, and the classification of `C/K` into the
//! constant and non-constant branches.

use crate::error::{Error, Result};
use crate::expr::{Bindings, Expr, SymbolTable};
use crate::numerics::{self, rational::rationalize};
use std::sync::Arc;

/// Coefficient family. `k0`, `c0` are positive amplitudes; the remaining
/// parameters shape the `u` dependence.
#[derive(Debug, Clone)]
pub enum Family {
    /// `K = k0 u^m`, `C = c0 u^n` on `u > 0`.
    PowerLaw { k0: f64, m: f64, c0: f64, n: f64 },
    /// `K = k0 e^{lam u}`, `C = c0 e^{mu u}` on all reals.
    Exponential { k0: f64, lam: f64, c0: f64, mu: f64 },
    /// `K = k0 (a + b u)`, `C = c0 (c + d u)` where both factors are positive.
    Linear {
        k0: f64,
        a: f64,
        b: f64,
        c0: f64,
        c: f64,
        d: f64,
    },
    /// Caller-supplied expressions in the single variable `u`.
    Custom {
        k_expr: Expr,
        c_expr: Expr,
        u_min: f64,
        u_max: f64,
    },
}

/// Classification of the quotient `C(u)/K(u)`.
#[derive(Debug, Clone)]
pub enum RatioClass {
    ConstantRatio { beta: f64 },
    NonConstant { ratio: Expr },
}

impl RatioClass {
    pub fn is_constant(&self) -> bool {
        matches!(self, RatioClass::ConstantRatio { .. })
    }
}

#[derive(Clone)]
pub struct CoefficientModel {
    family: Family,
    nu: f64,
    u_domain: (f64, f64),
    /// Derivative expressions for the custom family, differentiated once at
    /// build time; `None` for the closed-form families.
    custom: Option<CustomDerivatives>,
}

#[derive(Clone)]
struct CustomDerivatives {
    k: [Expr; 4], // K, K', K'', K'''
    c: [Expr; 3], // C, C', C''
    f: [Expr; 3], // F, F', F''
    u_ref: f64,
}

const POSITIVITY_SAMPLES: usize = 50;
const RATIO_SAMPLES: usize = 50;
const RATIO_REL_TOL: f64 = 1e-12;

impl std::fmt::Debug for CoefficientModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoefficientModel")
            .field("family", &self.family)
            .field("nu", &self.nu)
            .field("u_domain", &self.u_domain)
            .finish()
    }
}

impl CoefficientModel {
    /// Validate parameters, infer the admissible `u` interval, and check
    /// positivity of both coefficients on it (sampled).
    pub fn build(family: Family, nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Model(format!("nu must be positive, got {nu}")));
        }
        let (k0, c0) = match &family {
            Family::PowerLaw { k0, c0, .. }
            | Family::Exponential { k0, c0, .. }
            | Family::Linear { k0, c0, .. } => (*k0, *c0),
            Family::Custom { .. } => (1.0, 1.0),
        };
        if !(k0 > 0.0) || !(c0 > 0.0) {
            return Err(Error::Model(format!(
                "k0 and c0 must be strictly positive (k0 = {k0}, c0 = {c0})"
            )));
        }
        let u_domain = match &family {
            Family::PowerLaw { .. } => (0.0, f64::INFINITY),
            Family::Exponential { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Linear { a, b, c, d, .. } => {
                let i1 = positive_interval(*a, *b)?;
                let i2 = positive_interval(*c, *d)?;
                let lo = i1.0.max(i2.0);
                let hi = i1.1.min(i2.1);
                if lo >= hi {
                    return Err(Error::Model(
                        "empty u-domain: a+bu > 0 and c+du > 0 never hold together".into(),
                    ));
                }
                (lo, hi)
            }
            Family::Custom { u_min, u_max, .. } => {
                if !(u_min < u_max) {
                    return Err(Error::Model(format!(
                        "custom family needs u_min < u_max, got [{u_min}, {u_max}]"
                    )));
                }
                (*u_min, *u_max)
            }
        };
        let custom = match &family {
            Family::Custom { k_expr, c_expr, .. } => {
                for (label, e) in [("K", k_expr), ("C", c_expr)] {
                    let vars = e.free_vars();
                    if !vars.iter().all(|v| v == "u") {
                        return Err(Error::Model(format!(
                            "custom {label} may depend on `u` only, found variables {vars:?}"
                        )));
                    }
                }
                Some(build_custom_derivatives(
                    k_expr,
                    c_expr,
                    midpoint(u_domain),
                )?)
            }
            _ => None,
        };
        let model = CoefficientModel {
            family,
            nu,
            u_domain,
            custom,
        };
        // sampled positivity of K and C over the admissible interval
        for u in model.u_probe_points(POSITIVITY_SAMPLES) {
            let kv = model.k(u)?;
            let cv = model.c(u)?;
            if !(kv > 0.0) || !(cv > 0.0) {
                return Err(Error::Model(format!(
                    "coefficients must be positive on the u-domain; at u = {u}: K = {kv}, C = {cv}"
                )));
            }
        }
        Ok(model)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn u_domain(&self) -> (f64, f64) {
        self.u_domain
    }

    pub fn contains_u(&self, u: f64) -> bool {
        u > self.u_domain.0 && u < self.u_domain.1
    }

    /// Comfortable interior window for random sampling.
    pub fn sample_u_range(&self) -> (f64, f64) {
        let (lo, hi) = self.u_domain;
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => {
                let w = hi - lo;
                (lo + 0.2 * w, hi - 0.2 * w)
            }
            (true, false) => (lo + 0.4, lo + 2.5),
            (false, true) => (hi - 2.5, hi - 0.4),
            (false, false) => (-1.5, 1.5),
        }
    }

    fn u_probe_points(&self, n: usize) -> Vec<f64> {
        let (lo, hi) = self.sample_u_range();
        (0..n)
            .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
            .collect()
    }

    fn check_u(&self, u: f64) -> Result<()> {
        if self.contains_u(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "u = {u} outside the admissible interval ({}, {})",
                self.u_domain.0, self.u_domain.1
            )))
        }
    }

    // ---- coefficient evaluators -------------------------------------------

    pub fn k(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { k0, m, .. } => Ok(k0 * u.powf(*m)),
            Family::Exponential { k0, lam, .. } => Ok(k0 * (lam * u).exp()),
            Family::Linear { k0, a, b, .. } => Ok(k0 * (a + b * u)),
            Family::Custom { .. } => self.custom_eval(|c| &c.k[0], u),
        }
    }

    pub fn kp(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { k0, m, .. } => Ok(k0 * m * u.powf(m - 1.0)),
            Family::Exponential { k0, lam, .. } => Ok(k0 * lam * (lam * u).exp()),
            Family::Linear { k0, b, .. } => Ok(k0 * b),
            Family::Custom { .. } => self.custom_eval(|c| &c.k[1], u),
        }
    }

    pub fn kpp(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { k0, m, .. } => Ok(k0 * m * (m - 1.0) * u.powf(m - 2.0)),
            Family::Exponential { k0, lam, .. } => Ok(k0 * lam * lam * (lam * u).exp()),
            Family::Linear { .. } => Ok(0.0),
            Family::Custom { .. } => self.custom_eval(|c| &c.k[2], u),
        }
    }

    pub fn kppp(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { k0, m, .. } => Ok(k0 * m * (m - 1.0) * (m - 2.0) * u.powf(m - 3.0)),
            Family::Exponential { k0, lam, .. } => Ok(k0 * lam.powi(3) * (lam * u).exp()),
            Family::Linear { .. } => Ok(0.0),
            Family::Custom { .. } => self.custom_eval(|c| &c.k[3], u),
        }
    }

    pub fn c(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { c0, n, .. } => Ok(c0 * u.powf(*n)),
            Family::Exponential { c0, mu, .. } => Ok(c0 * (mu * u).exp()),
            Family::Linear { c0, c, d, .. } => Ok(c0 * (c + d * u)),
            Family::Custom { .. } => self.custom_eval(|cd| &cd.c[0], u),
        }
    }

    pub fn cp(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { c0, n, .. } => Ok(c0 * n * u.powf(n - 1.0)),
            Family::Exponential { c0, mu, .. } => Ok(c0 * mu * (mu * u).exp()),
            Family::Linear { c0, d, .. } => Ok(c0 * d),
            Family::Custom { .. } => self.custom_eval(|cd| &cd.c[1], u),
        }
    }

    pub fn cpp(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { c0, n, .. } => Ok(c0 * n * (n - 1.0) * u.powf(n - 2.0)),
            Family::Exponential { c0, mu, .. } => Ok(c0 * mu * mu * (mu * u).exp()),
            Family::Linear { .. } => Ok(0.0),
            Family::Custom { .. } => self.custom_eval(|cd| &cd.c[2], u),
        }
    }

    /// Antiderivative of `C`, the time density of the flux-divergence form
    /// (`∂_t ∫C(u)du = C(u) u_t`). Fixed with the same conventions as `J`.
    pub fn c_enthalpy(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { c0, n, .. } => {
                if (n + 1.0).abs() > 1e-14 {
                    Ok(c0 * u.powf(n + 1.0) / (n + 1.0))
                } else {
                    Ok(c0 * u.ln())
                }
            }
            Family::Exponential { c0, mu, .. } => {
                if mu.abs() > 1e-14 {
                    Ok(c0 / mu * (mu * u).exp())
                } else {
                    Ok(c0 * u)
                }
            }
            Family::Linear { c0, c, d, .. } => Ok(c0 * (c * u + 0.5 * d * u * u)),
            Family::Custom { .. } => {
                let u_ref = self.custom.as_ref().unwrap().u_ref;
                numerics::integrate(|x| self.c(x), u_ref, u, 1e-12)
            }
        }
    }

    // ---- Kirchhoff transform ----------------------------------------------

    /// `J(u) = ∫ K(u) du`, fixed per the closed forms of the named families
    /// (no additive constant); the custom family anchors `J(u_ref) = 0` at
    /// the midpoint of its domain.
    pub fn j(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { k0, m, .. } => {
                if (m + 1.0).abs() > 1e-14 {
                    Ok(k0 * u.powf(m + 1.0) / (m + 1.0))
                } else {
                    Ok(k0 * u.ln())
                }
            }
            Family::Exponential { k0, lam, .. } => {
                if lam.abs() > 1e-14 {
                    Ok(k0 / lam * (lam * u).exp())
                } else {
                    Ok(k0 * u)
                }
            }
            Family::Linear { k0, a, b, .. } => Ok(k0 * (a * u + 0.5 * b * u * u)),
            Family::Custom { .. } => {
                let u_ref = self.custom.as_ref().unwrap().u_ref;
                numerics::integrate(|x| self.k(x), u_ref, u, 1e-12)
            }
        }
    }

    /// Open range of `J` over the `u`-domain (`J` is strictly increasing
    /// because `K > 0`).
    pub fn j_range(&self) -> (f64, f64) {
        match &self.family {
            Family::PowerLaw { m, .. } => {
                if (m + 1.0).abs() <= 1e-14 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if *m > -1.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            Family::Exponential { lam, .. } => {
                if lam.abs() <= 1e-14 {
                    (f64::NEG_INFINITY, f64::INFINITY)
                } else if *lam > 0.0 {
                    (0.0, f64::INFINITY)
                } else {
                    (f64::NEG_INFINITY, 0.0)
                }
            }
            Family::Linear { .. } | Family::Custom { .. } => {
                let (lo, hi) = self.u_domain;
                let probe = |endpoint: f64, lower: bool| -> f64 {
                    if endpoint.is_finite() {
                        let eps = 1e-12 * (1.0 + endpoint.abs());
                        self.j(if lower { endpoint + eps } else { endpoint - eps })
                            .unwrap_or(if lower {
                                f64::NEG_INFINITY
                            } else {
                                f64::INFINITY
                            })
                    } else if lower {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                };
                (probe(lo, true), probe(hi, false))
            }
        }
    }

    /// Inverse Kirchhoff transform. Closed form for the named families,
    /// bracketed root finding for the custom family.
    pub fn j_inverse(&self, v: f64) -> Result<f64> {
        let (lo, hi) = self.j_range();
        if !(v > lo && v < hi) {
            return Err(Error::OutOfRange {
                what: format!("J over ({}, {})", self.u_domain.0, self.u_domain.1),
                value: v,
            });
        }
        match &self.family {
            Family::PowerLaw { k0, m, .. } => {
                if (m + 1.0).abs() > 1e-14 {
                    Ok(((m + 1.0) * v / k0).powf(1.0 / (m + 1.0)))
                } else {
                    Ok((v / k0).exp())
                }
            }
            Family::Exponential { k0, lam, .. } => {
                if lam.abs() > 1e-14 {
                    Ok((lam * v / k0).ln() / lam)
                } else {
                    Ok(v / k0)
                }
            }
            Family::Linear { k0, a, b, .. } => {
                if b.abs() > 1e-14 {
                    let disc = a * a + 2.0 * b * v / k0;
                    if disc < 0.0 {
                        return Err(Error::OutOfRange {
                            what: "J (negative discriminant)".into(),
                            value: v,
                        });
                    }
                    Ok((-a + disc.sqrt()) / b)
                } else {
                    Ok(v / (k0 * a))
                }
            }
            Family::Custom { .. } => {
                let u_ref = self.custom.as_ref().unwrap().u_ref;
                let f = |u: f64| Ok(self.j(u)? - v);
                let (lo_u, hi_u) =
                    numerics::expand_bracket(&f, u_ref, self.u_domain.0, self.u_domain.1)?;
                numerics::brent(f, lo_u, hi_u, 1e-12 * (1.0 + v.abs()))
            }
        }
    }

    // ---- the quotient function F ------------------------------------------

    /// `F(u) = (C'/C - K'/K)^{-1}`. Errors on the constant-ratio branch
    /// where the denominator vanishes identically.
    pub fn f_cap(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { m, n, .. } => {
                if (n - m).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(u / (n - m))
                }
            }
            Family::Exponential { lam, mu, .. } => {
                if (mu - lam).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(1.0 / (mu - lam))
                }
            }
            Family::Linear { a, b, c, d, .. } => {
                let det = d * a - b * c;
                if det.abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok((c + d * u) * (a + b * u) / det)
                }
            }
            Family::Custom { .. } => {
                let g = self.cp(u)? / self.c(u)? - self.kp(u)? / self.k(u)?;
                if g.abs() <= 1e-13 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(1.0 / g)
                }
            }
        }
    }

    pub fn f_prime(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { m, n, .. } => {
                if (n - m).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(1.0 / (n - m))
                }
            }
            Family::Exponential { lam, mu, .. } => {
                if (mu - lam).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(0.0)
                }
            }
            Family::Linear { a, b, c, d, .. } => {
                let det = d * a - b * c;
                if det.abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok((d * (a + b * u) + b * (c + d * u)) / det)
                }
            }
            Family::Custom { .. } => self.custom_eval(|cd| &cd.f[1], u),
        }
    }

    pub fn f_second(&self, u: f64) -> Result<f64> {
        self.check_u(u)?;
        match &self.family {
            Family::PowerLaw { m, n, .. } => {
                if (n - m).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(0.0)
                }
            }
            Family::Exponential { lam, mu, .. } => {
                if (mu - lam).abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(0.0)
                }
            }
            Family::Linear { a, b, c, d, .. } => {
                let det = d * a - b * c;
                if det.abs() <= 1e-14 {
                    Err(self.f_singularity(u))
                } else {
                    Ok(2.0 * b * d / det)
                }
            }
            Family::Custom { .. } => self.custom_eval(|cd| &cd.f[2], u),
        }
    }

    fn f_singularity(&self, u: f64) -> Error {
        Error::Singularity(format!(
            "F(u) undefined at u = {u}: C'/C equals K'/K (constant-ratio direction)"
        ))
    }

    fn custom_eval(&self, pick: impl Fn(&CustomDerivatives) -> &Expr, u: f64) -> Result<f64> {
        let cd = self.custom.as_ref().expect("custom family");
        let mut b = Bindings::new();
        b.insert("u".into(), u);
        pick(cd).eval(&b, &SymbolTable::new())
    }

    // ---- ratio classification ---------------------------------------------

    /// Constant iff the symbolic quotient normalizes to a constant, or the
    /// sampled values agree to 1e-12 relative over 50 points.
    pub fn ratio_class(&self) -> RatioClass {
        let ratio_expr = Expr::div(self.c_expr(), self.k_expr()).simplify();
        if let Expr::Const(c) = &ratio_expr {
            return RatioClass::ConstantRatio {
                beta: crate::numerics::rational::rational_to_f64(c),
            };
        }
        let mut values = Vec::with_capacity(RATIO_SAMPLES);
        for u in self.ratio_probe_points() {
            if let (Ok(cv), Ok(kv)) = (self.c(u), self.k(u)) {
                values.push(cv / kv);
            }
        }
        if values.len() >= RATIO_SAMPLES / 2 {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let spread = values
                .iter()
                .map(|v| (v - mean).abs())
                .fold(0.0f64, f64::max);
            if spread <= RATIO_REL_TOL * (1.0 + mean.abs()) {
                return RatioClass::ConstantRatio {
                    beta: self.exact_beta(mean),
                };
            }
        }
        RatioClass::NonConstant { ratio: ratio_expr }
    }

    /// Log-spaced probes when the domain allows, linear otherwise.
    fn ratio_probe_points(&self) -> Vec<f64> {
        let (lo, hi) = self.u_domain;
        if lo >= 0.0 && !hi.is_finite() {
            let (a, b) = (lo.max(1e-3), 1e3);
            (0..RATIO_SAMPLES)
                .map(|i| a * (b / a).powf((i as f64 + 0.5) / RATIO_SAMPLES as f64))
                .collect()
        } else {
            self.u_probe_points(RATIO_SAMPLES)
        }
    }

    /// Prefer the analytically exact constant over the sampled mean.
    fn exact_beta(&self, sampled: f64) -> f64 {
        match &self.family {
            Family::PowerLaw { k0, c0, .. } | Family::Exponential { k0, c0, .. } => c0 / k0,
            Family::Linear {
                k0,
                c0,
                a,
                b,
                c,
                d,
            } => {
                if b.abs() > 1e-14 {
                    c0 * d / (k0 * b)
                } else {
                    c0 * c / (k0 * a)
                }
            }
            Family::Custom { .. } => sampled,
        }
    }

    /// `beta = C/K` for constant-ratio models.
    pub fn beta(&self) -> Option<f64> {
        match self.ratio_class() {
            RatioClass::ConstantRatio { beta } => Some(beta),
            RatioClass::NonConstant { .. } => None,
        }
    }

    // ---- symbolic forms -----------------------------------------------------

    pub fn k_expr(&self) -> Expr {
        match &self.family {
            Family::PowerLaw { k0, m, .. } => scaled_power(*k0, *m),
            Family::Exponential { k0, lam, .. } => scaled_exp(*k0, *lam),
            Family::Linear { k0, a, b, .. } => scaled_affine(*k0, *a, *b),
            Family::Custom { k_expr, .. } => k_expr.clone(),
        }
    }

    pub fn c_expr(&self) -> Expr {
        match &self.family {
            Family::PowerLaw { c0, n, .. } => scaled_power(*c0, *n),
            Family::Exponential { c0, mu, .. } => scaled_exp(*c0, *mu),
            Family::Linear { c0, c, d, .. } => scaled_affine(*c0, *c, *d),
            Family::Custom { c_expr, .. } => c_expr.clone(),
        }
    }

    /// Closed-form `J` as an expression in `u` (the quadrature-backed custom
    /// family returns the opaque `J(u)` symbol).
    pub fn j_expr(&self) -> Expr {
        match &self.family {
            Family::PowerLaw { k0, m, .. } => {
                if (m + 1.0).abs() > 1e-14 {
                    Expr::Prod(vec![Expr::from_f64(k0 / (m + 1.0)), power_of_u(m + 1.0)])
                        .simplify()
                } else {
                    Expr::Prod(vec![Expr::from_f64(*k0), Expr::ln(Expr::var("u"))]).simplify()
                }
            }
            Family::Exponential { k0, lam, .. } => {
                if lam.abs() > 1e-14 {
                    Expr::Prod(vec![Expr::from_f64(k0 / lam), exp_of_u(*lam)]).simplify()
                } else {
                    Expr::Prod(vec![Expr::from_f64(*k0), Expr::var("u")]).simplify()
                }
            }
            Family::Linear { k0, a, b, .. } => Expr::Prod(vec![
                Expr::from_f64(*k0),
                Expr::Sum(vec![
                    Expr::Prod(vec![Expr::from_f64(*a), Expr::var("u")]),
                    Expr::Prod(vec![
                        Expr::from_f64(b / 2.0),
                        Expr::pow_int(Expr::var("u"), 2),
                    ]),
                ]),
            ])
            .simplify(),
            Family::Custom { .. } => Expr::call("J", Expr::var("u")),
        }
    }

    /// Closed-form `F` where the ratio is non-constant; `None` otherwise.
    pub fn f_expr(&self) -> Option<Expr> {
        match &self.family {
            Family::PowerLaw { m, n, .. } => {
                if (n - m).abs() <= 1e-14 {
                    None
                } else {
                    Some(
                        Expr::Prod(vec![Expr::from_f64(1.0 / (n - m)), Expr::var("u")]).simplify(),
                    )
                }
            }
            Family::Exponential { lam, mu, .. } => {
                if (mu - lam).abs() <= 1e-14 {
                    None
                } else {
                    Some(Expr::from_f64(1.0 / (mu - lam)))
                }
            }
            Family::Linear { a, b, c, d, .. } => {
                let det = d * a - b * c;
                if det.abs() <= 1e-14 {
                    None
                } else {
                    Some(
                        Expr::Prod(vec![
                            Expr::from_f64(1.0 / det),
                            scaled_affine(1.0, *c, *d),
                            scaled_affine(1.0, *a, *b),
                        ])
                        .simplify(),
                    )
                }
            }
            Family::Custom { .. } => {
                if self.ratio_class().is_constant() {
                    None
                } else {
                    self.custom.as_ref().map(|cd| cd.f[0].clone())
                }
            }
        }
    }

    /// Symbol table binding `K, C, J, Jinv, F` and their derivative chains
    /// to this model's evaluators; `J' = K` always holds.
    pub fn symbol_table(&self) -> SymbolTable {
        let mut st = SymbolTable::new();
        let m = Arc::new(self.clone());

        macro_rules! chain {
            ($name:expr, $deriv:expr, $method:ident) => {{
                let mm = m.clone();
                st.register_chain($name, $deriv, Arc::new(move |u| mm.$method(u)));
            }};
        }
        macro_rules! leaf {
            ($name:expr, $method:ident) => {{
                let mm = m.clone();
                st.register_leaf($name, Arc::new(move |u| mm.$method(u)));
            }};
        }
        chain!("J", "K", j);
        chain!("K", "Kp", k);
        chain!("Kp", "Kpp", kp);
        chain!("Kpp", "Kppp", kpp);
        chain!("C", "Cp", c);
        chain!("Cp", "Cpp", cp);
        chain!("F", "Fp", f_cap);
        chain!("Fp", "Fpp", f_prime);
        leaf!("Kppp", kppp);
        leaf!("Cpp", cpp);
        leaf!("Fpp", f_second);
        // d/dv Jinv(v) = 1 / K(Jinv(v))
        let mm = m.clone();
        st.register(
            "Jinv",
            crate::expr::FuncEntry {
                eval: Arc::new(move |v| mm.j_inverse(v)),
                deriv: Some(Arc::new(|arg: &Expr| {
                    Expr::pow_int(Expr::call("K", Expr::call("Jinv", arg.clone())), -1)
                })),
            },
        );
        st.register(
            "li",
            crate::expr::FuncEntry {
                eval: Arc::new(numerics::li),
                deriv: Some(Arc::new(|arg: &Expr| {
                    Expr::pow_int(Expr::ln(arg.clone()), -1)
                })),
            },
        );
        st.register(
            "liinv",
            crate::expr::FuncEntry {
                eval: Arc::new(numerics::li_inv),
                deriv: Some(Arc::new(|arg: &Expr| {
                    Expr::ln(Expr::call("liinv", arg.clone()))
                })),
            },
        );
        st.set_param("nu", self.nu);
        if let RatioClass::ConstantRatio { beta } = self.ratio_class() {
            st.set_param("beta", beta);
        }
        st
    }
}

fn midpoint((lo, hi): (f64, f64)) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo + 1.0,
        (false, true) => hi - 1.0,
        (false, false) => 1.0,
    }
}

/// Interval where `a + b u > 0`.
fn positive_interval(a: f64, b: f64) -> Result<(f64, f64)> {
    if b == 0.0 {
        if a > 0.0 {
            Ok((f64::NEG_INFINITY, f64::INFINITY))
        } else {
            Err(Error::Model(format!("constant factor {a} is not positive")))
        }
    } else if b > 0.0 {
        Ok((-a / b, f64::INFINITY))
    } else {
        Ok((f64::NEG_INFINITY, -a / b))
    }
}

fn build_custom_derivatives(k_expr: &Expr, c_expr: &Expr, u_ref: f64) -> Result<CustomDerivatives> {
    let st = SymbolTable::new();
    let k0 = k_expr.simplify();
    let k1 = k0.diff("u", &st)?;
    let k2 = k1.diff("u", &st)?;
    let k3 = k2.diff("u", &st)?;
    let c0 = c_expr.simplify();
    let c1 = c0.diff("u", &st)?;
    let c2 = c1.diff("u", &st)?;
    // F = 1 / (C'/C - K'/K)
    let g = Expr::sub(
        Expr::div(c1.clone(), c0.clone()),
        Expr::div(k1.clone(), k0.clone()),
    )
    .simplify();
    let f0 = Expr::pow_int(g, -1).simplify();
    let f1 = f0.diff("u", &st)?;
    let f2 = f1.diff("u", &st)?;
    Ok(CustomDerivatives {
        k: [k0, k1, k2, k3],
        c: [c0, c1, c2],
        f: [f0, f1, f2],
        u_ref,
    })
}

fn power_of_u(e: f64) -> Expr {
    match rationalize(e, 1_000_000, 1e-12) {
        Some((p, q)) => Expr::pow_ratio(Expr::var("u"), p, q),
        None => Expr::exp(Expr::Prod(vec![
            Expr::from_f64(e),
            Expr::ln(Expr::var("u")),
        ])),
    }
}

fn scaled_power(amp: f64, e: f64) -> Expr {
    if e == 0.0 {
        return Expr::from_f64(amp);
    }
    Expr::Prod(vec![Expr::from_f64(amp), power_of_u(e)]).simplify()
}

fn exp_of_u(rate: f64) -> Expr {
    Expr::exp(Expr::Prod(vec![Expr::from_f64(rate), Expr::var("u")]))
}

fn scaled_exp(amp: f64, rate: f64) -> Expr {
    if rate == 0.0 {
        return Expr::from_f64(amp);
    }
    Expr::Prod(vec![Expr::from_f64(amp), exp_of_u(rate)]).simplify()
}

fn scaled_affine(amp: f64, a: f64, b: f64) -> Expr {
    Expr::Prod(vec![
        Expr::from_f64(amp),
        Expr::Sum(vec![
            Expr::from_f64(a),
            Expr::Prod(vec![Expr::from_f64(b), Expr::var("u")]),
        ]),
    ])
    .simplify()
}

// ---- model spec files -------------------------------------------------------

/// Parse the plain-text key-value model spec format.
///
/// Keys: `family = power|exp|linear|custom`, `nu = <real>`, the family's
/// numeric parameters (`k0 m c0 n`, `k0 lam c0 mu`, `k0 a b c0 c d`), and
/// for the custom family `K = "<expr>"`, `C = "<expr>"` plus optional
/// `u_min`/`u_max` (defaults -1, 1). `#` starts a comment.
pub fn parse_spec_text(text: &str) -> Result<CoefficientModel> {
    use std::collections::HashMap;
    let mut kv: HashMap<String, String> = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("spec line {}: expected `key = value`", lineno + 1))
        })?;
        kv.insert(
            key.trim().to_string(),
            value.trim().trim_matches('"').to_string(),
        );
    }
    let get_num = |key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| Error::Config(format!("spec missing key `{key}`")))?
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("spec key `{key}` is not a number")))
    };
    let nu = get_num("nu")?;
    let family = match kv
        .get("family")
        .ok_or_else(|| Error::Config("spec missing key `family`".into()))?
        .as_str()
    {
        "power" => Family::PowerLaw {
            k0: get_num("k0")?,
            m: get_num("m")?,
            c0: get_num("c0")?,
            n: get_num("n")?,
        },
        "exp" => Family::Exponential {
            k0: get_num("k0")?,
            lam: get_num("lam")?,
            c0: get_num("c0")?,
            mu: get_num("mu")?,
        },
        "linear" => Family::Linear {
            k0: get_num("k0")?,
            a: get_num("a")?,
            b: get_num("b")?,
            c0: get_num("c0")?,
            c: get_num("c")?,
            d: get_num("d")?,
        },
        "custom" => {
            let k_src = kv
                .get("K")
                .ok_or_else(|| Error::Config("custom family needs `K = \"<expr>\"`".into()))?;
            let c_src = kv
                .get("C")
                .ok_or_else(|| Error::Config("custom family needs `C = \"<expr>\"`".into()))?;
            Family::Custom {
                k_expr: crate::expr::parse(k_src)?,
                c_expr: crate::expr::parse(c_src)?,
                u_min: kv.get("u_min").map_or(Ok(-1.0), |s| {
                    s.parse().map_err(|_| Error::Config("bad u_min".into()))
                })?,
                u_max: kv.get("u_max").map_or(Ok(1.0), |s| {
                    s.parse().map_err(|_| Error::Config("bad u_max".into()))
                })?,
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown family `{other}` (expected power | exp | linear | custom)"
            )))
        }
    };
    CoefficientModel::build(family, nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    pub fn power(k0: f64, m: f64, c0: f64, n: f64, nu: f64) -> CoefficientModel {
        CoefficientModel::build(Family::PowerLaw { k0, m, c0, n }, nu).unwrap()
    }

    pub fn exponential(k0: f64, lam: f64, c0: f64, mu: f64, nu: f64) -> CoefficientModel {
        CoefficientModel::build(Family::Exponential { k0, lam, c0, mu }, nu).unwrap()
    }

    #[test]
    fn build_validates() {
        assert!(CoefficientModel::build(
            Family::PowerLaw {
                k0: 1.0,
                m: 2.0,
                c0: 3.0,
                n: 2.0
            },
            1.0
        )
        .is_ok());
        // nu = 0 rejected
        assert!(CoefficientModel::build(
            Family::PowerLaw {
                k0: 1.0,
                m: 1.0,
                c0: 1.0,
                n: 1.0
            },
            0.0
        )
        .is_err());
        // k0 <= 0 rejected
        assert!(CoefficientModel::build(
            Family::PowerLaw {
                k0: 0.0,
                m: 1.0,
                c0: 1.0,
                n: 1.0
            },
            1.0
        )
        .is_err());
    }

    #[test]
    fn linear_domain_from_sign_analysis() {
        let m = CoefficientModel::build(
            Family::Linear {
                k0: 1.0,
                a: 1.0,
                b: -1.0,
                c0: 1.0,
                c: 1.0,
                d: 1.0,
            },
            2.0,
        )
        .unwrap();
        let (lo, hi) = m.u_domain();
        assert_eq!((lo, hi), (-1.0, 1.0));
    }

    #[test]
    fn ratio_classification() {
        match power(1.0, 2.0, 3.0, 2.0, 1.0).ratio_class() {
            RatioClass::ConstantRatio { beta } => assert_eq!(beta, 3.0),
            other => panic!("expected constant ratio, got {other:?}"),
        }
        match exponential(1.0, 2.0, 4.0, 2.0, 1.0).ratio_class() {
            RatioClass::ConstantRatio { beta } => assert_eq!(beta, 4.0),
            other => panic!("expected constant ratio, got {other:?}"),
        }
        // linear with c*b = a*d is proportional: (2+4u) = 2(1+2u)
        let m = CoefficientModel::build(
            Family::Linear {
                k0: 1.0,
                a: 1.0,
                b: 2.0,
                c0: 1.0,
                c: 2.0,
                d: 4.0,
            },
            1.0,
        )
        .unwrap();
        match m.ratio_class() {
            RatioClass::ConstantRatio { beta } => assert!((beta - 2.0).abs() < 1e-14),
            other => panic!("expected constant ratio, got {other:?}"),
        }
        assert!(!power(1.0, 1.0, 1.0, 3.0, 1.0).ratio_class().is_constant());
    }

    #[test]
    fn j_closed_forms() {
        // k0 = 2, m = 1: J(3) = 2*9/2 = 9
        assert_eq!(power(2.0, 1.0, 1.0, 1.0, 1.0).j(3.0).unwrap(), 9.0);
        // exponential k0 = 1, lam = 2: J(0) = 1/2
        assert_eq!(exponential(1.0, 2.0, 1.0, 2.0, 1.0).j(0.0).unwrap(), 0.5);
        // power m = -1: J(1) = ln 1 = 0
        assert_eq!(power(1.0, -1.0, 1.0, 1.0, 1.0).j(1.0).unwrap(), 0.0);
    }

    #[test]
    fn j_inverse_closed_forms_and_round_trip() {
        // power k0 = 1, m = 1: Jinv(2) = sqrt(4) = 2
        assert_eq!(power(1.0, 1.0, 1.0, 1.0, 1.0).j_inverse(2.0).unwrap(), 2.0);
        // exponential k0 = 1, lam = 1: Jinv(1) = ln 1 = 0
        assert_eq!(
            exponential(1.0, 1.0, 1.0, 1.0, 1.0).j_inverse(1.0).unwrap(),
            0.0
        );
        let mut s = Sampler::new(11);
        for model in [
            power(2.0, 1.5, 1.0, 1.5, 1.0),
            power(1.0, -1.0, 1.0, 2.0, 1.0),
            exponential(1.0, -0.5, 1.0, 1.0, 1.0),
            CoefficientModel::build(
                Family::Linear {
                    k0: 2.0,
                    a: 1.0,
                    b: 0.5,
                    c0: 1.0,
                    c: 1.0,
                    d: 0.0,
                },
                1.0,
            )
            .unwrap(),
        ] {
            let (lo, hi) = model.sample_u_range();
            for _ in 0..25 {
                let u0 = s.uniform(lo, hi);
                let v = model.j(u0).unwrap();
                let u1 = model.j_inverse(v).unwrap();
                assert!(
                    (u0 - u1).abs() < 1e-10 * (1.0 + u0.abs()),
                    "round trip failed for {model:?} at u = {u0}"
                );
            }
        }
    }

    #[test]
    fn j_inverse_range_errors() {
        // power m = 1 has J-range (0, inf)
        assert!(power(1.0, 1.0, 1.0, 1.0, 1.0).j_inverse(-0.5).is_err());
        assert!(power(1.0, 1.0, 1.0, 1.0, 1.0).j_inverse(0.0).is_err());
    }

    #[test]
    fn f_values_and_defining_relation() {
        // power n != m: F = u/(n-m)
        let m = power(1.0, 1.0, 1.0, 3.0, 1.0);
        assert!((m.f_cap(1.4).unwrap() - 0.7).abs() < 1e-15);
        // exponential mu != lam: F = 1/(mu-lam)
        let me = exponential(1.0, 1.0, 1.0, 3.0, 1.0);
        assert!((me.f_cap(-0.3).unwrap() - 0.5).abs() < 1e-15);
        // m = n singular
        assert!(power(1.0, 2.0, 1.0, 2.0, 1.0).f_cap(1.0).is_err());
        // defining relation (C'/C - K'/K) * F = 1, all families
        let lin = CoefficientModel::build(
            Family::Linear {
                k0: 1.0,
                a: 2.0,
                b: 1.0,
                c0: 1.0,
                c: 1.0,
                d: 3.0,
            },
            1.0,
        )
        .unwrap();
        let mut s = Sampler::new(3);
        for model in [m, me, lin] {
            let (lo, hi) = model.sample_u_range();
            for _ in 0..20 {
                let u = s.uniform(lo, hi);
                let g = model.cp(u).unwrap() / model.c(u).unwrap()
                    - model.kp(u).unwrap() / model.k(u).unwrap();
                let f = model.f_cap(u).unwrap();
                assert!((g * f - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn j_derivative_is_k_symbolically() {
        // d/du J_expr == K at 50 sampled points, every closed-form family
        let models = [
            power(1.0, 2.0, 1.0, 2.0, 1.0),
            power(3.0, -1.0, 1.0, 1.0, 1.0),
            exponential(2.0, 1.5, 1.0, 1.5, 1.0),
            CoefficientModel::build(
                Family::Linear {
                    k0: 1.5,
                    a: 1.0,
                    b: 2.0,
                    c0: 1.0,
                    c: 1.0,
                    d: 2.0,
                },
                1.0,
            )
            .unwrap(),
        ];
        let mut s = Sampler::new(17);
        for model in models {
            let st = model.symbol_table();
            let dj = model.j_expr().diff("u", &st).unwrap();
            let (lo, hi) = model.sample_u_range();
            for _ in 0..50 {
                let u = s.uniform(lo, hi);
                let mut b = Bindings::new();
                b.insert("u".into(), u);
                let lhs = dj.eval(&b, &st).unwrap();
                let rhs = model.k(u).unwrap();
                assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
            }
        }
    }

    #[test]
    fn j_strictly_increasing() {
        let m = power(1.0, 2.0, 1.0, 2.0, 1.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 1..40 {
            let u = 0.1 * i as f64;
            let v = m.j(u).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn custom_family_quadrature_and_inverse() {
        let fam = Family::Custom {
            k_expr: crate::expr::parse("1 + u^2").unwrap(),
            c_expr: crate::expr::parse("2 + u^2").unwrap(),
            u_min: -2.0,
            u_max: 2.0,
        };
        let m = CoefficientModel::build(fam, 1.0).unwrap();
        // J(u) = u + u^3/3 anchored at u_ref = 0
        let j1 = m.j(1.0).unwrap();
        assert!((j1 - (1.0 + 1.0 / 3.0)).abs() < 1e-10);
        let u = m.j_inverse(j1).unwrap();
        assert!((u - 1.0).abs() < 1e-9);
        assert!(!m.ratio_class().is_constant());
        // F = (C'/C - K'/K)^{-1}; sampled defining relation
        let f = m.f_cap(0.5).unwrap();
        let g = m.cp(0.5).unwrap() / m.c(0.5).unwrap() - m.kp(0.5).unwrap() / m.k(0.5).unwrap();
        assert!((f * g - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spec_file_round_trip() {
        let m = parse_spec_text(
            "# demo model\nfamily = power\nk0 = 1\nm = 1\nc0 = 1\nn = 3\nnu = 1.5\n",
        )
        .unwrap();
        assert_eq!(m.nu(), 1.5);
        assert!(!m.ratio_class().is_constant());
        let m = parse_spec_text(
            "family = custom\nK = \"1 + u^2\"\nC = \"exp(u)\"\nnu = 2\nu_min = -1\nu_max = 1\n",
        )
        .unwrap();
        assert_eq!(m.u_domain(), (-1.0, 1.0));
        assert!(parse_spec_text("family = power\nk0 = 1\nm = 1\nc0 = 1\nn = 3\n").is_err());
    }

    #[test]
    fn enthalpy_derivative_is_c() {
        let models = [
            power(1.0, 1.0, 2.0, 3.0, 1.0),
            exponential(1.0, 1.0, 2.0, 1.0, 1.0),
        ];
        for m in models {
            let h = 1e-6;
            for &u in &[0.7, 1.3, 2.1] {
                let d = (m.c_enthalpy(u + h).unwrap() - m.c_enthalpy(u - h).unwrap()) / (2.0 * h);
                assert!((d - m.c(u).unwrap()).abs() < 1e-7 * (1.0 + d.abs()));
            }
        }
    }
}
