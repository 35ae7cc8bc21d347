//! Symbols Φ: [0, ∞) → ℝ, their derivatives, and the admissibility checkers.

mod conditions;
mod derivative;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::bernstein::BernsteinSymbol;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::special::falling;

pub use conditions::{
    check_growth, check_singularity, check_univalence, detect_j0, full_condition_report, ConditionMode,
    ConditionReport, GrowthCheck, SingularityCheck, UnivalenceCheck, Witness, DEFAULT_J0_TOL,
};
pub use derivative::{finite_difference, DerivativeEstimate};

pub const DEFAULT_Z0: f64 = 2.0;
pub const DEFAULT_EPS0: f64 = 0.5;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type DerivFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Power { s: f64 },
    Relativistic { s: f64, m: f64 },
    TanhDn,
    CothDn,
    ExpBump,
    Bernstein(BernsteinSymbol),
    Expr(Arc<Expr>),
    Custom { eval: EvalFn, deriv: Option<DerivFn> },
}

/// A multiplier symbol together with its growth (`z0`) and singularity
/// (`eps0`) thresholds.
#[derive(Clone)]
pub struct Symbol {
    name: String,
    params: BTreeMap<String, f64>,
    kind: Kind,
    scale: f64,
    z0: f64,
    eps0: f64,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("scale", &self.scale)
            .field("z0", &self.z0)
            .field("eps0", &self.eps0)
            .finish()
    }
}

fn positive(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    match params.get(key) {
        None => Err(Error::param(key, "missing")),
        Some(v) if !(v.is_finite() && *v > 0.0) => Err(Error::param(key, format!("must be > 0, got {v}"))),
        Some(v) => Ok(*v),
    }
}

/// Looks up a catalogue symbol by name.
///
/// | name           | Φ(z)                   | params |
/// |----------------|------------------------|--------|
/// | `power`        | z^s                    | s      |
/// | `relativistic` | (m² + z)^{s/2} − m     | s, m   |
/// | `tanh_dn`      | √z · tanh √z           |        |
/// | `coth_dn`      | √z / tanh √z           |        |
/// | `exp_bump`     | z · e^{1−z}            |        |
///
/// `custom` symbols wrap a closure and are built with [`Symbol::custom`]
/// instead.
pub fn builtin_symbol(name: &str, params: &BTreeMap<String, f64>) -> Result<Symbol> {
    let kind = match name {
        "power" => Kind::Power { s: positive(params, "s")? },
        "relativistic" => Kind::Relativistic { s: positive(params, "s")?, m: positive(params, "m")? },
        "tanh_dn" => Kind::TanhDn,
        "coth_dn" => Kind::CothDn,
        "exp_bump" => Kind::ExpBump,
        "custom" => return Err(Error::param("custom", "custom symbols need an evaluator; use Symbol::custom")),
        other => return Err(Error::UnknownSymbol(other.to_string())),
    };
    Ok(Symbol::from_kind(name, params.clone(), kind))
}

impl Symbol {
    fn from_kind(name: &str, params: BTreeMap<String, f64>, kind: Kind) -> Symbol {
        Symbol { name: name.to_string(), params, kind, scale: 1.0, z0: DEFAULT_Z0, eps0: DEFAULT_EPS0 }
    }

    pub fn power(s: f64) -> Result<Symbol> {
        builtin_symbol("power", &BTreeMap::from([("s".into(), s)]))
    }

    pub fn relativistic(s: f64, m: f64) -> Result<Symbol> {
        builtin_symbol("relativistic", &BTreeMap::from([("s".into(), s), ("m".into(), m)]))
    }

    pub fn tanh_dn() -> Symbol {
        Symbol::from_kind("tanh_dn", BTreeMap::new(), Kind::TanhDn)
    }

    pub fn coth_dn() -> Symbol {
        Symbol::from_kind("coth_dn", BTreeMap::new(), Kind::CothDn)
    }

    pub fn exp_bump() -> Symbol {
        Symbol::from_kind("exp_bump", BTreeMap::new(), Kind::ExpBump)
    }

    /// Wraps a caller-supplied evaluator; derivatives fall back to finite
    /// differences unless [`with_derivative`](Self::with_derivative) is used.
    pub fn custom<F>(name: &str, f: F) -> Symbol
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Symbol::from_kind(name, BTreeMap::new(), Kind::Custom { eval: Arc::new(f), deriv: None })
    }

    /// Attaches an analytic derivative `(k, z) ↦ Φ^{(k)}(z)` to a custom symbol.
    pub fn with_derivative<G>(mut self, g: G) -> Symbol
    where
        G: Fn(usize, f64) -> f64 + Send + Sync + 'static,
    {
        if let Kind::Custom { deriv, .. } = &mut self.kind {
            *deriv = Some(Arc::new(g));
        }
        self
    }

    /// Symbol defined by an [`Expr`] source string in the variable `z`.
    pub fn from_expr(src: &str) -> Result<Symbol> {
        let e = Expr::parse(src)?;
        Ok(Symbol::from_kind(src, BTreeMap::new(), Kind::Expr(Arc::new(e))))
    }

    pub fn from_bernstein(bs: BernsteinSymbol) -> Symbol {
        let mut params = BTreeMap::from([("c1".into(), bs.c1()), ("c2".into(), bs.c2())]);
        for (i, (s, w)) in bs.atoms().iter().enumerate() {
            params.insert(format!("s{i}"), *s);
            params.insert(format!("w{i}"), *w);
        }
        Symbol::from_kind("bernstein", params, Kind::Bernstein(bs))
    }

    /// c·Φ for c > 0.
    pub fn scaled(&self, c: f64) -> Result<Symbol> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("scale", format!("must be > 0, got {c}")));
        }
        let mut out = self.clone();
        out.scale *= c;
        Ok(out)
    }

    pub fn with_thresholds(mut self, z0: f64, eps0: f64) -> Result<Symbol> {
        if !(z0 >= 2.0 && z0.is_finite()) {
            return Err(Error::param("z0", format!("must be ≥ 2, got {z0}")));
        }
        if !(eps0 > 0.0 && eps0 <= 0.5) {
            return Err(Error::param("eps0", format!("must lie in (0, 1/2], got {eps0}")));
        }
        self.z0 = z0;
        self.eps0 = eps0;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// True when derivatives come from closed forms or Taylor arithmetic.
    pub fn has_analytic_derivative(&self) -> bool {
        !matches!(self.kind, Kind::Custom { deriv: None, .. })
    }

    fn fail(&self, z: f64, msg: impl Into<String>) -> Error {
        Error::Evaluation { symbol: self.name.clone(), z, msg: msg.into() }
    }

    /// Φ(z) for z ≥ 0.
    pub fn eval(&self, z: f64) -> Result<f64> {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::domain("eval_symbol", format!("z must be finite and ≥ 0, got {z}")));
        }
        let v = self.scale * self.raw_eval(z);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.fail(z, format!("non-finite value {v}")))
        }
    }

    fn raw_eval(&self, z: f64) -> f64 {
        match &self.kind {
            Kind::Power { s } => z.powf(*s),
            Kind::Relativistic { s, m } => {
                // m^s((1 + z/m²)^{s/2} − 1) + (m^s − m), accurate near z = 0
                let ms = m.powf(*s);
                ms * (0.5 * s * (z / (m * m)).ln_1p()).exp_m1() + (ms - m)
            }
            Kind::TanhDn => z * tanh_ratio(z),
            Kind::CothDn => 1.0 / tanh_ratio(z),
            Kind::ExpBump => z * (1.0 - z).exp(),
            Kind::Bernstein(bs) => bs.eval(z),
            Kind::Expr(e) => e.eval(z),
            Kind::Custom { eval, .. } => eval(z),
        }
    }

    /// ∂^k Φ(z) for z > 0 (k = 0 is Φ itself).
    pub fn derivative(&self, k: usize, z: f64) -> Result<f64> {
        self.derivative_estimate(k, z).map(|d| d.value)
    }

    /// Like [`derivative`](Self::derivative) but also reports whether a
    /// finite-difference fallback stagnated.
    pub fn derivative_estimate(&self, k: usize, z: f64) -> Result<DerivativeEstimate> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::domain("eval_derivative", format!("z must be finite and > 0, got {z}")));
        }
        if k == 0 {
            return Ok(DerivativeEstimate { value: self.eval(z)?, analytic: true, stagnated: false });
        }
        let est = match self.analytic_derivative(k, z) {
            Some(v) => DerivativeEstimate { value: self.scale * v, analytic: true, stagnated: false },
            None => {
                let mut fd = finite_difference(|x| self.raw_eval(x), k, z);
                fd.value *= self.scale;
                fd
            }
        };
        if est.value.is_finite() {
            Ok(est)
        } else {
            Err(self.fail(z, format!("non-finite derivative of order {k}")))
        }
    }

    fn analytic_derivative(&self, k: usize, z: f64) -> Option<f64> {
        Some(match &self.kind {
            Kind::Power { s } => falling(*s, k) * z.powf(s - k as f64),
            Kind::Relativistic { s, m } => falling(0.5 * s, k) * (m * m + z).powf(0.5 * s - k as f64),
            Kind::TanhDn => (&Jet::variable(z, k) * &tanh_ratio_jet(z, k)).derivative(k),
            Kind::CothDn => tanh_ratio_jet(z, k).recip().derivative(k),
            // Φ^{(k)}(z) = (−1)^k (z − k) e^{1−z}
            Kind::ExpBump => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * (z - k as f64) * (1.0 - z).exp()
            }
            Kind::Bernstein(bs) => bs.derivative_k(k, z),
            Kind::Expr(e) => e.eval_jet(&Jet::variable(z, k)).derivative(k),
            Kind::Custom { deriv: Some(g), .. } => g(k, z),
            Kind::Custom { deriv: None, .. } => return None,
        })
    }
}

/// Power-series coefficients of g(z) = tanh(√z)/√z about z = 0.
fn tanh_ratio_series() -> &'static [f64] {
    static COEFFS: OnceLock<Vec<f64>> = OnceLock::new();
    COEFFS.get_or_init(|| {
        const TERMS: usize = 60;
        let t = Jet::variable(0.0, 2 * TERMS + 1).tanh();
        (0..TERMS).map(|n| t.coeffs()[2 * n + 1]).collect()
    })
}

// Radius of convergence of the series in z is π²/4.
const TANH_SERIES_SWITCH: f64 = 0.5;

fn tanh_ratio(z: f64) -> f64 {
    if z <= TANH_SERIES_SWITCH {
        tanh_ratio_series().iter().rev().fold(0.0, |acc, g| acc * z + g)
    } else {
        let r = z.sqrt();
        r.tanh() / r
    }
}

fn tanh_ratio_jet(z: f64, order: usize) -> Jet {
    if z <= TANH_SERIES_SWITCH {
        Jet::from_power_series(tanh_ratio_series(), z, order)
    } else {
        let r = Jet::variable(z, order).sqrt();
        r.tanh() / r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        let p = Symbol::power(0.5).unwrap();
        assert_eq!(p.eval(1.0).unwrap(), 1.0);
        assert_eq!(p.eval(4.0).unwrap(), 2.0);
        assert_eq!(p.eval(9.0).unwrap(), 3.0);
        assert_eq!(Symbol::tanh_dn().eval(0.0).unwrap(), 0.0);
        assert_eq!(Symbol::relativistic(1.0, 2.0).unwrap().eval(0.0).unwrap(), 0.0);
        assert!(matches!(p.eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(f64::NAN), Err(Error::Domain { .. })));
    }

    #[test]
    fn derivative_examples() {
        let sq = Symbol::power(2.0).unwrap();
        assert_relative_eq!(sq.derivative(1, 3.0).unwrap(), 6.0, max_relative = 1e-14);
        let p = Symbol::power(0.5).unwrap();
        assert_relative_eq!(p.derivative(1, 1.0).unwrap(), 0.5, max_relative = 1e-14);
        // Φ''(z) = (z − 2)e^{1−z}
        let b = Symbol::exp_bump();
        assert_relative_eq!(b.derivative(2, 1.0).unwrap(), -1.0, max_relative = 1e-14);
        assert!(matches!(p.derivative(1, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn builtin_errors() {
        let none = BTreeMap::new();
        assert!(matches!(builtin_symbol("nope", &none), Err(Error::UnknownSymbol(_))));
        assert!(matches!(builtin_symbol("power", &none), Err(Error::InvalidParameter { .. })));
        let neg = BTreeMap::from([("s".to_string(), -1.0)]);
        assert!(builtin_symbol("power", &neg).is_err());
        let rel = BTreeMap::from([("s".to_string(), 1.0), ("m".to_string(), 0.0)]);
        assert!(builtin_symbol("relativistic", &rel).is_err());
        assert!(builtin_symbol("custom", &none).is_err());
    }

    #[test]
    fn thresholds_validated() {
        let p = Symbol::power(1.0).unwrap();
        assert!(p.clone().with_thresholds(1.5, 0.5).is_err());
        assert!(p.clone().with_thresholds(2.0, 0.6).is_err());
        assert!(p.clone().with_thresholds(2.0, 0.0).is_err());
        let q = p.with_thresholds(3.0, 0.25).unwrap();
        assert_eq!((q.z0(), q.eps0()), (3.0, 0.25));
    }

    #[test]
    fn coth_dn_is_strictly_increasing() {
        let c = Symbol::coth_dn();
        let zs = crate::quadrature::geomspace(0.1, 10.0, 200);
        let vals: Vec<f64> = zs.iter().map(|&z| c.eval(z).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tanh_family_series_and_direct_agree_at_switch() {
        for z in [0.49f64, 0.5, 0.51] {
            let r = z.sqrt();
            assert_relative_eq!(tanh_ratio(z), r.tanh() / r, max_relative = 1e-15);
        }
        // derivatives on both sides of the switch against the expression route
        let via_expr = Symbol::from_expr("sqrt(z)*tanh(sqrt(z))").unwrap();
        let t = Symbol::tanh_dn();
        for z in [0.3, 0.5, 0.7, 3.0] {
            for k in 1..=5 {
                assert_relative_eq!(
                    t.derivative(k, z).unwrap(),
                    via_expr.derivative(k, z).unwrap(),
                    max_relative = 1e-9
                );
            }
        }
    }

    #[test]
    fn relativistic_near_zero_has_no_cancellation() {
        let r = Symbol::relativistic(1.0, 1.0).unwrap();
        // (1+z)^{1/2} − 1 ≈ z/2 − z²/8
        let z = 1e-12;
        assert_relative_eq!(r.eval(z).unwrap(), z / 2.0 - z * z / 8.0, max_relative = 1e-14);
    }

    #[test]
    fn scaling() {
        let p = Symbol::power(0.5).unwrap().scaled(3.0).unwrap();
        assert_relative_eq!(p.eval(4.0).unwrap(), 6.0);
        assert_relative_eq!(p.derivative(1, 1.0).unwrap(), 1.5);
        assert!(p.scaled(0.0).is_err());
    }
}
