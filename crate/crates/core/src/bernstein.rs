//! Complete Bernstein symbols with a discrete Lévy measure,
//!
//! ```text
//! Φ(λ) = c₁ + c₂λ + Σᵢ wᵢ λ / ((λ + sᵢ) sᵢ)
//! ```
//!
//! i.e. the measure m = Σ wᵢ δ_{sᵢ} in the Stieltjes-type representation
//! c₁ + c₂λ + ∫ λ/(λ+s) m(ds)/s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::factorial;
use crate::symbols::Symbol;

const NONZERO_TOL: f64 = 1e-12;
const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinSymbol {
    c1: f64,
    c2: f64,
    atoms: Vec<(f64, f64)>,
}

impl BernsteinSymbol {
    /// Validates c₁, c₂ ≥ 0 and atoms with positive location and weight.
    pub fn new(c1: f64, c2: f64, atoms: Vec<(f64, f64)>) -> Result<Self> {
        for (name, v) in [("c1", c1), ("c2", c2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be finite and ≥ 0, got {v}")));
            }
        }
        for (i, &(s, w)) in atoms.iter().enumerate() {
            if !(s > 0.0 && s.is_finite() && w > 0.0 && w.is_finite()) {
                return Err(Error::param(format!("atoms[{i}]"), format!("need s > 0 and w > 0, got ({s}, {w})")));
            }
        }
        Ok(BernsteinSymbol { c1, c2, atoms })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Φ ≡ 0.
    pub fn is_trivial(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0 && self.atoms.is_empty()
    }

    /// Σ wᵢ / ((1 + sᵢ) sᵢ), finite for every finite atom list.
    pub fn measure_mass(&self) -> f64 {
        self.atoms.iter().map(|(s, w)| w / ((1.0 + s) * s)).sum()
    }

    pub fn eval(&self, lambda: f64) -> f64 {
        self.c1 + self.c2 * lambda + self.atoms.iter().map(|(s, w)| w * lambda / ((lambda + s) * s)).sum::<f64>()
    }

    /// Φ′(λ) = c₂ + Σ wᵢ / (λ + sᵢ)².
    pub fn derivative(&self, lambda: f64) -> f64 {
        self.derivative_k(1, lambda)
    }

    /// Φ^{(k)}(λ) for k ≥ 1: c₂·[k = 1] + Σ wᵢ (−1)^{k−1} k! / (λ + sᵢ)^{k+1}.
    pub fn derivative_k(&self, k: usize, lambda: f64) -> f64 {
        if k == 0 {
            return self.eval(lambda);
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let kf = factorial(k);
        let atoms: f64 = self.atoms.iter().map(|(s, w)| w * (lambda + s).powi(-(k as i32 + 1))).sum();
        let linear = if k == 1 { self.c2 } else { 0.0 };
        linear + sign * kf * atoms
    }
}

pub fn bernstein_eval(bs: &BernsteinSymbol, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("bernstein_eval", format!("λ must be ≥ 0, got {lambda}")));
    }
    Ok(bs.eval(lambda))
}

pub fn bernstein_derivative(bs: &BernsteinSymbol, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain("bernstein_derivative", format!("λ must be > 0, got {lambda}")));
    }
    Ok(bs.derivative(lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeBound {
    pub pass: bool,
    /// max λΦ′(λ)/Φ(λ) over the probes.
    pub max_ratio: f64,
    /// Probes where λΦ′(λ) > Φ(λ) + 1e-12.
    pub violations: Vec<f64>,
}

/// Checks λΦ′(λ) ≤ Φ(λ) at every probe.
pub fn verify_derivative_bound(bs: &BernsteinSymbol, lambdas: &[f64]) -> Result<DerivativeBound> {
    if bs.is_trivial() {
        return Err(Error::Precondition("Φ ≡ 0 has no meaningful derivative bound".into()));
    }
    let mut max_ratio = 0.0f64;
    let mut violations = Vec::new();
    for &l in lambdas {
        let phi = bernstein_eval(bs, l)?;
        let lhs = l * bernstein_derivative(bs, l)?;
        if lhs > phi + BOUND_SLACK {
            violations.push(l);
        }
        if phi > 0.0 {
            max_ratio = max_ratio.max(lhs / phi);
        }
    }
    Ok(DerivativeBound { pass: violations.is_empty(), max_ratio, violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Nondegeneracy {
    pub phi1_nonzero: bool,
    pub dphi1_nonzero: bool,
    pub phi_at_one: f64,
    pub derivative_at_one: f64,
}

/// Φ(1) ≠ 0 and Φ′(1) ≠ 0; requires c₂ > 0 or at least one atom.
pub fn verify_nondegeneracy(bs: &BernsteinSymbol) -> Result<Nondegeneracy> {
    if bs.c2 == 0.0 && bs.atoms.is_empty() {
        return Err(Error::Precondition("need c2 > 0 or a non-empty measure (Φ must not be constant)".into()));
    }
    let phi = bs.eval(1.0);
    let dphi = bs.derivative(1.0);
    Ok(Nondegeneracy {
        phi1_nonzero: phi.abs() > NONZERO_TOL,
        dphi1_nonzero: dphi.abs() > NONZERO_TOL,
        phi_at_one: phi,
        derivative_at_one: dphi,
    })
}

/// Wraps `bs` as a [`Symbol`] with closed-form derivatives of every order.
/// A positive constant term is rejected: Φ(0) = c₁ must vanish for the
/// weighted integral at the origin to converge.
pub fn as_symbol(bs: &BernsteinSymbol) -> Result<Symbol> {
    if bs.c1 != 0.0 {
        return Err(Error::param("c1", format!("Φ(0) = c1 = {} ≠ 0, so ∫₀ |Φ(z)| dz/z diverges; c1 must be 0", bs.c1)));
    }
    if bs.is_trivial() {
        return Err(Error::Precondition("Φ ≡ 0 is excluded".into()));
    }
    Ok(Symbol::from_bernstein(bs.clone()))
}
