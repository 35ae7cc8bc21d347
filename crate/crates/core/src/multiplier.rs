//! The operator Φ(−Δ) on periodic grids and the Helmholtz residual
//! Φ(−Δ)u − Φ(1)u.
//!
//! The torus is a test bench: it holds the plane-wave families exactly, but
//! nothing computed here is a statement about general bounded solutions on ℝ^d.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, inverse_transform, GridFunction, Spectrum};
use crate::symbols::Symbol;

/// Energy fraction below which a spectral bin counts as unoccupied.
pub const OCCUPIED_FRACTION: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual_l2: f64,
    pub residual_linf: f64,
    /// residual_l2 / ‖u‖_{L²}, with 0/0 = 0.
    pub relative_l2: f64,
    /// min over occupied bins of |m(|ξ_k|²)| times ‖u‖_{L²}; by Parseval a
    /// lower bound for residual_l2.
    pub per_mode_bound: f64,
}

fn eval_at(sym: &Symbol, xi2: f64) -> Result<f64> {
    sym.eval(xi2).map_err(|e| Error::Evaluation {
        symbol: sym.name().to_string(),
        z: xi2,
        msg: format!("at grid frequency |ξ|² = {xi2}: {e}"),
    })
}

/// Φ(−Δ)u: each coefficient is multiplied by Φ(|ξ_k|²), the zero mode by Φ(0).
/// Nyquist bins are kept: the multiplier depends on |ξ|² only, so Hermitian
/// symmetry of real input survives.
pub fn apply_multiplier(sym: &Symbol, gf: &GridFunction) -> Result<GridFunction> {
    let sp = forward_transform(gf).map_radial(|x| eval_at(sym, x))?;
    Ok(inverse_transform(&sp))
}

/// Energy fractions |û_k|²/Σ|û|² with an occupancy mask.
pub(crate) fn occupied(sp: &Spectrum) -> Vec<bool> {
    let total: f64 = sp.coeffs().iter().map(|c| c.norm_sqr()).sum();
    sp.coeffs().iter().map(|c| total > 0.0 && c.norm_sqr() > OCCUPIED_FRACTION * total).collect()
}

/// Residual of the spectral multiplier m(|ξ|²) applied to u.
pub fn multiplier_residual(gf: &GridFunction, mut m: impl FnMut(f64) -> Result<f64>) -> Result<ResidualReport> {
    let sp = forward_transform(gf);
    let xi2 = sp.xi_squared();
    let occ = occupied(&sp);
    let mut min_gap = f64::INFINITY;
    let mut coeffs = Vec::with_capacity(sp.len());
    for ((c, &x), &o) in sp.coeffs().iter().zip(&xi2).zip(&occ) {
        let v = m(x)?;
        if o {
            min_gap = min_gap.min(v.abs());
        }
        coeffs.push(c * v);
    }
    let res = inverse_transform(&Spectrum::new(gf.shape().to_vec(), gf.box_len().to_vec(), coeffs)?);
    let u_norm = gf.l2_norm();
    let residual_l2 = res.l2_norm();
    let per_mode_bound = if min_gap.is_finite() { min_gap * u_norm } else { 0.0 };
    Ok(ResidualReport {
        residual_l2,
        residual_linf: res.linf_norm(),
        relative_l2: if u_norm == 0.0 { 0.0 } else { residual_l2 / u_norm },
        per_mode_bound,
    })
}

/// Norms of r = Φ(−Δ)u − Φ(1)u, formed as the single multiplier
/// Φ(|ξ|²) − Φ(1) so that unit-sphere modes cancel exactly.
pub fn helmholtz_residual(sym: &Symbol, gf: &GridFunction) -> Result<ResidualReport> {
    let phi1 = sym.eval(1.0)?;
    multiplier_residual(gf, |x| Ok(eval_at(sym, x)? - phi1))
}

/// Norms of (−Δ − 1)^{j₀}u.
pub fn polyharmonic_residual(gf: &GridFunction, j0: usize) -> Result<ResidualReport> {
    if j0 < 1 {
        return Err(Error::domain("polyharmonic_residual", "j0 must be ≥ 1"));
    }
    multiplier_residual(gf, |x| Ok((x - 1.0).powi(j0 as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn box3() -> (Vec<usize>, Vec<f64>) {
        (vec![8, 8, 8], vec![2.0 * PI; 3])
    }

    #[test]
    fn sqrt_symbol_on_single_modes() {
        let s = Symbol::power(0.5).unwrap();
        let (sh, bx) = box3();
        let u = GridFunction::from_real_fn(sh.clone(), bx.clone(), |x| (2.0 * x[0]).cos()).unwrap();
        let v = apply_multiplier(&s, &u).unwrap();
        for (a, b) in v.data().iter().zip(u.data()) {
            assert!((a - 2.0 * b).norm() < 1e-13);
        }
        let r = helmholtz_residual(&s, &u).unwrap();
        assert!((r.residual_linf - 1.0).abs() < 1e-13);
        let one = GridFunction::from_real_fn(sh, bx, |_| 1.0).unwrap();
        assert!(apply_multiplier(&s, &one).unwrap().linf_norm() < 1e-15);
        assert!((helmholtz_residual(&s, &one).unwrap().residual_linf - 1.0).abs() < 1e-14);
    }

    #[test]
    fn polyharmonic_examples() {
        let (sh, bx) = box3();
        let u = GridFunction::from_real_fn(sh.clone(), bx.clone(), |x| x[0].cos()).unwrap();
        assert!(polyharmonic_residual(&u, 1).unwrap().residual_linf < 1e-12);
        assert!(polyharmonic_residual(&u, 3).unwrap().residual_linf < 1e-12);
        let w = GridFunction::from_real_fn(sh, bx, |x| (2.0 * x[0]).cos()).unwrap();
        assert!((polyharmonic_residual(&w, 2).unwrap().residual_linf - 9.0).abs() < 1e-12);
        assert!(polyharmonic_residual(&w, 0).is_err());
    }

    #[test]
    fn zero_function_is_zero_safe() {
        let (sh, bx) = box3();
        let z = GridFunction::from_real_fn(sh, bx, |_| 0.0).unwrap();
        let r = helmholtz_residual(&Symbol::power(0.5).unwrap(), &z).unwrap();
        assert_eq!(r.relative_l2, 0.0);
        assert_eq!(r.per_mode_bound, 0.0);
    }
}
