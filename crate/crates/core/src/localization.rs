//! Checkable surrogates of Fourier-support localization.
//!
//! Localization itself (every bounded solution has spectrum in {0} ∪ S^{d−1})
//! cannot be decided numerically. What can be checked: unit-sphere
//! superpositions solve the equation to roundoff, off-sphere spectral mass
//! forces a residual of known size, and the quotient (t−1)^{j₀}/(Φ(t)−Φ(1))
//! stays bounded near t = 1.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{forward_transform, GridFunction};
use crate::multiplier::{helmholtz_residual, occupied};
use crate::quadrature::{geomspace, loglog_slope};
use crate::special::factorial;
use crate::symbols::{detect_j0, Symbol};

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_WINDOW: f64 = 0.2;
/// Tolerance on the contrapositive inequality.
pub const CONTRAPOSITIVE_SLACK: f64 = 1e-9;
/// A quotient profile counts as bounded when max|q| ≤ this multiple of |limit|.
pub const BOUNDED_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportProfile {
    pub mass_at_zero: f64,
    pub mass_on_sphere: f64,
    pub mass_elsewhere: f64,
    pub delta: f64,
}

/// Splits the spectral energy of u into ξ = 0, the annulus ||ξ| − 1| ≤ δ, and
/// the rest. A zero function has no energy and gets three zero fractions.
pub fn spectral_support_profile(gf: &GridFunction, delta: f64) -> Result<SupportProfile> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::domain("spectral_support_profile", format!("δ must lie in (0, 0.5), got {delta}")));
    }
    let sp = forward_transform(gf);
    let xi2 = sp.xi_squared();
    let (mut zero, mut sphere, mut rest) = (0.0, 0.0, 0.0);
    for (c, &x) in sp.coeffs().iter().zip(&xi2) {
        let e = c.norm_sqr();
        if x == 0.0 {
            zero += e;
        } else if (x.sqrt() - 1.0).abs() <= delta {
            sphere += e;
        } else {
            rest += e;
        }
    }
    let total = zero + sphere + rest;
    if total == 0.0 {
        return Ok(SupportProfile { mass_at_zero: 0.0, mass_on_sphere: 0.0, mass_elsewhere: 0.0, delta });
    }
    Ok(SupportProfile {
        mass_at_zero: zero / total,
        mass_on_sphere: sphere / total,
        mass_elsewhere: rest / total,
        delta,
    })
}

/// Integer wavenumbers k with |ξ_k| = 1 on a box of side 2π·`box_factor`,
/// restricted to bins representable on `n` samples per axis.
pub fn unit_sphere_modes(d: usize, box_factor: usize, n: usize) -> Vec<Vec<i64>> {
    let m = box_factor as i64;
    let half = (n / 2) as i64;
    let lim = m.min(half);
    let mut out = Vec::new();
    let mut k = vec![-lim; d];
    loop {
        if k.iter().map(|x| x * x).sum::<i64>() == m * m && k.iter().all(|&x| x < half) {
            out.push(k.clone());
        }
        let mut a = 0;
        loop {
            if a == d {
                return out;
            }
            if k[a] < lim {
                k[a] += 1;
                break;
            }
            k[a] = -lim;
            a += 1;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardCheck {
    pub d: usize,
    pub seed: u64,
    pub trials: usize,
    pub shape: Vec<usize>,
    pub sphere_modes: usize,
    pub max_relative_residual: f64,
}

/// Eight points per axis resolve |k| = 1 with room to spare. Larger grids
/// only add empty bins whose roundoff is amplified by |Φ(|ξ|²) − Φ(1)|.
const FORWARD_GRID_POINTS: usize = 8;

/// Random real superpositions Σ a_k cos(k·x) + b_k sin(k·x) over unit-sphere
/// wavenumbers on the box (2π)^d; returns the largest relative Helmholtz
/// residual over `n_modes` trials.
pub fn run_forward_check(sym: &Symbol, d: usize, n_modes: usize, seed: u64) -> Result<ForwardCheck> {
    if !(1..=3).contains(&d) || n_modes < 1 {
        return Err(Error::domain("run_forward_check", "need d ∈ {1,2,3} and at least one trial"));
    }
    let n = FORWARD_GRID_POINTS;
    let modes = unit_sphere_modes(d, 1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = vec![n; d];
    let bx = vec![2.0 * PI; d];
    let mut worst: f64 = 0.0;
    for _ in 0..n_modes {
        let count = rng.random_range(1..=modes.len());
        let terms: Vec<(Vec<f64>, f64, f64)> = (0..count)
            .map(|_| {
                let k = &modes[rng.random_range(0..modes.len())];
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                (k.iter().map(|&x| x as f64).collect(), a, b)
            })
            .collect();
        let u = GridFunction::from_real_fn(shape.clone(), bx.clone(), |x| {
            terms
                .iter()
                .map(|(k, a, b)| {
                    let ph: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                    a * ph.cos() + b * ph.sin()
                })
                .sum()
        })?;
        worst = worst.max(helmholtz_residual(sym, &u)?.relative_l2);
    }
    Ok(ForwardCheck { d, seed, trials: n_modes, shape, sphere_modes: modes.len(), max_relative_residual: worst })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContrapositiveCheck {
    pub pass: bool,
    pub lower_bound: f64,
    pub observed: f64,
}

/// For u with no spectral mass at ξ = 0 or within δ of the unit sphere, the
/// residual satisfies ‖r‖ ≥ min_k |Φ(|ξ_k|²) − Φ(1)|·‖u‖ over occupied bins.
pub fn run_contrapositive_check(sym: &Symbol, gf: &GridFunction, delta: f64) -> Result<ContrapositiveCheck> {
    let sp = forward_transform(gf);
    let xi2 = sp.xi_squared();
    for (i, o) in occupied(&sp).into_iter().enumerate() {
        if !o {
            continue;
        }
        if xi2[i] == 0.0 || (xi2[i].sqrt() - 1.0).abs() <= delta {
            return Err(Error::Precondition(format!(
                "spectral mass at ξ = {:?} (|ξ| = {}) lies in the excluded set",
                sp.frequency(i),
                xi2[i].sqrt()
            )));
        }
    }
    let report = helmholtz_residual(sym, gf)?;
    let lower_bound = report.per_mode_bound;
    let observed = report.residual_l2;
    let pass = lower_bound > 0.0 && observed >= lower_bound - CONTRAPOSITIVE_SLACK;
    Ok(ContrapositiveCheck { pass, lower_bound, observed })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientProfile {
    pub j0: usize,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    /// Two-sided limit of q at t = 1 from symmetric probes.
    pub limit_at_one: f64,
    /// j₀!/Φ^{(j₀)}(1) from the Taylor expansion.
    pub expected_limit: f64,
    pub max_abs: f64,
}

fn quotient(sym: &Symbol, phi1: f64, j0: usize, t: f64) -> Result<f64> {
    let diff = sym.eval(t)? - phi1;
    if diff == 0.0 {
        return Err(Error::Precondition(format!("univalence violated: Φ({t}) = Φ(1)")));
    }
    Ok((t - 1.0).powi(j0 as i32) / diff)
}

/// Symmetric averages at h = 10^{−k}, k = 2..6, extrapolated in h²; the
/// tableau entry with the smallest change from its predecessor wins, since
/// cancellation in Φ(t) − Φ(1) spoils the smallest probes.
fn symmetric_limit(q: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let hs: Vec<f64> = (2..=6).map(|k| 10f64.powi(-k)).collect();
    let mut row: Vec<f64> = Vec::with_capacity(hs.len());
    let mut best = (f64::INFINITY, f64::NAN);
    let mut prev_row: Vec<f64> = Vec::new();
    for &h in &hs {
        row.clear();
        row.push(0.5 * (q(1.0 + h)? + q(1.0 - h)?));
        for m in 1..=prev_row.len() {
            let f = 100f64.powi(m as i32);
            let r = (f * row[m - 1] - prev_row[m - 1]) / (f - 1.0);
            row.push(r);
        }
        for m in 0..prev_row.len() {
            let change = (row[m] - prev_row[m]).abs();
            if change < best.0 {
                best = (change, row[m]);
            }
        }
        prev_row = row.clone();
    }
    Ok(best.1)
}

/// q(t) = (t−1)^{j₀}/(Φ(t) − Φ(1)) on n points of [1 − w, 1 + w] minus t = 1.
pub fn quotient_profile(sym: &Symbol, j0: usize, window: f64, n_points: usize) -> Result<QuotientProfile> {
    if j0 < 1 {
        return Err(Error::domain("quotient_profile", "j0 must be ≥ 1"));
    }
    if !(window > 0.0 && window <= 0.5) || n_points < 2 {
        return Err(Error::domain("quotient_profile", "need window ∈ (0, 0.5] and at least 2 points"));
    }
    let phi1 = sym.eval(1.0)?;
    let q = |t: f64| quotient(sym, phi1, j0, t);
    let mut t = Vec::with_capacity(n_points);
    let mut values = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let ti = 1.0 - window + 2.0 * window * i as f64 / (n_points - 1) as f64;
        if (ti - 1.0).abs() < 1e-12 {
            continue;
        }
        t.push(ti);
        values.push(q(ti)?);
    }
    let limit_at_one = symmetric_limit(q)?;
    let expected_limit = factorial(j0) / sym.derivative(j0, 1.0)?;
    let max_abs = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    Ok(QuotientProfile { j0, t, values, limit_at_one, expected_limit, max_abs })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct J0Check {
    pub d: usize,
    pub j0: usize,
    pub quotient_bounded: bool,
    /// Log-log slope of |Φ(1 ± h) − Φ(1)| against h over h ∈ [1e-4, 1e-2].
    pub scaling_exponent: f64,
    pub limit_at_one: f64,
    pub expected_limit: f64,
}

pub fn run_j0_check(sym: &Symbol, d: usize) -> Result<J0Check> {
    let (j0, _) = detect_j0(sym, 8, 1e-9)?
        .ok_or_else(|| Error::Precondition("no nonvanishing derivative of order ≤ 8 at z = 1".into()))?;
    let phi1 = sym.eval(1.0)?;
    let hs = geomspace(1e-4, 1e-2, 9);
    let mut xs = Vec::with_capacity(2 * hs.len());
    let mut ys = Vec::with_capacity(2 * hs.len());
    for &h in &hs {
        for t in [1.0 + h, 1.0 - h] {
            xs.push(h);
            ys.push((sym.eval(t)? - phi1).abs());
        }
    }
    let scaling_exponent = loglog_slope(&xs, &ys).unwrap_or(f64::NAN);
    let prof = quotient_profile(sym, j0, DEFAULT_WINDOW, 201)?;
    let quotient_bounded =
        prof.values.iter().all(|v| v.is_finite()) && prof.max_abs <= BOUNDED_FACTOR * prof.limit_at_one.abs();
    Ok(J0Check {
        d,
        j0,
        quotient_bounded,
        scaling_exponent,
        limit_at_one: prof.limit_at_one,
        expected_limit: prof.expected_limit,
    })
}

/// Real-valued u = Σ A_k cos(k·x) on the box (2π·`box_factor`)^d.
pub fn cosine_modes(d: usize, n: usize, box_factor: f64, modes: &[(Vec<i64>, f64)]) -> Result<GridFunction> {
    let l = 2.0 * PI * box_factor;
    GridFunction::from_fn(vec![n; d], vec![l; d], |x| {
        let v: f64 = modes
            .iter()
            .map(|(k, a)| {
                let ph: f64 = k.iter().zip(x).map(|(&ki, xi)| 2.0 * PI * ki as f64 / l * xi).sum();
                a * ph.cos()
            })
            .sum();
        Complex64::new(v, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_modes_on_unit_box() {
        assert_eq!(unit_sphere_modes(1, 1, 8), vec![vec![-1], vec![1]]);
        assert_eq!(unit_sphere_modes(3, 1, 8).len(), 6);
        // |k| = 5 on a 10π box: (±5,0), (0,±5), (±3,±4), (±4,±3)
        assert_eq!(unit_sphere_modes(2, 5, 16).len(), 12);
    }

    #[test]
    fn support_examples() {
        let u = cosine_modes(1, 16, 1.0, &[(vec![1], 1.0)]).unwrap();
        assert!((spectral_support_profile(&u, 0.1).unwrap().mass_on_sphere - 1.0).abs() < 1e-12);
        let c = cosine_modes(1, 16, 1.0, &[(vec![0], 1.0)]).unwrap();
        assert!((spectral_support_profile(&c, 0.1).unwrap().mass_at_zero - 1.0).abs() < 1e-12);
        let two = cosine_modes(1, 16, 1.0, &[(vec![1], 1.0), (vec![2], 1.0)]).unwrap();
        let p = spectral_support_profile(&two, 0.1).unwrap();
        assert!((p.mass_on_sphere - 0.5).abs() < 1e-12 && (p.mass_elsewhere - 0.5).abs() < 1e-12);
        assert!(spectral_support_profile(&two, 0.5).is_err());
    }

    #[test]
    fn quotient_limits() {
        let q = quotient_profile(&Symbol::power(0.5).unwrap(), 1, 0.2, 41).unwrap();
        assert!((q.limit_at_one - 2.0).abs() < 2e-5);
        let q = quotient_profile(&Symbol::exp_bump(), 2, 0.2, 41).unwrap();
        assert!((q.limit_at_one + 2.0).abs() < 2e-5, "{}", q.limit_at_one);
    }

    #[test]
    fn contrapositive_rejects_sphere_mass() {
        let u = cosine_modes(1, 16, 1.0, &[(vec![1], 1.0)]).unwrap();
        assert!(matches!(run_contrapositive_check(&Symbol::power(0.5).unwrap(), &u, 0.1), Err(Error::Precondition(_))));
    }
}
