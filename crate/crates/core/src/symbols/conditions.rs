//! Numerical evidence for the admissibility conditions: polynomial growth of
//! derivatives at infinity, integrability of the weighted derivatives at the
//! origin, and univalence/non-degeneracy at z = 1.

use serde::{Deserialize, Serialize};

use super::Symbol;
use crate::error::{Error, Result};
use crate::quadrature::{geomspace, loglog_slope, GaussLegendre};

/// Derivative-zero threshold used by [`detect_j0`] and the report.
pub const DEFAULT_J0_TOL: f64 = 1e-9;

const GROWTH_POINTS: usize = 64;
const GROWTH_SLACK: f64 = 0.5;
const DEFAULT_GROWTH_ZMAX: f64 = 1e4;

const BLOCK_NODES: usize = 16;
const MIN_BLOCKS: usize = 30;
const MAX_UNDECIDED_BLOCKS: usize = 60;
const MAX_BLOCKS: usize = 400;
const RATIO_WINDOW: usize = 10;
const RATIO_LIMIT: f64 = 0.9;

const UNIVALENCE_POINTS: usize = 4096;
const UNIVALENCE_GAP: f64 = 1e-3;
const UNIVALENCE_TMIN: f64 = 1e-6;
const DEFAULT_UNIVALENCE_ZMAX: f64 = 100.0;

/// One piece of evidence against a condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub z: f64,
    pub value: f64,
}

impl Witness {
    fn new(condition: impl Into<String>, z: f64, value: f64) -> Self {
        Witness { condition: condition.into(), z, value }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub pass: bool,
    /// Fitted exponent per derivative order; `None` when the derivative
    /// vanishes on the whole probe window.
    pub exponents: Vec<Option<f64>>,
    pub witnesses: Vec<Witness>,
}

/// Fits log|∂^kΦ| against log z on a geometric grid over `[z0, zmax]` for
/// every k ≤ `kmax`.
///
/// A derivative passes when its slope on the upper half of the window (in
/// log scale) exceeds the full-window slope by at most 0.5. The upper-window
/// slope is reported as the exponent estimate.
pub fn check_growth(sym: &Symbol, kmax: usize, zmax: f64) -> Result<GrowthCheck> {
    let z0 = sym.z0();
    if !(zmax >= 4.0 * z0) {
        return Err(Error::domain("check_growth", format!("zmax must be ≥ 4·z0 = {}, got {zmax}", 4.0 * z0)));
    }
    let zs = geomspace(z0, zmax, GROWTH_POINTS);
    let split = (z0 * zmax).sqrt();
    let upper = zs.iter().position(|&z| z >= split).unwrap_or(0);
    let mut exponents = Vec::with_capacity(kmax + 1);
    let mut witnesses = Vec::new();
    for k in 0..=kmax {
        let vals = zs.iter().map(|&z| sym.derivative(k, z)).collect::<Result<Vec<_>>>()?;
        let full = loglog_slope(&zs, &vals);
        let top = loglog_slope(&zs[upper..], &vals[upper..]);
        match (full, top) {
            (Some(f), Some(t)) => {
                if t - f > GROWTH_SLACK {
                    witnesses.push(Witness::new(format!("a:k={k}"), zmax, t - f));
                }
                exponents.push(Some(t));
            }
            (Some(f), None) => exponents.push(Some(f)),
            _ => exponents.push(None),
        }
    }
    Ok(GrowthCheck { pass: witnesses.is_empty(), exponents, witnesses })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityCheck {
    pub pass: bool,
    /// ∫₀^{ε₀} z^{j−1}|∂^jΦ(z)| dz for j = 0..=d+1; +∞ when divergent.
    pub terms: Vec<f64>,
    pub divergent_orders: Vec<usize>,
    pub witnesses: Vec<Witness>,
}

impl SingularityCheck {
    pub fn sum(&self) -> f64 {
        self.terms.iter().sum()
    }
}

enum BlockOutcome {
    Converged(f64),
    Diverged { z: f64, last_block: f64 },
    NonFinite { z: f64 },
}

fn decaying(blocks: &[f64]) -> bool {
    let n = blocks.len();
    (n - RATIO_WINDOW..n).all(|i| {
        let (prev, cur) = (blocks[i - 1], blocks[i]);
        if prev == 0.0 {
            cur == 0.0
        } else {
            cur / prev < RATIO_LIMIT
        }
    })
}

fn singular_term(sym: &Symbol, j: usize, gl: &GaussLegendre) -> Result<BlockOutcome> {
    let eps0 = sym.eps0();
    let mut blocks: Vec<f64> = Vec::new();
    let mut sum = 0.0;
    let mut hi = eps0;
    let mut converging = false;
    loop {
        let lo = 0.5 * hi;
        let c = gl.try_integrate(lo, hi, |z| {
            let d = sym.derivative(j, z)?;
            Ok::<_, Error>(z.powi(j as i32 - 1) * d.abs())
        })?;
        if !c.is_finite() {
            return Ok(BlockOutcome::NonFinite { z: lo });
        }
        blocks.push(c);
        sum += c;
        hi = lo;
        let n = blocks.len();
        if n < MIN_BLOCKS {
            continue;
        }
        if !converging {
            converging = decaying(&blocks);
            if !converging {
                if n >= MAX_UNDECIDED_BLOCKS {
                    return Ok(BlockOutcome::Diverged { z: lo, last_block: c });
                }
                continue;
            }
        }
        if c <= 1e-16 * sum || n >= MAX_BLOCKS {
            // geometric tail of the remaining blocks
            let prev = blocks[n - 2];
            let tail = if prev > 0.0 && c < prev { c * (c / prev) / (1.0 - c / prev) } else { 0.0 };
            return Ok(BlockOutcome::Converged(sum + tail));
        }
    }
}

/// Evaluates the d+2 weighted integrals ∫₀^{ε₀} z^{j−1}|∂^jΦ(z)| dz by dyadic
/// decomposition of (0, ε₀], each block with a 16-point Gauss rule.
///
/// A term converges when the last 10 block contributions each shrink by a
/// factor below 0.9 (checked from block 30 on); the remaining tail is then
/// summed geometrically.
pub fn check_singularity(sym: &Symbol, d: usize) -> Result<SingularityCheck> {
    if d < 1 {
        return Err(Error::domain("check_singularity", "dimension must be ≥ 1"));
    }
    let gl = GaussLegendre::new(BLOCK_NODES);
    let mut terms = Vec::with_capacity(d + 2);
    let mut divergent_orders = Vec::new();
    let mut witnesses = Vec::new();
    for j in 0..=d + 1 {
        match singular_term(sym, j, &gl) {
            Ok(BlockOutcome::Converged(v)) => terms.push(v),
            Ok(BlockOutcome::Diverged { z, last_block }) => {
                terms.push(f64::INFINITY);
                divergent_orders.push(j);
                witnesses.push(Witness::new(format!("b:j={j}"), z, last_block));
            }
            Ok(BlockOutcome::NonFinite { z }) => {
                terms.push(f64::INFINITY);
                divergent_orders.push(j);
                witnesses.push(Witness::new(format!("b:j={j}:non-finite"), z, f64::NAN));
            }
            Err(Error::Evaluation { z, .. }) => {
                terms.push(f64::INFINITY);
                divergent_orders.push(j);
                witnesses.push(Witness::new(format!("b:j={j}:evaluation"), z, f64::NAN));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SingularityCheck { pass: divergent_orders.is_empty(), terms, divergent_orders, witnesses })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnivalenceCheck {
    pub pass: bool,
    /// No crossing of the level Φ(1) away from z = 1.
    pub level_crossing_free: bool,
    pub derivative_nonzero: bool,
    pub phi_at_one: f64,
    pub derivative_at_one: f64,
    /// Intervals known to contain a solution of Φ(t) = Φ(1), t ≠ 1.
    pub brackets: Vec<(f64, f64)>,
    pub witnesses: Vec<Witness>,
}

fn univalence_grid(zmax: f64) -> (Vec<f64>, Vec<f64>) {
    let half = UNIVALENCE_POINTS / 2;
    let mut left = geomspace(UNIVALENCE_TMIN, 0.5, half);
    left.extend(geomspace(0.5, UNIVALENCE_GAP, half).into_iter().skip(1).map(|g| 1.0 - g));
    let right = geomspace(UNIVALENCE_GAP, zmax - 1.0, UNIVALENCE_POINTS).into_iter().map(|g| 1.0 + g).collect();
    (left, right)
}

fn bisect(g: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut glo = g(lo)?;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok((mid, mid));
        }
        if (gm > 0.0) == (glo > 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Scans Φ(t) − Φ(1) on (0, 1 − δ] ∪ [1 + δ, zmax] with δ = 1e-3 for sign
/// changes (bracketed by bisection) and checks |Φ′(1)| > `tol`.
pub fn check_univalence(sym: &Symbol, zmax: f64, tol: f64) -> Result<UnivalenceCheck> {
    if !(zmax >= 10.0 && zmax.is_finite()) {
        return Err(Error::domain("check_univalence", format!("zmax must be ≥ 10, got {zmax}")));
    }
    let phi1 = sym.eval(1.0)?;
    let g = |t: f64| sym.eval(t).map(|v| v - phi1);
    let (left, right) = univalence_grid(zmax);
    let mut brackets = Vec::new();
    let mut witnesses = Vec::new();
    for side in [&left, &right] {
        let vals = side.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
        for i in 0..side.len() {
            if vals[i] == 0.0 {
                brackets.push((side[i], side[i]));
                witnesses.push(Witness::new("c:level", side[i], 0.0));
                continue;
            }
            if i + 1 < side.len() && vals[i + 1] != 0.0 && (vals[i] > 0.0) != (vals[i + 1] > 0.0) {
                let (lo, hi) = bisect(&g, side[i], side[i + 1])?;
                let mid = 0.5 * (lo + hi);
                brackets.push((lo, hi));
                witnesses.push(Witness::new("c:level", mid, g(mid)?));
            }
        }
    }
    let dphi1 = sym.derivative(1, 1.0)?;
    let derivative_nonzero = dphi1.abs() > tol;
    if !derivative_nonzero {
        witnesses.push(Witness::new("c:derivative", 1.0, dphi1));
    }
    let level_crossing_free = brackets.is_empty();
    Ok(UnivalenceCheck {
        pass: level_crossing_free && derivative_nonzero,
        level_crossing_free,
        derivative_nonzero,
        phi_at_one: phi1,
        derivative_at_one: dphi1,
        brackets,
        witnesses,
    })
}

/// Smallest j in 1..=jmax with |Φ^{(j)}(1)| > tol, and that derivative.
pub fn detect_j0(sym: &Symbol, jmax: usize, tol: f64) -> Result<Option<(usize, f64)>> {
    if jmax < 1 {
        return Err(Error::domain("detect_j0", "jmax must be ≥ 1"));
    }
    for j in 1..=jmax {
        let v = sym.derivative(j, 1.0)?;
        if v.abs() > tol {
            return Ok(Some((j, v)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMode {
    /// Φ′(1) ≠ 0 together with univalence.
    StrictC,
    /// Φ(1) ≠ 0, univalence, and a finite order j₀ of the first
    /// non-vanishing derivative at 1.
    GeneralC3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub symbol: String,
    pub d: usize,
    pub mode: ConditionMode,
    pub pass: bool,
    pub growth_pass: bool,
    pub growth_exponents: Vec<Option<f64>>,
    pub singularity_terms: Vec<f64>,
    pub singularity_pass: bool,
    pub univalence_pass: bool,
    pub phi_at_one: f64,
    pub j0: Option<usize>,
    pub first_nonzero_derivative: Option<f64>,
    pub failure_witnesses: Vec<Witness>,
}

/// Runs all checkers with default probe windows: derivatives up to order
/// d+1 on [z0, 1e4], univalence on (0, 100], and j₀ search up to order 8.
pub fn full_condition_report(sym: &Symbol, d: usize, mode: ConditionMode) -> Result<ConditionReport> {
    let growth = check_growth(sym, d + 1, DEFAULT_GROWTH_ZMAX.max(4.0 * sym.z0()))?;
    let sing = check_singularity(sym, d)?;
    let uni = check_univalence(sym, DEFAULT_UNIVALENCE_ZMAX, DEFAULT_J0_TOL)?;
    let phi1_nonzero = uni.phi_at_one.abs() > DEFAULT_J0_TOL;
    let j0 = if phi1_nonzero { detect_j0(sym, 8, DEFAULT_J0_TOL)? } else { None };

    let mut failure_witnesses = Vec::new();
    failure_witnesses.extend(growth.witnesses.iter().cloned());
    failure_witnesses.extend(sing.witnesses.iter().cloned());
    let univalence_pass = match mode {
        ConditionMode::StrictC => {
            failure_witnesses.extend(uni.witnesses.iter().cloned());
            uni.pass
        }
        ConditionMode::GeneralC3 => {
            failure_witnesses.extend(uni.witnesses.iter().filter(|w| w.condition == "c:level").cloned());
            if !phi1_nonzero {
                failure_witnesses.push(Witness::new("c3:phi_at_one", 1.0, uni.phi_at_one));
            } else if j0.is_none() {
                failure_witnesses.push(Witness::new("c3:j0", 1.0, 0.0));
            }
            uni.level_crossing_free && phi1_nonzero && j0.is_some()
        }
    };
    Ok(ConditionReport {
        symbol: sym.name().to_string(),
        d,
        mode,
        pass: growth.pass && sing.pass && univalence_pass,
        growth_pass: growth.pass,
        growth_exponents: growth.exponents,
        singularity_terms: sing.terms,
        singularity_pass: sing.pass,
        univalence_pass,
        phi_at_one: uni.phi_at_one,
        j0: j0.map(|(j, _)| j),
        first_nonzero_derivative: j0.map(|(_, v)| v),
        failure_witnesses,
    })
}
