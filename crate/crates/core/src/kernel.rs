//! The low-frequency kernel β₁ = F⁻¹(Φ(|ξ|²)χ(ξ)) and its L¹ norm.
//!
//! With the convention β₁(x) = ∫ χ(ξ)Φ(|ξ|²)e^{iξ·x} dξ the kernel is radial:
//!
//! ```text
//! β₁(r) = ∫₀^{ε₀} χ(ρ) Φ(ρ²) F_d(ρr) ρ^{d−1} dρ,   F_1(λ) = 2 cos λ.
//! ```
//!
//! The integrand oscillates with half-period π/r. Because χ has compact
//! support the integral is over a finite interval, so it is summed piece by
//! piece over half-periods without any series acceleration.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::bessel::{bessel_j, surface_bessel_constant};
use crate::error::{Error, Result};
use crate::quadrature::{geomspace, GaussLegendre};
use crate::special::sphere_area;
use crate::symbols::{check_singularity, Symbol};

/// Default Gauss–Legendre nodes per quadrature piece.
pub const DEFAULT_NODES: usize = 16;
pub const DEFAULT_POINTS_PER_DECADE: usize = 32;
/// Default r_max as a multiple of 1/ε₀.
pub const DEFAULT_R_MAX_FACTOR: f64 = 1024.0;
/// Convergence threshold on the dyadic tail ratio.
pub const TAIL_RATIO_LIMIT: f64 = 0.6;
/// Relative change allowed when r_max or the node count is doubled.
pub const STABILITY_LIMIT: f64 = 0.1;

const GRADED_LEVELS: usize = 48;
/// Shells smaller than this fraction of the L¹ estimate count as zero.
const NEGLIGIBLE_SHELL: f64 = 1e-9;
/// A value is resolved when it exceeds this multiple of ε·∫|integrand|.
const NOISE_MULTIPLE: f64 = 1e3;

/// Cutoffs χ (frequency side, radius ε₀) and χ₁ (plateau 0.9, support 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub eps0: f64,
    pub chi1_inner: f64,
    pub chi1_outer: f64,
}

impl CutoffSpec {
    pub fn new(eps0: f64) -> Result<Self> {
        if !(eps0 > 0.0 && eps0.is_finite()) {
            return Err(Error::param("eps0", format!("must be > 0, got {eps0}")));
        }
        Ok(CutoffSpec { eps0, chi1_inner: 0.9, chi1_outer: 1.0 })
    }

    /// χ(ρ) = exp(1 − 1/(1 − (ρ/ε₀)²)) for |ρ| < ε₀, else 0.
    pub fn chi(&self, rho: f64) -> f64 {
        let x = rho / self.eps0;
        let q = 1.0 - x * x;
        if q <= 0.0 {
            0.0
        } else {
            (1.0 - 1.0 / q).exp()
        }
    }

    /// Even smooth step: 1 on |z| ≤ 0.9, 0 on |z| ≥ 1.
    pub fn chi1(&self, z: f64) -> f64 {
        let z = z.abs();
        if z <= self.chi1_inner {
            return 1.0;
        }
        if z >= self.chi1_outer {
            return 0.0;
        }
        let t = (z - self.chi1_inner) / (self.chi1_outer - self.chi1_inner);
        let bump = |u: f64| if u <= 0.0 { 0.0 } else { (-1.0 / u).exp() };
        let (a, b) = (bump(1.0 - t), bump(t));
        a / (a + b)
    }
}

impl Default for CutoffSpec {
    fn default() -> Self {
        CutoffSpec { eps0: 0.5, chi1_inner: 0.9, chi1_outer: 1.0 }
    }
}

/// F_d as a real function of λ ≥ 0, with the dimension constants hoisted.
#[derive(Debug, Clone, Copy)]
struct SphereTransform {
    d: usize,
    nu: f64,
    c3: f64,
    area: f64,
}

impl SphereTransform {
    fn new(d: usize) -> Self {
        let nu = (d as f64 - 2.0) / 2.0;
        let c3 = if d >= 2 { surface_bessel_constant(d) } else { 0.0 };
        SphereTransform { d, nu, c3, area: sphere_area(d - 1) }
    }

    fn eval(&self, lambda: f64) -> f64 {
        if lambda == 0.0 {
            return self.area;
        }
        match self.d {
            1 => 2.0 * lambda.cos(),
            3 => 4.0 * PI * lambda.sin() / lambda,
            _ => self.c3 * bessel_j(self.nu, lambda).unwrap_or(f64::NAN) * lambda.powf(-self.nu),
        }
    }
}

/// One dyadic shell [r_lo, r_hi] of the L¹ integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub r_lo: f64,
    pub r_hi: f64,
    pub contribution: f64,
    /// No radius in the shell rises above its quadrature noise floor.
    pub unresolved: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelProfile {
    pub d: usize,
    pub eps0: f64,
    pub nodes: usize,
    pub beta0: f64,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// ε·1e3·∫|integrand| per radius: values below this are roundoff.
    pub noise_floor: Vec<f64>,
    /// |β₁| with n and n/2 nodes agree to 1e-6 (or both sit below the floor).
    pub converged: Vec<bool>,
    /// Running L¹ integral up to each grid radius, inner ball included.
    pub cumulative_l1: Vec<f64>,
    /// |β₁(0)|·vol(B_{r₀}), the bound used below the first grid radius.
    pub inner_ball: f64,
    pub shells: Vec<Shell>,
    pub l1_estimate: f64,
    pub tail_ratio: f64,
}

struct RadialValue {
    value: f64,
    coarse: f64,
    abs_integral: f64,
}

/// Breakpoints of the quadrature pieces on [0, ε₀] for radius r.
fn pieces(r: f64, eps0: f64) -> Vec<(f64, f64)> {
    let h = if r > 0.0 { (PI / r).min(eps0 / 16.0) } else { eps0 / 16.0 };
    let mut out = Vec::with_capacity(GRADED_LEVELS + (eps0 / h) as usize + 2);
    // geometric grading toward ρ = 0 for symbols singular there
    let mut hi = h;
    for _ in 0..GRADED_LEVELS {
        out.push((0.5 * hi, hi));
        hi *= 0.5;
    }
    out.reverse();
    let mut a = h;
    while a < eps0 {
        let b = (a + h).min(eps0);
        out.push((a, b));
        a = b;
    }
    out
}

fn radial_value(
    sym: &Symbol,
    cutoff: &CutoffSpec,
    ft: &SphereTransform,
    fine: &GaussLegendre,
    coarse: Option<&GaussLegendre>,
    r: f64,
) -> Result<RadialValue> {
    let d = ft.d as i32;
    let integrand = |rho: f64| -> Result<f64> {
        let c = cutoff.chi(rho);
        if c == 0.0 {
            return Ok(0.0);
        }
        Ok(c * sym.eval(rho * rho)? * ft.eval(rho * r) * rho.powi(d - 1))
    };
    let mut value = 0.0;
    let mut coarse_sum = 0.0;
    let mut abs_integral = 0.0;
    for (a, b) in pieces(r, cutoff.eps0) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (x, w) in fine.nodes().iter().zip(fine.weights()) {
            let f = integrand(mid + half * x)?;
            value += half * w * f;
            abs_integral += half * w * f.abs();
        }
        if let Some(coarse) = coarse {
            for (x, w) in coarse.nodes().iter().zip(coarse.weights()) {
                coarse_sum += half * w * integrand(mid + half * x)?;
            }
        }
    }
    Ok(RadialValue { value, coarse: coarse_sum, abs_integral })
}

/// β₁(r) at a single radius with `nodes` Gauss points per piece.
pub fn kernel_value(sym: &Symbol, d: usize, cutoff: &CutoffSpec, r: f64, nodes: usize) -> Result<f64> {
    check_d(d)?;
    let ft = SphereTransform::new(d);
    let gl = GaussLegendre::new(nodes);
    Ok(radial_value(sym, cutoff, &ft, &gl, None, r)?.value)
}

fn check_d(d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::domain("kernel_profile", "dimension must be ≥ 1"));
    }
    Ok(())
}

/// β₁ on a geometric grid from 0.1/ε₀ to r_max; see [`kernel_profile_with`].
pub fn kernel_profile(
    sym: &Symbol,
    d: usize,
    cutoff: &CutoffSpec,
    r_max: f64,
    points_per_decade: usize,
) -> Result<KernelProfile> {
    kernel_profile_with(sym, d, cutoff, r_max, points_per_decade, DEFAULT_NODES)
}

/// β₁ on a geometric grid from 0.1/ε₀ to r_max with `nodes` Gauss points per
/// half-period piece, plus the L¹ integral ∫|β₁| ω_{d−1} r^{d−1} dr split
/// into dyadic shells counted down from r_max.
pub fn kernel_profile_with(
    sym: &Symbol,
    d: usize,
    cutoff: &CutoffSpec,
    r_max: f64,
    points_per_decade: usize,
    nodes: usize,
) -> Result<KernelProfile> {
    check_d(d)?;
    let r0 = 0.1 / cutoff.eps0;
    if !(r_max >= 10.0 / cutoff.eps0 && r_max.is_finite()) {
        return Err(Error::domain("kernel_profile", format!("r_max must be ≥ 10/ε₀, got {r_max}")));
    }
    if points_per_decade == 0 || nodes < 2 {
        return Err(Error::domain("kernel_profile", "need points_per_decade ≥ 1 and nodes ≥ 2"));
    }
    let ft = SphereTransform::new(d);
    let fine = GaussLegendre::new(nodes);
    let coarse = GaussLegendre::new(nodes / 2);
    let n_r = ((r_max / r0).log10() * points_per_decade as f64).ceil() as usize + 1;
    let r_grid = geomspace(r0, r_max, n_r.max(2));

    let beta0 = radial_value(sym, cutoff, &ft, &fine, None, 0.0)?.value;
    let computed: Vec<RadialValue> =
        r_grid.par_iter().map(|&r| radial_value(sym, cutoff, &ft, &fine, Some(&coarse), r)).collect::<Result<_>>()?;

    let eps = f64::EPSILON;
    let values: Vec<f64> = computed.iter().map(|c| c.value).collect();
    let noise_floor: Vec<f64> = computed.iter().map(|c| NOISE_MULTIPLE * eps * c.abs_integral).collect();
    let converged: Vec<bool> = computed
        .iter()
        .zip(&noise_floor)
        .map(|(c, &floor)| (c.value - c.coarse).abs() <= 1e-6 * c.value.abs() + floor)
        .collect();

    let omega = sphere_area(d - 1);
    let inner_ball = beta0.abs() * omega * r0.powi(d as i32) / d as f64;
    // trapezoid in log r: ∫ f dr = ∫ f r d(log r)
    let density: Vec<f64> = r_grid.iter().zip(&values).map(|(&r, v)| v.abs() * omega * r.powi(d as i32)).collect();
    let mut cumulative_l1 = Vec::with_capacity(r_grid.len());
    let mut acc = inner_ball;
    cumulative_l1.push(acc);
    for i in 1..r_grid.len() {
        acc += 0.5 * (density[i] + density[i - 1]) * (r_grid[i] / r_grid[i - 1]).ln();
        cumulative_l1.push(acc);
    }
    let l1_estimate = acc;

    let shells = dyadic_shells(&r_grid, &values, &noise_floor, &cumulative_l1);
    let tail_ratio = tail_ratio(&shells, l1_estimate);
    Ok(KernelProfile {
        d,
        eps0: cutoff.eps0,
        nodes,
        beta0,
        r_grid,
        values,
        noise_floor,
        converged,
        cumulative_l1,
        inner_ball,
        shells,
        l1_estimate,
        tail_ratio,
    })
}

/// Interpolates the cumulative integral (linear in log r) at radius r.
fn cumulative_at(r_grid: &[f64], cum: &[f64], r: f64) -> f64 {
    let i = r_grid.partition_point(|&x| x < r);
    if i == 0 {
        return cum[0];
    }
    if i >= r_grid.len() {
        return cum[cum.len() - 1];
    }
    let t = (r / r_grid[i - 1]).ln() / (r_grid[i] / r_grid[i - 1]).ln();
    cum[i - 1] + t * (cum[i] - cum[i - 1])
}

fn dyadic_shells(r_grid: &[f64], values: &[f64], floor: &[f64], cum: &[f64]) -> Vec<Shell> {
    let r0 = r_grid[0];
    let mut shells = Vec::new();
    let mut hi = r_grid[r_grid.len() - 1];
    while 0.5 * hi >= r0 {
        let lo = 0.5 * hi;
        let contribution = cumulative_at(r_grid, cum, hi) - cumulative_at(r_grid, cum, lo);
        let unresolved = r_grid
            .iter()
            .zip(values.iter().zip(floor))
            .filter(|(&r, _)| r >= lo && r <= hi)
            .all(|(_, (v, f))| v.abs() <= *f);
        shells.push(Shell { r_lo: lo, r_hi: hi, contribution, unresolved });
        hi = lo;
    }
    shells.reverse();
    shells
}

/// Largest ratio of successive contributions among the last three shells.
/// Unresolved or negligible shells count as zero.
fn tail_ratio(shells: &[Shell], l1: f64) -> f64 {
    let n = shells.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let eff = |s: &Shell| {
        if s.unresolved || s.contribution <= NEGLIGIBLE_SHELL * l1 {
            0.0
        } else {
            s.contribution
        }
    };
    let last: Vec<f64> = shells[n - 3..].iter().map(eff).collect();
    let mut worst: f64 = 0.0;
    for w in last.windows(2) {
        let r = if w[1] == 0.0 {
            0.0
        } else if w[0] == 0.0 {
            f64::INFINITY
        } else {
            w[1] / w[0]
        };
        worst = worst.max(r);
    }
    worst
}

/// (‖β₁‖_{L¹} estimate, converged) with converged meaning a dyadic tail
/// ratio below 0.6.
pub fn kernel_l1_norm(profile: &KernelProfile) -> (f64, bool) {
    (profile.l1_estimate, profile.tail_ratio < TAIL_RATIO_LIMIT)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhsBound {
    pub value: f64,
    pub terms: Vec<f64>,
    /// First order j whose integral diverges.
    pub divergent_order: Option<usize>,
}

/// Σ_{j=0}^{d+1} ∫₀^{ε₀} z^j |∂^jΦ(z)| dz/z.
pub fn rhs_bound(sym: &Symbol, d: usize, eps0: f64) -> Result<RhsBound> {
    let sym = sym.clone().with_thresholds(sym.z0(), eps0)?;
    let chk = check_singularity(&sym, d)?;
    let value = chk.sum();
    Ok(RhsBound { value, divergent_order: chk.divergent_orders.first().copied(), terms: chk.terms })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelBoundCheck {
    pub d: usize,
    pub l1: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ratio_rmax_doubled: f64,
    pub ratio_nodes_doubled: f64,
    pub tail_ratio: f64,
    pub converged: bool,
    pub stable: bool,
    pub pass: bool,
    /// The L¹ estimate failed to converge although the right side is finite.
    pub red_flag: bool,
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Empirical witness of ‖β₁‖_{L¹} ≲ RHS: the ratio must be finite and change
/// by less than 10% when r_max or the quadrature nodes are doubled.
pub fn verify_kernel_bound(sym: &Symbol, d: usize, cutoff: &CutoffSpec) -> Result<KernelBoundCheck> {
    let r_max = DEFAULT_R_MAX_FACTOR / cutoff.eps0;
    Ok(verify_kernel_bound_with(sym, d, cutoff, r_max, DEFAULT_POINTS_PER_DECADE)?.0)
}

/// As [`verify_kernel_bound`] with explicit grid parameters; also returns the
/// base profile.
pub fn verify_kernel_bound_with(
    sym: &Symbol,
    d: usize,
    cutoff: &CutoffSpec,
    r_max: f64,
    ppd: usize,
) -> Result<(KernelBoundCheck, KernelProfile)> {
    let rhs = rhs_bound(sym, d, cutoff.eps0)?;
    if !rhs.value.is_finite() {
        return Err(Error::Precondition(format!("right-hand side diverges at j={}", rhs.divergent_order.unwrap_or(0))));
    }
    let base = kernel_profile_with(sym, d, cutoff, r_max, ppd, DEFAULT_NODES)?;
    let wide = kernel_profile_with(sym, d, cutoff, 2.0 * r_max, ppd, DEFAULT_NODES)?;
    let dense = kernel_profile_with(sym, d, cutoff, r_max, ppd, 2 * DEFAULT_NODES)?;
    let ratio_of = |p: &KernelProfile| if p.l1_estimate == 0.0 { 0.0 } else { p.l1_estimate / rhs.value };
    let (ratio, ratio_rmax_doubled, ratio_nodes_doubled) = (ratio_of(&base), ratio_of(&wide), ratio_of(&dense));
    let (l1, converged) = kernel_l1_norm(&base);
    let stable = rel_change(ratio, ratio_rmax_doubled) < STABILITY_LIMIT
        && rel_change(ratio, ratio_nodes_doubled) < STABILITY_LIMIT;
    let finite = ratio.is_finite();
    let check = KernelBoundCheck {
        d,
        l1,
        rhs: rhs.value,
        ratio,
        ratio_rmax_doubled,
        ratio_nodes_doubled,
        tail_ratio: base.tail_ratio,
        converged,
        stable,
        pass: finite && stable && converged,
        red_flag: !converged,
    };
    Ok((check, base))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shapes() {
        let c = CutoffSpec::new(0.5).unwrap();
        assert_eq!(c.chi(0.0), 1.0);
        assert_eq!(c.chi(0.5), 0.0);
        assert_eq!(c.chi(0.7), 0.0);
        assert!(c.chi(0.25) > 0.0 && c.chi(0.25) < 1.0);
        assert_eq!(c.chi1(0.9), 1.0);
        assert_eq!(c.chi1(-0.5), 1.0);
        assert_eq!(c.chi1(1.0), 0.0);
        assert_eq!(c.chi1(0.95), c.chi1(-0.95));
        assert!(CutoffSpec::new(0.0).is_err());
    }

    #[test]
    fn pieces_cover_support() {
        let p = pieces(100.0, 0.5);
        assert!(p[0].0 > 0.0 && p[0].0 < 1e-14);
        for w in p.windows(2) {
            assert_eq!(w[0].1, w[1].0);
        }
        assert_eq!(p.last().unwrap().1, 0.5);
    }

    #[test]
    fn zero_symbol_profile() {
        let zero = Symbol::custom("zero", |_| 0.0);
        let c = CutoffSpec::default();
        let p = kernel_profile(&zero, 3, &c, 40.0, 8).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
        assert_eq!(kernel_l1_norm(&p), (0.0, true));
    }

    #[test]
    fn unit_symbol_beta0_is_bump_mass() {
        let one = Symbol::custom("one", |_| 1.0);
        let c = CutoffSpec::default();
        let b0 = kernel_value(&one, 1, &c, 0.0, 16).unwrap();
        let direct = GaussLegendre::new(64).integrate(-0.5, 0.5, |x| c.chi(x));
        assert!((b0 - direct).abs() < 1e-10 * direct);
    }

    #[test]
    fn rhs_examples() {
        let s = Symbol::power(0.5).unwrap();
        let r = rhs_bound(&s, 1, 0.5).unwrap();
        assert!((r.value - 2.474_873_734_152_916).abs() < 1e-5);
        let one = Symbol::custom("one", |_| 1.0);
        let r = rhs_bound(&one, 1, 0.5).unwrap();
        assert!(r.value.is_infinite());
        assert_eq!(r.divergent_order, Some(0));
    }
}
