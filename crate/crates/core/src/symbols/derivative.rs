//! Central finite differences with Richardson extrapolation, the fallback for
//! symbols without analytic derivatives.

const LEVELS: usize = 4;
const STAGNATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Closed form or Taylor arithmetic rather than differencing.
    pub analytic: bool,
    /// The Richardson tableau failed to settle; treat `value` with suspicion.
    pub stagnated: bool,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Order-k central difference Σ (−1)^i C(k,i) f(z + (k/2 − i)h) / h^k, and
/// the largest |f| on the stencil.
fn central(f: &impl Fn(f64) -> f64, k: usize, z: f64, h: f64) -> (f64, f64) {
    let half = k as f64 / 2.0;
    let mut acc = 0.0;
    let mut fmax = 0.0f64;
    for i in 0..=k {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let v = f(z + (half - i as f64) * h);
        fmax = fmax.max(v.abs());
        acc += sign * binomial(k, i) * v;
    }
    (acc / h.powi(k as i32), fmax)
}

/// Smallest initial step: `max(1e-3, 1e-3·z)`, capped so the stencil never
/// leaves (0, ∞).
pub(crate) fn initial_step(k: usize, z: f64) -> f64 {
    1e-3f64.max(1e-3 * z).min(2.0 * z / (k as f64 + 2.0))
}

const STEP_WIDENINGS: [f64; 5] = [1.0, 4.0, 16.0, 64.0, 256.0];
/// Growth of stencil roundoff through the extrapolation.
const ROUNDOFF_GAIN: f64 = 4.0;

/// Richardson tableau from step `h0`: the final diagonal entry, its
/// predecessor, and an estimate of the roundoff in the final entry.
fn tableau(f: &impl Fn(f64) -> f64, k: usize, z: f64, h0: f64) -> (f64, f64, f64) {
    let mut h = h0;
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    let mut fmax = 0.0f64;
    for i in 0..LEVELS {
        let (d, m) = central(f, k, z, h);
        table[i][0] = d;
        fmax = fmax.max(m);
        let mut pow4 = 1.0;
        for j in 1..=i {
            pow4 *= 4.0;
            table[i][j] = table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (pow4 - 1.0);
        }
        h *= 0.5;
    }
    let h_min = 2.0 * h;
    let noise = ROUNDOFF_GAIN * f64::EPSILON * fmax * 2f64.powi(k as i32) / h_min.powi(k as i32);
    (table[LEVELS - 1][LEVELS - 1], table[LEVELS - 2][LEVELS - 2], noise)
}

/// k-th derivative of `f` at `z` by 4-level Richardson extrapolation of
/// central differences with halving steps.
///
/// The tableau is built from the initial step widened by 1, 4, 16, 64 and 256
/// (within the positivity cap). Each is scored by the larger of the change
/// between its last two diagonal entries and its roundoff estimate
/// ε·max|f|·2^k/h^k, and the lowest score wins. Wide steps matter when
/// |f| is large next to h|f′|, or for higher orders.
pub fn finite_difference(f: impl Fn(f64) -> f64, k: usize, z: f64) -> DerivativeEstimate {
    let cap = 2.0 * z / (k as f64 + 2.0);
    let base = initial_step(k, z);
    // (value, change, score)
    let mut best: Option<(f64, f64, f64)> = None;
    let mut last_h = 0.0;
    for w in STEP_WIDENINGS {
        let h = (base * w).min(cap);
        if h == last_h {
            continue;
        }
        last_h = h;
        let (v, prev, noise) = tableau(&f, k, z, h);
        let change = (v - prev).abs();
        let score = change.max(noise);
        if !v.is_finite() {
            continue;
        }
        if best.map_or(true, |b| score < b.2) {
            best = Some((v, change, score));
        }
    }
    let (value, change, _) = best.unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let stagnated = !value.is_finite() || !(change <= STAGNATION_TOL * value.abs().max(1e-300));
    DerivativeEstimate { value, analytic: false, stagnated }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn first_and_second_derivatives() {
        let d = finite_difference(|z: f64| z.powf(0.5), 1, 1.0);
        assert_relative_eq!(d.value, 0.5, max_relative = 1e-10);
        assert!(!d.stagnated);
        let d = finite_difference(|z: f64| z * (1.0 - z).exp(), 2, 1.0);
        assert_relative_eq!(d.value, -1.0, max_relative = 1e-9);
    }

    #[test]
    fn polynomials_are_exact_enough() {
        let d = finite_difference(|z: f64| (z - 2.0).powi(2), 2, 1.0);
        assert_relative_eq!(d.value, 2.0, max_relative = 1e-9);
        let d = finite_difference(|_| 1.0, 3, 0.7);
        assert_eq!(d.value, 0.0);
        assert!(!d.stagnated);
    }

    #[test]
    fn stencil_stays_positive_near_zero() {
        for k in 1..=6 {
            let z = 1e-6;
            let h = initial_step(k, z);
            assert!(z - k as f64 / 2.0 * h > 0.0);
        }
        let d = finite_difference(|z: f64| z.sqrt(), 1, 1e-4);
        assert_relative_eq!(d.value, 0.5 / 1e-2, max_relative = 1e-7);
    }
}
