//! Truncated Taylor arithmetic.
//!
//! A [`Jet`] holds the normalized Taylor coefficients `c_n = f^{(n)}(z₀)/n!`
//! of a function around a base point, up to a fixed order. Propagating a jet
//! through elementary operations yields all derivatives of the composite
//! without finite differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::special::factorial;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// The identity function z ↦ z expanded at `z0`, carrying `order` derivatives.
    pub fn variable(z0: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = z0;
        if order >= 1 {
            c[1] = 1.0;
        }
        Jet { c }
    }

    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet { c }
    }

    pub fn from_coeffs(c: Vec<f64>) -> Self {
        assert!(!c.is_empty());
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    /// k-th derivative at the base point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c.get(k).map_or(0.0, |c| c * factorial(k))
    }

    pub fn scale(&self, a: f64) -> Jet {
        Jet { c: self.c.iter().map(|v| v * a).collect() }
    }

    pub fn add_scalar(&self, a: f64) -> Jet {
        let mut c = self.c.clone();
        c[0] += a;
        Jet { c }
    }

    fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.c.len()]
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()) / self.clone()
    }

    pub fn exp(&self) -> Jet {
        let a = &self.c;
        let mut e = self.zeros();
        e[0] = a[0].exp();
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|i| i as f64 * a[i] * e[n - i]).sum();
            e[n] = s / n as f64;
        }
        Jet { c: e }
    }

    pub fn ln(&self) -> Jet {
        let a = &self.c;
        let mut l = self.zeros();
        l[0] = a[0].ln();
        for n in 1..a.len() {
            let s: f64 = (1..n).map(|i| i as f64 * l[i] * a[n - i]).sum();
            l[n] = (a[n] - s / n as f64) / a[0];
        }
        Jet { c: l }
    }

    pub fn sqrt(&self) -> Jet {
        let a = &self.c;
        let mut s = self.zeros();
        s[0] = a[0].sqrt();
        for n in 1..a.len() {
            let acc: f64 = (1..n).map(|i| s[i] * s[n - i]).sum();
            s[n] = (a[n] - acc) / (2.0 * s[0]);
        }
        Jet { c: s }
    }

    /// a^r for real r; requires a₀ > 0 unless the jet is order 0.
    pub fn powf(&self, r: f64) -> Jet {
        let a = &self.c;
        let mut p = self.zeros();
        p[0] = a[0].powf(r);
        for n in 1..a.len() {
            let s: f64 = (1..=n).map(|i| (r * i as f64 - (n - i) as f64) * a[i] * p[n - i]).sum();
            p[n] = s / (n as f64 * a[0]);
        }
        Jet { c: p }
    }

    /// Integer power by repeated squaring; valid for any sign of a₀.
    pub fn powi(&self, n: i32) -> Jet {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Jet::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// (sin, cos) pair.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let a = &self.c;
        let mut s = self.zeros();
        let mut c = self.zeros();
        s[0] = a[0].sin();
        c[0] = a[0].cos();
        for n in 1..a.len() {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for i in 1..=n {
                ss += i as f64 * a[i] * c[n - i];
                cc += i as f64 * a[i] * s[n - i];
            }
            s[n] = ss / n as f64;
            c[n] = -cc / n as f64;
        }
        (Jet { c: s }, Jet { c })
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// tanh via t' = (1 - t²) a'.
    pub fn tanh(&self) -> Jet {
        let a = &self.c;
        let len = a.len();
        let mut t = vec![0.0; len];
        // u = 1 - t²
        let mut u = vec![0.0; len];
        t[0] = a[0].tanh();
        u[0] = 1.0 - t[0] * t[0];
        for n in 1..len {
            let s: f64 = (1..=n).map(|i| i as f64 * a[i] * u[n - i]).sum();
            t[n] = s / n as f64;
            let sq: f64 = (0..=n).map(|i| t[i] * t[n - i]).sum();
            u[n] = -sq;
        }
        Jet { c: t }
    }

    pub fn sinh(&self) -> Jet {
        let e = self.exp();
        let em = (-self.clone()).exp();
        (e - em).scale(0.5)
    }

    pub fn cosh(&self) -> Jet {
        let e = self.exp();
        let em = (-self.clone()).exp();
        (e + em).scale(0.5)
    }

    /// Re-expands a power series Σ gₙ zⁿ (about 0) as a jet about `z0`.
    pub fn from_power_series(g: &[f64], z0: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        for (k, ck) in c.iter_mut().enumerate() {
            // c_k = Σ_{n≥k} C(n,k) g_n z0^{n-k}
            let mut acc = 0.0;
            for n in (k..g.len()).rev() {
                acc = acc * z0 + binomial(n, k) * g[n];
            }
            *ck = acc;
        }
        Jet { c }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let len = self.c.len().min(rhs.c.len());
        let mut p = vec![0.0; len];
        for (n, pn) in p.iter_mut().enumerate() {
            *pn = (0..=n).map(|i| self.c[i] * rhs.c[n - i]).sum();
        }
        Jet { c: p }
    }
}

impl Div for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let len = self.c.len().min(rhs.c.len());
        let mut q = vec![0.0; len];
        for n in 0..len {
            let s: f64 = (1..=n).map(|i| rhs.c[i] * q[n - i]).sum();
            q[n] = (self.c[n] - s) / rhs.c[0];
        }
        Jet { c: q }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Jet {
            type Output = Jet;
            fn $m(self, rhs: Jet) -> Jet {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_rule() {
        // z·e^{1-z}: second derivative (z-2)e^{1-z}
        let z = Jet::variable(1.0, 4);
        let f = &z * &(-z.clone()).add_scalar(1.0).exp();
        assert_relative_eq!(f.value(), 1.0, max_relative = 1e-15);
        assert!(f.derivative(1).abs() < 1e-15);
        assert_relative_eq!(f.derivative(2), -1.0, max_relative = 1e-14);
        // third: -(z-3)e^{1-z} = 2 at z=1
        assert_relative_eq!(f.derivative(3), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let x0 = 0.7;
        let z = Jet::variable(x0, 3);
        let t = z.tanh();
        let sech2 = 1.0 / x0.cosh().powi(2);
        assert_relative_eq!(t.derivative(1), sech2, max_relative = 1e-14);
        assert_relative_eq!(t.derivative(2), -2.0 * x0.tanh() * sech2, max_relative = 1e-13);

        let p = z.powf(0.5);
        assert_relative_eq!(p.derivative(2), -0.25 * x0.powf(-1.5), max_relative = 1e-13);
        let s = z.sqrt();
        assert_relative_eq!(s.derivative(3), p.derivative(3), max_relative = 1e-13);

        let l = z.ln();
        assert_relative_eq!(l.derivative(3), 2.0 / x0.powi(3), max_relative = 1e-13);

        let (sn, cs) = z.sin_cos();
        assert_relative_eq!(sn.derivative(3), -x0.cos(), max_relative = 1e-13);
        assert_relative_eq!(cs.derivative(2), -x0.cos(), max_relative = 1e-13);

        let q = (z.clone().add_scalar(-2.0)).powi(2);
        assert_relative_eq!(q.derivative(1), 2.0 * (x0 - 2.0), max_relative = 1e-14);
        assert_relative_eq!(q.derivative(2), 2.0, max_relative = 1e-14);
        assert_eq!(q.derivative(3), 0.0);
    }

    #[test]
    fn power_series_reexpansion() {
        // e^z = Σ zⁿ/n!
        let g: Vec<f64> = (0..30).map(factorial).map(|f| 1.0 / f).collect();
        let j = Jet::from_power_series(&g, 0.3, 4);
        for k in 0..=4 {
            assert_relative_eq!(j.derivative(k), 0.3f64.exp(), max_relative = 1e-14);
        }
    }
}
