// Reference digits are kept as printed by the oracle.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use approx::assert_relative_eq;
use helmloc::bessel::{
    asymptotic_coeffs, bessel_j, bessel_j_asymptotic, bessel_j_integral, bessel_j_series, build_expansion,
    series_switch, surface_fourier, surface_fourier_bessel, verify_bessel_expansion, verify_fd_expansion,
    SurfaceExpansion,
};
use helmloc::quadrature::geomspace;
use helmloc::special::sphere_area;
use proptest::prelude::*;

// 30-digit reference values, rounded to 17 significant digits.
const REFERENCE: &[(f64, f64, f64)] = &[
    (0.0, 0.1, 0.99750156206604003),
    (0.0, 1.0, 0.76519768655796655),
    (0.0, 5.0, -0.1775967713143383),
    (0.0, 11.5, -0.067653948111665228),
    (0.0, 12.5, 0.1468840547004211),
    (0.0, 30.0, -0.086367983581040211),
    (0.0, 100.0, 0.019985850304223122),
    (0.0, 1000.0, 0.024786686152420175),
    (0.5, 0.1, 0.25189294032600095),
    (0.5, 11.5, -0.20597929491579231),
    (0.5, 1000.0, 0.020863266605093828),
    (1.0, 0.1, 0.049937526036242),
    (1.0, 1.0, 0.44005058574493352),
    (1.0, 5.0, -0.32757913759146522),
    (1.0, 11.5, -0.22837862066532347),
    (1.0, 12.5, -0.16548380461475972),
    (1.0, 30.0, -0.11875106261662294),
    (1.0, 100.0, -0.077145352014112158),
    (1.0, 1000.0, 0.0047283119070895239),
    (1.5, 1.0, 0.24029783912342701),
    (1.5, 30.0, -0.027267945711177688),
    (2.0, 0.1, 0.001248958658799919),
    (2.0, 5.0, 0.046565116277752216),
    (2.0, 12.5, -0.17336146343878266),
    (2.0, 100.0, -0.021528757344505366),
    (3.5, 0.1, 0.0000024016486669206173),
    (3.5, 5.0, 0.41002850725605811),
    (3.5, 30.0, 0.050801755511058041),
    (7.0, 0.1, 0.0000000000001549614867620228),
    (7.0, 1.0, 0.0000015023258174368082),
    (7.0, 11.5, -0.084624465349975154),
    (7.0, 12.5, -0.22517790045972311),
    (7.0, 30.0, 0.14518518957232827),
    (7.0, 1000.0, -0.0053217830764436154),
];

#[test]
fn matches_reference_values() {
    for &(nu, x, want) in REFERENCE {
        let got = bessel_j(nu, x).unwrap();
        assert!((got - want).abs() <= 1e-12 + 1e-11 * want.abs(), "J_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn integral_representation_agrees() {
    for &(nu, x, want) in REFERENCE.iter().filter(|r| r.1 <= 30.0) {
        let got = bessel_j_integral(nu, x).unwrap();
        assert!((got - want).abs() <= 1e-10, "J_{nu}({x}) = {got}, want {want}");
    }
}

fn half_integer_closed_form(nu: f64, x: f64) -> f64 {
    let pre = (2.0 / (PI * x)).sqrt();
    let (s, c) = x.sin_cos();
    match (2.0 * nu) as i32 {
        1 => pre * s,
        3 => pre * (s / x - c),
        5 => pre * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x),
        _ => unreachable!(),
    }
}

#[test]
fn half_integer_orders_closed_form() {
    for nu in [0.5, 1.5, 2.5] {
        for x in geomspace(0.1, 100.0, 400) {
            let got = bessel_j(nu, x).unwrap();
            let want = half_integer_closed_form(nu, x);
            assert!((got - want).abs() <= 1e-10, "nu={nu} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn series_and_asymptotic_overlap() {
    for nu in [0.0, 0.5, 1.0, 1.5] {
        let l0 = series_switch(nu);
        for i in 0..=50 {
            let x = l0 + 5.0 * i as f64 / 50.0;
            let s = bessel_j_series(nu, x);
            let a = bessel_j_asymptotic(nu, x);
            assert!((s - a).abs() <= 1e-7, "nu={nu} x={x}: {s} vs {a}");
        }
    }
}

#[test]
fn first_coefficient_exact() {
    assert_eq!(asymptotic_coeffs(0.0, 1)[1], -0.125);
    assert_eq!(asymptotic_coeffs(0.0, 3)[0], 1.0);
    // (4ν² − 1)(4ν² − 9)/(2!·8²) at ν = 0
    assert_eq!(asymptotic_coeffs(0.0, 2)[2], 9.0 / 128.0);
    // terminates for half-integer order
    assert!(asymptotic_coeffs(1.5, 4)[2..].iter().all(|a| *a == 0.0));
}

#[test]
fn surface_transform_paths_agree() {
    for d in 2..=5 {
        for lam in geomspace(0.1, 100.0, 40) {
            let q = surface_fourier(d, lam).unwrap();
            let b = surface_fourier_bessel(d, lam).unwrap();
            let scale = q.abs().max(b.abs()).max(1e-300);
            assert!((q - b).abs() <= 1e-8 * scale, "d={d} λ={lam}: {q} vs {b}");
        }
    }
}

#[test]
fn surface_transform_closed_forms() {
    for lam in [0.3, 2.0, 17.0, 90.0] {
        // F_3(λ) = 4π sin λ / λ, F_2(λ) = 2π J₀(λ)
        assert_relative_eq!(surface_fourier(3, lam).unwrap(), 4.0 * PI * lam.sin() / lam, max_relative = 1e-9);
        let j0 = bessel_j(0.0, lam).unwrap();
        assert!((surface_fourier(2, lam).unwrap() - 2.0 * PI * j0).abs() <= 1e-10);
    }
}

#[test]
fn surface_transform_small_argument_limit() {
    for d in 2..=6 {
        let f = surface_fourier(d, 1e-4).unwrap();
        assert_relative_eq!(f, sphere_area(d - 1), max_relative = 1e-5);
    }
}

#[test]
fn expansion_decay_rates() {
    let lambdas = geomspace(10.0, 1e3, 16);
    for nu in [0.0, 1.0] {
        for k in 1..=3 {
            let chk = verify_bessel_expansion(nu, k, &lambdas).unwrap();
            let fit = chk.fitted_decay.unwrap();
            assert!((fit + (k as f64 + 1.5)).abs() <= 0.15, "nu={nu} K={k}: {fit}");
            assert!(chk.max_scaled_error.is_finite() && chk.max_scaled_error < 1.0);
        }
    }
    for d in [2, 4] {
        for k in 1..=3 {
            let chk = verify_fd_expansion(d, k, &lambdas).unwrap();
            let want = -(k as f64 + (d as f64 + 1.0) / 2.0);
            let fit = chk.fitted_decay.unwrap();
            assert!((fit - want).abs() <= 0.15, "d={d} K={k}: {fit}");
        }
    }
}

#[test]
fn odd_dimension_expansions_terminate() {
    let lambdas = geomspace(10.0, 1e3, 8);
    for d in [3, 5] {
        for k in 1..=3 {
            let chk = verify_fd_expansion(d, k, &lambdas).unwrap();
            assert!(chk.exact, "d={d} K={k}");
            assert!(chk.rows.iter().all(|r| r.error.abs() <= 1e-9 * r.reference.abs().max(1e-3)));
        }
    }
}

#[test]
fn table_rows_for_order_zero() {
    let chk = verify_bessel_expansion(0.0, 2, &[10.0, 20.0, 40.0, 80.0]).unwrap();
    assert_eq!(chk.rows.len(), 4);
    for w in chk.rows.windows(2) {
        assert!(w[1].envelope < w[0].envelope);
    }
    // the scaled envelope tends to √(2/π)|a₃(0)| = √(2/π)·225/3072
    let limit = (2.0 / PI).sqrt() * 225.0 / 3072.0;
    assert_relative_eq!(chk.rows[3].scaled_error, limit, max_relative = 2e-3);
    assert!(chk.rows.iter().all(|r| (r.scaled_error - limit).abs() < 0.03 * limit));
}

#[test]
fn surface_expansion_domain() {
    assert!(SurfaceExpansion::new(1, 2).is_err());
    assert!(build_expansion(0.0, 0).is_err());
    let e = build_expansion(0.0, 2).unwrap();
    assert!(e.eval(9.0).is_err());
}

proptest! {
    #[test]
    fn alpha_beta_regenerate(nu in 0.0f64..4.0, k in 1usize..6) {
        let e = build_expansion(nu, k).unwrap();
        let (alpha, beta) = e.regenerate();
        prop_assert_eq!(alpha.len(), e.alpha().len());
        for (x, y) in alpha.iter().zip(e.alpha()).chain(beta.iter().zip(e.beta())) {
            prop_assert!((x - y).abs() <= 1e-14 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn recurrence_holds(nu in 1.0f64..5.0, x in 0.5f64..60.0) {
        // J_{ν−1} + J_{ν+1} = (2ν/x) J_ν
        let lhs = bessel_j(nu - 1.0, x).unwrap() + bessel_j(nu + 1.0, x).unwrap();
        let rhs = 2.0 * nu / x * bessel_j(nu, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9, "{} {}", lhs, rhs);
    }
}
