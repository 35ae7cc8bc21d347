use helmloc::bernstein::{
    as_symbol, bernstein_derivative, bernstein_eval, verify_derivative_bound, verify_nondegeneracy, BernsteinSymbol,
};
use helmloc::quadrature::geomspace;
use helmloc::symbols::{check_singularity, check_univalence, finite_difference, full_condition_report, ConditionMode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_measures(n: usize, seed: u64) -> Vec<BernsteinSymbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let c2 = if i % 3 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
            let atoms = (0..rng.random_range(1..6))
                .map(|_| (10f64.powf(rng.random_range(-2.0..2.0)), rng.random_range(0.01..3.0)))
                .collect();
            BernsteinSymbol::new(0.0, c2, atoms).unwrap()
        })
        .collect()
}

/// Φ(λ) = c₁ + c₂λ + Σ w λ/(s(λ + s)) at complex argument.
fn eval_complex(bs: &BernsteinSymbol, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(bs.c1(), 0.0) + bs.c2() * z;
    for &(s, w) in bs.atoms() {
        acc += w * z / (s * (z + s));
    }
    acc
}

fn complex_step(bs: &BernsteinSymbol, lambda: f64) -> f64 {
    let h = 1e-30 * lambda.max(1.0);
    eval_complex(bs, Complex64::new(lambda, h)).im / h
}

#[test]
fn derivative_matches_difference_quotients() {
    let grid = geomspace(1e-3, 1e3, 61);
    for bs in random_measures(50, 11) {
        for &l in &grid {
            let d = bernstein_derivative(&bs, l).unwrap();
            let cs = complex_step(&bs, l);
            assert!((d - cs).abs() <= 1e-10 * cs.abs(), "{l}: {d} vs {cs}");
            let fd = finite_difference(|x| bernstein_eval(&bs, x).unwrap(), 1, l);
            assert!((d - fd.value).abs() <= 1e-8 * d.abs(), "{l}: {d} vs {}", fd.value);
        }
    }
}

#[test]
fn chain_inequality_has_no_violations() {
    let grid = geomspace(1e-3, 1e3, 121);
    for bs in random_measures(50, 23) {
        let b = verify_derivative_bound(&bs, &grid).unwrap();
        assert!(b.pass);
        assert!(b.max_ratio <= 1.0);
        for &l in &grid {
            assert!(l * bs.derivative(l) <= bs.eval(l));
        }
    }
}

#[test]
fn complete_monotonicity_signature() {
    for bs in random_measures(50, 5) {
        for l in geomspace(1e-3, 1e3, 25) {
            for k in 1..=6 {
                let v = bs.derivative_k(k, l);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                assert!(sign * v >= 0.0, "k={k} λ={l}: {v}");
            }
        }
    }
}

#[test]
fn nontrivial_instances_are_nondegenerate() {
    for bs in random_measures(50, 99) {
        let n = verify_nondegeneracy(&bs).unwrap();
        assert!(n.phi1_nonzero && n.dphi1_nonzero);
        assert!(n.phi_at_one > 0.0 && n.derivative_at_one > 0.0);
    }
}

#[test]
fn wrapped_symbols_are_admissible() {
    for bs in random_measures(50, 3) {
        let sym = as_symbol(&bs).unwrap();
        assert!(check_univalence(&sym, 100.0, 1e-10).unwrap().pass);
        for d in 1..=3 {
            assert!(check_singularity(&sym, d).unwrap().pass);
        }
    }
    for bs in random_measures(8, 17) {
        let sym = as_symbol(&bs).unwrap();
        for d in 1..=3 {
            let r = full_condition_report(&sym, d, ConditionMode::StrictC).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.j0, Some(1));
        }
    }
}

#[test]
fn single_atom_and_linear_cases() {
    let atom = as_symbol(&BernsteinSymbol::new(0.0, 0.0, vec![(1.0, 1.0)]).unwrap()).unwrap();
    let r = full_condition_report(&atom, 2, ConditionMode::StrictC).unwrap();
    assert!(r.pass);
    assert_eq!(r.j0, Some(1));
    let lin = as_symbol(&BernsteinSymbol::new(0.0, 1.0, vec![]).unwrap()).unwrap();
    assert!(full_condition_report(&lin, 3, ConditionMode::StrictC).unwrap().pass);
    assert!(as_symbol(&BernsteinSymbol::new(0.5, 1.0, vec![(1.0, 1.0)]).unwrap()).is_err());
}
