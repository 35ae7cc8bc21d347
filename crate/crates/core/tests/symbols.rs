use std::collections::BTreeMap;

use approx::assert_relative_eq;
use helmloc::symbols::{
    check_growth, check_singularity, check_univalence, detect_j0, full_condition_report, ConditionMode,
};
use helmloc::{builtin_symbol, Symbol};
use proptest::prelude::*;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn builtin_catalogue_values() {
    let p = builtin_symbol("power", &params(&[("s", 0.5)])).unwrap();
    assert_eq!(p.eval(1.0).unwrap(), 1.0);
    assert_eq!(p.eval(4.0).unwrap(), 2.0);
    assert_eq!(p.eval(9.0).unwrap(), 3.0);
    let r = builtin_symbol("relativistic", &params(&[("s", 1.0), ("m", 2.0)])).unwrap();
    assert_eq!(r.eval(0.0).unwrap(), 0.0);
    assert_eq!(Symbol::tanh_dn().eval(0.0).unwrap(), 0.0);
    assert!(builtin_symbol("nope", &BTreeMap::new()).is_err());
    assert!(builtin_symbol("power", &params(&[("s", 0.0)])).is_err());
    assert!(p.eval(-1.0).is_err());
    assert!(p.eval(f64::NAN).is_err());
}

#[test]
fn derivative_values() {
    assert_eq!(Symbol::power(2.0).unwrap().derivative(1, 3.0).unwrap(), 6.0);
    assert_relative_eq!(Symbol::power(0.5).unwrap().derivative(1, 1.0).unwrap(), 0.5, max_relative = 1e-15);
    // Φ″(z) = (z − 2)e^{1−z}
    assert_relative_eq!(Symbol::exp_bump().derivative(2, 1.0).unwrap(), -1.0, max_relative = 1e-12);
    assert!(Symbol::power(0.5).unwrap().derivative(1, 0.0).is_err());
}

#[test]
fn coth_family_strictly_increasing() {
    let c = Symbol::coth_dn();
    let mut prev = c.eval(0.1).unwrap();
    for i in 1..200 {
        let z = 0.1 + 9.9 * i as f64 / 199.0;
        let v = c.eval(z).unwrap();
        assert!(v > prev, "z={z}");
        prev = v;
    }
}

#[test]
fn power_growth_exponents() {
    for s in [0.25, 0.5, 1.5, 2.5] {
        let g = check_growth(&Symbol::power(s).unwrap(), 3, 1e4).unwrap();
        assert!(g.pass);
        for (k, e) in g.exponents.iter().enumerate() {
            assert!((e.unwrap() - (s - k as f64)).abs() <= 0.05, "s={s} k={k} {e:?}");
        }
    }
}

#[test]
fn singularity_closed_forms() {
    // ∫₀^ε z^{j−1}|∂^j z^s| dz = |s(s−1)…(s−j+1)| ε^s / s
    let eps = 0.5f64;
    for s in [0.5, 1.5, 2.5] {
        for d in 1..=3 {
            let chk = check_singularity(&Symbol::power(s).unwrap(), d).unwrap();
            assert!(chk.pass);
            assert_eq!(chk.terms.len(), d + 2);
            let mut fall = 1.0f64;
            for (j, t) in chk.terms.iter().enumerate() {
                let want = fall.abs() * eps.powf(s) / s;
                if want == 0.0 {
                    assert_eq!(*t, 0.0);
                } else {
                    assert_relative_eq!(*t, want, max_relative = 1e-6);
                }
                fall *= s - j as f64;
            }
        }
    }
}

#[test]
fn condition_reports() {
    let p = full_condition_report(&Symbol::power(0.5).unwrap(), 3, ConditionMode::StrictC).unwrap();
    assert!(p.pass && p.growth_pass && p.singularity_pass && p.univalence_pass);
    assert_eq!(p.j0, Some(1));
    assert_eq!(p.singularity_terms.len(), 5);

    let b = full_condition_report(&Symbol::exp_bump(), 1, ConditionMode::GeneralC3).unwrap();
    assert!(b.pass);
    assert_eq!(b.j0, Some(2));
    assert_relative_eq!(b.phi_at_one, 1.0, max_relative = 1e-15);

    let one = Symbol::custom("one", |_| 1.0);
    let o = full_condition_report(&one, 1, ConditionMode::StrictC).unwrap();
    assert!(!o.pass && !o.singularity_pass);
}

#[test]
fn level_crossing_bracket() {
    let quad = Symbol::custom("shifted_square", |z| (z - 2.0) * (z - 2.0));
    let u = check_univalence(&quad, 10.0, 1e-10).unwrap();
    assert!(!u.pass && !u.level_crossing_free);
    assert!(u.brackets.iter().any(|(lo, hi)| *lo <= 3.0 && 3.0 <= *hi));
}

fn family() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (0.1f64..3.0).prop_map(|s| Symbol::power(s).unwrap()),
        (0.2f64..1.0, 0.5f64..3.0).prop_map(|(s, m)| Symbol::relativistic(s, m).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn j0_invariant_under_scaling(sym in family(), c in 0.01f64..100.0) {
        let a = detect_j0(&sym, 6, 1e-9).unwrap().map(|x| x.0);
        let b = detect_j0(&sym.scaled(c).unwrap(), 6, 1e-9).unwrap().map(|x| x.0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn analytic_and_numeric_derivatives_agree(sym in family(), k in 1usize..4) {
        let name = sym.name().to_string();
        let p = sym.params().clone();
        let numeric = {
            let inner = builtin_symbol(&name, &p).unwrap();
            Symbol::custom("numeric", move |z| inner.eval(z).unwrap())
        };
        for z in [0.5, 1.0, 2.0, 10.0] {
            let a = sym.derivative(k, z).unwrap();
            let n = numeric.derivative(k, z).unwrap();
            prop_assert!((a - n).abs() <= 1e-6 * a.abs().max(1e-300), "k={} z={} {} {}", k, z, a, n);
        }
    }

    #[test]
    fn monotone_symbols_have_no_level_crossing(sym in family()) {
        let u = check_univalence(&sym, 100.0, 1e-10).unwrap();
        prop_assert!(u.level_crossing_free);
        prop_assert!(u.brackets.is_empty());
    }
}
