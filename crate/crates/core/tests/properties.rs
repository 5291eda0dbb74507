use proptest::prelude::*;
use subprod::classify::{classify, decide_isomorphic};
use subprod::embed::{liebscher_probe, ExpSegment, ExpTerm, Point};
use subprod::morphisms::{compose, decompose_automorphism, make_automorphism, verify_automorphism, Word};
use subprod::num::{CVec2, Time, Tolerance};
use subprod::rational::{build_tower, y_norm_law};
use subprod::system::{generate_canonical, load_system, save_system, scramble, FiniteGridSystem, SystemSpec};
use subprod::C64;

fn spec_strategy() -> impl Strategy<Value = SystemSpec> {
    prop_oneof![
        (0.0..0.95f64).prop_map(|a| SystemSpec::E1 { a }),
        (0.05..0.95f64).prop_map(|a| SystemSpec::E2 { a }),
        (0.2..3.0f64, -3.0..3.0f64).prop_map(|(r, phi)| SystemSpec::e3(C64::from_polar(r, phi))),
        Just(SystemSpec::E4),
        Just(SystemSpec::E5),
    ]
}

fn tol() -> Tolerance {
    Tolerance::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scrambling_preserves_class(spec in spec_strategy(), seed in 0u64..10_000) {
        let (sys, _) = generate_canonical(&spec, 1, 5).unwrap();
        let (s, _) = scramble(&sys, seed).unwrap();
        let class = classify(&s, &tol()).unwrap();
        prop_assert!(class.spec.approx_eq(&spec, 1e-8), "{} vs {}", class.spec, spec);
        prop_assert!(class.residual <= 1e-9);
        let iso = decide_isomorphic(&sys, &s, &tol()).unwrap();
        prop_assert!(iso.is_some_and(|i| i.residual <= 1e-10));
    }

    #[test]
    fn automorphisms_form_a_group(c1 in 0.0..std::f64::consts::TAU, c2 in 0.0..std::f64::consts::TAU, b1 in 0.0..std::f64::consts::TAU, b2 in 0.0..std::f64::consts::TAU, seed in 0u64..1000) {
        let spec = SystemSpec::e3(C64::new(0.7, 0.4));
        let (sys, _) = generate_canonical(&spec, 1, 5).unwrap();
        let (sys, _) = scramble(&sys, seed).unwrap();
        let class = classify(&sys, &tol()).unwrap();
        let f = make_automorphism(&class, Word { c: c1, swap: false, extra: Some(b1) }).unwrap();
        let g = make_automorphism(&class, Word { c: c2, swap: false, extra: Some(b2) }).unwrap();
        let fg = compose(&f.thetas, &g.thetas);
        prop_assert!(verify_automorphism(&sys, &fg).unwrap() <= 1e-10);
        let w = decompose_automorphism(&sys, &class, &fg, &tol()).unwrap();
        let circ = |x: f64, y: f64| { let d = (x - y).rem_euclid(std::f64::consts::TAU); d.min(std::f64::consts::TAU - d) };
        prop_assert!(circ(w.c, c1 + c2) <= 1e-9);
        prop_assert!(circ(w.extra.unwrap(), b1 + b2) <= 1e-9);
        let inv: Vec<_> = f.thetas.iter().map(|t| t.adjoint()).collect();
        let id = compose(&f.thetas, &inv);
        prop_assert!(id.iter().all(|m| m.max_abs_diff(&subprod::num::Mat2::identity()) <= 1e-12));
    }

    #[test]
    fn towers_are_compatible(c in 0.3..3.0f64, b in -3.0..3.0f64, r2 in 0u64..2, r3 in 0u64..3) {
        let tower = build_tower(&SystemSpec::e3_rational(c, b, vec![]), 3, &[r2, r3], 2).unwrap();
        prop_assert!(tower.max_compatibility() <= 1e-11);
        let lvl = tower.finest();
        for j in 1..=lvl.system.horizon() {
            let law = y_norm_law(c, Time::new(j, lvl.denominator).unwrap());
            prop_assert!((lvl.basis.y(j).norm_sqr() - law).abs() <= 1e-12 * law.max(1.0));
        }
    }

    #[test]
    fn probe_respects_cauchy_schwarz(spec in spec_strategy(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
        prop_assume!(!matches!(spec, SystemSpec::E2 { .. }));
        let (sys, _) = generate_canonical(&spec, 4, 8).unwrap();
        let h = CVec2::new(C64::new(1.0, 0.0), C64::new(re, im));
        let p = liebscher_probe(&sys, &h).unwrap();
        prop_assert!(p.cauchy_schwarz_excess() <= 1e-12);
    }

    #[test]
    fn segment_split_is_isometric(a in -2.0..2.0f64, g in 0.2..4.0f64, w in -5.0..5.0f64, cut in 1u64..12) {
        let f = ExpSegment::single(Point::from_integer(1), vec![ExpTerm::new(C64::new(a, 0.5), g, w), ExpTerm::constant(C64::new(0.3, 0.0))]);
        let (l, r) = f.split(Point::new(cut, 12)).unwrap();
        let whole = f.norm_sqr();
        prop_assert!((l.norm_sqr() + r.norm_sqr() - whole).abs() <= 1e-12 * whole.max(1.0));
    }
}

#[test]
fn json_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sys.json");
    let (sys, _) = generate_canonical(&SystemSpec::e3(C64::new(-0.5, 0.1)), 6, 6).unwrap();
    let (sys, _) = scramble(&sys, 5).unwrap();
    save_system(&sys, &path).unwrap();
    let back: FiniteGridSystem = load_system(&path, &tol()).unwrap();
    assert_eq!(back.max_map_diff(&sys).unwrap(), 0.0);
}

#[test]
fn restriction_of_e2_at_even_step_is_not_liftable_with_phase() {
    use subprod::morphisms::{lift_automorphism, restrict_classified};
    let (sys, _) = generate_canonical(&SystemSpec::E2 { a: 0.0 }, 1, 8).unwrap();
    let class = classify(&sys, &tol()).unwrap();
    let (_, rclass) = restrict_classified(&sys, &class, 2).unwrap();
    let r = make_automorphism(&rclass, Word { c: 0.0, swap: false, extra: Some(1.0) }).unwrap();
    assert!(matches!(lift_automorphism(&sys, &class, 2, &r.thetas, &tol()), Err(subprod::Error::NotLiftable(_))));
}
