mod common;

use proptest::prelude::*;

use common::{c, drop_near_poles, multiset_distance, polynomial_spectrum, string_original_polynomial};
use rembound::bounds::{self, unitary_e_norm, Direction};
use rembound::cli::ProblemFile;
use rembound::linalg::{eigenvalues, induced_norm, ComplexMatrix, NormKind, C64};
use rembound::mrf::{MatrixRationalFunction, RationalTerm};
use rembound::oracle::{spectrum, DEFAULT_POLE_TOL};
use rembound::problems::{random_mrf, string_problem, CoeffKind, PoleRegion, StringProblemSpec};
use rembound::scalar_roots::PoleSumFunction;

fn pole_sum_inputs() -> impl Strategy<Value = (f64, Vec<(f64, f64)>)> {
    (
        0.0..50.0f64,
        prop::collection::vec((1e-6..100.0f64, 0.0..100.0f64), 0..=6),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pole_sum_roots_interlace((c0, terms) in pole_sum_inputs()) {
        let f = PoleSumFunction::build(c0, &terms).unwrap();
        let roots = f.all_roots();
        let poles: Vec<f64> = f.poles().collect();
        prop_assert_eq!(roots.len(), poles.len() + 1);
        for (k, &b) in poles.iter().enumerate() {
            prop_assert!(roots[k] < b && b < roots[k + 1], "roots {:?} poles {:?}", roots, poles);
        }
        for &r in &roots {
            prop_assert!(f.evaluate(r).abs() <= 1e-9 * f.residual_scale(r));
        }
        // The largest root bounds every pole and c0 from above.
        let top = f.largest_root();
        prop_assert!(top >= c0 && poles.iter().all(|&b| top > b));
    }

    #[test]
    fn upper_bounds_are_sound(seed in any::<u64>(), n in 1usize..=4, m in 0usize..=3) {
        let t = random_mrf(n, m, PoleRegion::default(), CoeffKind::Gaussian, seed);
        let s = spectrum(&t, DEFAULT_POLE_TOL).unwrap();
        for norm in [NormKind::Spectral, NormKind::One, NormKind::Infinity] {
            for r in bounds::all_bounds(&t, norm) {
                if r.is_certificate() && r.direction == Direction::Upper {
                    prop_assert!(s.mu <= r.value * (1.0 + 1e-8), "{} {}: {} > {}", r.method, norm, s.mu, r.value);
                }
            }
        }
    }

    #[test]
    fn lower_bound_is_sound_when_hypothesis_holds(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, k in 2.0..40.0f64) {
        let base = random_mrf(n, m, PoleRegion::Annulus { inner: 0.5, outer: 10.0 }, CoeffKind::HaarUnitary, seed);
        let t = MatrixRationalFunction::new(base.b0().scale(c(k, 0.0)), base.terms().to_vec()).unwrap();
        let r = bounds::rational_lower_bound(&t, NormKind::Spectral);
        let s = spectrum(&t, DEFAULT_POLE_TOL).unwrap();
        if r.is_certificate() {
            let lo = s.min_modulus().unwrap();
            prop_assert!(lo >= r.value * (1.0 - 1e-8), "{} < {}", lo, r.value);
        }
    }

    #[test]
    fn unitary_closed_form_matches_svd(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=4) {
        let t = random_mrf(n, m, PoleRegion::default(), CoeffKind::HaarUnitary, seed);
        let (_, e) = t.perturbation_split();
        prop_assert!((induced_norm(&e, NormKind::Spectral) - unitary_e_norm(m)).abs() <= 1e-8);
        prop_assert!(bounds::unitary_dominance_check(&t).unwrap());
    }

    #[test]
    fn linearizations_agree(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3) {
        let t = random_mrf(n, m, PoleRegion::default(), CoeffKind::Gaussian, seed);
        let s = spectrum(&t, DEFAULT_POLE_TOL).unwrap();
        let poles: Vec<C64> = t.poles().collect();
        let p = drop_near_poles(polynomial_spectrum(&t), &poles, DEFAULT_POLE_TOL);
        prop_assert!(multiset_distance(&s.eigenvalues, &p) <= 1e-7);
    }

    #[test]
    fn problem_file_roundtrip_bitwise(
        n in 1usize..=3,
        entries in prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, 18 * 4),
        poles in prop::collection::vec((-1e6..1e6f64, -1e6..1e6f64), 0..=1),
    ) {
        let mut it = entries.iter().copied();
        let mut mat = || ComplexMatrix::from_fn(n, n, |_, _| c(it.next().unwrap(), it.next().unwrap()));
        let b0 = mat();
        let terms: Vec<RationalTerm> = poles.iter().map(|&(re, im)| RationalTerm::new(c(re, im), mat())).collect();
        let t = MatrixRationalFunction::new(b0, terms).unwrap();
        let text = ProblemFile::from_mrf(&t).to_json();
        let back = ProblemFile::parse(&text, "mem").unwrap().to_mrf().unwrap();
        let bits = |m: &ComplexMatrix| m.as_slice().iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect::<Vec<_>>();
        prop_assert_eq!(bits(back.b0()), bits(t.b0()));
        for (a, b) in back.terms().iter().zip(t.terms()) {
            prop_assert_eq!(bits(&a.coeff), bits(&b.coeff));
            prop_assert_eq!((a.pole.re.to_bits(), a.pole.im.to_bits()), (b.pole.re.to_bits(), b.pole.im.to_bits()));
        }
    }
}

#[test]
fn string_forms_share_spectrum() {
    for n in 2..=10 {
        let alpha = c(1.0, 0.0);
        let t = string_problem(&StringProblemSpec::new(n, alpha).unwrap()).unwrap();
        let s = spectrum(&t, DEFAULT_POLE_TOL).unwrap();
        let original = eigenvalues(&string_original_polynomial(n, alpha).companion().unwrap()).unwrap();
        let near_alpha = original.iter().filter(|z| (*z - alpha).norm() <= 1e-6).count();
        assert_eq!(near_alpha, n - 1, "n = {n}");
        let kept = drop_near_poles(original, &[alpha], 1e-6);
        let d = multiset_distance(&s.eigenvalues, &kept);
        assert!(d <= 1e-7, "n = {n}: distance {d:e}");
        assert_eq!(s.removed_count(), n - 1);
    }
}

#[test]
fn string_forms_share_spectrum_complex_pole() {
    let alpha = c(0.5, 2.0);
    let t = string_problem(&StringProblemSpec::new(6, alpha).unwrap()).unwrap();
    let s = spectrum(&t, DEFAULT_POLE_TOL).unwrap();
    let original = eigenvalues(&string_original_polynomial(6, alpha).companion().unwrap()).unwrap();
    let kept = drop_near_poles(original, &[alpha], 1e-6);
    assert!(multiset_distance(&s.eigenvalues, &kept) <= 1e-7);
}
