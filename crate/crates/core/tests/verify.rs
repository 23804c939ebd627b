use gricci::geometry::{CutoffSpec, Model};
use gricci::verify::*;
use num_complex::Complex64;

fn plane(ell: &str) -> CutoffSpec {
    CutoffSpec::new(ell, DEFAULT_EPSILON, Model::Halfspace).unwrap()
}

fn alpha() -> TestForm {
    TestForm::constant(1, [0.1, 0.0, 0.0], 1.0, &[1.0, 0.5, 0.3]).unwrap()
}

fn beta() -> TestForm {
    TestForm::constant(1, [-0.2, 0.1, 0.0], 1.0, &[0.4, -1.0, 0.7]).unwrap()
}

fn combined(a: &MCEstimate, b: &MCEstimate) -> f64 {
    a.stderr.hypot(b.stderr)
}

#[test]
fn lemma_constant_ratio_matches_limit() {
    let (l1, l2) = (plane("1"), plane("2"));
    let e = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &McOptions::new(1_000_000, 11)).unwrap();
    let rhs = lemma_rhs(&alpha(), &beta(), &l1, &l2).unwrap();
    assert!(e.consistent_with(Complex64::new(rhs, 0.0), 3.0), "{} ± {} vs {rhs}", e.value, e.stderr);
    // orientation lock: the estimate has the sign of the limit
    assert!(e.value.re * rhs > 0.0);
    assert!(e.value.im.abs() < 1e-12 * e.value.re.abs());
}

#[test]
fn lemma_with_varying_cutoff() {
    let (l1, l2) = (plane("1 + 0.5*exp(-x^2 - y^2)"), plane("0.7"));
    let e = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &McOptions::new(1_000_000, 12)).unwrap();
    let rhs = lemma_rhs(&alpha(), &beta(), &l1, &l2).unwrap();
    assert!(e.consistent_with(Complex64::new(rhs, 0.0), 3.0), "{} ± {} vs {rhs}", e.value, e.stderr);
}

#[test]
fn lemma_is_stable_in_epsilon() {
    let (l1, l2) = (plane("1"), plane("2"));
    let a = lemma_lhs(&alpha(), &alpha(), &l1, &l2, 1e-3, &McOptions::new(500_000, 13)).unwrap();
    let b = lemma_lhs(&alpha(), &alpha(), &l1, &l2, 1e-4, &McOptions::new(500_000, 14)).unwrap();
    assert!((a.value - b.value).norm() <= 3.0 * combined(&a, &b));
}

#[test]
fn zero_and_two_form_pair_vanishes() {
    let f = TestForm::constant(0, [0.1, 0.0, 0.0], 1.0, &[1.0]).unwrap();
    let g = TestForm::constant(2, [-0.2, 0.1, 0.0], 1.0, &[1.0, 0.3, -0.2]).unwrap();
    let (l1, l2) = (plane("1"), plane("2"));
    let e = lemma_lhs(&f, &g, &l1, &l2, 1e-3, &McOptions::new(200_000, 15)).unwrap();
    assert!(e.consistent_with(Complex64::new(0.0, 0.0), 3.0));
    assert_eq!(lemma_rhs(&f, &g, &l1, &l2).unwrap(), 0.0);
}

#[test]
fn lemma_is_linear() {
    let (l1, l2) = (plane("1"), plane("2"));
    let opts = McOptions::new(200_000, 16);
    let base = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &opts).unwrap();
    let scaled = lemma_lhs(&alpha().scaled(-2.5), &beta(), &l1, &l2, 1e-3, &opts).unwrap();
    assert!((scaled.value + 2.5 * base.value).norm() < 1e-12 * base.value.norm());
    let other = TestForm::constant(1, [0.4, -0.3, 0.0], 0.8, &[0.0, 1.0, 0.0]).unwrap();
    let sum = lemma_lhs(&alpha().plus(&other).unwrap(), &beta(), &l1, &l2, 1e-3, &opts).unwrap();
    let part = lemma_lhs(&other, &beta(), &l1, &l2, 1e-3, &McOptions::new(200_000, 22)).unwrap();
    assert!((sum.value - base.value - part.value).norm() <= 4.0 * (sum.stderr + base.stderr + part.stderr));
    let b2 = lemma_lhs(&alpha(), &beta().plus(&other).unwrap(), &l1, &l2, 1e-3, &opts).unwrap();
    let p2 = lemma_lhs(&alpha(), &other, &l1, &l2, 1e-3, &McOptions::new(200_000, 17)).unwrap();
    assert!((b2.value - base.value - p2.value).norm() <= 4.0 * (b2.stderr + base.stderr + p2.stderr));
}

#[test]
fn estimates_are_reproducible_and_converge_at_root_n() {
    let (l1, l2) = (plane("1"), plane("2"));
    let mut a = McOptions::new(100_000, 18);
    a.threads = Some(1);
    let mut b = a;
    b.threads = Some(2);
    let x = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &a).unwrap();
    let y = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &b).unwrap();
    assert_eq!((x.value, x.stderr, x.n_samples), (y.value, y.stderr, y.n_samples));
    let big = lemma_lhs(&alpha(), &beta(), &l1, &l2, 1e-3, &McOptions::new(1_600_000, 18)).unwrap();
    let ratio = x.stderr / big.stderr;
    assert!((ratio / 4.0 - 1.0).abs() < 0.25, "stderr ratio {ratio}");
}

#[test]
fn courant_prefactor() {
    let (l1, l2) = (plane("1"), plane("2"));
    let a = TestForm::constant(2, [0.0, 0.1, 0.0], 1.0, &[1.0, 0.3, -0.2]).unwrap();
    let j = courant_lhs(&a, &l1, &l2, 1e-3, &McOptions::new(1_000_000, 19)).unwrap();
    let target = courant_rhs(&a, &l1, &l2).unwrap();
    assert!(j.consistent_with(target, 3.0), "{} ± {} vs {target}", j.value, j.stderr);
    assert!((j.value - target).norm() < 0.05 * target.norm());
}

#[test]
fn courant_ignores_vertical_components() {
    let (l1, l2) = (plane("1"), plane("2"));
    let a = TestForm::constant(2, [0.0, 0.1, 0.0], 1.0, &[0.0, 1.0, -0.7]).unwrap();
    let j = courant_lhs(&a, &l1, &l2, 1e-3, &McOptions::new(300_000, 20)).unwrap();
    assert!(j.consistent_with(Complex64::new(0.0, 0.0), 3.0), "{} ± {}", j.value, j.stderr);
    assert_eq!(courant_rhs(&a, &l1, &l2).unwrap(), Complex64::new(0.0, 0.0));
}

#[test]
fn triangle_scan_has_unit_slope() {
    let f = |c: [f64; 3], a: &[f64]| TestForm::constant(1, c, 1.0, a).unwrap();
    let forms = [
        f([0.1, 0.0, 0.0], &[1.0, 0.5, 0.3]),
        f([-0.1, 0.1, 0.0], &[0.4, -1.0, 0.7]),
        f([0.0, -0.1, 0.0], &[-0.6, 0.2, 1.0]),
    ];
    let r = convergence_scan(&forms, None, &[0.16, 0.08, 0.04, 0.02, 0.01], &McOptions::new(400_000, 21)).unwrap();
    assert_eq!(r.points.len(), 4);
    assert!((r.slope - 1.0).abs() < 0.3, "slope {} ± {}", r.slope, r.slope_ci);
}
