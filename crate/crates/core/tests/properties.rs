use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use majorana::analysis::{dicke_entanglement, hausdorff_angle, moment_report};
use majorana::majorana::{
    amplitude, integrate_amplitude_sq, normalization_k, overlap_product, points_to_state, state_to_points,
    MajoranaPoints, QuadratureSpec,
};
use majorana::mbqc::universality_rhs;
use majorana::search::evaluate_candidate;
use majorana::solver::SolverConfig;
use majorana::state::binomial;
use majorana::{BlochPoint, SpinRotation, SymmetricState};

/// Overlap with the coherent product state written out term by term.
fn direct_amplitude(state: &SymmetricState, theta: f64, phi: f64) -> f64 {
    let n = state.n();
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let w = binomial(n, k).sqrt() * c.powi((n - k) as i32) * s.powi(k as i32);
        acc += state.amp(k) * Complex64::from_polar(w, -(k as f64) * phi);
    }
    acc.norm()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn point() -> impl Strategy<Value = BlochPoint> {
    (-1.0f64..1.0, 0.0..2.0 * PI).prop_map(|(z, phi)| BlochPoint::new(z.acos(), phi))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn amplitude_agrees_with_direct_sum(n in 1usize..=12, seed: u64, p in point()) {
        let s = SymmetricState::random(n, &mut rng(seed));
        prop_assert!((amplitude(&s, &p) - direct_amplitude(&s, p.theta(), p.phi())).abs() < 1e-12);
    }

    #[test]
    fn rotations_are_unitary_and_equivariant(n in 1usize..=10, seed: u64, p in point()) {
        let mut r = rng(seed);
        let a = SymmetricState::random(n, &mut r);
        let b = SymmetricState::random(n, &mut r);
        let rot = SpinRotation::random(&mut r);
        let (ra, rb) = (a.rotate(&rot), b.rotate(&rot));
        prop_assert!((ra.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((ra.fidelity(&rb).unwrap() - a.fidelity(&b).unwrap()).abs() < 1e-12);
        prop_assert!((amplitude(&ra, &p.rotate(&rot)) - amplitude(&a, &p)).abs() < 1e-12);
    }

    #[test]
    fn majorana_points_follow_rotations(n in 2usize..=9, seed: u64) {
        let mut r = rng(seed);
        let s = SymmetricState::random(n, &mut r);
        let rot = SpinRotation::random(&mut r);
        let pts = state_to_points(&s).unwrap();
        prop_assume!(pts.min_separation() > 1e-3);
        let moved = state_to_points(&s.rotate(&rot)).unwrap();
        prop_assert!(hausdorff_angle(moved.points(), pts.rotate(&rot).points()) < 1e-7);
    }

    #[test]
    fn round_trip_preserves_the_state(n in 1usize..=12, seed: u64) {
        let s = SymmetricState::random(n, &mut rng(seed));
        let pts = state_to_points(&s).unwrap();
        prop_assume!(pts.min_separation() > 1e-3);
        prop_assert!(points_to_state(&pts).fidelity(&s).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn amplitude_vanishes_opposite_each_majorana_point(n in 1usize..=12, seed: u64) {
        let s = SymmetricState::random(n, &mut rng(seed));
        let pts = state_to_points(&s).unwrap();
        prop_assume!(pts.min_separation() > 1e-3);
        for p in pts.points() {
            prop_assert!(direct_amplitude(&s, p.antipode().theta(), p.antipode().phi()) < 1e-9);
        }
    }

    #[test]
    fn integral_of_squared_amplitude(n in 1usize..=12, seed: u64) {
        let s = SymmetricState::random(n, &mut rng(seed));
        let v = integrate_amplitude_sq(&s, QuadratureSpec::default_for(n)).unwrap();
        let target = 4.0 * PI / (n + 1) as f64;
        prop_assert!((v - target).abs() / target < 1e-10);
    }

    #[test]
    fn product_form_matches_amplitude(n in 1usize..=10, seed: u64, p in point()) {
        let s = SymmetricState::random(n, &mut rng(seed));
        let pts = state_to_points(&s).unwrap();
        prop_assume!(pts.min_separation() > 1e-3);
        let k = normalization_k(&pts);
        prop_assert!((overlap_product(&pts, k, &p).unwrap() - amplitude(&s, &p)).abs() < 1e-9);
    }

    #[test]
    fn real_states_have_mirror_symmetric_points(n in 2usize..=12, seed: u64) {
        let s = SymmetricState::random_real(n, &mut rng(seed));
        let pts = state_to_points(&s).unwrap();
        prop_assume!(pts.min_separation() > 1e-3);
        let mirrored: Vec<BlochPoint> = pts.points().iter().map(|p| p.conjugate()).collect();
        prop_assert!(hausdorff_angle(pts.points(), &mirrored) < 1e-8);
    }

    #[test]
    fn moments_are_rotation_invariant(n in 2usize..=10, seed: u64) {
        let mut r = rng(seed);
        let pts = state_to_points(&SymmetricState::random(n, &mut r)).unwrap();
        let rot = SpinRotation::random(&mut r);
        let (a, b) = (moment_report(&pts), moment_report(&pts.rotate(&rot)));
        prop_assert!((a.spin_norm() - b.spin_norm()).abs() < 1e-10);
        prop_assert!((a.second_moment_deviation - b.second_moment_deviation).abs() < 1e-10);
    }

    #[test]
    fn universality_rhs_decreases(a in 1e-9f64..0.19, b in 1e-9f64..0.19) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-12);
        prop_assert!(universality_rhs(hi) < universality_rhs(lo));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn candidate_value_is_gauge_invariant(n in 3usize..=7, seed: u64) {
        let mut r = rng(seed);
        let pts = state_to_points(&SymmetricState::random(n, &mut r)).unwrap();
        let rot = SpinRotation::random(&mut r);
        let cfg = SolverConfig::default();
        let a = evaluate_candidate(&pts, &cfg).unwrap().entanglement.eg_log2;
        let b = evaluate_candidate(&pts.rotate(&rot), &cfg).unwrap().entanglement.eg_log2;
        prop_assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn dicke_entanglement_is_symmetric_in_k() {
    for n in 1..=40 {
        for k in 0..=n {
            assert_abs_diff_eq!(dicke_entanglement(n, k), dicke_entanglement(n, n - k), epsilon = 1e-12);
        }
    }
}

#[test]
fn dicke_entanglement_matches_direct_maximum() {
    for n in 2..=8 {
        for k in 0..=n {
            let s = SymmetricState::dicke(n, k).unwrap();
            let f = (0..=20000)
                .map(|i| direct_amplitude(&s, PI * i as f64 / 20000.0, 0.0))
                .fold(0.0, f64::max);
            assert_abs_diff_eq!(dicke_entanglement(n, k), -(f * f).log2(), epsilon = 1e-7);
        }
    }
}

#[test]
fn coherent_states_have_coincident_points() {
    let p = BlochPoint::new(1.1, 2.3);
    let s = SymmetricState::coherent(5, &p).unwrap();
    assert_abs_diff_eq!(amplitude(&s, &p), 1.0, epsilon = 1e-12);
    let single = MajoranaPoints::new(vec![p; 5]).unwrap();
    assert!(points_to_state(&single).fidelity(&s).unwrap() > 1.0 - 1e-12);
}
