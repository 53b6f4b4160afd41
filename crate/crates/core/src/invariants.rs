//! Property tests for invariants of the dynamics and the observables.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use crate::fock::{make_joint_state, AtomState, JointState, Level, ModeAmplitudes, TwoModeState};
use crate::large_field::{build_psi_pm, Sign};
use crate::observables::{atomic_inversion, atomic_purity, field_purity, mode_purity, Mode};
use crate::propagator::{evolve, excitation_distribution};
use crate::protocols::measure_atom;
use crate::state_prep::superpose_fock;
use ndarray::Array2;
use rand::Rng;

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Normalized random state with the out-coupling edge cells empty.
fn random_joint_state<R: Rng>(rng: &mut R, c1: usize, c2: usize) -> JointState<f64> {
    let mut a = Array2::from_shape_fn((c1 + 1, c2 + 1), |_| random_complex(rng));
    let mut b = Array2::from_shape_fn((c1 + 1, c2 + 1), |_| random_complex(rng));
    for m in 1..=c2 {
        a[(c1, m)] = Complex64::new(0.0, 0.0);
    }
    for n in 1..=c1 {
        b[(n, c2)] = Complex64::new(0.0, 0.0);
    }
    let s = JointState::from_grids(a, b).unwrap();
    let norm = s.norm_sqr().sqrt();
    s.scaled(Complex64::new(1.0 / norm, 0.0))
}

fn random_mode<R: Rng>(rng: &mut R, cutoff: usize) -> ModeAmplitudes<f64> {
    let terms: Vec<_> = (0..cutoff).map(|n| (n, random_complex(rng))).collect();
    superpose_fock(&terms, cutoff).unwrap()
}

fn state(seed: u64, c1: usize, c2: usize) -> JointState<f64> {
    random_joint_state(&mut ChaCha8Rng::seed_from_u64(seed), c1, c2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_is_preserved(seed: u64, c1 in 1usize..7, c2 in 1usize..7, gt in -20.0f64..20.0) {
        let s = state(seed, c1, c2);
        let out = evolve(&s, gt).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_composes(seed: u64, c1 in 1usize..7, c2 in 1usize..7, t1 in -5.0f64..5.0, t2 in -5.0f64..5.0) {
        let s = state(seed, c1, c2);
        let two_step = evolve(&evolve(&s, t1).unwrap(), t2).unwrap();
        let one_step = evolve(&s, t1 + t2).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step).unwrap() < 1e-12);
    }

    #[test]
    fn evolution_reverses(seed: u64, c1 in 1usize..7, c2 in 1usize..7, gt in -10.0f64..10.0) {
        let s = state(seed, c1, c2);
        let back = evolve(&evolve(&s, gt).unwrap(), -gt).unwrap();
        prop_assert!(back.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn excitations_are_conserved(seed: u64, c1 in 1usize..7, c2 in 1usize..7, gt in 0.0f64..30.0) {
        let s = state(seed, c1, c2);
        let before = excitation_distribution(&s);
        let after = excitation_distribution(&evolve(&s, gt).unwrap());
        for (x, y) in before.probs.iter().zip(&after.probs) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn global_phase_commutes(seed: u64, theta in 0.0f64..6.3, gt in 0.0f64..10.0) {
        let s = state(seed, 4, 4);
        let ph = Complex64::from_polar(1.0, theta);
        let lhs = evolve(&s.scaled(ph), gt).unwrap();
        let rhs = evolve(&s, gt).unwrap().scaled(ph);
        prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-13);
        let (f1, p1) = measure_atom(&lhs, Level::A).unwrap();
        let (f2, p2) = measure_atom(&rhs, Level::A).unwrap();
        prop_assert!((p1 - p2).abs() < 1e-13);
        prop_assert!((f1.fidelity(&f2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_symmetry(seed: u64, c1 in 1usize..7, c2 in 1usize..7, gt in 0.0f64..10.0) {
        let out = evolve(&state(seed, c1, c2), gt).unwrap();
        prop_assert!((atomic_purity(&out) - field_purity(&out)).abs() < 1e-8);
        let w = atomic_inversion(&out);
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&w));
        let field = TwoModeState::normalized(out.a().clone()).unwrap();
        prop_assert!((mode_purity(&field, Mode::One) - mode_purity(&field, Mode::Two)).abs() < 1e-10);
    }

    #[test]
    fn psi_branches_are_conjugate(seed: u64, gt in 0.0f64..15.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let real = |m: ModeAmplitudes<f64>| {
            let terms: Vec<_> = m.amps().iter().enumerate().map(|(n, z)| (n, Complex64::new(z.norm(), 0.0))).collect();
            superpose_fock(&terms, m.cutoff()).unwrap()
        };
        let c1 = real(random_mode(&mut rng, 6));
        let c2 = real(random_mode(&mut rng, 5));
        let p = build_psi_pm(&c1, &c2, Sign::Plus, gt);
        let m = build_psi_pm(&c1, &c2, Sign::Minus, gt);
        for (x, y) in p.grid().iter().zip(m.grid()) {
            prop_assert_eq!(*x, y.conj());
        }
        prop_assert_eq!(mode_purity(&p, Mode::One), mode_purity(&m, Mode::One));
    }

    #[test]
    fn single_precision_tracks_double(seed: u64, gt in 0.0f64..5.0) {
        let s64 = state(seed, 4, 3);
        let (a, b) = s64.clone().into_grids();
        let cast = |g: ndarray::Array2<Complex64>| g.mapv(|z| num_complex::Complex32::new(z.re as f32, z.im as f32));
        let s32 = JointState::from_grids(cast(a), cast(b)).unwrap();
        let o64 = evolve(&s64, gt).unwrap();
        let o32 = evolve(&s32, gt as f32).unwrap();
        for (x, y) in o64.a().iter().zip(o32.a().iter()) {
            prop_assert!((x.re - y.re as f64).abs() < 1e-5 && (x.im - y.im as f64).abs() < 1e-5);
        }
    }
}

#[test]
fn product_states_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let m1 = random_mode(&mut rng, 5);
    let m2 = random_mode(&mut rng, 4);
    let atom = AtomState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
    let s = make_joint_state(&m1, &m2, &atom).unwrap();
    assert!((atomic_purity(&s) - 1.0).abs() < 1e-12);
    assert!((mode_purity(&TwoModeState::product(&m1, &m2), Mode::One) - 1.0).abs() < 1e-12);
}
