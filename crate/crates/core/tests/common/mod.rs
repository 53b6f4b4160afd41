use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use raman_cqed::state_prep::superpose_fock;
use raman_cqed::{AtomState, JointState, ModeAmplitudes};

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Normalized state with random amplitudes and the out-coupling edge cells
/// left empty, so that `evolve` accepts it.
pub fn random_joint_state<R: Rng>(rng: &mut R, c1: usize, c2: usize) -> JointState<f64> {
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

/// Random mode with real amplitudes of either sign and the top level empty.
pub fn random_real_mode<R: Rng>(rng: &mut R, cutoff: usize) -> ModeAmplitudes<f64> {
    let terms: Vec<_> = (0..cutoff).map(|n| (n, Complex64::new(rng.random_range(-1.0..1.0), 0.0))).collect();
    superpose_fock(&terms, cutoff).unwrap()
}

/// Atom with real coefficients up to a common phase.
pub fn random_real_atom<R: Rng>(rng: &mut R) -> AtomState<f64> {
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    AtomState::new(phase * angle.cos(), phase * angle.sin()).unwrap()
}
