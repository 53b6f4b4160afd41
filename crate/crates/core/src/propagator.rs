//! Time evolution under `H = a₂† a₁ σ⁻ + a₂ a₁† σ⁺` (coupling `g = 1`).
//!
//! `H` is block diagonal in the two-dimensional subspaces
//! `{|n, m, a⟩, |n+1, m−1, b⟩}`, each rotating with angle `gt √((n+1) m)`.
//! [`evolve`] applies those rotations directly; [`evolve_oracle`] instead
//! exponentiates the dense matrix of `H` and serves as an independent check.

use ndarray::{Array2, Zip};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::expm::expm;
use crate::fock::{AtomRegisterState, JointState, Level};
use crate::scalar::{czero, minus_i, Real};

/// Largest population tolerated in cells whose coupling partner lies
/// outside the grid.
pub const EDGE_TOL: f64 = 1e-10;

/// Size limit for the dense oracle.
pub const ORACLE_MAX_DIM: usize = 20_000;

/// Population in the cells that couple out of the grid: the last mode-1 row
/// of the `a` component (for `m ≥ 1`) and the last mode-2 column of the `b`
/// component (for `n ≥ 1`).
pub fn edge_population<T: Real>(state: &JointState<T>) -> T {
    let (c1, c2) = state.cutoffs();
    let mut p = T::zero();
    for m in 1..=c2 {
        p = p + state.a()[(c1, m)].norm_sqr();
    }
    for n in 1..=c1 {
        p = p + state.b()[(n, c2)].norm_sqr();
    }
    p
}

fn check_edges<T: Real>(state: &JointState<T>) -> Result<()> {
    let p = edge_population(state);
    let tol = T::tol(EDGE_TOL);
    if p > tol {
        return Err(Error::EdgeLeakage {
            population: p.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Exact evolution to time `gt` (negative times run backwards).
///
/// Edge cells whose partner would fall outside the grid are left in place;
/// the call fails if they carry more than [`EDGE_TOL`] of population.
pub fn evolve<T: Real>(state: &JointState<T>, gt: T) -> Result<JointState<T>> {
    check_edges(state)?;
    Ok(rotate_pairs(state, gt))
}

fn rotate_pairs<T: Real>(state: &JointState<T>, gt: T) -> JointState<T> {
    let (c1, c2) = state.cutoffs();
    let mut a = state.a().clone();
    let mut b = state.b().clone();
    for n in 0..c1 {
        for m in 1..=c2 {
            let angle = gt * (T::from_usize_lossy((n + 1) * m)).sqrt();
            let (s, c) = angle.sin_cos();
            let x = a[(n, m)];
            let y = b[(n + 1, m - 1)];
            a[(n, m)] = x * c + y * minus_i(s);
            b[(n + 1, m - 1)] = x * minus_i(s) + y * c;
        }
    }
    JointState::from_grids(a, b).expect("shapes preserved")
}

/// `H|ψ⟩` (not normalized).
pub fn hamiltonian_apply<T: Real>(state: &JointState<T>) -> Result<JointState<T>> {
    check_edges(state)?;
    Ok(apply_truncated(state))
}

/// `H` restricted to the grid: couplings that would leave it are dropped.
fn apply_truncated<T: Real>(state: &JointState<T>) -> JointState<T> {
    let (c1, c2) = state.cutoffs();
    let mut a = Array2::from_elem(state.shape(), czero());
    let mut b = a.clone();
    for n in 0..c1 {
        for m in 1..=c2 {
            let w = T::from_usize_lossy((n + 1) * m).sqrt();
            // a₂† a₁ σ⁻ : |n+1, m−1, b⟩ → √((n+1)m) |n, m, a⟩
            a[(n, m)] = state.b()[(n + 1, m - 1)] * w;
            // a₂ a₁† σ⁺ : |n, m, a⟩ → √((n+1)m) |n+1, m−1, b⟩
            b[(n + 1, m - 1)] = state.a()[(n, m)] * w;
        }
    }
    JointState::from_grids(a, b).expect("shapes preserved")
}

/// Dense matrix of `H` in the basis ordering of [`JointState::to_vector`].
pub fn hamiltonian_matrix<T: Real>(cutoff1: usize, cutoff2: usize) -> Result<Array2<Complex<T>>> {
    let dim = 2 * (cutoff1 + 1) * (cutoff2 + 1);
    if dim > ORACLE_MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim,
            max: ORACLE_MAX_DIM,
        });
    }
    let mut h = Array2::from_elem((dim, dim), czero());
    let mut basis = vec![czero(); dim];
    for col in 0..dim {
        basis[col] = Complex::new(T::one(), T::zero());
        let psi = JointState::from_vector(&basis, cutoff1, cutoff2)?;
        for (row, v) in apply_truncated(&psi).to_vector().into_iter().enumerate() {
            h[(row, col)] = v;
        }
        basis[col] = czero();
    }
    Ok(h)
}

/// Dense `exp(−i gt H)` on the given cutoffs.
pub fn oracle_propagator<T: Real>(cutoff1: usize, cutoff2: usize, gt: T) -> Result<Array2<Complex<T>>> {
    let h = hamiltonian_matrix::<T>(cutoff1, cutoff2)?;
    Ok(expm(&h.mapv(|z| z * Complex::new(T::zero(), -gt))))
}

/// Applies a dense propagator from [`oracle_propagator`].
pub fn apply_propagator<T: Real>(u: &Array2<Complex<T>>, state: &JointState<T>) -> Result<JointState<T>> {
    let (c1, c2) = state.cutoffs();
    let dim = 2 * (c1 + 1) * (c2 + 1);
    if u.dim() != (dim, dim) {
        return Err(Error::ShapeMismatch {
            left: u.dim(),
            right: (dim, dim),
        });
    }
    let psi = ndarray::Array1::from(state.to_vector());
    let out = u.dot(&psi);
    JointState::from_vector(out.as_slice().expect("contiguous"), c1, c2)
}

/// Reference evolution `exp(−i gt H)|ψ⟩` from the dense Hamiltonian.
pub fn evolve_oracle<T: Real>(state: &JointState<T>, gt: T) -> Result<JointState<T>> {
    let (c1, c2) = state.cutoffs();
    apply_propagator(&oracle_propagator(c1, c2, gt)?, state)
}

/// Photon-number distribution of `N = n + m` (the atom does not contribute).
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationDistribution<T: Real> {
    pub probs: Vec<T>,
}

pub fn excitation_distribution<T: Real>(state: &JointState<T>) -> ExcitationDistribution<T> {
    let (c1, c2) = state.cutoffs();
    let mut probs = vec![T::zero(); c1 + c2 + 1];
    for level in [Level::A, Level::B] {
        for ((n, m), z) in state.component(level).indexed_iter() {
            probs[n + m] = probs[n + m] + z.norm_sqr();
        }
    }
    ExcitationDistribution { probs }
}

/// Lets atom `atom` of a register interact for time `gt`; the other atoms
/// are spectators whose labels index independent joint states.
pub fn evolve_register<T: Real>(
    reg: &AtomRegisterState<T>,
    atom: usize,
    gt: T,
) -> Result<AtomRegisterState<T>> {
    let k = reg.n_atoms();
    if atom >= k {
        return Err(Error::InvalidParameter(format!(
            "atom index {atom} out of range for {k} atoms"
        )));
    }
    let mut out = reg.clone();
    for label in reg.branches().keys() {
        if label.as_bytes()[atom] != b'a' {
            continue;
        }
        let mut partner = label.clone().into_bytes();
        partner[atom] = b'b';
        let partner = String::from_utf8(partner).expect("ascii label");
        let joint = JointState::from_grids(
            reg.branches()[label].clone(),
            reg.branches()[&partner].clone(),
        )?;
        let (a, b) = evolve(&joint, gt)?.into_grids();
        *out.branch_mut(label).expect("label present") = a;
        *out.branch_mut(&partner).expect("label present") = b;
    }
    Ok(out)
}

/// Evolves `state` independently to each time in `gts`.
pub fn evolve_sweep<T: Real>(state: &JointState<T>, gts: &[T]) -> Result<Vec<JointState<T>>> {
    use rayon::prelude::*;
    check_edges(state)?;
    Ok(gts.par_iter().map(|&t| rotate_pairs(state, t)).collect())
}

/// `⟨ψ|H|ψ⟩`.
pub fn energy<T: Real>(state: &JointState<T>) -> Result<Complex<T>> {
    let h = hamiltonian_apply(state)?;
    let mut acc = czero();
    for level in [Level::A, Level::B] {
        Zip::from(state.component(level))
            .and(h.component(level))
            .for_each(|x, y| acc = acc + x.conj() * y);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fidelity, make_joint_state, AtomState};
    use crate::state_prep::coherent_amplitudes;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

    fn basis(n: usize, m: usize, l: Level) -> JointState<f64> {
        JointState::basis(n, m, l, 5, 5).unwrap()
    }

    #[test]
    fn vacuum_is_dark() {
        let s = basis(0, 0, Level::A);
        for gt in [0.3, 5.0, -12.0] {
            assert_eq!(evolve(&s, gt).unwrap(), s);
        }
    }

    #[test]
    fn single_photon_swap_at_quarter_period() {
        let out = evolve(&basis(0, 1, Level::A), FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(out.a()[(0, 1)].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.b()[(1, 0)].im, -FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(out.norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn phase_gate_sign_flips() {
        let t = PI / 3f64.sqrt();
        let out = evolve(&basis(3, 0, Level::B), t).unwrap();
        assert_abs_diff_eq!(out.b()[(3, 0)].re, -1.0, epsilon = 1e-14);
        let out = evolve(&basis(0, 3, Level::A), t).unwrap();
        assert_abs_diff_eq!(out.a()[(0, 3)].re, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn hamiltonian_action() {
        let h = hamiltonian_apply(&basis(0, 0, Level::A)).unwrap();
        assert_eq!(h.norm_sqr(), 0.0);
        let h = hamiltonian_apply(&basis(0, 1, Level::A)).unwrap();
        assert_eq!(h.b()[(1, 0)], Complex64::new(1.0, 0.0));
        assert_abs_diff_eq!(h.norm_sqr(), 1.0, epsilon = 0.0);
        let h = hamiltonian_apply(&basis(2, 3, Level::B)).unwrap();
        assert_abs_diff_eq!(h.a()[(1, 4)].re, 8f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn edge_population_is_rejected() {
        let s = JointState::<f64>::basis(3, 1, Level::A, 3, 3).unwrap();
        assert!(matches!(evolve(&s, 0.1), Err(Error::EdgeLeakage { .. })));
        assert!(matches!(hamiltonian_apply(&s), Err(Error::EdgeLeakage { .. })));
        let s = JointState::<f64>::basis(1, 3, Level::B, 3, 3).unwrap();
        assert!(evolve(&s, 0.1).is_err());
        // m = 0 in the last row and n = 0 in the last column are uncoupled.
        let s = JointState::<f64>::basis(3, 0, Level::A, 3, 3).unwrap();
        assert!(evolve(&s, 0.1).is_ok());
    }

    #[test]
    fn oracle_agrees_on_bell_pair() {
        let s = basis(0, 1, Level::A);
        let d = evolve(&s, FRAC_PI_4)
            .unwrap()
            .max_abs_diff(&evolve_oracle(&s, FRAC_PI_4).unwrap())
            .unwrap();
        assert!(d < 1e-9, "{d}");
        let id = evolve_oracle(&s, 0.0).unwrap();
        assert!(id.max_abs_diff(&s).unwrap() < 1e-12);
    }

    #[test]
    fn oracle_agrees_on_coherent_product() {
        // Amplitudes generated on a small grid, embedded in a cutoff-8 grid.
        let m1 = coherent_amplitudes(Complex64::new(2f64.sqrt(), 0.0), 8, 1e-3).unwrap();
        let m2 = coherent_amplitudes(Complex64::new(1.0, 0.0), 8, 1e-3).unwrap();
        let atom = AtomState::new(Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(FRAC_1_SQRT_2, 0.0)).unwrap();
        let mut s = make_joint_state(&m1, &m2, &atom).unwrap();
        // Clear the edge cells so that the truncated dynamics is exact.
        let (mut a, mut b) = s.into_grids();
        for k in 0..=8 {
            a[(8, k)] = Complex64::new(0.0, 0.0);
            b[(k, 8)] = Complex64::new(0.0, 0.0);
        }
        s = JointState::from_grids(a, b).unwrap();
        let s = s.scaled(Complex64::new(1.0 / s.norm_sqr().sqrt(), 0.0));
        let d = evolve(&s, 1.7).unwrap().max_abs_diff(&evolve_oracle(&s, 1.7).unwrap()).unwrap();
        assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn oracle_dimension_limit() {
        let s = JointState::<f64>::zeros(120, 120);
        assert!(matches!(evolve_oracle(&s, 1.0), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn excitations() {
        let d = excitation_distribution(&JointState::<f64>::basis(2, 3, Level::A, 6, 6).unwrap());
        assert_eq!(d.probs[5], 1.0);
        let s = evolve(&JointState::<f64>::basis(2, 3, Level::A, 6, 6).unwrap(), 0.9).unwrap();
        assert_abs_diff_eq!(excitation_distribution(&s).probs[5], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn excitations_of_coherent_product_are_poisson_convolution() {
        let (l1, l2) = (2.0f64, 1.5f64);
        let m1 = coherent_amplitudes(Complex64::new(l1.sqrt(), 0.0), 40, 1e-12).unwrap();
        let m2 = coherent_amplitudes(Complex64::new(l2.sqrt(), 0.0), 40, 1e-12).unwrap();
        let s = make_joint_state(&m1, &m2, &AtomState::ground(Level::B)).unwrap();
        let d = excitation_distribution(&s);
        // Convolution of two Poissons is Poisson with the summed rate.
        let lam = l1 + l2;
        let mut p = (-lam).exp();
        for (n, q) in d.probs.iter().enumerate().take(40) {
            if n > 0 {
                p *= lam / n as f64;
            }
            assert!((q - p).abs() < 1e-10, "N = {n}");
        }
    }

    #[test]
    fn energy_is_real() {
        let m1 = coherent_amplitudes(Complex64::from_polar(1.2, 0.7), 14, 1e-6).unwrap();
        let m2 = coherent_amplitudes(Complex64::from_polar(0.8, -0.3), 14, 1e-6).unwrap();
        let atom = AtomState::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let s = make_joint_state(&m1, &m2, &atom).unwrap();
        assert!(energy(&s).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn register_evolution_matches_single_atom() {
        let field = crate::fock::TwoModeState::<f64>::basis(0, 1, 3, 3).unwrap();
        let reg = AtomRegisterState::product(&field, &[AtomState::ground(Level::A)]).unwrap();
        let out = evolve_register(&reg, 0, FRAC_PI_4).unwrap();
        let joint = JointState::from_grids(out.branch("a").unwrap().clone(), out.branch("b").unwrap().clone()).unwrap();
        let direct = evolve(&JointState::basis(0, 1, Level::A, 3, 3).unwrap(), FRAC_PI_4).unwrap();
        assert_abs_diff_eq!(fidelity(&joint, &direct).unwrap(), 1.0, epsilon = 1e-14);
        assert!(evolve_register(&reg, 1, 0.1).is_err());
    }

    #[test]
    fn sweep_matches_pointwise() {
        let s = basis(1, 2, Level::A);
        let ts = [0.0, 0.4, 2.5];
        let v = evolve_sweep(&s, &ts).unwrap();
        for (t, x) in ts.iter().zip(&v) {
            assert_eq!(*x, evolve(&s, *t).unwrap());
        }
    }
}
