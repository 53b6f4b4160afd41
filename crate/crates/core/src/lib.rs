//! Exact dynamics of a Raman-coupled Λ atom exchanging photons between two
//! cavity modes, `H = g (a₂† a₁ σ⁻ + a₂ a₁† σ⁺)`, with diagnostics for
//! large-field disentanglement and a set of gate and state-preparation
//! protocols.
//!
//! All kernels are generic over the real scalar type ([`Real`]: `f32` or
//! `f64`). Times are the dimensionless product `gt`. The `*64` aliases below
//! fix the scalar to `f64`, which is what the tolerances in the docs assume.

pub mod error;
mod expm;
pub mod fock;
#[cfg(test)]
mod invariants;
pub mod large_field;
pub mod observables;
pub mod propagator;
pub mod protocols;
pub mod scalar;
pub mod state_prep;
pub mod sweep;

pub use error::{Error, Result};
pub use fock::{
    fidelity, inner_product, make_joint_state, AtomRegisterState, AtomState, FieldComponents,
    JointState, Level, ModeAmplitudes, TwoModeState, LEAK_TOL, UNITARITY_TOL,
};
pub use large_field::{
    approx_product_state, build_psi_pm, cat_target_state, disentanglement_time, revival_times,
    ApproxProduct, LargeFieldParams, Sign,
};
pub use observables::{
    atomic_inversion, atomic_purity, field_purity, husimi_q, husimi_q_density, inversion_series,
    mode_purity, purity, reduced_atom, reduced_mode, reduced_register_atom, DensityMatrix, Mode, QGrid, QPeak, QWindow,
};
pub use propagator::{
    evolve, evolve_oracle, evolve_register, evolve_sweep, excitation_distribution,
    hamiltonian_apply, oracle_propagator, apply_propagator, ExcitationDistribution,
};
pub use protocols::{
    atom_pulse, measure_atom, pi_half_pulse, run_atomic_cnot, run_cat, run_epr, run_ghz, run_ghz_ordered,
    run_phase_gate, sample_measurement, CatConfig, CatRun, Check, ProtocolReport, QOptions,
};
pub use scalar::Real;
pub use state_prep::{photon_stats, prepare_mode, ModeFamily, PhotonStats};

pub type ModeAmplitudes64 = ModeAmplitudes<f64>;
pub type AtomState64 = AtomState<f64>;
pub type JointState64 = JointState<f64>;
pub type TwoModeState64 = TwoModeState<f64>;
pub type AtomRegisterState64 = AtomRegisterState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type QGrid64 = QGrid<f64>;
pub type LargeFieldParams64 = LargeFieldParams<f64>;
