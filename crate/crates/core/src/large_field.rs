//! Large-field analysis: disentanglement times, the `|ψ±⟩` field states,
//! their first-order coherent-state approximation, revival times and the
//! cat states the field is left in.
//!
//! For highly peaked photon distributions the phase `gt√((m+1)n)` of
//! `|ψ±⟩` is linearized around `(n̄, m̄)`:
//!
//! `gt√((m+1)n) ≈ gt√κ/2 + n·gt/(2√κ) + m·gt√κ/2`,  `κ = n̄/m̄`,
//!
//! so `|ψ±⟩` becomes a product of rotated coherent states. The same
//! expansion gives `√((m+1)n) − √((n+1)m) ≈ (√κ − 1/√κ)/2`, which is where
//! the disentanglement times come from.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fock::{AtomState, ModeAmplitudes, TwoModeState};
use crate::scalar::{cre, Real};
use crate::state_prep::{coherent_amplitudes, photon_stats};

/// `κ` closer to 1 than this has no disentanglement time.
pub const KAPPA_ONE_TOL: f64 = 1e-9;

/// Branch selector for `|ψ±⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Mean photon numbers, their ratio `κ = n̄/m̄` and the `|φ±⟩` basis phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeFieldParams<T: Real> {
    kappa: T,
    nbar: T,
    mbar: T,
    phi: T,
}

impl<T: Real> LargeFieldParams<T> {
    pub fn new(nbar: T, mbar: T, phi: T) -> Result<Self> {
        if !(nbar > T::zero() && mbar > T::zero() && nbar.is_finite() && mbar.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mean photon numbers must be positive, got {nbar} and {mbar}"
            )));
        }
        Ok(Self {
            kappa: nbar / mbar,
            nbar,
            mbar,
            phi,
        })
    }

    /// Uses the measured means of the prepared modes.
    pub fn from_modes(mode1: &ModeAmplitudes<T>, mode2: &ModeAmplitudes<T>, phi: T) -> Result<Self> {
        Self::new(photon_stats(mode1).mean, photon_stats(mode2).mean, phi)
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }

    pub fn nbar(&self) -> T {
        self.nbar
    }

    pub fn mbar(&self) -> T {
        self.mbar
    }

    pub fn phi(&self) -> T {
        self.phi
    }
}

fn check_kappa<T: Real>(kappa: T) -> Result<()> {
    if (kappa - T::one()).abs() <= T::lit(KAPPA_ONE_TOL) {
        return Err(Error::KappaIsOne(kappa.to_f64_lossy()));
    }
    if !(kappa > T::zero()) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!("kappa = {kappa}")));
    }
    Ok(())
}

/// `gt₀^(j) = (2j+1)π√κ/|κ−1|`.
pub fn disentanglement_time<T: Real>(params: &LargeFieldParams<T>, j: usize) -> Result<T> {
    disentanglement_time_for_kappa(params.kappa, j)
}

pub fn disentanglement_time_for_kappa<T: Real>(kappa: T, j: usize) -> Result<T> {
    check_kappa(kappa)?;
    let odd = T::from_usize_lossy(2 * j + 1);
    Ok(odd * T::PI() * kappa.sqrt() / (kappa - T::one()).abs())
}

/// `ψ±[n,m] = C_n C_m e^{±i gt√((m+1)n)}`.
pub fn build_psi_pm<T: Real>(c1: &ModeAmplitudes<T>, c2: &ModeAmplitudes<T>, sign: Sign, gt: T) -> TwoModeState<T> {
    let s = sign.value::<T>();
    let grid = ndarray::Array2::from_shape_fn((c1.amps().len(), c2.amps().len()), |(n, m)| {
        let theta = s * gt * T::from_usize_lossy((m + 1) * n).sqrt();
        c1.amps()[n] * c2.amps()[m] * Complex::from_polar(T::one(), theta)
    });
    TwoModeState::from_grid(grid)
}

/// Product of rotated coherent states with an explicit global phase:
/// `e^{iχ} |ν e^{iθ₁}⟩ |μ e^{iθ₂}⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxProduct<T: Real> {
    pub nu: Complex<T>,
    pub mu: Complex<T>,
    /// `χ`
    pub global_phase: T,
    /// `θ₁`
    pub rotation1: T,
    /// `θ₂`
    pub rotation2: T,
}

impl<T: Real> ApproxProduct<T> {
    pub fn rotated_nu(&self) -> Complex<T> {
        self.nu * Complex::from_polar(T::one(), self.rotation1)
    }

    pub fn rotated_mu(&self) -> Complex<T> {
        self.mu * Complex::from_polar(T::one(), self.rotation2)
    }

    /// `⟨self|other⟩` in closed form.
    pub fn overlap(&self, other: &Self) -> Complex<T> {
        let phase = Complex::from_polar(T::one(), other.global_phase - self.global_phase);
        phase
            * coherent_overlap(self.rotated_nu(), other.rotated_nu())
            * coherent_overlap(self.rotated_mu(), other.rotated_mu())
    }

    pub fn fidelity(&self, other: &Self) -> T {
        self.overlap(other).norm_sqr()
    }

    /// Fock-grid representation on the given cutoffs.
    pub fn materialize(&self, cutoff1: usize, cutoff2: usize, leak_tol: T) -> Result<TwoModeState<T>> {
        let m1 = coherent_amplitudes(self.rotated_nu(), cutoff1, leak_tol)?;
        let m2 = coherent_amplitudes(self.rotated_mu(), cutoff2, leak_tol)?;
        Ok(TwoModeState::product(&m1, &m2).scaled(Complex::from_polar(T::one(), self.global_phase)))
    }
}

/// `⟨α|β⟩ = exp(−|α|²/2 − |β|²/2 + α*β)`.
pub fn coherent_overlap<T: Real>(alpha: Complex<T>, beta: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    (alpha.conj() * beta - cre(half * (alpha.norm_sqr() + beta.norm_sqr()))).exp()
}

/// First-order approximation of `|ψ±⟩` for coherent inputs:
/// `e^{±i√κ gt/2} |ν e^{±i gt/(2√κ)}⟩ |μ e^{±i√κ gt/2}⟩`.
pub fn approx_product_state<T: Real>(nu: Complex<T>, mu: Complex<T>, kappa: T, sign: Sign, gt: T) -> ApproxProduct<T> {
    let s = sign.value::<T>();
    let half = T::lit(0.5);
    let rk = kappa.sqrt();
    ApproxProduct {
        nu,
        mu,
        global_phase: s * rk * gt * half,
        rotation1: s * gt * half / rk,
        rotation2: s * rk * gt * half,
    }
}

/// Fidelity between the approximation and the exact `|ψ±⟩` built from the
/// coherent amplitudes of `ν`, `μ` on the given cutoffs.
pub fn approx_fidelity<T: Real>(
    c1: &ModeAmplitudes<T>,
    c2: &ModeAmplitudes<T>,
    nu: Complex<T>,
    mu: Complex<T>,
    kappa: T,
    sign: Sign,
    gt: T,
) -> Result<T> {
    let exact = build_psi_pm(c1, c2, sign, gt);
    let approx = approx_product_state(nu, mu, kappa, sign, gt).materialize(
        c1.cutoff(),
        c2.cutoff(),
        T::one(),
    )?;
    exact.fidelity(&approx)
}

/// `(κ, gt_r) = (l/k, 2π√(kl))`. The `q`-th revival is at `q·gt_r`.
pub fn revival_times<T: Real>(k: u32, l: u32) -> Result<(T, T)> {
    if k == 0 || l == 0 {
        return Err(Error::InvalidParameter(format!("revival indices must be positive, got ({k}, {l})")));
    }
    let (kf, lf) = (T::lit(k as f64), T::lit(l as f64));
    Ok((lf / kf, T::TAU() * (kf * lf).sqrt()))
}

/// `±1` sign of the atomic `|a⟩` amplitude left behind at `gt₀^(j)`.
fn atomic_sign<T: Real>(kappa: T, j: usize) -> T {
    let parity = if j % 2 == 0 { T::one() } else { -T::one() };
    if kappa > T::one() {
        parity
    } else {
        -parity
    }
}

/// Atomic state the atom is left in at `gt₀^(j)`, independent of how it
/// started: `(i s |a⟩ + e^{iφ} |b⟩)/√2` with `φ = arg μ − arg ν` and
/// `s = ±1` fixed by `j` and whether `κ` is above or below one.
pub fn predicted_atom_state<T: Real>(nu: Complex<T>, mu: Complex<T>, kappa: T, j: usize) -> Result<AtomState<T>> {
    check_kappa(kappa)?;
    let s = atomic_sign(kappa, j);
    let h = T::FRAC_1_SQRT_2();
    let phi = mu.arg() - nu.arg();
    Ok(AtomState {
        gamma: Complex::new(T::zero(), s * h),
        delta: Complex::from_polar(h, phi),
    })
}

/// Weights `(w₊, w₋)` of the approximate branches in the field left at `gt₀^(j)`.
///
/// Writing the initial atom as `γ|a⟩ + δ|b⟩`, the field becomes
/// `δ e^{−iφ} cos Θ − i γ sin Θ` applied to `C_n C_m`, with `e^{±iΘ}`
/// the `|ψ±⟩` phases, i.e. `(δ e^{−iφ} − γ)|ψ₊⟩ + (δ e^{−iφ} + γ)|ψ₋⟩`
/// up to normalization.
fn branch_weights<T: Real>(nu: Complex<T>, mu: Complex<T>, atom: &AtomState<T>) -> (Complex<T>, Complex<T>) {
    let d = atom.delta * Complex::from_polar(T::one(), nu.arg() - mu.arg());
    (d - atom.gamma, d + atom.gamma)
}

/// Normalized cat state of both modes at `gt₀^(j)`, assembled from the
/// approximate branches (global phases included). The normalization uses
/// the closed-form branch overlap.
pub fn cat_target_state<T: Real>(
    nu: Complex<T>,
    mu: Complex<T>,
    kappa: T,
    j: usize,
    atom: &AtomState<T>,
    cutoffs: (usize, usize),
) -> Result<TwoModeState<T>> {
    let gt = disentanglement_time_for_kappa(kappa, j)?;
    let plus = approx_product_state(nu, mu, kappa, Sign::Plus, gt);
    let minus = approx_product_state(nu, mu, kappa, Sign::Minus, gt);
    let (wp, wm) = branch_weights(nu, mu, atom);
    let norm_sqr = wp.norm_sqr() + wm.norm_sqr() + T::lit(2.0) * (wp.conj() * wm * plus.overlap(&minus)).re;
    if !(norm_sqr > T::zero()) {
        return Err(Error::ZeroVector);
    }
    let scale = T::one() / norm_sqr.sqrt();
    let p = plus.materialize(cutoffs.0, cutoffs.1, T::one())?;
    let m = minus.materialize(cutoffs.0, cutoffs.1, T::one())?;
    let grid = p.grid().mapv(|z| z * wp * scale) + m.grid().mapv(|z| z * wm * scale);
    Ok(TwoModeState::from_grid(grid))
}

/// `⟨ψ̃₊|ψ̃₋⟩` of the approximate branches at `gt₀^(j)`.
pub fn cat_branch_overlap<T: Real>(nu: Complex<T>, mu: Complex<T>, kappa: T, j: usize) -> Result<Complex<T>> {
    let gt = disentanglement_time_for_kappa(kappa, j)?;
    let plus = approx_product_state(nu, mu, kappa, Sign::Plus, gt);
    let minus = approx_product_state(nu, mu, kappa, Sign::Minus, gt);
    Ok(plus.overlap(&minus))
}
