//! Single-mode field preparations: Fock, coherent, squeezed coherent and
//! Fock superpositions, plus photon-number statistics and cutoff planning.

use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::fock::{check_cutoff, ModeAmplitudes};
use crate::scalar::{cre, czero, Real};

/// Extra Fock levels kept above the truncation point so that a single
/// photon transfer never leaves the grid.
pub const HEADROOM: usize = 2;

/// Upper bound on cutoffs searched by [`cutoff_for`].
const MAX_CUTOFF: usize = 200_000;

pub fn fock_amplitudes<T: Real>(n: usize, cutoff: usize) -> Result<ModeAmplitudes<T>> {
    check_cutoff(n, cutoff)?;
    let mut raw = vec![czero(); cutoff + 1];
    raw[n] = cre(T::one());
    ModeAmplitudes::from_truncated(raw, T::zero())
}

/// Coherent state `|ν⟩`, `C_n = e^{-|ν|²/2} ν^n / √n!`, evaluated in
/// log-magnitude form.
pub fn coherent_amplitudes<T: Real>(
    nu: Complex<T>,
    cutoff: usize,
    leak_tol: T,
) -> Result<ModeAmplitudes<T>> {
    ModeAmplitudes::from_truncated(coherent_raw(nu, cutoff), leak_tol)
}

pub(crate) fn coherent_raw<T: Real>(nu: Complex<T>, cutoff: usize) -> Vec<Complex<T>> {
    let mut raw = vec![czero(); cutoff + 1];
    let r = nu.norm();
    if r == T::zero() {
        raw[0] = cre(T::one());
        return raw;
    }
    let (ln_r, arg) = (r.ln(), nu.arg());
    let base = -r * r / T::lit(2.0);
    let mut ln_fact = T::zero();
    for (n, slot) in raw.iter_mut().enumerate() {
        if n > 0 {
            ln_fact = ln_fact + T::from_usize_lossy(n).ln();
        }
        let nf = T::from_usize_lossy(n);
        let ln_mag = base + nf * ln_r - ln_fact / T::lit(2.0);
        *slot = Complex::from_polar(ln_mag.exp(), nf * arg);
    }
    raw
}

/// Squeezed coherent state with real displacement parameter `ν`:
///
/// `C_n = tanh(r)^{n/2} / √(n! 2^n cosh r) · e^{-ν²(1 - tanh r)/2} · H_n(ν/√sinh 2r)`.
///
/// With `t = tanh r` and `c_n = t^{n/2} H_n(x) / √(n! 2^n)` the Hermite
/// recurrence becomes `c_{n+1} = (ν/cosh r · c_n − t √n c_{n−1}) / √(n+1)`,
/// which is what [`SqueezedSeries`] iterates. This state is `S(r)|ν⟩`; its
/// mean photon number is `ν² e^{-2r} + sinh² r`.
pub fn squeezed_amplitudes<T: Real>(
    nu: T,
    r: T,
    cutoff: usize,
    leak_tol: T,
) -> Result<ModeAmplitudes<T>> {
    if r < T::zero() || !r.is_finite() {
        return Err(Error::NegativeSqueezing(r.to_f64_lossy()));
    }
    if r == T::zero() {
        return coherent_amplitudes(cre(nu), cutoff, leak_tol);
    }
    let raw = SqueezedSeries::new(nu, r).take(cutoff + 1).map(cre).collect();
    ModeAmplitudes::from_truncated(raw, leak_tol)
}

/// Displacement parameter giving a squeezed state with mean photon number `nbar`.
pub fn squeezed_nu_for_mean<T: Real>(nbar: T, r: T) -> Result<T> {
    if r < T::zero() {
        return Err(Error::NegativeSqueezing(r.to_f64_lossy()));
    }
    let vacuum_mean = r.sinh().powi(2);
    if nbar < vacuum_mean {
        return Err(Error::InvalidParameter(format!(
            "mean photon number {nbar} is below the squeezed-vacuum mean {vacuum_mean}"
        )));
    }
    Ok(r.exp() * (nbar - vacuum_mean).sqrt())
}

/// Streaming evaluation of the squeezed coefficients `C_0, C_1, ...`.
///
/// Partial products are rescaled whenever they grow past `√MAX` so that no
/// intermediate overflows; the accumulated scale lives in log form.
#[derive(Debug, Clone)]
pub struct SqueezedSeries<T: Real> {
    a: T,
    t: T,
    ln_prefactor: T,
    ln_scale: T,
    prev: T,
    cur: T,
    n: usize,
}

impl<T: Real> SqueezedSeries<T> {
    /// `r` must be strictly positive.
    pub fn new(nu: T, r: T) -> Self {
        let t = r.tanh();
        let ln_prefactor = -nu * nu * (T::one() - t) / T::lit(2.0) - r.cosh().ln() / T::lit(2.0);
        Self {
            a: nu / r.cosh(),
            t,
            ln_prefactor,
            ln_scale: T::zero(),
            prev: T::zero(),
            cur: T::one(),
            n: 0,
        }
    }
}

impl<T: Real> Iterator for SqueezedSeries<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let out = self.cur * (self.ln_prefactor + self.ln_scale).exp();
        let nf = T::from_usize_lossy(self.n);
        let next = (self.a * self.cur - self.t * nf.sqrt() * self.prev) / (nf + T::one()).sqrt();
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        let big = T::max_value().sqrt();
        if self.cur.abs() > big || self.prev.abs() > big {
            self.cur = self.cur / big;
            self.prev = self.prev / big;
            self.ln_scale = self.ln_scale + big.ln();
        }
        Some(out)
    }
}

/// Normalized `Σ w_i |n_i⟩`. Repeated photon numbers add.
pub fn superpose_fock<T: Real>(terms: &[(usize, Complex<T>)], cutoff: usize) -> Result<ModeAmplitudes<T>> {
    let mut raw = vec![czero(); cutoff + 1];
    for &(n, w) in terms {
        check_cutoff(n, cutoff)?;
        raw[n] = raw[n] + w;
    }
    ModeAmplitudes::from_unnormalized(raw)
}

/// Photon-number moments of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats<T: Real> {
    pub mean: T,
    pub variance: T,
}

impl<T: Real> PhotonStats<T> {
    /// `(Var n − ⟨n⟩)/⟨n⟩`; negative for sub-Poissonian light.
    pub fn mandel_q(&self) -> Result<T> {
        if self.mean <= T::epsilon() {
            return Err(Error::VacuumMandel);
        }
        Ok((self.variance - self.mean) / self.mean)
    }
}

pub fn photon_stats<T: Real>(mode: &ModeAmplitudes<T>) -> PhotonStats<T> {
    let (mut s0, mut s1, mut s2) = (T::zero(), T::zero(), T::zero());
    for (n, z) in mode.amps().iter().enumerate() {
        let p = z.norm_sqr();
        let nf = T::from_usize_lossy(n);
        s0 = s0 + p;
        s1 = s1 + nf * p;
        s2 = s2 + nf * nf * p;
    }
    let mean = s1 / s0;
    PhotonStats {
        mean,
        variance: s2 / s0 - mean * mean,
    }
}

/// State families known to [`cutoff_for`].
#[derive(Debug, Clone, PartialEq)]
pub enum StateFamily {
    Fock(usize),
    FockSuperposition(Vec<usize>),
    Coherent(Complex64),
    /// Squeezed state with the literal displacement parameter `nu`.
    Squeezed { nu: f64, r: f64 },
    /// Squeezed state parameterized by its mean photon number.
    SqueezedMean { nbar: f64, r: f64 },
}

/// Smallest cutoff whose tail probability is below `leak_tol`, plus
/// [`HEADROOM`].
pub fn cutoff_for(family: &StateFamily, leak_tol: f64) -> usize {
    let tail_cutoff = |probs: &mut dyn Iterator<Item = f64>, mean: f64| -> usize {
        let mut cum = 0.0;
        for (n, p) in probs.enumerate().take(MAX_CUTOFF) {
            cum += p;
            if 1.0 - cum < leak_tol && n as f64 >= mean {
                return n;
            }
        }
        MAX_CUTOFF
    };
    let base = match family {
        StateFamily::Fock(n) => *n,
        StateFamily::FockSuperposition(ns) => ns.iter().copied().max().unwrap_or(0),
        StateFamily::Coherent(nu) => {
            let lambda = nu.norm_sqr();
            if lambda == 0.0 {
                0
            } else {
                let ln_l = lambda.ln();
                let mut ln_fact = 0.0;
                let mut it = (0..).map(|n: usize| {
                    if n > 0 {
                        ln_fact += (n as f64).ln();
                    }
                    (-lambda + n as f64 * ln_l - ln_fact).exp()
                });
                tail_cutoff(&mut it, lambda)
            }
        }
        StateFamily::Squeezed { nu, r } => squeezed_tail(*nu, *r, &tail_cutoff),
        StateFamily::SqueezedMean { nbar, r } => match squeezed_nu_for_mean(*nbar, *r) {
            Ok(nu) => squeezed_tail(nu, *r, &tail_cutoff),
            Err(_) => MAX_CUTOFF,
        },
    };
    base + HEADROOM
}

fn squeezed_tail(nu: f64, r: f64, tail: &dyn Fn(&mut dyn Iterator<Item = f64>, f64) -> usize) -> usize {
    if r <= 0.0 {
        return tail_coherent(nu, tail);
    }
    let mean = nu * nu * (-2.0 * r).exp() + r.sinh().powi(2);
    let mut it = SqueezedSeries::new(nu, r).map(|c| c * c);
    tail(&mut it, mean)
}

fn tail_coherent(nu: f64, tail: &dyn Fn(&mut dyn Iterator<Item = f64>, f64) -> usize) -> usize {
    let lambda = nu * nu;
    let span = ((lambda + 50.0 * lambda.sqrt()) as usize).clamp(200, MAX_CUTOFF);
    let mut it = coherent_raw(Complex64::new(nu, 0.0), span)
        .into_iter()
        .map(|z| z.norm_sqr());
    tail(&mut it, lambda)
}

/// How a mode is prepared from a target mean photon number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeFamily {
    Coherent,
    /// Squeezed coherent state with squeezing `r`, displacement chosen so the
    /// mean photon number equals the target.
    Squeezed { r: f64 },
}

/// Prepares a real-amplitude mode with mean photon number `nbar` on an
/// automatically chosen cutoff.
pub fn prepare_mode<T: Real>(family: ModeFamily, nbar: f64, leak_tol: f64) -> Result<ModeAmplitudes<T>> {
    if nbar.is_nan() || nbar < 0.0 || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!("mean photon number {nbar}")));
    }
    match family {
        ModeFamily::Coherent => {
            let nu = nbar.sqrt();
            let cutoff = cutoff_for(&StateFamily::Coherent(Complex64::new(nu, 0.0)), leak_tol);
            coherent_amplitudes(cre(T::lit(nu)), cutoff, T::lit(leak_tol))
        }
        ModeFamily::Squeezed { r } => {
            let nu = squeezed_nu_for_mean(nbar, r)?;
            let cutoff = cutoff_for(&StateFamily::Squeezed { nu, r }, leak_tol);
            squeezed_amplitudes(T::lit(nu), T::lit(r), cutoff, T::lit(leak_tol))
        }
    }
}
