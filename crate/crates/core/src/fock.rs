//! State representations for one Λ atom (levels `a`, `b`) and two cavity
//! modes truncated at finite Fock cutoffs.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView2, Zip};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cre, czero, norm_sqr_sum, Real};

/// Tolerated tail probability lost to Fock-space truncation.
pub const LEAK_TOL: f64 = 1e-10;

/// Normalization tolerance for states produced by unitary evolution.
pub const UNITARITY_TOL: f64 = 1e-12;

/// Lower atomic level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    A,
    B,
}

impl Level {
    pub fn symbol(self) -> char {
        match self {
            Level::A => 'a',
            Level::B => 'b',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'a' => Some(Level::A),
            'b' => Some(Level::B),
            _ => None,
        }
    }
}

/// Single-mode amplitudes `C_n` for `n = 0..=cutoff`.
///
/// The amplitudes are always stored renormalized; the truncation deficit
/// measured before renormalization is kept in [`ModeAmplitudes::leakage`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeAmplitudes<T: Real> {
    amps: Vec<Complex<T>>,
    leakage: T,
    renorm: T,
}

impl<T: Real> ModeAmplitudes<T> {
    /// Accepts raw (possibly truncated) amplitudes whose squared norm lies in
    /// `[1 - leak_tol, 1 + leak_tol]`, then renormalizes them.
    pub fn from_truncated(raw: Vec<Complex<T>>, leak_tol: T) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidParameter("empty amplitude vector".into()));
        }
        let cutoff = raw.len() - 1;
        let tol = leak_tol.max(T::tol(0.0));
        let sum = norm_sqr_sum(&raw);
        let leakage = T::one() - sum;
        if !sum.is_finite() || leakage > tol {
            return Err(Error::Leakage {
                leakage: leakage.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
                cutoff,
            });
        }
        if -leakage > tol {
            return Err(Error::NotNormalized {
                norm_sqr: sum.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        let renorm = T::one() / sum.sqrt();
        if renorm != T::one() {
            log::debug!(
                "renormalized mode amplitudes at cutoff {cutoff}: leakage {leakage:e}, factor {renorm}"
            );
        }
        let amps = raw.into_iter().map(|z| z * renorm).collect();
        Ok(Self {
            amps,
            leakage,
            renorm,
        })
    }

    /// Normalizes an arbitrary non-zero vector (used for superpositions).
    pub(crate) fn from_unnormalized(raw: Vec<Complex<T>>) -> Result<Self> {
        let sum = norm_sqr_sum(&raw);
        if sum <= T::zero() || !sum.is_finite() {
            return Err(Error::ZeroVector);
        }
        let renorm = T::one() / sum.sqrt();
        Ok(Self {
            amps: raw.into_iter().map(|z| z * renorm).collect(),
            leakage: T::zero(),
            renorm,
        })
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    /// `1 - Σ|C_n|²` before renormalization.
    pub fn leakage(&self) -> T {
        self.leakage
    }

    /// Factor that was applied to reach unit norm.
    pub fn renormalization(&self) -> T {
        self.renorm
    }

    /// Amplitude at `n`, zero beyond the cutoff.
    pub fn get(&self, n: usize) -> Complex<T> {
        self.amps.get(n).copied().unwrap_or_else(czero)
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(&self.amps)
    }
}

/// Atomic amplitudes `γ|a⟩ + δ|b⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomState<T: Real> {
    pub gamma: Complex<T>,
    pub delta: Complex<T>,
}

impl<T: Real> AtomState<T> {
    pub fn new(gamma: Complex<T>, delta: Complex<T>) -> Result<Self> {
        let n = gamma.norm_sqr() + delta.norm_sqr();
        let tol = T::tol(UNITARITY_TOL);
        if (n - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                norm_sqr: n.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(Self { gamma, delta })
    }

    pub fn ground(level: Level) -> Self {
        match level {
            Level::A => Self {
                gamma: cre(T::one()),
                delta: czero(),
            },
            Level::B => Self {
                gamma: czero(),
                delta: cre(T::one()),
            },
        }
    }

    /// `(e^{iφ}|a⟩ + |b⟩)/√2`.
    pub fn phi_plus(phi: T) -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self {
            gamma: Complex::from_polar(s, phi),
            delta: cre(s),
        }
    }

    /// `(e^{iφ}|a⟩ - |b⟩)/√2`.
    pub fn phi_minus(phi: T) -> Self {
        let s = T::FRAC_1_SQRT_2();
        Self {
            gamma: Complex::from_polar(s, phi),
            delta: cre(-s),
        }
    }

    pub fn amplitude(&self, level: Level) -> Complex<T> {
        match level {
            Level::A => self.gamma,
            Level::B => self.delta,
        }
    }
}

/// Anything that can be written as a set of mutually orthogonal two-mode
/// components `Ψ_c[n, m]` (one per state of the traced-out ancilla).
pub trait FieldComponents<T: Real> {
    fn field_components(&self) -> Vec<ArrayView2<'_, Complex<T>>>;
}

/// A pure two-mode field state `Σ ψ[n,m] |n,m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState<T: Real> {
    grid: Array2<Complex<T>>,
}

impl<T: Real> TwoModeState<T> {
    pub fn from_grid(grid: Array2<Complex<T>>) -> Self {
        Self { grid }
    }

    /// Normalizes `grid`; fails on the zero vector.
    pub fn normalized(grid: Array2<Complex<T>>) -> Result<Self> {
        let n = norm_sqr_sum(grid.iter());
        if n <= T::zero() || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        let s = T::one() / n.sqrt();
        Ok(Self {
            grid: grid.mapv(|z| z * s),
        })
    }

    pub fn product(mode1: &ModeAmplitudes<T>, mode2: &ModeAmplitudes<T>) -> Self {
        let grid = Array2::from_shape_fn((mode1.cutoff() + 1, mode2.cutoff() + 1), |(n, m)| {
            mode1.amps()[n] * mode2.amps()[m]
        });
        Self { grid }
    }

    pub fn basis(n: usize, m: usize, cutoff1: usize, cutoff2: usize) -> Result<Self> {
        check_cutoff(n, cutoff1)?;
        check_cutoff(m, cutoff2)?;
        let mut grid = Array2::from_elem((cutoff1 + 1, cutoff2 + 1), czero());
        grid[(n, m)] = cre(T::one());
        Ok(Self { grid })
    }

    pub fn grid(&self) -> &Array2<Complex<T>> {
        &self.grid
    }

    pub fn into_grid(self) -> Array2<Complex<T>> {
        self.grid
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        let (r, c) = self.grid.dim();
        (r - 1, c - 1)
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(self.grid.iter())
    }

    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            grid: self.grid.mapv(|z| z * c),
        }
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        grid_inner(&self.grid, &other.grid)
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    /// Attaches an atomic level, giving a joint state with an empty other branch.
    pub fn with_atom(&self, level: Level) -> JointState<T> {
        let zeros = Array2::from_elem(self.grid.dim(), czero());
        match level {
            Level::A => JointState {
                a: self.grid.clone(),
                b: zeros,
            },
            Level::B => JointState {
                a: zeros,
                b: self.grid.clone(),
            },
        }
    }
}

impl<T: Real> FieldComponents<T> for TwoModeState<T> {
    fn field_components(&self) -> Vec<ArrayView2<'_, Complex<T>>> {
        vec![self.grid.view()]
    }
}

/// Joint atom–field state: `A[n,m]` multiplies `|n,m,a⟩`, `B[n,m]` multiplies `|n,m,b⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState<T: Real> {
    a: Array2<Complex<T>>,
    b: Array2<Complex<T>>,
}

impl<T: Real> JointState<T> {
    pub fn from_grids(a: Array2<Complex<T>>, b: Array2<Complex<T>>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::ShapeMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::InvalidParameter("empty grid".into()));
        }
        Ok(Self { a, b })
    }

    pub fn zeros(cutoff1: usize, cutoff2: usize) -> Self {
        let z = Array2::from_elem((cutoff1 + 1, cutoff2 + 1), czero());
        Self { a: z.clone(), b: z }
    }

    /// `|n, m, level⟩` on a grid with the given cutoffs.
    pub fn basis(n: usize, m: usize, level: Level, cutoff1: usize, cutoff2: usize) -> Result<Self> {
        check_cutoff(n, cutoff1)?;
        check_cutoff(m, cutoff2)?;
        let mut s = Self::zeros(cutoff1, cutoff2);
        s.component_mut(level)[(n, m)] = cre(T::one());
        Ok(s)
    }

    pub fn component(&self, level: Level) -> &Array2<Complex<T>> {
        match level {
            Level::A => &self.a,
            Level::B => &self.b,
        }
    }

    pub(crate) fn component_mut(&mut self, level: Level) -> &mut Array2<Complex<T>> {
        match level {
            Level::A => &mut self.a,
            Level::B => &mut self.b,
        }
    }

    pub fn a(&self) -> &Array2<Complex<T>> {
        &self.a
    }

    pub fn b(&self) -> &Array2<Complex<T>> {
        &self.b
    }

    pub fn into_grids(self) -> (Array2<Complex<T>>, Array2<Complex<T>>) {
        (self.a, self.b)
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        let (r, c) = self.a.dim();
        (r - 1, c - 1)
    }

    pub fn shape(&self) -> (usize, usize) {
        self.a.dim()
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr_sum(self.a.iter()) + norm_sqr_sum(self.b.iter())
    }

    /// Multiplies every amplitude by `c` (e.g. a global phase).
    pub fn scaled(&self, c: Complex<T>) -> Self {
        Self {
            a: self.a.mapv(|z| z * c),
            b: self.b.mapv(|z| z * c),
        }
    }

    /// Largest element-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        check_shape(self.shape(), other.shape())?;
        let mut d = T::zero();
        for (x, y) in self.a.iter().zip(other.a.iter()) {
            d = d.max((*x - *y).norm());
        }
        for (x, y) in self.b.iter().zip(other.b.iter()) {
            d = d.max((*x - *y).norm());
        }
        Ok(d)
    }

    /// Copies the amplitudes into one flat vector: all `A` cells row-major, then all `B` cells.
    pub fn to_vector(&self) -> Vec<Complex<T>> {
        self.a.iter().chain(self.b.iter()).copied().collect()
    }

    pub fn from_vector(v: &[Complex<T>], cutoff1: usize, cutoff2: usize) -> Result<Self> {
        let cells = (cutoff1 + 1) * (cutoff2 + 1);
        if v.len() != 2 * cells {
            return Err(Error::InvalidParameter(format!(
                "vector length {} does not match 2x{} cells",
                v.len(),
                cells
            )));
        }
        let shape = (cutoff1 + 1, cutoff2 + 1);
        let a = Array2::from_shape_vec(shape, v[..cells].to_vec())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let b = Array2::from_shape_vec(shape, v[cells..].to_vec())
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self { a, b })
    }
}

impl<T: Real> FieldComponents<T> for JointState<T> {
    fn field_components(&self) -> Vec<ArrayView2<'_, Complex<T>>> {
        vec![self.a.view(), self.b.view()]
    }
}

/// Builds `Σ C_n C_m |n,m⟩ (γ|a⟩ + δ|b⟩)`.
pub fn make_joint_state<T: Real>(
    mode1: &ModeAmplitudes<T>,
    mode2: &ModeAmplitudes<T>,
    atom: &AtomState<T>,
) -> Result<JointState<T>> {
    let tol = T::tol(LEAK_TOL);
    for mode in [mode1, mode2] {
        let n = mode.norm_sqr();
        if (n - T::one()).abs() > tol {
            return Err(Error::NotNormalized {
                norm_sqr: n.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
    }
    let field = TwoModeState::product(mode1, mode2);
    let a = field.grid.mapv(|z| z * atom.gamma);
    let b = field.grid.mapv(|z| z * atom.delta);
    Ok(JointState { a, b })
}

/// `⟨s1|s2⟩`.
pub fn inner_product<T: Real>(s1: &JointState<T>, s2: &JointState<T>) -> Result<Complex<T>> {
    Ok(grid_inner(&s1.a, &s2.a)? + grid_inner(&s1.b, &s2.b)?)
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity<T: Real>(s1: &JointState<T>, s2: &JointState<T>) -> Result<T> {
    Ok(inner_product(s1, s2)?.norm_sqr())
}

pub(crate) fn grid_inner<T: Real>(x: &Array2<Complex<T>>, y: &Array2<Complex<T>>) -> Result<Complex<T>> {
    check_shape(x.dim(), y.dim())?;
    let mut acc = czero();
    Zip::from(x).and(y).for_each(|p, q| acc = acc + p.conj() * q);
    Ok(acc)
}

pub(crate) fn check_shape(l: (usize, usize), r: (usize, usize)) -> Result<()> {
    if l != r {
        return Err(Error::ShapeMismatch { left: l, right: r });
    }
    Ok(())
}

pub(crate) fn check_cutoff(n: usize, cutoff: usize) -> Result<()> {
    if n > cutoff {
        return Err(Error::PhotonNumberAboveCutoff { n, cutoff });
    }
    Ok(())
}

/// Several atoms sharing one two-mode field. Each branch is labelled by a
/// string over `{a, b}` with one symbol per atom (atom 0 first).
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRegisterState<T: Real> {
    n_atoms: usize,
    shape: (usize, usize),
    branches: BTreeMap<String, Array2<Complex<T>>>,
}

impl<T: Real> AtomRegisterState<T> {
    /// Builds a register from its non-zero branches. Missing labels are zero.
    pub fn new(n_atoms: usize, branches: BTreeMap<String, Array2<Complex<T>>>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidParameter("register needs at least one atom".into()));
        }
        let mut shape = None;
        for (label, grid) in &branches {
            validate_label(label, n_atoms)?;
            match shape {
                None => shape = Some(grid.dim()),
                Some(s) => check_shape(s, grid.dim())?,
            }
        }
        let shape = shape.ok_or(Error::ZeroVector)?;
        let mut reg = Self {
            n_atoms,
            shape,
            branches: BTreeMap::new(),
        };
        for label in all_labels(n_atoms) {
            let grid = branches
                .get(&label)
                .cloned()
                .unwrap_or_else(|| Array2::from_elem(shape, czero()));
            reg.branches.insert(label, grid);
        }
        Ok(reg)
    }

    /// Field state times a product of single-atom states.
    pub fn product(field: &TwoModeState<T>, atoms: &[AtomState<T>]) -> Result<Self> {
        let mut branches = BTreeMap::new();
        for label in all_labels(atoms.len()) {
            let mut coeff = cre(T::one());
            for (atom, c) in atoms.iter().zip(label.chars()) {
                coeff = coeff * atom.amplitude(Level::from_symbol(c).expect("generated label"));
            }
            branches.insert(label, field.grid().mapv(|z| z * coeff));
        }
        Self::new(atoms.len(), branches)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn shape(&self) -> (usize, usize) {
        self.shape
    }

    pub fn branches(&self) -> &BTreeMap<String, Array2<Complex<T>>> {
        &self.branches
    }

    pub fn branch(&self, label: &str) -> Option<&Array2<Complex<T>>> {
        self.branches.get(label)
    }

    pub(crate) fn branch_mut(&mut self, label: &str) -> Option<&mut Array2<Complex<T>>> {
        self.branches.get_mut(label)
    }

    pub fn norm_sqr(&self) -> T {
        self.branches
            .values()
            .fold(T::zero(), |acc, g| acc + norm_sqr_sum(g.iter()))
    }

    pub fn inner_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.n_atoms != other.n_atoms {
            return Err(Error::InvalidParameter("registers differ in atom count".into()));
        }
        let mut acc = czero();
        for (label, g) in &self.branches {
            acc = acc + grid_inner(g, &other.branches[label])?;
        }
        Ok(acc)
    }

    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner_product(other)?.norm_sqr())
    }
}

impl<T: Real> FieldComponents<T> for AtomRegisterState<T> {
    fn field_components(&self) -> Vec<ArrayView2<'_, Complex<T>>> {
        self.branches.values().map(|g| g.view()).collect()
    }
}

fn validate_label(label: &str, n_atoms: usize) -> Result<()> {
    if label.chars().count() != n_atoms || label.chars().any(|c| Level::from_symbol(c).is_none()) {
        return Err(Error::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// All `2^k` labels in lexicographic order.
pub(crate) fn all_labels(k: usize) -> Vec<String> {
    (0..1usize << k)
        .map(|bits| {
            (0..k)
                .map(|i| if bits >> (k - 1 - i) & 1 == 0 { 'a' } else { 'b' })
                .collect()
        })
        .collect()
}
