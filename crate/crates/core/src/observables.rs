//! Reduced states, purities, atomic inversion and Husimi Q-functions.

use ndarray::{Array2, ArrayView2};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{grid_inner, AtomRegisterState, AtomState, FieldComponents, JointState, ModeAmplitudes};
use crate::scalar::{cre, czero, norm_sqr_sum, Real};

/// Which cavity mode a reduction keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn index(self) -> usize {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }
}

/// Hermitian, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    entries: Array2<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub const HERMITIAN_TOL: f64 = 1e-10;

    /// Validates squareness, Hermiticity and unit trace.
    pub fn new(entries: Array2<Complex<T>>) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c || r == 0 {
            return Err(Error::InvalidParameter(format!("density matrix shape {r}x{c}")));
        }
        let tol = T::tol(Self::HERMITIAN_TOL);
        let rho = Self { entries };
        let herm = rho.hermiticity_error();
        if herm > tol {
            return Err(Error::InvalidParameter(format!("not Hermitian: deviation {herm:e}")));
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotNormalized {
                norm_sqr: tr.re.to_f64_lossy(),
                tol: tol.to_f64_lossy(),
            });
        }
        Ok(rho)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = T::one() / T::from_usize_lossy(dim);
        Self {
            entries: Array2::from_diag_elem(dim, cre(w)),
        }
    }

    /// `|ψ⟩⟨ψ|` for a normalized vector.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let n = norm_sqr_sum(psi);
        let s = T::one() / n.sqrt();
        let entries = Array2::from_shape_fn((psi.len(), psi.len()), |(i, j)| psi[i] * psi[j].conj() * s * s);
        Self::new(entries)
    }

    pub fn entries(&self) -> &Array2<Complex<T>> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim()).fold(czero(), |acc, i| acc + self.entries[(i, i)])
    }

    pub fn hermiticity_error(&self) -> T {
        let mut e = T::zero();
        for ((i, j), z) in self.entries.indexed_iter() {
            e = e.max((*z - self.entries[(j, i)].conj()).norm());
        }
        e
    }

    /// Diagonal of the matrix (level or photon-number populations).
    pub fn populations(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }
}

/// `Tr ρ²`.
pub fn purity<T: Real>(rho: &DensityMatrix<T>) -> T {
    norm_sqr_sum(rho.entries.iter())
}

/// Atomic reduced state `[[ρ_aa, ρ_ab], [ρ_ba, ρ_bb]]`.
pub fn reduced_atom<T: Real>(state: &JointState<T>) -> DensityMatrix<T> {
    let raa = norm_sqr_sum(state.a().iter());
    let rbb = norm_sqr_sum(state.b().iter());
    // ρ_ab = Σ A conj(B)
    let rab = grid_inner(state.b(), state.a()).expect("components share a shape");
    let entries = Array2::from_shape_vec((2, 2), vec![cre(raa), rab, rab.conj(), cre(rbb)]).expect("2x2");
    DensityMatrix { entries }
}

/// Purity of the atomic reduced state.
pub fn atomic_purity<T: Real>(state: &JointState<T>) -> T {
    purity(&reduced_atom(state))
}

/// Reduced state of one mode, tracing the other mode and any ancilla.
pub fn reduced_mode<T: Real, S: FieldComponents<T> + ?Sized>(src: &S, which: Mode) -> DensityMatrix<T> {
    let comps = src.field_components();
    let (n1, n2) = comps[0].dim();
    let dim = match which {
        Mode::One => n1,
        Mode::Two => n2,
    };
    let mut rho = Array2::from_elem((dim, dim), czero());
    for psi in &comps {
        let psi = match which {
            Mode::One => psi.view(),
            Mode::Two => psi.t(),
        };
        for i in 0..dim {
            let ri = psi.row(i);
            for j in 0..=i {
                let rj = psi.row(j);
                let v = ri.iter().zip(rj.iter()).fold(czero(), |acc: Complex<T>, (x, y)| acc + *x * y.conj());
                rho[(i, j)] = rho[(i, j)] + v;
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    let tr = (0..dim).fold(T::zero(), |acc, i| acc + rho[(i, i)].re);
    if tr > T::zero() {
        rho.mapv_inplace(|z| z / tr);
    }
    DensityMatrix { entries: rho }
}

/// `Tr ρ²` of one mode's reduced state, via Gram matrices of the
/// components contracted over the traced index. No density matrix or
/// eigen-decomposition is formed.
pub fn mode_purity<T: Real, S: FieldComponents<T> + ?Sized>(src: &S, which: Mode) -> T {
    let comps = src.field_components();
    let total: T = comps.iter().fold(T::zero(), |acc, c| acc + norm_sqr_sum(c.iter()));
    if comps.len() == 1 {
        // Both reductions of a pure bipartite state share their spectrum,
        // so contract over the longer axis.
        let psi = comps[0];
        let view = if psi.nrows() >= psi.ncols() { psi } else { psi.t() };
        return gram_frobenius(view, view) / (total * total);
    }
    let mut acc = T::zero();
    for x in &comps {
        for y in &comps {
            let g = match which {
                Mode::One => gram_frobenius(*x, *y),
                Mode::Two => gram_frobenius(x.t(), y.t()),
            };
            acc = acc + g;
        }
    }
    acc / (total * total)
}

/// `‖X† Y‖²_F`, contracting the row index of `X` and `Y`.
fn gram_frobenius<T: Real>(x: ArrayView2<'_, Complex<T>>, y: ArrayView2<'_, Complex<T>>) -> T {
    let k = x.ncols();
    let mut acc = T::zero();
    for i in 0..k {
        let xi = x.column(i);
        for j in 0..k {
            let yj = y.column(j);
            let g = xi.iter().zip(yj.iter()).fold(czero(), |s: Complex<T>, (p, q)| s + p.conj() * q);
            acc = acc + g.norm_sqr();
        }
    }
    acc
}

/// `Tr ρ_field²` for the two modes together (the complement of the ancilla).
pub fn field_purity<T: Real, S: FieldComponents<T> + ?Sized>(src: &S) -> T {
    let comps = src.field_components();
    let mut acc = T::zero();
    let mut total = T::zero();
    for x in &comps {
        total = total + norm_sqr_sum(x.iter());
        for y in &comps {
            let ip = x.iter().zip(y.iter()).fold(czero(), |s: Complex<T>, (p, q)| s + p.conj() * q);
            acc = acc + ip.norm_sqr();
        }
    }
    acc / (total * total)
}

/// Reduced state of atom `atom` of a register, tracing the field and the
/// other atoms. Its purity equals that of the complementary reduction.
pub fn reduced_register_atom<T: Real>(reg: &AtomRegisterState<T>, atom: usize) -> Result<DensityMatrix<T>> {
    if atom >= reg.n_atoms() {
        return Err(Error::InvalidParameter(format!("atom index {atom} out of range")));
    }
    let mut rho = Array2::from_elem((2, 2), czero::<T>());
    for (label, grid) in reg.branches() {
        let bytes = label.as_bytes();
        if bytes[atom] != b'a' {
            continue;
        }
        let mut partner = bytes.to_vec();
        partner[atom] = b'b';
        let partner = std::str::from_utf8(&partner).expect("ascii label");
        let other = &reg.branches()[partner];
        rho[(0, 0)] = rho[(0, 0)] + cre(norm_sqr_sum(grid.iter()));
        rho[(1, 1)] = rho[(1, 1)] + cre(norm_sqr_sum(other.iter()));
        rho[(0, 1)] = rho[(0, 1)] + grid_inner(other, grid)?;
    }
    rho[(1, 0)] = rho[(0, 1)].conj();
    let tr = rho[(0, 0)].re + rho[(1, 1)].re;
    rho.mapv_inplace(|z| z / tr);
    Ok(DensityMatrix { entries: rho })
}

/// `W = P_a − P_b`.
pub fn atomic_inversion<T: Real>(state: &JointState<T>) -> T {
    norm_sqr_sum(state.a().iter()) - norm_sqr_sum(state.b().iter())
}

/// Atomic inversion from the four-term closed form in the initial
/// photon distributions, without constructing the evolved state.
///
/// The four terms omit the interference contribution
/// `∝ Re(i γ δ* C_n C_m C*_{n+1} C*_{m−1})`, which vanishes when the photon
/// amplitudes are real and `γ δ*` is real. Outside that case the result
/// differs from [`atomic_inversion`] of the evolved state.
pub fn inversion_series<T: Real>(
    mode1: &ModeAmplitudes<T>,
    mode2: &ModeAmplitudes<T>,
    atom: &AtomState<T>,
    gts: &[T],
) -> Vec<T> {
    let p1 = mode1.probabilities();
    let p2 = mode2.probabilities();
    let prob = |p: &[T], k: isize| -> T {
        if k < 0 {
            T::zero()
        } else {
            p.get(k as usize).copied().unwrap_or_else(T::zero)
        }
    };
    let g2 = atom.gamma.norm_sqr();
    let d2 = atom.delta.norm_sqr();
    gts.iter()
        .map(|&gt| {
            let mut w = T::zero();
            for n in 0..p1.len() as isize {
                for m in 0..p2.len() as isize {
                    let up = (T::from_usize_lossy(((n + 1) * m) as usize)).sqrt() * gt;
                    let down = (T::from_usize_lossy(((m + 1) * n) as usize)).sqrt() * gt;
                    let (su, cu) = up.sin_cos();
                    let (sd, cd) = down.sin_cos();
                    let pnm = prob(&p1, n) * prob(&p2, m);
                    w = w + pnm * g2 * cu * cu
                        + prob(&p1, n + 1) * prob(&p2, m - 1) * d2 * su * su
                        - pnm * d2 * cd * cd
                        - prob(&p1, n - 1) * prob(&p2, m + 1) * g2 * sd * sd;
                }
            }
            w
        })
        .collect()
}

/// Rectangular window in the complex α plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QWindow<T: Real> {
    pub re: (T, T),
    pub im: (T, T),
}

impl<T: Real> QWindow<T> {
    pub fn square(half_width: T) -> Self {
        Self {
            re: (-half_width, half_width),
            im: (-half_width, half_width),
        }
    }
}

/// Samples of `Q(α) = ⟨α|ρ|α⟩` (no `1/π`). `values[(i, j)]` is taken at
/// `α = re_axis[j] + i·im_axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QGrid<T: Real> {
    pub values: Array2<T>,
    pub re_axis: Vec<T>,
    pub im_axis: Vec<T>,
}

/// A local maximum of a [`QGrid`], in Cartesian and polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPeak<T: Real> {
    pub alpha: Complex<T>,
    pub value: T,
    pub radius: T,
    pub angle: T,
}

impl<T: Real> QGrid<T> {
    pub fn alpha(&self, i: usize, j: usize) -> Complex<T> {
        Complex::new(self.re_axis[j], self.im_axis[i])
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    /// Position and value of the global maximum (first in row-major order on ties).
    pub fn argmax(&self) -> (Complex<T>, T) {
        let mut best = ((0, 0), T::neg_infinity());
        for (ij, &v) in self.values.indexed_iter() {
            if v > best.1 {
                best = (ij, v);
            }
        }
        (self.alpha(best.0 .0, best.0 .1), best.1)
    }

    /// Local maxima above `rel * max`, strongest first.
    pub fn peaks(&self, rel: T) -> Vec<QPeak<T>> {
        let (rows, cols) = self.values.dim();
        let floor = self.max_value() * rel;
        let mut out = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                let v = self.values[(i, j)];
                if v < floor || v <= T::zero() {
                    continue;
                }
                let mut is_max = true;
                'nb: for di in -1isize..=1 {
                    for dj in -1isize..=1 {
                        if di == 0 && dj == 0 {
                            continue;
                        }
                        let (ii, jj) = (i as isize + di, j as isize + dj);
                        if ii < 0 || jj < 0 || ii >= rows as isize || jj >= cols as isize {
                            continue;
                        }
                        let w = self.values[(ii as usize, jj as usize)];
                        // Plateaus count once: strict against earlier cells.
                        let earlier = (di, dj) < (0, 0);
                        if w > v || (earlier && w == v) {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    let alpha = self.alpha(i, j);
                    out.push(QPeak {
                        alpha,
                        value: v,
                        radius: alpha.norm(),
                        angle: alpha.arg(),
                    });
                }
            }
        }
        out.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// Riemann-sum estimate of `∫ Q d²α / π`.
    pub fn integral(&self) -> T {
        let step = |ax: &[T]| {
            if ax.len() > 1 {
                (ax[ax.len() - 1] - ax[0]) / T::from_usize_lossy(ax.len() - 1)
            } else {
                T::zero()
            }
        };
        let area = step(&self.re_axis) * step(&self.im_axis);
        self.values.iter().fold(T::zero(), |a, &b| a + b) * area / T::PI()
    }
}

fn axis<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let d = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n).map(|k| lo + d * T::from_usize_lossy(k)).collect()
}

fn check_window<T: Real>(w: &QWindow<T>, resolution: usize) -> Result<()> {
    let ok = resolution >= 2
        && w.re.0.is_finite()
        && w.re.1.is_finite()
        && w.im.0.is_finite()
        && w.im.1.is_finite()
        && w.re.1 > w.re.0
        && w.im.1 > w.im.0;
    if ok {
        Ok(())
    } else {
        Err(Error::DegenerateWindow)
    }
}

/// `⟨n|α⟩` for `n = 0..len` and the index range outside which it is negligible.
fn coherent_overlap<T: Real>(alpha: Complex<T>, len: usize) -> (Vec<Complex<T>>, usize, usize) {
    let v = crate::state_prep::coherent_raw(alpha, len - 1);
    let peak = v.iter().fold(T::zero(), |a, z| a.max(z.norm()));
    let cut = peak * T::epsilon() * T::epsilon();
    let lo = v.iter().position(|z| z.norm() > cut).unwrap_or(0);
    let hi = v.iter().rposition(|z| z.norm() > cut).map_or(0, |k| k + 1);
    (v, lo, hi.max(lo))
}

/// Q-function of one mode's reduced state, contracted directly from the
/// pure components: `Q₁(α) = Σ_c Σ_m |Σ_n ⟨α|n⟩* Ψ_c[n,m]|²`.
pub fn husimi_q<T: Real, S: FieldComponents<T> + ?Sized>(
    src: &S,
    which: Mode,
    window: &QWindow<T>,
    resolution: usize,
) -> Result<QGrid<T>> {
    check_window(window, resolution)?;
    let comps = src.field_components();
    let total = comps.iter().fold(T::zero(), |acc, c| acc + norm_sqr_sum(c.iter()));
    let re_axis = axis(window.re.0, window.re.1, resolution);
    let im_axis = axis(window.im.0, window.im.1, resolution);
    let len = match which {
        Mode::One => comps[0].nrows(),
        Mode::Two => comps[0].ncols(),
    };
    let rows: Vec<Vec<T>> = im_axis
        .par_iter()
        .map(|&y| {
            re_axis
                .iter()
                .map(|&x| {
                    let (coh, lo, hi) = coherent_overlap(Complex::new(x, y), len);
                    let mut q = T::zero();
                    for psi in &comps {
                        q = q + match which {
                            Mode::One => contract_rows(psi, &coh, lo, hi),
                            Mode::Two => contract_cols(psi, &coh, lo, hi),
                        };
                    }
                    q / total
                })
                .collect()
        })
        .collect();
    let values = Array2::from_shape_fn((resolution, resolution), |(i, j)| rows[i][j]);
    Ok(QGrid {
        values,
        re_axis,
        im_axis,
    })
}

/// `Σ_m |Σ_{n∈[lo,hi)} conj(coh[n]) ψ[n,m]|²`.
fn contract_rows<T: Real>(psi: &ArrayView2<'_, Complex<T>>, coh: &[Complex<T>], lo: usize, hi: usize) -> T {
    let mut acc = vec![czero::<T>(); psi.ncols()];
    for n in lo..hi {
        let c = coh[n].conj();
        for (a, p) in acc.iter_mut().zip(psi.row(n).iter()) {
            *a = *a + c * p;
        }
    }
    norm_sqr_sum(&acc)
}

/// `Σ_n |Σ_{m∈[lo,hi)} conj(coh[m]) ψ[n,m]|²`.
fn contract_cols<T: Real>(psi: &ArrayView2<'_, Complex<T>>, coh: &[Complex<T>], lo: usize, hi: usize) -> T {
    let mut q = T::zero();
    for row in psi.rows() {
        let mut s = czero::<T>();
        for m in lo..hi {
            s = s + coh[m].conj() * row[m];
        }
        q = q + s.norm_sqr();
    }
    q
}

/// Q-function of an explicit density matrix.
pub fn husimi_q_density<T: Real>(rho: &DensityMatrix<T>, window: &QWindow<T>, resolution: usize) -> Result<QGrid<T>> {
    check_window(window, resolution)?;
    let re_axis = axis(window.re.0, window.re.1, resolution);
    let im_axis = axis(window.im.0, window.im.1, resolution);
    let d = rho.dim();
    let values = Array2::from_shape_fn((resolution, resolution), |(i, j)| {
        let (coh, lo, hi) = coherent_overlap(Complex::new(re_axis[j], im_axis[i]), d);
        let mut q = czero::<T>();
        for n in lo..hi {
            let mut s = czero::<T>();
            for k in lo..hi {
                s = s + rho.entries[(n, k)] * coh[k];
            }
            q = q + coh[n].conj() * s;
        }
        q.re
    });
    Ok(QGrid {
        values,
        re_axis,
        im_axis,
    })
}
