//! Gate and state-preparation protocols, each returning a [`ProtocolReport`].

use std::collections::BTreeMap;
use std::time::Instant;

use ndarray::Array2;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{inner_product, AtomRegisterState, AtomState, JointState, Level, TwoModeState};
use crate::large_field::{
    build_psi_pm, cat_target_state, disentanglement_time, predicted_atom_state, LargeFieldParams, Sign,
};
use crate::observables::{
    atomic_purity, husimi_q, mode_purity, reduced_register_atom, purity, Mode, QGrid, QWindow,
};
use crate::propagator::{evolve, evolve_register};
use crate::scalar::{cre, czero, norm_sqr_sum, Real};
use crate::state_prep::{photon_stats, prepare_mode, superpose_fock, ModeFamily};

/// Probability below which a measurement outcome is treated as impossible.
pub const IMPOSSIBLE_TOL: f64 = 1e-12;

/// A scalar protocol input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for ParamValue {
    fn from(x: f64) -> Self {
        ParamValue::Num(x)
    }
}

impl From<usize> for ParamValue {
    fn from(x: usize) -> Self {
        ParamValue::Int(x as i64)
    }
}

impl From<&str> for ParamValue {
    fn from(x: &str) -> Self {
        ParamValue::Text(x.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckOp {
    AtLeast,
    AtMost,
}

/// One pass/fail verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub op: CheckOp,
    pub bound: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, op: CheckOp, bound: f64) -> Self {
        let passed = match op {
            CheckOp::AtLeast => value >= bound,
            CheckOp::AtMost => value <= bound,
        };
        Self {
            name: name.into(),
            value,
            op,
            bound,
            passed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub name: String,
    pub inputs: BTreeMap<String, ParamValue>,
    pub outcome_probabilities: BTreeMap<String, f64>,
    pub fidelities: BTreeMap<String, f64>,
    pub intermediate_purities: BTreeMap<String, f64>,
    pub diagnostics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Wall time in seconds.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl ProtocolReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            ..Self::default()
        }
    }

    fn input(&mut self, key: &str, v: impl Into<ParamValue>) {
        self.inputs.insert(key.to_string(), v.into());
    }

    fn check(&mut self, name: impl Into<String>, value: f64, op: CheckOp, bound: f64) {
        self.checks.push(Check::new(name, value, op, bound));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

/// Applies a 2×2 unitary to the atomic factor:
/// `A' = u₀₀A + u₀₁B`, `B' = u₁₀A + u₁₁B`.
pub fn atom_pulse<T: Real>(state: &JointState<T>, u: &[[Complex<T>; 2]; 2]) -> Result<JointState<T>> {
    let mut dev = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            let g = u[0][i].conj() * u[0][j] + u[1][i].conj() * u[1][j];
            let id = if i == j { T::one() } else { T::zero() };
            dev = dev.max((g - cre(id)).norm());
        }
    }
    if dev > T::tol(1e-10) {
        return Err(Error::NonUnitary(f(dev)));
    }
    let (a, b) = (state.a(), state.b());
    let na = a.mapv(|z| z * u[0][0]) + &b.mapv(|z| z * u[0][1]);
    let nb = a.mapv(|z| z * u[1][0]) + &b.mapv(|z| z * u[1][1]);
    JointState::from_grids(na, nb)
}

/// `|a⟩ → (|a⟩+|b⟩)/√2`, `|b⟩ → (|a⟩−|b⟩)/√2`.
pub fn pi_half_pulse<T: Real>() -> [[Complex<T>; 2]; 2] {
    let h = cre(T::FRAC_1_SQRT_2());
    [[h, h], [h, -h]]
}

/// Projects the atom onto `outcome`; returns the renormalized field and
/// the outcome probability.
pub fn measure_atom<T: Real>(state: &JointState<T>, outcome: Level) -> Result<(TwoModeState<T>, T)> {
    let total = state.norm_sqr();
    let comp = state.component(outcome);
    let p = norm_sqr_sum(comp.iter()) / total;
    if p < T::lit(IMPOSSIBLE_TOL) {
        return Err(Error::ImpossibleOutcome {
            probability: f(p),
            tol: IMPOSSIBLE_TOL,
        });
    }
    Ok((TwoModeState::normalized(comp.clone())?, p))
}

/// Draws the measurement outcome from its probability with a seeded
/// generator, then collapses as [`measure_atom`].
pub fn sample_measurement<T: Real>(state: &JointState<T>, seed: u64) -> Result<(Level, TwoModeState<T>, T)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u: f64 = rng.random();
    let pa = f(norm_sqr_sum(state.a().iter()) / state.norm_sqr());
    let level = if u < pa { Level::A } else { Level::B };
    let (field, p) = measure_atom(state, level)?;
    Ok((level, field, p))
}

/// Label like `|0,3,a>`.
pub fn ket_label(n: usize, m: usize, level: Level) -> String {
    format!("|{n},{m},{}>", level.symbol())
}

/// Truth table of the photon-number phase gate: `(n, m, level, sign)`.
pub const PHASE_GATE_TABLE: [(usize, usize, Level, i8); 8] = [
    (0, 0, Level::A, 1),
    (0, 3, Level::A, -1),
    (3, 0, Level::A, 1),
    (3, 3, Level::A, 1),
    (0, 0, Level::B, 1),
    (0, 3, Level::B, 1),
    (3, 0, Level::B, -1),
    (3, 3, Level::B, 1),
];

const GATE_CUTOFF: usize = 5;

/// Phase gate on Fock inputs `{0,3}⊗{0,3}` at `gt = π/√3`.
pub fn run_phase_gate<T: Real>() -> Result<ProtocolReport> {
    let start = Instant::now();
    let mut rep = ProtocolReport::new("phase-gate");
    let gt = T::PI() / T::lit(3.0).sqrt();
    rep.input("gt", f(gt));
    rep.input("cutoff", GATE_CUTOFF);
    let tol = T::tol(1e-12);

    let inputs: Vec<JointState<T>> = PHASE_GATE_TABLE
        .iter()
        .map(|&(n, m, l, _)| JointState::basis(n, m, l, GATE_CUTOFF, GATE_CUTOFF))
        .collect::<Result<_>>()?;
    let outputs: Vec<JointState<T>> = inputs.iter().map(|s| evolve(s, gt)).collect::<Result<_>>()?;

    let mut max_dev = T::zero();
    let mut max_off = T::zero();
    for (i, &(n, m, l, sign)) in PHASE_GATE_TABLE.iter().enumerate() {
        let label = ket_label(n, m, l);
        let want = T::lit(sign as f64);
        let amp = inner_product(&inputs[i], &outputs[i])?;
        let dev = (amp - cre(want)).norm();
        max_dev = max_dev.max(dev);
        rep.fidelities.insert(format!("row {label}"), f(amp.norm_sqr()));
        rep.diagnostics.insert(format!("sign {label}"), f(amp.re));
        rep.check(format!("signed deviation {label}"), f(dev), CheckOp::AtMost, f(tol));
        for (k, other) in inputs.iter().enumerate() {
            if k != i {
                max_off = max_off.max(inner_product(other, &outputs[i])?.norm());
            }
        }
    }
    rep.diagnostics.insert("max_diagonal_deviation".into(), f(max_dev));
    rep.check("max off-diagonal element", f(max_off), CheckOp::AtMost, f(tol));
    rep.elapsed = Some(start.elapsed().as_secs_f64());
    Ok(rep)
}

/// Atom-as-target C-NOT with mode 1 in `|0⟩` or `|n′⟩` as control and
/// mode 2 in vacuum, at `gt = π/√n′`.
pub fn run_atomic_cnot<T: Real>(n_prime: usize) -> Result<ProtocolReport> {
    if n_prime == 0 {
        return Err(Error::InvalidParameter("n_prime must be at least 1".into()));
    }
    let start = Instant::now();
    let mut rep = ProtocolReport::new("cnot");
    let gt = T::PI() / T::from_usize_lossy(n_prime).sqrt();
    rep.input("n_prime", n_prime);
    rep.input("gt", f(gt));
    let tol = T::tol(1e-12);
    let (c1, c2) = (n_prime + 1, 2);
    let plus = AtomState::phi_plus(T::zero());
    let minus = AtomState::phi_minus(T::zero());
    let phi = |s: Sign| if s == Sign::Plus { &plus } else { &minus };
    for n in [0, n_prime] {
        for s in [Sign::Plus, Sign::Minus] {
            let flipped = if n == 0 {
                s
            } else if s == Sign::Plus {
                Sign::Minus
            } else {
                Sign::Plus
            };
            let input = joint_basis_with_atom(n, 0, phi(s), c1, c2)?;
            let target = joint_basis_with_atom(n, 0, phi(flipped), c1, c2)?;
            let out = evolve(&input, gt)?;
            let fid = inner_product(&target, &out)?.norm_sqr();
            let label = format!("|{n},0,phi{}>", s.symbol());
            rep.fidelities.insert(format!("row {label}"), f(fid));
            rep.check(format!("fidelity deficit {label}"), f(T::one() - fid), CheckOp::AtMost, f(tol));
        }
    }
    rep.elapsed = Some(start.elapsed().as_secs_f64());
    Ok(rep)
}

fn joint_basis_with_atom<T: Real>(n: usize, m: usize, atom: &AtomState<T>, c1: usize, c2: usize) -> Result<JointState<T>> {
    let mut a = Array2::from_elem((c1 + 1, c2 + 1), czero());
    let mut b = a.clone();
    a[(n, m)] = atom.gamma;
    b[(n, m)] = atom.delta;
    JointState::from_grids(a, b)
}

/// `(|0,1⟩ ∓ i|1,0⟩)/√2`, the field left after outcome `a` (upper sign) or `b`.
pub fn epr_target<T: Real>(outcome: Level) -> TwoModeState<T> {
    let h = T::FRAC_1_SQRT_2();
    let mut g = Array2::from_elem((2, 2), czero());
    g[(0, 1)] = cre(h);
    g[(1, 0)] = match outcome {
        Level::A => Complex::new(T::zero(), -h),
        Level::B => Complex::new(T::zero(), h),
    };
    TwoModeState::from_grid(g)
}

/// `|0,1,a⟩` for `gt = π/4`, a π/2 pulse, then an atomic measurement.
pub fn run_epr<T: Real>(outcome: Level) -> Result<(ProtocolReport, TwoModeState<T>)> {
    let start = Instant::now();
    let mut rep = ProtocolReport::new("epr");
    let gt = T::FRAC_PI_4();
    rep.input("outcome", outcome.symbol().to_string().as_str());
    rep.input("gt", f(gt));
    let tol = T::tol(1e-12);
    let s0 = JointState::basis(0, 1, Level::A, 1, 1)?;
    let pulsed = atom_pulse(&evolve(&s0, gt)?, &pi_half_pulse())?;
    let (fa, pa) = measure_atom(&pulsed, Level::A)?;
    let (fb, pb) = measure_atom(&pulsed, Level::B)?;
    rep.outcome_probabilities.insert("a".into(), f(pa));
    rep.outcome_probabilities.insert("b".into(), f(pb));
    let half = T::lit(0.5);
    rep.check("probability a", f((pa - half).abs()), CheckOp::AtMost, f(tol));
    rep.check("probability b", f((pb - half).abs()), CheckOp::AtMost, f(tol));
    rep.check("total probability", f((pa + pb - T::one()).abs()), CheckOp::AtMost, f(T::tol(1e-10)));
    let overlap = fa.inner_product(&fb)?.norm();
    rep.diagnostics.insert("conditional_overlap".into(), f(overlap));
    rep.check("conditional states orthogonal", f(overlap), CheckOp::AtMost, f(tol));

    let field = if outcome == Level::A { fa } else { fb };
    let target_name = if outcome == Level::A { "EPR-" } else { "EPR+" };
    let fid = field.fidelity(&epr_target(outcome))?;
    rep.fidelities.insert(target_name.into(), f(fid));
    rep.check(format!("fidelity deficit {target_name}"), f(T::one() - fid), CheckOp::AtMost, f(tol));
    rep.intermediate_purities.insert("mode1".into(), f(mode_purity(&field, Mode::One)));
    rep.elapsed = Some(start.elapsed().as_secs_f64());
    Ok((rep, field))
}

/// `(|0⟩ ± |3⟩)/√2` on the gate cutoff.
fn plus_minus_mode<T: Real>(sign: Sign) -> Result<crate::fock::ModeAmplitudes<T>> {
    let h = T::FRAC_1_SQRT_2();
    superpose_fock(&[(0, cre(h)), (3, cre(sign.value::<T>() * h))], GATE_CUTOFF)
}

/// Two atoms cross the field `|+,+⟩` one after the other, each for
/// `gt = π/√3`. Atom 0 starts in `(|a⟩ ± |b⟩)/√2`, atom 1 in `|a⟩`.
pub fn run_ghz<T: Real>(sign: Sign) -> Result<(ProtocolReport, AtomRegisterState<T>)> {
    run_ghz_ordered(sign, 0)
}

/// As [`run_ghz`] with the superposed atom at index `superposed` (0 or 1);
/// the other atom starts in `|a⟩`. The GHZ state forms between the modes
/// and the superposed atom while the other atom factors out.
pub fn run_ghz_ordered<T: Real>(sign: Sign, superposed: usize) -> Result<(ProtocolReport, AtomRegisterState<T>)> {
    if superposed > 1 {
        return Err(Error::InvalidParameter(format!("atom index {superposed} out of range")));
    }
    let start = Instant::now();
    let mut rep = ProtocolReport::new("ghz");
    let gt = T::PI() / T::lit(3.0).sqrt();
    rep.input("sign", sign.symbol().to_string().as_str());
    rep.input("superposed_atom", superposed);
    rep.input("gt", f(gt));

    let pp = plus_minus_mode::<T>(Sign::Plus)?;
    let mm = plus_minus_mode::<T>(Sign::Minus)?;
    let field = TwoModeState::product(&pp, &pp);
    let sup = if sign == Sign::Plus {
        AtomState::phi_plus(T::zero())
    } else {
        AtomState::phi_minus(T::zero())
    };
    let ground = AtomState::ground(Level::A);
    let atoms = if superposed == 0 { [sup, ground] } else { [ground, sup] };
    let reg0 = AtomRegisterState::product(&field, &atoms)?;
    let reg1 = evolve_register(&reg0, 0, gt)?;
    let reg2 = evolve_register(&reg1, 1, gt)?;

    let h = T::FRAC_1_SQRT_2();
    let s = sign.value::<T>();
    let (lab_a, lab_b) = if superposed == 0 { ("aa", "ba") } else { ("aa", "ab") };
    let mut target = BTreeMap::new();
    target.insert(lab_a.to_string(), field.grid().mapv(|z| z * h));
    let flipped = TwoModeState::product(&mm, &mm);
    target.insert(lab_b.to_string(), flipped.grid().mapv(|z| z * h * s));
    let target = AtomRegisterState::new(2, target)?;
    let fid = reg2.fidelity(&target)?;
    let name = format!("GHZ{}", sign.symbol());
    rep.fidelities.insert(name.clone(), f(fid));
    rep.check(format!("fidelity deficit {name}"), f(T::one() - fid), CheckOp::AtMost, f(T::tol(1e-10)));

    let spectator = 1 - superposed;
    let p_spec = purity(&reduced_register_atom(&reg2, spectator)?);
    let p_sup = purity(&reduced_register_atom(&reg2, superposed)?);
    rep.intermediate_purities.insert(format!("atom{spectator}"), f(p_spec));
    rep.intermediate_purities.insert(format!("atom{superposed}"), f(p_sup));
    rep.check(
        format!("atom{spectator} separable"),
        f((T::one() - p_spec).abs()),
        CheckOp::AtMost,
        f(T::tol(1e-10)),
    );
    rep.elapsed = Some(start.elapsed().as_secs_f64());
    Ok((rep, reg2))
}

/// Q-function sampling for [`run_cat`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QOptions {
    /// Half-width of the square window per mode; `None` uses
    /// `√n̄ + 4 n̄^{1/4}` with that mode's target mean.
    pub half_width: Option<f64>,
    pub resolution: usize,
}

impl Default for QOptions {
    fn default() -> Self {
        Self {
            half_width: None,
            resolution: 201,
        }
    }
}

pub fn default_q_half_width(nbar: f64) -> f64 {
    nbar.sqrt() + 4.0 * nbar.powf(0.25)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatConfig {
    pub nbar: f64,
    pub mbar: f64,
    pub mode1: ModeFamily,
    pub mode2: ModeFamily,
    pub j: usize,
    pub atom: Level,
    pub leak_tol: f64,
    pub q: Option<QOptions>,
}

impl CatConfig {
    pub fn coherent(nbar: f64, mbar: f64, j: usize, atom: Level) -> Self {
        Self {
            nbar,
            mbar,
            mode1: ModeFamily::Coherent,
            mode2: ModeFamily::Coherent,
            j,
            atom,
            leak_tol: 1e-12,
            q: None,
        }
    }

    pub fn squeezed(nbar: f64, mbar: f64, r1: f64, r2: f64, j: usize, atom: Level) -> Self {
        Self {
            mode1: ModeFamily::Squeezed { r: r1 },
            mode2: ModeFamily::Squeezed { r: r2 },
            ..Self::coherent(nbar, mbar, j, atom)
        }
    }
}

/// Everything [`run_cat`] produces.
#[derive(Debug, Clone)]
pub struct CatRun<T: Real> {
    pub report: ProtocolReport,
    pub gt: T,
    /// Exact joint state at `gt₀^(j)`.
    pub state: JointState<T>,
    /// Field after projecting the atom on its predicted final state.
    pub field: TwoModeState<T>,
    /// Keys `"<branch>/mode<k>"` with branch `psi+`, `psi-` or `joint`.
    pub q_grids: BTreeMap<String, QGrid<T>>,
}

fn family_inputs(rep: &mut ProtocolReport, idx: usize, fam: ModeFamily) {
    match fam {
        ModeFamily::Coherent => rep.input(&format!("family{idx}"), "coherent"),
        ModeFamily::Squeezed { r } => {
            rep.input(&format!("family{idx}"), "squeezed");
            rep.input(&format!("r{idx}"), r);
        }
    }
}

/// Evolves real-amplitude fields with the requested means to the `j`-th
/// disentanglement time and compares against the large-field predictions.
pub fn run_cat<T: Real>(cfg: &CatConfig) -> Result<CatRun<T>> {
    let start = Instant::now();
    let mut rep = ProtocolReport::new("cat");
    rep.input("nbar", cfg.nbar);
    rep.input("mbar", cfg.mbar);
    family_inputs(&mut rep, 1, cfg.mode1);
    family_inputs(&mut rep, 2, cfg.mode2);
    rep.input("j", cfg.j);
    rep.input("atom", cfg.atom.symbol().to_string().as_str());
    rep.input("leak_tol", cfg.leak_tol);

    let m1 = prepare_mode::<T>(cfg.mode1, cfg.nbar, cfg.leak_tol)?;
    let m2 = prepare_mode::<T>(cfg.mode2, cfg.mbar, cfg.leak_tol)?;
    rep.input("cutoff1", m1.cutoff());
    rep.input("cutoff2", m2.cutoff());
    let params = LargeFieldParams::from_modes(&m1, &m2, T::zero())?;
    let gt = disentanglement_time(&params, cfg.j)?;
    rep.diagnostics.insert("kappa".into(), f(params.kappa()));
    rep.diagnostics.insert("measured_nbar".into(), f(photon_stats(&m1).mean));
    rep.diagnostics.insert("measured_mbar".into(), f(photon_stats(&m2).mean));
    rep.diagnostics.insert("gt".into(), f(gt));

    let atom0 = AtomState::ground(cfg.atom);
    let s0 = crate::fock::make_joint_state(&m1, &m2, &atom0)?;
    let state = evolve(&s0, gt)?;
    rep.intermediate_purities.insert("atom".into(), f(atomic_purity(&state)));
    rep.intermediate_purities.insert("mode1".into(), f(mode_purity(&state, Mode::One)));
    rep.intermediate_purities.insert("mode2".into(), f(mode_purity(&state, Mode::Two)));
    let psi_p = build_psi_pm(&m1, &m2, Sign::Plus, gt);
    let psi_m = build_psi_pm(&m1, &m2, Sign::Minus, gt);
    rep.intermediate_purities.insert("psi+".into(), f(mode_purity(&psi_p, Mode::One)));
    rep.intermediate_purities.insert("psi-".into(), f(mode_purity(&psi_m, Mode::One)));

    let nu = cre(params.nbar().sqrt());
    let mu = cre(params.mbar().sqrt());
    let chi = predicted_atom_state(nu, mu, params.kappa(), cfg.j)?;
    let field_raw = state.a().mapv(|z| z * chi.gamma.conj()) + &state.b().mapv(|z| z * chi.delta.conj());
    let p_chi = norm_sqr_sum(field_raw.iter()) / state.norm_sqr();
    rep.outcome_probabilities.insert("predicted_atom".into(), f(p_chi));
    rep.outcome_probabilities.insert("orthogonal_atom".into(), f(T::one() - p_chi));
    rep.fidelities.insert("atom_vs_predicted".into(), f(p_chi));
    let field = TwoModeState::normalized(field_raw)?;
    let target = cat_target_state(nu, mu, params.kappa(), cfg.j, &atom0, (m1.cutoff(), m2.cutoff()))?;
    rep.fidelities.insert("field_vs_cat_target".into(), f(field.fidelity(&target)?));

    let mut q_grids = BTreeMap::new();
    if let Some(q) = cfg.q {
        let w1 = QWindow::square(T::lit(q.half_width.unwrap_or_else(|| default_q_half_width(cfg.nbar))));
        let w2 = QWindow::square(T::lit(q.half_width.unwrap_or_else(|| default_q_half_width(cfg.mbar))));
        rep.input("q_resolution", q.resolution);
        for (mode, w) in [(Mode::One, &w1), (Mode::Two, &w2)] {
            let k = mode.index();
            for (branch, src) in [("psi+", &psi_p), ("psi-", &psi_m)] {
                let grid = husimi_q(src, mode, w, q.resolution)?;
                let (alpha, _) = grid.argmax();
                rep.diagnostics.insert(format!("q_peak_angle/{branch}/mode{k}"), f(alpha.arg()));
                rep.diagnostics.insert(format!("q_peak_radius/{branch}/mode{k}"), f(alpha.norm()));
                q_grids.insert(format!("{branch}/mode{k}"), grid);
            }
            q_grids.insert(format!("joint/mode{k}"), husimi_q(&state, mode, w, q.resolution)?);
        }
    }
    rep.elapsed = Some(start.elapsed().as_secs_f64());
    Ok(CatRun {
        report: rep,
        gt,
        state,
        field,
        q_grids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_prep::coherent_amplitudes;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn pulse_basics() {
        let s = JointState::<f64>::basis(0, 0, Level::A, 2, 2).unwrap();
        let id = [[c(1.0), c(0.0)], [c(0.0), c(1.0)]];
        assert_eq!(atom_pulse(&s, &id).unwrap(), s);
        let p = atom_pulse(&s, &pi_half_pulse()).unwrap();
        assert_abs_diff_eq!(p.a()[(0, 0)].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(p.b()[(0, 0)].re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let pp = atom_pulse(&p, &pi_half_pulse()).unwrap();
        assert!(pp.max_abs_diff(&s).unwrap() < 1e-15);
        let bad = [[c(1.0), c(1.0)], [c(0.0), c(1.0)]];
        assert!(matches!(atom_pulse(&s, &bad), Err(Error::NonUnitary(_))));
    }

    #[test]
    fn measurement() {
        let s = JointState::<f64>::basis(0, 0, Level::A, 2, 2).unwrap();
        let (field, p) = measure_atom(&s, Level::A).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(field.grid()[(0, 0)], c(1.0));
        assert!(matches!(measure_atom(&s, Level::B), Err(Error::ImpossibleOutcome { .. })));
        // Global phase does not change the collapsed state up to that phase.
        let ph = Complex64::from_polar(1.0, 0.7);
        let (f2, p2) = measure_atom(&s.scaled(ph), Level::A).unwrap();
        assert_eq!(p2, 1.0);
        assert_abs_diff_eq!(f2.fidelity(&field).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn conditional_field_matches_direct_construction() {
        let m1 = coherent_amplitudes(c(2.0), 30, 1e-12).unwrap();
        let m2 = coherent_amplitudes(c(1.2), 25, 1e-12).unwrap();
        let s = crate::fock::make_joint_state(&m1, &m2, &AtomState::ground(Level::B)).unwrap();
        let gt = 1.3;
        let (field, _) = measure_atom(&evolve(&s, gt).unwrap(), Level::B).unwrap();
        let direct = Array2::from_shape_fn((31, 26), |(n, m)| {
            m1.amps()[n] * m2.amps()[m] * (gt * (((m + 1) * n) as f64).sqrt()).cos()
        });
        let direct = TwoModeState::normalized(direct).unwrap();
        assert!(1.0 - field.fidelity(&direct).unwrap() < 1e-10);
    }

    #[test]
    fn sampling_is_seeded() {
        let s = evolve(&JointState::<f64>::basis(0, 1, Level::A, 1, 1).unwrap(), std::f64::consts::FRAC_PI_4).unwrap();
        let a = sample_measurement(&s, 7).unwrap();
        let b = sample_measurement(&s, 7).unwrap();
        assert_eq!(a, b);
        let outcomes: Vec<Level> = (0..64).map(|seed| sample_measurement(&s, seed).unwrap().0).collect();
        assert!(outcomes.contains(&Level::A) && outcomes.contains(&Level::B));
    }

    #[test]
    fn phase_gate_report() {
        let rep = run_phase_gate::<f64>().unwrap();
        assert!(rep.passed(), "{:?}", rep.failed_checks().collect::<Vec<_>>());
        assert_eq!(rep.fidelities.len(), 8);
        assert_eq!(rep.diagnostics["sign |0,3,a>"].round(), -1.0);
        assert_eq!(rep.diagnostics["sign |3,0,b>"].round(), -1.0);
        assert_eq!(rep.diagnostics["sign |3,3,a>"].round(), 1.0);
    }

    #[test]
    fn cnot_reports() {
        for n in [1, 4, 9] {
            let rep = run_atomic_cnot::<f64>(n).unwrap();
            assert!(rep.passed(), "n'={n}: {:?}", rep.failed_checks().collect::<Vec<_>>());
            assert_eq!(rep.fidelities.len(), 4);
        }
        assert!(run_atomic_cnot::<f64>(0).is_err());
    }

    #[test]
    fn epr_reports() {
        for outcome in [Level::A, Level::B] {
            let (rep, field) = run_epr::<f64>(outcome).unwrap();
            assert!(rep.passed());
            let total: f64 = rep.outcome_probabilities.values().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(mode_purity(&field, Mode::One), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn ghz_reports_both_orders() {
        for sign in [Sign::Plus, Sign::Minus] {
            for order in [0, 1] {
                let (rep, _) = run_ghz_ordered::<f64>(sign, order).unwrap();
                assert!(rep.passed(), "{sign:?} {order}: {:?}", rep.failed_checks().collect::<Vec<_>>());
                assert_abs_diff_eq!(rep.intermediate_purities[&format!("atom{order}")], 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn report_round_trips_through_serde() {
        let rep = run_atomic_cnot::<f64>(4).unwrap();
        assert!(rep.elapsed.is_some());
        let _ = format!("{rep:?}");
        let p: ParamValue = 3usize.into();
        assert_eq!(p, ParamValue::Int(3));
    }

    #[test]
    fn small_cat_run() {
        let mut cfg = CatConfig::coherent(30.0, 10.0, 0, Level::A);
        cfg.q = Some(QOptions {
            half_width: None,
            resolution: 41,
        });
        let run = run_cat::<f64>(&cfg).unwrap();
        let rep = &run.report;
        assert_abs_diff_eq!(rep.diagnostics["kappa"], 3.0, epsilon = 1e-6);
        assert!(rep.intermediate_purities["atom"] > 0.8);
        assert!(run.q_grids.contains_key("psi+/mode1"));
        assert!(rep.diagnostics["q_peak_angle/psi+/mode1"] > 0.0);
        assert!(rep.diagnostics["q_peak_angle/psi-/mode2"] < 0.0);
        let total: f64 = rep.outcome_probabilities.values().sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        let same = CatConfig::coherent(10.0, 10.0, 0, Level::A);
        assert!(matches!(run_cat::<f64>(&same), Err(Error::KappaIsOne(_))));
    }
}
