use std::io::Write;
use std::time::Instant;

use log::info;
use raman_cqed::large_field::{approx_fidelity, disentanglement_time_for_kappa};
use raman_cqed::protocols::default_q_half_width;
use raman_cqed::sweep::{atomic_purity_sweep, conditional_purity_sweep, psi_plus_purity_sweep, time_grid};
use raman_cqed::{
    build_psi_pm, disentanglement_time, husimi_q, make_joint_state, prepare_mode, revival_times, run_atomic_cnot,
    run_cat, run_epr, run_ghz_ordered, run_phase_gate, AtomState, CatConfig, Error, LargeFieldParams64,
    Mode, ModeAmplitudes64, ProtocolReport, QWindow, Sign,
};
use serde_json::json;

use crate::config::Config;
use crate::error::CliError;
use crate::output::{csv_header, num, params_json, write_json, Target, VERSION};

/// Process-level switches that are not part of the scenario.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunFlags {
    pub force: bool,
    pub timing: bool,
}

fn modes(cfg: &Config) -> Result<(ModeAmplitudes64, ModeAmplitudes64), CliError> {
    let tol = cfg.f64("cutoff.leak_tol")?;
    let (f1, n1) = cfg.mode(1)?;
    let (f2, n2) = cfg.mode(2)?;
    Ok((prepare_mode(f1, n1, tol)?, prepare_mode(f2, n2, tol)?))
}

fn mode_resolved(m1: &ModeAmplitudes64, m2: &ModeAmplitudes64) -> Vec<(String, String)> {
    let s1 = raman_cqed::photon_stats(m1);
    let s2 = raman_cqed::photon_stats(m2);
    vec![
        ("cutoff1".into(), m1.cutoff().to_string()),
        ("cutoff2".into(), m2.cutoff().to_string()),
        ("mean1".into(), num(s1.mean)),
        ("mean2".into(), num(s2.mean)),
    ]
}

fn gt_max(cfg: &Config) -> Result<f64, CliError> {
    let g = cfg.f64("sweep.gt_max")?;
    if g < 0.0 {
        return Err(CliError::Usage("sweep.gt_max: must be non-negative".into()));
    }
    Ok(g)
}

pub fn purity_sweep(cfg: &Config, flags: RunFlags) -> Result<(), CliError> {
    let target = Target::resolve(cfg.get("out.path"), flags.force)?;
    let start = Instant::now();
    let (m1, m2) = modes(cfg)?;
    let gts = time_grid(gt_max(cfg)?, cfg.usize("sweep.steps")?);
    let kind = cfg.get("sweep.kind");
    let mut resolved = mode_resolved(&m1, &m2);

    let markers = cfg.bool("sweep.markers")?;
    let params = if markers || kind == "approx" {
        let p = LargeFieldParams64::from_modes(&m1, &m2, 0.0)?;
        resolved.push(("kappa".into(), num(p.kappa())));
        Some(p)
    } else {
        None
    };
    if let Some(params) = params.as_ref().filter(|_| markers) {
        let last = *gts.last().unwrap_or(&0.0);
        for j in 0.. {
            let t = disentanglement_time(&params, j)?;
            if t > last {
                break;
            }
            resolved.push((format!("marker.gt0_{j}"), num(t)));
        }
    }

    let (columns, rows): (&str, Vec<Vec<f64>>) = match kind {
        "atomic" => {
            let s0 = make_joint_state(&m1, &m2, &AtomState::ground(cfg.level("atom.init")?))?;
            let p = atomic_purity_sweep(&s0, &gts)?;
            ("gt,atomic_purity", gts.iter().zip(p).map(|(&t, p)| vec![t, p]).collect())
        }
        "mode" => {
            let pp = psi_plus_purity_sweep(&m1, &m2, &gts);
            let pc = conditional_purity_sweep(&m1, &m2, &gts)?;
            (
                "gt,mode_purity_psi_plus,mode_purity_conditional",
                (0..gts.len()).map(|i| vec![gts[i], pp[i], pc[i]]).collect(),
            )
        }
        "approx" => {
            let params = params.expect("computed for approx");
            let nu = num_complex::Complex64::new(params.nbar().sqrt(), 0.0);
            let mu = num_complex::Complex64::new(params.mbar().sqrt(), 0.0);
            let rows = gts
                .iter()
                .map(|&t| Ok(vec![t, approx_fidelity(&m1, &m2, nu, mu, params.kappa(), Sign::Plus, t)?]))
                .collect::<Result<Vec<_>, Error>>()?;
            ("gt,fidelity", rows)
        }
        other => {
            return Err(CliError::Usage(format!(
                "sweep.kind: expected atomic, mode or approx, got {other:?}"
            )))
        }
    };

    note_elapsed(start, flags, &mut resolved);
    let mut out = target.open()?;
    csv_header(&mut *out, "purity-sweep", cfg, &resolved)?;
    writeln!(out, "{columns}")?;
    for row in rows {
        let line: Vec<String> = row.into_iter().map(num).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn q_half_width(cfg: &Config, nbar: f64) -> Result<f64, CliError> {
    match cfg.get("q.window") {
        // Wide enough for a single coherent blob and never narrower than the vacuum.
        "auto" => Ok(default_q_half_width(nbar).max(3.0)),
        _ => {
            let h = cfg.f64("q.window")?;
            if h <= 0.0 {
                return Err(CliError::Usage("q.window: must be positive or auto".into()));
            }
            Ok(h)
        }
    }
}

pub fn qfunc(cfg: &Config, flags: RunFlags) -> Result<(), CliError> {
    let target = Target::resolve(cfg.get("out.path"), flags.force)?;
    let start = Instant::now();
    let (m1, m2) = modes(cfg)?;
    let resolution = cfg.usize("q.resolution")?;
    let hw = [q_half_width(cfg, cfg.mode(1)?.1)?, q_half_width(cfg, cfg.mode(2)?.1)?];
    let mut resolved = mode_resolved(&m1, &m2);
    resolved.push(("q.half_width1".into(), num(hw[0])));
    resolved.push(("q.half_width2".into(), num(hw[1])));

    let mut times = vec![0.0];
    match cfg.get("q.times") {
        "initial" => {}
        "both" => {
            let params = LargeFieldParams64::from_modes(&m1, &m2, 0.0)?;
            let gt0 = disentanglement_time(&params, cfg.usize("disentanglement.j")?)?;
            resolved.push(("kappa".into(), num(params.kappa())));
            resolved.push(("gt0".into(), num(gt0)));
            times.push(gt0);
        }
        other => return Err(CliError::Usage(format!("q.times: expected both or initial, got {other:?}"))),
    }

    let mut blocks = Vec::new();
    for &gt in &times {
        for sign in [Sign::Plus, Sign::Minus] {
            let psi = build_psi_pm(&m1, &m2, sign, gt);
            for (k, mode) in [(1, Mode::One), (2, Mode::Two)] {
                info!("Q grid: gt={gt} branch={} mode={k}", sign.symbol());
                let grid = husimi_q(&psi, mode, &QWindow::square(hw[k - 1]), resolution)?;
                blocks.push((gt, sign, k, grid));
            }
        }
    }

    note_elapsed(start, flags, &mut resolved);
    let mut out = target.open()?;
    csv_header(&mut *out, "qfunc", cfg, &resolved)?;
    writeln!(out, "re,im,q,mode,branch,gt")?;
    for (gt, sign, k, grid) in &blocks {
        let gt = num(*gt);
        for (i, &im) in grid.im_axis.iter().enumerate() {
            for (j, &re) in grid.re_axis.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{k},psi{},{gt}",
                    num(re),
                    num(im),
                    num(grid.values[(i, j)]),
                    sign.symbol()
                )?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn parse_sign(cfg: &Config) -> Result<Sign, CliError> {
    match cfg.get("ghz.sign") {
        "+" | "plus" => Ok(Sign::Plus),
        "-" | "minus" => Ok(Sign::Minus),
        v => Err(CliError::Usage(format!("ghz.sign: expected + or -, got {v:?}"))),
    }
}

pub const PROTOCOLS: &[&str] = &["phase-gate", "cnot", "epr", "ghz", "cat"];

pub fn protocol(name: &str, cfg: &Config, flags: RunFlags) -> Result<(), CliError> {
    let target = Target::resolve(cfg.get("out.path"), flags.force)?;
    let mut report: ProtocolReport = match name {
        "phase-gate" => run_phase_gate::<f64>()?,
        "cnot" => run_atomic_cnot::<f64>(cfg.usize("cnot.n_prime")?)?,
        "epr" => run_epr::<f64>(cfg.level("epr.outcome")?)?.0,
        "ghz" => run_ghz_ordered::<f64>(parse_sign(cfg)?, cfg.usize("ghz.order")?)?.0,
        "cat" => {
            let (mode1, nbar) = cfg.mode(1)?;
            let (mode2, mbar) = cfg.mode(2)?;
            let cat = CatConfig {
                mode1,
                mode2,
                leak_tol: cfg.f64("cutoff.leak_tol")?,
                ..CatConfig::coherent(nbar, mbar, cfg.usize("disentanglement.j")?, cfg.level("atom.init")?)
            };
            run_cat::<f64>(&cat)?.report
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown protocol {other:?}; expected one of {}",
                PROTOCOLS.join(", ")
            )))
        }
    };
    if !flags.timing {
        if let Some(t) = report.elapsed.take() {
            eprintln!("elapsed: {t:.3} s");
        }
    }
    let passed = report.passed();
    let failed: Vec<String> = report.failed_checks().map(|c| c.name.clone()).collect();
    let doc = json!({
        "version": VERSION,
        "command": "protocol",
        "params": params_json(cfg),
        "report": serde_json::to_value(&report).map_err(|e| CliError::Io(e.into()))?,
    });
    write_json(&target, &doc)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

pub fn times(cfg: &Config, flags: RunFlags) -> Result<(), CliError> {
    let target = Target::resolve(cfg.get("out.path"), flags.force)?;
    let kappa = cfg.f64("times.kappa")?;
    if kappa <= 0.0 {
        return Err(CliError::Usage("times.kappa: must be positive".into()));
    }
    let j_max = cfg.usize("times.j_max")?;
    let (k, l) = (cfg.u32("times.k")?, cfg.u32("times.l")?);
    let count = cfg.usize("times.revivals")?;

    let mut dis = Vec::new();
    let mut kappa_is_one = false;
    for j in 0..=j_max {
        match disentanglement_time_for_kappa(kappa, j) {
            Ok(t) => dis.push(t),
            Err(Error::KappaIsOne(_)) => {
                kappa_is_one = true;
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let (kappa_kl, period) = revival_times::<f64>(k, l)?;
    let revivals: Vec<f64> = (1..=count).map(|q| q as f64 * period).collect();

    let mut dis_obj = json!({ "kappa_is_one": kappa_is_one, "times": dis });
    if kappa_is_one {
        dis_obj["note"] = json!("kappa = 1: the atom never disentangles, no times emitted");
    }
    let doc = json!({
        "version": VERSION,
        "command": "times",
        "params": params_json(cfg),
        "disentanglement": dis_obj,
        "revival": { "kappa": kappa_kl, "period": period, "times": revivals },
    });
    write_json(&target, &doc)
}

/// Wall time goes to the header only with `--timing`, so reruns without it
/// stay byte-identical.
fn note_elapsed(start: Instant, flags: RunFlags, resolved: &mut Vec<(String, String)>) {
    let t = start.elapsed().as_secs_f64();
    if flags.timing {
        resolved.push(("elapsed_s".into(), format!("{t:.3}")));
    } else {
        eprintln!("elapsed: {t:.3} s");
    }
}
