use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn raman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_stdout(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

/// Data rows of a CSV file (comments and the column header dropped).
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn run_to(path: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", path.to_str().unwrap()]);
    raman(&all)
}

#[test]
fn times_matches_closed_forms() {
    let o = raman(&["times", "--kappa", "3", "--j-max", "2", "--k", "1", "--l", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    let dis: Vec<f64> = serde_json::from_value(v["disentanglement"]["times"].clone()).unwrap();
    for (got, want) in dis.iter().zip([2.7207, 8.1621, 13.6035]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }
    let rev: Vec<f64> = serde_json::from_value(v["revival"]["times"].clone()).unwrap();
    assert!((rev[0] - 10.8828).abs() < 1e-4 && (rev[1] - 21.7656).abs() < 1e-4);
    assert_eq!(v["params"]["times.kappa"], "3");
}

#[test]
fn times_with_kappa_one_flags_and_still_lists_revivals() {
    let v = json_stdout(&raman(&["times", "--kappa", "1"]));
    assert_eq!(v["disentanglement"]["kappa_is_one"], true);
    assert_eq!(v["disentanglement"]["times"].as_array().unwrap().len(), 0);
    assert!(!v["revival"]["times"].as_array().unwrap().is_empty());
}

#[test]
fn zero_length_sweep_is_one_pure_row() {
    let o = raman(&["purity-sweep", "--nbar1", "10", "--mbar2", "4", "--gt-max", "0"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l == "gt,atomic_purity"));
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert!((r[0][1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_reruns_are_byte_identical_and_record_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["purity-sweep", "--nbar1", "12", "--mbar2", "4", "--gt-max", "3", "--steps", "30", "--kind", "mode"];
    assert_eq!(code(&run_to(&a, &args)), 0);
    assert_eq!(code(&run_to(&b, &args)), 0);
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.contains("# param state1.nbar=12\n"));
    assert!(text.contains("# param sweep.kind=mode\n"));
    assert!(text.contains("gt,mode_purity_psi_plus,mode_purity_conditional\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 31);
    assert!(r.iter().all(|row| row.len() == 3));
}

#[test]
fn existing_output_needs_force() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.json");
    std::fs::write(&p, "keep").unwrap();
    let o = run_to(&p, &["times"]);
    assert_eq!(code(&o), 2);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "keep");
    let o = run_to(&p, &["times", "--force"]);
    assert_eq!(code(&o), 0);
    assert!(std::fs::read_to_string(&p).unwrap().ends_with("}\n"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    std::fs::write(&cfg, "# test\ntimes.kappa = 2\ntimes.j_max = 0\n").unwrap();
    let v = json_stdout(&raman(&["times", "--config", cfg.to_str().unwrap(), "--kappa", "3"]));
    assert_eq!(v["params"]["times.kappa"], "3");
    assert_eq!(v["disentanglement"]["times"].as_array().unwrap().len(), 1);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "state3.nbar = 1\n").unwrap();
    assert_eq!(code(&raman(&["times", "--config", cfg.to_str().unwrap()])), 2);
    assert_eq!(code(&raman(&["times", "--set", "nope=1"])), 2);
    assert_eq!(code(&raman(&["protocol", "cnot", "--n-prime", "0"])), 2);
    assert_eq!(code(&raman(&["protocol", "teleport"])), 2);
    assert_eq!(code(&raman(&["no-such-command"])), 2);
    assert_eq!(
        code(&raman(&["purity-sweep", "--nbar1", "8", "--mbar2", "8", "--markers", "--gt-max", "1"])),
        2
    );
}

#[test]
fn epr_report_has_unit_fidelity() {
    let o = raman(&["protocol", "epr", "--outcome", "a"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_stdout(&o);
    assert_eq!(v["report"]["name"], "epr");
    assert!(v["report"].get("elapsed").is_none());
    let fids = v["report"]["fidelities"].as_object().unwrap();
    assert!(!fids.is_empty());
    for (k, f) in fids {
        assert!((f.as_f64().unwrap() - 1.0).abs() < 1e-10, "{k}: {f}");
    }
}

#[test]
fn timing_flag_adds_elapsed() {
    let v = json_stdout(&raman(&["protocol", "phase-gate", "--timing"]));
    assert!(v["report"]["elapsed"].is_number());
    assert_eq!(v["report"]["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == true).count(),
        v["report"]["checks"].as_array().unwrap().len());
}

#[test]
fn vacuum_q_function_peaks_at_one() {
    let o = raman(&[
        "qfunc", "--nbar1", "0", "--mbar2", "0", "--q-times", "initial", "--q-resolution", "21",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("re,im,q,mode,branch,gt\n"));
    let r = rows(&text);
    assert_eq!(r.len(), 21 * 21 * 4);
    let at_origin: Vec<f64> = r
        .iter()
        .filter(|row| row[0].parse::<f64>().unwrap().abs() < 1e-9 && row[1].parse::<f64>().unwrap().abs() < 1e-9)
        .map(|row| row[2].parse().unwrap())
        .collect();
    assert_eq!(at_origin.len(), 4);
    assert!(at_origin.iter().all(|q| (q - 1.0).abs() < 1e-12));
}

#[test]
fn qfunc_splits_after_disentanglement() {
    let o = raman(&["qfunc", "--nbar1", "30", "--mbar2", "10", "--q-resolution", "41"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("# resolved gt0="));
    let r = rows(&text);
    assert_eq!(r.len(), 41 * 41 * 8);
    let branches: std::collections::BTreeSet<_> = r.iter().map(|row| row[4].clone()).collect();
    assert_eq!(branches.into_iter().collect::<Vec<_>>(), ["psi+", "psi-"]);
}
