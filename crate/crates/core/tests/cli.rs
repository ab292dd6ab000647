use std::path::Path;
use std::process::{Command, Output};

fn cli(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tweezerforge")).args(args).current_dir(dir).output().expect("spawn cli")
}

fn summary(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("one JSON summary line")
}

fn first_line(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn help_and_version_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--help"][..], &["--version"], &["rearrange", "plan", "--help"], &["pa", "spectrum", "--help"]] {
        assert_eq!(cli(args, dir.path()).status.code(), Some(0), "{args:?}");
    }
    let help = String::from_utf8(cli(&["rearrange", "simulate", "--help"], dir.path()).stdout).unwrap();
    for flag in ["--trials", "--seed", "--trajectory", "--loss", "--activation-radius", "--out-dir", "--force"] {
        assert!(help.contains(flag), "missing {flag}");
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["nonsense"][..], &["rearrange", "plan", "--bogus"], &["pa", "spectrum", "--window", "0,-5"]] {
        let out = cli(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = cli(&["imaging", "modelfree", "--input", "missing.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    let out = cli(&["qubit", "simulate", "--preset", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = tempfile::tempdir().unwrap();
    summary(&cli(&["qubit", "presets"], dir.path()));
    let before = std::fs::read(dir.path().join("presets.json")).unwrap();
    let out = cli(&["qubit", "presets"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(std::fs::read(dir.path().join("presets.json")).unwrap(), before);
    summary(&cli(&["qubit", "presets", "--force"], dir.path()));
}

#[test]
fn pa_files_have_the_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&cli(&["pa", "spectrum", "--Te", "1/2", "--window", "-300,-200"], dir.path()));
    assert_eq!(s["command"], "pa spectrum");
    assert_eq!(first_line(&dir.path().join("spectrum.csv")), "Te,E_MHz,nodes");
    summary(&cli(&["pa", "potentials", "--r-min", "20", "--r-max", "40"], dir.path()));
    assert_eq!(first_line(&dir.path().join("potentials.csv")), "R_a0,V_MHz,curve,Te,omega");
    let s = summary(&cli(&["pa", "lb"], dir.path()));
    assert!((s["density_ratio"].as_f64().unwrap() - 30f64.powf(2.0 / 3.0)).abs() < 1e-12, "{s}");
}

#[test]
fn rearrange_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("state.txt"), "12.\n.21\n2.1\n").unwrap();
    std::fs::write(dir.path().join("target.txt"), "12.\n21.\n...\n").unwrap();
    let s = summary(&cli(
        &["rearrange", "plan", "--state", "state.txt", "--target", "target.txt", "--pitch", "5"],
        dir.path(),
    ));
    assert_eq!(s["reaches_target"], true, "{s}");
    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["predicted"]["grid"][0].as_str().unwrap().get(..2), Some("12"));
    let s = summary(&cli(
        &["rearrange", "simulate", "--state", "state.txt", "--target", "target.txt", "--seed", "3"],
        dir.path(),
    ));
    assert_eq!(s["success"], true, "{s}");
}

#[test]
fn imaging_chain_from_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    summary(&cli(&["imaging", "synth", "--kind", "counts", "--n", "50000", "--seed", "2"], dir.path()));
    let s = summary(&cli(&["imaging", "fit", "--input", "counts.csv"], dir.path()));
    assert!((s["fidelity"].as_f64().unwrap() - 0.9985).abs() < 1e-3, "{s}");
    summary(&cli(&["imaging", "synth", "--kind", "triples", "--sites", "50", "--shots", "100"], dir.path()));
    assert_eq!(first_line(&dir.path().join("triples.csv")), "site,shot,b1,b2,b3");
    let s = summary(&cli(&["imaging", "modelfree", "--input", "triples.csv"], dir.path()));
    assert_eq!(s["records"], 5000);
}

#[test]
fn qubit_simulate_then_fit() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&cli(
        &["qubit", "simulate", "--preset", "ramsey-399", "--trajectories", "400", "--emit-plotdata", "plots"],
        dir.path(),
    ));
    assert!(s["fit"]["T2"].as_f64().is_some(), "{s}");
    assert!(dir.path().join("plots/contrast_fit.csv").exists());
    assert_eq!(first_line(&dir.path().join("contrast.csv")), "T_s,contrast,stderr");
    let s = summary(&cli(&["qubit", "fit", "--input", "contrast.csv"], dir.path()));
    assert!((s["fit"]["T2"].as_f64().unwrap() - 0.077).abs() < 0.02, "{s}");
}

#[test]
fn units_convert_prints_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = summary(&cli(&["units", "convert", "--value", "1", "--from", "hartree", "--to", "MHz"], dir.path()));
    assert!((s["result"].as_f64().unwrap() / 6.579_683_920_502e9 - 1.0).abs() < 1e-9, "{s}");
}
