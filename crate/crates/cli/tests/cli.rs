use serde_json::Value;
use std::process::{Command, Output};

fn ltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltlab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = ltlab(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn constants_document() {
    let doc = json(&["constants", "--gamma", "1", "--dim", "3"]);
    assert_eq!(doc["command"], "constants");
    assert_eq!(doc["config"]["command"]["dim"], 3);
    let list = doc["result"]["constants"].as_array().unwrap();
    let find = |n: &str| list.iter().find(|c| c["name"] == n).unwrap();
    let lcl = find("L^cl")["value"].as_f64().unwrap();
    assert!((lcl - 2.0 / (5.0 * 6.0 * std::f64::consts::PI.powi(2))).abs() < 1e-15);
    assert!(list.iter().all(|c| c["tag"].is_string()));
    assert_eq!(find("literature[0]")["direction"], "upper_bound");
    assert_eq!(find("K dual of literature[0]")["direction"], "lower_bound");
}

#[test]
fn rumin_reference_trial() {
    let doc = json(&["rumin", "--reference-trial", "--dim", "1"]);
    let v = doc["result"]["value"]["value"].as_f64().unwrap();
    assert!(v <= 0.747112 && v > 0.7469, "{v}");
    assert!(doc["result"]["value"]["abs_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn rumin_trial_file() {
    let dir = std::env::temp_dir().join(format!("ltlab-trial-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trial.json");
    std::fs::write(&path, r#"{"f":{"family":"power","params":[4.5,0.25]},"w":{"family":"cutoff","params":[0.36,2.1]}}"#).unwrap();
    let a = json(&["rumin", "--trial", path.to_str().unwrap()]);
    let b = json(&["rumin", "--paper-trial"]);
    assert_eq!(a["result"], b["result"]);
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(code(&ltlab(&["rumin", "--trial", path.to_str().unwrap()])), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&ltlab(&["constants", "--gamma", "1"])), 64);
    assert_eq!(code(&ltlab(&["constants", "--gamma", "x", "--dim", "1"])), 64);
    assert_eq!(code(&ltlab(&["constants", "--gamma", "1", "--dim", "1", "--bogus"])), 64);
    assert_eq!(code(&ltlab(&["nonsense"])), 64);
    assert_eq!(code(&ltlab(&["spectrum", "--potential", "gaussian depth=1 colour=red"])), 64);
    assert_eq!(code(&ltlab(&["verify-all", "--only", "12"])), 64);
    assert_eq!(code(&ltlab(&["rumin", "--paper-trial", "--trial", "x.json"])), 64);
    // γ < 1/2 is outside the valid range in one dimension
    assert_eq!(code(&ltlab(&["constants", "--gamma", "0.25", "--dim", "1"])), 1);
    assert_eq!(code(&ltlab(&["gamma-c", "--dim", "9"])), 1);
    assert_eq!(code(&ltlab(&["--help"])), 0);
}

#[test]
fn injected_failure_is_reported() {
    let out = ltlab(&["verify-all", "--only", "3", "--tol", "sphere.a0_d3=-1"]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| !l.starts_with('#') && l.contains("sphere.a0_d3")).unwrap();
    assert!(line.contains("4.618802153517") && line.contains("false"), "{line}");
    assert!(text.contains("criterion 3: FAIL"));

    let out = ltlab(&["verify-all", "--only", "3,9", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["failures"], 0);
    let first = &doc["result"]["criteria"][0];
    for key in ["id", "title", "checks", "error", "pass"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert!(first.get("timings").is_none());
}

#[test]
fn json_is_deterministic() {
    for args in [
        vec!["verify-all", "--only", "3,7,9", "--format", "json"],
        vec!["spectrum", "--potential", "poschl_teller nu=2", "--gamma", "0.5,1,1.5", "--format", "json"],
        vec!["rumin", "--paper-trial", "--format", "json", "--seed", "7"],
        vec!["sphere", "--dim", "5", "--format", "json"],
    ] {
        let a = ltlab(&args);
        let b = ltlab(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let seq = ltlab(&["spectrum", "--potential", "poschl_teller nu=2", "--format", "json", "--sequential"]);
    let par = ltlab(&["spectrum", "--potential", "poschl_teller nu=2", "--format", "json"]);
    let pick = |o: &Output| serde_json::from_slice::<Value>(&o.stdout).unwrap()["result"].clone();
    assert_eq!(pick(&seq), pick(&par));
}

#[test]
fn csv_outputs() {
    let out = ltlab(&["ground-state", "--dim", "1", "--p", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut data = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(data.next(), Some("r,Q"));
    let first: Vec<f64> = data.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 3f64.powf(0.25)).abs() < 1e-9);

    let out = ltlab(&["sphere", "--dim", "3", "--l-max", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "d,L,nu_L,N_leq,a_L,running_sup");
    assert!(data[2].starts_with("3,1,4,5,"));

    let out = ltlab(&["constants", "--gamma", "2", "--dim", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "name,value,tag,direction,provenance"));
}

#[test]
fn tabulated_potential_from_file() {
    let dir = std::env::temp_dir().join(format!("ltlab-tab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("well.csv");
    std::fs::write(&path, "x,v\n-1,0\n-0.999,-1\n0.999,-1\n1,0\n").unwrap();
    let spec = format!("tabulated file={}", path.display());
    let doc = json(&["spectrum", "--potential", &spec, "--half-width", "12", "--step", "0.002"]);
    let e0 = doc["result"]["spectrum"]["eigenvalues"][0].as_f64().unwrap();
    // close to the unit square well of half-width 1
    assert!((e0 + 0.4537).abs() < 5e-3, "{e0}");
}

#[test]
fn stability_and_chain() {
    let doc = json(&["stability", "--electrons", "2", "--nuclei", "1", "--charge", "2", "--chain"]);
    let r = &doc["result"];
    assert!(r["bound"].as_f64().unwrap() < 0.0);
    assert_eq!(r["chain"]["passes"], true);
    assert_eq!(r["k3"]["direction"], "lower_bound");
    let conj = json(&["stability", "--electrons", "2", "--nuclei", "1", "--charge", "2", "--k3", "conjectured"]);
    assert_eq!(conj["result"]["k3"]["tag"], "conjectured");
    assert!(conj["result"]["bound"].as_f64().unwrap() > r["bound"].as_f64().unwrap());
}

#[test]
fn experiment_subcommands() {
    let mono = json(&["monotonicity", "--gamma", "2", "--dim", "2"]);
    assert_eq!(mono["result"]["increases"], 0);
    let tb = json(&["two-bump", "--separations", "4,6"]);
    let one = tb["result"]["one_particle"].as_f64().unwrap();
    assert!(tb["result"]["rows"].as_array().unwrap().iter().all(|r| r["ratio"].as_f64().unwrap() > one));
    let w = json(&["weyl", "--potential", "gaussian depth=1 width=1", "--couplings", "100"]);
    assert!((w["result"]["rows"][0]["ratio"].as_f64().unwrap() - 1.0).abs() < 0.01);
    let g = json(&["gamma-c", "--dim", "1"]);
    assert!((g["result"]["gamma_c"].as_f64().unwrap() - 1.5).abs() < 1e-9);
}
