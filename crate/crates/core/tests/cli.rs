use taxdelay::cli::run;

const BASE: &[&str] = &["--c", "1.2", "--lambda", "1", "--mu", "1", "--q", "0.05", "--ell", "0.1"];

fn call<S: AsRef<str>>(args: &[S]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("taxdelay").chain(args.iter().map(AsRef::as_ref));
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_base(sub: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(sub).chain(BASE.iter().copied()).chain(extra.iter().copied()).map(String::from).collect()
}

fn row(csv: &str, line: usize) -> Vec<String> {
    csv.lines().nth(line).unwrap().split(',').map(str::to_string).collect()
}

#[test]
fn optimize_terminal_interior() {
    let (code, out, err) = call(&with_base("optimize", &["--S", "-5"]));
    assert_eq!(code, 0, "{err}");
    assert_eq!(row(&out, 0), ["mode", "threshold", "boundary_case", "value", "h_residual", "iterations"]);
    let r = row(&out, 1);
    assert_eq!(r[0], "terminal");
    assert_eq!(r[2], "false");
    let b: f64 = r[1].parse().unwrap();
    assert!((b - 0.522859).abs() < 1e-5, "{b}");
}

#[test]
fn optimize_json_is_a_single_object() {
    let (code, out, _) = call(&with_base("optimize", &["--mode", "injection", "--varphi", "1.5", "--format", "json"]));
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["mode"], "injection");
    assert_eq!(v["boundary_case"], false);
    assert!(v["threshold"].as_f64().unwrap() > 0.0);
}

#[test]
fn precision_controls_digits() {
    let (_, out, _) = call(&with_base("optimize", &["--S", "-5", "--precision", "3"]));
    assert_eq!(row(&out, 1)[1], "0.523");
    let (code, _, _) = call(&with_base("optimize", &["--S", "-5", "--precision", "0"]));
    assert_eq!(code, 2);
}

#[test]
fn invalid_input_exits_2() {
    // Missing --mu.
    let (code, _, err) = call(&["optimize", "--c", "1.2", "--lambda", "1", "--q", "0.05", "--ell", "0.1"]);
    assert_eq!(code, 2);
    assert!(err.contains("--mu"), "{err}");
    assert_eq!(call(&with_base("optimize", &["--q", "-1"])).0, 2);
    let (code, _, err) = call(&["optimize", "--c", "1.2", "--lambda", "1", "--mu", "1", "--q", "0.05", "--ell", "1.0"]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(call(&with_base("optimize", &["--mode", "injection", "--varphi", "0.5"])).0, 2);
    assert_eq!(call(&with_base("optimize", &["--mode", "injection", "--S", "1", "--varphi", "1.5"])).0, 2);
    assert_eq!(call(&with_base("sweep", &["--from", "-5", "--to", "0", "--steps", "1"])).0, 2);
    assert_eq!(call(&with_base("simulate", &["--a", "1"])).0, 2);
    assert_eq!(call(&["reproduce", "4"]).0, 2);
    assert_eq!(call(&["frobnicate"]).0, 2);
}

#[test]
fn numerical_failure_exits_3() {
    let argv = ["optimize", "--c", "1.2", "--lambda", "1", "--mu", "1", "--q", "1e5", "--ell", "0.1", "--S", "-5"];
    let (code, out, err) = call(&argv);
    assert_eq!(code, 3);
    assert!(out.is_empty());
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn low_cost_needs_the_override() {
    let args = with_base("optimize", &["--mode", "injection", "--varphi", "1.0"]);
    assert_eq!(call(&args).0, 2);
    let mut args = args;
    args.push("--allow-low-cost".into());
    let (code, out, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(row(&out, 1)[2], "true");
}

#[test]
fn help_exits_0() {
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    for sub in ["optimize", "reproduce", "sweep", "simulate", "validate"] {
        assert!(out.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn reproduce_csv_is_bit_stable() {
    let (code, first, _) = call(&["reproduce", "1"]);
    assert_eq!(code, 0);
    assert_eq!(call(&["reproduce", "1"]).1, first);
    assert_eq!(row(&first, 0), ["ell", "intercept", "slope", "rhs_intercept", "rhs_slope", "threshold"]);
    assert_eq!(row(&first, 1), ["0.1", "0.296297", "-0.248011", "1.14286", "-0.047619", "-4.22452"]);
    assert_eq!(first.lines().count(), 4);
}

#[test]
fn sweep_and_sign_grid() {
    let (code, out, _) = call(&with_base("sweep", &["--param", "S", "--from", "-6", "--to", "0", "--steps", "4"]));
    assert_eq!(code, 0);
    assert_eq!(row(&out, 0), ["S", "threshold", "value", "boundary_case", "h0"]);
    assert_eq!(out.lines().count(), 5);
    assert_eq!(row(&out, 1)[3], "false");
    assert_eq!(row(&out, 4)[3], "true");
    let grid = ["--from", "-5", "--to", "30", "--steps", "3", "--q-from", "0.001", "--q-to", "0.01", "--q-steps", "2"];
    let (code, out, _) = call(&with_base("sweep", &grid));
    assert_eq!(code, 0);
    assert_eq!(row(&out, 0), ["S", "q", "h0", "positive"]);
    assert_eq!(out.lines().count(), 7);
}

#[test]
fn simulate_is_seed_deterministic() {
    let args = with_base("simulate", &["--S", "-5", "--b", "2", "--paths", "2000", "--seed", "9"]);
    let (code, first, _) = call(&args);
    assert_eq!(code, 0);
    assert_eq!(call(&args).1, first);
    let other = with_base("simulate", &["--S", "-5", "--b", "2", "--paths", "2000", "--seed", "10"]);
    assert_ne!(call(&other).1, first);
    let r = row(&first, 1);
    assert_eq!(r[0], "2");
    assert_eq!(r[3], "2000");
    let z: f64 = r[9].parse().unwrap();
    assert!(z.abs() < 5.0);
}

#[test]
fn short_horizon_warns_but_succeeds() {
    let (code, out, err) = call(&with_base("simulate", &["--S", "-5", "--paths", "1000", "--horizon", "5"]));
    assert_eq!(code, 0);
    assert!(err.contains("warning: horizon bias bound"), "{err}");
    assert_eq!(row(&out, 1)[6], "true");
}

#[test]
fn out_writes_a_file() {
    let path = std::env::temp_dir().join(format!("taxdelay-cli-{}.json", std::process::id()));
    let path_str = path.to_str().unwrap().to_string();
    let (code, out, _) = call(&["reproduce", "2", "--format", "json", "--out", &path_str]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn validate_passes_with_info_rows() {
    let (code, out, err) = call(&["validate", "--paths", "4000"]);
    assert_eq!(code, 0, "{err}");
    assert!(!out.contains(",FAIL,"));
    assert!(out.contains(",INFO,"));
}
