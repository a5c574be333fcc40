use std::fs;
use std::path::Path;

use mmwave_d2d::cli::dataset::Dataset;
use mmwave_d2d::cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> i32 {
    run(std::iter::once("mmwave-d2d").chain(args.iter().copied()))
}

fn read(path: &Path) -> Dataset {
    Dataset::read_csv(fs::read_to_string(path).unwrap().as_bytes()).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(cli(&["--help"]), EXIT_OK);
    assert_eq!(cli(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--key", "n_bar"]), EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--key", "bogus", "--grid", "1,2", "--outputs", "p_d2d"]), EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--key", "n_bar", "--grid", "lin:1:2", "--outputs", "p_d2d"]), EXIT_USAGE);
    assert_eq!(cli(&["sweep", "--key", "n_bar", "--grid", "1", "--outputs", "nonsense"]), EXIT_USAGE);
}

#[test]
fn validate_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    fs::write(&good, "n_bar = 5\ngamma_db = 20\n").unwrap();
    assert_eq!(cli(&["validate-config", "--config", good.to_str().unwrap()]), EXIT_OK);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "p_l_c = 1.5\n").unwrap();
    assert_eq!(cli(&["validate-config", "--config", bad.to_str().unwrap()]), EXIT_USAGE);

    let unknown = dir.path().join("unknown.toml");
    fs::write(&unknown, "sigma_d = 5\n").unwrap();
    assert_eq!(cli(&["validate-config", "--config", unknown.to_str().unwrap()]), EXIT_USAGE);

    let missing = dir.path().join("missing.toml");
    assert_eq!(cli(&["validate-config", "--config", missing.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn analytic_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pd.csv");
    let code = cli(&[
        "sweep",
        "--key",
        "sigma_d",
        "--grid",
        "lin:1:10:4",
        "--outputs",
        "p_d2d",
        "--set",
        "p_l_d=0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let ds = read(&out);
    assert_eq!(ds.rows.len(), 4);
    assert!(ds.rows.iter().all(|r| r.curve == "p_l_d=0.5" && r.method == "analytic" && r.error.is_none()));
    let xs: Vec<f64> = ds.rows.iter().map(|r| r.swept_value).collect();
    assert_eq!(xs, vec![1.0, 4.0, 7.0, 10.0]);
    let ys: Vec<f64> = ds.rows.iter().map(|r| r.value.unwrap()).collect();
    assert!(ys.windows(2).all(|w| w[1] <= w[0]), "{ys:?}");
}

#[test]
fn mixed_sweep_compares_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("both.csv");
    let code = cli(&[
        "sweep",
        "--key",
        "sigma_d",
        "--grid",
        "2,5",
        "--outputs",
        "p_d2d",
        "--method",
        "both",
        "--trials",
        "4000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let ds = read(&out);
    assert_eq!(ds.rows.len(), 4);
    assert!(ds.metadata.iter().any(|m| m.contains("seed")), "{:?}", ds.metadata);
    assert_eq!(cli(&["compare", out.to_str().unwrap()]), EXIT_OK);
}

#[test]
fn compare_flags_a_perturbed_file() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |path: &Path, method: &'static str| {
        vec![
            "sweep".to_string(),
            "--key".into(),
            "sigma_d".into(),
            "--grid".into(),
            "2,5".into(),
            "--outputs".into(),
            "p_d2d".into(),
            "--method".into(),
            method.into(),
            "--trials".into(),
            "4000".into(),
            "--out".into(),
            path.to_str().unwrap().into(),
        ]
    };
    assert_eq!(run(std::iter::once("mmwave-d2d".to_string()).chain(args(&a, "analytic"))), EXIT_OK);
    assert_eq!(run(std::iter::once("mmwave-d2d".to_string()).chain(args(&b, "mc"))), EXIT_OK);
    assert_eq!(cli(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]), EXIT_OK);

    let mut ds = read(&b);
    ds.rows[1].value = ds.rows[1].value.map(|v| v - 0.2);
    let c = dir.path().join("c.csv");
    ds.write_csv(fs::File::create(&c).unwrap()).unwrap();
    assert_eq!(cli(&["compare", a.to_str().unwrap(), c.to_str().unwrap()]), EXIT_CHECK_FAILED);

    ds.rows.pop();
    ds.write_csv(fs::File::create(&c).unwrap()).unwrap();
    assert_eq!(cli(&["compare", a.to_str().unwrap(), c.to_str().unwrap()]), EXIT_USAGE);
}

#[test]
fn figure_nine_regenerates_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig9.csv");
    assert_eq!(cli(&["figure", "fig9", "--out", out.to_str().unwrap()]), EXIT_OK);
    let ds = read(&out);
    assert_eq!(ds.rows.len(), 99);
    assert!(ds.rows.iter().all(|r| r.output == "pf_objective"));
    assert_eq!(cli(&["figure", "fig1"]), EXIT_USAGE);
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}.csv"));
        let code = cli(&[
            "sweep",
            "--key",
            "n_bar",
            "--grid",
            "1,2",
            "--outputs",
            "laplace_dd_intra",
            "--method",
            "mc",
            "--trials",
            "2000",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
        texts.push(fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}
