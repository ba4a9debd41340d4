use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use extropy::{sample, Family, SeededSampler};
use extropy_cli::dataset::{load_csv, Filter, Grouping, QuantileGroupSpec};
use extropy_cli::CliError;
use tempfile::TempDir;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extropy")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

/// Three groups of exponential draws plus an age column and a site column.
fn write_csv(dir: &TempDir) -> std::path::PathBuf {
    let mut s = String::from("site,group,age,value\n");
    for (i, (label, rate)) in [("a", 1.0), ("b", 2.0), ("c", 4.0)].into_iter().enumerate() {
        let draws = sample(
            Family::Exponential { rate },
            40,
            &mut SeededSampler::substream(3, i as u64),
        )
        .unwrap();
        for (k, v) in draws.values().iter().enumerate() {
            let site = if k % 2 == 0 { "north" } else { "south" };
            writeln!(s, "{site},{label},{},{v}", 20 + (k * 7 + i * 3) % 50).unwrap();
        }
    }
    s.push_str("north,a,33,NA\nsouth,,40,1.0\n");
    let path = dir.path().join("data.csv");
    std::fs::write(&path, s).unwrap();
    path
}

#[test]
fn column_grouping_orders_labels_and_counts_missing() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let ds = load_csv(&path, "value", &Grouping::Column { column: "group".into() }, None).unwrap();
    let labels: Vec<_> = ds.groups.iter().map(|g| g.label.as_str()).collect();
    assert_eq!(labels, ["a", "b", "c"]);
    assert_eq!(ds.provenance.rows_read, 122);
    assert_eq!(ds.provenance.rows_missing, 2);
    assert!(ds.groups.iter().all(|g| g.values.len() == 40));
}

#[test]
fn filter_keeps_matching_rows() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let f: Filter = "site=north".parse().unwrap();
    let ds = load_csv(&path, "value", &Grouping::Column { column: "group".into() }, Some(&f)).unwrap();
    assert_eq!(ds.provenance.rows_filtered_out, 61);
    assert!(ds.groups.iter().all(|g| g.values.len() == 20));
    assert!("novalue".parse::<Filter>().is_err());
}

#[test]
fn quantile_groups_cover_all_rows_with_interval_labels() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let spec = QuantileGroupSpec::new("age", vec![0.25, 0.5, 0.75]).unwrap();
    let ds = load_csv(&path, "value", &Grouping::Quantiles(spec), None).unwrap();
    assert_eq!(ds.groups.len(), 4);
    assert!(ds.groups[0].label.starts_with('['));
    assert!(ds.groups[1..]
        .iter()
        .all(|g| g.label.starts_with('(') && g.label.ends_with(']')));
    let total: usize = ds.groups.iter().map(|g| g.values.len()).sum();
    // The row with an empty `group` still has an age.
    assert_eq!(total, 121);
    assert_eq!(ds.provenance.cut_points.as_ref().unwrap().len(), 3);
    assert!(QuantileGroupSpec::new("age", vec![0.5, 0.5]).is_err());
    assert!(QuantileGroupSpec::new("age", vec![1.0]).is_err());
}

#[test]
fn input_errors_name_the_problem() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let by_group = Grouping::Column { column: "group".into() };
    assert!(matches!(
        load_csv(&dir.path().join("nope.csv"), "value", &by_group, None),
        Err(CliError::FileNotFound(_))
    ));
    assert!(matches!(load_csv(&path, "weight", &by_group, None), Err(CliError::MissingColumn(c)) if c == "weight"));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "group,value\na,1\na,2\nb,x\n").unwrap();
    match load_csv(&bad, "value", &by_group, None) {
        Err(CliError::ParseError { row, column, value }) => {
            assert_eq!((row, column.as_str(), value.as_str()), (3, "value", "x"));
        }
        other => panic!("{other:?}"),
    }

    let small = dir.path().join("small.csv");
    std::fs::write(&small, "group,value\na,1\na,2\na,3\nb,1\nb,2\nb,3\nb,4\nb,5\n").unwrap();
    assert!(matches!(
        load_csv(&small, "value", &by_group, None),
        Err(CliError::TooFewObservations { n: 3, required: 5, .. })
    ));
}

#[test]
fn groups_writes_matrix_files() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let out = dir.path().join("out");
    let o = bin(&[
        "groups",
        path.to_str().unwrap(),
        "--value-col",
        "value",
        "--group-col",
        "group",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("matrix.csv")).unwrap();
    assert!(csv.starts_with("group,a,b,c\n"));
    assert_eq!(csv.lines().count(), 4);
    let svg = std::fs::read_to_string(out.join("heatmap.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));

    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let m = &report["results"]["values"];
    for i in 0..3 {
        assert_eq!(m[i][i].as_f64().unwrap(), 0.0);
        for j in 0..3 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
    // Rates 1 and 4 sit further apart than rates 1 and 2.
    assert!(m[0][2].as_f64().unwrap() > m[0][1].as_f64().unwrap());
}

#[test]
fn format_flag_limits_files() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let out = dir.path().join("only_csv");
    let o = bin(&[
        "groups",
        path.to_str().unwrap(),
        "--value-col",
        "value",
        "--group-col",
        "group",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(code(&o), 0);
    let names: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names, ["matrix.csv"]);
}

#[test]
fn estimate_needs_two_groups() {
    let dir = TempDir::new().unwrap();
    let path = write_csv(&dir);
    let p = path.to_str().unwrap();
    let three = bin(&["estimate", p, "--value-col", "value", "--group-col", "group"]);
    assert_eq!(code(&three), 2);
    let two = bin(&[
        "estimate",
        p,
        "--value-col",
        "value",
        "--group-col",
        "group",
        "--filter",
        "site=north",
    ]);
    assert_eq!(code(&two), 2);
    let halves = bin(&[
        "estimate",
        p,
        "--value-col",
        "value",
        "--quantiles",
        "0.5",
        "--group-col",
        "age",
    ]);
    assert_eq!(code(&halves), 0, "{}", String::from_utf8_lossy(&halves.stderr));
    let v = json(&halves);
    assert!(v["results"]["estimate"]["value"].as_f64().unwrap() >= 0.0);
}

#[test]
fn missing_input_exits_2() {
    let o = bin(&["groups", "/nonexistent/x.csv", "--value-col", "v", "--group-col", "g"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("x.csv"));
    assert_eq!(
        code(&bin(&["measure", "--family-x", "exp:-1", "--family-y", "exp:2"])),
        2
    );
    assert_eq!(
        code(&bin(&[
            "verify",
            "--family-x",
            "exp:1",
            "--family-y",
            "exp:2",
            "--grid",
            "1:0:5"
        ])),
        2
    );
}

#[test]
fn measure_reports_static_dynamic_and_closed_form() {
    let o = bin(&["measure", "--family-x", "exp:1", "--family-y", "exp:2", "--t", "0.7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let r = &v["results"];
    let d = r["static"]["relative"]["value"].as_f64().unwrap();
    assert!((d - 1.0 / 12.0).abs() < 1e-9);
    assert!((r["closed_form"]["relative"].as_f64().unwrap() - d).abs() < 1e-9);
    let dr = r["dynamic"]["values"]["residual_relative"]["value"].as_f64().unwrap();
    assert!((dr - 1.0 / 12.0).abs() < 1e-9);
    assert_eq!(v["schema_version"], 1);

    let crh = bin(&[
        "measure",
        "--family-x",
        "crh:1,2",
        "--family-y",
        "crh:2,2",
        "--t",
        "1",
        "--atom-convention",
        "paper",
    ]);
    assert_eq!(code(&crh), 0);
    assert!(json(&crh)["results"]["closed_form"]["constant_reversed_hazard_past"]["past_relative"].is_number());
}

#[test]
fn verify_exit_codes() {
    let ok = bin(&["verify", "--family-x", "exp:1", "--family-y", "exp:2"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(json(&ok)["results"]["failed"].as_array().unwrap().is_empty());

    // d_r decreases for this pair, so the declared premise does not hold.
    let unmet = bin(&[
        "verify",
        "--family-x",
        "exp:0.5",
        "--family-y",
        "weibull:0.8,1",
        "--assume-nondecreasing",
    ]);
    assert_eq!(code(&unmet), 4, "{}", String::from_utf8_lossy(&unmet.stderr));
    let v = json(&unmet);
    assert!(v["results"]["hypotheses_not_met"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l.is_string()));
}

#[test]
fn simulate_reports_rows_in_order() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sim");
    let o = bin(&[
        "simulate",
        "--family-x",
        "exp:1",
        "--family-y",
        "exp:2",
        "--n",
        "30,60",
        "--reps",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("study.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "n,reps,mean_estimate,bias,mse,failed");
    assert!(lines[1].starts_with("30,10,") && lines[2].starts_with("60,10,"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!((report["inputs"]["true_value"].as_f64().unwrap() - 1.0 / 12.0).abs() < 1e-9);
    assert_eq!(
        code(&bin(&[
            "simulate",
            "--family-x",
            "exp:1",
            "--family-y",
            "exp:2",
            "--reps",
            "0"
        ])),
        2
    );
}

#[test]
fn report_paths_do_not_leak_into_results() {
    // Reports written to different directories are identical.
    let dir = TempDir::new().unwrap();
    let args = |o: &Path| {
        bin(&[
            "simulate",
            "--family-x",
            "exp:1",
            "--family-y",
            "exp:3",
            "--n",
            "20",
            "--reps",
            "5",
            "--out",
            o.to_str().unwrap(),
        ])
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    args(&a);
    args(&b);
    assert_eq!(
        std::fs::read(a.join("report.json")).unwrap(),
        std::fs::read(b.join("report.json")).unwrap()
    );
}
