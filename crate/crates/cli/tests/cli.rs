use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn copreli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_copreli"))
        .args(args)
        .env_remove("COPRELI_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Header and rows of a CSV document, skipping `#` provenance lines.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const FGM_SERIES: [&str; 13] = [
    "eval",
    "--copula",
    "fgm:alpha=0.5",
    "--marginal",
    "exp:1",
    "--marginal",
    "exp:1",
    "--structure",
    "series",
    "--mode",
    "dependent",
    "--grid",
    "0.6931471805599453:1:2:linear",
];

#[test]
fn eval_fgm_series_at_ln2() {
    let o = copreli(&FGM_SERIES);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    assert_eq!(header, ["t", "sf", "hr", "rhr", "mrl", "ai"]);
    let sf: f64 = rows[0][1].parse().unwrap();
    // e^{-2t}(1 + α(1 − e^{-t})²) at e^{-t} = 1/2
    assert!((sf - 0.28125).abs() < 1e-12, "{sf}");
}

#[test]
fn provenance_header_names_the_run() {
    let text = stdout(&copreli(&FGM_SERIES));
    for key in ["tool", "command", "spec", "marginals", "grid", "seed"] {
        assert!(text.contains(&format!("# {key}: ")), "missing {key}: {text}");
    }
    assert!(text.contains("# spec: fgm:alpha=0.5 series dependent"));
    assert!(text.contains("# grid: 0.6931471805599453:1:2:linear"));
    assert!(text.contains(concat!("copreli ", env!("CARGO_PKG_VERSION"))));
}

#[test]
fn out_of_range_parameter_is_a_config_error() {
    let o = copreli(&["eval", "--copula", "fgm:alpha=2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[-1, 1]"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn malformed_inputs_exit_2() {
    for args in [
        &["eval", "--copula", "fgm:alpha=0.5", "--grid", "0:1:0:linear"][..],
        &["eval", "--copula", "fgm:alpha=0.5", "--grid", "2:1:5:linear"],
        &["eval", "--copula", "fgm:alpha=0.5", "--grid", "0:1:5:log"],
        &["eval", "--copula", "nonsense:alpha=1"],
        &["eval"],
        &["eval", "--copula", "fgm:alpha=0.5", "--format", "xml"],
        &["eval", "--copula", "fgm:alpha=0.5", "--marginal", "exp:1"],
        &["eval", "--no-such-flag"],
    ] {
        let o = copreli(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = copreli(&["eval", "--copula", "fgm:alpha=0.5", "--grid", "0:1:0:linear"]);
    assert!(stderr(&o).contains("--grid") && stderr(&o).contains("empty"));
}

#[test]
fn numerical_failure_exits_3_with_the_time() {
    let o = copreli(&["eval", "--copula", "clayton:alpha=2", "--grid", "1:800:3:linear"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("numerical error at t = 400.5"), "{err}");
    // the table is still printed with the failing cells marked
    let (_, rows) = table(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][2], "NA");
}

#[test]
fn amh_negative_parallel_is_rhr_increasing() {
    let o = copreli(&["ordering", "--copula", "amh:alpha=-0.5", "--structure", "parallel"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (header, rows) = table(&stdout(&o));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows[0][col("relation")], "rhr");
    assert_eq!(rows[0][col("statement")], "T_P^D ≥_rhr T_P^I");
    assert_eq!(rows[0][col("classification")], "increasing");
}

#[test]
fn verify_independence_passes() {
    let o = copreli(&["verify", "--copula", "independence"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = table(&stdout(&o));
    assert!(rows.iter().all(|r| r[2] == "true"));
}

#[test]
fn verify_reports_broken_inequalities_with_4() {
    // the odd-dimensional Gumbel–Barnet form is not a copula
    let o = copreli(&["verify", "--copula", "gumbel_barnet:alpha=1,n=3"]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("verification failed"));
}

fn table1_cell(copula: &str) -> (String, String) {
    let o = copreli(&["table1", "--copula", copula, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let row = &json(&o)["result"]["rows"][0];
    (
        row["parallel"]["machine"].as_str().unwrap().to_string(),
        row["series"]["machine"].as_str().unwrap().to_string(),
    )
}

#[test]
fn table1_cells() {
    assert_eq!(table1_cell("fgm:alpha=0.5"), ("decreasing".into(), "increasing".into()));
    assert_eq!(table1_cell("gumbel_hougaard:alpha=2"), ("decreasing".into(), "increasing".into()));
    assert_eq!(table1_cell("nelsen_ten:alpha=1"), ("increasing".into(), "decreasing".into()));
}

#[test]
fn table1_default_markdown() {
    let o = copreli(&["table1", "--format", "md"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("> tool: `copreli"));
    assert!(text.contains("| Copula |"));
    assert!(text.contains("`amh:alpha=0.5`"));
}

#[test]
fn every_format_parses() {
    let mut args = FGM_SERIES.to_vec();
    args.extend(["--format", "json"]);
    let v = json(&copreli(&args));
    assert_eq!(v["provenance"]["command"], "eval");
    assert_eq!(v["result"]["sf"][0].as_f64().unwrap(), 0.28125);

    let mut args = FGM_SERIES.to_vec();
    args.extend(["--format", "md"]);
    let text = stdout(&copreli(&args));
    assert!(text.contains("| t | sf | hr | rhr | mrl | ai |"));

    for measure in ["sf", "hr", "rhr", "mrl"] {
        let o = copreli(&[
            "error-table",
            "--copula",
            "fgm:alpha=0.5",
            "--measure",
            measure,
            "--grid",
            "0.5:2:4:linear",
        ]);
        assert_eq!(o.status.code(), Some(0), "{measure}: {}", stderr(&o));
        let (header, rows) = table(&stdout(&o));
        assert_eq!(header, ["t", "raw", "relative", "verdict"]);
        assert_eq!(rows.len(), 4);
    }
}

#[test]
fn config_file_with_flag_override() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(
        f,
        "# series FGM\ncopula = fgm:alpha=0.5\nmarginal = exp:1\nmarginal = exp:1\nstructure = parallel\ngrid = 0.6931471805599453:1:2:linear"
    )
    .unwrap();
    let path = f.path().to_str().unwrap();
    let from_file = table(&stdout(&copreli(&["eval", "--config", path]))).1;
    let flagged = copreli(&["eval", "--config", path, "--structure", "series"]);
    assert_eq!(flagged.status.code(), Some(0));
    let text = stdout(&flagged);
    assert!(text.contains("# spec: fgm:alpha=0.5 series"));
    let rows = table(&text).1;
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.28125);
    assert_ne!(from_file[0][1], rows[0][1]);
    assert_eq!(rows, table(&stdout(&copreli(&FGM_SERIES))).1);
}

#[test]
fn bad_config_line_is_reported() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "copula = fgm:alpha=0.5\nstructure = sideways").unwrap();
    let o = copreli(&["eval", "--config", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config line 2"), "{}", stderr(&o));
    let o = copreli(&["eval", "--config", "/nonexistent/copreli.conf"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic_across_thread_counts() {
    let args = ["sample", "--copula", "clayton:alpha=2", "--samples", "9000", "--seed", "11"];
    let base = copreli(&args);
    assert_eq!(base.status.code(), Some(0));
    let (header, rows) = table(&stdout(&base));
    assert_eq!(header, ["t1", "t2"]);
    assert_eq!(rows.len(), 9000);
    for threads in ["1", "3"] {
        let o = Command::new(env!("CARGO_BIN_EXE_copreli"))
            .args(args)
            .env("COPRELI_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(o.stdout, base.stdout, "COPRELI_THREADS={threads}");
    }
    let other = copreli(&["sample", "--copula", "clayton:alpha=2", "--samples", "9000", "--seed", "12"]);
    assert_ne!(other.stdout, base.stdout);
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    for bad in ["0", "many", "-2"] {
        let o = Command::new(env!("CARGO_BIN_EXE_copreli"))
            .args(["sample", "--copula", "clayton:alpha=2", "--samples", "5"])
            .env("COPRELI_THREADS", bad)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("COPRELI_THREADS"));
    }
}
