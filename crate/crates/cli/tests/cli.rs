use std::path::PathBuf;
use std::process::{Command, Output};

use ieh::optimize::landscape_grid;
use ieh::signal::{read_csv, write_csv};
use ieh::{Pipeline, SeriesSet, VoltageSeries};

fn tmp(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn ieh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ieh"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Non-comment CSV lines after the header row.
fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn generated_file_reads_back() {
    let path = tmp("generated.csv");
    let out = ieh(&[
        "generate",
        "--duration",
        "0.5",
        "--output",
        path.to_str().unwrap(),
    ]);
    stdout(&out);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# ieh generate"));
    assert!(text.contains("# seed=0\n"));
    let set = read_csv(&path).unwrap();
    assert_eq!(set.len(), 500);
    assert!(set.v2.is_some());
    assert!((set.v1.rms() - 0.6).abs() < 1e-12);
    assert_eq!(set.v1.sample_rate(), 1000.0);
}

#[test]
fn zero_duration_is_a_config_error() {
    let out = ieh(&["generate", "--duration", "0"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duration"));
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let bad = tmp("bad-header.csv");
    std::fs::write(&bad, "t,v1\n0,1\n").unwrap();
    assert_eq!(
        ieh(&["compare", "--input", bad.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        ieh(&["compare", "--input", "/definitely/missing.csv"])
            .status
            .code(),
        Some(5)
    );
    assert_eq!(
        ieh(&["generate", "--output", "/definitely/missing/out.csv"])
            .status
            .code(),
        Some(5)
    );
    assert_eq!(
        ieh(&["compare", "--train-frac", "1.5", "--duration", "0.5"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(ieh(&["compare", "--method", "sa"]).status.code(), Some(2));
}

#[test]
fn dc_input_compares_cleanly() {
    let path = tmp("dc.csv");
    let v = VoltageSeries::new(vec![0.8; 200], 100.0).unwrap();
    write_csv(&SeriesSet::single(v), &path).unwrap();
    let table = tmp("dc-table.csv");
    let out = ieh(&[
        "compare",
        "--input",
        path.to_str().unwrap(),
        "--method",
        "grid",
        "--tau-max",
        "5",
        "--output",
        table.to_str().unwrap(),
    ]);
    let printed = stdout(&out);
    assert!(
        printed.contains("raw data") && printed.contains("IEH") && !printed.contains("2 voltages")
    );

    let rows = data_rows(&std::fs::read_to_string(&table).unwrap());
    assert_eq!(rows.len(), 3);
    let get = |case: &str, col: usize| -> f64 {
        rows.iter().find(|r| r[1] == case).unwrap()[col]
            .parse()
            .unwrap()
    };
    assert_eq!(get("raw", 3), 0.0);
    assert_eq!(get("ieh", 3), 0.0);
    assert_eq!(get("ieh", 2), get("raw", 2));
    assert!(get("db", 2) < get("raw", 2));
}

#[test]
fn landscape_rows_match_the_library() {
    let data = tmp("landscape-in.csv");
    stdout(&ieh(&[
        "generate",
        "--duration",
        "0.4",
        "--seed",
        "2",
        "--output",
        data.to_str().unwrap(),
    ]));
    let out = ieh(&[
        "landscape",
        "--input",
        data.to_str().unwrap(),
        "--tau-min",
        "3",
        "--tau-max",
        "9",
        "--phi-max",
        "11",
        "--offset",
        "2",
    ]);
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 7 * 12);
    assert_eq!((rows[0][0].as_str(), rows[0][1].as_str()), ("3", "0"));

    let set = read_csv(&data).unwrap();
    let grid = landscape_grid(&Pipeline::from_set(&set).unwrap(), 3..=9, 0..=11, 2).unwrap();
    let best = |costs: Vec<(usize, usize, f64)>| {
        costs
            .into_iter()
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .unwrap()
    };
    let from_cli = best(
        rows.iter()
            .map(|r| {
                (
                    r[0].parse().unwrap(),
                    r[1].parse().unwrap(),
                    r[2].parse().unwrap(),
                )
            })
            .collect(),
    );
    let from_lib = best(grid.iter().map(|g| (g.tau, g.phi, g.cost)).collect());
    assert_eq!(from_cli, from_lib);
}

#[test]
fn single_snr_gives_one_row() {
    let out = ieh(&[
        "snr-sweep",
        "--snrs",
        "4",
        "--realizations",
        "2",
        "--duration",
        "1",
    ]);
    let text = stdout(&out);
    assert!(text.contains("# snrs=4\n") && text.contains("# mode=single\n"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    let vrms_ieh: f64 = rows[0][1].parse().unwrap();
    let vrms_db: f64 = rows[0][2].parse().unwrap();
    assert!(vrms_ieh >= vrms_db);
}

#[test]
fn optimize_writes_a_trajectory() {
    let out = ieh(&[
        "optimize",
        "--method",
        "ga",
        "--generations",
        "5",
        "--duration",
        "1",
        "--seed",
        "9",
    ]);
    let text = stdout(&out);
    for key in [
        "# method=ga",
        "# seed=9",
        "# population=40",
        "# best_tau=",
        "# test_cost=",
    ] {
        assert!(text.contains(key), "missing {key}");
    }
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    let best: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]));
    // 17 significant digits
    assert!(rows[0][1].split('e').next().unwrap().len() >= 13);

    assert_eq!(
        ieh(&["optimize", "--method", "ga", "--eta", "1"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn low_forward_drop_warns() {
    let out = ieh(&[
        "compare",
        "--duration",
        "0.5",
        "--diode-v0",
        "0.01",
        "--method",
        "grid",
        "--tau-max",
        "4",
    ]);
    stdout(&out);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}
