use std::path::Path;
use std::process::Command;

use netcap::{dispatch, Outcome};
use proptest::prelude::*;
use serde_json::Value;

fn run(args: &[&str]) -> Outcome {
    dispatch(std::iter::once("netcap").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut argv = vec!["--format", "json"];
    argv.extend_from_slice(args);
    let out = run(&argv);
    assert_eq!(out.code, 0, "{}", out.stderr);
    serde_json::from_str(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const BALANCED: &str = r#"{
  "nodes": [
    {"id": "srv", "tier": "host"},
    {"id": "sa1", "tier": "server-access"},
    {"id": "core1", "tier": "core"}
  ],
  "links": [
    {"from": "srv", "to": "sa1", "bps": 10e9, "count": 40},
    {"from": "sa1", "to": "core1", "bps": 100e9, "count": 4}
  ]
}"#;

#[test]
fn stat_table_shows_statistical_capacity() {
    let out = run(&[
        "stat",
        "--sources",
        "100",
        "--rate",
        "1e6",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stderr.is_empty());
    let line = out
        .stdout
        .lines()
        .find(|l| l.trim_start().starts_with("c_stat"))
        .unwrap();
    assert!(line.ends_with("57.44 Mbit/s"), "{line}");
    assert!(out.stdout.contains("100.00 Mbit/s"));
}

#[test]
fn stat_accepts_suffixes() {
    let a = json(&[
        "stat",
        "--sources",
        "100",
        "--rate",
        "1M",
        "--epsilon",
        "1e-2",
    ]);
    let b = json(&[
        "stat",
        "--sources",
        "1e2",
        "--rate",
        "1000k",
        "--epsilon",
        "0.01",
    ]);
    assert_eq!(a, b);
}

#[test]
fn stat_validation_section() {
    let v = json(&[
        "stat",
        "--sources",
        "100",
        "--rate",
        "1e6",
        "--epsilon",
        "0.01",
        "--validate",
        "--trials",
        "20000",
        "--seed",
        "3",
    ]);
    let row = &v["sections"][1]["rows"][0];
    assert_eq!(v["sections"][1]["name"], "validation");
    assert_eq!(row["trials"]["value"], 20000);
    let rate = row["exceedance_rate"]["value"].as_f64().unwrap();
    assert!((0.0..0.02).contains(&rate), "{rate}");
}

#[test]
fn one_sided_budget() {
    let v = json(&[
        "stat",
        "--sources",
        "100",
        "--rate",
        "1e6",
        "--epsilon",
        "0.01",
        "--one-sided",
    ]);
    let z = v["sections"][0]["rows"][0]["c_epsilon"]["value"]
        .as_f64()
        .unwrap();
    assert!((z - 2.326348).abs() < 1e-6, "{z}");
    let out = run(&[
        "stat",
        "--sources",
        "1",
        "--rate",
        "1",
        "--epsilon",
        "0.7",
        "--one-sided",
    ]);
    assert_eq!(out.code, 2);
}

#[test]
fn frames_line_rate() {
    let out = run(&["frames", "--link", "1e9", "--payload", "46"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("1,488,095 f/s"), "{}", out.stdout);
    let v = json(&["frames", "--link", "10G", "--payload", "1500"]);
    assert_eq!(
        v["sections"][0]["rows"][0]["frames_per_second"]["value"],
        812_743
    );
}

#[test]
fn frames_jumbo_needs_flag() {
    let out = run(&["frames", "--link", "1e9", "--payload", "9000"]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error[domain]:"), "{}", out.stderr);
    assert_eq!(
        run(&["frames", "--link", "1e9", "--payload", "9000", "--jumbo"]).code,
        0
    );
}

#[test]
fn goodput_protocols() {
    let get = |args: &[&str], key: &str| {
        let mut argv = vec!["goodput", "--link", "1e9"];
        argv.extend_from_slice(args);
        json(&argv)["sections"][0]["rows"][0][key]["value"]
            .as_f64()
            .unwrap()
    };
    let tcp = get(&["--payload", "1500"], "goodput");
    let ts = get(&["--payload", "1500", "--options", "timestamps"], "goodput");
    let udp = get(&["--payload", "1500", "--proto", "udp"], "goodput");
    let eth = get(
        &["--payload", "1500", "--proto", "ethernet"],
        "goodput_with_crc",
    );
    assert!(ts < tcp && tcp < udp && udp < eth);
    assert!((ts - 941e6).abs() < 1e6);
    assert_eq!(
        get(&["--payload", "1500", "--options", "12"], "goodput"),
        ts
    );
    assert_eq!(
        run(&[
            "goodput",
            "--link",
            "1e9",
            "--payload",
            "1500",
            "--options",
            "7"
        ])
        .code,
        2
    );
}

#[test]
fn mathis_figures() {
    let v = json(&["mathis", "--mss", "1460", "--rtt", "0.1", "--loss", "0.01"]);
    let row = &v["sections"][0]["rows"][0];
    assert!((row["throughput"]["value"].as_f64().unwrap() - 1_430_502.01).abs() < 0.01);
    assert_eq!(row["throughput"]["display"], "1.43 Mbit/s");
    assert_eq!(
        run(&["mathis", "--mss", "1460", "--rtt", "0.1", "--loss", "0"]).code,
        2
    );
}

#[test]
fn tcp_sim_trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("cwnd.csv");
    let out = run(&[
        "tcp-sim",
        "--rtt",
        "0.1",
        "--loss",
        "0.01",
        "--rounds",
        "200",
        "--seed",
        "7",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("round,cwnd_bytes,event"));
    assert_eq!(lines.count(), 200);

    let bad = run(&[
        "tcp-sim",
        "--rtt",
        "0.1",
        "--loss",
        "0.01",
        "--rounds",
        "10",
        "--trace",
        dir.path().join("missing/dir/x.csv").to_str().unwrap(),
    ]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.starts_with("error[io]:"));
}

#[test]
fn balanced_server_access_passes() {
    let dir = tempfile::tempdir().unwrap();
    let topo = write(dir.path(), "t.json", BALANCED);
    let out = run(&["fabric", "--topology", &topo]);
    assert_eq!(out.code, 0, "{}{}", out.stdout, out.stderr);
    assert!(out.stdout.contains("1:1"));
}

#[test]
fn fabric_findings_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let topo = write(
        dir.path(),
        "t.json",
        &BALANCED.replace("\"count\": 40", "\"count\": 41"),
    );
    let out = run(&["--format", "json", "fabric", "--topology", &topo]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["sections"][0]["rows"][0]["verdict"], "violation");
    assert_eq!(v["sections"][0]["rows"][0]["ratio_exact"], "41/40");

    let policy = write(dir.path(), "p.json", r#"{"server_core": 1.1}"#);
    assert_eq!(
        run(&["fabric", "--topology", &topo, "--policy", &policy]).code,
        0
    );
}

#[test]
fn fabric_input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = run(&["fabric", "--topology", missing.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.starts_with("error[io]:"));

    let topo = write(
        dir.path(),
        "t.json",
        &BALANCED.replace("\"tier\": \"core\"", "\"tier\": \"core\", \"rack\": 4"),
    );
    let out = run(&["fabric", "--topology", &topo]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("unknown key `rack`"), "{}", out.stderr);

    let good = write(dir.path(), "g.json", BALANCED);
    let policy = write(
        dir.path(),
        "p.json",
        r#"{"leaf_spine": 3, "spine_core": 2}"#,
    );
    let out = run(&["fabric", "--topology", &good, "--policy", &policy]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("spine_core"));
}

#[test]
fn errors_are_one_line() {
    for args in [
        vec!["stat", "--sources", "10", "--rate", "1e6", "--epsilon", "2"],
        vec!["frames", "--link", "fast", "--payload", "46"],
        vec!["frames", "--payload", "46"],
        vec!["warp"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(out.stderr.starts_with("error["), "{}", out.stderr);
        assert_eq!(out.stderr.lines().count(), 1, "{}", out.stderr);
    }
}

#[test]
fn help_is_success() {
    let out = run(&["--help"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("tcp-sim"));
}

#[test]
fn binary_propagates_exit_code() {
    let bin = env!("CARGO_BIN_EXE_netcap");
    let ok = Command::new(bin)
        .args(["frames", "--link", "1e9", "--payload", "46"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("1,488,095"));
    let bad = Command::new(bin)
        .args(["frames", "--link", "0", "--payload", "46"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error[domain]"));
}

/// Checks the three renderings of one invocation against each other.
fn formats_agree(args: &[&str]) {
    let render = |format: &str| {
        let mut argv = vec!["--format", format];
        argv.extend_from_slice(args);
        run(&argv)
    };
    let (table, json_out, csv) = (render("table"), render("json"), render("csv"));
    assert_eq!(table.code, json_out.code);
    let v: Value = serde_json::from_str(&json_out.stdout).unwrap();
    let sections = v["sections"].as_array().unwrap();
    let blocks: Vec<&str> = csv.stdout.trim_end().split("\n\n").collect();
    assert_eq!(blocks.len(), sections.len());

    for (section, block) in sections.iter().zip(blocks) {
        let mut lines = block.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let rows = section["rows"].as_array().unwrap();
        let csv_rows: Vec<&str> = lines.collect();
        assert_eq!(csv_rows.len(), rows.len());
        for (row, line) in rows.iter().zip(csv_rows) {
            let obj = row.as_object().unwrap();
            assert_eq!(obj.keys().map(String::as_str).collect::<Vec<_>>(), header);
            for (cell, raw) in obj.values().zip(line.split(',')) {
                match cell {
                    Value::Object(fig) => {
                        let parsed: Value = serde_json::from_str(raw).unwrap();
                        assert_eq!(parsed.as_f64(), fig["value"].as_f64(), "{raw}");
                        let display = fig["display"].as_str().unwrap();
                        assert!(table.stdout.contains(display), "table lacks {display}");
                    }
                    Value::String(s) => assert_eq!(raw, s),
                    other => assert_eq!(raw, other.to_string()),
                }
            }
        }
    }
}

#[test]
fn renderings_agree() {
    let dir = tempfile::tempdir().unwrap();
    let topo = write(dir.path(), "t.json", BALANCED);
    formats_agree(&[
        "stat",
        "--sources",
        "100",
        "--rate",
        "1e6",
        "--epsilon",
        "0.01",
        "--validate",
        "--trials",
        "5000",
    ]);
    formats_agree(&["frames", "--link", "10G", "--payload", "46", "--vlan", "2"]);
    formats_agree(&[
        "goodput",
        "--link",
        "1e9",
        "--payload",
        "512",
        "--proto",
        "udp",
    ]);
    formats_agree(&[
        "goodput",
        "--link",
        "1e9",
        "--payload",
        "512",
        "--proto",
        "ethernet",
    ]);
    formats_agree(&[
        "mathis", "--mss", "1460", "--rtt", "0.05", "--loss", "1e-4", "--window", "65535",
    ]);
    formats_agree(&[
        "tcp-sim", "--rtt", "0.1", "--loss", "0.02", "--rounds", "300", "--seed", "2",
    ]);
    formats_agree(&["fabric", "--topology", &topo]);
}

#[test]
fn json_is_byte_identical() {
    let args = [
        "--format", "json", "tcp-sim", "--rtt", "0.05", "--loss", "0.01", "--rounds", "400",
        "--seed", "11",
    ];
    assert_eq!(run(&args), run(&args));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn stat_renderings_agree(n in 0u64..5000, rate in 1.0f64..1e10, eps in 1e-6f64..1.0) {
        let (n, rate, eps) = (n.to_string(), rate.to_string(), eps.to_string());
        formats_agree(&["stat", "--sources", &n, "--rate", &rate, "--epsilon", &eps]);
    }

    #[test]
    fn frames_renderings_agree(link in 1e3f64..4e11, payload in 46u32..=1500, vlan in 0u32..=2) {
        let (link, payload, vlan) = (link.to_string(), payload.to_string(), vlan.to_string());
        formats_agree(&["frames", "--link", &link, "--payload", &payload, "--vlan", &vlan]);
    }
}
