use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_divcode");

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn divcode(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("DIVCODE_FIXTURES")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn plan_writes_one_file_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = divcode(&["plan", "--scenario", "sink-five", "--out", out, "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for code in ["dc", "sr", "pc"] {
        let text = std::fs::read_to_string(dir.path().join(format!("sink-five.{code}.json"))).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert!(doc.get("flows").is_some());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}

#[test]
fn uncoverable_flow_exits_partial() {
    let o = divcode(&["plan", "--scenario", &data("bridge.toml"), "--schemes", "pc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("uncovered 1->6 on link 3-4"));
}

#[test]
fn bridge_is_reported_by_validate() {
    let o = divcode(&["validate", "--scenario", &data("bridge.toml")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("link 3-4 is a bridge") || stdout(&o).contains("link 3-4 is a bridge"));
}

#[test]
fn missing_scenario_is_an_error() {
    let o = divcode(&["compare", "--scenario", "/nonexistent/net.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/net.toml"));
}

#[test]
fn empty_scheme_list_is_rejected() {
    let o = divcode(&["compare", "--scenario", "sink-five", "--schemes", ""]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn syntax_errors_carry_a_line_number() {
    let o = divcode(&["validate", "--scenario", &data("malformed.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 9"), "{}", stderr(&o));
}

#[test]
fn compare_csv_columns() {
    let o = divcode(&["compare", "--scenario", "sink-five", "--switch-time-ms", "1,10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rows.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        ["scheme", "scp_percent", "rt_ms@1", "rt_ms@10", "qor@1", "qor@10", "failed_recoveries"]
    );
    let schemes: Vec<String> = rows.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(schemes, ["dc", "sr", "pc"]);
}

#[test]
fn coding_qor_curve_is_flat() {
    let o = divcode(&["qor-curve", "--scenario", "sink-five", "--schemes", "dc,sr"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let mut dc = Vec::new();
    let mut sr = Vec::new();
    for r in rows.records() {
        let r = r.unwrap();
        let q: f64 = r[3].parse().unwrap();
        match &r[0] {
            "dc" => dc.push(q),
            "sr" => sr.push(q),
            other => panic!("unexpected scheme {other}"),
        }
    }
    assert_eq!(dc.len(), 4);
    assert!(dc.windows(2).all(|w| w[0] == w[1]));
    assert!(sr.windows(2).all(|w| w[0] >= w[1]) && sr[0] > sr[3]);
}

#[test]
fn fixture_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("bridge.toml")).unwrap();
    std::fs::write(dir.path().join("sink-five.toml"), text).unwrap();
    let o = Command::new(BIN)
        .args(["validate", "--scenario", "sink-five"])
        .env("DIVCODE_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bridge: 6 nodes"), "{}", stdout(&o));
}

#[test]
fn table_output_lists_every_scheme() {
    let o = divcode(&["compare", "--scenario", "relay-star", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for title in ["Div. Coding", "Source Rerout.", "p-cycles"] {
        assert!(text.contains(title));
    }
}
