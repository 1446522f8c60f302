//! Command-line front end.
//!
//! Exit codes: 0 when every plan covers every single link failure, 2 when
//! some plan is partial or some recovery fails, 1 on input errors.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::coding::{algorithm_one, SearchParams};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::metrics::{RtParams, SchemeResult, DEFAULT_SWITCH_TIMES};
use crate::pcycle::pc_design;
use crate::plan::{ProtectionPlan, Scheme};
use crate::reroute::sr_design;
use crate::scenario::Scenario;
use crate::sim::{sweep, SweepReport};
use crate::topology::TopologyWarning;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "divcode", version, about = "Plan and compare link-failure protection schemes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one protection plan per scheme.
    Plan(RunArgs),
    /// Spare capacity, restoration time and QoR per scheme.
    Compare(RunArgs),
    /// QoR against switch configuration time, one series per scheme.
    QorCurve(RunArgs),
    /// Parse and check a scenario without planning.
    Validate(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file, or the name of a bundled fixture.
    #[arg(long)]
    pub scenario: String,
    /// Comma-separated subset of dc, sr, pc.
    #[arg(long, value_delimiter = ',', default_value = "dc,sr,pc")]
    pub schemes: Vec<String>,
    /// Switch configuration times C in milliseconds.
    #[arg(long = "switch-time-ms", value_delimiter = ',', default_value = "0.5,1,5,10")]
    pub switch_time_ms: Vec<f64>,
    /// Failure detection time F in microseconds.
    #[arg(long = "detect-us", default_value_t = 100.0)]
    pub detect_us: f64,
    /// Per-node processing time D in microseconds.
    #[arg(long = "proc-us", default_value_t = 100.0)]
    pub proc_us: f64,
    #[arg(long = "thrsd-low", default_value_t = 1.6)]
    pub thrsd_low: f64,
    #[arg(long = "thrsd-high", default_value_t = 3.0)]
    pub thrsd_high: f64,
    #[arg(long = "n-max", default_value_t = 4)]
    pub n_max: usize,
    /// Longest candidate p-cycle in hops (default: min(nodes, 12)).
    #[arg(long = "max-cycle-hops")]
    pub max_cycle_hops: Option<usize>,
    /// Output file; for `plan`, a directory receiving one file per scheme.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Validated run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: String,
    pub schemes: Vec<Scheme>,
    /// Seconds.
    pub switch_times: Vec<f64>,
    pub rt: RtParams,
    pub search: SearchParams,
    pub max_cycle_hops: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: String::new(),
            schemes: Scheme::ALL.to_vec(),
            switch_times: DEFAULT_SWITCH_TIMES.to_vec(),
            rt: RtParams::default(),
            search: SearchParams::default(),
            max_cycle_hops: None,
            format: Format::Csv,
            out: None,
        }
    }
}

impl TryFrom<RunArgs> for RunConfig {
    type Error = Error;

    fn try_from(a: RunArgs) -> Result<Self> {
        let mut schemes = Vec::new();
        for s in a.schemes.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
            let scheme: Scheme = s.parse().map_err(Error::Validation)?;
            if !schemes.contains(&scheme) {
                schemes.push(scheme);
            }
        }
        if schemes.is_empty() {
            return Err(Error::Validation("at least one scheme is required".into()));
        }
        if a.switch_time_ms.is_empty() || a.switch_time_ms.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Validation("switch times must be positive".into()));
        }
        let rt = RtParams {
            detect: a.detect_us * 1e-6,
            process: a.proc_us * 1e-6,
            ..RtParams::default()
        };
        rt.validate()?;
        let search = SearchParams {
            thrsd_low: a.thrsd_low,
            thrsd_high: a.thrsd_high,
            n_max: a.n_max,
            ..SearchParams::default()
        };
        search.validate()?;
        if a.max_cycle_hops.is_some_and(|h| h < 3) {
            return Err(Error::Validation("max-cycle-hops must be at least 3".into()));
        }
        Ok(RunConfig {
            scenario: a.scenario,
            schemes,
            switch_times: a.switch_time_ms.iter().map(|c| c * 1e-3).collect(),
            rt,
            search,
            max_cycle_hops: a.max_cycle_hops,
            format: a.format,
            out: a.out,
        })
    }
}

pub fn design(scenario: &Scenario, scheme: Scheme, cfg: &RunConfig) -> ProtectionPlan {
    let (t, dm) = (&scenario.topology, &scenario.demands);
    match scheme {
        Scheme::DiversityCoding => algorithm_one(t, dm, &cfg.search),
        Scheme::SourceRerouting => sr_design(t, dm),
        Scheme::PCycles => pc_design(t, dm, cfg.max_cycle_hops),
    }
}

/// Plans and sweeps every configured scheme.
pub fn evaluate(scenario: &Scenario, cfg: &RunConfig) -> Result<Vec<(ProtectionPlan, SweepReport)>> {
    cfg.schemes
        .iter()
        .map(|&s| {
            let plan = design(scenario, s, cfg);
            let report = sweep(&scenario.topology, &plan, &cfg.rt, &cfg.switch_times)?;
            Ok((plan, report))
        })
        .collect()
}

fn emit(out: Option<&FsPath>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn csv_text(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("csv fields are UTF-8")
}

fn ms(seconds: f64) -> String {
    format!("{:.3}", seconds * 1e3)
}

fn c_label(seconds: f64) -> String {
    let v = seconds * 1e3;
    format!("{}", (v * 1e6).round() / 1e6)
}

fn describe_uncovered(plan: &ProtectionPlan, scenario: &Scenario) -> String {
    let t = &scenario.topology;
    let mut s = String::new();
    for u in &plan.uncovered {
        let flows: Vec<String> = u
            .flows
            .iter()
            .map(|&i| {
                let f = &plan.flows[i].flow;
                format!("{}->{}", t.label(f.src), t.label(f.dst))
            })
            .collect();
        let at = u
            .link
            .map(|l| {
                let l = t.link(l);
                format!(" on link {}-{}", t.label(l.a), t.label(l.b))
            })
            .unwrap_or_default();
        let _ = writeln!(s, "{}: uncovered {}{at}: {}", plan.scheme, flows.join(", "), u.reason);
    }
    s
}

pub fn cmd_plan(cfg: &RunConfig) -> Result<i32> {
    let scenario = fixtures::resolve(&cfg.scenario)?;
    let mut code = EXIT_OK;
    let mut combined = String::new();
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    for &scheme in &cfg.schemes {
        let plan = design(&scenario, scheme, cfg);
        if !plan.is_complete() {
            code = EXIT_PARTIAL;
            eprint!("{}", describe_uncovered(&plan, &scenario));
        }
        let text = match cfg.format {
            Format::Json => plan.to_json() + "\n",
            Format::Csv => plan_csv(&plan, &scenario)?,
            Format::Table => plan_table(&plan, &scenario),
        };
        match &cfg.out {
            Some(dir) => {
                let ext = match cfg.format {
                    Format::Json => "json",
                    Format::Csv => "csv",
                    Format::Table => "txt",
                };
                emit(Some(&dir.join(format!("{}.{}.{ext}", scenario.name, scheme.code()))), &text)?;
            }
            None => combined.push_str(&text),
        }
    }
    if cfg.out.is_none() {
        emit(None, &combined)?;
    }
    Ok(code)
}

fn plan_csv(plan: &ProtectionPlan, scenario: &Scenario) -> Result<String> {
    let t = &scenario.topology;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["scheme", "link", "a", "b", "distance_km", "working", "spare"])?;
    for l in t.links() {
        w.write_record([
            plan.scheme.code().to_string(),
            l.id.0.to_string(),
            t.label(l.a).to_string(),
            t.label(l.b).to_string(),
            l.distance.to_string(),
            plan.working_cap[l.id.0].to_string(),
            plan.spare_cap[l.id.0].to_string(),
        ])?;
    }
    Ok(csv_text(w))
}

fn plan_table(plan: &ProtectionPlan, scenario: &Scenario) -> String {
    let t = &scenario.topology;
    let mut s = format!("{} plan for {}\n", plan.scheme.title(), scenario.name);
    let _ = writeln!(s, "{:>6} {:>6} {:>10} {:>8} {:>6}", "link", "", "km", "working", "spare");
    for l in t.links() {
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>10.1} {:>8} {:>6}",
            t.label(l.a),
            t.label(l.b),
            l.distance,
            plan.working_cap[l.id.0],
            plan.spare_cap[l.id.0]
        );
    }
    let _ = writeln!(
        s,
        "working {:.1}  spare {:.1}  total {:.1}",
        plan.working_capacity(t),
        plan.spare_capacity(t),
        plan.total_capacity(t)
    );
    s
}

#[derive(Serialize)]
struct CompareDoc<'a> {
    scenario: &'a str,
    reconstructed: bool,
    results: Vec<&'a SchemeResult>,
}

fn run_code(runs: &[(ProtectionPlan, SweepReport)]) -> i32 {
    if runs.iter().all(|(p, r)| p.is_complete() && r.all_recovered()) {
        EXIT_OK
    } else {
        EXIT_PARTIAL
    }
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<i32> {
    let scenario = fixtures::resolve(&cfg.scenario)?;
    let runs = evaluate(&scenario, cfg)?;
    for (plan, _) in &runs {
        eprint!("{}", describe_uncovered(plan, &scenario));
    }
    let results: Vec<&SchemeResult> = runs.iter().map(|(_, r)| &r.result).collect();
    let text = match cfg.format {
        Format::Csv => compare_csv(&results, &cfg.switch_times)?,
        Format::Json => {
            let doc = CompareDoc {
                scenario: &scenario.name,
                reconstructed: scenario.reconstructed,
                results,
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
        Format::Table => compare_table(&scenario, &results, &cfg.switch_times),
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(run_code(&runs))
}

/// Column order: scheme, SCP, RT per C, QoR per C, failed recoveries.
pub fn compare_csv(results: &[&SchemeResult], switch_times: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["scheme".to_string(), "scp_percent".to_string()];
    header.extend(switch_times.iter().map(|&c| format!("rt_ms@{}", c_label(c))));
    header.extend(switch_times.iter().map(|&c| format!("qor@{}", c_label(c))));
    header.push("failed_recoveries".into());
    w.write_record(&header)?;
    for r in results {
        let mut row = vec![r.scheme.code().to_string(), format!("{:.3}", r.scp)];
        row.extend(r.points.iter().map(|p| ms(p.rt)));
        row.extend(r.points.iter().map(|p| format!("{:.6}", p.qor)));
        row.push(r.failed_recoveries.to_string());
        w.write_record(&row)?;
    }
    Ok(csv_text(w))
}

fn compare_table(scenario: &Scenario, results: &[&SchemeResult], switch_times: &[f64]) -> String {
    let mut s = String::new();
    let tag = if scenario.reconstructed { " (reconstructed)" } else { "" };
    let t = &scenario.topology;
    let _ = writeln!(
        s,
        "{}{tag}, {} nodes, {} spans",
        scenario.name,
        t.node_count(),
        t.link_count()
    );
    let _ = write!(s, "{:<16}{:>8}  RT (ms) for C (ms) =", "", "");
    for &c in switch_times {
        let _ = write!(s, " {:>7}", c_label(c));
    }
    s.push('\n');
    for r in results {
        let _ = write!(s, "{:<16}{:>7.0}%  {:<19}", r.scheme.title(), r.scp, "");
        for p in &r.points {
            let _ = write!(s, " {:>7.1}", p.rt * 1e3);
        }
        if r.failed_recoveries > 0 {
            let _ = write!(s, "  ({} failures not recovered)", r.failed_recoveries);
        }
        s.push('\n');
    }
    let _ = writeln!(s, "{:<16}{:>8}  QoR", "", "");
    for r in results {
        let _ = write!(s, "{:<16}{:>8}  {:<19}", r.scheme.title(), "", "");
        for p in &r.points {
            let _ = write!(s, " {:>7.3}", p.qor);
        }
        s.push('\n');
    }
    s
}

pub fn cmd_qor_curve(cfg: &RunConfig) -> Result<i32> {
    let scenario = fixtures::resolve(&cfg.scenario)?;
    let runs = evaluate(&scenario, cfg)?;
    let results: Vec<&SchemeResult> = runs.iter().map(|(_, r)| &r.result).collect();
    let text = match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Series<'a> {
                scheme: Scheme,
                switch_ms: Vec<f64>,
                qor: Vec<f64>,
                #[serde(skip)]
                _r: std::marker::PhantomData<&'a ()>,
            }
            let series: Vec<Series> = results
                .iter()
                .map(|r| Series {
                    scheme: r.scheme,
                    switch_ms: r.points.iter().map(|p| p.switch * 1e3).collect(),
                    qor: r.points.iter().map(|p| p.qor).collect(),
                    _r: std::marker::PhantomData,
                })
                .collect();
            serde_json::to_string_pretty(&series)? + "\n"
        }
        Format::Csv | Format::Table => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["scheme", "switch_ms", "rt_ms", "qor"])?;
            for r in &results {
                for p in &r.points {
                    w.write_record([
                        r.scheme.code().to_string(),
                        c_label(p.switch),
                        ms(p.rt),
                        format!("{:.6}", p.qor),
                    ])?;
                }
            }
            csv_text(w)
        }
    };
    emit(cfg.out.as_deref(), &text)?;
    Ok(run_code(&runs))
}

pub fn cmd_validate(cfg: &RunConfig) -> Result<i32> {
    let scenario = fixtures::resolve(&cfg.scenario)?;
    let t = &scenario.topology;
    let mut s = format!(
        "{}: {} nodes, {} links, {} demands{}\n",
        scenario.name,
        t.node_count(),
        t.link_count(),
        scenario.demands.len(),
        if scenario.reconstructed { ", reconstructed" } else { "" }
    );
    for w in t.warnings() {
        match w {
            TopologyWarning::DegreeOne { node } => {
                let _ = writeln!(s, "warning: node {} has a single link", t.label(*node));
            }
        }
    }
    for l in t.bridges() {
        let l = t.link(l);
        let _ = writeln!(s, "warning: link {}-{} is a bridge", t.label(l.a), t.label(l.b));
    }
    emit(cfg.out.as_deref(), &s)?;
    Ok(EXIT_OK)
}

/// Parses `args` and runs the selected command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let (args, cmd): (RunArgs, fn(&RunConfig) -> Result<i32>) = match cli.command {
        Command::Plan(a) => (a, cmd_plan),
        Command::Compare(a) => (a, cmd_compare),
        Command::QorCurve(a) => (a, cmd_qor_curve),
        Command::Validate(a) => (a, cmd_validate),
    };
    match RunConfig::try_from(args).and_then(|cfg| cmd(&cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
