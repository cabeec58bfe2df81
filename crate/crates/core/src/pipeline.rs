//! End-to-end orchestration: input resolution, homology, P2, relation
//! checks, route comparisons, complex dumps and benchmark reports.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{assemble, naive_cube, ComplexJson, DebugLevel, FormalComplex, SimplifyStats, DEFAULT_CUBE_CAP};
use crate::diagrams::{self, CATALOGUE};
use crate::error::{FoamError, Result};
use crate::foamrel::{check_deloop_maps, cross_validate, random_closed_word, relation_table};
use crate::frobenius::FrobeniusAlgebra;
use crate::homology::{apply_tqft, cohomology, cohomology_at, direct_cube, BigradedTable};
use crate::ring::{FieldScalar, RingElem, Specialization};
use crate::skein::p2;
use crate::tangle::{parse_braid, parse_pd, PDCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Homology,
    P2,
    Relcheck,
    Oracle,
    Bench,
    Dump,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderPolicy {
    Heuristic,
    Given(Vec<usize>),
    /// every permutation, for diagrams with at most this many crossings
    AllOrders(usize),
}

impl FromStr for OrderPolicy {
    type Err = FoamError;

    /// `heuristic`, `all`, `all:<k>`, or a comma-separated permutation.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "heuristic" {
            return Ok(OrderPolicy::Heuristic);
        }
        if s == "all" {
            return Ok(OrderPolicy::AllOrders(6));
        }
        if let Some(k) = s.strip_prefix("all:") {
            return k.parse().map(OrderPolicy::AllOrders).map_err(|_| FoamError::Parse(format!("bad order bound `{k}`")));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| FoamError::Parse(format!("bad crossing index `{t}` in order"))))
            .collect::<Result<Vec<_>>>()
            .map(OrderPolicy::Given)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = FoamError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(FoamError::Parse(format!("unknown format `{s}` (table, json or csv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Pd(String),
    Braid(String),
    File(PathBuf),
    /// a bundled diagram, looked up by name
    Named(String),
}

impl Input {
    pub fn load(&self) -> Result<(String, PDCode)> {
        match self {
            Input::Pd(t) => Ok(("pd".into(), parse_pd(t)?)),
            Input::Braid(t) => Ok(("braid".into(), parse_braid(t, None)?)),
            Input::Named(n) => Ok((n.clone(), diagrams::find(n)?.pd())),
            Input::File(p) => {
                let text = std::fs::read_to_string(p)?;
                let text = text.trim();
                let pd = if text.contains("X[") || text.contains("free_loops") { parse_pd(text)? } else { parse_braid(text, None)? };
                Ok((p.display().to_string(), pd))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: Option<Input>,
    pub spec: Specialization,
    pub order: OrderPolicy,
    pub format: OutputFormat,
    pub debug: DebugLevel,
    pub seed: u64,
    pub stats: bool,
    pub poincare: bool,
    pub dump_complex: Option<PathBuf>,
    /// random words for the relcheck cross-validation
    pub words: usize,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            input: None,
            spec: Specialization::khovanov(),
            order: OrderPolicy::Heuristic,
            format: OutputFormat::Table,
            debug: DebugLevel::Off,
            seed: 0,
            stats: false,
            poincare: false,
            dump_complex: None,
            words: 1000,
        }
    }

    fn require_input(&self) -> Result<(String, PDCode)> {
        self.input
            .as_ref()
            .ok_or_else(|| FoamError::Parse("this mode needs a diagram: pass --pd, --braid, --file or --knot".into()))?
            .load()
    }
}

/// What a run prints, and whether every requested check passed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub stderr: String,
    pub success: bool,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Self { stdout, stderr: String::new(), success: true }
    }

    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.mode {
        Mode::Homology => run_homology(cfg),
        Mode::P2 => {
            let (_, pd) = cfg.require_input()?;
            Ok(Report::ok(format!("{}\n", p2(&pd)?)))
        }
        Mode::Relcheck => run_relcheck(cfg),
        Mode::Oracle => run_oracle(cfg),
        Mode::Bench => run_bench(cfg),
        Mode::Dump => {
            let (_, pd) = cfg.require_input()?;
            let order = resolve_order(&cfg.order, &pd)?;
            let (cx, _) = assemble(FrobeniusAlgebra::universal(), true, &pd, &order[0], cfg.debug)?;
            let text = serde_json::to_string_pretty(&cx.to_json())?;
            match &cfg.dump_complex {
                Some(path) => {
                    std::fs::write(path, &text)?;
                    Ok(Report::ok(format!("wrote {} objects to {}\n", cx.n_objects(), path.display())))
                }
                None => Ok(Report::ok(text + "\n")),
            }
        }
    }
}

/// The orders a policy asks for; the first is the one reported.
pub fn resolve_order(policy: &OrderPolicy, pd: &PDCode) -> Result<Vec<Vec<usize>>> {
    match policy {
        OrderPolicy::Heuristic => Ok(vec![pd.ordering_heuristic()]),
        OrderPolicy::Given(o) => Ok(vec![o.clone()]),
        OrderPolicy::AllOrders(k) => {
            let n = pd.n_crossings();
            if n > *k {
                return Err(FoamError::InvalidDiagram(format!(
                    "{n} crossings exceed the bound {k} for trying every order"
                )));
            }
            let mut out = vec![pd.ordering_heuristic()];
            let mut perm: Vec<usize> = (0..n).collect();
            permutations(&mut perm, 0, &mut out);
            Ok(out)
        }
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

fn field_algebra(spec: &Specialization) -> FrobeniusAlgebra<FieldScalar> {
    FrobeniusAlgebra::new(spec.value_a.clone(), spec.value_h.clone())
}

/// Homology at a specialization through the incremental pipeline, run
/// directly over Q(i).
pub fn compute_homology(
    pd: &PDCode,
    spec: &Specialization,
    order: &[usize],
    debug: DebugLevel,
) -> Result<(BigradedTable, SimplifyStats)> {
    let (cx, stats) = assemble(field_algebra(spec), spec.is_graded(), pd, order, debug)?;
    let alg = apply_tqft(&cx)?;
    if debug >= DebugLevel::PerCrossing {
        cx.verify()?;
        alg.verify()?;
    }
    Ok((cohomology(&alg), stats))
}

fn render(t: &BigradedTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => t.to_table(),
        OutputFormat::Json => format!("{}\n", t.to_json()),
        OutputFormat::Csv => t.to_csv(),
    }
}

fn run_homology(cfg: &RunConfig) -> Result<Report> {
    let (_, pd) = cfg.require_input()?;
    let orders = resolve_order(&cfg.order, &pd)?;
    let (table, stats) = compute_homology(&pd, &cfg.spec, &orders[0], cfg.debug)?;
    let mut report = Report::ok(render(&table, cfg.format));
    for o in &orders[1..] {
        let (other, _) = compute_homology(&pd, &cfg.spec, o, cfg.debug)?;
        if other != table {
            report.success = false;
            writeln!(report.stderr, "order {o:?} gives a different table").unwrap();
        }
    }
    if orders.len() > 1 && report.success {
        writeln!(report.stderr, "{} crossing orders agree", orders.len()).unwrap();
    }
    if cfg.poincare {
        let p = table.poincare();
        let at = p.at_t_minus_one();
        writeln!(report.stdout, "poincare: {p}").unwrap();
        writeln!(report.stdout, "at t=-1: {at}").unwrap();
        if table.graded {
            let expected = p2(&pd)?;
            if at != expected {
                report.success = false;
                writeln!(report.stderr, "Poincare polynomial at t=-1 differs from P2 = {expected}").unwrap();
            }
        }
    }
    if cfg.stats {
        writeln!(report.stderr, "{}", serde_json::to_string(&stats)?).unwrap();
    }
    if let Some(path) = &cfg.dump_complex {
        let (cx, _) = assemble(FrobeniusAlgebra::universal(), true, &pd, &orders[0], cfg.debug)?;
        std::fs::write(path, serde_json::to_string_pretty(&cx.to_json())?)?;
    }
    Ok(report)
}

/// Reads a dumped complex back and re-verifies it.
pub fn load_complex(path: &std::path::Path) -> Result<FormalComplex<RingElem>> {
    let j: ComplexJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let cx = FormalComplex::from_json(j)?;
    cx.verify()?;
    Ok(cx)
}

fn run_relcheck(cfg: &RunConfig) -> Result<Report> {
    let mut rows: Vec<(String, bool)> = relation_table()?.into_iter().map(|(r, ok)| (r.id().to_string(), ok)).collect();
    rows.push(("deloop-maps".into(), check_deloop_maps()?));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let words: Vec<_> = (0..cfg.words).map(|_| random_closed_word(&mut rng, 12)).collect();
    rows.push((format!("cross-validate({})", cfg.words), cross_validate(&words)?));
    let success = rows.iter().all(|r| r.1);
    let stdout = match cfg.format {
        OutputFormat::Json => {
            let m: serde_json::Map<String, serde_json::Value> =
                rows.iter().map(|(k, v)| (k.clone(), serde_json::Value::Bool(*v))).collect();
            format!("{}\n", serde_json::Value::Object(m))
        }
        OutputFormat::Csv => {
            let mut s = "relation,pass\n".to_string();
            for (k, v) in &rows {
                writeln!(s, "{k},{v}").unwrap();
            }
            s
        }
        OutputFormat::Table => {
            let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
            let mut s = String::new();
            for (k, v) in &rows {
                writeln!(s, "{k:<w$}  {}", if *v { "PASS" } else { "FAIL" }).unwrap();
            }
            s
        }
    };
    Ok(Report { stdout, stderr: String::new(), success })
}

/// Homology of one diagram computed four ways: incremental over Q(i),
/// incremental over R then specialized, the naive cube, and the cube built
/// straight from the Frobenius algebra.
pub fn oracle_tables(pd: &PDCode, spec: &Specialization, debug: DebugLevel) -> Result<Vec<(&'static str, BigradedTable)>> {
    let order = pd.ordering_heuristic();
    let graded = spec.is_graded();
    let (incremental, _) = compute_homology(pd, spec, &order, debug)?;
    let (ring_cx, _) = assemble(FrobeniusAlgebra::universal(), true, pd, &order, debug)?;
    let ring = cohomology_at(&apply_tqft(&ring_cx)?, spec);
    let (cube, _) = naive_cube(field_algebra(spec), graded, pd, DEFAULT_CUBE_CAP)?;
    let cube_alg = apply_tqft(&cube)?;
    let direct = direct_cube(&field_algebra(spec), graded, pd, DEFAULT_CUBE_CAP)?;
    if debug >= DebugLevel::PerCrossing {
        cube.verify()?;
        cube_alg.verify()?;
        direct.verify()?;
    }
    Ok(vec![
        ("incremental", incremental),
        ("incremental-ring", ring),
        ("naive-cube", cohomology(&cube_alg)),
        ("direct-cube", cohomology(&direct)),
    ])
}

fn tables_match(tables: &[(&str, BigradedTable)]) -> bool {
    tables.windows(2).all(|w| w[0].1 == w[1].1)
}

fn run_oracle(cfg: &RunConfig) -> Result<Report> {
    let targets: Vec<(String, PDCode)> = match &cfg.input {
        Some(i) => vec![i.load()?],
        None => CATALOGUE
            .iter()
            .filter(|d| d.pd().n_crossings() <= 8)
            .map(|d| (d.name.to_string(), d.pd()))
            .collect(),
    };
    let mut report = Report::ok(String::new());
    for (name, pd) in &targets {
        let tables = oracle_tables(pd, &cfg.spec, cfg.debug)?;
        let ok = tables_match(&tables);
        if !ok {
            report.success = false;
            for (route, t) in &tables {
                writeln!(report.stderr, "{name} {route}: {}", t.to_json()).unwrap();
            }
        }
        if targets.len() > 1 {
            writeln!(report.stdout, "{name} {}", if ok { "MATCH" } else { "MISMATCH" }).unwrap();
        }
    }
    writeln!(report.stdout, "{}", if report.success { "MATCH" } else { "MISMATCH" }).unwrap();
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct NaiveRun {
    pub millis: f64,
    pub resolutions: u64,
    pub objects: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchEntry {
    pub diagram: String,
    pub crossings: usize,
    pub millis: f64,
    /// incremental run over Q(i) at the requested specialization
    pub stats: SimplifyStats,
    pub ring_millis: f64,
    /// incremental run over the universal ring R
    pub ring_stats: SimplifyStats,
    pub naive: std::result::Result<NaiveRun, String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub spec: String,
    pub cube_cap: usize,
    pub entries: Vec<BenchEntry>,
}

pub const DEFAULT_BENCH_SET: &[&str] = &["3_1", "4_1", "6_2", "t2_7", "8_19"];

/// Times the incremental pipeline against the naive cube on one diagram.
pub fn bench_diagram(name: &str, pd: &PDCode, spec: &Specialization, cap: usize) -> Result<BenchEntry> {
    let order = pd.ordering_heuristic();
    let t = Instant::now();
    let (_, stats) = assemble(field_algebra(spec), spec.is_graded(), pd, &order, DebugLevel::Off)?;
    let millis = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let (_, ring_stats) = assemble(FrobeniusAlgebra::universal(), true, pd, &order, DebugLevel::Off)?;
    let ring_millis = t.elapsed().as_secs_f64() * 1e3;
    let t = Instant::now();
    let naive = naive_cube(field_algebra(spec), spec.is_graded(), pd, cap)
        .map(|(cx, _)| NaiveRun {
            millis: t.elapsed().as_secs_f64() * 1e3,
            resolutions: 1u64 << pd.n_crossings(),
            objects: cx.n_objects(),
        })
        .map_err(|e| e.to_string());
    Ok(BenchEntry { diagram: name.to_string(), crossings: pd.n_crossings(), millis, stats, ring_millis, ring_stats, naive })
}

pub fn bench_report(targets: &[(String, PDCode)], spec: &Specialization, cap: usize) -> Result<BenchReport> {
    let entries = targets.iter().map(|(n, pd)| bench_diagram(n, pd, spec, cap)).collect::<Result<Vec<_>>>()?;
    Ok(BenchReport { spec: format!("a={},h={}", spec.value_a, spec.value_h), cube_cap: cap, entries })
}

fn run_bench(cfg: &RunConfig) -> Result<Report> {
    let targets: Vec<(String, PDCode)> = match &cfg.input {
        Some(i) => vec![i.load()?],
        None => DEFAULT_BENCH_SET.iter().map(|n| Ok((n.to_string(), diagrams::find(n)?.pd()))).collect::<Result<_>>()?,
    };
    let report = bench_report(&targets, &cfg.spec, DEFAULT_CUBE_CAP)?;
    let stdout = match cfg.format {
        OutputFormat::Table => {
            let mut s = format!("{:<10} {:>3} {:>10} {:>6} {:>9} {:>9}  naive\n", "diagram", "n", "ms", "peak", "ring ms", "ring peak");
            for e in &report.entries {
                let naive = match &e.naive {
                    Ok(n) => format!("{:.1} ms, {} resolutions, {} objects", n.millis, n.resolutions, n.objects),
                    Err(msg) => msg.clone(),
                };
                writeln!(
                    s,
                    "{:<10} {:>3} {:>10.2} {:>6} {:>9.2} {:>9}  {naive}",
                    e.diagram, e.crossings, e.millis, e.stats.max_objects, e.ring_millis, e.ring_stats.max_objects
                )
                .unwrap();
            }
            s
        }
        _ => serde_json::to_string_pretty(&report)? + "\n",
    };
    Ok(Report::ok(stdout))
}
