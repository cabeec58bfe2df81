//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use foam_core::complex::DEFAULT_CUBE_CAP;
use foam_core::diagrams::{self, source_pd, CATALOGUE, REIDEMEISTER_PAIRS};
use foam_core::foamrel::{random_closed_word, relation_table, two_vertex_deloop_holds, CircleKind, Facet, SeamSide};
use foam_core::pipeline::{bench_diagram, bench_report, compute_homology, oracle_tables, DEFAULT_BENCH_SET};
use foam_core::tangle::EdgeLabel;
use foam_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FIGURE_EIGHT_BUDGET: Duration = Duration::from_secs(1);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const RANDOM_WORDS: usize = 1000;
const WORD_SEED: u64 = 20;
const PEAK_BOUND_8_19: usize = 64;
const FIGURE_EIGHT_PEAK: usize = 8;

type Outcome = (bool, String);
type Place = (u8, usize);
type Shape = (Vec<(i32, i32, Vec<(Place, Place)>)>, usize, LaurentPoly);

fn khovanov() -> Specialization {
    Specialization::khovanov()
}

fn c1_figure_eight() -> Outcome {
    let pd = diagrams::find("4_1").unwrap().pd();
    let t = Instant::now();
    let (table, _) = compute_homology(&pd, &khovanov(), &pd.ordering_heuristic(), DebugLevel::Off).unwrap();
    let elapsed = t.elapsed();
    let want = vec![(-2, 5), (-1, 1), (0, -1), (0, 1), (1, -1), (2, -5)];
    let ok = table.support() == want && table.ranks.values().all(|&r| r == 1) && elapsed < FIGURE_EIGHT_BUDGET;
    (ok, format!("support {:?} in {:.1} ms", table.support(), elapsed.as_secs_f64() * 1e3))
}

fn c2_deloop() -> Outcome {
    let both = check_deloop_maps().unwrap();
    let exact = two_vertex_deloop_holds(-RingElem::i()).unwrap();
    let perturbed = [RingElem::i(), RingElem::int(1), RingElem::int(-1)].map(|f| two_vertex_deloop_holds(f).unwrap());
    let ok = both && exact && perturbed.iter().all(|p| !p);
    (ok, format!("oriented and two-vertex pairs inverse both ways: {both}; perturbed pairs hold: {perturbed:?}"))
}

fn c3_relations() -> Outcome {
    let table = relation_table().unwrap();
    let failed: Vec<_> = table.iter().filter(|r| !r.1).map(|r| r.0.id()).collect();
    let torus = SliceWord::new(vec![
        Slice::Birth(CircleKind::Oriented),
        Slice::Split(0, Facet::Preferred),
        Slice::Merge(0, 1, Facet::Preferred),
        Slice::Death(0),
    ]);
    let t_val = eval_dotless(&torus).unwrap();
    let ufo = SliceWord::new(vec![
        Slice::Birth(CircleKind::TwoVertex(SeamSide::Left)),
        Slice::Handle(0, Facet::Preferred),
        Slice::Death(0),
    ]);
    let u_val = eval_dotless(&ufo).unwrap();
    let ok = failed.is_empty() && t_val == DotlessElem::int(2) && u_val == DotlessElem::gaussian(0, 2);
    (ok, format!("{} relations, failed {failed:?}; T = {t_val}, UFO~ = {u_val}", table.len()))
}

fn c4_oracle() -> Outcome {
    let t = Instant::now();
    let mut mismatched = Vec::new();
    for d in CATALOGUE {
        let tables = oracle_tables(&d.pd(), &khovanov(), DebugLevel::Off).unwrap();
        if tables.windows(2).any(|w| w[0].1 != w[1].1) {
            mismatched.push(d.name);
        }
    }
    let elapsed = t.elapsed();
    let ok = mismatched.is_empty() && elapsed < ORACLE_BUDGET;
    (ok, format!("{} diagrams, 4 routes each, mismatched {mismatched:?}, {:.2} s", CATALOGUE.len(), elapsed.as_secs_f64()))
}

fn c5_poincare() -> Outcome {
    let mut bad = Vec::new();
    let mut fig8 = String::new();
    for d in CATALOGUE {
        let pd = d.pd();
        let (table, _) = compute_homology(&pd, &khovanov(), &pd.ordering_heuristic(), DebugLevel::Off).unwrap();
        let at = table.poincare().at_t_minus_one();
        if at != p2(&pd).unwrap() {
            bad.push(d.name);
        }
        if d.name == "4_1" {
            fig8 = at.to_string();
        }
    }
    (bad.is_empty() && fig8 == "q^5 + q^-5", format!("mismatches {bad:?}; figure-eight {fig8}"))
}

/// Object multiset of a simplified open braid, with boundary labels
/// replaced by (side, position).
fn endpoint_shape(word: &[i32], strands: usize) -> Shape {
    let (pd, top) = PDCode::open_braid(word, strands).unwrap();
    let order: Vec<usize> = (0..pd.n_crossings()).collect();
    let (cx, _) = assemble(FrobeniusAlgebra::universal(), true, &pd, &order, DebugLevel::PerStep).unwrap();
    let place = |l: EdgeLabel| {
        if (l as usize) <= strands && l >= 1 {
            (0u8, l as usize - 1)
        } else {
            (1u8, top.iter().position(|&t| t == l).unwrap())
        }
    };
    let mut objs = Vec::new();
    for id in cx.ids() {
        let (deg, obj) = cx.object(id).unwrap();
        let b = obj.web.boundary();
        let mut arcs: Vec<_> = obj
            .web
            .arcs()
            .into_iter()
            .map(|(p, q)| {
                let (x, y) = (place(b[p].label), place(b[q].label));
                (x.min(y), x.max(y))
            })
            .collect();
        arcs.sort();
        objs.push((deg, obj.qshift, arcs));
    }
    objs.sort();
    (objs, cx.n_entries(), cx.euler_characteristic())
}

fn c6_reidemeister() -> Outcome {
    let mut bad = Vec::new();
    for (name, a, b) in REIDEMEISTER_PAIRS {
        let (pa, pb) = (source_pd(*a), source_pd(*b));
        let ta = compute_homology(&pa, &khovanov(), &pa.ordering_heuristic(), DebugLevel::Off).unwrap().0;
        let tb = compute_homology(&pb, &khovanov(), &pb.ordering_heuristic(), DebugLevel::Off).unwrap().0;
        if ta != tb {
            bad.push(name.to_string());
        }
    }
    // endpoint complexes of the local moves, simplified over R
    let identity = vec![(0, 0, vec![((0, 0), (1, 0)), ((0, 1), (1, 1))])];
    let mut traces = Vec::new();
    for w in [[1, -1], [-1, 1]] {
        let (objs, entries, _) = endpoint_shape(&w, 2);
        traces.push(objs == identity && entries == 0);
    }
    for (l, r) in [(vec![1, 2, 1], vec![2, 1, 2]), (vec![1, 2, -1], vec![-2, 1, 2]), (vec![-1, -2, -1], vec![-2, -1, -2])] {
        traces.push(endpoint_shape(&l, 3) == endpoint_shape(&r, 3));
    }
    for kink in ["X[1,2,2,3]", "X[2,2,3,1]", "X[2,3,1,2]", "X[3,1,2,2]"] {
        let pd = parse_pd(kink).unwrap();
        let (cx, _) = assemble(FrobeniusAlgebra::universal(), true, &pd, &[0], DebugLevel::PerStep).unwrap();
        let single = cx.ids().map(|id| cx.object(id).map(|(d, o)| (d, o.qshift, o.web.n_points())).unwrap()).collect::<Vec<_>>();
        traces.push(single == vec![(0, 0, 2)]);
    }
    let ok = bad.is_empty() && traces.iter().all(|&t| t);
    (ok, format!("{} closed pairs, differing {bad:?}; local traces {traces:?}", REIDEMEISTER_PAIRS.len()))
}

fn c7_deformed() -> Outcome {
    let spec = Specialization::from_ints(1, 0);
    let mut dims = BTreeMap::new();
    for name in ["4_1", "3_1"] {
        let pd = diagrams::find(name).unwrap().pd();
        let (t, _) = compute_homology(&pd, &spec, &pd.ordering_heuristic(), DebugLevel::PerStep).unwrap();
        let alg = FrobeniusAlgebra::new(spec.value_a.clone(), spec.value_h.clone());
        let direct = cohomology(&direct_cube(&alg, false, &pd, DEFAULT_CUBE_CAP).unwrap()).total_rank();
        dims.insert(name, (t.total_rank(), direct));
    }
    (dims.values().all(|&d| d == (2, 2)), format!("total dimension (incremental, direct) {dims:?}"))
}

fn c8_checks() -> Outcome {
    let mut failures = Vec::new();
    for d in CATALOGUE {
        let pd = d.pd();
        if let Err(e) = compute_homology(&pd, &khovanov(), &pd.ordering_heuristic(), DebugLevel::PerStep) {
            failures.push(format!("{} field: {e}", d.name));
        }
        if pd.n_crossings() <= 6 {
            let r = assemble(FrobeniusAlgebra::universal(), true, &pd, &pd.ordering_heuristic(), DebugLevel::PerStep);
            if let Err(e) = r.and_then(|(cx, _)| cx.verify()) {
                failures.push(format!("{} ring: {e}", d.name));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(WORD_SEED);
    let words: Vec<SliceWord> = (0..RANDOM_WORDS).map(|_| random_closed_word(&mut rng, 12)).collect();
    let dotted = words.iter().filter(|w| w.dot_count() > 0).count();
    let agree = cross_validate(&words).unwrap();
    let ok = failures.is_empty() && agree;
    (ok, format!("debug level 2 failures {failures:?}; {RANDOM_WORDS} words ({dotted} dotted) cross-validated: {agree}"))
}

fn c9_bench() -> Outcome {
    let e = bench_diagram("8_19", &diagrams::find("8_19").unwrap().pd(), &khovanov(), DEFAULT_CUBE_CAP).unwrap();
    let resolutions = e.naive.as_ref().map(|n| n.resolutions).unwrap_or(0);
    let peak_ok = e.stats.max_objects < PEAK_BOUND_8_19 && e.ring_stats.max_objects < PEAK_BOUND_8_19;
    let fig8 = bench_diagram("4_1", &diagrams::find("4_1").unwrap().pd(), &khovanov(), DEFAULT_CUBE_CAP).unwrap();
    let fig8_ok = fig8.stats.max_objects <= FIGURE_EIGHT_PEAK && fig8.naive.as_ref().map(|n| n.resolutions) == Ok(16);
    let t27 = bench_diagram("t2_7", &diagrams::find("t2_7").unwrap().pd(), &khovanov(), DEFAULT_CUBE_CAP).unwrap();
    let big = parse_braid(&vec!["s1"; DEFAULT_CUBE_CAP + 1].join(" "), None).unwrap();
    let refused = bench_diagram("t2_13", &big, &khovanov(), DEFAULT_CUBE_CAP).unwrap().naive.is_err();
    let targets: Vec<(String, PDCode)> =
        DEFAULT_BENCH_SET.iter().map(|n| (n.to_string(), diagrams::find(n).unwrap().pd())).chain([("t2_13".to_string(), big)]).collect();
    let report = bench_report(&targets, &khovanov(), DEFAULT_CUBE_CAP).unwrap();
    let path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("bench_report.json");
    let written = std::fs::write(&path, serde_json::to_string_pretty(&report).unwrap()).is_ok();
    let ok = peak_ok && resolutions == 256 && fig8_ok && t27.stats.timeline.len() == 7 && refused && written;
    (
        ok,
        format!(
            "8_19 peak {} (over R {}) vs {resolutions} resolutions; figure-eight peak {}; T(2,7) timeline {} steps; cap refusal {refused}; report {}",
            e.stats.max_objects,
            e.ring_stats.max_objects,
            fig8.stats.max_objects,
            t27.stats.timeline.len(),
            path.display()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("figure-eight homology over Q(i)", c1_figure_eight),
        ("delooping isomorphisms", c2_deloop),
        ("local relation suite", c3_relations),
        ("incremental vs naive oracle", c4_oracle),
        ("Poincare polynomial at t=-1 equals P2", c5_poincare),
        ("Reidemeister invariance and traces", c6_reidemeister),
        ("deformed total dimension", c7_deformed),
        ("internal checks and cross-validation", c8_checks),
        ("peak objects and bench report", c9_bench),
    ];
    let mut all = true;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = f();
        all &= ok;
        println!("{} {}: {name}: {detail}", if ok { "PASS" } else { "FAIL" }, k + 1);
    }
    if !all {
        std::process::exit(1);
    }
}
