//! Writes a JSON report comparing the incremental pipeline with the naive
//! cube on the default benchmark set, or on the diagrams named on the
//! command line.
//!
//! usage: bench-report [-o report.json] [diagram ...]

use anyhow::Context;
use foam_core::complex::DEFAULT_CUBE_CAP;
use foam_core::diagrams;
use foam_core::pipeline::{bench_report, DEFAULT_BENCH_SET};
use foam_core::Specialization;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1).peekable();
    let mut out = None;
    let mut names = Vec::new();
    while let Some(a) = args.next() {
        if a == "-o" {
            out = Some(args.next().context("-o needs a path")?);
        } else {
            names.push(a);
        }
    }
    if names.is_empty() {
        names = DEFAULT_BENCH_SET.iter().map(|s| s.to_string()).collect();
    }
    let targets = names
        .iter()
        .map(|n| Ok((n.clone(), diagrams::find(n)?.pd())))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let report = bench_report(&targets, &Specialization::khovanov(), DEFAULT_CUBE_CAP)?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => std::fs::write(&path, text + "\n").with_context(|| format!("writing {path}"))?,
        None => println!("{text}"),
    }
    Ok(())
}
