use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use foam_core::{DebugLevel, Input, Mode, OrderPolicy, OutputFormat, RunConfig, Specialization};

#[derive(Parser)]
#[command(name = "foamcalc", version, about = "Universal sl(2) foam cohomology of knots and links")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// planar diagram code, e.g. "X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]"
    #[arg(long, global = true)]
    pd: Option<String>,
    /// braid word, e.g. "s1 s1 s1"
    #[arg(long, global = true)]
    braid: Option<String>,
    /// file holding a PD code or a braid word
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// bundled diagram by name, e.g. 4_1
    #[arg(long, global = true)]
    knot: Option<String>,
    /// specialization of the ring parameters
    #[arg(long, global = true, default_value = "a=0,h=0")]
    spec: String,
    /// crossing order: heuristic, a permutation like 2,0,1, all or all:<k>
    #[arg(long, global = true, default_value = "heuristic")]
    order: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// write the simplified complex over R as JSON
    #[arg(long, global = true)]
    dump_complex: Option<PathBuf>,
    /// print simplification statistics to stderr
    #[arg(long, global = true)]
    stats: bool,
    /// seed for the random words checked by relcheck
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// random words checked by relcheck
    #[arg(long, global = true, default_value_t = 1000)]
    words: usize,
    /// 0 off, 1 verify after each crossing, 2 after every step
    #[arg(long, global = true, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
    debug_checks: u8,
    /// also print the Poincare polynomial and compare it with P2 at t = -1
    #[arg(long, global = true)]
    poincare: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// bigraded homology table
    Homology,
    /// the sl(2) polynomial by state sum
    P2,
    /// check the local foam relations
    Relcheck,
    /// compare the incremental pipeline with the full cube
    Oracle,
    /// time the incremental pipeline against the naive cube
    Bench,
    /// dump the simplified complex over R as JSON
    Dump,
}

#[derive(ValueEnum, Clone, Copy)]
enum Format {
    Table,
    Json,
    Csv,
}

fn config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mode = match cli.command {
        Command::Homology => Mode::Homology,
        Command::P2 => Mode::P2,
        Command::Relcheck => Mode::Relcheck,
        Command::Oracle => Mode::Oracle,
        Command::Bench => Mode::Bench,
        Command::Dump => Mode::Dump,
    };
    let inputs: Vec<Input> = [
        cli.pd.clone().map(Input::Pd),
        cli.braid.clone().map(Input::Braid),
        cli.file.clone().map(Input::File),
        cli.knot.clone().map(Input::Named),
    ]
    .into_iter()
    .flatten()
    .collect();
    if inputs.len() > 1 {
        bail!("give at most one of --pd, --braid, --file, --knot");
    }
    let mut cfg = RunConfig::new(mode);
    cfg.input = inputs.into_iter().next();
    cfg.spec = cli.spec.parse::<Specialization>().with_context(|| format!("parsing --spec {}", cli.spec))?;
    cfg.order = cli.order.parse::<OrderPolicy>()?;
    cfg.format = match cli.format {
        Format::Table => OutputFormat::Table,
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    cfg.debug = DebugLevel::from_u8(cli.debug_checks);
    cfg.seed = cli.seed;
    cfg.words = cli.words;
    cfg.stats = cli.stats;
    cfg.poincare = cli.poincare;
    cfg.dump_complex = cli.dump_complex.clone();
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = config(&cli).and_then(|cfg| Ok(foam_core::run(&cfg)?));
    match result {
        Ok(report) => {
            print!("{}", report.stdout);
            eprint!("{}", report.stderr);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
