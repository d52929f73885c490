#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use barlax::chi::{chi_general, chi_pair};
use barlax::model::ModelSpec;
use barlax::shuffle::ColouredShuffle;
use barlax::simplicial::{normalize_with_trace, BasicArrow, SimplicialWord};
use barlax::suites::{all_pass, run, to_json_lines, Suite, SuiteConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "barlax", version, about = "Shuffles, χ tables and coherence checks for the reduced bar construction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal form of a word such as `d2_1 . d3_3`, with the rewrite trace.
    Normalize { word: String },
    /// Every normalizing path of a shuffle such as `(d3_2 @2) (d2_1 @1)`.
    Paths {
        shuffle: String,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        /// Arity, when higher than the largest colour used.
        #[arg(long)]
        r: Option<usize>,
    },
    /// The χ tuple for a swap of `f` (colour k) past `g` (colour l).
    Chi {
        f: String,
        g: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        l: usize,
        #[arg(long, default_value_t = 1)]
        u: usize,
        #[arg(long, default_value_t = 1)]
        v: usize,
        #[arg(long, default_value_t = 1)]
        w: usize,
    },
    /// Runs a verification suite and writes a JSON-lines report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value = "all")]
    suite: String,
    /// `finset:r=3,split=1[,corrupt]` or `free:r=3`.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long)]
    split: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_dim: usize,
    #[arg(long, default_value_t = 2)]
    max_size: usize,
    #[arg(long, default_value_t = 4)]
    max_len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 1000)]
    limit: usize,
    /// Report file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Adds per-record wall time (makes reports differ between runs).
    #[arg(long)]
    timing: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<bool> {
    match cmd {
        Command::Normalize { word } => normalize(&word),
        Command::Paths { shuffle, limit, r } => paths(&shuffle, limit, r),
        Command::Chi { f, g, k, l, u, v, w } => chi(&f, &g, k, l, u, v, w),
        Command::Verify(args) => verify(args),
    }
}

fn normalize(text: &str) -> anyhow::Result<bool> {
    let word: SimplicialWord = text.parse()?;
    let (nf, trace) = normalize_with_trace(&word);
    println!("{nf}");
    for (i, step) in trace.iter().enumerate() {
        println!("  {}. at {}: {}  =>  {}", i + 1, step.position, step.rule, step.result);
    }
    Ok(true)
}

fn paths(text: &str, limit: usize, r: Option<usize>) -> anyhow::Result<bool> {
    let theta = ColouredShuffle::parse_with(text, r)?;
    let found = theta.enumerate_paths(limit);
    let mut out = std::io::stdout().lock();
    for (i, p) in found.paths.iter().enumerate() {
        let swaps: Vec<String> = p.swaps.iter().map(ToString::to_string).collect();
        writeln!(out, "path {}: [{}]", i + 1, swaps.join(" "))?;
        for s in p.shuffles()? {
            writeln!(out, "    {s}")?;
        }
    }
    let lengths: Vec<usize> = found.paths.iter().map(|p| p.len()).collect();
    let common = lengths.first().copied().unwrap_or(0);
    writeln!(out, "paths: {}{}", found.paths.len(), if found.truncated { " (truncated)" } else { "" })?;
    writeln!(out, "inversions: {}", theta.inversion_count())?;
    if lengths.iter().any(|&n| n != common) {
        writeln!(out, "lengths differ: {lengths:?}")?;
        return Ok(false);
    }
    writeln!(out, "common length: {common}")?;
    Ok(common == theta.inversion_count())
}

fn chi(f: &str, g: &str, k: usize, l: usize, u: usize, v: usize, w: usize) -> anyhow::Result<bool> {
    let f: BasicArrow = f.parse()?;
    let g: BasicArrow = g.parse()?;
    if (u, v, w) == (1, 1, 1) && (k, l) == (1, 2) {
        println!("{}", chi_pair(f, g));
    } else {
        println!("{}", chi_general(k, l, u, v, w, f, g)?);
    }
    Ok(true)
}

fn workers() -> anyhow::Result<Option<usize>> {
    match std::env::var("BARLAX_WORKERS") {
        Ok(v) if !v.trim().is_empty() => {
            let n: usize = v.trim().parse().with_context(|| format!("BARLAX_WORKERS=`{v}` is not a number"))?;
            if n == 0 {
                bail!("BARLAX_WORKERS must be positive");
            }
            Ok(Some(n))
        }
        _ => Ok(None),
    }
}

fn verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let model: Option<ModelSpec> = a.model.as_deref().map(str::parse).transpose()?;
    let cfg = SuiteConfig {
        suite: a.suite.parse::<Suite>()?,
        r: a.r,
        model,
        split: a.split,
        max_dim: a.max_dim,
        max_size: a.max_size,
        max_len: a.max_len,
        seed: a.seed,
        trials: a.trials,
        limit: a.limit,
        timing: a.timing,
        workers: workers()?,
    };
    let records = run(&cfg)?;
    let report = to_json_lines(&records);
    match &a.out {
        Some(path) => fs::write(path, &report).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{report}"),
    }
    let failed = records.iter().filter(|r| !r.passed()).count();
    eprintln!("{}: {} records, {} failed", cfg.suite, records.len(), failed);
    Ok(all_pass(&records))
}
