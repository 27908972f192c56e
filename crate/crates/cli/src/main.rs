//! `hds`: classify maximal few-distance sets containing the Hamming
//! embedding.

mod cache;
mod report;

use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hds_core::assembly::{classify, verify_union, AssemblyOptions, VerifyMode};
use hds_core::exact::{quad_sq_dist, PointSetFile};
use hds_core::extended::{classify_extended, flat_hamming};
use hds_core::families::SubsetOptions;
use hds_core::search::{enumerate_addable_classes, hamming_is_maximal, max_nonmaximal_n};
use serde::Serialize;

use cache::Cache;
use report::{extended_csv, extended_text, ClassifySummary, EnumerateSummary};

#[derive(Parser, Debug)]
#[command(name = "hds", version, about = "Maximal m-distance sets containing the Hamming embedding H̃(n,m)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text", env = "HDS_FORMAT")]
    format: Format,

    /// Directory for cached classifications.
    #[arg(long, global = true, env = "HDS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// `full` checks every pair involving an added point; `fast` samples
    /// large ranges.
    #[arg(long, global = true, value_enum, default_value = "full", env = "HDS_VERIFY")]
    verify: Verify,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0, env = "HDS_THREADS")]
    threads: usize,

    /// Time budget in seconds for each budgeted clique search.
    #[arg(long, global = true, default_value_t = 10.0, env = "HDS_CLIQUE_BUDGET")]
    clique_budget: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Addable classes for each (n, m).
    Enumerate {
        #[arg(long, env = "HDS_N", value_parser = parse_range)]
        n: Range,
        #[arg(long, env = "HDS_M", value_parser = parse_range)]
        m: Range,
        /// Also list the expansions of classes with M < 2m.
        #[arg(long)]
        expanded: bool,
    },
    /// Compatibility graph, maximal cliques and assembled sets.
    Classify {
        #[arg(long, env = "HDS_M", value_parser = parse_range)]
        m: Range,
        /// Defaults to every n for which H̃(n,m) is not maximal.
        #[arg(long, env = "HDS_N", value_parser = parse_range)]
        n: Option<Range>,
        /// Write each assembled set's added points as JSON into this directory.
        #[arg(long)]
        emit_points: Option<PathBuf>,
    },
    /// Check a JSON point set against H̃(n,m).
    Verify { file: PathBuf },
    /// Maximal sets in one dimension higher for m = 2.
    Section6 {
        #[arg(long, env = "HDS_N", value_parser = parse_range)]
        n: Range,
    },
    /// Largest totals per non-maximal n, as (n, d, total) rows.
    Tables {
        #[arg(long, env = "HDS_M", value_parser = parse_range, default_value = "2-4")]
        m: Range,
    },
    /// Time classification for each (n, m).
    Bench {
        #[arg(long, env = "HDS_M", value_parser = parse_range)]
        m: Range,
        #[arg(long, env = "HDS_N", value_parser = parse_range)]
        n: Option<Range>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Verify {
    Fast,
    Full,
}

type Range = RangeInclusive<u32>;

/// `7` or `2-30`.
fn parse_range(s: &str) -> std::result::Result<Range, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("{t:?}: {e}"));
    let r = match s.split_once('-') {
        Some((a, b)) => num(a)?..=num(b)?,
        None => num(s)?..=num(s)?,
    };
    if r.is_empty() {
        return Err(format!("empty range {s}"));
    }
    Ok(r)
}

/// Verification failures exit with 1, everything else with 2.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

struct Runner {
    format: Format,
    cache: Option<Cache>,
    opts: AssemblyOptions,
}

impl Runner {
    fn new(cli: &Cli) -> Result<Self> {
        if !(cli.clique_budget > 0.0 && cli.clique_budget.is_finite()) {
            bail!("--clique-budget must be positive, got {}", cli.clique_budget);
        }
        let cache = cli.cache_dir.as_deref().map(Cache::open).transpose()?;
        let opts = AssemblyOptions {
            subset: SubsetOptions { budget: Duration::from_secs_f64(cli.clique_budget), ..Default::default() },
            verify: match cli.verify {
                Verify::Fast => VerifyMode::Fast,
                Verify::Full => VerifyMode::Full,
            },
            ..Default::default()
        };
        Ok(Self { format: cli.format, cache, opts })
    }

    fn settings(&self) -> String {
        format!("{:?}/{:?}/{}", self.opts.verify, self.opts.subset.budget, self.opts.union_cap)
    }

    fn classify(&self, n: u32, m: u32, emit: Option<&PathBuf>) -> Result<ClassifySummary> {
        let key = Cache::key(n, m, &self.settings());
        if emit.is_none() {
            if let Some(hit) = self.cache.as_ref().and_then(|c| c.load(&key)) {
                return Ok(hit);
            }
        }
        let r = classify(n, m, &self.opts)?;
        if let Some(dir) = emit {
            fs::create_dir_all(dir)?;
            for (i, a) in r.assembled.iter().enumerate() {
                let path = dir.join(format!("m{m}-n{n}-{i}.json"));
                let file = PointSetFile::from_points(n, m, &a.points);
                fs::write(&path, serde_json::to_string(&file)?).with_context(|| path.display().to_string())?;
            }
        }
        let s = ClassifySummary::from(&r);
        if let Some(c) = &self.cache {
            c.store(&key, &s)?;
        }
        Ok(s)
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

/// Non-maximal n for `m`, in order.
fn non_maximal(m: u32) -> Result<Vec<u32>> {
    let top = max_nonmaximal_n(m)?;
    let mut out = Vec::new();
    for n in 2..=top {
        if !hamming_is_maximal(n, m)? {
            out.push(n);
        }
    }
    Ok(out)
}

fn classify_targets(m: u32, n: &Option<Range>) -> Result<Vec<u32>> {
    match n {
        Some(r) => Ok(r.clone().collect()),
        None => non_maximal(m),
    }
}

fn run(cli: Cli) -> Result<String> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    let runner = Runner::new(&cli)?;
    let mut out = String::new();
    match &cli.command {
        Command::Enumerate { n, m, expanded } => {
            let mut all = Vec::new();
            for m in m.clone() {
                for n in n.clone() {
                    all.push(EnumerateSummary::new(n, m, &enumerate_addable_classes(n, m)?, *expanded));
                }
            }
            match runner.format {
                Format::Json => out = json(&all)?,
                Format::Text => all.iter().for_each(|s| out += &s.text()),
                Format::Csv => {
                    out = "n,m,kind,class\n".into();
                    all.iter().for_each(|s| out += &s.csv());
                }
            }
        }
        Command::Classify { m, n, emit_points } => {
            let mut all = Vec::new();
            for m in m.clone() {
                for n in classify_targets(m, n)? {
                    all.push(runner.classify(n, m, emit_points.as_ref())?);
                }
            }
            out = match runner.format {
                Format::Json => json(&all)?,
                Format::Text => all.iter().map(ClassifySummary::text).collect::<Vec<_>>().join("\n"),
                Format::Csv => {
                    let rows: Vec<String> = all.iter().map(ClassifySummary::csv_row).collect();
                    format!("n,d,total\n{}\n", rows.join("\n"))
                }
            };
            if let Some(bad) = all.iter().find(|s| !s.all_verified()) {
                print!("{out}");
                return Err(VerificationFailed(format!("verification failed for (n, m) = ({}, {})", bad.n, bad.m)).into());
            }
        }
        Command::Verify { file } => {
            let text = fs::read_to_string(file).with_context(|| file.display().to_string())?;
            let set: PointSetFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
            let (passed, body) = if set.root_points.is_empty() {
                let cert = verify_union(&set.scaled_points()?, set.n, set.m, runner.opts.verify)?;
                let body = match runner.format {
                    Format::Json => json(&cert)?,
                    _ => {
                        let mut s = format!(
                            "{}: {} points, {} pairs checked ({:?}{})\n",
                            if cert.passed { "PASS" } else { "FAIL" },
                            cert.size,
                            cert.pairs_checked,
                            cert.mode,
                            if cert.sampled { ", sampled" } else { "" }
                        );
                        if let Some(w) = &cert.witness {
                            s += &format!("witness: {w}\n");
                        }
                        s
                    }
                };
                (cert.passed, body)
            } else {
                verify_root_points(&set)?
            };
            out = body;
            if !passed {
                print!("{out}");
                return Err(VerificationFailed(format!("{} is not a valid set", file.display())).into());
            }
        }
        Command::Section6 { n } => {
            let reports = n.clone().map(classify_extended).collect::<hds_core::Result<Vec<_>>>()?;
            out = match runner.format {
                Format::Json => json(&reports)?,
                Format::Text => reports.iter().map(extended_text).collect::<Vec<_>>().join("\n"),
                Format::Csv => {
                    let body: String = reports.iter().map(|r| extended_csv(r).split_once('\n').unwrap().1.to_string()).collect();
                    format!("n,set,size,count\n{body}")
                }
            };
        }
        Command::Tables { m } => {
            let mut rows = Vec::new();
            for m in m.clone() {
                for n in non_maximal(m)? {
                    rows.push(runner.classify(n, m, None)?);
                }
            }
            out = match runner.format {
                Format::Json => json(&rows.iter().map(|s| (s.m, s.n, s.d, s.largest_total)).collect::<Vec<_>>())?,
                Format::Csv => {
                    let mut s = String::new();
                    for m in m.clone() {
                        s += &format!("# m = {m}\nn,d,total\n");
                        rows.iter().filter(|r| r.m == m).for_each(|r| s += &format!("{}\n", r.csv_row()));
                    }
                    s
                }
                Format::Text => {
                    let mut s = String::new();
                    for m in m.clone() {
                        s += &format!("m = {m}\n{:>4} {:>4} {:>8}\n", "n", "d", "total");
                        for r in rows.iter().filter(|r| r.m == m) {
                            s += &format!("{:>4} {:>4} {:>8}\n", r.n, r.d, r.largest_total);
                        }
                    }
                    s
                }
            };
        }
        Command::Bench { m, n } => {
            let mut rows = Vec::new();
            for m in m.clone() {
                for n in classify_targets(m, n)? {
                    let t = Instant::now();
                    let r = classify(n, m, &runner.opts)?;
                    rows.push((n, m, r.largest_total, t.elapsed().as_secs_f64()));
                }
            }
            out = match runner.format {
                Format::Json => json(&rows)?,
                _ => {
                    let mut s = String::from("n,m,total,seconds\n");
                    for (n, m, t, secs) in rows {
                        s += &format!("{n},{m},{t},{secs:.3}\n");
                    }
                    s
                }
            };
        }
    }
    Ok(out)
}

/// Points one dimension above `H̃(n,2)`: every squared distance to the flat
/// Hamming points and to each other must be 2 or 4.
fn verify_root_points(set: &PointSetFile) -> Result<(bool, String)> {
    if set.m != 2 {
        bail!("points with an extra coordinate are defined only for m = 2, got m = {}", set.m);
    }
    let pts = set.root_points()?;
    let flat = flat_hamming(set.n)?;
    let mut pairs = 0u64;
    for (i, p) in pts.iter().enumerate() {
        for (j, q) in flat.iter().chain(&pts[i + 1..]).enumerate() {
            pairs += 1;
            let d = quad_sq_dist(p, q)?;
            if !matches!(d.as_integer(), Some(2 | 4)) {
                let other = if j < flat.len() { format!("Hamming point {j}") } else { format!("point {}", i + 1 + j - flat.len()) };
                return Ok((false, format!("FAIL: point {i} and {other} at squared distance {d}\n")));
            }
        }
    }
    Ok((true, format!("PASS: {} points, {pairs} pairs checked\n", pts.len() + flat.len())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
