//! `tc`: build, evaluate and check certified chains from the command line.
//!
//! Exit status is 0 when every check passes, 1 when any check fails and 2 on
//! usage or parse errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tc_core::almost_inclusion::{
    base_cert, split_pair, verify_certificate, ChainFamily, Embedding, ExplicitFamily, LazySet,
    OrderCertificate, SplitInterval, Tree, TreeAddress, DEFAULT_DEPTH_CAP,
};
use tc_core::baire_chain::{verify_chain_monotone_on, ChainReport};
use tc_core::cont_chain::{build_chain, format_eval, EvalMode, MetricSpaceDesc};
use tc_core::ordinal::{sample_below, Ordinal};

/// Interval certificates given as two sets are completed by scanning this far
/// for exceptions.
const INTERVAL_PROBE: u64 = 10_000;

/// Fundamental-sequence branching used when sampling indices.
const SAMPLE_BRANCH: u64 = 8;

const WORKER_STACK: usize = 512 << 20;

#[derive(Parser, Debug)]
#[command(name = "tc", version, about = "Certified transfinite chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Embed an ordinal into an interval and check sampled pairs.
    Embed {
        #[arg(long)]
        ordinal: String,
        /// Two sets `lower,upper`; defaults to rows(0),rows(1).
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the chain of continuous functions on a finite metric space.
    Cont {
        #[arg(long)]
        space: PathBuf,
        /// `d,x`: print f_d(x).
        #[arg(long)]
        eval: Option<String>,
        /// Evaluate with only this many levels instead of exactly.
        #[arg(long)]
        truncate: Option<u32>,
        #[arg(long)]
        check_all: bool,
    },
    /// Check that the characteristic functions of a chain are monotone.
    Baire {
        #[arg(long, required_unless_present = "family")]
        ordinal: Option<String>,
        /// A file of consecutive link certificates, one per line.
        #[arg(long, conflicts_with = "ordinal")]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        pairs: usize,
        /// Extra family points, besides the pairs' own, at which functions are
        /// compared.
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify a certificate file.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
    /// Split an interval into an w-chain and check the links.
    Split {
        #[arg(long)]
        interval: Option<String>,
        #[arg(long, default_value_t = 4)]
        members: u64,
        /// Elements printed per member.
        #[arg(long, default_value_t = 8)]
        show: usize,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
    /// Print a node of the tree and check its interval.
    Tree {
        /// Comma-separated entries, e.g. `0,1`.
        #[arg(long)]
        address: String,
        #[arg(long, default_value_t = 8)]
        show: usize,
        #[arg(long, default_value_t = 32)]
        depth: usize,
    },
}

enum Outcome {
    Pass,
    Fail,
}

/// A usage or input error: exit status 2.
struct Usage(String);

type Run = Result<(String, Outcome), Usage>;

fn usage(e: impl std::fmt::Display) -> Usage {
    Usage(e.to_string())
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn depth_cap() -> Result<usize, Usage> {
    match std::env::var("TC_DEPTH_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Usage(format!("TC_DEPTH_CAP must be a natural number, got {v:?}"))),
        Err(_) => Ok(DEFAULT_DEPTH_CAP),
    }
}

fn read(path: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn positive_depth(depth: usize) -> Result<usize, Usage> {
    if depth == 0 {
        Err(Usage("--depth must be at least 1".into()))
    } else {
        Ok(depth)
    }
}

/// The interval `lower,upper`, or the base interval.
fn interval(src: Option<&str>, cap: usize) -> Result<OrderCertificate, Usage> {
    let Some(src) = src else {
        return Ok(base_cert(0, 1));
    };
    let (lo, hi) = split_pair(src).ok_or_else(|| Usage("--interval needs two sets: lower,upper".into()))?;
    let lower = LazySet::parse_with_cap(lo, cap).map_err(usage)?;
    let upper = LazySet::parse_with_cap(hi, cap).map_err(usage)?;
    OrderCertificate::probe_bounds(lower, upper, INTERVAL_PROBE).map_err(usage)
}

fn sample_pairs(bound: &Ordinal, n: usize, rng: &mut StdRng) -> Vec<(Ordinal, Ordinal)> {
    if bound <= &Ordinal::one() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = sample_below(bound, SAMPLE_BRANCH, rng).expect("nonzero bound");
        let b = sample_below(bound, SAMPLE_BRANCH, rng).expect("nonzero bound");
        match a.cmp(&b) {
            std::cmp::Ordering::Less => out.push((a, b)),
            std::cmp::Ordering::Greater => out.push((b, a)),
            std::cmp::Ordering::Equal => {}
        }
    }
    out
}

fn check_embedded_pair(e: &Embedding, a: &Ordinal, b: &Ordinal, depth: usize) -> Result<(), String> {
    let c = e.relate(a, b).map_err(|err| err.to_string())?;
    if c.lower() != &e.element(a).map_err(|err| err.to_string())?
        || c.upper() != &e.element(b).map_err(|err| err.to_string())?
    {
        return Err("certificate is about other sets".into());
    }
    verify_certificate(&c, depth).map_err(|f| f.to_string())
}

fn cmd_embed(ordinal: &str, interval_src: Option<&str>, pairs: usize, depth: usize, seed: u64) -> Run {
    let depth = positive_depth(depth)?;
    let cap = depth_cap()?;
    let bound: Ordinal = ordinal.parse().map_err(usage)?;
    let iv = interval(interval_src, cap)?;
    let mut out = String::new();
    let e = match Embedding::with_depth_cap(&bound, &iv, cap) {
        Ok(e) => e,
        Err(err) => {
            writeln!(out, "FAIL interval: {err}").unwrap();
            return Ok((out, Outcome::Fail));
        }
    };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut failed = 0;
    let sample = sample_pairs(&bound, pairs, &mut rng);
    for (a, b) in &sample {
        match check_embedded_pair(&e, a, b, depth) {
            Ok(()) => writeln!(out, "PAIR {a} {b} OK").unwrap(),
            Err(why) => {
                failed += 1;
                writeln!(out, "PAIR {a} {b} FAIL {why}").unwrap();
            }
        }
    }
    writeln!(out, "CHECKED {} FAILED {failed}", sample.len()).unwrap();
    Ok((out, outcome(failed == 0)))
}

fn parse_point_pair(src: &str) -> Result<(usize, usize), Usage> {
    let (d, x) = src
        .split_once(',')
        .ok_or_else(|| Usage("--eval needs d,x".into()))?;
    let d = d.trim().parse().map_err(|_| Usage(format!("bad point {d:?}")))?;
    let x = x.trim().parse().map_err(|_| Usage(format!("bad point {x:?}")))?;
    Ok((d, x))
}

fn cmd_cont(space: &Path, eval: Option<&str>, truncate: Option<u32>, check_all: bool) -> Run {
    let ms: MetricSpaceDesc = read(space)?.parse().map_err(usage)?;
    let eval = eval.map(parse_point_pair).transpose()?;
    let mut out = String::new();
    if let Some(v) = ms.violations().first() {
        writeln!(out, "FAIL {v}").unwrap();
        return Ok((out, Outcome::Fail));
    }
    let chain = match build_chain(&ms) {
        Ok(c) => c,
        Err(err) => {
            writeln!(out, "FAIL {err}").unwrap();
            return Ok((out, Outcome::Fail));
        }
    };
    let mut ok = true;
    if let Some((d, x)) = eval {
        let mode = truncate.map_or(EvalMode::Exact, EvalMode::Truncated);
        let v = chain.eval(d, x, mode).map_err(usage)?;
        writeln!(out, "{}", format_eval(d, x, &v)).unwrap();
    }
    if check_all {
        let check = chain.check_all();
        ok &= check.ok();
        writeln!(out, "{check}").unwrap();
    }
    Ok((out, outcome(ok)))
}

fn read_family(path: &Path, cap: usize) -> Result<ExplicitFamily, Usage> {
    let links = read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| OrderCertificate::parse_with_cap(l, cap).map_err(usage))
        .collect::<Result<Vec<_>, _>>()?;
    ExplicitFamily::from_links(links).map_err(usage)
}

fn baire_report<F: ChainFamily>(
    family: &F,
    pairs: &[(F::Index, F::Index)],
    extra: Vec<F::Index>,
    depth: usize,
) -> ChainReport {
    let mut points = extra;
    points.extend(pairs.iter().flat_map(|(i, j)| [i.clone(), j.clone()]));
    points.sort();
    points.dedup();
    verify_chain_monotone_on(family, pairs, &points, depth)
}

#[allow(clippy::too_many_arguments)]
fn cmd_baire(
    ordinal: Option<&str>,
    family: Option<&Path>,
    pairs: usize,
    points: usize,
    depth: usize,
    seed: u64,
) -> Run {
    let depth = positive_depth(depth)?;
    let cap = depth_cap()?;
    let mut rng = StdRng::seed_from_u64(seed);
    let report = match (ordinal, family) {
        (_, Some(path)) => {
            let fam = read_family(path, cap)?;
            let n = fam.len();
            let mut sample = Vec::with_capacity(pairs);
            if n >= 2 {
                while sample.len() < pairs {
                    let i = rng.gen_range(0..n - 1);
                    let j = rng.gen_range(i + 1..n);
                    sample.push((i, j));
                }
            }
            let extra = if n == 0 {
                Vec::new()
            } else {
                (0..points).map(|_| rng.gen_range(0..n)).collect()
            };
            baire_report(&fam, &sample, extra, depth)
        }
        (Some(src), None) => {
            let bound: Ordinal = src.parse().map_err(usage)?;
            let e = Embedding::with_depth_cap(&bound, &base_cert(0, 1), cap).map_err(usage)?;
            let sample = sample_pairs(&bound, pairs, &mut rng);
            let extra = if bound.is_zero() {
                Vec::new()
            } else {
                (0..points)
                    .filter_map(|_| sample_below(&bound, SAMPLE_BRANCH, &mut rng))
                    .collect()
            };
            baire_report(&e, &sample, extra, depth)
        }
        (None, None) => return Err(Usage("baire needs --ordinal or --family".into())),
    };
    Ok((format!("{report}\n"), outcome(report.ok())))
}

fn cmd_verify(cert: &Path, depth: usize) -> Run {
    let depth = positive_depth(depth)?;
    let cap = depth_cap()?;
    let c = OrderCertificate::parse_with_cap(read(cert)?.trim(), cap).map_err(usage)?;
    Ok(match verify_certificate(&c, depth) {
        Ok(()) => ("OK\n".into(), Outcome::Pass),
        Err(f) => (format!("FAIL {f}\n"), Outcome::Fail),
    })
}

fn show(set: &LazySet, k: usize) -> String {
    match set.first(k) {
        Ok(xs) => xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "),
        Err(e) => format!("({e})"),
    }
}

fn cmd_split(interval_src: Option<&str>, members: u64, k: usize, depth: usize) -> Run {
    let depth = positive_depth(depth)?;
    let cap = depth_cap()?;
    let iv = interval(interval_src, cap)?;
    let mut out = String::new();
    if let Err(f) = verify_certificate(&iv, depth) {
        writeln!(out, "FAIL interval: {f}").unwrap();
        return Ok((out, Outcome::Fail));
    }
    let sp = SplitInterval::trusted(&iv, cap);
    let (mut checked, mut failed) = (0, 0);
    for i in 1..=members {
        let (z, step) = sp.step(i).map_err(usage)?;
        writeln!(out, "z{i} = {z}").unwrap();
        writeln!(out, "  elements {}", show(&z, k)).unwrap();
        for (name, c) in [("below", step), ("above", sp.upper_cert(i).map_err(usage)?)] {
            checked += 1;
            match verify_certificate(&c, depth) {
                Ok(()) => writeln!(out, "  {name} OK").unwrap(),
                Err(f) => {
                    failed += 1;
                    writeln!(out, "  {name} FAIL {f}").unwrap();
                }
            }
        }
    }
    writeln!(out, "CHECKED {checked} FAILED {failed}").unwrap();
    Ok((out, outcome(failed == 0)))
}

fn cmd_tree(address: &str, k: usize, depth: usize) -> Run {
    let depth = positive_depth(depth)?;
    let s: TreeAddress = address.parse().map_err(usage)?;
    let tree = Tree::new(depth_cap()?);
    let node = tree.node(&s).map_err(usage)?;
    let mut out = String::new();
    writeln!(out, "node {s} = {node}").unwrap();
    writeln!(out, "  elements {}", show(&node, k)).unwrap();
    let c = tree.interval(&s).map_err(usage)?;
    let ok = match verify_certificate(&c, depth) {
        Ok(()) => {
            writeln!(out, "interval {s} {} OK", s.successor()).unwrap();
            true
        }
        Err(f) => {
            writeln!(out, "interval {s} {} FAIL {f}", s.successor()).unwrap();
            false
        }
    };
    Ok((out, outcome(ok)))
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Embed {
            ordinal,
            interval,
            pairs,
            depth,
            seed,
        } => cmd_embed(&ordinal, interval.as_deref(), pairs, depth, seed),
        Command::Cont {
            space,
            eval,
            truncate,
            check_all,
        } => cmd_cont(&space, eval.as_deref(), truncate, check_all),
        Command::Baire {
            ordinal,
            family,
            pairs,
            points,
            depth,
            seed,
        } => cmd_baire(ordinal.as_deref(), family.as_deref(), pairs, points, depth, seed),
        Command::Verify { cert, depth } => cmd_verify(&cert, depth),
        Command::Split {
            interval,
            members,
            show,
            depth,
        } => cmd_split(interval.as_deref(), members, show, depth),
        Command::Tree { address, show, depth } => cmd_tree(&address, show, depth),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let worker = std::thread::Builder::new()
        .stack_size(WORKER_STACK)
        .spawn(move || run(cli))
        .expect("spawn worker thread");
    match worker.join() {
        Ok(Ok((out, result))) => {
            print!("{out}");
            match result {
                Outcome::Pass => ExitCode::SUCCESS,
                Outcome::Fail => ExitCode::from(1),
            }
        }
        Ok(Err(Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(1),
    }
}
