use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use toromaps::decomp::{assemble, decompose, DecomposedJson, DecomposedMap};
use toromaps::forests::Forest;
use toromaps::harness::{
    asymptotic_ratio, estimate_upsilon, render, rescaled_trace, run_stats, stats_csv, verify, Suite, VerifyConfig,
};
use toromaps::paths::{word_from_ascii, word_to_ascii, MotzkinPath};
use toromaps::sampler::{enumerate_all, ln_count_rooted, AnyLaw, Mode, RecordJson};
use toromaps::unicell::UnicellularMap;

#[derive(Parser)]
#[command(name = "toromaps", version, about = "Uniform random toroidal triangulations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Forest,
    Motzkin,
    Map,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Uniform triangulations as JSON lines.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Arithmetic mode; defaults to exact up to n = 512.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Include per-map timings (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Every element of the class at size n, as JSON lines.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5_000_000)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Runs a verification suite; exits nonzero on any violation.
    Verify {
        suite: Suite,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// Sampled maps per size.
        #[arg(long, default_value_t = 20)]
        count: u64,
        /// Draws for the uniformity suite.
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
        #[arg(long, default_value_t = 4)]
        enum_max: usize,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[command(flatten)]
        common: Common,
    },
    /// Diameter and label-gap statistics per sampled map.
    Stats {
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        replicas: u64,
        #[arg(long, value_enum, default_value = "float")]
        mode: ModeArg,
        #[arg(long)]
        timing: bool,
        /// Also write rescaled parameter, contour and shifted-label traces as JSON lines.
        #[arg(long)]
        traces: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Forest text to word lines, path values to `+0-` steps, or map records to their decomposition.
    Encode {
        #[arg(long, value_enum, default_value = "forest")]
        kind: Kind,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Inverse of `encode`.
    Decode {
        #[arg(long, value_enum, default_value = "forest")]
        kind: Kind,
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of the asymptotic constant.
    EstimateUpsilon {
        #[arg(long, default_value_t = 1_000_000)]
        count: usize,
        /// Sizes at which to report the ratio of the exact count to its asymptotic form.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn reader(input: &Option<PathBuf>) -> Result<Box<dyn BufRead>> {
    Ok(match input {
        Some(p) => Box::new(BufReader::new(File::open(p).with_context(|| format!("opening {}", p.display()))?)),
        None => Box::new(BufReader::new(io::stdin())),
    })
}

fn threads(c: &Common) -> Result<()> {
    if let Some(t) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Sample { n, count, mode, timing, common } => {
            threads(&common)?;
            if common.format == Some(Format::Csv) {
                bail!("sample writes JSON lines only");
            }
            let mode = mode.map(Mode::from).unwrap_or(if n <= 512 { Mode::Exact } else { Mode::Float });
            let law = AnyLaw::new(n, mode);
            let lines: Result<Vec<String>> = (0..count)
                .into_par_iter()
                .map(|r| {
                    let rec = law.sample(common.seed, r)?;
                    Ok(serde_json::to_string(&rec.to_json(timing))?)
                })
                .collect();
            let mut w = writer(&common.out)?;
            for l in lines? {
                writeln!(w, "{l}")?;
            }
        }
        Cmd::Enumerate { n, budget, common } => {
            threads(&common)?;
            let all = enumerate_all(n, budget)?;
            let mut w = writer(&common.out)?;
            for (i, e) in all.iter().enumerate() {
                writeln!(w, "{}", serde_json::to_string(&e.to_json(n, i))?)?;
            }
        }
        Cmd::Verify { suite, n_list, count, replicas, enum_max, mode, common } => {
            threads(&common)?;
            let cfg = VerifyConfig {
                seed: common.seed,
                enum_max,
                n_list: n_list.unwrap_or_else(|| vec![50]),
                samples: count,
                draws: replicas,
                mode: mode.into(),
            };
            let report = verify(suite, &cfg)?;
            let mut w = writer(&common.out)?;
            if common.format == Some(Format::Json) {
                writeln!(w, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                write!(w, "{}", render(&report))?;
            }
            w.flush()?;
            if !report.passed() {
                std::process::exit(1);
            }
        }
        Cmd::Stats { n_list, replicas, mode, timing, traces, common } => {
            threads(&common)?;
            if n_list.is_empty() {
                bail!("--n-list is required");
            }
            if let Some(path) = &traces {
                let mut tw = writer(&Some(path.clone()))?;
                for &n in &n_list {
                    let law = AnyLaw::new(n, mode.into());
                    let lines: Result<Vec<String>> = (0..replicas)
                        .into_par_iter()
                        .map(|r| Ok(serde_json::to_string(&rescaled_trace(&law.sample(common.seed, r)?))?))
                        .collect();
                    for l in lines? {
                        writeln!(tw, "{l}")?;
                    }
                }
            }
            let rows = run_stats(&n_list, replicas, common.seed, mode.into(), timing)?;
            let mut w = writer(&common.out)?;
            if common.format == Some(Format::Json) {
                for r in &rows {
                    writeln!(w, "{}", serde_json::to_string(r)?)?;
                }
            } else {
                write!(w, "{}", stats_csv(&rows))?;
            }
        }
        Cmd::Encode { kind, input, common } => {
            let mut w = writer(&common.out)?;
            match kind {
                Kind::Forest => {
                    let mut text = String::new();
                    reader(&input)?.read_to_string(&mut text)?;
                    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                    for pair in lines.chunks(2) {
                        let f = Forest::from_text(&pair.join("\n"))?;
                        writeln!(w, "{} {} {}", f.rho(), f.tau(), word_to_ascii(&f.encode_word()))?;
                    }
                }
                Kind::Motzkin => {
                    for line in reader(&input)?.lines() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let values = line.split_whitespace().map(str::parse).collect::<Result<Vec<i64>, _>>()?;
                        writeln!(w, "{}", MotzkinPath::new(values)?.to_ascii())?;
                    }
                }
                Kind::Map => {
                    for line in reader(&input)?.lines() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let rec: RecordJson = serde_json::from_str(&line)?;
                        let mut u = UnicellularMap::from_json(&rec.unicellular)?;
                        if u.root_stem().is_some() {
                            u = u.strip_root()?;
                        }
                        writeln!(w, "{}", serde_json::to_string(&decompose(&u)?.to_json())?)?;
                    }
                }
            }
        }
        Cmd::Decode { kind, input, common } => {
            let mut w = writer(&common.out)?;
            for line in reader(&input)?.lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match kind {
                    Kind::Forest => {
                        let parts: Vec<&str> = line.split_whitespace().collect();
                        let [rho, tau, word] = parts[..] else { bail!("expected `rho tau word`, got {line:?}") };
                        let f = Forest::decode_word(&word_from_ascii(word)?, rho.parse()?, tau.parse()?)?;
                        writeln!(w, "{}", f.to_text())?;
                    }
                    Kind::Motzkin => {
                        let v: Vec<String> = MotzkinPath::from_ascii(&line)?.values().iter().map(|x| x.to_string()).collect();
                        writeln!(w, "{}", v.join(" "))?;
                    }
                    Kind::Map => {
                        let j: DecomposedJson = serde_json::from_str(&line)?;
                        let u = assemble(&DecomposedMap::from_json(&j)?)?;
                        writeln!(w, "{}", serde_json::to_string(&u.to_json())?)?;
                    }
                }
            }
        }
        Cmd::EstimateUpsilon { count, n_list, common } => {
            threads(&common)?;
            let est = estimate_upsilon(count, common.seed)?;
            let mut w = writer(&common.out)?;
            let mut out = serde_json::to_value(est)?;
            if let Some(ns) = n_list {
                let ratios: Vec<serde_json::Value> = ns
                    .iter()
                    .map(|&n| serde_json::json!({"n": n, "ratio": asymptotic_ratio(ln_count_rooted(n), n, est.value)}))
                    .collect();
                out["count_ratios"] = serde_json::Value::Array(ratios);
            }
            writeln!(w, "{}", serde_json::to_string_pretty(&out)?)?;
        }
    }
    Ok(())
}
