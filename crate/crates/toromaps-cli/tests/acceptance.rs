//! One line per acceptance criterion; exits non-zero if any fails.

#[path = "../../toromaps/tests/common/mod.rs"]
mod common;

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};
use toromaps::closure::{complete_closure, verify_closure_output};
use toromaps::decomp::{assemble, decompose};
use toromaps::forests::{count_forests, enumerate_forests, sample_uniform_forest, Forest};
use toromaps::harness::*;
use toromaps::paths::{count_motzkin, dominating_rotations};
use toromaps::sampler::*;

const SEED: u64 = 20_240_601;
const P_MIN: f64 = 1e-3;
const SLOPE_RANGE: (f64, f64) = (0.17, 0.33);
const RATIO_TOLERANCE: f64 = 0.40;
const SAMPLE_BUDGET: Duration = Duration::from_secs(10);
const CLOSURE_BUDGET: Duration = Duration::from_millis(100);

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn first(problems: Vec<String>, what: &str) -> Result<(), String> {
    match problems.into_iter().next() {
        None => Ok(()),
        Some(p) => Err(format!("{what}: {p}")),
    }
}

fn exact_counts() -> Outcome {
    let start = Instant::now();
    let mut classes = 0;
    for rho in 0..=4 {
        for tau in 1..=16 - 4 * rho {
            let want = common::forests_by_shapes(rho, tau);
            ensure(count_forests(rho, tau) == BigUint::from(want), format!("count_forests({rho},{tau})"))?;
            ensure(enumerate_forests(rho, tau).len() as u64 == want, format!("enumerate_forests({rho},{tau})"))?;
            classes += 1;
        }
    }
    let forest_time = start.elapsed();
    ensure(forest_time < Duration::from_secs(60), format!("forest counts took {forest_time:?}"))?;
    for sigma in 0..=10usize {
        for gamma in -(sigma as i64)..=sigma as i64 {
            ensure(
                count_motzkin(sigma, gamma) == BigUint::from(common::motzkin_by_steps(sigma, gamma)),
                format!("count_motzkin({sigma},{gamma})"),
            )?;
        }
    }
    let mut rng = replica_rng(SEED, 1);
    for _ in 0..10_000 {
        let k = rng.random_range(1..4);
        let q = rng.random_range(0..5);
        let p = k * q + rng.random_range(0..8);
        let mut bits = vec![0u8; p];
        bits.extend(std::iter::repeat_n(1, q));
        rand::seq::SliceRandom::shuffle(&mut bits[..], &mut rng);
        let got = dominating_rotations(&bits, k).map_err(|e| e.to_string())?.len();
        ensure(got == p - k * q && got == common::dominating_rotations_naive(&bits, k), format!("rotations of {bits:?}"))?;
    }
    Ok(format!("{classes} forest classes in {forest_time:.1?}, Motzkin sigma <= 10, 10^4 cycle-lemma words"))
}

fn bijections() -> Outcome {
    let mut rng = replica_rng(SEED, 2);
    for _ in 0..10_000 {
        let (rho, tau) = (rng.random_range(0..40), rng.random_range(1..15));
        let f = sample_uniform_forest(rho, tau, &mut rng);
        ensure(Forest::decode_word(&f.encode_word(), rho, tau).as_ref() == Ok(&f), "word round trip")?;
        let cp = f.contour_pair();
        ensure(Forest::from_contour(&cp.c, &cp.l).as_ref() == Ok(&f), "contour round trip")?;
    }
    let mut enumerated = 0;
    for n in 1..=4 {
        for e in enumerate_all(n, 10_000_000).map_err(|e| e.to_string())? {
            let u = assemble(&e.decomposed).map_err(|e| e.to_string())?;
            ensure(decompose(&u).as_ref() == Ok(&e.decomposed), format!("enumerated map at n={n}"))?;
            enumerated += 1;
        }
    }
    let bad: Vec<u64> = (0..10_000u64)
        .into_par_iter()
        .filter(|&r| {
            let n = 5 + (r % 60) as usize;
            let rec = AnyLaw::new(n, Mode::Exact).sample(SEED, r).unwrap();
            assemble(&rec.decomposed).and_then(|u| decompose(&u)).as_ref() != Ok(&rec.decomposed)
        })
        .collect();
    ensure(bad.is_empty(), format!("sampled replicas {:?}", &bad[..bad.len().min(5)]))?;
    Ok(format!("10^4 forests, {enumerated} enumerated maps, 10^4 sampled maps"))
}

/// Everything enumerated up to 4 vertices, then 10^3 samples at each size.
fn corpus() -> Vec<(toromaps::closure::LabeledTriangulation, toromaps::decomp::DecomposedMap)> {
    let mut out: Vec<_> = (1..=4)
        .flat_map(|n| enumerate_all(n, 10_000_000).unwrap())
        .map(|e| (e.closed, e.decomposed))
        .collect();
    for n in [50, 200] {
        let law = AnyLaw::new(n, Mode::Exact);
        let recs: Vec<SampleRecord> = (0..1000).into_par_iter().map(|r| law.sample(SEED + 3, r).unwrap()).collect();
        out.extend(recs.into_iter().map(|r| (r.closed, r.decomposed)));
    }
    out
}

fn closure_suite(c: &[(toromaps::closure::LabeledTriangulation, toromaps::decomp::DecomposedMap)]) -> Outcome {
    let start = Instant::now();
    let bad: Vec<String> = c.par_iter().flat_map(|(g, _)| verify_closure_output(g)).collect();
    first(bad, "closure")?;
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), format!("closure checks took {took:?}"))?;
    Ok(format!("{} maps in {took:.1?}", c.len()))
}

fn label_suite(c: &[(toromaps::closure::LabeledTriangulation, toromaps::decomp::DecomposedMap)]) -> Outcome {
    let bad: Vec<String> = c
        .par_iter()
        .enumerate()
        .flat_map(|(i, (g, d))| {
            let mut rng = replica_rng(SEED + 4, i as u64);
            label_problems(g, d, 1000, g.map.n_vertices() <= 100, &mut rng)
        })
        .collect();
    first(bad, "labels")?;
    Ok(format!("{} maps, 10^3 pairs each, full scans at n <= 100", c.len()))
}

fn appendix_suite(c: &[(toromaps::closure::LabeledTriangulation, toromaps::decomp::DecomposedMap)]) -> Outcome {
    let sampled: Vec<_> = c.iter().filter(|(g, _)| g.map.n_vertices() >= 50).collect();
    let bad: Vec<String> = sampled.par_iter().flat_map(|(g, _)| appendix_problems(g, true)).collect();
    first(bad, "appendix")?;
    Ok(format!("every outgoing edge of {} sampled maps at n in {{50, 200}}", sampled.len()))
}

fn sampler_exactness() -> Outcome {
    let n = 3;
    let draws = 1_000_000;
    let all = enumerate_all(n, 10_000_000).map_err(|e| e.to_string())?;
    let index: HashMap<Vec<u32>, usize> = all.iter().enumerate().map(|(i, e)| (e.code.clone(), i)).collect();
    let law = AnyLaw::new(n, Mode::Exact);
    let counts = sample_counts(draws, |r| index[&rooted_code(&law.sample(SEED + 5, r).unwrap().rooted)], all.len());
    let (_, df, p_maps) = chi_square(&counts, &vec![1.0 / all.len() as f64; all.len()]);
    ensure(p_maps > P_MIN, format!("maps: p = {p_maps:.2e}"))?;

    let probs = parameter_probabilities(n);
    let pindex: HashMap<_, usize> = probs.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
    let exact = ExactLaw::new(n);
    let pc = sample_counts(draws, |r| pindex[&exact.sample(&mut replica_rng(SEED + 6, r))], probs.len());
    let (_, _, p_params) = chi_square(&pc, &probs.iter().map(|p| p.1).collect::<Vec<_>>());
    ensure(p_params > P_MIN, format!("parameters: p = {p_params:.2e}"))?;

    let mut gw = Vec::new();
    for (rho, tau) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let (a, b) = gw_against_uniform(rho, tau, 100_000, SEED + 7);
        let (_, _, p) = chi_square_two_sample(&a, &b);
        ensure(p > P_MIN, format!("GW at ({rho},{tau}): p = {p:.2e}"))?;
        gw.push(format!("{p:.3}"));
    }
    Ok(format!(
        "n = {n}, 10^6 draws: maps p = {p_maps:.3} (df {df}), parameters p = {p_params:.3}, GW p = {}",
        gw.join("/")
    ))
}

fn growth_trend() -> Outcome {
    let counts: Vec<f64> = (1..=5).map(|n| enumerate_all(n, 10_000_000).unwrap().len() as f64).collect();
    for n in 1..=2 {
        ensure(
            common::glued_triangulations(n) == BigUint::from(counts[n - 1] as u64),
            format!("gluing oracle disagrees at n={n}"),
        )?;
    }
    let ratios: Vec<f64> = counts.windows(2).map(|w| w[1] / w[0]).collect();
    let target = 256.0 / 27.0;
    ensure(ratios.windows(2).all(|w| w[1] > w[0]), format!("ratios not increasing: {ratios:?}"))?;
    ensure(ratios.iter().all(|&r| r < target), format!("ratios overshoot: {ratios:?}"))?;
    let last = *ratios.last().unwrap();
    ensure((last - target).abs() / target < RATIO_TOLERANCE, format!("final ratio {last}"))?;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
    Ok(format!("ratios {} toward {target:.4}", shown.join(", ")))
}

fn median_diameters(rows: &[StatRow], sizes: &[usize]) -> Vec<(f64, f64)> {
    sizes
        .iter()
        .map(|&n| (n as f64, median(&rows.iter().filter(|r| r.n == n).map(|r| r.diameter).collect::<Vec<_>>())))
        .collect()
}

fn scaling_trends() -> Outcome {
    let small = [1usize << 10, 1 << 11, 1 << 12, 1 << 13];
    let rows = run_stats(&small, 64, SEED + 8, Mode::Float, false).map_err(|e| e.to_string())?;
    let gap: Vec<f64> = small
        .iter()
        .map(|&n| median(&rows.iter().filter(|r| r.n == n).map(|r| r.gap_over_n14).collect::<Vec<_>>()))
        .collect();
    ensure(gap.windows(2).all(|w| w[1] < w[0]), format!("gap medians {gap:?}"))?;
    let early = loglog_slope(&median_diameters(&rows, &small));
    // the diameter slope is still drifting down at 2^10..2^13, so it is fitted three octaves later
    let large = [1usize << 13, 1 << 14, 1 << 15, 1 << 16];
    let rows = run_stats(&large, 64, SEED + 8, Mode::Float, false).map_err(|e| e.to_string())?;
    let slope = loglog_slope(&median_diameters(&rows, &large));
    ensure(SLOPE_RANGE.0 <= slope && slope <= SLOPE_RANGE.1, format!("slope {slope:.3} (2^10..2^13: {early:.3})"))?;
    let g: Vec<String> = gap.iter().map(|x| format!("{x:.3}")).collect();
    Ok(format!("diameter slope {slope:.3} over 2^13..2^16 ({early:.3} over 2^10..2^13), gap medians {}", g.join(" > ")))
}

fn run_cli(args: &[&str], threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_toromaps")).args(args).args(["--threads", threads]).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("toromaps-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let rec = dir.join("record.jsonl");
    std::fs::write(&rec, run_cli(&["sample", "--n", "40", "--seed", "3"], "1")).map_err(|e| e.to_string())?;
    let rec = rec.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["sample", "--n", "120", "--count", "12", "--seed", "11"],
        vec!["sample", "--n", "3000", "--count", "3", "--mode", "float", "--seed", "12"],
        vec!["enumerate", "--n", "3"],
        vec!["stats", "--n-list", "64,128", "--replicas", "8", "--seed", "13"],
        vec!["stats", "--n-list", "64", "--replicas", "4", "--format", "json"],
        vec!["verify", "closure", "--n-list", "30", "--count", "4", "--enum-max", "2"],
        vec!["estimate-upsilon", "--count", "40000", "--n-list", "10,20", "--seed", "14"],
        vec!["encode", "--kind", "map", "--input", rec],
    ];
    for c in &commands {
        let a = run_cli(c, "1");
        ensure(!a.is_empty(), format!("{c:?} printed nothing"))?;
        for t in ["2", "4"] {
            ensure(run_cli(c, t) == a, format!("{c:?} differs with {t} threads"))?;
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} commands byte-identical over 1, 2 and 4 threads", commands.len()))
}

fn performance() -> Outcome {
    let law = AnyLaw::new(10_000, Mode::Float);
    let sample = (0..3)
        .map(|r| {
            let t = Instant::now();
            law.sample(SEED + 9, r).unwrap();
            t.elapsed()
        })
        .min()
        .unwrap();
    ensure(sample < SAMPLE_BUDGET, format!("n = 10^4 sample took {sample:?}"))?;
    let big = AnyLaw::new(100_000, Mode::Float).sample(SEED + 10, 0).map_err(|e| e.to_string())?;
    let closure = (0..5)
        .map(|_| {
            let t = Instant::now();
            let _ = complete_closure(&big.rooted).unwrap();
            t.elapsed()
        })
        .min()
        .unwrap();
    ensure(closure < CLOSURE_BUDGET, format!("closure at n = 10^5 took {closure:?}"))?;
    let small = AnyLaw::new(10_000, Mode::Float).sample(SEED + 10, 0).unwrap();
    let closure_small = (0..5)
        .map(|_| {
            let t = Instant::now();
            let _ = complete_closure(&small.rooted).unwrap();
            t.elapsed()
        })
        .min()
        .unwrap();
    let growth = closure.as_secs_f64() / closure_small.as_secs_f64();
    ensure(growth < 30.0, format!("closure grows by {growth:.1} from 10^4 to 10^5"))?;
    Ok(format!("sample n = 10^4 in {sample:.2?}, closure n = 10^5 in {closure:.2?} (x{growth:.1} over 10^4)"))
}

fn main() {
    let mut failed = 0;
    let mut report = |i: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        match r {
            Ok(d) => println!("[PASS] criterion {i}: {name}: {d} ({took:.1?})"),
            Err(d) => {
                failed += 1;
                println!("[FAIL] criterion {i}: {name}: {d} ({took:.1?})");
            }
        }
    };
    report(1, "exact counts", &mut exact_counts);
    report(2, "bijections", &mut bijections);
    let c = corpus();
    report(3, "closure", &mut || closure_suite(&c));
    report(4, "labels and distances", &mut || label_suite(&c));
    report(5, "rightmost walks", &mut || appendix_suite(&c));
    drop(c);
    report(6, "sampler exactness", &mut sampler_exactness);
    report(7, "growth trend", &mut growth_trend);
    report(8, "scaling trends", &mut scaling_trends);
    report(9, "determinism", &mut determinism);
    report(10, "performance", &mut performance);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
