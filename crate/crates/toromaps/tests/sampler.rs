mod common;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;
use std::collections::{HashMap, HashSet};
use toromaps::forests::count_forests;
use toromaps::harness::{chi_square, parameter_probabilities};
use toromaps::paths::count_motzkin;
use toromaps::sampler::*;

const ROOTED: [u64; 12] =
    [1, 8, 71, 648, 5988, 55712, 520538, 4877424, 45793772, 430599520, 4053590591, 38194347784];

#[test]
fn rooted_counts() {
    for (i, &c) in ROOTED.iter().enumerate() {
        assert_eq!(count_rooted(i + 1), BigUint::from(c), "n={}", i + 1);
        assert_eq!(count_rooted_f64(i + 1), Some(c as f64));
        assert!((ln_count_rooted(i + 1) - (c as f64).ln()).abs() < 1e-9);
    }
}

#[test]
fn gluing_oracle_agrees_up_to_three() {
    for n in 1..=3 {
        assert_eq!(common::glued_triangulations(n), BigUint::from(ROOTED[n - 1]), "n={n}");
    }
}

#[test]
fn enumeration_is_exhaustive_and_distinct() {
    for n in 1..=4 {
        let all = enumerate_all(n, 1_000_000).unwrap();
        assert_eq!(all.len() as u64, ROOTED[n - 1]);
        let codes: HashSet<&Vec<u32>> = all.iter().map(|e| &e.code).collect();
        assert_eq!(codes.len(), all.len());
        for e in all.iter().step_by(13) {
            assert_eq!(rooted_code(&e.rooted), e.code);
            assert_eq!(e.decomposed.parameters(), e.params);
        }
    }
    assert!(matches!(enumerate_all(4, 100), Err(SamplerError::BudgetExceeded(_))));
}

#[test]
fn law_total_is_sum_of_weights() {
    for n in 1..=6 {
        let law = ExactLaw::new(n);
        let sum: BigUint = ExactLaw::support(n).iter().map(ExactLaw::weight).sum();
        assert_eq!(law.total(), sum);
        assert_eq!(law.total(), count_rooted(n) * 3u32);
    }
}

#[test]
fn table_helpers() {
    for tau in 1..6 {
        let row = forest_row(tau, 8);
        for (r, c) in row.iter().enumerate() {
            assert_eq!(*c, count_forests(r, tau));
            let ln = c.to_f64().unwrap().ln();
            assert!((ln_forest_count(r, tau) - ln).abs() < 1e-9);
        }
    }
    for (total, parts) in [(0, 1), (3, 2), (5, 4), (6, 6)] {
        let c = compositions(total, parts);
        assert!(c.iter().all(|v| v.len() == parts && v.iter().sum::<usize>() == total));
        let want = (0..parts as u64 - 1).fold(1u64, |a, i| a * (total as u64 + parts as u64 - 1 - i) / (i + 1));
        assert_eq!(c.len() as u64, want);
    }
    for sigma in 0..7 {
        for gamma in -(sigma as i64)..=sigma as i64 {
            assert_eq!(BigUint::from(enumerate_motzkin(sigma, gamma).len()), count_motzkin(sigma, gamma));
        }
    }
}

#[test]
fn sampling_is_deterministic() {
    for mode in [Mode::Exact, Mode::Float] {
        let law = AnyLaw::new(40, mode);
        let a = law.sample(12, 3).unwrap();
        let b = law.sample(12, 3).unwrap();
        assert_eq!(a.decomposed, b.decomposed);
        assert_eq!(a.closed.map, b.closed.map);
        let c = law.sample(12, 4).unwrap();
        assert_ne!(a.decomposed, c.decomposed);
        let j = |r: &SampleRecord| serde_json::to_string(&r.to_json(false)).unwrap();
        assert_eq!(j(&a), j(&b));
    }
    let mut x = replica_rng(5, 0);
    let mut y = replica_rng(5, 1);
    assert_ne!(x.random::<u64>(), y.random::<u64>());
}

#[test]
fn parameter_law_frequencies() {
    let n = 4;
    let probs = parameter_probabilities(n);
    let total: f64 = probs.iter().map(|p| p.1).sum();
    assert!((total - 1.0).abs() < 1e-9);
    let index: HashMap<_, usize> = probs.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
    let law = ExactLaw::new(n);
    let mut rng = replica_rng(51, 0);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..200_000 {
        counts[index[&law.sample(&mut rng)]] += 1;
    }
    let p: Vec<f64> = probs.iter().map(|x| x.1).collect();
    let (_, _, pv) = chi_square(&counts, &p);
    assert!(pv > 1e-3, "p={pv}");
}

#[test]
fn uniform_over_rooted_maps() {
    let all = enumerate_all(3, 100_000).unwrap();
    let index: HashMap<&Vec<u32>, usize> = all.iter().enumerate().map(|(i, e)| (&e.code, i)).collect();
    let law = AnyLaw::new(3, Mode::Exact);
    let mut counts = vec![0u64; all.len()];
    for r in 0..71_000 {
        counts[index[&rooted_code(&law.sample(52, r).unwrap().rooted)]] += 1;
    }
    let (_, _, p) = chi_square(&counts, &vec![1.0 / all.len() as f64; all.len()]);
    assert!(p > 1e-3, "p={p}");
}

#[test]
fn float_law_tracks_exact_law() {
    for n in [5, 30, 120] {
        let e = ExactLaw::new(n).k_marginal();
        let f = FloatLaw::new(n).k_marginal();
        for k in 0..10 {
            assert!((e[k] - f[k]).abs() < 1e-9, "n={n} k={k}");
        }
        assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let exact_ln = {
            let c = count_rooted(n);
            let bits = c.bits();
            let shift = bits.saturating_sub(60);
            (c >> shift).to_f64().unwrap().ln() + shift as f64 * 2f64.ln()
        };
        assert!((ln_count_rooted(n) - exact_ln).abs() < 1e-9 * exact_ln.max(1.0));
    }
}

#[test]
fn square_kernels_thin_out() {
    let p: Vec<f64> = [4, 8, 16, 32, 64, 128].iter().map(|&n| ExactLaw::new(n).k_marginal()[0]).collect();
    assert!(p.windows(2).all(|w| w[1] < w[0]), "{p:?}");
}
