//! Experiments and verification suites: distances, diameters, label gaps,
//! rescaled traces, the Upsilon quadrature and the pass/fail reports.

use crate::closure::{verify_closure_output, LabeledTriangulation};
use crate::decomp::{assemble, contour_vertices, decompose, pseudo_distance_d0, shifted_distance, shifted_labeling, KernelSpec};
use crate::forests::{count_forests, enumerate_forests, sample_gw_forest, sample_uniform_forest, Forest};
use crate::labels::{check_rightmost_bounds, distance_bounds, pairwise_bound, AppendixContext, LabelTable};
use crate::paths::{count_motzkin, dominating_rotations};
use crate::rotmap::bfs_adj;
use crate::sampler::{enumerate_all, enumerate_motzkin, replica_rng, rooted_code, AnyLaw, ExactLaw, Mode, SampleRecord};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error(transparent)]
    Sampler(#[from] crate::sampler::SamplerError),
}

/// Diameter bounds; `lower == upper` when exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diameter {
    pub lower: usize,
    pub upper: usize,
}

impl Diameter {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) as f64 / 2.0
    }
}

fn ecc(adj: &[Vec<usize>], v: usize) -> (usize, Vec<usize>) {
    let d = bfs_adj(adj, v);
    (d.iter().copied().filter(|&x| x != usize::MAX).max().unwrap_or(0), d)
}

/// Exact diameter by BFS from every vertex.
pub fn diameter_all_pairs(adj: &[Vec<usize>]) -> usize {
    (0..adj.len()).map(|v| ecc(adj, v).0).max().unwrap_or(0)
}

/// Diameter from a double sweep followed by fringe elimination.
///
/// Vertices are visited by decreasing distance from a central vertex; the run
/// stops as soon as the best eccentricity beats twice the current level, or
/// when `budget` BFS runs are spent, in which case bounds are returned.
pub fn diameter(adj: &[Vec<usize>], budget: usize) -> Diameter {
    let n = adj.len();
    if n <= 1 {
        return Diameter { lower: 0, upper: 0 };
    }
    let (_, d0) = ecc(adj, 0);
    let a = (0..n).max_by_key(|&v| (d0[v], v)).unwrap();
    let (ea, da) = ecc(adj, a);
    let b = (0..n).max_by_key(|&v| (da[v], v)).unwrap();
    let (eb, db) = ecc(adj, b);
    let mut lower = ea.max(eb);
    // a vertex halfway along a longest path found so far
    let mid = (0..n).filter(|&v| da[v] + db[v] == ea && da[v] == ea / 2).min().unwrap_or(a);
    let (eu, du) = ecc(adj, mid);
    lower = lower.max(eu);
    let mut upper = 2 * eu;
    let mut runs = 4;
    let mut levels: Vec<Vec<usize>> = vec![Vec::new(); eu + 1];
    for v in 0..n {
        levels[du[v]].push(v);
    }
    for i in (1..=eu).rev() {
        // pairs left unchecked lie in levels <= i
        upper = upper.min(lower.max(2 * i));
        if lower >= upper {
            break;
        }
        for &v in &levels[i] {
            if runs >= budget {
                return Diameter { lower, upper };
            }
            lower = lower.max(ecc(adj, v).0);
            runs += 1;
        }
        upper = upper.min(lower.max(2 * (i - 1)));
        if lower >= upper {
            break;
        }
    }
    Diameter { lower, upper: upper.max(lower) }
}

/// `max_u |d(v0, u) - m(u)|`.
pub fn max_label_gap(g: &LabeledTriangulation, t: &LabelTable) -> i64 {
    let dist = bfs_adj(&g.map.adjacency(), g.root_vertex);
    dist.iter().zip(&t.m).map(|(&d, &m)| (d as i64 - m).abs()).max().unwrap_or(0)
}

/// One row of the statistics table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatRow {
    pub n: usize,
    pub replica: u64,
    pub seed: u64,
    pub diameter: f64,
    pub max_label_gap: i64,
    pub gap_over_n14: f64,
    pub diam_over_n14: f64,
    pub k: u8,
    pub sigma_sum: usize,
    pub runtime_ms: Option<f64>,
    pub diameter_lower: usize,
    pub diameter_upper: usize,
}

pub const STAT_HEADER: &str =
    "n,replica,seed,diameter,max_label_gap,gap_over_n14,diam_over_n14,k,sigma_sum,runtime_ms,diameter_lower,diameter_upper";

impl StatRow {
    pub fn from_record(rec: &SampleRecord, timing: bool) -> StatRow {
        let g = &rec.closed;
        let adj = g.map.adjacency();
        let diam = if adj.len() <= 500 {
            let d = diameter_all_pairs(&adj);
            Diameter { lower: d, upper: d }
        } else {
            diameter(&adj, 4096)
        };
        let t = LabelTable::new(g);
        let gap = max_label_gap(g, &t);
        let n14 = (rec.n as f64).powf(0.25);
        StatRow {
            n: rec.n,
            replica: rec.replica,
            seed: rec.seed,
            diameter: diam.midpoint(),
            max_label_gap: gap,
            gap_over_n14: gap as f64 / n14,
            diam_over_n14: diam.midpoint() / n14,
            k: rec.params.k,
            sigma_sum: rec.params.sigma[..rec.params.t()].iter().sum(),
            runtime_ms: timing.then(|| rec.micros as f64 / 1000.0),
            diameter_lower: diam.lower,
            diameter_upper: diam.upper,
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{},{},{},{},{}",
            self.n,
            self.replica,
            self.seed,
            self.diameter,
            self.max_label_gap,
            self.gap_over_n14,
            self.diam_over_n14,
            self.k,
            self.sigma_sum,
            self.runtime_ms.map(|x| format!("{x:.3}")).unwrap_or_default(),
            self.diameter_lower,
            self.diameter_upper
        )
    }
}

pub fn stats_csv(rows: &[StatRow]) -> String {
    let mut s = String::from(STAT_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_line());
        s.push('\n');
    }
    s
}

/// Statistics over `replicas` maps for every size; rows come out sorted by `(n, replica)`.
pub fn run_stats(n_list: &[usize], replicas: u64, seed: u64, mode: Mode, timing: bool) -> Result<Vec<StatRow>, HarnessError> {
    let mut rows = Vec::new();
    for &n in n_list {
        let law = AnyLaw::new(n, mode);
        let part: Result<Vec<StatRow>, HarnessError> = (0..replicas)
            .into_par_iter()
            .map(|r| Ok(StatRow::from_record(&law.sample(seed, r)?, timing)))
            .collect();
        rows.extend(part?);
    }
    Ok(rows)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        (v[m / 2 - 1] + v[m / 2]) / 2.0
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Rescaled parameters and traces of one sampled map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RescaledTrace {
    pub n: usize,
    pub k: u8,
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `(s, C(2ns)/sqrt(3n), L(2ns) (9/8n)^(1/4))` for the first forest.
    pub contour: Vec<[f64; 3]>,
    /// `(i/I, S_bullet(i) (9/8n)^(1/4))`.
    pub shifted: Vec<[f64; 2]>,
}

pub fn rescaled_trace(rec: &SampleRecord) -> RescaledTrace {
    let n = rec.n as f64;
    let p = &rec.params;
    let g = (9.0 / (8.0 * n)).powf(0.25);
    let cp = rec.decomposed.forests[0].contour_pair();
    let contour = (0..cp.c.len())
        .map(|i| [i as f64 / (2.0 * n), cp.c[i] as f64 / (3.0 * n).sqrt(), cp.l[i] as f64 * g])
        .collect();
    let sl = shifted_labeling(&rec.decomposed);
    let big_i = (sl.s_bullet.len() - 1) as f64;
    let shifted = sl.s_bullet.iter().enumerate().map(|(i, &x)| [i as f64 / big_i, x as f64 * g]).collect();
    RescaledTrace {
        n: rec.n,
        k: p.k,
        rho: p.rho.iter().map(|&r| r as f64 / n).collect(),
        gamma: p.gamma.iter().map(|&x| x as f64 * g).collect(),
        sigma: p.sigma.iter().map(|&s| s as f64 / (2.0 * n).sqrt()).collect(),
        contour,
        shifted,
    }
}

/// Integrand of the Upsilon integral for kernel `k` at
/// `x = (rho_1..rho_5, gamma_1, sigma_1..sigma_3)`.
pub fn upsilon_integrand(k: u8, x: &[f64; 9]) -> f64 {
    let spec = KernelSpec::new(k);
    let mut rho = [0.0; 6];
    rho[..5].copy_from_slice(&x[..5]);
    rho[5] = 1.0 - x[..5].iter().sum::<f64>();
    if rho.iter().any(|&r| r <= 0.0) || x[6..].iter().any(|&s| s < 0.0) {
        return 0.0;
    }
    let sigma = [x[6], x[7], x[8], x[6], x[7], x[8]];
    let mut v = 1.0;
    for i in 0..6 {
        let (r, s) = (rho[i], sigma[i]);
        v *= s / (2f64.sqrt() * r) * 2.0 / (6.0 * std::f64::consts::PI * r).sqrt() * (-s * s / (3.0 * r)).exp()
            * (4.0f64 / 3.0).powi(spec.c[i] as i32 + 1);
    }
    for i in 0..3 {
        let gamma = if i % 2 == 0 { x[5] } else { -x[5] };
        v *= gaussian(sigma[i], gamma);
    }
    v
}

/// Density of the centred normal law of variance `var` at `x`.
fn gaussian(var: f64, x: f64) -> f64 {
    if var <= 0.0 {
        return 0.0;
    }
    (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct UpsilonEstimate {
    pub value: f64,
    pub std_err: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
    pub min_integrand: f64,
}

/// Importance-sampled Monte Carlo estimate of Upsilon with a 95% CLT interval.
///
/// Proposal: pair sums `rho_j + rho_(j+3)` Dirichlet(1/2), split uniformly; `sigma_j` with density
/// proportional to `s^2 exp(-a_j s^2)` matching the two factors it appears in,
/// and `gamma` from the product of the three Gaussian factors.
pub fn estimate_upsilon(samples: usize, seed: u64) -> Result<UpsilonEstimate, HarnessError> {
    if samples < 2 {
        return Err(HarnessError::InsufficientSamples { need: 2, got: samples });
    }
    let chunk = 4096usize;
    let chunks = samples.div_ceil(chunk);
    let parts: Vec<(f64, f64, f64, usize)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = replica_rng(seed, c as u64);
            let m = chunk.min(samples - c * chunk);
            let (mut s1, mut s2, mut mn) = (0.0, 0.0, f64::INFINITY);
            for _ in 0..m {
                let (w, f) = upsilon_draw(&mut rng);
                s1 += w;
                s2 += w * w;
                mn = mn.min(f);
            }
            (s1, s2, mn, m)
        })
        .collect();
    let (s1, s2, mn) = parts.iter().fold((0.0, 0.0, f64::INFINITY), |a, p| (a.0 + p.0, a.1 + p.1, a.2.min(p.2)));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    let se = (var / n).sqrt();
    Ok(UpsilonEstimate {
        value: mean,
        std_err: se,
        ci_low: mean - 1.96 * se,
        ci_high: mean + 1.96 * se,
        samples,
        min_integrand: mn,
    })
}

/// One weighted draw: `(integrand / proposal, smallest integrand value seen)`.
fn upsilon_draw<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let half = Gamma::new(0.5, 1.0).unwrap();
    let g: [f64; 3] = [half.sample(rng), half.sample(rng), half.sample(rng)];
    let tot: f64 = g.iter().sum();
    let pair = g.map(|x| x / tot);
    let mut rho = [0.0; 6];
    for j in 0..3 {
        let u: f64 = rng.random();
        rho[j] = pair[j] * u;
        rho[j + 3] = pair[j] * (1.0 - u);
    }
    let mut x = [0.0; 9];
    x[..5].copy_from_slice(&rho[..5]);
    let mut q = 1.0 / (2.0 * std::f64::consts::PI);
    for s in pair {
        q /= s.powf(1.5);
    }
    let g32 = Gamma::new(1.5, 1.0).unwrap();
    for j in 0..3 {
        let a = (1.0 / rho[j] + 1.0 / rho[j + 3]) / 3.0;
        let s = (g32.sample(rng) / a).sqrt();
        x[6 + j] = s;
        q *= s * s * (-a * s * s).exp() * 4.0 * a.powf(1.5) / std::f64::consts::PI.sqrt();
    }
    let prec: f64 = x[6..].iter().map(|s| 1.0 / s).sum();
    let var = 1.0 / prec;
    let gm = Normal::new(0.0, var.sqrt()).unwrap().sample(rng);
    x[5] = gm;
    q *= gaussian(var, gm);
    let mut f = 0.0;
    let mut mn = f64::INFINITY;
    for k in 1..10 {
        let v = upsilon_integrand(k, &x);
        mn = mn.min(v);
        f += v;
    }
    (if q > 0.0 { f / q } else { 0.0 }, mn)
}

/// `|T(n)| / (2 Upsilon (256/27)^(n-2))`.
pub fn asymptotic_ratio(ln_count: f64, n: usize, upsilon: f64) -> f64 {
    (ln_count - (2.0 * upsilon).ln() - (n as f64 - 2.0) * (256.0f64 / 27.0).ln()).exp()
}

/// Pearson statistic, degrees of freedom and p-value of observed counts against expected probabilities.
pub fn chi_square(observed: &[u64], probs: &[f64]) -> (f64, usize, f64) {
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = probs.iter().filter(|&&p| p > 0.0).count().saturating_sub(1).max(1);
    let p = 1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat);
    (stat, df, p)
}

/// Two-sample chi-square homogeneity test on a shared set of categories.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, usize, f64) {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let t = (x + y) as f64;
        if t == 0.0 {
            continue;
        }
        cells += 1;
        let (ea, eb) = (t * na / (na + nb), t * nb / (na + nb));
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let df = cells.saturating_sub(1).max(1);
    (stat, df, 1.0 - ChiSquared::new(df as f64).unwrap().cdf(stat))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Counts,
    Closure,
    Labels,
    Decomp,
    SamplerUniformity,
    Appendix,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "counts" => Suite::Counts,
            "closure" => Suite::Closure,
            "labels" => Suite::Labels,
            "decomp" => Suite::Decomp,
            "sampler-uniformity" => Suite::SamplerUniformity,
            "appendix" => Suite::Appendix,
            other => return Err(format!("unknown suite {other}")),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Sizes and sample counts for the verification suites.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub enum_max: usize,
    pub n_list: Vec<usize>,
    pub samples: u64,
    pub draws: u64,
    pub mode: Mode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: 1, enum_max: 4, n_list: vec![50], samples: 20, draws: 100_000, mode: Mode::Exact }
    }
}

fn check(name: impl Into<String>, problems: Vec<String>) -> Check {
    Check { name: name.into(), passed: problems.is_empty(), detail: problems.into_iter().take(5).collect::<Vec<_>>().join("; ") }
}

/// Maps every suite checks on: everything enumerated up to `enum_max`, then samples.
fn corpus(cfg: &VerifyConfig) -> Result<Vec<(String, LabeledTriangulation, crate::decomp::DecomposedMap)>, HarnessError> {
    let mut out = Vec::new();
    for n in 1..=cfg.enum_max {
        for e in enumerate_all(n, 10_000_000)? {
            out.push((format!("enum n={n} code={:?}", &e.code[..e.code.len().min(8)]), e.closed, e.decomposed));
        }
    }
    for &n in &cfg.n_list {
        let law = AnyLaw::new(n, cfg.mode);
        let recs: Result<Vec<SampleRecord>, _> = (0..cfg.samples).into_par_iter().map(|r| law.sample(cfg.seed, r)).collect();
        for r in recs? {
            out.push((format!("sample n={n} seed={} replica={}", r.seed, r.replica), r.closed, r.decomposed));
        }
    }
    Ok(out)
}

/// Problems found on one map by the closure suite.
pub fn closure_problems(g: &LabeledTriangulation) -> Vec<String> {
    verify_closure_output(g)
}

/// Problems found on one map by the label suite: every hard bound, with `pairs` random pairs.
pub fn label_problems<R: Rng + ?Sized>(
    g: &LabeledTriangulation,
    d: &crate::decomp::DecomposedMap,
    pairs: usize,
    full_scan: bool,
    rng: &mut R,
) -> Vec<String> {
    let mut bad = Vec::new();
    let t = LabelTable::new(g);
    if let Err(e) = distance_bounds(g, &t) {
        bad.push(e.to_string());
    }
    let adj = g.map.adjacency();
    let nv = adj.len();
    let mut cache: HashMap<usize, Vec<usize>> = HashMap::new();
    for _ in 0..pairs {
        let (u, v) = (rng.random_range(0..nv), rng.random_range(0..nv));
        let du = cache.entry(u).or_insert_with(|| bfs_adj(&adj, u));
        if let Err(e) = pairwise_bound(&t, u, v, du) {
            bad.push(e.to_string());
        }
    }
    let u = match assemble(d) {
        Ok(u) => u,
        Err(e) => {
            bad.push(e.to_string());
            return bad;
        }
    };
    let sl = shifted_labeling(d);
    let r = contour_vertices(&u);
    if sl.s.len() != r.len() {
        bad.push(format!("shifted labeling has {} points for {} corners", sl.s.len(), r.len()));
        return bad;
    }
    let base = t.m[r[0]];
    for i in 0..r.len() {
        let gap = (sl.s[i] - (t.m[r[i]] - base)).abs();
        if gap > 16 {
            bad.push(format!("|S({i}) - m| = {gap}"));
            break;
        }
    }
    if full_scan {
        'outer: for i in 0..r.len() {
            for j in i..r.len() {
                let diff = (pseudo_distance_d0(&t, &r, i, j) - shifted_distance(&sl.s, i, j)).abs();
                if diff > 64 {
                    bad.push(format!("|d0({i},{j}) - S distance| = {diff}"));
                    break 'outer;
                }
            }
        }
    }
    bad
}

/// Problems found on one map by the appendix suite, over every outgoing edge.
pub fn appendix_problems(g: &LabeledTriangulation, with_types: bool) -> Vec<String> {
    let mut bad = Vec::new();
    let t = LabelTable::new(g);
    let ctx = match AppendixContext::new(g) {
        Ok(c) => c,
        Err(e) => return vec![e.to_string()],
    };
    for d in 0..g.map.n_darts() {
        if !g.out[d] {
            continue;
        }
        match check_rightmost_bounds(g, &t, d) {
            Ok(r) if with_types => match ctx.report(&r) {
                Ok(rep) => bad.extend(rep.violations()),
                Err(e) => bad.push(e.to_string()),
            },
            Ok(_) => {}
            Err(e) => bad.push(e.to_string()),
        }
        if bad.len() > 5 {
            break;
        }
    }
    bad
}

fn per_map(
    corpus: &[(String, LabeledTriangulation, crate::decomp::DecomposedMap)],
    f: impl Fn(usize, &LabeledTriangulation, &crate::decomp::DecomposedMap) -> Vec<String> + Sync,
) -> Vec<String> {
    corpus
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, (tag, g, d))| f(i, g, d).into_iter().map(move |p| format!("{tag}: {p}")))
        .collect()
}

/// Runs one verification suite.
pub fn verify(suite: Suite, cfg: &VerifyConfig) -> Result<VerifyReport, HarnessError> {
    let mut checks = Vec::new();
    match suite {
        Suite::Counts => {
            let mut bad = Vec::new();
            for rho in 0..=4 {
                for tau in 1..=16 - 4 * rho {
                    let e = enumerate_forests(rho, tau).len();
                    if BigUint::from(e) != count_forests(rho, tau) {
                        bad.push(format!("F({rho},{tau}): {e} enumerated"));
                    }
                }
            }
            checks.push(check("forest counts against enumeration", bad));
            let mut bad = Vec::new();
            for sigma in 0..=10 {
                for gamma in -(sigma as i64)..=sigma as i64 {
                    let e = enumerate_motzkin(sigma, gamma).len();
                    if BigUint::from(e) != count_motzkin(sigma, gamma) {
                        bad.push(format!("M({sigma},{gamma}): {e} enumerated"));
                    }
                }
            }
            checks.push(check("Motzkin counts against enumeration", bad));
            let mut rng = replica_rng(cfg.seed, 0);
            let mut bad = Vec::new();
            for _ in 0..10_000 {
                let q = rng.random_range(0..5);
                let p = 3 * q + rng.random_range(0..8);
                let mut w = vec![0u8; p];
                w.extend(std::iter::repeat_n(1u8, q));
                w.shuffle(&mut rng);
                let r = dominating_rotations(&w, 3).map(|v| v.len()).unwrap_or(usize::MAX);
                if r != p - 3 * q {
                    bad.push(format!("{r} rotations for p={p}, q={q}"));
                }
            }
            checks.push(check("cycle lemma rotation count", bad));
            let mut bad = Vec::new();
            for n in 1..=cfg.enum_max {
                let all = enumerate_all(n, 10_000_000)?.len();
                let law = ExactLaw::new(n).total();
                if law != BigUint::from(3 * all) {
                    bad.push(format!("n={n}: law total {law}, enumerated {all}"));
                }
            }
            checks.push(check("law total equals 3 |T(n)|", bad));
        }
        Suite::Closure => {
            let c = corpus(cfg)?;
            checks.push(check(format!("closure invariants on {} maps", c.len()), per_map(&c, |_, g, _| closure_problems(g))));
        }
        Suite::Labels => {
            let c = corpus(cfg)?;
            let seed = cfg.seed;
            let bad = per_map(&c, |i, g, d| {
                let mut rng = replica_rng(seed ^ 0x1abe1, i as u64);
                label_problems(g, d, 100, g.map.n_vertices() <= 100, &mut rng)
            });
            checks.push(check(format!("label bounds on {} maps", c.len()), bad));
        }
        Suite::Decomp => {
            let c = corpus(cfg)?;
            let bad = per_map(&c, |_, _, d| {
                let mut bad = Vec::new();
                match assemble(d).and_then(|u| decompose(&u)) {
                    Ok(d2) if &d2 == d => {}
                    Ok(_) => bad.push("decompose(assemble(d)) differs".into()),
                    Err(e) => bad.push(e.to_string()),
                }
                let p = d.parameters();
                if let Err(e) = p.validate(None) {
                    bad.push(e.to_string());
                }
                let big_i: usize = (0..p.rho.len()).map(|i| 2 * p.rho[i] + p.tau[i]).sum();
                let want = 2 * p.n() + 2 + 2 * p.sigma[..p.t()].iter().sum::<usize>() + 2 * usize::from(p.k != 0);
                if big_i != want {
                    bad.push(format!("I = {big_i}, expected {want}"));
                }
                let sl = shifted_labeling(d);
                if sl.s_bullet.first() != Some(&0) || sl.s_bullet.last() != Some(&-4) {
                    bad.push("shifted labeling does not run from 0 to -4".into());
                }
                bad
            });
            checks.push(check(format!("decomposition round trip on {} maps", c.len()), bad));
        }
        Suite::SamplerUniformity => {
            let n = cfg.enum_max.min(3);
            let all = enumerate_all(n, 10_000_000)?;
            let index: HashMap<Vec<u32>, usize> = all.iter().enumerate().map(|(i, e)| (e.code.clone(), i)).collect();
            let law = AnyLaw::new(n, Mode::Exact);
            let counts = sample_counts(cfg.draws, |r| {
                let rec = law.sample(cfg.seed, r).expect("sampling");
                index[&rooted_code(&rec.rooted)]
            }, all.len());
            let (stat, df, p) = chi_square(&counts, &vec![1.0 / all.len() as f64; all.len()]);
            checks.push(Check {
                name: format!("uniform over T({n}) with {} draws", cfg.draws),
                passed: p > 1e-3,
                detail: format!("chi2 = {stat:.2}, df = {df}, p = {p:.4}"),
            });
        }
        Suite::Appendix => {
            let c = corpus(cfg)?;
            checks.push(check(
                format!("rightmost walk and subpath bounds on {} maps", c.len()),
                per_map(&c, |_, g, _| appendix_problems(g, true)),
            ));
        }
    }
    Ok(VerifyReport { suite, checks })
}

/// Tallies `draws` category draws in parallel, one replica stream per draw.
pub fn sample_counts(draws: u64, f: impl Fn(u64) -> usize + Sync, cats: usize) -> Vec<u64> {
    (0..draws)
        .into_par_iter()
        .fold(
            || vec![0u64; cats],
            |mut acc, r| {
                acc[f(r)] += 1;
                acc
            },
        )
        .reduce(|| vec![0u64; cats], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        })
}

/// Histogram of GW and uniform forests at `(rho, tau)` over the words of `F^rho_tau`.
pub fn gw_against_uniform(rho: usize, tau: usize, draws: u64, seed: u64) -> (Vec<u64>, Vec<u64>) {
    let all = enumerate_forests(rho, tau);
    let index: HashMap<Vec<u8>, usize> = all.iter().enumerate().map(|(i, f)| (f.encode_word(), i)).collect();
    let key = |f: &Forest| index[&f.encode_word()];
    let gw = sample_counts(draws, |r| key(&sample_gw_forest(rho, tau, 1_000_000, &mut replica_rng(seed, r)).unwrap()), all.len());
    let un = sample_counts(draws, |r| key(&sample_uniform_forest(rho, tau, &mut replica_rng(seed ^ 0x5eed, r))), all.len());
    (gw, un)
}

/// Exact law of `n`'s parameter vectors as `(vector, probability)`.
pub fn parameter_probabilities(n: usize) -> Vec<(crate::decomp::ParameterVector, f64)> {
    let total = ExactLaw::new(n).total();
    ExactLaw::support(n)
        .into_iter()
        .map(|p| {
            let w = ExactLaw::weight(&p);
            let pr = (w * 1_000_000_000_000u64 / &total).to_f64().unwrap() / 1e12;
            (p, pr)
        })
        .collect()
}

/// Human-readable report.
pub fn render(report: &VerifyReport) -> String {
    let mut s = String::new();
    for c in &report.checks {
        let _ = writeln!(s, "[{}] {}{}", if c.passed { "pass" } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(": {}", c.detail) });
    }
    s
}
