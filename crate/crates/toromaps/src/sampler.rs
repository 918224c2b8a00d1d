//! Exact sampling of the parameter vector, of the components, and of the
//! whole triangulation; plus the enumeration of the decomposition side.
//!
//! Summing the law over the forest sizes with `sum rho = N` collapses the
//! forest counts into one number `f(N, sum tau)`, and summing the Motzkin
//! counts over `sigma` and `gamma` with `sum sigma = S` gives coefficients of
//! the Motzkin series. The law of `(k, S)` is tabulated once; the rest is drawn
//! sequentially from exact conditionals.

use crate::closure::{complete_closure, ClosureError, LabeledTriangulation};
use crate::decomp::{assemble, DecompError, DecomposedMap, KernelSpec, ParameterVector};
use crate::exact::{binomial, ln_binomial, pick_big, pick_f64, pick_ln};
use crate::forests::{enumerate_forests, sample_uniform_forest, Forest};
use crate::paths::{count_motzkin, sample_motzkin_bridge, MotzkinPath};
use crate::unicell::{UnicellError, UnicellularMap};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt::Debug;
use std::ops::{Add, Mul};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("enumeration budget exceeded ({0} maps)")]
    BudgetExceeded(usize),
    #[error("n must be at least 1")]
    EmptyClass,
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Unicell(#[from] UnicellError),
    #[error(transparent)]
    Closure(#[from] ClosureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Scalar used by the parameter law: exact integers, or `f64` with every
/// power `x^S` rescaled by `3^-S` and large factors kept as logarithms.
pub trait Weight: Clone + Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync + 'static {
    type Entry: Clone + Debug + Send + Sync;
    const MODE: Mode;
    /// Factor attached to each power of `x`.
    fn step() -> Self;
    fn pick<R: Rng + ?Sized>(w: &[Self], rng: &mut R) -> usize;
    /// Table entry `pref * f(rho, tau) * h * 3^shift`.
    fn entry(pref: u64, rho: usize, tau: usize, h: &Self, shift: u64) -> Self::Entry;
    fn pick_entry<R: Rng + ?Sized>(e: &[Self::Entry], rng: &mut R) -> usize;
    fn entry_ln(e: &Self::Entry) -> f64;
    /// Draws `rho_1` in `0..=r` with weight `f(rho_1, tau) f(r - rho_1, rest)`.
    fn split<R: Rng + ?Sized>(r: usize, tau: usize, rest: usize, rng: &mut R) -> usize;
}

/// `f(rho, tau)` for `rho = 0..=r`, built from consecutive ratios.
pub fn forest_row(tau: usize, r: usize) -> Vec<BigUint> {
    let mut out = Vec::with_capacity(r + 1);
    let mut c = BigUint::one();
    for rho in 0..=r {
        if rho > 0 {
            let p = (rho - 1) as u64;
            let m = 4 * p + tau as u64;
            let q = 3 * p + tau as u64;
            c = c * ((m + 1) * (m + 2) * (m + 3) * (m + 4)) / ((p + 1) * (q + 1) * (q + 2) * (q + 3));
        }
        let len = (4 * rho + tau) as u64;
        out.push(&c * tau as u64 / len);
    }
    out
}

pub fn ln_forest_count(rho: usize, tau: usize) -> f64 {
    let len = (4 * rho + tau) as u64;
    (tau as f64).ln() - (len as f64).ln() + ln_binomial(len, rho as u64)
}

impl Weight for BigUint {
    type Entry = BigUint;
    const MODE: Mode = Mode::Exact;

    fn step() -> Self {
        BigUint::one()
    }

    fn pick<R: Rng + ?Sized>(w: &[Self], rng: &mut R) -> usize {
        pick_big(w, rng)
    }

    fn entry(pref: u64, rho: usize, tau: usize, h: &Self, _shift: u64) -> BigUint {
        let len = (4 * rho + tau) as u64;
        binomial(len, rho as u64) * tau as u64 / len * h * pref
    }

    fn pick_entry<R: Rng + ?Sized>(e: &[BigUint], rng: &mut R) -> usize {
        pick_big(e, rng)
    }

    fn entry_ln(e: &BigUint) -> f64 {
        crate::exact::ln_big(e)
    }

    fn split<R: Rng + ?Sized>(r: usize, tau: usize, rest: usize, rng: &mut R) -> usize {
        if rest == 0 {
            return r;
        }
        let a = forest_row(tau, r);
        let b = forest_row(rest, r);
        let w: Vec<BigUint> = (0..=r).map(|i| &a[i] * &b[r - i]).collect();
        pick_big(&w, rng)
    }
}

impl Weight for f64 {
    type Entry = f64;
    const MODE: Mode = Mode::Float;

    fn step() -> Self {
        1.0 / 3.0
    }

    fn pick<R: Rng + ?Sized>(w: &[Self], rng: &mut R) -> usize {
        pick_f64(w, rng)
    }

    fn entry(pref: u64, rho: usize, tau: usize, h: &Self, shift: u64) -> f64 {
        if *h <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (pref as f64).ln() + ln_forest_count(rho, tau) + h.ln() + shift as f64 * 3f64.ln()
    }

    fn pick_entry<R: Rng + ?Sized>(e: &[f64], rng: &mut R) -> usize {
        pick_ln(e, rng)
    }

    fn entry_ln(e: &f64) -> f64 {
        *e
    }

    fn split<R: Rng + ?Sized>(r: usize, tau: usize, rest: usize, rng: &mut R) -> usize {
        if rest == 0 {
            return r;
        }
        let lw: Vec<f64> = (0..=r).map(|i| ln_forest_count(i, tau) + ln_forest_count(r - i, rest)).collect();
        pick_ln(&lw, rng)
    }
}

/// The law of the parameter vector at size `n`.
#[derive(Clone, Debug)]
pub struct ParameterLaw<W: Weight> {
    pub n: usize,
    smax: usize,
    /// `tri[m][j]`: coefficient of `u^j` in `(step * (1 + u + u^2))^m`, for `j <= m`.
    tri: Vec<Vec<W>>,
    entries: Vec<(u8, usize, W::Entry)>,
}

pub type ExactLaw = ParameterLaw<BigUint>;
pub type FloatLaw = ParameterLaw<f64>;

fn excess(a: i64, b: i64, g: i64) -> i64 {
    (a - g).abs() + g.abs() + (b - g).abs()
}

impl<W: Weight> ParameterLaw<W> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "n must be at least 1");
        let smax = match W::MODE {
            Mode::Exact => n,
            Mode::Float => n.min((40.0 * (n as f64).sqrt()) as usize + 100),
        };
        let step = W::step();
        let mut tri: Vec<Vec<W>> = vec![vec![W::one()]];
        for m in 0..smax + 2 {
            let prev = &tri[m];
            let at = |j: i64| -> W {
                if j < 0 {
                    return W::zero();
                }
                let j = j as usize;
                if j <= m {
                    prev[j].clone()
                } else if j <= 2 * m {
                    prev[2 * m - j].clone()
                } else {
                    W::zero()
                }
            };
            let row: Vec<W> =
                (0..=m + 1).map(|j| (at(j as i64) + at(j as i64 - 1) + at(j as i64 - 2)) * step.clone()).collect();
            tri.push(row);
        }
        let mut law = ParameterLaw { n, smax, tri, entries: Vec::new() };
        for k in 0..10u8 {
            let spec = KernelSpec::new(k);
            let t = spec.t;
            if n < t - 1 {
                continue;
            }
            let pref = if k == 0 { 3 } else { 2 };
            let base = if k == 0 { 4 } else { 8 };
            for s in 0..=smax.min(n - (t - 1)) {
                let rho = n - s - (t - 1);
                let (h, shift) = if k == 0 { (law.h_square(s), s + 1) } else { (law.h_hex(&spec, s), s + 2) };
                let e = W::entry(pref, rho, 4 * s + base, &h, shift as u64);
                law.entries.push((k, s, e));
            }
        }
        law
    }

    fn tri_at(&self, m: usize, j: i64) -> W {
        if j < 0 {
            return W::zero();
        }
        let j = j as usize;
        let row = &self.tri[m];
        if j <= m {
            row[j].clone()
        } else if j <= 2 * m {
            row[2 * m - j].clone()
        } else {
            W::zero()
        }
    }

    /// `|M_sigma^gamma|`, rescaled by `3^-sigma` in float mode.
    pub fn motzkin(&self, sigma: usize, gamma: i64) -> W {
        if gamma.unsigned_abs() as usize > sigma {
            return W::zero();
        }
        self.tri_at(sigma, sigma as i64 - gamma.abs())
    }

    /// Coefficients of `phi^(s+2) / (1-u^2)^2` up to degree `s`.
    fn z_row(&self, s: usize) -> Vec<W> {
        let mut y: Vec<W> = Vec::with_capacity(s + 1);
        for d in 0..=s {
            let mut v = self.tri_at(s + 2, d as i64);
            if d >= 2 {
                v = v + y[d - 2].clone();
            }
            y.push(v);
        }
        let mut z: Vec<W> = Vec::with_capacity(s + 1);
        for d in 0..=s {
            let mut v = y[d].clone();
            if d >= 2 {
                v = v + z[d - 2].clone();
            }
            z.push(v);
        }
        z
    }

    /// `[x^s] M0^2 U^e`, i.e. `[u^(s-e)] phi^(s+1) / (1-u^2)`.
    fn pair_sum(&self, s: usize, e: usize) -> W {
        let mut acc = W::zero();
        if s < e {
            return acc;
        }
        let mut d = (s - e) as i64;
        while d >= 0 {
            acc = acc + self.tri_at(s + 1, d);
            d -= 2;
        }
        acc
    }

    fn h_square(&self, s: usize) -> W {
        self.pair_sum(s, 0)
    }

    fn gamma_choices(spec: &KernelSpec, s: usize) -> Vec<(i64, usize)> {
        let (a, b) = spec.gamma_sums.unwrap();
        let lim = s as i64 + 3;
        (-lim..=lim).filter_map(|g| {
            let e = excess(a, b, g);
            (e as usize <= s).then_some((g, e as usize))
        })
        .collect()
    }

    fn h_hex(&self, spec: &KernelSpec, s: usize) -> W {
        let z = self.z_row(s);
        Self::gamma_choices(spec, s).into_iter().fold(W::zero(), |acc, (_, e)| acc + z[s - e].clone())
    }

    pub fn s_max(&self) -> usize {
        self.smax
    }

    pub fn mode(&self) -> Mode {
        W::MODE
    }

    pub fn entries(&self) -> &[(u8, usize, W::Entry)] {
        &self.entries
    }

    /// Marginal law of the kernel type.
    pub fn k_marginal(&self) -> [f64; 10] {
        let lns: Vec<f64> = self.entries.iter().map(|e| W::entry_ln(&e.2)).collect();
        let mx = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut out = [0.0; 10];
        for (e, l) in self.entries.iter().zip(&lns) {
            out[e.0 as usize] += (l - mx).exp();
        }
        let tot: f64 = out.iter().sum();
        out.map(|x| x / tot)
    }

    /// Draws a parameter vector from the law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        let weights: Vec<W::Entry> = self.entries.iter().map(|e| e.2.clone()).collect();
        let (k, s, _) = self.entries[W::pick_entry(&weights, rng)].clone();
        let spec = KernelSpec::new(k);
        let t = spec.t;
        let (gamma, sigma): (Vec<i64>, Vec<usize>) = if k == 0 {
            let w: Vec<W> = (0..=s).map(|a| self.motzkin(a, 0) * self.motzkin(s - a, 0)).collect();
            let s1 = W::pick(&w, rng);
            (vec![0, 0], vec![s1, s - s1])
        } else {
            let (a, b) = spec.gamma_sums.unwrap();
            let z = self.z_row(s);
            let choices = Self::gamma_choices(&spec, s);
            let w: Vec<W> = choices.iter().map(|&(_, e)| z[s - e].clone()).collect();
            let g = choices[W::pick(&w, rng)].0;
            let gm = [a - g, g, b - g];
            let e23 = (gm[1].abs() + gm[2].abs()) as usize;
            let w1: Vec<W> = (0..=s).map(|x| self.motzkin(x, gm[0]) * self.pair_sum(s - x, e23)).collect();
            let s1 = W::pick(&w1, rng);
            let r = s - s1;
            let w2: Vec<W> = (0..=r).map(|x| self.motzkin(x, gm[1]) * self.motzkin(r - x, gm[2])).collect();
            let s2 = W::pick(&w2, rng);
            (gm.to_vec(), vec![s1, s2, r - s2])
        };
        let mut full_gamma = gamma.clone();
        full_gamma.extend(gamma.iter().map(|g| -g));
        let mut full_sigma = sigma.clone();
        full_sigma.extend_from_slice(&sigma);
        let tau: Vec<usize> = (0..2 * t)
            .map(|i| (2 * full_sigma[i] as i64 + full_gamma[i] + spec.c[i] as i64 + 1) as usize)
            .collect();
        let mut r = self.n - s - (t - 1);
        let mut rest: usize = tau.iter().sum();
        let mut rho = Vec::with_capacity(2 * t);
        for &ti in &tau {
            rest -= ti;
            let x = W::split(r, ti, rest, rng);
            rho.push(x);
            r -= x;
        }
        ParameterVector { k, rho, tau, gamma: full_gamma, sigma: full_sigma }
    }
}

impl ParameterLaw<BigUint> {
    /// Sum of all weights, equal to `3 |T_{r,s,b}(n)|`.
    pub fn total(&self) -> BigUint {
        self.entries.iter().map(|e| &e.2).sum()
    }

    /// Unnormalised weight of one parameter vector.
    pub fn weight(pv: &ParameterVector) -> BigUint {
        let t = pv.t();
        let mut w = BigUint::from(if pv.k == 0 { 3u32 } else { 2 });
        for i in 0..2 * t {
            w *= crate::forests::count_forests(pv.rho[i], pv.tau[i]);
        }
        for i in 0..t {
            w *= count_motzkin(pv.sigma[i], pv.gamma[i]);
        }
        w
    }

    /// Every parameter vector of size `n` with positive weight.
    pub fn support(n: usize) -> Vec<ParameterVector> {
        let mut out = Vec::new();
        for k in 0..10u8 {
            let spec = KernelSpec::new(k);
            let t = spec.t;
            if n < t - 1 {
                continue;
            }
            let budget = n - (t - 1);
            for sigma in compositions_upto(budget, t) {
                let s: usize = sigma.iter().sum();
                for gamma in gamma_vectors(&spec, &sigma) {
                    let mut fg = gamma.clone();
                    fg.extend(gamma.iter().map(|g| -g));
                    let mut fs = sigma.clone();
                    fs.extend_from_slice(&sigma);
                    let tau: Vec<usize> =
                        (0..2 * t).map(|i| (2 * fs[i] as i64 + fg[i] + spec.c[i] as i64 + 1) as usize).collect();
                    for rho in compositions(budget - s, 2 * t) {
                        out.push(ParameterVector {
                            k,
                            rho,
                            tau: tau.clone(),
                            gamma: fg.clone(),
                            sigma: fs.clone(),
                        });
                    }
                }
            }
        }
        out
    }
}

/// Vectors of `parts` nonnegative integers with sum exactly `total`.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn compositions_upto(total: usize, parts: usize) -> Vec<Vec<usize>> {
    (0..=total).flat_map(|s| compositions(s, parts)).collect()
}

fn gamma_vectors(spec: &KernelSpec, sigma: &[usize]) -> Vec<Vec<i64>> {
    let rng = |s: usize| -(s as i64)..=(s as i64);
    let mut out = Vec::new();
    match spec.t {
        2 => out.push(vec![0, 0]),
        _ => {
            let (a, b) = spec.gamma_sums.unwrap();
            for g in rng(sigma[1]) {
                let v = vec![a - g, g, b - g];
                if v[0].unsigned_abs() as usize <= sigma[0] && v[2].unsigned_abs() as usize <= sigma[2] {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// All Motzkin paths of length `sigma` ending at `gamma`.
pub fn enumerate_motzkin(sigma: usize, gamma: i64) -> Vec<MotzkinPath> {
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(sigma);
    fn rec(steps: &mut Vec<i64>, left: usize, need: i64, out: &mut Vec<MotzkinPath>) {
        if left == 0 {
            if need == 0 {
                out.push(MotzkinPath::from_steps(steps).unwrap());
            }
            return;
        }
        for s in [-1i64, 0, 1] {
            if (need - s).unsigned_abs() as usize <= left - 1 {
                steps.push(s);
                rec(steps, left - 1, need - s, out);
                steps.pop();
            }
        }
    }
    rec(&mut steps, sigma, gamma, &mut out);
    out
}

/// Every decomposed map with the given parameters.
pub fn enumerate_decomposed(pv: &ParameterVector) -> Vec<DecomposedMap> {
    let t = pv.t();
    let forest_sets: Vec<Vec<Forest>> = (0..2 * t).map(|i| enumerate_forests(pv.rho[i], pv.tau[i])).collect();
    let path_sets: Vec<Vec<MotzkinPath>> = (0..t).map(|i| enumerate_motzkin(pv.sigma[i], pv.gamma[i])).collect();
    let mut out = Vec::new();
    let mut fi = vec![0usize; 2 * t];
    loop {
        let mut pi = vec![0usize; t];
        loop {
            out.push(DecomposedMap {
                k: pv.k,
                forests: (0..2 * t).map(|i| forest_sets[i][fi[i]].clone()).collect(),
                motzkin: (0..t).map(|i| path_sets[i][pi[i]].clone()).collect(),
            });
            if !advance(&mut pi, &path_sets.iter().map(|s| s.len()).collect::<Vec<_>>()) {
                break;
            }
        }
        if !advance(&mut fi, &forest_sets.iter().map(|s| s.len()).collect::<Vec<_>>()) {
            break;
        }
    }
    out
}

fn advance(idx: &mut [usize], lens: &[usize]) -> bool {
    for i in 0..idx.len() {
        idx[i] += 1;
        if idx[i] < lens[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// One element of `T_{r,s,b}(n)` from the enumeration, with its closure.
#[derive(Clone, Debug)]
pub struct Enumerated {
    pub params: ParameterVector,
    pub decomposed: DecomposedMap,
    pub slot: usize,
    pub rooted: UnicellularMap,
    pub code: Vec<u32>,
    pub closed: LabeledTriangulation,
}

/// Canonical code of a rooted map, forgetting the kernel root.
pub fn rooted_code(t: &UnicellularMap) -> Vec<u32> {
    t.map().rooted_code(t.root_stem().expect("rooted map"))
}

/// Enumerates `T_{r,s,b}(n)` from the decomposition side.
///
/// Each rooted map is reached from 4 kernel rootings (square) or 6 (hexagonal)
/// and the first one is kept; closures are checked to be pairwise distinct.
pub fn enumerate_all(n: usize, budget: usize) -> Result<Vec<Enumerated>, SamplerError> {
    if n == 0 {
        return Err(SamplerError::EmptyClass);
    }
    let mut seen = HashSet::new();
    let mut closed_codes = HashSet::new();
    let mut out = Vec::new();
    for pv in ExactLaw::support(n) {
        for d in enumerate_decomposed(&pv) {
            let u = assemble(&d)?;
            for slot in 0..4 {
                let t = u.add_root(slot)?;
                let code = rooted_code(&t);
                if !seen.insert(code.clone()) {
                    continue;
                }
                let (g, _) = complete_closure(&t)?;
                assert!(closed_codes.insert(g.map.rooted_code(g.root_stem)), "two maps close to the same triangulation");
                out.push(Enumerated {
                    params: pv.clone(),
                    decomposed: d.clone(),
                    slot,
                    rooted: t,
                    code,
                    closed: g,
                });
                if out.len() > budget {
                    return Err(SamplerError::BudgetExceeded(budget));
                }
            }
        }
    }
    Ok(out)
}

/// A sampled triangulation with everything needed to reproduce and inspect it.
#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub seed: u64,
    pub replica: u64,
    pub n: usize,
    pub mode: Mode,
    pub params: ParameterVector,
    pub decomposed: DecomposedMap,
    pub slot: usize,
    pub rooted: UnicellularMap,
    pub closed: LabeledTriangulation,
    pub micros: u128,
}

/// The random stream of replica `replica` under master seed `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(replica);
    r
}

/// Draws the components for a parameter vector, assembles, roots and closes.
pub fn sample_from_parameters<R: Rng + ?Sized>(
    pv: &ParameterVector,
    rng: &mut R,
) -> Result<(DecomposedMap, usize, UnicellularMap, LabeledTriangulation), SamplerError> {
    let t = pv.t();
    let forests = (0..2 * t).map(|i| sample_uniform_forest(pv.rho[i], pv.tau[i], rng)).collect();
    let motzkin = (0..t)
        .map(|i| sample_motzkin_bridge(pv.sigma[i], pv.gamma[i], rng).expect("feasible endpoint"))
        .collect();
    let d = DecomposedMap { k: pv.k, forests, motzkin };
    let u = assemble(&d)?;
    let slot = rng.random_range(0..4);
    let t = u.add_root(slot)?;
    let (g, _) = complete_closure(&t)?;
    Ok((d, slot, t, g))
}

pub fn sample_triangulation<W: Weight>(
    law: &ParameterLaw<W>,
    seed: u64,
    replica: u64,
) -> Result<SampleRecord, SamplerError> {
    let start = Instant::now();
    let mut rng = replica_rng(seed, replica);
    let params = law.sample(&mut rng);
    let (decomposed, slot, rooted, closed) = sample_from_parameters(&params, &mut rng)?;
    Ok(SampleRecord {
        seed,
        replica,
        n: law.n,
        mode: W::MODE,
        params,
        decomposed,
        slot,
        rooted,
        closed,
        micros: start.elapsed().as_micros(),
    })
}

/// Either law, chosen at run time.
#[derive(Clone, Debug)]
pub enum AnyLaw {
    Exact(ExactLaw),
    Float(FloatLaw),
}

impl AnyLaw {
    pub fn new(n: usize, mode: Mode) -> AnyLaw {
        match mode {
            Mode::Exact => AnyLaw::Exact(ExactLaw::new(n)),
            Mode::Float => AnyLaw::Float(FloatLaw::new(n)),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyLaw::Exact(l) => l.n,
            AnyLaw::Float(l) => l.n,
        }
    }

    pub fn sample(&self, seed: u64, replica: u64) -> Result<SampleRecord, SamplerError> {
        match self {
            AnyLaw::Exact(l) => sample_triangulation(l, seed, replica),
            AnyLaw::Float(l) => sample_triangulation(l, seed, replica),
        }
    }

    pub fn k_marginal(&self) -> [f64; 10] {
        match self {
            AnyLaw::Exact(l) => l.k_marginal(),
            AnyLaw::Float(l) => l.k_marginal(),
        }
    }
}

/// Exact total `3 |T_{r,s,b}(n)|` divided by 3, as an integer.
pub fn count_rooted(n: usize) -> BigUint {
    ExactLaw::new(n).total() / 3u32
}

/// `ln |T_{r,s,b}(n)|` from the float law.
pub fn ln_count_rooted(n: usize) -> f64 {
    let law = FloatLaw::new(n);
    let lns: Vec<f64> = law.entries.iter().map(|e| e.2).collect();
    let mx = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    mx + lns.iter().map(|l| (l - mx).exp()).sum::<f64>().ln() - 3f64.ln()
}

/// Exact count as a float when it fits.
pub fn count_rooted_f64(n: usize) -> Option<f64> {
    count_rooted(n).to_f64()
}

/// Closed triangulation as JSON: the rooted map and the tail dart of every edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    #[serde(flatten)]
    pub map: crate::rotmap::MapJson,
    pub root_vertex: usize,
    pub oriented_darts: Vec<usize>,
}

impl TriangulationJson {
    pub fn new(g: &LabeledTriangulation) -> Self {
        TriangulationJson {
            map: g.map.to_json(Some(g.root_stem)),
            root_vertex: g.root_vertex,
            oriented_darts: (0..g.map.n_darts()).filter(|&d| g.out[d]).collect(),
        }
    }
}

/// One JSONL line for a sampled or enumerated map.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordJson {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replica: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub params: ParameterVector,
    pub slot: usize,
    pub decomposed: crate::decomp::DecomposedJson,
    pub unicellular: crate::unicell::UnicellJson,
    pub triangulation: TriangulationJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u128>,
}

impl SampleRecord {
    pub fn to_json(&self, timing: bool) -> RecordJson {
        RecordJson {
            n: self.n,
            seed: Some(self.seed),
            replica: Some(self.replica),
            index: None,
            mode: Some(self.mode),
            params: self.params.clone(),
            slot: self.slot,
            decomposed: self.decomposed.to_json(),
            unicellular: self.rooted.to_json(),
            triangulation: TriangulationJson::new(&self.closed),
            micros: timing.then_some(self.micros),
        }
    }
}

impl Enumerated {
    pub fn to_json(&self, n: usize, index: usize) -> RecordJson {
        RecordJson {
            n,
            seed: None,
            replica: None,
            index: Some(index),
            mode: None,
            params: self.params.clone(),
            slot: self.slot,
            decomposed: self.decomposed.to_json(),
            unicellular: self.rooted.to_json(),
            triangulation: TriangulationJson::new(&self.closed),
            micros: None,
        }
    }
}
