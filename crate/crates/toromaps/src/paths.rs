//! Motzkin paths, binary words and `{-3, +1}` walks.

use crate::exact::{binomial, factorial, pick_big};
use num_bigint::BigUint;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("path must start at 0 and move by -1, 0 or +1")]
    BadSteps,
    #[error("no Motzkin path of length {sigma} ends at {gamma}")]
    EmptyClass { sigma: usize, gamma: i64 },
    #[error("cycle lemma needs p >= k q (p = {p}, q = {q}, k = {k})")]
    PreconditionFailed { p: usize, q: usize, k: usize },
    #[error("unexpected character {0:?}")]
    BadChar(char),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MotzkinPath {
    values: Vec<i64>,
}

impl MotzkinPath {
    pub fn new(values: Vec<i64>) -> Result<Self, PathError> {
        if values.first() != Some(&0) || values.windows(2).any(|w| (w[1] - w[0]).abs() > 1) {
            return Err(PathError::BadSteps);
        }
        Ok(MotzkinPath { values })
    }

    pub fn from_steps(steps: &[i64]) -> Result<Self, PathError> {
        let mut v = vec![0];
        for &s in steps {
            v.push(v.last().unwrap() + s);
        }
        Self::new(v)
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn sigma(&self) -> usize {
        self.values.len() - 1
    }

    pub fn gamma(&self) -> i64 {
        *self.values.last().unwrap()
    }

    pub fn steps(&self) -> Vec<i64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Inserts `M_i+1` after a flat step and `M_i+1, M_i+2` after an up step.
    pub fn extend(&self) -> MotzkinPath {
        let mut out = Vec::with_capacity(2 * self.values.len());
        out.push(self.values[0]);
        for w in self.values.windows(2) {
            let (a, b) = (w[0], w[1]);
            match b - a {
                0 => out.push(a + 1),
                1 => {
                    out.push(a + 1);
                    out.push(a + 2);
                }
                _ => {}
            }
            out.push(b);
        }
        MotzkinPath { values: out }
    }

    /// The path read backwards and shifted to start at 0.
    pub fn inverse(&self) -> MotzkinPath {
        let g = self.gamma();
        MotzkinPath { values: self.values.iter().rev().map(|v| v - g).collect() }
    }

    /// Prefixes the start angle (and a special stem when `c = 1`) to an extended path.
    pub fn c_shift(&self, c: u8) -> MotzkinPath {
        let mut out = Vec::with_capacity(self.values.len() + 2);
        out.push(0);
        if c == 0 {
            out.extend(self.values.iter().map(|v| v - 1));
        } else {
            out.push(1);
            out.extend_from_slice(&self.values);
        }
        MotzkinPath { values: out }
    }

    pub fn to_ascii(&self) -> String {
        self.steps()
            .iter()
            .map(|s| match s {
                1 => '+',
                0 => '0',
                _ => '-',
            })
            .collect()
    }

    pub fn from_ascii(s: &str) -> Result<Self, PathError> {
        let steps = s
            .trim()
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '0' => Ok(0),
                '-' => Ok(-1),
                other => Err(PathError::BadChar(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_steps(&steps)
    }
}

/// `|M_sigma^gamma|`, the number of Motzkin paths of length `sigma` ending at `gamma`.
pub fn count_motzkin(sigma: usize, gamma: i64) -> BigUint {
    let g = gamma.unsigned_abs() as usize;
    if g > sigma {
        return BigUint::zero();
    }
    let mut total = BigUint::zero();
    for up in g..=(sigma + g) / 2 {
        total += trinomial_term(sigma, up, up - g);
    }
    total
}

fn trinomial_term(sigma: usize, up: usize, down: usize) -> BigUint {
    let flat = sigma - up - down;
    factorial(sigma as u64) / (factorial(up as u64) * factorial(down as u64) * factorial(flat as u64))
}

/// Uniform Motzkin bridge: draw the number of up steps with its exact weight, then shuffle.
pub fn sample_motzkin_bridge<R: Rng + ?Sized>(
    sigma: usize,
    gamma: i64,
    rng: &mut R,
) -> Result<MotzkinPath, PathError> {
    let g = gamma.unsigned_abs() as usize;
    if g > sigma {
        return Err(PathError::EmptyClass { sigma, gamma });
    }
    let (gu, gd) = if gamma >= 0 { (g, 0) } else { (0, g) };
    let extra: Vec<usize> = (0..=(sigma - g) / 2).collect();
    let weights: Vec<BigUint> =
        extra.iter().map(|&e| trinomial_term(sigma, gu + e, gd + e)).collect();
    let e = extra[pick_big(&weights, rng)];
    let (up, down) = (gu + e, gd + e);
    let mut steps = Vec::with_capacity(sigma);
    steps.extend(std::iter::repeat_n(1i64, up));
    steps.extend(std::iter::repeat_n(-1i64, down));
    steps.extend(std::iter::repeat_n(0i64, sigma - up - down));
    steps.shuffle(rng);
    MotzkinPath::from_steps(&steps)
}

/// Every prefix has more than `k` times as many zeros as ones.
pub fn is_k_dominating(bits: &[u8], k: usize) -> bool {
    let (mut zeros, mut ones) = (0usize, 0usize);
    for &b in bits {
        if b == 0 {
            zeros += 1;
        } else {
            ones += 1;
        }
        if zeros <= k * ones {
            return false;
        }
    }
    true
}

/// The word read backwards is `k`-dominating.
pub fn is_inverse_k_dominating(bits: &[u8], k: usize) -> bool {
    let rev: Vec<u8> = bits.iter().rev().cloned().collect();
    is_k_dominating(&rev, k)
}

pub fn rotate(bits: &[u8], start: usize) -> Vec<u8> {
    bits[start..].iter().chain(bits[..start].iter()).cloned().collect()
}

/// Rotation offsets giving `k`-dominating words; there are exactly `p - k q` of them.
pub fn dominating_rotations(bits: &[u8], k: usize) -> Result<Vec<usize>, PathError> {
    let p = bits.iter().filter(|&&b| b == 0).count();
    let q = bits.len() - p;
    if p < k * q {
        return Err(PathError::PreconditionFailed { p, q, k });
    }
    Ok((0..bits.len()).filter(|&s| is_k_dominating(&rotate(bits, s), k)).collect())
}

pub fn word_to_ascii(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

pub fn word_from_ascii(s: &str) -> Result<Vec<u8>, PathError> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(PathError::BadChar(other)),
        })
        .collect()
}

/// Walk with `0 -> +1` and `1 -> -3`.
pub fn word_walk(bits: &[u8]) -> Vec<i64> {
    let mut w = Vec::with_capacity(bits.len() + 1);
    w.push(0);
    for &b in bits {
        w.push(w.last().unwrap() + if b == 0 { 1 } else { -3 });
    }
    w
}

/// The walk of the word hits its final value for the first time at the last step.
pub fn is_first_passage(bits: &[u8]) -> bool {
    let w = word_walk(bits);
    let end = *w.last().unwrap();
    end > 0 && w[..w.len() - 1].iter().all(|&x| x < end)
}

/// Uniform word with `3 rho + tau` zeros and `rho` ones whose walk first reaches `tau` at its end.
///
/// A uniform shuffle is rotated at the first hitting time of `max - nu`, `nu` uniform in `[0, tau)`.
pub fn sample_first_passage<R: Rng + ?Sized>(rho: usize, tau: usize, rng: &mut R) -> Vec<u8> {
    assert!(tau >= 1);
    let mut bits = vec![0u8; 3 * rho + tau];
    bits.extend(std::iter::repeat_n(1u8, rho));
    bits.shuffle(rng);
    let w = word_walk(&bits);
    let max = *w.iter().max().unwrap();
    let nu = rng.random_range(0..tau) as i64;
    let m = w.iter().position(|&x| x == max - nu).unwrap();
    let out = rotate(&bits, m % bits.len());
    debug_assert!(is_first_passage(&out));
    out
}

/// `|P_{3,3rho+tau,rho}| = tau/(4 rho + tau) * C(4 rho + tau, rho)`.
pub fn count_first_passage(rho: usize, tau: usize) -> BigUint {
    let len = (4 * rho + tau) as u64;
    binomial(len, rho as u64) * tau / len
}
