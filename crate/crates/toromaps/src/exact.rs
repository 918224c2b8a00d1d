//! Big-integer helpers: binomials and exact weighted choice.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |a, i| a * i)
}

/// Uniform integer in `[0, bound)` by rejection on random 32-bit limbs.
pub fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    if let Some(b) = bound.to_u64() {
        return BigUint::from(rng.random_range(0..b));
    }
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = bits - 32 * (words as u64 - 1);
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        if top < 32 {
            digits[words - 1] &= (1u32 << top) - 1;
        }
        let x = BigUint::from_slice(&digits);
        if &x < bound {
            return x;
        }
    }
}

/// Index chosen with probability proportional to its exact weight.
pub fn pick_big<R: Rng + ?Sized>(weights: &[BigUint], rng: &mut R) -> usize {
    let total: BigUint = weights.iter().sum();
    let mut x = random_below(&total, rng);
    for (i, w) in weights.iter().enumerate() {
        if &x < w {
            return i;
        }
        x -= w;
    }
    unreachable!()
}

/// Index chosen proportionally to `exp(lw)`.
pub fn pick_ln<R: Rng + ?Sized>(lw: &[f64], rng: &mut R) -> usize {
    let m = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = lw.iter().map(|&x| (x - m).exp()).collect();
    pick_f64(&w, rng)
}

pub fn pick_f64<R: Rng + ?Sized>(w: &[f64], rng: &mut R) -> usize {
    let total: f64 = w.iter().sum();
    assert!(total > 0.0, "all weights vanish");
    let mut x = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &wi) in w.iter().enumerate() {
        if wi > 0.0 {
            last = i;
            if x < wi {
                return i;
            }
            x -= wi;
        }
    }
    last
}

/// Natural logarithm of a big integer.
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}
