//! Brute-force oracles that share no code path with the bijective machinery.
#![allow(dead_code)]

use num_bigint::BigUint;
use toromaps::rotmap::RotMap;

/// Essentially simple toroidal triangulations with `n` vertices rooted at a
/// corner of a maximal contractible triangle, counted by gluing the sides of
/// `2n` labelled triangles in every way.
pub fn glued_triangulations(n: usize) -> BigUint {
    let darts = 6 * n;
    let phi: Vec<usize> = (0..darts).map(|d| 3 * (d / 3) + (d + 1) % 3).collect();
    let mut twin = vec![usize::MAX; darts];
    let mut corners = 0u64;
    if n > 1 {
        // faces other than the first are interchangeable and can be rotated,
        // so dart 0 glued to dart 3 stands for 3 (2n - 1) choices
        for (b, mult) in [(1, 1), (2, 1), (3, 3 * (2 * n as u64 - 1))] {
            let mut part = 0;
            twin[0] = b;
            twin[b] = 0;
            glue(&phi, &mut twin, n, &mut part);
            twin[0] = usize::MAX;
            twin[b] = usize::MAX;
            corners += mult * part;
        }
    } else {
        glue(&phi, &mut twin, n, &mut corners);
    }
    // each rooted map appears (N-1)! times among labelled maps, and phi ranges
    // over N!/(3^{2n} (2n)!) labellings; every gluing contributes its corners
    let num = BigUint::from(corners);
    let den = BigUint::from(3u32).pow(2 * n as u32) * (1..=2 * n as u64).product::<BigUint>();
    assert_eq!(&num % &den, BigUint::ZERO);
    num / den
}

fn glue(phi: &[usize], twin: &mut [usize], n: usize, corners: &mut u64) {
    let Some(a) = twin.iter().position(|&t| t == usize::MAX) else {
        if vertex_count(phi, twin) == n && connected(twin) {
            let next: Vec<usize> = (0..twin.len()).map(|x| phi[twin[x]]).collect();
            let m = RotMap::from_tables(twin.iter().map(|&t| Some(t)).collect(), next).unwrap();
            if m.is_essentially_simple().unwrap() {
                *corners += 3 * maximal_disks(phi, twin) as u64;
            }
        }
        return;
    };
    for b in a + 1..twin.len() {
        if twin[b] == usize::MAX {
            twin[a] = b;
            twin[b] = a;
            glue(phi, twin, n, corners);
            twin[a] = usize::MAX;
            twin[b] = usize::MAX;
        }
    }
}

/// Face sets of the disks bounded by closed walks of three distinct edges,
/// keeping those not strictly inside another one.
fn maximal_disks(phi: &[usize], twin: &[usize]) -> usize {
    let nd = twin.len();
    let mut vert = vec![usize::MAX; nd];
    let mut nv = 0;
    for d in 0..nd {
        if vert[d] != usize::MAX {
            continue;
        }
        let mut e = d;
        while vert[e] == usize::MAX {
            vert[e] = nv;
            e = phi[twin[e]];
        }
        nv += 1;
    }
    let edge = |d: usize| d.min(twin[d]);
    let mut disks: Vec<Vec<bool>> = Vec::new();
    for d1 in 0..nd {
        for d2 in (0..nd).filter(|&x| vert[x] == vert[twin[d1]]) {
            for d3 in (0..nd).filter(|&x| vert[x] == vert[twin[d2]] && vert[twin[x]] == vert[d1]) {
                let es = [edge(d1), edge(d2), edge(d3)];
                if es[0] == es[1] || es[1] == es[2] || es[0] == es[2] {
                    continue;
                }
                let cut = |x: usize| es.contains(&edge(x));
                let mut inside = vec![false; nd / 3];
                let mut stack = vec![d1 / 3];
                inside[d1 / 3] = true;
                while let Some(f) = stack.pop() {
                    for x in 3 * f..3 * f + 3 {
                        if !cut(x) && !inside[twin[x] / 3] {
                            inside[twin[x] / 3] = true;
                            stack.push(twin[x] / 3);
                        }
                    }
                }
                if [d1, d2, d3].iter().any(|&x| inside[twin[x] / 3]) {
                    continue;
                }
                let on_walk: Vec<usize> = [d1, d2, d3].iter().map(|&x| vert[x]).collect();
                let mut vs = vec![false; nv];
                let mut es_in = std::collections::HashSet::new();
                for x in (0..nd).filter(|&x| inside[x / 3]) {
                    if !on_walk.contains(&vert[x]) {
                        vs[vert[x]] = true;
                    }
                    if !cut(x) {
                        es_in.insert(edge(x));
                    }
                }
                let faces = inside.iter().filter(|&&b| b).count() as i64;
                let chi = vs.iter().filter(|&&b| b).count() as i64 - es_in.len() as i64 + faces;
                if chi == 1 && !disks.contains(&inside) {
                    disks.push(inside);
                }
            }
        }
    }
    let within = |a: &[bool], b: &[bool]| a != b && a.iter().zip(b).all(|(&x, &y)| !x || y);
    disks.iter().filter(|a| !disks.iter().any(|b| within(a, b))).count()
}

fn vertex_count(phi: &[usize], twin: &[usize]) -> usize {
    let mut seen = vec![false; twin.len()];
    let mut v = 0;
    for d in 0..twin.len() {
        if seen[d] {
            continue;
        }
        v += 1;
        let mut e = d;
        while !seen[e] {
            seen[e] = true;
            e = phi[twin[e]];
        }
    }
    v
}

fn connected(twin: &[usize]) -> bool {
    let faces = twin.len() / 3;
    let mut seen = vec![false; faces];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(f) = stack.pop() {
        for d in 3 * f..3 * f + 3 {
            let g = twin[d] / 3;
            if !seen[g] {
                seen[g] = true;
                stack.push(g);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Well-labelled forests with `tau` trees and `rho` tree-vertices, counted shape
/// by shape: a vertex with `c` children admits `C(c + 2, 2)` nondecreasing child
/// label sequences within one of its own label; children of floors are pinned to -1.
pub fn forests_by_shapes(rho: usize, tau: usize) -> u64 {
    // Ordered lists of `trees` plane trees with `size` vertices in total, each weighted.
    fn trees(size: usize, count: usize, memo: &mut Vec<Vec<Option<u64>>>) -> u64 {
        if count == 0 {
            return u64::from(size == 0);
        }
        if let Some(v) = memo[size][count] {
            return v;
        }
        let mut total = 0;
        for first in 1..=size - (count - 1) {
            let root = first - 1;
            let mut one = 0;
            for c in 0..=root {
                one += (c as u64 + 2) * (c as u64 + 1) / 2 * trees(root, c, memo);
            }
            total += one * trees(size - first, count - 1, memo);
        }
        memo[size][count] = Some(total);
        total
    }
    let mut memo = vec![vec![None; rho + 2]; rho + 2];
    // Children of the floors 1..tau form one sequence of trees; split it among floors.
    (0..=rho).map(|kids| trees(rho, kids, &mut memo) * compositions_weak(kids, tau)).sum()
}

fn compositions_weak(total: usize, parts: usize) -> u64 {
    // C(total + parts - 1, parts - 1)
    let (n, k) = ((total + parts - 1) as u64, (parts - 1) as u64);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Every step sequence in `{-1, 0, 1}^sigma` ending at `gamma`.
pub fn motzkin_by_steps(sigma: usize, gamma: i64) -> u64 {
    (0..3u64.pow(sigma as u32))
        .filter(|&code| {
            let mut x = code;
            let mut end = 0i64;
            for _ in 0..sigma {
                end += (x % 3) as i64 - 1;
                x /= 3;
            }
            end == gamma
        })
        .count() as u64
}

/// Rotations of `bits` all of whose prefixes have more than `k` zeros per one.
pub fn dominating_rotations_naive(bits: &[u8], k: usize) -> usize {
    (0..bits.len())
        .filter(|&s| {
            let (mut zeros, mut ones) = (0usize, 0usize);
            (0..bits.len()).all(|i| {
                if bits[(s + i) % bits.len()] == 0 {
                    zeros += 1;
                } else {
                    ones += 1;
                }
                zeros > k * ones
            })
        })
        .count()
}

/// Gaussian-elimination-free rank test: two integer vectors are independent.
pub fn independent(a: [i64; 2], b: [i64; 2]) -> bool {
    a[0] * b[1] - a[1] * b[0] != 0
}
