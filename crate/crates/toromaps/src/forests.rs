//! Well-labeled forests, their contour pairs and their word encoding.
//!
//! A forest has floors `1..=tau+1` (stored as nodes `0..=tau`) and tree
//! vertices hanging from the first `tau` floors. Nodes are kept in depth-first
//! order, which is also the order of the counterclockwise walk.

use crate::paths::{count_first_passage, is_first_passage, sample_first_passage};
use num_bigint::BigUint;
use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const NONE: usize = usize::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("word is not an inverse 3-dominating word with the requested parameters")]
    NotInverseDominating,
    #[error("malformed contour: {0}")]
    MalformedContour(String),
    #[error("invalid permutation vector at node {0}")]
    InvalidPermutationVector(usize),
    #[error("conditioning failed after {tries} tries ({accepted} accepted)")]
    ConditioningTimeout { tries: u64, accepted: u64 },
    #[error("forest violates the definition: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Forest {
    tau: usize,
    parent: Vec<usize>,
    children: Vec<Vec<usize>>,
    label: Vec<i64>,
}

/// Vertex contour `r_F` with the contour function `C_F` and the label process `L`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourPair {
    pub nodes: Vec<usize>,
    pub c: Vec<i64>,
    pub l: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetrizeMode {
    Partial,
    Complete,
}

impl Forest {
    /// The forest with `tau` empty floors.
    pub fn empty(tau: usize) -> Forest {
        Forest {
            tau,
            parent: vec![NONE; tau + 1],
            children: vec![Vec::new(); tau + 1],
            label: vec![0; tau + 1],
        }
    }

    fn push_child(&mut self, p: usize, label: i64) -> usize {
        let id = self.parent.len();
        self.parent.push(p);
        self.children.push(Vec::new());
        self.label.push(label);
        self.children[p].push(id);
        id
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn rho(&self) -> usize {
        self.parent.len() - self.tau - 1
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho() == 0
    }

    pub fn is_floor(&self, u: usize) -> bool {
        u <= self.tau
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        (self.parent[u] != NONE).then_some(self.parent[u])
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn label(&self, u: usize) -> i64 {
        self.label[u]
    }

    pub fn labels(&self) -> &[i64] {
        &self.label
    }

    /// 1-based floor index of a node.
    pub fn floor_of(&self, mut u: usize) -> usize {
        while self.parent[u] != NONE {
            u = self.parent[u];
        }
        u + 1
    }

    pub fn depth(&self, mut u: usize) -> usize {
        let mut d = 1;
        while self.parent[u] != NONE {
            u = self.parent[u];
            d += 1;
        }
        d
    }

    /// The node as a sequence of positive integers (floor index, then child ranks).
    pub fn element(&self, mut u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while self.parent[u] != NONE {
            let p = self.parent[u];
            out.push(self.children[p].iter().position(|&c| c == u).unwrap() + 1);
            u = p;
        }
        out.push(u + 1);
        out.reverse();
        out
    }

    /// Number of stems in front of each child of `u`, plus the trailing count.
    ///
    /// Children of floors carry no stems.
    pub fn stem_gaps(&self, u: usize) -> Vec<i64> {
        if self.is_floor(u) {
            return vec![0; self.children[u].len() + 1];
        }
        let mut prev = self.label[u] - 1;
        let mut out = Vec::with_capacity(self.children[u].len() + 1);
        for &c in &self.children[u] {
            out.push(self.label[c] - prev);
            prev = self.label[c];
        }
        out.push(self.label[u] + 1 - prev);
        out
    }

    /// Structural conditions of a forest (floors, last floor childless).
    pub fn validate_shape(&self) -> Result<(), ForestError> {
        let bad = |s: &str| Err(ForestError::Invalid(s.to_string()));
        if self.parent.len() < self.tau + 1 || self.tau == 0 {
            return bad("missing floors");
        }
        if !self.children[self.tau].is_empty() {
            return bad("last floor has children");
        }
        for u in 0..self.len() {
            if self.is_floor(u) != (self.parent[u] == NONE) {
                return bad("floor/tree mismatch");
            }
            for &c in &self.children[u] {
                if self.parent[c] != u || c <= u {
                    return bad("children are not in depth-first order");
                }
            }
        }
        Ok(())
    }

    pub fn is_well_labeled(&self) -> bool {
        (0..self.len()).all(|u| {
            if self.is_floor(u) {
                self.label[u] == 0 && self.children[u].iter().all(|&c| self.label[c] == -1)
            } else {
                self.stem_gaps(u).iter().all(|&g| g >= 0)
            }
        })
    }

    pub fn validate(&self) -> Result<(), ForestError> {
        self.validate_shape()?;
        if !self.is_well_labeled() {
            return Err(ForestError::Invalid("labels are not well-labeled".into()));
        }
        Ok(())
    }

    /// `1` down a tree edge, `0` up a tree edge, at a stem, or along a floor edge.
    pub fn encode_word(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * self.rho() + self.tau);
        for f in 0..self.tau {
            for &c in &self.children[f] {
                self.encode_tree(c, &mut out);
            }
            out.push(0);
        }
        out
    }

    fn encode_tree(&self, u: usize, out: &mut Vec<u8>) {
        out.push(1);
        let gaps = self.stem_gaps(u);
        for (i, &c) in self.children[u].iter().enumerate() {
            out.extend(std::iter::repeat_n(0, gaps[i] as usize));
            self.encode_tree(c, out);
        }
        out.extend(std::iter::repeat_n(0, gaps[gaps.len() - 1] as usize));
        out.push(0);
    }

    pub fn decode_word(bits: &[u8], rho: usize, tau: usize) -> Result<Forest, ForestError> {
        if tau == 0
            || bits.len() != 4 * rho + tau
            || bits.iter().filter(|&&b| b == 1).count() != rho
            || !is_first_passage(bits)
        {
            return Err(ForestError::NotInverseDominating);
        }
        let mut f = Forest::empty(tau);
        let mut floor = 0usize;
        // (node, zeros seen at it)
        let mut stack: Vec<(usize, i64)> = Vec::new();
        for &b in bits {
            match stack.last_mut() {
                None => {
                    if b == 1 {
                        let id = f.push_child(floor, -1);
                        stack.push((id, 0));
                    } else {
                        floor += 1;
                    }
                }
                Some((u, zeros)) => {
                    let u = *u;
                    if b == 1 {
                        let l = f.label[u] - 1 + *zeros;
                        let id = f.push_child(u, l);
                        stack.push((id, 0));
                    } else {
                        *zeros += 1;
                        if *zeros == 3 {
                            stack.pop();
                        }
                    }
                }
            }
        }
        debug_assert!(stack.is_empty() && floor == tau);
        Ok(f)
    }

    /// Contour pair on `[0, 2 rho + tau]`.
    pub fn contour_pair(&self) -> ContourPair {
        let mut nodes = Vec::with_capacity(2 * self.rho() + self.tau + 1);
        for f in 0..=self.tau {
            nodes.push(f);
            for &c in &self.children[f] {
                self.contour_tree(c, &mut nodes);
                nodes.push(f);
            }
        }
        let c = nodes
            .iter()
            .map(|&u| self.floor_of(u) as i64 - 1 - (self.depth(u) as i64 - 1))
            .collect();
        let l = nodes.iter().map(|&u| self.label[u]).collect();
        ContourPair { nodes, c, l }
    }

    fn contour_tree(&self, u: usize, nodes: &mut Vec<usize>) {
        nodes.push(u);
        for &c in &self.children[u] {
            self.contour_tree(c, nodes);
            nodes.push(u);
        }
    }

    /// Rebuilds the labeled forest from `(C_F, L)`.
    pub fn from_contour(c: &[i64], l: &[i64]) -> Result<Forest, ForestError> {
        let bad = |s: &str| Err(ForestError::MalformedContour(s.to_string()));
        if c.is_empty() || c.len() != l.len() || c[0] != 0 || l[0] != 0 {
            return bad("bad endpoints");
        }
        let tau = *c.last().unwrap();
        if tau < 1 {
            return bad("endpoint must be positive");
        }
        let mut f = Forest::empty(tau as usize);
        let mut cur = 0usize;
        for i in 1..c.len() {
            match c[i] - c[i - 1] {
                -1 => cur = f.push_child(cur, l[i]),
                1 => {
                    if f.is_floor(cur) {
                        if cur as i64 + 1 > tau {
                            return bad("too many floors");
                        }
                        cur += 1;
                    } else {
                        cur = f.parent[cur];
                    }
                }
                _ => return bad("steps must be +1 or -1"),
            }
            if f.label[cur] != l[i] {
                return bad("labels disagree along the contour");
            }
        }
        if cur != tau as usize {
            return bad("contour does not end on the last floor");
        }
        f.validate()?;
        Ok(f)
    }

    /// Contour as `(`, `)` and `|` (next floor) on one line and labels on the next.
    pub fn to_text(&self) -> String {
        let cp = self.contour_pair();
        let mut shape = String::new();
        for (i, w) in cp.nodes.windows(2).enumerate() {
            shape.push(if cp.c[i + 1] < cp.c[i] {
                '('
            } else if self.is_floor(w[0]) {
                '|'
            } else {
                ')'
            });
        }
        let labels: Vec<String> = cp.l.iter().map(|x| x.to_string()).collect();
        format!("{shape}\n{}", labels.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Forest, ForestError> {
        let mut lines = text.lines();
        let shape = lines.next().unwrap_or("").trim();
        let labels: Vec<i64> = lines
            .next()
            .unwrap_or("")
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| ForestError::MalformedContour(t.to_string())))
            .collect::<Result<_, _>>()?;
        let mut c = vec![0i64];
        for ch in shape.chars() {
            let last = *c.last().unwrap();
            c.push(match ch {
                '(' => last - 1,
                ')' | '|' => last + 1,
                other => return Err(ForestError::MalformedContour(other.to_string())),
            });
        }
        Forest::from_contour(&c, &labels)
    }

    /// Reorders children by `p` (`p[u][i]` is the old rank of the new `i`-th child).
    ///
    /// Partial mode keeps the label increments at their positions; complete mode
    /// moves each increment together with its subtree.
    pub fn symmetrize(&self, p: &[Vec<usize>], mode: SymmetrizeMode) -> Result<Forest, ForestError> {
        if p.len() != self.len() {
            return Err(ForestError::InvalidPermutationVector(p.len()));
        }
        for (u, perm) in p.iter().enumerate() {
            let c = self.children[u].len();
            let mut seen = vec![false; c];
            if perm.len() != c {
                return Err(ForestError::InvalidPermutationVector(u));
            }
            for &i in perm {
                if i >= c || seen[i] {
                    return Err(ForestError::InvalidPermutationVector(u));
                }
                seen[i] = true;
            }
        }
        let mut out = Forest::empty(self.tau);
        for f in 0..=self.tau {
            self.symmetrize_below(f, f, p, mode, &mut out);
        }
        Ok(out)
    }

    fn symmetrize_below(
        &self,
        u: usize,
        nu: usize,
        p: &[Vec<usize>],
        mode: SymmetrizeMode,
        out: &mut Forest,
    ) {
        let kids = &self.children[u];
        for (i, &j) in p[u].iter().enumerate() {
            let moved = kids[j];
            let inc = match mode {
                SymmetrizeMode::Partial => self.label[kids[i]] - self.label[u],
                SymmetrizeMode::Complete => self.label[moved] - self.label[u],
            };
            let id = out.push_child(nu, out.label[nu] + inc);
            self.symmetrize_below(moved, id, p, mode, out);
        }
    }

    pub fn identity_permutation(&self) -> Vec<Vec<usize>> {
        self.children.iter().map(|c| (0..c.len()).collect()).collect()
    }
}

/// `|F^rho_tau|`.
pub fn count_forests(rho: usize, tau: usize) -> BigUint {
    count_first_passage(rho, tau)
}

pub fn sample_uniform_forest<R: Rng + ?Sized>(rho: usize, tau: usize, rng: &mut R) -> Forest {
    let w = sample_first_passage(rho, tau, rng);
    Forest::decode_word(&w, rho, tau).expect("first-passage word decodes")
}

/// Conditioned Galton-Watson forest by rejection, with at most `budget` attempts.
///
/// Floors get a geometric number of trees of parameter 3/4; a tree vertex gets
/// three such geometric groups of children separated by its two stems.
pub fn sample_gw_forest<R: Rng + ?Sized>(
    rho: usize,
    tau: usize,
    budget: u64,
    rng: &mut R,
) -> Result<Forest, ForestError> {
    let geo = Geometric::new(0.75).unwrap();
    for _ in 0..budget {
        if let Some(f) = gw_attempt(rho, tau, &geo, rng) {
            return Ok(f);
        }
    }
    Err(ForestError::ConditioningTimeout { tries: budget, accepted: 0 })
}

fn gw_attempt<R: Rng + ?Sized>(rho: usize, tau: usize, geo: &Geometric, rng: &mut R) -> Option<Forest> {
    let mut f = Forest::empty(tau);
    for fl in 0..tau {
        let k = geo.sample(rng) as usize;
        for _ in 0..k {
            if f.rho() == rho {
                return None;
            }
            let id = f.push_child(fl, -1);
            if !gw_grow(&mut f, id, rho, geo, rng) {
                return None;
            }
        }
    }
    (f.rho() == rho).then_some(f)
}

fn gw_grow<R: Rng + ?Sized>(f: &mut Forest, u: usize, rho: usize, geo: &Geometric, rng: &mut R) -> bool {
    let l = f.label[u];
    for group in 0..3 {
        let k = geo.sample(rng) as usize;
        for _ in 0..k {
            if f.rho() == rho {
                return false;
            }
            let id = f.push_child(u, l - 1 + group);
            if !gw_grow(f, id, rho, geo, rng) {
                return false;
            }
        }
    }
    true
}

/// All forests of `F^rho_tau`, by decoding every word.
pub fn enumerate_forests(rho: usize, tau: usize) -> Vec<Forest> {
    let len = 4 * rho + tau;
    let mut out = Vec::new();
    let mut word = vec![0u8; len];
    enumerate_words(&mut word, 0, rho, &mut out, rho, tau);
    out
}

fn enumerate_words(w: &mut Vec<u8>, pos: usize, ones: usize, out: &mut Vec<Forest>, rho: usize, tau: usize) {
    if ones == 0 {
        for b in &mut w[pos..] {
            *b = 0;
        }
        if let Ok(f) = Forest::decode_word(w, rho, tau) {
            out.push(f);
        }
        return;
    }
    if w.len() - pos < ones {
        return;
    }
    w[pos] = 1;
    enumerate_words(w, pos + 1, ones - 1, out, rho, tau);
    w[pos] = 0;
    enumerate_words(w, pos + 1, ones, out, rho, tau);
}
