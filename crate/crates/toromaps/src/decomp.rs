//! Kernel types, parameter vectors, and the decomposition of a balanced
//! unicellular map into forests and Motzkin paths (and back).
//!
//! The face walk from the first corner `alpha_1` splits into `2t` segments,
//! one per side of each kernel chain. Segment `i` owns the corner region at
//! its start, the optional special stem there, and the inner chain vertices
//! with the stems on its side. Reading the segment with `1` for a tree edge
//! going down and `0` for anything else gives the word of forest `i`.

use crate::forests::{Forest, ForestError};
use crate::labels::LabelTable;
use crate::paths::{MotzkinPath, PathError};
use crate::rotmap::{Dart, RotMap};
use crate::unicell::{Kernel, Shape, UnicellError, UnicellularMap};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("map does not match any kernel type: {0}")]
    UnknownKernel(String),
    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),
    #[error(transparent)]
    Unicell(#[from] UnicellError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// `(gamma_1 + gamma_2, gamma_2 + gamma_3)` and `(c_1..c_6)` for types 1 to 9.
pub const KERNEL_TABLE: [((i64, i64), [u8; 6]); 9] = [
    ((1, 0), [0, 0, 0, 1, 1, 0]),
    ((1, 1), [0, 0, 0, 0, 1, 1]),
    ((0, 0), [0, 1, 0, 0, 1, 0]),
    ((0, -1), [0, 0, 1, 1, 0, 0]),
    ((0, 0), [0, 0, 1, 0, 0, 1]),
    ((-1, -1), [0, 1, 1, 0, 0, 0]),
    ((0, 0), [1, 0, 0, 1, 0, 0]),
    ((0, 1), [1, 0, 0, 0, 0, 1]),
    ((-1, 0), [1, 1, 0, 0, 0, 0]),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub k: u8,
    pub t: usize,
    pub gamma_sums: Option<(i64, i64)>,
    pub c: Vec<u8>,
}

impl KernelSpec {
    pub fn new(k: u8) -> KernelSpec {
        match k {
            0 => KernelSpec { k, t: 2, gamma_sums: None, c: vec![0; 4] },
            1..=9 => {
                let (g, c) = KERNEL_TABLE[k as usize - 1];
                KernelSpec { k, t: 3, gamma_sums: Some(g), c: c.to_vec() }
            }
            _ => panic!("kernel type {k} out of range"),
        }
    }

    pub fn all() -> Vec<KernelSpec> {
        (0..10).map(KernelSpec::new).collect()
    }

    pub fn shape(&self) -> Shape {
        if self.k == 0 {
            Shape::Square
        } else {
            Shape::Hexagonal
        }
    }

    /// Whether `(gamma_1, .., gamma_t)` satisfies the balance condition of the type.
    pub fn accepts(&self, gamma: &[i64]) -> bool {
        match self.gamma_sums {
            None => gamma.iter().all(|&g| g == 0),
            Some((a, b)) => gamma[0] + gamma[1] == a && gamma[1] + gamma[2] == b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParameterVector {
    pub k: u8,
    pub rho: Vec<usize>,
    pub tau: Vec<usize>,
    pub gamma: Vec<i64>,
    pub sigma: Vec<usize>,
}

impl ParameterVector {
    pub fn t(&self) -> usize {
        KernelSpec::new(self.k).t
    }

    /// `sum rho + sigma_1 + .. + sigma_t + t - 1`.
    pub fn n(&self) -> usize {
        let t = self.t();
        self.rho.iter().sum::<usize>() + self.sigma[..t].iter().sum::<usize>() + t - 1
    }

    pub fn validate(&self, n: Option<usize>) -> Result<(), DecompError> {
        let bad = |s: String| Err(DecompError::InconsistentParameters(s));
        if self.k > 9 {
            return bad(format!("type {}", self.k));
        }
        let spec = KernelSpec::new(self.k);
        let t = spec.t;
        if [self.rho.len(), self.tau.len(), self.gamma.len(), self.sigma.len()] != [2 * t; 4] {
            return bad("vector lengths".into());
        }
        for i in 0..2 * t {
            let j = i % t;
            let sign = if i < t { 1 } else { -1 };
            if self.sigma[i] != self.sigma[j] || self.gamma[i] != sign * self.gamma[j] {
                return bad(format!("antisymmetry at {i}"));
            }
            if self.gamma[i].unsigned_abs() as usize > self.sigma[i] {
                return bad(format!("|gamma| > sigma at {i}"));
            }
            let want = 2 * self.sigma[i] as i64 + self.gamma[i] + spec.c[i] as i64 + 1;
            if self.tau[i] as i64 != want {
                return bad(format!("tau_{i} = {} but expected {want}", self.tau[i]));
            }
        }
        if !spec.accepts(&self.gamma[..t]) {
            return bad("gamma sums do not match the kernel type".into());
        }
        if let Some(n) = n {
            if self.n() != n {
                return bad(format!("parameters give n = {}", self.n()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecomposedMap {
    pub k: u8,
    pub forests: Vec<Forest>,
    pub motzkin: Vec<MotzkinPath>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Floor {
    Stem,
    Edge,
}

impl DecomposedMap {
    pub fn spec(&self) -> KernelSpec {
        KernelSpec::new(self.k)
    }

    pub fn parameters(&self) -> ParameterVector {
        let t = self.spec().t;
        let side = |i: usize| &self.motzkin[i % t];
        ParameterVector {
            k: self.k,
            rho: self.forests.iter().map(|f| f.rho()).collect(),
            tau: self.forests.iter().map(|f| f.tau()).collect(),
            gamma: (0..2 * t).map(|i| if i < t { side(i).gamma() } else { -side(i).gamma() }).collect(),
            sigma: (0..2 * t).map(|i| side(i).sigma()).collect(),
        }
    }

    /// Path read along segment `i`: the chain path on side A, its inverse on side B.
    pub fn side_path(&self, i: usize) -> MotzkinPath {
        let t = self.spec().t;
        if i < t {
            self.motzkin[i].clone()
        } else {
            self.motzkin[i - t].inverse()
        }
    }

    fn skeleton(&self, i: usize) -> Vec<Floor> {
        let mut sk = Vec::new();
        if self.spec().c[i] == 1 {
            sk.push(Floor::Stem);
        }
        sk.push(Floor::Edge);
        for s in self.side_path(i).steps() {
            sk.extend(std::iter::repeat_n(Floor::Stem, (s + 1) as usize));
            sk.push(Floor::Edge);
        }
        sk
    }

    pub fn to_json(&self) -> DecomposedJson {
        let p = self.parameters();
        DecomposedJson {
            k: self.k,
            rho: p.rho,
            tau: p.tau,
            gamma: p.gamma,
            sigma: p.sigma,
            forests: self.forests.iter().map(|f| crate::paths::word_to_ascii(&f.encode_word())).collect(),
            motzkin: self.motzkin.iter().map(|m| m.to_ascii()).collect(),
        }
    }

    pub fn from_json(j: &DecomposedJson) -> Result<DecomposedMap, DecompError> {
        let forests = j
            .forests
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let bits = crate::paths::word_from_ascii(w)?;
                let rho = *j.rho.get(i).ok_or_else(|| DecompError::InconsistentParameters("rho".into()))?;
                let tau = *j.tau.get(i).ok_or_else(|| DecompError::InconsistentParameters("tau".into()))?;
                Ok(Forest::decode_word(&bits, rho, tau)?)
            })
            .collect::<Result<Vec<_>, DecompError>>()?;
        let motzkin = j.motzkin.iter().map(|s| MotzkinPath::from_ascii(s)).collect::<Result<Vec<_>, _>>()?;
        let d = DecomposedMap { k: j.k, forests, motzkin };
        d.parameters().validate(None)?;
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposedJson {
    pub k: u8,
    pub rho: Vec<usize>,
    pub tau: Vec<usize>,
    pub gamma: Vec<i64>,
    pub sigma: Vec<usize>,
    pub forests: Vec<String>,
    pub motzkin: Vec<String>,
}

/// Builds the kernel-rooted unicellular map. Dart `i` is the `i`-th dart of its face walk.
pub fn assemble(d: &DecomposedMap) -> Result<UnicellularMap, DecompError> {
    let spec = d.spec();
    let t = spec.t;
    if d.forests.len() != 2 * t || d.motzkin.len() != t {
        return Err(DecompError::InconsistentParameters("component counts".into()));
    }
    d.parameters().validate(None)?;
    let mut twin: Vec<Option<Dart>> = Vec::new();
    let mut sides: Vec<Vec<Dart>> = vec![Vec::new(); 2 * t];
    let mut kernel_root = None;
    for (i, f) in d.forests.iter().enumerate() {
        let mut sk = d.skeleton(i).into_iter();
        let mut stack: Vec<(Dart, u8)> = Vec::new();
        for b in f.encode_word() {
            let id = twin.len();
            twin.push(None);
            match stack.last_mut() {
                _ if b == 1 => stack.push((id, 0)),
                None => {
                    if sk.next() == Some(Floor::Edge) {
                        if i == 0 && kernel_root.is_none() {
                            kernel_root = Some(id);
                        }
                        sides[i].push(id);
                    }
                }
                Some((down, zeros)) => {
                    *zeros += 1;
                    if *zeros == 3 {
                        let down = *down;
                        twin[down] = Some(id);
                        twin[id] = Some(down);
                        stack.pop();
                    }
                }
            }
        }
        if sk.next().is_some() {
            return Err(DecompError::InconsistentParameters(format!("forest {i} too short")));
        }
    }
    for c in 0..t {
        let (a, b) = (&sides[c], &sides[c + t]);
        let s = a.len();
        for k in 0..s {
            twin[a[k]] = Some(b[s - 1 - k]);
            twin[b[s - 1 - k]] = Some(a[k]);
        }
    }
    let l = twin.len();
    let mut next = vec![0; l];
    for k in 0..l {
        let o = twin[k].unwrap_or(k);
        next[o] = (k + 1) % l;
    }
    let map = RotMap::from_tables(twin, next).map_err(UnicellError::from)?;
    Ok(UnicellularMap::unrooted(map, kernel_root)?)
}

/// Inverse of [`assemble`]; needs the kernel root.
pub fn decompose(u: &UnicellularMap) -> Result<DecomposedMap, DecompError> {
    let unknown = |s: &str| DecompError::UnknownKernel(s.to_string());
    if u.root_stem().is_some() {
        return Err(unknown("map still carries a root stem"));
    }
    u.kernel_root().ok_or_else(|| unknown("no kernel root"))?;
    let m = u.map();
    let kern = u.kernel();
    let t = if kern.shape == Shape::Square { 2 } else { 3 };
    let walk = u.face_walk();
    let mut words: Vec<Vec<u8>> = vec![Vec::new(); 2 * t];
    let mut floors: Vec<Vec<Floor>> = vec![Vec::new(); 2 * t];
    let mut seg = 0usize;
    let mut depth = 0usize;
    for &dart in &walk {
        if seg >= 2 * t {
            return Err(unknown("too many segments"));
        }
        let tok = classify(m, &kern, dart);
        words[seg].push(u8::from(tok == Tok::Down));
        match tok {
            Tok::Down => depth += 1,
            Tok::Up => depth -= 1,
            Tok::Stem if depth == 0 => floors[seg].push(Floor::Stem),
            Tok::Stem => {}
            Tok::Core => {
                floors[seg].push(Floor::Edge);
                if kern.special.contains(&m.head(dart)) {
                    seg += 1;
                }
            }
        }
    }
    if seg != 2 * t {
        return Err(unknown("segments do not close up"));
    }
    let mut c = vec![0u8; 2 * t];
    let mut side_steps: Vec<Vec<i64>> = Vec::new();
    for i in 0..2 * t {
        let f = &floors[i];
        let mut j = 0;
        if f.first() == Some(&Floor::Stem) {
            c[i] = 1;
            j = 1;
        }
        if f.get(j) != Some(&Floor::Edge) {
            return Err(unknown("segment without leading edge"));
        }
        let mut steps = Vec::new();
        let mut stems = 0i64;
        for &x in &f[j + 1..] {
            match x {
                Floor::Stem => stems += 1,
                Floor::Edge => {
                    steps.push(stems - 1);
                    stems = 0;
                }
            }
        }
        if stems != 0 || steps.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(unknown("bad stem count on a chain vertex"));
        }
        side_steps.push(steps);
    }
    let motzkin: Vec<MotzkinPath> =
        side_steps[..t].iter().map(|s| MotzkinPath::from_steps(s)).collect::<Result<_, _>>()?;
    for i in 0..t {
        if MotzkinPath::from_steps(&side_steps[i + t])? != motzkin[i].inverse() {
            return Err(unknown("sides of a chain disagree"));
        }
    }
    let k = match kern.shape {
        Shape::Square => {
            if c.iter().any(|&x| x != 0) {
                return Err(unknown("special stem on a square kernel"));
            }
            0
        }
        Shape::Hexagonal => {
            let pos = KERNEL_TABLE.iter().position(|(_, cc)| cc[..] == c[..]);
            pos.ok_or_else(|| unknown("special stems in no listed position"))? as u8 + 1
        }
    };
    let gamma: Vec<i64> = motzkin.iter().map(|p| p.gamma()).collect();
    if !KernelSpec::new(k).accepts(&gamma) {
        return Err(unknown("map is not balanced"));
    }
    let mut forests = Vec::with_capacity(2 * t);
    for w in &words {
        let rho = w.iter().filter(|&&b| b == 1).count();
        forests.push(Forest::decode_word(w, rho, w.len() - 4 * rho)?);
    }
    Ok(DecomposedMap { k, forests, motzkin })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Down,
    Up,
    Stem,
    Core,
}

fn classify(m: &RotMap, k: &Kernel, d: Dart) -> Tok {
    match m.twin(d) {
        None => Tok::Stem,
        Some(_) if k.is_core_dart(m, d) => Tok::Core,
        Some(e) => {
            if k.parent_dart[m.vertex(e)] == Some(e) {
                Tok::Down
            } else {
                Tok::Up
            }
        }
    }
}

/// The shifted labeling before (`s_bullet`) and after deleting post-stem angles (`s`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftedLabeling {
    pub s_bullet: Vec<i64>,
    pub kept: Vec<bool>,
    pub s: Vec<i64>,
}

/// Concatenation `f . g`: `g` is shifted to start where `f` ends.
pub fn concat(f: &[i64], g: &[i64]) -> Vec<i64> {
    let mut out = f.to_vec();
    let base = f.last().copied().unwrap_or(0) - g[0];
    out.extend(g[1..].iter().map(|x| x + base));
    out
}

pub fn shifted_labeling(d: &DecomposedMap) -> ShiftedLabeling {
    let spec = d.spec();
    let mut s_bullet: Vec<i64> = Vec::new();
    let mut kept: Vec<bool> = Vec::new();
    for (i, f) in d.forests.iter().enumerate() {
        let shift = d.side_path(i).extend().c_shift(spec.c[i]);
        let mv = shift.values();
        let sk = d.skeleton(i);
        let cp = f.contour_pair();
        let mut run = i64::MIN;
        let mut part = Vec::with_capacity(cp.c.len());
        let mut keep = Vec::with_capacity(cp.c.len());
        let mut last_floor = usize::MAX;
        for (s, &u) in cp.nodes.iter().enumerate() {
            run = run.max(cp.c[s]);
            part.push(cp.l[s] + mv[run as usize]);
            let fresh_floor = f.is_floor(u) && u != last_floor;
            if f.is_floor(u) {
                last_floor = u;
            }
            keep.push(!(fresh_floor && u > 0 && sk[u - 1] == Floor::Stem));
        }
        if s_bullet.is_empty() {
            s_bullet = part;
            kept = keep;
        } else {
            s_bullet = concat(&s_bullet, &part);
            kept.extend_from_slice(&keep[1..]);
        }
    }
    let mut s: Vec<i64> = s_bullet.iter().zip(&kept).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
    s.pop();
    ShiftedLabeling { s_bullet, kept, s }
}

/// Vertex of every corner of the stem-free map, in walk order from `alpha_1`.
pub fn contour_vertices(u: &UnicellularMap) -> Vec<usize> {
    let m = u.map();
    let w = u.face_walk();
    let l = w.len();
    (0..l).filter(|&k| !m.is_stem(w[(k + l - 1) % l])).map(|k| m.vertex(w[k])).collect()
}

/// `d°(i, j) = m(r(i)) + m(r(j)) - 2 mbar(r(i), r(j))`.
pub fn pseudo_distance_d0(labels: &LabelTable, r: &[usize], i: usize, j: usize) -> i64 {
    let (u, v) = (r[i], r[j]);
    labels.m[u] + labels.m[v] - 2 * labels.mbar(u, v)
}

/// `S(i) + S(j) - 2 min_{i <= t <= j} S(t)`.
pub fn shifted_distance(s: &[i64], i: usize, j: usize) -> i64 {
    let (a, b) = (i.min(j), i.max(j));
    let mn = *s[a..=b].iter().min().unwrap();
    s[i] + s[j] - 2 * mn
}
