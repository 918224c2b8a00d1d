//! Toroidal unicellular maps with stems: shape, kernel chains, canonical
//! orientation, the signed counts `gamma` and the root slots.

use crate::closure::{stack_pass, Item};
use crate::rotmap::{Corner, Dart, MapError, MapJson, RotMap};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnicellError {
    #[error("not a one-face map of genus one")]
    NotUnicellular,
    #[error("map has no root stem")]
    MissingRoot,
    #[error("walk is not one of the cycles of the map")]
    NotACycleOfMap,
    #[error("root slot {0} out of range 0..4")]
    InvalidSlot(usize),
    #[error("stem rule violated at vertex {0}")]
    StemRule(usize),
    #[error("closure failed on a map that should close")]
    ClosureFailure,
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Square,
    Hexagonal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaMode {
    EdgesAndStems,
    StemsOnly,
}

/// Cycle structure of a unicellular map: the 2-core and its maximal chains.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub shape: Shape,
    pub special: Vec<usize>,
    pub in_core: Vec<bool>,
    /// For a tree vertex, its dart pointing towards the core.
    pub parent_dart: Vec<Option<Dart>>,
    /// Chains between special vertices, each as a dart sequence, listed once.
    pub chains: Vec<Vec<Dart>>,
}

impl Kernel {
    pub fn compute(m: &RotMap) -> Result<Kernel, UnicellError> {
        let nv = m.n_vertices();
        let mut deg = vec![0usize; nv];
        for d in 0..m.n_darts() {
            if !m.is_stem(d) {
                deg[m.vertex(d)] += 1;
            }
        }
        let mut in_core = vec![true; nv];
        let mut parent_dart = vec![None; nv];
        let mut queue: VecDeque<usize> = (0..nv).filter(|&v| deg[v] <= 1).collect();
        while let Some(v) = queue.pop_front() {
            if !in_core[v] {
                continue;
            }
            in_core[v] = false;
            let d = m.darts_at(v).into_iter().find(|&d| m.twin(d).is_some_and(|t| in_core[m.vertex(t)]));
            let Some(d) = d else { return Err(UnicellError::NotUnicellular) };
            parent_dart[v] = Some(d);
            let w = m.head(d);
            deg[w] -= 1;
            if deg[w] == 1 {
                queue.push_back(w);
            }
        }
        let special: Vec<usize> = (0..nv).filter(|&v| in_core[v] && deg[v] >= 3).collect();
        let degs: Vec<usize> = special.iter().map(|&v| deg[v]).collect();
        let shape = match degs[..] {
            [4] => Shape::Square,
            [3, 3] => Shape::Hexagonal,
            _ => return Err(UnicellError::NotUnicellular),
        };
        let is_core_dart = |d: Dart| m.twin(d).is_some_and(|t| in_core[m.vertex(d)] && in_core[m.vertex(t)]);
        let mut chains = Vec::new();
        let mut used = vec![false; m.n_darts()];
        for &s in &special {
            for d in m.darts_at(s) {
                if !is_core_dart(d) || used[d] {
                    continue;
                }
                let mut chain = vec![d];
                let mut cur = d;
                while !special.contains(&m.head(cur)) {
                    let back = m.twin(cur).unwrap();
                    cur = m.orbit_from(back).into_iter().skip(1).find(|&e| is_core_dart(e)).unwrap();
                    chain.push(cur);
                }
                for &e in &chain {
                    used[e] = true;
                    used[m.twin(e).unwrap()] = true;
                }
                chains.push(chain);
            }
        }
        Ok(Kernel { shape, special, in_core, parent_dart, chains })
    }

    pub fn is_core_dart(&self, m: &RotMap, d: Dart) -> bool {
        m.twin(d).is_some_and(|t| self.in_core[m.vertex(d)] && self.in_core[m.vertex(t)])
    }
}

pub fn reverse_walk(m: &RotMap, w: &[Dart]) -> Vec<Dart> {
    w.iter().rev().map(|&d| m.twin(d).unwrap()).collect()
}

/// Right-minus-left count of outgoing darts along a closed walk.
///
/// At each vertex the right side holds the darts strictly counterclockwise
/// after the incoming dart and before the outgoing one.
pub fn gamma_of_walk(m: &RotMap, cycle: &[Dart], counts: impl Fn(Dart) -> bool) -> Result<i64, UnicellError> {
    let k = cycle.len();
    if k == 0 {
        return Err(UnicellError::NotACycleOfMap);
    }
    let mut total = 0i64;
    for i in 0..k {
        let prev = cycle[(i + k - 1) % k];
        let Some(inn) = m.twin(prev) else { return Err(UnicellError::NotACycleOfMap) };
        let out = cycle[i];
        if m.vertex(inn) != m.vertex(out) {
            return Err(UnicellError::NotACycleOfMap);
        }
        let mut right = true;
        let mut d = m.ccw(inn);
        while d != inn {
            if d == out {
                right = false;
            } else if counts(d) {
                total += if right { 1 } else { -1 };
            }
            d = m.ccw(d);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnicellularMap {
    map: RotMap,
    shape: Shape,
    special: Vec<usize>,
    root_stem: Option<Dart>,
    kernel_root: Option<Dart>,
}

impl UnicellularMap {
    fn checked(map: RotMap, root_stem: Option<Dart>, kernel_root: Option<Dart>) -> Result<Self, UnicellError> {
        if !map.is_connected() || map.faces().len() != 1 || map.genus() != 1 {
            return Err(UnicellError::NotUnicellular);
        }
        let k = Kernel::compute(&map)?;
        let n = map.n_vertices();
        let extra = usize::from(root_stem.is_some());
        if map.n_edges() != n + 1 || map.n_stems() != 2 * n - 2 + extra {
            return Err(UnicellError::NotUnicellular);
        }
        let special_stems = match k.shape {
            Shape::Square => 0,
            Shape::Hexagonal => 1,
        };
        for v in 0..n {
            let mut want = if k.special.contains(&v) { special_stems } else { 2 };
            if root_stem.is_some_and(|s| map.vertex(s) == v) {
                want += 1;
            }
            let have = map.darts_at(v).iter().filter(|&&d| map.is_stem(d)).count();
            if have != want {
                return Err(UnicellError::StemRule(v));
            }
        }
        if let Some(s) = root_stem {
            if !map.is_stem(s) {
                return Err(UnicellError::MissingRoot);
            }
        }
        if let Some(r) = kernel_root {
            if !k.special.contains(&map.vertex(r)) || !k.is_core_dart(&map, r) {
                return Err(UnicellError::NotUnicellular);
            }
        }
        Ok(UnicellularMap { map, shape: k.shape, special: k.special, root_stem, kernel_root })
    }

    /// A member of the rooted class, with `root_stem` the stem right after the root angle.
    pub fn rooted(map: RotMap, root_stem: Dart, kernel_root: Option<Dart>) -> Result<Self, UnicellError> {
        Self::checked(map, Some(root_stem), kernel_root)
    }

    /// A member of the unrooted class, optionally with a kernel root dart.
    pub fn unrooted(map: RotMap, kernel_root: Option<Dart>) -> Result<Self, UnicellError> {
        Self::checked(map, None, kernel_root)
    }

    pub fn map(&self) -> &RotMap {
        &self.map
    }

    pub fn n(&self) -> usize {
        self.map.n_vertices()
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Special vertices: the vertices lying on all cycles.
    pub fn special_vertices(&self) -> &[usize] {
        &self.special
    }

    pub fn root_stem(&self) -> Option<Dart> {
        self.root_stem
    }

    pub fn root_angle(&self) -> Option<Corner> {
        self.root_stem.map(Corner)
    }

    pub fn kernel_root(&self) -> Option<Dart> {
        self.kernel_root
    }

    pub fn kernel(&self) -> Kernel {
        Kernel::compute(&self.map).expect("validated at construction")
    }

    /// The face walk from the root stem, or from the first corner of the
    /// kernel root's region, or from dart 0.
    pub fn face_walk(&self) -> Vec<Dart> {
        let start = match (self.root_stem, self.kernel_root) {
            (Some(s), _) => s,
            (None, Some(r)) => self.region_start(r),
            (None, None) => 0,
        };
        let mut w = Vec::with_capacity(self.map.n_darts());
        let mut d = start;
        loop {
            w.push(d);
            d = self.map.phi(d);
            if d == start {
                break;
            }
        }
        w
    }

    /// First dart after the last core edge arriving at the vertex of `r`.
    fn region_start(&self, r: Dart) -> Dart {
        let k = self.kernel();
        let mut cur = r;
        loop {
            let p = self.map.opp(self.map.cw(cur));
            if k.is_core_dart(&self.map, p) {
                return cur;
            }
            cur = p;
        }
    }

    /// Stems outgoing; an edge points along the side walked second from the root angle.
    pub fn canonical_orientation(&self) -> Result<Vec<bool>, UnicellError> {
        if self.root_stem.is_none() {
            return Err(UnicellError::MissingRoot);
        }
        let walk = self.face_walk();
        let mut pos = vec![0usize; self.map.n_darts()];
        for (i, &d) in walk.iter().enumerate() {
            pos[d] = i;
        }
        Ok((0..self.map.n_darts())
            .map(|d| match self.map.twin(d) {
                None => true,
                Some(e) => pos[d] > pos[e],
            })
            .collect())
    }

    /// The 2 (square) or 3 (hexagonal) cycles as closed dart walks.
    pub fn cycles(&self) -> Vec<Vec<Dart>> {
        let k = self.kernel();
        let m = &self.map;
        match self.shape {
            Shape::Square => k.chains.clone(),
            Shape::Hexagonal => {
                let x = match self.kernel_root {
                    Some(r) => m.vertex(r),
                    None => k.special[0],
                };
                let c: Vec<Vec<Dart>> = k
                    .chains
                    .iter()
                    .map(|ch| if m.vertex(ch[0]) == x { ch.clone() } else { reverse_walk(m, ch) })
                    .collect();
                let join = |a: &Vec<Dart>, b: &Vec<Dart>| {
                    let mut w = a.clone();
                    w.extend(reverse_walk(m, b));
                    w
                };
                vec![join(&c[0], &c[1]), join(&c[1], &c[2]), join(&c[0], &c[2])]
            }
        }
    }

    pub fn gamma(&self, cycle: &[Dart], mode: GammaMode) -> Result<i64, UnicellError> {
        match mode {
            GammaMode::StemsOnly => gamma_of_walk(&self.map, cycle, |d| self.map.is_stem(d)),
            GammaMode::EdgesAndStems => {
                let out = self.canonical_orientation()?;
                gamma_of_walk(&self.map, cycle, |d| out[d])
            }
        }
    }

    /// Rooted maps use the canonical orientation; unrooted ones count stems only.
    pub fn is_balanced(&self) -> bool {
        let mode = if self.root_stem.is_some() { GammaMode::EdgesAndStems } else { GammaMode::StemsOnly };
        self.cycles().iter().all(|c| self.gamma(c, mode) == Ok(0))
    }

    pub fn is_safe(&self) -> Result<bool, UnicellError> {
        if self.root_stem.is_none() {
            return Err(UnicellError::MissingRoot);
        }
        let (_, residual) = stack_pass(&self.map, &self.face_walk());
        Ok(residual.len() == 3 && residual.iter().all(|i| matches!(i, Item::Edge { .. })))
    }

    /// Removes the root stem.
    pub fn strip_root(&self) -> Result<UnicellularMap, UnicellError> {
        let s = self.root_stem.ok_or(UnicellError::MissingRoot)?;
        let m = &self.map;
        let relabel = |d: Dart| if d > s { d - 1 } else { d };
        let mut twin = Vec::with_capacity(m.n_darts() - 1);
        let mut next = Vec::with_capacity(m.n_darts() - 1);
        for d in 0..m.n_darts() {
            if d == s {
                continue;
            }
            twin.push(m.twin(d).map(relabel));
            let nx = if m.ccw(d) == s { m.ccw(s) } else { m.ccw(d) };
            next.push(relabel(nx));
        }
        let map = RotMap::from_tables(twin, next)?;
        Self::checked(map, None, self.kernel_root.map(relabel))
    }

    /// The four darts in front of which a root stem may be inserted, in walk order.
    pub fn root_slots(&self) -> Result<[Dart; 4], UnicellError> {
        if self.root_stem.is_some() {
            return Err(UnicellError::InvalidSlot(0));
        }
        let walk = self.face_walk();
        let l = walk.len();
        let mut v = 0i64;
        let mut best = (0i64, 0usize);
        for (i, &d) in walk.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
            v += if self.map.is_stem(d) { 1 } else { -1 };
        }
        let start = best.1;
        let rotated: Vec<Dart> = (0..l).map(|i| walk[(start + i) % l]).collect();
        let (_, residual) = stack_pass(&self.map, &rotated);
        if residual.len() != 4 || residual.iter().any(|i| matches!(i, Item::Stem { .. })) {
            return Err(UnicellError::ClosureFailure);
        }
        let mut slots: Vec<(usize, Dart)> =
            residual.iter().map(|it| ((it.pos() + start) % l, rotated[it.pos()])).collect();
        slots.sort();
        Ok([slots[0].1, slots[1].1, slots[2].1, slots[3].1])
    }

    /// Inserts the root stem right before the chosen slot dart.
    pub fn add_root(&self, slot: usize) -> Result<UnicellularMap, UnicellError> {
        if slot >= 4 {
            return Err(UnicellError::InvalidSlot(slot));
        }
        let d = self.root_slots()?[slot];
        let mut b = crate::rotmap::MapBuilder::from_map(&self.map);
        let s = b.insert_cw_of(d);
        Self::checked(b.finish(), Some(s), self.kernel_root)
    }

    /// Which slot of the stripped map the root stem occupies.
    pub fn root_slot(&self) -> Result<usize, UnicellError> {
        let s = self.root_stem.ok_or(UnicellError::MissingRoot)?;
        let u = self.strip_root()?;
        let after = self.map.ccw(s);
        let after = if after > s { after - 1 } else { after };
        u.root_slots()?.iter().position(|&d| d == after).ok_or(UnicellError::InvalidSlot(4))
    }

    pub fn to_json(&self) -> UnicellJson {
        let orientation = self.canonical_orientation().ok().map(|o| {
            (0..self.map.n_darts())
                .filter(|&d| self.map.twin(d).is_some_and(|t| d < t))
                .map(|d| if o[d] { "fwd".to_string() } else { "rev".to_string() })
                .collect()
        });
        UnicellJson {
            map: self.map.to_json(self.root_stem.or(self.kernel_root)),
            root_angle: self.root_stem,
            root_stem: self.root_stem,
            kernel_root: self.kernel_root,
            shape: self.shape,
            orientation,
        }
    }

    pub fn from_json(j: &UnicellJson) -> Result<Self, UnicellError> {
        let map = RotMap::from_json(&j.map)?;
        Self::checked(map, j.root_stem, j.kernel_root)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct UnicellJson {
    #[serde(flatten)]
    pub map: MapJson,
    pub root_angle: Option<Dart>,
    pub root_stem: Option<Dart>,
    pub kernel_root: Option<Dart>,
    pub shape: Shape,
    /// One entry per edge (twin pair `d < twin(d)`), for the dart `d`.
    pub orientation: Option<Vec<String>>,
}
