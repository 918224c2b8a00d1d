//! The corner labeling `lambda`, the vertex labels `m` and `M`, and the
//! label/distance relations of the closed triangulation, including rightmost
//! walks and the loop-erased right-to-root paths.

use crate::closure::LabeledTriangulation;
use crate::rotmap::{bfs_adj, Dart, HomologyLabels, RotMap};
use crate::unicell::{gamma_of_walk, Kernel};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("edge {0} could not be classified")]
    UnclassifiedEdge(Dart),
    #[error("bound violated at vertex {vertex}: {what}")]
    BoundViolation { vertex: usize, what: String },
    #[error("degenerate subpath")]
    DegenerateSubpath,
}

/// Labels over the angle sequence `a_0..a_l` and the derived vertex quantities.
#[derive(Clone, Debug)]
pub struct LabelTable {
    pub lambda: Vec<i64>,
    pub corner_vertex: Vec<usize>,
    pub m: Vec<i64>,
    pub big_m: Vec<i64>,
    pub b: Vec<usize>,
    pub root_vertex: usize,
    sparse: Vec<Vec<i64>>,
}

impl LabelTable {
    pub fn new(g: &LabeledTriangulation) -> LabelTable {
        let map = &g.map;
        let l = g.walk.len();
        let mut corner_vertex: Vec<usize> = g.walk.iter().map(|&d| map.vertex(d)).collect();
        corner_vertex.push(g.root_vertex);
        let nv = map.n_vertices();
        let mut m = vec![i64::MAX; nv];
        let mut big_m = vec![i64::MIN; nv];
        let mut b = vec![usize::MAX; nv];
        for i in 0..=l {
            let v = corner_vertex[i];
            m[v] = m[v].min(g.lambda[i]);
            big_m[v] = big_m[v].max(g.lambda[i]);
            if b[v] == usize::MAX {
                b[v] = i;
            }
        }
        let mut sparse = vec![g.lambda.clone()];
        let mut w = 1;
        while 2 * w <= g.lambda.len() {
            let prev = sparse.last().unwrap();
            let row = (0..prev.len() - w).map(|i| prev[i].min(prev[i + w])).collect();
            sparse.push(row);
            w *= 2;
        }
        LabelTable { lambda: g.lambda.clone(), corner_vertex, m, big_m, b, root_vertex: g.root_vertex, sparse }
    }

    /// Minimum of `lambda` over the index range `[i, j]`.
    pub fn range_min(&self, i: usize, j: usize) -> i64 {
        let (i, j) = (i.min(j), i.max(j));
        let len = j - i + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        self.sparse[k][i].min(self.sparse[k][j + 1 - (1 << k)])
    }

    /// `mbar(u, v)`: minimum label between the first angles of `u` and `v`.
    pub fn mbar(&self, u: usize, v: usize) -> i64 {
        self.range_min(self.b[u], self.b[v])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeClass {
    Normal,
    Proper,
    RootPath,
}

impl EdgeClass {
    /// Label variations `(lambda(a_{j+1}) - lambda(a_i), lambda(a_{i+1}) - lambda(a_j))`.
    pub fn expected_variation(self) -> (i64, i64) {
        match self {
            EdgeClass::Normal => (0, -2),
            EdgeClass::Proper => (-3, 1),
            EdgeClass::RootPath => (-6, 4),
        }
    }
}

/// Class of every edge of the unicellular map, indexed by either of its darts.
///
/// Proper edges lie on cycles; root-path edges join the root vertex to the
/// nearest cycle vertex; all other edges are normal.
pub fn classify_edges(g: &LabeledTriangulation, unicell: &RotMap) -> HashMap<Dart, EdgeClass> {
    let k = Kernel::compute(unicell).expect("closure input is unicellular");
    let mut root_path = HashSet::new();
    let mut v = g.root_vertex;
    while let Some(d) = k.parent_dart[v] {
        root_path.insert(d);
        root_path.insert(unicell.twin(d).unwrap());
        v = unicell.head(d);
    }
    let mut out = HashMap::new();
    for d in 0..unicell.n_darts() {
        if unicell.is_stem(d) {
            continue;
        }
        let c = if k.is_core_dart(unicell, d) {
            EdgeClass::Proper
        } else if root_path.contains(&d) {
            EdgeClass::RootPath
        } else {
            EdgeClass::Normal
        };
        out.insert(d, c);
    }
    out
}

/// Observed label variation around the edge of `d` in the angle sequence.
pub fn edge_label_variation(g: &LabeledTriangulation, d: Dart) -> Result<(i64, i64), LabelError> {
    let e = g.map.twin(d).ok_or(LabelError::UnclassifiedEdge(d))?;
    let pos: HashMap<Dart, usize> = g.walk.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let (Some(&a), Some(&b)) = (pos.get(&d), pos.get(&e)) else {
        return Err(LabelError::UnclassifiedEdge(d));
    };
    let (i, j) = (a.min(b), a.max(b));
    let lam = &g.lambda;
    Ok((lam[j + 1] - lam[i], lam[i + 1] - lam[j]))
}

pub fn neighbor_label_bound(t: &LabelTable, map: &RotMap, d: Dart) -> i64 {
    (t.m[map.vertex(d)] - t.m[map.head(d)]).abs()
}

/// Checks `m(v)/7 <= d(v0, v) <= m(v)`, `M(v) - m(v) <= 6`, `|m(u) - m(v)| <= 7`
/// and the greedy descent. Returns the BFS distances from the root vertex.
pub fn distance_bounds(g: &LabeledTriangulation, t: &LabelTable) -> Result<Vec<usize>, LabelError> {
    let adj = g.map.adjacency();
    let v0 = g.root_vertex;
    let dist = bfs_adj(&adj, v0);
    let viol = |vertex: usize, what: String| Err(LabelError::BoundViolation { vertex, what });
    if t.m[v0] != 0 {
        return viol(v0, format!("m(v0) = {}", t.m[v0]));
    }
    for v in 0..adj.len() {
        let (d, m) = (dist[v] as i64, t.m[v]);
        if !(m <= 7 * d && d <= m) {
            return viol(v, format!("d = {d}, m = {m}"));
        }
        if v != v0 && m <= 0 {
            return viol(v, format!("m = {m}"));
        }
        if t.big_m[v] - m > 6 {
            return viol(v, format!("M - m = {}", t.big_m[v] - m));
        }
        for &w in &adj[v] {
            if (t.m[v] - t.m[w]).abs() > 7 {
                return viol(v, format!("|m(u) - m(v)| = {}", (t.m[v] - t.m[w]).abs()));
            }
        }
        let mut cur = v;
        let mut steps = 0;
        while cur != v0 {
            let Some(&nx) = adj[cur].iter().find(|&&w| t.m[w] < t.m[cur]) else {
                return viol(cur, "greedy descent is stuck".into());
            };
            cur = nx;
            steps += 1;
        }
        if steps > m {
            return viol(v, format!("greedy descent takes {steps} > m steps"));
        }
    }
    Ok(dist)
}

/// `d(u, v) <= m(u) + m(v) - 2 mbar(u, v) + 14` given BFS distances from `u`.
pub fn pairwise_bound(t: &LabelTable, u: usize, v: usize, dist_from_u: &[usize]) -> Result<(), LabelError> {
    let bound = t.m[u] + t.m[v] - 2 * t.mbar(u, v) + 14;
    if dist_from_u[v] as i64 > bound {
        return Err(LabelError::BoundViolation {
            vertex: v,
            what: format!("d({u}, {v}) = {} > {bound}", dist_from_u[v]),
        });
    }
    Ok(())
}

/// Outgoing darts (3-orientation) on the right of the closed walk minus those on the left.
pub fn gamma_closed(map: &RotMap, out: &[bool], cycle: &[Dart]) -> i64 {
    gamma_of_walk(map, cycle, |d| out[d]).expect("closed walk")
}

/// The fundamental cycle of a cotree generator dart, as a simple closed walk.
pub fn generator_cycle(map: &RotMap, h: &HomologyLabels, gen: Dart) -> Vec<Dart> {
    let nv = map.n_vertices();
    let mut parent = vec![usize::MAX; nv];
    let mut seen = vec![false; nv];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for d in map.darts_at(v) {
            if let Some(t) = map.twin(d) {
                let w = map.vertex(t);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = t;
                    queue.push_back(w);
                }
            }
        }
    }
    let path_up = |mut v: usize| {
        let mut p = Vec::new();
        while parent[v] != usize::MAX {
            p.push(parent[v]);
            v = map.head(parent[v]);
        }
        p
    };
    let a = path_up(map.head(gen));
    let b = path_up(map.vertex(gen));
    let mut common = 0;
    while common < a.len().min(b.len()) && a[a.len() - 1 - common] == b[b.len() - 1 - common] {
        common += 1;
    }
    let mut cyc = vec![gen];
    cyc.extend_from_slice(&a[..a.len() - common]);
    cyc.extend(b[..b.len() - common].iter().rev().map(|&d| map.twin(d).unwrap()));
    debug_assert_eq!(h.walk(&cyc), h.label[gen]);
    cyc
}

/// Rightmost outgoing dart after arriving along `d`.
pub fn rightmost_next(g: &LabeledTriangulation, d: Dart) -> Dart {
    let inn = g.map.twin(d).expect("edge dart");
    let mut e = g.map.ccw(inn);
    while !g.out[e] {
        e = g.map.ccw(e);
    }
    e
}

/// Rightmost walk `W_R(e)` to the first visit of the root vertex, its loop
/// erasure `P_R(e)`, and the inner vertices `h(e)` of `P_R(e)` with an
/// outgoing edge on the right.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RightmostWalk {
    pub start: Dart,
    pub walk: Vec<Dart>,
    pub path: Vec<Dart>,
    pub h: Vec<usize>,
}

pub fn rightmost_walk(g: &LabeledTriangulation, e: Dart) -> RightmostWalk {
    let map = &g.map;
    let v0 = g.root_vertex;
    let limit = 4 * map.n_darts() + 8;
    let mut walk = vec![e];
    while map.head(*walk.last().unwrap()) != v0 && walk.len() < limit {
        walk.push(rightmost_next(g, *walk.last().unwrap()));
    }
    let verts: Vec<usize> = std::iter::once(map.vertex(e)).chain(walk.iter().map(|&d| map.head(d))).collect();
    let mut last = HashMap::new();
    for (i, &v) in verts.iter().enumerate() {
        last.insert(v, i);
    }
    let mut path = Vec::new();
    let mut i = last[&verts[0]];
    while i < walk.len() {
        path.push(walk[i]);
        i = last[&verts[i + 1]];
    }
    let mut h = Vec::new();
    for w in path.windows(2) {
        let inn = map.twin(w[0]).unwrap();
        let mut d = map.ccw(inn);
        while d != w[1] {
            if g.out[d] {
                h.push(map.vertex(w[1]));
                break;
            }
            d = map.ccw(d);
        }
    }
    RightmostWalk { start: e, walk, path, h }
}

/// Checks the length bounds of the rightmost walk and of its loop erasure for one start dart.
pub fn check_rightmost_bounds(g: &LabeledTriangulation, t: &LabelTable, e: Dart) -> Result<RightmostWalk, LabelError> {
    let r = rightmost_walk(g, e);
    let u = g.map.vertex(e);
    let m = t.m[u];
    let (w, p) = (r.walk.len() as i64, r.path.len() as i64);
    let ok = m - 18 <= w && w <= m + 6 && p <= w && w <= p + 24 && r.h.len() <= 4 && m - 42 <= p && p <= m + 6;
    if !ok {
        return Err(LabelError::BoundViolation {
            vertex: u,
            what: format!("m = {m}, |W_R| = {w}, |P_R| = {p}, |h| = {}", r.h.len()),
        });
    }
    Ok(r)
}

/// All rightmost walks end on one triangle through the root vertex, with the
/// root angle on their right, and that triangle bounds a disk on its right.
pub fn check_rightmost_termination(g: &LabeledTriangulation) -> Result<Vec<Dart>, String> {
    let map = &g.map;
    let n = map.n_darts();
    let next: Vec<Dart> = (0..n).map(|d| if g.out[d] { rightmost_next(g, d) } else { usize::MAX }).collect();
    let mut state = vec![0u8; n];
    let mut cycles: Vec<Vec<Dart>> = Vec::new();
    for s in 0..n {
        if !g.out[s] || state[s] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut d = s;
        while state[d] == 0 {
            state[d] = 1;
            path.push(d);
            d = next[d];
        }
        if state[d] == 1 {
            let at = path.iter().position(|&x| x == d).unwrap();
            cycles.push(path[at..].to_vec());
        }
        for x in path {
            state[x] = 2;
        }
    }
    if cycles.len() != 1 {
        return Err(format!("rightmost walks end on {} distinct cycles", cycles.len()));
    }
    let cyc = cycles.pop().unwrap();
    if cyc.len() != 3 {
        return Err(format!("rightmost walks end on a cycle of length {}", cyc.len()));
    }
    let s0 = g.root_stem;
    let on_right = cyc.iter().enumerate().any(|(i, &d)| {
        let prev = cyc[(i + 2) % 3];
        map.vertex(d) == g.root_vertex && ccw_between(map, map.twin(prev).unwrap(), s0, d)
    });
    if !on_right {
        return Err("root angle is not on the right of the terminal triangle".into());
    }
    let h = map.homology_labels().map_err(|e| e.to_string())?;
    if h.walk(&cyc) != [0, 0] {
        return Err("terminal triangle is not contractible".into());
    }
    let right = side_faces(map, &cyc, Side::Right);
    let (face, _) = map.face_index();
    if !right.contains(&face[g.root_face[0]]) || region_chi(map, &map.faces(), &cyc, &right) != 1 {
        return Err("terminal triangle does not bound a disk on its right".into());
    }
    Ok(cyc)
}

/// Whether `x` lies in the half-open counterclockwise range `(from, to]` around one vertex.
fn ccw_between(map: &RotMap, from: Dart, x: Dart, to: Dart) -> bool {
    let mut d = map.ccw(from);
    loop {
        if d == x {
            return true;
        }
        if d == to {
            return false;
        }
        d = map.ccw(d);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Faces on one side of a simple closed walk, found by flooding across non-cycle edges.
pub fn side_faces(map: &RotMap, cycle: &[Dart], side: Side) -> HashSet<usize> {
    let (face, _) = map.face_index();
    let on_cycle: HashSet<Dart> = cycle.iter().flat_map(|&d| [d, map.twin(d).unwrap()]).collect();
    let faces = map.faces();
    let seed = match side {
        Side::Right => face[cycle[0]],
        Side::Left => face[map.twin(cycle[0]).unwrap()],
    };
    let mut seen = HashSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(f) = queue.pop_front() {
        for &d in &faces[f] {
            if on_cycle.contains(&d) {
                continue;
            }
            let g = face[map.twin(d).unwrap()];
            if seen.insert(g) {
                queue.push_back(g);
            }
        }
    }
    seen
}

/// Euler characteristic of the region made of `faces` minus its boundary cycle.
fn region_chi(map: &RotMap, faces: &[Vec<Dart>], cycle: &[Dart], region: &HashSet<usize>) -> i64 {
    let on_cycle_v: HashSet<usize> = cycle.iter().map(|&d| map.vertex(d)).collect();
    let on_cycle_e: HashSet<Dart> = cycle.iter().flat_map(|&d| [d, map.twin(d).unwrap()]).collect();
    let mut verts = HashSet::new();
    let mut edges = HashSet::new();
    for &f in region {
        for &d in &faces[f] {
            let v = map.vertex(d);
            if !on_cycle_v.contains(&v) {
                verts.insert(v);
            }
            if !on_cycle_e.contains(&d) {
                let t = map.twin(d).unwrap();
                edges.insert(d.min(t));
            }
        }
    }
    verts.len() as i64 - edges.len() as i64 + region.len() as i64
}

/// The side of a contractible simple cycle that is a disk, if any.
pub fn disk_side(map: &RotMap, cycle: &[Dart]) -> Option<Side> {
    let (face, _) = map.face_index();
    disk_side_with(map, &face, &map.faces(), cycle)
}

/// Floods both sides in lockstep and inspects the first one to close up.
pub(crate) fn disk_side_with(map: &RotMap, face: &[usize], faces: &[Vec<Dart>], cycle: &[Dart]) -> Option<Side> {
    let on_cycle: HashSet<Dart> = cycle.iter().flat_map(|&d| [d, map.twin(d).unwrap()]).collect();
    let seeds = [face[cycle[0]], face[map.twin(cycle[0]).unwrap()]];
    if seeds[0] == seeds[1] {
        return None;
    }
    let mut seen = [HashSet::from([seeds[0]]), HashSet::from([seeds[1]])];
    let mut queue = [VecDeque::from([seeds[0]]), VecDeque::from([seeds[1]])];
    let done = loop {
        let mut finished = None;
        for k in 0..2 {
            let Some(f) = queue[k].pop_front() else {
                finished = Some(k);
                break;
            };
            for &d in &faces[f] {
                if on_cycle.contains(&d) {
                    continue;
                }
                let g = face[map.twin(d).unwrap()];
                if seen[1 - k].contains(&g) {
                    return None;
                }
                if seen[k].insert(g) {
                    queue[k].push_back(g);
                }
            }
        }
        if let Some(k) = finished {
            break k;
        }
    };
    let sides = [Side::Right, Side::Left];
    if region_chi(map, faces, cycle, &seen[done]) == 1 {
        return Some(sides[done]);
    }
    let k = 1 - done;
    while let Some(f) = queue[k].pop_front() {
        for &d in &faces[f] {
            if on_cycle.contains(&d) {
                continue;
            }
            let g = face[map.twin(d).unwrap()];
            if seen[k].insert(g) {
                queue[k].push_back(g);
            }
        }
    }
    (region_chi(map, faces, cycle, &seen[k]) == 1).then_some(sides[k])
}

/// Outgoing darts at the cycle's vertices pointing into the given side.
pub fn leaving_count(map: &RotMap, out: &[bool], cycle: &[Dart], side: Side) -> usize {
    let k = cycle.len();
    let mut y = 0;
    for i in 0..k {
        let inn = map.twin(cycle[(i + k - 1) % k]).unwrap();
        let o = cycle[i];
        let mut right = true;
        let mut d = map.ccw(inn);
        while d != inn {
            if d == o {
                right = false;
            } else if out[d] && right == (side == Side::Right) {
                y += 1;
            }
            d = map.ccw(d);
        }
    }
    y
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Turn {
    LR,
    RR,
    RL,
    LL,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Topo {
    /// Contractible, disk on the left of the subpath.
    DiskLeft,
    /// Contractible, disk on the right of the subpath.
    DiskRight,
    NonContractible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubpathType {
    pub turn: Turn,
    pub topo: Topo,
    pub h: bool,
}

impl SubpathType {
    /// Constant `c` in `p >= j - i + c`.
    pub fn constant(&self) -> i64 {
        let col = match self.topo {
            Topo::DiskLeft => 0,
            Topo::DiskRight => 1,
            Topo::NonContractible => 2,
        };
        let row = match self.turn {
            Turn::LR => 0,
            Turn::RR => 1,
            Turn::RL => 2,
            Turn::LL => 3,
        };
        const PLAIN: [[i64; 4]; 3] = [[-2, 0, -3, -5], [4, 6, 3, 1], [1, 3, 0, -2]];
        const WITH_H: [[i64; 4]; 3] = [[-10, -8, -11, -13], [-4, -2, -5, -7], [-3, -1, -4, -6]];
        if self.h {
            WITH_H[col][row]
        } else {
            PLAIN[col][row]
        }
    }

    pub fn tag(&self) -> String {
        let t = match self.turn {
            Turn::LR => "LR",
            Turn::RR => "RR",
            Turn::RL => "RL",
            Turn::LL => "LL",
        };
        let s = match self.topo {
            Topo::DiskLeft => "l",
            Topo::DiskRight => "r",
            Topo::NonContractible => "n",
        };
        format!("{t}_{s}{}", if self.h { "h" } else { "" })
    }
}

/// A subpath of a shortest path meeting `P_R` only at its ends, with its type.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassifiedSubpath {
    pub i: usize,
    pub j: usize,
    pub len: usize,
    pub kind: SubpathType,
    /// Outgoing darts into the disk, for contractible ones.
    pub leaving: Option<usize>,
    pub cycle_len: usize,
}

/// Classifies the subpath `s` (darts) running from `P_R` vertex index `i` to index `j > i`.
pub fn classify_subpath_type(
    g: &LabeledTriangulation,
    hl: &HomologyLabels,
    (face, faces): (&[usize], &[Vec<Dart>]),
    r: &RightmostWalk,
    s: &[Dart],
    i: usize,
    j: usize,
) -> Result<ClassifiedSubpath, LabelError> {
    let map = &g.map;
    let p = &r.path;
    if s.is_empty() || j <= i || j > p.len() {
        return Err(LabelError::DegenerateSubpath);
    }
    let k = p.len();
    let leaves_right = i > 0 && ccw_strict(map, map.twin(p[i - 1]).unwrap(), s[0], p[i]);
    let enters_right = j < k && ccw_strict(map, map.twin(p[j - 1]).unwrap(), map.twin(*s.last().unwrap()).unwrap(), p[j]);
    let turn = match (leaves_right, enters_right) {
        (false, true) => Turn::LR,
        (true, true) => Turn::RR,
        (true, false) => Turn::RL,
        (false, false) => Turn::LL,
    };
    let mut cycle = s.to_vec();
    cycle.extend(p[i..j].iter().rev().map(|&d| map.twin(d).unwrap()));
    let (topo, leaving) = if hl.walk(&cycle) != [0, 0] {
        (Topo::NonContractible, None)
    } else {
        match disk_side_with(map, face, faces, &cycle) {
            Some(Side::Left) => (Topo::DiskLeft, Some(leaving_count(map, &g.out, &cycle, Side::Left))),
            Some(Side::Right) => (Topo::DiskRight, Some(leaving_count(map, &g.out, &cycle, Side::Right))),
            None => return Err(LabelError::DegenerateSubpath),
        }
    };
    let hv: HashSet<usize> = r.h.iter().copied().collect();
    let h = p[i..j].iter().any(|&d| hv.contains(&map.vertex(d))) || hv.contains(&map.head(p[j - 1]));
    Ok(ClassifiedSubpath { i, j, len: s.len(), kind: SubpathType { turn, topo, h }, leaving, cycle_len: cycle.len() })
}

/// Whether `x` lies strictly between `from` and `to` counterclockwise.
fn ccw_strict(map: &RotMap, from: Dart, x: Dart, to: Dart) -> bool {
    x != to && ccw_between(map, from, x, to)
}

/// Per-map data shared by all appendix reports.
pub struct AppendixContext<'a> {
    g: &'a LabeledTriangulation,
    dist: Vec<usize>,
    order: Vec<usize>,
    hl: HomologyLabels,
    face: Vec<usize>,
    faces: Vec<Vec<Dart>>,
}

impl<'a> AppendixContext<'a> {
    pub fn new(g: &'a LabeledTriangulation) -> Result<Self, LabelError> {
        let dist = bfs_adj(&g.map.adjacency(), g.root_vertex);
        let mut order: Vec<usize> = (0..g.map.n_vertices()).collect();
        order.sort_by_key(|&v| dist[v]);
        let hl = g.map.homology_labels().map_err(|_| LabelError::DegenerateSubpath)?;
        let (face, _) = g.map.face_index();
        Ok(AppendixContext { g, dist, order, hl, face, faces: g.map.faces() })
    }

    /// Shortest path from `u` to the root vertex sharing as many edges with `path` as possible.
    pub fn shortest_path_along(&self, u: usize, path: &[Dart]) -> Vec<Dart> {
        let g = self.g;
        let map = &g.map;
        let dist = &self.dist;
        let on_p: HashSet<Dart> = path.iter().flat_map(|&d| [d, map.twin(d).unwrap()]).collect();
        let nv = map.n_vertices();
        let mut best = vec![i64::MIN; nv];
        let mut choice = vec![usize::MAX; nv];
        best[g.root_vertex] = 0;
        for &v in &self.order {
            if v == g.root_vertex || dist[v] > dist[u] {
                continue;
            }
            for d in map.darts_at(v) {
                let w = map.head(d);
                if dist[w] + 1 == dist[v] && best[w] != i64::MIN {
                    let val = best[w] + i64::from(on_p.contains(&d));
                    if val > best[v] {
                        best[v] = val;
                        choice[v] = d;
                    }
                }
            }
        }
        let mut q = Vec::new();
        let mut v = u;
        while v != g.root_vertex {
            q.push(choice[v]);
            v = map.head(choice[v]);
        }
        q
    }

    /// Splits the shortest path into pieces between consecutive `P_R` vertices and classifies them.
    pub fn report(&self, r: &RightmostWalk) -> Result<AppendixReport, LabelError> {
        let g = self.g;
        let map = &g.map;
        let u = map.vertex(r.start);
        let q = self.shortest_path_along(u, &r.path);
        let mut index: HashMap<usize, usize> = HashMap::new();
        if let Some(&d0) = r.path.first() {
            index.insert(map.vertex(d0), 0);
        }
        for (i, &d) in r.path.iter().enumerate() {
            index.insert(map.head(d), i + 1);
        }
        let p_edges: HashSet<Dart> = r.path.iter().flat_map(|&d| [d, map.twin(d).unwrap()]).collect();
        let mut subpaths = Vec::new();
        let mut start: Option<(usize, usize)> = index.get(&u).map(|&i| (0, i));
        for (qi, &d) in q.iter().enumerate() {
            let w = map.head(d);
            if let Some(&j) = index.get(&w) {
                if let Some((qs, i)) = start {
                    let piece = &q[qs..=qi];
                    let along_p = piece.len() == 1 && p_edges.contains(&piece[0]);
                    if !along_p && j > i {
                        subpaths.push(classify_subpath_type(g, &self.hl, (&self.face, &self.faces), r, piece, i, j)?);
                    }
                }
                start = Some((qi + 1, j));
            }
        }
        Ok(AppendixReport { q_len: q.len(), p_len: r.path.len(), subpaths })
    }
}

/// Summary of the subpath decomposition of the shortest path from the start of `r`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AppendixReport {
    pub q_len: usize,
    pub p_len: usize,
    pub subpaths: Vec<ClassifiedSubpath>,
}

impl AppendixReport {
    pub fn count(&self, turn: Turn, topo: Topo) -> usize {
        self.subpaths.iter().filter(|s| s.kind.turn == turn && s.kind.topo == topo).count()
    }

    /// Violations of `p >= j - i + c`, `y = t - 3`, `n_LL_l <= 2` and the lower bound on `|Q|`.
    pub fn violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for s in &self.subpaths {
            if (s.len as i64) < (s.j - s.i) as i64 + s.kind.constant() {
                bad.push(format!("{}: p = {} < {} + {}", s.kind.tag(), s.len, s.j - s.i, s.kind.constant()));
            }
            if let Some(y) = s.leaving {
                if y + 3 != s.cycle_len {
                    bad.push(format!("{}: y = {y} on a cycle of length {}", s.kind.tag(), s.cycle_len));
                }
            }
        }
        let ll = self.count(Turn::LL, Topo::DiskLeft);
        if ll > 2 {
            bad.push(format!("n_LL_l = {ll}"));
        }
        let lower = self.p_len as i64
            - 2 * self.count(Turn::LR, Topo::DiskLeft) as i64
            - 3 * self.count(Turn::RL, Topo::DiskLeft) as i64
            - 922;
        if (self.q_len as i64) < lower {
            bad.push(format!("|Q| = {} < {lower}", self.q_len));
        }
        bad
    }
}

/// One-off report; build an [`AppendixContext`] to reuse it across start darts.
pub fn appendix_report(g: &LabeledTriangulation, r: &RightmostWalk) -> Result<AppendixReport, LabelError> {
    AppendixContext::new(g)?.report(r)
}
