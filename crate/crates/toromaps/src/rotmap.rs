//! Rotation systems with dangling stems.
//!
//! A map is a permutation `next_ccw` on darts (its orbits are vertices)
//! together with a partial involution `twin`. Darts without a twin are stems.
//! Faces are the orbits of `phi(d) = next_ccw(twin(d))`, where a stem acts as
//! its own twin, so a stem is walked around inside the face it sits in.
//! Walking along `phi` keeps the face on the right, that is clockwise around it.

use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use thiserror::Error;

pub type Dart = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("twin table is not an involution at dart {0}")]
    NonInvolutionTwin(Dart),
    #[error("next_ccw is not a permutation (dart {0})")]
    BrokenPermutation(Dart),
    #[error("declared genus {declared} but Euler count gives {computed}")]
    GenusMismatch { declared: i64, computed: i64 },
    #[error("map is not connected")]
    Disconnected,
    #[error("map does not have genus one")]
    NotGenusOne,
}

/// A corner, named by the dart that follows it counterclockwise.
///
/// `Corner(d)` sits between `cw(d)` and `d` around the vertex of `d`; the face
/// walk visits it right before leaving along `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner(pub Dart);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotMap {
    twin: Vec<Option<Dart>>,
    next: Vec<Dart>,
    prev: Vec<Dart>,
    vertex: Vec<usize>,
    vertex_rep: Vec<Dart>,
}

impl RotMap {
    /// Builds a map from raw tables, checking the involution and the permutation.
    pub fn from_tables(twin: Vec<Option<Dart>>, next: Vec<Dart>) -> Result<Self, MapError> {
        let n = twin.len();
        if next.len() != n {
            return Err(MapError::BrokenPermutation(n.min(next.len())));
        }
        for (d, t) in twin.iter().enumerate() {
            if let Some(t) = *t {
                if t >= n || t == d || twin[t] != Some(d) {
                    return Err(MapError::NonInvolutionTwin(d));
                }
            }
        }
        let mut prev = vec![usize::MAX; n];
        for (d, &e) in next.iter().enumerate() {
            if e >= n || prev[e] != usize::MAX {
                return Err(MapError::BrokenPermutation(d));
            }
            prev[e] = d;
        }
        let mut vertex = vec![usize::MAX; n];
        let mut vertex_rep = Vec::new();
        for d in 0..n {
            if vertex[d] != usize::MAX {
                continue;
            }
            let v = vertex_rep.len();
            vertex_rep.push(d);
            let mut e = d;
            loop {
                vertex[e] = v;
                e = next[e];
                if e == d {
                    break;
                }
            }
        }
        Ok(RotMap { twin, next, prev, vertex, vertex_rep })
    }

    /// Builds a map from `(twin, next_ccw)` rows and checks the declared genus.
    pub fn build(table: &[(Option<Dart>, Dart)], genus: Option<i64>) -> Result<Self, MapError> {
        let twin = table.iter().map(|r| r.0).collect();
        let next = table.iter().map(|r| r.1).collect();
        let m = Self::from_tables(twin, next)?;
        if let Some(g) = genus {
            if !m.is_connected() {
                return Err(MapError::Disconnected);
            }
            let computed = m.genus();
            if computed != g {
                return Err(MapError::GenusMismatch { declared: g, computed });
            }
        }
        Ok(m)
    }

    pub fn n_darts(&self) -> usize {
        self.twin.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_rep.len()
    }

    pub fn n_stems(&self) -> usize {
        self.twin.iter().filter(|t| t.is_none()).count()
    }

    pub fn n_edges(&self) -> usize {
        (self.n_darts() - self.n_stems()) / 2
    }

    pub fn twin(&self, d: Dart) -> Option<Dart> {
        self.twin[d]
    }

    pub fn is_stem(&self, d: Dart) -> bool {
        self.twin[d].is_none()
    }

    /// The twin of an edge dart, or the dart itself for a stem.
    pub fn opp(&self, d: Dart) -> Dart {
        self.twin[d].unwrap_or(d)
    }

    pub fn ccw(&self, d: Dart) -> Dart {
        self.next[d]
    }

    pub fn cw(&self, d: Dart) -> Dart {
        self.prev[d]
    }

    pub fn phi(&self, d: Dart) -> Dart {
        self.next[self.opp(d)]
    }

    pub fn vertex(&self, d: Dart) -> usize {
        self.vertex[d]
    }

    /// Head vertex of an edge dart (its twin's vertex); a stem's own vertex.
    pub fn head(&self, d: Dart) -> usize {
        self.vertex[self.opp(d)]
    }

    pub fn vertex_rep(&self, v: usize) -> Dart {
        self.vertex_rep[v]
    }

    /// Darts around `v` in counterclockwise order.
    pub fn darts_at(&self, v: usize) -> Vec<Dart> {
        self.orbit_from(self.vertex_rep[v])
    }

    /// Darts around the vertex of `d`, starting at `d`.
    pub fn orbit_from(&self, d: Dart) -> Vec<Dart> {
        let mut out = vec![d];
        let mut e = self.next[d];
        while e != d {
            out.push(e);
            e = self.next[e];
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_at(v).len()
    }

    pub fn twin_table(&self) -> &[Option<Dart>] {
        &self.twin
    }

    pub fn next_table(&self) -> &[Dart] {
        &self.next
    }

    /// Face orbits of `phi`, each listed from its smallest dart.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        let n = self.n_darts();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for d in 0..n {
            if seen[d] {
                continue;
            }
            let mut f = Vec::new();
            let mut e = d;
            while !seen[e] {
                seen[e] = true;
                f.push(e);
                e = self.phi(e);
            }
            out.push(f);
        }
        out
    }

    /// Face index of each dart, and the number of faces.
    pub fn face_index(&self) -> (Vec<usize>, usize) {
        let faces = self.faces();
        let mut idx = vec![0; self.n_darts()];
        for (i, f) in faces.iter().enumerate() {
            for &d in f {
                idx[d] = i;
            }
        }
        (idx, faces.len())
    }

    /// Number of edge sides on a face; a stem counts twice.
    pub fn face_degree(&self, face: &[Dart]) -> usize {
        face.iter().map(|&d| if self.is_stem(d) { 2 } else { 1 }).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.n_vertices() as i64 - self.n_edges() as i64 + self.faces().len() as i64
    }

    /// Genus of a connected map.
    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n_darts() == 0 {
            return true;
        }
        let mut seen = vec![false; self.n_vertices()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for d in self.darts_at(v) {
                if let Some(t) = self.twin[d] {
                    let w = self.vertex[t];
                    if !seen[w] {
                        seen[w] = true;
                        count += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        count == self.n_vertices()
    }

    /// Undirected adjacency lists (one entry per edge dart, loops listed twice).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for d in 0..self.n_darts() {
            if let Some(t) = self.twin[d] {
                adj[self.vertex[d]].push(self.vertex[t]);
            }
        }
        adj
    }

    /// Breadth-first distances from `src` along edges; unreachable vertices get `usize::MAX`.
    pub fn bfs(&self, src: usize) -> Vec<usize> {
        bfs_adj(&self.adjacency(), src)
    }

    /// Tree-cotree homology labels. Errors unless the map is connected with genus one.
    pub fn homology_labels(&self) -> Result<HomologyLabels, MapError> {
        if !self.is_connected() {
            return Err(MapError::Disconnected);
        }
        if self.genus() != 1 {
            return Err(MapError::NotGenusOne);
        }
        let n = self.n_darts();
        let nv = self.n_vertices();
        let mut tree = vec![false; n];
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for d in self.darts_at(v) {
                if let Some(t) = self.twin[d] {
                    let w = self.vertex[t];
                    if !seen[w] {
                        seen[w] = true;
                        tree[d] = true;
                        tree[t] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let (face, nf) = self.face_index();
        // dual spanning tree over non-tree edges
        let mut dual_adj: Vec<Vec<Dart>> = vec![Vec::new(); nf];
        for d in 0..n {
            if self.twin[d].is_some() && !tree[d] {
                dual_adj[face[d]].push(d);
            }
        }
        let mut dual_tree = vec![false; n];
        let mut fseen = vec![false; nf];
        let mut order = vec![0usize];
        let mut parent_dart = vec![usize::MAX; nf];
        fseen[0] = true;
        let mut head = 0;
        while head < order.len() {
            let f = order[head];
            head += 1;
            for &d in &dual_adj[f] {
                let t = self.twin[d].unwrap();
                let g = face[t];
                if !fseen[g] {
                    fseen[g] = true;
                    dual_tree[d] = true;
                    dual_tree[t] = true;
                    parent_dart[g] = t;
                    order.push(g);
                }
            }
        }
        let mut label = vec![[0i64; 2]; n];
        let mut known = vec![true; n];
        let mut generators = Vec::new();
        for d in 0..n {
            if let Some(t) = self.twin[d] {
                if !tree[d] && !dual_tree[d] {
                    if d < t {
                        generators.push(d);
                    }
                } else if dual_tree[d] {
                    known[d] = false;
                }
            }
        }
        debug_assert_eq!(generators.len(), 2);
        for (i, &g) in generators.iter().enumerate() {
            let t = self.twin[g].unwrap();
            label[g][i] = 1;
            label[t][i] = -1;
        }
        let faces = self.faces();
        for &f in order.iter().skip(1).rev() {
            let pd = parent_dart[f];
            let mut s = [0i64; 2];
            for &d in &faces[f] {
                if d != pd && self.twin[d].is_some() {
                    debug_assert!(known[d], "face {f} has two unknown darts");
                    s[0] += label[d][0];
                    s[1] += label[d][1];
                }
            }
            let t = self.twin[pd].unwrap();
            label[pd] = [-s[0], -s[1]];
            label[t] = s;
            known[pd] = true;
            known[t] = true;
        }
        Ok(HomologyLabels { label, generators })
    }

    /// No contractible loop and no pair of homotopic parallel edges.
    pub fn is_essentially_simple(&self) -> Result<bool, MapError> {
        let h = self.homology_labels()?;
        let mut seen: HashMap<(usize, usize, [i64; 2]), ()> = HashMap::new();
        for d in 0..self.n_darts() {
            let Some(t) = self.twin[d] else { continue };
            if d > t {
                continue;
            }
            let (u, v) = (self.vertex[d], self.vertex[t]);
            let mut l = h.label[d];
            let key = if u == v {
                if l == [0, 0] {
                    return Ok(false);
                }
                if l[0] < 0 || (l[0] == 0 && l[1] < 0) {
                    l = [-l[0], -l[1]];
                }
                (u, v, l)
            } else if u < v {
                (u, v, l)
            } else {
                (v, u, h.label[t])
            };
            if seen.insert(key, ()).is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Isomorphism code of the map rooted at dart `root`.
    pub fn rooted_code(&self, root: Dart) -> Vec<u32> {
        let n = self.n_darts();
        let mut id = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        id[root] = 0;
        order.push(root);
        let mut head = 0;
        let mut code = Vec::with_capacity(2 * n);
        while head < order.len() {
            let d = order[head];
            head += 1;
            for e in [self.next[d], self.twin[d].unwrap_or(usize::MAX)] {
                if e == usize::MAX {
                    code.push(u32::MAX);
                    continue;
                }
                if id[e] == u32::MAX {
                    id[e] = order.len() as u32;
                    order.push(e);
                }
                code.push(id[e]);
            }
        }
        code
    }

    pub fn to_json(&self, root: Option<Dart>) -> MapJson {
        MapJson {
            genus: self.genus(),
            half_edges: (0..self.n_darts())
                .map(|d| HalfEdgeJson { id: d, twin: self.twin[d], next_ccw: self.next[d] })
                .collect(),
            root_half_edge: root,
        }
    }

    pub fn from_json(j: &MapJson) -> Result<Self, MapError> {
        let mut rows = vec![(None, 0); j.half_edges.len()];
        for h in &j.half_edges {
            if h.id >= rows.len() {
                return Err(MapError::BrokenPermutation(h.id));
            }
            rows[h.id] = (h.twin, h.next_ccw);
        }
        Self::build(&rows, Some(j.genus))
    }
}

/// Breadth-first distances over adjacency lists.
pub fn bfs_adj(adj: &[Vec<usize>], src: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[src] = 0;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Integer homology class of every edge dart on a torus map.
#[derive(Clone, Debug)]
pub struct HomologyLabels {
    pub label: Vec<[i64; 2]>,
    /// The two cotree generator darts, labelled `(1,0)` and `(0,1)`.
    pub generators: Vec<Dart>,
}

impl HomologyLabels {
    pub fn walk(&self, darts: &[Dart]) -> [i64; 2] {
        darts.iter().fold([0, 0], |a, &d| [a[0] + self.label[d][0], a[1] + self.label[d][1]])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HalfEdgeJson {
    pub id: usize,
    pub twin: Option<usize>,
    pub next_ccw: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapJson {
    pub genus: i64,
    pub half_edges: Vec<HalfEdgeJson>,
    pub root_half_edge: Option<usize>,
}

/// Mutable rotation tables used while a map is being assembled or closed.
#[derive(Clone, Debug, Default)]
pub struct MapBuilder {
    pub twin: Vec<Option<Dart>>,
    pub next: Vec<Dart>,
    pub prev: Vec<Dart>,
}

impl MapBuilder {
    pub fn from_map(m: &RotMap) -> Self {
        MapBuilder { twin: m.twin.clone(), next: m.next.clone(), prev: m.prev.clone() }
    }

    /// Adds a vertex whose darts, in counterclockwise order, are fresh stems.
    pub fn add_vertex(&mut self, degree: usize) -> Vec<Dart> {
        let base = self.twin.len();
        let ids: Vec<Dart> = (base..base + degree).collect();
        for i in 0..degree {
            self.twin.push(None);
            self.next.push(base + (i + 1) % degree);
            self.prev.push(base + (i + degree - 1) % degree);
        }
        ids
    }

    pub fn link(&mut self, a: Dart, b: Dart) {
        self.twin[a] = Some(b);
        self.twin[b] = Some(a);
    }

    /// Inserts a new stem just clockwise of `d` and returns it.
    pub fn insert_cw_of(&mut self, d: Dart) -> Dart {
        let h = self.twin.len();
        let p = self.prev[d];
        self.twin.push(None);
        self.next.push(d);
        self.prev.push(p);
        self.next[p] = h;
        self.prev[d] = h;
        h
    }

    pub fn finish(self) -> RotMap {
        RotMap::from_tables(self.twin, self.next).expect("builder produced an invalid map")
    }
}
