//! The complete closure: every stem is attached to the first corner two edges
//! further along the face, turning a decorated unicellular map into a
//! triangulation with a 3-orientation.

use crate::rotmap::{Dart, MapBuilder, MapError, RotMap};
use crate::unicell::UnicellularMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosureError {
    #[error("no admissible triple left while stems remain")]
    NoAdmissibleTriple,
    #[error("stem {0} would wrap over the root angle")]
    SafetyViolation(Dart),
    #[error("input has no root stem")]
    MissingRoot,
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Item {
    /// A stem read at walk position `pos`.
    Stem { dart: Dart, pos: usize },
    /// An edge side (possibly a closed triangle) starting at walk position `pos`.
    Edge { pos: usize },
}

impl Item {
    pub(crate) fn pos(&self) -> usize {
        match *self {
            Item::Stem { pos, .. } | Item::Edge { pos } => pos,
        }
    }
}

/// One stack sweep along `walk`. Returns `(stem, corner)` attachments, where
/// corner `j` is the one right before `walk[j]` (or the final corner when
/// `j == walk.len()`), and the items left on the stack.
pub(crate) fn stack_pass(map: &RotMap, walk: &[Dart]) -> (Vec<(Dart, usize)>, Vec<Item>) {
    let mut stack: Vec<Item> = Vec::with_capacity(walk.len());
    let mut attach = Vec::new();
    for (i, &d) in walk.iter().enumerate() {
        stack.push(if map.is_stem(d) { Item::Stem { dart: d, pos: i } } else { Item::Edge { pos: i } });
        while let [.., Item::Stem { dart, pos }, Item::Edge { .. }, Item::Edge { .. }] = stack[..] {
            stack.truncate(stack.len() - 3);
            stack.push(Item::Edge { pos });
            attach.push((dart, i + 1));
        }
    }
    (attach, stack)
}

/// One step of the trace: `stem` was attached in corner `corner` of the angle sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureStep {
    pub stem: Dart,
    pub corner: usize,
}

#[derive(Clone, Debug)]
pub struct ClosureTrace {
    pub steps: Vec<ClosureStep>,
}

/// Closed triangulation with its canonical 3-orientation and corner labels.
#[derive(Clone, Debug)]
pub struct LabeledTriangulation {
    pub map: RotMap,
    /// `out[d]`: the edge of `d` is oriented away from the vertex of `d`.
    pub out: Vec<bool>,
    pub root_stem: Dart,
    pub root_vertex: usize,
    /// Index in the angle sequence of the unicellular map of the corner ending at each dart.
    pub ancestor: Vec<usize>,
    /// Label of every angle `a_0..a_l` of the unicellular map.
    pub lambda: Vec<i64>,
    /// The three walk positions bounding the last face.
    pub root_face: [Dart; 3],
    /// Angle sequence of the unicellular map (`walk[i]` leaves corner `a_i`).
    pub walk: Vec<Dart>,
}

impl LabeledTriangulation {
    /// Label of the corner of `G` that ends at dart `d`.
    pub fn corner_label(&self, d: Dart) -> i64 {
        self.lambda[self.ancestor[d]]
    }

    pub fn outdegree(&self, v: usize) -> usize {
        self.map.darts_at(v).iter().filter(|&&d| self.out[d]).count()
    }

    /// Darts of the root face, as a face orbit.
    pub fn root_face_darts(&self) -> Vec<Dart> {
        let (face, _) = self.map.face_index();
        let f = face[self.root_face[0]];
        (0..self.map.n_darts()).filter(|&d| face[d] == f).collect()
    }
}

/// Closes every stem of a rooted safe map.
pub fn complete_closure(t: &UnicellularMap) -> Result<(LabeledTriangulation, ClosureTrace), ClosureError> {
    let s0 = t.root_stem().ok_or(ClosureError::MissingRoot)?;
    let map = t.map();
    let walk = t.face_walk();
    let l = walk.len();
    let (attach, residual) = stack_pass(map, &walk);
    if let Some(Item::Stem { dart, .. }) = residual.iter().find(|i| matches!(i, Item::Stem { .. })) {
        return Err(ClosureError::SafetyViolation(*dart));
    }
    if residual.len() != 3 {
        return Err(ClosureError::NoAdmissibleTriple);
    }
    let mut lambda = Vec::with_capacity(l + 1);
    lambda.push(3i64);
    for &d in &walk {
        lambda.push(lambda.last().unwrap() + if map.is_stem(d) { 1 } else { -1 });
    }
    let mut pos = vec![0usize; map.n_darts()];
    for (i, &d) in walk.iter().enumerate() {
        pos[d] = i;
    }
    let mut out = vec![true; map.n_darts()];
    for d in 0..map.n_darts() {
        if let Some(e) = map.twin(d) {
            out[d] = pos[d] > pos[e];
        }
    }
    let mut ancestor = pos.clone();
    let mut b = MapBuilder::from_map(map);
    let mut steps = Vec::with_capacity(attach.len());
    for &(s, j) in &attach {
        let target = if j < l { walk[j] } else { s0 };
        let h = b.insert_cw_of(target);
        b.link(s, h);
        out.push(false);
        ancestor.push(j);
        steps.push(ClosureStep { stem: s, corner: j });
    }
    let g = b.finish();
    let root_face = [walk[residual[0].pos()], walk[residual[1].pos()], walk[residual[2].pos()]];
    let root_vertex = g.vertex(s0);
    Ok((
        LabeledTriangulation { map: g, out, root_stem: s0, root_vertex, ancestor, lambda, root_face, walk },
        ClosureTrace { steps },
    ))
}

/// Structured list of problems found in a closure output; empty when all checks pass.
pub fn verify_closure_output(g: &LabeledTriangulation) -> Vec<String> {
    let mut bad = Vec::new();
    let m = &g.map;
    let n = m.n_vertices();
    if m.n_stems() != 0 {
        bad.push(format!("{} stems left", m.n_stems()));
    }
    let faces = m.faces();
    if faces.len() != 2 * n {
        bad.push(format!("{} faces for {} vertices", faces.len(), n));
    }
    if m.n_edges() != 3 * n {
        bad.push(format!("{} edges for {} vertices", m.n_edges(), n));
    }
    if let Some(f) = faces.iter().find(|f| f.len() != 3) {
        bad.push(format!("face of degree {}", f.len()));
    }
    for d in 0..m.n_darts() {
        if let Some(e) = m.twin(d) {
            if g.out[d] == g.out[e] {
                bad.push(format!("edge {d}-{e} is not oriented"));
                break;
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| g.outdegree(v) != 3) {
        bad.push(format!("vertex {v} has outdegree {}", g.outdegree(v)));
    }
    match m.is_essentially_simple() {
        Ok(true) => {}
        Ok(false) => bad.push("not essentially simple".into()),
        Err(e) => bad.push(e.to_string()),
    }
    match m.homology_labels() {
        Ok(h) => {
            for (i, &gen) in h.generators.iter().enumerate() {
                let cyc = crate::labels::generator_cycle(m, &h, gen);
                let gm = crate::labels::gamma_closed(m, &g.out, &cyc);
                if gm != 0 {
                    bad.push(format!("gamma {gm} on generator cycle {i}"));
                }
            }
        }
        Err(e) => bad.push(e.to_string()),
    }
    if let Err(e) = crate::labels::check_rightmost_termination(g) {
        bad.push(e);
    }
    bad
}
