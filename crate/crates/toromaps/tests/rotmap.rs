mod common;

use toromaps::rotmap::{MapError, RotMap};
use toromaps::sampler::{AnyLaw, Mode};

fn torus_square() -> RotMap {
    RotMap::build(&[(Some(2), 1), (Some(3), 2), (Some(0), 3), (Some(1), 0)], Some(1)).unwrap()
}

/// One vertex with rotation `order`, loops given by `pairs`.
fn one_vertex(order: &[usize], pairs: &[(usize, usize)]) -> RotMap {
    let n = order.len();
    let mut twin = vec![None; n];
    for &(a, b) in pairs {
        twin[a] = Some(b);
        twin[b] = Some(a);
    }
    let mut next = vec![0; n];
    for i in 0..n {
        next[order[i]] = order[(i + 1) % n];
    }
    RotMap::from_tables(twin, next).unwrap()
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

#[test]
fn torus_square_counts() {
    let m = torus_square();
    assert_eq!((m.n_vertices(), m.n_edges(), m.faces().len(), m.genus()), (1, 2, 1, 1));
    assert_eq!(m.face_degree(&m.faces()[0]), 4);
    assert!(m.is_essentially_simple().unwrap());
}

#[test]
fn star_of_stems_is_planar() {
    let m = RotMap::build(&[(None, 1), (None, 2), (None, 0)], Some(0)).unwrap();
    assert_eq!((m.n_vertices(), m.n_edges(), m.n_stems(), m.faces().len()), (1, 0, 3, 1));
}

#[test]
fn stem_is_walked_on_both_sides() {
    // torus square with a stem inserted between the two outgoing loop ends
    let m = one_vertex(&[0, 4, 1, 2, 3], &[(0, 2), (1, 3)]);
    assert_eq!(m.faces().len(), 1);
    assert_eq!(m.face_degree(&m.faces()[0]), 6);
    assert_eq!(m.genus(), 1);
}

#[test]
fn rejects_bad_tables() {
    assert!(matches!(RotMap::build(&[(Some(1), 1), (None, 0)], None), Err(MapError::NonInvolutionTwin(_))));
    assert!(matches!(RotMap::build(&[(None, 0), (None, 0)], None), Err(MapError::BrokenPermutation(_))));
    assert!(matches!(
        RotMap::build(&[(Some(2), 1), (Some(3), 2), (Some(0), 3), (Some(1), 0)], Some(0)),
        Err(MapError::GenusMismatch { declared: 0, computed: 1 })
    ));
}

#[test]
fn contractible_loop_and_homotopic_pair_are_not_simple() {
    let mut saw_contractible = false;
    let mut saw_digon = false;
    for rest in permutations(&[1, 2, 3, 4, 5]) {
        let mut order = vec![0];
        order.extend(rest);
        let m = one_vertex(&order, &[(0, 2), (1, 3), (4, 5)]);
        if m.genus() != 1 {
            continue;
        }
        let degrees: Vec<usize> = m.faces().iter().map(|f| m.face_degree(f)).collect();
        if degrees.contains(&1) {
            saw_contractible = true;
            assert!(!m.is_essentially_simple().unwrap(), "{order:?}");
        }
        if degrees.contains(&2) {
            saw_digon = true;
            assert!(!m.is_essentially_simple().unwrap(), "{order:?}");
        }
    }
    assert!(saw_contractible && saw_digon);
}

#[test]
fn generators_are_independent_and_faces_null() {
    let m = torus_square();
    let h = m.homology_labels().unwrap();
    let g: Vec<[i64; 2]> = h.generators.iter().map(|&d| h.label[d]).collect();
    assert_eq!(g, vec![[1, 0], [0, 1]]);
    for f in m.faces() {
        assert_eq!(h.walk(&f), [0, 0]);
    }

    let law = AnyLaw::new(40, Mode::Exact);
    for r in 0..20 {
        let g = law.sample(3, r).unwrap().closed.map;
        let h = g.homology_labels().unwrap();
        assert!(common::independent(h.label[h.generators[0]], h.label[h.generators[1]]));
        for f in g.faces() {
            assert_eq!(h.walk(&f), [0, 0]);
        }
        for d in 0..g.n_darts() {
            let t = g.twin(d).unwrap();
            assert_eq!(h.label[d], [-h.label[t][0], -h.label[t][1]]);
        }
    }
}

#[test]
fn sampled_triangulations_are_simple_tori() {
    let law = AnyLaw::new(30, Mode::Exact);
    for r in 0..20 {
        let g = law.sample(11, r).unwrap().closed.map;
        assert_eq!(g.euler_characteristic(), 0);
        assert_eq!((g.n_vertices(), g.n_edges(), g.faces().len()), (30, 90, 60));
        assert!(g.faces().iter().all(|f| f.len() == 3));
        assert!(g.is_essentially_simple().unwrap());
    }
}

#[test]
fn face_orbits_match_explicit_traversal() {
    let law = AnyLaw::new(25, Mode::Exact);
    let g = law.sample(2, 0).unwrap().closed.map;
    let (idx, nf) = g.face_index();
    assert_eq!(nf, g.faces().len());
    for d in 0..g.n_darts() {
        // the corner after d at the head vertex, turning clockwise, stays in the face
        let e = g.ccw(g.twin(d).unwrap());
        assert_eq!(idx[d], idx[e]);
        assert_eq!(g.phi(d), e);
    }
}

#[test]
fn json_round_trip() {
    let law = AnyLaw::new(12, Mode::Exact);
    let rec = law.sample(4, 1).unwrap();
    for m in [rec.closed.map.clone(), rec.rooted.map().clone(), torus_square()] {
        let j = m.to_json(Some(0));
        let text = serde_json::to_string(&j).unwrap();
        let back = RotMap::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}

#[test]
fn one_vertex_triangulation_is_simple() {
    let g = toromaps::sampler::enumerate_all(1, 1000).unwrap();
    assert_eq!(g.len(), 1);
    let m = &g[0].closed.map;
    assert_eq!((m.n_vertices(), m.n_edges(), m.faces().len()), (1, 3, 2));
    assert!(m.is_essentially_simple().unwrap());
}
