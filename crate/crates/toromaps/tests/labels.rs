use toromaps::harness::appendix_problems;
use toromaps::labels::*;
use toromaps::rotmap::bfs_adj;
use toromaps::sampler::{enumerate_all, AnyLaw, Mode, SampleRecord};
use toromaps::unicell::reverse_walk;

fn samples(n: usize, count: u64, seed: u64) -> Vec<SampleRecord> {
    let law = AnyLaw::new(n, Mode::Exact);
    (0..count).map(|r| law.sample(seed, r).unwrap()).collect()
}

#[test]
fn edge_variations_follow_their_class() {
    let mut seen = [false; 3];
    let mut check = |g: &toromaps::closure::LabeledTriangulation, u: &toromaps::rotmap::RotMap| {
        for (&d, &c) in &classify_edges(g, u) {
            assert_eq!(edge_label_variation(g, d).unwrap(), c.expected_variation(), "{c:?}");
            seen[c as usize] = true;
        }
    };
    for n in 1..=3 {
        for e in enumerate_all(n, 100_000).unwrap() {
            check(&e.closed, e.rooted.map());
        }
    }
    for rec in samples(40, 50, 31) {
        check(&rec.closed, rec.rooted.map());
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn vertex_labels_and_distances() {
    for rec in samples(60, 40, 32) {
        let g = &rec.closed;
        let t = LabelTable::new(g);
        assert_eq!(t.m[g.root_vertex], 0);
        let dist = distance_bounds(g, &t).unwrap();
        for d in 0..g.map.n_darts() {
            assert!(neighbor_label_bound(&t, &g.map, d) <= 7);
        }
        for v in 0..g.map.n_vertices() {
            assert!(t.mbar(g.root_vertex, v) <= 3);
            let own = t.mbar(v, v);
            assert!(t.m[v] <= own && own <= t.m[v] + 6);
            assert!(t.big_m[v] - t.m[v] <= 6);
            assert!(dist[v] as i64 <= t.m[v]);
        }
        let adj = g.map.adjacency();
        for u in [0, g.map.n_vertices() / 2] {
            let du = bfs_adj(&adj, u);
            for v in 0..adj.len() {
                pairwise_bound(&t, u, v, &du).unwrap();
            }
        }
    }
}

#[test]
fn range_min_matches_scan() {
    let rec = &samples(30, 1, 33)[0];
    let t = LabelTable::new(&rec.closed);
    let l = t.lambda.len();
    for i in (0..l).step_by(5) {
        for j in i..l {
            assert_eq!(t.range_min(i, j), *t.lambda[i..=j].iter().min().unwrap());
            assert_eq!(t.range_min(j, i), t.range_min(i, j));
        }
    }
}

#[test]
fn rightmost_walks_from_the_root_triangle_are_short() {
    for rec in samples(40, 40, 34) {
        let g = &rec.closed;
        let t = LabelTable::new(g);
        for &d in &g.root_face_darts() {
            if g.out[d] {
                assert!(rightmost_walk(g, d).walk.len() <= 3);
            }
        }
        for d in (0..g.map.n_darts()).filter(|&d| g.out[d]) {
            let r = check_rightmost_bounds(g, &t, d).unwrap();
            assert_eq!(g.map.head(*r.walk.last().unwrap()), g.root_vertex);
            assert!(r.path.len() <= r.walk.len());
            let verts: Vec<usize> = r.path.iter().map(|&x| g.map.head(x)).collect();
            let mut sorted = verts.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), verts.len(), "loop erasure repeats a vertex");
        }
        check_rightmost_termination(g).unwrap();
    }
}

#[test]
fn subpath_constants() {
    let turns = [Turn::LR, Turn::RR, Turn::RL, Turn::LL];
    let topos = [Topo::DiskLeft, Topo::DiskRight, Topo::NonContractible];
    let plain = [[-2, 0, -3, -5], [4, 6, 3, 1], [1, 3, 0, -2]];
    let with_h = [[-10, -8, -11, -13], [-4, -2, -5, -7], [-3, -1, -4, -6]];
    for (a, &topo) in topos.iter().enumerate() {
        for (b, &turn) in turns.iter().enumerate() {
            assert_eq!(SubpathType { turn, topo, h: false }.constant(), plain[a][b]);
            assert_eq!(SubpathType { turn, topo, h: true }.constant(), with_h[a][b]);
        }
    }
    assert_eq!(SubpathType { turn: Turn::RL, topo: Topo::DiskRight, h: true }.tag(), "RL_rh");
    assert_eq!(SubpathType { turn: Turn::LR, topo: Topo::NonContractible, h: false }.tag(), "LR_n");
}

#[test]
fn reversal_swaps_sides() {
    for rec in samples(25, 20, 35) {
        let g = &rec.closed;
        let tri = g.root_face.to_vec();
        let back = reverse_walk(&g.map, &tri);
        assert_eq!(side_faces(&g.map, &tri, Side::Left), side_faces(&g.map, &back, Side::Right));
        assert_eq!(side_faces(&g.map, &tri, Side::Right), side_faces(&g.map, &back, Side::Left));
        let s = disk_side(&g.map, &tri).unwrap();
        let flipped = if s == Side::Left { Side::Right } else { Side::Left };
        assert_eq!(disk_side(&g.map, &back), Some(flipped));
        assert_eq!(
            leaving_count(&g.map, &g.out, &tri, s),
            leaving_count(&g.map, &g.out, &back, flipped)
        );
    }
}

#[test]
fn appendix_inequalities_hold_on_samples() {
    for n in [10, 40] {
        for rec in samples(n, 15, 36) {
            let bad = appendix_problems(&rec.closed, true);
            assert!(bad.is_empty(), "n={n}: {bad:?}");
        }
    }
}
