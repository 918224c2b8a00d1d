mod common;

use num_bigint::BigUint;
use toromaps::decomp::*;
use toromaps::forests::Forest;
use toromaps::labels::LabelTable;
use toromaps::paths::MotzkinPath;
use toromaps::sampler::{count_rooted, enumerate_decomposed, AnyLaw, ExactLaw, Mode};
use toromaps::unicell::Shape;

#[test]
fn kernel_table_rows() {
    assert_eq!(KERNEL_TABLE[0], ((1, 0), [0, 0, 0, 1, 1, 0]));
    assert_eq!(KERNEL_TABLE[5], ((-1, -1), [0, 1, 1, 0, 0, 0]));
    assert_eq!(KERNEL_TABLE[8], ((-1, 0), [1, 1, 0, 0, 0, 0]));
    for (g, c) in KERNEL_TABLE {
        // two special stems split over the six sides
        assert_eq!(c.iter().sum::<u8>(), 2);
        assert!(g.0.abs() <= 1 && g.1.abs() <= 1);
    }
    let all = KernelSpec::all();
    assert_eq!(all.len(), 10);
    assert_eq!(all[0].shape(), Shape::Square);
    assert!(all[1..].iter().all(|s| s.shape() == Shape::Hexagonal && s.t == 3));
    assert!(all[0].accepts(&[0, 0]) && !all[0].accepts(&[1, 0]));
    assert!(all[1].accepts(&[1, 0, 0]) && !all[1].accepts(&[0, 0, 0]));
}

#[test]
fn round_trip_on_small_supports() {
    for n in 1..=4 {
        for pv in ExactLaw::support(n) {
            pv.validate(Some(n)).unwrap();
            for d in enumerate_decomposed(&pv) {
                assert_eq!(d.parameters(), pv);
                let u = assemble(&d).unwrap();
                assert_eq!(u.n(), n);
                assert!(u.is_balanced());
                assert_eq!(decompose(&u).unwrap(), d);
            }
        }
    }
}

#[test]
fn round_trip_on_random_maps() {
    for (n, seed) in [(5, 41), (20, 42), (80, 43)] {
        let law = AnyLaw::new(n, Mode::Exact);
        for r in 0..3400 {
            let rec = law.sample(seed, r).unwrap();
            let u = assemble(&rec.decomposed).unwrap();
            assert_eq!(decompose(&u).unwrap(), rec.decomposed);
            assert_eq!(rec.rooted.strip_root().unwrap(), u);
            let j = serde_json::to_string(&rec.decomposed.to_json()).unwrap();
            assert_eq!(DecomposedMap::from_json(&serde_json::from_str(&j).unwrap()).unwrap(), rec.decomposed);
        }
    }
}

#[test]
fn weighted_count_of_decompositions() {
    for n in 1..=5 {
        let mut total = 0u64;
        for pv in ExactLaw::support(n) {
            let w = if pv.k == 0 { 3 } else { 2 };
            total += w * enumerate_decomposed(&pv).len() as u64;
        }
        assert_eq!(BigUint::from(total), count_rooted(n) * 3u32, "n={n}");
    }
    for n in 1..=2 {
        assert_eq!(count_rooted(n), common::glued_triangulations(n));
    }
}

#[test]
fn parameter_identities() {
    for n in 1..=6 {
        for pv in ExactLaw::support(n) {
            if pv.k == 0 {
                for i in 0..4 {
                    assert_eq!(pv.tau[i], 2 * pv.sigma[i] + 1);
                    assert_eq!(pv.gamma[i], 0);
                }
            }
            let t = pv.t();
            let big_i: usize = (0..2 * t).map(|i| 2 * pv.rho[i] + pv.tau[i]).sum();
            let want = 2 * n + 2 + 2 * pv.sigma[..t].iter().sum::<usize>() + 2 * usize::from(pv.k != 0);
            assert_eq!(big_i, want);
        }
    }
    let mut bad = ExactLaw::support(3)[0].clone();
    bad.tau[0] += 1;
    assert!(matches!(bad.validate(None), Err(DecompError::InconsistentParameters(_))));
}

#[test]
fn minimal_type_one_map() {
    let tau = [4, 1, 1, 3, 2, 1];
    let d = DecomposedMap {
        k: 1,
        forests: tau.iter().map(|&t| Forest::decode_word(&vec![0; t], 0, t).unwrap()).collect(),
        motzkin: vec![MotzkinPath::new(vec![0, 1]).unwrap(), MotzkinPath::new(vec![0]).unwrap(), MotzkinPath::new(vec![0]).unwrap()],
    };
    let p = d.parameters();
    p.validate(Some(3)).unwrap();
    assert_eq!(p.gamma, vec![1, 0, 0, -1, 0, 0]);
    let u = assemble(&d).unwrap();
    assert_eq!((u.n(), u.shape()), (3, Shape::Hexagonal));
    assert_eq!(u.map().n_stems(), 4);
    assert!(u.is_balanced());
    assert_eq!(decompose(&u).unwrap(), d);
}

#[test]
fn shifted_labeling_tracks_vertex_labels() {
    assert_eq!(concat(&[0, 1, 2], &[5, 4, 6]), vec![0, 1, 2, 1, 3]);
    assert_eq!(shifted_distance(&[0, 2, 1, 3], 1, 3), 3);
    let law = AnyLaw::new(60, Mode::Exact);
    for r in 0..60 {
        let rec = law.sample(44, r).unwrap();
        let sl = shifted_labeling(&rec.decomposed);
        // a full tour of the face loses 4: two per edge, one back per stem
        assert_eq!((sl.s_bullet[0], *sl.s_bullet.last().unwrap()), (0, -4));
        assert_eq!(sl.kept.len(), sl.s_bullet.len());
        let u = assemble(&rec.decomposed).unwrap();
        let r_of = contour_vertices(&u);
        assert_eq!(sl.s.len(), r_of.len());
        let t = LabelTable::new(&rec.closed);
        let base = t.m[r_of[0]];
        for i in 0..r_of.len() {
            assert!((sl.s[i] - (t.m[r_of[i]] - base)).abs() <= 16);
        }
        for i in (0..r_of.len()).step_by(3) {
            let own = pseudo_distance_d0(&t, &r_of, i, i);
            assert!((-12..=0).contains(&own), "d0({i},{i}) = {own}");
            for j in i..r_of.len() {
                let diff = pseudo_distance_d0(&t, &r_of, i, j) - shifted_distance(&sl.s, i, j);
                assert!(diff.abs() <= 64);
            }
        }
    }
}
