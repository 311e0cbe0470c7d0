mod common;

use common::*;
use holant_core::algebra::AlgebraicNumber as An;
use holant_core::gen;
use holant_core::grid::*;
use holant_core::sigcalc::Transform2x2;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;

/// Split `total` into parts in 1..=4.
fn parts<R: Rng>(r: &mut R, mut total: usize) -> Vec<usize> {
    let mut out = vec![];
    while total > 0 {
        let k = r.gen_range(1..=total.min(4));
        out.push(k);
        total -= k;
    }
    out
}

fn bipartite<R: Rng>(r: &mut R, max_edges: usize) -> PlanarGrid {
    let n = r.gen_range(1..=4);
    let left = degrees(r, n, 1, 4, max_edges);
    let right = parts(r, left.iter().sum());
    gen::bipartite_book_grid(r, &left, &right, |r, _, k| gen::signature(r, k, 2))
}

fn invertible<R: Rng>(r: &mut R) -> Transform2x2 {
    loop {
        let t = Transform2x2::new(gen::element(r, 2), gen::element(r, 2), gen::element(r, 2), gen::element(r, 2));
        if t.is_invertible() {
            return t;
        }
    }
}

/// Renames every half-edge through a random permutation.
fn relabel<R: Rng>(r: &mut R, g: &PlanarGrid) -> PlanarGrid {
    let ids: Vec<usize> = g.vertices.iter().flat_map(|v| v.rotation.iter().copied()).collect();
    let mut fresh: Vec<usize> = (0..ids.len()).map(|i| 3 * i + 7).collect();
    fresh.shuffle(r);
    let m: HashMap<usize, usize> = ids.into_iter().zip(fresh).collect();
    let mut out = g.clone();
    for v in &mut out.vertices {
        v.rotation = v.rotation.iter().map(|h| m[h]).collect();
    }
    out.edges = g.edges.iter().map(|[a, b]| [m[a], m[b]]).collect();
    out.dangling = g.dangling.iter().map(|h| m[h]).collect();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn holant_theorem_on_bipartite_grids(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = bipartite(&mut r, 12);
        let t = invertible(&mut r);
        let h = holographic_transform_bipartite(&g, &t).unwrap();
        prop_assert_eq!(brute(&h), brute(&g));
    }

    #[test]
    fn orthogonal_transform_on_general_grids(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let g = random_grid(&mut r, n, 1, 4, 12, |r, k| gen::signature(r, k, 2));
        // (1/sqrt2)[[1,1],[1,-1]] with sqrt2 = w + w^7
        let s = (&An::zeta() + &An::zeta_pow(7)).inv().unwrap();
        let hadamard = Transform2x2::from_ints(1, 1, 1, -1).scale(&s);
        for t in [gen::rational_orthogonal(&mut r), hadamard] {
            prop_assert!(t.is_orthogonal());
            prop_assert_eq!(brute(&orthogonal_transform(&g, &t).unwrap()), brute(&g));
        }
    }

    #[test]
    fn two_stretch_keeps_value(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let g = random_grid(&mut r, n, 1, 4, 6, |r, k| gen::signature(r, k, 2));
        let s = two_stretch(&g);
        prop_assert_eq!(s.edges.len(), 2 * g.edges.len());
        prop_assert!(s.validate().unwrap().genus_ok);
        prop_assert_eq!(brute(&s), brute(&g));
        // the stretched grid is bipartite, so any invertible transform applies
        let t = invertible(&mut r);
        prop_assert_eq!(brute(&holographic_transform_bipartite(&s, &t).unwrap()), brute(&g));
    }

    #[test]
    fn value_ignores_half_edge_names_and_rotation_start(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=6);
        let g = random_grid(&mut r, n, 1, 5, 14, |r, k| gen::signature(r, k, 3));
        let want = brute(&g);
        let h = relabel(&mut r, &g);
        prop_assert!(h.validate().unwrap().genus_ok);
        prop_assert_eq!(brute(&h), want.clone());
        let mut rot = g.clone();
        for v in &mut rot.vertices {
            let k = r.gen_range(0..v.rotation.len().max(1));
            v.rotation.rotate_left(k);
        }
        prop_assert!(rot.validate().unwrap().genus_ok);
        prop_assert_eq!(brute(&rot), want);
    }
}

#[test]
fn transforms_check_their_preconditions() {
    let mut r = rng(3);
    let g = random_grid(&mut r, 3, 2, 3, 8, |r, k| gen::signature(r, k, 2));
    assert_eq!(holographic_transform_bipartite(&g, &Transform2x2::from_ints(1, 1, 0, 1)), Err(GridError::NotBipartite));
    assert!(orthogonal_transform(&g, &Transform2x2::from_ints(1, 1, 0, 1)).is_err());
    let b = bipartite(&mut r, 8);
    assert!(holographic_transform_bipartite(&b, &Transform2x2::from_ints(1, 2, 2, 4)).is_err());
}

#[test]
fn gate_of_relabelled_gadget_is_unchanged() {
    let mut r = rng(4);
    for g in [holant_core::fixtures::triangle_gadget(), holant_core::fixtures::tetrahedron_gadget()] {
        let want = gate_signature(&g, DEFAULT_CAP).unwrap();
        for _ in 0..5 {
            assert_eq!(gate_signature(&relabel(&mut r, &g), DEFAULT_CAP).unwrap(), want);
        }
    }
}
