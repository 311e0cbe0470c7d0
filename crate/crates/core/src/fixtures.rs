//! Small named grids and gadgets with known values.

use crate::algebra::AlgebraicNumber as An;
use crate::grid::PlanarGrid;
use crate::sigcalc::named;

fn connect(g: &mut PlanarGrid, a: usize, b: usize) {
    g.edges.push([a, b]);
}

/// =2 with a self-loop; value 2.
pub fn self_loop_eq2() -> PlanarGrid {
    let mut g = PlanarGrid::empty();
    g.add_signature("eq2", named::equality(2).entries);
    let h = g.add_vertex("eq2", 2);
    connect(&mut g, h[0], h[1]);
    g
}

/// Three ExactOne_3 on a triangle, one dangling edge each.
pub fn triangle_gadget() -> PlanarGrid {
    let mut g = PlanarGrid::empty();
    g.add_signature("eo3", named::exact_one(3).entries);
    // top, bottom-left, bottom-right; rotations [out, ccw-next, ccw-next]
    let a = g.add_vertex("eo3", 3); // [up, to B, to C]
    let b = g.add_vertex("eo3", 3); // [down-left, to C, to A]
    let c = g.add_vertex("eo3", 3); // [down-right, to A, to B]
    connect(&mut g, a[1], b[2]);
    connect(&mut g, a[2], c[1]);
    connect(&mut g, b[1], c[2]);
    g.dangling = vec![a[0], b[0], c[0]];
    g
}

/// Planar tetrahedron: a hub joined to a 4-cycle, every vertex ExactOne_4,
/// each rim vertex carrying one dangling edge.
pub fn tetrahedron_gadget() -> PlanarGrid {
    let mut g = PlanarGrid::empty();
    g.add_signature("eo4", named::exact_one(4).entries);
    // rim: west (1), north (3), south (5), east (7); hub (2)
    let w = g.add_vertex("eo4", 4); // [hub, north, out, south]
    let hub = g.add_vertex("eo4", 4); // [east, north, west, south]
    let n = g.add_vertex("eo4", 4); // [out, west, hub, east]
    let s = g.add_vertex("eo4", 4); // [east, hub, west, out]
    let e = g.add_vertex("eo4", 4); // [out, north, hub, south]
    connect(&mut g, w[0], hub[2]);
    connect(&mut g, w[1], n[1]);
    connect(&mut g, w[3], s[2]);
    connect(&mut g, hub[0], e[2]);
    connect(&mut g, hub[1], n[2]);
    connect(&mut g, hub[3], s[1]);
    connect(&mut g, n[3], e[1]);
    connect(&mut g, s[0], e[3]);
    g.dangling = vec![e[0], n[0], w[2], s[3]];
    g
}

/// Chain gadget: [1,0,a] -- =2 -- f -- =2 -- f ... with k-1 copies of f = [1,0,0,0,a].
/// Signature [1,0,...,0,a^k] of arity 2k.
pub fn chain_gadget(a: &An, k: usize) -> PlanarGrid {
    assert!(k >= 1);
    let mut g = PlanarGrid::empty();
    g.add_signature("tri", vec![An::one(), An::zero(), a.clone()]);
    g.add_signature("eq2", named::equality(2).entries);
    g.add_signature("fhat", named::gen_eq(An::one(), a.clone(), 4).entries);
    let t = g.add_vertex("tri", 2); // [west-out, east]
    let mut prev = t[1];
    let mut ups = Vec::new();
    let mut downs = Vec::new();
    for _ in 0..k - 1 {
        let sq = g.add_vertex("eq2", 2); // [east, west]
        connect(&mut g, prev, sq[1]);
        let c = g.add_vertex("fhat", 4); // [east, up, west, down]
        connect(&mut g, sq[0], c[2]);
        ups.push(c[1]);
        downs.push(c[3]);
        prev = c[0];
    }
    let mut dangling = vec![t[0]];
    dangling.extend(downs.iter().copied());
    dangling.push(prev);
    dangling.extend(ups.iter().rev().copied());
    g.dangling = dangling;
    g
}

/// Four copies of [1,0,0,0,i^r] in a row, consecutive ones joined by two
/// parallel =2 paths; two dangling edges at each end.  Signature =4.
pub fn eq4_gadget(r: u32) -> PlanarGrid {
    let mut g = PlanarGrid::empty();
    g.add_signature("fhat", named::gen_eq(An::one(), An::i_pow(r as i64), 4).entries);
    g.add_signature("eq2", named::equality(2).entries);
    // rotation of each circle: [upper-right, upper-left, lower-left, lower-right]
    let cs: Vec<Vec<usize>> = (0..4).map(|_| g.add_vertex("fhat", 4)).collect();
    for j in 0..3 {
        for (out, inn) in [(0, 1), (3, 2)] {
            let sq = g.add_vertex("eq2", 2);
            connect(&mut g, cs[j][out], sq[0]);
            connect(&mut g, sq[1], cs[j + 1][inn]);
        }
    }
    g.dangling = vec![cs[0][1], cs[0][2], cs[3][3], cs[3][0]];
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{gate_signature, holant_bruteforce, DEFAULT_CAP};
    use crate::sigcalc::SymmetricSignature;

    #[test]
    fn fixtures_are_planar() {
        for g in [self_loop_eq2(), triangle_gadget(), tetrahedron_gadget(), chain_gadget(&An::from_int(3), 4), eq4_gadget(1)] {
            assert!(g.validate().unwrap().genus_ok);
        }
    }

    #[test]
    fn wrong_dangling_order_is_rejected() {
        let mut g = tetrahedron_gadget();
        g.dangling.swap(0, 1);
        assert!(!g.validate().unwrap().genus_ok);
        assert!(gate_signature(&g, DEFAULT_CAP).is_err());
    }

    #[test]
    fn gadget_values() {
        assert_eq!(holant_bruteforce(&self_loop_eq2()).unwrap(), An::from_int(2));
        let sym = |g: &PlanarGrid| gate_signature(g, DEFAULT_CAP).unwrap().symmetric.unwrap();
        assert_eq!(sym(&triangle_gadget()), SymmetricSignature::from_ints(&[0, 1, 0, 1]));
        assert_eq!(sym(&tetrahedron_gadget()), SymmetricSignature::from_ints(&[0, 2, 0, 1, 0]));
    }
}
