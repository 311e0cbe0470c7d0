#![allow(dead_code)]

use holant_core::algebra::AlgebraicNumber as An;
use holant_core::gen;
use holant_core::grid::{holant_bruteforce_capped, PlanarGrid, Side};
use holant_core::sigcalc::{named, transform, SymmetricSignature as S, Transform2x2};
use holant_core::solvers::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, HashMap};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn int(n: i64) -> An {
    An::from_int(n)
}

pub fn brute(g: &PlanarGrid) -> An {
    holant_bruteforce_capped(g, 40).unwrap()
}

/// Degrees in lo..=hi with an even sum at most `max_sum`.
pub fn degrees<R: Rng>(r: &mut R, n: usize, lo: usize, hi: usize, max_sum: usize) -> Vec<usize> {
    loop {
        let d: Vec<usize> = (0..n).map(|_| r.gen_range(lo..=hi)).collect();
        let s: usize = d.iter().sum();
        if s % 2 == 0 && s <= max_sum && s > 0 {
            return d;
        }
    }
}

pub fn small_nonzero<R: Rng>(r: &mut R) -> An {
    let v = r.gen_range(1..=3);
    int(if r.gen_bool(0.3) { -v } else { v })
}

// ---------------------------------------------------------------- matchings

/// Straight-line embedding: rotations sorted by angle.
pub fn geometric(points: &[(f64, f64)], edges: &[(usize, usize)]) -> WeightedPlanarGraph {
    let mut rot: BTreeMap<usize, Vec<(f64, usize)>> = (0..points.len()).map(|v| (v, vec![])).collect();
    for (j, &(a, b)) in edges.iter().enumerate() {
        for (h, u, w) in [(2 * j, a, b), (2 * j + 1, b, a)] {
            let ang = (points[w].1 - points[u].1).atan2(points[w].0 - points[u].0);
            rot.get_mut(&u).unwrap().push((ang, h));
        }
    }
    WeightedPlanarGraph {
        vertices: (0..points.len()).collect(),
        edges: edges.iter().map(|&(a, b)| WeightedEdge { ends: [a, b], weight: An::one() }).collect(),
        rotation: rot
            .into_iter()
            .map(|(v, mut r)| {
                r.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                (v, r.into_iter().map(|x| x.1).collect())
            })
            .collect(),
    }
}

/// Weighted perfect-matching sum by direct recursion.
pub fn pm_oracle(g: &WeightedPlanarGraph) -> An {
    fn go(g: &WeightedPlanarGraph, used: &mut HashMap<usize, bool>) -> An {
        let Some(&v) = g.vertices.iter().find(|v| !used[v]) else { return An::one() };
        used.insert(v, true);
        let mut total = An::zero();
        for e in &g.edges {
            let w = if e.ends[0] == v { e.ends[1] } else if e.ends[1] == v { e.ends[0] } else { continue };
            if w == v || used[&w] {
                continue;
            }
            used.insert(w, true);
            total = &total + &(&e.weight * &go(g, used));
            used.insert(w, false);
        }
        used.insert(v, false);
        total
    }
    go(g, &mut g.vertices.iter().map(|&v| (v, false)).collect())
}

pub fn random_weighted_graph(r: &mut ChaCha8Rng) -> WeightedPlanarGraph {
    let n = 2 * r.gen_range(1..=5);
    let d = degrees(r, n, 1, 4, 36);
    let g = gen::book_grid(r, &d, |_, _, k| named::exact_one(k));
    let mut w = WeightedPlanarGraph::from_grid_structure(&g).unwrap();
    for e in w.edges.iter_mut() {
        e.weight = gen::nonzero(r, 2);
    }
    w
}

pub fn random_grid<R: Rng>(r: &mut R, n: usize, lo: usize, hi: usize, max_edges: usize, mut sig: impl FnMut(&mut R, usize) -> S) -> PlanarGrid {
    let d = degrees(r, n, lo, hi, 2 * max_edges);
    gen::book_grid(r, &d, |r, _, k| sig(r, k))
}

/// Z [h0, h1, 0, ..., 0], reversed for the minus family.
pub fn r2_member<R: Rng>(r: &mut R, n: usize, plus: bool) -> S {
    let mut h = vec![An::zero(); n + 1];
    h[0] = gen::element(r, 2);
    h[1.min(n)] = gen::nonzero(r, 2);
    if !plus {
        h.reverse();
    }
    transform(&Transform2x2::z(), &S::new(h))
}

pub fn geneq(a: i64, b: i64) -> EoSig {
    EoSig::GenEq { a: int(a), b: int(b) }
}

pub fn eo(w: i64) -> EoSig {
    EoSig::ExactOne { weight: int(w) }
}

/// Cuts the right-hand stubs into consecutive blocks holding exactly one
/// `true` each; a block may be split off as a single pinned stub instead.
/// Returns (length, pinned) per block.
pub fn cut_blocks<R: Rng>(r: &mut R, values: &[bool], pin_prob: f64) -> Vec<(usize, bool)> {
    let ones: Vec<usize> = (0..values.len()).filter(|&i| values[i]).collect();
    assert!(!ones.is_empty());
    let mut cuts = vec![0];
    for w in ones.windows(2) {
        cuts.push(r.gen_range(w[0] + 1..=w[1]));
    }
    cuts.push(values.len());
    let mut out = vec![];
    for w in cuts.windows(2) {
        let (mut a, b) = (w[0], w[1]);
        // peel zero-valued stubs off the front as pins
        while b - a > 1 && !values[a] && r.gen_bool(pin_prob) {
            out.push((1, true));
            a += 1;
        }
        out.push((b - a, b - a == 1 && r.gen_bool(pin_prob)));
    }
    out
}

/// Bipartite instance with a planted satisfying assignment: random bits on
/// the equalities, ExactOne nodes cut so that each sees a single one.
pub fn planted_eo_instance<R: Rng>(r: &mut R, eq_arities: &[usize], pins: bool) -> EoInstance {
    let l: usize = eq_arities.iter().sum();
    let (matching, up) = gen::bipartite_pages(r, l, l);
    let mut sigma: Vec<bool> = eq_arities.iter().map(|_| r.gen_bool(0.5)).collect();
    if sigma.iter().all(|&s| s) {
        sigma[0] = false;
    }
    let mut owner = vec![];
    for (i, &k) in eq_arities.iter().enumerate() {
        owner.extend(std::iter::repeat(i).take(k));
    }
    // value seen at each right stub: the complement of its equality's bit
    let mut values = vec![false; l];
    for &(a, b) in &matching {
        values[b - l] = !sigma[owner[a]];
    }
    let blocks = cut_blocks(r, &values, if pins { 0.15 } else { 0.0 });
    let mut degrees: Vec<usize> = eq_arities.to_vec();
    let mut sigs: Vec<EoSig> = eq_arities.iter().map(|_| EoSig::GenEq { a: small_nonzero(r), b: small_nonzero(r) }).collect();
    let mut pos = 0;
    for &(len, pinned) in &blocks {
        degrees.push(len);
        sigs.push(if pinned {
            if values[pos] { geneq(0, 1) } else { geneq(1, 0) }
        } else {
            EoSig::ExactOne { weight: small_nonzero(r) }
        });
        pos += len;
    }
    let g = gen::two_page_grid(r, &degrees, matching, &up, |_, _, k| named::equality(k));
    EoInstance {
        nodes: g.vertices.iter().map(|v| EoNode { sig: sigs[v.id].clone(), ports: v.rotation.clone() }).collect(),
        links: g.edges.clone(),
        scalar: An::one(),
    }
}

/// Equalities of the given arities plus ExactOne nodes (and a few pins),
/// linked through a random two-page embedding.
pub fn random_eo_instance<R: Rng>(r: &mut R, eq_arities: &[usize], max_links: usize, planted: bool) -> EoInstance {
    if planted {
        return planted_eo_instance(r, eq_arities, true);
    }
    let bipartite = false;
    let eq_total: usize = eq_arities.iter().sum();
    let mut kinds: Vec<(EoSig, usize)> = eq_arities.iter().map(|&k| (EoSig::GenEq { a: small_nonzero(r), b: small_nonzero(r) }, k)).collect();
    let budget = 2 * max_links - eq_total;
    let target = if bipartite { eq_total } else { r.gen_range(eq_total.min(budget) / 2..=budget.min(eq_total + 6)) };
    let mut used = 0;
    let mut right = vec![];
    while used < target {
        let d = r.gen_range(1..=4).min(target - used);
        let sig = if d == 1 && r.gen_bool(0.3) {
            if r.gen_bool(0.5) { geneq(1, 0) } else { geneq(0, 1) }
        } else {
            EoSig::ExactOne { weight: small_nonzero(r) }
        };
        right.push((sig, d));
        used += d;
    }
    if !bipartite && (eq_total + used) % 2 == 1 {
        right.push((EoSig::ExactOne { weight: small_nonzero(r) }, 1));
    }
    let g = if bipartite {
        let l: Vec<usize> = kinds.iter().map(|k| k.1).collect();
        let rr: Vec<usize> = right.iter().map(|k| k.1).collect();
        gen::bipartite_book_grid(r, &l, &rr, |_, _, k| named::equality(k))
    } else {
        kinds.shuffle(r);
        kinds.extend(right.iter().cloned());
        kinds.shuffle(r);
        let d: Vec<usize> = kinds.iter().map(|k| k.1).collect();
        gen::book_grid(r, &d, |_, _, k| named::equality(k))
    };
    let sigs: Vec<EoSig> = if bipartite { kinds.into_iter().chain(right).map(|k| k.0).collect() } else { kinds.into_iter().map(|k| k.0).collect() };
    EoInstance {
        nodes: g.vertices.iter().map(|v| EoNode { sig: sigs[v.id].clone(), ports: v.rotation.clone() }).collect(),
        links: g.edges.clone(),
        scalar: An::one(),
    }
}

pub const ARITY_SETS: &[&[usize]] = &[&[5], &[10], &[15], &[5, 5], &[5, 10], &[5, 5, 5], &[10, 5], &[5]];

/// Satisfying assignments as half-edge -> value maps (links <= 16).
pub fn supports(inst: &EoInstance) -> Vec<HashMap<usize, bool>> {
    let mut out = vec![];
    let m = inst.links.len();
    for mask in 0u32..1 << m {
        let mut val = HashMap::new();
        for (i, &[a, b]) in inst.links.iter().enumerate() {
            let x = (mask >> i) & 1 == 1;
            val.insert(a, x);
            val.insert(b, !x);
        }
        let ok = inst.nodes.iter().all(|n| {
            let ones = n.ports.iter().filter(|p| val[p]).count();
            match &n.sig {
                EoSig::GenEq { a, b } => (ones == 0 && !a.is_zero()) || (ones == n.ports.len() && !b.is_zero()),
                EoSig::ExactOne { .. } => ones == 1,
            }
        });
        if ok {
            out.push(val);
        }
    }
    out
}

pub fn z_grid<R: Rng>(r: &mut R, plus: bool) -> PlanarGrid {
    // f = Z f-hat (f-hat reversed for the minus family) over a planted instance
    let ar = ARITY_SETS[r.gen_range(0..ARITY_SETS.len())];
    let inst = planted_eo_instance(r, ar, false);
    let mut g = PlanarGrid::empty();
    for (i, n) in inst.nodes.iter().enumerate() {
        let k = n.ports.len();
        let mut h = match &n.sig {
            EoSig::GenEq { a, b } => named::gen_eq(a.clone(), b.clone(), k),
            EoSig::ExactOne { weight } => named::exact_one(k).scale(weight),
        };
        if !plus {
            h = h.reversed();
        }
        let name = format!("s{i}");
        g.add_signature(&name, transform(&Transform2x2::z(), &h).entries);
        g.vertices.push(holant_core::grid::Vertex { id: i, sig: name, rotation: n.ports.clone() });
    }
    g.edges = inst.links.clone();
    g
}

/// Hypergraph from a bipartite grid whose L side are hyperedges.
pub fn hypergraph_from(g: &PlanarGrid) -> PlanarHypergraph {
    let nl = g.vertices.iter().filter(|v| g.side[&v.id] == Side::L).count();
    let owner: HashMap<usize, usize> = g.vertices.iter().flat_map(|v| v.rotation.iter().map(move |&h| (h, v.id))).collect();
    let twin: HashMap<usize, usize> = g.edges.iter().flat_map(|&[a, b]| [(a, b), (b, a)]).collect();
    let mut map = HashMap::new();
    let mut hyperedges = vec![];
    let mut j = 0;
    for v in &g.vertices[..nl] {
        let mut members = vec![];
        for &h in &v.rotation {
            let t = twin[&h];
            members.push(owner[&t] - nl);
            map.insert(h, 2 * j);
            map.insert(t, 2 * j + 1);
            j += 1;
        }
        hyperedges.push(Hyperedge { id: v.id, members });
    }
    let mut rotation = BTreeMap::new();
    for v in &g.vertices {
        let key = if v.id < nl { format!("e{}", v.id) } else { format!("v{}", v.id - nl) };
        rotation.insert(key, v.rotation.iter().map(|h| map[h]).collect());
    }
    PlanarHypergraph { vertices: (0..g.vertices.len() - nl).collect(), hyperedges, rotation }
}

pub fn exact_covers(h: &PlanarHypergraph) -> u64 {
    fn go(h: &PlanarHypergraph, covered: &mut Vec<bool>) -> u64 {
        let Some(v) = covered.iter().position(|c| !c) else { return 1 };
        let mut total = 0;
        for e in &h.hyperedges {
            let mut m = e.members.clone();
            m.sort_unstable();
            m.dedup();
            if m.len() != e.members.len() || !m.contains(&v) || m.iter().any(|&u| covered[u]) {
                continue;
            }
            for &u in &m {
                covered[u] = true;
            }
            total += go(h, covered);
            for &u in &m {
                covered[u] = false;
            }
        }
        total
    }
    go(h, &mut vec![false; h.vertices.len()])
}

/// Hypergraph with a planted perfect matching.
pub fn random_hypergraph<R: Rng>(r: &mut R, sizes: &[usize]) -> PlanarHypergraph {
    let total: usize = sizes.iter().sum();
    let (matching, up) = gen::bipartite_pages(r, total, total);
    let mut chosen: Vec<bool> = sizes.iter().map(|_| r.gen_bool(0.5)).collect();
    if !chosen.iter().any(|&c| c) {
        chosen[0] = true;
    }
    let mut owner = vec![];
    for (i, &k) in sizes.iter().enumerate() {
        owner.extend(std::iter::repeat(i).take(k));
    }
    let mut values = vec![false; total];
    for &(a, b) in &matching {
        values[b - total] = chosen[owner[a]];
    }
    let mut degrees = sizes.to_vec();
    degrees.extend(cut_blocks(r, &values, 0.0).into_iter().map(|b| b.0));
    let mut g = gen::two_page_grid(r, &degrees, matching, &up, |_, _, k| named::equality(k));
    for v in 0..degrees.len() {
        g.side.insert(v, if v < sizes.len() { Side::L } else { Side::R });
    }
    hypergraph_from(&g)
}

/// Value and support of an instance whose links all join an equality to an
/// ExactOne node, by enumerating one bit per equality of arity at least two.
/// Unary equalities are summed out at their ExactOne neighbour; a support
/// entry is omitted where the port takes both values within one assignment.
pub fn eq_bits_oracle(inst: &EoInstance) -> (An, Vec<HashMap<usize, bool>>) {
    let twin: HashMap<usize, usize> = inst.links.iter().flat_map(|&[a, b]| [(a, b), (b, a)]).collect();
    let owner: HashMap<usize, usize> = inst.nodes.iter().enumerate().flat_map(|(i, n)| n.ports.iter().map(move |&p| (p, i))).collect();
    let unary = |i: usize| match &inst.nodes[i].sig {
        EoSig::GenEq { a, b } if inst.nodes[i].ports.len() == 1 => Some((a.clone(), b.clone())),
        _ => None,
    };
    let eqs: Vec<usize> =
        (0..inst.nodes.len()).filter(|&i| matches!(inst.nodes[i].sig, EoSig::GenEq { .. }) && unary(i).is_none()).collect();
    let slot: HashMap<usize, usize> = eqs.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut total = An::zero();
    let mut support = vec![];
    for mask in 0u64..1 << eqs.len() {
        let bit = |i: usize| (mask >> slot[&i]) & 1 == 1;
        let mut w = inst.scalar.clone();
        let mut val = HashMap::new();
        for (i, n) in inst.nodes.iter().enumerate() {
            match &n.sig {
                EoSig::GenEq { a, b } => {
                    if slot.contains_key(&i) {
                        w = &w * if bit(i) { b } else { a };
                        for &p in &n.ports {
                            val.insert(p, bit(i));
                        }
                    }
                }
                EoSig::ExactOne { weight } => {
                    let (pend, fixed): (Vec<usize>, Vec<usize>) =
                        n.ports.iter().partition(|p| unary(owner[&twin[p]]).is_some());
                    let ones: Vec<usize> = fixed.iter().copied().filter(|p| !bit(owner[&twin[p]])).collect();
                    let uw: Vec<(An, An)> = pend.iter().map(|p| unary(owner[&twin[p]]).unwrap()).collect();
                    // a unary feeds a one into the port when its own input is 0
                    let all_zero = uw.iter().fold(An::one(), |acc, (_, b)| &acc * b);
                    let local = match ones.len() {
                        1 => all_zero,
                        0 => (0..pend.len()).fold(An::zero(), |acc, j| {
                            let rest = uw.iter().enumerate().filter(|&(k, _)| k != j).fold(An::one(), |x, (_, (_, b))| &x * b);
                            &acc + &(&uw[j].0 * &rest)
                        }),
                        _ => An::zero(),
                    };
                    w = &(&w * weight) * &local;
                    if w.is_zero() {
                        break;
                    }
                    for &p in &fixed {
                        val.insert(p, ones.first() == Some(&p));
                    }
                    if ones.len() == 1 || pend.len() == 1 {
                        for &p in &pend {
                            let one = ones.is_empty();
                            val.insert(p, one);
                            val.insert(twin[&p], !one);
                        }
                    }
                }
            }
            if w.is_zero() {
                break;
            }
        }
        if !w.is_zero() {
            total = &total + &w;
            support.push(val);
        }
    }
    (total, support)
}

/// Incidence instance of an oriented closed surface: `eq_side` nodes are
/// equalities, the others ExactOne.  `faces` lists vertices counterclockwise.
pub fn incidence_instance<R: Rng>(r: &mut R, nv: usize, faces: &[Vec<usize>], eq_on_vertices: bool, weighted: bool) -> EoInstance {
    let mut directed = std::collections::HashSet::new();
    for f in faces {
        for k in 0..f.len() {
            assert!(directed.insert((f[k], f[(k + 1) % f.len()])), "faces are not consistently oriented");
        }
    }
    // corner (face, position) gets link half-edges 2c (face side) and 2c+1 (vertex side)
    let mut corner = HashMap::new();
    let mut c = 0;
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            corner.insert((fi, k), c);
            c += 1;
        }
    }
    // around v: face g follows face f when g's next vertex is f's previous one
    let mut at: Vec<Vec<(usize, usize, usize, usize)>> = vec![vec![]; nv]; // (face, pos, prev, next)
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            at[f[k]].push((fi, k, f[(k + f.len() - 1) % f.len()], f[(k + 1) % f.len()]));
        }
    }
    let w = |r: &mut R| if weighted { small_nonzero(r) } else { An::one() };
    let mut nodes = vec![];
    for v in 0..nv {
        let list = &at[v];
        let mut rot = vec![];
        let mut cur = 0;
        for _ in 0..list.len() {
            let (fi, k, prev, _) = list[cur];
            rot.push(2 * corner[&(fi, k)] + 1);
            cur = list.iter().position(|x| x.3 == prev).expect("closed surface");
        }
        assert_eq!(cur, 0);
        let sig = if eq_on_vertices { EoSig::GenEq { a: w(r), b: w(r) } } else { EoSig::ExactOne { weight: w(r) } };
        nodes.push(EoNode { sig, ports: rot });
    }
    for (fi, f) in faces.iter().enumerate() {
        let rot: Vec<usize> = (0..f.len()).map(|k| 2 * corner[&(fi, k)]).collect();
        let sig = if eq_on_vertices { EoSig::ExactOne { weight: w(r) } } else { EoSig::GenEq { a: w(r), b: w(r) } };
        nodes.push(EoNode { sig, ports: rot });
    }
    EoInstance { nodes, links: (0..c).map(|c| [2 * c, 2 * c + 1]).collect(), scalar: An::one() }
}

/// Icosahedron: north pole, two rings of five, south pole.
pub fn icosahedron_faces() -> Vec<Vec<usize>> {
    let (u, l) = (|i: usize| 1 + i % 5, |i: usize| 6 + i % 5);
    let mut f = vec![];
    for i in 0..5 {
        f.push(vec![0, u(i), u(i + 1)]);
        f.push(vec![u(i), l(i), u(i + 1)]);
        f.push(vec![u(i + 1), l(i), l(i + 1)]);
        f.push(vec![11, l(i + 1), l(i)]);
    }
    f
}

/// Dodecahedron as the dual of the icosahedron: one vertex per icosahedron face.
pub fn dodecahedron_faces() -> Vec<Vec<usize>> {
    let ico = icosahedron_faces();
    let mut out = vec![];
    for v in 0..12 {
        // faces around v, in order: next face shares the edge (v, prev)
        let around: Vec<(usize, usize, usize)> = ico
            .iter()
            .enumerate()
            .filter_map(|(fi, f)| f.iter().position(|&x| x == v).map(|k| (fi, f[(k + 2) % 3], f[(k + 1) % 3])))
            .collect();
        let mut cyc = vec![];
        let mut cur = 0;
        for _ in 0..around.len() {
            cyc.push(around[cur].0);
            cur = around.iter().position(|x| x.2 == around[cur].1).unwrap();
        }
        cyc.reverse();
        out.push(cyc);
    }
    out
}

/// Plants a configuration: a random set of equalities no two of which meet a
/// common ExactOne node, plus a pendant unary on every ExactOne node they miss.
pub fn add_planted_pendants<R: Rng>(r: &mut R, inst: &mut EoInstance) {
    let twin: HashMap<usize, usize> = inst.links.iter().flat_map(|&[a, b]| [(a, b), (b, a)]).collect();
    let owner: HashMap<usize, usize> = inst.nodes.iter().enumerate().flat_map(|(i, n)| n.ports.iter().map(move |&p| (p, i))).collect();
    let nbrs = |i: usize| -> Vec<usize> { inst.nodes[i].ports.iter().map(|p| owner[&twin[p]]).collect() };
    let mut eqs: Vec<usize> = (0..inst.nodes.len()).filter(|&i| matches!(inst.nodes[i].sig, EoSig::GenEq { .. })).collect();
    eqs.shuffle(r);
    let mut hit = vec![false; inst.nodes.len()];
    for e in eqs {
        let ns = nbrs(e);
        if ns.iter().all(|&x| !hit[x]) {
            ns.iter().for_each(|&x| hit[x] = true);
        }
    }
    let mut next = inst.links.iter().flatten().max().map_or(0, |m| m + 1);
    let pendants: Vec<usize> =
        (0..inst.nodes.len()).filter(|&i| matches!(inst.nodes[i].sig, EoSig::ExactOne { .. }) && !hit[i]).collect();
    for i in pendants {
        inst.nodes[i].ports.push(next);
        inst.nodes.push(EoNode { sig: EoSig::GenEq { a: small_nonzero(r), b: small_nonzero(r) }, ports: vec![next + 1] });
        inst.links.push([next, next + 1]);
        next += 2;
    }
}

pub fn pin_histogram(h: &mut BTreeMap<String, usize>, rep: &EoReport) {
    for p in &rep.pins {
        *h.entry(format!("{:?}", p.rule)).or_default() += 1;
    }
}
