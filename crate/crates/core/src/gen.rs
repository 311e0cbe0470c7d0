//! Random generators for tests: field elements, class members, small planar grids.

use crate::algebra::AlgebraicNumber as An;
use crate::classify::TractableClass;
use crate::grid::PlanarGrid;
use crate::sigcalc::{named, transform, SymmetricSignature, Transform2x2};
use rand::Rng;

/// Nonzero element with small integer coefficients.
pub fn nonzero<R: Rng>(rng: &mut R, bound: i64) -> An {
    loop {
        let x = element(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn element<R: Rng>(rng: &mut R, bound: i64) -> An {
    let c: [i64; 4] = std::array::from_fn(|_| rng.gen_range(-bound..=bound));
    An::from_coeffs_i64(c)
}

pub fn small_int<R: Rng>(rng: &mut R, bound: i64) -> An {
    An::from_int(rng.gen_range(-bound..=bound))
}

pub fn signature<R: Rng>(rng: &mut R, n: usize, bound: i64) -> SymmetricSignature {
    SymmetricSignature::new((0..=n).map(|_| element(rng, bound)).collect())
}

/// Rational orthogonal matrix from c = (1-t^2)/(1+t^2), s = 2t/(1+t^2); a rotation
/// or a reflection.
pub fn rational_orthogonal<R: Rng>(rng: &mut R) -> Transform2x2 {
    let p = rng.gen_range(-6i64..=6);
    let q = rng.gen_range(1i64..=6);
    let den = q * q + p * p;
    let c = An::from_ratio(q * q - p * p, den);
    let s = An::from_ratio(2 * p * q, den);
    if rng.gen_bool(0.5) {
        Transform2x2::new(c.clone(), -&s, s, c)
    } else {
        Transform2x2::new(c.clone(), s.clone(), s, -&c)
    }
}

fn pow_sum(u: [An; 2], x: An, v: [An; 2], y: An, n: usize) -> SymmetricSignature {
    named::degenerate(&u, n).scale(&x).add(&named::degenerate(&v, n).scale(&y))
}

fn scaled<R: Rng>(rng: &mut R, f: SymmetricSignature) -> SymmetricSignature {
    f.scale(&nonzero(rng, 3))
}

fn rotated<R: Rng>(rng: &mut R, f: SymmetricSignature) -> SymmetricSignature {
    let h = rational_orthogonal(rng);
    scaled(rng, transform(&h, &f))
}

/// A random member of the class, of arity n (n >= 3 for the transformable families).
pub fn member<R: Rng>(rng: &mut R, class: TractableClass, n: usize) -> SymmetricSignature {
    use TractableClass::*;
    let one = An::one;
    let r = rng.gen_range(0..4i64);
    let ir = An::i_pow(r);
    let alpha = An::zeta();
    match class {
        P => match rng.gen_range(0..3) {
            0 => named::gen_eq(nonzero(rng, 3), nonzero(rng, 3), n),
            1 => named::degenerate(&[element(rng, 3), nonzero(rng, 3)], n),
            _ if n == 2 => SymmetricSignature::new(vec![An::zero(), nonzero(rng, 3), An::zero()]),
            _ => named::gen_eq(An::zero(), nonzero(rng, 3), n),
        },
        A => {
            let canon = match rng.gen_range(0..4) {
                0 => named::gen_eq(one(), ir, n),
                1 => pow_sum([one(), one()], one(), [one(), -one()], ir, n),
                2 => pow_sum([one(), An::i()], one(), [one(), -An::i()], ir, n),
                _ => named::degenerate(&[one(), ir], n),
            };
            scaled(rng, canon)
        }
        Adagger => transform(&Transform2x2::diag(one(), alpha), &member(rng, A, n)),
        Matchgate => {
            let a = nonzero(rng, 3);
            let q = nonzero(rng, 2);
            let parity = rng.gen_range(0..2usize);
            let mut e = vec![An::zero(); n + 1];
            let mut cur = a;
            for k in (parity..=n).step_by(2) {
                e[k] = cur.clone();
                cur = &cur * &q;
            }
            SymmetricSignature::new(e)
        }
        Mhat => transform(&Transform2x2::h(), &member(rng, Matchgate, n)),
        MhatDagger => transform(&Transform2x2::z(), &member(rng, Matchgate, n)),
        Vplus | Vminus => {
            let rd = rng.gen_range(0..n.div_ceil(2));
            let mut h = vec![An::zero(); n + 1];
            for x in h.iter_mut().take(rd + 1) {
                *x = element(rng, 3);
            }
            h[rd] = nonzero(rng, 3);
            if class == Vminus {
                h.reverse();
            }
            transform(&Transform2x2::z(), &SymmetricSignature::new(h))
        }
        P1 => {
            let h = rational_orthogonal(rng);
            let canon = pow_sum([one(), one()], one(), [one(), -one()], nonzero(rng, 4), n);
            scaled(rng, transform(&h, &canon))
        }
        P2 => transform(&Transform2x2::z(), &named::gen_eq(nonzero(rng, 3), nonzero(rng, 3), n)),
        A1 => {
            let t = rng.gen_range(0..2i64);
            let beta = An::zeta_pow(t * n as i64 + 2 * r);
            let canon = pow_sum([one(), one()], one(), [one(), -one()], beta, n);
            rotated(rng, canon)
        }
        A3 => {
            let canon = pow_sum([one(), alpha.clone()], one(), [one(), -&alpha], ir, n);
            rotated(rng, canon)
        }
        M1 => {
            let sign = if rng.gen_bool(0.5) { one() } else { -one() };
            let canon = pow_sum([one(), one()], one(), [one(), -one()], &sign * &An::i_pow(n as i64), n);
            rotated(rng, canon)
        }
        M2 => {
            let gamma = loop {
                let g = nonzero(rng, 2);
                let g2 = &g * &g;
                if !(&g2 + &one()).is_zero() && !(&g2 - &one()).is_zero() {
                    break g;
                }
            };
            let sign = if rng.gen_bool(0.5) { one() } else { -one() };
            let canon = pow_sum([one(), gamma.clone()], one(), [one(), -&gamma], sign, n);
            rotated(rng, canon)
        }
        M3 => rotated(rng, named::exact_one(n)),
        M4plus => scaled(rng, transform(&Transform2x2::z(), &named::exact_one(n))),
        M4minus => scaled(rng, transform(&Transform2x2::z(), &named::all_but_one(n))),
        ZP => transform(&Transform2x2::z(), &member(rng, P, n)),
    }
}

/// Random connected planar closed grid: a cycle of `n` vertices with chords
/// nested inside, and self-loops.  Every vertex gets a symmetric signature
/// drawn by `sig` for its degree.
pub fn planar_grid<R: Rng>(
    rng: &mut R,
    n: usize,
    extra: usize,
    mut sig: impl FnMut(&mut R, usize) -> SymmetricSignature,
) -> PlanarGrid {
    // Outerplanar construction: a cycle plus non-crossing chords drawn inside,
    // tracked by the angular position of each edge end at its vertex.
    let n = n.max(1);
    let mut ends: Vec<Vec<(u64, usize)>> = vec![Vec::new(); n]; // (angle key, edge id, end)
    let mut edges: Vec<(usize, usize)> = Vec::new();
    if n == 1 {
        edges.push((0, 0));
    } else if n == 2 {
        edges.push((0, 1));
        edges.push((0, 1));
    } else {
        for v in 0..n {
            edges.push((v, (v + 1) % n));
        }
    }
    // non-crossing chords on the polygon
    let mut chords: Vec<(usize, usize)> = Vec::new();
    if n >= 4 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            let (a, b) = (a.min(b), a.max(b));
            if b < a + 2 || (a == 0 && b == n - 1) {
                continue;
            }
            let crosses = chords.iter().any(|&(c, d)| (a < c && c < b && b < d) || (c < a && a < d && d < b));
            if !crosses && !chords.contains(&(a, b)) {
                chords.push((a, b));
            }
        }
    }
    let mut g = PlanarGrid::empty();
    // Angle of a chord end at vertex a going to b, measured inside the polygon:
    // sweeping from the edge to a+1 to the edge to a-1 the targets appear in
    // increasing cyclic distance.
    let key = |from: usize, to: usize| ((to + n - from) % n) as u64;
    let mut all: Vec<(usize, usize)> = edges.clone();
    all.extend(chords.iter().copied());
    let mut loops = vec![0usize; n];
    if n >= 3 {
        for l in loops.iter_mut() {
            if rng.gen_bool(0.15) {
                *l = 1;
            }
        }
    }
    for (id, &(a, b)) in all.iter().enumerate() {
        if n >= 3 {
            ends[a].push((key(a, b), id));
            ends[b].push((key(b, a), id));
        } else {
            ends[a].push((2 * id as u64, id));
            ends[b].push((2 * id as u64 + 1, id));
        }
    }
    let mut half: Vec<Vec<usize>> = vec![Vec::new(); all.len()];
    for v in 0..n {
        // counterclockwise: edge to v+1 (key 1), then chords by increasing key, then edge to v-1
        let mut e = ends[v].clone();
        if n >= 3 {
            e.sort_by_key(|&(k, _)| k);
        }
        let deg = e.len() + 2 * loops[v];
        let name = format!("s{v}");
        g.add_signature(&name, sig(rng, deg).entries);
        let hs = g.add_vertex(&name, deg);
        for (slot, &(_, id)) in e.iter().enumerate() {
            half[id].push(hs[slot]);
        }
        if loops[v] == 1 {
            // loop occupies two consecutive slots in the outer angle
            g.edges.push([hs[deg - 2], hs[deg - 1]]);
        }
    }
    for h in half {
        g.edges.push([h[0], h[1]]);
    }
    g
}

/// Random non-crossing perfect matching of 0..m (m even), as pairs.
fn dyck_matching<R: Rng>(rng: &mut R, m: usize) -> Vec<(usize, usize)> {
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for i in 0..m {
        let left = m - i;
        let must_close = stack.len() == left;
        let can_close = !stack.is_empty();
        if must_close || (can_close && rng.gen_bool(0.5)) {
            out.push((stack.pop().unwrap(), i));
        } else {
            stack.push(i);
        }
    }
    out
}

/// Grid from a two-page layout: vertex v owns the next `degrees[v]` stubs of
/// the spine, and a stub's half-edge id is its spine position.
pub fn two_page_grid<R: Rng>(
    rng: &mut R,
    degrees: &[usize],
    matching: Vec<(usize, usize)>,
    up: &[bool],
    mut sig: impl FnMut(&mut R, usize, usize) -> SymmetricSignature,
) -> PlanarGrid {
    let mut g = PlanarGrid::empty();
    let mut pos = 0;
    for (v, &d) in degrees.iter().enumerate() {
        let stubs: Vec<usize> = (pos..pos + d).collect();
        pos += d;
        let mut rot: Vec<usize> = stubs.iter().rev().copied().filter(|&s| up[s]).collect();
        rot.extend(stubs.iter().copied().filter(|&s| !up[s]));
        let name = format!("s{v}");
        g.add_signature(&name, sig(rng, v, d).entries);
        g.vertices.push(crate::grid::Vertex { id: v, sig: name, rotation: rot });
    }
    g.edges = matching.into_iter().map(|(a, b)| [a, b]).collect();
    g
}

/// Random planar grid with the given vertex degrees (their sum must be even),
/// from a two-page book embedding; `sig` gets (vertex, degree).
pub fn book_grid<R: Rng>(
    rng: &mut R,
    degrees: &[usize],
    sig: impl FnMut(&mut R, usize, usize) -> SymmetricSignature,
) -> PlanarGrid {
    let total: usize = degrees.iter().sum();
    assert!(total % 2 == 0, "degree sum must be even");
    let mut up: Vec<bool> = (0..total).map(|_| rng.gen_bool(0.5)).collect();
    if up.iter().filter(|&&b| b).count() % 2 == 1 {
        up[0] = !up[0];
    }
    let mut matching = Vec::new();
    for page in [true, false] {
        let idx: Vec<usize> = (0..total).filter(|&s| up[s] == page).collect();
        matching.extend(dyck_matching(rng, idx.len()).into_iter().map(|(a, b)| (idx[a], idx[b])));
    }
    two_page_grid(rng, degrees, matching, &up, sig)
}

/// Two-page layout of `l` left stubs followed by `r` right stubs in which
/// every arc joins a left stub to a right stub: (arcs, stub is on the upper page).
pub fn bipartite_pages<R: Rng>(rng: &mut R, l: usize, r: usize) -> (Vec<(usize, usize)>, Vec<bool>) {
    assert_eq!(l, r, "sides need equal degree sums");
    // every arc crosses the middle, so each page is a nested family around it
    let mut up = vec![false; l + r];
    let k = rng.gen_range(0..=l);
    let mut lu: Vec<usize> = (0..l).collect();
    let mut ru: Vec<usize> = (l..l + r).collect();
    use rand::seq::SliceRandom;
    lu.shuffle(rng);
    ru.shuffle(rng);
    for &s in lu[..k].iter().chain(&ru[..k]) {
        up[s] = true;
    }
    let mut matching = Vec::new();
    for page in [true, false] {
        let ls: Vec<usize> = (0..l).filter(|&s| up[s] == page).collect();
        let rs: Vec<usize> = (l..l + r).filter(|&s| up[s] == page).collect();
        for (a, b) in ls.iter().rev().zip(&rs) {
            matching.push((*a, *b));
        }
    }
    (matching, up)
}

/// Random planar bipartite grid: vertices 0..left.len() are side L with the
/// given degrees, the rest side R.  Degree sums of the sides must agree.
pub fn bipartite_book_grid<R: Rng>(
    rng: &mut R,
    left: &[usize],
    right: &[usize],
    sig: impl FnMut(&mut R, usize, usize) -> SymmetricSignature,
) -> PlanarGrid {
    let (l, r): (usize, usize) = (left.iter().sum(), right.iter().sum());
    let (matching, up) = bipartite_pages(rng, l, r);
    let degrees: Vec<usize> = left.iter().chain(right).copied().collect();
    let mut g = two_page_grid(rng, &degrees, matching, &up, sig);
    for v in 0..degrees.len() {
        g.side.insert(v, if v < left.len() { crate::grid::Side::L } else { crate::grid::Side::R });
    }
    g
}
