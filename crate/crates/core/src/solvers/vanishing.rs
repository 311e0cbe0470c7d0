//! Vanishing sets, recurrence degree at most one, and grids whose
//! nondegenerate signatures have arity at most two.

use super::{closed_symmetric, edge_index, two_pow, SolveError};
use crate::algebra::AlgebraicNumber as An;
use crate::classify::{degenerate_direction, in_vanishing};
use crate::grid::PlanarGrid;
use crate::sigcalc::{z_hat, SymmetricSignature};

/// A signature with the edges on its ports; degenerate vertices are split
/// into one unary per port.
struct Node {
    f: SymmetricSignature,
    edges: Vec<usize>,
}

fn split_nodes(grid: &PlanarGrid) -> Result<(Vec<Node>, An), SolveError> {
    let sigs = closed_symmetric(grid)?;
    let eidx = edge_index(grid);
    let mut scalar = grid.scalar.clone();
    let mut nodes = Vec::new();
    for (vi, f) in sigs.into_iter().enumerate() {
        let n = f.arity();
        let edges: Vec<usize> = grid.vertices[vi].rotation.iter().map(|h| eidx[h]).collect();
        if n == 0 {
            scalar = &scalar * &f.entries[0];
            continue;
        }
        if f.is_zero() {
            return Ok((vec![], An::zero()));
        }
        match degenerate_direction(&f.entries) {
            Some(u) if n >= 2 => {
                let c = if u[0].is_zero() { f.entries[n].clone() } else { f.entries[0].clone() };
                scalar = &scalar * &c;
                for e in edges {
                    nodes.push(Node { f: SymmetricSignature::new(u.to_vec()), edges: vec![e] });
                }
            }
            _ => nodes.push(Node { f, edges }),
        }
    }
    Ok((nodes, scalar))
}

/// Connected components of the node graph, as (node list, edge count).
fn node_components(nodes: &[Node], ne: usize) -> Vec<(Vec<usize>, usize)> {
    let mut uf = super::ParityUf::new(nodes.len());
    let mut end: Vec<Option<usize>> = vec![None; ne];
    for (i, nd) in nodes.iter().enumerate() {
        for &e in &nd.edges {
            match end[e] {
                Some(j) => {
                    uf.union(i, j, 0);
                }
                None => end[e] = Some(i),
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, (Vec<usize>, usize)> = Default::default();
    for i in 0..nodes.len() {
        let r = uf.find(i).0;
        let c = comps.entry(r).or_default();
        c.0.push(i);
        c.1 += nodes[i].edges.len();
    }
    comps.into_values().map(|(v, ports)| (v, ports / 2)).collect()
}

/// Zero for every grid over a vanishing set V+ or V-.
pub fn vanishing_eval(grid: &PlanarGrid) -> Result<An, SolveError> {
    let sigs = closed_symmetric(grid)?;
    if sigs.is_empty() {
        return Ok(grid.scalar.clone());
    }
    let flags: Vec<(bool, bool)> = sigs.iter().map(in_vanishing).collect();
    if flags.iter().all(|f| f.0) || flags.iter().all(|f| f.1) {
        Ok(An::zero())
    } else {
        Err(SolveError::Class("signatures are not all in V+ or all in V-".into()))
    }
}

/// Holant over f-hat with disequality edges: each edge gives its single one to
/// one endpoint.  With every vertex absorbing at most one, a component is a
/// tree (one vertex absorbs none) or unicyclic (two orientations).
pub fn r2_eval(grid: &PlanarGrid, plus: bool) -> Result<An, SolveError> {
    let (nodes, scalar) = split_nodes(grid)?;
    if scalar.is_zero() {
        return Ok(An::zero());
    }
    let hats: Vec<Vec<An>> = nodes
        .iter()
        .map(|nd| {
            let mut h = z_hat(&nd.f).entries;
            if !plus {
                h.reverse();
            }
            h
        })
        .collect();
    let mut total = &scalar * &two_pow(grid.edges.len());
    for (vs, ne) in node_components(&nodes, grid.edges.len()) {
        let mut rd_sum = 0usize;
        let mut high = false;
        for &v in &vs {
            match hats[v].iter().rposition(|x| !x.is_zero()) {
                None => return Ok(An::zero()),
                Some(r) => {
                    rd_sum += r;
                    high |= r > 1;
                }
            }
        }
        if rd_sum < ne {
            return Ok(An::zero());
        }
        if high {
            return Err(SolveError::Class("a signature has recurrence degree above 1".into()));
        }
        let b: Vec<&An> = vs.iter().map(|&v| &hats[v][1]).collect();
        let value = if ne == vs.len() {
            &An::from_int(2) * &b.iter().fold(An::one(), |acc, x| &acc * *x)
        } else {
            // tree: sum over the unabsorbed root
            let m = vs.len();
            let mut prefix = vec![An::one(); m + 1];
            for k in 0..m {
                prefix[k + 1] = &prefix[k] * b[k];
            }
            let mut suffix = An::one();
            let mut s = An::zero();
            for k in (0..m).rev() {
                s = &s + &(&(&prefix[k] * &suffix) * &hats[vs[k]][0]);
                suffix = &suffix * b[k];
            }
            s
        };
        total = &total * &value;
        if total.is_zero() {
            break;
        }
    }
    Ok(total)
}

type Mat = [[An; 2]; 2];

fn mat_vec(m: &Mat, v: &[An; 2]) -> [An; 2] {
    [&(&m[0][0] * &v[0]) + &(&m[0][1] * &v[1]), &(&m[1][0] * &v[0]) + &(&m[1][1] * &v[1])]
}

/// Paths and cycles of unary and binary signatures, by transfer matrices.
pub fn chain_eval(grid: &PlanarGrid) -> Result<An, SolveError> {
    let (nodes, mut total) = split_nodes(grid)?;
    if total.is_zero() {
        return Ok(total);
    }
    if let Some(nd) = nodes.iter().find(|nd| nd.f.arity() > 2) {
        return Err(SolveError::Class(format!("nondegenerate signature of arity {}", nd.f.arity())));
    }
    let ne = grid.edges.len();
    let mut at: Vec<Vec<usize>> = vec![vec![]; ne];
    for (i, nd) in nodes.iter().enumerate() {
        for &e in &nd.edges {
            at[e].push(i);
        }
    }
    let mat = |i: usize| -> Mat {
        let e = &nodes[i].f.entries;
        [[e[0].clone(), e[1].clone()], [e[1].clone(), e[2].clone()]]
    };
    let mut done = vec![false; nodes.len()];
    // walk from node i leaving through edge e with message v; returns final scalar
    let walk = |start: usize, mut e: usize, mut v: [An; 2], done: &mut Vec<bool>| -> An {
        let mut prev = start;
        loop {
            let next = if at[e][0] == prev { at[e][1] } else { at[e][0] };
            done[next] = true;
            let nd = &nodes[next];
            if nd.f.arity() == 1 {
                return &(&v[0] * &nd.f.entries[0]) + &(&v[1] * &nd.f.entries[1]);
            }
            v = mat_vec(&mat(next), &v);
            e = if nd.edges[0] == e { nd.edges[1] } else { nd.edges[0] };
            prev = next;
        }
    };
    for i in 0..nodes.len() {
        if done[i] || nodes[i].f.arity() != 1 {
            continue;
        }
        done[i] = true;
        let u = [nodes[i].f.entries[0].clone(), nodes[i].f.entries[1].clone()];
        total = &total * &walk(i, nodes[i].edges[0], u, &mut done);
    }
    // remaining binaries lie on cycles
    for i in 0..nodes.len() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let [e0, e1] = [nodes[i].edges[0], nodes[i].edges[1]];
        let m = mat(i);
        let tr = if e0 == e1 {
            &m[0][0] + &m[1][1]
        } else {
            // trace of the cycle product: push both basis vectors around
            let mut t = An::zero();
            for x in 0..2 {
                let mut v = [An::zero(), An::zero()];
                v[x] = An::one();
                let mut cur = i;
                let mut e = e1;
                let mut w = mat_vec(&m, &v);
                loop {
                    let next = if at[e][0] == cur { at[e][1] } else { at[e][0] };
                    if next == i {
                        t = &t + &w[x];
                        break;
                    }
                    done[next] = true;
                    w = mat_vec(&mat(next), &w);
                    let nd = &nodes[next];
                    e = if nd.edges[0] == e { nd.edges[1] } else { nd.edges[0] };
                    cur = next;
                }
            }
            t
        };
        total = &total * &tr;
    }
    Ok(total)
}
