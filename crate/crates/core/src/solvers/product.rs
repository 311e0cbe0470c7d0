//! Product-type grids: every signature is a tensor product of unaries,
//! binary equalities and disequalities, so each constraint component has at
//! most two consistent patterns.

use super::{closed_symmetric, edge_index, ParityUf, SolveError};
use crate::algebra::AlgebraicNumber as An;
use crate::classify::degenerate_direction;
use crate::grid::PlanarGrid;

pub fn product_eval(grid: &PlanarGrid) -> Result<An, SolveError> {
    let sigs = closed_symmetric(grid)?;
    let eidx = edge_index(grid);
    let ne = grid.edges.len();
    let mut uf = ParityUf::new(ne);
    let mut scalar = grid.scalar.clone();
    let mut unary: Vec<[An; 2]> = vec![[An::one(), An::one()]; ne];
    // (edge of some port, a, b) for each Gen-Eq of arity >= 2
    let mut geneq: Vec<(usize, An, An)> = Vec::new();
    for (vi, f) in sigs.iter().enumerate() {
        let n = f.arity();
        let ports: Vec<usize> = grid.vertices[vi].rotation.iter().map(|h| eidx[h]).collect();
        let e = &f.entries;
        if n == 0 {
            scalar = &scalar * &e[0];
            continue;
        }
        if f.is_zero() {
            return Ok(An::zero());
        }
        if n == 2 && e[0].is_zero() && e[2].is_zero() {
            if !uf.union(ports[0], ports[1], 1) {
                return Ok(An::zero());
            }
            scalar = &scalar * &e[1];
        } else if e[1..n].iter().all(|x| x.is_zero()) {
            if n == 1 {
                let u = &mut unary[ports[0]];
                *u = [&u[0] * &e[0], &u[1] * &e[1]];
            } else {
                for &p in &ports[1..] {
                    if !uf.union(ports[0], p, 0) {
                        return Ok(An::zero());
                    }
                }
                geneq.push((ports[0], e[0].clone(), e[n].clone()));
            }
        } else if let Some(u) = degenerate_direction(e) {
            let c = if u[0].is_zero() { e[n].clone() } else { e[0].clone() };
            scalar = &scalar * &c;
            for &p in &ports {
                let w = &mut unary[p];
                *w = [&w[0] * &u[0], &w[1] * &u[1]];
            }
        } else {
            return Err(SolveError::Class(format!("vertex {} is not of product type", grid.vertices[vi].id)));
        }
    }
    // per component, the two patterns indexed by the root's value
    let mut patterns: std::collections::BTreeMap<usize, [An; 2]> = std::collections::BTreeMap::new();
    for (e, u) in unary.iter().enumerate() {
        let (r, p) = uf.find(e);
        let slot = patterns.entry(r).or_insert_with(|| [An::one(), An::one()]);
        for x in 0..2 {
            slot[x] = &slot[x] * &u[x ^ p as usize];
        }
    }
    for (e, a, b) in &geneq {
        let (r, p) = uf.find(*e);
        let slot = patterns.get_mut(&r).expect("component");
        for x in 0..2 {
            slot[x] = &slot[x] * if x ^ p as usize == 0 { a } else { b };
        }
    }
    for [x0, x1] in patterns.values() {
        scalar = &scalar * &(x0 + x1);
        if scalar.is_zero() {
            break;
        }
    }
    Ok(scalar)
}
