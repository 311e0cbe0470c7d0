//! Polynomial-time evaluators for the tractable cases, the dispatcher over
//! them, and the hypergraph perfect-matching front end.

mod affine;
mod dispatch;
mod eo;
mod fkt;
mod hyper;
mod product;
mod vanishing;

pub use affine::{affine_eval, affine_form, AffineForm, AffineShape};
pub use dispatch::{evaluate, Evaluation, Method};
pub use eo::{
    eo_geneq_eval, eo_geneq_eval_with, EBlock, EoInstance, EoNode, EoOptions, EoReport, EoSig, PinRecord, PinRule,
};
pub use fkt::{fkt_count_pm, pfaffian, WeightedEdge, WeightedPlanarGraph};
pub use hyper::{hypergraph_pm, Hyperedge, HpmResult, PlanarHypergraph};
pub use product::product_eval;
pub use vanishing::{chain_eval, r2_eval, vanishing_eval};

use crate::algebra::AlgebraicNumber as An;
use crate::grid::{GridError, PlanarGrid};
use crate::sigcalc::SymmetricSignature;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("class error: {0}")]
    Class(String),
    #[error("representation error: {0}")]
    Representation(String),
    #[error("gcd error: equality arities have gcd {0}, need at least 5")]
    Gcd(usize),
    #[error("parse error: {0}")]
    Parse(String),
    /// No polynomial route and brute force is over the cap.
    #[error("too large: {edges} edges exceeds cap {cap} ({note})")]
    Unroutable { edges: usize, cap: usize, note: String },
}

impl SolveError {
    pub fn is_too_large(&self) -> bool {
        matches!(self, SolveError::Grid(GridError::TooLarge { .. }) | SolveError::Unroutable { .. })
    }
}

/// Symmetric signature of every vertex of a closed grid.
pub(crate) fn closed_symmetric(grid: &PlanarGrid) -> Result<Vec<SymmetricSignature>, SolveError> {
    grid.check_structure()?;
    if !grid.dangling.is_empty() {
        return Err(GridError::Structure("grid has dangling edges".into()).into());
    }
    (0..grid.vertices.len())
        .map(|v| {
            grid.vertex_sig(v)?
                .as_symmetric()
                .ok_or_else(|| SolveError::Class(format!("vertex {} has a non-symmetric signature", grid.vertices[v].id)))
        })
        .collect()
}

/// Half-edge -> edge index.
pub(crate) fn edge_index(grid: &PlanarGrid) -> std::collections::HashMap<usize, usize> {
    let mut m = std::collections::HashMap::new();
    for (e, &[a, b]) in grid.edges.iter().enumerate() {
        m.insert(a, e);
        m.insert(b, e);
    }
    m
}

pub(crate) fn two_pow(e: usize) -> An {
    An::from_int(2).pow(e as u64)
}

/// Minimal union-find with parity, shared by several evaluators.
pub(crate) struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl ParityUf {
    pub(crate) fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), parity: vec![0; n] }
    }

    pub(crate) fn find(&mut self, x: usize) -> (usize, u8) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (r, q) = self.find(p);
        self.parent[x] = r;
        self.parity[x] ^= q;
        (r, self.parity[x])
    }

    /// Impose x ^ y = d; false on a contradiction.
    pub(crate) fn union(&mut self, x: usize, y: usize, d: u8) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == d;
        }
        self.parent[ry] = rx;
        self.parity[ry] = px ^ py ^ d;
        true
    }
}
