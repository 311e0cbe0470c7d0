//! Perfect matchings of hypergraphs with a planar incidence graph.
//!
//! Incidence j (hyperedge e, member v, in listing order) owns half-edge 2j at
//! the hyperedge node and 2j+1 at the vertex node.

use super::eo::{eo_geneq_eval, EoInstance, EoNode, EoSig};
use super::fkt::{fkt_count_pm, WeightedEdge, WeightedPlanarGraph};
use super::SolveError;
use crate::algebra::AlgebraicNumber as An;
use crate::classify::{hypergraph_verdict, SetVerdict};
use crate::grid::{holant_bruteforce_capped, GridError, PlanarGrid, Side, Vertex};
use crate::sigcalc::named;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub id: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarHypergraph {
    pub vertices: Vec<usize>,
    pub hyperedges: Vec<Hyperedge>,
    /// "v<id>" or "e<id>" -> incidence half-edges counterclockwise.  Missing
    /// entries default to incidence order.
    #[serde(default)]
    pub rotation: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HpmResult {
    pub verdict: SetVerdict,
    pub value: An,
    pub method: String,
}

impl PlanarHypergraph {
    pub fn from_json(text: &str) -> Result<Self, SolveError> {
        let h: Self = serde_json::from_str(text).map_err(|e| SolveError::Parse(e.to_string()))?;
        h.incidence_grid()?;
        Ok(h)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.hyperedges.iter().map(|e| e.members.len()).collect()
    }

    /// (hyperedge index, vertex id) per incidence.
    fn incidences(&self) -> Vec<(usize, usize)> {
        self.hyperedges.iter().enumerate().flat_map(|(i, e)| e.members.iter().map(move |&v| (i, v))).collect()
    }

    /// Rotations of hyperedge nodes (by index) and vertex nodes (by id).
    fn rotations(&self) -> Result<(Vec<Vec<usize>>, BTreeMap<usize, Vec<usize>>), SolveError> {
        let inc = self.incidences();
        let mut erot: Vec<Vec<usize>> = vec![vec![]; self.hyperedges.len()];
        let mut vrot: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|&v| (v, vec![])).collect();
        if vrot.len() != self.vertices.len() {
            return Err(GridError::Structure("duplicate vertex id".into()).into());
        }
        for (j, &(e, v)) in inc.iter().enumerate() {
            erot[e].push(2 * j);
            vrot.get_mut(&v)
                .ok_or_else(|| GridError::Structure(format!("hyperedge {} uses unknown vertex {v}", self.hyperedges[e].id)))?
                .push(2 * j + 1);
        }
        let mut eid: HashMap<usize, usize> = HashMap::new();
        for (i, e) in self.hyperedges.iter().enumerate() {
            if e.members.is_empty() {
                return Err(GridError::Structure(format!("hyperedge {} is empty", e.id)).into());
            }
            if eid.insert(e.id, i).is_some() {
                return Err(GridError::Structure(format!("duplicate hyperedge id {}", e.id)).into());
            }
        }
        for (key, rot) in &self.rotation {
            let bad = || SolveError::from(GridError::Structure(format!("bad rotation key {key:?}")));
            let (kind, num) = key.split_at(1.min(key.len()));
            let n: usize = num.parse().map_err(|_| bad())?;
            let slot = match kind {
                "v" => vrot.get_mut(&n).ok_or_else(bad)?,
                "e" => &mut erot[*eid.get(&n).ok_or_else(bad)?],
                _ => return Err(bad()),
            };
            let (mut a, mut b) = (slot.clone(), rot.clone());
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(GridError::Structure(format!("rotation {key:?} is not a permutation of its incidences")).into());
            }
            *slot = rot.clone();
        }
        Ok((erot, vrot))
    }

    /// Holant(=k on hyperedges | ExactOne on vertices) over the incidence graph.
    pub fn incidence_grid(&self) -> Result<PlanarGrid, SolveError> {
        let (erot, vrot) = self.rotations()?;
        let mut g = PlanarGrid::empty();
        let mut id = 0;
        for rot in erot {
            let name = format!("eq{}", rot.len());
            g.add_signature(&name, named::equality(rot.len()).entries);
            g.vertices.push(Vertex { id, sig: name, rotation: rot });
            g.side.insert(id, Side::L);
            id += 1;
        }
        for rot in vrot.into_values() {
            let name = format!("eo{}", rot.len());
            g.add_signature(&name, named::exact_one(rot.len()).entries);
            g.vertices.push(Vertex { id, sig: name, rotation: rot });
            g.side.insert(id, Side::R);
            id += 1;
        }
        g.edges = (0..self.incidences().len()).map(|j| [2 * j, 2 * j + 1]).collect();
        g.check_structure()?;
        Ok(g)
    }

    /// The same count with disequality links: equalities are invariant under
    /// flipping all their inputs.
    pub fn eo_instance(&self) -> Result<EoInstance, SolveError> {
        let (erot, vrot) = self.rotations()?;
        let mut nodes: Vec<EoNode> =
            erot.into_iter().map(|r| EoNode { sig: EoSig::GenEq { a: An::one(), b: An::one() }, ports: r }).collect();
        let mut scalar = An::one();
        for r in vrot.into_values() {
            if r.is_empty() {
                scalar = An::zero();
            } else {
                nodes.push(EoNode { sig: EoSig::ExactOne { weight: An::one() }, ports: r });
            }
        }
        let links = (0..self.incidences().len()).map(|j| [2 * j, 2 * j + 1]).collect();
        Ok(EoInstance { nodes, links, scalar })
    }

    /// The graph when every hyperedge has two members.
    fn as_graph(&self) -> Result<WeightedPlanarGraph, SolveError> {
        let (_, vrot) = self.rotations()?;
        let edges = self
            .hyperedges
            .iter()
            .map(|e| WeightedEdge { ends: [e.members[0], e.members[1]], weight: An::one() })
            .collect();
        // incidence j of hyperedge i is member j - 2i, so half-edge 2j+1 -> j
        Ok(WeightedPlanarGraph {
            vertices: self.vertices.clone(),
            edges,
            rotation: vrot.into_iter().map(|(v, r)| (v, r.into_iter().map(|h| h / 2).collect())).collect(),
        })
    }
}

/// Verdict and exact count.  Polynomial routes: gcd >= 5 via the pinning
/// solver, all sizes 2 via FKT, all sizes 1 directly; anything else is
/// counted by brute force within `cap` incidences.
pub fn hypergraph_pm(h: &PlanarHypergraph, cap: usize) -> Result<HpmResult, SolveError> {
    let grid = h.incidence_grid()?;
    grid.validate_planar()?;
    let sizes = h.sizes();
    let verdict = hypergraph_verdict(&sizes).map_err(|e| SolveError::Class(e.to_string()))?;
    let t = sizes.iter().fold(0usize, |g, &s| g.gcd(&s));
    let (value, method) = if t >= 5 {
        (eo_geneq_eval(&h.eo_instance()?)?, "eo")
    } else if sizes.iter().all(|&s| s == 2) {
        (fkt_count_pm(&h.as_graph()?)?, "fkt")
    } else if sizes.iter().all(|&s| s == 1) {
        let (_, vrot) = h.rotations()?;
        (vrot.values().fold(An::one(), |acc, r| &acc * &An::from_int(r.len() as i64)), "product")
    } else {
        (holant_bruteforce_capped(&grid, cap)?, "brute")
    };
    Ok(HpmResult { verdict, value, method: method.into() })
}
