//! Planar signature grids and F-gates with rotation systems.

use crate::algebra::AlgebraicNumber as An;
use crate::sigcalc::{transform_entries, transform_general, GeneralSignature, SymmetricSignature, Transform2x2};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

pub const DEFAULT_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("structure error: {0}")]
    Structure(String),
    #[error("embedding error: component containing vertex {vertex} has genus > 0")]
    Embedding { vertex: usize },
    #[error("too large: {edges} edges exceeds cap {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("dangling order error: {0}")]
    Order(String),
    #[error("grid is not bipartite-tagged")]
    NotBipartite,
    #[error("singular transform")]
    Singular,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub sig: String,
    /// Half-edge ids, counterclockwise; the first is the marked input.
    pub rotation: Vec<usize>,
}

fn default_scalar() -> An {
    An::one()
}

fn is_one(a: &An) -> bool {
    a.is_one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarGrid {
    pub signatures: BTreeMap<String, Vec<An>>,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub dangling: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub side: BTreeMap<usize, Side>,
    #[serde(default = "default_scalar", skip_serializing_if = "is_one")]
    pub scalar: An,
}

/// A vertex's signature resolved against its degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VertexSig {
    Sym(SymmetricSignature),
    Gen(GeneralSignature),
}

impl VertexSig {
    pub fn arity(&self) -> usize {
        match self {
            VertexSig::Sym(s) => s.arity(),
            VertexSig::Gen(g) => g.arity,
        }
    }

    pub fn as_symmetric(&self) -> Option<SymmetricSignature> {
        match self {
            VertexSig::Sym(s) => Some(s.clone()),
            VertexSig::Gen(g) => g.symmetrize(),
        }
    }

    pub fn entries(&self) -> &[An] {
        match self {
            VertexSig::Sym(s) => &s.entries,
            VertexSig::Gen(g) => &g.entries,
        }
    }
}

/// A face: the cyclic sequence of half-edges it leaves from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub half_edges: Vec<usize>,
}

/// Half-edge incidence tables derived from a grid.
#[derive(Clone, Debug)]
pub struct Incidence {
    /// half-edge -> (vertex index, position in rotation)
    pub owner: HashMap<usize, (usize, usize)>,
    /// half-edge -> twin half-edge (None for dangling)
    pub twin: HashMap<usize, Option<usize>>,
}

impl Incidence {
    pub fn rot_succ(&self, grid: &PlanarGrid, h: usize) -> usize {
        let (v, p) = self.owner[&h];
        let rot = &grid.vertices[v].rotation;
        rot[(p + 1) % rot.len()]
    }
}

#[derive(Clone, Debug)]
pub struct Validation {
    pub faces: Vec<Face>,
    pub genus_ok: bool,
    pub components: usize,
}

impl PlanarGrid {
    pub fn from_json(text: &str) -> Result<Self, GridError> {
        let g: PlanarGrid = serde_json::from_str(text).map_err(|e| GridError::Structure(e.to_string()))?;
        g.check_structure()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("grid serializes")
    }

    /// A new empty grid.
    pub fn empty() -> Self {
        PlanarGrid {
            signatures: BTreeMap::new(),
            vertices: vec![],
            edges: vec![],
            dangling: vec![],
            side: BTreeMap::new(),
            scalar: An::one(),
        }
    }

    pub fn add_signature(&mut self, name: &str, entries: Vec<An>) {
        self.signatures.insert(name.to_string(), entries);
    }

    /// Adds a vertex with fresh half-edge ids and returns them.
    pub fn add_vertex(&mut self, sig: &str, degree: usize) -> Vec<usize> {
        let next = self.max_half_edge().map_or(0, |m| m + 1);
        let rotation: Vec<usize> = (next..next + degree).collect();
        let id = self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
        self.vertices.push(Vertex { id, sig: sig.to_string(), rotation: rotation.clone() });
        rotation
    }

    pub fn max_half_edge(&self) -> Option<usize> {
        self.vertices.iter().flat_map(|v| v.rotation.iter().copied()).max()
    }

    pub fn incidence(&self) -> Result<Incidence, GridError> {
        let mut owner = HashMap::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            for (p, &h) in v.rotation.iter().enumerate() {
                if owner.insert(h, (vi, p)).is_some() {
                    return Err(GridError::Structure(format!("half-edge {h} appears in two rotations")));
                }
            }
        }
        let mut twin: HashMap<usize, Option<usize>> = HashMap::new();
        let mut claim = |h: usize, t: Option<usize>| -> Result<(), GridError> {
            if !owner.contains_key(&h) {
                return Err(GridError::Structure(format!("half-edge {h} is not in any rotation")));
            }
            if twin.insert(h, t).is_some() {
                return Err(GridError::Structure(format!("half-edge {h} used twice")));
            }
            Ok(())
        };
        for &[a, b] in &self.edges {
            if a == b {
                return Err(GridError::Structure(format!("edge joins half-edge {a} to itself")));
            }
            claim(a, Some(b))?;
            claim(b, Some(a))?;
        }
        for &h in &self.dangling {
            claim(h, None)?;
        }
        if let Some(h) = owner.keys().find(|h| !twin.contains_key(h)) {
            return Err(GridError::Structure(format!("half-edge {h} is neither matched nor dangling")));
        }
        Ok(Incidence { owner, twin })
    }

    pub fn vertex_sig(&self, vi: usize) -> Result<VertexSig, GridError> {
        let v = &self.vertices[vi];
        let e = self
            .signatures
            .get(&v.sig)
            .ok_or_else(|| GridError::Structure(format!("unknown signature {:?} at vertex {}", v.sig, v.id)))?;
        let d = v.rotation.len();
        if e.len() == d + 1 {
            Ok(VertexSig::Sym(SymmetricSignature::new(e.clone())))
        } else if d < 20 && e.len() == 1 << d {
            Ok(VertexSig::Gen(GeneralSignature::new(d, e.clone())))
        } else {
            Err(GridError::Structure(format!(
                "vertex {} has degree {d} but signature {:?} has {} entries",
                v.id,
                v.sig,
                e.len()
            )))
        }
    }

    pub fn check_structure(&self) -> Result<Incidence, GridError> {
        let mut ids = std::collections::HashSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id) {
                return Err(GridError::Structure(format!("duplicate vertex id {}", v.id)));
            }
        }
        for vi in 0..self.vertices.len() {
            self.vertex_sig(vi)?;
        }
        for k in self.side.keys() {
            if !ids.contains(k) {
                return Err(GridError::Structure(format!("side tag for unknown vertex {k}")));
            }
        }
        self.incidence()
    }

    /// Connected components as lists of vertex indices.
    pub fn components(&self, inc: &Incidence) -> Vec<Vec<usize>> {
        let n = self.vertices.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let nx = uf[y];
                uf[y] = r;
                y = nx;
            }
            r
        }
        for &[a, b] in &self.edges {
            let (x, y) = (find(&mut uf, inc.owner[&a].0), find(&mut uf, inc.owner[&b].0));
            uf[x] = y;
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut uf, v);
            groups.entry(r).or_default().push(v);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// The grid with an external vertex closing off the dangling edges, so that
    /// an F-gate embedding becomes a closed one.
    fn closed_up(&self) -> PlanarGrid {
        if self.dangling.is_empty() {
            return self.clone();
        }
        let mut g = self.clone();
        let base = self.max_half_edge().map_or(0, |m| m + 1);
        let mut rot = Vec::new();
        for (k, &h) in self.dangling.iter().enumerate().rev() {
            g.edges.push([h, base + k]);
            rot.push(base + k);
        }
        let name = "__external".to_string();
        g.signatures.insert(name.clone(), vec![An::zero(); rot.len() + 1]);
        let id = self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
        g.vertices.push(Vertex { id, sig: name, rotation: rot });
        g.dangling.clear();
        g
    }

    /// Faces by traversal next(h) = rot_succ(twin(h)), plus per-component Euler check.
    /// Dangling edges are closed off through an external vertex first.
    pub fn validate(&self) -> Result<Validation, GridError> {
        self.check_structure()?;
        let g = self.closed_up();
        let inc = g.incidence()?;
        let faces = g.faces(&inc);
        let comps = g.components(&inc);
        let mut comp_of = vec![0; g.vertices.len()];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                comp_of[v] = c;
            }
        }
        let mut fcount = vec![0i64; comps.len()];
        for f in &faces {
            fcount[comp_of[inc.owner[&f.half_edges[0]].0]] += 1;
        }
        let mut ecount = vec![0i64; comps.len()];
        for &[a, _] in &g.edges {
            ecount[comp_of[inc.owner[&a].0]] += 1;
        }
        let genus_ok = comps.iter().enumerate().all(|(c, vs)| {
            let f = if ecount[c] == 0 { 1 } else { fcount[c] };
            vs.len() as i64 - ecount[c] + f == 2
        });
        Ok(Validation { faces, genus_ok, components: comps.len() })
    }

    /// Like `validate` but turns a genus failure into an error.
    pub fn validate_planar(&self) -> Result<Validation, GridError> {
        let v = self.validate()?;
        if !v.genus_ok {
            let g = self.closed_up();
            let inc = g.incidence()?;
            let faces = g.faces(&inc);
            let comps = g.components(&inc);
            for vs in comps {
                let set: std::collections::HashSet<usize> = vs.iter().copied().collect();
                let e = g.edges.iter().filter(|[a, _]| set.contains(&inc.owner[a].0)).count() as i64;
                let f = faces.iter().filter(|f| set.contains(&inc.owner[&f.half_edges[0]].0)).count() as i64;
                let f = if e == 0 { 1 } else { f };
                if vs.len() as i64 - e + f != 2 {
                    let vid = g.vertices[vs[0]].id;
                    return Err(GridError::Embedding { vertex: vid });
                }
            }
        }
        Ok(v)
    }

    /// Faces of a grid without dangling edges.
    pub fn faces(&self, inc: &Incidence) -> Vec<Face> {
        let mut seen = std::collections::HashSet::new();
        let mut hs: Vec<usize> = inc.twin.iter().filter(|(_, t)| t.is_some()).map(|(h, _)| *h).collect();
        hs.sort();
        let mut faces = Vec::new();
        for start in hs {
            if seen.contains(&start) {
                continue;
            }
            let mut f = Vec::new();
            let mut h = start;
            loop {
                seen.insert(h);
                f.push(h);
                let t = inc.twin[&h].expect("closed grid");
                h = inc.rot_succ(self, t);
                if h == start {
                    break;
                }
            }
            faces.push(Face { half_edges: f });
        }
        faces
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Resolve every vertex signature.
    pub fn vertex_sigs(&self) -> Result<Vec<VertexSig>, GridError> {
        (0..self.vertices.len()).map(|v| self.vertex_sig(v)).collect()
    }

    /// Symmetric signatures present on vertices (by name, deduplicated).
    pub fn symmetric_signature_set(&self) -> Result<Vec<SymmetricSignature>, GridError> {
        let mut seen = BTreeMap::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            if seen.contains_key(&v.sig) {
                continue;
            }
            let s = self
                .vertex_sig(vi)?
                .as_symmetric()
                .ok_or_else(|| GridError::Structure(format!("signature {:?} is not symmetric", v.sig)))?;
            seen.insert(v.sig.clone(), s);
        }
        Ok(seen.into_values().collect())
    }
}

/// Per-vertex evaluator used by the brute-force search.
struct VEval {
    sig: VertexSig,
    degree: usize,
    /// nzprefix[k] = number of nonzero symmetric entries with index < k
    nzprefix: Vec<u32>,
}

impl VEval {
    fn new(sig: VertexSig, degree: usize) -> Self {
        let nzprefix = match &sig {
            VertexSig::Sym(s) => {
                let mut p = vec![0u32];
                for e in &s.entries {
                    p.push(p.last().unwrap() + (!e.is_zero()) as u32);
                }
                p
            }
            VertexSig::Gen(_) => vec![],
        };
        VEval { sig, degree, nzprefix }
    }

    /// Can the vertex still be nonzero with `ones` ones and `rem` unassigned inputs?
    fn alive(&self, ones: usize, rem: usize) -> bool {
        match &self.sig {
            VertexSig::Sym(_) => self.nzprefix[ones + rem + 1] > self.nzprefix[ones],
            VertexSig::Gen(_) => true,
        }
    }

    fn value(&self, ones: usize, bits: u64) -> &An {
        match &self.sig {
            VertexSig::Sym(s) => &s.entries[ones],
            VertexSig::Gen(g) => &g.entries[bits as usize],
        }
    }
}

struct Search {
    ev: Vec<VEval>,
    /// per edge in search order: the two endpoints (vertex, bit mask within general index)
    order: Vec<[(usize, u64); 2]>,
    /// vertices completed after assigning order[k]
    completes: Vec<Vec<usize>>,
}

#[derive(Clone)]
struct State {
    ones: Vec<usize>,
    bits: Vec<u64>,
    rem: Vec<usize>,
}

impl Search {
    fn run(&self, k: usize, mut st: State, prod: An) -> An {
        if k == self.order.len() {
            return prod;
        }
        let go = |b: u64, st: &mut State| -> Option<An> {
            let mut p = prod.clone();
            for &(v, mask) in &self.order[k] {
                st.rem[v] -= 1;
                if b == 1 {
                    st.ones[v] += 1;
                    st.bits[v] |= mask;
                }
            }
            for &(v, _) in &self.order[k] {
                if !self.ev[v].alive(st.ones[v], st.rem[v]) {
                    return None;
                }
            }
            for &v in &self.completes[k] {
                let val = self.ev[v].value(st.ones[v], st.bits[v]);
                if val.is_zero() {
                    return None;
                }
                p = &p * val;
            }
            Some(p)
        };
        let mut st1 = st.clone();
        let b0 = go(0, &mut st);
        let b1 = go(1, &mut st1);
        let parallel = k < 8 && self.order.len() > 14;
        match (b0, b1) {
            (None, None) => An::zero(),
            (Some(p), None) => self.run(k + 1, st, p),
            (None, Some(p)) => self.run(k + 1, st1, p),
            (Some(p0), Some(p1)) => {
                if parallel {
                    let (a, b) = rayon::join(|| self.run(k + 1, st, p0), || self.run(k + 1, st1, p1));
                    &a + &b
                } else {
                    &self.run(k + 1, st, p0) + &self.run(k + 1, st1, p1)
                }
            }
        }
    }
}

/// Exact sum with some half-edges fixed (used for dangling edges of gates).
fn holant_sum(grid: &PlanarGrid, inc: &Incidence, fixed: &HashMap<usize, u8>) -> Result<An, GridError> {
    let sigs = grid.vertex_sigs()?;
    let nv = grid.vertices.len();
    let ev: Vec<VEval> = sigs.into_iter().enumerate().map(|(i, s)| VEval::new(s, grid.vertices[i].rotation.len())).collect();
    let mask_of = |h: usize| -> (usize, u64) {
        let (v, p) = inc.owner[&h];
        (v, 1u64.checked_shl((ev[v].degree - 1 - p) as u32).unwrap_or(0))
    };
    let mut st = State { ones: vec![0; nv], bits: vec![0; nv], rem: (0..nv).map(|v| ev[v].degree).collect() };
    for (&h, &b) in fixed {
        let (v, m) = mask_of(h);
        st.rem[v] -= 1;
        if b == 1 {
            st.ones[v] += 1;
            st.bits[v] |= m;
        }
    }
    // BFS edge order so vertices complete early
    let mut adj: Vec<Vec<usize>> = vec![vec![]; nv];
    for (ei, &[a, b]) in grid.edges.iter().enumerate() {
        adj[inc.owner[&a].0].push(ei);
        adj[inc.owner[&b].0].push(ei);
    }
    let mut order_idx = Vec::new();
    let mut used = vec![false; grid.edges.len()];
    let mut visited = vec![false; nv];
    for s in 0..nv {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let mut q = std::collections::VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &ei in &adj[v] {
                if used[ei] {
                    continue;
                }
                used[ei] = true;
                order_idx.push(ei);
                let [a, b] = grid.edges[ei];
                for h in [a, b] {
                    let w = inc.owner[&h].0;
                    if !visited[w] {
                        visited[w] = true;
                        q.push_back(w);
                    }
                }
            }
        }
    }
    let order: Vec<[(usize, u64); 2]> = order_idx.iter().map(|&ei| [mask_of(grid.edges[ei][0]), mask_of(grid.edges[ei][1])]).collect();
    let mut rem = st.rem.clone();
    let mut completes = vec![vec![]; order.len()];
    for (k, e) in order.iter().enumerate() {
        for &(v, _) in e {
            rem[v] -= 1;
        }
        let mut c: Vec<usize> = e.iter().map(|x| x.0).filter(|&v| rem[v] == 0).collect();
        c.dedup();
        completes[k] = c;
    }
    // vertices with nothing left to assign
    let mut prod = grid.scalar.clone();
    for v in 0..nv {
        if rem[v] == 0 && st.rem[v] == 0 {
            let val = ev[v].value(st.ones[v], st.bits[v]);
            prod = &prod * val;
        }
    }
    for v in 0..nv {
        if !ev[v].alive(st.ones[v], st.rem[v]) {
            return Ok(An::zero());
        }
    }
    if prod.is_zero() {
        return Ok(An::zero());
    }
    let search = Search { ev, order, completes };
    Ok(search.run(0, st, prod))
}

/// Exact Holant value by exhaustive summation over edge assignments.
pub fn holant_bruteforce(grid: &PlanarGrid) -> Result<An, GridError> {
    holant_bruteforce_capped(grid, DEFAULT_CAP)
}

pub fn holant_bruteforce_capped(grid: &PlanarGrid, cap: usize) -> Result<An, GridError> {
    let inc = grid.check_structure()?;
    if !grid.dangling.is_empty() {
        return Err(GridError::Structure("grid has dangling edges; use gate_signature".into()));
    }
    if grid.edges.len() > cap {
        return Err(GridError::TooLarge { edges: grid.edges.len(), cap });
    }
    holant_sum(grid, &inc, &HashMap::new())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateSignature {
    pub general: GeneralSignature,
    pub symmetric: Option<SymmetricSignature>,
}

/// The F-gate signature; the first dangling edge is the most significant input.
pub fn gate_signature(grid: &PlanarGrid, cap: usize) -> Result<GateSignature, GridError> {
    let inc = grid.check_structure()?;
    if grid.edges.len() > cap {
        return Err(GridError::TooLarge { edges: grid.edges.len(), cap });
    }
    if grid.components(&inc).len() > 1 {
        return Err(GridError::Order("gates must be connected".into()));
    }
    if !grid.validate()?.genus_ok {
        return Err(GridError::Order("dangling edges are not in counterclockwise order on the outer face".into()));
    }
    let d = grid.dangling.len();
    let entries: Vec<An> = (0..1usize << d)
        .map(|x| {
            let fixed: HashMap<usize, u8> =
                grid.dangling.iter().enumerate().map(|(k, &h)| (h, ((x >> (d - 1 - k)) & 1) as u8)).collect();
            holant_sum(grid, &inc, &fixed)
        })
        .collect::<Result<_, _>>()?;
    let general = GeneralSignature::new(d, entries);
    let symmetric = general.symmetrize();
    Ok(GateSignature { general, symmetric })
}

/// Subdivide every edge by a new =2 vertex; original vertices become L, new ones R.
pub fn two_stretch(grid: &PlanarGrid) -> PlanarGrid {
    let mut g = grid.clone();
    let name = "__eq2".to_string();
    g.signatures.insert(name.clone(), vec![An::one(), An::zero(), An::one()]);
    let mut next_h = grid.max_half_edge().map_or(0, |m| m + 1);
    let mut next_v = grid.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
    g.side = grid.vertices.iter().map(|v| (v.id, Side::L)).collect();
    g.edges.clear();
    for &[a, b] in &grid.edges {
        let (x, y) = (next_h, next_h + 1);
        next_h += 2;
        g.vertices.push(Vertex { id: next_v, sig: name.clone(), rotation: vec![x, y] });
        g.side.insert(next_v, Side::R);
        next_v += 1;
        g.edges.push([a, x]);
        g.edges.push([y, b]);
    }
    g
}

fn transform_vertex_sig(sig: &VertexSig, t: &Transform2x2) -> Vec<An> {
    match sig {
        VertexSig::Sym(s) => transform_entries(&t.as_array(), &s.entries),
        VertexSig::Gen(g) => transform_general(t, g).entries,
    }
}

/// Rename signatures per vertex group and apply a per-group transform.
fn retarget(grid: &PlanarGrid, pick: impl Fn(usize) -> (String, Transform2x2)) -> Result<PlanarGrid, GridError> {
    let mut g = grid.clone();
    g.signatures.clear();
    for vi in 0..grid.vertices.len() {
        let (tag, t) = pick(vi);
        let name = format!("{}{}", grid.vertices[vi].sig, tag);
        if !g.signatures.contains_key(&name) {
            let s = grid.vertex_sig(vi)?;
            g.signatures.insert(name.clone(), transform_vertex_sig(&s, &t));
        }
        g.vertices[vi].sig = name;
    }
    Ok(g)
}

/// Holant(F | G) = Holant(F T | T^{-1} G) on a bipartition-tagged grid.
pub fn holographic_transform_bipartite(grid: &PlanarGrid, t: &Transform2x2) -> Result<PlanarGrid, GridError> {
    let inc = grid.check_structure()?;
    if grid.vertices.iter().any(|v| !grid.side.contains_key(&v.id)) {
        return Err(GridError::NotBipartite);
    }
    for &[a, b] in &grid.edges {
        let (va, vb) = (&grid.vertices[inc.owner[&a].0], &grid.vertices[inc.owner[&b].0]);
        if grid.side[&va.id] == grid.side[&vb.id] {
            return Err(GridError::NotBipartite);
        }
    }
    let ti = t.inverse().map_err(|_| GridError::Singular)?;
    let tt = t.transpose();
    retarget(grid, |vi| match grid.side[&grid.vertices[vi].id] {
        Side::L => ("@L".to_string(), tt.clone()),
        Side::R => ("@R".to_string(), ti.clone()),
    })
}

/// Apply one orthogonal T to every vertex; the value is unchanged when T T^t = I.
pub fn orthogonal_transform(grid: &PlanarGrid, t: &Transform2x2) -> Result<PlanarGrid, GridError> {
    grid.check_structure()?;
    if !t.is_orthogonal() {
        return Err(GridError::Structure("transform is not orthogonal".into()));
    }
    retarget(grid, |_| ("@O".to_string(), t.clone()))
}

/// Convenience builder used by tests and fixtures: a closed grid from
/// (signature entries, rotation) lists and edges.
pub fn build_grid(sigs: &[(&str, Vec<An>)], verts: &[(&str, Vec<usize>)], edges: &[[usize; 2]], dangling: &[usize]) -> PlanarGrid {
    PlanarGrid {
        signatures: sigs.iter().map(|(n, e)| (n.to_string(), e.clone())).collect(),
        vertices: verts
            .iter()
            .enumerate()
            .map(|(i, (s, r))| Vertex { id: i, sig: s.to_string(), rotation: r.clone() })
            .collect(),
        edges: edges.to_vec(),
        dangling: dangling.to_vec(),
        side: BTreeMap::new(),
        scalar: An::one(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<An> {
        v.iter().map(|&x| An::from_int(x)).collect()
    }

    fn self_loop() -> PlanarGrid {
        build_grid(&[("eq2", ints(&[1, 0, 1]))], &[("eq2", vec![0, 1])], &[[0, 1]], &[])
    }

    #[test]
    fn self_loop_value_and_faces() {
        let g = self_loop();
        let v = g.validate().unwrap();
        assert_eq!(v.faces.len(), 2);
        assert!(v.genus_ok);
        assert_eq!(holant_bruteforce(&g).unwrap(), An::from_int(2));
        let s = two_stretch(&g);
        assert_eq!(s.vertices.len(), 2);
        assert_eq!(holant_bruteforce(&s).unwrap(), An::from_int(2));
    }

    #[test]
    fn json_roundtrip() {
        let g = self_loop();
        let text = g.to_json();
        assert_eq!(PlanarGrid::from_json(&text).unwrap(), g);
        let t = r#"{"signatures":{"e":["1","0","1"]},"vertices":[{"id":0,"sig":"e","rotation":[0,1]}],"edges":[[0,1]],"dangling":[],"scalar":"1/2"}"#;
        assert_eq!(holant_bruteforce(&PlanarGrid::from_json(t).unwrap()).unwrap(), An::one());
    }

    #[test]
    fn structure_errors() {
        let bad = build_grid(&[("e", ints(&[1, 0, 1]))], &[("e", vec![0, 1, 2])], &[[0, 1]], &[2]);
        assert!(matches!(bad.check_structure(), Err(GridError::Structure(_))));
        let unmatched = build_grid(&[("e", ints(&[1, 0, 1]))], &[("e", vec![0, 1])], &[], &[0]);
        assert!(matches!(unmatched.check_structure(), Err(GridError::Structure(_))));
    }

    #[test]
    fn too_large() {
        let g = self_loop();
        assert_eq!(holant_bruteforce_capped(&g, 0), Err(GridError::TooLarge { edges: 1, cap: 0 }));
    }

    #[test]
    fn single_vertex_gate() {
        let g = build_grid(&[("f", ints(&[1, 2, 3]))], &[("f", vec![0, 1])], &[], &[0, 1]);
        let gs = gate_signature(&g, DEFAULT_CAP).unwrap();
        assert_eq!(gs.symmetric.unwrap().entries, ints(&[1, 2, 3]));
    }
}
