//! Weighted perfect matchings of plane graphs by Kasteleyn's method.

use super::SolveError;
use crate::algebra::AlgebraicNumber as An;
use crate::grid::{GridError, PlanarGrid, Vertex};
use crate::sigcalc::named;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, VecDeque};

fn one() -> An {
    An::one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub ends: [usize; 2],
    #[serde(default = "one")]
    pub weight: An,
}

/// Edge j owns half-edge 2j at `ends[0]` and 2j+1 at `ends[1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedPlanarGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<WeightedEdge>,
    /// Vertex id -> half-edges counterclockwise.  Missing entries default to
    /// edge order.
    #[serde(default)]
    pub rotation: BTreeMap<usize, Vec<usize>>,
}

impl WeightedPlanarGraph {
    pub fn from_json(text: &str) -> Result<Self, SolveError> {
        let g: Self = serde_json::from_str(text).map_err(|e| SolveError::Parse(e.to_string()))?;
        g.structure()?;
        Ok(g)
    }

    /// Unit weights on the edges of a grid; vertex ids and rotations are kept.
    pub fn from_grid_structure(grid: &PlanarGrid) -> Result<Self, SolveError> {
        let inc = grid.check_structure()?;
        let mut rename = HashMap::new();
        let mut edges = Vec::new();
        for (j, &[a, b]) in grid.edges.iter().enumerate() {
            rename.insert(a, 2 * j);
            rename.insert(b, 2 * j + 1);
            let ends = [grid.vertices[inc.owner[&a].0].id, grid.vertices[inc.owner[&b].0].id];
            edges.push(WeightedEdge { ends, weight: An::one() });
        }
        let rotation = grid.vertices.iter().map(|v| (v.id, v.rotation.iter().map(|h| rename[h]).collect())).collect();
        Ok(WeightedPlanarGraph { vertices: grid.vertices.iter().map(|v| v.id).collect(), edges, rotation })
    }

    fn rotation_of(&self, v: usize) -> Vec<usize> {
        match self.rotation.get(&v) {
            Some(r) => r.clone(),
            None => {
                let mut r = Vec::new();
                for (j, e) in self.edges.iter().enumerate() {
                    for (s, &u) in e.ends.iter().enumerate() {
                        if u == v {
                            r.push(2 * j + s);
                        }
                    }
                }
                r
            }
        }
    }

    /// The structural grid (ExactOne at each vertex): used for faces, the
    /// Euler check, and as an unweighted oracle.
    pub fn structure(&self) -> Result<PlanarGrid, SolveError> {
        let mut g = PlanarGrid::empty();
        let pos: HashMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        if pos.len() != self.vertices.len() {
            return Err(GridError::Structure("duplicate vertex id".into()).into());
        }
        for v in self.rotation.keys() {
            if !pos.contains_key(v) {
                return Err(GridError::Structure(format!("rotation for unknown vertex {v}")).into());
            }
        }
        for (j, e) in self.edges.iter().enumerate() {
            for u in e.ends {
                if !pos.contains_key(&u) {
                    return Err(GridError::Structure(format!("edge {j} uses unknown vertex {u}")).into());
                }
            }
            if e.weight.is_zero() {
                return Err(GridError::Structure(format!("edge {j} has weight 0")).into());
            }
        }
        for &v in &self.vertices {
            let rot = self.rotation_of(v);
            for &h in &rot {
                let j = h / 2;
                if j >= self.edges.len() || self.edges[j].ends[h % 2] != v {
                    return Err(GridError::Structure(format!("half-edge {h} does not belong to vertex {v}")).into());
                }
            }
            let name = format!("eo{}", rot.len());
            g.add_signature(&name, named::exact_one(rot.len()).entries);
            g.vertices.push(Vertex { id: v, sig: name, rotation: rot });
        }
        g.edges = (0..self.edges.len()).map(|j| [2 * j, 2 * j + 1]).collect();
        g.check_structure()?;
        Ok(g)
    }

    /// Each edge subdivided by a weighted equality [1,0,w]; its Holant is the
    /// weighted matching sum.
    pub fn to_weighted_grid(&self) -> Result<PlanarGrid, SolveError> {
        let mut g = self.structure()?;
        let base = 2 * self.edges.len();
        g.edges.clear();
        let mut next_id = g.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
        for (j, e) in self.edges.iter().enumerate() {
            let name = format!("w{j}");
            g.add_signature(&name, vec![An::one(), An::zero(), e.weight.clone()]);
            let (x, y) = (base + 2 * j, base + 2 * j + 1);
            g.vertices.push(Vertex { id: next_id, sig: name, rotation: vec![x, y] });
            next_id += 1;
            g.edges.push([2 * j, x]);
            g.edges.push([y, 2 * j + 1]);
        }
        Ok(g)
    }
}

/// Pfaffian of a skew-symmetric matrix by exact elimination.
pub fn pfaffian(mut a: Vec<Vec<An>>) -> An {
    let n = a.len();
    if n % 2 == 1 {
        return An::zero();
    }
    let mut pf = An::one();
    for k in (0..n).step_by(2) {
        let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return An::zero();
        };
        if j != k + 1 {
            a.swap(k + 1, j);
            for row in a.iter_mut() {
                row.swap(k + 1, j);
            }
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf = &pf * &piv;
        let inv = piv.inv().expect("nonzero pivot");
        for i in k + 2..n {
            let (u, v) = (&a[k + 1][i] * &inv, &a[k][i] * &inv);
            if u.is_zero() && v.is_zero() {
                continue;
            }
            for j in k + 2..n {
                let d = &(&u * &a[k][j]) - &(&v * &a[k + 1][j]);
                if !d.is_zero() {
                    a[i][j] = &a[i][j] + &d;
                }
            }
        }
    }
    pf
}

/// Weighted sum over perfect matchings of the product of matched weights.
pub fn fkt_count_pm(g: &WeightedPlanarGraph) -> Result<An, SolveError> {
    let grid = g.structure()?;
    grid.validate_planar()?;
    if g.vertices.len() % 2 == 1 {
        return Ok(An::zero());
    }
    // Self-loops never take part in a matching.
    let mut grid = grid;
    let loops: Vec<usize> = (0..g.edges.len()).filter(|&j| g.edges[j].ends[0] == g.edges[j].ends[1]).collect();
    if !loops.is_empty() {
        let drop: std::collections::HashSet<usize> = loops.iter().flat_map(|&j| [2 * j, 2 * j + 1]).collect();
        for v in grid.vertices.iter_mut() {
            v.rotation.retain(|h| !drop.contains(h));
        }
        grid.edges.retain(|[a, _]| !drop.contains(a));
    }
    let inc = grid.incidence()?;
    let faces = grid.faces(&inc);
    let mut face_of: HashMap<usize, usize> = HashMap::new();
    for (f, face) in faces.iter().enumerate() {
        for &h in &face.half_edges {
            face_of.insert(h, f);
        }
    }
    let live: Vec<usize> = grid.edges.iter().map(|[a, _]| a / 2).collect();
    let nv = grid.vertices.len();
    let mut adj: Vec<Vec<usize>> = vec![vec![]; nv];
    for &j in &live {
        adj[inc.owner[&(2 * j)].0].push(j);
        adj[inc.owner[&(2 * j + 1)].0].push(j);
    }
    let mut result = An::one();
    for comp in grid.components(&inc) {
        if comp.len() % 2 == 1 {
            return Ok(An::zero());
        }
        // spanning tree by BFS
        let mut in_tree: HashMap<usize, bool> = HashMap::new();
        let mut seen = vec![false; nv];
        seen[comp[0]] = true;
        let mut q = VecDeque::from([comp[0]]);
        let mut comp_edges = Vec::new();
        while let Some(v) = q.pop_front() {
            for &j in &adj[v] {
                if in_tree.contains_key(&j) {
                    continue;
                }
                comp_edges.push(j);
                let w = inc.owner[&(2 * j)].0 ^ inc.owner[&(2 * j + 1)].0 ^ v;
                let tree = !seen[w];
                if tree {
                    seen[w] = true;
                    q.push_back(w);
                }
                in_tree.insert(j, tree);
            }
        }
        // orientation: Some(true) means ends[0] -> ends[1]
        let mut orient: HashMap<usize, bool> = comp_edges.iter().filter(|j| in_tree[j]).map(|&j| (j, true)).collect();
        let comp_faces: Vec<usize> = {
            let mut fs: Vec<usize> = comp_edges.iter().flat_map(|&j| [face_of[&(2 * j)], face_of[&(2 * j + 1)]]).collect();
            fs.sort();
            fs.dedup();
            fs
        };
        if let Some(&root) = comp_faces.first() {
            // dual tree over non-tree edges, rooted at the outer face
            let mut parent_edge: HashMap<usize, usize> = HashMap::new();
            let mut order = vec![root];
            let mut visited: std::collections::HashSet<usize> = [root].into();
            let mut k = 0;
            while k < order.len() {
                let f = order[k];
                k += 1;
                for &h in &faces[f].half_edges {
                    let j = h / 2;
                    if in_tree[&j] {
                        continue;
                    }
                    let other = face_of[&(h ^ 1)];
                    if visited.insert(other) {
                        parent_edge.insert(other, j);
                        order.push(other);
                    }
                }
            }
            for &f in order.iter().skip(1).rev() {
                let pe = parent_edge[&f];
                let mut along = 0;
                let mut hp = None;
                for &h in &faces[f].half_edges {
                    if h / 2 == pe {
                        hp = Some(h);
                        continue;
                    }
                    let o = orient[&(h / 2)];
                    if (h % 2 == 0) == o {
                        along += 1;
                    }
                }
                let hp = hp.expect("parent edge on face");
                // choose pe's direction so the face has an odd number along
                let want_along = along % 2 == 0;
                orient.insert(pe, (hp % 2 == 0) == want_along);
            }
        }
        let idx: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let m = comp.len();
        let mut aw = vec![vec![An::zero(); m]; m];
        let mut a1 = vec![vec![An::zero(); m]; m];
        for &j in &comp_edges {
            let (u, v) = (idx[&inc.owner[&(2 * j)].0], idx[&inc.owner[&(2 * j + 1)].0]);
            let (u, v) = if orient[&j] { (u, v) } else { (v, u) };
            let w = &g.edges[j].weight;
            aw[u][v] = &aw[u][v] + w;
            aw[v][u] = &aw[v][u] - w;
            a1[u][v] = &a1[u][v] + &An::one();
            a1[v][u] = &a1[v][u] - &An::one();
        }
        let p1 = pfaffian(a1);
        if p1.is_zero() {
            return Ok(An::zero());
        }
        let pw = pfaffian(aw);
        let positive = p1.as_rational().map(|r| r > num_rational::BigRational::from_integer(0.into())).unwrap_or(true);
        result = &result * &if positive { pw } else { -pw };
    }
    Ok(result)
}
