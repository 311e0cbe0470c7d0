//! Gen-Eq and ExactOne signatures joined by disequalities: local rewriting,
//! E-block formation, and pinned edges located in a relaxed instance.
//!
//! Internally every link is a disequality between two ports.  A block (a
//! merged E-block) has a free bit sigma; its port r carries sigma ^ sign(r) and
//! the block weighs w[sigma].  An ExactOne node carries a weight per port: the
//! weight of the unique port set to 1.

use super::{two_pow, ParityUf, SolveError};
use crate::algebra::AlgebraicNumber as An;
use crate::grid::{GridError, PlanarGrid, Side, Vertex};
use crate::sigcalc::{named, z_hat, SymmetricSignature};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

fn one() -> An {
    An::one()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EoSig {
    /// [a,0,...,0,b] on all ports; arity one gives the unary [a,b].
    GenEq { a: An, b: An },
    /// weight * ExactOne
    ExactOne { weight: An },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EoNode {
    pub sig: EoSig,
    /// Half-edge ids, counterclockwise.
    pub ports: Vec<usize>,
}

/// Right-hand side signatures with the left-hand disequalities written as links.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EoInstance {
    pub nodes: Vec<EoNode>,
    pub links: Vec<[usize; 2]>,
    #[serde(default = "one")]
    pub scalar: An,
}

enum Rhs {
    Zero,
    Const(An),
    Sig(EoSig),
}

fn rhs(f: &SymmetricSignature) -> Option<Rhs> {
    let n = f.arity();
    let e = &f.entries;
    if f.is_zero() {
        return Some(Rhs::Zero);
    }
    if n == 0 {
        return Some(Rhs::Const(e[0].clone()));
    }
    if e[1..n].iter().all(|x| x.is_zero()) {
        return Some(Rhs::Sig(EoSig::GenEq { a: e[0].clone(), b: e[n].clone() }));
    }
    if n >= 2 && e.iter().enumerate().all(|(k, x)| k == 1 || x.is_zero()) {
        return Some(Rhs::Sig(EoSig::ExactOne { weight: e[1].clone() }));
    }
    None
}

fn is_diseq(f: &SymmetricSignature) -> bool {
    f.arity() == 2 && f.entries[0].is_zero() && f.entries[2].is_zero()
}

impl EoInstance {
    /// From a grid whose left side is all disequalities; sides come from the
    /// grid's tags, or from a 2-colouring when untagged.
    pub fn from_grid(grid: &PlanarGrid) -> Result<Self, SolveError> {
        let inc = grid.check_structure()?;
        if !grid.dangling.is_empty() {
            return Err(GridError::Structure("grid has dangling edges".into()).into());
        }
        let sigs: Vec<Option<SymmetricSignature>> =
            (0..grid.vertices.len()).map(|v| grid.vertex_sig(v).map(|s| s.as_symmetric())).collect::<Result<_, _>>()?;
        let nv = grid.vertices.len();
        let other = |h: usize| inc.owner[&inc.twin[&h].expect("closed")].0;
        let left: Vec<bool> = if !grid.side.is_empty() {
            grid.vertices.iter().map(|v| grid.side.get(&v.id) == Some(&Side::L)).collect()
        } else {
            let mut colour: Vec<Option<bool>> = vec![None; nv];
            let mut left = vec![false; nv];
            for s in 0..nv {
                if colour[s].is_some() {
                    continue;
                }
                colour[s] = Some(false);
                let mut comp = vec![s];
                let mut q = VecDeque::from([s]);
                while let Some(v) = q.pop_front() {
                    for &h in &grid.vertices[v].rotation {
                        let w = other(h);
                        match colour[w] {
                            None => {
                                colour[w] = Some(!colour[v].unwrap());
                                comp.push(w);
                                q.push_back(w);
                            }
                            Some(c) if c == colour[v].unwrap() => {
                                return Err(SolveError::Class("grid is not bipartite".into()));
                            }
                            _ => {}
                        }
                    }
                }
                let diseq = |c: bool| comp.iter().filter(|&&v| colour[v] == Some(c)).all(|&v| sigs[v].as_ref().is_some_and(is_diseq));
                let pick = if diseq(false) {
                    false
                } else if diseq(true) {
                    true
                } else {
                    return Err(SolveError::Class("no side of the grid is all disequalities".into()));
                };
                for v in comp {
                    left[v] = colour[v] == Some(pick);
                }
            }
            left
        };
        let mut inst = EoInstance { nodes: vec![], links: vec![], scalar: grid.scalar.clone() };
        for v in 0..nv {
            let f = sigs[v]
                .clone()
                .ok_or_else(|| SolveError::Class(format!("vertex {} has a non-symmetric signature", grid.vertices[v].id)))?;
            let rot = &grid.vertices[v].rotation;
            if left[v] {
                if !is_diseq(&f) {
                    return Err(SolveError::Class(format!("left vertex {} is not a disequality", grid.vertices[v].id)));
                }
                let ends: Vec<usize> = rot.iter().map(|h| inc.twin[h].unwrap()).collect();
                if ends.iter().any(|&h| left[inc.owner[&h].0]) {
                    return Err(SolveError::Class("two left vertices are adjacent".into()));
                }
                inst.scalar = &inst.scalar * &f.entries[1];
                inst.links.push([ends[0], ends[1]]);
            } else {
                inst.push_rhs(&f, rot, grid.vertices[v].id)?;
            }
        }
        Ok(inst)
    }

    /// Holant(=2 | F) with F in ZP and M4: f-hat = Z^{-1} f (reversed for the
    /// minus family), every edge becoming a disequality, times 2^|E|.
    pub fn from_z_grid(grid: &PlanarGrid, plus: bool) -> Result<Self, SolveError> {
        let sigs = super::closed_symmetric(grid)?;
        let mut inst = EoInstance {
            nodes: vec![],
            links: grid.edges.clone(),
            scalar: &grid.scalar * &two_pow(grid.edges.len()),
        };
        for (v, f) in sigs.iter().enumerate() {
            let mut h = z_hat(f);
            if !plus {
                h = h.reversed();
            }
            inst.push_rhs(&h, &grid.vertices[v].rotation, grid.vertices[v].id)?;
        }
        Ok(inst)
    }

    fn push_rhs(&mut self, f: &SymmetricSignature, rot: &[usize], id: usize) -> Result<(), SolveError> {
        match rhs(f) {
            Some(Rhs::Zero) => {
                self.scalar = An::zero();
                self.nodes.push(EoNode { sig: EoSig::GenEq { a: An::zero(), b: An::zero() }, ports: rot.to_vec() });
            }
            Some(Rhs::Const(c)) => self.scalar = &self.scalar * &c,
            Some(Rhs::Sig(s)) => self.nodes.push(EoNode { sig: s, ports: rot.to_vec() }),
            None => return Err(SolveError::Class(format!("vertex {id} is neither Gen-Eq nor ExactOne"))),
        }
        Ok(())
    }

    /// gcd of the arities of the Gen-Eq nodes with both weights nonzero and
    /// arity at least 2 (0 if there are none).
    pub fn k(&self) -> usize {
        self.nodes
            .iter()
            .filter_map(|n| match &n.sig {
                EoSig::GenEq { a, b } if n.ports.len() >= 2 && !a.is_zero() && !b.is_zero() => Some(n.ports.len()),
                _ => None,
            })
            .fold(0, |g, d| g.gcd(&d))
    }

    /// The disequality-bipartite grid: every link becomes a [0,1,0] vertex.
    pub fn to_grid(&self) -> PlanarGrid {
        let mut g = PlanarGrid::empty();
        g.scalar = self.scalar.clone();
        let mut next = self.nodes.iter().flat_map(|n| n.ports.iter().copied()).chain(self.links.iter().flatten().copied()).max().map_or(0, |m| m + 1);
        let mut id = 0;
        for n in &self.nodes {
            let d = n.ports.len();
            let (name, entries) = match &n.sig {
                EoSig::GenEq { a, b } => (format!("eq{d}:{a}:{b}"), named::gen_eq(a.clone(), b.clone(), d).entries),
                EoSig::ExactOne { weight } => (format!("eo{d}:{weight}"), named::exact_one(d).scale(weight).entries),
            };
            g.signatures.insert(name.clone(), entries);
            g.vertices.push(Vertex { id, sig: name, rotation: n.ports.clone() });
            g.side.insert(id, Side::R);
            id += 1;
        }
        g.signatures.insert("neq".into(), named::disequality().entries);
        for &[a, b] in &self.links {
            g.vertices.push(Vertex { id, sig: "neq".into(), rotation: vec![next, next + 1] });
            g.side.insert(id, Side::L);
            g.edges.push([a, next]);
            g.edges.push([next + 1, b]);
            next += 2;
            id += 1;
        }
        g
    }

    /// E-blocks: Gen-Eq nodes merged along disequality links.
    pub fn eblocks(&self) -> Result<Vec<EBlock>, SolveError> {
        let (mut st, orig) = State::build(self)?;
        let mut trivial: HashSet<usize> = HashSet::new();
        'outer: loop {
            for x in 0..st.nodes.len() {
                if !st.nodes[x].alive || !st.is_block(x) {
                    continue;
                }
                for p in st.nodes[x].rot.clone() {
                    let q = st.ports[p].twin;
                    let y = st.ports[q].node;
                    if y == x {
                        if st.ports[p].sign == st.ports[q].sign {
                            trivial.insert(x);
                        }
                        st.remove_port(x, p);
                        st.remove_port(x, q);
                        continue 'outer;
                    }
                    if st.is_block(y) {
                        if trivial.remove(&y) {
                            trivial.insert(x);
                        }
                        st.merge_blocks(x, p, y, q);
                        continue 'outer;
                    }
                }
            }
            break;
        }
        let mut out = Vec::new();
        for (x, n) in st.nodes.iter().enumerate() {
            if let (true, Kind::Block(w)) = (n.alive, &n.kind) {
                out.push(EBlock {
                    members: n.members.clone(),
                    ports: n.rot.iter().map(|&p| orig[p]).collect(),
                    signs: n.rot.iter().map(|&p| st.ports[p].sign).collect(),
                    weights: w.clone(),
                    trivial: trivial.contains(&x),
                });
            }
        }
        Ok(out)
    }
}

/// A connected component of Gen-Eq nodes and disequality links.  Port r
/// takes sigma ^ signs[r]; the two support vectors weigh weights[sigma].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EBlock {
    pub members: Vec<usize>,
    pub ports: Vec<usize>,
    pub signs: Vec<bool>,
    pub weights: [An; 2],
    /// The disequality graph on the members is not bipartite: no support.
    pub trivial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PinRule {
    /// ExactOne with a self-loop: its other edges are 0.
    SelfLoop,
    /// ExactOne pair joined twice: their other edges are 0.
    DoubleLink,
    /// Block and ExactOne joined twice.
    Parallel,
    /// A cycle through ExactOne nodes in the relaxed instance.
    RelaxedCycle,
    /// Parallel edges after contracting ExactOne trees in the relaxed instance.
    RelaxedParallel,
    /// A wheel whose outer block has differing signs along the rim.
    WheelSigns,
    WheelType1,
    WheelType2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinRecord {
    pub half_edge: usize,
    pub value: bool,
    pub rule: PinRule,
    /// Number of enclosing branches; pins at depth 0 hold in the input.
    pub depth: usize,
}

#[derive(Clone, Debug, Default)]
pub struct EoOptions {
    /// Re-evaluate scalar * residual by brute force after every step.
    pub check: bool,
    /// Largest residual (in links) checked.
    pub check_limit: usize,
    /// Skip the gcd >= 5 precondition.
    pub any_gcd: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct EoReport {
    pub k: usize,
    pub steps: usize,
    pub pins: Vec<PinRecord>,
    pub fallbacks: usize,
    pub checks: usize,
    pub violations: Vec<String>,
}

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Port {
    node: usize,
    twin: usize,
    sign: bool,
    lambda: An,
    val: Option<bool>,
}

#[derive(Clone, Debug)]
enum Kind {
    Block([An; 2]),
    Eo,
}

#[derive(Clone, Debug)]
struct Node {
    kind: Kind,
    rot: Vec<usize>,
    alive: bool,
    members: Vec<usize>,
}

#[derive(Clone, Debug)]
struct State {
    ports: Vec<Port>,
    nodes: Vec<Node>,
    scalar: An,
    queue: Vec<(usize, bool)>,
}

enum Step {
    Zero,
    Progress,
    Stuck,
}

impl State {
    fn build(inst: &EoInstance) -> Result<(State, Vec<usize>), SolveError> {
        let mut idx: HashMap<usize, usize> = HashMap::new();
        let mut orig = Vec::new();
        let mut ports = Vec::new();
        let mut nodes = Vec::new();
        for (x, n) in inst.nodes.iter().enumerate() {
            let (kind, lambda) = match &n.sig {
                EoSig::GenEq { a, b } => (Kind::Block([a.clone(), b.clone()]), An::one()),
                EoSig::ExactOne { weight } => (Kind::Eo, weight.clone()),
            };
            let mut rot = Vec::new();
            for &h in &n.ports {
                if idx.insert(h, orig.len()).is_some() {
                    return Err(GridError::Structure(format!("half-edge {h} appears twice")).into());
                }
                rot.push(orig.len());
                orig.push(h);
                ports.push(Port { node: x, twin: NONE, sign: false, lambda: lambda.clone(), val: None });
            }
            nodes.push(Node { kind, rot, alive: true, members: vec![x] });
        }
        for &[a, b] in &inst.links {
            let (Some(&i), Some(&j)) = (idx.get(&a), idx.get(&b)) else {
                return Err(GridError::Structure(format!("link {a}-{b} uses an unknown half-edge")).into());
            };
            if i == j || ports[i].twin != NONE || ports[j].twin != NONE {
                return Err(GridError::Structure(format!("half-edge in link {a}-{b} is linked twice")).into());
            }
            ports[i].twin = j;
            ports[j].twin = i;
        }
        if let Some(p) = ports.iter().position(|p| p.twin == NONE) {
            return Err(GridError::Structure(format!("half-edge {} is not linked", orig[p])).into());
        }
        Ok((State { ports, nodes, scalar: inst.scalar.clone(), queue: vec![] }, orig))
    }

    fn is_block(&self, x: usize) -> bool {
        matches!(self.nodes[x].kind, Kind::Block(_))
    }

    fn owner(&self, p: usize) -> usize {
        self.ports[p].node
    }

    fn twin(&self, p: usize) -> usize {
        self.ports[p].twin
    }

    fn weights(&self, x: usize) -> [An; 2] {
        match &self.nodes[x].kind {
            Kind::Block(w) => w.clone(),
            Kind::Eo => unreachable!("not a block"),
        }
    }

    fn kill(&mut self, x: usize) {
        self.nodes[x].alive = false;
        self.nodes[x].rot.clear();
    }

    fn remove_port(&mut self, x: usize, p: usize) {
        let r = &mut self.nodes[x].rot;
        let i = r.iter().position(|&q| q == p).expect("port on node");
        r.remove(i);
    }

    fn mul(&mut self, c: &An) {
        self.scalar = &self.scalar * c;
    }

    fn push_set(&mut self, p: usize, v: bool) {
        self.queue.push((p, v));
        self.queue.push((self.twin(p), !v));
    }

    fn fix_block(&mut self, x: usize, sigma: bool) {
        let w = self.weights(x);
        self.mul(&w[sigma as usize]);
        for r in self.nodes[x].rot.clone() {
            let v = sigma ^ self.ports[r].sign;
            self.ports[r].val = Some(v);
            self.queue.push((self.twin(r), !v));
        }
        self.kill(x);
    }

    /// Kill an ExactOne node whose active port is among `keep`, setting its
    /// other ports to 0; returns those ports.
    fn zero_rest(&mut self, x: usize, keep: &[usize]) -> Vec<usize> {
        let rest: Vec<usize> = self.nodes[x].rot.iter().copied().filter(|r| !keep.contains(r)).collect();
        for &r in &rest {
            self.ports[r].val = Some(false);
            self.queue.push((self.twin(r), true));
        }
        self.kill(x);
        rest
    }

    /// Applies queued values; false on a contradiction.
    fn propagate(&mut self) -> bool {
        while let Some((p, v)) = self.queue.pop() {
            if let Some(u) = self.ports[p].val {
                if u != v {
                    return false;
                }
                continue;
            }
            let x = self.owner(p);
            match self.nodes[x].kind {
                Kind::Block(_) => {
                    self.fix_block(x, v ^ self.ports[p].sign);
                }
                Kind::Eo => {
                    self.ports[p].val = Some(v);
                    if v {
                        let l = self.ports[p].lambda.clone();
                        self.mul(&l);
                        self.zero_rest(x, &[p]);
                    } else {
                        self.remove_port(x, p);
                        if self.nodes[x].rot.is_empty() {
                            return false;
                        }
                    }
                }
            }
            if self.scalar.is_zero() {
                return false;
            }
        }
        true
    }

    /// Replace p's node by q's ports, spliced in at p.
    fn splice(&mut self, x: usize, p: usize, y: usize, q: usize) {
        let ry = std::mem::take(&mut self.nodes[y].rot);
        let k = ry.iter().position(|&r| r == q).expect("q on y");
        let seq: Vec<usize> = (1..ry.len()).map(|i| ry[(k + i) % ry.len()]).collect();
        for &r in &seq {
            self.ports[r].node = x;
        }
        let members = std::mem::take(&mut self.nodes[y].members);
        self.nodes[x].members.extend(members);
        let rx = &mut self.nodes[x].rot;
        let j = rx.iter().position(|&r| r == p).expect("p on x");
        rx.splice(j..=j, seq);
        self.kill(y);
    }

    fn merge_blocks(&mut self, x: usize, p: usize, y: usize, q: usize) {
        let t = self.ports[p].sign ^ self.ports[q].sign ^ true;
        let (wx, wy) = (self.weights(x), self.weights(y));
        let w = [&wx[0] * &wy[t as usize], &wx[1] * &wy[!t as usize]];
        for r in self.nodes[y].rot.clone() {
            self.ports[r].sign ^= t;
        }
        self.nodes[x].kind = Kind::Block(w);
        self.splice(x, p, y, q);
    }

    fn merge_eos(&mut self, x: usize, p: usize, y: usize, q: usize) {
        let (lp, lq) = (self.ports[p].lambda.clone(), self.ports[q].lambda.clone());
        for r in self.nodes[x].rot.clone() {
            if r != p {
                self.ports[r].lambda = &self.ports[r].lambda * &lq;
            }
        }
        for r in self.nodes[y].rot.clone() {
            if r != q {
                self.ports[r].lambda = &self.ports[r].lambda * &lp;
            }
        }
        self.splice(x, p, y, q);
    }

    /// Remove binary node x (ports p0, p1); its neighbours a, b become linked
    /// with weight c[value of a].
    fn bridge(&mut self, x: usize, p0: usize, p1: usize, c: [An; 2]) {
        let (a, b) = (self.twin(p0), self.twin(p1));
        self.kill(x);
        self.ports[a].twin = b;
        self.ports[b].twin = a;
        let (ya, yb) = (self.owner(a), self.owner(b));
        if self.is_block(ya) {
            let s = self.ports[a].sign as usize;
            let w = self.weights(ya);
            self.nodes[ya].kind = Kind::Block([&w[0] * &c[s], &w[1] * &c[1 ^ s]]);
        } else if self.is_block(yb) {
            let s = self.ports[b].sign as usize;
            let w = self.weights(yb);
            self.nodes[yb].kind = Kind::Block([&w[0] * &c[1 ^ s], &w[1] * &c[s]]);
        } else {
            self.ports[a].lambda = &self.ports[a].lambda * &c[1];
            self.ports[b].lambda = &self.ports[b].lambda * &c[0];
        }
    }
}

struct Run<'a> {
    orig: &'a [usize],
    opts: &'a EoOptions,
    report: EoReport,
}

impl Run<'_> {
    fn pin(&mut self, st: &mut State, p: usize, v: bool, rule: PinRule, depth: usize) {
        self.report.pins.push(PinRecord { half_edge: self.orig[p], value: v, rule, depth });
        st.push_set(p, v);
    }

    fn record_zeros(&mut self, ps: &[usize], rule: PinRule, depth: usize) {
        for &p in ps {
            self.report.pins.push(PinRecord { half_edge: self.orig[p], value: false, rule, depth });
        }
    }

    /// One local rewrite at node x, if any applies.
    fn rule_at(&mut self, st: &mut State, x: usize, depth: usize) -> Step {
        let rot = st.nodes[x].rot.clone();
        match st.nodes[x].kind.clone() {
            Kind::Block(w) => {
                if w[0].is_zero() && w[1].is_zero() {
                    return Step::Zero;
                }
                if rot.is_empty() {
                    st.mul(&(&w[0] + &w[1]));
                    st.kill(x);
                    return Step::Progress;
                }
                if w[0].is_zero() || w[1].is_zero() {
                    st.fix_block(x, w[0].is_zero());
                    return Step::Progress;
                }
                for &p in &rot {
                    let q = st.twin(p);
                    if st.owner(q) == x {
                        if st.ports[p].sign == st.ports[q].sign {
                            return Step::Zero;
                        }
                        st.remove_port(x, p);
                        st.remove_port(x, q);
                        return Step::Progress;
                    }
                }
                for &p in &rot {
                    let q = st.twin(p);
                    let y = st.owner(q);
                    if st.is_block(y) {
                        st.merge_blocks(x, p, y, q);
                        return Step::Progress;
                    }
                }
                if rot.len() == 2 && st.ports[rot[0]].sign != st.ports[rot[1]].sign {
                    let s0 = st.ports[rot[0]].sign as usize;
                    let c = [w[1 ^ s0].clone(), w[s0].clone()];
                    st.bridge(x, rot[0], rot[1], c);
                    return Step::Progress;
                }
                Step::Stuck
            }
            Kind::Eo => {
                match rot.len() {
                    0 => return Step::Zero,
                    1 => {
                        st.push_set(rot[0], true);
                        return Step::Progress;
                    }
                    _ => {}
                }
                for &p in &rot {
                    let q = st.twin(p);
                    if st.owner(q) == x {
                        let s = &st.ports[p].lambda + &st.ports[q].lambda;
                        st.mul(&s);
                        let z = st.zero_rest(x, &[p, q]);
                        self.record_zeros(&z, PinRule::SelfLoop, depth);
                        return Step::Progress;
                    }
                }
                if rot.len() == 2 {
                    let c = [st.ports[rot[0]].lambda.clone(), st.ports[rot[1]].lambda.clone()];
                    st.bridge(x, rot[0], rot[1], c);
                    return Step::Progress;
                }
                let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for &p in &rot {
                    groups.entry(st.owner(st.twin(p))).or_default().push(p);
                }
                for (y, ps) in groups {
                    if !st.is_block(y) {
                        match ps.len() {
                            1 => st.merge_eos(x, ps[0], y, st.twin(ps[0])),
                            2 => {
                                let (p1, p2) = (ps[0], ps[1]);
                                let (q1, q2) = (st.twin(p1), st.twin(p2));
                                let l = |r: usize| st.ports[r].lambda.clone();
                                let s = &(&l(p1) * &l(q2)) + &(&l(p2) * &l(q1));
                                st.mul(&s);
                                let mut z = st.zero_rest(x, &[p1, p2]);
                                z.extend(st.zero_rest(y, &[q1, q2]));
                                self.record_zeros(&z, PinRule::DoubleLink, depth);
                            }
                            _ => return Step::Zero,
                        }
                        return Step::Progress;
                    }
                    if ps.len() >= 2 {
                        let (q1, q2) = (ps[0], ps[1]);
                        if st.ports[st.twin(q1)].sign == st.ports[st.twin(q2)].sign {
                            self.pin(st, q1, false, PinRule::Parallel, depth);
                        } else {
                            let r = *rot.iter().find(|&&r| r != q1 && r != q2).expect("degree at least 3");
                            self.pin(st, r, false, PinRule::Parallel, depth);
                        }
                        return Step::Progress;
                    }
                }
                Step::Stuck
            }
        }
    }

    fn check(&mut self, st: &State, expected: &mut Option<An>) {
        if !self.opts.check {
            return;
        }
        let Some(v) = residual_bruteforce(st, self.opts.check_limit) else { return };
        let cur = &st.scalar * &v;
        self.report.checks += 1;
        match expected {
            Some(e) if *e != cur => {
                self.report.violations.push(format!("step {}: expected {e}, got {cur}", self.report.steps));
                *expected = Some(cur);
            }
            Some(_) => {}
            None => *expected = Some(cur),
        }
    }

    fn solve(&mut self, mut st: State, depth: usize) -> An {
        let mut expected: Option<An> = None;
        let n = st.nodes.len();
        let mut cursor = 0;
        loop {
            if !st.propagate() {
                return An::zero();
            }
            if st.scalar.is_zero() {
                return An::zero();
            }
            self.check(&st, &mut expected);
            let mut progressed = false;
            for i in 0..n {
                let x = (cursor + i) % n;
                if !st.nodes[x].alive {
                    continue;
                }
                match self.rule_at(&mut st, x, depth) {
                    Step::Zero => {
                        if let Some(e) = &expected {
                            if self.opts.check && !e.is_zero() {
                                self.report.violations.push(format!("step {}: contradiction but value {e}", self.report.steps));
                            }
                        }
                        return An::zero();
                    }
                    Step::Progress => {
                        cursor = x;
                        progressed = true;
                        break;
                    }
                    Step::Stuck => {}
                }
            }
            self.report.steps += 1;
            if progressed {
                continue;
            }
            if st.nodes.iter().all(|nd| !nd.alive) {
                return st.scalar;
            }
            if let Some((p, v, rule)) = find_pin(&st) {
                self.pin(&mut st, p, v, rule, depth);
                continue;
            }
            // no pin located: branch, exactly
            self.report.fallbacks += 1;
            let blocks: Vec<usize> = (0..n).filter(|&x| st.nodes[x].alive && st.is_block(x)).collect();
            let mut total = An::zero();
            for v in [false, true] {
                let mut b = st.clone();
                match blocks.iter().max_by_key(|&&x| (st.nodes[x].rot.len(), std::cmp::Reverse(x))) {
                    Some(&x) => b.fix_block(x, v),
                    None => {
                        let x = (0..n).find(|&x| st.nodes[x].alive).expect("alive node");
                        b.push_set(st.nodes[x].rot[0], v);
                    }
                }
                total = &total + &self.solve(b, depth + 1);
            }
            return total;
        }
    }
}

/// Exact residual value by enumeration over live links (None if too big).
fn residual_bruteforce(st: &State, limit: usize) -> Option<An> {
    let live: Vec<usize> = st.nodes.iter().filter(|n| n.alive).flat_map(|n| n.rot.iter().copied()).collect();
    let pairs: Vec<usize> = live.iter().copied().filter(|&p| p < st.twin(p)).collect();
    if pairs.len() > limit || pairs.len() > 24 {
        return None;
    }
    let mut val: HashMap<usize, bool> = HashMap::new();
    let mut total = An::zero();
    for m in 0u64..1 << pairs.len() {
        for (i, &p) in pairs.iter().enumerate() {
            let b = (m >> i) & 1 == 1;
            val.insert(p, b);
            val.insert(st.twin(p), !b);
        }
        let mut prod = st.scalar.clone() / st.scalar.clone();
        for nd in st.nodes.iter().filter(|n| n.alive) {
            let term = match &nd.kind {
                Kind::Block(w) => match nd.rot.first() {
                    None => &w[0] + &w[1],
                    Some(&r0) => {
                        let sigma = val[&r0] ^ st.ports[r0].sign;
                        if nd.rot.iter().all(|&r| val[&r] == sigma ^ st.ports[r].sign) {
                            w[sigma as usize].clone()
                        } else {
                            An::zero()
                        }
                    }
                },
                Kind::Eo => {
                    let ones: Vec<usize> = nd.rot.iter().copied().filter(|r| val[r]).collect();
                    if ones.len() == 1 {
                        st.ports[ones[0]].lambda.clone()
                    } else {
                        An::zero()
                    }
                }
            };
            prod = &prod * &term;
            if prod.is_zero() {
                break;
            }
        }
        total = &total + &prod;
    }
    Some(total)
}

/// A pinned edge of the relaxed instance, given as (ExactOne port, value).
fn find_pin(st: &State) -> Option<(usize, bool, PinRule)> {
    let n = st.nodes.len();
    let mut relaxed: Vec<(usize, usize)> = Vec::new();
    let mut big: Vec<usize> = Vec::new();
    for x in (0..n).filter(|&x| st.nodes[x].alive) {
        if !st.is_block(x) {
            continue;
        }
        let rot = &st.nodes[x].rot;
        let neighbours_eo = rot.iter().all(|&p| !st.is_block(st.owner(st.twin(p))));
        let plus = rot.iter().filter(|&&p| st.ports[p].sign).count();
        if rot.len() == 4 && plus == 2 && neighbours_eo {
            let s = |i: usize| st.ports[rot[i]].sign;
            let pairs = if s(0) != s(1) { [(0, 1), (2, 3)] } else { [(1, 2), (3, 0)] };
            for (i, j) in pairs {
                relaxed.push((st.twin(rot[i]), st.twin(rot[j])));
            }
        } else {
            big.push(x);
        }
    }
    // cycles among ExactOne nodes
    let mut uf = ParityUf::new(n);
    let mut adj: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
    let mut forest: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &relaxed {
        let (u, v) = (st.owner(a), st.owner(b));
        if uf.find(u).0 == uf.find(v).0 {
            let mut cycle_ports = vec![a];
            if u == v {
                cycle_ports.push(b);
            } else {
                // BFS in the forest from v to u; the last edge's port at u
                let mut prev: HashMap<usize, usize> = HashMap::from([(v, NONE)]);
                let mut q = VecDeque::from([v]);
                while let Some(z) = q.pop_front() {
                    for &(w, _, pw) in adj.get(&z).map(|e| e.as_slice()).unwrap_or(&[]) {
                        if let std::collections::hash_map::Entry::Vacant(e) = prev.entry(w) {
                            e.insert(pw);
                            q.push_back(w);
                        }
                    }
                }
                cycle_ports.push(prev[&u]);
            }
            let r = st.nodes[u].rot.iter().copied().find(|r| !cycle_ports.contains(r))?;
            return Some((r, false, PinRule::RelaxedCycle));
        }
        uf.union(u, v, 0);
        adj.entry(u).or_default().push((v, a, b));
        adj.entry(v).or_default().push((u, b, a));
        forest.push((a, b));
    }
    // contract ExactOne trees into super nodes
    let mut sup: Vec<usize> = (0..n).collect();
    fn root(sup: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while sup[r] != r {
            r = sup[r];
        }
        let mut y = x;
        while sup[y] != r {
            let z = sup[y];
            sup[y] = r;
            y = z;
        }
        r
    }
    let mut srot: HashMap<usize, Vec<usize>> =
        (0..n).filter(|&x| st.nodes[x].alive && !st.is_block(x)).map(|x| (x, st.nodes[x].rot.clone())).collect();
    for &(a, b) in &forest {
        let (ru, rv) = (root(&mut sup, st.owner(a)), root(&mut sup, st.owner(b)));
        let rv_rot = srot.remove(&rv).expect("super rotation");
        let k = rv_rot.iter().position(|&r| r == b)?;
        let seq: Vec<usize> = (1..rv_rot.len()).map(|i| rv_rot[(k + i) % rv_rot.len()]).collect();
        let ru_rot = srot.get_mut(&ru).expect("super rotation");
        let j = ru_rot.iter().position(|&r| r == a)?;
        ru_rot.splice(j..=j, seq);
        sup[rv] = ru;
    }
    let mut pos: HashMap<usize, (usize, usize)> = HashMap::new();
    for (&s, rot) in &srot {
        for (i, &p) in rot.iter().enumerate() {
            pos.insert(p, (s, i));
        }
    }
    for &x in &big {
        for &p in &st.nodes[x].rot {
            if !pos.contains_key(&st.twin(p)) {
                return None;
            }
        }
    }
    // parallel edges between a block and a super node
    for &x in &big {
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for &p in &st.nodes[x].rot {
            let s = pos[&st.twin(p)].0;
            if let Some(&p0) = seen.get(&s) {
                let (e1, e2) = (st.twin(p0), st.twin(p));
                if st.ports[p0].sign == st.ports[p].sign {
                    return Some((e1, false, PinRule::RelaxedParallel));
                }
                let z = srot[&s].iter().copied().find(|&z| z != e1 && z != e2)?;
                return Some((z, false, PinRule::RelaxedParallel));
            }
            seen.insert(s, p);
        }
    }
    // wheels around a degree-5 block
    let big_set: HashSet<usize> = big.iter().copied().collect();
    let ssucc = |p: usize| {
        let (s, i) = pos[&p];
        let r = &srot[&s];
        r[(i + 1) % r.len()]
    };
    let bsucc = |p: usize| {
        let r = &st.nodes[st.owner(p)].rot;
        let i = r.iter().position(|&q| q == p).unwrap();
        r[(i + 1) % r.len()]
    };
    'centre: for &x in &big {
        let h = &st.nodes[x].rot;
        if h.len() != 5 || h.iter().any(|&p| st.ports[p].sign != st.ports[h[0]].sign) {
            continue;
        }
        let mut a = [0; 5];
        let mut b = [0; 5];
        let mut c = [0; 5];
        let mut deg = [0; 5];
        for j in 0..5 {
            a[j] = st.twin(h[j]);
            b[j] = ssucc(a[j]);
            let xb = st.twin(b[j]);
            if !big_set.contains(&st.owner(xb)) {
                continue 'centre;
            }
            c[j] = bsucc(xb);
            let d = st.twin(c[j]);
            if !pos.contains_key(&d) || st.twin(ssucc(d)) != h[(j + 4) % 5] {
                continue 'centre;
            }
            deg[j] = srot[&pos[&a[j]].0].len();
        }
        let threes = deg.iter().filter(|&&d| d == 3).count();
        if threes < 4 {
            continue;
        }
        if (0..5).any(|j| st.ports[st.twin(b[j])].sign != st.ports[c[j]].sign) {
            return Some((a[0], false, PinRule::WheelSigns));
        }
        if threes == 5 {
            return Some((a[0], true, PinRule::WheelType1));
        }
        let s = (0..5).find(|&j| deg[j] != 3).unwrap();
        return Some((b[s], false, PinRule::WheelType2));
    }
    None
}

/// Exact value of an instance with equality gcd at least 5 (or none).
pub fn eo_geneq_eval(inst: &EoInstance) -> Result<An, SolveError> {
    eo_geneq_eval_with(inst, &EoOptions::default()).map(|(v, _)| v)
}

pub fn eo_geneq_eval_with(inst: &EoInstance, opts: &EoOptions) -> Result<(An, EoReport), SolveError> {
    let k = inst.k();
    if !opts.any_gcd && k != 0 && k < 5 {
        return Err(SolveError::Gcd(k));
    }
    inst.to_grid().validate_planar()?;
    let (st, orig) = State::build(inst)?;
    let mut run = Run { orig: &orig, opts, report: EoReport { k, ..Default::default() } };
    let v = if st.scalar.is_zero() { An::zero() } else { run.solve(st, 0) };
    Ok((v, run.report))
}
