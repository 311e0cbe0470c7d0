//! Affine grids: a global system of F2 constraints and a quadratic exponent
//! mod 4, summed by eliminating one variable at a time.

use super::{closed_symmetric, edge_index, SolveError};
use crate::algebra::AlgebraicNumber as An;
use crate::classify::in_a;
use crate::grid::PlanarGrid;
use crate::sigcalc::SymmetricSignature;
use std::collections::BTreeSet;

/// Support and exponent of a symmetric affine signature on its own ports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AffineShape {
    /// every input equals the bit
    Const(u8),
    /// all inputs equal, exponent r * x1
    AllEqual(u8),
    /// sum of inputs = odd (mod 2), exponent a * sum
    Parity { odd: bool, a: u8 },
    /// no constraint, exponent a * sum + 2b * sum_{i<j} x_i x_j
    Free { a: u8, b: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub lambda: An,
    pub shape: AffineShape,
}

fn shape_entry(s: AffineShape, n: usize, w: usize) -> Option<u8> {
    let c2 = (w * w.saturating_sub(1) / 2) as u64;
    match s {
        AffineShape::Const(c) => (w == c as usize * n).then_some(0),
        AffineShape::AllEqual(r) => {
            if w == 0 {
                Some(0)
            } else if w == n {
                Some(r % 4)
            } else {
                None
            }
        }
        AffineShape::Parity { odd, a } => ((w % 2 == 1) == odd).then_some(((a as u64 * w as u64) % 4) as u8),
        AffineShape::Free { a, b } => Some(((a as u64 * w as u64 + 2 * b as u64 * c2) % 4) as u8),
    }
}

fn shapes() -> Vec<AffineShape> {
    let mut v = vec![AffineShape::Const(0), AffineShape::Const(1)];
    for r in 0..4 {
        v.push(AffineShape::AllEqual(r));
    }
    for a in 0..4 {
        for odd in [false, true] {
            v.push(AffineShape::Parity { odd, a });
        }
        for b in [false, true] {
            v.push(AffineShape::Free { a, b });
        }
    }
    v
}

/// The form lambda * chi * i^Q of a nonzero symmetric signature, if affine.
pub fn affine_form(f: &SymmetricSignature) -> Option<AffineForm> {
    let n = f.arity();
    let k = f.entries.iter().position(|x| !x.is_zero())?;
    for s in shapes() {
        let Some(q) = shape_entry(s, n, k) else { continue };
        let lambda = &f.entries[k] * &An::i_pow(-(q as i64));
        let ok = (0..=n).all(|w| match shape_entry(s, n, w) {
            Some(q) => f.entries[w] == &lambda * &An::i_pow(q as i64),
            None => f.entries[w].is_zero(),
        });
        if ok {
            return Some(AffineForm { lambda, shape: s });
        }
    }
    None
}

/// Quadratic form mod 4 over F2 variables; cross terms carry coefficient 2.
struct QForm {
    kappa: u8,
    lin: Vec<u8>,
    quad: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

impl QForm {
    fn new(n: usize) -> Self {
        QForm { kappa: 0, lin: vec![0; n], quad: vec![BTreeSet::new(); n], alive: vec![true; n] }
    }

    fn add_lin(&mut self, x: usize, c: u8) {
        self.lin[x] = (self.lin[x] + c) % 4;
    }

    /// Adds 2 x y.
    fn toggle(&mut self, x: usize, y: usize) {
        if x == y {
            self.add_lin(x, 2);
        } else if !self.quad[x].remove(&y) {
            self.quad[x].insert(y);
            self.quad[y].insert(x);
        } else {
            self.quad[y].remove(&x);
        }
    }

    fn drop_var(&mut self, x: usize) {
        for y in std::mem::take(&mut self.quad[x]) {
            self.quad[y].remove(&x);
        }
        self.lin[x] = 0;
        self.alive[x] = false;
    }

    /// Adds c times the XOR of `s` as an integer mod 4.
    fn add_xor(&mut self, s: &[usize], c: u8) {
        for &x in s {
            self.add_lin(x, c);
        }
        if c % 2 == 1 {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    self.toggle(s[i], s[j]);
                }
            }
        }
    }

    /// Substitutes x = c xor (xor of s), s not containing x.
    fn substitute(&mut self, x: usize, c: u8, s: &[usize]) {
        let a = self.lin[x];
        let nbrs: Vec<usize> = self.quad[x].iter().copied().collect();
        self.drop_var(x);
        // a * (c + (1 - 2c) sum s - 2 sum s s)
        self.kappa = (self.kappa + a * c) % 4;
        let lin_c = if c == 0 { a } else { (4 - a) % 4 };
        for &y in s {
            self.add_lin(y, lin_c);
        }
        if a % 2 == 1 {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    self.toggle(s[i], s[j]);
                }
            }
        }
        // 2 q (c + sum s)
        for q in nbrs {
            if c == 1 {
                self.add_lin(q, 2);
            }
            for &y in s {
                self.toggle(q, y);
            }
        }
    }
}

/// Value of sum over x in F2^n of i^{Q(x)} subject to the rows (mask, rhs).
fn gauss_sum(n: usize, rows: Vec<(Vec<u64>, u8)>, mut q: QForm) -> An {
    let words = n.div_ceil(64).max(1);
    let bit = |r: &Vec<u64>, j: usize| (r[j / 64] >> (j % 64)) & 1 == 1;
    let mut rows = rows;
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, var)
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| bit(&rows[i].0, col)) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && bit(&rows[i].0, col) {
                let (src, rhs) = (rows[r].0.clone(), rows[r].1);
                for w in 0..words {
                    rows[i].0[w] ^= src[w];
                }
                rows[i].1 ^= rhs;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    if rows[r..].iter().any(|(_, rhs)| *rhs == 1) {
        return An::zero();
    }
    for &(ri, var) in &pivots {
        let s: Vec<usize> = (0..n).filter(|&j| j != var && bit(&rows[ri].0, j)).collect();
        q.substitute(var, rows[ri].1, &s);
    }
    let mut value = An::one();
    let two = An::from_int(2);
    let one_plus_i = &An::one() + &An::i();
    let one_minus_i = &An::one() - &An::i();
    loop {
        let Some(j) = (0..n).filter(|&j| q.alive[j]).min_by_key(|&j| q.quad[j].len()) else { break };
        let a = q.lin[j];
        let nb: Vec<usize> = q.quad[j].iter().copied().collect();
        if nb.is_empty() {
            if a == 2 {
                return An::zero();
            }
            value = &value * &(&An::one() + &An::i_pow(a as i64));
            q.drop_var(j);
            continue;
        }
        q.drop_var(j);
        if a % 2 == 0 {
            value = &value * &two;
            q.substitute(nb[0], a / 2, &nb[1..]);
        } else if a == 1 {
            value = &value * &one_plus_i;
            q.add_xor(&nb, 3);
        } else {
            value = &value * &one_minus_i;
            q.add_xor(&nb, 1);
        }
    }
    &value * &An::i_pow(q.kappa as i64)
}

pub fn affine_eval(grid: &PlanarGrid) -> Result<An, SolveError> {
    let sigs = closed_symmetric(grid)?;
    let eidx = edge_index(grid);
    let n = grid.edges.len();
    let words = n.div_ceil(64).max(1);
    let mut rows: Vec<(Vec<u64>, u8)> = Vec::new();
    let mut q = QForm::new(n);
    let mut scalar = grid.scalar.clone();
    let row = |vars: &[usize], rhs: u8| {
        let mut m = vec![0u64; words];
        for &v in vars {
            m[v / 64] ^= 1 << (v % 64);
        }
        (m, rhs)
    };
    for (vi, f) in sigs.iter().enumerate() {
        if f.arity() == 0 {
            scalar = &scalar * &f.entries[0];
            continue;
        }
        if f.is_zero() {
            return Ok(An::zero());
        }
        let Some(form) = affine_form(f) else {
            let id = grid.vertices[vi].id;
            return Err(if in_a(f) {
                SolveError::Representation(format!("no affine form found for vertex {id}"))
            } else {
                SolveError::Class(format!("vertex {id} is not affine"))
            });
        };
        scalar = &scalar * &form.lambda;
        let ports: Vec<usize> = grid.vertices[vi].rotation.iter().map(|h| eidx[h]).collect();
        match form.shape {
            AffineShape::Const(c) => {
                for &p in &ports {
                    rows.push(row(&[p], c));
                }
            }
            AffineShape::AllEqual(r) => {
                for &p in &ports[1..] {
                    rows.push(row(&[ports[0], p], 0));
                }
                q.add_lin(ports[0], r);
            }
            AffineShape::Parity { odd, a } => {
                rows.push(row(&ports, odd as u8));
                for &p in &ports {
                    q.add_lin(p, a);
                }
            }
            AffineShape::Free { a, b } => {
                for (i, &p) in ports.iter().enumerate() {
                    q.add_lin(p, a);
                    if b {
                        for &p2 in &ports[i + 1..] {
                            q.toggle(p, p2);
                        }
                    }
                }
            }
        }
    }
    Ok(&scalar * &gauss_sum(n, rows, q))
}
