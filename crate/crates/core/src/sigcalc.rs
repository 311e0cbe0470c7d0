//! Symmetric signatures and their calculus: derivative, integral, holographic
//! action, recurrences, vanishing degrees, signature matrices and tensor
//! decompositions.

use crate::algebra::{AlgebraicNumber as An, Field, QuadExt};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SigError {
    #[error("arity error: {0}")]
    Arity(String),
    #[error("singular transform")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymmetricSignature {
    pub entries: Vec<An>,
}

impl fmt::Debug for SymmetricSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for SymmetricSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut r = BigInt::from(1);
    for j in 0..k {
        r = r * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    r
}

fn binom_an(n: usize, k: usize) -> An {
    An::from_bigint(binomial(n, k))
}

impl SymmetricSignature {
    pub fn new(entries: Vec<An>) -> Self {
        assert!(!entries.is_empty(), "a signature has at least one entry");
        SymmetricSignature { entries }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self::new(v.iter().map(|&x| An::from_int(x)).collect())
    }

    /// Parse from scalar strings.
    pub fn parse(v: &[&str]) -> Result<Self, crate::algebra::AlgebraError> {
        Ok(Self::new(v.iter().map(|s| An::parse(s)).collect::<Result<_, _>>()?))
    }

    pub fn arity(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn scale(&self, c: &An) -> Self {
        Self::new(self.entries.iter().map(|e| e * c).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity(), o.arity());
        Self::new(self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect())
    }

    pub fn reversed(&self) -> Self {
        let mut e = self.entries.clone();
        e.reverse();
        Self::new(e)
    }

    /// Value on an input with the given Hamming weight.
    pub fn at(&self, weight: usize) -> &An {
        &self.entries[weight]
    }

    /// Projective equality: o = c * self for some nonzero c.
    pub fn proportional(&self, o: &Self) -> bool {
        proportional(&self.entries, &o.entries)
    }

    pub fn to_general(&self) -> GeneralSignature {
        let n = self.arity();
        let entries = (0..1usize << n).map(|x| self.entries[x.count_ones() as usize].clone()).collect();
        GeneralSignature { arity: n, entries }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(tensor_decompose(self), TensorDecomposition::Zero | TensorDecomposition::Degenerate { .. })
    }

    pub fn binary(f0: An, f1: An, f2: An) -> Self {
        Self::new(vec![f0, f1, f2])
    }
}

pub fn proportional<F: Field>(a: &[F], b: &[F]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let pa = a.iter().position(|x| !x.is_zero());
    let pb = b.iter().position(|x| !x.is_zero());
    match (pa, pb) {
        (None, None) => true,
        (Some(i), Some(j)) if i == j => {
            // b = (b_i / a_i) a
            let r = b[i].fdiv(&a[i]);
            a.iter().zip(b).all(|(x, y)| x.fmul(&r) == *y)
        }
        _ => false,
    }
}

/// Asymmetric signature; entry index has the first input as the most
/// significant bit, remaining inputs counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralSignature {
    pub arity: usize,
    pub entries: Vec<An>,
}

impl GeneralSignature {
    pub fn new(arity: usize, entries: Vec<An>) -> Self {
        assert_eq!(entries.len(), 1 << arity);
        GeneralSignature { arity, entries }
    }

    /// Value on inputs x_1..x_n (x_1 first).
    pub fn value(&self, bits: &[u8]) -> &An {
        let mut idx = 0usize;
        for &b in bits {
            idx = (idx << 1) | b as usize;
        }
        &self.entries[idx]
    }

    pub fn symmetrize(&self) -> Option<SymmetricSignature> {
        let mut out: Vec<Option<An>> = vec![None; self.arity + 1];
        for (x, e) in self.entries.iter().enumerate() {
            let w = x.count_ones() as usize;
            match &out[w] {
                None => out[w] = Some(e.clone()),
                Some(v) if v == e => {}
                Some(_) => return None,
            }
        }
        Some(SymmetricSignature::new(out.into_iter().map(|v| v.unwrap()).collect()))
    }

    /// One counterclockwise rotation of the inputs:
    /// g'(x1, x2, x3, ..., xn) = g(x2, ..., xn, x1).
    pub fn rotate(&self) -> GeneralSignature {
        let n = self.arity;
        if n == 0 {
            return self.clone();
        }
        let mask = (1usize << n) - 1;
        let entries = (0..1usize << n)
            .map(|y| {
                // y's bits are (y1..yn) with y1 the MSB; source index has x = (y2..yn, y1)
                let x = ((y << 1) & mask) | (y >> (n - 1));
                self.entries[x].clone()
            })
            .collect();
        GeneralSignature { arity: n, entries }
    }
}

/// A 2x2 matrix over the field; acts on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transform2x2 {
    pub t00: An,
    pub t01: An,
    pub t10: An,
    pub t11: An,
}

impl Transform2x2 {
    pub fn new(t00: An, t01: An, t10: An, t11: An) -> Self {
        Transform2x2 { t00, t01, t10, t11 }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    /// [[1,1],[i,-i]], unnormalized.
    pub fn z() -> Self {
        Self::new(An::one(), An::one(), An::i(), -An::i())
    }

    /// [[1,1],[1,-1]], unnormalized.
    pub fn h() -> Self {
        Self::from_ints(1, 1, 1, -1)
    }

    pub fn x() -> Self {
        Self::from_ints(0, 1, 1, 0)
    }

    pub fn diag(a: An, d: An) -> Self {
        Self::new(a, An::zero(), An::zero(), d)
    }

    /// Matrix with the given columns.
    pub fn from_columns(u: &[An; 2], v: &[An; 2]) -> Self {
        Self::new(u[0].clone(), v[0].clone(), u[1].clone(), v[1].clone())
    }

    pub fn det(&self) -> An {
        &(&self.t00 * &self.t11) - &(&self.t01 * &self.t10)
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    pub fn inverse(&self) -> Result<Self, SigError> {
        let d = self.det();
        if d.is_zero() {
            return Err(SigError::Singular);
        }
        let di = d.inv().unwrap();
        Ok(Self::new(&self.t11 * &di, -&(&self.t01 * &di), -&(&self.t10 * &di), &self.t00 * &di))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(
            &(&self.t00 * &o.t00) + &(&self.t01 * &o.t10),
            &(&self.t00 * &o.t01) + &(&self.t01 * &o.t11),
            &(&self.t10 * &o.t00) + &(&self.t11 * &o.t10),
            &(&self.t10 * &o.t01) + &(&self.t11 * &o.t11),
        )
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.t00.clone(), self.t10.clone(), self.t01.clone(), self.t11.clone())
    }

    pub fn scale(&self, c: &An) -> Self {
        Self::new(&self.t00 * c, &self.t01 * c, &self.t10 * c, &self.t11 * c)
    }

    /// T T^t = I.
    pub fn is_orthogonal(&self) -> bool {
        self.mul(&self.transpose()) == Self::identity()
    }

    /// T T^t = c I for some nonzero c.
    pub fn is_orthogonal_up_to_scalar(&self) -> bool {
        let p = self.mul(&self.transpose());
        p.t01.is_zero() && p.t10.is_zero() && p.t00 == p.t11 && !p.t00.is_zero()
    }

    pub fn apply(&self, u: &[An; 2]) -> [An; 2] {
        [&(&self.t00 * &u[0]) + &(&self.t01 * &u[1]), &(&self.t10 * &u[0]) + &(&self.t11 * &u[1])]
    }

    pub fn as_array(&self) -> [[An; 2]; 2] {
        [[self.t00.clone(), self.t01.clone()], [self.t10.clone(), self.t11.clone()]]
    }
}

/// T^{(x)n} applied to a symmetric signature, over any field.
pub fn transform_entries<F: Field>(t: &[[F; 2]; 2], f: &[F]) -> Vec<F> {
    let n = f.len() - 1;
    let pw = |x: &F| {
        let mut v = vec![F::one()];
        for _ in 0..n {
            let last = v.last().unwrap().fmul(x);
            v.push(last);
        }
        v
    };
    let (p00, p01, p10, p11) = (pw(&t[0][0]), pw(&t[0][1]), pw(&t[1][0]), pw(&t[1][1]));
    let binoms: Vec<Vec<F>> = (0..=n).map(|m| (0..=m).map(|j| F::embed(&binom_an(m, j))).collect()).collect();
    (0..=n)
        .map(|k| {
            let mut acc = F::zero();
            for a in 0..=k {
                let ca = binoms[k][a].fmul(&p10[k - a]).fmul(&p11[a]);
                if ca.is_zero() {
                    continue;
                }
                for b in 0..=(n - k) {
                    let fv = &f[a + b];
                    if fv.is_zero() {
                        continue;
                    }
                    let cb = binoms[n - k][b].fmul(&p00[n - k - b]).fmul(&p01[b]);
                    acc = acc.fadd(&ca.fmul(&cb).fmul(fv));
                }
            }
            acc
        })
        .collect()
}

/// Column action T^{(x)n} f.
pub fn transform(t: &Transform2x2, f: &SymmetricSignature) -> SymmetricSignature {
    SymmetricSignature::new(transform_entries(&t.as_array(), &f.entries))
}

/// Row action f T^{(x)n}.
pub fn transform_row(f: &SymmetricSignature, t: &Transform2x2) -> SymmetricSignature {
    transform(&t.transpose(), f)
}

/// Slot-wise action on an asymmetric signature.
pub fn transform_general(t: &Transform2x2, g: &GeneralSignature) -> GeneralSignature {
    let mut cur = g.entries.clone();
    let n = g.arity;
    let m = t.as_array();
    for slot in 0..n {
        let bit = 1usize << (n - 1 - slot);
        let mut next = vec![An::zero(); cur.len()];
        for (y, out) in next.iter_mut().enumerate() {
            let yb = (y & bit != 0) as usize;
            let x0 = y & !bit;
            let x1 = y | bit;
            *out = &(&m[yb][0] * &cur[x0]) + &(&m[yb][1] * &cur[x1]);
        }
        cur = next;
    }
    GeneralSignature { arity: n, entries: cur }
}

pub mod named {
    use super::*;

    pub fn equality(k: usize) -> SymmetricSignature {
        gen_eq(An::one(), An::one(), k)
    }

    pub fn disequality() -> SymmetricSignature {
        exact_one(2)
    }

    pub fn exact_one(k: usize) -> SymmetricSignature {
        assert!(k >= 1);
        let mut e = vec![An::zero(); k + 1];
        e[1] = An::one();
        SymmetricSignature::new(e)
    }

    pub fn all_but_one(k: usize) -> SymmetricSignature {
        exact_one(k).reversed()
    }

    pub fn gen_eq(a: An, b: An, k: usize) -> SymmetricSignature {
        assert!(k >= 1);
        let mut e = vec![An::zero(); k + 1];
        e[0] = a;
        e[k] = b;
        SymmetricSignature::new(e)
    }

    /// u^{(x)k}
    pub fn degenerate(u: &[An; 2], k: usize) -> SymmetricSignature {
        SymmetricSignature::new((0..=k).map(|j| &u[0].pow((k - j) as u64) * &u[1].pow(j as u64)).collect())
    }

    /// Sum over positions of u^{(x)(k-1)} with one v inserted.
    pub fn sym_one(u: &[An; 2], v: &[An; 2], k: usize) -> SymmetricSignature {
        SymmetricSignature::new(sym_one_entries(u, v, k))
    }
}

pub(crate) fn sym_one_entries<F: Field>(u: &[F; 2], v: &[F; 2], n: usize) -> Vec<F> {
    (0..=n)
        .map(|k| {
            let mut acc = F::zero();
            if k >= 1 {
                let c = F::embed(&An::from_int(k as i64));
                acc = acc.fadd(&c.fmul(&v[1]).fmul(&u[0].fpow((n - k) as u64)).fmul(&u[1].fpow((k - 1) as u64)));
            }
            if k < n {
                let c = F::embed(&An::from_int((n - k) as i64));
                acc = acc.fadd(&c.fmul(&v[0]).fmul(&u[0].fpow((n - k - 1) as u64)).fmul(&u[1].fpow(k as u64)));
            }
            acc
        })
        .collect()
}

pub(crate) fn power_entries<F: Field>(u: &[F; 2], n: usize) -> Vec<F> {
    (0..=n).map(|k| u[0].fpow((n - k) as u64).fmul(&u[1].fpow(k as u64))).collect()
}

/// h_k = sum_j C(m,j) g_j f_{k+j}: connect all m inputs of g to f.
pub fn derivative(f: &SymmetricSignature, g: &SymmetricSignature) -> Result<SymmetricSignature, SigError> {
    let (n, m) = (f.arity(), g.arity());
    if m >= n {
        return Err(SigError::Arity(format!("derivative needs arity(g) < arity(f), got {m} >= {n}")));
    }
    let out = (0..=n - m)
        .map(|k| (0..=m).map(|j| &(&binom_an(m, j) * &g.entries[j]) * &f.entries[k + j]).sum())
        .collect();
    Ok(SymmetricSignature::new(out))
}

/// The derivative by [1,0,1]: a self-loop.
pub fn partial(f: &SymmetricSignature) -> Result<SymmetricSignature, SigError> {
    derivative(f, &named::equality(2))
}

/// F_k = sum_{s >= 0} (-1)^s fp_{k+2s}; satisfies partial(F) = fp.
pub fn integral(fp: &SymmetricSignature) -> SymmetricSignature {
    let n = fp.arity();
    let out = (0..=n + 2)
        .map(|k| {
            let mut acc = An::zero();
            let mut j = k;
            let mut sign = true;
            while j <= n {
                acc = if sign { &acc + &fp.entries[j] } else { &acc - &fp.entries[j] };
                sign = !sign;
                j += 2;
            }
            acc
        })
        .collect();
    SymmetricSignature::new(out)
}

/// Second-order recurrence a f_k - b f_{k+1} + c f_{k+2} = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecurrenceType {
    /// Hankel rank <= 2; `abc` is the first null-space basis vector, `null_space`
    /// the full basis (dimension 3 - rank).
    Recurrence { abc: [An; 3], rank: usize, null_space: Vec<[An; 3]>, distinct_roots: bool },
    NoRecurrence,
}

impl RecurrenceType {
    pub fn rank(&self) -> usize {
        match self {
            RecurrenceType::Recurrence { rank, .. } => *rank,
            RecurrenceType::NoRecurrence => 3,
        }
    }
}

/// Row-reduce and return (rank, null-space basis) for a matrix with 3 columns.
fn null_space3(rows: &[[An; 3]]) -> (usize, Vec<[An; 3]>) {
    let mut m: Vec<[An; 3]> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..3 {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][col].inv().unwrap();
        for c in 0..3 {
            m[r][c] = &m[r][c] * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let fct = m[i][col].clone();
                for c in 0..3 {
                    let d = &fct * &m[r][c];
                    m[i][c] = &m[i][c] - &d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..3).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&fc| {
            let mut v: [An; 3] = std::array::from_fn(|_| An::zero());
            v[fc] = An::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[i][fc];
            }
            v
        })
        .collect();
    (r, basis)
}

pub fn recurrence_analysis(f: &SymmetricSignature) -> Result<RecurrenceType, SigError> {
    let n = f.arity();
    if n < 2 {
        return Err(SigError::Arity("recurrence analysis needs arity >= 2".into()));
    }
    // Rows (f_k, -f_{k+1}, f_{k+2}) so that the null vector is (a, b, c) directly.
    let rows: Vec<[An; 3]> = (0..=n - 2)
        .map(|k| [f.entries[k].clone(), -&f.entries[k + 1], f.entries[k + 2].clone()])
        .collect();
    let (rank, basis) = null_space3(&rows);
    if basis.is_empty() {
        return Ok(RecurrenceType::NoRecurrence);
    }
    let abc = basis[0].clone();
    let disc = &(&abc[1] * &abc[1]) - &(&(&An::from_int(4) * &abc[0]) * &abc[2]);
    Ok(RecurrenceType::Recurrence { abc, rank, null_space: basis, distinct_roots: !disc.is_zero() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishingDegrees {
    pub rd_plus: i64,
    pub vd_plus: i64,
    pub rd_minus: i64,
    pub vd_minus: i64,
    pub in_v_plus: bool,
    pub in_v_minus: bool,
    /// (Z^{-1})^{(x)n} f
    pub fhat: SymmetricSignature,
}

/// f-hat = (Z^{-1})^{(x)n} f, so that f = sum_k fhat_k Sym([1,i]^{n-k}; [1,-i]^k).
pub fn z_hat(f: &SymmetricSignature) -> SymmetricSignature {
    transform(&Transform2x2::z().inverse().unwrap(), f)
}

pub fn vanishing_degrees(f: &SymmetricSignature) -> VanishingDegrees {
    let n = f.arity() as i64;
    let fhat = z_hat(f);
    let last = fhat.entries.iter().rposition(|e| !e.is_zero());
    let first = fhat.entries.iter().position(|e| !e.is_zero());
    let (rd_plus, rd_minus) = match (last, first) {
        (Some(l), Some(fi)) => (l as i64, n - fi as i64),
        _ => (-1, -1),
    };
    let vd_plus = n - rd_plus;
    let vd_minus = n - rd_minus;
    VanishingDegrees {
        rd_plus,
        vd_plus,
        rd_minus,
        vd_minus,
        in_v_plus: 2 * vd_plus > n,
        in_v_minus: 2 * vd_minus > n,
        fhat,
    }
}

/// 4x4 signature matrix: rows indexed by (x1 x2), columns by (x4 x3).
pub fn signature_matrix(g: &GeneralSignature) -> Result<[[An; 4]; 4], SigError> {
    if g.arity != 4 {
        return Err(SigError::Arity(format!("signature matrix needs arity 4, got {}", g.arity)));
    }
    Ok(std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let (x1, x2) = ((r >> 1) & 1, r & 1);
            let (x4, x3) = ((c >> 1) & 1, c & 1);
            g.value(&[x1 as u8, x2 as u8, x3 as u8, x4 as u8]).clone()
        })
    }))
}

/// Redundant: middle rows equal and middle columns equal.
pub fn is_redundant(m: &[[An; 4]; 4]) -> bool {
    m[1] == m[2] && (0..4).all(|r| m[r][1] == m[r][2])
}

/// [[1,0,0,0],[0,1/2,1/2,0],[0,0,0,1]] M [[1,0,0],[0,1,0],[0,1,0],[0,0,1]]
pub fn compress(m: &[[An; 4]; 4]) -> [[An; 3]; 3] {
    let half = An::from_ratio(1, 2);
    let rows: [[An; 4]; 3] = [
        m[0].clone(),
        std::array::from_fn(|c| &(&m[1][c] + &m[2][c]) * &half),
        m[3].clone(),
    ];
    std::array::from_fn(|r| [rows[r][0].clone(), &rows[r][1] + &rows[r][2], rows[r][3].clone()])
}

pub fn det3(m: &[[An; 3]; 3]) -> An {
    let t = |a: usize, b: usize, c: usize| &(&m[0][a] * &m[1][b]) * &m[2][c];
    &(&(&t(0, 1, 2) + &t(1, 2, 0)) + &t(2, 0, 1)) - &(&(&t(2, 1, 0) + &t(0, 2, 1)) + &t(1, 0, 2))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignatureMatrixReport {
    pub matrix: [[An; 4]; 4],
    pub redundant: bool,
    pub compressed: [[An; 3]; 3],
    pub det_compressed: An,
    pub rotated: GeneralSignature,
}

pub fn signature_matrix_ops(g: &GeneralSignature) -> Result<SignatureMatrixReport, SigError> {
    let matrix = signature_matrix(g)?;
    let compressed = compress(&matrix);
    Ok(SignatureMatrixReport {
        redundant: is_redundant(&matrix),
        det_compressed: det3(&compressed),
        compressed,
        matrix,
        rotated: g.rotate(),
    })
}

/// Canonical decomposition of a symmetric signature.
#[derive(Clone, Debug, PartialEq)]
pub enum TensorDecomposition {
    Zero,
    /// f = multiplier * u^{(x)n}, u normalized to a leading 1.
    Degenerate { u: [An; 2], multiplier: An },
    /// f = x u^{(x)n} + y v^{(x)n}.
    Distinct { x: An, u: [An; 2], y: An, v: [An; 2] },
    /// f = Sym(u; v): sum over positions of u^{(x)(n-1)} with one v.
    DoubleRoot { u: [An; 2], v: [An; 2] },
    /// Distinct roots outside Q(w); the decomposition over Q(w)(sqrt(disc)).
    Irrational { abc: [An; 3], ext: ExtDecomposition },
    /// Arity >= 3 without any second-order recurrence.
    HighRank,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtDecomposition {
    pub x: QuadExt,
    pub u: [QuadExt; 2],
    pub y: QuadExt,
    pub v: [QuadExt; 2],
}

fn normalize_vec<F: Field>(u: &[F; 2]) -> ([F; 2], F) {
    let s = if !u[0].is_zero() { u[0].clone() } else { u[1].clone() };
    let si = s.finv();
    ([u[0].fmul(&si), u[1].fmul(&si)], s)
}

/// Solve f = x*a + y*b for basis vectors a, b; verifies every entry.
fn solve_pair<F: Field>(f: &[F], a: &[F], b: &[F]) -> Option<(F, F)> {
    let n = f.len();
    for j in 0..n {
        for k in j + 1..n {
            let det = a[j].fmul(&b[k]).fsub(&a[k].fmul(&b[j]));
            if det.is_zero() {
                continue;
            }
            let di = det.finv();
            let x = f[j].fmul(&b[k]).fsub(&f[k].fmul(&b[j])).fmul(&di);
            let y = a[j].fmul(&f[k]).fsub(&a[k].fmul(&f[j])).fmul(&di);
            let ok = (0..n).all(|i| x.fmul(&a[i]).fadd(&y.fmul(&b[i])) == f[i]);
            return if ok { Some((x, y)) } else { None };
        }
    }
    None
}

pub(crate) fn distinct_from_roots<F: Field>(f: &[F], u: &[F; 2], v: &[F; 2]) -> Option<(F, [F; 2], F, [F; 2])> {
    let n = f.len() - 1;
    let (u, _) = normalize_vec(u);
    let (v, _) = normalize_vec(v);
    let (x, y) = solve_pair(f, &power_entries(&u, n), &power_entries(&v, n))?;
    Some((x, u, y, v))
}

fn double_from_root<F: Field>(f: &[F], u: &[F; 2]) -> Option<([F; 2], [F; 2])> {
    let n = f.len() - 1;
    let (u, _) = normalize_vec(u);
    let w = if !u[0].is_zero() { [F::zero(), F::one()] } else { [F::one(), F::zero()] };
    let (x, y) = solve_pair(f, &power_entries(&u, n), &sym_one_entries(&u, &w, n))?;
    let xn = x.fdiv(&F::embed(&An::from_int(n as i64)));
    let v = [y.fmul(&w[0]).fadd(&xn.fmul(&u[0])), y.fmul(&w[1]).fadd(&xn.fmul(&u[1]))];
    Some((u, v))
}

pub fn tensor_decompose(f: &SymmetricSignature) -> TensorDecomposition {
    let n = f.arity();
    let e = &f.entries;
    if f.is_zero() {
        return TensorDecomposition::Zero;
    }
    if n == 0 {
        return TensorDecomposition::Degenerate { u: [An::one(), An::zero()], multiplier: e[0].clone() };
    }
    // degenerate?
    if !e[0].is_zero() {
        let r = &e[1] / &e[0];
        let u = [An::one(), r];
        if power_entries(&u, n).iter().zip(e).all(|(p, x)| &(p * &e[0]) == x) {
            return TensorDecomposition::Degenerate { u, multiplier: e[0].clone() };
        }
    } else if e[..n].iter().all(|x| x.is_zero()) {
        return TensorDecomposition::Degenerate { u: [An::zero(), An::one()], multiplier: e[n].clone() };
    }
    if n == 2 {
        let (f0, f1, f2) = (&e[0], &e[1], &e[2]);
        let (u, v) = if !f2.is_zero() {
            ([f1 / f2, An::one()], [An::one(), An::zero()])
        } else if !f0.is_zero() {
            ([An::one(), f1 / f0], [An::zero(), An::one()])
        } else {
            ([An::one(), An::one()], [An::one(), -An::one()])
        };
        let (x, u, y, v) = distinct_from_roots(e, &u, &v).expect("binary decomposition");
        return TensorDecomposition::Distinct { x, u, y, v };
    }
    let rec = recurrence_analysis(f).expect("arity >= 3");
    let RecurrenceType::Recurrence { abc, .. } = rec else {
        return TensorDecomposition::HighRank;
    };
    let [a, b, c] = abc.clone();
    // roots (p, q) of a p^2 - b p q + c q^2
    if c.is_zero() {
        if b.is_zero() {
            let (u, v) = double_from_root(e, &[An::zero(), An::one()]).expect("double root at infinity");
            return TensorDecomposition::DoubleRoot { u, v };
        }
        let (x, u, y, v) = distinct_from_roots(e, &[b.clone(), a.clone()], &[An::zero(), An::one()]).expect("distinct roots");
        return TensorDecomposition::Distinct { x, u, y, v };
    }
    let disc = &(&b * &b) - &(&(&An::from_int(4) * &a) * &c);
    let two_c = &An::from_int(2) * &c;
    if disc.is_zero() {
        let lam = &b / &two_c;
        let (u, v) = double_from_root(e, &[An::one(), lam]).expect("double root");
        return TensorDecomposition::DoubleRoot { u, v };
    }
    match disc.sqrt() {
        Some(s) => {
            let l1 = &(&b + &s) / &two_c;
            let l2 = &(&b - &s) / &two_c;
            let (x, u, y, v) = distinct_from_roots(e, &[An::one(), l1], &[An::one(), l2]).expect("distinct roots");
            TensorDecomposition::Distinct { x, u, y, v }
        }
        None => {
            let s = QuadExt::sqrt_of(&disc);
            let bq = QuadExt::embed(&b);
            let ci = QuadExt::embed(&two_c.inv().unwrap());
            let l1 = bq.fadd(&s).fmul(&ci);
            let l2 = bq.fsub(&s).fmul(&ci);
            let fe: Vec<QuadExt> = e.iter().map(QuadExt::embed).collect();
            let (x, u, y, v) =
                distinct_from_roots(&fe, &[QuadExt::one(), l1], &[QuadExt::one(), l2]).expect("distinct roots in extension");
            TensorDecomposition::Irrational { abc, ext: ExtDecomposition { x, u, y, v } }
        }
    }
}

impl TensorDecomposition {
    /// Re-expand to entries (None for Irrational/HighRank, which have no base-field form).
    pub fn expand(&self, n: usize) -> Option<SymmetricSignature> {
        match self {
            TensorDecomposition::Zero => Some(SymmetricSignature::new(vec![An::zero(); n + 1])),
            TensorDecomposition::Degenerate { u, multiplier } => Some(named::degenerate(u, n).scale(multiplier)),
            TensorDecomposition::Distinct { x, u, y, v } => {
                Some(named::degenerate(u, n).scale(x).add(&named::degenerate(v, n).scale(y)))
            }
            TensorDecomposition::DoubleRoot { u, v } => Some(named::sym_one(u, v, n)),
            _ => None,
        }
    }
}
