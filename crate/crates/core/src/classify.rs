//! Membership tests for the tractable classes and the dichotomy verdicts.

use crate::algebra::{AlgebraicNumber as An, Field, QuadExt};
use crate::sigcalc::{
    named, power_entries, proportional, tensor_decompose, transform, transform_entries, vanishing_degrees,
    SymmetricSignature, TensorDecomposition, Transform2x2,
};
use num_integer::Integer;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("the arity set must contain some r >= 3")]
    BadS,
    #[error("empty input")]
    Empty,
}

type Mat<F> = [[F; 2]; 2];

fn c<F: Field>(x: An) -> F {
    F::embed(&x)
}

fn mat_inv<F: Field>(m: &Mat<F>) -> Option<Mat<F>> {
    let det = m[0][0].fmul(&m[1][1]).fsub(&m[0][1].fmul(&m[1][0]));
    if det.is_zero() {
        return None;
    }
    let di = det.finv();
    Some([
        [m[1][1].fmul(&di), m[0][1].fneg().fmul(&di)],
        [m[1][0].fneg().fmul(&di), m[0][0].fmul(&di)],
    ])
}

fn mat_mul<F: Field>(a: &Mat<F>, b: &Mat<F>) -> Mat<F> {
    std::array::from_fn(|r| std::array::from_fn(|k| a[r][0].fmul(&b[0][k]).fadd(&a[r][1].fmul(&b[1][k]))))
}

fn transpose<F: Field>(a: &Mat<F>) -> Mat<F> {
    [[a[0][0].clone(), a[1][0].clone()], [a[0][1].clone(), a[1][1].clone()]]
}

fn diag<F: Field>(a: F, d: F) -> Mat<F> {
    [[a, F::zero()], [F::zero(), d]]
}

fn cols<F: Field>(u: &[F; 2], v: &[F; 2]) -> Mat<F> {
    [[u[0].clone(), v[0].clone()], [u[1].clone(), v[1].clone()]]
}

fn z_mat<F: Field>() -> Mat<F> {
    [[F::one(), F::one()], [c(An::i()), c(-An::i())]]
}

fn z_inv<F: Field>() -> Mat<F> {
    mat_inv(&z_mat()).unwrap()
}

fn h_mat<F: Field>() -> Mat<F> {
    [[F::one(), F::one()], [F::one(), F::one().fneg()]]
}

fn ip<F: Field>(a: &[F; 2], b: &[F; 2]) -> F {
    a[0].fmul(&b[0]).fadd(&a[1].fmul(&b[1]))
}

fn is_zero_sig<F: Field>(e: &[F]) -> bool {
    e.iter().all(|x| x.is_zero())
}

/// Direction u with e = c u^{(x)n}, if e is nonzero and degenerate.
pub fn degenerate_direction<F: Field>(e: &[F]) -> Option<[F; 2]> {
    let n = e.len() - 1;
    if is_zero_sig(e) {
        return None;
    }
    if n == 0 {
        return Some([F::one(), F::zero()]);
    }
    if !e[0].is_zero() {
        let u = [F::one(), e[1].fdiv(&e[0])];
        let p = power_entries(&u, n);
        if p.iter().zip(e).all(|(a, b)| a.fmul(&e[0]) == *b) {
            return Some(u);
        }
        return None;
    }
    if e[..n].iter().all(|x| x.is_zero()) {
        return Some([F::zero(), F::one()]);
    }
    None
}

pub fn is_degenerate_g<F: Field>(e: &[F]) -> bool {
    is_zero_sig(e) || degenerate_direction(e).is_some()
}

pub fn in_p_g<F: Field>(e: &[F]) -> bool {
    let n = e.len() - 1;
    if is_degenerate_g(e) {
        return true;
    }
    if n == 2 && e[0].is_zero() && e[2].is_zero() {
        return true;
    }
    n >= 1 && e[1..n].iter().all(|x| x.is_zero())
}

/// The symmetric members of the affine class, up to a scalar.
fn affine_canonicals<F: Field>(n: usize) -> Vec<Vec<F>> {
    let one = F::one();
    let zero = F::zero();
    let i: F = c(An::i());
    let mut out = vec![power_entries(&[one.clone(), zero.clone()], n), power_entries(&[zero.clone(), one.clone()], n)];
    for r in 0..4 {
        let ir: F = c(An::i_pow(r));
        let comb = |u: [F; 2], v: [F; 2]| -> Vec<F> {
            power_entries(&u, n).iter().zip(power_entries(&v, n)).map(|(a, b)| a.fadd(&b.fmul(&ir))).collect()
        };
        out.push(comb([one.clone(), zero.clone()], [zero.clone(), one.clone()]));
        out.push(comb([one.clone(), one.clone()], [one.clone(), one.fneg()]));
        out.push(comb([one.clone(), i.clone()], [one.clone(), i.fneg()]));
        out.push(power_entries(&[one.clone(), ir.clone()], n));
    }
    out
}

pub fn in_a_g<F: Field>(e: &[F]) -> bool {
    if is_zero_sig(e) || e.len() == 1 {
        return true;
    }
    affine_canonicals::<F>(e.len() - 1).iter().any(|cn| proportional(cn, e))
}

pub fn in_matchgate_g<F: Field>(e: &[F]) -> bool {
    if is_zero_sig(e) {
        return true;
    }
    let odd_zero = e.iter().skip(1).step_by(2).all(|x| x.is_zero());
    let even_zero = e.iter().step_by(2).all(|x| x.is_zero());
    let s: Vec<F> = if odd_zero {
        e.iter().step_by(2).cloned().collect()
    } else if even_zero {
        e.iter().skip(1).step_by(2).cloned().collect()
    } else {
        return false;
    };
    // geometric progression: the 2 x (m) Hankel array of s has rank <= 1
    let m = s.len();
    for j in 0..m.saturating_sub(1) {
        for l in j + 1..m - 1 {
            if s[j].fmul(&s[l + 1]) != s[j + 1].fmul(&s[l]) {
                return false;
            }
        }
    }
    true
}

fn apply<F: Field>(k: &Mat<F>, e: &[F]) -> Vec<F> {
    transform_entries(k, e)
}

fn an(e: &SymmetricSignature) -> &[An] {
    &e.entries
}

pub fn in_p(f: &SymmetricSignature) -> bool {
    in_p_g(an(f))
}

pub fn in_a(f: &SymmetricSignature) -> bool {
    in_a_g(an(f))
}

/// A-dagger = diag(1, w) A.
pub fn in_a_dagger(f: &SymmetricSignature) -> bool {
    in_a_g(&apply(&diag(An::one(), An::zeta_pow(-1)), an(f)))
}

pub fn in_matchgate(f: &SymmetricSignature) -> bool {
    in_matchgate_g(an(f))
}

/// M-hat = H M.
pub fn in_m_hat(f: &SymmetricSignature) -> bool {
    in_matchgate_g(&apply(&h_mat(), an(f)))
}

/// M-hat-dagger = Z M.
pub fn in_m_hat_dagger(f: &SymmetricSignature) -> bool {
    in_matchgate_g(&apply(&z_inv(), an(f)))
}

/// Z P.
pub fn in_zp(f: &SymmetricSignature) -> bool {
    in_p_g(&apply(&z_inv(), an(f)))
}

fn zhat(f: &SymmetricSignature) -> Vec<An> {
    apply(&z_inv(), an(f))
}

/// (in V+, in V-)
pub fn in_vanishing(f: &SymmetricSignature) -> (bool, bool) {
    let v = vanishing_degrees(f);
    (v.in_v_plus, v.in_v_minus)
}

/// (in M4+, in M4-): Z^{-1} f proportional to ExactOne resp. AllButOne.
pub fn in_m4(f: &SymmetricSignature) -> (bool, bool) {
    let n = f.arity();
    if n == 0 {
        return (false, false);
    }
    let h = zhat(f);
    if is_zero_sig(&h) {
        return (false, false);
    }
    (proportional(&h, &named::exact_one(n).entries), proportional(&h, &named::all_but_one(n).entries))
}

/// P2 = A2: Z^{-1} f proportional to [a,0,...,0,b] with ab != 0.
pub fn in_p2(f: &SymmetricSignature) -> bool {
    let n = f.arity();
    if n == 0 {
        return false;
    }
    let h = zhat(f);
    !h[0].is_zero() && !h[n].is_zero() && h[1..n].iter().all(|x| x.is_zero())
}

/// f in R_2^sigma: all nonzero entries of f-hat among the first (sigma=+) or last two.
pub fn in_r2(f: &SymmetricSignature) -> (bool, bool) {
    let v = vanishing_degrees(f);
    (v.rd_plus <= 1, v.rd_minus <= 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, PartialOrd, Ord)]
pub enum TractableClass {
    P,
    A,
    Adagger,
    Mhat,
    MhatDagger,
    Matchgate,
    Vplus,
    Vminus,
    P1,
    P2,
    A1,
    A3,
    M1,
    M2,
    M3,
    M4plus,
    M4minus,
    ZP,
}

/// Witness: transform(T, canonical) is proportional to f.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub transform: Transform2x2,
    pub canonical: SymmetricSignature,
}

impl Witness {
    pub fn verify(&self, f: &SymmetricSignature) -> bool {
        !self.canonical.is_zero() && transform(&self.transform, &self.canonical).proportional(f)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct FamilyMemberships {
    pub p1: bool,
    pub a1: bool,
    pub a3: bool,
    pub m1: bool,
    pub m2: bool,
    pub m3: bool,
    pub p2: bool,
    pub m4_plus: bool,
    pub m4_minus: bool,
    /// The decomposition lives in a quadratic extension of Q(w); memberships are
    /// decided exactly there, but no in-field witness is produced.
    pub in_extension: bool,
    /// False for degenerate or arity <= 2 inputs, where the families are not used.
    pub applicable: bool,
    pub witnesses: BTreeMap<String, Witness>,
}

#[derive(Clone, Copy, Debug, Default)]
struct DistinctFlags {
    p1: bool,
    a1: bool,
    a3: bool,
    m1: bool,
    m2: bool,
    p2: bool,
}

fn beta_sq<F: Field>(n: usize, x: &F, y: &F, uu: &F, vv: &F) -> F {
    y.fmul(y).fmul(&vv.fpow(n as u64)).fdiv(&x.fmul(x).fmul(&uu.fpow(n as u64)))
}

fn distinct_flags<F: Field>(n: usize, x: &F, u: &[F; 2], y: &F, v: &[F; 2]) -> DistinctFlags {
    let (uu, vv, uv) = (ip(u, u), ip(v, v), ip(u, v));
    let p2 = uu.is_zero() && vv.is_zero();
    let nonis = !uu.is_zero() && !vv.is_zero();
    if !nonis {
        return DistinctFlags { p2, m2: p2, ..Default::default() };
    }
    let b2 = beta_sq(n, x, y, &uu, &vv);
    let one: F = F::one();
    let i: F = c(An::i());
    let pm1 = b2 == one || b2 == one.fneg();
    let pmi = b2 == i || b2 == i.fneg();
    let p1 = uv.is_zero();
    let sign: F = if n % 2 == 0 { one.clone() } else { one.fneg() };
    DistinctFlags {
        p1,
        a1: p1 && (pm1 || (n % 2 == 1 && pmi)),
        m1: p1 && b2 == sign,
        a3: uv.fmul(&uv) == uu.fmul(&vv).fneg() && pm1,
        m2: b2 == one,
        p2: false,
    }
}

fn perp<F: Field>(u: &[F; 2]) -> [F; 2] {
    [u[1].fneg(), u[0].clone()]
}

/// Bisector frame for a non-isotropic pair: b = u + s v with s^2 = <u,u>/<v,v>.
/// Returns None when s lies outside F.
fn bisector_frame<F: Field>(u: &[F; 2], v: &[F; 2]) -> Option<Mat<F>> {
    let (uu, vv) = (ip(u, u), ip(v, v));
    let s = uu.fdiv(&vv).fsqrt()?;
    for sg in [s.clone(), s.fneg()] {
        let b = [u[0].fadd(&sg.fmul(&v[0])), u[1].fadd(&sg.fmul(&v[1]))];
        if !ip(&b, &b).is_zero() {
            return Some(cols(&b, &perp(&b)));
        }
    }
    None
}

fn witness_from(t: Mat<An>, f: &SymmetricSignature) -> Option<Witness> {
    let ti = mat_inv(&t)?;
    let canonical = SymmetricSignature::new(apply(&ti, an(f)));
    let w = Witness { transform: Transform2x2::new(t[0][0].clone(), t[0][1].clone(), t[1][0].clone(), t[1][1].clone()), canonical };
    Some(w)
}

/// P1/A1/A3/M1/M2/M3/M4 memberships via the canonical decomposition.
pub fn in_transformable_family(f: &SymmetricSignature) -> FamilyMemberships {
    let n = f.arity();
    let mut out = FamilyMemberships::default();
    if n < 3 || f.is_degenerate() {
        return out;
    }
    out.applicable = true;
    let (m4p, m4m) = in_m4(f);
    out.m4_plus = m4p;
    out.m4_minus = m4m;
    match tensor_decompose(f) {
        TensorDecomposition::Distinct { x, u, y, v } => {
            let fl = distinct_flags(n, &x, &u, &y, &v);
            out.p1 = fl.p1;
            out.a1 = fl.a1;
            out.a3 = fl.a3;
            out.m1 = fl.m1;
            out.m2 = fl.m2;
            out.p2 = fl.p2;
            let basic = witness_from(cols(&u, &v), f);
            for (flag, name) in [(fl.p1, "P1"), (fl.a1, "A1"), (fl.a3, "A3"), (fl.m1, "M1"), (fl.p2, "P2")] {
                if flag {
                    if let Some(w) = basic.clone() {
                        out.witnesses.insert(name.into(), w);
                    }
                }
            }
            if fl.m2 {
                let frame = if fl.p2 { Some(z_mat()) } else { bisector_frame(&u, &v) };
                if let Some(w) = frame.and_then(|t| witness_from(t, f)) {
                    out.witnesses.insert("M2".into(), w);
                }
            }
        }
        TensorDecomposition::Irrational { ext, .. } => {
            out.in_extension = true;
            let fl = distinct_flags(n, &ext.x, &ext.u, &ext.y, &ext.v);
            out.p1 = fl.p1;
            out.a1 = fl.a1;
            out.a3 = fl.a3;
            out.m1 = fl.m1;
            out.m2 = fl.m2;
            out.p2 = fl.p2;
        }
        TensorDecomposition::DoubleRoot { u, v } => {
            let uu = ip(&u, &u);
            if !uu.is_zero() && ip(&u, &v).is_zero() {
                out.m3 = true;
                if let Some(w) = witness_from(cols(&u, &perp(&u)), f) {
                    out.witnesses.insert("M3".into(), w);
                }
            }
        }
        _ => {}
    }
    if m4p || m4m {
        if let Some(w) = witness_from(z_mat(), f) {
            out.witnesses.insert(if m4p { "M4plus" } else { "M4minus" }.into(), w);
        }
    }
    out
}

/// Per-signature class table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureClasses {
    pub signature: SymmetricSignature,
    pub degenerate: bool,
    pub p: bool,
    pub a: bool,
    pub a_dagger: bool,
    pub m_hat: bool,
    pub m_hat_dagger: bool,
    pub matchgate: bool,
    pub v_plus: bool,
    pub v_minus: bool,
    pub zp: bool,
    pub p2: bool,
    pub m4_plus: bool,
    pub m4_minus: bool,
    pub families: FamilyMemberships,
}

pub fn classify_signature(f: &SymmetricSignature) -> SignatureClasses {
    let (vp, vm) = in_vanishing(f);
    let (m4p, m4m) = in_m4(f);
    SignatureClasses {
        signature: f.clone(),
        degenerate: f.is_degenerate(),
        p: in_p(f),
        a: in_a(f),
        a_dagger: in_a_dagger(f),
        m_hat: in_m_hat(f),
        m_hat_dagger: in_m_hat_dagger(f),
        matchgate: in_matchgate(f),
        v_plus: vp,
        v_minus: vm,
        zp: in_zp(f),
        p2: in_p2(f),
        m4_plus: m4p,
        m4_minus: m4m,
        families: in_transformable_family(f),
    }
}

impl SignatureClasses {
    pub fn classes(&self) -> Vec<TractableClass> {
        use TractableClass::*;
        let fam = &self.families;
        [
            (self.p, P),
            (self.a, A),
            (self.a_dagger, Adagger),
            (self.m_hat, Mhat),
            (self.m_hat_dagger, MhatDagger),
            (self.matchgate, Matchgate),
            (self.v_plus, Vplus),
            (self.v_minus, Vminus),
            (fam.p1, P1),
            (self.p2, P2),
            (fam.a1, A1),
            (fam.a3, A3),
            (fam.m1, M1),
            (fam.m2, M2),
            (fam.m3, M3),
            (self.m4_plus, M4plus),
            (self.m4_minus, M4minus),
            (self.zp, ZP),
        ]
        .into_iter()
        .filter_map(|(b, k)| b.then_some(k))
        .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Framework {
    BinaryEq,
    Plcsp,
    Plcsp2,
    Single,
    Plholant,
    Hpm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetWitness {
    pub class: String,
    /// Entries t00, t01, t10, t11 of T with F contained in T * class.
    pub transform: Option<[String; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    Tractable { case: String, all_cases: Vec<String>, witness: Option<SetWitness> },
    PHard { obstruction: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetVerdict {
    pub framework: Framework,
    #[serde(flatten)]
    pub outcome: Outcome,
    /// A negative transformability answer relied on a candidate search that is
    /// not known to be exhaustive.
    pub best_effort: bool,
    pub table: Vec<SignatureClasses>,
}

impl SetVerdict {
    pub fn is_tractable(&self) -> bool {
        matches!(self.outcome, Outcome::Tractable { .. })
    }

    pub fn case(&self) -> Option<&str> {
        match &self.outcome {
            Outcome::Tractable { case, .. } => Some(case),
            _ => None,
        }
    }
}

fn gcd_all(xs: impl IntoIterator<Item = usize>) -> usize {
    xs.into_iter().fold(0, |a, b| a.gcd(&b))
}

/// Pl-Holant([f0,f1,f2] | {=_k : k in S}).
pub fn dichotomy_binary_eq(f: [&An; 3], s: &[usize]) -> Result<SetVerdict, ClassifyError> {
    if !s.iter().any(|&r| r >= 3) {
        return Err(ClassifyError::BadS);
    }
    let d = gcd_all(s.iter().copied()) as u64;
    let holds = binary_eq_conditions(f, d);
    let sig = SymmetricSignature::new(f.iter().map(|x| (*x).clone()).collect());
    let table = vec![classify_signature(&sig)];
    let outcome = match holds.iter().position(|&b| b) {
        Some(k) => Outcome::Tractable {
            case: format!("condition {}", k + 1),
            all_cases: holds.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| format!("condition {}", k + 1)).collect(),
            witness: None,
        },
        None => Outcome::PHard { obstruction: format!("none of the five conditions holds with d = {d}") },
    };
    Ok(SetVerdict { framework: Framework::BinaryEq, outcome, best_effort: false, table })
}

/// The five tractability conditions, in order.
pub fn binary_eq_conditions(f: [&An; 3], d: u64) -> [bool; 5] {
    let (f0, f1, f2) = (f[0], f[1], f[2]);
    let f02 = f0 * f2;
    let f11 = f1 * f1;
    let (p0, p2) = (f0.pow(d), f2.pow(d));
    [
        f02 == f11,
        f0.is_zero() && f2.is_zero(),
        f1.is_zero(),
        f02 == -&f11 && p0 == -&p2 && !p0.is_zero(),
        p0 == p2 && !p0.is_zero(),
    ]
}

fn nonzero(fs: &[SymmetricSignature]) -> Vec<SymmetricSignature> {
    fs.iter().filter(|f| !f.is_zero()).cloned().collect()
}

fn containment(
    fs: &[SymmetricSignature],
    classes: &[(&str, fn(&SymmetricSignature) -> bool)],
    framework: Framework,
) -> SetVerdict {
    let table: Vec<SignatureClasses> = fs.iter().map(classify_signature).collect();
    let fs = nonzero(fs);
    let holding: Vec<String> =
        classes.iter().filter(|(_, t)| fs.iter().all(|f| t(f))).map(|(n, _)| n.to_string()).collect();
    let outcome = if let Some(first) = holding.first() {
        Outcome::Tractable {
            case: first.clone(),
            all_cases: holding.clone(),
            witness: Some(SetWitness { class: first.clone(), transform: None }),
        }
    } else {
        let obstruction = classes
            .iter()
            .map(|(n, t)| {
                let bad = fs.iter().find(|f| !t(f)).unwrap();
                format!("{bad} not in {n}")
            })
            .collect::<Vec<_>>()
            .join("; ");
        Outcome::PHard { obstruction }
    };
    SetVerdict { framework, outcome, best_effort: false, table }
}

pub fn dichotomy_plcsp(fs: &[SymmetricSignature]) -> SetVerdict {
    containment(fs, &[("P", in_p), ("A", in_a), ("M-hat", in_m_hat)], Framework::Plcsp)
}

pub fn dichotomy_plcsp2(fs: &[SymmetricSignature]) -> SetVerdict {
    containment(
        fs,
        &[
            ("P", in_p),
            ("A", in_a),
            ("A-dagger", in_a_dagger),
            ("M-hat", in_m_hat),
            ("M-hat-dagger", in_m_hat_dagger),
        ],
        Framework::Plcsp2,
    )
}

pub fn dichotomy_single(f: &SymmetricSignature) -> SetVerdict {
    let cl = classify_signature(f);
    let fam = &cl.families;
    let table = vec![cl.clone()];
    if f.is_degenerate() || f.arity() < 3 {
        let case = if f.is_degenerate() { "degenerate" } else { "arity at most 2" };
        return SetVerdict {
            framework: Framework::Single,
            outcome: Outcome::Tractable { case: case.into(), all_cases: vec![case.into()], witness: None },
            best_effort: false,
            table,
        };
    }
    let named = [
        (fam.p1, "P1"),
        (fam.m2, "M2"),
        (fam.a3, "A3"),
        (fam.m3, "M3"),
        (fam.m4_plus || fam.m4_minus, "M4"),
        (cl.v_plus || cl.v_minus, "V"),
    ];
    let holding: Vec<String> = named.iter().filter(|(b, _)| *b).map(|(_, n)| n.to_string()).collect();
    let outcome = match holding.first() {
        Some(first) => {
            let witness = fam
                .witnesses
                .get(first.as_str())
                .map(|w| SetWitness { class: first.clone(), transform: Some(t_strings(&w.transform)) });
            Outcome::Tractable { case: first.clone(), all_cases: holding.clone(), witness }
        }
        None => Outcome::PHard { obstruction: format!("{f} is in none of P1, M2, A3, M3, M4, V") },
    };
    SetVerdict { framework: Framework::Single, outcome, best_effort: false, table }
}

fn t_strings(t: &Transform2x2) -> [String; 4] {
    [t.t00.to_string(), t.t01.to_string(), t.t10.to_string(), t.t11.to_string()]
}

fn mat_strings<F: Field>(m: &Mat<F>) -> [String; 4] {
    [m[0][0].to_string(), m[0][1].to_string(), m[1][0].to_string(), m[1][1].to_string()]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    A,
    P,
    M,
}

impl Target {
    fn test<F: Field>(self, e: &[F]) -> bool {
        match self {
            Target::A => in_a_g(e),
            Target::P => in_p_g(e),
            Target::M => in_matchgate_g(e),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Target::A => "A",
            Target::P => "P",
            Target::M => "M",
        }
    }
}

enum Anchor<F> {
    Distinct { u: [F; 2], v: [F; 2] },
    Double { u: [F; 2] },
    Other,
}

/// Does some candidate K (F contained in K^{-1} * class) work?  Each candidate is
/// also checked against the definition: [1,0,1] (K^{-1})^{(x)2} in the class.
fn try_candidates<F: Field>(target: Target, ks: &[Mat<F>], sigs: &[Vec<F>]) -> Option<Mat<F>> {
    let eq2 = vec![F::one(), F::zero(), F::one()];
    for k in ks {
        let Some(t) = mat_inv(k) else { continue };
        if !target.test(&apply(&transpose(&t), &eq2)) {
            continue;
        }
        if sigs.iter().all(|g| target.test(&apply(k, g))) {
            return Some(t);
        }
    }
    None
}

/// Solutions w of w^n = t found among w = zeta^j * q with q rational or an
/// iterated square root.
fn small_roots(t: &An, n: usize) -> Vec<An> {
    let mut out: Vec<An> = Vec::new();
    if t.is_zero() || n == 0 {
        return out;
    }
    for j in 0..8 {
        let z = An::zeta_pow(j);
        let rest = t / &z.pow(n as u64);
        let mut qs = Vec::new();
        if let Some(r) = rest.as_rational() {
            if let Some(q) = rational_root(&r, n) {
                qs.push({ use num_traits::Zero; let z = num_rational::BigRational::zero(); An::from_rationals([q, z.clone(), z.clone(), z]) });
            }
        }
        if n.is_power_of_two() {
            let mut x = Some(rest.clone());
            let mut k = n;
            while k > 1 {
                x = x.and_then(|y| y.sqrt());
                k /= 2;
            }
            if let Some(x) = x {
                qs.push(x);
            }
        }
        for q in qs {
            let w = &z * &q;
            if &w.pow(n as u64) == t && !out.contains(&w) {
                out.push(w);
            }
        }
    }
    out
}

fn rational_root(r: &num_rational::BigRational, n: usize) -> Option<num_rational::BigRational> {
    use num_traits::Signed;
    let neg = r.is_negative();
    if neg && n % 2 == 0 {
        return None;
    }
    let a = r.abs();
    let num = a.numer().nth_root(n as u32);
    let den = a.denom().nth_root(n as u32);
    let q = num_rational::BigRational::new(num, den);
    let q = if neg { -q } else { q };
    let mut p = num_rational::BigRational::from_integer(1.into());
    for _ in 0..n {
        p *= &q;
    }
    (p == *r).then_some(q)
}

struct Search<F> {
    anchor: Anchor<F>,
    n: usize,
    sigs: Vec<Vec<F>>,
}

impl<F: Field> Search<F> {
    /// Candidate K for the anchor; second value true when the list may be incomplete.
    fn candidates(&self, target: Target, p2_ratio: Option<&An>) -> (Vec<Mat<F>>, bool) {
        let mut ks: Vec<Mat<F>> = Vec::new();
        let mut partial = false;
        if target != Target::A {
            ks.push(z_inv());
        }
        match &self.anchor {
            Anchor::Distinct { u, v, .. } => {
                let (uu, vv, uv) = (ip(u, u), ip(v, v), ip(u, v));
                let m = cols(u, v);
                let minv = mat_inv(&m).expect("independent roots");
                if !uu.is_zero() && !vv.is_zero() {
                    match target {
                        Target::P => {
                            if uv.is_zero() {
                                ks.push(minv.clone());
                            }
                        }
                        Target::A => {
                            if uv.is_zero() {
                                let mu = if !u[1].is_zero() { v[0].fdiv(&u[1].fneg()) } else { v[1].fdiv(&u[0]) };
                                let alpha: F = c(An::zeta());
                                ks.push(mat_mul(&diag(F::one(), mu.clone()), &minv));
                                ks.push(mat_mul(&diag(F::one(), mu.fdiv(&alpha)), &minv));
                            }
                            if uv.fmul(&uv) == uu.fmul(&vv).fneg() {
                                let i: F = c(An::i());
                                let s = i.fneg().fmul(&vv).fdiv(&uv);
                                ks.push(mat_mul(&diag(F::one(), s.clone()), &minv));
                                ks.push(mat_mul(&diag(F::one(), s.finv()), &minv));
                            }
                        }
                        Target::M => match bisector_frame(u, v) {
                            Some(frame) => ks.push(mat_inv(&frame).unwrap()),
                            None => partial = true,
                        },
                    }
                } else if uu.is_zero() && vv.is_zero() && target != Target::P {
                    // one-parameter family of rotations fixing the isotropic lines
                    partial = true;
                    if let Some(ratio) = p2_ratio {
                        let targets: Vec<An> = match target {
                            Target::A => (0..4).map(An::i_pow).collect(),
                            _ => vec![An::one(), -An::one()],
                        };
                        for t in targets {
                            for w in small_roots(&(&t * ratio), self.n) {
                                let rot = mat_mul(&mat_mul(&z_mat(), &diag(F::one(), c(w))), &z_inv());
                                if target == Target::A {
                                    let da: Mat<F> = diag(F::one(), c(An::zeta_pow(-1)));
                                    ks.push(mat_mul(&da, &rot));
                                }
                                ks.push(rot);
                            }
                        }
                    }
                }
            }
            Anchor::Double { u } => {
                if target == Target::M && !ip(u, u).is_zero() {
                    ks.push(mat_inv(&cols(u, &perp(u))).unwrap());
                }
            }
            Anchor::Other => {}
        }
        (ks, partial)
    }

    fn run(&self, target: Target, p2_ratio: Option<&An>) -> (Option<Mat<F>>, bool) {
        let (ks, partial) = self.candidates(target, p2_ratio);
        let found = try_candidates(target, &ks, &self.sigs);
        (found.clone(), found.is_none() && partial)
    }
}

#[derive(Clone, Debug)]
struct TransResult {
    holds: bool,
    witness: Option<[String; 4]>,
    best_effort: bool,
}

/// A-, P-, M-transformability of a whole set, using one non-degenerate
/// arity >= 3 anchor (preferring anchors outside P2).
fn set_transformable(fs: &[SymmetricSignature], target: Target) -> TransResult {
    let anchors: Vec<&SymmetricSignature> = fs.iter().filter(|f| f.arity() >= 3 && !f.is_degenerate()).collect();
    let Some(anchor) = anchors.iter().find(|f| !in_p2(f)).or(anchors.first()).copied() else {
        // no anchor: test the basic containments directly
        let sigs: Vec<Vec<An>> = fs.iter().map(|f| f.entries.clone()).collect();
        let mut ks = vec![[[An::one(), An::zero()], [An::zero(), An::one()]], z_inv()];
        if target == Target::A {
            ks.push(diag(An::one(), An::zeta_pow(-1)));
        }
        let found = try_candidates(target, &ks, &sigs);
        return TransResult { holds: found.is_some(), witness: found.map(|m| mat_strings(&m)), best_effort: false };
    };
    let n = anchor.arity();
    let base_sigs: Vec<Vec<An>> = fs.iter().map(|f| f.entries.clone()).collect();
    let p2_ratio = if in_p2(anchor) {
        let h = zhat(anchor);
        Some(&h[0] / &h[n])
    } else {
        None
    };
    match tensor_decompose(anchor) {
        TensorDecomposition::Distinct { u, v, .. } => {
            let s = Search { anchor: Anchor::Distinct { u: u.clone(), v: v.clone() }, n, sigs: base_sigs.clone() };
            let (found, partial) = s.run(target, p2_ratio.as_ref());
            if let Some(m) = found {
                return TransResult { holds: true, witness: Some(mat_strings(&m)), best_effort: false };
            }
            // the bisector may need sqrt(<u,u>/<v,v>) from outside the field
            if target == Target::M && partial && p2_ratio.is_none() {
                let d = &ip(&u, &u) / &ip(&v, &v);
                let sigs: Vec<Vec<QuadExt>> = base_sigs.iter().map(|g| g.iter().map(QuadExt::embed).collect()).collect();
                let found = try_candidates(target, &ext_bisector(&u, &v, &d), &sigs);
                return TransResult { holds: found.is_some(), witness: found.map(|m| mat_strings(&m)), best_effort: false };
            }
            TransResult { holds: false, witness: None, best_effort: partial }
        }
        TensorDecomposition::DoubleRoot { u, .. } => {
            let s = Search { anchor: Anchor::Double { u }, n, sigs: base_sigs };
            let (found, partial) = s.run(target, None);
            TransResult { holds: found.is_some(), witness: found.map(|m| mat_strings(&m)), best_effort: partial }
        }
        TensorDecomposition::Irrational { ext, .. } => {
            let sigs: Vec<Vec<QuadExt>> = base_sigs.iter().map(|g| g.iter().map(QuadExt::embed).collect()).collect();
            let s = Search { anchor: Anchor::Distinct { u: ext.u, v: ext.v }, n, sigs };
            let (found, partial) = s.run(target, None);
            TransResult { holds: found.is_some(), witness: found.map(|m| mat_strings(&m)), best_effort: partial }
        }
        _ => {
            let s = Search::<An> { anchor: Anchor::Other, n, sigs: base_sigs };
            let (found, partial) = s.run(target, None);
            TransResult { holds: found.is_some(), witness: found.map(|m| mat_strings(&m)), best_effort: partial }
        }
    }
}

/// Bisector frame over Q(w)(sqrt d) for base-field roots u, v with d = <u,u>/<v,v>.
fn ext_bisector(u: &[An; 2], v: &[An; 2], d: &An) -> Vec<Mat<QuadExt>> {
    let s = QuadExt::sqrt_of(d);
    let q = |a: &An| QuadExt::embed(a);
    let (u, v) = ([q(&u[0]), q(&u[1])], [q(&v[0]), q(&v[1])]);
    let mut out = Vec::new();
    for sg in [s.clone(), s.fneg()] {
        let b = [u[0].fadd(&sg.fmul(&v[0])), u[1].fadd(&sg.fmul(&v[1]))];
        if !ip(&b, &b).is_zero() {
            if let Some(k) = mat_inv(&cols(&b, &perp(&b))) {
                out.push(k);
            }
        }
    }
    out
}

/// F-star: degenerate signatures replaced by their unary.
fn star(fs: &[SymmetricSignature]) -> Vec<SymmetricSignature> {
    fs.iter()
        .map(|f| match degenerate_direction(&f.entries) {
            Some(u) if f.arity() >= 1 => SymmetricSignature::new(u.to_vec()),
            _ => f.clone(),
        })
        .collect()
}

/// Case 7 for sigma = +/-: F in ZP union M4^sigma and gcd of arities of F* n P2 at least 5.
pub fn case7_sigma(fs: &[SymmetricSignature]) -> Option<(bool, usize)> {
    let fs = nonzero(fs);
    let st = star(&fs);
    let g = gcd_all(st.iter().filter(|f| in_p2(f)).map(|f| f.arity()));
    for plus in [true, false] {
        let ok = fs.iter().all(|f| {
            let (p, m) = in_m4(f);
            in_zp(f) || if plus { p } else { m }
        });
        if ok && g >= 5 {
            return Some((plus, g));
        }
    }
    None
}

pub fn dichotomy_plholant_set(fs: &[SymmetricSignature]) -> SetVerdict {
    let table: Vec<SignatureClasses> = fs.iter().map(classify_signature).collect();
    let fs = nonzero(fs);
    let mut cases: Vec<(String, Option<SetWitness>)> = Vec::new();
    let nondeg: Vec<&SymmetricSignature> = fs.iter().filter(|f| !f.is_degenerate()).collect();
    if nondeg.iter().all(|f| f.arity() <= 2) {
        cases.push(("1".into(), None));
    }
    for (plus, tag) in [(true, "+"), (false, "-")] {
        let pick = |f: &SymmetricSignature| {
            let v = in_vanishing(f);
            let r = in_r2(f);
            if plus {
                (v.0, r.0)
            } else {
                (v.1, r.1)
            }
        };
        if fs.iter().all(|f| {
            let (v, r) = pick(f);
            v || (r && f.arity() == 2)
        }) {
            cases.push((format!("4{tag}"), None));
        }
        if nondeg.iter().all(|f| pick(f).1) {
            cases.push((format!("5{tag}"), None));
        }
    }
    if let Some((plus, g)) = case7_sigma(&fs) {
        cases.push((
            "7".into(),
            Some(SetWitness { class: format!("ZP + M4{} (gcd {g})", if plus { "+" } else { "-" }), transform: None }),
        ));
    }
    let mut best_effort = false;
    for (target, case) in [(Target::A, "2"), (Target::P, "3"), (Target::M, "6")] {
        let r = set_transformable(&fs, target);
        if r.holds {
            cases.push((case.into(), Some(SetWitness { class: target.name().into(), transform: r.witness })));
        } else {
            best_effort |= r.best_effort;
        }
    }
    let order = ["1", "4+", "4-", "5+", "5-", "7", "2", "3", "6"];
    cases.sort_by_key(|(c, _)| order.iter().position(|o| o == c));
    let outcome = match cases.first() {
        Some((case, w)) => {
            best_effort = false;
            Outcome::Tractable { case: case.clone(), all_cases: cases.iter().map(|(c, _)| c.clone()).collect(), witness: w.clone() }
        }
        None => Outcome::PHard { obstruction: "no tractable case of the set dichotomy applies".into() },
    };
    SetVerdict { framework: Framework::Plholant, outcome, best_effort, table }
}

/// Perfect matchings on hypergraphs with hyperedge sizes S.
pub fn hypergraph_verdict(sizes: &[usize]) -> Result<SetVerdict, ClassifyError> {
    if sizes.is_empty() {
        return Err(ClassifyError::Empty);
    }
    let t = gcd_all(sizes.iter().copied());
    let small = sizes.iter().all(|&s| s <= 2);
    let outcome = if t >= 5 {
        Outcome::Tractable { case: format!("gcd {t} >= 5"), all_cases: vec![format!("gcd {t} >= 5")], witness: None }
    } else if small {
        Outcome::Tractable { case: "sizes within {1,2}".into(), all_cases: vec!["sizes within {1,2}".into()], witness: None }
    } else {
        Outcome::PHard { obstruction: format!("gcd {t} <= 4 with a hyperedge of size >= 3") }
    };
    Ok(SetVerdict { framework: Framework::Hpm, outcome, best_effort: false, table: vec![] })
}
