//! Named identities from the theory, checked exactly.  Used by `holant verify`.

use crate::algebra::AlgebraicNumber as An;
use crate::classify::*;
use crate::fixtures;
use crate::gen;
use crate::grid::{gate_signature, holant_bruteforce, orthogonal_transform, PlanarGrid, DEFAULT_CAP};
use crate::sigcalc::{
    derivative, named, partial, recurrence_analysis, signature_matrix_ops, tensor_decompose, transform, transform_row,
    vanishing_degrees, RecurrenceType, SymmetricSignature as S, TensorDecomposition, Transform2x2,
};
use crate::solvers::{eo_geneq_eval, evaluate, hypergraph_pm, EoInstance, EoNode, EoSig, Hyperedge, Method, PlanarHypergraph, SolveError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Debug;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Default)]
struct Suite(Vec<Check>);

impl Suite {
    fn ok(&mut self, name: impl Into<String>, passed: bool) {
        self.0.push(Check { name: name.into(), passed, detail: String::new() });
    }

    fn eq<T: PartialEq + Debug>(&mut self, name: impl Into<String>, got: T, want: T) {
        let passed = got == want;
        let detail = if passed { String::new() } else { format!("got {got:?}, want {want:?}") };
        self.0.push(Check { name: name.into(), passed, detail });
    }

    fn res<T: PartialEq + Debug, E: Debug>(&mut self, name: impl Into<String>, got: Result<T, E>, want: T) {
        match got {
            Ok(g) => self.eq(name, g, want),
            Err(e) => self.0.push(Check { name: name.into(), passed: false, detail: format!("error: {e:?}") }),
        }
    }
}

fn int(v: i64) -> An {
    An::from_int(v)
}

fn sig(v: &[i64]) -> S {
    S::from_ints(v)
}

fn gate(g: &PlanarGrid) -> Result<S, String> {
    let s = gate_signature(g, DEFAULT_CAP).map_err(|e| e.to_string())?;
    s.symmetric.ok_or_else(|| "gate is not symmetric".into())
}

fn pow(u: &[An; 2], n: usize) -> S {
    named::degenerate(u, n)
}

fn repeat(f: &S, g: &S, k: usize) -> Result<S, String> {
    (0..k).try_fold(f.clone(), |acc, _| derivative(&acc, g).map_err(|e| e.to_string()))
}

/// All checks, in a fixed order.
pub fn run_all() -> Vec<Check> {
    let mut s = Suite::default();
    gadgets(&mut s);
    calculus(&mut s);
    signatures(&mut s);
    verdicts(&mut s);
    grids(&mut s);
    s.0
}

fn gadgets(s: &mut Suite) {
    s.res("self-loop of =2 has value 2", holant_bruteforce(&fixtures::self_loop_eq2()).map_err(|e| e.to_string()), int(2));
    s.res("triangle of ExactOne_3 is [0,1,0,1]", gate(&fixtures::triangle_gadget()), sig(&[0, 1, 0, 1]));
    s.res("planar tetrahedron of ExactOne_4 is [0,2,0,1,0]", gate(&fixtures::tetrahedron_gadget()), sig(&[0, 2, 0, 1, 0]));
    for (label, a) in [("2", int(2)), ("i", An::i()), ("w", An::zeta()), ("1+i", An::from_coeffs_i64([1, 0, 1, 0]))] {
        for k in 1..=4 {
            let want = named::gen_eq(An::one(), a.pow(k as u64), 2 * k);
            s.res(format!("chain gadget with a={label}, k={k} is [1,0,...,0,a^k]"), gate(&fixtures::chain_gadget(&a, k)), want);
        }
    }
    for r in 0..4 {
        s.res(format!("four [1,0,0,0,i^{r}] joined by =2 pairs give =4"), gate(&fixtures::eq4_gadget(r)), named::equality(4));
    }
}

fn calculus(s: &mut Suite) {
    s.res("partial of [1,0,1,0,1] is [2,0,2]", partial(&sig(&[1, 0, 1, 0, 1])).map_err(|e| e.to_string()), sig(&[2, 0, 2]));
    s.res(
        "[0,1,0]-derivative of [0,1,0,0,0] is 2[1,0]^2",
        derivative(&sig(&[0, 1, 0, 0, 0]), &sig(&[0, 1, 0])).map_err(|e| e.to_string()),
        sig(&[2, 0, 0]),
    );
    let w = An::zeta();
    for k in 1..=5 {
        s.res(
            format!("[1,w]-derivative {k} times of =_{} is [1,0,...,0,w^{k}]", 2 * k),
            repeat(&named::equality(2 * k), &S::new(vec![An::one(), w.clone()]), k),
            named::gen_eq(An::one(), w.pow(k as u64), k),
        );
    }

    // derivatives of a tensor power
    let points: [[An; 2]; 3] = [[int(1), int(2)], [int(3), -int(1)], [An::one(), An::zeta()]];
    let unaries: [[An; 2]; 2] = [[int(2), int(-1)], [An::i(), int(3)]];
    let binaries: [[An; 3]; 2] = [[int(1), int(0), int(1)], [int(2), int(-1), An::zeta()]];
    let mut all = true;
    let mut detail = String::new();
    let mut expect = |ok: bool, what: String| {
        if !ok && detail.is_empty() {
            detail = what;
        }
        all &= ok;
    };
    for n in 1..=10 {
        for st in &points {
            let f = pow(st, n);
            let [sv, tv] = st;
            for ab in &unaries {
                let g = S::new(ab.to_vec());
                let c = &(&ab[0] * sv) + &(&ab[1] * tv);
                for k in 1..n {
                    let ok = repeat(&f, &g, k).ok() == Some(pow(st, n - k).scale(&c.pow(k as u64)));
                    expect(ok, format!("unary, n={n}, k={k}"));
                }
            }
            for abc in &binaries {
                let g = S::new(abc.to_vec());
                let c = &(&(&abc[0] * &(sv * sv)) + &(&(&int(2) * &abc[1]) * &(sv * tv))) + &(&abc[2] * &(tv * tv));
                for k in (1..).take_while(|k| n > 2 * k) {
                    let ok = repeat(&f, &g, k).ok() == Some(pow(st, n - 2 * k).scale(&c.pow(k as u64)));
                    expect(ok, format!("binary, n={n}, k={k}"));
                }
            }
            let c = &sv.pow(4) + &tv.pow(4);
            for k in (1..).take_while(|k| n > 4 * k) {
                let ok = repeat(&f, &named::equality(4), k).ok() == Some(pow(st, n - 4 * k).scale(&c.pow(k as u64)));
                expect(ok, format!("=4, n={n}, k={k}"));
            }
        }
        for m in 0..n {
            let g = S::new((0..=m as i64).map(|j| int(j * j - 3 * j + 5)).collect());
            let mut want = vec![An::zero(); n - m + 1];
            want[0] = g.entries[0].clone();
            want[n - m] = &want[n - m] + &g.entries[m];
            let ok = derivative(&named::equality(n), &g).ok() == Some(S::new(want));
            expect(ok, format!("g-derivative of =_{n}, arity(g)={m}"));
        }
    }
    s.0.push(Check { name: "derivatives of tensor powers and of equalities, arity <= 10".into(), passed: all, detail });

    // f_k = c^k (n - 2k) with c in {1, -1, i, -i}
    let lin = |c: &An, n: usize| S::new((0..=n).map(|k| &c.pow(k as u64) * &int(n as i64 - 2 * k as i64)).collect());
    let eq4 = named::equality(4);
    let mut all = true;
    let mut detail = String::new();
    for c in [int(1), int(-1), An::i(), -An::i()] {
        let real = c == int(1) || c == int(-1);
        let mut expect = |ok: bool, what: String| {
            if !ok && detail.is_empty() {
                detail = format!("c={c}: {what}");
            }
            all &= ok;
        };
        for n in 3..=10 {
            let f = lin(&c, n);
            let d = partial(&f).unwrap();
            if real {
                expect(d == lin(&c, n - 2).scale(&int(2)), format!("partial, n={n}"));
                if n % 2 == 1 {
                    let want = S::new(vec![An::one(), -&c]).scale(&int(2).pow((n as u64 - 1) / 2));
                    expect(repeat(&f, &named::equality(2), (n - 1) / 2).ok() == Some(want), format!("repeated partial, n={n}"));
                }
            } else {
                let want = pow(&[An::one(), c.clone()], n - 2).scale(&int(4));
                expect(d == want, format!("partial, n={n}"));
            }
            if n > 4 {
                expect(derivative(&f, &eq4).ok() == Some(lin(&c, n - 4).scale(&int(2))), format!("=4-derivative, n={n}"));
            }
            if n % 4 == 1 {
                let want = S::new(vec![An::one(), -&c]).scale(&int(2).pow((n as u64 - 1) / 4));
                expect(repeat(&f, &eq4, (n - 1) / 4).ok() == Some(want), format!("repeated =4-derivative, n={n}"));
            }
            if n % 4 == 3 {
                let e = if real { (n as u64 + 1) / 4 } else { (n as u64 + 5) / 4 };
                let tail = if real { -&c } else { c.clone() };
                let want = S::new(vec![An::one(), tail]).scale(&int(2).pow(e));
                let got = repeat(&f, &eq4, (n - 3) / 4).and_then(|x| partial(&x).map_err(|e| e.to_string()));
                expect(got.ok() == Some(want), format!("partial after repeated =4-derivative, n={n}"));
            }
        }
    }
    s.0.push(Check { name: "derivatives of f_k = c^k (n-2k), c in {1,-1,i,-i}, arity <= 10".into(), passed: all, detail });
}

fn signatures(s: &mut Suite) {
    s.eq("[1,0,1] Z^(x)2 is [0,2,0]", transform_row(&sig(&[1, 0, 1]), &Transform2x2::z()), sig(&[0, 2, 0]));
    let rec = recurrence_analysis(&sig(&[1, 0, 0, 5]));
    let ok = matches!(&rec, Ok(RecurrenceType::Recurrence { abc, .. }) if abc[0].is_zero() && abc[2].is_zero() && !abc[1].is_zero());
    s.ok("[1,0,0,5] satisfies only the recurrence <0,1,0>", ok);
    for n in 0..5 {
        let v = vanishing_degrees(&S::new(vec![An::zero(); n + 1]));
        s.eq(format!("zero signature of arity {n} has rd = -1, vd = arity + 1"), (v.rd_plus, v.vd_plus), (-1, n as i64 + 1));
    }
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut bad = vec![];
    for t in 0..300 {
        let n = 1 + t % 8;
        let f = gen::signature(&mut r, n, 3);
        if f.is_zero() {
            continue;
        }
        let v = vanishing_degrees(&f);
        if v.vd_plus + v.rd_plus != n as i64 || v.vd_minus + v.rd_minus != n as i64 {
            bad.push(f);
        }
    }
    s.eq("vd + rd = arity on random nonzero signatures", bad, vec![]);
    for n in 3..=8 {
        let ok = matches!(tensor_decompose(&named::exact_one(n)), TensorDecomposition::DoubleRoot { u, v }
            if u == [An::one(), An::zero()] && v == [An::zero(), An::one()]);
        s.ok(format!("ExactOne_{n} has double-root form on [1,0], [0,1]"), ok);
    }
    let det = signature_matrix_ops(&sig(&[0, 0, 1, 0, 0]).to_general()).map(|r| r.det_compressed.is_zero());
    s.res("compressed matrix of [0,0,1,0,0] is nonsingular", det.map_err(|e| e.to_string()), false);

    let a = An::zeta();
    let f = S::new(vec![An::one(), a.clone(), -(&a * &a)]);
    s.eq("[1,a,-a^2] is in A-dagger but not A", (in_a_dagger(&f), in_a(&f)), (true, false));
    let g = sig(&[1, 0, 0, 5]);
    s.eq("[1,0,0,5] is in P but not A", (in_p(&g), in_a(&g)), (true, false));
    s.ok("[1,0,3,0,9] is a matchgate signature", in_matchgate(&sig(&[1, 0, 3, 0, 9])));
    for (label, b) in [("2", int(2)), ("-5", int(-5)), ("1+i", An::from_coeffs_i64([1, 0, 1, 0]))] {
        let f = S::new(vec![An::one(), b.clone(), An::one()]);
        s.eq(
            format!("[1,{label},1] is in M-hat and not in P, A, A-dagger"),
            (in_m_hat(&f), in_p(&f), in_a(&f), in_a_dagger(&f)),
            (true, false, false, false),
        );
        let g = S::new(vec![An::one(), b, -An::one()]);
        s.eq(format!("[1,{label},-1] is in M-hat-dagger, not M-hat"), (in_m_hat_dagger(&g), in_m_hat(&g)), (true, false));
    }
    for n in 3..7 {
        let mut h = vec![An::zero(); n + 1];
        h[0] = int(3);
        h[1] = An::one();
        let f = transform(&Transform2x2::z(), &S::new(h));
        s.eq(format!("Z[3,1,0,...,0] of arity {n} is vanishing but not M4"), (in_vanishing(&f).0, in_m4(&f).0), (true, false));
    }
    let e5 = named::exact_one(5);
    let m = in_transformable_family(&e5);
    let ok = m.m3 && m.witnesses.get("M3").is_some_and(|w| w.verify(&e5) && w.transform == Transform2x2::identity());
    s.ok("ExactOne_5 is M3 with the identity transform", ok);
    let f = pow(&[An::one(), a.clone()], 4).add(&pow(&[An::one(), -&a], 4).scale(&An::i()));
    s.ok("[1,a]^4 + i[1,-a]^4 is A3", in_transformable_family(&f).a3);
}

fn verdicts(s: &mut Suite) {
    let bq = |f: [i64; 3], set: &[usize]| {
        let f = f.map(int);
        dichotomy_binary_eq([&f[0], &f[1], &f[2]], set).map(|v| v.case().map(str::to_string))
    };
    for set in [&[3][..], &[4, 6], &[5, 10]] {
        s.eq(format!("[1,2,4] with {set:?} is tractable by condition 1"), bq([1, 2, 4], set), Ok(Some("condition 1".into())));
        s.eq(format!("[0,1,0] with {set:?} is tractable by condition 2"), bq([0, 1, 0], set), Ok(Some("condition 2".into())));
    }
    let b = sig(&[1, 3, 1]);
    let a = An::zeta();
    let g = S::new(vec![An::one(), a.clone(), -(&a * &a)]);
    s.eq("Pl-#CSP^2 of [1,3,1] is tractable by M-hat", dichotomy_plcsp2(&[b.clone()]).case(), Some("M-hat"));
    s.ok("Pl-#CSP^2 of [1,3,1] with [1,a,-a^2] is hard", !dichotomy_plcsp2(&[b, g]).is_tractable());
    s.eq("ExactOne_7 is tractable by M3", dichotomy_single(&named::exact_one(7)).case(), Some("M3"));
    for n in 3..7 {
        let mut h = vec![An::zero(); n + 1];
        h[0] = int(2);
        h[1] = An::one();
        h[n] = int(-3);
        let f = transform(&Transform2x2::z(), &S::new(h));
        s.ok(format!("Z[2,1,0,...,0,-3] of arity {n} is hard"), !dichotomy_single(&f).is_tractable());
    }
    for v in [1, 2, -3] {
        s.ok(format!("[{v},1,0,0,0] is hard"), !dichotomy_single(&sig(&[v, 1, 0, 0, 0])).is_tractable());
    }
    let z = Transform2x2::z();
    let zeo3 = transform(&z, &named::exact_one(3));
    let v = dichotomy_plholant_set(&[transform(&z, &named::equality(5)), zeo3.clone()]);
    s.eq("{Z(=5), Z(ExactOne_3)} is tractable by case 7", v.case(), Some("7"));
    let v = dichotomy_plholant_set(&[transform(&z, &named::equality(4)), zeo3]);
    s.ok("{Z(=4), Z(ExactOne_3)} is hard", !v.is_tractable());
    let mut hp = vec![An::zero(); 6];
    hp[0] = An::one();
    hp[1] = int(2);
    let mut hm = hp.clone();
    hm.reverse();
    let v = dichotomy_plholant_set(&[transform(&z, &S::new(hp)), transform(&z, &S::new(hm))]);
    s.ok("V+ and V- signatures outside M4 together are hard", !v.is_tractable());
    for (set, want) in [(&[5, 10][..], true), (&[1, 2], true), (&[3, 6], false)] {
        s.eq(format!("hyperedge sizes {set:?}"), hypergraph_verdict(set).map(|v| v.is_tractable()), Ok(want));
    }
}

fn grids(s: &mut Suite) {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let z = Transform2x2::z();
    let vanish = gen::book_grid(&mut r, &[3, 3, 4, 2, 2], |_, v, d| {
        let mut h = vec![An::zero(); d + 1];
        h[0] = int(v as i64 + 2);
        h[1] = An::one();
        transform(&z, &S::new(h))
    });
    s.res("grid of V+ signatures has value 0", holant_bruteforce(&vanish).map_err(|e| e.to_string()), An::zero());

    let g = gen::book_grid(&mut r, &[3, 3, 3, 3, 2], |_, v, d| gen::signature(&mut ChaCha8Rng::seed_from_u64(v as u64), d, 3));
    let h = Transform2x2::new(An::from_ratio(3, 5), An::from_ratio(-4, 5), An::from_ratio(4, 5), An::from_ratio(3, 5));
    let before = holant_bruteforce(&g).map_err(|e| e.to_string());
    let after = orthogonal_transform(&g, &h).map_err(|e| e.to_string()).and_then(|t| holant_bruteforce(&t).map_err(|e| e.to_string()));
    s.ok("orthogonal transform of a non-bipartite grid keeps its value", before.is_ok() && before == after);

    // three =5 joined in a triangle by disequalities, each with an ExactOne_3 on its other ports
    let mut nodes = vec![];
    let mut links = vec![];
    for j in 0..3 {
        let b = 10 * j;
        nodes.push(EoNode { sig: EoSig::GenEq { a: An::one(), b: An::one() }, ports: vec![b, b + 1, b + 2, b + 3, b + 4] });
        nodes.push(EoNode { sig: EoSig::ExactOne { weight: An::one() }, ports: vec![b + 7, b + 6, b + 5] });
        links.extend([[b + 2, b + 5], [b + 3, b + 6], [b + 4, b + 7]]);
        links.push([b + 1, (b + 10) % 30]);
    }
    let odd = EoInstance { nodes, links, scalar: An::one() };
    s.res("an odd disequality cycle of equalities gives 0", eo_geneq_eval(&odd).map_err(|e| e.to_string()), An::zero());

    let five = PlanarHypergraph {
        vertices: (0..5).collect(),
        hyperedges: vec![Hyperedge { id: 0, members: (0..5).collect() }],
        rotation: Default::default(),
    };
    let got = hypergraph_pm(&five, DEFAULT_CAP).map(|h| (h.verdict.is_tractable(), h.value));
    s.res("one hyperedge of size 5 has one perfect matching", got.map_err(|e| e.to_string()), (true, An::one()));
    let tri = PlanarHypergraph {
        vertices: (0..6).collect(),
        hyperedges: vec![Hyperedge { id: 0, members: vec![0, 1, 2] }, Hyperedge { id: 1, members: vec![3, 4, 5] }, Hyperedge { id: 2, members: vec![2, 3, 4] }],
        rotation: Default::default(),
    };
    let got = hypergraph_pm(&tri, DEFAULT_CAP).map(|h| (h.verdict.is_tractable(), h.value));
    s.res("size-3 hyperedges: hard verdict, count still returned", got.map_err(|e| e.to_string()), (false, An::one()));

    let g = gen::book_grid(&mut r, &[4; 14], |_, _, _| sig(&[0, 0, 1, 0, 0]));
    let ok = matches!(evaluate(&g, Method::Auto, DEFAULT_CAP), Err(e @ SolveError::Unroutable { .. }) if e.to_string().contains("PHard"));
    s.ok("4-regular [0,0,1,0,0] grid beyond the cap is refused with a hardness note", ok);
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_identities_hold() {
        let failed: Vec<_> = super::run_all().into_iter().filter(|c| !c.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }
}
