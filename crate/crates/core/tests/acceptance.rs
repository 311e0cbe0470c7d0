//! Acceptance criteria, one line each.  Runs without the libtest harness so the
//! summary is always printed; exits non-zero if any criterion fails.

mod common;

use common::*;
use holant_core::algebra::AlgebraicNumber as An;
use holant_core::classify::*;
use holant_core::fixtures;
use holant_core::gen;
use holant_core::grid::{gate_signature, holographic_transform_bipartite, orthogonal_transform, PlanarGrid, DEFAULT_CAP};
use holant_core::identities;
use holant_core::sigcalc::{
    derivative, named, signature_matrix_ops, transform, vanishing_degrees, GeneralSignature, SymmetricSignature as S,
    Transform2x2,
};
use holant_core::solvers::*;
use rand::Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("solvers agree with brute force", oracle_equivalence),
        ("hypergraph perfect matchings", hypergraph),
        ("gadget and calculus identities", gadgets),
        ("holographic invariance", holographic),
        ("vanishing signatures", vanishing),
        ("classifier soundness and verdicts", classifier),
        ("compressed signature matrix", compressed_matrix),
        ("binary signature with equalities", binary_eq),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {}: PASS  {title} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {title}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(101);
    let k4 = geometric(&[(0.0, 2.0), (-2.0, -1.0), (2.0, -1.0), (0.0, 0.0)], &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)]);
    ensure!(fkt_count_pm(&k4).unwrap() == int(3), "K4 does not have 3 perfect matchings");
    let mut pts = vec![];
    let mut edges = vec![];
    for y in 0..4 {
        for x in 0..4 {
            pts.push((x as f64, y as f64));
            let v = 4 * y + x;
            if x < 3 {
                edges.push((v, v + 1));
            }
            if y < 3 {
                edges.push((v, v + 4));
            }
        }
    }
    let grid = geometric(&pts, &edges);
    let (got, want) = (fkt_count_pm(&grid).unwrap(), pm_oracle(&grid));
    ensure!(got == want && got == int(36), "4x4 grid: fkt {got}, enumeration {want}");

    let n = 120;
    for _ in 0..n {
        let g = random_weighted_graph(&mut r);
        ensure!(g.edges.len() <= 18, "graph too large");
        let want = brute(&g.to_weighted_grid().unwrap());
        ensure!(fkt_count_pm(&g).unwrap() == want, "fkt differs on {}", serde_json::to_string(&g).unwrap());
    }
    let mut graded = |name: &str, eval: &dyn Fn(&PlanarGrid) -> Result<An, SolveError>, make: &mut dyn FnMut(&mut ChaCha) -> PlanarGrid| {
        for _ in 0..n {
            let g = make(&mut r);
            ensure!(g.edges.len() <= 18, "{name}: grid too large");
            let got = eval(&g).map_err(|e| format!("{name}: {e}"))?;
            ensure!(got == brute(&g), "{name} differs on {}", g.to_json());
        }
        Ok(())
    };
    graded("product_eval", &product_eval, &mut |r| {
        let n = r.gen_range(1..=8);
        random_grid(r, n, 1, 5, 18, |r, k| gen::member(r, TractableClass::P, k))
    })?;
    graded("affine_eval", &affine_eval, &mut |r| {
        let n = r.gen_range(1..=7);
        random_grid(r, n, 1, 4, 14, |r, k| gen::member(r, TractableClass::A, k))
    })?;
    graded("vanishing_eval", &vanishing_eval, &mut |r| {
        let class = if r.gen_bool(0.5) { TractableClass::Vplus } else { TractableClass::Vminus };
        let n = r.gen_range(1..=6);
        random_grid(r, n, 1, 5, 16, |r, k| gen::member(r, class, k))
    })?;
    for i in 0..n {
        let inst = random_eo_instance(&mut r, ARITY_SETS[i % ARITY_SETS.len()], 18, i % 2 == 0);
        ensure!(inst.links.len() <= 18, "EO instance too large");
        let got = eo_geneq_eval(&inst).map_err(|e| e.to_string())?;
        ensure!(got == brute(&inst.to_grid()), "eo_geneq_eval differs on {}", serde_json::to_string(&inst).unwrap());
    }
    Ok(format!("K4, 4x4 grid, {n} instances each for fkt, product, affine, vanishing, eo"))
}

type ChaCha = rand_chacha::ChaCha8Rng;

fn hypergraph() -> Outcome {
    let mut r = rng(102);
    let sets: [&[usize]; 6] = [&[5], &[10], &[5, 5], &[5, 10], &[5, 5, 5], &[15]];
    let mut nonzero = 0;
    let n = 60;
    for i in 0..n {
        let h = random_hypergraph(&mut r, sets[i % sets.len()]);
        ensure!(h.sizes().iter().sum::<usize>() <= 18, "too many incidences");
        let res = hypergraph_pm(&h, DEFAULT_CAP).map_err(|e| e.to_string())?;
        let want = exact_covers(&h);
        ensure!(res.verdict.is_tractable(), "gcd >= 5 not tractable");
        ensure!(res.value == int(want as i64), "count {} != enumeration {want}", res.value);
        nonzero += (want > 0) as usize;
    }
    // every size set drawn from 1..=15 with up to three sizes
    let mut checked = 0;
    for a in 1..=15usize {
        for b in a..=15 {
            for c in b..=15 {
                for set in [vec![a], vec![a, b], vec![a, b, c]] {
                    let t = set.iter().fold(0, |g, &s| num_gcd(g, s));
                    let v = hypergraph_verdict(&set).map_err(|e| e.to_string())?;
                    if t >= 5 {
                        ensure!(v.is_tractable(), "{set:?} has gcd {t} but is not tractable");
                    } else if set.iter().any(|&s| s >= 3) {
                        ensure!(!v.is_tractable(), "{set:?} has gcd {t} but is not hard");
                    }
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{n} gcd>=5 hypergraphs match enumeration ({nonzero} nonzero), {checked} size sets classified"))
}

fn num_gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn gadgets() -> Outcome {
    let gate = |g: &PlanarGrid| gate_signature(g, DEFAULT_CAP).map_err(|e| e.to_string()).map(|s| s.symmetric);
    ensure!(gate(&fixtures::triangle_gadget())? == Some(S::from_ints(&[0, 1, 0, 1])), "triangle");
    ensure!(gate(&fixtures::tetrahedron_gadget())? == Some(S::from_ints(&[0, 2, 0, 1, 0])), "tetrahedron");
    let mut r = rng(103);
    let mut chains = 0;
    for k in 1..=4 {
        for _ in 0..3 {
            let a = gen::nonzero(&mut r, 3);
            let want = named::gen_eq(An::one(), a.pow(k as u64), 2 * k);
            ensure!(gate(&fixtures::chain_gadget(&a, k))? == Some(want), "chain gadget a={a} k={k}");
            chains += 1;
        }
    }
    for rr in 0..4 {
        ensure!(gate(&fixtures::eq4_gadget(rr))? == Some(named::equality(4)), "=4 gadget r={rr}");
    }
    for j in 0..8 {
        let w = An::zeta_pow(j);
        for k in 1..=5 {
            let mut f = named::equality(2 * k);
            for _ in 0..k {
                f = derivative(&f, &S::new(vec![An::one(), w.clone()])).map_err(|e| e.to_string())?;
            }
            ensure!(f == named::gen_eq(An::one(), w.pow(k as u64), k), "[1,w^{j}] derivative of =_{}", 2 * k);
        }
    }
    let checks = identities::run_all();
    let bad: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| format!("{} {}", c.name, c.detail)).collect();
    ensure!(bad.is_empty(), "identity suite: {bad:?}");
    Ok(format!("triangle, tetrahedron, {chains} chains, 4 =4 gadgets, 40 derivative towers, {} suite identities", checks.len()))
}

fn invertible(r: &mut ChaCha) -> Transform2x2 {
    loop {
        let t = Transform2x2::new(gen::element(r, 2), gen::element(r, 2), gen::element(r, 2), gen::element(r, 2));
        if t.is_invertible() {
            return t;
        }
    }
}

fn holographic() -> Outcome {
    let mut r = rng(104);
    let n = 200;
    for _ in 0..n {
        let left = degrees(&mut r, 3, 1, 4, 12);
        let mut right = vec![];
        let mut rest: usize = left.iter().sum();
        while rest > 0 {
            let k = r.gen_range(1..=rest.min(4));
            right.push(k);
            rest -= k;
        }
        let g = gen::bipartite_book_grid(&mut r, &left, &right, |r, _, k| gen::signature(r, k, 2));
        ensure!(g.edges.len() <= 12, "grid too large");
        let t = invertible(&mut r);
        let h = holographic_transform_bipartite(&g, &t).map_err(|e| e.to_string())?;
        ensure!(brute(&h) == brute(&g), "Holant theorem fails on {} with {t:?}", g.to_json());
    }
    let root2 = &An::zeta() + &An::zeta_pow(7);
    let hadamard = Transform2x2::from_ints(1, 1, 1, -1).scale(&root2.inv().unwrap());
    for i in 0..n {
        let k = r.gen_range(1..=6);
        let g = random_grid(&mut r, k, 1, 4, 12, |r, k| gen::signature(r, k, 2));
        let t = if i % 4 == 0 { hadamard.clone() } else { gen::rational_orthogonal(&mut r) };
        ensure!(t.is_orthogonal(), "not orthogonal");
        let h = orthogonal_transform(&g, &t).map_err(|e| e.to_string())?;
        ensure!(brute(&h) == brute(&g), "orthogonal theorem fails on {}", g.to_json());
    }
    Ok(format!("{n} bipartite grids with invertible transforms, {n} general grids with orthogonal transforms"))
}

fn vanishing() -> Outcome {
    let mut r = rng(105);
    for class in [TractableClass::Vplus, TractableClass::Vminus] {
        for _ in 0..100 {
            let n = r.gen_range(1..=6);
            let g = random_grid(&mut r, n, 1, 5, 14, |r, k| gen::member(r, class, k));
            ensure!(brute(&g).is_zero(), "{class:?} grid is nonzero: {}", g.to_json());
        }
    }
    for i in 0..1000 {
        let n = 1 + i % 9;
        let f = if i % 3 == 0 { gen::member(&mut r, TractableClass::Vplus, n.max(1)) } else { gen::signature(&mut r, n, 2) };
        let v = vanishing_degrees(&f);
        let a = f.arity() as i64;
        ensure!(v.vd_plus + v.rd_plus == a && v.vd_minus + v.rd_minus == a, "vd + rd != arity for {f}");
    }
    Ok("200 vanishing grids, 1000 signatures".into())
}

const ALL: [TractableClass; 18] = {
    use TractableClass::*;
    [P, A, Adagger, Mhat, MhatDagger, Matchgate, Vplus, Vminus, P1, P2, A1, A3, M1, M2, M3, M4plus, M4minus, ZP]
};

fn classifier() -> Outcome {
    let mut r = rng(106);
    for c in ALL {
        for i in 0..500 {
            let f = gen::member(&mut r, c, 3 + i % 4);
            let cl = classify_signature(&f);
            ensure!(cl.classes().contains(&c), "{c:?} rejects generated member {f}");
            let fam = &cl.families;
            if fam.applicable {
                ensure!(!fam.m1 || fam.a1, "M1 but not A1: {f}");
                ensure!(!fam.a1 || fam.p1, "A1 but not P1: {f}");
                ensure!(!fam.p2 || fam.m2, "P2 but not M2: {f}");
            }
            ensure!(!cl.p2 || fam.m2 || !fam.applicable, "P2 but not M2: {f}");
        }
    }
    for b in [int(2), int(-3), An::from_coeffs_i64([1, 0, 1, 0]), An::zeta() + int(1)] {
        let f = S::new(vec![An::one(), b.clone(), An::one()]);
        ensure!(in_m_hat(&f) && !in_p(&f) && !in_a(&f) && !in_a_dagger(&f), "[1,{b},1]");
    }
    let a = An::zeta();
    let f = S::new(vec![An::one(), a.clone(), -(&a * &a)]);
    ensure!(in_a_dagger(&f) && !in_a(&f), "[1,a,-a^2]");
    for v in [1, 2, -5] {
        ensure!(!dichotomy_single(&S::from_ints(&[v, 1, 0, 0, 0])).is_tractable(), "[{v},1,0,0,0] not hard");
    }
    let z = Transform2x2::z();
    for n in 3..=7 {
        for (x, y) in [(1, 1), (2, -3)] {
            let mut h = vec![An::zero(); n + 1];
            h[0] = int(x);
            h[1] = An::one();
            h[n] = int(y);
            ensure!(!dichotomy_single(&transform(&z, &S::new(h))).is_tractable(), "Z[{x},1,0..,{y}] arity {n} not hard");
        }
    }
    let zeo3 = transform(&z, &named::exact_one(3));
    let v = dichotomy_plholant_set(&[transform(&z, &named::equality(5)), zeo3.clone()]);
    ensure!(v.case() == Some("7"), "Z(=5), Z(EO3) gave {:?}", v.case());
    ensure!(!dichotomy_plholant_set(&[transform(&z, &named::equality(4)), zeo3]).is_tractable(), "Z(=4), Z(EO3) not hard");
    Ok(format!("{} members accepted, hierarchy held, verdict fixtures reproduced", 500 * ALL.len()))
}

fn leibniz(m: &[[An; 3]; 3]) -> An {
    let perms = [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)];
    perms.iter().fold(An::zero(), |acc, (p, s)| {
        let t = &(&m[0][p[0]] * &m[1][p[1]]) * &m[2][p[2]];
        if *s > 0 {
            &acc + &t
        } else {
            &acc - &t
        }
    })
}

fn compressed_matrix() -> Outcome {
    let r0 = signature_matrix_ops(&S::from_ints(&[0, 0, 1, 0, 0]).to_general()).map_err(|e| e.to_string())?;
    ensure!(!r0.det_compressed.is_zero(), "det of [0,0,1,0,0] is zero");
    let mut r = rng(107);
    let n = 300;
    for i in 0..n {
        // a redundant matrix M[(x1 x2)][(x4 x3)] = N[|x1 x2|][|x4 x3|]
        let nm: [[An; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| gen::element(&mut r, 3)));
        let nm = if i % 3 == 0 {
            // symmetric f: N = [[f0,f1,f2],[f1,f2,f3],[f2,f3,f4]]
            let f: Vec<An> = (0..5).map(|_| gen::element(&mut r, 3)).collect();
            std::array::from_fn(|a| std::array::from_fn(|b| f[a + b].clone()))
        } else {
            nm
        };
        let entries: Vec<An> = (0..16usize)
            .map(|x| {
                let bit = |k: usize| (x >> (3 - k)) & 1;
                nm[bit(0) + bit(1)][bit(3) + bit(2)].clone()
            })
            .collect();
        let rep = signature_matrix_ops(&GeneralSignature::new(4, entries)).map_err(|e| e.to_string())?;
        ensure!(rep.redundant, "matrix not recognised as redundant");
        // compression averages the middle rows and adds the middle columns
        let want = &int(2) * &leibniz(&nm);
        ensure!(rep.det_compressed == want, "det {} != {}", rep.det_compressed, want);
    }
    Ok(format!("[0,0,1,0,0] nonsingular (det {}), {n} redundant matrices", r0.det_compressed))
}

/// Gaussian integers, exactly.
#[derive(Clone, Copy, PartialEq, Debug)]
struct Gi(i128, i128);

impl Gi {
    fn mul(self, o: Gi) -> Gi {
        Gi(self.0 * o.0 - self.1 * o.1, self.0 * o.1 + self.1 * o.0)
    }
    fn neg(self) -> Gi {
        Gi(-self.0, -self.1)
    }
    fn pow(self, d: u32) -> Gi {
        (0..d).fold(Gi(1, 0), |acc, _| acc.mul(self))
    }
    fn is_zero(self) -> bool {
        self == Gi(0, 0)
    }
    fn an(self) -> An {
        An::from_coeffs_i64([self.0 as i64, 0, self.1 as i64, 0])
    }
}

fn binary_eq() -> Outcome {
    let mut r = rng(108);
    let units = [Gi(1, 0), Gi(0, 1), Gi(-1, 0), Gi(0, -1)];
    let small = |r: &mut ChaCha| Gi(r.gen_range(-2..=2), r.gen_range(-2..=2));
    let mut hits = [0usize; 6];
    let n = 1000;
    for _ in 0..n {
        let f0 = small(&mut r);
        let f2 = if r.gen_bool(0.5) { f0.mul(units[r.gen_range(0..4)]) } else { small(&mut r) };
        let f1 = match r.gen_range(0..3) {
            0 => units[r.gen_range(0..4)],
            1 => Gi(0, 0),
            _ => small(&mut r),
        };
        let mut s: Vec<usize> = (0..r.gen_range(1..=3)).map(|_| r.gen_range(1..=12)).collect();
        if s.iter().all(|&k| k < 3) {
            s.push(r.gen_range(3..=12));
        }
        let d = s.iter().fold(0, |g, &k| num_gcd(g, k)) as u32;
        let (p0, p2) = (f0.pow(d), f2.pow(d));
        let conds = [
            f0.mul(f2) == f1.mul(f1),
            f0.is_zero() && f2.is_zero(),
            f1.is_zero(),
            f0.mul(f2) == f1.mul(f1).neg() && p0 == p2.neg() && !p0.is_zero(),
            p0 == p2 && !p0.is_zero(),
        ];
        let want = conds.iter().position(|&c| c);
        let (a0, a1, a2) = (f0.an(), f1.an(), f2.an());
        let v = dichotomy_binary_eq([&a0, &a1, &a2], &s).map_err(|e| e.to_string())?;
        let got = v.case().map(|c| c.trim_start_matches("condition ").parse::<usize>().unwrap() - 1);
        ensure!(got == want, "[{a0},{a1},{a2}] with {s:?}: got {got:?}, want {want:?}");
        hits[want.map_or(5, |k| k)] += 1;
    }
    ensure!(hits.iter().all(|&h| h > 0), "some condition never exercised: {hits:?}");
    Ok(format!("{n} pairs; first holding condition 1..5 / hard: {hits:?}"))
}
