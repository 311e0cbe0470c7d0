use holant_core::algebra::AlgebraicNumber as An;
use holant_core::classify::*;
use holant_core::gen;
use holant_core::sigcalc::{named, transform, SymmetricSignature as S, Transform2x2 as T};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sig(v: &[i64]) -> S {
    S::from_ints(v)
}

fn pow_sum(u: [An; 2], v: [An; 2], y: An, n: usize) -> S {
    named::degenerate(&u, n).add(&named::degenerate(&v, n).scale(&y))
}

#[test]
fn basic_classes() {
    assert!(in_a(&sig(&[2, 0, 2, 0])));
    let a = An::zeta();
    let f = S::new(vec![An::one(), a.clone(), -(&a * &a)]);
    assert!(in_a_dagger(&f) && !in_a(&f));
    let g = sig(&[1, 0, 0, 5]);
    assert!(in_p(&g) && !in_a(&g));
    assert!(in_matchgate(&sig(&[1, 0, 3, 0, 9])));
    assert!(!in_matchgate(&sig(&[1, 0, 3, 0, 8])));
    assert!(in_matchgate(&sig(&[0, 4, 0, 0, 0])));
    assert!(in_matchgate(&sig(&[0, 0, 0, 4, 0])));
    for b in [2, 3, -5] {
        let f = sig(&[1, b, 1]);
        assert!(in_m_hat(&f) && !in_p(&f) && !in_a(&f) && !in_a_dagger(&f));
        let g = sig(&[1, b, -1]);
        assert!(in_m_hat_dagger(&g) && !in_m_hat(&g));
    }
    // b = 1 + i: b^4 = -4
    let b = An::from_coeffs_i64([1, 0, 1, 0]);
    let f = S::new(vec![An::one(), b, An::one()]);
    assert!(in_m_hat(&f) && !in_p(&f) && !in_a(&f) && !in_a_dagger(&f));
}

#[test]
fn degenerate_affine_table() {
    // u^{(x)n} is affine iff u is proportional to [1,0], [0,1] or [1, i^r]
    for n in 1..5 {
        for (u, want) in [
            ([1, 0], true),
            ([0, 1], true),
            ([1, 1], true),
            ([1, -1], true),
            ([2, 1], false),
            ([1, 3], false),
        ] {
            let u = [An::from_int(u[0]), An::from_int(u[1])];
            assert_eq!(in_a(&named::degenerate(&u, n)), want, "{u:?} n={n}");
        }
        assert!(in_a(&named::degenerate(&[An::one(), An::i()], n)));
        assert!(!in_a(&named::degenerate(&[An::one(), An::zeta()], n)));
    }
}

#[test]
fn vanishing_m4_p2() {
    let z = T::z();
    for n in 3..8 {
        let mut h = vec![An::zero(); n + 1];
        h[0] = An::from_int(3);
        h[1] = An::one();
        let f = transform(&z, &S::new(h));
        assert!(in_vanishing(&f).0);
        assert!(!in_m4(&f).0);
        assert!(in_m4(&transform(&z, &named::exact_one(n))).0);
        assert!(in_m4(&transform(&z, &named::all_but_one(n))).1);
    }
    assert!(in_p2(&transform(&z, &sig(&[1, 0, 0, 0, 3]))));
}

#[test]
fn family_examples() {
    let one = An::one;
    let f = pow_sum([one(), one()], [one(), -one()], An::from_int(5), 4);
    let m = in_transformable_family(&f);
    assert!(m.p1 && !m.a1);
    assert!(m.witnesses["P1"].verify(&f));

    let e5 = named::exact_one(5);
    let m = in_transformable_family(&e5);
    assert!(m.m3);
    let w = &m.witnesses["M3"];
    assert!(w.verify(&e5));
    assert!(w.transform.is_orthogonal());
    assert!(w.canonical.proportional(&e5));

    let a = An::zeta();
    let f = pow_sum([one(), a.clone()], [one(), -&a], An::i(), 4);
    let m = in_transformable_family(&f);
    assert!(m.a3);
    assert!(m.witnesses["A3"].verify(&f));
}

#[test]
fn irrational_roots_are_decided_in_an_extension() {
    // f_{k+2} = f_{k+1} + f_k: roots (1 +- sqrt5)/2
    let f = sig(&[2, 1, 3, 4]);
    let m = in_transformable_family(&f);
    assert!(m.in_extension);
    assert!(m.witnesses.is_empty());
}

#[test]
fn binary_eq_examples() {
    let v = |x: [i64; 3], s: &[usize]| {
        let f = x.map(An::from_int);
        dichotomy_binary_eq([&f[0], &f[1], &f[2]], s).unwrap()
    };
    assert_eq!(v([1, 2, 4], &[3]).case(), Some("condition 1"));
    assert_eq!(v([1, 2, 4], &[5, 7]).case(), Some("condition 1"));
    assert_eq!(v([0, 1, 0], &[3]).case(), Some("condition 2"));
    assert!(!v([3, 1, 0], &[3]).is_tractable());
    let z = An::zero();
    assert_eq!(dichotomy_binary_eq([&z, &z, &z], &[1, 2]), Err(ClassifyError::BadS));
}

/// Independent check of the five conditions by direct evaluation over small inputs.
#[test]
fn binary_eq_conditions_by_enumeration() {
    for f0 in -2..=2i64 {
        for f1 in -2..=2i64 {
            for f2 in -2..=2i64 {
                for d in 1..=6u64 {
                    let p0 = f0.pow(d as u32);
                    let p2 = f2.pow(d as u32);
                    let want = f0 * f2 == f1 * f1
                        || (f0 == 0 && f2 == 0)
                        || f1 == 0
                        || (f0 * f2 == -f1 * f1 && p0 == -p2 && p0 != 0)
                        || (p0 == p2 && p0 != 0);
                    let f = [f0, f1, f2].map(An::from_int);
                    let got = binary_eq_conditions([&f[0], &f[1], &f[2]], d).iter().any(|&b| b);
                    assert_eq!(got, want);
                }
            }
        }
    }
}

#[test]
fn plcsp_examples() {
    let b = S::from_ints(&[1, 2, 1]);
    let v = dichotomy_plcsp2(&[b.clone()]);
    assert_eq!(v.case(), Some("M-hat"));
    let a = An::zeta();
    let g = S::new(vec![An::one(), a.clone(), -(&a * &a)]);
    assert!(!dichotomy_plcsp2(&[b, g]).is_tractable());
    let v = dichotomy_plcsp(&[sig(&[1, 0, 0, 1])]);
    match &v.outcome {
        Outcome::Tractable { all_cases, .. } => assert!(all_cases.contains(&"P".into()) && all_cases.contains(&"A".into())),
        _ => panic!(),
    }
    assert!(!dichotomy_plcsp(&[sig(&[3, 1, 0])]).is_tractable());
}

#[test]
fn single_examples() {
    assert_eq!(dichotomy_single(&named::exact_one(7)).case(), Some("M3"));
    let z = T::z();
    for n in 3..7 {
        let mut h = vec![An::zero(); n + 1];
        h[0] = An::from_int(2);
        h[1] = An::one();
        h[n] = An::from_int(3);
        assert!(!dichotomy_single(&transform(&z, &S::new(h))).is_tractable(), "n={n}");
    }
    for v in [1, 2, -3] {
        assert!(!dichotomy_single(&sig(&[v, 1, 0, 0, 0])).is_tractable());
    }
    assert_eq!(dichotomy_single(&sig(&[1, 1, 1, 1])).case(), Some("degenerate"));
}

#[test]
fn set_examples() {
    let z = T::z();
    let f = transform(&z, &named::equality(5));
    let g = transform(&z, &named::exact_one(3));
    let v = dichotomy_plholant_set(&[f, g.clone()]);
    assert_eq!(v.case(), Some("7"));
    let f4 = transform(&z, &named::equality(4));
    let v = dichotomy_plholant_set(&[f4, g]);
    assert!(!v.is_tractable(), "{:?}", v.outcome);

    // V+ and V- together, neither in M4
    let mut hp = vec![An::zero(); 6];
    hp[0] = An::one();
    hp[1] = An::from_int(2);
    let mut hm = hp.clone();
    hm.reverse();
    let fp = transform(&z, &S::new(hp));
    let fm = transform(&z, &S::new(hm));
    assert!(in_vanishing(&fp).0 && in_vanishing(&fm).1);
    assert!(!dichotomy_plholant_set(&[fp.clone(), fm]).is_tractable());
    assert!(dichotomy_plholant_set(&[fp]).is_tractable());
}

#[test]
fn set_transformability() {
    // P-transformable through an orthogonal frame
    let h = T::new(An::from_ratio(3, 5), An::from_ratio(-4, 5), An::from_ratio(4, 5), An::from_ratio(3, 5));
    let f = transform(&h, &named::gen_eq(An::one(), An::from_int(7), 3));
    let g = transform(&h, &named::gen_eq(An::from_int(2), An::from_int(-1), 4));
    let v = dichotomy_plholant_set(&[f.clone(), g.clone()]);
    assert!(v.is_tractable());
    match &v.outcome {
        Outcome::Tractable { all_cases, .. } => assert!(all_cases.contains(&"3".to_string())),
        _ => unreachable!(),
    }
    // adding [1,0,1]-incompatible binary breaks it
    assert!(!dichotomy_plholant_set(&[f, g, sig(&[1, 2, 3])]).is_tractable());

    // M-transformable through the frame of a double root
    let e = named::exact_one(4);
    let m = transform(&h, &e);
    let v = dichotomy_plholant_set(&[m.clone(), transform(&h, &sig(&[0, 1, 0, 1, 0]))]);
    assert!(v.is_tractable());
    assert_eq!(v.case(), Some("6"));

    // ExactOne_3 next to a generalized equality outside every frame it allows
    let v = dichotomy_plholant_set(&[named::exact_one(3), sig(&[1, 0, 0, 2])]);
    assert!(!v.is_tractable());
}

#[test]
fn hypergraph_examples() {
    assert!(hypergraph_verdict(&[5, 10]).unwrap().is_tractable());
    assert!(hypergraph_verdict(&[1, 2]).unwrap().is_tractable());
    assert!(!hypergraph_verdict(&[3, 6]).unwrap().is_tractable());
    assert_eq!(hypergraph_verdict(&[]), Err(ClassifyError::Empty));
}

/// Cross-check the A1 rule against every canonical A1 form for small arities.
#[test]
fn a1_rule_matches_enumeration() {
    let one = An::one;
    for n in 3..=6usize {
        let mut allowed = Vec::new();
        for t in 0..2i64 {
            for r in 0..4i64 {
                allowed.push(An::zeta_pow(t * n as i64 + 2 * r));
            }
        }
        for j in 0..8 {
            let beta = An::zeta_pow(j);
            let f = pow_sum([one(), one()], [one(), -one()], beta.clone(), n);
            let m = in_transformable_family(&f);
            assert!(m.p1);
            assert_eq!(m.a1, allowed.contains(&beta), "n={n} beta=zeta^{j}");
            // M1 canonical: beta = +- i^n
            let m1 = beta == An::i_pow(n as i64) || beta == -An::i_pow(n as i64);
            assert_eq!(m.m1, m1, "n={n} j={j}");
        }
        let f = pow_sum([one(), one()], [one(), -one()], An::from_int(2), n);
        assert!(!in_transformable_family(&f).a1);
    }
}

const ALL: [TractableClass; 18] = {
    use TractableClass::*;
    [P, A, Adagger, Mhat, MhatDagger, Matchgate, Vplus, Vminus, P1, P2, A1, A3, M1, M2, M3, M4plus, M4minus, ZP]
};

fn accepts(c: TractableClass, cl: &SignatureClasses) -> bool {
    cl.classes().contains(&c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_members_are_accepted(seed in any::<u64>(), n in 3usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in ALL {
            let f = gen::member(&mut rng, c, n);
            let cl = classify_signature(&f);
            prop_assert!(accepts(c, &cl), "{c:?} rejected {f}");
            for w in cl.families.witnesses.values() {
                prop_assert!(w.verify(&f));
            }
            let fam = &cl.families;
            // hierarchy: M1 => A1 => P1, P2 => M2
            if fam.applicable {
                prop_assert!(!fam.m1 || fam.a1);
                prop_assert!(!fam.a1 || fam.p1);
                prop_assert!(!fam.p2 || fam.m2);
            }
        }
    }

    #[test]
    fn witnesses_verify_on_random_input(seed in any::<u64>(), n in 3usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = gen::signature(&mut rng, n, 2);
        for w in in_transformable_family(&f).witnesses.values() {
            prop_assert!(w.verify(&f));
        }
    }

    #[test]
    fn single_transformable_members_are_tractable(seed in any::<u64>(), n in 3usize..7) {
        use TractableClass::*;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in [P1, M2, A3, M3, M4plus, M4minus, Vplus, Vminus] {
            let f = gen::member(&mut rng, c, n);
            if f.is_degenerate() { continue; }
            prop_assert!(dichotomy_single(&f).is_tractable(), "{c:?} {f}");
        }
    }

    #[test]
    fn transformed_sets_stay_transformable(seed in any::<u64>()) {
        // F contained in H * P for an orthogonal H is P-transformable
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = gen::rational_orthogonal(&mut rng);
        let fs: Vec<S> = (3..6).map(|n| transform(&h, &gen::member(&mut rng, TractableClass::P, n))).collect();
        prop_assert!(dichotomy_plholant_set(&fs).is_tractable());
    }
}
