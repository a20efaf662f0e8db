use super::*;
use proptest::prelude::*;

fn w(raw: &[i32]) -> FreeWord {
    FreeWord::from_signed(raw)
}

fn sg(gens: &[&[i32]]) -> SubgroupHandle {
    let g: Vec<FreeWord> = gens.iter().map(|r| w(r)).collect();
    SubgroupHandle::fold(2, &g)
}

/// Every product of at most `k` basis elements (or their inverses).
fn products(basis: &[FreeWord], k: usize) -> std::collections::BTreeSet<FreeWord> {
    let mut layer = vec![FreeWord::identity()];
    let mut all: std::collections::BTreeSet<FreeWord> = layer.iter().cloned().collect();
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &layer {
            for b in basis {
                for x in [b.clone(), b.inverse()] {
                    let q = p.mul(&x);
                    if all.insert(q.clone()) {
                        next.push(q);
                    }
                }
            }
        }
        layer = next;
    }
    all
}

#[test]
fn single_loop() {
    let h = sg(&[&[1]]);
    assert_eq!(h.core().vertex_count(), 1);
    assert_eq!(h.basis(), &[w(&[1])]);
}

#[test]
fn a_squared_b_shape() {
    let h = sg(&[&[1, 1], &[2]]);
    assert_eq!(h.core().vertex_count(), 2);
    assert_eq!(h.core().edge_count(), 3);
    assert_eq!(h.rank(), 2);
    for x in FreeWord::ball(2, 8) {
        let a_exp: i32 = x.letters().iter().filter(|l| l.generator() == 0).map(|l| l.sign()).sum();
        // a word lies in <a^2, b> iff every b-letter is read at an even a-height
        let mut height = 0i32;
        let mut ok = true;
        for l in x.letters() {
            if l.generator() == 0 {
                height += l.sign();
            } else if height.rem_euclid(2) != 0 {
                ok = false;
            }
        }
        assert_eq!(h.contains(&x), ok && a_exp % 2 == 0, "{x:?}");
    }
}

#[test]
fn a_and_ab_give_everything() {
    let h = sg(&[&[1], &[1, 2]]);
    assert_eq!(h, SubgroupHandle::whole(2));
    assert_eq!(h.core().vertex_count(), 1);
}

#[test]
fn membership_examples() {
    let h = sg(&[&[1, 1], &[2]]);
    assert_eq!(h.membership(&FreeWord::identity()), Some(FreeWord::identity()));
    assert_eq!(h.membership(&w(&[1])), None);
    assert!(!products(h.basis(), 3).contains(&w(&[1])));
    let x = w(&[1, 1, -2]);
    let e = h.membership(&x).unwrap();
    assert_eq!(h.expand(&e), x);
    let g = h.express_in_generators(&x).unwrap();
    assert_eq!(g, w(&[1, -2]));
    assert_eq!(h.expand_generators(&g), x);
}

#[test]
fn intersection_examples() {
    let a2 = SubgroupHandle::fold(2, &[w(&[1, 1])]);
    let a3 = SubgroupHandle::fold(2, &[w(&[1, 1, 1])]);
    let m = a2.intersect(&a3);
    assert_eq!(m.basis(), &[w(&[1; 6])]);
    for k in -12..=12i64 {
        let x = w(&[1]).pow(k);
        assert_eq!(m.contains(&x), a2.contains(&x) && a3.contains(&x));
    }
    assert!(sg(&[&[1]]).intersect(&sg(&[&[2]])).is_trivial());
    let h = sg(&[&[1, 1], &[2]]);
    let k = sg(&[&[1, 1, 1], &[2]]);
    let m = h.intersect(&k);
    for x in FreeWord::ball(2, 8) {
        assert_eq!(m.contains(&x), h.contains(&x) && k.contains(&x));
    }
}

#[test]
fn conjugation_examples() {
    let h = sg(&[&[1, 1], &[2, 1, -2]]);
    assert_eq!(h.conjugate(&FreeWord::identity()), h);
    let c = sg(&[&[1]]).conjugate(&w(&[2]));
    assert_eq!(c.basis(), &[w(&[2, 1, -2])]);
}

#[test]
fn preimage_examples() {
    let img = [w(&[1, 1, 2, 2])];
    let full = SubgroupHandle::fold(2, &img);
    let p = SubgroupHandle::preimage(&img, &full).unwrap();
    assert_eq!(p.basis(), &[w(&[1])]);
    let p = SubgroupHandle::preimage(&img, &sg(&[&[1]])).unwrap();
    assert!(p.is_trivial());
    for k in 1..=6 {
        assert!(!sg(&[&[1]]).contains(&img[0].pow(k)));
    }
    let p = SubgroupHandle::preimage(&[w(&[1, 1])], &SubgroupHandle::fold(2, &[w(&[1, 1, 1])])).unwrap();
    assert_eq!(p.basis(), &[w(&[1, 1, 1])]);
    assert_eq!(p.ambient_rank(), 1);
}

#[test]
fn preimage_rejects_non_injective() {
    let err = SubgroupHandle::preimage(&[w(&[1]), w(&[1, 1])], &SubgroupHandle::whole(2)).unwrap_err();
    assert_eq!(err, StallingsError::NotInjective { source_rank: 2, image: 1 });
}

#[test]
fn schreier_examples() {
    let (reps, _) = SubgroupHandle::whole(2).schreier_cosets(4);
    assert_eq!(reps, vec![FreeWord::identity()]);
    let h = sg(&[&[1, 1], &[2], &[1, 2, -1]]);
    let (reps, map) = h.schreier_cosets(3);
    assert_eq!(reps, vec![FreeWord::identity(), w(&[1])]);
    for (x, r) in &map {
        assert!(h.contains(&x.mul(&r.inverse())));
    }
}

/// Independent BFS over the Schreier graph: explores cosets by testing
/// `x y^-1 ∈ H` against already found representatives, shortest first.
fn schreier_oracle(h: &SubgroupHandle, l: usize) -> Vec<FreeWord> {
    let mut reps: Vec<FreeWord> = Vec::new();
    for x in FreeWord::ball(2, l) {
        if !reps.iter().any(|r| h.contains(&x.mul(&r.inverse()))) {
            reps.push(x);
        }
    }
    reps.sort();
    reps
}

#[test]
fn schreier_matches_oracle() {
    for gens in [&[&[1, 1][..], &[2][..]][..], &[&[1, 2, 1, -2][..]], &[&[1, 1, 1][..], &[2, 2][..], &[1, 2][..]]] {
        let h = sg(gens);
        for l in 0..=4 {
            assert_eq!(h.schreier_cosets(l).0, schreier_oracle(&h, l));
        }
    }
}

#[test]
fn left_coset_rep_is_least() {
    let h = sg(&[&[1, 1], &[2, 1, 2]]);
    for g in FreeWord::ball(2, 4) {
        let (r, k) = h.left_coset_rep(&g);
        assert!(h.contains(&k));
        assert_eq!(r.mul(&k), g);
        for y in FreeWord::ball(2, r.len()) {
            if h.contains(&g.inverse().mul(&y)) {
                assert!(r <= y, "{g:?}: {r:?} vs {y:?}");
            }
        }
    }
}

#[test]
fn left_cosets_match_enumeration() {
    for gens in [&[&[1, 1][..], &[2][..]][..], &[&[1, 2, 1, -2][..]], &[&[1, 1][..], &[2][..], &[1, 2, -1][..]]] {
        let h = sg(gens);
        for l in 0..=4 {
            let mut brute: Vec<FreeWord> = FreeWord::ball(2, l).iter().map(|g| h.left_coset_rep(g).0).filter(|r| r.len() <= l).collect();
            brute.sort();
            brute.dedup();
            assert_eq!(h.left_cosets(l).0, brute);
        }
    }
    assert!(!sg(&[&[1, 1], &[2], &[1, 2, -1]]).left_cosets(1).1);
    assert!(sg(&[&[1, 1], &[2], &[1, 2, -1]]).left_cosets(0).1);
    assert!(sg(&[&[1, 1]]).left_cosets(5).1);
}

#[test]
fn dot_export_mentions_every_edge() {
    let h = sg(&[&[1, 1], &[2]]);
    let dot = h.core().to_dot(&FreeGroup::of_rank(2), "H");
    assert_eq!(dot.matches("->").count(), 3);
    assert!(h.schreier_dot(&FreeGroup::of_rank(2), 2).contains("digraph"));
}

fn word_strategy(max: usize) -> impl Strategy<Value = FreeWord> {
    proptest::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2)], 0..=max)
        .prop_map(|v| FreeWord::from_signed(&v))
}

fn gens_strategy() -> impl Strategy<Value = Vec<FreeWord>> {
    proptest::collection::vec(word_strategy(5), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fold_is_order_independent(gens in gens_strategy(), seed in 0usize..6) {
        let h = SubgroupHandle::fold(2, &gens);
        let mut p = gens.clone();
        p.rotate_left(seed % gens.len());
        p.reverse();
        prop_assert_eq!(SubgroupHandle::fold(2, &p), h);
    }

    #[test]
    fn core_invariants(gens in gens_strategy()) {
        let h = SubgroupHandle::fold(2, &gens);
        let c = h.core();
        for v in 1..c.vertex_count() {
            prop_assert!(c.degree(v) >= 2);
        }
        prop_assert_eq!(h.rank(), c.edge_count() + 1 - c.vertex_count());
        for b in h.basis() {
            prop_assert!(h.contains(b));
        }
        for g in &gens {
            prop_assert!(h.contains(g));
            let e = h.express_in_generators(g).unwrap();
            prop_assert_eq!(&h.expand_generators(&e), g);
        }
    }

    #[test]
    fn membership_matches_products(gens in proptest::collection::vec(word_strategy(3), 1..=2)) {
        let h = SubgroupHandle::fold(2, &gens);
        let prods = products(h.basis(), 4);
        for x in FreeWord::ball(2, 6) {
            let e = h.membership(&x);
            if let Some(e) = &e {
                prop_assert_eq!(&h.expand(e), &x);
            }
            if prods.contains(&x) {
                prop_assert!(e.is_some());
            }
        }
    }

    #[test]
    fn intersection_laws(a in gens_strategy(), b in gens_strategy(), c in gens_strategy()) {
        let (h, k, m) = (SubgroupHandle::fold(2, &a), SubgroupHandle::fold(2, &b), SubgroupHandle::fold(2, &c));
        prop_assert_eq!(h.intersect(&k), k.intersect(&h));
        prop_assert_eq!(h.intersect(&k).intersect(&m), h.intersect(&k.intersect(&m)));
        prop_assert_eq!(h.intersect(&h), h.clone());
        let hk = h.intersect(&k);
        for x in FreeWord::ball(2, 5) {
            prop_assert_eq!(hk.contains(&x), h.contains(&x) && k.contains(&x));
        }
    }

    #[test]
    fn conjugation_laws(gens in gens_strategy(), x in word_strategy(4)) {
        let h = SubgroupHandle::fold(2, &gens);
        let c = h.conjugate(&x);
        prop_assert_eq!(c.conjugate(&x.inverse()), h.clone());
        for y in FreeWord::ball(2, 4) {
            prop_assert_eq!(c.contains(&y), h.contains(&y.conjugate(&x.inverse())));
        }
    }

    #[test]
    fn preimage_of_image(src in proptest::collection::vec(word_strategy(3), 1..=2), imgs in proptest::collection::vec(word_strategy(4), 2)) {
        let b = SubgroupHandle::fold(2, &src);
        let im = b.image(2, &imgs);
        match SubgroupHandle::preimage(&imgs, &im) {
            Ok(p) => {
                prop_assert!(b.is_subgroup_of(&p));
                prop_assert!(p.is_subgroup_of(&b));
            }
            Err(_) => prop_assert!(!SubgroupHandle::fold(2, &imgs).generators_are_free_basis()),
        }
    }

    #[test]
    fn coset_reps_distinct(gens in gens_strategy()) {
        let h = SubgroupHandle::fold(2, &gens);
        let (reps, _) = h.schreier_cosets(3);
        for (i, r) in reps.iter().enumerate() {
            for s in &reps[i + 1..] {
                prop_assert!(!h.contains(&r.mul(&s.inverse())));
            }
            prop_assert_eq!(&h.right_coset_rep(r), r);
        }
    }
}
