mod common;

use common::{arb_struct, arb_term, t, tree};
use kad::exec::Mode;
use kad::freealg::{
    concat_sets, decide_cd1, decide_cd1_with_zero, decide_star_free, interp_star_free,
    interp_truncated, maximal, maximal_in, meet_finite, member_down, single_interp,
    star_free_witness, star_iter,
};
use kad::relstruct::{hom_into, satisfies, tree_to_struct};
use kad::{Antichain, Fragment, Term, Tree};
use proptest::prelude::*;

/// Interpretation without intermediate `maximal` calls.
fn naive(t: &Term) -> Vec<Tree> {
    match t {
        Term::Var(l) => vec![Tree::edge(l.clone())],
        Term::Zero => vec![],
        Term::One => vec![Tree::trivial()],
        Term::Union(a, b) => naive(a).into_iter().chain(naive(b)).collect(),
        Term::Comp(a, b) => {
            let rhs = naive(b);
            naive(a)
                .iter()
                .flat_map(|x| rhs.iter().map(move |y| x.concat(y)))
                .collect()
        }
        Term::Dom(a) => naive(a).iter().map(Tree::dom).collect(),
        _ => unreachable!("star-free only"),
    }
}

fn antichain(depth: u32) -> BoxedStrategy<Antichain> {
    arb_term(Fragment::StarFree, &["a", "b"], depth)
        .prop_map(|u| interp_star_free(&u).unwrap())
        .boxed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cd1_agrees_with_star_free(s in arb_term(Fragment::CD1, &["a", "b"], 5), u in arb_term(Fragment::CD1, &["a", "b"], 5)) {
        prop_assert_eq!(decide_cd1(&s, &u).unwrap(), decide_star_free(&s, &u).unwrap());
        prop_assert_eq!(decide_cd1(&s, &s).unwrap(), true);
    }

    #[test]
    fn maximal_order_is_irrelevant(u in arb_term(Fragment::StarFree, &["a", "b"], 4)) {
        let l = interp_star_free(&u).unwrap();
        prop_assert_eq!(maximal(naive(&u)), l.clone());
        prop_assert_eq!(maximal_in(Mode::Sequential, naive(&u)), l.clone());
        for (i, x) in l.trees().iter().enumerate() {
            for (j, y) in l.trees().iter().enumerate() {
                prop_assert!(i == j || !x.leq(y));
            }
        }
    }

    #[test]
    fn interpretations_satisfy_their_term(u in arb_term(Fragment::StarFree, &["a", "b"], 5)) {
        for tr in interp_star_free(&u).unwrap().trees() {
            prop_assert!(member_down(tr, &u), "{} {}", tr, u);
        }
    }

    #[test]
    fn satisfaction_is_a_hom_from_some_tree(u in arb_term(Fragment::StarFree, &["a", "b"], 4), m in arb_struct(3)) {
        let l = interp_star_free(&u).unwrap();
        let n = m.vertex_count();
        for x in 0..n {
            for y in 0..n {
                let lhs = satisfies(x, y, &u, &m).unwrap();
                let rhs = l.trees().iter().any(|tr| hom_into(tr, &m, x, y));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn truncated_star_trees_are_sound(u in arb_term(Fragment::Full, &["a", "b"], 4), m in arb_struct(3)) {
        let (l, _) = interp_truncated(&u, 4).unwrap();
        let n = m.vertex_count();
        for x in 0..n {
            for y in 0..n {
                if l.trees().iter().any(|tr| hom_into(tr, &m, x, y)) {
                    prop_assert!(satisfies(x, y, &u, &m).unwrap());
                }
            }
        }
    }

    #[test]
    fn invalid_pairs_come_with_separating_trees(s in arb_term(Fragment::StarFree, &["a", "b"], 4), u in arb_term(Fragment::StarFree, &["a", "b"], 4)) {
        match star_free_witness(&s, &u).unwrap() {
            None => prop_assert!(decide_star_free(&s, &u).unwrap()),
            Some(w) => {
                prop_assert!(!decide_star_free(&s, &u).unwrap());
                prop_assert_ne!(member_down(&w, &s), member_down(&w, &u));
                let (m, root, point) = tree_to_struct(&w);
                let m = m.with_labels(&kad::term::alphabet(&["a", "b"]));
                prop_assert_ne!(
                    satisfies(root, point, &s, &m).unwrap(),
                    satisfies(root, point, &u, &m).unwrap()
                );
            }
        }
    }

    #[test]
    fn meet_is_a_semilattice(x in antichain(3), y in antichain(3), z in antichain(3)) {
        prop_assert_eq!(meet_finite(&x, &y), meet_finite(&y, &x));
        prop_assert_eq!(
            meet_finite(&meet_finite(&x, &y), &z),
            meet_finite(&x, &meet_finite(&y, &z))
        );
        prop_assert_eq!(meet_finite(&x, &x), x);
    }

    #[test]
    fn converged_star_gains_nothing_later(u in arb_term(Fragment::StarFree, &["a", "b"], 3), cap in 1usize..5) {
        let l = interp_star_free(&u).unwrap();
        let (star, converged) = star_iter(&l, cap);
        if converged {
            let mut power = Antichain::singleton(Tree::trivial());
            for _ in 0..=cap + 3 {
                for tr in power.trees() {
                    prop_assert!(star.covers(tr), "{} escapes", tr);
                }
                power = concat_sets(&power, &l);
            }
        }
    }

    #[test]
    fn antichain_text_round_trip(l in antichain(4)) {
        prop_assert_eq!(Antichain::parse(&l.to_string()).unwrap(), l);
    }
}

#[test]
fn documented_examples() {
    assert!(decide_cd1(&t("D(a;b)"), &t("D(a;D(b))")).unwrap());
    assert!(decide_cd1(&t("D(a);a"), &t("a")).unwrap());
    assert!(!decide_cd1(&t("a;b"), &t("b;a")).unwrap());
    assert!(decide_star_free(&t("D(a+b)"), &t("D(a)+D(b)")).unwrap());
    assert!(decide_star_free(&t("a;(b+c)"), &t("a;b + a;c")).unwrap());
    assert!(!decide_star_free(&t("D(a)"), &t("1")).unwrap());
    assert!(decide_cd1_with_zero(&t("a;0"), &t("0;b")).unwrap());
    assert!(!decide_cd1_with_zero(&t("a;0"), &t("a")).unwrap());
    assert_eq!(single_interp(&t("D(a;b)")).unwrap(), tree("{a:{b:{}}}!"));
    assert!(decide_cd1(&t("a*"), &t("a")).is_err());
}

#[test]
fn star_examples() {
    let da = interp_star_free(&t("D(a)")).unwrap();
    assert_eq!(
        star_iter(&da, 5),
        (Antichain::singleton(Tree::trivial()), true)
    );
    assert_eq!(
        star_iter(&Antichain::empty(), 3),
        (Antichain::singleton(Tree::trivial()), true)
    );
    let (a_star, converged) = star_iter(&interp_star_free(&t("a")).unwrap(), 5);
    assert!(!converged);
    assert_eq!(a_star.len(), 6);
}
