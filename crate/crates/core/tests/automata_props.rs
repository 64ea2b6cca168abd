mod common;

use common::{arb_term, rng, t};
use kad::automata::{
    compile, complement, determinize, difference, extract_term, product, to_guarded, GuardedNFA,
};
use kad::freealg::member_down;
use kad::relstruct::{refute, tree_to_struct};
use kad::term::alphabet;
use kad::tree::enumerate;
use kad::{Fragment, Label, RelStruct, Term, Tree};
use proptest::prelude::*;
use rand::Rng;

fn small_trees() -> Vec<Tree> {
    enumerate(&alphabet(&["a", "b"]), 3)
}

/// Both automata over the union of their guards and letters.
fn guarded_pair(s: &Term, u: &Term) -> (GuardedNFA, GuardedNFA) {
    let (cs, cu) = (compile(s), compile(u));
    let mut guards = cs.guard_atoms();
    guards.extend(cu.guard_atoms());
    guards.sort();
    guards.dedup();
    let letters = alphabet(&["a", "b"]);
    let gs = to_guarded(&cs, &guards)
        .unwrap()
        .lift(&guards, &letters)
        .unwrap();
    let gu = to_guarded(&cu, &guards)
        .unwrap()
        .lift(&guards, &letters)
        .unwrap();
    (gs, gu)
}

/// Random words over the symbols of `n`, well formed or not.
fn random_words(n: &GuardedNFA, seed: u64, count: usize) -> Vec<Vec<u32>> {
    let symbols = (1u32 << n.guards().len()) + n.letters().len() as u32;
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let len = r.random_range(0..7);
            (0..len).map(|_| r.random_range(0..symbols)).collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn compile_matches_membership(u in arb_term(Fragment::Full, &["a", "b"], 4)) {
        let a = compile(&u);
        for tr in small_trees() {
            prop_assert_eq!(a.accepts_tree(&tr), member_down(&tr, &u), "{} on {}", u, tr);
        }
    }

    #[test]
    fn guarded_automata_match_membership(u in arb_term(Fragment::Full, &["a", "b"], 4)) {
        let (g, _) = guarded_pair(&u, &u);
        for tr in small_trees() {
            prop_assert_eq!(g.accepts_tree(&tr).unwrap(), member_down(&tr, &u));
        }
    }

    #[test]
    fn determinize_and_complement(u in arb_term(Fragment::Full, &["a", "b"], 3), seed in any::<u64>()) {
        let (g, _) = guarded_pair(&u, &u);
        let d = determinize(&g);
        let c = complement(&g);
        for w in random_words(&g, seed, 60) {
            prop_assert_eq!(d.accepts_word(&w), g.accepts_word(&w));
            if c.accepts_word(&w) {
                prop_assert!(!g.accepts_word(&w));
            }
        }
        for tr in small_trees() {
            let w = g.tree_word(&tr).unwrap();
            prop_assert_ne!(c.accepts_word(&w), g.accepts_word(&w));
        }
        prop_assert!(product(&g, &c).unwrap().is_empty());
    }

    #[test]
    fn difference_is_the_reduction_invariant(s in arb_term(Fragment::Full, &["a", "b"], 3), u in arb_term(Fragment::Full, &["a", "b"], 3)) {
        let (gs, gu) = guarded_pair(&s, &u);
        let diff = difference(&gs, &gu).unwrap();
        for tr in small_trees() {
            let expected = member_down(&tr, &s) && !member_down(&tr, &u);
            prop_assert_eq!(diff.accepts_tree(&tr).unwrap(), expected, "{} - {} on {}", s, u, tr);
        }
    }

    #[test]
    fn extraction_preserves_tree_satisfaction(u in arb_term(Fragment::Full, &["a", "b"], 3)) {
        let (g, _) = guarded_pair(&u, &u);
        let tau = extract_term(&g);
        for tr in small_trees() {
            prop_assert_eq!(member_down(&tr, &tau), member_down(&tr, &u), "{} became {}", u, tau);
        }
    }
}

#[test]
fn accepts_examples() {
    let labels = alphabet(&["a", "b"]);
    let a = Label::new("a");
    let b = Label::new("b");
    let mut m = RelStruct::new(3, &labels);
    m.add_edge(&a, 0, 1).unwrap();
    assert!(compile(&t("a")).accepts(&m, 0, &[(a.clone(), 1)]).unwrap());
    assert!(compile(&t("1")).accepts(&m, 2, &[]).unwrap());
    let guarded = compile(&t("D(b);a"));
    assert!(!guarded.accepts(&m, 0, &[(a.clone(), 1)]).unwrap());
    m.add_edge(&b, 0, 2).unwrap();
    assert!(guarded.accepts(&m, 0, &[(a, 1)]).unwrap());
}

#[test]
fn extraction_examples() {
    let zero = extract_term(&to_guarded(&compile(&t("0")), &[]).unwrap());
    assert!(refute(&zero, &t("0"), 2).unwrap().is_none());
    for tr in small_trees() {
        assert!(!member_down(&tr, &zero));
    }

    let u = t("D(a);b");
    let (g, _) = guarded_pair(&u, &u);
    let back = compile(&extract_term(&g));
    for tr in small_trees() {
        assert_eq!(back.accepts_tree(&tr), member_down(&tr, &u), "{tr}");
    }
}

#[test]
fn trivial_tree_path_is_empty() {
    let (m, root, point) = tree_to_struct(&Tree::trivial());
    assert_eq!((m.vertex_count(), root, point), (1, 0, 0));
    assert!(compile(&t("1")).accepts_tree(&Tree::trivial()));
    assert!(!compile(&t("a")).accepts_tree(&Tree::trivial()));
}
