//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use kad::pdl::{Formula, Program};
use kad::{Fragment, Label, Term, Tree};
use proptest::prelude::*;
use proptest::strategy::Union;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn t(s: &str) -> Term {
    Term::parse(s).unwrap()
}

pub fn tree(s: &str) -> Tree {
    Tree::parse(s).unwrap()
}

/// A term using at most `budget` operators from `frag`.
pub fn term(rng: &mut impl Rng, budget: usize, frag: Fragment, vars: &[&str]) -> Term {
    let var = |rng: &mut dyn rand::RngCore| Term::var(vars[rng.random_range(0..vars.len())]);
    if budget == 0 {
        return var(rng);
    }
    let ops: &[&str] = match frag {
        Fragment::CD1 => &[";", "D", "1", "v"],
        Fragment::StarFree => &[";", "+", "D", "1", "0", "v"],
        Fragment::Full => &[";", "+", "D", "1", "0", "*", "v"],
        Fragment::WithAntidomain => &[";", "+", "D", "A", "1", "0", "*", "v"],
    };
    match ops[rng.random_range(0..ops.len())] {
        "v" => var(rng),
        "1" => Term::One,
        "0" => Term::Zero,
        "D" => Term::dom(term(rng, budget - 1, frag, vars)),
        "A" => Term::antidom(term(rng, budget - 1, frag, vars)),
        "*" => Term::star(term(rng, budget - 1, frag, vars)),
        op => {
            let l = rng.random_range(0..budget);
            let a = term(rng, l, frag, vars);
            let b = term(rng, budget - 1 - l, frag, vars);
            if op == ";" {
                Term::comp(a, b)
            } else {
                Term::union(a, b)
            }
        }
    }
}

/// Rewrites `s` with randomly chosen laws of relational algebra, so the
/// result is equivalent to `s`.
pub fn equivalent(rng: &mut impl Rng, s: &Term, steps: usize) -> Term {
    let mut cur = s.clone();
    for _ in 0..steps {
        cur = rewrite_somewhere(rng, &cur);
    }
    cur
}

fn rewrite_somewhere(rng: &mut impl Rng, s: &Term) -> Term {
    let kids = s.children();
    if !kids.is_empty() && rng.random_bool(0.6) {
        let k = rng.random_range(0..kids.len());
        let new = rewrite_somewhere(rng, kids[k]);
        return match (s, k) {
            (Term::Comp(_, r), 0) => Term::comp(new, (**r).clone()),
            (Term::Comp(l, _), _) => Term::comp((**l).clone(), new),
            (Term::Union(_, r), 0) => Term::union(new, (**r).clone()),
            (Term::Union(l, _), _) => Term::union((**l).clone(), new),
            (Term::Star(_), _) => Term::star(new),
            (Term::Dom(_), _) => Term::dom(new),
            (Term::Antidom(_), _) => Term::antidom(new),
            _ => unreachable!(),
        };
    }
    rewrite_here(rng, s)
}

fn rewrite_here(rng: &mut impl Rng, s: &Term) -> Term {
    let x = s.clone();
    match (rng.random_range(0..8), s) {
        (0, Term::Union(a, b)) => Term::union((**b).clone(), (**a).clone()),
        (1, Term::Dom(inner)) => match &**inner {
            Term::Union(a, b) => Term::union(Term::dom((**a).clone()), Term::dom((**b).clone())),
            Term::Comp(a, b) => Term::dom(Term::comp((**a).clone(), Term::dom((**b).clone()))),
            _ => Term::dom(Term::comp((**inner).clone(), Term::One)),
        },
        (2, Term::Comp(a, b)) => match &**b {
            Term::Union(c, d) => Term::union(
                Term::comp((**a).clone(), (**c).clone()),
                Term::comp((**a).clone(), (**d).clone()),
            ),
            _ => Term::comp(Term::dom(x.clone()), x),
        },
        (3, _) => Term::union(x.clone(), x),
        (4, _) => Term::comp(x, Term::One),
        (5, _) => Term::comp(Term::dom(x.clone()), x),
        (6, _) => Term::union(x, Term::Zero),
        _ => Term::comp(Term::One, x),
    }
}

/// A pair that is valid about half the time.
pub fn pair(rng: &mut impl Rng, budget: usize, frag: Fragment, vars: &[&str]) -> (Term, Term) {
    let k = rng.random_range(0..=budget);
    let s = term(rng, k, frag, vars);
    if rng.random_bool(0.5) {
        let steps = rng.random_range(1..4);
        let u = equivalent(rng, &s, steps);
        if u.operator_count() <= budget {
            return (s, u);
        }
    }
    let k = rng.random_range(0..=budget);
    (s, term(rng, k, frag, vars))
}

/// A random, generally unreduced, pointed tree.
pub fn random_tree(rng: &mut impl Rng, max_vertices: usize, labels: &[&str]) -> Tree {
    let n = rng.random_range(1..=max_vertices);
    let mut parent = vec![(0usize, 0usize); n];
    for (v, p) in parent.iter_mut().enumerate().skip(1) {
        *p = (rng.random_range(0..v), rng.random_range(0..labels.len()));
    }
    let point = rng.random_range(0..n);
    build(0, &parent, point, labels)
}

/// The tree with `parent[v] = (parent vertex, label index)` for `v >= 1`.
pub fn from_parents(parent: &[(usize, usize)], point: usize, labels: &[&str]) -> Tree {
    build(0, parent, point, labels)
}

fn build(v: usize, parent: &[(usize, usize)], point: usize, labels: &[&str]) -> Tree {
    let kids = (1..parent.len())
        .filter(|&c| parent[c].0 == v)
        .map(|c| {
            (
                Label::new(labels[parent[c].1]),
                build(c, parent, point, labels),
            )
        })
        .collect();
    Tree::node(v == point, kids)
}

/// A random formula over the atomic programs `a` and `b`.
pub fn formula(rng: &mut impl Rng, depth: usize) -> Formula {
    if depth == 0 {
        return if rng.random_bool(0.7) {
            Formula::Top
        } else {
            Formula::Bottom
        };
    }
    match rng.random_range(0..5) {
        0 => Formula::not(formula(rng, depth - 1)),
        1 => Formula::and(formula(rng, depth - 1), formula(rng, depth - 1)),
        _ => Formula::diamond(program(rng, depth - 1), formula(rng, depth - 1)),
    }
}

fn program(rng: &mut impl Rng, depth: usize) -> Program {
    if depth == 0 {
        return Program::atomic(["a", "b"][rng.random_range(0..2)]);
    }
    match rng.random_range(0..6) {
        0 => Program::test(formula(rng, depth - 1)),
        1 => Program::comp(program(rng, depth - 1), program(rng, depth - 1)),
        2 => Program::union(program(rng, depth - 1), program(rng, depth - 1)),
        3 => Program::star(program(rng, depth - 1)),
        _ => Program::atomic(["a", "b"][rng.random_range(0..2)]),
    }
}

/// Terms of `frag` over `vars` with at most about `depth` nested operators.
pub fn arb_term(frag: Fragment, vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Term> {
    let mut leaves = vec![proptest::sample::select(vars).prop_map(Term::var).boxed()];
    leaves.push(Just(Term::One).boxed());
    if frag >= Fragment::StarFree {
        leaves.push(Just(Term::Zero).boxed());
    }
    let leaf = Union::new(leaves);
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        let mut arms = vec![
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Term::comp(a, b))
                .boxed(),
            inner.clone().prop_map(Term::dom).boxed(),
        ];
        if frag >= Fragment::StarFree {
            arms.push(
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Term::union(a, b))
                    .boxed(),
            );
        }
        if frag >= Fragment::Full {
            arms.push(inner.clone().prop_map(Term::star).boxed());
        }
        if frag >= Fragment::WithAntidomain {
            arms.push(inner.prop_map(Term::antidom).boxed());
        }
        Union::new(arms)
    })
    .boxed()
}

/// Random unreduced trees, seeded so failures replay.
pub fn arb_tree(max_vertices: usize) -> BoxedStrategy<Tree> {
    any::<u64>()
        .prop_map(move |seed| random_tree(&mut rng(seed), max_vertices, &["a", "b"]))
        .boxed()
}

/// Random structures over `a` and `b` with `1..=max_n` vertices.
pub fn arb_struct(max_n: usize) -> BoxedStrategy<kad::RelStruct> {
    (1..=max_n)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(any::<bool>(), 2 * n * n)))
        .prop_map(|(n, bits)| {
            let labels = kad::term::alphabet(&["a", "b"]);
            let mut m = kad::RelStruct::new(n, &labels);
            for (b, on) in bits.iter().enumerate() {
                if *on {
                    let (l, e) = (b / (n * n), b % (n * n));
                    m.add_edge(&labels[l], e / n, e % n).unwrap();
                }
            }
            m
        })
        .boxed()
}
