//! Tree interpretations of terms: single trees for the `{;, 1, D}` fragment
//! and antichains of trees once `+` and `0` are allowed.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::relstruct::{satisfies, tree_to_struct_over};
use crate::term::{Fragment, Label, Term};
use crate::tree::Tree;

/// Default number of powers accumulated by [`star_iter`].
pub const DEFAULT_STAR_CAP: usize = 16;

/// A finite set of pairwise `<=`-incomparable reduced trees, sorted.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Antichain {
    trees: Vec<Tree>,
}

impl Antichain {
    pub fn empty() -> Antichain {
        Antichain::default()
    }

    pub fn singleton(t: Tree) -> Antichain {
        Antichain {
            trees: vec![t.reduce()],
        }
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn contains(&self, t: &Tree) -> bool {
        self.trees.binary_search(t).is_ok()
    }

    /// `t` lies below some member.
    pub fn covers(&self, t: &Tree) -> bool {
        self.trees.iter().any(|u| t.leq(u))
    }

    /// One tree per line, in canonical order.
    pub fn parse(text: &str) -> Result<Antichain> {
        let trees = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| Tree::parse(l).map(|t| t.reduce()))
            .collect::<Result<Vec<_>>>()?;
        let out = maximal(trees.clone());
        if out.len() != trees.len() {
            return Err(Error::Tree("trees are not pairwise incomparable".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trees {
            writeln!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Antichain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.trees).finish()
    }
}

/// The `<=`-maximal elements of a set of reduced trees.
pub fn maximal<I: IntoIterator<Item = Tree>>(trees: I) -> Antichain {
    maximal_in(Mode::default(), trees)
}

pub fn maximal_in<I: IntoIterator<Item = Tree>>(mode: Mode, trees: I) -> Antichain {
    let mut all: Vec<Tree> = trees.into_iter().collect();
    all.sort();
    all.dedup();
    // trees that are not reduced could tie in both directions; callers pass reduced ones
    debug_assert!(all.iter().all(Tree::is_reduced));
    let snapshot = all.clone();
    let kept = exec::filter(mode, all, |t| !snapshot.iter().any(|u| u != t && t.leq(u)));
    Antichain { trees: kept }
}

/// Single-tree interpretation of a `{;, 1, D}` term.
pub fn single_interp(t: &Term) -> Result<Tree> {
    t.require(Fragment::CD1)?;
    Ok(single_rec(t))
}

fn single_rec(t: &Term) -> Tree {
    match t {
        Term::Var(l) => Tree::edge(l.clone()),
        Term::One => Tree::trivial(),
        Term::Comp(a, b) => single_rec(a).concat(&single_rec(b)),
        Term::Dom(a) => single_rec(a).dom(),
        _ => unreachable!("fragment checked"),
    }
}

/// A `{;, 1, D}` term whose single-tree interpretation is `t`.
pub fn realize(t: &Tree) -> Term {
    let mut factors = Vec::new();
    realize_factors(t, &mut factors);
    Term::comp_all(factors)
}

fn realize_factors(t: &Tree, out: &mut Vec<Term>) {
    let mut below = None;
    for (l, c) in t.children() {
        if c.point_count() > 0 {
            below = Some((l, c));
            continue;
        }
        let mut inner = vec![Term::Var(l.clone())];
        realize_factors(c, &mut inner);
        out.push(Term::dom(Term::comp_all(inner)));
    }
    if let Some((l, c)) = below {
        out.push(Term::Var(l.clone()));
        realize_factors(c, out);
    }
}

/// Elementwise concatenation of two antichains, then maximal.
pub fn concat_sets(l1: &Antichain, l2: &Antichain) -> Antichain {
    maximal(
        l1.trees
            .iter()
            .flat_map(|a| l2.trees.iter().map(move |b| a.concat(b))),
    )
}

pub fn union_sets(l1: &Antichain, l2: &Antichain) -> Antichain {
    maximal(l1.trees.iter().chain(&l2.trees).cloned())
}

pub fn dom_set(l: &Antichain) -> Antichain {
    maximal(l.trees.iter().map(Tree::dom))
}

/// Standard tree interpretation of a star-free term.
pub fn interp_star_free(t: &Term) -> Result<Antichain> {
    t.require(Fragment::StarFree)?;
    Ok(interp_rec(t, 0).0)
}

/// Tree interpretation with every star truncated after `cap` powers.
/// The flag reports whether every star reached a fixpoint, in which case the
/// result is exact.
pub fn interp_truncated(t: &Term, cap: usize) -> Result<(Antichain, bool)> {
    t.require(Fragment::Full)?;
    Ok(interp_rec(t, cap.max(1)))
}

fn interp_rec(t: &Term, cap: usize) -> (Antichain, bool) {
    match t {
        Term::Var(l) => (Antichain::singleton(Tree::edge(l.clone())), true),
        Term::Zero => (Antichain::empty(), true),
        Term::One => (Antichain::singleton(Tree::trivial()), true),
        Term::Comp(a, b) => {
            let (x, e1) = interp_rec(a, cap);
            let (y, e2) = interp_rec(b, cap);
            (concat_sets(&x, &y), e1 && e2)
        }
        Term::Union(a, b) => {
            let (x, e1) = interp_rec(a, cap);
            let (y, e2) = interp_rec(b, cap);
            (union_sets(&x, &y), e1 && e2)
        }
        Term::Dom(a) => {
            let (x, e) = interp_rec(a, cap);
            (dom_set(&x), e)
        }
        Term::Star(a) => {
            let (x, e) = interp_rec(a, cap);
            let (y, conv) = star_iter(&x, cap);
            (y, e && conv)
        }
        Term::Antidom(_) => unreachable!("fragment checked"),
    }
}

/// `maximal(L^0 ∪ L^1 ∪ … ∪ L^cap)`, plus whether `L^(cap+1)` (or an
/// earlier power) added nothing new, which makes the result exact.
pub fn star_iter(l: &Antichain, cap: usize) -> (Antichain, bool) {
    let cap = cap.max(1);
    let mut acc = union_sets(&Antichain::singleton(Tree::trivial()), l);
    let mut power = l.clone();
    for k in 2..=cap + 1 {
        power = concat_sets(&power, l);
        let next = union_sets(&acc, &power);
        if next == acc {
            return (acc, true);
        }
        if k > cap {
            break;
        }
        acc = next;
    }
    (acc, false)
}

pub fn decide_cd1(s: &Term, t: &Term) -> Result<bool> {
    Ok(single_interp(s)? == single_interp(t)?)
}

/// The `{;, 1, D}` decision extended with `0`: a term equals zero exactly
/// when `0` occurs in it.
pub fn decide_cd1_with_zero(s: &Term, t: &Term) -> Result<bool> {
    for u in [s, t] {
        let stray = u
            .subterms()
            .into_iter()
            .find(|v| matches!(v, Term::Union(..) | Term::Star(_) | Term::Antidom(_)));
        if stray.is_some() {
            return Err(Error::Fragment {
                term: u.to_string(),
                expected: Fragment::CD1,
                found: u.classify(),
            });
        }
    }
    match (s.contains_zero(), t.contains_zero()) {
        (true, true) => Ok(true),
        (false, false) => decide_cd1(s, t),
        _ => Ok(false),
    }
}

pub fn decide_star_free(s: &Term, t: &Term) -> Result<bool> {
    Ok(interp_star_free(s)? == interp_star_free(t)?)
}

/// For an invalid star-free equation, a tree satisfying exactly one side.
pub fn star_free_witness(s: &Term, t: &Term) -> Result<Option<Tree>> {
    let ls = interp_star_free(s)?;
    let lt = interp_star_free(t)?;
    if ls == lt {
        return Ok(None);
    }
    let w = ls
        .trees
        .iter()
        .find(|u| !lt.covers(u))
        .or_else(|| lt.trees.iter().find(|u| !ls.covers(u)))
        .cloned();
    Ok(w)
}

/// Whether the root and point of `t`, read as a structure, satisfy `term`.
pub fn member_down(t: &Tree, term: &Term) -> bool {
    let vars: Vec<Label> = term.vars().into_iter().collect();
    let (m, root, point) = tree_to_struct_over(t, &vars);
    satisfies(root, point, term, &m).expect("alphabet covers the term")
}

/// The maximal common lower bounds of two finite antichains.
pub fn meet_finite(l1: &Antichain, l2: &Antichain) -> Antichain {
    maximal(
        l1.trees
            .iter()
            .flat_map(|a| l2.trees.iter().filter_map(move |b| a.glue_paths(b)))
            .map(|g| g.reduce()),
    )
}
