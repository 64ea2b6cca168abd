//! A fast built-in invariant suite, small enough to run on every install.

use std::time::{Duration, Instant};

use crate::automata::compile;
use crate::freealg::{
    concat_sets, decide_star_free, dom_set, interp_star_free, meet_finite, member_down, realize,
    single_interp, union_sets,
};
use crate::pdl::{decide_full, satisfiable, translate, Verdict};
use crate::relstruct::refute;
use crate::term::{alphabet, Label, Term};
use crate::tree::{enumerate, Tree};
use crate::Antichain;

const REDUCE_INPUT: &str = include_str!("../tests/golden/reduce_input.txt");
const REDUCE_OUTPUT: &str = include_str!("../tests/golden/reduce_output.txt");

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<String, String>,
    pub elapsed: Duration,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}

type Suite = fn() -> Result<String, String>;

pub fn run() -> Vec<Check> {
    let suites: [(&'static str, Suite); 8] = [
        ("golden reduction", golden),
        ("order axioms", order),
        ("reduction", reduction),
        ("round trip", round_trip),
        ("domain axioms", axioms),
        ("meet law", meet),
        ("compile", compile_check),
        ("full pipeline", pipeline),
    ];
    suites
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let outcome = f();
            Check {
                name,
                outcome,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn term(s: &str) -> Term {
    Term::parse(s).expect("built-in term")
}

fn golden() -> Result<String, String> {
    let left = Tree::parse(REDUCE_INPUT.trim()).map_err(|e| e.to_string())?;
    let got = left.reduce().to_string();
    ensure(got == REDUCE_OUTPUT.trim(), || format!("reduced to {got}"))?;
    Ok(got)
}

fn order() -> Result<String, String> {
    let trees = enumerate(&alphabet(&["a", "b"]), 3);
    for x in &trees {
        ensure(x.leq(x), || format!("{x} not reflexive"))?;
        for y in &trees {
            if x != y && x.leq(y) {
                ensure(!y.leq(x), || format!("{x} and {y} not antisymmetric"))?;
                for z in &trees {
                    if y.leq(z) {
                        ensure(x.leq(z), || format!("{x} {y} {z} not transitive"))?;
                    }
                }
            }
        }
    }
    Ok(format!("{} trees", trees.len()))
}

fn unpointed(t: &Tree) -> Tree {
    let kids = t
        .children()
        .iter()
        .map(|(l, c)| (l.clone(), unpointed(c)))
        .collect();
    Tree::node(false, kids)
}

fn reduction() -> Result<String, String> {
    let trees = enumerate(&alphabet(&["a", "b"]), 2);
    let a = Label::new("a");
    let mut count = 0;
    for x in &trees {
        for y in &trees {
            // unpointed siblings next to the point branch, often redundant
            let joined = Tree::node(
                false,
                vec![
                    (a.clone(), unpointed(x)),
                    (a.clone(), unpointed(y)),
                    (a.clone(), y.clone()),
                ],
            );
            let r = joined.reduce();
            ensure(joined.leq(&r) && r.leq(&joined), || {
                format!("{joined} vs {r}")
            })?;
            ensure(r.is_reduced() && r.reduce() == r, || {
                format!("{r} not a fixed point")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} trees"))
}

fn round_trip() -> Result<String, String> {
    let trees = enumerate(&alphabet(&["a", "b"]), 3);
    for t in &trees {
        let back = single_interp(&realize(t)).map_err(|e| e.to_string())?;
        ensure(back == *t, || format!("{t} came back as {back}"))?;
    }
    Ok(format!("{} trees", trees.len()))
}

fn axioms() -> Result<String, String> {
    let laws = [
        ("x + (y + z)", "(x + y) + z"),
        ("x + y", "y + x"),
        ("x + x", "x"),
        ("x;(y;z)", "(x;y);z"),
        ("x;(y + z)", "x;y + x;z"),
        ("(x + y);z", "x;z + y;z"),
        ("D(x);x", "x"),
        ("D(x;y)", "D(x;D(y))"),
        ("D(x + y)", "D(x) + D(y)"),
        ("D(x) + 1", "1"),
    ];
    let values = ["a", "0", "1", "D(b);a", "a + b;b"];
    let mut count = 0;
    for (lhs, rhs) in laws {
        for (i, x) in values.iter().enumerate() {
            let (y, z) = (
                values[(i + 1) % values.len()],
                values[(i + 3) % values.len()],
            );
            let f = |l: &Label| match l.as_str() {
                "x" => Some(term(x)),
                "y" => Some(term(y)),
                "z" => Some(term(z)),
                _ => None,
            };
            let (s, t) = (term(lhs).substitute(&f), term(rhs).substitute(&f));
            let ok = decide_star_free(&s, &t).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{s} = {t} judged invalid"))?;
            count += 1;
        }
    }
    let cx = refute(&term("a;b"), &term("b;a"), 3).map_err(|e| e.to_string())?;
    ensure(cx.is_some(), || "a;b = b;a not refuted".into())?;
    Ok(format!("{count} instances"))
}

fn meet() -> Result<String, String> {
    let atoms: Vec<Antichain> = ["a", "b", "1", "0"]
        .iter()
        .map(|s| interp_star_free(&term(s)).expect("star-free"))
        .collect();
    let mut chains = atoms.clone();
    for x in &atoms {
        chains.push(dom_set(x));
        for y in &atoms {
            chains.push(concat_sets(x, y));
            chains.push(union_sets(x, y));
        }
    }
    chains.sort_by_key(|l| l.to_string());
    chains.dedup();
    let trees = enumerate(&alphabet(&["a", "b"]), 3);
    for x in &chains {
        for y in &chains {
            let m = meet_finite(x, y);
            for t in &trees {
                let want = x.covers(t) && y.covers(t);
                ensure(m.covers(t) == want, || {
                    format!("meet of {x:?} and {y:?} at {t}")
                })?;
            }
        }
    }
    Ok(format!("{} antichains", chains.len()))
}

fn compile_check() -> Result<String, String> {
    let trees = enumerate(&alphabet(&["a", "b"]), 3);
    let terms = ["a*;b", "D(a;b*) + b", "(a + D(b))*", "0", "1", "a;a*;D(b)"];
    for s in terms {
        let t = term(s);
        let a = compile(&t);
        for tree in &trees {
            ensure(a.accepts_tree(tree) == member_down(tree, &t), || {
                format!("{s} on {tree}")
            })?;
        }
    }
    Ok(format!("{} terms", terms.len()))
}

fn pipeline() -> Result<String, String> {
    for (s, t) in [
        ("a*", "1 + a;a*"),
        ("(a*)*", "a*"),
        ("D(a*)", "1"),
        ("a*;a*", "a*"),
    ] {
        let v = decide_full(&term(s), &term(t)).map_err(|e| e.to_string())?;
        ensure(v == Verdict::Valid, || format!("{s} = {t} gave {v:?}"))?;
    }
    let v = decide_full(&term("a;b"), &term("b;a")).map_err(|e| e.to_string())?;
    ensure(matches!(v, Verdict::Invalid(_)), || {
        "a;b = b;a valid".into()
    })?;
    ensure(
        !satisfiable(&translate(&term("A(a);a"))).satisfiable,
        || "A(a);a satisfiable".into(),
    )?;
    Ok("5 equations".into())
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run() {
            assert!(c.passed(), "{}: {:?}", c.name, c.outcome);
        }
    }
}
