//! Condition automata and guarded NFAs.
//!
//! A [`ConditionAutomaton`] reads the labels along a path of a structure and
//! attaches to each state a conjunction of signed guards `+D(u)` / `-A(u)`
//! checked at the vertex where the state is visited. [`GuardedNFA`] makes the
//! guards explicit: words alternate a valuation of the guard atoms with
//! letters, `val a1 val a2 ... an val`, so the usual Boolean constructions
//! on finite automata apply unchanged.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::relstruct::{eval, tree_to_struct_over, RelStruct};
use crate::term::{Label, Term};
use crate::tree::Tree;

/// A signed guard atom: `+D(atom)` when `positive`, else `-A(atom)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub atom: Term,
    pub positive: bool,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "+D({})", self.atom)
        } else {
            write!(f, "-A({})", self.atom)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionAutomaton {
    alphabet: Vec<Label>,
    conditions: Vec<Vec<Guard>>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    // (from, label or epsilon, to)
    transitions: Vec<(usize, Option<Label>, usize)>,
}

impl ConditionAutomaton {
    fn new() -> Self {
        ConditionAutomaton {
            alphabet: Vec::new(),
            conditions: Vec::new(),
            initial: Vec::new(),
            finals: Vec::new(),
            transitions: Vec::new(),
        }
    }

    fn add_state(&mut self, cond: Vec<Guard>) -> usize {
        self.conditions.push(cond);
        self.finals.push(false);
        self.conditions.len() - 1
    }

    pub fn state_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn condition(&self, q: usize) -> &[Guard] {
        &self.conditions[q]
    }

    pub fn transitions(&self) -> &[(usize, Option<Label>, usize)] {
        &self.transitions
    }

    /// Distinct guard atoms, sorted.
    pub fn guard_atoms(&self) -> Vec<Term> {
        let set: BTreeSet<Term> = self
            .conditions
            .iter()
            .flatten()
            .map(|g| g.atom.clone())
            .collect();
        set.into_iter().collect()
    }

    fn epsilon_targets(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.state_count()];
        for (p, l, q) in &self.transitions {
            if l.is_none() {
                out[*p].push(*q);
            }
        }
        out
    }

    /// Whether the automaton accepts the path that starts at `start` and
    /// follows `path` (each step a label and the vertex it leads to).
    pub fn accepts(&self, m: &RelStruct, start: usize, path: &[(Label, usize)]) -> Result<bool> {
        let atoms = self.guard_atoms();
        let mut holds = Vec::with_capacity(atoms.len());
        for a in &atoms {
            let dom = eval(a, m)?.domain();
            holds.push(
                (0..m.vertex_count())
                    .map(|v| dom.contains(v, v))
                    .collect::<Vec<_>>(),
            );
        }
        let ok = |q: usize, v: usize| {
            self.conditions[q].iter().all(|g| {
                let i = atoms.binary_search(&g.atom).expect("atom collected");
                holds[i][v] == g.positive
            })
        };
        let eps = self.epsilon_targets();
        let closure = |seed: Vec<usize>, v: usize| {
            let mut seen = vec![false; self.state_count()];
            let mut stack: Vec<usize> = seed.into_iter().filter(|&q| ok(q, v)).collect();
            for &q in &stack {
                seen[q] = true;
            }
            while let Some(q) = stack.pop() {
                for &r in &eps[q] {
                    if !seen[r] && ok(r, v) {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            seen
        };
        let mut cur = closure(self.initial.clone(), start);
        let mut at = start;
        for (label, next) in path {
            if !m.has_edge(label, at, *next) {
                return Err(Error::Structure(format!("no {label}-edge {at} -> {next}")));
            }
            let seed = self
                .transitions
                .iter()
                .filter(|(p, l, _)| cur[*p] && l.as_ref() == Some(label))
                .map(|&(_, _, q)| q)
                .collect();
            cur = closure(seed, *next);
            at = *next;
        }
        Ok((0..self.state_count()).any(|q| cur[q] && self.finals[q]))
    }

    /// Acceptance of the root-to-point path of a tree.
    pub fn accepts_tree(&self, t: &Tree) -> bool {
        let (m, root, _) = tree_to_struct_over(t, &self.alphabet);
        let path = tree_path(t);
        self.accepts(&m, root, &path).expect("tree path exists")
    }
}

/// The root-to-point path of `t` as steps into preorder vertex ids.
pub fn tree_path(t: &Tree) -> Vec<(Label, usize)> {
    let verts = t.vertices();
    let mut v = t.point_index().expect("pointed tree");
    let mut out = Vec::new();
    while let Some((p, l)) = &verts[v].parent {
        out.push((l.clone(), v));
        v = *p;
    }
    out.reverse();
    out
}

impl fmt::Display for ConditionAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.initial {
            writeln!(f, "initial q{q}")?;
        }
        for (q, fin) in self.finals.iter().enumerate() {
            if *fin {
                writeln!(f, "final q{q}")?;
            }
        }
        for (p, l, q) in &self.transitions {
            match l {
                Some(l) => writeln!(f, "q{p} --{l}--> q{q}")?,
                None => writeln!(f, "q{p} --> q{q}")?,
            }
        }
        for (q, cond) in self.conditions.iter().enumerate() {
            if !cond.is_empty() {
                let parts: Vec<String> = cond.iter().map(Guard::to_string).collect();
                writeln!(f, "q{q} ? {}", parts.join(" "))?;
            }
        }
        Ok(())
    }
}

/// Thompson-style construction; `D(u)` and `A(u)` become a single
/// initial-and-final state carrying the guard.
pub fn compile(t: &Term) -> ConditionAutomaton {
    let mut a = ConditionAutomaton::new();
    let (init, fin) = build(&mut a, t);
    a.initial = init;
    for q in fin {
        a.finals[q] = true;
    }
    a.alphabet = t.vars().into_iter().collect();
    a
}

fn build(a: &mut ConditionAutomaton, t: &Term) -> (Vec<usize>, Vec<usize>) {
    match t {
        Term::Var(l) => {
            let p = a.add_state(Vec::new());
            let q = a.add_state(Vec::new());
            a.transitions.push((p, Some(l.clone()), q));
            (vec![p], vec![q])
        }
        Term::Zero => (vec![a.add_state(Vec::new())], Vec::new()),
        Term::One => {
            let p = a.add_state(Vec::new());
            (vec![p], vec![p])
        }
        Term::Comp(x, y) => {
            let (i1, f1) = build(a, x);
            let (i2, f2) = build(a, y);
            for &p in &f1 {
                for &q in &i2 {
                    a.transitions.push((p, None, q));
                }
            }
            (i1, f2)
        }
        Term::Union(x, y) => {
            let (mut i1, mut f1) = build(a, x);
            let (i2, f2) = build(a, y);
            i1.extend(i2);
            f1.extend(f2);
            (i1, f1)
        }
        Term::Star(x) => {
            let hub = a.add_state(Vec::new());
            let (i1, f1) = build(a, x);
            for q in i1 {
                a.transitions.push((hub, None, q));
            }
            for p in f1 {
                a.transitions.push((p, None, hub));
            }
            (vec![hub], vec![hub])
        }
        Term::Dom(u) | Term::Antidom(u) => {
            let positive = matches!(t, Term::Dom(_));
            let p = a.add_state(vec![Guard {
                atom: (**u).clone(),
                positive,
            }]);
            (vec![p], vec![p])
        }
    }
}

/// An NFA over valuation symbols and letters.
///
/// Symbols are numbered: `0..2^g` are valuations (bit `i` set means guard
/// atom `i` holds, i.e. `D(atom)`), and `2^g + k` is letter `k`.
#[derive(Clone, Debug)]
pub struct GuardedNFA {
    guards: Vec<Term>,
    letters: Vec<Label>,
    initial: Vec<usize>,
    finals: Vec<bool>,
    // per state, (symbol, target) sorted
    trans: Vec<Vec<(u32, u32)>>,
}

/// Valuations are bitmasks, so the guard list has to stay small.
pub const MAX_GUARDS: usize = 16;

impl GuardedNFA {
    pub fn guards(&self) -> &[Term] {
        &self.guards
    }

    pub fn letters(&self) -> &[Label] {
        &self.letters
    }

    pub fn state_count(&self) -> usize {
        self.finals.len()
    }

    pub fn transition_count(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    fn valuations(&self) -> u32 {
        1 << self.guards.len()
    }

    fn symbol_count(&self) -> u32 {
        self.valuations() + self.letters.len() as u32
    }

    pub fn val_symbol(&self, mask: u32) -> u32 {
        debug_assert!(mask < self.valuations());
        mask
    }

    pub fn letter_symbol(&self, l: &Label) -> Option<u32> {
        self.letters
            .binary_search(l)
            .ok()
            .map(|k| self.valuations() + k as u32)
    }

    pub fn accepts_word(&self, word: &[u32]) -> bool {
        let mut cur: BTreeSet<u32> = self.initial.iter().map(|&q| q as u32).collect();
        for &sym in word {
            cur = cur
                .iter()
                .flat_map(|&q| {
                    self.trans[q as usize]
                        .iter()
                        .filter(move |(s, _)| *s == sym)
                        .map(|&(_, r)| r)
                })
                .collect();
        }
        cur.iter().any(|&q| self.finals[q as usize])
    }

    /// Whether no word is accepted.
    pub fn is_empty(&self) -> bool {
        let live = self.reachable();
        (0..self.state_count()).all(|q| !(live[q] && self.finals[q]))
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count()];
        let mut stack = self.initial.clone();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(q) = stack.pop() {
            for &(_, r) in &self.trans[q] {
                if !seen[r as usize] {
                    seen[r as usize] = true;
                    stack.push(r as usize);
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let mut rev = vec![Vec::new(); self.state_count()];
        for (p, ts) in self.trans.iter().enumerate() {
            for &(_, q) in ts {
                rev[q as usize].push(p);
            }
        }
        let mut seen = self.finals.clone();
        let mut stack: Vec<usize> = (0..self.state_count()).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &rev[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Drops states that are unreachable or cannot reach a final state.
    pub fn trim(&self) -> GuardedNFA {
        let fwd = self.reachable();
        let bwd = self.coreachable();
        let keep: Vec<bool> = (0..self.state_count()).map(|q| fwd[q] && bwd[q]).collect();
        let mut id = vec![u32::MAX; self.state_count()];
        let mut next = 0;
        for q in 0..self.state_count() {
            if keep[q] {
                id[q] = next;
                next += 1;
            }
        }
        let mut out = GuardedNFA {
            guards: self.guards.clone(),
            letters: self.letters.clone(),
            initial: self
                .initial
                .iter()
                .filter(|&&q| keep[q])
                .map(|&q| id[q] as usize)
                .collect(),
            finals: Vec::new(),
            trans: Vec::new(),
        };
        for q in 0..self.state_count() {
            if keep[q] {
                out.finals.push(self.finals[q]);
                out.trans.push(
                    self.trans[q]
                        .iter()
                        .filter(|(_, r)| keep[*r as usize])
                        .map(|&(s, r)| (s, id[r as usize]))
                        .collect(),
                );
            }
        }
        out
    }

    /// Re-expresses the automaton over a larger guard list and alphabet.
    pub fn lift(&self, guards: &[Term], letters: &[Label]) -> Result<GuardedNFA> {
        if guards.len() > MAX_GUARDS {
            return Err(Error::Unsupported(format!(
                "{} guard atoms exceed the limit of {MAX_GUARDS}",
                guards.len()
            )));
        }
        let mut pos = Vec::with_capacity(self.guards.len());
        for g in &self.guards {
            let i = guards
                .iter()
                .position(|h| h == g)
                .ok_or_else(|| Error::MissingGuard(g.to_string()))?;
            pos.push(i);
        }
        let mut letter_map = Vec::with_capacity(self.letters.len());
        for l in &self.letters {
            let k = letters
                .iter()
                .position(|m| m == l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            letter_map.push(k);
        }
        let new_vals = 1u32 << guards.len();
        // project each new valuation onto the old guard list
        let project: Vec<u32> = (0..new_vals)
            .map(|v| {
                pos.iter()
                    .enumerate()
                    .filter(|(_, &i)| v >> i & 1 == 1)
                    .fold(0, |acc, (k, _)| acc | 1 << k)
            })
            .collect();
        let mut by_old: Vec<Vec<u32>> = vec![Vec::new(); self.valuations() as usize];
        for (v, &old) in project.iter().enumerate() {
            by_old[old as usize].push(v as u32);
        }
        let old_vals = self.valuations();
        let trans = self
            .trans
            .iter()
            .map(|ts| {
                let mut out = Vec::new();
                for &(s, r) in ts {
                    if s < old_vals {
                        out.extend(by_old[s as usize].iter().map(|&v| (v, r)));
                    } else {
                        out.push((new_vals + letter_map[(s - old_vals) as usize] as u32, r));
                    }
                }
                out.sort_unstable();
                out.dedup();
                out
            })
            .collect();
        Ok(GuardedNFA {
            guards: guards.to_vec(),
            letters: letters.to_vec(),
            initial: self.initial.clone(),
            finals: self.finals.clone(),
            trans,
        })
    }

    fn check_compatible(&self, other: &GuardedNFA) -> Result<()> {
        if self.guards != other.guards || self.letters != other.letters {
            return Err(Error::Unsupported(
                "automata must share guards and letters; lift them first".into(),
            ));
        }
        Ok(())
    }

    /// The guarded word of the root-to-point path of `t`, with valuations
    /// read off the tree.
    pub fn tree_word(&self, t: &Tree) -> Result<Vec<u32>> {
        let (m, root, _) = tree_to_struct_over(t, &self.letters);
        let mut holds = Vec::with_capacity(self.guards.len());
        for g in &self.guards {
            holds.push(eval(g, &m)?.domain());
        }
        let val = |v: usize| {
            holds
                .iter()
                .enumerate()
                .filter(|(_, d)| d.contains(v, v))
                .fold(0u32, |acc, (i, _)| acc | 1 << i)
        };
        let mut word = vec![val(root)];
        for (l, v) in tree_path(t) {
            let sym = self
                .letter_symbol(&l)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))?;
            word.push(sym);
            word.push(val(v));
        }
        Ok(word)
    }

    pub fn accepts_tree(&self, t: &Tree) -> Result<bool> {
        Ok(self.accepts_word(&self.tree_word(t)?))
    }
}

impl fmt::Display for GuardedNFA {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let guards: Vec<String> = self.guards.iter().map(Term::to_string).collect();
        writeln!(f, "guards [{}]", guards.join(", "))?;
        for q in &self.initial {
            writeln!(f, "initial q{q}")?;
        }
        for (q, fin) in self.finals.iter().enumerate() {
            if *fin {
                writeln!(f, "final q{q}")?;
            }
        }
        let vals = self.valuations();
        for (p, ts) in self.trans.iter().enumerate() {
            for &(s, q) in ts {
                if s < vals {
                    writeln!(f, "q{p} --val{s:0w$b}--> q{q}", w = self.guards.len())?;
                } else {
                    writeln!(f, "q{p} --{}--> q{q}", self.letters[(s - vals) as usize])?;
                }
            }
        }
        Ok(())
    }
}

/// Makes the guards of `a` explicit as valuation symbols over `guards`.
pub fn to_guarded(a: &ConditionAutomaton, guards: &[Term]) -> Result<GuardedNFA> {
    if guards.len() > MAX_GUARDS {
        return Err(Error::Unsupported(format!(
            "{} guard atoms exceed the limit of {MAX_GUARDS}",
            guards.len()
        )));
    }
    let n = a.state_count();
    let mut cond_req: Vec<Vec<(usize, bool)>> = Vec::with_capacity(n);
    for cond in &a.conditions {
        let mut req = Vec::new();
        for g in cond {
            let i = guards
                .iter()
                .position(|h| *h == g.atom)
                .ok_or_else(|| Error::MissingGuard(g.atom.to_string()))?;
            req.push((i, g.positive));
        }
        cond_req.push(req);
    }
    let mut letters = a.alphabet.clone();
    letters.sort();
    letters.dedup();
    let vals = 1u32 << guards.len();
    let eps = a.epsilon_targets();
    // states: 0 start, 1 + q "before q", 1 + n + q "after q"
    let before = |q: usize| 1 + q;
    let after = |q: usize| 1 + n + q;
    let mut trans: Vec<Vec<(u32, u32)>> = vec![Vec::new(); 1 + 2 * n];
    for v in 0..vals {
        let ok: Vec<bool> = cond_req
            .iter()
            .map(|req| req.iter().all(|&(i, pos)| (v >> i & 1 == 1) == pos))
            .collect();
        for q in 0..n {
            if !ok[q] {
                continue;
            }
            let mut seen = vec![false; n];
            seen[q] = true;
            let mut stack = vec![q];
            while let Some(p) = stack.pop() {
                for &r in &eps[p] {
                    if ok[r] && !seen[r] {
                        seen[r] = true;
                        stack.push(r);
                    }
                }
            }
            for r in (0..n).filter(|&r| seen[r]) {
                trans[before(q)].push((v, after(r) as u32));
                if a.initial.contains(&q) {
                    trans[0].push((v, after(r) as u32));
                }
            }
        }
    }
    for (p, l, q) in &a.transitions {
        if let Some(l) = l {
            let k = letters.binary_search(l).expect("letter in alphabet") as u32;
            trans[after(*p)].push((vals + k, before(*q) as u32));
        }
    }
    for ts in &mut trans {
        ts.sort_unstable();
        ts.dedup();
    }
    let mut finals = vec![false; 1 + 2 * n];
    for q in 0..n {
        finals[after(q)] = a.finals[q];
    }
    Ok(GuardedNFA {
        guards: guards.to_vec(),
        letters,
        initial: vec![0],
        finals,
        trans,
    }
    .trim_unreachable())
}

impl GuardedNFA {
    fn trim_unreachable(self) -> GuardedNFA {
        let live = self.reachable();
        if live.iter().all(|&b| b) {
            return self;
        }
        let mut id = vec![u32::MAX; self.state_count()];
        let mut next = 0;
        for q in 0..self.state_count() {
            if live[q] {
                id[q] = next;
                next += 1;
            }
        }
        let trans = (0..self.state_count())
            .filter(|&q| live[q])
            .map(|q| {
                self.trans[q]
                    .iter()
                    .map(|&(s, r)| (s, id[r as usize]))
                    .collect()
            })
            .collect();
        GuardedNFA {
            initial: self.initial.iter().map(|&q| id[q] as usize).collect(),
            finals: (0..self.state_count())
                .filter(|&q| live[q])
                .map(|q| self.finals[q])
                .collect(),
            trans,
            guards: self.guards,
            letters: self.letters,
        }
    }
}

/// Complete subset construction.
pub fn determinize(nfa: &GuardedNFA) -> GuardedNFA {
    let syms = nfa.symbol_count();
    let words = nfa.state_count().div_ceil(64).max(1);
    let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut sets: Vec<Vec<u64>> = Vec::new();
    let mut start = vec![0u64; words];
    for &q in &nfa.initial {
        start[q / 64] |= 1 << (q % 64);
    }
    index.insert(start.clone(), 0);
    sets.push(start);
    let mut trans: Vec<Vec<(u32, u32)>> = Vec::new();
    let mut finals = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let set = sets[i].clone();
        let members: Vec<usize> = (0..nfa.state_count())
            .filter(|&q| set[q / 64] >> (q % 64) & 1 == 1)
            .collect();
        finals.push(members.iter().any(|&q| nfa.finals[q]));
        let mut targets = vec![vec![0u64; words]; syms as usize];
        for &q in &members {
            for &(s, r) in &nfa.trans[q] {
                targets[s as usize][r as usize / 64] |= 1 << (r % 64);
            }
        }
        let mut row = Vec::with_capacity(syms as usize);
        for (s, tgt) in targets.into_iter().enumerate() {
            let next = match index.get(&tgt) {
                Some(&j) => j,
                None => {
                    let j = sets.len() as u32;
                    index.insert(tgt.clone(), j);
                    sets.push(tgt);
                    queue.push_back(j as usize);
                    j
                }
            };
            row.push((s as u32, next));
        }
        trans.push(row);
    }
    GuardedNFA {
        guards: nfa.guards.clone(),
        letters: nfa.letters.clone(),
        initial: vec![0],
        finals,
        trans,
    }
}

/// Accepts exactly the well-formed words `val (letter val)*`.
fn universe(guards: &[Term], letters: &[Label]) -> GuardedNFA {
    let vals = 1u32 << guards.len();
    let to_letter: Vec<(u32, u32)> = (0..vals).map(|v| (v, 1)).collect();
    let to_val: Vec<(u32, u32)> = (0..letters.len() as u32).map(|k| (vals + k, 0)).collect();
    GuardedNFA {
        guards: guards.to_vec(),
        letters: letters.to_vec(),
        initial: vec![0],
        finals: vec![false, true],
        trans: vec![to_letter, to_val],
    }
}

/// Well-formed words not accepted by `nfa`.
pub fn complement(nfa: &GuardedNFA) -> GuardedNFA {
    let mut d = determinize(nfa);
    for f in &mut d.finals {
        *f = !*f;
    }
    product_unchecked(&d, &universe(&nfa.guards, &nfa.letters))
}

/// Intersection by the pair construction.
pub fn product(n1: &GuardedNFA, n2: &GuardedNFA) -> Result<GuardedNFA> {
    n1.check_compatible(n2)?;
    Ok(product_unchecked(n1, n2))
}

fn product_unchecked(n1: &GuardedNFA, n2: &GuardedNFA) -> GuardedNFA {
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pairs = Vec::new();
    let mut queue = VecDeque::new();
    let mut initial = Vec::new();
    for &p in &n1.initial {
        for &q in &n2.initial {
            let key = (p as u32, q as u32);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                e.insert(pairs.len() as u32);
                initial.push(pairs.len());
                queue.push_back(pairs.len());
                pairs.push(key);
            }
        }
    }
    let mut trans: Vec<Vec<(u32, u32)>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (p, q) = pairs[i];
        let (a, b) = (&n1.trans[p as usize], &n2.trans[q as usize]);
        let mut row = Vec::new();
        // merge join on the sorted symbol lists
        let (mut x, mut y) = (0, 0);
        while x < a.len() && y < b.len() {
            let (sa, sb) = (a[x].0, b[y].0);
            if sa < sb {
                x += 1;
            } else if sb < sa {
                y += 1;
            } else {
                let x_end = x + a[x..].iter().take_while(|t| t.0 == sa).count();
                let y_end = y + b[y..].iter().take_while(|t| t.0 == sb).count();
                for &(_, r1) in &a[x..x_end] {
                    for &(_, r2) in &b[y..y_end] {
                        let key = (r1, r2);
                        let j = *index.entry(key).or_insert_with(|| {
                            pairs.push(key);
                            queue.push_back(pairs.len() - 1);
                            (pairs.len() - 1) as u32
                        });
                        row.push((sa, j));
                    }
                }
                x = x_end;
                y = y_end;
            }
        }
        row.sort_unstable();
        row.dedup();
        if trans.len() <= i {
            trans.resize(i + 1, Vec::new());
        }
        trans[i] = row;
    }
    trans.resize(pairs.len(), Vec::new());
    let finals = pairs
        .iter()
        .map(|&(p, q)| n1.finals[p as usize] && n2.finals[q as usize])
        .collect();
    GuardedNFA {
        guards: n1.guards.clone(),
        letters: n1.letters.clone(),
        initial,
        finals,
        trans,
    }
}

/// Words of `n1` that `n2` rejects.
pub fn difference(n1: &GuardedNFA, n2: &GuardedNFA) -> Result<GuardedNFA> {
    n1.check_compatible(n2)?;
    Ok(product_unchecked(n1, &complement(n2)))
}

/// A term with the same satisfaction relation as the automaton's language,
/// by state elimination. Valuation symbols become compositions of `D(u)`
/// and `A(u)` over the guard atoms.
pub fn extract_term(nfa: &GuardedNFA) -> Term {
    let nfa = nfa.trim();
    let n = nfa.state_count();
    if n == 0 {
        return Term::Zero;
    }
    let vals = nfa.valuations();
    let (src, dst) = (n, n + 1);
    let mut edges: Vec<HashMap<usize, Term>> = vec![HashMap::new(); n + 2];
    for &q in &nfa.initial {
        add_edge(&mut edges, src, q, Term::One);
    }
    for q in 0..n {
        if nfa.finals[q] {
            add_edge(&mut edges, q, dst, Term::One);
        }
        let mut masks: HashMap<u32, Vec<u32>> = HashMap::new();
        for &(s, r) in &nfa.trans[q] {
            if s < vals {
                masks.entry(r).or_default().push(s);
            } else {
                let l = nfa.letters[(s - vals) as usize].clone();
                add_edge(&mut edges, q, r as usize, Term::Var(l));
            }
        }
        let mut targets: Vec<_> = masks.into_iter().collect();
        targets.sort();
        for (r, ms) in targets {
            add_edge(&mut edges, q, r as usize, valuation_term(&nfa.guards, &ms));
        }
    }
    let mut alive: Vec<bool> = vec![true; n];
    for _ in 0..n {
        // eliminate the state with the fewest new paths
        let k = (0..n)
            .filter(|&k| alive[k])
            .min_by_key(|&k| {
                let outs = edges[k].keys().filter(|&&q| q != k).count();
                let ins = (0..n + 2)
                    .filter(|&p| p != k && edges[p].contains_key(&k))
                    .count();
                (ins * outs, k)
            })
            .expect("a live state remains");
        alive[k] = false;
        let lp = edges[k].remove(&k).map(smart_star).unwrap_or(Term::One);
        let outs: Vec<(usize, Term)> = {
            let mut v: Vec<_> = edges[k].drain().collect();
            v.sort_by_key(|(q, _)| *q);
            v
        };
        for p in 0..n + 2 {
            if let Some(into) = edges[p].remove(&k) {
                for (q, out) in &outs {
                    let path = smart_comp(smart_comp(into.clone(), lp.clone()), out.clone());
                    add_edge(&mut edges, p, *q, path);
                }
            }
        }
    }
    edges[src].remove(&dst).unwrap_or(Term::Zero)
}

fn add_edge(edges: &mut [HashMap<usize, Term>], p: usize, q: usize, t: Term) {
    if t == Term::Zero {
        return;
    }
    let slot = edges[p].entry(q).or_insert(Term::Zero);
    *slot = smart_union(std::mem::replace(slot, Term::Zero), t);
}

pub(crate) fn smart_comp(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Zero, _) | (_, Term::Zero) => Term::Zero,
        (Term::One, b) => b,
        (a, Term::One) => a,
        (a, b) => Term::comp(a, b),
    }
}

pub(crate) fn smart_union(a: Term, b: Term) -> Term {
    if a == Term::Zero {
        return b;
    }
    if b == Term::Zero {
        return a;
    }
    let mut parts = Vec::new();
    flatten_union(a, &mut parts);
    for p in flatten_owned(b) {
        if !parts.contains(&p) {
            parts.push(p);
        }
    }
    Term::union_all(parts)
}

fn flatten_owned(t: Term) -> Vec<Term> {
    let mut out = Vec::new();
    flatten_union(t, &mut out);
    out
}

fn flatten_union(t: Term, out: &mut Vec<Term>) {
    match t {
        Term::Union(a, b) => {
            flatten_union(*a, out);
            flatten_union(*b, out);
        }
        t => {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
}

pub(crate) fn smart_star(t: Term) -> Term {
    match t {
        Term::Zero | Term::One => Term::One,
        Term::Star(_) => t,
        Term::Union(..) => {
            let parts: Vec<Term> = flatten_owned(t)
                .into_iter()
                .filter(|p| *p != Term::One)
                .collect();
            match Term::union_all(parts) {
                Term::Zero => Term::One,
                u @ Term::Star(_) => u,
                u => Term::star(u),
            }
        }
        t => Term::star(t),
    }
}

/// A union of guard cubes covering exactly the given valuations.
fn valuation_term(guards: &[Term], masks: &[u32]) -> Term {
    let cubes = cover(guards.len(), masks);
    Term::union_all(cubes.into_iter().map(|(value, care)| {
        Term::comp_all((0..guards.len()).filter(|i| care >> i & 1 == 1).map(|i| {
            if value >> i & 1 == 1 {
                Term::dom(guards[i].clone())
            } else {
                Term::antidom(guards[i].clone())
            }
        }))
    }))
}

/// Prime implicants of the on-set, then a greedy cover.
fn cover(g: usize, masks: &[u32]) -> Vec<(u32, u32)> {
    let full = if g == 32 { u32::MAX } else { (1u32 << g) - 1 };
    let on: BTreeSet<u32> = masks.iter().copied().collect();
    let mut level: BTreeSet<(u32, u32)> = on.iter().map(|&m| (m, full)).collect();
    let mut primes: BTreeSet<(u32, u32)> = BTreeSet::new();
    while !level.is_empty() {
        let mut merged = BTreeSet::new();
        let mut used = BTreeSet::new();
        let items: Vec<_> = level.iter().copied().collect();
        for (i, &(v1, c1)) in items.iter().enumerate() {
            for &(v2, c2) in &items[i + 1..] {
                if c1 != c2 {
                    continue;
                }
                let diff = (v1 ^ v2) & c1;
                if diff.count_ones() == 1 {
                    merged.insert((v1 & !diff, c1 & !diff));
                    used.insert((v1, c1));
                    used.insert((v2, c2));
                }
            }
        }
        for it in items {
            if !used.contains(&it) {
                primes.insert(it);
            }
        }
        level = merged;
    }
    let covers = |(v, c): (u32, u32), m: u32| (m & c) == (v & c);
    let mut left: BTreeSet<u32> = on;
    let mut out = Vec::new();
    while let Some(&m) = left.iter().next() {
        let best = primes
            .iter()
            .filter(|&&p| covers(p, m))
            .max_by_key(|&&p| {
                (
                    left.iter().filter(|&&x| covers(p, x)).count(),
                    std::cmp::Reverse(p),
                )
            })
            .copied()
            .expect("every minterm has a prime");
        left.retain(|&x| !covers(best, x));
        out.push(best);
    }
    out.sort();
    out
}
