//! Propositional dynamic logic without propositional variables: translation
//! of terms, a satisfiability checker, and the full decision procedure.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use crate::automata::{compile, difference, extract_term, to_guarded};
use crate::error::Result;
use crate::exec::{self, Mode};
use crate::freealg::member_down;
use crate::relstruct::{RelStruct, Relation};
use crate::term::{Fragment, Label, Term};
use crate::tree::{Tree, TreeEnumerator};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Atomic(Label),
    Test(Box<Formula>),
    Comp(Box<Program>, Box<Program>),
    Union(Box<Program>, Box<Program>),
    Star(Box<Program>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Diamond(Box<Program>, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn diamond(p: Program, f: Formula) -> Formula {
        Formula::Diamond(Box::new(p), Box::new(f))
    }

    pub fn boxed(p: Program, f: Formula) -> Formula {
        Formula::not(Formula::diamond(p, Formula::not(f)))
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(a, b) => 1 + a.size() + b.size(),
            Formula::Diamond(p, f) => 1 + p.size() + f.size(),
        }
    }

    /// Atomic programs occurring anywhere in the formula.
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Not(f) => f.collect_labels(out),
            Formula::And(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Formula::Diamond(p, f) => {
                p.collect_labels(out);
                f.collect_labels(out);
            }
        }
    }
}

impl Program {
    pub fn atomic(name: &str) -> Program {
        Program::Atomic(Label::new(name))
    }

    pub fn test(f: Formula) -> Program {
        Program::Test(Box::new(f))
    }

    pub fn comp(a: Program, b: Program) -> Program {
        Program::Comp(Box::new(a), Box::new(b))
    }

    pub fn union(a: Program, b: Program) -> Program {
        Program::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Program) -> Program {
        Program::Star(Box::new(a))
    }

    pub fn size(&self) -> usize {
        match self {
            Program::Atomic(_) => 1,
            Program::Test(f) => 1 + f.size(),
            Program::Comp(a, b) | Program::Union(a, b) => 1 + a.size() + b.size(),
            Program::Star(a) => 1 + a.size(),
        }
    }

    fn collect_labels(&self, out: &mut BTreeSet<Label>) {
        match self {
            Program::Atomic(l) => {
                out.insert(l.clone());
            }
            Program::Test(f) => f.collect_labels(out),
            Program::Comp(a, b) | Program::Union(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Program::Star(a) => a.collect_labels(out),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Top => f.write_str("true"),
            Formula::Bottom => f.write_str("false"),
            Formula::Not(x) => write!(f, "~{x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Diamond(p, x) => write!(f, "<{p}>{x}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Atomic(l) => write!(f, "{l}"),
            Program::Test(x) => write!(f, "{x}?"),
            Program::Comp(a, b) => write!(f, "({a};{b})"),
            Program::Union(a, b) => write!(f, "({a} + {b})"),
            Program::Star(a) => write!(f, "({a})*"),
        }
    }
}

/// Terms as programs; `D(t)` becomes `(<P(t)>true)?` directly.
pub fn translate_program(t: &Term) -> Program {
    match t {
        Term::Var(l) => Program::Atomic(l.clone()),
        Term::Zero => Program::test(Formula::Bottom),
        Term::One => Program::test(Formula::Top),
        Term::Comp(a, b) => Program::comp(translate_program(a), translate_program(b)),
        Term::Union(a, b) => Program::union(translate_program(a), translate_program(b)),
        Term::Star(a) => Program::star(translate_program(a)),
        Term::Dom(a) => Program::test(Formula::diamond(translate_program(a), Formula::Top)),
        Term::Antidom(a) => Program::test(Formula::not(Formula::diamond(
            translate_program(a),
            Formula::Top,
        ))),
    }
}

/// `<P(t)>true`: satisfiable iff some pair in some structure satisfies `t`.
pub fn translate(t: &Term) -> Formula {
    Formula::diamond(translate_program(t), Formula::Top)
}

/// Worlds of `m` where `f` holds.
pub fn holds(f: &Formula, m: &RelStruct) -> Vec<bool> {
    let n = m.vertex_count();
    match f {
        Formula::Top => vec![true; n],
        Formula::Bottom => vec![false; n],
        Formula::Not(x) => holds(x, m).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => holds(a, m)
            .into_iter()
            .zip(holds(b, m))
            .map(|(x, y)| x && y)
            .collect(),
        Formula::Diamond(p, x) => {
            let r = program_relation(p, m);
            let target = holds(x, m);
            (0..n)
                .map(|i| (0..n).any(|j| target[j] && r.contains(i, j)))
                .collect()
        }
    }
}

/// The relation a program denotes in `m`; missing labels denote nothing.
pub fn program_relation(p: &Program, m: &RelStruct) -> Relation {
    let n = m.vertex_count();
    match p {
        Program::Atomic(l) => m.edges(l).cloned().unwrap_or_else(|| Relation::empty(n)),
        Program::Test(f) => {
            let h = holds(f, m);
            let mut r = Relation::empty(n);
            for (i, b) in h.into_iter().enumerate() {
                if b {
                    r.insert(i, i);
                }
            }
            r
        }
        Program::Comp(a, b) => program_relation(a, m).compose(&program_relation(b, m)),
        Program::Union(a, b) => program_relation(a, m).union(&program_relation(b, m)),
        Program::Star(a) => program_relation(a, m).star(),
    }
}

type Fid = u32;
type Pid = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum F {
    Top,
    Bot,
    And(Fid, Fid),
    Or(Fid, Fid),
    Dia(Pid, Fid),
    Box(Pid, Fid),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum P {
    Atom(u32),
    Test(Fid),
    Seq(Pid, Pid),
    Alt(Pid, Pid),
    Star(Pid),
}

/// Hash-consed negation normal forms.
#[derive(Default)]
struct Arena {
    fs: Vec<F>,
    f_index: HashMap<F, Fid>,
    ps: Vec<P>,
    p_index: HashMap<P, Pid>,
    neg: HashMap<Fid, Fid>,
    labels: Vec<Label>,
}

impl Arena {
    fn f(&mut self, f: F) -> Fid {
        if let Some(&i) = self.f_index.get(&f) {
            return i;
        }
        self.fs.push(f);
        let i = (self.fs.len() - 1) as Fid;
        self.f_index.insert(f, i);
        i
    }

    fn p(&mut self, p: P) -> Pid {
        if let Some(&i) = self.p_index.get(&p) {
            return i;
        }
        self.ps.push(p);
        let i = (self.ps.len() - 1) as Pid;
        self.p_index.insert(p, i);
        i
    }

    fn label(&mut self, l: &Label) -> u32 {
        match self.labels.iter().position(|m| m == l) {
            Some(i) => i as u32,
            None => {
                self.labels.push(l.clone());
                (self.labels.len() - 1) as u32
            }
        }
    }

    fn formula(&mut self, f: &Formula, positive: bool) -> Fid {
        match (f, positive) {
            (Formula::Top, true) | (Formula::Bottom, false) => self.f(F::Top),
            (Formula::Top, false) | (Formula::Bottom, true) => self.f(F::Bot),
            (Formula::Not(x), _) => self.formula(x, !positive),
            (Formula::And(a, b), _) => {
                let (a, b) = (self.formula(a, positive), self.formula(b, positive));
                self.f(if positive { F::And(a, b) } else { F::Or(a, b) })
            }
            (Formula::Diamond(p, x), _) => {
                let p = self.program(p);
                let x = self.formula(x, positive);
                self.f(if positive { F::Dia(p, x) } else { F::Box(p, x) })
            }
        }
    }

    fn program(&mut self, p: &Program) -> Pid {
        let node = match p {
            Program::Atomic(l) => P::Atom(self.label(l)),
            Program::Test(f) => P::Test(self.formula(f, true)),
            Program::Comp(a, b) => P::Seq(self.program(a), self.program(b)),
            Program::Union(a, b) => P::Alt(self.program(a), self.program(b)),
            Program::Star(a) => P::Star(self.program(a)),
        };
        self.p(node)
    }

    fn negate(&mut self, i: Fid) -> Fid {
        if let Some(&j) = self.neg.get(&i) {
            return j;
        }
        let j = match self.fs[i as usize] {
            F::Top => self.f(F::Bot),
            F::Bot => self.f(F::Top),
            F::And(a, b) => {
                let (a, b) = (self.negate(a), self.negate(b));
                self.f(F::Or(a, b))
            }
            F::Or(a, b) => {
                let (a, b) = (self.negate(a), self.negate(b));
                self.f(F::And(a, b))
            }
            F::Dia(p, x) => {
                let x = self.negate(x);
                self.f(F::Box(p, x))
            }
            F::Box(p, x) => {
                let x = self.negate(x);
                self.f(F::Dia(p, x))
            }
        };
        self.neg.insert(i, j);
        self.neg.insert(j, i);
        j
    }
}

/// Outcome of [`satisfiable`].
#[derive(Clone, Debug)]
pub struct SatResult {
    pub satisfiable: bool,
    /// A finite model and a world where the formula holds.
    pub model: Option<(RelStruct, usize)>,
    /// Saturated sets built during the search.
    pub states: usize,
}

struct Tableau {
    arena: Arena,
    states: Vec<Vec<Fid>>,
    state_index: HashMap<Vec<Fid>, usize>,
    expansions: HashMap<Vec<Fid>, Vec<usize>>,
    // per state: (diamond formula index in the state's set, successor demand)
    succ: Vec<Vec<(Fid, Vec<Fid>)>>,
    pending: Vec<usize>,
}

impl Tableau {
    fn expand(&mut self, demand: Vec<Fid>) -> Vec<usize> {
        if let Some(v) = self.expansions.get(&demand) {
            return v.clone();
        }
        let mut out = Vec::new();
        let mut set = BTreeSet::new();
        let mut queue = Vec::new();
        let mut branches = Vec::new();
        if demand.iter().all(|&f| self.add(&mut set, &mut queue, f)) {
            self.saturate(set, queue, &mut branches);
        }
        for b in branches {
            let id = match self.state_index.get(&b) {
                Some(&id) => id,
                None => {
                    let id = self.states.len();
                    self.state_index.insert(b.clone(), id);
                    self.states.push(b);
                    self.succ.push(Vec::new());
                    self.pending.push(id);
                    id
                }
            };
            if !out.contains(&id) {
                out.push(id);
            }
        }
        self.expansions.insert(demand, out.clone());
        out
    }

    fn saturate(&mut self, mut set: BTreeSet<Fid>, mut queue: Vec<Fid>, out: &mut Vec<Vec<Fid>>) {
        while let Some(f) = queue.pop() {
            let mut alts: Option<[Fid; 2]> = None;
            match self.arena.fs[f as usize] {
                F::Top | F::Bot => {}
                F::And(a, b) => {
                    if !self.add(&mut set, &mut queue, a) || !self.add(&mut set, &mut queue, b) {
                        return;
                    }
                }
                F::Or(a, b) => {
                    if !set.contains(&a) && !set.contains(&b) {
                        alts = Some([a, b]);
                    }
                }
                F::Dia(p, x) => match self.arena.ps[p as usize] {
                    P::Atom(_) => {}
                    P::Test(psi) => {
                        if !self.add(&mut set, &mut queue, psi)
                            || !self.add(&mut set, &mut queue, x)
                        {
                            return;
                        }
                    }
                    P::Seq(a, b) => {
                        let inner = self.arena.f(F::Dia(b, x));
                        let g = self.arena.f(F::Dia(a, inner));
                        if !self.add(&mut set, &mut queue, g) {
                            return;
                        }
                    }
                    P::Alt(a, b) => {
                        let (ga, gb) = (self.arena.f(F::Dia(a, x)), self.arena.f(F::Dia(b, x)));
                        if !set.contains(&ga) && !set.contains(&gb) {
                            alts = Some([ga, gb]);
                        }
                    }
                    P::Star(a) => {
                        let again = self.arena.f(F::Dia(a, f));
                        if !set.contains(&x) && !set.contains(&again) {
                            alts = Some([x, again]);
                        }
                    }
                },
                F::Box(p, x) => match self.arena.ps[p as usize] {
                    P::Atom(_) => {}
                    P::Test(psi) => {
                        let npsi = self.arena.negate(psi);
                        if !set.contains(&npsi) && !set.contains(&x) {
                            alts = Some([npsi, x]);
                        }
                    }
                    P::Seq(a, b) => {
                        let inner = self.arena.f(F::Box(b, x));
                        let g = self.arena.f(F::Box(a, inner));
                        if !self.add(&mut set, &mut queue, g) {
                            return;
                        }
                    }
                    P::Alt(a, b) => {
                        let (ga, gb) = (self.arena.f(F::Box(a, x)), self.arena.f(F::Box(b, x)));
                        if !self.add(&mut set, &mut queue, ga)
                            || !self.add(&mut set, &mut queue, gb)
                        {
                            return;
                        }
                    }
                    P::Star(a) => {
                        let again = self.arena.f(F::Box(a, f));
                        if !self.add(&mut set, &mut queue, x)
                            || !self.add(&mut set, &mut queue, again)
                        {
                            return;
                        }
                    }
                },
            }
            if let Some(choices) = alts {
                for c in choices {
                    let mut s2 = set.clone();
                    let mut q2 = queue.clone();
                    if self.add(&mut s2, &mut q2, c) {
                        self.saturate(s2, q2, out);
                    }
                }
                return;
            }
        }
        out.push(set.into_iter().collect());
    }

    /// Adds `f`; false on an immediate contradiction.
    fn add(&mut self, set: &mut BTreeSet<Fid>, queue: &mut Vec<Fid>, f: Fid) -> bool {
        if self.arena.fs[f as usize] == F::Bot {
            return false;
        }
        let nf = self.arena.negate(f);
        if set.contains(&nf) {
            return false;
        }
        if set.insert(f) {
            queue.push(f);
        }
        true
    }

    fn build(&mut self) {
        while let Some(s) = self.pending.pop() {
            let set = self.states[s].clone();
            let mut boxes: HashMap<u32, Vec<Fid>> = HashMap::new();
            for &f in &set {
                if let F::Box(p, x) = self.arena.fs[f as usize] {
                    if let P::Atom(a) = self.arena.ps[p as usize] {
                        boxes.entry(a).or_default().push(x);
                    }
                }
            }
            let mut succ = Vec::new();
            for &f in &set {
                if let F::Dia(p, x) = self.arena.fs[f as usize] {
                    if let P::Atom(a) = self.arena.ps[p as usize] {
                        let mut demand = boxes.get(&a).cloned().unwrap_or_default();
                        demand.push(x);
                        demand.sort_unstable();
                        demand.dedup();
                        self.expand(demand.clone());
                        succ.push((f, demand));
                    }
                }
            }
            self.succ[s] = succ;
        }
    }

    /// Elimination: drop states with an unfulfilled diamond until stable.
    fn eliminate(&self) -> Vec<bool> {
        let n = self.states.len();
        let mut live = vec![true; n];
        let members: Vec<BTreeSet<Fid>> = self
            .states
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        loop {
            let ful = self.fulfilment(&live, &members);
            let mut changed = false;
            for s in 0..n {
                if live[s] && !ful[s].values().all(|&b| b) {
                    live[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return live;
            }
        }
    }

    /// Least fixpoint of "diamond `d` is realised from state `s`".
    fn fulfilment(&self, live: &[bool], members: &[BTreeSet<Fid>]) -> Vec<HashMap<Fid, bool>> {
        let n = self.states.len();
        let mut ful: Vec<HashMap<Fid, bool>> = (0..n)
            .map(|s| {
                self.states[s]
                    .iter()
                    .filter(|&&f| matches!(self.arena.fs[f as usize], F::Dia(..)))
                    .map(|&f| (f, false))
                    .collect()
            })
            .collect();
        let is_dia = |f: Fid| matches!(self.arena.fs[f as usize], F::Dia(..));
        loop {
            let mut changed = false;
            for s in 0..n {
                if !live[s] {
                    continue;
                }
                let dias: Vec<Fid> = ful[s]
                    .iter()
                    .filter(|(_, &b)| !b)
                    .map(|(&f, _)| f)
                    .collect();
                for d in dias {
                    let ok_here = |g: Fid| members[s].contains(&g) && (!is_dia(g) || ful[s][&g]);
                    let F::Dia(p, x) = self.arena.fs[d as usize] else {
                        unreachable!()
                    };
                    let ok = match self.arena.ps[p as usize] {
                        P::Atom(_) => {
                            let demand = &self.succ[s]
                                .iter()
                                .find(|(f, _)| *f == d)
                                .expect("successor demand recorded")
                                .1;
                            self.expansions[demand]
                                .iter()
                                .any(|&t| live[t] && (!is_dia(x) || ful[t][&x]))
                        }
                        P::Test(_) => !is_dia(x) || ok_here(x),
                        P::Seq(a, b) => {
                            let inner = self.arena.f_index[&F::Dia(b, x)];
                            ok_here(self.arena.f_index[&F::Dia(a, inner)])
                        }
                        P::Alt(a, b) => [F::Dia(a, x), F::Dia(b, x)]
                            .iter()
                            .filter_map(|g| self.arena.f_index.get(g))
                            .any(|&g| ok_here(g)),
                        P::Star(a) => {
                            (members[s].contains(&x) && (!is_dia(x) || ful[s][&x]))
                                || self
                                    .arena
                                    .f_index
                                    .get(&F::Dia(a, d))
                                    .is_some_and(|&g| ok_here(g))
                        }
                    };
                    if ok {
                        ful[s].insert(d, true);
                        changed = true;
                    }
                }
            }
            if !changed {
                return ful;
            }
        }
    }

    fn box_demands(&self, s: usize) -> HashMap<u32, Vec<Fid>> {
        let mut boxes: HashMap<u32, Vec<Fid>> = HashMap::new();
        for &f in &self.states[s] {
            if let F::Box(p, x) = self.arena.fs[f as usize] {
                if let P::Atom(a) = self.arena.ps[p as usize] {
                    boxes.entry(a).or_default().push(x);
                }
            }
        }
        boxes
    }

    /// Live states reachable from `root` along edges that respect every box.
    fn model(&self, root: usize, live: &[bool]) -> (RelStruct, usize) {
        let members: Vec<BTreeSet<Fid>> = self
            .states
            .iter()
            .map(|s| s.iter().copied().collect())
            .collect();
        let labels = self.arena.labels.len() as u32;
        let safe = |s: usize, t: usize, a: u32| {
            self.box_demands(s)
                .get(&a)
                .is_none_or(|xs| xs.iter().all(|x| members[t].contains(x)))
        };
        let mut order = vec![root];
        let mut id: HashMap<usize, usize> = HashMap::from([(root, 0)]);
        let mut edges = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for t in (0..self.states.len()).filter(|&t| live[t]) {
                for a in 0..labels {
                    if safe(s, t, a) {
                        let next = id.len();
                        let j = *id.entry(t).or_insert_with(|| {
                            order.push(t);
                            next
                        });
                        edges.push((a, i, j));
                    }
                }
            }
            i += 1;
        }
        let mut m = RelStruct::new(order.len(), &self.arena.labels);
        for (a, i, j) in edges {
            m.add_edge(&self.arena.labels[a as usize], i, j)
                .expect("label registered");
        }
        (m, 0)
    }
}

/// Satisfiability by elimination over saturated formula sets; returns a
/// verified finite model when satisfiable.
pub fn satisfiable(phi: &Formula) -> SatResult {
    let mut arena = Arena::default();
    let root = arena.formula(phi, true);
    let mut tab = Tableau {
        arena,
        states: Vec::new(),
        state_index: HashMap::new(),
        expansions: HashMap::new(),
        succ: Vec::new(),
        pending: Vec::new(),
    };
    let roots = tab.expand(vec![root]);
    tab.build();
    let live = tab.eliminate();
    let states = tab.states.len();
    match roots.into_iter().find(|&r| live[r]) {
        None => SatResult {
            satisfiable: false,
            model: None,
            states,
        },
        Some(r) => {
            let (m, w) = tab.model(r, &live);
            debug_assert!(holds(phi, &m)[w]);
            SatResult {
                satisfiable: true,
                model: Some((m, w)),
                states,
            }
        }
    }
}

/// Outcome of the full decision procedure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// A reduced tree satisfying exactly one side.
    Invalid(Tree),
}

/// Sizes and timings of each pipeline stage.
#[derive(Clone, Debug, Default)]
pub struct Metrics {
    pub stages: Vec<Stage>,
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub name: &'static str,
    pub size: usize,
    pub elapsed: Duration,
}

impl Metrics {
    fn record(&mut self, name: &'static str, size: usize, since: Instant) {
        self.stages.push(Stage {
            name,
            size,
            elapsed: since.elapsed(),
        });
    }

    pub fn get(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for Metrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stages {
            writeln!(
                f,
                "{:<14} size={:<8} time={:.3}ms",
                s.name,
                s.size,
                s.elapsed.as_secs_f64() * 1e3
            )?;
        }
        Ok(())
    }
}

/// Validity over all relational structures for terms without `A`.
pub fn decide_full(s: &Term, t: &Term) -> Result<Verdict> {
    decide_full_with_metrics(s, t).map(|(v, _)| v)
}

pub fn decide_full_with_metrics(s: &Term, t: &Term) -> Result<(Verdict, Metrics)> {
    s.require(Fragment::Full)?;
    t.require(Fragment::Full)?;
    let mut metrics = Metrics::default();

    let start = Instant::now();
    let (cs, ct) = (compile(s), compile(t));
    metrics.record("compile", cs.state_count() + ct.state_count(), start);

    let mut guards: Vec<Term> = cs.guard_atoms();
    guards.extend(ct.guard_atoms());
    guards.sort();
    guards.dedup();
    let mut letters: Vec<Label> = s.vars().into_iter().chain(t.vars()).collect();
    letters.sort();
    letters.dedup();

    let start = Instant::now();
    let gs = to_guarded(&cs, &guards)?.lift(&guards, &letters)?;
    let gt = to_guarded(&ct, &guards)?.lift(&guards, &letters)?;
    metrics.record("guards", guards.len(), start);
    metrics.record("guarded", gs.state_count() + gt.state_count(), start);

    let mut invalid = false;
    for (name, a, b) in [("s-t", &gs, &gt), ("t-s", &gt, &gs)] {
        let start = Instant::now();
        let diff = difference(a, b)?;
        metrics.record(stage_name(name, 0), diff.state_count(), start);
        let start = Instant::now();
        let tau = extract_term(&diff);
        metrics.record(stage_name(name, 1), tau.size(), start);
        let start = Instant::now();
        let res = satisfiable(&translate(&tau));
        metrics.record(stage_name(name, 2), res.states, start);
        if res.satisfiable {
            invalid = true;
            break;
        }
    }
    if !invalid {
        return Ok((Verdict::Valid, metrics));
    }
    let start = Instant::now();
    let w = witness_search(s, t);
    metrics.record("witness", w.edge_count(), start);
    Ok((Verdict::Invalid(w), metrics))
}

fn stage_name(dir: &str, k: usize) -> &'static str {
    match (dir, k) {
        ("s-t", 0) => "difference s-t",
        ("s-t", 1) => "term s-t",
        ("s-t", _) => "sat s-t",
        (_, 0) => "difference t-s",
        (_, 1) => "term t-s",
        _ => "sat t-s",
    }
}

/// The first reduced tree, by edge count then canonical order, that
/// satisfies exactly one of `s`, `t`. Runs forever on valid equations.
pub fn witness_search(s: &Term, t: &Term) -> Tree {
    witness_search_bounded_in(Mode::default(), s, t, usize::MAX).expect("unbounded search")
}

pub fn witness_search_bounded(s: &Term, t: &Term, max_edges: usize) -> Option<Tree> {
    witness_search_bounded_in(Mode::default(), s, t, max_edges)
}

pub fn witness_search_bounded_in(mode: Mode, s: &Term, t: &Term, max_edges: usize) -> Option<Tree> {
    let labels: Vec<Label> = s.vars().into_iter().chain(t.vars()).collect();
    let mut en = TreeEnumerator::new(&labels);
    let mut k = 0;
    loop {
        let level = en.exact(k);
        if let Some(w) = exec::find_first(mode, level, |tr| {
            (member_down(tr, s) != member_down(tr, t)).then(|| tr.clone())
        }) {
            return Some(w);
        }
        if k >= max_edges {
            return None;
        }
        k += 1;
    }
}
