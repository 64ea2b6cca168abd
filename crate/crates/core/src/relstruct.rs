//! Finite relational structures, term evaluation and the exhaustive refuter.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::{self, Mode};
use crate::term::{Label, Term};
use crate::tree::Tree;

/// A binary relation on `0..n` as a row-major bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Relation {
        let stride = n.div_ceil(64).max(1);
        Relation {
            n,
            stride,
            bits: vec![0; stride * n],
        }
    }

    pub fn identity(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn full(n: usize) -> Relation {
        let mut r = Relation::empty(n);
        for i in 0..n {
            for j in 0..n {
                r.insert(i, j);
            }
        }
        r
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    fn row_nonempty(&self, i: usize) -> bool {
        self.row(i).iter().any(|&w| w != 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn union(&self, other: &Relation) -> Relation {
        let mut r = self.clone();
        for (a, b) in r.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        r
    }

    pub fn compose(&self, other: &Relation) -> Relation {
        let mut r = Relation::empty(self.n);
        let s = self.stride;
        for i in 0..self.n {
            for j in 0..self.n {
                if self.contains(i, j) {
                    for w in 0..s {
                        r.bits[i * s + w] |= other.bits[j * s + w];
                    }
                }
            }
        }
        r
    }

    /// Reflexive transitive closure by repeated squaring from `I ∪ R`.
    pub fn star(&self) -> Relation {
        let mut r = self.union(&Relation::identity(self.n));
        loop {
            let next = r.compose(&r);
            if next == r {
                return r;
            }
            r = next;
        }
    }

    /// Diagonal of the points with an image.
    pub fn domain(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for i in 0..self.n {
            if self.row_nonempty(i) {
                r.insert(i, i);
            }
        }
        r
    }

    /// Diagonal of the points without an image.
    pub fn antidomain(&self) -> Relation {
        let mut r = Relation::empty(self.n);
        for i in 0..self.n {
            if !self.row_nonempty(i) {
                r.insert(i, i);
            }
        }
        r
    }

    /// `{ i | some (i, j) with j in set }`.
    fn preimage(&self, set: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.stride];
        for i in 0..self.n {
            if self.row(i).iter().zip(set).any(|(a, b)| a & b != 0) {
                out[i / 64] |= 1 << (i % 64);
            }
        }
        out
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

/// A finite labelled digraph.
#[derive(Clone, PartialEq, Eq)]
pub struct RelStruct {
    n: usize,
    labels: Vec<Label>,
    edges: Vec<Relation>,
}

impl RelStruct {
    /// `n` vertices, no edges, over the given (deduplicated) alphabet.
    pub fn new(n: usize, labels: &[Label]) -> RelStruct {
        let mut labels = labels.to_vec();
        labels.sort();
        labels.dedup();
        let edges = vec![Relation::empty(n); labels.len()];
        RelStruct { n, labels, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    fn label_index(&self, label: &Label) -> Option<usize> {
        self.labels.binary_search(label).ok()
    }

    pub fn edges(&self, label: &Label) -> Option<&Relation> {
        self.label_index(label).map(|i| &self.edges[i])
    }

    pub fn add_edge(&mut self, label: &Label, i: usize, j: usize) -> Result<()> {
        let l = self
            .label_index(label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        if i >= self.n || j >= self.n {
            return Err(Error::Structure(format!(
                "edge {i} -> {j} out of range for {} vertices",
                self.n
            )));
        }
        self.edges[l].insert(i, j);
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Relation::len).sum()
    }

    pub fn has_edge(&self, label: &Label, i: usize, j: usize) -> bool {
        self.edges(label).is_some_and(|r| r.contains(i, j))
    }

    pub fn parse(text: &str) -> Result<RelStruct> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let head = lines
            .next()
            .ok_or_else(|| Error::Structure("empty input".into()))?;
        let n = head
            .strip_prefix("vertices")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Structure(format!("expected `vertices N`, got `{head}`")))?;
        let mut raw = Vec::new();
        for line in lines {
            let (label, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Structure(format!("expected `label: i j`, got `{line}`")))?;
            let label = label.trim();
            if !Label::is_valid(label) {
                return Err(Error::Structure(format!("bad label `{label}`")));
            }
            let nums: Vec<usize> = rest
                .split_whitespace()
                .map(|w| w.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Structure(format!("bad vertex in `{line}`")))?;
            if nums.len() != 2 {
                return Err(Error::Structure(format!(
                    "expected two vertices in `{line}`"
                )));
            }
            raw.push((Label::new(label), nums[0], nums[1]));
        }
        let labels: Vec<Label> = raw.iter().map(|(l, _, _)| l.clone()).collect();
        let mut m = RelStruct::new(n, &labels);
        for (l, i, j) in raw {
            m.add_edge(&l, i, j)?;
        }
        Ok(m)
    }

    /// Copy of `self` over a larger alphabet.
    pub fn with_labels(&self, extra: &[Label]) -> RelStruct {
        let mut all = self.labels.clone();
        all.extend_from_slice(extra);
        let mut m = RelStruct::new(self.n, &all);
        for (l, r) in self.labels.iter().zip(&self.edges) {
            let k = m.label_index(l).expect("label kept");
            m.edges[k] = r.clone();
        }
        m
    }
}

impl fmt::Display for RelStruct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices {}", self.n)?;
        for (l, r) in self.labels.iter().zip(&self.edges) {
            for (i, j) in r.pairs() {
                writeln!(f, "{l}: {i} {j}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RelStruct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for RelStruct {
    type Err = Error;

    fn from_str(s: &str) -> Result<RelStruct> {
        RelStruct::parse(s)
    }
}

pub fn eval(t: &Term, m: &RelStruct) -> Result<Relation> {
    Ok(match t {
        Term::Var(l) => m
            .edges(l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))?
            .clone(),
        Term::Zero => Relation::empty(m.n),
        Term::One => Relation::identity(m.n),
        Term::Comp(a, b) => eval(a, m)?.compose(&eval(b, m)?),
        Term::Union(a, b) => eval(a, m)?.union(&eval(b, m)?),
        Term::Star(a) => eval(a, m)?.star(),
        Term::Dom(a) => eval(a, m)?.domain(),
        Term::Antidom(a) => eval(a, m)?.antidomain(),
    })
}

pub fn satisfies(x: usize, y: usize, t: &Term, m: &RelStruct) -> Result<bool> {
    Ok(eval(t, m)?.contains(x, y))
}

/// The tree as a structure over its own labels; returns `(m, root, point)`.
pub fn tree_to_struct(t: &Tree) -> (RelStruct, usize, usize) {
    tree_to_struct_over(t, &[])
}

/// As [`tree_to_struct`], with `extra` added to the alphabet.
pub fn tree_to_struct_over(t: &Tree, extra: &[Label]) -> (RelStruct, usize, usize) {
    let mut labels = t.labels();
    labels.extend_from_slice(extra);
    let verts = t.vertices();
    let mut m = RelStruct::new(verts.len(), &labels);
    let mut point = 0;
    for (i, v) in verts.iter().enumerate() {
        if let Some((p, l)) = &v.parent {
            m.add_edge(l, *p, i).expect("tree label in alphabet");
        }
        if v.point {
            point = i;
        }
    }
    (m, 0, point)
}

/// Whether a homomorphism `t -> m` sends the root to `x` and the point to `y`.
pub fn hom_into(t: &Tree, m: &RelStruct, x: usize, y: usize) -> bool {
    let cand = hom_candidates(t, m, y);
    cand[x / 64] >> (x % 64) & 1 == 1
}

/// Every `(x, y)` admitting a root/point-preserving homomorphism `t -> m`.
pub fn hom_relation(t: &Tree, m: &RelStruct) -> Relation {
    let mut r = Relation::empty(m.n);
    for y in 0..m.n {
        let cand = hom_candidates(t, m, y);
        for x in 0..m.n {
            if cand[x / 64] >> (x % 64) & 1 == 1 {
                r.insert(x, y);
            }
        }
    }
    r
}

/// Vertices of `m` the root of `t` can map to, with the point sent to `y`.
fn hom_candidates(t: &Tree, m: &RelStruct, y: usize) -> Vec<u64> {
    let stride = m.n.div_ceil(64).max(1);
    let mut set = vec![0u64; stride];
    if t.is_point_here() {
        set[y / 64] = 1 << (y % 64);
    } else {
        for x in 0..m.n {
            set[x / 64] |= 1 << (x % 64);
        }
    }
    for (l, c) in t.children() {
        let Some(rel) = m.edges(l) else {
            return vec![0; stride];
        };
        let pre = rel.preimage(&hom_candidates(c, m, y));
        for (a, b) in set.iter_mut().zip(pre) {
            *a &= b;
        }
    }
    set
}

/// A structure and a pair on which two terms disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub structure: RelStruct,
    pub x: usize,
    pub y: usize,
    /// Whether the pair satisfies the left-hand term.
    pub left_holds: bool,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pair {} {}", self.structure, self.x, self.y)
    }
}

/// Searches all structures with up to `max_vertices` vertices over the
/// variables of `s` and `t`, in a fixed order, for one where they differ.
///
/// Structures are ordered by vertex count, then by the edge bitmaps read as
/// one number (first label most significant, bit `i * n + j` for `i -> j`).
/// `None` only means no counterexample exists at this scale.
pub fn refute(s: &Term, t: &Term, max_vertices: usize) -> Result<Option<Counterexample>> {
    refute_in(Mode::default(), s, t, max_vertices)
}

pub fn refute_in(
    mode: Mode,
    s: &Term,
    t: &Term,
    max_vertices: usize,
) -> Result<Option<Counterexample>> {
    let mut labels: Vec<Label> = s.vars().into_iter().chain(t.vars()).collect();
    labels.sort();
    labels.dedup();
    let mut dag = Dag::default();
    let si = dag.add(s, &labels);
    let ti = dag.add(t, &labels);
    for n in 1..=max_vertices {
        let bits = labels.len() * n * n;
        if n > 8 || bits > 40 {
            return Err(Error::Unsupported(format!(
                "exhaustive search over {n}-vertex structures with {} labels is out of reach",
                labels.len()
            )));
        }
        if let Some((mask, x, y, left)) = search_size(mode, &dag, si, ti, labels.len(), n) {
            let mut m = RelStruct::new(n, &labels);
            for (l, label) in labels.iter().enumerate() {
                let chunk = mask >> ((labels.len() - 1 - l) * n * n);
                for i in 0..n {
                    for j in 0..n {
                        if chunk >> (i * n + j) & 1 == 1 {
                            m.add_edge(label, i, j)?;
                        }
                    }
                }
            }
            return Ok(Some(Counterexample {
                structure: m,
                x,
                y,
                left_holds: left,
            }));
        }
    }
    Ok(None)
}

// Small relations: row i is a bitmask over at most 8 columns.
type Small = [u8; 8];

#[derive(Clone, Copy)]
enum Op {
    Var(usize),
    Zero,
    One,
    Comp(usize, usize),
    Union(usize, usize),
    Star(usize),
    Dom(usize),
    Antidom(usize),
}

/// Terms as a shared-subterm DAG in evaluation order.
#[derive(Default)]
struct Dag {
    ops: Vec<Op>,
    index: HashMap<Term, usize>,
}

impl Dag {
    fn add(&mut self, t: &Term, labels: &[Label]) -> usize {
        if let Some(&i) = self.index.get(t) {
            return i;
        }
        let op = match t {
            Term::Var(l) => Op::Var(labels.binary_search(l).expect("label collected")),
            Term::Zero => Op::Zero,
            Term::One => Op::One,
            Term::Comp(a, b) => Op::Comp(self.add(a, labels), self.add(b, labels)),
            Term::Union(a, b) => Op::Union(self.add(a, labels), self.add(b, labels)),
            Term::Star(a) => Op::Star(self.add(a, labels)),
            Term::Dom(a) => Op::Dom(self.add(a, labels)),
            Term::Antidom(a) => Op::Antidom(self.add(a, labels)),
        };
        self.ops.push(op);
        self.index.insert(t.clone(), self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn eval(&self, n: usize, rels: &[Small], vals: &mut Vec<Small>) {
        vals.clear();
        let id = small_identity(n);
        for op in &self.ops {
            let v = match *op {
                Op::Var(l) => rels[l],
                Op::Zero => [0; 8],
                Op::One => id,
                Op::Comp(a, b) => small_compose(n, &vals[a], &vals[b]),
                Op::Union(a, b) => {
                    let mut r = vals[a];
                    for i in 0..n {
                        r[i] |= vals[b][i];
                    }
                    r
                }
                Op::Star(a) => {
                    let mut r = vals[a];
                    for i in 0..n {
                        r[i] |= id[i];
                    }
                    loop {
                        let next = small_compose(n, &r, &r);
                        if next == r {
                            break r;
                        }
                        r = next;
                    }
                }
                Op::Dom(a) => {
                    let mut r = [0; 8];
                    for i in 0..n {
                        if vals[a][i] != 0 {
                            r[i] = 1 << i;
                        }
                    }
                    r
                }
                Op::Antidom(a) => {
                    let mut r = [0; 8];
                    for i in 0..n {
                        if vals[a][i] == 0 {
                            r[i] = 1 << i;
                        }
                    }
                    r
                }
            };
            vals.push(v);
        }
    }
}

fn small_identity(n: usize) -> Small {
    let mut r = [0; 8];
    for (i, row) in r.iter_mut().enumerate().take(n) {
        *row = 1 << i;
    }
    r
}

fn small_compose(n: usize, a: &Small, b: &Small) -> Small {
    let mut r = [0; 8];
    for i in 0..n {
        let mut row = a[i];
        let mut acc = 0;
        while row != 0 {
            let j = row.trailing_zeros() as usize;
            acc |= b[j];
            row &= row - 1;
        }
        r[i] = acc;
    }
    r
}

/// Vertex permutations as bit-position maps on one label's `n * n` bitmap.
struct Symmetry {
    n: usize,
    perms: Vec<Vec<usize>>,
    // tables[p][k] = permuted image of an n*n chunk value k, when small enough
    tables: Vec<Vec<u64>>,
}

impl Symmetry {
    fn new(n: usize) -> Symmetry {
        let mut perms = Vec::new();
        let mut p: Vec<usize> = (0..n).collect();
        permutations(&mut p, 0, &mut perms);
        perms.retain(|p| p.iter().enumerate().any(|(i, &j)| i != j));
        let maps: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| (0..n * n).map(|b| p[b / n] * n + p[b % n]).collect())
            .collect();
        let tables = if n * n <= 16 {
            maps.iter()
                .map(|m| (0..1u64 << (n * n)).map(|k| permute_bits(k, m)).collect())
                .collect()
        } else {
            Vec::new()
        };
        Symmetry {
            n,
            perms: maps,
            tables,
        }
    }

    /// Whether no vertex relabelling gives a smaller mask.
    fn is_minimal(&self, mask: u64, labels: usize) -> bool {
        let w = self.n * self.n;
        let chunk_mask = (1u64 << w) - 1;
        for (p, map) in self.perms.iter().enumerate() {
            let mut image = 0u64;
            for l in 0..labels {
                let shift = (labels - 1 - l) * w;
                let chunk = (mask >> shift) & chunk_mask;
                let pc = if self.tables.is_empty() {
                    permute_bits(chunk, map)
                } else {
                    self.tables[p][chunk as usize]
                };
                image = (image << w) | pc;
            }
            if image < mask {
                return false;
            }
        }
        true
    }
}

fn permute_bits(k: u64, map: &[usize]) -> u64 {
    let mut out = 0;
    for (b, &to) in map.iter().enumerate() {
        if k >> b & 1 == 1 {
            out |= 1 << to;
        }
    }
    out
}

fn permutations(p: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == p.len() {
        out.push(p.clone());
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, out);
        p.swap(k, i);
    }
}

const CHUNK: u64 = 1 << 12;

/// First `(mask, x, y, left_holds)` at size `n`, in mask order.
fn search_size(
    mode: Mode,
    dag: &Dag,
    si: usize,
    ti: usize,
    labels: usize,
    n: usize,
) -> Option<(u64, usize, usize, bool)> {
    let w = n * n;
    let total = 1u64 << (labels * w);
    let sym = Symmetry::new(n);
    let chunks = total.div_ceil(CHUNK) as usize;
    exec::find_first_index(mode, chunks, |c| {
        let lo = c as u64 * CHUNK;
        let hi = (lo + CHUNK).min(total);
        let mut rels = vec![[0u8; 8]; labels];
        let mut vals = Vec::with_capacity(dag.ops.len());
        for mask in lo..hi {
            if !sym.is_minimal(mask, labels) {
                continue;
            }
            for (l, rel) in rels.iter_mut().enumerate() {
                let chunk = mask >> ((labels - 1 - l) * w);
                for (i, row) in rel.iter_mut().enumerate().take(n) {
                    *row = ((chunk >> (i * n)) & ((1 << n) - 1)) as u8;
                }
            }
            dag.eval(n, &rels, &mut vals);
            let (a, b) = (vals[si], vals[ti]);
            if a != b {
                for i in 0..n {
                    let diff = a[i] ^ b[i];
                    if diff != 0 {
                        let j = diff.trailing_zeros() as usize;
                        return Some((mask, i, j, a[i] >> j & 1 == 1));
                    }
                }
            }
        }
        None
    })
}
