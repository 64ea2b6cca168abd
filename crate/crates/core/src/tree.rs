//! Pointed edge-labelled rooted trees in canonical form.
//!
//! A [`Tree`] is a node holding a point flag and a *set* of `(label, child)`
//! pairs, kept sorted in canonical order and free of duplicates, so that
//! structural equality coincides with tree identity. Subtrees of a pointed
//! tree are ordinary `Tree` values that carry no point.
//!
//! The preorder `t1.leq(t2)` holds iff there is a homomorphism `t2 -> t1`
//! sending root to root and (when `t2` has one) point to point.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::term::Label;

#[derive(Clone)]
pub struct Tree(Arc<Node>);

struct Node {
    point: bool,
    children: Vec<(Label, Tree)>,
    hash: u64,
    edges: usize,
    depth: usize,
    points: usize,
    reduced: bool,
}

impl Tree {
    /// Builds a node from an arbitrary child list; children are sorted and
    /// duplicate pairs merged.
    pub fn node(point: bool, mut children: Vec<(Label, Tree)>) -> Tree {
        children.sort();
        children.dedup();
        Tree::from_sorted(point, children, false)
    }

    fn from_sorted(point: bool, children: Vec<(Label, Tree)>, reduced: bool) -> Tree {
        let mut h = DefaultHasher::new();
        point.hash(&mut h);
        let mut edges = 0;
        let mut depth = 0;
        let mut points = usize::from(point);
        for (l, c) in &children {
            l.hash(&mut h);
            h.write_u64(c.0.hash);
            edges += 1 + c.0.edges;
            depth = depth.max(1 + c.0.depth);
            points += c.0.points;
        }
        Tree(Arc::new(Node {
            point,
            children,
            hash: h.finish(),
            edges,
            depth,
            points,
            reduced,
        }))
    }

    /// The single-vertex tree whose root is the point.
    pub fn trivial() -> Tree {
        Tree::from_sorted(true, Vec::new(), true)
    }

    /// Unpointed single vertex; only meaningful as a subtree.
    pub fn leaf() -> Tree {
        Tree::from_sorted(false, Vec::new(), true)
    }

    /// Two vertices joined by an `a`-edge, point at the child.
    pub fn edge(label: Label) -> Tree {
        Tree::from_sorted(false, vec![(label, Tree::trivial())], true)
    }

    /// A path spelling `labels` with the point at the far end.
    pub fn path(labels: &[Label]) -> Tree {
        labels.iter().rev().fold(Tree::trivial(), |acc, l| {
            Tree::from_sorted(false, vec![(l.clone(), acc)], true)
        })
    }

    pub fn parse(text: &str) -> Result<Tree> {
        let mut p = TreeParser {
            src: text.as_bytes(),
            pos: 0,
        };
        let t = p.node()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Tree(format!("trailing input at {}", p.pos)));
        }
        if t.point_count() != 1 {
            return Err(Error::Tree(format!(
                "expected exactly one point marker, found {}",
                t.point_count()
            )));
        }
        Ok(t)
    }

    pub fn is_point_here(&self) -> bool {
        self.0.point
    }

    pub fn children(&self) -> &[(Label, Tree)] {
        &self.0.children
    }

    pub fn edge_count(&self) -> usize {
        self.0.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.0.edges + 1
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn point_count(&self) -> usize {
        self.0.points
    }

    pub fn is_pointed(&self) -> bool {
        self.0.points == 1
    }

    pub fn ptr_eq(a: &Tree, b: &Tree) -> bool {
        Arc::ptr_eq(&a.0, &b.0)
    }

    /// Edge labels in the order they occur anywhere in the tree, deduplicated.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_labels(&self, out: &mut Vec<Label>) {
        for (l, c) in self.children() {
            out.push(l.clone());
            c.collect_labels(out);
        }
    }

    /// Labels along the root-to-point path, `None` for unpointed trees.
    pub fn point_path(&self) -> Option<Vec<Label>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            if cur.0.point {
                return Some(out);
            }
            let (l, c) = cur.children().iter().find(|(_, c)| c.0.points > 0)?;
            out.push(l.clone());
            cur = c;
        }
    }

    /// `self <= other`: a homomorphism `other -> self` exists.
    pub fn leq(&self, other: &Tree) -> bool {
        if Tree::ptr_eq(self, other) {
            return true;
        }
        if other.0.point && !self.0.point {
            return false;
        }
        if other.0.depth > self.0.depth || other.0.points > self.0.points {
            return false;
        }
        other
            .children()
            .iter()
            .all(|(a, c2)| self.children_labelled(a).iter().any(|(_, c1)| c1.leq(c2)))
    }

    fn children_labelled(&self, label: &Label) -> &[(Label, Tree)] {
        let kids = self.children();
        let lo = kids.partition_point(|(l, _)| l < label);
        let hi = lo + kids[lo..].partition_point(|(l, _)| l == label);
        &kids[lo..hi]
    }

    /// Searches for a root- and point-preserving homomorphism
    /// `source -> target`. The map is indexed by the preorder number of the
    /// source vertex and yields preorder numbers in `target`.
    pub fn hom_search(source: &Tree, target: &Tree) -> Option<Vec<usize>> {
        let mut map = vec![usize::MAX; source.vertex_count()];
        if hom_rec(source, target, 0, 0, &mut map) {
            Some(map)
        } else {
            None
        }
    }

    /// Whether the reduced-form predicate holds at every vertex.
    pub fn is_reduced(&self) -> bool {
        if self.0.reduced {
            return true;
        }
        let kids = self.children();
        kids.iter().all(|(_, c)| c.is_reduced())
            && kids.iter().enumerate().all(|(i, (a, ci))| {
                kids.iter()
                    .enumerate()
                    .all(|(j, (b, cj))| i == j || a != b || !cj.leq(ci))
            })
    }

    /// Canonical representative of the `<=`-equivalence class.
    pub fn reduce(&self) -> Tree {
        if self.0.reduced {
            return self.clone();
        }
        let mut kids: Vec<(Label, Tree)> = self
            .children()
            .iter()
            .map(|(l, c)| (l.clone(), c.reduce()))
            .collect();
        kids.sort();
        kids.dedup();
        let keep: Vec<bool> = (0..kids.len())
            .map(|i| {
                let (a, ci) = &kids[i];
                !kids
                    .iter()
                    .enumerate()
                    .any(|(j, (b, cj))| j != i && a == b && cj.leq(ci))
            })
            .collect();
        let kept = kids
            .into_iter()
            .zip(keep)
            .filter_map(|(kid, k)| k.then_some(kid))
            .collect();
        Tree::from_sorted(self.0.point, kept, true)
    }

    /// Pointed concatenation: glue `s` onto the point of `self`, move the
    /// point to that of `s`, then reduce.
    pub fn concat(&self, s: &Tree) -> Tree {
        debug_assert!(self.is_pointed() && s.is_pointed());
        self.graft(s).reduce()
    }

    fn graft(&self, s: &Tree) -> Tree {
        if self.0.point {
            let mut kids = self.0.children.clone();
            kids.extend(s.children().iter().cloned());
            Tree::node(s.0.point, kids)
        } else {
            let kids = self
                .children()
                .iter()
                .map(|(l, c)| {
                    if c.0.points > 0 {
                        (l.clone(), c.graft(s))
                    } else {
                        (l.clone(), c.clone())
                    }
                })
                .collect();
            Tree::node(false, kids)
        }
    }

    /// Moves the point to the root, then reduces.
    pub fn dom(&self) -> Tree {
        if self.0.point {
            return self.reduce();
        }
        let stripped = self.strip_point();
        Tree::node(true, stripped.0.children.clone()).reduce()
    }

    fn strip_point(&self) -> Tree {
        if self.0.points == 0 {
            return self.clone();
        }
        let kids = self
            .children()
            .iter()
            .map(|(l, c)| (l.clone(), c.strip_point()))
            .collect();
        Tree::node(false, kids)
    }

    /// Glues two pointed trees along their root-to-point paths, vertex by
    /// vertex. `None` when the path label words differ.
    pub fn glue_paths(&self, other: &Tree) -> Option<Tree> {
        if self.0.point != other.0.point {
            return None;
        }
        if self.0.point {
            let mut kids = self.0.children.clone();
            kids.extend(other.children().iter().cloned());
            return Some(Tree::node(true, kids));
        }
        let (la, ca) = self.children().iter().find(|(_, c)| c.0.points > 0)?;
        let (lb, cb) = other.children().iter().find(|(_, c)| c.0.points > 0)?;
        if la != lb {
            return None;
        }
        let glued = ca.glue_paths(cb)?;
        let mut kids: Vec<(Label, Tree)> = self
            .children()
            .iter()
            .chain(other.children())
            .filter(|(_, c)| c.0.points == 0)
            .cloned()
            .collect();
        kids.push((la.clone(), glued));
        Some(Tree::node(false, kids))
    }

    /// Injective byte encoding; byte order agrees with `Ord`.
    ///
    /// Layout per vertex: flag (`0x01` point, `0x02` otherwise), then per
    /// child `0x05 label 0x03 child`, then the terminator `0x00`.
    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 * self.vertex_count());
        self.write_key(&mut out);
        out
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        out.push(if self.0.point { 0x01 } else { 0x02 });
        for (l, c) in self.children() {
            out.push(0x05);
            out.extend_from_slice(l.as_str().as_bytes());
            out.push(0x03);
            c.write_key(out);
        }
        out.push(0x00);
    }

    /// Vertices in preorder.
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut out = Vec::with_capacity(self.vertex_count());
        self.push_vertices(None, 0, &mut out);
        out
    }

    fn push_vertices(&self, parent: Option<(usize, Label)>, depth: usize, out: &mut Vec<Vertex>) {
        let id = out.len();
        out.push(Vertex {
            parent,
            depth,
            point: self.0.point,
        });
        for (l, c) in self.children() {
            c.push_vertices(Some((id, l.clone())), depth + 1, out);
        }
    }

    /// Preorder index of the point.
    pub fn point_index(&self) -> Option<usize> {
        let mut idx = 0;
        let mut cur = self;
        loop {
            if cur.0.point {
                return Some(idx);
            }
            idx += 1;
            let mut found = None;
            for (_, c) in cur.children() {
                if c.0.points > 0 {
                    found = Some(c);
                    break;
                }
                idx += c.vertex_count();
            }
            cur = found?;
        }
    }

    /// DOT rendering: root as a double circle, point filled.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        self.write_dot_body("n", &mut out);
        out.push_str("}\n");
        out
    }

    /// Node and edge statements, node ids prefixed with `prefix`.
    pub fn write_dot_body(&self, prefix: &str, out: &mut String) {
        for (i, v) in self.vertices().iter().enumerate() {
            let shape = if i == 0 { "doublecircle" } else { "circle" };
            let style = if v.point { ", style=filled" } else { "" };
            out.push_str(&format!(
                "  {prefix}{i} [label=\"\", shape={shape}{style}];\n"
            ));
            if let Some((p, l)) = &v.parent {
                out.push_str(&format!("  {prefix}{p} -> {prefix}{i} [label=\"{l}\"];\n"));
            }
        }
    }
}

/// A vertex in preorder position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub parent: Option<(usize, Label)>,
    pub depth: usize,
    pub point: bool,
}

fn hom_rec(s: &Tree, t: &Tree, s_id: usize, t_id: usize, map: &mut [usize]) -> bool {
    if s.0.point && !t.0.point {
        return false;
    }
    map[s_id] = t_id;
    let mut s_off = s_id + 1;
    for (a, sc) in s.children() {
        let mut t_off = t_id + 1;
        let mut found = false;
        for (b, tc) in t.children() {
            if a == b && tc.leq(sc) {
                found = hom_rec(sc, tc, s_off, t_off, map);
                debug_assert!(found);
                break;
            }
            t_off += tc.vertex_count();
        }
        if !found {
            return false;
        }
        s_off += sc.vertex_count();
    }
    true
}

impl PartialEq for Tree {
    fn eq(&self, other: &Tree) -> bool {
        Tree::ptr_eq(self, other)
            || (self.0.hash == other.0.hash
                && self.0.point == other.0.point
                && self.0.children == other.0.children)
    }
}

impl Eq for Tree {}

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl Ord for Tree {
    fn cmp(&self, other: &Tree) -> std::cmp::Ordering {
        if Tree::ptr_eq(self, other) {
            return std::cmp::Ordering::Equal;
        }
        (!self.0.point)
            .cmp(&!other.0.point)
            .then_with(|| self.0.children.cmp(&other.0.children))
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Tree) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (l, c)) in self.children().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}:{c}")?;
        }
        f.write_str("}")?;
        if self.0.point {
            f.write_str("!")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        Tree::parse(s)
    }
}

struct TreeParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl TreeParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Tree(format!(
                "expected `{}` at {}",
                b as char, self.pos
            )))
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn node(&mut self) -> Result<Tree> {
        self.expect(b'{')?;
        let mut kids = Vec::new();
        if self.peek() != Some(b'}') {
            loop {
                self.skip_ws();
                let start = self.pos;
                while self.pos < self.src.len()
                    && matches!(self.src[self.pos], b'a'..=b'z' | b'0'..=b'9' | b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                if !Label::is_valid(name) {
                    return Err(Error::Tree(format!("expected a label at {start}")));
                }
                self.expect(b':')?;
                let child = self.node()?;
                kids.push((Label::new(name), child));
                if self.peek() == Some(b',') {
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        self.expect(b'}')?;
        let point = if self.peek() == Some(b'!') {
            self.pos += 1;
            true
        } else {
            false
        };
        Ok(Tree::node(point, kids))
    }
}

/// Memoised `<=` for repeated comparisons among the same subtrees.
#[derive(Default)]
pub struct LeqCache {
    memo: HashMap<(Tree, Tree), bool>,
}

impl LeqCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leq(&mut self, t1: &Tree, t2: &Tree) -> bool {
        if Tree::ptr_eq(t1, t2) {
            return true;
        }
        if (t2.0.point && !t1.0.point) || t2.0.depth > t1.0.depth || t2.0.points > t1.0.points {
            return false;
        }
        let key = (t1.clone(), t2.clone());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let v = t2.children().iter().all(|(a, c2)| {
            t1.children_labelled(a)
                .iter()
                .any(|(_, c1)| self.leq(c1, c2))
        });
        self.memo.insert(key, v);
        v
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }
}

/// Generates reduced trees level by level (by exact edge count).
pub struct TreeEnumerator {
    alphabet: Vec<Label>,
    // levels[n] = [unpointed reduced trees, pointed reduced trees] with n edges
    levels: Vec<[Vec<Tree>; 2]>,
}

impl TreeEnumerator {
    pub fn new(alphabet: &[Label]) -> Self {
        let mut alphabet = alphabet.to_vec();
        alphabet.sort();
        alphabet.dedup();
        TreeEnumerator {
            alphabet,
            levels: vec![[vec![Tree::leaf()], vec![Tree::trivial()]]],
        }
    }

    pub fn alphabet(&self) -> &[Label] {
        &self.alphabet
    }

    /// Reduced pointed trees with exactly `edges` edges, canonically sorted.
    pub fn exact(&mut self, edges: usize) -> &[Tree] {
        while self.levels.len() <= edges {
            self.grow();
        }
        &self.levels[edges][1]
    }

    fn grow(&mut self) {
        let n = self.levels.len();
        let mut items: Vec<(Label, Tree, usize, usize)> = Vec::new();
        for (m, level) in self.levels.iter().enumerate() {
            for l in &self.alphabet {
                for (p, trees) in level.iter().enumerate() {
                    for t in trees {
                        items.push((l.clone(), t.clone(), m + 1, p));
                    }
                }
            }
        }
        items.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));

        let mut unpointed = Vec::new();
        let mut pointed = Vec::new();
        let mut chosen: Vec<(Label, Tree)> = Vec::new();
        // unpointed subtrees
        choose(&items, 0, n, 0, &mut chosen, &mut |kids| {
            unpointed.push(Tree::from_sorted(false, kids.to_vec(), true));
        });
        // point at the root
        choose(&items, 0, n, 0, &mut chosen, &mut |kids| {
            pointed.push(Tree::from_sorted(true, kids.to_vec(), true));
        });
        // point strictly below the root
        choose(&items, 0, n, 1, &mut chosen, &mut |kids| {
            pointed.push(Tree::from_sorted(false, kids.to_vec(), true));
        });
        unpointed.sort();
        pointed.sort();
        self.levels.push([unpointed, pointed]);
    }
}

type Emit<'a> = dyn FnMut(&[(Label, Tree)]) + 'a;

/// Chooses strictly increasing items with total weight `budget` and exactly
/// `points` pointed children, keeping each label class a `<=`-antichain.
fn choose(
    items: &[(Label, Tree, usize, usize)],
    start: usize,
    budget: usize,
    points: usize,
    chosen: &mut Vec<(Label, Tree)>,
    emit: &mut Emit<'_>,
) {
    if budget == 0 {
        if points == 0 {
            emit(chosen);
        }
        return;
    }
    for i in start..items.len() {
        let (l, t, w, p) = &items[i];
        if *w > budget || *p > points {
            continue;
        }
        let clash = chosen
            .iter()
            .any(|(l2, t2)| l2 == l && (t2.leq(t) || t.leq(t2)));
        if clash {
            continue;
        }
        chosen.push((l.clone(), t.clone()));
        choose(items, i + 1, budget - w, points - p, chosen, emit);
        chosen.pop();
    }
}

/// Every reduced pointed tree over `alphabet` with at most `max_edges`
/// edges, by edge count then canonical order.
pub fn enumerate(alphabet: &[Label], max_edges: usize) -> Vec<Tree> {
    let mut en = TreeEnumerator::new(alphabet);
    let mut out = Vec::new();
    for k in 0..=max_edges {
        out.extend_from_slice(en.exact(k));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::alphabet;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn a() -> Label {
        Label::new("a")
    }

    fn b() -> Label {
        Label::new("b")
    }

    // A redundant unpointed branch, its reduction, and a reduced tree.
    const REDUCE_INPUT: &str = "{a:{a:{}, b:{}}!, a:{}}";
    const REDUCE_OUTPUT: &str = "{a:{a:{}, b:{}}!}";
    const REDUCE_FIXED: &str = "{a:{}!, a:{a:{}, b:{}}}";

    #[test]
    fn text_format_examples() {
        assert_eq!(Tree::trivial().to_string(), "{}!");
        assert_eq!(Tree::edge(a()).to_string(), "{a:{}!}");
        let shapes = t("{a:{b:{}}, a:{}}!");
        assert_eq!(shapes.to_string(), "{a:{}, a:{b:{}}}!");
        assert_eq!(t(REDUCE_INPUT).to_string(), REDUCE_INPUT);
        assert!(Tree::parse("{}").is_err());
        assert!(Tree::parse("{a:{}!}!").is_err());
        assert!(Tree::parse("{A:{}!}").is_err());
        assert!(Tree::parse("{a:{}!").is_err());
        assert!(Tree::parse("{a:{}!} x").is_err());
    }

    #[test]
    fn duplicate_children_merge() {
        let d = t("{a:{}, a:{}}!");
        assert_eq!(d, t("{a:{}}!"));
        assert_eq!(d.edge_count(), 1);
    }

    #[test]
    fn trivial_and_edge() {
        let triv = Tree::trivial();
        assert_eq!(triv.edge_count(), 0);
        assert_eq!(triv.vertex_count(), 1);
        assert_eq!(triv.dom(), triv);
        let e = Tree::edge(a());
        assert_eq!(e.vertex_count(), 2);
        assert_ne!(e, e.dom());
        assert!(!Tree::edge(a()).leq(&Tree::edge(b())));
        assert!(!Tree::edge(b()).leq(&Tree::edge(a())));
    }

    #[test]
    fn leq_examples() {
        let da = Tree::edge(a()).dom();
        assert!(da.leq(&Tree::trivial()));
        assert!(!Tree::trivial().leq(&da));
        let left = t(REDUCE_INPUT);
        let mid = t(REDUCE_OUTPUT);
        assert!(left.leq(&mid));
        assert!(mid.leq(&left));
    }

    #[test]
    fn hom_search_examples() {
        let fixed = t(REDUCE_FIXED);
        let id = Tree::hom_search(&fixed, &fixed).unwrap();
        assert_eq!(id, (0..fixed.vertex_count()).collect::<Vec<_>>());
        assert!(Tree::hom_search(&Tree::edge(a()), &Tree::trivial()).is_none());
        // middle -> left: the reduced tree maps into the unreduced one
        let left = t(REDUCE_INPUT);
        let mid = t(REDUCE_OUTPUT);
        let m = Tree::hom_search(&mid, &left).unwrap();
        assert_eq!(m, vec![0, 1, 2, 3]);
        // left -> middle collapses the two a-children of the root
        let m = Tree::hom_search(&left, &mid).unwrap();
        assert_eq!(m[1], 1);
        assert_eq!(m[4], 1);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(t(REDUCE_INPUT).reduce(), t(REDUCE_OUTPUT));
        assert_eq!(t(REDUCE_INPUT).reduce().to_string(), REDUCE_OUTPUT);
        assert_eq!(t(REDUCE_FIXED).reduce(), t(REDUCE_FIXED));
        assert!(t(REDUCE_FIXED).is_reduced());
        assert!(!t(REDUCE_INPUT).is_reduced());
        assert_eq!(Tree::trivial().reduce(), Tree::trivial());
    }

    #[test]
    fn concat_examples() {
        let ab = Tree::edge(a()).concat(&Tree::edge(b()));
        assert_eq!(ab, Tree::path(&[a(), b()]));
        assert_eq!(ab.to_string(), "{a:{b:{}!}}");
        let e = Tree::edge(a());
        assert_eq!(e.concat(&Tree::trivial()), e);
        assert_eq!(Tree::trivial().concat(&e), e);
        assert_eq!(e.dom().concat(&e), e);
    }

    #[test]
    fn dom_examples() {
        let d = Tree::edge(a()).dom();
        assert_eq!(d.to_string(), "{a:{}}!");
        assert_eq!(d.dom(), d);
    }

    #[test]
    fn canonical_keys() {
        let triv = Tree::trivial().canonical_key();
        for tr in enumerate(&alphabet(&["a", "b"]), 3) {
            assert!(triv <= tr.canonical_key());
        }
        assert_ne!(
            Tree::edge(a()).canonical_key(),
            Tree::edge(a()).dom().canonical_key()
        );
        let shapes: Vec<Vec<u8>> = ["{}!", "{a:{}}!", "{a:{}, a:{b:{}}}!"]
            .iter()
            .map(|s| t(s).canonical_key())
            .collect();
        assert_ne!(shapes[0], shapes[1]);
        assert_ne!(shapes[1], shapes[2]);
        assert_ne!(shapes[0], shapes[2]);
    }

    #[test]
    fn key_order_matches_ord() {
        let trees = enumerate(&alphabet(&["a", "b"]), 3);
        for x in &trees {
            for y in &trees {
                assert_eq!(
                    x.cmp(y),
                    x.canonical_key().cmp(&y.canonical_key()),
                    "{x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn enumerate_small() {
        assert_eq!(enumerate(&alphabet(&["a"]), 0), vec![Tree::trivial()]);
        let one = enumerate(&alphabet(&["a"]), 1);
        assert_eq!(one.len(), 3);
        assert!(one.contains(&Tree::trivial()));
        assert!(one.contains(&Tree::edge(a())));
        assert!(one.contains(&Tree::edge(a()).dom()));
    }

    #[test]
    fn enumerate_is_duplicate_free_and_reduced() {
        let trees = enumerate(&alphabet(&["a", "b"]), 4);
        let mut sorted = trees.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), trees.len());
        let mut last = 0;
        for tr in &trees {
            assert!(tr.edge_count() >= last);
            last = tr.edge_count();
            assert!(tr.is_pointed());
            assert!(Tree::node(tr.is_point_here(), tr.children().to_vec()).is_reduced());
            assert_eq!(tr.reduce(), *tr);
        }
    }

    #[test]
    fn cache_agrees_with_plain_leq() {
        let trees = enumerate(&alphabet(&["a", "b"]), 3);
        let mut cache = LeqCache::new();
        for x in &trees {
            for y in &trees {
                assert_eq!(cache.leq(x, y), x.leq(y));
            }
        }
        assert!(!cache.is_empty());
    }

    #[test]
    fn glue_paths_shapes() {
        let da = Tree::edge(a()).dom();
        let db = Tree::edge(b()).dom();
        assert_eq!(
            da.glue_paths(&db).unwrap().reduce().to_string(),
            "{a:{}, b:{}}!"
        );
        assert!(Tree::edge(a()).glue_paths(&Tree::edge(b())).is_none());
        assert!(Tree::edge(a()).glue_paths(&Tree::trivial()).is_none());
    }

    #[test]
    fn dot_output() {
        let d = Tree::path(&[a(), b()]).dom().to_dot("t");
        assert_eq!(d.matches("shape=").count(), 3);
        assert!(d.contains("n0 [label=\"\", shape=doublecircle, style=filled]"));
        assert!(d.contains("n0 -> n1 [label=\"a\"]"));
    }

    #[test]
    fn point_path_and_index() {
        let tr = t("{b:{}, a:{c:{}, a:{}!}}");
        assert_eq!(tr.point_path().unwrap(), vec![a(), a()]);
        let idx = tr.point_index().unwrap();
        assert!(tr.vertices()[idx].point);
    }
}
