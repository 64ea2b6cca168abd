//! Terms over the signature `{;, +, *, 0, 1, D, A}`.
//!
//! Concrete syntax: composition is `;`, union is `+`, Kleene star is a
//! postfix `*`, and the test operators are written `D(..)` and `A(..)`.
//! Variables are lowercase identifiers. Star binds tightest, then `;`, then
//! `+`; both binary operators associate to the left.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, ParseErrorKind, Result};

/// An alphabet symbol: a variable of a term and an edge label of a tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(name: &str) -> Self {
        Label(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Lowercase identifier check (`[a-z][a-z0-9_]*`).
    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        matches!(chars.next(), Some('a'..='z'))
            && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '_'))
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

/// Builds a sorted alphabet from string names.
pub fn alphabet(names: &[&str]) -> Vec<Label> {
    let set: BTreeSet<Label> = names.iter().map(|n| Label::new(n)).collect();
    set.into_iter().collect()
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Label),
    Zero,
    One,
    Comp(Box<Term>, Box<Term>),
    Union(Box<Term>, Box<Term>),
    Star(Box<Term>),
    Dom(Box<Term>),
    Antidom(Box<Term>),
}

/// Signature fragments, ordered by inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    /// `{;, 1, D}`
    CD1,
    /// `{;, +, 0, 1, D}`
    StarFree,
    /// `{;, +, *, 0, 1, D}`
    Full,
    /// Full plus `A`.
    WithAntidomain,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::CD1 => "cd1",
            Fragment::StarFree => "star-free",
            Fragment::Full => "full",
            Fragment::WithAntidomain => "with-antidomain",
        })
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Label::new(name))
    }

    pub fn comp(l: Term, r: Term) -> Term {
        Term::Comp(Box::new(l), Box::new(r))
    }

    pub fn union(l: Term, r: Term) -> Term {
        Term::Union(Box::new(l), Box::new(r))
    }

    pub fn star(t: Term) -> Term {
        Term::Star(Box::new(t))
    }

    pub fn dom(t: Term) -> Term {
        Term::Dom(Box::new(t))
    }

    pub fn antidom(t: Term) -> Term {
        Term::Antidom(Box::new(t))
    }

    /// Left-nested composition of `parts`; `1` when empty.
    pub fn comp_all<I: IntoIterator<Item = Term>>(parts: I) -> Term {
        parts.into_iter().reduce(Term::comp).unwrap_or(Term::One)
    }

    /// Left-nested union of `parts`; `0` when empty.
    pub fn union_all<I: IntoIterator<Item = Term>>(parts: I) -> Term {
        parts.into_iter().reduce(Term::union).unwrap_or(Term::Zero)
    }

    pub fn parse(text: &str) -> Result<Term> {
        Parser::new(text).parse_complete()
    }

    /// Smallest fragment containing every operator of the term.
    pub fn classify(&self) -> Fragment {
        match self {
            Term::Var(_) | Term::One => Fragment::CD1,
            Term::Zero => Fragment::StarFree,
            Term::Comp(l, r) => l.classify().max(r.classify()),
            Term::Dom(b) => b.classify(),
            Term::Union(l, r) => Fragment::StarFree.max(l.classify()).max(r.classify()),
            Term::Star(b) => Fragment::Full.max(b.classify()),
            Term::Antidom(_) => Fragment::WithAntidomain,
        }
    }

    /// Errors unless the term lies inside `expected`.
    pub fn require(&self, expected: Fragment) -> Result<()> {
        let found = self.classify();
        if found <= expected {
            Ok(())
        } else {
            Err(Error::Fragment {
                term: self.to_string(),
                expected,
                found,
            })
        }
    }

    pub fn vars(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Label>) {
        match self {
            Term::Var(l) => {
                out.insert(l.clone());
            }
            Term::Zero | Term::One => {}
            Term::Comp(l, r) | Term::Union(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => b.collect_vars(out),
        }
    }

    /// Number of operator and constant nodes, variables excluded.
    pub fn operator_count(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Zero | Term::One => 1,
            Term::Comp(l, r) | Term::Union(l, r) => 1 + l.operator_count() + r.operator_count(),
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => 1 + b.operator_count(),
        }
    }

    /// Total node count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Zero | Term::One => 1,
            Term::Comp(l, r) | Term::Union(l, r) => 1 + l.size() + r.size(),
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => 1 + b.size(),
        }
    }

    pub fn contains_zero(&self) -> bool {
        match self {
            Term::Zero => true,
            Term::Var(_) | Term::One => false,
            Term::Comp(l, r) | Term::Union(l, r) => l.contains_zero() || r.contains_zero(),
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => b.contains_zero(),
        }
    }

    pub fn contains_one(&self) -> bool {
        match self {
            Term::One => true,
            Term::Var(_) | Term::Zero => false,
            Term::Comp(l, r) | Term::Union(l, r) => l.contains_one() || r.contains_one(),
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => b.contains_one(),
        }
    }

    /// Immediate subterms.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Var(_) | Term::Zero | Term::One => vec![],
            Term::Comp(l, r) | Term::Union(l, r) => vec![l, r],
            Term::Star(b) | Term::Dom(b) | Term::Antidom(b) => vec![b],
        }
    }

    /// All subterms in preorder, the term itself first.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            for c in t.children().into_iter().rev() {
                stack.push(c);
            }
        }
        out
    }

    /// Substitutes terms for variables; unmapped variables stay put.
    pub fn substitute(&self, f: &dyn Fn(&Label) -> Option<Term>) -> Term {
        match self {
            Term::Var(l) => f(l).unwrap_or_else(|| self.clone()),
            Term::Zero | Term::One => self.clone(),
            Term::Comp(l, r) => Term::comp(l.substitute(f), r.substitute(f)),
            Term::Union(l, r) => Term::union(l.substitute(f), r.substitute(f)),
            Term::Star(b) => Term::star(b.substitute(f)),
            Term::Dom(b) => Term::dom(b.substitute(f)),
            Term::Antidom(b) => Term::antidom(b.substitute(f)),
        }
    }

    fn write_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // 0: sum context, 1: product context, 2: postfix operand
        match self {
            Term::Var(l) => write!(f, "{l}"),
            Term::Zero => f.write_str("0"),
            Term::One => f.write_str("1"),
            Term::Dom(b) => {
                f.write_str("D(")?;
                b.write_prec(f, 0)?;
                f.write_str(")")
            }
            Term::Antidom(b) => {
                f.write_str("A(")?;
                b.write_prec(f, 0)?;
                f.write_str(")")
            }
            Term::Star(b) => {
                b.write_prec(f, 2)?;
                f.write_str("*")
            }
            Term::Comp(l, r) => {
                if prec > 1 {
                    f.write_str("(")?;
                }
                l.write_prec(f, 1)?;
                f.write_str(";")?;
                r.write_prec(f, 2)?;
                if prec > 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Term::Union(l, r) => {
                if prec > 0 {
                    f.write_str("(")?;
                }
                l.write_prec(f, 0)?;
                f.write_str(" + ")?;
                r.write_prec(f, 1)?;
                if prec > 0 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_prec(f, 0)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        Term::parse(s)
    }
}

fn is_foreign_operator(c: char) -> bool {
    c.is_ascii_punctuation() && !matches!(c, '+' | ';' | '*' | '(' | ')' | '_')
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            depth: 0,
        }
    }

    fn err<T>(&self, pos: usize, kind: ParseErrorKind) -> Result<T> {
        Err(Error::Parse { pos, kind })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.src[self.pos..].chars().next() {
            self.pos += c.len_utf8();
        }
    }

    fn parse_complete(mut self) -> Result<Term> {
        let t = self.sum()?;
        match self.peek() {
            None => Ok(t),
            Some(')') => self.err(self.pos, ParseErrorKind::UnbalancedParen),
            Some(c) if is_foreign_operator(c) => {
                self.err(self.pos, ParseErrorKind::UnknownOperator(c.to_string()))
            }
            Some(_) => self.err(self.pos, ParseErrorKind::TrailingInput),
        }
    }

    fn sum(&mut self) -> Result<Term> {
        let mut acc = self.prod()?;
        while self.peek() == Some('+') {
            self.bump();
            let rhs = self.prod()?;
            acc = Term::union(acc, rhs);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Term> {
        let mut acc = self.postfix()?;
        while self.peek() == Some(';') {
            self.bump();
            let rhs = self.postfix()?;
            acc = Term::comp(acc, rhs);
        }
        Ok(acc)
    }

    fn postfix(&mut self) -> Result<Term> {
        let mut acc = self.atom()?;
        while self.peek() == Some('*') {
            self.bump();
            acc = Term::star(acc);
        }
        Ok(acc)
    }

    fn group(&mut self, open_pos: usize) -> Result<Term> {
        self.depth += 1;
        let inner = self.sum()?;
        self.depth -= 1;
        match self.peek() {
            Some(')') => {
                self.bump();
                Ok(inner)
            }
            None => self.err(open_pos, ParseErrorKind::UnbalancedParen),
            Some(c) if is_foreign_operator(c) => {
                self.err(self.pos, ParseErrorKind::UnknownOperator(c.to_string()))
            }
            Some(c) => self.err(self.pos, ParseErrorKind::UnexpectedChar(c)),
        }
    }

    fn atom(&mut self) -> Result<Term> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let Some(c) = self.peek() else {
            return self.err(start, ParseErrorKind::UnexpectedEnd);
        };
        match c {
            '0' | '1' => {
                self.bump();
                // reject multi-digit literals such as `10`
                if let Some(d) = self.src[self.pos..].chars().next() {
                    if d.is_ascii_alphanumeric() {
                        return self.err(self.pos, ParseErrorKind::UnexpectedChar(d));
                    }
                }
                Ok(if c == '0' { Term::Zero } else { Term::One })
            }
            '(' => {
                self.bump();
                self.group(start)
            }
            'a'..='z' => {
                let end = self.src[start..]
                    .find(|ch: char| !matches!(ch, 'a'..='z' | '0'..='9' | '_'))
                    .map_or(self.src.len(), |i| start + i);
                let name = &self.src[start..end];
                self.pos = end;
                Ok(Term::var(name))
            }
            'A'..='Z' => {
                let end = self.src[start..]
                    .find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_')
                    .map_or(self.src.len(), |i| start + i);
                let name = &self.src[start..end];
                if name != "D" && name != "A" {
                    return self.err(start, ParseErrorKind::UnknownOperator(name.to_string()));
                }
                self.pos = end;
                let open = {
                    self.skip_ws();
                    self.pos
                };
                match self.peek() {
                    Some('(') => self.bump(),
                    Some(ch) => return self.err(open, ParseErrorKind::UnexpectedChar(ch)),
                    None => return self.err(open, ParseErrorKind::UnexpectedEnd),
                }
                let body = self.group(open)?;
                Ok(if name == "D" {
                    Term::dom(body)
                } else {
                    Term::antidom(body)
                })
            }
            ')' => self.err(start, ParseErrorKind::UnbalancedParen),
            '2'..='9' => self.err(start, ParseErrorKind::UnexpectedChar(c)),
            c if is_foreign_operator(c) => {
                self.err(start, ParseErrorKind::UnknownOperator(c.to_string()))
            }
            c => self.err(start, ParseErrorKind::UnexpectedChar(c)),
        }
    }
}
