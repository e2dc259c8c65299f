//! Independent reference implementations used to check the library. None of
//! this code calls into the crate.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use rand::Rng;

/// A plain term tree in the printed syntax `head(kid,...)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    pub head: String,
    pub kids: Vec<Tree>,
}

impl Tree {
    pub fn leaf(head: &str) -> Tree {
        Tree {
            head: head.to_string(),
            kids: Vec::new(),
        }
    }

    pub fn node(head: &str, kids: Vec<Tree>) -> Tree {
        Tree {
            head: head.to_string(),
            kids,
        }
    }

    /// Parses the printed form; `f()` and `f` both give a tree without kids.
    pub fn parse(text: &str) -> Tree {
        let bytes = text.as_bytes();
        let mut i = 0;
        let t = parse_at(bytes, &mut i);
        assert_eq!(i, bytes.len(), "trailing input in {text}");
        t
    }
}

fn parse_at(b: &[u8], i: &mut usize) -> Tree {
    let start = *i;
    while *i < b.len() && (b[*i].is_ascii_alphanumeric() || b[*i] == b'_') {
        *i += 1;
    }
    let head = std::str::from_utf8(&b[start..*i]).unwrap().to_string();
    let mut kids = Vec::new();
    if *i < b.len() && b[*i] == b'(' {
        *i += 1;
        if b[*i] == b')' {
            *i += 1;
        } else {
            loop {
                kids.push(parse_at(b, i));
                match b[*i] {
                    b',' => *i += 1,
                    b')' => {
                        *i += 1;
                        break;
                    }
                    c => panic!("unexpected {}", c as char),
                }
            }
        }
    }
    Tree { head, kids }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.head)?;
        if !self.kids.is_empty() {
            f.write_str("(")?;
            for (i, k) in self.kids.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{k}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------- booleans

pub fn random_bool(rng: &mut impl Rng, depth: usize) -> Tree {
    if depth <= 1 || rng.gen_bool(0.25) {
        return Tree::leaf(if rng.gen_bool(0.5) { "True" } else { "False" });
    }
    match rng.gen_range(0..3) {
        0 => Tree::node("not", vec![random_bool(rng, depth - 1)]),
        1 => Tree::node("and", vec![random_bool(rng, depth - 1), random_bool(rng, depth - 1)]),
        _ => Tree::node("or", vec![random_bool(rng, depth - 1), random_bool(rng, depth - 1)]),
    }
}

pub fn depth(t: &Tree) -> usize {
    1 + t.kids.iter().map(depth).max().unwrap_or(0)
}

pub fn eval_bool(t: &Tree) -> bool {
    match (t.head.as_str(), t.kids.as_slice()) {
        ("True", []) => true,
        ("False", []) => false,
        ("not", [x]) => !eval_bool(x),
        ("and", [x, y]) => eval_bool(x) && eval_bool(y),
        ("or", [x, y]) => eval_bool(x) || eval_bool(y),
        _ => panic!("not a boolean term: {t}"),
    }
}

/// Only `True` and `False` appear under `not`.
pub fn negation_on_atoms(t: &Tree) -> bool {
    if t.head == "not" && !t.kids[0].kids.is_empty() {
        return false;
    }
    t.kids.iter().all(negation_on_atoms)
}

// ---------------------------------------------------------------- structures

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum S {
    Unit,
    Atom(char),
    Neg(char),
    Par(Vec<S>),
    Cop(Vec<S>),
    Seq(Vec<S>),
}

impl S {
    pub fn from_tree(t: &Tree) -> S {
        match (t.head.as_str(), t.kids.as_slice()) {
            ("o", []) => S::Unit,
            ("neg", [x]) if x.kids.is_empty() => S::Neg(atom_char(&x.head)),
            (a, []) => S::Atom(atom_char(a)),
            ("par", [l]) if l.head == "concPar" => S::Par(l.kids.iter().map(S::from_tree).collect()),
            ("cop", [l]) if l.head == "concCop" => S::Cop(l.kids.iter().map(S::from_tree).collect()),
            ("seq", [l]) if l.head == "concSeq" => S::Seq(l.kids.iter().map(S::from_tree).collect()),
            _ => panic!("not a structure: {t}"),
        }
    }

    fn kind(&self) -> Option<u8> {
        match self {
            S::Par(_) => Some(0),
            S::Cop(_) => Some(1),
            S::Seq(_) => Some(2),
            _ => None,
        }
    }
}

fn atom_char(s: &str) -> char {
    assert_eq!(s.len(), 1, "atoms are single letters: {s}");
    s.chars().next().unwrap()
}

impl fmt::Display for S {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, w: &str, l: &str, xs: &[S]| {
            write!(f, "{w}({l}(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("))")
        };
        match self {
            S::Unit => f.write_str("o"),
            S::Atom(c) => write!(f, "{c}"),
            S::Neg(c) => write!(f, "neg({c})"),
            S::Par(xs) => list(f, "par", "concPar", xs),
            S::Cop(xs) => list(f, "cop", "concCop", xs),
            S::Seq(xs) => list(f, "seq", "concSeq", xs),
        }
    }
}

/// Canonical representative: units dropped, same-kind nesting flattened,
/// par and copar sorted by printed form, empty and singleton wrappers
/// collapsed.
pub fn normalize(s: &S) -> S {
    let (kind, xs) = match s {
        S::Par(xs) => (0, xs),
        S::Cop(xs) => (1, xs),
        S::Seq(xs) => (2, xs),
        other => return other.clone(),
    };
    let mut flat = Vec::new();
    for x in xs {
        let n = normalize(x);
        match n {
            S::Unit => {}
            ref inner if inner.kind() == Some(kind) => match n {
                S::Par(ys) | S::Cop(ys) | S::Seq(ys) => flat.extend(ys),
                _ => unreachable!(),
            },
            _ => flat.push(n),
        }
    }
    if kind != 2 {
        flat.sort_by_key(|x| x.to_string());
    }
    match flat.len() {
        0 => S::Unit,
        1 => flat.pop().unwrap(),
        _ => match kind {
            0 => S::Par(flat),
            1 => S::Cop(flat),
            _ => S::Seq(flat),
        },
    }
}

/// Random surface structure; may contain units and unflattened nesting.
pub fn random_struct(rng: &mut impl Rng, depth: usize) -> Tree {
    let atoms = ["a", "b", "c", "d"];
    if depth <= 2 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..9) {
            0 => Tree::leaf("o"),
            1..=4 => Tree::leaf(atoms[rng.gen_range(0..4)]),
            _ => Tree::node("neg", vec![Tree::leaf(atoms[rng.gen_range(0..4)])]),
        };
    }
    let (w, l) = [("par", "concPar"), ("cop", "concCop"), ("seq", "concSeq")][rng.gen_range(0..3)];
    let n = rng.gen_range(0..4);
    let kids = (0..n).map(|_| random_struct(rng, depth - 2)).collect();
    Tree::node(w, vec![Tree::node(l, kids)])
}

/// The four canonical-form clauses, checked on a printed tree.
pub fn canonical_violation(t: &Tree) -> Option<String> {
    let lists = [("concPar", "par"), ("concCop", "cop"), ("concSeq", "seq")];
    if let Some(&(list, wrapper)) = lists.iter().find(|(l, _)| *l == t.head) {
        if t.kids.iter().any(|k| k.head == "o") {
            return Some(format!("unit in {t}"));
        }
        if t.kids.iter().any(|k| k.head == wrapper) {
            return Some(format!("unflattened {t}"));
        }
        if list != "concSeq" {
            let printed: Vec<String> = t.kids.iter().map(|k| k.to_string()).collect();
            if printed.windows(2).any(|w| w[0] > w[1]) {
                return Some(format!("unsorted {t}"));
            }
        }
    }
    if ["par", "cop", "seq"].contains(&t.head.as_str()) && t.kids[0].kids.len() < 2 {
        return Some(format!("degenerate wrapper {t}"));
    }
    t.kids.iter().find_map(canonical_violation)
}

// ---------------------------------------------------------------- BV search

/// Every (full BV) one-step premise of a canonical structure, normalized.
pub fn bv_successors(s: &S) -> Vec<S> {
    let mut out = Vec::new();
    successors_in_context(s, &mut |x| out.push(x), &|x| x);
    out.into_iter().map(|x| normalize(&x)).collect()
}

type Rebuild = fn(Vec<S>) -> S;

fn successors_in_context(s: &S, emit: &mut dyn FnMut(S), wrap: &dyn Fn(S) -> S) {
    if let S::Par(xs) = s {
        root_successors(xs, &mut |r| emit(wrap(r)));
    }
    let (xs, rebuild): (&Vec<S>, Rebuild) = match s {
        S::Par(xs) => (xs, S::Par),
        S::Cop(xs) => (xs, S::Cop),
        S::Seq(xs) => (xs, S::Seq),
        _ => return,
    };
    for i in 0..xs.len() {
        let inner_wrap = |x: S| {
            let mut ys = xs.clone();
            ys[i] = x;
            wrap(rebuild(ys))
        };
        successors_in_context(&xs[i], emit, &inner_wrap);
    }
}

fn without(xs: &[S], drop: &[usize]) -> Vec<S> {
    xs.iter()
        .enumerate()
        .filter(|(i, _)| !drop.contains(i))
        .map(|(_, x)| x.clone())
        .collect()
}

fn root_successors(xs: &[S], emit: &mut dyn FnMut(S)) {
    let n = xs.len();
    // atomic interaction
    for i in 0..n {
        for j in 0..n {
            if let (S::Atom(a), S::Neg(b)) = (&xs[i], &xs[j]) {
                if a == b {
                    emit(S::Par(without(xs, &[i, j])));
                }
            }
        }
    }
    // switch: any split of a copar into two nonempty groups
    for i in 0..n {
        let S::Cop(cs) = &xs[i] else { continue };
        for j in 0..n {
            if j == i {
                continue;
            }
            let u = xs[j].clone();
            for mask in 1..(1u32 << cs.len()) - 1 {
                let (r, t): (Vec<S>, Vec<S>) = {
                    let mut r = Vec::new();
                    let mut t = Vec::new();
                    for (k, c) in cs.iter().enumerate() {
                        if mask & (1 << k) != 0 {
                            r.push(c.clone());
                        } else {
                            t.push(c.clone());
                        }
                    }
                    (r, t)
                };
                let mut moved = vec![S::Par(vec![S::Cop(r), u.clone()])];
                moved.extend(t);
                let mut rest = without(xs, &[i, j]);
                rest.push(S::Cop(moved));
                emit(S::Par(rest));
            }
        }
    }
    // seq: two elements read as <r;t> and <u;v>
    let splits = |x: &S| -> Vec<(S, S)> {
        match x {
            S::Seq(ys) => (0..=ys.len())
                .map(|k| (S::Seq(ys[..k].to_vec()), S::Seq(ys[k..].to_vec())))
                .collect(),
            other => vec![(other.clone(), S::Unit), (S::Unit, other.clone())],
        }
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for (r, t) in splits(&xs[i]) {
                for (u, v) in splits(&xs[j]) {
                    let mut rest = without(xs, &[i, j]);
                    rest.push(S::Seq(vec![S::Par(vec![r.clone(), u.clone()]), S::Par(vec![t.clone(), v])]));
                    emit(S::Par(rest));
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Provable,
    Unprovable,
    Unknown,
}

/// Breadth-first search from `goal` down to the unit, `max_depth` levels.
pub fn bv_oracle(goal: &S, max_depth: usize) -> Verdict {
    let goal = normalize(goal);
    if goal == S::Unit {
        return Verdict::Provable;
    }
    let mut seen = HashSet::from([goal.clone()]);
    let mut queue = VecDeque::from([(goal, 0)]);
    let mut cut = false;
    while let Some((s, d)) = queue.pop_front() {
        for next in bv_successors(&s) {
            if next == S::Unit {
                return Verdict::Provable;
            }
            if seen.contains(&next) {
                continue;
            }
            if d + 1 >= max_depth {
                cut = true;
                continue;
            }
            seen.insert(next.clone());
            queue.push_back((next, d + 1));
        }
    }
    if cut {
        Verdict::Unknown
    } else {
        Verdict::Unprovable
    }
}

// ---------------------------------------------------------------- list matching

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Star(char),
    Var(char),
    Lit(u8),
}

/// One solution: element variables and star variables, by name.
pub type Solution = (BTreeMap<char, u8>, BTreeMap<char, Vec<u8>>);

/// All ways `pattern` matches `subject`, leftmost star shortest first.
pub fn segment_matches(pattern: &[Item], subject: &[u8]) -> Vec<Solution> {
    let mut out = Vec::new();
    let mut sol = (BTreeMap::new(), BTreeMap::new());
    segments(pattern, subject, &mut sol, &mut out);
    out
}

fn segments(pattern: &[Item], subject: &[u8], sol: &mut Solution, out: &mut Vec<Solution>) {
    let Some((first, rest)) = pattern.split_first() else {
        if subject.is_empty() {
            out.push(sol.clone());
        }
        return;
    };
    match first {
        Item::Lit(c) => {
            if subject.first() == Some(c) {
                segments(rest, &subject[1..], sol, out);
            }
        }
        Item::Var(v) => {
            let Some(&head) = subject.first() else { return };
            match sol.0.get(v) {
                Some(&b) if b != head => {}
                Some(_) => segments(rest, &subject[1..], sol, out),
                None => {
                    sol.0.insert(*v, head);
                    segments(rest, &subject[1..], sol, out);
                    sol.0.remove(v);
                }
            }
        }
        Item::Star(v) => match sol.1.get(v).cloned() {
            Some(bound) => {
                if subject.starts_with(&bound) {
                    segments(rest, &subject[bound.len()..], sol, out);
                }
            }
            None => {
                for k in 0..=subject.len() {
                    sol.1.insert(*v, subject[..k].to_vec());
                    segments(rest, &subject[k..], sol, out);
                    sol.1.remove(v);
                }
            }
        },
    }
}
