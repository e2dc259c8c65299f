use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::term_store::{NodeRef, TermStore};

/// Total order used by comparison guards.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Comparator {
    /// Lexical order of printed forms.
    #[default]
    PrintedForm,
}

impl Comparator {
    pub fn compare(self, store: &TermStore, a: NodeRef, b: NodeRef) -> Ordering {
        match self {
            Comparator::PrintedForm => store
                .compare_terms(a, b)
                .expect("comparator called on nodes of a foreign store"),
        }
    }
}

/// A guard predicate available to hook clauses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    Lt,
    Leq,
    Gt,
    Geq,
    IsEmpty,
    NonEmpty,
    /// One argument is a constant and the other is `neg` of it.
    Dual,
    /// Some literal of the first argument has its dual inside the second.
    CanReact,
}

/// Value of a guard argument: a single term, or the sublist bound to a star
/// variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PredicateArg {
    Node(NodeRef),
    List(Vec<NodeRef>),
}

impl PredicateArg {
    fn node(&self) -> Option<NodeRef> {
        match self {
            PredicateArg::Node(n) => Some(*n),
            PredicateArg::List(_) => None,
        }
    }

    /// Elements of a list argument; a node of a variadic operator counts as
    /// the list of its children, any other node as a one-element list.
    fn elements(&self, store: &TermStore) -> Vec<NodeRef> {
        match self {
            PredicateArg::List(l) => l.clone(),
            PredicateArg::Node(n) => {
                let sig = store.signature();
                if sig.op(store.op_of(*n)).is_variadic() {
                    store.children(*n).to_vec()
                } else {
                    vec![*n]
                }
            }
        }
    }
}

impl Predicate {
    pub fn arity(self) -> usize {
        match self {
            Predicate::IsEmpty | Predicate::NonEmpty => 1,
            _ => 2,
        }
    }

    /// Evaluates the predicate. Arguments of the wrong shape make it false
    /// rather than fail.
    pub fn eval(self, store: &TermStore, cmp: Comparator, args: &[PredicateArg]) -> bool {
        if args.len() != self.arity() {
            return false;
        }
        let compare = |want: fn(Ordering) -> bool| match (args[0].node(), args[1].node()) {
            (Some(a), Some(b)) => want(cmp.compare(store, a, b)),
            _ => false,
        };
        match self {
            Predicate::Lt => compare(|o| o == Ordering::Less),
            Predicate::Leq => compare(|o| o != Ordering::Greater),
            Predicate::Gt => compare(|o| o == Ordering::Greater),
            Predicate::Geq => compare(|o| o != Ordering::Less),
            Predicate::IsEmpty => args[0].elements(store).is_empty(),
            Predicate::NonEmpty => !args[0].elements(store).is_empty(),
            Predicate::Dual => match (args[0].node(), args[1].node()) {
                (Some(a), Some(b)) => atomic_duals(store, a, b),
                _ => false,
            },
            Predicate::CanReact => {
                let part = args[0].elements(store);
                let target = match args[1].node() {
                    Some(u) => u,
                    None => return false,
                };
                can_react(store, &part, target)
            }
        }
    }
}

/// `a` is a constant and `b` is `neg(a)`, or the other way round.
pub fn atomic_duals(store: &TermStore, a: NodeRef, b: NodeRef) -> bool {
    let Some(neg) = store.signature().op_by_name("neg") else {
        return false;
    };
    let negates = |x: NodeRef, y: NodeRef| {
        store.op_of(x) == neg && {
            let inner = store.children(x)[0];
            inner == y && store.signature().op(store.op_of(y)).is_constant()
        }
    };
    negates(a, b) || negates(b, a)
}

/// Literals occurring anywhere inside `node`: constants outside `neg`
/// (positive) and constants directly under `neg` (negative).
fn literals(store: &TermStore, node: NodeRef, neg: Option<crate::signature_model::OpId>, out: &mut Vec<(NodeRef, bool)>) {
    let op = store.op_of(node);
    let sig = store.signature();
    if Some(op) == neg {
        let inner = store.children(node)[0];
        if sig.op(store.op_of(inner)).is_constant() {
            out.push((inner, false));
            return;
        }
    }
    if sig.op(op).is_constant() {
        out.push((node, true));
        return;
    }
    for &child in store.children(node).iter() {
        literals(store, child, neg, out);
    }
}

/// Heuristic interaction test: true iff some literal occurring in `part`
/// has its dual literal occurring in `target`.
pub fn can_react(store: &TermStore, part: &[NodeRef], target: NodeRef) -> bool {
    let neg = store.signature().op_by_name("neg");
    let mut mine = Vec::new();
    for &p in part {
        literals(store, p, neg, &mut mine);
    }
    let mut theirs = Vec::new();
    literals(store, target, neg, &mut theirs);
    mine.iter()
        .any(|&(atom, positive)| theirs.contains(&(atom, !positive)))
}

/// Comparator plus the named guard predicates a module may use.
#[derive(Clone, Debug, PartialEq)]
pub struct BuiltinRegistry {
    pub comparator: Comparator,
    pub predicates: BTreeMap<String, Predicate>,
}

impl Default for BuiltinRegistry {
    fn default() -> Self {
        let predicates = [
            ("lt", Predicate::Lt),
            ("leq", Predicate::Leq),
            ("gt", Predicate::Gt),
            ("geq", Predicate::Geq),
            ("is_empty", Predicate::IsEmpty),
            ("non_empty", Predicate::NonEmpty),
            ("dual", Predicate::Dual),
            ("can_react", Predicate::CanReact),
        ]
        .into_iter()
        .map(|(n, p)| (n.to_string(), p))
        .collect();
        BuiltinRegistry {
            comparator: Comparator::PrintedForm,
            predicates,
        }
    }
}

impl BuiltinRegistry {
    pub fn predicate(&self, name: &str) -> Option<Predicate> {
        self.predicates.get(name).copied()
    }
}
