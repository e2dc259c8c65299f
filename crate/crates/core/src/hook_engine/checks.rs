//! Normal-form predicates for the shipped Boolean and Struct modules, used
//! by tests and by the prover's self-checks.

use std::cmp::Ordering;
use std::collections::HashSet;

use super::Factory;
use crate::term_store::NodeRef;

fn subterms(f: &Factory, root: NodeRef) -> Vec<NodeRef> {
    let mut seen = HashSet::new();
    let mut stack = vec![root];
    let mut out = Vec::new();
    while let Some(n) = stack.pop() {
        if seen.insert(n) {
            out.push(n);
            stack.extend(f.store().children(n).iter().copied());
        }
    }
    out
}

/// Describes the first way `node` breaks the Struct canonical form, if any:
/// a unit inside a list, a nested structure of the same kind, an unsorted
/// par or copar list, or a par/cop/seq wrapper around fewer than two
/// elements.
pub fn struct_canonical_violation(f: &Factory, node: NodeRef) -> Option<String> {
    let op = |name: &str| f.signature().op_by_name(name);
    let (Some(o), Some(par), Some(cop), Some(seq)) = (op("o"), op("par"), op("cop"), op("seq")) else {
        return Some("not a Struct term".into());
    };
    let (Some(cpar), Some(ccop), Some(cseq)) = (op("concPar"), op("concCop"), op("concSeq")) else {
        return Some("not a Struct term".into());
    };
    let store = f.store();
    for n in subterms(f, node) {
        let head = store.op_of(n);
        let children = store.children(n);
        let wrapper = [(cpar, par), (ccop, cop), (cseq, seq)]
            .into_iter()
            .find(|(list, _)| *list == head)
            .map(|(_, w)| w);
        if let Some(wrapper) = wrapper {
            if children.iter().any(|&c| store.op_of(c) == o) {
                return Some(format!("unit inside {}", f.print(n)));
            }
            if children.iter().any(|&c| store.op_of(c) == wrapper) {
                return Some(format!("nested structure not flattened in {}", f.print(n)));
            }
            if head != cseq
                && children
                    .windows(2)
                    .any(|w| store.compare_terms(w[0], w[1]).unwrap() == Ordering::Greater)
            {
                return Some(format!("unsorted list {}", f.print(n)));
            }
        }
        if head == par || head == cop || head == seq {
            let list = children[0];
            if store.children(list).len() < 2 {
                return Some(format!("empty or singleton structure {}", f.print(n)));
            }
        }
    }
    None
}

/// Describes the first `not` applied to something other than `True` or
/// `False`, if any.
pub fn boolean_nnf_violation(f: &Factory, node: NodeRef) -> Option<String> {
    let op = |name: &str| f.signature().op_by_name(name);
    let (Some(not), Some(t), Some(fa)) = (op("not"), op("True"), op("False")) else {
        return Some("not a Boolean term".into());
    };
    let store = f.store();
    for n in subterms(f, node) {
        if store.op_of(n) == not {
            let child = store.op_of(store.children(n)[0]);
            if child != t && child != fa {
                return Some(format!("negation of a compound term: {}", f.print(n)));
            }
        }
    }
    None
}
