//! Maximally shared term storage.
//!
//! Every structurally distinct term lives in the store exactly once, so two
//! [`NodeRef`]s are structurally equal iff their ids are equal. Each node
//! caches its printed form, which doubles as the default total order on
//! terms.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};
use std::sync::Arc;

use parking_lot::RwLock;

use crate::signature_model::{OpId, Signature, SortId};

static NEXT_STORE_ID: AtomicU32 = AtomicU32::new(1);

/// Handle to an interned term. Carries the identity of its store so refs
/// from different stores are never confused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeRef {
    store: u32,
    id: u32,
}

impl NodeRef {
    pub fn id(self) -> u32 {
        self.id
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StoreError {
    #[error("sort mismatch in {operator}: argument {position} has sort {found}, expected {expected}")]
    SortMismatch {
        operator: String,
        position: usize,
        expected: String,
        found: String,
    },
    #[error("arity mismatch: {operator} takes {expected} argument(s), got {found}")]
    ArityMismatch {
        operator: String,
        expected: usize,
        found: usize,
    },
    #[error("node does not belong to this store")]
    StoreMismatch,
}

#[derive(Debug)]
pub struct NodeData {
    pub op: OpId,
    pub children: Arc<[NodeRef]>,
    pub printed: Arc<str>,
}

#[derive(Hash, PartialEq, Eq)]
struct NodeKey {
    op: OpId,
    children: Arc<[NodeRef]>,
}

#[derive(Default)]
struct Table {
    nodes: Vec<Arc<NodeData>>,
    index: HashMap<NodeKey, u32>,
}

pub struct TermStore {
    id: u32,
    signature: Arc<Signature>,
    table: RwLock<Table>,
}

impl std::fmt::Debug for TermStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TermStore")
            .field("id", &self.id)
            .field("module", &self.signature.module_name())
            .field("nodes", &self.len())
            .finish()
    }
}

impl TermStore {
    pub fn new(signature: Arc<Signature>) -> Self {
        TermStore {
            id: NEXT_STORE_ID.fetch_add(1, AtomicOrdering::Relaxed),
            signature,
            table: RwLock::new(Table::default()),
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    /// Number of distinct nodes stored so far.
    pub fn len(&self) -> usize {
        self.table.read().nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn owns(&self, node: NodeRef) -> bool {
        node.store == self.id
    }

    fn check(&self, node: NodeRef) -> Result<(), StoreError> {
        if self.owns(node) {
            Ok(())
        } else {
            Err(StoreError::StoreMismatch)
        }
    }

    /// Returns the unique node for `op` applied to `children`, creating it on
    /// first use. Only the factory calls this: every other construction path
    /// goes through the hooks.
    pub(crate) fn intern(&self, op: OpId, children: &[NodeRef]) -> Result<NodeRef, StoreError> {
        let info = self.signature.op(op);
        if let Some(arity) = info.arity() {
            if arity != children.len() {
                return Err(StoreError::ArityMismatch {
                    operator: info.name.clone(),
                    expected: arity,
                    found: children.len(),
                });
            }
        }
        for (i, &child) in children.iter().enumerate() {
            self.check(child)?;
            let expected = info.child_sort(i).expect("arity checked above");
            let found = self.sort_of(child);
            if found != expected {
                return Err(StoreError::SortMismatch {
                    operator: info.name.clone(),
                    position: i,
                    expected: self.signature.sort_name(expected).to_string(),
                    found: self.signature.sort_name(found).to_string(),
                });
            }
        }

        let key = NodeKey {
            op,
            children: Arc::from(children),
        };
        if let Some(&id) = self.table.read().index.get(&key) {
            return Ok(NodeRef { store: self.id, id });
        }
        let mut table = self.table.write();
        // another thread may have interned the same shape in between
        if let Some(&id) = table.index.get(&key) {
            return Ok(NodeRef { store: self.id, id });
        }
        let printed = print_with(&info.name, info.is_constant(), children, &table);
        let id = table.nodes.len() as u32;
        table.nodes.push(Arc::new(NodeData {
            op,
            children: key.children.clone(),
            printed,
        }));
        table.index.insert(key, id);
        Ok(NodeRef { store: self.id, id })
    }

    /// Node data for `node`.
    ///
    /// Panics if `node` belongs to another store.
    pub fn node(&self, node: NodeRef) -> Arc<NodeData> {
        assert!(self.owns(node), "NodeRef from a different store");
        self.table.read().nodes[node.id as usize].clone()
    }

    pub fn op_of(&self, node: NodeRef) -> OpId {
        self.node(node).op
    }

    pub fn children(&self, node: NodeRef) -> Arc<[NodeRef]> {
        self.node(node).children.clone()
    }

    pub fn sort_of(&self, node: NodeRef) -> SortId {
        self.signature.op(self.op_of(node)).result
    }

    pub fn sort_name_of(&self, node: NodeRef) -> &str {
        self.signature.sort_name(self.sort_of(node))
    }

    pub fn op_name_of(&self, node: NodeRef) -> &str {
        &self.signature.op(self.op_of(node)).name
    }

    /// Canonical printed form: constants bare, otherwise `op(c1,...,cn)`
    /// with no whitespace.
    pub fn print_term(&self, node: NodeRef) -> Arc<str> {
        self.node(node).printed.clone()
    }

    pub fn node_equal(&self, a: NodeRef, b: NodeRef) -> Result<bool, StoreError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.id == b.id)
    }

    /// Total order on terms: lexical order of the printed forms.
    pub fn compare_terms(&self, a: NodeRef, b: NodeRef) -> Result<Ordering, StoreError> {
        self.check(a)?;
        self.check(b)?;
        if a.id == b.id {
            return Ok(Ordering::Equal);
        }
        let table = self.table.read();
        let pa = &table.nodes[a.id as usize].printed;
        let pb = &table.nodes[b.id as usize].printed;
        Ok(pa.as_ref().cmp(pb.as_ref()))
    }
}

fn print_with(name: &str, constant: bool, children: &[NodeRef], table: &Table) -> Arc<str> {
    if constant {
        return Arc::from(name);
    }
    let mut s = String::with_capacity(name.len() + 2);
    s.push_str(name);
    s.push('(');
    for (i, child) in children.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&table.nodes[child.id as usize].printed);
    }
    s.push(')');
    Arc::from(s)
}
