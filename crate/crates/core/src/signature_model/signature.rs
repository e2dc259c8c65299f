use std::collections::HashMap;
use std::fmt;

use super::{BuiltinRegistry, OperatorKind, SignatureModule};

/// Index of an operator in a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpId(pub(crate) u32);

impl OpId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a sort in a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortId(pub(crate) u32);

impl SortId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpShape {
    Fixed(Vec<(String, SortId)>),
    Variadic(SortId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpInfo {
    pub name: String,
    pub shape: OpShape,
    pub result: SortId,
}

impl OpInfo {
    pub fn is_variadic(&self) -> bool {
        matches!(self.shape, OpShape::Variadic(_))
    }

    pub fn is_constant(&self) -> bool {
        matches!(&self.shape, OpShape::Fixed(slots) if slots.is_empty())
    }

    pub fn arity(&self) -> Option<usize> {
        match &self.shape {
            OpShape::Fixed(slots) => Some(slots.len()),
            OpShape::Variadic(_) => None,
        }
    }

    /// Sort expected at child position `i`.
    pub fn child_sort(&self, i: usize) -> Option<SortId> {
        match &self.shape {
            OpShape::Fixed(slots) => slots.get(i).map(|(_, s)| *s),
            OpShape::Variadic(s) => Some(*s),
        }
    }
}

/// Operator and sort tables of a resolved, accepted module, indexed for
/// the term store and the factory.
#[derive(Clone, Debug)]
pub struct Signature {
    module: String,
    sorts: Vec<String>,
    ops: Vec<OpInfo>,
    sort_index: HashMap<String, SortId>,
    op_index: HashMap<String, OpId>,
    builtins: BuiltinRegistry,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot compile signature: {0}")]
pub struct SignatureError(pub String);

impl Signature {
    /// Compiles the tables of `module`. The module is expected to have
    /// passed validation; the only failures reported here are the ones that
    /// would make the tables ambiguous.
    pub fn compile(module: &SignatureModule) -> Result<Signature, SignatureError> {
        let mut sig = Signature {
            module: module.name.clone(),
            sorts: Vec::new(),
            ops: Vec::new(),
            sort_index: HashMap::new(),
            op_index: HashMap::new(),
            builtins: module.builtins.clone(),
        };
        for s in &module.sorts {
            if !sig.sort_index.contains_key(&s.name) {
                sig.sort_index
                    .insert(s.name.clone(), SortId(sig.sorts.len() as u32));
                sig.sorts.push(s.name.clone());
            }
        }
        let sort = |sig: &Signature, name: &str| {
            sig.sort(name)
                .ok_or_else(|| SignatureError(format!("unknown sort {name}")))
        };
        for op in &module.operators {
            if sig.op_index.contains_key(&op.name) {
                return Err(SignatureError(format!("duplicate operator {}", op.name)));
            }
            let shape = match &op.kind {
                OperatorKind::Fixed { slots } => OpShape::Fixed(
                    slots
                        .iter()
                        .map(|s| Ok((s.name.clone(), sort(&sig, &s.sort)?)))
                        .collect::<Result<_, SignatureError>>()?,
                ),
                OperatorKind::Variadic { element } => OpShape::Variadic(sort(&sig, element)?),
            };
            let info = OpInfo {
                name: op.name.clone(),
                shape,
                result: sort(&sig, &op.result)?,
            };
            sig.op_index.insert(op.name.clone(), OpId(sig.ops.len() as u32));
            sig.ops.push(info);
        }
        Ok(sig)
    }

    pub fn module_name(&self) -> &str {
        &self.module
    }

    pub fn builtins(&self) -> &BuiltinRegistry {
        &self.builtins
    }

    pub fn op(&self, id: OpId) -> &OpInfo {
        &self.ops[id.index()]
    }

    pub fn op_by_name(&self, name: &str) -> Option<OpId> {
        self.op_index.get(name).copied()
    }

    pub fn ops(&self) -> impl Iterator<Item = (OpId, &OpInfo)> {
        self.ops
            .iter()
            .enumerate()
            .map(|(i, info)| (OpId(i as u32), info))
    }

    pub fn sort(&self, name: &str) -> Option<SortId> {
        self.sort_index.get(name).copied()
    }

    pub fn sort_name(&self, id: SortId) -> &str {
        &self.sorts[id.index()]
    }

    pub fn sorts(&self) -> impl Iterator<Item = (SortId, &str)> {
        self.sorts
            .iter()
            .enumerate()
            .map(|(i, s)| (SortId(i as u32), s.as_str()))
    }

    /// The variadic operator building lists of sort `sort`, if there is
    /// exactly one.
    pub fn list_operator_of(&self, sort: SortId) -> Option<OpId> {
        let mut found = None;
        for (id, info) in self.ops() {
            if info.is_variadic() && info.result == sort {
                if found.is_some() {
                    return None;
                }
                found = Some(id);
            }
        }
        found
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "op#{}", self.0)
    }
}
