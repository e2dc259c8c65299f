//! The factory: the only way to construct terms.
//!
//! Every construction runs the operator's hook pipeline, so each node the
//! factory hands out is already in normal form for the module's hooks. For
//! a fixed-arity operator the pipeline is `make_before`, then `make` (first
//! clause whose patterns match and whose guard holds; default constructor
//! otherwise), then `make_after`. Variadic operators run the same three
//! stages around the insertion of one element at the front of a list, and
//! whole lists are folded from the right, starting from the empty list.

mod checks;
mod compile;

use std::ops::ControlFlow;
use std::sync::Arc;

pub use checks::{boolean_nnf_violation, struct_canonical_violation};
use compile::{compile_hook, Action, CompiledHook, Guard, GuardArg, OpHooks};

use crate::gom_parser::{parse_term, SurfaceTerm, SyntaxError};
use crate::matcher::{Matcher, PatternError, Substitution, Template};
use crate::signature_model::{
    validate, HookKind, OpId, PredicateArg, Signature, SignatureModule, ValidationReport,
};
use crate::term_store::{NodeRef, StoreError, TermStore};

/// Default bound on nested pipeline re-entries within one construction.
pub const DEFAULT_RECURSION_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("unknown operator {0}")]
    UnknownOperator(String),
    #[error("{0} is variadic; build it from a list of elements")]
    NotFixedArity(String),
    #[error("{0} is not a variadic operator")]
    NotVariadic(String),
    #[error("expected a {operator} list, found {found}")]
    NotAList { operator: String, found: String },
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("hook of {operator} produced a {found}, expected a {expected}")]
    HookResultSort {
        operator: String,
        expected: String,
        found: String,
    },
    #[error("normalization did not terminate within {budget} nested hook applications")]
    RecursionBudgetExceeded { budget: usize },
}

impl BuildError {
    pub fn is_sort_mismatch(&self) -> bool {
        matches!(
            self,
            BuildError::Store(StoreError::SortMismatch { .. })
                | BuildError::HookResultSort { .. }
                | BuildError::NotAList { .. }
        )
    }

    pub fn is_arity_mismatch(&self) -> bool {
        matches!(self, BuildError::Store(StoreError::ArityMismatch { .. }))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FactoryError {
    #[error("module {module} has {} validation error(s)", .report.diagnostics.len())]
    Invalid {
        module: String,
        report: ValidationReport,
    },
    #[error(transparent)]
    Signature(#[from] crate::signature_model::SignatureError),
    #[error("hook of {operator}: {source}")]
    Hook {
        operator: String,
        source: PatternError,
    },
}

/// Error of [`Factory::build_text`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextBuildError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Per-module construction entry point. Owns the term store.
pub struct Factory {
    module: SignatureModule,
    signature: Arc<Signature>,
    store: TermStore,
    hooks: Vec<OpHooks>,
    budget: usize,
}

impl std::fmt::Debug for Factory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factory")
            .field("module", &self.module.name)
            .field("store", &self.store)
            .field("budget", &self.budget)
            .finish()
    }
}

/// An argument of a variadic template, before folding.
enum ListItem {
    Element(NodeRef),
    Elements(Vec<NodeRef>),
    /// A canonical list node of the operator being built, spliced in.
    List(NodeRef),
}

impl Factory {
    /// Compiles a module whose imports are already resolved. Rejects modules
    /// that do not validate.
    pub fn new(module: &SignatureModule) -> Result<Factory, FactoryError> {
        let report = validate(module);
        if !report.accepted() {
            return Err(FactoryError::Invalid {
                module: module.name.clone(),
                report,
            });
        }
        let signature = Arc::new(Signature::compile(module)?);
        let mut hooks: Vec<OpHooks> = (0..signature.ops().count()).map(|_| OpHooks::default()).collect();
        for hook in &module.hooks {
            let op = signature
                .op_by_name(&hook.operator)
                .expect("validated hook operator");
            let compiled = compile_hook(hook, &signature).map_err(|source| FactoryError::Hook {
                operator: hook.operator.clone(),
                source,
            })?;
            hooks[op.index()].set(hook.kind, compiled);
        }
        Ok(Factory {
            module: module.clone(),
            store: TermStore::new(signature.clone()),
            signature,
            hooks,
            budget: DEFAULT_RECURSION_BUDGET,
        })
    }

    pub fn with_recursion_budget(mut self, budget: usize) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn recursion_budget(&self) -> usize {
        self.budget
    }

    pub fn module(&self) -> &SignatureModule {
        &self.module
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn store(&self) -> &TermStore {
        &self.store
    }

    pub fn op(&self, name: &str) -> Result<OpId, BuildError> {
        self.signature
            .op_by_name(name)
            .ok_or_else(|| BuildError::UnknownOperator(name.to_string()))
    }

    pub fn print(&self, node: NodeRef) -> String {
        self.store.print_term(node).to_string()
    }

    /// Builds `op(args)` for a fixed-arity operator.
    pub fn build(&self, op: OpId, args: &[NodeRef]) -> Result<NodeRef, BuildError> {
        self.build_in(0, op, args.to_vec())
    }

    /// Inserts `element` at the front of `list`, a node of the variadic
    /// operator `op`.
    pub fn insert(&self, op: OpId, element: NodeRef, list: NodeRef) -> Result<NodeRef, BuildError> {
        self.insert_in(0, op, element, list)
    }

    /// Builds a list of the variadic operator `op` by inserting `elements`
    /// right to left into the empty list.
    pub fn build_variadic(&self, op: OpId, elements: &[NodeRef]) -> Result<NodeRef, BuildError> {
        self.fold_in(0, op, vec![ListItem::Elements(elements.to_vec())])
    }

    /// [`Factory::build`] or [`Factory::build_variadic`], whichever fits `op`.
    pub fn construct(&self, op: OpId, children: &[NodeRef]) -> Result<NodeRef, BuildError> {
        if self.signature.op(op).is_variadic() {
            self.build_variadic(op, children)
        } else {
            self.build(op, children)
        }
    }

    /// Builds a parsed term bottom-up.
    pub fn build_surface(&self, term: &SurfaceTerm) -> Result<NodeRef, BuildError> {
        let op = self.op(&term.head)?;
        let children = term
            .children
            .iter()
            .map(|c| crate::deep(|| self.build_surface(c)))
            .collect::<Result<Vec<_>, _>>()?;
        self.construct(op, &children)
    }

    pub fn build_text(&self, text: &str) -> Result<NodeRef, TextBuildError> {
        let term = parse_term(text)?;
        Ok(self.build_surface(&term)?)
    }

    /// Instantiates a template, constructing through the hooks.
    pub fn instantiate(&self, template: &Template, subst: &Substitution) -> Result<NodeRef, BuildError> {
        self.instantiate_in(0, template, subst)
    }

    /// Rebuilds a node of another factory here, operator by operator name.
    pub fn translate(&self, from: &Factory, node: NodeRef) -> Result<NodeRef, BuildError> {
        let src = from.store();
        let op = self.op(src.op_name_of(node))?;
        let children = src
            .children(node)
            .iter()
            .map(|&c| crate::deep(|| self.translate(from, c)))
            .collect::<Result<Vec<_>, _>>()?;
        self.construct(op, &children)
    }

    /// Interns `op(children)` without running any hook. Only hooks (through
    /// `raw(...)`) and in-crate checks may construct raw terms.
    pub(crate) fn raw(&self, op: OpId, children: &[NodeRef]) -> Result<NodeRef, BuildError> {
        Ok(self.store.intern(op, children)?)
    }

    fn enter(&self, depth: usize) -> Result<usize, BuildError> {
        if depth >= self.budget {
            Err(BuildError::RecursionBudgetExceeded { budget: self.budget })
        } else {
            Ok(depth + 1)
        }
    }

    fn hook(&self, op: OpId, kind: HookKind) -> Option<&CompiledHook> {
        self.hooks[op.index()].get(kind)
    }

    fn check_args(&self, op: OpId, args: &[NodeRef]) -> Result<(), BuildError> {
        let info = self.signature.op(op);
        if let Some(arity) = info.arity() {
            if arity != args.len() {
                return Err(StoreError::ArityMismatch {
                    operator: info.name.clone(),
                    expected: arity,
                    found: args.len(),
                }
                .into());
            }
        }
        for (i, &arg) in args.iter().enumerate() {
            if !self.store.owns(arg) {
                return Err(StoreError::StoreMismatch.into());
            }
            let expected = info.child_sort(i).expect("arity checked");
            let found = self.store.sort_of(arg);
            if found != expected {
                return Err(StoreError::SortMismatch {
                    operator: info.name.clone(),
                    position: i,
                    expected: self.signature.sort_name(expected).to_string(),
                    found: self.signature.sort_name(found).to_string(),
                }
                .into());
            }
        }
        Ok(())
    }

    fn check_result(&self, op: OpId, node: NodeRef) -> Result<NodeRef, BuildError> {
        let info = self.signature.op(op);
        let found = self.store.sort_of(node);
        if found != info.result {
            return Err(BuildError::HookResultSort {
                operator: info.name.clone(),
                expected: self.signature.sort_name(info.result).to_string(),
                found: self.signature.sort_name(found).to_string(),
            });
        }
        Ok(node)
    }

    fn build_in(&self, depth: usize, op: OpId, args: Vec<NodeRef>) -> Result<NodeRef, BuildError> {
        let depth = self.enter(depth)?;
        if self.signature.op(op).is_variadic() {
            return Err(BuildError::NotFixedArity(self.signature.op(op).name.clone()));
        }
        crate::deep(|| {
            self.check_args(op, &args)?;
            let mut args = args;
            if let Some(hook) = self.hook(op, HookKind::MakeBefore) {
                if let Some(new_args) = self.fire_tuple(depth, hook, &args)? {
                    self.check_args(op, &new_args)?;
                    args = new_args;
                }
            }
            let mut node = match self.hook(op, HookKind::Make) {
                Some(hook) => match self.fire(depth, hook, &args)? {
                    Some(n) => n,
                    None => self.raw(op, &args)?,
                },
                None => self.raw(op, &args)?,
            };
            if let Some(hook) = self.hook(op, HookKind::MakeAfter) {
                if self.store.op_of(node) == op {
                    let children = self.store.children(node);
                    if let Some(n) = self.fire(depth, hook, &children)? {
                        node = n;
                    }
                }
            }
            self.check_result(op, node)
        })
    }

    fn check_list(&self, op: OpId, element: NodeRef, list: NodeRef) -> Result<(), BuildError> {
        let info = self.signature.op(op);
        if !info.is_variadic() {
            return Err(BuildError::NotVariadic(info.name.clone()));
        }
        if !self.store.owns(list) {
            return Err(StoreError::StoreMismatch.into());
        }
        if self.store.op_of(list) != op {
            return Err(BuildError::NotAList {
                operator: info.name.clone(),
                found: self.print(list),
            });
        }
        self.check_args(op, &[element])
    }

    fn insert_in(&self, depth: usize, op: OpId, element: NodeRef, list: NodeRef) -> Result<NodeRef, BuildError> {
        let depth = self.enter(depth)?;
        crate::deep(|| {
            self.check_list(op, element, list)?;
            let (mut element, mut list) = (element, list);
            if let Some(hook) = self.hook(op, HookKind::MakeBeforeInsert) {
                if let Some(new) = self.fire_tuple(depth, hook, &[element, list])? {
                    self.check_list(op, new[0], new[1])?;
                    (element, list) = (new[0], new[1]);
                }
            }
            let mut node = match self.hook(op, HookKind::MakeInsert) {
                Some(hook) => match self.fire(depth, hook, &[element, list])? {
                    Some(n) => n,
                    None => self.raw_prepend(op, element, list)?,
                },
                None => self.raw_prepend(op, element, list)?,
            };
            if let Some(hook) = self.hook(op, HookKind::MakeAfterInsert) {
                if let Some(n) = self.fire(depth, hook, &[element, node])? {
                    node = n;
                }
            }
            self.check_result(op, node)
        })
    }

    fn raw_prepend(&self, op: OpId, element: NodeRef, list: NodeRef) -> Result<NodeRef, BuildError> {
        let tail = self.store.children(list);
        let mut children = Vec::with_capacity(tail.len() + 1);
        children.push(element);
        children.extend_from_slice(&tail);
        self.raw(op, &children)
    }

    /// Folds list items into a list of `op`. A trailing spliced list node is
    /// already canonical and seeds the fold; otherwise the fold starts from
    /// the empty list.
    fn fold_in(&self, depth: usize, op: OpId, mut items: Vec<ListItem>) -> Result<NodeRef, BuildError> {
        let info = self.signature.op(op);
        if !info.is_variadic() {
            return Err(BuildError::NotVariadic(info.name.clone()));
        }
        let mut acc = match items.last() {
            Some(ListItem::List(node)) => {
                let node = *node;
                items.pop();
                node
            }
            _ => self.raw(op, &[])?,
        };
        for item in items.iter().rev() {
            match item {
                ListItem::Element(e) => acc = self.insert_in(depth, op, *e, acc)?,
                ListItem::Elements(es) => {
                    for &e in es.iter().rev() {
                        acc = self.insert_in(depth, op, e, acc)?;
                    }
                }
                ListItem::List(node) => {
                    for &e in self.store.children(*node).iter().rev() {
                        acc = self.insert_in(depth, op, e, acc)?;
                    }
                }
            }
        }
        Ok(acc)
    }

    /// Runs the first applicable clause of `hook` on `args`; `None` when no
    /// clause fires.
    fn fire(&self, depth: usize, hook: &CompiledHook, args: &[NodeRef]) -> Result<Option<NodeRef>, BuildError> {
        let Some((clause, subst)) = self.select(depth, hook, args)? else {
            return Ok(None);
        };
        let node = match &clause.action {
            Action::Build(t) => self.instantiate_in(depth, t, &subst)?,
            Action::Raw(op, templates) => self.raw_in(depth, *op, templates, &subst)?,
            Action::Tuple(_) => unreachable!("tuple actions only appear in before hooks"),
        };
        Ok(Some(node))
    }

    fn fire_tuple(&self, depth: usize, hook: &CompiledHook, args: &[NodeRef]) -> Result<Option<Vec<NodeRef>>, BuildError> {
        let Some((clause, subst)) = self.select(depth, hook, args)? else {
            return Ok(None);
        };
        match &clause.action {
            Action::Tuple(items) => items
                .iter()
                .map(|t| self.instantiate_in(depth, t, &subst))
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            _ => unreachable!("before hooks always have tuple actions"),
        }
    }

    fn select<'h>(
        &self,
        depth: usize,
        hook: &'h CompiledHook,
        args: &[NodeRef],
    ) -> Result<Option<(&'h compile::CompiledClause, Substitution)>, BuildError> {
        let mut init = Substitution::new();
        for (param, &arg) in hook.params.iter().zip(args) {
            init.bind(param.clone(), arg);
        }
        let matcher = Matcher::new(&self.store);
        for clause in &hook.clauses {
            let mut outcome: Option<Result<Substitution, BuildError>> = None;
            let _ = matcher.for_each_tuple(&clause.patterns, args, init.clone(), &mut |s| {
                let holds = match &clause.guard {
                    None => Ok(true),
                    Some(g) => self.guard(depth, g, s),
                };
                match holds {
                    Ok(true) => {
                        outcome = Some(Ok(s.clone()));
                        ControlFlow::Break(())
                    }
                    Ok(false) => ControlFlow::Continue(()),
                    Err(e) => {
                        outcome = Some(Err(e));
                        ControlFlow::Break(())
                    }
                }
            });
            match outcome {
                Some(Ok(s)) => return Ok(Some((clause, s))),
                Some(Err(e)) => return Err(e),
                None => {}
            }
        }
        Ok(None)
    }

    fn guard(&self, depth: usize, guard: &Guard, s: &Substitution) -> Result<bool, BuildError> {
        Ok(match guard {
            Guard::Not(g) => !self.guard(depth, g, s)?,
            Guard::And(a, b) => self.guard(depth, a, s)? && self.guard(depth, b, s)?,
            Guard::Pred(pred, args) => {
                let values = args
                    .iter()
                    .map(|a| match a {
                        GuardArg::Star(v) => match (s.get_star(v), s.get(v)) {
                            (Some(list), _) => Ok(PredicateArg::List(list.to_vec())),
                            (None, Some(node)) => Ok(PredicateArg::Node(node)),
                            (None, None) => Err(BuildError::UnboundVariable(format!("{v}*"))),
                        },
                        GuardArg::Term(t) => self.instantiate_in(depth, t, s).map(PredicateArg::Node),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                pred.eval(&self.store, self.signature.builtins().comparator, &values)
            }
        })
    }

    fn instantiate_in(&self, depth: usize, template: &Template, s: &Substitution) -> Result<NodeRef, BuildError> {
        match template {
            Template::Var(v) => s.get(v).ok_or_else(|| BuildError::UnboundVariable(v.clone())),
            Template::Splice(v) => Err(BuildError::UnboundVariable(format!("{v}*"))),
            Template::Op(op, args) => {
                if self.signature.op(*op).is_variadic() {
                    let items = self.list_items(depth, *op, args, s)?;
                    self.fold_in(depth, *op, items)
                } else {
                    let children = args
                        .iter()
                        .map(|a| crate::deep(|| self.instantiate_in(depth, a, s)))
                        .collect::<Result<Vec<_>, _>>()?;
                    self.build_in(depth, *op, children)
                }
            }
        }
    }

    fn list_items(&self, depth: usize, op: OpId, args: &[Template], s: &Substitution) -> Result<Vec<ListItem>, BuildError> {
        let info = self.signature.op(op);
        args.iter()
            .map(|arg| match arg {
                Template::Splice(v) => match (s.get_star(v), s.get(v)) {
                    (Some(list), _) => Ok(ListItem::Elements(list.to_vec())),
                    (None, Some(node)) if self.store.op_of(node) == op => Ok(ListItem::List(node)),
                    (None, Some(node)) => Err(BuildError::NotAList {
                        operator: info.name.clone(),
                        found: self.print(node),
                    }),
                    (None, None) => Err(BuildError::UnboundVariable(format!("{v}*"))),
                },
                t => {
                    let node = self.instantiate_in(depth, t, s)?;
                    // a term of the list sort is spliced rather than inserted
                    if self.store.op_of(node) == op && info.child_sort(0) != Some(info.result) {
                        Ok(ListItem::List(node))
                    } else {
                        Ok(ListItem::Element(node))
                    }
                }
            })
            .collect()
    }

    /// `raw(op(...))`: arguments are built normally, `op` itself is interned
    /// without running its hooks.
    fn raw_in(&self, depth: usize, op: OpId, args: &[Template], s: &Substitution) -> Result<NodeRef, BuildError> {
        if self.signature.op(op).is_variadic() {
            let mut elements = Vec::new();
            for item in self.list_items(depth, op, args, s)? {
                match item {
                    ListItem::Element(e) => elements.push(e),
                    ListItem::Elements(es) => elements.extend(es),
                    ListItem::List(node) => elements.extend_from_slice(&self.store.children(node)),
                }
            }
            self.raw(op, &elements)
        } else {
            let children = args
                .iter()
                .map(|a| crate::deep(|| self.instantiate_in(depth, a, s)))
                .collect::<Result<Vec<_>, _>>()?;
            self.check_args(op, &children)?;
            self.raw(op, &children)
        }
    }
}

#[cfg(test)]
mod tests;
