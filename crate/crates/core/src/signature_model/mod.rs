//! Signature modules: sorts, operators and the normalization hooks attached
//! to them, as they come out of the parser and before anything is interned.

mod builtins;
mod imports;
mod signature;
mod validate;

use std::fmt;

pub use builtins::{atomic_duals, can_react, BuiltinRegistry, Comparator, Predicate, PredicateArg};
pub use imports::{resolve_imports, ImportError};
pub use signature::{OpId, OpInfo, OpShape, Signature, SignatureError, SortId};
pub use validate::{validate, Diagnostic, ValidationReport};

/// A 1-based line/column position in module text. Modules built in code
/// carry the default `0:0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignatureModule {
    pub name: String,
    pub imports: Vec<String>,
    pub sorts: Vec<SortDecl>,
    pub operators: Vec<OperatorDecl>,
    pub hooks: Vec<HookDecl>,
    pub builtins: BuiltinRegistry,
    pub pos: Pos,
}

impl SignatureModule {
    pub fn new(name: impl Into<String>) -> Self {
        SignatureModule {
            name: name.into(),
            imports: Vec::new(),
            sorts: Vec::new(),
            operators: Vec::new(),
            hooks: Vec::new(),
            builtins: BuiltinRegistry::default(),
            pos: Pos::default(),
        }
    }

    pub fn operator(&self, name: &str) -> Option<&OperatorDecl> {
        self.operators.iter().find(|op| op.name == name)
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| s.name == name)
    }

    /// Copy of the module with every position reset, for comparing modules
    /// that came from different texts.
    pub fn without_positions(&self) -> SignatureModule {
        let mut m = self.clone();
        m.pos = Pos::default();
        for s in &mut m.sorts {
            s.pos = Pos::default();
        }
        for op in &mut m.operators {
            op.pos = Pos::default();
        }
        for h in &mut m.hooks {
            h.pos = Pos::default();
            for clause in &mut h.body {
                clause.strip_positions();
            }
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub name: String,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub name: String,
    pub sort: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Fixed { slots: Vec<Slot> },
    Variadic { element: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorDecl {
    pub name: String,
    pub kind: OperatorKind,
    pub result: String,
    /// Module that declared the operator; differs from the enclosing module
    /// once imports are resolved.
    pub module: String,
    pub pos: Pos,
}

impl OperatorDecl {
    pub fn is_variadic(&self) -> bool {
        matches!(self.kind, OperatorKind::Variadic { .. })
    }

    pub fn arity(&self) -> Option<usize> {
        match &self.kind {
            OperatorKind::Fixed { slots } => Some(slots.len()),
            OperatorKind::Variadic { .. } => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HookKind {
    Make,
    MakeBefore,
    MakeAfter,
    MakeInsert,
    MakeBeforeInsert,
    MakeAfterInsert,
}

impl HookKind {
    pub const ALL: [HookKind; 6] = [
        HookKind::Make,
        HookKind::MakeBefore,
        HookKind::MakeAfter,
        HookKind::MakeInsert,
        HookKind::MakeBeforeInsert,
        HookKind::MakeAfterInsert,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            HookKind::Make => "make",
            HookKind::MakeBefore => "make_before",
            HookKind::MakeAfter => "make_after",
            HookKind::MakeInsert => "make_insert",
            HookKind::MakeBeforeInsert => "make_before_insert",
            HookKind::MakeAfterInsert => "make_after_insert",
        }
    }

    pub fn from_keyword(s: &str) -> Option<HookKind> {
        HookKind::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn is_insert(self) -> bool {
        matches!(
            self,
            HookKind::MakeInsert | HookKind::MakeBeforeInsert | HookKind::MakeAfterInsert
        )
    }

    pub fn is_before(self) -> bool {
        matches!(self, HookKind::MakeBefore | HookKind::MakeBeforeInsert)
    }
}

impl fmt::Display for HookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HookDecl {
    pub operator: String,
    pub kind: HookKind,
    pub params: Vec<String>,
    pub body: Vec<RuleClause>,
    pub pos: Pos,
}

/// One `patterns [where guard] -> action;` line of a hook body.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleClause {
    pub patterns: Vec<Expr>,
    pub guard: Option<GuardExpr>,
    pub action: ActionExpr,
    pub pos: Pos,
}

impl RuleClause {
    fn strip_positions(&mut self) {
        self.pos = Pos::default();
        for p in &mut self.patterns {
            p.strip_positions();
        }
        if let Some(g) = &mut self.guard {
            g.strip_positions();
        }
        match &mut self.action {
            ActionExpr::Template(e) | ActionExpr::Raw(e) => e.strip_positions(),
            ActionExpr::Tuple(es) => es.iter_mut().for_each(Expr::strip_positions),
        }
    }
}

/// Unresolved pattern or template syntax. A bare identifier is either a
/// constant operator or a variable; which one is decided against the
/// operator table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Wildcard,
    Ident(String),
    Star(String),
    App(String, Vec<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    fn strip_positions(&mut self) {
        self.pos = Pos::default();
        if let ExprKind::App(_, args) = &mut self.kind {
            args.iter_mut().for_each(Expr::strip_positions);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Wildcard => f.write_str("_"),
            ExprKind::Ident(name) => f.write_str(name),
            ExprKind::Star(name) => write!(f, "{name}*"),
            ExprKind::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuardExpr {
    Pred {
        name: String,
        args: Vec<Expr>,
        pos: Pos,
    },
    Not(Box<GuardExpr>),
    And(Box<GuardExpr>, Box<GuardExpr>),
}

impl GuardExpr {
    fn strip_positions(&mut self) {
        match self {
            GuardExpr::Pred { args, pos, .. } => {
                *pos = Pos::default();
                args.iter_mut().for_each(Expr::strip_positions);
            }
            GuardExpr::Not(g) => g.strip_positions(),
            GuardExpr::And(a, b) => {
                a.strip_positions();
                b.strip_positions();
            }
        }
    }
}

impl fmt::Display for GuardExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GuardExpr::Pred { name, args, .. } => {
                write!(f, "{name}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
            GuardExpr::Not(g) => match **g {
                GuardExpr::And(..) => write!(f, "!({g})"),
                _ => write!(f, "!{g}"),
            },
            GuardExpr::And(a, b) => match **b {
                GuardExpr::And(..) => write!(f, "{a} && ({b})"),
                _ => write!(f, "{a} && {b}"),
            },
        }
    }
}

/// Right-hand side of a rule clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionExpr {
    /// Built through the factory, so every hook on the way applies.
    Template(Expr),
    /// `raw(op(...))`: the default constructor of `op`, bypassing its hook.
    Raw(Expr),
    /// `(t1, ..., tn)`: new argument tuple, for `make_before*` hooks.
    Tuple(Vec<Expr>),
}

impl fmt::Display for ActionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionExpr::Template(e) => write!(f, "{e}"),
            ActionExpr::Raw(e) => write!(f, "raw({e})"),
            ActionExpr::Tuple(es) => {
                f.write_str("(")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}
