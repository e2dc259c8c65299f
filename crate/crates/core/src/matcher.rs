//! Syntactic and list matching against canonical terms.
//!
//! Star variables (`X*`) stand for possibly empty sublists of a variadic
//! operator's arguments. Solutions are enumerated with the leftmost star
//! taking the shortest prefix first; a variable occurring twice must bind
//! identical nodes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;

use crate::gom_parser::SyntaxError;
use crate::hook_engine::{BuildError, Factory};
use crate::signature_model::{Expr, ExprKind, OpId, Pos, Signature};
use crate::term_store::{NodeRef, TermStore};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pattern {
    Wildcard,
    Var(String),
    Star(String),
    Op(OpId, Vec<Pattern>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("{pos}: list variable {name}* must be a direct argument of a variadic operator")]
    StarOutsideVariadic { name: String, pos: Pos },
    #[error("{pos}: unknown operator {name}")]
    UnknownOperator { name: String, pos: Pos },
    #[error("{pos}: {operator} takes {expected} argument(s), found {found}")]
    ArityMismatch {
        operator: String,
        expected: usize,
        found: usize,
        pos: Pos,
    },
}

impl Pattern {
    /// Resolves parsed syntax against an operator table. Identifiers naming
    /// an operator always denote that operator.
    pub fn resolve(expr: &Expr, sig: &Signature) -> Result<Pattern, PatternError> {
        resolve_expr(expr, sig, false)
    }

    /// Names of all variables (term and list) in the pattern.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Wildcard => {}
            Pattern::Var(v) | Pattern::Star(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Pattern::Op(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }
}

fn resolve_expr(expr: &Expr, sig: &Signature, in_variadic: bool) -> Result<Pattern, PatternError> {
    match &expr.kind {
        ExprKind::Wildcard => Ok(Pattern::Wildcard),
        ExprKind::Star(name) if in_variadic => Ok(Pattern::Star(name.clone())),
        ExprKind::Star(name) => Err(PatternError::StarOutsideVariadic {
            name: name.clone(),
            pos: expr.pos,
        }),
        ExprKind::Ident(name) => match sig.op_by_name(name) {
            Some(op) => {
                let info = sig.op(op);
                if info.arity().is_some_and(|a| a > 0) {
                    return Err(PatternError::ArityMismatch {
                        operator: name.clone(),
                        expected: info.arity().unwrap_or(0),
                        found: 0,
                        pos: expr.pos,
                    });
                }
                Ok(Pattern::Op(op, Vec::new()))
            }
            None => Ok(Pattern::Var(name.clone())),
        },
        ExprKind::App(name, args) => {
            let op = sig.op_by_name(name).ok_or_else(|| PatternError::UnknownOperator {
                name: name.clone(),
                pos: expr.pos,
            })?;
            let info = sig.op(op);
            if let Some(arity) = info.arity() {
                if arity != args.len() {
                    return Err(PatternError::ArityMismatch {
                        operator: name.clone(),
                        expected: arity,
                        found: args.len(),
                        pos: expr.pos,
                    });
                }
            }
            let variadic = info.is_variadic();
            let children = args
                .iter()
                .map(|a| resolve_expr(a, sig, variadic))
                .collect::<Result<_, _>>()?;
            Ok(Pattern::Op(op, children))
        }
    }
}

/// A solution of a matching problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    pub bindings: BTreeMap<String, NodeRef>,
    pub star_bindings: BTreeMap<String, Vec<NodeRef>>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<NodeRef> {
        self.bindings.get(name).copied()
    }

    pub fn get_star(&self, name: &str) -> Option<&[NodeRef]> {
        self.star_bindings.get(name).map(Vec::as_slice)
    }

    pub fn bind(&mut self, name: impl Into<String>, node: NodeRef) -> &mut Self {
        self.bindings.insert(name.into(), node);
        self
    }

    pub fn bind_star(&mut self, name: impl Into<String>, nodes: Vec<NodeRef>) -> &mut Self {
        self.star_bindings.insert(name.into(), nodes);
        self
    }

    /// `name=term` pairs sorted by name, list variables written `X*=[t,...]`.
    pub fn display<'a>(&'a self, store: &'a TermStore) -> SubstitutionDisplay<'a> {
        SubstitutionDisplay { subst: self, store }
    }
}

pub struct SubstitutionDisplay<'a> {
    subst: &'a Substitution,
    store: &'a TermStore,
}

impl fmt::Display for SubstitutionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut entries: Vec<(String, String)> = Vec::new();
        for (name, node) in &self.subst.bindings {
            entries.push((name.clone(), self.store.print_term(*node).to_string()));
        }
        for (name, nodes) in &self.subst.star_bindings {
            let items: Vec<_> = nodes.iter().map(|n| self.store.print_term(*n).to_string()).collect();
            entries.push((format!("{name}*"), format!("[{}]", items.join(","))));
        }
        entries.sort();
        let parts: Vec<_> = entries.iter().map(|(n, v)| format!("{n}={v}")).collect();
        f.write_str(&parts.join(" "))
    }
}

type Cont<'k> = dyn FnMut(&mut Substitution) -> ControlFlow<()> + 'k;

/// Matching over one store.
#[derive(Clone, Copy)]
pub struct Matcher<'s> {
    store: &'s TermStore,
}

impl<'s> Matcher<'s> {
    pub fn new(store: &'s TermStore) -> Self {
        Matcher { store }
    }

    /// Calls `k` on every solution of `pattern` against `subject`, extending
    /// `init`, until `k` breaks.
    pub fn for_each(
        &self,
        pattern: &Pattern,
        subject: NodeRef,
        init: Substitution,
        k: &mut Cont<'_>,
    ) -> ControlFlow<()> {
        let mut s = init;
        self.node(pattern, subject, &mut s, k)
    }

    /// Like [`Matcher::for_each`] for a tuple of patterns against a tuple of
    /// subjects of the same length.
    pub fn for_each_tuple(
        &self,
        patterns: &[Pattern],
        subjects: &[NodeRef],
        init: Substitution,
        k: &mut Cont<'_>,
    ) -> ControlFlow<()> {
        if patterns.len() != subjects.len() {
            return ControlFlow::Continue(());
        }
        let mut s = init;
        self.fixed(patterns, subjects, &mut s, k)
    }

    fn node(&self, p: &Pattern, t: NodeRef, s: &mut Substitution, k: &mut Cont<'_>) -> ControlFlow<()> {
        match p {
            Pattern::Wildcard => k(s),
            Pattern::Var(name) => match s.bindings.get(name) {
                Some(&bound) if bound == t => k(s),
                Some(_) => ControlFlow::Continue(()),
                None => {
                    s.bindings.insert(name.clone(), t);
                    let r = k(s);
                    s.bindings.remove(name);
                    r
                }
            },
            // a star outside a list position never matches
            Pattern::Star(_) => ControlFlow::Continue(()),
            Pattern::Op(op, args) => {
                if self.store.op_of(t) != *op {
                    return ControlFlow::Continue(());
                }
                let children = self.store.children(t);
                if self.store.signature().op(*op).is_variadic() {
                    self.list(args, &children, s, k)
                } else {
                    self.fixed(args, &children, s, k)
                }
            }
        }
    }

    fn fixed(&self, pats: &[Pattern], subjects: &[NodeRef], s: &mut Substitution, k: &mut Cont<'_>) -> ControlFlow<()> {
        match (pats.split_first(), subjects.split_first()) {
            (None, None) => k(s),
            (Some((p, rest)), Some((&t, tail))) => {
                self.node(p, t, s, &mut |s: &mut Substitution| self.fixed(rest, tail, s, k))
            }
            _ => ControlFlow::Continue(()),
        }
    }

    fn list(&self, pats: &[Pattern], subjects: &[NodeRef], s: &mut Substitution, k: &mut Cont<'_>) -> ControlFlow<()> {
        let Some((first, rest)) = pats.split_first() else {
            return if subjects.is_empty() {
                k(s)
            } else {
                ControlFlow::Continue(())
            };
        };
        let needed = rest.iter().filter(|p| !matches!(p, Pattern::Star(_))).count();
        match first {
            Pattern::Star(name) => {
                if let Some(bound) = s.star_bindings.get(name) {
                    let n = bound.len();
                    if subjects.len() >= n && subjects[..n] == bound[..] {
                        return self.list(rest, &subjects[n..], s, k);
                    }
                    return ControlFlow::Continue(());
                }
                if subjects.len() < needed {
                    return ControlFlow::Continue(());
                }
                for len in 0..=subjects.len() - needed {
                    s.star_bindings.insert(name.clone(), subjects[..len].to_vec());
                    let r = self.list(rest, &subjects[len..], s, k);
                    if r.is_break() {
                        s.star_bindings.remove(name);
                        return r;
                    }
                }
                s.star_bindings.remove(name);
                ControlFlow::Continue(())
            }
            p => match subjects.split_first() {
                Some((&t, tail)) => self.node(p, t, s, &mut |s: &mut Substitution| self.list(rest, tail, s, k)),
                None => ControlFlow::Continue(()),
            },
        }
    }
}

/// First solution in enumeration order.
pub fn match_one(store: &TermStore, pattern: &Pattern, subject: NodeRef) -> Option<Substitution> {
    let mut found = None;
    let _ = Matcher::new(store).for_each(pattern, subject, Substitution::new(), &mut |s| {
        found = Some(s.clone());
        ControlFlow::Break(())
    });
    found
}

/// Every solution, in enumeration order.
pub fn match_all(store: &TermStore, pattern: &Pattern, subject: NodeRef) -> Vec<Substitution> {
    let mut out = Vec::new();
    let _ = Matcher::new(store).for_each(pattern, subject, Substitution::new(), &mut |s| {
        out.push(s.clone());
        ControlFlow::Continue(())
    });
    out
}

/// Right-hand side of a rewrite: a term over the variables of a pattern.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Template {
    Var(String),
    /// `X*` in a variadic argument position: splices a bound sublist, or the
    /// arguments of a bound list node.
    Splice(String),
    Op(OpId, Vec<Template>),
}

impl Template {
    pub fn resolve(expr: &Expr, sig: &Signature) -> Result<Template, PatternError> {
        resolve_template(expr, sig, false)
    }

    /// The template that rebuilds whatever `pattern` matched. Wildcards have
    /// no counterpart, so patterns containing one yield `None`.
    pub fn from_pattern(pattern: &Pattern) -> Option<Template> {
        Some(match pattern {
            Pattern::Wildcard => return None,
            Pattern::Var(v) => Template::Var(v.clone()),
            Pattern::Star(v) => Template::Splice(v.clone()),
            Pattern::Op(op, args) => Template::Op(
                *op,
                args.iter().map(Template::from_pattern).collect::<Option<_>>()?,
            ),
        })
    }
}

fn resolve_template(expr: &Expr, sig: &Signature, in_variadic: bool) -> Result<Template, PatternError> {
    match &expr.kind {
        ExprKind::Wildcard => Err(PatternError::Syntax(SyntaxError {
            pos: expr.pos,
            expected: vec!["a term".into()],
            found: "`_`".into(),
        })),
        ExprKind::Star(name) if in_variadic => Ok(Template::Splice(name.clone())),
        ExprKind::Star(name) => Err(PatternError::StarOutsideVariadic {
            name: name.clone(),
            pos: expr.pos,
        }),
        ExprKind::Ident(_) | ExprKind::App(..) => match resolve_expr(expr, sig, in_variadic)? {
            Pattern::Var(v) => Ok(Template::Var(v)),
            Pattern::Op(op, _) => {
                let args = match &expr.kind {
                    ExprKind::App(_, args) => args.as_slice(),
                    _ => &[],
                };
                let variadic = sig.op(op).is_variadic();
                Ok(Template::Op(
                    op,
                    args.iter()
                        .map(|a| resolve_template(a, sig, variadic))
                        .collect::<Result<_, _>>()?,
                ))
            }
            _ => unreachable!("identifiers resolve to variables or operators"),
        },
    }
}

/// Instantiates `template` under `subst`, building through the factory so
/// the result is canonical.
pub fn apply_substitution(
    factory: &Factory,
    template: &Template,
    subst: &Substitution,
) -> Result<NodeRef, BuildError> {
    factory.instantiate(template, subst)
}
