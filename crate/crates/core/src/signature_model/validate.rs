use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::{
    ActionExpr, Expr, ExprKind, GuardExpr, HookDecl, OperatorDecl, OperatorKind, Pos,
    SignatureModule,
};

/// A validation finding. `code` is a stable identifier meant for tooling
/// and tests; `message` is for humans.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub pos: Pos,
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.pos, self.code, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn codes(&self) -> Vec<&'static str> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }

    fn error(&mut self, pos: Pos, code: &'static str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            pos,
            code,
            message: message.into(),
        });
    }
}

/// Checks every well-formedness rule of a module whose imports have been
/// resolved. Diagnostics come out in declaration order.
pub fn validate(module: &SignatureModule) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut sorts = HashSet::new();
    for s in &module.sorts {
        if !sorts.insert(s.name.as_str()) {
            report.error(s.pos, "DuplicateSort", format!("sort {} is declared twice", s.name));
        }
    }

    let mut ops: HashMap<&str, &OperatorDecl> = HashMap::new();
    for op in &module.operators {
        if ops.contains_key(op.name.as_str()) {
            report.error(
                op.pos,
                "DuplicateOperator",
                format!("operator {} is declared twice", op.name),
            );
        } else {
            ops.insert(op.name.as_str(), op);
        }
        let mut check_sort = |sort: &str| {
            if !sorts.contains(sort) {
                report.error(op.pos, "UnknownSort", format!("unknown sort {sort} in operator {}", op.name));
            }
        };
        match &op.kind {
            OperatorKind::Fixed { slots } => {
                for s in slots {
                    check_sort(&s.sort);
                }
            }
            OperatorKind::Variadic { element } => check_sort(element),
        }
        check_sort(&op.result);
        if let OperatorKind::Fixed { slots } = &op.kind {
            let mut seen = HashSet::new();
            for s in slots {
                if !seen.insert(s.name.as_str()) {
                    report.error(
                        op.pos,
                        "DuplicateSlot",
                        format!("slot {} appears twice in operator {}", s.name, op.name),
                    );
                }
            }
        }
    }

    let mut seen_hooks = HashSet::new();
    for hook in &module.hooks {
        let Some(op) = ops.get(hook.operator.as_str()).copied() else {
            report.error(
                hook.pos,
                "UnknownHookOperator",
                format!("hook on undeclared operator {}", hook.operator),
            );
            continue;
        };
        if !seen_hooks.insert((hook.operator.as_str(), hook.kind)) {
            report.error(
                hook.pos,
                "DuplicateHook",
                format!("operator {} has two {} hooks", hook.operator, hook.kind),
            );
        }
        if hook.kind.is_insert() != op.is_variadic() {
            let what = if op.is_variadic() { "variadic" } else { "fixed-arity" };
            report.error(
                hook.pos,
                "HookKindMismatch",
                format!("{} hook cannot be attached to {what} operator {}", hook.kind, op.name),
            );
            continue;
        }
        let expected = op.arity().unwrap_or(2);
        if hook.params.len() != expected {
            report.error(
                hook.pos,
                "HookArity",
                format!(
                    "{}:{} takes {expected} parameter(s), found {}",
                    op.name,
                    hook.kind,
                    hook.params.len()
                ),
            );
            continue;
        }
        let mut params = HashSet::new();
        for p in &hook.params {
            if !params.insert(p.as_str()) {
                report.error(hook.pos, "DuplicateParam", format!("parameter {p} appears twice"));
            }
        }
        let checker = ClauseChecker {
            module,
            ops: &ops,
            sorts: &sorts,
        };
        checker.check_hook(hook, op, &mut report);
    }
    report
}

/// Sort of a template position, when it can be determined statically.
type SortName<'a> = Option<&'a str>;

struct ClauseChecker<'m> {
    module: &'m SignatureModule,
    ops: &'m HashMap<&'m str, &'m OperatorDecl>,
    sorts: &'m HashSet<&'m str>,
}

#[derive(Default)]
struct Scope<'m> {
    vars: BTreeMap<String, SortName<'m>>,
    stars: BTreeMap<String, SortName<'m>>,
}

impl<'m> ClauseChecker<'m> {
    fn param_sorts(&self, hook: &HookDecl, op: &'m OperatorDecl) -> Vec<&'m str> {
        match &op.kind {
            OperatorKind::Fixed { slots } => slots.iter().map(|s| s.sort.as_str()).collect(),
            OperatorKind::Variadic { element } => vec![element.as_str(), op.result.as_str()],
        }
        .into_iter()
        .take(hook.params.len())
        .collect()
    }

    fn check_hook(&self, hook: &HookDecl, op: &'m OperatorDecl, report: &mut ValidationReport) {
        let param_sorts = self.param_sorts(hook, op);
        for clause in &hook.body {
            if clause.patterns.len() != hook.params.len() {
                report.error(
                    clause.pos,
                    "ClauseArity",
                    format!(
                        "clause has {} pattern(s) but the hook has {} parameter(s)",
                        clause.patterns.len(),
                        hook.params.len()
                    ),
                );
                continue;
            }
            let mut scope = Scope::default();
            for (p, &sort) in hook.params.iter().zip(&param_sorts) {
                scope.vars.insert(p.clone(), Some(sort));
            }
            for (pat, &sort) in clause.patterns.iter().zip(&param_sorts) {
                self.pattern(pat, Some(sort), &mut scope, report);
            }
            if let Some(guard) = &clause.guard {
                self.guard(guard, &scope, report);
            }
            match (&clause.action, hook.kind.is_before()) {
                (ActionExpr::Tuple(items), true) => {
                    if items.len() != param_sorts.len() {
                        report.error(
                            clause.pos,
                            "ActionShape",
                            format!(
                                "{} action must be a tuple of {} term(s)",
                                hook.kind,
                                param_sorts.len()
                            ),
                        );
                    }
                    for (item, &sort) in items.iter().zip(&param_sorts) {
                        let found = self.template(item, &scope, report);
                        self.expect_sort(item.pos, found, sort, report);
                    }
                }
                (_, true) => report.error(
                    clause.pos,
                    "ActionShape",
                    format!("{} action must be a tuple (t1, ..., tn)", hook.kind),
                ),
                (ActionExpr::Tuple(_), false) => report.error(
                    clause.pos,
                    "ActionShape",
                    format!("{} action must be a single term", hook.kind),
                ),
                (ActionExpr::Template(t), false) => {
                    let found = self.template(t, &scope, report);
                    self.expect_sort(t.pos, found, &op.result, report);
                }
                (ActionExpr::Raw(t), false) => {
                    let is_app = match &t.kind {
                        ExprKind::App(name, _) => self.ops.contains_key(name.as_str()),
                        ExprKind::Ident(name) => self.ops.contains_key(name.as_str()),
                        _ => false,
                    };
                    if !is_app {
                        report.error(t.pos, "RawTarget", "raw(...) must wrap an operator application");
                    } else {
                        let found = self.template(t, &scope, report);
                        self.expect_sort(t.pos, found, &op.result, report);
                    }
                }
            }
        }
    }

    fn expect_sort(&self, pos: Pos, found: SortName<'_>, expected: &str, report: &mut ValidationReport) {
        if let Some(found) = found {
            if found != expected && self.sorts.contains(found) {
                report.error(
                    pos,
                    "SortMismatch",
                    format!("expected a term of sort {expected}, found {found}"),
                );
            }
        }
    }

    fn operator(&self, name: &str, pos: Pos, report: &mut ValidationReport) -> Option<&'m OperatorDecl> {
        let op = self.ops.get(name).copied();
        if op.is_none() {
            report.error(pos, "UnknownOperator", format!("unknown operator {name}"));
        }
        op
    }

    fn pattern(&self, e: &Expr, expected: SortName<'m>, scope: &mut Scope<'m>, report: &mut ValidationReport) {
        match &e.kind {
            ExprKind::Wildcard => {}
            ExprKind::Star(name) => {
                report.error(
                    e.pos,
                    "StarOutsideVariadic",
                    format!("list variable {name}* must be an argument of a variadic operator"),
                );
            }
            ExprKind::Ident(name) => match self.ops.get(name.as_str()) {
                Some(op) => {
                    if op.arity().is_some_and(|a| a > 0) {
                        report.error(
                            e.pos,
                            "OperatorArity",
                            format!("operator {name} needs arguments"),
                        );
                    }
                    if let Some(exp) = expected {
                        self.expect_sort(e.pos, Some(&op.result), exp, report);
                    }
                }
                None => {
                    scope.vars.entry(name.clone()).or_insert(expected);
                }
            },
            ExprKind::App(name, args) => {
                let Some(op) = self.operator(name, e.pos, report) else {
                    return;
                };
                if let Some(exp) = expected {
                    self.expect_sort(e.pos, Some(&op.result), exp, report);
                }
                match &op.kind {
                    OperatorKind::Fixed { slots } => {
                        if slots.len() != args.len() {
                            report.error(
                                e.pos,
                                "OperatorArity",
                                format!("{name} takes {} argument(s), found {}", slots.len(), args.len()),
                            );
                        }
                        for (arg, slot) in args.iter().zip(slots) {
                            self.pattern(arg, Some(&slot.sort), scope, report);
                        }
                    }
                    OperatorKind::Variadic { element } => {
                        for arg in args {
                            if let ExprKind::Star(v) = &arg.kind {
                                scope.stars.entry(v.clone()).or_insert(Some(element));
                            } else {
                                self.pattern(arg, Some(element), scope, report);
                            }
                        }
                    }
                }
            }
        }
    }

    /// Checks a template and returns its sort when known.
    fn template(&self, e: &Expr, scope: &Scope<'m>, report: &mut ValidationReport) -> SortName<'m> {
        match &e.kind {
            ExprKind::Wildcard => {
                report.error(e.pos, "UnboundVariable", "wildcard cannot appear in a template");
                None
            }
            ExprKind::Star(name) => {
                report.error(
                    e.pos,
                    "StarOutsideVariadic",
                    format!("list variable {name}* must be an argument of a variadic operator"),
                );
                None
            }
            ExprKind::Ident(name) => match self.ops.get(name.as_str()) {
                Some(op) if op.arity() != Some(0) && !op.is_variadic() => {
                    report.error(e.pos, "OperatorArity", format!("operator {name} needs arguments"));
                    None
                }
                Some(op) => Some(op.result.as_str()),
                None => match scope.vars.get(name) {
                    Some(sort) => *sort,
                    None => {
                        report.error(e.pos, "UnboundVariable", format!("variable {name} is not bound"));
                        None
                    }
                },
            },
            ExprKind::App(name, args) => {
                let op = self.operator(name, e.pos, report)?;
                match &op.kind {
                    OperatorKind::Fixed { slots } => {
                        if slots.len() != args.len() {
                            report.error(
                                e.pos,
                                "OperatorArity",
                                format!("{name} takes {} argument(s), found {}", slots.len(), args.len()),
                            );
                        }
                        for (arg, slot) in args.iter().zip(slots) {
                            let found = self.template(arg, scope, report);
                            self.expect_sort(arg.pos, found, &slot.sort, report);
                        }
                    }
                    OperatorKind::Variadic { element } => {
                        for arg in args {
                            if let ExprKind::Star(v) = &arg.kind {
                                let bound = scope.stars.contains_key(v)
                                    || matches!(scope.vars.get(v), Some(s) if s.is_none() || *s == Some(op.result.as_str()));
                                if !bound {
                                    report.error(
                                        arg.pos,
                                        "UnboundVariable",
                                        format!("list variable {v}* is not bound"),
                                    );
                                }
                                continue;
                            }
                            // an argument of the list sort itself is spliced
                            let found = self.template(arg, scope, report);
                            if found != Some(op.result.as_str()) {
                                self.expect_sort(arg.pos, found, element, report);
                            }
                        }
                    }
                }
                Some(op.result.as_str())
            }
        }
    }

    fn guard(&self, g: &GuardExpr, scope: &Scope<'m>, report: &mut ValidationReport) {
        match g {
            GuardExpr::Not(inner) => self.guard(inner, scope, report),
            GuardExpr::And(a, b) => {
                self.guard(a, scope, report);
                self.guard(b, scope, report);
            }
            GuardExpr::Pred { name, args, pos } => {
                let Some(pred) = self.module.builtins.predicate(name) else {
                    report.error(*pos, "UnknownPredicate", format!("unknown guard predicate {name}"));
                    return;
                };
                if pred.arity() != args.len() {
                    report.error(
                        *pos,
                        "PredicateArity",
                        format!("{name} takes {} argument(s), found {}", pred.arity(), args.len()),
                    );
                }
                for arg in args {
                    if let ExprKind::Star(v) = &arg.kind {
                        if !scope.stars.contains_key(v) && !scope.vars.contains_key(v) {
                            report.error(arg.pos, "UnboundVariable", format!("list variable {v}* is not bound"));
                        }
                    } else {
                        self.template(arg, scope, report);
                    }
                }
            }
        }
    }
}
