use crate::matcher::{Pattern, PatternError, Template};
use crate::signature_model::{
    ActionExpr, ExprKind, GuardExpr, HookDecl, HookKind, OpId, Predicate, Signature,
};

pub(super) struct CompiledHook {
    pub params: Vec<String>,
    pub clauses: Vec<CompiledClause>,
}

pub(super) struct CompiledClause {
    pub patterns: Vec<Pattern>,
    pub guard: Option<Guard>,
    pub action: Action,
}

pub(super) enum Guard {
    Pred(Predicate, Vec<GuardArg>),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
}

pub(super) enum GuardArg {
    Star(String),
    Term(Template),
}

pub(super) enum Action {
    Build(Template),
    Raw(OpId, Vec<Template>),
    Tuple(Vec<Template>),
}

/// Hooks of one operator, one slot per kind.
#[derive(Default)]
pub(super) struct OpHooks {
    slots: [Option<CompiledHook>; 6],
}

impl OpHooks {
    fn slot(kind: HookKind) -> usize {
        HookKind::ALL.iter().position(|k| *k == kind).unwrap()
    }

    pub fn get(&self, kind: HookKind) -> Option<&CompiledHook> {
        self.slots[Self::slot(kind)].as_ref()
    }

    pub fn set(&mut self, kind: HookKind, hook: CompiledHook) {
        self.slots[Self::slot(kind)] = Some(hook);
    }
}

pub(super) fn compile_hook(hook: &HookDecl, sig: &Signature) -> Result<CompiledHook, PatternError> {
    let clauses = hook
        .body
        .iter()
        .map(|clause| {
            let patterns = clause
                .patterns
                .iter()
                .map(|p| Pattern::resolve(p, sig))
                .collect::<Result<_, _>>()?;
            let guard = clause.guard.as_ref().map(|g| compile_guard(g, sig)).transpose()?;
            let action = match &clause.action {
                ActionExpr::Template(t) => Action::Build(Template::resolve(t, sig)?),
                ActionExpr::Tuple(ts) => Action::Tuple(
                    ts.iter()
                        .map(|t| Template::resolve(t, sig))
                        .collect::<Result<_, _>>()?,
                ),
                ActionExpr::Raw(t) => match Template::resolve(t, sig)? {
                    Template::Op(op, args) => Action::Raw(op, args),
                    _ => {
                        return Err(PatternError::UnknownOperator {
                            name: t.to_string(),
                            pos: t.pos,
                        })
                    }
                },
            };
            Ok(CompiledClause {
                patterns,
                guard,
                action,
            })
        })
        .collect::<Result<_, PatternError>>()?;
    Ok(CompiledHook {
        params: hook.params.clone(),
        clauses,
    })
}

fn compile_guard(g: &GuardExpr, sig: &Signature) -> Result<Guard, PatternError> {
    Ok(match g {
        GuardExpr::Not(inner) => Guard::Not(Box::new(compile_guard(inner, sig)?)),
        GuardExpr::And(a, b) => Guard::And(
            Box::new(compile_guard(a, sig)?),
            Box::new(compile_guard(b, sig)?),
        ),
        GuardExpr::Pred { name, args, pos } => {
            let pred = sig
                .builtins()
                .predicate(name)
                .ok_or_else(|| PatternError::UnknownOperator {
                    name: name.clone(),
                    pos: *pos,
                })?;
            let args = args
                .iter()
                .map(|a| match &a.kind {
                    ExprKind::Star(v) => Ok(GuardArg::Star(v.clone())),
                    _ => Template::resolve(a, sig).map(GuardArg::Term),
                })
                .collect::<Result<_, _>>()?;
            Guard::Pred(pred, args)
        }
    })
}
