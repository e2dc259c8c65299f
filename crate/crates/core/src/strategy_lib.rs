//! Traversal strategies over factory-built terms.
//!
//! Strategies are plain data: a combinator tree applied with [`apply`].
//! Every rebuild goes through the factory, so a rewrite deep inside a term
//! re-normalizes each ancestor on the way back up.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::gom_parser::{parse_expr, parse_pattern};
use crate::hook_engine::{BuildError, Factory};
use crate::matcher::{Matcher, Pattern, PatternError, Substitution, Template};
use crate::signature_model::OpId;
use crate::term_store::{NodeRef, TermStore};

/// Bound on successful rule firings within one [`apply`] call.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

/// Child-index path from the root. The empty path is the root itself.
pub type Position = Vec<usize>;

pub fn format_position(pos: &[usize]) -> String {
    if pos.is_empty() {
        return "root".to_string();
    }
    pos.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// Inverse of [`format_position`].
pub fn parse_position(text: &str) -> Option<Position> {
    if text == "root" {
        return Some(Vec::new());
    }
    text.split('.').map(|p| p.parse().ok()).collect()
}

/// Every position of `t` with the subterm found there, in pre-order.
pub fn positions(store: &TermStore, t: NodeRef) -> Vec<(Position, NodeRef)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::new(), t)];
    while let Some((pos, n)) = stack.pop() {
        let children = store.children(n);
        for (i, &c) in children.iter().enumerate().rev() {
            let mut p = pos.clone();
            p.push(i);
            stack.push((p, c));
        }
        out.push((pos, n));
    }
    out
}

pub fn subterm_at(store: &TermStore, t: NodeRef, pos: &[usize]) -> Option<NodeRef> {
    let mut cur = t;
    for &i in pos {
        cur = *store.children(cur).get(i)?;
    }
    Some(cur)
}

/// `t` with the subterm at `pos` replaced by `new`, every ancestor rebuilt
/// through the factory.
pub fn replace_at(f: &Factory, t: NodeRef, pos: &[usize], new: NodeRef) -> Result<NodeRef, BuildError> {
    let Some((&first, rest)) = pos.split_first() else {
        return Ok(new);
    };
    let store = f.store();
    let mut children = store.children(t).to_vec();
    let child = *children.get(first).ok_or_else(|| BuildError::UnknownOperator(format!(
        "no position {} in {}",
        format_position(pos),
        f.print(t)
    )))?;
    children[first] = crate::deep(|| replace_at(f, child, rest, new))?;
    f.construct(store.op_of(t), &children)
}

pub type GuardFn = Arc<dyn Fn(&Factory, &Substitution) -> bool + Send + Sync>;

/// `pattern -> template`, optionally guarded.
#[derive(Clone)]
pub struct Rule {
    pub pattern: Pattern,
    pub template: Template,
    pub guard: Option<GuardFn>,
}

impl Rule {
    pub fn new(pattern: Pattern, template: Template) -> Rule {
        Rule {
            pattern,
            template,
            guard: None,
        }
    }

    /// Parses both sides against the factory's signature.
    pub fn parse(f: &Factory, lhs: &str, rhs: &str) -> Result<Rule, PatternError> {
        let pattern = parse_pattern(lhs, f.signature())?;
        let template = Template::resolve(&parse_expr(rhs).map_err(PatternError::Syntax)?, f.signature())?;
        Ok(Rule::new(pattern, template))
    }

    pub fn with_guard(mut self, guard: impl Fn(&Factory, &Substitution) -> bool + Send + Sync + 'static) -> Rule {
        self.guard = Some(Arc::new(guard));
        self
    }

    fn holds(&self, f: &Factory, s: &Substitution) -> bool {
        self.guard.as_ref().is_none_or(|g| g(f, s))
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Rule")
            .field("pattern", &self.pattern)
            .field("template", &self.template)
            .field("guarded", &self.guard.is_some())
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Identity,
    Fail,
    /// Second strategy on the first one's result.
    Sequence(Box<Strategy>, Box<Strategy>),
    /// Second strategy only if the first fails.
    Choice(Box<Strategy>, Box<Strategy>),
    All(Box<Strategy>),
    One(Box<Strategy>),
    /// Positional child strategies under a fixed head.
    Congruence(OpId, Vec<Strategy>),
    Rule(Rule),
    TopDown(Box<Strategy>),
    BottomUp(Box<Strategy>),
    /// Rewrites until the strategy fails at every position.
    Innermost(Box<Strategy>),
}

impl Strategy {
    pub fn seq(a: Strategy, b: Strategy) -> Strategy {
        Strategy::Sequence(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Strategy, b: Strategy) -> Strategy {
        Strategy::Choice(Box::new(a), Box::new(b))
    }

    pub fn attempt(s: Strategy) -> Strategy {
        Strategy::choice(s, Strategy::Identity)
    }

    pub fn all(s: Strategy) -> Strategy {
        Strategy::All(Box::new(s))
    }

    pub fn one(s: Strategy) -> Strategy {
        Strategy::One(Box::new(s))
    }

    pub fn top_down(s: Strategy) -> Strategy {
        Strategy::TopDown(Box::new(s))
    }

    pub fn bottom_up(s: Strategy) -> Strategy {
        Strategy::BottomUp(Box::new(s))
    }

    pub fn innermost(s: Strategy) -> Strategy {
        Strategy::Innermost(Box::new(s))
    }

    /// Left-biased choice over rules; fails on an empty set.
    pub fn rules(rules: impl IntoIterator<Item = Rule>) -> Strategy {
        let mut rules: Vec<Rule> = rules.into_iter().collect();
        let Some(last) = rules.pop() else {
            return Strategy::Fail;
        };
        rules
            .into_iter()
            .rev()
            .fold(Strategy::Rule(last), |acc, r| Strategy::choice(Strategy::Rule(r), acc))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrategyError {
    #[error("step budget of {budget} rule firings exceeded")]
    StepBudgetExceeded { budget: usize },
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Applies `s` to `t`. `Ok(None)` is strategy failure.
pub fn apply(f: &Factory, s: &Strategy, t: NodeRef) -> Result<Option<NodeRef>, StrategyError> {
    apply_with_budget(f, s, t, DEFAULT_STEP_BUDGET)
}

pub fn apply_with_budget(
    f: &Factory,
    s: &Strategy,
    t: NodeRef,
    budget: usize,
) -> Result<Option<NodeRef>, StrategyError> {
    let mut run = Run { f, budget, steps: 0 };
    run.apply(s, t)
}

struct Run<'f> {
    f: &'f Factory,
    budget: usize,
    steps: usize,
}

impl Run<'_> {
    fn apply(&mut self, s: &Strategy, t: NodeRef) -> Result<Option<NodeRef>, StrategyError> {
        crate::deep(|| self.apply_here(s, t))
    }

    fn apply_here(&mut self, s: &Strategy, t: NodeRef) -> Result<Option<NodeRef>, StrategyError> {
        Ok(match s {
            Strategy::Identity => Some(t),
            Strategy::Fail => None,
            Strategy::Sequence(a, b) => match self.apply(a, t)? {
                Some(u) => self.apply(b, u)?,
                None => None,
            },
            Strategy::Choice(a, b) => match self.apply(a, t)? {
                Some(u) => Some(u),
                None => self.apply(b, t)?,
            },
            Strategy::All(inner) => self.all(inner, t)?,
            Strategy::One(inner) => {
                let children = self.f.store().children(t);
                for (i, &c) in children.iter().enumerate() {
                    if let Some(u) = self.apply(inner, c)? {
                        let mut new = children.to_vec();
                        new[i] = u;
                        return Ok(Some(self.rebuild(t, &children, new)?));
                    }
                }
                None
            }
            Strategy::Congruence(op, strategies) => {
                let store = self.f.store();
                let children = store.children(t);
                if store.op_of(t) != *op || children.len() != strategies.len() {
                    return Ok(None);
                }
                let mut new = Vec::with_capacity(children.len());
                for (st, &c) in strategies.iter().zip(children.iter()) {
                    match self.apply(st, c)? {
                        Some(u) => new.push(u),
                        None => return Ok(None),
                    }
                }
                Some(self.rebuild(t, &children, new)?)
            }
            Strategy::Rule(rule) => self.fire(rule, t)?,
            Strategy::TopDown(inner) => match self.apply(inner, t)? {
                Some(u) => self.all(s, u)?,
                None => None,
            },
            Strategy::BottomUp(inner) => match self.all(s, t)? {
                Some(u) => self.apply(inner, u)?,
                None => None,
            },
            Strategy::Innermost(inner) => {
                let mut cur = self.all(s, t)?.expect("innermost never fails");
                while let Some(u) = self.apply(inner, cur)? {
                    cur = self.all(s, u)?.expect("innermost never fails");
                }
                Some(cur)
            }
        })
    }

    fn all(&mut self, s: &Strategy, t: NodeRef) -> Result<Option<NodeRef>, StrategyError> {
        let children = self.f.store().children(t);
        let mut new = Vec::with_capacity(children.len());
        for &c in children.iter() {
            match self.apply(s, c)? {
                Some(u) => new.push(u),
                None => return Ok(None),
            }
        }
        Ok(Some(self.rebuild(t, &children, new)?))
    }

    fn rebuild(&self, t: NodeRef, old: &[NodeRef], new: Vec<NodeRef>) -> Result<NodeRef, BuildError> {
        // factory outputs are fixpoints of their own rebuild
        if old == new.as_slice() {
            return Ok(t);
        }
        self.f.construct(self.f.store().op_of(t), &new)
    }

    fn fire(&mut self, rule: &Rule, t: NodeRef) -> Result<Option<NodeRef>, StrategyError> {
        let mut found = None;
        let _ = Matcher::new(self.f.store()).for_each(&rule.pattern, t, Substitution::new(), &mut |s| {
            if rule.holds(self.f, s) {
                found = Some(s.clone());
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
        let Some(subst) = found else {
            return Ok(None);
        };
        self.steps += 1;
        if self.steps > self.budget {
            return Err(StrategyError::StepBudgetExceeded { budget: self.budget });
        }
        Ok(Some(self.f.instantiate(&rule.template, &subst)?))
    }
}

pub type CustomAction =
    Arc<dyn Fn(&Factory, &Substitution, NodeRef) -> Result<Vec<NodeRef>, BuildError> + Send + Sync>;

/// What a collect strategy does with each match solution.
#[derive(Clone)]
pub enum CollectAction {
    /// Adds the matched subterm itself.
    Subterm,
    /// Adds the whole term with the matched position replaced by the
    /// instantiated template.
    Replace(Template),
    /// Computes any number of replacements for the matched position; each
    /// is added as a whole term.
    Custom(CustomAction),
}

#[derive(Clone)]
pub struct Collect {
    pub pattern: Pattern,
    pub guard: Option<GuardFn>,
    pub action: CollectAction,
}

impl Collect {
    pub fn new(pattern: Pattern, action: CollectAction) -> Collect {
        Collect {
            pattern,
            guard: None,
            action,
        }
    }

    pub fn with_guard(mut self, guard: impl Fn(&Factory, &Substitution) -> bool + Send + Sync + 'static) -> Collect {
        self.guard = Some(Arc::new(guard));
        self
    }
}

/// Insertion-ordered set of nodes.
#[derive(Clone, Debug, Default)]
pub struct ResultSink {
    items: Vec<NodeRef>,
    seen: HashSet<NodeRef>,
}

impl ResultSink {
    pub fn new() -> Self {
        Self::default()
    }

    /// False when the node was already present.
    pub fn add(&mut self, node: NodeRef) -> bool {
        let fresh = self.seen.insert(node);
        if fresh {
            self.items.push(node);
        }
        fresh
    }

    pub fn contains(&self, node: NodeRef) -> bool {
        self.seen.contains(&node)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[NodeRef] {
        &self.items
    }

    pub fn into_vec(self) -> Vec<NodeRef> {
        self.items
    }
}

/// Runs `c` at every position of `t` and adds what it produces to `sink`.
pub fn collect_everywhere(f: &Factory, c: &Collect, t: NodeRef, mut sink: ResultSink) -> Result<ResultSink, BuildError> {
    collect_everywhere_with(f, c, t, |_, n| {
        sink.add(n);
    })?;
    Ok(sink)
}

/// Like [`collect_everywhere`], reporting each result with the position it
/// came from, duplicates included.
pub fn collect_everywhere_with(
    f: &Factory,
    c: &Collect,
    t: NodeRef,
    mut emit: impl FnMut(&[usize], NodeRef),
) -> Result<(), BuildError> {
    let store = f.store();
    let matcher = Matcher::new(store);
    for (pos, sub) in positions(store, t) {
        let mut solutions = Vec::new();
        let _ = matcher.for_each(&c.pattern, sub, Substitution::new(), &mut |s| {
            if c.guard.as_ref().is_none_or(|g| g(f, s)) {
                solutions.push(s.clone());
            }
            std::ops::ControlFlow::Continue(())
        });
        for s in solutions {
            match &c.action {
                CollectAction::Subterm => emit(&pos, sub),
                CollectAction::Replace(template) => {
                    let new = f.instantiate(template, &s)?;
                    emit(&pos, replace_at(f, t, &pos, new)?);
                }
                CollectAction::Custom(action) => {
                    for new in action(f, &s, sub)? {
                        emit(&pos, replace_at(f, t, &pos, new)?);
                    }
                }
            }
        }
    }
    Ok(())
}
