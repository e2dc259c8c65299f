//! Proof search for system BV over the shipped `Struct` module.
//!
//! Search runs from the goal towards the unit `o`: each rule rewrites a
//! conclusion into a premise at any position. Because the factory keeps
//! every structure in canonical form, the visited set is exact and the
//! rules only need associative matching.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::gom_parser::{parse_expr, parse_pattern};
use crate::hook_engine::{BuildError, Factory};
use crate::matcher::{Substitution, Template};
use crate::signature_model::{atomic_duals, OpId};
use crate::strategy_lib::{collect_everywhere_with, format_position, subterm_at, Collect, CollectAction, Position};
use crate::term_store::{NodeRef, TermStore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    AiDown,
    SwitchLeft,
    SwitchRight,
    QDown,
}

impl RuleName {
    pub const ALL: [RuleName; 4] = [RuleName::AiDown, RuleName::SwitchLeft, RuleName::SwitchRight, RuleName::QDown];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::AiDown => "ai_down",
            RuleName::SwitchLeft => "switch_left",
            RuleName::SwitchRight => "switch_right",
            RuleName::QDown => "q_down",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.as_str() == s)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub rule: RuleName,
    pub position: Position,
    pub before: NodeRef,
    pub after: NodeRef,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Proved,
    NotProvedWithinBounds,
    RefutedByExhaustion,
}

#[derive(Clone, Debug)]
pub struct ProofTrace {
    pub goal: NodeRef,
    pub steps: Vec<ProofStep>,
    pub status: Status,
    /// Distinct states stored by the search.
    pub states: usize,
    /// Successor states generated, duplicates included.
    pub generated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    BreadthFirst,
    DepthFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub max_frontier: usize,
    pub can_react_pruning: bool,
    pub strategy: SearchStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 20,
            max_frontier: 100_000,
            can_react_pruning: true,
            strategy: SearchStrategy::BreadthFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProveError {
    #[error("module {0} is not a Struct module (missing operator {1})")]
    NotStructModule(String, &'static str),
    #[error("goal {term} has sort {found}, expected Struc")]
    InvalidGoalSort { term: String, found: String },
    #[error("search bounds must be positive")]
    InvalidConfig,
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Heuristic interaction test: some atom of `part` occurs with the opposite
/// polarity somewhere in `u`.
pub fn can_react(store: &TermStore, part: &[NodeRef], u: NodeRef) -> bool {
    crate::signature_model::can_react(store, part, u)
}

/// One rule instance found in a structure.
pub type Instance = (Position, NodeRef);

/// The BV rules over one Struct factory.
pub struct Prover<'f> {
    f: &'f Factory,
    config: SearchConfig,
    o: NodeRef,
    struc: crate::signature_model::SortId,
    ai_down: Collect,
    switch: [(RuleName, Collect); 4],
    q_down: Collect,
}

struct Ops {
    seq: OpId,
    concseq: OpId,
}

impl<'f> Prover<'f> {
    pub fn new(f: &'f Factory, config: SearchConfig) -> Result<Prover<'f>, ProveError> {
        if config.max_depth == 0 || config.max_frontier == 0 {
            return Err(ProveError::InvalidConfig);
        }
        let sig = f.signature();
        for name in ["o", "neg", "par", "cop", "seq", "concPar", "concCop", "concSeq"] {
            if sig.op_by_name(name).is_none() {
                return Err(ProveError::NotStructModule(sig.module_name().to_string(), name));
            }
        }
        let struc = sig
            .sort("Struc")
            .ok_or_else(|| ProveError::NotStructModule(sig.module_name().to_string(), "Struc"))?;
        let pattern = |text: &str| parse_pattern(text, sig).expect("rule pattern");
        let template = |text: &str| Template::resolve(&parse_expr(text).expect("rule template"), sig).expect("rule template");
        let ops = Arc::new(Ops {
            seq: sig.op_by_name("seq").unwrap(),
            concseq: sig.op_by_name("concSeq").unwrap(),
        });

        // the list is sorted, so the pair may come in either order
        let ai_down = Collect::new(
            pattern("par(concPar(X1*,x,X2*,y,X3*))"),
            CollectAction::Replace(template("par(concPar(X1*,X2*,X3*))")),
        )
        .with_guard(|f, s| atomic_duals(f.store(), s.get("x").unwrap(), s.get("y").unwrap()));

        // U may sit on either side of the copar in a sorted par list
        let cop_first = "par(concPar(X1*,cop(concCop(R*,T*)),X2*,u,X3*))";
        let u_first = "par(concPar(X1*,u,X2*,cop(concCop(R*,T*)),X3*))";
        let pruning = config.can_react_pruning;
        let switch_action = |moved: &'static str, stays: &'static str| {
            let result = template(&format!(
                "par(concPar(cop(concCop(par(concPar(cop(concCop({moved}*)),u)),{stays}*)),X1*,X2*,X3*))"
            ));
            let action: crate::strategy_lib::CustomAction = Arc::new(move |f: &Factory, s: &Substitution, _| {
                let (m, t) = (s.get_star(moved).unwrap(), s.get_star(stays).unwrap());
                if m.is_empty() || t.is_empty() {
                    return Ok(vec![]);
                }
                if pruning && !can_react(f.store(), m, s.get("u").unwrap()) {
                    return Ok(vec![]);
                }
                Ok(vec![f.instantiate(&result, s)?])
            });
            action
        };
        let switch = [
            (RuleName::SwitchLeft, Collect::new(pattern(cop_first), CollectAction::Custom(switch_action("R", "T")))),
            (RuleName::SwitchLeft, Collect::new(pattern(u_first), CollectAction::Custom(switch_action("R", "T")))),
            (RuleName::SwitchRight, Collect::new(pattern(cop_first), CollectAction::Custom(switch_action("T", "R")))),
            (RuleName::SwitchRight, Collect::new(pattern(u_first), CollectAction::Custom(switch_action("T", "R")))),
        ];

        let q_result = template("par(concPar(seq(concSeq(par(concPar(r,u)),par(concPar(t,v)))),X1*,X2*,X3*))");
        let q_ops = ops.clone();
        let q_down = Collect::new(
            pattern("par(concPar(X1*,p,X2*,q,X3*))"),
            CollectAction::Custom(Arc::new(move |f: &Factory, s: &Substitution, _| {
                let mut out = Vec::new();
                let left = seq_splits(f, &q_ops, s.get("p").unwrap())?;
                let right = seq_splits(f, &q_ops, s.get("q").unwrap())?;
                for &(r, t) in &left {
                    for &(u, v) in &right {
                        let mut s = s.clone();
                        s.bind("r", r).bind("t", t).bind("u", u).bind("v", v);
                        out.push(f.instantiate(&q_result, &s)?);
                    }
                }
                Ok(out)
            })),
        );

        Ok(Prover {
            f,
            config,
            o: f.build(sig.op_by_name("o").unwrap(), &[])?,
            struc,
            ai_down,
            switch,
            q_down,
        })
    }

    pub fn factory(&self) -> &'f Factory {
        self.f
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn unit(&self) -> NodeRef {
        self.o
    }

    fn collect(&self, c: &Collect, t: NodeRef, out: &mut Vec<Instance>) -> Result<(), BuildError> {
        let mut seen = HashSet::new();
        for (p, n) in out.iter() {
            seen.insert((p.clone(), *n));
        }
        collect_everywhere_with(self.f, c, t, |pos, n| {
            if seen.insert((pos.to_vec(), n)) {
                out.push((pos.to_vec(), n));
            }
        })
    }

    pub fn apply_ai_down(&self, t: NodeRef) -> Result<Vec<Instance>, BuildError> {
        let mut out = Vec::new();
        self.collect(&self.ai_down, t, &mut out)?;
        Ok(out)
    }

    /// Both orientations of the switch rule.
    pub fn apply_switch(&self, t: NodeRef) -> Result<Vec<Instance>, BuildError> {
        let mut out = Vec::new();
        for (_, c) in &self.switch {
            self.collect(c, t, &mut out)?;
        }
        Ok(out)
    }

    pub fn apply_q_down(&self, t: NodeRef) -> Result<Vec<Instance>, BuildError> {
        let mut out = Vec::new();
        self.collect(&self.q_down, t, &mut out)?;
        Ok(out)
    }

    pub fn apply_rule(&self, rule: RuleName, t: NodeRef) -> Result<Vec<Instance>, BuildError> {
        let mut out = Vec::new();
        match rule {
            RuleName::AiDown => self.collect(&self.ai_down, t, &mut out)?,
            RuleName::QDown => self.collect(&self.q_down, t, &mut out)?,
            RuleName::SwitchLeft | RuleName::SwitchRight => {
                for (name, c) in &self.switch {
                    if *name == rule {
                        self.collect(c, t, &mut out)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Every rule instance in `t`, tagged with its rule.
    pub fn successors(&self, t: NodeRef) -> Result<Vec<(RuleName, Position, NodeRef)>, BuildError> {
        let mut out = Vec::new();
        for rule in RuleName::ALL {
            for (p, n) in self.apply_rule(rule, t)? {
                out.push((rule, p, n));
            }
        }
        Ok(out)
    }

    /// Re-derives `step` from scratch.
    pub fn check_step(&self, step: &ProofStep) -> Result<bool, BuildError> {
        if subterm_at(self.f.store(), step.before, &step.position).is_none() {
            return Ok(false);
        }
        Ok(self
            .apply_rule(step.rule, step.before)?
            .iter()
            .any(|(p, n)| *p == step.position && *n == step.after))
    }

    /// Checks a whole trace: every step re-derives, steps chain from the
    /// goal, and a proved trace ends in the unit.
    pub fn check_trace(&self, trace: &ProofTrace) -> Result<bool, BuildError> {
        let mut cur = trace.goal;
        for step in &trace.steps {
            if step.before != cur || !self.check_step(step)? {
                return Ok(false);
            }
            cur = step.after;
        }
        Ok(trace.status != Status::Proved || cur == self.o)
    }

    pub fn prove(&self, goal: NodeRef) -> Result<ProofTrace, ProveError> {
        let store = self.f.store();
        if !store.owns(goal) {
            return Err(BuildError::Store(crate::term_store::StoreError::StoreMismatch).into());
        }
        if store.sort_of(goal) != self.struc {
            return Err(ProveError::InvalidGoalSort {
                term: self.f.print(goal),
                found: store.sort_name_of(goal).to_string(),
            });
        }
        match self.config.strategy {
            SearchStrategy::BreadthFirst => self.bfs(goal),
            SearchStrategy::DepthFirst => self.dfs(goal),
        }
    }

    fn bfs(&self, goal: NodeRef) -> Result<ProofTrace, ProveError> {
        let mut parent: HashMap<NodeRef, Option<ProofStep>> = HashMap::new();
        parent.insert(goal, None);
        let mut queue = VecDeque::from([(goal, 0usize)]);
        let mut generated = 0;
        let mut bounded = false;
        if goal == self.o {
            return Ok(self.trace(goal, &parent, goal, Status::Proved, generated));
        }
        while let Some((state, depth)) = queue.pop_front() {
            let succ = self.successors(state)?;
            if depth >= self.config.max_depth {
                bounded |= succ.iter().any(|(_, _, n)| !parent.contains_key(n));
                continue;
            }
            for (rule, position, next) in succ {
                generated += 1;
                if parent.contains_key(&next) {
                    continue;
                }
                parent.insert(
                    next,
                    Some(ProofStep {
                        rule,
                        position,
                        before: state,
                        after: next,
                    }),
                );
                if next == self.o {
                    return Ok(self.trace(goal, &parent, next, Status::Proved, generated));
                }
                if parent.len() > self.config.max_frontier {
                    return Ok(self.trace(goal, &parent, goal, Status::NotProvedWithinBounds, generated));
                }
                queue.push_back((next, depth + 1));
            }
        }
        let status = if bounded {
            Status::NotProvedWithinBounds
        } else {
            Status::RefutedByExhaustion
        };
        Ok(self.trace(goal, &parent, goal, status, generated))
    }

    /// Depth-first with iterative backtracking. A state reached again at a
    /// smaller depth is expanded again, so the depth bound is exact.
    fn dfs(&self, goal: NodeRef) -> Result<ProofTrace, ProveError> {
        let mut parent: HashMap<NodeRef, Option<ProofStep>> = HashMap::new();
        let mut best: HashMap<NodeRef, usize> = HashMap::new();
        parent.insert(goal, None);
        best.insert(goal, 0);
        let mut stack = vec![(goal, 0usize)];
        let mut generated = 0;
        let mut bounded = false;
        if goal == self.o {
            return Ok(self.trace(goal, &parent, goal, Status::Proved, generated));
        }
        while let Some((state, depth)) = stack.pop() {
            if best[&state] < depth {
                continue;
            }
            let succ = self.successors(state)?;
            if depth >= self.config.max_depth {
                bounded |= succ.iter().any(|(_, _, n)| best.get(n).is_none_or(|&d| d > depth + 1));
                continue;
            }
            for (rule, position, next) in succ.into_iter().rev() {
                generated += 1;
                if best.get(&next).is_some_and(|&d| d <= depth + 1) {
                    continue;
                }
                best.insert(next, depth + 1);
                parent.insert(
                    next,
                    Some(ProofStep {
                        rule,
                        position,
                        before: state,
                        after: next,
                    }),
                );
                if next == self.o {
                    return Ok(self.trace(goal, &parent, next, Status::Proved, generated));
                }
                if parent.len() > self.config.max_frontier {
                    return Ok(self.trace(goal, &parent, goal, Status::NotProvedWithinBounds, generated));
                }
                stack.push((next, depth + 1));
            }
        }
        let status = if bounded {
            Status::NotProvedWithinBounds
        } else {
            Status::RefutedByExhaustion
        };
        Ok(self.trace(goal, &parent, goal, status, generated))
    }

    fn trace(
        &self,
        goal: NodeRef,
        parent: &HashMap<NodeRef, Option<ProofStep>>,
        end: NodeRef,
        status: Status,
        generated: usize,
    ) -> ProofTrace {
        let mut steps = Vec::new();
        let mut cur = end;
        while let Some(Some(step)) = parent.get(&cur) {
            cur = step.before;
            steps.push(step.clone());
        }
        steps.reverse();
        ProofTrace {
            goal,
            steps,
            status,
            states: parent.len(),
            generated,
        }
    }

    /// One line per step, then the verdict.
    pub fn format_trace(&self, trace: &ProofTrace) -> String {
        let mut out = String::new();
        for step in &trace.steps {
            out.push_str(&format!(
                "{} @ {} : {} ==> {}\n",
                step.rule,
                format_position(&step.position),
                self.f.print(step.before),
                self.f.print(step.after)
            ));
        }
        out.push_str(&match trace.status {
            Status::Proved => format!("PROVED in {} steps\n", trace.steps.len()),
            Status::NotProvedWithinBounds => "NOT PROVED (bound)\n".to_string(),
            Status::RefutedByExhaustion => format!("REFUTED (exhausted {} states)\n", trace.states),
        });
        out
    }
}

/// The ways to read `x` as `<r;t>`: every cut of a seq, and `<x;o>`,
/// `<o;x>` for anything else.
fn seq_splits(f: &Factory, ops: &Ops, x: NodeRef) -> Result<Vec<(NodeRef, NodeRef)>, BuildError> {
    let store = f.store();
    let o = f.build(f.op("o")?, &[])?;
    if store.op_of(x) != ops.seq {
        return Ok(vec![(x, o), (o, x)]);
    }
    let items = store.children(store.children(x)[0]);
    let part = |s: &[NodeRef]| -> Result<NodeRef, BuildError> {
        let list = f.build_variadic(ops.concseq, s)?;
        f.build(ops.seq, &[list])
    };
    (0..=items.len())
        .map(|k| Ok((part(&items[..k])?, part(&items[k..])?)))
        .collect()
}
