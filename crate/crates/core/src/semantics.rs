//! Truth of formulas at worlds.
//!
//! Evaluation works on extensions: the set of worlds where a formula holds
//! is computed bottom-up, one set operation per constructor. Neutral and
//! utilitarian models differ only in the obligation clause, supplied by
//! [`Semantics::ought_extension`].

use alloc::collections::BTreeMap;
use alloc::string::String;

use thiserror::Error;

use crate::model::{Frame, Model, ModelError, NeutralModel, UtilModel, WorldId};
use crate::syntax::{AgentId, Formula};
use crate::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("agent {agent} out of range 1..={agents}")]
    AgentOutOfRange { agent: AgentId, agents: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A formula together with the worlds where it holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub formula: Formula,
    pub worlds: WorldSet,
}

/// Models that can evaluate obligations.
pub trait Semantics: Model {
    /// Worlds where agent `i` ought to see to it that the formula with
    /// extension `target` holds.
    fn ought_extension(&self, i: AgentId, target: &WorldSet) -> WorldSet;
}

impl Semantics for NeutralModel {
    fn ought_extension(&self, i: AgentId, target: &WorldSet) -> WorldSet {
        let f = self.frame();
        f.set(f.worlds().filter(|&w| self.ought(i, w).is_subset(target)))
    }
}

impl Semantics for UtilModel {
    fn ought_extension(&self, i: AgentId, target: &WorldSet) -> WorldSet {
        let f = self.frame();
        let mut out = f.empty_set();
        for m in f.moment_ids() {
            if self.dominance(m, i).obliges(target) {
                out.union_with(f.moment(m));
            }
        }
        out
    }
}

/// Worlds all of whose settledness class lies in `target`.
pub fn box_extension(f: &Frame, target: &WorldSet) -> WorldSet {
    let mut out = f.empty_set();
    for m in f.moment_ids() {
        if f.moment(m).is_subset(target) {
            out.union_with(f.moment(m));
        }
    }
    out
}

pub fn stit_extension(f: &Frame, i: AgentId, target: &WorldSet) -> WorldSet {
    f.set(
        f.worlds()
            .filter(|&w| f.agent_class(i, w).is_subset(target)),
    )
}

pub fn grand_extension(f: &Frame, target: &WorldSet) -> WorldSet {
    f.set(f.worlds().filter(|&w| f.grand_class(w).is_subset(target)))
}

pub fn henceforth_extension(f: &Frame, target: &WorldSet) -> WorldSet {
    f.set(f.worlds().filter(|&w| f.succ(w).is_subset(target)))
}

/// Worlds none of whose predecessors fall outside `target`.
pub fn hitherto_extension(f: &Frame, target: &WorldSet) -> WorldSet {
    let mut out = f.all_worlds();
    for v in f.worlds().filter(|&v| !target.contains(v)) {
        out.difference_with(f.succ(v));
    }
    out
}

fn check_agent(f: &Frame, i: AgentId) -> Result<(), EvalError> {
    if i == 0 || i > f.agents() {
        return Err(EvalError::AgentOutOfRange {
            agent: i,
            agents: f.agents(),
        });
    }
    Ok(())
}

/// Extension of `formula`, resolving variables through `lookup` first and
/// the model's valuation otherwise.
pub fn extension_with<M: Semantics + ?Sized>(
    m: &M,
    formula: &Formula,
    lookup: &dyn Fn(&str) -> Option<WorldSet>,
) -> Result<WorldSet, EvalError> {
    let f = m.frame();
    let rec = |x: &Formula| extension_with(m, x, lookup);
    Ok(match formula {
        Formula::Var(v) => lookup(v).unwrap_or_else(|| f.valuation(v)),
        Formula::Top => f.all_worlds(),
        Formula::Bot => f.empty_set(),
        Formula::Not(x) => {
            let mut s = rec(x)?;
            s.toggle_range(..);
            s
        }
        Formula::And(a, b) => {
            let mut s = rec(a)?;
            s.intersect_with(&rec(b)?);
            s
        }
        Formula::Settled(x) => box_extension(f, &rec(x)?),
        Formula::Stit(i, x) => {
            check_agent(f, *i)?;
            stit_extension(f, *i, &rec(x)?)
        }
        Formula::Grand(x) => grand_extension(f, &rec(x)?),
        Formula::Henceforth(x) => henceforth_extension(f, &rec(x)?),
        Formula::Hitherto(x) => hitherto_extension(f, &rec(x)?),
        Formula::Ought(i, x) => {
            check_agent(f, *i)?;
            m.ought_extension(*i, &rec(x)?)
        }
    })
}

/// Memoizing evaluator: each distinct subformula is evaluated once.
pub struct Evaluator<'m, M: Semantics> {
    model: &'m M,
    cache: BTreeMap<Formula, WorldSet>,
}

impl<'m, M: Semantics> Evaluator<'m, M> {
    pub fn new(model: &'m M) -> Self {
        Evaluator {
            model,
            cache: BTreeMap::new(),
        }
    }

    pub fn model(&self) -> &'m M {
        self.model
    }

    pub fn extension(&mut self, formula: &Formula) -> Result<WorldSet, EvalError> {
        if let Some(s) = self.cache.get(formula) {
            return Ok(s.clone());
        }
        let f = self.model.frame();
        let s = match formula {
            Formula::Var(_) | Formula::Top | Formula::Bot => {
                extension_with(self.model, formula, &|_| None)?
            }
            Formula::Not(x) => {
                let mut s = self.extension(x)?;
                s.toggle_range(..);
                s
            }
            Formula::And(a, b) => {
                let mut s = self.extension(a)?;
                s.intersect_with(&self.extension(b)?);
                s
            }
            Formula::Settled(x) => box_extension(f, &self.extension(x)?),
            Formula::Stit(i, x) => {
                check_agent(f, *i)?;
                stit_extension(f, *i, &self.extension(x)?)
            }
            Formula::Grand(x) => grand_extension(f, &self.extension(x)?),
            Formula::Henceforth(x) => henceforth_extension(f, &self.extension(x)?),
            Formula::Hitherto(x) => hitherto_extension(f, &self.extension(x)?),
            Formula::Ought(i, x) => {
                check_agent(f, *i)?;
                self.model.ought_extension(*i, &self.extension(x)?)
            }
        };
        self.cache.insert(formula.clone(), s.clone());
        Ok(s)
    }

    pub fn eval(&mut self, w: WorldId, formula: &Formula) -> Result<bool, EvalError> {
        self.model.frame().moment_of(w)?;
        Ok(self.extension(formula)?.contains(w))
    }
}

pub fn extension<M: Semantics>(m: &M, formula: &Formula) -> Result<Extension, EvalError> {
    Ok(Extension {
        formula: formula.clone(),
        worlds: Evaluator::new(m).extension(formula)?,
    })
}

pub fn valid_on_model<M: Semantics>(m: &M, formula: &Formula) -> Result<bool, EvalError> {
    let ext = Evaluator::new(m).extension(formula)?;
    Ok(ext.count_ones(..) == m.frame().world_count())
}

pub fn eval_neutral(m: &NeutralModel, w: WorldId, formula: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(m).eval(w, formula)
}

pub fn eval_util(m: &UtilModel, w: WorldId, formula: &Formula) -> Result<bool, EvalError> {
    Evaluator::new(m).eval(w, formula)
}

/// Names of the worlds in `s`, in id order.
pub fn world_names(f: &Frame, s: &WorldSet) -> alloc::vec::Vec<String> {
    s.ones().map(|w| String::from(f.name(w))).collect()
}
