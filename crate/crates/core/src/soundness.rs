//! Empirical validity of the axiom schemas on a finite model.
//!
//! Every schema is instantiated with formulas from a pool. Truth of an
//! instance depends only on the extensions of the substituted formulas, so
//! the pool is first reduced to its distinct extensions on the model and
//! metavariables are bound to those sets directly.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::framecheck::HorizonMode;
use crate::proofcheck::{is_tautology, schema_template, SchemaId};
use crate::semantics::{extension_with, EvalError, Evaluator, Semantics};
use crate::syntax::{parse, AgentId, Formula};
use crate::WorldSet;

/// Tautology shapes standing in for the propositional schema.
pub const TAUTOLOGY_TEMPLATES: [&str; 12] = [
    "phi -> phi",
    "phi | ~phi",
    "phi -> (psi -> phi)",
    "(phi & psi) -> phi",
    "(phi & psi) -> psi",
    "phi -> (phi | psi)",
    "~~phi -> phi",
    "(phi -> psi) -> (~psi -> ~phi)",
    "((phi -> psi) -> phi) -> phi",
    "(phi <-> psi) -> (psi <-> phi)",
    "~(phi & ~phi)",
    "(phi & (phi -> psi)) -> psi",
];

/// A false instance of a schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub schema: SchemaId,
    pub agent: Option<AgentId>,
    /// Each metavariable with a pool formula of the bound extension.
    pub bindings: Vec<(String, Formula)>,
    pub world: usize,
}

impl Counterexample {
    /// The false instance as a formula.
    pub fn instance(&self, agents: usize) -> Formula {
        let map: BTreeMap<&str, &Formula> =
            self.bindings.iter().map(|(k, v)| (k.as_str(), v)).collect();
        let t = match schema_template(self.schema, agents, self.agent.unwrap_or(1)) {
            Some(t) => t,
            None => return Formula::Top,
        };
        t.substitute(&|v| map.get(v).map(|f| (*f).clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SweepReport {
    /// Instances evaluated, counted over distinct extension bindings.
    pub instances: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl SweepReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn merge(&mut self, other: SweepReport) {
        self.instances += other.instances;
        self.counterexamples.extend(other.counterexamples);
    }
}

/// The templates checked for one schema, with the agent they belong to.
fn templates(schema: SchemaId, agents: usize) -> Vec<(Option<AgentId>, Formula)> {
    if schema == SchemaId::TAUTOLOGY {
        return TAUTOLOGY_TEMPLATES
            .iter()
            .map(|t| {
                let f = parse(t, 1).expect("tautology templates parse");
                debug_assert_eq!(is_tautology(&f), Ok(true));
                (None, f)
            })
            .collect();
    }
    if schema.per_agent() {
        (1..=agents)
            .filter_map(|i| schema_template(schema, agents, i).map(|t| (Some(i), t)))
            .collect()
    } else {
        schema_template(schema, agents, 1)
            .map(|t| (None, t))
            .into_iter()
            .collect()
    }
}

/// Checks every schema in `schemas` against every binding of its
/// metavariables to extensions of `pool` formulas. In finite-horizon mode
/// the seriality schema is only required at worlds with a future.
pub fn axiom_sweep<M: Semantics>(
    m: &M,
    pool: &[Formula],
    schemas: &[SchemaId],
    mode: HorizonMode,
) -> Result<SweepReport, EvalError> {
    let f = m.frame();
    let mut ev = Evaluator::new(m);
    let mut distinct: Vec<(WorldSet, &Formula)> = Vec::new();
    for phi in pool {
        let ext = ev.extension(phi)?;
        if !distinct.iter().any(|(e, _)| *e == ext) {
            distinct.push((ext, phi));
        }
    }
    let all = f.all_worlds();
    let with_future = f.set(f.worlds().filter(|&w| !f.succ(w).is_clear()));

    let mut report = SweepReport::default();
    for &schema in schemas {
        let required = if schema == SchemaId::SERIALITY && mode == HorizonMode::Finite {
            &with_future
        } else {
            &all
        };
        for (agent, template) in templates(schema, f.agents()) {
            let metas: Vec<String> = template.vars().into_iter().map(String::from).collect();
            let mut idx = alloc::vec![0usize; metas.len()];
            loop {
                let lookup = |v: &str| {
                    metas
                        .iter()
                        .position(|x| x == v)
                        .map(|k| distinct[idx[k]].0.clone())
                };
                let ext = extension_with(m, &template, &lookup)?;
                report.instances += 1;
                if let Some(world) = required.difference(&ext).next() {
                    report.counterexamples.push(Counterexample {
                        schema,
                        agent,
                        bindings: metas
                            .iter()
                            .zip(&idx)
                            .map(|(k, &j)| (k.clone(), distinct[j].1.clone()))
                            .collect(),
                        world,
                    });
                }
                // odometer over bindings
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < distinct.len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
        }
    }
    Ok(report)
}
