//! States, preference and dominance over an agent's choice cells.

use alloc::vec::Vec;

use thiserror::Error;

use crate::model::{CellRef, Frame, Model, MomentId, NeutralModel, UtilModel};
use crate::syntax::AgentId;
use crate::WorldSet;

/// The states available to an agent at a moment: the nonempty
/// intersections of the other agents' choice classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    pub moment: MomentId,
    pub agent: AgentId,
    pub blocks: Vec<WorldSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DominanceError {
    #[error("moment {0} out of range")]
    BadMoment(usize),
    #[error("agent {0} out of range")]
    BadAgent(AgentId),
    #[error("cells {0:?} and {1:?} belong to different moments or agents")]
    Mismatch(CellRef, CellRef),
    #[error("cell {0:?} does not exist")]
    BadCell(CellRef),
}

fn check(frame: &Frame, i: AgentId, m: MomentId) -> Result<(), DominanceError> {
    if m.0 >= frame.moment_count() {
        return Err(DominanceError::BadMoment(m.0));
    }
    if i == 0 || i > frame.agents() {
        return Err(DominanceError::BadAgent(i));
    }
    Ok(())
}

/// The state of agent `i` at world `w`: the moment intersected with every
/// other agent's choice class at `w`. With a single agent this is the
/// whole moment.
pub fn state_at(frame: &Frame, i: AgentId, w: usize) -> WorldSet {
    let mut s = frame.box_class(w).clone();
    for k in (1..=frame.agents()).filter(|&k| k != i) {
        s.intersect_with(frame.agent_class(k, w));
    }
    s
}

pub fn states(frame: &Frame, i: AgentId, m: MomentId) -> Result<StatePartition, DominanceError> {
    check(frame, i, m)?;
    let mut blocks: Vec<WorldSet> = Vec::new();
    for w in frame.moment(m).ones() {
        let s = state_at(frame, i, w);
        if !blocks.contains(&s) {
            blocks.push(s);
        }
    }
    Ok(StatePartition {
        moment: m,
        agent: i,
        blocks,
    })
}

/// Every outcome in `a` is at most every outcome in `b`. Vacuous when
/// either side is empty.
pub fn weak_pref(util: &[u64], a: &WorldSet, b: &WorldSet) -> bool {
    let max_a = a.ones().map(|w| util[w]).max();
    let min_b = b.ones().map(|w| util[w]).min();
    match (max_a, min_b) {
        (Some(x), Some(y)) => x <= y,
        _ => true,
    }
}

pub fn strict_pref(util: &[u64], a: &WorldSet, b: &WorldSet) -> bool {
    weak_pref(util, a, b) && !weak_pref(util, b, a)
}

/// `a` is weakly dominated by `b`: within every state, `a`'s outcomes are
/// weakly preferred to `b`'s.
pub(crate) fn weakly_dominated(
    util: &[u64],
    states: &[WorldSet],
    a: &WorldSet,
    b: &WorldSet,
) -> bool {
    states.iter().all(|s| {
        let mut sa = a.clone();
        sa.intersect_with(s);
        let mut sb = b.clone();
        sb.intersect_with(s);
        weak_pref(util, &sa, &sb)
    })
}

fn same_bucket(frame: &Frame, a: CellRef, b: CellRef) -> Result<(), DominanceError> {
    if a.moment != b.moment || a.agent != b.agent {
        return Err(DominanceError::Mismatch(a, b));
    }
    check(frame, a.agent, a.moment)?;
    for c in [a, b] {
        if c.cell >= frame.cells(c.moment, c.agent).len() {
            return Err(DominanceError::BadCell(c));
        }
    }
    Ok(())
}

/// `a ⪯ b` for two cells of one agent at one moment.
pub fn weak_dom(m: &UtilModel, a: CellRef, b: CellRef) -> Result<bool, DominanceError> {
    same_bucket(m.frame(), a, b)?;
    Ok(m.dominance(a.moment, a.agent).weak(a.cell, b.cell))
}

/// `a ≺ b` for two cells of one agent at one moment.
pub fn strict_dom(m: &UtilModel, a: CellRef, b: CellRef) -> Result<bool, DominanceError> {
    same_bucket(m.frame(), a, b)?;
    Ok(m.dominance(a.moment, a.agent).strict(a.cell, b.cell))
}

/// The cells of agent `i` at `mom` that lie inside the ideal set.
pub fn optimal_cells(
    m: &NeutralModel,
    i: AgentId,
    mom: MomentId,
) -> Result<Vec<CellRef>, DominanceError> {
    check(m.frame(), i, mom)?;
    let ideal = m.ideal(mom, i);
    Ok(m.frame()
        .cell_refs(mom, i)
        .filter(|&c| m.frame().cell(c).is_subset(ideal))
        .collect())
}

/// Weak dominance among one agent's cells at one moment, precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceTable {
    pub moment: MomentId,
    pub agent: AgentId,
    pub cells: Vec<WorldSet>,
    /// `weak[a][b]` iff cell a ⪯ cell b.
    weak: Vec<Vec<bool>>,
}

impl DominanceTable {
    pub fn compute(frame: &Frame, util: &[u64], m: MomentId, i: AgentId) -> Self {
        let cells: Vec<WorldSet> = frame.cells(m, i).to_vec();
        let blocks = states(frame, i, m).map(|s| s.blocks).unwrap_or_default();
        let weak = cells
            .iter()
            .map(|a| {
                cells
                    .iter()
                    .map(|b| weakly_dominated(util, &blocks, a, b))
                    .collect()
            })
            .collect();
        DominanceTable {
            moment: m,
            agent: i,
            cells,
            weak,
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn weak(&self, a: usize, b: usize) -> bool {
        self.weak[a][b]
    }

    pub fn strict(&self, a: usize, b: usize) -> bool {
        self.weak[a][b] && !self.weak[b][a]
    }

    /// Cells not strictly dominated by any other cell.
    pub fn undominated(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&a| !(0..self.len()).any(|b| self.strict(a, b)))
            .collect()
    }

    pub fn has_strict_pair(&self) -> bool {
        (0..self.len()).any(|a| (0..self.len()).any(|b| self.strict(a, b)))
    }

    /// The dominance clause for obligations: every cell not inside
    /// `target` is strictly dominated by some cell inside `target` whose
    /// weak upper set also lies inside `target`.
    pub fn obliges(&self, target: &WorldSet) -> bool {
        let inside: Vec<bool> = self.cells.iter().map(|c| c.is_subset(target)).collect();
        (0..self.len()).all(|v| {
            inside[v]
                || (0..self.len()).any(|z| {
                    self.strict(v, z)
                        && inside[z]
                        && (0..self.len()).all(|x| !self.weak(z, x) || inside[x])
                })
        })
    }
}
