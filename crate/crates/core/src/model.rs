//! Finite neutral and utilitarian models.
//!
//! The three equivalence relations (settledness, individual choice, grand
//! coalition) are stored as partitions: moments, and per moment the cells of
//! each agent and of the grand coalition. The future relation is stored as a
//! successor set per world; the past relation is its converse and is only
//! ever computed on demand.
//!
//! Construction is permissive about the choice, grand and deontic structure:
//! a cell may stray outside its moment or cells may overlap. Those are frame
//! condition violations, reported by [`crate::framecheck`]. Only the moment
//! partition itself must be well formed, since it defines which worlds exist.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dominance::DominanceTable;
use crate::syntax::AgentId;
use crate::WorldSet;

pub type WorldId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentId(pub usize);

/// One choice cell: cell `cell` of agent `agent` at `moment`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellRef {
    pub moment: MomentId,
    pub agent: AgentId,
    pub cell: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("a model needs at least one world")]
    NoWorlds,
    #[error("a model needs at least one agent")]
    NoAgents,
    #[error("duplicate world name `{0}`")]
    DuplicateWorld(String),
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("world id {0} out of range")]
    WorldOutOfRange(WorldId),
    #[error("world `{0}` belongs to no moment")]
    Unplaced(String),
    #[error("world `{0}` belongs to more than one moment")]
    MultiplyPlaced(String),
    #[error("moment {0} is empty")]
    EmptyMoment(usize),
    #[error("moment {0} out of range")]
    MomentOutOfRange(usize),
    #[error("agent {0} out of range")]
    AgentOutOfRange(usize),
    #[error("missing choice partition for moment {moment}, agent {agent}")]
    MissingChoice { moment: usize, agent: usize },
    #[error("duplicate choice partition for moment {moment}, agent {agent}")]
    DuplicateChoice { moment: usize, agent: usize },
    #[error("missing grand coalition partition for moment {0}")]
    MissingGrand(usize),
    #[error("future relation is not transitively closed: {0} -> {1} -> {2}")]
    NotTransitive(String, String, String),
    #[error("deontic relation of agent {agent} is not moment-constant at world `{world}`")]
    NotMomentConstant { agent: AgentId, world: String },
    #[error("utility map does not cover world `{0}`")]
    MissingUtility(String),
    #[error("world `{0}` is not covered by the choice partition of agent {1}")]
    NotCovered(String, AgentId),
}

/// Raw, index-based description of a frame plus valuation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrameParts {
    pub agents: usize,
    pub worlds: Vec<String>,
    pub moments: Vec<Vec<WorldId>>,
    /// `choice[moment][agent - 1]` lists that agent's cells at the moment.
    pub choice: Vec<Vec<Vec<Vec<WorldId>>>>,
    /// `grand[moment]` lists the grand coalition cells at the moment.
    pub grand: Vec<Vec<Vec<WorldId>>>,
    pub future: Vec<(WorldId, WorldId)>,
    pub valuation: BTreeMap<String, Vec<WorldId>>,
}

/// Shared skeleton of neutral and utilitarian models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    agents: usize,
    names: Vec<String>,
    moments: Vec<WorldSet>,
    moment_of: Vec<usize>,
    choice: Vec<Vec<Vec<WorldSet>>>,
    grand: Vec<Vec<WorldSet>>,
    succ: Vec<WorldSet>,
    valuation: BTreeMap<String, WorldSet>,
    // Relational views of the partitions, indexed by world.
    agent_class: Vec<Vec<WorldSet>>,
    grand_class: Vec<WorldSet>,
}

pub(crate) fn set_of(n: usize, ids: impl IntoIterator<Item = WorldId>) -> WorldSet {
    let mut s = WorldSet::with_capacity(n);
    for w in ids {
        s.insert(w);
    }
    s
}

impl Frame {
    pub fn new(parts: FrameParts) -> Result<Self, ModelError> {
        let n = parts.worlds.len();
        if n == 0 {
            return Err(ModelError::NoWorlds);
        }
        if parts.agents == 0 {
            return Err(ModelError::NoAgents);
        }
        for (i, name) in parts.worlds.iter().enumerate() {
            if parts.worlds[..i].contains(name) {
                return Err(ModelError::DuplicateWorld(name.clone()));
            }
        }
        let check = |w: WorldId| {
            if w < n {
                Ok(w)
            } else {
                Err(ModelError::WorldOutOfRange(w))
            }
        };
        let mut moment_of = alloc::vec![usize::MAX; n];
        let mut moments = Vec::with_capacity(parts.moments.len());
        for (m, block) in parts.moments.iter().enumerate() {
            if block.is_empty() {
                return Err(ModelError::EmptyMoment(m));
            }
            for &w in block {
                check(w)?;
                if moment_of[w] != usize::MAX {
                    return Err(ModelError::MultiplyPlaced(parts.worlds[w].clone()));
                }
                moment_of[w] = m;
            }
            moments.push(set_of(n, block.iter().copied()));
        }
        if let Some(w) = moment_of.iter().position(|&m| m == usize::MAX) {
            return Err(ModelError::Unplaced(parts.worlds[w].clone()));
        }
        let mcount = moments.len();
        if parts.choice.len() != mcount {
            let moment = parts.choice.len().min(mcount);
            return Err(ModelError::MissingChoice { moment, agent: 1 });
        }
        if parts.grand.len() != mcount {
            return Err(ModelError::MissingGrand(parts.grand.len().min(mcount)));
        }
        let mut choice = Vec::with_capacity(mcount);
        for (m, per_agent) in parts.choice.iter().enumerate() {
            if per_agent.len() != parts.agents {
                return Err(ModelError::MissingChoice {
                    moment: m,
                    agent: per_agent.len().min(parts.agents) + 1,
                });
            }
            let mut row = Vec::with_capacity(parts.agents);
            for cells in per_agent {
                let mut sets = Vec::with_capacity(cells.len());
                for cell in cells {
                    for &w in cell {
                        check(w)?;
                    }
                    sets.push(set_of(n, cell.iter().copied()));
                }
                row.push(sets);
            }
            choice.push(row);
        }
        let mut grand = Vec::with_capacity(mcount);
        for cells in &parts.grand {
            let mut sets = Vec::with_capacity(cells.len());
            for cell in cells {
                for &w in cell {
                    check(w)?;
                }
                sets.push(set_of(n, cell.iter().copied()));
            }
            grand.push(sets);
        }
        let mut succ = alloc::vec![WorldSet::with_capacity(n); n];
        for &(a, b) in &parts.future {
            check(a)?;
            check(b)?;
            succ[a].insert(b);
        }
        let mut valuation = BTreeMap::new();
        for (var, ws) in &parts.valuation {
            for &w in ws {
                check(w)?;
            }
            valuation.insert(var.clone(), set_of(n, ws.iter().copied()));
        }

        let mut agent_class = alloc::vec![alloc::vec![WorldSet::with_capacity(n); n]; parts.agents];
        let mut grand_class = alloc::vec![WorldSet::with_capacity(n); n];
        for row in &choice {
            for (a, cells) in row.iter().enumerate() {
                for cell in cells {
                    for w in cell.ones() {
                        agent_class[a][w].union_with(cell);
                    }
                }
            }
        }
        for cells in &grand {
            for cell in cells {
                for w in cell.ones() {
                    grand_class[w].union_with(cell);
                }
            }
        }

        Ok(Frame {
            agents: parts.agents,
            names: parts.worlds,
            moments,
            moment_of,
            choice,
            grand,
            succ,
            valuation,
            agent_class,
            grand_class,
        })
    }

    pub fn to_parts(&self) -> FrameParts {
        let ids = |s: &WorldSet| s.ones().collect::<Vec<_>>();
        FrameParts {
            agents: self.agents,
            worlds: self.names.clone(),
            moments: self.moments.iter().map(ids).collect(),
            choice: self
                .choice
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|cells| cells.iter().map(ids).collect())
                        .collect()
                })
                .collect(),
            grand: self
                .grand
                .iter()
                .map(|cells| cells.iter().map(ids).collect())
                .collect(),
            future: self.future_edges(),
            valuation: self
                .valuation
                .iter()
                .map(|(k, v)| (k.clone(), ids(v)))
                .collect(),
        }
    }

    pub fn agents(&self) -> usize {
        self.agents
    }

    pub fn world_count(&self) -> usize {
        self.names.len()
    }

    pub fn worlds(&self) -> core::ops::Range<WorldId> {
        0..self.names.len()
    }

    pub fn name(&self, w: WorldId) -> &str {
        &self.names[w]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn world_id(&self, name: &str) -> Result<WorldId, ModelError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ModelError::UnknownWorld(name.into()))
    }

    pub fn empty_set(&self) -> WorldSet {
        WorldSet::with_capacity(self.world_count())
    }

    pub fn all_worlds(&self) -> WorldSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn set(&self, ids: impl IntoIterator<Item = WorldId>) -> WorldSet {
        set_of(self.world_count(), ids)
    }

    fn check_world(&self, w: WorldId) -> Result<(), ModelError> {
        if w < self.world_count() {
            Ok(())
        } else {
            Err(ModelError::WorldOutOfRange(w))
        }
    }

    fn check_agent(&self, i: AgentId) -> Result<(), ModelError> {
        if (1..=self.agents).contains(&i) {
            Ok(())
        } else {
            Err(ModelError::AgentOutOfRange(i))
        }
    }

    pub fn moment_count(&self) -> usize {
        self.moments.len()
    }

    pub fn moment_ids(&self) -> impl Iterator<Item = MomentId> {
        (0..self.moments.len()).map(MomentId)
    }

    pub fn moment_of(&self, w: WorldId) -> Result<MomentId, ModelError> {
        self.check_world(w)?;
        Ok(MomentId(self.moment_of[w]))
    }

    /// The moment containing `w`. Panics on an out-of-range id.
    pub fn moment_index(&self, w: WorldId) -> usize {
        self.moment_of[w]
    }

    pub fn moment(&self, m: MomentId) -> &WorldSet {
        &self.moments[m.0]
    }

    /// The settledness class of `w`.
    pub fn box_class(&self, w: WorldId) -> &WorldSet {
        &self.moments[self.moment_of[w]]
    }

    /// Agent `i`'s cells at moment `m` as stored.
    pub fn cells(&self, m: MomentId, i: AgentId) -> &[WorldSet] {
        &self.choice[m.0][i - 1]
    }

    pub fn cell(&self, c: CellRef) -> &WorldSet {
        &self.choice[c.moment.0][c.agent - 1][c.cell]
    }

    pub fn cell_refs(&self, m: MomentId, i: AgentId) -> impl Iterator<Item = CellRef> + '_ {
        (0..self.cells(m, i).len()).map(move |cell| CellRef {
            moment: m,
            agent: i,
            cell,
        })
    }

    pub fn grand_cells(&self, m: MomentId) -> &[WorldSet] {
        &self.grand[m.0]
    }

    /// The choice cell of agent `i` containing `w`.
    pub fn cell_of(&self, i: AgentId, w: WorldId) -> Result<CellRef, ModelError> {
        self.check_world(w)?;
        self.check_agent(i)?;
        let m = MomentId(self.moment_of[w]);
        self.cells(m, i)
            .iter()
            .position(|c| c.contains(w))
            .map(|cell| CellRef {
                moment: m,
                agent: i,
                cell,
            })
            .ok_or_else(|| ModelError::NotCovered(self.names[w].clone(), i))
    }

    /// Worlds related to `w` by agent `i`'s choice relation.
    pub fn agent_class(&self, i: AgentId, w: WorldId) -> &WorldSet {
        &self.agent_class[i - 1][w]
    }

    /// Worlds related to `w` by the grand coalition relation.
    pub fn grand_class(&self, w: WorldId) -> &WorldSet {
        &self.grand_class[w]
    }

    pub fn g_successors(&self, w: WorldId) -> Result<&WorldSet, ModelError> {
        self.check_world(w)?;
        Ok(&self.succ[w])
    }

    pub(crate) fn succ(&self, w: WorldId) -> &WorldSet {
        &self.succ[w]
    }

    /// Converse view of the future relation.
    pub fn h_predecessors(&self, w: WorldId) -> Result<WorldSet, ModelError> {
        self.check_world(w)?;
        Ok(self.set(self.worlds().filter(|&v| self.succ[v].contains(w))))
    }

    pub fn future_edges(&self) -> Vec<(WorldId, WorldId)> {
        self.worlds()
            .flat_map(|w| self.succ[w].ones().map(move |v| (w, v)))
            .collect()
    }

    /// First violation of transitivity, if any.
    pub fn transitivity_gap(&self) -> Option<(WorldId, WorldId, WorldId)> {
        for w in self.worlds() {
            for u in self.succ[w].ones() {
                if !self.succ[u].is_subset(&self.succ[w]) {
                    let v = self.succ[u].difference(&self.succ[w]).next()?;
                    return Some((w, u, v));
                }
            }
        }
        None
    }

    pub fn valuation(&self, var: &str) -> WorldSet {
        self.valuation
            .get(var)
            .cloned()
            .unwrap_or_else(|| self.empty_set())
    }

    pub fn variables(&self) -> impl Iterator<Item = (&str, &WorldSet)> {
        self.valuation.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn set_valuation(&mut self, var: &str, worlds: WorldSet) {
        self.valuation.insert(var.into(), worlds);
    }

    /// Equality of everything except the valuation.
    pub fn same_skeleton(&self, other: &Frame) -> bool {
        self.agents == other.agents
            && self.names == other.names
            && self.moments == other.moments
            && self.choice == other.choice
            && self.grand == other.grand
            && self.succ == other.succ
    }
}

/// Adds every edge implied by transitivity.
pub fn transitive_closure(n: usize, edges: &[(WorldId, WorldId)]) -> Vec<(WorldId, WorldId)> {
    let mut reach = alloc::vec![WorldSet::with_capacity(n); n];
    for &(a, b) in edges {
        if a < n && b < n {
            reach[a].insert(b);
        }
    }
    // Floyd-Warshall over bitsets.
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row.contains(k) {
                row.union_with(&via);
            }
        }
    }
    (0..n)
        .flat_map(|a| reach[a].ones().map(move |b| (a, b)).collect::<Vec<_>>())
        .collect()
}

/// Access to the shared skeleton of a model.
pub trait Model {
    fn frame(&self) -> &Frame;
    fn frame_mut(&mut self) -> &mut Frame;
}

/// A frame whose deontic structure is given by ideal worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeutralModel {
    frame: Frame,
    /// `ought[agent - 1][w]`: the worlds ideal for the agent as seen from `w`.
    ought: Vec<Vec<WorldSet>>,
}

impl NeutralModel {
    /// Builds the deontic relation from one ideal set per moment and agent
    /// (`ideal[moment][agent - 1]`); every world of the moment sees the same
    /// ideal worlds.
    pub fn from_ideal(frame: Frame, ideal: &[Vec<Vec<WorldId>>]) -> Result<Self, ModelError> {
        let n = frame.world_count();
        if ideal.len() != frame.moment_count() {
            return Err(ModelError::MomentOutOfRange(ideal.len()));
        }
        let mut ought = alloc::vec![alloc::vec![frame.empty_set(); n]; frame.agents()];
        for (m, per_agent) in ideal.iter().enumerate() {
            if per_agent.len() != frame.agents() {
                return Err(ModelError::AgentOutOfRange(per_agent.len()));
            }
            for (a, ws) in per_agent.iter().enumerate() {
                for &w in ws {
                    if w >= n {
                        return Err(ModelError::WorldOutOfRange(w));
                    }
                }
                let target = set_of(n, ws.iter().copied());
                for w in frame.moment(MomentId(m)).ones() {
                    ought[a][w] = target.clone();
                }
            }
        }
        Ok(NeutralModel { frame, ought })
    }

    /// Builds the deontic relation from raw edges (`edges[agent - 1]`).
    /// With `require_moment_constant`, edge sets that differ between worlds
    /// of one moment are rejected; otherwise they are kept for the frame
    /// checker to report.
    pub fn from_ought_edges(
        frame: Frame,
        edges: &[Vec<(WorldId, WorldId)>],
        require_moment_constant: bool,
    ) -> Result<Self, ModelError> {
        let n = frame.world_count();
        if edges.len() != frame.agents() {
            return Err(ModelError::AgentOutOfRange(edges.len()));
        }
        let mut ought = alloc::vec![alloc::vec![frame.empty_set(); n]; frame.agents()];
        for (a, list) in edges.iter().enumerate() {
            for &(w, v) in list {
                if w >= n {
                    return Err(ModelError::WorldOutOfRange(w));
                }
                if v >= n {
                    return Err(ModelError::WorldOutOfRange(v));
                }
                ought[a][w].insert(v);
            }
        }
        let model = NeutralModel { frame, ought };
        if require_moment_constant {
            for i in 1..=model.frame.agents() {
                for w in model.frame.worlds() {
                    let first = model.frame.box_class(w).minimum().unwrap_or(w);
                    if model.ought(i, w) != model.ought(i, first) {
                        return Err(ModelError::NotMomentConstant {
                            agent: i,
                            world: model.frame.name(w).into(),
                        });
                    }
                }
            }
        }
        Ok(model)
    }

    /// Worlds ideal for agent `i` from the perspective of `w`.
    pub fn ought(&self, i: AgentId, w: WorldId) -> &WorldSet {
        &self.ought[i - 1][w]
    }

    /// Ideal worlds of agent `i` at moment `m`, read off the moment's first
    /// world.
    pub fn ideal(&self, m: MomentId, i: AgentId) -> &WorldSet {
        let first = self.frame.moment(m).minimum().unwrap_or(0);
        self.ought(i, first)
    }

    /// The deontic relation of every agent as edge lists.
    pub fn ought_edges(&self) -> Vec<Vec<(WorldId, WorldId)>> {
        self.ought
            .iter()
            .map(|per_world| {
                per_world
                    .iter()
                    .enumerate()
                    .flat_map(|(w, targets)| targets.ones().map(move |v| (w, v)))
                    .collect()
            })
            .collect()
    }

    /// Whether every world of each moment sees the same ideal worlds.
    pub fn is_moment_constant(&self) -> bool {
        (1..=self.frame.agents()).all(|i| {
            self.frame.worlds().all(|w| {
                let first = self.frame.box_class(w).minimum().unwrap_or(w);
                self.ought(i, w) == self.ought(i, first)
            })
        })
    }
}

impl Model for NeutralModel {
    fn frame(&self) -> &Frame {
        &self.frame
    }
    fn frame_mut(&mut self) -> &mut Frame {
        &mut self.frame
    }
}

/// A frame whose deontic structure is given by a utility per world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilModel {
    frame: Frame,
    util: Vec<u64>,
    /// `dominance[moment][agent - 1]`
    dominance: Vec<Vec<DominanceTable>>,
}

impl UtilModel {
    pub fn new(frame: Frame, util: Vec<u64>) -> Result<Self, ModelError> {
        if util.len() != frame.world_count() {
            let w = util.len().min(frame.world_count().saturating_sub(1));
            return Err(ModelError::MissingUtility(frame.name(w).into()));
        }
        let dominance = frame
            .moment_ids()
            .map(|m| {
                (1..=frame.agents())
                    .map(|i| DominanceTable::compute(&frame, &util, m, i))
                    .collect()
            })
            .collect();
        Ok(UtilModel {
            frame,
            util,
            dominance,
        })
    }

    pub fn util(&self, w: WorldId) -> u64 {
        self.util[w]
    }

    pub fn utilities(&self) -> &[u64] {
        &self.util
    }

    pub fn dominance(&self, m: MomentId, i: AgentId) -> &DominanceTable {
        &self.dominance[m.0][i - 1]
    }
}

impl Model for UtilModel {
    fn frame(&self) -> &Frame {
        &self.frame
    }
    fn frame_mut(&mut self) -> &mut Frame {
        &mut self.frame
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    fn ids(s: &WorldSet) -> Vec<WorldId> {
        s.ones().collect()
    }

    #[test]
    fn moments_and_cells() {
        let m = m1();
        let f = m.frame();
        assert_eq!(f.moment_of(0), Ok(MomentId(0)));
        assert_eq!(f.world_id("zz"), Err(ModelError::UnknownWorld("zz".into())));
        assert!(f.moment_of(9).is_err());
        let c = f.cell_of(1, 1).unwrap();
        assert_eq!(ids(f.cell(c)), vec![0, 1]);
        let c = f.cell_of(2, 1).unwrap();
        assert_eq!(ids(f.cell(c)), vec![1, 3]);
        assert_eq!(f.cell_of(3, 1), Err(ModelError::AgentOutOfRange(3)));

        let ch = chain();
        assert_eq!(ch.frame().moment_of(3), Ok(MomentId(2)));
        let c = ch.frame().cell_of(1, 2).unwrap();
        assert_eq!(ids(ch.frame().cell(c)), vec![2]);
    }

    #[test]
    fn successors_and_converse() {
        let parts = FrameParts {
            agents: 1,
            worlds: vec!["a".into(), "b".into(), "c".into()],
            moments: vec![vec![0], vec![1], vec![2]],
            choice: vec![
                vec![vec![vec![0]]],
                vec![vec![vec![1]]],
                vec![vec![vec![2]]],
            ],
            grand: vec![vec![vec![0]], vec![vec![1]], vec![vec![2]]],
            future: transitive_closure(3, &[(0, 1), (1, 2)]),
            valuation: BTreeMap::new(),
        };
        let f = Frame::new(parts).unwrap();
        assert_eq!(ids(f.g_successors(0).unwrap()), vec![1, 2]);
        assert_eq!(ids(&f.h_predecessors(2).unwrap()), vec![0, 1]);
        assert!(f.g_successors(2).unwrap().is_clear());
        assert_eq!(f.transitivity_gap(), None);
        for w in f.worlds() {
            for v in f.worlds() {
                let edge = f.future_edges().contains(&(w, v));
                assert_eq!(edge, f.g_successors(w).unwrap().contains(v));
                assert_eq!(edge, f.h_predecessors(v).unwrap().contains(w));
            }
        }
    }

    #[test]
    fn moment_partition_must_be_exact() {
        let mut parts = m1().frame().to_parts();
        parts.moments = vec![vec![0, 1], vec![1, 2, 3]];
        assert_eq!(
            Frame::new(parts.clone()),
            Err(ModelError::MultiplyPlaced("w01".into()))
        );
        parts.moments = vec![vec![0, 1, 2]];
        assert_eq!(Frame::new(parts), Err(ModelError::Unplaced("w11".into())));
    }

    #[test]
    fn ideal_is_moment_constant() {
        let m = m1();
        assert_eq!(ids(m.ideal(MomentId(0), 1)), vec![0, 1]);
        for w in 0..4 {
            assert_eq!(ids(m.ought(2, w)), vec![0, 2]);
        }
        assert!(m.is_moment_constant());
    }

    #[test]
    fn raw_ought_edges_must_be_moment_constant_when_required() {
        let m = m1();
        let mut edges = m.ought_edges();
        edges[0].retain(|&(w, _)| w != 3);
        edges[0].push((3, 2));
        edges[0].push((3, 3));
        let frame = m.frame().clone();
        assert!(matches!(
            NeutralModel::from_ought_edges(frame.clone(), &edges, true),
            Err(ModelError::NotMomentConstant { agent: 1, .. })
        ));
        let loose = NeutralModel::from_ought_edges(frame, &edges, false).unwrap();
        assert!(!loose.is_moment_constant());
    }

    #[test]
    fn closure_adds_implied_edges() {
        let closed = transitive_closure(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(closed.len(), 6);
        assert!(closed.contains(&(0, 3)));
    }

    #[test]
    fn parts_round_trip() {
        let m = chain();
        let again = Frame::new(m.frame().to_parts()).unwrap();
        assert_eq!(&again, m.frame());
    }
}
