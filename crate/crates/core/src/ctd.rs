//! Contrary-to-duty analysis under binary utilities.
//!
//! An agent's obligations at a moment collapse into settledness exactly
//! when no choice strictly dominates another. Only then can no obligation
//! be violated, and reasoning about duties that arise from violations is
//! impossible there.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::dominance::DominanceError;
use crate::model::{Frame, FrameParts, Model, MomentId, UtilModel, WorldId};
use crate::semantics::{box_extension, Semantics};
use crate::syntax::AgentId;
use crate::WorldSet;

/// Largest moment the extension sweep will enumerate.
pub const MAX_SWEEP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CtdError {
    #[error(transparent)]
    Dominance(#[from] DominanceError),
    #[error("moment has {0} worlds, more than the sweep limit of {MAX_SWEEP}")]
    TooLarge(usize),
    #[error("census needs between 1 and 3 worlds per joint choice, got {0}")]
    CensusSize(usize),
}

fn check(m: &UtilModel, mom: MomentId, i: AgentId) -> Result<(), DominanceError> {
    if mom.0 >= m.frame().moment_count() {
        return Err(DominanceError::BadMoment(mom.0));
    }
    if i == 0 || i > m.frame().agents() {
        return Err(DominanceError::BadAgent(i));
    }
    Ok(())
}

/// No choice of agent `i` at `mom` strictly dominates another.
pub fn collapse(m: &UtilModel, mom: MomentId, i: AgentId) -> Result<bool, DominanceError> {
    check(m, mom, i)?;
    Ok(!m.dominance(mom, i).has_strict_pair())
}

/// An extension inside the moment that agent `i` is obliged to bring about
/// without it being settled: the union of the undominated choices.
pub fn deliberative_possible(
    m: &UtilModel,
    mom: MomentId,
    i: AgentId,
) -> Result<Option<WorldSet>, DominanceError> {
    check(m, mom, i)?;
    let table = m.dominance(mom, i);
    let mut e = m.frame().empty_set();
    for k in table.undominated() {
        e.union_with(&table.cells[k]);
    }
    let moment = m.frame().moment(mom);
    if moment.is_subset(&e) || !table.obliges(&e) {
        return Ok(None);
    }
    Ok(Some(e))
}

/// Sweeps every extension inside the moment and reports whether the
/// obligation clause agrees with settledness on all of them.
pub fn collapse_by_sweep(m: &UtilModel, mom: MomentId, i: AgentId) -> Result<bool, CtdError> {
    check(m, mom, i)?;
    let f = m.frame();
    let members: Vec<WorldId> = f.moment(mom).ones().collect();
    if members.len() > MAX_SWEEP {
        return Err(CtdError::TooLarge(members.len()));
    }
    let anchor = members[0];
    for bits in 0u32..1 << members.len() {
        let mut e = f.empty_set();
        for (k, &w) in members.iter().enumerate() {
            if bits & (1 << k) != 0 {
                e.insert(w);
            }
        }
        let ought = m.ought_extension(i, &e).contains(anchor);
        let settled = box_extension(f, &e).contains(anchor);
        if ought != settled {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum UtilityProfile {
    AllZero,
    AllOne,
    Constant(u64),
    Mixed,
}

fn profile(values: impl IntoIterator<Item = u64>) -> UtilityProfile {
    let mut seen = BTreeSet::new();
    seen.extend(values);
    match (seen.len(), seen.first()) {
        (1, Some(0)) => UtilityProfile::AllZero,
        (1, Some(1)) => UtilityProfile::AllOne,
        (1, Some(&u)) => UtilityProfile::Constant(u),
        _ => UtilityProfile::Mixed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentDiagnosis {
    pub moment: MomentId,
    pub profile: UtilityProfile,
    /// Per agent, in agent order.
    pub collapse: Vec<bool>,
    /// Per agent, an extension witnessing a violable obligation.
    pub deliberative: Vec<Option<WorldSet>>,
}

pub fn diagnose(m: &UtilModel, mom: MomentId) -> Result<MomentDiagnosis, DominanceError> {
    let f = m.frame();
    if mom.0 >= f.moment_count() {
        return Err(DominanceError::BadMoment(mom.0));
    }
    let mut collapse_flags = Vec::with_capacity(f.agents());
    let mut deliberative = Vec::with_capacity(f.agents());
    for i in 1..=f.agents() {
        collapse_flags.push(collapse(m, mom, i)?);
        deliberative.push(deliberative_possible(m, mom, i)?);
    }
    Ok(MomentDiagnosis {
        moment: mom,
        profile: profile(f.moment(mom).ones().map(|w| m.util(w))),
        collapse: collapse_flags,
        deliberative,
    })
}

/// Diagnosis of every moment, in moment order.
pub fn future_collapse_report(m: &UtilModel) -> Vec<MomentDiagnosis> {
    m.frame()
        .moment_ids()
        .map(|mom| diagnose(m, mom).expect("moment ids come from the frame"))
        .collect()
}

/// A future edge along which utility changes, if any.
pub fn history_break(m: &UtilModel) -> Option<(WorldId, WorldId)> {
    m.frame()
        .future_edges()
        .into_iter()
        .find(|&(w, v)| m.util(w) != m.util(v))
}

/// Utility is constant along every history.
pub fn history_constant(m: &UtilModel) -> bool {
    history_break(m).is_none()
}

/// How a joint choice of the census grid is valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellValue {
    AllOne,
    AllZero,
    Mixed,
}

impl CellValue {
    fn symbol(self) -> &'static str {
        match self {
            CellValue::AllOne => "∀1",
            CellValue::AllZero => "∀0",
            CellValue::Mixed => "∃1∃0",
        }
    }
}

/// The three shapes in which both agents can bear a violable obligation
/// towards one shared goal, each in its canonical orientation: the
/// joint choice of both optimal cells top left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    /// Every joint choice with an optimal cell is all 1; the remaining one
    /// has some 0.
    OptimalAllOne,
    /// The optimal overlap has some 1; everything else is all 0.
    OthersAllZero,
    /// All 1 at the optimal overlap, all 0 opposite, mixed in between.
    MixedOffDiagonal,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [
        Scenario::OptimalAllOne,
        Scenario::OthersAllZero,
        Scenario::MixedOffDiagonal,
    ];

    /// Whether grid `g` (top left, top right, bottom left, bottom right)
    /// fits this shape in canonical orientation.
    fn fits(self, g: [CellValue; 4]) -> bool {
        use CellValue::*;
        match self {
            Scenario::OptimalAllOne => {
                g[0] == AllOne && g[1] == AllOne && g[2] == AllOne && g[3] != AllOne
            }
            Scenario::OthersAllZero => {
                g[0] != AllZero && g[1] == AllZero && g[2] == AllZero && g[3] == AllZero
            }
            Scenario::MixedOffDiagonal => {
                g[0] == AllOne && g[1] == Mixed && g[2] == Mixed && g[3] == AllZero
            }
        }
    }
}

/// Relabelings of the grid: swapping either agent's two choices and
/// swapping the agents.
fn symmetries(g: [CellValue; 4]) -> Vec<[CellValue; 4]> {
    let swap_rows = |g: [CellValue; 4]| [g[2], g[3], g[0], g[1]];
    let swap_cols = |g: [CellValue; 4]| [g[1], g[0], g[3], g[2]];
    let transpose = |g: [CellValue; 4]| [g[0], g[2], g[1], g[3]];
    let mut out = Vec::with_capacity(8);
    for t in [false, true] {
        for r in [false, true] {
            for c in [false, true] {
                let mut h = g;
                if t {
                    h = transpose(h);
                }
                if r {
                    h = swap_rows(h);
                }
                if c {
                    h = swap_cols(h);
                }
                out.push(h);
            }
        }
    }
    out
}

pub fn classify(g: [CellValue; 4]) -> Option<Scenario> {
    let orientations = symmetries(g);
    Scenario::ALL
        .into_iter()
        .find(|s| orientations.iter().any(|&h| s.fits(h)))
}

/// The census moment: two agents with two choices each and `k` worlds per
/// joint choice. Worlds are named after their joint choice (`a` top left,
/// `b` top right, `c` bottom left, `d` bottom right) and index. Agent 1
/// chooses the row, agent 2 the column.
pub fn grid_frame(k: usize) -> Frame {
    let labels = ['a', 'b', 'c', 'd'];
    let id = |cell: usize, t: usize| cell * k + t;
    let block = |cells: &[usize]| -> Vec<WorldId> {
        cells
            .iter()
            .flat_map(|&c| (0..k).map(move |t| id(c, t)))
            .collect()
    };
    let parts = FrameParts {
        agents: 2,
        worlds: (0..4)
            .flat_map(|c| (0..k).map(move |t| format!("{}{t}", labels[c])))
            .collect(),
        moments: vec![block(&[0, 1, 2, 3])],
        choice: vec![vec![
            vec![block(&[0, 1]), block(&[2, 3])],
            vec![block(&[0, 2]), block(&[1, 3])],
        ]],
        grand: vec![(0..4).map(|c| block(&[c])).collect()],
        future: Vec::new(),
        valuation: Default::default(),
    };
    Frame::new(parts).expect("census grid is well formed")
}

/// An extension `E` with `O{1} E & O{2} E & ~box E` true on the grid, if
/// one exists.
pub fn joint_violable(m: &UtilModel) -> Option<WorldSet> {
    let f = m.frame();
    let n = f.world_count();
    let mom = MomentId(0);
    (0u32..1 << n).find_map(|bits| {
        let e = f.set((0..n).filter(|&w| bits & (1 << w) != 0));
        let ok = !f.moment(mom).is_subset(&e)
            && m.dominance(mom, 1).obliges(&e)
            && m.dominance(mom, 2).obliges(&e);
        ok.then_some(e)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    /// Utility per world of the grid.
    pub assignment: Vec<u64>,
    pub grid: [CellValue; 4],
    /// A jointly obligatory, unsettled extension, if any.
    pub witness: Option<WorldSet>,
    pub scenario: Option<Scenario>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub worlds_per_cell: usize,
    pub entries: Vec<CensusEntry>,
}

impl Census {
    pub fn satisfiable(&self) -> impl Iterator<Item = &CensusEntry> {
        self.entries.iter().filter(|e| e.witness.is_some())
    }

    /// Scenarios met by at least one satisfiable assignment.
    pub fn scenarios_found(&self) -> BTreeSet<Scenario> {
        self.satisfiable().filter_map(|e| e.scenario).collect()
    }

    /// Satisfiable assignments that fit none of the three scenarios.
    pub fn unmatched(&self) -> Vec<&CensusEntry> {
        self.satisfiable()
            .filter(|e| e.scenario.is_none())
            .collect()
    }

    /// Every satisfiable assignment fits a scenario and every scenario is
    /// met.
    pub fn reproduces_all_scenarios(&self) -> bool {
        self.unmatched().is_empty() && self.scenarios_found().len() == Scenario::ALL.len()
    }
}

pub fn grid_values(k: usize, util: &[u64]) -> [CellValue; 4] {
    let mut g = [CellValue::Mixed; 4];
    for (c, slot) in g.iter_mut().enumerate() {
        let vals = &util[c * k..(c + 1) * k];
        *slot = if vals.iter().all(|&u| u == 1) {
            CellValue::AllOne
        } else if vals.iter().all(|&u| u == 0) {
            CellValue::AllZero
        } else {
            CellValue::Mixed
        };
    }
    g
}

/// Every binary utility assignment on the census grid with `k` worlds per
/// joint choice, each with its satisfiability verdict and scenario.
pub fn fig1_census(k: usize) -> Result<Census, CtdError> {
    if !(1..=3).contains(&k) {
        return Err(CtdError::CensusSize(k));
    }
    let frame = grid_frame(k);
    let n = 4 * k;
    let mut entries = Vec::with_capacity(1 << n);
    for bits in 0u32..1 << n {
        let util: Vec<u64> = (0..n).map(|w| u64::from(bits & (1 << w) != 0)).collect();
        let m = UtilModel::new(frame.clone(), util.clone()).expect("utility covers the grid");
        let witness = joint_violable(&m);
        let grid = grid_values(k, &util);
        entries.push(CensusEntry {
            assignment: util,
            grid,
            scenario: witness.as_ref().and_then(|_| classify(grid)),
            witness,
        });
    }
    Ok(Census {
        worlds_per_cell: k,
        entries,
    })
}

/// A model of `scenario` on the census grid together with an extension
/// jointly obligatory for both agents and not settled.
pub fn scenario_fixture(scenario: Scenario) -> (UtilModel, WorldSet) {
    let (k, util): (usize, Vec<u64>) = match scenario {
        Scenario::OptimalAllOne => (1, vec![1, 1, 1, 0]),
        Scenario::OthersAllZero => (1, vec![1, 0, 0, 0]),
        Scenario::MixedOffDiagonal => (2, vec![1, 1, 1, 0, 1, 0, 0, 0]),
    };
    let frame = grid_frame(k);
    // top row and left column: both agents' optimal choices
    let goal = frame.set((0..3 * k).collect::<Vec<_>>());
    let m = UtilModel::new(frame, util).expect("utility covers the grid");
    (m, goal)
}

/// Human-readable rendering of a census grid.
pub fn render_grid(g: [CellValue; 4]) -> String {
    format!(
        "[{} {} / {} {}]",
        g[0].symbol(),
        g[1].symbol(),
        g[2].symbol(),
        g[3].symbol()
    )
}
