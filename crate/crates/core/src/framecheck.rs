//! Frame condition validation.
//!
//! Every check works on the relational views of the model (classes of
//! worlds under each relation) and reports violations as data, each with a
//! tuple of witness worlds that suffices to re-verify it by hand.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dominance::state_at;
use crate::model::{Frame, Model, MomentId, NeutralModel, UtilModel, WorldId};
use crate::syntax::AgentId;
use crate::WorldSet;

/// The conditions a frame can violate. Ordering is report ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Choice classes are partitions of their moment.
    C1,
    /// Independence of agents.
    C2,
    /// Grand coalition cells lie inside every agent's cell.
    C3,
    /// Linear future.
    T4,
    /// Linear past.
    T5,
    /// No choice between undivided histories.
    T6,
    /// Temporal irreflexivity of moments.
    T7,
    /// Transitivity of the future relation.
    Trans,
    /// Every world has a future.
    Ser,
    /// Ideal worlds lie in the current moment.
    D8,
    /// Some whole choice is ideal.
    D9,
    /// Ideal worlds do not depend on the world within a moment.
    D10,
    /// Ideal worlds come in whole choices.
    D11,
    L8_1,
    L8_2,
    L8_3,
    L8_4,
    L8_5,
}

impl Condition {
    pub const MUTABLE: [Condition; 11] = [
        Condition::C1,
        Condition::C2,
        Condition::C3,
        Condition::T4,
        Condition::T5,
        Condition::T6,
        Condition::T7,
        Condition::D8,
        Condition::D9,
        Condition::D10,
        Condition::D11,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::T4 => "T4",
            Condition::T5 => "T5",
            Condition::T6 => "T6",
            Condition::T7 => "T7",
            Condition::Trans => "TRANS",
            Condition::Ser => "SER",
            Condition::D8 => "D8",
            Condition::D9 => "D9",
            Condition::D10 => "D10",
            Condition::D11 => "D11",
            Condition::L8_1 => "L8-1",
            Condition::L8_2 => "L8-2",
            Condition::L8_3 => "L8-3",
            Condition::L8_4 => "L8-4",
            Condition::L8_5 => "L8-5",
        }
    }

    pub fn from_id(s: &str) -> Option<Condition> {
        [
            Condition::C1,
            Condition::C2,
            Condition::C3,
            Condition::T4,
            Condition::T5,
            Condition::T6,
            Condition::T7,
            Condition::Trans,
            Condition::Ser,
            Condition::D8,
            Condition::D9,
            Condition::D10,
            Condition::D11,
            Condition::L8_1,
            Condition::L8_2,
            Condition::L8_3,
            Condition::L8_4,
            Condition::L8_5,
        ]
        .into_iter()
        .find(|c| c.id().eq_ignore_ascii_case(s))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Violation,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub condition: Condition,
    pub severity: Severity,
    pub agent: Option<AgentId>,
    pub witnesses: Vec<WorldId>,
    pub message: String,
}

/// How to treat worlds without a future.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HorizonMode {
    /// Terminal moments are expected; missing successors are warnings.
    #[default]
    Finite,
    /// Seriality is a hard condition.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    fn finish(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        CheckReport { violations }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_violations(&self) -> bool {
        self.violations
            .iter()
            .any(|v| v.severity == Severity::Violation)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Warning)
    }

    /// Conditions with at least one hard violation.
    pub fn violated(&self) -> BTreeSet<Condition> {
        self.violations
            .iter()
            .filter(|v| v.severity == Severity::Violation)
            .map(|v| v.condition)
            .collect()
    }

    pub fn flags(&self, c: Condition) -> bool {
        self.violated().contains(&c)
    }

    /// 0 when clean, 1 with warnings only, 2 with violations.
    pub fn exit_code(&self) -> i32 {
        if self.has_violations() {
            2
        } else if self.violations.is_empty() {
            0
        } else {
            1
        }
    }

    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        self.violations.extend(other.violations);
        CheckReport::finish(self.violations)
    }
}

struct Sink<'f> {
    frame: &'f Frame,
    out: Vec<Violation>,
}

impl<'f> Sink<'f> {
    fn push(
        &mut self,
        condition: Condition,
        agent: Option<AgentId>,
        witnesses: Vec<WorldId>,
        message: String,
    ) {
        self.push_with(condition, Severity::Violation, agent, witnesses, message);
    }

    fn push_with(
        &mut self,
        condition: Condition,
        severity: Severity,
        agent: Option<AgentId>,
        witnesses: Vec<WorldId>,
        message: String,
    ) {
        self.out.push(Violation {
            condition,
            severity,
            agent,
            witnesses,
            message,
        });
    }

    fn n(&self, w: WorldId) -> &'f str {
        self.frame.name(w)
    }
}

/// Models whose frame conditions can be checked.
pub trait FrameConditions: Model {
    /// Deontic conditions beyond the shared skeleton.
    fn deontic_violations(&self) -> Vec<Violation> {
        Vec::new()
    }
}

impl FrameConditions for UtilModel {}

impl FrameConditions for NeutralModel {
    fn deontic_violations(&self) -> Vec<Violation> {
        let mut sink = Sink {
            frame: self.frame(),
            out: Vec::new(),
        };
        check_deontic(self, &mut sink);
        sink.out
    }
}

pub fn check_frame<M: FrameConditions>(m: &M, mode: HorizonMode) -> CheckReport {
    let mut sink = Sink {
        frame: m.frame(),
        out: Vec::new(),
    };
    check_partitions(&mut sink);
    check_independence(&mut sink);
    check_grand(&mut sink);
    check_temporal(&mut sink, mode);
    let mut out = sink.out;
    out.extend(m.deontic_violations());
    CheckReport::finish(out)
}

/// Shape checks on one list of cells meant to partition a moment.
fn partition_problems(
    sink: &mut Sink<'_>,
    condition: Condition,
    agent: Option<AgentId>,
    m: MomentId,
    cells: &[WorldSet],
) {
    let frame = sink.frame;
    let moment = frame.moment(m);
    let who = match agent {
        Some(i) => format!("agent {i}"),
        None => String::from("grand coalition"),
    };
    let anchor = moment.minimum().unwrap_or(0);
    let mut covered = frame.empty_set();
    for (k, cell) in cells.iter().enumerate() {
        if cell.is_clear() {
            sink.push(
                condition,
                agent,
                vec![anchor],
                format!(
                    "{who}: cell {k} at the moment of {} is empty",
                    sink.n(anchor)
                ),
            );
        }
        for x in cell.difference(moment) {
            sink.push(
                condition,
                agent,
                vec![anchor, x],
                format!(
                    "{who}: cell {k} at the moment of {} contains {} from another moment",
                    sink.n(anchor),
                    sink.n(x)
                ),
            );
        }
        for x in cell.intersection(&covered) {
            sink.push(
                condition,
                agent,
                vec![x],
                format!("{who}: {} lies in more than one cell", sink.n(x)),
            );
        }
        covered.union_with(cell);
    }
    for x in moment.difference(&covered) {
        sink.push(
            condition,
            agent,
            vec![x],
            format!("{who}: {} lies in no cell of its moment", sink.n(x)),
        );
    }
}

fn check_partitions(sink: &mut Sink<'_>) {
    let frame = sink.frame;
    for m in frame.moment_ids() {
        for i in 1..=frame.agents() {
            partition_problems(sink, Condition::C1, Some(i), m, frame.cells(m, i));
        }
        partition_problems(sink, Condition::C3, None, m, frame.grand_cells(m));
    }
    // Choice classes reaching outside the settledness class. Cells listed
    // under another moment are caught here as well.
    for i in 1..=frame.agents() {
        for w in frame.worlds() {
            for v in frame.agent_class(i, w).difference(frame.box_class(w)) {
                sink.push(
                    Condition::C1,
                    Some(i),
                    vec![w, v],
                    format!(
                        "agent {i}: {} chooses alongside {} from another moment",
                        sink.n(w),
                        sink.n(v)
                    ),
                );
            }
        }
    }
}

fn check_independence(sink: &mut Sink<'_>) {
    let frame = sink.frame;
    let n = frame.agents();
    for m in frame.moment_ids() {
        let reps: Vec<Vec<WorldId>> = (1..=n)
            .map(|i| {
                frame
                    .cells(m, i)
                    .iter()
                    .filter_map(|c| c.minimum())
                    .collect()
            })
            .collect();
        if reps.iter().any(Vec::is_empty) {
            continue;
        }
        let mut idx = vec![0usize; n];
        loop {
            let tuple: Vec<WorldId> = (0..n).map(|a| reps[a][idx[a]]).collect();
            let mut meet = frame.agent_class(1, tuple[0]).clone();
            for (a, &u) in tuple.iter().enumerate().skip(1) {
                meet.intersect_with(frame.agent_class(a + 1, u));
            }
            if meet.is_clear() {
                let names: Vec<&str> = tuple.iter().map(|&u| sink.n(u)).collect();
                sink.push(
                    Condition::C2,
                    None,
                    tuple.clone(),
                    format!(
                        "the choices of {} have no world in common",
                        names.join(", ")
                    ),
                );
            }
            // odometer
            let mut a = 0;
            loop {
                if a == n {
                    break;
                }
                idx[a] += 1;
                if idx[a] < reps[a].len() {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == n {
                break;
            }
        }
    }
}

fn check_grand(sink: &mut Sink<'_>) {
    let frame = sink.frame;
    for w in frame.worlds() {
        for i in 1..=frame.agents() {
            for v in frame.grand_class(w).difference(frame.agent_class(i, w)) {
                sink.push(
                    Condition::C3,
                    Some(i),
                    vec![w, v],
                    format!(
                        "grand coalition cell of {} contains {} outside agent {i}'s cell",
                        sink.n(w),
                        sink.n(v)
                    ),
                );
            }
        }
    }
}

fn related(frame: &Frame, u: WorldId, v: WorldId) -> bool {
    u == v || frame.succ(u).contains(v) || frame.succ(v).contains(u)
}

fn check_temporal(sink: &mut Sink<'_>, mode: HorizonMode) {
    let frame = sink.frame;
    let preds: Vec<WorldSet> = frame
        .worlds()
        .map(|w| frame.h_predecessors(w).unwrap_or_default())
        .collect();
    for w in frame.worlds() {
        let succ: Vec<WorldId> = frame.succ(w).ones().collect();
        for (a, &u) in succ.iter().enumerate() {
            for &v in &succ[a + 1..] {
                if !related(frame, u, v) {
                    sink.push(
                        Condition::T4,
                        None,
                        vec![w, u, v],
                        format!(
                            "futures {} and {} of {} are unordered",
                            sink.n(u),
                            sink.n(v),
                            sink.n(w)
                        ),
                    );
                }
            }
        }
        let pred: Vec<WorldId> = preds[w].ones().collect();
        for (a, &u) in pred.iter().enumerate() {
            for &v in &pred[a + 1..] {
                if !related(frame, u, v) {
                    sink.push(
                        Condition::T5,
                        None,
                        vec![w, u, v],
                        format!(
                            "pasts {} and {} of {} are unordered",
                            sink.n(u),
                            sink.n(v),
                            sink.n(w)
                        ),
                    );
                }
            }
        }
        for u in frame.succ(w).ones() {
            for v in frame.box_class(u).ones() {
                if frame
                    .grand_class(w)
                    .intersection(&preds[v])
                    .next()
                    .is_none()
                {
                    sink.push(
                        Condition::T6,
                        None,
                        vec![w, u, v],
                        format!(
                            "{} reaches {} whose moment holds {}, but nothing in its grand cell precedes {}",
                            sink.n(w),
                            sink.n(u),
                            sink.n(v),
                            sink.n(v)
                        ),
                    );
                }
            }
            for v in frame.succ(u).difference(frame.succ(w)) {
                sink.push(
                    Condition::Trans,
                    None,
                    vec![w, u, v],
                    format!(
                        "{} -> {} -> {} without {} -> {}",
                        sink.n(w),
                        sink.n(u),
                        sink.n(v),
                        sink.n(w),
                        sink.n(v)
                    ),
                );
            }
        }
        for u in frame.succ(w).intersection(frame.box_class(w)) {
            sink.push(
                Condition::T7,
                None,
                vec![w, u],
                format!(
                    "{} lies in its own moment's future via {}",
                    sink.n(w),
                    sink.n(u)
                ),
            );
        }
    }
    for m in frame.moment_ids() {
        let terminal: Vec<WorldId> = frame
            .moment(m)
            .ones()
            .filter(|&w| frame.succ(w).is_clear())
            .collect();
        if terminal.is_empty() {
            continue;
        }
        let severity = match mode {
            HorizonMode::Finite => Severity::Warning,
            HorizonMode::Strict => Severity::Violation,
        };
        let count = terminal.len();
        sink.push_with(
            Condition::Ser,
            severity,
            None,
            terminal,
            format!(
                "moment {} is terminal: {count} world(s) without a future",
                m.0
            ),
        );
    }
}

fn check_deontic(m: &NeutralModel, sink: &mut Sink<'_>) {
    let frame = m.frame();
    for i in 1..=frame.agents() {
        for w in frame.worlds() {
            let ideal = m.ought(i, w);
            let moment = frame.box_class(w);
            for v in ideal.difference(moment) {
                sink.push(
                    Condition::D8,
                    Some(i),
                    vec![w, v],
                    format!(
                        "{} sees ideal world {} outside its moment",
                        sink.n(w),
                        sink.n(v)
                    ),
                );
            }
            if !moment
                .ones()
                .any(|v| frame.agent_class(i, v).is_subset(ideal))
            {
                sink.push(
                    Condition::D9,
                    Some(i),
                    vec![w],
                    format!("no choice at the moment of {} is wholly ideal", sink.n(w)),
                );
            }
            for u in moment.ones() {
                for z in m.ought(i, u).difference(ideal) {
                    sink.push(
                        Condition::D10,
                        Some(i),
                        vec![w, u, z],
                        format!(
                            "{} is ideal from {} but not from {}",
                            sink.n(z),
                            sink.n(u),
                            sink.n(w)
                        ),
                    );
                }
            }
            for v in ideal.ones() {
                let extends = moment.ones().any(|u| {
                    frame.agent_class(i, u).contains(v) && frame.agent_class(i, u).is_subset(ideal)
                });
                if !extends {
                    sink.push(
                        Condition::D11,
                        Some(i),
                        vec![w, v],
                        format!(
                            "ideal world {} (seen from {}) is not part of a wholly ideal choice",
                            sink.n(v),
                            sink.n(w)
                        ),
                    );
                }
            }
        }
    }
}

/// Checks the structural facts every valid frame enjoys: stability of
/// each class across its members, and that every choice is either wholly
/// ideal or wholly non-ideal.
pub fn check_lemma8(m: &NeutralModel) -> CheckReport {
    let frame = m.frame();
    let mut sink = Sink {
        frame,
        out: Vec::new(),
    };
    for w in frame.worlds() {
        for v in frame.box_class(w).ones() {
            if frame.box_class(v) != frame.box_class(w) {
                sink.push(
                    Condition::L8_1,
                    None,
                    vec![w, v],
                    format!("moments of {} and {} differ", sink.n(w), sink.n(v)),
                );
            }
        }
        for i in 1..=frame.agents() {
            for v in frame.agent_class(i, w).ones() {
                if frame.agent_class(i, v) != frame.agent_class(i, w) {
                    sink.push(
                        Condition::L8_2,
                        Some(i),
                        vec![w, v],
                        format!("choice classes of {} and {} differ", sink.n(w), sink.n(v)),
                    );
                }
            }
            let state = state_at(frame, i, w);
            for v in state.ones() {
                if state_at(frame, i, v) != state {
                    sink.push(
                        Condition::L8_3,
                        Some(i),
                        vec![w, v],
                        format!("states of {} and {} differ", sink.n(w), sink.n(v)),
                    );
                }
            }
            for v in frame.box_class(w).ones() {
                if m.ought(i, v) != m.ought(i, w) {
                    sink.push(
                        Condition::L8_4,
                        Some(i),
                        vec![w, v],
                        format!(
                            "ideal worlds seen from {} and {} differ",
                            sink.n(w),
                            sink.n(v)
                        ),
                    );
                }
            }
            let ideal = m.ought(i, w);
            for z in frame.box_class(w).ones() {
                let cell = frame.agent_class(i, z);
                let inside = cell.is_subset(ideal);
                let disjoint = cell.is_disjoint(ideal);
                if !inside && !disjoint {
                    sink.push(
                        Condition::L8_5,
                        Some(i),
                        vec![w, z],
                        format!(
                            "choice of {} is partly ideal as seen from {}",
                            sink.n(z),
                            sink.n(w)
                        ),
                    );
                }
            }
        }
    }
    CheckReport::finish(sink.out)
}
