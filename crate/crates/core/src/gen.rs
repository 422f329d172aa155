//! Seeded generation of valid models, targeted mutations and the
//! valuation used by the irreflexivity rule.
//!
//! Models are unravelled trees of histories. With `d` moment levels and
//! `P = c_1 * ... * c_n` action profiles, a history is a sequence of
//! `d - 1` profiles and a world is a pair (prefix of a history, history).
//! Worlds sharing a prefix form a moment; the next profile on the history
//! determines the grand coalition cell and its digits the agents' cells.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::framecheck::{check_frame, Condition, HorizonMode};
use crate::model::{
    transitive_closure, Frame, FrameParts, Model, ModelError, NeutralModel, WorldId,
};
use crate::syntax::Formula;

/// Largest model the generator will build.
pub const MAX_WORLDS: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub agents: usize,
    /// Number of moment levels; 1 gives a single moment.
    pub depth: usize,
    /// Choices per agent at each internal moment.
    pub choices: Vec<usize>,
    pub seed: u64,
    pub valuation_density: f64,
    pub ideal_density: f64,
    pub vars: Vec<String>,
}

impl GenParams {
    pub fn new(agents: usize, depth: usize, choices: Vec<usize>, seed: u64) -> Self {
        GenParams {
            agents,
            depth,
            choices,
            seed,
            valuation_density: 0.5,
            ideal_density: 0.5,
            vars: vec!["p".into(), "q".into()],
        }
    }

    /// Two agents, two choices each, two moment levels.
    pub fn standard(seed: u64) -> Self {
        GenParams::new(2, 2, vec![2, 2], seed)
    }

    pub fn profiles(&self) -> usize {
        self.choices.iter().product()
    }

    /// Number of worlds the construction produces, if it fits in `usize`.
    pub fn world_count(&self) -> Option<usize> {
        let p = self.profiles();
        if self.depth <= 1 {
            return Some(p);
        }
        let mut per_level: usize = 1;
        for _ in 0..self.depth - 1 {
            per_level = per_level.checked_mul(p)?;
        }
        per_level.checked_mul(self.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("model would have more than {max} worlds")]
    TooLarge { max: usize },
    #[error("{0} is not a mutation target")]
    NotMutable(Condition),
    #[error("no edit of this model produces a {0} violation")]
    Unreachable(Condition),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn validate(p: &GenParams) -> Result<usize, GenError> {
    if p.agents == 0 {
        return Err(GenError::InvalidParams("need at least one agent".into()));
    }
    if p.depth == 0 {
        return Err(GenError::InvalidParams("depth must be at least 1".into()));
    }
    if p.choices.len() != p.agents {
        return Err(GenError::InvalidParams(format!(
            "{} choice counts given for {} agents",
            p.choices.len(),
            p.agents
        )));
    }
    if p.choices.contains(&0) {
        return Err(GenError::InvalidParams(
            "choice counts must be positive".into(),
        ));
    }
    for d in [p.valuation_density, p.ideal_density] {
        if !(0.0..=1.0).contains(&d) {
            return Err(GenError::InvalidParams(format!(
                "density {d} outside [0, 1]"
            )));
        }
    }
    match p.world_count() {
        Some(n) if n <= MAX_WORLDS => Ok(n),
        _ => Err(GenError::TooLarge { max: MAX_WORLDS }),
    }
}

/// Agent digits of a profile index; agent 1 is most significant.
fn digits(choices: &[usize], mut profile: usize) -> Vec<usize> {
    let mut out = vec![0; choices.len()];
    for (a, &c) in choices.iter().enumerate().rev() {
        out[a] = profile % c;
        profile /= c;
    }
    out
}

fn profile_label(choices: &[usize], profile: usize) -> String {
    let wide = choices.iter().any(|&c| c > 10);
    let parts: Vec<String> = digits(choices, profile)
        .iter()
        .map(|d| d.to_string())
        .collect();
    if wide {
        parts.join(".")
    } else {
        parts.concat()
    }
}

/// All sequences of `len` profiles in lexicographic order.
fn histories(profiles: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * profiles);
        for h in &out {
            for x in 0..profiles {
                let mut e = h.clone();
                e.push(x);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// The skeleton for `p`, without valuation.
fn skeleton(p: &GenParams) -> FrameParts {
    let profiles = p.profiles();
    let n = p.agents;
    if p.depth == 1 {
        let worlds: Vec<String> = (0..profiles)
            .map(|x| format!("w{}", profile_label(&p.choices, x)))
            .collect();
        let choice = (0..n)
            .map(|a| {
                (0..p.choices[a])
                    .map(|k| {
                        (0..profiles)
                            .filter(|&x| digits(&p.choices, x)[a] == k)
                            .collect()
                    })
                    .collect()
            })
            .collect();
        return FrameParts {
            agents: n,
            worlds,
            moments: vec![(0..profiles).collect()],
            choice: vec![choice],
            grand: vec![(0..profiles).map(|x| vec![x]).collect()],
            future: Vec::new(),
            valuation: BTreeMap::new(),
        };
    }

    let len = p.depth - 1;
    let hs = histories(profiles, len);
    let per_level = hs.len();
    let id = |level: usize, h: usize| level * per_level + h;
    let mut worlds = Vec::with_capacity(per_level * p.depth);
    for level in 0..p.depth {
        for h in &hs {
            let labels: Vec<String> = h.iter().map(|&x| profile_label(&p.choices, x)).collect();
            worlds.push(format!("w{level}_{}", labels.join("_")));
        }
    }

    let mut moments = Vec::new();
    let mut choice = Vec::new();
    let mut grand = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for level in 0..p.depth {
        // histories sharing a prefix of this length are contiguous
        let block = profiles.pow((len - level) as u32);
        for start in (0..per_level).step_by(block) {
            let members: Vec<usize> = (start..start + block).collect();
            moments.push(members.iter().map(|&h| id(level, h)).collect::<Vec<_>>());
            if level == len {
                let all: Vec<WorldId> = members.iter().map(|&h| id(level, h)).collect();
                choice.push(vec![vec![all.clone()]; n]);
                grand.push(vec![all]);
                continue;
            }
            let mut per_agent = Vec::with_capacity(n);
            for a in 0..n {
                let cells = (0..p.choices[a])
                    .map(|k| {
                        members
                            .iter()
                            .filter(|&&h| digits(&p.choices, hs[h][level])[a] == k)
                            .map(|&h| id(level, h))
                            .collect()
                    })
                    .collect();
                per_agent.push(cells);
            }
            choice.push(per_agent);
            grand.push(
                (0..profiles)
                    .map(|x| {
                        members
                            .iter()
                            .filter(|&&h| hs[h][level] == x)
                            .map(|&h| id(level, h))
                            .collect()
                    })
                    .collect(),
            );
        }
    }

    let mut future = Vec::new();
    for level in 0..p.depth {
        for later in level + 1..p.depth {
            for h in 0..per_level {
                future.push((id(level, h), id(later, h)));
            }
        }
    }

    FrameParts {
        agents: n,
        worlds,
        moments,
        choice,
        grand,
        future,
        valuation: BTreeMap::new(),
    }
}

pub fn gen_model(p: &GenParams) -> Result<NeutralModel, GenError> {
    let n = validate(p)?;
    let mut parts = skeleton(p);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);

    let mut ideal = Vec::with_capacity(parts.moments.len());
    for cells_per_agent in &parts.choice {
        let mut row = Vec::with_capacity(p.agents);
        for cells in cells_per_agent {
            let mut chosen: Vec<bool> = cells
                .iter()
                .map(|_| rng.random_bool(p.ideal_density))
                .collect();
            if !chosen.contains(&true) {
                let k = rng.random_range(0..cells.len());
                chosen[k] = true;
            }
            let worlds: Vec<WorldId> = cells
                .iter()
                .zip(&chosen)
                .filter(|(_, &c)| c)
                .flat_map(|(cell, _)| cell.iter().copied())
                .collect();
            row.push(worlds);
        }
        ideal.push(row);
    }
    for var in &p.vars {
        let ws: Vec<WorldId> = (0..n)
            .filter(|_| rng.random_bool(p.valuation_density))
            .collect();
        parts.valuation.insert(var.clone(), ws);
    }
    let frame = Frame::new(parts)?;
    Ok(NeutralModel::from_ideal(frame, &ideal)?)
}

/// Sets `p` true exactly outside the moment of `w`, so that
/// `box ~p & box (G p & H p)` holds at `w` on temporally irreflexive frames.
pub fn irr_valuation<M: Model + Clone>(m: &M, w: WorldId, p: &str) -> Result<M, ModelError> {
    let f = m.frame();
    f.moment_of(w)?;
    let mut out = f.all_worlds();
    out.difference_with(f.box_class(w));
    let mut copy = m.clone();
    copy.frame_mut().set_valuation(p, out);
    Ok(copy)
}

/// A single edit to a neutral model.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Edit {
    AddToCell {
        moment: usize,
        agent: usize,
        cell: usize,
        world: WorldId,
    },
    RemoveFromCell {
        moment: usize,
        agent: usize,
        cell: usize,
        world: WorldId,
    },
    MoveBetweenCells {
        moment: usize,
        agent: usize,
        from: usize,
        to: usize,
        world: WorldId,
    },
    AddToGrand {
        moment: usize,
        cell: usize,
        world: WorldId,
    },
    AddEdge(WorldId, WorldId),
    /// Replace what every world of the moment sees as ideal for the agent.
    SetIdeal {
        moment: usize,
        agent: usize,
        worlds: Vec<WorldId>,
    },
    /// Flip one deontic edge of a single world.
    ToggleOught {
        agent: usize,
        from: WorldId,
        to: WorldId,
    },
}

fn apply(m: &NeutralModel, edit: &Edit) -> Result<NeutralModel, ModelError> {
    let mut parts = m.frame().to_parts();
    let mut ought = m.ought_edges();
    match edit {
        Edit::AddToCell {
            moment,
            agent,
            cell,
            world,
        } => {
            parts.choice[*moment][agent - 1][*cell].push(*world);
        }
        Edit::RemoveFromCell {
            moment,
            agent,
            cell,
            world,
        } => {
            parts.choice[*moment][agent - 1][*cell].retain(|x| x != world);
        }
        Edit::MoveBetweenCells {
            moment,
            agent,
            from,
            to,
            world,
        } => {
            let cells = &mut parts.choice[*moment][agent - 1];
            cells[*from].retain(|x| x != world);
            cells[*to].push(*world);
        }
        Edit::AddToGrand {
            moment,
            cell,
            world,
        } => {
            parts.grand[*moment][*cell].push(*world);
        }
        Edit::AddEdge(w, v) => {
            parts.future.push((*w, *v));
            parts.future = transitive_closure(parts.worlds.len(), &parts.future);
        }
        Edit::SetIdeal {
            moment,
            agent,
            worlds,
        } => {
            let members = &parts.moments[*moment];
            let list = &mut ought[agent - 1];
            list.retain(|(w, _)| !members.contains(w));
            for &w in members {
                list.extend(worlds.iter().map(|&v| (w, v)));
            }
        }
        Edit::ToggleOught { agent, from, to } => {
            let list = &mut ought[agent - 1];
            if let Some(k) = list.iter().position(|e| *e == (*from, *to)) {
                list.remove(k);
            } else {
                list.push((*from, *to));
            }
        }
    }
    NeutralModel::from_ought_edges(Frame::new(parts)?, &ought, false)
}

fn candidates(m: &NeutralModel, target: Condition) -> Vec<Edit> {
    let f = m.frame();
    let n = f.agents();
    let mut out = Vec::new();
    let moments: Vec<(usize, Vec<WorldId>)> = f
        .moment_ids()
        .map(|mid| (mid.0, f.moment(mid).ones().collect()))
        .collect();
    match target {
        Condition::C1 => {
            for (mo, members) in &moments {
                for agent in 1..=n {
                    for (cell, set) in f.cells(crate::MomentId(*mo), agent).iter().enumerate() {
                        for world in f.worlds().filter(|w| !members.contains(w)) {
                            out.push(Edit::AddToCell {
                                moment: *mo,
                                agent,
                                cell,
                                world,
                            });
                        }
                        for world in set.ones() {
                            out.push(Edit::RemoveFromCell {
                                moment: *mo,
                                agent,
                                cell,
                                world,
                            });
                        }
                    }
                }
            }
        }
        Condition::C2 => {
            for (mo, _) in &moments {
                for agent in 1..=n {
                    let cells = f.cells(crate::MomentId(*mo), agent);
                    for (from, set) in cells.iter().enumerate() {
                        if set.count_ones(..) < 2 {
                            continue;
                        }
                        for to in (0..cells.len()).filter(|&t| t != from) {
                            for world in set.ones() {
                                out.push(Edit::MoveBetweenCells {
                                    moment: *mo,
                                    agent,
                                    from,
                                    to,
                                    world,
                                });
                            }
                        }
                    }
                }
            }
        }
        Condition::C3 => {
            for (mo, members) in &moments {
                for (cell, set) in f.grand_cells(crate::MomentId(*mo)).iter().enumerate() {
                    let Some(rep) = set.minimum() else { continue };
                    for &world in members {
                        if (1..=n).any(|i| !f.agent_class(i, rep).contains(world)) {
                            out.push(Edit::AddToGrand {
                                moment: *mo,
                                cell,
                                world,
                            });
                        }
                    }
                }
            }
        }
        Condition::T4 | Condition::T5 | Condition::T6 => {
            for w in f.worlds() {
                for v in f.worlds() {
                    if w != v && !f.succ(w).contains(v) && f.moment_index(w) != f.moment_index(v) {
                        out.push(Edit::AddEdge(w, v));
                    }
                }
            }
        }
        Condition::T7 => {
            for w in f.worlds() {
                for v in f.box_class(w).ones() {
                    out.push(Edit::AddEdge(w, v));
                }
            }
        }
        Condition::D8 => {
            for (mo, members) in &moments {
                for agent in 1..=n {
                    let ideal = m.ideal(crate::MomentId(*mo), agent);
                    for x in f.worlds().filter(|x| !members.contains(x)) {
                        let mut worlds: Vec<WorldId> = ideal.ones().collect();
                        worlds.push(x);
                        out.push(Edit::SetIdeal {
                            moment: *mo,
                            agent,
                            worlds,
                        });
                    }
                }
            }
        }
        Condition::D9 => {
            for (mo, _) in &moments {
                for agent in 1..=n {
                    out.push(Edit::SetIdeal {
                        moment: *mo,
                        agent,
                        worlds: Vec::new(),
                    });
                }
            }
        }
        Condition::D10 => {
            for (_, members) in moments.iter().filter(|(_, ws)| ws.len() >= 2) {
                for agent in 1..=n {
                    for &from in members {
                        for &to in members {
                            out.push(Edit::ToggleOught { agent, from, to });
                        }
                    }
                }
            }
        }
        Condition::D11 => {
            for (mo, _) in &moments {
                let mid = crate::MomentId(*mo);
                for agent in 1..=n {
                    let ideal = m.ideal(mid, agent);
                    for cell in f.cells(mid, agent) {
                        if cell.count_ones(..) < 2 {
                            continue;
                        }
                        for x in cell.ones() {
                            let mut worlds = ideal.clone();
                            worlds.toggle(x);
                            out.push(Edit::SetIdeal {
                                moment: *mo,
                                agent,
                                worlds: worlds.ones().collect(),
                            });
                        }
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Minimally edits `m` so that the frame checker reports `target`.
///
/// Candidate edits are tried in a seeded order; the first one that makes
/// the checker flag `target` is returned.
pub fn mutate(m: &NeutralModel, target: Condition, seed: u64) -> Result<NeutralModel, GenError> {
    if !Condition::MUTABLE.contains(&target) {
        return Err(GenError::NotMutable(target));
    }
    let mut edits = candidates(m, target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edits.shuffle(&mut rng);
    for edit in &edits {
        let Ok(out) = apply(m, edit) else { continue };
        if check_frame(&out, HorizonMode::Finite).flags(target) {
            return Ok(out);
        }
    }
    Err(GenError::Unreachable(target))
}

fn gen_leaf<R: Rng + ?Sized>(rng: &mut R, vars: &[&str]) -> Formula {
    match rng.random_range(0..vars.len() + 2) {
        0 => Formula::Top,
        1 => Formula::Bot,
        k => Formula::var(vars[k - 2]),
    }
}

/// A seeded random formula of depth at most `depth`, built from the core
/// constructors only.
pub fn gen_formula<R: Rng + ?Sized>(
    rng: &mut R,
    depth: usize,
    vars: &[&str],
    agents: usize,
) -> Formula {
    if depth == 0 {
        return gen_leaf(rng, vars);
    }
    let agents = agents.max(1);
    let d = depth - 1;
    match rng.random_range(0..10) {
        0 => gen_leaf(rng, vars),
        1 => Formula::Not(Box::new(gen_formula(rng, d, vars, agents))),
        2 | 3 => {
            let a = gen_formula(rng, d, vars, agents);
            let b = gen_formula(rng, d, vars, agents);
            Formula::And(Box::new(a), Box::new(b))
        }
        4 => Formula::Settled(Box::new(gen_formula(rng, d, vars, agents))),
        5 => {
            let i = rng.random_range(1..=agents);
            Formula::Stit(i, Box::new(gen_formula(rng, d, vars, agents)))
        }
        6 => Formula::Grand(Box::new(gen_formula(rng, d, vars, agents))),
        7 => Formula::Henceforth(Box::new(gen_formula(rng, d, vars, agents))),
        8 => Formula::Hitherto(Box::new(gen_formula(rng, d, vars, agents))),
        _ => {
            let i = rng.random_range(1..=agents);
            Formula::Ought(i, Box::new(gen_formula(rng, d, vars, agents)))
        }
    }
}

/// `count` formulas from a fixed seed.
pub fn gen_formulas(
    seed: u64,
    count: usize,
    depth: usize,
    vars: &[&str],
    agents: usize,
) -> Vec<Formula> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| gen_formula(&mut rng, depth, vars, agents))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framecheck::{check_lemma8, Severity};
    use crate::model::fixtures::m1;
    use crate::semantics::eval_neutral;
    use crate::MomentId;

    fn ids(s: &crate::WorldSet) -> Vec<usize> {
        s.ones().collect()
    }

    #[test]
    fn single_level_is_the_m1_skeleton() {
        let m = gen_model(&GenParams::new(2, 1, vec![2, 2], 0)).unwrap();
        let f = m.frame();
        assert_eq!(f.names(), m1().frame().names());
        assert!(f.same_skeleton(m1().frame()));
    }

    #[test]
    fn one_agent_two_levels() {
        let m = gen_model(&GenParams::new(1, 2, vec![2], 3)).unwrap();
        let f = m.frame();
        assert_eq!(f.world_count(), 4);
        assert_eq!(f.moment_count(), 3);
        let root = f.moment(MomentId(0));
        assert_eq!(root.count_ones(..), 2);
        for w in root.ones() {
            assert_eq!(ids(f.agent_class(1, w)), vec![w]);
        }
        assert!(!check_frame(&m, HorizonMode::Finite).has_violations());
    }

    #[test]
    fn world_counts() {
        for (agents, depth, choices, expect) in [
            (2, 2, vec![2, 2], 8),
            (1, 3, vec![2], 12),
            (2, 3, vec![2, 1], 12),
            (1, 1, vec![3], 3),
            (3, 2, vec![2, 2, 2], 16),
        ] {
            let p = GenParams::new(agents, depth, choices, 0);
            assert_eq!(p.world_count(), Some(expect));
            assert_eq!(gen_model(&p).unwrap().frame().world_count(), expect);
        }
    }

    #[test]
    fn generated_models_are_valid() {
        for seed in 0..40 {
            for p in [
                GenParams::new(2, 2, vec![2, 2], seed),
                GenParams::new(1, 3, vec![3], seed),
                GenParams::new(2, 3, vec![2, 1], seed),
                GenParams::new(3, 2, vec![2, 1, 2], seed),
            ] {
                let m = gen_model(&p).unwrap();
                let r = check_frame(&m, HorizonMode::Finite);
                assert!(!r.has_violations(), "{p:?}: {r:?}");
                assert!(r
                    .violations
                    .iter()
                    .all(|v| v.condition == Condition::Ser && v.severity == Severity::Warning));
                assert!(check_lemma8(&m).is_clean());
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::new(2, 3, vec![2, 1], 11);
        assert_eq!(gen_model(&p).unwrap(), gen_model(&p).unwrap());
        let q = GenParams {
            seed: 12,
            ..p.clone()
        };
        assert_ne!(gen_model(&p).unwrap(), gen_model(&q).unwrap());
    }

    #[test]
    fn bad_params() {
        assert!(matches!(
            gen_model(&GenParams::new(2, 2, vec![2], 0)),
            Err(GenError::InvalidParams(_))
        ));
        assert!(matches!(
            gen_model(&GenParams::new(1, 0, vec![2], 0)),
            Err(GenError::InvalidParams(_))
        ));
        assert!(matches!(
            gen_model(&GenParams::new(1, 40, vec![2], 0)),
            Err(GenError::TooLarge { .. })
        ));
    }

    #[test]
    fn every_mutation_target_on_the_standard_model() {
        let m = gen_model(&GenParams::standard(0)).unwrap();
        for c in Condition::MUTABLE {
            let bad = mutate(&m, c, 5).unwrap_or_else(|e| panic!("{c}: {e}"));
            assert!(check_frame(&bad, HorizonMode::Finite).flags(c), "{c}");
        }
        assert_eq!(
            mutate(&m, Condition::Ser, 0),
            Err(GenError::NotMutable(Condition::Ser))
        );
    }

    #[test]
    fn unreachable_mutation() {
        let m = gen_model(&GenParams::new(1, 1, vec![1], 0)).unwrap();
        assert_eq!(
            mutate(&m, Condition::C2, 0),
            Err(GenError::Unreachable(Condition::C2))
        );
    }

    #[test]
    fn irr_valuation_names_the_world() {
        let name = Formula::name("p");
        for seed in 0..10 {
            let m = gen_model(&GenParams::new(2, 3, vec![2, 1], seed)).unwrap();
            for w in m.frame().worlds() {
                let m2 = irr_valuation(&m, w, "p").unwrap();
                assert!(eval_neutral(&m2, w, &name).unwrap());
                assert_eq!(m2.frame().valuation("q"), m.frame().valuation("q"));
            }
        }
        let single = m1();
        let m2 = irr_valuation(&single, 0, "p").unwrap();
        assert!(m2.frame().valuation("p").is_clear());
        assert!(eval_neutral(&m2, 0, &name).unwrap());
    }

    #[test]
    fn irr_valuation_can_fail_without_irreflexivity() {
        let m = gen_model(&GenParams::standard(0)).unwrap();
        let bad = mutate(&m, Condition::T7, 0).unwrap();
        let name = Formula::name("p");
        let fails = bad.frame().worlds().any(|w| {
            let m2 = irr_valuation(&bad, w, "p").unwrap();
            !eval_neutral(&m2, w, &name).unwrap()
        });
        assert!(fails);
    }

    #[test]
    fn seeded_formulas_are_reproducible() {
        let a = gen_formulas(9, 50, 4, &["p", "q"], 2);
        assert_eq!(a, gen_formulas(9, 50, 4, &["p", "q"], 2));
        assert!(a.iter().all(|f| f.max_agent() <= 2 && f.depth() <= 5));
    }
}
