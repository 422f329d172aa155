//! From ideal worlds to utilities.
//!
//! [`derive_util`] scores a world 1 when it is ideal for every agent at its
//! moment and 0 otherwise. [`check_util_criteria`] certifies independently
//! that a utility map induces the same obligations as the ideal worlds, and
//! [`truth_preservation_test`] compares the two semantics formula by formula.

use alloc::vec::Vec;

use thiserror::Error;

use crate::dominance::state_at;
use crate::framecheck::{check_frame, CheckReport, HorizonMode};
use crate::model::{Model, ModelError, NeutralModel, UtilModel, WorldId};
use crate::semantics::{EvalError, Evaluator};
use crate::syntax::{AgentId, Formula};
use crate::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("input frame violates its conditions ({} problems)", .0.violations.len())]
    InvalidFrame(CheckReport),
    #[error("models do not share a frame skeleton")]
    SkeletonMismatch,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Worlds ideal for every agent, as seen from `w`.
pub fn joint_ideal(m: &NeutralModel, w: WorldId) -> WorldSet {
    let mut s = m.frame().box_class(w).clone();
    for i in 1..=m.frame().agents() {
        s.intersect_with(m.ought(i, w));
    }
    s
}

pub fn derive_util(m: &NeutralModel) -> Result<UtilModel, TransformError> {
    let report = check_frame(m, HorizonMode::Finite);
    if report.has_violations() {
        return Err(TransformError::InvalidFrame(report));
    }
    let util = m
        .frame()
        .worlds()
        .map(|v| u64::from(joint_ideal(m, v).contains(v)))
        .collect();
    Ok(UtilModel::new(m.frame().clone(), util)?)
}

/// One failure of a criterion: at `w`, worlds `v` and `z` are ordered
/// wrongly by utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriterionViolation {
    pub agent: Option<AgentId>,
    pub w: WorldId,
    pub v: WorldId,
    pub z: WorldId,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CriteriaReport {
    /// A non-ideal world of a state never beats an ideal one.
    pub weak_order: Vec<CriterionViolation>,
    /// Worlds ideal for everyone strictly beat the rest of the moment.
    pub joint_strict: Vec<CriterionViolation>,
    /// Ideal worlds of a state share one utility.
    pub ideal_level: Vec<CriterionViolation>,
}

impl CriteriaReport {
    pub fn is_empty(&self) -> bool {
        self.weak_order.is_empty() && self.joint_strict.is_empty() && self.ideal_level.is_empty()
    }

    pub fn len(&self) -> usize {
        self.weak_order.len() + self.joint_strict.len() + self.ideal_level.len()
    }

    /// Violations of criterion `k` (1, 2 or 3).
    pub fn criterion(&self, k: usize) -> &[CriterionViolation] {
        match k {
            1 => &self.weak_order,
            2 => &self.joint_strict,
            _ => &self.ideal_level,
        }
    }
}

pub fn check_util_criteria(
    n: &NeutralModel,
    u: &UtilModel,
) -> Result<CriteriaReport, TransformError> {
    let f = n.frame();
    if !f.same_skeleton(u.frame()) {
        return Err(TransformError::SkeletonMismatch);
    }
    let util = |w: WorldId| u.util(w);
    let mut report = CriteriaReport::default();
    for w in f.worlds() {
        for i in 1..=f.agents() {
            let ideal = n.ought(i, w);
            let state = state_at(f, i, w);
            let inside: Vec<WorldId> = state.intersection(ideal).collect();
            let outside: Vec<WorldId> = state.difference(ideal).collect();
            for &v in &outside {
                for &z in &inside {
                    if util(v) > util(z) {
                        report.weak_order.push(CriterionViolation {
                            agent: Some(i),
                            w,
                            v,
                            z,
                        });
                    }
                }
            }
            for &v in &inside {
                for &z in &inside {
                    if util(v) != util(z) {
                        report.ideal_level.push(CriterionViolation {
                            agent: Some(i),
                            w,
                            v,
                            z,
                        });
                    }
                }
            }
        }
        let joint = joint_ideal(n, w);
        for v in f.box_class(w).difference(&joint) {
            for z in joint.ones() {
                if util(v) >= util(z) {
                    report.joint_strict.push(CriterionViolation {
                        agent: None,
                        w,
                        v,
                        z,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// A formula whose truth at `world` differs between the two semantics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub formula: Formula,
    pub world: WorldId,
    pub neutral: bool,
    pub util: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PreservationReport {
    pub formulas: usize,
    pub worlds: usize,
    pub disagreements: Vec<Disagreement>,
}

impl PreservationReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares truth in `n` and in `derive_util(n)` for every formula and
/// world.
pub fn truth_preservation_test<'a>(
    n: &NeutralModel,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Result<PreservationReport, TransformError> {
    let u = derive_util(n)?;
    compare(n, &u, formulas)
}

/// Compares truth in a neutral and a utilitarian model over one skeleton.
pub fn compare<'a>(
    n: &NeutralModel,
    u: &UtilModel,
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Result<PreservationReport, TransformError> {
    if !n.frame().same_skeleton(u.frame()) {
        return Err(TransformError::SkeletonMismatch);
    }
    let mut left = Evaluator::new(n);
    let mut right = Evaluator::new(u);
    let mut report = PreservationReport {
        worlds: n.frame().world_count(),
        ..Default::default()
    };
    for phi in formulas {
        report.formulas += 1;
        let a = left.extension(phi)?;
        let b = right.extension(phi)?;
        if a != b {
            for world in a.symmetric_difference(&b) {
                report.disagreements.push(Disagreement {
                    formula: phi.clone(),
                    world,
                    neutral: a.contains(world),
                    util: b.contains(world),
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{gen_model, GenParams};
    use crate::model::fixtures::{chain, m1};
    use crate::syntax::enumerate_formulas;
    use alloc::vec;

    #[test]
    fn m1_utilities() {
        let u = derive_util(&m1()).unwrap();
        assert_eq!(u.utilities(), &[1, 0, 0, 0]);
        assert!(check_util_criteria(&m1(), &u).unwrap().is_empty());
        assert_eq!(u.frame().valuation("p"), m1().frame().valuation("p"));
    }

    #[test]
    fn fully_ideal_moment_scores_one() {
        let m = m1();
        let frame = m.frame().clone();
        let full =
            NeutralModel::from_ideal(frame, &[vec![vec![0, 1, 2, 3], vec![0, 1, 2, 3]]]).unwrap();
        assert_eq!(derive_util(&full).unwrap().utilities(), &[1, 1, 1, 1]);
    }

    #[test]
    fn swapped_utilities_break_joint_strictness() {
        let n = m1();
        let u = UtilModel::new(n.frame().clone(), vec![0, 0, 1, 0]).unwrap();
        let r = check_util_criteria(&n, &u).unwrap();
        let w10 = 2;
        let w00 = 0;
        assert!(r.joint_strict.iter().any(|c| c.v == w10 && c.z == w00));
    }

    #[test]
    fn constant_utilities_only_break_criterion_two() {
        let n = m1();
        let u = UtilModel::new(n.frame().clone(), vec![5; 4]).unwrap();
        let r = check_util_criteria(&n, &u).unwrap();
        assert!(r.weak_order.is_empty());
        assert!(r.ideal_level.is_empty());
        assert!(!r.joint_strict.is_empty());
    }

    #[test]
    fn skeleton_mismatch_is_an_error() {
        let u = derive_util(&chain()).unwrap();
        assert_eq!(
            check_util_criteria(&m1(), &u),
            Err(TransformError::SkeletonMismatch)
        );
    }

    #[test]
    fn invalid_input_is_rejected() {
        let m = m1();
        let bad = NeutralModel::from_ideal(m.frame().clone(), &[vec![vec![], vec![0, 2]]]).unwrap();
        assert!(matches!(
            derive_util(&bad),
            Err(TransformError::InvalidFrame(_))
        ));
    }

    #[test]
    fn m1_preserves_truth_at_depth_two() {
        let formulas = enumerate_formulas(2, &["p"], 2);
        let r = truth_preservation_test(&m1(), &formulas).unwrap();
        assert!(r.agrees(), "{:?}", r.disagreements.first());
        assert_eq!(r.formulas, formulas.len());
    }

    #[test]
    fn generated_models_preserve_truth() {
        let formulas = enumerate_formulas(1, &["p", "q"], 2);
        for seed in 0..10 {
            let n = gen_model(&GenParams::new(2, 2, vec![2, 2], seed)).unwrap();
            let u = derive_util(&n).unwrap();
            assert!(check_util_criteria(&n, &u).unwrap().is_empty());
            assert!(truth_preservation_test(&n, &formulas).unwrap().agrees());
        }
    }
}
