use proptest::prelude::*;

use tds_core::ctd::{collapse, collapse_by_sweep, deliberative_possible};
use tds_core::framecheck::{check_frame, check_lemma8, Condition, HorizonMode};
use tds_core::gen::{gen_model, mutate, GenParams};
use tds_core::model::{Frame, FrameParts};
use tds_core::semantics::{box_extension, Evaluator, Semantics};
use tds_core::syntax::{enumerate_formulas, parse, print, Formula};
use tds_core::{Model, NeutralModel, UtilModel, WorldId};

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["p", "q", "r1", "x_y"]).prop_map(Formula::var),
        Just(Formula::Top),
        Just(Formula::Bot),
    ];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            inner.clone().prop_map(Formula::settled),
            (1usize..=3, inner.clone()).prop_map(|(i, a)| Formula::stit(i, a)),
            inner.clone().prop_map(Formula::grand),
            inner.clone().prop_map(Formula::henceforth),
            inner.clone().prop_map(Formula::hitherto),
            (1usize..=3, inner).prop_map(|(i, a)| Formula::ought(i, a)),
        ]
    })
}

fn small_params() -> impl Strategy<Value = GenParams> {
    (1usize..=2, 1usize..=3, any::<u64>()).prop_flat_map(|(agents, depth, seed)| {
        prop::collection::vec(1usize..=2, agents)
            .prop_map(move |choices| GenParams::new(agents, depth, choices, seed))
    })
}

fn with_utilities(n: &NeutralModel, values: &[u64]) -> UtilModel {
    let f = n.frame().clone();
    let util = f.worlds().map(|w| values[w % values.len()]).collect();
    UtilModel::new(f, util).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(f in arb_formula()) {
        let text = print(&f);
        prop_assert_eq!(parse(&text, 3).unwrap(), f);
    }

    #[test]
    fn dominance_orders_are_well_behaved(
        p in small_params(),
        values in prop::collection::vec(0u64..4, 1..9),
    ) {
        let n = gen_model(&p).unwrap();
        let u = with_utilities(&n, &values);
        let f = u.frame();
        for m in f.moment_ids() {
            for i in 1..=f.agents() {
                let t = u.dominance(m, i);
                for a in 0..t.len() {
                    // a cell weakly dominates itself only if no state splits its utilities
                    let flat = f.worlds().all(|w| {
                        f.worlds().all(|v| {
                            !t.cells[a].contains(w)
                                || !t.cells[a].contains(v)
                                || tds_core::dominance::state_at(f, i, w) != tds_core::dominance::state_at(f, i, v)
                                || u.util(w) == u.util(v)
                        })
                    });
                    prop_assert_eq!(t.weak(a, a), flat);
                    prop_assert!(!t.strict(a, a));
                    for b in 0..t.len() {
                        for c in 0..t.len() {
                            if t.weak(a, b) && t.weak(b, c) {
                                prop_assert!(t.weak(a, c));
                            }
                            if t.strict(a, b) && t.strict(b, c) {
                                prop_assert!(t.strict(a, c));
                            }
                        }
                    }
                }
                prop_assert!(!t.undominated().is_empty());
            }
        }
    }

    #[test]
    fn monotone_rescaling_changes_nothing(
        p in small_params(),
        values in prop::collection::vec(0u64..5, 1..9),
        scale in 1u64..5,
        shift in 0u64..10,
    ) {
        let n = gen_model(&p).unwrap();
        let u = with_utilities(&n, &values);
        let squashed: Vec<u64> = u.utilities().iter().map(|&x| scale * x * x + x + shift).collect();
        let v = UtilModel::new(u.frame().clone(), squashed).unwrap();
        let f = u.frame();
        for m in f.moment_ids() {
            for i in 1..=f.agents() {
                let (a, b) = (u.dominance(m, i), v.dominance(m, i));
                for x in 0..a.len() {
                    for y in 0..a.len() {
                        prop_assert_eq!(a.weak(x, y), b.weak(x, y));
                    }
                }
            }
        }
        let pool = enumerate_formulas(1, &["p", "q"], f.agents());
        let (mut left, mut right) = (Evaluator::new(&u), Evaluator::new(&v));
        for phi in &pool {
            prop_assert_eq!(left.extension(phi).unwrap(), right.extension(phi).unwrap());
        }
    }

    #[test]
    fn past_and_future_are_converse(p in small_params()) {
        let n = gen_model(&p).unwrap();
        let f = n.frame();
        for w in f.worlds() {
            for v in f.worlds() {
                let forward = f.g_successors(w).unwrap().contains(v);
                let backward = f.h_predecessors(v).unwrap().contains(w);
                prop_assert_eq!(forward, backward);
            }
        }
    }

    #[test]
    fn collapse_routes_agree(
        p in small_params(),
        values in prop::collection::vec(0u64..3, 1..9),
    ) {
        let n = gen_model(&p).unwrap();
        let u = with_utilities(&n, &values);
        let f = u.frame();
        for m in f.moment_ids() {
            for i in 1..=f.agents() {
                let flat = collapse(&u, m, i).unwrap();
                prop_assert_eq!(flat, collapse_by_sweep(&u, m, i).unwrap());
                match deliberative_possible(&u, m, i).unwrap() {
                    Some(e) => {
                        prop_assert!(!flat);
                        let anchor = f.moment(m).minimum().unwrap();
                        prop_assert!(u.ought_extension(i, &e).contains(anchor));
                        prop_assert!(!box_extension(f, &e).contains(anchor));
                    }
                    None => prop_assert!(flat),
                }
            }
        }
    }

    #[test]
    fn generated_frames_are_valid(p in small_params()) {
        let n = gen_model(&p).unwrap();
        let r = check_frame(&n, HorizonMode::Finite).merge(check_lemma8(&n));
        prop_assert!(!r.has_violations(), "{:?}", r.violations.first());
    }
}

/// Whether a reported witness really exhibits its condition.
fn witness_holds(n: &NeutralModel, c: Condition, agent: Option<usize>, ws: &[WorldId]) -> bool {
    let f = n.frame();
    match (c, ws) {
        (Condition::D8, &[w, v]) => {
            n.ought(agent.unwrap(), w).contains(v) && !f.box_class(w).contains(v)
        }
        (Condition::D9, &[w]) => {
            let i = agent.unwrap();
            !f.box_class(w)
                .ones()
                .any(|u| f.agent_class(i, u).is_subset(n.ought(i, w)))
        }
        (Condition::D10, &[w, u, z]) => {
            let i = agent.unwrap();
            f.box_class(w).contains(u) && n.ought(i, u).contains(z) && !n.ought(i, w).contains(z)
        }
        (Condition::D11, &[w, v]) => {
            let i = agent.unwrap();
            let ideal = n.ought(i, w);
            ideal.contains(v)
                && !f.box_class(w).ones().any(|u| {
                    f.agent_class(i, u).contains(v) && f.agent_class(i, u).is_subset(ideal)
                })
        }
        (Condition::T7, &[w, u]) => {
            f.g_successors(w).unwrap().contains(u) && f.box_class(w).contains(u)
        }
        (Condition::T4, &[w, u, v]) => {
            let s = f.g_successors(w).unwrap();
            let succ = |a: usize, b: usize| f.g_successors(a).unwrap().contains(b);
            s.contains(u) && s.contains(v) && u != v && !succ(u, v) && !succ(v, u)
        }
        (Condition::C3, &[w, v]) => {
            f.grand_class(w).contains(v) && !f.agent_class(agent.unwrap(), w).contains(v)
        }
        (Condition::L8_5, &[w, z]) => {
            let i = agent.unwrap();
            let cell = f.agent_class(i, z);
            !cell.is_subset(n.ought(i, w)) && !cell.is_disjoint(n.ought(i, w))
        }
        (Condition::Ser, ws) => ws.iter().all(|&w| f.g_successors(w).unwrap().is_clear()),
        _ => true,
    }
}

#[test]
fn reported_witnesses_are_genuine() {
    let mut audited = 0;
    for seed in 0..6 {
        let base = gen_model(&GenParams::standard(seed)).unwrap();
        for target in Condition::MUTABLE {
            let m = mutate(&base, target, seed).unwrap();
            let r = check_frame(&m, HorizonMode::Finite).merge(check_lemma8(&m));
            assert!(r.flags(target));
            for v in &r.violations {
                assert!(
                    witness_holds(&m, v.condition, v.agent, &v.witnesses),
                    "{target}: bogus witness {v:?}"
                );
                audited += 1;
            }
        }
    }
    assert!(audited > 66);
}

/// Raw ingredients of a one-moment model with four worlds.
#[derive(Clone)]
struct Raw {
    cells: [Vec<Vec<WorldId>>; 2],
    grand: Vec<Vec<WorldId>>,
    ideal: [Vec<WorldId>; 2],
}

impl Raw {
    fn base() -> Raw {
        Raw {
            cells: [vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]],
            grand: vec![vec![0], vec![1], vec![2], vec![3]],
            ideal: [vec![0, 1], vec![0, 2]],
        }
    }

    fn model(&self) -> NeutralModel {
        let frame = Frame::new(FrameParts {
            agents: 2,
            worlds: ["a", "b", "c", "d"].map(String::from).to_vec(),
            moments: vec![vec![0, 1, 2, 3]],
            choice: vec![self.cells.to_vec()],
            grand: vec![self.grand.clone()],
            future: vec![],
            valuation: Default::default(),
        })
        .unwrap();
        NeutralModel::from_ideal(frame, &[self.ideal.to_vec()]).unwrap()
    }
}

fn is_partition(cells: &[Vec<WorldId>]) -> bool {
    let mut seen = [0u8; 4];
    for c in cells {
        if c.is_empty() {
            return false;
        }
        for &w in c {
            seen[w] += 1;
        }
    }
    seen.iter().all(|&k| k == 1)
}

/// Each condition evaluated straight from its definition on raw cells.
fn oracle(r: &Raw) -> Vec<(Condition, bool)> {
    let c1 = r.cells.iter().all(|c| is_partition(c));
    let c2 = r.cells[0]
        .iter()
        .all(|a| r.cells[1].iter().all(|b| a.iter().any(|w| b.contains(w))));
    let c3 = is_partition(&r.grand)
        && r.grand.iter().all(|g| {
            r.cells
                .iter()
                .all(|cells| cells.iter().any(|c| g.iter().all(|w| c.contains(w))))
        });
    let whole = |i: usize| -> Vec<&Vec<WorldId>> {
        r.cells[i]
            .iter()
            .filter(|c| c.iter().all(|w| r.ideal[i].contains(w)))
            .collect()
    };
    let d9 = (0..2).all(|i| !whole(i).is_empty());
    let d11 = (0..2).all(|i| {
        r.ideal[i]
            .iter()
            .all(|v| whole(i).iter().any(|c| c.contains(v)))
    });
    vec![
        (Condition::C1, !c1),
        (Condition::C2, !c2),
        (Condition::C3, !c3),
        (Condition::D9, !d9),
        (Condition::D11, !d11),
    ]
}

fn toggle(v: &mut Vec<WorldId>, w: WorldId) {
    match v.iter().position(|&x| x == w) {
        Some(k) => {
            v.remove(k);
        }
        None => {
            v.push(w);
            v.sort();
        }
    }
}

/// Every model one edit away from the base.
fn single_edits() -> Vec<Raw> {
    let base = Raw::base();
    let mut out = Vec::new();
    for i in 0..2 {
        for w in 0..4 {
            let mut r = base.clone();
            toggle(&mut r.ideal[i], w);
            out.push(r);
            for k in 0..=base.cells[i].len() {
                let mut r = base.clone();
                for c in r.cells[i].iter_mut() {
                    c.retain(|&x| x != w);
                }
                if k == base.cells[i].len() {
                    r.cells[i].push(vec![w]);
                } else {
                    toggle(&mut r.cells[i][k], w);
                }
                r.cells[i].retain(|c| !c.is_empty());
                out.push(r);
                let mut r = base.clone();
                if k < base.cells[i].len() && !r.cells[i][k].contains(&w) {
                    r.cells[i][k].push(w);
                    out.push(r);
                }
            }
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            let mut r = base.clone();
            r.grand = (0..4)
                .filter(|&w| w != b)
                .map(|w| if w == a { vec![a, b] } else { vec![w] })
                .collect();
            out.push(r);
        }
        let mut r = base.clone();
        r.grand.retain(|g| g != &vec![a]);
        out.push(r);
    }
    out
}

#[test]
fn checker_agrees_with_definitions_on_single_edits() {
    let edits = single_edits();
    assert!(edits.len() > 40);
    let mut flagged = std::collections::BTreeSet::new();
    for r in &edits {
        let report = check_frame(&r.model(), HorizonMode::Finite);
        let expected = oracle(r);
        let malformed = expected[0].1;
        for (c, violated) in expected {
            if malformed && c != Condition::C1 {
                continue;
            }
            assert_eq!(
                report.flags(c),
                violated,
                "{c} on {:?} / {:?} / {:?}",
                r.cells,
                r.grand,
                r.ideal
            );
            if violated {
                flagged.insert(c);
            }
        }
    }
    assert_eq!(flagged.len(), 5, "{flagged:?}");
}

#[test]
fn moment_ids_cover_frames() {
    let n = gen_model(&GenParams::new(2, 3, vec![2, 1], 3)).unwrap();
    let f = n.frame();
    let total: usize = f.moment_ids().map(|m| f.moment(m).count_ones(..)).sum();
    assert_eq!(total, f.world_count());
    assert!(f.moment_ids().all(|m| m.0 < f.moment_count()));
}
