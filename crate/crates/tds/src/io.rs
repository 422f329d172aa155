//! JSON model and derivation files.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tds_core::model::{transitive_closure, ModelError};
use tds_core::proofcheck::{Derivation, Justification, Line, SchemaId};
use tds_core::syntax::{parse, ParseError};
use tds_core::{Frame, FrameParts, Model, MomentId, NeutralModel, UtilModel, WorldId};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {source}")]
    Formula { line: usize, source: ParseError },
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

pub fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiceEntry {
    pub moment: usize,
    pub agent: usize,
    pub cells: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrandEntry {
    pub moment: usize,
    pub cells: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealEntry {
    pub moment: usize,
    pub agent: usize,
    pub worlds: Vec<String>,
}

/// Raw deontic edges of one agent, for models that are not stored per
/// moment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OughtEntry {
    pub agent: usize,
    pub edges: Vec<(String, String)>,
}

/// On-disk shape of a model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub agents: usize,
    pub worlds: Vec<String>,
    pub moments: Vec<Vec<String>>,
    pub choice: Vec<ChoiceEntry>,
    pub grand: Vec<GrandEntry>,
    #[serde(rename = "G")]
    pub g: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<IdealEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ought: Option<Vec<OughtEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub util: Option<BTreeMap<String, u64>>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Close the future relation transitively instead of rejecting gaps.
    pub close_g: bool,
    /// Keep deontic edges that differ within a moment.
    pub permissive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoadedModel {
    Neutral(NeutralModel),
    Util(UtilModel),
}

impl LoadedModel {
    pub fn frame(&self) -> &Frame {
        match self {
            LoadedModel::Neutral(m) => m.frame(),
            LoadedModel::Util(m) => m.frame(),
        }
    }
}

struct Names<'a> {
    index: BTreeMap<&'a str, WorldId>,
}

impl<'a> Names<'a> {
    fn new(worlds: &'a [String]) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (k, w) in worlds.iter().enumerate() {
            if index.insert(w.as_str(), k).is_some() {
                return Err(ModelError::DuplicateWorld(w.clone()));
            }
        }
        Ok(Names { index })
    }

    fn id(&self, name: &str) -> Result<WorldId, ModelError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| ModelError::UnknownWorld(name.into()))
    }

    fn ids(&self, names: &[String]) -> Result<Vec<WorldId>, ModelError> {
        names.iter().map(|n| self.id(n)).collect()
    }
}

pub fn parse_model(text: &str, opts: LoadOptions) -> Result<LoadedModel, FormatError> {
    let file: ModelFile = serde_json::from_str(text)?;
    model_from_file(&file, opts)
}

pub fn load_model(path: &Path, opts: LoadOptions) -> Result<LoadedModel, FormatError> {
    parse_model(&read(path)?, opts)
}

pub fn model_from_file(file: &ModelFile, opts: LoadOptions) -> Result<LoadedModel, FormatError> {
    let kinds = [
        file.ideal.is_some(),
        file.ought.is_some(),
        file.util.is_some(),
    ];
    if kinds.iter().filter(|&&k| k).count() != 1 {
        return Err(invalid(
            "exactly one of `ideal`, `ought` or `util` is required",
        ));
    }
    if file.agents == 0 {
        return Err(ModelError::NoAgents.into());
    }
    let names = Names::new(&file.worlds)?;
    let mcount = file.moments.len();
    let n = file.agents;
    let moments = file
        .moments
        .iter()
        .map(|m| names.ids(m))
        .collect::<Result<Vec<_>, _>>()?;

    let mut choice: Vec<Vec<Option<Vec<Vec<WorldId>>>>> = vec![vec![None; n]; mcount];
    for e in &file.choice {
        if e.moment >= mcount {
            return Err(ModelError::MomentOutOfRange(e.moment).into());
        }
        if e.agent == 0 || e.agent > n {
            return Err(ModelError::AgentOutOfRange(e.agent).into());
        }
        let slot = &mut choice[e.moment][e.agent - 1];
        if slot.is_some() {
            return Err(ModelError::DuplicateChoice {
                moment: e.moment,
                agent: e.agent,
            }
            .into());
        }
        *slot = Some(
            e.cells
                .iter()
                .map(|c| names.ids(c))
                .collect::<Result<_, _>>()?,
        );
    }
    let choice = choice
        .into_iter()
        .enumerate()
        .map(|(m, row)| {
            row.into_iter()
                .enumerate()
                .map(|(a, cells)| {
                    cells.ok_or(ModelError::MissingChoice {
                        moment: m,
                        agent: a + 1,
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut grand: Vec<Option<Vec<Vec<WorldId>>>> = vec![None; mcount];
    for e in &file.grand {
        if e.moment >= mcount {
            return Err(ModelError::MomentOutOfRange(e.moment).into());
        }
        if grand[e.moment].is_some() {
            return Err(invalid(format!(
                "duplicate grand coalition partition for moment {}",
                e.moment
            )));
        }
        grand[e.moment] = Some(
            e.cells
                .iter()
                .map(|c| names.ids(c))
                .collect::<Result<_, _>>()?,
        );
    }
    let grand = grand
        .into_iter()
        .enumerate()
        .map(|(m, g)| g.ok_or(ModelError::MissingGrand(m)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut future = file
        .g
        .iter()
        .map(|(a, b)| Ok((names.id(a)?, names.id(b)?)))
        .collect::<Result<Vec<_>, ModelError>>()?;
    if opts.close_g {
        future = transitive_closure(file.worlds.len(), &future);
    }
    let valuation = file
        .valuation
        .iter()
        .map(|(k, v)| Ok((k.clone(), names.ids(v)?)))
        .collect::<Result<BTreeMap<_, _>, ModelError>>()?;

    let frame = Frame::new(FrameParts {
        agents: n,
        worlds: file.worlds.clone(),
        moments,
        choice,
        grand,
        future,
        valuation,
    })?;
    if let Some((w, u, v)) = frame.transitivity_gap() {
        return Err(ModelError::NotTransitive(
            frame.name(w).into(),
            frame.name(u).into(),
            frame.name(v).into(),
        )
        .into());
    }

    if let Some(ideal) = &file.ideal {
        let mut table: Vec<Vec<Option<Vec<WorldId>>>> = vec![vec![None; n]; mcount];
        for e in ideal {
            if e.moment >= mcount {
                return Err(ModelError::MomentOutOfRange(e.moment).into());
            }
            if e.agent == 0 || e.agent > n {
                return Err(ModelError::AgentOutOfRange(e.agent).into());
            }
            let slot = &mut table[e.moment][e.agent - 1];
            if slot.is_some() {
                return Err(invalid(format!(
                    "duplicate ideal set for moment {}, agent {}",
                    e.moment, e.agent
                )));
            }
            *slot = Some(names.ids(&e.worlds)?);
        }
        let mut full = Vec::with_capacity(mcount);
        for (m, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(n);
            for (a, ws) in row.into_iter().enumerate() {
                out.push(ws.ok_or_else(|| {
                    invalid(format!("missing ideal set for moment {m}, agent {}", a + 1))
                })?);
            }
            full.push(out);
        }
        return Ok(LoadedModel::Neutral(NeutralModel::from_ideal(
            frame, &full,
        )?));
    }
    if let Some(ought) = &file.ought {
        let mut edges = vec![Vec::new(); n];
        for e in ought {
            if e.agent == 0 || e.agent > n {
                return Err(ModelError::AgentOutOfRange(e.agent).into());
            }
            for (a, b) in &e.edges {
                edges[e.agent - 1].push((names.id(a)?, names.id(b)?));
            }
        }
        let m = NeutralModel::from_ought_edges(frame, &edges, !opts.permissive)?;
        return Ok(LoadedModel::Neutral(m));
    }
    let util = file.util.as_ref().expect("one deontic key is present");
    for w in util.keys() {
        names.id(w)?;
    }
    let values = file
        .worlds
        .iter()
        .map(|w| {
            util.get(w)
                .copied()
                .ok_or_else(|| ModelError::MissingUtility(w.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LoadedModel::Util(UtilModel::new(frame, values)?))
}

fn skeleton_file(frame: &Frame) -> ModelFile {
    let name = |w: WorldId| frame.name(w).to_string();
    let names = |s: &tds_core::WorldSet| s.ones().map(name).collect::<Vec<_>>();
    let mut choice = Vec::new();
    let mut grand = Vec::new();
    for m in frame.moment_ids() {
        for agent in 1..=frame.agents() {
            choice.push(ChoiceEntry {
                moment: m.0,
                agent,
                cells: frame.cells(m, agent).iter().map(names).collect(),
            });
        }
        grand.push(GrandEntry {
            moment: m.0,
            cells: frame.grand_cells(m).iter().map(names).collect(),
        });
    }
    ModelFile {
        agents: frame.agents(),
        worlds: frame.names().to_vec(),
        moments: frame.moment_ids().map(|m| names(frame.moment(m))).collect(),
        choice,
        grand,
        g: frame
            .future_edges()
            .into_iter()
            .map(|(a, b)| (name(a), name(b)))
            .collect(),
        ideal: None,
        ought: None,
        util: None,
        valuation: frame
            .variables()
            .map(|(k, v)| (k.to_string(), names(v)))
            .collect(),
    }
}

pub fn neutral_file(m: &NeutralModel) -> ModelFile {
    let frame = m.frame();
    let mut file = skeleton_file(frame);
    let name = |w: WorldId| frame.name(w).to_string();
    if m.is_moment_constant() {
        let mut ideal = Vec::new();
        for mom in frame.moment_ids() {
            for agent in 1..=frame.agents() {
                ideal.push(IdealEntry {
                    moment: mom.0,
                    agent,
                    worlds: m.ideal(MomentId(mom.0), agent).ones().map(name).collect(),
                });
            }
        }
        file.ideal = Some(ideal);
    } else {
        file.ought = Some(
            m.ought_edges()
                .into_iter()
                .enumerate()
                .map(|(a, edges)| OughtEntry {
                    agent: a + 1,
                    edges: edges.into_iter().map(|(w, v)| (name(w), name(v))).collect(),
                })
                .collect(),
        );
    }
    file
}

pub fn util_file(m: &UtilModel) -> ModelFile {
    let frame = m.frame();
    let mut file = skeleton_file(frame);
    file.util = Some(
        frame
            .worlds()
            .map(|w| (frame.name(w).to_string(), m.util(w)))
            .collect(),
    );
    file
}

pub fn to_json(file: &ModelFile) -> String {
    let mut s = serde_json::to_string_pretty(file).expect("model files serialize");
    s.push('\n');
    s
}

/// One line of a derivation file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineFile {
    pub formula: String,
    pub rule: String,
    #[serde(default)]
    pub refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subst: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
}

/// Agent labels accepted when reading formulas before the agent count is
/// known.
const ANY_AGENT: usize = usize::MAX;

fn refs(k: usize, l: &LineFile, want: usize) -> Result<&[usize], FormatError> {
    if l.refs.len() != want {
        return Err(invalid(format!(
            "line {k}: {} needs {want} reference(s), got {}",
            l.rule,
            l.refs.len()
        )));
    }
    Ok(&l.refs)
}

/// Reads a derivation. Formulas may use any agent label; the checker
/// rejects labels beyond its agent count.
pub fn parse_derivation(text: &str) -> Result<Derivation, FormatError> {
    let lines: Vec<LineFile> = serde_json::from_str(text)?;
    let mut out = Vec::with_capacity(lines.len());
    for (k, l) in lines.iter().enumerate() {
        let line = k + 1;
        let formula =
            parse(&l.formula, ANY_AGENT).map_err(|source| FormatError::Formula { line, source })?;
        let justification = match l.rule.as_str() {
            "R0" => {
                let r = refs(line, l, 2)?;
                Justification::R0 {
                    premise: r[0],
                    implication: r[1],
                }
            }
            "R1" => Justification::R1 {
                premise: refs(line, l, 1)?[0],
            },
            "R2" => Justification::R2 {
                premise: refs(line, l, 1)?[0],
                var: l
                    .p
                    .clone()
                    .ok_or_else(|| invalid(format!("line {line}: R2 needs the variable `p`")))?,
            },
            rule => {
                let schema: SchemaId = rule
                    .parse()
                    .map_err(|()| invalid(format!("line {line}: unknown rule `{rule}`")))?;
                let subst = match &l.subst {
                    None => None,
                    Some(map) => Some(
                        map.iter()
                            .map(|(k, v)| {
                                parse(v, ANY_AGENT)
                                    .map(|f| (k.clone(), f))
                                    .map_err(|source| FormatError::Formula { line, source })
                            })
                            .collect::<Result<BTreeMap<_, _>, _>>()?,
                    ),
                };
                Justification::Axiom { schema, subst }
            }
        };
        out.push(Line {
            formula,
            justification,
        });
    }
    Ok(Derivation::new(out))
}

/// Smallest agent count covering every label used in `d`.
pub fn agents_used(d: &Derivation) -> usize {
    let mut n = 1;
    for l in &d.lines {
        n = n.max(l.formula.max_agent());
        if let Justification::Axiom {
            subst: Some(map), ..
        } = &l.justification
        {
            for f in map.values() {
                n = n.max(f.max_agent());
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    const M1: &str = r#"{
        "agents": 2,
        "worlds": ["w00", "w01", "w10", "w11"],
        "moments": [["w00", "w01", "w10", "w11"]],
        "choice": [
            {"moment": 0, "agent": 1, "cells": [["w00", "w01"], ["w10", "w11"]]},
            {"moment": 0, "agent": 2, "cells": [["w00", "w10"], ["w01", "w11"]]}
        ],
        "grand": [{"moment": 0, "cells": [["w00"], ["w01"], ["w10"], ["w11"]]}],
        "G": [],
        "ideal": [
            {"moment": 0, "agent": 1, "worlds": ["w00", "w01"]},
            {"moment": 0, "agent": 2, "worlds": ["w00", "w10"]}
        ],
        "valuation": {"p": ["w00", "w01"]}
    }"#;

    fn neutral(text: &str) -> NeutralModel {
        match parse_model(text, LoadOptions::default()).unwrap() {
            LoadedModel::Neutral(m) => m,
            LoadedModel::Util(_) => panic!("expected a neutral model"),
        }
    }

    #[test]
    fn m1_round_trip() {
        let m = neutral(M1);
        assert_eq!(m.frame().world_count(), 4);
        let again = neutral(&to_json(&neutral_file(&m)));
        assert_eq!(again, m);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = M1.replacen("\"agents\": 2,", "\"agents\": 2, \"extra\": 1,", 1);
        assert!(matches!(
            parse_model(&text, LoadOptions::default()),
            Err(FormatError::Json(_))
        ));
    }

    #[test]
    fn deontic_key_must_be_unique() {
        let text = M1.replacen("\"G\": [],", "\"G\": [], \"util\": {},", 1);
        assert!(matches!(
            parse_model(&text, LoadOptions::default()),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn unknown_world_is_reported() {
        let text = M1.replacen("[\"w00\", \"w01\"]}", "[\"w00\", \"zz\"]}", 1);
        assert!(matches!(
            parse_model(&text, LoadOptions::default()),
            Err(FormatError::Model(ModelError::UnknownWorld(_)))
        ));
    }

    #[test]
    fn util_models_load() {
        let text = M1.replace(
            r#""ideal": [
            {"moment": 0, "agent": 1, "worlds": ["w00", "w01"]},
            {"moment": 0, "agent": 2, "worlds": ["w00", "w10"]}
        ],"#,
            r#""util": {"w00": 1, "w01": 0, "w10": 0, "w11": 0},"#,
        );
        match parse_model(&text, LoadOptions::default()).unwrap() {
            LoadedModel::Util(u) => {
                assert_eq!(u.utilities(), &[1, 0, 0, 0]);
                let back = parse_model(&to_json(&util_file(&u)), LoadOptions::default()).unwrap();
                assert_eq!(back, LoadedModel::Util(u));
            }
            LoadedModel::Neutral(_) => panic!("expected a utility model"),
        }
        let missing = text.replace(", \"w11\": 0", "");
        assert!(matches!(
            parse_model(&missing, LoadOptions::default()),
            Err(FormatError::Model(ModelError::MissingUtility(_)))
        ));
    }

    const CHAIN: &str = r#"{
        "agents": 1,
        "worlds": ["a", "b", "c"],
        "moments": [["a"], ["b"], ["c"]],
        "choice": [
            {"moment": 0, "agent": 1, "cells": [["a"]]},
            {"moment": 1, "agent": 1, "cells": [["b"]]},
            {"moment": 2, "agent": 1, "cells": [["c"]]}
        ],
        "grand": [
            {"moment": 0, "cells": [["a"]]},
            {"moment": 1, "cells": [["b"]]},
            {"moment": 2, "cells": [["c"]]}
        ],
        "G": [["a", "b"], ["b", "c"]],
        "ideal": [
            {"moment": 0, "agent": 1, "worlds": ["a"]},
            {"moment": 1, "agent": 1, "worlds": ["b"]},
            {"moment": 2, "agent": 1, "worlds": ["c"]}
        ]
    }"#;

    #[test]
    fn future_must_be_closed_unless_asked() {
        assert!(matches!(
            parse_model(CHAIN, LoadOptions::default()),
            Err(FormatError::Model(ModelError::NotTransitive(..)))
        ));
        let opts = LoadOptions {
            close_g: true,
            ..Default::default()
        };
        let m = parse_model(CHAIN, opts).unwrap();
        assert_eq!(m.frame().future_edges().len(), 3);
    }

    #[test]
    fn ought_edges_need_permissive_mode_when_uneven() {
        let text = M1.replace(
            r#""ideal": [
            {"moment": 0, "agent": 1, "worlds": ["w00", "w01"]},
            {"moment": 0, "agent": 2, "worlds": ["w00", "w10"]}
        ],"#,
            r#""ought": [
            {"agent": 1, "edges": [["w00", "w00"], ["w01", "w00"], ["w10", "w00"], ["w11", "w01"]]},
            {"agent": 2, "edges": [["w00", "w00"], ["w01", "w00"], ["w10", "w00"], ["w11", "w00"]]}
        ],"#,
        );
        assert!(matches!(
            parse_model(&text, LoadOptions::default()),
            Err(FormatError::Model(ModelError::NotMomentConstant {
                agent: 1,
                ..
            }))
        ));
        let opts = LoadOptions {
            permissive: true,
            ..Default::default()
        };
        match parse_model(&text, opts).unwrap() {
            LoadedModel::Neutral(m) => {
                assert!(!m.is_moment_constant());
                let back = neutral_file(&m);
                assert!(back.ought.is_some() && back.ideal.is_none());
            }
            LoadedModel::Util(_) => panic!("expected a neutral model"),
        }
    }

    #[test]
    fn derivation_lines() {
        let text = r#"[
            {"formula": "box p -> ([1] p & O{1} p)", "rule": "A13"},
            {"formula": "(box p -> ([1] p & O{1} p)) -> (box p -> O{1} p)", "rule": "A0"},
            {"formula": "box p -> O{1} p", "rule": "R0", "refs": [1, 2]}
        ]"#;
        let d = parse_derivation(text).unwrap();
        assert_eq!(d.lines.len(), 3);
        assert_eq!(agents_used(&d), 1);
        assert!(matches!(
            parse_derivation(r#"[{"formula": "p", "rule": "X9"}]"#),
            Err(FormatError::Invalid(_))
        ));
        assert!(matches!(
            parse_derivation(r#"[{"formula": "p &", "rule": "A0"}]"#),
            Err(FormatError::Formula { line: 1, .. })
        ));
        assert!(matches!(
            parse_derivation(r#"[{"formula": "p", "rule": "R0", "refs": [1]}]"#),
            Err(FormatError::Invalid(_))
        ));
    }
}
