//! Checking Hilbert-style derivations.
//!
//! Axiom schemas are stored as formula templates whose variables are
//! metavariables. A line justified by an axiom must be an instance of the
//! schema for some agent; propositional tautologies are decided by truth
//! tables over the boolean skeleton of the formula.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

use crate::syntax::{parse, AgentId, Formula};

/// Tautology checks give up beyond this many skeleton atoms.
pub const MAX_ATOMS: usize = 16;

/// An axiom schema, `A0` to `A25`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SchemaId(u8);

impl SchemaId {
    pub const TAUTOLOGY: SchemaId = SchemaId(0);
    /// `G phi -> F phi`, the seriality axiom.
    pub const SERIALITY: SchemaId = SchemaId(19);

    pub fn new(k: u8) -> Option<SchemaId> {
        (k <= 25).then_some(SchemaId(k))
    }

    pub fn all() -> impl Iterator<Item = SchemaId> {
        (0..=25).map(SchemaId)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// Whether the schema is stated for a single agent `i`.
    pub fn per_agent(self) -> bool {
        matches!(self.0, 4..=6 | 12..=16)
    }
}

impl fmt::Display for SchemaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}", self.0)
    }
}

impl FromStr for SchemaId {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        let digits = s
            .strip_prefix('A')
            .or_else(|| s.strip_prefix('a'))
            .ok_or(())?;
        digits.parse::<u8>().ok().and_then(SchemaId::new).ok_or(())
    }
}

/// Surface text of the fixed-arity schemas; agent `1` stands for `i`.
fn template_text(k: u8) -> Option<&'static str> {
    Some(match k {
        1 => "box (phi -> psi) -> (box phi -> box psi)",
        2 => "box phi -> phi",
        3 => "dia phi -> box dia phi",
        4 => "[1] (phi -> psi) -> ([1] phi -> [1] psi)",
        5 => "[1] phi -> phi",
        6 => "<1> phi -> [1] <1> phi",
        7 => "[Ag] (phi -> psi) -> ([Ag] phi -> [Ag] psi)",
        8 => "[Ag] phi -> phi",
        9 => "<Ag> phi -> [Ag] <Ag> phi",
        12 => "O{1} (phi -> psi) -> (O{1} phi -> O{1} psi)",
        13 => "box phi -> ([1] phi & O{1} phi)",
        14 => "O{1} phi -> dia [1] phi",
        15 => "dia O{1} phi -> box O{1} phi",
        16 => "box ([1] phi -> [1] psi) -> (O{1} phi -> O{1} psi)",
        17 => "G (phi -> psi) -> (G phi -> G psi)",
        18 => "G phi -> G G phi",
        19 => "G phi -> F phi",
        20 => "H (phi -> psi) -> (H phi -> H psi)",
        21 => "phi -> G P phi",
        22 => "phi -> H F phi",
        23 => "F P phi -> P phi | phi | F phi",
        24 => "P F phi -> P phi | phi | F phi",
        25 => "F dia phi -> <Ag> F phi",
        _ => return None,
    })
}

fn relabel(f: &Formula, i: AgentId) -> Formula {
    match f {
        Formula::Var(_) | Formula::Top | Formula::Bot => f.clone(),
        Formula::Not(x) => Formula::not(relabel(x, i)),
        Formula::And(a, b) => Formula::and(relabel(a, i), relabel(b, i)),
        Formula::Settled(x) => Formula::settled(relabel(x, i)),
        Formula::Stit(_, x) => Formula::stit(i, relabel(x, i)),
        Formula::Grand(x) => Formula::grand(relabel(x, i)),
        Formula::Henceforth(x) => Formula::henceforth(relabel(x, i)),
        Formula::Hitherto(x) => Formula::hitherto(relabel(x, i)),
        Formula::Ought(_, x) => Formula::ought(i, relabel(x, i)),
    }
}

/// The template of `schema` for `agents` agents, with `i` as the agent of
/// per-agent schemas. `None` for the tautology schema.
pub fn schema_template(schema: SchemaId, agents: usize, i: AgentId) -> Option<Formula> {
    let n = agents.max(1);
    let text = match schema.0 {
        0 => return None,
        10 => {
            let left: Vec<String> = (1..=n).map(|k| format!("dia [{k}] phi{k}")).collect();
            let right: Vec<String> = (1..=n).map(|k| format!("[{k}] phi{k}")).collect();
            format!("({}) -> dia ({})", left.join(" & "), right.join(" & "))
        }
        11 => {
            let left: Vec<String> = (1..=n).map(|k| format!("[{k}] phi{k}")).collect();
            let right: Vec<String> = (1..=n).map(|k| format!("phi{k}")).collect();
            format!("({}) -> [Ag] ({})", left.join(" & "), right.join(" & "))
        }
        k => template_text(k)?.to_string(),
    };
    let t = parse(&text, n).expect("schema templates are well formed");
    Some(if schema.per_agent() {
        relabel(&t, i)
    } else {
        t
    })
}

/// Metavariable bindings plus the agent a per-agent schema was used for.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Substitution {
    pub agent: Option<AgentId>,
    pub map: BTreeMap<String, Formula>,
}

impl Substitution {
    pub fn apply(&self, template: &Formula) -> Formula {
        template.substitute(&|v| self.map.get(v).cloned())
    }
}

fn bind(t: &Formula, f: &Formula, map: &mut BTreeMap<String, Formula>) -> bool {
    match (t, f) {
        (Formula::Var(x), _) => match map.get(x) {
            Some(b) => b == f,
            None => {
                map.insert(x.clone(), f.clone());
                true
            }
        },
        (Formula::Top, Formula::Top) | (Formula::Bot, Formula::Bot) => true,
        (Formula::Not(a), Formula::Not(b))
        | (Formula::Settled(a), Formula::Settled(b))
        | (Formula::Grand(a), Formula::Grand(b))
        | (Formula::Henceforth(a), Formula::Henceforth(b))
        | (Formula::Hitherto(a), Formula::Hitherto(b)) => bind(a, b, map),
        (Formula::Stit(i, a), Formula::Stit(j, b))
        | (Formula::Ought(i, a), Formula::Ought(j, b)) => i == j && bind(a, b, map),
        (Formula::And(a1, a2), Formula::And(b1, b2)) => bind(a1, b1, map) && bind(a2, b2, map),
        _ => false,
    }
}

/// First-order match of `template` against `f`.
pub fn match_template(template: &Formula, f: &Formula) -> Option<BTreeMap<String, Formula>> {
    let mut map = BTreeMap::new();
    bind(template, f, &mut map).then_some(map)
}

fn agents_for(schema: SchemaId, agents: usize) -> core::ops::RangeInclusive<AgentId> {
    if schema.per_agent() {
        1..=agents.max(1)
    } else {
        1..=1
    }
}

/// A substitution making `f` an instance of `schema`, if there is one.
pub fn match_axiom(f: &Formula, schema: SchemaId, agents: usize) -> Option<Substitution> {
    if schema == SchemaId::TAUTOLOGY {
        return matches!(is_tautology(f), Ok(true)).then(Substitution::default);
    }
    for i in agents_for(schema, agents) {
        let t = schema_template(schema, agents, i)?;
        if let Some(map) = match_template(&t, f) {
            return Some(Substitution {
                agent: schema.per_agent().then_some(i),
                map,
            });
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("{count} skeleton atoms exceed the limit of {MAX_ATOMS}")]
pub struct TooManyAtoms {
    pub count: usize,
}

fn skeleton_atoms<'f>(f: &'f Formula, out: &mut Vec<&'f Formula>) {
    match f {
        Formula::Top | Formula::Bot => {}
        Formula::Not(x) => skeleton_atoms(x, out),
        Formula::And(a, b) => {
            skeleton_atoms(a, out);
            skeleton_atoms(b, out);
        }
        _ => {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
}

fn truth(f: &Formula, atoms: &[&Formula], row: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(x) => !truth(x, atoms, row),
        Formula::And(a, b) => truth(a, atoms, row) && truth(b, atoms, row),
        _ => {
            let k = atoms.iter().position(|a| *a == f).expect("atom collected");
            row & (1 << k) != 0
        }
    }
}

/// Whether `f` is a propositional tautology, treating its maximal
/// non-boolean subformulas as atoms.
pub fn is_tautology(f: &Formula) -> Result<bool, TooManyAtoms> {
    let mut atoms = Vec::new();
    skeleton_atoms(f, &mut atoms);
    if atoms.len() > MAX_ATOMS {
        return Err(TooManyAtoms { count: atoms.len() });
    }
    Ok((0..1u32 << atoms.len()).all(|row| truth(f, &atoms, row)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// An axiom instance. Without a substitution the checker infers one.
    Axiom {
        schema: SchemaId,
        subst: Option<BTreeMap<String, Formula>>,
    },
    /// Modus ponens from `premise` and `implication` (1-based lines).
    R0 { premise: usize, implication: usize },
    /// Necessitation of `premise`.
    R1 { premise: usize },
    /// The irreflexivity rule with fresh variable `var`.
    R2 { premise: usize, var: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub lines: Vec<Line>,
}

impl Derivation {
    pub fn new(lines: Vec<Line>) -> Self {
        Derivation { lines }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofErrorKind {
    #[error("empty derivation")]
    Empty,
    #[error("formula is not an instance of {0}")]
    SchemaMismatch(SchemaId),
    #[error("A0: {0}")]
    TooManyAtoms(TooManyAtoms),
    #[error("reference to line {0}, which does not precede this line")]
    DanglingReference(usize),
    #[error("R0 needs a premise psi and an implication psi -> phi concluding phi")]
    ModusPonens,
    #[error("R1 necessitation is restricted to box, G and H, not {0}")]
    IllegalNecessitation(String),
    #[error("R1 conclusion must be box, G or H applied to line {0}")]
    NecessitationShape(usize),
    #[error("R2 premise must be name({0}) -> phi concluding phi")]
    IrreflexivityShape(String),
    #[error("R2 side condition, {0} occurs in φ")]
    IrreflexivitySideCondition(String),
    #[error("agent {agent} out of range 1..={agents}")]
    AgentOutOfRange { agent: AgentId, agents: usize },
}

/// A failed check, located at a 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ProofError {
    pub line: usize,
    pub kind: ProofErrorKind,
}

/// What a successful check establishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checked {
    /// The formula of every line; each is a theorem.
    pub theorems: Vec<Formula>,
    /// Per line, whether the seriality axiom was used to derive it.
    pub uses_seriality: Vec<bool>,
    /// The substitution found or confirmed for each axiom line.
    pub substitutions: Vec<Option<Substitution>>,
}

impl Checked {
    pub fn conclusion(&self) -> &Formula {
        self.theorems.last().expect("derivations are nonempty")
    }
}

fn reference(line: usize, r: usize) -> Result<usize, ProofError> {
    if r == 0 || r >= line {
        return Err(ProofError {
            line,
            kind: ProofErrorKind::DanglingReference(r),
        });
    }
    Ok(r - 1)
}

fn check_axiom(
    f: &Formula,
    schema: SchemaId,
    subst: Option<&BTreeMap<String, Formula>>,
    agents: usize,
) -> Result<Substitution, ProofErrorKind> {
    if schema == SchemaId::TAUTOLOGY {
        return match is_tautology(f) {
            Ok(true) => Ok(Substitution::default()),
            Ok(false) => Err(ProofErrorKind::SchemaMismatch(schema)),
            Err(e) => Err(ProofErrorKind::TooManyAtoms(e)),
        };
    }
    let Some(given) = subst else {
        return match_axiom(f, schema, agents).ok_or(ProofErrorKind::SchemaMismatch(schema));
    };
    for i in agents_for(schema, agents) {
        let Some(t) = schema_template(schema, agents, i) else {
            break;
        };
        let s = Substitution {
            agent: schema.per_agent().then_some(i),
            map: given.clone(),
        };
        if s.apply(&t) == *f {
            return Ok(s);
        }
    }
    Err(ProofErrorKind::SchemaMismatch(schema))
}

/// Checks every line of `d` in order; the first failure is reported with
/// its line number.
pub fn check_derivation(d: &Derivation, agents: usize) -> Result<Checked, ProofError> {
    if d.lines.is_empty() {
        return Err(ProofError {
            line: 0,
            kind: ProofErrorKind::Empty,
        });
    }
    let mut out = Checked {
        theorems: Vec::with_capacity(d.lines.len()),
        uses_seriality: Vec::with_capacity(d.lines.len()),
        substitutions: Vec::with_capacity(d.lines.len()),
    };
    for (k, l) in d.lines.iter().enumerate() {
        let line = k + 1;
        let fail = |kind| ProofError { line, kind };
        let f = &l.formula;
        let top = f.max_agent();
        if top > agents {
            return Err(fail(ProofErrorKind::AgentOutOfRange { agent: top, agents }));
        }
        let (subst, serial) = match &l.justification {
            Justification::Axiom { schema, subst } => {
                let s = check_axiom(f, *schema, subst.as_ref(), agents).map_err(fail)?;
                (Some(s), *schema == SchemaId::SERIALITY)
            }
            Justification::R0 {
                premise,
                implication,
            } => {
                let p = reference(line, *premise)?;
                let q = reference(line, *implication)?;
                let expected = Formula::implies(out.theorems[p].clone(), f.clone());
                if out.theorems[q] != expected {
                    return Err(fail(ProofErrorKind::ModusPonens));
                }
                (None, out.uses_seriality[p] || out.uses_seriality[q])
            }
            Justification::R1 { premise } => {
                let p = reference(line, *premise)?;
                let prem = &out.theorems[p];
                match f {
                    Formula::Settled(x) | Formula::Henceforth(x) | Formula::Hitherto(x)
                        if **x == *prem => {}
                    Formula::Stit(i, x) if **x == *prem => {
                        return Err(fail(ProofErrorKind::IllegalNecessitation(format!("[{i}]"))))
                    }
                    Formula::Grand(x) if **x == *prem => {
                        return Err(fail(ProofErrorKind::IllegalNecessitation("[Ag]".into())))
                    }
                    Formula::Ought(i, x) if **x == *prem => {
                        return Err(fail(ProofErrorKind::IllegalNecessitation(format!(
                            "O{{{i}}}"
                        ))))
                    }
                    _ => return Err(fail(ProofErrorKind::NecessitationShape(*premise))),
                }
                (None, out.uses_seriality[p])
            }
            Justification::R2 { premise, var } => {
                let p = reference(line, *premise)?;
                let expected = Formula::implies(Formula::name(var), f.clone());
                if out.theorems[p] != expected {
                    return Err(fail(ProofErrorKind::IrreflexivityShape(var.clone())));
                }
                if f.contains_var(var) {
                    return Err(fail(ProofErrorKind::IrreflexivitySideCondition(
                        var.clone(),
                    )));
                }
                (None, out.uses_seriality[p])
            }
        };
        out.theorems.push(f.clone());
        out.uses_seriality.push(serial);
        out.substitutions.push(subst);
    }
    Ok(out)
}
