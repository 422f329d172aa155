//! Formulas of the temporal deontic STIT language.
//!
//! Surface syntax is desugared on parse: the tree only ever contains the
//! core constructors of [`Formula`]. Duals (`dia`, `<i>`, `<Ag>`, `F`, `P`,
//! `o{i}`), the boolean connectives `|`, `->`, `<->` and the deliberative
//! operators `[di]` / `Od{i}` are expanded into `Not`/`And` over the core
//! modalities.
//!
//! ```text
//! formula  ::= imp ( "<->" imp )*
//! imp      ::= disj ( "->" imp )?
//! disj     ::= conj ( "|" conj )*
//! conj     ::= unary ( "&" unary )*
//! unary    ::= prefix unary | atom
//! prefix   ::= "~" | "box" | "dia" | "G" | "H" | "F" | "P"
//!            | "[Ag]" | "<Ag>" | "[" n "]" | "<" n ">" | "[d" n "]"
//!            | "O{" n "}" | "o{" n "}" | "Od{" n "}"
//! atom     ::= ident | "top" | "bot" | "(" formula ")"
//! ident    ::= [a-z][a-z0-9_]*
//! ```

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Agent label, 1-based.
pub type AgentId = usize;

/// A formula built from the core constructors only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Var(String),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// Settledness: true at every world of the moment.
    Settled(Box<Formula>),
    /// `[i]`: agent i's current choice guarantees the operand.
    Stit(AgentId, Box<Formula>),
    /// `[Ag]`: the grand coalition's joint choice guarantees the operand.
    Grand(Box<Formula>),
    /// `G`: always going to be.
    Henceforth(Box<Formula>),
    /// `H`: always has been.
    Hitherto(Box<Formula>),
    /// `O{i}`: agent i ought to see to it that.
    Ought(AgentId, Box<Formula>),
}

impl Formula {
    pub fn var(name: impl Into<String>) -> Self {
        Formula::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn settled(f: Formula) -> Self {
        Formula::Settled(Box::new(f))
    }

    pub fn possible(f: Formula) -> Self {
        Formula::not(Formula::settled(Formula::not(f)))
    }

    pub fn stit(i: AgentId, f: Formula) -> Self {
        Formula::Stit(i, Box::new(f))
    }

    pub fn stit_dual(i: AgentId, f: Formula) -> Self {
        Formula::not(Formula::stit(i, Formula::not(f)))
    }

    pub fn grand(f: Formula) -> Self {
        Formula::Grand(Box::new(f))
    }

    pub fn grand_dual(f: Formula) -> Self {
        Formula::not(Formula::grand(Formula::not(f)))
    }

    pub fn henceforth(f: Formula) -> Self {
        Formula::Henceforth(Box::new(f))
    }

    /// `F`: at some point in the future.
    pub fn eventually(f: Formula) -> Self {
        Formula::not(Formula::henceforth(Formula::not(f)))
    }

    pub fn hitherto(f: Formula) -> Self {
        Formula::Hitherto(Box::new(f))
    }

    /// `P`: at some point in the past.
    pub fn once(f: Formula) -> Self {
        Formula::not(Formula::hitherto(Formula::not(f)))
    }

    pub fn ought(i: AgentId, f: Formula) -> Self {
        Formula::Ought(i, Box::new(f))
    }

    pub fn ought_dual(i: AgentId, f: Formula) -> Self {
        Formula::not(Formula::ought(i, Formula::not(f)))
    }

    /// Deliberative stit: `[i]f & ~box f`.
    pub fn deliberative_stit(i: AgentId, f: Formula) -> Self {
        Formula::and(
            Formula::stit(i, f.clone()),
            Formula::not(Formula::settled(f)),
        )
    }

    /// Deliberative ought: `O{i}f & ~box f`.
    pub fn deliberative_ought(i: AgentId, f: Formula) -> Self {
        Formula::and(
            Formula::ought(i, f.clone()),
            Formula::not(Formula::settled(f)),
        )
    }

    /// `box ~p & box (G p & H p)`: true exactly at the worlds of a moment
    /// that p avoids while p holds at every earlier and later world.
    pub fn name(p: &str) -> Self {
        let p = Formula::var(p);
        Formula::and(
            Formula::settled(Formula::not(p.clone())),
            Formula::settled(Formula::and(
                Formula::henceforth(p.clone()),
                Formula::hitherto(p),
            )),
        )
    }

    /// Direct children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot => Vec::new(),
            Formula::And(a, b) => alloc::vec![a.as_ref(), b.as_ref()],
            Formula::Not(f)
            | Formula::Settled(f)
            | Formula::Stit(_, f)
            | Formula::Grand(f)
            | Formula::Henceforth(f)
            | Formula::Hitherto(f)
            | Formula::Ought(_, f) => alloc::vec![f.as_ref()],
        }
    }

    /// Nesting depth of constructors; atoms have depth 0.
    pub fn depth(&self) -> usize {
        self.children()
            .into_iter()
            .map(|c| c.depth() + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    /// Number of nested modal operators (booleans do not count).
    pub fn modal_depth(&self) -> usize {
        let inner = self
            .children()
            .into_iter()
            .map(Formula::modal_depth)
            .max()
            .unwrap_or(0);
        match self {
            Formula::Var(_) | Formula::Top | Formula::Bot | Formula::Not(_) | Formula::And(..) => {
                inner
            }
            _ => inner + 1,
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        if let Formula::Var(v) = self {
            out.insert(v.as_str());
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Formula::Var(v) => v == name,
            _ => self.children().into_iter().any(|c| c.contains_var(name)),
        }
    }

    /// Every distinct subformula, including `self`, in post-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out: Vec<&Formula> = Vec::new();
        let mut seen: BTreeSet<&Formula> = BTreeSet::new();
        self.collect_subformulas(&mut out, &mut seen);
        out
    }

    fn collect_subformulas<'a>(
        &'a self,
        out: &mut Vec<&'a Formula>,
        seen: &mut BTreeSet<&'a Formula>,
    ) {
        for c in self.children() {
            c.collect_subformulas(out, seen);
        }
        if seen.insert(self) {
            out.push(self);
        }
    }

    pub fn is_ought_free(&self) -> bool {
        match self {
            Formula::Ought(..) => false,
            _ => self.children().into_iter().all(Formula::is_ought_free),
        }
    }

    /// Largest agent index mentioned, 0 if none.
    pub fn max_agent(&self) -> AgentId {
        let own = match self {
            Formula::Stit(i, _) | Formula::Ought(i, _) => *i,
            _ => 0,
        };
        self.children()
            .into_iter()
            .map(Formula::max_agent)
            .fold(own, usize::max)
    }

    /// Replaces every variable that has an entry in `subst`.
    pub fn substitute(&self, subst: &dyn Fn(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Var(v) => subst(v).unwrap_or_else(|| self.clone()),
            Formula::Top | Formula::Bot => self.clone(),
            Formula::Not(f) => Formula::not(f.substitute(subst)),
            Formula::And(a, b) => Formula::and(a.substitute(subst), b.substitute(subst)),
            Formula::Settled(f) => Formula::settled(f.substitute(subst)),
            Formula::Stit(i, f) => Formula::stit(*i, f.substitute(subst)),
            Formula::Grand(f) => Formula::grand(f.substitute(subst)),
            Formula::Henceforth(f) => Formula::henceforth(f.substitute(subst)),
            Formula::Hitherto(f) => Formula::hitherto(f.substitute(subst)),
            Formula::Ought(i, f) => Formula::ought(*i, f.substitute(subst)),
        }
    }
}

/// Canonical, fully parenthesized rendering. Duals are never re-sugared.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(v) => f.write_str(v),
            Formula::Top => f.write_str("top"),
            Formula::Bot => f.write_str("bot"),
            Formula::Not(x) => write!(f, "~ {x}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Settled(x) => write!(f, "box {x}"),
            Formula::Stit(i, x) => write!(f, "[{i}] {x}"),
            Formula::Grand(x) => write!(f, "[Ag] {x}"),
            Formula::Henceforth(x) => write!(f, "G {x}"),
            Formula::Hitherto(x) => write!(f, "H {x}"),
            Formula::Ought(i, x) => write!(f, "O{{{i}}} {x}"),
        }
    }
}

pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("agent index {index} out of range 1..={agents} at offset {pos}")]
    AgentOutOfRange {
        pos: usize,
        index: usize,
        agents: usize,
    },
    #[error("agent count must be at least 1")]
    NoAgents,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    Box,
    Dia,
    G,
    H,
    F,
    P,
    Top,
    Bot,
    Grand,
    GrandDia,
    Stit(usize),
    StitDia(usize),
    DelStit(usize),
    Ought(usize),
    OughtDia(usize),
    DelOught(usize),
    Ident(String),
}

impl Tok {
    fn agent(&self) -> Option<usize> {
        match self {
            Tok::Stit(n)
            | Tok::StitDia(n)
            | Tok::DelStit(n)
            | Tok::Ought(n)
            | Tok::OughtDia(n)
            | Tok::DelOught(n) => Some(*n),
            _ => None,
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos,
            msg: msg.into(),
        }
    }

    fn peek_byte(&self, off: usize) -> Option<u8> {
        self.bytes.get(self.pos + off).copied()
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn number_until(&mut self, start: usize, close: u8) -> Result<usize, ParseError> {
        let begin = self.pos;
        while matches!(self.peek_byte(0), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if self.pos == begin {
            return Err(self.err(start, "expected agent index"));
        }
        let n: usize = self.src[begin..self.pos]
            .parse()
            .map_err(|_| self.err(start, "agent index too large"))?;
        if self.peek_byte(0) != Some(close) {
            return Err(self.err(self.pos, format!("expected '{}'", close as char)));
        }
        self.pos += 1;
        Ok(n)
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek_byte(0), Some(b) if b.is_ascii_whitespace()) {
                self.pos += 1;
            }
            let start = self.pos;
            let Some(b) = self.peek_byte(0) else {
                return Ok(out);
            };
            let tok = match b {
                b'~' => {
                    self.pos += 1;
                    Tok::Tilde
                }
                b'&' => {
                    self.pos += 1;
                    Tok::Amp
                }
                b'|' => {
                    self.pos += 1;
                    Tok::Pipe
                }
                b'(' => {
                    self.pos += 1;
                    Tok::LParen
                }
                b')' => {
                    self.pos += 1;
                    Tok::RParen
                }
                b'-' if self.rest().starts_with("->") => {
                    self.pos += 2;
                    Tok::Arrow
                }
                b'<' if self.rest().starts_with("<->") => {
                    self.pos += 3;
                    Tok::DArrow
                }
                b'<' if self.rest().starts_with("<Ag>") => {
                    self.pos += 4;
                    Tok::GrandDia
                }
                b'<' => {
                    self.pos += 1;
                    Tok::StitDia(self.number_until(start, b'>')?)
                }
                b'[' if self.rest().starts_with("[Ag]") => {
                    self.pos += 4;
                    Tok::Grand
                }
                b'[' if self.peek_byte(1) == Some(b'd') => {
                    self.pos += 2;
                    Tok::DelStit(self.number_until(start, b']')?)
                }
                b'[' => {
                    self.pos += 1;
                    Tok::Stit(self.number_until(start, b']')?)
                }
                b'O' if self.rest().starts_with("Od{") => {
                    self.pos += 3;
                    Tok::DelOught(self.number_until(start, b'}')?)
                }
                b'O' if self.rest().starts_with("O{") => {
                    self.pos += 2;
                    Tok::Ought(self.number_until(start, b'}')?)
                }
                b'o' if self.rest().starts_with("o{") => {
                    self.pos += 2;
                    Tok::OughtDia(self.number_until(start, b'}')?)
                }
                b'G' | b'H' | b'F' | b'P' => {
                    self.pos += 1;
                    match b {
                        b'G' => Tok::G,
                        b'H' => Tok::H,
                        b'F' => Tok::F,
                        _ => Tok::P,
                    }
                }
                b'a'..=b'z' => {
                    while matches!(self.peek_byte(0), Some(b'a'..=b'z' | b'0'..=b'9' | b'_')) {
                        self.pos += 1;
                    }
                    match &self.src[start..self.pos] {
                        "box" => Tok::Box,
                        "dia" => Tok::Dia,
                        "top" => Tok::Top,
                        "bot" => Tok::Bot,
                        word => Tok::Ident(word.to_string()),
                    }
                }
                _ => {
                    let ch = self.rest().chars().next().unwrap_or('?');
                    return Err(self.err(start, format!("unexpected character '{ch}'")));
                }
            };
            out.push((start, tok));
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    agents: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while self.eat(&Tok::DArrow) {
            let rhs = self.imp()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.imp()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conj()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            });
        };
        if let Some(i) = tok.agent() {
            if i == 0 || i > self.agents {
                return Err(ParseError::AgentOutOfRange {
                    pos,
                    index: i,
                    agents: self.agents,
                });
            }
        }
        let wrap: fn(usize, Formula) -> Formula = match tok {
            Tok::Tilde => |_, f| Formula::not(f),
            Tok::Box => |_, f| Formula::settled(f),
            Tok::Dia => |_, f| Formula::possible(f),
            Tok::G => |_, f| Formula::henceforth(f),
            Tok::H => |_, f| Formula::hitherto(f),
            Tok::F => |_, f| Formula::eventually(f),
            Tok::P => |_, f| Formula::once(f),
            Tok::Grand => |_, f| Formula::grand(f),
            Tok::GrandDia => |_, f| Formula::grand_dual(f),
            Tok::Stit(_) => Formula::stit,
            Tok::StitDia(_) => Formula::stit_dual,
            Tok::DelStit(_) => Formula::deliberative_stit,
            Tok::Ought(_) => Formula::ought,
            Tok::OughtDia(_) => Formula::ought_dual,
            Tok::DelOught(_) => Formula::deliberative_ought,
            _ => return self.atom(),
        };
        self.idx += 1;
        let operand = self.unary()?;
        Ok(wrap(tok.agent().unwrap_or(0), operand))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                Ok(Formula::Var(name))
            }
            Some(Tok::Top) => {
                self.idx += 1;
                Ok(Formula::Top)
            }
            Some(Tok::Bot) => {
                self.idx += 1;
                Ok(Formula::Bot)
            }
            Some(Tok::LParen) => {
                self.idx += 1;
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return Err(ParseError::Syntax {
                        pos: self.pos(),
                        msg: "expected ')'".into(),
                    });
                }
                Ok(inner)
            }
            Some(t) => Err(ParseError::Syntax {
                pos,
                msg: format!("unexpected token {t:?}"),
            }),
            None => Err(ParseError::Syntax {
                pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses surface syntax into the desugared core tree. Agent indices must
/// lie in `1..=agents`.
pub fn parse(text: &str, agents: usize) -> Result<Formula, ParseError> {
    if agents == 0 {
        return Err(ParseError::NoAgents);
    }
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser {
        toks,
        idx: 0,
        end: text.len(),
        agents,
    };
    let f = p.iff()?;
    if p.idx != p.toks.len() {
        return Err(ParseError::Syntax {
            pos: p.pos(),
            msg: "trailing input".into(),
        });
    }
    Ok(f)
}

/// All core formulas of depth at most `depth` over `vars`, in a fixed order:
/// shallower formulas first; within a level, unary constructors before
/// conjunctions.
pub fn enumerate_formulas(depth: usize, vars: &[&str], agents: usize) -> Vec<Formula> {
    let mut all: Vec<Formula> = vars.iter().map(|v| Formula::var(*v)).collect();
    all.push(Formula::Top);
    all.push(Formula::Bot);
    // Formulas of exactly the previous depth.
    let mut frontier_start = 0;
    for _ in 0..depth {
        let prev_len = all.len();
        let mut next = Vec::new();
        for f in &all[frontier_start..prev_len] {
            next.push(Formula::not(f.clone()));
            next.push(Formula::settled(f.clone()));
            for i in 1..=agents {
                next.push(Formula::stit(i, f.clone()));
            }
            next.push(Formula::grand(f.clone()));
            next.push(Formula::henceforth(f.clone()));
            next.push(Formula::hitherto(f.clone()));
            for i in 1..=agents {
                next.push(Formula::ought(i, f.clone()));
            }
        }
        // Conjunctions with at least one conjunct from the frontier.
        for (ai, a) in all[..prev_len].iter().enumerate() {
            for (bi, b) in all[..prev_len].iter().enumerate() {
                if ai >= frontier_start || bi >= frontier_start {
                    next.push(Formula::and(a.clone(), b.clone()));
                }
            }
        }
        frontier_start = prev_len;
        all.extend(next);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p() -> Formula {
        Formula::var("p")
    }

    #[test]
    fn dia_is_desugared() {
        let f = parse("dia p", 1).unwrap();
        assert_eq!(f, Formula::not(Formula::settled(Formula::not(p()))));
    }

    #[test]
    fn ought_of_implication() {
        let f = parse("O{1} (G p -> [1] q)", 2).unwrap();
        let expected = Formula::ought(
            1,
            Formula::implies(
                Formula::henceforth(p()),
                Formula::stit(1, Formula::var("q")),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn agent_out_of_range() {
        assert_eq!(
            parse("[2] p", 1),
            Err(ParseError::AgentOutOfRange {
                pos: 0,
                index: 2,
                agents: 1
            })
        );
        assert!(matches!(
            parse("p & O{0} q", 3),
            Err(ParseError::AgentOutOfRange {
                pos: 4,
                index: 0,
                ..
            })
        ));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(
            parse("p & ", 1),
            Err(ParseError::Syntax {
                pos: 4,
                msg: "unexpected end of input".into()
            })
        );
        assert!(matches!(
            parse("(p", 1),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse("p $ q", 1),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            parse("p q", 1),
            Err(ParseError::Syntax { pos: 2, .. })
        ));
        assert_eq!(parse("p", 0), Err(ParseError::NoAgents));
    }

    #[test]
    fn printing_is_core_only() {
        assert_eq!(print(&Formula::ought(1, p())), "O{1} p");
        assert_eq!(
            print(&Formula::not(Formula::settled(Formula::not(p())))),
            "~ box ~ p"
        );
        assert_eq!(print(&Formula::and(p(), Formula::Top)), "(p & top)");
    }

    #[test]
    fn precedence_and_associativity() {
        let q = Formula::var("q");
        let r = Formula::var("r");
        assert_eq!(
            parse("p -> q -> r", 1).unwrap(),
            Formula::implies(p(), Formula::implies(q.clone(), r.clone()))
        );
        assert_eq!(
            parse("p & q | r", 1).unwrap(),
            Formula::or(Formula::and(p(), q.clone()), r.clone())
        );
        assert_eq!(
            parse("~ p & q", 1).unwrap(),
            Formula::and(Formula::not(p()), q.clone())
        );
        assert_eq!(
            parse("p | q <-> r", 1).unwrap(),
            Formula::iff(Formula::or(p(), q), r)
        );
    }

    #[test]
    fn every_surface_token() {
        let cases = [
            ("<1> p", Formula::stit_dual(1, p())),
            ("<Ag> p", Formula::grand_dual(p())),
            ("[Ag] p", Formula::grand(p())),
            ("F p", Formula::eventually(p())),
            ("P p", Formula::once(p())),
            ("o{2} p", Formula::ought_dual(2, p())),
            ("[d1] p", Formula::deliberative_stit(1, p())),
            ("Od{2} p", Formula::deliberative_ought(2, p())),
            ("top | bot", Formula::or(Formula::Top, Formula::Bot)),
            ("H G p", Formula::hitherto(Formula::henceforth(p()))),
            ("o", Formula::var("o")),
            ("boxer", Formula::var("boxer")),
        ];
        for (src, expected) in cases {
            assert_eq!(parse(src, 2).unwrap(), expected, "{src}");
        }
    }

    #[test]
    fn deliberative_ought_uses_negated_box() {
        let f = parse("Od{1} p", 1).unwrap();
        assert_eq!(
            f,
            Formula::and(Formula::ought(1, p()), Formula::not(Formula::settled(p())))
        );
    }

    #[test]
    fn enumeration_base_and_first_level() {
        assert_eq!(
            enumerate_formulas(0, &["p"], 1),
            vec![p(), Formula::Top, Formula::Bot]
        );
        let one = enumerate_formulas(1, &["p"], 1);
        for f in [
            Formula::settled(p()),
            Formula::stit(1, p()),
            Formula::grand(p()),
            Formula::henceforth(p()),
            Formula::hitherto(p()),
            Formula::ought(1, p()),
            Formula::not(p()),
            Formula::and(p(), p()),
        ] {
            assert!(one.contains(&f), "{f}");
        }
        assert!(one.iter().all(|f| f.depth() <= 1));
    }

    #[test]
    fn enumeration_counts_are_stable() {
        // 4 atoms, 9 unary constructors, 16 conjunctions.
        assert_eq!(enumerate_formulas(1, &["p", "q"], 2).len(), 56);
        assert_eq!(enumerate_formulas(2, &["p", "q"], 2).len(), 3644);
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let all = enumerate_formulas(2, &["p", "q"], 2);
        let set: BTreeSet<&Formula> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }

    #[test]
    fn name_formula_shape() {
        assert_eq!(
            Formula::name("p"),
            parse("box ~p & box (G p & H p)", 1).unwrap()
        );
    }

    #[test]
    fn helpers() {
        let f = parse("O{2} (p & [1] q)", 2).unwrap();
        assert_eq!(f.max_agent(), 2);
        assert_eq!(f.modal_depth(), 2);
        assert!(f.contains_var("q"));
        assert!(!f.is_ought_free());
        assert_eq!(f.vars().into_iter().collect::<Vec<_>>(), vec!["p", "q"]);
        assert_eq!(f.subformulas().len(), 5);
    }
}
