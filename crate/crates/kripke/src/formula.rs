//! Modal formulas: syntax, a recursive-descent parser, and frame validity.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! imp   := or ( "->" imp )?
//! or    := and ( "|" and )*
//! and   := unary ( "&" unary )*
//! unary := ("~" | "dia" | "box" | "boxp") unary | atom
//! atom  := "p1" | "p2" | ... | "bot" | "top" | "(" imp ")"
//! ```
//!
//! `boxp x` abbreviates `x & box x`.

use std::fmt;

use crate::error::{Error, Result};
use crate::frame_core::{Frame, WorldSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Top,
    /// `p1` is `Var(1)`.
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Dia(Box<Formula>),
    Box(Box<Formula>),
}

impl Formula {
    pub fn var(i: usize) -> Formula {
        Formula::Var(i)
    }

    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(Box::new(a))
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    /// `a & box a`.
    pub fn boxp(a: Formula) -> Formula {
        Formula::and(a.clone(), Formula::boxed(a))
    }

    /// Largest variable index occurring in the formula.
    pub fn var_count(&self) -> usize {
        match self {
            Formula::Bot | Formula::Top => 0,
            Formula::Var(i) => *i,
            Formula::Not(a) | Formula::Dia(a) | Formula::Box(a) => a.var_count(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => a.var_count().max(b.var_count()),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bot => write!(f, "bot"),
            Formula::Top => write!(f, "top"),
            Formula::Var(i) => write!(f, "p{i}"),
            Formula::Not(a) => write!(f, "~{}", Paren(a)),
            Formula::Dia(a) => write!(f, "dia {}", Paren(a)),
            Formula::Box(a) => write!(f, "box {}", Paren(a)),
            Formula::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Formula::Or(a, b) => write!(f, "{} | {}", Paren(a), Paren(b)),
            Formula::Imp(a, b) => write!(f, "{} -> {}", Paren(a), Paren(b)),
        }
    }
}

/// Parenthesizes anything that is not atomic or unary.
struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::And(..) | Formula::Or(..) | Formula::Imp(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Formula> {
        parse(s)
    }
}

// ---- parser ----

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Bot,
    Top,
    Not,
    And,
    Or,
    Imp,
    Dia,
    Box,
    BoxP,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'~' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Imp
            }
            c if c.is_ascii_alphabetic() => {
                while i + 1 < bytes.len() && bytes[i + 1].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word = &text[start..=i];
                match word {
                    "dia" => Tok::Dia,
                    "box" => Tok::Box,
                    "boxp" => Tok::BoxP,
                    "bot" => Tok::Bot,
                    "top" => Tok::Top,
                    w => match w.strip_prefix('p').and_then(|d| d.parse::<usize>().ok()) {
                        Some(n) if n >= 1 && !w[1..].starts_with('0') => Tok::Var(n),
                        _ => return Err(parse_error(start, format!("unknown word `{w}`"))),
                    },
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(parse_error(start, format!("unexpected character `{ch}`")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

fn parse_error(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse { offset, message: message.into() }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn imp(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Tok::Imp) {
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut acc = self.and()?;
        while self.eat(&Tok::Or) {
            acc = Formula::or(acc, self.and()?);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.eat(&Tok::And) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Dia) => Formula::dia,
            Some(Tok::Box) => Formula::boxed,
            Some(Tok::BoxP) => Formula::boxp,
            _ => return self.atom(),
        };
        self.pos += 1;
        Ok(wrap(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(parse_error(offset, "unexpected end of input"));
        };
        self.pos += 1;
        match tok {
            Tok::Var(i) => Ok(Formula::Var(i)),
            Tok::Bot => Ok(Formula::Bot),
            Tok::Top => Ok(Formula::Top),
            Tok::LParen => {
                let inner = self.imp()?;
                if !self.eat(&Tok::RParen) {
                    return Err(parse_error(self.offset(), "expected `)`"));
                }
                Ok(inner)
            }
            other => Err(parse_error(offset, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parses a formula; errors carry the byte offset of the offending token.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let f = p.imp()?;
    if p.pos < p.toks.len() {
        return Err(parse_error(p.offset(), "trailing input"));
    }
    Ok(f)
}

// ---- semantics ----

/// One world set per variable; `sets[0]` interprets `p1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub sets: Vec<WorldSet>,
}

/// Frames up to this size are evaluated with machine-word masks.
pub const MAX_EVAL_SIZE: usize = 64;

/// Default cap on the number of valuations tried by [`frame_validates`].
pub const DEFAULT_VALUATIONS: u64 = 4096;

struct Masks {
    full: u64,
    succ: Vec<u64>,
}

impl Masks {
    fn new(f: &Frame) -> Result<Masks> {
        if f.size() > MAX_EVAL_SIZE {
            return Err(Error::BudgetExceeded(format!("evaluating on a frame with {} worlds", f.size())));
        }
        let succ = f.worlds().map(|w| f.successors(w).ones().fold(0u64, |m, v| m | 1 << v)).collect();
        let full = if f.size() == 64 { u64::MAX } else { (1u64 << f.size()) - 1 };
        Ok(Masks { full, succ })
    }

    fn dia(&self, x: u64) -> u64 {
        self.succ.iter().enumerate().fold(0, |m, (w, &s)| if s & x != 0 { m | 1 << w } else { m })
    }

    fn eval(&self, phi: &Formula, val: &[u64]) -> u64 {
        match phi {
            Formula::Bot => 0,
            Formula::Top => self.full,
            Formula::Var(i) => val[i - 1],
            Formula::Not(a) => self.full & !self.eval(a, val),
            Formula::And(a, b) => self.eval(a, val) & self.eval(b, val),
            Formula::Or(a, b) => self.eval(a, val) | self.eval(b, val),
            Formula::Imp(a, b) => (self.full & !self.eval(a, val)) | self.eval(b, val),
            Formula::Dia(a) => self.dia(self.eval(a, val)),
            Formula::Box(a) => self.full & !self.dia(self.full & !self.eval(a, val)),
        }
    }
}

/// The worlds where `phi` holds under `val`.
pub fn evaluate(f: &Frame, phi: &Formula, val: &Valuation) -> Result<WorldSet> {
    let masks = Masks::new(f)?;
    if val.sets.len() < phi.var_count() {
        return Err(Error::Precondition("valuation misses a variable".into()));
    }
    let raw: Vec<u64> = val.sets.iter().map(|s| s.iter().fold(0u64, |m, w| m | 1 << w)).collect();
    let m = masks.eval(phi, &raw);
    Ok(WorldSet::from_worlds(f.size(), (0..f.size()).filter(|&w| m >> w & 1 == 1)))
}

/// `phi` holds everywhere under every valuation of its variables.
pub fn frame_validates(f: &Frame, phi: &Formula) -> Result<bool> {
    frame_validates_with(f, phi, DEFAULT_VALUATIONS)
}

/// As [`frame_validates`], but with an explicit cap on the number of valuations.
pub fn frame_validates_with(f: &Frame, phi: &Formula, max_valuations: u64) -> Result<bool> {
    let masks = Masks::new(f)?;
    let vars = phi.var_count();
    let bits = vars * f.size();
    if bits >= 64 || 1u64 << bits > max_valuations {
        return Err(Error::BudgetExceeded(format!("enumerating 2^{bits} valuations")));
    }
    let n = f.size();
    let mut val = vec![0u64; vars];
    for code in 0u64..(1 << bits) {
        for (i, v) in val.iter_mut().enumerate() {
            *v = (code >> (i * n)) & masks.full;
        }
        if masks.eval(phi, &val) != masks.full {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn frame_validates_all(f: &Frame, axioms: &[Formula]) -> Result<bool> {
    for a in axioms {
        if !frame_validates(f, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---- the table of logics ----

/// One row of the table: an axiom set and the frame condition it corresponds to.
pub struct TableRow {
    pub name: &'static str,
    pub axioms: Vec<Formula>,
    pub condition: fn(&Frame) -> bool,
}

pub const AX_4: &str = "box p1 -> box box p1";
pub const AX_T: &str = "box p1 -> p1";
pub const AX_2: &str = "dia box p1 -> box dia p1";
pub const AX_3: &str = "box (box p1 -> p2) | box (box p2 -> p1)";
pub const AX_GRZ: &str = "box (box (p1 -> box p1) -> p1) -> p1";
pub const AX_B: &str = "p1 -> box dia p1";
pub const AX_GL: &str = "box (box p1 -> p1) -> box p1";
pub const AX_3_PLUS: &str = "boxp (boxp p1 -> p2) | boxp (boxp p2 -> p1)";

fn axioms(list: &[&str]) -> Vec<Formula> {
    list.iter().map(|s| parse(s).expect("built-in axiom parses")).collect()
}

/// The rows for K, K4, S4, S4.2, S4.3, Grz, Grz.3, S5, GL and GL.3.
///
/// S5 is axiomatized as S4 plus `p1 -> box dia p1`: without reflexivity the
/// symmetric transitive frames with an isolated irreflexive point would slip in.
pub fn table() -> Vec<TableRow> {
    vec![
        TableRow { name: "K", axioms: vec![], condition: |_| true },
        TableRow { name: "K4", axioms: axioms(&[AX_4]), condition: Frame::is_transitive },
        TableRow { name: "S4", axioms: axioms(&[AX_4, AX_T]), condition: Frame::is_preorder },
        TableRow {
            name: "S4.2",
            axioms: axioms(&[AX_4, AX_T, AX_2]),
            condition: |f| f.is_preorder() && f.is_confluent(),
        },
        TableRow {
            name: "S4.3",
            axioms: axioms(&[AX_4, AX_T, AX_3]),
            condition: |f| f.is_preorder() && f.is_locally_linear(),
        },
        TableRow {
            name: "Grz",
            axioms: axioms(&[AX_4, AX_T, AX_GRZ]),
            condition: |f| f.is_preorder() && f.is_antisymmetric(),
        },
        TableRow {
            name: "Grz.3",
            axioms: axioms(&[AX_4, AX_T, AX_3, AX_GRZ]),
            condition: |f| f.is_preorder() && f.is_antisymmetric() && f.is_locally_linear(),
        },
        TableRow { name: "S5", axioms: axioms(&[AX_4, AX_T, AX_B]), condition: Frame::is_equivalence },
        TableRow {
            name: "GL",
            axioms: axioms(&[AX_4, AX_GL]),
            condition: |f| f.is_transitive() && f.is_irreflexive(),
        },
        TableRow {
            name: "GL.3",
            axioms: axioms(&[AX_4, AX_GL, AX_3_PLUS]),
            condition: |f| f.is_transitive() && f.is_irreflexive() && f.is_locally_linear(),
        },
    ]
}
