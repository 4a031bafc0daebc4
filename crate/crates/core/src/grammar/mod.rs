//! Interpretation grammars: ordered rewrite rules over word sequences.
//!
//! A rule's left hand side is a pattern of literal words and variables. Three
//! variable classes exist:
//!
//! * `u<n>` matches exactly one word,
//! * `x<n>` matches a nonempty contiguous run of words,
//! * `y<n>` matches a possibly empty run and may only appear last.
//!
//! The right hand side is a sequence of output words and bracketed variable
//! references (`[x1]`). Evaluation tries rules in order; the first rule whose
//! pattern covers the entire input fires, and each referenced variable is
//! rewritten recursively by the same grammar.

mod eval;
mod matching;
mod parse;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use eval::Meter;
pub use eval::{evaluate, EvalLimits, Limit, Step, DEFAULT_DEPTH_CAP, DEFAULT_EVAL_BUDGET};
pub use matching::{match_lhs, Bindings};
pub(crate) use parse::{check_bound, rule_lines, split_arrow, take_bracketed};
pub use parse::{is_valid_word, parse_grammar, parse_lhs, parse_var, EMPTY_STRING};
pub use validate::Violation;

/// Splits a whitespace-separated phrase into owned words.
pub fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKind {
    /// `u`: exactly one word.
    Prim,
    /// `x`: one or more words.
    Str,
    /// `y`: zero or more words.
    Opt,
}

impl VarKind {
    pub fn prefix(self) -> char {
        match self {
            VarKind::Prim => 'u',
            VarKind::Str => 'x',
            VarKind::Opt => 'y',
        }
    }

    /// Fewest words a variable of this kind can bind.
    pub fn min_len(self) -> usize {
        match self {
            VarKind::Opt => 0,
            _ => 1,
        }
    }
}

/// A pattern variable such as `x1` or `u2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var {
    pub kind: VarKind,
    /// Full lexeme, prefix included (`"x1"`).
    pub name: String,
}

impl Var {
    pub fn new(kind: VarKind, index: u32) -> Self {
        Var {
            kind,
            name: format!("{}{}", kind.prefix(), index),
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternElem {
    Literal(String),
    Var(Var),
}

impl PatternElem {
    pub fn literal(word: &str) -> Self {
        PatternElem::Literal(word.to_owned())
    }

    pub fn var(kind: VarKind, index: u32) -> Self {
        PatternElem::Var(Var::new(kind, index))
    }

    pub fn as_literal(&self) -> Option<&str> {
        match self {
            PatternElem::Literal(w) => Some(w),
            PatternElem::Var(_) => None,
        }
    }

    fn min_len(&self) -> usize {
        match self {
            PatternElem::Literal(_) => 1,
            PatternElem::Var(v) => v.kind.min_len(),
        }
    }
}

impl fmt::Display for PatternElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternElem::Literal(w) => f.write_str(w),
            PatternElem::Var(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RhsElem {
    Output(String),
    /// Reference to a left hand side variable by name.
    VarRef(String),
}

impl fmt::Display for RhsElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsElem::Output(w) => f.write_str(w),
            RhsElem::VarRef(name) => write!(f, "[{name}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    pub lhs: Vec<PatternElem>,
    pub rhs: Vec<RhsElem>,
}

impl Rule {
    pub fn new(lhs: Vec<PatternElem>, rhs: Vec<RhsElem>) -> Self {
        Rule { lhs, rhs }
    }

    /// Variables of the left hand side, in pattern order.
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.lhs.iter().filter_map(|e| match e {
            PatternElem::Var(v) => Some(v),
            PatternElem::Literal(_) => None,
        })
    }

    /// A rule whose pattern is a single variable that its right hand side
    /// references rewrites an input to itself and can loop forever.
    pub fn is_degenerate(&self) -> bool {
        match self.lhs.as_slice() {
            [PatternElem::Var(v)] => self
                .rhs
                .iter()
                .any(|e| matches!(e, RhsElem::VarRef(name) if *name == v.name)),
            _ => false,
        }
    }

    /// `word -> OUT` or `word -> EMPTY_STRING`.
    pub fn is_primitive(&self) -> bool {
        matches!(self.lhs.as_slice(), [PatternElem::Literal(_)])
            && self.rhs.iter().all(|e| matches!(e, RhsElem::Output(_)))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.lhs)?;
        f.write_str(" -> ")?;
        if self.rhs.is_empty() {
            f.write_str(EMPTY_STRING)
        } else {
            write_joined(f, &self.rhs)
        }
    }
}

pub(crate) fn write_joined<T: fmt::Display>(
    f: &mut fmt::Formatter<'_>,
    items: &[T],
) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

/// An ordered rule list; earlier rules take priority.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grammar {
    pub rules: Vec<Rule>,
}

impl Grammar {
    pub fn new(rules: Vec<Rule>) -> Self {
        Grammar { rules }
    }

    /// Input words mentioned as literals anywhere in the grammar.
    pub fn input_words(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for rule in &self.rules {
            for elem in &rule.lhs {
                if let PatternElem::Literal(w) = elem {
                    if !seen.contains(&w.as_str()) {
                        seen.push(w.as_str());
                    }
                }
            }
        }
        seen
    }
}

/// Canonical text form, one rule per line, no trailing newline.
pub fn print_grammar(g: &Grammar) -> String {
    g.to_string()
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, rule) in self.rules.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{rule}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Grammar {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grammar(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: variable [{name}] is not bound on the left hand side")]
    UnboundVariable { line: usize, name: String },
    #[error("line {line}: variable {name} appears more than once on the left hand side")]
    DuplicateVariable { line: usize, name: String },
    #[error("line {line}: negative literal {literal}")]
    NegativeLiteral { line: usize, literal: String },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }

    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. }
            | ParseError::UnboundVariable { line, .. }
            | ParseError::DuplicateVariable { line, .. }
            | ParseError::NegativeLiteral { line, .. } => *line,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no rule matches \"{}\"", .input.join(" "))]
    NoMatch { input: Vec<String> },
    #[error("evaluation exceeded its {limit} limit")]
    BudgetExceeded { limit: Limit },
    #[error("arithmetic overflow")]
    Overflow,
}
