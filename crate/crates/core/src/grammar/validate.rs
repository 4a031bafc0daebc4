use std::fmt;

use serde::{Deserialize, Serialize};

use super::{is_valid_word, Grammar, PatternElem, RhsElem, VarKind};

/// A well-formedness problem found by [`Grammar::validate`]. `rule` is the
/// zero-based rule index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    EmptyGrammar,
    EmptyLhs { rule: usize },
    DuplicateVariable { rule: usize, name: String },
    UnboundVariable { rule: usize, name: String },
    DegenerateRule { rule: usize },
    MisplacedOptional { rule: usize, name: String },
    InvalidWord { rule: usize, word: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyGrammar => write!(f, "grammar has no rules"),
            Violation::EmptyLhs { rule } => write!(f, "rule {rule}: empty left hand side"),
            Violation::DuplicateVariable { rule, name } => {
                write!(f, "rule {rule}: {name} bound twice")
            }
            Violation::UnboundVariable { rule, name } => {
                write!(f, "rule {rule}: [{name}] not bound")
            }
            Violation::DegenerateRule { rule } => {
                write!(f, "rule {rule}: rewrites a lone variable to itself")
            }
            Violation::MisplacedOptional { rule, name } => {
                write!(f, "rule {rule}: {name} must come last")
            }
            Violation::InvalidWord { rule, word } => write!(f, "rule {rule}: bad word {word:?}"),
        }
    }
}

impl Grammar {
    /// Lists every well-formedness violation; empty means the grammar is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.rules.is_empty() {
            out.push(Violation::EmptyGrammar);
        }
        for (idx, rule) in self.rules.iter().enumerate() {
            if rule.lhs.is_empty() {
                out.push(Violation::EmptyLhs { rule: idx });
            }
            let mut names: Vec<&str> = Vec::new();
            for (pos, elem) in rule.lhs.iter().enumerate() {
                match elem {
                    PatternElem::Var(v) => {
                        if names.contains(&v.name.as_str()) {
                            out.push(Violation::DuplicateVariable {
                                rule: idx,
                                name: v.name.clone(),
                            });
                        } else {
                            names.push(&v.name);
                        }
                        if v.kind == VarKind::Opt && pos + 1 != rule.lhs.len() {
                            out.push(Violation::MisplacedOptional {
                                rule: idx,
                                name: v.name.clone(),
                            });
                        }
                    }
                    PatternElem::Literal(w) => {
                        if !is_valid_word(w) {
                            out.push(Violation::InvalidWord {
                                rule: idx,
                                word: w.clone(),
                            });
                        }
                    }
                }
            }
            for elem in &rule.rhs {
                match elem {
                    RhsElem::VarRef(name) if !names.contains(&name.as_str()) => {
                        out.push(Violation::UnboundVariable {
                            rule: idx,
                            name: name.clone(),
                        });
                    }
                    RhsElem::Output(w) if !is_valid_word(w) => {
                        out.push(Violation::InvalidWord {
                            rule: idx,
                            word: w.clone(),
                        });
                    }
                    _ => {}
                }
            }
            if rule.is_degenerate() {
                out.push(Violation::DegenerateRule { rule: idx });
            }
        }
        out
    }
}
