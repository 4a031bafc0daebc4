//! Number-word grammars: the rewrite formalism with arithmetic right hand
//! sides, mapping word sequences to integers.
//!
//! ```text
//! token14 token10 -> 10
//! x1 token13 y1 -> [x1]*100 + [y1]
//! u1 x1 -> [u1] + [x1]
//! ```
//!
//! A right hand side is a sum of products over integer literals and variable
//! references. `y` variables may bind nothing, in which case they count as 0.

mod invert;
mod lexicon;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grammar::{
    match_lhs, write_joined, EvalError, EvalLimits, Meter, PatternElem, Step, VarKind, Violation,
};

pub use invert::{invert, InvertError, Inverter, MAX_NUMBER};
pub use lexicon::{Lexicon, LexiconError};
pub use parse::parse_num_grammar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    Int(u64),
    VarRef(String),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Int(n) => write!(f, "{n}"),
            Factor::VarRef(name) => write!(f, "[{name}]"),
        }
    }
}

/// Sum of products.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArithRhs {
    pub terms: Vec<Vec<Factor>>,
}

impl ArithRhs {
    pub fn constant(n: u64) -> Self {
        ArithRhs {
            terms: vec![vec![Factor::Int(n)]],
        }
    }

    pub fn var_refs(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().flatten().filter_map(|f| match f {
            Factor::VarRef(name) => Some(name.as_str()),
            Factor::Int(_) => None,
        })
    }

    /// The value when no variables are referenced.
    pub fn as_constant(&self) -> Option<u64> {
        let mut sum = 0u64;
        for term in &self.terms {
            let mut prod = 1u64;
            for factor in term {
                match factor {
                    Factor::Int(n) => prod = prod.checked_mul(*n)?,
                    Factor::VarRef(_) => return None,
                }
            }
            sum = sum.checked_add(prod)?;
        }
        Some(sum)
    }
}

impl fmt::Display for ArithRhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            for (j, factor) in term.iter().enumerate() {
                if j > 0 {
                    f.write_str("*")?;
                }
                write!(f, "{factor}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumRule {
    pub lhs: Vec<PatternElem>,
    pub rhs: ArithRhs,
}

impl NumRule {
    pub fn new(lhs: Vec<PatternElem>, rhs: ArithRhs) -> Self {
        NumRule { lhs, rhs }
    }

    pub fn is_degenerate(&self) -> bool {
        match self.lhs.as_slice() {
            [PatternElem::Var(v)] => self.rhs.var_refs().any(|n| n == v.name),
            _ => false,
        }
    }

    /// Literal words of the pattern, in order.
    pub fn literals(&self) -> impl Iterator<Item = &str> {
        self.lhs.iter().filter_map(|e| match e {
            PatternElem::Literal(w) => Some(w.as_str()),
            PatternElem::Var(_) => None,
        })
    }

    /// All-literal pattern with a constant value, e.g. `token14 token10 -> 10`.
    pub fn constant_value(&self) -> Option<u64> {
        if self
            .lhs
            .iter()
            .all(|e| matches!(e, PatternElem::Literal(_)))
        {
            self.rhs.as_constant()
        } else {
            None
        }
    }
}

impl fmt::Display for NumRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.lhs)?;
        write!(f, " -> {}", self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NumGrammar {
    pub rules: Vec<NumRule>,
}

impl NumGrammar {
    pub fn new(rules: Vec<NumRule>) -> Self {
        NumGrammar { rules }
    }

    pub fn evaluate(&self, input: &[String], budget: usize) -> Result<u64, EvalError> {
        self.evaluate_with(input, EvalLimits::with_budget(budget), None)
    }

    pub fn evaluate_with(
        &self,
        input: &[String],
        limits: EvalLimits,
        observer: Option<&mut dyn FnMut(&Step)>,
    ) -> Result<u64, EvalError> {
        let mut meter = Meter::new(limits, observer);
        self.value(input, 0, &mut meter)
    }

    fn value(
        &self,
        input: &[String],
        depth: usize,
        meter: &mut Meter<'_>,
    ) -> Result<u64, EvalError> {
        for (idx, rule) in self.rules.iter().enumerate() {
            let Some(bindings) = match_lhs(&rule.lhs, input) else {
                continue;
            };
            meter.enter(depth)?;
            meter.observe(|| Step {
                depth,
                rule: idx,
                input_len: input.len(),
                bound_lens: bindings.iter().map(|(_, s)| s.len()).collect(),
            });
            let mut sum = 0u64;
            for term in &rule.rhs.terms {
                let mut prod = 1u64;
                for factor in term {
                    let v = match factor {
                        Factor::Int(n) => *n,
                        Factor::VarRef(name) => {
                            let Some(sub) = bindings.get(name) else {
                                return Err(EvalError::NoMatch {
                                    input: input.to_vec(),
                                });
                            };
                            if sub.is_empty() {
                                0
                            } else {
                                self.value(sub, depth + 1, meter)?
                            }
                        }
                    };
                    prod = prod.checked_mul(v).ok_or(EvalError::Overflow)?;
                }
                sum = sum.checked_add(prod).ok_or(EvalError::Overflow)?;
            }
            return Ok(sum);
        }
        Err(EvalError::NoMatch {
            input: input.to_vec(),
        })
    }

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
                if let PatternElem::Var(v) = elem {
                    if names.contains(&v.name.as_str()) {
                        out.push(Violation::DuplicateVariable {
                            rule: idx,
                            name: v.name.clone(),
                        });
                    }
                    names.push(&v.name);
                    if v.kind == VarKind::Opt && pos + 1 != rule.lhs.len() {
                        out.push(Violation::MisplacedOptional {
                            rule: idx,
                            name: v.name.clone(),
                        });
                    }
                }
            }
            for name in rule.rhs.var_refs() {
                if !names.contains(&name) {
                    out.push(Violation::UnboundVariable {
                        rule: idx,
                        name: name.to_owned(),
                    });
                }
            }
            if rule.is_degenerate() {
                out.push(Violation::DegenerateRule { rule: idx });
            }
        }
        out
    }

    /// Every distinct literal word used by the grammar.
    pub fn input_words(&self) -> Vec<&str> {
        let mut seen: Vec<&str> = Vec::new();
        for rule in &self.rules {
            for w in rule.literals() {
                if !seen.contains(&w) {
                    seen.push(w);
                }
            }
        }
        seen
    }
}

impl fmt::Display for NumGrammar {
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

impl std::str::FromStr for NumGrammar {
    type Err = crate::grammar::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_num_grammar(s)
    }
}

pub fn evaluate_number(g: &NumGrammar, input: &[String], budget: usize) -> Result<u64, EvalError> {
    g.evaluate(input, budget)
}
