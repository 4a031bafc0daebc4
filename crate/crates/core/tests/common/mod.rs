//! Reference implementations used as oracles by the integration tests, and
//! the sweeps shared by the property suite and the acceptance run.
//!
//! Nothing here calls the library's matcher, evaluator or checker: the
//! oracles only read grammar data structures.

#![allow(dead_code)]

pub mod scan_oracle;
pub mod sweeps;

use rulesynth::episodes::Example;
use rulesynth::grammar::{Grammar, PatternElem, RhsElem, VarKind};
use rulesynth::numeric::{Factor, NumGrammar};

pub const BUDGET: usize = 1_000;
pub const DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NaiveError {
    NoMatch,
    Limit,
    Overflow,
}

/// Every way to cut `n` words into pieces whose sizes fit the pattern
/// elements, in no particular order.
fn all_cuts(lhs: &[PatternElem], n: usize) -> Vec<Vec<usize>> {
    let Some((head, tail)) = lhs.split_first() else {
        return if n == 0 { vec![vec![]] } else { vec![] };
    };
    let sizes: Vec<usize> = match head {
        PatternElem::Literal(_) => vec![1],
        PatternElem::Var(v) => match v.kind {
            VarKind::Prim => vec![1],
            VarKind::Str => (1..=n).collect(),
            VarKind::Opt => (0..=n).collect(),
        },
    };
    let mut out = Vec::new();
    for s in sizes.into_iter().filter(|&s| s <= n) {
        for mut rest in all_cuts(tail, n - s) {
            rest.insert(0, s);
            out.push(rest);
        }
    }
    out
}

/// Brute-force matcher: enumerates every segmentation, keeps those whose
/// literal pieces agree with the input, and returns the one with the
/// lexicographically smallest size vector (shortest early pieces).
pub fn naive_bindings(lhs: &[PatternElem], input: &[String]) -> Option<Vec<(String, Vec<String>)>> {
    let valid = all_cuts(lhs, input.len()).into_iter().filter(|cut| {
        let mut at = 0;
        lhs.iter().zip(cut).all(|(e, &s)| {
            let piece = &input[at..at + s];
            at += s;
            match e {
                PatternElem::Literal(w) => piece.len() == 1 && piece[0] == *w,
                PatternElem::Var(_) => true,
            }
        })
    });
    let best = valid.min()?;
    let mut at = 0;
    let mut out = Vec::new();
    for (e, s) in lhs.iter().zip(best) {
        if let PatternElem::Var(v) = e {
            out.push((v.name.clone(), input[at..at + s].to_vec()));
        }
        at += s;
    }
    Some(out)
}

fn lookup<'a>(b: &'a [(String, Vec<String>)], name: &str) -> Option<&'a [String]> {
    b.iter().find(|(n, _)| n == name).map(|(_, s)| s.as_slice())
}

struct Counter {
    used: usize,
    budget: usize,
}

impl Counter {
    fn fire(&mut self, depth: usize) -> Result<(), NaiveError> {
        self.used += 1;
        if self.used > self.budget || depth >= DEPTH {
            return Err(NaiveError::Limit);
        }
        Ok(())
    }
}

fn seq_rec(
    g: &Grammar,
    input: &[String],
    depth: usize,
    c: &mut Counter,
) -> Result<Vec<String>, NaiveError> {
    for rule in &g.rules {
        let Some(b) = naive_bindings(&rule.lhs, input) else {
            continue;
        };
        c.fire(depth)?;
        let mut out = Vec::new();
        for e in &rule.rhs {
            match e {
                RhsElem::Output(w) => out.push(w.clone()),
                RhsElem::VarRef(name) => {
                    let sub = lookup(&b, name).ok_or(NaiveError::NoMatch)?;
                    if !sub.is_empty() {
                        out.extend(seq_rec(g, sub, depth + 1, c)?);
                    }
                }
            }
        }
        return Ok(out);
    }
    Err(NaiveError::NoMatch)
}

pub fn naive_eval(g: &Grammar, input: &[String], budget: usize) -> Result<Vec<String>, NaiveError> {
    seq_rec(g, input, 0, &mut Counter { used: 0, budget })
}

fn num_rec(
    g: &NumGrammar,
    input: &[String],
    depth: usize,
    c: &mut Counter,
) -> Result<u128, NaiveError> {
    for rule in &g.rules {
        let Some(b) = naive_bindings(&rule.lhs, input) else {
            continue;
        };
        c.fire(depth)?;
        let mut total: u128 = 0;
        for term in &rule.rhs.terms {
            let mut prod: u128 = 1;
            for f in term {
                let v = match f {
                    Factor::Int(n) => *n as u128,
                    Factor::VarRef(name) => {
                        let sub = lookup(&b, name).ok_or(NaiveError::NoMatch)?;
                        if sub.is_empty() {
                            0
                        } else {
                            num_rec(g, sub, depth + 1, c)?
                        }
                    }
                };
                prod *= v;
                if prod > u64::MAX as u128 {
                    return Err(NaiveError::Overflow);
                }
            }
            total += prod;
            if total > u64::MAX as u128 {
                return Err(NaiveError::Overflow);
            }
        }
        return Ok(total);
    }
    Err(NaiveError::NoMatch)
}

pub fn naive_eval_number(
    g: &NumGrammar,
    input: &[String],
    budget: usize,
) -> Result<u64, NaiveError> {
    num_rec(g, input, 0, &mut Counter { used: 0, budget }).map(|v| v as u64)
}

/// Support pairs reproduced according to the naive evaluator.
pub fn naive_satisfied(g: &Grammar, support: &[Example]) -> usize {
    support
        .iter()
        .filter(|e| naive_eval(g, &e.input, BUDGET).as_ref() == Ok(&e.output))
        .count()
}

pub fn w(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_owned).collect()
}
