use std::collections::HashMap;

use thiserror::Error;

use super::{Factor, NumGrammar};
use crate::grammar::{PatternElem, VarKind, DEFAULT_EVAL_BUDGET};

/// Largest integer handled by the number-word tooling.
pub const MAX_NUMBER: u64 = 99_999_999;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InvertError {
    #[error("{n} has no rendering under this grammar")]
    NotRepresentable { n: u64 },
    #[error("{n} exceeds the bound {bound}")]
    OutOfBound { n: u64, bound: u64 },
}

/// A rule whose value is affine in its variables:
/// `constant + sum(coef * var)`.
#[derive(Clone, Debug)]
struct AffineRule {
    rule: usize,
    constant: u64,
    /// Largest literal factor among the constant terms: the place value of
    /// an exception rule such as `token32 y1 -> 100*1 + [y1]`.
    place: u64,
    /// `(pattern position, kind, coefficient)` for each variable.
    vars: Vec<(usize, VarKind, u64)>,
}

impl AffineRule {
    fn from_rule(idx: usize, g: &NumGrammar) -> Option<AffineRule> {
        let rule = &g.rules[idx];
        let mut constant = 0u64;
        let mut place = 0u64;
        let mut coefs: Vec<(String, u64)> = Vec::new();
        for term in &rule.rhs.terms {
            let mut k = 1u64;
            let mut var: Option<&str> = None;
            let mut largest = 0u64;
            for f in term {
                match f {
                    Factor::Int(n) => {
                        k = k.checked_mul(*n)?;
                        largest = largest.max(*n);
                    }
                    Factor::VarRef(name) if var.is_none() => var = Some(name),
                    Factor::VarRef(_) => return None,
                }
            }
            match var {
                None => {
                    constant = constant.checked_add(k)?;
                    place = place.max(largest);
                }
                Some(name) => match coefs.iter_mut().find(|(n, _)| n == name) {
                    Some((_, c)) => *c = c.checked_add(k)?,
                    None => coefs.push((name.to_owned(), k)),
                },
            }
        }
        let mut vars = Vec::new();
        for (pos, elem) in rule.lhs.iter().enumerate() {
            if let PatternElem::Var(v) = elem {
                let coef = coefs.iter().find(|(n, _)| *n == v.name)?.1;
                if coef == 0 {
                    return None;
                }
                vars.push((pos, v.kind, coef));
            }
        }
        Some(AffineRule {
            rule: idx,
            constant,
            place,
            vars,
        })
    }

    /// Scale used to order rules: the largest multiplier, or the place value
    /// for exception rules, so that exceptions are tried beside (and, by
    /// priority, before) their general rule.
    fn scale(&self) -> u64 {
        self.vars
            .iter()
            .map(|v| v.2)
            .max()
            .unwrap_or(0)
            .max(self.place)
    }
}

/// Renders integers as word sequences under a number grammar by greedy
/// decomposition, verifying every rendering with the evaluator.
///
/// Rules are tried largest multiplier first, ties in priority order. A rule `x P y -> [x]*k + [y]`
/// takes the quotient and remainder by `k`; an additive rule `u x -> [u] + [x]`
/// splits off the largest single-word value (or the next largest) provided
/// the rest is smaller than it. Among verified renderings the one with the
/// fewest words wins; an exact-value rule is used whenever one exists.
pub struct Inverter<'g> {
    grammar: &'g NumGrammar,
    affine: Vec<AffineRule>,
    /// Single-word constant rules as `(value, word)`, largest value first.
    single_words: Vec<(u64, String)>,
    memo: HashMap<u64, Option<Vec<String>>>,
    budget: usize,
}

impl<'g> Inverter<'g> {
    pub fn new(grammar: &'g NumGrammar) -> Self {
        let mut affine: Vec<AffineRule> = (0..grammar.rules.len())
            .filter_map(|i| AffineRule::from_rule(i, grammar))
            .filter(|r| !r.vars.is_empty())
            .collect();
        affine.sort_by_key(|r| std::cmp::Reverse(r.scale()));
        let mut single_words = Vec::new();
        for rule in &grammar.rules {
            if let ([PatternElem::Literal(w)], Some(v)) =
                (rule.lhs.as_slice(), rule.constant_value())
            {
                if !single_words.iter().any(|(_, seen)| seen == w) {
                    single_words.push((v, w.clone()));
                }
            }
        }
        single_words.sort_by_key(|&(v, _)| std::cmp::Reverse(v));
        Inverter {
            grammar,
            affine,
            single_words,
            memo: HashMap::new(),
            budget: DEFAULT_EVAL_BUDGET,
        }
    }

    pub fn invert(&mut self, n: u64, bound: u64) -> Result<Vec<String>, InvertError> {
        if n > bound {
            return Err(InvertError::OutOfBound { n, bound });
        }
        self.render(n)
            .filter(|w| !w.is_empty())
            .ok_or(InvertError::NotRepresentable { n })
    }

    fn verifies(&self, words: &[String], n: u64) -> bool {
        !words.is_empty() && self.grammar.evaluate(words, self.budget) == Ok(n)
    }

    fn render(&mut self, n: u64) -> Option<Vec<String>> {
        if let Some(hit) = self.memo.get(&n) {
            return hit.clone();
        }
        // Marks `n` as in progress so self-referential rules cannot recurse.
        self.memo.insert(n, None);
        let found = self.search(n);
        self.memo.insert(n, found.clone());
        found
    }

    fn search(&mut self, n: u64) -> Option<Vec<String>> {
        for rule in &self.grammar.rules {
            if rule.constant_value() == Some(n) {
                let words: Vec<String> = rule.literals().map(str::to_owned).collect();
                if self.verifies(&words, n) {
                    return Some(words);
                }
            }
        }
        let mut best: Option<Vec<String>> = None;
        for i in 0..self.affine.len() {
            let rule = self.affine[i].clone();
            for candidate in self.through_affine(&rule, n) {
                if best.as_ref().is_some_and(|b| b.len() <= candidate.len()) {
                    continue;
                }
                if self.verifies(&candidate, n) {
                    best = Some(candidate);
                }
            }
        }
        best
    }

    /// Candidate renderings of `n` through one affine rule.
    fn through_affine(&mut self, rule: &AffineRule, n: u64) -> Vec<Vec<String>> {
        let Some(rest) = n.checked_sub(rule.constant) else {
            return Vec::new();
        };
        let multipliers: Vec<usize> = (0..rule.vars.len())
            .filter(|&i| rule.vars[i].2 > 1)
            .collect();
        let units: Vec<usize> = (0..rule.vars.len())
            .filter(|&i| rule.vars[i].2 == 1)
            .collect();
        if multipliers.len() > 1 || units.len() > 2 {
            return Vec::new();
        }
        let mut values = vec![0u64; rule.vars.len()];
        let remainder = match multipliers.first() {
            Some(&m) => {
                let coef = rule.vars[m].2;
                values[m] = rest / coef;
                rest % coef
            }
            None => rest,
        };
        let splits: Vec<Vec<u64>> = match units.as_slice() {
            [] if remainder == 0 => vec![vec![]],
            [] => vec![],
            // Without a multiplier the lone variable fills the slot below
            // the rule's place value.
            [_] if multipliers.is_empty() && remainder >= rule.place => vec![],
            [_] => vec![vec![remainder]],
            [_, _] => self
                .single_words
                .iter()
                .map(|(v, _)| *v)
                .filter(|&head| head > 0 && head <= remainder && remainder - head < head)
                .take(2)
                .map(|head| vec![head, remainder - head])
                .collect(),
            _ => unreachable!(),
        };
        let mut out = Vec::new();
        'split: for split in splits {
            for (slot, value) in units.iter().zip(&split) {
                values[*slot] = *value;
            }
            let mut pieces: Vec<Vec<String>> = Vec::with_capacity(rule.vars.len());
            for (i, &(_, kind, _)) in rule.vars.iter().enumerate() {
                match self.render_var(kind, values[i], n) {
                    Some(p) => pieces.push(p),
                    None => continue 'split,
                }
            }
            let lhs = &self.grammar.rules[rule.rule].lhs;
            let mut words = Vec::new();
            let mut next_piece = pieces.into_iter();
            for elem in lhs {
                match elem {
                    PatternElem::Literal(w) => words.push(w.clone()),
                    PatternElem::Var(_) => words.extend(next_piece.next().expect("one per var")),
                }
            }
            out.push(words);
        }
        out
    }

    /// Renders one variable's share of `whole`; shares must be strictly
    /// smaller so the recursion bottoms out.
    fn render_var(&mut self, kind: VarKind, value: u64, whole: u64) -> Option<Vec<String>> {
        match kind {
            VarKind::Opt if value == 0 => Some(Vec::new()),
            _ if value == 0 => None,
            VarKind::Prim => self
                .single_words
                .iter()
                .find(|(v, _)| *v == value)
                .map(|(_, w)| vec![w.clone()]),
            _ if value >= whole => None,
            _ => self.render(value).filter(|w| !w.is_empty()),
        }
    }
}

/// Renders `n` as words under `g`; see [`Inverter`].
pub fn invert(g: &NumGrammar, n: u64, bound: u64) -> Result<Vec<String>, InvertError> {
    Inverter::new(g).invert(n, bound)
}
