use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Domain, Episode, EpisodeError, Example};
use crate::grammar::{PatternElem, VarKind, DEFAULT_EVAL_BUDGET};
use crate::numeric::{Inverter, NumGrammar, MAX_NUMBER};
use crate::rng::Rng;

/// Draws without a new compositional example before giving up.
const NUMBER_STALL_LIMIT: usize = 5_000;

/// Integers are drawn by first picking a digit count, then a value
/// uniformly among numbers with that many digits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegerDistribution {
    pub max_digits: u32,
    /// Probability of drawing the digit count from `long_from..=max_digits`
    /// instead of uniformly from all counts.
    pub long_prob: f64,
    pub long_from: u32,
}

impl IntegerDistribution {
    /// Uniform over 1..=8 digits.
    pub fn train() -> Self {
        IntegerDistribution {
            max_digits: 8,
            long_prob: 0.0,
            long_from: 4,
        }
    }

    /// Adds a 60% component over four or more digits to the training mix.
    pub fn test() -> Self {
        IntegerDistribution {
            long_prob: 0.6,
            ..IntegerDistribution::train()
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> u64 {
        let digits = if self.long_prob > 0.0 && rng.gen_bool(self.long_prob) {
            rng.gen_range(self.long_from..=self.max_digits)
        } else {
            rng.gen_range(1..=self.max_digits)
        };
        let lo = if digits == 1 {
            1
        } else {
            10u64.pow(digits - 1)
        };
        let hi = 10u64.pow(digits) - 1;
        rng.gen_range(lo..=hi).min(MAX_NUMBER)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberEpisodeParams {
    /// Compositional support examples, drawn uniformly from this range.
    pub n_compositional: (usize, usize),
    pub n_query: (usize, usize),
    pub integers: IntegerDistribution,
}

impl NumberEpisodeParams {
    /// 60-100 compositional support pairs and 10 query pairs.
    pub fn train() -> Self {
        NumberEpisodeParams {
            n_compositional: (60, 100),
            n_query: (10, 10),
            integers: IntegerDistribution::train(),
        }
    }

    /// 30 compositional support pairs, 30-70 query pairs, longer numbers.
    pub fn test() -> Self {
        NumberEpisodeParams {
            n_compositional: (30, 30),
            n_query: (30, 70),
            integers: IntegerDistribution::test(),
        }
    }
}

/// One example per single-token word and per power-of-ten phrase: every
/// all-literal rule, plus every rule made of literals and a trailing
/// `y` variable, read with that variable empty.
pub fn necessary_examples(g: &NumGrammar) -> Vec<Example<u64>> {
    let mut out: Vec<Example<u64>> = Vec::new();
    for rule in &g.rules {
        let (lits, tail) = match rule.lhs.split_last() {
            Some((PatternElem::Var(v), lits)) if v.kind == VarKind::Opt => (lits, true),
            _ => (rule.lhs.as_slice(), false),
        };
        let input: Option<Vec<String>> = lits
            .iter()
            .map(|e| e.as_literal().map(str::to_owned))
            .collect();
        let Some(input) = input.filter(|i| !i.is_empty()) else {
            continue;
        };
        if !tail && rule.constant_value().is_none() {
            continue;
        }
        if out.iter().any(|e| e.input == input) {
            continue;
        }
        if let Ok(value) = g.evaluate(&input, DEFAULT_EVAL_BUDGET) {
            out.push(Example::new(input, value));
        }
    }
    out
}

/// Support: every necessary word plus compositional pairs rendered by the
/// inverse grammar. Query: further compositional pairs. Inputs never repeat
/// across the two sets.
pub fn make_number_episode(
    g: &NumGrammar,
    p: &NumberEpisodeParams,
    rng: &mut Rng,
) -> Result<Episode<NumGrammar>, EpisodeError> {
    let n_comp = rng.gen_range(p.n_compositional.0..=p.n_compositional.1);
    let n_query = rng.gen_range(p.n_query.0..=p.n_query.1);
    if n_query == 0 {
        return Err(EpisodeError::EmptyRequest("n_query"));
    }
    let necessary = necessary_examples(g);
    if necessary.is_empty() && n_comp == 0 {
        return Err(EpisodeError::EmptyRequest("n_support"));
    }
    let mut seen: HashSet<Vec<String>> = necessary.iter().map(|e| e.input.clone()).collect();
    let mut inverter = Inverter::new(g);
    let mut compositional = Vec::with_capacity(n_comp + n_query);
    let mut stall = 0;
    while compositional.len() < n_comp + n_query {
        if stall >= NUMBER_STALL_LIMIT {
            return Err(EpisodeError::Unsatisfiable {
                wanted: n_comp + n_query,
                found: compositional.len(),
            });
        }
        stall += 1;
        let n = p.integers.sample(rng);
        let Ok(input) = inverter.invert(n, MAX_NUMBER) else {
            continue;
        };
        if seen.insert(input.clone()) {
            compositional.push(Example::new(input, n));
            stall = 0;
        }
    }
    let query = compositional.split_off(n_comp);
    let mut support = necessary;
    support.extend(compositional);
    Ok(Episode {
        domain: Domain::Number,
        support,
        query,
        target: Some(g.clone()),
    })
}
