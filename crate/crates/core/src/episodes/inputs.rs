use std::collections::HashSet;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Domain, Episode, EpisodeError, Example};
use crate::grammar::{Grammar, PatternElem, VarKind, DEFAULT_EVAL_BUDGET};
use crate::rng::Rng;

/// Consecutive draws without a new accepted input before giving up.
pub const STALL_LIMIT: usize = 10_000;

/// Nesting depth of the input generator; deeper phrases use primitives only.
const MAX_PHRASE_DEPTH: usize = 4;

/// Inclusive bounds on input length in words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LenBounds {
    pub min: usize,
    pub max: usize,
}

impl LenBounds {
    pub fn new(min: usize, max: usize) -> Self {
        LenBounds { min, max }
    }

    pub fn contains(&self, len: usize) -> bool {
        (self.min..=self.max).contains(&len)
    }
}

impl Default for LenBounds {
    fn default() -> Self {
        LenBounds { min: 1, max: 9 }
    }
}

struct Generator<'g> {
    grammar: &'g Grammar,
    primitive_words: Vec<&'g str>,
    primitive_rules: Vec<usize>,
}

impl<'g> Generator<'g> {
    fn new(grammar: &'g Grammar) -> Self {
        let primitive_rules: Vec<usize> = (0..grammar.rules.len())
            .filter(|&i| matches!(grammar.rules[i].lhs.as_slice(), [PatternElem::Literal(_)]))
            .collect();
        let primitive_words = primitive_rules
            .iter()
            .filter_map(|&i| grammar.rules[i].lhs[0].as_literal())
            .collect();
        Generator {
            grammar,
            primitive_words,
            primitive_rules,
        }
    }

    /// Expands a rule pattern chosen uniformly (primitives only once the
    /// depth limit is reached). Returns false when a primitive variable has
    /// nothing to expand to.
    fn phrase(&self, depth: usize, rng: &mut Rng, out: &mut Vec<String>) -> bool {
        let rule = if depth >= MAX_PHRASE_DEPTH {
            if self.primitive_rules.is_empty() {
                return false;
            }
            self.primitive_rules[rng.gen_range(0..self.primitive_rules.len())]
        } else {
            rng.gen_range(0..self.grammar.rules.len())
        };
        for elem in &self.grammar.rules[rule].lhs {
            match elem {
                PatternElem::Literal(w) => out.push(w.clone()),
                PatternElem::Var(v) => match v.kind {
                    VarKind::Prim => {
                        if self.primitive_words.is_empty() {
                            return false;
                        }
                        let w = self.primitive_words[rng.gen_range(0..self.primitive_words.len())];
                        out.push(w.to_owned());
                    }
                    VarKind::Str => {
                        if !self.phrase(depth + 1, rng, out) {
                            return false;
                        }
                    }
                    VarKind::Opt => {
                        if rng.gen_bool(0.5) && !self.phrase(depth + 1, rng, out) {
                            return false;
                        }
                    }
                },
            }
        }
        true
    }
}

/// Draws `n` distinct inputs from the language of the grammar's left hand
/// sides: a pattern is chosen uniformly, `u` variables become a primitive
/// word and `x` variables a nested phrase. Only inputs within `bounds` that
/// the grammar evaluates without error are kept.
pub fn sample_inputs(
    g: &Grammar,
    n: usize,
    bounds: LenBounds,
    rng: &mut Rng,
) -> Result<Vec<Vec<String>>, EpisodeError> {
    if n == 0 {
        return Err(EpisodeError::EmptyRequest("n"));
    }
    if g.rules.is_empty() {
        return Err(EpisodeError::Unsatisfiable {
            wanted: n,
            found: 0,
        });
    }
    let gen = Generator::new(g);
    let mut seen: HashSet<Vec<String>> = HashSet::new();
    let mut out = Vec::with_capacity(n.min(1 << 16));
    let mut stall = 0;
    while out.len() < n {
        if stall >= STALL_LIMIT {
            return Err(EpisodeError::Unsatisfiable {
                wanted: n,
                found: out.len(),
            });
        }
        stall += 1;
        let mut input = Vec::new();
        if !gen.phrase(0, rng, &mut input) || !bounds.contains(input.len()) {
            continue;
        }
        if seen.contains(&input) {
            continue;
        }
        seen.insert(input.clone());
        if g.evaluate(&input, DEFAULT_EVAL_BUDGET).is_ok() {
            out.push(input);
            stall = 0;
        }
    }
    Ok(out)
}

/// Samples `n_support + n_query` distinct inputs and labels them with `g`.
pub fn make_episode(
    g: &Grammar,
    domain: Domain,
    n_support: usize,
    n_query: usize,
    bounds: LenBounds,
    rng: &mut Rng,
) -> Result<Episode<Grammar>, EpisodeError> {
    if n_support == 0 {
        return Err(EpisodeError::EmptyRequest("n_support"));
    }
    if n_query == 0 {
        return Err(EpisodeError::EmptyRequest("n_query"));
    }
    let inputs = sample_inputs(g, n_support + n_query, bounds, rng)?;
    let mut examples: Vec<Example> = inputs
        .into_iter()
        .map(|input| {
            let output = g
                .evaluate(&input, DEFAULT_EVAL_BUDGET)
                .expect("sample_inputs keeps evaluable inputs only");
            Example::new(input, output)
        })
        .collect();
    let query = examples.split_off(n_support);
    Ok(Episode {
        domain,
        support: examples,
        query,
        target: Some(g.clone()),
    })
}
