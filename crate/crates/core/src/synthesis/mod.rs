//! Guess-and-check synthesis: score candidate grammars against a support
//! set, pull candidates from a proposer, keep the best so far.

mod enumerate;
mod proposers;
mod search;

use std::fmt::Display;
use std::str::FromStr;

use rand::seq::index;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::episodes::{EpisodeError, Example};
use crate::metagrammar::MetaError;
use crate::program::Program;
use crate::rng::Rng;

pub use enumerate::{EnumLimits, EnumerationProposer};
pub use proposers::{ExternalProposer, McmcProposer, NumberPriorProposer, PriorProposer, Proposer};
pub use search::{
    ransac_search, search, RansacConfig, RansacOutcome, SearchConfig, SearchReport, Termination,
};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("support set is empty")]
    EmptySupport,
    #[error("query set is empty")]
    EmptyQuery,
    #[error("no budget set: give a wall-clock or proposal budget")]
    NoBudget,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error(transparent)]
    Episode(#[from] EpisodeError),
}

fn ser_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn de_from_str<'de, T, D>(d: D) -> Result<T, D::Error>
where
    T: FromStr,
    T::Err: Display,
    D: Deserializer<'de>,
{
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Candidate<P: Program> {
    #[serde(serialize_with = "ser_display", deserialize_with = "de_from_str")]
    pub grammar: P,
    pub n_satisfied: usize,
    pub fully_consistent: bool,
}

fn satisfies<P: Program>(g: &P, e: &Example<P::Output>, eval_budget: usize) -> bool {
    g.run(&e.input, eval_budget).as_ref() == Ok(&e.output)
}

/// Number of support pairs `g` reproduces. Evaluation errors count as
/// misses.
pub fn count_satisfied<P: Program>(
    g: &P,
    support: &[Example<P::Output>],
    eval_budget: usize,
) -> usize {
    support
        .iter()
        .filter(|e| satisfies(g, e, eval_budget))
        .count()
}

/// Scores `g` on every support pair.
pub fn check_consistency<P: Program>(
    g: &P,
    support: &[Example<P::Output>],
    eval_budget: usize,
) -> Result<Candidate<P>, SynthError> {
    if support.is_empty() {
        return Err(SynthError::EmptySupport);
    }
    let n_satisfied = count_satisfied(g, support, eval_budget);
    Ok(Candidate {
        grammar: g.clone(),
        n_satisfied,
        fully_consistent: n_satisfied == support.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FastVerdict {
    pub fully_consistent: bool,
    /// Exact when the full check ran, zero when every probe failed.
    pub n_satisfied_lower_bound: usize,
    pub evaluations: usize,
}

/// Evaluates `k` random probes first and stops if none is satisfied;
/// otherwise checks the rest of the support. `k` is clamped to the
/// support size; zero probes means a plain full check. The consistency verdict always matches
/// [`check_consistency`].
pub fn check_fast<P: Program>(
    g: &P,
    support: &[Example<P::Output>],
    k: usize,
    rng: &mut Rng,
    eval_budget: usize,
) -> FastVerdict {
    let k = k.min(support.len());
    let probes = index::sample(rng, support.len(), k).into_vec();
    let probe_hits = probes
        .iter()
        .filter(|&&i| satisfies(g, &support[i], eval_budget))
        .count();
    if k > 0 && probe_hits == 0 {
        return FastVerdict {
            fully_consistent: false,
            n_satisfied_lower_bound: 0,
            evaluations: k,
        };
    }
    let mut is_probe = vec![false; support.len()];
    for &i in &probes {
        is_probe[i] = true;
    }
    let rest_hits = support
        .iter()
        .zip(&is_probe)
        .filter(|&(e, &probe)| !probe && satisfies(g, e, eval_budget))
        .count();
    let n = probe_hits + rest_hits;
    FastVerdict {
        fully_consistent: n == support.len(),
        n_satisfied_lower_bound: n,
        evaluations: support.len(),
    }
}

/// Fraction of query pairs reproduced exactly.
pub fn query_accuracy<P: Program>(
    g: &P,
    query: &[Example<P::Output>],
    eval_budget: usize,
) -> Result<f64, SynthError> {
    if query.is_empty() {
        return Err(SynthError::EmptyQuery);
    }
    Ok(count_satisfied(g, query, eval_budget) as f64 / query.len() as f64)
}
