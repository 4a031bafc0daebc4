use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_fast, count_satisfied, Candidate, FastVerdict, Proposer, SynthError};
use crate::episodes::{select_support, Example, SupportHeuristics};
use crate::grammar::{Grammar, DEFAULT_EVAL_BUDGET};
use crate::program::Program;
use crate::rng::substream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RansacConfig {
    pub subset_size: usize,
    pub per_subset_seconds: Option<f64>,
    pub per_subset_proposals: Option<usize>,
}

impl Default for RansacConfig {
    fn default() -> Self {
        RansacConfig {
            subset_size: 100,
            per_subset_seconds: Some(20.0),
            per_subset_proposals: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub budget_seconds: Option<f64>,
    pub budget_proposals: Option<usize>,
    /// Rule applications allowed per example evaluation.
    pub eval_budget: usize,
    /// Probe count for the quick rejection check; None checks everything.
    pub prefilter: Option<usize>,
    pub seed: u64,
    /// Candidates checked concurrently. Results do not depend on it.
    pub batch_width: usize,
    pub ransac: RansacConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget_seconds: Some(30.0),
            budget_proposals: None,
            eval_budget: DEFAULT_EVAL_BUDGET,
            prefilter: Some(4),
            seed: 0,
            batch_width: 64,
            ransac: RansacConfig::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_proposals(n: usize, seed: u64) -> Self {
        SearchConfig {
            budget_seconds: None,
            budget_proposals: Some(n),
            seed,
            ..SearchConfig::default()
        }
    }

    fn check(&self) -> Result<(), SynthError> {
        if self.budget_seconds.is_none() && self.budget_proposals.is_none() {
            return Err(SynthError::NoBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    FoundConsistent,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SearchReport<P: Program> {
    pub best: Option<Candidate<P>>,
    pub proposals_seen: usize,
    pub parse_failures: usize,
    pub evaluations: usize,
    pub elapsed_secs: f64,
    pub termination: Termination,
    /// Best satisfied count after each improvement.
    pub trajectory: Vec<usize>,
    pub rounds: usize,
    pub examples_drawn: usize,
}

impl<P: Program> SearchReport<P> {
    fn empty() -> Self {
        SearchReport {
            best: None,
            proposals_seen: 0,
            parse_failures: 0,
            evaluations: 0,
            elapsed_secs: 0.0,
            termination: Termination::BudgetExhausted,
            trajectory: Vec::new(),
            rounds: 0,
            examples_drawn: 0,
        }
    }

    pub fn found(&self) -> bool {
        self.termination == Termination::FoundConsistent
    }

    /// Keeps `c` if it beats the current best; ties keep the earlier one.
    fn offer(&mut self, c: Candidate<P>) {
        if self
            .best
            .as_ref()
            .is_none_or(|b| c.n_satisfied > b.n_satisfied)
        {
            self.trajectory.push(c.n_satisfied);
            self.best = Some(c);
        }
    }
}

fn deadline(start: Instant, seconds: Option<f64>) -> Option<Instant> {
    seconds.map(|s| start + Duration::from_secs_f64(s.max(0.0)))
}

/// Pulls candidates from `proposer` and keeps the one satisfying the most
/// support pairs, stopping at the first fully consistent candidate or when
/// a budget runs out. Candidates are checked in parallel batches; the
/// winner is always the earliest consistent candidate in stream order.
pub fn search<P: Program>(
    support: &[Example<P::Output>],
    proposer: &mut dyn Proposer,
    config: &SearchConfig,
) -> Result<SearchReport<P>, SynthError> {
    config.check()?;
    if support.is_empty() {
        return Err(SynthError::EmptySupport);
    }
    let start = Instant::now();
    let end = deadline(start, config.budget_seconds);
    let mut report = SearchReport::empty();
    report.rounds = 1;
    report.examples_drawn = support.len();
    let width = config.batch_width.max(1);
    let mut stream_done = false;
    while !stream_done {
        if end.is_some_and(|e| Instant::now() >= e) {
            break;
        }
        let room = config.budget_proposals.map_or(width, |b| {
            b.saturating_sub(report.proposals_seen).min(width)
        });
        if room == 0 {
            break;
        }
        let mut batch: Vec<Option<P>> = Vec::with_capacity(room);
        while batch.len() < room {
            match proposer.next_text() {
                Some(text) => batch.push(text.parse().ok()),
                None => {
                    stream_done = true;
                    break;
                }
            }
        }
        let first = report.proposals_seen;
        let verdicts: Vec<Option<FastVerdict>> = batch
            .par_iter()
            .enumerate()
            .map(|(i, g)| {
                g.as_ref()
                    .map(|g| check_candidate(g, support, config, (first + i) as u64))
            })
            .collect();
        for (g, v) in batch.into_iter().zip(verdicts) {
            report.proposals_seen += 1;
            let (Some(g), Some(v)) = (g, v) else {
                report.parse_failures += 1;
                continue;
            };
            report.evaluations += v.evaluations;
            report.offer(Candidate {
                grammar: g,
                n_satisfied: v.n_satisfied_lower_bound,
                fully_consistent: v.fully_consistent,
            });
            // A consistent candidate always beats the best so far, since an
            // earlier one with the full count would have ended the search.
            if v.fully_consistent {
                report.termination = Termination::FoundConsistent;
                report.elapsed_secs = start.elapsed().as_secs_f64();
                return Ok(report);
            }
        }
    }
    report.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(report)
}

fn check_candidate<P: Program>(
    g: &P,
    support: &[Example<P::Output>],
    config: &SearchConfig,
    index: u64,
) -> FastVerdict {
    match config.prefilter {
        Some(k) => check_fast(
            g,
            support,
            k,
            &mut substream(config.seed, index),
            config.eval_budget,
        ),
        None => {
            let n = count_satisfied(g, support, config.eval_budget);
            FastVerdict {
                fully_consistent: n == support.len(),
                n_satisfied_lower_bound: n,
                evaluations: support.len(),
            }
        }
    }
}

/// Result of [`ransac_search`] with the support subset of the last round.
#[derive(Clone, Debug, PartialEq)]
pub struct RansacOutcome {
    pub report: SearchReport<Grammar>,
    pub final_subset: Vec<Example>,
}

/// Repeated search on fresh support subsets of `train`, each with the
/// per-subset budget, until one round finds a consistent grammar or the
/// overall budget is spent. `factory` builds the proposer for a round
/// from its subset and round number; its errors pass through.
pub fn ransac_search<F, E>(
    train: &[Example],
    mut factory: F,
    config: &SearchConfig,
    heuristics: &SupportHeuristics,
) -> Result<RansacOutcome, E>
where
    F: FnMut(&[Example], usize) -> Result<Box<dyn Proposer>, E>,
    E: From<SynthError>,
{
    config.check()?;
    let start = Instant::now();
    let mut total = SearchReport::empty();
    let mut final_subset = Vec::new();
    let mut rng = substream(config.seed, u64::MAX);
    loop {
        let spent = start.elapsed().as_secs_f64();
        let secs_left = config.budget_seconds.map(|b| b - spent);
        let props_left = config
            .budget_proposals
            .map(|b| b.saturating_sub(total.proposals_seen));
        if secs_left.is_some_and(|s| s <= 0.0) || props_left == Some(0) {
            break;
        }
        let round_cfg = SearchConfig {
            budget_seconds: min_opt(config.ransac.per_subset_seconds, secs_left),
            budget_proposals: min_opt(config.ransac.per_subset_proposals, props_left),
            seed: config.seed.wrapping_add(total.rounds as u64),
            ..config.clone()
        };
        let subset = select_support(train, config.ransac.subset_size, heuristics, &mut rng)
            .map_err(SynthError::from)?;
        let mut proposer = factory(&subset, total.rounds)?;
        let r: SearchReport<Grammar> = search(&subset, &mut proposer, &round_cfg)?;
        total.rounds += 1;
        total.examples_drawn += subset.len();
        total.proposals_seen += r.proposals_seen;
        total.parse_failures += r.parse_failures;
        total.evaluations += r.evaluations;
        final_subset = subset;
        let found = r.found();
        if let Some(best) = r.best {
            if found {
                total.trajectory.push(best.n_satisfied);
                total.best = Some(best);
            } else {
                total.offer(best);
            }
        }
        if found {
            total.termination = Termination::FoundConsistent;
            break;
        }
        if r.proposals_seen == 0 {
            // The proposer stream is empty; more rounds cannot help.
            break;
        }
    }
    total.elapsed_secs = start.elapsed().as_secs_f64();
    Ok(RansacOutcome {
        report: total,
        final_subset,
    })
}

fn min_opt<T: PartialOrd>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b < a { b } else { a }),
        (a, b) => a.or(b),
    }
}
