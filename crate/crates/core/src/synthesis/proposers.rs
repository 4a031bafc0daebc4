use std::collections::BTreeSet;
use std::io::{self, BufRead, Cursor};

use rand::Rng as _;

use super::{count_satisfied, SynthError};
use crate::episodes::Example;
use crate::grammar::{print_grammar, Grammar};
use crate::metagrammar::{
    prior_logprob, resample_rule, rule_logprob, sample_number, NumberMetaParams, SeqParams,
};
use crate::rng::{seeded, Rng};

/// A pull-based stream of candidate grammar texts. Texts may be malformed;
/// the search counts and skips those.
pub trait Proposer {
    fn next_text(&mut self) -> Option<String>;
}

impl<P: Proposer + ?Sized> Proposer for Box<P> {
    fn next_text(&mut self) -> Option<String> {
        (**self).next_text()
    }
}

/// Sorted, distinct input words and output words of a support set.
pub fn support_vocabulary(support: &[Example]) -> (Vec<String>, Vec<String>) {
    let inputs: BTreeSet<&String> = support.iter().flat_map(|e| &e.input).collect();
    let outputs: BTreeSet<&String> = support.iter().flat_map(|e| &e.output).collect();
    (
        inputs.into_iter().cloned().collect(),
        outputs.into_iter().cloned().collect(),
    )
}

/// Independent draws from a sequence meta-grammar whose pools are the
/// support vocabulary.
pub struct PriorProposer {
    params: SeqParams,
    rng: Rng,
}

impl PriorProposer {
    pub fn new(
        params: &SeqParams,
        words: Vec<String>,
        outputs: Vec<String>,
        seed: u64,
    ) -> Result<Self, SynthError> {
        if words.is_empty() {
            return Err(SynthError::EmptyVocabulary);
        }
        let params = params.with_pools(words, outputs);
        params.check_pools()?;
        Ok(PriorProposer {
            params,
            rng: seeded(seed),
        })
    }

    pub fn from_support(
        params: &SeqParams,
        support: &[Example],
        seed: u64,
    ) -> Result<Self, SynthError> {
        let (words, outputs) = support_vocabulary(support);
        PriorProposer::new(params, words, outputs, seed)
    }
}

impl Proposer for PriorProposer {
    fn next_text(&mut self) -> Option<String> {
        self.params
            .sample(&mut self.rng)
            .ok()
            .map(|g| print_grammar(&g))
    }
}

/// Independent draws from the number meta-grammar.
pub struct NumberPriorProposer {
    params: NumberMetaParams,
    rng: Rng,
}

impl NumberPriorProposer {
    pub fn new(params: &NumberMetaParams, seed: u64) -> Result<Self, SynthError> {
        sample_number(params, &mut seeded(seed))?;
        Ok(NumberPriorProposer {
            params: params.clone(),
            rng: seeded(seed),
        })
    }
}

impl Proposer for NumberPriorProposer {
    fn next_text(&mut self) -> Option<String> {
        sample_number(&self.params, &mut self.rng)
            .ok()
            .map(|g| g.to_string())
    }
}

/// Metropolis-Hastings over the prior's support. Each step redraws one
/// uniformly chosen rule from its prior conditional; the target is the
/// prior times `exp(beta * n_satisfied)`. Yields the chain state after
/// every step, starting with the initial prior draw.
pub struct McmcProposer {
    params: SeqParams,
    support: Vec<Example>,
    beta: f64,
    eval_budget: usize,
    rng: Rng,
    state: Option<(Grammar, f64, usize)>,
    pub steps: usize,
    pub accepted: usize,
}

impl McmcProposer {
    pub fn new(
        params: &SeqParams,
        support: &[Example],
        beta: f64,
        eval_budget: usize,
        seed: u64,
    ) -> Result<Self, SynthError> {
        if support.is_empty() {
            return Err(SynthError::EmptySupport);
        }
        let (words, outputs) = support_vocabulary(support);
        let params = params.with_pools(words, outputs);
        params.check_pools()?;
        Ok(McmcProposer {
            params,
            support: support.to_vec(),
            beta,
            eval_budget,
            rng: seeded(seed),
            state: None,
            steps: 0,
            accepted: 0,
        })
    }

    /// Current chain state, if the chain has started.
    pub fn state(&self) -> Option<&Grammar> {
        self.state.as_ref().map(|(g, _, _)| g)
    }

    fn step(&mut self) -> Option<&Grammar> {
        let Some((g, lp, n)) = &self.state else {
            let g = self.params.sample(&mut self.rng).ok()?;
            let lp = prior_logprob(&g, &self.params);
            let n = count_satisfied(&g, &self.support, self.eval_budget);
            self.state = Some((g, lp, n));
            return self.state();
        };
        let i = self.rng.gen_range(0..g.rules.len() as u64) as usize;
        let proposal = resample_rule(g, i, &self.params, &mut self.rng);
        let lp_new = prior_logprob(&proposal, &self.params);
        let n_new = count_satisfied(&proposal, &self.support, self.eval_budget);
        let log_alpha =
            lp_new - lp + self.beta * (n_new as f64 - *n as f64) + rule_logprob(g, i, &self.params)
                - rule_logprob(&proposal, i, &self.params);
        self.steps += 1;
        if lp_new.is_finite() && self.rng.gen::<f64>().ln() < log_alpha {
            self.accepted += 1;
            self.state = Some((proposal, lp_new, n_new));
        }
        self.state()
    }
}

impl Proposer for McmcProposer {
    fn next_text(&mut self) -> Option<String> {
        self.step().map(print_grammar)
    }
}

/// Reads blank-line-delimited grammar texts from a byte stream. The stream
/// ends at end of input or on the first read error.
pub struct ExternalProposer<R> {
    source: R,
    pub read_error: Option<io::Error>,
    done: bool,
}

impl<R: BufRead> ExternalProposer<R> {
    pub fn new(source: R) -> Self {
        ExternalProposer {
            source,
            read_error: None,
            done: false,
        }
    }
}

impl ExternalProposer<Cursor<Vec<u8>>> {
    pub fn from_texts<S: AsRef<str>>(texts: &[S]) -> Self {
        let joined: Vec<&str> = texts.iter().map(|t| t.as_ref().trim_end()).collect();
        ExternalProposer::new(Cursor::new(joined.join("\n\n").into_bytes()))
    }
}

impl<R: BufRead> Proposer for ExternalProposer<R> {
    fn next_text(&mut self) -> Option<String> {
        if self.done {
            return None;
        }
        let mut block = String::new();
        loop {
            let mut line = String::new();
            match self.source.read_line(&mut line) {
                Ok(0) => {
                    self.done = true;
                    break;
                }
                Ok(_) if line.trim().is_empty() => {
                    if !block.is_empty() {
                        break;
                    }
                }
                Ok(_) => block.push_str(&line),
                Err(e) => {
                    self.read_error = Some(e);
                    self.done = true;
                    break;
                }
            }
        }
        (!block.is_empty()).then_some(block)
    }
}
