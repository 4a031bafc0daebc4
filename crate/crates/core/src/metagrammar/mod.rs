//! Random grammar families and their prior.
//!
//! Sequence grammars (MiniSCAN and SCAN-like) share one generative story:
//!
//! 1. draw the number of primitive rules, then the number of higher-order
//!    rules, each uniformly from its range (truncated so the word pool
//!    suffices);
//! 2. draw the rule words uniformly without replacement;
//! 3. give each primitive an output word (or, when allowed, the empty
//!    string) uniformly;
//! 4. give each higher-order rule a shape `V w` or `V w V`, variables drawn
//!    from `u1 u2 x1 x2` without repetition, and a right hand side of
//!    1..=`rhs_max_len` references to those variables;
//! 5. append a concatenation rule.
//!
//! [`prior_logprob`] scores a grammar by replaying exactly these choices.

mod number;
mod sequence;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, ConfigError, ConfigWriter};

pub use number::{sample_number, NumberMetaParams};
pub use sequence::{
    concat_rule, prior_logprob, resample_rule, rule_logprob, sample_miniscan, sample_scanlike,
    ConcatForm,
};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error("pool {pool} has {available} words but {needed} are needed")]
    PoolExhausted {
        pool: &'static str,
        needed: usize,
        available: usize,
    },
}

/// Nonce words used as MiniSCAN rule words.
pub const NONCE_WORDS: &[&str] = &[
    "dax", "wif", "lug", "zup", "fep", "blicket", "kiki", "gazzer", "tufa", "kleek", "mup", "dox",
    "wug", "toma", "frez", "glorp", "niz", "pilk", "sprock", "yorm",
];

pub const COLORS: &[&str] = &[
    "RED", "GREEN", "BLUE", "YELLOW", "PURPLE", "PINK", "BLACK", "WHITE",
];

pub const SCAN_WORDS: &[&str] = &[
    "walk", "look", "run", "jump", "turn", "left", "right", "opposite", "around", "twice",
    "thrice", "and", "after",
];

pub const SCAN_ACTIONS: &[&str] = &["WALK", "LOOK", "RUN", "JUMP", "LTURN", "RTURN"];

fn owned(words: &[&str]) -> Vec<String> {
    words.iter().map(|w| (*w).to_owned()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MiniScanParams {
    pub n_primitives: (usize, usize),
    pub n_higher: (usize, usize),
    pub word_pool: Vec<String>,
    pub color_pool: Vec<String>,
    /// Longest higher-order right hand side, in variable references.
    pub rhs_max_len: usize,
    pub seed: u64,
}

impl Default for MiniScanParams {
    fn default() -> Self {
        MiniScanParams {
            n_primitives: (3, 4),
            n_higher: (2, 4),
            word_pool: owned(NONCE_WORDS),
            color_pool: owned(COLORS),
            rhs_max_len: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanMetaParams {
    pub n_primitives: (usize, usize),
    pub n_higher: (usize, usize),
    pub allow_empty_primitive: bool,
    /// Probability that the final rule is `u1 u2 -> [u2] [u1]`.
    pub alt_concat_prob: f64,
    pub word_pool: Vec<String>,
    pub action_pool: Vec<String>,
    pub rhs_max_len: usize,
    pub seed: u64,
}

impl Default for ScanMetaParams {
    fn default() -> Self {
        let mut words = owned(SCAN_WORDS);
        words.extend(owned(NONCE_WORDS));
        let mut actions = owned(SCAN_ACTIONS);
        actions.extend(owned(COLORS));
        ScanMetaParams {
            n_primitives: (4, 9),
            n_higher: (3, 7),
            allow_empty_primitive: true,
            alt_concat_prob: 0.5,
            word_pool: words,
            action_pool: actions,
            rhs_max_len: 8,
            seed: 0,
        }
    }
}

/// Either sequence family, as accepted by [`prior_logprob`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SeqParams {
    MiniScan(MiniScanParams),
    ScanLike(ScanMetaParams),
}

impl From<MiniScanParams> for SeqParams {
    fn from(p: MiniScanParams) -> Self {
        SeqParams::MiniScan(p)
    }
}

impl From<ScanMetaParams> for SeqParams {
    fn from(p: ScanMetaParams) -> Self {
        SeqParams::ScanLike(p)
    }
}

impl SeqParams {
    pub fn seed(&self) -> u64 {
        match self {
            SeqParams::MiniScan(p) => p.seed,
            SeqParams::ScanLike(p) => p.seed,
        }
    }

    /// Copy with the input and output pools replaced.
    pub fn with_pools(&self, words: Vec<String>, outputs: Vec<String>) -> SeqParams {
        match self {
            SeqParams::MiniScan(p) => SeqParams::MiniScan(MiniScanParams {
                word_pool: words,
                color_pool: outputs,
                ..p.clone()
            }),
            SeqParams::ScanLike(p) => SeqParams::ScanLike(ScanMetaParams {
                word_pool: words,
                action_pool: outputs,
                ..p.clone()
            }),
        }
    }

    pub(crate) fn family(&self) -> sequence::Family<'_> {
        match self {
            SeqParams::MiniScan(p) => sequence::Family {
                n_primitives: p.n_primitives,
                n_higher: p.n_higher,
                words: &p.word_pool,
                outputs: &p.color_pool,
                allow_empty: false,
                alt_concat_prob: 0.0,
                rhs_max_len: p.rhs_max_len,
            },
            SeqParams::ScanLike(p) => sequence::Family {
                n_primitives: p.n_primitives,
                n_higher: p.n_higher,
                words: &p.word_pool,
                outputs: &p.action_pool,
                allow_empty: p.allow_empty_primitive,
                alt_concat_prob: p.alt_concat_prob,
                rhs_max_len: p.rhs_max_len,
            },
        }
    }

    /// Fails with `PoolExhausted` when the pools cannot supply the minimum
    /// rule counts.
    pub fn check_pools(&self) -> Result<(), MetaError> {
        self.family().check_pools()
    }

    pub fn sample(&self, rng: &mut crate::rng::Rng) -> Result<crate::grammar::Grammar, MetaError> {
        sequence::sample_family(&self.family(), rng)
    }
}

fn check_rhs_len(n: usize) -> Result<(), ConfigError> {
    if n == 0 {
        return Err(ConfigError::invalid("rhs_max_len", "must be at least 1"));
    }
    Ok(())
}

impl MiniScanParams {
    pub fn from_config(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::parse(text)?;
        let mut p = MiniScanParams::default();
        c.take_range("n_primitives", &mut p.n_primitives)?;
        c.take_range("n_higher", &mut p.n_higher)?;
        c.take_list("word_pool", &mut p.word_pool)?;
        c.take_list("color_pool", &mut p.color_pool)?;
        c.take("rhs_max_len", &mut p.rhs_max_len)?;
        c.take("seed", &mut p.seed)?;
        c.finish()?;
        check_rhs_len(p.rhs_max_len)?;
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        ConfigWriter::default()
            .range("n_primitives", self.n_primitives)
            .range("n_higher", self.n_higher)
            .list("word_pool", &self.word_pool)
            .list("color_pool", &self.color_pool)
            .field("rhs_max_len", self.rhs_max_len)
            .field("seed", self.seed)
            .finish()
    }
}

impl ScanMetaParams {
    pub fn from_config(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::parse(text)?;
        let mut p = ScanMetaParams::default();
        c.take_range("n_primitives", &mut p.n_primitives)?;
        c.take_range("n_higher", &mut p.n_higher)?;
        c.take("allow_empty_primitive", &mut p.allow_empty_primitive)?;
        c.take("alt_concat_prob", &mut p.alt_concat_prob)?;
        c.take_list("word_pool", &mut p.word_pool)?;
        c.take_list("action_pool", &mut p.action_pool)?;
        c.take("rhs_max_len", &mut p.rhs_max_len)?;
        c.take("seed", &mut p.seed)?;
        c.finish()?;
        if !(0.0..=1.0).contains(&p.alt_concat_prob) {
            return Err(ConfigError::invalid(
                "alt_concat_prob",
                "must lie in [0, 1]",
            ));
        }
        check_rhs_len(p.rhs_max_len)?;
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        ConfigWriter::default()
            .range("n_primitives", self.n_primitives)
            .range("n_higher", self.n_higher)
            .field("allow_empty_primitive", self.allow_empty_primitive)
            .field("alt_concat_prob", self.alt_concat_prob)
            .list("word_pool", &self.word_pool)
            .list("action_pool", &self.action_pool)
            .field("rhs_max_len", self.rhs_max_len)
            .field("seed", self.seed)
            .finish()
    }
}
