use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::MetaError;
use crate::config::{Config, ConfigError, ConfigWriter};
use crate::grammar::{PatternElem, VarKind};
use crate::numeric::{ArithRhs, Factor, NumGrammar, NumRule};
use crate::rng::Rng;

/// Most token IDs a single sample can consume: nine digits, nine tens,
/// three power words, two exceptions for each of four powers, one
/// conjunction.
const MAX_TOKENS_USED: usize = 9 + 9 + 3 + 8 + 1;

/// Base-10 number-word families. Powers of ten get either their own word
/// (`token13 -> 100`) or a "one P" form (`token14 token36 -> 1000`); the
/// top power is 10^6 (western) or 10^4 (myriad), which both reach
/// 99,999,999.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberMetaParams {
    /// Token IDs available, named `token01` onwards.
    pub pool_size: usize,
    /// Words for 10..90 instead of a regular "x ten y" rule.
    pub irregular_tens_prob: f64,
    /// A power word standing alone denotes one of that power.
    pub standalone_power_prob: f64,
    pub myriad_prob: f64,
    /// Per power and per exception kind.
    pub exception_prob: f64,
    pub conjunctive_prob: f64,
    pub seed: u64,
}

impl Default for NumberMetaParams {
    fn default() -> Self {
        NumberMetaParams {
            pool_size: 50,
            irregular_tens_prob: 0.5,
            standalone_power_prob: 0.5,
            myriad_prob: 0.5,
            exception_prob: 0.25,
            conjunctive_prob: 0.25,
            seed: 0,
        }
    }
}

impl NumberMetaParams {
    pub fn from_config(text: &str) -> Result<Self, ConfigError> {
        let mut c = Config::parse(text)?;
        let mut p = NumberMetaParams::default();
        c.take("pool_size", &mut p.pool_size)?;
        c.take("irregular_tens_prob", &mut p.irregular_tens_prob)?;
        c.take("standalone_power_prob", &mut p.standalone_power_prob)?;
        c.take("myriad_prob", &mut p.myriad_prob)?;
        c.take("exception_prob", &mut p.exception_prob)?;
        c.take("conjunctive_prob", &mut p.conjunctive_prob)?;
        c.take("seed", &mut p.seed)?;
        c.finish()?;
        for (field, v) in [
            ("irregular_tens_prob", p.irregular_tens_prob),
            ("standalone_power_prob", p.standalone_power_prob),
            ("myriad_prob", p.myriad_prob),
            ("exception_prob", p.exception_prob),
            ("conjunctive_prob", p.conjunctive_prob),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::invalid(field, "must lie in [0, 1]"));
            }
        }
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        ConfigWriter::default()
            .field("pool_size", self.pool_size)
            .field("irregular_tens_prob", self.irregular_tens_prob)
            .field("standalone_power_prob", self.standalone_power_prob)
            .field("myriad_prob", self.myriad_prob)
            .field("exception_prob", self.exception_prob)
            .field("conjunctive_prob", self.conjunctive_prob)
            .field("seed", self.seed)
            .finish()
    }
}

pub fn token_name(i: usize) -> String {
    format!("token{i:02}")
}

struct Tokens {
    free: Vec<String>,
}

impl Tokens {
    fn draw(&mut self, rng: &mut Rng) -> String {
        let i = rng.gen_range(0..self.free.len() as u64) as usize;
        self.free.remove(i)
    }
}

fn lit(w: &str) -> PatternElem {
    PatternElem::literal(w)
}

fn constant_rule(lhs: Vec<PatternElem>, n: u64) -> NumRule {
    NumRule::new(lhs, ArithRhs::constant(n))
}

fn y1() -> PatternElem {
    PatternElem::var(VarKind::Opt, 1)
}

fn var_ref(name: &str) -> Factor {
    Factor::VarRef(name.to_owned())
}

/// `lhs -> P*m + [y1]`
fn fixed_multiple(lhs: Vec<PatternElem>, power: u64, m: u64) -> NumRule {
    NumRule::new(
        lhs,
        ArithRhs {
            terms: vec![
                vec![Factor::Int(power), Factor::Int(m)],
                vec![var_ref("y1")],
            ],
        },
    )
}

/// `x1 W y1 -> [x1]*P + [y1]`
fn positional(word: &str, power: u64) -> NumRule {
    NumRule::new(
        vec![PatternElem::var(VarKind::Str, 1), lit(word), y1()],
        ArithRhs {
            terms: vec![vec![var_ref("x1"), Factor::Int(power)], vec![var_ref("y1")]],
        },
    )
}

/// `u1 [C] x1 -> [u1] + [x1]`
fn additive(conj: Option<&str>) -> NumRule {
    let mut lhs = vec![PatternElem::var(VarKind::Prim, 1)];
    lhs.extend(conj.map(lit));
    lhs.push(PatternElem::var(VarKind::Str, 1));
    NumRule::new(
        lhs,
        ArithRhs {
            terms: vec![vec![var_ref("u1")], vec![var_ref("x1")]],
        },
    )
}

/// Samples a number grammar: primitives for 1..9, tens and power words,
/// positional rules from the largest power down with any exception rules
/// directly above their general rule, an optional conjunctive rule, and the
/// additive rule `u1 x1 -> [u1] + [x1]` last.
pub fn sample_number(p: &NumberMetaParams, rng: &mut Rng) -> Result<NumGrammar, MetaError> {
    if p.pool_size < MAX_TOKENS_USED {
        return Err(MetaError::PoolExhausted {
            pool: "token",
            needed: MAX_TOKENS_USED,
            available: p.pool_size,
        });
    }
    let mut tokens = Tokens {
        free: (1..=p.pool_size).map(token_name).collect(),
    };
    let mut rules = Vec::new();

    let digits: Vec<String> = (1..=9).map(|_| tokens.draw(rng)).collect();
    for (d, w) in (1..).zip(&digits) {
        rules.push(constant_rule(vec![lit(w)], d));
    }

    let irregular_tens = rng.gen_bool(p.irregular_tens_prob);
    if irregular_tens {
        for t in 1..=9u64 {
            let w = tokens.draw(rng);
            rules.push(constant_rule(vec![lit(&w)], t * 10));
        }
    }
    let top = if rng.gen_bool(p.myriad_prob) {
        10_000
    } else {
        1_000_000
    };
    let mut powers: Vec<u64> = Vec::new();
    if !irregular_tens {
        powers.push(10);
    }
    powers.extend([100, 1000, top]);

    let mut power_words = Vec::with_capacity(powers.len());
    for &power in &powers {
        let w = tokens.draw(rng);
        if rng.gen_bool(p.standalone_power_prob) {
            rules.push(constant_rule(vec![lit(&w)], power));
        } else {
            rules.push(constant_rule(vec![lit(&digits[0]), lit(&w)], power));
        }
        power_words.push(w);
    }

    for (&power, word) in powers.iter().zip(&power_words).rev() {
        if rng.gen_bool(p.exception_prob) {
            let e = tokens.draw(rng);
            rules.push(fixed_multiple(vec![lit(&e), y1()], power, 1));
        }
        if rng.gen_bool(p.exception_prob) {
            let e = tokens.draw(rng);
            let m = rng.gen_range(2..=9u64);
            rules.push(fixed_multiple(vec![lit(&e), lit(word), y1()], power, m));
        }
        rules.push(positional(word, power));
    }

    if rng.gen_bool(p.conjunctive_prob) {
        let c = tokens.draw(rng);
        rules.push(additive(Some(&c)));
    }
    rules.push(additive(None));
    Ok(NumGrammar::new(rules))
}
