//! What the search and episode code needs from a grammar.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use crate::grammar::{EvalError, Grammar, ParseError, EMPTY_STRING};
use crate::numeric::NumGrammar;

/// A value a program can produce, with a one-field text form for episode
/// files.
pub trait OutputValue: Clone + PartialEq + Eq + Debug + Send + Sync {
    fn to_field(&self) -> String;
    fn from_field(field: &str) -> Option<Self>;
}

impl OutputValue for Vec<String> {
    fn to_field(&self) -> String {
        if self.is_empty() {
            EMPTY_STRING.to_owned()
        } else {
            self.join(" ")
        }
    }

    fn from_field(field: &str) -> Option<Self> {
        match field.trim() {
            EMPTY_STRING => Some(Vec::new()),
            t => Some(crate::grammar::words(t)),
        }
    }
}

impl OutputValue for u64 {
    fn to_field(&self) -> String {
        self.to_string()
    }

    fn from_field(field: &str) -> Option<Self> {
        field.trim().parse().ok()
    }
}

/// A grammar that maps word sequences to outputs.
pub trait Program:
    Clone + Debug + Display + FromStr<Err = ParseError> + PartialEq + Send + Sync
{
    type Output: OutputValue;

    fn run(&self, input: &[String], budget: usize) -> Result<Self::Output, EvalError>;

    fn rule_count(&self) -> usize;
}

impl Program for Grammar {
    type Output = Vec<String>;

    fn run(&self, input: &[String], budget: usize) -> Result<Vec<String>, EvalError> {
        self.evaluate(input, budget)
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }
}

impl Program for NumGrammar {
    type Output = u64;

    fn run(&self, input: &[String], budget: usize) -> Result<u64, EvalError> {
        self.evaluate(input, budget)
    }

    fn rule_count(&self) -> usize {
        self.rules.len()
    }
}
