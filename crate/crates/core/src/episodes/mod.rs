//! Few-shot episodes: support and query examples drawn from a grammar, the
//! SCAN command dataset and its splits, and test-time support selection.

mod inputs;
mod numbers;
mod scan;
mod support;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grammar::{words, DEFAULT_EVAL_BUDGET};
use crate::program::{OutputValue, Program};

pub use inputs::{make_episode, sample_inputs, LenBounds, STALL_LIMIT};
pub use numbers::{
    make_number_episode, necessary_examples, IntegerDistribution, NumberEpisodeParams,
};
pub use scan::{
    build_scan_dataset, load_scan_file, make_split, normalize_actions, parse_scan_text,
    scan_commands, write_scan_text, SplitSpec, SCAN_DATASET_SIZE,
};
pub use support::{select_support, SupportHeuristics};

#[derive(Debug, Error)]
pub enum EpisodeError {
    #[error("found only {found} of {wanted} distinct inputs within the bounds")]
    Unsatisfiable { wanted: usize, found: usize },
    #[error("{0} must be at least 1")]
    EmptyRequest(&'static str),
    #[error("asked for {needed} examples but only {available} are available")]
    TooFew { needed: usize, available: usize },
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("unknown split {0:?} (expected simple, length, add-jump or add-around-right)")]
    UnknownSplit(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl EpisodeError {
    fn format(line: usize, message: impl Into<String>) -> Self {
        EpisodeError::Format {
            line,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Example<O = Vec<String>> {
    pub input: Vec<String>,
    pub output: O,
}

impl<O> Example<O> {
    pub fn new(input: Vec<String>, output: O) -> Self {
        Example { input, output }
    }
}

impl Example {
    /// `Example::parse("jump twice", "JUMP JUMP")`
    pub fn parse(input: &str, output: &str) -> Self {
        Example::new(words(input), words(output))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    MiniScan,
    ScanLike,
    Scan,
    Number,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::MiniScan => "miniscan",
            Domain::ScanLike => "scanlike",
            Domain::Scan => "scan",
            Domain::Number => "number",
        })
    }
}

impl FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "miniscan" => Ok(Domain::MiniScan),
            "scanlike" => Ok(Domain::ScanLike),
            "scan" => Ok(Domain::Scan),
            "number" => Ok(Domain::Number),
            other => Err(format!("unknown domain {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Episode<P: Program> {
    pub domain: Domain,
    pub support: Vec<Example<P::Output>>,
    pub query: Vec<Example<P::Output>>,
    pub target: Option<P>,
}

impl<P: Program> Episode<P> {
    /// True when every support and query pair agrees with the target (or
    /// when there is no target).
    pub fn is_sound(&self) -> bool {
        let Some(target) = &self.target else {
            return true;
        };
        self.support
            .iter()
            .chain(&self.query)
            .all(|e| target.run(&e.input, DEFAULT_EVAL_BUDGET).as_ref() == Ok(&e.output))
    }

    /// Line-oriented text form:
    ///
    /// ```text
    /// # domain=miniscan
    /// TARGET<TAB>dax -> RED
    /// SUPPORT<TAB>dax<TAB>RED
    /// QUERY<TAB>dax dax<TAB>RED RED
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = format!("# domain={}\n", self.domain);
        if let Some(target) = &self.target {
            for line in target.to_string().lines() {
                out.push_str(&format!("TARGET\t{line}\n"));
            }
        }
        for (tag, set) in [("SUPPORT", &self.support), ("QUERY", &self.query)] {
            for e in set {
                out.push_str(&format!(
                    "{tag}\t{}\t{}\n",
                    e.input.join(" "),
                    e.output.to_field()
                ));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, EpisodeError> {
        let mut domain = None;
        let mut target_lines: Vec<&str> = Vec::new();
        let mut target_line = 0;
        let mut support = Vec::new();
        let mut query = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(name) = comment.trim().strip_prefix("domain=") {
                    domain = Some(
                        name.trim()
                            .parse()
                            .map_err(|e: String| EpisodeError::format(line_no, e))?,
                    );
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                ["TARGET", rule] => {
                    if target_lines.is_empty() {
                        target_line = line_no;
                    }
                    target_lines.push(rule);
                }
                [tag @ ("SUPPORT" | "QUERY"), input, output] => {
                    let input = words(input);
                    if input.is_empty() {
                        return Err(EpisodeError::format(line_no, "empty input"));
                    }
                    let output = P::Output::from_field(output)
                        .ok_or_else(|| EpisodeError::format(line_no, "bad output field"))?;
                    let set = if *tag == "SUPPORT" {
                        &mut support
                    } else {
                        &mut query
                    };
                    set.push(Example::new(input, output));
                }
                _ => {
                    return Err(EpisodeError::format(
                        line_no,
                        "expected TARGET, SUPPORT or QUERY record",
                    ))
                }
            }
        }
        let target = if target_lines.is_empty() {
            None
        } else {
            let text = target_lines.join("\n");
            Some(P::from_str(&text).map_err(|e| {
                EpisodeError::format(target_line + e.line().saturating_sub(1), e.to_string())
            })?)
        };
        Ok(Episode {
            domain: domain.ok_or_else(|| EpisodeError::format(1, "missing # domain= header"))?,
            support,
            query,
            target,
        })
    }
}
