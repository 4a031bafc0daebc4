use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EpisodeError, Example};
use crate::grammar::{words, Grammar, DEFAULT_EVAL_BUDGET};
use crate::rng::seeded;

/// Commands in the SCAN language: 34 verb phrases, times three repetition
/// suffixes, alone or joined pairwise by "and" / "after".
pub const SCAN_DATASET_SIZE: usize = 20_910;

const ACTIONS: [&str; 4] = ["walk", "look", "run", "jump"];
const DIRECTIONS: [&str; 2] = ["left", "right"];

/// Every SCAN command, in generation order.
pub fn scan_commands() -> Vec<Vec<String>> {
    let mut verb_phrases: Vec<String> = ACTIONS.iter().map(|a| (*a).to_owned()).collect();
    let movers: Vec<&str> = ACTIONS.iter().copied().chain(["turn"]).collect();
    for m in &movers {
        for d in DIRECTIONS {
            verb_phrases.push(format!("{m} {d}"));
        }
    }
    for modifier in ["opposite", "around"] {
        for m in &movers {
            for d in DIRECTIONS {
                verb_phrases.push(format!("{m} {modifier} {d}"));
            }
        }
    }
    let clauses: Vec<String> = verb_phrases
        .iter()
        .flat_map(|v| [v.clone(), format!("{v} twice"), format!("{v} thrice")])
        .collect();
    let mut commands: Vec<Vec<String>> = clauses.iter().map(|c| words(c)).collect();
    for conj in ["and", "after"] {
        for a in &clauses {
            for b in &clauses {
                commands.push(words(&format!("{a} {conj} {b}")));
            }
        }
    }
    commands
}

/// Pairs every SCAN command with its translation under `canonical`, sorted
/// by input. Commands the grammar cannot translate are dropped.
pub fn build_scan_dataset(canonical: &Grammar) -> Vec<Example> {
    let mut data: Vec<Example> = scan_commands()
        .into_par_iter()
        .filter_map(|input| {
            let output = canonical.evaluate(&input, DEFAULT_EVAL_BUDGET).ok()?;
            Some(Example::new(input, output))
        })
        .collect();
    data.sort();
    data
}

/// Parses `IN: <words> OUT: <words>` lines; blank lines are skipped.
pub fn parse_scan_text(text: &str) -> Result<Vec<Example>, EpisodeError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some(rest) = line.strip_prefix("IN:") else {
            return Err(EpisodeError::format(line_no, "expected \"IN:\""));
        };
        let Some((input, output)) = rest.split_once("OUT:") else {
            return Err(EpisodeError::format(line_no, "expected \"OUT:\""));
        };
        let input = words(input);
        if input.is_empty() {
            return Err(EpisodeError::format(line_no, "empty command"));
        }
        out.push(Example::new(input, words(output)));
    }
    Ok(out)
}

pub fn load_scan_file(path: &Path) -> Result<Vec<Example>, EpisodeError> {
    let text = std::fs::read_to_string(path).map_err(|source| EpisodeError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scan_text(&text)
}

pub fn write_scan_text(data: &[Example]) -> String {
    let mut out = String::new();
    for e in data {
        out.push_str(&format!(
            "IN: {} OUT: {}\n",
            e.input.join(" "),
            e.output.join(" ")
        ));
    }
    out
}

/// Maps the published corpus's action names (`I_WALK`, `I_TURN_LEFT`, ...)
/// onto the output words used by the grammar. Other words pass through.
pub fn normalize_actions(data: &mut [Example]) {
    for e in data {
        for w in &mut e.output {
            let mapped = match w.as_str() {
                "I_WALK" => "WALK",
                "I_LOOK" => "LOOK",
                "I_RUN" => "RUN",
                "I_JUMP" => "JUMP",
                "I_TURN_LEFT" => "LTURN",
                "I_TURN_RIGHT" => "RTURN",
                _ => continue,
            };
            *w = mapped.to_owned();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SplitSpec {
    /// Seeded random partition.
    Simple { seed: u64, train_fraction: f64 },
    /// Train on outputs of at most `max_train_len` actions.
    Length { max_train_len: usize },
    /// Train on "jump" alone plus every command without it.
    AddJump,
    /// Hold out every command containing "around right".
    AddAroundRight,
}

impl SplitSpec {
    pub fn simple(seed: u64) -> Self {
        SplitSpec::Simple {
            seed,
            train_fraction: 0.8,
        }
    }

    pub fn length() -> Self {
        SplitSpec::Length { max_train_len: 22 }
    }

    /// `simple`, `length`, `add-jump` (or `jump`), `add-around-right` (or
    /// `right`).
    pub fn from_name(name: &str, seed: u64) -> Result<Self, EpisodeError> {
        match name {
            "simple" => Ok(SplitSpec::simple(seed)),
            "length" => Ok(SplitSpec::length()),
            "add-jump" | "jump" => Ok(SplitSpec::AddJump),
            "add-around-right" | "right" => Ok(SplitSpec::AddAroundRight),
            other => Err(EpisodeError::UnknownSplit(other.to_owned())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SplitSpec::Simple { .. } => "simple",
            SplitSpec::Length { .. } => "length",
            SplitSpec::AddJump => "add-jump",
            SplitSpec::AddAroundRight => "add-around-right",
        }
    }
}

fn has_bigram(input: &[String], a: &str, b: &str) -> bool {
    input.windows(2).any(|w| w[0] == a && w[1] == b)
}

/// Partitions `data` into (train, test), preserving input order within each.
pub fn make_split(data: &[Example], spec: &SplitSpec) -> (Vec<Example>, Vec<Example>) {
    let in_train: Vec<bool> = match spec {
        SplitSpec::Simple {
            seed,
            train_fraction,
        } => {
            let mut order: Vec<usize> = (0..data.len()).collect();
            order.shuffle(&mut seeded(*seed));
            let n_train = (data.len() as f64 * train_fraction).round() as usize;
            let mut flags = vec![false; data.len()];
            for &i in &order[..n_train.min(data.len())] {
                flags[i] = true;
            }
            flags
        }
        SplitSpec::Length { max_train_len } => data
            .iter()
            .map(|e| e.output.len() <= *max_train_len)
            .collect(),
        SplitSpec::AddJump => data
            .iter()
            .map(|e| e.input == ["jump"] || !e.input.iter().any(|w| w == "jump"))
            .collect(),
        SplitSpec::AddAroundRight => data
            .iter()
            .map(|e| !has_bigram(&e.input, "around", "right"))
            .collect(),
    };
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (e, keep) in data.iter().zip(in_train) {
        if keep {
            train.push(e.clone());
        } else {
            test.push(e.clone());
        }
    }
    (train, test)
}
