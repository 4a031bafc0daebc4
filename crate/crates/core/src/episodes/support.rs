use std::collections::HashMap;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{sample_inputs, EpisodeError, Example, LenBounds};
use crate::metagrammar::{sample_scanlike, ScanMetaParams};
use crate::rng::{seeded, Rng};

/// Test-time support selection for SCAN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportHeuristics {
    pub enabled: bool,
    /// Relative frequency of each input length in training support sets,
    /// indexed by length. Lengths past the end have weight zero.
    pub target_lengths: Vec<f64>,
    /// Weight multiplier for inputs containing "opposite" or "around".
    pub upweight: f64,
    /// Rejection draws before the remaining slots are filled uniformly.
    pub rejection_cap: usize,
}

impl SupportHeuristics {
    pub fn disabled() -> Self {
        SupportHeuristics {
            enabled: false,
            ..SupportHeuristics::with_target(Vec::new())
        }
    }

    pub fn with_target(target_lengths: Vec<f64>) -> Self {
        SupportHeuristics {
            enabled: true,
            target_lengths,
            upweight: 3.0,
            rejection_cap: 10_000,
        }
    }

    /// Target histogram measured on support inputs of episodes drawn from
    /// the SCAN-like meta-grammar (fixed seed, so the result is stable).
    pub fn from_training_distribution() -> Self {
        let params = ScanMetaParams::default();
        let mut rng = seeded(0x5ca1ab1e);
        let mut hist: Vec<f64> = Vec::new();
        for _ in 0..200 {
            let Ok(g) = sample_scanlike(&params, &mut rng) else {
                continue;
            };
            let Ok(inputs) = sample_inputs(&g, 20, LenBounds::default(), &mut rng) else {
                continue;
            };
            for i in inputs {
                if hist.len() <= i.len() {
                    hist.resize(i.len() + 1, 0.0);
                }
                hist[i.len()] += 1.0;
            }
        }
        SupportHeuristics::with_target(hist)
    }

    fn target(&self, len: usize) -> f64 {
        self.target_lengths.get(len).copied().unwrap_or(0.0)
    }
}

impl Default for SupportHeuristics {
    fn default() -> Self {
        SupportHeuristics::from_training_distribution()
    }
}

fn is_long_word_example(e: &Example) -> bool {
    e.input.iter().any(|w| w == "opposite" || w == "around")
}

/// Picks `k` distinct examples from `train`. With heuristics enabled each
/// candidate is drawn uniformly and accepted with probability proportional
/// to target(len) / empirical(len), times the upweight for "opposite" and
/// "around"; slots left after the rejection cap are filled uniformly.
pub fn select_support(
    train: &[Example],
    k: usize,
    heuristics: &SupportHeuristics,
    rng: &mut Rng,
) -> Result<Vec<Example>, EpisodeError> {
    if k > train.len() {
        return Err(EpisodeError::TooFew {
            needed: k,
            available: train.len(),
        });
    }
    if !heuristics.enabled {
        return Ok(index::sample(rng, train.len(), k)
            .into_iter()
            .map(|i| train[i].clone())
            .collect());
    }

    let mut empirical: HashMap<usize, f64> = HashMap::new();
    for e in train {
        *empirical.entry(e.input.len()).or_default() += 1.0;
    }
    let weights: Vec<f64> = train
        .iter()
        .map(|e| {
            let w = heuristics.target(e.input.len()) / empirical[&e.input.len()];
            if is_long_word_example(e) {
                w * heuristics.upweight
            } else {
                w
            }
        })
        .collect();
    let envelope = |taken: &[bool]| {
        (0..weights.len())
            .filter(|&i| !taken[i])
            .map(|i| weights[i])
            .fold(0.0, f64::max)
    };

    let mut taken = vec![false; train.len()];
    let mut chosen = Vec::with_capacity(k);
    let mut max_w = envelope(&taken);
    let mut draws = 0;
    while chosen.len() < k && draws < heuristics.rejection_cap && max_w > 0.0 {
        draws += 1;
        let i = rng.gen_range(0..train.len());
        if taken[i] {
            continue;
        }
        if rng.gen::<f64>() * max_w < weights[i] {
            taken[i] = true;
            chosen.push(i);
            // Shrink the envelope once the heaviest examples are used up.
            if weights[i] >= max_w {
                max_w = envelope(&taken);
            }
        }
    }
    if chosen.len() < k {
        let rest: Vec<usize> = (0..train.len()).filter(|&i| !taken[i]).collect();
        let fill = index::sample(rng, rest.len(), k - chosen.len());
        chosen.extend(fill.into_iter().map(|j| rest[j]));
    }
    Ok(chosen.into_iter().map(|i| train[i].clone()).collect())
}
