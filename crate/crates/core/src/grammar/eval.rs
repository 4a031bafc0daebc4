use std::fmt;

use serde::{Deserialize, Serialize};

use super::{match_lhs, EvalError, Grammar, RhsElem};

/// Default cap on rule applications per top-level evaluation.
pub const DEFAULT_EVAL_BUDGET: usize = 1_000;
/// Default cap on recursion depth.
pub const DEFAULT_DEPTH_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Limit {
    Applications(usize),
    Depth(usize),
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Applications(n) => write!(f, "{n}-application"),
            Limit::Depth(n) => write!(f, "depth-{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalLimits {
    pub applications: usize,
    pub depth: usize,
}

impl EvalLimits {
    pub fn with_budget(applications: usize) -> Self {
        EvalLimits {
            applications,
            depth: DEFAULT_DEPTH_CAP,
        }
    }
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits::with_budget(DEFAULT_EVAL_BUDGET)
    }
}

/// One rule application, reported to evaluation observers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub depth: usize,
    pub rule: usize,
    pub input_len: usize,
    /// Length of each variable binding, in pattern order.
    pub bound_lens: Vec<usize>,
}

/// Shared bookkeeping for rule applications; used by both grammar flavours.
pub(crate) struct Meter<'o> {
    limits: EvalLimits,
    pub(crate) applications: usize,
    observer: Option<&'o mut dyn FnMut(&Step)>,
}

impl<'o> Meter<'o> {
    pub(crate) fn new(limits: EvalLimits, observer: Option<&'o mut dyn FnMut(&Step)>) -> Self {
        Meter {
            limits,
            applications: 0,
            observer,
        }
    }

    pub(crate) fn enter(&mut self, depth: usize) -> Result<(), EvalError> {
        if depth >= self.limits.depth {
            return Err(EvalError::BudgetExceeded {
                limit: Limit::Depth(self.limits.depth),
            });
        }
        self.applications += 1;
        if self.applications > self.limits.applications {
            return Err(EvalError::BudgetExceeded {
                limit: Limit::Applications(self.limits.applications),
            });
        }
        Ok(())
    }

    pub(crate) fn observe(&mut self, step: impl FnOnce() -> Step) {
        if let Some(obs) = self.observer.as_mut() {
            obs(&step());
        }
    }
}

impl Grammar {
    /// Rewrites `input` to an output word sequence.
    pub fn evaluate(&self, input: &[String], budget: usize) -> Result<Vec<String>, EvalError> {
        self.evaluate_with(input, EvalLimits::with_budget(budget), None)
    }

    /// Like [`Grammar::evaluate`] with explicit limits and an optional
    /// per-application observer.
    pub fn evaluate_with(
        &self,
        input: &[String],
        limits: EvalLimits,
        observer: Option<&mut dyn FnMut(&Step)>,
    ) -> Result<Vec<String>, EvalError> {
        let mut meter = Meter::new(limits, observer);
        let mut out = Vec::new();
        self.rewrite(input, 0, &mut meter, &mut out)?;
        Ok(out)
    }

    fn rewrite(
        &self,
        input: &[String],
        depth: usize,
        meter: &mut Meter<'_>,
        out: &mut Vec<String>,
    ) -> Result<(), EvalError> {
        for (idx, rule) in self.rules.iter().enumerate() {
            let Some(bindings) = match_lhs(&rule.lhs, input) else {
                continue;
            };
            meter.enter(depth)?;
            meter.observe(|| Step {
                depth,
                rule: idx,
                input_len: input.len(),
                bound_lens: bindings.iter().map(|(_, s)| s.len()).collect(),
            });
            for elem in &rule.rhs {
                match elem {
                    RhsElem::Output(w) => out.push(w.clone()),
                    RhsElem::VarRef(name) => {
                        // Unbound references only occur in unvalidated grammars.
                        let Some(sub) = bindings.get(name) else {
                            return Err(EvalError::NoMatch {
                                input: input.to_vec(),
                            });
                        };
                        if !sub.is_empty() {
                            self.rewrite(sub, depth + 1, meter, out)?;
                        }
                    }
                }
            }
            return Ok(());
        }
        Err(EvalError::NoMatch {
            input: input.to_vec(),
        })
    }
}

/// Free-function form of [`Grammar::evaluate`].
pub fn evaluate(g: &Grammar, input: &[String], budget: usize) -> Result<Vec<String>, EvalError> {
    g.evaluate(input, budget)
}
