use serde::{Deserialize, Serialize};

use super::proposers::{support_vocabulary, Proposer};
use super::SynthError;
use crate::episodes::Example;
use crate::grammar::{print_grammar, Grammar, PatternElem, RhsElem, Rule, Var, VarKind};
use crate::metagrammar::{concat_rule, ConcatForm, SeqParams};

const VARS: [(VarKind, u32); 4] = [
    (VarKind::Prim, 1),
    (VarKind::Prim, 2),
    (VarKind::Str, 1),
    (VarKind::Str, 2),
];

/// Higher-order shapes: four one-variable forms `v w`, then twelve
/// two-variable forms `v w v'` with v' != v.
const N_SHAPES: usize = 16;

fn shape_vars(shape: usize) -> Vec<Var> {
    let var = |i: usize| Var::new(VARS[i].0, VARS[i].1);
    if shape < 4 {
        return vec![var(shape)];
    }
    let t = shape - 4;
    let first = t / 3;
    let mut rest: Vec<usize> = (0..4).filter(|&i| i != first).collect();
    vec![var(first), var(rest.remove(t % 3))]
}

/// The grammar space covered by the enumerator, mirroring the sequence
/// meta-grammars: distinct-word primitives, distinct-word higher-order
/// rules, then a concatenation rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumLimits {
    pub n_primitives: (usize, usize),
    pub n_higher: (usize, usize),
    pub rhs_max_len: usize,
    pub allow_empty: bool,
    pub concat_forms: Vec<ConcatForm>,
}

impl From<&SeqParams> for EnumLimits {
    fn from(p: &SeqParams) -> Self {
        let f = p.family();
        let concat_forms = match f.alt_concat_prob {
            a if a <= 0.0 => vec![ConcatForm::Standard],
            a if a >= 1.0 => vec![ConcatForm::Swap],
            _ => vec![ConcatForm::Standard, ConcatForm::Swap],
        };
        EnumLimits {
            n_primitives: f.n_primitives,
            n_higher: f.n_higher,
            rhs_max_len: f.rhs_max_len.max(1),
            allow_empty: f.allow_empty,
            concat_forms,
        }
    }
}

/// One size class: rule counts and total higher-order RHS length.
#[derive(Clone, Copy, Debug)]
struct Class {
    p: usize,
    h: usize,
    total_rhs: usize,
}

/// Every grammar in the limits, each exactly once, ordered by rule count,
/// then total higher-order RHS length, then lexicographically by the
/// vector of choices that builds it. Primitive rules are listed in
/// vocabulary order (reordering them never changes behaviour); all other
/// orderings are distinct grammars.
pub struct EnumerationProposer {
    words: Vec<String>,
    outputs: Vec<String>,
    limits: EnumLimits,
    classes: Vec<Class>,
    class: usize,
    digits: Vec<usize>,
    started: bool,
}

impl EnumerationProposer {
    pub fn new(
        words: Vec<String>,
        outputs: Vec<String>,
        limits: EnumLimits,
    ) -> Result<Self, SynthError> {
        if words.is_empty() {
            return Err(SynthError::EmptyVocabulary);
        }
        let n_out = outputs.len() + usize::from(limits.allow_empty);
        let m = limits.rhs_max_len.max(1);
        let mut classes = Vec::new();
        for p in limits.n_primitives.0..=limits.n_primitives.1 {
            if p > 0 && n_out == 0 {
                continue;
            }
            for h in limits.n_higher.0..=limits.n_higher.1 {
                if p + h > words.len() {
                    continue;
                }
                for total_rhs in h..=h * m {
                    classes.push(Class { p, h, total_rhs });
                }
            }
        }
        classes.sort_by_key(|c| (c.p + c.h, c.total_rhs, c.p));
        if limits.concat_forms.is_empty() {
            classes.clear();
        }
        Ok(EnumerationProposer {
            words,
            outputs,
            limits,
            classes,
            class: 0,
            digits: Vec::new(),
            started: false,
        })
    }

    pub fn from_support(support: &[Example], limits: EnumLimits) -> Result<Self, SynthError> {
        let (words, outputs) = support_vocabulary(support);
        EnumerationProposer::new(words, outputs, limits)
    }

    fn n_outputs(&self) -> usize {
        self.outputs.len() + usize::from(self.limits.allow_empty)
    }

    /// Number of values the next digit can take, or None when `digits` is
    /// a complete choice vector for class `c`.
    fn radix(&self, c: Class, digits: &[usize]) -> Option<usize> {
        let (p, h, v, m) = (c.p, c.h, self.words.len(), self.limits.rhs_max_len.max(1));
        let pos = digits.len();
        if pos < p {
            // Primitive words as a combination: offsets past the previous pick.
            let prev = digits.iter().fold(-1i64, |prev, &d| prev + 1 + d as i64);
            return Some((v as i64 - (p - pos) as i64 - prev) as usize);
        }
        if pos < 2 * p {
            return Some(self.n_outputs());
        }
        if pos < 2 * p + h {
            return Some(v - p - (pos - 2 * p));
        }
        if pos < 2 * p + 2 * h {
            let k = pos - 2 * p - h;
            let (lo, hi) = self.length_range(c, &digits[2 * p + h..pos], k, m);
            return Some(hi - lo + 1);
        }
        if pos < 2 * p + 3 * h {
            return Some(N_SHAPES);
        }
        let rhs_start = 2 * p + 3 * h;
        if pos < rhs_start + c.total_rhs {
            let lengths = self.lengths(c, &digits[2 * p + h..2 * p + 2 * h]);
            let mut offset = pos - rhs_start;
            for (k, len) in lengths.iter().enumerate() {
                if offset < *len {
                    return Some(shape_vars(digits[2 * p + 2 * h + k]).len());
                }
                offset -= len;
            }
            unreachable!("rhs slot beyond total length");
        }
        if pos == rhs_start + c.total_rhs {
            return Some(self.limits.concat_forms.len());
        }
        None
    }

    /// Allowed lengths for higher-order rule `k` given the earlier choices.
    fn length_range(&self, c: Class, earlier: &[usize], k: usize, m: usize) -> (usize, usize) {
        let used: usize = self.lengths(c, earlier).iter().sum();
        let rem = c.total_rhs - used;
        let after = c.h - k - 1;
        let lo = rem.saturating_sub(after * m).max(1);
        let hi = (rem - after).min(m);
        (lo, hi)
    }

    fn lengths(&self, c: Class, digits: &[usize]) -> Vec<usize> {
        let m = self.limits.rhs_max_len.max(1);
        let mut out = Vec::with_capacity(digits.len());
        for (k, &d) in digits.iter().enumerate() {
            let used: usize = out.iter().sum();
            let rem = c.total_rhs - used;
            let after = c.h - k - 1;
            let lo = rem.saturating_sub(after * m).max(1);
            out.push(lo + d);
        }
        out
    }

    /// Extends `digits` with zeros until complete.
    fn fill(&mut self, c: Class) {
        while let Some(r) = self.radix(c, &self.digits) {
            debug_assert!(r > 0);
            self.digits.push(0);
        }
    }

    /// Moves to the next choice vector within the class; false when the
    /// class is exhausted.
    fn increment(&mut self, c: Class) -> bool {
        while let Some(d) = self.digits.pop() {
            let r = self
                .radix(c, &self.digits)
                .expect("prefix of a complete vector");
            if d + 1 < r {
                self.digits.push(d + 1);
                self.fill(c);
                return true;
            }
        }
        false
    }

    fn build(&self, c: Class) -> Grammar {
        let (p, h) = (c.p, c.h);
        let d = &self.digits;
        let mut rules = Vec::with_capacity(p + h + 1);
        let mut used = vec![false; self.words.len()];
        let mut idx = -1i64;
        for j in 0..p {
            idx += 1 + d[j] as i64;
            used[idx as usize] = true;
            let rhs = match self.outputs.get(d[p + j]) {
                Some(o) => vec![RhsElem::Output(o.clone())],
                None => Vec::new(),
            };
            rules.push(Rule::new(
                vec![PatternElem::literal(&self.words[idx as usize])],
                rhs,
            ));
        }
        let mut higher_words = Vec::with_capacity(h);
        for k in 0..h {
            let free: Vec<usize> = (0..self.words.len()).filter(|&i| !used[i]).collect();
            let w = free[d[2 * p + k]];
            used[w] = true;
            higher_words.push(w);
        }
        let lengths = self.lengths(c, &d[2 * p + h..2 * p + 2 * h]);
        let mut slot = 2 * p + 3 * h;
        for k in 0..h {
            let vars = shape_vars(d[2 * p + 2 * h + k]);
            let mut lhs = vec![
                PatternElem::Var(vars[0].clone()),
                PatternElem::literal(&self.words[higher_words[k]]),
            ];
            if let Some(second) = vars.get(1) {
                lhs.push(PatternElem::Var(second.clone()));
            }
            let rhs = (0..lengths[k])
                .map(|i| RhsElem::VarRef(vars[d[slot + i]].name.clone()))
                .collect();
            slot += lengths[k];
            rules.push(Rule::new(lhs, rhs));
        }
        rules.push(concat_rule(self.limits.concat_forms[d[slot]]));
        Grammar::new(rules)
    }

    fn next_grammar(&mut self) -> Option<Grammar> {
        loop {
            let c = *self.classes.get(self.class)?;
            let ok = if self.started {
                self.increment(c)
            } else {
                self.digits.clear();
                self.fill(c);
                self.started = true;
                true
            };
            if ok {
                return Some(self.build(c));
            }
            self.class += 1;
            self.started = false;
        }
    }
}

impl Proposer for EnumerationProposer {
    fn next_text(&mut self) -> Option<String> {
        self.next_grammar().map(|g| print_grammar(&g))
    }
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;

    use super::*;
    use crate::grammar::{parse_grammar, words};
    use crate::metagrammar::{prior_logprob, MiniScanParams, ScanMetaParams};

    fn limits(p: (usize, usize), h: (usize, usize), m: usize) -> EnumLimits {
        EnumLimits {
            n_primitives: p,
            n_higher: h,
            rhs_max_len: m,
            allow_empty: false,
            concat_forms: vec![ConcatForm::Standard],
        }
    }

    #[test]
    fn smallest_grammar_first() {
        let mut e = EnumerationProposer::new(words("dax"), words("RED"), limits((1, 1), (0, 0), 8))
            .unwrap();
        assert_eq!(e.next_text().unwrap(), "dax -> RED\nu1 x1 -> [u1] [x1]");
        assert_eq!(e.next_text(), None);
    }

    #[test]
    fn shapes_are_distinct() {
        let all: HashSet<Vec<Var>> = (0..N_SHAPES).map(shape_vars).collect();
        assert_eq!(all.len(), N_SHAPES);
    }

    /// Independent count of a class: words choose(V, p) * outputs^p *
    /// perm(V - p, h) * compositions * shapes and references.
    #[test]
    fn covers_small_space_exactly() {
        let (v, o, m) = (3usize, 2usize, 2usize);
        let lim = limits((1, 1), (1, 1), m);
        let mut e = EnumerationProposer::new(words("a b c"), words("X Y"), lim).unwrap();
        let mut seen = HashSet::new();
        let mut sizes = Vec::new();
        while let Some(t) = e.next_text() {
            let g = parse_grammar(&t).unwrap();
            let len: usize = g.rules[1].rhs.len();
            sizes.push(len);
            assert!(seen.insert(t));
        }
        // p=1, h=1: 3 words * 2 outputs * 2 higher words * sum over len of
        // (4 one-var shapes * 1^len + 12 two-var shapes * 2^len).
        let per_len = |len: u32| 4 + 12 * 2usize.pow(len);
        let expected = v * o * (v - 1) * (per_len(1) + per_len(2));
        assert_eq!(seen.len(), expected);
        assert!(
            sizes.windows(2).all(|w| w[0] <= w[1]),
            "classes out of order"
        );
        let _ = m;
    }

    #[test]
    fn enumerated_grammars_are_in_prior_support() {
        let params: SeqParams = MiniScanParams {
            word_pool: words("dax wif lug zup fep blicket kiki"),
            color_pool: words("RED BLUE GREEN"),
            ..MiniScanParams::default()
        }
        .into();
        let mut e = EnumerationProposer::new(
            words("dax wif lug zup fep blicket kiki"),
            words("RED BLUE GREEN"),
            EnumLimits::from(&params),
        )
        .unwrap();
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            let t = e.next_text().unwrap();
            let g = parse_grammar(&t).unwrap();
            assert!(prior_logprob(&g, &params).is_finite(), "{t}");
            assert!(seen.insert(t));
        }
    }

    #[test]
    fn scan_vocabulary_stream_is_duplicate_free() {
        let params: SeqParams = ScanMetaParams::default().into();
        let lim = EnumLimits::from(&params);
        assert_eq!(lim.concat_forms.len(), 2);
        let mut e = EnumerationProposer::new(
            words("walk look run jump turn left right around opposite and after twice thrice"),
            words("WALK LOOK RUN JUMP LTURN RTURN"),
            lim,
        )
        .unwrap();
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            assert!(seen.insert(e.next_text().unwrap()));
        }
    }
}
