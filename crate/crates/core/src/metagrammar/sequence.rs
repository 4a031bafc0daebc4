use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{MetaError, MiniScanParams, ScanMetaParams, SeqParams};
use crate::grammar::{Grammar, PatternElem, RhsElem, Rule, Var, VarKind};
use crate::rng::Rng;

/// Variables a higher-order rule may use, in draw order.
const VARS: [(VarKind, u32); 4] = [
    (VarKind::Prim, 1),
    (VarKind::Prim, 2),
    (VarKind::Str, 1),
    (VarKind::Str, 2),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcatForm {
    /// `u1 x1 -> [u1] [x1]`
    Standard,
    /// `u1 u2 -> [u2] [u1]`
    Swap,
}

pub fn concat_rule(form: ConcatForm) -> Rule {
    let u1 = Var::new(VarKind::Prim, 1);
    let (second, rhs) = match form {
        ConcatForm::Standard => {
            let x1 = Var::new(VarKind::Str, 1);
            let rhs = vec![
                RhsElem::VarRef(u1.name.clone()),
                RhsElem::VarRef(x1.name.clone()),
            ];
            (x1, rhs)
        }
        ConcatForm::Swap => {
            let u2 = Var::new(VarKind::Prim, 2);
            let rhs = vec![
                RhsElem::VarRef(u2.name.clone()),
                RhsElem::VarRef(u1.name.clone()),
            ];
            (u2, rhs)
        }
    };
    Rule::new(vec![PatternElem::Var(u1), PatternElem::Var(second)], rhs)
}

fn concat_form(rule: &Rule) -> Option<ConcatForm> {
    [ConcatForm::Standard, ConcatForm::Swap]
        .into_iter()
        .find(|&f| concat_rule(f) == *rule)
}

/// Borrowed view of either parameter set.
pub(crate) struct Family<'a> {
    pub n_primitives: (usize, usize),
    pub n_higher: (usize, usize),
    pub words: &'a [String],
    pub outputs: &'a [String],
    pub allow_empty: bool,
    pub alt_concat_prob: f64,
    pub rhs_max_len: usize,
}

fn uniform(rng: &mut Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

fn ln_uniform(n: usize) -> f64 {
    -(n as f64).ln()
}

impl Family<'_> {
    fn prim_range(&self) -> Result<(usize, usize), MetaError> {
        let pool = self.words.len();
        let (plo, phi) = self.n_primitives;
        let hlo = self.n_higher.0;
        if plo + hlo > pool {
            return Err(MetaError::PoolExhausted {
                pool: "word",
                needed: plo + hlo,
                available: pool,
            });
        }
        if phi > 0 && self.outputs.is_empty() && !self.allow_empty {
            return Err(MetaError::PoolExhausted {
                pool: "output",
                needed: 1,
                available: 0,
            });
        }
        Ok((plo, phi.min(pool - hlo).max(plo)))
    }

    pub(crate) fn check_pools(&self) -> Result<(), MetaError> {
        self.prim_range().map(|_| ())
    }

    fn higher_range(&self, n_prim: usize) -> (usize, usize) {
        let (hlo, hhi) = self.n_higher;
        (hlo, hhi.min(self.words.len() - n_prim).max(hlo))
    }

    fn output_choices(&self) -> usize {
        self.outputs.len() + usize::from(self.allow_empty)
    }

    fn rhs_max(&self) -> usize {
        self.rhs_max_len.max(1)
    }

    fn concat_logprob(&self, form: ConcatForm) -> f64 {
        match form {
            ConcatForm::Standard => (1.0 - self.alt_concat_prob).ln(),
            ConcatForm::Swap => self.alt_concat_prob.ln(),
        }
    }

    fn sample_concat(&self, rng: &mut Rng) -> ConcatForm {
        if rng.gen_bool(self.alt_concat_prob) {
            ConcatForm::Swap
        } else {
            ConcatForm::Standard
        }
    }

    fn sample_primitive(&self, word: &str, rng: &mut Rng) -> Rule {
        let k = uniform(rng, self.output_choices());
        let rhs = match self.outputs.get(k) {
            Some(out) => vec![RhsElem::Output(out.clone())],
            None => Vec::new(),
        };
        Rule::new(vec![PatternElem::literal(word)], rhs)
    }

    fn sample_higher(&self, word: &str, rng: &mut Rng) -> Rule {
        let two_vars = uniform(rng, 2) == 1;
        let mut names: Vec<Var> = VARS.iter().map(|&(k, i)| Var::new(k, i)).collect();
        let first = names.remove(uniform(rng, names.len()));
        let mut vars = vec![first.clone()];
        let mut lhs = vec![PatternElem::Var(first), PatternElem::literal(word)];
        if two_vars {
            let second = names.remove(uniform(rng, names.len()));
            vars.push(second.clone());
            lhs.push(PatternElem::Var(second));
        }
        let len = 1 + uniform(rng, self.rhs_max());
        let rhs = (0..len)
            .map(|_| RhsElem::VarRef(vars[uniform(rng, vars.len())].name.clone()))
            .collect();
        Rule::new(lhs, rhs)
    }

    fn output_logprob(&self, rule: &Rule) -> f64 {
        let known = match rule.rhs.as_slice() {
            [] => self.allow_empty,
            [RhsElem::Output(w)] => self.outputs.contains(w),
            _ => false,
        };
        if known {
            ln_uniform(self.output_choices())
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Log-probability of a higher-order rule's structure, word excluded.
    fn higher_logprob(&self, rule: &Rule) -> f64 {
        let is_candidate = |v: &Var| VARS.iter().any(|&(k, i)| Var::new(k, i) == *v);
        let (vars, shape_lp) = match rule.lhs.as_slice() {
            [PatternElem::Var(a), PatternElem::Literal(_)] if is_candidate(a) => {
                (vec![a], ln_uniform(2) + ln_uniform(4))
            }
            [PatternElem::Var(a), PatternElem::Literal(_), PatternElem::Var(b)]
                if is_candidate(a) && is_candidate(b) && a != b =>
            {
                (vec![a, b], ln_uniform(2) + ln_uniform(4) + ln_uniform(3))
            }
            _ => return f64::NEG_INFINITY,
        };
        let len = rule.rhs.len();
        if len == 0 || len > self.rhs_max() {
            return f64::NEG_INFINITY;
        }
        let refs_ok = rule
            .rhs
            .iter()
            .all(|e| matches!(e, RhsElem::VarRef(name) if vars.iter().any(|v| v.name == *name)));
        if !refs_ok {
            return f64::NEG_INFINITY;
        }
        shape_lp + ln_uniform(self.rhs_max()) + len as f64 * ln_uniform(vars.len())
    }
}

fn is_primitive_shape(rule: &Rule) -> bool {
    matches!(rule.lhs.as_slice(), [PatternElem::Literal(_)])
}

/// The single rule word of a primitive or higher-order rule.
fn rule_word(rule: &Rule) -> Option<&str> {
    let mut lits = rule.lhs.iter().filter_map(PatternElem::as_literal);
    match (lits.next(), lits.next()) {
        (Some(w), None) => Some(w),
        _ => None,
    }
}

pub(crate) fn sample_family(f: &Family<'_>, rng: &mut Rng) -> Result<Grammar, MetaError> {
    let (plo, phi) = f.prim_range()?;
    let n_prim = plo + uniform(rng, phi - plo + 1);
    let (hlo, hhi) = f.higher_range(n_prim);
    let n_higher = hlo + uniform(rng, hhi - hlo + 1);
    let mut pool: Vec<&String> = f.words.iter().collect();
    let chosen: Vec<&String> = (0..n_prim + n_higher)
        .map(|_| pool.remove(uniform(rng, pool.len())))
        .collect();
    let mut rules = Vec::with_capacity(n_prim + n_higher + 1);
    for word in &chosen[..n_prim] {
        rules.push(f.sample_primitive(word, rng));
    }
    for word in &chosen[n_prim..] {
        rules.push(f.sample_higher(word, rng));
    }
    rules.push(concat_rule(f.sample_concat(rng)));
    Ok(Grammar::new(rules))
}

pub fn sample_miniscan(p: &MiniScanParams, rng: &mut Rng) -> Result<Grammar, MetaError> {
    SeqParams::MiniScan(p.clone()).sample(rng)
}

pub fn sample_scanlike(p: &ScanMetaParams, rng: &mut Rng) -> Result<Grammar, MetaError> {
    SeqParams::ScanLike(p.clone()).sample(rng)
}

/// Log-probability that the sampler for `p` emits exactly `g`; negative
/// infinity outside its support.
pub fn prior_logprob(g: &Grammar, p: &SeqParams) -> f64 {
    let f = p.family();
    let Some((last, body)) = g.rules.split_last() else {
        return f64::NEG_INFINITY;
    };
    let Some(form) = concat_form(last) else {
        return f64::NEG_INFINITY;
    };
    let n_prim = body.iter().take_while(|r| is_primitive_shape(r)).count();
    let n_higher = body.len() - n_prim;
    let Ok((plo, phi)) = f.prim_range() else {
        return f64::NEG_INFINITY;
    };
    let (hlo, hhi) = f.higher_range(n_prim.min(f.words.len()));
    if !(plo..=phi).contains(&n_prim) || !(hlo..=hhi).contains(&n_higher) {
        return f64::NEG_INFINITY;
    }
    let mut lp = ln_uniform(phi - plo + 1) + ln_uniform(hhi - hlo + 1);
    let mut used: Vec<&str> = Vec::with_capacity(body.len());
    for rule in body {
        match rule_word(rule) {
            Some(w) if !used.contains(&w) && f.words.iter().any(|p| p == w) => {
                lp += ln_uniform(f.words.len() - used.len());
                used.push(w);
            }
            _ => return f64::NEG_INFINITY,
        }
    }
    for rule in &body[..n_prim] {
        lp += f.output_logprob(rule);
    }
    for rule in &body[n_prim..] {
        lp += f.higher_logprob(rule);
    }
    lp + f.concat_logprob(form)
}

/// Log-probability of rule `i` under [`resample_rule`] given every other
/// rule of `g`.
pub fn rule_logprob(g: &Grammar, i: usize, p: &SeqParams) -> f64 {
    let f = p.family();
    let Some(rule) = g.rules.get(i) else {
        return f64::NEG_INFINITY;
    };
    if i + 1 == g.rules.len() {
        return concat_form(rule).map_or(f64::NEG_INFINITY, |form| f.concat_logprob(form));
    }
    let others = g.rules.len() - 2;
    let Some(word) = rule_word(rule) else {
        return f64::NEG_INFINITY;
    };
    let clash = g
        .rules
        .iter()
        .enumerate()
        .any(|(j, r)| j != i && rule_word(r) == Some(word));
    if clash || !f.words.iter().any(|w| w == word) || others >= f.words.len() {
        return f64::NEG_INFINITY;
    }
    let word_lp = ln_uniform(f.words.len() - others);
    if is_primitive_shape(rule) {
        word_lp + f.output_logprob(rule)
    } else {
        word_lp + f.higher_logprob(rule)
    }
}

/// Redraws rule `i` from the prior conditioned on the rest of `g`: a new
/// unused word plus output (primitives) or structure (higher-order rules),
/// or a new concatenation form for the final rule.
pub fn resample_rule(g: &Grammar, i: usize, p: &SeqParams, rng: &mut Rng) -> Grammar {
    let f = p.family();
    let mut out = g.clone();
    if i + 1 == g.rules.len() {
        out.rules[i] = concat_rule(f.sample_concat(rng));
        return out;
    }
    let taken: Vec<&str> = g
        .rules
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .filter_map(|(_, r)| rule_word(r))
        .collect();
    let free: Vec<&String> = f
        .words
        .iter()
        .filter(|w| !taken.contains(&w.as_str()))
        .collect();
    if free.is_empty() {
        return out;
    }
    let word = free[uniform(rng, free.len())];
    out.rules[i] = if is_primitive_shape(&g.rules[i]) {
        f.sample_primitive(word, rng)
    } else {
        f.sample_higher(word, rng)
    };
    out
}

#[cfg(test)]
mod tests {
    use std::collections::{HashMap, HashSet};

    use itertools::Itertools;

    use super::*;
    use crate::fixtures;
    use crate::grammar::parse_grammar;
    use crate::rng::seeded;

    fn strings(ws: &[&str]) -> Vec<String> {
        ws.iter().map(|w| (*w).to_owned()).collect()
    }

    #[test]
    fn seeded_determinism() {
        let p = MiniScanParams::default();
        let a = sample_miniscan(&p, &mut seeded(3)).unwrap();
        let b = sample_miniscan(&p, &mut seeded(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shape_of_samples() {
        let mp = MiniScanParams::default();
        let sp = ScanMetaParams::default();
        let mut rng = seeded(11);
        for _ in 0..500 {
            let g = sample_miniscan(&mp, &mut rng).unwrap();
            let n_prim = g.rules.iter().filter(|r| is_primitive_shape(r)).count();
            assert!((3..=4).contains(&n_prim));
            assert!((2..=4).contains(&(g.rules.len() - 1 - n_prim)));
            assert_eq!(g.rules.last(), Some(&concat_rule(ConcatForm::Standard)));
            assert!(g.validate().is_empty(), "{g}");
            let words: Vec<_> = g.rules.iter().filter_map(rule_word).collect();
            assert!(words.iter().all_unique());

            let g = sample_scanlike(&sp, &mut rng).unwrap();
            let n_prim = g.rules.iter().filter(|r| is_primitive_shape(r)).count();
            assert!((4..=9).contains(&n_prim));
            assert!((3..=7).contains(&(g.rules.len() - 1 - n_prim)));
            assert!(concat_form(g.rules.last().unwrap()).is_some());
            assert!(g.validate().is_empty(), "{g}");
        }
    }

    #[test]
    fn pool_exhausted() {
        let p = MiniScanParams {
            n_primitives: (4, 4),
            n_higher: (0, 0),
            word_pool: strings(&["a", "b", "c"]),
            ..Default::default()
        };
        assert_eq!(
            sample_miniscan(&p, &mut seeded(0)),
            Err(MetaError::PoolExhausted {
                pool: "word",
                needed: 4,
                available: 3
            })
        );
    }

    #[test]
    fn ranges_shrink_to_fit_the_pool() {
        let p = ScanMetaParams {
            word_pool: strings(super::super::SCAN_WORDS),
            ..Default::default()
        };
        let mut rng = seeded(5);
        for _ in 0..200 {
            let g = sample_scanlike(&p, &mut rng).unwrap();
            assert!(g.rules.len() - 1 <= 13);
            assert!(prior_logprob(&g, &p.clone().into()).is_finite());
        }
    }

    #[test]
    fn alt_concat_frequency() {
        let p = ScanMetaParams::default();
        let mut rng = seeded(2024);
        let swaps = (0..10_000)
            .filter(|_| {
                let g = sample_scanlike(&p, &mut rng).unwrap();
                concat_form(g.rules.last().unwrap()) == Some(ConcatForm::Swap)
            })
            .count();
        let frac = swaps as f64 / 10_000.0;
        assert!((0.47..=0.53).contains(&frac), "{frac}");

        let never = ScanMetaParams {
            alt_concat_prob: 0.0,
            ..Default::default()
        };
        for _ in 0..200 {
            let g = sample_scanlike(&never, &mut rng).unwrap();
            assert_eq!(g.rules.last(), Some(&concat_rule(ConcatForm::Standard)));
        }
    }

    #[test]
    fn samples_are_in_support() {
        let p: SeqParams = MiniScanParams::default().into();
        let s: SeqParams = ScanMetaParams::default().into();
        let mut rng = seeded(8);
        for _ in 0..1000 {
            assert!(prior_logprob(&p.sample(&mut rng).unwrap(), &p).is_finite());
            assert!(prior_logprob(&s.sample(&mut rng).unwrap(), &s).is_finite());
        }
    }

    #[test]
    fn out_of_support() {
        let p: SeqParams = MiniScanParams::default().into();
        let too_many = parse_grammar(
            "dax -> RED\nwif -> BLUE\nlug -> GREEN\n\
             x1 zup -> [x1]\nx1 fep -> [x1]\nx1 kiki -> [x1]\nx1 tufa -> [x1]\n\
             x1 mup -> [x1]\nx1 dox -> [x1]\nx1 wug -> [x1]\nu1 x1 -> [u1] [x1]",
        )
        .unwrap();
        assert_eq!(prior_logprob(&too_many, &p), f64::NEG_INFINITY);
        let no_concat =
            parse_grammar("dax -> RED\nwif -> BLUE\nlug -> GREEN\nx1 zup -> [x1]\nx1 fep -> [x1]")
                .unwrap();
        assert_eq!(prior_logprob(&no_concat, &p), f64::NEG_INFINITY);
        let swap = parse_grammar(
            "dax -> RED\nwif -> BLUE\nlug -> GREEN\nx1 zup -> [x1]\nx1 fep -> [x1]\nu1 u2 -> [u2] [u1]",
        )
        .unwrap();
        assert_eq!(prior_logprob(&swap, &p), f64::NEG_INFINITY);
    }

    const LISTING_MINISCAN: &str = "\
tufa -> PINK
zup -> RED
gazzer -> YELLOW
kleek -> PURPLE
u2 mup x2 -> [u2] [x2]
x2 dax -> [x2]
u2 lug x2 -> [u2] [x2]
u1 dox -> [u1] [u1] [u1]
u1 x1 -> [u1] [x1]";

    const LISTING_SCANLIKE: &str = "\
twice -> WALK
jump -> RTURN
turn -> JUMP
walk -> EMPTY_STRING
blicket -> GREEN
kiki -> RUN
right -> RED
run -> BLUE
x2 left -> [x2] [x2] [x2] [x2] [x2]
x1 dax u1 -> [u1] [x1] [u1]
u1 thrice x2 -> [u1] [x2] [x2] [u1] [u1]
x1 look u2 -> [x1] [x1] [u2] [x1]
x2 around -> [x2]
u1 u2 -> [u2] [u1]";

    #[test]
    fn printed_samples_and_scan_are_in_support() {
        let m: SeqParams = MiniScanParams::default().into();
        let s: SeqParams = ScanMetaParams::default().into();
        assert!(prior_logprob(&parse_grammar(LISTING_MINISCAN).unwrap(), &m).is_finite());
        assert!(prior_logprob(&parse_grammar(LISTING_SCANLIKE).unwrap(), &s).is_finite());
        assert!(prior_logprob(&fixtures::scan_grammar(), &s).is_finite());
    }

    /// Every grammar of a tiny family, built by nested loops that do not
    /// share code with the sampler.
    fn enumerate_support(
        words: &[&str],
        outputs: &[&str],
        allow_empty: bool,
        prims: (usize, usize),
        highers: (usize, usize),
        rhs_max: usize,
        forms: &[&str],
    ) -> Vec<String> {
        let vars = ["u1", "u2", "x1", "x2"];
        let mut higher_bodies: Vec<String> = Vec::new();
        for a in vars {
            for len in 1..=rhs_max {
                let rhs = std::iter::repeat_n(format!("[{a}]"), len).join(" ");
                higher_bodies.push(format!("{a} W -> {rhs}"));
            }
            for b in vars.iter().filter(|&&b| b != a) {
                for len in 1..=rhs_max {
                    for refs in std::iter::repeat_n([a, *b], len).multi_cartesian_product() {
                        let rhs = refs.iter().map(|r| format!("[{r}]")).join(" ");
                        higher_bodies.push(format!("{a} W {b} -> {rhs}"));
                    }
                }
            }
        }
        let mut outs: Vec<&str> = outputs.to_vec();
        if allow_empty {
            outs.push("EMPTY_STRING");
        }
        let mut all = Vec::new();
        for p in prims.0..=prims.1 {
            for h in highers.0..=highers.1 {
                if p + h > words.len() {
                    continue;
                }
                for ws in words.iter().permutations(p + h) {
                    let prim_choices =
                        std::iter::repeat_n(outs.clone(), p).multi_cartesian_product();
                    let prim_choices: Vec<Vec<&str>> = if p == 0 {
                        vec![vec![]]
                    } else {
                        prim_choices.collect()
                    };
                    let high_choices: Vec<Vec<&String>> = if h == 0 {
                        vec![vec![]]
                    } else {
                        std::iter::repeat_n(higher_bodies.iter(), h)
                            .multi_cartesian_product()
                            .collect()
                    };
                    for pc in &prim_choices {
                        for hc in &high_choices {
                            for form in forms {
                                let mut lines = Vec::new();
                                for (w, o) in ws[..p].iter().zip(pc) {
                                    lines.push(format!("{w} -> {o}"));
                                }
                                for (w, body) in ws[p..].iter().zip(hc) {
                                    lines.push(body.replacen(" W", &format!(" {w}"), 1));
                                }
                                lines.push((*form).to_owned());
                                all.push(lines.join("\n"));
                            }
                        }
                    }
                }
            }
        }
        all
    }

    #[test]
    fn tiny_support_sums_to_one() {
        let p: SeqParams = MiniScanParams {
            n_primitives: (1, 1),
            n_higher: (0, 0),
            word_pool: strings(&["dax", "wif"]),
            color_pool: strings(&["RED", "BLUE"]),
            rhs_max_len: 8,
            seed: 0,
        }
        .into();
        let support = enumerate_support(
            &["dax", "wif"],
            &["RED", "BLUE"],
            false,
            (1, 1),
            (0, 0),
            8,
            &["u1 x1 -> [u1] [x1]"],
        );
        assert_eq!(support.len(), 4);
        let total: f64 = support
            .iter()
            .map(|t| prior_logprob(&parse_grammar(t).unwrap(), &p).exp())
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    fn small_scanlike() -> (SeqParams, Vec<String>) {
        let p: SeqParams = ScanMetaParams {
            n_primitives: (0, 1),
            n_higher: (0, 1),
            allow_empty_primitive: true,
            alt_concat_prob: 0.3,
            word_pool: strings(&["dax", "wif"]),
            action_pool: strings(&["RED"]),
            rhs_max_len: 2,
            seed: 0,
        }
        .into();
        let support = enumerate_support(
            &["dax", "wif"],
            &["RED"],
            true,
            (0, 1),
            (0, 1),
            2,
            &["u1 x1 -> [u1] [x1]", "u1 u2 -> [u2] [u1]"],
        );
        (p, support)
    }

    #[test]
    fn small_support_sums_to_one_and_matches_frequencies() {
        let (p, support) = small_scanlike();
        assert!(support.iter().all_unique());
        let probs: HashMap<String, f64> = support
            .iter()
            .map(|t| {
                (
                    t.clone(),
                    prior_logprob(&parse_grammar(t).unwrap(), &p).exp(),
                )
            })
            .collect();
        let total: f64 = probs.values().sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");

        let mut rng = seeded(77);
        let n = 200_000;
        let mut counts: HashMap<String, usize> = HashMap::new();
        for _ in 0..n {
            *counts
                .entry(p.sample(&mut rng).unwrap().to_string())
                .or_default() += 1;
        }
        for (text, count) in &counts {
            let expected = probs[text];
            let freq = *count as f64 / n as f64;
            let sd = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!(
                (freq - expected).abs() < 5.0 * sd + 1e-4,
                "{text}: {freq} vs {expected}"
            );
        }
    }

    #[test]
    fn rule_conditionals_normalize() {
        let (p, support) = small_scanlike();
        let grammars: Vec<Grammar> = support.iter().map(|t| parse_grammar(t).unwrap()).collect();
        for g in grammars.iter().filter(|g| g.rules.len() == 3) {
            for i in 0..3 {
                let neighbours: HashSet<String> = grammars
                    .iter()
                    .filter(|h| {
                        h.rules.len() == 3
                            && (0..3).all(|j| j == i || h.rules[j] == g.rules[j])
                            && (i == 2
                                || is_primitive_shape(&h.rules[i])
                                    == is_primitive_shape(&g.rules[i]))
                    })
                    .map(Grammar::to_string)
                    .collect();
                let total: f64 = neighbours
                    .iter()
                    .map(|t| rule_logprob(&parse_grammar(t).unwrap(), i, &p).exp())
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "{g} rule {i}: {total}");
            }
        }
    }

    #[test]
    fn resampling_stays_in_support() {
        let p: SeqParams = ScanMetaParams::default().into();
        let mut rng = seeded(4);
        let mut g = p.sample(&mut rng).unwrap();
        for _ in 0..2000 {
            let i = uniform(&mut rng, g.rules.len());
            g = resample_rule(&g, i, &p, &mut rng);
            assert!(prior_logprob(&g, &p).is_finite(), "{g}");
        }
    }
}
