//! Randomised sweeps checked against the oracles. Each returns a one-line
//! summary on success and the first counterexample on failure.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rulesynth::episodes::{
    make_episode, make_number_episode, sample_inputs, Domain, Example, LenBounds,
    NumberEpisodeParams,
};
use rulesynth::grammar::{match_lhs, EvalError, EvalLimits, Grammar, PatternElem, Step, VarKind};
use rulesynth::metagrammar::{
    resample_rule, sample_miniscan, sample_number, sample_scanlike, MiniScanParams,
    NumberMetaParams, ScanMetaParams, SeqParams,
};
use rulesynth::numeric::parse_num_grammar;
use rulesynth::rng::{seeded, Rng};
use rulesynth::synthesis::{
    check_consistency, check_fast, search, McmcProposer, PriorProposer, Proposer, SearchConfig,
    SearchReport,
};
use rulesynth::{parse_grammar, print_grammar};

use super::{naive_bindings, naive_eval, naive_eval_number, naive_satisfied, NaiveError, BUDGET};

pub type SweepResult = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

/// Fraction of random bounded-length inputs allowed to exhaust the
/// application budget. Nested higher-order rules multiply work, so a few
/// long inputs legitimately run out.
pub const MAX_BUDGET_HIT_RATE: f64 = 0.001;

fn seq_grammar(i: usize, rng: &mut Rng) -> Grammar {
    if i.is_multiple_of(2) {
        sample_miniscan(&MiniScanParams::default(), rng).expect("default pools suffice")
    } else {
        sample_scanlike(&ScanMetaParams::default(), rng).expect("default pools suffice")
    }
}

fn random_input(vocab: &[String], max_len: usize, rng: &mut Rng) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| vocab.choose(rng).expect("nonempty vocabulary").clone())
        .collect()
}

/// An input built from a rule's own pattern, so the rule is sure to match.
fn instantiate(lhs: &[PatternElem], vocab: &[String], rng: &mut Rng) -> Vec<String> {
    let mut out = Vec::new();
    for e in lhs {
        let n = match e {
            PatternElem::Literal(w) => {
                out.push(w.clone());
                continue;
            }
            PatternElem::Var(v) => match v.kind {
                VarKind::Prim => 1,
                VarKind::Str => rng.gen_range(1..=3),
                VarKind::Opt => rng.gen_range(0..=2),
            },
        };
        out.extend((0..n).map(|_| vocab.choose(rng).expect("nonempty vocabulary").clone()));
    }
    out
}

fn vocabulary(g: &Grammar) -> Vec<String> {
    g.input_words().into_iter().map(str::to_owned).collect()
}

/// Sampled grammars of every family survive print then parse unchanged.
pub fn round_trip(per_family: usize, seed: u64) -> SweepResult {
    let mut rng = seeded(seed);
    for i in 0..per_family {
        for g in [
            sample_miniscan(&MiniScanParams::default(), &mut rng).expect("sample"),
            sample_scanlike(&ScanMetaParams::default(), &mut rng).expect("sample"),
        ] {
            let text = print_grammar(&g);
            let back = parse_grammar(&text).map_err(|e| format!("sample {i}: {e}\n{text}"))?;
            ensure!(back == g, "sample {i}: structure changed\n{text}");
            ensure!(
                print_grammar(&back) == text,
                "sample {i}: text changed\n{text}"
            );
        }
        let g = sample_number(&NumberMetaParams::default(), &mut rng).expect("sample");
        let text = g.to_string();
        let back =
            parse_num_grammar(&text).map_err(|e| format!("number sample {i}: {e}\n{text}"))?;
        ensure!(back == g, "number sample {i}: structure changed\n{text}");
        ensure!(
            back.to_string() == text,
            "number sample {i}: text changed\n{text}"
        );
    }
    Ok(format!(
        "{} grammars per family (miniscan, scanlike, number)",
        per_family
    ))
}

fn same_outcome(
    lib: &Result<Vec<String>, EvalError>,
    naive: &Result<Vec<String>, NaiveError>,
) -> bool {
    match (lib, naive) {
        (Ok(a), Ok(b)) => a == b,
        (Err(EvalError::NoMatch { .. }), Err(NaiveError::NoMatch)) => true,
        (Err(EvalError::BudgetExceeded { .. }), Err(NaiveError::Limit)) => true,
        _ => false,
    }
}

/// Determinism, oracle agreement, subsequence progress and bounded work
/// over `n` meta-grammar samples, with random inputs of up to 9 words
/// plus inputs from the episode generator.
pub fn evaluation(n: usize, seed: u64) -> SweepResult {
    let mut rng = seeded(seed);
    let (mut evals, mut budget_hits, mut ok) = (0usize, 0usize, 0usize);
    for i in 0..n {
        let g = seq_grammar(i, &mut rng);
        let vocab = vocabulary(&g);
        let mut inputs: Vec<Vec<String>> =
            (0..5).map(|_| random_input(&vocab, 9, &mut rng)).collect();
        if let Ok(gen) = sample_inputs(&g, 3, LenBounds::default(), &mut rng) {
            inputs.extend(gen);
        }
        for input in &inputs {
            evals += 1;
            let mut steps: Vec<Step> = Vec::new();
            let mut record = |s: &Step| steps.push(s.clone());
            let first = g.evaluate_with(input, EvalLimits::default(), Some(&mut record));
            let second = g.evaluate(input, BUDGET);
            ensure!(first == second, "sample {i}: nondeterministic on {input:?}");
            let naive = naive_eval(&g, input, BUDGET);
            ensure!(
                same_outcome(&first, &naive),
                "sample {i}: {first:?} but oracle gives {naive:?} on {input:?}\n{g}"
            );
            ensure!(
                steps.len() <= BUDGET,
                "sample {i}: {} applications",
                steps.len()
            );
            for s in &steps {
                if !g.rules[s.rule].is_degenerate() {
                    ensure!(
                        s.bound_lens.iter().all(|&l| l < s.input_len),
                        "sample {i}: rule {} bound {:?} of {} words",
                        s.rule,
                        s.bound_lens,
                        s.input_len
                    );
                }
                ensure!(
                    s.depth < input.len(),
                    "sample {i}: depth {} on {} words",
                    s.depth,
                    input.len()
                );
            }
            match first {
                Ok(_) => ok += 1,
                Err(EvalError::BudgetExceeded { .. }) => budget_hits += 1,
                Err(_) => {}
            }
        }
    }
    let rate = budget_hits as f64 / evals as f64;
    ensure!(
        rate <= MAX_BUDGET_HIT_RATE,
        "budget exhausted on {budget_hits}/{evals} inputs (cap {MAX_BUDGET_HIT_RATE})"
    );
    Ok(format!(
        "{n} grammars, {evals} evaluations: {ok} ok, {budget_hits} budget-limited (rate {rate:.5} <= {MAX_BUDGET_HIT_RATE})"
    ))
}

/// Every match reported by the library equals the brute-force match and
/// reproduces its input.
pub fn match_soundness(n: usize, seed: u64) -> SweepResult {
    let mut rng = seeded(seed);
    let (mut matched, mut checked) = (0usize, 0usize);
    for i in 0..n {
        let g = seq_grammar(i, &mut rng);
        let vocab = vocabulary(&g);
        for rule in &g.rules {
            for input in [
                instantiate(&rule.lhs, &vocab, &mut rng),
                random_input(&vocab, 7, &mut rng),
            ] {
                if input.is_empty() {
                    continue;
                }
                checked += 1;
                let lib = match_lhs(&rule.lhs, &input);
                let naive = naive_bindings(&rule.lhs, &input);
                let Some(b) = lib else {
                    ensure!(
                        naive.is_none(),
                        "sample {i}: missed match of {rule} on {input:?}"
                    );
                    continue;
                };
                matched += 1;
                ensure!(
                    b.substitute(&rule.lhs) == input,
                    "sample {i}: {rule} substitution on {input:?}"
                );
                for v in rule.vars() {
                    let len = b.get(&v.name).map(<[String]>::len);
                    let fits = match v.kind {
                        VarKind::Prim => len == Some(1),
                        VarKind::Str => len.is_some_and(|l| l >= 1),
                        VarKind::Opt => len.is_some(),
                    };
                    ensure!(fits, "sample {i}: {} bound {len:?} words", v.name);
                }
                let got: Vec<(String, Vec<String>)> =
                    b.iter().map(|(n, s)| (n.to_owned(), s.to_vec())).collect();
                ensure!(
                    Some(&got) == naive.as_ref(),
                    "sample {i}: {rule} on {input:?} bound {got:?}, oracle {naive:?}"
                );
            }
        }
    }
    Ok(format!("{checked} pattern/input pairs, {matched} matches"))
}

/// `check_fast` verdicts against the naive checker on `n` cases mixing
/// the target, one-rule mutations, unrelated grammars and corrupted
/// supports.
pub fn check_fast_agreement(n: usize, seed: u64) -> SweepResult {
    let mut rng = seeded(seed);
    let ms = MiniScanParams::default();
    let params = SeqParams::from(ms.clone());
    let mut consistent = 0;
    for i in 0..n {
        let target = sample_miniscan(&ms, &mut rng).expect("sample");
        let ep = make_episode(
            &target,
            Domain::MiniScan,
            15,
            1,
            LenBounds::default(),
            &mut rng,
        )
        .map_err(|e| format!("case {i}: {e}"))?;
        let mut support = ep.support;
        let candidate = match i % 4 {
            0 => target,
            1 => {
                let r = rng.gen_range(0..target.rules.len());
                resample_rule(&target, r, &params, &mut rng)
            }
            2 => sample_miniscan(&ms, &mut rng).expect("sample"),
            _ => {
                let j = rng.gen_range(0..support.len());
                support[j].output.push("EXTRA".to_owned());
                target
            }
        };
        let k = rng.gen_range(1..=6);
        let v = check_fast(&candidate, &support, k, &mut rng, BUDGET);
        let exact = naive_satisfied(&candidate, &support);
        let all = exact == support.len();
        consistent += usize::from(all);
        ensure!(
            v.fully_consistent == all,
            "case {i}: verdict {} vs oracle {exact}/{}",
            v.fully_consistent,
            support.len()
        );
        ensure!(
            v.n_satisfied_lower_bound <= exact,
            "case {i}: bound {} above {exact}",
            v.n_satisfied_lower_bound
        );
        if v.evaluations == support.len() {
            ensure!(
                v.n_satisfied_lower_bound == exact,
                "case {i}: full check {} vs {exact}",
                v.n_satisfied_lower_bound
            );
        } else {
            ensure!(
                v.evaluations == k && v.n_satisfied_lower_bound == 0,
                "case {i}: early exit {v:?}"
            );
        }
        let full = check_consistency(&candidate, &support, BUDGET).map_err(|e| e.to_string())?;
        ensure!(
            full.n_satisfied == exact,
            "case {i}: check_consistency {} vs {exact}",
            full.n_satisfied
        );
    }
    ensure!(
        consistent > 0 && consistent < n,
        "only one verdict exercised ({consistent}/{n})"
    );
    Ok(format!("{n} cases, {consistent} consistent"))
}

/// Every generated pair agrees with its target under the naive oracle and
/// no input repeats within an episode.
pub fn episode_soundness(n: usize, seed: u64) -> SweepResult {
    let mut rng = seeded(seed);
    for i in 0..n {
        let g = seq_grammar(i, &mut rng);
        let domain = if i % 2 == 0 {
            Domain::MiniScan
        } else {
            Domain::ScanLike
        };
        let ep = make_episode(&g, domain, 20, 10, LenBounds::default(), &mut rng)
            .map_err(|e| format!("episode {i}: {e}"))?;
        let distinct: HashSet<&Vec<String>> = ep
            .support
            .iter()
            .chain(&ep.query)
            .map(|e| &e.input)
            .collect();
        ensure!(distinct.len() == 30, "episode {i}: repeated inputs");
        for e in ep.support.iter().chain(&ep.query) {
            ensure!(
                naive_eval(&g, &e.input, BUDGET).as_ref() == Ok(&e.output),
                "episode {i}: {:?} -> {:?} disagrees with\n{g}",
                e.input,
                e.output
            );
        }
    }
    let number_count = n / 4;
    for i in 0..number_count {
        let g = sample_number(&NumberMetaParams::default(), &mut rng).expect("sample");
        let ep = make_number_episode(&g, &NumberEpisodeParams::test(), &mut rng)
            .map_err(|e| format!("number episode {i}: {e}"))?;
        for e in ep.support.iter().chain(&ep.query) {
            ensure!(
                naive_eval_number(&g, &e.input, BUDGET) == Ok(e.output),
                "number episode {i}: {:?} -> {} disagrees with\n{g}",
                e.input,
                e.output
            );
        }
    }
    Ok(format!("{n} sequence and {number_count} number episodes"))
}

fn miniscan_episode(seed: u64) -> (SeqParams, Vec<Example>) {
    episode_with(MiniScanParams::default(), seed)
}

/// Two primitives and one higher-order rule: small enough that prior
/// search often succeeds.
fn tiny_params() -> MiniScanParams {
    MiniScanParams {
        n_primitives: (2, 2),
        n_higher: (1, 1),
        rhs_max_len: 2,
        ..MiniScanParams::default()
    }
}

fn episode_with(ms: MiniScanParams, seed: u64) -> (SeqParams, Vec<Example>) {
    let mut rng = seeded(seed);
    let g = sample_miniscan(&ms, &mut rng).expect("sample");
    let ep =
        make_episode(&g, Domain::MiniScan, 12, 1, LenBounds::default(), &mut rng).expect("episode");
    (SeqParams::from(ms), ep.support)
}

/// With the prefilter off, the reported best is the earliest proposal with
/// the highest exact count and the trajectory rises strictly to it.
pub fn monotonicity(runs: usize, seed: u64) -> SweepResult {
    let mut found = 0;
    for r in 0..runs {
        let run_seed = seed.wrapping_add(r as u64);
        let (params, support) = if r.is_multiple_of(2) {
            miniscan_episode(run_seed)
        } else {
            episode_with(tiny_params(), run_seed)
        };
        let budget = 2_000;
        let mut config = SearchConfig::with_proposals(budget, run_seed);
        config.prefilter = None;
        let mut proposer =
            PriorProposer::from_support(&params, &support, run_seed).map_err(|e| e.to_string())?;
        let report: SearchReport<Grammar> =
            search(&support, &mut proposer, &config).map_err(|e| e.to_string())?;

        let mut replay =
            PriorProposer::from_support(&params, &support, run_seed).map_err(|e| e.to_string())?;
        let mut best: Option<(usize, Grammar)> = None;
        for _ in 0..report.proposals_seen {
            let Some(g) = replay.next_text().and_then(|t| parse_grammar(&t).ok()) else {
                continue;
            };
            let n = naive_satisfied(&g, &support);
            if best.as_ref().is_none_or(|(b, _)| n > *b) {
                best = Some((n, g));
            }
        }
        let got = report
            .best
            .as_ref()
            .map(|c| (c.n_satisfied, c.grammar.clone()));
        ensure!(
            got == best,
            "run {r}: best {:?} vs replay {:?}",
            got.map(|g| g.0),
            best.map(|b| b.0)
        );
        ensure!(
            report.trajectory.windows(2).all(|w| w[0] < w[1]),
            "run {r}: trajectory {:?}",
            report.trajectory
        );
        ensure!(
            report.trajectory.last().copied() == report.best.as_ref().map(|c| c.n_satisfied),
            "run {r}: trajectory ends away from the best"
        );

        config.prefilter = Some(4);
        let mut proposer =
            PriorProposer::from_support(&params, &support, run_seed).map_err(|e| e.to_string())?;
        let fast: SearchReport<Grammar> =
            search(&support, &mut proposer, &config).map_err(|e| e.to_string())?;
        ensure!(
            fast.trajectory.windows(2).all(|w| w[0] < w[1]),
            "run {r}: prefiltered trajectory"
        );
        ensure!(
            fast.found() == report.found(),
            "run {r}: prefilter changed the outcome"
        );
        if report.found() {
            found += 1;
            ensure!(
                fast.proposals_seen == report.proposals_seen,
                "run {r}: different stopping point"
            );
        }
    }
    Ok(format!("{runs} searches, {found} reached consistency"))
}

fn zero_elapsed(mut r: SearchReport<Grammar>) -> SearchReport<Grammar> {
    r.elapsed_secs = 0.0;
    r
}

/// Same seed, same samples, episodes and search reports, independent of
/// batch width.
pub fn reproducibility(seed: u64) -> SweepResult {
    let draw = |s: u64| {
        let mut rng = seeded(s);
        let seqs: Vec<Grammar> = (0..20).map(|i| seq_grammar(i, &mut rng)).collect();
        let nums: Vec<String> = (0..20)
            .map(|_| {
                sample_number(&NumberMetaParams::default(), &mut rng)
                    .expect("sample")
                    .to_string()
            })
            .collect();
        let ep = make_episode(
            &seqs[0],
            Domain::MiniScan,
            10,
            5,
            LenBounds::default(),
            &mut rng,
        )
        .expect("episode");
        (seqs, nums, ep)
    };
    ensure!(
        draw(seed) == draw(seed),
        "sampling with seed {seed} is not reproducible"
    );
    ensure!(
        draw(seed).0 != draw(seed + 1).0,
        "seeds {seed} and {} agree",
        seed + 1
    );

    let (params, support) = miniscan_episode(seed);
    let run = |width: usize, mcmc: bool| -> Result<SearchReport<Grammar>, String> {
        let mut config = SearchConfig::with_proposals(300, seed);
        config.batch_width = width;
        let mut proposer: Box<dyn Proposer> = if mcmc {
            Box::new(
                McmcProposer::new(&params, &support, 1.0, BUDGET, seed)
                    .map_err(|e| e.to_string())?,
            )
        } else {
            Box::new(
                PriorProposer::from_support(&params, &support, seed).map_err(|e| e.to_string())?,
            )
        };
        search(&support, &mut proposer, &config)
            .map(zero_elapsed)
            .map_err(|e| e.to_string())
    };
    for mcmc in [false, true] {
        let a = run(64, mcmc)?;
        ensure!(
            a == run(64, mcmc)?,
            "search (mcmc={mcmc}) differs between runs"
        );
        ensure!(
            a == run(1, mcmc)?,
            "search (mcmc={mcmc}) depends on batch width"
        );
    }
    Ok("samples, episodes and prior/MCMC searches repeat exactly".to_owned())
}
