use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use log::{debug, info};
use serde_json::{json, Value};

use rulesynth::episodes::{
    build_scan_dataset, load_scan_file, make_episode, make_number_episode, make_split,
    necessary_examples, normalize_actions, select_support, write_scan_text, Domain, Episode,
    Example, IntegerDistribution, LenBounds, NumberEpisodeParams, SplitSpec, SupportHeuristics,
};
use rulesynth::fixtures;
use rulesynth::grammar::{words, EvalLimits, Step};
use rulesynth::metagrammar::{
    sample_number, MiniScanParams, NumberMetaParams, ScanMetaParams, SeqParams,
};
use rulesynth::numeric::{Inverter, Lexicon, MAX_NUMBER};
use rulesynth::program::{OutputValue, Program};
use rulesynth::rng::seeded;
use rulesynth::synthesis::{
    query_accuracy, ransac_search, search, EnumLimits, EnumerationProposer, McmcProposer,
    NumberPriorProposer, PriorProposer, Proposer, RansacConfig, SearchConfig, SearchReport,
};
use rulesynth::{parse_grammar, parse_num_grammar, Grammar, NumGrammar};

use crate::external::{file_proposer, ChildProposer};
use crate::{
    request_error, ApplyArgs, BudgetArgs, Command, DomainArg, EpisodeArgs, FixtureName,
    NumbersArgs, NumbersMode, ProposerArgs, ProposerKind, SampleArgs, ScanAction, SynthArgs,
};

pub fn run(command: &Command) -> anyhow::Result<Value> {
    match command {
        Command::Apply(a) => apply(a),
        Command::Fixture { name } => {
            let text = match name {
                FixtureName::Scan => fixtures::SCAN,
                FixtureName::ScanFigureOrder => fixtures::SCAN_FIGURE_ORDER,
                FixtureName::NumbersA => fixtures::NUMBERS_A,
                FixtureName::NumbersB => fixtures::NUMBERS_B,
            };
            print!("{text}");
            Ok(json!({ "rules": text.lines().filter(|l| l.contains("->")).count() }))
        }
        Command::Sample(a) => sample(a),
        Command::Episode(a) => episode(a),
        Command::Scan { action } => scan(action),
        Command::Synth(a) => synth(a),
        Command::Numbers(a) => numbers(a),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn input_words(args: &[String]) -> Vec<String> {
    args.iter().flat_map(|a| words(a)).collect()
}

/// Reports the last rule applications before an evaluation error.
fn describe_failure(rules: &[String], trace: &[Step]) {
    match trace.last() {
        Some(step) => eprintln!(
            "failed after {} rule applications; last applied rule {} at depth {}: {}",
            trace.len(),
            step.rule + 1,
            step.depth,
            rules.get(step.rule).map_or("?", String::as_str)
        ),
        None => eprintln!("failed before any rule applied"),
    }
}

fn apply(a: &ApplyArgs) -> anyhow::Result<Value> {
    let text = read(&a.grammar)?;
    let input = input_words(&a.input);
    let limits = EvalLimits::with_budget(a.eval_budget);
    // Arithmetic right hand sides also read as sequences of odd output
    // words, so a grammar that parses as a number grammar is one.
    let sequence = if a.numeric || a.lexicon.is_some() || parse_num_grammar(&text).is_ok() {
        None
    } else {
        Some(parse_grammar(&text).with_context(|| format!("in {}", a.grammar.display()))?)
    };
    let mut trace = Vec::new();
    let mut observe = |s: &Step| trace.push(s.clone());
    if let Some(g) = sequence {
        let rules: Vec<String> = g.rules.iter().map(ToString::to_string).collect();
        let result = g.evaluate_with(&input, limits, Some(&mut observe));
        let out = result.inspect_err(|_| describe_failure(&rules, &trace))?;
        println!("{}", out.to_field());
        return Ok(json!({ "kind": "sequence", "output": out }));
    }
    let mut g = parse_num_grammar(&text).with_context(|| format!("in {}", a.grammar.display()))?;
    let input = match &a.lexicon {
        Some(path) => {
            let lex = Lexicon::parse(&read(path)?)?;
            g = lex.tokenize_grammar(&g);
            lex.to_tokens(&input)?
        }
        None => input,
    };
    let rules: Vec<String> = g.rules.iter().map(ToString::to_string).collect();
    let result = g.evaluate_with(&input, limits, Some(&mut observe));
    let value = result.inspect_err(|_| describe_failure(&rules, &trace))?;
    println!("{value}");
    Ok(json!({ "kind": "number", "output": value }))
}

fn seq_params(domain: DomainArg, params: Option<&Path>, seed: u64) -> anyhow::Result<SeqParams> {
    let text = params.map(read).transpose()?;
    let p: SeqParams = match domain {
        DomainArg::Miniscan => {
            let mut p = match &text {
                Some(t) => MiniScanParams::from_config(t)?,
                None => MiniScanParams::default(),
            };
            p.seed = seed;
            p.into()
        }
        DomainArg::Scanlike | DomainArg::Scan => {
            let mut p = match &text {
                Some(t) => ScanMetaParams::from_config(t)?,
                None => ScanMetaParams::default(),
            };
            p.seed = seed;
            p.into()
        }
        DomainArg::Number => bail!("the number domain has no sequence meta-grammar"),
    };
    Ok(p)
}

fn number_params(params: Option<&Path>, seed: u64) -> anyhow::Result<NumberMetaParams> {
    let mut p = match params {
        Some(path) => NumberMetaParams::from_config(&read(path)?)?,
        None => NumberMetaParams::default(),
    };
    p.seed = seed;
    Ok(p)
}

fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sample(a: &SampleArgs) -> anyhow::Result<Value> {
    let mut rng = seeded(a.seed);
    let mut texts = Vec::with_capacity(a.count);
    if a.domain == DomainArg::Number {
        let p = number_params(a.params.as_deref(), a.seed)?;
        for _ in 0..a.count {
            texts.push(sample_number(&p, &mut rng)?.to_string());
        }
    } else {
        let p = seq_params(a.domain, a.params.as_deref(), a.seed)?;
        for _ in 0..a.count {
            texts.push(p.sample(&mut rng)?.to_string());
        }
    }
    let joined: Vec<String> = texts
        .iter()
        .map(|t| format!("{}\n", t.trim_end()))
        .collect();
    emit(a.out.as_deref(), &joined.join("\n"))?;
    Ok(json!({ "count": texts.len() }))
}

fn episode_summary<P: Program>(ep: &Episode<P>) -> Value {
    json!({
        "domain": ep.domain.to_string(),
        "support": ep.support.len(),
        "query": ep.query.len(),
    })
}

fn episode(a: &EpisodeArgs) -> anyhow::Result<Value> {
    if a.n_query == 0 {
        return Err(request_error("--n-query must be at least 1"));
    }
    let mut rng = seeded(a.seed);
    if a.domain == DomainArg::Number {
        let p = number_params(a.params.as_deref(), a.seed)?;
        let g = sample_number(&p, &mut rng)?;
        let base = if a.test_distribution {
            NumberEpisodeParams::test()
        } else {
            NumberEpisodeParams::train()
        };
        let ep_params = NumberEpisodeParams {
            n_compositional: (a.n_support, a.n_support),
            n_query: (a.n_query, a.n_query),
            ..base
        };
        let ep = make_number_episode(&g, &ep_params, &mut rng)?;
        emit(a.out.as_deref(), &ep.to_text())?;
        let mut summary = episode_summary(&ep);
        summary["necessary"] = json!(necessary_examples(&g).len());
        return Ok(summary);
    }
    let (g, domain) = match a.domain {
        DomainArg::Scan => (fixtures::scan_grammar(), Domain::Scan),
        DomainArg::Miniscan => (
            seq_params(a.domain, a.params.as_deref(), a.seed)?.sample(&mut rng)?,
            Domain::MiniScan,
        ),
        _ => (
            seq_params(a.domain, a.params.as_deref(), a.seed)?.sample(&mut rng)?,
            Domain::ScanLike,
        ),
    };
    let bounds = LenBounds::new(1, a.max_len);
    let ep = make_episode(&g, domain, a.n_support, a.n_query, bounds, &mut rng)?;
    emit(a.out.as_deref(), &ep.to_text())?;
    Ok(episode_summary(&ep))
}

fn scan_data(data: Option<&Path>) -> anyhow::Result<Vec<Example>> {
    match data {
        Some(path) => {
            let mut d = load_scan_file(path)?;
            normalize_actions(&mut d);
            Ok(d)
        }
        None => Ok(build_scan_dataset(&fixtures::scan_grammar())),
    }
}

fn scan(action: &ScanAction) -> anyhow::Result<Value> {
    match action {
        ScanAction::Build { out } => {
            let data = build_scan_dataset(&fixtures::scan_grammar());
            emit(out.as_deref(), &write_scan_text(&data))?;
            Ok(json!({ "examples": data.len() }))
        }
        ScanAction::Load { file, out } => {
            let data = scan_data(Some(file))?;
            if let Some(out) = out {
                write(out, &write_scan_text(&data))?;
            }
            let canonical = fixtures::scan_grammar();
            let agree = data
                .iter()
                .filter(|e| {
                    canonical
                        .evaluate(&e.input, rulesynth::grammar::DEFAULT_EVAL_BUDGET)
                        .as_ref()
                        == Ok(&e.output)
                })
                .count();
            println!("examples={} canonical_agreement={agree}", data.len());
            Ok(json!({ "examples": data.len(), "canonical_agreement": agree }))
        }
        ScanAction::Split {
            name,
            data,
            seed,
            out,
        } => {
            let spec = SplitSpec::from_name(name, *seed)?;
            let data = scan_data(data.as_deref())?;
            let (train, test) = make_split(&data, &spec);
            write(&out.join("train.txt"), &write_scan_text(&train))?;
            write(&out.join("test.txt"), &write_scan_text(&test))?;
            println!(
                "split={} train={} test={}",
                spec.name(),
                train.len(),
                test.len()
            );
            Ok(json!({ "split": spec.name(), "train": train.len(), "test": test.len() }))
        }
    }
}

fn search_config(b: &BudgetArgs, default_seconds: f64) -> SearchConfig {
    let budget_seconds = match b.budget_proposals {
        Some(_) => None,
        None => Some(b.budget_seconds.unwrap_or(default_seconds)),
    };
    SearchConfig {
        budget_seconds,
        budget_proposals: b.budget_proposals,
        eval_budget: b.eval_budget,
        prefilter: (b.prefilter > 0).then_some(b.prefilter),
        seed: b.seed,
        batch_width: b.batch_width,
        ransac: RansacConfig::default(),
    }
}

fn external_proposer<O: OutputProgram>(
    p: &ProposerArgs,
    domain: Domain,
    support: &[Example<O>],
) -> anyhow::Result<Box<dyn Proposer>> {
    match (&p.external_cmd, &p.external_file) {
        (Some(cmd), _) => {
            let ep = Episode::<ProgramFor<O>> {
                domain,
                support: support.to_vec(),
                query: Vec::new(),
                target: None,
            };
            Ok(Box::new(ChildProposer::spawn(cmd, ep.to_text())?))
        }
        (None, Some(path)) => file_proposer(path),
        (None, None) => Err(request_error(
            "the external proposer needs --external-cmd or --external-file",
        )),
    }
}

/// Picks the program type matching an output type, so episode text can be
/// written for either domain.
type ProgramFor<O> = <O as OutputProgram>::P;

pub trait OutputProgram: OutputValue {
    type P: Program<Output = Self>;
}

impl OutputProgram for Vec<String> {
    type P = Grammar;
}

impl OutputProgram for u64 {
    type P = NumGrammar;
}

fn sequence_proposer(
    p: &ProposerArgs,
    params: &SeqParams,
    domain: Domain,
    support: &[Example],
    seed: u64,
    eval_budget: usize,
) -> anyhow::Result<Box<dyn Proposer>> {
    Ok(match p.proposer {
        ProposerKind::Prior => Box::new(PriorProposer::from_support(params, support, seed)?),
        ProposerKind::Enum => Box::new(EnumerationProposer::from_support(
            support,
            EnumLimits::from(params),
        )?),
        ProposerKind::Mcmc => Box::new(McmcProposer::new(
            params,
            support,
            p.beta,
            eval_budget,
            seed,
        )?),
        ProposerKind::External => external_proposer(p, domain, support)?,
    })
}

fn report_json<P: Program>(
    report: &SearchReport<P>,
    accuracy: Option<f64>,
) -> anyhow::Result<Value> {
    let mut v = serde_json::to_value(report)?;
    v["query_accuracy"] = json!(accuracy);
    Ok(v)
}

fn finish_search<P: Program>(
    report: &SearchReport<P>,
    query: &[Example<P::Output>],
    eval_budget: usize,
    out: Option<&Path>,
) -> anyhow::Result<Value> {
    let accuracy = match (&report.best, query.is_empty()) {
        (Some(best), false) => Some(query_accuracy(&best.grammar, query, eval_budget)?),
        _ => None,
    };
    println!(
        "accuracy={} found={} proposals={} parse_failures={} evaluations={} rounds={} elapsed={:.2}s",
        accuracy.map_or("n/a".to_owned(), |a| format!("{a:.4}")),
        report.found(),
        report.proposals_seen,
        report.parse_failures,
        report.evaluations,
        report.rounds,
        report.elapsed_secs
    );
    let record = report_json(report, accuracy)?;
    if let Some(dir) = out {
        if let Some(best) = &report.best {
            write(
                &dir.join("best.grammar"),
                &format!("{}\n", best.grammar.to_string().trim_end()),
            )?;
        }
        write(
            &dir.join("report.json"),
            &serde_json::to_string_pretty(&record)?,
        )?;
    }
    Ok(record)
}

fn synth(a: &SynthArgs) -> anyhow::Result<Value> {
    let mut config = search_config(&a.budget, 30.0);
    config.ransac = RansacConfig {
        subset_size: a.subset_size,
        per_subset_seconds: a.subset_proposals.is_none().then_some(a.subset_seconds),
        per_subset_proposals: a.subset_proposals,
    };
    if let Some(split) = &a.scan_split {
        return synth_scan(a, split, &config);
    }
    let path = a
        .episode
        .as_deref()
        .expect("clap requires --episode or --scan-split");
    let text = read(path)?;
    let is_number = text
        .lines()
        .next()
        .is_some_and(|l| l.trim() == format!("# domain={}", Domain::Number));
    if is_number {
        let ep = Episode::<NumGrammar>::from_text(&text)?;
        let mut proposer: Box<dyn Proposer> = match a.proposer.proposer {
            ProposerKind::Prior => {
                let p = number_params(a.proposer.params.as_deref(), a.budget.seed)?;
                Box::new(NumberPriorProposer::new(&p, a.budget.seed)?)
            }
            ProposerKind::External => external_proposer(&a.proposer, ep.domain, &ep.support)?,
            other => {
                return Err(request_error(format!(
                    "{other:?} proposer is not available for number episodes"
                )))
            }
        };
        let report: SearchReport<NumGrammar> = search(&ep.support, &mut proposer, &config)?;
        return finish_search(&report, &ep.query, config.eval_budget, a.out.as_deref());
    }
    let ep = Episode::<Grammar>::from_text(&text)?;
    let domain_arg = match ep.domain {
        Domain::MiniScan => DomainArg::Miniscan,
        _ => DomainArg::Scanlike,
    };
    let params = seq_params(domain_arg, a.proposer.params.as_deref(), a.budget.seed)?;
    let mut proposer = sequence_proposer(
        &a.proposer,
        &params,
        ep.domain,
        &ep.support,
        a.budget.seed,
        config.eval_budget,
    )?;
    let report: SearchReport<Grammar> = search(&ep.support, &mut proposer, &config)?;
    finish_search(&report, &ep.query, config.eval_budget, a.out.as_deref())
}

fn synth_scan(a: &SynthArgs, split: &str, config: &SearchConfig) -> anyhow::Result<Value> {
    let spec = SplitSpec::from_name(split, a.budget.seed)?;
    let data = scan_data(a.data.as_deref())?;
    let (train, test) = make_split(&data, &spec);
    let heuristics = if a.no_heuristics {
        SupportHeuristics::disabled()
    } else {
        SupportHeuristics::from_training_distribution()
    };
    let params = seq_params(DomainArg::Scan, a.proposer.params.as_deref(), a.budget.seed)?;
    info!(
        "split {} train={} test={}",
        spec.name(),
        train.len(),
        test.len()
    );
    let report = if a.ransac {
        let factory = |subset: &[Example], round: usize| {
            let seed = a.budget.seed.wrapping_add(round as u64);
            sequence_proposer(
                &a.proposer,
                &params,
                Domain::Scan,
                subset,
                seed,
                config.eval_budget,
            )
        };
        let outcome = ransac_search(&train, factory, config, &heuristics)?;
        debug!("final subset size {}", outcome.final_subset.len());
        outcome.report
    } else {
        let support = select_support(
            &train,
            a.subset_size,
            &heuristics,
            &mut seeded(a.budget.seed),
        )?;
        let mut proposer = sequence_proposer(
            &a.proposer,
            &params,
            Domain::Scan,
            &support,
            a.budget.seed,
            config.eval_budget,
        )?;
        search(&support, &mut proposer, config)?
    };
    finish_search(&report, &test, config.eval_budget, a.out.as_deref())
}

fn numbers(a: &NumbersArgs) -> anyhow::Result<Value> {
    let seed = a.budget.seed;
    let mut rng = seeded(seed);
    let lexicon = a
        .lexicon
        .as_deref()
        .map(|p| read(p).and_then(|t| Ok(Lexicon::parse(&t)?)))
        .transpose()?;
    let target = match &a.grammar {
        Some(path) => {
            let g = parse_num_grammar(&read(path)?)
                .with_context(|| format!("in {}", path.display()))?;
            match &lexicon {
                Some(lex) => lex.tokenize_grammar(&g),
                None => g,
            }
        }
        None => sample_number(
            &number_params(a.proposer.params.as_deref(), seed)?,
            &mut rng,
        )?,
    };
    if a.n_query == 0 {
        return Err(request_error("--n-query must be at least 1"));
    }
    let base = if a.train_distribution {
        NumberEpisodeParams::train()
    } else {
        NumberEpisodeParams::test()
    };
    let ep_params = NumberEpisodeParams {
        n_compositional: (a.n_compositional, a.n_compositional),
        n_query: (a.n_query, a.n_query),
        ..base
    };
    let ep = make_number_episode(&target, &ep_params, &mut rng)?;
    let roundtrip = roundtrip_agreement(&target, &ep_params.integers, a.roundtrip, seed);
    let necessary = necessary_examples(&target).len();
    if let Some(dir) = &a.out {
        write(&dir.join("episode.txt"), &ep.to_text())?;
    }
    let mut record = match a.mode {
        NumbersMode::Evaluate => {
            let accuracy = query_accuracy(&target, &ep.query, a.budget.eval_budget)?;
            println!(
                "accuracy={accuracy:.4} support={} necessary={necessary} query={} roundtrip={}/{}",
                ep.support.len(),
                ep.query.len(),
                roundtrip.0,
                roundtrip.1
            );
            json!({ "query_accuracy": accuracy })
        }
        NumbersMode::Synth => {
            let config = search_config(&a.budget, 45.0);
            let mut proposer: Box<dyn Proposer> = match a.proposer.proposer {
                ProposerKind::Prior => {
                    let p = number_params(a.proposer.params.as_deref(), seed)?;
                    Box::new(NumberPriorProposer::new(&p, seed.wrapping_add(1))?)
                }
                ProposerKind::External => {
                    external_proposer(&a.proposer, Domain::Number, &ep.support)?
                }
                other => {
                    return Err(request_error(format!(
                        "{other:?} proposer is not available for number episodes"
                    )))
                }
            };
            let report: SearchReport<NumGrammar> = search(&ep.support, &mut proposer, &config)?;
            finish_search(&report, &ep.query, config.eval_budget, a.out.as_deref())?
        }
    };
    record["support"] = json!(ep.support.len());
    record["necessary"] = json!(necessary);
    record["query"] = json!(ep.query.len());
    record["roundtrip_agree"] = json!(roundtrip.0);
    record["roundtrip_total"] = json!(roundtrip.1);
    if let Some(lex) = &lexicon {
        let shown: Vec<String> = ep
            .support
            .iter()
            .take(3)
            .map(|e| lex.to_surface_words(&e.input).join(" "))
            .collect();
        debug!("support in surface words: {shown:?}");
    }
    Ok(record)
}

/// (agreeing, attempted) over integers whose inverse rendering exists.
fn roundtrip_agreement(
    g: &NumGrammar,
    dist: &IntegerDistribution,
    n: usize,
    seed: u64,
) -> (usize, usize) {
    let mut rng = seeded(seed ^ 0x9e37_79b9);
    let mut inverter = Inverter::new(g);
    let mut agree = 0;
    let mut total = 0;
    for _ in 0..n {
        let value = dist.sample(&mut rng);
        if let Ok(words) = inverter.invert(value, MAX_NUMBER) {
            total += 1;
            if g.evaluate(&words, rulesynth::grammar::DEFAULT_EVAL_BUDGET) == Ok(value) {
                agree += 1;
            }
        }
    }
    (agree, total)
}
