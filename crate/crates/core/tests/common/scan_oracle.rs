//! A direct interpreter of the SCAN command language, written against its
//! phrase structure rather than as a rewrite grammar.

const VERBS: [(&str, &str); 4] = [
    ("walk", "WALK"),
    ("look", "LOOK"),
    ("run", "RUN"),
    ("jump", "JUMP"),
];
const DIRECTIONS: [(&str, &str); 2] = [("left", "LTURN"), ("right", "RTURN")];

/// Every command with its action sequence, in no particular order.
pub fn all_commands() -> Vec<(String, Vec<String>)> {
    let mut verb_phrases: Vec<(String, Vec<&str>)> = Vec::new();
    for (verb, act) in VERBS
        .iter()
        .map(|&(v, a)| (v, Some(a)))
        .chain([("turn", None)])
    {
        let acts = |turn: &'static str| -> Vec<&str> { std::iter::once(turn).chain(act).collect() };
        if let Some(a) = act {
            verb_phrases.push((verb.to_owned(), vec![a]));
        }
        for &(dir, turn) in &DIRECTIONS {
            verb_phrases.push((format!("{verb} {dir}"), acts(turn)));
            let mut opposite = vec![turn];
            opposite.extend(acts(turn));
            verb_phrases.push((format!("{verb} opposite {dir}"), opposite));
            verb_phrases.push((format!("{verb} around {dir}"), acts(turn).repeat(4)));
        }
    }
    let mut sentences: Vec<(String, Vec<&str>)> = Vec::new();
    for (text, acts) in &verb_phrases {
        sentences.push((text.clone(), acts.clone()));
        sentences.push((format!("{text} twice"), acts.repeat(2)));
        sentences.push((format!("{text} thrice"), acts.repeat(3)));
    }
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    let own = |v: &[&str]| v.iter().map(|s| (*s).to_owned()).collect::<Vec<String>>();
    for (a, aa) in &sentences {
        out.push((a.clone(), own(aa)));
        for (b, bb) in &sentences {
            out.push((
                format!("{a} and {b}"),
                own(&[aa.as_slice(), bb.as_slice()].concat()),
            ));
            out.push((
                format!("{a} after {b}"),
                own(&[bb.as_slice(), aa.as_slice()].concat()),
            ));
        }
    }
    out
}
