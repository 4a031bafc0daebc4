use super::{Grammar, ParseError, PatternElem, RhsElem, Rule, Var, VarKind};

/// The only spelling of an empty right hand side.
pub const EMPTY_STRING: &str = "EMPTY_STRING";

const ARROW: &str = "->";

/// Recognizes `u<digits>`, `x<digits>` and `y<digits>`.
pub fn parse_var(lexeme: &str) -> Option<Var> {
    let mut chars = lexeme.chars();
    let kind = match chars.next()? {
        'u' => VarKind::Prim,
        'x' => VarKind::Str,
        'y' => VarKind::Opt,
        _ => return None,
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(Var {
        kind,
        name: lexeme.to_owned(),
    })
}

/// Words are nonempty, whitespace free, and avoid the reserved lexemes.
pub fn is_valid_word(word: &str) -> bool {
    !word.is_empty()
        && !word
            .chars()
            .any(|c| c.is_whitespace() || c == '[' || c == ']')
        && !word.contains(ARROW)
        && word != EMPTY_STRING
}

/// Source lines that carry a rule: `(1-based line number, trimmed text)`.
pub(crate) fn rule_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Splits `LHS -> RHS` at the first arrow.
pub(crate) fn split_arrow(line_no: usize, line: &str) -> Result<(&str, &str), ParseError> {
    let pos = line
        .find(ARROW)
        .ok_or_else(|| ParseError::syntax(line_no, "missing \"->\""))?;
    let (lhs, rhs) = (&line[..pos], &line[pos + ARROW.len()..]);
    if rhs.contains(ARROW) {
        return Err(ParseError::syntax(line_no, "more than one \"->\""));
    }
    Ok((lhs, rhs))
}

/// Parses a left hand side pattern. Shared with the numeric grammars.
pub fn parse_lhs(line_no: usize, lhs: &str) -> Result<Vec<PatternElem>, ParseError> {
    let mut pattern = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for tok in lhs.split_whitespace() {
        if let Some(var) = parse_var(tok) {
            if seen.contains(&tok) {
                return Err(ParseError::DuplicateVariable {
                    line: line_no,
                    name: tok.to_owned(),
                });
            }
            seen.push(tok);
            pattern.push(PatternElem::Var(var));
        } else if is_valid_word(tok) {
            pattern.push(PatternElem::Literal(tok.to_owned()));
        } else {
            return Err(ParseError::syntax(
                line_no,
                format!("\"{tok}\" is not allowed on the left hand side"),
            ));
        }
    }
    if pattern.is_empty() {
        return Err(ParseError::syntax(line_no, "empty left hand side"));
    }
    let opt_not_last = pattern[..pattern.len() - 1]
        .iter()
        .any(|e| matches!(e, PatternElem::Var(v) if v.kind == VarKind::Opt));
    if opt_not_last {
        return Err(ParseError::syntax(
            line_no,
            "y-variables may only appear at the end of a pattern",
        ));
    }
    Ok(pattern)
}

/// Pulls out a bracketed variable name starting at `rest[0] == '['`.
/// Returns the name and the remaining text.
pub(crate) fn take_bracketed(line_no: usize, rest: &str) -> Result<(&str, &str), ParseError> {
    let close = rest
        .find(']')
        .ok_or_else(|| ParseError::syntax(line_no, "unclosed \"[\""))?;
    let name = rest[1..close].trim();
    if parse_var(name).is_none() {
        return Err(ParseError::syntax(
            line_no,
            format!("\"[{name}]\" does not name a variable"),
        ));
    }
    Ok((name, &rest[close + 1..]))
}

pub(crate) fn check_bound(
    line_no: usize,
    lhs: &[PatternElem],
    name: &str,
) -> Result<(), ParseError> {
    let bound = lhs
        .iter()
        .any(|e| matches!(e, PatternElem::Var(v) if v.name == name));
    if bound {
        Ok(())
    } else {
        Err(ParseError::UnboundVariable {
            line: line_no,
            name: name.to_owned(),
        })
    }
}

fn parse_rhs(line_no: usize, lhs: &[PatternElem], rhs: &str) -> Result<Vec<RhsElem>, ParseError> {
    let trimmed = rhs.trim();
    if trimmed == EMPTY_STRING {
        return Ok(Vec::new());
    }
    if trimmed.is_empty() {
        return Err(ParseError::syntax(
            line_no,
            format!("empty right hand side (write {EMPTY_STRING})"),
        ));
    }
    let mut out = Vec::new();
    let mut rest = trimmed;
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        if rest.starts_with('[') {
            let (name, tail) = take_bracketed(line_no, rest)?;
            check_bound(line_no, lhs, name)?;
            out.push(RhsElem::VarRef(name.to_owned()));
            rest = tail;
            continue;
        }
        let end = rest
            .find(|c: char| c.is_whitespace() || c == '[')
            .unwrap_or(rest.len());
        let word = &rest[..end];
        if word.contains(']') {
            return Err(ParseError::syntax(line_no, "unmatched \"]\""));
        }
        if word == EMPTY_STRING {
            return Err(ParseError::syntax(
                line_no,
                format!("{EMPTY_STRING} must be the whole right hand side"),
            ));
        }
        if parse_var(word).is_some() {
            return Err(ParseError::syntax(
                line_no,
                format!("variable {word} must be written [{word}] on the right hand side"),
            ));
        }
        out.push(RhsElem::Output(word.to_owned()));
        rest = &rest[end..];
    }
    Ok(out)
}

/// Parses grammar source: one `LHS -> RHS` rule per line, `#` comments and
/// blank lines ignored.
pub fn parse_grammar(text: &str) -> Result<Grammar, ParseError> {
    let mut rules = Vec::new();
    let mut last_line = 0;
    for (line_no, line) in rule_lines(text) {
        let (lhs, rhs) = split_arrow(line_no, line)?;
        let lhs = parse_lhs(line_no, lhs)?;
        let rhs = parse_rhs(line_no, &lhs, rhs)?;
        rules.push(Rule::new(lhs, rhs));
        last_line = line_no;
    }
    if rules.is_empty() {
        return Err(ParseError::syntax(last_line.max(1), "grammar has no rules"));
    }
    Ok(Grammar::new(rules))
}
