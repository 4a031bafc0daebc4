use super::{ArithRhs, Factor, NumGrammar, NumRule};
use crate::grammar::{
    check_bound, parse_lhs, rule_lines, split_arrow, take_bracketed, ParseError, PatternElem,
};

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Int(u64),
    Var(&'a str),
    Plus,
    Star,
}

fn lex(line_no: usize, text: &str) -> Result<Vec<Tok<'_>>, ParseError> {
    let mut toks = Vec::new();
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        let Some(c) = rest.chars().next() else {
            break;
        };
        match c {
            '+' => {
                toks.push(Tok::Plus);
                rest = &rest[1..];
            }
            '*' => {
                toks.push(Tok::Star);
                rest = &rest[1..];
            }
            '[' => {
                let (name, tail) = take_bracketed(line_no, rest)?;
                toks.push(Tok::Var(name));
                rest = tail;
            }
            '-' => {
                let end = rest[1..]
                    .find(|c: char| !c.is_ascii_digit())
                    .map_or(rest.len(), |i| i + 1);
                if end == 1 {
                    return Err(ParseError::syntax(line_no, "unexpected \"-\""));
                }
                return Err(ParseError::NegativeLiteral {
                    line: line_no,
                    literal: rest[..end].to_owned(),
                });
            }
            d if d.is_ascii_digit() => {
                let end = rest
                    .find(|c: char| !c.is_ascii_digit())
                    .unwrap_or(rest.len());
                let n = rest[..end].parse::<u64>().map_err(|_| {
                    ParseError::syntax(line_no, format!("integer {} is too large", &rest[..end]))
                })?;
                toks.push(Tok::Int(n));
                rest = &rest[end..];
            }
            other => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("unexpected {other:?} in arithmetic expression"),
                ));
            }
        }
    }
    Ok(toks)
}

fn parse_arith(line_no: usize, lhs: &[PatternElem], text: &str) -> Result<ArithRhs, ParseError> {
    let toks = lex(line_no, text)?;
    if toks.is_empty() {
        return Err(ParseError::syntax(line_no, "empty right hand side"));
    }
    let mut terms = vec![Vec::new()];
    let mut expect_factor = true;
    for tok in toks {
        match (tok, expect_factor) {
            (Tok::Int(n), true) => {
                terms.last_mut().expect("nonempty").push(Factor::Int(n));
                expect_factor = false;
            }
            (Tok::Var(name), true) => {
                check_bound(line_no, lhs, name)?;
                terms
                    .last_mut()
                    .expect("nonempty")
                    .push(Factor::VarRef(name.to_owned()));
                expect_factor = false;
            }
            (Tok::Star, false) => expect_factor = true,
            (Tok::Plus, false) => {
                terms.push(Vec::new());
                expect_factor = true;
            }
            (tok, true) => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("expected a number or [variable], found {tok:?}"),
                ));
            }
            (tok, false) => {
                return Err(ParseError::syntax(
                    line_no,
                    format!("expected an operator, found {tok:?}"),
                ));
            }
        }
    }
    if expect_factor {
        return Err(ParseError::syntax(line_no, "dangling operator"));
    }
    Ok(ArithRhs { terms })
}

/// Parses number-grammar source. Same line discipline as
/// [`crate::grammar::parse_grammar`]; the right hand side is an expression
/// over `+`, `*`, nonnegative integers and `[var]`, with `*` binding tighter.
pub fn parse_num_grammar(text: &str) -> Result<NumGrammar, ParseError> {
    let mut rules = Vec::new();
    let mut last_line = 0;
    for (line_no, line) in rule_lines(text) {
        let (lhs, rhs) = split_arrow(line_no, line)?;
        let lhs = parse_lhs(line_no, lhs)?;
        let rhs = parse_arith(line_no, &lhs, rhs)?;
        rules.push(NumRule::new(lhs, rhs));
        last_line = line_no;
    }
    if rules.is_empty() {
        return Err(ParseError::syntax(last_line.max(1), "grammar has no rules"));
    }
    Ok(NumGrammar::new(rules))
}
