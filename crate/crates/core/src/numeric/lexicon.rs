use std::collections::BTreeMap;

use thiserror::Error;

use super::NumGrammar;
use crate::grammar::{is_valid_word, PatternElem};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LexiconError {
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("word {0:?} is not in the lexicon")]
    UnknownWord(String),
}

/// Assignment of surface words to generic token IDs, one
/// `surface<TAB>tokenNN` pair per line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    to_token: BTreeMap<String, String>,
    to_surface: BTreeMap<String, String>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fail = |message: &str| LexiconError::Format {
                line,
                message: message.to_owned(),
            };
            let mut fields = trimmed.split('\t');
            let (Some(surface), Some(token), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(fail("expected exactly two tab-separated fields"));
            };
            let (surface, token) = (surface.trim(), token.trim());
            if !is_valid_word(surface) || !is_valid_word(token) {
                return Err(fail("fields must be single words"));
            }
            if lex.to_token.contains_key(surface) {
                return Err(fail(&format!("{surface:?} assigned twice")));
            }
            if lex.to_surface.contains_key(token) {
                return Err(fail(&format!("token {token:?} assigned twice")));
            }
            lex.to_token.insert(surface.to_owned(), token.to_owned());
            lex.to_surface.insert(token.to_owned(), surface.to_owned());
        }
        Ok(lex)
    }

    pub fn len(&self) -> usize {
        self.to_token.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_token.is_empty()
    }

    pub fn token(&self, surface: &str) -> Option<&str> {
        self.to_token.get(surface).map(String::as_str)
    }

    pub fn surface(&self, token: &str) -> Option<&str> {
        self.to_surface.get(token).map(String::as_str)
    }

    pub fn to_tokens(&self, words: &[String]) -> Result<Vec<String>, LexiconError> {
        words
            .iter()
            .map(|w| {
                self.token(w)
                    .map(str::to_owned)
                    .ok_or_else(|| LexiconError::UnknownWord(w.clone()))
            })
            .collect()
    }

    /// Maps tokens back to surface words; unknown tokens pass through.
    pub fn to_surface_words(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .map(|t| self.surface(t).unwrap_or(t).to_owned())
            .collect()
    }

    /// Rewrites surface-word literals of a grammar to their tokens. Literals
    /// without an entry are left alone.
    pub fn tokenize_grammar(&self, g: &NumGrammar) -> NumGrammar {
        let mut out = g.clone();
        for rule in &mut out.rules {
            for elem in &mut rule.lhs {
                if let PatternElem::Literal(w) = elem {
                    if let Some(tok) = self.to_token.get(w.as_str()) {
                        *w = tok.clone();
                    }
                }
            }
        }
        out
    }
}
