use super::{PatternElem, VarKind};

/// Variable assignments produced by a successful match. Each entry borrows
/// a contiguous slice of the matched input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings<'a> {
    entries: Vec<(&'a str, &'a [String])>,
}

impl<'a> Bindings<'a> {
    pub fn get(&self, name: &str) -> Option<&'a [String]> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, seq)| *seq)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a str, &'a [String])> + '_ {
        self.entries.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Rebuilds the input by substituting bindings back into the pattern.
    pub fn substitute(&self, lhs: &[PatternElem]) -> Vec<String> {
        let mut out = Vec::new();
        for elem in lhs {
            match elem {
                PatternElem::Literal(w) => out.push(w.clone()),
                PatternElem::Var(v) => {
                    if let Some(seq) = self.get(&v.name) {
                        out.extend(seq.iter().cloned());
                    }
                }
            }
        }
        out
    }
}

/// Matches `lhs` against the whole of `input`.
///
/// When several bindings exist, literals anchor at their leftmost feasible
/// positions, so earlier variables receive the shortest feasible binding.
pub fn match_lhs<'a>(lhs: &'a [PatternElem], input: &'a [String]) -> Option<Bindings<'a>> {
    let min_total: usize = lhs.iter().map(PatternElem::min_len).sum();
    if input.len() < min_total {
        return None;
    }
    let variable_width = lhs
        .iter()
        .any(|e| matches!(e, PatternElem::Var(v) if v.kind != VarKind::Prim));
    if !variable_width && input.len() != min_total {
        return None;
    }
    let mut bindings = Bindings::default();
    if match_from(lhs, input, min_total, &mut bindings) {
        Some(bindings)
    } else {
        None
    }
}

/// `min_rest` is the fewest words `pattern` can consume.
fn match_from<'a>(
    pattern: &'a [PatternElem],
    input: &'a [String],
    min_rest: usize,
    out: &mut Bindings<'a>,
) -> bool {
    let Some((head, tail)) = pattern.split_first() else {
        return input.is_empty();
    };
    let min_tail = min_rest - head.min_len();
    match head {
        PatternElem::Literal(w) => {
            matches!(input.first(), Some(first) if first == w)
                && match_from(tail, &input[1..], min_tail, out)
        }
        PatternElem::Var(v) => {
            if tail.is_empty() {
                let fits = match v.kind {
                    VarKind::Prim => input.len() == 1,
                    VarKind::Str => !input.is_empty(),
                    VarKind::Opt => true,
                };
                if fits {
                    out.entries.push((v.name.as_str(), input));
                }
                return fits;
            }
            let room = input.len().saturating_sub(min_tail);
            let (lo, hi) = match v.kind {
                VarKind::Prim => (1, room.min(1)),
                VarKind::Str => (1, room),
                VarKind::Opt => (0, room),
            };
            for len in lo..=hi {
                out.entries.push((v.name.as_str(), &input[..len]));
                if match_from(tail, &input[len..], min_tail, out) {
                    return true;
                }
                out.entries.pop();
            }
            false
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{parse_lhs, words};

    fn lhs(s: &str) -> Vec<PatternElem> {
        parse_lhs(1, s).unwrap()
    }

    fn bound(b: &Bindings<'_>, name: &str) -> String {
        b.get(name).unwrap().join(" ")
    }

    #[test]
    fn around_binds_single_words() {
        let p = lhs("u1 around u2");
        let input = words("jump around left");
        let b = match_lhs(&p, &input).unwrap();
        assert_eq!(bound(&b, "u1"), "jump");
        assert_eq!(bound(&b, "u2"), "left");
    }

    #[test]
    fn primitive_variable_arity() {
        let p = lhs("u1 opposite u2");
        assert!(match_lhs(&p, &words("jump opposite left after walk")).is_none());
    }

    #[test]
    fn leftmost_anchor() {
        let p = lhs("x1 and x2");
        let input = words("a and b and c");
        let b = match_lhs(&p, &input).unwrap();
        assert_eq!(bound(&b, "x1"), "a");
        assert_eq!(bound(&b, "x2"), "b and c");
    }

    #[test]
    fn string_variables_are_nonempty() {
        assert!(match_lhs(&lhs("x1 twice"), &words("twice")).is_none());
        assert!(match_lhs(&lhs("x1 and x2"), &words("a and")).is_none());
    }

    #[test]
    fn optional_variable_may_be_empty() {
        let p = lhs("x1 hundred y1");
        let input = words("two hundred");
        let b = match_lhs(&p, &input).unwrap();
        assert_eq!(bound(&b, "x1"), "two");
        assert!(b.get("y1").unwrap().is_empty());
        let input = words("two hundred three");
        let b = match_lhs(&p, &input).unwrap();
        assert_eq!(bound(&b, "y1"), "three");
    }

    #[test]
    fn whole_input_only() {
        assert!(match_lhs(&lhs("walk"), &words("walk left")).is_none());
        assert!(match_lhs(&lhs("u1 u2"), &words("walk left twice")).is_none());
        assert!(match_lhs(&lhs("u1 x1"), &words("walk")).is_none());
    }

    #[test]
    fn literal_mismatch() {
        assert!(match_lhs(&lhs("x1 twice"), &words("walk thrice")).is_none());
    }
}
