//! Grammars shipped with the crate.

use crate::grammar::{parse_grammar, Grammar};
use crate::numeric::{parse_num_grammar, NumGrammar};

/// SCAN interpretation grammar with conjunctions ahead of repetitions.
pub const SCAN: &str = include_str!("../fixtures/scan.grammar");
/// The same rules in listing order (repetitions first).
pub const SCAN_FIGURE_ORDER: &str = include_str!("../fixtures/scan_figure_order.grammar");
/// Base-10 number grammar with thousands and millions.
pub const NUMBERS_A: &str = include_str!("../fixtures/numbers_a.grammar");
/// Base-10 number grammar with irregular tens and a ten-thousands word.
pub const NUMBERS_B: &str = include_str!("../fixtures/numbers_b.grammar");

pub fn scan_grammar() -> Grammar {
    parse_grammar(SCAN).expect("bundled SCAN grammar parses")
}

pub fn numbers_a() -> NumGrammar {
    parse_num_grammar(NUMBERS_A).expect("bundled number grammar parses")
}

pub fn numbers_b() -> NumGrammar {
    parse_num_grammar(NUMBERS_B).expect("bundled number grammar parses")
}
