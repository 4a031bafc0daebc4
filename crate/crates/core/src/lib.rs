//! Rule synthesis over interpretation grammars.
//!
//! * [`grammar`]: the sequence rewrite formalism (parse, print, match, evaluate).
//! * [`numeric`]: the same formalism with arithmetic right hand sides.
//! * [`metagrammar`]: random grammar samplers and their prior.
//! * [`episodes`]: support/query generation and the SCAN dataset.
//! * [`synthesis`]: consistency checking, proposers and guess-and-check search.

pub mod config;
pub mod episodes;
pub mod fixtures;
pub mod grammar;
pub mod metagrammar;
pub mod numeric;
pub mod program;
pub mod rng;
pub mod synthesis;

pub use grammar::{parse_grammar, print_grammar, EvalError, Grammar, ParseError};
pub use numeric::{parse_num_grammar, NumGrammar};
