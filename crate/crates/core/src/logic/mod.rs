//! First-order logic on rooted trees: sentences, model checking, and the
//! Ehrenfeucht game.

mod eval;
mod game;
mod sentence;

pub use eval::evaluate;
pub use game::{
    ehr_equivalent, ehr_wins, ehr_wins_with_limit, GamePosition, GameTyper, DEFAULT_MEMO_LIMIT,
};
pub use sentence::{Formula, Sentence, Term, NO_ONE_CHILD};
