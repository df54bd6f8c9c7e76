//! State systems: Ehrenfeucht classes with their recursion function, either
//! compiled from the game or written by hand.

mod compile;
mod format;
mod system;

pub use compile::{
    accepting_set, build_state_space, classify, compile_sentence, gamma_of_tree_counts, Classifier,
    Limits,
};
pub use format::{bundled, format_system, load_manual_system};
pub use system::{
    CapSet, Count, CountVector, MergeTables, Recursion, Rule, StateId, StateSet, StateSystem,
};
