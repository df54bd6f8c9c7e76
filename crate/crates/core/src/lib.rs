//! Probabilities of first-order properties of Poisson Galton-Watson trees.
//!
//! A sentence of quantifier depth `k` is compiled to a finite state system:
//! the Ehrenfeucht classes of rooted trees, a recursion function that maps
//! capped counts of child classes to the class of the root, and the set of
//! accepting classes. The class distribution of the random tree is a fixed
//! point of the induced map on the probability simplex, solved in [`solver`].
//! [`montecarlo`] estimates the same quantities from simulated trees.

pub mod classes;
pub mod error;
pub mod logic;
pub mod montecarlo;
pub mod solver;
pub mod tree;

pub use classes::{StateId, StateSet, StateSystem};
pub use error::{Error, Result};
pub use logic::Sentence;
pub use solver::Distribution;
pub use tree::{NodeId, RootedTree, SampleOutcome, TreeCode};
