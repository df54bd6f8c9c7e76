//! Galton-Watson sampling with Poisson offspring.
//!
//! Randomness is counter-based: every node owns a [`NodeKey`] derived from
//! `(seed, sample index)` and its child-index path from the root, and its
//! offspring count is a pure function of that key. The tree of sample `i` is
//! therefore the same whatever order nodes are generated in, and samples can
//! be produced in parallel with results identical to a sequential run.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Poisson};

use super::{NodeId, RootedTree};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

/// Largest offspring mean accepted by the sampler.
pub const MAX_MEAN: f64 = 1e3;

/// Inversion by sequential search is used up to this mean.
const INVERSION_LIMIT: f64 = 10.0;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Position-derived random key of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeKey(pub u64);

impl NodeKey {
    pub fn root(seed: u64, index: u64) -> Self {
        NodeKey(splitmix(
            splitmix(seed) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03),
        ))
    }

    pub fn child(self, i: usize) -> Self {
        NodeKey(splitmix(self.0 ^ splitmix(i as u64 + 1)))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Draws from Poisson(`lambda`).
pub fn poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda > INVERSION_LIMIT {
        return Poisson::new(lambda)
            .expect("positive finite mean")
            .sample(rng) as u64;
    }
    let u: f64 = rng.random();
    let mut p = (-lambda).exp();
    let mut cdf = p;
    let mut k = 0u64;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        if p == 0.0 {
            break;
        }
        cdf += p;
    }
    k
}

#[derive(Clone, Copy, Debug)]
pub struct GwSampler {
    c: f64,
    seed: u64,
}

impl GwSampler {
    pub fn new(c: f64, seed: u64) -> Result<Self> {
        if !(c.is_finite() && (0.0..=MAX_MEAN).contains(&c)) {
            return Err(Error::InvalidParameter(format!(
                "offspring mean c = {c} must lie in [0, {MAX_MEAN}]"
            )));
        }
        Ok(GwSampler { c, seed })
    }

    pub fn mean(&self) -> f64 {
        self.c
    }

    pub fn root_key(&self, index: u64) -> NodeKey {
        NodeKey::root(self.seed, index)
    }

    /// Offspring count of the node owning `key`.
    pub fn offspring(&self, key: NodeKey) -> usize {
        if self.c == 0.0 {
            return 0;
        }
        poisson(self.c, &mut key.rng()) as usize
    }

    /// Sample `index` truncated at depth `s`, generated breadth first.
    pub fn sample(&self, index: u64, s: usize, max_nodes: usize) -> Result<SampleOutcome> {
        if max_nodes == 0 {
            return Err(Error::InvalidParameter(
                "max_nodes must be at least 1".into(),
            ));
        }
        let mut tree = RootedTree::leaf();
        let mut frontier = Vec::new();
        let mut queue = VecDeque::from([(tree.root(), self.root_key(index), 0usize)]);
        while let Some((v, key, depth)) = queue.pop_front() {
            if depth == s {
                frontier.push(v);
                continue;
            }
            let n = self.offspring(key);
            if tree.len() + n > max_nodes {
                return Err(Error::BudgetExceeded {
                    what: "sampled tree size",
                    limit: max_nodes,
                });
            }
            for i in 0..n {
                let child = tree.add_child(v);
                queue.push_back((child, key.child(i), depth + 1));
            }
        }
        Ok(SampleOutcome {
            aborted: frontier.is_empty(),
            tree,
            frontier,
            depth: s,
        })
    }
}

/// A Galton-Watson tree cut off at depth `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleOutcome {
    pub tree: RootedTree,
    /// The process died out before generation `depth`.
    pub aborted: bool,
    /// Nodes at depth exactly `depth`; their offspring were never drawn.
    pub frontier: Vec<NodeId>,
    pub depth: usize,
}

pub fn sample_gw(c: f64, s: usize, seed: u64, max_nodes: usize) -> Result<SampleOutcome> {
    GwSampler::new(c, seed)?.sample(0, s, max_nodes)
}
