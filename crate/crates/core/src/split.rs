//! Seeded train/probe partition of the link set.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Held-out links, grouped per user with sorted object lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSet {
    per_user: Vec<Vec<u32>>,
    len: usize,
}

impl ProbeSet {
    fn new(n: usize, mut edges: Vec<(u32, u32)>) -> Self {
        let len = edges.len();
        edges.sort_unstable();
        let mut per_user = vec![Vec::new(); n];
        for (u, o) in edges {
            per_user[u as usize].push(o);
        }
        Self { per_user, len }
    }

    /// Held-out objects of user `u`, sorted ascending.
    pub fn user_objects(&self, u: usize) -> &[u32] {
        &self.per_user[u]
    }

    /// Number of held-out links.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of users (dimension, not the count with entries).
    pub fn n(&self) -> usize {
        self.per_user.len()
    }

    /// All probe links in user-major, object-ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.per_user
            .iter()
            .enumerate()
            .flat_map(|(u, objs)| objs.iter().map(move |&o| (u as u32, o)))
    }
}

/// Exact-count random partition of a graph's links.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: BipartiteGraph,
    pub probe: ProbeSet,
    pub fraction: f64,
    pub seed: u64,
}

/// Partitions the link set: a seeded shuffle, then the first
/// `round(fraction * p)` links become the training graph.
///
/// The training graph keeps the source id maps, so users and objects retain
/// their dense indices even when their training degree drops to zero, and
/// probe entries stay addressable. Deterministic for fixed
/// `(graph, fraction, seed)`.
pub fn split(graph: &BipartiteGraph, fraction: f64, seed: u64) -> Result<Split> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidFraction(fraction));
    }
    let mut edges: Vec<(u32, u32)> = graph.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    edges.shuffle(&mut rng);
    let train_count = (fraction * graph.links() as f64).round() as usize;
    let probe_edges = edges.split_off(train_count.min(edges.len()));
    let train = BipartiteGraph::from_links(
        graph.user_ids().clone(),
        graph.object_ids().clone(),
        &edges,
    );
    Ok(Split {
        train,
        probe: ProbeSet::new(graph.n(), probe_edges),
        fraction,
        seed,
    })
}
