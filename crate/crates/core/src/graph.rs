//! Immutable user-object bipartite link structure.
//!
//! The graph keeps dual adjacency (per-user object lists and per-object user
//! lists, both sorted) plus bidirectional maps between external identifiers
//! and dense indices. Once built it is never mutated, so it can be shared
//! freely across threads.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Bidirectional map between opaque external identifiers and dense indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdMap {
    to_external: Vec<u64>,
    to_dense: HashMap<u64, u32>,
}

impl IdMap {
    /// Builds the map from externals in dense-index order.
    pub fn new(externals: Vec<u64>) -> Self {
        let to_dense = externals
            .iter()
            .enumerate()
            .map(|(dense, &ext)| (ext, dense as u32))
            .collect();
        Self {
            to_external: externals,
            to_dense,
        }
    }

    pub fn len(&self) -> usize {
        self.to_external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_external.is_empty()
    }

    pub fn external(&self, dense: u32) -> u64 {
        self.to_external[dense as usize]
    }

    pub fn dense(&self, external: u64) -> Option<u32> {
        self.to_dense.get(&external).copied()
    }

    pub fn externals(&self) -> &[u64] {
        &self.to_external
    }
}

/// Immutable bipartite user-object graph with dual adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteGraph {
    user_adj: Vec<Vec<u32>>,
    object_adj: Vec<Vec<u32>>,
    user_ids: IdMap,
    object_ids: IdMap,
    links: usize,
}

impl BipartiteGraph {
    /// Builds a graph from dense-index links. Duplicate links collapse.
    ///
    /// The id maps fix `n` and `m`; users or objects without any link keep
    /// their index with degree zero.
    pub fn from_links(user_ids: IdMap, object_ids: IdMap, links: &[(u32, u32)]) -> Self {
        let n = user_ids.len();
        let m = object_ids.len();
        let mut user_adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, o) in links {
            debug_assert!((u as usize) < n && (o as usize) < m);
            user_adj[u as usize].push(o);
        }
        let mut total = 0;
        for adj in &mut user_adj {
            adj.sort_unstable();
            adj.dedup();
            total += adj.len();
        }
        let mut object_adj: Vec<Vec<u32>> = vec![Vec::new(); m];
        for (u, adj) in user_adj.iter().enumerate() {
            for &o in adj {
                object_adj[o as usize].push(u as u32);
            }
        }
        // user-major insertion order already leaves each object list sorted
        Self {
            user_adj,
            object_adj,
            user_ids,
            object_ids,
            links: total,
        }
    }

    /// Number of users `n`.
    pub fn n(&self) -> usize {
        self.user_adj.len()
    }

    /// Number of objects `m`.
    pub fn m(&self) -> usize {
        self.object_adj.len()
    }

    /// Total link count `p`.
    pub fn links(&self) -> usize {
        self.links
    }

    /// Degree of user `u` in links.
    pub fn user_degree(&self, u: usize) -> usize {
        self.user_adj[u].len()
    }

    /// Degree of object `o` in links.
    pub fn object_degree(&self, o: usize) -> usize {
        self.object_adj[o].len()
    }

    /// Sorted object indices collected by user `u`.
    pub fn user_objects(&self, u: usize) -> &[u32] {
        &self.user_adj[u]
    }

    /// Sorted user indices that collected object `o`.
    pub fn object_users(&self, o: usize) -> &[u32] {
        &self.object_adj[o]
    }

    pub fn has_link(&self, u: usize, o: u32) -> bool {
        self.user_adj[u].binary_search(&o).is_ok()
    }

    pub fn user_ids(&self) -> &IdMap {
        &self.user_ids
    }

    pub fn object_ids(&self) -> &IdMap {
        &self.object_ids
    }

    /// All links in user-major, object-ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.user_adj
            .iter()
            .enumerate()
            .flat_map(|(u, adj)| adj.iter().map(move |&o| (u as u32, o)))
    }

    /// Sparsity `p / (n * m)`.
    pub fn sparsity(&self) -> f64 {
        if self.n() == 0 || self.m() == 0 {
            return 0.0;
        }
        self.links as f64 / (self.n() as f64 * self.m() as f64)
    }

    /// Stable content hash over `(n, m, p)` and the adjacency structure.
    ///
    /// FNV-1a over the little-endian encoding; used by the similarity cache
    /// to refuse matrices built on a different training graph.
    pub fn content_hash(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut eat = |v: u64| {
            for byte in v.to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(PRIME);
            }
        };
        eat(self.n() as u64);
        eat(self.m() as u64);
        eat(self.links as u64);
        for (u, adj) in self.user_adj.iter().enumerate() {
            eat(u as u64);
            for &o in adj {
                eat(u64::from(o) + 1);
            }
        }
        h
    }

    /// Ensures the graph has at least one link.
    pub fn ensure_non_empty(&self) -> Result<()> {
        if self.links == 0 {
            Err(Error::EmptyGraph)
        } else {
            Ok(())
        }
    }
}
