//! Graph and membership primitives plus the density quantities every
//! measure in this crate consumes.
//!
//! Graphs are simple: no self-loops, no duplicate dyads. Edges carry a
//! strictly positive weight (1 unless stated otherwise). `Graph` and
//! `Membership` are immutable after construction, so shared references
//! may be used freely from many threads.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from graph/membership construction and the density operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph needs at least 2 nodes, got {n}")]
    DegenerateGraph { n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("duplicate dyad ({u}, {v})")]
    DuplicateDyad { u: usize, v: usize },
    #[error("edge endpoint {node} out of range for {n} nodes")]
    EndpointOutOfRange { node: usize, n: usize },
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    BadWeight { u: usize, v: usize, weight: f64 },
    #[error("membership covers {actual} nodes, graph has {expected}")]
    MembershipLength { expected: usize, actual: usize },
    #[error("membership must assign at least one node")]
    EmptyMembership,
    #[error("community {label} is empty; labels must be dense 0..group_count")]
    EmptyGroup { label: usize },
    #[error("operation needs at least one edge")]
    NoEdges,
}

/// Whether dyads are ordered pairs or unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Directedness {
    Directed,
    Undirected,
}

impl Directedness {
    /// Number of dyads that could host an edge among `n` nodes.
    pub fn possible_dyads(self, n: usize) -> u64 {
        let n = n as u64;
        let ordered = n * n.saturating_sub(1);
        match self {
            Directedness::Directed => ordered,
            Directedness::Undirected => ordered / 2,
        }
    }
}

/// A weighted dyad. For undirected graphs `source < target` after
/// canonicalization in [`Graph::new`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// A simple graph: node count, directedness and a duplicate-free edge set.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    directedness: Directedness,
    edges: Vec<Edge>,
}

impl Graph {
    /// Build a graph from `(source, target, weight)` triples, validating the
    /// simple-graph invariants.
    pub fn new(
        n: usize,
        directedness: Directedness,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, GraphError> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (u, v, w) in edges {
            if u >= n {
                return Err(GraphError::EndpointOutOfRange { node: u, n });
            }
            if v >= n {
                return Err(GraphError::EndpointOutOfRange { node: v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop { node: u });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(GraphError::BadWeight { u, v, weight: w });
            }
            let (a, b) = match directedness {
                Directedness::Directed => (u, v),
                Directedness::Undirected => (u.min(v), u.max(v)),
            };
            if !seen.insert((a, b)) {
                return Err(GraphError::DuplicateDyad { u, v });
            }
            out.push(Edge {
                source: a,
                target: b,
                weight: w,
            });
        }
        Ok(Graph {
            n,
            directedness,
            edges: out,
        })
    }

    /// Build an unweighted graph (all weights 1).
    pub fn unweighted(
        n: usize,
        directedness: Directedness,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::new(n, directedness, pairs.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn directedness(&self) -> Directedness {
        self.directedness
    }

    pub fn is_directed(&self) -> bool {
        self.directedness == Directedness::Directed
    }

    /// Edges in insertion order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of edge weights (each dyad counted once).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Number of dyads that could host an edge.
    pub fn possible_dyads(&self) -> u64 {
        self.directedness.possible_dyads(self.n)
    }

    /// Fraction of possible dyads that host an edge. Weights are ignored:
    /// this is the binary density used everywhere a density window is
    /// needed.
    pub fn density(&self) -> Result<f64, GraphError> {
        if self.n < 2 {
            return Err(GraphError::DegenerateGraph { n: self.n });
        }
        Ok(self.edges.len() as f64 / self.possible_dyads() as f64)
    }

    /// Share of total edge weight joining co-membered endpoints.
    pub fn within_fraction(&self, m: &Membership) -> Result<f64, GraphError> {
        self.check_membership(m)?;
        if self.edges.is_empty() {
            return Err(GraphError::NoEdges);
        }
        let mut within = 0.0;
        let mut total = 0.0;
        for e in &self.edges {
            total += e.weight;
            if m.same_group(e.source, e.target) {
                within += e.weight;
            }
        }
        Ok(within / total)
    }

    /// Split the binary density into its within- and between-community
    /// contributions.
    pub fn density_profile(&self, m: &Membership) -> Result<DensityProfile, GraphError> {
        self.check_membership(m)?;
        let density = self.density()?;
        let dyads = self.possible_dyads() as f64;
        let within_edges = self
            .edges
            .iter()
            .filter(|e| m.same_group(e.source, e.target))
            .count();
        let within_density = within_edges as f64 / dyads;
        Ok(DensityProfile {
            density,
            within_density,
            between_density: density - within_density,
            max_within_density: m.max_within_density()?,
        })
    }

    pub(crate) fn check_membership(&self, m: &Membership) -> Result<(), GraphError> {
        if m.len() != self.n {
            return Err(GraphError::MembershipLength {
                expected: self.n,
                actual: m.len(),
            });
        }
        Ok(())
    }
}

/// A dense community assignment: one label in `0..group_count` per node,
/// every community nonempty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    labels: Vec<usize>,
    group_sizes: Vec<usize>,
}

impl Membership {
    /// Build from dense labels. Labels must cover `0..=max(labels)` with no
    /// empty community.
    pub fn new(labels: Vec<usize>) -> Result<Self, GraphError> {
        if labels.is_empty() {
            return Err(GraphError::EmptyMembership);
        }
        let groups = labels.iter().max().copied().unwrap_or(0) + 1;
        let mut group_sizes = vec![0usize; groups];
        for &l in &labels {
            group_sizes[l] += 1;
        }
        if let Some(label) = group_sizes.iter().position(|&s| s == 0) {
            return Err(GraphError::EmptyGroup { label });
        }
        Ok(Membership {
            labels,
            group_sizes,
        })
    }

    /// Build block-wise labels from group sizes: the first `sizes[0]` nodes
    /// get label 0, the next `sizes[1]` label 1, and so on.
    pub fn from_group_sizes(sizes: &[usize]) -> Result<Self, GraphError> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(GraphError::EmptyMembership);
        }
        let mut labels = Vec::with_capacity(sizes.iter().sum());
        for (label, &size) in sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(label).take(size));
        }
        Self::new(labels)
    }

    /// Map arbitrary labels to dense indices in first-appearance order.
    pub fn densify<T: Eq + Hash>(raw: impl IntoIterator<Item = T>) -> Result<Self, GraphError> {
        let mut map = HashMap::new();
        let mut labels = Vec::new();
        for item in raw {
            let next = map.len();
            labels.push(*map.entry(item).or_insert(next));
        }
        Self::new(labels)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn group_count(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    #[inline]
    pub fn same_group(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    /// Highest density attainable using only within-community dyads.
    /// Identical for directed and undirected graphs: both dyad counts
    /// scale by the same factor.
    pub fn max_within_density(&self) -> Result<f64, GraphError> {
        let n = self.len();
        if n < 2 {
            return Err(GraphError::DegenerateGraph { n });
        }
        let within: u128 = self
            .group_sizes
            .iter()
            .map(|&s| s as u128 * (s as u128 - 1))
            .sum();
        let total = n as u128 * (n as u128 - 1);
        Ok(within as f64 / total as f64)
    }

    /// Count of within-community dyads for the given directedness.
    pub fn within_dyads(&self, directedness: Directedness) -> u64 {
        let ordered: u64 = self
            .group_sizes
            .iter()
            .map(|&s| s as u64 * (s as u64 - 1))
            .sum();
        match directedness {
            Directedness::Directed => ordered,
            Directedness::Undirected => ordered / 2,
        }
    }
}

/// Density split of a graph against a membership. `within_density` and
/// `between_density` always sum to `density` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityProfile {
    pub density: f64,
    pub within_density: f64,
    pub between_density: f64,
    pub max_within_density: f64,
}
