//! Finite simplicial graphs on at most 64 vertices.
//!
//! Vertex sets are machine words, so every set operation used by the word and
//! parabolic machinery (links, stars, intersections, component scans) is a few
//! bit instructions. The 64-vertex cap is a deliberate trade: the algorithms
//! in this crate are exact and exponential in places, so graphs anywhere near
//! the cap are already out of reach for the expensive operations.

use std::fmt;

use thiserror::Error;

/// Index of a vertex inside a fixed graph or presentation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of vertices, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    #[inline]
    pub fn empty() -> Self {
        VertexSet(0)
    }

    /// The full set {0, .., n-1}.
    #[inline]
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= 64);
        if n == 64 {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    #[inline]
    pub fn singleton(v: VertexId) -> Self {
        VertexSet(1u64 << v.0)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    #[inline]
    pub fn contains(self, v: VertexId) -> bool {
        self.0 & (1u64 << v.0) != 0
    }

    #[inline]
    pub fn insert(&mut self, v: VertexId) {
        self.0 |= 1u64 << v.0;
    }

    #[inline]
    pub fn remove(&mut self, v: VertexId) {
        self.0 &= !(1u64 << v.0);
    }

    #[inline]
    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub fn minus(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_subset_of(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Smallest vertex id in the set, if any.
    #[inline]
    pub fn smallest(self) -> Option<VertexId> {
        if self.0 == 0 {
            None
        } else {
            Some(VertexId(self.0.trailing_zeros() as usize))
        }
    }

    /// Ascending iteration over the members.
    pub fn iter(self) -> impl Iterator<Item = VertexId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(VertexId(v))
            }
        })
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        let mut s = VertexSet::empty();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", v.0)?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph supports at most 64 vertices, got {0}")]
    TooManyVertices(usize),
    #[error("vertex index {0} out of range for graph on {1} vertices")]
    OutOfRange(usize, usize),
    #[error("self-loops are not allowed (vertex {0})")]
    SelfLoop(usize),
    #[error("operation requires a nonempty graph")]
    EmptyGraph,
    #[error("operation requires an irreducible graph")]
    ReducibleGraph,
}

/// Undirected simple graph; adjacency rows are bitmasks.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SimplicialGraph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n > 64 {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(SimplicialGraph {
            n,
            adj: vec![0; n],
        })
    }

    /// Builds a graph from an edge list; convenience for tests and fixtures.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = SimplicialGraph::new(n)?;
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v))?;
        }
        Ok(g)
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if v.0 >= self.n {
            Err(GraphError::OutOfRange(v.0, self.n))
        } else {
            Ok(())
        }
    }

    /// Inserts the edge {u, v}. Returns false if it was already present.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<bool, GraphError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u.0));
        }
        if self.adjacent(u, v) {
            return Ok(false);
        }
        self.adj[u.0] |= 1u64 << v.0;
        self.adj[v.0] |= 1u64 << u.0;
        Ok(true)
    }

    /// Appends an isolated vertex and returns its id.
    pub fn push_vertex(&mut self) -> Result<VertexId, GraphError> {
        if self.n == 64 {
            return Err(GraphError::TooManyVertices(self.n + 1));
        }
        self.adj.push(0);
        self.n += 1;
        Ok(VertexId(self.n - 1))
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in VertexSet(self.adj[u]).iter() {
                if u < v.0 {
                    out.push((VertexId(u), v));
                }
            }
        }
        out
    }

    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        debug_assert!(u.0 < self.n && v.0 < self.n);
        self.adj[u.0] & (1u64 << v.0) != 0
    }

    /// All neighbours of v. Never contains v itself.
    #[inline]
    pub fn link(&self, v: VertexId) -> VertexSet {
        debug_assert!(v.0 < self.n);
        VertexSet(self.adj[v.0])
    }

    /// Common neighbours of every vertex in A; the whole vertex set when A is
    /// empty.
    pub fn link_of(&self, a: VertexSet) -> VertexSet {
        let mut out = self.vertices();
        for v in a.iter() {
            out = out.intersection(self.link(v));
        }
        out
    }

    /// link(v) together with v.
    #[inline]
    pub fn star(&self, v: VertexId) -> VertexSet {
        self.link(v).union(VertexSet::singleton(v))
    }

    /// The subgraph induced on A. Vertices are renumbered in ascending order
    /// of their old ids; the returned vector maps new ids to old ones.
    pub fn full_subgraph(&self, a: VertexSet) -> (SimplicialGraph, Vec<VertexId>) {
        let old_ids: Vec<VertexId> = a.iter().collect();
        let mut g = SimplicialGraph::new(old_ids.len()).expect("subset of a valid graph");
        for (i, &u) in old_ids.iter().enumerate() {
            for (j, &v) in old_ids.iter().enumerate().skip(i + 1) {
                if self.adjacent(u, v) {
                    g.adj[i] |= 1u64 << j;
                    g.adj[j] |= 1u64 << i;
                }
            }
        }
        (g, old_ids)
    }

    /// Complement graph on the same vertices.
    pub fn complement(&self) -> SimplicialGraph {
        let full = self.vertices();
        let mut g = SimplicialGraph::new(self.n).expect("same size");
        for v in 0..self.n {
            g.adj[v] = full.bits() & !self.adj[v] & !(1u64 << v);
        }
        g
    }

    /// Connected components of the subgraph induced on `within`, ordered by
    /// their smallest vertex id.
    pub fn connected_components(&self, within: VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::empty();
        let mut out = Vec::new();
        for start in within.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::singleton(start);
            let mut frontier = VertexSet::singleton(start);
            while !frontier.is_empty() {
                let mut next = VertexSet::empty();
                for v in frontier.iter() {
                    next = next.union(self.link(v).intersection(within));
                }
                frontier = next.minus(comp);
                comp = comp.union(frontier);
            }
            seen = seen.union(comp);
            out.push(comp);
        }
        out
    }

    /// Whether the subgraph induced on `within` is connected. The empty set
    /// counts as connected.
    pub fn is_connected_on(&self, within: VertexSet) -> bool {
        self.connected_components(within).len() <= 1
    }

    /// A graph is irreducible when its complement is connected; equivalently
    /// the associated group does not split as a direct product of full
    /// subgroups. Empty and single-vertex graphs are irreducible.
    pub fn is_irreducible(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        self.complement().is_connected_on(self.vertices())
    }

    /// For a reducible graph, the direct-product split (A, B) where A is the
    /// complement component containing the smallest vertex id and B is the
    /// rest. B always equals link(A). Returns None on irreducible graphs.
    pub fn split_reducible(&self) -> Option<(VertexSet, VertexSet)> {
        if self.n <= 1 {
            return None;
        }
        let comps = self.complement().connected_components(self.vertices());
        if comps.len() <= 1 {
            return None;
        }
        let a = comps[0];
        let b = self.vertices().minus(a);
        debug_assert_eq!(b, self.link_of(a));
        Some((a, b))
    }

    /// Smallest vertex whose removal keeps the complement connected. Every
    /// nonempty connected graph has a non-cut vertex, so this succeeds on
    /// every nonempty irreducible graph.
    pub fn find_noncut_vertex(&self) -> Result<VertexId, GraphError> {
        if self.n == 0 {
            return Err(GraphError::EmptyGraph);
        }
        if !self.is_irreducible() {
            return Err(GraphError::ReducibleGraph);
        }
        let comp = self.complement();
        let all = self.vertices();
        for v in all.iter() {
            let rest = all.minus(VertexSet::singleton(v));
            if comp.is_connected_on(rest) {
                return Ok(v);
            }
        }
        unreachable!("a connected graph always has a non-cut vertex")
    }
}

impl fmt::Debug for SimplicialGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialGraph(n={}, edges=", self.n)?;
        f.debug_list()
            .entries(self.edges().iter().map(|(u, v)| (u.0, v.0)))
            .finish()?;
        write!(f, ")")
    }
}
