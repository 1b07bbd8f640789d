//! Undirected simple graph with per-node fitness.
//!
//! Nodes carry a dense integer id that is never reused after removal, so an
//! edge list exported after an attack still refers to the original nodes.
//! Adjacency lists are kept sorted; during growth new ids are always the
//! largest so far, which makes the sort order free to maintain.

use std::fmt;
use std::io::{self, Write};

use crate::error::GraphError;

/// Identifier of a node. Dense, stable for the lifetime of a graph instance,
/// never reused after `remove_node`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub(crate) fn from_index(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected simple graph: no self-loops, no parallel edges.
///
/// Mutation is single-writer; a finished graph is plain data and can be read
/// from any number of threads.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    fitness: Vec<f64>,
    live: Vec<bool>,
    live_count: usize,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Graph {
            adj: Vec::with_capacity(nodes),
            fitness: Vec::with_capacity(nodes),
            live: Vec::with_capacity(nodes),
            live_count: 0,
            edge_count: 0,
        }
    }

    pub fn reserve(&mut self, additional: usize) {
        self.adj.reserve(additional);
        self.fitness.reserve(additional);
        self.live.reserve(additional);
    }

    /// Number of live nodes.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.live_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Total ids ever allocated, live or not. Ids are `0..id_bound()`.
    #[inline]
    pub fn id_bound(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn is_live(&self, v: NodeId) -> bool {
        self.live.get(v.index()).copied().unwrap_or(false)
    }

    /// Iterates live nodes in ascending id order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, &l)| l)
            .map(|(i, _)| NodeId::from_index(i))
    }

    /// Adds an isolated node with the given fitness and returns its fresh id.
    pub fn add_node(&mut self, fitness: f64) -> Result<NodeId, GraphError> {
        if !(0.0..=1.0).contains(&fitness) {
            return Err(GraphError::FitnessOutOfRange(fitness));
        }
        let id = NodeId::from_index(self.adj.len());
        self.adj.push(Vec::new());
        self.fitness.push(fitness);
        self.live.push(true);
        self.live_count += 1;
        Ok(id)
    }

    pub fn fitness(&self, v: NodeId) -> Result<f64, GraphError> {
        self.check_live(v)?;
        Ok(self.fitness[v.index()])
    }

    pub fn degree(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check_live(v)?;
        Ok(self.adj[v.index()].len())
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: NodeId) -> Result<&[NodeId], GraphError> {
        self.check_live(v)?;
        Ok(&self.adj[v.index()])
    }

    pub fn contains_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.is_live(u) && self.is_live(v) && self.adj[u.index()].binary_search(&v).is_ok()
    }

    /// Inserts the undirected edge `u`-`v`.
    ///
    /// Self-loops, duplicates and dead endpoints are caller bugs and are
    /// rejected without touching the graph.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.check_live(u)?;
        self.check_live(v)?;
        let pos_u = match self.adj[u.index()].binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u, v)),
            Err(p) => p,
        };
        self.adj[u.index()].insert(pos_u, v);
        let pos_v = self.adj[v.index()]
            .binary_search(&u)
            .expect_err("adjacency must be symmetric");
        self.adj[v.index()].insert(pos_v, u);
        self.edge_count += 1;
        Ok(())
    }

    /// Removes `v` and all incident edges. The id is retired, not reused.
    pub fn remove_node(&mut self, v: NodeId) -> Result<(), GraphError> {
        self.check_live(v)?;
        let neighbors = std::mem::take(&mut self.adj[v.index()]);
        for &u in &neighbors {
            let pos = self.adj[u.index()]
                .binary_search(&v)
                .expect("adjacency must be symmetric");
            self.adj[u.index()].remove(pos);
        }
        self.edge_count -= neighbors.len();
        self.live[v.index()] = false;
        self.live_count -= 1;
        Ok(())
    }

    /// Fraction of realized edges among the neighbors of `v`.
    ///
    /// Defined as 0 for nodes of degree below 2, and such nodes count toward
    /// any average taken over the whole graph.
    pub fn local_clustering(&self, v: NodeId) -> Result<f64, GraphError> {
        self.check_live(v)?;
        let nbrs = &self.adj[v.index()];
        let k = nbrs.len();
        if k < 2 {
            return Ok(0.0);
        }
        let mut links = 0usize;
        for &a in nbrs {
            links += sorted_intersection_count(&self.adj[a.index()], nbrs);
        }
        // every neighbor-neighbor edge is seen from both endpoints
        let links = links / 2;
        Ok(links as f64 / (k * (k - 1) / 2) as f64)
    }

    /// Undirected edges, each listed once as `(u, v)` with `u < v`,
    /// ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, nbrs)| {
            let u = NodeId::from_index(i);
            nbrs.iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Writes the edge-list text format: one `u v` pair per line, `u < v`.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u, v)?;
        }
        Ok(())
    }

    /// Writes the node table: `id fitness` per line, ascending id. Fitness is
    /// printed in scientific notation with seven significant digits.
    pub fn write_node_table<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in self.nodes() {
            writeln!(w, "{} {:.6e}", v, self.fitness[v.index()])?;
        }
        Ok(())
    }

    #[inline]
    fn check_live(&self, v: NodeId) -> Result<(), GraphError> {
        if self.is_live(v) {
            Ok(())
        } else {
            Err(GraphError::DeadNode(v))
        }
    }

    /// Unchecked adjacency access for read-only analysis loops over
    /// `nodes()`, which only yields live ids.
    #[inline]
    pub(crate) fn adj_of(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v.index()]
    }
}

/// Size of the intersection of two sorted slices, iterating the shorter one
/// and binary-searching the longer with an advancing lower bound.
fn sorted_intersection_count(a: &[NodeId], b: &[NodeId]) -> usize {
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let mut lo = 0usize;
    let mut count = 0usize;
    for &x in short {
        match long[lo..].binary_search(&x) {
            Ok(p) => {
                count += 1;
                lo += p + 1;
            }
            Err(p) => lo += p,
        }
        if lo >= long.len() {
            break;
        }
    }
    count
}

/// Partition of the live nodes into connected components.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    component_of: Vec<Option<u32>>,
    sizes: Vec<usize>,
}

impl ComponentLabeling {
    /// Component id of a live node; `None` for dead ids.
    pub fn component_of(&self, v: NodeId) -> Option<u32> {
        self.component_of.get(v.index()).copied().flatten()
    }

    /// Component sizes indexed by component id. Components are numbered in
    /// ascending order of their smallest member, so ties in size are broken
    /// deterministically by taking the lowest component id.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// Id of the largest component; among equal sizes the one containing the
    /// smallest live node wins.
    pub fn giant(&self) -> Option<u32> {
        self.sizes
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
            .map(|(i, _)| i as u32)
    }
}

/// Labels connected components by breadth-first search from ascending ids.
/// Deterministic for a given graph.
pub fn connected_components(g: &Graph) -> ComponentLabeling {
    let mut component_of = vec![None; g.id_bound()];
    let mut sizes = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in g.nodes() {
        if component_of[start.index()].is_some() {
            continue;
        }
        let id = sizes.len() as u32;
        let mut size = 0usize;
        component_of[start.index()] = Some(id);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &u in g.adj_of(v) {
                if component_of[u.index()].is_none() {
                    component_of[u.index()] = Some(id);
                    queue.push_back(u);
                }
            }
        }
        sizes.push(size);
    }
    ComponentLabeling { component_of, sizes }
}
