//! Directed-graph machinery: adjacency, degrees, connectivity, and the two
//! graph families the consensus strategies live on.
//!
//! Conventions. An arc `(i, j)` goes from `i` to `j`; self-loops are
//! allowed and counted by the degree queries. The *communication graph* of
//! a matrix `P` has an arc `j → i` whenever `P[i, j] ≠ 0`: agent `i` needs
//! the state of agent `j`, so information flows from `j` to `i`. Note the
//! transpose relative to reading `P` as an adjacency matrix — the nonzero
//! pattern of `P`, read as an adjacency matrix, is the *reverse* of its
//! communication graph.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matlin::Matrix;
use crate::Caps;

/// Default threshold below which a matrix entry counts as zero.
pub const ZERO_TOL: f64 = 1e-12;

/// A directed graph on vertices `0..vertex_count`, self-loops allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    vertex_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

/// In/out-degree counts of a graph, including self-loops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeProfile {
    pub in_degrees: Vec<usize>,
    pub out_degrees: Vec<usize>,
    /// Maximum in-degree ν.
    pub max_in: usize,
}

impl DirectedGraph {
    pub fn new(
        vertex_count: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::Domain("graph needs at least one vertex".into()));
        }
        let mut set = BTreeSet::new();
        for (i, j) in arcs {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::Domain(format!(
                    "arc ({i}, {j}) outside vertex range 0..{vertex_count}"
                )));
            }
            set.insert((i, j));
        }
        Ok(DirectedGraph {
            vertex_count,
            arcs: set,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.contains(&(from, to))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    /// The graph with every arc direction flipped.
    pub fn reverse(&self) -> DirectedGraph {
        DirectedGraph {
            vertex_count: self.vertex_count,
            arcs: self.arcs.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    /// Whether every arc of `self` is an arc of `other`.
    pub fn is_subgraph_of(&self, other: &DirectedGraph) -> bool {
        self.vertex_count == other.vertex_count && self.arcs.is_subset(&other.arcs)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.arcs {
            adj[i].push(j);
        }
        adj
    }

    fn reachable_from(&self, start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
        let mut seen = vec![false; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }
}

/// De Bruijn graph on `n^k` vertices: arcs `i → (n·i + j) mod n^k` for
/// `j = 0..n-1`. In-regular and out-regular of degree `n`.
pub fn de_bruijn_graph(n: usize, k: usize) -> Result<DirectedGraph> {
    de_bruijn_graph_with_caps(n, k, &Caps::default())
}

pub fn de_bruijn_graph_with_caps(n: usize, k: usize, caps: &Caps) -> Result<DirectedGraph> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "de Bruijn base must be ≥ 2, got {n}"
        )));
    }
    if k == 0 {
        return Err(Error::Domain("de Bruijn exponent must be ≥ 1".into()));
    }
    let mut size: usize = 1;
    for _ in 0..k {
        size = size
            .checked_mul(n)
            .filter(|s| *s <= caps.max_graph_vertices)
            .ok_or_else(|| {
                Error::Size(format!(
                    "{n}^{k} exceeds the {} vertex cap",
                    caps.max_graph_vertices
                ))
            })?;
    }
    let arcs = (0..size).flat_map(|i| (0..n).map(move |j| (i, (n * i + j) % size)));
    DirectedGraph::new(size, arcs)
}

/// The direct product `Z_{d₁} × … × Z_{dm}`, elements indexed in mixed
/// radix with the last coordinate fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    dims: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Domain(format!("invalid group dimensions {dims:?}")));
        }
        let mut order: usize = 1;
        for d in dims {
            order = order
                .checked_mul(*d)
                .ok_or_else(|| Error::Size("group order overflows".into()))?;
        }
        Ok(AbelianGroup {
            dims: dims.to_vec(),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.iter().product()
    }

    /// Reduces a raw element (possibly with negative coordinates) to
    /// nonnegative residues per coordinate.
    pub fn canonicalize(&self, elem: &[i64]) -> Result<Vec<usize>> {
        if elem.len() != self.dims.len() {
            return Err(Error::Domain(format!(
                "element {elem:?} has arity {}, group has {}",
                elem.len(),
                self.dims.len()
            )));
        }
        Ok(elem
            .iter()
            .zip(&self.dims)
            .map(|(v, d)| (v.rem_euclid(*d as i64)) as usize)
            .collect())
    }

    pub fn index_of(&self, canon: &[usize]) -> usize {
        canon
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (c, d)| acc * d + c)
    }

    pub fn element_at(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (o, d) in out.iter_mut().zip(&self.dims).rev() {
            *o = idx % d;
            idx /= d;
        }
        out
    }

    /// Index of `a + b` (coordinates mod dims).
    pub fn add_indices(&self, a: usize, b: usize) -> usize {
        let ea = self.element_at(a);
        let eb = self.element_at(b);
        let sum: Vec<usize> = ea
            .iter()
            .zip(&eb)
            .zip(&self.dims)
            .map(|((x, y), d)| (x + y) % d)
            .collect();
        self.index_of(&sum)
    }

    /// Index of `a - b`.
    pub fn sub_indices(&self, a: usize, b: usize) -> usize {
        let ea = self.element_at(a);
        let eb = self.element_at(b);
        let diff: Vec<usize> = ea
            .iter()
            .zip(&eb)
            .zip(&self.dims)
            .map(|((x, y), d)| (x + d - y) % d)
            .collect();
        self.index_of(&diff)
    }
}

/// Cayley graph of `Z_{d₁} × … × Z_{dm}` with connection set `s`:
/// arcs exactly `{(g, h) : h − g ∈ S}`. Always in-regular of degree `|S|`.
///
/// Elements of `s` may use negative representatives; they are reduced to
/// nonnegative residues per coordinate.
pub fn cayley_graph(group_dims: &[usize], s: &[Vec<i64>]) -> Result<DirectedGraph> {
    let group = AbelianGroup::new(group_dims)?;
    let mut offsets = BTreeSet::new();
    for elem in s {
        offsets.insert(group.index_of(&group.canonicalize(elem)?));
    }
    let order = group.order();
    let arcs = (0..order)
        .flat_map(|g| offsets.iter().map(move |&off| (g, off)))
        .map(|(g, off)| (g, group.add_indices(g, off)))
        .collect::<Vec<_>>();
    DirectedGraph::new(order, arcs)
}

/// Communication graph of a square matrix: arc `(j, i)` present iff
/// `|m[i, j]| > zero_tol`.
pub fn communication_graph(m: &Matrix, zero_tol: f64) -> Result<DirectedGraph> {
    if !m.is_square() {
        return Err(Error::Dim(
            "communication graph needs a square matrix".into(),
        ));
    }
    let n = m.rows();
    let arcs = (0..n)
        .flat_map(|i| (0..n).filter_map(move |j| (m.get(i, j).abs() > zero_tol).then_some((j, i))));
    DirectedGraph::new(n, arcs)
}

/// Strong connectivity by two-pass reachability: every vertex must be
/// reachable from vertex 0 in the graph and in its reverse.
pub fn is_strongly_connected(g: &DirectedGraph) -> bool {
    let fwd = g.reachable_from(0, &g.adjacency());
    if !fwd.iter().all(|r| *r) {
        return false;
    }
    let rev = g.reverse();
    rev.reachable_from(0, &rev.adjacency()).iter().all(|r| *r)
}

/// The weaker notion: for every ordered pair, at least one direction is
/// joined by a path. Not used by the strategy validators.
pub fn is_connected(g: &DirectedGraph) -> bool {
    let adj = g.adjacency();
    let reach: Vec<Vec<bool>> = (0..g.vertex_count)
        .map(|v| g.reachable_from(v, &adj))
        .collect();
    reach
        .iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, fwd)| *fwd || reach[j][i]))
}

pub fn degree_profile(g: &DirectedGraph) -> DegreeProfile {
    let mut in_degrees = vec![0; g.vertex_count];
    let mut out_degrees = vec![0; g.vertex_count];
    for &(i, j) in &g.arcs {
        out_degrees[i] += 1;
        in_degrees[j] += 1;
    }
    let max_in = in_degrees.iter().copied().max().unwrap_or(0);
    DegreeProfile {
        in_degrees,
        out_degrees,
        max_in,
    }
}

impl DirectedGraph {
    /// Edge-list export: header `vertices N`, then one `i j` line per arc.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for &(i, j) in &self.arcs {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }

    /// DOT-format export for visualization tooling.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for v in 0..self.vertex_count {
            out.push_str(&format!("  {v};\n"));
        }
        for &(i, j) in &self.arcs {
            out.push_str(&format!("  {i} -> {j};\n"));
        }
        out.push_str("}\n");
        out
    }
}
