//! Hypergraph instances, inclusion probabilities, the dependency graph on
//! edge indices, and clusters.
//!
//! Vertices and edges are 0-indexed throughout.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Ground set `[0, m)` together with an ordered list of forbidden
/// configurations (edges). Every edge is a strictly increasing list of
/// vertex indices and no two edges are equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    num_vertices: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    pub fn new(num_vertices: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        check_edges(num_vertices, &edges)?;
        Ok(Self {
            num_vertices,
            edges,
        })
    }

    /// Hypergraph with no edges.
    pub fn empty(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &[usize] {
        &self.edges[i]
    }

    pub fn max_edge_size(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Keeps only the edges whose index satisfies `keep`, preserving order.
    pub fn retain_edges(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, e)| e.clone())
            .collect();
        Self {
            num_vertices: self.num_vertices,
            edges,
        }
    }

    /// Sub-instance spanned by the given edges: vertices are relabelled to
    /// `[0, u)` where `u` is the size of the vertex union. Returns the
    /// sub-hypergraph and the original index of every new vertex.
    pub fn induced_by_edges(&self, edge_ids: &[usize]) -> (Self, Vec<usize>) {
        let mut verts: Vec<usize> = edge_ids
            .iter()
            .flat_map(|&i| self.edges[i].iter().copied())
            .collect();
        verts.sort_unstable();
        verts.dedup();
        let local: HashMap<usize, usize> =
            verts.iter().enumerate().map(|(l, &v)| (v, l)).collect();
        let edges = edge_ids
            .iter()
            .map(|&i| self.edges[i].iter().map(|v| local[v]).collect())
            .collect();
        (
            Self {
                num_vertices: verts.len(),
                edges,
            },
            verts,
        )
    }

    /// Parses the plain-text format: a header `m N` followed by `N` lines of
    /// strictly increasing vertex indices. Lines starting with `#` and blank
    /// lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "missing header".into(),
        })?;
        let nums = parse_numbers(hline, header)?;
        if nums.len() != 2 {
            return Err(Error::Parse {
                line: hline,
                message: "header must be `m N`".into(),
            });
        }
        let (m, n) = (nums[0], nums[1]);
        let mut edges = Vec::with_capacity(n);
        for (line, l) in lines {
            if edges.len() == n {
                return Err(Error::Parse {
                    line,
                    message: format!("more than {n} edge lines"),
                });
            }
            edges.push(parse_numbers(line, l)?);
        }
        if edges.len() != n {
            return Err(Error::Parse {
                line: 0,
                message: format!("expected {n} edges, found {}", edges.len()),
            });
        }
        Self::new(m, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.num_vertices, self.edges.len());
        for e in &self.edges {
            let mut first = true;
            for v in e {
                if !first {
                    out.push(' ');
                }
                first = false;
                write!(out, "{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn parse_numbers(line: usize, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line,
                message: format!("bad integer `{tok}`: {e}"),
            })
        })
        .collect()
}

fn check_edges(num_vertices: usize, edges: &[Vec<usize>]) -> Result<()> {
    for (i, e) in edges.iter().enumerate() {
        let bad = |reason: &str| Error::BadEdge {
            index: i,
            reason: reason.to_string(),
        };
        if e.is_empty() {
            return Err(bad("empty"));
        }
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("duplicate vertex"));
        }
        if e.windows(2).any(|w| w[0] > w[1]) {
            return Err(bad("vertices not sorted"));
        }
        if let Some(&v) = e.iter().find(|&&v| v >= num_vertices) {
            return Err(bad(&format!("vertex {v} out of range [0, {num_vertices})")));
        }
    }
    let mut seen: HashMap<&[usize], usize> = HashMap::with_capacity(edges.len());
    for (i, e) in edges.iter().enumerate() {
        if let Some(&first) = seen.get(e.as_slice()) {
            return Err(Error::DuplicateEdge { first, second: i });
        }
        seen.insert(e, i);
    }
    Ok(())
}

/// Inclusion probabilities, each strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbabilityAssignment<F> {
    Uniform(F),
    PerVertex(Vec<F>),
}

impl<F: Real> ProbabilityAssignment<F> {
    #[inline]
    pub fn get(&self, vertex: usize) -> F {
        match self {
            Self::Uniform(p) => *p,
            Self::PerVertex(ps) => ps[vertex],
        }
    }

    pub fn uniform_value(&self) -> Option<F> {
        match self {
            Self::Uniform(p) => Some(*p),
            Self::PerVertex(_) => None,
        }
    }

    pub fn max_value(&self) -> F {
        match self {
            Self::Uniform(p) => *p,
            Self::PerVertex(ps) => ps.iter().copied().fold(F::zero(), F::max),
        }
    }

    /// `E[X_i]` for an edge: the product of its vertex probabilities.
    pub fn edge_probability(&self, edge: &[usize]) -> F {
        match self {
            Self::Uniform(p) => p.powi(edge.len() as i32),
            Self::PerVertex(ps) => edge.iter().fold(F::one(), |acc, &v| acc * ps[v]),
        }
    }

    /// Expands to one value per vertex.
    pub fn to_vec(&self, num_vertices: usize) -> Vec<F> {
        (0..num_vertices).map(|v| self.get(v)).collect()
    }

    /// Restricts per-vertex values to the listed vertices (in order).
    pub fn restrict(&self, vertices: &[usize]) -> Self {
        match self {
            Self::Uniform(p) => Self::Uniform(*p),
            Self::PerVertex(ps) => Self::PerVertex(vertices.iter().map(|&v| ps[v]).collect()),
        }
    }

    pub fn check(&self, num_vertices: usize) -> Result<()> {
        let in_range = |x: F| x > F::zero() && x < F::one();
        match self {
            Self::Uniform(p) => {
                if !in_range(*p) {
                    return Err(Error::BorderProbability {
                        vertex: 0,
                        value: p.as_f64(),
                    });
                }
            }
            Self::PerVertex(ps) => {
                if ps.len() != num_vertices {
                    return Err(Error::ProbabilityLength {
                        expected: num_vertices,
                        got: ps.len(),
                    });
                }
                if let Some((v, &x)) = ps.iter().enumerate().find(|(_, &x)| !in_range(x)) {
                    return Err(Error::BorderProbability {
                        vertex: v,
                        value: x.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Checks all instance invariants: well-formed edges and probabilities in
/// the open unit interval.
pub fn validate_instance<F: Real>(h: &Hypergraph, p: &ProbabilityAssignment<F>) -> Result<()> {
    check_edges(h.num_vertices, &h.edges)?;
    p.check(h.num_vertices)
}

/// Graph on edge indices with `i ~ j` iff `i != j` and the edges intersect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    adjacency: Vec<Vec<usize>>,
}

impl DependencyGraph {
    /// Builds the graph through a vertex-to-edges inverted index.
    pub fn build(h: &Hypergraph) -> Self {
        let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); h.num_vertices()];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e {
                incidence[v].push(i);
            }
        }
        let n = h.num_edges();
        let mut stamp = vec![usize::MAX; n];
        let mut adjacency = Vec::with_capacity(n);
        for (i, e) in h.edges().iter().enumerate() {
            let mut adj = Vec::new();
            for &v in e {
                for &j in &incidence[v] {
                    if j != i && stamp[j] != i {
                        stamp[j] = i;
                        adj.push(j);
                    }
                }
            }
            adj.sort_unstable();
            adjacency.push(adj);
        }
        Self { adjacency }
    }

    /// Builds the graph by intersecting every pair of sorted edges.
    pub fn build_pairwise(h: &Hypergraph) -> Self {
        let n = h.num_edges();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if sorted_intersect(h.edge(i), h.edge(j)) {
                    adjacency[i].push(j);
                    adjacency[j].push(i);
                }
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Self { adjacency }
    }

    /// Wraps an explicit adjacency structure. Lists are sorted and must be
    /// symmetric and loop-free.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        for (i, adj) in adjacency.iter().enumerate() {
            for &j in adj {
                if j >= n || j == i || adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::InvalidParameter(format!(
                        "adjacency is not symmetric and loop-free at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { adjacency })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn num_links(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// External neighbourhood: neighbours of `members` that are not members.
    pub fn boundary(&self, members: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = members
            .iter()
            .flat_map(|&i| self.adjacency[i].iter().copied())
            .filter(|j| !members.contains(j))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Whether `members` induces a connected subgraph (BFS). The empty set
    /// is not connected.
    pub fn is_connected(&self, members: &[usize]) -> bool {
        if members.is_empty() {
            return false;
        }
        let mut seen = vec![false; members.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(a) = queue.pop_front() {
            for (b, &mb) in members.iter().enumerate() {
                if !seen[b] && self.adjacent(members[a], mb) {
                    seen[b] = true;
                    reached += 1;
                    queue.push_back(b);
                }
            }
        }
        reached == members.len()
    }
}

fn sorted_intersect(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// A set of edge indices inducing a connected subgraph of the dependency
/// graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cluster {
    members: Vec<usize>,
}

impl Cluster {
    pub fn new(g: &DependencyGraph, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&i| i >= g.len()) || !g.is_connected(&members) {
            return Err(Error::NotConnected { members });
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// `∂(V)` for a cluster.
pub fn boundary(g: &DependencyGraph, v: &Cluster) -> Vec<usize> {
    g.boundary(v.members())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn k4_triangles() -> Hypergraph {
        // K4 edges: 01=0 02=1 03=2 12=3 13=4 23=5
        Hypergraph::new(6, vec![vec![0, 1, 3], vec![0, 2, 4], vec![1, 2, 5], vec![3, 4, 5]])
            .unwrap()
    }

    #[test]
    fn validation_examples() {
        let h = Hypergraph::new(3, vec![vec![0, 1, 2]]).unwrap();
        assert!(validate_instance(&h, &ProbabilityAssignment::Uniform(0.5)).is_ok());
        assert!(matches!(
            validate_instance(&h, &ProbabilityAssignment::Uniform(1.0)),
            Err(Error::BorderProbability { .. })
        ));
        assert!(matches!(
            validate_instance(&h, &ProbabilityAssignment::Uniform(0.0)),
            Err(Error::BorderProbability { .. })
        ));
        assert!(matches!(
            Hypergraph::new(2, vec![vec![0, 2]]),
            Err(Error::BadEdge { index: 0, .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![]]),
            Err(Error::BadEdge { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 0]]),
            Err(Error::BadEdge { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![1, 1]]),
            Err(Error::BadEdge { .. })
        ));
        assert!(matches!(
            Hypergraph::new(3, vec![vec![0, 1], vec![2], vec![0, 1]]),
            Err(Error::DuplicateEdge {
                first: 0,
                second: 2
            })
        ));
        let pv = ProbabilityAssignment::PerVertex(vec![0.5, 0.2]);
        assert!(matches!(
            validate_instance(&h, &pv),
            Err(Error::ProbabilityLength { .. })
        ));
    }

    #[test]
    fn dependency_graph_examples() {
        let g = DependencyGraph::build(&k4_triangles());
        for i in 0..4 {
            let expect: Vec<usize> = (0..4).filter(|&j| j != i).collect();
            assert_eq!(g.neighbors(i), expect.as_slice());
        }
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = DependencyGraph::build(&h);
        assert!(g.neighbors(0).is_empty() && g.neighbors(1).is_empty());
        // {1,2,3} and {1,3,5} in [5], zero-indexed
        let h = Hypergraph::new(5, vec![vec![0, 1, 2], vec![0, 2, 4]]).unwrap();
        assert!(DependencyGraph::build(&h).adjacent(0, 1));
    }

    #[test]
    fn boundary_examples() {
        let g = DependencyGraph::build(&k4_triangles());
        let v = Cluster::new(&g, vec![0]).unwrap();
        assert_eq!(boundary(&g, &v), vec![1, 2, 3]);
        let all = Cluster::new(&g, vec![0, 1, 2, 3]).unwrap();
        assert!(boundary(&g, &all).is_empty());
        let h = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let g = DependencyGraph::build(&h);
        assert!(boundary(&g, &Cluster::new(&g, vec![0]).unwrap()).is_empty());
        assert!(Cluster::new(&g, vec![0, 1]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let h = k4_triangles();
        let text = h.to_text();
        assert_eq!(text, "6 4\n0 1 3\n0 2 4\n1 2 5\n3 4 5\n");
        let parsed = Hypergraph::parse(&format!("# comment\n{text}")).unwrap();
        assert_eq!(parsed, h);
        assert_eq!(parsed.to_text(), text);
        assert!(matches!(
            Hypergraph::parse("3 2\n0 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Hypergraph::parse("3 1\n0 x\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn induced_sub_instance() {
        let h = k4_triangles();
        let (sub, verts) = h.induced_by_edges(&[0, 3]);
        assert_eq!(verts, vec![0, 1, 3, 4, 5]);
        assert_eq!(sub.edges(), &[vec![0, 1, 2], vec![2, 3, 4]]);
    }
}
