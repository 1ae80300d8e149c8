//! Colored directed multigraphs: the shared input object for every algorithm
//! in this crate.
//!
//! A colored graph is a finite directed multigraph together with a group
//! element ("color") on each edge, the group being either `Z^2` (periodic
//! frameworks) or `Z/kZ` (cone frameworks).  Loops and parallel edges are
//! legal input, and the edge list order is semantically part of the input:
//! the greedy algorithms process edges in exactly this order.

use std::collections::HashMap;

use thiserror::Error;

/// Dense vertex index, `< n`.
pub type VertexId = usize;
/// Dense edge index, `< m`, following the input edge list order.
pub type EdgeId = usize;

/// Coordinate bound for `Z^2` colors.  Path sums over at most `n` edges then
/// fit comfortably in an `i64` accumulator, keeping all group arithmetic exact.
pub const Z2_COORD_BOUND: i64 = 1 << 30;

/// The group the edge colors live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// Free abelian group on two generators (lattice translations).
    Z2,
    /// Cyclic group of order `k >= 2` (rotations).
    Zk(u32),
}

impl Group {
    pub fn identity(&self) -> Color {
        match self {
            Group::Z2 => Color::Z2(0, 0),
            Group::Zk(_) => Color::Zk(0),
        }
    }

    /// Abelian addition; total on elements of this group.
    pub fn add(&self, a: Color, b: Color) -> Color {
        match (self, a, b) {
            (Group::Z2, Color::Z2(ax, ay), Color::Z2(bx, by)) => Color::Z2(ax + bx, ay + by),
            (Group::Zk(k), Color::Zk(a), Color::Zk(b)) => {
                Color::Zk(((a as u64 + b as u64) % *k as u64) as u32)
            }
            _ => panic!("color does not belong to group {self:?}"),
        }
    }

    pub fn neg(&self, a: Color) -> Color {
        match (self, a) {
            (Group::Z2, Color::Z2(x, y)) => Color::Z2(-x, -y),
            (Group::Zk(k), Color::Zk(r)) => Color::Zk(if r == 0 { 0 } else { k - r }),
            _ => panic!("color does not belong to group {self:?}"),
        }
    }

    pub fn sub(&self, a: Color, b: Color) -> Color {
        self.add(a, self.neg(b))
    }

    pub fn is_identity(&self, a: Color) -> bool {
        a == self.identity()
    }

    /// Whether `c` is a well-formed element of this group.
    pub fn contains(&self, c: Color) -> bool {
        match (self, c) {
            (Group::Z2, Color::Z2(x, y)) => x.abs() <= Z2_COORD_BOUND && y.abs() <= Z2_COORD_BOUND,
            (Group::Zk(k), Color::Zk(r)) => r < *k,
            _ => false,
        }
    }
}

/// A group element: lattice coordinates for `Z^2`, a reduced residue for `Z/kZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Z2(i64, i64),
    Zk(u32),
}

/// One directed edge with its color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub color: Color,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge}: endpoint {endpoint} out of range (n = {n})")]
    EndpointOutOfRange {
        edge: EdgeId,
        endpoint: VertexId,
        n: usize,
    },
    #[error("edge {edge}: color does not belong to the declared group")]
    ColorGroupMismatch { edge: EdgeId },
    #[error("edge {edge}: color not reduced modulo {modulus} (residue {residue})")]
    ColorNotReduced {
        edge: EdgeId,
        residue: u32,
        modulus: u32,
    },
    #[error("edge {edge}: Z^2 coordinate exceeds |c| <= 2^30")]
    CoordinateOutOfBounds { edge: EdgeId },
    #[error("Z/kZ modulus must be at least 2 (got {0})")]
    InvalidModulus(u32),
}

/// An immutable colored directed multigraph.  Construction validates all
/// invariants; a `ColoredGraph` value is therefore always well formed and is
/// safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredGraph {
    group: Group,
    n: usize,
    edges: Vec<Edge>,
}

impl ColoredGraph {
    pub fn new(
        group: Group,
        n: usize,
        edges: Vec<(VertexId, VertexId, Color)>,
    ) -> Result<Self, GraphError> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(tail, head, color)| Edge { tail, head, color })
            .collect();
        let g = ColoredGraph { group, n, edges };
        g.validate()?;
        Ok(g)
    }

    /// Re-checks every structural invariant, reporting the first offending edge.
    pub fn validate(&self) -> Result<(), GraphError> {
        if let Group::Zk(k) = self.group {
            if k < 2 {
                return Err(GraphError::InvalidModulus(k));
            }
        }
        for (eid, e) in self.edges.iter().enumerate() {
            for endpoint in [e.tail, e.head] {
                if endpoint >= self.n {
                    return Err(GraphError::EndpointOutOfRange {
                        edge: eid,
                        endpoint,
                        n: self.n,
                    });
                }
            }
            match (self.group, e.color) {
                (Group::Z2, Color::Z2(x, y)) => {
                    if x.abs() > Z2_COORD_BOUND || y.abs() > Z2_COORD_BOUND {
                        return Err(GraphError::CoordinateOutOfBounds { edge: eid });
                    }
                }
                (Group::Zk(k), Color::Zk(r)) => {
                    if r >= k {
                        return Err(GraphError::ColorNotReduced {
                            edge: eid,
                            residue: r,
                            modulus: k,
                        });
                    }
                }
                _ => return Err(GraphError::ColorGroupMismatch { edge: eid }),
            }
        }
        Ok(())
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, eid: EdgeId) -> Edge {
        self.edges[eid]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// All edge ids, in input order.
    pub fn full_subset(&self) -> EdgeSubset {
        EdgeSubset::new((0..self.m()).collect())
    }
}

/// A set of edge ids of some parent graph.  Iteration order is the insertion
/// order (duplicates dropped); the spanned quantities are recomputed from the
/// set on demand, never cached.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSubset {
    ids: Vec<EdgeId>,
}

/// Spanned quantities of a subset: `m'` edges and the `n'` distinct endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned {
    pub n_prime: usize,
    pub m_prime: usize,
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
}

impl EdgeSubset {
    pub fn new(ids: Vec<EdgeId>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let ids = ids.into_iter().filter(|id| seen.insert(*id)).collect();
        EdgeSubset { ids }
    }

    pub fn ids(&self) -> &[EdgeId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.ids.contains(&id)
    }

    /// `n'`, `m'` and the spanned vertex set.
    pub fn spanned(&self, graph: &ColoredGraph) -> Spanned {
        let mut vertices: Vec<VertexId> = self
            .ids
            .iter()
            .flat_map(|&id| {
                let e = graph.edge(id);
                [e.tail, e.head]
            })
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        Spanned {
            n_prime: vertices.len(),
            m_prime: self.ids.len(),
            vertices,
        }
    }

    /// The colored subgraph on the spanned vertices, plus the re-indexing map.
    pub fn subgraph(&self, graph: &ColoredGraph) -> Subgraph {
        let spanned = self.spanned(graph);
        let old_of_new = spanned.vertices.clone();
        let new_of_old: HashMap<VertexId, VertexId> = old_of_new
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let edges: Vec<(VertexId, VertexId, Color)> = self
            .ids
            .iter()
            .map(|&id| {
                let e = graph.edge(id);
                (new_of_old[&e.tail], new_of_old[&e.head], e.color)
            })
            .collect();
        let graph = ColoredGraph::new(graph.group(), old_of_new.len(), edges)
            .expect("subgraph of a valid graph is valid");
        Subgraph {
            graph,
            old_of_new,
            new_of_old,
            old_edge_ids: self.ids.clone(),
        }
    }
}

impl From<Vec<EdgeId>> for EdgeSubset {
    fn from(ids: Vec<EdgeId>) -> Self {
        EdgeSubset::new(ids)
    }
}

/// Result of [`EdgeSubset::subgraph`]: the induced colored graph with a stable
/// vertex re-indexing (old vertex `old_of_new[v]` became `v`).
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: ColoredGraph,
    pub old_of_new: Vec<VertexId>,
    pub new_of_old: HashMap<VertexId, VertexId>,
    /// Parent edge id of each subgraph edge, in subgraph edge order.
    pub old_edge_ids: Vec<EdgeId>,
}

/// One rigid component: a maximal tight vertex set together with the tight
/// edge set the algorithm holds on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
    /// Sorted ascending.
    pub edges: Vec<EdgeId>,
}

/// Rigid components of a run, sorted by smallest member vertex.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentReport {
    pub components: Vec<Component>,
}

impl ComponentReport {
    /// Component vertex sets only, the basis-independent part of the report.
    pub fn vertex_sets(&self) -> Vec<Vec<VertexId>> {
        self.components.iter().map(|c| c.vertices.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2(x: i64, y: i64) -> Color {
        Color::Z2(x, y)
    }

    #[test]
    fn validate_well_formed() {
        let g = ColoredGraph::new(Group::Z2, 2, vec![(0, 1, z2(0, 0))]);
        assert!(g.is_ok());
    }

    #[test]
    fn validate_endpoint_out_of_range() {
        let err = ColoredGraph::new(Group::Z2, 2, vec![(0, 5, z2(0, 0))]).unwrap_err();
        assert_eq!(
            err,
            GraphError::EndpointOutOfRange {
                edge: 0,
                endpoint: 5,
                n: 2
            }
        );
    }

    #[test]
    fn validate_unreduced_residue() {
        let err = ColoredGraph::new(Group::Zk(3), 1, vec![(0, 0, Color::Zk(3))]).unwrap_err();
        assert_eq!(
            err,
            GraphError::ColorNotReduced {
                edge: 0,
                residue: 3,
                modulus: 3
            }
        );
    }

    #[test]
    fn validate_group_mismatch_and_bounds() {
        let err = ColoredGraph::new(Group::Z2, 1, vec![(0, 0, Color::Zk(0))]).unwrap_err();
        assert_eq!(err, GraphError::ColorGroupMismatch { edge: 0 });
        let err =
            ColoredGraph::new(Group::Z2, 1, vec![(0, 0, z2(Z2_COORD_BOUND + 1, 0))]).unwrap_err();
        assert_eq!(err, GraphError::CoordinateOutOfBounds { edge: 0 });
        let err = ColoredGraph::new(Group::Zk(1), 1, vec![]).unwrap_err();
        assert_eq!(err, GraphError::InvalidModulus(1));
    }

    #[test]
    fn spanned_quantities() {
        let g = ColoredGraph::new(
            Group::Z2,
            3,
            vec![(0, 1, z2(0, 0)), (0, 0, z2(1, 0))],
        )
        .unwrap();
        let s = EdgeSubset::new(vec![0]).spanned(&g);
        assert_eq!((s.n_prime, s.m_prime, s.vertices), (2, 1, vec![0, 1]));
        let s = EdgeSubset::new(vec![1]).spanned(&g);
        assert_eq!((s.n_prime, s.m_prime, s.vertices), (1, 1, vec![0]));
        let s = EdgeSubset::new(vec![]).spanned(&g);
        assert_eq!((s.n_prime, s.m_prime, s.vertices), (0, 0, vec![]));
    }

    #[test]
    fn subgraph_reindexes_stably() {
        let mut edges = vec![(3, 7, z2(0, 0)), (3, 7, z2(1, 0))];
        edges.extend([(0, 1, z2(0, 0))]);
        let g = ColoredGraph::new(Group::Z2, 10, edges).unwrap();
        let sub = EdgeSubset::new(vec![0, 1]).subgraph(&g);
        assert_eq!(sub.graph.n(), 2);
        assert_eq!(sub.graph.m(), 2);
        assert_eq!(sub.old_of_new, vec![3, 7]);
        assert_eq!(sub.new_of_old[&3], 0);
        assert_eq!(sub.new_of_old[&7], 1);

        let full = g.full_subset().subgraph(&g);
        assert_eq!(full.graph.m(), g.m());

        let empty = EdgeSubset::default().subgraph(&g);
        assert_eq!((empty.graph.n(), empty.graph.m()), (0, 0));
    }

    #[test]
    fn subgraph_roundtrips_spanned_counts() {
        let g = ColoredGraph::new(
            Group::Zk(4),
            5,
            vec![
                (0, 2, Color::Zk(1)),
                (2, 4, Color::Zk(3)),
                (4, 4, Color::Zk(0)),
            ],
        )
        .unwrap();
        let subset = EdgeSubset::new(vec![1, 2]);
        let parent = subset.spanned(&g);
        let sub = subset.subgraph(&g);
        let inner = sub.graph.full_subset().spanned(&sub.graph);
        assert_eq!(parent.n_prime, inner.n_prime);
        assert_eq!(parent.m_prime, inner.m_prime);
    }

    #[test]
    fn zk_arithmetic_reduces() {
        let g = Group::Zk(3);
        assert_eq!(g.add(Color::Zk(2), Color::Zk(2)), Color::Zk(1));
        assert_eq!(g.neg(Color::Zk(0)), Color::Zk(0));
        assert_eq!(g.neg(Color::Zk(1)), Color::Zk(2));
        assert!(g.is_identity(g.add(Color::Zk(1), Color::Zk(2))));
    }
}
