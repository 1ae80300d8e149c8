//! The k = 3 fast path: lift a `Z/3Z`-colored graph to its threefold
//! development, run the plain Laman pebble game there, and map the symmetric
//! rigid components back down.
//!
//! The development has vertices `(i, z)` for `z` in {0, 1, 2} and, for each
//! base edge `ij` with color `c`, the three undirected edges
//! `(i, z) -- (j, z + c mod 3)`.  Layer shifts `alpha_z` act freely on it;
//! a subgraph is symmetric when it coincides with its orbit, and the
//! symmetric Laman components are exactly the lifts of the cone-Laman rigid
//! components.

use crate::cone::{ConeVerdict, NotConeReason};
use crate::graph::{
    Color, ColoredGraph, Component, ComponentReport, EdgeId, EdgeSubset, Group, VertexId,
};
use crate::pebble::PebbleGame;
use crate::RunError;

/// The threefold lift of a `Z/3Z`-colored graph.  Lifted vertex `(i, z)` has
/// id `3i + z`; the fiber of base edge `e` is `{3e, 3e + 1, 3e + 2}`, layer
/// `z` of the fiber attaching at `(tail, z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Development {
    base_n: usize,
    base_m: usize,
    lifted_edges: Vec<(VertexId, VertexId)>,
}

impl Development {
    pub fn lifted_n(&self) -> usize {
        3 * self.base_n
    }

    pub fn lifted_m(&self) -> usize {
        self.lifted_edges.len()
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn base_m(&self) -> usize {
        self.base_m
    }

    pub fn lifted_edges(&self) -> &[(VertexId, VertexId)] {
        &self.lifted_edges
    }

    pub fn lifted_vertex(base: VertexId, layer: u32) -> VertexId {
        3 * base + layer as usize
    }

    pub fn base_of_vertex(lifted: VertexId) -> (VertexId, u32) {
        (lifted / 3, (lifted % 3) as u32)
    }

    pub fn vertex_fiber(&self, base: VertexId) -> [VertexId; 3] {
        [3 * base, 3 * base + 1, 3 * base + 2]
    }

    pub fn edge_fiber(&self, base: EdgeId) -> [EdgeId; 3] {
        [3 * base, 3 * base + 1, 3 * base + 2]
    }

    pub fn base_of_edge(lifted: EdgeId) -> EdgeId {
        lifted / 3
    }

    /// The layer-shift automorphism on vertices.
    pub fn alpha_vertex(z: u32, lifted: VertexId) -> VertexId {
        let (base, layer) = Self::base_of_vertex(lifted);
        Self::lifted_vertex(base, (layer + z) % 3)
    }

    /// The layer-shift automorphism on edges (fibers are closed under it).
    pub fn alpha_edge(z: u32, lifted: EdgeId) -> EdgeId {
        let base = lifted / 3;
        let layer = (lifted % 3) as u32;
        3 * base + ((layer + z) % 3) as usize
    }
}

fn require_z3(graph: &ColoredGraph) -> Result<(), RunError> {
    if graph.group() != Group::Zk(3) {
        return Err(RunError::GroupMismatch {
            expected: "zk 3",
            found: graph.group(),
        });
    }
    Ok(())
}

/// Builds the development; linear in the graph size.
pub fn develop(graph: &ColoredGraph) -> Result<Development, RunError> {
    require_z3(graph)?;
    let mut lifted_edges = Vec::with_capacity(3 * graph.m());
    for e in graph.edges() {
        let Color::Zk(c) = e.color else { unreachable!() };
        for z in 0..3u32 {
            lifted_edges.push((
                Development::lifted_vertex(e.tail, z),
                Development::lifted_vertex(e.head, (z + c) % 3),
            ));
        }
    }
    Ok(Development {
        base_n: graph.n(),
        base_m: graph.m(),
        lifted_edges,
    })
}

/// A subgraph of the development, as sorted vertex and edge id sets.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LiftedSubgraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

impl LiftedSubgraph {
    pub fn new(mut vertices: Vec<VertexId>, mut edges: Vec<EdgeId>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        edges.sort_unstable();
        edges.dedup();
        LiftedSubgraph { vertices, edges }
    }
}

/// Closure of a subgraph under the layer shifts.
pub fn orbit(sub: &LiftedSubgraph) -> LiftedSubgraph {
    let vertices = sub
        .vertices
        .iter()
        .flat_map(|&v| (0..3).map(move |z| Development::alpha_vertex(z, v)))
        .collect();
    let edges = sub
        .edges
        .iter()
        .flat_map(|&e| (0..3).map(move |z| Development::alpha_edge(z, e)))
        .collect();
    LiftedSubgraph::new(vertices, edges)
}

/// Whether the subgraph coincides with its orbit.  Closure under the single
/// shift `alpha_1` suffices, the action being cyclic of order three.
pub fn is_symmetric(sub: &LiftedSubgraph) -> bool {
    let shift_closed = |ids: &[usize], f: fn(u32, usize) -> usize| {
        let mut shifted: Vec<usize> = ids.iter().map(|&x| f(1, x)).collect();
        shifted.sort_unstable();
        shifted == ids
    };
    shift_closed(&sub.vertices, Development::alpha_vertex)
        && shift_closed(&sub.edges, Development::alpha_edge)
}

/// Base edges whose fiber intersects the lifted subgraph.
pub fn project(sub: &LiftedSubgraph) -> EdgeSubset {
    let mut base: Vec<EdgeId> = sub.edges.iter().map(|&e| Development::base_of_edge(e)).collect();
    base.sort_unstable();
    base.dedup();
    EdgeSubset::new(base)
}

/// Output of the development route: symmetric components projected to the
/// base graph, with the asymmetric development components kept aside as a
/// diagnostics channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone3Report {
    pub report: ComponentReport,
    /// Laman components of the development that are not symmetric, in lifted
    /// vertex/edge ids.
    pub asymmetric: Vec<Component>,
}

fn laman_game_on_development(dev: &Development) -> PebbleGame {
    let mut game = PebbleGame::new(3, dev.lifted_n().max(1)).expect("valid parameters");
    for (le, &(u, v)) in dev.lifted_edges().iter().enumerate() {
        game.try_insert(u, v, le);
    }
    game
}

/// Rigid components via the development: run the Laman pebble game on the
/// lift, keep the symmetric components, project them down.
pub fn cone3_components(graph: &ColoredGraph) -> Result<Cone3Report, RunError> {
    let dev = develop(graph)?;
    if graph.n() == 0 {
        return Ok(Cone3Report {
            report: ComponentReport::default(),
            asymmetric: Vec::new(),
        });
    }
    let game = laman_game_on_development(&dev);
    let mut components = Vec::new();
    let mut asymmetric = Vec::new();
    for comp in game.components().components {
        let sub = LiftedSubgraph::new(comp.vertices.clone(), comp.edges.clone());
        if !is_symmetric(&sub) {
            asymmetric.push(comp);
            continue;
        }
        let mut vertices: Vec<VertexId> = sub
            .vertices
            .iter()
            .map(|&v| Development::base_of_vertex(v).0)
            .collect();
        vertices.sort_unstable();
        vertices.dedup();
        let edges = project(&sub).ids().to_vec();
        components.push(Component { vertices, edges });
    }
    components.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Ok(Cone3Report {
        report: ComponentReport { components },
        asymmetric,
    })
}

/// Cone-Laman decision via the development: the lift must carry exactly
/// 2(3n) - 3 edges and the Laman game must accept all of them.
pub fn cone3_decide(graph: &ColoredGraph) -> Result<ConeVerdict, RunError> {
    let dev = develop(graph)?;
    let expected = 2 * graph.n() as i64 - 1;
    if graph.m() as i64 != expected {
        return Ok(ConeVerdict::NotConeLaman(NotConeReason::EdgeCount {
            m: graph.m(),
            expected,
        }));
    }
    let mut game = PebbleGame::new(3, dev.lifted_n().max(1)).expect("valid parameters");
    for (le, &(u, v)) in dev.lifted_edges().iter().enumerate() {
        if !game.try_insert(u, v, le) {
            return Ok(ConeVerdict::NotConeLaman(
                NotConeReason::DevelopmentEdgeRejected { lifted_edge: le },
            ));
        }
    }
    Ok(ConeVerdict::ConeLaman)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone;

    fn zk(r: u32) -> Color {
        Color::Zk(r)
    }

    fn graph(n: usize, edges: Vec<(usize, usize, Color)>) -> ColoredGraph {
        ColoredGraph::new(Group::Zk(3), n, edges).unwrap()
    }

    #[test]
    fn loop_colored_one_develops_to_triangle() {
        let g = graph(1, vec![(0, 0, zk(1))]);
        let dev = develop(&g).unwrap();
        assert_eq!(dev.lifted_n(), 3);
        assert_eq!(dev.lifted_edges(), &[(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn loop_colored_zero_develops_to_self_loops() {
        let g = graph(1, vec![(0, 0, zk(0))]);
        let dev = develop(&g).unwrap();
        assert_eq!(dev.lifted_edges(), &[(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn development_triples_sizes() {
        let g = graph(3, vec![(0, 1, zk(2)), (1, 2, zk(0)), (2, 0, zk(1))]);
        let dev = develop(&g).unwrap();
        assert_eq!(dev.lifted_n(), 3 * g.n());
        assert_eq!(dev.lifted_m(), 3 * g.m());
    }

    #[test]
    fn orbit_and_symmetry() {
        let g = graph(1, vec![(0, 0, zk(1))]);
        let dev = develop(&g).unwrap();
        // One triangle edge expands to the whole triangle.
        let one = LiftedSubgraph::new(vec![0, 1], vec![0]);
        let o = orbit(&one);
        assert_eq!(o.vertices, vec![0, 1, 2]);
        assert_eq!(o.edges, vec![0, 1, 2]);
        assert!(!is_symmetric(&one));
        assert!(is_symmetric(&o));
        // A full fiber is symmetric; a single lifted vertex is not.
        let fiber = LiftedSubgraph::new(dev.vertex_fiber(0).to_vec(), vec![]);
        assert!(is_symmetric(&fiber));
        assert!(!is_symmetric(&LiftedSubgraph::new(vec![1], vec![])));
    }

    #[test]
    fn project_cases() {
        let g = graph(2, vec![(0, 1, zk(1)), (0, 1, zk(2))]);
        let dev = develop(&g).unwrap();
        let full = LiftedSubgraph::new(
            (0..dev.lifted_n()).collect(),
            (0..dev.lifted_m()).collect(),
        );
        assert_eq!(project(&full).ids(), &[0, 1]);
        assert_eq!(project(&LiftedSubgraph::new(vec![], vec![3, 4, 5])).ids(), &[1]);
        assert!(project(&LiftedSubgraph::default()).is_empty());
    }

    #[test]
    fn cone3_loop_examples() {
        let good = graph(1, vec![(0, 0, zk(1))]);
        let report = cone3_components(&good).unwrap();
        assert_eq!(report.report.components.len(), 1);
        assert_eq!(report.report.components[0].vertices, vec![0]);
        assert_eq!(report.report.components[0].edges, vec![0]);
        assert!(cone3_decide(&good).unwrap().is_cone_laman());

        let zero = graph(1, vec![(0, 0, zk(0))]);
        assert!(cone3_components(&zero).unwrap().report.components.is_empty());
        assert!(!cone3_decide(&zero).unwrap().is_cone_laman());
    }

    #[test]
    fn matches_general_k_on_examples() {
        let cases = vec![
            graph(2, vec![(0, 1, zk(0)), (0, 1, zk(1)), (0, 1, zk(2))]),
            graph(2, vec![(0, 1, zk(0)), (0, 1, zk(0)), (0, 1, zk(1))]),
            graph(3, vec![(0, 1, zk(0)), (1, 2, zk(1)), (2, 0, zk(1)), (0, 0, zk(1))]),
        ];
        for g in cases {
            let dev_verdict = cone3_decide(&g).unwrap().is_cone_laman();
            let gen_verdict = cone::cone_decide(&g).unwrap().is_cone_laman();
            assert_eq!(dev_verdict, gen_verdict);
            let dev_comps = cone3_components(&g).unwrap().report.vertex_sets();
            let gen_comps = cone::cone_components(&g).unwrap().vertex_sets();
            assert_eq!(dev_comps, gen_comps);
        }
    }
}
