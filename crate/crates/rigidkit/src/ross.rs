//! Decision, extraction and rigid components for fixed-lattice (Ross)
//! sparsity, via a (2,3) and a (2,2) pebble game played in parallel.
//!
//! Edges are processed in input order.  For each edge `ij`:
//!
//! * (A) if `ij` lies in the span of a (2,2)-component, discard it;
//! * (B) if `ij` lies in no (2,3)-component span, insert it into both games;
//! * (C) otherwise take the fundamental Laman circuit of `ij`, add `ij`, and
//!   test its group image; discard on trivial image;
//! * (D) on non-trivial image insert `ij` into the (2,2) game.
//!
//! The components of the (2,2) game at the end are the rigid components.
//! The run itself is group-agnostic (the same counts define "Ross" over
//! `Z/kZ`, which the cone algorithms rely on); the `ross_*` wrappers insist
//! on `Z^2` input.

use crate::gamma;
use crate::graph::{ColoredGraph, ComponentReport, EdgeId, EdgeSubset, Group};
use crate::pebble::PebbleGame;
use crate::RunError;

/// Why an edge was discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RossDiscard {
    /// Both endpoints already inside one (2,2)-component.
    Span22,
    /// The fundamental Laman circuit through the edge has trivial image.
    TrivialCircuitImage,
    /// A loop spans one vertex and always violates m' <= 2n' - 2.
    Loop,
}

impl RossDiscard {
    pub fn as_str(&self) -> &'static str {
        match self {
            RossDiscard::Span22 => "span22",
            RossDiscard::TrivialCircuitImage => "trivial-circuit-image",
            RossDiscard::Loop => "loop",
        }
    }
}

/// One run of the parallel pebble games over a colored graph.
pub struct RossRun<'g> {
    graph: &'g ColoredGraph,
    game23: PebbleGame,
    game22: PebbleGame,
    kept: Vec<EdgeId>,
    discarded: Vec<(EdgeId, RossDiscard)>,
    cursor: usize,
}

impl<'g> RossRun<'g> {
    pub fn new(graph: &'g ColoredGraph) -> Self {
        let n = graph.n().max(1);
        RossRun {
            graph,
            game23: PebbleGame::new(3, n).expect("valid parameters"),
            game22: PebbleGame::new(2, n).expect("valid parameters"),
            kept: Vec::new(),
            discarded: Vec::new(),
            cursor: 0,
        }
    }

    /// Runs the full edge list.
    pub fn run(graph: &'g ColoredGraph) -> Self {
        let mut run = RossRun::new(graph);
        while run.step().is_some() {}
        run
    }

    pub fn kept(&self) -> &[EdgeId] {
        &self.kept
    }

    pub fn discarded(&self) -> &[(EdgeId, RossDiscard)] {
        &self.discarded
    }

    pub fn processed(&self) -> usize {
        self.cursor
    }

    /// The (2,2)-components of the kept sparse graph.
    pub fn components(&self) -> ComponentReport {
        self.game22.components()
    }

    /// Processes the next edge; `None` once the edge list is exhausted.
    pub fn step(&mut self) -> Option<(EdgeId, Result<(), RossDiscard>)> {
        if self.cursor >= self.graph.m() {
            return None;
        }
        let eid = self.cursor;
        self.cursor += 1;
        let outcome = self.process(eid);
        match outcome {
            Ok(()) => self.kept.push(eid),
            Err(reason) => self.discarded.push((eid, reason)),
        }
        Some((eid, outcome))
    }

    fn process(&mut self, eid: EdgeId) -> Result<(), RossDiscard> {
        let e = self.graph.edge(eid);
        let (i, j) = (e.tail, e.head);
        if i == j {
            // m' = 1 > 2n' - 2 = 0 no matter the color.
            return Err(RossDiscard::Loop);
        }
        if self.game22.in_component_span(i, j) {
            return Err(RossDiscard::Span22);
        }
        if !self.game23.in_component_span(i, j) {
            assert!(self.game23.try_insert(i, j, eid), "span-free edge is Laman-independent");
            assert!(self.game22.try_insert(i, j, eid), "span-free edge is (2,2)-independent");
            return Ok(());
        }
        let circuit = self
            .game23
            .fundamental_circuit(i, j, eid)
            .expect("edge spanned by a (2,3)-component is dependent");
        if gamma::is_trivial_image(self.graph, &EdgeSubset::new(circuit.edges)) {
            return Err(RossDiscard::TrivialCircuitImage);
        }
        assert!(self.game22.try_insert(i, j, eid), "edge outside every (2,2) span is independent");
        Ok(())
    }
}

/// Ross-sparsity of the whole edge set, over any abelian group.
pub fn ross_sparse(graph: &ColoredGraph) -> bool {
    RossRun::run(graph).discarded.is_empty()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RossVerdict {
    RossGraph,
    NotRoss(NotRossReason),
}

impl RossVerdict {
    pub fn is_ross(&self) -> bool {
        matches!(self, RossVerdict::RossGraph)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotRossReason {
    /// A Ross graph needs exactly 2n - 2 edges.
    EdgeCount { m: usize, expected: i64 },
    Discarded { edge: EdgeId, reason: RossDiscard },
}

fn require_z2(graph: &ColoredGraph) -> Result<(), RunError> {
    match graph.group() {
        Group::Z2 => Ok(()),
        found => Err(RunError::GroupMismatch {
            expected: "z2",
            found,
        }),
    }
}

/// Decides whether the input is a Ross graph (minimal rigidity), stopping at
/// the first discarded edge.
pub fn ross_decide(graph: &ColoredGraph) -> Result<RossVerdict, RunError> {
    require_z2(graph)?;
    Ok(decide_any_group(graph))
}

pub(crate) fn decide_any_group(graph: &ColoredGraph) -> RossVerdict {
    let expected = 2 * graph.n() as i64 - 2;
    if graph.m() as i64 != expected {
        return RossVerdict::NotRoss(NotRossReason::EdgeCount {
            m: graph.m(),
            expected,
        });
    }
    let mut run = RossRun::new(graph);
    while let Some((eid, outcome)) = run.step() {
        if let Err(reason) = outcome {
            return RossVerdict::NotRoss(NotRossReason::Discarded { edge: eid, reason });
        }
    }
    RossVerdict::RossGraph
}

/// Maximum Ross-independent edge subset, in kept order.
pub fn ross_extract(graph: &ColoredGraph) -> Result<EdgeSubset, RunError> {
    require_z2(graph)?;
    Ok(EdgeSubset::new(RossRun::run(graph).kept.clone()))
}

/// Rigid components (maximal subgraphs with m' = 2n' - 2 in the kept graph).
pub fn ross_components(graph: &ColoredGraph) -> Result<ComponentReport, RunError> {
    require_z2(graph)?;
    Ok(RossRun::run(graph).components())
}

/// Whether the input contains a spanning Ross graph, i.e. whether a generic
/// framework on it is rigid once redundant edges are allowed.
pub fn ross_decide_spanning(graph: &ColoredGraph) -> Result<bool, RunError> {
    require_z2(graph)?;
    let kept = RossRun::run(graph).kept.len() as i64;
    Ok(kept == 2 * graph.n() as i64 - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Color;

    fn z2(x: i64, y: i64) -> Color {
        Color::Z2(x, y)
    }

    fn graph(n: usize, edges: Vec<(usize, usize, Color)>) -> ColoredGraph {
        ColoredGraph::new(Group::Z2, n, edges).unwrap()
    }

    fn zero_k4() -> ColoredGraph {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, z2(0, 0)));
            }
        }
        graph(4, edges)
    }

    #[test]
    fn doubled_edge_plus_lone_edge_components() {
        let g = graph(
            4,
            vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0)), (2, 3, z2(0, 0))],
        );
        let report = ross_components(&g).unwrap();
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].vertices, vec![0, 1]);
        assert_eq!(report.components[0].edges, vec![0, 1]);
    }

    #[test]
    fn zero_k4_discards_the_sixth_edge() {
        let run = RossRun::run(&zero_k4());
        assert_eq!(run.kept(), &[0, 1, 2, 3, 4]);
        assert_eq!(run.discarded(), &[(5, RossDiscard::TrivialCircuitImage)]);
        assert!(run.components().components.is_empty());
    }

    #[test]
    fn empty_graph_has_no_components() {
        let g = graph(5, vec![]);
        assert!(ross_components(&g).unwrap().components.is_empty());
    }

    #[test]
    fn decide_examples() {
        assert!(ross_decide(&graph(1, vec![])).unwrap().is_ross());
        let doubled = graph(2, vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0))]);
        assert!(ross_decide(&doubled).unwrap().is_ross());
        assert_eq!(
            ross_decide(&zero_k4()).unwrap(),
            RossVerdict::NotRoss(NotRossReason::Discarded {
                edge: 5,
                reason: RossDiscard::TrivialCircuitImage
            })
        );
        assert_eq!(
            ross_decide(&graph(3, vec![])).unwrap(),
            RossVerdict::NotRoss(NotRossReason::EdgeCount { m: 0, expected: 4 })
        );
    }

    #[test]
    fn extract_examples() {
        let doubled = graph(2, vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0))]);
        assert_eq!(ross_extract(&doubled).unwrap().ids(), &[0, 1]);
        assert_eq!(ross_extract(&zero_k4()).unwrap().len(), 5);
        let triple = graph(
            2,
            vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0)), (0, 1, z2(0, 1))],
        );
        let run = RossRun::run(&triple);
        assert_eq!(run.kept(), &[0, 1]);
        assert_eq!(run.discarded(), &[(2, RossDiscard::Span22)]);
    }

    #[test]
    fn loops_are_never_kept() {
        let g = graph(2, vec![(0, 0, z2(1, 0)), (0, 1, z2(0, 0))]);
        let run = RossRun::run(&g);
        assert_eq!(run.kept(), &[1]);
        assert_eq!(run.discarded(), &[(0, RossDiscard::Loop)]);
    }

    #[test]
    fn wrong_group_is_rejected() {
        let g = ColoredGraph::new(Group::Zk(3), 1, vec![]).unwrap();
        assert!(matches!(
            ross_decide(&g),
            Err(RunError::GroupMismatch { expected: "z2", .. })
        ));
    }

    #[test]
    fn spanning_decision_tolerates_redundancy() {
        // A Ross graph plus one redundant parallel edge: not minimally rigid,
        // but it contains a spanning Ross graph.
        let g = graph(
            2,
            vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0)), (0, 1, z2(0, 1))],
        );
        assert!(!ross_decide(&g).unwrap().is_ross());
        assert!(ross_decide_spanning(&g).unwrap());
        assert!(!ross_decide_spanning(&zero_k4()).unwrap());
    }

    #[test]
    fn group_agnostic_sparsity_over_zk() {
        let g = ColoredGraph::new(
            Group::Zk(3),
            2,
            vec![(0, 1, Color::Zk(0)), (0, 1, Color::Zk(1))],
        )
        .unwrap();
        assert!(ross_sparse(&g));
        let bad = ColoredGraph::new(
            Group::Zk(3),
            2,
            vec![(0, 1, Color::Zk(1)), (0, 1, Color::Zk(1))],
        )
        .unwrap();
        assert!(!ross_sparse(&bad));
    }
}
