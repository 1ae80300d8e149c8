//! General-k cone-Laman algorithms for `Z/kZ`-colored graphs, via three
//! pebble games (l = 1, 2, 3) and a Ross-sparsity subroutine.
//!
//! Edges are processed in input order.  For each edge `ij`:
//!
//! * (A) inside a (2,1)-component span: discard;
//! * (B) outside every (2,3)-component span: insert into all three games;
//! * (C) outside every (2,2)-component span: keep iff the fundamental Laman
//!   circuit (probe included) has non-trivial image, then insert into the
//!   (2,1) and (2,2) games;
//! * (D) otherwise take the fundamental (2,2)-circuit `C` of the probe and
//!   keep iff `C - e` is Ross-sparse for every edge `e` of `C`, inserting
//!   into the (2,1) game on success.
//!
//! Loops short-circuit the middle steps: a zero-colored loop is its own
//! trivial-image Laman circuit, and a non-zero loop is independent exactly
//! when its vertex lies in no (2,1)-component.
//!
//! The rigid components are the (2,1)-components of the kept graph.

use crate::gamma;
use crate::graph::{ColoredGraph, ComponentReport, EdgeId, EdgeSubset, Group};
use crate::pebble::PebbleGame;
use crate::ross;
use crate::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeDiscard {
    /// Both endpoints already inside one (2,1)-component.
    Span21,
    /// The fundamental Laman circuit through the edge has trivial image.
    TrivialLamanCircuit,
    /// The fundamental (2,2)-circuit fails the one-edge-deletion Ross test.
    CircuitNotRossRobust,
}

impl ConeDiscard {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConeDiscard::Span21 => "span21",
            ConeDiscard::TrivialLamanCircuit => "trivial-laman-circuit",
            ConeDiscard::CircuitNotRossRobust => "circuit-not-ross-robust",
        }
    }
}

pub struct ConeRun<'g> {
    graph: &'g ColoredGraph,
    game21: PebbleGame,
    game22: PebbleGame,
    game23: PebbleGame,
    kept: Vec<EdgeId>,
    discarded: Vec<(EdgeId, ConeDiscard)>,
    cursor: usize,
}

impl<'g> ConeRun<'g> {
    pub fn new(graph: &'g ColoredGraph) -> Self {
        let n = graph.n().max(1);
        ConeRun {
            graph,
            game21: PebbleGame::new(1, n).expect("valid parameters"),
            game22: PebbleGame::new(2, n).expect("valid parameters"),
            game23: PebbleGame::new(3, n).expect("valid parameters"),
            kept: Vec::new(),
            discarded: Vec::new(),
            cursor: 0,
        }
    }

    pub fn run(graph: &'g ColoredGraph) -> Self {
        let mut run = ConeRun::new(graph);
        while run.step().is_some() {}
        run
    }

    pub fn kept(&self) -> &[EdgeId] {
        &self.kept
    }

    pub fn discarded(&self) -> &[(EdgeId, ConeDiscard)] {
        &self.discarded
    }

    /// The (2,1)-components of the kept sparse graph.
    pub fn components(&self) -> ComponentReport {
        self.game21.components()
    }

    pub fn step(&mut self) -> Option<(EdgeId, Result<(), ConeDiscard>)> {
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

    fn process(&mut self, eid: EdgeId) -> Result<(), ConeDiscard> {
        let e = self.graph.edge(eid);
        let (i, j) = (e.tail, e.head);
        let group = self.graph.group();
        if i == j {
            if group.is_identity(e.color) {
                return Err(ConeDiscard::TrivialLamanCircuit);
            }
            if self.game21.in_component_span(i, i) {
                return Err(ConeDiscard::Span21);
            }
            assert!(
                self.game21.try_insert(i, i, eid),
                "loop outside every (2,1) span is independent"
            );
            return Ok(());
        }
        if self.game21.in_component_span(i, j) {
            return Err(ConeDiscard::Span21);
        }
        if !self.game23.in_component_span(i, j) {
            assert!(self.game23.try_insert(i, j, eid), "Laman-independent edge");
            assert!(self.game22.try_insert(i, j, eid), "(2,2)-independent edge");
            assert!(self.game21.try_insert(i, j, eid), "(2,1)-independent edge");
            return Ok(());
        }
        if !self.game22.in_component_span(i, j) {
            let circuit = self
                .game23
                .fundamental_circuit(i, j, eid)
                .expect("edge spanned by a (2,3)-component is dependent");
            if gamma::is_trivial_image(self.graph, &EdgeSubset::new(circuit.edges)) {
                return Err(ConeDiscard::TrivialLamanCircuit);
            }
            assert!(self.game22.try_insert(i, j, eid), "(2,2)-independent edge");
            assert!(self.game21.try_insert(i, j, eid), "(2,1)-independent edge");
            return Ok(());
        }
        let circuit = self
            .game22
            .fundamental_circuit(i, j, eid)
            .expect("edge spanned by a (2,2)-component is dependent");
        let robust = circuit.edges.iter().all(|&omit| {
            let rest: Vec<EdgeId> = circuit
                .edges
                .iter()
                .copied()
                .filter(|&f| f != omit)
                .collect();
            let sub = EdgeSubset::new(rest).subgraph(self.graph);
            ross::ross_sparse(&sub.graph)
        });
        if !robust {
            return Err(ConeDiscard::CircuitNotRossRobust);
        }
        assert!(self.game21.try_insert(i, j, eid), "(2,1)-independent edge");
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConeVerdict {
    ConeLaman,
    NotConeLaman(NotConeReason),
}

impl ConeVerdict {
    pub fn is_cone_laman(&self) -> bool {
        matches!(self, ConeVerdict::ConeLaman)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotConeReason {
    /// A cone-Laman graph needs exactly 2n - 1 edges.
    EdgeCount { m: usize, expected: i64 },
    Discarded { edge: EdgeId, reason: ConeDiscard },
    /// k = 3 development route: a lifted edge failed the Laman game.
    DevelopmentEdgeRejected { lifted_edge: EdgeId },
}

fn require_zk(graph: &ColoredGraph) -> Result<u32, RunError> {
    match graph.group() {
        Group::Zk(k) => Ok(k),
        found => Err(RunError::GroupMismatch {
            expected: "zk",
            found,
        }),
    }
}

pub fn cone_decide(graph: &ColoredGraph) -> Result<ConeVerdict, RunError> {
    require_zk(graph)?;
    let expected = 2 * graph.n() as i64 - 1;
    if graph.m() as i64 != expected {
        return Ok(ConeVerdict::NotConeLaman(NotConeReason::EdgeCount {
            m: graph.m(),
            expected,
        }));
    }
    let mut run = ConeRun::new(graph);
    while let Some((eid, outcome)) = run.step() {
        if let Err(reason) = outcome {
            return Ok(ConeVerdict::NotConeLaman(NotConeReason::Discarded {
                edge: eid,
                reason,
            }));
        }
    }
    Ok(ConeVerdict::ConeLaman)
}

pub fn cone_extract(graph: &ColoredGraph) -> Result<EdgeSubset, RunError> {
    require_zk(graph)?;
    Ok(EdgeSubset::new(ConeRun::run(graph).kept.clone()))
}

pub fn cone_components(graph: &ColoredGraph) -> Result<ComponentReport, RunError> {
    require_zk(graph)?;
    Ok(ConeRun::run(graph).components())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Color;

    fn zk(r: u32) -> Color {
        Color::Zk(r)
    }

    fn graph(k: u32, n: usize, edges: Vec<(usize, usize, Color)>) -> ColoredGraph {
        ColoredGraph::new(Group::Zk(k), n, edges).unwrap()
    }

    #[test]
    fn z5_triple_parallel_is_one_component() {
        let g = graph(5, 2, vec![(0, 1, zk(0)), (0, 1, zk(1)), (0, 1, zk(2))]);
        let report = cone_components(&g).unwrap();
        assert_eq!(report.components.len(), 1);
        assert_eq!(report.components[0].vertices, vec![0, 1]);
        assert_eq!(report.components[0].edges, vec![0, 1, 2]);
        assert!(cone_decide(&g).unwrap().is_cone_laman());
    }

    #[test]
    fn doubled_zero_edge_discards_at_step_c() {
        let g = graph(5, 2, vec![(0, 1, zk(0)), (0, 1, zk(0)), (0, 1, zk(1))]);
        let run = ConeRun::run(&g);
        assert_eq!(run.kept(), &[0, 2]);
        assert_eq!(run.discarded(), &[(1, ConeDiscard::TrivialLamanCircuit)]);
    }

    /// A (2,1)-graph whose all-zero K4 sits inside a (2,2)-circuit: the edge
    /// completing K4 reaches step (D) and fails the robustness test there.
    #[test]
    fn zero_k4_inside_22_circuit_fails_step_d() {
        let mut edges = vec![(0, 1, zk(0)), (0, 1, zk(1))];
        edges.extend([
            (0, 2, zk(0)),
            (0, 3, zk(0)),
            (1, 2, zk(0)),
            (1, 3, zk(0)),
            (2, 3, zk(0)),
        ]);
        let g = graph(3, 4, edges);
        let run = ConeRun::run(&g);
        assert_eq!(run.discarded(), &[(6, ConeDiscard::CircuitNotRossRobust)]);
        assert!(!cone_decide(&g).unwrap().is_cone_laman());
    }

    #[test]
    fn loop_decisions() {
        let good = graph(3, 1, vec![(0, 0, zk(1))]);
        assert!(cone_decide(&good).unwrap().is_cone_laman());
        assert_eq!(
            cone_components(&good).unwrap().components,
            vec![crate::graph::Component {
                vertices: vec![0],
                edges: vec![0]
            }]
        );

        let zero_loop = graph(3, 1, vec![(0, 0, zk(0))]);
        assert_eq!(
            cone_decide(&zero_loop).unwrap(),
            ConeVerdict::NotConeLaman(NotConeReason::Discarded {
                edge: 0,
                reason: ConeDiscard::TrivialLamanCircuit
            })
        );

        let empty = graph(4, 1, vec![]);
        assert_eq!(
            cone_decide(&empty).unwrap(),
            ConeVerdict::NotConeLaman(NotConeReason::EdgeCount { m: 0, expected: 1 })
        );
    }

    #[test]
    fn second_loop_hits_span21() {
        let g = graph(5, 1, vec![(0, 0, zk(1)), (0, 0, zk(2))]);
        let run = ConeRun::run(&g);
        assert_eq!(run.kept(), &[0]);
        assert_eq!(run.discarded(), &[(1, ConeDiscard::Span21)]);
    }

    #[test]
    fn wrong_group_is_rejected() {
        let g = ColoredGraph::new(Group::Z2, 1, vec![]).unwrap();
        assert!(matches!(
            cone_decide(&g),
            Err(RunError::GroupMismatch { expected: "zk", .. })
        ));
    }
}
