//! Deciding whether the group image of the cycle map on a colored graph is
//! trivial, in time linear in the subgraph size.
//!
//! The cycle map sends a traversed cycle to the sum of forward edge colors
//! minus the sum of backward edge colors.  Its image is trivial iff it is
//! trivial on every fundamental cycle of any spanning forest, so the test
//! builds a rooted spanning forest, accumulates a potential `sigma[v]` (the
//! signed color sum along the root-to-`v` tree path), and evaluates each
//! non-tree edge `ij` with color `g` as `sigma[i] + g - sigma[j]`, routed
//! through the least common ancestor of `i` and `j`.  LCA queries are O(1)
//! after preprocessing, via an Euler tour with a sparse-table range-minimum
//! index.

use thiserror::Error;

use crate::graph::{Color, ColoredGraph, EdgeId, EdgeSubset, Group, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GammaError {
    #[error("vertices {i} and {j} lie in different forest components")]
    DifferentComponents { i: VertexId, j: VertexId },
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: VertexId, n: usize },
}

/// Neighbor scan order used when growing the spanning forest.  The image
/// answer is forest-independent; the alternate order exists so tests can
/// check exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOrder {
    EdgeList,
    ReversedEdgeList,
}

/// How a tree edge relates to the root-to-child path through it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParentLink {
    pub parent: VertexId,
    pub edge: EdgeId,
    /// True if the stored edge points from parent to child, i.e. the edge is
    /// traversed forwards on the root-to-child path.
    pub forward: bool,
}

/// Rooted spanning forest of a colored graph with per-vertex potentials and a
/// constant-time LCA index.
#[derive(Debug, Clone)]
pub struct ForestIndex {
    group: Group,
    m: usize,
    parent: Vec<Option<ParentLink>>,
    comp: Vec<u32>,
    roots: Vec<VertexId>,
    sigma: Vec<Color>,
    depth: Vec<u32>,
    is_tree_edge: Vec<bool>,
    euler_vertex: Vec<u32>,
    euler_depth: Vec<u32>,
    first_pos: Vec<u32>,
    // sparse[j][i] = euler position of the minimum depth in [i, i + 2^j)
    sparse: Vec<Vec<u32>>,
}

impl ForestIndex {
    /// Spanning forest by breadth-first search from the lowest-index vertex of
    /// each component, neighbors scanned in edge-list order.
    pub fn build(graph: &ColoredGraph) -> Self {
        Self::build_with_order(graph, ScanOrder::EdgeList)
    }

    pub fn build_with_order(graph: &ColoredGraph, order: ScanOrder) -> Self {
        let n = graph.n();
        let group = graph.group();

        // (neighbor, edge id, stored-forward flag) per vertex, insertion order
        // following the edge list.
        let mut adj: Vec<Vec<(u32, u32, bool)>> = vec![Vec::new(); n];
        let push = |adj: &mut Vec<Vec<(u32, u32, bool)>>, eid: usize| {
            let e = graph.edge(eid);
            adj[e.tail].push((e.head as u32, eid as u32, true));
            if e.tail != e.head {
                adj[e.head].push((e.tail as u32, eid as u32, false));
            }
        };
        match order {
            ScanOrder::EdgeList => (0..graph.m()).for_each(|e| push(&mut adj, e)),
            ScanOrder::ReversedEdgeList => (0..graph.m()).rev().for_each(|e| push(&mut adj, e)),
        }

        let mut parent: Vec<Option<ParentLink>> = vec![None; n];
        let mut comp = vec![u32::MAX; n];
        let mut roots = Vec::new();
        let mut sigma = vec![group.identity(); n];
        let mut depth = vec![0u32; n];
        let mut is_tree_edge = vec![false; graph.m()];
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); n];

        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            let comp_id = roots.len() as u32;
            roots.push(start);
            comp[start] = comp_id;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &(w, eid, forward) in &adj[v] {
                    let w = w as usize;
                    if comp[w] != u32::MAX {
                        continue;
                    }
                    comp[w] = comp_id;
                    is_tree_edge[eid as usize] = true;
                    parent[w] = Some(ParentLink {
                        parent: v,
                        edge: eid as usize,
                        forward,
                    });
                    let c = graph.edge(eid as usize).color;
                    sigma[w] = if forward {
                        group.add(sigma[v], c)
                    } else {
                        group.sub(sigma[v], c)
                    };
                    depth[w] = depth[v] + 1;
                    children[v].push(w as u32);
                    queue.push_back(w);
                }
            }
        }

        // Euler tour of each tree, concatenated.
        let tour_len = if n == 0 { 0 } else { 2 * n - roots.len() };
        let mut euler_vertex = Vec::with_capacity(tour_len);
        let mut euler_depth = Vec::with_capacity(tour_len);
        let mut first_pos = vec![0u32; n];
        let mut stack: Vec<(u32, u32)> = Vec::new();
        for &root in &roots {
            first_pos[root] = euler_vertex.len() as u32;
            euler_vertex.push(root as u32);
            euler_depth.push(depth[root]);
            stack.push((root as u32, 0));
            while let Some((v, ci)) = stack.pop() {
                let v_us = v as usize;
                if (ci as usize) < children[v_us].len() {
                    stack.push((v, ci + 1));
                    let c = children[v_us][ci as usize];
                    first_pos[c as usize] = euler_vertex.len() as u32;
                    euler_vertex.push(c);
                    euler_depth.push(depth[c as usize]);
                    stack.push((c, 0));
                } else if let Some(&(p, _)) = stack.last() {
                    euler_vertex.push(p);
                    euler_depth.push(depth[p as usize]);
                }
            }
        }
        debug_assert_eq!(euler_vertex.len(), tour_len);

        let sparse = build_sparse(&euler_depth);

        ForestIndex {
            group,
            m: graph.m(),
            parent,
            comp,
            roots,
            sigma,
            depth,
            is_tree_edge,
            euler_vertex,
            euler_depth,
            first_pos,
            sparse,
        }
    }

    pub fn sigma(&self, v: VertexId) -> Color {
        self.sigma[v]
    }

    pub fn depth(&self, v: VertexId) -> u32 {
        self.depth[v]
    }

    pub fn parent_link(&self, v: VertexId) -> Option<ParentLink> {
        self.parent[v]
    }

    pub fn root_of(&self, v: VertexId) -> VertexId {
        self.roots[self.comp[v] as usize]
    }

    pub fn same_component(&self, i: VertexId, j: VertexId) -> bool {
        self.comp[i] == self.comp[j]
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.is_tree_edge[e]
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GammaError> {
        if v >= self.comp.len() {
            return Err(GammaError::VertexOutOfRange {
                v,
                n: self.comp.len(),
            });
        }
        Ok(())
    }

    /// Least common ancestor of `i` and `j` in their rooted tree.
    pub fn lca(&self, i: VertexId, j: VertexId) -> Result<VertexId, GammaError> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if self.comp[i] != self.comp[j] {
            return Err(GammaError::DifferentComponents { i, j });
        }
        let (l, r) = {
            let a = self.first_pos[i];
            let b = self.first_pos[j];
            (a.min(b) as usize, a.max(b) as usize)
        };
        let pos = self.range_min_pos(l, r);
        Ok(self.euler_vertex[pos] as usize)
    }

    fn range_min_pos(&self, l: usize, r: usize) -> usize {
        let level = usize::BITS as usize - 1 - (r - l + 1).leading_zeros() as usize;
        let a = self.sparse[level][l] as usize;
        let b = self.sparse[level][r + 1 - (1 << level)] as usize;
        if self.euler_depth[a] <= self.euler_depth[b] {
            a
        } else {
            b
        }
    }

    /// Image of the fundamental cycle of edge `(i, j, color)` with respect to
    /// this forest, the non-tree edge traversed from `i` to `j`:
    /// `(sigma_i - sigma_a) + color - (sigma_j - sigma_a)` for `a = lca(i, j)`.
    pub fn fundamental_cycle_image(
        &self,
        i: VertexId,
        j: VertexId,
        color: Color,
    ) -> Result<Color, GammaError> {
        let a = self.lca(i, j)?;
        let g = &self.group;
        let up = g.sub(self.sigma[i], self.sigma[a]);
        let down = g.sub(self.sigma[j], self.sigma[a]);
        Ok(g.sub(g.add(up, color), down))
    }

    /// Whether every fundamental cycle of `graph` with respect to this forest
    /// has identity image.  The forest must have been built from `graph`.
    pub fn trivial_image(&self, graph: &ColoredGraph) -> bool {
        assert_eq!(graph.m(), self.m, "forest built from a different graph");
        for (eid, e) in graph.edges().iter().enumerate() {
            if self.is_tree_edge[eid] {
                continue;
            }
            let image = self
                .fundamental_cycle_image(e.tail, e.head, e.color)
                .expect("endpoints of one edge share a component");
            if !self.group.is_identity(image) {
                return false;
            }
        }
        true
    }
}

fn build_sparse(euler_depth: &[u32]) -> Vec<Vec<u32>> {
    let len = euler_depth.len();
    if len == 0 {
        return Vec::new();
    }
    let levels = usize::BITS as usize - len.leading_zeros() as usize;
    let mut sparse: Vec<Vec<u32>> = Vec::with_capacity(levels);
    sparse.push((0..len as u32).collect());
    for j in 1..levels {
        let half = 1usize << (j - 1);
        let width = 1usize << j;
        let prev = &sparse[j - 1];
        let mut row = Vec::with_capacity(len - width + 1);
        for i in 0..=(len - width) {
            let a = prev[i];
            let b = prev[i + half];
            row.push(if euler_depth[a as usize] <= euler_depth[b as usize] {
                a
            } else {
                b
            });
        }
        sparse.push(row);
    }
    sparse
}

/// Whether the group image of the subgraph spanned by `subset` is trivial.
/// Runs in time proportional to the subgraph size, not the parent graph size.
pub fn is_trivial_image(graph: &ColoredGraph, subset: &EdgeSubset) -> bool {
    if subset.is_empty() {
        return true;
    }
    let sub = subset.subgraph(graph);
    let index = ForestIndex::build(&sub.graph);
    index.trivial_image(&sub.graph)
}

/// Image triviality of each connected component of the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentImage {
    pub root: VertexId,
    /// Sorted ascending.
    pub vertices: Vec<VertexId>,
    pub trivial: bool,
}

/// Per-component image report over the whole graph.
pub fn component_image_report(graph: &ColoredGraph) -> Vec<ComponentImage> {
    let index = ForestIndex::build(graph);
    let mut trivial = vec![true; index.roots.len()];
    for (eid, e) in graph.edges().iter().enumerate() {
        if index.is_tree_edge[eid] {
            continue;
        }
        let image = index
            .fundamental_cycle_image(e.tail, e.head, e.color)
            .expect("edge endpoints share a component");
        if !graph.group().is_identity(image) {
            trivial[index.comp[e.tail] as usize] = false;
        }
    }
    let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); index.roots.len()];
    for v in 0..graph.n() {
        members[index.comp[v] as usize].push(v);
    }
    index
        .roots
        .iter()
        .enumerate()
        .map(|(c, &root)| ComponentImage {
            root,
            vertices: members[c].clone(),
            trivial: trivial[c],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Group;

    fn z2(x: i64, y: i64) -> Color {
        Color::Z2(x, y)
    }

    fn graph_z2(n: usize, edges: Vec<(usize, usize, Color)>) -> ColoredGraph {
        ColoredGraph::new(Group::Z2, n, edges).unwrap()
    }

    #[test]
    fn sigma_follows_path_sums() {
        // r=0 -> a=1 with (1,0), a -> b=2 with (0,1)
        let g = graph_z2(3, vec![(0, 1, z2(1, 0)), (1, 2, z2(0, 1))]);
        let f = ForestIndex::build(&g);
        assert_eq!(f.sigma(0), z2(0, 0));
        assert_eq!(f.sigma(1), z2(1, 0));
        assert_eq!(f.sigma(2), z2(1, 1));
        assert_eq!(f.root_of(2), 0);
    }

    #[test]
    fn sigma_negates_against_storage_direction() {
        // Tree edge stored b -> r, so the root-to-b path traverses it backwards.
        let g = graph_z2(2, vec![(1, 0, z2(3, 5))]);
        let f = ForestIndex::build(&g);
        assert_eq!(f.sigma(0), z2(0, 0));
        assert_eq!(f.sigma(1), z2(-3, -5));
        let link = f.parent_link(1).unwrap();
        assert!(!link.forward);
    }

    #[test]
    fn isolated_vertices_form_singleton_trees() {
        let g = graph_z2(3, vec![]);
        let f = ForestIndex::build(&g);
        for v in 0..3 {
            assert_eq!(f.sigma(v), z2(0, 0));
            assert_eq!(f.root_of(v), v);
        }
        assert!(f.lca(0, 1).is_err());
    }

    #[test]
    fn lca_basics() {
        // Balanced binary tree on 7 vertices.
        let g = graph_z2(
            7,
            vec![
                (0, 1, z2(0, 0)),
                (0, 2, z2(0, 0)),
                (1, 3, z2(0, 0)),
                (1, 4, z2(0, 0)),
                (2, 5, z2(0, 0)),
                (2, 6, z2(0, 0)),
            ],
        );
        let f = ForestIndex::build(&g);
        assert_eq!(f.lca(0, 4).unwrap(), 0);
        assert_eq!(f.lca(5, 5).unwrap(), 5);
        // Two leaves under different children of the root meet at the root.
        assert_eq!(f.lca(3, 5).unwrap(), 0);
        assert_eq!(f.lca(3, 4).unwrap(), 1);
    }

    #[test]
    fn cycle_image_matches_direct_walk() {
        // Tree edges r->i and r->j, both colored (1,0); probe i->j with (0,0).
        let g = graph_z2(3, vec![(0, 1, z2(1, 0)), (0, 2, z2(1, 0))]);
        let f = ForestIndex::build(&g);
        assert_eq!(f.fundamental_cycle_image(1, 2, z2(0, 0)).unwrap(), z2(0, 0));
        assert_eq!(f.fundamental_cycle_image(1, 2, z2(2, 1)).unwrap(), z2(2, 1));
    }

    #[test]
    fn loop_image_is_its_color() {
        let g = ColoredGraph::new(Group::Zk(3), 1, vec![(0, 0, Color::Zk(1))]).unwrap();
        let f = ForestIndex::build(&g);
        assert_eq!(
            f.fundamental_cycle_image(0, 0, Color::Zk(1)).unwrap(),
            Color::Zk(1)
        );
        assert!(!is_trivial_image(&g, &g.full_subset()));
    }

    #[test]
    fn parallel_equal_color_cancels() {
        let g = graph_z2(2, vec![(0, 1, z2(4, -2)), (0, 1, z2(4, -2))]);
        let f = ForestIndex::build(&g);
        assert_eq!(f.fundamental_cycle_image(0, 1, z2(4, -2)).unwrap(), z2(0, 0));
        assert!(is_trivial_image(&g, &g.full_subset()));
    }

    #[test]
    fn zero_colored_k4_is_trivial() {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, z2(0, 0)));
            }
        }
        let g = graph_z2(4, edges);
        assert!(is_trivial_image(&g, &g.full_subset()));
    }

    #[test]
    fn doubled_edge_with_distinct_colors_is_nontrivial() {
        let g = graph_z2(2, vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0))]);
        assert!(!is_trivial_image(&g, &g.full_subset()));
    }

    #[test]
    fn forests_are_trivial() {
        let g = graph_z2(4, vec![(0, 1, z2(5, 7)), (1, 2, z2(-1, 3)), (0, 3, z2(2, 2))]);
        assert!(is_trivial_image(&g, &g.full_subset()));
    }

    #[test]
    fn subset_image_ignores_other_edges() {
        let g = graph_z2(
            3,
            vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0)), (1, 2, z2(0, 0))],
        );
        assert!(!is_trivial_image(&g, &EdgeSubset::new(vec![0, 1])));
        assert!(is_trivial_image(&g, &EdgeSubset::new(vec![0, 2])));
        assert!(is_trivial_image(&g, &EdgeSubset::default()));
    }

    #[test]
    fn component_report_splits_by_component() {
        let g = graph_z2(
            5,
            vec![
                (0, 1, z2(0, 0)),
                (0, 1, z2(1, 0)),
                (2, 3, z2(0, 0)),
                (2, 3, z2(0, 0)),
            ],
        );
        let report = component_image_report(&g);
        assert_eq!(report.len(), 3);
        assert!(!report[0].trivial);
        assert_eq!(report[0].vertices, vec![0, 1]);
        assert!(report[1].trivial);
        assert_eq!(report[1].vertices, vec![2, 3]);
        assert!(report[2].trivial);
        assert_eq!(report[2].vertices, vec![4]);
    }
}
