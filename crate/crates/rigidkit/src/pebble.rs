//! Generic (2, l) pebble game for l in {1, 2, 3}.
//!
//! The game maintains an orientation of the accepted edges in which every
//! vertex satisfies `pebbles[v] + out_degree(v) == 2`.  An edge `ij` is
//! accepted iff `l + 1` pebbles can be gathered onto its endpoints by
//! reversing directed paths to free pebbles; acceptance consumes one pebble
//! at the chosen tail.  The accepted edge set is then always (2, l)-sparse,
//! and three queries come along for free:
//!
//! * span: is `ij` inside a registered tight component? (O(1) pair table)
//! * insertion with component maintenance (reverse reachability search)
//! * fundamental circuit of a rejected probe (forward reachability after
//!   maximal gathering)
//!
//! Failed insertions and circuit queries restore the state exactly, so a
//! rejection is observationally free.

use thiserror::Error;

use crate::graph::{Component, ComponentReport, EdgeId, VertexId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PebbleError {
    #[error("sparsity parameter l must be 1, 2 or 3 (got {0})")]
    InvalidEll(usize),
    #[error("vertex count must be at least 1")]
    EmptyVertexSet,
    #[error("vertex {v} out of range (n = {n})")]
    VertexOutOfRange { v: VertexId, n: usize },
    #[error("probe ({i}, {j}) is insertable and has no fundamental circuit")]
    ProbeInsertable { i: VertexId, j: VertexId },
}

/// The fundamental (2, l)-circuit of a rejected probe: the unique edge-minimal
/// non-sparse subset of accepted-plus-probe containing the probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitReport {
    /// Caller labels of the circuit edges, probe included, sorted ascending.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct OutEdge {
    head: u32,
    label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct RegisteredComponent {
    vertices: Vec<VertexId>,
    alive: bool,
}

/// State of one (2, l) pebble game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PebbleGame {
    ell: usize,
    n: usize,
    pebbles: Vec<u8>,
    out: Vec<Vec<OutEdge>>,
    /// Accepted edges as given by the caller (undirected semantics).
    accepted: Vec<(VertexId, VertexId, EdgeId)>,
    components: Vec<RegisteredComponent>,
    /// Component ids per vertex; for l = 3 a vertex may belong to several.
    membership: Vec<Vec<u32>>,
    /// Row-major bit table: both endpoints inside one registered component.
    pair_bits: Vec<u64>,
}

enum Undo {
    // Edge moved from out[from][slot] to the end of out[to]; pebble moved
    // from `to` to `from`.
    Flip {
        from: u32,
        slot: u32,
        to: u32,
    },
}

impl PebbleGame {
    pub fn new(ell: usize, n: usize) -> Result<Self, PebbleError> {
        if !(1..=3).contains(&ell) {
            return Err(PebbleError::InvalidEll(ell));
        }
        if n == 0 {
            return Err(PebbleError::EmptyVertexSet);
        }
        let words = (n * n + 63) / 64;
        Ok(PebbleGame {
            ell,
            n,
            pebbles: vec![2; n],
            out: vec![Vec::new(); n],
            accepted: Vec::new(),
            components: Vec::new(),
            membership: vec![Vec::new(); n],
            pair_bits: vec![0; words],
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pebbles(&self, v: VertexId) -> u8 {
        self.pebbles[v]
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted.len()
    }

    pub fn accepted_labels(&self) -> Vec<EdgeId> {
        self.accepted.iter().map(|&(_, _, l)| l).collect()
    }

    fn pair_set(&mut self, i: VertexId, j: VertexId) {
        let idx = i * self.n + j;
        self.pair_bits[idx / 64] |= 1 << (idx % 64);
    }

    fn pair_get(&self, i: VertexId, j: VertexId) -> bool {
        let idx = i * self.n + j;
        self.pair_bits[idx / 64] >> (idx % 64) & 1 == 1
    }

    /// O(1) span query: both endpoints inside one registered component.  For a
    /// loop probe (`i == j`) this is "some component contains `i`".
    pub fn in_component_span(&self, i: VertexId, j: VertexId) -> bool {
        self.pair_get(i, j)
    }

    /// Attempts to insert edge `(i, j)` carrying the caller label `label`.
    /// Returns true and updates components iff the accepted set stays
    /// (2, l)-sparse; otherwise the state is left exactly as it was.
    pub fn try_insert(&mut self, i: VertexId, j: VertexId, label: EdgeId) -> bool {
        assert!(i < self.n && j < self.n, "vertex out of range");
        let accepted = if i == j {
            self.try_insert_loop(i, label)
        } else {
            self.try_insert_edge(i, j, label)
        };
        debug_assert!(self.audit().is_ok(), "{:?}", self.audit());
        accepted
    }

    fn try_insert_loop(&mut self, v: VertexId, label: EdgeId) -> bool {
        // A loop spans one vertex: m' = 1 <= 2 - l holds only for l = 1,
        // and then needs both pebbles present on v.
        if self.ell != 1 {
            return false;
        }
        let mut log = Vec::new();
        while self.pebbles[v] < 2 {
            if !self.gather_one(v, v, v, &mut log) {
                self.undo(log);
                return false;
            }
        }
        self.pebbles[v] -= 1;
        self.out[v].push(OutEdge {
            head: v as u32,
            label: label as u32,
        });
        self.accepted.push((v, v, label));
        self.detect_component(v, v);
        true
    }

    fn try_insert_edge(&mut self, i: VertexId, j: VertexId, label: EdgeId) -> bool {
        let target = self.ell + 1;
        let mut log = Vec::new();
        while (self.pebbles[i] + self.pebbles[j]) < target as u8 {
            let progressed = (self.pebbles[i] < 2 && self.gather_one(i, i, j, &mut log))
                || (self.pebbles[j] < 2 && self.gather_one(j, i, j, &mut log));
            if !progressed {
                self.undo(log);
                return false;
            }
        }
        let tail = if self.pebbles[i] > 0 { i } else { j };
        let head = if tail == i { j } else { i };
        self.pebbles[tail] -= 1;
        self.out[tail].push(OutEdge {
            head: head as u32,
            label: label as u32,
        });
        self.accepted.push((i, j, label));
        self.detect_component(i, j);
        true
    }

    /// Depth-first search from `src` along the orientation for a free pebble
    /// outside {i, j}; on success the path to it is reversed and the pebble
    /// moves to `src`.
    fn gather_one(&mut self, src: VertexId, i: VertexId, j: VertexId, log: &mut Vec<Undo>) -> bool {
        // prev[v] = (predecessor, slot in out[predecessor]) on the DFS path.
        let mut prev: Vec<(u32, u32)> = vec![(u32::MAX, 0); self.n];
        let mut visited = vec![false; self.n];
        visited[src] = true;
        visited[i] = true;
        visited[j] = true;
        let mut stack = vec![src as u32];
        let mut found = None;
        'search: while let Some(v) = stack.pop() {
            let v_us = v as usize;
            for (slot, &OutEdge { head, .. }) in self.out[v_us].iter().enumerate() {
                let w = head as usize;
                if visited[w] {
                    continue;
                }
                visited[w] = true;
                prev[w] = (v, slot as u32);
                if self.pebbles[w] > 0 {
                    found = Some(w);
                    break 'search;
                }
                stack.push(head);
            }
        }
        let Some(w) = found else {
            return false;
        };
        // Reverse the path src -> ... -> w and move the pebble to src.
        let mut cur = w;
        while cur != src {
            let (p, slot) = prev[cur];
            let edge = self.out[p as usize].remove(slot as usize);
            debug_assert_eq!(edge.head as usize, cur);
            self.out[cur].push(OutEdge {
                head: p,
                label: edge.label,
            });
            log.push(Undo::Flip {
                from: p,
                slot,
                to: cur as u32,
            });
            cur = p as usize;
        }
        self.pebbles[w] -= 1;
        self.pebbles[src] += 1;
        true
    }

    fn undo(&mut self, log: Vec<Undo>) {
        if log.is_empty() {
            return;
        }
        for entry in log.into_iter().rev() {
            match entry {
                Undo::Flip { from, slot, to } => {
                    let edge = self.out[to as usize].pop().expect("undo log consistent");
                    debug_assert_eq!(edge.head, from);
                    self.out[from as usize].insert(
                        slot as usize,
                        OutEdge {
                            head: to,
                            label: edge.label,
                        },
                    );
                }
            }
        }
        // Gathering kept pebbles[v] + out_degree(v) == 2 at every step, so
        // with the adjacency restored the pebble counts follow from it.
        for v in 0..self.n {
            self.pebbles[v] = 2 - self.out[v].len() as u8;
        }
    }

    /// After an acceptance, free pebbles on {i, j} total exactly `l` iff a new
    /// tight set may have formed; it is then the set of vertices from which
    /// every reachable free pebble lies on {i, j}.
    fn detect_component(&mut self, i: VertexId, j: VertexId) {
        if (self.pebbles[i] + self.pebbles[j]) as usize > self.ell {
            return;
        }
        // Quick forward check: a free pebble reachable from {i, j} outside
        // {i, j} rules a new component out.
        let mut visited = vec![false; self.n];
        let mut stack = vec![i as u32, j as u32];
        visited[i] = true;
        visited[j] = true;
        while let Some(v) = stack.pop() {
            for &OutEdge { head, .. } in &self.out[v as usize] {
                let w = head as usize;
                if visited[w] {
                    continue;
                }
                if self.pebbles[w] > 0 {
                    return;
                }
                visited[w] = true;
                stack.push(head);
            }
        }
        // Reverse reachability from every free-pebbled vertex outside {i, j}:
        // anything that can reach one is outside the new tight set.
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); self.n];
        for (v, outs) in self.out.iter().enumerate() {
            for &OutEdge { head, .. } in outs {
                rev[head as usize].push(v as u32);
            }
        }
        let mut blocked = vec![false; self.n];
        let mut stack: Vec<u32> = Vec::new();
        for v in 0..self.n {
            if v != i && v != j && self.pebbles[v] > 0 {
                blocked[v] = true;
                stack.push(v as u32);
            }
        }
        while let Some(v) = stack.pop() {
            for &p in &rev[v as usize] {
                if !blocked[p as usize] {
                    blocked[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        let tight: Vec<VertexId> = (0..self.n).filter(|&v| !blocked[v]).collect();
        debug_assert!(tight.contains(&i) && tight.contains(&j));
        self.register_component(tight);
    }

    fn register_component(&mut self, vertices: Vec<VertexId>) {
        // Absorb every registered component this one subsumes.  Overlap in one
        // vertex suffices for l <= 2; for l = 3 two shared vertices are needed
        // before the union is forced tight.
        let threshold = if self.ell == 3 { 2 } else { 1 };
        let mut overlap: std::collections::HashMap<u32, usize> = std::collections::HashMap::new();
        for &v in &vertices {
            for &c in &self.membership[v] {
                *overlap.entry(c).or_insert(0) += 1;
            }
        }
        for (&c, &count) in &overlap {
            if count >= threshold {
                let comp = &mut self.components[c as usize];
                debug_assert!(comp.vertices.iter().all(|v| vertices.contains(v)));
                comp.alive = false;
                for &v in &comp.vertices {
                    self.membership[v].retain(|&m| m != c);
                }
            }
        }
        let id = self.components.len() as u32;
        for &v in &vertices {
            self.membership[v].push(id);
        }
        for &u in &vertices {
            for &v in &vertices {
                self.pair_set(u, v);
            }
        }
        self.components.push(RegisteredComponent {
            vertices,
            alive: true,
        });
    }

    /// Fundamental circuit of a probe that `try_insert` would reject.  The
    /// state is restored before returning.
    pub fn fundamental_circuit(
        &mut self,
        i: VertexId,
        j: VertexId,
        probe_label: EdgeId,
    ) -> Result<CircuitReport, PebbleError> {
        for v in [i, j] {
            if v >= self.n {
                return Err(PebbleError::VertexOutOfRange { v, n: self.n });
            }
        }
        if i == j && self.ell >= 2 {
            // A loop alone already violates the count on one vertex, so it is
            // its own minimal circuit.
            return Ok(CircuitReport {
                edges: vec![probe_label],
            });
        }
        let target = self.ell + 1;
        let mut log = Vec::new();
        loop {
            if (self.pebbles[i] + self.pebbles[j]) as usize >= target {
                self.undo(log);
                return Err(PebbleError::ProbeInsertable { i, j });
            }
            let progressed = (self.pebbles[i] < 2 && self.gather_one(i, i, j, &mut log))
                || (i != j && self.pebbles[j] < 2 && self.gather_one(j, i, j, &mut log));
            if !progressed {
                break;
            }
        }
        // Gathering is maximal and failed: the forward reach of {i, j} spans
        // the tight block the probe closes into a circuit.
        let mut visited = vec![false; self.n];
        let mut stack = vec![i as u32, j as u32];
        visited[i] = true;
        visited[j] = true;
        while let Some(v) = stack.pop() {
            for &OutEdge { head, .. } in &self.out[v as usize] {
                if !visited[head as usize] {
                    visited[head as usize] = true;
                    stack.push(head);
                }
            }
        }
        let mut edges: Vec<EdgeId> = self
            .accepted
            .iter()
            .filter(|&&(u, v, _)| visited[u] && visited[v])
            .map(|&(_, _, label)| label)
            .collect();
        edges.push(probe_label);
        edges.sort_unstable();
        self.undo(log);
        debug_assert!(self.audit().is_ok());
        Ok(CircuitReport { edges })
    }

    /// All registered maximal tight sets with the accepted edges they span.
    pub fn components(&self) -> ComponentReport {
        let mut components: Vec<Component> = self
            .components
            .iter()
            .filter(|c| c.alive)
            .map(|c| {
                let inside: std::collections::HashSet<VertexId> =
                    c.vertices.iter().copied().collect();
                let mut edges: Vec<EdgeId> = self
                    .accepted
                    .iter()
                    .filter(|&&(u, v, _)| inside.contains(&u) && inside.contains(&v))
                    .map(|&(_, _, label)| label)
                    .collect();
                edges.sort_unstable();
                let mut vertices = c.vertices.clone();
                vertices.sort_unstable();
                Component { vertices, edges }
            })
            .collect();
        components.sort_by_key(|c| c.vertices[0]);
        ComponentReport { components }
    }

    /// Structural invariant check used by the test suites.
    pub fn audit(&self) -> Result<(), String> {
        let mut total = 0usize;
        for v in 0..self.n {
            let sum = self.pebbles[v] as usize + self.out[v].len();
            if sum != 2 {
                return Err(format!(
                    "vertex {v}: pebbles {} + out-degree {} != 2",
                    self.pebbles[v],
                    self.out[v].len()
                ));
            }
            total += self.pebbles[v] as usize;
        }
        if total != 2 * self.n - self.accepted.len() {
            return Err(format!(
                "total pebbles {total} != 2n - accepted ({})",
                2 * self.n - self.accepted.len()
            ));
        }
        Ok(())
    }
}
