//! Brute-force definitional checkers, used as ground truth by every
//! algorithmic module.
//!
//! Everything here works by enumerating edge subsets and checking the count
//! conditions directly; image triviality is decided by explicitly walking
//! tree paths, with no shared machinery with the production path (no pebble
//! games, no LCA index, no potentials).  Inputs are capped at
//! [`DEFAULT_SUBSET_BOUND`] edges unless `RIGIDKIT_ORACLE_BOUND` overrides it.

use std::collections::HashMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fileformat;
use crate::graph::{Color, ColoredGraph, EdgeId, EdgeSubset, Group, VertexId};

pub const DEFAULT_SUBSET_BOUND: usize = 20;

/// Enumeration cap on the edge count, overridable via `RIGIDKIT_ORACLE_BOUND`.
pub fn subset_bound() -> usize {
    std::env::var("RIGIDKIT_ORACLE_BOUND")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SUBSET_BOUND)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {m} edges, above the exhaustive bound {bound}")]
    BoundExceeded { m: usize, bound: usize },
    #[error("oracle supports at most 64 vertices (got {n})")]
    TooManyVertices { n: usize },
    #[error("family {family:?} does not match the graph group {group:?}")]
    FamilyGroupMismatch { family: String, group: Group },
}

/// The hereditary sparsity families of interest.  Ross and cone-Laman carry
/// their group descriptor and condition the count on subgraph image
/// triviality; the others are pure counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityFamily {
    /// m' <= 2n' - 3
    Laman,
    /// m' <= 2n' - 2
    TwoTwo,
    /// m' <= 2n' - 1
    TwoOne,
    /// trivial-image subgraphs at 2n' - 3, everything at 2n' - 2
    Ross(Group),
    /// trivial-image subgraphs at 2n' - 3, everything at 2n' - 1
    ConeLaman(u32),
}

impl SparsityFamily {
    /// The tight count: components are the maximal subsets with
    /// `m' = 2n' - tight_ell()`.
    pub fn tight_ell(&self) -> i64 {
        match self {
            SparsityFamily::Laman => 3,
            SparsityFamily::TwoTwo => 2,
            SparsityFamily::TwoOne => 1,
            SparsityFamily::Ross(_) => 2,
            SparsityFamily::ConeLaman(_) => 1,
        }
    }

    fn check_group(&self, graph: &ColoredGraph) -> Result<(), OracleError> {
        let ok = match self {
            SparsityFamily::Ross(g) => *g == graph.group(),
            SparsityFamily::ConeLaman(k) => graph.group() == Group::Zk(*k),
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(OracleError::FamilyGroupMismatch {
                family: format!("{self:?}"),
                group: graph.group(),
            })
        }
    }
}

/// Image triviality by explicit tree-path walking: build a spanning forest of
/// the subset by depth-first search, and for each non-tree edge walk both
/// endpoints up to their meeting ancestor, summing colors with traversal
/// signs along the way.
pub fn oracle_image_trivial(graph: &ColoredGraph, subset: &EdgeSubset) -> bool {
    direct_walk_trivial(graph, subset.ids())
}

fn direct_walk_trivial(graph: &ColoredGraph, ids: &[EdgeId]) -> bool {
    if ids.is_empty() {
        return true;
    }
    let group = graph.group();
    let mut verts: Vec<VertexId> = ids
        .iter()
        .flat_map(|&e| {
            let ed = graph.edge(e);
            [ed.tail, ed.head]
        })
        .collect();
    verts.sort_unstable();
    verts.dedup();
    let local: HashMap<VertexId, usize> = verts.iter().enumerate().map(|(l, &v)| (v, l)).collect();
    let ledges: Vec<(usize, usize, Color)> = ids
        .iter()
        .map(|&e| {
            let ed = graph.edge(e);
            (local[&ed.tail], local[&ed.head], ed.color)
        })
        .collect();
    let nl = verts.len();

    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nl];
    for (le, &(t, h, _)) in ledges.iter().enumerate() {
        adj[t].push((h, le));
        if t != h {
            adj[h].push((t, le));
        }
    }

    let mut parent_v = vec![usize::MAX; nl];
    let mut parent_e = vec![usize::MAX; nl];
    let mut seen = vec![false; nl];
    let mut is_tree = vec![false; ledges.len()];
    for root in 0..nl {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(w, le) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    is_tree[le] = true;
                    parent_v[w] = v;
                    parent_e[w] = le;
                    stack.push(w);
                }
            }
        }
    }

    // Signed color sum walking upward from v to the ancestor `stop`.
    let up_sum = |mut v: usize, stop: usize| -> Color {
        let mut acc = group.identity();
        while v != stop {
            let (t, _, c) = ledges[parent_e[v]];
            acc = if t == v {
                group.add(acc, c)
            } else {
                group.sub(acc, c)
            };
            v = parent_v[v];
        }
        acc
    };

    let mut marked = vec![false; nl];
    for (le, &(i, j, c)) in ledges.iter().enumerate() {
        if is_tree[le] {
            continue;
        }
        // Meeting ancestor by path intersection.
        let mut a = i;
        loop {
            marked[a] = true;
            if parent_v[a] == usize::MAX {
                break;
            }
            a = parent_v[a];
        }
        let mut meet = j;
        while !marked[meet] {
            meet = parent_v[meet];
        }
        let mut v = i;
        loop {
            marked[v] = false;
            if parent_v[v] == usize::MAX {
                break;
            }
            v = parent_v[v];
        }
        // Cycle traversal: cross the edge i -> j, climb j -> meet, descend
        // meet -> i.
        let image = group.sub(group.add(c, up_sum(j, meet)), up_sum(i, meet));
        if !group.is_identity(image) {
            return false;
        }
    }
    true
}

/// Per-mask subset quantities of one graph, the substrate for all family
/// checks.  Subset `mask` has bit `e` set iff edge `e` is in it.
pub struct SubsetAnalysis<'g> {
    graph: &'g ColoredGraph,
    m: usize,
    vert_mask: Vec<u64>,
}

impl<'g> SubsetAnalysis<'g> {
    pub fn new(graph: &'g ColoredGraph) -> Result<Self, OracleError> {
        let m = graph.m();
        let bound = subset_bound();
        if m > bound {
            return Err(OracleError::BoundExceeded { m, bound });
        }
        if graph.n() > 64 {
            return Err(OracleError::TooManyVertices { n: graph.n() });
        }
        let mut vert_mask = vec![0u64; 1 << m];
        for mask in 1..1usize << m {
            let low = mask.trailing_zeros() as usize;
            let e = graph.edge(low);
            vert_mask[mask] = vert_mask[mask & (mask - 1)] | 1 << e.tail | 1 << e.head;
        }
        Ok(SubsetAnalysis {
            graph,
            m,
            vert_mask,
        })
    }

    pub fn n_prime(&self, mask: usize) -> u32 {
        self.vert_mask[mask].count_ones()
    }

    fn mask_ids(&self, mask: usize) -> Vec<EdgeId> {
        (0..self.m).filter(|e| mask >> e & 1 == 1).collect()
    }

    fn count_ok(&self, mask: usize, family: SparsityFamily) -> bool {
        let np = self.n_prime(mask) as i64;
        let mp = (mask as u64).count_ones() as i64;
        match family {
            SparsityFamily::Laman => mp <= 2 * np - 3,
            SparsityFamily::TwoTwo => mp <= 2 * np - 2,
            SparsityFamily::TwoOne => mp <= 2 * np - 1,
            SparsityFamily::Ross(_) => {
                if mp <= 2 * np - 3 {
                    true
                } else if mp > 2 * np - 2 {
                    false
                } else {
                    !direct_walk_trivial(self.graph, &self.mask_ids(mask))
                }
            }
            SparsityFamily::ConeLaman(_) => {
                if mp <= 2 * np - 3 {
                    true
                } else if mp > 2 * np - 1 {
                    false
                } else {
                    !direct_walk_trivial(self.graph, &self.mask_ids(mask))
                }
            }
        }
    }

    /// `result[mask]` iff the subset is sparse as a subgraph: every one of its
    /// subsets, itself included, satisfies the family count.
    pub fn family_sparse(&self, family: SparsityFamily) -> Result<Vec<bool>, OracleError> {
        family.check_group(self.graph)?;
        let mut ok = vec![true; 1 << self.m];
        for mask in 1..1usize << self.m {
            let mut hereditary = true;
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if !ok[mask ^ (1 << e)] {
                    hereditary = false;
                    break;
                }
            }
            ok[mask] = hereditary && self.count_ok(mask, family);
        }
        Ok(ok)
    }

    /// Connected (in the undirected sense) on its spanned vertices.
    pub fn connected(&self, mask: usize) -> bool {
        if mask == 0 {
            return false;
        }
        let mut uf = UnionFind::new(self.graph.n());
        for e in self.mask_ids(mask) {
            let ed = self.graph.edge(e);
            uf.union(ed.tail, ed.head);
        }
        let vs = self.vert_mask[mask];
        let root = uf.find(vs.trailing_zeros() as usize);
        (0..64)
            .filter(|v| vs >> v & 1 == 1)
            .all(|v| uf.find(v) == root)
    }
}

/// Edge-minimal subsets violating the family count ("circuits").
pub fn minimal_violations(ok: &[bool], m: usize) -> Vec<usize> {
    (1..1usize << m)
        .filter(|&mask| {
            if ok[mask] {
                return false;
            }
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if !ok[mask ^ (1 << e)] {
                    return false;
                }
            }
            true
        })
        .collect()
}

/// Maximal sparse subsets ("bases").
pub fn maximal_sparse(ok: &[bool], m: usize) -> Vec<usize> {
    (0..1usize << m)
        .filter(|&mask| {
            ok[mask] && (0..m).all(|e| mask >> e & 1 == 1 || !ok[mask | 1 << e])
        })
        .collect()
}

/// The unique circuit inside `basis + e`, found by shrinking while dependent.
pub fn fundamental_circuit_mask(ok: &[bool], basis: usize, e: usize) -> usize {
    let mut mask = basis | 1 << e;
    debug_assert!(!ok[mask]);
    loop {
        let mut shrunk = false;
        let mut bits = mask & !(1 << e);
        while bits != 0 {
            let f = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if !ok[mask ^ (1 << f)] {
                mask ^= 1 << f;
                shrunk = true;
            }
        }
        if !shrunk {
            return mask;
        }
    }
}

/// Every non-empty subset satisfies the family count.
pub fn oracle_is_sparse(
    graph: &ColoredGraph,
    family: SparsityFamily,
) -> Result<bool, OracleError> {
    let analysis = SubsetAnalysis::new(graph)?;
    let ok = analysis.family_sparse(family)?;
    Ok(ok[(1usize << graph.m()) - 1])
}

/// Sparse with the family's equality count on the whole edge set, counting
/// all `n` vertices of the graph.
pub fn oracle_is_tight(graph: &ColoredGraph, family: SparsityFamily) -> Result<bool, OracleError> {
    let sparse = oracle_is_sparse(graph, family)?;
    Ok(sparse && graph.m() as i64 == 2 * graph.n() as i64 - family.tight_ell())
}

/// Size of a largest sparse subset.
pub fn oracle_max_independent(
    graph: &ColoredGraph,
    family: SparsityFamily,
) -> Result<usize, OracleError> {
    let analysis = SubsetAnalysis::new(graph)?;
    let ok = analysis.family_sparse(family)?;
    Ok((0..1usize << graph.m())
        .filter(|&mask| ok[mask])
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0))
}

/// Vertex sets of the maximal tight sparse subsets, each sorted, the list
/// sorted lexicographically.
pub fn oracle_components(
    graph: &ColoredGraph,
    family: SparsityFamily,
) -> Result<Vec<Vec<VertexId>>, OracleError> {
    let analysis = SubsetAnalysis::new(graph)?;
    let ok = analysis.family_sparse(family)?;
    let ell = family.tight_ell();
    let mut cands: Vec<u64> = (1..1usize << graph.m())
        .filter(|&mask| {
            ok[mask] && (mask as u64).count_ones() as i64 == 2 * analysis.n_prime(mask) as i64 - ell
        })
        .map(|mask| analysis.vert_mask[mask])
        .collect();
    cands.sort_unstable();
    cands.dedup();
    let maximal: Vec<u64> = cands
        .iter()
        .copied()
        .filter(|&c| !cands.iter().any(|&o| o != c && o & c == c))
        .collect();
    let mut sets: Vec<Vec<VertexId>> = maximal
        .into_iter()
        .map(|vs| (0..64).filter(|v| vs >> v & 1 == 1).collect())
        .collect();
    sets.sort();
    Ok(sets)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

// ---------------------------------------------------------------------------
// Lemma suite: finite-instance checks of the structural lemmas the
// algorithms rely on.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LemmaConfig {
    pub seed: u64,
    /// Random Z/3Z graphs for the lift dichotomy checks.
    pub z3_instances: usize,
    /// Random colorings sampled per enumerated topology.
    pub colorings_per_graph: usize,
    /// Where counterexample reproducers are written (temp dir if unset).
    pub emit_dir: Option<PathBuf>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            seed: 2024,
            z3_instances: 1000,
            colorings_per_graph: 3,
            emit_dir: None,
        }
    }
}

#[derive(Debug)]
pub struct LemmaCheck {
    pub name: &'static str,
    pub instances: usize,
    pub counterexamples: Vec<PathBuf>,
}

#[derive(Debug)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.counterexamples.is_empty())
    }
}

struct LemmaRun {
    emit_dir: PathBuf,
    emitted: usize,
    checks: Vec<LemmaCheck>,
}

impl LemmaRun {
    fn check(&mut self, name: &'static str) -> usize {
        self.checks.push(LemmaCheck {
            name,
            instances: 0,
            counterexamples: Vec::new(),
        });
        self.checks.len() - 1
    }

    fn record(&mut self, idx: usize, graph: &ColoredGraph, holds: bool) {
        self.checks[idx].instances += 1;
        if holds {
            return;
        }
        let name = self.checks[idx].name;
        let path = self
            .emit_dir
            .join(format!("lemma-{name}-{}.graph", self.emitted));
        self.emitted += 1;
        let _ = std::fs::create_dir_all(&self.emit_dir);
        let _ = std::fs::write(&path, fileformat::serialize(graph));
        self.checks[idx].counterexamples.push(path);
    }
}

/// Enumerates every multiset of the given edge slots with exactly `m` edges.
fn for_each_exact_multiset(
    types: &[(usize, usize)],
    m: usize,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    fn rec(
        types: &[(usize, usize)],
        start: usize,
        remaining: usize,
        buf: &mut Vec<(usize, usize)>,
        f: &mut impl FnMut(&[(usize, usize)]),
    ) {
        if remaining == 0 {
            f(buf);
            return;
        }
        for t in start..types.len() {
            buf.push(types[t]);
            rec(types, t, remaining - 1, buf, f);
            buf.pop();
        }
    }
    rec(types, 0, m, &mut Vec::new(), f);
}

fn uncolored(n: usize, pairs: &[(usize, usize)]) -> ColoredGraph {
    let edges = pairs
        .iter()
        .map(|&(t, h)| (t, h, Color::Z2(0, 0)))
        .collect();
    ColoredGraph::new(Group::Z2, n, edges).expect("enumerated edges are in range")
}

fn recolor_zk(graph: &ColoredGraph, k: u32, rng: &mut ChaCha8Rng) -> ColoredGraph {
    let edges = graph
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, Color::Zk(rng.gen_range(0..k))))
        .collect();
    ColoredGraph::new(Group::Zk(k), graph.n(), edges).unwrap()
}

fn recolor_z2(graph: &ColoredGraph, rng: &mut ChaCha8Rng) -> ColoredGraph {
    let edges = graph
        .edges()
        .iter()
        .map(|e| {
            (
                e.tail,
                e.head,
                Color::Z2(rng.gen_range(-1..=1), rng.gen_range(-1..=1)),
            )
        })
        .collect();
    ColoredGraph::new(Group::Z2, graph.n(), edges).unwrap()
}

/// Runs every lemma check; each counterexample is written as a reproducer
/// graph file and listed in the report.
pub fn lemma_suite(config: &LemmaConfig) -> LemmaReport {
    let emit_dir = config
        .emit_dir
        .clone()
        .unwrap_or_else(|| std::env::temp_dir().join("rigidkit-lemma-counterexamples"));
    let mut run = LemmaRun {
        emit_dir,
        emitted: 0,
        checks: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let disjoint = run.check("laman-circuits-edge-disjoint-in-22-graphs");
    let elim = run.check("laman-circuits-fundamental-for-every-basis");
    let ross_iff = run.check("ross-iff-fundamental-circuit-images-nontrivial");
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        for_each_exact_multiset(&pairs, 2 * n - 2, &mut |edges| {
            let graph = uncolored(n, edges);
            let analysis = SubsetAnalysis::new(&graph).unwrap();
            let ok22 = analysis.family_sparse(SparsityFamily::TwoTwo).unwrap();
            if !ok22[(1 << graph.m()) - 1] {
                return;
            }
            let laman = analysis.family_sparse(SparsityFamily::Laman).unwrap();
            let mut circuits = minimal_violations(&laman, graph.m());
            circuits.sort_unstable();

            let pairwise_disjoint = circuits
                .iter()
                .enumerate()
                .all(|(i, &a)| circuits[i + 1..].iter().all(|&b| a & b == 0));
            run.record(disjoint, &graph, pairwise_disjoint);

            let bases = maximal_sparse(&laman, graph.m());
            let circuit_sets: Vec<Vec<usize>> = bases
                .iter()
                .map(|&basis| {
                    let mut set: Vec<usize> = (0..graph.m())
                        .filter(|e| basis >> e & 1 == 0)
                        .map(|e| fundamental_circuit_mask(&laman, basis, e))
                        .collect();
                    set.sort_unstable();
                    set.dedup();
                    set
                })
                .collect();
            let all_equal_to_circuits = circuit_sets.iter().all(|set| *set == circuits);
            run.record(elim, &graph, all_equal_to_circuits);

            for _ in 0..config.colorings_per_graph {
                let colored = recolor_z2(&graph, &mut rng);
                let is_ross = oracle_is_sparse(&colored, SparsityFamily::Ross(Group::Z2)).unwrap();
                let via_circuits = bases.iter().all(|&basis| {
                    (0..colored.m())
                        .filter(|e| basis >> e & 1 == 0)
                        .all(|e| {
                            let c = fundamental_circuit_mask(&laman, basis, e);
                            let ids: Vec<EdgeId> =
                                (0..colored.m()).filter(|f| c >> f & 1 == 1).collect();
                            !direct_walk_trivial(&colored, &ids)
                        })
                });
                run.record(ross_iff, &colored, is_ross == via_circuits);
            }
        });
    }

    let disjoint22 = run.check("22-circuits-edge-disjoint-in-21-graphs");
    let two_types = run.check("laman-circuit-in-22-circuit-or-fundamental");
    let robust = run.check("cone-laman-iff-deletions-are-ross");
    for n in 1..=4usize {
        let mut slots: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        slots.extend((0..n).map(|i| (i, i)));
        for_each_exact_multiset(&slots, 2 * n - 1, &mut |edges| {
            let graph = uncolored(n, edges);
            let analysis = SubsetAnalysis::new(&graph).unwrap();
            let ok21 = analysis.family_sparse(SparsityFamily::TwoOne).unwrap();
            let full = (1usize << graph.m()) - 1;
            if !ok21[full] {
                return;
            }
            let ok22 = analysis.family_sparse(SparsityFamily::TwoTwo).unwrap();
            let circuits22 = minimal_violations(&ok22, graph.m());
            let pairwise_disjoint = circuits22
                .iter()
                .enumerate()
                .all(|(i, &a)| circuits22[i + 1..].iter().all(|&b| a & b == 0));
            run.record(disjoint22, &graph, pairwise_disjoint);

            let laman = analysis.family_sparse(SparsityFamily::Laman).unwrap();
            let laman_circuits = minimal_violations(&laman, graph.m());
            let bases = maximal_sparse(&laman, graph.m());
            let holds = laman_circuits.iter().all(|&c| {
                circuits22.iter().any(|&d| c & d == c)
                    || bases.iter().all(|&basis| {
                        (0..graph.m())
                            .filter(|e| basis >> e & 1 == 0)
                            .any(|e| fundamental_circuit_mask(&laman, basis, e) == c)
                    })
            });
            run.record(two_types, &graph, holds);

            // Whole graph a (2,2)-circuit: removing any edge leaves it sparse.
            let is_22_circuit =
                !ok22[full] && (0..graph.m()).all(|e| ok22[full ^ (1 << e)]);
            if is_22_circuit {
                for k in [2u32, 3, 5] {
                    let colored = recolor_zk(&graph, k, &mut rng);
                    let lhs = oracle_is_sparse(&colored, SparsityFamily::ConeLaman(k)).unwrap();
                    let rhs = (0..colored.m()).all(|e| {
                        let edges: Vec<_> = colored
                            .edges()
                            .iter()
                            .enumerate()
                            .filter(|&(f, _)| f != e)
                            .map(|(_, ed)| (ed.tail, ed.head, ed.color))
                            .collect();
                        let minus =
                            ColoredGraph::new(colored.group(), colored.n(), edges).unwrap();
                        oracle_is_tight(&minus, SparsityFamily::Ross(Group::Zk(k))).unwrap()
                    });
                    run.record(robust, &colored, lhs == rhs);
                }
            }
        });
    }

    let dichotomy = run.check("z3-lift-connectivity-dichotomy");
    let fiber_path = run.check("z3-nontrivial-iff-fiber-path");
    for _ in 0..config.z3_instances {
        let n = rng.gen_range(1..=5usize);
        let m = rng.gen_range(0..=9usize);
        let edges: Vec<(usize, usize, Color)> = (0..m)
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    Color::Zk(rng.gen_range(0..3)),
                )
            })
            .collect();
        let graph = ColoredGraph::new(Group::Zk(3), n, edges).unwrap();
        let analysis = SubsetAnalysis::new(&graph).unwrap();
        let mut d_holds = true;
        let mut p_holds = true;
        for mask in 1..1usize << m {
            if !analysis.connected(mask) {
                continue;
            }
            let ids = analysis.mask_ids(mask);
            let trivial = direct_walk_trivial(&graph, &ids);
            // Threefold lift of the subset, components by union-find.
            let mut uf = UnionFind::new(3 * n);
            for &e in &ids {
                let ed = graph.edge(e);
                let Color::Zk(c) = ed.color else { unreachable!() };
                for z in 0..3u32 {
                    uf.union(
                         3 * ed.tail + z as usize,
                        3 * ed.head + ((z + c) % 3) as usize,
                    );
                }
            }
            let lifted_verts: Vec<usize> = (0..64)
                .filter(|v| analysis.vert_mask[mask] >> v & 1 == 1)
                .flat_map(|v| [3 * v, 3 * v + 1, 3 * v + 2])
                .collect();
            let mut roots: Vec<usize> = lifted_verts.iter().map(|&v| uf.find(v)).collect();
            roots.sort_unstable();
            roots.dedup();
            let n_prime = analysis.n_prime(mask) as usize;
            if trivial {
                // Three disconnected copies, each covering the base vertices.
                d_holds &= roots.len() == 3
                    && roots.iter().all(|&r| {
                        lifted_verts.iter().filter(|&&v| uf.find(v) == r).count() == n_prime
                    });
            } else {
                d_holds &= roots.len() == 1;
            }
            let fiber_connected = (0..64)
                .filter(|v| analysis.vert_mask[mask] >> v & 1 == 1)
                .any(|v| {
                    let f = [uf.find(3 * v), uf.find(3 * v + 1), uf.find(3 * v + 2)];
                    f[0] == f[1] || f[0] == f[2] || f[1] == f[2]
                });
            p_holds &= fiber_connected == !trivial;
        }
        run.record(dichotomy, &graph, d_holds);
        run.record(fiber_path, &graph, p_holds);
    }

    LemmaReport { checks: run.checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2(x: i64, y: i64) -> Color {
        Color::Z2(x, y)
    }

    fn zero_k4() -> ColoredGraph {
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in (i + 1)..4 {
                edges.push((i, j, z2(0, 0)));
            }
        }
        ColoredGraph::new(Group::Z2, 4, edges).unwrap()
    }

    #[test]
    fn zero_k4_is_not_ross() {
        assert!(!oracle_is_sparse(&zero_k4(), SparsityFamily::Ross(Group::Z2)).unwrap());
        assert!(oracle_is_sparse(&zero_k4(), SparsityFamily::TwoTwo).unwrap());
    }

    #[test]
    fn doubled_edge_is_ross() {
        let g = ColoredGraph::new(Group::Z2, 2, vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0))]).unwrap();
        assert!(oracle_is_sparse(&g, SparsityFamily::Ross(Group::Z2)).unwrap());
        assert!(oracle_is_tight(&g, SparsityFamily::Ross(Group::Z2)).unwrap());
    }

    #[test]
    fn loop_colored_one_is_cone_laman() {
        let g = ColoredGraph::new(Group::Zk(3), 1, vec![(0, 0, Color::Zk(1))]).unwrap();
        assert!(oracle_is_sparse(&g, SparsityFamily::ConeLaman(3)).unwrap());
        assert!(oracle_is_tight(&g, SparsityFamily::ConeLaman(3)).unwrap());
        let g0 = ColoredGraph::new(Group::Zk(3), 1, vec![(0, 0, Color::Zk(0))]).unwrap();
        assert!(!oracle_is_sparse(&g0, SparsityFamily::ConeLaman(3)).unwrap());
    }

    #[test]
    fn components_doubled_plus_lone_edge() {
        let g = ColoredGraph::new(
            Group::Z2,
            4,
            vec![(0, 1, z2(0, 0)), (0, 1, z2(1, 0)), (2, 3, z2(0, 0))],
        )
        .unwrap();
        let comps = oracle_components(&g, SparsityFamily::Ross(Group::Z2)).unwrap();
        assert_eq!(comps, vec![vec![0, 1]]);
    }

    #[test]
    fn max_independent_cases() {
        let empty = ColoredGraph::new(Group::Z2, 3, vec![]).unwrap();
        assert_eq!(
            oracle_max_independent(&empty, SparsityFamily::Ross(Group::Z2)).unwrap(),
            0
        );
        assert_eq!(
            oracle_max_independent(&zero_k4(), SparsityFamily::Ross(Group::Z2)).unwrap(),
            5
        );
    }

    #[test]
    fn z5_triple_parallel_is_tight_cone() {
        let g = ColoredGraph::new(
            Group::Zk(5),
            2,
            vec![
                (0, 1, Color::Zk(0)),
                (0, 1, Color::Zk(1)),
                (0, 1, Color::Zk(2)),
            ],
        )
        .unwrap();
        assert!(oracle_is_tight(&g, SparsityFamily::ConeLaman(5)).unwrap());
        assert_eq!(
            oracle_components(&g, SparsityFamily::ConeLaman(5)).unwrap(),
            vec![vec![0, 1]]
        );
    }

    #[test]
    fn ross_sparsity_is_hereditary() {
        // Deleting edges never breaks sparsity.
        let g = ColoredGraph::new(
            Group::Z2,
            3,
            vec![
                (0, 1, z2(0, 0)),
                (0, 1, z2(1, 0)),
                (1, 2, z2(0, 1)),
                (1, 2, z2(0, 0)),
            ],
        )
        .unwrap();
        let analysis = SubsetAnalysis::new(&g).unwrap();
        let ok = analysis.family_sparse(SparsityFamily::Ross(Group::Z2)).unwrap();
        for mask in 0..1usize << g.m() {
            if ok[mask] {
                for e in 0..g.m() {
                    if mask >> e & 1 == 1 {
                        assert!(ok[mask ^ (1 << e)]);
                    }
                }
            }
        }
    }

    #[test]
    fn image_walk_handles_loops_and_parallels() {
        let g = ColoredGraph::new(
            Group::Zk(4),
            2,
            vec![
                (0, 0, Color::Zk(0)),
                (0, 1, Color::Zk(3)),
                (1, 0, Color::Zk(1)),
            ],
        )
        .unwrap();
        assert!(oracle_image_trivial(&g, &EdgeSubset::new(vec![0])));
        // Cycle 0 -> 1 -> 0 has image 3 + 1 = 0 mod 4.
        assert!(oracle_image_trivial(&g, &EdgeSubset::new(vec![1, 2])));
        assert!(oracle_image_trivial(&g, &g.full_subset()));
    }

    #[test]
    fn bound_is_enforced() {
        let edges = (0..21).map(|_| (0, 1, z2(0, 0))).collect();
        let g = ColoredGraph::new(Group::Z2, 2, edges).unwrap();
        assert!(matches!(
            oracle_is_sparse(&g, SparsityFamily::TwoTwo),
            Err(OracleError::BoundExceeded { m: 21, .. })
        ));
    }

    #[test]
    fn lemma_suite_smoke() {
        let config = LemmaConfig {
            z3_instances: 25,
            colorings_per_graph: 1,
            ..LemmaConfig::default()
        };
        let report = lemma_suite(&config);
        assert!(report.passed(), "{:?}", report.checks);
        assert!(report.checks.iter().all(|c| c.instances > 0));
    }
}
