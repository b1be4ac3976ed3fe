//! Feynman graphs: labeled multigraphs with loops, genus functions, vertex
//! orders, psi data, automorphisms and exhaustive enumeration.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;

use crate::arith::factorial;
use crate::{Error, Result};

/// A connected multigraph on vertices `0..n` whose edges `0..r` are listed
/// with all loops first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeynmanGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    loops: usize,
}

impl FeynmanGraph {
    /// Builds a graph from an edge list in which loops come first.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGraph(format!("need at least two vertices, got {n}")));
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {} refers to a vertex outside 1..={n}", k + 1)));
            }
            normalized.push((u.min(v), u.max(v)));
        }
        let loops = normalized.iter().take_while(|(u, v)| u == v).count();
        if normalized[loops..].iter().any(|(u, v)| u == v) {
            return Err(Error::InvalidGraph("loop edges must be listed before all other edges".into()));
        }
        Ok(FeynmanGraph { n, edges: normalized, loops })
    }

    /// Like [`FeynmanGraph::new`] but moves loops to the front (stably).
    /// Returns the graph and `perm` with `perm[new_index] = old_index`.
    pub fn with_loops_first(n: usize, edges: Vec<(usize, usize)>) -> Result<(Self, Vec<usize>)> {
        let mut perm: Vec<usize> = (0..edges.len()).collect();
        perm.sort_by_key(|&k| edges[k].0 != edges[k].1);
        let sorted = perm.iter().map(|&k| edges[k]).collect();
        Ok((Self::new(n, sorted)?, perm))
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn is_loop(&self, k: usize) -> bool {
        k < self.loops
    }

    /// Loops count twice.
    pub fn valency(&self, v: usize) -> usize {
        self.edges.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                for (s, t) in [(a, b), (b, a)] {
                    if s == v && !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number `r - n + 1` of a connected graph.
    pub fn first_betti(&self) -> i64 {
        self.edges.len() as i64 - self.n as i64 + 1
    }

    /// Number of loops at each vertex.
    pub fn loops_at(&self) -> Vec<u32> {
        let mut out = vec![0; self.n];
        for &(u, _) in &self.edges[..self.loops] {
            out[u] += 1;
        }
        out
    }

    /// Symmetric matrix of non-loop edge multiplicities.
    pub fn multiplicities(&self) -> Vec<Vec<u32>> {
        let mut m = vec![vec![0; self.n]; self.n];
        for &(u, v) in &self.edges[self.loops..] {
            m[u][v] += 1;
            m[v][u] += 1;
        }
        m
    }

    /// Edges incident to `v`, each listed once.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&k| self.edges[k].0 == v || self.edges[k].1 == v).collect()
    }
}

impl fmt::Display for FeynmanGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [", self.n)?;
        for (k, (u, v)) in self.edges.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "q{}:x{}x{}", k + 1, u + 1, v + 1)?;
        }
        write!(f, "]")
    }
}

/// Genus `g_i` at each vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenusFunction(pub Vec<u32>);

impl GenusFunction {
    pub fn zero(n: usize) -> Self {
        GenusFunction(vec![0; n])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&g| g == 0)
    }
}

/// A total order of the vertices: `position(i)` is the place of vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    position: Vec<usize>,
    vertex_at: Vec<usize>,
}

impl Order {
    pub fn identity(n: usize) -> Self {
        Order { position: (0..n).collect(), vertex_at: (0..n).collect() }
    }

    /// `positions[i]` is the zero-based place of vertex `i`.
    pub fn from_positions(positions: Vec<usize>) -> Result<Self> {
        let n = positions.len();
        let mut vertex_at = vec![usize::MAX; n];
        for (i, &p) in positions.iter().enumerate() {
            if p >= n || vertex_at[p] != usize::MAX {
                return Err(Error::InvalidGraph(format!("{positions:?} is not a permutation")));
            }
            vertex_at[p] = i;
        }
        Ok(Order { position: positions, vertex_at })
    }

    /// All `n!` orders, in lexicographic order of the position vector.
    pub fn all(n: usize) -> Vec<Order> {
        (0..n)
            .permutations(n)
            .map(|p| Order::from_positions(p).expect("permutation"))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.position.len()
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty()
    }

    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn vertex_at(&self, p: usize) -> usize {
        self.vertex_at[p]
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    /// Vertices sorted by position.
    pub fn vertices(&self) -> &[usize] {
        &self.vertex_at
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.position.iter().map(|p| p + 1).join(","))
    }
}

/// Psi powers `k_1..k_n` together with the genus `g` they determine.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KVector {
    k: Vec<u32>,
    g: u32,
}

impl KVector {
    pub fn new(k: Vec<u32>) -> Result<Self> {
        if k.len() < 2 {
            return Err(Error::InvalidKVector(format!("need at least two points, got {}", k.len())));
        }
        let sum: u32 = k.iter().sum();
        if sum % 2 != 0 {
            return Err(Error::InvalidKVector(format!("sum {sum} of psi powers is odd")));
        }
        Ok(KVector { g: (sum + 2) / 2, k })
    }

    pub fn powers(&self) -> &[u32] {
        &self.k
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    /// The valency `k_i + 2 - 2 g_i` required at vertex `i`.
    pub fn required_valency(&self, i: usize, gi: u32) -> i64 {
        self.k[i] as i64 + 2 - 2 * gi as i64
    }
}

/// Why a graph fails to match psi data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationFailure {
    VertexCount { graph: usize, data: usize },
    Disconnected,
    ValencyMismatch { vertex: usize, expected: i64, found: usize },
    GenusMismatch { betti: i64, vertex_genus: u32, genus: u32 },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::VertexCount { graph, data } => {
                write!(f, "graph has {graph} vertices but {data} values were given")
            }
            ValidationFailure::Disconnected => write!(f, "graph is disconnected"),
            ValidationFailure::ValencyMismatch { vertex, expected, found } => {
                write!(f, "vertex x{} has valency {found}, expected {expected}", vertex + 1)
            }
            ValidationFailure::GenusMismatch { betti, vertex_genus, genus } => {
                write!(f, "h1 {betti} plus vertex genera {vertex_genus} differs from g = {genus}")
            }
        }
    }
}

/// Checks valencies, connectivity and the genus balance `h1 + sum g_i = g`.
pub fn validate(graph: &FeynmanGraph, gf: &GenusFunction, k: &KVector) -> std::result::Result<(), ValidationFailure> {
    let n = graph.vertex_count();
    if gf.0.len() != n || k.len() != n {
        return Err(ValidationFailure::VertexCount { graph: n, data: if gf.0.len() != n { gf.0.len() } else { k.len() } });
    }
    if !graph.is_connected() {
        return Err(ValidationFailure::Disconnected);
    }
    for i in 0..n {
        let expected = k.required_valency(i, gf.0[i]);
        let found = graph.valency(i);
        if expected != found as i64 {
            return Err(ValidationFailure::ValencyMismatch { vertex: i, expected, found });
        }
    }
    let betti = graph.first_betti();
    if betti + gf.total() as i64 != k.genus() as i64 {
        return Err(ValidationFailure::GenusMismatch { betti, vertex_genus: gf.total(), genus: k.genus() });
    }
    Ok(())
}

pub fn is_valid(graph: &FeynmanGraph, gf: &GenusFunction, k: &KVector) -> bool {
    validate(graph, gf, k).is_ok()
}

/// Endpoints `(k1, k2)` of a non-loop edge with `k1` before `k2` in `order`.
pub fn edge_orientation(graph: &FeynmanGraph, order: &Order, k: usize) -> Result<(usize, usize)> {
    if graph.is_loop(k) {
        return Err(Error::LoopEdge(k));
    }
    let (u, v) = graph.edge(k);
    Ok(if order.position(u) < order.position(v) { (u, v) } else { (v, u) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AutMode {
    /// Vertex labels forgotten; vertex permutations must preserve the genus function.
    Unlabeled,
    /// Vertex labels kept; only edges may be permuted.
    VertexLabeled,
}

/// Order of the automorphism group of the multigraph with edge labels
/// forgotten. Parallel edges and loops at a common vertex may be permuted;
/// reversing a loop is not counted.
pub fn automorphism_count(graph: &FeynmanGraph, gf: &GenusFunction, mode: AutMode) -> u128 {
    let n = graph.vertex_count();
    let m = graph.multiplicities();
    let loops = graph.loops_at();
    let mut edge_perms: u128 = loops.iter().map(|&l| factorial(l)).product();
    for i in 0..n {
        for j in i + 1..n {
            edge_perms *= factorial(m[i][j]);
        }
    }
    let vertex_perms = match mode {
        AutMode::VertexLabeled => 1,
        AutMode::Unlabeled => (0..n)
            .permutations(n)
            .filter(|s| {
                (0..n).all(|i| gf.0[s[i]] == gf.0[i] && loops[s[i]] == loops[i])
                    && (0..n).all(|i| (0..n).all(|j| m[s[i]][s[j]] == m[i][j]))
            })
            .count() as u128,
    };
    vertex_perms * edge_perms
}

/// Canonical description of a vertex-labeled graph: genus, loops and the
/// upper triangle of the multiplicity matrix, all in vertex order.
type Code = (Vec<u32>, Vec<u32>, Vec<u32>);

fn code_under(perm: &[usize], gf: &[u32], loops: &[u32], m: &[Vec<u32>]) -> Code {
    // perm[new] = old
    let n = perm.len();
    let g = perm.iter().map(|&o| gf[o]).collect();
    let l = perm.iter().map(|&o| loops[o]).collect();
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            upper.push(m[perm[i]][perm[j]]);
        }
    }
    (g, l, upper)
}

/// Vertex permutations preserving the psi vector.
pub fn k_preserving_permutations(k: &KVector) -> Vec<Vec<usize>> {
    let n = k.len();
    (0..n)
        .permutations(n)
        .filter(|p| (0..n).all(|i| k.powers()[p[i]] == k.powers()[i]))
        .collect()
}

fn canonical_code(graph: &FeynmanGraph, gf: &GenusFunction, perms: &[Vec<usize>]) -> Code {
    let m = graph.multiplicities();
    let loops = graph.loops_at();
    perms
        .iter()
        .map(|p| code_under(p, &gf.0, &loops, &m))
        .min()
        .expect("identity is always present")
}

fn genus_functions(k: &KVector) -> Vec<GenusFunction> {
    let ranges = k.powers().iter().map(|&ki| 0..=(ki + 1) / 2);
    ranges
        .multi_cartesian_product()
        .map(GenusFunction)
        .filter(|gf| gf.total() <= k.genus())
        .filter(|gf| (0..k.len()).all(|i| k.required_valency(i, gf.0[i]) >= 2))
        .collect()
}

/// Every connected labeled multigraph realizing valencies `val`, as
/// (loops per vertex, multiplicity matrix).
fn multigraphs_with_degrees(val: &[u32]) -> Vec<(Vec<u32>, Vec<Vec<u32>>)> {
    let n = val.len();
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut out = Vec::new();
    let loop_choices = val.iter().map(|&d| 0..=d / 2).multi_cartesian_product();
    for loops in loop_choices {
        let residual: Vec<u32> = (0..n).map(|i| val[i] - 2 * loops[i]).collect();
        let mut m = vec![vec![0u32; n]; n];
        fill_pairs(&pairs, 0, residual, &mut m, &loops, &mut out);
    }
    out
}

fn fill_pairs(
    pairs: &[(usize, usize)],
    idx: usize,
    residual: Vec<u32>,
    m: &mut Vec<Vec<u32>>,
    loops: &[u32],
    out: &mut Vec<(Vec<u32>, Vec<Vec<u32>>)>,
) {
    if idx == pairs.len() {
        if residual.iter().all(|&r| r == 0) {
            out.push((loops.to_vec(), m.clone()));
        }
        return;
    }
    let (i, j) = pairs[idx];
    // once every pair touching i is decided, residual[i] must be exhausted
    let last_for_i = pairs[idx + 1..].iter().all(|&(a, b)| a != i && b != i);
    let cap = residual[i].min(residual[j]);
    for c in 0..=cap {
        if last_for_i && residual[i] != c {
            continue;
        }
        let mut r = residual.clone();
        r[i] -= c;
        r[j] -= c;
        m[i][j] = c;
        m[j][i] = c;
        fill_pairs(pairs, idx + 1, r, m, loops, out);
    }
    m[i][j] = 0;
    m[j][i] = 0;
}

fn graph_from_data(loops: &[u32], m: &[Vec<u32>]) -> FeynmanGraph {
    let n = loops.len();
    let mut edges = Vec::new();
    for (v, &l) in loops.iter().enumerate() {
        edges.extend(std::iter::repeat((v, v)).take(l as usize));
    }
    for i in 0..n {
        for j in i + 1..n {
            edges.extend(std::iter::repeat((i, j)).take(m[i][j] as usize));
        }
    }
    FeynmanGraph::new(n, edges).expect("generated graph is well formed")
}

/// All pairs `(graph, gf)` satisfying [`validate`] for `k` without
/// univalent vertices (those contribute zero on every route), one per
/// isomorphism class, in increasing order of their canonical codes. Edges of
/// each representative list loops by vertex, then vertex pairs
/// lexicographically.
pub fn enumerate_graphs(k: &KVector) -> Vec<(FeynmanGraph, GenusFunction)> {
    let perms = k_preserving_permutations(k);
    let mut seen: BTreeSet<Code> = BTreeSet::new();
    let mut out = Vec::new();
    for gf in genus_functions(k) {
        let val: Vec<u32> = (0..k.len()).map(|i| k.required_valency(i, gf.0[i]) as u32).collect();
        for (loops, m) in multigraphs_with_degrees(&val) {
            let graph = graph_from_data(&loops, &m);
            if !is_valid(&graph, &gf, k) {
                continue;
            }
            let code = canonical_code(&graph, &gf, &perms);
            if seen.insert(code.clone()) {
                out.push((code, graph, gf.clone()));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.into_iter().map(|(_, g, gf)| (g, gf)).collect()
}

/// Whether two genus-decorated graphs are isomorphic by a `k`-preserving
/// vertex relabeling.
pub fn isomorphic(k: &KVector, a: (&FeynmanGraph, &GenusFunction), b: (&FeynmanGraph, &GenusFunction)) -> bool {
    let perms = k_preserving_permutations(k);
    a.0.vertex_count() == b.0.vertex_count() && canonical_code(a.0, a.1, &perms) == canonical_code(b.0, b.1, &perms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> FeynmanGraph {
        FeynmanGraph::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn right() -> FeynmanGraph {
        FeynmanGraph::new(3, vec![(0, 0), (0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn middle() -> FeynmanGraph {
        FeynmanGraph::new(3, vec![(0, 1), (0, 1), (0, 2), (0, 2)]).unwrap()
    }

    fn k200() -> KVector {
        KVector::new(vec![2, 0, 0]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(is_valid(&triangle(), &GenusFunction(vec![1, 0, 0]), &k200()));
        assert!(is_valid(&right(), &GenusFunction::zero(3), &k200()));
        assert_eq!(
            validate(&triangle(), &GenusFunction::zero(3), &k200()),
            Err(ValidationFailure::ValencyMismatch { vertex: 0, expected: 4, found: 2 })
        );
        let disconnected = FeynmanGraph::new(4, vec![(0, 1), (0, 1), (0, 1), (2, 3), (2, 3), (2, 3)]).unwrap();
        let k = KVector::new(vec![1, 1, 1, 1]).unwrap();
        assert_eq!(validate(&disconnected, &GenusFunction::zero(4), &k), Err(ValidationFailure::Disconnected));
    }

    #[test]
    fn construction_errors() {
        assert!(FeynmanGraph::new(1, vec![]).is_err());
        assert!(FeynmanGraph::new(2, vec![(0, 1), (0, 0)]).is_err());
        assert!(FeynmanGraph::new(2, vec![(0, 2)]).is_err());
        let (g, perm) = FeynmanGraph::with_loops_first(2, vec![(0, 1), (1, 1), (0, 0)]).unwrap();
        assert_eq!(g.edges(), &[(1, 1), (0, 0), (0, 1)]);
        assert_eq!(perm, vec![1, 2, 0]);
        assert!(KVector::new(vec![1]).is_err());
        assert!(KVector::new(vec![1, 0]).is_err());
    }

    #[test]
    fn orientation() {
        let g = FeynmanGraph::new(3, vec![(0, 0), (0, 2)]).unwrap();
        assert_eq!(edge_orientation(&g, &Order::identity(3), 1).unwrap(), (0, 2));
        let rev = Order::from_positions(vec![2, 1, 0]).unwrap();
        assert_eq!(edge_orientation(&g, &rev, 1).unwrap(), (2, 0));
        assert_eq!(edge_orientation(&g, &rev, 0), Err(Error::LoopEdge(0)));
    }

    #[test]
    fn automorphisms() {
        let zero = GenusFunction::zero(3);
        assert_eq!(automorphism_count(&middle(), &zero, AutMode::Unlabeled), 8);
        assert_eq!(automorphism_count(&middle(), &zero, AutMode::VertexLabeled), 4);
        let gf = GenusFunction(vec![1, 0, 0]);
        assert_eq!(automorphism_count(&triangle(), &gf, AutMode::Unlabeled), 2);
        assert_eq!(automorphism_count(&triangle(), &gf, AutMode::VertexLabeled), 1);
        assert_eq!(automorphism_count(&right(), &zero, AutMode::Unlabeled), 2);
        assert_eq!(automorphism_count(&right(), &zero, AutMode::VertexLabeled), 1);
    }

    #[test]
    fn orders() {
        assert_eq!(Order::all(3).len(), 6);
        let o = Order::from_positions(vec![1, 2, 0]).unwrap();
        assert_eq!(o.vertices(), &[2, 0, 1]);
        assert!(Order::from_positions(vec![0, 0]).is_err());
    }
}
