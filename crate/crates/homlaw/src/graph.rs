//! Digraph and undirected-graph types, canonical constructors, and the
//! structure-building operations (unions, products, blow-ups, enumeration)
//! everything else is written against.
//!
//! Vertices are `0..n`. Adjacency is stored as bit rows in both directions,
//! so neighbourhood tests are word operations; the edge *set* semantics of
//! the types (no duplicates) is inherent in the representation.

use crate::bits;
use crate::error::{Error, Result};
use std::collections::BTreeSet;

/// A finite digraph on vertices `0..n`. Loops and 2-cycles are permitted
/// unless an operation states otherwise.
#[derive(Clone, Debug)]
pub struct Digraph {
    n: usize,
    w: usize,
    out: Vec<u64>,
    inn: Vec<u64>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.out == other.out
    }
}
impl Eq for Digraph {}

impl std::hash::Hash for Digraph {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.n.hash(state);
        self.out.hash(state);
    }
}

impl PartialOrd for Digraph {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Digraph {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, &self.out).cmp(&(other.n, &other.out))
    }
}

impl Digraph {
    /// Edgeless digraph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let w = bits::words_for(n).max(1);
        Digraph { n, w, out: vec![0; n * w], inn: vec![0; n * w] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Digraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u < self.n && v < self.n);
        bits::set(&mut self.out[u * self.w..(u + 1) * self.w], v);
        bits::set(&mut self.inn[v * self.w..(v + 1) * self.w], u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::get(self.out_row(u), v)
    }

    /// Out-neighbourhood of `u` as a bit row.
    pub fn out_row(&self, u: usize) -> &[u64] {
        &self.out[u * self.w..(u + 1) * self.w]
    }

    /// In-neighbourhood of `v` as a bit row.
    pub fn in_row(&self, v: usize) -> &[u64] {
        &self.inn[v * self.w..(v + 1) * self.w]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        bits::count(self.out_row(u))
    }

    pub fn in_degree(&self, v: usize) -> usize {
        bits::count(self.in_row(v))
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.out_degree(u)).sum()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for v in bits::iter_ones(self.out_row(u)) {
                es.push((u, v));
            }
        }
        es
    }

    // ---- named constructors -------------------------------------------

    /// Transitive tournament on `k` vertices: edge (i,j) for every i < j.
    pub fn transitive_tournament(k: usize) -> Result<Self> {
        require_positive(k)?;
        let mut g = Digraph::empty(k);
        for i in 0..k {
            for j in i + 1..k {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    /// Directed path on `k` vertices: edges (0,1), (1,2), …, (k−2,k−1).
    pub fn directed_path(k: usize) -> Result<Self> {
        require_positive(k)?;
        let mut g = Digraph::empty(k);
        for i in 0..k.saturating_sub(1) {
            g.add_edge(i, i + 1);
        }
        Ok(g)
    }

    /// Directed cycle on `k` vertices: edges (u,v) with u = v+1 mod k.
    /// k = 1 yields the single looped vertex, k = 2 the double edge.
    pub fn directed_cycle(k: usize) -> Result<Self> {
        require_positive(k)?;
        let mut g = Digraph::empty(k);
        for v in 0..k {
            g.add_edge((v + 1) % k, v);
        }
        Ok(g)
    }

    // ---- combination operations ----------------------------------------

    /// Disjoint union; the second operand's vertices are relabelled past the
    /// first's.
    pub fn disjoint_union(&self, other: &Digraph) -> Digraph {
        let mut g = Digraph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
        }
        for (u, v) in other.edges() {
            g.add_edge(self.n + u, self.n + v);
        }
        g
    }

    /// Categorical product: vertex (a,b) ↦ a·|V(other)|+b, with an edge
    /// ((a1,a2),(b1,b2)) iff (a1,b1) and (a2,b2) are edges.
    pub fn product(&self, other: &Digraph) -> Digraph {
        let n2 = other.n;
        let mut g = Digraph::empty(self.n * n2);
        for (a1, b1) in self.edges() {
            for (a2, b2) in other.edges() {
                g.add_edge(a1 * n2 + a2, b1 * n2 + b2);
            }
        }
        g
    }

    /// Blow-up: vertex `v` becomes `mult[v]` twins with identical in/out
    /// neighbourhoods and no edges among themselves. Requires a loopless
    /// input (a loop has no twin-consistent reading) and positive
    /// multiplicities.
    pub fn blow_up(&self, mult: &[usize]) -> Result<Digraph> {
        if mult.len() != self.n {
            return Err(Error::domain("multiplicity list length must equal vertex count"));
        }
        if mult.contains(&0) {
            return Err(Error::domain("blow-up multiplicities must be positive"));
        }
        if (0..self.n).any(|v| self.has_edge(v, v)) {
            return Err(Error::domain("blow-up requires a loopless digraph"));
        }
        let mut offset = vec![0usize; self.n + 1];
        for v in 0..self.n {
            offset[v + 1] = offset[v] + mult[v];
        }
        let mut g = Digraph::empty(offset[self.n]);
        for (u, v) in self.edges() {
            for i in 0..mult[u] {
                for j in 0..mult[v] {
                    g.add_edge(offset[u] + i, offset[v] + j);
                }
            }
        }
        Ok(g)
    }

    /// Induced subgraph on a strictly increasing vertex list, relabelled to
    /// `0..verts.len()` in the given order.
    pub fn induced(&self, verts: &[usize]) -> Result<Digraph> {
        if verts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("vertex subset must be strictly increasing"));
        }
        if verts.last().is_some_and(|&v| v >= self.n) {
            return Err(Error::domain("vertex subset out of range"));
        }
        let mut g = Digraph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }

    pub fn delete_vertex(&self, v: usize) -> Result<Digraph> {
        if v >= self.n {
            return Err(Error::domain("vertex out of range"));
        }
        let verts: Vec<usize> = (0..self.n).filter(|&u| u != v).collect();
        self.induced(&verts)
    }

    /// Underlying undirected graph: forget orientation, drop loops.
    pub fn underlying(&self) -> UGraph {
        let mut g = UGraph::empty(self.n);
        for (u, v) in self.edges() {
            if u != v {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Weakly connected components (arc direction ignored), each a sorted
    /// vertex list, ordered by smallest member.
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![s];
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for v in
                    bits::iter_ones(self.out_row(u)).chain(bits::iter_ones(self.in_row(u)))
                {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    // ---- classification -------------------------------------------------

    pub fn is_irreflexive(&self) -> bool {
        (0..self.n).all(|v| !self.has_edge(v, v))
    }

    /// Oriented: irreflexive with an antisymmetric edge relation (no
    /// 2-cycles).
    pub fn is_oriented(&self) -> bool {
        self.is_irreflexive()
            && self.edges().iter().all(|&(u, v)| !self.has_edge(v, u))
    }

    pub fn is_symmetric_irreflexive(&self) -> bool {
        self.is_irreflexive()
            && self.edges().iter().all(|&(u, v)| self.has_edge(v, u))
    }

    /// No directed cycle (a loop counts as a cycle).
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm: repeatedly strip in-degree-0 vertices.
        let mut indeg: Vec<usize> = (0..self.n).map(|v| self.in_degree(v)).collect();
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for v in bits::iter_ones(self.out_row(u)) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    stack.push(v);
                }
            }
        }
        seen == self.n
    }

    /// Orientation of a tree: oriented, and the underlying graph is
    /// connected and acyclic.
    pub fn is_oriented_tree(&self) -> bool {
        self.is_oriented() && self.underlying().is_tree()
    }

    /// Exactly one arc per vertex pair, no loops, no directed cycles (an
    /// acyclic tournament is transitive). Needs at least one vertex.
    pub fn is_transitive_tournament(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        for u in 0..self.n {
            if self.has_edge(u, u) {
                return false;
            }
            for v in u + 1..self.n {
                if (self.has_edge(u, v) as u8) + (self.has_edge(v, u) as u8) != 1 {
                    return false;
                }
            }
        }
        self.is_acyclic()
    }

    pub fn classify(&self) -> DigraphClass {
        DigraphClass {
            is_oriented: self.is_oriented(),
            is_oriented_tree: self.is_oriented_tree(),
            is_acyclic: self.is_acyclic(),
            is_symmetric_irreflexive: self.is_symmetric_irreflexive(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DigraphClass {
    pub is_oriented: bool,
    pub is_oriented_tree: bool,
    pub is_acyclic: bool,
    pub is_symmetric_irreflexive: bool,
}

fn require_positive(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::domain("vertex count must be at least 1"))
    } else {
        Ok(())
    }
}

/// An undirected simple graph (no loops) on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UGraph {
    n: usize,
    w: usize,
    adj: Vec<u64>,
}

impl UGraph {
    pub fn empty(n: usize) -> Self {
        let w = bits::words_for(n).max(1);
        UGraph { n, w, adj: vec![0; n * w] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = UGraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u},{v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::domain("undirected graphs have no loops"));
            }
            g.add_edge(u, v);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v && u < self.n && v < self.n);
        bits::set(&mut self.adj[u * self.w..(u + 1) * self.w], v);
        bits::set(&mut self.adj[v * self.w..(v + 1) * self.w], u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bits::get(self.row(u), v)
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.w..(u + 1) * self.w]
    }

    pub fn degree(&self, u: usize) -> usize {
        bits::count(self.row(u))
    }

    /// Edges as pairs (u,v) with u < v, lexicographic.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut es = Vec::new();
        for u in 0..self.n {
            for v in bits::iter_ones(self.row(u)) {
                if u < v {
                    es.push((u, v));
                }
            }
        }
        es
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn complete(k: usize) -> Result<Self> {
        require_positive(k)?;
        let mut g = UGraph::empty(k);
        for i in 0..k {
            for j in i + 1..k {
                g.add_edge(i, j);
            }
        }
        Ok(g)
    }

    pub fn cycle(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::domain("undirected cycles need at least 3 vertices"));
        }
        let mut g = UGraph::empty(k);
        for i in 0..k {
            g.add_edge(i, (i + 1) % k);
        }
        Ok(g)
    }

    /// The Mycielskian of C_5: 11 vertices, 20 edges, triangle-free,
    /// chromatic number 4. Vertices 0..5 are the cycle, 5..10 its shadow,
    /// 10 the apex.
    pub fn grotzsch() -> Self {
        let mut g = UGraph::empty(11);
        for i in 0..5 {
            let j = (i + 1) % 5;
            g.add_edge(i, j); // cycle
            g.add_edge(5 + i, j); // shadow copies see the cycle neighbours
            g.add_edge(5 + j, i);
            g.add_edge(10, 5 + i); // apex
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![0u64; self.w];
        bits::set(&mut seen, 0);
        let mut stack = vec![0usize];
        let mut cnt = 1;
        while let Some(u) = stack.pop() {
            for v in bits::iter_ones(self.row(u)) {
                if !bits::get(&seen, v) {
                    bits::set(&mut seen, v);
                    cnt += 1;
                    stack.push(v);
                }
            }
        }
        cnt == self.n
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.is_connected() && self.edge_count() == self.n - 1
    }

    /// The symmetric digraph with both arcs per edge.
    pub fn as_digraph(&self) -> Digraph {
        let mut g = Digraph::empty(self.n);
        for (u, v) in self.edges() {
            g.add_edge(u, v);
            g.add_edge(v, u);
        }
        g
    }

    pub fn induced(&self, verts: &[usize]) -> Result<UGraph> {
        if verts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("vertex subset must be strictly increasing"));
        }
        if verts.last().is_some_and(|&v| v >= self.n) {
            return Err(Error::domain("vertex subset out of range"));
        }
        let mut g = UGraph::empty(verts.len());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate() {
                if i < j && self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        Ok(g)
    }
}

// ---- labelled enumeration ------------------------------------------------

/// Caps for [`enumerate_digraphs`]; `override_cap` lifts them.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnumOptions {
    pub loopless: bool,
    pub override_cap: bool,
}

pub const ENUM_CAP_WITH_LOOPS: usize = 5;
pub const ENUM_CAP_LOOPLESS: usize = 6;

/// Number of digraphs the enumeration will yield: 2^(n²), or 2^(n(n−1))
/// loopless.
pub fn enumeration_size(n: usize, loopless: bool) -> u64 {
    let b = if loopless { n * n - n } else { n * n };
    1u64 << b
}

/// The digraph at position `index` in the enumeration order: bit b of the
/// index is arc (u,v) where b = u·n+v, skipping the diagonal when loopless.
/// Every labelled digraph on `0..n` appears exactly once as the index runs
/// over `0..enumeration_size(n, loopless)`.
pub fn digraph_from_index(n: usize, index: u64, loopless: bool) -> Digraph {
    let mut g = Digraph::empty(n);
    let mut b = 0;
    for u in 0..n {
        for v in 0..n {
            if loopless && u == v {
                continue;
            }
            if index >> b & 1 == 1 {
                g.add_edge(u, v);
            }
            b += 1;
        }
    }
    g
}

/// Deterministic stream of every labelled digraph on `0..n`, in index order.
pub fn enumerate_digraphs(
    n: usize,
    opts: EnumOptions,
) -> Result<impl Iterator<Item = Digraph>> {
    let cap = if opts.loopless { ENUM_CAP_LOOPLESS } else { ENUM_CAP_WITH_LOOPS };
    if n > cap && !opts.override_cap {
        return Err(Error::budget(format!(
            "enumeration of digraphs on {n} vertices exceeds the cap of {cap}; \
             set override_cap to proceed"
        )));
    }
    let total = enumeration_size(n, opts.loopless);
    Ok((0..total).map(move |i| digraph_from_index(n, i, opts.loopless)))
}

/// Labelled undirected graphs on `0..n`: bit b of the index is edge {u,v}
/// with b the rank of (u,v), u < v, in lexicographic order.
pub fn ugraph_from_index(n: usize, index: u64) -> UGraph {
    let mut g = UGraph::empty(n);
    let mut b = 0;
    for u in 0..n {
        for v in u + 1..n {
            if index >> b & 1 == 1 {
                g.add_edge(u, v);
            }
            b += 1;
        }
    }
    g
}

pub fn ugraph_enumeration_size(n: usize) -> u64 {
    1u64 << (n * (n - 1) / 2)
}

/// Bit position of the unordered pair {i,j}, i < j, in the upper-triangle
/// packing used by [`ugraph_iso_classes`].
fn pair_bit(i: usize, j: usize) -> u32 {
    debug_assert!(i < j);
    (j * (j - 1) / 2 + i) as u32
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for v in 0..n {
                if !p.contains(&v) {
                    let mut q = p.clone();
                    q.push(v);
                    next.push(q);
                }
            }
        }
        out = next;
    }
    out
}

/// Lexicographically least relabelling of an upper-triangle edge mask.
fn canonical_pair_mask(mask: u32, n: usize, perms: &[Vec<usize>]) -> u32 {
    let mut best = mask;
    for p in perms {
        let mut m = 0u32;
        for j in 1..n {
            for i in 0..j {
                if mask >> pair_bit(i, j) & 1 == 1 {
                    let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                    m |= 1 << pair_bit(a, b);
                }
            }
        }
        if m < best {
            best = m;
            if best == 0 {
                break;
            }
        }
    }
    best
}

/// All undirected graphs on exactly `n` vertices, one per isomorphism
/// class, in a deterministic order. Built by augmenting each (n−1)-vertex
/// representative with one new vertex attached in every possible way, then
/// deduplicating by canonical edge mask — far cheaper than filtering all
/// 2^(n(n−1)/2) labelled graphs.
pub fn ugraph_iso_classes(n: usize) -> Result<Vec<UGraph>> {
    const UGRAPH_ISO_CAP: usize = 7;
    if n > UGRAPH_ISO_CAP {
        return Err(Error::budget(format!(
            "isomorphism-class enumeration of undirected graphs is capped at \
             {UGRAPH_ISO_CAP} vertices"
        )));
    }
    if n == 0 {
        return Ok(vec![UGraph::empty(0)]);
    }
    // masks of the representatives on k vertices, grown one vertex at a time
    let mut reps: Vec<u32> = vec![0];
    for k in 2..=n {
        let perms = all_permutations(k);
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for &base in &reps {
            for att in 0u32..1 << (k - 1) {
                let mut mask = base;
                for i in 0..k - 1 {
                    if att >> i & 1 == 1 {
                        mask |= 1 << pair_bit(i, k - 1);
                    }
                }
                seen.insert(canonical_pair_mask(mask, k, &perms));
            }
        }
        reps = seen.into_iter().collect();
    }
    Ok(reps
        .into_iter()
        .map(|mask| {
            let mut g = UGraph::empty(n);
            for j in 1..n {
                for i in 0..j {
                    if mask >> pair_bit(i, j) & 1 == 1 {
                        g.add_edge(i, j);
                    }
                }
            }
            g
        })
        .collect())
}

/// Decode a Prüfer sequence over `0..n` (length n−2) into the edge list of
/// the labelled tree it names.
fn tree_from_pruefer(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    debug_assert!(n >= 2 && seq.len() == n - 2);
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("a leaf always remains");
        edges.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let mut last = (0..n).filter(|&v| degree[v] == 1);
    edges.push((last.next().unwrap(), last.next().unwrap()));
    edges
}

/// All oriented trees on exactly `n` vertices, up to isomorphism, in a
/// deterministic order. Labelled trees come from Prüfer sequences, every
/// orientation of the n−1 edges is generated, and isomorphic duplicates
/// are filtered. Sizes grow as n^(n−2)·2^(n−1) before filtering, so the
/// cap is deliberately small.
pub fn enumerate_oriented_trees(n: usize) -> Result<Vec<Digraph>> {
    const TREE_ENUM_CAP: usize = 7;
    if n > TREE_ENUM_CAP {
        return Err(Error::budget(format!(
            "oriented-tree enumeration is capped at {TREE_ENUM_CAP} vertices"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Digraph::empty(1)]);
    }
    let mut found: Vec<Digraph> = Vec::new();
    let seq_total = (n as u64).pow(n as u32 - 2);
    for code in 0..seq_total {
        let mut c = code;
        let seq: Vec<usize> = (0..n - 2)
            .map(|_| {
                let s = (c % n as u64) as usize;
                c /= n as u64;
                s
            })
            .collect();
        let edges = tree_from_pruefer(n, &seq);
        for mask in 0u32..1 << (n - 1) {
            let mut g = Digraph::empty(n);
            for (i, &(u, v)) in edges.iter().enumerate() {
                if mask >> i & 1 == 0 {
                    g.add_edge(u, v);
                } else {
                    g.add_edge(v, u);
                }
            }
            if !found.iter().any(|h| crate::hom::is_isomorphic(h, &g)) {
                found.push(g);
            }
        }
    }
    Ok(found)
}
