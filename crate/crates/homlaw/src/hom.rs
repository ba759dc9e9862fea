//! Homomorphism search, counting, cores, automorphisms, isomorphism, the
//! canonical orbit formulas of a core, and dismantling retractions.
//!
//! All searches assign source vertices in increasing order and try target
//! candidates in increasing order, so the first witness found is a
//! deterministic function of the input.

use crate::bits;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use num::BigUint;

/// A witness homomorphism: `map[x]` is the image of source vertex `x`.
/// Every edge (x,y) of the source maps to an edge of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hom {
    pub map: Vec<usize>,
}

impl Hom {
    /// Composition `after ∘ self` (apply `self` first).
    pub fn then(&self, after: &Hom) -> Hom {
        Hom { map: self.map.iter().map(|&v| after.map[v]).collect() }
    }

    pub fn is_valid(&self, source: &Digraph, target: &Digraph) -> bool {
        self.map.len() == source.n()
            && self.map.iter().all(|&v| v < target.n())
            && source
                .edges()
                .iter()
                .all(|&(x, y)| target.has_edge(self.map[x], self.map[y]))
    }
}

/// Search state: one candidate-set row per source vertex.
struct Domains {
    w: usize,
    rows: Vec<u64>,
}

impl Domains {
    fn full(g: &Digraph, h: &Digraph) -> Domains {
        let w = bits::words_for(h.n()).max(1);
        let mut rows = vec![0u64; g.n() * w];
        for u in 0..g.n() {
            let row = &mut rows[u * w..(u + 1) * w];
            for v in 0..h.n() {
                bits::set(row, v);
            }
            // a looped source vertex can only go to a looped target vertex
            if g.has_edge(u, u) {
                for v in 0..h.n() {
                    if !h.has_edge(v, v) {
                        bits::clear(row, v);
                    }
                }
            }
        }
        Domains { w, rows }
    }

    fn row(&self, u: usize) -> &[u64] {
        &self.rows[u * self.w..(u + 1) * self.w]
    }

    fn row_mut(&mut self, u: usize) -> &mut [u64] {
        &mut self.rows[u * self.w..(u + 1) * self.w]
    }
}

/// Arc-consistency propagation: shrink domains until every arc (u,v) of `g`
/// supports every remaining candidate. Returns false on a wiped-out domain.
fn propagate(g: &Digraph, h: &Digraph, dom: &mut Domains) -> bool {
    let edges = g.edges();
    let mut dirty = true;
    while dirty {
        dirty = false;
        for &(u, v) in &edges {
            // a ∈ dom(u) needs an out-neighbour in dom(v)
            let mut keep = vec![0u64; dom.w];
            for a in bits::iter_ones(dom.row(u)) {
                if bits::intersects(h.out_row(a), dom.row(v)) {
                    bits::set(&mut keep, a);
                }
            }
            if keep != dom.row(u) {
                if bits::is_empty(&keep) {
                    return false;
                }
                dom.row_mut(u).copy_from_slice(&keep);
                dirty = true;
            }
            // b ∈ dom(v) needs an in-neighbour in dom(u)
            let mut keep = vec![0u64; dom.w];
            for b in bits::iter_ones(dom.row(v)) {
                if bits::intersects(h.in_row(b), dom.row(u)) {
                    bits::set(&mut keep, b);
                }
            }
            if keep != dom.row(v) {
                if bits::is_empty(&keep) {
                    return false;
                }
                dom.row_mut(v).copy_from_slice(&keep);
                dirty = true;
            }
        }
    }
    true
}

fn search(g: &Digraph, h: &Digraph, dom: &mut Domains, next: usize, map: &mut Vec<usize>) -> bool {
    if next == g.n() {
        return true;
    }
    let candidates: Vec<usize> = bits::iter_ones(dom.row(next)).collect();
    for a in candidates {
        // check consistency against already-assigned neighbours
        let ok = (0..next).all(|u| {
            (!g.has_edge(u, next) || h.has_edge(map[u], a))
                && (!g.has_edge(next, u) || h.has_edge(a, map[u]))
        }) && (!g.has_edge(next, next) || h.has_edge(a, a));
        if !ok {
            continue;
        }
        let saved = dom.rows.clone();
        let row = dom.row_mut(next);
        for w in row.iter_mut() {
            *w = 0;
        }
        bits::set(dom.row_mut(next), a);
        if propagate(g, h, dom) {
            map.push(a);
            if search(g, h, dom, next + 1, map) {
                return true;
            }
            map.pop();
        }
        dom.rows = saved;
    }
    false
}

/// First homomorphism G → H in lexicographic order, if any.
pub fn find_hom(g: &Digraph, h: &Digraph) -> Option<Hom> {
    if g.n() == 0 {
        return Some(Hom { map: vec![] });
    }
    if h.n() == 0 {
        return None;
    }
    let mut dom = Domains::full(g, h);
    if !propagate(g, h, &mut dom) {
        return None;
    }
    let mut map = Vec::with_capacity(g.n());
    if search(g, h, &mut dom, 0, &mut map) {
        let hom = Hom { map };
        debug_assert!(hom.is_valid(g, h));
        Some(hom)
    } else {
        None
    }
}

pub fn hom_exists(g: &Digraph, h: &Digraph) -> bool {
    find_hom(g, h).is_some()
}

/// Exact number of homomorphisms G → H.
pub fn count_homs(g: &Digraph, h: &Digraph) -> BigUint {
    fn rec(g: &Digraph, h: &Digraph, next: usize, map: &mut Vec<usize>) -> BigUint {
        if next == g.n() {
            return BigUint::from(1u32);
        }
        let mut total = BigUint::from(0u32);
        for a in 0..h.n() {
            let ok = (0..next).all(|u| {
                (!g.has_edge(u, next) || h.has_edge(map[u], a))
                    && (!g.has_edge(next, u) || h.has_edge(a, map[u]))
            }) && (!g.has_edge(next, next) || h.has_edge(a, a));
            if ok {
                map.push(a);
                total += rec(g, h, next + 1, map);
                map.pop();
            }
        }
        total
    }
    rec(g, h, 0, &mut Vec::new())
}

/// Find a homomorphism with a prescribed image for one vertex. Used for
/// orbit-formula evaluation (the formula's satisfying set is exactly the set
/// of pins that extend to a full homomorphism).
pub fn find_hom_pinned(g: &Digraph, h: &Digraph, pin_src: usize, pin_dst: usize) -> Option<Hom> {
    if pin_src >= g.n() || pin_dst >= h.n() {
        return None;
    }
    let mut dom = Domains::full(g, h);
    let row = dom.row_mut(pin_src);
    if !bits::get(row, pin_dst) {
        return None;
    }
    for w in row.iter_mut() {
        *w = 0;
    }
    bits::set(dom.row_mut(pin_src), pin_dst);
    if !propagate(g, h, &mut dom) {
        return None;
    }
    let mut map = Vec::with_capacity(g.n());
    if search(g, h, &mut dom, 0, &mut map) {
        Some(Hom { map })
    } else {
        None
    }
}

// ---- cores ----------------------------------------------------------------

/// The core: an induced subgraph that is itself a core and homomorphically
/// equivalent to `g`. Deterministic: at each step the lexicographically first
/// removable vertex (in the current labelling) goes.
///
/// Returns the core and the surviving original-vertex labels.
pub fn core_of(g: &Digraph) -> (Digraph, Vec<usize>) {
    let mut cur = g.clone();
    let mut labels: Vec<usize> = (0..g.n()).collect();
    'outer: loop {
        for v in 0..cur.n() {
            let smaller = cur.delete_vertex(v).expect("vertex in range");
            if hom_exists(&cur, &smaller) {
                cur = smaller;
                labels.remove(v);
                continue 'outer;
            }
        }
        return (cur, labels);
    }
}

/// A digraph is a core iff it has no endomorphism missing a vertex.
pub fn is_core(g: &Digraph) -> bool {
    (0..g.n()).all(|v| {
        let smaller = g.delete_vertex(v).expect("vertex in range");
        !hom_exists(g, &smaller)
    })
}

pub fn hom_equivalent(g: &Digraph, h: &Digraph) -> bool {
    hom_exists(g, h) && hom_exists(h, g)
}

// ---- automorphisms and isomorphism -----------------------------------------

pub const AUT_CAP: usize = 10;

/// All automorphisms, in lexicographic order of the permutation. Brute-force
/// backtracking with degree pruning; refuses above [`AUT_CAP`] unless
/// `override_cap`.
pub fn automorphisms(g: &Digraph, override_cap: bool) -> Result<Vec<Hom>> {
    if g.n() > AUT_CAP && !override_cap {
        return Err(Error::budget(format!(
            "automorphism search on {} vertices exceeds the cap of {AUT_CAP}",
            g.n()
        )));
    }
    let mut out = Vec::new();
    let mut map = Vec::with_capacity(g.n());
    let mut used = vec![false; g.n()];
    fn rec(
        g: &Digraph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Hom>,
    ) {
        let next = map.len();
        if next == g.n() {
            out.push(Hom { map: map.clone() });
            return;
        }
        for a in 0..g.n() {
            if used[a]
                || g.out_degree(a) != g.out_degree(next)
                || g.in_degree(a) != g.in_degree(next)
            {
                continue;
            }
            // edges to assigned vertices must be preserved and reflected
            let ok = (0..next).all(|u| {
                g.has_edge(u, next) == g.has_edge(map[u], a)
                    && g.has_edge(next, u) == g.has_edge(a, map[u])
            }) && g.has_edge(next, next) == g.has_edge(a, a);
            if ok {
                used[a] = true;
                map.push(a);
                rec(g, map, used, out);
                map.pop();
                used[a] = false;
            }
        }
    }
    rec(g, &mut map, &mut used, &mut out);
    Ok(out)
}

pub fn is_rigid(g: &Digraph, override_cap: bool) -> Result<bool> {
    Ok(automorphisms(g, override_cap)?.len() == 1)
}

/// Orbits of the automorphism group, each sorted, ordered by minimum element.
pub fn orbits(g: &Digraph, override_cap: bool) -> Result<Vec<Vec<usize>>> {
    let auts = automorphisms(g, override_cap)?;
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        if seen[v] {
            continue;
        }
        let mut orbit: Vec<usize> = auts.iter().map(|a| a.map[v]).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &u in &orbit {
            seen[u] = true;
        }
        out.push(orbit);
    }
    Ok(out)
}

/// Brute-force digraph isomorphism (desk scale).
pub fn is_isomorphic(g: &Digraph, h: &Digraph) -> bool {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return false;
    }
    fn rec(g: &Digraph, h: &Digraph, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let next = map.len();
        if next == g.n() {
            return true;
        }
        for a in 0..h.n() {
            if used[a]
                || g.out_degree(next) != h.out_degree(a)
                || g.in_degree(next) != h.in_degree(a)
            {
                continue;
            }
            let ok = (0..next).all(|u| {
                g.has_edge(u, next) == h.has_edge(map[u], a)
                    && g.has_edge(next, u) == h.has_edge(a, map[u])
            }) && g.has_edge(next, next) == h.has_edge(a, a);
            if ok {
                used[a] = true;
                map.push(a);
                if rec(g, h, map, used) {
                    return true;
                }
                map.pop();
                used[a] = false;
            }
        }
        false
    }
    rec(g, h, &mut Vec::new(), &mut vec![false; h.n()])
}

// ---- canonical orbit formulas ----------------------------------------------

/// The canonical conjunctive query of a core `D` with vertex `u` left free:
/// one variable per vertex of `D`, one `E`-atom per edge, all variables but
/// `x_u` existentially quantified. On `D` itself its satisfying set is the
/// Aut(D)-orbit of `u`; on an arbitrary `G` a vertex `w` satisfies it iff
/// some homomorphism D → G sends `u` to `w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPFormula {
    pub free_variable: String,
    pub quantified_variables: Vec<String>,
    /// Edge atoms as variable-name pairs.
    pub atoms: Vec<(String, String)>,
    /// The defining digraph and its freed vertex, kept for fast evaluation.
    pub pattern: Digraph,
    pub free_vertex: usize,
}

impl PPFormula {
    /// S-expression rendering: `(exists (y0 y1) (and (E x y0) (E y0 y1)))`.
    pub fn to_sexpr(&self) -> String {
        let quant = self.quantified_variables.join(" ");
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, b)| format!("(E {a} {b})"))
            .collect();
        let body = match atoms.len() {
            0 => "true".to_string(),
            1 => atoms[0].clone(),
            _ => format!("(and {})", atoms.join(" ")),
        };
        format!("(exists ({quant}) {body})")
    }
}

/// Build the orbit formula of vertex `u` in the core `D`. Rejects non-cores:
/// the orbit characterization needs every endomorphism to be an
/// automorphism.
pub fn canonical_orbit_formula(d: &Digraph, u: usize) -> Result<PPFormula> {
    if u >= d.n() {
        return Err(Error::domain("vertex out of range"));
    }
    if !is_core(d) {
        return Err(Error::domain(
            "orbit formulas are defined over cores; reduce with core_of first",
        ));
    }
    let var = |v: usize| if v == u { "x".to_string() } else { format!("y{v}") };
    let quantified = (0..d.n()).filter(|&v| v != u).map(var).collect();
    let atoms = d.edges().iter().map(|&(a, b)| (var(a), var(b))).collect();
    Ok(PPFormula {
        free_variable: "x".to_string(),
        quantified_variables: quantified,
        atoms,
        pattern: d.clone(),
        free_vertex: u,
    })
}

/// Satisfying set of an orbit formula in `G`: all vertices `w` such that the
/// pattern maps into `G` with the free vertex pinned to `w`.
pub fn evaluate_pp(phi: &PPFormula, g: &Digraph) -> Vec<usize> {
    (0..g.n())
        .filter(|&w| find_hom_pinned(&phi.pattern, g, phi.free_vertex, w).is_some())
        .collect()
}

// ---- dismantling -----------------------------------------------------------

/// A successful dismantling run: vertices in removal order, each with the
/// vertex it folds onto. Targets are normalized to the surviving base, so
/// replaying the list as a single map is a retraction onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DismantleOrder {
    pub removed: Vec<(usize, usize)>,
}

const DISMANTLE_BACKTRACK_BUDGET: usize = 1_000_000;

/// Can `y` fold onto `z` in the graph restricted to `alive`? Requires
/// out/in-neighbourhoods (among alive vertices, `y` excluded) dominated by
/// `z`'s, with a loop at `y` demanding one at `z`.
fn foldable(g: &Digraph, alive: &[u64], y: usize, z: usize) -> bool {
    if y == z || !bits::get(alive, z) {
        return false;
    }
    if g.has_edge(y, y) && !g.has_edge(z, z) {
        return false;
    }
    for x in bits::iter_ones(alive) {
        if x == y {
            continue;
        }
        if g.has_edge(y, x) && !g.has_edge(z, x) {
            return false;
        }
        if g.has_edge(x, y) && !g.has_edge(x, z) {
            return false;
        }
    }
    true
}

/// Dismantle `A` onto the subgraph induced by `b_vertices`: repeatedly fold
/// away a vertex outside the base whose neighbourhoods are dominated by a
/// surviving vertex. Greedy first (always legal folds commute in practice),
/// with a bounded backtracking fallback since confluence is not relied on.
/// Returns the order with fold targets normalized into the base.
pub fn dismantles_to(a: &Digraph, b_vertices: &[usize]) -> Result<Option<DismantleOrder>> {
    let w = bits::words_for(a.n()).max(1);
    let mut base = vec![0u64; w];
    for &v in b_vertices {
        if v >= a.n() {
            return Err(Error::domain("base vertex out of range"));
        }
        bits::set(&mut base, v);
    }
    let mut alive = vec![0u64; w];
    for v in 0..a.n() {
        bits::set(&mut alive, v);
    }

    // greedy loop: first (y,z) in lexicographic order
    let mut removed = Vec::new();
    'greedy: loop {
        if bits::count(&alive) == b_vertices.len() {
            return Ok(Some(normalize(a.n(), removed, &base)));
        }
        let live: Vec<usize> = bits::iter_ones(&alive).collect();
        for &y in &live {
            if bits::get(&base, y) {
                continue;
            }
            for &z in &live {
                if foldable(a, &alive, y, z) {
                    bits::clear(&mut alive, y);
                    removed.push((y, z));
                    continue 'greedy;
                }
            }
        }
        break;
    }

    // greedy stalled: restart with full backtracking over fold choices
    let mut alive = vec![0u64; w];
    for v in 0..a.n() {
        bits::set(&mut alive, v);
    }
    let mut budget = DISMANTLE_BACKTRACK_BUDGET;
    let mut order = Vec::new();
    if backtrack(a, &mut alive, &base, b_vertices.len(), &mut order, &mut budget) {
        Ok(Some(normalize(a.n(), order, &base)))
    } else {
        Ok(None)
    }
}

fn backtrack(
    a: &Digraph,
    alive: &mut Vec<u64>,
    base: &[u64],
    base_len: usize,
    order: &mut Vec<(usize, usize)>,
    budget: &mut usize,
) -> bool {
    if bits::count(alive) == base_len {
        return bits::subset(base, alive);
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let ys: Vec<usize> = bits::iter_ones(alive).filter(|&y| !bits::get(base, y)).collect();
    for y in ys {
        for z in bits::iter_ones(alive).collect::<Vec<_>>() {
            if foldable(a, alive, y, z) {
                bits::clear(alive, y);
                order.push((y, z));
                if backtrack(a, alive, base, base_len, order, budget) {
                    return true;
                }
                order.pop();
                bits::set(alive, y);
            }
        }
    }
    false
}

/// Rewrite fold targets so each removed vertex points at its final base
/// destination (targets that were themselves removed later are chased).
fn normalize(n: usize, removed: Vec<(usize, usize)>, base: &[u64]) -> DismantleOrder {
    let mut dest: Vec<usize> = (0..n).collect();
    for &(y, z) in removed.iter().rev() {
        dest[y] = dest[z];
    }
    debug_assert!(removed.iter().all(|&(y, _)| bits::get(base, dest[y])));
    DismantleOrder { removed: removed.iter().map(|&(y, _)| (y, dest[y])).collect() }
}

/// The retraction a dismantle order encodes: identity on the base, fold
/// destination elsewhere.
pub fn retraction_of(a: &Digraph, order: &DismantleOrder) -> Hom {
    let mut map: Vec<usize> = (0..a.n()).collect();
    for &(y, dest) in &order.removed {
        map[y] = dest;
    }
    Hom { map }
}
