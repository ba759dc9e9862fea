//! Exact maximization of the quadratic edge density
//! `Σ_{(u,v)∈E} δ(u)δ(v)` over the probability simplex, plus the structure
//! of its maximizers: maximum "one-arc-per-pair" cliques, blow-up
//! detection, and the integer-composition refinement `d_n`.
//!
//! All arithmetic is over arbitrary-precision rationals; no floating point
//! enters any reported value.

use crate::error::{Error, Result};
use crate::graph::Digraph;
use num::{BigInt, BigRational, One, Signed, Zero};

pub const DENSITY_CAP: usize = 14;

/// A probability vector on `V(D)` with its objective value and support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityProfile {
    pub delta: Vec<BigRational>,
    pub value: BigRational,
    pub support: Vec<usize>,
}

impl DensityProfile {
    /// Recompute `Σ_{(u,v)∈E} δ(u)δ(v)` from scratch.
    pub fn evaluate(delta: &[BigRational], d: &Digraph) -> BigRational {
        let mut v = BigRational::zero();
        for (a, b) in d.edges() {
            v += &delta[a] * &delta[b];
        }
        v
    }

    pub fn is_consistent(&self, d: &Digraph) -> bool {
        self.delta.len() == d.n()
            && self.delta.iter().all(|x| !x.is_negative())
            && self.delta.iter().sum::<BigRational>() == BigRational::one()
            && Self::evaluate(&self.delta, d) == self.value
            && self.support
                == (0..d.n()).filter(|&v| self.delta[v].is_positive()).collect::<Vec<_>>()
    }
}

/// Symmetrized quadratic form: value(δ) = ½ δᵀMδ with
/// M[u][v] = #arcs between u and v (both directions), M[u][u] = 2·[loop].
fn form_matrix(d: &Digraph) -> Vec<Vec<i64>> {
    let n = d.n();
    let mut m = vec![vec![0i64; n]; n];
    for (u, v) in d.edges() {
        if u == v {
            m[u][u] += 2;
        } else {
            m[u][v] += 1;
            m[v][u] += 1;
        }
    }
    m
}

/// Solve the bordered stationarity system on a support: find x with
/// (Mx)_u equal across the support and Σx = 1. Returns None when the system
/// is singular. (Global maximizers of minimal support always yield a
/// nonsingular system: a null direction would move along an equal-value
/// segment to a smaller support.)
fn stationary_on_support(m: &[Vec<i64>], support: &[usize]) -> Option<Vec<BigRational>> {
    let s = support.len();
    // unknowns: x_0..x_{s-1}, λ; rows: s stationarity rows then the mass row
    let mut a: Vec<Vec<BigRational>> = Vec::with_capacity(s + 1);
    for &u in support {
        let mut row: Vec<BigRational> = support
            .iter()
            .map(|&v| BigRational::from(BigInt::from(m[u][v])))
            .collect();
        row.push(BigRational::from(BigInt::from(-1)));
        row.push(BigRational::zero()); // RHS
        a.push(row);
    }
    let mut mass: Vec<BigRational> = vec![BigRational::one(); s];
    mass.push(BigRational::zero());
    mass.push(BigRational::one()); // RHS
    a.push(mass);

    // Gaussian elimination, first-nonzero pivoting
    let dim = s + 1;
    for col in 0..dim {
        let pivot = (col..dim).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..dim {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                // rows col and r are distinct, so indexing avoids a split borrow
                #[allow(clippy::needless_range_loop)]
                for c in col..=dim {
                    let sub = &a[col][c] * &f;
                    a[r][c] -= sub;
                }
            }
        }
    }
    Some((0..s).map(|i| a[i][dim].clone()).collect())
}

/// Every support whose bordered stationary system is nonsingular and whose
/// stationary point lies strictly inside the face, as a full profile.
fn positive_stationary_profiles(d: &Digraph) -> Result<Vec<DensityProfile>> {
    let n = d.n();
    if n == 0 {
        return Err(Error::domain("density needs at least one vertex"));
    }
    if n > DENSITY_CAP {
        return Err(Error::budget(format!(
            "exact density solver capped at {DENSITY_CAP} vertices, got {n}"
        )));
    }
    let m = form_matrix(d);
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let Some(x) = stationary_on_support(&m, &support) else {
            continue;
        };
        if !x.iter().all(|xi| xi.is_positive()) {
            continue;
        }
        let mut delta = vec![BigRational::zero(); n];
        for (i, &u) in support.iter().enumerate() {
            delta[u] = x[i].clone();
        }
        let value = DensityProfile::evaluate(&delta, d);
        out.push(DensityProfile { delta, value, support });
    }
    Ok(out)
}

/// Exact global maximum of the edge-density objective over the simplex,
/// with one maximizer. Ties between maximizers are broken by
/// lexicographically smallest support, then lexicographically largest δ.
pub fn density(d: &Digraph) -> Result<(BigRational, DensityProfile)> {
    let mut best: Option<DensityProfile> = None;
    for cand in positive_stationary_profiles(d)? {
        best = Some(match best {
            None => cand,
            Some(b) => pick_better(b, cand),
        });
    }
    // singleton supports are always nonsingular, so a candidate exists
    let profile = best.expect("at least one support yields a stationary point");
    debug_assert!(profile.is_consistent(d));
    Ok((profile.value.clone(), profile))
}

/// All maximizers of the density objective with set-maximal support, sorted
/// by support. Interior stationary points of maximal faces achieve the
/// optimum on every sub-face they dominate, so keeping only ⊆-maximal
/// supports removes those duplicates while keeping genuinely distinct
/// maximizers (e.g. one per component of a disjoint union).
pub fn densest_maximizers(d: &Digraph) -> Result<(BigRational, Vec<DensityProfile>)> {
    let profiles = positive_stationary_profiles(d)?;
    let top = profiles
        .iter()
        .map(|p| p.value.clone())
        .max()
        .expect("at least one support yields a stationary point");
    let at_top: Vec<DensityProfile> =
        profiles.into_iter().filter(|p| p.value == top).collect();
    let mut maximal: Vec<DensityProfile> = Vec::new();
    for p in &at_top {
        let dominated = at_top.iter().any(|q| {
            q.support.len() > p.support.len()
                && p.support.iter().all(|v| q.support.contains(v))
        });
        if !dominated {
            maximal.push(p.clone());
        }
    }
    maximal.sort_by(|a, b| a.support.cmp(&b.support));
    debug_assert!(maximal.iter().all(|p| p.is_consistent(d)));
    Ok((top, maximal))
}

fn pick_better(a: DensityProfile, b: DensityProfile) -> DensityProfile {
    match b.value.cmp(&a.value) {
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Equal => match a.support.cmp(&b.support) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => {
                if b.delta > a.delta {
                    b
                } else {
                    a
                }
            }
        },
    }
}

/// Maximum size of a vertex set pairwise joined by exactly one arc, with
/// the lexicographically first witness. Equals the clique number of the
/// underlying graph; input must be oriented.
pub fn max_oriented_clique(d: &Digraph) -> Result<(usize, Vec<usize>)> {
    if !d.is_oriented() {
        return Err(Error::domain(
            "maximum one-arc-per-pair subgraphs are defined for oriented digraphs \
             (no loops, no 2-cycles)",
        ));
    }
    let n = d.n();
    let u = d.underlying();
    // adjacency masks of the underlying graph (cap ≤ 64 vertices here)
    if n > 64 {
        return Err(Error::budget("clique search capped at 64 vertices"));
    }
    let adj: Vec<u64> = (0..n)
        .map(|a| (0..n).filter(|&b| u.has_edge(a, b)).fold(0u64, |acc, b| acc | 1 << b))
        .collect();

    fn grow(adj: &[u64], n: usize, from: usize, allowed: u64, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if cur.len() + (allowed >> from).count_ones() as usize <= best.len() {
            return; // cannot beat the incumbent
        }
        for v in from..n {
            if allowed >> v & 1 == 1 {
                cur.push(v);
                if cur.len() > best.len() {
                    *best = cur.clone();
                }
                grow(adj, n, v + 1, allowed & adj[v], cur, best);
                cur.pop();
            }
        }
    }

    let mut best = Vec::new();
    let mut cur = Vec::new();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    grow(&adj, n, 0, all, &mut cur, &mut best);
    if best.is_empty() && n > 0 {
        best = vec![0]; // a single vertex is always such a set
    }
    Ok((best.len(), best))
}

/// Copy-class structure of a maximizer's support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowUpStructure {
    pub k: usize,
    pub classes: Vec<Vec<usize>>,
    pub class_masses: Vec<BigRational>,
}

/// Partition a maximizer's support into twin classes and verify the induced
/// subgraph is an orientation of a blow-up of a complete graph with each
/// class carrying mass exactly 1/k. `None` means verification failed, which
/// indicates a solver bug — maximizers always have this shape for oriented
/// inputs.
pub fn blow_up_structure(d: &Digraph, profile: &DensityProfile) -> Result<Option<BlowUpStructure>> {
    if !d.is_oriented() {
        return Err(Error::domain("blow-up structure is defined for oriented digraphs"));
    }
    if !profile.is_consistent(d) {
        return Err(Error::domain("profile does not evaluate consistently"));
    }
    let (max_value, _) = density(d)?;
    if profile.value != max_value {
        return Err(Error::domain("profile is not a maximizer"));
    }

    let s = &profile.support;
    // twins: non-adjacent, with identical neighbourhoods among the rest
    let twin = |u: usize, v: usize| {
        !d.has_edge(u, v)
            && !d.has_edge(v, u)
            && s.iter().all(|&w| {
                w == u
                    || w == v
                    || (d.has_edge(u, w) == d.has_edge(v, w) && d.has_edge(w, u) == d.has_edge(w, v))
            })
    };
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &u in s {
        match classes.iter_mut().find(|c| twin(c[0], u)) {
            Some(c) => c.push(u),
            None => classes.push(vec![u]),
        }
    }
    // cross pairs must be joined by exactly one arc, uniformly per class pair
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            let forward = d.has_edge(classes[i][0], classes[j][0]);
            for &a in &classes[i] {
                for &b in &classes[j] {
                    let ok = if forward {
                        d.has_edge(a, b) && !d.has_edge(b, a)
                    } else {
                        d.has_edge(b, a) && !d.has_edge(a, b)
                    };
                    if !ok {
                        return Ok(None);
                    }
                }
            }
        }
    }
    let k = classes.len();
    let kth = BigRational::new(BigInt::one(), BigInt::from(k as i64));
    let mut masses = Vec::with_capacity(k);
    for c in &classes {
        let mass: BigRational = c.iter().map(|&v| profile.delta[v].clone()).sum();
        if mass != kth {
            return Ok(None);
        }
        masses.push(mass);
    }
    Ok(Some(BlowUpStructure { k, classes, class_masses: masses }))
}

/// The integer-composition density at size n over an ℓ-element support that
/// induces pairwise single arcs: d_n = (1/n²)·max Σ_{i<j} x_i x_j over
/// non-negative integer compositions of n, attained at near-equal parts.
/// Returns the value and a maximizing composition (descending order).
pub fn finite_density(
    d: &Digraph,
    support: &[usize],
    n: usize,
) -> Result<(BigRational, Vec<usize>)> {
    if support.windows(2).any(|w| w[0] >= w[1])
        || support.last().is_some_and(|&v| v >= d.n())
    {
        return Err(Error::domain("support must be a strictly increasing in-range vertex list"));
    }
    if support.is_empty() {
        return Err(Error::domain("support must be non-empty"));
    }
    for (i, &u) in support.iter().enumerate() {
        for &v in &support[i + 1..] {
            let one_arc = (d.has_edge(u, v) as usize) + (d.has_edge(v, u) as usize);
            if one_arc != 1 || d.has_edge(u, u) || d.has_edge(v, v) {
                return Err(Error::domain(
                    "support must induce pairwise single arcs (an orientation of a complete graph)",
                ));
            }
        }
    }
    let ell = support.len();
    if n == 0 {
        return Ok((BigRational::zero(), vec![0; ell]));
    }
    // near-equal parts maximize: moving a unit from a largest part to a
    // smallest strictly increases the pair sum while parts differ by ≥ 2
    let q = n / ell;
    let r = n % ell;
    let comp: Vec<usize> = (0..ell).map(|i| if i < r { q + 1 } else { q }).collect();
    let sum_sq: u128 = comp.iter().map(|&x| (x as u128) * (x as u128)).sum();
    let pairs = ((n as u128) * (n as u128) - sum_sq) / 2;
    let value = BigRational::new(BigInt::from(pairs), BigInt::from((n as u128) * (n as u128)));
    Ok((value, comp))
}
