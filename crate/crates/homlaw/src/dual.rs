//! Duals of oriented forests.
//!
//! For a finite set F of oriented trees there is a finite digraph D — the
//! dual — such that an arbitrary digraph G maps homomorphically into D
//! exactly when no member of F maps into G. [`build_dual`] produces the
//! core of such a D, re-verifies the defining equivalence against a
//! brute-force oracle before returning, and reports structural
//! certificates (acyclicity, rigidity, dismantlability of D²) alongside.

use crate::error::{Error, Result};
use crate::graph::{digraph_from_index, enumeration_size, Digraph};
use crate::hom;
use crate::rng::Rng;
use rayon::prelude::*;

/// Intermediate construction budget: token-set enumeration and per-step
/// product sizes must stay at or below this many vertices.
pub const DUAL_STATE_CAP: usize = 1 << 16;

/// Cap on |V(D²)| for the dismantling certificate.
pub const SQUARE_DISMANTLE_CAP: usize = 4096;

/// Exhaustive sweeps above this vertex count are not attempted (2^36
/// graphs and beyond); the report's coverage fields show what actually ran.
pub const VALIDATE_EXHAUSTIVE_MAX_N: usize = 5;

/// Default internal-validation budget applied by [`build_dual`].
pub const DEFAULT_EXHAUSTIVE_N: usize = 3;
pub const DEFAULT_RANDOM_TRIALS: usize = 200;
pub const DEFAULT_RANDOM_N: usize = 6;
pub const DEFAULT_SEED: u64 = 1;

/// Checks recorded for a freshly built dual. `oracle_checked_to` is the
/// vertex bound of the exhaustive validation sweep that the dual passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificates {
    pub acyclic: bool,
    pub rigid: bool,
    pub square_dismantles: bool,
    pub oracle_checked_to: usize,
}

#[derive(Clone, Debug)]
pub struct DualResult {
    /// The dual itself, reduced to its core.
    pub dual: Digraph,
    /// Largest vertex count of any intermediate digraph built along the
    /// way, before core reduction.
    pub construction_size: usize,
    pub certificates: Certificates,
}

/// Structure-only certificate triple, computable for any digraph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuralCertificates {
    pub acyclic: bool,
    pub rigid: bool,
    pub square_dismantles: bool,
}

/// A graph witnessing that a claimed dual is wrong: exactly one of
/// "maps to the dual" and "avoids every forest member" holds.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub graph: Digraph,
    pub maps_to_dual: bool,
    pub forest_free: bool,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub pass: bool,
    pub exhaustive_checked: u64,
    pub random_checked: u64,
    pub counterexample: Option<Counterexample>,
}

/// Dual of one oriented tree with at least one arc, before core reduction.
///
/// Each arc e of the tree yields two tokens (e, tail-end) and
/// (e, head-end). A token stands for one of the two half-trees e splits
/// the tree into: carrying the token means the half-tree on the side of
/// the named endpoint maps in with that endpoint placed on the current
/// vertex. Dual vertices are sets of tokens, and a→b is permitted unless
/// some arc has its tail token at a and its head token at b — the two
/// halves would then assemble to the whole tree across the arc a→b.
///
/// A token set is *closed* when it already contains every token whose
/// branch demands (the sibling half-trees rooted at the token's endpoint)
/// are all satisfiable at some permitted neighbour. Closed sets are upward
/// closed and the compatibility test is antitone, so each demand only has
/// to be probed against its least constrained witness: the always-present
/// tokens plus the demanded one. Vertices of the raw dual are the minimal
/// closed sets. The construction is re-validated by brute force on every
/// build, so a transcription bug here cannot escape silently.
fn tree_dual_raw(t: &Digraph) -> Result<Digraph> {
    let arcs = t.edges();
    let m = arcs.len();
    debug_assert!(m >= 1, "single-vertex trees are handled by the caller");
    let ntok = 2 * m;
    if ntok >= usize::BITS as usize || (1usize << ntok) > DUAL_STATE_CAP {
        return Err(Error::budget(format!(
            "dual construction would enumerate 2^{ntok} token sets (cap {DUAL_STATE_CAP}); \
             reduce tree sizes"
        )));
    }
    // token 2e = tail end of arc e, token 2e+1 = head end
    let root = |h: usize| if h.is_multiple_of(2) { arcs[h / 2].0 } else { arcs[h / 2].1 };
    // branch demands per token: every other arc at its root must have its
    // far half present at a permitted out-neighbour (true) or in-neighbour
    // (false)
    let mut reqs: Vec<Vec<(bool, usize)>> = vec![Vec::new(); ntok];
    for (h, req) in reqs.iter_mut().enumerate() {
        let r = root(h);
        for (f, &(fs, ft)) in arcs.iter().enumerate() {
            if f == h / 2 {
                continue;
            }
            if fs == r {
                req.push((true, 2 * f + 1));
            }
            if ft == r {
                req.push((false, 2 * f));
            }
        }
    }
    let mand: u32 = (0..ntok).filter(|&h| reqs[h].is_empty()).map(|h| 1u32 << h).sum();
    let alpha =
        |a: u32, b: u32| (0..m).all(|e| a >> (2 * e) & 1 == 0 || b >> (2 * e + 1) & 1 == 0);
    let premise = |a: u32, h: usize| {
        reqs[h].iter().all(|&(out, hp)| {
            let witness = mand | 1 << hp;
            if out {
                alpha(a, witness)
            } else {
                alpha(witness, a)
            }
        })
    };
    let closed = |a: u32| (0..ntok).all(|h| a >> h & 1 == 1 || !premise(a, h));

    // smallest-first scan keeps the subset filter linear in the kept states
    let mut states: Vec<u32> = (0..(1u32 << ntok)).filter(|&a| closed(a)).collect();
    states.sort_by_key(|a| (a.count_ones(), *a));
    let mut minimal: Vec<u32> = Vec::new();
    for a in states {
        if !minimal.iter().any(|&b| b & !a == 0) {
            minimal.push(a);
        }
    }
    minimal.sort_unstable();

    let mut d = Digraph::empty(minimal.len());
    for (i, &a) in minimal.iter().enumerate() {
        for (j, &b) in minimal.iter().enumerate() {
            if alpha(a, b) {
                d.add_edge(i, j);
            }
        }
    }
    Ok(d)
}

/// Build the core dual of a non-empty set of oriented trees.
///
/// A single-vertex member forces the null dual (it maps into everything
/// except the null graph). Otherwise each member is reduced to its core,
/// members another member maps into are dropped (forbidding the smaller
/// tree already excludes everything the larger one would), per-tree duals
/// are combined by categorical product, and the result is cored. The
/// defining equivalence is then checked against the brute-force oracle
/// with the default budget; a failed check aborts the build.
pub fn build_dual(forest: &[Digraph]) -> Result<DualResult> {
    if forest.is_empty() {
        return Err(Error::domain("dual construction requires a non-empty forest"));
    }
    for t in forest {
        if !t.is_oriented_tree() {
            return Err(Error::domain(format!(
                "every forbidden digraph must be an oriented tree; got one with {} vertices and \
                 {} arcs that is not",
                t.n(),
                t.edge_count()
            )));
        }
    }

    let mut construction_size = 0usize;
    let dual = if forest.iter().any(|t| t.n() == 1) {
        Digraph::empty(0)
    } else {
        let mut kept: Vec<Digraph> = Vec::new();
        for t in forest {
            let c = hom::core_of(t).0;
            if !kept.iter().any(|k| hom::is_isomorphic(k, &c)) {
                kept.push(c);
            }
        }
        // cores are pairwise non-isomorphic, so "maps into" is now a strict
        // partial order and minimal elements carry the whole constraint
        let minimal: Vec<&Digraph> = kept
            .iter()
            .enumerate()
            .filter(|(j, c)| {
                !kept.iter().enumerate().any(|(i, o)| i != *j && hom::hom_exists(o, c))
            })
            .map(|(_, c)| c)
            .collect();

        let mut acc: Option<Digraph> = None;
        for t in minimal {
            let raw = tree_dual_raw(t)?;
            construction_size = construction_size.max(raw.n());
            let cored = hom::core_of(&raw).0;
            acc = Some(match acc {
                None => cored,
                Some(d) => {
                    let pn = d.n() * cored.n();
                    if pn > DUAL_STATE_CAP {
                        return Err(Error::budget(format!(
                            "dual product step needs {pn} vertices (cap {DUAL_STATE_CAP}); \
                             reduce tree sizes"
                        )));
                    }
                    let prod = d.product(&cored);
                    construction_size = construction_size.max(prod.n());
                    hom::core_of(&prod).0
                }
            });
        }
        acc.expect("at least one minimal tree remains")
    };
    construction_size = construction_size.max(dual.n());

    let report = validate_dual(
        forest,
        &dual,
        DEFAULT_EXHAUSTIVE_N,
        DEFAULT_RANDOM_TRIALS,
        DEFAULT_RANDOM_N,
        DEFAULT_SEED,
    );
    if !report.pass {
        let c = report.counterexample.expect("failed report carries a counterexample");
        return Err(Error::domain(format!(
            "internal dual validation failed on a {}-vertex graph with edges {:?} \
             (maps to dual: {}, avoids forest: {})",
            c.graph.n(),
            c.graph.edges(),
            c.maps_to_dual,
            c.forest_free
        )));
    }
    let s = structural_certificates(&dual)?;
    Ok(DualResult {
        dual,
        construction_size,
        certificates: Certificates {
            acyclic: s.acyclic,
            rigid: s.rigid,
            square_dismantles: s.square_dismantles,
            oracle_checked_to: DEFAULT_EXHAUSTIVE_N,
        },
    })
}

fn random_digraph(n: usize, rng: &mut Rng, k: u32) -> Digraph {
    let mut g = Digraph::empty(n);
    for u in 0..n {
        for v in 0..n {
            if rng.coin_pow2(k) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Check the dual contract: G → D ⟺ no forest member maps into G, for
/// every digraph with at most `exhaustive_n` vertices (loops included) and
/// for `random_trials` seeded random digraphs on `random_n` vertices
/// drawn at arc densities 1/2, 1/4, 1/8 in rotation. Failures are
/// reported (with the least counterexample in enumeration order), never
/// raised. Levels above [`VALIDATE_EXHAUSTIVE_MAX_N`] are skipped; the
/// `exhaustive_checked` field shows actual coverage.
pub fn validate_dual(
    forest: &[Digraph],
    dual: &Digraph,
    exhaustive_n: usize,
    random_trials: usize,
    random_n: usize,
    seed: u64,
) -> ValidationReport {
    let sides = |g: &Digraph| -> (bool, bool) {
        let maps = hom::hom_exists(g, dual);
        let free = forest.iter().all(|t| !hom::hom_exists(t, g));
        (maps, free)
    };

    let mut exhaustive_checked = 0u64;
    let mut counterexample: Option<Counterexample> = None;
    for n in 0..=exhaustive_n.min(VALIDATE_EXHAUSTIVE_MAX_N) {
        let total = enumeration_size(n, false);
        exhaustive_checked += total;
        let bad = (0..total)
            .into_par_iter()
            .filter_map(|idx| {
                let g = digraph_from_index(n, idx, false);
                let (maps, free) = sides(&g);
                if maps != free {
                    Some((idx, g, maps, free))
                } else {
                    None
                }
            })
            .min_by_key(|&(idx, ..)| idx);
        if let Some((_, graph, maps_to_dual, forest_free)) = bad {
            counterexample = Some(Counterexample { graph, maps_to_dual, forest_free });
            break;
        }
    }

    let mut random_checked = 0u64;
    if counterexample.is_none() && random_trials > 0 {
        random_checked = random_trials as u64;
        let bad = (0..random_trials)
            .into_par_iter()
            .filter_map(|trial| {
                let mut rng = Rng::substream(seed, trial as u64);
                let g = random_digraph(random_n, &mut rng, 1 + (trial as u32 % 3));
                let (maps, free) = sides(&g);
                if maps != free {
                    Some((trial, g, maps, free))
                } else {
                    None
                }
            })
            .min_by_key(|&(trial, ..)| trial);
        if let Some((_, graph, maps_to_dual, forest_free)) = bad {
            counterexample = Some(Counterexample { graph, maps_to_dual, forest_free });
        }
    }

    ValidationReport {
        pass: counterexample.is_none(),
        exhaustive_checked,
        random_checked,
        counterexample,
    }
}

/// The three structure-only certificates a healthy dual exhibits: no
/// directed cycle, no automorphism beyond the identity, and D² folds down
/// to its diagonal copy of D. Refuses digraphs beyond the automorphism or
/// dismantling caps.
pub fn structural_certificates(d: &Digraph) -> Result<StructuralCertificates> {
    let acyclic = d.is_acyclic();
    let rigid = hom::is_rigid(d, false)?;
    if d.n() * d.n() > SQUARE_DISMANTLE_CAP {
        return Err(Error::budget(format!(
            "square has {} vertices (dismantling cap {SQUARE_DISMANTLE_CAP})",
            d.n() * d.n()
        )));
    }
    let square = d.product(d);
    let diagonal: Vec<usize> = (0..d.n()).map(|v| v * d.n() + v).collect();
    let square_dismantles = hom::dismantles_to(&square, &diagonal)?.is_some();
    Ok(StructuralCertificates { acyclic, rigid, square_dismantles })
}
