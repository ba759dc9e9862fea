//! The headline pipelines, built on everything else: exact chromatic
//! invariants and the undirected classification, the oriented-tree
//! classification through the dual, the mixture decomposition of a general
//! template, and empirically decided sentence limits.
//!
//! The output language is [`TheoryDescriptor`]: either a single recognized
//! limit theory (the generic k-partite graph, or the theory attached to a
//! transitive tournament's coloured structure), an unrecognized component
//! named by its densest support, or a weighted mixture of those.

use crate::colored::{count_colored, sample_uniform};
use crate::density::{densest_maximizers, max_oriented_clique};
use crate::dual::{build_dual, DualResult};
use crate::error::{Error, Result};
use crate::graph::{ugraph_iso_classes, Digraph, UGraph};
use crate::hom::{canonical_orbit_formula, hom_exists, is_isomorphic, PPFormula};
use crate::logic::{
    eval, extension_axioms, phi_n_exact, ClassDescriptor, Formula, FrequencyOutcome,
    FrequencyRow, GraphClass, ModelRef,
};
use crate::rng::Rng;
use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use rayon::prelude::*;

pub const CHROMATIC_CAP: usize = 16;

// ---- chromatic invariants --------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChromaticInvariants {
    pub chi: usize,
    pub omega: usize,
    /// Least k for which some k-colourable graph fails to map in; always
    /// omega + 1 (see [`cochromatic_witness_check`] for the finite audit).
    pub co_chromatic: usize,
}

/// Lexicographically first maximum clique, by branch and bound on
/// adjacency masks.
fn max_clique(h: &UGraph) -> Vec<usize> {
    let n = h.n();
    let adj: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&v| h.has_edge(u, v)).fold(0u32, |m, v| m | 1 << v))
        .collect();
    fn grow(adj: &[u32], from: usize, allowed: u32, cur: &mut Vec<usize>, best: &mut Vec<usize>) {
        if cur.len() + (allowed >> from).count_ones() as usize <= best.len() {
            return;
        }
        for v in from..adj.len() {
            if allowed >> v & 1 == 1 {
                cur.push(v);
                if cur.len() > best.len() {
                    *best = cur.clone();
                }
                grow(adj, v + 1, allowed & adj[v], cur, best);
                cur.pop();
            }
        }
    }
    let mut best = Vec::new();
    grow(&adj, 0, (1u32 << n) - 1, &mut Vec::new(), &mut best);
    best
}

/// Exact chromatic number: try k = ω, ω+1, … with backtracking. The clique
/// is pre-coloured with distinct colours (sound by symmetry), remaining
/// vertices are ordered by decreasing degree, and a vertex may only open
/// colour class c when classes 0..c are already in use.
fn chromatic_number(h: &UGraph, clique: &[usize]) -> usize {
    let n = h.n();
    let mut rest: Vec<usize> = (0..n).filter(|v| !clique.contains(v)).collect();
    rest.sort_by_key(|&v| std::cmp::Reverse(h.degree(v)));
    let mut seed = vec![usize::MAX; n];
    for (i, &v) in clique.iter().enumerate() {
        seed[v] = i;
    }
    fn rec(
        h: &UGraph,
        rest: &[usize],
        idx: usize,
        color: &mut [usize],
        used: usize,
        k: usize,
    ) -> bool {
        if idx == rest.len() {
            return true;
        }
        let v = rest[idx];
        for c in 0..k.min(used + 1) {
            if (0..h.n()).all(|u| !(h.has_edge(u, v) && color[u] == c)) {
                color[v] = c;
                if rec(h, rest, idx + 1, color, used.max(c + 1), k) {
                    return true;
                }
                color[v] = usize::MAX;
            }
        }
        false
    }
    let mut k = clique.len().max(1);
    loop {
        let mut color = seed.clone();
        if rec(h, &rest, 0, &mut color, clique.len(), k) {
            return k;
        }
        k += 1;
    }
}

pub fn chromatic_invariants(h: &UGraph) -> Result<ChromaticInvariants> {
    if h.n() == 0 {
        return Err(Error::domain("chromatic invariants need at least one vertex"));
    }
    if h.n() > CHROMATIC_CAP {
        return Err(Error::budget(format!(
            "exact colouring is capped at {CHROMATIC_CAP} vertices, got {}",
            h.n()
        )));
    }
    let clique = max_clique(h);
    let omega = clique.len();
    let chi = chromatic_number(h, &clique);
    Ok(ChromaticInvariants { chi, omega, co_chromatic: omega + 1 })
}

/// Audit of the closed form co_chromatic = ω+1 over all small graphs: for
/// every H on ≤ `max_h` vertices, the pool of graphs on ≤ `max_g` vertices
/// contains no witness at level ω(H) (everything with χ ≤ ω maps into H)
/// but does contain one at level ω(H)+1 whenever the pool is big enough to
/// hold K_{ω+1}.
pub fn cochromatic_witness_check(max_h: usize, max_g: usize) -> Result<()> {
    let mut pool: Vec<(UGraph, usize)> = Vec::new();
    for n in 1..=max_g {
        for g in ugraph_iso_classes(n)? {
            let chi = chromatic_invariants(&g)?.chi;
            pool.push((g, chi));
        }
    }
    for n in 1..=max_h {
        for h in ugraph_iso_classes(n)? {
            let omega = chromatic_invariants(&h)?.omega;
            let hd = h.as_digraph();
            let mut witness_above = false;
            for (g, chi) in &pool {
                if *chi <= omega {
                    if !hom_exists(&g.as_digraph(), &hd) {
                        return Err(Error::domain(format!(
                            "witness below the claimed level: a {}-chromatic graph on {} \
                             vertices fails to map into an H with clique number {omega}",
                            chi,
                            g.n()
                        )));
                    }
                } else if *chi == omega + 1 && !hom_exists(&g.as_digraph(), &hd) {
                    witness_above = true;
                }
            }
            if omega < max_g && !witness_above {
                return Err(Error::domain(format!(
                    "no witness at level {} for an H on {} vertices with clique number {omega}",
                    omega + 1,
                    h.n()
                )));
            }
        }
    }
    Ok(())
}

// ---- theory descriptors ----------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum WeightValue {
    Exact(BigRational),
    /// Least-squares 1/n → 0 intercept of finite count shares, with the
    /// largest fit residual as a quality figure.
    Estimate { value: f64, residual: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum TheoryKind {
    /// Limit theory of uniform k-partite graphs (k = 0 names the one-model
    /// theory of the empty graph).
    GenericKPartite(usize),
    /// Limit theory attached to the transitive tournament on ℓ vertices
    /// via its coloured structures (ℓ = 0: the empty-model theory).
    UOfT(usize),
    /// A densest support that is not a transitive tournament: reported
    /// descriptively, not identified with a named theory.
    DensestComponent { support: Vec<usize>, induced: Digraph },
    Mixture { template: Digraph, components: Vec<(TheoryDescriptor, WeightValue)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryDescriptor {
    pub kind: TheoryKind,
    /// When present: the orbit-cover sentence first, then the one-point
    /// extension axioms with at most two universally quantified vertices.
    pub presentation: Option<Vec<Formula>>,
}

/// Rebuild a primitive-positive orbit formula as a [`Formula`] over the
/// shared free variable.
pub fn pp_to_formula(pp: &PPFormula) -> Formula {
    let atoms: Vec<Formula> =
        pp.atoms.iter().map(|(a, b)| Formula::edge(a.clone(), b.clone())).collect();
    let mut f = Formula::and_all(atoms);
    for v in pp.quantified_variables.iter().rev() {
        f = Formula::exists(v.clone(), f);
    }
    f
}

/// The sentence ∀x (φ_1(x) ∨ … ∨ φ_ℓ(x)) covering every vertex by some
/// orbit formula of the transitive tournament on ℓ vertices. For ℓ = 0 the
/// cover is empty and the sentence says "there are no vertices".
pub fn orbit_cover_sentence(ell: usize) -> Result<Formula> {
    let mut cover = Vec::new();
    if ell > 0 {
        let t = Digraph::transitive_tournament(ell)?;
        for u in 0..ell {
            cover.push(pp_to_formula(&canonical_orbit_formula(&t, u)?));
        }
    }
    Ok(Formula::forall("x", Formula::or_all(cover)))
}

fn u_of_t_descriptor(ell: usize) -> Result<TheoryDescriptor> {
    let mut pres = vec![orbit_cover_sentence(ell)?];
    if ell > 0 {
        pres.extend(extension_axioms(&Digraph::transitive_tournament(ell)?, 2)?);
    }
    Ok(TheoryDescriptor { kind: TheoryKind::UOfT(ell), presentation: Some(pres) })
}

// ---- classification pipelines ----------------------------------------------

/// Forbidden undirected graphs: the limit theory is the generic
/// (k−1)-partite graph where k is the least chromatic number in the family.
pub fn classify_undirected(family: &[UGraph]) -> Result<TheoryDescriptor> {
    if family.is_empty() {
        return Err(Error::domain(
            "an empty forbidden family leaves all graphs, whose limit theory is the \
             generic (random) graph, outside this classification; pass at least one graph",
        ));
    }
    let mut k = usize::MAX;
    for h in family {
        k = k.min(chromatic_invariants(h)?.chi);
    }
    Ok(TheoryDescriptor { kind: TheoryKind::GenericKPartite(k - 1), presentation: None })
}

#[derive(Clone, Debug)]
pub struct TreeClassification {
    pub dual: DualResult,
    pub ell: usize,
    pub theory: TheoryDescriptor,
}

/// Forbidden oriented trees: build the dual template, read off ℓ as its
/// maximum one-arc-per-pair clique, and certify the blow-up shape of every
/// densest maximizer before naming the limit theory.
pub fn classify_oriented_trees(family: &[Digraph]) -> Result<TreeClassification> {
    let dual = build_dual(family)?;
    if dual.dual.n() == 0 {
        return Ok(TreeClassification { dual, ell: 0, theory: u_of_t_descriptor(0)? });
    }
    let (ell, _) = max_oriented_clique(&dual.dual)?;
    let (value, maximizers) = densest_maximizers(&dual.dual)?;
    let expected =
        BigRational::new(BigInt::from(ell as i64 - 1), BigInt::from(2 * ell as i64));
    let uniform = BigRational::new(BigInt::one(), BigInt::from(ell as i64));
    if value != expected {
        return Err(Error::domain(format!(
            "densest value {value} differs from the clique prediction {expected}; \
             this signals a defect in the dual or density solver"
        )));
    }
    for p in &maximizers {
        let induced = dual.dual.induced(&p.support)?;
        let shaped = p.support.len() == ell
            && induced.is_transitive_tournament()
            && p.support.iter().all(|&u| p.delta[u] == uniform);
        if !shaped {
            return Err(Error::domain(format!(
                "a densest support {:?} is not a uniformly weighted transitive \
                 tournament on {ell} vertices; this signals a defect in the dual or \
                 density solver",
                p.support
            )));
        }
    }
    Ok(TreeClassification { dual, ell, theory: u_of_t_descriptor(ell)? })
}

// ---- mixture decomposition ---------------------------------------------------

/// Loop-and-multiplicity preserving isomorphism of templates: a vertex
/// bijection matching loops and the number of arcs (0, 1 or 2) inside
/// every unordered pair. Counting colourings only sees this data, so
/// equivalent supports contribute identical counts for every size.
fn weighted_isomorphic(a: &Digraph, b: &Digraph) -> bool {
    if a.n() != b.n() {
        return false;
    }
    fn profile(g: &Digraph) -> (Vec<bool>, Vec<Vec<u8>>) {
        let n = g.n();
        let loops = (0..n).map(|u| g.has_edge(u, u)).collect();
        let mut w = vec![vec![0u8; n]; n];
        for (u, row) in w.iter_mut().enumerate() {
            for (v, cell) in row.iter_mut().enumerate() {
                if u != v {
                    *cell = g.has_edge(u, v) as u8 + g.has_edge(v, u) as u8;
                }
            }
        }
        (loops, w)
    }
    fn rec(
        map: &mut Vec<usize>,
        used: &mut [bool],
        la: &[bool],
        wa: &[Vec<u8>],
        lb: &[bool],
        wb: &[Vec<u8>],
    ) -> bool {
        let i = map.len();
        if i == la.len() {
            return true;
        }
        for img in 0..lb.len() {
            if used[img] || la[i] != lb[img] {
                continue;
            }
            if (0..i).all(|j| wa[i][j] == wb[img][map[j]]) {
                map.push(img);
                used[img] = true;
                if rec(map, used, la, wa, lb, wb) {
                    return true;
                }
                used[img] = false;
                map.pop();
            }
        }
        false
    }
    let (la, wa) = profile(a);
    let (lb, wb) = profile(b);
    rec(&mut Vec::new(), &mut vec![false; a.n()], &la, &wa, &lb, &wb)
}

/// Exact [0,1] ratio of big naturals as a float, by integer-scaling to 53
/// bits first so neither operand overflows the conversion.
fn ratio_to_f64(num: &BigUint, den: &BigUint) -> f64 {
    let scaled = (num.clone() << 53usize) / den;
    scaled.to_f64().unwrap_or(0.0) / (1u64 << 53) as f64
}

/// Least-squares fit of y = a + b·x; returns (a, b, max |residual|).
fn fit_affine(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let b = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let a = my - b * mx;
    let res =
        xs.iter().zip(ys).map(|(x, y)| (y - (a + b * x)).abs()).fold(0.0f64, f64::max);
    (a, b, res)
}

/// Numeric weight of each support when no symmetry forces exact values:
/// the share of colourings staying inside the support's weak-component
/// hull, counted exactly over a window of sizes, fitted affinely in 1/n,
/// read off at the intercept and normalized. Returns (weight, residual)
/// per support.
pub fn estimate_weights(d: &Digraph, supports: &[Vec<usize>]) -> Result<Vec<(f64, f64)>> {
    let comps = d.weak_components();
    let hulls: Vec<Vec<usize>> = supports
        .iter()
        .map(|s| {
            let mut hull: Vec<usize> = comps
                .iter()
                .filter(|c| c.iter().any(|v| s.contains(v)))
                .flatten()
                .copied()
                .collect();
            hull.sort_unstable();
            hull
        })
        .collect();

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<Vec<f64>> = vec![Vec::new(); supports.len()];
    for n in (8..=32).step_by(4) {
        let total = match count_colored(d, n) {
            Ok(t) => t,
            Err(Error::Budget(_)) => break,
            Err(e) => return Err(e),
        };
        if total.is_zero() {
            continue;
        }
        for (hull, y) in hulls.iter().zip(ys.iter_mut()) {
            y.push(ratio_to_f64(&count_colored(&d.induced(hull)?, n)?, &total));
        }
        xs.push(1.0 / n as f64);
    }
    if xs.len() < 3 {
        return Err(Error::budget(
            "weight estimation needs at least three feasible counting sizes",
        ));
    }
    let raw: Vec<(f64, f64)> = ys
        .iter()
        .map(|y| {
            let (a, _, res) = fit_affine(&xs, y);
            (a.clamp(0.0, 1.0), res)
        })
        .collect();
    let sum: f64 = raw.iter().map(|(a, _)| a).sum();
    if sum <= 0.0 {
        return Err(Error::domain("every extrapolated weight vanished"));
    }
    Ok(raw.into_iter().map(|(a, r)| (a / sum, r)).collect())
}

fn same_theory(a: &TheoryDescriptor, b: &TheoryDescriptor) -> bool {
    match (&a.kind, &b.kind) {
        (TheoryKind::UOfT(x), TheoryKind::UOfT(y)) => x == y,
        (TheoryKind::GenericKPartite(x), TheoryKind::GenericKPartite(y)) => x == y,
        (
            TheoryKind::DensestComponent { induced: ga, .. },
            TheoryKind::DensestComponent { induced: gb, .. },
        ) => is_isomorphic(ga, gb),
        _ => false,
    }
}

fn weight_float(w: &WeightValue) -> (f64, f64) {
    match w {
        WeightValue::Exact(x) => (x.to_f64().unwrap_or(f64::NAN), 0.0),
        WeightValue::Estimate { value, residual } => (*value, *residual),
    }
}

fn add_weights(a: &WeightValue, b: &WeightValue) -> WeightValue {
    match (a, b) {
        (WeightValue::Exact(x), WeightValue::Exact(y)) => WeightValue::Exact(x + y),
        _ => {
            let (va, ra) = weight_float(a);
            let (vb, rb) = weight_float(b);
            WeightValue::Estimate { value: va + vb, residual: ra + rb }
        }
    }
}

/// Split a template's limit behaviour into weighted components, one per
/// set-maximal densest support. Supports inducing transitive tournaments
/// are named; others are reported descriptively. Weights are exact (1/m)
/// when the induced supports are pairwise equivalent for counting, else
/// estimated from finite counts and flagged as such. Components with the
/// same theory are merged, and a single surviving component is returned
/// bare rather than as a one-term mixture.
pub fn mixture_decomposition(d: &Digraph) -> Result<TheoryDescriptor> {
    let (_, maximizers) = densest_maximizers(d)?;
    let supports: Vec<Vec<usize>> = maximizers.iter().map(|p| p.support.clone()).collect();
    let induced: Vec<Digraph> =
        supports.iter().map(|s| d.induced(s)).collect::<Result<_>>()?;

    let mut comps: Vec<TheoryDescriptor> = Vec::new();
    for (s, g) in supports.iter().zip(&induced) {
        comps.push(if g.is_transitive_tournament() {
            u_of_t_descriptor(g.n())?
        } else {
            TheoryDescriptor {
                kind: TheoryKind::DensestComponent { support: s.clone(), induced: g.clone() },
                presentation: None,
            }
        });
    }

    let symmetric = induced.iter().all(|g| weighted_isomorphic(&induced[0], g));
    let weights: Vec<WeightValue> = if symmetric {
        let each = BigRational::new(BigInt::one(), BigInt::from(supports.len() as i64));
        vec![WeightValue::Exact(each); supports.len()]
    } else {
        estimate_weights(d, &supports)?
            .into_iter()
            .map(|(value, residual)| WeightValue::Estimate { value, residual })
            .collect()
    };

    let mut grouped: Vec<(TheoryDescriptor, WeightValue)> = Vec::new();
    for (desc, w) in comps.into_iter().zip(weights) {
        match grouped.iter_mut().find(|(g, _)| same_theory(g, &desc)) {
            Some(slot) => slot.1 = add_weights(&slot.1, &w),
            None => grouped.push((desc, w)),
        }
    }
    if grouped.len() == 1 {
        return Ok(grouped.remove(0).0);
    }
    Ok(TheoryDescriptor {
        kind: TheoryKind::Mixture { template: d.clone(), components: grouped },
        presentation: None,
    })
}

// ---- sentence limits ---------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub enum Prediction {
    Exact(BigRational),
    Estimate { value: f64 },
    /// Sampled verdicts disagreed somewhere; reported rather than guessed.
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub predicted: Prediction,
    pub finite_evidence: Vec<FrequencyRow>,
}

/// Sample sizes and per-size seed counts used to decide component
/// verdicts; a verdict is declared only on unanimity across the whole
/// schedule.
#[derive(Clone, Debug)]
pub struct StabilizationSchedule {
    pub sizes: Vec<usize>,
    pub seeds_per_size: usize,
    pub base_seed: u64,
}

impl Default for StabilizationSchedule {
    fn default() -> Self {
        StabilizationSchedule { sizes: vec![50, 100, 200], seeds_per_size: 20, base_seed: 0 }
    }
}

/// Unanimous 0/1 verdict of φ on seeded uniform draws from the template's
/// coloured class (colours forgotten), or None on any disagreement. With
/// `symmetrize` the draw's underlying graph is used instead, turning
/// tournament-coloured draws into uniform k-partite graphs.
fn sampled_verdict(
    template: &Digraph,
    symmetrize: bool,
    phi: &Formula,
    schedule: &StabilizationSchedule,
) -> Result<Option<bool>> {
    let mut jobs: Vec<(usize, u64)> = Vec::new();
    for (si, &size) in schedule.sizes.iter().enumerate() {
        for t in 0..schedule.seeds_per_size {
            jobs.push((size, (si as u64) << 32 | t as u64));
        }
    }
    let verdicts: Vec<bool> = jobs
        .par_iter()
        .map(|&(size, label)| {
            let seed = Rng::substream(schedule.base_seed, label).next_u64();
            let draw = sample_uniform(template, size, seed)?;
            let g = if symmetrize { draw.graph.underlying().as_digraph() } else { draw.graph };
            eval(phi, &ModelRef::Plain(&g))
        })
        .collect::<Result<_>>()?;
    match verdicts.first() {
        None => Ok(None),
        Some(&v) if verdicts.iter().all(|&w| w == v) => Ok(Some(v)),
        _ => Ok(None),
    }
}

fn verdict_to_prediction(v: Option<bool>) -> Prediction {
    match v {
        Some(true) => Prediction::Exact(BigRational::one()),
        Some(false) => Prediction::Exact(BigRational::zero()),
        None => Prediction::Undetermined,
    }
}

fn predict(
    phi: &Formula,
    desc: &TheoryDescriptor,
    schedule: &StabilizationSchedule,
) -> Result<Prediction> {
    match &desc.kind {
        TheoryKind::Mixture { components, .. } => {
            let mut acc_exact = BigRational::zero();
            let mut acc_float = 0.0f64;
            let mut exact_ok = true;
            for (cdesc, w) in components {
                match predict(phi, cdesc, schedule)? {
                    Prediction::Undetermined => return Ok(Prediction::Undetermined),
                    Prediction::Exact(v) => match w {
                        WeightValue::Exact(lam) => {
                            acc_float +=
                                weight_float(w).0 * v.to_f64().unwrap_or(f64::NAN);
                            acc_exact += lam * &v;
                        }
                        WeightValue::Estimate { value, .. } => {
                            exact_ok = false;
                            acc_float += value * v.to_f64().unwrap_or(f64::NAN);
                        }
                    },
                    Prediction::Estimate { value } => {
                        exact_ok = false;
                        acc_float += weight_float(w).0 * value;
                    }
                }
            }
            Ok(if exact_ok {
                Prediction::Exact(acc_exact)
            } else {
                Prediction::Estimate { value: acc_float }
            })
        }
        TheoryKind::UOfT(0) | TheoryKind::GenericKPartite(0) => {
            let v = eval(phi, &ModelRef::Plain(&Digraph::empty(0)))?;
            Ok(verdict_to_prediction(Some(v)))
        }
        TheoryKind::UOfT(ell) => Ok(verdict_to_prediction(sampled_verdict(
            &Digraph::transitive_tournament(*ell)?,
            false,
            phi,
            schedule,
        )?)),
        TheoryKind::GenericKPartite(k) => Ok(verdict_to_prediction(sampled_verdict(
            &Digraph::transitive_tournament(*k)?,
            true,
            phi,
            schedule,
        )?)),
        TheoryKind::DensestComponent { induced, .. } => {
            Ok(verdict_to_prediction(sampled_verdict(induced, false, phi, schedule)?))
        }
    }
}

/// The digraph class whose exact finite frequencies serve as evidence for
/// a descriptor's predicted limit; None when no enumerable class matches
/// (the generic k-partite theories).
fn evidence_class(desc: &TheoryDescriptor) -> Option<ClassDescriptor> {
    match &desc.kind {
        TheoryKind::UOfT(0) => {
            Some(ClassDescriptor { class: GraphClass::Csp(Digraph::empty(0)), loopless: true })
        }
        TheoryKind::UOfT(ell) => Some(ClassDescriptor {
            class: GraphClass::Csp(
                Digraph::transitive_tournament(*ell).expect("positive ell"),
            ),
            loopless: true,
        }),
        TheoryKind::DensestComponent { induced, .. } => Some(ClassDescriptor {
            class: GraphClass::Csp(induced.clone()),
            loopless: induced.is_irreflexive(),
        }),
        TheoryKind::Mixture { template, .. } => Some(ClassDescriptor {
            class: GraphClass::Csp(template.clone()),
            loopless: template.is_irreflexive(),
        }),
        TheoryKind::GenericKPartite(_) => None,
    }
}

pub fn sentence_limit(
    phi: &Formula,
    descriptor: &TheoryDescriptor,
    evidence_n: &[usize],
) -> Result<LimitReport> {
    sentence_limit_with(phi, descriptor, evidence_n, &StabilizationSchedule::default())
}

/// Predicted limit frequency of a sentence under a descriptor, as the
/// weight-combination of per-component 0/1 verdicts, together with exact
/// finite-size evidence rows where enumeration is affordable (sizes past
/// the enumeration budget are silently dropped).
pub fn sentence_limit_with(
    phi: &Formula,
    descriptor: &TheoryDescriptor,
    evidence_n: &[usize],
    schedule: &StabilizationSchedule,
) -> Result<LimitReport> {
    if !phi.is_sentence() {
        return Err(Error::domain("limits are defined for sentences only"));
    }
    if phi.uses_colors() {
        return Err(Error::domain(
            "limit classes are plain digraph classes; colour atoms have no meaning there",
        ));
    }
    let predicted = predict(phi, descriptor, schedule)?;
    let mut finite_evidence = Vec::new();
    if let Some(class) = evidence_class(descriptor) {
        for &n in evidence_n {
            match phi_n_exact(&class, phi, n) {
                Ok(FrequencyOutcome::Defined(row)) => finite_evidence.push(row),
                Ok(FrequencyOutcome::Undefined { .. }) => {}
                Err(Error::Budget(_)) => break,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(LimitReport { predicted, finite_evidence })
}
