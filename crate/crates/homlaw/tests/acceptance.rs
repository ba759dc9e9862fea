//! Acceptance gate: one test per release criterion, each printing a single
//! pass/fail line (run with `-- --nocapture` to see the lines for passing
//! criteria; failing criteria always show theirs).
//!
//! Where a criterion's claim is refuted by the library's own oracles, the
//! test still computes everything, reports the honest counter-values in its
//! line, and fails. Nothing here is weakened to go green.

use homlaw::colored::{
    bag_statistics, count_colored, count_table, exact_ge_pow2, exact_le_scaled_pow2,
    sample_product, sample_uniform,
};
use homlaw::density::{densest_maximizers, density, max_oriented_clique};
use homlaw::dual::{build_dual, validate_dual};
use homlaw::graph::{enumerate_digraphs, enumerate_oriented_trees, EnumOptions};
use homlaw::hom::is_isomorphic;
use homlaw::logic::{
    eval, extension_axioms, parse_formula, phi_n_exact, random_sentence, ClassDescriptor,
    Formula, FrequencyOutcome, GraphClass, ModelRef,
};
use homlaw::rng::Rng;
use homlaw::theory::{
    chromatic_invariants, classify_oriented_trees, classify_undirected, mixture_decomposition,
    orbit_cover_sentence, sentence_limit, Prediction, TheoryKind, WeightValue,
};
use homlaw::{Digraph, UGraph};
use num::{BigRational, BigUint, One, ToPrimitive};
use rayon::prelude::*;
use std::collections::BTreeMap;

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

fn verdict(id: usize, name: &str, failures: Vec<String>, note: Option<String>) {
    if failures.is_empty() {
        match note {
            Some(s) => println!("criterion {id} ({name}): PASS ({s})"),
            None => println!("criterion {id} ({name}): PASS"),
        }
    } else {
        let detail = failures.join("; ");
        println!("criterion {id} ({name}): FAIL - {detail}");
        panic!("criterion {id} ({name}): {detail}");
    }
}

fn t(k: usize) -> Digraph {
    Digraph::transitive_tournament(k).expect("small tournament")
}

/// Three-cycle next to a transitive triangle: the running mixed template.
fn union_template() -> Digraph {
    Digraph::directed_cycle(3).unwrap().disjoint_union(&t(3))
}

// ---- criterion 1 ------------------------------------------------------------

#[test]
fn criterion_1_density_identities() {
    let mut fails = Vec::new();
    for k in 2..=6i64 {
        let (v, _) = density(&t(k as usize)).unwrap();
        if v != frac(k - 1, 2 * k) {
            fails.push(format!("density of the {k}-vertex tournament is {v}"));
        }
    }
    // every oriented digraph on <= 5 vertices: density = (w-1)/(2w)
    let bad: usize = (1..=5usize)
        .map(|n| {
            let opts = EnumOptions { loopless: true, ..Default::default() };
            enumerate_digraphs(n, opts)
                .unwrap()
                .par_bridge()
                .filter(|g| g.is_oriented())
                .filter(|g| {
                    let (omega, _) = max_oriented_clique(g).unwrap();
                    let (v, _) = density(g).unwrap();
                    v != frac(omega as i64 - 1, 2 * omega as i64)
                })
                .count()
        })
        .sum();
    if bad > 0 {
        fails.push(format!("{bad} oriented digraphs on <= 5 vertices break the clique formula"));
    }
    verdict(1, "density identities", fails, None);
}

// ---- criterion 2 ------------------------------------------------------------

#[test]
fn criterion_2_duality_contract() {
    let mut fails = Vec::new();
    for k in 2..=4usize {
        let p = Digraph::directed_path(k).unwrap();
        let built = build_dual(std::slice::from_ref(&p)).unwrap();
        let report = validate_dual(std::slice::from_ref(&p), &built.dual, 4, 10_000, 7, 1);
        if !report.pass {
            fails.push(format!(
                "oracle validation rejected the dual of the {k}-vertex path"
            ));
            continue;
        }
        let expected = Digraph::directed_path(k - 1).unwrap();
        if !is_isomorphic(&built.dual, &expected) {
            fails.push(format!(
                "the {k}-vertex path's dual core has {} arcs on {} vertices, not the \
                 {}-vertex path it was claimed to be ({} exhaustive + {} random graphs \
                 confirm the computed dual is correct)",
                built.dual.edges().len(),
                built.dual.n(),
                k - 1,
                report.exhaustive_checked,
                report.random_checked
            ));
        }
    }
    // structural certificates across the whole small-tree corpus
    let trees: Vec<Digraph> =
        (1..=5).flat_map(|n| enumerate_oriented_trees(n).unwrap()).collect();
    let cert_bad: usize = trees
        .par_iter()
        .filter(|tree| {
            let built = build_dual(std::slice::from_ref(*tree)).unwrap();
            let c = &built.certificates;
            !(c.acyclic && c.rigid && c.square_dismantles)
        })
        .count();
    if cert_bad > 0 {
        fails.push(format!(
            "{cert_bad} of {} small-tree duals miss a structural certificate",
            trees.len()
        ));
    }
    verdict(2, "duality contract", fails, None);
}

// ---- criterion 3 ------------------------------------------------------------

/// Independent count: every (graph, colouring) pair on labelled vertices,
/// checked arc by arc against the template.
fn brute_force_colored(d: &Digraph, n: usize) -> BigUint {
    let dn = d.n();
    assert!(n * n <= 20, "mask oracle only meant for tiny n");
    // permitted-arc mask per colouring, bit u*n+v
    let mut masks = Vec::new();
    let mut c = vec![0usize; n];
    loop {
        let mut p = 0u64;
        for u in 0..n {
            for v in 0..n {
                if d.has_edge(c[u], c[v]) {
                    p |= 1 << (u * n + v);
                }
            }
        }
        masks.push(p);
        let mut i = 0;
        while i < n && c[i] + 1 == dn {
            c[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        c[i] += 1;
    }
    let mut count = 0u64;
    for g in 0..1u64 << (n * n) {
        count += masks.iter().filter(|&&p| g & !p == 0).count() as u64;
    }
    BigUint::from(count)
}

#[test]
fn criterion_3_exact_counting() {
    let mut fails = Vec::new();
    for (n, want) in [(1usize, 2u32), (2, 6), (3, 26)] {
        let got = count_colored(&t(2), n).unwrap();
        if got != BigUint::from(want) {
            fails.push(format!("single-arc count at n={n} is {got}, not {want}"));
        }
    }
    // closed formula vs. the mask oracle, every template on <= 3 vertices
    let templates: Vec<Digraph> = (1..=3)
        .flat_map(|k| enumerate_digraphs(k, EnumOptions::default()).unwrap())
        .collect();
    let mismatches: usize = templates
        .par_iter()
        .map(|d| {
            (1..=4usize)
                .filter(|&n| count_colored(d, n).unwrap() != brute_force_colored(d, n))
                .count()
        })
        .sum();
    if mismatches > 0 {
        fails.push(format!(
            "{mismatches} (template, size) pairs disagree with the brute-force count"
        ));
    }
    // exact inequalities along the full table of the mixed template
    let d = union_template();
    let (_, profile) = density(&d).unwrap();
    let (_, maximizers) = densest_maximizers(&d).unwrap();
    let good: Vec<Vec<usize>> = maximizers.iter().map(|p| p.support.clone()).collect();
    let table = count_table(&d, 60, &profile.support, &good).unwrap();
    let k = d.n() as u32;
    let mut lower_bad = Vec::new();
    let mut upper_bad = Vec::new();
    for r in &table.rows {
        let nn = BigRational::from_integer(((r.n * r.n) as i64).into());
        let lower = &nn * &r.d_n;
        if !exact_ge_pow2(&r.c_n, &lower) {
            lower_bad.push(r.n);
        }
        let n_rat = BigRational::from_integer((r.n as i64).into());
        let corr = BigRational::one() - n_rat.recip() + (&n_rat * &n_rat).recip();
        if !exact_le_scaled_pow2(&r.b_n, &BigUint::from(r.n).pow(k), &(&lower * &corr)) {
            upper_bad.push(r.n);
        }
    }
    if !lower_bad.is_empty() {
        fails.push(format!("the count lower bound fails at n = {lower_bad:?}"));
    }
    if !upper_bad.is_empty() {
        fails.push(format!(
            "the bad-count envelope b_n <= n^6 * 2^(n^2 d_n (1 - 1/n + 1/n^2)) fails for \
             every n in {}..={} ({} rows; the {} rows below n={} all satisfy it)",
            upper_bad.first().unwrap(),
            upper_bad.last().unwrap(),
            upper_bad.len(),
            upper_bad.first().unwrap() - 1,
            upper_bad.first().unwrap()
        ));
    }
    verdict(3, "exact counting", fails, None);
}

// ---- criterion 4 ------------------------------------------------------------

#[test]
fn criterion_4_concentration_trends() {
    let mut fails = Vec::new();
    let ps: Vec<BigRational> = [10usize, 20, 30, 40]
        .iter()
        .map(|&n| bag_statistics(&t(2), n).unwrap().p_small_bag)
        .collect();
    if !ps.windows(2).all(|w| w[1] < w[0]) {
        let shown: Vec<String> =
            ps.iter().map(|p| format!("{:.4}", p.to_f64().unwrap())).collect();
        fails.push(format!(
            "p_small_bag does not decrease over n = 10,20,30,40: it runs {}",
            shown.join(" -> ")
        ));
    }
    // deviation-mass ratio collapses between the calibrated start and +30.
    // N0 = 4 is the first size where the mixed template's ratio is positive,
    // fixed by an oracle run of the table and recorded here.
    const N0: usize = 4;
    let d = union_template();
    let (_, profile) = density(&d).unwrap();
    let (_, maximizers) = densest_maximizers(&d).unwrap();
    let good: Vec<Vec<usize>> = maximizers.iter().map(|p| p.support.clone()).collect();
    let table = count_table(&d, N0 + 30, &profile.support, &good).unwrap();
    let ratio =
        |n: usize| table.rows.iter().find(|r| r.n == n).map(|r| r.ratio.clone()).unwrap();
    let (start, end) = (ratio(N0), ratio(N0 + 30));
    let note;
    if end == frac(0, 1) {
        fails.push("deviation mass already vanished at the far end".into());
        note = None;
    } else {
        let factor = &start / &end;
        if factor < frac(10, 1) {
            fails.push(format!(
                "deviation-mass ratio only shrinks {:.1}-fold between n={N0} and n={}",
                factor.to_f64().unwrap(),
                N0 + 30
            ));
            note = None;
        } else {
            note = Some(format!(
                "the deviation mass does fall {:.0}-fold from n={N0} to n={}",
                factor.to_f64().unwrap(),
                N0 + 30
            ));
        }
    }
    verdict(4, "concentration trends", fails, note);
}

// ---- criterion 5 ------------------------------------------------------------

/// Independent homomorphism filter: straight backtracking over the target's
/// vertices with arc checks against already-placed sources.
fn brute_maps_into(g_mask: u64, n: usize, h: &Digraph) -> bool {
    fn place(mask: u64, n: usize, h: &Digraph, img: &mut Vec<usize>) -> bool {
        let v = img.len();
        if v == n {
            return true;
        }
        'cand: for c in 0..h.n() {
            for (u, &cu) in img.iter().enumerate() {
                if mask >> (u * n + v) & 1 == 1 && !h.has_edge(cu, c) {
                    continue 'cand;
                }
                if mask >> (v * n + u) & 1 == 1 && !h.has_edge(c, cu) {
                    continue 'cand;
                }
            }
            if mask >> (v * n + v) & 1 == 1 && !h.has_edge(c, c) {
                continue 'cand;
            }
            img.push(c);
            if place(mask, n, h, img) {
                return true;
            }
            img.pop();
        }
        false
    }
    place(g_mask, n, h, &mut Vec::new())
}

/// Does the graph contain a transitive triangle (as a not necessarily
/// injective triple)?
fn brute_has_transitive_triangle(mask: u64, n: usize) -> bool {
    let has = |u: usize, v: usize| mask >> (u * n + v) & 1 == 1;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if has(x, y) && has(y, z) && has(x, z) {
                    return true;
                }
            }
        }
    }
    false
}

fn oracle_triangle_frequency(h: &Digraph, n: usize) -> (u64, u64) {
    (0..1u64 << (n * n))
        .into_par_iter()
        .map(|mask| {
            if !brute_maps_into(mask, n, h) {
                return (0u64, 0u64);
            }
            (brute_has_transitive_triangle(mask, n) as u64, 1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn class_size(h: &Digraph, n: usize) -> BigUint {
    let desc = ClassDescriptor { class: GraphClass::Csp(h.clone()), loopless: true };
    match phi_n_exact(&desc, &parse_formula("true").unwrap(), n).unwrap() {
        FrequencyOutcome::Defined(r) => r.total,
        FrequencyOutcome::Undefined { .. } => BigUint::from(0u32),
    }
}

#[test]
fn criterion_5_mixed_template_half_limit() {
    let mut fails = Vec::new();
    let d = union_template();
    let phi = parse_formula("exists x. exists y. exists z. E(x,y) & E(y,z) & E(x,z)").unwrap();
    let desc = ClassDescriptor { class: GraphClass::Csp(d.clone()), loopless: false };
    for n in [3usize, 4] {
        let (sat, members) = oracle_triangle_frequency(&d, n);
        let lib = match phi_n_exact(&desc, &phi, n).unwrap() {
            FrequencyOutcome::Defined(r) => r,
            FrequencyOutcome::Undefined { .. } => {
                fails.push(format!("class slice empty at n={n}"));
                continue;
            }
        };
        let want = BigRational::new((sat as i64).into(), (members as i64).into());
        if lib.phi_n != want || lib.total != BigUint::from(members) {
            fails.push(format!(
                "triangle-query frequency at n={n}: library {} over {}, oracle {sat}/{members}",
                lib.phi_n, lib.total
            ));
        }
    }
    // whether the two component classes are the same size is left open by
    // the counting module; settle it by enumeration and surface the answer
    let mut first_divergence = None;
    for n in 1..=5 {
        let a = class_size(&t(3), n);
        let b = class_size(&Digraph::directed_cycle(3).unwrap(), n);
        if a != b {
            first_divergence = Some((n, a, b));
            break;
        }
    }
    let note = match first_divergence {
        Some((n, a, b)) => Some(format!(
            "the component class sizes genuinely differ from n={n} on: {a} vs {b}"
        )),
        None => Some("component class sizes agree through n=5".into()),
    };
    // exact mixture weights and the predicted limit
    let theory = mixture_decomposition(&d).unwrap();
    match &theory.kind {
        TheoryKind::Mixture { components, .. } => {
            if components.len() != 2
                || components.iter().any(|(_, w)| *w != WeightValue::Exact(frac(1, 2)))
            {
                fails.push(format!("mixture weights are not exactly (1/2, 1/2): {components:?}"));
            }
        }
        k => fails.push(format!("expected a two-part mixture, got {k:?}")),
    }
    let report = sentence_limit(&phi, &theory, &[1, 2, 3, 4]).unwrap();
    if report.predicted != Prediction::Exact(frac(1, 2)) {
        fails.push(format!("predicted limit is {:?}, not exactly 1/2", report.predicted));
    }
    let evidence: Vec<BigRational> =
        report.finite_evidence.iter().map(|r| r.phi_n.clone()).collect();
    if evidence != vec![frac(0, 1), frac(0, 1), frac(2, 9), frac(156, 443)] {
        fails.push(format!("finite evidence rows moved: {evidence:?}"));
    }
    verdict(5, "mixed-template half limit", fails, note);
}

/// Full-suite companion: the size-5 slice, brute-forced with loops included.
#[test]
#[ignore]
fn criterion_5_full_size_5_oracle() {
    let d = union_template();
    let phi = parse_formula("exists x. exists y. exists z. E(x,y) & E(y,z) & E(x,z)").unwrap();
    let (sat, members) = oracle_triangle_frequency(&d, 5);
    let desc = ClassDescriptor { class: GraphClass::Csp(d.clone()), loopless: true };
    let lib = match phi_n_exact(&desc, &phi, 5).unwrap() {
        FrequencyOutcome::Defined(r) => r,
        FrequencyOutcome::Undefined { .. } => panic!("class slice empty at n=5"),
    };
    assert_eq!(lib.total, BigUint::from(members), "membership counts");
    assert_eq!(
        lib.phi_n,
        BigRational::new((sat as i64).into(), (members as i64).into()),
        "triangle-query frequency at n=5"
    );
    println!("criterion 5 full: size-5 oracle agrees ({sat}/{members})");
}

// ---- criterion 6 ------------------------------------------------------------

/// (bipartite triangle-free, all triangle-free) labelled graph counts.
fn triangle_free_bipartite_counts(n: usize) -> (u64, u64) {
    let bit = |i: usize, j: usize| -> u32 {
        // rank of (i, j), i < j, in lexicographic order
        let (i, j) = (i.min(j), i.max(j));
        (i * (2 * n - i - 1) / 2 + (j - i - 1)) as u32
    };
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                triples.push(1u64 << bit(i, j) | 1 << bit(j, k) | 1 << bit(i, k));
            }
        }
    }
    let m = n * (n - 1) / 2;
    (0..1u64 << m)
        .into_par_iter()
        .map(|mask| {
            if triples.iter().any(|&t| t & !mask == 0) {
                return (0u64, 0u64);
            }
            // greedy 2-colouring by depth-first search
            let mut color = vec![usize::MAX; n];
            let mut bip = true;
            'outer: for s in 0..n {
                if color[s] != usize::MAX {
                    continue;
                }
                color[s] = 0;
                let mut stack = vec![s];
                while let Some(u) = stack.pop() {
                    for v in 0..n {
                        if u != v && mask >> bit(u, v) & 1 == 1 {
                            if color[v] == usize::MAX {
                                color[v] = 1 - color[u];
                                stack.push(v);
                            } else if color[v] == color[u] {
                                bip = false;
                                break 'outer;
                            }
                        }
                    }
                }
            }
            (bip as u64, 1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[test]
fn criterion_6_undirected_pipeline() {
    let mut fails = Vec::new();
    for n in 2..=6 {
        let inv = chromatic_invariants(&UGraph::complete(n).unwrap()).unwrap();
        if inv.co_chromatic != n + 1 {
            fails.push(format!("complete graph on {n}: smallest non-colourable level {:?}", inv));
        }
    }
    for k in [5usize, 7, 9] {
        let inv = chromatic_invariants(&UGraph::cycle(k).unwrap()).unwrap();
        if inv.co_chromatic != 3 {
            fails.push(format!("odd cycle on {k}: {inv:?}"));
        }
    }
    let inv = chromatic_invariants(&UGraph::grotzsch()).unwrap();
    if inv.co_chromatic != 3 {
        fails.push(format!("triangle-free 4-chromatic graph: {inv:?}"));
    }
    match classify_undirected(&[UGraph::complete(3).unwrap()]).unwrap().kind {
        TheoryKind::GenericKPartite(2) => {}
        k => fails.push(format!("forbidding the triangle classified as {k:?}")),
    }
    // regression-pinned enumeration, then the claimed trend
    let frozen: [(u64, u64); 4] = [(41, 41), (376, 388), (5177, 5789), (103237, 133501)];
    let mut fracs = Vec::new();
    for (i, n) in (4..=7).enumerate() {
        let (bip, tf) = triangle_free_bipartite_counts(n);
        if (bip, tf) != frozen[i] {
            fails.push(format!(
                "triangle-free bipartite counts at n={n}: got {bip}/{tf}, pinned {:?}",
                frozen[i]
            ));
        }
        fracs.push(frac(bip as i64, tf as i64));
    }
    if !fracs.windows(2).all(|w| w[1] >= w[0]) {
        let shown: Vec<String> =
            fracs.iter().map(|p| format!("{:.4}", p.to_f64().unwrap())).collect();
        fails.push(format!(
            "the bipartite fraction of triangle-free graphs is not nondecreasing over \
             n = 4..7: it runs {}",
            shown.join(" -> ")
        ));
    }
    verdict(6, "undirected pipeline", fails, None);
}

// ---- criterion 7 ------------------------------------------------------------

/// (members, members with exactly one hom to the single arc) over loopless
/// labelled digraphs on n vertices, counted by direct map enumeration.
fn unique_hom_counts(n: usize) -> (u64, u64) {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v).collect();
    (0..1u64 << pairs.len())
        .into_par_iter()
        .map(|mask| {
            let arcs: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|&(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            // a hom to the single arc is a 0/1 labelling with arcs 0 -> 1
            let homs = (0..1u32 << n)
                .filter(|f| {
                    arcs.iter().all(|&(u, v)| f >> u & 1 == 0 && f >> v & 1 == 1)
                })
                .count();
            match homs {
                0 => (0u64, 0u64),
                1 => (1, 1),
                _ => (1, 0),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[test]
fn criterion_7_almost_sure_theory_pipeline() {
    let mut fails = Vec::new();
    let got = classify_oriented_trees(&[Digraph::directed_path(3).unwrap()]).unwrap();
    if got.ell != 2 {
        fails.push(format!("forbidding the 3-vertex path gave level {}", got.ell));
    }
    let psi = got.theory.presentation.as_ref().expect("presentation")[0].clone();
    if psi != orbit_cover_sentence(2).unwrap() {
        fails.push("the presentation does not open with the orbit-cover sentence".into());
    }
    let misses: usize = (0..100u64)
        .into_par_iter()
        .filter(|&trial| {
            let s = sample_uniform(&t(2), 200, Rng::substream(0xA5, trial).next_u64()).unwrap();
            !eval(&psi, &ModelRef::Plain(&s.graph)).unwrap()
        })
        .count();
    if misses > 0 {
        fails.push(format!(
            "the orbit-cover sentence fails on {misses}/100 colour-forgotten samples"
        ));
    }
    // pinned unique-homomorphism fractions, then the claimed trend
    let frozen: [(u64, u64); 4] = [(3, 2), (13, 6), (87, 50), (841, 510)];
    let mut fracs = Vec::new();
    for (i, n) in (2..=5).enumerate() {
        let (members, unique) = unique_hom_counts(n);
        if (members, unique) != frozen[i] {
            fails.push(format!(
                "unique-hom counts at n={n}: got {unique}/{members}, pinned {:?}",
                frozen[i]
            ));
        }
        fracs.push(frac(unique as i64, members as i64));
    }
    if !fracs.windows(2).all(|w| w[1] >= w[0]) {
        let shown: Vec<String> =
            fracs.iter().map(|p| format!("{:.4}", p.to_f64().unwrap())).collect();
        fails.push(format!(
            "the unique-hom fraction is not nondecreasing over n = 2..5: it runs {}",
            shown.join(" -> ")
        ));
    }
    verdict(7, "almost-sure theory pipeline", fails, None);
}

// ---- criterion 8 ------------------------------------------------------------

/// A from-scratch evaluator kept deliberately naive: explicit environment,
/// no budgets, no sharing with the library's code paths.
fn naive_eval(
    phi: &Formula,
    n: usize,
    edge: &dyn Fn(usize, usize) -> bool,
    color: &dyn Fn(usize) -> Option<usize>,
    env: &mut Vec<(String, usize)>,
) -> bool {
    let find = |env: &Vec<(String, usize)>, x: &str| {
        env.iter().rev().find(|(v, _)| v == x).map(|&(_, a)| a).unwrap()
    };
    match phi {
        Formula::Bottom => false,
        Formula::Edge(a, b) => edge(find(env, a), find(env, b)),
        Formula::Equal(a, b) => find(env, a) == find(env, b),
        Formula::Color(k, x) => color(find(env, x)) == Some(*k),
        Formula::Not(f) => !naive_eval(f, n, edge, color, env),
        Formula::And(a, b) => {
            naive_eval(a, n, edge, color, env) && naive_eval(b, n, edge, color, env)
        }
        Formula::Or(a, b) => {
            naive_eval(a, n, edge, color, env) || naive_eval(b, n, edge, color, env)
        }
        Formula::Implies(a, b) => {
            !naive_eval(a, n, edge, color, env) || naive_eval(b, n, edge, color, env)
        }
        Formula::Forall(x, f) => (0..n).all(|val| {
            env.push((x.clone(), val));
            let r = naive_eval(f, n, edge, color, env);
            env.pop();
            r
        }),
        Formula::Exists(x, f) => (0..n).any(|val| {
            env.push((x.clone(), val));
            let r = naive_eval(f, n, edge, color, env);
            env.pop();
            r
        }),
    }
}

#[test]
fn criterion_8_logic_engine() {
    let mut fails = Vec::new();
    // complementation over three classes
    let classes: [(&str, ClassDescriptor, Option<usize>); 3] = [
        (
            "digraphs",
            ClassDescriptor { class: GraphClass::AllDigraphs, loopless: false },
            None,
        ),
        ("ugraphs", ClassDescriptor { class: GraphClass::AllUGraphs, loopless: false }, None),
        (
            "coloured",
            ClassDescriptor { class: GraphClass::Colored(t(2)), loopless: false },
            Some(2),
        ),
    ];
    for (idx, (label, desc, colors)) in classes.iter().enumerate() {
        let mut rng = Rng::substream(11, idx as u64);
        let mut broken = 0;
        for _ in 0..200 {
            let phi = random_sentence(&mut rng, 2, *colors);
            let neg = Formula::not(phi.clone());
            let a = phi_n_exact(desc, &phi, 3).unwrap();
            let b = phi_n_exact(desc, &neg, 3).unwrap();
            match (a, b) {
                (FrequencyOutcome::Defined(a), FrequencyOutcome::Defined(b)) => {
                    if a.phi_n + b.phi_n != BigRational::one() {
                        broken += 1;
                    }
                }
                _ => broken += 1,
            }
        }
        if broken > 0 {
            fails.push(format!("complementation breaks {broken}/200 times over {label}"));
        }
    }
    // library evaluator vs. the naive one on a thousand random cases
    let mut rng = Rng::substream(13, 0);
    let mut eval_bad = 0;
    for case in 0..1000 {
        if case % 2 == 0 {
            let phi = random_sentence(&mut rng, 2, None);
            let n = 4;
            let bits = rng.next_u64();
            let mut g = Digraph::empty(n);
            for u in 0..n {
                for v in 0..n {
                    if bits >> (u * n + v) & 1 == 1 {
                        g.add_edge(u, v);
                    }
                }
            }
            let lib = eval(&phi, &ModelRef::Plain(&g)).unwrap();
            let naive =
                naive_eval(&phi, n, &|u, v| g.has_edge(u, v), &|_| None, &mut Vec::new());
            if lib != naive {
                eval_bad += 1;
            }
        } else {
            let phi = random_sentence(&mut rng, 2, Some(2));
            let s = sample_uniform(&t(2), 4, rng.next_u64()).unwrap();
            let lib = eval(&phi, &ModelRef::Colored(&s)).unwrap();
            let naive = naive_eval(
                &phi,
                4,
                &|u, v| s.graph.has_edge(u, v),
                &|v| Some(s.color[v]),
                &mut Vec::new(),
            );
            if lib != naive {
                eval_bad += 1;
            }
        }
    }
    if eval_bad > 0 {
        fails.push(format!("the two evaluators disagree on {eval_bad}/1000 cases"));
    }
    // every small extension axiom holds on every seeded sample
    for ell in [2usize, 3] {
        let axioms = extension_axioms(&t(ell), 2).unwrap();
        let violated: usize = (0..100u64)
            .into_par_iter()
            .map(|trial| {
                let s = sample_uniform(&t(ell), 200, Rng::substream(1000 + ell as u64, trial).next_u64())
                    .unwrap();
                axioms
                    .iter()
                    .filter(|a| !eval(a, &ModelRef::Colored(&s)).unwrap())
                    .count()
            })
            .sum();
        if violated > 0 {
            fails.push(format!(
                "{violated} (axiom, sample) violations for the {ell}-level template"
            ));
        }
    }
    verdict(8, "logic engine", fails, None);
}

// ---- criterion 9 ------------------------------------------------------------

type Outcome = (usize, usize, bool, bool);

fn draw_outcomes(product: bool, trials: u64, base: u64) -> BTreeMap<Outcome, u64> {
    let mut counts = BTreeMap::new();
    for trial in 0..trials {
        let seed = Rng::substream(base, trial).next_u64();
        let s = if product {
            sample_product(&t(2), 2, seed).unwrap()
        } else {
            sample_uniform(&t(2), 2, seed).unwrap()
        };
        let key =
            (s.color[0], s.color[1], s.graph.has_edge(0, 1), s.graph.has_edge(1, 0));
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

fn check_law(
    counts: &BTreeMap<Outcome, u64>,
    law: &[(Outcome, f64)],
    trials: u64,
    label: &str,
    fails: &mut Vec<String>,
) {
    if counts.len() != law.len() {
        fails.push(format!(
            "{label}: {} distinct outcomes, law has {}",
            counts.len(),
            law.len()
        ));
        return;
    }
    for &(key, p) in law {
        let got = *counts.get(&key).unwrap_or(&0) as f64;
        let dev = (got - trials as f64 * p).abs();
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        if dev > 3.0 * sigma {
            fails.push(format!(
                "{label}: outcome {key:?} count {got} is {:.1} sigma from {}",
                dev / sigma,
                trials as f64 * p
            ));
        }
    }
}

#[test]
fn criterion_9_sampler_laws() {
    let mut fails = Vec::new();
    let trials = 100_000u64;
    let sixth = 1.0 / 6.0;
    let uniform_law: Vec<(Outcome, f64)> = vec![
        ((0, 0, false, false), sixth),
        ((0, 1, false, false), sixth),
        ((0, 1, true, false), sixth),
        ((1, 0, false, false), sixth),
        ((1, 0, false, true), sixth),
        ((1, 1, false, false), sixth),
    ];
    let counts = draw_outcomes(false, trials, 2026);
    check_law(&counts, &uniform_law, trials, "uniform sampler", &mut fails);

    // the independent-bags law genuinely differs: colour classes first,
    // then each permitted arc with probability 1/2
    let product_law: Vec<(Outcome, f64)> = vec![
        ((0, 0, false, false), 0.25),
        ((0, 1, false, false), 0.125),
        ((0, 1, true, false), 0.125),
        ((1, 0, false, false), 0.125),
        ((1, 0, false, true), 0.125),
        ((1, 1, false, false), 0.25),
    ];
    let counts = draw_outcomes(true, trials, 2027);
    check_law(&counts, &product_law, trials, "independent-bags sampler", &mut fails);
    verdict(9, "sampler laws", fails, None);
}
