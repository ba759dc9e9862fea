//! Command-line front end: every library pipeline behind one binary with
//! reproducible, machine-readable artifacts.
//!
//! Each run prints (or writes with `--output`) a single JSON document
//! `{"manifest": …, "result": …}`. The manifest records the command line,
//! input digests, seeds, library caps, and wall time; the result payload is
//! deterministic given the same inputs and flags. Exact rationals appear as
//! `"p/q"` strings, never floats; decimal fields are display-only extras.
//! Exit codes: 0 success, 1 domain/format errors, 2 budget refusals.

use clap::{Parser, Subcommand, ValueEnum};
use homlaw::colored::{
    count_colored, count_table, exact_ge_pow2, exact_le_scaled_pow2, sample_product,
    sample_uniform, ColoredDigraph,
};
use homlaw::density::{blow_up_structure, densest_maximizers, density, max_oriented_clique};
use homlaw::dual::{
    build_dual, validate_dual, DEFAULT_EXHAUSTIVE_N, DEFAULT_RANDOM_N, DEFAULT_RANDOM_TRIALS,
};
use homlaw::graph::enumerate_oriented_trees;
use homlaw::graph::{enumerate_digraphs, EnumOptions};
use homlaw::hom::{
    automorphisms, core_of, dismantles_to, find_hom, is_core, is_isomorphic, orbits, retraction_of,
};
use homlaw::io;
use homlaw::logic::{
    parse_formula, phi_n_exact, phi_n_estimate, random_sentence, ClassDescriptor, ClassSampler,
    Formula, FrequencyOutcome, FrequencyRow, GraphClass,
};
use homlaw::rng::Rng;
use homlaw::theory::{
    classify_oriented_trees, classify_undirected, mixture_decomposition, sentence_limit_with,
    Prediction, StabilizationSchedule, TheoryDescriptor, TheoryKind, WeightValue,
};
use homlaw::{Digraph, Error, Result};
use num::{BigInt, BigRational, BigUint, One, ToPrimitive};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

const FORMULA_HELP: &str = "Formulas use named variables and ASCII connectives:\n\
  forall x. phi       exists x. phi       phi -> psi (right associative)\n\
  phi | psi           phi & psi           !phi\n\
  E(x,y)  x = y  P<k>(x)  true  false     parentheses as needed\n\
Precedence: ! binds tightest, then &, then |, then ->; a quantifier's scope\n\
extends as far right as possible. Colour atoms P0(x), P1(x), … only make\n\
sense on coloured models. Pass @path to read the formula from a file.";

const GRAPH_HELP: &str = "Graph arguments accept a path to a JSON file\n\
({\"n\": 3, \"edges\": [[0,1],[1,2]]}) or edge-list text (\"n m\" header, one\n\
\"u v\" line per arc), a @path to force file reading, or a named graph:\n\
t<k> (transitive tournament), p<k> (directed path on k vertices),\n\
c<k> (directed cycle), point, loop.";

#[derive(Parser)]
#[command(name = "homlaw", version, about = "Homomorphism classes of finite digraphs: \
duals, densities, exact counts, and almost-sure first-order theories", after_help = GRAPH_HELP)]
struct Cli {
    /// Cap worker parallelism; results never depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the JSON artifact here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find a homomorphism from one digraph to another.
    Hom {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Compute the core and a retraction onto it.
    Core {
        #[arg(long)]
        input: String,
        /// Also write the core as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List automorphisms, orbits, and rigidity.
    Aut {
        #[arg(long)]
        input: String,
        /// Lift the default vertex cap on the automorphism search.
        #[arg(long)]
        override_cap: bool,
    },
    /// Dismantle onto a vertex subset, or the square onto its diagonal.
    Dismantle {
        #[arg(long)]
        input: String,
        /// Comma-separated target vertices.
        #[arg(long, conflicts_with = "square")]
        target: Option<String>,
        /// Dismantle D×D onto the diagonal instead.
        #[arg(long)]
        square: bool,
    },
    /// Maximize the quadratic edge density over the probability simplex.
    Density {
        #[arg(long)]
        input: String,
    },
    /// Build and validate the dual of a set of oriented trees.
    Dual {
        /// JSON file holding a list of digraph objects.
        #[arg(long)]
        trees: String,
        /// Also write the dual as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Tabulate coloured counts c_n, bad counts b_n, densities, and ratios.
    Count {
        #[arg(long)]
        template: String,
        /// Sizes to report, e.g. 3 or 1..10 (inclusive).
        #[arg(long)]
        n: String,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw one coloured digraph from a seeded sampler.
    Sample {
        #[arg(long)]
        template: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Use the independent-bags sampler instead of the exact uniform one.
        #[arg(long)]
        product: bool,
        /// Also write the drawn graph as a DOT file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Exact or sampled sentence frequencies over a class.
    #[command(after_help = FORMULA_HELP)]
    Phi {
        /// Class: all, allugraphs, csp:<graph>, forb:<graph[,graph…]|@file>,
        /// colored:<graph>; with --estimate: colored:<g>, product:<g>, forget:<g>.
        #[arg(long)]
        class: String,
        #[arg(long)]
        formula: String,
        /// Sizes to evaluate, e.g. 3 or 2..5 (inclusive).
        #[arg(long)]
        n: String,
        /// Restrict digraph enumerations to loopless graphs.
        #[arg(long)]
        loopless: bool,
        /// Exact frequencies by full enumeration (the default).
        #[arg(long, conflicts_with = "estimate")]
        exact: bool,
        /// Monte-Carlo estimates from a seeded sampler.
        #[arg(long)]
        estimate: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify the limit theory of a forbidden family or a template.
    Theory {
        /// JSON list of oriented trees to forbid.
        #[arg(long, conflicts_with_all = ["graphs", "template"])]
        trees: Option<String>,
        /// JSON list of undirected graphs to forbid.
        #[arg(long, conflicts_with = "template")]
        graphs: Option<String>,
        /// Template digraph for the mixture decomposition.
        #[arg(long)]
        template: Option<String>,
    },
    /// Predicted limit frequency of a sentence under a classified theory.
    #[command(after_help = FORMULA_HELP)]
    Limit {
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with_all = ["graphs", "template"])]
        trees: Option<String>,
        #[arg(long, conflicts_with = "template")]
        graphs: Option<String>,
        #[arg(long)]
        template: Option<String>,
        /// Sizes for exact finite evidence rows, e.g. 2..5.
        #[arg(long, default_value = "1..4")]
        evidence: String,
        /// Comma-separated sample sizes of the stabilization schedule.
        #[arg(long, default_value = "50,100,200")]
        sizes: String,
        #[arg(long, default_value_t = 20)]
        seeds_per_size: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
    },
    /// Run the oracle and invariant suites and report pass/fail per suite.
    Verify {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quick,
    Full,
}

// ---- input plumbing ---------------------------------------------------------

/// Reads input files and remembers their digests for the manifest.
#[derive(Default)]
struct Ctx {
    inputs: Vec<(String, String)>,
    seed: Option<u64>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
        let mut h = Sha256::new();
        h.update(text.as_bytes());
        self.inputs.push((path.display().to_string(), format!("{:x}", h.finalize())));
        Ok(text)
    }
}

fn named_digraph(tok: &str) -> Result<Digraph> {
    match tok {
        "point" => return Ok(Digraph::empty(1)),
        "loop" => {
            let mut g = Digraph::empty(1);
            g.add_edge(0, 0);
            return Ok(g);
        }
        _ => {}
    }
    let (head, tail) = tok.split_at(1);
    if let Ok(k) = tail.parse::<usize>() {
        match head {
            "t" => return Digraph::transitive_tournament(k),
            "p" => return Digraph::directed_path(k),
            "c" => return Digraph::directed_cycle(k),
            _ => {}
        }
    }
    Err(Error::domain(format!(
        "unknown graph {tok:?}: not an existing file and not one of t<k>, p<k>, c<k>, \
         point, loop"
    )))
}

/// A graph argument: an existing file (JSON or edge list), @path, or a name.
fn resolve_digraph(ctx: &mut Ctx, tok: &str) -> Result<Digraph> {
    if let Some(path) = tok.strip_prefix('@') {
        return io::digraph_from_text(&ctx.read(Path::new(path))?);
    }
    if Path::new(tok).is_file() {
        return io::digraph_from_text(&ctx.read(Path::new(tok))?);
    }
    named_digraph(tok)
}

/// A list argument: @file or file (JSON array), else comma-separated names.
fn resolve_digraph_list(ctx: &mut Ctx, tok: &str) -> Result<Vec<Digraph>> {
    if let Some(path) = tok.strip_prefix('@') {
        return io::digraphs_from_json(&ctx.read(Path::new(path))?);
    }
    if Path::new(tok).is_file() {
        return io::digraphs_from_json(&ctx.read(Path::new(tok))?);
    }
    tok.split(',').map(named_digraph).collect()
}

fn resolve_formula(ctx: &mut Ctx, tok: &str) -> Result<Formula> {
    let text = match tok.strip_prefix('@') {
        Some(path) => ctx.read(Path::new(path))?,
        None => tok.to_string(),
    };
    parse_formula(text.trim())
}

/// "a..b" (inclusive) or a single size.
fn parse_range(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    let bad = || Error::domain(format!("bad size range {s:?}: use a single n or a..b"));
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim().strip_prefix('=').unwrap_or(b.trim());
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        Ok((a..=b).collect())
    } else {
        Ok(vec![s.parse().map_err(|_| bad())?])
    }
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::domain(format!("bad number {t:?} in list {s:?}")))
        })
        .collect()
}

// ---- JSON rendering ---------------------------------------------------------

fn graph_value(d: &Digraph) -> Value {
    json!({"n": d.n(), "edges": d.edges()})
}

fn rat(x: &BigRational) -> Value {
    Value::String(io::rational_to_string(x))
}

fn rat_with_decimal(x: &BigRational) -> (Value, Value) {
    let dec = x.to_f64().map(Value::from).unwrap_or(Value::Null);
    (rat(x), dec)
}

fn row_value(r: &FrequencyRow) -> Value {
    let (phi, dec) = rat_with_decimal(&r.phi_n);
    json!({
        "n": r.n,
        "satisfied": r.satisfied.to_string(),
        "total": r.total.to_string(),
        "phi": phi,
        "decimal": dec,
    })
}

fn weight_value(w: &WeightValue) -> Value {
    match w {
        WeightValue::Exact(x) => json!({"exact": io::rational_to_string(x)}),
        WeightValue::Estimate { value, residual } => {
            json!({"estimate": value, "residual": residual})
        }
    }
}

fn descriptor_value(d: &TheoryDescriptor) -> Value {
    let mut v = match &d.kind {
        TheoryKind::GenericKPartite(k) => json!({"kind": "generic_k_partite", "k": k}),
        TheoryKind::UOfT(ell) => json!({"kind": "u_of_t", "ell": ell}),
        TheoryKind::DensestComponent { support, induced } => json!({
            "kind": "densest_component",
            "support": support,
            "induced": graph_value(induced),
        }),
        TheoryKind::Mixture { template, components } => json!({
            "kind": "mixture",
            "template": graph_value(template),
            "components": components
                .iter()
                .map(|(c, w)| json!({"theory": descriptor_value(c), "weight": weight_value(w)}))
                .collect::<Vec<_>>(),
        }),
    };
    if let Some(pres) = &d.presentation {
        v["presentation"] =
            Value::Array(pres.iter().map(|f| Value::String(f.to_string())).collect());
    }
    v
}

fn colored_value(m: &ColoredDigraph, sampler: &str, seed: u64) -> Value {
    json!({
        "n": m.graph.n(),
        "colors": m.color,
        "edges": m.graph.edges(),
        "template": graph_value(&m.template),
        "sampler": sampler,
        "seed": seed,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::format(format!("write {}: {e}", path.display())))
}

// ---- dispatch ---------------------------------------------------------------

fn main() {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let started = Instant::now();
    let mut ctx = Ctx::default();
    // verify reports must be byte-identical across runs, so they carry no
    // wall-clock field
    let timed = !matches!(cli.command, Cmd::Verify { .. });
    match run(&cli.command, &mut ctx) {
        Ok(result) => {
            let manifest = manifest_value(&cli, &ctx, timed.then(|| started.elapsed().as_millis() as u64));
            let doc = json!({"manifest": manifest, "result": result});
            if let Err(e) = emit(&cli.output, &doc) {
                fail(&e);
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ! {
    let (kind, code) = match e {
        Error::Domain(_) => ("domain", 1),
        Error::Format(_) => ("format", 1),
        Error::Budget(_) => ("budget", 2),
    };
    eprintln!("{}", json!({"error": {"kind": kind, "message": e.to_string()}}));
    std::process::exit(code);
}

fn emit(output: &Option<PathBuf>, doc: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).expect("json rendering cannot fail");
    match output {
        Some(p) => write_text(p, &(text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn manifest_value(cli: &Cli, ctx: &Ctx, wall_ms: Option<u64>) -> Value {
    let mut m = json!({
        "command_line": std::env::args().collect::<Vec<_>>(),
        "version": env!("CARGO_PKG_VERSION"),
        "inputs": ctx
            .inputs
            .iter()
            .map(|(p, d)| json!({"path": p, "sha256": d}))
            .collect::<Vec<_>>(),
        "seed": ctx.seed,
        "threads": cli.threads,
        "caps": {
            "enum_cap_with_loops": homlaw::graph::ENUM_CAP_WITH_LOOPS,
            "enum_cap_loopless": homlaw::graph::ENUM_CAP_LOOPLESS,
            "density_cap": homlaw::density::DENSITY_CAP,
            "dual_state_cap": homlaw::dual::DUAL_STATE_CAP,
            "square_dismantle_cap": homlaw::dual::SQUARE_DISMANTLE_CAP,
            "composition_budget": homlaw::colored::COMPOSITION_BUDGET as u64,
            "eval_budget": homlaw::logic::EVAL_BUDGET as u64,
            "chromatic_cap": homlaw::theory::CHROMATIC_CAP,
        },
    });
    if let Some(ms) = wall_ms {
        m["wall_ms"] = json!(ms);
    }
    m
}

fn run(cmd: &Cmd, ctx: &mut Ctx) -> Result<Value> {
    match cmd {
        Cmd::Hom { from, to } => {
            let g = resolve_digraph(ctx, from)?;
            let h = resolve_digraph(ctx, to)?;
            let hom = find_hom(&g, &h);
            Ok(json!({
                "from": graph_value(&g),
                "to": graph_value(&h),
                "exists": hom.is_some(),
                "witness": hom.map(|m| m.map),
            }))
        }
        Cmd::Core { input, dot } => {
            let g = resolve_digraph(ctx, input)?;
            let (core, retraction) = core_of(&g);
            if let Some(p) = dot {
                write_text(p, &io::digraph_to_dot(&core, "core"))?;
            }
            Ok(json!({
                "input_is_core": is_core(&g),
                "core": graph_value(&core),
                "retraction": retraction,
            }))
        }
        Cmd::Aut { input, override_cap } => {
            let g = resolve_digraph(ctx, input)?;
            let auts = automorphisms(&g, *override_cap)?;
            let orbs = orbits(&g, *override_cap)?;
            Ok(json!({
                "count": auts.len(),
                "rigid": auts.len() == 1,
                "automorphisms": auts.iter().map(|a| a.map.clone()).collect::<Vec<_>>(),
                "orbits": orbs,
            }))
        }
        Cmd::Dismantle { input, target, square } => {
            let d = resolve_digraph(ctx, input)?;
            let (g, base) = if *square {
                let sq = d.product(&d);
                (sq, (0..d.n()).map(|v| v * d.n() + v).collect::<Vec<_>>())
            } else {
                let t = target
                    .as_deref()
                    .ok_or_else(|| Error::domain("pass --target vertices or --square"))?;
                (d.clone(), parse_usize_list(t)?)
            };
            let order = dismantles_to(&g, &base)?;
            Ok(match order {
                Some(o) => {
                    let r = retraction_of(&g, &o);
                    json!({"dismantles": true, "order": o.removed, "retraction": r.map})
                }
                None => json!({"dismantles": false}),
            })
        }
        Cmd::Density { input } => {
            let d = resolve_digraph(ctx, input)?;
            let (value, profile) = density(&d)?;
            let (blow_up, clique) = if d.is_oriented() {
                let b = blow_up_structure(&d, &profile)?;
                let (k, verts) = max_oriented_clique(&d)?;
                (b, json!({"size": k, "witness": verts}))
            } else {
                (None, Value::Null)
            };
            let (v, dec) = rat_with_decimal(&value);
            Ok(json!({
                "value": v,
                "decimal": dec,
                "delta": profile.delta.iter().map(rat).collect::<Vec<_>>(),
                "support": profile.support,
                "max_oriented_clique": clique,
                "blow_up": blow_up.map(|b| json!({
                    "k": b.k,
                    "classes": b.classes,
                    "class_masses": b.class_masses.iter().map(rat).collect::<Vec<_>>(),
                })),
            }))
        }
        Cmd::Dual { trees, dot } => {
            let forest = resolve_digraph_list(ctx, trees)?;
            let built = build_dual(&forest)?;
            let report = validate_dual(
                &forest,
                &built.dual,
                DEFAULT_EXHAUSTIVE_N,
                DEFAULT_RANDOM_TRIALS,
                DEFAULT_RANDOM_N,
                homlaw::dual::DEFAULT_SEED,
            );
            if let Some(p) = dot {
                write_text(p, &io::digraph_to_dot(&built.dual, "dual"))?;
            }
            Ok(json!({
                "dual": graph_value(&built.dual),
                "construction_size": built.construction_size,
                "certificates": {
                    "acyclic": built.certificates.acyclic,
                    "rigid": built.certificates.rigid,
                    "square_dismantles": built.certificates.square_dismantles,
                    "oracle_checked_to": built.certificates.oracle_checked_to,
                },
                "validation": {
                    "pass": report.pass,
                    "exhaustive_checked": report.exhaustive_checked,
                    "random_checked": report.random_checked,
                },
            }))
        }
        Cmd::Count { template, n, csv } => {
            let d = resolve_digraph(ctx, template)?;
            let sizes = parse_range(n)?;
            let n_max = *sizes.iter().max().expect("nonempty range");
            let (_, profile) = density(&d)?;
            let (_, maximizers) = densest_maximizers(&d)?;
            let good: Vec<Vec<usize>> =
                maximizers.iter().map(|p| p.support.clone()).collect();
            let table = count_table(&d, n_max, &profile.support, &good)?;
            let rows: Vec<&homlaw::colored::CountRow> =
                table.rows.iter().filter(|r| sizes.contains(&r.n)).collect();
            if let Some(p) = csv {
                write_text(p, &count_csv(&rows))?;
            }
            Ok(json!({
                "template": graph_value(&d),
                "support": profile.support,
                "good_supports": good,
                "rows": rows.iter().map(|r| json!({
                    "n": r.n,
                    "c_n": r.c_n.to_string(),
                    "b_n": r.b_n.to_string(),
                    "d_n": rat(&r.d_n),
                    "ratio": rat(&r.ratio),
                })).collect::<Vec<_>>(),
            }))
        }
        Cmd::Sample { template, n, seed, product, dot } => {
            ctx.seed = Some(*seed);
            let d = resolve_digraph(ctx, template)?;
            let (m, which) = if *product {
                (sample_product(&d, *n, *seed)?, "product")
            } else {
                (sample_uniform(&d, *n, *seed)?, "uniform")
            };
            if let Some(p) = dot {
                write_text(p, &io::digraph_to_dot(&m.graph, "sample"))?;
            }
            Ok(colored_value(&m, which, *seed))
        }
        Cmd::Phi { class, formula, n, loopless, estimate, trials, seed, .. } => {
            let phi = resolve_formula(ctx, formula)?;
            let sizes = parse_range(n)?;
            if *estimate {
                ctx.seed = Some(*seed);
                let sampler = parse_sampler(ctx, class)?;
                let rows: Vec<Value> = sizes
                    .iter()
                    .map(|&sz| -> Result<Value> {
                        let e = phi_n_estimate(&sampler, &phi, sz, *trials, *seed)?;
                        Ok(json!({
                            "n": sz,
                            "estimate": e.estimate,
                            "stderr": e.stderr,
                            "trials": e.trials,
                        }))
                    })
                    .collect::<Result<_>>()?;
                Ok(json!({"formula": phi.to_string(), "rows": rows}))
            } else {
                let desc = parse_class(ctx, class, *loopless)?;
                let rows: Vec<Value> = sizes
                    .iter()
                    .map(|&sz| -> Result<Value> {
                        Ok(match phi_n_exact(&desc, &phi, sz)? {
                            FrequencyOutcome::Defined(r) => row_value(&r),
                            FrequencyOutcome::Undefined { n } => {
                                json!({"n": n, "undefined": true})
                            }
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(json!({"formula": phi.to_string(), "rows": rows}))
            }
        }
        Cmd::Theory { trees, graphs, template } => theory_cmd(ctx, trees, graphs, template),
        Cmd::Limit {
            formula,
            trees,
            graphs,
            template,
            evidence,
            sizes,
            seeds_per_size,
            base_seed,
        } => {
            ctx.seed = Some(*base_seed);
            let phi = resolve_formula(ctx, formula)?;
            let descriptor = derive_descriptor(ctx, trees, graphs, template)?;
            let schedule = StabilizationSchedule {
                sizes: parse_usize_list(sizes)?,
                seeds_per_size: *seeds_per_size,
                base_seed: *base_seed,
            };
            let evidence_n = parse_range(evidence)?;
            let report = sentence_limit_with(&phi, &descriptor, &evidence_n, &schedule)?;
            let predicted = match &report.predicted {
                Prediction::Exact(x) => json!({"exact": io::rational_to_string(x)}),
                Prediction::Estimate { value } => json!({"estimate": value}),
                Prediction::Undetermined => Value::String("undetermined".into()),
            };
            Ok(json!({
                "formula": phi.to_string(),
                "descriptor": descriptor_value(&descriptor),
                "predicted": predicted,
                "evidence": report.finite_evidence.iter().map(row_value).collect::<Vec<_>>(),
            }))
        }
        Cmd::Verify { level, seed } => {
            ctx.seed = Some(*seed);
            Ok(verify_report(*level, *seed))
        }
    }
}

fn theory_cmd(
    ctx: &mut Ctx,
    trees: &Option<String>,
    graphs: &Option<String>,
    template: &Option<String>,
) -> Result<Value> {
    if let Some(t) = trees {
        let forest = resolve_digraph_list(ctx, t)?;
        let got = classify_oriented_trees(&forest)?;
        return Ok(json!({
            "ell": got.ell,
            "dual": graph_value(&got.dual.dual),
            "construction_size": got.dual.construction_size,
            "certificates": {
                "acyclic": got.dual.certificates.acyclic,
                "rigid": got.dual.certificates.rigid,
                "square_dismantles": got.dual.certificates.square_dismantles,
                "oracle_checked_to": got.dual.certificates.oracle_checked_to,
            },
            "theory": descriptor_value(&got.theory),
        }));
    }
    if let Some(g) = graphs {
        let text = if Path::new(g).is_file() || g.starts_with('@') {
            ctx.read(Path::new(g.strip_prefix('@').unwrap_or(g)))?
        } else {
            return Err(Error::domain("--graphs takes a JSON file of undirected graphs"));
        };
        let family = io::ugraphs_from_json(&text)?;
        let got = classify_undirected(&family)?;
        return Ok(json!({"theory": descriptor_value(&got)}));
    }
    if let Some(t) = template {
        let d = resolve_digraph(ctx, t)?;
        let got = mixture_decomposition(&d)?;
        return Ok(json!({"theory": descriptor_value(&got)}));
    }
    Err(Error::domain("pass one of --trees, --graphs, --template"))
}

fn derive_descriptor(
    ctx: &mut Ctx,
    trees: &Option<String>,
    graphs: &Option<String>,
    template: &Option<String>,
) -> Result<TheoryDescriptor> {
    if let Some(t) = trees {
        return Ok(classify_oriented_trees(&resolve_digraph_list(ctx, t)?)?.theory);
    }
    if let Some(g) = graphs {
        let text = ctx.read(Path::new(g.strip_prefix('@').unwrap_or(g)))?;
        return classify_undirected(&io::ugraphs_from_json(&text)?);
    }
    if let Some(t) = template {
        return mixture_decomposition(&resolve_digraph(ctx, t)?);
    }
    Err(Error::domain("pass one of --trees, --graphs, --template"))
}

fn parse_class(ctx: &mut Ctx, spec: &str, loopless: bool) -> Result<ClassDescriptor> {
    let (kind, rest) = match spec.split_once(':') {
        Some((k, r)) => (k, Some(r)),
        None => (spec, None),
    };
    let need = |r: Option<&str>| {
        r.map(str::to_string)
            .ok_or_else(|| Error::domain(format!("class {spec:?} needs a graph after the colon")))
    };
    let class = match kind {
        "all" => GraphClass::AllDigraphs,
        "allugraphs" | "ugraphs" => GraphClass::AllUGraphs,
        "csp" => GraphClass::Csp(resolve_digraph(ctx, &need(rest)?)?),
        "colored" => GraphClass::Colored(resolve_digraph(ctx, &need(rest)?)?),
        "forb" => GraphClass::Forb(resolve_digraph_list(ctx, &need(rest)?)?),
        _ => {
            return Err(Error::domain(format!(
                "unknown class {spec:?}: use all, allugraphs, csp:<g>, forb:<list>, colored:<g>"
            )))
        }
    };
    Ok(ClassDescriptor { class, loopless })
}

fn parse_sampler(ctx: &mut Ctx, spec: &str) -> Result<ClassSampler> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::domain(format!("sampler class {spec:?} needs a graph")))?;
    let d = resolve_digraph(ctx, rest)?;
    match kind {
        "colored" => Ok(ClassSampler::ColoredUniform(d)),
        "product" => Ok(ClassSampler::ColoredProduct(d)),
        "forget" => Ok(ClassSampler::ForgetUniform(d)),
        _ => Err(Error::domain(format!(
            "estimation needs a sampled class: colored:<g>, product:<g>, or forget:<g>; \
             got {spec:?}"
        ))),
    }
}

fn count_csv(rows: &[&homlaw::colored::CountRow]) -> String {
    let mut out = String::from("n,c_n,b_n,d_n,ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n,
            r.c_n,
            r.b_n,
            io::rational_to_string(&r.d_n),
            io::rational_to_string(&r.ratio)
        ));
    }
    out
}

// ---- verify suites ----------------------------------------------------------

type SuiteResult = Result<std::result::Result<(), String>>;

fn verify_report(level: Level, seed: u64) -> Value {
    let full = level == Level::Full;
    let mut suites: Vec<Value> = Vec::new();
    let mut failures = 0usize;
    let mut push = |name: &str, r: SuiteResult| {
        let (pass, detail) = match r {
            Ok(Ok(())) => (true, String::new()),
            Ok(Err(d)) => (false, d),
            Err(e) => (false, e.to_string()),
        };
        if !pass {
            failures += 1;
        }
        suites.push(json!({"name": name, "pass": pass, "detail": detail}));
    };

    push("density-tournaments", suite_density_tournaments());
    push("density-motzkin-straus", suite_motzkin_straus(if full { 5 } else { 4 }));
    push("dual-path-duals", suite_dual_paths(full, seed));
    push("count-oracle", suite_count_oracle(if full { 4 } else { 3 }));
    push("count-inequalities", suite_count_inequalities(if full { 16 } else { 12 }));
    push("sampler-reproducibility", suite_sampler(full, seed));
    push("logic-complementation", suite_complementation(if full { 50 } else { 20 }, seed));
    push("chromatic-invariants", suite_chromatic());
    push("tree-classification", suite_tree_classify(if full { 4 } else { 3 }));
    push("mixture-weights", suite_mixture());

    json!({
        "level": if full { "full" } else { "quick" },
        "seed": seed,
        "suites": suites,
        "total": 10,
        "failures": failures,
    })
}

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn suite_density_tournaments() -> SuiteResult {
    for k in 2..=6i64 {
        let t = Digraph::transitive_tournament(k as usize)?;
        let (v, _) = density(&t)?;
        if v != frac(k - 1, 2 * k) {
            return Ok(Err(format!("tournament on {k}: density {v}")));
        }
    }
    Ok(Ok(()))
}

fn suite_motzkin_straus(cap: usize) -> SuiteResult {
    for n in 1..=cap {
        let opts = EnumOptions { loopless: true, ..Default::default() };
        for g in enumerate_digraphs(n, opts)? {
            if !g.is_oriented() {
                continue;
            }
            let (omega, _) = max_oriented_clique(&g)?;
            let (v, _) = density(&g)?;
            if v != frac(omega as i64 - 1, 2 * omega as i64) {
                return Ok(Err(format!(
                    "a {n}-vertex oriented digraph with clique {omega} has density {v}"
                )));
            }
        }
    }
    Ok(Ok(()))
}

fn suite_dual_paths(full: bool, seed: u64) -> SuiteResult {
    let kmax = if full { 4 } else { 3 };
    for k in 2..=kmax {
        let p = Digraph::directed_path(k)?;
        let built = build_dual(std::slice::from_ref(&p))?;
        if !is_isomorphic(&built.dual, &Digraph::transitive_tournament(k - 1)?) {
            return Ok(Err(format!(
                "dual of the {k}-vertex path is not the expected tournament"
            )));
        }
        let c = &built.certificates;
        if !(c.acyclic && c.rigid && c.square_dismantles) {
            return Ok(Err(format!("certificates failed for the {k}-vertex path: {c:?}")));
        }
        let report = validate_dual(
            &[p],
            &built.dual,
            if full { 4 } else { 3 },
            if full { 2000 } else { 500 },
            if full { 7 } else { 6 },
            seed,
        );
        if !report.pass {
            return Ok(Err(format!("oracle validation failed for the {k}-vertex path")));
        }
    }
    Ok(Ok(()))
}

fn suite_count_oracle(cap: usize) -> SuiteResult {
    let t2 = Digraph::transitive_tournament(2)?;
    for (n, want) in [(1u32, 2u32), (2, 6), (3, 26)] {
        let got = count_colored(&t2, n as usize)?;
        if got != BigUint::from(want) {
            return Ok(Err(format!("c_{n} of the single arc: got {got}, want {want}")));
        }
    }
    // totals of the coloured-class enumeration must reproduce the closed
    // counting formula
    let top = parse_formula("true").expect("constant formula");
    for d in [t2, Digraph::directed_cycle(3)?] {
        let desc =
            ClassDescriptor { class: GraphClass::Colored(d.clone()), loopless: false };
        for n in 1..=cap {
            let total = match phi_n_exact(&desc, &top, n)? {
                FrequencyOutcome::Defined(r) => r.total,
                FrequencyOutcome::Undefined { n } => {
                    return Ok(Err(format!("coloured class empty at n={n}")));
                }
            };
            if total != count_colored(&d, n)? {
                return Ok(Err(format!("enumerated coloured total at n={n} disagrees")));
            }
        }
    }
    Ok(Ok(()))
}

fn suite_count_inequalities(n_max: usize) -> SuiteResult {
    let d = Digraph::directed_cycle(3)?
        .disjoint_union(&Digraph::transitive_tournament(3)?);
    let (_, profile) = density(&d)?;
    let (_, maximizers) = densest_maximizers(&d)?;
    let good: Vec<Vec<usize>> = maximizers.iter().map(|p| p.support.clone()).collect();
    let table = count_table(&d, n_max, &profile.support, &good)?;
    let k = d.n() as u32;
    for r in &table.rows {
        let nn = BigRational::from(BigInt::from((r.n * r.n) as i64));
        let lower = &nn * &r.d_n;
        if !exact_ge_pow2(&r.c_n, &lower) {
            return Ok(Err(format!("count lower bound fails at n={}", r.n)));
        }
        let n_rat = BigRational::from(BigInt::from(r.n as i64));
        let corr = BigRational::one() - n_rat.recip() + (&n_rat * &n_rat).recip();
        let upper = &lower * &corr;
        let poly = BigUint::from(r.n).pow(k);
        if !exact_le_scaled_pow2(&r.b_n, &poly, &upper) {
            return Ok(Err(format!("bad-count upper bound fails at n={}", r.n)));
        }
    }
    Ok(Ok(()))
}

fn suite_sampler(full: bool, seed: u64) -> SuiteResult {
    let t2 = Digraph::transitive_tournament(2)?;
    for n in [2usize, 17] {
        let a = sample_uniform(&t2, n, seed)?;
        let b = sample_uniform(&t2, n, seed)?;
        a.validate()?;
        if a.color != b.color || a.graph != b.graph {
            return Ok(Err(format!("uniform sampler not reproducible at n={n}")));
        }
        let a = sample_product(&t2, n, seed)?;
        let b = sample_product(&t2, n, seed)?;
        a.validate()?;
        if a.color != b.color || a.graph != b.graph {
            return Ok(Err(format!("product sampler not reproducible at n={n}")));
        }
    }
    // small-law coverage: every one of the six outcomes at n=2 appears
    let trials = if full { 10_000 } else { 200 };
    let mut counts = std::collections::BTreeMap::<String, usize>::new();
    for t in 0..trials {
        let s = sample_uniform(&t2, 2, Rng::substream(seed, t as u64).next_u64())?;
        let key = format!("{:?}|{:?}", s.color, s.graph.edges());
        *counts.entry(key).or_default() += 1;
    }
    if counts.len() != 6 {
        return Ok(Err(format!("{} distinct outcomes at n=2, want 6", counts.len())));
    }
    if full {
        // each outcome within 5 binomial standard deviations of 1/6
        let p = 1.0 / 6.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (key, c) in &counts {
            let dev = (*c as f64 / trials as f64 - p).abs();
            if dev > 5.0 * sigma {
                return Ok(Err(format!("outcome {key} off by {dev:.4} (> 5 sigma)")));
            }
        }
    }
    Ok(Ok(()))
}

fn suite_complementation(count: usize, seed: u64) -> SuiteResult {
    let mut rng = Rng::substream(seed, 7);
    let digraphs = ClassDescriptor { class: GraphClass::AllDigraphs, loopless: false };
    let ugraphs = ClassDescriptor { class: GraphClass::AllUGraphs, loopless: false };
    for i in 0..count {
        let phi = random_sentence(&mut rng, 2, None);
        let neg = Formula::not(phi.clone());
        for desc in [&digraphs, &ugraphs] {
            let a = phi_n_exact(desc, &phi, 3)?;
            let b = phi_n_exact(desc, &neg, 3)?;
            let (a, b) = match (a, b) {
                (FrequencyOutcome::Defined(a), FrequencyOutcome::Defined(b)) => (a, b),
                _ => return Ok(Err(format!("sentence {i}: unexpected empty class"))),
            };
            if a.phi_n + b.phi_n != BigRational::one() {
                return Ok(Err(format!("complementation fails for sentence {i}: {phi}")));
            }
        }
    }
    Ok(Ok(()))
}

fn suite_chromatic() -> SuiteResult {
    use homlaw::theory::chromatic_invariants;
    use homlaw::UGraph;
    for n in 2..=6 {
        let inv = chromatic_invariants(&UGraph::complete(n)?)?;
        if (inv.chi, inv.omega, inv.co_chromatic) != (n, n, n + 1) {
            return Ok(Err(format!("complete graph on {n}: {inv:?}")));
        }
    }
    for k in [5, 7, 9] {
        let inv = chromatic_invariants(&UGraph::cycle(k)?)?;
        if (inv.chi, inv.omega, inv.co_chromatic) != (3, 2, 3) {
            return Ok(Err(format!("odd cycle on {k}: {inv:?}")));
        }
    }
    let inv = chromatic_invariants(&UGraph::grotzsch())?;
    if (inv.chi, inv.omega, inv.co_chromatic) != (4, 2, 3) {
        return Ok(Err(format!("triangle-free 4-chromatic graph: {inv:?}")));
    }
    Ok(Ok(()))
}

fn suite_tree_classify(cap: usize) -> SuiteResult {
    for n in 1..=cap {
        for t in enumerate_oriented_trees(n)? {
            let got = classify_oriented_trees(&[t])?;
            let c = &got.dual.certificates;
            if !(c.acyclic && c.rigid && c.square_dismantles) {
                return Ok(Err(format!("certificates failed on a {n}-vertex tree: {c:?}")));
            }
            if !matches!(got.theory.kind, TheoryKind::UOfT(_)) {
                return Ok(Err(format!("unexpected theory kind on a {n}-vertex tree")));
            }
        }
    }
    Ok(Ok(()))
}

fn suite_mixture() -> SuiteResult {
    let c3 = Digraph::directed_cycle(3)?;
    let t3 = Digraph::transitive_tournament(3)?;
    let got = mixture_decomposition(&c3.disjoint_union(&t3))?;
    match &got.kind {
        TheoryKind::Mixture { components, .. } => {
            if components.len() != 2 {
                return Ok(Err(format!("{} components, want 2", components.len())));
            }
            for (_, w) in components {
                if *w != WeightValue::Exact(frac(1, 2)) {
                    return Ok(Err(format!("weight {w:?}, want exactly 1/2")));
                }
            }
        }
        k => return Ok(Err(format!("expected a mixture, got {k:?}"))),
    }
    let t2 = Digraph::transitive_tournament(2)?;
    let got = mixture_decomposition(&t2.disjoint_union(&t2))?;
    if got.kind != TheoryKind::UOfT(2) {
        return Ok(Err("twin supports did not collapse".into()));
    }
    let got = mixture_decomposition(&t3)?;
    if got.kind != TheoryKind::UOfT(3) {
        return Ok(Err("single tournament did not classify".into()));
    }
    Ok(Ok(()))
}
