//! `partitionlab` CLI: JSON reports on stdout, human summaries on stderr.
//!
//! Exit codes: 0 verified, 1 violated (witness attached), 2 usage or
//! precondition error, 3 incomplete (budget exhausted).

use clap::{Args, Parser, Subcommand};
use partitionlab::certificates::{verify_builtin, BoundOutcome, BuiltinName};
use partitionlab::checkers::{
    claim1_exhaustive, contains_r_box, is_cross_partition_free, is_partition_free,
    is_r_partition_free, is_t_pseudo_partition_free, CheckOutcome, Quantifier,
};
use partitionlab::constructions::{
    construction_identities, double, example4_triple, kleitman_family, knr, pseudo_family_ms,
    tilde_kx,
};
use partitionlab::export::{lp_model, wcnf_model, Model};
use partitionlab::gadgets::{
    build_3m, build_3m2, build_prop1, constraints, gadget_rhs, trace_feasible, trace_of,
    trace_weight, validate, Gadget, GadgetKind,
};
use partitionlab::profile::{eq005_holds, eq005_report, layer_profile};
use partitionlab::report::{RunReport, Status};
use partitionlab::search::{
    exact_max_trace, exact_mn, heuristic_max_trace, lembp_exhaustive, SearchConfig, SearchResult,
};
use partitionlab::{Error, Family, Ratio};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "partitionlab", version, about = "Exact toolkit for partition-free families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SearchOpts {
    #[arg(long)]
    budget_secs: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker count; defaults to PARTITIONLAB_THREADS or 1.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 4)]
    witness_limit: usize,
}

impl SearchOpts {
    fn config(&self) -> SearchConfig {
        let threads = self.threads.unwrap_or_else(|| {
            std::env::var("PARTITIONLAB_THREADS")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(1)
        });
        SearchConfig {
            budget_seconds: self.budget_secs,
            seed: self.seed,
            thread_count: threads,
            witness_limit: self.witness_limit,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a named family and emit it as JSON.
    Construct {
        /// kleitman | tilde | example4 | knr | pseudo | double-kleitman
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        x: Option<u32>,
        #[arg(long)]
        r: Option<i64>,
        /// `s` parameter of the pseudo band `[m, 2m−s−1]`.
        #[arg(long)]
        t: Option<i64>,
        /// Also write the family JSON to this path.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Check a family property; exit 1 with a witness on violation.
    Check {
        /// pf | cross | rpf | box | pseudo
        #[arg(long)]
        property: String,
        /// Family JSON file(s); three for `cross`.
        #[arg(long = "in", num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long)]
        r: Option<usize>,
        #[arg(long)]
        t: Option<i64>,
        /// Require pairwise distinct sets in the partition quantifier.
        #[arg(long)]
        distinct: bool,
        /// Allow empty blocks in the box check.
        #[arg(long)]
        allow_empty_blocks: bool,
    },
    /// Layer profile of a family plus the prefix-sum inequality report.
    Profile {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Verify a builtin certificate exactly.
    Certify {
        /// table1 | clach_3m2 | clach2_3m | table3_pseudo
        #[arg(long)]
        name: String,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        t: Option<i64>,
    },
    /// Build, validate, or evaluate a weighted gadget.
    Gadget {
        /// 3m2 | 3m | prop1
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: i64,
        #[arg(long, default_value_t = 0)]
        rotation: i64,
        /// validate | rhs | constraints | trace
        action: String,
        /// Family JSON file(s) for `trace` (one for 3m, three otherwise).
        #[arg(long)]
        family: Vec<PathBuf>,
    },
    /// Exact and heuristic optimizers.
    Search {
        #[command(subcommand)]
        what: SearchCmd,
    },
    /// The 2^6-pattern membership micro-oracle.
    Claim1,
    /// Cardinality identities of the named constructions for m = 1..=M.
    Identities {
        #[arg(long, default_value_t = 12)]
        m: i64,
    },
    /// Export a trace or m(n) instance as a WCNF or LP model.
    Export {
        /// Gadget kind (3m2 | 3m | prop1), or use --name mn with --n.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        m: Option<i64>,
        #[arg(long)]
        n: Option<u32>,
        /// wcnf | lp
        #[arg(long)]
        format: String,
        /// Write the model text here; the manifest goes to the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Exhaustive maximum partition-free family size over [n].
    Mn {
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Maximum feasible gadget trace, exact or heuristic.
    Trace {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: i64,
        #[arg(long)]
        heuristic: bool,
        #[arg(long, default_value_t = 100_000)]
        iters: u64,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Exhaustive step-10 cover sweep over all valid charge sets.
    Lembp {
        #[arg(long)]
        m: i64,
    },
}

fn read_family(path: &PathBuf) -> Result<Family, Error> {
    let file = std::fs::File::open(path)?;
    Family::read_json(std::io::BufReader::new(file))
}

fn family_json(f: &Family) -> Value {
    serde_json::to_value(f.to_json()).expect("family serializes")
}

fn ratio_str(r: &Ratio) -> String {
    r.to_string()
}

fn build_gadget(kind: &str, m: i64, rotation: i64) -> Result<Gadget, Error> {
    match GadgetKind::parse(kind)? {
        GadgetKind::G3m2 => build_3m2(m),
        GadgetKind::G3m => build_3m(m, rotation),
        GadgetKind::Prop1 => build_prop1(m),
    }
}

fn search_payload(res: &SearchResult) -> Value {
    json!({
        "optimum": ratio_str(&res.optimum),
        "upperBound": res.upper_bound.as_ref().map(ratio_str),
        "witnesses": res.witnesses,
        "optimaCount": res.optima_count,
        "nodesExplored": res.nodes_explored,
        "proved": res.proved,
        "seed": res.seed,
        "elapsedMs": res.elapsed_ms,
    })
}

fn outcome_to_report(report: &mut RunReport, outcome: CheckOutcome, what: &str) {
    match outcome {
        Ok(()) => {
            report.status = Status::Verified;
            report.payload = json!({ "property": what, "holds": true });
        }
        Err(w) => {
            report.status = Status::Violated;
            report.payload = json!({ "property": what, "holds": false });
            report.witnesses.push(serde_json::to_value(&w).expect("witness serializes"));
        }
    }
}

fn run(cli: Cli) -> Result<RunReport, Error> {
    match cli.cmd {
        Cmd::Construct { name, n, m, x, r, t, json_out } => {
            let mut report = RunReport::new(
                "construct",
                json!({"name": name, "n": n, "m": m, "x": x, "r": r, "t": t}),
            );
            let need = |v: Option<u32>, flag: &str| {
                v.ok_or_else(|| Error::Precondition(format!("--{flag} is required")))
            };
            let families: Vec<Family> = match name.as_str() {
                "kleitman" => vec![kleitman_family(need(n, "n")?)?],
                "double-kleitman" => vec![double(&kleitman_family(need(n, "n")?)?)?],
                "tilde" => vec![tilde_kx(need(n, "n")?, need(x, "x")?)?],
                "example4" => {
                    let m = m.ok_or_else(|| Error::Precondition("--m is required".into()))?;
                    let (a, b, c) = example4_triple(m)?;
                    vec![a, b, c]
                }
                "knr" => vec![knr(
                    need(n, "n")?,
                    r.ok_or_else(|| Error::Precondition("--r is required".into()))?,
                )?],
                "pseudo" => vec![pseudo_family_ms(
                    need(n, "n")?,
                    m.ok_or_else(|| Error::Precondition("--m is required".into()))?,
                    t.ok_or_else(|| Error::Precondition("--t is required".into()))?,
                )?],
                other => {
                    return Err(Error::Precondition(format!("unknown construction `{other}`")))
                }
            };
            if let Some(path) = json_out {
                let out = std::fs::File::create(path)?;
                if families.len() == 1 {
                    families[0].write_json(out)?;
                } else {
                    let arr: Vec<_> = families.iter().map(|f| f.to_json()).collect();
                    serde_json::to_writer_pretty(out, &arr)?;
                }
            }
            report.payload = json!({
                "families": families.iter().map(family_json).collect::<Vec<_>>(),
                "sizes": families.iter().map(Family::len).collect::<Vec<_>>(),
            });
            Ok(report)
        }
        Cmd::Check { property, input, r, t, distinct, allow_empty_blocks } => {
            let mut report = RunReport::new(
                "check",
                json!({"property": property, "in": input, "r": r, "t": t, "distinct": distinct}),
            );
            let expect_files = if property == "cross" { 3 } else { 1 };
            if input.len() != expect_files {
                return Err(Error::Precondition(format!(
                    "property `{property}` needs {expect_files} input file(s), got {}",
                    input.len()
                )));
            }
            let fams: Vec<Family> = input.iter().map(read_family).collect::<Result<_, _>>()?;
            let q = if distinct { Quantifier::Distinct } else { Quantifier::Literal };
            let outcome = match property.as_str() {
                "pf" => is_partition_free(&fams[0], q),
                "cross" => is_cross_partition_free(&fams[0], &fams[1], &fams[2])?,
                "rpf" => is_r_partition_free(
                    &fams[0],
                    r.ok_or_else(|| Error::Precondition("--r is required".into()))?,
                )?,
                "box" => contains_r_box(
                    &fams[0],
                    r.ok_or_else(|| Error::Precondition("--r is required".into()))?,
                    allow_empty_blocks,
                )?,
                "pseudo" => is_t_pseudo_partition_free(
                    &fams[0],
                    t.ok_or_else(|| Error::Precondition("--t is required".into()))?,
                )?,
                other => return Err(Error::Precondition(format!("unknown property `{other}`"))),
            };
            outcome_to_report(&mut report, outcome, &property);
            Ok(report)
        }
        Cmd::Profile { input } => {
            let mut report = RunReport::new("profile", json!({"in": input}));
            let f = read_family(&input)?;
            let p = layer_profile(&f);
            let rows: Vec<Value> = eq005_report(f.n())
                .iter()
                .map(|r| {
                    json!({
                        "k": r.k,
                        "prefixSum": r.prefix_sum.to_string(),
                        "binomK": r.binom_k.to_string(),
                        "holds": r.holds,
                    })
                })
                .collect();
            report.status =
                if eq005_holds(f.n()) { Status::Verified } else { Status::Violated };
            report.payload = json!({
                "n": f.n(),
                "present": p.f.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "missing": p.y.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                "prefixInequality": rows,
            });
            Ok(report)
        }
        Cmd::Certify { name, m, t } => {
            let mut report =
                RunReport::new("certify", json!({"name": name, "m": m, "t": t}));
            let name = BuiltinName::parse(&name)?;
            let rep = verify_builtin(name, m, t)?;
            let betas: Vec<Value> = rep
                .cv
                .beta
                .iter()
                .map(|(&(i, layer), b)| json!({"family": i, "layer": layer, "beta": b.to_string()}))
                .collect();
            let bound = match implied(&rep) {
                Some(b) => b,
                None => "invalid".into(),
            };
            report.status = if rep.passed() { Status::Verified } else { Status::Violated };
            for f in &rep.failures {
                report.witnesses.push(serde_json::to_value(f).expect("failure serializes"));
            }
            report.payload = json!({
                "name": rep.name.as_str(),
                "m": rep.m,
                "t": rep.t,
                "n": rep.n,
                "familyCount": rep.family_count,
                "beta": betas,
                "rhsTotal": ratio_str(&rep.cv.rhs_total),
                "axioms": rep.cv.axioms,
                "bound": bound,
                "expectedBound": ratio_str(&rep.expected_bound),
                "passed": rep.passed(),
            });
            Ok(report)
        }
        Cmd::Gadget { kind, m, rotation, action, family } => {
            let mut report = RunReport::new(
                "gadget",
                json!({"kind": kind, "m": m, "rotation": rotation, "action": action}),
            );
            let g = build_gadget(&kind, m, rotation)?;
            match action.as_str() {
                "validate" => match validate(&g) {
                    Ok(()) => {
                        report.payload = json!({"slots": g.slots.len(), "valid": true});
                    }
                    Err(msg) => {
                        report.status = Status::Violated;
                        report.payload = json!({"slots": g.slots.len(), "valid": false});
                        report.witnesses.push(json!({ "violation": msg }));
                    }
                },
                "rhs" => {
                    report.payload = json!({"rhs": ratio_str(&gadget_rhs(&g))});
                }
                "constraints" => {
                    let cs = constraints(&g);
                    report.payload = json!({
                        "slots": g.slots.len(),
                        "forbiddenTriples": cs.triples,
                    });
                }
                "trace" => {
                    let fams: Vec<Family> =
                        family.iter().map(read_family).collect::<Result<_, _>>()?;
                    let refs: Vec<&Family> = fams.iter().collect();
                    let trace = trace_of(&g, &refs)?;
                    let cs = constraints(&g);
                    let weight = trace_weight(&g, &trace);
                    match trace_feasible(&trace, &cs) {
                        Ok(()) => {
                            report.payload = json!({
                                "weight": ratio_str(&weight),
                                "rhs": ratio_str(&gadget_rhs(&g)),
                                "feasible": true,
                            });
                        }
                        Err(tr) => {
                            report.status = Status::Violated;
                            report.payload = json!({
                                "weight": ratio_str(&weight),
                                "rhs": ratio_str(&gadget_rhs(&g)),
                                "feasible": false,
                            });
                            let slots: Vec<Value> = tr
                                .iter()
                                .map(|&i| {
                                    json!({
                                        "slot": i,
                                        "label": g.slots[i].label,
                                        "group": g.slots[i].group,
                                        "set": g.slots[i].set.elements(),
                                    })
                                })
                                .collect();
                            report.witnesses.push(json!({ "forbiddenTriple": slots }));
                        }
                    }
                }
                other => {
                    return Err(Error::Precondition(format!("unknown gadget action `{other}`")))
                }
            }
            Ok(report)
        }
        Cmd::Search { what } => match what {
            SearchCmd::Mn { n, opts } => {
                let mut report = RunReport::new("search mn", json!({"n": n}));
                let res = exact_mn(n, &opts.config())?;
                report.status = if res.proved { Status::Verified } else { Status::Incomplete };
                report.payload = search_payload(&res);
                Ok(report)
            }
            SearchCmd::Trace { kind, m, heuristic, iters, opts } => {
                let mut report = RunReport::new(
                    "search trace",
                    json!({"kind": kind, "m": m, "heuristic": heuristic, "iters": iters}),
                );
                let g = build_gadget(&kind, m, 0)?;
                let cs = constraints(&g);
                let res = if heuristic {
                    heuristic_max_trace(&g, &cs, iters, &opts.config())?
                } else {
                    exact_max_trace(&g, &cs, &opts.config())
                };
                report.status = if res.proved { Status::Verified } else { Status::Incomplete };
                let mut payload = search_payload(&res);
                payload["rhs"] = Value::String(ratio_str(&gadget_rhs(&g)));
                report.payload = payload;
                Ok(report)
            }
            SearchCmd::Lembp { m } => {
                let mut report = RunReport::new("search lembp", json!({"m": m}));
                let rep = lembp_exhaustive(m)?;
                report.status =
                    if rep.all_pass { Status::Verified } else { Status::Violated };
                for f in &rep.failures {
                    report.witnesses.push(json!({ "A": f }));
                }
                report.payload = json!({
                    "m": rep.m,
                    "checked": rep.checked,
                    "allPass": rep.all_pass,
                    "minSlack": ratio_str(&rep.min_slack),
                    "minSlackA": rep.min_slack_a,
                });
                Ok(report)
            }
        },
        Cmd::Claim1 => {
            let mut report = RunReport::new("claim1", json!({}));
            let rep = claim1_exhaustive();
            report.status =
                if rep.max_memberships == 4 { Status::Verified } else { Status::Violated };
            report.payload = json!({
                "maxMemberships": rep.max_memberships,
                "feasiblePatternCount": rep.feasible_pattern_count,
            });
            Ok(report)
        }
        Cmd::Identities { m } => {
            let mut report = RunReport::new("identities", json!({"m": m}));
            let rows = construction_identities(m)?;
            let all = rows.iter().all(|r| r.holds);
            report.status = if all { Status::Verified } else { Status::Violated };
            report.payload = json!({
                "rows": rows
                    .iter()
                    .map(|r| {
                        json!({
                            "m": r.m,
                            "name": r.name,
                            "lhs": ratio_str(&r.lhs),
                            "rhs": ratio_str(&r.rhs),
                            "holds": r.holds,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            Ok(report)
        }
        Cmd::Export { kind, name, m, n, format, out } => {
            let mut report = RunReport::new(
                "export",
                json!({"kind": kind, "name": name, "m": m, "n": n, "format": format}),
            );
            let (weights, triples): (Vec<Ratio>, Vec<[usize; 3]>) = match (&kind, &name) {
                (Some(kind), None) => {
                    let m = m.ok_or_else(|| Error::Precondition("--m is required".into()))?;
                    let g = build_gadget(kind, m, 0)?;
                    let cs = constraints(&g);
                    (g.slots.iter().map(|s| s.weight.clone()).collect(), cs.triples)
                }
                (None, Some(name)) if name == "mn" => {
                    let n = n.ok_or_else(|| Error::Precondition("--n is required".into()))?;
                    if !(2..=9).contains(&n) {
                        return Err(Error::Precondition(format!("mn export needs 2 ≤ n ≤ 9, got {n}")));
                    }
                    let full: u64 = (1 << n) - 1;
                    let mut triples = Vec::new();
                    for a in 1..=full {
                        for b in a + 1..=full {
                            if a & b == 0 {
                                triples.push([a as usize - 1, b as usize - 1, (a | b) as usize - 1]);
                            }
                        }
                    }
                    (vec![Ratio::from_integer(1.into()); full as usize], triples)
                }
                _ => {
                    return Err(Error::Precondition(
                        "specify either --kind (gadget trace) or --name mn".into(),
                    ))
                }
            };
            let Model { text, manifest } = match format.as_str() {
                "wcnf" => wcnf_model(&weights, &triples)?,
                "lp" => lp_model(&weights, &triples)?,
                other => return Err(Error::Precondition(format!("unsupported format `{other}`"))),
            };
            if let Some(path) = &out {
                std::fs::write(path, &text)?;
            }
            report.payload = json!({
                "manifest": serde_json::to_value(&manifest).expect("manifest serializes"),
                "writtenTo": out,
                "model": if out.is_none() { Value::String(text) } else { Value::Null },
            });
            Ok(report)
        }
    }
}

fn implied(rep: &partitionlab::certificates::VerifyReport) -> Option<String> {
    match implied_outcome(rep) {
        BoundOutcome::Valid { bound, .. } => Some(bound.to_string()),
        BoundOutcome::Invalid { .. } => None,
    }
}

fn implied_outcome(rep: &partitionlab::certificates::VerifyReport) -> BoundOutcome {
    partitionlab::certificates::implied_bound(&rep.cv, rep.family_count)
}

fn main() {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli) {
        Ok(mut report) => {
            report.elapsed_ms = start.elapsed().as_millis();
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            eprintln!(
                "{}: {} ({} ms)",
                report.command,
                serde_json::to_string(&report.status).unwrap().trim_matches('"'),
                report.elapsed_ms
            );
            std::process::exit(report.status.exit_code());
        }
        Err(e) => {
            let mut report = RunReport::new("error", Value::Null);
            report.status = Status::Error;
            report.payload = json!({ "error": e.to_string() });
            report.elapsed_ms = start.elapsed().as_millis();
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            eprintln!("error: {e}");
            std::process::exit(Status::Error.exit_code());
        }
    }
}
