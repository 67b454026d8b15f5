use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use isbell::completion::{
    cauchy_completion, cauchy_objects_are_reflexive, enumerate_reflexive,
    reflexive_completion_category,
};
use isbell::conjugacy::{conjugate, is_reflexive, iterate_conjugates};
use isbell::corpus;
use isbell::fincat::FinCat;
use isbell::io;
use isbell::metric::{
    completion_distance, conj_cost, double_conj_cost, is_isbell_point, is_tight_span_point,
    yoneda_cost, CostVector, ExtNonnegRational, GenMetric,
};
use isbell::order::{crosscheck_with_categorical, density_certificate, dm_completion, FinPoset};
use isbell::setfun::{Limits, SetFunctor, Variance};
use isbell::Error;

#[derive(Parser)]
#[command(
    name = "isbell",
    version,
    about = "Isbell conjugacy and reflexive completions of finite categories"
)]
struct Cli {
    /// Maximum number of partial assignments any single search may visit.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(10_000..))]
    ceiling: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Validate category, functor, envelope, poset, metric or cost files.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Conjugate of a functor, or a summary of iterated conjugates.
    Conj {
        functor: PathBuf,
        /// Number of entries to summarise, starting with the input.
        #[arg(long)]
        iterate: Option<usize>,
    },
    /// Decide whether a functor is reflexive.
    Reflexive { functor: PathBuf },
    /// Enumerate reflexive presheaves up to a per-object size bound.
    Complete {
        /// A category file or `corpus:<name>`.
        category: String,
        #[arg(long, default_value_t = 4)]
        bound: usize,
    },
    /// Cauchy completion and reflexivity of the split idempotents.
    Cauchy {
        /// A category file or `corpus:<name>`.
        category: String,
    },
    /// Cut lattice of a poset, cross-checked against the categorical answer.
    Dm {
        /// A poset file or `corpus:<name>`.
        poset: String,
    },
    /// Exact computations on a generalized metric space.
    Metric {
        /// A metric file or `corpus:<name>`.
        metric: String,
        op: MetricOp,
        /// Cost files, `yoneda:<point>`, or comma-separated values in point order.
        #[arg(required = true)]
        vectors: Vec<String>,
    },
    /// Run the built-in examples and print a pass/fail matrix.
    Corpus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricOp {
    Conj,
    Isbell,
    Tightspan,
    Dist,
}

struct Output {
    json: Value,
    table: String,
    code: u8,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        Error::InvalidCategory(_)
        | Error::InvalidFunctor(_)
        | Error::InvalidTransformation(_)
        | Error::InvalidPoset(_)
        | Error::InvalidMetric(_)
        | Error::InvalidCost(_)
        | Error::InvalidEnvelope(_)
        | Error::Internal(_) => 1,
        _ => 2,
    }
}

fn load_category(arg: &str) -> isbell::Result<Arc<FinCat>> {
    match arg.strip_prefix("corpus:") {
        Some(name) => corpus::category(name),
        None => io::load_category(Path::new(arg)),
    }
}

fn load_poset(arg: &str) -> isbell::Result<FinPoset> {
    match arg.strip_prefix("corpus:") {
        Some(name) => corpus::poset(name),
        None => io::load_poset(Path::new(arg)),
    }
}

fn load_metric(arg: &str) -> isbell::Result<Arc<GenMetric>> {
    match arg.strip_prefix("corpus:") {
        Some(name) => corpus::metric(name),
        None => io::load_metric(Path::new(arg)),
    }
}

fn load_vector(arg: &str, space: &Arc<GenMetric>) -> isbell::Result<CostVector> {
    if let Some(point) = arg.strip_prefix("yoneda:") {
        return Ok(yoneda_cost(space, space.point_id(point)?));
    }
    let path = Path::new(arg);
    if path.exists() {
        return io::load_cost(path, space.clone());
    }
    let values = arg
        .split(',')
        .map(|v| v.parse::<ExtNonnegRational>())
        .collect::<isbell::Result<Vec<_>>>()?;
    CostVector::new(space.clone(), Variance::Contravariant, values)
}

fn functor_table(x: &SetFunctor) -> String {
    let base = &x.base;
    let mut out = String::new();
    let _ = writeln!(out, "variance: {}", x.variance);
    for a in 0..base.num_objects() {
        let _ = writeln!(
            out,
            "  {}: {{{}}}",
            base.object_name(a),
            x.sets[a].join(", ")
        );
    }
    for f in 0..base.num_morphisms() {
        if base.is_identity(f) {
            continue;
        }
        let (s, t) = x.endpoints(f);
        let pairs: Vec<String> = x.actions[f]
            .iter()
            .enumerate()
            .map(|(i, &j)| format!("{} -> {}", x.sets[s][i], x.sets[t][j]))
            .collect();
        let _ = writeln!(out, "  {}: {}", base.morphism_name(f), pairs.join(", "));
    }
    out
}

fn functor_json(x: &SetFunctor) -> Value {
    serde_json::to_value(x.to_raw()).expect("functor tables serialize")
}

fn cmd_validate(paths: &[PathBuf]) -> Output {
    let mut code = 0;
    let mut table = String::new();
    let mut results = Vec::new();
    for path in paths {
        let name = path.display().to_string();
        match io::load_document(path) {
            Ok(doc) => {
                let _ = writeln!(table, "{name}: valid {}", doc.kind());
                results.push(json!({"path": name, "kind": doc.kind(), "valid": true}));
            }
            Err(e) => {
                let c = exit_code(&e);
                code = code.max(c);
                let _ = writeln!(table, "{name}: {e}");
                results
                    .push(json!({"path": name, "valid": false, "exit": c, "error": e.to_string()}));
            }
        }
    }
    Output {
        json: json!({"files": results}),
        table,
        code,
    }
}

fn cmd_conj(path: &Path, iterate: Option<usize>, limits: Limits) -> isbell::Result<Output> {
    let x = io::load_functor(path)?;
    if let Some(count) = iterate {
        let steps = iterate_conjugates(&x, count, limits)?;
        let mut table = String::from("step  variance  cards  orbits  iso_to\n");
        let mut rows = Vec::new();
        for (i, s) in steps.iter().enumerate() {
            let iso = s.iso_to.map_or("-".to_string(), |k| k.to_string());
            let _ = writeln!(
                table,
                "{i:<5} {:<9} {:?}  {}  {iso}",
                s.variance.name(),
                s.cards,
                s.orbit_signature.len()
            );
            rows.push(json!({
                "variance": s.variance.name(),
                "cards": s.cards,
                "orbit_signature": s.orbit_signature,
                "orbits": s.orbit_signature.len(),
                "iso_to": s.iso_to,
            }));
        }
        return Ok(Output {
            json: json!({"steps": rows}),
            table,
            code: 0,
        });
    }
    let conj = conjugate(&x, limits)?;
    Ok(Output {
        json: json!({"conjugate": functor_json(&conj.output)}),
        table: functor_table(&conj.output),
        code: 0,
    })
}

fn cmd_reflexive(path: &Path, limits: Limits) -> isbell::Result<Output> {
    let x = io::load_functor(path)?;
    let cert = is_reflexive(&x, limits)?;
    let failing = cert
        .failing_object
        .map(|a| x.base.object_name(a).to_string());
    let mut table = format!(
        "reflexive: {}\ncards: {:?} -> {:?} -> {:?}\n",
        cert.reflexive,
        x.cards(),
        cert.unit.first.output.cards(),
        cert.unit.double().cards()
    );
    if let Some(a) = &failing {
        let _ = writeln!(table, "unit fails to be bijective at {a}");
    }
    Ok(Output {
        json: json!({
            "reflexive": cert.reflexive,
            "failing_object": failing,
            "cards": x.cards(),
            "conjugate_cards": cert.unit.first.output.cards(),
            "double_conjugate_cards": cert.unit.double().cards(),
            "unit": cert.unit.eta.components,
        }),
        table,
        code: if cert.reflexive { 0 } else { 1 },
    })
}

fn cmd_complete(arg: &str, bound: usize, limits: Limits) -> isbell::Result<Output> {
    let c = load_category(arg)?;
    let report = enumerate_reflexive(&c, bound, limits)?;
    let (category, _) = reflexive_completion_category(&report, limits)?;
    let mut table = format!(
        "reflexive classes within bound {bound}: {}\n",
        report.classes.len()
    );
    for (i, x) in report.classes.iter().enumerate() {
        let _ = writeln!(table, "r{i}: cards {:?}", x.cards());
    }
    let _ = writeln!(
        table,
        "complete within bound: {}\nrepresentables covered: {}\ncompletion: {} objects, {} morphisms\nstats: {:?}",
        report.complete_within_bound,
        report.representables_covered,
        category.num_objects(),
        category.num_morphisms(),
        report.stats
    );
    Ok(Output {
        json: json!({
            "bound": bound,
            "classes": report.classes.iter().map(functor_json).collect::<Vec<_>>(),
            "complete_within_bound": report.complete_within_bound,
            "representables_covered": report.representables_covered,
            "stats": report.stats,
            "completion": category.to_raw(),
        }),
        table,
        code: if report.complete_within_bound { 0 } else { 3 },
    })
}

fn cmd_cauchy(arg: &str, limits: Limits) -> isbell::Result<Output> {
    let c = load_category(arg)?;
    let cc = cauchy_completion(&c)?;
    let reports = cauchy_objects_are_reflexive(&c, limits)?;
    let all = reports.iter().all(|r| r.reflexive);
    let names: Vec<&str> = cc.category.objects().iter().map(String::as_str).collect();
    let table = format!(
        "objects: {}\nmorphisms: {}\nsplit idempotents reflexive: {all}\n",
        names.join(", "),
        cc.category.num_morphisms()
    );
    Ok(Output {
        json: json!({
            "category": cc.category.to_raw(),
            "split_idempotents_reflexive": all,
        }),
        table,
        code: if all { 0 } else { 1 },
    })
}

fn cmd_dm(arg: &str, limits: Limits) -> isbell::Result<Output> {
    let p = load_poset(arg)?;
    let dm = dm_completion(&p);
    let density = density_certificate(&p, &dm);
    let cross = crosscheck_with_categorical(&p, limits)?;
    let cuts: Vec<Vec<String>> = dm.cuts.iter().map(|&s| p.subset_names(s)).collect();
    let mut table = format!("cuts: {}\n", cuts.len());
    for (i, c) in cuts.iter().enumerate() {
        let _ = writeln!(table, "  c{i}: {{{}}}", c.join(", "));
    }
    let _ = writeln!(
        table,
        "join dense: {}\nmeet dense: {}\ncrosscheck: {}",
        density.join_dense,
        density.meet_dense,
        cross.ok()
    );
    Ok(Output {
        json: json!({
            "cuts": cuts,
            "lattice": dm.lattice.to_raw(),
            "embedding": dm.embedding,
            "join_dense": density.join_dense,
            "meet_dense": density.meet_dense,
            "crosscheck": cross.ok(),
        }),
        table,
        code: if cross.ok() { 0 } else { 1 },
    })
}

fn cmd_metric(arg: &str, op: MetricOp, vectors: &[String]) -> isbell::Result<Output> {
    let space = load_metric(arg)?;
    let vs = vectors
        .iter()
        .map(|v| load_vector(v, &space))
        .collect::<isbell::Result<Vec<_>>>()?;
    let want = |n: usize| {
        if vs.len() == n {
            Ok(())
        } else {
            Err(Error::Parse(format!(
                "expected {n} vector(s), got {}",
                vs.len()
            )))
        }
    };
    let strings = |v: &CostVector| v.f.iter().map(ToString::to_string).collect::<Vec<_>>();
    match op {
        MetricOp::Conj => {
            want(1)?;
            let c = conj_cost(&vs[0]);
            Ok(Output {
                json: json!({"variance": c.variance.name(), "f": strings(&c)}),
                table: format!("{} {c}\n", c.variance),
                code: 0,
            })
        }
        MetricOp::Isbell => {
            want(1)?;
            let yes = is_isbell_point(&vs[0])?;
            let dd = double_conj_cost(&vs[0])?;
            Ok(Output {
                json: json!({"isbell_point": yes, "double_conjugate": strings(&dd)}),
                table: format!("isbell point: {yes}\ndouble conjugate: {dd}\n"),
                code: if yes { 0 } else { 1 },
            })
        }
        MetricOp::Tightspan => {
            want(1)?;
            let yes = is_tight_span_point(&vs[0])?;
            let c = conj_cost(&vs[0]);
            Ok(Output {
                json: json!({"tight_span_point": yes, "conjugate": strings(&c)}),
                table: format!("tight span point: {yes}\nconjugate: {c}\n"),
                code: if yes { 0 } else { 1 },
            })
        }
        MetricOp::Dist => {
            want(2)?;
            let d = completion_distance(&vs[0], &vs[1])?;
            Ok(Output {
                json: json!({"distance": d.to_string()}),
                table: format!("{d}\n"),
                code: 0,
            })
        }
    }
}

fn cmd_corpus(limits: Limits) -> Output {
    let checks = corpus::run_checks(limits);
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut table = String::new();
    for c in &checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(table, "{mark}  {:<width$}  {}", c.name, c.detail);
    }
    let all = checks.iter().all(|c| c.passed);
    Output {
        json: json!({"checks": checks, "passed": all}),
        table,
        code: if all { 0 } else { 1 },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let limits = Limits::new(cli.ceiling);
    let result = match &cli.command {
        Command::Validate { paths } => Ok(cmd_validate(paths)),
        Command::Conj { functor, iterate } => cmd_conj(functor, *iterate, limits),
        Command::Reflexive { functor } => cmd_reflexive(functor, limits),
        Command::Complete { category, bound } => cmd_complete(category, *bound, limits),
        Command::Cauchy { category } => cmd_cauchy(category, limits),
        Command::Dm { poset } => cmd_dm(poset, limits),
        Command::Metric {
            metric,
            op,
            vectors,
        } => cmd_metric(metric, *op, vectors),
        Command::Corpus => Ok(cmd_corpus(limits)),
    };
    match result {
        Ok(out) => {
            match cli.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("json output")
                ),
                Format::Table => print!("{}", out.table),
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
