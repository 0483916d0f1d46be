use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use flaglab::constructions::{
    apply_step, barycentric_subdivision, builtin, connected_sum_colored, cross_polytope_boundary, random_handle,
    stacked_cross_polytopal_sphere, walkup_sample, WalkupStep, WalkupTrace,
};
use flaglab::flags::{classical_vectors, flag_vectors};
use flaglab::io::{read_complex, to_json, LoadedComplex};
use flaglab::verify::{build_corpus, default_corpus, run_suite, summarize, to_csv, to_jsonl, Check, CheckOptions, CorpusEntry, Instance, Status};
use flaglab::{find_balanced_coloring, Coloring, Complex, FieldSpec, Grading, Grouping, Label};

#[derive(Parser)]
#[command(name = "flaglab", version, about = "Exact computations on balanced simplicial complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a complex and write it as JSON
    Gen(GenArgs),
    /// Compute f/h/flag vectors, Betti numbers and classification
    Invariants(InvariantsArgs),
    /// Run theorem checks and emit one report per (instance, check, field)
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    CrossPolytope,
    Stacked,
    Walkup,
    Barycentric,
    ConnectedSum,
    Handle,
    Builtin,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    /// Dimension parameter d (the complex has dimension d-1)
    #[arg(long)]
    d: Option<usize>,
    /// Number of cross-polytope summands for `stacked`
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    sums: usize,
    #[arg(long, default_value_t = 0)]
    handles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input complex: a JSON file or a builtin name
    #[arg(long = "in")]
    input: Option<String>,
    /// Second summand for `connected-sum`
    #[arg(long = "in2")]
    input2: Option<String>,
    /// Builtin name for `builtin`, e.g. torus_7 or simplex_boundary:3
    #[arg(long)]
    name: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long = "in")]
    input: String,
    /// Fields, repeatable or comma separated: Q, F2, F3, F32003, Fp:<prime>
    #[arg(long, value_delimiter = ',', default_value = "Q")]
    field: Vec<String>,
    /// Color grouping as group indices per color, e.g. 0,0,1
    #[arg(long, value_delimiter = ',')]
    grouping: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in", conflicts_with = "corpus")]
    input: Option<String>,
    /// `default` or a JSON file holding a list of corpus entries
    #[arg(long)]
    corpus: Option<String>,
    /// Checks: stanley, schenzel, hdprime, duality, average, lbt (alias thm44), g2, stacked-links, all
    #[arg(long, value_delimiter = ',', default_value = "all")]
    check: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "Q")]
    field: Vec<String>,
    /// Independent l.s.o.p.'s per graded comparison
    #[arg(long, default_value_t = flaglab::verify::DEFAULT_LSOPS)]
    lsops: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// ℓ values for the lower bound check
    #[arg(long, value_delimiter = ',')]
    ell: Vec<usize>,
    /// Worker threads; all cores when absent
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Gen(a) => gen(a).map(|_| ExitCode::SUCCESS),
        Command::Invariants(a) => invariants(a).map(|_| ExitCode::SUCCESS),
        Command::Verify(a) => verify(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// A JSON file, or a builtin name when no such file exists.
fn load(spec: &str) -> Result<LoadedComplex> {
    let p = Path::new(spec);
    if p.exists() {
        return read_complex(p).with_context(|| format!("reading {spec}"));
    }
    let c = builtin(spec).with_context(|| format!("{spec} is neither a file nor a builtin"))?;
    Ok(LoadedComplex { complex: c, coloring: None, trace: None })
}

fn colored(l: &LoadedComplex) -> Result<Coloring> {
    match &l.coloring {
        Some(c) => Ok(c.clone()),
        None => Ok(find_balanced_coloring(&l.complex)?),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| anyhow!("missing --{flag}"))
}

fn gen(a: GenArgs) -> Result<()> {
    let (c, col, trace): (Complex, Option<Coloring>, Option<WalkupTrace>) = match a.kind {
        GenKind::CrossPolytope => {
            let (c, col) = cross_polytope_boundary(need(a.d, "d")?);
            (c, Some(col), None)
        }
        GenKind::Stacked => {
            let (c, col, t) = stacked_cross_polytopal_sphere(need(a.d, "d")?, need(a.n, "n")?, a.seed);
            (c, Some(col), Some(t))
        }
        GenKind::Walkup => {
            let (c, col, t) = walkup_sample(need(a.d, "d")?, a.sums, a.handles, a.seed)?;
            (c, Some(col), Some(t))
        }
        GenKind::Barycentric => {
            let l = load(&need(a.input, "in")?)?;
            let (sd, col) = barycentric_subdivision(&l.complex);
            (sd, Some(col), None)
        }
        GenKind::Builtin => {
            let c = builtin(&need(a.name, "name")?)?;
            let col = find_balanced_coloring(&c).ok();
            (c, col, None)
        }
        GenKind::ConnectedSum => {
            let x = load(&need(a.input, "in")?)?;
            let y = load(&need(a.input2, "in2")?)?;
            let (xc, yc) = (colored(&x)?, colored(&y)?);
            let off = x.complex.max_label().unwrap_or(0);
            let shifted = y.complex.relabel(|v| v + off)?;
            let ycol = Coloring::new(yc.d, yc.colors.iter().map(|(&v, &k)| (v + off, k)).collect());
            let (c, col) =
                connected_sum_colored(&x.complex, &xc, &x.complex.facets()[0], &shifted, &ycol, &shifted.facets()[0])?;
            (c, Some(col), None)
        }
        GenKind::Handle => {
            let x = load(&need(a.input, "in")?)?;
            let col = colored(&x)?;
            let step = random_handle(&x.complex, &col, a.seed).ok_or_else(|| anyhow!("no admissible facet pair found"))?;
            let d = col.d;
            let (c, col) = apply_step(&x.complex, &col, d, &step)?;
            let trace = x.trace.map(|mut t| {
                t.steps.push(step.clone());
                t
            });
            if let WalkupStep::HandleAddition { source, target } = &step {
                log::info!("handle along {source} and {target}");
            }
            (c, Some(col), trace)
        }
    };
    emit(a.out.as_deref(), &(to_json(&c, col.as_ref(), trace.as_ref())? + "\n"))
}

fn fields(v: &[String]) -> Result<Vec<FieldSpec>> {
    v.iter().map(|s| s.parse::<FieldSpec>().map_err(|e| anyhow!("{e}"))).collect()
}

fn invariants(a: InvariantsArgs) -> Result<()> {
    let l = load(&a.input)?;
    let c = &l.complex;
    let coloring = match &l.coloring {
        Some(col) => Some(col.clone()),
        None => find_balanced_coloring(c).ok(),
    };
    let d = (c.dim() + 1).max(0) as usize;
    let grading = match (&coloring, &a.grouping) {
        (Some(col), Some(assign)) => Some(Grading::new(c, col, &Grouping::new(assign.clone())?)?),
        (Some(col), None) => Some(Grading::new(c, col, &Grouping::identity(d))?),
        (None, Some(_)) => bail!("--grouping needs a balanced complex"),
        (None, None) => None,
    };
    let mut per_field = Vec::new();
    for field in fields(&a.field)? {
        let cv = classical_vectors(c, field)?;
        let class = flaglab::classify(c, field);
        let orientable = if class.is_manifold() { Some(flaglab::homology::is_orientable(c, field)?) } else { None };
        let mut entry = json!({
            "field": field,
            "betti": cv.betti.from_dim0(),
            "h_prime": cv.h_prime,
            "h_dprime": cv.h_dprime,
            "classification": class.primary,
            "labels": class.labels,
            "orientable": orientable,
        });
        if let Some(g) = &grading {
            let fv = flag_vectors(c, g, field)?;
            entry["flag_h_prime"] = serde_json::to_value(&fv.h_prime)?;
            entry["flag_h_dprime"] = serde_json::to_value(&fv.h_dprime)?;
        }
        if class.has(Label::HomologyManifoldWithBoundary) {
            let bd = flaglab::boundary_subcomplex(c, field);
            entry["boundary_facets"] = json!(bd.facets().len());
        }
        per_field.push(entry);
    }
    let first = classical_vectors(c, FieldSpec::Q)?;
    let mut report = json!({
        "vertices": c.num_vertices(),
        "facets": c.facets().len(),
        "dim": c.dim(),
        "pure": c.is_pure(),
        "balanced": coloring.is_some(),
        "f": first.f,
        "h": first.h,
        "fields": per_field,
    });
    if let Some(g) = &grading {
        let fv = flag_vectors(c, g, FieldSpec::Q)?;
        report["grouping_a"] = json!(g.a);
        report["flag_f"] = serde_json::to_value(&fv.f)?;
        report["flag_h"] = serde_json::to_value(&fv.h)?;
    }
    emit(None, &(serde_json::to_string_pretty(&report)? + "\n"))
}

fn checks(v: &[String]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for s in v {
        if s.eq_ignore_ascii_case("all") {
            out.extend(Check::ALL);
        } else {
            out.push(s.parse::<Check>().map_err(|e| anyhow!("{e}"))?);
        }
    }
    out.dedup();
    Ok(out)
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    if let Some(j) = a.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global()?;
    }
    let instances: Vec<Instance> = match (&a.input, &a.corpus) {
        (Some(spec), None) => {
            let l = load(spec)?;
            vec![Instance::new(spec.clone(), l.complex, l.coloring, l.trace)]
        }
        (None, Some(c)) => {
            let entries: Vec<CorpusEntry> = if c == "default" {
                default_corpus()
            } else {
                serde_json::from_str(&std::fs::read_to_string(c).with_context(|| format!("reading {c}"))?)
                    .with_context(|| format!("parsing corpus {c}"))?
            };
            build_corpus(&entries)?
        }
        _ => bail!("pass exactly one of --in or --corpus"),
    };
    let opts = CheckOptions { n_lsops: a.lsops, seed: a.seed, ells: a.ell.clone(), ..Default::default() };
    let reports = run_suite(&instances, &checks(&a.check)?, &fields(&a.field)?, &opts);
    let text = match a.format {
        Format::Jsonl => to_jsonl(&reports),
        Format::Csv => to_csv(&reports),
    };
    emit(a.out.as_deref(), &text)?;
    let summary: Value = serde_json::to_value(summarize(&reports))?;
    eprintln!("{summary}");
    Ok(if reports.iter().any(|r| r.status == Status::Violated) { ExitCode::from(1) } else { ExitCode::SUCCESS })
}
