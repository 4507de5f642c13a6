use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use faultspec::fixtures::{self, Case, FaultVariant};
use faultspec::harness::Mode;
use faultspec::localizer::CountPolicy;
use faultspec::mapping::{load_refinement, parse_refinement, Refinement};
use faultspec::model::{self, ModelError, Scope, SearchOptions, StructureDoc, DEFAULT_BUDGET};
use faultspec::pipeline::{self, PipelineError, RunOptions, EXIT_NO_MODEL, EXIT_USAGE};
use faultspec::report::Report;
use faultspec::spec::{load_spec_dir, parse_specification, pretty_print, validate_module, SpecModule, ValidatedModule};

#[derive(Parser)]
#[command(name = "faultspec", version, about = "Find the faulty method of an ADT implementation from its algebraic specification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test an implementation and name the most probable faulty method.
    Run(RunArgs),
    /// List the bundled case studies and their fault variants.
    List,
    /// Parse and validate a specification, then print it back.
    Check {
        #[arg(long, value_name = "DIR")]
        spec: PathBuf,
    },
    /// Search for a structure and print it as JSON.
    Model(ModelArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Equals,
    Observers,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountArg {
    Union,
    L1,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Bundled case study (sortedset or mapchain).
    case: Option<String>,
    /// Variant of the case study, e.g. correct or isEmpty-1.
    variant: Option<String>,
    /// Directory of .spec files; defaults to the case study's own.
    #[arg(long, value_name = "DIR")]
    spec: Option<PathBuf>,
    /// Refinement mapping; defaults to the case study's own.
    #[arg(long, value_name = "FILE")]
    map: Option<PathBuf>,
    /// Implementation as CASE:VARIANT, instead of the positional pair.
    #[arg(long = "impl", value_name = "ID")]
    implementation: Option<String>,
    /// Element count for a sort, e.g. --scope MapChain=5.
    #[arg(long, value_name = "SORT=N", value_parser = parse_scope)]
    scope: Vec<(String, usize)>,
    #[arg(long, value_enum, default_value = "equals")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Maximum search nodes before giving up.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportArg,
    /// Write the structure found, with construction terms, as JSON.
    #[arg(long, value_name = "FILE")]
    dump_model: Option<PathBuf>,
    /// Names counted when deciding whether several operations failed.
    #[arg(long, value_enum, default_value = "union")]
    count: CountArg,
}

#[derive(clap::Args)]
struct ModelArgs {
    #[arg(long, value_name = "DIR")]
    spec: PathBuf,
    #[arg(long, value_name = "SORT=N", value_parser = parse_scope)]
    scope: Vec<(String, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

fn parse_scope(s: &str) -> Result<(String, usize), String> {
    let (sort, n) = s.split_once('=').ok_or("expected SORT=N")?;
    let n: usize = n.trim().parse().map_err(|_| format!("bad count `{n}`"))?;
    if n == 0 {
        return Err("scope counts must be at least 1".into());
    }
    Ok((sort.trim().to_string(), n))
}

struct Failure {
    code: u8,
    stage: &'static str,
    msg: String,
}

fn fail(code: i32, stage: &'static str, msg: impl ToString) -> Failure {
    Failure {
        code: code as u8,
        stage,
        msg: msg.to_string(),
    }
}

fn validated(ast: SpecModule) -> Result<ValidatedModule, Failure> {
    validate_module(&ast).map_err(|errs| {
        let lines: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        fail(EXIT_USAGE, "validate", lines.join("\n"))
    })
}

fn load_module(dir: Option<&Path>, case: Case) -> Result<ValidatedModule, Failure> {
    let ast = match dir {
        Some(d) => load_spec_dir(d),
        None => parse_specification(case.spec_text()),
    }
    .map_err(|e| fail(EXIT_USAGE, "parse", e))?;
    validated(ast)
}

fn model_failure(e: &ModelError) -> Failure {
    let code = match e {
        ModelError::NoModel | ModelError::BudgetExhausted(_) => EXIT_NO_MODEL,
        _ => EXIT_USAGE,
    };
    fail(code, "model", e)
}

fn selected(args: &RunArgs) -> Result<(Case, &'static FaultVariant), Failure> {
    let usage = |e: fixtures::FixtureError| fail(EXIT_USAGE, "implementation", e);
    match (&args.implementation, &args.case, &args.variant) {
        (Some(id), None, None) => fixtures::parse_impl_id(id).map_err(usage),
        (None, Some(case), Some(id)) => {
            let case: Case = case.parse().map_err(usage)?;
            Ok((case, fixtures::find_variant(case, id).map_err(usage)?))
        }
        _ => Err(fail(
            EXIT_USAGE,
            "usage",
            "name exactly one implementation: `run CASE VARIANT` or `run --impl CASE:VARIANT`",
        )),
    }
}

fn run(args: RunArgs) -> Result<u8, Failure> {
    let (case, variant) = selected(&args)?;
    let m = load_module(args.spec.as_deref(), case)?;
    let refinement: Refinement = match &args.map {
        Some(p) => load_refinement(p),
        None => parse_refinement(case.map_text()),
    }
    .map_err(|e| fail(EXIT_USAGE, "mapping", e))?;
    let methods = refinement.resolve(&m).map_err(|e| fail(EXIT_USAGE, "mapping", e))?;

    let mut scope = if args.spec.is_none() { fixtures::default_scope(case) } else { Scope::new() };
    for (sort, n) in &args.scope {
        scope.set(sort, *n);
    }
    let opts = RunOptions {
        scope,
        mode: match args.mode {
            ModeArg::Equals => Mode::Equals,
            ModeArg::Observers => Mode::ObserversOnly,
        },
        search: SearchOptions {
            seed: args.seed,
            budget: args.budget,
        },
        policy: match args.count {
            CountArg::Union => CountPolicy::Union,
            CountArg::L1 => CountPolicy::L1Only,
        },
    };
    let mut adapter = fixtures::adapter(case, variant.id).map_err(|e| fail(EXIT_USAGE, "implementation", e))?;
    let out = pipeline::run(&m, &methods, adapter.as_mut(), &opts).map_err(|e| match &e {
        PipelineError::Model(me) => model_failure(me),
        other => fail(EXIT_USAGE, other.stage(), other),
    })?;

    if let Some(path) = &args.dump_model {
        let doc = StructureDoc::new(&m, &out.structure, Some(&out.terms));
        std::fs::write(path, doc.to_json() + "\n").map_err(|e| fail(EXIT_USAGE, "dump-model", e))?;
    }
    let report = Report::new(&m, &format!("{case}:{}", variant.id), args.seed, &out);
    match args.report {
        ReportArg::Text => print!("{}", report.render_text()),
        ReportArg::Json => print!("{}", report.to_json()),
    }
    Ok(report.exit_code as u8)
}

fn list() -> u8 {
    for v in fixtures::VARIANTS {
        let observers = v
            .expect_observers
            .map(|e| format!("{e:?}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<10} {:<15} {:<8} equals={:<10} observers={:<10} {}",
            v.case.to_string(),
            v.id,
            v.target.unwrap_or("-"),
            format!("{:?}", v.expect_equals),
            observers,
            v.description
        );
    }
    0
}

fn check(dir: &Path) -> Result<u8, Failure> {
    let ast = load_spec_dir(dir).map_err(|e| fail(EXIT_USAGE, "parse", e))?;
    let m = validated(ast.clone())?;
    print!("{}", pretty_print(&ast));
    eprintln!("{m}: {} sorts, {} operations, {} axioms", m.sorts.len(), m.ops.len(), m.axioms.len());
    Ok(0)
}

fn find_model(args: ModelArgs) -> Result<u8, Failure> {
    let ast = load_spec_dir(&args.spec).map_err(|e| fail(EXIT_USAGE, "parse", e))?;
    let m = validated(ast)?;
    let mut scope = Scope::new();
    for (sort, n) in &args.scope {
        scope.set(sort, *n);
    }
    let opts = SearchOptions {
        seed: args.seed,
        budget: args.budget,
    };
    let st = model::find_structure(&m, &scope, &opts).map_err(|e| model_failure(&e))?;
    let terms = model::derive_construction_terms(&m, &st);
    println!("{}", StructureDoc::new(&m, &st, Some(&terms)).to_json());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::List => Ok(list()),
        Command::Check { spec } => check(&spec),
        Command::Model(args) => find_model(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error [{}]: {}", f.stage, f.msg);
            ExitCode::from(f.code)
        }
    }
}
