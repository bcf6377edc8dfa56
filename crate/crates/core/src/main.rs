use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::process::ExitCode;
use ybx::cli_harness::{
    catalog_append, parse_spec, render_json, render_text, run_report, run_suite, serialize_spec, SpecFile, Suite, SuiteOptions,
};
use ybx::classical_rmatrix::search_quadratic;
use ybx::double_bracket::{check_quadratic_relations, matrix_algebra_m2, random_skew_constant};
use ybx::dynamical_shift::{random_dyn_system, Criterion3Mode};
use ybx::exact_tensor::{parse_q, q, Kind, QTensor, Q};
use ybx::quantum_reflection::{build_decoupled, flip_color_blocks, random_flavor_invertible, random_system};
use ybx::{CheckReport, YbxError};

/// Exact verifier for double Poisson brackets and their classical, quantum and dynamical
/// exchange relations.
#[derive(Parser)]
#[command(name = "ybx", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Seed for every random draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Degree cap for sampled polynomials.
    #[arg(long = "degree-cap", default_value_t = ybx::double_bracket::DEFAULT_DEGREE_CAP)]
    degree_cap: usize,
    /// Worker threads; YBX_JOBS overrides.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Print elapsed times (output is then no longer byte-stable).
    #[arg(long)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Narrow,
    Broad,
}

#[derive(Subcommand)]
enum Command {
    /// Run one named check.
    Check(CheckArgs),
    /// Search for structure constants.
    Search {
        #[command(subcommand)]
        what: SearchWhat,
    },
    /// Run every applicable check on the inputs, or every check on its default target.
    Report {
        #[command(flatten)]
        common: Common,
        /// Input documents.
        #[arg(long = "input", short = 'i')]
        inputs: Vec<PathBuf>,
    },
    /// Write an example document to standard output.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct CheckArgs {
    /// Check name.
    #[arg(value_parser = parse_suite)]
    name: Suite,
    /// Input document; omitted means the check's default target.
    #[arg(long, short = 'i')]
    input: Option<PathBuf>,
    /// Color dimension N.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Flavor count for generated targets.
    #[arg(long)]
    m: Option<usize>,
    /// Number of random samples for generated targets.
    #[arg(long)]
    samples: Option<usize>,
    /// Signature "eR,eL" for generated dynamical systems.
    #[arg(long, value_parser = parse_pair)]
    epsilons: Option<(Q, Q)>,
    /// Flavor weight factor for generated flavored systems.
    #[arg(long = "eps-f", value_parser = parse_rational, default_value = "1")]
    eps_f: Q,
    /// Which normal form `dtral` prints in full.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// λ-degree of generated dynamical systems.
    #[arg(long = "lambda-degree", default_value_t = 1)]
    lambda_degree: u32,
    /// Append the input and its reports to this catalog.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum SearchWhat {
    /// Sparse (r, a) solving the quadratic relations.
    Quadratic {
        #[arg(long)]
        m: usize,
        /// Maximum number of free parameters set nonzero.
        #[arg(long)]
        support: usize,
        /// Candidate budget; larger spaces are sampled at random.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Allowed coefficient values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-1,0,1")]
        coefficients: Vec<i64>,
        /// Append every solution to this catalog.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: GenKind,
    #[arg(long = "N", default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = parse_pair)]
    epsilons: Option<(Q, Q)>,
    #[arg(long = "eps-f", value_parser = parse_rational, default_value = "1")]
    eps_f: Q,
    #[arg(long = "lambda-degree", default_value_t = 1)]
    lambda_degree: u32,
    /// Support cap for the quadratic search.
    #[arg(long, default_value_t = 2)]
    support: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Constant,
    MatrixAlgebra,
    Quadratic,
    AbcdRandom,
    DecoupledFlip,
    Dynamical,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: YbxError| e.to_string())
}

fn parse_rational(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

fn parse_pair(s: &str) -> Result<(Q, Q), String> {
    let (a, b) = s.split_once(',').ok_or("expected eR,eL")?;
    Ok((parse_rational(a)?, parse_rational(b)?))
}

fn options(c: &Common) -> SuiteOptions {
    SuiteOptions {
        seed: c.seed,
        degree_cap: c.degree_cap,
        jobs: SuiteOptions::resolve_jobs(c.jobs),
        ..SuiteOptions::default()
    }
}

fn emit(suite: &str, reports: &[CheckReport], c: &Common) {
    match c.format {
        Format::Text => print!("{}", render_text(reports, c.timings)),
        Format::Json => {
            let v = render_json(suite, c.seed, reports, c.timings);
            println!("{}", serde_json::to_string_pretty(&v).expect("plain JSON value"));
        }
    }
}

fn run_check(a: CheckArgs) -> Result<i32, YbxError> {
    let target = a.input.as_deref().map(parse_spec).transpose()?;
    let opts = SuiteOptions {
        n: a.n,
        m: a.m,
        samples: a.samples,
        epsilons: a.epsilons,
        eps_f: a.eps_f,
        mode: a.mode.map(|m| match m {
            ModeArg::Narrow => Criterion3Mode::Narrow,
            ModeArg::Broad => Criterion3Mode::Broad,
        }),
        lambda_degree: a.lambda_degree,
        ..options(&a.common)
    };
    let reports = run_suite(target.as_ref(), a.name, &opts)?;
    emit(a.name.name(), &reports, &a.common);
    if let Some(path) = &a.catalog {
        let t = target.as_ref().ok_or_else(|| YbxError::validation("catalog", "only input documents are catalogued"))?;
        catalog_append(t, &reports, a.common.seed, path)?;
    }
    Ok(ybx::cli_harness::exit_code(&reports))
}

fn run_search(what: SearchWhat) -> Result<i32, YbxError> {
    let SearchWhat::Quadratic { m, support, budget, coefficients, catalog, common } = what;
    let out = search_quadratic(m, &coefficients, support, budget, common.seed);
    let nontrivial = out.specs.iter().filter(|s| !s.is_trivial()).count();
    let mut reports = Vec::new();
    for s in &out.specs {
        let r = check_quadratic_relations(s)?;
        if let Some(path) = &catalog {
            catalog_append(&SpecFile::Bracket(s.clone()), std::slice::from_ref(&r), common.seed, path)?;
        }
        reports.push(r);
    }
    let summary = CheckReport::from_counterexample(
        &format!("search quadratic m={m} support={support}"),
        (nontrivial == 0).then(|| serde_json::json!({"advisory": out.advisory})),
    )
    .with_info("candidates", serde_json::json!(out.candidates))
    .with_info("exhaustive", serde_json::json!(out.exhaustive))
    .with_info("solutions", serde_json::json!(out.specs.len()))
    .with_info("nontrivial", serde_json::json!(nontrivial));
    match common.format {
        Format::Text => print!("{}", summary.to_text(common.timings)),
        Format::Json => {
            let specs: Vec<serde_json::Value> =
                out.specs.iter().map(|s| ybx::cli_harness::spec_value(&SpecFile::Bracket(s.clone()))).collect();
            let v = serde_json::json!({"summary": summary.to_json(common.timings), "specs": specs});
            println!("{}", serde_json::to_string_pretty(&v).expect("plain JSON value"));
        }
    }
    Ok(if summary.pass && reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn run_full_report(common: Common, inputs: Vec<PathBuf>) -> Result<i32, YbxError> {
    let targets = inputs.iter().map(|p| parse_spec(p)).collect::<Result<Vec<_>, _>>()?;
    let results = run_report(&targets, &options(&common))?;
    let all: Vec<&CheckReport> = results.iter().flat_map(|(_, _, r)| r).collect();
    match common.format {
        Format::Text => {
            for (label, suite, reports) in &results {
                println!("== {} ({label})", suite.name());
                print!("{}", render_text(reports, common.timings));
            }
        }
        Format::Json => {
            let sections: Vec<serde_json::Value> = results
                .iter()
                .map(|(label, suite, reports)| {
                    let mut v = render_json(suite.name(), common.seed, reports, common.timings);
                    v["target"] = serde_json::json!(label);
                    v
                })
                .collect();
            let v = serde_json::json!({"seed": common.seed, "pass": all.iter().all(|r| r.pass), "sections": sections});
            println!("{}", serde_json::to_string_pretty(&v).expect("plain JSON value"));
        }
    }
    Ok(if all.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn generate(g: GenerateArgs) -> Result<i32, YbxError> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let spec = match g.kind {
        GenKind::Constant => SpecFile::Bracket(random_skew_constant(&mut rng, g.m, 5)),
        GenKind::MatrixAlgebra => SpecFile::Bracket(matrix_algebra_m2()),
        GenKind::Quadratic => {
            let out = search_quadratic(g.m, &[-1, 1], g.support, 1_000_000, g.seed);
            let s = out
                .specs
                .into_iter()
                .find(|s| !s.is_trivial())
                .ok_or_else(|| YbxError::validation("search", "no nontrivial solution within the support cap"))?;
            SpecFile::Bracket(s)
        }
        GenKind::AbcdRandom => SpecFile::Abcd(random_system(g.n, g.m, &mut rng)),
        GenKind::DecoupledFlip => {
            let f = random_flavor_invertible(g.m, &mut rng);
            let gauge = random_flavor_invertible(g.m, &mut rng);
            let p = QTensor::flip("f1", "f2", g.m, Kind::Flavor);
            SpecFile::Abcd(build_decoupled(flip_color_blocks(g.n), &f, &p, Some(&gauge))?)
        }
        GenKind::Dynamical => {
            let (er, el) = g.epsilons.unwrap_or((q(-1), q(1)));
            let ef = if g.m == 0 { q(0) } else { g.eps_f };
            SpecFile::Dynamical(random_dyn_system(g.n, g.m, (er, el, ef), g.lambda_degree, &mut rng))
        }
    };
    print!("{}", serialize_spec(&spec));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check(a) => run_check(a),
        Command::Search { what } => run_search(what),
        Command::Report { common, inputs } => run_full_report(common, inputs),
        Command::Generate(g) => generate(g),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("ybx: {e}");
            ExitCode::from(2)
        }
    }
}
