//! Check orchestration behind the `ybx` binary: named suites, default targets, a worker
//! pool with deterministic report order, and the catalog.

mod catalog;
mod format;

pub use catalog::{catalog_append, catalog_digests, catalog_specs, sha256_hex, spec_digest};
pub use format::{parse_spec, parse_spec_str, serialize_spec, spec_value, SpecFile, FORMAT_TAG};

use crate::classical_rmatrix::{
    check_aybe, check_aybe_star, check_cybe_adjoint, check_cybe_skew, check_linear_assoc_matrix, check_linear_matrix_form,
    check_quadratic_matrix_form, check_reflection_form, is_skew,
};
use crate::double_bracket::{
    check_double_jacobi, check_linear_assoc, check_quadratic_relations, random_skew_constant, BracketKind, BracketSpec, DEFAULT_DEGREE_CAP,
};
use crate::dynamical_shift::{
    check_confluence, check_dyr_equivalence, check_shift_identities, compare_dtral, random_dyn_system, Criterion3Mode, DynSystem,
};
use crate::error::{Result, YbxError};
use crate::exact_tensor::{q, Q};
use crate::quantum_reflection::{
    build_r, check_classical_limit, check_decoupled_color, check_decoupled_flavor, check_gauge_invariance, check_qybe,
    check_relation_equivalence, check_unitarity, random_flavor_invertible, random_system, ABCDSystem, EquivalenceMode,
};
use crate::report::CheckReport;
use crate::trace_poisson::{check_hamiltonian_form, check_jacobi};
use ndarray::Array4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::str::FromStr;
use std::time::Instant;

/// Bundled example documents, also used as default targets.
pub const BUNDLED: [(&str, &str); 7] = [
    ("constant_m3.json", include_str!("../../specs/constant_m3.json")),
    ("matrix_algebra_m4.json", include_str!("../../specs/matrix_algebra_m4.json")),
    ("quadratic_m2.json", include_str!("../../specs/quadratic_m2.json")),
    ("abcd_random_n2m2.json", include_str!("../../specs/abcd_random_n2m2.json")),
    ("decoupled_flip_n2m2.json", include_str!("../../specs/decoupled_flip_n2m2.json")),
    ("dynamical_n2.json", include_str!("../../specs/dynamical_n2.json")),
    ("dynamical_n2m2.json", include_str!("../../specs/dynamical_n2m2.json")),
];

pub fn bundled(name: &str) -> SpecFile {
    let (_, text) = BUNDLED.iter().find(|(n, _)| *n == name).expect("bundled example exists");
    parse_spec_str(text, name).expect("bundled examples parse")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    DoubleJacobi,
    Aybe,
    Cybe,
    QuadraticRelations,
    TraceJacobi,
    MatrixForm,
    ReflectionForm,
    Qybe,
    Unitarity,
    RelationEquivalence,
    ClassicalLimit,
    Decoupled,
    DynIdentities,
    DyrEquivalence,
    Dtral,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::DoubleJacobi,
        Suite::Aybe,
        Suite::Cybe,
        Suite::QuadraticRelations,
        Suite::TraceJacobi,
        Suite::MatrixForm,
        Suite::ReflectionForm,
        Suite::Qybe,
        Suite::Unitarity,
        Suite::RelationEquivalence,
        Suite::ClassicalLimit,
        Suite::Decoupled,
        Suite::DynIdentities,
        Suite::DyrEquivalence,
        Suite::Dtral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DoubleJacobi => "double-jacobi",
            Suite::Aybe => "aybe",
            Suite::Cybe => "cybe",
            Suite::QuadraticRelations => "quadratic-relations",
            Suite::TraceJacobi => "trace-jacobi",
            Suite::MatrixForm => "matrix-form",
            Suite::ReflectionForm => "reflection-form",
            Suite::Qybe => "qybe",
            Suite::Unitarity => "unitarity",
            Suite::RelationEquivalence => "relation-equivalence",
            Suite::ClassicalLimit => "classical-limit",
            Suite::Decoupled => "decoupled",
            Suite::DynIdentities => "dyn-identities",
            Suite::DyrEquivalence => "dyr-equivalence",
            Suite::Dtral => "dtral",
        }
    }

    /// Whether the suite accepts this kind of input document.
    pub fn applies_to(self, spec: &SpecFile) -> bool {
        use Suite::*;
        match spec {
            SpecFile::Bracket(b) => match b.kind() {
                BracketKind::Constant => matches!(self, DoubleJacobi | TraceJacobi),
                BracketKind::Linear => matches!(self, DoubleJacobi | QuadraticRelations | TraceJacobi | MatrixForm),
                BracketKind::Quadratic => matches!(
                    self,
                    DoubleJacobi | Aybe | Cybe | QuadraticRelations | TraceJacobi | MatrixForm | ReflectionForm | ClassicalLimit
                ),
            },
            SpecFile::Abcd(s) => matches!(self, Qybe | Unitarity | RelationEquivalence) || (self == Decoupled && s.decoupled.is_some()),
            SpecFile::Dynamical(s) => (self == DyrEquivalence && !s.flavored()) || (self == Dtral && s.flavored()),
        }
    }
}

impl FromStr for Suite {
    type Err = YbxError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| YbxError::validation("suite", format!("unknown check {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub degree_cap: usize,
    pub jobs: usize,
    /// Color dimension N where a check takes one.
    pub n: Option<usize>,
    /// Flavor count for randomly generated targets.
    pub m: Option<usize>,
    pub samples: Option<usize>,
    pub epsilons: Option<(Q, Q)>,
    pub eps_f: Q,
    pub mode: Option<Criterion3Mode>,
    /// λ-degree of randomly generated dynamical systems.
    pub lambda_degree: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 0,
            degree_cap: DEFAULT_DEGREE_CAP,
            jobs: 1,
            n: None,
            m: None,
            samples: None,
            epsilons: None,
            eps_f: q(1),
            mode: None,
            lambda_degree: 1,
        }
    }
}

impl SuiteOptions {
    /// Worker count: `YBX_JOBS` wins over `--jobs`.
    pub fn resolve_jobs(flag: Option<usize>) -> usize {
        std::env::var("YBX_JOBS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .or(flag)
            .unwrap_or(1)
            .max(1)
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
    }
}

type Task = Box<dyn FnOnce() -> Result<CheckReport> + Send>;

fn task(f: impl FnOnce() -> Result<CheckReport> + Send + 'static) -> Task {
    Box::new(f)
}

fn need_bracket(spec: &SpecFile, suite: Suite) -> Result<BracketSpec> {
    match spec {
        SpecFile::Bracket(b) => Ok(b.clone()),
        _ => Err(wrong_kind(spec, suite)),
    }
}

fn need_quadratic(spec: &SpecFile, suite: Suite) -> Result<BracketSpec> {
    let b = need_bracket(spec, suite)?;
    if b.kind() != BracketKind::Quadratic {
        return Err(wrong_kind(spec, suite));
    }
    Ok(b)
}

fn need_abcd(spec: &SpecFile, suite: Suite) -> Result<ABCDSystem> {
    match spec {
        SpecFile::Abcd(s) => Ok(s.clone()),
        _ => Err(wrong_kind(spec, suite)),
    }
}

fn need_dynamical(spec: &SpecFile, suite: Suite) -> Result<DynSystem> {
    match spec {
        SpecFile::Dynamical(s) => Ok(s.clone()),
        _ => Err(wrong_kind(spec, suite)),
    }
}

fn wrong_kind(spec: &SpecFile, suite: Suite) -> YbxError {
    YbxError::validation(suite.name(), format!("check does not apply to a {} document", spec.kind_name()))
}

/// Random skew 𝔯 (r^{γε}_{αβ} = −r^{εγ}_{βα}) and symmetric 𝔞 with entries in −2..=2.
pub fn random_skew_symmetric_pair(m: usize, rng: &mut impl Rng) -> (Array4<Q>, Array4<Q>) {
    let mut r = Array4::from_elem((m, m, m, m), q(0));
    let mut a = r.clone();
    for ((i, j, k, l), _) in Array4::<u8>::zeros((m, m, m, m)).indexed_iter() {
        let partner = (j, i, l, k);
        if (i, j, k, l) < partner {
            let v = q(rng.gen_range(-2..=2));
            r[[i, j, k, l]] = v.clone();
            r[[j, i, l, k]] = -v;
        }
        if (i, j, k, l) <= partner {
            let v = q(rng.gen_range(-2..=2));
            a[[i, j, k, l]] = v.clone();
            a[[j, i, l, k]] = v;
        }
    }
    (r, a)
}

/// The three flavorless signatures exercised by default.
pub const DYR_SIGNATURES: [(i64, i64); 3] = [(-1, 1), (-1, 0), (-1, -1)];

fn plan(target: Option<&SpecFile>, suite: Suite, opts: &SuiteOptions) -> Result<Vec<Task>> {
    let n = opts.n.unwrap_or(2);
    let cap = opts.degree_cap;
    let mut tasks: Vec<Task> = Vec::new();
    let default_or = |name: &str| target.cloned().unwrap_or_else(|| bundled(name));
    match suite {
        Suite::DoubleJacobi => match target {
            Some(t) => {
                let b = need_bracket(t, suite)?;
                tasks.push(task(move || check_double_jacobi(&b)));
            }
            None => {
                let m = opts.m.unwrap_or(3);
                for k in 0..opts.samples.unwrap_or(1) {
                    let spec = random_skew_constant(&mut opts.rng(k as u64), m, 5);
                    tasks.push(task(move || {
                        let mut r = check_double_jacobi(&spec)?;
                        r.tag = format!("db constant m={m} sample={k}");
                        Ok(r)
                    }));
                }
            }
        },
        Suite::Aybe => {
            let b = need_quadratic(&default_or("quadratic_m2.json"), suite)?;
            tasks.push(task(move || {
                let (r, _) = b.quadratic_parts().expect("quadratic");
                let ay = check_aybe(r)?;
                let mut parts = vec![ay.clone(), check_aybe_star(r)?];
                if ay.pass && is_skew(r) {
                    parts.push(check_cybe_skew(&b, n)?);
                }
                Ok(CheckReport::composite("AYBE suite", parts).with_info("skew", json!(is_skew(r))))
            }));
        }
        Suite::Cybe => {
            let b = need_quadratic(&default_or("quadratic_m2.json"), suite)?;
            let b2 = b.clone();
            tasks.push(task(move || check_cybe_skew(&b, n)));
            if b2.a_is_symmetric() {
                tasks.push(task(move || check_cybe_adjoint(&b2, n)));
            }
        }
        Suite::QuadraticRelations => {
            let b = need_bracket(&default_or("quadratic_m2.json"), suite)?;
            match b.kind() {
                BracketKind::Quadratic => tasks.push(task(move || check_quadratic_relations(&b))),
                BracketKind::Linear => tasks.push(task(move || check_linear_assoc(&b))),
                BracketKind::Constant => return Err(wrong_kind(&SpecFile::Bracket(b), suite)),
            }
        }
        Suite::TraceJacobi => {
            let b = need_bracket(&default_or("matrix_algebra_m4.json"), suite)?;
            let mut rng = opts.rng(0);
            tasks.push(task(move || Ok(check_jacobi(&b, n, cap, &mut rng))));
        }
        Suite::MatrixForm => {
            let b = need_bracket(&default_or("matrix_algebra_m4.json"), suite)?;
            match b.kind() {
                BracketKind::Linear => {
                    let (b1, b2) = (b.clone(), b.clone());
                    tasks.push(task(move || check_linear_matrix_form(&b1, n)));
                    tasks.push(task(move || check_linear_assoc_matrix(&b2, n)));
                }
                BracketKind::Quadratic => {
                    let b1 = b.clone();
                    tasks.push(task(move || check_quadratic_matrix_form(&b1, n)));
                }
                BracketKind::Constant => return Err(wrong_kind(&SpecFile::Bracket(b), suite)),
            }
            tasks.push(task(move || Ok(check_hamiltonian_form(&b, n))));
        }
        Suite::ReflectionForm => {
            let b = need_quadratic(&default_or("quadratic_m2.json"), suite)?;
            tasks.push(task(move || check_reflection_form(&b, n)));
        }
        Suite::ClassicalLimit => match target {
            Some(t) => {
                let b = need_quadratic(t, suite)?;
                tasks.push(task(move || {
                    let (r, a) = b.quadratic_parts().expect("quadratic");
                    check_classical_limit(r, a, n)
                }));
            }
            None => {
                let m = opts.m.unwrap_or(2);
                for k in 0..opts.samples.unwrap_or(1) {
                    let (r, a) = random_skew_symmetric_pair(m, &mut opts.rng(k as u64));
                    tasks.push(task(move || {
                        let mut rep = check_classical_limit(&r, &a, n)?;
                        rep.tag = format!("{} sample={k}", rep.tag);
                        Ok(rep)
                    }));
                }
            }
        },
        Suite::Qybe => {
            let s = need_abcd(&default_or("decoupled_flip_n2m2.json"), suite)?;
            tasks.push(task(move || check_qybe(&build_r(&s)?)));
        }
        Suite::Unitarity => {
            let s = need_abcd(&default_or("decoupled_flip_n2m2.json"), suite)?;
            tasks.push(task(move || check_unitarity(&s)));
        }
        Suite::RelationEquivalence => match target {
            Some(t) => {
                let s = need_abcd(t, suite)?;
                tasks.push(task(move || check_relation_equivalence(&s, EquivalenceMode::Both)));
            }
            None => {
                let ms = opts.m.map_or(vec![2, 1], |m| vec![m]);
                for (k, m) in ms.into_iter().enumerate() {
                    let s = random_system(n, m, &mut opts.rng(k as u64));
                    tasks.push(task(move || {
                        let mut rep = check_relation_equivalence(&s, EquivalenceMode::Both)?;
                        rep.tag = format!("{} N={n} m={m}", rep.tag);
                        Ok(rep)
                    }));
                }
            }
        },
        Suite::Decoupled => {
            let s = need_abcd(&default_or("decoupled_flip_n2m2.json"), suite)?;
            if s.decoupled.is_none() {
                return Err(YbxError::validation("decoupled", "document carries no decoupled blocks"));
            }
            let g = random_flavor_invertible(s.m, &mut opts.rng(0));
            let (s1, s2, s3, s4) = (s.clone(), s.clone(), s.clone(), s.clone());
            tasks.push(task(move || check_decoupled_color(&s1)));
            tasks.push(task(move || check_decoupled_flavor(&s2)));
            tasks.push(task(move || check_unitarity(&s3)));
            tasks.push(task(move || check_qybe(&build_r(&s4)?)));
            tasks.push(task(move || check_gauge_invariance(&s, &g)));
        }
        Suite::DynIdentities => {
            if target.is_some() {
                return Err(YbxError::validation(suite.name(), "check draws its own random samples and takes no input"));
            }
            let samples = opts.samples.unwrap_or(100);
            let mut rng = opts.rng(0);
            tasks.push(task(move || check_shift_identities(samples, &mut rng)));
        }
        Suite::DyrEquivalence => {
            let systems: Vec<DynSystem> = match target {
                Some(t) => {
                    if opts.epsilons.is_some() {
                        return Err(YbxError::validation(suite.name(), "--epsilons cannot override an input document"));
                    }
                    let s = need_dynamical(t, suite)?;
                    if s.flavored() {
                        return Err(wrong_kind(t, suite));
                    }
                    vec![s]
                }
                None => {
                    let sigs: Vec<(Q, Q)> = match &opts.epsilons {
                        Some(e) => vec![e.clone()],
                        None => DYR_SIGNATURES.iter().map(|&(r, l)| (q(r), q(l))).collect(),
                    };
                    sigs.into_iter()
                        .enumerate()
                        .map(|(k, (er, el))| random_dyn_system(n, 0, (er, el, q(0)), opts.lambda_degree, &mut opts.rng(k as u64)))
                        .collect()
                }
            };
            for (k, s) in systems.into_iter().enumerate() {
                let s2 = s.clone();
                let mut rng = opts.rng(100 + k as u64);
                tasks.push(task(move || check_dyr_equivalence(&s)));
                tasks.push(task(move || check_confluence(&s2, 3, &mut rng)));
            }
        }
        Suite::Dtral => {
            let s = match target {
                Some(t) => need_dynamical(t, suite)?,
                None => {
                    let (er, el) = opts.epsilons.clone().unwrap_or((q(-1), q(1)));
                    random_dyn_system(n, opts.m.unwrap_or(2), (er, el, opts.eps_f.clone()), opts.lambda_degree, &mut opts.rng(0))
                }
            };
            if !s.flavored() {
                return Err(YbxError::validation(suite.name(), "needs a flavored system (m >= 1)"));
            }
            let mode = opts.mode;
            tasks.push(task(move || {
                let (mut rep, narrow, broad) = compare_dtral(&s)?;
                if let Some(mode) = mode {
                    let (name, nf) = match mode {
                        Criterion3Mode::Narrow => ("narrow", narrow),
                        Criterion3Mode::Broad => ("broad", broad),
                    };
                    let lines: Vec<String> = nf.to_string().lines().map(str::to_string).collect();
                    rep = rep.with_info("mode", json!(name)).with_info("normal_form", json!(lines));
                }
                Ok(rep)
            }));
        }
    }
    Ok(tasks)
}

/// Runs one suite on `target` (or on its default target) with `opts.jobs` workers.
/// Reports come back in planning order regardless of scheduling.
pub fn run_suite(target: Option<&SpecFile>, suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckReport>> {
    let tasks = plan(target, suite, opts)?;
    run_tasks(tasks, opts.jobs)
}

fn run_tasks(tasks: Vec<Task>, jobs: usize) -> Result<Vec<CheckReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| YbxError::validation("jobs", e.to_string()))?;
    pool.install(|| {
        tasks
            .into_par_iter()
            .map(|t| {
                let start = Instant::now();
                let mut r = t()?;
                r.elapsed = start.elapsed();
                Ok(r)
            })
            .collect()
    })
}

/// Every applicable suite on each target, or every suite on its default target.
pub fn run_report(targets: &[SpecFile], opts: &SuiteOptions) -> Result<Vec<(String, Suite, Vec<CheckReport>)>> {
    let mut out = Vec::new();
    if targets.is_empty() {
        for suite in Suite::ALL {
            out.push(("default".to_string(), suite, run_suite(None, suite, opts)?));
        }
    } else {
        for t in targets {
            let label = format!("{} {}", t.kind_name(), &spec_digest(t)[..12]);
            for suite in Suite::ALL.into_iter().filter(|s| s.applies_to(t)) {
                out.push((label.clone(), suite, run_suite(Some(t), suite, opts)?));
            }
        }
    }
    Ok(out)
}

/// 0 when every report passes, 1 otherwise.
pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}

pub fn render_text(reports: &[CheckReport], timings: bool) -> String {
    reports.iter().map(|r| r.to_text(timings)).collect()
}

pub fn render_json(suite: &str, seed: u64, reports: &[CheckReport], timings: bool) -> Value {
    json!({
        "suite": suite,
        "seed": seed,
        "pass": reports.iter().all(|r| r.pass),
        "reports": reports.iter().map(|r| r.to_json(timings)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn bundled_examples_parse() {
        for (name, _) in BUNDLED {
            let _ = bundled(name);
        }
    }

    #[test]
    fn wrong_kind_is_an_input_error() {
        let t = bundled("constant_m3.json");
        assert!(run_suite(Some(&t), Suite::Qybe, &SuiteOptions::default()).is_err());
    }

    #[test]
    fn reports_keep_planning_order_under_parallelism() {
        let opts = SuiteOptions { samples: Some(6), jobs: 3, ..SuiteOptions::default() };
        let tags: Vec<String> = run_suite(None, Suite::DoubleJacobi, &opts).unwrap().into_iter().map(|r| r.tag).collect();
        let expect: Vec<String> = (0..6).map(|k| format!("db constant m=3 sample={k}")).collect();
        assert_eq!(tags, expect);
    }
}
