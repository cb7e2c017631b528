//! `asphint` command line: check, localize and repair submissions, inject
//! synthetic bugs and benchmark fault localization on them.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use asphint::harness::{
    bundled, inject_bugs, load_instance, run_bench, run_pipeline, BenchOptions, BenchSummary, Config, CorpusEntry,
    InjectError, LoadError, Stage,
};
use asphint::llm::{HttpBackend, LlmBackend};
use asphint::solver::{Backend, ClingoBackend};
use asphint::syntax::{parse, Program};
use asphint::verify::{InstanceSpec, Verifier};

const EXIT_USAGE: u8 = 2;
const EXIT_INSTANCE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "asphint", version, about = "Fault localization and repair hints for ASP submissions")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Target {
    /// Instance YAML file or bundled instance name.
    #[arg(long)]
    instance: String,
    /// Submission `.lp` file.
    #[arg(long)]
    submission: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify a submission against the reference.
    Check(Target),
    /// Verify, then localize faults.
    Localize(Target),
    /// Verify, localize and repair; the report carries the hint.
    Repair {
        #[command(flatten)]
        target: Target,
        /// Disable the language model even if configured.
        #[arg(long)]
        no_llm: bool,
    },
    /// Write a corpus of synthetic bugs as JSON.
    Inject {
        /// Instance YAML files or bundled names; bugs are spread evenly.
        #[arg(long, required = true)]
        instance: Vec<String>,
        /// Bugs to produce.
        #[arg(long, default_value_t = 50)]
        bugs: usize,
        /// Mutations per bug, 1 to 8.
        #[arg(long, default_value_t = 1)]
        mutations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Localize every bug of a corpus and count the outcome labels.
    Bench {
        /// Corpus JSON written by `inject`.
        #[arg(long)]
        corpus: PathBuf,
        /// Also run the repair loop.
        #[arg(long)]
        repair: bool,
        /// Repair from the ground-truth lines.
        #[arg(long, requires = "repair")]
        oracle_acs: bool,
    },
}

/// A failure with its exit code.
struct Failure(u8, String);

impl Failure {
    fn usage(e: impl ToString) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
    fn instance(e: impl ToString) -> Self {
        Failure(EXIT_INSTANCE, e.to_string())
    }
    fn solver(e: impl ToString) -> Self {
        Failure(EXIT_SOLVER, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("asphint: {message}");
            ExitCode::from(code)
        }
    }
}

fn load_spec(name: &str) -> Result<InstanceSpec, Failure> {
    let path = Path::new(name);
    if path.exists() {
        return load_instance(path).map_err(Failure::instance);
    }
    let key = name.trim_end_matches(".yaml").replace('_', "-");
    bundled::load(&key).ok_or_else(|| {
        Failure::instance(LoadError::Io {
            path: name.to_owned(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or bundled instance"),
        })
    })
}

fn load_submission(path: &Path) -> Result<Program, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))
}

fn solver(config: &Config) -> Result<Arc<dyn Backend>, Failure> {
    Ok(Arc::new(ClingoBackend::discover(config.solver.as_deref()).map_err(Failure::solver)?))
}

fn llm_backend(config: &Config) -> Result<Option<HttpBackend>, Failure> {
    match (&config.llm.endpoint, config.llm.enabled) {
        (Some(endpoint), true) => HttpBackend::new(endpoint, config.llm.timeout).map(Some).map_err(Failure::usage),
        _ => Ok(None),
    }
}

fn emit(out: Option<&Path>, json: String) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, json + "\n").map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
        }
        // A closed reader (`| head`) is not an error.
        None => match writeln!(std::io::stdout().lock(), "{json}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::usage(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = Config::load(cli.config.as_deref()).map_err(Failure::usage)?;
    let out = cli.out.as_deref();
    let (target, stage, no_llm) = match cli.command {
        Command::Check(t) => (t, Stage::Check, true),
        Command::Localize(t) => (t, Stage::Localize, false),
        Command::Repair { target, no_llm } => (target, Stage::Repair, no_llm),
        Command::Inject { instance, bugs, mutations, seed } => {
            return inject(&config, &instance, bugs, mutations, seed, out)
        }
        Command::Bench { corpus, repair, oracle_acs } => return bench(&config, &corpus, repair, oracle_acs, out),
    };
    let spec = load_spec(&target.instance)?;
    let submission = load_submission(&target.submission)?;
    let verifier = Verifier::new(solver(&config)?, Arc::new(spec), config.verify);
    let client = if no_llm { None } else { llm_backend(&config)? };
    let llm = client.as_ref().map(|c| (c as &dyn LlmBackend, &config.llm));
    let report = run_pipeline(&submission, &verifier, stage, llm, &config.localize, &config.repair_options())
        .map_err(Failure::solver)?;
    emit(out, report.to_json())
}

fn inject(
    config: &Config,
    instances: &[String],
    bugs: usize,
    mutations: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if !(1..=8).contains(&mutations) {
        return Err(Failure::usage("--mutations must be between 1 and 8"));
    }
    let backend = solver(config)?;
    let options = config.inject_options();
    let mut corpus = Vec::with_capacity(bugs);
    let verifiers: Vec<(String, Verifier)> = instances
        .iter()
        .map(|name| Ok((name.clone(), Verifier::new(backend.clone(), Arc::new(load_spec(name)?), config.verify))))
        .collect::<Result<_, Failure>>()?;
    for i in 0..bugs {
        let (name, verifier) = &verifiers[i % verifiers.len()];
        let mut options = options.clone();
        for t in &verifier.spec().test_cases {
            options.extra_predicates.extend(t.facts().signatures().iter().map(|(n, a)| (n.clone(), *a)));
        }
        let base = &verifier.spec().reference;
        match inject_bugs(base, mutations, seed.wrapping_add(i as u64), verifier, &options) {
            Ok(bug) => corpus.push(CorpusEntry { instance: name.clone(), bug }),
            Err(InjectError::Verify(e)) => return Err(Failure::solver(e)),
            Err(e) => eprintln!("asphint: {name}, bug {i}: {e}"),
        }
    }
    emit(out, serde_json::to_string_pretty(&corpus).expect("corpus serializes"))
}

fn bench(config: &Config, corpus: &Path, repair: bool, oracle_acs: bool, out: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(corpus).map_err(|e| Failure::usage(format!("{}: {e}", corpus.display())))?;
    let entries: Vec<CorpusEntry> =
        serde_json::from_str(&text).map_err(|e| Failure::usage(format!("{}: {e}", corpus.display())))?;
    let mut groups: BTreeMap<String, Vec<_>> = BTreeMap::new();
    for e in entries {
        groups.entry(e.instance).or_default().push(e.bug);
    }
    let backend = solver(config)?;
    let client = llm_backend(config)?;
    let llm = client.as_ref().map(|c| (c as &dyn LlmBackend, &config.llm));
    let options = BenchOptions {
        localize: config.localize,
        repair: repair.then(|| config.repair_options()),
        oracle_acs,
    };
    let mut verifiers = BTreeMap::new();
    for name in groups.keys() {
        verifiers.insert(name.clone(), Verifier::new(backend.clone(), Arc::new(load_spec(name)?), config.verify));
    }
    // One thread per instance; each owns its verifier and cache.
    let reports = std::thread::scope(|s| {
        let handles: Vec<_> = groups
            .iter()
            .map(|(name, bugs)| {
                let verifier = &verifiers[name];
                let options = &options;
                (name.clone(), s.spawn(move || run_bench(bugs, verifier, llm, options)))
            })
            .collect();
        handles.into_iter().map(|(n, h)| (n, h.join().expect("bench thread panicked"))).collect()
    });
    emit(out, serde_json::to_string_pretty(&BenchSummary::merge(reports)).expect("summary serializes"))
}
