use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use dlprov_core::engine::{evaluate, write_outputs, EvalError, EvalReport, Strategy};
use dlprov_core::frontend::{
    load_facts, parse_program, validate, AnnotatedFact, Program, Severity,
};
use dlprov_core::generators::random_graph;
use dlprov_core::hypergraph::{format_hypergraph, from_program, parse_hypergraph};
use dlprov_core::semiring::check_properties;
use dlprov_core::translations::{hg_to_datalog_fixed, hg_to_datalog_simple, parse_andor};
use dlprov_core::{Properties, SemiringSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Semiring provenance for Datalog programs.
#[derive(Parser, Debug)]
#[command(name = "dlprov", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a program and write one `<relation>.csv` per output relation.
    Run {
        program: PathBuf,
        /// Directory holding `<relation>.facts` files; missing files are empty.
        #[arg(long)]
        facts: Option<PathBuf>,
        #[command(flatten)]
        semiring: SemiringArgs,
        #[arg(long, default_value = "seminaive", value_parser = parse_strategy)]
        strategy: Strategy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert between programs, hypergraphs and AND/OR graphs.
    Translate {
        #[arg(value_enum)]
        mode: Mode,
        input: PathBuf,
        /// A file for hypergraph output, a directory for program output.
        output: PathBuf,
        /// Facts directory for `dl2hg`.
        #[arg(long)]
        facts: Option<PathBuf>,
        #[command(flatten)]
        semiring: SemiringArgs,
    },
    /// Time strategies on one input after checking that they agree.
    Bench {
        /// Program file; omit when using `--random-graph`.
        #[arg(required_unless_present = "random_graph")]
        program: Option<PathBuf>,
        #[arg(long)]
        facts: Option<PathBuf>,
        #[command(flatten)]
        semiring: SemiringArgs,
        #[arg(long, value_delimiter = ',', default_value = "naive,seminaive", value_parser = parse_strategy)]
        strategies: Vec<Strategy>,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        /// Transitive closure over a random graph with this many nodes.
        #[arg(long, conflicts_with = "program")]
        random_graph: Option<usize>,
        /// Arc count for `--random-graph`; defaults to twice the node count.
        #[arg(long, requires = "random_graph")]
        edges: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Randomized self-check of the semiring laws and declared properties.
    Check {
        semiring: String,
        #[arg(long, value_delimiter = ',')]
        universe: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        chains: Option<Vec<u32>>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replace the declared properties, e.g. `commutative,zero_closed`.
        #[arg(long)]
        properties: Option<String>,
    },
}

#[derive(Args, Debug)]
struct SemiringArgs {
    /// tropical, boolean, counting, set-lattice or chain-product. Defaults to
    /// a `// semiring <name>` line in the input.
    #[arg(long)]
    semiring: Option<String>,
    /// Universe of the set lattice.
    #[arg(long, value_delimiter = ',')]
    universe: Option<Vec<String>>,
    /// Chain lengths of the chain product.
    #[arg(long, value_delimiter = ',')]
    chains: Option<Vec<u32>>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Dl2hg,
    #[value(name = "hg2dl-simple")]
    Hg2dlSimple,
    #[value(name = "hg2dl-fixed")]
    Hg2dlFixed,
    Andor2hg,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse()
}

#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Invariant(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Invariant(_) => 3,
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Invariant(_) => Failure::Invariant(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn input<E: std::fmt::Display>(context: impl std::fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path.display()))
}

/// The flag if given, otherwise a `// semiring` comment in `text`.
fn semiring(args: &SemiringArgs, text: &str) -> Result<SemiringSpec, Failure> {
    if let Some(name) = &args.semiring {
        return SemiringSpec::from_name(name, args.universe.as_deref(), args.chains.as_deref())
            .map_err(input("--semiring"));
    }
    let header = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("// semiring "))
        .ok_or_else(|| {
            Failure::Input("no --semiring given and no `// semiring` line in the input".into())
        })?;
    SemiringSpec::from_header(header).map_err(input("semiring header"))
}

fn load_program(path: &Path) -> Result<(Program, String), Failure> {
    let text = read(path)?;
    let program = parse_program(&text).map_err(input(path.display()))?;
    let mut errors = Vec::new();
    for d in validate(&program) {
        eprintln!("{}: {d}", path.display());
        if d.severity == Severity::Error {
            errors.push(d.message);
        }
    }
    if !errors.is_empty() {
        return Err(Failure::Input(format!(
            "{}: invalid program",
            path.display()
        )));
    }
    Ok((program, text))
}

/// Every input relation's `<name>.facts`; a missing file is an empty relation.
fn load_edb(
    program: &Program,
    dir: Option<&Path>,
    spec: &SemiringSpec,
) -> Result<Vec<AnnotatedFact>, Failure> {
    let mut edb = Vec::new();
    let Some(dir) = dir else { return Ok(edb) };
    for name in &program.inputs {
        let Some(decl) = program.decl(name) else {
            continue;
        };
        let path = dir.join(format!("{name}.facts"));
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => continue,
            Err(e) => return Err(input(path.display())(e)),
        };
        edb.extend(load_facts(&text, decl, spec).map_err(input(path.display()))?);
    }
    Ok(edb)
}

fn run(
    program: &Path,
    facts: Option<&Path>,
    args: &SemiringArgs,
    strategy: Strategy,
    out: &Path,
) -> Result<(), Failure> {
    let (program, text) = load_program(program)?;
    let spec = semiring(args, &text)?;
    let edb = load_edb(&program, facts, &spec)?;
    let report = evaluate(strategy, &program, &edb, &spec)?;
    write_outputs(&report, &program, &spec, out).map_err(input(out.display()))
}

fn translate(
    mode: Mode,
    from: &Path,
    to: &Path,
    facts: Option<&Path>,
    args: &SemiringArgs,
) -> Result<(), Failure> {
    let write = |text: String| fs::write(to, text).map_err(input(to.display()));
    match mode {
        Mode::Dl2hg => {
            let (program, text) = load_program(from)?;
            let spec = semiring(args, &text)?;
            let edb = load_edb(&program, facts, &spec)?;
            let h = from_program(&program, &edb, &spec).map_err(input(from.display()))?;
            write(format_hypergraph(&h))
        }
        Mode::Hg2dlSimple | Mode::Hg2dlFixed => {
            let h = parse_hypergraph(&read(from)?).map_err(input(from.display()))?;
            let t = match mode {
                Mode::Hg2dlSimple => hg_to_datalog_simple(&h),
                _ => hg_to_datalog_fixed(&h).map_err(input(from.display()))?,
            };
            t.write(to).map_err(input(to.display()))
        }
        Mode::Andor2hg => {
            let h = parse_andor(&read(from)?).map_err(input(from.display()))?;
            write(format_hypergraph(&h))
        }
    }
}

struct BenchInput {
    program: Program,
    edb: Vec<AnnotatedFact>,
    spec: SemiringSpec,
}

/// Runs every strategy once and fails on the first differing atom; then
/// emits `repetitions` timed rows per strategy.
fn bench(
    input: &BenchInput,
    strategies: &[Strategy],
    repetitions: usize,
    inject_fault: bool,
) -> Result<String, Failure> {
    let (p, e, s) = (&input.program, input.edb.as_slice(), &input.spec);
    let mut reference: Option<EvalReport> = None;
    for (i, &strategy) in strategies.iter().enumerate() {
        let mut r = evaluate(strategy, p, e, s)?;
        if inject_fault && i + 1 == strategies.len() {
            if let Some(v) = r.values.values_mut().next() {
                *v = if *v == s.one() { s.zero() } else { s.one() };
            }
        }
        match &reference {
            None => reference = Some(r),
            Some(first) => {
                let differing = first
                    .values
                    .keys()
                    .chain(r.values.keys())
                    .find(|f| first.value(f) != r.value(f));
                if let Some(f) = differing {
                    let show = |v: Option<&dlprov_core::Value>| {
                        v.map_or("absent".into(), |v| s.format_value(v))
                    };
                    return Err(Failure::Invariant(format!(
                        "strategies disagree on {f}: {} = {}, {} = {}",
                        first.strategy,
                        show(first.value(f)),
                        strategy,
                        show(r.value(f)),
                    )));
                }
            }
        }
    }
    let mut csv = String::from(
        "strategy,repetition,wall_ms,extractions,rule_instantiations,queue_pushes,stale_pops\n",
    );
    for &strategy in strategies {
        for rep in 0..repetitions {
            let start = Instant::now();
            let r = evaluate(strategy, p, e, s)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let st = &r.stats;
            writeln!(
                csv,
                "{strategy},{rep},{ms:.3},{},{},{},{}",
                st.extractions, st.rule_instantiations, st.queue_pushes, st.stale_pops
            )
            .unwrap();
        }
    }
    Ok(csv)
}

fn check(
    name: &str,
    universe: Option<&[String]>,
    chains: Option<&[u32]>,
    samples: usize,
    seed: u64,
    properties: Option<&str>,
) -> Result<String, Failure> {
    let mut spec = SemiringSpec::from_name(name, universe, chains).map_err(input("semiring"))?;
    if let Some(list) = properties {
        spec = spec.with_properties(Properties::parse_list(list).map_err(input("--properties"))?);
    }
    let report = check_properties(&spec, samples, seed);
    let text = format!("{report}\n");
    if report.all_passed() {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::Invariant(format!(
            "{} fails its declared laws",
            spec.header()
        )))
    }
}

fn dispatch(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Run {
            program,
            facts,
            semiring,
            strategy,
            out,
        } => {
            run(&program, facts.as_deref(), &semiring, strategy, &out)?;
            Ok(String::new())
        }
        Command::Translate {
            mode,
            input,
            output,
            facts,
            semiring,
        } => {
            translate(mode, &input, &output, facts.as_deref(), &semiring)?;
            Ok(String::new())
        }
        Command::Bench {
            program,
            facts,
            semiring: args,
            strategies,
            repetitions,
            random_graph: nodes,
            edges,
            seed,
            inject_fault,
        } => {
            let input = match (program, nodes) {
                (Some(path), _) => {
                    let (program, text) = load_program(&path)?;
                    let spec = semiring(&args, &text)?;
                    let edb = load_edb(&program, facts.as_deref(), &spec)?;
                    BenchInput { program, edb, spec }
                }
                (None, Some(n)) => {
                    let spec = match &args.semiring {
                        Some(_) => semiring(&args, "")?,
                        None => SemiringSpec::tropical(),
                    };
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let g = random_graph(&mut rng, &spec, n, edges.unwrap_or(2 * n));
                    BenchInput {
                        program: g.program,
                        edb: g.edb,
                        spec,
                    }
                }
                (None, None) => unreachable!("clap requires one of the two"),
            };
            bench(&input, &strategies, repetitions, inject_fault)
        }
        Command::Check {
            semiring,
            universe,
            chains,
            samples,
            seed,
            properties,
        } => check(
            &semiring,
            universe.as_deref(),
            chains.as_deref(),
            samples,
            seed,
            properties.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
