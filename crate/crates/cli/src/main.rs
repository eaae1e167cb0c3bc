use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cap_core::bivalency::{explore, ExploreConfig};
use cap_core::index::{ind, ind_limit, ind_normalized};
use cap_core::oracle::{classify, round_lower_bound, select_forbidden_scenario};
use cap_core::protocol::{simulate, verify, AlgorithmContext, Registry, VerifyConfig};
use cap_core::ternary::format_rational;
use cap_core::topology::export::{complex_to_json, complex_to_svg, subdivision_to_json, subdivision_to_svg};
use cap_core::topology::{
    abstract_components, chr_power, contrex, input_square, limit_connectivity, protocol_complex,
    realization_components, unit_segment, Complex, Connectivity, TerminatingSubdivision,
};
use cap_core::{parse_lasso, parse_word, AdversaryAutomaton, Lasso, SCHEMA_VERSION};

/// Worker threads for verification and exploration.
const THREADS_VAR: &str = "CAP_THREADS";

#[derive(Parser)]
#[command(name = "cap", version)]
#[command(about = "Two-process consensus under omission message adversaries")]
struct Cli {
    /// Output format (svg is accepted by `topo` only)
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Scenario index of a word, or the limit index of a lasso
    Index {
        /// Word such as "LW OK LB"
        word: Option<String>,
        /// Lasso such as "LW LB (OK)^w"
        #[arg(long, conflicts_with = "word")]
        limit: Option<String>,
    },
    /// Message adversaries
    #[command(subcommand)]
    Adv(AdvCommand),
    /// Simulation and verification of consensus algorithms
    #[command(subcommand)]
    Sim(SimCommand),
    /// Valency exploration
    #[command(subcommand)]
    Bivalency(BivalencyCommand),
    /// Chromatic complexes and terminating subdivisions
    #[command(subcommand)]
    Topo(TopoCommand),
}

#[derive(Subcommand)]
enum AdvCommand {
    /// Decide solvability
    Check { adversary: String },
    /// The excluded scenario the index-based algorithm would use
    Witness { adversary: String },
    /// Round lower bound from prefix inclusion
    Lowerbound {
        adversary: String,
        #[arg(long, default_value_t = 8)]
        rmax: usize,
    },
    /// The compiled automaton
    Compile { adversary: String },
    /// Whether the limit set is connected, with the gap point if not
    Connectivity { adversary: String },
}

#[derive(Args)]
struct AlgorithmArgs {
    /// Algorithm name, optionally with an argument (`fixed-round:3`)
    #[arg(long, default_value = "aw")]
    algorithm: String,
    /// Excluded scenario for `aw` (chosen by the oracle when omitted)
    #[arg(long)]
    w: Option<String>,
}

#[derive(Subcommand)]
enum SimCommand {
    /// Run one scenario and print the transcript
    Run {
        #[arg(long)]
        adversary: Option<String>,
        #[arg(long)]
        scenario: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        inputs: Vec<u8>,
        #[arg(long, default_value_t = 60)]
        max_rounds: usize,
        #[command(flatten)]
        alg: AlgorithmArgs,
    },
    /// Check agreement, validity and termination on every bounded scenario
    Verify {
        #[arg(long)]
        adversary: String,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[command(flatten)]
        alg: AlgorithmArgs,
    },
    /// List the registered algorithms
    Algorithms,
}

#[derive(Subcommand)]
enum BivalencyCommand {
    /// Valency tree of prefixes
    Explore {
        #[arg(long)]
        adversary: String,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        inputs: Vec<u8>,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        max_rounds: Option<usize>,
        #[command(flatten)]
        alg: AlgorithmArgs,
    },
}

#[derive(Args)]
struct ComplexArgs {
    /// Subdivision rounds
    #[arg(long, default_value_t = 2)]
    rounds: usize,
    /// Protocol complex (or, with --terminating, terminating subdivision) of this adversary
    #[arg(long)]
    adversary: Option<String>,
    /// Terminating subdivision around the adversary's gap point
    #[arg(long, requires = "adversary")]
    terminating: bool,
    /// Use the input square instead of the unit segment (without --adversary)
    #[arg(long)]
    square: bool,
}

#[derive(Subcommand)]
enum TopoCommand {
    /// Build a complex and export it
    Subdivide {
        #[command(flatten)]
        complex: ComplexArgs,
        /// Output file; the extension (.json or .svg) picks the format
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count connected components
    Components {
        #[command(flatten)]
        complex: ComplexArgs,
        #[arg(long = "abstract")]
        abstract_only: bool,
        #[arg(long = "realization")]
        realization_only: bool,
    },
    /// The hand-coded subdivision whose abstract and geometric connectivity differ
    Contrex {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var(THREADS_VAR) {
        if let Ok(n) = n.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let Some(v) = e.downcast_ref::<Reported>() {
                print!("{}", v.output);
                eprintln!("error[violation]: {v}");
                return ExitCode::from(3);
            }
            let (tag, code, msg) = match e.downcast_ref::<cap_core::Error>() {
                Some(err) if err.kind() == cap_core::ErrorKind::Resource => ("resource", 2, err.detail()),
                Some(err) => (err.kind().tag(), 1, err.detail()),
                None if e.chain().any(|c| c.is::<std::io::Error>()) => ("io", 1, format!("{e:#}")),
                None => ("usage", 1, format!("{e:#}")),
            };
            eprintln!("error[{tag}]: {msg}");
            ExitCode::from(code)
        }
    }
}

/// A verification report with violations; printed, then exit code 3.
#[derive(Debug)]
struct Reported {
    output: String,
    violations: usize,
}

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} violation(s) found", self.violations)
    }
}

impl std::error::Error for Reported {}

fn adversary(text: &str) -> anyhow::Result<AdversaryAutomaton> {
    Ok(AdversaryAutomaton::from_dsl(text)?)
}

fn lasso(text: &str) -> anyhow::Result<Lasso> {
    Ok(parse_lasso(text)?)
}

fn inputs(v: &[u8]) -> anyhow::Result<[u8; 2]> {
    match v {
        [a, b] if *a <= 1 && *b <= 1 => Ok([*a, *b]),
        _ => bail!("inputs must be two bits, e.g. 0,1"),
    }
}

/// Pretty JSON with a schema version at top level.
fn json_doc<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut v = serde_json::to_value(value)?;
    if let Value::Object(m) = &mut v {
        m.entry("schema_version").or_insert(json!(SCHEMA_VERSION));
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn build_algorithm(
    args: &AlgorithmArgs,
    adversary: Option<&AdversaryAutomaton>,
) -> anyhow::Result<std::sync::Arc<dyn cap_core::protocol::ConsensusAlgorithm>> {
    let w = args.w.as_deref().map(lasso).transpose()?;
    let ctx = AlgorithmContext {
        adversary,
        w: w.as_ref(),
        arg: None,
    };
    Ok(Registry::with_defaults().build(&args.algorithm, ctx)?)
}

fn run(cli: &Cli) -> anyhow::Result<String> {
    if cli.format == Format::Svg && !matches!(cli.command, Command::Topo(_)) {
        bail!("svg output is only available for topo commands");
    }
    let text = cli.format == Format::Text;
    match &cli.command {
        Command::Index { word, limit } => match (word, limit) {
            (Some(w), None) => {
                let w = parse_word(w)?;
                let i = ind(&w)?;
                let n = ind_normalized(&w)?;
                if text {
                    return Ok(format!("ind = {i}\nind_n = {}\n", format_rational(&n.to_rational())));
                }
                json_doc(&json!({
                    "word": w.to_string(),
                    "ind": i.to_string(),
                    "ind_normalized": format_rational(&n.to_rational()),
                }))
            }
            (None, Some(l)) => {
                let l = lasso(l)?;
                let z = format_rational(&ind_limit(&l)?);
                if text {
                    return Ok(format!("{z}\n"));
                }
                json_doc(&json!({"lasso": l.to_string(), "limit": z}))
            }
            _ => bail!("give a word or --limit <lasso>"),
        },
        Command::Adv(cmd) => run_adv(cmd, text),
        Command::Sim(cmd) => run_sim(cmd, text),
        Command::Bivalency(BivalencyCommand::Explore {
            adversary: a,
            inputs: i,
            depth,
            max_rounds,
            alg,
        }) => {
            let a = adversary(a)?;
            let algorithm = build_algorithm(alg, Some(&a))?;
            let cfg = ExploreConfig {
                max_rounds: *max_rounds,
                ..ExploreConfig::new(*depth)
            };
            let e = explore(algorithm.as_ref(), &a, inputs(i)?, &cfg)?;
            if text {
                let words = |v: &[cap_core::Word]| {
                    v.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(", ")
                };
                return Ok(format!(
                    "root: {:?}\ndecisive: [{}]\ninconclusive: [{}]\ndisagreement: {}\n",
                    e.tree.valency,
                    words(&e.decisive),
                    words(&e.inconclusive),
                    e.disagreement.is_some()
                ));
            }
            json_doc(&e)
        }
        Command::Topo(cmd) => run_topo(cmd, cli.format),
    }
}

fn run_adv(cmd: &AdvCommand, text: bool) -> anyhow::Result<String> {
    match cmd {
        AdvCommand::Check { adversary: a } => {
            let v = classify(&adversary(a)?)?;
            if text {
                let verdict = if v.solvable { "solvable" } else { "obstruction" };
                return Ok(format!("{verdict} {:?}: {}\n", v.families, v.reason));
            }
            json_doc(&v)
        }
        AdvCommand::Witness { adversary: a } => {
            let w = select_forbidden_scenario(&classify(&adversary(a)?)?)?;
            if text {
                return Ok(format!("{w}\n"));
            }
            json_doc(&json!({"w": w.to_string(), "fair": w.is_fair()}))
        }
        AdvCommand::Lowerbound { adversary: a, rmax } => {
            let b = round_lower_bound(&adversary(a)?, *rmax)?;
            if text {
                let more = if b.saturated { "+" } else { "" };
                return Ok(format!("{}{more}\n", b.rounds));
            }
            json_doc(&b)
        }
        AdvCommand::Compile { adversary: a } => {
            let a = adversary(a)?;
            if text {
                return Ok(format!("{} states over {}\n", a.num_states(), a.alphabet()));
            }
            Ok(serde_json::to_string_pretty(&a.to_json())? + "\n")
        }
        AdvCommand::Connectivity { adversary: a } => {
            let c = limit_connectivity(&adversary(a)?)?;
            if text {
                return Ok(match &c {
                    Connectivity::Connected => "connected\n".into(),
                    Connectivity::Disconnected { gap, family, .. } => {
                        format!("disconnected at {} ({family:?})\n", format_rational(gap))
                    }
                });
            }
            json_doc(&c)
        }
    }
}

fn run_sim(cmd: &SimCommand, text: bool) -> anyhow::Result<String> {
    match cmd {
        SimCommand::Run {
            adversary: a,
            scenario,
            inputs: i,
            max_rounds,
            alg,
        } => {
            let a = a.as_deref().map(adversary).transpose()?;
            let scenario = lasso(scenario)?;
            if let Some(a) = &a {
                if !a.contains(&scenario)? {
                    return Err(cap_core::Error::Domain(format!(
                        "the scenario {scenario} is not in the adversary"
                    ))
                    .into());
                }
            }
            let algorithm = build_algorithm(alg, a.as_ref())?;
            let t = simulate(algorithm.as_ref(), &scenario, inputs(i)?, *max_rounds);
            if text {
                let o = &t.outcome;
                return Ok(format!(
                    "{} on {}: decisions {:?}, halting rounds {:?}\n",
                    t.algorithm, t.scenario, o.decisions, o.halting_rounds
                ));
            }
            json_doc(&t)
        }
        SimCommand::Verify {
            adversary: a,
            depth,
            max_rounds,
            alg,
        } => {
            let a = adversary(a)?;
            let algorithm = build_algorithm(alg, Some(&a))?;
            let cfg = VerifyConfig {
                max_rounds: *max_rounds,
                ..VerifyConfig::new(*depth)
            };
            let r = verify(algorithm.as_ref(), &a, &cfg)?;
            let output = if text {
                let mut s = format!(
                    "{} on {}: {} scenarios, {} runs, {} violations\n",
                    r.algorithm,
                    r.adversary,
                    r.scenarios,
                    r.runs,
                    r.violations.len()
                );
                for v in &r.violations {
                    s += &format!("  {:?} {} {:?}: {}\n", v.property, v.scenario, v.inputs, v.detail);
                }
                s
            } else {
                json_doc(&r)?
            };
            if !r.ok() {
                return Err(Reported {
                    output,
                    violations: r.violations.len(),
                }
                .into());
            }
            Ok(output)
        }
        SimCommand::Algorithms => {
            let reg = Registry::with_defaults();
            if text {
                return Ok(reg.names().map(|(n, d)| format!("{n:12} {d}\n")).collect());
            }
            let list: Vec<Value> = reg
                .names()
                .map(|(n, d)| json!({"name": n, "description": d}))
                .collect();
            json_doc(&json!({"algorithms": list}))
        }
    }
}

enum Built {
    Complex(Complex),
    Subdivision(Box<TerminatingSubdivision>, usize),
}

impl Built {
    fn complex(&self) -> Complex {
        match self {
            Built::Complex(c) => c.clone(),
            Built::Subdivision(ts, r) => ts.complex(*r),
        }
    }
}

fn build_complex(args: &ComplexArgs) -> anyhow::Result<Built> {
    let r = args.rounds;
    if r > 8 && !args.terminating {
        return Err(cap_core::Error::Resource(format!("{r} rounds exceeds 8")).into());
    }
    Ok(match (&args.adversary, args.terminating) {
        (None, _) => {
            let base = if args.square { input_square() } else { unit_segment() };
            Built::Complex(chr_power(&base, r))
        }
        (Some(a), false) => Built::Complex(protocol_complex(&adversary(a)?, r)?),
        (Some(a), true) => {
            let a = adversary(a)?;
            let Connectivity::Disconnected { gap, .. } = limit_connectivity(&a)? else {
                return Err(cap_core::Error::Domain(
                    "the adversary is an obstruction: there is no gap to subdivide around".into(),
                )
                .into());
            };
            let mut ts = TerminatingSubdivision::build(&a, &gap)?;
            ts.materialize(r)?;
            Built::Subdivision(Box::new(ts), r)
        }
    })
}

fn render(built: &Built, format: Format) -> anyhow::Result<String> {
    Ok(match (built, format) {
        (Built::Complex(c), Format::Svg) => complex_to_svg(c),
        (Built::Subdivision(ts, r), Format::Svg) => subdivision_to_svg(ts, *r)?,
        (Built::Complex(c), _) => serde_json::to_string_pretty(&complex_to_json(c))? + "\n",
        (Built::Subdivision(ts, _), _) => serde_json::to_string_pretty(&subdivision_to_json(ts))? + "\n",
    })
}

fn write_or_return(out: &Option<PathBuf>, built: &Built, format: Format) -> anyhow::Result<String> {
    match out {
        None => render(built, format),
        Some(path) => {
            let format = match path.extension().and_then(|e| e.to_str()) {
                Some("svg") => Format::Svg,
                Some("json") => Format::Json,
                _ => bail!("--out must end in .svg or .json"),
            };
            fs::write(path, render(built, format)?)
                .with_context(|| format!("writing {}", path.display()))?;
            Ok(String::new())
        }
    }
}

fn components_doc(c: &Complex, depth: usize, abs: bool, real: bool) -> Value {
    let both = !abs && !real;
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    if abs || both {
        doc.insert("abstract".into(), json!(abstract_components(c)));
    }
    if real || both {
        doc.insert("realization".into(), json!(realization_components(c, depth)));
    }
    Value::Object(doc)
}

fn run_topo(cmd: &TopoCommand, format: Format) -> anyhow::Result<String> {
    match cmd {
        TopoCommand::Subdivide { complex, out } => {
            let built = build_complex(complex)?;
            write_or_return(out, &built, format)
        }
        TopoCommand::Components {
            complex,
            abstract_only,
            realization_only,
        } => {
            let c = build_complex(complex)?.complex();
            let doc = components_doc(&c, complex.rounds, *abstract_only, *realization_only);
            if format == Format::Text {
                let mut s = String::new();
                for key in ["abstract", "realization"] {
                    if let Some(n) = doc.get(key) {
                        s += &format!("{key}: {n}\n");
                    }
                }
                return Ok(s);
            }
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
        TopoCommand::Contrex { depth, out } => {
            let ts = contrex(*depth)?;
            let built = Built::Subdivision(Box::new(ts), *depth);
            if out.is_some() || format == Format::Svg {
                return write_or_return(out, &built, format);
            }
            let doc = components_doc(&built.complex(), *depth, false, false);
            if format == Format::Text {
                return Ok(format!(
                    "abstract: {}\nrealization: {}\n",
                    doc["abstract"], doc["realization"]
                ));
            }
            Ok(serde_json::to_string_pretty(&doc)? + "\n")
        }
    }
}
