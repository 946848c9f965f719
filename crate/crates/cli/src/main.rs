//! `obsnet` command-line front end.
//!
//! Exit codes: 0 success, 2 infeasible input, 3 validation failure,
//! 4 I/O or format error. Nonzero exits write a JSON body to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use obsnet::analysis::{extract_cactus_certificate, validate_certificate, RobustCheck};
use obsnet::flow::weakest_sensor;
use obsnet::io;
use obsnet::realization::{instantiate_deterministic, DEFAULT_RETRIES};
use obsnet::robustness::failure_curve;
use obsnet::{
    design, instantiate_random, max_robustness, random_geometric, recover_initial_state,
    robust_structural_observability, simulate, CostModel, CurveConfig, Error, PrimeField, Recovery, Robustness,
    DEFAULT_PRIME,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "obsnet", version, about = "Robust structurally observable sensor network design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum-cost structure that survives up to k sensor failures.
    Design(DesignArgs),
    /// Check a design against every failure set of size at most k.
    Verify(VerifyArgs),
    /// Largest k the physical graph admits.
    MaxK(MaxKArgs),
    /// Numeric dynamics over GF(p) respecting a designed structure.
    Instantiate(InstantiateArgs),
    /// Output trace of a numeric system.
    Simulate(SimulateArgs),
    /// Initial state from an output trace.
    Recover(RecoverArgs),
    /// Monte Carlo failure probability curve.
    Robustness(RobustnessArgs),
    /// Random geometric physical graph.
    Generate(GenerateArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    output: PathBuf,
    /// Also write the used physical edges as DOT.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    k: usize,
    /// Write the cactus certificate of the intact structure as JSON.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct MaxKArgs {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct InstantiateArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PRIME)]
    prime: u64,
    #[arg(long, required_unless_present = "deterministic")]
    seed: Option<u64>,
    /// Closed-form values for branching structures instead of random draws.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    retries: usize,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    system: PathBuf,
    /// Comma-separated initial state.
    #[arg(long, value_delimiter = ',')]
    x0: Vec<u64>,
    #[arg(long)]
    steps: usize,
    /// Trace CSV destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct RobustnessArgs {
    #[arg(long, default_value_t = 50)]
    sensors: usize,
    #[arg(long, default_value_t = 3)]
    backbone: usize,
    /// Link radius on the unit square; the default links every pair.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    radius: f64,
    #[arg(long, default_value = "distance-squared", value_parser = parse_cost_model)]
    cost: CostModel,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 100)]
    graphs: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    sensors: usize,
    #[arg(long)]
    backbone: usize,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value = "distance-squared", value_parser = parse_cost_model)]
    cost: CostModel,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    dot: Option<PathBuf>,
}

fn parse_cost_model(s: &str) -> Result<CostModel, String> {
    CostModel::parse(s).ok_or_else(|| format!("unknown cost model `{s}`"))
}

/// A failed command: exit code plus the JSON diagnostic.
struct Failure {
    code: u8,
    body: Value,
}

impl Failure {
    fn new(code: u8, kind: &str, message: impl Into<String>) -> Self {
        Failure { code, body: json!({"error": kind, "message": message.into()}) }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::Infeasible { sensor, found, required } => Failure::new(2, "infeasible", message)
                .with("sensor", json!(sensor))
                .with("disjoint_paths", json!(found))
                .with("required", json!(required)),
            Error::UnreachableBackbone(q) => Failure::new(2, "infeasible", message).with("backbone", json!(q)),
            Error::EnumerationBound { size, limit } => Failure::new(2, "enumeration_bound", message)
                .with("size", json!(size))
                .with("limit", json!(limit)),
            Error::RedrawBudget { attempts } => {
                Failure::new(2, "infeasible", message).with("attempts", json!(attempts))
            }
            Error::NotStructurallyObservable
            | Error::NotBranching(_)
            | Error::FieldTooSmall { .. }
            | Error::RootUnreachable(_) => Failure::new(2, "infeasible", message),
            Error::RetriesExhausted { trials } => {
                Failure::new(3, "retries_exhausted", message).with("trials", json!(trials))
            }
            Error::InconsistentTrace => Failure::new(3, "inconsistent_trace", message),
            Error::Internal(_) => Failure::new(3, "internal", message),
            Error::Io(_) => Failure::new(4, "io", message),
            _ => Failure::new(4, "format", message),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(4, "io", format!("{}: {e}", path.display())).with("path", json!(path)))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(4, "io", format!("{}: {e}", path.display())).with("path", json!(path)))
}

fn cmd_design(a: DesignArgs) -> CmdResult {
    let g = io::parse_physical_graph(&read(&a.input)?)?;
    let sol = design(&g, a.k)?;
    write(&a.output, &io::to_pretty(&io::design_to_json(&sol)))?;
    if let Some(dot) = &a.dot {
        write(dot, &io::design_to_dot(&g, &sol))?;
    }
    let used = sol.structure.output_index().iter().enumerate().filter(|&(r, _)| sol.structure.output_used(r)).count();
    println!("k: {}", sol.k);
    println!("outputs used: {used}");
    println!("cost_per_output_sum: {}", sol.cost_per_output_sum.to_decimal());
    println!("cost_deduplicated: {}", sol.cost_deduplicated.to_decimal());
    if sol.costs_disagree() {
        println!("note: outputs share backbone edges, the readings differ");
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let sol = io::parse_design(&read(&a.design)?)?;
    if let Some(path) = &a.certificate {
        let cert = extract_cactus_certificate(&sol.structure);
        validate_certificate(&sol.structure, &cert).map_err(|m| Failure::new(3, "certificate", m))?;
        write(path, &io::to_pretty(&io::certificate_to_json(&sol.sensors, &cert)))?;
    }
    match robust_structural_observability(&sol.structure, a.k)? {
        RobustCheck::Robust => {
            println!("robust: structurally observable under every failure of at most {} sensors", a.k);
            Ok(())
        }
        RobustCheck::Counterexample(u) => {
            let names: Vec<&str> = u.states.iter().map(|&i| sol.sensors[i].as_str()).collect();
            println!("not robust: failing set {{{}}}", names.join(", "));
            Err(Failure::new(3, "not_robust", format!("structural observability lost when {{{}}} fail", names.join(", ")))
                .with("counterexample", json!(names)))
        }
    }
}

fn cmd_max_k(a: MaxKArgs) -> CmdResult {
    let g = io::parse_physical_graph(&read(&a.input)?)?;
    match max_robustness(&g) {
        Robustness::Max(k) => {
            println!("{k}");
            Ok(())
        }
        Robustness::Infeasible => {
            println!("infeasible");
            let (x, found) = weakest_sensor(&g);
            Err(Failure::new(2, "infeasible", "some sensor has no route to the fusion center")
                .with("sensor", json!(g.sensor_names()[x]))
                .with("disjoint_paths", json!(found)))
        }
    }
}

fn cmd_instantiate(a: InstantiateArgs) -> CmdResult {
    let sol = io::parse_design(&read(&a.design)?)?;
    let field = PrimeField::new(a.prime)?;
    let (system, trials) = if a.deterministic {
        (instantiate_deterministic(&sol.structure, field)?, 1)
    } else {
        let inst = instantiate_random(&sol.structure, field, a.seed.unwrap_or_default(), a.retries)?;
        (inst.system, inst.trials)
    };
    write(&a.output, &io::to_pretty(&io::system_to_json(&system)))?;
    println!("instantiated {} states, {} outputs over GF({}) in {trials} trial(s)", system.n_states(), system.n_outputs(), a.prime);
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let sys = io::parse_system(&read(&a.system)?)?;
    let trace = simulate(&sys, &a.x0, a.steps)?;
    let csv = io::trace_to_csv(&trace, sys.n_outputs());
    match &a.output {
        Some(path) => {
            write(path, &csv)?;
            println!("wrote {} steps", trace.len());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_recover(a: RecoverArgs) -> CmdResult {
    let sys = io::parse_system(&read(&a.system)?)?;
    let trace = io::parse_trace(&read(&a.trace)?)?;
    match recover_initial_state(&sys, &trace)? {
        Recovery::State(x) => {
            println!("{}", x.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
            Ok(())
        }
        Recovery::Unobservable => {
            println!("unobservable");
            Err(Failure::new(2, "unobservable", "observability matrix over the trace horizon is rank deficient"))
        }
    }
}

fn cmd_robustness(a: RobustnessArgs) -> CmdResult {
    let cfg = CurveConfig {
        n_sensors: a.sensors,
        n_backbone: a.backbone,
        radius: a.radius,
        cost_model: a.cost,
        k: a.k,
        n_graphs: a.graphs,
        n_trials: a.trials,
        seed: a.seed,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads.unwrap_or(0))
        .build()
        .map_err(|e| Failure::new(4, "threads", e.to_string()))?;
    let curve = pool.install(|| failure_curve(&cfg))?;
    write(&a.output, &curve.to_csv())?;
    println!("{} points, {} graphs x {} trials, {} redraws", curve.points.len(), a.graphs, a.trials, curve.redraws);
    for p in &curve.points {
        println!("l={:>3} prob={:.4}", p.l, p.probability());
    }
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> CmdResult {
    let g = random_geometric(a.sensors, a.backbone, a.radius, a.cost, a.seed)?;
    write(&a.output, &io::to_pretty(&io::graph_to_json(&g)))?;
    if let Some(dot) = &a.dot {
        write(dot, &io::graph_to_dot(&g))?;
    }
    println!("{} sensors, {} backbone, {} edges", g.n_sensors(), g.n_backbone(), g.edges().len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = json!({"error": "usage", "message": e.to_string().trim_end()});
            eprintln!("{body}");
            return ExitCode::from(4);
        }
    };
    let result = match cli.command {
        Command::Design(a) => cmd_design(a),
        Command::Verify(a) => cmd_verify(a),
        Command::MaxK(a) => cmd_max_k(a),
        Command::Instantiate(a) => cmd_instantiate(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Recover(a) => cmd_recover(a),
        Command::Robustness(a) => cmd_robustness(a),
        Command::Generate(a) => cmd_generate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let mut body = f.body;
            body["code"] = json!(f.code);
            eprintln!("{body}");
            ExitCode::from(f.code)
        }
    }
}
