//! Command-line front end. All substance lives in the library; this binary
//! parses flags, wires files to library calls, and maps outcomes to exit
//! codes: 0 when the run (and any stated expectation) succeeded, 1 when an
//! expectation failed, 2 for usage or validation errors.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use locc_sim::builders::{
    attach_resource, build_assisted_tree_for, build_extended_tree, build_hadamard_tree,
    build_nonmax_tree, build_teleportation_tree, epr,
};
use locc_sim::entangle::{
    average_entanglement, entanglement_entropy, mc_assisted_discrimination, schmidt_rank,
    vidal_probability, McConfig,
};
use locc_sim::families::{
    gen_canonical_set, gen_hadamard_set_4x4, gen_nonmax_set, Family, NonMaxParams, StateSet,
};
use locc_sim::io::{
    read_protocol, read_set, read_state, report_to_json, set_to_json, write_report_csv,
    LoadedProtocol,
};
use locc_sim::protocol::{verify_perfect_discrimination, DiscriminationReport, ProtocolTree};
use locc_sim::state::StateVector;
use locc_sim::witness::{certify_2x2, search_numeric, SearchConfig, WitnessProblem};
use locc_sim::{Error, Result};

/// Environment variable naming the directory default output paths land in.
const OUT_DIR_ENV: &str = "LOCC_SIM_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "locc-sim",
    version,
    about = "Local discrimination of bipartite state sets with entangled resources"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a state set file.
    Gen(GenArgs),
    /// Run a discrimination protocol against a set and score it.
    Run(RunArgs),
    /// Decide conclusive identifiability of set members.
    Identify(IdentifyArgs),
    /// Report entanglement measures of set members.
    Entanglement(EntanglementArgs),
    /// Monte Carlo estimate of discrimination assisted by a partially
    /// entangled resource.
    Mc(McArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Family to generate: canonical, hadamard4, or nonmax.
    #[arg(long)]
    family: String,
    /// Set size parameter for the canonical family (d entangled members on
    /// qudits plus one product member).
    #[arg(long)]
    d: Option<usize>,
    /// Eight nonmax weights a,b,c,d,e,f,g,h with a²+b²=c²+d²=e²+f²=g²+h²=1.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// Four angles in (0, π/2) giving nonmax weights (cos t, sin t) per pair.
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<f64>>,
    /// Keep only these member indices (0-based, comma separated).
    #[arg(long, value_delimiter = ',')]
    subset: Option<Vec<usize>>,
    /// Grow the set by the product ket at these indices a,b.
    #[arg(long, value_delimiter = ',')]
    extend: Option<Vec<usize>>,
    /// Output path, or - for stdout. Defaults to set.json in the output
    /// directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Set file produced by gen, or - for stdin.
    #[arg(long)]
    set: PathBuf,
    /// Resource attached to each input: epr, none, diag:l1,l2 for a qubit
    /// pair with those squared Schmidt coefficients, or a state file path.
    #[arg(long, default_value = "epr")]
    resource: String,
    /// Protocol: auto, assisted, hadamard, nonmax, extended, teleportation,
    /// or a protocol file path.
    #[arg(long, default_value = "auto")]
    protocol: String,
    /// Exit 1 unless every member is identified with certainty.
    #[arg(long)]
    expect_perfect: bool,
    /// JSON report path, or - for stdout. Defaults to report.json in the
    /// output directory.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// CSV summary path, or - for stdout. Defaults to report.csv in the
    /// output directory.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args)]
struct IdentifyArgs {
    /// Set file produced by gen, or - for stdin.
    #[arg(long)]
    set: PathBuf,
    /// Member index to test; omit to test every member.
    #[arg(long)]
    index: Option<usize>,
    /// Random Alice-side samples for the numeric search.
    #[arg(long, default_value_t = SearchConfig::default().samples)]
    samples: usize,
    /// Search stream seed.
    #[arg(long, default_value_t = SearchConfig::default().seed)]
    seed: u64,
    /// Descent iterations per polished candidate.
    #[arg(long, default_value_t = SearchConfig::default().polish_iterations)]
    polish_iterations: usize,
    /// How many shortlisted candidates to polish.
    #[arg(long, default_value_t = SearchConfig::default().polish_starts)]
    polish_starts: usize,
    /// Verdict path, or - for stdout. Defaults to verdict.json in the output
    /// directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EntanglementArgs {
    /// Set file produced by gen, or - for stdin.
    #[arg(long)]
    set: PathBuf,
    /// JSON report path, or - for stdout. Defaults to entanglement.json in
    /// the output directory.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// CSV summary path, or - for stdout. Defaults to entanglement.csv in
    /// the output directory.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    /// Set file produced by gen, or - for stdin.
    #[arg(long)]
    set: PathBuf,
    /// Resource gambled each trial: epr, diag:l1,l2, or a state file path.
    /// Must be a Schmidt rank 2 qubit pair.
    #[arg(long, default_value = "epr")]
    resource: String,
    /// Protocol built per run: auto, assisted, hadamard, nonmax, or
    /// extended.
    #[arg(long, default_value = "auto")]
    protocol: String,
    /// Number of trials.
    #[arg(long, default_value_t = McConfig::default().trials)]
    trials: usize,
    /// Trial stream seed.
    #[arg(long, default_value_t = McConfig::default().seed)]
    seed: u64,
    /// Report path, or - for stdout. Defaults to mc.json in the output
    /// directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Identify(args) => cmd_identify(args),
        Command::Entanglement(args) => cmd_entanglement(args),
        Command::Mc(args) => cmd_mc(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/* Shared plumbing ************************************************************/

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
}

fn resolve_out(explicit: Option<PathBuf>, default_name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| out_dir().join(default_name))
}

fn open_sink(path: &Path) -> Result<Box<dyn Write>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdout().lock()))
    } else {
        Ok(Box::new(File::create(path)?))
    }
}

fn open_source(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        Ok(Box::new(io::stdin().lock()))
    } else {
        Ok(Box::new(File::open(path)?))
    }
}

fn load_set(path: &Path) -> Result<StateSet> {
    read_set(open_source(path)?)
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Reports wear a small envelope: a timestamp, the command, and the echoed
/// configuration. Everything below the timestamp is deterministic.
fn envelope(command: &str, config: Value, key: &str, payload: Value) -> Value {
    json!({ "timestamp": unix_now(), "command": command, "config": config, key: payload })
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut sink = open_sink(path)?;
    serde_json::to_writer_pretty(&mut sink, value)?;
    sink.write_all(b"\n")?;
    Ok(())
}

fn parse_resource(spec: &str) -> Result<Option<StateVector>> {
    if spec == "none" {
        return Ok(None);
    }
    if spec == "epr" {
        return Ok(Some(epr()));
    }
    if let Some(rest) = spec.strip_prefix("diag:") {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidParameter(format!("bad diag weight \"{p}\""))
                })
            })
            .collect::<Result<_>>()?;
        if parts.len() != 2 {
            return Err(Error::InvalidParameter(
                "diag resource needs exactly two weights".into(),
            ));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || parts.iter().any(|&l| l <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diag weights must be positive and sum to 1, got {parts:?}"
            )));
        }
        let state = StateVector::from_terms(
            2,
            2,
            &[
                (0, 0, C64::new(parts[0].sqrt(), 0.0)),
                (1, 1, C64::new(parts[1].sqrt(), 0.0)),
            ],
        )?;
        return Ok(Some(state));
    }
    Ok(Some(read_state(open_source(Path::new(spec))?)?))
}

fn builtin_builder(name: &str, set: &StateSet) -> Result<ProtocolTree> {
    match name {
        "assisted" => build_assisted_tree_for(set),
        "hadamard" => build_hadamard_tree(),
        "nonmax" => build_nonmax_tree(set),
        "extended" => build_extended_tree(set),
        "teleportation" => build_teleportation_tree(set),
        "auto" => match set.family() {
            Family::Hadamard4 => build_hadamard_tree(),
            Family::NonMax(_) => build_nonmax_tree(set),
            Family::Extended { .. } => build_extended_tree(set),
            Family::Canonical { .. } | Family::Custom => build_assisted_tree_for(set),
        },
        other => Err(Error::InvalidParameter(format!("unknown protocol \"{other}\""))),
    }
}

const BUILTIN_PROTOCOLS: [&str; 6] =
    ["auto", "assisted", "hadamard", "nonmax", "extended", "teleportation"];

/* Subcommands ****************************************************************/

fn cmd_gen(args: GenArgs) -> Result<bool> {
    let mut set = match args.family.as_str() {
        "canonical" | "two-qubit" => {
            let d = match (args.family.as_str(), args.d) {
                ("two-qubit", None | Some(2)) => 2,
                ("two-qubit", Some(d)) => {
                    return Err(Error::InvalidParameter(format!(
                        "two-qubit fixes --d 2, got {d}"
                    )))
                }
                (_, Some(d)) => d,
                (_, None) => {
                    return Err(Error::InvalidParameter(
                        "the canonical family needs --d".into(),
                    ))
                }
            };
            gen_canonical_set(d)?
        }
        "hadamard4" => gen_hadamard_set_4x4()?,
        "nonmax" => {
            let params = match (args.weights, args.angles) {
                (Some(w), None) => {
                    if w.len() != 8 {
                        return Err(Error::InvalidParameter(format!(
                            "--weights needs 8 values, got {}",
                            w.len()
                        )));
                    }
                    NonMaxParams::new(w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7])?
                }
                (None, Some(t)) => {
                    if t.len() != 4 {
                        return Err(Error::InvalidParameter(format!(
                            "--angles needs 4 values, got {}",
                            t.len()
                        )));
                    }
                    NonMaxParams::from_angles(t[0], t[1], t[2], t[3])?
                }
                (None, None) => NonMaxParams::symmetric(),
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidParameter(
                        "--weights and --angles are mutually exclusive".into(),
                    ))
                }
            };
            gen_nonmax_set(params)?
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown family \"{other}\"; choose canonical, two-qubit, hadamard4, or nonmax"
            )))
        }
    };
    if let Some(indices) = args.subset {
        set = set.subset(&indices)?;
    }
    if let Some(ket) = args.extend {
        if ket.len() != 2 {
            return Err(Error::InvalidParameter("--extend needs two indices a,b".into()));
        }
        set = set.extend_with_product((ket[0], ket[1]))?;
    }
    let out = resolve_out(args.out, "set.json");
    write_json(&out, &set_to_json(&set))?;
    eprintln!("wrote a {} member {}x{} set to {}", set.len(), set.dim_a(), set.dim_b(), out.display());
    Ok(true)
}

fn cmd_run(args: RunArgs) -> Result<bool> {
    let set = load_set(&args.set)?;
    let resource = parse_resource(&args.resource)?;
    let inputs = match &resource {
        Some(r) => attach_resource(&set, r)?,
        None => set.clone(),
    };
    let (protocol, protocol_name): (LoadedProtocol, String) =
        if BUILTIN_PROTOCOLS.contains(&args.protocol.as_str()) {
            let tree = builtin_builder(&args.protocol, &set)?;
            (LoadedProtocol::Tree(tree), args.protocol.clone())
        } else {
            let loaded = read_protocol(open_source(Path::new(&args.protocol))?)?;
            (loaded, args.protocol.clone())
        };
    let report: DiscriminationReport = verify_perfect_discrimination(&protocol, &inputs)?;

    let config = json!({
        "set": args.set.display().to_string(),
        "resource": args.resource,
        "protocol": protocol_name,
        "expect_perfect": args.expect_perfect,
    });
    let value = envelope("run", config, "report", report_to_json(&report));
    let out_json = resolve_out(args.out_json, "report.json");
    write_json(&out_json, &value)?;
    let out_csv = resolve_out(args.out_csv, "report.csv");
    write_report_csv(open_sink(&out_csv)?, &report)?;
    eprintln!(
        "perfect: {}  any_error: {}  inputs: {}  ({}, {})",
        report.perfect,
        report.any_error,
        report.inputs.len(),
        out_json.display(),
        out_csv.display()
    );
    Ok(!args.expect_perfect || report.perfect)
}

fn cmd_identify(args: IdentifyArgs) -> Result<bool> {
    let set = load_set(&args.set)?;
    let config = SearchConfig {
        samples: args.samples,
        polish_iterations: args.polish_iterations,
        polish_starts: args.polish_starts,
        seed: args.seed,
    };
    let certified = set.dim_a() == 2 && set.dim_b() == 2 && set.len() == 3;
    let targets: Vec<usize> = match args.index {
        Some(i) => vec![i],
        None => (0..set.len()).collect(),
    };
    let mut verdicts = Vec::with_capacity(targets.len());
    for target in targets {
        let problem = WitnessProblem::new(&set, target)?;
        let verdict = if certified {
            certify_2x2(&problem)?
        } else {
            search_numeric(&problem, &config)?
        };
        verdicts.push(verdict);
    }
    for v in &verdicts {
        eprintln!(
            "member {}: {}  (max overlap {:.3e}, samples {})",
            v.target,
            match v.status {
                locc_sim::witness::IdentifyStatus::Identifiable => "identifiable",
                locc_sim::witness::IdentifyStatus::NotIdentifiableCertified => {
                    "not identifiable (certified)"
                }
                locc_sim::witness::IdentifyStatus::NotIdentifiableNumerical => {
                    "not identifiable (numerical)"
                }
            },
            v.max_overlap,
            v.samples
        );
    }
    let echo = json!({
        "set": args.set.display().to_string(),
        "index": args.index,
        "samples": args.samples,
        "seed": args.seed,
        "polish_iterations": args.polish_iterations,
        "polish_starts": args.polish_starts,
        "route": if certified { "certified" } else { "numerical" },
    });
    let payload = serde_json::to_value(&verdicts)?;
    let out = resolve_out(args.out, "verdict.json");
    write_json(&out, &envelope("identify", echo, "verdicts", payload))?;
    Ok(true)
}

fn cmd_entanglement(args: EntanglementArgs) -> Result<bool> {
    let set = load_set(&args.set)?;
    let per_state: Vec<Value> = set
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "index": i,
                "entropy": entanglement_entropy(s),
                "schmidt_rank": schmidt_rank(s),
                "vidal_probability": vidal_probability(s),
            })
        })
        .collect();
    let average = average_entanglement(&set);
    let config = json!({ "set": args.set.display().to_string() });
    let payload = json!({ "per_state": per_state, "average": average });
    let out_json = resolve_out(args.out_json, "entanglement.json");
    write_json(&out_json, &envelope("entanglement", config, "entanglement", payload))?;

    let out_csv = resolve_out(args.out_csv, "entanglement.csv");
    let mut csv = csv::Writer::from_writer(open_sink(&out_csv)?);
    csv.write_record(["index", "entropy", "schmidt_rank", "vidal_probability"])?;
    for (i, s) in set.states().iter().enumerate() {
        csv.write_record([
            i.to_string(),
            entanglement_entropy(s).to_string(),
            schmidt_rank(s).to_string(),
            vidal_probability(s).to_string(),
        ])?;
    }
    csv.write_record(["average", &average.to_string(), "", ""])?;
    csv.flush()?;
    eprintln!("average entanglement: {average} bits ({}, {})", out_json.display(), out_csv.display());
    Ok(true)
}

fn cmd_mc(args: McArgs) -> Result<bool> {
    let set = load_set(&args.set)?;
    let resource = parse_resource(&args.resource)?.ok_or_else(|| {
        Error::InvalidParameter("mc needs an entangled resource, not \"none\"".into())
    })?;
    if args.protocol == "teleportation" {
        return Err(Error::InvalidParameter(
            "the teleportation protocol consumes the resource differently; choose another".into(),
        ));
    }
    let name = args.protocol.clone();
    let config = McConfig { trials: args.trials, seed: args.seed };
    let report = mc_assisted_discrimination(&set, &resource, &config, &move |s| {
        builtin_builder(&name, s)
    })?;
    eprintln!(
        "estimate: {:.4} +- {:.4}  successes: {}  inconclusive: {}  errors: {}",
        report.estimate,
        report.standard_error,
        report.successes,
        report.inconclusive,
        report.errors
    );
    let echo = json!({
        "set": args.set.display().to_string(),
        "resource": args.resource,
        "protocol": args.protocol,
        "trials": args.trials,
        "seed": args.seed,
    });
    let payload = serde_json::to_value(&report)?;
    let out = resolve_out(args.out, "mc.json");
    write_json(&out, &envelope("mc", echo, "mc", payload))?;
    Ok(true)
}
