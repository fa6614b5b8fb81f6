//! Command-line front end: stability verdicts, graph export, exact ratios,
//! simulation, and brute-force cross-checks over network documents.
//!
//! Exit codes: 0 success (and "property holds" where applicable), 1 usage
//! error, 2 unreadable or invalid network document, 3 oracle mismatch,
//! 4 resource cap exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use ldstab::error::Error;
use ldstab::invariant::{lris, lris_bruteforce_capped, DEFAULT_BRUTEFORCE_CAP};
use ldstab::lds::{Network, SwitchingSignal};
use ldstab::oracle;
use ldstab::reach::{self, decimal_string, stg_dot, DotHighlights, LabeledPath};
use ldstab::stability::{
    self, analyze, first_saturation_step, StabilityReport, Witness, WitnessKind,
};
use ldstab::{parse_network, StateSet};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_MISMATCH: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ldstab",
    version,
    about = "Set-stability analysis of switched logic dynamical systems",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide all four stability notions and print verdicts with witnesses
    Analyze(AnalyzeArgs),
    /// Export the state transition graph as DOT
    Stg(StgArgs),
    /// Exact k-step reachable-pattern ratios
    Ratio(RatioArgs),
    /// Cross-check matrix powers against brute-force word enumeration
    Oracle(OracleArgs),
    /// Run one trajectory under a fixed or random switching signal
    Simulate(SimulateArgs),
    /// Largest robustly invariant subset of the target
    Lris(LrisArgs),
    /// Reachability queries, closure matrices, and shortest paths
    Reach(ReachArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Target set as comma-separated state indices; overrides the document
    #[arg(long, value_name = "LIST")]
    target: Option<String>,
    /// Output format
    #[arg(long, value_parser = ["text", "json"], default_value = "text")]
    format: String,
}

#[derive(Args)]
struct StgArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Output path, or - for stdout
    #[arg(short, long, value_name = "PATH", default_value = "-")]
    output: PathBuf,
    /// Target set as comma-separated state indices; overrides the document
    #[arg(long, value_name = "LIST")]
    target: Option<String>,
    /// Fill the target states
    #[arg(long)]
    highlight_target: bool,
    /// Outline the self-reachable states
    #[arg(long)]
    highlight_c0: bool,
    /// Double-border the largest robustly invariant subset of the target
    #[arg(long)]
    highlight_lris: bool,
}

#[derive(Args)]
struct RatioArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Word length
    #[arg(long)]
    k: usize,
    /// Initial state; omit for all initial states
    #[arg(long)]
    x0: Option<usize>,
    /// Target set as comma-separated state indices; overrides the document
    #[arg(long, value_name = "LIST")]
    target: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Word length
    #[arg(long)]
    k: usize,
    /// Cap on the number of enumerated words (m^k)
    #[arg(long, default_value_t = oracle::DEFAULT_PATTERN_CAP)]
    cap: u128,
}

#[derive(Args)]
struct SimulateArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Initial state
    #[arg(long)]
    x0: usize,
    /// Fixed switching signal as comma-separated subnetwork indices
    #[arg(long, value_name = "LIST", conflicts_with = "random")]
    signal: Option<String>,
    /// Draw the signal uniformly at random instead
    #[arg(long)]
    random: bool,
    /// Number of steps; defaults to the signal length
    #[arg(long)]
    steps: Option<usize>,
    /// Seed for --random
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct LrisArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Target set as comma-separated state indices; overrides the document
    #[arg(long, value_name = "LIST")]
    target: Option<String>,
    /// Also run the exponential subset search and compare
    #[arg(long)]
    bruteforce: bool,
    /// Cap on |target| for --bruteforce
    #[arg(long, default_value_t = DEFAULT_BRUTEFORCE_CAP)]
    cap: usize,
}

#[derive(Args)]
struct ReachArgs {
    /// Network document (JSON)
    input: PathBuf,
    /// Source state for a point query
    #[arg(long, requires = "to")]
    from: Option<usize>,
    /// Destination state for a point query
    #[arg(long, requires = "from")]
    to: Option<usize>,
    /// Exact step count for the point query, or matrix power to print
    #[arg(long)]
    k: Option<usize>,
    /// Print the weighted reachability matrix instead of the Boolean one
    #[arg(long)]
    weighted: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Json(_) | Error::InvalidNetwork(_) => EXIT_PARSE,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the read end of a pipe closes, like other filters do
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Stg(args) => cmd_stg(args),
        Command::Ratio(args) => cmd_ratio(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Lris(args) => cmd_lris(args),
        Command::Reach(args) => cmd_reach(args),
    }
}

fn load_network(path: &Path) -> Result<Network, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_network(&text)?)
}

fn parse_index_list(text: &str, what: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Failure::usage(format!("{what} entry {s:?} is not a state index")))
        })
        .collect()
}

/// The target set in effect: the --target flag wins over the document.
fn resolve_target(net: &Network, flag: &Option<String>) -> Result<StateSet, Failure> {
    match flag {
        Some(list) => {
            let indices = parse_index_list(list, "--target")?;
            StateSet::new(net.lds.state_count(), indices).map_err(|e| Failure::usage(e.to_string()))
        }
        None => net.target.clone().ok_or_else(|| {
            Failure::usage("no target set: pass --target or include \"target\" in the document")
        }),
    }
}

fn display_name(net: &Network) -> &str {
    net.name.as_deref().unwrap_or("network")
}

fn set_string(indices: &[usize]) -> String {
    let mut s = String::from("{");
    for (pos, i) in indices.iter().enumerate() {
        if pos > 0 {
            s.push(',');
        }
        let _ = write!(s, "{i}");
    }
    s.push('}');
    s
}

fn witness_text(witness: &Witness) -> String {
    let path = witness
        .path
        .as_ref()
        .map(|p: &LabeledPath| format!(" via {p}"))
        .unwrap_or_default();
    match witness.kind {
        WitnessKind::SelfReachableInComplement => format!(
            "state {} outside the set loops back to itself{path}",
            witness.states[0]
        ),
        WitnessKind::ComplementReachableFromC0 => format!(
            "state {} outside the target is reachable from self-reachable state {}{path}",
            witness.states[1], witness.states[0]
        ),
        WitnessKind::NoPathToLris => format!(
            "state {} has no path into the invariant core",
            witness.states[0]
        ),
    }
}

fn verdict_line(label: &str, holds: bool, witness: &Option<Witness>) -> String {
    match witness {
        Some(w) if !holds => format!("{label:<28} FAIL  {}", witness_text(w)),
        _ if holds => format!("{label:<28} PASS"),
        _ => format!("{label:<28} FAIL"),
    }
}

fn render_report(net: &Network, target: &StateSet, report: &StabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "network: {} (n={}, m={})",
        display_name(net),
        net.lds.state_count(),
        net.lds.subnetwork_count()
    );
    let _ = writeln!(out, "target M: {target}");
    let _ = writeln!(
        out,
        "self-reachable set C0: {}",
        set_string(&report.self_reachable)
    );
    let _ = writeln!(
        out,
        "largest robustly invariant subset I(M): {}",
        set_string(&report.lris)
    );
    let _ = writeln!(
        out,
        "{}",
        verdict_line("robust:", report.robust, &report.witnesses.robust)
    );
    let _ = writeln!(
        out,
        "{}",
        verdict_line("uniform:", report.uniform, &report.witnesses.uniform)
    );
    let _ = writeln!(
        out,
        "{}",
        verdict_line(
            "asymptotic ratio-one:",
            report.asymptotic_ratio_one,
            &report.witnesses.asymptotic_ratio_one
        )
    );
    let _ = writeln!(
        out,
        "{}",
        verdict_line(
            "finite-time ratio-one:",
            report.finite_time_ratio_one,
            &report.witnesses.finite_time_ratio_one
        )
    );
    let _ = writeln!(
        out,
        "{}",
        verdict_line(
            "robust w.r.t. I(M):",
            report.robust_wrt_lris,
            &report.witnesses.robust_wrt_lris
        )
    );
    let c = report.consistency();
    let _ = writeln!(
        out,
        "consistency: uniform=>robust {}; robust=>asymptotic {}; uniform<=>finite-time {}; uniform<=>robust-wrt-I(M) {}",
        ok(c.uniform_implies_robust),
        ok(c.robust_implies_asymptotic),
        ok(c.uniform_iff_finite_time),
        ok(c.uniform_iff_robust_wrt_lris),
    );
    out
}

fn ok(flag: bool) -> &'static str {
    if flag {
        "OK"
    } else {
        "BROKEN"
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8, Failure> {
    let net = load_network(&args.input)?;
    let target = resolve_target(&net, &args.target)?;
    let report = analyze(&net.lds, &target)?;
    if args.format == "json" {
        println!("{}", report.to_json());
    } else {
        print!("{}", render_report(&net, &target, &report));
    }
    Ok(0)
}

fn cmd_stg(args: StgArgs) -> Result<u8, Failure> {
    let net = load_network(&args.input)?;
    // resolve highlight sets before rendering so bad flags fail cleanly
    let target = if args.highlight_target || args.highlight_lris {
        Some(resolve_target(&net, &args.target)?)
    } else {
        None
    };
    let lris_set = if args.highlight_lris {
        Some(lris(&net.lds, target.as_ref().expect("resolved above")))
    } else {
        None
    };
    let c0 = if args.highlight_c0 {
        Some(reach::self_reachable_set(&net.lds))
    } else {
        None
    };
    let dot = stg_dot(
        &net.lds,
        net.name.as_deref(),
        DotHighlights {
            target: target.as_ref().filter(|_| args.highlight_target),
            self_reachable: c0.as_ref(),
            lris: lris_set.as_ref(),
        },
    );
    if args.output == Path::new("-") {
        print!("{dot}");
    } else {
        std::fs::write(&args.output, dot)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", args.output.display())))?;
    }
    Ok(0)
}

fn cmd_ratio(args: RatioArgs) -> Result<u8, Failure> {
    if args.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let net = load_network(&args.input)?;
    let target = resolve_target(&net, &args.target)?;
    println!(
        "network: {} (m={}), target M: {target}, k={}",
        display_name(&net),
        net.lds.subnetwork_count(),
        args.k
    );
    match args.x0 {
        Some(x0) => {
            let value = stability::ratio(&net.lds, x0, &target, args.k)?;
            println!("x0={x0}: {} = {}", value, decimal_string(&value, 6));
        }
        None => {
            let vector = stability::ratio_vector(&net.lds, &target, args.k);
            for x0 in 1..=net.lds.state_count() {
                let value = vector.value(x0);
                println!("x0={x0}: {} = {}", value, decimal_string(value, 6));
            }
            if vector.all_one() {
                if let Some(first) = first_saturation_step(&net.lds, &target, args.k) {
                    println!("every initial state is at ratio 1; first saturation at k={first}");
                }
            }
        }
    }
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8, Failure> {
    if args.k == 0 {
        return Err(Failure::usage("--k must be at least 1"));
    }
    let net = load_network(&args.input)?;
    let report = oracle::verify_counts_capped(&net.lds, args.k, args.cap)?;
    let n = net.lds.state_count();
    let words = BigInt::from(net.lds.subnetwork_count()).pow(args.k as u32);
    if report.equal {
        println!(
            "k={}: enumerated {words} words per initial state; all {n}x{n} counts match the matrix power",
            args.k
        );
        Ok(0)
    } else {
        let m = report
            .first_mismatch
            .expect("unequal reports carry a mismatch");
        println!(
            "k={}: MISMATCH at ({}, {}): enumerated {} vs matrix power {}",
            args.k, m.row, m.col, m.enumerated, m.matrix_power
        );
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<u8, Failure> {
    let net = load_network(&args.input)?;
    let trajectory = if args.random {
        let steps = args
            .steps
            .ok_or_else(|| Failure::usage("--random needs --steps"))?;
        let m = net.lds.subnetwork_count();
        let uniform = vec![BigRational::new(BigInt::one(), BigInt::from(m)); m];
        oracle::simulate_random(&net.lds, args.x0, &uniform, steps, args.seed)?
    } else {
        let Some(signal_text) = args.signal else {
            return Err(Failure::usage("pass --signal or --random"));
        };
        let word = parse_index_list(&signal_text, "--signal")?;
        if word.is_empty() {
            return Err(Failure::usage("--signal must name at least one subnetwork"));
        }
        let steps = args.steps.unwrap_or(word.len());
        net.lds
            .trajectory(args.x0, &SwitchingSignal::Finite(word), steps)?
    };
    let line: Vec<String> = trajectory
        .states()
        .iter()
        .map(ToString::to_string)
        .collect();
    println!("{}", line.join(" "));
    Ok(0)
}

fn cmd_lris(args: LrisArgs) -> Result<u8, Failure> {
    let net = load_network(&args.input)?;
    let target = resolve_target(&net, &args.target)?;
    let core = lris(&net.lds, &target);
    println!("target M: {target}");
    println!("largest robustly invariant subset I(M): {core}");
    if args.bruteforce {
        let brute = lris_bruteforce_capped(&net.lds, &target, args.cap)?;
        println!("brute-force union of invariant subsets: {brute}");
        if brute != core {
            println!("MISMATCH between the fixpoint and brute-force routes");
            return Ok(EXIT_MISMATCH);
        }
        println!("both routes agree");
    }
    Ok(0)
}

fn cmd_reach(args: ReachArgs) -> Result<u8, Failure> {
    if let Some(k) = args.k {
        if k == 0 {
            return Err(Failure::usage("--k must be at least 1"));
        }
    }
    let net = load_network(&args.input)?;
    let n = net.lds.state_count();
    match (args.from, args.to) {
        (Some(from), Some(to)) => {
            let reachable = reach::is_reachable(&net.lds, from, to, args.k)?;
            match args.k {
                Some(k) => {
                    let count = reach::count_matrix_power(&net.lds, k)
                        .entry(to, from)
                        .clone();
                    let words = BigInt::from(net.lds.subnetwork_count()).pow(k as u32);
                    println!(
                        "{to} reachable from {from} in exactly {k} steps: {} ({count} of {words} words)",
                        yes_no(reachable)
                    );
                }
                None => {
                    let path = reach::find_path(&net.lds, from, to)?;
                    match path {
                        Some(p) => println!("{to} reachable from {from}: yes (shortest path {p})"),
                        None => println!("{to} reachable from {from}: no"),
                    }
                }
            }
        }
        (None, None) => {
            if args.weighted {
                println!("weighted reachability matrix (rows: destination, two decimals):");
                let r = reach::reachability_matrix_weighted(&net.lds);
                for i in 1..=n {
                    let row: Vec<String> =
                        (1..=n).map(|j| decimal_string(r.entry(i, j), 2)).collect();
                    println!("{}", row.join(" "));
                }
            } else if let Some(k) = args.k {
                println!("word counts at k={k} (rows: destination):");
                let q = reach::count_matrix_power(&net.lds, k);
                for i in 1..=n {
                    let row: Vec<String> = (1..=n).map(|j| q.entry(i, j).to_string()).collect();
                    println!("{}", row.join(" "));
                }
            } else {
                println!("reachability matrix (rows: destination):");
                let r = reach::reachability_matrix_bool(&net.lds);
                for i in 1..=n {
                    let row: Vec<&str> = (1..=n)
                        .map(|j| if r.get(i, j) { "1" } else { "0" })
                        .collect();
                    println!("{}", row.join(" "));
                }
            }
        }
        _ => {
            // clap's `requires` already rejects these, but belt and braces
            return Err(Failure::usage("--from and --to go together"));
        }
    }
    Ok(0)
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}
