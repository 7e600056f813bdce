//! Command-line front end: `abelnet <validate|invariants|recurrent|series|simulate>`.
//!
//! Exit codes: 0 success, 1 semantic failure (failed test, axiom violation,
//! identity mismatch), 2 input error.

use abelnet::algebra::{
    classify, exchange_rate, grothendieck_invariants, period_vector, production_matrix,
    some_locally_recurrent_state, torsion_group, total_kernel, Criticality,
};
use abelnet::core::{Configuration, Network};
use abelnet::dynamics::{
    activity_vector, ParallelUpdate, SavingsUpdate, SequentialUpdate, UpdateRule,
};
use abelnet::error::NetError;
use abelnet::mat::Int;
use abelnet::netfile::{parse_count_vector, parse_network_file, parse_state_vector};
use abelnet::recurrence::{
    burning_test_critical, cycle_test, default_capacity_box, is_agent,
    network_capacity, stoppable_levels, subcritical_witness, Capacity,
};
use abelnet::zoo::{build, validate_abelian, Violation};
use clap::{Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "abelnet", version, about = "Build, simulate, and analyze finite abelian networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for enumeration commands
    #[arg(long, global = true, env = "ABELNET_JOBS")]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a network file and check the abelian axioms
    Validate { file: String },
    /// Print the exact algebraic invariants of the network
    Invariants {
        file: String,
        /// Capacity search box override
        #[arg(long = "box")]
        box_bound: Option<u64>,
    },
    /// Run the recurrence test appropriate for the network's class
    Recurrent {
        file: String,
        /// Waiting letter counts, e.g. 2,1,0
        #[arg(long)]
        chips: Option<String>,
        /// Local state per vertex, e.g. 0,1,1 (defaults to a locally
        /// recurrent state)
        #[arg(long)]
        state: Option<String>,
        /// Witness vector for the subcritical test (defaults to a computed
        /// one)
        #[arg(long)]
        witness: Option<String>,
    },
    /// Expand the recurrent-configuration generating function
    Series {
        file: String,
        #[arg(long, default_value_t = 5)]
        maxdeg: u32,
        #[arg(long, value_enum, default_value_t = SeriesMode::Det)]
        mode: SeriesMode,
    },
    /// Iterate an update rule and report the orbit or its activity
    Simulate {
        file: String,
        #[arg(long)]
        chips: String,
        #[arg(long)]
        state: Option<String>,
        /// parallel | sequential | savings:v0,v1,...
        #[arg(long, default_value = "parallel")]
        rule: String,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        #[arg(long, value_enum, default_value_t = ReportKind::Activity)]
        report: ReportKind,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesMode {
    Det,
    Brute,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportKind {
    Activity,
    Orbit,
}

/// Failures that should terminate with exit code 2.
struct InputError(String);

impl From<NetError> for InputError {
    fn from(e: NetError) -> Self {
        InputError(e.to_string())
    }
}

impl From<std::io::Error> for InputError {
    fn from(e: std::io::Error) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let result = match &cli.command {
        Command::Validate { file } => cmd_validate(file, cli.format),
        Command::Invariants { file, box_bound } => cmd_invariants(file, *box_bound, cli.format),
        Command::Recurrent { file, chips, state, witness } => {
            cmd_recurrent(file, chips.as_deref(), state.as_deref(), witness.as_deref(), cli.format)
        }
        Command::Series { file, maxdeg, mode } => cmd_series(file, *maxdeg, *mode, cli.format),
        Command::Simulate { file, chips, state, rule, steps, report } => {
            cmd_simulate(file, chips, state.as_deref(), rule, *steps, *report, cli.format)
        }
    };
    match result {
        Ok(ok) => {
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}

fn load(file: &str) -> Result<Network, InputError> {
    let text = std::fs::read_to_string(file)?;
    let spec = parse_network_file(&text)?;
    Ok(build(&spec)?)
}

struct Rows {
    format: Format,
    lines: Vec<(String, String)>,
}

impl Rows {
    fn new(format: Format) -> Self {
        Rows { format, lines: Vec::new() }
    }

    fn push(&mut self, key: &str, value: impl ToString) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn print(&self) {
        match self.format {
            Format::Text => {
                for (k, v) in &self.lines {
                    println!("{}: {}", k, v);
                }
            }
            Format::Tsv => {
                println!("key\tvalue");
                for (k, v) in &self.lines {
                    println!("{}\t{}", k, v);
                }
            }
        }
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn describe_violation(net: &Network, v: &Violation) -> String {
    match v {
        Violation::Commutation { vertex, state, a, b } => format!(
            "transitions do not commute at vertex v{} state {} letters ({}, {})",
            vertex, state, a, b
        ),
        Violation::MessageExchange { vertex, state, a, b } => format!(
            "message exchange fails at vertex v{} state {} letters ({}, {})",
            vertex, state, a, b
        ),
        Violation::ForeignTarget { vertex, state, a, letter } => format!(
            "vertex v{} state {} letter {} emits {} which no out-neighbor owns",
            vertex,
            state,
            a,
            net.letter_name(*letter)
        ),
    }
}

fn cmd_validate(file: &str, format: Format) -> Result<bool, InputError> {
    let net = load(file)?;
    let report = validate_abelian(&net);
    let mut rows = Rows::new(format);
    rows.push("letters", net.num_letters());
    rows.push("vertices", net.num_vertices());
    rows.push("violations", report.violations.len());
    for (i, v) in report.violations.iter().enumerate() {
        rows.push(&format!("violation_{}", i), describe_violation(&net, v));
    }
    rows.print();
    Ok(report.is_ok())
}

fn matrix_string(p: &abelnet::mat::QMat) -> String {
    let rows: Vec<String> = (0..p.rows())
        .map(|i| {
            let entries: Vec<String> = (0..p.cols()).map(|j| p.get(i, j).to_string()).collect();
            format!("[{}]", entries.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn cmd_invariants(file: &str, box_bound: Option<u64>, format: Format) -> Result<bool, InputError> {
    let net = load(file)?;
    let axioms = validate_abelian(&net);
    if !axioms.is_ok() {
        return Err(InputError(format!(
            "network violates the abelian axioms ({} violations); run `abelnet validate`",
            axioms.violations.len()
        )));
    }
    let mut rows = Rows::new(format);
    let class = classify(&net)?;
    rows.push("class", class.overall);
    rows.push("strongly_connected", class.strongly_connected);
    if !class.strongly_connected {
        for (i, (letters, tag)) in class.components.iter().enumerate() {
            let names: Vec<&str> = letters.iter().map(|&a| net.letter_name(a)).collect();
            rows.push(&format!("component_{}", i), format!("{{{}}} {}", names.join(","), tag));
        }
    }
    rows.push("agent", is_agent(&net));
    let p = production_matrix(&net)?;
    rows.push("production_matrix", matrix_string(&p));
    rows.push("kernel_index", total_kernel(&net)?.index());

    if class.strongly_connected && class.overall == Criticality::Critical {
        rows.push("period_vector", join(period_vector(&net)?));
    } else {
        rows.push("period_vector", "unavailable (needs a strongly connected critical network)");
    }
    if class.strongly_connected {
        match exchange_rate(&net) {
            Ok(s) => rows.push("exchange_rate", join(s)),
            Err(e) => rows.push("exchange_rate", format!("unavailable ({})", e)),
        }
    } else {
        rows.push("exchange_rate", "unavailable (network is not strongly connected)");
    }
    rows.push("grothendieck_group", grothendieck_invariants(&net)?);
    rows.push("torsion_group", torsion_group(&net)?);

    if class.strongly_connected {
        let bx = box_bound.unwrap_or_else(|| default_capacity_box(&net));
        rows.push("capacity_box", bx);
        match network_capacity(&net, bx) {
            Ok(Capacity::Unbounded) => rows.push("capacity", "unbounded"),
            Ok(Capacity::Bounded(c)) => rows.push("capacity", c),
            Err(NetError::BoxTooSmall(msg)) => rows.push("capacity", format!("box too small ({})", msg)),
            Err(e) => rows.push("capacity", format!("unavailable ({})", e)),
        }
        if class.overall == Criticality::Critical {
            match stoppable_levels(&net, bx) {
                Ok(stop) => rows.push("stoppable_levels", format!("{{{}}}", join(stop))),
                Err(e) => rows.push("stoppable_levels", format!("unavailable ({})", e)),
            }
        }
    } else {
        rows.push("capacity", "unbounded (subcritical)");
    }
    rows.print();
    Ok(true)
}

fn parse_configuration(
    net: &Network,
    chips: Option<&str>,
    state: Option<&str>,
) -> Result<Configuration, InputError> {
    let x = match chips {
        Some(text) => parse_count_vector(text)?,
        None => vec![0; net.num_letters()],
    };
    let q = match state {
        Some(text) => parse_state_vector(text)?,
        None => some_locally_recurrent_state(net),
    };
    Ok(Configuration::new(net, x, q)?)
}

fn cmd_recurrent(
    file: &str,
    chips: Option<&str>,
    state: Option<&str>,
    witness: Option<&str>,
    format: Format,
) -> Result<bool, InputError> {
    let net = load(file)?;
    let class = classify(&net)?;
    let mut rows = Rows::new(format);
    rows.push("class", class.overall);
    let verdict = match (class.overall, class.strongly_connected) {
        (Criticality::Critical, true) => {
            let cfg = parse_configuration(&net, chips, state, )?;
            rows.push("configuration", &cfg);
            if is_agent(&net) {
                rows.push("test", "cycle");
                let ok = cycle_test(&net, &cfg)?;
                rows.push("recurrent", ok);
                ok
            } else {
                rows.push("test", "burning");
                let cert = burning_test_critical(&net, &cfg)?;
                rows.push("recurrent", cert.verdict);
                rows.push("state_returned", cert.state_returned);
                let counts = abelnet::core::word_count_vector(net.num_letters(), &cert.witness);
                rows.push("witness_counts", join(counts));
                let word: Vec<String> =
                    cert.witness.iter().map(|&a| net.letter_name(a).to_string()).collect();
                rows.push("witness", word.join(" "));
                cert.verdict
            }
        }
        (Criticality::Subcritical, _) => {
            let q = match state {
                Some(text) => parse_state_vector(text)?,
                None => some_locally_recurrent_state(&net),
            };
            let k: Vec<Int> = match witness {
                Some(text) => parse_count_vector(text)?.into_iter().map(Int::from).collect(),
                None => subcritical_witness(&net)?,
            };
            rows.push("test", "subcritical burning");
            rows.push("state", join(q.clone()));
            rows.push("witness_vector", join(k.clone()));
            let ok = abelnet::recurrence::burning_test_subcritical(&net, &q, &k)?;
            rows.push("recurrent", ok);
            ok
        }
        _ => {
            return Err(InputError(
                "no recurrence test applies (network must be subcritical, or critical and strongly connected)"
                    .into(),
            ));
        }
    };
    rows.print();
    Ok(verdict)
}

fn cmd_series(file: &str, maxdeg: u32, mode: SeriesMode, format: Format) -> Result<bool, InputError> {
    let net = load(file)?;
    let print_table = |t: &abelnet::series::SeriesTable| match format {
        Format::Text => print!("{}", t),
        Format::Tsv => {
            println!("exponents\tcoefficient");
            let text = format!("{}", t);
            for line in text.lines() {
                let (e, c) = line.split_once(" : ").expect("series line");
                println!("{}\t{}", e, c);
            }
        }
    };
    match mode {
        SeriesMode::Det => {
            print_table(&abelnet::enumeration::series_determinant(&net, maxdeg)?);
            Ok(true)
        }
        SeriesMode::Brute => {
            print_table(&abelnet::enumeration::series_bruteforce(&net, maxdeg)?);
            Ok(true)
        }
        SeriesMode::Both => {
            let det = abelnet::enumeration::series_determinant(&net, maxdeg)?;
            let brute = abelnet::enumeration::series_bruteforce(&net, maxdeg)?;
            print_table(&det);
            if det == brute {
                println!("match: determinant and brute-force series agree to degree {}", maxdeg);
                Ok(true)
            } else {
                println!("MISMATCH between determinant and brute-force series");
                Ok(false)
            }
        }
    }
}

fn parse_rule(net: &Network, text: &str) -> Result<Box<dyn UpdateRule>, InputError> {
    if text == "parallel" {
        return Ok(Box::new(ParallelUpdate));
    }
    if text == "sequential" {
        return Ok(Box::new(SequentialUpdate::vertex_order(net)));
    }
    if let Some(list) = text.strip_prefix("savings:") {
        let mut savings = BTreeSet::new();
        for name in list.split(',') {
            let name = name.trim();
            let v = (0..net.num_vertices())
                .find(|&v| format!("v{}", v) == name || net.letter_name(net.processors[v].letters[0]) == name)
                .ok_or_else(|| InputError(format!("unknown vertex {:?}", name)))?;
            savings.insert(v);
        }
        return Ok(Box::new(SavingsUpdate { savings }));
    }
    Err(InputError(format!(
        "unknown rule {:?} (expected parallel, sequential, or savings:v0,...)",
        text
    )))
}

fn cmd_simulate(
    file: &str,
    chips: &str,
    state: Option<&str>,
    rule_text: &str,
    steps: u64,
    report: ReportKind,
    format: Format,
) -> Result<bool, InputError> {
    let net = load(file)?;
    let cfg = parse_configuration(&net, Some(chips), state)?;
    let rule = parse_rule(&net, rule_text)?;
    match report {
        ReportKind::Activity => {
            let act = activity_vector(&net, &cfg, rule.as_ref(), steps.max(1))?;
            let mut rows = Rows::new(format);
            rows.push("rule", rule.name());
            rows.push("configuration", &cfg);
            rows.push("activity", join(act.rates));
            rows.print();
        }
        ReportKind::Orbit => {
            let mut cur = cfg;
            match format {
                Format::Tsv => println!("step\tconfiguration\tupdate_counts"),
                Format::Text => {}
            }
            for i in 0..steps {
                let u = rule.update_word(&net, &cur)?;
                let counts = abelnet::core::word_count_vector(net.num_letters(), &u);
                match format {
                    Format::Text => println!("step {}: {} fires {}", i, cur, join(counts)),
                    Format::Tsv => println!("{}\t{}\t{}", i, cur, join(counts)),
                }
                if u.is_empty() {
                    break;
                }
                cur = abelnet::core::execute_word(&net, &cur, &u)?.0;
            }
        }
    }
    Ok(true)
}
