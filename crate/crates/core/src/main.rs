use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use partial_search::oracle::certify_plan;
use partial_search::report::{emit_csv, emit_json, SweepRecord};
use partial_search::sweep::{self, SweepSummary, DEFAULT_CERT_CAP};
use partial_search::{SearchGeometry, Status};

const EXIT_KNOWN_FAILURE: u8 = 2;
const EXIT_UNEXPECTED_FAILURE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "partial-search",
    version,
    about = "Sure-success partial search planner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan, benchmark and certify every K, b >= 2 with K*b <= --max-n.
    Sweep {
        #[arg(long, default_value_t = 10_000)]
        max_n: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Plan a single instance and print a summary plus its record.
    Plan {
        blocks: usize,
        block_size: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Plan a single instance and report the dense simulation step by step.
    Certify {
        blocks: usize,
        block_size: usize,
        #[arg(long, default_value_t = 0)]
        solution_index: usize,
    },
}

#[derive(Args)]
struct Output {
    /// Instances with N above this are not densely simulated.
    #[arg(long, default_value_t = DEFAULT_CERT_CAP)]
    cert_cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    solution_index: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

enum Failure {
    Usage(String),
    Io(String),
}

fn geometry(blocks: usize, block_size: usize) -> Result<SearchGeometry, Failure> {
    SearchGeometry::new(blocks, block_size).map_err(|e| Failure::Usage(e.to_string()))
}

fn render(records: &[SweepRecord], format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => emit_csv(records),
        Format::Json => emit_json(records),
    }
    .map_err(|e| Failure::Io(e.to_string()))
}

fn write_report(text: &str, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(e.to_string())),
    }
}

fn status_code(status: Status) -> ExitCode {
    match status {
        Status::Solved => ExitCode::SUCCESS,
        Status::KnownFailure => ExitCode::from(EXIT_KNOWN_FAILURE),
        Status::UnexpectedFailure => ExitCode::from(EXIT_UNEXPECTED_FAILURE),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Sweep { max_n, out } => run_sweep(max_n, &out),
        Command::Plan {
            blocks,
            block_size,
            out,
        } => run_plan(geometry(blocks, block_size)?, &out),
        Command::Certify {
            blocks,
            block_size,
            solution_index,
        } => run_certify(geometry(blocks, block_size)?, solution_index),
    }
}

fn run_sweep(max_n: usize, out: &Output) -> Result<ExitCode, Failure> {
    let reports = sweep::sweep_detailed(max_n, out.cert_cap, out.solution_index)
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let mut stderr = io::stderr().lock();
    for r in &reports {
        if let Err(failure) = &r.plan {
            if r.record.status == Status::UnexpectedFailure {
                let _ = writeln!(
                    stderr,
                    "UNEXPECTED FAILURE K={} b={}: {failure}",
                    r.record.blocks, r.record.b
                );
            } else {
                let _ = writeln!(
                    stderr,
                    "known failure K={} b={}: {failure}",
                    r.record.blocks, r.record.b
                );
            }
        }
        if let [a, b] = r.certifications.as_slice() {
            if (a.prob_outside - b.prob_outside).abs() > 1e-12 {
                let _ = writeln!(
                    stderr,
                    "asymmetric certification K={} b={}: {:e} vs {:e}",
                    r.record.blocks, r.record.b, a.prob_outside, b.prob_outside
                );
            }
        }
    }

    let records: Vec<SweepRecord> = reports.into_iter().map(|r| r.record).collect();
    write_report(&render(&records, out.format)?, &out.out)?;

    let summary = SweepSummary::from_records(&records);
    let _ = writeln!(stderr, "{summary}");
    Ok(if summary.unexpected_failures > 0 {
        ExitCode::from(EXIT_UNEXPECTED_FAILURE)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_plan(g: SearchGeometry, out: &Output) -> Result<ExitCode, Failure> {
    if out.solution_index >= g.size() {
        return Err(Failure::Usage(format!(
            "solution index {} out of range for N = {}",
            out.solution_index,
            g.size()
        )));
    }
    let report = sweep::evaluate(&g, out.cert_cap, out.solution_index);
    let r = &report.record;

    println!("K = {}, b = {}, N = {}", r.blocks, r.b, r.size);
    println!(
        "ideal counts: j_l = {:.6}, j_g = {:.6}",
        r.j_l_real, r.j_g_real
    );
    match &report.plan {
        Ok(plan) => {
            println!(
                "sure-success plan: {} global + {} local + 1 final (offset +{}, {} oracle queries)",
                plan.counts.global,
                plan.counts.local,
                plan.offset,
                plan.oracle_queries()
            );
            println!(
                "phases: theta = {:.15}, phi = {:.15}, residual = {:e}",
                plan.phases.theta, plan.phases.phi, plan.phases.residual
            );
            println!(
                "subspace probability outside target block: {:e}",
                plan.run(&g).rem_probability()
            );
        }
        Err(failure) => println!("no plan ({}): {failure}", r.status.as_str()),
    }
    println!(
        "GRK baseline: {} global + {} local + 1, success probability {:.12}",
        r.grk_j_g, r.grk_j_l, r.grk_success_prob
    );
    for c in &report.certifications {
        println!(
            "dense check at index {}: outside = {:e}, inside = {:.15}, max trajectory deviation = {:e}",
            c.solution_index, c.prob_outside, c.prob_inside, c.trajectory_deviation
        );
    }
    println!();

    write_report(&render(std::slice::from_ref(r), out.format)?, &out.out)?;
    Ok(status_code(r.status))
}

fn run_certify(g: SearchGeometry, solution_index: usize) -> Result<ExitCode, Failure> {
    if solution_index >= g.size() {
        return Err(Failure::Usage(format!(
            "solution index {solution_index} out of range for N = {}",
            g.size()
        )));
    }
    let plan = match partial_search::plan_sure_success(&g) {
        Ok(plan) => plan,
        Err(failure) => {
            let status = sweep::classify(&g, &Err(failure.clone()));
            println!("no plan ({}): {failure}", status.as_str());
            return Ok(status_code(status));
        }
    };
    let other = (solution_index + g.block_size()) % g.size();
    let mut ok = true;
    for idx in [solution_index, other] {
        let c = certify_plan(&g, &plan, idx).map_err(|e| Failure::Usage(e.to_string()))?;
        println!("solution index {idx} (block {}):", idx / g.block_size());
        println!("  probability inside target block:  {:.15}", c.prob_inside);
        println!("  probability outside target block: {:e}", c.prob_outside);
        println!(
            "  max projection deviation along trajectory: {:e}",
            c.trajectory_deviation
        );
        println!("  max out-of-subspace norm: {:e}", c.max_leakage);
        println!("  max norm defect: {:e}", c.max_norm_defect);
        ok &= c.prob_outside < 1e-9 && c.trajectory_deviation < 1e-10 && c.max_leakage < 1e-12;
    }
    println!("{}", if ok { "certified" } else { "NOT certified" });
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
