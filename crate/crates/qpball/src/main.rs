//! Command-line interface: single bounds, bound comparisons, random-instance
//! campaigns, and ℓᵖ bound curves.
//!
//! Exit codes: 0 success, 1 usage error, 2 input parse/validation error,
//! 3 solver non-convergence (value still printed), 4 unwritable output path.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use qpball::bench::{
    histogram, p_curve, p_curve_to_csv, rows_to_csv, run_campaign, BenchConfig, Dist,
};
use qpball::bounds::{
    eigenvalue_bound, l1_bound_cop, lp_cop_bound, nesterov_bound, small_cop_bound,
    verify_certificate, BoundResult,
};
use qpball::conic::SolverOptions;
use qpball::local_search::{reference_solution, ReplicatorOptions};
use qpball::oracle::l1_exact;
use qpball::reformulation::{is_sign_constrained, lift_to_stqp, L1Instance};
use qpball::{Error, SymMatrix};

#[derive(Parser)]
#[command(name = "qpball", version, about = "Bounds for quadratic minimization over l1- and lp-balls")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a single bound for an instance read from a matrix file.
    Bound(BoundArgs),
    /// Compare all bounds (and the exact value when feasible) on one matrix.
    Compare(CompareArgs),
    /// Run a seeded random-instance campaign and emit CSV/JSON.
    Bench(BenchArgs),
    /// Emit the lp-ball bound curve over a p-grid as CSV.
    Pcurve(PcurveArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Lifted DNN relaxation bound (certified lower bound).
    Cop,
    /// Comparison SDP bound.
    Nest,
    /// DNN bound of the matrix itself (valid only without positive entries).
    Smallcop,
    /// Smallest eigenvalue.
    Eig,
    /// Exact enumeration (n <= 8).
    Oracle,
    /// Multistart local-search upper bound.
    Ref,
}

#[derive(Args)]
struct BoundArgs {
    /// Matrix file (dense rows; optional leading dimension; '#' comments).
    #[arg(long)]
    matrix: PathBuf,
    /// Optional linear-term file (n numbers).
    #[arg(long)]
    linear: Option<PathBuf>,
    #[arg(long, value_enum)]
    method: Method,
    /// Ball exponent in [1, 2]; only valid with --method cop.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    json: bool,
    /// Relative solver tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Accept asymmetric input by averaging it with its transpose.
    #[arg(long)]
    symmetrize: bool,
    /// Seed for the local-search methods.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    symmetrize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Normal)]
    dist: DistArg,
    /// Campaign CSV output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional JSON summary output path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Histogram bins reported on stdout.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Worker threads (default: available cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Normal,
    Uniform,
}

#[derive(Args)]
struct PcurveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pmin: f64,
    #[arg(long, default_value_t = 2.0)]
    pmax: f64,
    /// Number of grid points (>= 2).
    #[arg(long, default_value_t = 11)]
    steps: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long)]
    symmetrize: bool,
}

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Pcurve(args) => cmd_pcurve(&args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err((c, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(c)
        }
    }
}

type CmdResult = Result<u8, (u8, String)>;

fn input_err(e: Error) -> (u8, String) {
    (EXIT_INPUT, e.to_string())
}

fn read_matrix(path: &Path, symmetrize: bool) -> Result<SymMatrix, (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
    qpball::io::parse_matrix(&text, symmetrize).map_err(input_err)
}

fn read_instance(
    matrix: &Path,
    linear: Option<&Path>,
    symmetrize: bool,
) -> Result<L1Instance, (u8, String)> {
    let c = read_matrix(matrix, symmetrize)?;
    let lin = match linear {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| (EXIT_INPUT, format!("{}: {e}", path.display())))?;
            qpball::io::parse_vector(&text, c.dim()).map_err(input_err)?
        }
        None => vec![0.0; c.dim()],
    };
    L1Instance::new(c, lin).map_err(input_err)
}

fn solver_opts(tol: f64) -> SolverOptions {
    SolverOptions {
        eps_rel: tol,
        ..Default::default()
    }
}

/// JSON record for a single bound.
#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct BoundRecord {
    method: String,
    value: f64,
    certified: bool,
    lambda: Option<f64>,
    warning: Option<String>,
    stats: Option<qpball::SolverStats>,
}

fn bound_record(result: &BoundResult, q_for_cert: Option<&SymMatrix>) -> BoundRecord {
    let certified = match (&result.certificate, q_for_cert) {
        (Some(cert), Some(q)) => verify_certificate(q, cert, 1e-8).unwrap_or(false),
        _ => false,
    };
    BoundRecord {
        method: format!("{:?}", result.method).to_lowercase(),
        value: result.value,
        certified,
        lambda: result.certificate.as_ref().map(|c| c.lambda),
        warning: result.warning.clone(),
        stats: result.stats.clone(),
    }
}

fn print_record(rec: &BoundRecord, json: bool) {
    if json {
        println!("{}", serde_json::to_string(rec).unwrap());
        return;
    }
    println!("{}: {:.6}", rec.method, rec.value);
    if let Some(lambda) = rec.lambda {
        println!(
            "certificate: lambda={lambda:.9} verified={}",
            if rec.certified { "true" } else { "false" }
        );
    }
    if let Some(w) = &rec.warning {
        println!("warning: {w}");
    }
    if let Some(s) = &rec.stats {
        println!(
            "solver: iterations={} primal_residual={:.2e} dual_residual={:.2e} converged={}",
            s.iterations, s.primal_residual, s.dual_residual, s.converged
        );
    }
}

fn exit_for(result: &BoundResult) -> u8 {
    match &result.stats {
        Some(s) if !s.converged => EXIT_NO_CONVERGENCE,
        _ => EXIT_OK,
    }
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    let inst = read_instance(&args.matrix, args.linear.as_deref(), args.symmetrize)?;
    let opts = solver_opts(args.tol);
    let homogeneous = inst.c_linear.iter().all(|&v| v == 0.0);

    if args.p.is_some() && args.method != Method::Cop {
        return Err((EXIT_USAGE, "--p is only valid with --method cop".into()));
    }

    let (result, cert_q) = match args.method {
        Method::Cop => match args.p {
            Some(p) => {
                if !homogeneous {
                    return Err((
                        EXIT_USAGE,
                        "lp-ball bounds are defined for the homogeneous case; drop --linear".into(),
                    ));
                }
                let r = lp_cop_bound(&inst.c_matrix, p, &opts).map_err(input_err)?;
                (r, Some(lift_to_stqp(&inst).q))
            }
            None => {
                let r = l1_bound_cop(&inst, &opts).map_err(input_err)?;
                (r, Some(lift_to_stqp(&inst).q))
            }
        },
        Method::Nest => {
            if !homogeneous {
                return Err((
                    EXIT_USAGE,
                    "the comparison SDP bound is defined for quadratic forms; drop --linear".into(),
                ));
            }
            (nesterov_bound(&inst.c_matrix, &opts).map_err(input_err)?, None)
        }
        Method::Smallcop => {
            if !homogeneous {
                return Err((EXIT_USAGE, "--method smallcop requires a homogeneous instance".into()));
            }
            let r = small_cop_bound(&inst.c_matrix, &opts).map_err(input_err)?;
            let q = inst.c_matrix.clone();
            (r, Some(q))
        }
        Method::Eig => (eigenvalue_bound(&inst.c_matrix).map_err(input_err)?, None),
        Method::Oracle => {
            let (value, _) = l1_exact(&inst).map_err(input_err)?;
            (
                BoundResult {
                    value,
                    method: qpball::BoundMethod::Oracle,
                    certificate: None,
                    stats: None,
                    warning: None,
                },
                None,
            )
        }
        Method::Ref => {
            let q = lift_to_stqp(&inst).q;
            let rep = ReplicatorOptions {
                seed: args.seed,
                ..Default::default()
            };
            (reference_solution(&q, &rep), None)
        }
    };

    let rec = bound_record(&result, cert_q.as_ref());
    print_record(&rec, args.json);
    Ok(exit_for(&result))
}

/// JSON record for the compare command.
#[derive(Serialize, Deserialize, PartialEq, Debug)]
struct CompareRecord {
    nest: f64,
    cop: f64,
    cop_lambda: f64,
    cop_certified: bool,
    smallcop: f64,
    smallcop_warning: Option<String>,
    reference: f64,
    oracle: Option<f64>,
    cop_exact: bool,
    sign_constrained: bool,
    converged: bool,
}

fn cmd_compare(args: &CompareArgs) -> CmdResult {
    let c = read_matrix(&args.matrix, args.symmetrize)?;
    let inst = L1Instance::homogeneous(c.clone());
    let opts = solver_opts(args.tol);
    let lifted = lift_to_stqp(&inst).q;

    let nest = nesterov_bound(&c, &opts).map_err(input_err)?;
    let cop = l1_bound_cop(&inst, &opts).map_err(input_err)?;
    let small = small_cop_bound(&c, &opts).map_err(input_err)?;
    let reference = reference_solution(
        &lifted,
        &ReplicatorOptions {
            seed: args.seed,
            restarts: 20,
            ..Default::default()
        },
    );
    let oracle = if c.dim() <= 8 {
        Some(l1_exact(&inst).map_err(input_err)?.0)
    } else {
        None
    };

    let yardstick = oracle.unwrap_or(reference.value);
    let cop_exact = (cop.value - yardstick).abs() <= 1e-5 * yardstick.abs().max(1.0);
    let cert = cop.certificate.as_ref().expect("cop bound carries a certificate");
    let converged = [&nest, &cop, &small]
        .iter()
        .all(|r| r.stats.as_ref().map_or(true, |s| s.converged));

    let rec = CompareRecord {
        nest: nest.value,
        cop: cop.value,
        cop_lambda: cert.lambda,
        cop_certified: verify_certificate(&lifted, cert, 1e-8).unwrap_or(false),
        smallcop: small.value,
        smallcop_warning: small.warning.clone(),
        reference: reference.value,
        oracle,
        cop_exact,
        sign_constrained: is_sign_constrained(&inst),
        converged,
    };

    if args.json {
        println!("{}", serde_json::to_string(&rec).unwrap());
    } else {
        println!("nest:     {:.6}", rec.nest);
        println!(
            "cop:      {:.6}  (certified lambda {:.9}, verified={})",
            rec.cop, rec.cop_lambda, rec.cop_certified
        );
        match &rec.smallcop_warning {
            Some(w) => println!("smallcop: {:.6}  [warning: {w}]", rec.smallcop),
            None => println!("smallcop: {:.6}  [valid: sign-constrained]", rec.smallcop),
        }
        println!("ref:      {:.6}", rec.reference);
        if let Some(o) = rec.oracle {
            println!("oracle:   {o:.6}");
        }
        println!("cop_exact: {}", rec.cop_exact);
    }
    Ok(if converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn write_file(path: &Path, contents: &str) -> Result<(), (u8, String)> {
    std::fs::write(path, contents).map_err(|e| (EXIT_OUTPUT, format!("{}: {e}", path.display())))
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    if args.count == 0 {
        return Err((EXIT_USAGE, "--count must be at least 1".into()));
    }
    if args.dim < 2 {
        return Err((EXIT_USAGE, "--dim must be at least 2".into()));
    }
    if args.bins == 0 {
        return Err((EXIT_USAGE, "--bins must be at least 1".into()));
    }
    let cfg = BenchConfig {
        dim: args.dim,
        count: args.count,
        seed: args.seed,
        dist: match args.dist {
            DistArg::Normal => Dist::NormalUnit,
            DistArg::Uniform => Dist::UniformSym,
        },
        exact_tol: 1e-5,
    };

    let run = || run_campaign(&cfg);
    let (rows, summary) = match args.threads {
        Some(t) => {
            if t == 0 {
                return Err((EXIT_USAGE, "--threads must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| (EXIT_USAGE, e.to_string()))?;
            pool.install(run)
        }
        None => run(),
    };

    write_file(&args.out, &rows_to_csv(&rows))?;
    let summary_json = serde_json::to_string(&summary).unwrap();
    if let Some(path) = &args.summary {
        write_file(path, &summary_json)?;
    }
    println!("{summary_json}");
    for (lo, hi, count) in histogram(&rows, args.bins) {
        println!("hist [{lo:.4}, {hi:.4}): {count}");
    }
    let all_converged = rows.iter().all(|r| r.converged);
    Ok(if all_converged { EXIT_OK } else { EXIT_NO_CONVERGENCE })
}

fn cmd_pcurve(args: &PcurveArgs) -> CmdResult {
    if args.steps < 2 {
        return Err((EXIT_USAGE, "--steps must be at least 2".into()));
    }
    if !(1.0..=2.0).contains(&args.pmin) || !(1.0..=2.0).contains(&args.pmax) || args.pmin > args.pmax
    {
        return Err((EXIT_USAGE, "require 1 <= pmin <= pmax <= 2".into()));
    }
    let c = read_matrix(&args.matrix, args.symmetrize)?;
    let grid: Vec<f64> = (0..args.steps)
        .map(|k| {
            args.pmin + (args.pmax - args.pmin) * k as f64 / (args.steps - 1) as f64
        })
        .collect();
    let rows = p_curve(&c, &grid, &solver_opts(args.tol)).map_err(input_err)?;
    write_file(&args.out, &p_curve_to_csv(&rows))?;
    for r in &rows {
        println!(
            "p={:.3} eig={:.6} lp_cop={:.6} combined={:.6} upper={:.6}",
            r.p, r.eig, r.lp_cop, r.combined, r.upper
        );
    }
    Ok(EXIT_OK)
}
