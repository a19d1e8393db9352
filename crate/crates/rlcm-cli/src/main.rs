//! `rlcm`: command-line front end for right LCM semigroup computations.
//!
//! Subcommands: `lcm` (right least common multiples), `check` (positivity of
//! the inclusion–exclusion operators over a complete generator family),
//! `dilate` (truncated isometric dilation with covariance diagnostics),
//! `certify` (explicit positive-combination certificates), and `verify`
//! (replay a recorded report and confirm its outcome).

mod descriptor;
mod report;
mod repfile;
mod words;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rlcm::semigroup::{LcmOutcome, SgError};

use descriptor::Descriptor;
use repfile::RepFile;
use report::{Job, JobResult, Report};

/// A failed run: what to tell the user and which exit code to die with.
///
/// The exit codes are a stable contract:
///
/// | code | meaning |
/// |------|---------|
/// | 0    | success / positive verdict |
/// | 1    | witnessed failure (negative eigenvalue, non-PSD Gram or leaf, report mismatch) |
/// | 2    | `lcm` undecided within the step budget |
/// | 3    | `check`/`certify` undecided (step or node budget exhausted) |
/// | 4    | representation fails its defining relations or contractivity |
/// | 64   | usage error (bad flags, malformed descriptor or word) |
/// | 65   | malformed input file |
/// | 70   | internal error |
#[derive(Debug)]
pub struct Failure {
    /// Process exit code.
    pub code: u8,
    /// Message printed to stderr.
    pub message: String,
}

impl Failure {
    /// Bad command-line input: exit 64.
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 64,
            message: message.into(),
        }
    }

    /// Unreadable or malformed data file: exit 65.
    pub fn data(message: impl Into<String>) -> Failure {
        Failure {
            code: 65,
            message: message.into(),
        }
    }

    /// The computation hit a budget before reaching a verdict: exit 3.
    pub fn inconclusive(message: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: message.into(),
        }
    }

    /// The representation does not satisfy its defining relations: exit 4.
    pub fn relations(message: impl Into<String>) -> Failure {
        Failure {
            code: 4,
            message: message.into(),
        }
    }

    /// Unexpected internal failure: exit 70.
    pub fn internal(message: impl Into<String>) -> Failure {
        Failure {
            code: 70,
            message: message.into(),
        }
    }
}

const EXIT_CODE_HELP: &str = "Exit codes:
  0   success / positive verdict
  1   witnessed failure (negative eigenvalue, non-PSD Gram, report mismatch)
  2   lcm undecided within the step budget
  3   check or certify undecided (budget exhausted)
  4   representation fails its defining relations
  64  usage error
  65  malformed input file
  70  internal error";

/// Computations in right LCM semigroups: least common multiples, positivity
/// checks for matrix representations, certificates, and truncated dilations.
#[derive(Parser)]
#[command(name = "rlcm", version, after_help = EXIT_CODE_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the right least common multiple of two elements.
    ///
    /// Prints the lcm in word form, or DISJOINT when the principal right
    /// ideals do not intersect. Words are dot-separated atom names
    /// ("e1.e2.e1"); closed-form elements are comma tuples ("3,6"); graph
    /// product atoms are "vertex:atom" tokens; "e" is the identity.
    Lcm {
        /// Semigroup descriptor: nk:K, free:N, artin:[[1,3],[3,1]],
        /// thompson:K, bs:N,M, nxn, inline JSON, or @file.json.
        #[arg(long)]
        semigroup: String,
        /// Reversing step budget for word-rewriting semigroups.
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        /// The first element.
        p: String,
        /// The second element.
        q: String,
    },
    /// Check positivity of every Z(F) operator over a generator family.
    ///
    /// Exit 0 when all operators are positive semidefinite (the report says
    /// whether the family is complete for the semigroup or a truncation),
    /// exit 1 with the witnessing family and its smallest eigenvalue
    /// otherwise.
    Check {
        /// Representation file (JSON; see the README for the format).
        #[arg(long)]
        rep: String,
        /// Optional semigroup descriptor cross-checked against the file.
        #[arg(long)]
        semigroup: Option<String>,
        /// Family strategy: auto, atoms, thompson[:K], nxn, bs, graph, or
        /// bounded:RADIUS.
        #[arg(long, default_value = "auto")]
        strategy: String,
        /// Largest prime allowed in the affine generator family.
        #[arg(long, default_value_t = 5)]
        prime_bound: u64,
        /// Reversing step budget for word-rewriting semigroups.
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        #[arg(long, default_value_t = 1e-9)]
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        #[arg(long, default_value_t = 1e-8)]
        tol_null: f64,
        /// Write a machine-readable report here.
        #[arg(long)]
        report: Option<String>,
    },
    /// Build the truncated isometric dilation and verify its covariance.
    ///
    /// Exit 1 with the smallest Gram eigenvalue when the kernel matrix of
    /// the truncation is not positive semidefinite (no dilation exists).
    Dilate {
        /// Representation file (JSON; see the README for the format).
        #[arg(long)]
        rep: String,
        /// Optional semigroup descriptor cross-checked against the file.
        #[arg(long)]
        semigroup: Option<String>,
        /// Truncate to the ball of this radius.
        #[arg(long, default_value_t = 2)]
        radius: u64,
        /// Truncation box "A,M" for the nxn semigroup (shift ≤ A, scale ≤ M).
        #[arg(long)]
        affine_box: Option<String>,
        /// Largest prime allowed in the affine generator family.
        #[arg(long, default_value_t = 5)]
        prime_bound: u64,
        /// Reversing step budget for word-rewriting semigroups.
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        #[arg(long, default_value_t = 1e-9)]
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        #[arg(long, default_value_t = 1e-8)]
        tol_null: f64,
        /// Print the dilated operator matrices.
        #[arg(long)]
        print_operators: bool,
        /// Write a machine-readable report here.
        #[arg(long)]
        report: Option<String>,
    },
    /// Produce a positive-combination certificate for Z of a family.
    ///
    /// Rewrites Z(F) as an explicit sum Σ W Z(E) W* over base-case families
    /// E; exit 0 when every base operator is positive semidefinite and the
    /// rewriting identities hold within tolerance.
    Certify {
        /// Representation file (JSON; see the README for the format).
        #[arg(long)]
        rep: String,
        /// Optional semigroup descriptor cross-checked against the file.
        #[arg(long)]
        semigroup: Option<String>,
        /// Reversing step budget for word-rewriting semigroups.
        #[arg(long, default_value_t = 10_000)]
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        #[arg(long, default_value_t = 1e-9)]
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        #[arg(long, default_value_t = 1e-8)]
        tol_null: f64,
        /// Write a machine-readable report here.
        #[arg(long)]
        report: Option<String>,
        /// The family, one word per argument.
        #[arg(required = true)]
        family: Vec<String>,
    },
    /// Re-run the job recorded in a report file and confirm its outcome.
    ///
    /// Exit 0 when the replay reproduces the recorded result, 1 when it
    /// disagrees.
    Verify {
        /// Report file written by check, dilate, or certify.
        report: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Lcm {
            semigroup,
            depth,
            p,
            q,
        } => cmd_lcm(&semigroup, depth, &p, &q),
        Command::Check {
            rep,
            semigroup,
            strategy,
            prime_bound,
            depth,
            tol_psd,
            tol_null,
            report,
        } => {
            let job = Job::Check {
                representation: load_rep(&rep, semigroup.as_deref())?,
                strategy,
                prime_bound,
                depth,
                tol_psd,
                tol_null,
            };
            let result = report::run_job(&job)?;
            let code = print_check(&result);
            finish(job, result, report.as_deref())?;
            Ok(code)
        }
        Command::Dilate {
            rep,
            semigroup,
            radius,
            affine_box,
            prime_bound,
            depth,
            tol_psd,
            tol_null,
            print_operators,
            report,
        } => {
            let affine_box = affine_box.map(|s| parse_box(&s)).transpose()?;
            let job = Job::Dilate {
                representation: load_rep(&rep, semigroup.as_deref())?,
                radius,
                affine_box,
                prime_bound,
                depth,
                tol_psd,
                tol_null,
            };
            let result = report::run_job(&job)?;
            let code = print_dilate(&result, print_operators);
            finish(job, result, report.as_deref())?;
            Ok(code)
        }
        Command::Certify {
            rep,
            semigroup,
            depth,
            tol_psd,
            tol_null,
            report,
            family,
        } => {
            let job = Job::Certify {
                representation: load_rep(&rep, semigroup.as_deref())?,
                family,
                depth,
                tol_psd,
                tol_null,
            };
            let result = report::run_job(&job)?;
            let code = print_certify(&result);
            finish(job, result, report.as_deref())?;
            Ok(code)
        }
        Command::Verify { report } => cmd_verify(&report),
    }
}

/// Load a representation file and cross-check any `--semigroup` flag
/// against the descriptor embedded in it.
fn load_rep(path: &str, flag: Option<&str>) -> Result<RepFile, Failure> {
    let file = RepFile::load(path)?;
    if let Some(text) = flag {
        let given = Descriptor::parse(text)?;
        if given != file.semigroup {
            return Err(Failure::usage(format!(
                "--semigroup {given} disagrees with the descriptor {} in {path}",
                file.semigroup
            )));
        }
    }
    Ok(file)
}

/// Write the report file if one was requested.
fn finish(job: Job, result: JobResult, path: Option<&str>) -> Result<(), Failure> {
    if let Some(path) = path {
        Report::new(job, result).save(path)?;
        eprintln!("report written to {path}");
    }
    Ok(())
}

fn parse_box(text: &str) -> Result<[u64; 2], Failure> {
    let parts = words::parse_tuple(text)?;
    match parts[..] {
        [a, m] if m >= 1 => Ok([a, m]),
        _ => Err(Failure::usage(format!(
            "--affine-box takes `A,M` with M ≥ 1, got `{text}`"
        ))),
    }
}

fn cmd_lcm(semigroup: &str, depth: usize, p: &str, q: &str) -> Result<u8, Failure> {
    let handle = Descriptor::parse(semigroup)?.build(depth)?;
    let p = words::parse_word(&handle, p)?;
    let q = words::parse_word(&handle, q)?;
    match handle.lcm(&p, &q) {
        Ok(LcmOutcome::Common(r)) => {
            println!("{}", words::render_element(&handle, &r));
            Ok(0)
        }
        Ok(LcmOutcome::Disjoint) => {
            println!("DISJOINT");
            Ok(0)
        }
        Err(e @ (SgError::BudgetExhausted { .. } | SgError::DepthGuard { .. })) => {
            eprintln!("undecided: {e} (raise --depth to continue the search)");
            Ok(2)
        }
        Err(e) => Err(Failure::usage(e.to_string())),
    }
}

fn cmd_verify(path: &str) -> Result<u8, Failure> {
    let recorded = Report::load(path)?;
    println!(
        "report: {} (recorded by {} {})",
        recorded.job.name(),
        recorded.tool,
        recorded.version
    );
    let rerun = match report::run_job(&recorded.job) {
        Ok(result) => result,
        Err(f) => {
            eprintln!(
                "verification FAILED: replay aborted with exit {} — {}",
                f.code, f.message
            );
            return Ok(1);
        }
    };
    match report::results_match(&recorded.result, &rerun) {
        Ok(()) => {
            println!("verification OK: replay reproduces the recorded result");
            Ok(0)
        }
        Err(diff) => {
            eprintln!("verification FAILED: {diff}");
            Ok(1)
        }
    }
}

fn print_check(result: &JobResult) -> u8 {
    let JobResult::Check {
        verdict,
        completeness,
        base_family,
        subsets,
        min_eigenvalue,
        witness_family,
        witness_lambda_min,
    } = result
    else {
        unreachable!("check job produced a non-check result");
    };
    println!(
        "base family ({}): {}",
        base_family.len(),
        base_family.join(", ")
    );
    println!("completeness: {completeness}");
    println!("subsets tested: {subsets}");
    println!("min eigenvalue: {min_eigenvalue:.6e}");
    if *verdict {
        println!("verdict: all Z operators positive semidefinite");
        0
    } else {
        let family = witness_family
            .as_ref()
            .map(|f| f.join(", "))
            .unwrap_or_default();
        let lambda = witness_lambda_min.unwrap_or(f64::NAN);
        println!("verdict: NOT positive");
        println!("witness F = {{{family}}}: lambda_min = {lambda:.6e}");
        1
    }
}

fn print_dilate(result: &JobResult, print_operators: bool) -> u8 {
    let JobResult::Dilate {
        dilated,
        gram_lambda_min,
        truncation,
        quotient_dim,
        dilation_residual,
        covariance_pairs_checked,
        covariance_pairs_skipped,
        covariance_max_residual,
        covariance_coverage,
        operators,
    } = result
    else {
        unreachable!("dilate job produced a non-dilate result");
    };
    println!("truncation: {} elements", truncation.len());
    println!("gram lambda_min: {gram_lambda_min:.6e}");
    if !dilated {
        println!("Gram not PSD: no isometric dilation exists on this truncation");
        return 1;
    }
    println!("quotient dimension: {quotient_dim}");
    println!("dilation residual: {dilation_residual:.3e}");
    println!(
        "covariance: {covariance_pairs_checked} pairs checked, \
         {covariance_pairs_skipped} skipped, max residual \
         {covariance_max_residual:.3e}, column coverage {:.1}%",
        covariance_coverage * 100.0
    );
    for op in operators {
        println!(
            "V({}): domain {} of {} columns",
            op.generator,
            op.domain_size,
            truncation.len()
        );
        if print_operators {
            for line in repfile::format_matrix(&op.matrix) {
                println!("  {line}");
            }
        }
    }
    0
}

fn print_certify(result: &JobResult) -> u8 {
    let JobResult::Certify {
        family,
        node_count,
        leaf_count,
        max_node_residual,
        flatten_residual,
        min_leaf_eigenvalue,
        all_leaves_psd,
        identities_hold,
    } = result
    else {
        unreachable!("certify job produced a non-certify result");
    };
    println!("family ({}): {}", family.len(), family.join(", "));
    println!("tree: {node_count} nodes, {leaf_count} leaves");
    println!("max node residual: {max_node_residual:.3e}");
    println!("flatten residual: {flatten_residual:.3e}");
    println!("min leaf eigenvalue: {min_leaf_eigenvalue:.6e}");
    if *all_leaves_psd && *identities_hold {
        println!("verdict: certified positive");
        0
    } else if !all_leaves_psd {
        println!("verdict: NOT certified (a base-case operator has a negative eigenvalue)");
        1
    } else {
        println!("verdict: NOT certified (rewriting identities exceed tolerance)");
        1
    }
}
