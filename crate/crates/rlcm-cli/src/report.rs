//! Machine-readable reports. A report records the complete job — descriptor,
//! representation, and flags — next to its outcome, so `rlcm verify` can
//! replay the job from the report alone and confirm the recorded result.

use serde::{Deserialize, Serialize};

use rlcm::dilation::{
    self, naimark_truncated, verify_dilation_property, verify_nica_covariance, DilationError,
    Kernel,
};
use rlcm::regularity::{check_star_regular, reduction_certificate, Completeness, RegError, Strategy};
use rlcm::semigroup::{Element, SemigroupHandle, SgError};
use rlcm::{zoo, Tolerances};

use crate::repfile::{matrix_to_data, MatrixData, RepFile};
use crate::words::{parse_word, render_element};
use crate::Failure;

/// Rewriting identities of a certificate must hold to this relative
/// precision for `certify` to exit 0.
pub const CERT_IDENTITY_BOUND: f64 = 1e-8;

/// Floats in a replayed result may drift from the recorded value by this
/// much (relative to scale) before `verify` reports a mismatch.
pub const VERIFY_FLOAT_SLACK: f64 = 1e-6;

/// A complete report file.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    /// Producing tool, always `rlcm`.
    pub tool: String,
    /// Producing version.
    pub version: String,
    /// Everything needed to run the job again.
    pub job: Job,
    /// What the job produced.
    pub result: JobResult,
}

impl Report {
    /// Wrap a finished job in the report envelope.
    pub fn new(job: Job, result: JobResult) -> Report {
        Report {
            tool: "rlcm".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            job,
            result,
        }
    }

    /// Write the report as pretty-printed JSON.
    pub fn save(&self, path: &str) -> Result<(), Failure> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| Failure::internal(format!("serializing report: {e}")))?;
        std::fs::write(path, body)
            .map_err(|e| Failure::data(format!("cannot write report {path}: {e}")))
    }

    /// Read a report back.
    pub fn load(path: &str) -> Result<Report, Failure> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| Failure::data(format!("cannot read report {path}: {e}")))?;
        serde_json::from_str(&body)
            .map_err(|e| Failure::data(format!("report file {path}: {e}")))
    }
}

/// A replayable job: the command, its inputs, and every flag that affects
/// the outcome.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Job {
    /// `rlcm check`.
    Check {
        /// The representation, embedded in full.
        representation: RepFile,
        /// Family strategy name as given on the command line.
        strategy: String,
        /// Largest prime in the affine generator family.
        prime_bound: u64,
        /// Reversing step budget.
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        tol_null: f64,
    },
    /// `rlcm dilate`.
    Dilate {
        /// The representation, embedded in full.
        representation: RepFile,
        /// Ball radius of the truncation.
        radius: u64,
        /// Affine truncation box, when the semigroup is `nxn`.
        affine_box: Option<[u64; 2]>,
        /// Largest prime in the affine generator family.
        prime_bound: u64,
        /// Reversing step budget.
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        tol_null: f64,
    },
    /// `rlcm certify`.
    Certify {
        /// The representation, embedded in full.
        representation: RepFile,
        /// The family, in word syntax.
        family: Vec<String>,
        /// Reversing step budget.
        depth: usize,
        /// Eigenvalue slack below zero still counted as positive.
        tol_psd: f64,
        /// Relative spectral cutoff for rank decisions.
        tol_null: f64,
    },
}

impl Job {
    /// The subcommand name, for display.
    pub fn name(&self) -> &'static str {
        match self {
            Job::Check { .. } => "check",
            Job::Dilate { .. } => "dilate",
            Job::Certify { .. } => "certify",
        }
    }
}

/// One dilated operator in a dilate result.
#[derive(Debug, Serialize, Deserialize)]
pub struct OperatorEntry {
    /// The generator, in word syntax.
    pub generator: String,
    /// Number of truncation columns the shift action is defined on.
    pub domain_size: usize,
    /// The operator matrix on the quotient space.
    pub matrix: MatrixData,
}

/// The outcome of a job.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JobResult {
    /// Outcome of `check`.
    Check {
        /// All tested operators positive semidefinite.
        verdict: bool,
        /// Coverage of the verdict: `complete`, or `necessary-only (…)`.
        completeness: String,
        /// The base family, in word syntax.
        base_family: Vec<String>,
        /// Number of subsets tested.
        subsets: usize,
        /// Smallest eigenvalue across all tested operators.
        min_eigenvalue: f64,
        /// The first failing family, when the verdict is negative.
        witness_family: Option<Vec<String>>,
        /// Its smallest eigenvalue.
        witness_lambda_min: Option<f64>,
    },
    /// Outcome of `dilate`.
    Dilate {
        /// Whether a dilation was constructed (the Gram matrix was PSD).
        dilated: bool,
        /// Smallest eigenvalue of the truncation's Gram matrix.
        gram_lambda_min: f64,
        /// The truncation, in word syntax.
        truncation: Vec<String>,
        /// Dimension of the dilation space.
        quotient_dim: usize,
        /// Largest defect of the compression identity and the isometry
        /// property on operator domains.
        dilation_residual: f64,
        /// Covariance pairs with at least one applicable column.
        covariance_pairs_checked: usize,
        /// Covariance pairs with no applicable column.
        covariance_pairs_skipped: usize,
        /// Largest covariance residual.
        covariance_max_residual: f64,
        /// Mean fraction of applicable columns over checked pairs.
        covariance_coverage: f64,
        /// The dilated generators.
        operators: Vec<OperatorEntry>,
    },
    /// Outcome of `certify`.
    Certify {
        /// The root family, in word syntax.
        family: Vec<String>,
        /// Number of tree nodes.
        node_count: usize,
        /// Number of flattened leaves.
        leaf_count: usize,
        /// Largest per-node rewriting residual (relative).
        max_node_residual: f64,
        /// Residual of the flattened sum against the root operator
        /// (relative).
        flatten_residual: f64,
        /// Smallest eigenvalue over all leaf operators.
        min_leaf_eigenvalue: f64,
        /// Every leaf operator positive semidefinite.
        all_leaves_psd: bool,
        /// Both rewriting residuals within [`CERT_IDENTITY_BOUND`].
        identities_hold: bool,
    },
}

/// Run a job to completion. Budget exhaustion, relation failures, and
/// malformed inputs surface as [`Failure`] with the documented exit codes;
/// negative verdicts are ordinary results.
pub fn run_job(job: &Job) -> Result<JobResult, Failure> {
    match job {
        Job::Check {
            representation,
            strategy,
            prime_bound,
            depth,
            tol_psd,
            tol_null,
        } => {
            let (handle, rep) = assemble(representation, *depth, *tol_psd, *tol_null)?;
            let strategy = parse_strategy(strategy, &handle, *prime_bound)?;
            let report = check_star_regular(&rep, &strategy).map_err(classify_reg)?;
            let min_eigenvalue = report
                .reports
                .iter()
                .map(|r| r.min_eigenvalue)
                .fold(f64::INFINITY, f64::min);
            let witness = report.witness.map(|i| &report.reports[i]);
            Ok(JobResult::Check {
                verdict: report.verdict,
                completeness: completeness_string(&report.completeness),
                base_family: render_all(&handle, &report.base_family),
                subsets: report.reports.len(),
                min_eigenvalue,
                witness_family: witness.map(|r| render_all(&handle, &r.family)),
                witness_lambda_min: witness.map(|r| r.min_eigenvalue),
            })
        }
        Job::Dilate {
            representation,
            radius,
            affine_box,
            prime_bound,
            depth,
            tol_psd,
            tol_null,
        } => {
            let (handle, rep) = assemble(representation, *depth, *tol_psd, *tol_null)?;
            let truncation = truncation_set(&handle, *radius, *affine_box)?;
            let rendered = render_all(&handle, &truncation);
            let kernel = Kernel::new(rep).map_err(classify_dil)?;
            let gram_lambda_min = kernel.gram(&truncation).map_err(classify_dil)?.lambda_min;
            let dilation = match naimark_truncated(kernel, &truncation) {
                Ok(d) => d,
                Err(DilationError::GramNotPsd { lambda_min }) => {
                    return Ok(JobResult::Dilate {
                        dilated: false,
                        gram_lambda_min: lambda_min,
                        truncation: rendered,
                        quotient_dim: 0,
                        dilation_residual: 0.0,
                        covariance_pairs_checked: 0,
                        covariance_pairs_skipped: 0,
                        covariance_max_residual: 0.0,
                        covariance_coverage: 0.0,
                        operators: Vec::new(),
                    })
                }
                Err(e) => return Err(classify_dil(e)),
            };
            let generators = generator_family(&handle, *prime_bound)?;
            let mut pairs = Vec::new();
            for p in &generators {
                for q in &generators {
                    pairs.push((p.clone(), q.clone()));
                }
            }
            let covariance =
                verify_nica_covariance(&dilation, &pairs).map_err(classify_dil)?;
            let dilation_residual =
                verify_dilation_property(&dilation).map_err(classify_dil)?;
            let mut operators = Vec::new();
            for g in &generators {
                let v = dilation.partial_isometry(g).map_err(classify_dil)?;
                operators.push(OperatorEntry {
                    generator: render_element(&handle, g),
                    domain_size: v.domain.len(),
                    matrix: matrix_to_data(&v.matrix),
                });
            }
            Ok(JobResult::Dilate {
                dilated: true,
                gram_lambda_min,
                truncation: rendered,
                quotient_dim: dilation.quotient_dim(),
                dilation_residual,
                covariance_pairs_checked: covariance.pairs_checked,
                covariance_pairs_skipped: covariance.pairs_skipped,
                covariance_max_residual: covariance.max_residual,
                covariance_coverage: covariance.coverage,
                operators,
            })
        }
        Job::Certify {
            representation,
            family,
            depth,
            tol_psd,
            tol_null,
        } => {
            let (handle, rep) = assemble(representation, *depth, *tol_psd, *tol_null)?;
            let family: Vec<Element> = family
                .iter()
                .map(|w| parse_word(&handle, w))
                .collect::<Result<_, _>>()?;
            let cert = reduction_certificate(&rep, &family).map_err(classify_reg)?;
            let min_leaf_eigenvalue = cert
                .leaves
                .iter()
                .map(|l| l.lambda_min)
                .fold(f64::INFINITY, f64::min);
            Ok(JobResult::Certify {
                family: render_all(&handle, &cert.root_family),
                node_count: cert.node_count,
                leaf_count: cert.leaves.len(),
                max_node_residual: cert.max_node_residual,
                flatten_residual: cert.flatten_residual,
                min_leaf_eigenvalue,
                all_leaves_psd: cert.all_leaves_psd,
                identities_hold: cert.max_node_residual <= CERT_IDENTITY_BOUND
                    && cert.flatten_residual <= CERT_IDENTITY_BOUND,
            })
        }
    }
}

/// Compare a replayed result against the recorded one. Verdicts, counts,
/// and families must agree exactly; floating-point summaries may drift by
/// [`VERIFY_FLOAT_SLACK`].
pub fn results_match(recorded: &JobResult, rerun: &JobResult) -> Result<(), String> {
    match (recorded, rerun) {
        (
            JobResult::Check {
                verdict: v1,
                completeness: c1,
                base_family: b1,
                subsets: s1,
                min_eigenvalue: m1,
                witness_family: w1,
                witness_lambda_min: l1,
            },
            JobResult::Check {
                verdict: v2,
                completeness: c2,
                base_family: b2,
                subsets: s2,
                min_eigenvalue: m2,
                witness_family: w2,
                witness_lambda_min: l2,
            },
        ) => {
            exact(v1, v2, "verdict")?;
            exact(c1, c2, "completeness")?;
            exact(b1, b2, "base family")?;
            exact(s1, s2, "subset count")?;
            close(*m1, *m2, "min eigenvalue")?;
            exact(w1, w2, "witness family")?;
            match (l1, l2) {
                (Some(a), Some(b)) => close(*a, *b, "witness lambda_min"),
                (None, None) => Ok(()),
                _ => Err("witness lambda_min presence differs".into()),
            }
        }
        (
            JobResult::Dilate {
                dilated: d1,
                gram_lambda_min: g1,
                truncation: t1,
                quotient_dim: q1,
                dilation_residual: r1,
                covariance_pairs_checked: pc1,
                covariance_pairs_skipped: ps1,
                covariance_max_residual: cm1,
                covariance_coverage: cc1,
                operators: o1,
            },
            JobResult::Dilate {
                dilated: d2,
                gram_lambda_min: g2,
                truncation: t2,
                quotient_dim: q2,
                dilation_residual: r2,
                covariance_pairs_checked: pc2,
                covariance_pairs_skipped: ps2,
                covariance_max_residual: cm2,
                covariance_coverage: cc2,
                operators: o2,
            },
        ) => {
            exact(d1, d2, "dilated flag")?;
            close(*g1, *g2, "gram lambda_min")?;
            exact(t1, t2, "truncation")?;
            exact(q1, q2, "quotient dimension")?;
            close(*r1, *r2, "dilation residual")?;
            exact(pc1, pc2, "covariance pairs checked")?;
            exact(ps1, ps2, "covariance pairs skipped")?;
            close(*cm1, *cm2, "covariance max residual")?;
            close(*cc1, *cc2, "covariance coverage")?;
            if o1.len() != o2.len() {
                return Err(format!(
                    "operator count differs: recorded {}, replay {}",
                    o1.len(),
                    o2.len()
                ));
            }
            for (a, b) in o1.iter().zip(o2) {
                exact(&a.generator, &b.generator, "operator generator")?;
                exact(&a.domain_size, &b.domain_size, "operator domain size")?;
                matrices_close(&a.matrix, &b.matrix, &a.generator)?;
            }
            Ok(())
        }
        (
            JobResult::Certify {
                family: f1,
                node_count: n1,
                leaf_count: l1,
                max_node_residual: mn1,
                flatten_residual: fl1,
                min_leaf_eigenvalue: me1,
                all_leaves_psd: p1,
                identities_hold: i1,
            },
            JobResult::Certify {
                family: f2,
                node_count: n2,
                leaf_count: l2,
                max_node_residual: mn2,
                flatten_residual: fl2,
                min_leaf_eigenvalue: me2,
                all_leaves_psd: p2,
                identities_hold: i2,
            },
        ) => {
            exact(f1, f2, "family")?;
            exact(n1, n2, "node count")?;
            exact(l1, l2, "leaf count")?;
            close(*mn1, *mn2, "max node residual")?;
            close(*fl1, *fl2, "flatten residual")?;
            close(*me1, *me2, "min leaf eigenvalue")?;
            exact(p1, p2, "leaf positivity")?;
            exact(i1, i2, "identity verdict")?;
            Ok(())
        }
        _ => Err("recorded result and replay have different kinds".into()),
    }
}

fn exact<T: PartialEq + std::fmt::Debug>(a: &T, b: &T, what: &str) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what} differs: recorded {a:?}, replay {b:?}"))
    }
}

fn close(a: f64, b: f64, what: &str) -> Result<(), String> {
    let scale = a.abs().max(b.abs()).max(1.0);
    if (a - b).abs() <= VERIFY_FLOAT_SLACK * scale {
        Ok(())
    } else {
        Err(format!("{what} differs: recorded {a:.9e}, replay {b:.9e}"))
    }
}

fn matrices_close(a: &MatrixData, b: &MatrixData, name: &str) -> Result<(), String> {
    if a.len() != b.len() || a.iter().zip(b).any(|(r, s)| r.len() != s.len()) {
        return Err(format!("operator {name} changed shape"));
    }
    for (ra, rb) in a.iter().zip(b) {
        for (&[re1, im1], &[re2, im2]) in ra.iter().zip(rb) {
            if (re1 - re2).abs() > VERIFY_FLOAT_SLACK || (im1 - im2).abs() > VERIFY_FLOAT_SLACK {
                return Err(format!("operator {name} entries differ"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared job plumbing
// ---------------------------------------------------------------------------

/// Assemble and verify; a representation that fails its relations is exit 4.
fn assemble(
    file: &RepFile,
    depth: usize,
    tol_psd: f64,
    tol_null: f64,
) -> Result<(SemigroupHandle, rlcm::representation::Representation), Failure> {
    let tol = Tolerances {
        psd_eps: tol_psd,
        null_eps: tol_null,
        ..Tolerances::default()
    };
    let (handle, rep) = file.assemble(depth, tol)?;
    if !rep.is_verified() {
        return Err(Failure::relations(format!(
            "representation fails verification: {}",
            rep.relation_report().failures().join("; ")
        )));
    }
    Ok((handle, rep))
}

fn render_all(handle: &SemigroupHandle, elements: &[Element]) -> Vec<String> {
    elements.iter().map(|x| render_element(handle, x)).collect()
}

fn completeness_string(c: &Completeness) -> String {
    match c {
        Completeness::Complete => "complete".into(),
        Completeness::NecessaryOnly { reason } => format!("necessary-only ({reason})"),
    }
}

/// Resolve a strategy name against the handle.
fn parse_strategy(
    text: &str,
    handle: &SemigroupHandle,
    prime_bound: u64,
) -> Result<Strategy, Failure> {
    match text {
        "auto" => Ok(auto_strategy(handle, prime_bound)),
        "atoms" => Ok(Strategy::ArtinGenerators),
        "bs" => Ok(Strategy::BsMinimal),
        "graph" => Ok(Strategy::GraphProductMinimal),
        "nxn" => Ok(Strategy::NxNMinimal(prime_bound)),
        "thompson" => match handle {
            SemigroupHandle::Thompson { active, .. } => {
                Ok(Strategy::ThompsonGenerators(*active))
            }
            _ => Err(Failure::usage(
                "--strategy thompson needs a thompson:K semigroup",
            )),
        },
        _ => {
            if let Some(arg) = text.strip_prefix("thompson:") {
                let k = arg.parse::<usize>().map_err(|_| {
                    Failure::usage(format!("--strategy thompson:K takes a count, got `{arg}`"))
                })?;
                return Ok(Strategy::ThompsonGenerators(k));
            }
            if let Some(arg) = text.strip_prefix("bounded:") {
                let radius = arg.parse::<u64>().map_err(|_| {
                    Failure::usage(format!(
                        "--strategy bounded:RADIUS takes a radius, got `{arg}`"
                    ))
                })?;
                return Ok(Strategy::GenericBounded(radius));
            }
            Err(Failure::usage(format!(
                "unknown strategy `{text}` (expected auto, atoms, thompson[:K], nxn, bs, \
                 graph, or bounded:RADIUS)"
            )))
        }
    }
}

fn auto_strategy(handle: &SemigroupHandle, prime_bound: u64) -> Strategy {
    match handle {
        SemigroupHandle::Nk { .. }
        | SemigroupHandle::Free { .. }
        | SemigroupHandle::Artin { .. } => Strategy::ArtinGenerators,
        SemigroupHandle::Thompson { active, .. } => Strategy::ThompsonGenerators(*active),
        SemigroupHandle::Bs { .. } => Strategy::BsMinimal,
        SemigroupHandle::Affine => Strategy::NxNMinimal(prime_bound),
        SemigroupHandle::GraphProduct(_) => Strategy::GraphProductMinimal,
    }
}

/// The truncation a dilation runs on: the length ball, or the box for the
/// affine monoid.
fn truncation_set(
    handle: &SemigroupHandle,
    radius: u64,
    affine_box: Option<[u64; 2]>,
) -> Result<Vec<Element>, Failure> {
    match (handle, affine_box) {
        (SemigroupHandle::Affine, boxed) => {
            let [a_max, m_max] = boxed.unwrap_or([3, 4]);
            dilation::affine_truncation(a_max, m_max).map_err(classify_dil)
        }
        (_, Some(_)) => Err(Failure::usage(
            "--affine-box applies to the nxn semigroup only",
        )),
        _ => dilation::default_truncation(handle, radius).map_err(classify_dil),
    }
}

/// The generators a dilation reports operators for: the atoms, or the
/// translation plus the prime dilations for the affine monoid.
fn generator_family(
    handle: &SemigroupHandle,
    prime_bound: u64,
) -> Result<Vec<Element>, Failure> {
    if let Some(atoms) = handle.atoms() {
        return Ok(atoms);
    }
    let mut out = vec![handle
        .element_from_affine(1, 1)
        .map_err(|e| Failure::internal(e.to_string()))?];
    for p in zoo::primes_up_to(prime_bound) {
        out.push(
            handle
                .element_from_affine(0, p)
                .map_err(|e| Failure::internal(e.to_string()))?,
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Error classification
// ---------------------------------------------------------------------------

fn classify_sg(e: &SgError) -> Failure {
    match e {
        SgError::BudgetExhausted { .. } | SgError::DepthGuard { .. } => {
            Failure::inconclusive(format!("{e} (raise --depth to continue the search)"))
        }
        SgError::Malformed(_) => Failure::data(e.to_string()),
        SgError::CapabilityViolation { .. } => Failure::usage(e.to_string()),
    }
}

fn classify_reg(e: RegError) -> Failure {
    match &e {
        RegError::Semigroup(s) => classify_sg(s),
        RegError::Rep(_) => Failure::data(e.to_string()),
        RegError::NotVerified { .. } => Failure::relations(e.to_string()),
        RegError::Incompatible { .. } => Failure::usage(e.to_string()),
        RegError::GeneratorRangeExceeded { .. } | RegError::CertificateBudget { .. } => {
            Failure::inconclusive(e.to_string())
        }
    }
}

fn classify_dil(e: DilationError) -> Failure {
    match &e {
        DilationError::Semigroup(s) => classify_sg(s),
        DilationError::Rep(_) => Failure::data(e.to_string()),
        DilationError::Reg(r) => match r {
            RegError::Semigroup(s) => classify_sg(s),
            RegError::NotVerified { .. } => Failure::relations(e.to_string()),
            _ => Failure::data(e.to_string()),
        },
        DilationError::Linalg(_) => Failure::internal(e.to_string()),
        DilationError::BadTruncation(_) | DilationError::TruncationInsufficient(_) => {
            Failure::usage(e.to_string())
        }
        DilationError::GramNotPsd { .. } | DilationError::SubsetNotPsd { .. } => {
            Failure::internal(format!("unhandled positivity failure: {e}"))
        }
    }
}
