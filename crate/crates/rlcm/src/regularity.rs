//! Positivity analysis: the operator `Z(F)`, family strategies, reduction
//! certificates, and the doubly-commuting factorization test.
//!
//! For a verified representation `T` and a finite family `F`, the operator
//!
//! ```text
//! Z(F) = Σ_{U ⊆ F} (−1)^{|U|} · T(∨U) T(∨U)*
//! ```
//!
//! (empty-set term `+I`; subsets whose join is empty contribute nothing) is
//! positive semidefinite for every relevant `F` exactly when `T` dilates to
//! an isometric Nica-covariant representation. [`z_operator`] evaluates the
//! signed sum; [`check_star_regular`] runs it over the finite family of test
//! sets a [`Strategy`] prescribes and reports honestly whether that family
//! is complete for the semigroup or merely necessary;
//! [`reduction_certificate`] builds the binary tree that rewrites any `Z(F)`
//! as a positive combination of minimal-family terms; and
//! [`doubly_commuting_check`] verifies the product factorization of `Z`
//! available on complete-graph products.
//!
//! Subset terms inside one `Z(F)` are evaluated in parallel when the
//! `parallel` feature is on, then reduced strictly in subset-mask order, so
//! results are bit-identical to the sequential build.

use thiserror::Error;

use crate::linalg::{self, CMatrix};
use crate::par;
use crate::representation::{RepError, Representation};
use crate::semigroup::{Element, LcmOutcome, SemigroupHandle, SgError};
use crate::zoo;

/// Errors from the positivity layer.
#[derive(Debug, Error)]
pub enum RegError {
    /// Underlying semigroup arithmetic failed (budget, malformed input, …).
    #[error(transparent)]
    Semigroup(#[from] SgError),
    /// Representation evaluation failed.
    #[error(transparent)]
    Rep(#[from] RepError),
    /// The representation failed its relation/contractivity verification.
    #[error("representation is not verified: {summary}")]
    NotVerified {
        /// First few failure lines from the relation report.
        summary: String,
    },
    /// The strategy does not apply to this semigroup.
    #[error("strategy {strategy} is incompatible: {reason}")]
    Incompatible {
        /// Strategy name.
        strategy: &'static str,
        /// Why it does not apply.
        reason: String,
    },
    /// A Thompson-family check would need generator images beyond the
    /// tracked range.
    #[error("check needs images for atoms up to x{needed}, but only {active} are tracked")]
    GeneratorRangeExceeded {
        /// Highest atom index (inclusive) the check would evaluate.
        needed: usize,
        /// Number of tracked atoms.
        active: usize,
    },
    /// The certificate engine exceeded its node budget.
    #[error("certificate tree exceeded {limit} nodes")]
    CertificateBudget {
        /// The configured bound.
        limit: usize,
    },
}

fn require_verified(rep: &Representation) -> Result<(), RegError> {
    if rep.is_verified() {
        Ok(())
    } else {
        Err(RegError::NotVerified {
            summary: rep.relation_report().failures().join("; "),
        })
    }
}

// ---------------------------------------------------------------------------
// Z(F)
// ---------------------------------------------------------------------------

/// One subset term of a `Z(F)` evaluation.
#[derive(Debug, Clone)]
pub struct ZTerm {
    /// The subset `U`, in ascending element order.
    pub subset: Vec<Element>,
    /// `∨U` (the empty subset joins to the identity).
    pub join: LcmOutcome,
    /// `(−1)^{|U|}`.
    pub sign: i32,
}

/// The evaluated operator `Z(F)` with its spectral verdict.
#[derive(Debug, Clone)]
pub struct ZReport {
    /// The family, sorted ascending and deduplicated.
    pub family: Vec<Element>,
    /// All `2^{|F|}` subset terms in mask order.
    pub terms: Vec<ZTerm>,
    /// The signed sum, symmetrized.
    pub z: CMatrix,
    /// Smallest eigenvalue of the symmetrized sum.
    pub min_eigenvalue: f64,
    /// `min_eigenvalue ≥ −psd_eps`.
    pub verdict: bool,
    /// Number of subset terms skipped as disjoint (their contribution is 0).
    pub disjoint_terms: usize,
}

fn sorted_dedup(handle: &SemigroupHandle, family: &[Element]) -> Result<Vec<Element>, RegError> {
    let mut f = family.to_vec();
    for x in &f {
        handle.validate(x)?;
    }
    f.sort();
    f.dedup();
    Ok(f)
}

fn subset_of(family: &[Element], mask: usize) -> Vec<Element> {
    family
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, x)| x.clone())
        .collect()
}

/// Evaluate `Z(F)`; see the module docs for the sum convention.
pub fn z_operator(rep: &Representation, family: &[Element]) -> Result<ZReport, RegError> {
    z_operator_impl(rep, family, false)
}

/// Evaluate `Z(F)` on a graph product whose family members each live in a
/// single vertex monoid, skipping subsets whose vertex support is not a
/// clique. Two members at distinct non-adjacent vertices have disjoint
/// ideals, so the skipped subsets contribute 0 and the value agrees with
/// [`z_operator`]; skipping merely avoids pointless join computations. A
/// member spread across several vertices would break that argument, so such
/// families are rejected.
pub fn z_operator_clique_filtered(
    rep: &Representation,
    family: &[Element],
) -> Result<ZReport, RegError> {
    if !matches!(rep.handle(), SemigroupHandle::GraphProduct(_)) {
        return Err(RegError::Incompatible {
            strategy: "clique filter",
            reason: "the clique filter applies to graph products only".into(),
        });
    }
    for x in family {
        if crate::graph_product::gp_vertex_support(x)?.len() > 1 {
            return Err(RegError::Incompatible {
                strategy: "clique filter",
                reason: "every family member must be supported on one vertex".into(),
            });
        }
    }
    z_operator_impl(rep, family, true)
}

fn z_operator_impl(
    rep: &Representation,
    family: &[Element],
    clique_filter: bool,
) -> Result<ZReport, RegError> {
    require_verified(rep)?;
    let handle = rep.handle().clone();
    let family = sorted_dedup(&handle, family)?;
    if family.len() > 20 {
        return Err(RegError::Incompatible {
            strategy: "z_operator",
            reason: format!("family of {} elements needs 2^{} subset terms", family.len(), family.len()),
        });
    }
    let n_masks = 1usize << family.len();
    let clique_ok = |subset: &[Element]| -> Result<bool, RegError> {
        let SemigroupHandle::GraphProduct(data) = &handle else {
            return Ok(true);
        };
        let mut support = Vec::new();
        for x in subset {
            support.extend(crate::graph_product::gp_vertex_support(x)?);
        }
        support.sort_unstable();
        support.dedup();
        Ok(data.graph.is_clique(&support))
    };
    // Evaluate all subset terms (possibly in parallel), then reduce strictly
    // in mask order so the float sum is identical however terms were produced.
    let computed: Vec<Result<Option<(ZTerm, CMatrix)>, RegError>> =
        par::map_indexed(n_masks, |mask| {
            let subset = subset_of(&family, mask);
            if clique_filter && !clique_ok(&subset)? {
                return Ok(None);
            }
            let join = if subset.is_empty() {
                LcmOutcome::Common(handle.identity())
            } else {
                handle.lcm_set(&subset)?
            };
            let sign = if subset.len() % 2 == 0 { 1 } else { -1 };
            let term = rep.tt_star(&join)?;
            Ok(Some((
                ZTerm {
                    subset,
                    join,
                    sign,
                },
                term,
            )))
        });
    let mut z = CMatrix::zeros(rep.dim(), rep.dim());
    let mut terms = Vec::with_capacity(n_masks);
    let mut disjoint_terms = 0;
    for item in computed {
        let Some((term, matrix)) = item? else {
            disjoint_terms += 1;
            continue;
        };
        if matches!(term.join, LcmOutcome::Disjoint) {
            disjoint_terms += 1;
        }
        if term.sign > 0 {
            z += matrix;
        } else {
            z -= matrix;
        }
        terms.push(term);
    }
    let z = linalg::hermitize(&z);
    let min_eigenvalue = linalg::lambda_min(&z);
    let verdict = min_eigenvalue >= -rep.tolerances().psd_eps;
    Ok(ZReport {
        family,
        terms,
        z,
        min_eigenvalue,
        verdict,
        disjoint_terms,
    })
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

/// How to pick the family of test sets for [`check_star_regular`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// All subsets of the atom family (coordinate, free, and Artin handles).
    ArtinGenerators,
    /// All subsets of `{x_0, …, x_{K−1}}` on a Thompson handle.
    ThompsonGenerators(usize),
    /// All subsets of the affine minimal family with primes up to the bound.
    NxNMinimal(u64),
    /// All subsets of `{b} ∪ {bⁱa : 0 ≤ i < m}` on a `BS(n, m)⁺` handle.
    BsMinimal,
    /// All subsets of the union of per-vertex minimal families on a graph
    /// product whose components all have finite complete families.
    GraphProductMinimal,
    /// All subsets of size at most 3 of the ball of the given radius.
    GenericBounded(u64),
}

impl Strategy {
    fn name(&self) -> &'static str {
        match self {
            Strategy::ArtinGenerators => "ArtinGenerators",
            Strategy::ThompsonGenerators(_) => "ThompsonGenerators",
            Strategy::NxNMinimal(_) => "NxNMinimal",
            Strategy::BsMinimal => "BsMinimal",
            Strategy::GraphProductMinimal => "GraphProductMinimal",
            Strategy::GenericBounded(_) => "GenericBounded",
        }
    }
}

/// Whether a strategy's verdict settles regularity outright or only rules
/// out counterexamples within its truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completeness {
    /// Positivity over this family is equivalent to regularity.
    Complete,
    /// The family is a truncation of an infinite one; a pass is necessary
    /// evidence only (complete for representations supported on the
    /// truncation).
    NecessaryOnly {
        /// What was truncated.
        reason: String,
    },
}

/// Output of [`check_star_regular`].
#[derive(Debug, Clone)]
pub struct StarRegularReport {
    /// The strategy that ran.
    pub strategy: Strategy,
    /// Honest coverage statement for the verdict.
    pub completeness: Completeness,
    /// The base family `P` whose subsets were tested.
    pub base_family: Vec<Element>,
    /// One `Z(F)` report per test set, in enumeration order.
    pub reports: Vec<ZReport>,
    /// All test sets passed.
    pub verdict: bool,
    /// Index into `reports` of the first failing test set, if any.
    pub witness: Option<usize>,
}

/// The per-handle finite complete family used by the BS and graph-product
/// strategies: atoms where atoms suffice, `{b} ∪ {bⁱa}` for `BS(n, m)⁺`.
fn complete_base_family(handle: &SemigroupHandle) -> Result<Vec<Element>, RegError> {
    match handle {
        SemigroupHandle::Nk { .. }
        | SemigroupHandle::Free { .. }
        | SemigroupHandle::Artin { .. } => {
            Ok(handle.atoms().expect("atom-generated handles expose atoms"))
        }
        SemigroupHandle::Bs { m, .. } => {
            let mut out = vec![handle.element_from_word(&[1])?];
            for i in 0..*m {
                let mut w = vec![1u32; i as usize];
                w.push(0);
                out.push(handle.element_from_word(&w)?);
            }
            Ok(out)
        }
        SemigroupHandle::GraphProduct(data) => {
            let mut out = Vec::new();
            for (v, comp) in data.components.iter().enumerate() {
                for g in complete_base_family(comp)? {
                    out.push(handle.element_from_syllables(&[(v, g)])?);
                }
            }
            Ok(out)
        }
        SemigroupHandle::Thompson { .. } => Err(RegError::Incompatible {
            strategy: "GraphProductMinimal",
            reason: "Thompson components have no finite complete family".into(),
        }),
        SemigroupHandle::Affine => Err(RegError::Incompatible {
            strategy: "GraphProductMinimal",
            reason: "affine components have no finite complete family".into(),
        }),
    }
}

fn base_family_for(
    rep: &Representation,
    strategy: &Strategy,
) -> Result<(Vec<Element>, Completeness), RegError> {
    let handle = rep.handle();
    let incompatible = |reason: &str| RegError::Incompatible {
        strategy: strategy.name(),
        reason: reason.into(),
    };
    match (strategy, handle) {
        (Strategy::ArtinGenerators, SemigroupHandle::Nk { .. })
        | (Strategy::ArtinGenerators, SemigroupHandle::Free { .. })
        | (Strategy::ArtinGenerators, SemigroupHandle::Artin { .. }) => Ok((
            handle.atoms().expect("atom-generated handles expose atoms"),
            Completeness::Complete,
        )),
        (Strategy::ArtinGenerators, _) => Err(incompatible(
            "generator-subset checking applies to coordinate, free, and Artin handles",
        )),
        (Strategy::ThompsonGenerators(k), SemigroupHandle::Thompson { active, .. }) => {
            if *k == 0 {
                return Err(incompatible("need at least one generator"));
            }
            if k > active {
                return Err(RegError::GeneratorRangeExceeded {
                    needed: *k - 1,
                    active: *active,
                });
            }
            let family: Vec<Element> = (0..*k as u32)
                .map(|i| handle.element_from_word(&[i]))
                .collect::<Result<_, _>>()?;
            // Joins of tracked generators use higher atoms; make sure every
            // image the sum will need exists before spending any work.
            let mut needed = 0usize;
            for mask in 0usize..(1 << family.len()) {
                let subset = subset_of(&family, mask);
                if subset.is_empty() {
                    continue;
                }
                if let LcmOutcome::Common(r) = handle.lcm_set(&subset)? {
                    if let crate::semigroup::Payload::Word(w) = r.payload() {
                        needed = needed.max(
                            w.iter().map(|&a| a as usize + 1).max().unwrap_or(0),
                        );
                    }
                }
            }
            if needed > *active {
                return Err(RegError::GeneratorRangeExceeded {
                    needed: needed - 1,
                    active: *active,
                });
            }
            Ok((
                family,
                Completeness::NecessaryOnly {
                    reason: format!(
                        "the generator family is infinite; checked subsets of x0..x{}",
                        k - 1
                    ),
                },
            ))
        }
        (Strategy::ThompsonGenerators(_), _) => {
            Err(incompatible("this strategy applies to Thompson handles"))
        }
        (Strategy::NxNMinimal(bound), SemigroupHandle::Affine) => {
            let pairs = zoo::affine_minimal_generators(*bound);
            if pairs.len() > 16 {
                return Err(incompatible(&format!(
                    "prime bound {bound} yields {} base elements; lower the bound",
                    pairs.len()
                )));
            }
            let family: Vec<Element> = pairs
                .iter()
                .map(|&(a, m)| handle.element_from_affine(a, m))
                .collect::<Result<_, _>>()?;
            Ok((
                family,
                Completeness::NecessaryOnly {
                    reason: format!(
                        "the minimal family spans all primes; checked primes up to {bound}"
                    ),
                },
            ))
        }
        (Strategy::NxNMinimal(_), _) => {
            Err(incompatible("this strategy applies to the affine monoid"))
        }
        (Strategy::BsMinimal, SemigroupHandle::Bs { .. }) => {
            Ok((complete_base_family(handle)?, Completeness::Complete))
        }
        (Strategy::BsMinimal, _) => Err(incompatible("this strategy applies to BS handles")),
        (Strategy::GraphProductMinimal, SemigroupHandle::GraphProduct(_)) => {
            Ok((complete_base_family(handle)?, Completeness::Complete))
        }
        (Strategy::GraphProductMinimal, _) => {
            Err(incompatible("this strategy applies to graph products"))
        }
        (Strategy::GenericBounded(radius), _) => {
            let mut ball = handle.ball(*radius)?;
            ball.retain(|x| !handle.is_identity(x));
            Ok((
                ball,
                Completeness::NecessaryOnly {
                    reason: format!(
                        "length-bounded truncation: families of size ≤ 3 from the radius-{radius} ball"
                    ),
                },
            ))
        }
    }
}

/// Run the strategy's test sets through [`z_operator`] and aggregate.
pub fn check_star_regular(
    rep: &Representation,
    strategy: &Strategy,
) -> Result<StarRegularReport, RegError> {
    require_verified(rep)?;
    let (base_family, completeness) = base_family_for(rep, strategy)?;
    if base_family.len() > 16 {
        return Err(RegError::Incompatible {
            strategy: strategy.name(),
            reason: format!(
                "base family of {} elements needs 2^{} test sets",
                base_family.len(),
                base_family.len()
            ),
        });
    }
    let use_clique_filter = matches!(rep.handle(), SemigroupHandle::GraphProduct(_));
    let size_cap = match strategy {
        Strategy::GenericBounded(_) => Some(3usize),
        _ => None,
    };
    let mut reports = Vec::new();
    for mask in 0usize..(1 << base_family.len()) {
        if let Some(cap) = size_cap {
            if (mask.count_ones() as usize) > cap {
                continue;
            }
        }
        let family = subset_of(&base_family, mask);
        let report = if use_clique_filter {
            z_operator_clique_filtered(rep, &family)?
        } else {
            z_operator(rep, &family)?
        };
        reports.push(report);
    }
    let witness = reports.iter().position(|r| !r.verdict);
    Ok(StarRegularReport {
        strategy: strategy.clone(),
        completeness,
        base_family,
        verdict: witness.is_none(),
        witness,
        reports,
    })
}

// ---------------------------------------------------------------------------
// Reduction certificates
// ---------------------------------------------------------------------------

/// Why a certificate branch stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafKind {
    /// Every element lies in the designated minimal family.
    MinimalSet,
    /// The family contains an invertible element, so `Z = 0` exactly.
    ContainsInvertible,
    /// Duplicate principal ideals were removed and what remained was a base
    /// case.
    DuplicateIdealReduced,
}

/// A node of the reduction tree.
#[derive(Debug, Clone)]
pub enum CertTree {
    /// A base-case family.
    Leaf {
        /// The family at this leaf.
        family: Vec<Element>,
        /// Which base case applies.
        kind: LeafKind,
        /// `Z` of this family.
        z: CMatrix,
        /// Its smallest eigenvalue.
        lambda_min: f64,
    },
    /// One application of the two-child rewriting step.
    Node {
        /// The family at this node.
        family: Vec<Element>,
        /// The element that was split.
        split: Element,
        /// Its leading atom `p₁` (`split = p₁·q`).
        prefix: Element,
        /// Child on the `(F ∖ {split}) ∪ {p₁}` side.
        left: Box<CertTree>,
        /// Child on the quotient side `{q} ∪ {p₁⁻¹(p₁ ∨ pᵢ)}`.
        right: Box<CertTree>,
        /// Relative residual of `Z(F) − Z(F₁) − T(p₁) Z(F₂) T(p₁)*`.
        residual: f64,
        /// Duplicate ideals removed while forming the quotient family.
        duplicates_dropped: usize,
    },
}

impl CertTree {
    /// The family this subtree certifies.
    pub fn family(&self) -> &[Element] {
        match self {
            CertTree::Leaf { family, .. } | CertTree::Node { family, .. } => family,
        }
    }
}

/// One leaf of the flattened certificate: `Z(F) = Σ W Z(E) W*`.
#[derive(Debug, Clone)]
pub struct FlatLeaf {
    /// `W`: the ordered product of the prefixes along right branches.
    pub weight: CMatrix,
    /// The leaf family `E`.
    pub family: Vec<Element>,
    /// The leaf's base-case kind.
    pub kind: LeafKind,
    /// `Z(E)`.
    pub z: CMatrix,
    /// Smallest eigenvalue of `Z(E)`.
    pub lambda_min: f64,
}

/// A complete reduction certificate for one family.
#[derive(Debug, Clone)]
pub struct Certificate {
    /// The root family (sorted, deduplicated).
    pub root_family: Vec<Element>,
    /// `Z` of the root family.
    pub root_z: CMatrix,
    /// The reduction tree.
    pub tree: CertTree,
    /// Total node count.
    pub node_count: usize,
    /// Largest per-node relative residual.
    pub max_node_residual: f64,
    /// Relative residual of the flattened identity.
    pub flatten_residual: f64,
    /// The flattened leaves.
    pub leaves: Vec<FlatLeaf>,
    /// All leaf operators positive semidefinite.
    pub all_leaves_psd: bool,
}

const CERT_NODE_LIMIT: usize = 100_000;

struct CertBuilder<'a> {
    rep: &'a Representation,
    handle: SemigroupHandle,
    nodes: usize,
    max_residual: f64,
}

impl<'a> CertBuilder<'a> {
    fn build(&mut self, family: Vec<Element>) -> Result<CertTree, RegError> {
        self.nodes += 1;
        if self.nodes > CERT_NODE_LIMIT {
            return Err(RegError::CertificateBudget {
                limit: CERT_NODE_LIMIT,
            });
        }
        let mut f = family;
        f.sort();
        let before = f.len();
        f.dedup();
        let dropped_here = before - f.len();

        // Base case: an invertible member forces Z = 0.
        if f.iter().any(|x| self.handle.is_invertible(x)) {
            let z = z_operator(self.rep, &f)?;
            return Ok(CertTree::Leaf {
                family: f,
                kind: if dropped_here > 0 {
                    LeafKind::DuplicateIdealReduced
                } else {
                    LeafKind::ContainsInvertible
                },
                lambda_min: z.min_eigenvalue,
                z: z.z,
            });
        }
        // Base case: entirely inside the minimal family.
        let minimal = f
            .iter()
            .map(|x| self.handle.in_minimal_set(x))
            .collect::<Result<Vec<bool>, SgError>>()?;
        if minimal.iter().all(|&b| b) {
            let z = z_operator(self.rep, &f)?;
            return Ok(CertTree::Leaf {
                family: f,
                kind: if dropped_here > 0 {
                    LeafKind::DuplicateIdealReduced
                } else {
                    LeafKind::MinimalSet
                },
                lambda_min: z.min_eigenvalue,
                z: z.z,
            });
        }

        // Split the least non-minimal element x = p₁·q.
        let split_idx = minimal.iter().position(|&b| !b).expect("checked above");
        let split = f[split_idx].clone();
        let (prefix, q) = self
            .handle
            .split_leading_atom(&split)?
            .expect("non-minimal, non-invertible elements admit a split");
        let rest: Vec<Element> = f
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != split_idx)
            .map(|(_, x)| x.clone())
            .collect();

        let mut left_family = rest.clone();
        left_family.push(prefix.clone());

        let mut right_family = vec![q];
        for p in &rest {
            match self.handle.lcm(&prefix, p)? {
                LcmOutcome::Common(join) => {
                    let quotient = self
                        .handle
                        .left_divide(&prefix, &join)?
                        .expect("the join is a right multiple of the prefix");
                    right_family.push(quotient);
                }
                LcmOutcome::Disjoint => {}
            }
        }
        right_family.sort();
        let before_right = right_family.len();
        right_family.dedup();
        let duplicates_dropped = before_right - right_family.len();

        // Verify the node identity numerically before recursing.
        let z_f = z_operator(self.rep, &f)?;
        let z_left = z_operator(self.rep, &left_family)?;
        let z_right = z_operator(self.rep, &right_family)?;
        let t_prefix = self.rep.evaluate(&prefix)?;
        let reconstructed = &z_left.z + &t_prefix * &z_right.z * t_prefix.adjoint();
        let scale = linalg::operator_norm(&z_f.z).max(1.0);
        let residual = linalg::operator_norm(&(&z_f.z - reconstructed)) / scale;
        self.max_residual = self.max_residual.max(residual);

        let left = Box::new(self.build(left_family)?);
        let right = Box::new(self.build(right_family)?);
        Ok(CertTree::Node {
            family: f,
            split,
            prefix,
            left,
            right,
            residual,
            duplicates_dropped,
        })
    }
}

fn flatten(
    rep: &Representation,
    tree: &CertTree,
    weight: CMatrix,
    out: &mut Vec<FlatLeaf>,
) -> Result<(), RegError> {
    match tree {
        CertTree::Leaf {
            family,
            kind,
            z,
            lambda_min,
        } => {
            out.push(FlatLeaf {
                weight,
                family: family.clone(),
                kind: kind.clone(),
                z: z.clone(),
                lambda_min: *lambda_min,
            });
            Ok(())
        }
        CertTree::Node {
            prefix,
            left,
            right,
            ..
        } => {
            flatten(rep, left, weight.clone(), out)?;
            let shifted = &weight * rep.evaluate(prefix)?;
            flatten(rep, right, shifted, out)
        }
    }
}

fn count_nodes(tree: &CertTree) -> usize {
    match tree {
        CertTree::Leaf { .. } => 1,
        CertTree::Node { left, right, .. } => 1 + count_nodes(left) + count_nodes(right),
    }
}

/// Build and numerically verify a reduction certificate for `Z(F)`.
///
/// The tree rewrites `Z(F)` step by step into a sum
/// `Σ_i T(w_i) Z(E_i) T(w_i)*` whose families `E_i` are base cases; when all
/// leaf operators are positive semidefinite, the root operator provably is.
pub fn reduction_certificate(
    rep: &Representation,
    family: &[Element],
) -> Result<Certificate, RegError> {
    require_verified(rep)?;
    let handle = rep.handle().clone();
    let root_family = sorted_dedup(&handle, family)?;
    let mut builder = CertBuilder {
        rep,
        handle,
        nodes: 0,
        max_residual: 0.0,
    };
    let tree = builder.build(root_family.clone())?;
    let root_z = z_operator(rep, &root_family)?;
    let mut leaves = Vec::new();
    flatten(rep, &tree, linalg::identity(rep.dim()), &mut leaves)?;
    let mut sum = CMatrix::zeros(rep.dim(), rep.dim());
    for leaf in &leaves {
        sum += &leaf.weight * &leaf.z * leaf.weight.adjoint();
    }
    let scale = linalg::operator_norm(&root_z.z).max(1.0);
    let flatten_residual = linalg::operator_norm(&(&root_z.z - sum)) / scale;
    let psd_eps = rep.tolerances().psd_eps;
    let all_leaves_psd = leaves.iter().all(|l| l.lambda_min >= -psd_eps);
    Ok(Certificate {
        root_family,
        root_z: root_z.z,
        node_count: count_nodes(&tree),
        max_node_residual: builder.max_residual,
        flatten_residual,
        leaves,
        all_leaves_psd,
        tree,
    })
}

// ---------------------------------------------------------------------------
// Doubly-commuting factorization
// ---------------------------------------------------------------------------

/// One sampled family in a [`FactorizationReport`].
#[derive(Debug, Clone)]
pub struct FactorSample {
    /// The family, each member supported on a single vertex.
    pub family: Vec<Element>,
    /// `‖Z(F) − Π_w Z_w(F_w)‖`.
    pub residual: f64,
    /// Verdict of the joint `Z(F)`.
    pub joint_verdict: bool,
    /// Per-vertex verdicts of the component operators `Z_w(F_w)`.
    pub component_verdicts: Vec<(usize, bool)>,
}

/// Output of [`doubly_commuting_check`].
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    /// All cross-vertex generator pairs commute with each other and with
    /// each other's adjoints.
    pub doubly_commuting: bool,
    /// Largest commutant residual over generator pairs.
    pub max_commutant_residual: f64,
    /// Per-family factorization results (empty if not doubly commuting).
    pub samples: Vec<FactorSample>,
    /// Largest factorization residual over the samples.
    pub max_factorization_residual: f64,
}

/// On a complete-graph product, test whether the component representations
/// doubly commute, and if so verify `Z(F) = Π_w Z_w(F_w)` on the given
/// families (each family member must be a single syllable).
pub fn doubly_commuting_check(
    rep: &Representation,
    families: &[Vec<Element>],
) -> Result<FactorizationReport, RegError> {
    require_verified(rep)?;
    let SemigroupHandle::GraphProduct(data) = rep.handle() else {
        return Err(RegError::Incompatible {
            strategy: "doubly_commuting_check",
            reason: "applies to graph products only".into(),
        });
    };
    let n = data.components.len();
    for u in 0..n {
        for v in (u + 1)..n {
            if !data.graph.are_adjacent(u, v) {
                return Err(RegError::Incompatible {
                    strategy: "doubly_commuting_check",
                    reason: format!(
                        "vertices {} and {} are not adjacent; the factorization needs a complete graph",
                        data.vertex_names[u], data.vertex_names[v]
                    ),
                });
            }
        }
    }

    // Generator-level double commutation: [A, B] = 0 and [A, B*] = 0 for
    // images at distinct vertices.
    let mut max_commutant_residual: f64 = 0.0;
    let by_vertex: Vec<Vec<&CMatrix>> = (0..n)
        .map(|v| {
            rep.keys()
                .filter(|k| matches!(k, crate::representation::GenKey::Vertex(u, _) if *u == v))
                .map(|k| rep.image(k).expect("listed key"))
                .collect()
        })
        .collect();
    for u in 0..n {
        for v in (u + 1)..n {
            for a in &by_vertex[u] {
                for b in &by_vertex[v] {
                    let plain = linalg::operator_norm(&(*a * *b - *b * *a));
                    let adjoint = linalg::operator_norm(&(*a * b.adjoint() - b.adjoint() * *a));
                    max_commutant_residual = max_commutant_residual.max(plain).max(adjoint);
                }
            }
        }
    }
    let doubly_commuting = max_commutant_residual <= 10.0 * rep.tolerances().identity_eps;
    if !doubly_commuting {
        return Ok(FactorizationReport {
            doubly_commuting,
            max_commutant_residual,
            samples: Vec::new(),
            max_factorization_residual: f64::NAN,
        });
    }

    let component_reps: Vec<Representation> = (0..n)
        .map(|v| rep.component(v))
        .collect::<Result<_, _>>()?;
    let mut samples = Vec::new();
    let mut max_factorization_residual: f64 = 0.0;
    for family in families {
        // Group the family by supporting vertex; reject multi-vertex members.
        let mut per_vertex: Vec<Vec<Element>> = vec![Vec::new(); n];
        for x in family {
            let sylls = crate::graph_product::syllables(x)?;
            match sylls {
                [] => per_vertex[0].push(data.components[0].identity()),
                [(v, g)] => per_vertex[*v].push(g.clone()),
                _ => {
                    return Err(RegError::Incompatible {
                        strategy: "doubly_commuting_check",
                        reason: format!(
                            "family member {x:?} spans several vertices; the factorization is stated for single-vertex families"
                        ),
                    })
                }
            }
        }
        let joint = z_operator(rep, family)?;
        let mut product = linalg::identity(rep.dim());
        let mut component_verdicts = Vec::new();
        for v in 0..n {
            let zv = z_operator(&component_reps[v], &per_vertex[v])?;
            component_verdicts.push((v, zv.verdict));
            product *= zv.z;
        }
        let residual = linalg::operator_norm(&(&joint.z - product));
        max_factorization_residual = max_factorization_residual.max(residual);
        samples.push(FactorSample {
            family: family.clone(),
            residual,
            joint_verdict: joint.verdict,
            component_verdicts,
        });
    }
    Ok(FactorizationReport {
        doubly_commuting,
        max_commutant_residual,
        samples,
        max_factorization_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::creal;
    use crate::representation::GenKey;
    use crate::semigroup::SemigroupHandle;

    fn scalar_rep(handle: SemigroupHandle, entries: &[(GenKey, f64)]) -> Representation {
        let images = entries
            .iter()
            .map(|(k, t)| (k.clone(), CMatrix::from_element(1, 1, creal(*t))))
            .collect();
        Representation::assemble(handle, 1, images, Default::default()).unwrap()
    }

    #[test]
    fn unitary_scalars_collapse_z_to_zero() {
        let h = SemigroupHandle::nk(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 1.0), (GenKey::Atom(1), 1.0)],
        );
        let f = h.atoms().unwrap();
        let report = z_operator(&rep, &f).unwrap();
        assert!(report.z[(0, 0)].norm() < 1e-14);
        assert!(report.verdict);
    }

    #[test]
    fn free_unit_scalars_witness_failure() {
        let h = SemigroupHandle::free(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 1.0), (GenKey::Atom(1), 1.0)],
        );
        let f = h.atoms().unwrap();
        let report = z_operator(&rep, &f).unwrap();
        // 1 − 1 − 1 + 0 = −1: the canonical non-regular witness.
        assert!((report.z[(0, 0)].re + 1.0).abs() < 1e-14);
        assert!(!report.verdict);
        assert_eq!(report.disjoint_terms, 1);
    }

    #[test]
    fn row_contraction_threshold() {
        let h = SemigroupHandle::free(2).unwrap();
        let t = 1.0 / 2f64.sqrt();
        let ok = scalar_rep(h.clone(), &[(GenKey::Atom(0), t), (GenKey::Atom(1), t)]);
        let f = h.atoms().unwrap();
        assert!(z_operator(&ok, &f).unwrap().verdict);
        let bad = scalar_rep(h.clone(), &[(GenKey::Atom(0), 0.9), (GenKey::Atom(1), 0.9)]);
        let rep_bad = z_operator(&bad, &f).unwrap();
        assert!(!rep_bad.verdict);
        assert!((rep_bad.min_eigenvalue - (1.0 - 0.81 - 0.81)).abs() < 1e-12);
    }

    #[test]
    fn check_star_regular_counts_bs_subsets() {
        let h = crate::reversing::build_bs(2, 3).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 0.5), (GenKey::Atom(1), 1.0)],
        );
        let report = check_star_regular(&rep, &Strategy::BsMinimal).unwrap();
        assert_eq!(report.base_family.len(), 4);
        assert_eq!(report.reports.len(), 16);
        assert_eq!(report.completeness, Completeness::Complete);
        assert!(report.verdict);
    }

    #[test]
    fn certificate_on_coordinates() {
        let h = SemigroupHandle::nk(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 0.6), (GenKey::Atom(1), 0.7)],
        );
        let f = vec![
            h.element_from_coords(&[2, 0]).unwrap(),
            h.element_from_coords(&[0, 1]).unwrap(),
        ];
        let cert = reduction_certificate(&rep, &f).unwrap();
        assert!(cert.max_node_residual < 1e-12, "{}", cert.max_node_residual);
        assert!(cert.flatten_residual < 1e-12);
        assert!(cert.all_leaves_psd);
        assert!(cert.node_count >= 3);
    }

    #[test]
    fn certificate_identity_leaf() {
        let h = SemigroupHandle::nk(1).unwrap();
        let rep = scalar_rep(h.clone(), &[(GenKey::Atom(0), 0.5)]);
        let f = vec![
            h.identity(),
            h.element_from_coords(&[1]).unwrap(),
        ];
        let cert = reduction_certificate(&rep, &f).unwrap();
        assert!(matches!(
            cert.tree,
            CertTree::Leaf {
                kind: LeafKind::ContainsInvertible,
                ..
            }
        ));
        assert!(linalg::operator_norm(&cert.root_z) < 1e-14);
    }

    #[test]
    fn thompson_strategy_reports_needed_range() {
        let h = crate::reversing::build_thompson(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 1.0), (GenKey::Atom(1), 1.0)],
        );
        // x0 ∨ x1 = x0·x2 needs the image of x2: only 2 atoms are tracked.
        let err = check_star_regular(&rep, &Strategy::ThompsonGenerators(2)).unwrap_err();
        assert!(matches!(
            err,
            RegError::GeneratorRangeExceeded { needed: 2, active: 2 }
        ));
    }
}
