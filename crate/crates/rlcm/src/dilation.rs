//! The positivity kernel, its Gram matrices, truncated isometric dilations,
//! and the subset-indexed Cholesky factorization.
//!
//! For a verified representation `T`, the kernel
//!
//! ```text
//! K(p, q) = T(p⁻¹s) T(q⁻¹s)*   for s the right LCM of p and q,
//! K(p, q) = 0                  when the ideals are disjoint,
//! ```
//!
//! is the complete positivity data of `T`: it is positive semidefinite on
//! every finite truncation exactly when `T` dilates to an isometric
//! Nica-covariant family. [`Kernel`] memoises evaluations; [`Kernel::gram`]
//! assembles the block Gram matrix of a truncation; [`naimark_truncated`]
//! carries out the GNS-style construction on the truncation, returning
//! partial isometries and the embedding of the original space; and
//! [`cholesky_factor`] builds the subset-indexed factorization `K[F₁] = RR*`
//! that links kernel positivity back to the `Z(F)` operators.
//!
//! Truncation semantics are strict: a dilation image `V(g)` acts as the
//! shift `δ_p ↦ δ_{gp}` on exactly those basis columns with `g·p` inside the
//! truncation and is least-squares minimal elsewhere, and every verification
//! reports the subspace it actually covered rather than extrapolating.

use std::collections::HashMap;
use std::sync::RwLock;

use thiserror::Error;

use crate::linalg::{self, CMatrix, LinalgError};
use crate::regularity::RegError;
use crate::representation::{RepError, Representation};
use crate::semigroup::{Element, LcmOutcome, SgError};

/// Errors from kernel and dilation computations.
#[derive(Debug, Error)]
pub enum DilationError {
    /// Underlying semigroup arithmetic failed.
    #[error(transparent)]
    Semigroup(#[from] SgError),
    /// Representation evaluation failed.
    #[error(transparent)]
    Rep(#[from] RepError),
    /// Positivity-layer failure (verification, Z evaluation).
    #[error(transparent)]
    Reg(#[from] RegError),
    /// Spectral routine failure.
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    /// The truncation's Gram matrix has a genuinely negative eigenvalue —
    /// the numerical witness that the representation is not ∗-regular.
    #[error("Gram matrix is not positive semidefinite: λ_min = {lambda_min:.6e}")]
    GramNotPsd {
        /// The offending eigenvalue.
        lambda_min: f64,
    },
    /// The truncation set is unusable (missing identity, empty, …).
    #[error("bad truncation: {0}")]
    BadTruncation(String),
    /// No requested check fits inside the truncation.
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),
    /// A `Z(F_A)` operator in the Cholesky assembly is not PSD; names the
    /// violating subset as a targeted non-regularity witness.
    #[error("Z-operator of the subset {subset:?} is not PSD: λ_min = {lambda_min:.6e}")]
    SubsetNotPsd {
        /// The subset `A ⊆ F₀` whose quotient operator fails.
        subset: Vec<String>,
        /// Its smallest eigenvalue.
        lambda_min: f64,
    },
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

/// Memoised evaluation of the positivity kernel of a representation.
pub struct Kernel {
    rep: Representation,
    cache: RwLock<HashMap<(Element, Element), CMatrix>>,
}

impl Kernel {
    /// Wrap a verified representation. Fails on unverified input because
    /// every kernel identity depends on the relations actually holding.
    pub fn new(rep: Representation) -> Result<Kernel, DilationError> {
        if !rep.is_verified() {
            return Err(RegError::NotVerified {
                summary: rep.relation_report().failures().join("; "),
            }
            .into());
        }
        Ok(Kernel {
            rep,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// The underlying representation.
    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    /// `K(p, q)`: see the module docs. Cached per ordered pair.
    pub fn eval(&self, p: &Element, q: &Element) -> Result<CMatrix, DilationError> {
        let key = (p.clone(), q.clone());
        if let Some(hit) = self.cache.read().expect("kernel cache").get(&key) {
            return Ok(hit.clone());
        }
        let handle = self.rep.handle();
        let value = match handle.lcm(p, q)? {
            LcmOutcome::Disjoint => CMatrix::zeros(self.rep.dim(), self.rep.dim()),
            LcmOutcome::Common(s) => {
                let left = handle
                    .left_divide(p, &s)?
                    .expect("the join is a right multiple of p");
                let right = handle
                    .left_divide(q, &s)?
                    .expect("the join is a right multiple of q");
                let tl = self.rep.evaluate(&left)?;
                let tr = self.rep.evaluate(&right)?;
                tl * tr.adjoint()
            }
        };
        self.cache
            .write()
            .expect("kernel cache")
            .insert(key, value.clone());
        Ok(value)
    }

    /// The block Gram matrix of a truncation set: block `(i, j)` is
    /// `K(S[i], S[j])`, so the matrix is Hermitian and represents the
    /// semi-inner product `⟨δ_p ⊗ h, δ_q ⊗ k⟩ = ⟨K(q, p) h, k⟩`.
    pub fn gram(&self, s: &[Element]) -> Result<GramMatrix, DilationError> {
        let handle = self.rep.handle();
        if s.is_empty() {
            return Err(DilationError::BadTruncation(
                "the truncation set is empty".into(),
            ));
        }
        let mut order = s.to_vec();
        for x in &order {
            handle.validate(x)?;
        }
        order.sort();
        order.dedup();
        if !order.iter().any(|x| handle.is_identity(x)) {
            return Err(DilationError::BadTruncation(
                "the truncation set must contain the identity".into(),
            ));
        }
        let d = self.rep.dim();
        let n = order.len();
        let mut g = CMatrix::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                let block = self.eval(&order[i], &order[j])?;
                g.view_mut((i * d, j * d), (d, d)).copy_from(&block);
            }
        }
        let g = linalg::hermitize(&g);
        let lambda_min = linalg::lambda_min(&g);
        Ok(GramMatrix {
            order,
            matrix: g,
            lambda_min,
        })
    }
}

/// The Gram matrix of a kernel truncation.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    /// The truncation, sorted ascending (identity first).
    pub order: Vec<Element>,
    /// The Hermitian block matrix.
    pub matrix: CMatrix,
    /// Its smallest eigenvalue.
    pub lambda_min: f64,
}

// ---------------------------------------------------------------------------
// Truncated dilation
// ---------------------------------------------------------------------------

/// A partial isometry of the truncated dilation, with its domain data.
#[derive(Debug, Clone)]
pub struct PartialIsometry {
    /// The matrix on the quotient space.
    pub matrix: CMatrix,
    /// Truncation elements `p` with `g·p` inside the truncation: the columns
    /// the shift action is defined on.
    pub domain: Vec<Element>,
}

/// The GNS-style dilation of a representation on a finite truncation.
pub struct TruncatedDilation {
    kernel: Kernel,
    /// The truncation, sorted ascending.
    order: Vec<Element>,
    /// Column-block map from the formal space `⊕_{p∈S} H` onto the quotient.
    phi: CMatrix,
    /// Dimension of the quotient space.
    quotient_dim: usize,
    /// The embedding `H → quotient` (the identity's block of `phi`).
    iota: CMatrix,
    /// Eigenvalues near the null cutoff, reported rather than silently kept
    /// or dropped.
    pub warnings: Vec<String>,
}

impl TruncatedDilation {
    /// The truncation set.
    pub fn order(&self) -> &[Element] {
        &self.order
    }

    /// Dimension of the quotient (dilation) space.
    pub fn quotient_dim(&self) -> usize {
        self.quotient_dim
    }

    /// The isometric embedding of the original space.
    pub fn iota(&self) -> &CMatrix {
        &self.iota
    }

    /// The kernel this dilation was built from.
    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    /// The block of `phi` for one truncation element: the quotient image of
    /// the formal basis column `δ_p ⊗ H`.
    fn phi_block(&self, index: usize) -> CMatrix {
        let d = self.kernel.rep().dim();
        self.phi
            .view((0, index * d), (self.quotient_dim, d))
            .into_owned()
    }

    /// The partial isometry `V(g)`: acts as `δ_p ↦ δ_{gp}` on every
    /// truncation column with `g·p` in the truncation, least-squares minimal
    /// on the rest of the quotient.
    pub fn partial_isometry(&self, g: &Element) -> Result<PartialIsometry, DilationError> {
        let handle = self.kernel.rep().handle().clone();
        handle.validate(g)?;
        let d = self.kernel.rep().dim();
        let mut domain = Vec::new();
        let mut dom_blocks = Vec::new();
        let mut img_blocks = Vec::new();
        for (i, p) in self.order.iter().enumerate() {
            let shifted = handle.multiply(g, p)?;
            if let Ok(j) = self.order.binary_search(&shifted) {
                domain.push(p.clone());
                dom_blocks.push(self.phi_block(i));
                img_blocks.push(self.phi_block(j));
            }
        }
        if domain.is_empty() {
            return Err(DilationError::TruncationInsufficient(format!(
                "no truncation element stays inside the truncation under {g:?}"
            )));
        }
        let r = self.quotient_dim;
        let k = domain.len();
        let mut a = CMatrix::zeros(r, k * d);
        let mut b = CMatrix::zeros(r, k * d);
        for (c, (da, db)) in dom_blocks.iter().zip(img_blocks.iter()).enumerate() {
            a.view_mut((0, c * d), (r, d)).copy_from(da);
            b.view_mut((0, c * d), (r, d)).copy_from(db);
        }
        // Solve V·A = B in the least-squares sense: V* = (A A*)⁺ A B*, so V
        // agrees with the shift on the span of A and vanishes on its
        // orthocomplement.
        let tol = *self.kernel.rep().tolerances();
        let vt = linalg::least_squares(&a.adjoint(), &b.adjoint(), &tol)?;
        Ok(PartialIsometry {
            matrix: vt.adjoint(),
            domain,
        })
    }

    /// Compress a quotient operator back to the original space: `ι* M ι`.
    pub fn compress(&self, m: &CMatrix) -> CMatrix {
        self.iota.adjoint() * m * &self.iota
    }
}

/// Build the truncated minimal dilation of a kernel over a truncation set.
///
/// Fails with [`DilationError::GramNotPsd`] when the Gram matrix has an
/// eigenvalue below `−psd_eps` — that eigenvalue is the concrete witness
/// that no isometric dilation exists.
pub fn naimark_truncated(
    kernel: Kernel,
    s: &[Element],
) -> Result<TruncatedDilation, DilationError> {
    let gram = kernel.gram(s)?;
    let tol = *kernel.rep().tolerances();
    if gram.lambda_min < -tol.psd_eps {
        return Err(DilationError::GramNotPsd {
            lambda_min: gram.lambda_min,
        });
    }
    let (values, vectors) = linalg::eigh(&gram.matrix);
    let top = values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = top * tol.quotient_eps;
    let mut warnings = Vec::new();
    let kept: Vec<usize> = (0..values.len())
        .filter(|&j| values[j] > cutoff)
        .collect();
    for &j in &kept {
        if values[j] < 10.0 * cutoff {
            warnings.push(format!(
                "Gram eigenvalue {:.3e} is within a decade of the null cutoff {:.3e}",
                values[j], cutoff
            ));
        }
    }
    if kept.is_empty() {
        return Err(DilationError::BadTruncation(
            "every Gram eigenvalue fell below the null cutoff".into(),
        ));
    }
    // phi = Λ₊^{1/2} Q₊*: a surjection onto the quotient with
    // phi* phi ≈ Gram, so quotient inner products equal kernel values.
    let r = kept.len();
    let n = gram.matrix.nrows();
    let mut phi = CMatrix::zeros(r, n);
    for (row, &j) in kept.iter().enumerate() {
        let scale = values[j].sqrt();
        for col in 0..n {
            phi[(row, col)] = vectors[(col, j)].conj() * scale;
        }
    }
    let d = kernel.rep().dim();
    let e_index = gram
        .order
        .iter()
        .position(|x| kernel.rep().handle().is_identity(x))
        .expect("gram() guarantees the identity is present");
    let iota = phi.view((0, e_index * d), (r, d)).into_owned();
    Ok(TruncatedDilation {
        kernel,
        order: gram.order,
        phi,
        quotient_dim: r,
        iota,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// Nica covariance verification
// ---------------------------------------------------------------------------

/// Result of checking the covariance identities on a truncated dilation.
#[derive(Debug, Clone)]
pub struct CovarianceReport {
    /// Largest residual over all checked pair/column combinations.
    pub max_residual: f64,
    /// Pairs with at least one applicable column.
    pub pairs_checked: usize,
    /// Pairs skipped because no column kept all required products inside
    /// the truncation.
    pub pairs_skipped: usize,
    /// Fraction of truncation columns applicable, averaged over checked
    /// pairs.
    pub coverage: f64,
}

/// Verify `V(p)* V(q) = V(p⁻¹s) V(q⁻¹s)*` (zero for disjoint ideals) on the
/// truncated dilation, testing each pair on the columns whose required
/// products stay inside the truncation.
pub fn verify_nica_covariance(
    dilation: &TruncatedDilation,
    pairs: &[(Element, Element)],
) -> Result<CovarianceReport, DilationError> {
    let handle = dilation.kernel.rep().handle().clone();
    let mut max_residual: f64 = 0.0;
    let mut pairs_checked = 0;
    let mut pairs_skipped = 0;
    let mut coverage_sum = 0.0;
    for (p, q) in pairs {
        let vp = dilation.partial_isometry(p)?;
        let vq = dilation.partial_isometry(q)?;
        let lhs = vp.matrix.adjoint() * &vq.matrix;
        let (rhs, w1, w2) = match handle.lcm(p, q)? {
            LcmOutcome::Disjoint => (
                CMatrix::zeros(dilation.quotient_dim, dilation.quotient_dim),
                None,
                None,
            ),
            LcmOutcome::Common(s) => {
                let w1 = handle
                    .left_divide(p, &s)?
                    .expect("join divisible by p");
                let w2 = handle
                    .left_divide(q, &s)?
                    .expect("join divisible by q");
                let vw1 = dilation.partial_isometry(&w1)?;
                let vw2 = dilation.partial_isometry(&w2)?;
                (&vw1.matrix * vw2.matrix.adjoint(), Some(w1), Some(w2))
            }
        };
        // Applicable columns: δ_r with q·r in S, and (for a common join)
        // r = w₂·r' with w₁·r' in S, so every product either side takes
        // stays inside the truncation.
        let mut applicable = Vec::new();
        for (i, r) in dilation.order.iter().enumerate() {
            let qr = handle.multiply(q, r)?;
            if dilation.order.binary_search(&qr).is_err() {
                continue;
            }
            match (&w1, &w2) {
                (Some(w1), Some(w2)) => {
                    let Some(r_prime) = handle.left_divide(w2, r)? else {
                        continue;
                    };
                    let w1r = handle.multiply(w1, &r_prime)?;
                    if dilation.order.binary_search(&w1r).is_err() {
                        continue;
                    }
                }
                _ => {}
            }
            applicable.push(i);
        }
        if applicable.is_empty() {
            pairs_skipped += 1;
            continue;
        }
        pairs_checked += 1;
        coverage_sum += applicable.len() as f64 / dilation.order.len() as f64;
        let diff = &lhs - &rhs;
        for &i in &applicable {
            let block = dilation.phi_block(i);
            let restricted = &diff * &block;
            let scale = linalg::operator_norm(&block).max(1.0);
            max_residual = max_residual.max(linalg::operator_norm(&restricted) / scale);
        }
    }
    if pairs_checked == 0 && !pairs.is_empty() {
        return Err(DilationError::TruncationInsufficient(
            "no pair had an applicable column; enlarge the truncation".into(),
        ));
    }
    Ok(CovarianceReport {
        max_residual,
        pairs_checked,
        pairs_skipped,
        coverage: if pairs_checked > 0 {
            coverage_sum / pairs_checked as f64
        } else {
            0.0
        },
    })
}

/// Verify the dilation properties on the original space: `ι` isometric,
/// `ι* V(p) ι = T(p)` for every `p` in the truncation, and isometry of each
/// `V(p)` on its domain span. Returns the largest residual.
pub fn verify_dilation_property(dilation: &TruncatedDilation) -> Result<f64, DilationError> {
    let rep = dilation.kernel.rep();
    let d = rep.dim();
    let mut max_residual = linalg::operator_norm(
        &(dilation.iota.adjoint() * &dilation.iota - linalg::identity(d)),
    );
    for p in dilation.order() {
        let v = dilation.partial_isometry(p)?;
        let compressed = dilation.compress(&v.matrix);
        let expected = rep.evaluate(p)?;
        max_residual = max_residual.max(linalg::operator_norm(&(compressed - expected)));
        // Isometry on the domain span: (V*V − I)·Φ_r = 0 for domain r.
        let gram_defect = v.matrix.adjoint() * &v.matrix - linalg::identity(dilation.quotient_dim);
        for r in &v.domain {
            let i = dilation
                .order
                .binary_search(r)
                .expect("domain elements come from the truncation");
            let block = dilation.phi_block(i);
            let scale = linalg::operator_norm(&block).max(1.0);
            max_residual = max_residual
                .max(linalg::operator_norm(&(&gram_defect * &block)) / scale);
        }
    }
    Ok(max_residual)
}

// ---------------------------------------------------------------------------
// Cholesky factorization over subset representatives
// ---------------------------------------------------------------------------

/// The subset-indexed factorization `K[F₁] = R R*` of a kernel truncation.
#[derive(Debug, Clone)]
pub struct CholeskyR {
    /// The subsets of the base family with non-empty joins, ordered by
    /// decreasing size then ascending mask; entry = (mask, subset, join).
    pub subsets: Vec<(usize, Vec<Element>, Element)>,
    /// The block lower-triangular factor.
    pub r: CMatrix,
    /// The kernel matrix `K[F₁]` over the same index set.
    pub kernel_matrix: CMatrix,
    /// `‖K[F₁] − RR*‖`.
    pub residual: f64,
    /// `residual / max(1, ‖K[F₁]‖)`.
    pub relative_residual: f64,
}

/// Build `R` with blocks `R(A_i, A_j) = T(s_{A_i}⁻¹ s_{A_j}) · Z(F_{A_j})^{1/2}`
/// for `A_i ⊆ A_j` (zero otherwise), verify `K[F₁] = R R*`, and return both
/// sides. Subsets with empty joins are dropped; a non-PSD `Z(F_A)` aborts
/// with the subset named, which is exactly a non-regularity witness.
pub fn cholesky_factor(
    rep: &Representation,
    base_family: &[Element],
) -> Result<CholeskyR, DilationError> {
    let kernel = Kernel::new(rep.clone())?;
    let handle = rep.handle().clone();
    let mut family = base_family.to_vec();
    for x in &family {
        handle.validate(x)?;
    }
    family.sort();
    family.dedup();
    if family.len() > 12 {
        return Err(DilationError::BadTruncation(format!(
            "base family of {} elements needs 2^{} subsets",
            family.len(),
            family.len()
        )));
    }
    let n = family.len();
    let d = rep.dim();

    // Joins of all subsets; drop the disjoint ones.
    let mut joined: Vec<(usize, Vec<Element>, Element)> = Vec::new();
    for mask in 0usize..(1 << n) {
        let subset: Vec<Element> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| family[i].clone())
            .collect();
        let join = if subset.is_empty() {
            Some(handle.identity())
        } else {
            match handle.lcm_set(&subset)? {
                LcmOutcome::Common(s) => Some(s),
                LcmOutcome::Disjoint => None,
            }
        };
        if let Some(s) = join {
            joined.push((mask, subset, s));
        }
    }
    // Order: decreasing subset size, then ascending mask. Containment then
    // only points from later rows to earlier columns, making R lower
    // triangular blockwise.
    joined.sort_by(|a, b| {
        let ka = a.0.count_ones();
        let kb = b.0.count_ones();
        kb.cmp(&ka).then(a.0.cmp(&b.0))
    });
    let m = joined.len();

    // Z(F_A) = Σ_{A ⊆ U, ∨U non-empty} (−1)^{|U∖A|} TT*(s_A⁻¹ s_U), the
    // quotient operator of the subset; PSD required for the square roots.
    let mut z_roots: Vec<CMatrix> = Vec::with_capacity(m);
    for (mask_a, subset_a, s_a) in &joined {
        let mut z = CMatrix::zeros(d, d);
        for (mask_u, _, s_u) in &joined {
            if mask_u & mask_a != *mask_a {
                continue;
            }
            let quotient = handle
                .left_divide(s_a, s_u)?
                .expect("nested joins divide");
            let t = rep.evaluate(&quotient)?;
            let term = &t * t.adjoint();
            if (mask_u ^ mask_a).count_ones() % 2 == 0 {
                z += term;
            } else {
                z -= term;
            }
        }
        let z = linalg::hermitize(&z);
        let lambda_min = linalg::lambda_min(&z);
        if lambda_min < -rep.tolerances().psd_eps {
            return Err(DilationError::SubsetNotPsd {
                subset: subset_a.iter().map(|x| format!("{x:?}")).collect(),
                lambda_min,
            });
        }
        z_roots.push(linalg::psd_sqrt(&z, rep.tolerances())?);
    }

    let mut r = CMatrix::zeros(m * d, m * d);
    for i in 0..m {
        for j in 0..m {
            let (mask_i, _, s_i) = &joined[i];
            let (mask_j, _, s_j) = &joined[j];
            if mask_i & mask_j != *mask_i {
                continue; // need A_i ⊆ A_j
            }
            let quotient = handle
                .left_divide(s_i, s_j)?
                .expect("nested joins divide");
            let t = rep.evaluate(&quotient)?;
            let block = &t * &z_roots[j];
            r.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }

    let mut k = CMatrix::zeros(m * d, m * d);
    for i in 0..m {
        for j in 0..m {
            let block = kernel.eval(&joined[i].2, &joined[j].2)?;
            k.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }
    let k = linalg::hermitize(&k);
    let rr = &r * r.adjoint();
    let residual = linalg::operator_norm(&(&k - rr));
    let relative_residual = residual / linalg::operator_norm(&k).max(1.0);
    Ok(CholeskyR {
        subsets: joined,
        r,
        kernel_matrix: k,
        residual,
        relative_residual,
    })
}

/// All length-bounded truncation sets used by the command-line front end:
/// the ball of the radius for enumerable semigroups.
pub fn default_truncation(
    handle: &crate::semigroup::SemigroupHandle,
    radius: u64,
) -> Result<Vec<Element>, DilationError> {
    Ok(handle.ball(radius)?)
}

/// The affine truncation box `{(a, m) : a ≤ a_max, m ≤ m_max}`.
pub fn affine_truncation(a_max: u64, m_max: u64) -> Result<Vec<Element>, DilationError> {
    let handle = crate::semigroup::SemigroupHandle::affine();
    let mut out = Vec::new();
    for (a, m) in crate::zoo::affine_box(a_max, m_max) {
        out.push(handle.element_from_affine(a, m)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::creal;
    use crate::representation::GenKey;
    use crate::semigroup::SemigroupHandle;
    use std::collections::BTreeMap;

    fn scalar_rep(handle: SemigroupHandle, entries: &[(GenKey, f64)]) -> Representation {
        let images = entries
            .iter()
            .map(|(k, t)| (k.clone(), CMatrix::from_element(1, 1, creal(*t))))
            .collect();
        Representation::assemble(handle, 1, images, Default::default()).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let h = SemigroupHandle::nk(1).unwrap();
        let rep = scalar_rep(h.clone(), &[(GenKey::Atom(0), 0.5)]);
        let kernel = Kernel::new(rep).unwrap();
        let e = h.identity();
        let two = h.element_from_coords(&[2]).unwrap();
        let five = h.element_from_coords(&[5]).unwrap();
        // K(e, p) = T(p)
        let kep = kernel.eval(&e, &five).unwrap();
        assert!((kep[(0, 0)].re - 0.5f64.powi(5)).abs() < 1e-14);
        // K(2, 5) = T(3)·T(0)* = t³
        let k25 = kernel.eval(&two, &five).unwrap();
        assert!((k25[(0, 0)].re - 0.125).abs() < 1e-14);
        // Toeplitz: K(a·p, a·q) = K(p, q)
        let a = h.element_from_coords(&[3]).unwrap();
        let ap = h.multiply(&a, &two).unwrap();
        let aq = h.multiply(&a, &five).unwrap();
        let shifted = kernel.eval(&ap, &aq).unwrap();
        assert!((shifted[(0, 0)] - k25[(0, 0)]).norm() < 1e-14);
    }

    #[test]
    fn disjoint_kernel_vanishes() {
        let h = SemigroupHandle::free(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 0.5), (GenKey::Atom(1), 0.5)],
        );
        let kernel = Kernel::new(rep).unwrap();
        let a = h.element_from_word(&[0]).unwrap();
        let b = h.element_from_word(&[1]).unwrap();
        assert_eq!(kernel.eval(&a, &b).unwrap()[(0, 0)], linalg::czero());
    }

    #[test]
    fn gram_of_unit_scalars_on_free_monoid_is_the_known_witness() {
        let h = SemigroupHandle::free(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 1.0), (GenKey::Atom(1), 1.0)],
        );
        let kernel = Kernel::new(rep).unwrap();
        let s = vec![
            h.identity(),
            h.element_from_word(&[0]).unwrap(),
            h.element_from_word(&[1]).unwrap(),
        ];
        let gram = kernel.gram(&s).unwrap();
        // [[1,1,1],[1,1,0],[1,0,1]] has determinant −1.
        let det = gram.matrix.determinant();
        assert!((det.re + 1.0).abs() < 1e-12);
        assert!(gram.lambda_min < 0.0);
        let dil = naimark_truncated(kernel, &s);
        assert!(matches!(dil, Err(DilationError::GramNotPsd { .. })));
    }

    #[test]
    fn zero_rep_dilates_to_truncated_shift() {
        let h = SemigroupHandle::nk(1).unwrap();
        let rep = scalar_rep(h.clone(), &[(GenKey::Atom(0), 0.0)]);
        let kernel = Kernel::new(rep).unwrap();
        let s = h.ball(2).unwrap();
        let dil = naimark_truncated(kernel, &s).unwrap();
        assert_eq!(dil.quotient_dim(), 3);
        let one = h.element_from_coords(&[1]).unwrap();
        let v = dil.partial_isometry(&one).unwrap();
        assert_eq!(v.domain.len(), 2);
        // Compression recovers T(1) = 0.
        let compressed = dil.compress(&v.matrix);
        assert!(linalg::operator_norm(&compressed) < 1e-10);
        let residual = verify_dilation_property(&dil).unwrap();
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn unitary_scalar_dilates_to_itself() {
        let h = SemigroupHandle::nk(1).unwrap();
        let rep = scalar_rep(h.clone(), &[(GenKey::Atom(0), 1.0)]);
        let kernel = Kernel::new(rep).unwrap();
        let s = h.ball(3).unwrap();
        let dil = naimark_truncated(kernel, &s).unwrap();
        assert_eq!(dil.quotient_dim(), 1);
        let one = h.element_from_coords(&[1]).unwrap();
        let v = dil.partial_isometry(&one).unwrap();
        assert!((v.matrix[(0, 0)].norm() - 1.0).abs() < 1e-10);
        let pairs = vec![(one.clone(), one.clone())];
        let report = verify_nica_covariance(&dil, &pairs).unwrap();
        assert!(report.max_residual < 1e-9);
    }

    #[test]
    fn row_contraction_covariance_on_free_monoid() {
        let h = SemigroupHandle::free(2).unwrap();
        let t = 1.0 / 2f64.sqrt();
        let rep = scalar_rep(h.clone(), &[(GenKey::Atom(0), t), (GenKey::Atom(1), t)]);
        let kernel = Kernel::new(rep).unwrap();
        let s = h.ball(2).unwrap();
        let dil = naimark_truncated(kernel, &s).unwrap();
        let a = h.element_from_word(&[0]).unwrap();
        let b = h.element_from_word(&[1]).unwrap();
        let report =
            verify_nica_covariance(&dil, &[(a.clone(), b.clone()), (a.clone(), a.clone())])
                .unwrap();
        assert!(report.max_residual < 1e-9, "residual {}", report.max_residual);
        assert!(report.pairs_checked == 2);
        let residual = verify_dilation_property(&dil).unwrap();
        assert!(residual < 1e-9, "residual {residual}");
    }

    #[test]
    fn cholesky_identity_on_coordinates() {
        let h = SemigroupHandle::nk(2).unwrap();
        let a = CMatrix::from_row_slice(2, 2, &[creal(0.6), creal(0.0), creal(0.0), creal(0.3)]);
        let b = CMatrix::from_row_slice(2, 2, &[creal(0.2), creal(0.0), creal(0.0), creal(0.7)]);
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), a);
        images.insert(GenKey::Atom(1), b);
        let rep = Representation::assemble(h.clone(), 2, images, Default::default()).unwrap();
        let family = h.atoms().unwrap();
        let chol = cholesky_factor(&rep, &family).unwrap();
        assert_eq!(chol.subsets.len(), 4);
        assert!(
            chol.relative_residual < 1e-12,
            "residual {}",
            chol.relative_residual
        );
        // Lower triangular blockwise: entries above the diagonal vanish.
        let d = 2;
        for i in 0..4 {
            for j in (i + 1)..4 {
                let block = chol.r.view((i * d, j * d), (d, d));
                let (mask_i, _, _) = chol.subsets[i];
                let (mask_j, _, _) = chol.subsets[j];
                if mask_i & mask_j != mask_i {
                    assert!(block.iter().all(|c| c.norm() == 0.0));
                }
            }
        }
    }

    #[test]
    fn cholesky_flags_nonregular_rep() {
        let h = SemigroupHandle::free(2).unwrap();
        let rep = scalar_rep(
            h.clone(),
            &[(GenKey::Atom(0), 0.9), (GenKey::Atom(1), 0.9)],
        );
        let family = h.atoms().unwrap();
        let err = cholesky_factor(&rep, &family).unwrap_err();
        match err {
            DilationError::SubsetNotPsd { lambda_min, .. } => {
                assert!((lambda_min - (1.0 - 0.81 - 0.81)).abs() < 1e-12);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
