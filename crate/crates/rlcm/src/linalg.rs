//! Dense complex linear algebra with pinned tolerances.
//!
//! Everything downstream (positivity verdicts, dilation construction,
//! certificate checking) funnels through this module, so the numerical
//! conventions are fixed here once:
//!
//! * matrices are dense, complex, double precision ([`CMatrix`]);
//! * any matrix that is *supposed* to be Hermitian is explicitly hermitized
//!   (`(M + M*)/2`) before a spectral routine touches it, so tiny asymmetries
//!   from accumulated rounding can never flip a verdict;
//! * positive semidefiniteness is decided by the smallest eigenvalue against
//!   the absolute slack [`Tolerances::psd_eps`];
//! * rank/nullity style cutoffs are *relative* to the largest eigenvalue,
//!   using [`Tolerances::null_eps`];
//! * exact algebraic identities (unitarity of eigenvector bases, relation
//!   residuals, …) are asserted within [`Tolerances::identity_eps`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

/// Dense dynamically sized complex matrix, the single numeric carrier type.
pub type CMatrix = DMatrix<Complex64>;

/// Errors produced by spectral routines.
#[derive(Debug, Error)]
pub enum LinalgError {
    /// A matrix expected to be positive semidefinite was not, even after the
    /// tolerance slack. Carries the offending smallest eigenvalue.
    #[error("matrix is not positive semidefinite (lambda_min = {lambda_min:.3e})")]
    NotPsd {
        /// Smallest eigenvalue of the hermitized matrix.
        lambda_min: f64,
    },
    /// Operand shapes are incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Numerical slacks used by every verdict in the crate.
///
/// The defaults are the tolerances all library-level guarantees are stated
/// against; tests pin them explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute slack on the smallest eigenvalue when deciding positive
    /// semidefiniteness: the verdict is `lambda_min >= -psd_eps`.
    pub psd_eps: f64,
    /// Relative cutoff (against the largest eigenvalue) below which an
    /// eigenvalue is treated as zero when discarding null directions.
    pub null_eps: f64,
    /// Absolute slack for identities that hold exactly in exact arithmetic
    /// (relation residuals, unitarity checks, compression identities).
    pub identity_eps: f64,
    /// Relative cutoff for the dilation-space quotient. Tighter than
    /// `null_eps` because every discarded direction costs fidelity of the
    /// dilation at its own scale, while a kept marginal direction costs
    /// only conditioning downstream.
    pub quotient_eps: f64,
    /// Relative spectral cutoff for least-squares solves. Sits below
    /// `quotient_eps` (so no genuine quotient direction is dropped from a
    /// solve) and above roundoff noise; iterative refinement wins back the
    /// conditioning this admits.
    pub solve_eps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd_eps: 1e-9,
            null_eps: 1e-8,
            identity_eps: 1e-10,
            quotient_eps: 1e-10,
            solve_eps: 1e-13,
        }
    }
}

/// Outcome of a positive semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    /// Whether the hermitized matrix passed `lambda_min >= -psd_eps`.
    pub verdict: bool,
    /// Smallest eigenvalue of the hermitized matrix.
    pub lambda_min: f64,
}

/// Complex `0`.
pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Complex `1`.
pub fn cone() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Real scalar as a complex number.
pub fn creal(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `d × d` identity matrix.
pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Hermitian part `(M + M*)/2` of a square matrix.
///
/// All spectral routines in this module call this first, so callers may pass
/// matrices that are Hermitian only up to rounding noise.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    assert_eq!(m.nrows(), m.ncols(), "hermitize needs a square matrix");
    (m + m.adjoint()) * creal(0.5)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, q)` with the real eigenvalues sorted ascending and
/// the columns of the unitary `q` holding the matching eigenvectors, so that
/// `q * diag(eigenvalues) * q.adjoint()` reconstructs the hermitized input.
///
/// Implemented as cyclic Jacobi with complex rotations: each step applies a
/// unitary similarity that zeroes one off-diagonal pair, and sweeps repeat
/// until the off-diagonal mass reaches rounding level. Jacobi keeps the
/// reconstruction residual at machine precision even for tightly clustered
/// or repeated eigenvalues, which the kernels and Gram matrices in this
/// crate produce routinely.
pub fn eigh(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let mut h = hermitize(m);
    let n = h.nrows();
    if n == 0 {
        return (DVector::zeros(0), CMatrix::zeros(0, 0));
    }
    let mut q = identity(n);
    // Frobenius norm is invariant under the rotations, so the target is
    // fixed once up front.
    let scale = h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = scale * 1e-15;
    let negligible = target / (10.0 * n as f64);
    for _sweep in 0..40 {
        let off = (2.0
            * (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |r| (p, r)))
                .map(|(p, r)| h[(p, r)].norm_sqr())
                .sum::<f64>())
        .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let hpr = h[(p, r)];
                let habs = hpr.norm();
                if habs <= negligible {
                    continue;
                }
                // Unitary block G = [[c, -s·u], [s·ū, c]] with u = hpr/|hpr|
                // zeroes the (p, r) entry when t = s/c solves
                // t² − 2τt − 1 = 0, τ = (H_rr − H_pp) / (2|hpr|).
                let u = hpr / creal(habs);
                let tau = (h[(r, r)].re - h[(p, p)].re) / (2.0 * habs);
                let t = -tau.signum() / (tau.abs() + tau.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = t * c;
                let (cs, su, su_conj) = (creal(c), creal(s) * u, creal(s) * u.conj());
                // Columns p and r of H ← H·G, then rows of ← G*·H.
                for k in 0..n {
                    let (hp, hr) = (h[(k, p)], h[(k, r)]);
                    h[(k, p)] = cs * hp + su_conj * hr;
                    h[(k, r)] = cs * hr - su * hp;
                }
                for k in 0..n {
                    let (hp, hr) = (h[(p, k)], h[(r, k)]);
                    h[(p, k)] = cs * hp + su * hr;
                    h[(r, k)] = cs * hr - su_conj * hp;
                }
                h[(p, r)] = creal(0.0);
                h[(r, p)] = creal(0.0);
                h[(p, p)] = creal(h[(p, p)].re);
                h[(r, r)] = creal(h[(r, r)].re);
                for k in 0..n {
                    let (qp, qr) = (q[(k, p)], q[(k, r)]);
                    q[(k, p)] = cs * qp + su_conj * qr;
                    q[(k, r)] = cs * qr - su * qp;
                }
            }
        }
    }
    // Sort the diagonal ascending and permute eigenvector columns with it.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(i, i)].re.total_cmp(&h[(j, j)].re));
    let values = DVector::from_iterator(n, order.iter().map(|&i| h[(i, i)].re));
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &q.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of the hermitized input.
pub fn lambda_min(m: &CMatrix) -> f64 {
    let (values, _) = eigh(m);
    if values.is_empty() {
        0.0
    } else {
        values[0]
    }
}

/// Positive semidefiniteness verdict for the hermitized input.
///
/// The verdict is `lambda_min >= -tol.psd_eps`; the report carries the
/// eigenvalue so callers can surface *how* negative a failure was.
pub fn is_psd(m: &CMatrix, tol: &Tolerances) -> PsdReport {
    let lm = lambda_min(m);
    PsdReport {
        verdict: lm >= -tol.psd_eps,
        lambda_min: lm,
    }
}

/// Positive semidefinite square root via eigenvalue clipping.
///
/// Fails with [`LinalgError::NotPsd`] if the input is not PSD within
/// `tol.psd_eps`. Eigenvalues in the tolerance band `[-psd_eps, 0)` are
/// clipped to zero, so the result `S` is exactly PSD and satisfies
/// `‖S² − M‖ ≤ 10 · psd_eps · max(1, ‖M‖)` in operator norm.
pub fn psd_sqrt(m: &CMatrix, tol: &Tolerances) -> Result<CMatrix, LinalgError> {
    let (values, q) = eigh(m);
    if let Some(&lm) = values.as_slice().first() {
        if lm < -tol.psd_eps {
            return Err(LinalgError::NotPsd { lambda_min: lm });
        }
    }
    let d = values.len();
    let mut s = CMatrix::zeros(d, d);
    for j in 0..d {
        let root = creal(values[j].max(0.0).sqrt());
        let col = q.column(j);
        for i in 0..d {
            for k in 0..d {
                s[(i, k)] += col[i] * root * col[k].conj();
            }
        }
    }
    Ok(s)
}

/// Operator (spectral) norm: the largest singular value, computed as
/// `sqrt(lambda_max(M* M))`.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (values, _) = eigh(&gram);
    values[values.len() - 1].max(0.0).sqrt()
}

/// Moore–Penrose pseudoinverse of a Hermitian PSD matrix, with null
/// directions discarded relative to the largest eigenvalue by
/// [`Tolerances::null_eps`].
pub fn hermitian_pinv(m: &CMatrix, tol: &Tolerances) -> CMatrix {
    let (values, q) = eigh(m);
    let d = values.len();
    if d == 0 {
        return CMatrix::zeros(0, 0);
    }
    let top = values[d - 1].max(0.0);
    let cut = top * tol.null_eps;
    let mut p = CMatrix::zeros(d, d);
    for j in 0..d {
        if values[j] > cut && values[j] > 0.0 {
            let inv = creal(1.0 / values[j]);
            let col = q.column(j);
            for i in 0..d {
                for k in 0..d {
                    p[(i, k)] += col[i] * inv * col[k].conj();
                }
            }
        }
    }
    p
}

/// Least-squares solve `A X ≈ B` through the normal equations with a
/// spectral pseudoinverse (`X = (A* A)⁺ A* B`), then iterative refinement.
/// Refinement in working precision undoes the conditioning squared by
/// forming `A* A`, which otherwise caps accuracy near `ε / null_eps`.
///
/// `A` and `B` must have the same number of rows.
pub fn least_squares(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<CMatrix, LinalgError> {
    if a.nrows() != b.nrows() {
        return Err(LinalgError::Dimension(format!(
            "least_squares: A has {} rows but B has {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let solve_tol = Tolerances {
        null_eps: tol.solve_eps,
        ..*tol
    };
    let gram = a.adjoint() * a;
    let pinv = hermitian_pinv(&gram, &solve_tol);
    let mut x = &pinv * (a.adjoint() * b);
    for _ in 0..3 {
        let residual = b - a * &x;
        x += &pinv * (a.adjoint() * residual);
    }
    Ok(x)
}
