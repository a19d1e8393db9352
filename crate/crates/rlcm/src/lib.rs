//! Computational toolkit for right LCM semigroups and the dilation theory of
//! their contractive representations.
//!
//! A right LCM semigroup is a left-cancellative unital semigroup in which the
//! intersection of two principal right ideals is either empty or again a
//! principal right ideal: `pP ∩ qP ∈ {rP, ∅}`. The element `r` is a right
//! least common multiple of `p` and `q`. This crate provides:
//!
//! * exact arithmetic (multiplication, left division, right LCMs) in a zoo of
//!   concrete right LCM semigroups — `ℕᵏ`, free monoids, Artin monoids given
//!   by Coxeter-style exponent matrices, Thompson's monoid `F⁺`,
//!   Baumslag–Solitar monoids `BS(n,m)⁺`, the affine monoid `ℕ ⋊ ℕˣ`, and
//!   graph products of any of these ([`semigroup`], [`reversing`], [`zoo`],
//!   [`graph_product`]);
//! * evaluation of contractive Hilbert-space representations and of the
//!   inclusion–exclusion positivity operators `Z(F)` whose joint positivity
//!   characterises the existence of a minimal isometric, Nica-covariant
//!   dilation ([`representation`], [`regularity`]);
//! * certificate production: a binary reduction tree that rewrites any `Z(F)`
//!   as an explicit positive combination of base-case operators
//!   ([`regularity::reduction_certificate`]);
//! * a concrete truncated dilation built from the completely positive definite
//!   kernel of a representation, together with Nica-covariance diagnostics and
//!   a lower-triangular Cholesky-style factorisation of the kernel matrix
//!   ([`dilation`]).
//!
//! Numerical work uses dense complex matrices ([`linalg::CMatrix`]) with
//! explicitly pinned tolerances ([`linalg::Tolerances`]). All randomness in
//! tests is seeded; all set iterations are in a deterministic payload order,
//! so every computation here is reproducible run over run. With the `parallel`
//! feature (on by default) independent work items are evaluated on a rayon
//! pool, but sums are always reduced in the same fixed order, so enabling or
//! disabling the feature changes timings only, never bits.

#![deny(missing_docs)]

pub mod dilation;
pub mod graph_product;
pub mod linalg;
pub mod par;
pub mod regularity;
pub mod representation;
pub mod reversing;
pub mod semigroup;
pub mod zoo;

pub use linalg::{CMatrix, Tolerances};
pub use semigroup::{Element, LcmOutcome, SemigroupHandle, SgError};
