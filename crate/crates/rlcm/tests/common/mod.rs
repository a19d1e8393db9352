//! Helpers shared by the integration suites: handle constructors, random
//! relation-satisfying representations, and matrix samplers.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rlcm::graph_product::{build_graph_product, SimpleGraph};
use rlcm::linalg::{self, creal};
use rlcm::representation::{GenKey, Representation};
use rlcm::reversing::{build_artin, build_bs, build_thompson};
use rlcm::semigroup::SemigroupHandle;
use rlcm::{CMatrix, Tolerances};
use num_complex::Complex64;

pub fn braid3() -> SemigroupHandle {
    build_artin(&[vec![None, Some(3)], vec![Some(3), None]]).unwrap()
}

pub fn bs23() -> SemigroupHandle {
    build_bs(2, 3).unwrap()
}

pub fn thompson(active: usize) -> SemigroupHandle {
    build_thompson(active).unwrap()
}

/// Complete-graph product of `ℕ` and `F₂⁺`.
pub fn complete_mixed_product() -> SemigroupHandle {
    let graph = SimpleGraph::complete(2);
    build_graph_product(
        graph,
        vec![
            SemigroupHandle::nk(1).unwrap(),
            SemigroupHandle::free(2).unwrap(),
        ],
        vec!["u".into(), "v".into()],
    )
    .unwrap()
}

/// Path-graph product of three copies of `ℕ` (a right-angled Artin monoid).
pub fn path_raam3() -> SemigroupHandle {
    let graph = SimpleGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
    build_graph_product(
        graph,
        vec![
            SemigroupHandle::nk(1).unwrap(),
            SemigroupHandle::nk(1).unwrap(),
            SemigroupHandle::nk(1).unwrap(),
        ],
        vec!["u".into(), "v".into(), "w".into()],
    )
    .unwrap()
}

/// A random complex matrix with independent entries in the unit disc.
pub fn random_matrix(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// A random contraction of operator norm exactly `norm`.
pub fn random_contraction(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> CMatrix {
    let m = random_matrix(rng, dim);
    let scale = linalg::operator_norm(&m).max(1e-9);
    m * creal(norm / scale)
}

/// A random diagonal contraction with entries of modulus at most `norm`.
pub fn random_diagonal(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let r = norm * rng.gen_range(0.05..1.0);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        m[(j, j)] = Complex64::from_polar(r, phase);
    }
    m
}

/// A random unitary diagonal.
pub fn random_unitary_diagonal(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        m[(j, j)] = Complex64::from_polar(1.0, phase);
    }
    m
}

/// Random diagonal representation of `ℕᵏ`.
pub fn nk_diagonal_rep(rng: &mut ChaCha8Rng, k: usize, dim: usize, norm: f64) -> Representation {
    let handle = SemigroupHandle::nk(k).unwrap();
    let images: BTreeMap<GenKey, CMatrix> = (0..k)
        .map(|i| (GenKey::Atom(i as u32), random_diagonal(rng, dim, norm)))
        .collect();
    Representation::assemble(handle, dim, images, Tolerances::default()).unwrap()
}

/// Random representation of a free monoid by independent dense contractions.
pub fn free_rep(rng: &mut ChaCha8Rng, alphabet: usize, dim: usize, norm: f64) -> Representation {
    let handle = SemigroupHandle::free(alphabet).unwrap();
    let images: BTreeMap<GenKey, CMatrix> = (0..alphabet)
        .map(|i| (GenKey::Atom(i as u32), random_contraction(rng, dim, norm)))
        .collect();
    Representation::assemble(handle, dim, images, Tolerances::default()).unwrap()
}

/// Random equal-generator representation of the braid monoid `B₃⁺` (the
/// braid relation holds identically when both atoms share one image).
pub fn braid_equal_rep(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> Representation {
    let t = random_contraction(rng, dim, norm);
    let images: BTreeMap<GenKey, CMatrix> =
        [(GenKey::Atom(0), t.clone()), (GenKey::Atom(1), t)].into();
    Representation::assemble(braid3(), dim, images, Tolerances::default()).unwrap()
}

/// Random representation of `BS(2, 3)⁺`: `b` gets a diagonal 0/1 projection
/// and `a` a diagonal contraction, which satisfies `a·b² = b³·a` entrywise.
pub fn bs_rep(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> Representation {
    let a = random_diagonal(rng, dim, norm);
    let mut b = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        b[(j, j)] = creal(if rng.gen_bool(0.6) { 1.0 } else { 0.0 });
    }
    let images: BTreeMap<GenKey, CMatrix> = [(GenKey::Atom(0), a), (GenKey::Atom(1), b)].into();
    Representation::assemble(bs23(), dim, images, Tolerances::default()).unwrap()
}

/// Random diagonal representation of a graph product: every vertex atom gets
/// a diagonal image, so all cross-vertex commutation relations hold exactly.
pub fn graph_product_diagonal_rep(
    rng: &mut ChaCha8Rng,
    handle: &SemigroupHandle,
    dim: usize,
    norm: f64,
) -> Representation {
    let SemigroupHandle::GraphProduct(data) = handle else {
        panic!("graph product handle expected");
    };
    let mut images = BTreeMap::new();
    for (v, comp) in data.components.iter().enumerate() {
        let atom_count = comp.atoms().expect("finite atom family").len();
        for i in 0..atom_count {
            images.insert(
                GenKey::at_vertex(v, GenKey::Atom(i as u32)),
                random_diagonal(rng, dim, norm),
            );
        }
    }
    Representation::assemble(handle.clone(), dim, images, Tolerances::default()).unwrap()
}

/// Scalar (1×1) representation from plain numbers, for any handle whose
/// required keys are plain atoms.
pub fn scalar_rep(handle: &SemigroupHandle, values: &[f64]) -> Representation {
    let images: BTreeMap<GenKey, CMatrix> = values
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            (
                GenKey::Atom(i as u32),
                CMatrix::from_row_slice(1, 1, &[creal(t)]),
            )
        })
        .collect();
    Representation::assemble(handle.clone(), 1, images, Tolerances::default()).unwrap()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
