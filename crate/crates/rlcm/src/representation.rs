//! Finite-dimensional representations of the built-in semigroups.
//!
//! A [`Representation`] assigns a square matrix to every generator of a
//! semigroup and extends multiplicatively: coordinates become powers, words
//! become products along the canonical form, affine pairs factor through the
//! shift and the prime dilations, and graph-product syllables multiply their
//! per-vertex images. Because elements are canonical forms and the defining
//! relations of the presentation are verified numerically at assembly, the
//! extension is well defined up to the verification tolerance.
//!
//! Verification ([`Representation::verify`], run automatically by
//! [`Representation::assemble`]) checks two things and reports both in a
//! [`RelationReport`]: every generator image is a contraction (operator norm
//! at most `1 + identity_eps`), and every defining relation of the
//! presentation holds with residual at most `identity_eps` scaled by the
//! relation's word length. Operations downstream that require a verified
//! representation consult [`Representation::is_verified`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::linalg::{self, CMatrix, Tolerances};
use crate::semigroup::{Element, LcmOutcome, Payload, SemigroupHandle, SgError};
use crate::zoo;

/// Errors from representation assembly and evaluation.
#[derive(Debug, Error)]
pub enum RepError {
    /// Underlying semigroup arithmetic failed.
    #[error(transparent)]
    Semigroup(#[from] SgError),
    /// A matrix has the wrong shape.
    #[error("dimension mismatch: {context}")]
    Dimension {
        /// What was being checked.
        context: String,
    },
    /// A generator image needed for this operation was not supplied.
    #[error("missing generator image for {label}")]
    MissingGenerator {
        /// Which generator.
        label: String,
    },
    /// A supplied generator key does not name a generator of this semigroup.
    #[error("unexpected generator key {label}")]
    UnexpectedGenerator {
        /// The offending key.
        label: String,
    },
}

/// Names one generator of a semigroup in a handle-independent way.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKey {
    /// Atom by index: coordinates `e_{i+1}`, word letters, Thompson `x_i`.
    Atom(u32),
    /// The affine translation generator `(1, 1)`.
    Plus,
    /// The affine prime dilation `(0, p)`.
    Prime(u64),
    /// A generator of the component sitting at a graph-product vertex.
    Vertex(usize, Box<GenKey>),
}

impl GenKey {
    /// Nested vertex key.
    pub fn at_vertex(v: usize, inner: GenKey) -> GenKey {
        GenKey::Vertex(v, Box::new(inner))
    }

    fn label(&self, handle: &SemigroupHandle) -> String {
        match (self, handle) {
            (GenKey::Atom(i), h) => h
                .atom_label(*i)
                .unwrap_or_else(|| format!("atom {i}")),
            (GenKey::Plus, _) => "plus".into(),
            (GenKey::Prime(p), _) => format!("p{p}"),
            (GenKey::Vertex(v, inner), SemigroupHandle::GraphProduct(data)) => format!(
                "{}:{}",
                data.vertex_names[*v],
                inner.label(&data.components[*v])
            ),
            (GenKey::Vertex(v, inner), _) => format!("vertex {v}:{inner:?}"),
        }
    }
}

/// One defining relation of a presentation, as two words over generator keys.
#[derive(Debug, Clone)]
struct Relation {
    label: String,
    lhs: Vec<GenKey>,
    rhs: Vec<GenKey>,
}

/// Outcome of verifying a representation: contractivity per generator and
/// residual per defining relation.
#[derive(Debug, Clone)]
pub struct RelationReport {
    /// `(generator label, operator norm, within bound)` per generator.
    pub contractions: Vec<(String, f64, bool)>,
    /// `(relation label, residual operator norm, within bound)` per relation.
    pub relations: Vec<(String, f64, bool)>,
    /// All rows passed.
    pub pass: bool,
}

impl RelationReport {
    /// Largest relation residual (0 when there are no relations).
    pub fn max_relation_residual(&self) -> f64 {
        self.relations.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    /// Human-readable failing rows.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (label, norm, ok) in &self.contractions {
            if !ok {
                out.push(format!("generator {label} has norm {norm:.6} > 1"));
            }
        }
        for (label, residual, ok) in &self.relations {
            if !ok {
                out.push(format!("relation {label} has residual {residual:.3e}"));
            }
        }
        out
    }
}

/// A verified-at-assembly matrix representation of a semigroup.
///
/// Immutable after assembly; evaluation is pure, so values are safe to share
/// across threads.
#[derive(Debug, Clone)]
pub struct Representation {
    handle: SemigroupHandle,
    dim: usize,
    images: BTreeMap<GenKey, CMatrix>,
    tol: Tolerances,
    report: RelationReport,
}

impl Representation {
    /// Assemble a representation from generator images and verify it.
    ///
    /// Structural problems (wrong shapes, unknown keys, missing required
    /// generators) are hard errors. Failed contractivity or relation checks
    /// are *not* errors: they are recorded in the report, the representation
    /// is returned, and [`Representation::is_verified`] answers `false` so
    /// positivity machinery can refuse it while diagnostics still render it.
    pub fn assemble(
        handle: SemigroupHandle,
        dim: usize,
        images: BTreeMap<GenKey, CMatrix>,
        tol: Tolerances,
    ) -> Result<Representation, RepError> {
        if dim == 0 {
            return Err(RepError::Dimension {
                context: "representation dimension must be at least 1".into(),
            });
        }
        for (key, m) in &images {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(RepError::Dimension {
                    context: format!(
                        "image of {} is {}x{}, expected {dim}x{dim}",
                        key.label(&handle),
                        m.nrows(),
                        m.ncols()
                    ),
                });
            }
        }
        check_keys(&handle, &images)?;
        let report = verify_images(&handle, dim, &images, &tol);
        Ok(Representation {
            handle,
            dim,
            images,
            tol,
            report,
        })
    }

    /// The semigroup this representation acts for.
    pub fn handle(&self) -> &SemigroupHandle {
        &self.handle
    }

    /// Matrix dimension `d` of the space the images act on.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The tolerances used for verification and downstream positivity tests.
    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The verification report produced at assembly.
    pub fn relation_report(&self) -> &RelationReport {
        &self.report
    }

    /// Whether every contractivity and relation check passed.
    pub fn is_verified(&self) -> bool {
        self.report.pass
    }

    /// The image of a single generator, if supplied.
    pub fn image(&self, key: &GenKey) -> Option<&CMatrix> {
        self.images.get(key)
    }

    /// All generator keys with supplied images.
    pub fn keys(&self) -> impl Iterator<Item = &GenKey> {
        self.images.keys()
    }

    /// Human-readable name of a generator key under this handle.
    pub fn key_label(&self, key: &GenKey) -> String {
        key.label(&self.handle)
    }

    /// The representation of one graph-product vertex on the same space:
    /// images are the `Vertex(v, ·)`-keyed matrices with the prefix removed.
    pub fn component(&self, v: usize) -> Result<Representation, RepError> {
        let SemigroupHandle::GraphProduct(data) = &self.handle else {
            return Err(RepError::UnexpectedGenerator {
                label: "component() applies to graph products only".into(),
            });
        };
        if v >= data.components.len() {
            return Err(RepError::UnexpectedGenerator {
                label: format!("vertex {v} out of range"),
            });
        }
        let mut images = BTreeMap::new();
        for (key, m) in &self.images {
            if let GenKey::Vertex(u, inner) = key {
                if *u == v {
                    images.insert((**inner).clone(), m.clone());
                }
            }
        }
        Representation::assemble(data.components[v].clone(), self.dim, images, self.tol)
    }

    /// Evaluate the representation on an element: the product of generator
    /// images along the canonical form.
    pub fn evaluate(&self, x: &Element) -> Result<CMatrix, RepError> {
        self.handle.validate(x)?;
        self.evaluate_at(&self.handle, &[], x)
    }

    /// `T(r)T(r)*` for a common LCM, the zero matrix for disjoint ideals.
    pub fn tt_star(&self, outcome: &LcmOutcome) -> Result<CMatrix, RepError> {
        match outcome {
            LcmOutcome::Common(r) => {
                let t = self.evaluate(r)?;
                Ok(&t * t.adjoint())
            }
            LcmOutcome::Disjoint => Ok(CMatrix::zeros(self.dim, self.dim)),
        }
    }

    fn image_at(&self, path: &[usize], key: GenKey) -> Result<&CMatrix, RepError> {
        let wrapped = path
            .iter()
            .rev()
            .fold(key, |k, &v| GenKey::Vertex(v, Box::new(k)));
        let label = wrapped.label(&self.handle);
        self.images
            .get(&wrapped)
            .ok_or(RepError::MissingGenerator { label })
    }

    fn evaluate_at(
        &self,
        handle: &SemigroupHandle,
        path: &[usize],
        x: &Element,
    ) -> Result<CMatrix, RepError> {
        match (handle, x.payload()) {
            (_, Payload::Coords(c)) => {
                let mut acc = linalg::identity(self.dim);
                for (i, &e) in c.iter().enumerate() {
                    if e > 0 {
                        let img = self.image_at(path, GenKey::Atom(i as u32))?;
                        acc *= mat_pow(img, e);
                    }
                }
                Ok(acc)
            }
            (_, Payload::Word(w)) => {
                let mut acc = linalg::identity(self.dim);
                for &a in w {
                    acc *= self.image_at(path, GenKey::Atom(a))?;
                }
                Ok(acc)
            }
            (_, &Payload::Affine { shift, scale }) => {
                let mut acc = if shift > 0 {
                    mat_pow(self.image_at(path, GenKey::Plus)?, shift)
                } else {
                    linalg::identity(self.dim)
                };
                for (p, e) in zoo::factorize(scale) {
                    let img = self.image_at(path, GenKey::Prime(p))?;
                    acc *= mat_pow(img, e as u64);
                }
                Ok(acc)
            }
            (SemigroupHandle::GraphProduct(data), Payload::Syllables(sylls)) => {
                let mut acc = linalg::identity(self.dim);
                for (v, g) in sylls {
                    let mut deeper = path.to_vec();
                    deeper.push(*v);
                    acc *= self.evaluate_at(&data.components[*v], &deeper, g)?;
                }
                Ok(acc)
            }
            _ => unreachable!("validate() rejects mismatched payloads"),
        }
    }
}

/// Binary exponentiation for matrix powers.
fn mat_pow(m: &CMatrix, mut e: u64) -> CMatrix {
    let mut base = m.clone();
    let mut acc = linalg::identity(m.nrows());
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// The generator keys a handle *requires* images for. Affine handles require
/// only the shift generator (prime dilations are optional and demand-driven);
/// everything else requires its full atom family.
pub fn required_keys(handle: &SemigroupHandle) -> Vec<GenKey> {
    match handle {
        SemigroupHandle::Nk { k } => (0..*k as u32).map(GenKey::Atom).collect(),
        SemigroupHandle::Free { alphabet } => (0..*alphabet as u32).map(GenKey::Atom).collect(),
        SemigroupHandle::Artin { exponents, .. } => {
            (0..exponents.len() as u32).map(GenKey::Atom).collect()
        }
        SemigroupHandle::Thompson { active, .. } => {
            (0..*active as u32).map(GenKey::Atom).collect()
        }
        SemigroupHandle::Bs { .. } => vec![GenKey::Atom(0), GenKey::Atom(1)],
        SemigroupHandle::Affine => vec![GenKey::Plus],
        SemigroupHandle::GraphProduct(data) => {
            let mut out = Vec::new();
            for (v, comp) in data.components.iter().enumerate() {
                for key in required_keys(comp) {
                    out.push(GenKey::at_vertex(v, key));
                }
            }
            out
        }
    }
}

/// Whether a key legitimately names a generator of the handle (required or
/// optional).
fn key_is_known(handle: &SemigroupHandle, key: &GenKey) -> bool {
    match (handle, key) {
        (SemigroupHandle::Nk { k }, GenKey::Atom(i)) => (*i as usize) < *k,
        (SemigroupHandle::Free { alphabet }, GenKey::Atom(i)) => (*i as usize) < *alphabet,
        (SemigroupHandle::Artin { exponents, .. }, GenKey::Atom(i)) => {
            (*i as usize) < exponents.len()
        }
        (SemigroupHandle::Thompson { active, .. }, GenKey::Atom(i)) => (*i as usize) < *active,
        (SemigroupHandle::Bs { .. }, GenKey::Atom(i)) => *i < 2,
        (SemigroupHandle::Affine, GenKey::Plus) => true,
        (SemigroupHandle::Affine, GenKey::Prime(p)) => {
            zoo::factorize(*p).len() == 1 && zoo::factorize(*p)[0].1 == 1
        }
        (SemigroupHandle::GraphProduct(data), GenKey::Vertex(v, inner)) => {
            *v < data.components.len() && key_is_known(&data.components[*v], inner)
        }
        _ => false,
    }
}

fn check_keys(
    handle: &SemigroupHandle,
    images: &BTreeMap<GenKey, CMatrix>,
) -> Result<(), RepError> {
    for key in images.keys() {
        if !key_is_known(handle, key) {
            return Err(RepError::UnexpectedGenerator {
                label: key.label(handle),
            });
        }
    }
    for key in required_keys(handle) {
        if !images.contains_key(&key) {
            return Err(RepError::MissingGenerator {
                label: key.label(handle),
            });
        }
    }
    Ok(())
}

/// The defining relations among the supplied generators, as key words.
fn defining_relations(
    handle: &SemigroupHandle,
    keys: &BTreeSet<GenKey>,
    path: &[usize],
) -> Vec<Relation> {
    let wrap = |key: GenKey| {
        path.iter()
            .rev()
            .fold(key, |k, &v| GenKey::Vertex(v, Box::new(k)))
    };
    let atom_word = |indices: &[u32]| -> Vec<GenKey> {
        indices.iter().map(|&i| wrap(GenKey::Atom(i))).collect()
    };
    let mut out = Vec::new();
    match handle {
        SemigroupHandle::Nk { k } => {
            for i in 0..*k as u32 {
                for j in (i + 1)..*k as u32 {
                    out.push(Relation {
                        label: format!("e{}e{} = e{}e{}", i + 1, j + 1, j + 1, i + 1),
                        lhs: atom_word(&[i, j]),
                        rhs: atom_word(&[j, i]),
                    });
                }
            }
        }
        SemigroupHandle::Free { .. } => {}
        SemigroupHandle::Artin { exponents, .. } => {
            for i in 0..exponents.len() {
                for j in (i + 1)..exponents.len() {
                    if let Some(m) = exponents[i][j] {
                        let lhs = crate::reversing::alternating(i as u32, j as u32, m);
                        let rhs = crate::reversing::alternating(j as u32, i as u32, m);
                        out.push(Relation {
                            label: format!("alternating braid relation e{}/e{}", i + 1, j + 1),
                            lhs: atom_word(&lhs),
                            rhs: atom_word(&rhs),
                        });
                    }
                }
            }
        }
        SemigroupHandle::Thompson { active, .. } => {
            // x_n x_k = x_k x_{n+1} needs the image of x_{n+1}, so only
            // relations fully inside the tracked range are checkable.
            if *active >= 3 {
                for n in 1..=(*active as u32 - 2) {
                    for k in 0..n {
                        out.push(Relation {
                            label: format!("x{n}x{k} = x{k}x{}", n + 1),
                            lhs: atom_word(&[n, k]),
                            rhs: atom_word(&[k, n + 1]),
                        });
                    }
                }
            }
        }
        SemigroupHandle::Bs { n, m, .. } => {
            let mut lhs = vec![0u32];
            lhs.extend(std::iter::repeat(1).take(*n as usize));
            let mut rhs = vec![1u32; *m as usize];
            rhs.push(0);
            out.push(Relation {
                label: format!("ab^{n} = b^{m}a"),
                lhs: atom_word(&lhs),
                rhs: atom_word(&rhs),
            });
        }
        SemigroupHandle::Affine => {
            let primes: Vec<u64> = keys
                .iter()
                .filter_map(|k| match k {
                    GenKey::Prime(p) => Some(*p),
                    _ => None,
                })
                .collect();
            for &p in &primes {
                let mut rhs = vec![wrap(GenKey::Plus); p as usize];
                rhs.push(wrap(GenKey::Prime(p)));
                out.push(Relation {
                    label: format!("p{p}·plus = plus^{p}·p{p}"),
                    lhs: vec![wrap(GenKey::Prime(p)), wrap(GenKey::Plus)],
                    rhs,
                });
            }
            for (a, &p) in primes.iter().enumerate() {
                for &q in &primes[a + 1..] {
                    out.push(Relation {
                        label: format!("p{p}p{q} = p{q}p{p}"),
                        lhs: vec![wrap(GenKey::Prime(p)), wrap(GenKey::Prime(q))],
                        rhs: vec![wrap(GenKey::Prime(q)), wrap(GenKey::Prime(p))],
                    });
                }
            }
        }
        SemigroupHandle::GraphProduct(data) => {
            for (v, comp) in data.components.iter().enumerate() {
                let inner_keys: BTreeSet<GenKey> = keys
                    .iter()
                    .filter_map(|k| match k {
                        GenKey::Vertex(u, inner) if *u == v => Some((**inner).clone()),
                        _ => None,
                    })
                    .collect();
                let mut deeper = path.to_vec();
                deeper.push(v);
                out.extend(defining_relations(comp, &inner_keys, &deeper));
            }
            for u in 0..data.components.len() {
                for v in (u + 1)..data.components.len() {
                    if !data.graph.are_adjacent(u, v) {
                        continue;
                    }
                    let keys_u: Vec<GenKey> = keys
                        .iter()
                        .filter(|k| matches!(k, GenKey::Vertex(w, _) if *w == u))
                        .cloned()
                        .collect();
                    let keys_v: Vec<GenKey> = keys
                        .iter()
                        .filter(|k| matches!(k, GenKey::Vertex(w, _) if *w == v))
                        .cloned()
                        .collect();
                    for ku in &keys_u {
                        for kv in &keys_v {
                            out.push(Relation {
                                label: format!(
                                    "[{}, {}] = 0",
                                    data.vertex_names[u], data.vertex_names[v]
                                ),
                                lhs: vec![wrap(ku.clone()), wrap(kv.clone())],
                                rhs: vec![wrap(kv.clone()), wrap(ku.clone())],
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

fn verify_images(
    handle: &SemigroupHandle,
    dim: usize,
    images: &BTreeMap<GenKey, CMatrix>,
    tol: &Tolerances,
) -> RelationReport {
    let mut contractions = Vec::new();
    let mut pass = true;
    for (key, m) in images {
        let norm = linalg::operator_norm(m);
        let ok = norm <= 1.0 + tol.identity_eps;
        pass &= ok;
        contractions.push((key.label(handle), norm, ok));
    }
    let keys: BTreeSet<GenKey> = images.keys().cloned().collect();
    let mut relations = Vec::new();
    for rel in defining_relations(handle, &keys, &[]) {
        let product = |word: &[GenKey]| -> CMatrix {
            let mut acc = linalg::identity(dim);
            for key in word {
                acc *= images.get(key).expect("checked keys");
            }
            acc
        };
        let residual = linalg::operator_norm(&(product(&rel.lhs) - product(&rel.rhs)));
        let bound = tol.identity_eps * (rel.lhs.len() + rel.rhs.len()).max(1) as f64;
        let ok = residual <= bound;
        pass &= ok;
        relations.push((rel.label, residual, ok));
    }
    RelationReport {
        contractions,
        relations,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::creal;
    use crate::reversing;

    fn scalar(handle: SemigroupHandle, entries: &[(GenKey, f64)]) -> Representation {
        let images = entries
            .iter()
            .map(|(k, t)| (k.clone(), CMatrix::from_element(1, 1, creal(*t))))
            .collect();
        Representation::assemble(handle, 1, images, Tolerances::default()).unwrap()
    }

    #[test]
    fn braid_relation_accepts_equal_contractions() {
        let h = reversing::build_artin(&[vec![None, Some(3)], vec![Some(3), None]]).unwrap();
        let c = CMatrix::from_row_slice(2, 2, &[creal(0.3), creal(0.4), creal(0.0), creal(0.5)]);
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), c.clone());
        images.insert(GenKey::Atom(1), c.clone());
        let rep = Representation::assemble(h, 2, images, Tolerances::default()).unwrap();
        assert!(rep.is_verified(), "{:?}", rep.relation_report().failures());
        // Both canonical-form evaluations of the braid word agree.
        let lhs = rep
            .evaluate(&rep.handle().element_from_word(&[0, 1, 0]).unwrap())
            .unwrap();
        let rhs = rep
            .evaluate(&rep.handle().element_from_word(&[1, 0, 1]).unwrap())
            .unwrap();
        assert!(linalg::operator_norm(&(lhs - rhs)) < 1e-10);
    }

    #[test]
    fn non_commuting_images_fail_on_commuting_coordinates() {
        let h = SemigroupHandle::nk(2).unwrap();
        let a = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(0.5), creal(0.0), creal(0.5)]);
        let b = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(0.0), creal(0.5), creal(0.5)]);
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), a);
        images.insert(GenKey::Atom(1), b);
        let rep = Representation::assemble(h, 2, images, Tolerances::default()).unwrap();
        assert!(!rep.is_verified());
        assert!(rep
            .relation_report()
            .failures()
            .iter()
            .any(|f| f.contains("e1e2 = e2e1")));
    }

    #[test]
    fn free_monoid_has_no_relations() {
        let rep = scalar(
            SemigroupHandle::free(2).unwrap(),
            &[(GenKey::Atom(0), 0.9), (GenKey::Atom(1), 0.9)],
        );
        assert!(rep.is_verified());
        assert!(rep.relation_report().relations.is_empty());
    }

    #[test]
    fn contraction_bound_is_enforced() {
        let h = SemigroupHandle::free(1).unwrap();
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), CMatrix::from_element(1, 1, creal(1.25)));
        let rep = Representation::assemble(h, 1, images, Tolerances::default()).unwrap();
        assert!(!rep.is_verified());
    }

    #[test]
    fn coordinate_evaluation_takes_powers() {
        let h = SemigroupHandle::nk(2).unwrap();
        let rep = scalar(
            h.clone(),
            &[(GenKey::Atom(0), 0.5), (GenKey::Atom(1), 0.25)],
        );
        let x = h.element_from_coords(&[2, 1]).unwrap();
        let m = rep.evaluate(&x).unwrap();
        assert!((m[(0, 0)].re - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn affine_evaluation_factors_through_primes() {
        let h = SemigroupHandle::affine();
        // Scalars satisfy t_p·t_plus = t_plus^p·t_p only for unimodular or
        // vanishing t_plus; use the unitary shift.
        let rep = scalar(
            h.clone(),
            &[
                (GenKey::Plus, 1.0),
                (GenKey::Prime(2), 0.5),
                (GenKey::Prime(3), 0.25),
            ],
        );
        assert!(rep.is_verified(), "{:?}", rep.relation_report().failures());
        // (1, 12) = plus^1 · p2^2 · p3: 1 · 0.25 · 0.25 = 0.0625
        let x = h.element_from_affine(1, 12).unwrap();
        let m = rep.evaluate(&x).unwrap();
        assert!((m[(0, 0)].re - 0.0625).abs() < 1e-14);
        // A scale with an unknown prime factor is an explicit error.
        let y = h.element_from_affine(0, 5).unwrap();
        assert!(matches!(
            rep.evaluate(&y),
            Err(RepError::MissingGenerator { .. })
        ));
    }

    #[test]
    fn tt_star_conventions() {
        let h = SemigroupHandle::nk(1).unwrap();
        let rep = scalar(h.clone(), &[(GenKey::Atom(0), 0.5)]);
        let two = h.element_from_coords(&[2]).unwrap();
        let m = rep.tt_star(&LcmOutcome::Common(two)).unwrap();
        assert!((m[(0, 0)].re - 0.0625).abs() < 1e-14);
        let z = rep.tt_star(&LcmOutcome::Disjoint).unwrap();
        assert_eq!(z[(0, 0)], linalg::czero());
    }

    #[test]
    fn bs_relation_checked() {
        let h = reversing::build_bs(2, 3).unwrap();
        // Scalars always satisfy ab² = b³a… only if a·b² = b³·a as numbers:
        // t_a t_b² = t_b³ t_a forces t_b² = t_b³, i.e. t_b ∈ {0, 1}.
        let good = scalar(
            h.clone(),
            &[(GenKey::Atom(0), 0.5), (GenKey::Atom(1), 1.0)],
        );
        assert!(good.is_verified());
        let bad = scalar(h, &[(GenKey::Atom(0), 0.5), (GenKey::Atom(1), 0.9)]);
        assert!(!bad.is_verified());
    }

    #[test]
    fn graph_product_images_split_by_vertex() {
        use crate::graph_product::{build_graph_product, SimpleGraph};
        let graph = SimpleGraph::complete(2);
        let comps = vec![SemigroupHandle::nk(1).unwrap(), SemigroupHandle::free(1).unwrap()];
        let h = build_graph_product(graph, comps, vec!["u".into(), "v".into()]).unwrap();
        let rep = scalar(
            h.clone(),
            &[
                (GenKey::at_vertex(0, GenKey::Atom(0)), 0.5),
                (GenKey::at_vertex(1, GenKey::Atom(0)), 0.25),
            ],
        );
        assert!(rep.is_verified());
        let u = h
            .element_from_syllables(&[(0, SemigroupHandle::nk(1).unwrap().element_from_coords(&[2]).unwrap())])
            .unwrap();
        let v = h
            .element_from_syllables(&[(1, SemigroupHandle::free(1).unwrap().element_from_word(&[0]).unwrap())])
            .unwrap();
        let x = h.multiply(&u, &v).unwrap();
        let m = rep.evaluate(&x).unwrap();
        assert!((m[(0, 0)].re - 0.0625).abs() < 1e-14);
        // Component view strips the vertex prefix.
        let cu = rep.component(0).unwrap();
        assert!(cu.is_verified());
        assert_eq!(cu.image(&GenKey::Atom(0)).unwrap()[(0, 0)], creal(0.5));
    }

    #[test]
    fn multiplicativity_on_random_words() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let h = reversing::build_artin(&[vec![None, Some(3)], vec![Some(3), None]]).unwrap();
        let c = CMatrix::from_row_slice(2, 2, &[creal(0.3), creal(0.2), creal(0.0), creal(0.6)]);
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), c.clone());
        images.insert(GenKey::Atom(1), c.clone());
        let rep = Representation::assemble(h.clone(), 2, images, Tolerances::default()).unwrap();
        for _ in 0..50 {
            let w1: Vec<u32> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
            let w2: Vec<u32> = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(0..2)).collect();
            let x = h.element_from_word(&w1).unwrap();
            let y = h.element_from_word(&w2).unwrap();
            let xy = h.multiply(&x, &y).unwrap();
            let lhs = rep.evaluate(&xy).unwrap();
            let rhs = rep.evaluate(&x).unwrap() * rep.evaluate(&y).unwrap();
            assert!(linalg::operator_norm(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn tt_star_conjugation_identity() {
        // TT*(pq) = T(p) TT*(q) T(p)* for canonical products.
        let h = SemigroupHandle::free(2).unwrap();
        let a = CMatrix::from_row_slice(2, 2, &[creal(0.0), creal(0.7), creal(0.0), creal(0.0)]);
        let b = CMatrix::from_row_slice(2, 2, &[creal(0.5), creal(0.0), creal(0.0), creal(0.3)]);
        let mut images = BTreeMap::new();
        images.insert(GenKey::Atom(0), a);
        images.insert(GenKey::Atom(1), b);
        let rep = Representation::assemble(h.clone(), 2, images, Tolerances::default()).unwrap();
        let p = h.element_from_word(&[0, 1]).unwrap();
        let q = h.element_from_word(&[1, 0]).unwrap();
        let pq = h.multiply(&p, &q).unwrap();
        let lhs = rep.tt_star(&LcmOutcome::Common(pq)).unwrap();
        let tp = rep.evaluate(&p).unwrap();
        let inner = rep.tt_star(&LcmOutcome::Common(q)).unwrap();
        let rhs = &tp * inner * tp.adjoint();
        assert!(linalg::operator_norm(&(lhs - rhs)) < 1e-12);
    }
}
