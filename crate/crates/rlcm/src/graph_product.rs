//! Graph products of right LCM semigroups.
//!
//! Given a finite simple graph and a right LCM semigroup for each vertex, the
//! graph product is generated by the disjoint union of the components, with
//! elements of components on *adjacent* vertices commuting. Elements are
//! written as sequences of *syllables* `(vertex, component element)`; a
//! sequence is *reduced* when no syllable can be merged into an earlier
//! syllable on the same vertex by commuting it past adjacent ones.
//!
//! The canonical form used here is the greedy one: repeatedly pull the
//! least-indexed *initial* vertex to the front (a vertex is initial when its
//! first syllable can commute past everything before it), merging syllables
//! on the same vertex as they meet. Prefixes and suffixes of canonical forms
//! are canonical, which the enumeration and dilation layers rely on.
//!
//! Right LCMs are computed by a two-level recursion that peels one syllable
//! off the left argument and folds it through the right argument, using only
//! component LCMs and the graph: disjointness surfaces either as component
//! disjointness on a shared vertex or as two non-adjacent vertices that would
//! both have to be initial in a common multiple.

use std::sync::Arc;

use crate::semigroup::{Element, LcmOutcome, Payload, SemigroupHandle, SgError};

/// A finite simple graph on vertices `0 … n−1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    vertex_count: usize,
    adjacency: Vec<Vec<bool>>,
}

impl SimpleGraph {
    /// Build a simple graph from an edge list. Loops are rejected; edges are
    /// symmetrised; duplicates are harmless.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, SgError> {
        let mut adjacency = vec![vec![false; vertex_count]; vertex_count];
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(SgError::Malformed(format!(
                    "edge ({u}, {v}) exceeds vertex count {vertex_count}"
                )));
            }
            if u == v {
                return Err(SgError::Malformed(format!("loop at vertex {u}")));
            }
            adjacency[u][v] = true;
            adjacency[v][u] = true;
        }
        Ok(SimpleGraph {
            vertex_count,
            adjacency,
        })
    }

    /// Complete graph on `n` vertices (every pair of components commutes).
    pub fn complete(n: usize) -> SimpleGraph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        SimpleGraph::new(n, &edges).expect("complete graph edges are valid")
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Whether `u` and `v` are joined by an edge.
    pub fn are_adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u][v]
    }

    /// Whether the given vertices are pairwise adjacent.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..]
                .iter()
                .all(|&v| u == v || self.are_adjacent(u, v))
        })
    }
}

/// Vertex data of a graph product: the graph, one component handle per
/// vertex, and display names for the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphProductData {
    /// Commutation graph.
    pub graph: SimpleGraph,
    /// Component semigroup at each vertex.
    pub components: Vec<SemigroupHandle>,
    /// Vertex names used for rendering and parsing.
    pub vertex_names: Vec<String>,
}

/// Build a graph product handle, validating that graph, components and names
/// line up.
pub fn build_graph_product(
    graph: SimpleGraph,
    components: Vec<SemigroupHandle>,
    vertex_names: Vec<String>,
) -> Result<SemigroupHandle, SgError> {
    if components.len() != graph.vertex_count() {
        return Err(SgError::Malformed(format!(
            "{} components for {} vertices",
            components.len(),
            graph.vertex_count()
        )));
    }
    if vertex_names.len() != graph.vertex_count() {
        return Err(SgError::Malformed(format!(
            "{} vertex names for {} vertices",
            vertex_names.len(),
            graph.vertex_count()
        )));
    }
    for (i, name) in vertex_names.iter().enumerate() {
        if name.is_empty() || vertex_names[..i].contains(name) {
            return Err(SgError::Malformed(format!(
                "vertex names must be non-empty and distinct (offender: {name:?})"
            )));
        }
    }
    for c in &components {
        if c.capabilities().has_nontrivial_units {
            return Err(SgError::Malformed(
                "graph product components must have trivial units".into(),
            ));
        }
    }
    Ok(SemigroupHandle::GraphProduct(Arc::new(GraphProductData {
        graph,
        components,
        vertex_names,
    })))
}

/// View an element as its syllable sequence.
pub fn syllables(x: &Element) -> Result<&[(usize, Element)], SgError> {
    match x.payload() {
        Payload::Syllables(s) => Ok(s),
        other => Err(SgError::Malformed(format!(
            "expected a graph product element, got {other:?}"
        ))),
    }
}

/// Number of syllables of a graph product element.
pub fn syllable_count(x: &Element) -> u64 {
    match x.payload() {
        Payload::Syllables(s) => s.len() as u64,
        _ => 0,
    }
}

/// Vertices whose component contributes to `x`, ascending.
pub fn gp_vertex_support(x: &Element) -> Result<Vec<usize>, SgError> {
    let mut vs: Vec<usize> = syllables(x)?.iter().map(|(v, _)| *v).collect();
    vs.sort_unstable();
    vs.dedup();
    Ok(vs)
}

/// Reduce an arbitrary syllable sequence to canonical form.
///
/// Validates every syllable against its component, drops identity syllables,
/// then repeatedly pulls the least initial vertex to the output, merging
/// adjacent same-vertex syllables via component multiplication.
pub fn gp_reduce(
    data: &GraphProductData,
    raw: &[(usize, Element)],
) -> Result<Element, SgError> {
    let n = data.graph.vertex_count();
    let mut pending: Vec<(usize, Element)> = Vec::with_capacity(raw.len());
    for (v, g) in raw {
        if *v >= n {
            return Err(SgError::Malformed(format!(
                "syllable vertex {v} exceeds vertex count {n}"
            )));
        }
        data.components[*v].validate(g)?;
        if !data.components[*v].is_identity(g) {
            pending.push((*v, g.clone()));
        }
    }
    let mut out: Vec<(usize, Element)> = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        // Least initial vertex: scan in order, tracking which vertices block.
        let mut best: Option<(usize, usize)> = None; // (vertex, position)
        let mut seen: Vec<usize> = Vec::new();
        for (pos, (v, _)) in pending.iter().enumerate() {
            if !seen.contains(v) {
                if seen.iter().all(|&u| data.graph.are_adjacent(u, *v))
                    && best.map_or(true, |(bv, _)| *v < bv)
                {
                    best = Some((*v, pos));
                }
                seen.push(*v);
            }
        }
        let (v, pos) = best.expect("a non-empty sequence has an initial vertex");
        let (_, g) = pending.remove(pos);
        match out.last_mut() {
            Some((u, h)) if *u == v => {
                let merged = data.components[v].multiply(h, &g)?;
                debug_assert!(
                    !data.components[v].is_identity(&merged),
                    "unit-free components cannot merge to the identity"
                );
                *h = merged;
            }
            _ => out.push((v, g)),
        }
    }
    Ok(Element::from_payload(Payload::Syllables(out)))
}

/// Product in the graph product: concatenate and reduce.
pub fn gp_multiply(data: &GraphProductData, x: &Element, y: &Element) -> Result<Element, SgError> {
    let mut s = syllables(x)?.to_vec();
    s.extend_from_slice(syllables(y)?);
    gp_reduce(data, &s)
}

/// The initial vertices of `x`: those whose first syllable can be commuted
/// to the front. Ascending order.
pub fn gp_initial_vertices(data: &GraphProductData, x: &Element) -> Result<Vec<usize>, SgError> {
    let mut out = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (v, _) in syllables(x)? {
        if !seen.contains(v) {
            if seen.iter().all(|&u| data.graph.are_adjacent(u, *v)) {
                out.push(*v);
            }
            seen.push(*v);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Pull the first syllable on initial vertex `v` to the front:
/// `x = (v, g) · rest`. Returns `None` when `v` is not initial in `x`.
fn gp_pull_front(
    data: &GraphProductData,
    x: &Element,
    v: usize,
) -> Result<Option<(Element, Element)>, SgError> {
    let sylls = syllables(x)?;
    for (pos, (u, g)) in sylls.iter().enumerate() {
        if *u == v {
            if sylls[..pos]
                .iter()
                .all(|(w, _)| data.graph.are_adjacent(*w, v))
            {
                let mut rest: Vec<(usize, Element)> = sylls[..pos].to_vec();
                rest.extend_from_slice(&sylls[pos + 1..]);
                return Ok(Some((g.clone(), gp_reduce(data, &rest)?)));
            }
            return Ok(None);
        }
        if !data.graph.are_adjacent(*u, v) {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Left division `p⁻¹x` in the graph product, or `None` when `p ∤ x`.
///
/// Each syllable `(v, g)` of `p` in turn must find `v` initial in the
/// remainder with `g` left-dividing the component of its front `v`-syllable;
/// this is forced, so failure at any stage certifies indivisibility.
pub fn gp_left_divide(
    data: &GraphProductData,
    p: &Element,
    x: &Element,
) -> Result<Option<Element>, SgError> {
    let mut current = x.clone();
    for (v, g) in syllables(p)? {
        let Some((h, rest)) = gp_pull_front(data, &current, *v)? else {
            return Ok(None);
        };
        let Some(quotient) = data.components[*v].left_divide(g, &h)? else {
            return Ok(None);
        };
        let mut sylls: Vec<(usize, Element)> = Vec::new();
        if !data.components[*v].is_identity(&quotient) {
            sylls.push((*v, quotient));
        }
        sylls.extend_from_slice(syllables(&rest)?);
        current = gp_reduce(data, &sylls)?;
    }
    Ok(Some(current))
}

/// Right LCM in the graph product.
///
/// Peels the leading syllable `(v, p₁)` of `x` and computes
/// `x ∨ y = (v, p₁) · (x′ ∨ (v, p₁)⁻¹((v, p₁) ∨ y))`, where the inner
/// syllable-vs-element LCM walks `y` front to back. Guarded by a recursion
/// budget of `syllables(x) + syllables(y) + 64` which the terminating
/// recursion never reaches on valid inputs.
pub fn gp_lcm(data: &GraphProductData, x: &Element, y: &Element) -> Result<LcmOutcome, SgError> {
    let budget = syllable_count(x) + syllable_count(y) + 64;
    let mut fuel = budget * budget + 64;
    gp_lcm_inner(data, x, y, &mut fuel)
}

fn gp_lcm_inner(
    data: &GraphProductData,
    x: &Element,
    y: &Element,
    fuel: &mut u64,
) -> Result<LcmOutcome, SgError> {
    spend(fuel)?;
    let xs = syllables(x)?;
    if xs.is_empty() {
        return Ok(LcmOutcome::Common(y.clone()));
    }
    if syllables(y)?.is_empty() {
        return Ok(LcmOutcome::Common(x.clone()));
    }
    let (v, p1) = xs[0].clone();
    let x_rest = Element::from_payload(Payload::Syllables(xs[1..].to_vec()));
    match gp_syllable_lcm(data, v, &p1, y, fuel)? {
        LcmOutcome::Disjoint => Ok(LcmOutcome::Disjoint),
        LcmOutcome::Common(s1) => {
            let head = Element::from_payload(Payload::Syllables(vec![(v, p1)]));
            let w = gp_left_divide(data, &head, &s1)?
                .expect("an LCM is divisible by both of its arguments");
            match gp_lcm_inner(data, &x_rest, &w, fuel)? {
                LcmOutcome::Disjoint => Ok(LcmOutcome::Disjoint),
                LcmOutcome::Common(z) => Ok(LcmOutcome::Common(gp_multiply(data, &head, &z)?)),
            }
        }
    }
}

/// LCM of the single syllable `(v, p)` with `y`.
fn gp_syllable_lcm(
    data: &GraphProductData,
    v: usize,
    p: &Element,
    y: &Element,
    fuel: &mut u64,
) -> Result<LcmOutcome, SgError> {
    spend(fuel)?;
    let syllable = |vertex: usize, g: Element| {
        Element::from_payload(Payload::Syllables(vec![(vertex, g)]))
    };
    if syllables(y)?.is_empty() {
        return Ok(LcmOutcome::Common(syllable(v, p.clone())));
    }
    if let Some((q1, y_rest)) = gp_pull_front(data, y, v)? {
        // Shared front vertex: resolve in the component, then recurse on the
        // leftover component factor against the remainder of y.
        return match data.components[v].lcm(p, &q1)? {
            LcmOutcome::Disjoint => Ok(LcmOutcome::Disjoint),
            LcmOutcome::Common(t) => {
                let r = data.components[v]
                    .left_divide(&q1, &t)?
                    .expect("a component LCM is divisible by its arguments");
                if data.components[v].is_identity(&r) {
                    // p divides q1, so (v, p) divides y and the LCM is y.
                    return Ok(LcmOutcome::Common(y.clone()));
                }
                match gp_syllable_lcm(data, v, &r, &y_rest, fuel)? {
                    LcmOutcome::Disjoint => Ok(LcmOutcome::Disjoint),
                    LcmOutcome::Common(z) => {
                        Ok(LcmOutcome::Common(gp_multiply(data, &syllable(v, q1), &z)?))
                    }
                }
            }
        };
    }
    // v is not initial in y: the least initial vertex of y must commute with
    // v in any common multiple (two distinct initial vertices of the same
    // element are always adjacent), so non-adjacency certifies disjointness.
    let initial = gp_initial_vertices(data, y)?;
    let u_star = *initial
        .first()
        .expect("a non-identity element has an initial vertex");
    if !data.graph.are_adjacent(u_star, v) {
        return Ok(LcmOutcome::Disjoint);
    }
    let (q, y_rest) = gp_pull_front(data, y, u_star)?
        .expect("an initial vertex can always be pulled to the front");
    match gp_syllable_lcm(data, v, p, &y_rest, fuel)? {
        LcmOutcome::Disjoint => Ok(LcmOutcome::Disjoint),
        LcmOutcome::Common(z) => Ok(LcmOutcome::Common(gp_multiply(
            data,
            &Element::from_payload(Payload::Syllables(vec![(u_star, q)])),
            &z,
        )?)),
    }
}

fn spend(fuel: &mut u64) -> Result<(), SgError> {
    if *fuel == 0 {
        return Err(SgError::DepthGuard {
            context: "graph product lcm recursion",
        });
    }
    *fuel -= 1;
    Ok(())
}

/// All subsets of `vertices` that span cliques in `graph`, in ascending
/// bitmask order (so the empty set comes first and the order is
/// deterministic). `vertices` must be duplicate-free.
pub fn enumerate_clique_subsets(graph: &SimpleGraph, vertices: &[usize]) -> Vec<Vec<usize>> {
    let n = vertices.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let subset: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| vertices[i])
            .collect();
        if graph.is_clique(&subset) {
            out.push(subset);
        }
    }
    out
}
