//! Semigroup descriptors: the textual and JSON naming scheme under which the
//! command line constructs semigroup handles.

use std::fmt;

use serde::{Deserialize, Serialize};

use rlcm::graph_product::{build_graph_product, SimpleGraph};
use rlcm::reversing::{build_artin, build_bs, build_thompson};
use rlcm::semigroup::SemigroupHandle;

use crate::Failure;

/// A serializable recipe for one supported semigroup.
///
/// The command line accepts the compact string forms `nk:K`, `free:N`,
/// `artin:[[1,3],[3,1]]`, `thompson:K`, `bs:N,M`, and `nxn`, an inline JSON
/// object (`{"kind":"nk","k":2}`), or `@file.json`. Representation files
/// embed the JSON form under their `semigroup` key. Graph products only have
/// the JSON form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Descriptor {
    /// `ℕᵏ` under addition.
    Nk {
        /// Number of coordinates.
        k: usize,
    },
    /// Free monoid.
    Free {
        /// Alphabet size.
        alphabet: usize,
    },
    /// Artin monoid given by a Coxeter-style exponent matrix: diagonal
    /// entries are written `1`, an off-diagonal `0` means no relation
    /// between the two atoms, and `m ≥ 2` imposes the length-`m` braid
    /// relation `aba… = bab…`.
    Artin {
        /// The symmetric exponent matrix.
        matrix: Vec<Vec<u64>>,
    },
    /// Thompson's monoid with the given number of tracked generators.
    Thompson {
        /// Number of tracked generators `x_0 … x_{active−1}`.
        active: usize,
    },
    /// Baumslag–Solitar monoid `BS(n, m)⁺ = ⟨a, b | a bⁿ = bᵐ a⟩`.
    Bs {
        /// Exponent on the `a`-side.
        n: u32,
        /// Exponent on the `b`-side.
        m: u32,
    },
    /// The affine monoid `ℕ ⋊ ℕˣ` of maps `x ↦ mx + a`.
    Nxn,
    /// Graph product of named component semigroups: components at adjacent
    /// vertices commute elementwise.
    GraphProduct {
        /// The components, one per vertex.
        vertices: Vec<VertexDescriptor>,
        /// Commutation edges, as pairs of vertex names.
        edges: Vec<(String, String)>,
    },
}

/// One vertex of a graph product descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexDescriptor {
    /// The vertex name used in words (`name:atom`) and edges.
    pub name: String,
    /// The component semigroup.
    pub semigroup: Descriptor,
}

impl Descriptor {
    /// Parse the command-line descriptor syntax.
    pub fn parse(text: &str) -> Result<Descriptor, Failure> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix('@') {
            let body = std::fs::read_to_string(path).map_err(|e| {
                Failure::data(format!("cannot read descriptor file {path}: {e}"))
            })?;
            return serde_json::from_str(&body)
                .map_err(|e| Failure::data(format!("descriptor file {path}: {e}")));
        }
        if text.starts_with('{') {
            return serde_json::from_str(text)
                .map_err(|e| Failure::usage(format!("inline descriptor: {e}")));
        }
        if text == "nxn" {
            return Ok(Descriptor::Nxn);
        }
        let (kind, arg) = text.split_once(':').ok_or_else(|| {
            Failure::usage(format!(
                "unrecognised semigroup descriptor `{text}` (expected nk:K, free:N, \
                 artin:[[..]], thompson:K, bs:N,M, nxn, inline JSON, or @file.json)"
            ))
        })?;
        match kind {
            "nk" => Ok(Descriptor::Nk {
                k: parse_count(arg, "nk:K takes the number of coordinates")?,
            }),
            "free" => Ok(Descriptor::Free {
                alphabet: parse_count(arg, "free:N takes the alphabet size")?,
            }),
            "artin" => {
                let matrix: Vec<Vec<u64>> = serde_json::from_str(arg).map_err(|e| {
                    Failure::usage(format!("artin exponent matrix `{arg}`: {e}"))
                })?;
                Ok(Descriptor::Artin { matrix })
            }
            "thompson" => Ok(Descriptor::Thompson {
                active: parse_count(arg, "thompson:K takes the generator count")?,
            }),
            "bs" => {
                let parts: Vec<&str> = arg.split(',').collect();
                let parse = |t: &str| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Failure::usage(format!("bs:N,M takes two exponents, got `{arg}`")))
                };
                match parts[..] {
                    [n, m] => Ok(Descriptor::Bs {
                        n: parse(n)?,
                        m: parse(m)?,
                    }),
                    _ => Err(Failure::usage(format!(
                        "bs:N,M takes two exponents, got `{arg}`"
                    ))),
                }
            }
            _ => Err(Failure::usage(format!(
                "unrecognised semigroup kind `{kind}`"
            ))),
        }
    }

    /// Construct the semigroup handle, using `budget` as the reversing step
    /// budget wherever word rewriting is involved.
    pub fn build(&self, budget: usize) -> Result<SemigroupHandle, Failure> {
        match self {
            Descriptor::Nk { k } => SemigroupHandle::nk(*k).map_err(usage),
            Descriptor::Free { alphabet } => SemigroupHandle::free(*alphabet).map_err(usage),
            Descriptor::Artin { matrix } => {
                let exponents = exponents_from_matrix(matrix)?;
                let mut handle = build_artin(&exponents).map_err(usage)?;
                set_budget(&mut handle, budget);
                Ok(handle)
            }
            Descriptor::Thompson { active } => {
                let mut handle = build_thompson(*active).map_err(usage)?;
                set_budget(&mut handle, budget);
                Ok(handle)
            }
            Descriptor::Bs { n, m } => {
                let mut handle = build_bs(*n, *m).map_err(usage)?;
                set_budget(&mut handle, budget);
                Ok(handle)
            }
            Descriptor::Nxn => Ok(SemigroupHandle::affine()),
            Descriptor::GraphProduct { vertices, edges } => {
                let mut names = Vec::with_capacity(vertices.len());
                let mut components = Vec::with_capacity(vertices.len());
                for vertex in vertices {
                    if names.contains(&vertex.name) {
                        return Err(Failure::usage(format!(
                            "duplicate vertex name `{}`",
                            vertex.name
                        )));
                    }
                    names.push(vertex.name.clone());
                    components.push(vertex.semigroup.build(budget)?);
                }
                let mut index_edges = Vec::with_capacity(edges.len());
                for (u, v) in edges {
                    let find = |name: &String| {
                        names.iter().position(|n| n == name).ok_or_else(|| {
                            Failure::usage(format!("edge endpoint `{name}` is not a vertex"))
                        })
                    };
                    index_edges.push((find(u)?, find(v)?));
                }
                let graph = SimpleGraph::new(names.len(), &index_edges).map_err(usage)?;
                build_graph_product(graph, components, names).map_err(usage)
            }
        }
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::Nk { k } => write!(f, "nk:{k}"),
            Descriptor::Free { alphabet } => write!(f, "free:{alphabet}"),
            Descriptor::Artin { matrix } => {
                let rows: Vec<String> = matrix
                    .iter()
                    .map(|row| {
                        let entries: Vec<String> = row.iter().map(u64::to_string).collect();
                        format!("[{}]", entries.join(","))
                    })
                    .collect();
                write!(f, "artin:[{}]", rows.join(","))
            }
            Descriptor::Thompson { active } => write!(f, "thompson:{active}"),
            Descriptor::Bs { n, m } => write!(f, "bs:{n},{m}"),
            Descriptor::Nxn => write!(f, "nxn"),
            Descriptor::GraphProduct { .. } => {
                let json = serde_json::to_string(self).map_err(|_| fmt::Error)?;
                write!(f, "{json}")
            }
        }
    }
}

fn usage(e: rlcm::SgError) -> Failure {
    Failure::usage(e.to_string())
}

fn parse_count(arg: &str, what: &str) -> Result<usize, Failure> {
    arg.trim()
        .parse::<usize>()
        .map_err(|_| Failure::usage(format!("{what}, got `{arg}`")))
}

/// Map the CLI exponent convention (diagonal `1`, `0` meaning no relation)
/// onto the option-valued matrix the Artin builder expects.
fn exponents_from_matrix(matrix: &[Vec<u64>]) -> Result<Vec<Vec<Option<u32>>>, Failure> {
    let n = matrix.len();
    let mut exponents = Vec::with_capacity(n);
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(Failure::usage(format!(
                "artin exponent matrix row {i} has {} entries for {n} atoms",
                row.len()
            )));
        }
        let mut out = Vec::with_capacity(n);
        for (j, &entry) in row.iter().enumerate() {
            out.push(if i == j {
                if entry != 1 {
                    return Err(Failure::usage(
                        "artin exponent matrix diagonal entries must be 1",
                    ));
                }
                None
            } else {
                match entry {
                    0 => None,
                    1 => {
                        return Err(Failure::usage(
                            "artin off-diagonal exponents are 0 (no relation) or ≥ 2",
                        ))
                    }
                    m => Some(u32::try_from(m).map_err(|_| {
                        Failure::usage(format!("artin exponent {m} is out of range"))
                    })?),
                }
            });
        }
        exponents.push(out);
    }
    Ok(exponents)
}

fn set_budget(handle: &mut SemigroupHandle, budget: usize) {
    match handle {
        SemigroupHandle::Artin { budget: b, .. }
        | SemigroupHandle::Thompson { budget: b, .. }
        | SemigroupHandle::Bs { budget: b, .. } => *b = budget,
        _ => {}
    }
}
