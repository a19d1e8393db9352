//! The command-line word syntax: dot-separated atom names (`e1.e2.e1`),
//! closed-form comma tuples (`3,6` for coordinate and affine elements),
//! `vertex:atom` tokens for graph products, and `e` for the identity.

use rlcm::representation::GenKey;
use rlcm::semigroup::{Element, Payload, SemigroupHandle};

use crate::Failure;

/// Render an element in the word syntax. Inverse of [`parse_word`].
pub fn render_element(handle: &SemigroupHandle, x: &Element) -> String {
    match x.payload() {
        Payload::Coords(c) => c
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(","),
        Payload::Affine { shift, scale } => format!("{shift},{scale}"),
        Payload::Word(w) => {
            if w.is_empty() {
                "e".into()
            } else {
                w.iter()
                    .map(|&i| {
                        handle
                            .atom_label(i)
                            .unwrap_or_else(|| format!("g{i}"))
                    })
                    .collect::<Vec<_>>()
                    .join(".")
            }
        }
        Payload::Syllables(syllables) => {
            let SemigroupHandle::GraphProduct(data) = handle else {
                return "e".into();
            };
            if syllables.is_empty() {
                return "e".into();
            }
            let mut tokens = Vec::new();
            for (v, g) in syllables {
                let name = &data.vertex_names[*v];
                for token in render_element(&data.components[*v], g).split('.') {
                    tokens.push(format!("{name}:{token}"));
                }
            }
            tokens.join(".")
        }
    }
}

/// Parse the word syntax into an element of the handle.
pub fn parse_word(handle: &SemigroupHandle, text: &str) -> Result<Element, Failure> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Failure::usage("empty word"));
    }
    if text == "e" {
        return Ok(handle.identity());
    }
    match handle {
        SemigroupHandle::Nk { k } => {
            if starts_numeric(text) {
                let coords = parse_tuple(text)?;
                if coords.len() != *k {
                    return Err(Failure::usage(format!(
                        "expected {k} comma-separated coordinates, got `{text}`"
                    )));
                }
                handle
                    .element_from_coords(&coords)
                    .map_err(|e| Failure::usage(e.to_string()))
            } else {
                atom_word(handle, text)
            }
        }
        SemigroupHandle::Affine => {
            let parts = parse_tuple(text)?;
            match parts[..] {
                [shift, scale] => handle
                    .element_from_affine(shift, scale)
                    .map_err(|e| Failure::usage(e.to_string())),
                _ => Err(Failure::usage(format!(
                    "affine elements are written `shift,scale`, got `{text}`"
                ))),
            }
        }
        SemigroupHandle::GraphProduct(data) => {
            let mut acc = handle.identity();
            for token in text.split('.') {
                let (vertex, rest) = token.split_once(':').ok_or_else(|| {
                    Failure::usage(format!(
                        "graph-product token `{token}` must be written `vertex:atom`"
                    ))
                })?;
                let v = data
                    .vertex_names
                    .iter()
                    .position(|n| n == vertex)
                    .ok_or_else(|| Failure::usage(format!("unknown vertex `{vertex}`")))?;
                let inner = component_token(&data.components[v], rest)?;
                if data.components[v].is_identity(&inner) {
                    continue;
                }
                let syllable = handle
                    .element_from_syllables(&[(v, inner)])
                    .map_err(|e| Failure::usage(e.to_string()))?;
                acc = handle
                    .multiply(&acc, &syllable)
                    .map_err(|e| Failure::usage(format!("word `{text}`: {e}")))?;
            }
            Ok(acc)
        }
        _ => atom_word(handle, text),
    }
}

/// Parse a generator name into the typed key space of the handle: atom names
/// for atom-generated semigroups, `plus`/`p<prime>` for the affine monoid,
/// `vertex:name` for graph products.
pub fn parse_gen_key(handle: &SemigroupHandle, name: &str) -> Result<GenKey, Failure> {
    match handle {
        SemigroupHandle::Affine => {
            if name == "plus" {
                return Ok(GenKey::Plus);
            }
            if let Some(p) = name.strip_prefix('p').and_then(|t| t.parse::<u64>().ok()) {
                return Ok(GenKey::Prime(p));
            }
            Err(Failure::data(format!(
                "`{name}` is not an affine generator (expected `plus` or `p<prime>`)"
            )))
        }
        SemigroupHandle::GraphProduct(data) => {
            let (vertex, rest) = name.split_once(':').ok_or_else(|| {
                Failure::data(format!(
                    "graph-product generator `{name}` must be written `vertex:name`"
                ))
            })?;
            let v = data
                .vertex_names
                .iter()
                .position(|n| n == vertex)
                .ok_or_else(|| Failure::data(format!("unknown vertex `{vertex}`")))?;
            let inner = parse_gen_key(&data.components[v], rest)?;
            Ok(GenKey::at_vertex(v, inner))
        }
        _ => handle
            .parse_atom(name)
            .map(GenKey::Atom)
            .ok_or_else(|| Failure::data(format!("`{name}` does not name a generator"))),
    }
}

/// Parse a comma-separated tuple of natural numbers.
pub fn parse_tuple(text: &str) -> Result<Vec<u64>, Failure> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| Failure::usage(format!("`{t}` is not a natural number")))
        })
        .collect()
}

fn starts_numeric(text: &str) -> bool {
    text.chars().next().is_some_and(|c| c.is_ascii_digit())
}

/// A dot-separated word over named atoms, multiplied out left to right.
fn atom_word(handle: &SemigroupHandle, text: &str) -> Result<Element, Failure> {
    let mut acc = handle.identity();
    for token in text.split('.') {
        let atom = atom_token(handle, token)?;
        acc = handle
            .multiply(&acc, &atom)
            .map_err(|e| Failure::usage(format!("word `{text}`: {e}")))?;
    }
    Ok(acc)
}

fn atom_token(handle: &SemigroupHandle, token: &str) -> Result<Element, Failure> {
    let index = handle
        .parse_atom(token)
        .ok_or_else(|| Failure::usage(format!("unknown atom `{token}`")))?;
    match handle {
        SemigroupHandle::Nk { k } => {
            let mut coords = vec![0u64; *k];
            coords[index as usize] = 1;
            handle
                .element_from_coords(&coords)
                .map_err(|e| Failure::usage(e.to_string()))
        }
        _ => handle
            .element_from_word(&[index])
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

/// One token of a graph-product word, interpreted inside the component:
/// an atom name, a closed-form tuple, or `e`.
fn component_token(component: &SemigroupHandle, token: &str) -> Result<Element, Failure> {
    if token == "e" {
        return Ok(component.identity());
    }
    if starts_numeric(token) {
        let parts = parse_tuple(token)?;
        return match component {
            SemigroupHandle::Affine => match parts[..] {
                [shift, scale] => component
                    .element_from_affine(shift, scale)
                    .map_err(|e| Failure::usage(e.to_string())),
                _ => Err(Failure::usage(format!(
                    "affine component tokens are written `shift,scale`, got `{token}`"
                ))),
            },
            _ => component
                .element_from_coords(&parts)
                .map_err(|e| Failure::usage(e.to_string())),
        };
    }
    atom_token(component, token)
}
