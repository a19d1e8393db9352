//! Arithmetic for the built-in coordinate-style semigroups.
//!
//! These are the members of the zoo whose elements are naturally *data*
//! rather than words modulo relations:
//!
//! * `ℕᵏ` — tuples under addition; the right LCM is the componentwise max;
//! * free monoids — words under concatenation; two words have a common right
//!   multiple exactly when one is a prefix of the other;
//! * the affine monoid `ℕ ⋊ ℕˣ` — pairs `(a, m)` with `a ∈ ℕ`, `m ≥ 1`,
//!   multiplying by `(a, m)(b, n) = (a + m·b, m·n)`. Right LCMs are a
//!   Chinese-remainder computation; two elements are disjoint exactly when
//!   their translation parts disagree modulo `gcd` of the dilation parts.
//!
//! Everything here is exact integer arithmetic on plain data; the
//! [`crate::semigroup::SemigroupHandle`] dispatch layer wraps these functions
//! in the common element type.

use crate::semigroup::SgError;

// ---------------------------------------------------------------------------
// ℕᵏ
// ---------------------------------------------------------------------------

/// Componentwise sum, the product in `ℕᵏ`.
pub fn nk_multiply(x: &[u64], y: &[u64]) -> Vec<u64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

/// Componentwise maximum: the right LCM in `ℕᵏ` (never disjoint).
pub fn nk_lcm(x: &[u64], y: &[u64]) -> Vec<u64> {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| *a.max(b)).collect()
}

/// `p⁻¹x` in `ℕᵏ`: defined when `p ≤ x` componentwise.
pub fn nk_left_divide(p: &[u64], x: &[u64]) -> Option<Vec<u64>> {
    debug_assert_eq!(p.len(), x.len());
    p.iter()
        .zip(x)
        .map(|(a, b)| b.checked_sub(*a))
        .collect::<Option<Vec<u64>>>()
}

// ---------------------------------------------------------------------------
// Free monoids
// ---------------------------------------------------------------------------

/// Right LCM in a free monoid: the longer word if one is a prefix of the
/// other, `None` (disjoint ideals) otherwise.
pub fn free_lcm(u: &[u32], v: &[u32]) -> Option<Vec<u32>> {
    let n = u.len().min(v.len());
    if u[..n] == v[..n] {
        Some(if u.len() >= v.len() { u.to_vec() } else { v.to_vec() })
    } else {
        None
    }
}

/// `p⁻¹x` in a free monoid: the remaining suffix when `p` is a prefix of `x`.
pub fn free_left_divide(p: &[u32], x: &[u32]) -> Option<Vec<u32>> {
    if p.len() <= x.len() && x[..p.len()] == *p {
        Some(x[p.len()..].to_vec())
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// ℕ ⋊ ℕˣ
// ---------------------------------------------------------------------------

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Validate an affine pair: the dilation part must be a positive integer.
pub fn affine_validate(a: u64, m: u64) -> Result<(), SgError> {
    let _ = a;
    if m == 0 {
        return Err(SgError::Malformed(
            "affine element needs dilation part m >= 1".into(),
        ));
    }
    Ok(())
}

/// Product `(a, m)·(b, n) = (a + m·b, m·n)` in `ℕ ⋊ ℕˣ`.
///
/// Fails on `u64` overflow rather than wrapping.
pub fn affine_multiply(x: (u64, u64), y: (u64, u64)) -> Result<(u64, u64), SgError> {
    let (a, m) = x;
    let (b, n) = y;
    let shift = m
        .checked_mul(b)
        .and_then(|mb| a.checked_add(mb))
        .ok_or_else(|| SgError::Malformed("affine product overflows u64".into()))?;
    let scale = m
        .checked_mul(n)
        .ok_or_else(|| SgError::Malformed("affine product overflows u64".into()))?;
    Ok((shift, scale))
}

/// `p⁻¹x` in `ℕ ⋊ ℕˣ`.
///
/// `(a, m)⁻¹(c, l)` exists exactly when `m | l`, `c ≥ a` and `m | c − a`.
pub fn affine_left_divide(p: (u64, u64), x: (u64, u64)) -> Option<(u64, u64)> {
    let (a, m) = p;
    let (c, l) = x;
    if l % m != 0 || c < a || (c - a) % m != 0 {
        return None;
    }
    Some(((c - a) / m, l / m))
}

/// Right LCM in `ℕ ⋊ ℕˣ` by the Chinese remainder theorem.
///
/// `(a, m)` and `(b, n)` have a common right multiple exactly when
/// `a ≡ b (mod gcd(m, n))`; in that case the minimal one is `(c₀, lcm(m, n))`
/// where `c₀` is the smallest integer `≥ max(a, b)` congruent to `a` mod `m`
/// and to `b` mod `n`. Returns `None` when the ideals are disjoint.
pub fn affine_lcm(x: (u64, u64), y: (u64, u64)) -> Result<Option<(u64, u64)>, SgError> {
    let (a, m) = x;
    let (b, n) = y;
    let g = gcd(m, n);
    if a % g != b % g {
        return Ok(None);
    }
    // Work in i128 so intermediate CRT values cannot overflow at desk scale.
    let (a, m, b, n) = (a as i128, m as i128, b as i128, n as i128);
    let l = m / g as i128 * n; // lcm(m, n)
    // Solve c ≡ a (mod m), c ≡ b (mod n): c = a + m·t with
    // m·t ≡ b − a (mod n), i.e. (m/g)·t ≡ (b−a)/g (mod n/g).
    let ng = n / g as i128;
    let (mg, diff) = (m / g as i128, (b - a) / g as i128);
    let inv = mod_inverse(mg.rem_euclid(ng), ng)
        .expect("m/g and n/g are coprime, so the inverse exists");
    let t = (diff.rem_euclid(ng) * inv).rem_euclid(ng);
    let mut c = a + m * t; // ≡ a (m), ≡ b (n); may still sit below max(a, b)
    let floor = a.max(b);
    if c < floor {
        c += l * ((floor - c + l - 1) / l);
    } else {
        c -= l * ((c - floor) / l);
    }
    debug_assert!(c >= floor && (c - a) % m == 0 && (c - b) % n == 0);
    let c = u64::try_from(c)
        .map_err(|_| SgError::Malformed("affine lcm overflows u64".into()))?;
    let l = u64::try_from(l)
        .map_err(|_| SgError::Malformed("affine lcm overflows u64".into()))?;
    Ok(Some((c, l)))
}

/// Modular inverse of `a` modulo `n` (both positive, coprime).
fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let (mut old_r, mut r) = (a, n);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        None
    } else {
        Some(old_s.rem_euclid(n))
    }
}

/// All primes `≤ bound`, ascending.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut q = p * p;
            while q <= n {
                sieve[q] = false;
                q += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Prime factorisation of `m ≥ 1` as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// The standard generating family of `ℕ ⋊ ℕˣ` truncated at a prime bound:
/// the translation `(1, 1)` together with `(i, p)` for every prime `p ≤ bound`
/// and `0 ≤ i < p`. These are exactly the non-identity elements with no
/// proper left divisor other than units, up to the prime cutoff.
pub fn affine_minimal_generators(prime_bound: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(1, 1)];
    for p in primes_up_to(prime_bound) {
        for i in 0..p {
            out.push((i, p));
        }
    }
    out
}

/// The truncation box `{(a, m) : a ≤ a_max, 1 ≤ m ≤ m_max}`, in ascending
/// `(m, a)` order with the identity `(0, 1)` first.
pub fn affine_box(a_max: u64, m_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in 1..=m_max.max(1) {
        for a in 0..=a_max {
            out.push((a, m));
        }
    }
    out.sort_by_key(|&(a, m)| (m, a));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nk_lcm_is_componentwise_max() {
        assert_eq!(nk_lcm(&[1, 5, 0], &[3, 2, 0]), vec![3, 5, 0]);
        assert_eq!(nk_left_divide(&[1, 2], &[3, 2]), Some(vec![2, 0]));
        assert_eq!(nk_left_divide(&[1, 3], &[3, 2]), None);
    }

    #[test]
    fn free_lcm_is_prefix_order() {
        assert_eq!(free_lcm(&[0, 1], &[0]), Some(vec![0, 1]));
        assert_eq!(free_lcm(&[0], &[0, 1]), Some(vec![0, 1]));
        assert_eq!(free_lcm(&[0], &[1]), None);
        assert_eq!(free_left_divide(&[0], &[0, 1]), Some(vec![1]));
        assert_eq!(free_left_divide(&[1], &[0, 1]), None);
    }

    #[test]
    fn affine_product_and_division_roundtrip() {
        let x = (3, 2);
        let y = (5, 7);
        let xy = affine_multiply(x, y).unwrap();
        assert_eq!(xy, (3 + 2 * 5, 14));
        assert_eq!(affine_left_divide(x, xy), Some(y));
        assert_eq!(affine_left_divide(y, xy), None);
    }

    /// Exhaustive cross-check of the CRT lcm against a brute-force search
    /// over small boxes: the computed value must be a common multiple that
    /// divides every common multiple in the box, and disjointness must match
    /// the residue criterion.
    #[test]
    fn affine_lcm_matches_brute_force() {
        let pairs: Vec<(u64, u64)> = affine_box(6, 6);
        for &x in &pairs {
            for &y in &pairs {
                let got = affine_lcm(x, y).unwrap();
                match got {
                    None => assert_ne!(
                        x.0 % gcd(x.1, y.1),
                        y.0 % gcd(x.1, y.1),
                        "declared disjoint but residues agree: {x:?} {y:?}"
                    ),
                    Some(z) => {
                        assert!(affine_left_divide(x, z).is_some());
                        assert!(affine_left_divide(y, z).is_some());
                        // z divides every common multiple in a generous box
                        for c in affine_box(60, 60) {
                            if affine_left_divide(x, c).is_some()
                                && affine_left_divide(y, c).is_some()
                            {
                                assert!(
                                    affine_left_divide(z, c).is_some(),
                                    "{z:?} does not divide common multiple {c:?} of {x:?},{y:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn affine_lcm_hand_values() {
        // (1,2) ∨ (0,3) = (3,6): 3 ≡ 1 (mod 2), 3 ≡ 0 (mod 3), minimal.
        assert_eq!(affine_lcm((1, 2), (0, 3)).unwrap(), Some((3, 6)));
        // Residue obstruction: (0,2) vs (1,2) differ mod gcd = 2.
        assert_eq!(affine_lcm((0, 2), (1, 2)).unwrap(), None);
    }

    #[test]
    fn minimal_generator_family_shape() {
        let g = affine_minimal_generators(5);
        assert_eq!(
            g,
            vec![(1, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3), (0, 5), (1, 5), (2, 5), (3, 5), (4, 5)]
        );
    }

    #[test]
    fn primes_and_factorization() {
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
