use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::One;

use super::field::{is_square, mul};
use super::isometry::{
    eichler_transvection, enumerate_orthogonal_group, is_special, reflection, spinor_norm,
    FpIsometry, SpinorClass,
};
use super::linalg::{checked_pow, digits, normalize, FpVec};
use super::space::{FpQuadSpace, ProjLine, WittType};
use crate::error::{Error, Result};

/// `|SO(V)(F_p)|` from the closed formulas. In odd dimension over `F_2`
/// this is `|O(V)| = |Sp_{2m}(F_2)|`.
pub fn so_order(space: &FpQuadSpace) -> Result<BigInt> {
    let kind = space.witt_type()?;
    let q = BigInt::from(space.p());
    let n = space.dim();
    let m = n / 2;
    let prod = |upto: usize| -> BigInt {
        (1..=upto).fold(BigInt::one(), |acc, i| acc * (q.pow(2 * i as u32) - 1))
    };
    Ok(match kind {
        WittType::Odd => q.pow((m * m) as u32) * prod(m),
        WittType::Split if m == 0 => BigInt::one(),
        WittType::Split => q.pow((m * (m - 1)) as u32) * (q.pow(m as u32) - 1) * prod(m - 1),
        WittType::NonSplit => q.pow((m * (m - 1)) as u32) * (q.pow(m as u32) + 1) * prod(m - 1),
    })
}

/// `|SO(V)(F_p)|` by enumerating the whole orthogonal group.
pub fn so_order_exhaustive(space: &FpQuadSpace, limit: u64) -> Result<u64> {
    if !space.is_nondegenerate() {
        return Err(Error::Degenerate("quadratic space is degenerate".into()));
    }
    let group = enumerate_orthogonal_group(space, limit)?;
    Ok(group.iter().filter(|g| is_special(space, g)).count() as u64)
}

fn span_vectors(space: &FpQuadSpace, basis: &[FpVec], limit: u64) -> Result<Vec<FpVec>> {
    let p = space.p();
    let count = checked_pow(p, basis.len()).unwrap_or(u64::MAX);
    if count > limit {
        return Err(Error::GuardExceeded {
            what: "subspace vectors",
            needed: count as u128,
            limit: limit as u128,
        });
    }
    Ok((1..count)
        .map(|idx| space.combine(basis, &digits(idx, basis.len(), p)))
        .collect())
}

/// Generators of a subgroup of `SO(V)` fixing `span(w)` pointwise: products
/// `τ_{v₀}τ_v` of reflections in anisotropic `v₀, v ∈ w^⊥`, and Eichler
/// transvections `E_{u,x}` with `u, x ∈ w^⊥`.
pub fn stabilizer_generators(
    space: &FpQuadSpace,
    w: &[FpVec],
    limit: u64,
) -> Result<Vec<FpIsometry>> {
    let p = space.p();
    let perp = space.orthogonal(w);
    let vectors = span_vectors(space, &perp, limit)?;
    let lines: BTreeSet<FpVec> = vectors.iter().map(|v| normalize(v, p)).collect();
    let mut gens = Vec::new();
    let anisotropic: Vec<&FpVec> = lines
        .iter()
        .filter(|v| space.q(v) != 0 && space.is_smooth_point(v))
        .collect();
    if let Some((v0, rest)) = anisotropic.split_first() {
        let t0 = reflection(space, v0)?;
        for v in rest {
            gens.push(t0.compose(&reflection(space, v)?, p));
        }
    }
    for u in lines.iter().filter(|v| space.q(v) == 0) {
        let within = space.orthogonal_within(&perp, std::slice::from_ref(u));
        for x in within {
            let e = eichler_transvection(space, u, &x)?;
            if !e.is_identity() {
                gens.push(e);
            }
        }
    }
    gens.sort();
    gens.dedup();
    Ok(gens)
}

/// The orbit of `seed` under [`stabilizer_generators`], intersected with
/// `universe` and sorted.
pub fn stabilizer_orbit(
    space: &FpQuadSpace,
    w: &[FpVec],
    seed: &ProjLine,
    universe: &[ProjLine],
    limit: u64,
) -> Result<Vec<ProjLine>> {
    if !space.is_isotropic_line(seed) {
        return Err(Error::pre("seed line is not isotropic"));
    }
    let p = space.p();
    let gens = stabilizer_generators(space, w, limit)?;
    let mut seen: BTreeSet<ProjLine> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seed.clone());
    queue.push_back(seed.clone());
    while let Some(line) = queue.pop_front() {
        for g in &gens {
            let img = ProjLine::new(&g.apply(line.generator(), p), p)?;
            if seen.insert(img.clone()) {
                if seen.len() as u64 > limit {
                    return Err(Error::GuardExceeded {
                        what: "orbit size",
                        needed: seen.len() as u128,
                        limit: limit as u128,
                    });
                }
                queue.push_back(img);
            }
        }
    }
    let universe: BTreeSet<&ProjLine> = universe.iter().collect();
    Ok(seen.into_iter().filter(|l| universe.contains(l)).collect())
}

/// A verified element of `SO(V)` fixing `span(w)` pointwise whose spinor
/// norm is a nonsquare: `τ_{v₁}τ_{v₂}` with `v_i ∈ w^⊥` and
/// `Q(v₁)Q(v₂)` a nonsquare. `None` when `w^⊥` has no such pair.
pub fn nontrivial_spinor_witness(
    space: &FpQuadSpace,
    w: &[FpVec],
    limit: u64,
) -> Result<Option<FpIsometry>> {
    let p = space.p();
    if p == 2 {
        return Err(Error::Unsupported(
            "spinor norms in characteristic 2".into(),
        ));
    }
    let perp = space.orthogonal(w);
    let vectors = span_vectors(space, &perp, limit)?;
    let Some(v1) = vectors.iter().find(|v| space.q(v) != 0) else {
        return Ok(None);
    };
    let q1 = space.q(v1);
    let Some(v2) = vectors
        .iter()
        .find(|v| space.q(v) != 0 && !is_square(mul(q1, space.q(v), p), p))
    else {
        return Ok(None);
    };
    let g = reflection(space, v1)?.compose(&reflection(space, v2)?, p);
    let fixes_w = w.iter().all(|x| g.apply(x, p) == *x);
    if !fixes_w || !is_special(space, &g) {
        return Err(Error::InvariantViolation(
            "spinor witness check failed".into(),
        ));
    }
    if spinor_norm(space, &g)? != SpinorClass::NonSquare {
        return Err(Error::InvariantViolation(
            "witness spinor norm disagrees with its factorization".into(),
        ));
    }
    Ok(Some(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp::isometry::DEFAULT_MAX_ELEMENTS;

    #[test]
    fn order_examples() {
        let h = FpQuadSpace::hyperbolic(3, 1).unwrap();
        assert_eq!(so_order(&h).unwrap(), BigInt::from(2));
        let d3 = FpQuadSpace::diagonal(3, &[1, 1, 1]).unwrap();
        assert_eq!(so_order(&d3).unwrap(), BigInt::from(24));
        assert_eq!(so_order_exhaustive(&d3, DEFAULT_MAX_ELEMENTS).unwrap(), 24);
        let aniso = FpQuadSpace::diagonal(3, &[1, 1]).unwrap();
        assert_eq!(so_order(&aniso).unwrap(), BigInt::from(4));
        assert_eq!(
            so_order_exhaustive(&aniso, DEFAULT_MAX_ELEMENTS).unwrap(),
            4
        );
        assert!(so_order(&FpQuadSpace::diagonal(3, &[1, 0]).unwrap()).is_err());
    }

    #[test]
    fn orders_match_enumeration() {
        let spaces = [
            FpQuadSpace::hyperbolic(2, 2).unwrap(),
            FpQuadSpace::new(
                2,
                vec![
                    vec![1, 1, 0, 0],
                    vec![0, 1, 0, 0],
                    vec![0, 0, 0, 1],
                    vec![0, 0, 0, 0],
                ],
            )
            .unwrap(),
            FpQuadSpace::diagonal(2, &[1])
                .unwrap()
                .orthogonal_sum(&FpQuadSpace::hyperbolic(2, 1).unwrap())
                .unwrap(),
            FpQuadSpace::hyperbolic(5, 1).unwrap(),
            FpQuadSpace::diagonal(5, &[1, 2]).unwrap(),
            FpQuadSpace::diagonal(5, &[1, 1, 1]).unwrap(),
            FpQuadSpace::hyperbolic(3, 2).unwrap(),
        ];
        for s in spaces {
            let formula = so_order(&s).unwrap();
            let brute = so_order_exhaustive(&s, DEFAULT_MAX_ELEMENTS).unwrap();
            assert_eq!(formula, BigInt::from(brute), "{s:?}");
        }
    }

    #[test]
    fn orbit_of_a_singleton_universe() {
        let s = FpQuadSpace::hyperbolic(3, 2).unwrap();
        let seed = s.line(&[1, 0, 0, 0]).unwrap();
        let out = stabilizer_orbit(&s, &[], &seed, std::slice::from_ref(&seed), 100_000).unwrap();
        assert_eq!(out, vec![seed]);
        let bad = s.line(&[1, 1, 0, 0]).unwrap();
        assert!(stabilizer_orbit(&s, &[], &bad, &[], 100_000).is_err());
    }

    #[test]
    fn so_is_transitive_on_isotropic_lines() {
        for p in [2, 3] {
            let s = FpQuadSpace::hyperbolic(p, 3).unwrap();
            let lines = s.enumerate_isotropic_lines(1_000_000).unwrap();
            let orbit = stabilizer_orbit(&s, &[], &lines[0], &lines, 1_000_000).unwrap();
            assert_eq!(orbit, lines);
        }
    }

    #[test]
    fn generators_fix_w_and_are_special() {
        let s = FpQuadSpace::hyperbolic(3, 3).unwrap();
        let w = vec![vec![1, 1, 0, 0, 0, 0]];
        for g in stabilizer_generators(&s, &w, 1_000_000).unwrap() {
            assert_eq!(g.apply(&w[0], 3), w[0]);
            assert!(is_special(&s, &g));
            assert!(crate::fp::isometry::preserves_form(&s, g.matrix()));
        }
    }

    #[test]
    fn spinor_witness_for_a_line() {
        let s = FpQuadSpace::hyperbolic(5, 2).unwrap();
        let w = vec![vec![1, 1, 0, 0]];
        let g = nontrivial_spinor_witness(&s, &w, 1_000_000)
            .unwrap()
            .unwrap();
        assert_eq!(g.apply(&w[0], 5), w[0]);
    }
}
