//! Index-p pairs of positive-definite lattices, the polarized K3 isogeny
//! construction, and the fibers of the shrink/grow correspondence.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fp::field::check_prime;
use crate::fp::linalg::{checked_pow, digits, normalize};
use crate::lattice::QuadLattice;
use crate::linalg::{
    column_hnf_basis, integer_kernel, relative_quotient, saturate, solve_in_span, IntMatrix,
};
use crate::padic::{recover_candidates, shrink_set, PLattice, ScaledLattice};

/// `Λ̃ ⊂ Λ` of index `p`, both positive definite; `tilde_basis` is in the
/// coordinates of `Λ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct MinimalPair {
    lambda: QuadLattice,
    tilde_basis: IntMatrix,
    p: u64,
}

impl MinimalPair {
    pub fn new(lambda: QuadLattice, tilde_basis: &IntMatrix, p: u64) -> Result<Self> {
        check_prime(p)?;
        if !lambda.is_positive_definite() {
            return Err(Error::pre("Λ must be positive definite"));
        }
        if tilde_basis.rows() != lambda.rank() || tilde_basis.cols() != lambda.rank() {
            return Err(Error::DimensionMismatch {
                expected: lambda.rank(),
                actual: tilde_basis.cols(),
            });
        }
        let q = relative_quotient(&IntMatrix::identity(lambda.rank()), tilde_basis)?;
        if q.order() != Some(BigInt::from(p)) {
            return Err(Error::pre(format!("Λ̃ must have index {p} in Λ")));
        }
        Ok(MinimalPair {
            lambda,
            tilde_basis: column_hnf_basis(tilde_basis),
            p,
        })
    }

    pub fn lambda(&self) -> &QuadLattice {
        &self.lambda
    }

    pub fn tilde_basis(&self) -> &IntMatrix {
        &self.tilde_basis
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn lambda_tilde(&self) -> QuadLattice {
        self.lambda
            .restrict(&self.tilde_basis)
            .expect("shape checked")
    }
}

/// Every `Λ̃ ⊂ Λ` of index `p`, as kernels of the nonzero functionals
/// `Λ → F_p` up to scalars. Count `(p^r − 1)/(p − 1)`.
pub fn enumerate_index_p_sublattices(
    lambda: &QuadLattice,
    p: u64,
    max_points: u64,
) -> Result<Vec<MinimalPair>> {
    check_prime(p)?;
    let r = lambda.rank();
    let total = checked_pow(p, r)
        .filter(|&t| t <= max_points)
        .ok_or(Error::GuardExceeded {
            what: "functionals mod p",
            needed: checked_pow(p, r).map_or(u128::MAX, u128::from),
            limit: max_points as u128,
        })?;
    let mut out = Vec::new();
    for idx in 1..total {
        let f = digits(idx, r, p);
        if normalize(&f, p) != f {
            continue;
        }
        let mut row: Vec<BigInt> = f.iter().map(|&x| BigInt::from(x)).collect();
        row.push(BigInt::from(p));
        let k = integer_kernel(&IntMatrix::from_big_rows(vec![row], r + 1)?);
        let basis = k.select_rows(&(0..r).collect::<Vec<_>>());
        out.push(MinimalPair::new(lambda.clone(), &basis, p)?);
    }
    out.sort();
    Ok(out)
}

/// A rank-22 even unimodular lattice with a primitive vector of positive norm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedK3Lattice {
    pub lattice: QuadLattice,
    pub xi: Vec<BigInt>,
}

impl PolarizedK3Lattice {
    /// `(k3, e + d·f)` with `(e, f)` the first hyperbolic plane.
    pub fn standard(d: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("degree must be positive".into()));
        }
        let lattice = QuadLattice::k3();
        let mut xi = lattice.zero_vector();
        xi[0] = BigInt::one();
        xi[1] = BigInt::from(d);
        Ok(PolarizedK3Lattice { lattice, xi })
    }

    pub fn degree(&self) -> BigInt {
        self.lattice.quad_value(&self.xi).expect("shape checked")
    }

    pub fn is_primitive(&self) -> bool {
        let col = IntMatrix::from_columns(self.lattice.rank(), std::slice::from_ref(&self.xi));
        col.ok()
            .and_then(|c| saturate(self.lattice.rank(), &c).ok())
            .is_some_and(|s| s.is_direct_summand)
    }

    pub fn is_even(&self) -> bool {
        self.lattice
            .gram()
            .entries()
            .iter()
            .enumerate()
            .all(|(k, x)| {
                let n = self.lattice.rank();
                k / n != k % n || x.is_even()
            })
    }

    pub fn validate(&self) -> Result<()> {
        if self.lattice.rank() != 22 || !self.lattice.is_unimodular() {
            return Err(Error::pre("K3 lattice must be rank 22 and unimodular"));
        }
        if self.xi.len() != 22 || self.degree() <= BigInt::zero() || !self.is_primitive() {
            return Err(Error::pre(
                "polarization must be primitive of positive degree",
            ));
        }
        Ok(())
    }
}

/// Replace the first hyperbolic pair `(e, f)` by `(p·e, p⁻¹·f)` and the
/// polarization `ξ` by `p·ξ`, written in the new basis.
pub fn isogenous_polarization(input: &PolarizedK3Lattice, p: u64) -> Result<PolarizedK3Lattice> {
    check_prime(p)?;
    input.validate()?;
    let n = input.lattice.rank();
    let pb = BigInt::from(p);
    // New basis over the denominator p: columns p²·e, f, p·e_i.
    let mut diag = vec![pb.clone(); n];
    diag[0] = &pb * &pb;
    diag[1] = BigInt::one();
    let t = IntMatrix::diagonal(&diag);
    let g = &(&t.transpose() * &input.lattice.gram()) * &t;
    let gram = g
        .div_exact(&(&pb * &pb))
        .ok_or_else(|| Error::InvariantViolation("new basis is not integral".into()))?;
    let lattice = QuadLattice::from_gram(&gram)?;
    // Coordinates c with T·c / p = p·ξ.
    let target: Vec<BigInt> = input.xi.iter().map(|x| x * &pb * &pb).collect();
    let xi = solve_in_span(&t, &target)
        .ok_or_else(|| Error::InvariantViolation("p·ξ is not in the new lattice".into()))?;
    let out = PolarizedK3Lattice { lattice, xi };
    out.validate()?;
    Ok(out)
}

/// The `p`-isogenous polarized lattice of degree `p²·d` built from
/// `(k3, e + d·f)`.
pub fn k3_isogeny(d: u64, p: u64) -> Result<PolarizedK3Lattice> {
    isogenous_polarization(&PolarizedK3Lattice::standard(d)?, p)
}

fn check_embedding(n: &QuadLattice, embedding: &IntMatrix, lambda: &QuadLattice) -> Result<()> {
    if embedding.rows() != n.rank() || embedding.cols() != lambda.rank() {
        return Err(Error::DimensionMismatch {
            expected: n.rank(),
            actual: embedding.rows(),
        });
    }
    if n.restrict(embedding)?.gram() != lambda.gram() {
        return Err(Error::pre("embedding is not isometric"));
    }
    if !saturate(n.rank(), embedding)?.is_direct_summand {
        return Err(Error::pre("embedding image is not a direct summand"));
    }
    Ok(())
}

/// Self-dual lattices `Ñ` adjacent to `N` with `Ñ ∩ W[1/p] = W̃`, where `W`
/// and `W̃` are the images of `Λ` and `Λ̃`.
pub fn shrink_fiber(
    n: &QuadLattice,
    embedding: &IntMatrix,
    pair: &MinimalPair,
    max_points: u64,
) -> Result<Vec<PLattice>> {
    check_embedding(n, embedding, pair.lambda())?;
    let r = pair.lambda().rank();
    if 2 * r + 4 > n.rank() {
        return Err(Error::pre(format!(
            "rank(Λ) = {r} exceeds (rank(N) − 4)/2 for rank(N) = {}",
            n.rank()
        )));
    }
    let w_tilde = embedding * pair.tilde_basis();
    shrink_set(n, embedding, &w_tilde, pair.p(), max_points)
}

/// The unique self-dual `N′` adjacent to `Ñ` with `N′ ∩ W[1/p] = W`, where
/// `W` is the image of `Λ`. Requires `Ñ ∩ W[1/p]` to be the image of `Λ̃`.
pub fn grow_unique(
    nt: &PLattice,
    embedding: &IntMatrix,
    pair: &MinimalPair,
    max_points: u64,
) -> Result<PLattice> {
    if nt.p() != pair.p() {
        return Err(Error::InvalidParameter(
            "prime of Ñ and of the pair differ".into(),
        ));
    }
    check_embedding(nt.ambient(), embedding, pair.lambda())?;
    let w_tilde = embedding * pair.tilde_basis();
    if nt.intersect_span(embedding)? != ScaledLattice::integral(&w_tilde) {
        return Err(Error::pre("image of Λ̃ is not Ñ ∩ W[1/p]"));
    }
    let (survivors, _) = recover_candidates(nt, embedding, max_points)?;
    match survivors.len() {
        1 => Ok(survivors.into_iter().next().expect("one")),
        k => Err(Error::InvariantViolation(format!(
            "{k} self-dual lattices grow from Ñ (expected exactly 1)"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::AbelianQuotient;

    #[test]
    fn index_p_counts() {
        for (r, p, expected) in [(1, 5, 1), (2, 2, 3), (3, 3, 13), (4, 2, 15)] {
            let lam = QuadLattice::from_gram(&IntMatrix::diagonal(&vec![2; r])).unwrap();
            let pairs = enumerate_index_p_sublattices(&lam, p, 1_000_000).unwrap();
            assert_eq!(pairs.len(), expected);
            let mut d = pairs.clone();
            d.dedup();
            assert_eq!(d.len(), expected);
        }
        let lam = QuadLattice::rank1(3).unwrap();
        let pair = &enumerate_index_p_sublattices(&lam, 7, 100).unwrap()[0];
        assert_eq!(pair.tilde_basis(), &IntMatrix::from_rows(&[vec![7]]));
    }

    #[test]
    fn k3_examples() {
        let out = k3_isogeny(1, 2).unwrap();
        assert_eq!(out.degree(), BigInt::from(4));
        assert_eq!(
            out.xi[..3],
            [BigInt::from(1), BigInt::from(4), BigInt::from(0)]
        );
        let out = k3_isogeny(3, 2).unwrap();
        let perp = out
            .lattice
            .orthogonal_complement(
                &IntMatrix::from_columns(22, std::slice::from_ref(&out.xi)).unwrap(),
            )
            .unwrap();
        assert_eq!(
            perp.lattice().discriminant_group().unwrap(),
            AbelianQuotient::cyclic(24)
        );
        assert!(out.is_even());
        assert_eq!(
            out.lattice.signature().unwrap(),
            QuadLattice::k3().signature().unwrap()
        );
    }

    #[test]
    fn repeated_isogeny_multiplies_degree_by_p4() {
        let once = k3_isogeny(2, 3).unwrap();
        let twice = isogenous_polarization(&once, 3).unwrap();
        assert_eq!(twice.degree(), BigInt::from(2 * 81));
    }

    #[test]
    fn shrink_and_grow() {
        let n = QuadLattice::hyperbolic_sum(3);
        let lam = QuadLattice::rank1(1).unwrap();
        let pair = &enumerate_index_p_sublattices(&lam, 2, 100).unwrap()[0];
        let emb = IntMatrix::from_rows(&[vec![1], vec![1], vec![0], vec![0], vec![0], vec![0]]);
        let fiber = shrink_fiber(&n, &emb, pair, 1_000_000).unwrap();
        assert!(!fiber.is_empty());
        let ambient = PLattice::ambient_lattice(&n, 2).unwrap();
        for nt in &fiber {
            assert_eq!(grow_unique(nt, &emb, pair, 1_000_000).unwrap(), ambient);
        }
        let bad = emb.scale(&BigInt::from(2));
        assert!(shrink_fiber(&n, &bad, pair, 1_000_000).is_err());
        assert!(grow_unique(&ambient, &emb, pair, 1_000_000).is_err());
    }
}
