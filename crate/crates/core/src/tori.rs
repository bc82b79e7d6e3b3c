//! Character-lattice bookkeeping for split formal tori and the diagonalizable
//! groups cut out by pairs of torus maps.
//!
//! A torus is represented by its character lattice `Z^n`; a torus map by the
//! matrix of its pullback on characters. Weight decompositions are ordered
//! `(−1, 0, +1)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{
    integer_kernel, lattice_intersection, quotient_structure, rank, relative_quotient, saturate,
    smith_normal_form, AbelianQuotient, IntMatrix,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharLattice {
    rank: usize,
    weights: Option<[usize; 3]>,
}

impl CharLattice {
    pub fn new(rank: usize) -> Self {
        CharLattice {
            rank,
            weights: None,
        }
    }

    pub fn split(a: usize, b: usize, c: usize) -> Self {
        CharLattice {
            rank: a + b + c,
            weights: Some([a, b, c]),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weights(&self) -> Option<[usize; 3]> {
        self.weights
    }

    fn require_weights(&self) -> Result<[usize; 3]> {
        self.weights
            .ok_or_else(|| Error::pre("character lattice has no weight decomposition"))
    }

    /// Weight of each coordinate.
    fn coordinate_weights(&self) -> Result<Vec<usize>> {
        let w = self.require_weights()?;
        Ok((0..3).flat_map(|i| std::iter::repeat_n(i, w[i])).collect())
    }
}

/// Character lattice of `Hom(H¹, H⁰)` for free modules of ranks `h1`, `h0`.
pub fn serre_tate_torus(h1: usize, h0: usize) -> CharLattice {
    CharLattice::new(h1 * h0)
}

/// A diagonalizable group `K ⊂ T × T` with its two projections to `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagGroupKernel {
    /// `X*(K)`.
    pub characters: AbelianQuotient,
    /// Per coordinate of `X*(T)`, in weight order: the divisor of the image
    /// of that character under `pr₁*` (resp. `pr₂*`).
    pub source_divisors: Vec<BigInt>,
    pub target_divisors: Vec<BigInt>,
    pub source_injective: bool,
    pub target_injective: bool,
}

impl DiagGroupKernel {
    pub fn source_degree(&self) -> BigInt {
        self.source_divisors.iter().product()
    }

    pub fn target_degree(&self) -> BigInt {
        self.target_divisors.iter().product()
    }

    /// Whether every divisor and every torsion invariant is a power of `p`.
    pub fn is_p_primary(&self, p: u64) -> bool {
        self.source_divisors
            .iter()
            .chain(&self.target_divisors)
            .chain(&self.characters.torsion)
            .all(|d| is_p_power(d, p))
    }
}

fn is_p_power(d: &BigInt, p: u64) -> bool {
    let pb = BigInt::from(p);
    let mut d = d.abs();
    if d.is_zero() {
        return false;
    }
    while d.is_multiple_of(&pb) {
        d /= &pb;
    }
    d.is_one()
}

/// Kernel of `ψ¹∘pr₁ − ψ⁰∘pr₂ : T × T → T′` from the character matrices
/// `psi1`, `psi0` (`n′ × n`), computed through one Smith form of the stacked
/// matrix `[ψ¹; −ψ⁰]`. Requires `X*(K)` torsion-free.
fn graph_kernel(psi1: &IntMatrix, psi0: &IntMatrix) -> Result<DiagGroupKernel> {
    let n = psi1.cols();
    let stacked = stack_rows(psi1, &psi0.scale(&-BigInt::one()))?;
    let gens = stacked;
    let characters = quotient_structure(2 * n, &gens)?;
    if !characters.torsion.is_empty() {
        return Err(Error::Unsupported("kernel is not a torus".into()));
    }
    let s = smith_normal_form(&gens);
    let r = s.rank();
    let free: Vec<usize> = (r..2 * n).collect();
    let coords = s.u.select_rows(&free);
    let mut out = Vec::with_capacity(2);
    for block in [0usize, n] {
        let cols: Vec<usize> = (block..block + n).collect();
        let map = coords.select_columns(&cols);
        let divisors: Vec<BigInt> = map.columns().map(|c| content(&c)).collect();
        out.push((divisors, rank(&map) == n));
    }
    let (target_divisors, target_injective) = out.pop().expect("two");
    let (source_divisors, source_injective) = out.pop().expect("two");
    Ok(DiagGroupKernel {
        characters,
        source_divisors,
        target_divisors,
        source_injective,
        target_injective,
    })
}

fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn stack_rows(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    Ok(a.transpose().hstack(&b.transpose())?.transpose())
}

fn diag_scalars(split: &CharLattice, scalars: [BigInt; 3]) -> Result<IntMatrix> {
    let d: Vec<BigInt> = split
        .coordinate_weights()?
        .into_iter()
        .map(|w| scalars[w].clone())
        .collect();
    Ok(IntMatrix::diagonal(&d))
}

/// The group `{(x, y)}` of p-quasi-isogenies of weight type `(a, b, c)`:
/// the kernel of the torus maps with characters `diag(p·1_a, 1_b, 1_c)` and
/// `diag(1_a, 1_b, p·1_c)`. On weight `−1` the target is the p-power of the
/// source, on weight `+1` the reverse.
pub fn qisog_kernel_char(split: &CharLattice, p: u64) -> Result<DiagGroupKernel> {
    crate::fp::field::check_prime(p)?;
    let pb = BigInt::from(p);
    let one = BigInt::one();
    let psi1 = diag_scalars(split, [pb.clone(), one.clone(), one.clone()])?;
    let psi0 = diag_scalars(split, [one.clone(), one, pb])?;
    graph_kernel(&psi1, &psi0)
}

/// `T_{G,m}` for `m` acting on the weight blocks by p-power scalars:
/// `exponents[w] = (e¹, e⁰)` means `ψ¹` and `ψ⁰` multiply characters of
/// weight `w` by `p^{e¹}` and `p^{e⁰}`. Computed coordinate by coordinate;
/// `X*(K)` may have torsion here.
pub fn tgm_kernel(
    exponents: [(u32, u32); 3],
    split: &CharLattice,
    p: u64,
) -> Result<DiagGroupKernel> {
    crate::fp::field::check_prime(p)?;
    let pb = BigInt::from(p);
    let mut free_rank = 0;
    let mut torsion = Vec::new();
    let mut source_divisors = Vec::new();
    let mut target_divisors = Vec::new();
    let mut source_injective = true;
    let mut target_injective = true;
    for w in split.coordinate_weights()? {
        let (e1, e0) = exponents[w];
        // X*(K) = Z² / (p^{e¹}, −p^{e⁰}); pr₁* = (1, 0), pr₂* = (0, 1).
        let rel = IntMatrix::from_columns(2, &[vec![pb.pow(e1), -pb.pow(e0)]])?;
        let chars = quotient_structure(2, &rel)?;
        free_rank += chars.free_rank;
        torsion.extend(chars.torsion);
        for (col, divisors, injective) in [
            (0usize, &mut source_divisors, &mut source_injective),
            (1, &mut target_divisors, &mut target_injective),
        ] {
            let mut e = vec![BigInt::zero(); 2];
            e[col] = BigInt::one();
            let image = IntMatrix::from_columns(2, &[e])?;
            let coker = quotient_structure(2, &image.hstack(&rel)?)?;
            if !coker.is_finite() {
                return Err(Error::InvariantViolation(
                    "projection cokernel is infinite".into(),
                ));
            }
            divisors.push(coker.torsion_order());
            let ker = integer_kernel(&image.hstack(&rel)?);
            *injective &= ker.columns().all(|c| c[0].is_zero());
        }
    }
    torsion.sort();
    let characters = quotient_structure(
        free_rank + torsion.len(),
        &IntMatrix::diagonal(
            &std::iter::repeat_n(BigInt::zero(), free_rank)
                .chain(torsion)
                .collect::<Vec<_>>(),
        ),
    )?;
    let out = DiagGroupKernel {
        characters,
        source_divisors,
        target_divisors,
        source_injective,
        target_injective,
    };
    if !out.is_p_primary(p) {
        return Err(Error::InvariantViolation("non-p-primary torsion".into()));
    }
    Ok(out)
}

/// `M` together with the two comparison maps into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelM {
    pub m: AbelianQuotient,
    /// `[M : image of V⁰/W]`.
    pub inj1_index: BigInt,
    pub inj1_injective: bool,
    /// Whether `V⁰/λ(p)⁻¹W̃ → M` is an isomorphism.
    pub iso2: bool,
    /// `W̃ = λ(p)V⁰ ∩ W[1/p]`, scaled by `p` to be integral.
    pub w_tilde_times_p: IntMatrix,
    /// `λ(p)⁻¹W̃`.
    pub lambda_inv_w_tilde: IntMatrix,
}

/// Whether the projection of `span(W)` to the last coordinate is onto `Z`.
pub fn projects_onto_last(w: &IntMatrix) -> bool {
    let last = w.rows() - 1;
    content(w.row(last)).is_one()
}

/// The cokernel `M` of
/// `V⁰ → V⁰/W ⊕ V⁰/λ(p)⁻¹W̃, z ↦ ((z₋₁, z₀, p·z₁) + W, (p·z₋₁, z₀, z₁) + λ(p)⁻¹W̃)`
/// for `V⁰ = Z^{1+b+1}` and `λ(p) = diag(p⁻¹, 1, p)`.
pub fn cokernel_m(split: &CharLattice, w_gens: &IntMatrix, p: u64) -> Result<CokernelM> {
    crate::fp::field::check_prime(p)?;
    let [a, b, c] = split.require_weights()?;
    if a != 1 || c != 1 {
        return Err(Error::pre("weight decomposition must be (1, b, 1)"));
    }
    let n = a + b + c;
    if w_gens.rows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: w_gens.rows(),
        });
    }
    let sat = saturate(n, w_gens)?;
    if !sat.is_direct_summand || rank(w_gens) == 0 {
        return Err(Error::pre("W must be a nonzero direct summand"));
    }
    let w = sat.basis;
    if !projects_onto_last(&w) {
        return Err(Error::pre(
            "W does not project onto the weight-1 coordinate",
        ));
    }
    let pb = BigInt::from(p);
    let one = BigInt::one();
    let coord = |scalars: [BigInt; 3]| diag_scalars(split, scalars);

    // λ(p)⁻¹W̃ = V⁰ ∩ λ(p)⁻¹W[1/p] = Sat(diag(p², p, 1)·W).
    let lam_inv_scaled = coord([&pb * &pb, pb.clone(), one.clone()])?;
    let l2 = saturate(n, &(&lam_inv_scaled * &w))?.basis;
    // p·W̃ = p·λ(p)·l2 = diag(1, p, p²)·l2.
    let w_tilde_times_p =
        crate::linalg::column_hnf_basis(&(&coord([one.clone(), pb.clone(), &pb * &pb])? * &l2));

    let a_map = coord([one.clone(), one.clone(), pb.clone()])?;
    let b_map = coord([pb.clone(), one.clone(), one])?;
    let zero_w = IntMatrix::zeros(n, w.cols());
    let zero_l = IntMatrix::zeros(n, l2.cols());
    let relations = stack_rows(&a_map, &b_map)?
        .hstack(&stack_rows(&w, &zero_w)?)?
        .hstack(&stack_rows(&zero_l, &l2)?)?;
    let m = quotient_structure(2 * n, &relations)?;

    let id = IntMatrix::identity(n);
    let zn = IntMatrix::zeros(n, n);
    let first = stack_rows(&id, &zn)?;
    let second = stack_rows(&zn, &id)?;

    let inj1_coker = quotient_structure(2 * n, &relations.hstack(&first)?)?;
    let inj1_index = inj1_coker
        .order()
        .ok_or_else(|| Error::InvariantViolation("V⁰/W has infinite index in M".into()))?;
    let inj1_injective = same_span(&pullback(&relations, n, 0)?, &w)?;

    let iso2_coker = quotient_structure(2 * n, &relations.hstack(&second)?)?;
    let iso2 = iso2_coker.is_trivial() && same_span(&pullback(&relations, n, n)?, &l2)?;

    Ok(CokernelM {
        m,
        inj1_index,
        inj1_injective,
        iso2,
        w_tilde_times_p,
        lambda_inv_w_tilde: l2,
    })
}

/// `{x ∈ Z^n : x placed at rows offset.. lies in span(relations)}`.
fn pullback(relations: &IntMatrix, n: usize, offset: usize) -> Result<IntMatrix> {
    let ambient = relations.rows();
    let mut embed = IntMatrix::zeros(ambient, n);
    for i in 0..n {
        embed[(offset + i, i)] = BigInt::one();
    }
    let rel_basis = crate::linalg::column_hnf_basis(relations);
    let meet = lattice_intersection(&embed, &rel_basis)?;
    Ok(meet.select_rows(&(offset..offset + n).collect::<Vec<_>>()))
}

fn same_span(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    if a.cols() != b.cols() {
        return Ok(false);
    }
    Ok(relative_quotient(a, b)
        .map(|q| q.is_trivial())
        .unwrap_or(false)
        && relative_quotient(b, a)
            .map(|q| q.is_trivial())
            .unwrap_or(false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn qisog_examples() {
        let k = qisog_kernel_char(&CharLattice::split(1, 0, 0), 2).unwrap();
        assert_eq!(k.source_divisors, big(&[1]));
        assert_eq!(k.target_divisors, big(&[2]));
        let k = qisog_kernel_char(&CharLattice::split(0, 1, 0), 2).unwrap();
        assert_eq!(
            (k.source_divisors, k.target_divisors),
            (big(&[1]), big(&[1]))
        );
        let k = qisog_kernel_char(&CharLattice::split(1, 2, 1), 3).unwrap();
        assert_eq!(k.source_divisors, big(&[1, 1, 1, 3]));
        assert_eq!(k.target_divisors, big(&[3, 1, 1, 1]));
        assert!(k.source_injective && k.target_injective);
        assert_eq!(k.characters.free_rank, 4);
    }

    #[test]
    fn tgm_patterns() {
        let s = CharLattice::split(2, 1, 3);
        let id = tgm_kernel([(0, 0); 3], &s, 5).unwrap();
        assert!(id
            .source_divisors
            .iter()
            .chain(&id.target_divisors)
            .all(One::is_one));
        let lam = tgm_kernel([(1, 0), (0, 0), (0, 1)], &s, 5).unwrap();
        assert_eq!(lam, qisog_kernel_char(&s, 5).unwrap());
        let scalar = tgm_kernel([(1, 1); 3], &s, 5).unwrap();
        assert!(scalar.source_divisors.iter().all(|d| *d == BigInt::from(5)));
        assert!(scalar.source_injective && scalar.target_injective);
        assert_eq!(scalar.characters.torsion.len(), 6);
        assert!(qisog_kernel_char(&CharLattice::new(3), 2).is_err());
    }

    #[test]
    fn serre_tate_ranks() {
        assert_eq!(serre_tate_torus(1, 1).rank(), 1);
        assert_eq!(serre_tate_torus(2, 3).rank(), 6);
        assert_eq!(serre_tate_torus(0, 4).rank(), 0);
    }

    #[test]
    fn cokernel_examples() {
        let w = IntMatrix::from_rows(&[vec![0], vec![0], vec![1]]);
        let out = cokernel_m(&CharLattice::split(1, 1, 1), &w, 2).unwrap();
        assert_eq!(out.inj1_index, BigInt::from(2));
        assert!(out.inj1_injective && out.iso2);
        let w = IntMatrix::from_rows(&[vec![1], vec![1], vec![0], vec![1]]);
        let out = cokernel_m(&CharLattice::split(1, 2, 1), &w, 3).unwrap();
        assert_eq!(out.inj1_index, BigInt::from(3));
        assert!(out.inj1_injective && out.iso2);
        let bad = IntMatrix::from_rows(&[vec![1], vec![0], vec![0], vec![0]]);
        assert!(cokernel_m(&CharLattice::split(1, 2, 1), &bad, 3).is_err());
    }
}
