//! Integral quadratic lattices presented by an upper-triangular half-Gram
//! matrix `H`, with `Q(x) = xᵀHx` and bilinear Gram `B = H + Hᵀ`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{
    column_hnf_basis, dot, integer_kernel, quotient_structure, rank, AbelianQuotient, IntMatrix,
};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadLattice {
    half_gram: IntMatrix,
}

impl fmt::Debug for QuadLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadLattice({:?})", self.half_gram)
    }
}

/// Fold an arbitrary square matrix `A` into the upper-triangular matrix
/// defining the same quadratic form `xᵀAx`.
pub fn fold_upper(a: &IntMatrix) -> IntMatrix {
    let n = a.rows();
    let mut h = IntMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = a[(i, i)].clone();
        for j in i + 1..n {
            h[(i, j)] = &a[(i, j)] + &a[(j, i)];
        }
    }
    h
}

impl QuadLattice {
    /// `half_gram` must be square and upper-triangular.
    pub fn new(half_gram: IntMatrix) -> Result<Self> {
        if !half_gram.is_square() {
            return Err(Error::DimensionMismatch {
                expected: half_gram.rows(),
                actual: half_gram.cols(),
            });
        }
        if !half_gram.is_upper_triangular() {
            return Err(Error::InvalidParameter(
                "half-Gram matrix must be upper-triangular".into(),
            ));
        }
        Ok(QuadLattice { half_gram })
    }

    /// The lattice with `Q(x) = xᵀAx` for any square `A`.
    pub fn from_form(a: &IntMatrix) -> Result<Self> {
        Self::new(fold_upper(a))
    }

    /// From a symmetric Gram matrix with even diagonal.
    pub fn from_gram(b: &IntMatrix) -> Result<Self> {
        if !b.is_square() || b.transpose() != *b {
            return Err(Error::InvalidParameter(
                "Gram matrix must be symmetric".into(),
            ));
        }
        let n = b.rows();
        let mut h = IntMatrix::zeros(n, n);
        let two = BigInt::from(2);
        for i in 0..n {
            if !b[(i, i)].is_even() {
                return Err(Error::InvalidParameter("Gram diagonal must be even".into()));
            }
            h[(i, i)] = &b[(i, i)] / &two;
            for j in i + 1..n {
                h[(i, j)] = b[(i, j)].clone();
            }
        }
        Ok(QuadLattice { half_gram: h })
    }

    pub fn rank(&self) -> usize {
        self.half_gram.rows()
    }

    pub fn half_gram(&self) -> &IntMatrix {
        &self.half_gram
    }

    /// The bilinear Gram matrix `B = H + Hᵀ`.
    pub fn gram(&self) -> IntMatrix {
        let n = self.rank();
        let mut b = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = &self.half_gram[(i, j)] + &self.half_gram[(j, i)];
            }
        }
        b
    }

    pub fn quad_value(&self, x: &[BigInt]) -> Result<BigInt> {
        check_dim(self.rank(), x.len())?;
        let hx = self.half_gram.mul_vec(x)?;
        Ok(dot(x, &hx))
    }

    pub fn bilinear_value(&self, x: &[BigInt], y: &[BigInt]) -> Result<BigInt> {
        check_dim(self.rank(), x.len())?;
        check_dim(self.rank(), y.len())?;
        let by = self.gram().mul_vec(y)?;
        Ok(dot(x, &by))
    }

    /// Determinant of the bilinear Gram matrix.
    pub fn det(&self) -> BigInt {
        self.gram().det().expect("square")
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// `det B` is a unit mod `p`.
    pub fn is_self_dual_at(&self, p: u64) -> bool {
        !self.det().is_multiple_of(&BigInt::from(p))
    }

    /// `(positive, negative)` inertia via exact congruence diagonalization.
    pub fn signature(&self) -> Result<(usize, usize)> {
        let (pos, neg, zero) = inertia(&self.gram());
        if zero > 0 {
            return Err(Error::Degenerate("bilinear form is singular".into()));
        }
        Ok((pos, neg))
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.signature(), Ok((_, 0)))
    }

    /// `L∨/L`, presented by the Gram matrix.
    pub fn discriminant_group(&self) -> Result<AbelianQuotient> {
        if self.det().is_zero() {
            return Err(Error::Degenerate("bilinear form is singular".into()));
        }
        quotient_structure(self.rank(), &self.gram())
    }

    /// The lattice with basis `T`'s columns, `Q'(x) = Q(Tx)`.
    pub fn transform(&self, t: &IntMatrix) -> Result<Self> {
        check_dim(self.rank(), t.rows())?;
        let g = &(&t.transpose() * &self.half_gram) * t;
        Self::from_form(&g)
    }

    pub fn rescale(&self, c: impl Into<BigInt>) -> Result<Self> {
        let c = c.into();
        if c.is_zero() {
            return Err(Error::InvalidParameter(
                "rescaling factor must be nonzero".into(),
            ));
        }
        Ok(QuadLattice {
            half_gram: self.half_gram.scale(&c),
        })
    }

    pub fn direct_sum(parts: &[QuadLattice]) -> Self {
        let h = parts.iter().fold(IntMatrix::zeros(0, 0), |acc, l| {
            acc.block_diag(&l.half_gram)
        });
        QuadLattice { half_gram: h }
    }

    pub fn orthogonal_sum(&self, other: &QuadLattice) -> Self {
        Self::direct_sum(&[self.clone(), other.clone()])
    }

    /// The hyperbolic plane: `Q(ae + bf) = ab`.
    pub fn hyperbolic() -> Self {
        QuadLattice {
            half_gram: IntMatrix::from_rows(&[vec![0, 1], vec![0, 0]]),
        }
    }

    /// `H ⊥ … ⊥ H` with `k` summands.
    pub fn hyperbolic_sum(k: usize) -> Self {
        Self::direct_sum(&vec![Self::hyperbolic(); k])
    }

    /// The E8 root lattice, positive definite, in a basis of simple roots.
    pub fn e8() -> Self {
        // Simple roots 0..7; 0-2, 2-3, 3-4, 4-5, 5-6, 6-7 form a chain and
        // root 1 attaches to root 3.
        const EDGES: [(usize, usize); 7] = [(0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)];
        let mut h = IntMatrix::identity(8);
        for (i, j) in EDGES {
            h[(i, j)] = BigInt::from(-1);
        }
        QuadLattice { half_gram: h }
    }

    /// `H³ ⊥ E8²`, rank 22, even unimodular, signature (19, 3).
    pub fn k3() -> Self {
        let mut parts = vec![Self::hyperbolic(); 3];
        parts.push(Self::e8());
        parts.push(Self::e8());
        Self::direct_sum(&parts)
    }

    /// Rank one with `Q(v) = m`.
    pub fn rank1(m: impl Into<BigInt>) -> Result<Self> {
        let m = m.into();
        if m.is_zero() {
            return Err(Error::InvalidParameter(
                "rank-one form must be nonzero".into(),
            ));
        }
        Ok(QuadLattice {
            half_gram: IntMatrix::from_big_rows(vec![vec![m]], 1)?,
        })
    }

    /// The induced form on a sublattice with basis `s`.
    pub fn restrict(&self, s: &IntMatrix) -> Result<Self> {
        self.transform(s)
    }

    /// `{x : [x, s] = 0 for all s ∈ span(s)}`, canonical and saturated.
    pub fn orthogonal_complement(&self, s: &IntMatrix) -> Result<Sublattice> {
        check_dim(self.rank(), s.rows())?;
        let pairing = &s.transpose() * &self.gram();
        let basis = column_hnf_basis(&integer_kernel(&pairing));
        Ok(Sublattice {
            ambient: self.clone(),
            basis,
        })
    }

    pub fn zero_vector(&self) -> Vec<BigInt> {
        vec![BigInt::zero(); self.rank()]
    }

    pub fn unit_vector(&self, i: usize) -> Vec<BigInt> {
        let mut v = self.zero_vector();
        v[i] = BigInt::one();
        v
    }
}

/// A sublattice given by a basis in the coordinates of its ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    pub ambient: QuadLattice,
    pub basis: IntMatrix,
}

impl Sublattice {
    pub fn new(ambient: QuadLattice, basis: IntMatrix) -> Result<Self> {
        check_dim(ambient.rank(), basis.rows())?;
        if rank(&basis) != basis.cols() {
            return Err(Error::Degenerate(
                "sublattice basis is not independent".into(),
            ));
        }
        Ok(Sublattice { ambient, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// The sublattice as a quadratic lattice in its own basis.
    pub fn lattice(&self) -> QuadLattice {
        self.ambient.restrict(&self.basis).expect("shape checked")
    }

    pub fn is_direct_summand(&self) -> bool {
        crate::linalg::saturate(self.ambient.rank(), &self.basis)
            .map(|s| s.is_direct_summand)
            .unwrap_or(false)
    }

    pub fn orthogonal_complement(&self) -> Sublattice {
        self.ambient
            .orthogonal_complement(&self.basis)
            .expect("shape checked")
    }
}

/// Counts of positive, negative and zero entries of a congruence
/// diagonalization of the symmetric matrix `b`.
pub fn inertia(b: &IntMatrix) -> (usize, usize, usize) {
    let mut a = b.clone();
    let n = a.rows();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                a.swap_rows(k, j);
                a.swap_cols(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // x_k ← x_k + x_j gives a new diagonal entry 2·a[k][j].
                let one = BigInt::one();
                a.add_row_multiple(k, j, &one);
                a.add_col_multiple(k, j, &one);
            } else {
                zero += 1;
                continue;
            }
        }
        let pivot = a[(k, k)].clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let c = a[(i, k)].clone();
            if c.is_zero() {
                continue;
            }
            // row_i ← pivot·row_i − c·row_k, and the same on columns.
            for j in 0..n {
                let v = &pivot * &a[(i, j)] - &c * &a[(k, j)];
                a[(i, j)] = v;
            }
            for j in 0..n {
                let v = &pivot * &a[(j, i)] - &c * &a[(j, k)];
                a[(j, i)] = v;
            }
        }
        // Dividing the trailing block by its content keeps the signs.
        let mut g = BigInt::zero();
        for i in k + 1..n {
            for j in k + 1..n {
                g = g.gcd(&a[(i, j)]);
            }
        }
        if !g.is_zero() && !g.is_one() {
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[(i, j)] / &g;
                    a[(i, j)] = v;
                }
            }
        }
    }
    (pos, neg, zero)
}

/// A named standard lattice, parsed from expressions like `h^3+e8^2`,
/// `H⊥H`, `k3`, `rank1(5)`, `a1` or `E8(-1)` (form negated).
pub fn standard_lattice(expr: &str) -> Result<QuadLattice> {
    let expr = expr.trim();
    if expr.is_empty() {
        return Err(Error::Parse("empty lattice expression".into()));
    }
    let mut parts = Vec::new();
    for term in expr.split(['+', '⊥']) {
        let term = term.trim();
        let (name, power) = match term.split_once('^') {
            Some((n, k)) => {
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent in `{term}`")))?;
                (n.trim(), k)
            }
            None => (term, 1),
        };
        if power == 0 || power > 64 {
            return Err(Error::Parse(format!("exponent out of range in `{term}`")));
        }
        let lower = name.to_ascii_lowercase();
        let (lower, negate) = match lower.strip_suffix("(-1)") {
            Some(stem) if !lower.starts_with("rank1(") => (stem.trim_end().to_string(), true),
            _ => (lower, false),
        };
        let base = match lower.as_str() {
            "h" | "hyperbolic" => QuadLattice::hyperbolic(),
            "e8" => QuadLattice::e8(),
            "k3" => QuadLattice::k3(),
            "a1" => QuadLattice::rank1(1)?,
            other => {
                let inner = other
                    .strip_prefix("rank1(")
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| Error::Parse(format!("unknown lattice `{name}`")))?;
                let m: i64 = inner
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rank1 parameter `{inner}`")))?;
                QuadLattice::rank1(m)?
            }
        };
        let base = if negate { base.rescale(-1)? } else { base };
        for _ in 0..power {
            parts.push(base.clone());
        }
    }
    Ok(QuadLattice::direct_sum(&parts))
}
