//! Exact integer linear algebra over `Z`.

mod hermite;
mod matrix;
mod smith;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};

pub use hermite::{
    column_hnf_basis, hermite_normal_form, integer_kernel, rank, solve_in_span, Hermite,
};
pub use matrix::{dot, to_big, IntMatrix};
pub use smith::{smith_normal_form, Smith};

/// A finitely generated abelian group `Z^free_rank ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianQuotient {
    pub free_rank: usize,
    /// Elementary divisors, each `> 1`, each dividing the next.
    pub torsion: Vec<BigInt>,
}

impl AbelianQuotient {
    pub fn trivial() -> Self {
        AbelianQuotient {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(n: impl Into<BigInt>) -> Self {
        let n = n.into().abs();
        if n.is_zero() {
            return AbelianQuotient {
                free_rank: 1,
                torsion: Vec::new(),
            };
        }
        let torsion = if n.is_one() { Vec::new() } else { vec![n] };
        AbelianQuotient {
            free_rank: 0,
            torsion,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    /// Group order, `None` if infinite.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }
}

/// Structure of `Z^ambient_rank / span(gens)`.
pub fn quotient_structure(ambient_rank: usize, gens: &IntMatrix) -> Result<AbelianQuotient> {
    check_dim(ambient_rank, gens.rows())?;
    let diag = smith_normal_form(gens).diagonal();
    let nonzero: Vec<_> = diag.into_iter().filter(|d| !d.is_zero()).collect();
    Ok(AbelianQuotient {
        free_rank: ambient_rank - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| !d.is_one()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    /// Canonical basis of `(span ⊗ Q) ∩ Z^n`.
    pub basis: IntMatrix,
    pub is_direct_summand: bool,
}

pub fn saturate(ambient_rank: usize, gens: &IntMatrix) -> Result<Saturation> {
    check_dim(ambient_rank, gens.rows())?;
    let s = smith_normal_form(gens);
    let diag = s.diagonal();
    let r = s.rank();
    let basis = column_hnf_basis(&s.u_inv.select_columns(&(0..r).collect::<Vec<_>>()));
    Ok(Saturation {
        basis,
        is_direct_summand: diag[..r].iter().all(One::is_one),
    })
}

/// Canonical basis of `span(A) ∩ span(B)`. Both inputs must have full
/// column rank; the result may have zero columns.
pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    check_dim(a.rows(), b.rows())?;
    for (name, m) in [("A", a), ("B", b)] {
        if rank(m) != m.cols() {
            return Err(Error::Degenerate(format!(
                "basis {name} is not linearly independent"
            )));
        }
    }
    let stacked = a.hstack(&b.scale(&-BigInt::one()))?;
    let kernel = integer_kernel(&stacked);
    let coeffs = kernel.select_rows(&(0..a.cols()).collect::<Vec<_>>());
    Ok(column_hnf_basis(&(a * &coeffs)))
}

/// Structure of `span(sup) / span(sub)`; errors when `sub ⊄ sup`.
pub fn relative_quotient(sup: &IntMatrix, sub: &IntMatrix) -> Result<AbelianQuotient> {
    check_dim(sup.rows(), sub.rows())?;
    let sup = column_hnf_basis(sup);
    let mut coords = Vec::with_capacity(sub.cols());
    for col in sub.columns() {
        coords.push(
            solve_in_span(&sup, &col)
                .ok_or_else(|| Error::pre("sublattice is not contained in the lattice"))?,
        );
    }
    let coords = IntMatrix::from_columns(sup.cols(), &coords)?;
    quotient_structure(sup.cols(), &coords)
}

/// Whether every column of `sub` lies in the column lattice of `sup`.
pub fn contains(sup: &IntMatrix, sub: &IntMatrix) -> bool {
    let sup = column_hnf_basis(sup);
    sub.rows() == sup.rows() && sub.columns().all(|c| solve_in_span(&sup, &c).is_some())
}

/// Lattice equality via canonical bases.
pub fn same_lattice(a: &IntMatrix, b: &IntMatrix) -> bool {
    a.rows() == b.rows() && column_hnf_basis(a) == column_hnf_basis(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coset_count(ambient: usize, gens: &IntMatrix, bound: i64) -> usize {
        // Enumerate the box [0, bound)^n and collect coset representatives.
        let hnf = column_hnf_basis(gens);
        let mut reps: Vec<Vec<BigInt>> = Vec::new();
        let total = (bound as usize).pow(ambient as u32);
        for idx in 0..total {
            let mut v = Vec::with_capacity(ambient);
            let mut k = idx;
            for _ in 0..ambient {
                v.push(BigInt::from((k % bound as usize) as i64));
                k /= bound as usize;
            }
            let new = reps.iter().all(|r| {
                let diff: Vec<BigInt> = v.iter().zip(r).map(|(a, b)| a - b).collect();
                solve_in_span(&hnf, &diff).is_none()
            });
            if new {
                reps.push(v);
            }
        }
        reps.len()
    }

    #[test]
    fn quotient_examples() {
        assert!(quotient_structure(3, &IntMatrix::identity(3))
            .unwrap()
            .is_trivial());
        for p in [2, 3, 5] {
            let q = quotient_structure(1, &IntMatrix::from_rows(&[vec![p]])).unwrap();
            assert_eq!(q.torsion, vec![BigInt::from(p)]);
            assert_eq!(
                coset_count(1, &IntMatrix::from_rows(&[vec![p]]), p),
                p as usize
            );
        }
        let g = IntMatrix::diagonal(&[2, 6]);
        let q = quotient_structure(2, &g).unwrap();
        assert_eq!(q.torsion, vec![BigInt::from(2), BigInt::from(6)]);
        assert_eq!(coset_count(2, &g, 6), 12);
        assert_eq!(q.order(), Some(BigInt::from(12)));
    }

    #[test]
    fn quotient_with_free_part() {
        let q = quotient_structure(3, &IntMatrix::from_rows(&[vec![4], vec![0], vec![0]])).unwrap();
        assert_eq!(q.free_rank, 2);
        assert_eq!(q.torsion, vec![BigInt::from(4)]);
        assert_eq!(q.order(), None);
    }

    #[test]
    fn saturation_examples() {
        let s = saturate(2, &IntMatrix::identity(2)).unwrap();
        assert!(s.is_direct_summand);
        for p in [2, 3, 7] {
            let s = saturate(2, &IntMatrix::from_rows(&[vec![p], vec![0]])).unwrap();
            assert!(!s.is_direct_summand);
            assert_eq!(s.basis, IntMatrix::from_rows(&[vec![1], vec![0]]));
            let s = saturate(2, &IntMatrix::from_rows(&[vec![1], vec![p]])).unwrap();
            assert!(s.is_direct_summand);
        }
    }

    #[test]
    fn intersection_examples() {
        let i = IntMatrix::identity(2);
        assert_eq!(lattice_intersection(&i, &i).unwrap(), i);
        let a = IntMatrix::diagonal(&[2, 1]);
        let b = IntMatrix::diagonal(&[1, 2]);
        let c = lattice_intersection(&a, &b).unwrap();
        assert_eq!(c, IntMatrix::diagonal(&[2, 2]));
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let v = to_big(&[x, y]);
                let in_both = solve_in_span(&a, &v).is_some() && solve_in_span(&b, &v).is_some();
                assert_eq!(in_both, solve_in_span(&c, &v).is_some());
            }
        }
        let l1 = IntMatrix::from_rows(&[vec![1], vec![1]]);
        let l2 = IntMatrix::from_rows(&[vec![1], vec![-1]]);
        assert_eq!(lattice_intersection(&l1, &l2).unwrap().cols(), 0);
    }

    #[test]
    fn intersection_rejects_dependent_basis() {
        let bad = IntMatrix::from_rows(&[vec![1, 2], vec![1, 2]]);
        assert!(matches!(
            lattice_intersection(&bad, &IntMatrix::identity(2)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn relative_index() {
        let q = relative_quotient(&IntMatrix::identity(2), &IntMatrix::diagonal(&[3, 1])).unwrap();
        assert_eq!(q.order(), Some(BigInt::from(3)));
        assert!(relative_quotient(&IntMatrix::diagonal(&[3, 1]), &IntMatrix::identity(2)).is_err());
    }
}
