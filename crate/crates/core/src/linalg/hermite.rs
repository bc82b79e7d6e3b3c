use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{xgcd, IntMatrix};

/// Column-style Hermite normal form `M·T = H`.
///
/// The first `rank` columns of `H` are in echelon form: column `j` has its
/// topmost nonzero entry (positive) at row `pivots[j]`, pivot rows strictly
/// increase, and every entry to the left of a pivot lies in `[0, pivot)`.
/// The remaining columns of `H` are zero and the matching columns of `T`
/// form a basis of the integer kernel of `M`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: IntMatrix,
    pub t: IntMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Hermite {
    /// The nonzero columns: the canonical basis of the column lattice.
    pub fn basis(&self) -> IntMatrix {
        self.h.select_columns(&(0..self.rank).collect::<Vec<_>>())
    }

    pub fn kernel(&self) -> IntMatrix {
        self.t
            .select_columns(&(self.rank..self.t.cols()).collect::<Vec<_>>())
    }
}

pub fn hermite_normal_form(m: &IntMatrix) -> Hermite {
    // Row-style HNF of the transpose.
    let mut a = m.transpose();
    let (k, n) = (a.rows(), a.cols());
    let mut u = IntMatrix::identity(k);
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..n {
        if r == k {
            break;
        }
        for i in r + 1..k {
            if a[(i, c)].is_zero() {
                continue;
            }
            if a[(r, c)].is_zero() {
                a.swap_rows(r, i);
                u.swap_rows(r, i);
                continue;
            }
            let (p, q) = (a[(r, c)].clone(), a[(i, c)].clone());
            let (g, x, y) = xgcd(&p, &q);
            let (pg, qg) = (&p / &g, &q / &g);
            let nqg = -qg;
            a.combine_rows(r, i, [&x, &y, &nqg, &pg]);
            u.combine_rows(r, i, [&x, &y, &nqg, &pg]);
        }
        if a[(r, c)].is_zero() {
            continue;
        }
        if a[(r, c)].is_negative() {
            a.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = a[(i, c)].div_floor(&a[(r, c)]);
            if !q.is_zero() {
                let nq = -q;
                a.add_row_multiple(i, r, &nq);
                u.add_row_multiple(i, r, &nq);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Hermite {
        h: a.transpose(),
        t: u.transpose(),
        rank: r,
        pivots,
    }
}

/// Canonical basis (HNF columns) of the lattice spanned by the columns.
pub fn column_hnf_basis(m: &IntMatrix) -> IntMatrix {
    hermite_normal_form(m).basis()
}

pub fn rank(m: &IntMatrix) -> usize {
    hermite_normal_form(m).rank
}

/// Basis of `{x ∈ Z^cols : M·x = 0}`; the result is saturated.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    hermite_normal_form(m).kernel()
}

/// Integer coordinates `x` with `basis·x = v`, if `v` lies in the column
/// lattice. `basis` must have full column rank.
pub fn solve_in_span(basis: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let hnf = hermite_normal_form(basis);
    if hnf.rank != basis.cols() || v.len() != basis.rows() {
        return None;
    }
    let mut residual = v.to_vec();
    let mut y = vec![BigInt::zero(); hnf.rank];
    for (j, &row) in hnf.pivots.iter().enumerate() {
        let (q, rem) = residual[row].div_rem(&hnf.h[(row, j)]);
        if !rem.is_zero() {
            return None;
        }
        for (i, res) in residual.iter_mut().enumerate().skip(row) {
            *res -= &q * &hnf.h[(i, j)];
        }
        y[j] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    let t = hnf.t.select_columns(&(0..hnf.rank).collect::<Vec<_>>());
    Some(t.mul_vec(&y).expect("shape"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn check(m: &IntMatrix) -> Hermite {
        let h = hermite_normal_form(m);
        assert_eq!(&(m * &h.t), &h.h);
        assert!(h.t.det().unwrap().abs().is_one());
        for (j, &pr) in h.pivots.iter().enumerate() {
            assert!(h.h[(pr, j)].is_positive());
            for i in 0..pr {
                assert!(h.h[(i, j)].is_zero());
            }
            for jj in 0..j {
                let x = &h.h[(pr, jj)];
                assert!(!x.is_negative() && x < &h.h[(pr, j)]);
            }
        }
        for j in h.rank..m.cols() {
            assert!(h.h.column(j).iter().all(Zero::is_zero));
        }
        h
    }

    #[test]
    fn identity_is_canonical() {
        assert_eq!(
            check(&IntMatrix::identity(3)).basis(),
            IntMatrix::identity(3)
        );
    }

    #[test]
    fn gcd_collapses_parallel_columns() {
        let m = IntMatrix::from_rows(&[vec![2, 3], vec![0, 0]]);
        let h = check(&m);
        assert_eq!(h.basis(), IntMatrix::from_rows(&[vec![1], vec![0]]));
        assert_eq!(h.kernel().cols(), 1);
    }

    #[test]
    fn diagonal_p_is_already_canonical() {
        for p in [2, 3, 5, 7] {
            let m = IntMatrix::diagonal(&[p, p]);
            assert_eq!(check(&m).basis(), m);
        }
    }

    #[test]
    fn same_lattice_same_basis() {
        let a = IntMatrix::from_rows(&[vec![1, 0], vec![1, 2]]);
        let b = IntMatrix::from_rows(&[vec![3, 1], vec![5, 1]]);
        // both span {(x, y) : x ≡ y mod 2}
        assert_eq!(check(&a).basis(), check(&b).basis());
    }

    #[test]
    fn solve_membership() {
        let b = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3], vec![1, 1]]);
        let x = solve_in_span(&b, &[4.into(), 9.into(), 5.into()]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(3)]);
        assert!(solve_in_span(&b, &[1.into(), 0.into(), 0.into()]).is_none());
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 9]]);
        let k = integer_kernel(&m);
        assert_eq!(k.cols(), 2);
        assert!((&m * &k).is_zero());
    }
}
