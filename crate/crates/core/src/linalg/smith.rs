use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{xgcd, IntMatrix};

/// Smith normal form `U·M·V = D`.
///
/// `U` and `V` are unimodular and not unique; only `D` is canonical.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `u`, maintained alongside it.
    pub u_inv: IntMatrix,
}

impl Smith {
    /// The diagonal of `D` (length `min(rows, cols)`), nonnegative, each
    /// entry dividing the next, zeros last.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        if a[(t, t)].is_zero() {
            let mut found = None;
            'search: for j in t..c {
                for i in t..r {
                    if !a[(i, j)].is_zero() {
                        found = Some((i, j));
                        break 'search;
                    }
                }
            }
            let Some((i, j)) = found else { break };
            a.swap_rows(t, i);
            u.swap_rows(t, i);
            u_inv.swap_cols(t, i);
            a.swap_cols(t, j);
            v.swap_cols(t, j);
        }

        loop {
            for i in t + 1..r {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let (p, q) = (a[(t, t)].clone(), a[(i, t)].clone());
                let (g, x, y) = xgcd(&p, &q);
                let (pg, qg) = (&p / &g, &q / &g);
                let nqg = -&qg;
                a.combine_rows(t, i, [&x, &y, &nqg, &pg]);
                u.combine_rows(t, i, [&x, &y, &nqg, &pg]);
                let ny = -&y;
                u_inv.combine_cols(t, i, [&pg, &qg, &ny, &x]);
            }
            for j in t + 1..c {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let (p, q) = (a[(t, t)].clone(), a[(t, j)].clone());
                let (g, x, y) = xgcd(&p, &q);
                let (pg, qg) = (&p / &g, &q / &g);
                let nqg = -&qg;
                a.combine_cols(t, j, [&x, &y, &nqg, &pg]);
                v.combine_cols(t, j, [&x, &y, &nqg, &pg]);
            }
            if (t + 1..r).any(|i| !a[(i, t)].is_zero()) {
                continue;
            }
            let pivot = a[(t, t)].clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !a[(i, j)].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    a.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-one);
                }
                None => break,
            }
        }

        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    Smith { u, d: a, v, u_inv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Smith {
        let s = smith_normal_form(m);
        assert_eq!(&(&s.u * m) * &s.v, s.d, "U·M·V = D");
        assert_eq!(&s.u * &s.u_inv, IntMatrix::identity(m.rows()));
        assert!(s.u.det().unwrap().abs().is_one());
        assert!(s.v.det().unwrap().abs().is_one());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if w[1].is_zero() {
                continue;
            }
            assert!(!w[0].is_zero(), "zeros must come last");
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain");
        }
        s
    }

    #[test]
    fn identity_is_its_own_form() {
        let s = check(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let s = check(&IntMatrix::diagonal(&[2, 3]));
        assert_eq!(s.d, IntMatrix::diagonal(&[1, 6]));
    }

    #[test]
    fn zero_matrix() {
        let s = check(&IntMatrix::zeros(2, 2));
        assert!(s.d.is_zero());
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn rectangular_and_dependent() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = check(&m);
        assert_eq!(s.diagonal(), vec![2.into(), 6.into(), 12.into()]);
        check(&IntMatrix::from_rows(&[
            vec![3, 6],
            vec![4, 8],
            vec![5, 10],
        ]));
        check(&IntMatrix::from_rows(&[vec![0, 0, 7, 14]]));
    }

    #[test]
    fn determinant_preserved_up_to_sign() {
        let m = IntMatrix::from_rows(&[vec![4, 7, 2], vec![3, 5, 1], vec![8, 1, 9]]);
        let s = check(&m);
        let prod: BigInt = s.diagonal().iter().product();
        assert_eq!(prod, m.det().unwrap().abs());
    }
}
