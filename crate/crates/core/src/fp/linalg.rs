//! Dense linear algebra over `F_p`. Matrices are row-major `Vec<Vec<u64>>`;
//! subspaces are lists of basis vectors.

use super::field::{add, inv, mul, neg, sub};

pub type FpVec = Vec<u64>;
pub type FpMat = Vec<Vec<u64>>;

pub fn identity(n: usize) -> FpMat {
    (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect()
}

pub fn zero_vec(n: usize) -> FpVec {
    vec![0; n]
}

pub fn unit_vec(n: usize, i: usize) -> FpVec {
    let mut v = zero_vec(n);
    v[i] = 1;
    v
}

pub fn is_zero(v: &[u64]) -> bool {
    v.iter().all(|&x| x == 0)
}

pub fn vadd(a: &[u64], b: &[u64], p: u64) -> FpVec {
    a.iter().zip(b).map(|(&x, &y)| add(x, y, p)).collect()
}

pub fn vsub(a: &[u64], b: &[u64], p: u64) -> FpVec {
    a.iter().zip(b).map(|(&x, &y)| sub(x, y, p)).collect()
}

pub fn vscale(c: u64, a: &[u64], p: u64) -> FpVec {
    a.iter().map(|&x| mul(c, x, p)).collect()
}

/// `a + c·b`
pub fn axpy(a: &[u64], c: u64, b: &[u64], p: u64) -> FpVec {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| add(x, mul(c, y, p), p))
        .collect()
}

pub fn vdot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| add(acc, mul(x, y, p), p))
}

pub fn transpose(m: &FpMat) -> FpMat {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn mat_vec(m: &FpMat, v: &[u64], p: u64) -> FpVec {
    m.iter().map(|row| vdot(row, v, p)).collect()
}

pub fn mat_mul(a: &FpMat, b: &FpMat, p: u64) -> FpMat {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| vdot(row, col, p)).collect())
        .collect()
}

/// The matrix whose columns are `vectors`, with `n` rows.
pub fn from_columns(vectors: &[FpVec], n: usize) -> FpMat {
    (0..n)
        .map(|i| vectors.iter().map(|v| v[i]).collect())
        .collect()
}

pub fn columns(m: &FpMat) -> Vec<FpVec> {
    transpose(m)
}

/// Reduced row echelon form and pivot columns.
pub fn rref(m: &FpMat, p: u64) -> (FpMat, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(i) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, i);
        let s = inv(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = mul(*x, s, p);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                let pivot_row = a[r].clone();
                for (x, &y) in a[i].iter_mut().zip(&pivot_row) {
                    *x = sub(*x, mul(f, y, p), p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(m: &FpMat, p: u64) -> usize {
    rref(m, p).1.len()
}

/// Rank of the span of a list of vectors.
pub fn span_rank(vectors: &[FpVec], p: u64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    rank(&vectors.to_vec(), p)
}

/// Reduced echelon basis of the span of `vectors` (canonical).
pub fn span_basis(vectors: &[FpVec], p: u64) -> Vec<FpVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, piv) = rref(&vectors.to_vec(), p);
    r.into_iter().take(piv.len()).collect()
}

pub fn in_span(vectors: &[FpVec], v: &[u64], p: u64) -> bool {
    let mut ext = vectors.to_vec();
    ext.push(v.to_vec());
    span_rank(&ext, p) == span_rank(vectors, p)
}

/// Basis of `{x : M·x = 0}` where `M` has `ncols` columns.
pub fn null_space(m: &FpMat, ncols: usize, p: u64) -> Vec<FpVec> {
    if m.is_empty() {
        return (0..ncols).map(|i| unit_vec(ncols, i)).collect();
    }
    let (r, pivots) = rref(m, p);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(ncols);
            v[f] = 1;
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = neg(r[row][f], p);
            }
            v
        })
        .collect()
}

/// A solution of `M·x = b`, if any.
pub fn solve(m: &FpMat, b: &[u64], ncols: usize, p: u64) -> Option<FpVec> {
    if m.is_empty() {
        return Some(zero_vec(ncols));
    }
    let aug: FpMat = m
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, p);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = zero_vec(ncols);
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = r[row][ncols];
    }
    Some(x)
}

/// Coordinates of `v` in the (independent) basis `basis`.
pub fn coordinates(basis: &[FpVec], v: &[u64], p: u64) -> Option<FpVec> {
    let m = from_columns(basis, v.len());
    solve(&m, v, basis.len(), p)
}

pub fn det(m: &FpMat, p: u64) -> u64 {
    let n = m.len();
    let mut a = m.clone();
    let mut d = 1;
    for c in 0..n {
        let Some(i) = (c..n).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if i != c {
            a.swap(i, c);
            d = neg(d, p);
        }
        d = mul(d, a[c][c], p);
        let s = inv(a[c][c], p);
        for i in c + 1..n {
            if a[i][c] != 0 {
                let f = mul(a[i][c], s, p);
                let pivot_row = a[c].clone();
                for (x, &y) in a[i].iter_mut().zip(&pivot_row) {
                    *x = sub(*x, mul(f, y, p), p);
                }
            }
        }
    }
    d
}

pub fn inverse(m: &FpMat, p: u64) -> Option<FpMat> {
    let n = m.len();
    let aug: FpMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(unit_vec(n, i));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, p);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Extend an independent list to a basis of `F_p^n` with unit vectors.
pub fn complete_basis(vectors: &[FpVec], n: usize, p: u64) -> Vec<FpVec> {
    let mut out = vectors.to_vec();
    for i in 0..n {
        if out.len() == n {
            break;
        }
        let e = unit_vec(n, i);
        if !in_span(&out, &e, p) {
            out.push(e);
        }
    }
    out
}

/// Unit vectors completing `vectors` to a basis (the complement part only).
pub fn complement_units(vectors: &[FpVec], n: usize, p: u64) -> Vec<FpVec> {
    complete_basis(vectors, n, p).split_off(vectors.len())
}

/// Base-`p` digits of `idx`, least significant first.
pub fn digits(mut idx: u64, n: usize, p: u64) -> FpVec {
    let mut v = Vec::with_capacity(n);
    for _ in 0..n {
        v.push(idx % p);
        idx /= p;
    }
    v
}

/// `p^n`, or `None` on overflow.
pub fn checked_pow(p: u64, n: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// All `k`-dimensional subspaces of `F_p^n`, as reduced echelon bases.
pub fn subspaces(n: usize, k: usize, p: u64) -> Vec<Vec<FpVec>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    pivot_sets(n, k, 0, &mut pivots, &mut |piv| {
        // Free positions: (row r, col c) with c > piv[r] and c not a pivot.
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                ((piv[r] + 1)..n)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let count = checked_pow(p, free.len()).expect("subspace enumeration overflow");
        for idx in 0..count {
            let vals = digits(idx, free.len(), p);
            let mut rows: Vec<FpVec> = (0..k).map(|r| unit_vec(n, piv[r])).collect();
            for (&(r, c), &v) in free.iter().zip(&vals) {
                rows[r][c] = v;
            }
            out.push(rows);
        }
    });
    out
}

fn pivot_sets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for c in start..n {
        cur.push(c);
        pivot_sets(n, k, c + 1, cur, f);
        cur.pop();
    }
}

/// Scale so that the first nonzero coordinate is 1.
pub fn normalize(v: &[u64], p: u64) -> FpVec {
    match v.iter().find(|&&x| x != 0) {
        Some(&lead) => vscale(inv(lead, p), v, p),
        None => v.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_det() {
        let p = 7;
        let m = vec![vec![1, 2, 3], vec![0, 1, 4], vec![5, 6, 0]];
        let inv_m = inverse(&m, p).unwrap();
        assert_eq!(mat_mul(&m, &inv_m, p), identity(3));
        assert_ne!(det(&m, p), 0);
        let sing = vec![vec![1, 2], vec![2, 4]];
        assert_eq!(det(&sing, p), 0);
        assert!(inverse(&sing, p).is_none());
    }

    #[test]
    fn null_space_is_annihilated() {
        let p = 5;
        let m = vec![vec![1, 2, 3, 4], vec![2, 4, 1, 3]];
        let k = null_space(&m, 4, p);
        assert_eq!(k.len(), 4 - rank(&m, p));
        for v in &k {
            assert!(is_zero(&mat_vec(&m, v, p)));
        }
    }

    #[test]
    fn subspace_counts_are_gaussian_binomials() {
        // [4 choose 2]_3 = 130, [4 choose 1]_2 = 15, [3 choose 2]_5 = 31
        assert_eq!(subspaces(4, 2, 3).len(), 130);
        assert_eq!(subspaces(4, 1, 2).len(), 15);
        assert_eq!(subspaces(3, 2, 5).len(), 31);
        assert_eq!(subspaces(3, 0, 5).len(), 1);
    }

    #[test]
    fn solve_consistency() {
        let p = 3;
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let x = solve(&m, &[2, 1], 3, p).unwrap();
        assert_eq!(mat_vec(&m, &x, p), vec![2, 1]);
        let bad = vec![vec![1, 1], vec![1, 1]];
        assert!(solve(&bad, &[0, 1], 2, p).is_none());
    }
}
