use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::field::{add, check_prime, inv, is_square, mul, neg, sqrt, sub};
use super::linalg::{
    checked_pow, complement_units, coordinates, digits, from_columns, is_zero, normalize,
    null_space, span_rank, unit_vec, vadd, vscale, zero_vec, FpMat, FpVec,
};
use crate::error::{check_dim, Error, Result};
use crate::lattice::QuadLattice;

/// Default cap on projective points visited by line enumeration.
pub const DEFAULT_MAX_POINTS: u64 = 10_000_000;

/// Below this many vectors, isotropic search is exhaustive.
const EXHAUSTIVE_SEARCH_LIMIT: u64 = 1_000_000;

/// A quadratic space over `F_p`, `Q(x) = xᵀHx` with `H` upper-triangular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpQuadSpace {
    p: u64,
    half_gram: FpMat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Radicals {
    /// Kernel of the bilinear form.
    pub bilinear: Vec<FpVec>,
    /// Vectors of the bilinear radical on which `Q` vanishes.
    pub isotropic: Vec<FpVec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittDecomposition {
    /// Hyperbolic pairs `(u, v)`: `Q(u) = Q(v) = 0`, `[u, v] = 1`.
    pub pairs: Vec<(FpVec, FpVec)>,
    pub anisotropic: Vec<FpVec>,
    /// The bilinear radical.
    pub radical: Vec<FpVec>,
}

impl WittDecomposition {
    pub fn witt_index(&self) -> usize {
        self.pairs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittType {
    /// Even dimension `2m`, Witt index `m`.
    Split,
    /// Even dimension `2m`, Witt index `m − 1`.
    NonSplit,
    Odd,
}

/// A point of `P(V)`, normalized so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjLine {
    generator: FpVec,
}

impl ProjLine {
    pub fn new(v: &[u64], p: u64) -> Result<Self> {
        let v: FpVec = v.iter().map(|&x| x % p).collect();
        if is_zero(&v) {
            return Err(Error::InvalidParameter(
                "the zero vector spans no line".into(),
            ));
        }
        Ok(ProjLine {
            generator: normalize(&v, p),
        })
    }

    pub fn generator(&self) -> &[u64] {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.len()
    }
}

impl FpQuadSpace {
    /// Entries are reduced mod `p`; a non-upper-triangular matrix is folded
    /// into the upper-triangular matrix defining the same form.
    pub fn new(p: u64, half_gram: FpMat) -> Result<Self> {
        check_prime(p)?;
        let n = half_gram.len();
        for row in &half_gram {
            check_dim(n, row.len())?;
        }
        let mut h = vec![zero_vec(n); n];
        for i in 0..n {
            h[i][i] = half_gram[i][i] % p;
            for j in i + 1..n {
                h[i][j] = add(half_gram[i][j] % p, half_gram[j][i] % p, p);
            }
        }
        Ok(FpQuadSpace { p, half_gram: h })
    }

    pub fn from_i64(p: u64, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows
            .iter()
            .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
            .collect();
        Self::new(p, m)
    }

    /// Reduction of an integral lattice mod `p`.
    pub fn reduction(lattice: &QuadLattice, p: u64) -> Result<Self> {
        check_prime(p)?;
        let pb = BigInt::from(p);
        let h = lattice.half_gram();
        let n = h.rows();
        let m = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let r = ((&h[(i, j)] % &pb) + &pb) % &pb;
                        r.to_u64().expect("reduced entry")
                    })
                    .collect()
            })
            .collect();
        Self::new(p, m)
    }

    /// `diag(a_1, …, a_n)`: `Q(x) = Σ a_i x_i²`.
    pub fn diagonal(p: u64, entries: &[u64]) -> Result<Self> {
        let n = entries.len();
        let mut m = vec![zero_vec(n); n];
        for (i, &a) in entries.iter().enumerate() {
            m[i][i] = a;
        }
        Self::new(p, m)
    }

    /// `H ⊥ … ⊥ H` over `F_p`.
    pub fn hyperbolic(p: u64, planes: usize) -> Result<Self> {
        let n = 2 * planes;
        let mut m = vec![zero_vec(n); n];
        for k in 0..planes {
            m[2 * k][2 * k + 1] = 1;
        }
        Self::new(p, m)
    }

    pub fn orthogonal_sum(&self, other: &FpQuadSpace) -> Result<Self> {
        if self.p != other.p {
            return Err(Error::InvalidParameter("characteristics differ".into()));
        }
        let (a, b) = (self.dim(), other.dim());
        let mut m = vec![zero_vec(a + b); a + b];
        for i in 0..a {
            m[i][..a].copy_from_slice(&self.half_gram[i]);
        }
        for i in 0..b {
            m[a + i][a..].copy_from_slice(&other.half_gram[i]);
        }
        Self::new(self.p, m)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.half_gram.len()
    }

    pub fn half_gram(&self) -> &FpMat {
        &self.half_gram
    }

    pub fn gram(&self) -> FpMat {
        let n = self.dim();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| add(self.half_gram[i][j], self.half_gram[j][i], self.p))
                    .collect()
            })
            .collect()
    }

    pub fn q(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (i, row) in self.half_gram.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            let mut s = 0;
            for j in i..row.len() {
                s = add(s, mul(row[j], x[j], p), p);
            }
            acc = add(acc, mul(x[i], s, p), p);
        }
        acc
    }

    pub fn b(&self, x: &[u64], y: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (i, row) in self.half_gram.iter().enumerate() {
            for j in i..row.len() {
                let h = row[j];
                if h == 0 {
                    continue;
                }
                let t = add(mul(x[i], y[j], p), mul(x[j], y[i], p), p);
                acc = add(acc, mul(h, t, p), p);
            }
        }
        acc
    }

    /// The induced space on `span(basis)`, in the coordinates of `basis`.
    pub fn restrict(&self, basis: &[FpVec]) -> FpQuadSpace {
        let k = basis.len();
        let mut m = vec![zero_vec(k); k];
        for i in 0..k {
            m[i][i] = self.q(&basis[i]);
            for j in i + 1..k {
                m[i][j] = self.b(&basis[i], &basis[j]);
            }
        }
        FpQuadSpace {
            p: self.p,
            half_gram: m,
        }
    }

    /// Basis of `{x : [x, v] = 0 for all v ∈ vectors}`.
    pub fn orthogonal(&self, vectors: &[FpVec]) -> Vec<FpVec> {
        let g = self.gram();
        let rows: FpMat = vectors
            .iter()
            .map(|v| super::linalg::mat_vec(&g, v, self.p))
            .collect();
        null_space(&rows, self.dim(), self.p)
    }

    /// `{x ∈ span(within) : [x, v] = 0 for all v ∈ vectors}`.
    pub fn orthogonal_within(&self, within: &[FpVec], vectors: &[FpVec]) -> Vec<FpVec> {
        let rows: FpMat = vectors
            .iter()
            .map(|v| within.iter().map(|w| self.b(v, w)).collect())
            .collect();
        null_space(&rows, within.len(), self.p)
            .iter()
            .map(|c| self.combine(within, c))
            .collect()
    }

    /// `Σ c_i · basis_i`
    pub fn combine(&self, basis: &[FpVec], coeffs: &[u64]) -> FpVec {
        let mut v = zero_vec(self.dim());
        for (b, &c) in basis.iter().zip(coeffs) {
            if c != 0 {
                v = super::linalg::axpy(&v, c, b, self.p);
            }
        }
        v
    }

    pub fn radicals(&self) -> Radicals {
        let bilinear = null_space(&self.gram(), self.dim(), self.p);
        let isotropic = if self.p == 2 {
            // Over F_2, Q restricted to the bilinear radical is linear.
            let values: FpMat = vec![bilinear.iter().map(|r| self.q(r)).collect()];
            null_space(&values, bilinear.len(), 2)
                .iter()
                .map(|c| self.combine(&bilinear, c))
                .collect()
        } else {
            bilinear.clone()
        };
        Radicals {
            bilinear,
            isotropic,
        }
    }

    /// The quadric `Q = 0` is smooth: no nonzero radical vector is isotropic.
    pub fn is_nondegenerate(&self) -> bool {
        self.radicals().isotropic.is_empty()
    }

    /// Whether `v` is a smooth point of the quadric: `[v, ·] ≢ 0`.
    pub fn is_smooth_point(&self, v: &[u64]) -> bool {
        let g = self.gram();
        !is_zero(&super::linalg::mat_vec(&g, v, self.p))
    }

    /// A nonzero isotropic vector, if any.
    ///
    /// Small spaces are searched exhaustively in the order where the first
    /// coordinate varies fastest; larger ones are solved constructively.
    pub fn find_isotropic_vector(&self) -> Option<FpVec> {
        let n = self.dim();
        if n == 0 {
            return None;
        }
        match checked_pow(self.p, n) {
            Some(total) if total <= EXHAUSTIVE_SEARCH_LIMIT => (1..total)
                .map(|idx| digits(idx, n, self.p))
                .find(|v| self.q(v) == 0),
            _ => {
                let v = self.construct_isotropic()?;
                debug_assert!(self.q(&v) == 0 && !is_zero(&v));
                Some(v)
            }
        }
    }

    fn construct_isotropic(&self) -> Option<FpVec> {
        let rad = self.radicals();
        if let Some(v) = rad.isotropic.first() {
            return Some(v.clone());
        }
        let p = self.p;
        let n = self.dim();
        let core = complement_units(&rad.bilinear, n, p);
        if p == 2 {
            // Two orthogonal anisotropic planes, or one plus an anisotropic
            // radical vector, always contain an isotropic vector a + c.
            let (a, b) = self.symplectic_pair(&core)?;
            for v in [&a, &b, &vadd(&a, &b, p)] {
                if self.q(v) == 0 {
                    return Some(v.clone());
                }
            }
            if let Some(r) = rad.bilinear.first() {
                return Some(vadd(&a, r, p));
            }
            let rest = self.orthogonal_within(&core, &[a.clone(), b]);
            let (c, d) = self.symplectic_pair(&rest)?;
            for v in [&c, &d, &vadd(&c, &d, p)] {
                if self.q(v) == 0 {
                    return Some(v.clone());
                }
            }
            return Some(vadd(&a, &c, p));
        }
        let diag = self.orthogonal_basis(&core);
        let vals: Vec<u64> = diag.iter().map(|x| self.q(x)).collect();
        if let Some(i) = vals.iter().position(|&a| a == 0) {
            return Some(diag[i].clone());
        }
        if diag.len() < 2 {
            return None;
        }
        let (a1, a2) = (vals[0], vals[1]);
        let ratio = mul(neg(a2, p), inv(a1, p), p);
        if let Some(s) = sqrt(ratio, p) {
            return Some(vadd(&vscale(s, &diag[0], p), &diag[1], p));
        }
        if diag.len() < 3 {
            return None;
        }
        // a1 x² + a2 y² = −a3 always has a solution.
        let target = neg(vals[2], p);
        let a2_inv = inv(a2, p);
        for x in 0..p {
            let rhs = mul(sub(target, mul(a1, mul(x, x, p), p), p), a2_inv, p);
            if let Some(y) = sqrt(rhs, p) {
                let v = vadd(
                    &vadd(&vscale(x, &diag[0], p), &vscale(y, &diag[1], p), p),
                    &diag[2],
                    p,
                );
                return Some(v);
            }
        }
        None
    }

    /// `(a, b)` in `span(within)` with `[a, b] = 1`.
    fn symplectic_pair(&self, within: &[FpVec]) -> Option<(FpVec, FpVec)> {
        for (i, a) in within.iter().enumerate() {
            for b in &within[i + 1..] {
                let t = self.b(a, b);
                if t != 0 {
                    return Some((a.clone(), vscale(inv(t, self.p), b, self.p)));
                }
            }
        }
        None
    }

    /// An orthogonal basis of `span(within)` (p odd), anisotropic vectors
    /// first.
    pub fn orthogonal_basis(&self, within: &[FpVec]) -> Vec<FpVec> {
        let p = self.p;
        let mut rest: Vec<FpVec> = within.to_vec();
        let mut out = Vec::new();
        while !rest.is_empty() {
            let pick = rest.iter().position(|s| self.q(s) != 0).or_else(|| {
                (0..rest.len()).find_map(|i| {
                    (i + 1..rest.len())
                        .find(|&j| self.b(&rest[i], &rest[j]) != 0)
                        .map(|j| {
                            let s = vadd(&rest[i], &rest[j], p);
                            rest[i] = s;
                            i
                        })
                })
            });
            let Some(i) = pick else {
                out.append(&mut rest);
                break;
            };
            let x = rest.remove(i);
            let two_q = mul(2, self.q(&x), p);
            let s = inv(two_q, p);
            for r in rest.iter_mut() {
                let c = mul(self.b(r, &x), s, p);
                *r = super::linalg::axpy(r, neg(c, p), &x, p);
            }
            out.push(x);
        }
        out
    }

    pub fn witt_decomposition(&self) -> WittDecomposition {
        let p = self.p;
        let n = self.dim();
        let radical = self.radicals().bilinear;
        let mut current = complement_units(&radical, n, p);
        let mut pairs = Vec::new();
        loop {
            let sub = self.restrict(&current);
            let Some(c) = sub.find_isotropic_vector() else {
                break;
            };
            let u = self.combine(&current, &c);
            let w = current
                .iter()
                .find(|s| self.b(&u, s) != 0)
                .expect("nondegenerate part pairs with every vector");
            let w = vscale(inv(self.b(&u, w), p), w, p);
            let v = super::linalg::axpy(&w, neg(self.q(&w), p), &u, p);
            debug_assert!(self.q(&v) == 0 && self.b(&u, &v) == 1);
            current = self.orthogonal_within(&current, &[u.clone(), v.clone()]);
            pairs.push((u, v));
        }
        WittDecomposition {
            pairs,
            anisotropic: current,
            radical,
        }
    }

    /// Witt type of a nondegenerate space.
    pub fn witt_type(&self) -> Result<WittType> {
        if !self.is_nondegenerate() {
            return Err(Error::Degenerate("quadratic space is degenerate".into()));
        }
        let n = self.dim();
        if n % 2 == 1 {
            return Ok(WittType::Odd);
        }
        Ok(if self.witt_decomposition().witt_index() == n / 2 {
            WittType::Split
        } else {
            WittType::NonSplit
        })
    }

    pub fn projective_point_count(&self) -> Option<u64> {
        checked_pow(self.p, self.dim()).map(|t| (t - 1) / (self.p - 1))
    }

    /// All isotropic lines, sorted by normalized generator.
    pub fn enumerate_isotropic_lines(&self, max_points: u64) -> Result<Vec<ProjLine>> {
        let total = self.projective_point_count().unwrap_or(u64::MAX);
        if total > max_points {
            return Err(Error::GuardExceeded {
                what: "projective points",
                needed: total as u128,
                limit: max_points as u128,
            });
        }
        let mut out = Vec::new();
        self.for_each_point(|v| {
            if self.q(v) == 0 {
                out.push(ProjLine {
                    generator: v.to_vec(),
                });
            }
        });
        out.sort();
        Ok(out)
    }

    /// Visit every normalized nonzero vector once.
    pub fn for_each_point(&self, mut f: impl FnMut(&[u64])) {
        let n = self.dim();
        let p = self.p;
        for lead in 0..n {
            let tail = n - lead - 1;
            let count = checked_pow(p, tail).expect("guarded by caller");
            for idx in 0..count {
                let mut v = zero_vec(n);
                v[lead] = 1;
                v[lead + 1..].copy_from_slice(&digits(idx, tail, p));
                f(&v);
            }
        }
    }

    pub fn line(&self, v: &[u64]) -> Result<ProjLine> {
        check_dim(self.dim(), v.len())?;
        ProjLine::new(v, self.p)
    }

    pub fn is_isotropic_line(&self, line: &ProjLine) -> bool {
        line.dim() == self.dim() && self.q(line.generator()) == 0
    }

    /// Coordinates of `v` in an independent `basis`, if `v` is in its span.
    pub fn coordinates(&self, basis: &[FpVec], v: &[u64]) -> Option<FpVec> {
        coordinates(basis, v, self.p)
    }

    /// Discriminant class of a nondegenerate space (p odd): whether
    /// `(−1)^{⌊n/2⌋}·det(Gram/2)` is a square.
    pub fn has_square_discriminant(&self) -> Result<bool> {
        if self.p == 2 {
            return Err(Error::Unsupported(
                "discriminant classes in characteristic 2".into(),
            ));
        }
        let n = self.dim();
        let g = self.gram();
        let half = inv(2, self.p);
        let scaled: FpMat = g
            .iter()
            .map(|r| r.iter().map(|&x| mul(x, half, self.p)).collect())
            .collect();
        let mut d = super::linalg::det(&scaled, self.p);
        if d == 0 {
            return Err(Error::Degenerate("quadratic space is degenerate".into()));
        }
        if (n / 2) % 2 == 1 {
            d = neg(d, self.p);
        }
        Ok(is_square(d, self.p))
    }

    /// Matrix with columns `vectors`.
    pub fn matrix_of(&self, vectors: &[FpVec]) -> FpMat {
        from_columns(vectors, self.dim())
    }

    pub fn span_rank(&self, vectors: &[FpVec]) -> usize {
        span_rank(vectors, self.p)
    }

    pub fn unit(&self, i: usize) -> FpVec {
        unit_vec(self.dim(), i)
    }
}

/// Number of isotropic lines on a nondegenerate quadric of the given type.
pub fn quadric_line_count(p: u64, dim: usize, kind: WittType) -> u128 {
    let p = p as u128;
    let pw = |k: usize| p.pow(k as u32);
    match kind {
        WittType::Odd => (pw(dim - 1) - 1) / (p - 1),
        WittType::Split => {
            let m = dim / 2;
            (pw(m - 1) + 1) * (pw(m) - 1) / (p - 1)
        }
        WittType::NonSplit => {
            let m = dim / 2;
            (pw(m - 1) - 1) * (pw(m) + 1) / (p - 1)
        }
    }
}

impl PartialOrd for FpQuadSpace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FpQuadSpace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, &self.half_gram).cmp(&(other.p, &other.half_gram))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm_form_f3() -> FpQuadSpace {
        FpQuadSpace::diagonal(3, &[1, 1]).unwrap()
    }

    #[test]
    fn radical_examples() {
        let h = FpQuadSpace::hyperbolic(2, 1).unwrap();
        let r = h.radicals();
        assert!(r.bilinear.is_empty() && r.isotropic.is_empty());
        let x2 = FpQuadSpace::diagonal(2, &[1]).unwrap();
        let r = x2.radicals();
        assert_eq!(r.bilinear, vec![vec![1]]);
        assert!(r.isotropic.is_empty());
        assert!(x2.is_nondegenerate());
        assert!(FpQuadSpace::diagonal(3, &[1, 2, 1])
            .unwrap()
            .is_nondegenerate());
    }

    #[test]
    fn isotropic_vector_examples() {
        let h = FpQuadSpace::hyperbolic(3, 1).unwrap();
        assert_eq!(h.find_isotropic_vector(), Some(vec![1, 0]));
        assert_eq!(norm_form_f3().find_isotropic_vector(), None);
        let d = FpQuadSpace::diagonal(3, &[1, 1, 1]).unwrap();
        assert_eq!(d.find_isotropic_vector(), Some(vec![1, 1, 1]));
    }

    #[test]
    fn constructive_isotropic_vectors() {
        // Large enough to bypass exhaustive search.
        for (p, entries) in [
            (1_000_003u64, vec![1u64, 1, 1]),
            (1_000_003, vec![1, 2, 5]),
            (10_007, vec![3, 5]),
            (10_007, vec![1, 1]),
        ] {
            let s = FpQuadSpace::diagonal(p, &entries).unwrap();
            let brute_possible = entries.len() >= 3 || {
                let r = mul(neg(entries[1], p), inv(entries[0], p), p);
                is_square(r, p)
            };
            match s.construct_isotropic() {
                Some(v) => {
                    assert_eq!(s.q(&v), 0);
                    assert!(!is_zero(&v));
                }
                None => assert!(!brute_possible),
            }
        }
        let big2 = FpQuadSpace::hyperbolic(2, 10).unwrap();
        let v = big2.find_isotropic_vector().unwrap();
        assert_eq!(big2.q(&v), 0);
        // Two anisotropic planes over F_2.
        let aniso = FpQuadSpace::new(2, vec![vec![1, 1], vec![0, 1]]).unwrap();
        let two = aniso.orthogonal_sum(&aniso).unwrap();
        let v = two.construct_isotropic().unwrap();
        assert_eq!(two.q(&v), 0);
        assert_eq!(aniso.construct_isotropic(), None);
    }

    #[test]
    fn witt_decomposition_examples() {
        let hh = FpQuadSpace::hyperbolic(3, 2).unwrap();
        let w = hh.witt_decomposition();
        assert_eq!(w.witt_index(), 2);
        assert!(w.anisotropic.is_empty());
        let d = FpQuadSpace::diagonal(3, &[1, 1, 1]).unwrap();
        let w = d.witt_decomposition();
        assert_eq!(w.witt_index(), 1);
        assert_eq!(w.anisotropic.len(), 1);
        let x2 = FpQuadSpace::diagonal(2, &[1]).unwrap();
        let w = x2.witt_decomposition();
        assert!(w.pairs.is_empty() && w.anisotropic.is_empty());
        assert_eq!(w.radical, vec![vec![1]]);
    }

    #[test]
    fn witt_pairs_are_hyperbolic_and_orthogonal() {
        let s = FpQuadSpace::diagonal(5, &[1, 2, 3, 4, 1]).unwrap();
        let w = s.witt_decomposition();
        let mut all = Vec::new();
        for (u, v) in &w.pairs {
            assert_eq!((s.q(u), s.q(v), s.b(u, v)), (0, 0, 1));
            all.push(u.clone());
            all.push(v.clone());
        }
        for (i, (u, v)) in w.pairs.iter().enumerate() {
            for (j, (x, y)) in w.pairs.iter().enumerate() {
                if i != j {
                    assert_eq!([s.b(u, x), s.b(u, y), s.b(v, x), s.b(v, y)], [0; 4]);
                }
            }
        }
        all.extend(w.anisotropic.iter().cloned());
        all.extend(w.radical.iter().cloned());
        assert_eq!(s.span_rank(&all), 5);
        assert!(s.restrict(&w.anisotropic).find_isotropic_vector().is_none());
    }

    #[test]
    fn line_enumeration_examples() {
        let h = FpQuadSpace::hyperbolic(3, 1).unwrap();
        let lines = h.enumerate_isotropic_lines(DEFAULT_MAX_POINTS).unwrap();
        assert_eq!(lines.len(), 2);
        for p in [2, 3, 5] {
            let hh = FpQuadSpace::hyperbolic(p, 2).unwrap();
            let n = hh
                .enumerate_isotropic_lines(DEFAULT_MAX_POINTS)
                .unwrap()
                .len() as u64;
            assert_eq!(n, (p + 1) * (p + 1));
        }
        let d = FpQuadSpace::diagonal(3, &[1, 1, 1]).unwrap();
        assert_eq!(
            d.enumerate_isotropic_lines(DEFAULT_MAX_POINTS)
                .unwrap()
                .len(),
            4
        );
        assert!(matches!(
            FpQuadSpace::hyperbolic(5, 6)
                .unwrap()
                .enumerate_isotropic_lines(1000),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn reduction_of_lattices() {
        let h = FpQuadSpace::reduction(&QuadLattice::hyperbolic(), 3).unwrap();
        assert_eq!(h, FpQuadSpace::hyperbolic(3, 1).unwrap());
        let e8 = FpQuadSpace::reduction(&QuadLattice::e8(), 2).unwrap();
        assert!(e8.radicals().bilinear.is_empty());
        let r = FpQuadSpace::reduction(&QuadLattice::rank1(3).unwrap(), 3).unwrap();
        assert_eq!(r.radicals().bilinear.len(), 1);
    }

    #[test]
    fn witt_types() {
        assert_eq!(
            FpQuadSpace::hyperbolic(3, 2).unwrap().witt_type().unwrap(),
            WittType::Split
        );
        assert_eq!(norm_form_f3().witt_type().unwrap(), WittType::NonSplit);
        assert_eq!(
            FpQuadSpace::diagonal(2, &[1]).unwrap().witt_type().unwrap(),
            WittType::Odd
        );
        assert_eq!(quadric_line_count(2, 6, WittType::Split), 35);
        assert_eq!(quadric_line_count(3, 6, WittType::Split), 130);
    }
}
