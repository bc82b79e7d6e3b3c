use super::field::{inv, is_square, mul, neg, sub};
use super::linalg::{
    axpy, checked_pow, complement_units, det, digits, from_columns, identity, inverse, mat_mul,
    mat_vec, null_space, rank, solve, span_rank, vadd, vsub, FpMat, FpVec,
};
use super::space::FpQuadSpace;
use crate::error::{Error, Result};

/// Default cap on group elements or search nodes visited exhaustively.
pub const DEFAULT_MAX_ELEMENTS: u64 = 1_000_000;

/// An isometry of a quadratic space, acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpIsometry {
    matrix: FpMat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpinorClass {
    Square,
    NonSquare,
}

impl SpinorClass {
    pub fn of(a: u64, p: u64) -> Self {
        if is_square(a, p) {
            SpinorClass::Square
        } else {
            SpinorClass::NonSquare
        }
    }

    pub fn times(self, other: SpinorClass) -> SpinorClass {
        if self == other {
            SpinorClass::Square
        } else {
            SpinorClass::NonSquare
        }
    }

    pub fn is_trivial(self) -> bool {
        self == SpinorClass::Square
    }
}

impl FpIsometry {
    /// Checks that `matrix` is invertible and preserves `Q`.
    pub fn new(space: &FpQuadSpace, matrix: FpMat) -> Result<Self> {
        if matrix.len() != space.dim() || matrix.iter().any(|r| r.len() != space.dim()) {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                actual: matrix.len(),
            });
        }
        if !preserves_form(space, &matrix) {
            return Err(Error::InvalidParameter("matrix is not an isometry".into()));
        }
        Ok(FpIsometry { matrix })
    }

    pub(crate) fn unchecked(matrix: FpMat) -> Self {
        FpIsometry { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        FpIsometry {
            matrix: identity(dim),
        }
    }

    pub fn matrix(&self) -> &FpMat {
        &self.matrix
    }

    pub fn apply(&self, v: &[u64], p: u64) -> FpVec {
        mat_vec(&self.matrix, v, p)
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &FpIsometry, p: u64) -> FpIsometry {
        FpIsometry {
            matrix: mat_mul(&self.matrix, &other.matrix, p),
        }
    }

    pub fn inverse(&self, p: u64) -> FpIsometry {
        FpIsometry {
            matrix: inverse(&self.matrix, p).expect("isometries are invertible"),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == identity(self.matrix.len())
    }
}

/// Invertible and `Q(g·e_i) = Q(e_i)`, `[g·e_i, g·e_j] = [e_i, e_j]`, which
/// determines `Q∘g = Q`.
pub fn preserves_form(space: &FpQuadSpace, m: &FpMat) -> bool {
    let n = space.dim();
    let p = space.p();
    if det(m, p) == 0 {
        return false;
    }
    let cols: Vec<FpVec> = (0..n).map(|j| m.iter().map(|r| r[j]).collect()).collect();
    for i in 0..n {
        let ei = space.unit(i);
        if space.q(&cols[i]) != space.q(&ei) {
            return false;
        }
        for j in i + 1..n {
            if space.b(&cols[i], &cols[j]) != space.b(&ei, &space.unit(j)) {
                return false;
            }
        }
    }
    true
}

/// `τ_v(x) = x − ([x, v] / Q(v))·v`.
pub fn reflection(space: &FpQuadSpace, v: &[u64]) -> Result<FpIsometry> {
    let p = space.p();
    let qv = space.q(v);
    if qv == 0 {
        return Err(Error::pre("reflection vector must be anisotropic"));
    }
    if !space.is_smooth_point(v) {
        return Err(Error::pre("reflection vector lies in the bilinear radical"));
    }
    let s = inv(qv, p);
    let n = space.dim();
    let cols: Vec<FpVec> = (0..n)
        .map(|j| {
            let e = space.unit(j);
            let c = mul(space.b(&e, v), s, p);
            axpy(&e, neg(c, p), v, p)
        })
        .collect();
    Ok(FpIsometry::unchecked(from_columns(&cols, n)))
}

/// `E_{u,w}(x) = x + [x,u]·w − [x,w]·u − Q(w)[x,u]·u` for isotropic `u` and
/// `w ⊥ u`.
pub fn eichler_transvection(space: &FpQuadSpace, u: &[u64], w: &[u64]) -> Result<FpIsometry> {
    let p = space.p();
    if space.q(u) != 0 {
        return Err(Error::pre("transvection needs an isotropic vector u"));
    }
    if space.b(u, w) != 0 {
        return Err(Error::pre("transvection needs w orthogonal to u"));
    }
    let qw = space.q(w);
    let n = space.dim();
    let cols: Vec<FpVec> = (0..n)
        .map(|j| {
            let x = space.unit(j);
            let xu = space.b(&x, u);
            let xw = space.b(&x, w);
            let mut y = axpy(&x, xu, w, p);
            y = axpy(&y, neg(xw, p), u, p);
            axpy(&y, neg(mul(qw, xu, p), p), u, p)
        })
        .collect();
    Ok(FpIsometry::unchecked(from_columns(&cols, n)))
}

/// `rank(1 − g) mod 2`.
pub fn dickson_invariant(space: &FpQuadSpace, g: &FpIsometry) -> usize {
    let p = space.p();
    let n = space.dim();
    let id = identity(n);
    let diff: FpMat = (0..n)
        .map(|i| (0..n).map(|j| sub(id[i][j], g.matrix[i][j], p)).collect())
        .collect();
    rank(&diff, p) % 2
}

/// Membership in `SO`: determinant 1 for odd `p`; trivial Dickson invariant
/// in even dimension over `F_2`; all of `O` in odd dimension over `F_2`.
pub fn is_special(space: &FpQuadSpace, g: &FpIsometry) -> bool {
    if space.p() == 2 {
        space.dim() % 2 == 1 || dickson_invariant(space, g) == 0
    } else {
        det(&g.matrix, space.p()) == 1
    }
}

fn require_nondegenerate(space: &FpQuadSpace) -> Result<()> {
    if space.is_nondegenerate() {
        Ok(())
    } else {
        Err(Error::Degenerate("quadratic space is degenerate".into()))
    }
}

/// Vectors `y ∉ span(targets)` with `[y, targets_i] = pairings_i` and
/// `Q(y) = q`, in a fixed order.
fn extension_candidates(
    space: &FpQuadSpace,
    targets: &[FpVec],
    pairings: &[u64],
    q: u64,
    budget: &mut u64,
) -> Result<Vec<FpVec>> {
    let p = space.p();
    let n = space.dim();
    let g = space.gram();
    let rows: FpMat = targets.iter().map(|t| mat_vec(&g, t, p)).collect();
    let Some(y0) = solve(&rows, pairings, n, p) else {
        return Ok(Vec::new());
    };
    let kernel = null_space(&rows, n, p);
    let count = checked_pow(p, kernel.len()).unwrap_or(u64::MAX);
    if count > *budget {
        return Err(Error::GuardExceeded {
            what: "isometry extension search nodes",
            needed: count as u128,
            limit: DEFAULT_MAX_ELEMENTS as u128,
        });
    }
    *budget -= count;
    let base_rank = span_rank(targets, p);
    let mut out = Vec::new();
    for idx in 0..count {
        let c = digits(idx, kernel.len(), p);
        let y = vadd(&y0, &space.combine(&kernel, &c), p);
        if space.q(&y) != q {
            continue;
        }
        let mut ext = targets.to_vec();
        ext.push(y.clone());
        if span_rank(&ext, p) > base_rank {
            out.push(y);
        }
    }
    Ok(out)
}

fn assemble(space: &FpQuadSpace, domain: &[FpVec], images: &[FpVec]) -> FpIsometry {
    let n = space.dim();
    let p = space.p();
    let a = from_columns(domain, n);
    let b = from_columns(images, n);
    let a_inv = inverse(&a, p).expect("domain is a basis");
    FpIsometry::unchecked(mat_mul(&b, &a_inv, p))
}

/// Extend a partial isometry `domain_i ↦ images_i` to all of `V`, calling
/// `accept` on each full extension until it returns `true`.
fn search_extensions(
    space: &FpQuadSpace,
    domain: &mut Vec<FpVec>,
    images: &mut Vec<FpVec>,
    budget: &mut u64,
    accept: &mut dyn FnMut(FpIsometry) -> bool,
) -> Result<bool> {
    let n = space.dim();
    let p = space.p();
    if domain.len() == n {
        return Ok(accept(assemble(space, domain, images)));
    }
    let x = complement_units(domain, n, p)
        .into_iter()
        .next()
        .expect("domain is not yet a basis");
    let pairings: Vec<u64> = domain.iter().map(|a| space.b(&x, a)).collect();
    let candidates = extension_candidates(space, images, &pairings, space.q(&x), budget)?;
    for y in candidates {
        domain.push(x.clone());
        images.push(y);
        let done = search_extensions(space, domain, images, budget, accept)?;
        domain.pop();
        images.pop();
        if done {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_partial_isometry(space: &FpQuadSpace, w1: &[FpVec], images: &[FpVec]) -> Result<()> {
    let p = space.p();
    let n = space.dim();
    if w1.len() != images.len() {
        return Err(Error::DimensionMismatch {
            expected: w1.len(),
            actual: images.len(),
        });
    }
    for v in w1.iter().chain(images) {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    if span_rank(w1, p) != w1.len() || span_rank(images, p) != images.len() {
        return Err(Error::InvalidParameter(
            "subspace bases must be independent".into(),
        ));
    }
    for i in 0..w1.len() {
        if space.q(&w1[i]) != space.q(&images[i]) {
            return Err(Error::InvalidParameter("map does not preserve Q".into()));
        }
        for j in i + 1..w1.len() {
            if space.b(&w1[i], &w1[j]) != space.b(&images[i], &images[j]) {
                return Err(Error::InvalidParameter(
                    "map does not preserve the pairing".into(),
                ));
            }
        }
    }
    Ok(())
}

/// An element `g ∈ SO(V)` with `g(w1_i) = images_i`.
///
/// A first extension to `O(V)` is found greedily; if it lies outside `SO`
/// it is corrected by a reflection in an anisotropic vector of
/// `span(images)^⊥`. When that complement is totally singular every
/// extension is searched, and [`Error::NoSpecialExtension`] means none of
/// them lies in `SO`.
pub fn witt_extension(space: &FpQuadSpace, w1: &[FpVec], images: &[FpVec]) -> Result<FpIsometry> {
    require_nondegenerate(space)?;
    check_partial_isometry(space, w1, images)?;
    let n = space.dim();
    let p = space.p();
    if n < w1.len() + 2 {
        return Err(Error::pre("subspace must have codimension at least 2"));
    }
    let mut budget = DEFAULT_MAX_ELEMENTS;
    let mut first = None;
    search_extensions(
        space,
        &mut w1.to_vec(),
        &mut images.to_vec(),
        &mut budget,
        &mut |g| {
            first = Some(g);
            true
        },
    )?;
    let g = first.ok_or_else(|| {
        Error::InvariantViolation("partial isometry has no extension to O(V)".into())
    })?;
    if is_special(space, &g) {
        return Ok(g);
    }
    let perp = space.orthogonal(images);
    let count = checked_pow(p, perp.len()).unwrap_or(u64::MAX);
    for idx in 1..count.min(DEFAULT_MAX_ELEMENTS) {
        let v = space.combine(&perp, &digits(idx, perp.len(), p));
        if space.q(&v) != 0 && space.is_smooth_point(&v) {
            let fixed = reflection(space, &v)?.compose(&g, p);
            debug_assert!(is_special(space, &fixed));
            return Ok(fixed);
        }
    }
    let mut found = None;
    search_extensions(
        space,
        &mut w1.to_vec(),
        &mut images.to_vec(),
        &mut budget,
        &mut |g| {
            if is_special(space, &g) {
                found = Some(g);
                true
            } else {
                false
            }
        },
    )?;
    found.ok_or_else(|| {
        Error::NoSpecialExtension(format!(
            "all extensions lie outside SO; the complement of the image (dim {}) is totally singular",
            perp.len()
        ))
    })
}

/// Vectors `v_1, …, v_k` with `g = τ_{v_1} ∘ … ∘ τ_{v_k}` (p odd).
pub fn reflection_factorization(space: &FpQuadSpace, g: &FpIsometry) -> Result<Vec<FpVec>> {
    let p = space.p();
    if p == 2 {
        return Err(Error::Unsupported(
            "reflection factorization in characteristic 2".into(),
        ));
    }
    require_nondegenerate(space)?;
    if !preserves_form(space, &g.matrix) {
        return Err(Error::InvalidParameter("matrix is not an isometry".into()));
    }
    let mut h = g.clone();
    let mut factors: Vec<FpVec> = Vec::new();
    let mut fixed: Vec<FpVec> = Vec::new();
    let mut twisted_at = None;
    while !h.is_identity() {
        let s = space.orthogonal(&fixed);
        let count = checked_pow(p, s.len()).unwrap_or(u64::MAX);
        if count > DEFAULT_MAX_ELEMENTS {
            return Err(Error::GuardExceeded {
                what: "reflection search vectors",
                needed: count as u128,
                limit: DEFAULT_MAX_ELEMENTS as u128,
            });
        }
        let mut step = None;
        for idx in 1..count {
            let x = space.combine(&s, &digits(idx, s.len(), p));
            if space.q(&x) == 0 {
                continue;
            }
            let hx = h.apply(&x, p);
            if hx == x {
                step = Some((x, vec![]));
                break;
            }
            let d = vsub(&hx, &x, p);
            if space.q(&d) != 0 {
                step = Some((x, vec![d]));
                break;
            }
        }
        if step.is_none() {
            for idx in 1..count {
                let x = space.combine(&s, &digits(idx, s.len(), p));
                if space.q(&x) == 0 {
                    continue;
                }
                let e = vadd(&h.apply(&x, p), &x, p);
                if space.q(&e) != 0 {
                    step = Some((x.clone(), vec![e, x]));
                    break;
                }
            }
        }
        match step {
            Some((x, refl)) => {
                for v in refl {
                    h = reflection(space, &v)?.compose(&h, p);
                    factors.push(v);
                }
                fixed.push(x);
            }
            None => {
                // image(1 − h) is totally singular on s; one reflection
                // leaves that case.
                if twisted_at == Some(fixed.len()) {
                    return Err(Error::InvariantViolation(
                        "reflection factorization made no progress".into(),
                    ));
                }
                twisted_at = Some(fixed.len());
                let a = (1..count)
                    .map(|idx| space.combine(&s, &digits(idx, s.len(), p)))
                    .find(|x| space.q(x) != 0)
                    .ok_or_else(|| {
                        Error::InvariantViolation("no anisotropic vector left".into())
                    })?;
                h = reflection(space, &a)?.compose(&h, p);
                factors.push(a);
            }
        }
    }
    // h = τ_{f_m} ∘ … ∘ τ_{f_1} ∘ g = 1, so g = τ_{f_1} ∘ … ∘ τ_{f_m}.
    let mut check = FpIsometry::identity(space.dim());
    for v in &factors {
        check = check.compose(&reflection(space, v)?, p);
    }
    if check != *g {
        return Err(Error::InvariantViolation(
            "reflection factorization does not recompose".into(),
        ));
    }
    Ok(factors)
}

/// Spinor norm in `F_p^× / (F_p^×)²` (p odd).
pub fn spinor_norm(space: &FpQuadSpace, g: &FpIsometry) -> Result<SpinorClass> {
    let p = space.p();
    let factors = reflection_factorization(space, g)?;
    let prod = factors.iter().fold(1, |acc, v| mul(acc, space.q(v), p));
    Ok(SpinorClass::of(prod, p))
}

/// Every element of `O(V)`, by backtracking on the images of the
/// standard basis vectors. Errors past `limit` elements.
pub fn enumerate_orthogonal_group(space: &FpQuadSpace, limit: u64) -> Result<Vec<FpIsometry>> {
    let n = space.dim();
    let p = space.p();
    let total = checked_pow(p, n).ok_or(Error::GuardExceeded {
        what: "vectors",
        needed: u128::MAX,
        limit: limit as u128,
    })?;
    let vectors: Vec<FpVec> = (0..total).map(|i| digits(i, n, p)).collect();
    let mut out = Vec::new();
    let mut cols: Vec<FpVec> = Vec::with_capacity(n);
    fn rec(
        space: &FpQuadSpace,
        vectors: &[FpVec],
        cols: &mut Vec<FpVec>,
        out: &mut Vec<FpIsometry>,
        limit: u64,
    ) -> Result<()> {
        let n = space.dim();
        let p = space.p();
        let j = cols.len();
        if j == n {
            let m = from_columns(cols, n);
            if det(&m, p) != 0 {
                if out.len() as u64 >= limit {
                    return Err(Error::GuardExceeded {
                        what: "group elements",
                        needed: limit as u128 + 1,
                        limit: limit as u128,
                    });
                }
                out.push(FpIsometry::unchecked(m));
            }
            return Ok(());
        }
        let ej = space.unit(j);
        let qj = space.q(&ej);
        let pair: Vec<u64> = (0..j).map(|i| space.b(&ej, &space.unit(i))).collect();
        for y in vectors {
            if space.q(y) != qj {
                continue;
            }
            if (0..j).any(|i| space.b(y, &cols[i]) != pair[i]) {
                continue;
            }
            cols.push(y.clone());
            rec(space, vectors, cols, out, limit)?;
            cols.pop();
        }
        Ok(())
    }
    rec(space, &vectors, &mut cols, &mut out, limit)?;
    Ok(out)
}

/// Whether `v` is fixed by `g`.
pub fn fixes(g: &FpIsometry, v: &[u64], p: u64) -> bool {
    g.apply(v, p) == v
}
