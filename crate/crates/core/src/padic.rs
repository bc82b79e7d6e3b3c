//! Self-dual lattices in `N[1/p]` adjacent to a self-dual `N` (p-neighbors),
//! their correspondence with isotropic lines of `N/pN`, and the W-generic
//! refinement.
//!
//! Convention: [`lattice_from_line`] moves from `N` to its neighbor `Ñ`;
//! [`recover_lattice`] performs the inverse move from `Ñ` back to a lattice
//! containing a prescribed summand `W`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fp::linalg::{checked_pow, digits, in_span, span_rank, FpVec};
use crate::fp::{FpQuadSpace, ProjLine};
use crate::lattice::{fold_upper, QuadLattice};
use crate::linalg::{
    column_hnf_basis, dot, integer_kernel, lattice_intersection, rank, relative_quotient, saturate,
    AbelianQuotient, IntMatrix,
};

/// Default working precision `k` for lifts mod `p^k`.
pub const DEFAULT_PRECISION: u32 = 2;

/// `p^{-power} · span(numerator)`, in ambient coordinates. Canonical: the
/// numerator is a column HNF and `power` is as small as possible.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScaledLattice {
    power: u32,
    numerator: IntMatrix,
}

fn pbig(p: u64) -> BigInt {
    BigInt::from(p)
}

fn ppow(p: u64, k: u32) -> BigInt {
    pbig(p).pow(k)
}

impl ScaledLattice {
    pub fn new(p: u64, power: u32, numerator: &IntMatrix) -> Self {
        let mut num = column_hnf_basis(numerator);
        let mut power = power;
        let pb = pbig(p);
        while power > 0 && num.entries().iter().all(|x| x.is_multiple_of(&pb)) {
            num = num.div_exact(&pb).expect("divisible");
            power -= 1;
        }
        ScaledLattice {
            power,
            numerator: num,
        }
    }

    pub fn integral(basis: &IntMatrix) -> Self {
        ScaledLattice {
            power: 0,
            numerator: column_hnf_basis(basis),
        }
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn numerator(&self) -> &IntMatrix {
        &self.numerator
    }

    pub fn rank(&self) -> usize {
        self.numerator.cols()
    }

    pub fn dim(&self) -> usize {
        self.numerator.rows()
    }

    /// Numerator expressed over the denominator `p^k`, `k ≥ power`.
    fn at_power(&self, k: u32, p: u64) -> IntMatrix {
        self.numerator.scale(&ppow(p, k - self.power))
    }

    pub fn intersect(&self, other: &ScaledLattice, p: u64) -> Result<ScaledLattice> {
        let k = self.power.max(other.power);
        let m = lattice_intersection(&self.at_power(k, p), &other.at_power(k, p))?;
        Ok(ScaledLattice::new(p, k, &m))
    }

    pub fn sum(&self, other: &ScaledLattice, p: u64) -> Result<ScaledLattice> {
        let k = self.power.max(other.power);
        let m = self.at_power(k, p).hstack(&other.at_power(k, p))?;
        Ok(ScaledLattice::new(p, k, &m))
    }

    /// The lattice `p^e · self`.
    pub fn scale_p(&self, e: i32, p: u64) -> ScaledLattice {
        if e >= 0 {
            ScaledLattice::new(p, self.power, &self.numerator.scale(&ppow(p, e as u32)))
        } else {
            ScaledLattice::new(p, self.power + e.unsigned_abs(), &self.numerator)
        }
    }

    pub fn contains(&self, other: &ScaledLattice, p: u64) -> bool {
        let k = self.power.max(other.power);
        crate::linalg::contains(&self.at_power(k, p), &other.at_power(k, p))
    }

    /// `self / sub`; errors if `sub ⊄ self`.
    pub fn quotient_by(&self, sub: &ScaledLattice, p: u64) -> Result<AbelianQuotient> {
        let k = self.power.max(sub.power);
        relative_quotient(&self.at_power(k, p), &sub.at_power(k, p))
    }

    /// `self ∩ (span(w) ⊗ Q)`.
    pub fn intersect_span(&self, w: &IntMatrix, p: u64) -> Result<ScaledLattice> {
        let sat = saturate(self.dim(), w)?.basis;
        let m = lattice_intersection(&self.numerator, &sat)?;
        Ok(ScaledLattice::new(p, self.power, &m))
    }
}

/// A full-rank lattice in `N[1/p]` for a fixed ambient `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PLattice {
    lattice: ScaledLattice,
    p: u64,
    ambient: QuadLattice,
}

impl PLattice {
    pub fn new(ambient: QuadLattice, p: u64, power: u32, numerator: &IntMatrix) -> Result<Self> {
        crate::fp::field::check_prime(p)?;
        let n = ambient.rank();
        if numerator.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: numerator.rows(),
            });
        }
        if rank(numerator) != n {
            return Err(Error::Degenerate(
                "lattice basis does not have full rank".into(),
            ));
        }
        Ok(PLattice {
            lattice: ScaledLattice::new(p, power, numerator),
            p,
            ambient,
        })
    }

    /// `N` itself.
    pub fn ambient_lattice(ambient: &QuadLattice, p: u64) -> Result<Self> {
        Self::new(ambient.clone(), p, 0, &IntMatrix::identity(ambient.rank()))
    }

    pub fn ambient(&self) -> &QuadLattice {
        &self.ambient
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn power(&self) -> u32 {
        self.lattice.power
    }

    pub fn numerator(&self) -> &IntMatrix {
        &self.lattice.numerator
    }

    pub fn scaled(&self) -> &ScaledLattice {
        &self.lattice
    }

    /// The form restricted to this lattice, in its canonical basis; errors
    /// when `Q` is not integral on it.
    pub fn quad_lattice(&self) -> Result<QuadLattice> {
        let t = self.numerator();
        let g = &(&t.transpose() * self.ambient.half_gram()) * t;
        let denom = ppow(self.p, 2 * self.power());
        let h = fold_upper(&g)
            .div_exact(&denom)
            .ok_or_else(|| Error::pre("quadratic form is not integral on the lattice"))?;
        QuadLattice::new(h)
    }

    pub fn is_self_dual(&self) -> bool {
        self.quad_lattice()
            .map(|l| l.is_self_dual_at(self.p))
            .unwrap_or(false)
    }

    fn ambient_scaled(&self) -> ScaledLattice {
        ScaledLattice::integral(&IntMatrix::identity(self.ambient.rank()))
    }

    /// `(|self / self ∩ N|, |N / self ∩ N|)`.
    pub fn indices_against_ambient(&self) -> Result<(BigInt, BigInt)> {
        let n = self.ambient_scaled();
        let meet = self.lattice.intersect(&n, self.p)?;
        let a = self.lattice.quotient_by(&meet, self.p)?;
        let b = n.quotient_by(&meet, self.p)?;
        Ok((a.order().expect("full rank"), b.order().expect("full rank")))
    }

    /// Whether this is a p-neighbor of its ambient: self-dual, with
    /// `[Ñ : Ñ ∩ N] = [N : Ñ ∩ N] = p`.
    pub fn is_neighbor(&self) -> bool {
        if !self.ambient.is_self_dual_at(self.p) || !self.is_self_dual() {
            return false;
        }
        match self.indices_against_ambient() {
            Ok((a, b)) => a == pbig(self.p) && b == pbig(self.p),
            Err(_) => false,
        }
    }

    /// Re-express a lattice given in the coordinates of this lattice's
    /// canonical basis in the ambient coordinates.
    pub fn embed_local(&self, local: &PLattice) -> Result<PLattice> {
        if local.p != self.p || local.ambient.rank() != self.ambient.rank() {
            return Err(Error::InvalidParameter(
                "local lattice has the wrong shape".into(),
            ));
        }
        let num = self.numerator() * local.numerator();
        PLattice::new(
            self.ambient.clone(),
            self.p,
            self.power() + local.power(),
            &num,
        )
    }

    pub fn intersect_span(&self, w: &IntMatrix) -> Result<ScaledLattice> {
        self.lattice.intersect_span(w, self.p)
    }
}

fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

fn inv_mod(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

fn require_self_dual(n: &QuadLattice, p: u64) -> Result<()> {
    if n.is_self_dual_at(p) {
        Ok(())
    } else {
        Err(Error::pre(format!(
            "ambient lattice is not self-dual at {p}"
        )))
    }
}

fn line_vector(n: &QuadLattice, line: &ProjLine) -> Result<Vec<BigInt>> {
    if line.dim() != n.rank() {
        return Err(Error::DimensionMismatch {
            expected: n.rank(),
            actual: line.dim(),
        });
    }
    Ok(line.generator().iter().map(|&x| BigInt::from(x)).collect())
}

/// A lift `v` of the line's generator with `Q(v) ≡ 0 mod p^k`, entries in
/// `[0, p^k)`.
pub fn hensel_lift_line(n: &QuadLattice, line: &ProjLine, p: u64, k: u32) -> Result<Vec<BigInt>> {
    crate::fp::field::check_prime(p)?;
    if k == 0 {
        return Err(Error::InvalidParameter("precision must be positive".into()));
    }
    let mut v = line_vector(n, line)?;
    let pb = pbig(p);
    if !n.quad_value(&v)?.is_multiple_of(&pb) {
        return Err(Error::pre("line is not isotropic mod p"));
    }
    let bv = n.gram().mul_vec(&v)?;
    let Some(j) = bv.iter().position(|c| !c.is_multiple_of(&pb)) else {
        return Err(Error::pre("non-smooth point, no canonical lift"));
    };
    let pairing_inv = inv_mod(&bv[j], &pb).expect("unit");
    for step in 1..k {
        let pj = ppow(p, step);
        let q = n.quad_value(&v)?;
        debug_assert!(q.is_multiple_of(&pj));
        if q.is_multiple_of(&(&pj * &pb)) {
            continue;
        }
        let t = mod_floor(&(-(&q / &pj) * &pairing_inv), &pb);
        v[j] += &t * &pj;
        if !n.quad_value(&v)?.is_multiple_of(&(&pj * &pb)) {
            return Err(Error::InvariantViolation(
                "Newton step failed to lift".into(),
            ));
        }
    }
    let m = ppow(p, k);
    Ok(v.iter().map(|x| mod_floor(x, &m)).collect())
}

/// `N = N(−1) ⊕ N(0) ⊕ N(1)` modulo `p^k`, with `N(−1) = ⟨n_minus⟩` the
/// lifted line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaSplitting {
    pub n_minus: Vec<BigInt>,
    pub n_plus: Vec<BigInt>,
    pub n_zero: Vec<Vec<BigInt>>,
    pub precision: u32,
}

/// Candidates for a vector pairing to a unit with `v`: unit vectors, then
/// sums of two unit vectors.
fn complement_candidates(bv: &[BigInt], p: u64) -> Vec<Vec<BigInt>> {
    let n = bv.len();
    let pb = pbig(p);
    let unit = |i: usize| {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        e
    };
    let mut out = Vec::new();
    for i in 0..n {
        if !bv[i].is_multiple_of(&pb) {
            out.push(unit(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !(&bv[i] + &bv[j]).is_multiple_of(&pb) {
                let mut e = unit(i);
                e[j] = BigInt::one();
                out.push(e);
            }
        }
    }
    out
}

/// A splitting adapted to the line; `seed` selects among the complementary
/// candidates (seed 0 is the lexicographically first unit vector).
pub fn splitting_from_line(
    n: &QuadLattice,
    line: &ProjLine,
    p: u64,
    k: u32,
    seed: usize,
) -> Result<LambdaSplitting> {
    let v = hensel_lift_line(n, line, p, k)?;
    let m = ppow(p, k);
    let g = n.gram();
    let bv = g.mul_vec(&v)?;
    let cands = complement_candidates(&bv, p);
    let w = &cands[seed % cands.len()];
    let vw = dot(&bv, w);
    let vw_inv = inv_mod(&vw, &m).expect("unit pairing");
    let w1: Vec<BigInt> = w.iter().map(|x| x * &vw_inv).collect();
    let qw1 = n.quad_value(&w1)?;
    let n_plus: Vec<BigInt> = w1
        .iter()
        .zip(&v)
        .map(|(a, b)| mod_floor(&(a - &qw1 * b), &m))
        .collect();
    let b_plus = g.mul_vec(&n_plus)?;

    // P(x) = x − [x, n₊]·v − [x, v]·n₊ kills both pairings mod p^k.
    let dim = n.rank();
    let mut n_zero: Vec<Vec<BigInt>> = Vec::new();
    let mut chosen: Vec<FpVec> = vec![to_fp(&v, p), to_fp(&n_plus, p)];
    for i in 0..dim {
        if n_zero.len() + 2 == dim {
            break;
        }
        let xp = &b_plus[i];
        let xv = &bv[i];
        let px: Vec<BigInt> = (0..dim)
            .map(|r| {
                let e = if r == i {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
                mod_floor(&(e - xp * &v[r] - xv * &n_plus[r]), &m)
            })
            .collect();
        let f = to_fp(&px, p);
        if !in_span(&chosen, &f, p) {
            chosen.push(f);
            n_zero.push(px);
        }
    }
    let s = LambdaSplitting {
        n_minus: v,
        n_plus,
        n_zero,
        precision: k,
    };
    verify_splitting(n, &s, p)?;
    Ok(s)
}

fn to_fp(v: &[BigInt], p: u64) -> FpVec {
    let pb = pbig(p);
    v.iter()
        .map(|x| x.mod_floor(&pb).to_u64().expect("reduced"))
        .collect()
}

/// Checks the splitting conditions modulo `p^precision`.
pub fn verify_splitting(n: &QuadLattice, s: &LambdaSplitting, p: u64) -> Result<()> {
    let m = ppow(p, s.precision);
    let zero_mod = |x: BigInt| x.is_multiple_of(&m);
    let ok = zero_mod(n.quad_value(&s.n_minus)?)
        && zero_mod(n.quad_value(&s.n_plus)?)
        && zero_mod(n.bilinear_value(&s.n_minus, &s.n_plus)? - 1)
        && s.n_zero.iter().try_fold(true, |acc, z| -> Result<bool> {
            Ok(acc
                && zero_mod(n.bilinear_value(z, &s.n_minus)?)
                && zero_mod(n.bilinear_value(z, &s.n_plus)?))
        })?;
    let mut all: Vec<FpVec> = vec![to_fp(&s.n_minus, p), to_fp(&s.n_plus, p)];
    all.extend(s.n_zero.iter().map(|z| to_fp(z, p)));
    if !ok || span_rank(&all, p) != n.rank() || all.len() != n.rank() {
        return Err(Error::InvariantViolation(
            "splitting conditions fail".into(),
        ));
    }
    Ok(())
}

/// `N_v = {x ∈ N : [x, v] ≡ 0 mod p}`.
fn pairing_kernel(n: &QuadLattice, v: &[BigInt], p: u64) -> Result<IntMatrix> {
    let bv = n.gram().mul_vec(v)?;
    let mut row = bv.clone();
    row.push(pbig(p));
    let k = integer_kernel(&IntMatrix::from_big_rows(vec![row], n.rank() + 1)?);
    let x = k.select_rows(&(0..n.rank()).collect::<Vec<_>>());
    Ok(column_hnf_basis(&x))
}

/// The neighbor `Ñ = Z·(v/p) + N_v` of `N` attached to an isotropic line,
/// with `v` lifted to precision `k ≥ 2`.
pub fn lattice_from_line_with_precision(
    n: &QuadLattice,
    line: &ProjLine,
    p: u64,
    k: u32,
) -> Result<PLattice> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "neighbor construction needs precision ≥ 2".into(),
        ));
    }
    let v = hensel_lift_line(n, line, p, k)?;
    let nv = pairing_kernel(n, &v, p)?;
    let vcol = IntMatrix::from_columns(n.rank(), &[v])?;
    let num = vcol.hstack(&nv.scale(&pbig(p)))?;
    let out = PLattice::new(n.clone(), p, 1, &num)?;
    if n.is_self_dual_at(p) && !out.is_neighbor() {
        return Err(Error::InvariantViolation(
            "constructed lattice is not a self-dual p-neighbor".into(),
        ));
    }
    Ok(out)
}

pub fn lattice_from_line(n: &QuadLattice, line: &ProjLine, p: u64) -> Result<PLattice> {
    lattice_from_line_with_precision(n, line, p, DEFAULT_PRECISION)
}

/// `span{p⁻¹·n₋, n₀, p·n₊} + pN`, the neighbor read off a splitting.
pub fn lattice_from_splitting(n: &QuadLattice, s: &LambdaSplitting, p: u64) -> Result<PLattice> {
    if s.precision < 2 {
        return Err(Error::InvalidParameter(
            "splitting precision must be ≥ 2".into(),
        ));
    }
    let dim = n.rank();
    let pb = pbig(p);
    let p2 = &pb * &pb;
    let mut cols = vec![s.n_minus.clone()];
    cols.extend(s.n_zero.iter().map(|z| z.iter().map(|x| x * &pb).collect()));
    cols.push(s.n_plus.iter().map(|x| x * &p2).collect());
    let num = IntMatrix::from_columns(dim, &cols)?.hstack(&IntMatrix::identity(dim).scale(&p2))?;
    PLattice::new(n.clone(), p, 1, &num)
}

/// The isotropic line `((pÑ ∩ N) + pN)/pN` of a neighbor.
pub fn line_from_lattice(nt: &PLattice) -> Result<ProjLine> {
    let p = nt.p();
    if !nt.is_neighbor() {
        return Err(Error::pre(
            "lattice is not a self-dual p-neighbor of its ambient",
        ));
    }
    let dim = nt.ambient().rank();
    let scaled = nt.scaled().scale_p(1, p);
    let ambient = ScaledLattice::integral(&IntMatrix::identity(dim));
    let meet = scaled.intersect(&ambient, p)?;
    debug_assert_eq!(meet.power(), 0);
    let vectors: Vec<FpVec> = meet.numerator().columns().map(|c| to_fp(&c, p)).collect();
    let basis = crate::fp::linalg::span_basis(&vectors, p);
    if basis.len() != 1 {
        return Err(Error::InvariantViolation(format!(
            "neighbor determines a {}-dimensional subspace mod p",
            basis.len()
        )));
    }
    let line = ProjLine::new(&basis[0], p)?;
    let space = FpQuadSpace::reduction(nt.ambient(), p)?;
    if !space.is_isotropic_line(&line) {
        return Err(Error::InvariantViolation(
            "recovered line is not isotropic".into(),
        ));
    }
    Ok(line)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub line: ProjLine,
    pub lattice: PLattice,
}

/// All p-neighbors of `N`, one per smooth isotropic line, ordered by line.
pub fn enumerate_neighbors(n: &QuadLattice, p: u64, max_points: u64) -> Result<Vec<Neighbor>> {
    enumerate_neighbors_with_precision(n, p, max_points, DEFAULT_PRECISION)
}

pub fn enumerate_neighbors_with_precision(
    n: &QuadLattice,
    p: u64,
    max_points: u64,
    k: u32,
) -> Result<Vec<Neighbor>> {
    let space = FpQuadSpace::reduction(n, p)?;
    let mut out = Vec::new();
    for line in space.enumerate_isotropic_lines(max_points)? {
        if !space.is_smooth_point(line.generator()) {
            continue;
        }
        let lattice = lattice_from_line_with_precision(n, &line, p, k)?;
        out.push(Neighbor { line, lattice });
    }
    Ok(out)
}

/// Reductions mod `p` of a direct summand `W` and an optional corank-one
/// summand `U ⊂ W`.
#[derive(Clone, Debug)]
pub struct GenericityData {
    pub w_bar: Vec<FpVec>,
    pub u_bar: Option<Vec<FpVec>>,
}

fn require_summand(n: &QuadLattice, w: &IntMatrix, what: &str) -> Result<()> {
    if w.rows() != n.rank() {
        return Err(Error::DimensionMismatch {
            expected: n.rank(),
            actual: w.rows(),
        });
    }
    if rank(w) != w.cols() {
        return Err(Error::Degenerate(format!(
            "{what} basis is not independent"
        )));
    }
    if !saturate(n.rank(), w)?.is_direct_summand {
        return Err(Error::pre(format!("{what} is not a direct summand")));
    }
    Ok(())
}

impl GenericityData {
    pub fn new(n: &QuadLattice, w: &IntMatrix, u: Option<&IntMatrix>, p: u64) -> Result<Self> {
        require_summand(n, w, "W")?;
        let w_bar: Vec<FpVec> = w.columns().map(|c| to_fp(&c, p)).collect();
        let u_bar = match u {
            None => None,
            Some(u) => {
                require_summand(n, u, "U")?;
                if u.cols() + 1 != w.cols() {
                    return Err(Error::pre("U must have corank one in W"));
                }
                if !crate::linalg::contains(w, u) {
                    return Err(Error::pre("U is not contained in W"));
                }
                Some(u.columns().map(|c| to_fp(&c, p)).collect())
            }
        };
        Ok(GenericityData { w_bar, u_bar })
    }

    /// From `W` and an index-`p` sublattice `W̃ ⊂ W`: `Ū` is the image of
    /// `W̃` in `W/pW`.
    pub fn from_tilde(n: &QuadLattice, w: &IntMatrix, w_tilde: &IntMatrix, p: u64) -> Result<Self> {
        require_summand(n, w, "W")?;
        let q = relative_quotient(w, w_tilde)?;
        if q.order() != Some(pbig(p)) {
            return Err(Error::pre("W̃ must have index p in W"));
        }
        let w_bar: Vec<FpVec> = w.columns().map(|c| to_fp(&c, p)).collect();
        let images: Vec<FpVec> = w_tilde.columns().map(|c| to_fp(&c, p)).collect();
        let u_bar = crate::fp::linalg::span_basis(&images, p);
        debug_assert_eq!(u_bar.len() + 1, w_bar.len());
        Ok(GenericityData {
            w_bar,
            u_bar: Some(u_bar),
        })
    }

    /// `j ∉ W̄` and `W̄ → J̄∨` surjective (vacuous when `W = 0`).
    pub fn is_generic(&self, space: &FpQuadSpace, j: &[u64]) -> bool {
        if self.w_bar.is_empty() {
            return true;
        }
        !in_span(&self.w_bar, j, space.p()) && self.w_bar.iter().any(|w| space.b(w, j) != 0)
    }

    /// `ker(W̄ → J̄∨) = Ū`, i.e. `Ū ⊥ j`, for generic `j`.
    pub fn has_type(&self, space: &FpQuadSpace, j: &[u64]) -> bool {
        match &self.u_bar {
            None => true,
            Some(u) => u.iter().all(|x| space.b(x, j) == 0),
        }
    }
}

/// Isotropic lines of `N/pN` that are W-generic (and of type `U`, if given).
pub fn w_generic_lines(
    n: &QuadLattice,
    w: &IntMatrix,
    u: Option<&IntMatrix>,
    p: u64,
    max_points: u64,
) -> Result<Vec<ProjLine>> {
    let data = GenericityData::new(n, w, u, p)?;
    generic_lines_for(n, &data, p, max_points)
}

fn generic_lines_for(
    n: &QuadLattice,
    data: &GenericityData,
    p: u64,
    max_points: u64,
) -> Result<Vec<ProjLine>> {
    let space = FpQuadSpace::reduction(n, p)?;
    Ok(space
        .enumerate_isotropic_lines(max_points)?
        .into_iter()
        .filter(|l| {
            let j = l.generator();
            space.is_smooth_point(j) && data.is_generic(&space, j) && data.has_type(&space, j)
        })
        .collect())
}

fn check_shrink_preconditions(
    n: &QuadLattice,
    w: &IntMatrix,
    w_tilde: &IntMatrix,
    p: u64,
) -> Result<GenericityData> {
    require_self_dual(n, p)?;
    let data = GenericityData::from_tilde(n, w, w_tilde, p)?;
    let r = w.cols();
    if 2 * r + 3 > n.rank() {
        return Err(Error::pre(format!(
            "rank(W) = {r} exceeds (rank(N) − 3)/2 for rank(N) = {}",
            n.rank()
        )));
    }
    if n.restrict(w)?.det().is_zero() {
        return Err(Error::pre("the form on W is degenerate"));
    }
    Ok(data)
}

/// `{Ñ neighbor of N : Ñ ∩ W[1/p] = W̃}`, as the image of the W-generic
/// lines of type `Ū = W̃/pW`. Sorted.
pub fn shrink_set(
    n: &QuadLattice,
    w: &IntMatrix,
    w_tilde: &IntMatrix,
    p: u64,
    max_points: u64,
) -> Result<Vec<PLattice>> {
    let data = check_shrink_preconditions(n, w, w_tilde, p)?;
    let mut out = generic_lines_for(n, &data, p, max_points)?
        .iter()
        .map(|l| lattice_from_line(n, l, p))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// The same set as [`shrink_set`], by filtering every neighbor of `N`
/// through `Ñ ∩ W[1/p] = W̃` directly.
pub fn shrink_set_by_filter(
    n: &QuadLattice,
    w: &IntMatrix,
    w_tilde: &IntMatrix,
    p: u64,
    max_points: u64,
) -> Result<Vec<PLattice>> {
    check_shrink_preconditions(n, w, w_tilde, p)?;
    let target = ScaledLattice::integral(w_tilde);
    let mut out = Vec::new();
    for nb in enumerate_neighbors(n, p, max_points)? {
        if nb.lattice.intersect_span(w)? == target {
            out.push(nb.lattice);
        }
    }
    out.sort();
    Ok(out)
}

/// Every neighbor of `Ñ` (itself self-dual at `p`), in ambient coordinates.
pub fn neighbors_of(nt: &PLattice, max_points: u64) -> Result<Vec<PLattice>> {
    let local = nt.quad_lattice()?;
    require_self_dual(&local, nt.p())?;
    enumerate_neighbors(&local, nt.p(), max_points)?
        .iter()
        .map(|nb| nt.embed_local(&nb.lattice))
        .collect()
}

/// The unique self-dual `N′` adjacent to `Ñ` with `N′ ∩ W[1/p] = W`.
/// More or fewer than one survivor is reported as an invariant violation.
pub fn recover_lattice(nt: &PLattice, w: &IntMatrix, max_points: u64) -> Result<PLattice> {
    let (survivors, _) = recover_candidates(nt, w, max_points)?;
    match survivors.len() {
        1 => Ok(survivors.into_iter().next().expect("one")),
        k => Err(Error::InvariantViolation(format!(
            "{k} self-dual neighbors meet W[1/p] in W (expected exactly 1)"
        ))),
    }
}

/// Survivors of the recovery filter and the number of neighbors examined.
pub fn recover_candidates(
    nt: &PLattice,
    w: &IntMatrix,
    max_points: u64,
) -> Result<(Vec<PLattice>, usize)> {
    require_summand(nt.ambient(), w, "W")?;
    if !nt.is_neighbor() {
        return Err(Error::pre(
            "lattice is not a self-dual p-neighbor of its ambient",
        ));
    }
    let target = ScaledLattice::integral(w);
    let all = neighbors_of(nt, max_points)?;
    let examined = all.len();
    let mut survivors = Vec::new();
    for cand in all {
        if cand.intersect_span(w)? == target {
            survivors.push(cand);
        }
    }
    Ok((survivors, examined))
}

/// Point counts for the typed-line scheme of `(W, U)`: isotropic lines in
/// `U^⊥` that are W-generic of type `U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangCount {
    pub fp_points: u64,
    /// Lines over `Z/p²`: primitive isotropic vectors mod `p²` in `U^⊥`
    /// with generic reduction, divided by `|(Z/p²)^×|`.
    pub zp2_points: u64,
    /// `rank(U^⊥) − 2`.
    pub fiber_exponent: u32,
}

impl LangCount {
    pub fn holds(&self, p: u64) -> bool {
        Some(self.zp2_points)
            == p.checked_pow(self.fiber_exponent)
                .map(|f| f * self.fp_points)
    }
}

/// Exhaustive count over `(Z/p²)^n`.
pub fn lang_count(
    n: &QuadLattice,
    w: &IntMatrix,
    u: Option<&IntMatrix>,
    p: u64,
    max_points: u64,
) -> Result<LangCount> {
    let data = GenericityData::new(n, w, u, p)?;
    let space = FpQuadSpace::reduction(n, p)?;
    let fp_points = generic_lines_for(n, &data, p, max_points)?.len() as u64;
    let dim = n.rank();
    let p2 = p * p;
    let total = checked_pow(p2, dim).filter(|&t| t <= max_points.saturating_mul(p2));
    let Some(total) = total else {
        return Err(Error::GuardExceeded {
            what: "vectors mod p²",
            needed: u128::MAX,
            limit: max_points as u128,
        });
    };
    let h = small_matrix(n.half_gram())?;
    let g = small_matrix(&n.gram())?;
    let u_cols: Vec<Vec<i64>> = match u {
        Some(u) => u.columns().map(|c| small_vec(&c)).collect::<Result<_>>()?,
        None => Vec::new(),
    };
    // Pairings with U as linear functionals mod p².
    let u_funcs: Vec<Vec<i64>> = u_cols
        .iter()
        .map(|c| {
            (0..dim)
                .map(|i| (0..dim).map(|j| g[i][j] * c[j]).sum::<i64>())
                .collect()
        })
        .collect();
    let m = p2 as i64;
    let mut count: u64 = 0;
    for idx in 0..total {
        let v: Vec<i64> = digits(idx, dim, p2).iter().map(|&x| x as i64).collect();
        let vbar: FpVec = v.iter().map(|&x| (x as u64) % p).collect();
        if vbar.iter().all(|&x| x == 0) {
            continue;
        }
        let mut q: i64 = 0;
        for i in 0..dim {
            for j in i..dim {
                q = (q + h[i][j] * v[i] % m * v[j]) % m;
            }
        }
        if q.rem_euclid(m) != 0 {
            continue;
        }
        if u_funcs.iter().any(|f| {
            f.iter()
                .zip(&v)
                .map(|(a, b)| a * b)
                .sum::<i64>()
                .rem_euclid(m)
                != 0
        }) {
            continue;
        }
        if data.is_generic(&space, &vbar) && data.has_type(&space, &vbar) {
            count += 1;
        }
    }
    let units = p2 - p;
    let rank_u_perp = dim - u_cols.len();
    Ok(LangCount {
        fp_points,
        zp2_points: count / units,
        fiber_exponent: (rank_u_perp as u32).saturating_sub(2),
    })
}

fn small_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| {
            x.to_i64()
                .filter(|y| y.abs() < 1 << 20)
                .ok_or_else(|| Error::Unsupported("entries too large for point counting".into()))
        })
        .collect()
}

fn small_matrix(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_rows().iter().map(|r| small_vec(r)).collect()
}

/// Group neighbors by the intersection `Ñ ∩ W[1/p]`, keyed by the canonical
/// sublattice.
pub fn neighbors_by_trace(
    n: &QuadLattice,
    w: &IntMatrix,
    p: u64,
    max_points: u64,
) -> Result<BTreeMap<ScaledLattice, Vec<PLattice>>> {
    let mut out: BTreeMap<ScaledLattice, Vec<PLattice>> = BTreeMap::new();
    for nb in enumerate_neighbors(n, p, max_points)? {
        out.entry(nb.lattice.intersect_span(w)?)
            .or_default()
            .push(nb.lattice);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_big;

    fn line(v: &[u64], p: u64) -> ProjLine {
        ProjLine::new(v, p).unwrap()
    }

    #[test]
    fn newton_lift_of_a_diagonal_point() {
        let n = QuadLattice::from_gram(&IntMatrix::diagonal(&[2, 2, 2])).unwrap();
        let v = hensel_lift_line(&n, &line(&[1, 1, 1], 3), 3, 2).unwrap();
        assert_eq!(v, to_big(&[4, 1, 1]));
        let v3 = hensel_lift_line(&n, &line(&[1, 1, 1], 3), 3, 4).unwrap();
        assert!(n.quad_value(&v3).unwrap().is_multiple_of(&BigInt::from(81)));
    }

    #[test]
    fn neighbor_counts() {
        for (lat, p, expected) in [
            (QuadLattice::hyperbolic(), 3, 2),
            (QuadLattice::hyperbolic_sum(2), 2, 9),
            (QuadLattice::hyperbolic_sum(3), 2, 35),
        ] {
            let nbs = enumerate_neighbors(&lat, p, 1_000_000).unwrap();
            assert_eq!(nbs.len(), expected);
            let mut distinct: Vec<_> = nbs.iter().map(|n| n.lattice.clone()).collect();
            distinct.sort();
            distinct.dedup();
            assert_eq!(distinct.len(), expected);
            for nb in &nbs {
                assert!(nb.lattice.is_neighbor());
                assert_eq!(line_from_lattice(&nb.lattice).unwrap(), nb.line);
            }
        }
    }

    #[test]
    fn construction_is_independent_of_choices() {
        let n = QuadLattice::hyperbolic_sum(2).orthogonal_sum(&QuadLattice::rank1(1).unwrap());
        for p in [3u64, 5] {
            for nb in enumerate_neighbors(&n, p, 1_000_000).unwrap() {
                for k in [2, 3] {
                    for seed in 0..4 {
                        let s = splitting_from_line(&n, &nb.line, p, k, seed).unwrap();
                        assert_eq!(lattice_from_splitting(&n, &s, p).unwrap(), nb.lattice);
                    }
                    let other = lattice_from_line_with_precision(&n, &nb.line, p, k).unwrap();
                    assert_eq!(other, nb.lattice);
                }
            }
        }
    }

    #[test]
    fn singular_lines_are_rejected() {
        let n = QuadLattice::hyperbolic();
        assert!(hensel_lift_line(&n, &line(&[1, 1], 3), 3, 2).is_err());
        assert!(lattice_from_line_with_precision(&n, &line(&[1, 0], 3), 3, 1).is_err());
        assert!(line_from_lattice(&PLattice::ambient_lattice(&n, 3).unwrap()).is_err());
    }

    #[test]
    fn shrink_paths_agree_and_recover() {
        let n = QuadLattice::hyperbolic_sum(3);
        let p = 2;
        let w = IntMatrix::from_rows(&[vec![1], vec![1], vec![0], vec![0], vec![0], vec![0]]);
        let w_tilde = w.scale(&BigInt::from(p));
        let a = shrink_set(&n, &w, &w_tilde, p, 1_000_000).unwrap();
        let b = shrink_set_by_filter(&n, &w, &w_tilde, p, 1_000_000).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b);
        let ambient = PLattice::ambient_lattice(&n, p).unwrap();
        for nt in &a {
            assert_eq!(
                nt.intersect_span(&w).unwrap(),
                ScaledLattice::integral(&w_tilde)
            );
            assert_eq!(recover_lattice(nt, &w, 1_000_000).unwrap(), ambient);
        }
    }

    #[test]
    fn shrink_preconditions() {
        let n = QuadLattice::hyperbolic_sum(2);
        let w = IntMatrix::from_rows(&[vec![1], vec![1], vec![0], vec![0]]);
        let wt = w.scale(&BigInt::from(2));
        assert!(shrink_set(&n, &w, &wt, 2, 1_000_000).is_err());
        let n3 = QuadLattice::hyperbolic_sum(3);
        let iso = IntMatrix::from_rows(&[vec![1], vec![0], vec![0], vec![0], vec![0], vec![0]]);
        assert!(shrink_set(&n3, &iso, &iso.scale(&BigInt::from(2)), 2, 1_000_000).is_err());
    }

    #[test]
    fn typed_line_counts_lift() {
        let n = QuadLattice::hyperbolic_sum(3);
        let w = IntMatrix::from_rows(&[vec![1], vec![1], vec![0], vec![0], vec![0], vec![0]]);
        let c = lang_count(&n, &w, None, 2, 10_000_000).unwrap();
        assert!(c.fp_points > 0);
        assert!(c.holds(2), "{c:?}");
    }
}
