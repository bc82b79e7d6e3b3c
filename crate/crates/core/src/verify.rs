//! Named verification suites. Each suite runs a family of instances against
//! an independent oracle and reports failures.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fp::field::least_nonsquare;
use crate::fp::isometry::preserves_form;
use crate::fp::linalg::{checked_pow, digits, rank as fp_rank, subspaces, FpVec};
use crate::fp::{
    is_special, nontrivial_spinor_witness, quadric_line_count, stabilizer_orbit, witt_extension,
    FpQuadSpace, WittType, DEFAULT_MAX_ELEMENTS, DEFAULT_MAX_POINTS,
};
use crate::hecke::{isogenous_polarization, k3_isogeny, PolarizedK3Lattice};
use crate::lattice::QuadLattice;
use crate::linalg::{saturate, AbelianQuotient, IntMatrix};
use crate::padic::{
    enumerate_neighbors, lang_count, lattice_from_line, lattice_from_splitting, line_from_lattice,
    recover_candidates, shrink_set, shrink_set_by_filter, splitting_from_line, w_generic_lines,
    PLattice,
};
use crate::tori::{cokernel_m, projects_onto_last, CharLattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    NeighborBijection,
    NiceCochar,
    NiceCocharUniqueness,
    WittExtension,
    CokernelM,
    K3Degree,
    LangCounts,
    Transitivity,
    SpinorSurjectivity,
    QuadricCounts,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::NeighborBijection,
        Suite::NiceCochar,
        Suite::NiceCocharUniqueness,
        Suite::WittExtension,
        Suite::CokernelM,
        Suite::K3Degree,
        Suite::LangCounts,
        Suite::Transitivity,
        Suite::SpinorSurjectivity,
        Suite::QuadricCounts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::NeighborBijection => "neighbor-bijection",
            Suite::NiceCochar => "nice-cochar",
            Suite::NiceCocharUniqueness => "nice-cochar-uniqueness",
            Suite::WittExtension => "witt-extension",
            Suite::CokernelM => "cokernel-m",
            Suite::K3Degree => "k3-degree",
            Suite::LangCounts => "lang-counts",
            Suite::Transitivity => "transitivity",
            Suite::SpinorSurjectivity => "spinor-surjectivity",
            Suite::QuadricCounts => "quadric-counts",
        }
    }

    /// Primes used when none is given.
    pub fn default_primes(self) -> &'static [u64] {
        match self {
            Suite::NeighborBijection | Suite::QuadricCounts | Suite::CokernelM => &[2, 3, 5],
            Suite::SpinorSurjectivity => &[3, 5, 7],
            _ => &[2, 3],
        }
    }

    pub fn default_max_rank(self) -> usize {
        match self {
            Suite::WittExtension => 4,
            Suite::CokernelM => 10,
            Suite::K3Degree => 22,
            _ => 6,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub primes: Option<Vec<u64>>,
    pub max_rank: Option<usize>,
    pub seed: u64,
    pub max_points: u64,
    pub max_elements: u64,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            primes: None,
            max_rank: None,
            seed: 0,
            max_points: DEFAULT_MAX_POINTS,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }
}

/// One failed instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Detail {
    pub input: String,
    pub expected: String,
    pub actual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub instances: u64,
    pub failures: u64,
    /// Failed instances, sorted by input.
    pub details: Vec<Detail>,
}

impl VerifyReport {
    fn new(suite: Suite) -> Self {
        VerifyReport {
            suite,
            instances: 0,
            failures: 0,
            details: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }

    fn check(
        &mut self,
        input: impl Fn() -> String,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
        ok: bool,
    ) {
        self.instances += 1;
        if !ok {
            self.failures += 1;
            self.details.push(Detail {
                input: input(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    fn check_eq<T: PartialEq + fmt::Debug>(
        &mut self,
        input: impl Fn() -> String,
        expected: T,
        actual: T,
    ) {
        let ok = expected == actual;
        self.check(input, format!("{expected:?}"), format!("{actual:?}"), ok);
    }

    fn check_result<T>(
        &mut self,
        input: impl Fn() -> String,
        expected: &str,
        r: Result<T>,
        ok: impl FnOnce(&T) -> bool,
    ) {
        match r {
            Ok(v) => {
                let good = ok(&v);
                self.check(
                    input,
                    expected,
                    if good { expected } else { "check failed" },
                    good,
                );
            }
            Err(e) => self.check(input, expected, format!("error: {e}"), false),
        }
    }

    fn finish(mut self) -> Self {
        self.details.sort();
        self
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "instances": self.instances,
            "failures": self.failures,
            "passed": self.passed(),
            "details": self.details.iter().map(|d| json!({
                "input": d.input,
                "expected": d.expected,
                "actual": d.actual,
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn run(suite: Suite, params: &VerifyParams) -> Result<VerifyReport> {
    let primes: Vec<u64> = match &params.primes {
        Some(ps) => ps.clone(),
        None => suite.default_primes().to_vec(),
    };
    for &p in &primes {
        crate::fp::field::check_prime(p)?;
    }
    let max_rank = params.max_rank.unwrap_or(suite.default_max_rank());
    let report = match suite {
        Suite::NeighborBijection => neighbor_bijection(&primes, max_rank, params)?,
        Suite::NiceCochar => nice_cochar(&primes, max_rank, params)?,
        Suite::NiceCocharUniqueness => nice_cochar_uniqueness(&primes, max_rank, params)?,
        Suite::WittExtension => witt_extension_suite(&primes, max_rank)?,
        Suite::CokernelM => cokernel_suite(&primes, max_rank, params.seed)?,
        Suite::K3Degree => k3_degree(&primes)?,
        Suite::LangCounts => lang_counts(&primes, max_rank, params)?,
        Suite::Transitivity => transitivity(&primes, max_rank, params)?,
        Suite::SpinorSurjectivity => spinor_surjectivity(&primes, max_rank, params)?,
        Suite::QuadricCounts => quadric_counts(&primes, max_rank, params)?,
    };
    Ok(report.finish())
}

fn small_rows(l: &QuadLattice) -> Vec<Vec<i64>> {
    l.half_gram()
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().expect("small form")).collect())
        .collect()
}

/// Isotropic lines of `h mod p`, counted by direct enumeration of `F_p^n`.
fn brute_isotropic_line_count(h: &[Vec<i64>], p: u64) -> u64 {
    let n = h.len();
    let total = checked_pow(p, n).expect("small");
    let pi = p as i64;
    let mut count = 0;
    for idx in 1..total {
        let v: Vec<i64> = digits(idx, n, p).iter().map(|&x| x as i64).collect();
        let mut q = 0i64;
        for i in 0..n {
            for j in i..n {
                q = (q + h[i][j].rem_euclid(pi) * v[i] % pi * v[j]) % pi;
            }
        }
        if q == 0 {
            count += 1;
        }
    }
    count / (p - 1)
}

fn hyperbolic_lattices(max_rank: usize) -> Vec<(String, QuadLattice)> {
    (1..=max_rank / 2)
        .map(|k| (format!("h^{k}"), QuadLattice::hyperbolic_sum(k)))
        .collect()
}

fn neighbor_bijection(
    primes: &[u64],
    max_rank: usize,
    params: &VerifyParams,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::NeighborBijection);
    for (name, n) in hyperbolic_lattices(max_rank.min(6)) {
        for &p in primes {
            let tag = |extra: &str| format!("N={name} p={p}{extra}");
            let nbs = enumerate_neighbors(&n, p, params.max_points)?;
            let brute = brute_isotropic_line_count(&small_rows(&n), p);
            rep.check_eq(|| tag(" count"), brute, nbs.len() as u64);
            let distinct: BTreeSet<&PLattice> = nbs.iter().map(|x| &x.lattice).collect();
            rep.check_eq(|| tag(" distinct"), nbs.len(), distinct.len());
            for nb in &nbs {
                let g = nb.line.generator().to_vec();
                let input = || tag(&format!(" line={g:?}"));
                let back = line_from_lattice(&nb.lattice);
                rep.check_result(input, "line → lattice → line", back, |l| *l == nb.line);
                let again =
                    line_from_lattice(&nb.lattice).and_then(|l| lattice_from_line(&n, &l, p));
                rep.check_result(input, "lattice → line → lattice", again, |l| {
                    *l == nb.lattice
                });
                let other = splitting_from_line(&n, &nb.line, p, 3, 1)
                    .and_then(|s| lattice_from_splitting(&n, &s, p));
                rep.check_result(input, "splitting route agrees", other, |l| *l == nb.lattice);
            }
        }
    }
    Ok(rep)
}

/// A rank-one summand `W = Z·w` of `H^k` and its index-p sublattice `pW`.
#[derive(Clone, Debug)]
pub struct CocharInstance {
    pub lattice: QuadLattice,
    pub lattice_name: String,
    pub w: Vec<BigInt>,
    pub p: u64,
}

impl CocharInstance {
    pub fn w_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.lattice.rank(), std::slice::from_ref(&self.w)).expect("shape")
    }

    pub fn w_tilde(&self) -> IntMatrix {
        self.w_matrix().scale(&BigInt::from(self.p))
    }

    fn describe(&self) -> String {
        format!(
            "N={} p={} w={:?}",
            self.lattice_name,
            self.p,
            self.w.iter().map(|x| x.to_string()).collect::<Vec<_>>()
        )
    }
}

const COCHAR_VALUES: [i64; 6] = [1, -1, 2, -2, 3, -3];

/// `e₁ + m·f₁` for each `m` in the value set, plus seeded random primitive
/// vectors of `H³` with the same values.
pub fn cochar_instances(primes: &[u64], max_rank: usize, seed: u64) -> Vec<CocharInstance> {
    let mut out = Vec::new();
    let k = (max_rank / 2).min(3);
    if k < 3 {
        return out;
    }
    let n = QuadLattice::hyperbolic_sum(k);
    let name = format!("h^{k}");
    let mut vectors: Vec<Vec<BigInt>> = Vec::new();
    for m in COCHAR_VALUES {
        let mut w = n.zero_vector();
        w[0] = BigInt::one();
        w[1] = BigInt::from(m);
        vectors.push(w);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in COCHAR_VALUES {
        let mut found = 0;
        while found < 2 {
            let v: Vec<BigInt> = (0..2 * k)
                .map(|_| BigInt::from(rng.gen_range(-3i64..=3)))
                .collect();
            let content = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if content.is_one() && n.quad_value(&v).expect("shape") == BigInt::from(m) {
                vectors.push(v);
                found += 1;
            }
        }
    }
    for &p in primes {
        for w in &vectors {
            out.push(CocharInstance {
                lattice: n.clone(),
                lattice_name: name.clone(),
                w: w.clone(),
                p,
            });
        }
    }
    out
}

fn nice_cochar(primes: &[u64], max_rank: usize, params: &VerifyParams) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::NiceCochar);
    for inst in cochar_instances(primes, max_rank, params.seed) {
        let (w, wt) = (inst.w_matrix(), inst.w_tilde());
        let typed = shrink_set(&inst.lattice, &w, &wt, inst.p, params.max_points);
        let filtered = shrink_set_by_filter(&inst.lattice, &w, &wt, inst.p, params.max_points);
        match (typed, filtered) {
            (Ok(a), Ok(b)) => {
                let ok = a == b && !a.is_empty();
                rep.check(
                    || inst.describe(),
                    format!("{} lattices (filter)", b.len()),
                    format!("{} lattices (typed lines), equal={}", a.len(), a == b),
                    ok,
                );
            }
            (a, b) => rep.check(
                || inst.describe(),
                "both paths succeed",
                format!("{:?} / {:?}", a.err(), b.err()),
                false,
            ),
        }
    }
    Ok(rep)
}

fn nice_cochar_uniqueness(
    primes: &[u64],
    max_rank: usize,
    params: &VerifyParams,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::NiceCocharUniqueness);
    for inst in cochar_instances(primes, max_rank, params.seed) {
        let (w, wt) = (inst.w_matrix(), inst.w_tilde());
        let fiber = shrink_set(&inst.lattice, &w, &wt, inst.p, params.max_points)?;
        let ambient = PLattice::ambient_lattice(&inst.lattice, inst.p)?;
        for nt in &fiber {
            let input = || format!("{} Ñ={:?}", inst.describe(), nt.numerator().to_rows());
            match recover_candidates(nt, &w, params.max_points) {
                Ok((survivors, _)) => {
                    let ok = survivors.len() == 1 && survivors[0] == ambient;
                    rep.check(
                        input,
                        "exactly one survivor, equal to N",
                        format!(
                            "{} survivors, first is N: {}",
                            survivors.len(),
                            survivors.first() == Some(&ambient)
                        ),
                        ok,
                    );
                }
                Err(e) => rep.check(input, "exactly one survivor", format!("error: {e}"), false),
            }
        }
    }
    Ok(rep)
}

/// Representatives of every isometry class of nondegenerate quadratic
/// spaces of dimension `1..=max_dim` over `F_p`.
pub fn nondegenerate_spaces(
    p: u64,
    max_dim: usize,
) -> Result<Vec<(String, FpQuadSpace, WittType)>> {
    let mut out = Vec::new();
    for n in 1..=max_dim {
        let m = n / 2;
        if p == 2 {
            let anisotropic_plane = FpQuadSpace::new(2, vec![vec![1, 1], vec![0, 1]])?;
            if n % 2 == 1 {
                let mut s = FpQuadSpace::diagonal(2, &[1])?;
                if m > 0 {
                    s = s.orthogonal_sum(&FpQuadSpace::hyperbolic(2, m)?)?;
                }
                out.push((format!("x²⊥H^{m}"), s, WittType::Odd));
            } else {
                out.push((
                    format!("H^{m}"),
                    FpQuadSpace::hyperbolic(2, m)?,
                    WittType::Split,
                ));
                let mut s = anisotropic_plane;
                if m > 1 {
                    s = s.orthogonal_sum(&FpQuadSpace::hyperbolic(2, m - 1)?)?;
                }
                out.push((format!("N⊥H^{}", m - 1), s, WittType::NonSplit));
            }
        } else {
            let e = least_nonsquare(p);
            let mut ones = vec![1u64; n];
            out.push((
                format!("diag(1^{n})"),
                FpQuadSpace::diagonal(p, &ones)?,
                WittType::Odd,
            ));
            ones[n - 1] = e;
            let name = if n == 1 {
                format!("diag({e})")
            } else {
                format!("diag(1^{},{e})", n - 1)
            };
            out.push((name, FpQuadSpace::diagonal(p, &ones)?, WittType::Odd));
        }
    }
    // Odd-p even-dimensional types come from the discriminant.
    for (_, s, kind) in out.iter_mut() {
        if p != 2 && s.dim() % 2 == 0 {
            *kind = if s.has_square_discriminant()? {
                WittType::Split
            } else {
                WittType::NonSplit
            };
        }
    }
    Ok(out)
}

fn witt_extension_suite(primes: &[u64], max_dim: usize) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::WittExtension);
    for &p in primes {
        for (name, space, _) in nondegenerate_spaces(p, max_dim)? {
            let n = space.dim();
            if n < 2 {
                continue;
            }
            for k in 0..=n - 2 {
                let subs = subspaces(n, k, p);
                let mats = checked_pow(p, k * k).expect("small");
                for s1 in &subs {
                    for s2 in &subs {
                        for idx in 0..mats {
                            let a = digits(idx, k * k, p);
                            let a: Vec<Vec<u64>> =
                                (0..k).map(|i| a[i * k..(i + 1) * k].to_vec()).collect();
                            if fp_rank(&a, p) != k {
                                continue;
                            }
                            let images: Vec<FpVec> =
                                a.iter().map(|row| space.combine(s2, row)).collect();
                            let isometric = (0..k).all(|i| {
                                space.q(&images[i]) == space.q(&s1[i])
                                    && (i + 1..k).all(|j| {
                                        space.b(&images[i], &images[j]) == space.b(&s1[i], &s1[j])
                                    })
                            });
                            if !isometric {
                                continue;
                            }
                            let input = || format!("p={p} V={name} W1={s1:?} images={images:?}");
                            match witt_extension(&space, s1, &images) {
                                Ok(g) => {
                                    let ok = preserves_form(&space, g.matrix())
                                        && is_special(&space, &g)
                                        && s1.iter().zip(&images).all(|(x, y)| g.apply(x, p) == *y);
                                    rep.check(
                                        input,
                                        "verified SO extension",
                                        "extension failed verification",
                                        ok,
                                    );
                                }
                                Err(e) => {
                                    rep.check(input, "SO extension", format!("error: {e}"), false)
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// A random direct summand `W ⊂ Z^{1+b+1}` projecting onto the weight-1
/// coordinate, with `Z·e₋₁ + W` a direct summand of rank `rank W + 1`.
pub fn random_cokernel_instance(rng: &mut ChaCha8Rng, b: usize) -> IntMatrix {
    let n = b + 2;
    loop {
        let r = rng.gen_range(1..=n - 1);
        let cols: Vec<Vec<BigInt>> = (0..r)
            .map(|_| {
                (0..n)
                    .map(|_| BigInt::from(rng.gen_range(-3i64..=3)))
                    .collect()
            })
            .collect();
        let Ok(m) = IntMatrix::from_columns(n, &cols) else {
            continue;
        };
        let Ok(sat) = saturate(n, &m) else { continue };
        if sat.basis.cols() != r || !projects_onto_last(&sat.basis) {
            continue;
        }
        let mut e = vec![BigInt::zero(); n];
        e[0] = BigInt::one();
        let with_e = IntMatrix::from_columns(n, &[e])
            .expect("shape")
            .hstack(&sat.basis)
            .expect("shape");
        match saturate(n, &with_e) {
            Ok(s) if s.is_direct_summand && s.basis.cols() == r + 1 => return sat.basis,
            _ => continue,
        }
    }
}

pub const COKERNEL_INSTANCES: usize = 200;

fn cokernel_suite(primes: &[u64], max_rank: usize, seed: u64) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::CokernelM);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_b = max_rank.saturating_sub(2).clamp(1, 8);
    for i in 0..COKERNEL_INSTANCES {
        let p = primes[i % primes.len()];
        let b = rng.gen_range(1..=max_b);
        let w = random_cokernel_instance(&mut rng, b);
        let input = || format!("#{i:03} p={p} b={b} W={:?}", w.to_rows());
        match cokernel_m(&CharLattice::split(1, b, 1), &w, p) {
            Ok(out) => {
                let ok = out.inj1_index == BigInt::from(p) && out.inj1_injective && out.iso2;
                rep.check(
                    input,
                    format!("index {p}, injective, iso2"),
                    format!(
                        "index {}, injective {}, iso2 {}",
                        out.inj1_index, out.inj1_injective, out.iso2
                    ),
                    ok,
                );
            }
            Err(e) => rep.check(input, "index p", format!("error: {e}"), false),
        }
    }
    Ok(rep)
}

/// `Z/m` computed independently: the discriminant group of `ξ^⊥`.
fn perp_discriminant(k: &PolarizedK3Lattice) -> Result<AbelianQuotient> {
    let col = IntMatrix::from_columns(k.lattice.rank(), std::slice::from_ref(&k.xi))?;
    k.lattice
        .orthogonal_complement(&col)?
        .lattice()
        .discriminant_group()
}

fn k3_degree(primes: &[u64]) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::K3Degree);
    let base_signature = QuadLattice::k3().signature()?;
    for &p in primes {
        for d in 1..=5u64 {
            let input = || format!("d={d} p={p}");
            let out = match k3_isogeny(d, p) {
                Ok(o) => o,
                Err(e) => {
                    rep.check(input, "construction succeeds", format!("error: {e}"), false);
                    continue;
                }
            };
            let p2d = BigInt::from(p * p * d);
            rep.check_eq(
                || format!("{} unimodular", input()),
                BigInt::one(),
                out.lattice.det().abs(),
            );
            rep.check_eq(|| format!("{} even", input()), true, out.is_even());
            rep.check_eq(
                || format!("{} signature", input()),
                base_signature,
                out.lattice.signature()?,
            );
            rep.check_eq(|| format!("{} degree", input()), p2d.clone(), out.degree());
            rep.check_eq(
                || format!("{} primitive", input()),
                true,
                out.is_primitive(),
            );
            rep.check_eq(
                || format!("{} ξ⊥ discriminant", input()),
                AbelianQuotient::cyclic(&p2d * 2),
                perp_discriminant(&out)?,
            );
            let twice = isogenous_polarization(&out, p)?;
            rep.check_eq(
                || format!("{} repeated degree", input()),
                BigInt::from(p.pow(4) * d),
                twice.degree(),
            );
        }
    }
    Ok(rep)
}

fn lang_counts(primes: &[u64], max_rank: usize, params: &VerifyParams) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::LangCounts);
    for (name, n) in hyperbolic_lattices(max_rank.min(6)) {
        if n.rank() < 4 {
            continue;
        }
        for &p in primes {
            for m in [0i64, 1, 2, 3, -1] {
                let mut w = n.zero_vector();
                w[0] = BigInt::one();
                w[1] = BigInt::from(m);
                let wm = IntMatrix::from_columns(n.rank(), &[w])?;
                let input = || format!("N={name} p={p} w=e1+{m}f1");
                let budget = params.max_points.max(10_000_000);
                rep.check_result(
                    input,
                    "|Z/p² points| = |F_p points|·p^(rank U⊥ − 2)",
                    lang_count(&n, &wm, None, p, budget),
                    |c| c.holds(p) && c.fp_points > 0,
                );
            }
        }
    }
    Ok(rep)
}

fn transitivity(primes: &[u64], max_rank: usize, params: &VerifyParams) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::Transitivity);
    for inst in cochar_instances(primes, max_rank, params.seed) {
        let w = inst.w_matrix();
        let lines = w_generic_lines(&inst.lattice, &w, None, inst.p, params.max_points)?;
        let space = FpQuadSpace::reduction(&inst.lattice, inst.p)?;
        let wbar: Vec<FpVec> = vec![inst
            .w
            .iter()
            .map(|x| {
                x.mod_floor(&BigInt::from(inst.p))
                    .to_u64()
                    .expect("reduced")
            })
            .collect()];
        for seed in &lines {
            let input = || format!("{} seed={:?}", inst.describe(), seed.generator());
            match stabilizer_orbit(&space, &wbar, seed, &lines, params.max_elements) {
                Ok(orbit) => rep.check(
                    input,
                    format!("{} lines", lines.len()),
                    format!("{} lines", orbit.len()),
                    orbit == lines,
                ),
                Err(e) => rep.check(input, "orbit", format!("error: {e}"), false),
            }
        }
    }
    Ok(rep)
}

fn spinor_surjectivity(
    primes: &[u64],
    max_rank: usize,
    params: &VerifyParams,
) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::SpinorSurjectivity);
    let mut lattices: Vec<(String, QuadLattice)> = hyperbolic_lattices(max_rank.min(6));
    for k in 1..=2 {
        let name = format!("h^{k}+a1^2");
        let l = QuadLattice::direct_sum(&[
            QuadLattice::hyperbolic_sum(k),
            QuadLattice::rank1(1)?,
            QuadLattice::rank1(1)?,
        ]);
        if l.rank() <= max_rank {
            lattices.push((name, l));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for &p in primes {
        if p == 2 {
            continue;
        }
        for (name, n) in &lattices {
            let dim = n.rank();
            let space = FpQuadSpace::reduction(n, p)?;
            let mut summands: Vec<IntMatrix> = Vec::new();
            for r in 1..=dim.saturating_sub(3).min(2) {
                // A totally isotropic summand spanned by the first vectors
                // of the leading hyperbolic planes.
                if 2 * r <= dim {
                    let cols: Vec<Vec<BigInt>> = (0..r).map(|i| n.unit_vector(2 * i)).collect();
                    summands.push(IntMatrix::from_columns(dim, &cols)?);
                }
                let mut tries = 0;
                let mut found = 0;
                while found < 6 && tries < 1000 {
                    tries += 1;
                    let cols: Vec<Vec<BigInt>> = (0..r)
                        .map(|_| {
                            (0..dim)
                                .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                                .collect()
                        })
                        .collect();
                    let m = IntMatrix::from_columns(dim, &cols)?;
                    let Ok(sat) = saturate(dim, &m) else { continue };
                    if !sat.is_direct_summand || sat.basis.cols() != r {
                        continue;
                    }
                    summands.push(sat.basis);
                    found += 1;
                }
            }
            for w in summands {
                let wbar = reduce_columns(&w, p);
                let input = || format!("N={name} p={p} W={:?}", w.to_rows());
                match nontrivial_spinor_witness(&space, &wbar, params.max_elements) {
                    Ok(Some(_)) => rep.check(input, "witness", "witness", true),
                    Ok(None) => rep.check(input, "witness", "none found", false),
                    Err(e) => rep.check(input, "witness", format!("error: {e}"), false),
                }
            }
        }
    }
    Ok(rep)
}

fn reduce_columns(m: &IntMatrix, p: u64) -> Vec<FpVec> {
    let pb = BigInt::from(p);
    m.columns()
        .map(|c| {
            c.iter()
                .map(|x| x.mod_floor(&pb).to_u64().expect("reduced"))
                .collect()
        })
        .collect()
}

fn quadric_counts(primes: &[u64], max_dim: usize, params: &VerifyParams) -> Result<VerifyReport> {
    let mut rep = VerifyReport::new(Suite::QuadricCounts);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for &p in primes {
        let mut spaces = nondegenerate_spaces(p, max_dim)?;
        // Random nondegenerate forms, classified by the library.
        for n in 1..=max_dim {
            let mut added = 0;
            while added < 3 {
                let h: Vec<Vec<u64>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| if j >= i { rng.gen_range(0..p) } else { 0 })
                            .collect()
                    })
                    .collect();
                let s = FpQuadSpace::new(p, h)?;
                if let Ok(kind) = s.witt_type() {
                    spaces.push((format!("random {:?}", s.half_gram()), s, kind));
                    added += 1;
                }
            }
        }
        for (name, space, kind) in spaces {
            let input = || format!("p={p} V={name}");
            let lines = space.enumerate_isotropic_lines(params.max_points)?;
            let h: Vec<Vec<i64>> = space
                .half_gram()
                .iter()
                .map(|r| r.iter().map(|&x| x as i64).collect())
                .collect();
            let brute = brute_isotropic_line_count(&h, p) as u128;
            let formula = quadric_line_count(p, space.dim(), kind);
            rep.check_eq(
                || format!("{} formula", input()),
                formula,
                lines.len() as u128,
            );
            rep.check_eq(
                || format!("{} brute force", input()),
                brute,
                lines.len() as u128,
            );
            rep.check_eq(|| format!("{} type", input()), kind, space.witt_type()?);
        }
    }
    Ok(rep)
}
