use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use quadlat::fp::{FpQuadSpace, ProjLine};
use quadlat::hecke::k3_isogeny;
use quadlat::io;
use quadlat::linalg::{
    column_hnf_basis, contains, hermite_normal_form, lattice_intersection, rank, same_lattice,
    smith_normal_form, IntMatrix,
};
use quadlat::padic::{enumerate_neighbors, lattice_from_line, line_from_lattice};
use quadlat::QuadLattice;

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<i64>> = v.chunks(cols).map(<[i64]>::to_vec).collect();
        IntMatrix::from_rows(&rows)
    })
}

/// A unimodular matrix built from elementary column operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2), 0..12).prop_map(move |ops| {
        let mut t = IntMatrix::identity(n);
        for (i, j, c) in ops {
            if i != j {
                for r in 0..n {
                    let add = &t[(r, j)] * BigInt::from(c);
                    t[(r, i)] += add;
                }
            }
        }
        t
    })
}

fn gcd_of_entries(m: &IntMatrix) -> BigInt {
    m.entries().iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_diagonal_invariants(m in small_matrix(3, 4)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&(&s.u * &m) * &s.v), &s.d);
        let d = s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (&w[1] % &w[0]).is_zero());
        }
        prop_assert_eq!(d[0].clone(), gcd_of_entries(&m));
        prop_assert_eq!(s.rank(), rank(&m));
    }

    #[test]
    fn smith_product_is_determinant(m in small_matrix(3, 3)) {
        let det = m.det().unwrap().abs();
        let prod: BigInt = smith_normal_form(&m).diagonal().iter().product();
        prop_assert_eq!(prod, det);
    }

    #[test]
    fn hermite_spans_the_same_lattice(m in small_matrix(3, 4), t in unimodular(4)) {
        let h = hermite_normal_form(&m);
        prop_assert_eq!(&(&m * &h.t), &h.h);
        prop_assert!(contains(&m, &h.basis()) && contains(&h.basis(), &m));
        // Canonical form is invariant under change of generators.
        prop_assert_eq!(column_hnf_basis(&(&m * &t)), h.basis());
        prop_assert!((&m * &h.kernel()).is_zero());
    }

    #[test]
    fn intersection_is_the_common_part(
        a in small_matrix(3, 3),
        b in small_matrix(3, 3),
        probe in prop::collection::vec(prop::collection::vec(-12i64..=12, 3), 40),
    ) {
        prop_assume!(rank(&a) == 3 && rank(&b) == 3);
        let meet = lattice_intersection(&a, &b).unwrap();
        prop_assert!(contains(&a, &meet) && contains(&b, &meet));
        prop_assert_eq!(meet.cols(), 3);
        for v in probe {
            let col = IntMatrix::from_columns(3, &[v.iter().map(|&x| BigInt::from(x)).collect()]).unwrap();
            let both = contains(&a, &col) && contains(&b, &col);
            prop_assert_eq!(both, contains(&meet, &col));
        }
        prop_assert!(same_lattice(&meet, &lattice_intersection(&b, &a).unwrap()));
    }

    #[test]
    fn quadratic_form_matches_gram(h in small_matrix(4, 4), x in prop::collection::vec(-9i64..=9, 4), t in unimodular(4)) {
        let mut h = h;
        for i in 0..4 {
            for j in 0..i {
                h[(i, j)] = BigInt::zero();
            }
        }
        let l = QuadLattice::new(h).unwrap();
        let x: Vec<BigInt> = x.into_iter().map(BigInt::from).collect();
        let g = l.gram();
        let gx = g.mul_vec(&x).unwrap();
        let xgx: BigInt = x.iter().zip(&gx).map(|(a, b)| a * b).sum();
        prop_assert_eq!(l.quad_value(&x).unwrap() * 2, xgx);
        let moved = l.transform(&t).unwrap();
        prop_assert_eq!(moved.quad_value(&x).unwrap(), l.quad_value(&t.mul_vec(&x).unwrap()).unwrap());
        prop_assert_eq!(moved.det(), l.det());
    }

    #[test]
    fn lattice_json_round_trip(h in small_matrix(3, 3), big in any::<i64>()) {
        let mut h = h;
        for i in 0..3 {
            for j in 0..i {
                h[(i, j)] = BigInt::zero();
            }
        }
        h[(0, 2)] = BigInt::from(big) * BigInt::from(big) * 7;
        let l = QuadLattice::new(h).unwrap();
        let text = serde_json::to_string(&io::lattice_to_json(&l)).unwrap();
        prop_assert_eq!(io::parse_lattice(&text).unwrap(), l);
    }

    #[test]
    fn bilinear_form_is_polarization(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        h in prop::collection::vec(0u64..7, 16),
        x in prop::collection::vec(0u64..7, 4),
        y in prop::collection::vec(0u64..7, 4),
    ) {
        let rows: Vec<Vec<u64>> = h.chunks(4).map(|r| r.iter().map(|v| v % p).collect()).collect();
        let s = FpQuadSpace::new(p, rows).unwrap();
        let (x, y): (Vec<u64>, Vec<u64>) = (x.iter().map(|v| v % p).collect(), y.iter().map(|v| v % p).collect());
        let sum: Vec<u64> = x.iter().zip(&y).map(|(a, b)| (a + b) % p).collect();
        prop_assert_eq!((s.q(&sum) + 2 * p - s.q(&x) - s.q(&y)) % p, s.b(&x, &y));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn neighbor_round_trip_in_any_basis(
        planes in 1usize..=3,
        p in prop::sample::select(vec![2u64, 3, 5]),
        t in unimodular(6),
        pick in any::<prop::sample::Index>(),
    ) {
        let n = 2 * planes;
        let t = t.select_rows(&(0..n).collect::<Vec<_>>()).select_columns(&(0..n).collect::<Vec<_>>());
        prop_assume!(t.det().unwrap().abs() == BigInt::from(1));
        let lat = QuadLattice::hyperbolic_sum(planes).transform(&t).unwrap();
        let nbs = enumerate_neighbors(&lat, p, 1_000_000).unwrap();
        let expected = enumerate_neighbors(&QuadLattice::hyperbolic_sum(planes), p, 1_000_000).unwrap().len();
        prop_assert_eq!(nbs.len(), expected);
        let nb = &nbs[pick.index(nbs.len())];
        prop_assert!(nb.lattice.is_neighbor());
        let (a, b) = nb.lattice.indices_against_ambient().unwrap();
        prop_assert_eq!((a, b), (BigInt::from(p), BigInt::from(p)));
        let back: ProjLine = line_from_lattice(&nb.lattice).unwrap();
        prop_assert_eq!(&back, &nb.line);
        prop_assert_eq!(lattice_from_line(&lat, &back, p).unwrap(), nb.lattice.clone());
    }

    #[test]
    fn k3_isogeny_degree_law(d in 1u64..=40, p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let k = k3_isogeny(d, p).unwrap();
        prop_assert_eq!(k.degree(), BigInt::from(p * p * d));
        prop_assert!(k.is_primitive() && k.is_even() && k.lattice.is_unimodular());
    }
}
