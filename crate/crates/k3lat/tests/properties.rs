use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use k3lat::exact_linalg::{hermite_normal_form, hnf_rows, rank, saturate, smith_normal_form};
use k3lat::qforms::{
    brute_force_isomorphic, canonical_key, jordan_normal_form, lattice_symbol, parse_symbol, signature_mod8,
    symbols_equivalent, FiniteQuadraticForm,
};
use k3lat::roots::{ade_lattice, Family};
use k3lat::{IntMatrix, Lattice};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-9i64..=9, rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<i64>> = v.chunks(cols).map(<[i64]>::to_vec).collect();
        IntMatrix::from_rows(&rows)
    })
}

fn shape() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c))
}

fn component() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        (1usize..=7).prop_map(|n| (Family::A, n)),
        (4usize..=7).prop_map(|n| (Family::D, n)),
        (6usize..=7).prop_map(|n| (Family::E, n)),
    ]
}

/// Orthogonal sums of up to three ADE lattices with a discriminant group of order at most 2^12.
fn ade_sum() -> impl Strategy<Value = Lattice> {
    prop::collection::vec(component(), 1..=3).prop_filter_map("group too large", |parts| {
        let mut l = Lattice::zero();
        for (f, n) in parts {
            l = l.direct_sum(&ade_lattice(f, n).unwrap());
        }
        (l.determinant().abs() <= BigInt::from(1 << 12)).then_some(l)
    })
}

fn is_diagonal_chain(d: &IntMatrix) -> bool {
    let n = d.rows().min(d.cols());
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            if i != j && !d.get(i, j).is_zero() {
                return false;
            }
        }
    }
    (0..n).all(|i| !d.get(i, i).is_negative())
        && (1..n).all(|i| {
            let (a, b) = (d.get(i - 1, i - 1), d.get(i, i));
            if a.is_zero() {
                b.is_zero()
            } else {
                (b % a).is_zero()
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_is_idempotent(m in shape()) {
        let (h, u) = hermite_normal_form(&m);
        prop_assert_eq!(u.mul(&m).unwrap(), h.clone());
        prop_assert!(u.determinant().unwrap().abs().is_one());
        let once = hnf_rows(&m);
        prop_assert_eq!(hnf_rows(&once), once.clone());
        prop_assert_eq!(once.rows(), rank(&m));
    }

    #[test]
    fn snf_keeps_the_determinant(m in (1usize..=4).prop_flat_map(|n| matrix(n, n))) {
        let (d, u, v) = smith_normal_form(&m);
        prop_assert_eq!(u.mul(&m).unwrap().mul(&v).unwrap(), d.clone());
        prop_assert!(is_diagonal_chain(&d));
        let prod: BigInt = (0..d.rows()).map(|i| d.get(i, i).clone()).product();
        prop_assert_eq!(prod, m.determinant().unwrap().abs());
    }

    #[test]
    fn saturation_is_idempotent(m in shape()) {
        let s = saturate(&m.row_vecs(), m.cols()).unwrap();
        let again = saturate(&s.row_vecs(), m.cols()).unwrap();
        prop_assert_eq!(hnf_rows(&again), hnf_rows(&s));
        prop_assert_eq!(s.rows(), rank(&m));
        // A saturated basis has all invariant factors equal to one.
        if s.rows() > 0 {
            let (d, _, _) = smith_normal_form(&s);
            prop_assert!((0..s.rows()).all(|i| d.get(i, i).is_one()));
        }
    }

    #[test]
    fn symbols_round_trip(l in ade_sum()) {
        let s = lattice_symbol(&l).unwrap();
        let back = parse_symbol(&s.to_string()).unwrap();
        prop_assert_eq!(&back, &s);
        let n = l.rank() as u8 % 8;
        prop_assert_eq!(signature_mod8(&s), (8 - n) % 8);
    }

    #[test]
    fn jordan_of_from_symbol_matches(l in ade_sum()) {
        let q = FiniteQuadraticForm::from_lattice(&l).unwrap();
        let s = jordan_normal_form(&q);
        let rebuilt = FiniteQuadraticForm::from_symbol(&s).unwrap();
        prop_assert_eq!(canonical_key(&jordan_normal_form(&rebuilt)), canonical_key(&s));
        prop_assert!(brute_force_isomorphic(&rebuilt, &q, 1 << 12).unwrap());
    }

    #[test]
    fn negation_is_an_involution(l in ade_sum()) {
        let s = lattice_symbol(&l).unwrap();
        prop_assert_eq!(s.negated().negated(), s.clone());
        let q = FiniteQuadraticForm::from_lattice(&l).unwrap();
        prop_assert!(brute_force_isomorphic(&q.negate().negate(), &q, 1 << 12).unwrap());
        let neg = jordan_normal_form(&q.negate());
        prop_assert!(symbols_equivalent(&neg, &s.negated()));
    }

    #[test]
    fn direct_sums_agree(a in component(), b in component()) {
        let (la, lb) = (ade_lattice(a.0, a.1).unwrap(), ade_lattice(b.0, b.1).unwrap());
        let (qa, qb) = (FiniteQuadraticForm::from_lattice(&la).unwrap(), FiniteQuadraticForm::from_lattice(&lb).unwrap());
        let whole = FiniteQuadraticForm::from_lattice(&la.direct_sum(&lb)).unwrap();
        let parts = qa.direct_sum(&qb).unwrap();
        prop_assert!(brute_force_isomorphic(&whole, &parts, 1 << 12).unwrap());
        let summed = jordan_normal_form(&qa).sum(&jordan_normal_form(&qb));
        prop_assert!(symbols_equivalent(&summed, &jordan_normal_form(&whole)));
    }
}
