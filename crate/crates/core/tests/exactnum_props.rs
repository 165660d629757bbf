use flatblock::exactnum::{PlanarVec, QuadElem, Rational};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..200).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn elem(disc: u64) -> impl Strategy<Value = QuadElem> {
    (rational(), rational()).prop_map(move |(a, b)| QuadElem::new(a, b, disc))
}

fn triple() -> impl Strategy<Value = (QuadElem, QuadElem, QuadElem)> {
    prop::sample::select(vec![2u64, 3, 5, 7, 13]).prop_flat_map(|d| (elem(d), elem(d), elem(d)))
}

proptest! {
    #[test]
    fn ring_axioms((x, y, z) in triple()) {
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x - &y, -(&y - &x));
    }

    #[test]
    fn inverse_and_division((x, y, _z) in triple()) {
        prop_assume!(!y.is_zero());
        prop_assert_eq!(&(&x / &y) * &y, x.clone());
        prop_assert_eq!(&y * &y.inverse(), QuadElem::one());
    }

    #[test]
    fn norm_is_multiplicative((x, y, _z) in triple()) {
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(&x * &x.conjugate(), QuadElem::from_rational(x.norm()));
    }

    #[test]
    fn order_is_total_and_translation_invariant((x, y, z) in triple()) {
        let xy = x.cmp_same_field(&y);
        prop_assert_eq!(xy, y.cmp_same_field(&x).reverse());
        prop_assert_eq!((&x + &z).cmp_same_field(&(&y + &z)), xy);
        prop_assert_eq!(xy.is_eq(), x == y);
        let gap = (x.to_f64() - y.to_f64()).abs();
        if gap > 1e-6 {
            prop_assert_eq!(xy, x.to_f64().partial_cmp(&y.to_f64()).unwrap());
        }
    }

    #[test]
    fn display_round_trips((x, _y, _z) in triple()) {
        let back: QuadElem = x.to_string().parse().unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn cross_product_is_antisymmetric((a, b, c) in triple(), d in -50i64..50) {
        let u = PlanarVec::new(a.clone(), b.clone());
        let v = PlanarVec::new(c.clone(), QuadElem::from_int(d));
        prop_assert_eq!(u.cross(&v), -v.cross(&u));
        prop_assert!(u.cross(&u).is_zero());
        prop_assert_eq!(u.dot(&v), v.dot(&u));
    }
}
