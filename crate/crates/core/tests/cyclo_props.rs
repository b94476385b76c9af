use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use zalg_core::cyclo::{cyclotomic_polynomial, field_degree, CyclotomicNumber, Rational};

/// Product of coordinate vectors by long division with Phi_m over Q.
fn oracle_mul(m: u32, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let phi: Vec<Rational> = cyclotomic_polynomial(m).into_iter().map(Rational::from_integer).collect();
    let d = phi.len() - 1;
    let mut prod = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (d..prod.len()).rev() {
        let c = prod[k].clone();
        for (i, p) in phi.iter().enumerate() {
            prod[k - d + i] -= &c * p;
        }
    }
    prod.truncate(d);
    prod
}

fn rational(n: i64, d: i64, shift: u32) -> Rational {
    Rational::new(BigInt::from(n) << shift, BigInt::from(d))
}

fn element(m: u32) -> impl Strategy<Value = CyclotomicNumber> {
    let deg = field_degree(m);
    (prop::collection::vec((-1000i64..1000, 1i64..50), deg), 0u32..80)
        .prop_map(move |(cs, shift)| CyclotomicNumber::from_coords(m, cs.into_iter().map(|(n, d)| rational(n, d, shift)).collect()))
}

fn modulus() -> impl Strategy<Value = u32> {
    prop::sample::select(vec![2u32, 5, 10, 12])
}

fn triple() -> impl Strategy<Value = (CyclotomicNumber, CyclotomicNumber, CyclotomicNumber)> {
    modulus().prop_flat_map(|m| (element(m), element(m), element(m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn product_matches_polynomial_remainder((a, b, _) in triple()) {
        let m = a.modulus();
        let expect = CyclotomicNumber::from_coords(m, oracle_mul(m, &a.coords(), &b.coords()));
        prop_assert_eq!(&a * &b, expect);
    }

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert_eq!(&a + &(-&a), CyclotomicNumber::zero(a.modulus()));
    }

    #[test]
    fn inverses((a, _, _) in triple()) {
        prop_assume!(!a.is_zero());
        prop_assert!((&a * &a.inv().unwrap()).is_one());
    }

    #[test]
    fn coordinates_round_trip((a, _, _) in triple()) {
        prop_assert_eq!(CyclotomicNumber::from_coords(a.modulus(), a.coords()), a);
    }
}
