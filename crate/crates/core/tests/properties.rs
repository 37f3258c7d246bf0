use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use kpgalois::cyclotomic::{sqrt_integer, CycNumber};
use kpgalois::galois_action::{build_action_table, galois_group_elements};
use kpgalois::modular_data::ModularData;
use kpgalois::rootsys::{FiniteWeight, SimpleAlgebra};

const ORDERS: &[u32] = &[1, 3, 4, 5, 8, 12, 15, 24, 36];

fn cyc() -> impl Strategy<Value = CycNumber> {
    (
        prop::sample::select(ORDERS),
        prop::collection::vec((0i64..64, -20i64..=20), 0..6),
        1i64..6,
    )
        .prop_map(|(n, terms, den)| {
            let x = CycNumber::from_exponents(n, &terms);
            x.scale(&BigRational::new(BigInt::from(1), BigInt::from(den)))
        })
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, CycNumber::zero(1));
        prop_assert_eq!(&a * &CycNumber::one(1), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inverse().unwrap(), CycNumber::one(1));
        }
    }

    #[test]
    fn embedding_is_a_homomorphism(a in cyc(), b in cyc()) {
        prop_assert!(close((&a + &b).embed(), a.embed() + b.embed()));
        prop_assert!(close((&a * &b).embed(), a.embed() * b.embed()));
        prop_assert!(close(a.conj().embed(), a.embed().conj()));
    }

    #[test]
    fn galois_automorphisms(a in cyc(), b in cyc(), i in 0usize..8, j in 0usize..8) {
        // units mod 360 = lcm of ORDERS
        let units = [1i64, 7, 11, 13, 17, 19, 23, 29];
        let (l1, l2) = (units[i], units[j]);
        prop_assert_eq!((&a * &b).galois(l1).unwrap(), &a.galois(l1).unwrap() * &b.galois(l1).unwrap());
        prop_assert_eq!((&a + &b).galois(l1).unwrap(), &a.galois(l1).unwrap() + &b.galois(l1).unwrap());
        prop_assert_eq!(a.galois(l2).unwrap().galois(l1).unwrap(), a.galois(l1 * l2).unwrap());
    }

    #[test]
    fn alcove_reduction_is_confluent(
        labels in prop::collection::vec(-30i64..30, 2),
        seed in any::<u64>(),
        m in 3i64..9,
    ) {
        for name in ["A2", "C2", "G2"] {
            let alg = SimpleAlgebra::parse(name).unwrap();
            let x = FiniteWeight(labels.clone());
            let canonical = alg.alcove_reduce(m, &x);
            let mut state = seed;
            let other = alg.alcove_reduce_with(m, &x, |choices| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                choices[(state >> 33) as usize % choices.len()]
            });
            prop_assert_eq!(&canonical, &other);
        }
    }

    #[test]
    fn weight_multiplicities_sum_to_dimension(labels in prop::collection::vec(0i64..4, 2)) {
        for name in ["A2", "B2", "G2"] {
            let alg = SimpleAlgebra::parse(name).unwrap();
            let lambda = FiniteWeight(labels.clone());
            let total: u128 = alg
                .freudenthal_multiplicities(&lambda)
                .unwrap()
                .iter()
                .map(|(mu, m)| *m as u128 * alg.orbit_size(mu) as u128)
                .sum();
            prop_assert_eq!(total, alg.weyl_dimension(&lambda));
        }
    }
}

#[test]
fn square_roots_up_to_sixty() {
    for d in 1..=60u64 {
        let r = sqrt_integer(d);
        assert_eq!(&r * &r, CycNumber::from_integer(1, d), "d = {d}");
        assert!((r.embed().re - (d as f64).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn galois_action_group_law() {
    for (name, k) in [("A1", 3), ("A2", 2), ("G2", 1)] {
        let md = ModularData::build(Arc::new(SimpleAlgebra::parse(name).unwrap()), k).unwrap();
        let n = md.order() as i64;
        let ells = galois_group_elements(&md, false);
        let acts: Vec<_> = ells.iter().map(|&l| build_action_table(&md, l).unwrap()).collect();
        let by_ell = |l: i64| acts.iter().find(|a| a.ell == l.rem_euclid(n)).unwrap();
        for a in &acts {
            for b in &acts {
                let ab = by_ell(a.ell * b.ell);
                for lambda in 0..md.len() {
                    assert_eq!(ab.perm[lambda], a.perm[b.perm[lambda]]);
                    assert_eq!(ab.signs[lambda], a.signs[b.perm[lambda]] * b.signs[lambda]);
                }
            }
        }
    }
}
