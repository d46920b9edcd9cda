use num_traits::{Signed, Zero};
use proptest::prelude::*;

use bsaks_core::catalog::{lookup, Generator, SequenceSpec};
use bsaks_core::polytope::{crosspolytope_min, grid_oracle};
use bsaks_core::{norm_exact, rat, CoordIndex, FiniteVector, Rational, SpaceDescriptor};

fn scalar() -> impl Strategy<Value = Rational> {
    (-8i64..=8, 1i64..=4).prop_map(|(p, q)| rat(p, q))
}

fn flat_vector(dims: u64) -> impl Strategy<Value = FiniteVector> {
    proptest::collection::vec((1..=dims, scalar()), 0..6)
        .prop_map(|es| {
            let mut v = FiniteVector::zero();
            for (i, x) in es {
                v.add_at(CoordIndex::flat(i), &x);
            }
            v
        })
}

fn flat_space() -> impl Strategy<Value = SpaceDescriptor> {
    prop_oneof![
        Just(SpaceDescriptor::l1()),
        Just(SpaceDescriptor::Sup),
        Just(SpaceDescriptor::Schreier),
        Just(SpaceDescriptor::C),
        (1i64..=4).prop_map(|k| SpaceDescriptor::weighted_alpha(rat(1, k))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(space in flat_space(), u in flat_vector(12), v in flat_vector(12), t in scalar()) {
        let nu = norm_exact(&space, &u).unwrap();
        prop_assert!(!nu.is_negative());
        prop_assert_eq!(nu.is_zero(), u.is_zero());
        prop_assert_eq!(norm_exact(&space, &u.scale(&t)).unwrap(), t.abs() * &nu);
        let nv = norm_exact(&space, &v).unwrap();
        prop_assert!(norm_exact(&space, &u.add(&v)).unwrap() <= nu + nv);
    }

    #[test]
    fn schreier_between_sup_and_l1(v in flat_vector(16)) {
        let s = norm_exact(&SpaceDescriptor::Schreier, &v).unwrap();
        prop_assert!(norm_exact(&SpaceDescriptor::Sup, &v).unwrap() <= s);
        prop_assert!(s <= norm_exact(&SpaceDescriptor::l1(), &v).unwrap());
    }

    #[test]
    fn cesaro_means_recover_terms(xs in proptest::collection::vec(flat_vector(6), 1..8)) {
        let spec = SequenceSpec::new(Generator::Explicit { vectors: xs.clone() }, rat(100, 1));
        let ys = spec.cesaro().prefix(xs.len() as u64 + 2);
        for n in 2..=ys.len() {
            let lhs = ys[n - 1].scale(&rat(n as i64, 1)).sub(&ys[n - 2].scale(&rat(n as i64 - 1, 1)));
            prop_assert_eq!(lhs, spec.generate(n as u64));
        }
    }

    #[test]
    fn catalog_terms_respect_bounds(k in 1u64..40) {
        for id in ["ell1-basis", "c0-basis", "schreier-basis", "c-signflip", "c0-summing", "c0-summing-flip", "omega-example:3"] {
            let e = lookup(id).unwrap();
            let n = norm_exact(&e.space, &e.spec.generate(k)).unwrap();
            prop_assert!(n <= e.spec.bound, "{} at {}", id, k);
        }
    }

    #[test]
    fn crosspolytope_scaling_and_permutation(
        space in prop_oneof![Just(SpaceDescriptor::l1()), Just(SpaceDescriptor::Sup), Just(SpaceDescriptor::Schreier)],
        vs in proptest::collection::vec(flat_vector(6), 1..4),
        t in scalar(),
    ) {
        let base = crosspolytope_min(&space, &vs).unwrap().value.exact().cloned().unwrap();
        let scaled: Vec<FiniteVector> = vs.iter().map(|v| v.scale(&t)).collect();
        let s = crosspolytope_min(&space, &scaled).unwrap().value.exact().cloned().unwrap();
        prop_assert_eq!(s, t.abs() * &base);
        let mut rev = vs.clone();
        rev.reverse();
        let r = crosspolytope_min(&space, &rev).unwrap().value.exact().cloned().unwrap();
        prop_assert_eq!(r, base.clone());
        let vertex = vs.iter().map(|v| norm_exact(&space, v).unwrap()).min().unwrap();
        prop_assert!(base <= vertex);
        let grid = grid_oracle(&space, &vs, &rat(1, 10)).unwrap().value.exact().cloned().unwrap();
        prop_assert!(base <= grid);
    }
}
