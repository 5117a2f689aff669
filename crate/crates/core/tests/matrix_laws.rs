use lawcat_core::quantale::{builtin, Quantale};
use lawcat_core::vmatrix::{check_adjunction, compose, residual_right_adjoint, VMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const QUANTALES: &[&str] = &["2", "chain3", "plus2", "plus3", "pset2"];

fn setup() -> impl Strategy<Value = (Arc<Quantale>, [usize; 4], u64)> {
    (0..QUANTALES.len(), [1usize..4, 1..4, 1..4, 1..4], any::<u64>())
        .prop_map(|(qi, dims, seed)| (Arc::new(builtin(QUANTALES[qi]).unwrap()), dims, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn composition_is_associative_and_unital((q, [a, b, c, d], seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(q.clone(), a, b, &mut rng);
        let s = VMatrix::random(q.clone(), b, c, &mut rng);
        let t = VMatrix::random(q.clone(), c, d, &mut rng);
        let left = compose(&t, &compose(&s, &r).unwrap()).unwrap();
        let right = compose(&compose(&t, &s).unwrap(), &r).unwrap();
        prop_assert_eq!(left.data(), right.data());
        let (pre, post) = (compose(&r, &VMatrix::identity(q.clone(), a)).unwrap(), compose(&VMatrix::identity(q.clone(), b), &r).unwrap());
        prop_assert_eq!(pre.data(), r.data());
        prop_assert_eq!(post.data(), r.data());
    }

    #[test]
    fn transpose_reverses_composition((q, [a, b, c, _], seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(q.clone(), a, b, &mut rng);
        let s = VMatrix::random(q.clone(), b, c, &mut rng);
        let lhs = compose(&s, &r).unwrap().transpose();
        let rhs = compose(&r.transpose(), &s.transpose()).unwrap();
        prop_assert_eq!(lhs.data(), rhs.data());
    }

    #[test]
    fn composition_preserves_joins((q, [a, b, c, _], seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(q.clone(), a, b, &mut rng);
        let r2 = VMatrix::random(q.clone(), a, b, &mut rng);
        let s = VMatrix::random(q.clone(), b, c, &mut rng);
        let lhs = compose(&s, &r.join(&r2).unwrap()).unwrap();
        let rhs = compose(&s, &r).unwrap().join(&compose(&s, &r2).unwrap()).unwrap();
        prop_assert_eq!(lhs.data(), rhs.data());
        prop_assert!(compose(&s, &r).unwrap().leq(&lhs).unwrap());
    }

    #[test]
    fn maps_are_left_adjoint_to_their_transpose((q, [a, b, _, _], seed) in setup()) {
        let f: Vec<usize> = (0..a).map(|i| (seed as usize >> (2 * i)) % b).collect();
        let m = VMatrix::from_map(q.clone(), &f, b);
        prop_assert!(check_adjunction(&m, &m.transpose()).unwrap().is_left_adjoint);
        prop_assert_eq!(m.as_map(), Some(f));
    }

    #[test]
    fn residual_is_the_largest_lax_section((q, [a, b, _, _], seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(q.clone(), a, b, &mut rng);
        let res = residual_right_adjoint(&r);
        let one = VMatrix::identity(q.clone(), b);
        prop_assert!(compose(&r, &res).unwrap().leq(&one).unwrap());
        for _ in 0..8 {
            let s = VMatrix::random(q.clone(), b, a, &mut rng);
            if compose(&r, &s).unwrap().leq(&one).unwrap() {
                prop_assert!(s.leq(&res).unwrap());
            }
        }
    }
}
