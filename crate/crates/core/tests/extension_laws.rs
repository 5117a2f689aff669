use lawcat_core::laxext::LaxExtension;
use lawcat_core::monad::monad_by_name;
use lawcat_core::quantale::builtin;
use lawcat_core::vmatrix::{compose, VMatrix};
use lawcat_core::Budget;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn ext() -> impl Strategy<Value = Arc<LaxExtension>> {
    (0..3usize, 0..3usize).prop_map(|(t, q)| {
        let t = monad_by_name(["id", "powerset", "ultra"][t]).unwrap();
        let q = Arc::new(builtin(["2", "chain3", "plus2"][q]).unwrap());
        Arc::new(LaxExtension::new(q, t, Budget::default()).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extension_commutes_with_transpose(e in ext(), a in 1usize..3, b in 1usize..3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(e.quantale().clone(), a, b, &mut rng);
        let lhs = e.extend(&r.transpose()).unwrap();
        let rhs = e.extend(&r).unwrap().transpose();
        prop_assert_eq!(lhs.data(), rhs.data());
    }

    #[test]
    fn extension_is_a_monotone_lax_functor(e in ext(), a in 1usize..3, b in 1usize..3, c in 1usize..3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = e.quantale().clone();
        let r = VMatrix::random(q.clone(), a, b, &mut rng);
        let s = VMatrix::random(q.clone(), b, c, &mut rng);
        let (tr, ts) = (e.extend(&r).unwrap(), e.extend(&s).unwrap());
        let tsr = e.extend(&compose(&s, &r).unwrap()).unwrap();
        prop_assert!(compose(&ts, &tr).unwrap().leq(&tsr).unwrap());
        let bigger = r.join(&VMatrix::random(q, a, b, &mut rng)).unwrap();
        prop_assert!(tr.leq(&e.extend(&bigger).unwrap()).unwrap());
    }

    #[test]
    fn unit_and_multiplication_are_oplax(e in ext(), a in 1usize..3, b in 1usize..3, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = VMatrix::random(e.quantale().clone(), a, b, &mut rng);
        let tr = e.extend(&r).unwrap();
        let unit_l = compose(&e.unit_matrix(b).unwrap(), &r).unwrap();
        let unit_r = compose(&tr, &e.unit_matrix(a).unwrap()).unwrap();
        prop_assert!(unit_l.leq(&unit_r).unwrap());
        let ttr = e.extend(&tr).unwrap();
        let mult_l = compose(&e.mult_matrix(b).unwrap(), &ttr).unwrap();
        let mult_r = compose(&tr, &e.mult_matrix(a).unwrap()).unwrap();
        prop_assert!(mult_l.leq(&mult_r).unwrap());
    }

    #[test]
    fn maps_extend_to_their_image(e in ext(), a in 1usize..4, b in 1usize..4, seed: u64) {
        let f: Vec<usize> = (0..a).map(|i| (seed as usize >> (2 * i)) % b).collect();
        let m = VMatrix::from_map(e.quantale().clone(), &f, b);
        let tm = e.extend(&m).unwrap();
        let image = e.map_matrix(&f, b).unwrap();
        prop_assert_eq!(tm.data(), image.data());
    }
}
