use lawcat_core::completeness::{decide_lawvere_complete, Enumeration};
use lawcat_core::enriched::{check_vcategory, check_vfunctor, VCategory};
use lawcat_core::laxext::LaxExtension;
use lawcat_core::monad::monad_by_name;
use lawcat_core::quantale::builtin;
use lawcat_core::tvcat::{check_tvcategory, TVCategory};
use lawcat_core::vmatrix::VMatrix;
use lawcat_core::Budget;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

const QUANTALES: &[&str] = &["2", "chain3", "plus2", "plus3", "pset2"];

fn vcat() -> impl Strategy<Value = VCategory> {
    (0..QUANTALES.len(), 1usize..4, any::<u64>()).prop_map(|(qi, n, seed)| {
        let q = Arc::new(builtin(QUANTALES[qi]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        VCategory::generated_by(&VMatrix::random(q, n, n, &mut rng)).unwrap()
    })
}

fn identity_ext(x: &VCategory) -> Arc<LaxExtension> {
    Arc::new(LaxExtension::new(x.quantale().clone(), monad_by_name("id").unwrap(), Budget::default()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_structures_are_categories(x in vcat()) {
        prop_assert!(check_vcategory(x.structure()).unwrap().passed());
        prop_assert!(check_vcategory(x.dual().structure()).unwrap().passed());
        prop_assert_eq!(x.dual().dual(), x.clone());
    }

    #[test]
    fn exponential_points_are_functors(x in vcat()) {
        let y = VCategory::hom_v(x.quantale().clone());
        let exp = x.exponential(&y, &Budget::default()).unwrap();
        prop_assert!(check_vcategory(exp.category.structure()).unwrap().passed());
        for f in &exp.functions {
            prop_assert!(check_vfunctor(f, &x, &y).passed());
        }
    }

    #[test]
    fn pruned_and_reference_enumerations_agree(x in vcat()) {
        let tx = TVCategory::from_vcategory(identity_ext(&x), &x).unwrap();
        let (va, a) = decide_lawvere_complete(&tx, Enumeration::Pruned).unwrap();
        let (vb, b) = decide_lawvere_complete(&tx, Enumeration::Reference).unwrap();
        prop_assert_eq!(va, vb);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn identity_embedding_preserves_the_structure(x in vcat()) {
        let tx = TVCategory::from_vcategory(identity_ext(&x), &x).unwrap();
        prop_assert_eq!(tx.structure().data(), x.structure().data());
        prop_assert!(check_tvcategory(tx.ext(), tx.structure()).unwrap().passed());
    }
}
