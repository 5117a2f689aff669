//! Counts and verdicts checked against values known independently of this crate.

use lawcat_core::completeness::{decide_lawvere_complete, Enumeration};
use lawcat_core::enriched::{all_vcategories, VCategory};
use lawcat_core::instances::{all_preorders, all_topologies, preorder_pair_check, FinitePreorder};
use lawcat_core::laxext::LaxExtension;
use lawcat_core::monad::monad_by_name;
use lawcat_core::quantale::builtin;
use lawcat_core::quniform::enumerate_bases;
use lawcat_core::tvcat::{all_tvcategories, TVCategory};
use lawcat_core::Budget;
use std::sync::Arc;

// labelled preorders = labelled finite topologies (OEIS A000798)
const PREORDERS: [usize; 5] = [1, 1, 4, 29, 355];

fn ext(q: &str, t: &str) -> Arc<LaxExtension> {
    Arc::new(LaxExtension::new(Arc::new(builtin(q).unwrap()), monad_by_name(t).unwrap(), Budget::default()).unwrap())
}

#[test]
fn preorder_and_topology_counts() {
    for (n, &want) in PREORDERS.iter().enumerate() {
        assert_eq!(all_preorders(n).len(), want, "preorders on {n}");
        assert_eq!(all_topologies(n).len(), want, "topologies on {n}");
    }
}

#[test]
fn two_categories_are_preorders() {
    let q = Arc::new(builtin("2").unwrap());
    for n in 1..=3 {
        assert_eq!(all_vcategories(&q, n, &Budget::default()).unwrap().len(), PREORDERS[n]);
    }
    let id = ext("2", "id");
    for n in 1..=3 {
        assert_eq!(all_tvcategories(&id, n).unwrap().len(), PREORDERS[n]);
    }
}

#[test]
fn finite_quasi_uniformities_are_preorders() {
    // on a finite set every quasi-uniformity is principal, generated by a preorder
    assert_eq!(enumerate_bases(2, 2).len(), PREORDERS[2]);
    assert_eq!(enumerate_bases(3, 1).len(), PREORDERS[3]);
}

#[test]
fn ultrafilter_spaces_on_two_points_are_the_topologies() {
    assert_eq!(all_tvcategories(&ext("2", "ultra"), 2).unwrap().len(), PREORDERS[2]);
}

#[test]
fn preorder_pairs_are_down_sets_of_principal_ideals() {
    let id = ext("2", "id");
    for n in 1..=3 {
        for p in all_preorders(n) {
            let c = preorder_pair_check(&p, &id).unwrap();
            assert!(c.agree, "{:?}", p.relation());
        }
    }
}

#[test]
fn discrete_over_two_subsets_is_incomplete() {
    let id = ext("pset2", "id");
    let x = TVCategory::from_vcategory(id.clone(), &VCategory::discrete(id.quantale().clone(), 2)).unwrap();
    let (v, pairs) = decide_lawvere_complete(&x, Enumeration::Reference).unwrap();
    assert!(!v.complete);
    // the two mixed pairs ({a},{b}) and ({b},{a}) have no representative
    assert_eq!(v.non_representable.len(), 2);
    assert_eq!(pairs.len(), 4);
}

#[test]
fn chains_and_v_hom_are_complete() {
    let chain = FinitePreorder::chain(3).to_tvcategory(&ext("2", "id")).unwrap();
    assert!(decide_lawvere_complete(&chain, Enumeration::Pruned).unwrap().0.complete);
    for q in ["2", "chain3", "plus3", "pset2"] {
        let hv = TVCategory::hom_xi(ext(q, "id")).unwrap();
        assert!(decide_lawvere_complete(&hv, Enumeration::Pruned).unwrap().0.complete, "{q}");
    }
}
