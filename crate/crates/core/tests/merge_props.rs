mod oracle;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use skoo::model::Ontology;
use skoo::schema::{Fragment, SchemaBundle};

fn three(seed: u64) -> (Ontology, Ontology, Ontology) {
    let mut rng = StdRng::seed_from_u64(seed);
    (
        oracle::random_turtle_ontology(&mut rng),
        oracle::random_turtle_ontology(&mut rng),
        oracle::random_turtle_ontology(&mut rng),
    )
}

fn content(o: &Ontology) -> impl PartialEq + std::fmt::Debug + '_ {
    (
        &o.tbox,
        &o.abox,
        &o.declared_classes,
        &o.declared_properties,
    )
}

proptest! {
    #[test]
    fn merge_is_commutative(seed in any::<u64>()) {
        let (a, b, _) = three(seed);
        let ab = a.merge(&b).unwrap();
        let ba = b.merge(&a).unwrap();
        prop_assert_eq!(content(&ab), content(&ba));
        prop_assert_eq!(&ab.prefixes, &ba.prefixes);
    }

    #[test]
    fn merge_is_associative(seed in any::<u64>()) {
        let (a, b, c) = three(seed);
        let left = a.merge(&b).unwrap().merge(&c).unwrap();
        let right = a.merge(&b.merge(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn merge_is_idempotent(seed in any::<u64>()) {
        let (a, _, _) = three(seed);
        prop_assert_eq!(a.merge(&a).unwrap(), a);
    }
}

#[test]
fn merging_disjoint_vocabularies_adds_axiom_counts() {
    let b = SchemaBundle::embedded();
    let omdoc = b.fragment(Fragment::Omdoc);
    let merged = b.skoo.merge(omdoc).unwrap();
    assert_eq!(merged.tbox.len(), b.skoo.tbox.len() + omdoc.tbox.len());
}
