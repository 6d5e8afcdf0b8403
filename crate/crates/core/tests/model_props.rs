//! Randomized laws for the glued-piece model and its text format.

use std::collections::BTreeMap;

use proptest::prelude::*;

use geosub::format::{parse, serialize};
use geosub::{corpus_rng, random_partition, CircleRef, SurfaceDocument, SurfaceType};

fn chi(t: SurfaceType) -> i64 {
    let genus = i64::from(t.genus);
    let holes = i64::from(t.boundary) + i64::from(t.punctures);
    if t.genus >= 0 {
        2 - 2 * genus - holes
    } else {
        2 + genus - holes
    }
}

proptest! {
    #[test]
    fn serialize_then_parse_reproduces_the_model(seed in any::<u64>()) {
        let mut rng = corpus_rng(seed);
        let p = random_partition(&mut rng, 8);
        let doc = SurfaceDocument { name: None, partition: p, selections: BTreeMap::new() };
        let text = serialize(&doc);
        let back = parse(&text).expect("serialized model parses");
        prop_assert!(back.partition.same_model(&doc.partition), "round trip changed the model");
    }

    #[test]
    fn normalization_is_idempotent_and_type_preserving(seed in any::<u64>()) {
        let mut rng = corpus_rng(seed);
        let p = random_partition(&mut rng, 8);
        let ambient = p.assemble_type();
        let once = p.normalize_with_selections(&mut []);
        let twice = once.normalize_with_selections(&mut []);
        prop_assert!(once.same_model(&twice), "normalization is not idempotent");
        prop_assert_eq!(once.assemble_type().ok(), ambient.ok());
    }

    #[test]
    fn annulus_insertion_preserves_the_ambient_type(seed in any::<u64>()) {
        let mut rng = corpus_rng(seed);
        let p = random_partition(&mut rng, 8);
        let ambient = p.assemble_type();
        let edge = p
            .circle_refs()
            .into_iter()
            .find(|c| matches!(c, CircleRef::Edge(_)));
        prop_assume!(edge.is_some());
        let (q, _) = p.insert_annulus(&edge.unwrap()).expect("edge circles admit an annulus");
        prop_assert_eq!(q.assemble_type().ok(), ambient.ok());
        prop_assert_eq!(q.piece_ids().count(), p.piece_ids().count() + 1);
    }

    #[test]
    fn assembled_type_accounts_for_every_piece(seed in any::<u64>()) {
        let mut rng = corpus_rng(seed);
        let p = random_partition(&mut rng, 8);
        if let Ok(t) = p.assemble_type() {
            prop_assert_eq!(chi(t), p.total_chi(), "assembled type loses surface area");
        }
    }
}
