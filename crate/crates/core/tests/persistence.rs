mod common;

use common::{random_graph, random_query, sorted};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ringjoin::index::{AnyIndex, Index, Variant};
use ringjoin::ingest::{parse_triples, InputFormat};
use ringjoin::ltj::EngineConfig;
use ringjoin::par::Parallelism;
use ringjoin::Error;

#[test]
fn files_round_trip_for_every_variant() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let g = random_graph(&mut rng, 400, 30);
    let u = g.iter().flat_map(|t| t.0).max().unwrap();
    for v in Variant::ALL {
        let ix = Index {
            index: AnyIndex::build(v, &g, u, Parallelism::Parallel).unwrap(),
            dictionary: None,
        };
        let path = dir.path().join(format!("{v}.idx"));
        let written = ix.save(&path).unwrap();
        assert_eq!(written, std::fs::metadata(&path).unwrap().len());
        let back = Index::load(&path, None).unwrap();
        assert_eq!(back.variant(), v);
        assert_eq!(back.to_bytes(), std::fs::read(&path).unwrap());
        let cfg = EngineConfig::unlimited();
        for _ in 0..30 {
            let q = random_query(&mut rng, &g, u);
            let a = sorted(ix.index.evaluate(&q, &cfg).unwrap().mappings);
            let b = sorted(back.index.evaluate(&q, &cfg).unwrap().mappings);
            assert_eq!(a, b, "{v} `{q}`");
        }
    }
}

#[test]
fn dictionary_survives() {
    let text = "alice knows bob\nbob knows carol\ncarol likes alice\n";
    let g = parse_triples(text.as_bytes(), InputFormat::Terms).unwrap();
    let ix = Index::build(&g, Variant::RdfcsaSmall, Parallelism::Sequential).unwrap();
    let back = Index::from_bytes(&ix.to_bytes(), None).unwrap();
    let d = back.dictionary.unwrap();
    assert_eq!(d.term(d.id("carol").unwrap()), Some("carol"));
    assert_eq!(d.len(), 5);
}

#[test]
fn damage_and_mismatch_are_explicit() {
    let g = parse_triples("1 1 2\n1 2 3\n2 1 2\n".as_bytes(), InputFormat::Ints).unwrap();
    let ix = Index::build(&g, Variant::RingLarge, Parallelism::Sequential).unwrap();
    let bytes = ix.to_bytes();

    let mut bad = bytes.clone();
    bad[0] ^= 0xff;
    let err = Index::from_bytes(&bad, None).unwrap_err();
    assert!(err.to_string().contains("header"), "{err}");

    let mut ver = bytes.clone();
    ver[4] = 99;
    assert!(Index::from_bytes(&ver, None).unwrap_err().to_string().contains("version"));

    let err = Index::from_bytes(&bytes[..bytes.len() / 2], None).unwrap_err();
    assert!(matches!(err, Error::Corrupt { .. }), "{err}");

    let mut flipped = bytes.clone();
    let mid = bytes.len() - 5;
    flipped[mid] ^= 0x55;
    let err = Index::from_bytes(&flipped, None).unwrap_err();
    assert!(err.to_string().contains("ring."), "{err}");

    let err = Index::from_bytes(&bytes, Some(Variant::UringSmall)).unwrap_err();
    assert!(matches!(err, Error::VariantMismatch { .. }), "{err}");
    assert!(err.to_string().contains("ring-large"), "{err}");
}
