use proptest::prelude::*;
use workbench::fiformat::{from_json, to_json};
use workbench::text::{parse_endomorphism, parse_word};
use workbench_core::fimod::{builtin, BuiltinKind};
use workbench_core::johnson::{make_generator, GeneratorSpec};
use workbench_core::words::{FreeWord, Letter};

fn word(rank: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec((1..=rank, any::<bool>()), 0..12)
        .prop_map(move |v| FreeWord::reduce(v.into_iter().map(|(i, inv)| Letter::new(i, inv)), rank).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn words_round_trip(w in word(4)) {
        prop_assert_eq!(parse_word(&w.to_string(), Some(4)).unwrap(), w);
    }

    #[test]
    fn endomorphisms_round_trip(i in 1usize..=4, j in 1usize..=4, k in 1usize..=4, inv in any::<bool>()) {
        prop_assume!(i != j && j != k && i != k);
        let c = make_generator(GeneratorSpec::C(i, j), 4).unwrap();
        let m = make_generator(GeneratorSpec::M(i, j, k), 4).unwrap();
        let mut phi = c.compose(&m).unwrap();
        if inv {
            phi = phi.inverse().unwrap();
        }
        let back = parse_endomorphism(&phi.to_string()).unwrap();
        prop_assert_eq!(back.images(), phi.images());
        prop_assert_eq!(back.inverse_images(), phi.inverse_images());
    }

    #[test]
    fn garbage_never_panics(s in "[x0-9^ \\-]{0,16}") {
        let _ = parse_word(&s, None);
        let _ = parse_endomorphism(&s);
    }
}

#[test]
fn fi_documents_round_trip() {
    for kind in [BuiltinKind::Exterior(3), BuiltinKind::TensorWedge(2)] {
        let m = builtin(kind, 4).unwrap();
        let v = to_json(&m).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        let back = from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m, "{kind}");
    }
}
