mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::values::{eval, read_back, round_trip, settings, source};
use nearca_cli::value::{print, Kind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>(), which in 0usize..30, kind in 0usize..6) {
        let outcome = round_trip(seed, which, kind);
        prop_assert!(outcome.is_ok(), "{}", outcome.unwrap_err());
    }
}

#[test]
fn constants_print_as_scalars() {
    let all = settings();
    let s = &all[0];
    for src in ["[1] - [1]", "3*[0]", "X[0] - X[0]", "[[2]]"] {
        let v = eval(s, src);
        let shown = print(&v);
        assert_eq!(read_back(s, &shown, &v), v, "{src}");
    }
    assert_eq!(print(&eval(s, "3*[0]")), "3");
    assert_eq!(print(&eval(s, "[[2]]")), "[[2]]");
}

#[test]
fn corpus_covers_every_kind() {
    let all = settings();
    let mut seen = BTreeMap::new();
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = &all[(seed % 30) as usize];
        let v = eval(s, &source(&mut rng, s, (seed % 6) as usize));
        *seen.entry(v.kind().to_string()).or_insert(0) += 1;
    }
    for k in [Kind::Scalar, Kind::GroupRing, Kind::Matrix, Kind::NearRing, Kind::Cells, Kind::Automaton] {
        assert!(seen.get(&k.to_string()).copied().unwrap_or(0) >= 20, "{k} underrepresented: {seen:?}");
    }
}
