use foldmin::corpus::{corpus_generate, CorpusSpec, FamilyKind};
use foldmin::input::{parse_input, print_input};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = FamilyKind> {
    prop_oneof![Just(FamilyKind::Coxeter), Just(FamilyKind::Artin), Just(FamilyKind::OneRelator)]
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(f in family(), n in 2usize..5, m in 4u32..12, k in 1usize..4, seed in any::<u64>()) {
        let spec = CorpusSpec { family: f, n, m, k, word_len: (1, 9), trials: 4, seed, relator: None };
        for inst in corpus_generate(&spec) {
            let text = print_input(&inst);
            prop_assert_eq!(parse_input(&text).unwrap(), inst, "{}", text);
        }
    }
}
