use proptest::prelude::*;
use sfa::automaton::{parse_grail, serialize_grail, Symbol};
use sfa::corpus;
use sfa::matcher::{compose, folded_mapping, match_parallel, sfa_run};
use sfa::sfa::{build_sfa, parse_sfa, serialize_sfa, StoreStrategy};
use sfa::{BuildConfig, Dfa, FingerprintContext, Sfa, SfaState};

fn dfa_from_seed(seed: u64, n: usize, k: usize) -> Dfa {
    corpus::random_dfa(&mut corpus::rng(seed), n, k)
}

fn sfa_of(dfa: &Dfa) -> Sfa {
    build_sfa(dfa, StoreStrategy::Hash, Some(&FingerprintContext::default()), &BuildConfig::default())
        .unwrap()
        .0
}

proptest! {
    #[test]
    fn grail_round_trip(seed in any::<u64>(), n in 1usize..8, k in 1usize..6) {
        let dfa = dfa_from_seed(seed, n, k);
        let text = serialize_grail(&dfa);
        prop_assert_eq!(parse_grail(&text).unwrap(), dfa);
    }

    #[test]
    fn sfa_text_round_trip(seed in any::<u64>(), n in 1usize..6, k in 1usize..4) {
        let sfa = sfa_of(&dfa_from_seed(seed, n, k)).canonicalize();
        prop_assert_eq!(parse_sfa(&serialize_sfa(&sfa)).unwrap(), sfa);
    }

    #[test]
    fn chunking_never_changes_the_result(
        seed in any::<u64>(),
        n in 1usize..6,
        k in 1usize..4,
        len in 0usize..300,
        chunks in 1usize..20,
    ) {
        let dfa = dfa_from_seed(seed, n, k);
        let sfa = sfa_of(&dfa);
        let mut rng = corpus::rng(seed ^ 1);
        let text = corpus::random_input(&mut rng, &dfa, len);
        let symbols = dfa.alphabet().encode(&text).unwrap();
        let whole = sfa.state(sfa_run(&sfa, &symbols));
        prop_assert_eq!(folded_mapping(&sfa, &symbols, chunks), whole);
        prop_assert_eq!(match_parallel(&sfa, &dfa, &text, chunks).unwrap(), dfa.dfa_match(&text).unwrap());
    }

    #[test]
    fn context_record_round_trip(bits in 1u32..=64) {
        let ctx = FingerprintContext::default();
        let back = FingerprintContext::from_hex_record(&ctx.to_hex_record()).unwrap();
        prop_assert_eq!(&back, &ctx);
        prop_assert!(ctx.narrowed(bits).fingerprint_bits() == bits);
    }
}

/// Every string over R, G and one other symbol up to `max_len`.
fn class_strings(dfa: &Dfa, max_len: usize) -> Vec<Vec<Symbol>> {
    let ab = dfa.alphabet();
    let classes = [ab.code(b'R').unwrap(), ab.code(b'G').unwrap(), ab.code(b'A').unwrap()];
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<Symbol>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| classes.iter().map(move |&c| [w.as_slice(), &[c]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn runs_are_a_homomorphism_on_the_reference_sfa() {
    let dfa = Dfa::contains_rg();
    let sfa = sfa_of(&dfa);
    for w in class_strings(&dfa, 4) {
        let whole = sfa.state(sfa_run(&sfa, &w));
        for cut in 0..=w.len() {
            let (x, y) = w.split_at(cut);
            let parts = compose(&sfa.state(sfa_run(&sfa, x)), &sfa.state(sfa_run(&sfa, y))).unwrap();
            assert_eq!(parts, whole, "{w:?} split at {cut}");
        }
        assert_eq!(whole.map()[0], dfa.run_from(0, &w));
    }
}

#[test]
fn identity_run_is_start() {
    let dfa = Dfa::contains_rg();
    let sfa = sfa_of(&dfa);
    assert_eq!(sfa.state(sfa_run(&sfa, &[])), SfaState::identity(3));
}
