//! Seeded automata for tests, verification runs and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Alphabet, Dfa, StateId};

/// Deterministic RNG used for every seeded corpus.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random complete DFA with glyphs `a`, `b`, ... and each
/// state final with probability one half.
pub fn random_dfa<R: Rng + ?Sized>(rng: &mut R, n_states: usize, alphabet_size: usize) -> Dfa {
    assert!(n_states >= 1 && (1..=26).contains(&alphabet_size));
    let alphabet = Alphabet::new((b'a'..).take(alphabet_size)).expect("lowercase letters");
    let delta = (0..n_states * alphabet_size)
        .map(|_| rng.gen_range(0..n_states) as StateId)
        .collect();
    let finals = (0..n_states as StateId).filter(|_| rng.gen_bool(0.5)).collect();
    let start = rng.gen_range(0..n_states) as StateId;
    Dfa::new(n_states, alphabet, delta, start, finals).expect("generated DFA is valid")
}

/// `count` random DFAs with `1..=max_states` states and
/// `1..=max_alphabet` symbols.
pub fn random_corpus(seed: u64, count: usize, max_states: usize, max_alphabet: usize) -> Vec<Dfa> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=max_states);
            let k = rng.gen_range(1..=max_alphabet);
            random_dfa(&mut rng, n, k)
        })
        .collect()
}

/// An `n`-state DFA over `{c, m, s}` whose transitions are a cyclic
/// shift (`c`), a swap of states 0 and 1 (`s`) and a merge of state 1
/// into 0 (`m`). Together they generate every map `Q -> Q`, so the SFA
/// has exactly `n^n` states.
pub fn full_transformation_dfa(n: usize) -> Dfa {
    assert!(n >= 2);
    let alphabet = Alphabet::new(*b"cms").expect("valid");
    let mut delta = Vec::with_capacity(3 * n);
    for q in 0..n {
        let cycle = (q + 1) % n;
        let merge = if q == 1 { 0 } else { q };
        let swap = match q {
            0 => 1,
            1 => 0,
            _ => q,
        };
        delta.extend([cycle as StateId, merge as StateId, swap as StateId]);
    }
    Dfa::new(n, alphabet, delta, 0, vec![n as StateId - 1]).expect("valid")
}

/// Random strings over the DFA's glyphs.
pub fn random_input<R: Rng + ?Sized>(rng: &mut R, dfa: &Dfa, len: usize) -> Vec<u8> {
    let glyphs = dfa.alphabet().glyphs();
    (0..len).map(|_| glyphs[rng.gen_range(0..glyphs.len())]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_reproducible() {
        assert_eq!(random_corpus(9, 5, 6, 4), random_corpus(9, 5, 6, 4));
        for d in random_corpus(1, 50, 6, 4) {
            assert!(d.validate().is_empty());
            assert!(d.n_states() <= 6 && d.alphabet_size() <= 4);
        }
    }

    #[test]
    fn full_transformation_sfa_size() {
        use crate::sfa::{build_sfa, BuildConfig, StoreStrategy};
        for n in 2..=4 {
            let dfa = full_transformation_dfa(n);
            let (sfa, _) = build_sfa(&dfa, StoreStrategy::Exhaustive, None, &BuildConfig::default()).unwrap();
            assert_eq!(sfa.n_states(), n.pow(n as u32));
        }
    }
}
