use std::collections::{HashMap, VecDeque};

use crate::automaton::{Dfa, StateId, Symbol};

/// Minimal equivalent DFA by partition refinement.
///
/// Unreachable states are dropped and the result is renumbered in
/// breadth-first order from the start state, visiting symbols in alphabet
/// order. The numbering depends only on the language, so minimizing twice
/// returns the same automaton.
pub fn minimize(dfa: &Dfa) -> Dfa {
    let n = dfa.n_states();
    let k = dfa.alphabet_size();

    let mut class: Vec<u32> = (0..n as StateId).map(|q| u32::from(dfa.is_final(q))).collect();
    let mut n_classes = class.iter().copied().collect::<std::collections::HashSet<_>>().len();
    loop {
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut next = vec![0u32; n];
        let mut sig = Vec::with_capacity(k + 1);
        for q in 0..n {
            sig.clear();
            sig.push(class[q]);
            sig.extend(dfa.row(q as StateId).iter().map(|&t| class[t as usize]));
            let fresh = ids.len() as u32;
            next[q] = *ids.entry(sig.clone()).or_insert(fresh);
        }
        class = next;
        if ids.len() == n_classes {
            break;
        }
        n_classes = ids.len();
    }

    // BFS over classes from the start class.
    let mut new_id: Vec<Option<StateId>> = vec![None; n_classes];
    let mut rep: Vec<StateId> = Vec::new();
    let start_class = class[dfa.start() as usize];
    new_id[start_class as usize] = Some(0);
    rep.push(dfa.start());
    let mut queue = VecDeque::from([dfa.start()]);
    let mut delta = Vec::new();
    while let Some(q) = queue.pop_front() {
        for a in 0..k {
            let t = dfa.next(q, a as Symbol);
            let c = class[t as usize] as usize;
            let id = *new_id[c].get_or_insert_with(|| {
                rep.push(t);
                queue.push_back(t);
                rep.len() as StateId - 1
            });
            delta.push(id);
        }
    }
    let finals = rep
        .iter()
        .enumerate()
        .filter(|(_, &q)| dfa.is_final(q))
        .map(|(i, _)| i as StateId)
        .collect();
    Dfa::new(rep.len(), dfa.alphabet().clone(), delta, 0, finals).expect("minimized DFA is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Alphabet;
    use crate::corpus;
    use rand::Rng;

    fn accepts(d: &Dfa, w: &[Symbol]) -> bool {
        d.is_final(d.run_from(d.start(), w))
    }

    #[test]
    fn reference_automaton_is_minimal() {
        assert_eq!(minimize(&Dfa::contains_rg()), Dfa::contains_rg());
    }

    #[test]
    fn duplicated_state_is_merged() {
        // States 1 and 2 are copies of each other.
        let ab = Alphabet::new(*b"ab").unwrap();
        let d = Dfa::new(3, ab, vec![1, 2, 0, 0, 0, 0], 0, vec![1, 2]).unwrap();
        let m = minimize(&d);
        assert_eq!(m.n_states(), 2);
        assert_eq!(m.table(), [1, 1, 0, 0]);
    }

    #[test]
    fn unreachable_states_are_dropped() {
        let ab = Alphabet::new(*b"a").unwrap();
        let d = Dfa::new(3, ab, vec![0, 2, 1], 0, vec![0, 1]).unwrap();
        assert_eq!(minimize(&d).n_states(), 1);
    }

    /// Every string up to length `2n` over the DFA alphabet.
    fn for_each_word(k: usize, max_len: usize, mut f: impl FnMut(&[Symbol])) {
        let mut w: Vec<Symbol> = Vec::new();
        loop {
            f(&w);
            // Odometer increment with length growth.
            let mut i = w.len();
            loop {
                if i == 0 {
                    if w.len() == max_len {
                        return;
                    }
                    w.iter_mut().for_each(|c| *c = 0);
                    w.push(0);
                    break;
                }
                i -= 1;
                if (w[i] as usize) + 1 < k {
                    w[i] += 1;
                    w[i + 1..].iter_mut().for_each(|c| *c = 0);
                    break;
                }
            }
        }
    }

    #[test]
    fn random_dfas_keep_their_language() {
        let mut rng = corpus::rng(77);
        for _ in 0..60 {
            let n = rng.gen_range(1..=8);
            let k = rng.gen_range(1..=2);
            let d = corpus::random_dfa(&mut rng, n, k);
            let m = minimize(&d);
            assert!(m.n_states() <= n);
            assert_eq!(minimize(&m), m);
            for_each_word(k, 2 * n, |w| assert_eq!(accepts(&d, w), accepts(&m, w), "{d:?} on {w:?}"));
            // Distinct states of the result are distinguishable, so no
            // smaller automaton exists.
            for p in 0..m.n_states() as StateId {
                for q in p + 1..m.n_states() as StateId {
                    let mut differ = false;
                    for_each_word(k, 2 * m.n_states(), |w| {
                        differ |= m.is_final(m.run_from(p, w)) != m.is_final(m.run_from(q, w));
                    });
                    assert!(differ, "states {p} and {q} of {m:?} are equivalent");
                }
            }
        }
    }
}
