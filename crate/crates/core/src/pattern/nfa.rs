use std::collections::{HashMap, VecDeque};

use super::{Element, PatternAst, PatternError};
use crate::automaton::{Alphabet, Dfa, StateId, Symbol};

/// NFA with epsilon moves, stored as adjacency lists.
#[derive(Debug, Clone, Default)]
pub struct Nfa {
    pub epsilon: Vec<Vec<u32>>,
    pub labeled: Vec<Vec<(Symbol, u32)>>,
    pub start: u32,
    pub finals: Vec<u32>,
}

impl Nfa {
    pub fn n_states(&self) -> usize {
        self.epsilon.len()
    }

    fn add_state(&mut self, budget: usize) -> Result<u32, PatternError> {
        if self.epsilon.len() >= budget {
            return Err(PatternError::StateBudgetExceeded { budget });
        }
        self.epsilon.push(Vec::new());
        self.labeled.push(Vec::new());
        Ok(self.epsilon.len() as u32 - 1)
    }

    /// Adds the epsilon closure of `set` to `set` (kept sorted).
    fn close(&self, set: &mut Vec<u32>, seen: &mut [bool]) {
        let mut stack = set.clone();
        for &s in set.iter() {
            seen[s as usize] = true;
        }
        while let Some(s) = stack.pop() {
            for &t in &self.epsilon[s as usize] {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        for &s in set.iter() {
            seen[s as usize] = false;
        }
        set.sort_unstable();
    }
}

/// Thompson-style construction. Unanchored ends get a `Σ*` loop, which
/// turns the accepting end into an absorbing state after determinization.
pub fn thompson(ast: &PatternAst, alphabet: &Alphabet, budget: usize) -> Result<Nfa, PatternError> {
    let mut nfa = Nfa::default();
    let start = nfa.add_state(budget)?;
    nfa.start = start;
    if !ast.anchored_start() {
        add_sigma_loop(&mut nfa, start, alphabet);
    }
    let mut cur = start;
    for el in ast.body() {
        cur = emit(&mut nfa, el, cur, alphabet, budget)?;
    }
    if !ast.anchored_end() {
        add_sigma_loop(&mut nfa, cur, alphabet);
    }
    nfa.finals.push(cur);
    Ok(nfa)
}

fn add_sigma_loop(nfa: &mut Nfa, s: u32, alphabet: &Alphabet) {
    for a in 0..alphabet.len() {
        nfa.labeled[s as usize].push((a as Symbol, s));
    }
}

/// Appends `el` after state `from` and returns the state it ends in.
fn emit(nfa: &mut Nfa, el: &Element, from: u32, alphabet: &Alphabet, budget: usize) -> Result<u32, PatternError> {
    match el {
        Element::Repeat(inner, min, max) => {
            let mut cur = from;
            for _ in 0..*min {
                cur = emit(nfa, inner, cur, alphabet, budget)?;
            }
            let mut skips = Vec::new();
            for _ in *min..*max {
                skips.push(cur);
                cur = emit(nfa, inner, cur, alphabet, budget)?;
            }
            for s in skips {
                nfa.epsilon[s as usize].push(cur);
            }
            Ok(cur)
        }
        Element::AnchorStart | Element::AnchorEnd => Ok(from),
        single => {
            let to = nfa.add_state(budget)?;
            for (a, &g) in alphabet.glyphs().iter().enumerate() {
                if single.accepts(g) {
                    nfa.labeled[from as usize].push((a as Symbol, to));
                }
            }
            Ok(to)
        }
    }
}

/// Determinizes `nfa` into a complete DFA (the empty set becomes a dead
/// state when reachable). States are numbered in discovery order.
pub fn subset_construction(nfa: &Nfa, alphabet: &Alphabet, budget: usize) -> Result<Dfa, PatternError> {
    let k = alphabet.len();
    let mut seen = vec![false; nfa.n_states()];
    let mut is_final = vec![false; nfa.n_states()];
    for &f in &nfa.finals {
        is_final[f as usize] = true;
    }

    let mut first = vec![nfa.start];
    nfa.close(&mut first, &mut seen);
    let mut ids: HashMap<Vec<u32>, StateId> = HashMap::new();
    let mut sets = vec![first.clone()];
    ids.insert(first, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut delta: Vec<StateId> = Vec::new();
    let mut moves: Vec<Vec<u32>> = vec![Vec::new(); k];

    while let Some(d) = queue.pop_front() {
        for m in moves.iter_mut() {
            m.clear();
        }
        for &s in &sets[d] {
            for &(a, t) in &nfa.labeled[s as usize] {
                moves[a as usize].push(t);
            }
        }
        let mut row = Vec::with_capacity(k);
        for m in moves.iter_mut() {
            m.sort_unstable();
            m.dedup();
            nfa.close(m, &mut seen);
            let id = match ids.get(m.as_slice()) {
                Some(&id) => id,
                None => {
                    if sets.len() >= budget {
                        return Err(PatternError::StateBudgetExceeded { budget });
                    }
                    let id = sets.len() as StateId;
                    ids.insert(m.clone(), id);
                    sets.push(m.clone());
                    queue.push_back(id as usize);
                    id
                }
            };
            row.push(id);
        }
        // Rows are produced in id order because the queue is FIFO.
        delta.extend(row);
    }

    let finals = (0..sets.len())
        .filter(|&d| sets[d].iter().any(|&s| is_final[s as usize]))
        .map(|d| d as StateId)
        .collect();
    Ok(Dfa::new(sets.len(), alphabet.clone(), delta, 0, finals).expect("subset construction yields a complete DFA"))
}
