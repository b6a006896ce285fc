//! Compiled patterns against a direct occurrence search.

use rand::seq::SliceRandom;
use rand::Rng;
use sfa::corpus;
use sfa::pattern::{compile_to_dfa, minimize, Element, PatternAst};
use sfa::Dfa;

const LETTERS: &[u8] = b"ACGR";
const MAX_LEN: usize = 6;

/// End positions reachable by matching `elements` from `pos`.
fn ends(elements: &[Element], text: &[u8], pos: usize, out: &mut Vec<usize>) {
    let Some((first, rest)) = elements.split_first() else {
        out.push(pos);
        return;
    };
    let (single, min, max) = match first {
        Element::Repeat(inner, min, max) => (inner.as_ref(), *min as usize, *max as usize),
        other => (other, 1, 1),
    };
    for (count, p) in (pos..).take(max + 1).enumerate() {
        if count >= min {
            ends(rest, text, p, out);
        }
        if p == text.len() || !single.accepts(text[p]) {
            break;
        }
    }
}

fn occurs(ast: &PatternAst, text: &[u8]) -> bool {
    let starts = if ast.anchored_start() { 0..=0 } else { 0..=text.len() };
    starts.into_iter().any(|s| {
        let mut out = Vec::new();
        ends(ast.body(), text, s, &mut out);
        out.iter().any(|&e| !ast.anchored_end() || e == text.len())
    })
}

fn random_set(rng: &mut impl Rng) -> Vec<u8> {
    // Mostly letters that appear in the test strings, sometimes others.
    let pool: &[u8] = if rng.gen_bool(0.8) { LETTERS } else { b"ACGRWY" };
    let n = rng.gen_range(1..=3);
    let mut set: Vec<u8> = pool.choose_multiple(rng, n).copied().collect();
    set.sort_unstable();
    set
}

fn random_ast(rng: &mut impl Rng) -> PatternAst {
    let mut elements = Vec::new();
    if rng.gen_bool(0.25) {
        elements.push(Element::AnchorStart);
    }
    for _ in 0..rng.gen_range(1..=4) {
        let single = match rng.gen_range(0..4) {
            0 => Element::Literal(*LETTERS.choose(rng).unwrap()),
            1 => Element::AnyOf(random_set(rng)),
            2 => Element::NoneOf(random_set(rng)),
            _ => Element::Wildcard,
        };
        let el = if rng.gen_bool(0.3) {
            let min = rng.gen_range(0..=2);
            Element::Repeat(Box::new(single), min, min + rng.gen_range(0..=2))
        } else {
            single
        };
        elements.push(el);
    }
    if rng.gen_bool(0.25) {
        elements.push(Element::AnchorEnd);
    }
    PatternAst { elements }
}

fn all_strings(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u8>| {
                LETTERS.iter().map(move |&c| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn accepts(dfa: &Dfa, text: &[u8]) -> bool {
    dfa.dfa_match(text).unwrap().accepted
}

#[test]
fn random_patterns_agree_with_occurrence_search() {
    let strings = all_strings(MAX_LEN);
    let mut rng = corpus::rng(2024);
    for _ in 0..300 {
        let ast = random_ast(&mut rng);
        let dfa = compile_to_dfa(&ast).unwrap();
        assert!(dfa.validate().is_empty());
        assert_eq!(minimize(&dfa), dfa, "{ast:?} compiled to a non-minimal automaton");
        for w in &strings {
            assert_eq!(accepts(&dfa, w), occurs(&ast, w), "{ast:?} on {:?}", String::from_utf8_lossy(w));
        }
    }
}

#[test]
fn the_oracle_itself() {
    let ast = sfa::pattern::parse_prosite("R-x(0,1)-G").unwrap();
    assert!(occurs(&ast, b"ARGA"));
    assert!(occurs(&ast, b"RAG"));
    assert!(!occurs(&ast, b"RAAG"));
    let anchored = sfa::pattern::parse_prosite("<R-G>").unwrap();
    assert!(occurs(&anchored, b"RG"));
    assert!(!occurs(&anchored, b"RGG"));
}
