//! Line-oriented Grail-style automaton text:
//!
//! ```text
//! (START) |- 0
//! 0 R 1
//! 2 -| (FINAL)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Alphabet, AlphabetError, Dfa, DfaError, StateId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrailError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `(START) |- <state>` line")]
    MissingStart,
    #[error("line {line}: second start line (only one start state is supported)")]
    DuplicateStart { line: usize },
    #[error("line {line}: state {state} already moves to {previous} on '{}', not {target}", *.glyph as char)]
    Conflict { line: usize, state: StateId, glyph: u8, previous: StateId, target: StateId },
    #[error("no transitions: the alphabet would be empty")]
    EmptyAlphabet,
    #[error("state {state} has no transition on '{}'", *.glyph as char)]
    Incomplete { state: StateId, glyph: u8 },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error(transparent)]
    Dfa(#[from] DfaError),
}

fn syntax(line: usize, message: impl Into<String>) -> GrailError {
    GrailError::Syntax { line, message: message.into() }
}

fn parse_state(tok: &str, line: usize) -> Result<StateId, GrailError> {
    if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("`{tok}` is not a state number")));
    }
    tok.parse::<StateId>()
        .ok()
        .filter(|&q| q < StateId::MAX)
        .ok_or_else(|| syntax(line, format!("state number `{tok}` is too large")))
}

/// Parses Grail-style text into a complete DFA.
///
/// The alphabet is the sorted set of glyphs used on transition lines, and
/// every state must have exactly one transition per glyph.
pub fn parse_grail(text: &str) -> Result<Dfa, GrailError> {
    let mut start: Option<StateId> = None;
    let mut finals = Vec::new();
    let mut edges: BTreeMap<(StateId, u8), (StateId, usize)> = BTreeMap::new();
    let mut max_state: StateId = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(syntax(line, format!("expected 3 fields, found {}", toks.len())));
        }
        if toks[0] == "(START)" {
            if toks[1] != "|-" {
                return Err(syntax(line, "expected `(START) |- <state>`"));
            }
            if start.is_some() {
                return Err(GrailError::DuplicateStart { line });
            }
            let q = parse_state(toks[2], line)?;
            max_state = max_state.max(q);
            start = Some(q);
        } else if toks[2] == "(FINAL)" {
            if toks[1] != "-|" {
                return Err(syntax(line, "expected `<state> -| (FINAL)`"));
            }
            let q = parse_state(toks[0], line)?;
            max_state = max_state.max(q);
            finals.push(q);
        } else {
            let from = parse_state(toks[0], line)?;
            let glyph = match toks[1].as_bytes() {
                [g] if g.is_ascii_graphic() => *g,
                _ => return Err(syntax(line, format!("`{}` is not a single printable glyph", toks[1]))),
            };
            let to = parse_state(toks[2], line)?;
            max_state = max_state.max(from).max(to);
            if let Some(&(previous, _)) = edges.get(&(from, glyph)) {
                if previous != to {
                    return Err(GrailError::Conflict { line, state: from, glyph, previous, target: to });
                }
            } else {
                edges.insert((from, glyph), (to, line));
            }
        }
    }

    let start = start.ok_or(GrailError::MissingStart)?;
    let alphabet = Alphabet::sorted(edges.keys().map(|&(_, g)| g))?;
    if alphabet.is_empty() {
        return Err(GrailError::EmptyAlphabet);
    }
    let n_states = max_state as usize + 1;
    let k = alphabet.len();
    let mut delta = vec![StateId::MAX; n_states * k];
    for (&(from, glyph), &(to, _)) in &edges {
        let a = alphabet.code(glyph).expect("glyph collected above");
        delta[from as usize * k + a as usize] = to;
    }
    if let Some(i) = delta.iter().position(|&t| t == StateId::MAX) {
        return Err(GrailError::Incomplete {
            state: (i / k) as StateId,
            glyph: alphabet.glyphs()[i % k],
        });
    }
    finals.sort_unstable();
    finals.dedup();
    Ok(Dfa::new(n_states, alphabet, delta, start, finals)?)
}

/// Writes `dfa` as Grail-style text: the start line, transitions in state
/// then alphabet order, then one line per final state.
pub fn serialize_grail(dfa: &Dfa) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(START) |- {}", dfa.start());
    let glyphs = dfa.alphabet().glyphs();
    for q in 0..dfa.n_states() as StateId {
        for (&g, &t) in glyphs.iter().zip(dfa.row(q)) {
            let _ = writeln!(out, "{q} {} {t}", g as char);
        }
    }
    for &q in dfa.finals() {
        let _ = writeln!(out, "{q} -| (FINAL)");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rg_text() -> String {
        let mut s = String::from("# contains RG\n(START) |- 0\n");
        for g in super::super::AMINO_ACIDS {
            let g = *g as char;
            let row0 = if g == 'R' { 1 } else { 0 };
            let row1 = match g {
                'R' => 1,
                'G' => 2,
                _ => 0,
            };
            s += &format!("0 {g} {row0}\n1 {g} {row1}\n2 {g} 2\n");
        }
        s + "2 -| (FINAL)\n"
    }

    #[test]
    fn parses_the_rg_automaton() {
        let d = parse_grail(&rg_text()).unwrap();
        assert_eq!(d, Dfa::contains_rg());
    }

    #[test]
    fn smallest_complete_dfa() {
        let d = parse_grail("(START) |- 0\n0 a 0\n0 -| (FINAL)\n").unwrap();
        assert_eq!(d.n_states(), 1);
        assert_eq!(d.finals(), &[0]);
        assert_eq!(d.table(), &[0]);
    }

    #[test]
    fn missing_transition_is_an_error() {
        let text = "(START) |- 0\n0 R 1\n0 G 0\n1 R 1\n1 -| (FINAL)\n";
        assert_eq!(parse_grail(text), Err(GrailError::Incomplete { state: 1, glyph: b'G' }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        assert_eq!(parse_grail("0 a 0\n"), Err(GrailError::MissingStart));
        assert!(matches!(
            parse_grail("(START) |- 0\n0 ab 0\n"),
            Err(GrailError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_grail("(START) |- 0\n\n0 a\n"),
            Err(GrailError::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_grail("(START) |- 0\n(START) |- 0\n0 a 0\n"),
            Err(GrailError::DuplicateStart { line: 2 })
        ));
        assert!(matches!(
            parse_grail("(START) |- 0\n0 a 0\n0 a 1\n1 a 1\n"),
            Err(GrailError::Conflict { line: 3, .. })
        ));
        assert!(matches!(
            parse_grail("(START) |- -1\n0 a 0\n"),
            Err(GrailError::Syntax { line: 1, .. })
        ));
    }

    #[test]
    fn round_trips() {
        let d = Dfa::contains_rg();
        assert_eq!(parse_grail(&serialize_grail(&d)).unwrap(), d);
        let one = parse_grail("(START) |- 0\n0 a 0\n").unwrap();
        assert_eq!(parse_grail(&serialize_grail(&one)).unwrap(), one);
        let text = serialize_grail(&one);
        assert_eq!(serialize_grail(&parse_grail(&text).unwrap()), text);
    }
}
