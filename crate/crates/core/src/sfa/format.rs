//! SFA text format:
//!
//! ```text
//! sfa <n_sfa_states> <n_dfa_states> <alphabet glyphs>
//! <id> <mapping entries...> <F|->      (one line per state, in id order)
//! <id> <glyph> <id>                    (one line per transition)
//! ```
//!
//! The start state is the one whose mapping is the identity.

use std::fmt::Write as _;

use crate::automaton::{Alphabet, AlphabetError, StateId};

use super::{Sfa, SfaState, SfaStateId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SfaFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header line")]
    MissingHeader,
    #[error("no state maps to the identity")]
    NoStart,
    #[error("state {state} has no transition on '{}'", *.glyph as char)]
    MissingTransition { state: SfaStateId, glyph: u8 },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

pub fn serialize_sfa(sfa: &Sfa) -> String {
    let mut out = String::new();
    let glyphs = String::from_utf8_lossy(sfa.alphabet().glyphs()).into_owned();
    let _ = writeln!(out, "sfa {} {} {}", sfa.n_states(), sfa.n_dfa_states(), glyphs);
    for id in 0..sfa.n_states() as SfaStateId {
        let _ = write!(out, "{id}");
        for q in sfa.map(id) {
            let _ = write!(out, " {q}");
        }
        let _ = writeln!(out, " {}", if sfa.is_final(id) { 'F' } else { '-' });
    }
    for id in 0..sfa.n_states() as SfaStateId {
        for (a, &g) in sfa.alphabet().glyphs().iter().enumerate() {
            let _ = writeln!(out, "{id} {} {}", g as char, sfa.next(id, a as u8));
        }
    }
    out
}

pub fn parse_sfa(text: &str) -> Result<Sfa, SfaFormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let syntax = |line: usize, message: String| SfaFormatError::Syntax { line, message };
    let num = |tok: &str, line: usize| -> Result<u32, SfaFormatError> {
        tok.parse::<u32>().map_err(|_| syntax(line, format!("`{tok}` is not a number")))
    };

    let (line, header) = lines.next().ok_or(SfaFormatError::MissingHeader)?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "sfa" {
        return Err(syntax(line, "expected `sfa <states> <dfa states> <alphabet>`".into()));
    }
    let n_sfa = num(h[1], line)? as usize;
    let n_dfa = num(h[2], line)? as usize;
    let alphabet = Alphabet::new(h[3].bytes())?;
    let k = alphabet.len();
    if n_sfa == 0 || n_dfa == 0 {
        return Err(syntax(line, "an SFA needs at least one state".into()));
    }

    let mut maps: Vec<StateId> = Vec::with_capacity(n_sfa * n_dfa);
    let mut finals = Vec::with_capacity(n_sfa);
    for expected in 0..n_sfa {
        let (line, l) = lines
            .next()
            .ok_or_else(|| syntax(0, format!("expected {n_sfa} state lines, found {expected}")))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != n_dfa + 2 {
            return Err(syntax(line, format!("state line needs {} fields", n_dfa + 2)));
        }
        if num(toks[0], line)? as usize != expected {
            return Err(syntax(line, format!("expected state {expected}")));
        }
        for tok in &toks[1..=n_dfa] {
            let q = num(tok, line)?;
            if q as usize >= n_dfa {
                return Err(syntax(line, format!("DFA state {q} out of range")));
            }
            maps.push(q);
        }
        finals.push(match toks[n_dfa + 1] {
            "F" => true,
            "-" => false,
            other => return Err(syntax(line, format!("`{other}` is not F or -"))),
        });
    }

    let mut delta = vec![SfaStateId::MAX; n_sfa * k];
    for (line, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(syntax(line, "expected `<id> <glyph> <id>`".into()));
        }
        let from = num(toks[0], line)? as usize;
        let a = match toks[1].as_bytes() {
            [g] => alphabet
                .code(*g)
                .ok_or_else(|| syntax(line, format!("glyph `{}` not in alphabet", toks[1])))?,
            _ => return Err(syntax(line, format!("`{}` is not a glyph", toks[1]))),
        };
        let to = num(toks[2], line)?;
        if from >= n_sfa || to as usize >= n_sfa {
            return Err(syntax(line, "SFA state out of range".into()));
        }
        let cell = &mut delta[from * k + a as usize];
        if *cell != SfaStateId::MAX && *cell != to {
            return Err(syntax(line, "conflicting transition".into()));
        }
        *cell = to;
    }
    if let Some(i) = delta.iter().position(|&t| t == SfaStateId::MAX) {
        return Err(SfaFormatError::MissingTransition {
            state: (i / k) as SfaStateId,
            glyph: alphabet.glyphs()[i % k],
        });
    }
    let start = maps
        .chunks_exact(n_dfa)
        .position(|m| SfaState::from_map(m.to_vec()).is_identity())
        .ok_or(SfaFormatError::NoStart)? as SfaStateId;
    Ok(Sfa::assemble(n_dfa, alphabet, maps, delta, start, finals))
}
