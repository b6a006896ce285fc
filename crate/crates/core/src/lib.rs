//! Simultaneous finite automata (SFAs).
//!
//! An SFA state is a mapping `Q -> Q` that records, for every DFA state
//! `q`, where a run started in `q` ends up. Running the SFA over separate
//! chunks of an input and composing the resulting mappings reproduces the
//! DFA's verdict without any dependency between chunks.
//!
//! * [`automaton`]: the DFA model, Grail-style text I/O and the sequential matcher.
//! * [`pattern`]: PROSITE-style patterns compiled to minimal DFAs.
//! * [`gf2`]: GF(2) polynomial arithmetic and 64-bit Rabin fingerprints.
//! * [`sfa`]: sequential construction with exhaustive, fingerprint and hash membership tests.
//! * [`par`]: parallel construction over a lock-free state store.
//! * [`matcher`]: chunked parallel matching.
//!
//! ```
//! use sfa::matcher::match_parallel;
//! use sfa::pattern::compile_pattern;
//! use sfa::{build, BuildConfig, FingerprintContext, Strategy};
//!
//! let dfa = compile_pattern("R-G")?;
//! let (sfa, _stats) = build(&dfa, Strategy::Hash, 1, &FingerprintContext::default(), &BuildConfig::default())?;
//! assert_eq!(sfa.n_states(), 6);
//!
//! let outcome = match_parallel(&sfa, &dfa, b"AARGAA", 3)?;
//! assert!(outcome.accepted);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod automaton;
pub mod corpus;
pub mod gf2;
pub mod matcher;
pub mod par;
pub mod pattern;
pub mod sfa;
mod strategy;

pub use automaton::{Alphabet, Dfa, MatchOutcome, StateId, Symbol};
pub use gf2::{Fingerprint, FingerprintContext};
pub use sfa::{BuildConfig, BuildError, BuildStats, Sfa, SfaState, SfaStateId};
pub use strategy::{build, Strategy, UnknownStrategy};
