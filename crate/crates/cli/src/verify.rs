use std::io::Write;

use anyhow::Result;
use rand::Rng;
use sfa::automaton::serialize_grail;
use sfa::corpus;
use sfa::gf2::poly_mod_longdiv;
use sfa::matcher::match_parallel;
use sfa::sfa::serialize_sfa;
use sfa::{BuildConfig, Dfa, FingerprintContext, Sfa, SfaState, Strategy};

pub const WORKERS: [usize; 5] = [1, 2, 3, 5, 8];
const MAX_CHUNKS: usize = 8;

pub struct Options {
    pub seed: u64,
    pub random: usize,
    pub ctx: FingerprintContext,
    pub config: BuildConfig,
}

/// Checks `target` and `opts.random` seeded DFAs. Stops at the first
/// discrepancy, writing a reproducer, and returns whether all checks
/// passed.
pub fn run(target: &Dfa, given: Option<&Sfa>, opts: &Options, out: &mut impl Write) -> Result<bool> {
    let mut rng = corpus::rng(opts.seed);
    let mut dfas = vec![("input".to_string(), target.clone())];
    for (i, d) in corpus::random_corpus(opts.seed, opts.random, 6, 4).into_iter().enumerate() {
        dfas.push((format!("random #{i}"), d));
    }

    for (name, dfa) in &dfas {
        let reference = match check_strategies(dfa, opts, out)? {
            Some(sfa) => sfa,
            None => return fail(out, name, dfa),
        };
        if !check_fingerprints(&reference, &mut rng, &opts.ctx, out)? {
            return fail(out, name, dfa);
        }
        if !check_matching(dfa, &reference, &mut rng, out)? {
            return fail(out, name, dfa);
        }
        writeln!(out, "pass {name}: {} DFA states, {} SFA states", dfa.n_states(), reference.n_states())?;
    }

    if let Some(sfa) = given {
        if let Err(e) = sfa.check_against(target) {
            writeln!(out, "FAIL given SFA: {e}")?;
            return fail(out, "input", target);
        }
        let built = sfa::build(target, Strategy::Hash, 1, &opts.ctx, &opts.config)?.0.canonicalize();
        if sfa.canonicalize() != built {
            writeln!(out, "FAIL given SFA: {} states, expected {}", sfa.n_states(), built.n_states())?;
            return fail(out, "input", target);
        }
        writeln!(out, "pass given SFA")?;
    }
    writeln!(out, "verify: pass")?;
    Ok(true)
}

fn fail(out: &mut impl Write, name: &str, dfa: &Dfa) -> Result<bool> {
    writeln!(out, "reproducer ({name}):")?;
    write!(out, "{}", serialize_grail(dfa))?;
    writeln!(out, "verify: FAIL")?;
    Ok(false)
}

/// Builds with every strategy and worker count; returns the canonical
/// SFA when all agree and it is consistent with the DFA.
fn check_strategies(dfa: &Dfa, opts: &Options, out: &mut impl Write) -> Result<Option<Sfa>> {
    let reference = sfa::build(dfa, Strategy::Exhaustive, 1, &opts.ctx, &opts.config)?.0.canonicalize();
    if let Err(e) = reference.check_against(dfa) {
        writeln!(out, "FAIL exhaustive build is inconsistent: {e}")?;
        return Ok(None);
    }
    for strategy in Strategy::ALL {
        let counts: &[usize] = if strategy.is_parallel() { &WORKERS } else { &[1] };
        for &w in counts {
            let got = sfa::build(dfa, strategy, w, &opts.ctx, &opts.config)?.0.canonicalize();
            if got != reference {
                writeln!(out, "FAIL {strategy} with {w} workers differs from exhaustive")?;
                writeln!(out, "expected:\n{}got:\n{}", serialize_sfa(&reference), serialize_sfa(&got))?;
                return Ok(None);
            }
        }
    }
    Ok(Some(reference))
}

fn check_fingerprints(sfa: &Sfa, rng: &mut impl Rng, ctx: &FingerprintContext, out: &mut impl Write) -> Result<bool> {
    let mask = match ctx.fingerprint_bits() {
        64 => u64::MAX,
        b => (1u64 << b) - 1,
    };
    let mut inputs: Vec<Vec<u8>> = sfa
        .maps()
        .take(1000)
        .map(|m| SfaState::from_map(m.to_vec()).canonical_bytes())
        .collect::<Result<_, _>>()?;
    for _ in 0..200 {
        let len = rng.gen_range(0..=64);
        inputs.push((0..len).map(|_| rng.gen()).collect());
    }
    for data in inputs {
        let fast = ctx.fingerprint(&data).0;
        let slow = poly_mod_longdiv(&data, ctx.modulus()).0 & mask;
        if fast != slow {
            writeln!(out, "FAIL fingerprint of {data:02x?}: {fast:#x} but long division gives {slow:#x}")?;
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_matching(dfa: &Dfa, sfa: &Sfa, rng: &mut impl Rng, out: &mut impl Write) -> Result<bool> {
    let differs = |text: &[u8], chunks: usize| -> bool {
        let want = dfa.dfa_match(text).expect("generated from the alphabet");
        match_parallel(sfa, dfa, text, chunks).ok() != Some(want)
    };
    for _ in 0..20 {
        let len = rng.gen_range(0..=500);
        let text = corpus::random_input(rng, dfa, len);
        for chunks in 1..=MAX_CHUNKS {
            if differs(&text, chunks) {
                let small = shrink(text, |t| differs(t, chunks));
                writeln!(
                    out,
                    "FAIL parallel match with {chunks} chunks disagrees on {:?}",
                    String::from_utf8_lossy(&small)
                )?;
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Drops single characters while `still_fails` keeps holding.
fn shrink(mut text: Vec<u8>, still_fails: impl Fn(&[u8]) -> bool) -> Vec<u8> {
    let mut i = 0;
    while i < text.len() {
        let mut shorter = text.clone();
        shorter.remove(i);
        if still_fails(&shorter) {
            text = shorter;
        } else {
            i += 1;
        }
    }
    text
}
