use std::fmt;
use std::str::FromStr;

use crate::automaton::Dfa;
use crate::gf2::FingerprintContext;
use crate::par;
use crate::sfa::{build_sfa, BuildConfig, BuildError, BuildStats, Sfa, StoreStrategy};

/// Every way this crate can construct an SFA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Exhaustive,
    Fingerprint,
    Hash,
    ParSymbols,
    ParGroups,
    ParMixed,
    ParTransposed,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Exhaustive,
        Strategy::Fingerprint,
        Strategy::Hash,
        Strategy::ParSymbols,
        Strategy::ParGroups,
        Strategy::ParMixed,
        Strategy::ParTransposed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Fingerprint => "fp",
            Strategy::Hash => "hash",
            Strategy::ParSymbols => "par-symbols",
            Strategy::ParGroups => "par-groups",
            Strategy::ParMixed => "par-mixed",
            Strategy::ParTransposed => "par-transposed",
        }
    }

    pub fn is_parallel(self) -> bool {
        !matches!(self, Strategy::Exhaustive | Strategy::Fingerprint | Strategy::Hash)
    }

    /// The static layout that actually runs for `workers` workers.
    ///
    /// The three static layouts cover disjoint worker counts; a request
    /// for one whose precondition does not hold falls back to the layout
    /// that does (partition for `P <= |Σ|`, groups for multiples of `|Σ|`,
    /// mixed otherwise).
    pub fn resolve(self, alphabet_size: usize, workers: usize) -> Strategy {
        match self {
            Strategy::ParSymbols | Strategy::ParGroups | Strategy::ParMixed => {
                if workers <= alphabet_size {
                    Strategy::ParSymbols
                } else if workers.is_multiple_of(alphabet_size) {
                    Strategy::ParGroups
                } else {
                    Strategy::ParMixed
                }
            }
            other => other,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy `{0}` (expected exhaustive, fp, hash, par-symbols, par-groups, par-mixed or par-transposed)")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// Builds the SFA of `dfa` with `strategy`. Sequential strategies ignore
/// `workers`; parallel ones need at least one.
pub fn build(
    dfa: &Dfa,
    strategy: Strategy,
    workers: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
) -> Result<(Sfa, BuildStats), BuildError> {
    if strategy.is_parallel() && workers == 0 {
        return Err(BuildError::Precondition("at least one worker is required".into()));
    }
    match strategy.resolve(dfa.alphabet_size(), workers) {
        Strategy::Exhaustive => build_sfa(dfa, StoreStrategy::Exhaustive, Some(ctx), config),
        Strategy::Fingerprint => build_sfa(dfa, StoreStrategy::Fingerprint, Some(ctx), config),
        Strategy::Hash => build_sfa(dfa, StoreStrategy::Hash, Some(ctx), config),
        Strategy::ParSymbols => par::build_par_symbols(dfa, workers, ctx, config),
        Strategy::ParGroups => par::build_par_groups(dfa, workers, ctx, config),
        Strategy::ParMixed => par::build_par_mixed(dfa, workers, ctx, config),
        Strategy::ParTransposed => par::build_par_transposed(dfa, workers, ctx, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("par".parse::<Strategy>().is_err());
    }

    #[test]
    fn static_layouts_resolve_by_worker_count() {
        assert_eq!(Strategy::ParGroups.resolve(4, 3), Strategy::ParSymbols);
        assert_eq!(Strategy::ParSymbols.resolve(4, 8), Strategy::ParGroups);
        assert_eq!(Strategy::ParSymbols.resolve(4, 5), Strategy::ParMixed);
        assert_eq!(Strategy::ParTransposed.resolve(4, 5), Strategy::ParTransposed);
        assert_eq!(Strategy::Hash.resolve(4, 5), Strategy::Hash);
    }
}
