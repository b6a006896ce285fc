use std::fmt;

use sfa::BuildStats;

pub const HEADER: &str =
    "dfa,dfa_states,sfa_states,strategy,workers,wall_time_ns,full_vector_comparisons,fingerprint_comparisons,max_chain_length";

/// One line of a build or bench report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub dfa: String,
    pub dfa_states: usize,
    pub sfa_states: u64,
    pub strategy: String,
    pub workers: usize,
    pub wall_time_ns: u64,
    pub full_vector_comparisons: u64,
    pub fingerprint_comparisons: u64,
    pub max_chain_length: u64,
}

impl BenchRecord {
    pub fn new(dfa: &str, dfa_states: usize, strategy: &str, workers: usize, stats: &BuildStats) -> Self {
        BenchRecord {
            dfa: dfa.to_string(),
            dfa_states,
            sfa_states: stats.n_sfa_states,
            strategy: strategy.to_string(),
            workers,
            wall_time_ns: stats.wall_time_ns,
            full_vector_comparisons: stats.full_vector_comparisons,
            fingerprint_comparisons: stats.fingerprint_comparisons,
            max_chain_length: stats.max_chain_length,
        }
    }
}

impl fmt::Display for BenchRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{},{},{},{}",
            self.dfa,
            self.dfa_states,
            self.sfa_states,
            self.strategy,
            self.workers,
            self.wall_time_ns,
            self.full_vector_comparisons,
            self.fingerprint_comparisons,
            self.max_chain_length
        )
    }
}
