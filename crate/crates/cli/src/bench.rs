use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use sfa::automaton::parse_grail;
use sfa::{BuildConfig, FingerprintContext, Strategy};

use crate::report::{BenchRecord, HEADER};

const EXTENSIONS: [&str; 3] = ["grail", "dfa", "fa"];

/// Appends the header and one record per (file, strategy, workers) to
/// `report`. Each record carries the median wall time of `reps` builds
/// and the counters of that median run.
pub fn run(
    dir: &Path,
    strategies: &[Strategy],
    workers: &[usize],
    reps: usize,
    ctx: &FingerprintContext,
    config: &BuildConfig,
    report: &mut String,
) -> Result<()> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| EXTENSIONS.iter().any(|e| x == *e)))
        .collect();
    files.sort();

    writeln!(report, "{HEADER}")?;
    for path in files {
        let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
        let dfa = parse_grail(&text).with_context(|| format!("cannot parse {}", path.display()))?;
        let name = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
        for &strategy in strategies {
            for &w in workers {
                let mut runs = Vec::with_capacity(reps);
                for _ in 0..reps {
                    let (_, stats) = sfa::build(&dfa, strategy, w, ctx, config)
                        .with_context(|| format!("{name}: {strategy} with {w} workers"))?;
                    runs.push(stats);
                }
                runs.sort_by_key(|s| s.wall_time_ns);
                let median = &runs[(runs.len() - 1) / 2];
                writeln!(report, "{}", BenchRecord::new(&name, dfa.n_states(), strategy.name(), w, median))?;
            }
        }
    }
    Ok(())
}
