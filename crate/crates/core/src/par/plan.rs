use crate::automaton::Symbol;
use crate::sfa::BuildError;

/// Disjoint contiguous symbol blocks `B_0..B_{P-1}` covering the alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolDistribution {
    pub blocks: Vec<Vec<Symbol>>,
}

impl SymbolDistribution {
    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Splits `alphabet_size` symbols into `workers` balanced blocks in
/// alphabet order; larger blocks come first.
pub fn distribute_symbols(alphabet_size: usize, workers: usize) -> Result<SymbolDistribution, BuildError> {
    if workers == 0 || workers > alphabet_size {
        return Err(BuildError::Precondition(format!(
            "symbol partition needs 1..={alphabet_size} workers, got {workers}"
        )));
    }
    Ok(SymbolDistribution { blocks: balanced_blocks(alphabet_size, workers) })
}

fn balanced_blocks(len: usize, parts: usize) -> Vec<Vec<Symbol>> {
    let (base, extra) = (len / parts, len % parts);
    let mut next = 0usize;
    (0..parts)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let block = (next..next + size).map(|a| a as Symbol).collect();
            next += size;
            block
        })
        .collect()
}

/// Worker layout when there are more workers than symbols.
///
/// There are `groups = ceil(P / |Σ|)` groups. SFA state `i` belongs to
/// group `i mod groups`. Full groups have one worker per symbol; when `P`
/// is not a multiple of `|Σ|` the last group has `last_group_size` workers
/// sharing the symbols in balanced blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlan {
    pub alphabet_size: usize,
    pub groups: usize,
    pub full_groups: usize,
    pub last_group_size: usize,
}

pub fn plan_groups(alphabet_size: usize, workers: usize) -> Result<GroupPlan, BuildError> {
    if alphabet_size == 0 || workers <= alphabet_size {
        return Err(BuildError::Precondition(format!(
            "grouping needs more than {alphabet_size} workers, got {workers}"
        )));
    }
    Ok(GroupPlan::new(alphabet_size, workers))
}

impl GroupPlan {
    /// Also accepts `workers == alphabet_size` (a single full group).
    pub(crate) fn new(alphabet_size: usize, workers: usize) -> Self {
        let groups = workers.div_ceil(alphabet_size);
        let rem = workers % alphabet_size;
        if rem == 0 {
            GroupPlan { alphabet_size, groups, full_groups: groups, last_group_size: alphabet_size }
        } else {
            GroupPlan { alphabet_size, groups, full_groups: groups - 1, last_group_size: rem }
        }
    }

    pub fn total_workers(&self) -> usize {
        if self.full_groups == self.groups {
            self.groups * self.alphabet_size
        } else {
            self.full_groups * self.alphabet_size + self.last_group_size
        }
    }

    pub(crate) fn workers(&self) -> Vec<WorkerPlan> {
        let mut out = Vec::with_capacity(self.total_workers());
        for k in 0..self.full_groups {
            for j in 0..self.alphabet_size {
                out.push(WorkerPlan { modulus: self.groups, residue: k, symbols: vec![j as Symbol] });
            }
        }
        if self.full_groups < self.groups {
            for block in balanced_blocks(self.alphabet_size, self.last_group_size) {
                out.push(WorkerPlan { modulus: self.groups, residue: self.groups - 1, symbols: block });
            }
        }
        out
    }
}

/// What one worker expands: states with `id mod modulus == residue`, on
/// `symbols`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WorkerPlan {
    pub modulus: usize,
    pub residue: usize,
    pub symbols: Vec<Symbol>,
}

pub(crate) fn symbol_workers(dist: &SymbolDistribution) -> Vec<WorkerPlan> {
    dist.blocks
        .iter()
        .map(|b| WorkerPlan { modulus: 1, residue: 0, symbols: b.clone() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_distribution_examples() {
        assert_eq!(distribute_symbols(20, 8).unwrap().sizes(), vec![3, 3, 3, 3, 2, 2, 2, 2]);
        assert_eq!(distribute_symbols(3, 3).unwrap().blocks, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(distribute_symbols(20, 1).unwrap().sizes(), vec![20]);
        assert!(distribute_symbols(3, 4).is_err());
        assert!(distribute_symbols(3, 0).is_err());
    }

    #[test]
    fn group_plan_examples() {
        let p = plan_groups(20, 40).unwrap();
        assert_eq!((p.groups, p.full_groups, p.last_group_size), (2, 2, 20));
        let p = plan_groups(20, 28).unwrap();
        assert_eq!((p.groups, p.full_groups, p.last_group_size), (2, 1, 8));
        let last: Vec<usize> = p.workers()[20..].iter().map(|w| w.symbols.len()).collect();
        assert_eq!(last, vec![3, 3, 3, 3, 2, 2, 2, 2]);
        let p = plan_groups(20, 21).unwrap();
        assert_eq!((p.groups, p.full_groups, p.last_group_size), (2, 1, 1));
        assert_eq!(p.workers()[20].symbols.len(), 20);
        assert!(plan_groups(20, 20).is_err());
        let p = plan_groups(4, 6).unwrap();
        assert_eq!((p.groups, p.full_groups, p.last_group_size), (2, 1, 2));
    }

    #[test]
    fn every_state_class_and_symbol_owned_exactly_once() {
        for k in 1..=6 {
            for workers in 1..=20 {
                let plans = if workers <= k {
                    symbol_workers(&distribute_symbols(k, workers).unwrap())
                } else {
                    let p = plan_groups(k, workers).unwrap();
                    assert_eq!(p.total_workers(), workers);
                    p.workers()
                };
                assert_eq!(plans.len(), workers);
                let modulus = plans[0].modulus;
                for residue in 0..modulus {
                    for a in 0..k as Symbol {
                        let owners = plans
                            .iter()
                            .filter(|w| w.residue == residue && w.symbols.contains(&a))
                            .count();
                        assert_eq!(owners, 1, "k={k} P={workers} residue={residue} a={a}");
                    }
                }
            }
        }
    }
}
