use std::collections::BTreeSet;

use super::engine::CriticalRecord;
use super::{least_new_member, Generator, StepInput, StepOutput};
use crate::collection::{Capabilities, Capability, Oracle};
use crate::error::Result;
use crate::game::SampleSet;
use crate::universe::UniverseId;

/// `{i ≤ n : S ⊆ L_i}`, stopping at the first missing sample per language.
pub fn consistent_indices(oracle: &Oracle, sample: &SampleSet, n: usize) -> Vec<usize> {
    let n = oracle.size().clamp(n);
    (1..=n)
        .filter(|&i| sample.distinct().iter().all(|&w| oracle.member(i, w)))
        .collect()
}

/// Consistent `i ≤ n` with `L_i ⊆ L_j` for every consistent `j < i`.
pub fn critical_indices_exact(
    oracle: &Oracle,
    sample: &SampleSet,
    n: usize,
) -> Result<CriticalRecord> {
    oracle.require(Capability::SubsetQuery)?;
    let consistent = consistent_indices(oracle, sample, n);
    let mut critical = Vec::new();
    for &i in &consistent {
        let mut ok = true;
        for &j in consistent.iter().take_while(|&&j| j < i) {
            if !oracle.subset_query(i, j)? {
                ok = false;
                break;
            }
        }
        if ok {
            critical.push(i);
        }
    }
    Ok(CriticalRecord {
        t: n,
        m: None,
        n_t: critical.last().copied(),
        consistent,
        critical,
    })
}

/// The least unseen member of the highest critical language in `C|_t`, or
/// the least id outside `S` when nothing in `C|_t` is consistent.
pub fn f_c(oracle: &Oracle, sample: &SampleSet, t: usize) -> Result<UniverseId> {
    Ok(FcGenerator::new()
        .step(oracle, &StepInput::new(t, sample))?
        .id())
}

/// Step function built on exact subset queries.
#[derive(Clone, Debug, Default)]
pub struct FcGenerator;

impl FcGenerator {
    pub fn new() -> Self {
        FcGenerator
    }
}

impl Generator for FcGenerator {
    fn name(&self) -> String {
        "f_c".into()
    }

    fn requires(&self) -> Capabilities {
        Capabilities::SUBSET
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let record = critical_indices_exact(oracle, input.sample, input.t)?;
        Ok(match record.n_t {
            Some(n) => StepOutput {
                n_t: Some(n),
                ..StepOutput::emit(least_new_member(oracle, n, input.sample, excluded))
            },
            None => StepOutput::fallback(input.sample.least_absent(excluded)),
        })
    }
}
