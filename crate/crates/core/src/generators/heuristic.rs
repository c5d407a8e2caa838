use std::collections::BTreeSet;

use super::{Generator, StepInput, StepOutput};
use crate::collection::Oracle;
use crate::error::{Error, Result};
use crate::game::SampleSet;
use crate::universe::{Element, Universe, UniverseId};

/// With `i < j` the two largest integers in `S`, the id of `i + 2(j - i)`.
pub fn obscured_heuristic(sample: &SampleSet) -> Result<UniverseId> {
    let u = Universe::Integers;
    let mut values: Vec<i64> = sample
        .distinct()
        .iter()
        .map(|&w| u.element_at(w).as_int().expect("integer universe"))
        .collect();
    if values.len() < 2 {
        return Err(Error::InsufficientSample(values.len()));
    }
    values.sort_unstable();
    let (i, j) = (values[values.len() - 2], values[values.len() - 1]);
    let next = j
        .checked_mul(2)
        .and_then(|v| v.checked_sub(i))
        .ok_or(crate::error::UniverseError::Overflow)?;
    Ok(u.index_of(&Element::Int(next))?)
}

/// Extrapolates the last gap of the sample.
#[derive(Clone, Copy, Debug, Default)]
pub struct HeuristicGenerator;

impl Generator for HeuristicGenerator {
    fn name(&self) -> String {
        "heuristic-i2b".into()
    }

    fn supports_exclusion(&self) -> bool {
        false
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        if oracle.universe().is_strings() {
            return Err(Error::Unsupported(
                "heuristic-i2b needs the integer universe".into(),
            ));
        }
        match obscured_heuristic(input.sample) {
            Ok(w) => Ok(StepOutput::emit(w)),
            Err(Error::InsufficientSample(_)) => {
                Ok(StepOutput::fallback(input.sample.least_absent(excluded)))
            }
            Err(e) => Err(e),
        }
    }
}
