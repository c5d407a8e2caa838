use std::collections::BTreeSet;

use super::{least_new_member, Generator, StepInput, StepOutput};
use crate::collection::Oracle;
use crate::error::Result;
use crate::universe::UniverseId;

/// Hypothesis enumeration: keep guessing the current language until the
/// sample contradicts it, then move to the next consistent index. Outputs
/// the least unseen member of the current guess.
#[derive(Clone, Debug)]
pub struct BaselineIdentifier {
    guess: usize,
}

impl BaselineIdentifier {
    pub fn new() -> Self {
        BaselineIdentifier { guess: 1 }
    }

    /// Least consistent index `≥` the previous guess within `C|_t`.
    pub fn identify(&mut self, oracle: &Oracle, input: &StepInput<'_>) -> Option<usize> {
        let scope = oracle.size().clamp(input.t);
        let found = (self.guess..=scope)
            .find(|&i| input.sample.distinct().iter().all(|&w| oracle.member(i, w)));
        if let Some(i) = found {
            self.guess = i;
        }
        found
    }
}

impl Default for BaselineIdentifier {
    fn default() -> Self {
        Self::new()
    }
}

impl Generator for BaselineIdentifier {
    fn name(&self) -> String {
        "identify-baseline".into()
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        Ok(match self.identify(oracle, input) {
            Some(i) => StepOutput {
                guess: Some(i),
                n_t: Some(i),
                ..StepOutput::emit(least_new_member(oracle, i, input.sample, excluded))
            },
            None => StepOutput::fallback(input.sample.least_absent(excluded)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::{IntCollection, IntLanguage};
    use crate::game::SampleSet;
    use crate::universe::{Element, Universe};

    fn id(x: i64) -> UniverseId {
        Universe::Integers.index_of(&Element::Int(x)).unwrap()
    }

    #[test]
    fn overly_general_language_traps_the_guess() {
        let o = Oracle::from_collection(IntCollection::list(vec![
            IntLanguage::q(0, 1),
            IntLanguage::p(0, 2),
        ]));
        let mut g = BaselineIdentifier::new();
        let mut s = SampleSet::new();
        for (t, x) in [0, 2, 4, 6, 8].into_iter().enumerate() {
            s.push(id(x));
            let out = g.step(&o, &StepInput::new(t + 1, &s)).unwrap();
            assert_eq!(out.guess, Some(1));
        }
    }

    #[test]
    fn contradiction_advances_the_guess() {
        let o = Oracle::from_collection(IntCollection::list(vec![
            IntLanguage::p(0, 2),
            IntLanguage::q(0, 1),
        ]));
        let mut g = BaselineIdentifier::new();
        let s: SampleSet = [id(0), id(3)].into_iter().collect();
        assert_eq!(g.step(&o, &StepInput::new(2, &s)).unwrap().guess, Some(2));
        let none: SampleSet = [id(3)].into_iter().collect();
        let out = BaselineIdentifier::new()
            .step(&o, &StepInput::new(1, &none))
            .unwrap();
        assert!(out.fallback && out.guess.is_none());
    }
}
