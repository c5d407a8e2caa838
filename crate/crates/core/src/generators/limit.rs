use std::collections::BTreeSet;

use super::engine::{CriticalEngine, CriticalRecord, EngineOutcome, Selector};
use super::{Generator, StepInput, StepOutput};
use crate::collection::Oracle;
use crate::error::{Error, Result};
use crate::universe::UniverseId;

/// Generation in the limit from membership queries alone.
///
/// Each step draws the least unseen member of the highest (t,m)-critical
/// language, growing `m` until one exists in the prefix.
#[derive(Clone, Debug)]
pub struct LimitGenerator {
    engine: CriticalEngine,
}

impl LimitGenerator {
    pub fn new(ceiling: u64) -> Self {
        LimitGenerator {
            engine: CriticalEngine::new(ceiling),
        }
    }

    pub fn recording(mut self) -> Self {
        self.engine.set_recording(true);
        self
    }

    pub fn engine(&self) -> &CriticalEngine {
        &self.engine
    }
}

impl Default for LimitGenerator {
    fn default() -> Self {
        Self::new(super::DEFAULT_ITERATION_CEILING)
    }
}

impl Generator for LimitGenerator {
    fn name(&self) -> String {
        "limit".into()
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let sample = input.sample;
        let accept = |w: UniverseId| !sample.contains(w) && !excluded.contains(&w);
        match self
            .engine
            .run_step(oracle, input.t, sample, Selector::MaxCritical, &accept)?
        {
            EngineOutcome::Found {
                output,
                n,
                m_start,
                m,
                disruptive,
            } => Ok(StepOutput {
                output: Some(output),
                n_t: Some(n),
                m_start: Some(m_start),
                m_t: Some(m),
                disruptive,
                ..Default::default()
            }),
            EngineOutcome::NoConsistent { m_start } => Ok(StepOutput {
                m_start: Some(m_start),
                m_t: Some(m_start),
                ..StepOutput::fallback(sample.least_absent(excluded))
            }),
            EngineOutcome::NoSelectable { .. } => Err(Error::Invariant {
                step: input.t,
                msg: "least consistent language is not critical".into(),
            }),
        }
    }

    fn take_records(&mut self) -> Vec<CriticalRecord> {
        self.engine.take_records()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::families::{worked_matrix, WORKED_STREAM};
    use crate::collection::{IntCollection, IntLanguage};
    use crate::game::SampleSet;

    #[test]
    fn worked_example_outputs() {
        let oracle = Oracle::from_collection(worked_matrix());
        let mut g = LimitGenerator::default();
        let mut sample = SampleSet::new();
        let mut got = Vec::new();
        for (t, &w) in WORKED_STREAM.iter().enumerate() {
            sample.push(UniverseId::from_index(w));
            let out = g.step(&oracle, &StepInput::new(t + 1, &sample)).unwrap();
            got.push((out.id().get(), out.fallback, out.m_t.unwrap()));
        }
        assert_eq!(
            got,
            [
                (1, true, 2),
                (7, false, 7),
                (10, false, 10),
                (12, false, 12),
                (15, false, 15)
            ]
        );
    }

    #[test]
    fn single_full_language() {
        let oracle = Oracle::from_collection(IntCollection::list(vec![IntLanguage::q(0, 1)]));
        let sample = SampleSet::from_ids([1]);
        let out = LimitGenerator::default()
            .step(&oracle, &StepInput::new(1, &sample))
            .unwrap();
        // 0 is u1, so the least new member is 1 = u2
        assert_eq!(out.id(), UniverseId::from_index(2));
    }
}
