use std::collections::BTreeSet;

use super::{CriticalRecord, Generator, StepInput, StepOutput};
use crate::collection::{Capabilities, Oracle};
use crate::error::Result;
use crate::universe::UniverseId;

/// Wraps a generator so it never repeats one of its own outputs.
pub struct WithoutRepetition<G = Box<dyn Generator>> {
    inner: G,
    produced: BTreeSet<UniverseId>,
}

impl<G: Generator> WithoutRepetition<G> {
    pub fn new(inner: G) -> Self {
        WithoutRepetition {
            inner,
            produced: BTreeSet::new(),
        }
    }

    pub fn produced(&self) -> &BTreeSet<UniverseId> {
        &self.produced
    }
}

impl Generator for Box<dyn Generator> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn requires(&self) -> Capabilities {
        (**self).requires()
    }

    fn uses_prompts(&self) -> bool {
        (**self).uses_prompts()
    }

    fn supports_exclusion(&self) -> bool {
        (**self).supports_exclusion()
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        (**self).step_excluding(oracle, input, excluded)
    }

    fn take_records(&mut self) -> Vec<CriticalRecord> {
        (**self).take_records()
    }
}

impl<G: Generator> Generator for WithoutRepetition<G> {
    fn name(&self) -> String {
        format!("{}-norepeat", self.inner.name())
    }

    fn requires(&self) -> Capabilities {
        self.inner.requires()
    }

    fn uses_prompts(&self) -> bool {
        self.inner.uses_prompts()
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let skip: BTreeSet<UniverseId> = self.produced.union(excluded).copied().collect();
        let out = self.inner.step_excluding(oracle, input, &skip)?;
        if let Some(w) = out.output {
            self.produced.insert(w);
        }
        Ok(out)
    }

    fn take_records(&mut self) -> Vec<CriticalRecord> {
        self.inner.take_records()
    }
}
