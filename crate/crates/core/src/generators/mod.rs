//! Generation algorithms.
//!
//! Every generator answers one step at a time: given `t`, the sample `S_t`
//! and (for prompted generators) a prompt, it returns a universe id. The
//! referee in [`crate::game`] decides whether the answer was valid.

mod baseline;
mod closure;
mod engine;
mod heuristic;
mod limit;
mod norepeat;
mod subset;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::collection::{Capabilities, Oracle};
use crate::error::{Error, Result};
use crate::game::SampleSet;
use crate::universe::UniverseId;

pub use baseline::BaselineIdentifier;
pub use closure::{
    closure_report, closure_stream, finite_bound, ClosureGenerator, ClosureReport, ClosureStream,
    FiniteBound,
};
pub use engine::{
    critical_indices_prefix, CriticalEngine, CriticalRecord, EngineOutcome, Selector,
};
pub use heuristic::{obscured_heuristic, HeuristicGenerator};
pub use limit::LimitGenerator;
pub use norepeat::WithoutRepetition;
pub use subset::{consistent_indices, critical_indices_exact, f_c, FcGenerator};

/// Default bound on iterations per step before a step is abandoned.
pub const DEFAULT_ITERATION_CEILING: u64 = 100_000;

/// Default id ceiling for closure enumeration.
pub const DEFAULT_CLOSURE_CEILING: u64 = 1_000_000;

#[derive(Clone, Copy, Debug)]
pub struct StepInput<'a> {
    pub t: usize,
    pub sample: &'a SampleSet,
    pub prompt: Option<&'a str>,
}

impl<'a> StepInput<'a> {
    pub fn new(t: usize, sample: &'a SampleSet) -> Self {
        StepInput {
            t,
            sample,
            prompt: None,
        }
    }

    pub fn with_prompt(mut self, prompt: &'a str) -> Self {
        self.prompt = Some(prompt);
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StepOutput {
    pub output: Option<UniverseId>,
    /// No suitable language; the output is the least unused id.
    pub fallback: bool,
    /// Identifier guess (language index), for identifying generators.
    pub guess: Option<usize>,
    /// Index of the language the output was drawn from.
    pub n_t: Option<usize>,
    pub m_start: Option<u64>,
    pub m_t: Option<u64>,
    pub disruptive: usize,
}

impl StepOutput {
    pub fn emit(output: UniverseId) -> Self {
        StepOutput {
            output: Some(output),
            ..Default::default()
        }
    }

    pub fn fallback(output: UniverseId) -> Self {
        StepOutput {
            output: Some(output),
            fallback: true,
            ..Default::default()
        }
    }

    pub fn id(&self) -> UniverseId {
        self.output.expect("generator produced an output")
    }
}

pub trait Generator: Send {
    fn name(&self) -> String;

    fn requires(&self) -> Capabilities {
        Capabilities::empty()
    }

    fn uses_prompts(&self) -> bool {
        false
    }

    /// True when each output is the least member of some set, so earlier
    /// outputs can be skipped without changing anything else.
    fn supports_exclusion(&self) -> bool {
        true
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput>;

    fn step(&mut self, oracle: &Oracle, input: &StepInput<'_>) -> Result<StepOutput> {
        self.step_excluding(oracle, input, &BTreeSet::new())
    }

    /// Criticality snapshots gathered since the last call, when recording.
    fn take_records(&mut self) -> Vec<CriticalRecord> {
        Vec::new()
    }
}

/// Names accepted by [`by_name`], in listing order.
pub const GENERATOR_NAMES: &[&str] = &[
    "closure",
    "f_c",
    "limit",
    "limit-norepeat",
    "heuristic-i2b",
    "identify-baseline",
    "prompted-robust",
    "prompted-nontrivial",
];

/// Builds a generator from its registry name. Any generator whose outputs
/// are least elements also accepts a `-norepeat` suffix.
pub fn by_name(name: &str, ceiling: Option<u64>) -> Result<Box<dyn Generator>> {
    if let Some(base) = name.strip_suffix("-norepeat") {
        let inner = by_name(base, ceiling)?;
        if !inner.supports_exclusion() {
            return Err(Error::Unsupported(format!(
                "generator {base} cannot skip earlier outputs"
            )));
        }
        return Ok(Box::new(WithoutRepetition::new(inner)));
    }
    let iter_ceiling = ceiling.unwrap_or(DEFAULT_ITERATION_CEILING);
    Ok(match name {
        "closure" => Box::new(ClosureGenerator::new(
            ceiling.unwrap_or(DEFAULT_CLOSURE_CEILING),
        )),
        "f_c" => Box::new(FcGenerator::new()),
        "limit" => Box::new(LimitGenerator::new(iter_ceiling)),
        "heuristic-i2b" => Box::new(HeuristicGenerator),
        "identify-baseline" => Box::new(BaselineIdentifier::new()),
        "prompted-robust" => Box::new(crate::prompted::RobustPrompted::new(iter_ceiling)),
        "prompted-nontrivial" => Box::new(crate::prompted::NontrivialPrompted::new(iter_ceiling)),
        other => return Err(Error::Scenario(format!("unknown generator {other:?}"))),
    })
}

/// Least id in `L_i` outside the sample and `excluded`, scanning upward.
pub(crate) fn least_new_member(
    oracle: &Oracle,
    i: usize,
    sample: &SampleSet,
    excluded: &BTreeSet<UniverseId>,
) -> UniverseId {
    let mut w = UniverseId::FIRST;
    loop {
        if !sample.contains(w) && !excluded.contains(&w) && oracle.member(i, w) {
            return w;
        }
        w = w.next();
    }
}
