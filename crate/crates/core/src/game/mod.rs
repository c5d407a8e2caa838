//! The generation game: an adversary enumerates a hidden language `K`, the
//! generator answers every step, and a referee who knows `K` scores each
//! answer.

pub mod adversary;
mod export;
mod prompts;
mod sample;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::collection::{Capability, IntLanguage, LanguageCollection, Oracle, QueryCounts};
use crate::error::{Error, Result};
use crate::generators::{Generator, StepInput};
use crate::universe::{Universe, UniverseId};

pub use adversary::{Adversary, Knowledge, Move};
pub use export::{read_csv_rows, write_csv, CsvRow, CSV_HEADER};
pub use prompts::PromptStrategy;
pub use sample::SampleSet;

/// The hidden language: an index into the collection, or an explicit
/// progression for languages whose index is out of reach.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Index(usize),
    Language(IntLanguage),
}

impl Target {
    pub fn validate(&self, collection: &dyn LanguageCollection) -> Result<()> {
        match self {
            Target::Index(0) => Err(Error::ZeroLanguageIndex),
            Target::Index(z) => match collection.size() {
                crate::collection::CollectionSize::Finite(size) if *z > size => {
                    Err(Error::IndexOutOfRange { index: *z, size })
                }
                _ => Ok(()),
            },
            Target::Language(_) if collection.universe().is_strings() => Err(Error::Scenario(
                "an explicit progression target needs the integer universe".into(),
            )),
            Target::Language(_) => Ok(()),
        }
    }

    pub fn contains(&self, collection: &dyn LanguageCollection, w: UniverseId) -> bool {
        match self {
            Target::Index(z) => collection.contains(*z, w),
            Target::Language(l) => Universe::Integers
                .element_at(w)
                .as_int()
                .is_some_and(|x| l.contains(x)),
        }
    }

    pub fn describe(&self, collection: &dyn LanguageCollection) -> String {
        match self {
            Target::Index(z) => format!("L{z} = {}", collection.describe(*z)),
            Target::Language(l) => l.to_string(),
        }
    }
}

/// Scores outputs with full knowledge of `K`. Never touches the generator's
/// query counters.
#[derive(Clone, Debug)]
pub struct Referee {
    k: Knowledge,
}

impl Referee {
    pub fn new(k: Knowledge) -> Self {
        Referee { k }
    }

    /// `a ∈ K − S`, and `p` is a prefix of `a` when a prompt is given.
    pub fn judge(&self, a: UniverseId, sample: &SampleSet, prompt: Option<&str>) -> bool {
        let prefixed = match prompt {
            None | Some("") => true,
            Some(p) => self.k.universe().word(a).is_some_and(|w| w.starts_with(p)),
        };
        prefixed && !sample.contains(a) && self.k.contains(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub w_t: UniverseId,
    pub w_element: String,
    pub p_t: Option<String>,
    pub a_t: UniverseId,
    pub a_element: String,
    pub valid: bool,
    pub fallback: bool,
    pub n_t: Option<usize>,
    pub m_t: Option<u64>,
    pub guess: Option<usize>,
    /// Cumulative query counts after this step.
    pub queries: QueryCounts,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub steps_requested: usize,
    pub steps_run: usize,
    /// First step from which every later step was valid.
    pub t_hat: Option<usize>,
    pub valid_steps: usize,
    pub longest_valid_run: usize,
    pub fallback_steps: usize,
    pub guess_changes: usize,
    pub distinct_guesses: usize,
    pub max_m_t: Option<u64>,
    pub queries: QueryCounts,
}

impl TraceSummary {
    pub fn from_steps(steps: &[StepRecord], requested: usize) -> Self {
        let mut s = TraceSummary {
            steps_requested: requested,
            steps_run: steps.len(),
            ..Default::default()
        };
        let mut run = 0;
        let mut prev_guess = None;
        let mut guesses = BTreeSet::new();
        for r in steps {
            if r.valid {
                s.valid_steps += 1;
                run += 1;
                s.longest_valid_run = s.longest_valid_run.max(run);
            } else {
                run = 0;
            }
            s.fallback_steps += usize::from(r.fallback);
            if let Some(g) = r.guess {
                if prev_guess.is_some_and(|p| p != g) {
                    s.guess_changes += 1;
                }
                prev_guess = Some(g);
                guesses.insert(g);
            }
            s.max_m_t = s.max_m_t.max(r.m_t);
        }
        s.distinct_guesses = guesses.len();
        s.t_hat = t_hat(steps.iter().map(|r| r.valid));
        s.queries = steps.last().map(|r| r.queries).unwrap_or_default();
        s
    }
}

/// First step after which every observed step is valid; `None` when the
/// last step is invalid or nothing ran.
pub fn t_hat(valid: impl IntoIterator<Item = bool>) -> Option<usize> {
    let v: Vec<bool> = valid.into_iter().collect();
    match v.iter().rposition(|&ok| !ok) {
        None if v.is_empty() => None,
        None => Some(1),
        Some(last) if last + 1 == v.len() => None,
        Some(last) => Some(last + 2),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameTrace {
    pub scenario: String,
    pub collection: String,
    pub target: String,
    pub adversary: String,
    pub generator: String,
    pub prompts: String,
    pub steps: Vec<StepRecord>,
    pub summary: TraceSummary,
    pub aborted: Option<String>,
    pub adversary_report: Option<serde_json::Value>,
}

impl GameTrace {
    pub fn outputs(&self) -> Vec<u64> {
        self.steps.iter().map(|r| r.a_t.get()).collect()
    }

    pub fn run_summary(&self) -> RunSummary {
        RunSummary {
            scenario: self.scenario.clone(),
            generator: self.generator.clone(),
            steps: self.summary.steps_requested,
            steps_run: self.summary.steps_run,
            t_hat: self.summary.t_hat,
            valid_steps: self.summary.valid_steps,
            membership_queries: self.summary.queries.membership,
            subset_queries: self.summary.queries.subset,
            regular_queries: self.summary.queries.regular,
            max_m_t: self.summary.max_m_t,
            guess_changes: self.summary.guess_changes,
            aborted: self.aborted.clone(),
        }
    }
}

/// Per-run totals written next to a trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub generator: String,
    pub steps: usize,
    pub steps_run: usize,
    pub t_hat: Option<usize>,
    pub valid_steps: usize,
    pub membership_queries: u64,
    pub subset_queries: u64,
    pub regular_queries: u64,
    pub max_m_t: Option<u64>,
    pub guess_changes: usize,
    pub aborted: Option<String>,
}

/// Fails when the generator cannot run against this collection and prompt
/// strategy.
pub fn check_compatible(
    oracle: &Oracle,
    generator: &dyn Generator,
    prompts: &PromptStrategy,
) -> Result<()> {
    let needs = generator.requires();
    for cap in [
        Capability::SubsetQuery,
        Capability::RegularQuery,
        Capability::FiniteIntersections,
    ] {
        if needs.has(cap) && !oracle.capabilities().has(cap) {
            return Err(Error::CapabilityMissing(cap));
        }
    }
    if !prompts.is_none() && !generator.uses_prompts() {
        return Err(Error::Scenario(format!(
            "generator {} does not take prompts",
            generator.name()
        )));
    }
    for p in prompts.prompts() {
        match oracle.universe().alphabet() {
            Some(a) => {
                a.encode(p)?;
            }
            None if p.is_empty() => {}
            None => return Err(Error::Scenario("prompts need a string universe".into())),
        }
    }
    Ok(())
}

/// Plays up to `steps` rounds. Query counts are taken on a fresh copy of
/// `oracle`, so they cover this run only.
pub fn run_game(
    oracle: &Oracle,
    knowledge: &Knowledge,
    adversary: &mut dyn Adversary,
    generator: &mut dyn Generator,
    prompts: &PromptStrategy,
    steps: usize,
) -> Result<GameTrace> {
    if steps == 0 {
        return Err(Error::Scenario("step budget must be at least 1".into()));
    }
    check_compatible(oracle, generator, prompts)?;
    let oracle = oracle.fresh();
    let referee = Referee::new(knowledge.clone());
    let universe = oracle.universe().clone();
    let mut sample = SampleSet::new();
    let mut records = Vec::with_capacity(steps);
    let mut aborted = None;
    for t in 1..=steps {
        let w = match adversary.next(t)? {
            Move::Emit(w) => w,
            Move::Stop(reason) => {
                aborted = Some(reason);
                break;
            }
        };
        if !knowledge.contains(w) {
            return Err(Error::Scenario(format!(
                "adversary emitted {} which is not in the target language",
                universe.element_at(w)
            )));
        }
        sample.push(w);
        let prompt = prompts.prompt(t);
        let mut input = StepInput::new(t, &sample);
        input.prompt = prompt;
        let out = generator.step(&oracle, &input)?;
        let a = out.id();
        let valid = referee.judge(a, &sample, prompt);
        adversary.observe(&out);
        records.push(StepRecord {
            t,
            w_t: w,
            w_element: universe.element_at(w).to_string(),
            p_t: prompt.map(str::to_string),
            a_t: a,
            a_element: universe.element_at(a).to_string(),
            valid,
            fallback: out.fallback,
            n_t: out.n_t,
            m_t: out.m_t,
            guess: out.guess,
            queries: oracle.counts(),
        });
    }
    let summary = TraceSummary::from_steps(&records, steps);
    let collection = oracle.collection().name();
    Ok(GameTrace {
        scenario: String::new(),
        target: knowledge.target().describe(knowledge.collection().as_ref()),
        collection,
        adversary: adversary.name(),
        generator: generator.name(),
        prompts: prompts.to_string(),
        steps: records,
        summary,
        aborted,
        adversary_report: adversary.report(),
    })
}

/// Convenience for tests and suites: a shared collection plus target.
pub fn knowledge(collection: &Arc<dyn LanguageCollection>, target: Target) -> Result<Knowledge> {
    Knowledge::new(collection.clone(), target)
}
