//! Prompted generation: every output must extend the prompt `p_t`.
//!
//! A prompt is robust when every language in scope has arbitrarily long
//! continuations of it; the robust generator then only needs membership
//! queries. A prompt is t-valid for `L_i` when some `p·c ∈ L_i − S_t`; the
//! non-trivial generator decides this with regular queries and draws from
//! the highest language that is both critical and t-valid.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::collection::families::parity_prefix_pair;
use crate::collection::{Capabilities, Capability, Dfa, DfaCollection, LanguageCollection, Oracle};
use crate::error::{Error, Result};
use crate::game::adversary::{Knowledge, WithholdPrefix};
use crate::game::{run_game, PromptStrategy, Referee, SampleSet, Target};
use crate::generators::{
    CriticalEngine, CriticalRecord, EngineOutcome, Generator, Selector, StepInput, StepOutput,
};
use crate::universe::{Alphabet, Element, Universe, UniverseId};

/// Words beginning with `p`, minus the finitely many `excluded` words.
pub fn prefix_dfa(alphabet: &Alphabet, p: &str, excluded: &[String]) -> Result<Dfa> {
    let d = Dfa::with_prefix(alphabet, p)?;
    if excluded.is_empty() {
        Ok(d)
    } else {
        Ok(d.excluding(excluded.iter().map(String::as_str))?)
    }
}

fn sample_words(universe: &Universe, sample: &SampleSet) -> Vec<String> {
    sample
        .distinct()
        .iter()
        .filter_map(|&w| universe.word(w))
        .collect()
}

fn has_prefix(universe: &Universe, w: UniverseId, p: &str) -> bool {
    p.is_empty() || universe.word(w).is_some_and(|s| s.starts_with(p))
}

/// Least id outside `S` and `excluded` extending `p`, trying at most
/// `ceiling` continuations; otherwise the least id outside `S`.
pub fn prompted_fallback(
    universe: &Universe,
    p: &str,
    sample: &SampleSet,
    excluded: &BTreeSet<UniverseId>,
    ceiling: u64,
) -> UniverseId {
    if let (Some(_), false) = (universe.alphabet(), p.is_empty()) {
        for k in 1..=ceiling {
            let c = universe.word(UniverseId::from_index(k)).unwrap_or_default();
            let Ok(w) = universe.index_of(&Element::Str(format!("{p}{c}"))) else {
                break;
            };
            if !sample.contains(w) && !excluded.contains(&w) {
                return w;
            }
        }
    }
    sample.least_absent(excluded)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PromptVerdict {
    pub lang: usize,
    /// `{c : p·c ∈ L_i}` is infinite.
    pub long_continuations: bool,
    /// Some `p·c ∈ L_i − S`.
    pub t_valid: bool,
    /// Least such `p·c`.
    pub witness: Option<UniverseId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PromptClass {
    pub prompt: String,
    pub verdicts: Vec<PromptVerdict>,
    /// Every language in scope has arbitrarily long continuations.
    pub robust: bool,
    /// At least one language in scope is t-valid.
    pub non_trivial: bool,
}

impl PromptClass {
    pub fn t_valid(&self) -> BTreeSet<usize> {
        self.verdicts
            .iter()
            .filter(|v| v.t_valid)
            .map(|v| v.lang)
            .collect()
    }
}

/// Exact per-language prompt verdicts for `L_1..L_scope`.
pub fn classify_prompt(
    oracle: &Oracle,
    scope: usize,
    p: &str,
    sample: &SampleSet,
) -> Result<PromptClass> {
    oracle.require(Capability::RegularQuery)?;
    let universe = oracle.universe();
    let alphabet = universe
        .alphabet()
        .ok_or_else(|| Error::Unsupported("prompts need a string universe".into()))?;
    let prefixed = prefix_dfa(alphabet, p, &[])?;
    let remaining = prefix_dfa(alphabet, p, &sample_words(universe, sample))?;
    let mut verdicts = Vec::new();
    for lang in 1..=oracle.size().clamp(scope) {
        let witness = oracle.regular_nonempty_intersection(lang, &remaining)?;
        verdicts.push(PromptVerdict {
            lang,
            long_continuations: oracle.regular_intersection_infinite(lang, &prefixed)?,
            t_valid: witness.is_some(),
            witness,
        });
    }
    Ok(PromptClass {
        prompt: p.to_string(),
        robust: verdicts.iter().all(|v| v.long_continuations),
        non_trivial: verdicts.iter().any(|v| v.t_valid),
        verdicts,
    })
}

fn check_prompt(universe: &Universe, p: &str) -> Result<()> {
    match universe.alphabet() {
        Some(a) => {
            a.encode(p)?;
            Ok(())
        }
        None if p.is_empty() => Ok(()),
        None => Err(Error::Unsupported("prompts need a string universe".into())),
    }
}

fn found(output: UniverseId, n: usize, m_start: u64, m: u64, disruptive: usize) -> StepOutput {
    StepOutput {
        output: Some(output),
        n_t: Some(n),
        m_start: Some(m_start),
        m_t: Some(m),
        disruptive,
        ..Default::default()
    }
}

/// Limit generation whose outputs must also extend the prompt. Needs only
/// membership queries; assumes every prompt is robust.
#[derive(Clone, Debug)]
pub struct RobustPrompted {
    engine: CriticalEngine,
    ceiling: u64,
}

impl RobustPrompted {
    pub fn new(ceiling: u64) -> Self {
        RobustPrompted {
            engine: CriticalEngine::new(ceiling),
            ceiling,
        }
    }

    pub fn recording(mut self) -> Self {
        self.engine.set_recording(true);
        self
    }
}

impl Generator for RobustPrompted {
    fn name(&self) -> String {
        "prompted-robust".into()
    }

    fn uses_prompts(&self) -> bool {
        true
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let universe = oracle.universe();
        let p = input.prompt.unwrap_or("");
        check_prompt(universe, p)?;
        let sample = input.sample;
        let accept = |w: UniverseId| {
            !sample.contains(w) && !excluded.contains(&w) && has_prefix(universe, w, p)
        };
        Ok(
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
                } => found(output, n, m_start, m, disruptive),
                EngineOutcome::NoConsistent { m_start }
                | EngineOutcome::NoSelectable { m_start, .. } => StepOutput {
                    m_start: Some(m_start),
                    m_t: Some(self.engine.m()),
                    ..StepOutput::fallback(prompted_fallback(
                        universe,
                        p,
                        sample,
                        excluded,
                        self.ceiling,
                    ))
                },
            },
        )
    }

    fn take_records(&mut self) -> Vec<CriticalRecord> {
        self.engine.take_records()
    }
}

/// Prompted generation for prompts that are only non-trivial: restricts the
/// search to languages with an unseen continuation of the prompt, decided
/// afresh every step by regular queries.
#[derive(Clone, Debug)]
pub struct NontrivialPrompted {
    engine: CriticalEngine,
    ceiling: u64,
    last_valid: BTreeSet<usize>,
}

impl NontrivialPrompted {
    pub fn new(ceiling: u64) -> Self {
        NontrivialPrompted {
            engine: CriticalEngine::new(ceiling),
            ceiling,
            last_valid: BTreeSet::new(),
        }
    }

    pub fn recording(mut self) -> Self {
        self.engine.set_recording(true);
        self
    }

    /// Languages found t-valid on the most recent step.
    pub fn last_valid(&self) -> &BTreeSet<usize> {
        &self.last_valid
    }
}

impl Generator for NontrivialPrompted {
    fn name(&self) -> String {
        "prompted-nontrivial".into()
    }

    fn requires(&self) -> Capabilities {
        Capabilities::REGULAR
    }

    fn uses_prompts(&self) -> bool {
        true
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let universe = oracle.universe();
        let p = input.prompt.unwrap_or("");
        check_prompt(universe, p)?;
        let sample = input.sample;
        let class = classify_prompt(oracle, input.t, p, sample)?;
        self.last_valid = class.t_valid();
        let valid = self.last_valid.clone();
        let accept = |w: UniverseId| {
            !sample.contains(w) && !excluded.contains(&w) && has_prefix(universe, w, p)
        };
        let outcome = self.engine.run_step(
            oracle,
            input.t,
            sample,
            Selector::MaxCriticalAmong(&valid),
            &accept,
        )?;
        Ok(match outcome {
            EngineOutcome::Found {
                output,
                n,
                m_start,
                m,
                disruptive,
            } => found(output, n, m_start, m, disruptive),
            EngineOutcome::NoConsistent { m_start }
            | EngineOutcome::NoSelectable { m_start, .. } => StepOutput {
                m_start: Some(m_start),
                m_t: Some(self.engine.m()),
                ..StepOutput::fallback(prompted_fallback(
                    universe,
                    p,
                    sample,
                    excluded,
                    self.ceiling,
                ))
            },
        })
    }

    fn take_records(&mut self) -> Vec<CriticalRecord> {
        self.engine.take_records()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub target: usize,
    pub first_b_step: Option<usize>,
    pub steps: usize,
    /// First step from which every later step was valid.
    pub t_hat: Option<usize>,
    /// `t_hat - first_b_step`, when both exist.
    pub lag: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityReport {
    pub generator: String,
    pub order: Vec<String>,
    pub t0: usize,
    pub output: String,
    pub output_len: usize,
    pub odd: bool,
    /// Indices `z` for which the output is invalid when `K = L_z`.
    pub invalid_for: Vec<usize>,
    pub valid_for: Vec<usize>,
    pub recovery: Vec<Recovery>,
}

/// The parity pair, optionally with its two languages swapped.
pub fn parity_collection(swapped: bool) -> Arc<dyn LanguageCollection> {
    let c = parity_prefix_pair();
    if !swapped {
        return Arc::new(c);
    }
    let langs: Vec<Dfa> = c.languages().iter().rev().cloned().collect();
    let labels = vec![c.describe(2), c.describe(1)];
    Arc::new(
        DfaCollection::labelled("parity_prefix_pair_swapped", langs, labels).expect("valid pair"),
    )
}

/// Feeds `t0` distinct `a`-words, prompts `b`, and names every `K` in the
/// pair for which the generator's answer is invalid. Then, for each such
/// `K`, plays on with `b`-words released after step `t0` and measures how
/// soon the generator becomes valid for good.
pub fn parity_harness(
    collection: Arc<dyn LanguageCollection>,
    make: &dyn Fn() -> Box<dyn Generator>,
    t0: usize,
    recovery_steps: usize,
) -> Result<ParityReport> {
    let oracle = Oracle::new(collection.clone());
    let universe = collection.universe().clone();
    let a_words: Vec<UniverseId> = (1..)
        .map(UniverseId::from_index)
        .filter(|&w| universe.word(w).is_some_and(|s| s.starts_with('a')))
        .take(t0)
        .collect();
    let mut g = make();
    let mut sample = SampleSet::new();
    let mut last = None;
    for (i, &w) in a_words.iter().enumerate() {
        sample.push(w);
        let input = StepInput::new(i + 1, &sample).with_prompt("b");
        last = Some(g.step(&oracle, &input)?.id());
    }
    let out = last.ok_or_else(|| Error::Scenario("t0 must be at least 1".into()))?;
    let word = universe.word(out).unwrap_or_default();
    let mut invalid_for = Vec::new();
    let mut valid_for = Vec::new();
    for z in 1..=2 {
        let referee = Referee::new(Knowledge::new(collection.clone(), Target::Index(z))?);
        if referee.judge(out, &sample, Some("b")) {
            valid_for.push(z);
        } else {
            invalid_for.push(z);
        }
    }
    let mut recovery = Vec::new();
    for &z in &invalid_for {
        let k = Knowledge::new(collection.clone(), Target::Index(z))?;
        let mut adv = WithholdPrefix::new(k.clone(), "b".into(), t0)?;
        let mut gen = make();
        let total = t0 + recovery_steps;
        let trace = run_game(
            &oracle,
            &k,
            &mut adv,
            gen.as_mut(),
            &PromptStrategy::AdaptiveB,
            total,
        )?;
        let first_b = trace
            .steps
            .iter()
            .find(|r| r.w_element.starts_with('b'))
            .map(|r| r.t);
        let t_hat = trace.summary.t_hat;
        recovery.push(Recovery {
            target: z,
            first_b_step: first_b,
            steps: trace.steps.len(),
            t_hat,
            lag: match (t_hat, first_b) {
                (Some(h), Some(b)) => Some(h.saturating_sub(b)),
                _ => None,
            },
        });
    }
    Ok(ParityReport {
        generator: g.name(),
        order: (1..=2).map(|i| collection.describe(i)).collect(),
        t0,
        output_len: word.chars().count(),
        odd: word.chars().count() % 2 == 1,
        output: word,
        invalid_for,
        valid_for,
        recovery,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::families::{star_of, two_block};

    fn ab() -> Alphabet {
        Alphabet::ab()
    }

    fn id(w: &str) -> UniverseId {
        Universe::Strings(ab())
            .index_of(&Element::Str(w.into()))
            .unwrap()
    }

    #[test]
    fn prefix_automaton_examples() {
        let a = prefix_dfa(&ab(), "a", &[]).unwrap();
        assert!(a.accepts("a") && a.accepts("aa") && a.accepts("ab"));
        assert!(!a.accepts("") && !a.accepts("b"));
        let e = prefix_dfa(&ab(), "", &[]).unwrap();
        assert!(e.accepts("") && e.accepts("bab"));
        let x = prefix_dfa(&ab(), "ab", &["ab".into()]).unwrap();
        assert!(!x.accepts("ab") && x.accepts("aba"));
    }

    #[test]
    fn classification_examples() {
        let c = DfaCollection::new(
            "t",
            vec![star_of(&ab(), "ab").unwrap(), star_of(&ab(), "a").unwrap()],
        )
        .unwrap();
        let o = Oracle::from_collection(c);
        let s = SampleSet::new();
        assert!(classify_prompt(&o, 2, "a", &s).unwrap().robust);
        let b = classify_prompt(&o, 2, "b", &s).unwrap();
        assert!(!b.robust);
        assert!(!b.verdicts[1].t_valid && !b.verdicts[1].long_continuations);

        let pair = Oracle::new(parity_collection(false));
        let s: SampleSet = [id("a"), id("aa")].into_iter().collect();
        let pb = classify_prompt(&pair, 2, "b", &s).unwrap();
        assert!(pb.robust && pb.verdicts.iter().all(|v| v.t_valid));
        assert_eq!(pb.verdicts[0].witness, Some(id("b")));
        assert_eq!(pb.verdicts[1].witness, Some(id("ba")));
    }

    #[test]
    fn robust_examples() {
        let o = Oracle::from_collection(
            DfaCollection::new("all", vec![Dfa::universal(&ab())]).unwrap(),
        );
        let s: SampleSet = [id("")].into_iter().collect();
        let out = RobustPrompted::new(1000)
            .step(&o, &StepInput::new(1, &s).with_prompt("a"))
            .unwrap();
        assert_eq!(out.id(), id("a"));
    }

    #[test]
    fn nontrivial_skips_languages_without_continuations() {
        let c = DfaCollection::new(
            "t",
            vec![
                two_block(&ab(), 'a', 'b').unwrap(),
                star_of(&ab(), "a").unwrap(),
            ],
        )
        .unwrap();
        let o = Oracle::from_collection(c);
        let s: SampleSet = [id(""), id("a")].into_iter().collect();
        let mut g = NontrivialPrompted::new(1000);
        let out = g
            .step(&o, &StepInput::new(2, &s).with_prompt("ab"))
            .unwrap();
        assert_eq!(g.last_valid(), &BTreeSet::from([1]));
        assert_eq!(out.id(), id("ab"));
        assert_eq!(out.n_t, Some(1));
    }

    #[test]
    fn fallback_extends_the_prompt() {
        let u = Universe::Strings(ab());
        let s: SampleSet = [id("b"), id("ba")].into_iter().collect();
        assert_eq!(
            prompted_fallback(&u, "b", &s, &BTreeSet::new(), 10),
            id("bb")
        );
        assert_eq!(prompted_fallback(&u, "", &s, &BTreeSet::new(), 10), id(""));
    }
}
