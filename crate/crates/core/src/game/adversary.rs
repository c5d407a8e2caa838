//! Adversaries: strategies for enumerating the hidden language.

use std::collections::{BTreeSet, VecDeque};
use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Target;
use crate::collection::{IntLanguage, LanguageCollection};
use crate::error::{Error, Result};
use crate::generators::StepOutput;
use crate::universe::{Element, Universe, UniverseId};

/// Ids scanned past without finding a member before an enumeration gives up.
pub const SCAN_LIMIT: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Emit(UniverseId),
    /// The adversary cannot continue; the run ends with this reason.
    Stop(String),
}

pub trait Adversary: Send {
    fn name(&self) -> String;

    fn next(&mut self, t: usize) -> Result<Move>;

    /// Sees the generator's answer to the element just emitted.
    fn observe(&mut self, _output: &StepOutput) {}

    /// Strategy-specific summary, included in the trace.
    fn report(&self) -> Option<serde_json::Value> {
        None
    }
}

/// Membership in the hidden language, shared by adversaries and the referee.
#[derive(Clone, Debug)]
pub struct Knowledge {
    collection: Arc<dyn LanguageCollection>,
    target: Target,
}

impl Knowledge {
    pub fn new(collection: Arc<dyn LanguageCollection>, target: Target) -> Result<Self> {
        target.validate(collection.as_ref())?;
        Ok(Knowledge { collection, target })
    }

    pub fn contains(&self, w: UniverseId) -> bool {
        self.target.contains(self.collection.as_ref(), w)
    }

    pub fn universe(&self) -> &Universe {
        self.collection.universe()
    }

    pub fn collection(&self) -> &Arc<dyn LanguageCollection> {
        &self.collection
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    /// Least member strictly after `after` accepted by `keep`.
    fn next_member(&self, after: u64, keep: impl Fn(UniverseId) -> bool) -> Option<UniverseId> {
        (after + 1..=after.saturating_add(SCAN_LIMIT))
            .map(UniverseId::from_index)
            .find(|&w| keep(w) && self.contains(w))
    }
}

/// Members of `K` in increasing id order.
#[derive(Clone, Debug)]
pub struct Canonical {
    k: Knowledge,
    cursor: u64,
}

impl Canonical {
    pub fn new(k: Knowledge) -> Self {
        Canonical { k, cursor: 0 }
    }
}

impl Adversary for Canonical {
    fn name(&self) -> String {
        "canonical".into()
    }

    fn next(&mut self, _t: usize) -> Result<Move> {
        match self.k.next_member(self.cursor, |_| true) {
            Some(w) => {
                self.cursor = w.get();
                Ok(Move::Emit(w))
            }
            None => Ok(Move::Stop(format!(
                "no member of K within {SCAN_LIMIT} ids of u{}",
                self.cursor
            ))),
        }
    }
}

/// Canonical order with a finite holdback set kept back until step
/// `release`; from then on holdback elements alternate with the canonical
/// stream until all have appeared.
#[derive(Clone, Debug)]
pub struct DelayedCover {
    k: Knowledge,
    holdback: BTreeSet<UniverseId>,
    pending: VecDeque<UniverseId>,
    release: usize,
    cursor: u64,
    take_held: bool,
}

impl DelayedCover {
    pub fn new(k: Knowledge, holdback: BTreeSet<UniverseId>, release: usize) -> Result<Self> {
        if let Some(bad) = holdback.iter().find(|&&w| !k.contains(w)) {
            return Err(Error::HoldbackNotInTarget(
                k.universe().element_at(*bad).to_string(),
            ));
        }
        Ok(DelayedCover {
            pending: holdback.iter().copied().collect(),
            k,
            holdback,
            release,
            cursor: 0,
            take_held: true,
        })
    }
}

impl Adversary for DelayedCover {
    fn name(&self) -> String {
        "delayed".into()
    }

    fn next(&mut self, t: usize) -> Result<Move> {
        if t >= self.release && self.take_held {
            if let Some(w) = self.pending.pop_front() {
                self.take_held = false;
                return Ok(Move::Emit(w));
            }
        }
        self.take_held = true;
        let held = &self.holdback;
        match self.k.next_member(self.cursor, |w| !held.contains(&w)) {
            Some(w) => {
                self.cursor = w.get();
                Ok(Move::Emit(w))
            }
            None => Ok(Move::Stop("canonical stream exhausted".into())),
        }
    }
}

/// Canonical order except that words starting with `prefix` are withheld
/// for the first `until` steps; afterwards the withheld words are merged
/// back in increasing id order.
#[derive(Clone, Debug)]
pub struct WithholdPrefix {
    k: Knowledge,
    prefix: String,
    until: usize,
    emitted: BTreeSet<UniverseId>,
    cursor: u64,
    catching_up: bool,
}

impl WithholdPrefix {
    pub fn new(k: Knowledge, prefix: String, until: usize) -> Result<Self> {
        let alphabet = k.universe().alphabet().ok_or_else(|| {
            Error::Unsupported("withholding a prefix needs a string universe".into())
        })?;
        alphabet.encode(&prefix)?;
        Ok(WithholdPrefix {
            k,
            prefix,
            until,
            emitted: BTreeSet::new(),
            cursor: 0,
            catching_up: false,
        })
    }
}

impl Adversary for WithholdPrefix {
    fn name(&self) -> String {
        "withhold-prefix".into()
    }

    fn next(&mut self, t: usize) -> Result<Move> {
        if t > self.until && !self.catching_up {
            self.catching_up = true;
            self.cursor = 0;
        }
        let u = self.k.universe().clone();
        let blocked = |w: UniverseId| {
            self.emitted.contains(&w)
                || (!self.catching_up && u.word(w).is_some_and(|s| s.starts_with(&self.prefix)))
        };
        match self.k.next_member(self.cursor, |w| !blocked(w)) {
            Some(w) => {
                self.cursor = w.get();
                self.emitted.insert(w);
                Ok(Move::Emit(w))
            }
            None => Ok(Move::Stop(
                "no further member outside the withheld prefix".into(),
            )),
        }
    }
}

/// A fixed list of ids.
#[derive(Clone, Debug)]
pub struct Replay {
    stream: VecDeque<UniverseId>,
}

impl Replay {
    pub fn new(stream: impl IntoIterator<Item = UniverseId>) -> Self {
        Replay {
            stream: stream.into_iter().collect(),
        }
    }
}

impl Adversary for Replay {
    fn name(&self) -> String {
        "replay".into()
    }

    fn next(&mut self, _t: usize) -> Result<Move> {
        Ok(match self.stream.pop_front() {
            Some(w) => Move::Emit(w),
            None => Move::Stop("replay stream exhausted".into()),
        })
    }
}

/// Re-sends a random earlier element with the given probability.
pub struct Repeating {
    inner: Box<dyn Adversary>,
    probability: f64,
    rng: ChaCha8Rng,
    history: Vec<UniverseId>,
}

impl Repeating {
    pub fn new(inner: Box<dyn Adversary>, probability: f64, seed: u64) -> Self {
        Repeating {
            inner,
            probability: probability.clamp(0.0, 1.0),
            rng: ChaCha8Rng::seed_from_u64(seed),
            history: Vec::new(),
        }
    }
}

impl Adversary for Repeating {
    fn name(&self) -> String {
        format!("repeating({})", self.inner.name())
    }

    fn next(&mut self, t: usize) -> Result<Move> {
        if !self.history.is_empty() && self.rng.gen_bool(self.probability) {
            let i = self.rng.gen_range(0..self.history.len());
            return Ok(Move::Emit(self.history[i]));
        }
        let mv = self.inner.next(t)?;
        if let Move::Emit(w) = mv {
            self.history.push(w);
        }
        Ok(mv)
    }

    fn observe(&mut self, output: &StepOutput) {
        self.inner.observe(output);
    }

    fn report(&self) -> Option<serde_json::Value> {
        self.inner.report()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageRow {
    pub stage: usize,
    pub first_step: usize,
    pub steps: usize,
    /// Guess that ended the stage (`None` if the stage never ended).
    pub final_guess: Option<usize>,
    pub final_guess_language: Option<String>,
    pub completed: bool,
}

/// The staged anti-identification adversary over integer progressions.
///
/// Having listed `[-s, j]`, stage `s + 1` lists `-(s+1)` and `j + 1`, then
/// keeps extending upward until the identifier's guess equals
/// `P(-(s+1), 1)`. Stage 0 lists `0` and extends upward until the guess
/// is `P(0, 1)`.
pub struct GoldAdversary {
    collection: Arc<dyn LanguageCollection>,
    stage_cap: usize,
    stage: usize,
    hi: i64,
    queue: VecDeque<i64>,
    stage_steps: usize,
    stage_start: usize,
    rows: Vec<StageRow>,
    last_guess: Option<usize>,
    aborted: Option<String>,
}

impl GoldAdversary {
    pub fn new(collection: Arc<dyn LanguageCollection>, stage_cap: usize) -> Result<Self> {
        if collection.universe().is_strings() || collection.progression(1).is_none() {
            return Err(Error::Unsupported(
                "the staged adversary needs a progression collection".into(),
            ));
        }
        Ok(GoldAdversary {
            collection,
            stage_cap,
            stage: 0,
            hi: 0,
            queue: VecDeque::from([0]),
            stage_steps: 0,
            stage_start: 1,
            rows: Vec::new(),
            last_guess: None,
            aborted: None,
        })
    }

    pub fn stages(&self) -> &[StageRow] {
        &self.rows
    }

    pub fn aborted(&self) -> Option<&str> {
        self.aborted.as_deref()
    }

    fn goal(&self) -> IntLanguage {
        IntLanguage::p(-(self.stage as i64), 1)
    }

    fn close_stage(&mut self, completed: bool) {
        self.rows.push(StageRow {
            stage: self.stage,
            first_step: self.stage_start,
            steps: self.stage_steps,
            final_guess: if completed { self.last_guess } else { None },
            final_guess_language: self
                .last_guess
                .filter(|_| completed)
                .map(|g| self.collection.describe(g)),
            completed,
        });
    }
}

impl Adversary for GoldAdversary {
    fn name(&self) -> String {
        "gold".into()
    }

    fn next(&mut self, t: usize) -> Result<Move> {
        if let Some(reason) = &self.aborted {
            return Ok(Move::Stop(reason.clone()));
        }
        if self.stage_steps >= self.stage_cap {
            let reason = format!(
                "stage {} exceeded the cap of {} steps",
                self.stage, self.stage_cap
            );
            self.close_stage(false);
            self.aborted = Some(reason.clone());
            return Ok(Move::Stop(reason));
        }
        let x = match self.queue.pop_front() {
            Some(x) => x,
            None => {
                self.hi += 1;
                self.hi
            }
        };
        if self.stage_steps == 0 {
            self.stage_start = t;
        }
        self.stage_steps += 1;
        let w = Universe::Integers.index_of(&Element::Int(x))?;
        Ok(Move::Emit(w))
    }

    fn observe(&mut self, output: &StepOutput) {
        self.last_guess = output.guess;
        if !self.queue.is_empty() {
            return;
        }
        let hit = output
            .guess
            .and_then(|g| self.collection.progression(g))
            .is_some_and(|l| l.same_set(&self.goal()));
        if hit {
            self.close_stage(true);
            self.stage += 1;
            self.stage_steps = 0;
            self.hi += 1;
            self.queue = VecDeque::from([-(self.stage as i64), self.hi]);
        }
    }

    fn report(&self) -> Option<serde_json::Value> {
        serde_json::to_value(serde_json::json!({
            "stages": self.rows,
            "aborted": self.aborted,
        }))
        .ok()
    }
}

/// Reads elements from a text stream, one per line, rejecting anything
/// outside `K`.
pub struct Interactive {
    k: Knowledge,
    input: Box<dyn BufRead + Send>,
    output: Box<dyn Write + Send>,
}

impl Interactive {
    pub fn new(
        k: Knowledge,
        input: Box<dyn BufRead + Send>,
        output: Box<dyn Write + Send>,
    ) -> Self {
        Interactive { k, input, output }
    }
}

impl Adversary for Interactive {
    fn name(&self) -> String {
        "interactive".into()
    }

    fn next(&mut self, t: usize) -> Result<Move> {
        loop {
            write!(self.output, "step {t} element> ")?;
            self.output.flush()?;
            let mut line = String::new();
            if self.input.read_line(&mut line)? == 0 {
                return Ok(Move::Stop("input closed".into()));
            }
            let text = line.trim_end_matches(['\n', '\r']);
            match self.k.universe().parse_id(text) {
                Ok(w) if self.k.contains(w) => return Ok(Move::Emit(w)),
                Ok(_) => writeln!(self.output, "{text:?} is not in the target language")?,
                Err(e) => writeln!(self.output, "cannot read {text:?}: {e}")?,
            }
        }
    }

    fn observe(&mut self, output: &StepOutput) {
        if let Some(w) = output.output {
            let _ = writeln!(
                self.output,
                "generator: {}",
                self.k.universe().element_at(w)
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::IntCollection;

    fn int_id(x: i64) -> UniverseId {
        Universe::Integers.index_of(&Element::Int(x)).unwrap()
    }

    fn knowledge(l: IntLanguage) -> Knowledge {
        Knowledge::new(
            Arc::new(IntCollection::arith_progressions()),
            Target::Language(l),
        )
        .unwrap()
    }

    fn drain(a: &mut dyn Adversary, n: usize) -> Vec<i64> {
        (1..=n)
            .map(|t| match a.next(t).unwrap() {
                Move::Emit(w) => Universe::Integers.element_at(w).as_int().unwrap(),
                Move::Stop(r) => panic!("{r}"),
            })
            .collect()
    }

    #[test]
    fn canonical_streams() {
        assert_eq!(
            drain(&mut Canonical::new(knowledge(IntLanguage::p(0, 2))), 5),
            [0, 2, 4, 6, 8]
        );
        assert_eq!(
            drain(&mut Canonical::new(knowledge(IntLanguage::q(0, 1))), 5),
            [0, 1, -1, 2, -2]
        );
        assert_eq!(
            drain(
                &mut Canonical::new(knowledge(IntLanguage::obscured(0, 7, [1]))),
                4
            ),
            [0, 1, 7, 14]
        );
    }

    #[test]
    fn delayed_streams() {
        let k = knowledge(IntLanguage::p(3, 5));
        let mut d = DelayedCover::new(k.clone(), BTreeSet::from([int_id(3)]), 5).unwrap();
        assert_eq!(drain(&mut d, 6), [8, 13, 18, 23, 3, 28]);
        let mut plain = DelayedCover::new(k.clone(), BTreeSet::new(), 5).unwrap();
        assert_eq!(
            drain(&mut plain, 6),
            drain(&mut Canonical::new(k.clone()), 6)
        );
        assert!(matches!(
            DelayedCover::new(k, BTreeSet::from([int_id(4)]), 5),
            Err(Error::HoldbackNotInTarget(_))
        ));
        let mut v = DelayedCover::new(
            knowledge(IntLanguage::obscured(0, 7, [100])),
            BTreeSet::from([int_id(100)]),
            10,
        )
        .unwrap();
        let s = drain(&mut v, 12);
        assert_eq!(s.iter().position(|&x| x == 100), Some(9));
    }

    #[test]
    fn replay_then_stop() {
        let mut r = Replay::new([UniverseId::from_index(2)]);
        assert_eq!(r.next(1).unwrap(), Move::Emit(UniverseId::from_index(2)));
        assert!(matches!(r.next(2).unwrap(), Move::Stop(_)));
    }

    #[test]
    fn repeating_is_seeded() {
        let make = || {
            Repeating::new(
                Box::new(Canonical::new(knowledge(IntLanguage::p(0, 1)))),
                0.5,
                9,
            )
        };
        let (mut a, mut b) = (make(), make());
        assert_eq!(drain(&mut a, 50), drain(&mut b, 50));
        let mut c = make();
        let s = drain(&mut c, 50);
        let distinct: BTreeSet<_> = s.iter().collect();
        assert!(distinct.len() < s.len());
    }
}
