//! Check batches shared by the test suite and the command line: the
//! invariant sweep over random automaton collections, the acceptance
//! checks, and the impossibility report.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::collection::families::{
    contains_symbol, ends_with, even_length, star_of, two_block, worked_matrix, WORKED_STREAM,
    WORKED_TARGET,
};
use crate::collection::progression::{arith_index, IntCollection};
use crate::collection::{Dfa, DfaCollection, IntLanguage, LanguageCollection, Oracle};
use crate::error::{Error, Result};
use crate::game::adversary::{Canonical, DelayedCover, GoldAdversary, Replay, StageRow};
use crate::game::{
    run_game, write_csv, Adversary, GameTrace, Knowledge, Move, PromptStrategy, SampleSet, Target,
};
use crate::generators::{
    closure_stream, critical_indices_prefix, finite_bound, BaselineIdentifier, CriticalRecord,
    Generator, HeuristicGenerator, LimitGenerator, StepInput, DEFAULT_ITERATION_CEILING,
};
use crate::prompted::{
    classify_prompt, parity_collection, parity_harness, NontrivialPrompted, ParityReport,
    RobustPrompted,
};
use crate::universe::{Alphabet, Element, Universe, UniverseId};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn run(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
        let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{mark}  {:<28} {}", self.name, self.detail)
    }
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

/// Every word over `symbols` up to `max_len`, in shortlex order, built by
/// direct enumeration rather than through the universe codec.
pub fn words_upto(symbols: &[char], max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    let mut level = vec![String::new()];
    for _ in 0..=max_len {
        out.extend(level.iter().cloned());
        level = level
            .iter()
            .flat_map(|w| symbols.iter().map(move |c| format!("{w}{c}")))
            .collect();
    }
    out
}

/// Runs the transition table by hand.
fn simulate(dfa: &Dfa, word: &str) -> bool {
    let mut s = dfa.start();
    for c in word.chars() {
        s = dfa.next(s, dfa.alphabet().rank(c).expect("word over the alphabet"));
    }
    dfa.is_accepting(s)
}

/// Explicit membership rows for ids `1..=words.len()`.
struct Table {
    words: Vec<String>,
    rows: Vec<Vec<bool>>,
}

impl Table {
    fn of(dfas: &[Dfa], max_len: usize) -> Table {
        let words = words_upto(dfas[0].alphabet().symbols(), max_len);
        let rows = dfas
            .iter()
            .map(|d| words.iter().map(|w| simulate(d, w)).collect())
            .collect();
        Table { words, rows }
    }

    fn limit(&self) -> u64 {
        self.words.len() as u64
    }

    fn has(&self, i: usize, w: u64) -> bool {
        self.rows[i - 1][(w - 1) as usize]
    }

    fn consistent(&self, sample: &SampleSet, scope: usize) -> Vec<usize> {
        (1..=scope.min(self.rows.len()))
            .filter(|&i| sample.distinct().iter().all(|w| self.has(i, w.get())))
            .collect()
    }

    /// `L_j[m] ⊆ L_i[m]`.
    fn prefix_within(&self, j: usize, i: usize, m: u64) -> bool {
        (1..=m).all(|w| !self.has(j, w) || self.has(i, w))
    }

    fn critical(&self, sample: &SampleSet, scope: usize, m: u64) -> Vec<usize> {
        let c = self.consistent(sample, scope);
        c.iter()
            .copied()
            .filter(|&n| {
                c.iter()
                    .take_while(|&&i| i < n)
                    .all(|&i| self.prefix_within(n, i, m))
            })
            .collect()
    }
}

fn random_dfa(rng: &mut ChaCha8Rng, alphabet: &Alphabet) -> Dfa {
    loop {
        let n = rng.gen_range(1..=4);
        let accepting: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let transitions: Vec<(usize, char, usize)> = (0..n)
            .flat_map(|s| alphabet.symbols().iter().map(move |&c| (s, c)))
            .map(|(s, c)| (s, c, rng.gen_range(0..n)))
            .collect();
        let d =
            Dfa::new(alphabet.clone(), n, 0, accepting, transitions).expect("well-formed table");
        if d.is_infinite() {
            return d;
        }
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }

    fn into_check(self, name: &str) -> Check {
        let detail = if self.failures.is_empty() {
            format!("{} cases, 0 failures", self.cases)
        } else {
            let shown: Vec<&str> = self
                .failures
                .iter()
                .filter(|f| !f.is_empty())
                .map(String::as_str)
                .collect();
            format!(
                "{} cases, {} failures: {}",
                self.cases,
                self.failures.len(),
                shown.join("; ")
            )
        };
        Check {
            name: name.into(),
            passed: self.failures.is_empty(),
            detail,
        }
    }
}

#[derive(Default)]
struct Tallies {
    monotone: Tally,
    nested: Tally,
    disruptive: Tally,
    closure: Tally,
    bijection: Tally,
    reference: Tally,
}

/// Largest `m` in the monotonicity sweep.
pub const MONOTONE_BOUND: u64 = 50;
/// Word length of the brute-force tables.
pub const BRUTE_LENGTH: usize = 10;
/// Steps played per random instance.
pub const INSTANCE_STEPS: usize = 6;

fn sweep_instance(dfas: Vec<Dfa>, z: usize, label: &str, tallies: &mut Tallies) -> Result<()> {
    let table = Table::of(&dfas, BRUTE_LENGTH);
    let collection: Arc<dyn LanguageCollection> = Arc::new(DfaCollection::new(label, dfas)?);
    let oracle = Oracle::new(collection.clone());
    let universe = collection.universe().clone();
    for (k, w) in table.words.iter().enumerate() {
        if k % 97 == 0 {
            let id = UniverseId::from_index(k as u64 + 1);
            let ok = universe.word(id).as_deref() == Some(w.as_str())
                && universe.index_of(&Element::Str(w.clone())).ok() == Some(id);
            tallies
                .bijection
                .check(ok, || format!("{label}: word {w:?} at u{id}"));
        }
    }
    let k = Knowledge::new(collection.clone(), Target::Index(z))?;
    let mut adversary = Canonical::new(k);
    let mut generator = LimitGenerator::new(DEFAULT_ITERATION_CEILING).recording();
    let mut sample = SampleSet::new();
    for t in 1..=INSTANCE_STEPS {
        let Move::Emit(w) = adversary.next(t)? else {
            break;
        };
        if w.get() > table.limit() {
            break;
        }
        sample.push(w);
        let out = generator.step(&oracle, &StepInput::new(t, &sample))?;
        tallies.disruptive.check(out.disruptive < t, || {
            format!(
                "{label}: step {t} had {} disruptive iterations",
                out.disruptive
            )
        });
        for rec in generator.take_records() {
            check_record(&table, &sample, &rec, label, tallies);
        }

        let mut previous: Option<Vec<usize>> = None;
        for m in 1..=MONOTONE_BOUND {
            let rec = critical_indices_prefix(&oracle, &sample, t, m)?;
            let expect = table.critical(&sample, t, m);
            tallies.reference.check(rec.critical == expect, || {
                format!(
                    "{label}: t={t} m={m} critical {:?} vs {expect:?}",
                    rec.critical
                )
            });
            if let Some(prev) = &previous {
                let sub = rec.critical.iter().all(|i| prev.contains(i));
                tallies.monotone.check(sub, || {
                    format!(
                        "{label}: t={t} critical at m={m} {:?} not within m={} {prev:?}",
                        rec.critical,
                        m - 1
                    )
                });
            }
            previous = Some(rec.critical);
        }

        let consistent = table.consistent(&sample, collection.size().clamp(usize::MAX));
        let stream = closure_stream(&oracle, &sample, None, table.limit())?;
        for x in stream.take(20) {
            let ok = !sample.contains(x) && consistent.iter().all(|&i| table.has(i, x.get()));
            tallies.closure.check(ok, || {
                format!("{label}: closure element u{x} outside a consistent language")
            });
        }
    }
    Ok(())
}

fn check_record(
    table: &Table,
    sample: &SampleSet,
    rec: &CriticalRecord,
    label: &str,
    tallies: &mut Tallies,
) {
    let Some(m) = rec.m.filter(|&m| m <= table.limit()) else {
        return;
    };
    let expect_consistent = table.consistent(sample, rec.t);
    tallies
        .reference
        .check(rec.consistent == expect_consistent, || {
            format!(
                "{label}: t={} consistent {:?} vs {expect_consistent:?}",
                rec.t, rec.consistent
            )
        });
    if let Some(&first) = rec.consistent.first() {
        tallies
            .nested
            .check(rec.critical.first() == Some(&first), || {
                format!(
                    "{label}: t={} least consistent L{first} not critical",
                    rec.t
                )
            });
    }
    for (a, &i) in rec.critical.iter().enumerate() {
        for &j in &rec.critical[a + 1..] {
            tallies.nested.check(table.prefix_within(j, i, m), || {
                format!("{label}: t={} m={m}: L{j}[m] not within L{i}[m]", rec.t)
            });
        }
    }
}

fn fixture_collections() -> Vec<(String, Vec<Dfa>, usize)> {
    let ab = Alphabet::ab();
    let mut out = Vec::new();
    let prompted = robust_fixture();
    out.push(("prompted_robust".into(), prompted, 4));
    out.push(("prompted_nontrivial".into(), nontrivial_fixture(), 2));
    for (name, c) in [
        (
            "parity_prefix_pair",
            crate::collection::families::parity_prefix_pair(),
        ),
        ("evens_vs_all", crate::collection::families::evens_vs_all()),
    ] {
        for z in 1..=2 {
            out.push((format!("{name}/L{z}"), c.languages().to_vec(), z));
        }
    }
    out.push((
        "star_chain".into(),
        vec![
            Dfa::universal(&ab),
            star_of(&ab, "a").expect("a*"),
            star_of(&ab, "aa").expect("(aa)*"),
        ],
        3,
    ));
    out
}

/// The invariant sweep over `instances` random collections (one to six
/// automata of at most four states over `{a, b}`) plus the fixed automaton
/// fixtures, checked against brute-force membership to length ten.
pub fn invariants(instances: usize, seed: u64) -> Vec<Check> {
    let mut tallies = Tallies::default();
    let mut errors = Vec::new();
    for (name, dfas, z) in fixture_collections() {
        if let Err(e) = sweep_instance(dfas, z, &name, &mut tallies) {
            errors.push(format!("{name}: {e}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ab = Alphabet::ab();
    for n in 0..instances {
        let k = rng.gen_range(1..=6);
        let dfas: Vec<Dfa> = (0..k).map(|_| random_dfa(&mut rng, &ab)).collect();
        let z = rng.gen_range(1..=k);
        if let Err(e) = sweep_instance(dfas, z, &format!("random#{n}"), &mut tallies) {
            errors.push(format!("random#{n}: {e}"));
        }
    }
    sweep_worked_example(&mut tallies);
    sweep_integers(&mut rng, &mut tallies);
    let mut checks = vec![
        tallies.monotone.into_check("critical monotone in m"),
        tallies.nested.into_check("critical prefixes nested"),
        tallies.disruptive.into_check("disruptive iterations < t"),
        tallies.closure.into_check("closure safety"),
        tallies.bijection.into_check("universe bijection"),
        tallies.reference.into_check("criticality vs brute force"),
    ];
    checks.push(Check {
        name: "instances ran".into(),
        passed: errors.is_empty(),
        detail: if errors.is_empty() {
            format!("{} random + fixtures", instances)
        } else {
            errors.join("; ")
        },
    });
    checks
}

fn sweep_worked_example(tallies: &mut Tallies) {
    let c = worked_matrix();
    let rows: Vec<BTreeSet<u64>> = c.rows().to_vec();
    let oracle = Oracle::from_collection(c);
    let mut g = LimitGenerator::new(DEFAULT_ITERATION_CEILING).recording();
    let mut sample = SampleSet::new();
    for (t, &w) in WORKED_STREAM.iter().enumerate() {
        let t = t + 1;
        sample.push(UniverseId::from_index(w));
        let Ok(out) = g.step(&oracle, &StepInput::new(t, &sample)) else {
            tallies
                .disruptive
                .check(false, || format!("worked_matrix: step {t} failed"));
            return;
        };
        tallies
            .disruptive
            .check(out.disruptive < t, || format!("worked_matrix: step {t}"));
        for rec in g.take_records() {
            let Some(m) = rec.m else { continue };
            let has = |i: usize, x: u64| x > 15 || rows[i - 1].contains(&x);
            for (a, &i) in rec.critical.iter().enumerate() {
                for &j in &rec.critical[a + 1..] {
                    tallies
                        .nested
                        .check((1..=m).all(|x| !has(j, x) || has(i, x)), || {
                            format!("worked_matrix: t={t} m={m} L{j}/L{i}")
                        });
                }
            }
        }
    }
}

fn sweep_integers(rng: &mut ChaCha8Rng, tallies: &mut Tallies) {
    let u = Universe::Integers;
    for k in 1..=10_000u64 {
        let id = UniverseId::from_index(k);
        let x = u.element_at(id).as_int().expect("integer");
        let expect = if k % 2 == 0 {
            (k / 2) as i64
        } else {
            -(((k - 1) / 2) as i64)
        };
        tallies.bijection.check(
            x == expect && u.index_of(&Element::Int(x)).ok() == Some(id),
            || format!("integer u{k}"),
        );
    }
    for _ in 0..1000 {
        let x: i64 = rng.gen_range(-(1i64 << 60)..(1i64 << 60));
        let back = u.index_of(&Element::Int(x)).map(|id| u.element_at(id));
        tallies
            .bijection
            .check(back.ok() == Some(Element::Int(x)), || {
                format!("integer {x}")
            });
    }
}

/// `t̂` exists and at least `min_tail` trailing steps are valid.
fn eventually_valid(trace: &GameTrace, min_tail: usize) -> (bool, String) {
    let n = trace.steps.len();
    match trace.summary.t_hat {
        Some(h) => {
            let tail = n + 1 - h;
            (
                tail >= min_tail && n == trace.summary.steps_requested,
                format!("t̂={h}, {tail} trailing valid of {n}"),
            )
        }
        None => (
            false,
            format!(
                "last step invalid ({} of {n} valid)",
                trace.summary.valid_steps
            ),
        ),
    }
}

fn ids(v: &[u64]) -> Vec<UniverseId> {
    v.iter().map(|&w| UniverseId::from_index(w)).collect()
}

/// Worked example: replaying u2, u5, u8, u10, u12 against the five-row
/// matrix gives a fallback u1, then u7, u10, u12, u15.
pub fn worked_example() -> Check {
    Check::run("worked example", || {
        let c: Arc<dyn LanguageCollection> = Arc::new(worked_matrix());
        let k = Knowledge::new(c.clone(), Target::Index(WORKED_TARGET))?;
        let mut adv = Replay::new(ids(&WORKED_STREAM));
        let mut g = LimitGenerator::new(DEFAULT_ITERATION_CEILING);
        let trace = run_game(
            &Oracle::new(c),
            &k,
            &mut adv,
            &mut g,
            &PromptStrategy::None,
            5,
        )?;
        let outputs = trace.outputs();
        let fallbacks: Vec<bool> = trace.steps.iter().map(|r| r.fallback).collect();
        let ok = outputs == [1, 7, 10, 12, 15] && fallbacks == [true, false, false, false, false];
        Ok((ok, format!("outputs {outputs:?}, fallbacks {fallbacks:?}")))
    })
}

/// Limit generation over the dovetailed progressions with `K = P(3,5)`.
pub fn arithmetic_limit() -> Check {
    Check::run("arithmetic progressions", || {
        let c: Arc<dyn LanguageCollection> = Arc::new(IntCollection::arith_progressions());
        let z = arith_index(&IntLanguage::p(3, 5))
            .ok_or_else(|| Error::Scenario("P(3,5) has no index".into()))?;
        let k = Knowledge::new(c.clone(), Target::Index(z))?;
        let trace = run_game(
            &Oracle::new(c.clone()),
            &k,
            &mut Canonical::new(k.clone()),
            &mut LimitGenerator::new(DEFAULT_ITERATION_CEILING),
            &PromptStrategy::None,
            500,
        )?;
        let referee_agrees = trace.steps.iter().all(|r| {
            let a = Universe::Integers
                .element_at(r.a_t)
                .as_int()
                .expect("integer");
            let fresh = trace.steps[..r.t].iter().all(|s| s.w_t != r.a_t);
            r.valid == (fresh && a >= 3 && (a - 3) % 5 == 0)
        });
        let (ok, detail) = eventually_valid(&trace, 300);
        let within = trace.summary.t_hat.is_some_and(|h| h <= 200);
        Ok((ok && within && referee_agrees, format!("K=L{z}; {detail}")))
    })
}

/// Id ceiling of the closure collapse check.
pub const COLLAPSE_CEILING: u64 = 10_000;

/// The gap heuristic on obscured progressions with a delayed `V`, and the
/// closure collapse `⟨S⟩ = S` up to the id ceiling once `L(j+1, 1, S)` is
/// in scope, with `j` the largest integer below the ceiling.
pub fn obscured_progressions() -> Check {
    Check::run("obscured progressions", || {
        let target = IntLanguage::obscured(0, 7, [1, 2, 3, 100]);
        let c: Arc<dyn LanguageCollection> = Arc::new(IntCollection::obscured_progressions());
        let k = Knowledge::new(c.clone(), Target::Language(target.clone()))?;
        let held: BTreeSet<UniverseId> = [1, 2, 3, 100]
            .iter()
            .map(|&x| Universe::Integers.index_of(&Element::Int(x)))
            .collect::<std::result::Result<_, _>>()?;
        let mut adv = DelayedCover::new(k.clone(), held.clone(), 24)?;
        let trace = run_game(
            &Oracle::new(c),
            &k,
            &mut adv,
            &mut HeuristicGenerator,
            &PromptStrategy::None,
            300,
        )?;
        let released = trace
            .steps
            .iter()
            .filter(|r| held.contains(&r.w_t))
            .map(|r| r.t)
            .max();
        let (ok, detail) = eventually_valid(&trace, 180);

        let sample: SampleSet = trace.steps.iter().map(|r| r.w_t).collect();
        let j = Universe::Integers
            .element_at(UniverseId::from_index(COLLAPSE_CEILING))
            .as_int()
            .unwrap_or(0);
        let s_values: Vec<i64> = sample
            .distinct()
            .iter()
            .filter_map(|&w| Universe::Integers.element_at(w).as_int())
            .collect();
        let witness = IntLanguage::obscured(j + 1, 1, s_values);
        let scoped = Oracle::from_collection(IntCollection::list(vec![target, witness]));
        let collapsed = closure_stream(&scoped, &sample, Some(2), COLLAPSE_CEILING)?
            .next()
            .is_none();
        Ok((
            ok && collapsed && released.is_some_and(|r| r <= 30),
            format!(
                "{detail}; V out by step {}; closure beyond S within 10^4 ids: {}",
                released.map_or("never".to_string(), |r| r.to_string()),
                if collapsed { "none" } else { "found" }
            ),
        ))
    })
}

fn k_subsets(items: &[UniverseId], k: usize) -> Vec<Vec<UniverseId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut with: Vec<Vec<UniverseId>> = k_subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut v| {
            v.insert(0, items[0]);
            v
        })
        .collect();
    with.extend(k_subsets(&items[1..], k));
    with
}

/// Two finite-intersection languages: `m* = 6`, `t(C) = 7`, and every
/// seven-sample closure stays inside `K − S`.
pub fn finite_closure() -> Check {
    Check::run("finite collection bound", || {
        let evens = IntLanguage::p(2, 2).with_extra([1, 3, 5]);
        let odds = IntLanguage::p(1, 2).with_extra([2, 4, 6]);
        let oracle = Oracle::from_collection(IntCollection::list(vec![evens, odds]));
        let bound = finite_bound(&oracle)?;
        let member = |z: usize, x: i64| match z {
            1 => (x >= 2 && x % 2 == 0) || [1, 3, 5].contains(&x),
            _ => (x >= 1 && x % 2 == 1) || [2, 4, 6].contains(&x),
        };
        let brute_m: usize = (-1000..=1000)
            .filter(|&x| member(1, x) && member(2, x))
            .count();
        let u = Universe::Integers;
        let mut samples = 0;
        let mut violations = 0;
        for z in 1..=2 {
            let pool: Vec<UniverseId> = (1..=12)
                .filter(|&x| member(z, x))
                .map(|x| u.index_of(&Element::Int(x)))
                .collect::<std::result::Result<_, _>>()?;
            for subset in k_subsets(&pool, 7) {
                samples += 1;
                let s: SampleSet = subset.into_iter().collect();
                let out: Vec<UniverseId> = closure_stream(&oracle, &s, None, 100_000)?
                    .take(100)
                    .collect();
                let distinct: BTreeSet<_> = out.iter().collect();
                violations += usize::from(out.len() != 100 || distinct.len() != 100);
                violations += out
                    .iter()
                    .filter(|&&w| {
                        s.contains(w) || !member(z, u.element_at(w).as_int().expect("integer"))
                    })
                    .count();
            }
        }
        let ok = bound.m_star == 6 && bound.t_c == 7 && brute_m == 6 && violations == 0;
        Ok((
            ok,
            format!(
                "m*={}, t(C)={}, {samples} samples, {violations} violations",
                bound.m_star, bound.t_c
            ),
        ))
    })
}

/// Guesses the baseline identifier makes under the staged adversary, and
/// the limit generator's validity on the same stream.
#[derive(Clone, Debug, Serialize)]
pub struct IdentificationContrast {
    pub stages: Vec<StageRow>,
    pub aborted: Option<String>,
    pub distinct_guesses_first_five: usize,
    pub identifier_guess_changes: usize,
    pub stream_len: usize,
    pub limit_longest_valid_run: usize,
    pub limit_t_hat: Option<usize>,
}

/// Depth of the `P(-i, 1)` block in front of the dovetail.
pub const GOLD_DEPTH: usize = 300;

pub fn identification_contrast(steps: usize) -> Result<IdentificationContrast> {
    let c: Arc<dyn LanguageCollection> = Arc::new(IntCollection::gold_progressions(GOLD_DEPTH));
    let oracle = Oracle::new(c.clone());
    let k = Knowledge::new(c.clone(), Target::Language(IntLanguage::q(0, 1)))?;
    let mut gold = GoldAdversary::new(c.clone(), 200)?;
    let mut baseline = BaselineIdentifier::new();
    let trace = run_game(
        &oracle,
        &k,
        &mut gold,
        &mut baseline,
        &PromptStrategy::None,
        steps,
    )?;
    let first_five: BTreeSet<usize> = gold
        .stages()
        .iter()
        .take(5)
        .filter_map(|r| r.final_guess)
        .collect();
    let stream: Vec<UniverseId> = trace.steps.iter().map(|r| r.w_t).collect();
    let mut replay = Replay::new(stream.clone());
    let mut limit = LimitGenerator::new(DEFAULT_ITERATION_CEILING);
    let limit_trace = run_game(
        &oracle,
        &k,
        &mut replay,
        &mut limit,
        &PromptStrategy::None,
        stream.len().max(1),
    )?;
    Ok(IdentificationContrast {
        stages: gold.stages().to_vec(),
        aborted: gold.aborted().map(str::to_string),
        distinct_guesses_first_five: first_five.len(),
        identifier_guess_changes: trace.summary.guess_changes,
        stream_len: stream.len(),
        limit_longest_valid_run: limit_trace.summary.longest_valid_run,
        limit_t_hat: limit_trace.summary.t_hat,
    })
}

pub fn identification_demo() -> Check {
    Check::run("identification vs generation", || {
        let r = identification_contrast(500)?;
        let completed = r.stages.iter().take(5).filter(|s| s.completed).count();
        let ok =
            completed == 5 && r.distinct_guesses_first_five >= 5 && r.limit_longest_valid_run >= 50;
        Ok((
            ok,
            format!(
                "{} distinct guesses in first 5 stages, {} stages, limit run of {} valid in {} steps",
                r.distinct_guesses_first_five,
                r.stages.len(),
                r.limit_longest_valid_run,
                r.stream_len
            ),
        ))
    })
}

/// Number of random instances in the acceptance sweep.
pub const ACCEPTANCE_INSTANCES: usize = 1000;

pub fn invariant_sweep() -> Check {
    Check::run("invariant sweep", || {
        let checks = invariants(ACCEPTANCE_INSTANCES, 7);
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        let cases: Vec<String> = checks
            .iter()
            .map(|c| format!("{}: {}", c.name, c.detail.split(',').next().unwrap_or("")))
            .collect();
        Ok((
            failed.is_empty(),
            if failed.is_empty() {
                cases.join(", ")
            } else {
                failed.join("; ")
            },
        ))
    })
}

/// `Σ*`, words containing `b`, even length, words ending in `b`.
pub fn robust_fixture() -> Vec<Dfa> {
    let ab = Alphabet::ab();
    vec![
        Dfa::universal(&ab),
        contains_symbol(&ab, 'b').expect("contains b"),
        even_length(&ab),
        ends_with(&ab, 'b').expect("ends with b"),
    ]
}

/// `a*` and `a*b*`.
pub fn nontrivial_fixture() -> Vec<Dfa> {
    let ab = Alphabet::ab();
    vec![
        star_of(&ab, "a").expect("a*"),
        two_block(&ab, 'a', 'b').expect("a*b*"),
    ]
}

fn trace_csv(trace: &GameTrace) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(trace, &mut buf)?;
    Ok(buf)
}

fn play(
    collection: &Arc<dyn LanguageCollection>,
    z: usize,
    generator: &mut dyn Generator,
    prompts: &PromptStrategy,
    steps: usize,
) -> Result<GameTrace> {
    let k = Knowledge::new(collection.clone(), Target::Index(z))?;
    run_game(
        &Oracle::new(collection.clone()),
        &k,
        &mut Canonical::new(k.clone()),
        generator,
        prompts,
        steps,
    )
}

pub fn prompted_robust() -> Check {
    Check::run("prompted robust", || {
        let c: Arc<dyn LanguageCollection> =
            Arc::new(DfaCollection::new("robust_fixture", robust_fixture())?);
        let prompts: PromptStrategy = "cycle:[ε,a,b,ab,ba]".parse()?;
        let oracle = Oracle::new(c.clone());
        let all_robust = prompts
            .prompts()
            .iter()
            .map(|p| classify_prompt(&oracle, 4, p, &SampleSet::new()).map(|v| v.robust))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|r| r);
        let trace = play(
            &c,
            4,
            &mut RobustPrompted::new(DEFAULT_ITERATION_CEILING),
            &prompts,
            200,
        )?;
        let prefixed = trace
            .steps
            .iter()
            .all(|r| r.a_element.starts_with(r.p_t.as_deref().unwrap_or("")));
        let (valid, detail) = eventually_valid(&trace, 120);

        let eps = play(
            &c,
            4,
            &mut RobustPrompted::new(DEFAULT_ITERATION_CEILING),
            &"constant:ε".parse()?,
            200,
        )?;
        let plain = play(
            &c,
            4,
            &mut LimitGenerator::new(DEFAULT_ITERATION_CEILING),
            &PromptStrategy::None,
            200,
        )?;
        let identical = trace_csv(&eps)? == trace_csv(&plain)?;
        Ok((
            all_robust && prefixed && valid && identical,
            format!("robust prompts {all_robust}, prefixes kept {prefixed}, {detail}, ε-trace identical {identical}"),
        ))
    })
}

/// Per-step iteration ceiling for the nontrivial fixture: unseen
/// `ab`-words of `a*b*` sit about `2^sqrt(2t)` ids out.
pub const NONTRIVIAL_CEILING: u64 = 4_000_000;

/// Steps of the nontrivial run whose verdicts are compared with brute force.
pub const VERDICT_STEPS: usize = 30;

pub fn prompted_nontrivial() -> Check {
    Check::run("prompted nontrivial", || {
        let dfas = nontrivial_fixture();
        let c: Arc<dyn LanguageCollection> =
            Arc::new(DfaCollection::new("nontrivial_fixture", dfas.clone())?);
        let prompts: PromptStrategy = "cycle:[a,ab,b]".parse()?;
        let oracle = Oracle::new(c.clone());
        let non_robust = !classify_prompt(&oracle, 2, "b", &SampleSet::new())?.robust;
        let trace = play(
            &c,
            2,
            &mut NontrivialPrompted::new(NONTRIVIAL_CEILING),
            &prompts,
            200,
        )?;
        let (valid, detail) = eventually_valid(&trace, 120);

        let table = Table::of(&dfas, 8);
        let mut sample = SampleSet::new();
        let mut compared = 0;
        let mut mismatches = 0;
        for r in trace.steps.iter().take(VERDICT_STEPS) {
            sample.push(r.w_t);
            let p = r.p_t.as_deref().unwrap_or("");
            let class = classify_prompt(&oracle, 2, p, &sample)?;
            for v in &class.verdicts {
                let brute = table.words.iter().enumerate().any(|(k, w)| {
                    w.starts_with(p)
                        && table.has(v.lang, k as u64 + 1)
                        && !sample.contains(UniverseId::from_index(k as u64 + 1))
                });
                let witness_ok = v.witness.is_none_or(|w| {
                    w.get() <= table.limit()
                        && table.words[(w.get() - 1) as usize].starts_with(p)
                        && table.has(v.lang, w.get())
                        && !sample.contains(w)
                });
                compared += 1;
                mismatches += usize::from(brute != v.t_valid || !witness_ok);
            }
        }
        Ok((
            non_robust && valid && mismatches == 0,
            format!("\"b\" not robust {non_robust}, {detail}, {compared} verdicts, {mismatches} mismatches"),
        ))
    })
}

/// Number of `a`-words fed before the `b` prompt.
pub const PARITY_T0: usize = 20;

fn parity_reports() -> Result<Vec<ParityReport>> {
    let makers: [(&str, fn() -> Box<dyn Generator>); 2] = [
        ("robust", || {
            Box::new(RobustPrompted::new(DEFAULT_ITERATION_CEILING))
        }),
        ("nontrivial", || {
            Box::new(NontrivialPrompted::new(DEFAULT_ITERATION_CEILING))
        }),
    ];
    let mut out = Vec::new();
    for (_, make) in makers {
        for swapped in [false, true] {
            out.push(parity_harness(
                parity_collection(swapped),
                &make,
                PARITY_T0,
                100,
            )?);
        }
    }
    Ok(out)
}

pub fn prompted_parity() -> Check {
    Check::run("parity prompt", || {
        let reports = parity_reports()?;
        let mut parities = BTreeSet::new();
        let mut ok = true;
        for r in &reports {
            parities.insert(r.odd);
            let odd_lang = if r.order[0].contains("odd") { 1 } else { 2 };
            let expect_invalid = if r.odd { 3 - odd_lang } else { odd_lang };
            ok &= r.output.starts_with('b') && r.invalid_for == [expect_invalid];
            ok &= r.recovery.len() == 1
                && r.recovery.iter().all(|rec| {
                    matches!((rec.t_hat, rec.first_b_step), (Some(h), Some(b)) if h <= b + 50)
                });
        }
        let summary: Vec<String> = reports
            .iter()
            .map(|r| {
                let lag = r.recovery.first().and_then(|x| x.lag);
                let bad: Vec<String> = r.invalid_for.iter().map(|z| format!("L{z}")).collect();
                let lag = lag.map_or("-".to_string(), |l| l.to_string());
                format!(
                    "{} on [{}] gives {:?}, invalid for {}, recovery lag {lag}",
                    r.generator,
                    r.order.join(" | "),
                    r.output,
                    bad.join(",")
                )
            })
            .collect();
        Ok((ok && parities.len() == 2, summary.join("; ")))
    })
}

/// Every acceptance check, in order.
pub const ACCEPTANCE: [fn() -> Check; 9] = [
    worked_example,
    arithmetic_limit,
    obscured_progressions,
    finite_closure,
    identification_demo,
    invariant_sweep,
    prompted_robust,
    prompted_nontrivial,
    prompted_parity,
];

pub fn acceptance() -> Vec<Check> {
    ACCEPTANCE.iter().map(|f| f()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ImpossibilityReport {
    pub identification: IdentificationContrast,
    pub parity: Vec<ParityReport>,
}

pub fn impossibility() -> Result<ImpossibilityReport> {
    Ok(ImpossibilityReport {
        identification: identification_contrast(500)?,
        parity: parity_reports()?,
    })
}

impl fmt::Display for ImpossibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = &self.identification;
        writeln!(f, "staged adversary vs identify-baseline")?;
        writeln!(
            f,
            "{:>6} {:>10} {:>6} {:>8}  guess",
            "stage", "first step", "steps", "done"
        )?;
        for r in id.stages.iter().take(12) {
            writeln!(
                f,
                "{:>6} {:>10} {:>6} {:>8}  {}",
                r.stage,
                r.first_step,
                r.steps,
                r.completed,
                match (&r.final_guess, &r.final_guess_language) {
                    (Some(g), Some(l)) => format!("L{g} = {l}"),
                    _ => "-".into(),
                }
            )?;
        }
        if id.stages.len() > 12 {
            writeln!(f, "   ... {} stages in total", id.stages.len())?;
        }
        writeln!(
            f,
            "guess changes {}; limit generator on the same {} samples: longest valid run {}, t̂ {:?}",
            id.identifier_guess_changes, id.stream_len, id.limit_longest_valid_run, id.limit_t_hat
        )?;
        writeln!(f)?;
        writeln!(f, "parity prompt after {PARITY_T0} a-words")?;
        for r in &self.parity {
            writeln!(
                f,
                "{:<20} [{}] output {:?} (length {}, {}) invalid for {:?}",
                r.generator,
                r.order.join(" | "),
                r.output,
                r.output_len,
                if r.odd { "odd" } else { "even" },
                r.invalid_for
                    .iter()
                    .map(|z| format!("L{z}"))
                    .collect::<Vec<_>>()
            )?;
            for rec in &r.recovery {
                writeln!(
                    f,
                    "{:<20} K=L{}: first b-word at step {:?}, t̂ {:?}",
                    "", rec.target, rec.first_b_step, rec.t_hat
                )?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_match_the_universe_order() {
        let words = words_upto(&['a', 'b'], 3);
        assert_eq!(&words[..7], ["", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(words.len(), 15);
    }

    #[test]
    fn small_sweep_passes() {
        let checks = invariants(20, 1);
        for c in &checks {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn subsets_are_counted() {
        let items = ids(&[1, 2, 3, 4, 5]);
        assert_eq!(k_subsets(&items, 2).len(), 10);
        assert_eq!(k_subsets(&items, 5).len(), 1);
    }
}
