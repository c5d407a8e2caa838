//! Prefix-based criticality and the iterative search over growing prefixes.
//!
//! `L_n` is (t,m)-critical when it is consistent with `S_t` and
//! `L_n[m] ⊆ L_i[m]` for every consistent `i < n`. The engine keeps, for each
//! consistent language in scope, its prefix as a bitset and the set of
//! smaller consistent indices it fails to be contained in ("violators").
//! Violators only accumulate as `m` grows, so each new row costs one
//! membership query per consistent language plus the new violations.
//! Prefixes carry over between steps: `m` never decreases and membership
//! answers never change.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::collection::Oracle;
use crate::error::{Error, Result};
use crate::game::SampleSet;
use crate::universe::UniverseId;

/// Snapshot of criticality at one `(t, m)`; `m` is `None` for exact
/// (subset-query) criticality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalRecord {
    pub t: usize,
    pub m: Option<u64>,
    pub consistent: Vec<usize>,
    pub critical: Vec<usize>,
    pub n_t: Option<usize>,
}

/// Which critical language the search draws from.
#[derive(Clone, Copy, Debug)]
pub enum Selector<'a> {
    /// Highest-indexed critical language.
    MaxCritical,
    /// Highest-indexed critical language among the given indices.
    MaxCriticalAmong(&'a BTreeSet<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EngineOutcome {
    Found {
        output: UniverseId,
        n: usize,
        m_start: u64,
        m: u64,
        disruptive: usize,
    },
    /// No language in scope is consistent with the sample.
    NoConsistent { m_start: u64 },
    /// The selector admits no critical language.
    NoSelectable { m_start: u64, m: u64 },
}

#[derive(Clone, Debug)]
pub struct CriticalEngine {
    m: u64,
    scope: usize,
    known: BTreeSet<UniverseId>,
    rows: BTreeMap<usize, FixedBitSet>,
    violators: BTreeMap<usize, BTreeSet<usize>>,
    ceiling: u64,
    recording: bool,
    records: Vec<CriticalRecord>,
}

impl CriticalEngine {
    pub fn new(ceiling: u64) -> Self {
        CriticalEngine {
            m: 0,
            scope: 0,
            known: BTreeSet::new(),
            rows: BTreeMap::new(),
            violators: BTreeMap::new(),
            ceiling,
            recording: false,
            records: Vec::new(),
        }
    }

    pub fn set_recording(&mut self, on: bool) {
        self.recording = on;
    }

    pub fn take_records(&mut self) -> Vec<CriticalRecord> {
        std::mem::take(&mut self.records)
    }

    /// `m_{t-1}`: the bound reached at the end of the previous step.
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn reset(&mut self) {
        *self = CriticalEngine {
            recording: self.recording,
            ..CriticalEngine::new(self.ceiling)
        };
    }

    fn extend_to(&mut self, oracle: &Oracle, target: u64) {
        if target <= self.m {
            return;
        }
        for row in self.rows.values_mut() {
            row.grow(target as usize);
        }
        for w in self.m + 1..=target {
            let id = UniverseId::from_index(w);
            let bit = (w - 1) as usize;
            let mut inside = Vec::new();
            let mut outside = Vec::new();
            for (&lang, row) in self.rows.iter_mut() {
                if oracle.member(lang, id) {
                    row.insert(bit);
                    inside.push(lang);
                } else {
                    outside.push(lang);
                }
            }
            for &n in &inside {
                let v = self.violators.entry(n).or_default();
                v.extend(outside.iter().copied().take_while(|&i| i < n));
            }
        }
        self.m = target;
    }

    fn drop_language(&mut self, lang: usize) {
        self.rows.remove(&lang);
        self.violators.remove(&lang);
        for v in self.violators.values_mut() {
            v.remove(&lang);
        }
    }

    fn enter(&mut self, oracle: &Oracle, lang: usize) {
        let mut row = FixedBitSet::with_capacity(self.m as usize);
        for w in 1..=self.m {
            if oracle.member(lang, UniverseId::from_index(w)) {
                row.insert((w - 1) as usize);
            }
        }
        if !self
            .known
            .iter()
            .all(|w| row.contains((w.get() - 1) as usize))
        {
            return;
        }
        let v: BTreeSet<usize> = self
            .rows
            .iter()
            .filter(|(_, other)| !row.is_subset(other))
            .map(|(&i, _)| i)
            .collect();
        self.violators.insert(lang, v);
        self.rows.insert(lang, row);
    }

    pub fn consistent(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    pub fn critical(&self) -> Vec<usize> {
        self.rows
            .keys()
            .copied()
            .filter(|n| self.violators.get(n).is_none_or(BTreeSet::is_empty))
            .collect()
    }

    fn select(&self, selector: Selector<'_>) -> Option<usize> {
        let critical = self.critical();
        match selector {
            Selector::MaxCritical => critical.last().copied(),
            Selector::MaxCriticalAmong(allowed) => {
                critical.into_iter().rev().find(|n| allowed.contains(n))
            }
        }
    }

    fn record(&mut self, t: usize, selector: Selector<'_>) {
        if self.recording {
            self.records.push(CriticalRecord {
                t,
                m: Some(self.m),
                consistent: self.consistent(),
                critical: self.critical(),
                n_t: self.select(selector),
            });
        }
    }

    /// Prepares scope and prefixes for step `t`: sets `m` to
    /// `max(m_{t-1}, w_t)`, drops languages the new samples rule out, and
    /// admits languages up to index `t`.
    fn begin_step(&mut self, oracle: &Oracle, t: usize, sample: &SampleSet) -> u64 {
        let scope = oracle.size().clamp(t);
        if scope < self.scope || !self.known.iter().all(|&w| sample.contains(w)) {
            self.reset();
        }
        let w_t = sample.last().map_or(0, UniverseId::get);
        // equal to max(m_{t-1}, w_t) whenever steps arrive in order
        let m_start = self
            .m
            .max(w_t)
            .max(sample.max_id().map_or(0, UniverseId::get));
        self.extend_to(oracle, m_start);
        let fresh: Vec<UniverseId> = sample.distinct().difference(&self.known).copied().collect();
        let ruled_out: Vec<usize> = self
            .rows
            .iter()
            .filter(|(_, row)| fresh.iter().any(|w| !row.contains((w.get() - 1) as usize)))
            .map(|(&lang, _)| lang)
            .collect();
        for lang in ruled_out {
            self.drop_language(lang);
        }
        self.known.extend(fresh);
        for lang in self.scope + 1..=scope {
            self.enter(oracle, lang);
        }
        self.scope = scope;
        m_start
    }

    /// One step of the prefix search: increments `m`, recomputes the
    /// selected critical language, and stops at the least accepted id
    /// `≤ m` in that language's prefix.
    pub fn run_step(
        &mut self,
        oracle: &Oracle,
        t: usize,
        sample: &SampleSet,
        selector: Selector<'_>,
        accept: &dyn Fn(UniverseId) -> bool,
    ) -> Result<EngineOutcome> {
        let m_start = self.begin_step(oracle, t, sample);
        self.record(t, selector);
        if self.rows.is_empty() {
            return Ok(EngineOutcome::NoConsistent { m_start });
        }
        let Some(mut n) = self.select(selector) else {
            return Ok(EngineOutcome::NoSelectable {
                m_start,
                m: m_start,
            });
        };
        let mut disruptive = 0;
        let mut rescan = true;
        for _ in 0..self.ceiling {
            let m = self.m + 1;
            self.extend_to(oracle, m);
            self.record(t, selector);
            let Some(next) = self.select(selector) else {
                return Ok(EngineOutcome::NoSelectable { m_start, m });
            };
            if next != n {
                disruptive += 1;
                if disruptive + 1 > t {
                    return Err(Error::Invariant {
                        step: t,
                        msg: format!("{disruptive} disruptive iterations exceed t - 1"),
                    });
                }
                n = next;
                rescan = true;
            }
            let row = &self.rows[&n];
            let found = if rescan {
                row.ones()
                    .map(|b| UniverseId::from_index(b as u64 + 1))
                    .find(|&w| accept(w))
            } else {
                let w = UniverseId::from_index(m);
                (row.contains((m - 1) as usize) && accept(w)).then_some(w)
            };
            rescan = false;
            if let Some(output) = found {
                return Ok(EngineOutcome::Found {
                    output,
                    n,
                    m_start,
                    m,
                    disruptive,
                });
            }
        }
        Err(Error::IterationCeiling {
            step: t,
            ceiling: self.ceiling,
            reason: format!("no acceptable member of L{n} up to u{}", self.m),
        })
    }
}

/// (t,m)-criticality computed from scratch with `m` membership queries per
/// language; an independent check on the engine.
pub fn critical_indices_prefix(
    oracle: &Oracle,
    sample: &SampleSet,
    t: usize,
    m: u64,
) -> Result<CriticalRecord> {
    let scope = oracle.size().clamp(t);
    let consistent = super::consistent_indices(oracle, sample, scope);
    let mut prefixes = BTreeMap::new();
    for &i in &consistent {
        prefixes.insert(i, oracle.prefix(i, m)?);
    }
    let mut critical = Vec::new();
    for &n in &consistent {
        let mut ok = true;
        for &i in consistent.iter().take_while(|&&i| i < n) {
            if !crate::collection::prefix_subset(&prefixes[&n], &prefixes[&i])? {
                ok = false;
                break;
            }
        }
        if ok {
            critical.push(n);
        }
    }
    Ok(CriticalRecord {
        t,
        m: Some(m),
        n_t: critical.last().copied(),
        consistent,
        critical,
    })
}
