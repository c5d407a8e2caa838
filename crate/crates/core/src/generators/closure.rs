//! Closure `⟨S⟩ = D(I(S))`: the intersection of every language consistent
//! with the sample, and the uniform sample bound for finite collections.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{consistent_indices, Generator, StepInput, StepOutput};
use crate::collection::{Capability, CollectionSize, IntersectionSize, Oracle};
use crate::error::{Error, Result};
use crate::game::SampleSet;
use crate::universe::UniverseId;

/// Largest collection `finite_bound` will enumerate subsets of.
pub const MAX_BOUND_COLLECTION: usize = 20;

/// Lazily lists `⟨S⟩ − S` in ascending id order up to an id ceiling.
#[derive(Debug)]
pub struct ClosureStream<'a> {
    oracle: &'a Oracle,
    sample: &'a SampleSet,
    members: Vec<usize>,
    cursor: u64,
    ceiling: u64,
}

impl ClosureStream<'_> {
    /// `I(S)`: the languages whose intersection is enumerated.
    pub fn consistent(&self) -> &[usize] {
        &self.members
    }
}

impl Iterator for ClosureStream<'_> {
    type Item = UniverseId;

    fn next(&mut self) -> Option<UniverseId> {
        while self.cursor < self.ceiling {
            self.cursor += 1;
            let w = UniverseId::from_index(self.cursor);
            if self.sample.contains(w) {
                continue;
            }
            if self.members.iter().all(|&i| self.oracle.member(i, w)) {
                return Some(w);
            }
        }
        None
    }
}

fn scope_of(oracle: &Oracle, scope: Option<usize>) -> Result<usize> {
    match (oracle.size(), scope) {
        (size, Some(n)) => Ok(size.clamp(n)),
        (CollectionSize::Finite(n), None) => Ok(n),
        (CollectionSize::Infinite, None) => Err(Error::Unsupported(
            "closure over an infinite collection needs an index bound".into(),
        )),
    }
}

/// Closure stream over `C|_scope` (the whole collection when `scope` is
/// `None`, which requires a finite collection).
pub fn closure_stream<'a>(
    oracle: &'a Oracle,
    sample: &'a SampleSet,
    scope: Option<usize>,
    ceiling: u64,
) -> Result<ClosureStream<'a>> {
    let n = scope_of(oracle, scope)?;
    Ok(ClosureStream {
        oracle,
        sample,
        members: consistent_indices(oracle, sample, n),
        cursor: 0,
        ceiling,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteBound {
    /// Largest finite `|D(A)|` over nonempty `A`; zero when none is finite.
    pub m_star: u128,
    /// `m* + 1`.
    pub t_c: u128,
    /// Number of nonempty index sets with a finite intersection.
    pub finite_families: usize,
}

/// `m*` and `t(C)` by enumerating every nonempty sub-collection.
pub fn finite_bound(oracle: &Oracle) -> Result<FiniteBound> {
    oracle.require(Capability::FiniteIntersections)?;
    let n = match oracle.size() {
        CollectionSize::Finite(n) if n <= MAX_BOUND_COLLECTION => n,
        CollectionSize::Finite(n) => {
            return Err(Error::Unsupported(format!(
                "{n} languages; subset enumeration is limited to {MAX_BOUND_COLLECTION}"
            )))
        }
        CollectionSize::Infinite => {
            return Err(Error::Unsupported("collection is infinite".into()))
        }
    };
    let mut m_star = 0;
    let mut finite_families = 0;
    for mask in 1u32..(1 << n) {
        let family: Vec<usize> = (0..n)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect();
        if let IntersectionSize::Finite(k) = oracle.intersection_size(&family)? {
            finite_families += 1;
            m_star = m_star.max(k);
        }
    }
    Ok(FiniteBound {
        m_star,
        t_c: m_star + 1,
        finite_families,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub sample: Vec<UniverseId>,
    pub consistent: Vec<usize>,
    /// Whether `⟨S⟩` is finite, when intersection sizes are available.
    pub finite: Option<bool>,
    pub size: Option<u128>,
    pub bound: Option<FiniteBound>,
}

/// Summary of `⟨S⟩` over `C|_scope`, with exact sizes where the collection
/// can compute them.
pub fn closure_report(
    oracle: &Oracle,
    sample: &SampleSet,
    scope: Option<usize>,
) -> Result<ClosureReport> {
    let n = scope_of(oracle, scope)?;
    let consistent = consistent_indices(oracle, sample, n);
    let exact = oracle.capabilities().has(Capability::FiniteIntersections);
    let size = if exact && !consistent.is_empty() {
        Some(oracle.intersection_size(&consistent)?)
    } else if consistent.is_empty() {
        Some(IntersectionSize::Infinite)
    } else {
        None
    };
    let bound = match oracle.size() {
        CollectionSize::Finite(k) if exact && k <= MAX_BOUND_COLLECTION => {
            Some(finite_bound(oracle)?)
        }
        _ => None,
    };
    Ok(ClosureReport {
        sample: sample.distinct().iter().copied().collect(),
        consistent,
        finite: size.map(|s| matches!(s, IntersectionSize::Finite(_))),
        size: match size {
            Some(IntersectionSize::Finite(k)) => Some(k),
            _ => None,
        },
        bound,
    })
}

/// Outputs the least unseen element of `⟨S_t⟩` over a finite collection.
#[derive(Clone, Debug)]
pub struct ClosureGenerator {
    ceiling: u64,
}

impl ClosureGenerator {
    pub fn new(ceiling: u64) -> Self {
        ClosureGenerator { ceiling }
    }
}

impl Generator for ClosureGenerator {
    fn name(&self) -> String {
        "closure".into()
    }

    fn step_excluding(
        &mut self,
        oracle: &Oracle,
        input: &StepInput<'_>,
        excluded: &BTreeSet<UniverseId>,
    ) -> Result<StepOutput> {
        let mut stream = closure_stream(oracle, input.sample, None, self.ceiling)?;
        match stream.find(|w| !excluded.contains(w)) {
            Some(w) => Ok(StepOutput::emit(w)),
            None => Ok(StepOutput::fallback(input.sample.least_absent(excluded))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::{IntCollection, IntLanguage};
    use crate::universe::{Element, Universe};

    fn id(x: i64) -> UniverseId {
        Universe::Integers.index_of(&Element::Int(x)).unwrap()
    }

    fn int(w: UniverseId) -> i64 {
        Universe::Integers.element_at(w).as_int().unwrap()
    }

    fn parity_pair() -> Oracle {
        Oracle::from_collection(IntCollection::list(vec![
            IntLanguage::obscured(2, 2, [1, 3, 5]),
            IntLanguage::obscured(1, 2, [2, 4, 6]),
        ]))
    }

    #[test]
    fn closure_of_one_and_two() {
        let o = parity_pair();
        let s: SampleSet = [id(1), id(2)].into_iter().collect();
        let stream = closure_stream(&o, &s, None, 10_000).unwrap();
        assert_eq!(stream.consistent(), [1, 2]);
        let mut got: Vec<i64> = stream.map(int).collect();
        got.sort();
        assert_eq!(got, [3, 4, 5, 6]);
    }

    #[test]
    fn closure_of_everything() {
        let o = Oracle::from_collection(IntCollection::list(vec![IntLanguage::q(0, 1)]));
        let s: SampleSet = [id(0)].into_iter().collect();
        let got: Vec<i64> = closure_stream(&o, &s, None, 9).unwrap().map(int).collect();
        assert_eq!(got, [1, -1, 2, -2, 3, -3, 4, -4]);
    }

    #[test]
    fn bound_examples() {
        let b = finite_bound(&parity_pair()).unwrap();
        assert_eq!((b.m_star, b.t_c, b.finite_families), (6, 7, 1));
        let o = Oracle::from_collection(IntCollection::list(vec![
            IntLanguage::p(0, 2),
            IntLanguage::p(0, 3),
        ]));
        assert_eq!(finite_bound(&o).unwrap().t_c, 1);
        let single = Oracle::from_collection(IntCollection::list(vec![IntLanguage::p(5, 3)]));
        assert_eq!(finite_bound(&single).unwrap().t_c, 1);
        let inf = Oracle::from_collection(IntCollection::arith_progressions());
        assert!(finite_bound(&inf).is_err());
    }

    #[test]
    fn report_reflects_exact_size() {
        let o = parity_pair();
        let s: SampleSet = [id(1), id(2)].into_iter().collect();
        let r = closure_report(&o, &s, None).unwrap();
        assert_eq!((r.finite, r.size), (Some(true), Some(6)));
        assert_eq!(r.bound.unwrap().t_c, 7);
    }
}
