use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::universe::UniverseId;

/// Everything the adversary has enumerated so far, in arrival order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<UniverseId>", into = "Vec<UniverseId>")]
pub struct SampleSet {
    arrivals: Vec<UniverseId>,
    distinct: BTreeSet<UniverseId>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::new();
        for id in ids {
            s.push(UniverseId::from_index(id));
        }
        s
    }

    pub fn push(&mut self, w: UniverseId) {
        self.arrivals.push(w);
        self.distinct.insert(w);
    }

    pub fn arrivals(&self) -> &[UniverseId] {
        &self.arrivals
    }

    pub fn distinct(&self) -> &BTreeSet<UniverseId> {
        &self.distinct
    }

    pub fn contains(&self, w: UniverseId) -> bool {
        self.distinct.contains(&w)
    }

    pub fn last(&self) -> Option<UniverseId> {
        self.arrivals.last().copied()
    }

    pub fn max_id(&self) -> Option<UniverseId> {
        self.distinct.last().copied()
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// Least id outside the sample and outside `also`.
    pub fn least_absent(&self, also: &BTreeSet<UniverseId>) -> UniverseId {
        let mut w = UniverseId::FIRST;
        while self.contains(w) || also.contains(&w) {
            w = w.next();
        }
        w
    }
}

impl From<Vec<UniverseId>> for SampleSet {
    fn from(ids: Vec<UniverseId>) -> Self {
        ids.into_iter().collect()
    }
}

impl From<SampleSet> for Vec<UniverseId> {
    fn from(s: SampleSet) -> Self {
        s.arrivals
    }
}

impl FromIterator<UniverseId> for SampleSet {
    fn from_iter<I: IntoIterator<Item = UniverseId>>(iter: I) -> Self {
        let mut s = SampleSet::new();
        for w in iter {
            s.push(w);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeats_keep_one_distinct_copy() {
        let s = SampleSet::from_ids([3, 1, 3]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.distinct().len(), 2);
        assert_eq!(s.last(), Some(UniverseId::from_index(3)));
        assert_eq!(s.least_absent(&BTreeSet::new()), UniverseId::from_index(2));
        let skip = BTreeSet::from([UniverseId::from_index(2)]);
        assert_eq!(s.least_absent(&skip), UniverseId::from_index(4));
    }
}
