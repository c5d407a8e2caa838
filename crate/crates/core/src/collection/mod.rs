//! Countable language collections behind a counting membership oracle.

pub mod automaton;
pub mod families;
pub mod progression;

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use bitflags::bitflags;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::universe::{Element, Universe, UniverseId};

pub use automaton::Dfa;
pub use families::{DfaCollection, MatrixCollection};
pub use progression::{IntCollection, IntLanguage};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CollectionSize {
    Finite(usize),
    Infinite,
}

impl CollectionSize {
    /// Restricts an index bound to the collection: `min(n, size)`.
    pub fn clamp(self, n: usize) -> usize {
        match self {
            CollectionSize::Finite(k) => n.min(k),
            CollectionSize::Infinite => n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntersectionSize {
    Finite(u128),
    Infinite,
}

/// Query kinds beyond membership.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capability {
    SubsetQuery,
    RegularQuery,
    FiniteIntersections,
}

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Capability::SubsetQuery => "subset queries",
            Capability::RegularQuery => "regular subset queries",
            Capability::FiniteIntersections => "intersection size queries",
        })
    }
}

bitflags! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
    pub struct Capabilities: u8 {
        const SUBSET = 1;
        const REGULAR = 1 << 1;
        const INTERSECTIONS = 1 << 2;
    }
}

impl Capabilities {
    pub fn has(self, cap: Capability) -> bool {
        self.contains(Capabilities::from(cap))
    }
}

impl From<Capability> for Capabilities {
    fn from(cap: Capability) -> Self {
        match cap {
            Capability::SubsetQuery => Capabilities::SUBSET,
            Capability::RegularQuery => Capabilities::REGULAR,
            Capability::FiniteIntersections => Capabilities::INTERSECTIONS,
        }
    }
}

/// An indexed family `L_1, L_2, …` of infinite languages.
///
/// `contains` is called with an index already validated against `size()`.
/// The optional queries return `None` when the collection cannot answer them.
pub trait LanguageCollection: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn universe(&self) -> &Universe;
    fn size(&self) -> CollectionSize;
    fn contains(&self, lang: usize, w: UniverseId) -> bool;

    fn describe(&self, lang: usize) -> String {
        format!("L{lang}")
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::empty()
    }

    fn is_subset(&self, _i: usize, _j: usize) -> Option<bool> {
        None
    }

    fn automaton(&self, _i: usize) -> Option<&Dfa> {
        None
    }

    fn intersection_size(&self, _langs: &[usize]) -> Option<IntersectionSize> {
        None
    }

    fn progression(&self, _i: usize) -> Option<IntLanguage> {
        None
    }
}

/// `L_i[m]`: the members of `L_i` among `u_1..u_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguagePrefix {
    pub lang: usize,
    pub bound: u64,
    pub members: Vec<UniverseId>,
}

/// `p ⊆ q` for prefixes with equal bounds.
pub fn prefix_subset(p: &LanguagePrefix, q: &LanguagePrefix) -> Result<bool> {
    if p.bound != q.bound {
        return Err(Error::BoundMismatch(p.bound, q.bound));
    }
    // both member lists are sorted
    let mut rest = q.members.iter().peekable();
    for w in &p.members {
        while rest.next_if(|&&x| x < *w).is_some() {}
        if rest.next_if(|&&x| x == *w).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryCounts {
    pub membership: u64,
    pub subset: u64,
    pub regular: u64,
}

#[derive(Debug, Default)]
struct Counters {
    membership: AtomicU64,
    subset: AtomicU64,
    regular: AtomicU64,
}

/// Shared collection handle that counts every query it answers.
///
/// Clones share counters; use [`Oracle::fresh`] for an independent count.
#[derive(Clone, Debug)]
pub struct Oracle {
    collection: Arc<dyn LanguageCollection>,
    counters: Arc<Counters>,
}

impl Oracle {
    pub fn new(collection: Arc<dyn LanguageCollection>) -> Self {
        Oracle {
            collection,
            counters: Arc::default(),
        }
    }

    pub fn from_collection(collection: impl LanguageCollection + 'static) -> Self {
        Self::new(Arc::new(collection))
    }

    /// Same collection, counters starting at zero.
    pub fn fresh(&self) -> Self {
        Self::new(self.collection.clone())
    }

    pub fn collection(&self) -> &Arc<dyn LanguageCollection> {
        &self.collection
    }

    pub fn universe(&self) -> &Universe {
        self.collection.universe()
    }

    pub fn size(&self) -> CollectionSize {
        self.collection.size()
    }

    pub fn capabilities(&self) -> Capabilities {
        self.collection.capabilities()
    }

    pub fn require(&self, cap: Capability) -> Result<()> {
        if self.capabilities().has(cap) {
            Ok(())
        } else {
            Err(Error::CapabilityMissing(cap))
        }
    }

    pub fn describe(&self, i: usize) -> String {
        self.collection.describe(i)
    }

    pub fn element(&self, w: UniverseId) -> Element {
        self.universe().element_at(w)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 {
            return Err(Error::ZeroLanguageIndex);
        }
        match self.size() {
            CollectionSize::Finite(size) if i > size => {
                Err(Error::IndexOutOfRange { index: i, size })
            }
            _ => Ok(()),
        }
    }

    pub fn is_member(&self, i: usize, w: UniverseId) -> Result<bool> {
        self.check_index(i)?;
        Ok(self.member(i, w))
    }

    /// Counted membership without the range check.
    pub(crate) fn member(&self, i: usize, w: UniverseId) -> bool {
        self.counters.membership.fetch_add(1, Ordering::Relaxed);
        self.collection.contains(i, w)
    }

    /// `L_i[m]`, using exactly `m` membership queries.
    pub fn prefix(&self, i: usize, m: u64) -> Result<LanguagePrefix> {
        self.check_index(i)?;
        if m == 0 {
            return Err(Error::ZeroBound);
        }
        let members = (1..=m)
            .map(UniverseId::from_index)
            .filter(|&w| self.member(i, w))
            .collect();
        Ok(LanguagePrefix {
            lang: i,
            bound: m,
            members,
        })
    }

    /// Exact `L_i ⊆ L_j`.
    pub fn subset_query(&self, i: usize, j: usize) -> Result<bool> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.require(Capability::SubsetQuery)?;
        self.counters.subset.fetch_add(1, Ordering::Relaxed);
        self.collection
            .is_subset(i, j)
            .ok_or(Error::CapabilityMissing(Capability::SubsetQuery))
    }

    fn automaton_of(&self, i: usize) -> Result<&Dfa> {
        self.check_index(i)?;
        self.require(Capability::RegularQuery)?;
        self.collection
            .automaton(i)
            .ok_or(Error::CapabilityMissing(Capability::RegularQuery))
    }

    /// Exact `L_i ⊆ L(r)`: `L_i ∩ ¬L(r)` is empty.
    pub fn regular_subset_query(&self, i: usize, r: &Dfa) -> Result<bool> {
        let a = self.automaton_of(i)?;
        self.counters.regular.fetch_add(1, Ordering::Relaxed);
        Ok(a.intersection(&r.complement())?.is_empty())
    }

    /// Least element of `L_i ∩ L(r)`, if any.
    pub fn regular_nonempty_intersection(&self, i: usize, r: &Dfa) -> Result<Option<UniverseId>> {
        let a = self.automaton_of(i)?;
        self.counters.regular.fetch_add(1, Ordering::Relaxed);
        match a.intersection(r)?.shortlex_least() {
            Some(word) => Ok(Some(self.universe().index_of(&Element::Str(word))?)),
            None => Ok(None),
        }
    }

    /// Whether `L_i ∩ L(r)` is infinite.
    pub fn regular_intersection_infinite(&self, i: usize, r: &Dfa) -> Result<bool> {
        let a = self.automaton_of(i)?;
        self.counters.regular.fetch_add(1, Ordering::Relaxed);
        Ok(a.intersection(r)?.is_infinite())
    }

    /// Size of `⋂_{i ∈ langs} L_i`.
    pub fn intersection_size(&self, langs: &[usize]) -> Result<IntersectionSize> {
        for &i in langs {
            self.check_index(i)?;
        }
        self.require(Capability::FiniteIntersections)?;
        self.counters.subset.fetch_add(1, Ordering::Relaxed);
        self.collection
            .intersection_size(langs)
            .ok_or_else(|| Error::Unsupported("intersection size overflowed".into()))
    }

    pub fn counts(&self) -> QueryCounts {
        QueryCounts {
            membership: self.counters.membership.load(Ordering::Relaxed),
            subset: self.counters.subset.load(Ordering::Relaxed),
            regular: self.counters.regular.load(Ordering::Relaxed),
        }
    }

    pub fn reset_counters(&self) {
        self.counters.membership.store(0, Ordering::Relaxed);
        self.counters.subset.store(0, Ordering::Relaxed);
        self.counters.regular.store(0, Ordering::Relaxed);
    }
}
