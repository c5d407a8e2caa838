//! Integer languages built from arithmetic progressions.
//!
//! `P(a,b) = {a + b·i : i ≥ 0}`, `Q(a,b) = {a + b·i : i ∈ ℤ}` and the obscured
//! form `L(a,b,V) = P(a,b) ∪ V` for a finite set `V`. All of them are infinite,
//! inclusion between any two is decidable exactly, and so is the size of any
//! finite intersection.
//!
//! The infinite families are listed by fixed pairing functions:
//!
//! * arithmetic progressions: index `i` maps to `k = i - 1`; the kind is `P`
//!   for even `k` and `Q` for odd `k`; `(x, y) = cantor⁻¹(k / 2)`;
//!   `a` is the integer with zigzag id `x + 1` and `b = y + 1`.
//! * obscured progressions: index `i` maps to the `(i-1)`-th triple `(x, y, c)`
//!   ordered by `x + y + c` and then lexicographically; `a` and `b` as above,
//!   and bit `j` of `c` puts the integer with zigzag id `j + 1` into `V`.
//! * gold progressions: `P(0,1), P(-1,1), …, P(-(depth-1),1)` followed by the
//!   arithmetic progressions.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Capabilities, CollectionSize, IntersectionSize, LanguageCollection};
use crate::error::{Error, Result};
use crate::universe::{Element, Universe, UniverseId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// `P(a,b)`: `a, a+b, a+2b, …`
    #[serde(rename = "P")]
    Up,
    /// `Q(a,b)`: unbounded in both directions.
    #[serde(rename = "Q")]
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntLanguage {
    pub kind: Direction,
    #[serde(rename = "a")]
    pub start: i64,
    #[serde(rename = "b")]
    pub step: u64,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub extra: BTreeSet<i64>,
}

impl IntLanguage {
    pub fn try_new(kind: Direction, start: i64, step: u64, extra: BTreeSet<i64>) -> Result<Self> {
        if step == 0 || step > i64::MAX as u64 {
            return Err(Error::Scenario(format!(
                "progression step must be in 1..=i64::MAX, got {step}"
            )));
        }
        Ok(IntLanguage {
            kind,
            start,
            step,
            extra,
        })
    }

    pub fn p(a: i64, b: u64) -> Self {
        Self::try_new(Direction::Up, a, b, BTreeSet::new()).unwrap()
    }

    pub fn q(a: i64, b: u64) -> Self {
        Self::try_new(Direction::Both, a, b, BTreeSet::new()).unwrap()
    }

    /// `L(a,b,V) = P(a,b) ∪ V`.
    pub fn obscured(a: i64, b: u64, extra: impl IntoIterator<Item = i64>) -> Self {
        Self::try_new(Direction::Up, a, b, extra.into_iter().collect()).unwrap()
    }

    pub fn with_extra(mut self, extra: impl IntoIterator<Item = i64>) -> Self {
        self.extra.extend(extra);
        self
    }

    fn base_contains(&self, x: i64) -> bool {
        let diff = i128::from(x) - i128::from(self.start);
        let b = i128::from(self.step);
        match self.kind {
            Direction::Up => diff >= 0 && diff % b == 0,
            Direction::Both => diff.rem_euclid(b) == 0,
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.base_contains(x) || self.extra.contains(&x)
    }

    /// Exact inclusion test.
    pub fn is_subset_of(&self, other: &IntLanguage) -> bool {
        self.extra.iter().all(|&x| other.contains(x)) && self.base_subset_of(other)
    }

    // A periodic base is covered by `other` only when every residue matches;
    // otherwise infinitely many elements fall outside other's base and its
    // finite extra part cannot absorb them.
    fn base_subset_of(&self, other: &IntLanguage) -> bool {
        let congruent = self.step % other.step == 0
            && (i128::from(self.start) - i128::from(other.start))
                .rem_euclid(i128::from(other.step))
                == 0;
        if !congruent {
            return false;
        }
        match (self.kind, other.kind) {
            (_, Direction::Both) => true,
            (Direction::Both, Direction::Up) => false,
            (Direction::Up, Direction::Up) => {
                // elements below other's start must all sit in other's extra set
                let below = (i128::from(other.start) - i128::from(self.start)).max(0);
                let count = (below + i128::from(self.step) - 1) / i128::from(self.step);
                if count > other.extra.len() as i128 {
                    return false;
                }
                (0..count).all(|i| {
                    let x = i128::from(self.start) + i * i128::from(self.step);
                    other.extra.contains(&(x as i64))
                })
            }
        }
    }

    pub fn same_set(&self, other: &IntLanguage) -> bool {
        self.is_subset_of(other) && other.is_subset_of(self)
    }
}

impl fmt::Display for IntLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            Direction::Up => "P",
            Direction::Both => "Q",
        };
        if self.extra.is_empty() {
            write!(f, "{tag}({},{})", self.start, self.step)
        } else {
            let v: Vec<String> = self.extra.iter().map(i64::to_string).collect();
            let tag = if self.kind == Direction::Up {
                "L"
            } else {
                "QV"
            };
            write!(f, "{tag}({},{},{{{}}})", self.start, self.step, v.join(","))
        }
    }
}

/// Size of `⋂ langs`. Infinite exactly when the residue system
/// `x ≡ a_k (mod b_k)` is solvable; otherwise the intersection lies inside the
/// union of the finite extra sets. `None` if a modulus overflows.
pub fn intersection_size(langs: &[&IntLanguage]) -> Option<IntersectionSize> {
    if langs.is_empty() {
        return Some(IntersectionSize::Infinite);
    }
    let mut residue: i128 = 0;
    let mut modulus: i128 = 1;
    let mut solvable = true;
    for l in langs {
        match crt_merge(residue, modulus, i128::from(l.start), i128::from(l.step)) {
            Some(Some((r, m))) => {
                residue = r;
                modulus = m;
            }
            Some(None) => {
                solvable = false;
                break;
            }
            None => return None,
        }
    }
    if solvable {
        return Some(IntersectionSize::Infinite);
    }
    let candidates: BTreeSet<i64> = langs.iter().flat_map(|l| l.extra.iter().copied()).collect();
    let count = candidates
        .into_iter()
        .filter(|&x| langs.iter().all(|l| l.contains(x)))
        .count();
    Some(IntersectionSize::Finite(count as u128))
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Merges `x ≡ r1 (mod m1)` with `x ≡ r2 (mod m2)`. Outer `None` on overflow,
/// inner `None` when the system has no solution.
fn crt_merge(r1: i128, m1: i128, r2: i128, m2: i128) -> Option<Option<(i128, i128)>> {
    let (g, p, _) = ext_gcd(m1, m2);
    let diff = r2 - r1;
    if diff.rem_euclid(g) != 0 {
        return Some(None);
    }
    let lcm = (m1 / g).checked_mul(m2)?;
    let step = (diff / g)
        .rem_euclid(m2 / g)
        .checked_mul(p.rem_euclid(m2 / g))?;
    let k = step.rem_euclid(m2 / g);
    let r = r1.checked_add(m1.checked_mul(k)?)?.rem_euclid(lcm);
    Some(Some((r, lcm)))
}

static INTEGERS: Universe = Universe::Integers;

fn zig(id: u64) -> i64 {
    match Universe::Integers.element_at(UniverseId::from_index(id)) {
        Element::Int(x) => x,
        Element::Str(_) => unreachable!(),
    }
}

fn zig_index(x: i64) -> Option<u64> {
    Universe::Integers
        .index_of(&Element::Int(x))
        .ok()
        .map(UniverseId::get)
}

fn cantor_unpair(k: u64) -> (u64, u64) {
    let mut w = (((8.0 * k as f64 + 1.0).sqrt() - 1.0) / 2.0).floor() as u64;
    // fix floating error
    while w * (w + 1) / 2 > k {
        w -= 1;
    }
    while (w + 1) * (w + 2) / 2 <= k {
        w += 1;
    }
    let y = k - w * (w + 1) / 2;
    (w - y, y)
}

fn cantor_pair(x: u64, y: u64) -> Option<u64> {
    let w = x.checked_add(y)?;
    w.checked_mul(w.checked_add(1)?)?
        .checked_div(2)?
        .checked_add(y)
}

fn tetra(s: u64) -> u128 {
    let s = u128::from(s);
    s * (s + 1) * (s + 2) / 6
}

/// The `k`-th triple in (sum, then lexicographic) order.
fn triple_unrank(k: u64) -> (u64, u64, u64) {
    let k128 = u128::from(k);
    let mut s = ((6.0 * k as f64).cbrt() as u64).saturating_sub(2);
    while tetra(s + 1) <= k128 {
        s += 1;
    }
    while tetra(s) > k128 {
        s -= 1;
    }
    let mut rem = (k128 - tetra(s)) as u64;
    let mut x = 0;
    // triples with first component x and sum s: s - x + 1 of them
    while rem >= s - x + 1 {
        rem -= s - x + 1;
        x += 1;
    }
    let y = rem;
    (x, y, s - x - y)
}

fn triple_rank(x: u64, y: u64, c: u64) -> Option<u64> {
    let s = x.checked_add(y)?.checked_add(c)?;
    let mut k = tetra(s);
    for xp in 0..x {
        k += u128::from(s - xp + 1);
    }
    k += u128::from(y);
    u64::try_from(k).ok()
}

/// Language at 1-based position `i` in the arithmetic-progression dovetail.
pub fn arith_language(i: usize) -> IntLanguage {
    let k = (i - 1) as u64;
    let (x, y) = cantor_unpair(k / 2);
    let kind = if k % 2 == 0 {
        Direction::Up
    } else {
        Direction::Both
    };
    IntLanguage::try_new(kind, zig(x + 1), y + 1, BTreeSet::new()).unwrap()
}

/// Position of a plain progression in the arithmetic-progression dovetail.
pub fn arith_index(lang: &IntLanguage) -> Option<usize> {
    if !lang.extra.is_empty() {
        return None;
    }
    let x = zig_index(lang.start)? - 1;
    let y = lang.step - 1;
    let k = cantor_pair(x, y)?
        .checked_mul(2)?
        .checked_add(u64::from(lang.kind == Direction::Both))?;
    usize::try_from(k).ok()?.checked_add(1)
}

fn obscured_parts(i: usize) -> (i64, u64, u64) {
    let (x, y, c) = triple_unrank((i - 1) as u64);
    (zig(x + 1), y + 1, c)
}

fn code_contains(code: u64, x: i64) -> bool {
    match zig_index(x) {
        Some(id) if id <= 64 => code >> (id - 1) & 1 == 1,
        _ => false,
    }
}

/// Language at 1-based position `i` in the obscured-progression dovetail.
pub fn obscured_language(i: usize) -> IntLanguage {
    let (a, b, code) = obscured_parts(i);
    let extra = (0..64).filter(|j| code >> j & 1 == 1).map(|j| zig(j + 1));
    IntLanguage::obscured(a, b, extra)
}

/// Position of `L(a,b,V)` in the obscured-progression dovetail, when its
/// code fits in 64 bits.
pub fn obscured_index(lang: &IntLanguage) -> Option<usize> {
    if lang.kind != Direction::Up {
        return None;
    }
    let mut code: u64 = 0;
    for &v in &lang.extra {
        let id = zig_index(v)?;
        if id > 64 {
            return None;
        }
        code |= 1 << (id - 1);
    }
    let k = triple_rank(zig_index(lang.start)? - 1, lang.step - 1, code)?;
    usize::try_from(k).ok()?.checked_add(1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntFamily {
    /// Explicit finite list.
    List(Vec<IntLanguage>),
    Arith,
    Obscured,
    Gold {
        depth: usize,
    },
}

/// Collection of integer languages.
#[derive(Clone, Debug)]
pub struct IntCollection {
    family: IntFamily,
}

impl IntCollection {
    pub fn list(langs: Vec<IntLanguage>) -> Self {
        IntCollection {
            family: IntFamily::List(langs),
        }
    }

    pub fn arith_progressions() -> Self {
        IntCollection {
            family: IntFamily::Arith,
        }
    }

    pub fn obscured_progressions() -> Self {
        IntCollection {
            family: IntFamily::Obscured,
        }
    }

    pub fn gold_progressions(depth: usize) -> Self {
        IntCollection {
            family: IntFamily::Gold { depth },
        }
    }

    pub fn family(&self) -> &IntFamily {
        &self.family
    }

    /// The `i`-th language (1-based); `i` must be in range.
    pub fn language(&self, i: usize) -> IntLanguage {
        match &self.family {
            IntFamily::List(v) => v[i - 1].clone(),
            IntFamily::Arith => arith_language(i),
            IntFamily::Obscured => obscured_language(i),
            IntFamily::Gold { depth } if i <= *depth => IntLanguage::p(-((i - 1) as i64), 1),
            IntFamily::Gold { depth } => arith_language(i - depth),
        }
    }

    /// Least index listing exactly this language, searching a list
    /// exhaustively and the dovetails by inverting their pairing function.
    pub fn index_of_language(&self, lang: &IntLanguage) -> Option<usize> {
        match &self.family {
            IntFamily::List(v) => v.iter().position(|l| l.same_set(lang)).map(|p| p + 1),
            IntFamily::Arith => arith_index(lang),
            IntFamily::Obscured => obscured_index(lang),
            IntFamily::Gold { depth } => (1..=*depth)
                .find(|&i| self.language(i).same_set(lang))
                .or_else(|| arith_index(lang).map(|i| i + depth)),
        }
    }
}

impl LanguageCollection for IntCollection {
    fn name(&self) -> String {
        match &self.family {
            IntFamily::List(_) => "progression_list".into(),
            IntFamily::Arith => "arith_progressions".into(),
            IntFamily::Obscured => "obscured_progressions".into(),
            IntFamily::Gold { .. } => "gold_progressions".into(),
        }
    }

    fn universe(&self) -> &Universe {
        &INTEGERS
    }

    fn size(&self) -> CollectionSize {
        match &self.family {
            IntFamily::List(v) => CollectionSize::Finite(v.len()),
            _ => CollectionSize::Infinite,
        }
    }

    fn contains(&self, lang: usize, w: UniverseId) -> bool {
        let x = zig(w.get());
        match &self.family {
            IntFamily::List(v) => v[lang - 1].contains(x),
            IntFamily::Arith => arith_language(lang).contains(x),
            IntFamily::Obscured => {
                let (a, b, code) = obscured_parts(lang);
                let diff = i128::from(x) - i128::from(a);
                (diff >= 0 && diff % i128::from(b) == 0) || code_contains(code, x)
            }
            IntFamily::Gold { .. } => self.language(lang).contains(x),
        }
    }

    fn describe(&self, lang: usize) -> String {
        self.language(lang).to_string()
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities::SUBSET | Capabilities::INTERSECTIONS
    }

    fn is_subset(&self, i: usize, j: usize) -> Option<bool> {
        Some(self.language(i).is_subset_of(&self.language(j)))
    }

    fn intersection_size(&self, langs: &[usize]) -> Option<IntersectionSize> {
        let owned: Vec<IntLanguage> = langs.iter().map(|&i| self.language(i)).collect();
        let refs: Vec<&IntLanguage> = owned.iter().collect();
        intersection_size(&refs)
    }

    fn progression(&self, i: usize) -> Option<IntLanguage> {
        Some(self.language(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_subset(a: &IntLanguage, b: &IntLanguage, ids: u64) -> Option<i64> {
        (1..=ids)
            .map(zig)
            .find(|&x| a.contains(x) && !b.contains(x))
    }

    #[test]
    fn membership_examples() {
        let p = IntLanguage::p(3, 5);
        assert!(p.contains(13));
        assert!(!p.contains(4));
        assert!(!p.contains(-2));
        assert!(IntLanguage::q(3, 5).contains(-2));
        assert!(IntLanguage::obscured(0, 7, [1, 2, 3]).contains(2));
    }

    #[test]
    fn subset_examples() {
        assert!(IntLanguage::p(0, 6).is_subset_of(&IntLanguage::p(0, 2)));
        assert!(!IntLanguage::p(0, 2).is_subset_of(&IntLanguage::p(0, 6)));
        assert_eq!(
            brute_subset(&IntLanguage::p(0, 2), &IntLanguage::p(0, 6), 200),
            Some(2)
        );
        let l = IntLanguage::obscured(0, 7, [1]);
        assert!(l.is_subset_of(&l));
        // P(-4,2) ⊆ P(0,2) ∪ {-4,-2}
        assert!(IntLanguage::p(-4, 2).is_subset_of(&IntLanguage::obscured(0, 2, [-4, -2])));
        assert!(!IntLanguage::p(-4, 2).is_subset_of(&IntLanguage::obscured(0, 2, [-4])));
        assert!(!IntLanguage::q(0, 2).is_subset_of(&IntLanguage::obscured(0, 2, [-2, -4])));
        assert!(IntLanguage::p(5, 4).is_subset_of(&IntLanguage::q(1, 2)));
    }

    #[test]
    fn intersection_sizes() {
        let e = IntLanguage::obscured(2, 2, [1, 3, 5]);
        let o = IntLanguage::obscured(1, 2, [2, 4, 6]);
        assert_eq!(
            intersection_size(&[&e, &o]),
            Some(IntersectionSize::Finite(6))
        );
        assert_eq!(intersection_size(&[&e]), Some(IntersectionSize::Infinite));
        let (p2, p3) = (IntLanguage::p(0, 2), IntLanguage::p(0, 3));
        assert_eq!(
            intersection_size(&[&p2, &p3]),
            Some(IntersectionSize::Infinite)
        );
        let (p, q) = (IntLanguage::p(1, 4), IntLanguage::q(3, 6));
        // x ≡ 1 mod 4 and x ≡ 3 mod 6: x ≡ 9 mod 12
        assert_eq!(
            intersection_size(&[&p, &q]),
            Some(IntersectionSize::Infinite)
        );
        assert!(p.contains(9) && q.contains(9));
    }

    #[test]
    fn dovetail_positions() {
        assert_eq!(arith_language(1), IntLanguage::p(0, 1));
        assert_eq!(arith_language(2), IntLanguage::q(0, 1));
        assert_eq!(arith_index(&IntLanguage::p(3, 5)), Some(99));
        assert_eq!(arith_language(99), IntLanguage::p(3, 5));
        for i in 1..2000 {
            assert_eq!(arith_index(&arith_language(i)), Some(i));
            assert_eq!(obscured_index(&obscured_language(i)), Some(i));
        }
        let gold = IntCollection::gold_progressions(4);
        assert_eq!(gold.language(3), IntLanguage::p(-2, 1));
        assert_eq!(gold.language(6), IntLanguage::q(0, 1));
        assert_eq!(gold.index_of_language(&IntLanguage::q(0, 1)), Some(6));
    }

    #[test]
    fn obscured_fast_path_matches_language() {
        let c = IntCollection::obscured_progressions();
        for i in 1..400 {
            let l = obscured_language(i);
            for id in 1..200 {
                assert_eq!(
                    c.contains(i, UniverseId::from_index(id)),
                    l.contains(zig(id))
                );
            }
        }
    }

    #[test]
    fn every_builtin_language_is_infinite_at_desk_scale() {
        for coll in [
            IntCollection::arith_progressions(),
            IntCollection::obscured_progressions(),
            IntCollection::gold_progressions(6),
        ] {
            for i in 1..=60 {
                for m in [10u64, 100, 1000] {
                    let found =
                        (m + 1..=10 * m).any(|id| coll.contains(i, UniverseId::from_index(id)));
                    assert!(found, "{} lang {i} has no member above {m}", coll.name());
                }
            }
        }
    }

    #[test]
    fn subset_agrees_with_brute_force_on_builtin_pairs() {
        for coll in [
            IntCollection::arith_progressions(),
            IntCollection::obscured_progressions(),
        ] {
            for i in 1..=50 {
                for j in 1..=50 {
                    let (a, b) = (coll.language(i), coll.language(j));
                    let witness = brute_subset(&a, &b, 500);
                    assert_eq!(
                        a.is_subset_of(&b),
                        witness.is_none(),
                        "{a} ⊆ {b}, witness {witness:?}"
                    );
                }
            }
        }
    }

    fn small_lang() -> impl Strategy<Value = IntLanguage> {
        (
            any::<bool>(),
            -6i64..6,
            1u64..7,
            proptest::collection::btree_set(-12i64..12, 0..4),
        )
            .prop_map(|(up, a, b, v)| {
                let kind = if up { Direction::Up } else { Direction::Both };
                IntLanguage::try_new(kind, a, b, v).unwrap()
            })
    }

    proptest! {
        #[test]
        fn subset_rule_matches_window_scan(a in small_lang(), b in small_lang()) {
            // both languages are periodic outside [-12, 12], so a window of a
            // few hundred ids around zero decides inclusion
            prop_assert_eq!(a.is_subset_of(&b), brute_subset(&a, &b, 400).is_none());
        }

        #[test]
        fn intersection_rule_matches_window_scan(a in small_lang(), b in small_lang(), c in small_lang()) {
            let langs = [&a, &b, &c];
            let size = intersection_size(&langs).unwrap();
            let inside = |x: i64| langs.iter().all(|l| l.contains(x));
            let far = (200..400).any(|x| inside(x) || inside(-x));
            match size {
                IntersectionSize::Infinite => prop_assert!(far),
                IntersectionSize::Finite(n) => {
                    prop_assert!(!far);
                    prop_assert_eq!((-200..200).filter(|&x| inside(x)).count() as u128, n);
                }
            }
        }
    }
}
