//! Canonical enumeration of the universe `u_1, u_2, u_3, ...`.
//!
//! Every other module speaks in [`UniverseId`]s; this module is the only place
//! that knows how an id maps to a concrete integer or string.
//!
//! * Integers are listed in zigzag order `0, 1, -1, 2, -2, ...`.
//! * Strings over a finite alphabet are listed in shortlex order, starting with
//!   the empty string. The id of a string is one plus its value as a bijective
//!   base-`k` numeral, which is exactly its shortlex rank.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroU64;

use serde::{Deserialize, Serialize};

use crate::error::UniverseError;

/// 1-based position of an element in the canonical enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct UniverseId(NonZeroU64);

impl UniverseId {
    pub const FIRST: UniverseId = UniverseId(NonZeroU64::MIN);

    pub fn new(index: u64) -> Option<Self> {
        NonZeroU64::new(index).map(UniverseId)
    }

    /// Panics on zero; for literals in tests and fixtures.
    pub fn from_index(index: u64) -> Self {
        Self::new(index).expect("universe ids are 1-based")
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }

    pub fn next(self) -> Self {
        UniverseId(self.0.checked_add(1).expect("universe id overflow"))
    }
}

impl TryFrom<u64> for UniverseId {
    type Error = UniverseError;

    fn try_from(value: u64) -> Result<Self, Self::Error> {
        UniverseId::new(value).ok_or(UniverseError::ZeroIndex)
    }
}

impl From<UniverseId> for u64 {
    fn from(id: UniverseId) -> u64 {
        id.get()
    }
}

impl fmt::Display for UniverseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// An element of the universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Int(i64),
    Str(String),
}

impl Element {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Element::Int(x) => Some(*x),
            Element::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Element::Str(s) => Some(s),
            Element::Int(_) => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Int(x) => write!(f, "{x}"),
            Element::Str(s) if s.is_empty() => f.write_str("ε"),
            Element::Str(s) => f.write_str(s),
        }
    }
}

/// Ordered finite list of distinct symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<char>,
    rank: HashMap<char, usize>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, UniverseError> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        if symbols.is_empty() {
            return Err(UniverseError::EmptyAlphabet);
        }
        let mut rank = HashMap::with_capacity(symbols.len());
        for (i, &c) in symbols.iter().enumerate() {
            if c == 'ε' || c.is_whitespace() || rank.insert(c, i).is_some() {
                return Err(UniverseError::BadSymbol(c));
            }
        }
        Ok(Alphabet { symbols, rank })
    }

    /// The two-letter alphabet `{a, b}` used by most fixtures.
    pub fn ab() -> Self {
        Alphabet::new(['a', 'b']).unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn symbol(&self, rank: usize) -> char {
        self.symbols[rank]
    }

    pub fn rank(&self, c: char) -> Option<usize> {
        self.rank.get(&c).copied()
    }

    /// Symbol ranks of the `id`-th word in shortlex order.
    pub fn ranks_of(&self, id: UniverseId) -> Vec<usize> {
        let k = self.symbols.len() as u64;
        let mut n = id.get() - 1;
        let mut ranks = Vec::new();
        while n > 0 {
            ranks.push(((n - 1) % k) as usize);
            n = (n - 1) / k;
        }
        ranks.reverse();
        ranks
    }

    /// Symbol ranks of `word`, or the first symbol outside the alphabet.
    pub fn encode(&self, word: &str) -> Result<Vec<usize>, UniverseError> {
        word.chars()
            .map(|c| self.rank(c).ok_or(UniverseError::BadSymbol(c)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Universe {
    Integers,
    Strings(Alphabet),
}

impl Universe {
    pub fn strings(symbols: &str) -> Result<Self, UniverseError> {
        Ok(Universe::Strings(Alphabet::new(symbols.chars())?))
    }

    pub fn alphabet(&self) -> Option<&Alphabet> {
        match self {
            Universe::Strings(a) => Some(a),
            Universe::Integers => None,
        }
    }

    pub fn is_strings(&self) -> bool {
        matches!(self, Universe::Strings(_))
    }

    pub fn element_at(&self, id: UniverseId) -> Element {
        match self {
            Universe::Integers => Element::Int(zigzag_decode(id.get())),
            Universe::Strings(alphabet) => Element::Str(shortlex_decode(alphabet, id.get())),
        }
    }

    pub fn index_of(&self, x: &Element) -> Result<UniverseId, UniverseError> {
        match (self, x) {
            (Universe::Integers, Element::Int(v)) => zigzag_encode(*v),
            (Universe::Strings(alphabet), Element::Str(s)) => shortlex_encode(alphabet, s),
            (Universe::Integers, Element::Str(s)) => Err(UniverseError::KindMismatch(s.clone())),
            (Universe::Strings(_), Element::Int(v)) => {
                Err(UniverseError::KindMismatch(v.to_string()))
            }
        }
    }

    /// Parses the textual form of an element (`ε` or the empty string denote
    /// the empty word).
    pub fn parse_element(&self, text: &str) -> Result<Element, UniverseError> {
        match self {
            Universe::Integers => text
                .trim()
                .parse::<i64>()
                .map(Element::Int)
                .map_err(|_| UniverseError::NotAnInteger(text.to_string())),
            Universe::Strings(alphabet) => {
                let word = if text == "ε" { "" } else { text };
                alphabet.encode(word)?;
                Ok(Element::Str(word.to_string()))
            }
        }
    }

    pub fn parse_id(&self, text: &str) -> Result<UniverseId, UniverseError> {
        self.index_of(&self.parse_element(text)?)
    }

    /// Decodes `id` as a string; `None` for the integer universe.
    pub fn word(&self, id: UniverseId) -> Option<String> {
        self.alphabet().map(|a| shortlex_decode(a, id.get()))
    }
}

fn zigzag_decode(index: u64) -> i64 {
    if index % 2 == 0 {
        (index / 2) as i64
    } else {
        -(((index - 1) / 2) as i64)
    }
}

fn zigzag_encode(x: i64) -> Result<UniverseId, UniverseError> {
    let index = if x > 0 {
        (x as u64) * 2
    } else {
        x.unsigned_abs()
            .checked_mul(2)
            .and_then(|v| v.checked_add(1))
            .ok_or(UniverseError::Overflow)?
    };
    Ok(UniverseId::from_index(index))
}

fn shortlex_decode(alphabet: &Alphabet, index: u64) -> String {
    alphabet
        .ranks_of(UniverseId::from_index(index))
        .into_iter()
        .map(|r| alphabet.symbol(r))
        .collect()
}

fn shortlex_encode(alphabet: &Alphabet, word: &str) -> Result<UniverseId, UniverseError> {
    let k = alphabet.len() as u64;
    let mut n: u64 = 0;
    for c in word.chars() {
        let d = alphabet.rank(c).ok_or(UniverseError::BadSymbol(c))? as u64;
        n = n
            .checked_mul(k)
            .and_then(|v| v.checked_add(d + 1))
            .ok_or(UniverseError::Overflow)?;
    }
    n.checked_add(1)
        .and_then(UniverseId::new)
        .ok_or(UniverseError::Overflow)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn id(i: u64) -> UniverseId {
        UniverseId::from_index(i)
    }

    #[test]
    fn zigzag_examples() {
        let u = Universe::Integers;
        assert_eq!(u.element_at(id(1)), Element::Int(0));
        assert_eq!(u.element_at(id(5)), Element::Int(-2));
        assert_eq!(u.index_of(&Element::Int(2)).unwrap(), id(4));
        let firsts: Vec<_> = (1..=5)
            .map(|i| u.element_at(id(i)).as_int().unwrap())
            .collect();
        assert_eq!(firsts, [0, 1, -1, 2, -2]);
    }

    #[test]
    fn shortlex_examples() {
        let u = Universe::strings("ab").unwrap();
        assert_eq!(u.element_at(id(1)), Element::Str(String::new()));
        assert_eq!(u.element_at(id(4)), Element::Str("aa".into()));
        assert_eq!(u.index_of(&Element::Str("b".into())).unwrap(), id(3));
        assert_eq!(u.index_of(&Element::Str("ab".into())).unwrap(), id(5));
    }

    #[test]
    fn rejects_symbols_outside_alphabet() {
        let u = Universe::strings("ab").unwrap();
        assert_eq!(
            u.index_of(&Element::Str("abc".into())),
            Err(UniverseError::BadSymbol('c'))
        );
        assert!(u.parse_element("ax").is_err());
        assert!(Universe::Integers.parse_element("1.5").is_err());
        assert!(Universe::Integers
            .index_of(&Element::Str("a".into()))
            .is_err());
    }

    #[test]
    fn extreme_integers() {
        let u = Universe::Integers;
        assert_eq!(
            u.index_of(&Element::Int(i64::MIN)),
            Err(UniverseError::Overflow)
        );
        let top = u.index_of(&Element::Int(i64::MAX)).unwrap();
        assert_eq!(u.element_at(top), Element::Int(i64::MAX));
        let low = u.index_of(&Element::Int(i64::MIN + 1)).unwrap();
        assert_eq!(u.element_at(low), Element::Int(i64::MIN + 1));
    }

    #[test]
    fn long_words_overflow_cleanly() {
        let u = Universe::strings("ab").unwrap();
        let long = "b".repeat(80);
        assert_eq!(
            u.index_of(&Element::Str(long)),
            Err(UniverseError::Overflow)
        );
    }

    #[test]
    fn exhaustive_round_trip_first_ten_thousand() {
        for u in [
            Universe::Integers,
            Universe::strings("ab").unwrap(),
            Universe::strings("xyz").unwrap(),
        ] {
            for i in 1..=10_000 {
                let x = u.element_at(id(i));
                assert_eq!(u.index_of(&x).unwrap(), id(i), "{x}");
            }
        }
    }

    #[test]
    fn shortlex_is_monotone_in_length() {
        let u = Universe::strings("abc").unwrap();
        let lens: Vec<usize> = (1..=5_000)
            .map(|i| u.word(id(i)).unwrap().chars().count())
            .collect();
        assert!(lens.windows(2).all(|w| w[0] <= w[1]));
    }

    proptest! {
        #[test]
        fn integer_round_trip(x in (i64::MIN + 1)..=i64::MAX) {
            let u = Universe::Integers;
            let i = u.index_of(&Element::Int(x)).unwrap();
            prop_assert_eq!(u.element_at(i), Element::Int(x));
        }

        #[test]
        fn string_round_trip(i in 1u64..u64::MAX / 4) {
            let u = Universe::strings("abc").unwrap();
            let w = u.element_at(id(i));
            prop_assert_eq!(u.index_of(&w).unwrap(), id(i));
        }
    }
}
